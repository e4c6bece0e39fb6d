//! Words in the generators, PBW lowering monomials, and straightening of
//! words into PBW normal form by the rewriting `xy → yx + [x,y]`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::liealg::{Gen, GradeValue, LieAlgebra, TriangularPart};
use crate::sparse::LinComb;

/// Product of generators; the rightmost factor acts first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn new(factors: Vec<Gen>) -> Self {
        Word(factors)
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn weight(&self) -> GradeValue {
        self.0.iter().map(Gen::weight).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, factors: &[Gen]) -> fmt::Result {
    if factors.is_empty() {
        return write!(f, "1");
    }
    for (i, g) in factors.iter().enumerate() {
        if i > 0 {
            write!(f, ".")?;
        }
        write!(f, "{g}")?;
    }
    Ok(())
}

fn parse_factors<A: LieAlgebra + ?Sized>(s: &str, alg: &A) -> Result<Vec<Gen>> {
    let s = s.trim();
    if s == "1" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('.').map(|t| alg.parse_symbol(t)).collect()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_factors(f, &self.0)
    }
}

impl Word {
    pub fn parse<A: LieAlgebra + ?Sized>(s: &str, alg: &A) -> Result<Self> {
        Ok(Word(parse_factors(s, alg)?))
    }
}

/// Sorted product of lowering generators, most negative factor leftmost.
/// The empty monomial stands for the highest-weight generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PBWMonomial(Vec<Gen>);

impl PBWMonomial {
    pub fn one() -> Self {
        PBWMonomial(Vec::new())
    }

    /// Sorts the factors; fails unless all of them are lowering symbols.
    pub fn new(mut factors: Vec<Gen>) -> Result<Self> {
        if let Some(g) = factors.iter().find(|g| g.part() != TriangularPart::Minus) {
            return Err(Error::Domain(format!("{g} is not a lowering generator")));
        }
        factors.sort();
        Ok(PBWMonomial(factors))
    }

    pub(crate) fn from_sorted(factors: Vec<Gen>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0] <= w[1]));
        PBWMonomial(factors)
    }

    pub fn factors(&self) -> &[Gen] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> GradeValue {
        monomial_weight(self)
    }

    pub fn parse<A: LieAlgebra + ?Sized>(s: &str, alg: &A) -> Result<Self> {
        Self::new(parse_factors(s, alg)?)
    }
}

impl fmt::Display for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_factors(f, &self.0)
    }
}

pub fn monomial_weight(m: &PBWMonomial) -> GradeValue {
    m.0.iter().map(Gen::weight).sum()
}

/// Straightened form: a combination of sorted words.
pub type NormalForm<F> = LinComb<Word, F>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Rewrite the leftmost out-of-order adjacent pair first.
    Leftmost,
    /// Rewrite the rightmost out-of-order adjacent pair first.
    Rightmost,
}

/// Memoising straightener for one algebra and one rewrite strategy. The
/// cache is owned by the value, so each instance is thread-confined.
pub struct Straightener<'a, A: LieAlgebra + ?Sized> {
    alg: &'a A,
    strategy: Strategy,
    memo: HashMap<Word, NormalForm<A::Coeff>>,
    use_memo: bool,
}

impl<'a, A: LieAlgebra + ?Sized> Straightener<'a, A> {
    pub fn new(alg: &'a A, strategy: Strategy) -> Self {
        Self { alg, strategy, memo: HashMap::new(), use_memo: true }
    }

    pub fn without_memo(mut self) -> Self {
        self.use_memo = false;
        self
    }

    pub fn straighten(&mut self, w: &Word) -> Result<NormalForm<A::Coeff>> {
        for g in &w.0 {
            crate::liealg::ensure_member(self.alg, g)?;
        }
        Ok(self.rewrite(w))
    }

    fn out_of_order(&self, w: &Word) -> Option<usize> {
        let mut pairs = w.0.windows(2).enumerate().filter(|(_, p)| p[0] > p[1]).map(|(i, _)| i);
        match self.strategy {
            Strategy::Leftmost => pairs.next(),
            Strategy::Rightmost => pairs.next_back(),
        }
    }

    fn rewrite(&mut self, w: &Word) -> NormalForm<A::Coeff> {
        let Some(i) = self.out_of_order(w) else {
            return NormalForm::basis(w.clone());
        };
        if self.use_memo {
            if let Some(nf) = self.memo.get(w) {
                return nf.clone();
            }
        }
        let (x, y) = (w.0[i], w.0[i + 1]);
        let mut swapped = w.0.clone();
        swapped.swap(i, i + 1);
        let mut out = self.rewrite(&Word(swapped));
        for (g, c) in self.alg.bracket_symbols(&x, &y).iter() {
            let mut shorter = Vec::with_capacity(w.len() - 1);
            shorter.extend_from_slice(&w.0[..i]);
            shorter.push(*g);
            shorter.extend_from_slice(&w.0[i + 2..]);
            let nf = self.rewrite(&Word(shorter));
            out.add_scaled(&nf, c);
        }
        if self.use_memo {
            self.memo.insert(w.clone(), out.clone());
        }
        out
    }
}

/// Straightens `w` with the leftmost strategy.
pub fn straighten<A: LieAlgebra + ?Sized>(w: &Word, alg: &A) -> Result<NormalForm<A::Coeff>> {
    Straightener::new(alg, Strategy::Leftmost).straighten(w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwBasis {
    pub monomials: Vec<PBWMonomial>,
    /// Set when the factor cap or a finite search box may have excluded
    /// monomials of this weight.
    pub truncated: bool,
}

/// All sorted lowering monomials of total weight `weight`, in lexicographic
/// order. Dense gradings restrict factors to the algebra's search box and
/// always report truncation away from weight zero.
pub fn pbw_basis<A: LieAlgebra + ?Sized>(
    alg: &A,
    weight: GradeValue,
    depth_cap: Option<usize>,
) -> Result<PbwBasis> {
    if weight.signum() > 0 {
        return Err(Error::Domain(format!("weight {weight} is positive")));
    }
    if alg.dense_grading() && depth_cap.is_none() && !weight.is_zero() {
        return Err(Error::Domain("a factor cap is required for dense gradings".into()));
    }
    let candidates = alg.lowering_candidates(weight);
    let mut out = Vec::new();
    let mut truncated = alg.dense_grading() && !weight.is_zero();
    let mut stack = Vec::new();
    enumerate(&candidates, 0, weight, depth_cap, &mut stack, &mut out, &mut truncated);
    out.sort();
    Ok(PbwBasis { monomials: out, truncated })
}

/// Convenience for integer gradings: weight `-level`.
pub fn pbw_basis_level<A: LieAlgebra + ?Sized>(alg: &A, level: u32) -> Result<Vec<PBWMonomial>> {
    Ok(pbw_basis(alg, GradeValue::Int(-(level as i64)), None)?.monomials)
}

fn enumerate(
    candidates: &[Gen],
    start: usize,
    remaining: GradeValue,
    cap: Option<usize>,
    stack: &mut Vec<Gen>,
    out: &mut Vec<PBWMonomial>,
    truncated: &mut bool,
) {
    if remaining.is_zero() {
        out.push(PBWMonomial::from_sorted(stack.clone()));
        return;
    }
    let fits = |g: &Gen| g.weight() >= remaining;
    if cap.is_some_and(|c| stack.len() >= c) {
        if candidates[start..].iter().any(fits) {
            *truncated = true;
        }
        return;
    }
    for (k, g) in candidates.iter().enumerate().skip(start) {
        if !fits(g) {
            continue;
        }
        stack.push(*g);
        enumerate(candidates, k, remaining - g.weight(), cap, stack, out, truncated);
        stack.pop();
    }
}
