//! Certificate-producing procedures: nilpotency probes, singular-vector
//! extraction, contravariant Gram matrices, simplicity reduction on `V_e`,
//! highest-weight search by exact kernels, and small-support exploration.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::enveloping::{pbw_basis_level, straighten, PBWMonomial, Word};
use crate::error::{Error, Result};
use crate::liealg::{ensure_family, Family, Filtration, Gen, GradeValue, LieAlgebra, TriangularPart};
use crate::linalg::{determinant, nullspace, Matrix};
use crate::modules::{
    act, act_word, vector_to_json, CoeffOf, FdModule, HeisenbergModule, K0Module, Module,
    ModuleVector, SequenceIndex, VectorOf, VermaModule,
};
use crate::scalars::{Coefficient, QuadInt, Rational, Scalar};

pub const DEFAULT_PROBE: u32 = 4;
pub const DEFAULT_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilpotencyIndex {
    Index(usize),
    Exceeded(usize),
}

impl fmt::Display for NilpotencyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NilpotencyIndex::Index(m) => write!(f, "{m}"),
            NilpotencyIndex::Exceeded(c) => write!(f, "exceeded({c})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NilpotencyReport<I: Ord, F> {
    pub generator: Gen,
    pub start: ModuleVector<I, F>,
    pub index: NilpotencyIndex,
    /// Term counts of `s^k·start`, `k = 0, 1, ...`.
    pub trail: Vec<usize>,
}

impl<I: Ord + Clone + fmt::Display, F: Coefficient> NilpotencyReport<I, F> {
    pub fn to_json(&self) -> Value {
        let index = match self.index {
            NilpotencyIndex::Index(m) => json!(m),
            NilpotencyIndex::Exceeded(c) => json!({ "exceeded": c }),
        };
        json!({
            "generator": self.generator.to_string(),
            "start": vector_to_json(&self.start),
            "index": index,
            "trail": self.trail,
        })
    }
}

/// Smallest `m <= cap` with `s^m·v = 0`.
pub fn nilpotency_index<M: Module + ?Sized>(
    m: &M,
    s: &Gen,
    v: &VectorOf<M>,
    cap: usize,
) -> Result<NilpotencyReport<M::Index, CoeffOf<M>>> {
    if cap == 0 {
        return Err(Error::Domain("cap must be at least 1".into()));
    }
    let mut cur = v.clone();
    let mut trail = vec![cur.len()];
    let mut k = 0;
    let index = loop {
        if cur.is_zero() {
            break NilpotencyIndex::Index(k);
        }
        if k == cap {
            break NilpotencyIndex::Exceeded(cap);
        }
        cur = act(m, s, &cur)?;
        trail.push(cur.len());
        k += 1;
    };
    Ok(NilpotencyReport { generator: *s, start: v.clone(), index, trail })
}

/// Last nonzero vector of the string `v, s·v, s²·v, ...`.
fn string_top<M: Module + ?Sized>(
    m: &M,
    s: &Gen,
    v: VectorOf<M>,
    cap: usize,
    budget: &mut usize,
) -> Result<VectorOf<M>> {
    let mut cur = v;
    for _ in 0..cap {
        let next = act(m, s, &cur)?;
        *budget += 1;
        if next.is_zero() {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::Exceeded { generator: s.to_string(), cap })
}

fn index_or_exceeded<M: Module + ?Sized>(m: &M, s: &Gen, v: &VectorOf<M>, cap: usize, budget: &mut usize) -> Result<usize> {
    let r = nilpotency_index(m, s, v, cap)?;
    *budget += r.trail.len() - 1;
    match r.index {
        NilpotencyIndex::Index(k) => Ok(k),
        NilpotencyIndex::Exceeded(cap) => Err(Error::Exceeded { generator: s.to_string(), cap }),
    }
}

#[derive(Clone, Debug)]
pub struct SingularVectorResult<I: Ord, F> {
    pub vector: ModuleVector<I, F>,
    pub verified_generators: Vec<Gen>,
    /// Number of generator applications spent.
    pub budget_used: usize,
}

impl<I: Ord + Clone + fmt::Display, F: Coefficient> SingularVectorResult<I, F> {
    pub fn to_json(&self) -> Value {
        json!({
            "vector": vector_to_json(&self.vector),
            "verified_generators": self.verified_generators.iter().map(Gen::to_string).collect::<Vec<_>>(),
            "budget_used": self.budget_used,
        })
    }
}

/// Checks `v ≠ 0` and `s·v = 0` for every listed generator.
pub fn verify_singular<M: Module + ?Sized>(m: &M, v: &VectorOf<M>, gens: &[Gen]) -> Result<()> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    for s in gens {
        let r = act(m, s, v)?;
        if !r.is_zero() {
            return Err(Error::NotSingular(format!("{s} sends the vector to {r}")));
        }
    }
    Ok(())
}

fn finish<M: Module + ?Sized>(
    m: &M,
    vector: VectorOf<M>,
    gens: Vec<Gen>,
    budget_used: usize,
) -> Result<SingularVectorResult<M::Index, CoeffOf<M>>> {
    verify_singular(m, &vector, &gens)?;
    Ok(SingularVectorResult { vector, verified_generators: gens, budget_used })
}

/// Walks the filtration from the bottom: at each step the current vector is
/// replaced by the top of its string under the designated root vector.
pub fn extract_singular_fd(
    m: &FdModule,
    filtration: &Filtration,
    start: &VectorOf<FdModule>,
) -> Result<SingularVectorResult<crate::modules::FdIndex, Scalar>> {
    if start.is_zero() {
        return Err(Error::ZeroVector);
    }
    let fd = m.finite_dim();
    let plus = fd.basis_in_part(TriangularPart::Plus);
    filtration.validate(fd, &plus)?;
    let cap = m.dim() + 1;
    let mut budget = 0;
    let mut v = start.clone();
    for step in (1..=filtration.len()).rev() {
        let x = filtration.designated(step).expect("validated chain");
        v = string_top(m, &x, v, cap, &mut budget)?;
    }
    finish(m, v, plus, budget)
}

fn check_extraction_input<M: Module + ?Sized>(m: &M, family: Family, start: &VectorOf<M>, probe: u32) -> Result<()> {
    ensure_family(m.algebra(), family)?;
    if start.is_zero() {
        return Err(Error::ZeroVector);
    }
    if probe < 2 {
        return Err(Error::Domain("probe must be at least 2".into()));
    }
    Ok(())
}

/// Virasoro stage: top of the `e_1`-string, then the bound `n` with
/// `e_i·v = 0` for `i > n` read off from the `e_1`-string of `e_2·v`, then
/// string tops under `e_n, ..., e_1`.
fn virasoro_stage<M: Module + ?Sized>(m: &M, start: &VectorOf<M>, cap: usize, budget: &mut usize) -> Result<VectorOf<M>> {
    let (e1, e2) = (Gen::e(1), Gen::e(2));
    let mut v = string_top(m, &e1, start.clone(), cap, budget)?;
    let w = act(m, &e2, &v)?;
    *budget += 1;
    if w.is_zero() {
        return Ok(v);
    }
    let n = index_or_exceeded(m, &e1, &w, cap, budget)? + 1;
    for k in (1..=n as i64).rev() {
        v = string_top(m, &Gen::e(k), v, cap, budget)?;
    }
    Ok(v)
}

pub fn extract_singular_virasoro<M: Module + ?Sized>(
    m: &M,
    start: &VectorOf<M>,
    probe: u32,
    cap: usize,
) -> Result<SingularVectorResult<M::Index, CoeffOf<M>>> {
    check_extraction_input(m, Family::Virasoro, start, probe)?;
    let mut budget = 0;
    let v = virasoro_stage(m, start, cap, &mut budget)?;
    finish(m, v, m.algebra().raising_generators(probe), budget)
}

/// Virasoro stage, then string tops under `z_k, ..., z_1` where `k` is the
/// `e_1`-nilpotency index of `z_1·v`.
pub fn extract_singular_hv<M: Module + ?Sized>(
    m: &M,
    start: &VectorOf<M>,
    probe: u32,
    cap: usize,
) -> Result<SingularVectorResult<M::Index, CoeffOf<M>>> {
    check_extraction_input(m, Family::HeisenbergVirasoro, start, probe)?;
    let mut budget = 0;
    let mut v = virasoro_stage(m, start, cap, &mut budget)?;
    let w = act(m, &Gen::z(1), &v)?;
    budget += 1;
    if !w.is_zero() {
        let k = index_or_exceeded(m, &Gen::e(1), &w, cap, &mut budget)?;
        for j in (1..=k as i64).rev() {
            v = string_top(m, &Gen::z(j), v, cap, &mut budget)?;
        }
    }
    finish(m, v, m.algebra().raising_generators(probe), budget)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix<F> {
    pub level: GradeValue,
    pub basis: Vec<PBWMonomial>,
    pub entries: Matrix<F>,
}

impl<F: Coefficient> GramMatrix<F> {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(F::to_string).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level.to_string(),
            "basis": self.basis.iter().map(PBWMonomial::to_string).collect::<Vec<_>>(),
            "entries": self.entries.iter()
                .map(|r| r.iter().map(F::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let names: Vec<String> = self.basis.iter().map(PBWMonomial::to_string).collect();
        let mut s = format!("level {} basis [{}]\n", self.level, names.join(", "));
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(F::to_string).collect();
            s.push_str(&format!("[{}]\n", cells.join(", ")));
        }
        s
    }

    /// Reads the JSON form produced by [`GramMatrix::to_json`].
    pub fn from_json<A: LieAlgebra<Coeff = F> + ?Sized>(alg: &A, v: &Value) -> Result<Self> {
        let bad = |w: &str| Error::Parse(format!("gram json: {w}"));
        let level: i64 = v["level"].as_str().ok_or_else(|| bad("level"))?.parse().map_err(|_| bad("level"))?;
        let basis = v["basis"]
            .as_array()
            .ok_or_else(|| bad("basis"))?
            .iter()
            .map(|b| PBWMonomial::parse(b.as_str().ok_or_else(|| bad("basis"))?, alg))
            .collect::<Result<Vec<_>>>()?;
        let entries = v["entries"]
            .as_array()
            .ok_or_else(|| bad("entries"))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("row"))?
                    .iter()
                    .map(|c| c.as_str().ok_or_else(|| bad("cell"))?.parse())
                    .collect::<Result<Vec<F>>>()
            })
            .collect::<Result<Matrix<F>>>()?;
        if entries.len() != basis.len() || entries.iter().any(|r| r.len() != basis.len()) {
            return Err(bad("shape"));
        }
        Ok(Self { level: GradeValue::Int(level), basis, entries })
    }
}

impl GramMatrix<Scalar> {
    /// `G^T = conj(G)`.
    pub fn is_hermitian(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..=i).all(|j| self.entries[i][j] == self.entries[j][i].conj()))
    }
}

fn transpose_word<A: LieAlgebra + ?Sized>(alg: &A, u: &PBWMonomial) -> Word {
    Word(u.factors().iter().rev().map(|g| alg.omega(g)).collect())
}

fn ensure_gram_family<A: LieAlgebra + ?Sized>(alg: &A) -> Result<()> {
    match alg.family() {
        Family::Virasoro | Family::HeisenbergVirasoro => Ok(()),
        other => Err(Error::SpecMismatch(format!("no contravariant form implemented for {other}"))),
    }
}

/// `G[a][b]` = coefficient of the highest-weight vector in `ω(u_a)·u_b·v`.
pub fn shapovalov_gram<A: LieAlgebra>(m: &VermaModule<A>, level: u32) -> Result<GramMatrix<A::Coeff>> {
    let alg = m.algebra();
    ensure_gram_family(alg)?;
    let basis = pbw_basis_level(alg, level)?;
    let one = PBWMonomial::one();
    let mut entries = Vec::with_capacity(basis.len());
    for a in &basis {
        let w = transpose_word(alg, a);
        let mut row = Vec::with_capacity(basis.len());
        for b in &basis {
            let r = act_word(m, &w, &ModuleVector::basis(b.clone()))?;
            row.push(r.coeff(&one));
        }
        entries.push(row);
    }
    Ok(GramMatrix { level: GradeValue::Int(-(level as i64)), basis, entries })
}

/// Same entry computed by straightening the whole word `ω(u_a)·u_b` and
/// evaluating each sorted word on the highest-weight vector.
pub fn gram_entry_by_straightening<A: LieAlgebra>(m: &VermaModule<A>, a: &PBWMonomial, b: &PBWMonomial) -> Result<A::Coeff> {
    let alg = m.algebra();
    let mut w = transpose_word(alg, a);
    w.0.extend_from_slice(b.factors());
    let mut total = A::Coeff::zero();
    for (word, c) in straighten(&w, alg)? {
        if let Some((rest, k)) = m.evaluate_sorted_word(&word) {
            if rest.is_one() {
                total = total + c * k;
            }
        }
    }
    Ok(total)
}

pub fn gram_determinant<F: Coefficient>(g: &GramMatrix<F>) -> Result<F> {
    determinant(&g.entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityStep {
    pub position: usize,
    pub power: u32,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityCertificate {
    pub start: ModuleVector<SequenceIndex, Scalar>,
    pub steps: Vec<SimplicityStep>,
    pub terminal: SequenceIndex,
}

impl SimplicityCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "start": vector_to_json(&self.start),
            "steps": self.steps.iter()
                .map(|s| json!({ "position": s.position, "power": s.power, "count": s.count }))
                .collect::<Vec<_>>(),
            "terminal": self.terminal.to_string(),
        })
    }
}

fn apply_power(m: &HeisenbergModule, i: usize, k: u32, v: &VectorOf<HeisenbergModule>) -> Result<VectorOf<HeisenbergModule>> {
    let z = Gen::z(i as i64);
    let mut cur = v.clone();
    for _ in 0..k {
        cur = act(m, &z, &cur)?;
    }
    Ok(cur)
}

/// Reduces `u` to a single basis vector by powers of raising generators:
/// at the first position where surviving indices differ, apply `z_i^k` with
/// `k` the smallest entry there, which kills exactly the terms attaining it.
pub fn simplicity_witness(m: &HeisenbergModule, u: &VectorOf<HeisenbergModule>) -> Result<SimplicityCertificate> {
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    for idx in u.keys() {
        m.check_index(idx)?;
    }
    let mut steps = Vec::new();
    let mut cur = u.clone();
    while cur.len() > 1 {
        let keys: Vec<&SequenceIndex> = cur.keys().collect();
        let horizon = keys.iter().map(|k| k.horizon()).max().unwrap_or(0);
        let position = (1..=horizon)
            .find(|&i| keys.iter().any(|k| k.get(i) != keys[0].get(i)))
            .expect("distinct eventually constant sequences with equal tails differ below the horizon");
        let power = keys.iter().map(|k| k.get(position)).min().expect("nonempty");
        cur = apply_power(m, position, power, &cur)?;
        steps.push(SimplicityStep { position, power, count: cur.len() });
    }
    let terminal = cur.keys().next().expect("nonzero").clone();
    Ok(SimplicityCertificate { start: u.clone(), steps, terminal })
}

/// Replays a certificate through the module action.
pub fn replay_simplicity(m: &HeisenbergModule, cert: &SimplicityCertificate) -> Result<()> {
    let mut cur = cert.start.clone();
    let mut prev = cur.len();
    for (n, s) in cert.steps.iter().enumerate() {
        cur = apply_power(m, s.position, s.power, &cur)?;
        if cur.len() != s.count {
            return Err(Error::Invalid(format!("step {n}: recorded {} terms, found {}", s.count, cur.len())));
        }
        if cur.is_zero() || s.count >= prev {
            return Err(Error::Invalid(format!("step {n} does not strictly reduce a nonzero vector")));
        }
        prev = s.count;
    }
    match cur.keys().collect::<Vec<_>>().as_slice() {
        [only] if **only == cert.terminal => Ok(()),
        _ => Err(Error::Invalid(format!("replay ends at {cur}, not at {}", cert.terminal))),
    }
}

/// Searches the span of `region` for a nonzero vector killed by every probe
/// generator. Each weight component of such a vector is again one, so the
/// kernel is computed weight by weight, highest weight first.
pub fn highest_weight_probe<M: Module + ?Sized>(
    m: &M,
    region: &[M::Index],
    probe: &[Gen],
) -> Result<Option<VectorOf<M>>> {
    let mut by_weight: BTreeMap<GradeValue, Vec<M::Index>> = BTreeMap::new();
    for idx in region {
        m.check_index(idx)?;
        by_weight.entry(m.index_weight(idx)).or_default().push(idx.clone());
    }
    for (_, cols) in by_weight.iter_mut().rev() {
        cols.sort();
        cols.dedup();
        let mut rows: BTreeMap<(Gen, M::Index), usize> = BTreeMap::new();
        let mut images = Vec::with_capacity(cols.len());
        for idx in cols.iter() {
            let mut col = Vec::new();
            for s in probe {
                for (t, c) in act(m, s, &ModuleVector::basis(idx.clone()))? {
                    let n = rows.len();
                    let r = *rows.entry((*s, t)).or_insert(n);
                    col.push((r, c));
                }
            }
            images.push(col);
        }
        let mut mat: Matrix<CoeffOf<M>> = vec![vec![CoeffOf::<M>::zero(); cols.len()]; rows.len()];
        for (j, col) in images.into_iter().enumerate() {
            for (r, c) in col {
                mat[r][j] = c;
            }
        }
        if let Some(k) = nullspace(&mat, cols.len())?.into_iter().next() {
            return Ok(Some(cols.iter().cloned().zip(k).collect()));
        }
    }
    Ok(None)
}

/// Nonempty monomials of the Verma module at levels `1..=max_level`.
pub fn verma_region<A: LieAlgebra>(m: &VermaModule<A>, max_level: u32) -> Result<Vec<PBWMonomial>> {
    let mut out = Vec::new();
    for level in 1..=max_level {
        out.extend(pbw_basis_level(m.algebra(), level)?);
    }
    Ok(out)
}

/// Monomials with `1..=depth` factors, each a lowering generator with
/// coordinates bounded by `bound`.
pub fn k0_region(m: &K0Module, bound: i64, depth: usize) -> Vec<PBWMonomial> {
    let gens: Vec<Gen> = negative_box(m, bound).into_iter().map(Gen::eg).collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    multisets(&gens, 0, depth, &mut stack, &mut |f| {
        out.push(PBWMonomial::new(f.to_vec()).expect("lowering factors"));
    });
    out
}

fn negative_box(m: &K0Module, bound: i64) -> Vec<QuadInt> {
    m.algebra()
        .box_elements(bound)
        .into_iter()
        .filter(|x| crate::scalars::quad_sign(*x) < 0)
        .collect()
}

fn multisets<T: Clone>(items: &[T], start: usize, depth: usize, stack: &mut Vec<T>, f: &mut dyn FnMut(&[T])) {
    if stack.len() == depth {
        return;
    }
    for i in start..items.len() {
        stack.push(items[i].clone());
        f(stack);
        multisets(items, i, depth, stack, f);
        stack.pop();
    }
}

/// All `ε` agreeing with the module's tail beyond `horizon`, with entries
/// `1..=max_entry` at positions `1..=horizon`.
pub fn heisenberg_region(m: &HeisenbergModule, max_entry: u32, horizon: usize) -> Result<Vec<SequenceIndex>> {
    let tail = m.tail();
    if tail.horizon() > horizon {
        return Err(Error::Domain(format!("the tail {tail} reaches past horizon {horizon}")));
    }
    let mut out = Vec::new();
    let mut head = vec![1u32; horizon];
    loop {
        out.push(SequenceIndex::new(head.clone(), tail.tail_value())?);
        let Some(p) = head.iter().rposition(|&x| x < max_entry) else {
            break;
        };
        head[p] += 1;
        for x in &mut head[p + 1..] {
            *x = 1;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallWeight {
    pub weight: GradeValue,
    pub witness: PBWMonomial,
}

/// Weights `μ` that are sums of at most `depth` lowering degrees from the
/// algebra's search box with `0 < |μ| < threshold`, closest to zero first,
/// each with its smallest witness monomial.
pub fn small_support_explorer(m: &K0Module, depth: usize, threshold: &Rational) -> Result<Vec<SmallWeight>> {
    if *threshold <= Rational::zero() {
        return Err(Error::Domain("threshold must be positive".into()));
    }
    let gens = negative_box(m, m.algebra().search_box());
    let mut found: BTreeMap<QuadInt, PBWMonomial> = BTreeMap::new();
    let mut err = None;
    let mut stack = Vec::new();
    multisets(&gens, 0, depth, &mut stack, &mut |f| {
        let mu = f.iter().fold(QuadInt::ZERO, |a, b| a + *b);
        match (-mu).lt_rational(threshold) {
            Ok(true) => {
                let w = PBWMonomial::new(f.iter().copied().map(Gen::eg).collect()).expect("lowering");
                found.entry(mu).and_modify(|old| {
                    if w < *old {
                        *old = w.clone();
                    }
                }).or_insert(w);
            }
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(found
        .into_iter()
        .rev()
        .map(|(mu, witness)| SmallWeight { weight: GradeValue::Group(mu), witness })
        .collect())
}

/// Raising generators used to probe a module: degrees up to `bound`.
pub fn probe_generators<A: LieAlgebra + ?Sized>(alg: &A, bound: u32) -> Vec<Gen> {
    alg.raising_generators(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::liealg::{AlgebraSpec, HigherRankVirasoro};
    use crate::modules::{heisenberg_module_new, k0_new, verma_new, HighestWeight};
    use crate::scalars::rational;

    fn virasoro(l0: Rational, c: Rational) -> VermaModule<AlgebraSpec> {
        let alg = AlgebraSpec::Virasoro;
        let hw = HighestWeight::new(&alg, [(Gen::e(0), l0.into()), (Gen::central(0), c.into())]).unwrap();
        verma_new(alg, hw).unwrap()
    }

    fn hv(pairs: &str) -> VermaModule<AlgebraSpec> {
        let alg = AlgebraSpec::HeisenbergVirasoro;
        let hw = HighestWeight::parse(&alg, &[pairs.to_string()]).unwrap();
        verma_new(alg, hw).unwrap()
    }

    fn mono(gs: &[Gen]) -> PBWMonomial {
        PBWMonomial::new(gs.to_vec()).unwrap()
    }

    fn vac() -> ModuleVector<PBWMonomial, Scalar> {
        ModuleVector::basis(PBWMonomial::one())
    }

    #[test]
    fn nilpotency_examples() {
        let v = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
        let start = ModuleVector::basis(SequenceIndex::constant(2).unwrap());
        let r = nilpotency_index(&v, &Gen::z(2), &start, 64).unwrap();
        assert_eq!(r.index, NilpotencyIndex::Index(2));
        assert_eq!(r.trail, vec![1, 1, 0]);

        let m = virasoro(rational(7, 3), rational(1, 2));
        assert_eq!(nilpotency_index(&m, &Gen::e(1), &vac(), 64).unwrap().index, NilpotencyIndex::Index(1));
        let u = ModuleVector::basis(mono(&[Gen::e(-1)]));
        assert_eq!(nilpotency_index(&m, &Gen::e(1), &u, 64).unwrap().index, NilpotencyIndex::Index(2));
        let r = nilpotency_index(&m, &Gen::e(-1), &u, 3).unwrap();
        assert_eq!(r.index, NilpotencyIndex::Exceeded(3));
        assert!(nilpotency_index(&m, &Gen::e(1), &u, 0).is_err());
    }

    #[test]
    fn fd_extraction_examples() {
        let adj = FdModule::adjoint(AlgebraSpec::sl2()).unwrap();
        let filt = adj.finite_dim().filtration().clone();
        let f = ModuleVector::basis(adj.parse_index("f").unwrap());
        let r = extract_singular_fd(&adj, &filt, &f).unwrap();
        assert_eq!(r.vector, ModuleVector::single(adj.parse_index("e").unwrap(), Scalar::from(-2)));
        assert_eq!(r.budget_used, 3);
        let e = ModuleVector::basis(adj.parse_index("e").unwrap());
        assert_eq!(extract_singular_fd(&adj, &filt, &e).unwrap().vector, e);

        let v2 = FdModule::sl2_irrep(2).unwrap();
        let low = ModuleVector::basis(v2.parse_index("v2").unwrap());
        let r = extract_singular_fd(&v2, &filt, &low).unwrap();
        assert_eq!(r.vector.keys().cloned().collect::<Vec<_>>(), vec![v2.parse_index("v0").unwrap()]);
        let esym = v2.finite_dim().symbol_named("e").unwrap();
        let rep = nilpotency_index(&v2, &esym, &low, 10).unwrap();
        assert_eq!(rep.index, NilpotencyIndex::Index(3));

        let bad = Filtration { ideals: vec![vec![esym], vec![esym]] };
        assert!(matches!(extract_singular_fd(&v2, &bad, &low), Err(Error::InvalidFiltration(_))));
    }

    #[test]
    fn fd_extraction_sl3() {
        let m = FdModule::adjoint(AlgebraSpec::sl3()).unwrap();
        let filt = m.finite_dim().filtration().clone();
        let start = ModuleVector::basis(m.parse_index("f13").unwrap());
        let r = extract_singular_fd(&m, &filt, &start).unwrap();
        assert_eq!(r.vector.keys().map(|k| k.to_string()).collect::<Vec<_>>(), vec!["e13"]);
    }

    #[test]
    fn virasoro_extraction_examples() {
        let m = virasoro(rational(0, 1), rational(5, 2));
        let u = ModuleVector::basis(mono(&[Gen::e(-1)]));
        let r = extract_singular_virasoro(&m, &u, DEFAULT_PROBE, DEFAULT_CAP).unwrap();
        assert_eq!(r.vector, u);

        let m = virasoro(rational(7, 3), rational(5, 2));
        let r = extract_singular_virasoro(&m, &u, DEFAULT_PROBE, DEFAULT_CAP).unwrap();
        assert_eq!(r.vector, ModuleVector::single(PBWMonomial::one(), Scalar::from(rational(-14, 3))));
        assert!(matches!(
            extract_singular_virasoro(&m, &ModuleVector::zero(), 4, 64),
            Err(Error::ZeroVector)
        ));

        let v = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
        let s = ModuleVector::basis(SequenceIndex::constant(2).unwrap());
        assert!(matches!(extract_singular_virasoro(&v, &s, 4, 64), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn virasoro_extraction_deep_start() {
        let m = virasoro(rational(-3, 7), rational(11, 5));
        let mut u = ModuleVector::basis(mono(&[Gen::e(-3), Gen::e(-1)]));
        u.add_term(mono(&[Gen::e(-2), Gen::e(-2)]), Scalar::from(3));
        u.add_term(mono(&[Gen::e(-1)]), Scalar::i());
        let r = extract_singular_virasoro(&m, &u, 6, DEFAULT_CAP).unwrap();
        verify_singular(&m, &r.vector, &m.algebra().raising_generators(6)).unwrap();
    }

    #[test]
    fn hv_extraction_examples() {
        let m = hv("e0=2/3 z0=1/2 c1=3 c2=1/5 c3=-7/4");
        let u = ModuleVector::basis(mono(&[Gen::z(-1)]));
        let r = extract_singular_hv(&m, &u, DEFAULT_PROBE, DEFAULT_CAP).unwrap();
        assert_eq!(r.vector.keys().collect::<Vec<_>>(), vec![&PBWMonomial::one()]);
        assert_eq!(extract_singular_hv(&m, &vac(), 4, 64).unwrap().vector, vac());
        assert!(extract_singular_hv(&m, &ModuleVector::zero(), 4, 64).is_err());
        assert!(r.verified_generators.contains(&Gen::z(1)));
        assert!(r.verified_generators.contains(&Gen::e(2)));
    }

    #[test]
    fn hv_extraction_reaches_z_stage() {
        let m = hv("e0=0 z0=0 c1=1 c2=0 c3=0");
        let mut u = ModuleVector::basis(mono(&[Gen::e(-2), Gen::z(-1)]));
        u.add_term(mono(&[Gen::z(-2), Gen::z(-1)]), Scalar::from(2));
        let r = extract_singular_hv(&m, &u, 5, DEFAULT_CAP).unwrap();
        verify_singular(&m, &r.vector, &m.algebra().raising_generators(5)).unwrap();
    }

    #[test]
    fn gram_examples() {
        let m = virasoro(rational(7, 3), rational(1, 2));
        let g0 = shapovalov_gram(&m, 0).unwrap();
        assert_eq!(g0.entries, vec![vec![Scalar::one()]]);
        assert_eq!(gram_determinant(&g0).unwrap(), Scalar::one());
        let g1 = shapovalov_gram(&m, 1).unwrap();
        assert_eq!(g1.entries, vec![vec![Scalar::from(rational(-14, 3))]]);
        assert_eq!(gram_determinant(&g1).unwrap(), Scalar::from(rational(-14, 3)));
        let z = virasoro(rational(0, 1), rational(0, 1));
        assert!(gram_determinant(&shapovalov_gram(&z, 1).unwrap()).unwrap().is_zero());
        let h = virasoro(rational(1, 1), rational(1, 1));
        let heis = AlgebraSpec::Heisenberg;
        assert!(verma_new(heis, HighestWeight::zero(&AlgebraSpec::Heisenberg)).is_err());
        assert!(shapovalov_gram(&h, 2).unwrap().is_symmetric());
    }

    #[test]
    fn virasoro_level_two_gram_closed_form() {
        // basis e-2, e-1.e-1: [[-4h + c/2, 6h], [6h, 4h(2h-1)]], expanded by hand
        let (h, c) = (rational(3, 4), rational(-2, 5));
        let m = virasoro(h.clone(), c.clone());
        let g = shapovalov_gram(&m, 2).unwrap();
        let s = |r: Rational| Scalar::from(r);
        let h4 = s(h.clone()) * Scalar::from(-4) + s(c) * s(rational(1, 2));
        let off = s(h.clone()) * Scalar::from(6);
        let d = s(h.clone()) * Scalar::from(4) * (s(h) * Scalar::from(2) - Scalar::one());
        assert_eq!(g.entries, vec![vec![h4, off.clone()], vec![off, d]]);
    }

    #[test]
    fn gram_agrees_with_straightening() {
        for m in [virasoro(rational(5, 7), rational(-3, 2)), hv("e0=1/2 z0=3 c1=2 c2=1/3 c3=-1")] {
            for level in 0..=3 {
                let g = shapovalov_gram(&m, level).unwrap();
                for (i, a) in g.basis.iter().enumerate() {
                    for (j, b) in g.basis.iter().enumerate() {
                        assert_eq!(g.entries[i][j], gram_entry_by_straightening(&m, a, b).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn hv_gram_symmetry() {
        let m = hv("e0=1/2 z0=3 c1=2 c2=0 c3=-1");
        for level in 0..=3 {
            assert!(shapovalov_gram(&m, level).unwrap().is_symmetric());
        }
        let m = hv("e0=1/2 z0=3 c1=2 c2=1/3 c3=-1");
        let g = shapovalov_gram(&m, 1).unwrap();
        assert!(!g.is_symmetric());
        for level in 0..=3 {
            assert!(shapovalov_gram(&m, level).unwrap().is_hermitian());
        }
    }

    #[test]
    fn gram_serialization() {
        let m = virasoro(rational(1, 3), rational(2, 1));
        let g = shapovalov_gram(&m, 2).unwrap();
        assert_eq!(GramMatrix::from_json(m.algebra(), &g.to_json()).unwrap(), g);
        let z = virasoro(rational(0, 1), rational(0, 1));
        assert_eq!(shapovalov_gram(&z, 1).unwrap().to_csv(), "0\n");
    }

    fn seq(s: &str) -> SequenceIndex {
        s.parse().unwrap()
    }

    #[test]
    fn simplicity_examples() {
        let m = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
        let mut u = ModuleVector::basis(seq("(1,2*,...)"));
        u.add_term(seq("(2*,...)"), Scalar::one());
        let c = simplicity_witness(&m, &u).unwrap();
        assert_eq!(c.steps, vec![SimplicityStep { position: 1, power: 1, count: 1 }]);
        assert_eq!(c.terminal, seq("(1,2*,...)"));
        replay_simplicity(&m, &c).unwrap();

        let single = ModuleVector::basis(seq("(3,1,2*,...)"));
        let c = simplicity_witness(&m, &single).unwrap();
        assert!(c.steps.is_empty());
        assert_eq!(c.terminal, seq("(3,1,2*,...)"));

        let mut u = ModuleVector::basis(seq("(1,2*,...)"));
        u.add_term(seq("(3,2*,...)"), Scalar::one());
        u.add_term(seq("(2,1,2*,...)"), Scalar::one());
        let c = simplicity_witness(&m, &u).unwrap();
        assert!(c.steps.len() <= 2);
        replay_simplicity(&m, &c).unwrap();

        assert!(simplicity_witness(&m, &ModuleVector::zero()).is_err());
        let mut tampered = c.clone();
        tampered.steps[0].count += 1;
        assert!(replay_simplicity(&m, &tampered).is_err());
    }

    #[test]
    fn probe_finds_level_one_singular_vector() {
        let m = virasoro(rational(0, 1), rational(0, 1));
        let region = verma_region(&m, 2).unwrap();
        let found = highest_weight_probe(&m, &region, &probe_generators(m.algebra(), 4)).unwrap();
        assert_eq!(found, Some(ModuleVector::basis(mono(&[Gen::e(-1)]))));
        let m = virasoro(rational(1, 3), rational(1, 1));
        let region = verma_region(&m, 2).unwrap();
        assert!(highest_weight_probe(&m, &region, &probe_generators(m.algebra(), 4)).unwrap().is_none());
    }

    #[test]
    fn probe_on_heisenberg_module() {
        let m = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
        let region = heisenberg_region(&m, 3, 4).unwrap();
        assert_eq!(region.len(), 81);
        assert!(highest_weight_probe(&m, &region, &probe_generators(m.algebra(), 6)).unwrap().is_none());
        // probing only inside the horizon sees the all-ones head as singular
        assert!(highest_weight_probe(&m, &region, &probe_generators(m.algebra(), 4)).unwrap().is_some());
    }

    #[test]
    fn k0_region_size() {
        let k0 = k0_new(HigherRankVirasoro::default());
        assert_eq!(k0_region(&k0, 3, 1).len(), 24);
        assert_eq!(k0_region(&k0, 3, 2).len(), 24 + 24 * 25 / 2);
    }

    #[test]
    fn small_support_examples() {
        let k0 = k0_new(HigherRankVirasoro::default());
        let r = small_support_explorer(&k0, 2, &rational(1, 2)).unwrap();
        let small = GradeValue::Group(QuadInt::new(-3, 2));
        let hit = r.iter().find(|w| w.weight == small).unwrap();
        assert_eq!(hit.witness, mono(&[Gen::eg(QuadInt::new(-3, 2))]));
        let r = small_support_explorer(&k0, 1, &rational(1, 1)).unwrap();
        assert!(r.iter().any(|w| w.weight == GradeValue::Group(QuadInt::new(1, -1))));
        assert!(small_support_explorer(&k0, 2, &rational(1, 100)).unwrap().is_empty());
        assert!(small_support_explorer(&k0, 2, &rational(0, 1)).is_err());
        for w in small_support_explorer(&k0, 2, &rational(1, 5)).unwrap() {
            assert!(w.weight.signum() < 0);
            assert!((-w.weight.as_quad()).lt_rational(&rational(1, 5)).unwrap());
            assert_eq!(w.witness.weight(), w.weight);
        }
    }
}
