//! Generators, gradings, triangular decompositions and exact brackets of the
//! supported Lie algebras.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::{int, rational, Coefficient, QuadInt, QuadScalar, Scalar};

/// Element of the grading group: an integer, or an element of ℤ + ℤ√2.
///
/// Equality, ordering and hashing go through the real value, so `Int(n)` and
/// `Group((n, 0))` are the same grade.
#[derive(Clone, Copy, Debug)]
pub enum GradeValue {
    Int(i64),
    Group(QuadInt),
}

impl GradeValue {
    pub const ZERO: GradeValue = GradeValue::Int(0);

    pub fn as_quad(self) -> QuadInt {
        match self {
            GradeValue::Int(n) => QuadInt::new(n, 0),
            GradeValue::Group(q) => q,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            GradeValue::Int(n) => Some(n),
            GradeValue::Group(q) if q.b == 0 => Some(q.a),
            GradeValue::Group(_) => None,
        }
    }

    pub fn signum(self) -> i8 {
        crate::scalars::quad_sign(self.as_quad())
    }

    pub fn is_zero(self) -> bool {
        self.signum() == 0
    }
}

impl PartialEq for GradeValue {
    fn eq(&self, other: &Self) -> bool {
        self.as_quad() == other.as_quad()
    }
}

impl Eq for GradeValue {}

impl Hash for GradeValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.as_quad().hash(state)
    }
}

impl Ord for GradeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GradeValue::Int(a), GradeValue::Int(b)) => a.cmp(b),
            _ => self.as_quad().cmp(&other.as_quad()),
        }
    }
}

impl PartialOrd for GradeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for GradeValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (GradeValue::Int(a), GradeValue::Int(b)) => GradeValue::Int(a + b),
            _ => GradeValue::Group(self.as_quad() + rhs.as_quad()),
        }
    }
}

impl Neg for GradeValue {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            GradeValue::Int(a) => GradeValue::Int(-a),
            GradeValue::Group(q) => GradeValue::Group(-q),
        }
    }
}

impl Sub for GradeValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl std::iter::Sum for GradeValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(GradeValue::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for GradeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradeValue::Int(n) => write!(f, "{n}"),
            GradeValue::Group(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    E,
    Z,
    /// Central element; index 0 prints as the unnamed `c`.
    Central(u8),
    /// Named basis vector of a finite-dimensional algebra.
    Fd(&'static str),
}

impl SymbolKind {
    fn rank(self) -> u8 {
        match self {
            SymbolKind::E => 0,
            SymbolKind::Z => 1,
            SymbolKind::Fd(_) => 2,
            SymbolKind::Central(_) => 3,
        }
    }

    fn tie_key(self) -> (u8, u8, &'static str) {
        match self {
            SymbolKind::Central(k) => (self.rank(), k, ""),
            SymbolKind::Fd(name) => (self.rank(), 0, name),
            _ => (self.rank(), 0, ""),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriangularPart {
    Minus,
    Cartan,
    Plus,
}

/// A basis vector of one of the algebras, identified by kind and degree.
///
/// The total order is the PBW order used for normal forms: lowering block
/// (degree ascending), then Cartan block (e/z before centrals), then raising
/// block (degree ascending); `e` before `z` at equal degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSymbol {
    pub kind: SymbolKind,
    pub degree: GradeValue,
}

pub type Gen = GeneratorSymbol;

impl GeneratorSymbol {
    pub fn e(n: i64) -> Self {
        Self { kind: SymbolKind::E, degree: GradeValue::Int(n) }
    }

    pub fn z(n: i64) -> Self {
        Self { kind: SymbolKind::Z, degree: GradeValue::Int(n) }
    }

    pub fn eg(q: QuadInt) -> Self {
        Self { kind: SymbolKind::E, degree: GradeValue::Group(q) }
    }

    pub fn central(k: u8) -> Self {
        Self { kind: SymbolKind::Central(k), degree: GradeValue::ZERO }
    }

    pub fn fd(name: &'static str, degree: i64) -> Self {
        Self { kind: SymbolKind::Fd(name), degree: GradeValue::Int(degree) }
    }

    pub fn weight(&self) -> GradeValue {
        weight_of(self)
    }

    pub fn part(&self) -> TriangularPart {
        triangular_part(self)
    }

    pub fn with_degree(self, degree: GradeValue) -> Self {
        Self { kind: self.kind, degree }
    }

    fn display_key(&self) -> (u8, u8, GradeValue, &'static str) {
        let (r, k, n) = self.kind.tie_key();
        (r, k, self.degree, n)
    }

    /// Comparison used when printing algebra elements: by kind, then degree.
    pub fn display_cmp(&self, other: &Self) -> Ordering {
        self.display_key().cmp(&other.display_key())
    }
}

pub fn weight_of(s: &GeneratorSymbol) -> GradeValue {
    match s.kind {
        SymbolKind::Central(_) => GradeValue::ZERO,
        _ => s.degree,
    }
}

pub fn triangular_part(s: &GeneratorSymbol) -> TriangularPart {
    match weight_of(s).signum() {
        -1 => TriangularPart::Minus,
        0 => TriangularPart::Cartan,
        _ => TriangularPart::Plus,
    }
}

impl Ord for GeneratorSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        let (pa, pb) = (self.part(), other.part());
        pa.cmp(&pb)
            .then_with(|| self.weight().cmp(&other.weight()))
            .then_with(|| self.kind.tie_key().cmp(&other.kind.tie_key()))
    }
}

impl PartialOrd for GeneratorSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            SymbolKind::E => "e",
            SymbolKind::Z => "z",
            SymbolKind::Central(0) => return write!(f, "c"),
            SymbolKind::Central(k) => return write!(f, "c{k}"),
            SymbolKind::Fd(name) => return write!(f, "{name}"),
        };
        match self.degree {
            GradeValue::Int(n) => write!(f, "{letter}{n}"),
            GradeValue::Group(q) => write!(f, "{letter}{q}"),
        }
    }
}

/// Parses the common symbol grammar `e<k>`, `z<k>`, `c`, `c<k>`, `e(<a>,<b>)`.
/// Finite-dimensional names are resolved by the algebra.
pub fn parse_symbol_grammar(s: &str) -> Result<GeneratorSymbol> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad generator symbol `{s}`"));
    if s == "c" {
        return Ok(Gen::central(0));
    }
    let (head, rest) = s.split_at(s.chars().next().map(char::len_utf8).ok_or_else(bad)?);
    let kind = match head {
        "e" => SymbolKind::E,
        "z" => SymbolKind::Z,
        "c" => {
            let k: u8 = rest.parse().map_err(|_| bad())?;
            return Ok(Gen::central(k));
        }
        _ => return Err(bad()),
    };
    let degree = if rest.starts_with('(') {
        GradeValue::Group(rest.parse()?)
    } else {
        GradeValue::Int(rest.parse().map_err(|_| bad())?)
    };
    Ok(Gen { kind, degree })
}

/// Finite exact linear combination of generator symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement<F> {
    terms: BTreeMap<Gen, F>,
}

impl<F: Coefficient> Default for AlgebraElement<F> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<F: Coefficient> AlgebraElement<F> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_gen(g: Gen) -> Self {
        Self::term(g, F::one())
    }

    pub fn term(g: Gen, c: F) -> Self {
        let mut x = Self::zero();
        x.add_term(g, c);
        x
    }

    pub fn add_term(&mut self, g: Gen, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, k: &F) {
        for (g, c) in &other.terms {
            self.add_term(*g, k.clone() * c.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &Gen) -> F {
        self.terms.get(g).cloned().unwrap_or_else(F::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Gen, &F)> {
        self.terms.iter()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Gen> {
        self.terms.keys()
    }

    pub fn scale(&self, k: &F) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, k);
        out
    }
}

impl<F: Coefficient> Add for AlgebraElement<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_scaled(&rhs, &F::one());
        self
    }
}

impl<F: Coefficient> Sub for AlgebraElement<F> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.add_scaled(&rhs, &-F::one());
        self
    }
}

impl<F: Coefficient> Neg for AlgebraElement<F> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-F::one())
    }
}

/// Writes `c1*x1 + c2*x2 - ...`; `0` for an empty sum.
pub(crate) fn write_signed_sum<F: Coefficient>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, F)>,
) -> fmt::Result {
    let mut first = true;
    for (name, c) in terms {
        let (neg, body) = c.signed_term();
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        write!(f, "{body}*{name}")?;
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<F: Coefficient> fmt::Display for AlgebraElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.display_cmp(b.0));
        write_signed_sum(f, terms.into_iter().map(|(g, c)| (g.to_string(), c.clone())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Virasoro,
    HeisenbergVirasoro,
    Heisenberg,
    HigherRankVirasoro,
    FiniteDim,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Virasoro => "virasoro",
            Family::HeisenbergVirasoro => "heisenberg-virasoro",
            Family::Heisenberg => "heisenberg",
            Family::HigherRankVirasoro => "higher-rank-virasoro",
            Family::FiniteDim => "finite-dimensional",
        })
    }
}

/// A Lie algebra with a fixed basis of generator symbols and a triangular
/// decomposition read off from the grading.
pub trait LieAlgebra: fmt::Debug + Send + Sync {
    type Coeff: Coefficient;

    fn family(&self) -> Family;

    fn contains(&self, s: &Gen) -> bool;

    /// Bracket of two basis symbols. Callers guarantee membership.
    fn bracket_symbols(&self, x: &Gen, y: &Gen) -> AlgebraElement<Self::Coeff>;

    /// Basis of the Cartan block (degree-zero symbols including centrals).
    fn cartan_basis(&self) -> Vec<Gen>;

    /// Lowering symbols `g` with `weight <= deg g < 0`, ascending in PBW order.
    /// For a dense grading this is restricted to the algebra's search box.
    fn lowering_candidates(&self, weight: GradeValue) -> Vec<Gen>;

    /// Raising symbols up to the given bound (degree for integer gradings,
    /// coefficient box for dense ones), ascending.
    fn raising_generators(&self, bound: u32) -> Vec<Gen>;

    /// Whether weight spaces of the Verma module are infinite-dimensional.
    fn dense_grading(&self) -> bool {
        false
    }

    fn parse_symbol(&self, s: &str) -> Result<Gen> {
        let g = parse_symbol_grammar(s)?;
        if self.contains(&g) {
            Ok(g)
        } else {
            Err(Error::SpecMismatch(format!("`{s}` is not a generator of {}", self.family())))
        }
    }

    /// The transpose partner used for contravariant forms: degree negated,
    /// central and finite-dimensional Cartan symbols fixed.
    fn omega(&self, s: &Gen) -> Gen {
        match s.kind {
            SymbolKind::E | SymbolKind::Z => s.with_degree(-s.degree),
            _ => *s,
        }
    }
}

pub fn ensure_member<A: LieAlgebra + ?Sized>(alg: &A, s: &Gen) -> Result<()> {
    if alg.contains(s) {
        Ok(())
    } else {
        Err(Error::SpecMismatch(format!("{s} is not a generator of {}", alg.family())))
    }
}

pub fn ensure_family<A: LieAlgebra + ?Sized>(alg: &A, family: Family) -> Result<()> {
    if alg.family() == family {
        Ok(())
    } else {
        Err(Error::SpecMismatch(format!("expected a {family} module, got {}", alg.family())))
    }
}

/// Bilinear extension of the structure constants.
pub fn bracket<A: LieAlgebra + ?Sized>(
    x: &AlgebraElement<A::Coeff>,
    y: &AlgebraElement<A::Coeff>,
    alg: &A,
) -> Result<AlgebraElement<A::Coeff>> {
    for s in x.symbols().chain(y.symbols()) {
        ensure_member(alg, s)?;
    }
    let mut out = AlgebraElement::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            let k = ca.clone() * cb.clone();
            out.add_scaled(&alg.bracket_symbols(a, b), &k);
        }
    }
    Ok(out)
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`; zero for a genuine Lie algebra.
pub fn jacobi_probe<A: LieAlgebra + ?Sized>(
    x: &Gen,
    y: &Gen,
    z: &Gen,
    alg: &A,
) -> Result<AlgebraElement<A::Coeff>> {
    let el = |g: &Gen| AlgebraElement::<A::Coeff>::from_gen(*g);
    let (ex, ey, ez) = (el(x), el(y), el(z));
    let t1 = bracket(&ex, &bracket(&ey, &ez, alg)?, alg)?;
    let t2 = bracket(&ey, &bracket(&ez, &ex, alg)?, alg)?;
    let t3 = bracket(&ez, &bracket(&ex, &ey, alg)?, alg)?;
    Ok(t1 + t2 + t3)
}

fn delta(i: i64, j: i64) -> bool {
    i == -j
}

/// The algebras with Gaussian-rational structure constants.
#[derive(Clone, Debug)]
pub enum AlgebraSpec {
    /// Basis `e_i` and central `c`: `[e_i,e_j] = (j-i)e_{i+j} + δ_{i,-j}(i³-i)/12 c`.
    Virasoro,
    /// Basis `e_i, z_i` and centrals `c1, c2, c3`.
    HeisenbergVirasoro,
    /// Basis `z_i`, `[z_i,z_j] = j δ_{i,-j} z_0`.
    Heisenberg,
    FiniteDim(Arc<FiniteDimAlgebra>),
}

impl AlgebraSpec {
    pub fn sl2() -> Self {
        AlgebraSpec::FiniteDim(Arc::new(FiniteDimAlgebra::sl(2)))
    }

    pub fn sl3() -> Self {
        AlgebraSpec::FiniteDim(Arc::new(FiniteDimAlgebra::sl(3)))
    }

    pub fn finite_dim(&self) -> Option<&FiniteDimAlgebra> {
        match self {
            AlgebraSpec::FiniteDim(a) => Some(a),
            _ => None,
        }
    }
}

fn int_degree(s: &Gen) -> Option<i64> {
    match s.degree {
        GradeValue::Int(n) => Some(n),
        GradeValue::Group(_) => None,
    }
}

impl LieAlgebra for AlgebraSpec {
    type Coeff = Scalar;

    fn family(&self) -> Family {
        match self {
            AlgebraSpec::Virasoro => Family::Virasoro,
            AlgebraSpec::HeisenbergVirasoro => Family::HeisenbergVirasoro,
            AlgebraSpec::Heisenberg => Family::Heisenberg,
            AlgebraSpec::FiniteDim(_) => Family::FiniteDim,
        }
    }

    fn contains(&self, s: &Gen) -> bool {
        match (self, s.kind) {
            (AlgebraSpec::FiniteDim(a), _) => a.index_of(s).is_some(),
            (_, SymbolKind::Fd(_)) => false,
            (AlgebraSpec::Virasoro, SymbolKind::E) => int_degree(s).is_some(),
            (AlgebraSpec::Virasoro, SymbolKind::Central(k)) => k == 0,
            (AlgebraSpec::HeisenbergVirasoro, SymbolKind::E | SymbolKind::Z) => {
                int_degree(s).is_some()
            }
            (AlgebraSpec::HeisenbergVirasoro, SymbolKind::Central(k)) => (1..=3).contains(&k),
            (AlgebraSpec::Heisenberg, SymbolKind::Z) => int_degree(s).is_some(),
            _ => false,
        }
    }

    fn bracket_symbols(&self, x: &Gen, y: &Gen) -> AlgebraElement<Scalar> {
        use SymbolKind::*;
        if let AlgebraSpec::FiniteDim(a) = self {
            return a.bracket_symbols(x, y);
        }
        let mut out = AlgebraElement::zero();
        let (Some(i), Some(j)) = (int_degree(x), int_degree(y)) else {
            return out;
        };
        let q = |n: i64, d: i64| Scalar::from(rational(n, d));
        match (self, x.kind, y.kind) {
            (AlgebraSpec::Virasoro, E, E) => {
                out.add_term(Gen::e(i + j), Scalar::from(j - i));
                if delta(i, j) {
                    out.add_term(Gen::central(0), q(i * i * i - i, 12));
                }
            }
            (AlgebraSpec::HeisenbergVirasoro, E, E) => {
                out.add_term(Gen::e(i + j), Scalar::from(j - i));
                if delta(i, j) {
                    out.add_term(Gen::central(1), q(j * j * j - j, 12));
                }
            }
            (AlgebraSpec::HeisenbergVirasoro, E, Z) => {
                out.add_term(Gen::z(i + j), Scalar::from(j));
                if delta(i, j) {
                    out.add_term(Gen::central(2), Scalar::new(int(0), int(-j * j)));
                }
            }
            (AlgebraSpec::HeisenbergVirasoro, Z, E) => {
                return -self.bracket_symbols(y, x);
            }
            (AlgebraSpec::HeisenbergVirasoro, Z, Z) => {
                if delta(i, j) {
                    out.add_term(Gen::central(3), Scalar::from(j));
                }
            }
            (AlgebraSpec::Heisenberg, Z, Z)
                if delta(i, j) => {
                    out.add_term(Gen::z(0), Scalar::from(j));
                }
            _ => {}
        }
        out
    }

    fn cartan_basis(&self) -> Vec<Gen> {
        match self {
            AlgebraSpec::Virasoro => vec![Gen::e(0), Gen::central(0)],
            AlgebraSpec::HeisenbergVirasoro => vec![
                Gen::e(0),
                Gen::z(0),
                Gen::central(1),
                Gen::central(2),
                Gen::central(3),
            ],
            AlgebraSpec::Heisenberg => vec![Gen::z(0)],
            AlgebraSpec::FiniteDim(a) => a.basis_in_part(TriangularPart::Cartan),
        }
    }

    fn lowering_candidates(&self, weight: GradeValue) -> Vec<Gen> {
        let depth = weight.as_int().map(|w| (-w).max(0)).unwrap_or(0);
        let mut out = match self {
            AlgebraSpec::Virasoro => (1..=depth).map(|k| Gen::e(-k)).collect(),
            AlgebraSpec::HeisenbergVirasoro => {
                (1..=depth).flat_map(|k| [Gen::e(-k), Gen::z(-k)]).collect()
            }
            AlgebraSpec::Heisenberg => (1..=depth).map(|k| Gen::z(-k)).collect(),
            AlgebraSpec::FiniteDim(a) => a
                .basis_in_part(TriangularPart::Minus)
                .into_iter()
                .filter(|g| g.degree >= weight)
                .collect::<Vec<_>>(),
        };
        out.sort();
        out
    }

    fn raising_generators(&self, bound: u32) -> Vec<Gen> {
        let n = bound as i64;
        match self {
            AlgebraSpec::Virasoro => (1..=n).map(Gen::e).collect(),
            AlgebraSpec::HeisenbergVirasoro => (1..=n).flat_map(|k| [Gen::e(k), Gen::z(k)]).collect(),
            AlgebraSpec::Heisenberg => (1..=n).map(Gen::z).collect(),
            AlgebraSpec::FiniteDim(a) => a.basis_in_part(TriangularPart::Plus),
        }
    }

    fn parse_symbol(&self, s: &str) -> Result<Gen> {
        let g = match self {
            AlgebraSpec::FiniteDim(a) => a.symbol_named(s.trim()).ok_or_else(|| {
                Error::SpecMismatch(format!("`{s}` is not a generator of {}", a.name()))
            })?,
            _ => parse_symbol_grammar(s)?,
        };
        ensure_member(self, &g)?;
        Ok(g)
    }

    fn omega(&self, s: &Gen) -> Gen {
        match self {
            AlgebraSpec::FiniteDim(a) => a.omega(s),
            _ => match s.kind {
                SymbolKind::E | SymbolKind::Z => s.with_degree(-s.degree),
                _ => *s,
            },
        }
    }
}

/// Higher rank Virasoro algebra `Vir_G` for a rank-2 group
/// `G = ℤ·g1 + ℤ·g2 ⊂ ℤ + ℤ√2`, with coefficients in ℚ(√2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherRankVirasoro {
    g1: QuadInt,
    g2: QuadInt,
    search_box: i64,
}

impl Default for HigherRankVirasoro {
    fn default() -> Self {
        Self::new(QuadInt::new(1, 0), QuadInt::new(0, 1)).expect("1 and √2 are independent")
    }
}

impl HigherRankVirasoro {
    pub const DEFAULT_BOX: i64 = 3;

    pub fn new(g1: QuadInt, g2: QuadInt) -> Result<Self> {
        if g1.a * g2.b - g1.b * g2.a == 0 {
            return Err(Error::Invalid(format!("generators {g1} and {g2} are not ℤ-independent")));
        }
        Ok(Self { g1, g2, search_box: Self::DEFAULT_BOX })
    }

    /// Restricts weight-space enumeration to `p·g1 + q·g2` with `|p|, |q| <= bound`.
    pub fn with_search_box(mut self, bound: i64) -> Self {
        self.search_box = bound;
        self
    }

    pub fn search_box(&self) -> i64 {
        self.search_box
    }

    pub fn generators(&self) -> (QuadInt, QuadInt) {
        (self.g1, self.g2)
    }

    /// Coordinates `(p, q)` of `x = p·g1 + q·g2`, if `x ∈ G`.
    pub fn coordinates(&self, x: QuadInt) -> Option<(i64, i64)> {
        let det = self.g1.a * self.g2.b - self.g1.b * self.g2.a;
        let pn = x.a * self.g2.b - x.b * self.g2.a;
        let qn = self.g1.a * x.b - self.g1.b * x.a;
        (pn % det == 0 && qn % det == 0).then(|| (pn / det, qn / det))
    }

    /// All nonzero group elements with coordinates in the box of radius `bound`.
    pub fn box_elements(&self, bound: i64) -> Vec<QuadInt> {
        let mut out = Vec::new();
        for p in -bound..=bound {
            for q in -bound..=bound {
                let x = self.g1.scale(p) + self.g2.scale(q);
                if !x.is_zero() {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }
}

impl LieAlgebra for HigherRankVirasoro {
    type Coeff = QuadScalar;

    fn family(&self) -> Family {
        Family::HigherRankVirasoro
    }

    fn contains(&self, s: &Gen) -> bool {
        match s.kind {
            SymbolKind::E => self.coordinates(s.degree.as_quad()).is_some(),
            SymbolKind::Central(k) => k == 0,
            _ => false,
        }
    }

    fn bracket_symbols(&self, x: &Gen, y: &Gen) -> AlgebraElement<QuadScalar> {
        let mut out = AlgebraElement::zero();
        if x.kind != SymbolKind::E || y.kind != SymbolKind::E {
            return out;
        }
        let (i, j) = (x.degree.as_quad(), y.degree.as_quad());
        out.add_term(Gen::eg(i + j), QuadScalar::from(j - i));
        if (i + j).is_zero() {
            let cube = i * i * i - i;
            let k = QuadScalar::from(cube) * QuadScalar::from(rational(1, 12));
            out.add_term(Gen::central(0), k);
        }
        out
    }

    fn cartan_basis(&self) -> Vec<Gen> {
        vec![Gen::eg(QuadInt::ZERO), Gen::central(0)]
    }

    fn lowering_candidates(&self, weight: GradeValue) -> Vec<Gen> {
        let w = weight.as_quad();
        self.box_elements(self.search_box)
            .into_iter()
            .filter(|x| crate::scalars::quad_sign(*x) < 0 && *x >= w)
            .map(Gen::eg)
            .collect()
    }

    fn raising_generators(&self, bound: u32) -> Vec<Gen> {
        self.box_elements(bound as i64)
            .into_iter()
            .filter(|x| crate::scalars::quad_sign(*x) > 0)
            .map(Gen::eg)
            .collect()
    }

    fn dense_grading(&self) -> bool {
        true
    }

    fn parse_symbol(&self, s: &str) -> Result<Gen> {
        let mut g = parse_symbol_grammar(s)?;
        if let (SymbolKind::E, GradeValue::Int(n)) = (g.kind, g.degree) {
            g.degree = GradeValue::Group(QuadInt::new(n, 0));
        }
        ensure_member(self, &g)?;
        Ok(g)
    }
}

/// Finite-dimensional Lie algebra given by an exact structure-constant
/// table on named basis vectors, graded by root height, together with a
/// filtration of the raising subalgebra by ideals of codimension one.
#[derive(Debug, Clone)]
pub struct FiniteDimAlgebra {
    name: String,
    basis: Vec<Gen>,
    table: Vec<Vec<AlgebraElement<Scalar>>>,
    omega: Vec<usize>,
    filtration: Filtration,
}

/// Chain `n_+ = n_0 ⊃ n_1 ⊃ ... ⊃ n_d = 0`; each step drops exactly one
/// basis vector, the designated complement root vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pub ideals: Vec<Vec<Gen>>,
}

impl Filtration {
    /// Builds the chain that drops the given raising vectors in order.
    pub fn dropping(order: &[Gen]) -> Self {
        let ideals = (0..=order.len()).map(|i| order[i..].to_vec()).collect();
        Self { ideals }
    }

    pub fn len(&self) -> usize {
        self.ideals.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The basis vector of `n_{step-1}` missing from `n_step` (1-based step).
    pub fn designated(&self, step: usize) -> Option<Gen> {
        let (big, small) = (self.ideals.get(step - 1)?, self.ideals.get(step)?);
        let missing: Vec<_> = big.iter().filter(|g| !small.contains(g)).collect();
        (missing.len() == 1).then(|| *missing[0])
    }

    /// Checks the chain against an algebra: starts at all raising basis
    /// vectors, nested with codimension one, every member an `h`-stable ideal
    /// of its predecessor, ends at zero.
    pub fn validate<A: LieAlgebra + ?Sized>(&self, alg: &A, plus: &[Gen]) -> Result<()> {
        let err = |m: String| Err(Error::InvalidFiltration(m));
        let Some(first) = self.ideals.first() else {
            return err("empty chain".into());
        };
        let mut sorted_first = first.clone();
        sorted_first.sort();
        let mut sorted_plus = plus.to_vec();
        sorted_plus.sort();
        if sorted_first != sorted_plus {
            return err("first member is not the whole raising subalgebra".into());
        }
        if !self.ideals.last().is_some_and(|l| l.is_empty()) {
            return err("chain does not end at 0".into());
        }
        let cartan = alg.cartan_basis();
        for step in 1..self.ideals.len() {
            let (big, small) = (&self.ideals[step - 1], &self.ideals[step]);
            if small.len() + 1 != big.len() || !small.iter().all(|g| big.contains(g)) {
                return err(format!("step {step} is not a codimension-one inclusion"));
            }
            for x in big.iter().chain(cartan.iter()) {
                for y in small {
                    let b = alg.bracket_symbols(x, y);
                    let outside = b.symbols().find(|s| !small.contains(s)).copied();
                    if let Some(bad) = outside {
                        return err(format!("[{x},{y}] has component {bad} outside n_{step}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One bracket entry `[x, y] = Σ c·z` by basis names.
pub type BracketEntry<'a> = (&'a str, &'a str, Vec<(&'a str, Scalar)>);

impl FiniteDimAlgebra {
    /// Builds and validates an algebra. Unlisted pairs bracket to zero and
    /// listed pairs are extended antisymmetrically; conflicting or
    /// non-antisymmetric entries, grading violations and Jacobi failures are
    /// rejected.
    pub fn new(
        name: &str,
        basis: &[(&'static str, i64)],
        entries: &[BracketEntry<'_>],
        omega_pairs: &[(&str, &str)],
        filtration_order: &[&str],
    ) -> Result<Self> {
        let basis: Vec<Gen> = basis.iter().map(|&(n, d)| Gen::fd(n, d)).collect();
        let n = basis.len();
        let idx = |s: &str| {
            basis
                .iter()
                .position(|g| matches!(g.kind, SymbolKind::Fd(m) if m == s))
                .ok_or_else(|| Error::Invalid(format!("unknown basis name `{s}`")))
        };
        let mut table: Vec<Vec<Option<AlgebraElement<Scalar>>>> = vec![vec![None; n]; n];
        for (x, y, value) in entries {
            let (i, j) = (idx(x)?, idx(y)?);
            let mut el = AlgebraElement::zero();
            for (z, c) in value {
                el.add_term(basis[idx(z)?], c.clone());
            }
            for (a, b, v) in [(i, j, el.clone()), (j, i, -el)] {
                match &table[a][b] {
                    Some(prev) if *prev != v => {
                        return Err(Error::Invalid(format!(
                            "bracket [{},{}] is not antisymmetric",
                            basis[a], basis[b]
                        )))
                    }
                    _ => table[a][b] = Some(v),
                }
            }
        }
        let table: Vec<Vec<_>> = table
            .into_iter()
            .map(|row| row.into_iter().map(Option::unwrap_or_default).collect())
            .collect();
        let mut omega: Vec<usize> = (0..n).collect();
        for (a, b) in omega_pairs {
            let (i, j) = (idx(a)?, idx(b)?);
            omega[i] = j;
            omega[j] = i;
        }
        let order = filtration_order.iter().map(|s| idx(s).map(|i| basis[i])).collect::<Result<Vec<_>>>()?;
        let alg = Self {
            name: name.to_string(),
            basis,
            table,
            omega,
            filtration: Filtration::dropping(&order),
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        for (i, x) in self.basis.iter().enumerate() {
            if !self.table[i][i].is_zero() {
                return Err(Error::Invalid(format!("[{x},{x}] is nonzero")));
            }
            for y in &self.basis {
                for s in self.bracket_symbols(x, y).symbols() {
                    if s.degree != x.degree + y.degree {
                        return Err(Error::Invalid(format!("[{x},{y}] breaks the grading at {s}")));
                    }
                }
                for z in &self.basis {
                    if !jacobi_probe(x, y, z, self)?.is_zero() {
                        return Err(Error::Invalid(format!("Jacobi fails on ({x},{y},{z})")));
                    }
                }
            }
        }
        self.filtration.validate(self, &self.basis_in_part(TriangularPart::Plus))
    }

    /// `sl_n` for `n ∈ {2, 3}` in the basis of matrix units `E_ij` (`i ≠ j`)
    /// and `h_k = E_kk - E_{k+1,k+1}`; sl2 uses the names `f, h, e`.
    pub fn sl(n: usize) -> Self {
        let names = sl_names(n);
        let mats: Vec<Vec<Vec<i64>>> = names.iter().map(|s| sl_matrix(n, s.1)).collect();
        let decompose = |m: &Vec<Vec<i64>>| -> Vec<(&'static str, Scalar)> {
            let mut out = Vec::new();
            for (name, shape) in &names {
                let c = match *shape {
                    SlShape::Unit(i, j) => m[i][j],
                    SlShape::Cartan(k) => (0..=k).map(|t| m[t][t]).sum(),
                };
                if c != 0 {
                    out.push((*name, Scalar::from(c)));
                }
            }
            out
        };
        let mut entries = Vec::new();
        for a in 0..names.len() {
            for b in a + 1..names.len() {
                let comm = mat_comm(&mats[a], &mats[b]);
                entries.push((names[a].0, names[b].0, decompose(&comm)));
            }
        }
        let basis: Vec<(&'static str, i64)> = names.iter().map(|(nm, sh)| (*nm, sh.height())).collect();
        let mut omega_pairs = Vec::new();
        for (nm, sh) in &names {
            if let SlShape::Unit(i, j) = sh {
                if i < j {
                    let partner = names.iter().find(|(_, s)| *s == SlShape::Unit(*j, *i)).unwrap().0;
                    omega_pairs.push((*nm, partner));
                }
            }
        }
        let mut plus: Vec<_> = names.iter().filter(|(_, s)| s.height() > 0).collect();
        plus.sort_by_key(|(nm, s)| (s.height(), *nm));
        let order: Vec<&str> = plus.iter().map(|(nm, _)| *nm).collect();
        let name = format!("sl{n}");
        let entries: Vec<BracketEntry<'_>> = entries;
        Self::new(&name, &basis, &entries, &omega_pairs, &order).expect("sl_n tables are valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &[Gen] {
        &self.basis
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn index_of(&self, s: &Gen) -> Option<usize> {
        self.basis.iter().position(|g| g == s)
    }

    pub fn symbol_named(&self, name: &str) -> Option<Gen> {
        self.basis.iter().copied().find(|g| matches!(g.kind, SymbolKind::Fd(m) if m == name))
    }

    pub fn basis_in_part(&self, part: TriangularPart) -> Vec<Gen> {
        let mut v: Vec<Gen> = self.basis.iter().copied().filter(|g| g.part() == part).collect();
        v.sort();
        v
    }

    pub fn bracket_symbols(&self, x: &Gen, y: &Gen) -> AlgebraElement<Scalar> {
        match (self.index_of(x), self.index_of(y)) {
            (Some(i), Some(j)) => self.table[i][j].clone(),
            _ => AlgebraElement::zero(),
        }
    }

    pub fn omega(&self, s: &Gen) -> Gen {
        self.index_of(s).map(|i| self.basis[self.omega[i]]).unwrap_or(*s)
    }
}

impl LieAlgebra for FiniteDimAlgebra {
    type Coeff = Scalar;

    fn family(&self) -> Family {
        Family::FiniteDim
    }

    fn contains(&self, s: &Gen) -> bool {
        self.index_of(s).is_some()
    }

    fn bracket_symbols(&self, x: &Gen, y: &Gen) -> AlgebraElement<Scalar> {
        FiniteDimAlgebra::bracket_symbols(self, x, y)
    }

    fn cartan_basis(&self) -> Vec<Gen> {
        self.basis_in_part(TriangularPart::Cartan)
    }

    fn lowering_candidates(&self, weight: GradeValue) -> Vec<Gen> {
        let mut v: Vec<_> = self
            .basis_in_part(TriangularPart::Minus)
            .into_iter()
            .filter(|g| g.degree >= weight)
            .collect();
        v.sort();
        v
    }

    fn raising_generators(&self, _bound: u32) -> Vec<Gen> {
        self.basis_in_part(TriangularPart::Plus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SlShape {
    Unit(usize, usize),
    Cartan(usize),
}

impl SlShape {
    fn height(self) -> i64 {
        match self {
            SlShape::Unit(i, j) => j as i64 - i as i64,
            SlShape::Cartan(_) => 0,
        }
    }
}

fn sl_names(n: usize) -> Vec<(&'static str, SlShape)> {
    use SlShape::*;
    match n {
        2 => vec![("f", Unit(1, 0)), ("h", Cartan(0)), ("e", Unit(0, 1))],
        3 => vec![
            ("f13", Unit(2, 0)),
            ("f12", Unit(1, 0)),
            ("f23", Unit(2, 1)),
            ("h1", Cartan(0)),
            ("h2", Cartan(1)),
            ("e12", Unit(0, 1)),
            ("e23", Unit(1, 2)),
            ("e13", Unit(0, 2)),
        ],
        _ => panic!("only sl2 and sl3 are built in"),
    }
}

fn sl_matrix(n: usize, shape: SlShape) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; n]; n];
    match shape {
        SlShape::Unit(i, j) => m[i][j] = 1,
        SlShape::Cartan(k) => {
            m[k][k] = 1;
            m[k + 1][k + 1] = -1;
        }
    }
    m
}

/// Defining matrices of the built-in `sl_n`, by basis name.
pub fn sl_defining_matrices(n: usize) -> Vec<(&'static str, Vec<Vec<i64>>)> {
    sl_names(n).into_iter().map(|(nm, sh)| (nm, sl_matrix(n, sh))).collect()
}

fn mat_comm(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += a[i][k] * b[k][j] - b[i][k] * a[k][j];
            }
        }
    }
    out
}
