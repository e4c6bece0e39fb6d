//! Named randomized property suites. Every suite is deterministic for a
//! given seed.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    extract_singular_fd, extract_singular_hv, extract_singular_virasoro, gram_determinant,
    gram_entry_by_straightening, heisenberg_region, highest_weight_probe, k0_region,
    nilpotency_index, probe_generators, replay_simplicity, shapovalov_gram, simplicity_witness,
    small_support_explorer, verify_singular, NilpotencyIndex, DEFAULT_CAP, DEFAULT_PROBE,
};
use crate::enveloping::{pbw_basis_level, PBWMonomial, Strategy, Straightener, Word};
use crate::error::Result;
use crate::liealg::{
    bracket, jacobi_probe, AlgebraElement, AlgebraSpec, Gen, GradeValue, HigherRankVirasoro,
    LieAlgebra,
};
use crate::modules::{
    act, act_element, heisenberg_module_new, k0_new, verma_new, FdModule, HighestWeight, Module,
    ModuleVector, SequenceIndex, VectorOf, VermaModule,
};
use crate::scalars::{rational, Coefficient, QuadInt, QuadScalar, Rational, Scalar};

pub const DEFAULT_SEED: u64 = 20_240_229;

/// Outcome of one suite: case count and a description of each failure.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} cases, {} failures)", self.name, self.cases, self.failures.len())?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n  {msg}")?;
        }
        Ok(())
    }
}

struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self { cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn check_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(e) => self.check(false, || format!("{}: {e}", what())),
        }
    }
}

type SuiteFn = fn(u64) -> Tally;

const SUITES: &[(&str, SuiteFn)] = &[
    ("brackets", brackets),
    ("module-axiom", module_axiom),
    ("nilpotency", nilpotency),
    ("simplicity", simplicity),
    ("extraction", extraction),
    ("shapovalov", shapovalov),
    ("falsification", falsification),
    ("straightening", straightening),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    let (name, f) = SUITES.iter().find(|(n, _)| *n == name)?;
    let t = Instant::now();
    let tally = f(seed);
    Some(SuiteReport { name, cases: tally.cases, failures: tally.failures, elapsed: t.elapsed() })
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn random_rational(r: &mut impl Rng, num: i64, den: i64) -> Rational {
    rational(r.gen_range(-num..=num), r.gen_range(1..=den))
}

pub fn random_scalar(r: &mut impl Rng) -> Scalar {
    let re = random_rational(r, 9, 6);
    let im = if r.gen_bool(0.3) { random_rational(r, 5, 4) } else { Rational::zero() };
    Scalar::new(re, im)
}

fn nonzero_scalar(r: &mut impl Rng) -> Scalar {
    loop {
        let s = random_scalar(r);
        if !s.is_zero() {
            return s;
        }
    }
}

fn random_symbol(r: &mut impl Rng, alg: &AlgebraSpec, span: i64) -> Gen {
    let d = r.gen_range(-span..=span);
    match alg {
        AlgebraSpec::Virasoro => {
            if r.gen_bool(0.05) { Gen::central(0) } else { Gen::e(d) }
        }
        AlgebraSpec::HeisenbergVirasoro => match r.gen_range(0..20) {
            0 => Gen::central(r.gen_range(1..=3)),
            k if k % 2 == 0 => Gen::e(d),
            _ => Gen::z(d),
        },
        AlgebraSpec::Heisenberg => Gen::z(d),
        AlgebraSpec::FiniteDim(a) => *a.basis().choose(r).expect("nonempty basis"),
    }
}

fn random_group_symbol(r: &mut impl Rng, span: i64) -> Gen {
    if r.gen_bool(0.05) {
        return Gen::central(0);
    }
    Gen::eg(QuadInt::new(r.gen_range(-span..=span), r.gen_range(-span..=span)))
}

fn brackets(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 1);
    let algebras = [
        AlgebraSpec::Virasoro,
        AlgebraSpec::HeisenbergVirasoro,
        AlgebraSpec::Heisenberg,
        AlgebraSpec::sl2(),
        AlgebraSpec::sl3(),
    ];
    for alg in &algebras {
        for _ in 0..1000 {
            let (x, y, z) = (random_symbol(&mut r, alg, 10), random_symbol(&mut r, alg, 10), random_symbol(&mut r, alg, 10));
            t.check_result(antisymmetric_and_jacobi(alg, &x, &y, &z), || format!("{} on {x}, {y}, {z}", alg.family()));
        }
    }
    let vg = HigherRankVirasoro::default();
    for _ in 0..1000 {
        let (x, y, z) = (random_group_symbol(&mut r, 10), random_group_symbol(&mut r, 10), random_group_symbol(&mut r, 10));
        t.check_result(antisymmetric_and_jacobi(&vg, &x, &y, &z), || format!("{} on {x}, {y}, {z}", vg.family()));
    }
    t
}

fn antisymmetric_and_jacobi<A: LieAlgebra>(alg: &A, x: &Gen, y: &Gen, z: &Gen) -> Result<bool> {
    let (ex, ey) = (AlgebraElement::from_gen(*x), AlgebraElement::from_gen(*y));
    let anti = bracket(&ex, &ey, alg)? + bracket(&ey, &ex, alg)?;
    Ok(anti.is_zero() && jacobi_probe(x, y, z, alg)?.is_zero())
}

/// `X·(Y·v) - Y·(X·v) = [X,Y]·v`.
pub fn module_axiom_holds<M: Module + ?Sized>(m: &M, x: &Gen, y: &Gen, v: &VectorOf<M>) -> Result<bool> {
    let lhs = act(m, x, &act(m, y, v)?)?.sub(&act(m, y, &act(m, x, v)?)?);
    let b = bracket(&AlgebraElement::from_gen(*x), &AlgebraElement::from_gen(*y), m.algebra())?;
    Ok(lhs == act_element(m, &b, v)?)
}

fn random_verma_vector<A: LieAlgebra<Coeff = F>, F: Coefficient>(
    r: &mut impl Rng,
    m: &VermaModule<A>,
    max_level: u32,
    terms: usize,
    coeff: impl Fn(&mut ChaCha8Rng) -> F,
    rr: &mut ChaCha8Rng,
) -> ModuleVector<PBWMonomial, F> {
    let mut v = ModuleVector::zero();
    while v.is_zero() {
        for _ in 0..r.gen_range(1..=terms) {
            let level = r.gen_range(0..=max_level);
            let basis = pbw_basis_level(m.algebra(), level).expect("integer grading");
            let mono = basis.choose(r).expect("nonempty level").clone();
            v.add_term(mono, coeff(rr));
        }
    }
    v
}

fn random_hw(r: &mut impl Rng, alg: &AlgebraSpec) -> HighestWeight<Scalar> {
    let pairs: Vec<(Gen, Scalar)> = alg.cartan_basis().into_iter().map(|g| (g, random_scalar(r))).collect();
    HighestWeight::new(alg, pairs).expect("Cartan symbols")
}

fn module_axiom(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 2);
    let mut rc = rng(seed, 20);

    for alg in [AlgebraSpec::Virasoro, AlgebraSpec::HeisenbergVirasoro] {
        let modules: Vec<_> = (0..5).map(|_| verma_new(alg.clone(), random_hw(&mut r, &alg)).unwrap()).collect();
        for k in 0..500 {
            let m = &modules[k % modules.len()];
            let (x, y) = (random_symbol(&mut r, &alg, 3), random_symbol(&mut r, &alg, 3));
            let v = random_verma_vector(&mut r, m, 3, 3, random_scalar, &mut rc);
            t.check_result(module_axiom_holds(m, &x, &y, &v), || format!("Verma {} on {x}, {y}, {v}", alg.family()));
        }
    }

    for tail in 1..=3u32 {
        let m = heisenberg_module_new(SequenceIndex::constant(tail).unwrap()).unwrap();
        for _ in 0..500 {
            let (x, y) = (random_symbol(&mut r, &AlgebraSpec::Heisenberg, 5), random_symbol(&mut r, &AlgebraSpec::Heisenberg, 5));
            let mut v = ModuleVector::zero();
            for _ in 0..r.gen_range(1..=3) {
                v.add_term(random_sequence(&mut r, tail, 5, 4), nonzero_scalar(&mut rc));
            }
            t.check_result(module_axiom_holds(&m, &x, &y, &v), || format!("V tail {tail} on {x}, {y}, {v}"));
        }
    }

    let k0 = k0_new(HigherRankVirasoro::default());
    let region = k0_region(&k0, 2, 2);
    for _ in 0..500 {
        let (x, y) = (random_group_symbol(&mut r, 2), random_group_symbol(&mut r, 2));
        let mut v = ModuleVector::zero();
        while v.is_zero() {
            for _ in 0..r.gen_range(1..=3) {
                let q = QuadScalar::new(random_rational(&mut rc, 5, 3), random_rational(&mut rc, 3, 2));
                v.add_term(region.choose(&mut r).unwrap().clone(), q);
            }
        }
        t.check_result(module_axiom_holds(&k0, &x, &y, &v), || format!("K(0) on {x}, {y}, {v}"));
    }

    let mut fds: Vec<FdModule> = (0..5).map(|n| FdModule::sl2_irrep(n).unwrap()).collect();
    fds.push(FdModule::adjoint(AlgebraSpec::sl2()).unwrap());
    fds.push(FdModule::natural(AlgebraSpec::sl2()).unwrap());
    for k in 0..500 {
        let m = &fds[k % fds.len()];
        let alg = m.algebra().clone();
        let (x, y) = (random_symbol(&mut r, &alg, 0), random_symbol(&mut r, &alg, 0));
        let v: ModuleVector<_, Scalar> = m.basis().iter().map(|b| (b.clone(), random_scalar(&mut rc))).collect();
        t.check_result(module_axiom_holds(m, &x, &y, &v), || format!("sl2 module dim {} on {x}, {y}, {v}", m.dim()));
    }
    t
}

pub fn random_sequence(r: &mut impl Rng, tail: u32, max_len: usize, max_entry: u32) -> SequenceIndex {
    let len = r.gen_range(0..=max_len);
    let head = (0..len).map(|_| r.gen_range(1..=max_entry)).collect();
    SequenceIndex::new(head, tail).expect("positive entries")
}

fn nilpotency(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 3);
    for _ in 0..50 {
        let tail = r.gen_range(1..=3);
        let eps = random_sequence(&mut r, tail, 12, 6);
        let m = heisenberg_module_new(SequenceIndex::constant(tail).unwrap()).unwrap();
        let v = ModuleVector::<_, Scalar>::basis(eps.clone());
        for i in 1..=12usize {
            let got = nilpotency_index(&m, &Gen::z(i as i64), &v, DEFAULT_CAP).map(|rep| rep.index);
            let want = NilpotencyIndex::Index(eps.get(i) as usize);
            t.check(got.as_ref() == Ok(&want), || format!("z{i} on {eps}: got {got:?}, want {want}"));
        }
    }
    t
}

fn simplicity(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 4);
    let m = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
    for _ in 0..100 {
        let mut u = ModuleVector::zero();
        let n = r.gen_range(1..=6);
        while u.len() < n {
            u.add_term(random_sequence(&mut r, 2, 4, 4), nonzero_scalar(&mut r));
        }
        let ok = simplicity_witness(&m, &u).and_then(|c| {
            let mut counts = vec![u.len()];
            counts.extend(c.steps.iter().map(|s| s.count));
            let decreasing = counts.windows(2).all(|w| w[1] < w[0]) && *counts.last().unwrap() == 1;
            replay_simplicity(&m, &c)?;
            Ok(decreasing)
        });
        t.check_result(ok, || format!("witness for {u}"));
    }
    t
}

fn virasoro_module(l0: Rational, c: Rational) -> VermaModule<AlgebraSpec> {
    let alg = AlgebraSpec::Virasoro;
    let hw = HighestWeight::new(&alg, [(Gen::e(0), l0.into()), (Gen::central(0), c.into())]).unwrap();
    verma_new(alg, hw).unwrap()
}

fn extraction(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 5);
    let mut rc = rng(seed, 50);
    let vir_probe = [Gen::e(1), Gen::e(2)];
    for _ in 0..50 {
        let (l0, c) = (random_rational(&mut r, 20, 9), random_rational(&mut r, 20, 9));
        let m = virasoro_module(l0.clone(), c.clone());
        let v = random_verma_vector(&mut r, &m, 4, 3, random_scalar, &mut rc);
        let ok = extract_singular_virasoro(&m, &v, DEFAULT_PROBE, DEFAULT_CAP)
            .and_then(|res| verify_singular(&m, &res.vector, &vir_probe).map(|_| true));
        t.check_result(ok, || format!("Virasoro M({l0}, {c}) from {v}"));
    }
    for _ in 0..5 {
        let c = random_rational(&mut r, 20, 9);
        let m = virasoro_module(Rational::zero(), c.clone());
        let u = ModuleVector::basis(PBWMonomial::new(vec![Gen::e(-1)]).unwrap());
        let ok = extract_singular_virasoro(&m, &u, DEFAULT_PROBE, DEFAULT_CAP).map(|res| res.vector == u);
        t.check_result(ok, || format!("M(0, {c}) from e-1 should return e-1"));
    }
    let hv = AlgebraSpec::HeisenbergVirasoro;
    let hv_probe = [Gen::e(1), Gen::e(2), Gen::z(1)];
    for _ in 0..50 {
        let m = verma_new(hv.clone(), random_hw(&mut r, &hv)).unwrap();
        let v = random_verma_vector(&mut r, &m, 3, 3, random_scalar, &mut rc);
        let ok = extract_singular_hv(&m, &v, DEFAULT_PROBE, DEFAULT_CAP)
            .and_then(|res| verify_singular(&m, &res.vector, &hv_probe).map(|_| true));
        t.check_result(ok, || format!("HV {} from {v}", m.highest_weight()));
    }
    for dim in 1..=9usize {
        let m = FdModule::sl2_irrep(dim - 1).unwrap();
        let filt = m.finite_dim().filtration().clone();
        let e = m.finite_dim().symbol_named("e").unwrap();
        for _ in 0..5 {
            let mut v = ModuleVector::zero();
            while v.is_zero() {
                v = m.basis().iter().filter(|_| r.gen_bool(0.5)).map(|b| (b.clone(), random_scalar(&mut rc))).collect();
            }
            let ok = extract_singular_fd(&m, &filt, &v)
                .and_then(|res| Ok(!res.vector.is_zero() && act(&m, &e, &res.vector)?.is_zero()));
            t.check_result(ok, || format!("sl2 V({}) from {v}", dim - 1));
        }
    }
    t
}

fn shapovalov(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 6);
    for _ in 0..3 {
        let (l0, c) = (random_rational(&mut r, 20, 9), random_rational(&mut r, 20, 9));
        let m = virasoro_module(l0.clone(), c.clone());
        for level in 0..=4 {
            let sym = shapovalov_gram(&m, level).map(|g| g.is_symmetric());
            t.check_result(sym, || format!("Virasoro Gram at level {level}, M({l0}, {c}) not symmetric"));
        }
        let g1 = shapovalov_gram(&m, 1);
        let want = Scalar::from(l0.clone() * rational(-2, 1));
        let ok = g1.and_then(|g| {
            let brute = gram_entry_by_straightening(&m, &g.basis[0], &g.basis[0])?;
            Ok(g.entries == vec![vec![want.clone()]] && brute == want)
        });
        t.check_result(ok, || format!("level-1 Gram of M({l0}, {c}) is not [-2λ0]"));
        for level in 2..=3 {
            let ok = shapovalov_gram(&m, level).and_then(|g| {
                for (i, a) in g.basis.iter().enumerate() {
                    for (j, b) in g.basis.iter().enumerate() {
                        if gram_entry_by_straightening(&m, a, b)? != g.entries[i][j] {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            });
            t.check_result(ok, || format!("Gram level {level} disagrees with straightening at M({l0}, {c})"));
        }
    }
    for _ in 0..20 {
        let big = 1_000_000_007i64;
        let (l0, c) = (random_rational(&mut r, big, big), random_rational(&mut r, big, big));
        let m = virasoro_module(l0.clone(), c.clone());
        for level in 1..=4 {
            let det = shapovalov_gram(&m, level).and_then(|g| gram_determinant(&g));
            t.check_result(det.map(|d| !d.is_zero()), || format!("det level {level} vanishes at M({l0}, {c})"));
        }
    }
    let z = virasoro_module(Rational::zero(), random_rational(&mut r, 20, 9));
    let det = shapovalov_gram(&z, 1).and_then(|g| gram_determinant(&g));
    t.check_result(det.map(|d| d.is_zero()), || "level-1 determinant at λ0 = 0 is nonzero".into());

    let hv = AlgebraSpec::HeisenbergVirasoro;
    for _ in 0..3 {
        let mut pairs: Vec<(Gen, Scalar)> =
            hv.cartan_basis().into_iter().map(|g| (g, Scalar::from(random_rational(&mut r, 9, 5)))).collect();
        let m = verma_new(hv.clone(), HighestWeight::new(&hv, pairs.clone()).unwrap()).unwrap();
        for level in 0..=3 {
            let ok = shapovalov_gram(&m, level).map(|g| g.is_hermitian());
            t.check_result(ok, || format!("HV Gram level {level} at {} is not Hermitian", m.highest_weight()));
        }
        for p in &mut pairs {
            if p.0 == Gen::central(2) {
                p.1 = Scalar::zero();
            }
        }
        let m = verma_new(hv.clone(), HighestWeight::new(&hv, pairs).unwrap()).unwrap();
        for level in 0..=3 {
            let ok = shapovalov_gram(&m, level).map(|g| g.is_symmetric());
            t.check_result(ok, || format!("HV Gram level {level} at {} is not symmetric", m.highest_weight()));
        }
    }
    t
}

/// Probe bound for `K(0)`: the box of radius 7 contains `-7 + 5√2 ≈ 0.07`,
/// below every positive degree in the radius-3 region.
pub const K0_PROBE_BOX: u32 = 7;
/// Probe bound for `V`: one past the region horizon of 4.
pub const V_PROBE: u32 = 6;

fn falsification(_seed: u64) -> Tally {
    let mut t = Tally::new();
    let k0 = k0_new(HigherRankVirasoro::default());
    let region = k0_region(&k0, 3, 2);
    let probe = probe_generators(k0.algebra(), K0_PROBE_BOX);
    let found = highest_weight_probe(&k0, &region, &probe);
    t.check_result(found.as_ref().map(Option::is_none).map_err(Clone::clone), || {
        format!("K(0) depth-2 region has a probe-singular vector: {found:?}")
    });

    let v = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
    let found = heisenberg_region(&v, 3, 4).and_then(|reg| highest_weight_probe(&v, &reg, &probe_generators(v.algebra(), V_PROBE)));
    t.check_result(found.as_ref().map(Option::is_none).map_err(Clone::clone), || {
        format!("V region has a probe-singular vector: {found:?}")
    });

    let small = GradeValue::Group(QuadInt::new(-3, 2));
    let list = small_support_explorer(&k0, 2, &rational(1, 5));
    t.check_result(list.as_ref().map(|l| !l.is_empty() && l.iter().any(|w| w.weight == small)).map_err(Clone::clone), || {
        "small-support list at threshold 1/5 misses -(3-2√2)".into()
    });
    t
}

/// Number of partitions of `n`, by the standard recurrence over part sizes.
pub fn partition_count(n: usize) -> u64 {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for k in part..=n {
            p[k] += p[k - part];
        }
    }
    p[n]
}

/// Number of pairs of partitions with sizes summing to `n`.
pub fn bipartition_count(n: usize) -> u64 {
    (0..=n).map(|k| partition_count(k) * partition_count(n - k)).sum()
}

fn straightening(seed: u64) -> Tally {
    let mut t = Tally::new();
    let mut r = rng(seed, 8);
    for alg in [AlgebraSpec::Virasoro, AlgebraSpec::HeisenbergVirasoro] {
        for _ in 0..200 {
            let len = r.gen_range(0..=6);
            let w = Word((0..len).map(|_| random_symbol(&mut r, &alg, 4)).collect());
            let a = Straightener::new(&alg, Strategy::Leftmost).straighten(&w);
            let b = Straightener::new(&alg, Strategy::Rightmost).without_memo().straighten(&w);
            t.check(a.is_ok() && a == b, || format!("{} strategies disagree on {w}", alg.family()));
        }
    }
    for n in 0..=12usize {
        let got = pbw_basis_level(&AlgebraSpec::Virasoro, n as u32).map(|b| b.len() as u64);
        t.check(got == Ok(partition_count(n)), || format!("Virasoro level {n}: {got:?} vs p({n})"));
    }
    for n in 0..=8usize {
        let got = pbw_basis_level(&AlgebraSpec::HeisenbergVirasoro, n as u32).map(|b| b.len() as u64);
        t.check(got == Ok(bipartition_count(n)), || format!("HV level {n}: {got:?} vs bipartitions"));
    }
    t
}
