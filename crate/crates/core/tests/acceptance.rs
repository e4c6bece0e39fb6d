//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hwrep::algorithms::*;
use hwrep::checks::{module_axiom_holds, random_rational, random_scalar, random_sequence};
use hwrep::enveloping::{pbw_basis_level, PBWMonomial, Strategy, Straightener, Word};
use hwrep::liealg::{
    bracket, jacobi_probe, AlgebraElement, AlgebraSpec, Gen, GradeValue, HigherRankVirasoro, LieAlgebra,
};
use hwrep::modules::*;
use hwrep::scalars::{rational, QuadInt, QuadScalar, Rational, Scalar};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x00AC_CE97 + salt)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn sym(r: &mut ChaCha8Rng, alg: &AlgebraSpec, span: i64) -> Gen {
    let d = r.gen_range(-span..=span);
    match alg {
        AlgebraSpec::Virasoro => if r.gen_bool(0.05) { Gen::central(0) } else { Gen::e(d) },
        AlgebraSpec::HeisenbergVirasoro => match r.gen_range(0..20) {
            0 => Gen::central(r.gen_range(1..=3)),
            k if k % 2 == 0 => Gen::e(d),
            _ => Gen::z(d),
        },
        AlgebraSpec::Heisenberg => Gen::z(d),
        AlgebraSpec::FiniteDim(a) => *a.basis().choose(r).unwrap(),
    }
}

fn gsym(r: &mut ChaCha8Rng, span: i64) -> Gen {
    if r.gen_bool(0.05) {
        Gen::central(0)
    } else {
        Gen::eg(QuadInt::new(r.gen_range(-span..=span), r.gen_range(-span..=span)))
    }
}

fn bracket_ok<A: LieAlgebra>(alg: &A, x: Gen, y: Gen, z: Gen) -> bool {
    let (ex, ey) = (AlgebraElement::from_gen(x), AlgebraElement::from_gen(y));
    let anti = bracket(&ex, &ey, alg).unwrap() + bracket(&ey, &ex, alg).unwrap();
    anti.is_zero() && jacobi_probe(&x, &y, &z, alg).unwrap().is_zero()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut r = rng(1);
    let mut total = 0;
    for alg in [AlgebraSpec::Virasoro, AlgebraSpec::HeisenbergVirasoro, AlgebraSpec::Heisenberg, AlgebraSpec::sl2(), AlgebraSpec::sl3()] {
        for _ in 0..1000 {
            let (x, y, z) = (sym(&mut r, &alg, 10), sym(&mut r, &alg, 10), sym(&mut r, &alg, 10));
            ensure(bracket_ok(&alg, x, y, z), || format!("{} fails on {x}, {y}, {z}", alg.family()))?;
            total += 1;
        }
    }
    let vg = HigherRankVirasoro::default();
    for _ in 0..1000 {
        let (x, y, z) = (gsym(&mut r, 10), gsym(&mut r, 10), gsym(&mut r, 10));
        ensure(bracket_ok(&vg, x, y, z), || format!("Vir_G fails on {x}, {y}, {z}"))?;
        total += 1;
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(10), || format!("took {el:?}"))?;
    Ok(format!("{total} triples over 6 algebras in {el:.2?}"))
}

fn verma(alg: AlgebraSpec, r: &mut ChaCha8Rng) -> VermaModule<AlgebraSpec> {
    let pairs: Vec<_> = alg.cartan_basis().into_iter().map(|g| (g, random_scalar(r))).collect();
    let hw = HighestWeight::new(&alg, pairs).unwrap();
    verma_new(alg, hw).unwrap()
}

fn random_verma_vector(r: &mut ChaCha8Rng, m: &VermaModule<AlgebraSpec>, max_level: u32) -> ModuleVector<PBWMonomial, Scalar> {
    let mut v = ModuleVector::zero();
    while v.is_zero() {
        for _ in 0..r.gen_range(1..=3) {
            let basis = pbw_basis_level(m.algebra(), r.gen_range(0..=max_level)).unwrap();
            let mono = basis.choose(r).unwrap().clone();
            let c = random_scalar(r);
            v.add_term(mono, c);
        }
    }
    v
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut summary = Vec::new();
    for alg in [AlgebraSpec::Virasoro, AlgebraSpec::HeisenbergVirasoro] {
        let ms: Vec<_> = (0..4).map(|_| verma(alg.clone(), &mut r)).collect();
        for k in 0..500 {
            let m = &ms[k % ms.len()];
            let (x, y) = (sym(&mut r, &alg, 3), sym(&mut r, &alg, 3));
            let v = random_verma_vector(&mut r, m, 3);
            ensure(module_axiom_holds(m, &x, &y, &v).unwrap(), || format!("Verma {} on {x}, {y}, {v}", alg.family()))?;
        }
        summary.push(format!("Verma/{}", alg.family()));
    }
    for tail in 1..=3 {
        let m = heisenberg_module_new(SequenceIndex::constant(tail).unwrap()).unwrap();
        for _ in 0..500 {
            let (x, y) = (sym(&mut r, &AlgebraSpec::Heisenberg, 5), sym(&mut r, &AlgebraSpec::Heisenberg, 5));
            let mut v = ModuleVector::zero();
            while v.is_zero() {
                let idx = random_sequence(&mut r, tail, 5, 4);
                let c = random_scalar(&mut r);
                v.add_term(idx, c);
            }
            ensure(module_axiom_holds(&m, &x, &y, &v).unwrap(), || format!("V tail {tail} on {x}, {y}, {v}"))?;
        }
        summary.push(format!("V(tail {tail})"));
    }
    let k0 = k0_new(HigherRankVirasoro::default());
    let region = k0_region(&k0, 2, 2);
    for _ in 0..500 {
        let (x, y) = (gsym(&mut r, 2), gsym(&mut r, 2));
        let mut v = ModuleVector::zero();
        while v.is_zero() {
            let c = QuadScalar::new(random_rational(&mut r, 5, 3), random_rational(&mut r, 3, 2));
            v.add_term(region.choose(&mut r).unwrap().clone(), c);
        }
        let ok = module_axiom_holds(&k0, &x, &y, &v).map_err(|e| format!("K(0) on {x}, {y}: {e}"))?;
        ensure(ok, || format!("K(0) on {x}, {y}, {v}"))?;
    }
    summary.push("K(0)".into());
    let fds: Vec<FdModule> = (0..6).map(|n| FdModule::sl2_irrep(n).unwrap()).collect();
    for k in 0..500 {
        let m = &fds[k % fds.len()];
        let alg = m.algebra().clone();
        let (x, y) = (sym(&mut r, &alg, 0), sym(&mut r, &alg, 0));
        let v: ModuleVector<_, Scalar> = m.basis().iter().map(|b| (b.clone(), random_scalar(&mut r))).collect();
        ensure(module_axiom_holds(m, &x, &y, &v).unwrap(), || format!("sl2 V({}) on {x}, {y}", m.dim() - 1))?;
    }
    summary.push("sl2 FD".into());
    Ok(format!("500 triples each for {}", summary.join(", ")))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut checks = 0;
    for _ in 0..50 {
        let tail = r.gen_range(1..=3);
        let eps = random_sequence(&mut r, tail, 12, 6);
        let m = heisenberg_module_new(SequenceIndex::constant(tail).unwrap()).unwrap();
        let v = ModuleVector::<_, Scalar>::basis(eps.clone());
        for i in 1..=12usize {
            let rep = nilpotency_index(&m, &Gen::z(i as i64), &v, DEFAULT_CAP).unwrap();
            ensure(rep.index == NilpotencyIndex::Index(eps.get(i) as usize), || {
                format!("z{i} on {eps}: {} (expected {})", rep.index, eps.get(i))
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} indices equal ε_i, no cap exceeded"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let m = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
    let mut steps = 0;
    for _ in 0..100 {
        let n = r.gen_range(1..=6);
        let mut u = ModuleVector::zero();
        while u.len() < n {
            let idx = random_sequence(&mut r, 2, 4, 4);
            let mut c = random_scalar(&mut r);
            if c.is_zero() {
                c = Scalar::one();
            }
            u.add_term(idx, c);
        }
        let cert = simplicity_witness(&m, &u).map_err(|e| format!("{u}: {e}"))?;
        let mut counts = vec![u.len()];
        counts.extend(cert.steps.iter().map(|s| s.count));
        ensure(counts.windows(2).all(|w| w[1] < w[0]) && counts.last() == Some(&1), || format!("counts {counts:?} for {u}"))?;
        replay_simplicity(&m, &cert).map_err(|e| format!("replay of {u}: {e}"))?;
        steps += cert.steps.len();
    }
    Ok(format!("100 certificates replayed ({steps} steps total)"))
}

fn vir(l0: Rational, c: Rational) -> VermaModule<AlgebraSpec> {
    let alg = AlgebraSpec::Virasoro;
    let hw = HighestWeight::new(&alg, [(Gen::e(0), Scalar::from(l0)), (Gen::central(0), Scalar::from(c))]).unwrap();
    verma_new(alg, hw).unwrap()
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let e12 = [Gen::e(1), Gen::e(2)];
    for _ in 0..50 {
        let (l0, c) = (random_rational(&mut r, 30, 11), random_rational(&mut r, 30, 11));
        let m = vir(l0.clone(), c.clone());
        let v = random_verma_vector(&mut r, &m, 4);
        let res = extract_singular_virasoro(&m, &v, DEFAULT_PROBE, DEFAULT_CAP).map_err(|e| format!("M({l0},{c}) from {v}: {e}"))?;
        verify_singular(&m, &res.vector, &e12).map_err(|e| format!("M({l0},{c}): {e}"))?;
    }
    let em1 = ModuleVector::basis(PBWMonomial::new(vec![Gen::e(-1)]).unwrap());
    for _ in 0..5 {
        let c = random_rational(&mut r, 30, 11);
        let res = extract_singular_virasoro(&vir(Rational::zero(), c.clone()), &em1, DEFAULT_PROBE, DEFAULT_CAP).unwrap();
        ensure(res.vector == em1, || format!("M(0,{c}) from e-1 gave {}", res.vector))?;
    }
    let hv_gens = [Gen::e(1), Gen::e(2), Gen::z(1)];
    for _ in 0..50 {
        let m = verma(AlgebraSpec::HeisenbergVirasoro, &mut r);
        let v = random_verma_vector(&mut r, &m, 4);
        let res = extract_singular_hv(&m, &v, DEFAULT_PROBE, DEFAULT_CAP).map_err(|e| format!("HV from {v}: {e}"))?;
        verify_singular(&m, &res.vector, &hv_gens).map_err(|e| e.to_string())?;
    }
    for dim in 1..=9 {
        let m = FdModule::sl2_irrep(dim - 1).unwrap();
        let filt = m.finite_dim().filtration().clone();
        let e = m.finite_dim().symbol_named("e").unwrap();
        for b in m.basis() {
            let start = ModuleVector::basis(b.clone());
            let res = extract_singular_fd(&m, &filt, &start).unwrap();
            ensure(!res.vector.is_zero() && act(&m, &e, &res.vector).unwrap().is_zero(), || format!("V({}) from {b}", dim - 1))?;
        }
    }
    Ok("50 Virasoro, 5 M(0,γ) fixed points, 50 HV, sl2 dims 1..9 all verified".into())
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    for _ in 0..4 {
        let (l0, c) = (random_rational(&mut r, 30, 11), random_rational(&mut r, 30, 11));
        let m = vir(l0.clone(), c.clone());
        for level in 0..=4 {
            let g = shapovalov_gram(&m, level).unwrap();
            ensure(g.is_symmetric(), || format!("level {level} at M({l0},{c}) not symmetric"))?;
        }
        let g1 = shapovalov_gram(&m, 1).unwrap();
        let want = Scalar::from(l0.clone() * rational(-2, 1));
        let brute = gram_entry_by_straightening(&m, &g1.basis[0], &g1.basis[0]).unwrap();
        ensure(g1.entries == vec![vec![want.clone()]] && brute == want, || format!("level 1 at λ0={l0}: {:?} / {brute}", g1.entries))?;
    }
    let big = 1_000_000_007;
    for _ in 0..20 {
        let (l0, c) = (random_rational(&mut r, big, big), random_rational(&mut r, big, big));
        let m = vir(l0.clone(), c.clone());
        for level in 1..=4 {
            let d = gram_determinant(&shapovalov_gram(&m, level).unwrap()).unwrap();
            ensure(!d.is_zero(), || format!("det at level {level} vanishes for M({l0},{c})"))?;
        }
    }
    let d = gram_determinant(&shapovalov_gram(&vir(Rational::zero(), rational(7, 2)), 1).unwrap()).unwrap();
    ensure(d.is_zero(), || format!("det at λ0 = 0 is {d}"))?;
    Ok("symmetric at levels 0-4, level 1 = [-2λ0] by both evaluators, 80 generic dets nonzero, λ0=0 det 0".into())
}

fn criterion_7() -> Outcome {
    let k0 = k0_new(HigherRankVirasoro::default());
    let region = k0_region(&k0, 3, 2);
    let probe = probe_generators(k0.algebra(), hwrep::checks::K0_PROBE_BOX);
    let found = highest_weight_probe(&k0, &region, &probe).map_err(|e| e.to_string())?;
    ensure(found.is_none(), || format!("K(0) kernel vector {}", found.unwrap()))?;

    let v = heisenberg_module_new(SequenceIndex::constant(2).unwrap()).unwrap();
    let vreg = heisenberg_region(&v, 3, 4).unwrap();
    let found = highest_weight_probe(&v, &vreg, &probe_generators(v.algebra(), hwrep::checks::V_PROBE)).unwrap();
    ensure(found.is_none(), || format!("V kernel vector {}", found.unwrap()))?;

    let list = small_support_explorer(&k0, 2, &rational(1, 5)).unwrap();
    let target = GradeValue::Group(QuadInt::new(-3, 2));
    ensure(list.iter().any(|w| w.weight == target), || "-(3-2√2) missing".into())?;
    Ok(format!(
        "K(0): {} monomials, {} probes, no kernel; V: {} vectors, no kernel; {} small weights below 1/5",
        region.len(),
        probe.len(),
        vreg.len(),
        list.len()
    ))
}

fn partitions_brute(n: usize, max: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=n.min(max)).map(|k| partitions_brute(n - k, k)).sum()
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    for alg in [AlgebraSpec::Virasoro, AlgebraSpec::HeisenbergVirasoro] {
        for _ in 0..200 {
            let len = r.gen_range(0..=6);
            let w = Word((0..len).map(|_| sym(&mut r, &alg, 4)).collect());
            let a = Straightener::new(&alg, Strategy::Leftmost).straighten(&w).unwrap();
            let b = Straightener::new(&alg, Strategy::Rightmost).without_memo().straighten(&w).unwrap();
            ensure(a == b, || format!("strategies disagree on {w}"))?;
        }
    }
    let p: Vec<u64> = (1..=6).map(|n| partitions_brute(n, n)).collect();
    ensure(p == [1, 2, 3, 5, 7, 11], || format!("oracle {p:?}"))?;
    for n in 0..=12 {
        let got = pbw_basis_level(&AlgebraSpec::Virasoro, n as u32).unwrap().len() as u64;
        ensure(got == partitions_brute(n, n), || format!("level {n}: {got}"))?;
    }
    Ok("400 words agree; pbw counts = p(n) for n <= 12".into())
}

fn bin(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_hwrep")).args(args).output().expect("run hwrep");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_9() -> Outcome {
    let runs: &[&[&str]] = &[
        &["gram", "--algebra", "hv", "--hw", "e0=1/2", "z0=1", "c1=2", "c2=1/3", "c3=5", "--level", "3", "--format", "json"],
        &["virg", "--depth", "2", "--threshold", "1/3", "--format", "csv"],
        &["check", "--suite", "simplicity", "--seed", "77"],
    ];
    for a in runs {
        let (x, y) = (bin(a), bin(a));
        ensure(x == y && x.0 == 0, || format!("nondeterministic or failing: {a:?}"))?;
    }

    let alg = AlgebraSpec::Virasoro;
    let m = vir(rational(5, 3), rational(-1, 2));
    let g = shapovalov_gram(&m, 3).unwrap();
    ensure(GramMatrix::from_json(&alg, &g.to_json()).unwrap() == g, || "gram round trip".into())?;
    let mut v = ModuleVector::basis(PBWMonomial::new(vec![Gen::e(-2), Gen::e(-1)]).unwrap());
    v.add_term(PBWMonomial::one(), Scalar::new(rational(-3, 4), rational(2, 1)));
    ensure(parse_vector(&m, &v.to_string()).unwrap() == v, || "vector text round trip".into())?;
    ensure(parse_vector(&m, &vector_to_json(&v).to_string()).unwrap() == v, || "vector json round trip".into())?;
    let s = Scalar::new(rational(-7, 9), rational(1, 3));
    ensure(s.to_string().parse::<Scalar>().unwrap() == s, || "scalar round trip".into())?;

    let (code, out) = bin(&["check", "--suite", "fixtures"]);
    ensure(code == 0, || String::from_utf8_lossy(&out).into_owned())?;

    let t = Instant::now();
    let (code, out) = bin(&["check", "--suite", "all"]);
    let el = t.elapsed();
    ensure(code == 0, || String::from_utf8_lossy(&out).into_owned())?;
    ensure(el < Duration::from_secs(300), || format!("check --suite all took {el:?}"))?;
    Ok(format!("determinism, round trips, {} fixtures, check --suite all in {el:.1?}", hwrep::fixtures::CORPUS.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 bracket antisymmetry and Jacobi", criterion_1),
        ("2 module axiom", criterion_2),
        ("3 local nilpotency on V", criterion_3),
        ("4 simplicity certificates", criterion_4),
        ("5 singular vector extraction", criterion_5),
        ("6 contravariant form", criterion_6),
        ("7 counterexample falsification", criterion_7),
        ("8 straightening confluence and PBW counts", criterion_8),
        ("9 CLI determinism, fixtures, check all", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{:.1?}]", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why}) [{:.1?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
