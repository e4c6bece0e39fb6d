//! Command-line interface. [`run`] is the in-process entry point used by the
//! binary, the fixture corpus and the tests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algorithms::{
    extract_singular_fd, extract_singular_hv, extract_singular_virasoro, gram_determinant,
    nilpotency_index, shapovalov_gram, simplicity_witness, small_support_explorer, GramMatrix,
    NilpotencyIndex, DEFAULT_CAP, DEFAULT_PROBE,
};
use crate::checks::{run_suite, suite_names, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::liealg::{bracket, AlgebraElement, AlgebraSpec, HigherRankVirasoro, LieAlgebra};
use crate::modules::{
    heisenberg_module_new, k0_new, parse_vector, verma_new, vector_to_json, CoeffOf, FdModule,
    HighestWeight, Module, VermaModule,
};
use crate::scalars::{parse_rational, Coefficient};

#[derive(Parser, Debug)]
#[command(name = "hwrep", version, about = "Exact highest-weight computations for Virasoro-type algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// key=value file with default flag values; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AlgebraTag {
    Virasoro,
    #[value(alias = "heisenberg-virasoro")]
    Hv,
    Heisenberg,
    #[value(alias = "vir-g")]
    Virg,
    Sl2,
    Sl3,
}

impl AlgebraTag {
    fn spec(self) -> Option<AlgebraSpec> {
        Some(match self {
            AlgebraTag::Virasoro => AlgebraSpec::Virasoro,
            AlgebraTag::Hv => AlgebraSpec::HeisenbergVirasoro,
            AlgebraTag::Heisenberg => AlgebraSpec::Heisenberg,
            AlgebraTag::Sl2 => AlgebraSpec::sl2(),
            AlgebraTag::Sl3 => AlgebraSpec::sl3(),
            AlgebraTag::Virg => return None,
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bracket of two generator symbols.
    Bracket {
        x: String,
        y: String,
        #[arg(long, value_enum, default_value_t = AlgebraTag::Virasoro)]
        algebra: AlgebraTag,
    },
    /// Contravariant Gram matrix of a Verma module at one level.
    Gram {
        #[arg(long, value_enum, default_value_t = AlgebraTag::Virasoro)]
        algebra: AlgebraTag,
        /// Highest-weight values, e.g. `e0=7/3 c=1/2`.
        #[arg(long, num_args = 1..)]
        hw: Vec<String>,
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
    /// Extract a vector annihilated by the raising generators.
    Singvec {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = DEFAULT_PROBE, value_parser = clap::value_parser!(u32).range(2..))]
        probe: u32,
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
        cap: usize,
    },
    /// Nilpotency index of a generator on a vector.
    Nilpotency {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long = "gen")]
        generator: String,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = parse_cap)]
        cap: usize,
    },
    /// Simplicity certificate for a vector of the Heisenberg module.
    Heis {
        #[arg(long, default_value = "(2*,...)")]
        tail: String,
        #[arg(long, allow_hyphen_values = true)]
        witness: String,
    },
    /// Small negative weights of K(0) over the rank-two group.
    Virg {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long)]
        threshold: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        search_box: Option<u32>,
    },
    /// Run a named property suite (or `all`).
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Golden fixture directory for the `fixtures` suite.
        #[arg(long)]
        fixtures_dir: Option<PathBuf>,
        /// Rewrite the golden fixtures instead of comparing.
        #[arg(long)]
        regen: bool,
    },
}

#[derive(Args, Debug)]
struct ModuleArgs {
    #[arg(long, value_enum, default_value_t = AlgebraTag::Virasoro)]
    algebra: AlgebraTag,
    #[arg(long, num_args = 1..)]
    hw: Vec<String>,
    /// verma | k0 | adjoint | natural | irrep:N
    #[arg(long)]
    module: Option<String>,
    /// Tail pattern of the Heisenberg module.
    #[arg(long, default_value = "(2*,...)")]
    tail: String,
}

fn parse_cap(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("cap must be an integer >= 1".into()),
    }
}

const COMMANDS: &[&str] = &["bracket", "gram", "singvec", "nilpotency", "heis", "virg", "check"];

/// Runs the CLI on `argv` (program name first). Returns the exit code:
/// 0 on success, 1 on computation failures, 2 on flag errors.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parse(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Splices `--key value` pairs from the config file right after the
/// subcommand name, skipping keys already given on the command line.
fn merge_config(argv: &[String]) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else {
        return Ok(argv.to_vec());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("config {path}: {e}")))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config {path}:{}: expected key=value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        let flag = format!("--{k}");
        if k == "config" || argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        extra.push(format!("--{k}"));
        if k == "hw" {
            extra.extend(v.split_whitespace().map(String::from));
        } else if k != "regen" || v != "true" {
            extra.push(v.to_string());
        }
    }
    let pos = argv.iter().position(|a| COMMANDS.contains(&a.as_str())).map_or(argv.len(), |p| p + 1);
    let mut merged = argv[..pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[pos..]);
    Ok(merged)
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    let f = cli.format;
    match &cli.command {
        Command::Bracket { x, y, algebra } => match algebra.spec() {
            Some(alg) => Ok((render_bracket(&alg, x, y, f)?, 0)),
            None => Ok((render_bracket(&HigherRankVirasoro::default(), x, y, f)?, 0)),
        },
        Command::Gram { algebra, hw, level } => {
            let alg = algebra.spec().ok_or_else(|| Error::SpecMismatch("gram needs virasoro or hv".into()))?;
            let hw = HighestWeight::parse(&alg, hw)?;
            let m = verma_new(alg, hw)?;
            Ok((render_gram(&shapovalov_gram(&m, *level)?, f)?, 0))
        }
        Command::Singvec { module, start, probe, cap } => Ok((singvec(module, start, *probe, *cap, f)?, 0)),
        Command::Nilpotency { module, generator, start, cap } => nilpotency(module, generator, start, *cap, f),
        Command::Heis { tail, witness } => {
            let m = heisenberg_module_new(tail.parse()?)?;
            let u = parse_vector(&m, witness)?;
            let cert = simplicity_witness(&m, &u)?;
            let text = match f {
                Format::Json => pretty(&cert.to_json()),
                Format::Csv => {
                    let mut s = String::from("position,power,count\n");
                    for st in &cert.steps {
                        let _ = writeln!(s, "{},{},{}", st.position, st.power, st.count);
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for st in &cert.steps {
                        let _ = writeln!(s, "apply z{}^{} -> {} terms", st.position, st.power, st.count);
                    }
                    let _ = writeln!(s, "terminal {}", cert.terminal);
                    s
                }
            };
            Ok((text, 0))
        }
        Command::Virg { depth, threshold, search_box } => {
            let mut alg = HigherRankVirasoro::default();
            if let Some(b) = search_box {
                alg = alg.with_search_box(*b as i64);
            }
            let k0 = k0_new(alg);
            let list = small_support_explorer(&k0, *depth as usize, &parse_rational(threshold)?)?;
            let text = match f {
                Format::Json => pretty(&Value::Array(
                    list.iter()
                        .map(|w| json!({ "weight": w.weight.to_string(), "witness": w.witness.to_string() }))
                        .collect(),
                )),
                Format::Csv => {
                    let mut s = String::from("weight,witness\n");
                    for w in &list {
                        let _ = writeln!(s, "\"{}\",{}", w.weight, w.witness);
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for w in &list {
                        let _ = writeln!(s, "{} ~ {:.6}  {}", w.weight, w.weight.as_quad().approx(), w.witness);
                    }
                    s
                }
            };
            Ok((text, 0))
        }
        Command::Check { suite, fixtures_dir, regen } => check(suite, fixtures_dir.as_ref(), *regen, cli.seed),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn render_bracket<A: LieAlgebra>(alg: &A, x: &str, y: &str, f: Format) -> Result<String> {
    let (gx, gy) = (alg.parse_symbol(x)?, alg.parse_symbol(y)?);
    let b = bracket(&AlgebraElement::from_gen(gx), &AlgebraElement::from_gen(gy), alg)?;
    Ok(match f {
        Format::Text => format!("{b}\n"),
        Format::Json => {
            let terms: serde_json::Map<String, Value> =
                b.iter().map(|(g, c)| (g.to_string(), Value::String(c.to_string()))).collect();
            pretty(&json!({ "x": gx.to_string(), "y": gy.to_string(), "bracket": terms }))
        }
        Format::Csv => {
            let mut s = String::from("symbol,coefficient\n");
            for (g, c) in b.iter() {
                let _ = writeln!(s, "{g},{c}");
            }
            s
        }
    })
}

fn render_gram<F: Coefficient>(g: &GramMatrix<F>, f: Format) -> Result<String> {
    let det = gram_determinant(g)?;
    Ok(match f {
        Format::Csv => g.to_csv(),
        Format::Json => {
            let mut v = g.to_json();
            v["determinant"] = Value::String(det.to_string());
            pretty(&v)
        }
        Format::Text => format!("{}determinant {det}\n", g.to_text()),
    })
}

fn render_vector<M: Module + ?Sized>(v: &crate::modules::VectorOf<M>, f: Format) -> String {
    match f {
        Format::Text => format!("{v}\n"),
        Format::Json => pretty(&vector_to_json(v)),
        Format::Csv => {
            let mut s = String::from("index,coefficient\n");
            for (k, c) in v {
                let _ = writeln!(s, "\"{k}\",{c}");
            }
            s
        }
    }
}

enum Built {
    Verma(VermaModule<AlgebraSpec>),
    VermaG(VermaModule<HigherRankVirasoro>),
    K0(crate::modules::K0Module),
    Heis(crate::modules::HeisenbergModule),
    Fd(FdModule),
}

fn build(args: &ModuleArgs) -> Result<Built> {
    let kind = args.module.as_deref();
    match (args.algebra, kind) {
        (AlgebraTag::Virasoro | AlgebraTag::Hv, None | Some("verma")) => {
            let alg = args.algebra.spec().expect("integer algebra");
            let hw = HighestWeight::parse(&alg, &args.hw)?;
            Ok(Built::Verma(verma_new(alg, hw)?))
        }
        (AlgebraTag::Virg, None | Some("verma")) => {
            let alg = HigherRankVirasoro::default();
            let hw = HighestWeight::parse(&alg, &args.hw)?;
            Ok(Built::VermaG(verma_new(alg, hw)?))
        }
        (AlgebraTag::Virg, Some("k0")) => Ok(Built::K0(k0_new(HigherRankVirasoro::default()))),
        (AlgebraTag::Heisenberg, None | Some("heis")) => Ok(Built::Heis(heisenberg_module_new(args.tail.parse()?)?)),
        (AlgebraTag::Sl2 | AlgebraTag::Sl3, _) => {
            let alg = args.algebra.spec().expect("finite-dimensional algebra");
            let m = match kind.unwrap_or("adjoint") {
                "adjoint" => FdModule::adjoint(alg)?,
                "natural" => FdModule::natural(alg)?,
                other => match other.strip_prefix("irrep:") {
                    Some(n) if args.algebra == AlgebraTag::Sl2 => {
                        FdModule::sl2_irrep(n.parse().map_err(|_| Error::Parse(format!("bad irrep size `{n}`")))?)?
                    }
                    _ => return Err(Error::Parse(format!("unknown module `{other}` for {:?}", args.algebra))),
                },
            };
            Ok(Built::Fd(m))
        }
        (a, Some(k)) => Err(Error::Parse(format!("unknown module `{k}` for {a:?}"))),
    }
}

fn singvec(args: &ModuleArgs, start: &str, probe: u32, cap: usize, f: Format) -> Result<String> {
    fn emit<M: Module>(
        m: &M,
        r: Result<crate::algorithms::SingularVectorResult<M::Index, CoeffOf<M>>>,
        f: Format,
    ) -> Result<String> {
        let r = r?;
        let _ = m;
        Ok(match f {
            Format::Json => pretty(&r.to_json()),
            _ => render_vector::<M>(&r.vector, f),
        })
    }
    match build(args)? {
        Built::Verma(m) => {
            let v = parse_vector(&m, start)?;
            let r = if args.algebra == AlgebraTag::Hv {
                extract_singular_hv(&m, &v, probe, cap)
            } else {
                extract_singular_virasoro(&m, &v, probe, cap)
            };
            emit(&m, r, f)
        }
        Built::Heis(m) => {
            let v = parse_vector(&m, start)?;
            emit(&m, extract_singular_virasoro(&m, &v, probe, cap), f)
        }
        Built::Fd(m) => {
            let v = parse_vector(&m, start)?;
            let filt = m.finite_dim().filtration().clone();
            emit(&m, extract_singular_fd(&m, &filt, &v), f)
        }
        Built::VermaG(_) | Built::K0(_) => {
            Err(Error::SpecMismatch("no extraction procedure for the rank-two group algebra".into()))
        }
    }
}

fn nilpotency(args: &ModuleArgs, generator: &str, start: &str, cap: usize, f: Format) -> Result<(String, i32)> {
    fn go<M: Module>(m: &M, generator: &str, start: &str, cap: usize, f: Format) -> Result<(String, i32)> {
        let s = m.algebra().parse_symbol(generator)?;
        let v = parse_vector(m, start)?;
        let rep = nilpotency_index(m, &s, &v, cap)?;
        let text = match f {
            Format::Json => pretty(&rep.to_json()),
            Format::Csv => {
                let mut t = String::from("power,terms\n");
                for (k, n) in rep.trail.iter().enumerate() {
                    let _ = writeln!(t, "{k},{n}");
                }
                t
            }
            Format::Text => format!("index {}\ntrail {:?}\n", rep.index, rep.trail),
        };
        let code = match rep.index {
            NilpotencyIndex::Index(_) => 0,
            NilpotencyIndex::Exceeded(_) => 1,
        };
        Ok((text, code))
    }
    match build(args)? {
        Built::Verma(m) => go(&m, generator, start, cap, f),
        Built::VermaG(m) => go(&m, generator, start, cap, f),
        Built::K0(m) => go(&m, generator, start, cap, f),
        Built::Heis(m) => go(&m, generator, start, cap, f),
        Built::Fd(m) => go(&m, generator, start, cap, f),
    }
}

/// Names accepted by `check --suite`.
pub fn check_suite_names() -> Vec<&'static str> {
    let mut names = suite_names();
    names.extend(["determinism", "fixtures"]);
    names
}

fn check(suite: &str, dir: Option<&PathBuf>, regen: bool, seed: u64) -> Result<(String, i32)> {
    let dir = dir.cloned().unwrap_or_else(fixtures::default_dir);
    if regen {
        let written = fixtures::regenerate_all(&dir)?;
        return Ok((format!("wrote {written} fixtures to {}\n", dir.display()), 0));
    }
    let names: Vec<&str> = if suite == "all" {
        check_suite_names()
    } else if check_suite_names().contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Parse(format!("unknown suite `{suite}`; known: all, {}", check_suite_names().join(", "))));
    };
    let mut text = String::new();
    let mut ok = true;
    for name in names {
        let (line, passed) = match name {
            "determinism" => fixtures::determinism_report(),
            "fixtures" => fixtures::fixture_report(&dir),
            _ => {
                let r = run_suite(name, seed).expect("listed suite");
                (r.to_string(), r.passed())
            }
        };
        ok &= passed;
        let _ = writeln!(text, "{line}");
    }
    Ok((text, if ok { 0 } else { 1 }))
}
