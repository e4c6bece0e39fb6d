//! Golden-output regression corpus: `fixtures/<command>/<name>.golden`.
//! The first line of each file is `# args: <json array>`, the rest is the
//! exact standard output of the CLI for those arguments.

use std::fs;
use std::path::{Path, PathBuf};

use crate::cli;
use crate::error::{Error, Result};

const HEADER: &str = "# args: ";

/// The corpus: file stem under `<command>/` and the arguments after the
/// program name.
pub const CORPUS: &[(&str, &[&str])] = &[
    ("bracket/virasoro-e2-em2", &["bracket", "e2", "e-2", "--algebra", "virasoro"]),
    ("bracket/hv-e1-zm1", &["bracket", "e1", "z-1", "--algebra", "hv", "--format", "json"]),
    ("bracket/virg-small", &["bracket", "e(3,-2)", "e(-3,2)", "--algebra", "virg"]),
    ("bracket/sl3-e12-e23", &["bracket", "e12", "e23", "--algebra", "sl3", "--format", "csv"]),
    ("gram/virasoro-level-1-zero", &["gram", "--algebra", "virasoro", "--hw", "e0=0", "c=0", "--level", "1", "--format", "csv"]),
    ("gram/gram-level-2", &["gram", "--algebra", "virasoro", "--hw", "e0=1/3", "c=1/2", "--level", "2", "--format", "json"]),
    ("gram/virasoro-level-3", &["gram", "--algebra", "virasoro", "--hw", "e0=-2/5", "c=7", "--level", "3"]),
    ("gram/hv-level-2", &["gram", "--algebra", "hv", "--hw", "e0=1/2", "z0=1", "c1=2", "c2=1/3", "c3=5", "--level", "2"]),
    ("singvec/virasoro-em1-zero", &["singvec", "--hw", "e0=0", "c=3/2", "--start", "e-1", "--format", "json"]),
    ("singvec/virasoro-level-3", &["singvec", "--hw", "e0=5/4", "c=1/3", "--start", "e-2.e-1 + 2*e-3"]),
    ("singvec/hv-zm1", &["singvec", "--algebra", "hv", "--hw", "e0=2/3", "z0=1/2", "c1=3", "c2=1/5", "c3=-7/4", "--start", "z-1"]),
    ("singvec/sl3-adjoint", &["singvec", "--algebra", "sl3", "--start", "f13 + h1", "--format", "json"]),
    ("singvec/sl2-irrep-4", &["singvec", "--algebra", "sl2", "--module", "irrep:4", "--start", "v4", "--format", "csv"]),
    ("nilpotency/heis-z2", &["nilpotency", "--algebra", "heisenberg", "--gen", "z2", "--start", "(2*,...)", "--format", "json"]),
    ("nilpotency/virasoro-e1", &["nilpotency", "--hw", "e0=7/3", "c=1", "--gen", "e1", "--start", "e-1.e-1"]),
    ("nilpotency/k0-small", &["nilpotency", "--algebra", "virg", "--module", "k0", "--gen", "e(1,0)", "--start", "e(-1,0).e(-1,0)"]),
    ("heis/two-terms", &["heis", "--witness", "(1,2*,...) + (2*,...)"]),
    ("heis/three-terms", &["heis", "--witness", "(1,2*,...) + (3,2*,...) + (2,1,2*,...)", "--format", "json"]),
    ("virg/depth2-fifth", &["virg", "--depth", "2", "--threshold", "1/5"]),
    ("virg/depth1-one", &["virg", "--depth", "1", "--threshold", "1", "--format", "json"]),
];

pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub args: Vec<String>,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Pass,
    /// First differing line (1-based, counting output lines only).
    Diverged { line: usize, expected: String, actual: String },
}

/// Runs the CLI in-process and returns (exit code, stdout).
pub fn render(args: &[String]) -> (i32, String) {
    let mut argv = vec!["hwrep".to_string()];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(&argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

pub fn load_fixture(path: &Path) -> Result<Fixture> {
    let text = fs::read_to_string(path).map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let json = first
        .strip_prefix(HEADER)
        .ok_or_else(|| Error::Fixture(format!("{}: missing `{}` header", path.display(), HEADER.trim())))?;
    let args: Vec<String> =
        serde_json::from_str(json).map_err(|e| Error::Fixture(format!("{}: corrupt header: {e}", path.display())))?;
    Ok(Fixture { args, expected: rest.to_string() })
}

pub fn write_fixture(path: &Path, args: &[String]) -> Result<()> {
    let (code, out) = render(args);
    if code != 0 {
        return Err(Error::Fixture(format!("{}: command exited with {code}", path.display())));
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Fixture(e.to_string()))?;
    }
    let header = serde_json::to_string(args).expect("strings serialize");
    fs::write(path, format!("{HEADER}{header}\n{out}")).map_err(|e| Error::Fixture(e.to_string()))
}

/// Byte-exact comparison; on mismatch reports the first differing line.
pub fn compare_output(expected: &str, actual: &str) -> Comparison {
    if expected == actual {
        return Comparison::Pass;
    }
    let (mut e, mut a) = (expected.split_inclusive('\n'), actual.split_inclusive('\n'));
    let mut line = 1;
    loop {
        match (e.next(), a.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                return Comparison::Diverged {
                    line,
                    expected: x.unwrap_or("<end of output>").to_string(),
                    actual: y.unwrap_or("<end of output>").to_string(),
                }
            }
        }
    }
}

pub fn compare_fixture(path: &Path) -> Result<Comparison> {
    let fx = load_fixture(path)?;
    let (_, out) = render(&fx.args);
    Ok(compare_output(&fx.expected, &out))
}

pub fn expected_files(dir: &Path) -> Vec<PathBuf> {
    CORPUS.iter().map(|(stem, _)| dir.join(format!("{stem}.golden"))).collect()
}

/// Compares every corpus fixture under `dir`. A directory holding no golden
/// files is an error naming the files it should contain.
pub fn check_fixture_dir(dir: &Path) -> Result<Vec<(PathBuf, Comparison)>> {
    let expected = expected_files(dir);
    if !expected.iter().any(|p| p.exists()) {
        let names: Vec<String> = expected.iter().map(|p| p.display().to_string()).collect();
        return Err(Error::Fixture(format!("no fixtures in {}; expected:\n  {}", dir.display(), names.join("\n  "))));
    }
    expected.into_iter().map(|p| compare_fixture(&p).map(|c| (p, c))).collect()
}

pub fn regenerate_all(dir: &Path) -> Result<usize> {
    for (stem, args) in CORPUS {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        write_fixture(&dir.join(format!("{stem}.golden")), &args)?;
    }
    Ok(CORPUS.len())
}

pub(crate) fn fixture_report(dir: &Path) -> (String, bool) {
    match check_fixture_dir(dir) {
        Err(e) => (format!("FAIL fixtures ({e})"), false),
        Ok(results) => {
            let bad: Vec<String> = results
                .iter()
                .filter_map(|(p, c)| match c {
                    Comparison::Pass => None,
                    Comparison::Diverged { line, expected, actual } => Some(format!(
                        "  {} line {line}: expected {:?}, got {:?}",
                        p.display(),
                        expected.trim_end(),
                        actual.trim_end()
                    )),
                })
                .collect();
            let status = if bad.is_empty() { "PASS" } else { "FAIL" };
            let mut s = format!("{status} fixtures ({} cases, {} failures)", results.len(), bad.len());
            for b in &bad {
                s.push('\n');
                s.push_str(b);
            }
            (s, bad.is_empty())
        }
    }
}

/// Every corpus command rendered twice gives byte-identical output.
pub(crate) fn determinism_report() -> (String, bool) {
    let mut bad = Vec::new();
    for (stem, args) in CORPUS {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        if render(&args) != render(&args) {
            bad.push(*stem);
        }
    }
    let status = if bad.is_empty() { "PASS" } else { "FAIL" };
    (format!("{status} determinism ({} cases, {} failures) {}", CORPUS.len(), bad.len(), bad.join(" ")).trim_end().to_string(), bad.is_empty())
}
