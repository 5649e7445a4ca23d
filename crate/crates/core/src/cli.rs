//! Command-line front end. Reports go to the `out` writer, diagnostics to `err`.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{build_j3o, diagonal_algebra, matrix_algebra_2x2, parse_algebra_file, real_line, symmetric_2x2, AlgebraSpec, IdentityKind};
use crate::derivations::{
    associative_oracle_suite, full_sectors, inner_derivation_span, solve_derivations, universal_oneform_span, AssociativeOracleReport,
    InnerDerivationReport, OneFormReport,
};
use crate::distance::{connes_distance, DistanceQuery, DEFAULT_SEED, DEFAULT_STARTS, DISTANCE_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::KernelCertificate;
use crate::modules::{
    build_split_bimodule_over, check_associative_rep, classify_bimodule_homs, classify_homs_brute_force, classify_homs_factorized, hom_suite,
    symmetrized_control, AssociativeRepReport, HomClassification, HomSuiteReport, ModuleAction, SectorDims, SymmetrizedControlReport,
};
use crate::report::{Report, Timings, SCHEMA};
use crate::triple::{
    build_point_rep, check_grading, check_inner_symmetries, check_leibniz_for_dirac, check_triple, dirac_as_hom,
    solve_dirac_constraints, DiracHomReport, DiracLeibnizReport, DiracSolution, GradingReport, InnerSymmetryReport,
};
use crate::Rational;

pub const THREADS_ENV: &str = "JORDAN_SPECTRAL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "jordan-spectral", version, about = "Exact spectral geometry over the exceptional Jordan algebra")]
struct Cli {
    /// Worker threads; falls back to JORDAN_SPECTRAL_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the report JSON schema and exit.
    #[arg(long)]
    schema: bool,
    /// Log phase timings to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep an algebraic identity over basis tuples.
    VerifyAlgebra(VerifyAlgebra),
    /// Kernel of the Leibniz system for derivations into a split bimodule.
    SolveDerivations(SolveDerivations),
    /// Span of the commutators [π(eⁱ), π(eʲ)].
    InnerDerivations(Points),
    /// Bimodule generated by the universal derivation.
    OneformSpan(Points),
    /// Dirac operators compatible with the n-point representation.
    SolveDirac(Points),
    /// Every compatibility check for D = κ e₀⊗e₀*.
    CheckTriple(Kappa),
    /// Homomorphisms between split bimodules.
    ClassifyHoms(ClassifyHoms),
    /// Connes distance between the two pure states.
    Distance(DistanceArgs),
    /// Associative oracles and the symmetrized-action control.
    OracleSuite,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Builtin {
    J3o,
    J2,
    R2,
    M2,
    Real,
}

impl Builtin {
    fn build(self) -> AlgebraSpec {
        match self {
            Builtin::J3o => build_j3o(),
            Builtin::J2 => symmetric_2x2(),
            Builtin::R2 => diagonal_algebra(2),
            Builtin::M2 => matrix_algebra_2x2(),
            Builtin::Real => real_line(),
        }
    }
}

#[derive(Debug, Args)]
struct VerifyAlgebra {
    #[arg(long, value_enum, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<Builtin>,
    /// Algebra definition in the JSON structure-constant format.
    #[arg(long)]
    file: Option<std::path::PathBuf>,
    /// jordan, associative, commutative, power_assoc_low, or associative_rep
    /// (the regular action as an associative representation).
    #[arg(long, default_value = "jordan")]
    identity: String,
}

#[derive(Debug, Args)]
struct SolveDerivations {
    #[arg(long)]
    points: usize,
    /// Sector multiplicities as `i-j=m` pairs, comma separated; all sectors once by default.
    #[arg(long)]
    sectors: Option<String>,
    /// Also solve the whole module as one system.
    #[arg(long)]
    monolithic: bool,
}

#[derive(Debug, Args)]
struct Points {
    #[arg(long, default_value_t = 1)]
    points: usize,
}

#[derive(Debug, Args)]
struct Kappa {
    /// Rational, e.g. `2` or `3/2`.
    #[arg(long, value_parser = parse_rational)]
    kappa: Rational,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Route {
    Auto,
    Brute,
    Factorized,
}

#[derive(Debug, Args)]
struct ClassifyHoms {
    /// Run the fixed suite of sector configurations instead.
    #[arg(long, conflicts_with_all = ["source", "target"])]
    suite: bool,
    #[arg(long, default_value_t = 2)]
    points: usize,
    #[arg(long, required_unless_present = "suite")]
    source: Option<String>,
    #[arg(long, required_unless_present = "suite")]
    target: Option<String>,
    #[arg(long, value_enum, default_value = "j3o")]
    base: Builtin,
    #[arg(long, value_enum, default_value = "auto")]
    route: Route,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[arg(long, value_parser = parse_rational)]
    kappa: Rational,
    #[arg(long, default_value_t = DISTANCE_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    starts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| format!("`{s}` is not a rational: {e}"))
}

/// `1-2=1,2-1=2`; a missing `=m` means multiplicity one.
pub fn parse_sectors(s: &str, points: usize) -> Result<SectorDims> {
    let bad = |m: String| Error::InvalidArgument(format!("sector pattern `{s}`: {m}"));
    let mut out = SectorDims::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (pair, mult) = item.split_once('=').unwrap_or((item, "1"));
        let (i, j) = pair.split_once('-').ok_or_else(|| bad(format!("`{item}` is not `i-j=m`")))?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(format!("`{t}` is not a number")));
        let (i, j, m) = (num(i)?, num(j)?, num(mult)?);
        if i == 0 || j == 0 || i > points || j > points {
            return Err(bad(format!("sector ({i},{j}) outside 1..={points}")));
        }
        if out.insert((i, j), m).is_some() {
            return Err(bad(format!("sector ({i},{j}) repeated")));
        }
    }
    if out.is_empty() {
        return Err(bad("no sectors".into()));
    }
    Ok(out)
}

fn points_at_least(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!("--points must be at least {min}")));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum AlgebraCheck {
    Identity(crate::algebra::IdentityReport),
    AssociativeRep(AssociativeRepReport),
}

#[derive(Serialize)]
struct VerifyAlgebraResult {
    algebra: String,
    dim: usize,
    check: AlgebraCheck,
    pass: bool,
}

#[derive(Serialize)]
struct InnerDerivationResult {
    points: usize,
    #[serde(flatten)]
    span: InnerDerivationReport,
    /// `dim f₄ = 52` per factor.
    expected_dim: usize,
    pass: bool,
}

#[derive(Serialize)]
struct OneFormResult {
    #[serde(flatten)]
    span: OneFormReport,
    pass: bool,
}

#[derive(Serialize)]
struct DiracResult {
    solution: DiracSolution,
    leibniz: DiracLeibnizReport,
    grading: GradingReport,
    inner_symmetries: InnerSymmetryReport,
    hom: Option<DiracHomReport>,
    pass: bool,
}

#[derive(Serialize)]
struct HomResult {
    points: usize,
    base: Builtin,
    source: Vec<((usize, usize), usize)>,
    target: Vec<((usize, usize), usize)>,
    classification: HomClassification,
    pass: bool,
}

#[derive(Serialize)]
struct OracleResult {
    associative: AssociativeOracleReport,
    symmetrized_control: SymmetrizedControlReport,
    pass: bool,
}

fn report<T: Serialize>(task: &str, inputs: Value, result: &T, cert: Option<&KernelCertificate>, t: Timings) -> Result<Report> {
    Report::new(task, &inputs, result, cert, t)
}

fn execute(cmd: &Command, t: &mut Timings) -> Result<Report> {
    match cmd {
        Command::VerifyAlgebra(a) => {
            let (alg, source, label) = match (&a.builtin, &a.file) {
                (Some(b), _) => (b.build(), json!({ "builtin": b }), json!(b).as_str().unwrap_or_default().to_string()),
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                    let alg = t.time("parse", || parse_algebra_file(&text))?;
                    (alg, json!({ "file": text }), "file".to_string())
                }
                (None, None) => return Err(Error::InvalidArgument("--builtin or --file is required".into())),
            };
            let key = a.identity.replace('-', "_");
            let check = if key == "associative_rep" {
                AlgebraCheck::AssociativeRep(t.time("sweep", || check_associative_rep(&ModuleAction::regular(&alg))))
            } else {
                let kind = IdentityKind::parse(&key).ok_or_else(|| Error::InvalidArgument(format!("unknown identity `{}`", a.identity)))?;
                AlgebraCheck::Identity(t.time("sweep", || alg.check_identity(kind)))
            };
            let pass = match &check {
                AlgebraCheck::Identity(r) => r.pass,
                AlgebraCheck::AssociativeRep(r) => r.pass,
            };
            let result = VerifyAlgebraResult { algebra: label, dim: alg.dim(), check, pass };
            report("verify-algebra", json!({ "algebra": source, "identity": key }), &result, None, t.clone())
        }
        Command::SolveDerivations(a) => {
            points_at_least(a.points, 1)?;
            let sectors = match &a.sectors {
                Some(s) => parse_sectors(s, a.points)?,
                None => full_sectors(a.points),
            };
            let r = t.time("solve", || solve_derivations(a.points, &sectors, a.monolithic))?;
            let cert = match (&r.monolithic, r.decomposed.as_slice()) {
                (Some(m), _) => Some(m.solution.certificate.clone()),
                (None, [only]) => Some(only.solution.certificate.clone()),
                _ => None,
            };
            let sectors: Vec<_> = sectors.into_iter().collect();
            let inputs = json!({ "points": a.points, "sectors": sectors, "monolithic": a.monolithic });
            report("solve-derivations", inputs, &r, cert.as_ref(), t.clone())
        }
        Command::InnerDerivations(a) => {
            points_at_least(a.points, 1)?;
            let rep = t.time("representation", || build_point_rep(a.points))?;
            let span = t.time("span", || inner_derivation_span(rep.action(), a.points == 1))?;
            let expected_dim = 52 * a.points;
            let pass = span.dim == expected_dim && span.antisymmetric && span.annihilates_identity.unwrap_or(true);
            let result = InnerDerivationResult { points: a.points, span, expected_dim, pass };
            report("inner-derivations", json!({ "points": a.points }), &result, None, t.clone())
        }
        Command::OneformSpan(a) => {
            points_at_least(a.points, 1)?;
            let span = t.time("closure", || universal_oneform_span(a.points))?;
            let pass = span.exact && span.dim == span.ambient_dim;
            report("oneform-span", json!({ "points": a.points }), &OneFormResult { span, pass }, None, t.clone())
        }
        Command::SolveDirac(a) => {
            points_at_least(a.points, 2)?;
            let rep = t.time("representation", || build_point_rep(a.points))?;
            let solution = t.time("solve", || solve_dirac_constraints(&rep))?;
            let d = solution.basis.first().ok_or_else(|| Error::InvalidArgument("no nonzero Dirac operator".into()))?;
            let leibniz = t.time("leibniz", || check_leibniz_for_dirac(d, &rep))?;
            let grading = t.time("grading", || check_grading(d, &rep))?;
            let inner_symmetries = t.time("inner_symmetries", || check_inner_symmetries(d, &rep))?;
            let hom = if a.points == 2 { Some(t.time("hom", || dirac_as_hom(d, &rep))?) } else { None };
            let pass = solution.kernel_dim == 1
                && solution.identity_pattern
                && solution.certificate.conclusive
                && leibniz.pass
                && grading.pass
                && inner_symmetries.pass
                && hom.as_ref().is_none_or(|h| h.matches_dirac_on_generators && h.intertwining_verified && h.sector_preserving);
            let cert = solution.certificate.clone();
            let result = DiracResult { solution, leibniz, grading, inner_symmetries, hom, pass };
            report("solve-dirac", json!({ "points": a.points }), &result, Some(&cert), t.clone())
        }
        Command::CheckTriple(a) => {
            let r = t.time("checks", || check_triple(a.kappa))?;
            report("check-triple", json!({ "kappa": a.kappa.to_string() }), &r, None, t.clone())
        }
        Command::ClassifyHoms(a) if a.suite => {
            let r: HomSuiteReport = t.time("suite", hom_suite)?;
            report("classify-homs", json!({ "suite": true }), &r, None, t.clone())
        }
        Command::ClassifyHoms(a) => {
            points_at_least(a.points, 1)?;
            let src = parse_sectors(a.source.as_deref().unwrap_or_default(), a.points)?;
            let tgt = parse_sectors(a.target.as_deref().unwrap_or_default(), a.points)?;
            let base = a.base.build();
            let m = t.time("build", || build_split_bimodule_over(&base, a.points, &src))?;
            let n = t.time("build", || build_split_bimodule_over(&base, a.points, &tgt))?;
            let c = t.time("classify", || match a.route {
                Route::Auto => classify_bimodule_homs(&m, &n),
                Route::Brute => classify_homs_brute_force(&m, &n),
                Route::Factorized => classify_homs_factorized(&m, &n),
            })?;
            let pass = c.dim == c.formula_dim && c.sector_preserving && c.intertwining_verified && c.gamma_shape;
            let cert = c.certificate.clone();
            let (source, target): (Vec<_>, Vec<_>) = (src.into_iter().collect(), tgt.into_iter().collect());
            let inputs = json!({ "points": a.points, "base": a.base, "route": a.route, "source": source, "target": target });
            let result = HomResult { points: a.points, base: a.base, source, target, classification: c, pass };
            report("classify-homs", inputs, &result, cert.as_ref(), t.clone())
        }
        Command::Distance(a) => {
            let mut q = t.time("setup", || DistanceQuery::two_point(a.kappa))?;
            q.tolerance = a.tolerance;
            q.starts = a.starts;
            q.seed = a.seed;
            let r = t.time("optimise", || connes_distance(&q))?;
            let inputs = json!({ "kappa": a.kappa.to_string(), "tolerance": a.tolerance, "starts": a.starts, "seed": a.seed });
            report("distance", inputs, &r, None, t.clone())
        }
        Command::OracleSuite => {
            let associative = t.time("associative", associative_oracle_suite)?;
            let symmetrized_control = t.time("symmetrized_control", || symmetrized_control(1))?;
            let pass = associative.pass && symmetrized_control.pass;
            report("oracle-suite", json!({}), &OracleResult { associative, symmetrized_control, pass }, None, t.clone())
        }
    }
}

fn thread_count(flag: Option<usize>) -> std::result::Result<Option<usize>, String> {
    match flag {
        Some(0) => Err("--threads must be positive".into()),
        Some(n) => Ok(Some(n)),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(format!("{THREADS_ENV}=`{v}` is not a positive integer")),
            },
            Err(_) => Ok(None),
        },
    }
}

/// Run one command line. Exit code 0 on success, 2 when a verification
/// fails (the report is still written), 1 on usage or input errors.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = out.write_all(text.as_bytes());
                0
            } else {
                let _ = err.write_all(text.as_bytes());
                1
            };
        }
    };
    if cli.schema {
        let _ = out.write_all(SCHEMA.as_bytes());
        return 0;
    }
    let Some(cmd) = &cli.command else {
        let _ = writeln!(err, "error: a subcommand is required\n\nRun with --help for usage.");
        return 1;
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return 1;
        }
    };
    let mut timings = Timings::new();
    let outcome = pool.install(|| execute(cmd, &mut timings));
    if cli.verbose {
        for (phase, secs) in timings.phases() {
            let _ = writeln!(err, "[{phase}] {secs:.3} s");
        }
    }
    match outcome {
        Ok(r) => {
            let _ = out.write_all(r.to_json().as_bytes());
            if r.pass() {
                0
            } else {
                let _ = writeln!(err, "verification failed; see result");
                2
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Inconclusive { .. } | Error::NotIntertwining(_) | Error::NoConvergence { .. } => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_patterns() {
        let s = parse_sectors("1-2=2, 2-1", 2).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), [((1, 2), 2), ((2, 1), 1)]);
        assert!(parse_sectors("1-3", 2).is_err());
        assert!(parse_sectors("12", 2).is_err());
        assert!(parse_sectors("1-2,1-2=3", 2).is_err());
        assert!(parse_sectors("", 2).is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_integer(-2));
        assert!(parse_rational("0.5").is_err());
    }
}
