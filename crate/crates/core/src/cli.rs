//! Command-line surface. Parsing and execution live in the library so that
//! the binary is a thin shim and the tests can drive commands in-process.
//!
//! Exit codes: 0 all verdicts true, 1 some verdict false, 2 usage error,
//! 3 data error (unreadable or malformed input).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::arith::{check_hypotheses, CurveSpec, FieldSpec};
use crate::error::Error;
use crate::formats::{
    coeff_vec, ElementFile, IdealFile, PresentationFile, StabilizedFile, TowerFile,
};
use crate::ideal::IdealHandle;
use crate::layer::LayerElement;
use crate::linalg::HowellBasis;
use crate::padic::{is_prime, PadicContext};
use crate::theta::{self, ThetaTower};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

pub const PRECISION_CAVEAT: &str = "verified in Λ_n mod p^M";

#[derive(Debug, Parser)]
#[command(name = "iwasawa", about = "Finite-layer Iwasawa algebra calculus for theta elements")]
pub struct RunConfig {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check (Na), (Spl), (Def) and ordinarity for a curve, field and prime.
    CheckHypotheses {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long = "p", value_parser = parse_prime)]
        p: u64,
    },
    /// Write a seeded strict theta tower.
    GenTower {
        #[arg(long)]
        seed: u64,
        #[arg(long = "p", value_parser = parse_prime)]
        p: u64,
        #[arg(long = "M", value_parser = parse_precision)]
        precision: u32,
        #[arg(long = "N")]
        top: usize,
        #[arg(long, allow_hyphen_values = true)]
        ap: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks on a theta tower file.
    Theta {
        #[command(subcommand)]
        op: ThetaOp,
    },
    /// Ideal predicates on ideal files.
    Ideal {
        #[command(subcommand)]
        op: IdealOp,
    },
    /// Initial Fitting ideal of a presentation.
    Fitting {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        prec: PrecisionArgs,
    },
    /// Base change of a presentation to a lower layer, with the Fitting check.
    BaseChange {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        prec: PrecisionArgs,
        #[arg(long)]
        target: u32,
    },
    /// Squared two-generator ideal versus the Fitting ideal of a presentation.
    MainIdentity {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long, conflicts_with = "constructed")]
        pres: Option<PathBuf>,
        /// Use diag(θ_n(f_α), θ_n(f_α)) built from the tower.
        #[arg(long)]
        constructed: bool,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct PrecisionArgs {
    #[arg(long = "p", value_parser = parse_prime)]
    pub p: u64,
    #[arg(long = "M", value_parser = parse_precision)]
    pub precision: u32,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Level to check; defaults to the top of the tower.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ThetaOp {
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    Stabilize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Lemma21(TowerArgs),
    Lemma22(TowerArgs),
    Fe(TowerArgs),
    Lp(TowerArgs),
    Mu(TowerArgs),
}

#[derive(Debug, Subcommand)]
pub enum IdealOp {
    Eq {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    Contains {
        #[arg(long)]
        ideal: PathBuf,
        /// Coefficients as a JSON array, e.g. "[1,0,2]".
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    Principal {
        #[arg(long)]
        ideal: PathBuf,
    },
}

fn parse_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if p < 3 || !is_prime(p) {
        return Err(format!("{p} is not an odd prime"));
    }
    Ok(p)
}

fn parse_precision(s: &str) -> Result<u32, String> {
    let m: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if m == 0 {
        return Err("M must be at least 1".into());
    }
    Ok(m)
}

#[derive(Debug)]
pub struct UsageError(pub clap::Error);

/// Parses `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    RunConfig::try_parse_from(argv).map_err(UsageError)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse and execute; usage errors become exit code 2.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => execute(&cfg),
        Err(UsageError(e)) => {
            let rendered = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: EXIT_OK,
                        stdout: rendered,
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                },
            }
        }
    }
}

/// A report: header parameters, named values, named verdicts.
struct Report {
    command: String,
    p: Option<u64>,
    precision: Option<u32>,
    n: Option<usize>,
    seed: Option<u64>,
    values: Vec<(String, Value)>,
    verdicts: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            p: None,
            precision: None,
            n: None,
            seed: None,
            values: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn ctx(mut self, ctx: PadicContext) -> Self {
        self.p = Some(ctx.p());
        self.precision = Some(ctx.precision());
        self
    }

    fn layer(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    fn value(&mut self, key: &str, v: Value) {
        self.values.push((key.into(), v));
    }

    fn verdict(&mut self, key: &str, ok: bool) {
        self.verdicts.push((key.into(), ok));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn ok(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| *v)
    }

    fn render(&self, as_json: bool) -> String {
        let opt = |v: Option<u64>| v.map_or(Value::Null, Value::from);
        if as_json {
            let mut values = Map::new();
            for (k, v) in &self.values {
                values.insert(k.clone(), v.clone());
            }
            let mut verdicts = Map::new();
            for (k, v) in &self.verdicts {
                verdicts.insert(k.clone(), Value::Bool(*v));
            }
            let doc = json!({
                "command": self.command,
                "p": opt(self.p),
                "M": opt(self.precision.map(u64::from)),
                "n": opt(self.n.map(|n| n as u64)),
                "seed": opt(self.seed),
                "values": values,
                "verdicts": verdicts,
                "notes": self.notes,
                "ok": self.ok(),
                "caveat": PRECISION_CAVEAT,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json value");
            s.push('\n');
            return s;
        }
        let show = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
        let mut out = String::new();
        out.push_str(&format!("iwasawa {}\n", self.command));
        out.push_str(&format!(
            "p = {}, M = {}, n = {}, seed = {}\n",
            show(self.p),
            show(self.precision.map(u64::from)),
            show(self.n.map(|n| n as u64)),
            show(self.seed),
        ));
        for (k, v) in &self.values {
            match v {
                Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                other => out.push_str(&format!("{k}: {other}\n")),
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        for (k, v) in &self.verdicts {
            out.push_str(&format!("verdict {k}: {v}\n"));
        }
        out.push_str(&format!("result: {}\n", if self.ok() { "PASS" } else { "FAIL" }));
        out.push_str(&format!("caveat: {PRECISION_CAVEAT}"));
        if let (Some(p), Some(m)) = (self.p, self.precision) {
            out.push_str(&format!(" (p^M = {p}^{m})"));
        }
        out.push('\n');
        out
    }
}

enum Failure {
    Data(String),
    /// Precondition violated by the data itself; reported as a failed verdict.
    Verdict(Report),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CmdResult = Result<Report, Failure>;

pub fn execute(cfg: &RunConfig) -> Outcome {
    match dispatch(&cfg.command) {
        Ok(report) => Outcome {
            code: if report.ok() { EXIT_OK } else { EXIT_FALSE },
            stdout: report.render(cfg.json),
            stderr: String::new(),
        },
        Err(Failure::Verdict(report)) => Outcome {
            code: EXIT_FALSE,
            stdout: report.render(cfg.json),
            stderr: String::new(),
        },
        Err(Failure::Data(msg)) => Outcome {
            code: EXIT_DATA,
            stdout: String::new(),
            stderr: format!("data error: {msg}\n"),
        },
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_tower(path: &Path) -> Result<ThetaTower, Failure> {
    let file: TowerFile = read_json(path)?;
    Ok(file.to_tower()?)
}

fn basis_json(b: &HowellBasis) -> Value {
    json!(b.rows())
}

fn element_json(e: &LayerElement) -> Value {
    json!(coeff_vec(e))
}

fn pick_level(t: &ThetaTower, n: Option<usize>) -> usize {
    n.unwrap_or(t.top())
}

/// Wraps a tower-level precondition failure into a failed-verdict report.
fn gate(report: Report, e: Error) -> Failure {
    match e {
        Error::InvalidTower(_) | Error::HypothesisViolation(_) => {
            let mut r = report;
            r.note(e.to_string());
            r.verdict("precondition", false);
            Failure::Verdict(r)
        }
        other => other.into(),
    }
}

fn dispatch(cmd: &Command) -> CmdResult {
    match cmd {
        Command::CheckHypotheses { curve, field, p } => {
            let curve: CurveSpec = read_json(curve)?;
            let field: FieldSpec = read_json(field)?;
            let r = check_hypotheses(&curve, &field, *p)?;
            let mut report = Report::new("check-hypotheses");
            report.p = Some(*p);
            report.value("context", serde_json::to_value(&r).expect("serializable"));
            report.verdict("ordinary", r.ordinary);
            report.verdict("Na", r.na);
            report.verdict("Spl", r.spl);
            report.verdict("Def", r.def);
            report.verdict("coprimality", r.coprimality);
            report.verdict("field_shape", r.field_shape);
            report.note("(Im) and (Ram) are not checked");
            Ok(report)
        }
        Command::GenTower {
            seed,
            p,
            precision,
            top,
            ap,
            out,
        } => {
            let ctx = PadicContext::new(*p, *precision)?;
            let tower = theta::generate_tower(*seed, ctx, *top, ctx.from_i64(*ap))?;
            let file = TowerFile::from_tower(&tower);
            let text = serde_json::to_string_pretty(&file).expect("tower json") + "\n";
            let mut report = Report::new("gen-tower").ctx(ctx).layer(*top).seed(Some(*seed));
            match out {
                Some(path) => {
                    fs::write(path, &text)
                        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
                    report.value("written", json!(path.display().to_string()));
                }
                None => report.value("tower", serde_json::to_value(&file).expect("json")),
            }
            report.verdict(
                "strict_valid",
                theta::validate_tower(&tower, true).all_passed(),
            );
            Ok(report)
        }
        Command::Theta { op } => theta_cmd(op),
        Command::Ideal { op } => ideal_cmd(op),
        Command::Fitting { input, prec } => {
            let ctx = PadicContext::new(prec.p, prec.precision)?;
            let file: PresentationFile = read_json(input)?;
            let pres = file.to_presentation(ctx)?;
            let fitt = pres.fitting_ideal();
            let mut report = Report::new("fitting").ctx(ctx).layer(pres.layer() as usize);
            report.value("shape", json!([pres.rows(), pres.cols()]));
            report.value("fitting_ideal_basis", basis_json(fitt.canonical()));
            report.value("minimal_generators", json!(fitt.minimal_generator_count()));
            Ok(report)
        }
        Command::BaseChange {
            input,
            prec,
            target,
        } => {
            let ctx = PadicContext::new(prec.p, prec.precision)?;
            let file: PresentationFile = read_json(input)?;
            let pres = file.to_presentation(ctx)?;
            let down = pres.base_change(*target)?;
            let image = pres.fitting_ideal().project_to(*target)?;
            let fitt_down = down.fitting_ideal();
            let mut report = Report::new("base-change").ctx(ctx).layer(*target as usize);
            report.value("source_layer", json!(pres.layer()));
            report.value(
                "presentation",
                serde_json::to_value(PresentationFile::from_presentation(&down)).expect("json"),
            );
            report.value("projected_fitting_basis", basis_json(image.canonical()));
            report.value("fitting_of_projection_basis", basis_json(fitt_down.canonical()));
            report.verdict("base_change_compatible", image.equals(&fitt_down)?);
            Ok(report)
        }
        Command::MainIdentity {
            tower,
            pres,
            constructed,
            n,
        } => {
            let t = read_tower(tower)?;
            let n = pick_level(&t, *n);
            let report = Report::new("main-identity")
                .ctx(t.ctx())
                .layer(n)
                .seed(t.seed());
            let presentation = match (pres, constructed) {
                (Some(path), false) => {
                    let file: PresentationFile = read_json(path)?;
                    file.to_presentation(t.ctx())?
                }
                (None, true) => theta::stabilized_diagonal_presentation(&t, n)?,
                _ => {
                    return Err(Failure::Data(
                        "main-identity needs exactly one of --pres or --constructed".into(),
                    ))
                }
            };
            let r = match theta::verify_main_identity(&t, n, &presentation) {
                Ok(r) => r,
                Err(e) => return Err(gate(report, e)),
            };
            let mut report = report;
            report.value("squared_ideal_basis", basis_json(&r.squared_ideal));
            report.value("fitting_ideal_basis", basis_json(&r.fitting_ideal));
            report.value("stabilized_square_basis", basis_json(&r.stabilized_square));
            if let Some(g) = &r.generator {
                report.value("generator", element_json(g));
            }
            report.value(
                "status",
                json!(format!(
                    "{}, {}",
                    if r.identity_holds { "equal" } else { "not equal" },
                    if r.principal { "principal" } else { "not principal" }
                )),
            );
            report.verdict("identity", r.identity_holds);
            report.verdict("principal", r.principal);
            Ok(report)
        }
    }
}

fn theta_cmd(op: &ThetaOp) -> CmdResult {
    match op {
        ThetaOp::Validate { input, strict } => {
            let t = read_tower(input)?;
            let r = theta::validate_tower(&t, *strict);
            let mut report = Report::new("theta validate")
                .ctx(t.ctx())
                .layer(t.top())
                .seed(t.seed());
            report.value("strict", json!(strict));
            for c in &r.checks {
                report.verdict(&c.label, c.passed);
            }
            Ok(report)
        }
        ThetaOp::Stabilize { input } => {
            let t = read_tower(input)?;
            let s = theta::stabilize(&t)?;
            let mut report = Report::new("theta stabilize")
                .ctx(t.ctx())
                .layer(t.top())
                .seed(t.seed());
            report.value(
                "stabilized",
                serde_json::to_value(StabilizedFile::from_stabilized(&s)).expect("json"),
            );
            for c in &theta::check_norm_compat(&s).checks {
                report.verdict(&c.label, c.passed);
            }
            Ok(report)
        }
        ThetaOp::Lemma21(args) => {
            let t = read_tower(&args.input)?;
            let n = pick_level(&t, args.n);
            let report = Report::new("theta lemma21")
                .ctx(t.ctx())
                .layer(n)
                .seed(t.seed());
            let equal = match theta::verify_lemma_21(&t, n) {
                Ok(v) => v,
                Err(e) => return Err(gate(report, e)),
            };
            let cert = theta::lemma_21_certificate(&t, n)?;
            let cert_ok = theta::check_lemma_21_certificate(&t, n, &cert)?;
            let mut report = report;
            report.value(
                "two_generator_basis",
                basis_json(theta::two_generator_ideal(&t, n)?.canonical()),
            );
            report.value(
                "certificate",
                json!(cert
                    .iter()
                    .map(|(a, b)| json!([coeff_vec(a), coeff_vec(b)]))
                    .collect::<Vec<_>>()),
            );
            report.verdict("ideals_equal", equal);
            report.verdict("certificate", cert_ok);
            Ok(report)
        }
        ThetaOp::Lemma22(args) => {
            let t = read_tower(&args.input)?;
            let n = pick_level(&t, args.n);
            let mut report = Report::new("theta lemma22")
                .ctx(t.ctx())
                .layer(n)
                .seed(t.seed());
            let v = match theta::verify_lemma_22(&t, n) {
                Ok(v) => v,
                Err(e) => return Err(gate(report, e)),
            };
            report.value("inclusion_fwd", json!(v.inclusion_fwd));
            report.value("inclusion_bwd", json!(v.inclusion_bwd));
            if !v.non_anomalous {
                report.note("(Na) violated: a_p = 1 mod p, equality is not expected");
            }
            report.verdict("inclusion_fwd", v.inclusion_fwd);
            report.verdict("equal", v.equal);
            Ok(report)
        }
        ThetaOp::Fe(args) => {
            let t = read_tower(&args.input)?;
            let n = pick_level(&t, args.n);
            let s = theta::stabilize(&t)?;
            let mut report = Report::new("theta fe").ctx(t.ctx()).layer(n).seed(t.seed());
            report.value("theta_f_alpha", element_json(s.level_checked(n)?));
            report.verdict("functional_equation", theta::check_functional_eq(&s, n)?);
            Ok(report)
        }
        ThetaOp::Lp(args) => {
            let t = read_tower(&args.input)?;
            let n = pick_level(&t, args.n);
            let s = theta::stabilize(&t)?;
            let l = theta::lp_approx(&s, n)?;
            let mut report = Report::new("theta lp").ctx(t.ctx()).layer(n).seed(t.seed());
            report.value("lp_approx", element_json(&l));
            report.verdict("iota_fixed", l.iota() == l);
            Ok(report)
        }
        ThetaOp::Mu(args) => {
            let t = read_tower(&args.input)?;
            let n = pick_level(&t, args.n);
            let s = theta::stabilize(&t)?;
            let l = theta::lp_approx(&s, n)?;
            let mu_theta = theta::mu_invariant(s.level_checked(n)?);
            let mu_lp = theta::mu_invariant(&l);
            let mut report = Report::new("theta mu").ctx(t.ctx()).layer(n).seed(t.seed());
            report.value("mu_theta_f_alpha", json!(mu_theta.to_string()));
            report.value("mu_lp_approx", json!(mu_lp.to_string()));
            report.verdict("mu_zero", mu_lp == theta::MuInvariant::Finite(0));
            Ok(report)
        }
    }
}

fn ideal_cmd(op: &IdealOp) -> CmdResult {
    match op {
        IdealOp::Eq { a, b } => {
            let i = read_json::<IdealFile>(a)?.to_ideal()?;
            let j = read_json::<IdealFile>(b)?.to_ideal()?;
            let mut report = Report::new("ideal eq").ctx(i.ctx()).layer(i.layer() as usize);
            report.value("basis_a", basis_json(i.canonical()));
            report.value("basis_b", basis_json(j.canonical()));
            report.verdict("equal", i.equals(&j)?);
            Ok(report)
        }
        IdealOp::Contains { ideal, elem } => {
            let i = read_json::<IdealFile>(ideal)?.to_ideal()?;
            let coeffs: Vec<i64> = serde_json::from_str(elem)
                .map_err(|e| Failure::Data(format!("--elem: {e}")))?;
            let x = ElementFile {
                n: i.layer(),
                coeffs,
            }
            .to_element(i.ctx())?;
            let mut report = Report::new("ideal contains")
                .ctx(i.ctx())
                .layer(i.layer() as usize);
            report.value("basis", basis_json(i.canonical()));
            report.verdict("contains", i.contains(&x)?);
            Ok(report)
        }
        IdealOp::Principal { ideal } => {
            let i: IdealHandle = read_json::<IdealFile>(ideal)?.to_ideal()?;
            let mut report = Report::new("ideal principal")
                .ctx(i.ctx())
                .layer(i.layer() as usize);
            report.value("basis", basis_json(i.canonical()));
            report.value("minimal_generators", json!(i.minimal_generator_count()));
            let g = i.is_principal();
            if let Some(g) = &g {
                report.value("generator", element_json(g));
            }
            report.verdict("principal", g.is_some());
            Ok(report)
        }
    }
}
