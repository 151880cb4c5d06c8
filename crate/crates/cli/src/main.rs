//! `jdomain`: validate and inspect normal j-algebras, Siegel domains and
//! their vector-field algebras; classify line-bundle parameters.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse or schema error.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use jdomain::builtins::{build_builtin, build_from_fields, builtin_names, BuiltinExample};
use jdomain::classify::{classify_batch, default_grid, report_item, XiParam};
use jdomain::envelope::{validate, Envelope, KINDS};
use jdomain::exact::{parse_rat, rat_to_f64, rat_to_string, Gauss, Rat};
use jdomain::lie::LieAlgebra;
use jdomain::normal_j::{NormalJAlgebra, RootKind};
use jdomain::reps::{delta_eval, delta_exponents, kernel_eval};
use jdomain::siegel::Point;
use jdomain::suite::{run_suite, CheckResult, SuiteOptions};
use jdomain::vfields::{grade_classify, GradeClass};
use num_complex::Complex64;
use serde_json::json;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "jdomain", version, about = "Normal j-algebras, Siegel domains and their vector fields")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Use a shipped example instead of a file.
    #[arg(long, global = true, value_name = "NAME")]
    builtin: Option<String>,
    /// Relative tolerance for the numeric suite checks.
    #[arg(long, global = true, value_name = "FLOAT")]
    tolerance: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Jacobi identity, normal j-algebra axioms and grading shape.
    Validate { path: Option<PathBuf> },
    /// Root decomposition with weights and dimensions.
    Roots { path: Option<PathBuf> },
    /// Grade of each vector field under the Euler field.
    Grade { path: Option<PathBuf> },
    /// Full bracket table in basis order.
    Brackets { path: Option<PathBuf> },
    /// Unitarizability and equivalence classes of xi(x, y, n, n').
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        x: Option<String>,
        #[arg(long, allow_negative_numbers = true, default_value = "0")]
        y: String,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        nprime: Option<i64>,
        /// `default` for the 10^4 grid, or a path to an xi_batch envelope.
        #[arg(long, conflicts_with_all = ["x", "n", "nprime"])]
        grid: Option<String>,
    },
    /// Evaluate Delta_xi at a cone argument, or the kernel at two points.
    Delta {
        /// Comma-separated: (x, y, n, n') for vinberg5, else a covector on g or b.
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// `E`, `<c>E`, or comma-separated complex u-coordinates; with `--w`,
        /// `ref` or full (u, v) coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Second point; switches to the kernel.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Every generic check plus the example's golden facts.
    Suite {
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Write a shipped example as a JSON envelope.
    Export {
        #[arg(long, default_value = "fields")]
        kind: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

type CliResult = Result<bool, CliError>;

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(io::stdout().lock(), $($arg)*)?
    };
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // A reader that stops early (`| head`) is not a failure.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("JDOMAIN_THREADS") {
        let n: usize =
            v.trim().parse().map_err(|_| usage(format!("JDOMAIN_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(usage("JDOMAIN_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    match &cli.cmd {
        Cmd::Validate { path } => cmd_validate(cli, path.as_deref()),
        Cmd::Roots { path } => cmd_roots(cli, path.as_deref()),
        Cmd::Grade { path } => cmd_grade(cli, path.as_deref()),
        Cmd::Brackets { path } => cmd_brackets(cli, path.as_deref()),
        Cmd::Classify { x, y, n, nprime, grid } => cmd_classify(cli, x.as_deref(), y, *n, *nprime, grid.as_deref()),
        Cmd::Delta { xi, point, w } => cmd_delta(cli, xi, point, w.as_deref()),
        Cmd::Suite { path, samples, seed } => cmd_suite(cli, path.as_deref(), *samples, *seed),
        Cmd::Export { kind, output } => cmd_export(cli, kind, output.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// Inputs.

enum Input {
    Builtin(Box<BuiltinExample>),
    Envelope(Envelope),
}

fn builtin(name: &str) -> Result<BuiltinExample, CliError> {
    match build_builtin(name) {
        Some(r) => r.map_err(|e| CliError::Invalid(e.to_string())),
        None => Err(usage(format!("unknown builtin {name:?}; expected one of {}", builtin_names().join(", ")))),
    }
}

fn load(cli: &Cli, path: Option<&Path>) -> Result<Input, CliError> {
    match (cli.builtin.as_deref(), path) {
        (Some(name), None) => Ok(Input::Builtin(Box::new(builtin(name)?))),
        (None, Some(p)) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Envelope::from_json(&text).map(Input::Envelope).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
        (Some(_), Some(_)) => Err(usage("give either --builtin or a file, not both")),
        (None, None) => Err(usage("give --builtin NAME or a JSON envelope file")),
    }
}

fn example(input: Input) -> Result<BuiltinExample, CliError> {
    match input {
        Input::Builtin(ex) => Ok(*ex),
        Input::Envelope(Envelope::Fields(data)) => {
            build_from_fields(data).map_err(|e| CliError::Invalid(e.to_string()))
        }
        Input::Envelope(env) => Err(usage(format!("this command needs a fields envelope, got {}", env.kind()))),
    }
}

fn normal_j(input: Input) -> Result<NormalJAlgebra, CliError> {
    match input {
        Input::Envelope(Envelope::NormalJ(d))
        | Input::Envelope(Envelope::Domain(jdomain::envelope::DomainData { algebra: d, .. })) => {
            NormalJAlgebra::new(d.b, d.j, d.omega).map_err(|e| CliError::Invalid(e.to_string()))
        }
        other => Ok(example(other)?.spec.nj),
    }
}

fn lie_algebra(input: Input) -> Result<LieAlgebra, CliError> {
    match input {
        Input::Envelope(Envelope::LieAlgebra(b)) => Ok(b),
        Input::Envelope(Envelope::NormalJ(d)) => Ok(d.b),
        Input::Envelope(Envelope::Domain(d)) => Ok(d.algebra.b),
        other => Ok(example(other)?.g.algebra),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), CliError> {
    outln!("{}", serde_json::to_string_pretty(v).map_err(|e| usage(e.to_string()))?);
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands.

fn print_checks(cli: &Cli, title: &str, checks: &[CheckResult]) -> CliResult {
    let ok = checks.iter().all(|c| c.passed);
    if cli.json {
        print_json(&json!({ "input": title, "passed": ok, "checks": checks }))?;
    } else {
        outln!("validate {title}");
        for c in checks {
            outln!("  {:<24} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
        }
        outln!("{}", if ok { "valid" } else { "invalid" });
    }
    Ok(ok)
}

fn cmd_validate(cli: &Cli, path: Option<&Path>) -> CliResult {
    let (title, env) = match load(cli, path)? {
        Input::Builtin(ex) => (ex.name.clone(), Envelope::Fields(ex.data.clone())),
        Input::Envelope(env) => {
            (format!("{} ({})", path.map(|p| p.display().to_string()).unwrap_or_default(), env.kind()), env)
        }
    };
    print_checks(cli, &title, &validate(&env))
}

fn root_weight(kind: RootKind, r: usize) -> Vec<Rat> {
    let half = Rat::new(1.into(), 2.into());
    let mut w = vec![Rat::from_integer(0.into()); r];
    match kind {
        RootKind::Cartan => {}
        RootKind::Alpha(k) => w[k] = Rat::from_integer(1.into()),
        RootKind::Half(k) => w[k] = half,
        RootKind::Diff { l, k } => {
            w[l] = half.clone();
            w[k] = -half;
        }
        RootKind::Sum { l, k } => {
            w[l] = half.clone();
            w[k] = half;
        }
    }
    w
}

fn root_grade(kind: RootKind) -> &'static str {
    match kind {
        RootKind::Cartan | RootKind::Diff { .. } => "0",
        RootKind::Half(_) => "1/2",
        RootKind::Alpha(_) | RootKind::Sum { .. } => "1",
    }
}

fn cmd_roots(cli: &Cli, path: Option<&Path>) -> CliResult {
    let nj = normal_j(load(cli, path)?)?;
    let rows: Vec<_> = nj
        .root_table()
        .into_iter()
        .map(|(kind, dim)| {
            let w: Vec<String> = root_weight(kind, nj.rank).iter().map(rat_to_string).collect();
            (kind.to_string(), w, dim, root_grade(kind))
        })
        .collect();
    if cli.json {
        let items: Vec<_> =
            rows.iter().map(|(k, w, d, g)| json!({ "root": k, "weight": w, "dim": d, "grade": g })).collect();
        print_json(&json!({ "rank": nj.rank, "roots": items }))?;
    } else {
        outln!("rank r = {}", nj.rank);
        outln!("{:<22} {:<20} {:>4}  grade", "root", "weight", "dim");
        for (k, w, d, g) in &rows {
            outln!("{:<22} {:<20} {:>4}  {}", k, format!("({})", w.join(", ")), d, g);
        }
    }
    Ok(true)
}

fn grade_order(c: &GradeClass) -> (u8, Option<Rat>) {
    match c {
        GradeClass::Homogeneous(g) => (0, Some(g.clone())),
        GradeClass::NotHomogeneous(_) => (1, None),
        GradeClass::Zero => (2, None),
    }
}

fn cmd_grade(cli: &Cli, path: Option<&Path>) -> CliResult {
    let ex = example(load(cli, path)?)?;
    let n_u = ex.spec.n_u();
    let classes: Vec<GradeClass> = ex.g.fields.iter().map(|f| grade_classify(f, n_u)).collect();
    let mut rows: Vec<(GradeClass, Vec<String>)> = Vec::new();
    for (label, c) in ex.g.labels.iter().zip(&classes) {
        match rows.iter_mut().find(|(k, _)| k == c) {
            Some((_, ls)) => ls.push(label.clone()),
            None => rows.push((c.clone(), vec![label.clone()])),
        }
    }
    rows.sort_by_key(|(c, _)| grade_order(c));
    if cli.json {
        let fields: Vec<_> =
            ex.g.labels.iter().zip(&classes).map(|(l, c)| json!({ "label": l, "grade": c.to_string() })).collect();
        let table: Vec<_> =
            rows.iter().map(|(c, ls)| json!({ "grade": c.to_string(), "dim": ls.len(), "fields": ls })).collect();
        print_json(&json!({ "example": ex.name, "fields": fields, "table": table }))?;
    } else {
        outln!("{:<14} {:>4}  fields", "grade", "dim");
        for (c, ls) in &rows {
            outln!("{:<14} {:>4}  {}", c.to_string(), ls.len(), ls.join(", "));
        }
    }
    Ok(true)
}

fn cmd_brackets(cli: &Cli, path: Option<&Path>) -> CliResult {
    let alg = lie_algebra(load(cli, path)?)?;
    let lines = alg.bracket_table_lines();
    if cli.json {
        print_json(&json!({ "labels": alg.labels(), "brackets": lines }))?;
    } else {
        for l in &lines {
            outln!("{l}");
        }
    }
    Ok(true)
}

fn parse_rational(name: &str, s: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|e| usage(format!("--{name}: {e}")))
}

fn cmd_classify(cli: &Cli, x: Option<&str>, y: &str, n: Option<i64>, np: Option<i64>, grid: Option<&str>) -> CliResult {
    if let Some(spec) = grid {
        let params = if spec == "default" {
            default_grid()
        } else {
            let text = fs::read_to_string(spec).map_err(|e| usage(format!("{spec}: {e}")))?;
            match Envelope::from_json(&text).map_err(|e| usage(format!("{spec}: {e}")))? {
                Envelope::XiBatch(xs) => xs,
                other => return Err(usage(format!("{spec}: expected an xi_batch envelope, got {}", other.kind()))),
            }
        };
        let out = io::stdout();
        let mut w = BufWriter::new(out.lock());
        for item in classify_batch(&params) {
            let line = serde_json::to_string(&item).map_err(|e| usage(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        return Ok(true);
    }
    let (Some(x), Some(n), Some(np)) = (x, n, np) else {
        return Err(usage("classify needs --x, --n and --nprime, or --grid"));
    };
    let xi = XiParam::new(parse_rational("x", x)?, parse_rational("y", y)?, n, np);
    let item = report_item(&xi);
    if cli.json {
        print_json(&item)?;
    } else if item.unitarizable {
        outln!(
            "xi{xi}: unitarizable, {}, {}",
            item.b_class.as_deref().unwrap_or_default(),
            item.g_class.as_deref().unwrap_or_default()
        );
    } else {
        outln!("xi{xi}: not unitarizable");
    }
    Ok(true)
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t = s.trim().replace(' ', "");
    Complex64::from_str(&t).map_err(|_| usage(format!("not a complex number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',').map(parse_complex).collect()
}

fn xi_covector(ex: &BuiltinExample, s: &str) -> Result<Vec<Gauss>, CliError> {
    let entries: Vec<Rat> = s.split(',').map(|t| parse_rational("xi", t)).collect::<Result<_, _>>()?;
    let (gd, bd) = (ex.g.dim(), ex.b_dim());
    if ex.name == "vinberg5" && entries.len() == 4 {
        let int = |r: &Rat| {
            if r.is_integer() {
                r.to_integer().try_into().map_err(|_| usage("--xi: n out of range"))
            } else {
                Err(usage("--xi: n and n' must be integers"))
            }
        };
        let xi = XiParam::new(entries[0].clone(), entries[1].clone(), int(&entries[2])?, int(&entries[3])?);
        return Ok(xi.covector(&ex.g.algebra));
    }
    if entries.len() != gd && entries.len() != bd {
        return Err(usage(format!("--xi: expected {gd} (g) or {bd} (b) entries, got {}", entries.len())));
    }
    Ok(entries.into_iter().map(Gauss::real).collect())
}

fn cone_argument(ex: &BuiltinExample, s: &str) -> Result<Vec<Complex64>, CliError> {
    let t = s.trim();
    if let Some(c) = t.strip_suffix('E') {
        let c = if c.is_empty() { 1.0 } else { rat_to_f64(&parse_rational("point", c)?) };
        return Ok(ex.spec.e_coords.iter().map(|g| g.to_c64() * c).collect());
    }
    let u = parse_list(t)?;
    if u.len() != ex.spec.n_u() {
        return Err(usage(format!("--point: expected {} coordinates, got {}", ex.spec.n_u(), u.len())));
    }
    Ok(u)
}

fn domain_point(ex: &BuiltinExample, s: &str) -> Result<Point<Complex64>, CliError> {
    let spec = &ex.spec;
    if s.trim() == "ref" {
        return Ok(spec.reference_point().to_c64());
    }
    let c = parse_list(s)?;
    if c.len() != spec.n_u() + spec.n_v() {
        return Err(usage(format!("expected {} coordinates, got {}", spec.n_u() + spec.n_v(), c.len())));
    }
    let p = Point { u: c[..spec.n_u()].to_vec(), v: c[spec.n_u()..].to_vec() };
    if !spec.contains(&p) {
        return Err(CliError::Invalid(format!("point {s:?} is not in the domain")));
    }
    Ok(p)
}

/// Rounds to 15 significant digits.
fn sig15(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn format_complex(z: Complex64) -> String {
    let (re, im) = (sig15(z.re), sig15(z.im));
    if im == 0.0 {
        format!("{re:?}")
    } else {
        format!("{re:?}{}{:?}i", if im < 0.0 { "-" } else { "+" }, im.abs())
    }
}

fn cmd_delta(cli: &Cli, xi: &str, point: &str, w: Option<&str>) -> CliResult {
    let ex = builtin(cli.builtin.as_deref().unwrap_or("vinberg5"))?;
    let spec = &ex.spec;
    let cov = xi_covector(&ex, xi)?;
    let exps = delta_exponents(&spec.nj, &cov[..ex.b_dim()]);
    let invalid = |e: jdomain::siegel::PeelError| CliError::Invalid(e.to_string());
    let (what, value) = match w {
        None => {
            let u = cone_argument(&ex, point)?;
            if u.iter().all(|z| z.im == 0.0) {
                spec.peel(&u, true).map_err(invalid)?;
            }
            ("delta", delta_eval(spec, &exps, &u).map_err(invalid)?)
        }
        Some(w) => {
            let (z, w) = (domain_point(&ex, point)?, domain_point(&ex, w)?);
            ("kernel", kernel_eval(spec, &exps, &z, &w).map_err(invalid)?)
        }
    };
    if cli.json {
        print_json(&json!({ what: { "re": sig15(value.re), "im": sig15(value.im) } }))?;
    } else {
        outln!("{}", format_complex(value));
    }
    Ok(true)
}

fn cmd_suite(cli: &Cli, path: Option<&Path>, samples: usize, seed: u64) -> CliResult {
    let ex = example(load(cli, path)?)?;
    let defaults = SuiteOptions::default();
    let opts = SuiteOptions { tolerance: cli.tolerance.unwrap_or(defaults.tolerance), samples, seed };
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(usage("--tolerance must be positive"));
    }
    let report = run_suite(&ex, &opts);
    if cli.json {
        print_json(&report)?;
    } else {
        outln!("{report}");
    }
    Ok(report.all_passed())
}

fn cmd_export(cli: &Cli, kind: &str, output: Option<&Path>) -> CliResult {
    if !KINDS.contains(&kind) || kind == "xi_batch" {
        return Err(usage(format!("cannot export kind {kind:?}; use lie_algebra, normal_j, domain or fields")));
    }
    let name = cli.builtin.as_deref().ok_or_else(|| usage("export needs --builtin NAME"))?;
    let env = Envelope::export(&builtin(name)?, kind).map_err(|e| usage(e.to_string()))?;
    let text = env.to_json() + "\n";
    match output {
        Some(p) => fs::write(p, text)?,
        None => write!(io::stdout().lock(), "{text}")?,
    }
    Ok(true)
}
