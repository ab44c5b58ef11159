//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Built, Check, EigenInput, RunConfig, SolutionConfig};
use crate::double::{covering_constructors, existence_table, TABLE_FAMILIES};
use crate::error::{Error, Result};
use crate::gmc::{gmc_commutator_residual, gmc_span_residual, jacobian_rank};
use crate::mhd::{
    characteristic_speeds, dispersion_residual_scaled, eigenvector, wave_matrix, FamilyKind, Sign, Vec3, WaveFamily,
};
use crate::verify::{self, closed_form_convergence, convergence_order, GridSpec, SolutionField, TimeSpec};
use crate::wave::{Quantity, Solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_SAMPLING: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "RIEMANN_MHD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "riemann-mhd", version, about = "Riemann simple and double waves of ideal MHD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Io {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic speeds and eigenvectors at a state.
    Eigen(Io),
    /// Build a solution and print its manifest.
    Construct(Io),
    /// Sample a solution on a grid as CSV.
    Sample(Io),
    /// Run verification checks.
    Verify(Io),
    /// Existence table of double waves.
    Table1 {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, e: impl std::fmt::Display) -> Self {
        Self { code, message: e.to_string() }
    }
}

/// Exit code of an error raised while constructing a solution.
fn construction_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => EXIT_INPUT,
        _ => EXIT_CONSTRUCTION,
    }
}

/// Run `f` on a pool sized by `threads`, or on the global pool if `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads.filter(|&n| n > 0) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Thread count requested through the environment.
pub fn env_threads() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::new(EXIT_INPUT, format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn read_config(path: &Path) -> std::result::Result<RunConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text).map_err(|e| Failure::new(EXIT_INPUT, e))
}

fn build(cfg: &SolutionConfig) -> std::result::Result<Built, Failure> {
    cfg.build().map_err(|e| Failure::new(construction_code(&e), e))
}

fn emit(out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn all_families() -> Vec<WaveFamily> {
    use FamilyKind::*;
    let mut v = vec![WaveFamily::new(E1, Sign::Plus), WaveFamily::new(E2, Sign::Plus), WaveFamily::new(E3, Sign::Plus)];
    for k in [Alfven, Slow, Fast] {
        v.push(WaveFamily::new(k, Sign::Plus));
        v.push(WaveFamily::new(k, Sign::Minus));
    }
    v
}

/// Speeds, eigenvectors and residuals of the wave relation at one state.
pub fn cmd_eigen(input: &EigenInput) -> Result<Value> {
    let model = input.model();
    input.state.validate()?;
    model.validate()?;
    let speeds = characteristic_speeds(&input.state, &model, &input.lvec)?;
    let mut eigenvectors = serde_json::Map::new();
    let mut wave_rel = serde_json::Map::new();
    let mut dispersion = serde_json::Map::new();
    for fam in all_families() {
        let label = fam.label();
        match eigenvector(&input.state, &model, &input.lvec, fam) {
            Ok(ev) => {
                let m = wave_matrix(&input.state, &model, &ev.wave_vector)?;
                let res = (m * ev.gamma).norm();
                let disp = dispersion_residual_scaled(&input.state, &model, &ev.wave_vector)?;
                eigenvectors.insert(
                    label.clone(),
                    json!({"gamma": ev.gamma.as_slice(), "speed": ev.speed, "lambda0": ev.wave_vector.lambda0}),
                );
                wave_rel.insert(label.clone(), json!(res));
                dispersion.insert(label, json!(disp));
            }
            Err(e) => {
                eigenvectors.insert(label, json!({"degenerate": e.to_string()}));
            }
        }
    }
    let mut out = serde_json::to_value(speeds)?;
    let obj = out.as_object_mut().expect("speeds serialize to an object");
    obj.insert("eigenvectors".into(), Value::Object(eigenvectors));
    obj.insert("wave_relation_residuals".into(), Value::Object(wave_rel));
    obj.insert("dispersion_residuals".into(), Value::Object(dispersion));
    Ok(out)
}

/// Manifest of a constructed solution.
pub fn cmd_construct(built: &Built) -> Value {
    built.solution().manifest()
}

/// Write a sampled field as CSV, 17 significant digits, rows in storage order.
pub fn write_csv<W: Write>(field: &SolutionField, mut w: W) -> Result<()> {
    writeln!(w, "t,x,y,z,rho,p,u,v,w,H1,H2,H3,valid")?;
    for (k, i) in field.indices().into_iter().enumerate() {
        let c = field.coords(i);
        for x in c {
            write!(w, "{x:.16e},")?;
        }
        for x in field.values[k].to_array() {
            write!(w, "{x:.16e},")?;
        }
        writeln!(w, "{}", u8::from(field.valid[k]))?;
    }
    Ok(())
}

/// Sample `sol` on `grid` and return the CSV text.
pub fn cmd_sample(sol: &dyn Solution, grid: &GridSpec) -> Result<String> {
    let field = verify::sample_field(sol, grid)?;
    let mut buf = Vec::new();
    write_csv(&field, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

/// Outcome of one verification check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    /// `None` when the check does not apply to the solution.
    pub passed: Option<bool>,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub tag: String,
    pub levels: Vec<usize>,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

/// Radical inverse of `i` in base `b`.
fn halton(mut i: usize, b: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `n` deterministic low-discrepancy points of the grid box.
pub fn box_points(grid: &GridSpec, n: usize) -> Vec<(f64, Vec3)> {
    let axes = grid.axes();
    let at = |k: usize, u: f64| axes[k].min + u * (axes[k].max - axes[k].min);
    (1..=n)
        .map(|i| (at(0, halton(i, 2)), Vec3::new(at(1, halton(i, 3)), at(2, halton(i, 5)), at(3, halton(i, 7)))))
        .collect()
}

fn skipped(check: Check, why: &str) -> CheckOutcome {
    CheckOutcome { check, passed: None, detail: json!({"skipped": why}) }
}

fn closed_form_check(
    check: Check,
    q: Quantity,
    sol: &dyn Solution,
    grid: &GridSpec,
    run: &RunConfig,
) -> Result<CheckOutcome> {
    Ok(match closed_form_convergence(sol, grid, &run.levels, q)? {
        None => skipped(check, "no closed form for this family"),
        Some(rep) => {
            let passed = rep.passes(run.thresholds.order);
            CheckOutcome { check, passed: Some(passed), detail: serde_json::to_value(&rep)? }
        }
    })
}

fn circulation_check(sol: &dyn Solution, grid: &GridSpec, run: &RunConfig) -> Result<CheckOutcome> {
    let axes = grid.axes();
    let mid = |k: usize| 0.5 * (axes[k].min + axes[k].max);
    let center = Vec3::new(mid(1), mid(2), mid(3));
    let finest = *run.levels.iter().max().unwrap_or(&64);
    let h = grid.at_level(finest).spacing()?;
    let radius = 0.1 * axes[1..].iter().map(|a| a.max - a.min).fold(0.0, f64::max).max(h);
    let curve = verify::circle(center, radius, Vec3::x(), Vec3::y(), 64);
    let t0 = match grid.t {
        TimeSpec::Slice(t) => t,
        TimeSpec::Range { t0, .. } => t0,
    };
    let gamma = verify::circulation(sol, &curve, t0, h, 10)?;
    let scale = gamma.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    let drift = gamma.iter().map(|g| (g - gamma[0]).abs()).fold(0.0, f64::max) / scale;
    Ok(CheckOutcome {
        check: Check::Circulation,
        passed: Some(drift <= run.thresholds.circulation),
        detail: json!({"values": gamma, "relative_drift": drift, "dt": h, "radius": radius}),
    })
}

fn rank_check(sol: &dyn Solution, grid: &GridSpec) -> Result<CheckOutcome> {
    let bound = sol.rank_bound();
    let mut worst = 0;
    let mut evaluated = 0;
    for (t, x) in box_points(grid, 100) {
        if let Ok(r) = jacobian_rank(sol, t, &x) {
            worst = worst.max(r);
            evaluated += 1;
        }
    }
    Ok(CheckOutcome {
        check: Check::Rank,
        passed: Some(evaluated > 0 && worst <= bound),
        detail: json!({"max_rank": worst, "bound": bound, "points": evaluated}),
    })
}

/// Run the configured checks on an already constructed solution.
pub fn verify_solution(built: &Built, sol: &dyn Solution, run: &RunConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let mut pde = None;
    for &check in &run.checks {
        let grid = run.grid()?;
        let outcome = match check {
            Check::Pde | Check::DivH => {
                if pde.is_none() {
                    pde = Some(convergence_order(sol, grid, &run.levels)?);
                }
                let rep = pde.as_ref().expect("computed above");
                if check == Check::Pde {
                    CheckOutcome {
                        check,
                        passed: Some(rep.passes(run.thresholds.order)),
                        detail: serde_json::to_value(rep)?,
                    }
                } else {
                    let line = rep.get("div_h").expect("div_h is reported");
                    let passed = line.order.is_some_and(|o| o.passes(run.thresholds.order));
                    CheckOutcome { check, passed: Some(passed), detail: serde_json::to_value(line)? }
                }
            }
            Check::Lorentz => closed_form_check(check, Quantity::LorentzForce, sol, grid, run)?,
            Check::Vorticity => closed_form_check(check, Quantity::Vorticity, sol, grid, run)?,
            Check::Current => closed_form_check(check, Quantity::Current, sol, grid, run)?,
            Check::Circulation => circulation_check(sol, grid, run)?,
            Check::Gmc => match built.as_double() {
                None => skipped(check, "simple wave"),
                Some(d) => {
                    let c = gmc_commutator_residual(d, 8)?;
                    let s = gmc_span_residual(d, 8)?;
                    let tol = run.thresholds.gmc;
                    // entropic pairs are not strict: their wave vectors may leave the span
                    let strict = !(d.pair.0.is_entropic() && d.pair.1.is_entropic());
                    let passed = c <= tol && (!strict || s <= tol);
                    CheckOutcome { check, passed: Some(passed), detail: json!({"commutator": c, "span": s, "span_required": strict}) }
                }
            },
            Check::Rank => rank_check(sol, grid)?,
        };
        checks.push(outcome);
    }
    let passed = checks.iter().all(|c| c.passed != Some(false));
    Ok(VerifyReport { tag: sol.tag().to_string(), levels: run.levels.clone(), passed, checks })
}

/// Build and verify; construction and sampling errors keep their exit codes.
pub fn cmd_verify(run: &RunConfig) -> std::result::Result<VerifyReport, Failure> {
    let cfg = run.solution().map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let built = build(cfg)?;
    let perturbed;
    let sol: &dyn Solution = match run.perturbation {
        Some(a) => {
            perturbed = verify::Perturbed { inner: built.solution(), amplitude: a };
            &perturbed
        }
        None => built.solution(),
    };
    verify_solution(&built, sol, run).map_err(|e| match e {
        Error::Sampling(_) => Failure::new(EXIT_SAMPLING, e),
        Error::Config(_) => Failure::new(EXIT_INPUT, e),
        e => Failure::new(EXIT_VERIFICATION, e),
    })
}

/// Text and JSON renderings of the existence table.
pub fn cmd_table1() -> (String, Value) {
    let t = existence_table();
    let mut text = String::from("   ");
    for f in TABLE_FAMILIES {
        text.push_str(&format!(" {f}"));
    }
    text.push('\n');
    let mut rows = Vec::new();
    let mut cover = Vec::new();
    for (i, fi) in TABLE_FAMILIES.iter().enumerate() {
        text.push_str(&format!("{fi}  "));
        let mut row = Vec::new();
        for (j, fj) in TABLE_FAMILIES.iter().enumerate() {
            let sym = if t[i][j] { "+" } else { "-" };
            text.push_str(&format!(" {sym}"));
            row.push(sym);
            if t[i][j] && j >= i {
                cover.push((format!("{fi}{fj}"), covering_constructors(i, j)));
            }
        }
        text.push('\n');
        rows.push(row);
    }
    text.push('\n');
    for (pair, names) in &cover {
        text.push_str(&format!("{pair}: {}\n", names.join(", ")));
    }
    let json = json!({
        "families": TABLE_FAMILIES,
        "table": rows,
        "constructors": cover.iter().map(|(p, n)| (p.clone(), json!(n))).collect::<serde_json::Map<_, _>>(),
    });
    (text, json)
}

fn execute(cli: Cli) -> std::result::Result<i32, Failure> {
    match cli.command {
        Command::Table1 { out, .. } => {
            let (text, json) = cmd_table1();
            print!("{text}");
            if let Some(p) = out {
                emit(Some(&p), &pretty(&json))?;
            }
            Ok(EXIT_OK)
        }
        Command::Eigen(io) => {
            let text = fs::read_to_string(&io.config).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", io.config.display())))?;
            let run = RunConfig::parse(&text).map_err(|e| Failure::new(EXIT_INPUT, e))?;
            let input = match run.eigen {
                Some(i) => i,
                None => serde_json::from_str::<EigenInput>(&text)
                    .map_err(|e| Failure::new(EXIT_INPUT, format!("config has no eigen input: {e}")))?,
            };
            let out = cmd_eigen(&input).map_err(|e| Failure::new(EXIT_INPUT, e))?;
            emit(io.out.as_deref(), &pretty(&out))?;
            Ok(EXIT_OK)
        }
        Command::Construct(io) => {
            let run = read_config(&io.config)?;
            let cfg = run.solution().map_err(|e| Failure::new(EXIT_INPUT, e))?;
            let built = build(cfg)?;
            if let (Some(path), Some(table)) = (&run.output.beta_csv, built.as_double().and_then(|d| d.ae1_table())) {
                let f = fs::File::create(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{path}: {e}")))?;
                table.write_csv(std::io::BufWriter::new(f)).map_err(|e| Failure::new(EXIT_INPUT, e))?;
            }
            let out = io.out.or(run.output.manifest.map(PathBuf::from));
            emit(out.as_deref(), &pretty(&cmd_construct(&built)))?;
            Ok(EXIT_OK)
        }
        Command::Sample(io) => {
            let run = read_config(&io.config)?;
            let cfg = run.solution().map_err(|e| Failure::new(EXIT_INPUT, e))?;
            let grid = run.grid().map_err(|e| Failure::new(EXIT_INPUT, e))?;
            let built = build(cfg)?;
            let csv = cmd_sample(built.solution(), grid).map_err(|e| match e {
                Error::Verification(_) => Failure::new(EXIT_INPUT, e),
                e => Failure::new(EXIT_SAMPLING, e),
            })?;
            let out = io.out.or(run.output.csv.map(PathBuf::from));
            emit(out.as_deref(), &csv)?;
            Ok(EXIT_OK)
        }
        Command::Verify(io) => {
            let run = read_config(&io.config)?;
            let report = cmd_verify(&run)?;
            let out = io.out.or(run.output.report.map(PathBuf::from));
            emit(out.as_deref(), &pretty(&report))?;
            if report.passed {
                Ok(EXIT_OK)
            } else {
                eprintln!("verification failed for {}", report.tag);
                Ok(EXIT_VERIFICATION)
            }
        }
    }
}

/// Parse arguments, run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = match env_threads() {
        Ok(t) => t,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    match with_threads(threads, || execute(cli)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
