//! Batch command-line front end: `gen-path`, `solve`, `verify`, `study`.
//!
//! Every command takes `--config <file.json> --out <dir>`. Configs carry a
//! `schema_version` (currently 1). A driver is given either inline as an fBm
//! spec (`"driver": {...}`) or as a directory written by `gen-path`
//! (`"driver_dir": "..."`, relative to the config file).
//!
//! Exit codes: 0 pass, 1 check failure, 2 insufficient data, 3 config or IO error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    convergence_study, gap_study, global_holder_report, ito_stratonovich_study, scaling_study, Exponents,
    GapOptions, ScalingOptions, StandardField, TestFunction,
};
use crate::coefficients::{default_domain, verify_hypotheses, CoefficientSpec, PowerCoefficient};
use crate::error::{Error, Result};
use crate::increments::{product_rule_check, Inc1, Inc2Grid, TimeGrid};
use crate::io::{read_rough_path, write_rough_path, write_solution, PathMeta, SCHEMA_VERSION};
use crate::roughpath::{lift_piecewise_linear, FbmSpec, RoughPath};
use crate::sewing::{discrete_sewing_check, recenter};
use crate::solver::{solve_1d_lamperti, solve_md_davie, Case, SolverParams, ZeroMode};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INSUFFICIENT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "roughpower", version, about = "Rough differential equations with power-type coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Io {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample an fBm rough path and write path.csv, area.csv, meta.json.
    GenPath(Io),
    /// Solve an equation and write solution.csv and shells.json.
    Solve(Io),
    /// Run Chen, symmetry, hypothesis, product-rule and sewing checks.
    Verify(Io),
    /// Run a regression study and write report.json and report.csv.
    Study(Io),
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InsufficientShells { .. } | Error::DegenerateSampling(_) | Error::NoConvergence { .. } => {
            EXIT_INSUFFICIENT
        }
        _ => EXIT_CONFIG,
    }
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let outcome = match &cli.command {
        Command::GenPath(io) => cmd_gen_path(&io.config, &io.out),
        Command::Solve(io) => cmd_solve(&io.config, &io.out),
        Command::Verify(io) => cmd_verify(&io.config, &io.out),
        Command::Study(io) => cmd_study(&io.config, &io.out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let name = match &e {
                Error::InsufficientShells { .. } => "InsufficientShells: ",
                _ => "",
            };
            eprintln!("error: {name}{e}");
            exit_code(&e)
        }
    }
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => return Err(Error::Config(format!("unsupported schema_version {v}"))),
        None => return Err(Error::Config("config lacks schema_version".into())),
    }
    Ok(serde_json::from_value(value)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct GenPathConfig {
    pub schema_version: u32,
    pub driver: FbmSpec,
}

/// Where a command takes its driver from.
#[derive(Debug, Clone, Default)]
pub struct DriverSource {
    pub driver: Option<FbmSpec>,
    pub driver_dir: Option<PathBuf>,
}

fn source(driver: &Option<FbmSpec>, driver_dir: &Option<PathBuf>) -> DriverSource {
    DriverSource {
        driver: driver.clone(),
        driver_dir: driver_dir.clone(),
    }
}

struct LoadedDriver {
    rp: RoughPath,
    /// Stored or independently recomputed `(i, j, X_ij)` for the Chen check.
    checkpoints: Vec<(usize, usize, Vec<f64>)>,
}

impl DriverSource {
    fn load(&self, base: &Path, with_checkpoints: bool) -> Result<LoadedDriver> {
        match (&self.driver, &self.driver_dir) {
            (Some(spec), None) => {
                let fine = spec.sample_fine()?;
                let coarse = TimeGrid::uniform(spec.n, spec.horizon)?;
                let rp = lift_piecewise_linear(&fine, &coarse, spec.gamma())?;
                let checkpoints = if with_checkpoints {
                    independent_checkpoints(&fine, &coarse, spec)?
                } else {
                    Vec::new()
                };
                Ok(LoadedDriver { rp, checkpoints })
            }
            (None, Some(dir)) => {
                let stored = read_rough_path(&base.join(dir))?;
                Ok(LoadedDriver {
                    rp: stored.rough_path,
                    checkpoints: stored.checkpoints,
                })
            }
            _ => Err(Error::Config("give exactly one of \"driver\" or \"driver_dir\"".into())),
        }
    }
}

/// Second-level values over a few long intervals, lifted directly from the
/// fine path rather than composed from the coarse blocks.
fn independent_checkpoints(
    fine: &Inc1,
    coarse: &TimeGrid,
    spec: &FbmSpec,
) -> Result<Vec<(usize, usize, Vec<f64>)>> {
    let n = spec.n;
    let mut out = Vec::new();
    for (i, j) in [(0, n), (0, n / 2), (n / 2, n), (n / 4, 3 * n / 4)] {
        if j <= i + 1 {
            continue;
        }
        let mut pts = vec![0.0];
        if i > 0 {
            pts.push(coarse.t(i));
        }
        pts.push(coarse.t(j));
        if j < n {
            pts.push(coarse.horizon());
        }
        let lifted = lift_piecewise_linear(fine, &TimeGrid::new(pts)?, spec.gamma())?;
        out.push((i, j, lifted.x2_block(usize::from(i > 0)).to_vec()));
    }
    Ok(out)
}

fn config_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn cmd_gen_path(config: &Path, out: &Path) -> Result<i32> {
    let cfg: GenPathConfig = read_config(config)?;
    let spec = cfg.driver;
    let rp = spec.rough_path()?;
    let meta = PathMeta {
        hurst: Some(spec.hurst),
        seed: Some(spec.seed),
        refine_factor: Some(spec.refine),
        method: Some(spec.method),
        ..PathMeta::for_path(&rp)
    };
    write_rough_path(out, &rp, &meta)?;
    println!("wrote {} points of a {}-dimensional path to {}", rp.len(), rp.dim(), out.display());
    Ok(EXIT_PASS)
}

#[derive(Deserialize, Serialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    #[default]
    Md,
    Lamperti,
}

/// Solver knobs shared by `solve` and `study`.
#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SolveSpec {
    #[serde(default)]
    pub mode: SolveMode,
    pub initial: Vec<f64>,
    #[serde(default)]
    pub zero_mode: ZeroMode,
    #[serde(default)]
    pub c0: Option<f64>,
    #[serde(default)]
    pub zero_threshold: Option<f64>,
    #[serde(default)]
    pub max_stride: Option<usize>,
    #[serde(default)]
    pub max_steps: Option<usize>,
    /// In lamperti mode, also run the multi-dimensional scheme and log the
    /// relative sup difference.
    #[serde(default = "yes")]
    pub cross_check: bool,
}

fn yes() -> bool {
    true
}

impl SolveSpec {
    fn params(&self, gamma: f64, kappa: f64) -> Result<SolverParams> {
        let mut p = SolverParams::new(gamma, kappa)?;
        if let Some(c0) = self.c0 {
            p.c0 = c0;
        }
        if let Some(z) = self.zero_threshold {
            p.zero_threshold = z;
        }
        if let Some(s) = self.max_stride {
            p.max_stride = s;
        }
        if let Some(s) = self.max_steps {
            p.max_steps = s;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub driver: Option<FbmSpec>,
    #[serde(default)]
    pub driver_dir: Option<PathBuf>,
    pub coefficient: CoefficientSpec,
    pub solver: SolveSpec,
}

pub fn cmd_solve(config: &Path, out: &Path) -> Result<i32> {
    let cfg: SolveConfig = read_config(config)?;
    let rp = source(&cfg.driver, &cfg.driver_dir).load(&config_dir(config), false)?.rp;
    let pc = PowerCoefficient::from_spec(&cfg.coefficient)?;
    let params = cfg.solver.params(rp.gamma(), pc.kappa())?;
    fs::create_dir_all(out)?;
    match cfg.solver.mode {
        SolveMode::Md => {
            let sp = solve_md_davie(&pc, &cfg.solver.initial, &rp, &params)?;
            write_solution(out, &sp, "solution", "shells")?;
            println!("case: {:?}", sp.case);
        }
        SolveMode::Lamperti => {
            let a = match cfg.solver.initial.as_slice() {
                [a] => *a,
                other => {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: other.len(),
                    })
                }
            };
            let sol = solve_1d_lamperti(&pc, a, rp.x(), cfg.solver.zero_mode)?;
            write_solution(out, &sol.solution, "solution", "shells")?;
            println!("case: {:?}", sol.solution.case);
            if let Some(trivial) = &sol.trivial {
                write_solution(out, trivial, "solution_trivial", "shells_trivial")?;
                println!("zero initial value: wrote the trivial solution as well");
            }
            if cfg.solver.cross_check && a > 0.0 {
                let md = solve_md_davie(&pc, &[a], &rp, &params)?;
                let mut diff = 0.0f64;
                let mut scale = 0.0f64;
                for (p, &i) in md.grid_indices.iter().enumerate() {
                    let exact = sol.solution.y.at(i)[0];
                    diff = diff.max((md.y.at(p)[0] - exact).abs());
                    scale = scale.max(exact.abs());
                }
                println!("cross-check: relative sup difference lamperti vs md = {:e}", diff / scale.max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(EXIT_PASS)
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub driver: Option<FbmSpec>,
    #[serde(default)]
    pub driver_dir: Option<PathBuf>,
    #[serde(default)]
    pub coefficient: Option<CoefficientSpec>,
    /// Seed for the random product-rule instance.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Serialize, Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Serialize, Debug, Clone)]
pub struct VerifyReport {
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
}

fn check(name: &str, pass: bool, value: f64, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        pass,
        value,
        detail: detail.into(),
    }
}

const CHEN_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-9;

/// Run every check on a driver and optional coefficient.
pub fn verify_report(
    rp: &RoughPath,
    checkpoints: &[(usize, usize, Vec<f64>)],
    coefficient: Option<&PowerCoefficient>,
    seed: u64,
) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    if !checkpoints.is_empty() {
        let r = rp.chen_residual(checkpoints)?;
        checks.push(check("chen", r <= CHEN_TOL, r, format!("relative Chen defect over {} checkpoints", checkpoints.len())));
    }
    let s = rp.symmetry_residual();
    checks.push(check("symmetry", s <= SYMMETRY_TOL, s, "relative |Sym X - dx dx / 2|"));
    let probe = probe_path(rp)?;
    let norm = probe.rough_norm(rp.gamma())?;
    checks.push(check("rough_norm", norm.is_finite(), norm, format!("|x|_gamma + |X|_2gamma on {} probe points", probe.len())));

    if let Some(pc) = coefficient {
        let report = verify_hypotheses(pc, rp.gamma(), &default_domain(pc))?;
        for c in report.checks {
            checks.push(check(&c.name, c.pass, c.worst, c.detail));
        }
    }

    let (g, h) = random_product_instance(seed)?;
    let pr = product_rule_check(&g, &h)?;
    checks.push(check("product_rule", pr <= 1e-12, pr, "delta(g h) = g delta h - delta g h on a random instance"));

    let mu = 3.0 * rp.gamma();
    if mu > 1.0 {
        let germ = integral_germ(&probe);
        let sc = discrete_sewing_check(&recenter(&germ), mu)?;
        checks.push(check(
            "sewing",
            sc.pass,
            sc.lhs / sc.rhs,
            format!("|R|_mu = {:e} <= K_mu |delta R|_mu = {:e}, mu = {mu}", sc.lhs, sc.rhs),
        ));
    } else {
        checks.push(check("sewing", false, mu, "3 gamma <= 1: the rough-integral germ cannot be sewn"));
    }
    Ok(VerifyReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

/// The driver restricted to at most 65 points.
fn probe_path(rp: &RoughPath) -> Result<RoughPath> {
    let n = rp.len() - 1;
    let stride = n.div_ceil(64).max(1);
    let mut idx: Vec<usize> = (0..=n).step_by(stride).collect();
    if *idx.last().unwrap() != n {
        idx.push(n);
    }
    rp.select(&idx)
}

/// `sin(x_s) dx_{st} + cos(x_s) X_{st}` in the first coordinate.
fn integral_germ(rp: &RoughPath) -> Inc2Grid {
    Inc2Grid::from_fn(rp.grid().clone(), 1, |i, j, out| {
        let xs = rp.x().at(i)[0];
        let dx = rp.increment(i, j)[0];
        let area = rp.chen_extend(i, j).expect("ordered pair")[0];
        out[0] = xs.sin() * dx + xs.cos() * area;
    })
}

fn random_product_instance(seed: u64) -> Result<(Inc1, Inc2Grid)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![0.0];
    for _ in 0..11 {
        let last = *pts.last().unwrap();
        pts.push(last + rng.gen_range(0.05..1.0));
    }
    let grid = TimeGrid::new(pts)?;
    let gv: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let g = Inc1::scalar(grid.clone(), gv)?;
    let h = Inc2Grid::from_fn(grid, 1, |_, _, out| out[0] = rng.gen_range(-1.0..1.0));
    Ok((g, h))
}

pub fn cmd_verify(config: &Path, out: &Path) -> Result<i32> {
    let cfg: VerifyConfig = read_config(config)?;
    let driver = source(&cfg.driver, &cfg.driver_dir).load(&config_dir(config), true)?;
    let pc = cfg.coefficient.as_ref().map(PowerCoefficient::from_spec).transpose()?;
    let report = verify_report(&driver.rp, &driver.checkpoints, pc.as_ref(), cfg.seed)?;
    fs::create_dir_all(out)?;
    write_json(&out.join("verify.json"), &report)?;
    for c in &report.checks {
        println!("{} {}: {:e} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.detail);
    }
    Ok(if report.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

#[derive(Deserialize, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Scaling,
    Gaps,
    ItoStratonovich,
    Convergence,
    GlobalHolder,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub schema_version: u32,
    pub study: StudyKind,
    #[serde(default)]
    pub driver: Option<FbmSpec>,
    #[serde(default)]
    pub driver_dir: Option<PathBuf>,
    #[serde(default)]
    pub coefficient: Option<CoefficientSpec>,
    #[serde(default)]
    pub solver: Option<SolveSpec>,
    #[serde(default)]
    pub eps1: Option<f64>,
    #[serde(default)]
    pub eps2: Option<f64>,
    #[serde(default)]
    pub q_min: Option<i32>,
    #[serde(default)]
    pub q_max: Option<i32>,
    #[serde(default)]
    pub min_shells: Option<usize>,
    #[serde(default)]
    pub depths: Vec<u32>,
    #[serde(default)]
    pub functions: Vec<StandardField>,
    #[serde(default)]
    pub strides: Vec<usize>,
}

impl StudyConfig {
    fn needs<'a, T>(&self, v: &'a Option<T>, what: &str) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| Error::Config(format!("{:?} study needs \"{what}\"", self.study)))
    }

    fn exponents(&self, gamma: f64, kappa: f64) -> Result<Exponents> {
        let mut e = match self.eps1 {
            Some(eps1) => Exponents::with_eps1(gamma, kappa, eps1)?,
            None => Exponents::new(gamma, kappa)?,
        };
        if let Some(eps2) = self.eps2 {
            e.eps2 = eps2;
            e.validate()?;
        }
        Ok(e)
    }
}

pub fn cmd_study(config: &Path, out: &Path) -> Result<i32> {
    let cfg: StudyConfig = read_config(config)?;
    let rp = source(&cfg.driver, &cfg.driver_dir).load(&config_dir(config), false)?.rp;
    fs::create_dir_all(out)?;
    let pass = match cfg.study {
        StudyKind::ItoStratonovich => {
            let depths = if cfg.depths.is_empty() { (8..=14).collect() } else { cfg.depths.clone() };
            let fields = if cfg.functions.is_empty() { vec![StandardField::Sin] } else { cfg.functions.clone() };
            let instances: Vec<_> = fields.iter().map(|f| f.on(rp.dim())).collect();
            let suite: Vec<TestFunction> = fields
                .iter()
                .zip(&instances)
                .map(|(f, inst)| TestFunction {
                    name: f.name(),
                    field: inst,
                    lambda: f.lambda(),
                })
                .collect();
            let table = ito_stratonovich_study(&rp, &suite, &depths)?;
            let mut csv = String::from("function,depth,sup_residual,fitted_order\n");
            for row in &table.rows {
                let order = table.orders.iter().find(|o| o.0 == row.function).and_then(|o| o.1);
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    row.function,
                    row.depth,
                    row.sup_residual,
                    order.map(|o| o.to_string()).unwrap_or_default()
                ));
            }
            fs::write(out.join("report.csv"), csv)?;
            write_json(&out.join("report.json"), &table)?;
            let target = 3.0 * rp.gamma() - 1.0 - 0.1;
            for (name, order) in &table.orders {
                match order {
                    Some(o) => println!("{name}: fitted order {o:.3} (reference 3 gamma - 1 = {:.3})", target + 0.1),
                    None => println!("{name}: residuals at rounding level"),
                }
            }
            table.orders.iter().all(|(_, o)| o.is_none_or(|o| o >= target))
        }
        kind => {
            let pc = PowerCoefficient::from_spec(cfg.needs(&cfg.coefficient, "coefficient")?)?;
            let solve = cfg.needs(&cfg.solver, "solver")?;
            let params = solve.params(rp.gamma(), pc.kappa())?;
            match kind {
                StudyKind::Scaling | StudyKind::Gaps => {
                    let exps = cfg.exponents(rp.gamma(), pc.kappa())?;
                    let sp = solve_md_davie(&pc, &solve.initial, &rp, &params)?;
                    println!("case: {:?}, {} shells", sp.case, sp.shells.len());
                    if kind == StudyKind::Scaling {
                        let mut opts = ScalingOptions {
                            c0: params.c0,
                            ..Default::default()
                        };
                        opts.q_min = cfg.q_min.unwrap_or(opts.q_min);
                        opts.q_max = cfg.q_max.unwrap_or(opts.q_max);
                        opts.min_shells = cfg.min_shells.unwrap_or(opts.min_shells);
                        let report = scaling_study(&sp, &rp, &pc, &exps, &opts)?;
                        fs::write(out.join("report.csv"), report.to_csv())?;
                        write_json(&out.join("report.json"), &report)?;
                        for c in [&report.y_slope, &report.remainder_slope, &report.r_slope] {
                            println!(
                                "{}: slope {:.3} +- {:.3}, target {:.3}",
                                c.quantity, c.fit.slope, c.fit.slope_stderr, c.target
                            );
                        }
                        report.y_slope.pass && report.remainder_slope.pass
                    } else {
                        let mut opts = GapOptions::default();
                        opts.q_min = cfg.q_min.unwrap_or(opts.q_min);
                        opts.q_max = cfg.q_max;
                        opts.min_gaps = cfg.min_shells.unwrap_or(opts.min_gaps);
                        let report = gap_study(&sp.shells, &exps, &opts)?;
                        let mut csv = String::from("q,gap,slope,slope_stderr,band_low,band_high\n");
                        for (q, g) in &report.gaps {
                            csv.push_str(&format!(
                                "{q},{g},{},{},{},{}\n",
                                report.fit.slope, report.fit.slope_stderr, report.band.0, report.band.1
                            ));
                        }
                        fs::write(out.join("report.csv"), csv)?;
                        write_json(&out.join("report.json"), &report)?;
                        println!(
                            "gap exponent {:.3} +- {:.3}, band [{:.3}, {:.3}]",
                            report.fit.slope, report.fit.slope_stderr, report.band.0, report.band.1
                        );
                        report.pass
                    }
                }
                StudyKind::Convergence => {
                    let strides = if cfg.strides.is_empty() { vec![2, 4, 8, 16, 32] } else { cfg.strides.clone() };
                    let report = convergence_study(&pc, &solve.initial, &rp, &params, &strides)?;
                    let mut csv = String::from("stride,mesh,error,order\n");
                    for (s, h, e) in &report.levels {
                        csv.push_str(&format!("{s},{h},{e},{}\n", report.order.slope));
                    }
                    fs::write(out.join("report.csv"), csv)?;
                    write_json(&out.join("report.json"), &report)?;
                    println!("self-convergence order {:.3}", report.order.slope);
                    report.order.slope >= 3.0 * rp.gamma() - 1.0 - 0.1
                }
                StudyKind::GlobalHolder => {
                    let fine = solve_md_davie(&pc, &solve.initial, &rp, &params)?;
                    let coarse = solve_md_davie(&pc, &solve.initial, &rp.restrict(2)?, &params)?;
                    let report = global_holder_report(&coarse, &fine, rp.gamma());
                    write_json(&out.join("report.json"), &report)?;
                    fs::write(
                        out.join("report.csv"),
                        format!("coarse,fine,growth\n{},{},{}\n", report.coarse, report.fine, report.growth),
                    )?;
                    println!("global seminorm {:.4} -> {:.4} (growth {:.3})", report.coarse, report.fine, report.growth);
                    if fine.case == Case::B {
                        println!("solution reaches zero at t = {:?}", fine.zero_time());
                    }
                    report.pass
                }
                StudyKind::ItoStratonovich => unreachable!(),
            }
        }
    };
    Ok(if pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
}
