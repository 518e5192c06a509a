//! Empirical exponent studies on solver output.
//!
//! All fits are ordinary least squares of `log2(quantity)` against an
//! integer level (shell index `q` or dyadic depth), one point per shell or
//! per level.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::PowerCoefficient;
use crate::controlled::{ito_stratonovich_residual, ScalarField};
use crate::error::{Error, Result};
use crate::increments::{norm, path_seminorm};
use crate::roughpath::RoughPath;
use crate::solver::{solve_md_davie, Case, ShellTrace, SolutionPath, SolverParams};

/// Least-squares line with the standard error of the slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub n: usize,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<Fit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InsufficientShells { found: n, required: 2 });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateSampling("all regressors are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(Fit {
        slope,
        intercept,
        slope_stderr,
        n,
    })
}

/// Driver exponent `gamma`, coefficient exponent `kappa` and the two small
/// parameters used by the refined bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub gamma: f64,
    pub kappa: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl Exponents {
    /// `eps1 = 0.05` and `eps2` at 90% of its admissible bound.
    pub fn new(gamma: f64, kappa: f64) -> Result<Self> {
        Self::with_eps1(gamma, kappa, 0.05)
    }

    pub fn with_eps1(gamma: f64, kappa: f64, eps1: f64) -> Result<Self> {
        let mut e = Self {
            gamma,
            kappa,
            eps1,
            eps2: 0.0,
        };
        e.eps2 = 0.9 * e.eps2_bound();
        e.validate()?;
        Ok(e)
    }

    pub fn alpha(&self) -> f64 {
        (1.0 - self.kappa) / self.gamma
    }

    /// `min(kappa / (1 - gamma), eps1 alpha / (gamma + eps1))`.
    pub fn eps2_bound(&self) -> f64 {
        (self.kappa / (1.0 - self.gamma)).min(self.eps1 * self.alpha() / (self.gamma + self.eps1))
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma + self.eps1
    }
    pub fn kappa_eps1(&self) -> f64 {
        self.kappa + 2.0 * self.eps1 * self.alpha()
    }
    pub fn kappa_minus_eps2(&self) -> f64 {
        self.kappa - (1.0 - self.gamma) * self.eps2
    }
    pub fn kappa_eps1_eps2(&self) -> f64 {
        self.kappa + 2.0 * self.alpha() * self.eps1 - self.gamma * self.eps2 - 2.0 * self.eps1 * self.eps2
    }
    pub fn mu_eps2(&self) -> f64 {
        1.0 + 2.0 * self.alpha() * self.eps1 - 2.0 * (self.gamma + self.eps1) * self.eps2
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 / 3.0 && self.gamma <= 1.0) || !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::Config(format!(
                "exponents out of range: gamma = {}, kappa = {}",
                self.gamma, self.kappa
            )));
        }
        if self.kappa + self.gamma <= 1.0 {
            return Err(Error::Config(format!(
                "kappa + gamma = {} must exceed 1",
                self.kappa + self.gamma
            )));
        }
        if !(self.eps1 > 0.0) {
            return Err(Error::Config(format!("eps1 must be positive, got {}", self.eps1)));
        }
        let bound = self.eps2_bound();
        if !(self.eps2 > 0.0 && self.eps2 < bound) {
            return Err(Error::Config(format!(
                "eps2 = {} must lie in (0, {bound})",
                self.eps2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScalingOptions {
    pub q_min: i32,
    pub q_max: i32,
    /// Step-control constant defining the per-shell window `c0 2^{-alpha q}`.
    pub c0: f64,
    pub min_shells: usize,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            q_min: 3,
            q_max: 12,
            c0: 0.5,
            min_shells: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellRecord {
    pub k: usize,
    pub q: i32,
    pub lambda: f64,
    pub lambda_next: f64,
    pub samples: usize,
    /// Longest time lag used in this shell.
    pub window: f64,
    pub pairs: usize,
    /// `sup |dy| / |t - s|^gamma`.
    pub y_gamma: f64,
    /// `sup |R| / |t - s|^{3 gamma}`.
    pub remainder_3gamma: f64,
    /// `sup |r| / |t - s|^gamma` with `r = (D sigma . sigma)(y) X + R`.
    pub r_gamma: f64,
    /// `sup |(D sigma . sigma)(y_s) X_{st}| / |t - s|^gamma`.
    pub area_part_gamma: f64,
    /// `sup |R| / |t - s|^gamma`.
    pub remainder_gamma: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeComparison {
    pub quantity: String,
    pub fit: Fit,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityReport {
    pub exponents: Exponents,
    pub options: ScalingOptions,
    pub records: Vec<ShellRecord>,
    pub y_slope: SlopeComparison,
    pub remainder_slope: SlopeComparison,
    pub r_slope: SlopeComparison,
    /// `2^intercept` of the three fits, empirical stand-ins for the
    /// constants in front of the geometric decays.
    pub fitted_constants: [f64; 3],
}

impl RegularityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "k,q,lambda,lambda_next,samples,window,pairs,y_gamma,remainder_3gamma,r_gamma,area_part_gamma,remainder_gamma,\
             y_slope,y_slope_stderr,remainder_slope,remainder_slope_stderr,r_slope,r_slope_stderr\n",
        );
        let slopes = [&self.y_slope, &self.remainder_slope, &self.r_slope]
            .iter()
            .map(|c| format!("{},{}", c.fit.slope, c.fit.slope_stderr))
            .collect::<Vec<_>>()
            .join(",");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{slopes}\n",
                r.k,
                r.q,
                r.lambda,
                r.lambda_next,
                r.samples,
                r.window,
                r.pairs,
                r.y_gamma,
                r.remainder_3gamma,
                r.r_gamma,
                r.area_part_gamma,
                r.remainder_gamma
            ));
        }
        out
    }
}

fn compare(quantity: &str, xs: &[f64], ys: &[f64], target: f64, tolerance: f64) -> Result<SlopeComparison> {
    let fit = ols(xs, ys)?;
    Ok(SlopeComparison {
        quantity: quantity.into(),
        pass: (fit.slope - target).abs() <= tolerance,
        fit,
        target,
        tolerance,
    })
}

/// Largest dyadic multiple of the base mesh not exceeding `bound`.
fn dyadic_window(mesh: f64, bound: f64) -> f64 {
    let mut w = mesh;
    while 2.0 * w <= bound * (1.0 + 1e-12) {
        w *= 2.0;
    }
    w
}

/// Per-shell seminorms of the solution, its remainder and the
/// `gamma`-level remainder, regressed against the shell index.
///
/// Only complete shells (ending at a recorded `lambda_{k+1}`) with `q_k` in
/// `[q_min, q_max]` contribute. Pairs are restricted to the shell and to lags
/// within the largest dyadic window below `c0 2^{-alpha q_k}`.
pub fn scaling_study(
    sp: &SolutionPath,
    rp: &RoughPath,
    pc: &PowerCoefficient,
    exps: &Exponents,
    opts: &ScalingOptions,
) -> Result<RegularityReport> {
    exps.validate()?;
    let gamma = exps.gamma;
    let alpha = exps.alpha();
    let times = sp.times();
    let mesh = rp.grid().t(1) - rp.grid().t(0);
    let (m, d) = (pc.m(), pc.d());
    let mut pos_of = vec![usize::MAX; rp.len()];
    for (p, &i) in sp.grid_indices.iter().enumerate() {
        pos_of[i] = p;
    }
    let shells: Vec<usize> = (0..sp.shells.len().saturating_sub(1))
        .filter(|&k| {
            let q = sp.shells.entries[k].q;
            q >= opts.q_min && q <= opts.q_max
        })
        .collect();
    let records: Vec<ShellRecord> = shells
        .par_iter()
        .map(|&k| {
            let e = &sp.shells.entries[k];
            let (a, b) = sp.shells.span(k, sp.y.len());
            let window = dyadic_window(mesh, opts.c0 * 2f64.powf(-alpha * e.q as f64));
            let mut rec = ShellRecord {
                k,
                q: e.q,
                lambda: e.lambda,
                lambda_next: sp.shells.entries[k + 1].lambda,
                samples: b - a,
                window,
                pairs: 0,
                y_gamma: 0.0,
                remainder_3gamma: 0.0,
                r_gamma: 0.0,
                area_part_gamma: 0.0,
                remainder_gamma: 0.0,
            };
            let mut dss = vec![0.0; m * d * d];
            let mut sig = vec![0.0; m * d];
            for p in a..b {
                let ys = sp.y.at(p);
                if norm(ys) == 0.0 {
                    continue;
                }
                pc.sigma_into(ys, &mut sig);
                pc.dsigma_sigma_into(ys, &mut dss).expect("nonzero state");
                let i = sp.grid_indices[p];
                let last_time = times[p] + window * (1.0 + 1e-12);
                let last_pos = (p + 1..b).take_while(|&q| times[q] <= last_time).last();
                let Some(last_pos) = last_pos else { continue };
                let last_idx = sp.grid_indices[last_pos];
                rp.for_each_from(i, last_idx, |j, x2| {
                    let q = pos_of[j];
                    if q == usize::MAX || q >= b {
                        return;
                    }
                    let yt = sp.y.at(q);
                    let dt = times[q] - times[p];
                    let dx = rp.increment(i, j);
                    let mut dy2 = 0.0;
                    let mut big_r2 = 0.0;
                    let mut area2 = 0.0;
                    let mut small_r2 = 0.0;
                    for c in 0..m {
                        let dy = yt[c] - ys[c];
                        let lin: f64 = (0..d).map(|jj| sig[c * d + jj] * dx[jj]).sum();
                        let mut area = 0.0;
                        for l in 0..d {
                            for jj in 0..d {
                                area += dss[(c * d + l) * d + jj] * x2[l * d + jj];
                            }
                        }
                        let big_r = dy - lin - area;
                        dy2 += dy * dy;
                        big_r2 += big_r * big_r;
                        area2 += area * area;
                        small_r2 += (area + big_r) * (area + big_r);
                    }
                    let dg = dt.powf(gamma);
                    rec.pairs += 1;
                    rec.y_gamma = rec.y_gamma.max(dy2.sqrt() / dg);
                    rec.remainder_3gamma = rec.remainder_3gamma.max(big_r2.sqrt() / dt.powf(3.0 * gamma));
                    rec.r_gamma = rec.r_gamma.max(small_r2.sqrt() / dg);
                    rec.area_part_gamma = rec.area_part_gamma.max(area2.sqrt() / dg);
                    rec.remainder_gamma = rec.remainder_gamma.max(big_r2.sqrt() / dg);
                });
            }
            rec
        })
        .filter(|r| r.pairs > 0 && r.y_gamma > 0.0 && r.remainder_3gamma > 0.0)
        .collect();
    if records.len() < opts.min_shells {
        return Err(Error::InsufficientShells {
            found: records.len(),
            required: opts.min_shells,
        });
    }
    let qs: Vec<f64> = records.iter().map(|r| r.q as f64).collect();
    let log = |f: fn(&ShellRecord) -> f64| records.iter().map(|r| f(r).log2()).collect::<Vec<_>>();
    let y_slope = compare("y_gamma", &qs, &log(|r| r.y_gamma), -exps.kappa, 0.15)?;
    let remainder_slope = compare("remainder_3gamma", &qs, &log(|r| r.remainder_3gamma), 2.0 - 3.0 * exps.kappa, 0.25)?;
    let r_slope = compare("r_gamma", &qs, &log(|r| r.r_gamma), -exps.kappa_eps1(), 0.25)?;
    let fitted_constants = [
        2f64.powf(y_slope.fit.intercept),
        2f64.powf(remainder_slope.fit.intercept),
        2f64.powf(r_slope.fit.intercept),
    ];
    Ok(RegularityReport {
        exponents: *exps,
        options: *opts,
        records,
        y_slope,
        remainder_slope,
        r_slope,
        fitted_constants,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapOptions {
    pub q_min: i32,
    pub q_max: Option<i32>,
    pub tolerance: f64,
    pub min_gaps: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            q_min: 3,
            q_max: None,
            tolerance: 0.25,
            min_gaps: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    /// `(q_k, lambda_{k+1} - lambda_k)` for the shells used.
    pub gaps: Vec<(i32, f64)>,
    pub fit: Fit,
    /// `-alpha`.
    pub lower_reference: f64,
    /// `-(alpha - eps2)`.
    pub upper_reference: f64,
    pub band: (f64, f64),
    pub pass: bool,
}

/// Fit of `log2(lambda_{k+1} - lambda_k)` against `q_k`.
pub fn gap_study(shells: &ShellTrace, exps: &Exponents, opts: &GapOptions) -> Result<GapReport> {
    exps.validate()?;
    let gaps: Vec<(i32, f64)> = shells
        .gaps()
        .into_iter()
        .filter(|(q, g)| *q >= opts.q_min && opts.q_max.is_none_or(|m| *q <= m) && *g > 0.0)
        .collect();
    if gaps.len() < opts.min_gaps {
        return Err(Error::InsufficientShells {
            found: gaps.len(),
            required: opts.min_gaps,
        });
    }
    let xs: Vec<f64> = gaps.iter().map(|g| g.0 as f64).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.1.log2()).collect();
    let fit = ols(&xs, &ys)?;
    let alpha = exps.alpha();
    let band = (-alpha - opts.tolerance, -(alpha - exps.eps2) + opts.tolerance);
    Ok(GapReport {
        pass: fit.slope >= band.0 && fit.slope <= band.1,
        gaps,
        fit,
        lower_reference: -alpha,
        upper_reference: -(alpha - exps.eps2),
        band,
    })
}

/// Grid `gamma`-seminorm of a solution over its whole horizon.
pub fn global_holder(sp: &SolutionPath, gamma: f64) -> f64 {
    path_seminorm(sp.y.grid(), sp.y.dim(), sp.y.values(), gamma, usize::MAX)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GlobalHolderReport {
    pub coarse: f64,
    pub fine: f64,
    pub growth: f64,
    pub pass: bool,
}

/// Compare the global seminorm of the same solution computed on a grid and
/// on its refinement; passes when both are finite and growth is below 2.
pub fn global_holder_report(coarse: &SolutionPath, fine: &SolutionPath, gamma: f64) -> GlobalHolderReport {
    let c = global_holder(coarse, gamma);
    let f = global_holder(fine, gamma);
    let growth = if c > 0.0 { f / c } else if f == 0.0 { 1.0 } else { f64::INFINITY };
    GlobalHolderReport {
        coarse: c,
        fine: f,
        growth,
        pass: c.is_finite() && f.is_finite() && growth < 2.0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ItoStratonovichRow {
    pub function: String,
    pub depth: u32,
    pub sup_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ItoStratonovichTable {
    pub rows: Vec<ItoStratonovichRow>,
    /// Per function: decay order `-slope` of `log2(sup residual)` against depth
    /// (`None` when every residual is at rounding level).
    pub orders: Vec<(String, Option<f64>)>,
}

/// A named scalar test function with the Hölder order of its Hessian.
pub struct TestFunction<'a> {
    pub name: &'a str,
    pub field: &'a dyn ScalarField,
    pub lambda: f64,
}

/// Change-of-variables residuals at each depth and their fitted decay order.
pub fn ito_stratonovich_study(rp: &RoughPath, suite: &[TestFunction], depths: &[u32]) -> Result<ItoStratonovichTable> {
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    for f in suite {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &depth in depths {
            let res = ito_stratonovich_residual(f.field, rp, depth, f.lambda)?;
            rows.push(ItoStratonovichRow {
                function: f.name.to_string(),
                depth,
                sup_residual: res.sup,
            });
            if res.sup > 1e-13 {
                xs.push(depth as f64);
                ys.push(res.sup.log2());
            }
        }
        let order = if xs.len() >= 2 { Some(-ols(&xs, &ys)?.slope) } else { None };
        orders.push((f.name.to_string(), order));
    }
    Ok(ItoStratonovichTable { rows, orders })
}

/// Smooth test functions `g(x) = sum_i f(x_i)` for change-of-variables studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardField {
    Sin,
    Cos,
    Quadratic,
    Cubic,
}

impl StandardField {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Quadratic => "quadratic",
            Self::Cubic => "cubic",
        }
    }

    /// Hölder order of the Hessian on bounded sets.
    pub fn lambda(&self) -> f64 {
        1.0
    }

    fn parts(&self, v: f64) -> (f64, f64, f64) {
        match self {
            Self::Sin => (v.sin(), v.cos(), -v.sin()),
            Self::Cos => (v.cos(), -v.sin(), -v.cos()),
            Self::Quadratic => (0.5 * v * v, v, 1.0),
            Self::Cubic => (v * v * v / 3.0, v * v, 2.0 * v),
        }
    }

    pub fn on(self, dim: usize) -> StandardFieldIn {
        StandardFieldIn { field: self, dim }
    }
}

/// A [`StandardField`] on `R^dim`.
#[derive(Clone, Copy, Debug)]
pub struct StandardFieldIn {
    pub field: StandardField,
    pub dim: usize,
}

impl ScalarField for StandardFieldIn {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&v| self.field.parts(v).0).sum()
    }
    fn gradient(&self, xi: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(xi) {
            *o = self.field.parts(v).1;
        }
    }
    fn hessian(&self, xi: &[f64], out: &mut [f64]) {
        let d = self.dim;
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &v) in xi.iter().enumerate() {
            out[i * d + i] = self.field.parts(v).2;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `(stride, mesh, sup error against the stride-one reference)`.
    pub levels: Vec<(usize, f64, f64)>,
    /// Slope of `log2(error)` against `log2(mesh)`.
    pub order: Fit,
}

/// Self-convergence of the scheme: solve on the driver restricted to every
/// `2^j`-th point and compare with the full-grid solution at common points.
/// Requires case A at every level.
pub fn convergence_study(
    pc: &PowerCoefficient,
    a: &[f64],
    rp: &RoughPath,
    params: &SolverParams,
    strides: &[usize],
) -> Result<ConvergenceReport> {
    let reference = solve_md_davie(pc, a, rp, params)?;
    if reference.case != Case::A || reference.grid_indices.len() != rp.len() {
        return Err(Error::Config(
            "convergence study needs a reference solution away from zero on the full grid".into(),
        ));
    }
    let mut levels = Vec::new();
    for &stride in strides {
        let coarse_rp = rp.restrict(stride)?;
        let sol = solve_md_davie(pc, a, &coarse_rp, params)?;
        if sol.case != Case::A {
            return Err(Error::Config(format!("solution reached zero at stride {stride}")));
        }
        let mut err = 0.0f64;
        for (p, &ci) in sol.grid_indices.iter().enumerate() {
            let fine_idx = ci * stride;
            let diff: Vec<f64> = sol.y.at(p).iter().zip(reference.y.at(fine_idx)).map(|(u, v)| u - v).collect();
            err = err.max(norm(&diff));
        }
        let mesh = coarse_rp.grid().t(1) - coarse_rp.grid().t(0);
        levels.push((stride, mesh, err));
    }
    let xs: Vec<f64> = levels.iter().map(|l| l.1.log2()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.2.max(f64::MIN_POSITIVE).log2()).collect();
    let order = ols(&xs, &ys)?;
    Ok(ConvergenceReport { levels, order })
}
