//! Solvers for `dy = sigma(y) dx` with power-type coefficients.
//!
//! * [`solve_1d_lamperti`]: closed form `y = phi^{-1}(x + phi(a))` for scalar
//!   equations.
//! * [`solve_md_davie`]: the second-order scheme
//!   `y <- y + sigma(y) dx + (D sigma . sigma)(y) X` on a sub-grid of the
//!   driver grid whose mesh shrinks like `c0 2^{-alpha q}` in shell `q`,
//!   stopped (and continued by zero) once `|y|` drops below a threshold.

mod shells;

pub use shells::{i_shell, j_shell, track_radii, ShellEntry, ShellTrace, ShellTracker, B1, B2};

use log::debug;
use serde::{Deserialize, Serialize};

use crate::coefficients::PowerCoefficient;
use crate::error::{Error, Result};
use crate::increments::{norm, Inc1, Inc2Grid, TimeGrid};
use crate::roughpath::RoughPath;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    pub gamma: f64,
    pub kappa: f64,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_threshold")]
    pub zero_threshold: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Largest number of driver grid intervals merged into one step.
    #[serde(default = "default_stride")]
    pub max_stride: usize,
}

fn default_c0() -> f64 {
    0.5
}
fn default_threshold() -> f64 {
    2f64.powi(-20)
}
fn default_max_steps() -> usize {
    100_000_000
}
fn default_stride() -> usize {
    1
}

impl SolverParams {
    pub fn new(gamma: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            gamma,
            kappa,
            c0: default_c0(),
            zero_threshold: default_threshold(),
            max_steps: default_max_steps(),
            max_stride: default_stride(),
        };
        p.validate()?;
        Ok(p)
    }

    /// `(1 - kappa) / gamma`.
    pub fn alpha(&self) -> f64 {
        (1.0 - self.kappa) / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidExponent {
                name: "gamma",
                value: self.gamma,
                reason: "must lie in (0, 1]",
            });
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::InvalidExponent {
                name: "kappa",
                value: self.kappa,
                reason: "must lie in (0, 1)",
            });
        }
        if self.kappa + self.gamma <= 1.0 {
            return Err(Error::Config(format!(
                "kappa + gamma = {} must exceed 1",
                self.kappa + self.gamma
            )));
        }
        if !(self.c0 > 0.0) || !(self.zero_threshold > 0.0) || self.max_stride == 0 || self.max_steps == 0 {
            return Err(Error::Config("c0, zero_threshold, max_stride and max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Largest mesh allowed while `|y|` sits in `I`-shell `q`.
    pub fn mesh_bound(&self, q: i32) -> f64 {
        self.c0 * 2f64.powf(-self.alpha() * q.max(0) as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// The solution stays away from zero on the whole horizon.
    A,
    /// The solution reaches zero and is continued by zero.
    B,
}

#[derive(Clone, Debug)]
pub struct SolutionPath {
    /// Solution on the visited driver grid points (times are absolute).
    pub y: Inc1,
    /// Driver grid index of every sample of `y`.
    pub grid_indices: Vec<usize>,
    pub case: Case,
    pub shells: ShellTrace,
    /// Position in `y` of the first zero sample (case B).
    pub zero_pos: Option<usize>,
    /// Smallest step-control constant actually used.
    pub c0_effective: f64,
    /// Steps accepted at stride one despite skipping a shell.
    pub unresolved_jumps: usize,
    /// Whether consecutive-pair remainders vanish by construction.
    pub remainder_available: bool,
}

impl SolutionPath {
    pub fn times(&self) -> &[f64] {
        self.y.grid().points()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.y.len()).map(|p| self.y.norm_at(p)).collect()
    }

    pub fn zero_time(&self) -> Option<f64> {
        self.zero_pos.map(|p| self.times()[p])
    }

    pub fn check_shells(&self) -> Vec<String> {
        self.shells.check_invariants(self.times(), &self.radii())
    }
}

/// Raw output of the scheme on an index range of the driver grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub indices: Vec<usize>,
    /// `m` values per index, row-major.
    pub values: Vec<f64>,
    pub zero_pos: Option<usize>,
    pub c0_effective: f64,
    pub unresolved_jumps: usize,
}

fn check_coefficient(pc: &PowerCoefficient, rp: &RoughPath, params: &SolverParams) -> Result<()> {
    params.validate()?;
    if pc.d() != rp.dim() {
        return Err(Error::DimensionMismatch {
            expected: rp.dim(),
            got: pc.d(),
        });
    }
    if (pc.kappa() - params.kappa).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "solver kappa {} differs from coefficient kappa {}",
            params.kappa,
            pc.kappa()
        )));
    }
    Ok(())
}

/// One scheme step from grid index `i` to `j`.
fn davie_step(pc: &PowerCoefficient, rp: &RoughPath, y: &[f64], i: usize, j: usize, out: &mut [f64]) -> Result<()> {
    let (m, d) = (pc.m(), pc.d());
    let dx = rp.increment(i, j);
    let x2 = if j == i + 1 {
        rp.x2_block(i).to_vec()
    } else {
        rp.chen_extend(i, j)?
    };
    let sig = pc.sigma(y);
    let dss = pc.dsigma_sigma(y)?;
    for a in 0..m {
        let mut v = y[a];
        for jj in 0..d {
            v += sig[a * d + jj] * dx[jj];
        }
        for l in 0..d {
            for jj in 0..d {
                v += dss[(a * d + l) * d + jj] * x2[l * d + jj];
            }
        }
        out[a] = v;
    }
    Ok(())
}

fn violates_shell(old: &[f64], new: &[f64]) -> (bool, bool) {
    let dot: f64 = old.iter().zip(new).map(|(a, b)| a * b).sum();
    let flip = dot < 0.0;
    let rn = norm(new);
    let jump = rn > 0.0 && (i_shell(rn) - i_shell(norm(old))).abs() >= 2;
    (flip || jump, flip)
}

/// Run the scheme from `y0` at driver index `start` up to `end` (inclusive).
///
/// The result depends only on `(y0, start)` and the driver, so solving
/// `[0, T]` equals solving `[0, u]` and restarting at `u` from the computed
/// value whenever `u` is a visited index.
pub fn solve_md_davie_on(
    pc: &PowerCoefficient,
    y0: &[f64],
    rp: &RoughPath,
    params: &SolverParams,
    start: usize,
    end: usize,
) -> Result<Segment> {
    check_coefficient(pc, rp, params)?;
    let m = pc.m();
    if y0.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y0.len(),
        });
    }
    if norm(y0) == 0.0 {
        return Err(Error::Config("initial condition must be nonzero".into()));
    }
    if start >= end || end >= rp.len() {
        return Err(Error::IndexOrder(start, end));
    }
    let grid = rp.grid();
    let mut indices = vec![start];
    let mut values = y0.to_vec();
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; m];
    let mut i = start;
    let mut steps = 0usize;
    let mut c0_eff = params.c0;
    let mut jumps = 0usize;
    let mut zero_pos = None;
    if norm(&y) < params.zero_threshold {
        zero_pos = Some(0);
    }
    while i < end && zero_pos.is_none() {
        let q = i_shell(norm(&y));
        let bound = params.mesh_bound(q);
        let h = grid.t(i + 1) - grid.t(i);
        if h > bound {
            return Err(Error::StepUnderflow {
                shell: q,
                time: grid.t(i),
                required: bound,
                available: h,
            });
        }
        let mut k = 1usize;
        while k * 2 <= params.max_stride && i + k * 2 <= end && grid.t(i + k * 2) - grid.t(i) <= bound {
            k *= 2;
        }
        let initial = k;
        let (j, flip) = loop {
            let j = (i + k).min(end);
            davie_step(pc, rp, &y, i, j, &mut y_new)?;
            let (bad, flip) = violates_shell(&y, &y_new);
            if bad && k > 1 {
                k /= 2;
                continue;
            }
            if bad && !flip {
                jumps += 1;
            }
            break (j, bad && flip);
        };
        if k < initial {
            c0_eff = c0_eff.min(params.c0 * k as f64 / initial as f64);
        }
        steps += 1;
        if steps > params.max_steps {
            return Err(Error::MaxSteps(params.max_steps));
        }
        indices.push(j);
        if flip || norm(&y_new) < params.zero_threshold {
            debug!("zero reached at t = {}", grid.t(j));
            zero_pos = Some(indices.len() - 1);
            values.extend(std::iter::repeat_n(0.0, m));
        } else {
            values.extend_from_slice(&y_new);
            std::mem::swap(&mut y, &mut y_new);
        }
        i = j;
    }
    if zero_pos.is_some() {
        // continue by zero on every remaining grid point
        let last = *indices.last().expect("nonempty");
        for j in last + 1..=end {
            indices.push(j);
            values.extend(std::iter::repeat_n(0.0, m));
        }
    }
    Ok(Segment {
        indices,
        values,
        zero_pos,
        c0_effective: c0_eff,
        unresolved_jumps: jumps,
    })
}

/// Adaptive second-order scheme on the whole driver horizon.
pub fn solve_md_davie(pc: &PowerCoefficient, a: &[f64], rp: &RoughPath, params: &SolverParams) -> Result<SolutionPath> {
    let seg = solve_md_davie_on(pc, a, rp, params, 0, rp.len() - 1)?;
    let grid = TimeGrid::new(seg.indices.iter().map(|&i| rp.grid().t(i)).collect())?;
    let y = Inc1::new(grid, pc.m(), seg.values)?;
    let mut tracker = ShellTracker::new();
    let stop = seg.zero_pos.unwrap_or(y.len());
    for p in 0..stop {
        tracker.push(y.grid().t(p), y.norm_at(p));
    }
    if let Some(p) = seg.zero_pos {
        tracker.mark_zero(y.grid().t(p));
    }
    Ok(SolutionPath {
        case: if seg.zero_pos.is_some() { Case::B } else { Case::A },
        shells: tracker.finish(),
        zero_pos: seg.zero_pos,
        c0_effective: seg.c0_effective,
        unresolved_jumps: seg.unresolved_jumps,
        grid_indices: seg.indices,
        y,
        remainder_available: true,
    })
}

/// Shell ladder of a sampled solution.
pub fn track_shells(y: &Inc1) -> ShellTrace {
    let radii: Vec<f64> = (0..y.len()).map(|p| y.norm_at(p)).collect();
    track_radii(y.grid().points(), &radii)
}

/// Behaviour of the closed-form scalar solution once `x + phi(a)` reaches 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMode {
    /// Stay at zero from the first hit on.
    #[default]
    Absorb,
    /// Pass through zero using the odd extension of `phi^{-1}`.
    Continue,
}

#[derive(Clone, Debug)]
pub struct LampertiSolution {
    pub solution: SolutionPath,
    /// `y = 0`, also a solution when `a = 0`.
    pub trivial: Option<SolutionPath>,
}

/// `y_t = phi^{-1}(x_t - x_0 + phi(a))` on the grid of `x`.
///
/// For `a = 0` the nontrivial branch always uses the odd extension (with
/// absorption it would coincide with the zero solution).
pub fn solve_1d_lamperti(pc: &PowerCoefficient, a: f64, x: &Inc1, mode: ZeroMode) -> Result<LampertiSolution> {
    if a < 0.0 {
        return Err(Error::NegativeArgument(a));
    }
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: x.dim(),
        });
    }
    let lam = pc.lamperti()?;
    let shift = lam.phi(a)?;
    let x0 = x.at(0)[0];
    let mode = if a == 0.0 { ZeroMode::Continue } else { mode };
    let mut values = Vec::with_capacity(x.len());
    let mut zero_pos = None;
    for p in 0..x.len() {
        let w = x.at(p)[0] - x0 + shift;
        let v = match mode {
            ZeroMode::Absorb => {
                if zero_pos.is_none() && w <= 0.0 {
                    zero_pos = Some(p);
                }
                if zero_pos.is_some() {
                    0.0
                } else {
                    lam.phi_inverse(w)?
                }
            }
            ZeroMode::Continue => lam.phi_inverse_odd(w),
        };
        values.push(v);
    }
    let y = Inc1::scalar(x.grid().clone(), values)?;
    let shells = if a == 0.0 {
        ShellTrace {
            entries: Vec::new(),
            zero_hit: None,
            b1: B1,
            b2: B2,
        }
    } else {
        track_shells(&y)
    };
    let solution = SolutionPath {
        case: if zero_pos.is_some() { Case::B } else { Case::A },
        shells,
        zero_pos,
        c0_effective: f64::NAN,
        unresolved_jumps: 0,
        grid_indices: (0..x.len()).collect(),
        y,
        remainder_available: false,
    };
    let trivial = (a == 0.0).then(|| SolutionPath {
        y: Inc1::zeros(x.grid().clone(), 1),
        grid_indices: (0..x.len()).collect(),
        case: Case::B,
        shells: ShellTrace {
            entries: Vec::new(),
            zero_hit: Some(0.0),
            b1: B1,
            b2: B2,
        },
        zero_pos: Some(0),
        c0_effective: f64::NAN,
        unresolved_jumps: 0,
        remainder_available: false,
    });
    Ok(LampertiSolution { solution, trivial })
}

/// `R_{st} = y_t - y_s - sigma(y_s) dx_{st} - (D sigma . sigma)(y_s) X_{st}` for
/// sample positions `p < q` of the solution.
pub fn remainder_at(sp: &SolutionPath, rp: &RoughPath, pc: &PowerCoefficient, p: usize, q: usize) -> Result<Vec<f64>> {
    let (m, d) = (pc.m(), pc.d());
    let (i, j) = (sp.grid_indices[p], sp.grid_indices[q]);
    let ys = sp.y.at(p);
    let yt = sp.y.at(q);
    let dx = rp.increment(i, j);
    let x2 = rp.chen_extend(i, j)?;
    let sig = pc.sigma(ys);
    let dss = pc.dsigma_sigma(ys)?;
    Ok((0..m)
        .map(|a| {
            let mut v = yt[a] - ys[a];
            for jj in 0..d {
                v -= sig[a * d + jj] * dx[jj];
            }
            for l in 0..d {
                for jj in 0..d {
                    v -= dss[(a * d + l) * d + jj] * x2[l * d + jj];
                }
            }
            v
        })
        .collect())
}

/// Remainder on every pair of sample positions in `[start, end]`. The
/// returned grid uses times relative to the window start.
pub fn remainder_grid(
    sp: &SolutionPath,
    rp: &RoughPath,
    pc: &PowerCoefficient,
    start: usize,
    end: usize,
) -> Result<Inc2Grid> {
    if start >= end || end >= sp.y.len() {
        return Err(Error::IndexOrder(start, end));
    }
    if let Some(z) = sp.zero_pos {
        if end >= z {
            return Err(Error::WindowOverlapsZero {
                start,
                end,
                zero_index: z,
            });
        }
    }
    let t0 = sp.times()[start];
    let grid = TimeGrid::new(sp.times()[start..=end].iter().map(|t| t - t0).collect())?;
    let mut err = None;
    let out = Inc2Grid::from_fn(grid, pc.m(), |a, b, o| match remainder_at(sp, rp, pc, start + a, start + b) {
        Ok(v) => o.copy_from_slice(&v),
        Err(e) => err = Some(e),
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
