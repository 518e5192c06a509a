//! The sewing map and its discrete counterpart.
//!
//! Given a closed three-index increment `h` (`delta h = 0`) that is small at
//! order `mu > 1`, there is exactly one two-index increment `g` of order `mu`
//! with `delta g = h`. On a finite grid we realise it by declaring `g` zero
//! on the finest consecutive pairs and composing upward,
//!
//! ```text
//! g_{st} = g_{sm} + g_{mt} + h_{smt},
//! ```
//!
//! which is the midpoint-insertion construction when the grid is dyadic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::{holder_norm2, holder_norm3, norm, Inc2Grid, Inc3Grid, TimeGrid};

const CLOSED_TOL: f64 = 1e-10;
/// Above this many quadruples the closedness check is sampled.
const MAX_EXHAUSTIVE_QUADRUPLES: usize = 2_000_000;

/// Output of [`sew`] and [`sew_refined`].
#[derive(Clone, Debug)]
pub struct SewingResult {
    pub lambda_h: Inc2Grid,
    pub mu: f64,
    /// `1 / (2^mu - 2)`; only meaningful for `mu > 1`.
    pub bound_constant: f64,
    /// Grid seminorm `sup |h_{sut}| / (t - s)^mu`.
    pub norm_h: f64,
    /// Grid seminorm `sup |h_{sut}| / ((u - s)(t - u))^{mu/2}`.
    pub norm_h_split: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SewingSummary {
    pub mu: f64,
    pub bound_constant: f64,
    pub norm_h: f64,
    pub norm_h_split: f64,
    pub norm_lambda_h: f64,
    pub grid_points: usize,
}

impl SewingResult {
    /// Grid seminorm of `lambda_h` at level `mu`.
    pub fn norm_lambda(&self) -> f64 {
        holder_norm2(&self.lambda_h, self.mu).expect("mu > 1 checked at construction")
    }

    /// Bound `bound_constant * norm_h_split`. The `(t - s)^mu` variant of the
    /// three-index seminorm does not support this constant (take
    /// `g_{st} = (t - s)^mu`: then `|g|_mu = 1` while
    /// `|delta g|_mu / (2^mu - 2) = 2^{-mu}`).
    pub fn bound(&self) -> f64 {
        self.bound_constant * self.norm_h_split
    }

    pub fn summary(&self) -> SewingSummary {
        SewingSummary {
            mu: self.mu,
            bound_constant: self.bound_constant,
            norm_h: self.norm_h,
            norm_h_split: self.norm_h_split,
            norm_lambda_h: self.norm_lambda(),
            grid_points: self.lambda_h.grid().len(),
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 1.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::MuTooSmall(mu))
    }
}

/// `2^mu * zeta(mu)`, the constant of the discrete sewing inequality.
///
/// Euler-Maclaurin with 32 explicit terms and three Bernoulli corrections;
/// relative error far below `1e-12` for `mu > 1`.
pub fn k_mu(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(2f64.powf(mu) * zeta(mu))
}

fn zeta(s: f64) -> f64 {
    const N: f64 = 32.0;
    let head: f64 = (1..32).map(|l| (l as f64).powf(-s)).sum();
    let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // B_2 / 2!, B_4 / 4!, B_6 / 6!
    let coeffs = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0];
    let mut rising = s;
    for (j, c) in coeffs.iter().enumerate() {
        let p = 2 * j as i32 + 1;
        tail += c * rising * N.powf(-s - p as f64);
        rising *= (s + p as f64) * (s + p as f64 + 1.0);
    }
    head + tail
}

/// `(delta h)_{abcd} = h_{bcd} - h_{acd} + h_{abd} - h_{abc}`.
#[inline]
fn delta3_at(h: &Inc3Grid, a: usize, b: usize, c: usize, d: usize, out: &mut [f64]) {
    let (bcd, acd, abd, abc) = (h.get(b, c, d), h.get(a, c, d), h.get(a, b, d), h.get(a, b, c));
    for k in 0..out.len() {
        out[k] = bcd[k] - acd[k] + abd[k] - abc[k];
    }
}

/// Largest `|delta h|` over quadruples, relative to `max |h|`.
///
/// Exhaustive for small grids, otherwise a deterministic stratified sample.
pub fn closedness_residual(h: &Inc3Grid) -> f64 {
    let n = h.grid().len();
    let dim = h.dim();
    let scale = h.max_abs();
    if scale == 0.0 || n < 4 {
        return 0.0;
    }
    let mut buf = vec![0.0; dim];
    let mut worst = 0.0f64;
    let quads = n * (n - 1) * (n - 2) * (n - 3) / 24;
    if quads <= MAX_EXHAUSTIVE_QUADRUPLES {
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        delta3_at(h, a, b, c, d, &mut buf);
                        worst = worst.max(norm(&buf));
                    }
                }
            }
        }
    } else {
        // Weyl-sequence sample of sorted index quadruples.
        let golden = [0.618_033_988_749_895, 0.754_877_666_246_693, 0.569_840_290_998_053, 0.873_460_227_337_254];
        for k in 0..MAX_EXHAUSTIVE_QUADRUPLES {
            let mut idx = [0usize; 4];
            for (slot, g) in idx.iter_mut().zip(golden) {
                *slot = ((k as f64 * g).fract() * n as f64) as usize;
            }
            idx.sort_unstable();
            if idx[0] == idx[1] || idx[1] == idx[2] || idx[2] == idx[3] {
                continue;
            }
            delta3_at(h, idx[0], idx[1], idx[2], idx[3], &mut buf);
            worst = worst.max(norm(&buf));
        }
    }
    worst / scale
}

/// Split-exponent seminorm `sup |h_{sut}| / ((u - s)(t - u))^{mu/2}`.
pub fn split_norm3(h: &Inc3Grid, mu: f64) -> f64 {
    let g = h.grid();
    h.iter()
        .map(|(i, j, k, v)| norm(v) / ((g.t(j) - g.t(i)) * (g.t(k) - g.t(j))).powf(mu / 2.0))
        .fold(0.0, f64::max)
}

/// Sew `h` on its own grid: the unique `g` with `delta g = h` that vanishes
/// on consecutive grid pairs.
pub fn sew(h: &Inc3Grid, mu: f64) -> Result<SewingResult> {
    check_mu(mu)?;
    let residual = closedness_residual(h);
    if residual > CLOSED_TOL {
        return Err(Error::NotClosed {
            residual,
            tolerance: CLOSED_TOL,
        });
    }
    let grid = h.grid().clone();
    let dim = h.dim();
    let n = grid.len();
    let mut g = Inc2Grid::zeros(grid.clone(), dim);
    for i in 0..n {
        for j in i + 2..n {
            let prev = g.get(i, j - 1).to_vec();
            let inc = h.get(i, j - 1, j);
            for (o, (p, q)) in g.get_mut(i, j).iter_mut().zip(prev.iter().zip(inc)) {
                *o = p + q;
            }
        }
    }
    Ok(SewingResult {
        lambda_h: g,
        mu,
        bound_constant: 1.0 / (2f64.powf(mu) - 2.0),
        norm_h: holder_norm3(h, mu)?,
        norm_h_split: split_norm3(h, mu),
    })
}

/// Sew a three-index increment given as a function of times.
///
/// Every interval of `grid` is refined dyadically `depth` times; the finest
/// pairs are set to zero and values are composed upward by midpoint
/// insertion, then across coarse intervals. Closedness of `h_fn` is the
/// caller's responsibility (it is checked on the coarse grid only).
pub fn sew_refined<F>(h_fn: F, dim: usize, grid: &TimeGrid, mu: f64, depth: u32) -> Result<SewingResult>
where
    F: Fn(f64, f64, f64, &mut [f64]),
{
    check_mu(mu)?;
    if depth > 24 {
        return Err(Error::Config(format!("refinement depth {depth} exceeds 24")));
    }
    let h_coarse = Inc3Grid::from_fn(grid.clone(), dim, |i, j, k, out| {
        h_fn(grid.t(i), grid.t(j), grid.t(k), out)
    });
    let residual = closedness_residual(&h_coarse);
    if residual > CLOSED_TOL {
        return Err(Error::NotClosed {
            residual,
            tolerance: CLOSED_TOL,
        });
    }
    let n = grid.len();
    let mut consecutive = vec![0.0; (n - 1) * dim];
    let mut buf = vec![0.0; dim];
    for i in 0..n - 1 {
        let (a, b) = (grid.t(i), grid.t(i + 1));
        let cells = 1usize << depth;
        let step = (b - a) / cells as f64;
        let at = |k: usize| if k == cells { b } else { a + step * k as f64 };
        // level holds g on the current cells, starting from zeros at the finest level
        let mut level = vec![0.0; cells * dim];
        let mut width = 1usize;
        while level.len() > dim {
            let pairs = level.len() / dim / 2;
            let mut next = vec![0.0; pairs * dim];
            for p in 0..pairs {
                let s = 2 * p * width;
                h_fn(at(s), at(s + width), at(s + 2 * width), &mut buf);
                for c in 0..dim {
                    next[p * dim + c] = level[2 * p * dim + c] + level[(2 * p + 1) * dim + c] + buf[c];
                }
            }
            level = next;
            width *= 2;
        }
        consecutive[i * dim..(i + 1) * dim].copy_from_slice(&level);
    }
    let mut g = Inc2Grid::zeros(grid.clone(), dim);
    for i in 0..n - 1 {
        g.get_mut(i, i + 1).copy_from_slice(&consecutive[i * dim..(i + 1) * dim]);
    }
    for i in 0..n - 1 {
        for j in i + 2..n {
            let prev = g.get(i, j - 1).to_vec();
            let last = g.get(j - 1, j).to_vec();
            h_fn(grid.t(i), grid.t(j - 1), grid.t(j), &mut buf);
            for (c, o) in g.get_mut(i, j).iter_mut().enumerate() {
                *o = prev[c] + last[c] + buf[c];
            }
        }
    }
    Ok(SewingResult {
        lambda_h: g,
        mu,
        bound_constant: 1.0 / (2f64.powf(mu) - 2.0),
        norm_h: holder_norm3(&h_coarse, mu)?,
        norm_h_split: split_norm3(&h_coarse, mu),
    })
}

/// Outcome of the discrete sewing inequality `|R|_mu <= K_mu |delta R|_mu`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscreteSewingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Check the discrete sewing inequality for `R` vanishing on consecutive pairs.
pub fn discrete_sewing_check(r: &Inc2Grid, mu: f64) -> Result<DiscreteSewingCheck> {
    check_mu(mu)?;
    let n = r.grid().len();
    for i in 0..n - 1 {
        if r.get(i, i + 1).iter().any(|v| *v != 0.0) {
            return Err(Error::NotInC2Pi(i, i + 1));
        }
    }
    let lhs = holder_norm2(r, mu)?;
    let dr = crate::increments::delta2(r);
    let rhs = k_mu(mu)? * holder_norm3(&dr, mu)?;
    Ok(DiscreteSewingCheck {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// Subtract the additive part generated by the consecutive entries, so the
/// result vanishes on consecutive pairs while `delta` is unchanged.
pub fn recenter(r: &Inc2Grid) -> Inc2Grid {
    let dim = r.dim();
    let n = r.grid().len();
    let mut cumulative = vec![0.0; n * dim];
    for i in 1..n {
        for c in 0..dim {
            cumulative[i * dim + c] = cumulative[(i - 1) * dim + c] + r.get(i - 1, i)[c];
        }
    }
    Inc2Grid::from_fn(r.grid().clone(), dim, |i, j, out| {
        if j == i + 1 {
            return;
        }
        for c in 0..dim {
            out[c] = r.get(i, j)[c] - (cumulative[j * dim + c] - cumulative[i * dim + c]);
        }
    })
}
