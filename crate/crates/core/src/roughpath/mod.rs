//! Geometric rough paths over a time grid.
//!
//! A [`RoughPath`] stores the path `x` at every grid point and the second
//! level `X_{t_i t_{i+1}}` on consecutive pairs only. Any other pair is
//! recovered through Chen's relation
//!
//! ```text
//! X_{st} = X_{su} + X_{ut} + (x_u - x_s) (x) (x_t - x_u)
//! ```
//!
//! so Chen holds by construction; [`RoughPath::symmetry_residual`] checks the
//! geometric condition `X + X^T = dx (x) dx`.

mod fbm;

pub use fbm::{fbm_increments, fbm_rough_path, FbmMethod, FbmSpec};

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_positive_exponent, Error, Result};
use crate::increments::{path_seminorm, Inc1, TimeGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct RoughPath {
    x: Inc1,
    x2: Vec<f64>,
    gamma: f64,
}

impl RoughPath {
    /// Assemble from a path and its consecutive second-level blocks
    /// (row-major `d x d`, one block per grid interval).
    pub fn new(x: Inc1, x2: Vec<f64>, gamma: f64) -> Result<Self> {
        check_positive_exponent("gamma", gamma)?;
        let d = x.dim();
        let expected = (x.len() - 1) * d * d;
        if x2.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: x2.len(),
            });
        }
        let scale = x.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if x.at(0).iter().any(|v| v.abs() > 1e-12 * scale) {
            return Err(Error::Config("rough path must start at the origin".into()));
        }
        Ok(Self { x, x2, gamma })
    }

    /// Exact lift of a smooth path: `X_{st} = int_s^t (x_u - x_s) (x) x'(u) du`
    /// by 8-point Gauss-Legendre on each interval. The symmetric part is set
    /// to `dx (x) dx / 2` exactly.
    pub fn from_smooth(
        grid: TimeGrid,
        dim: usize,
        x_fn: impl Fn(f64, &mut [f64]),
        dx_fn: impl Fn(f64, &mut [f64]),
        gamma: f64,
    ) -> Result<Self> {
        let mut x = Inc1::from_fn(grid.clone(), dim, |t, v| x_fn(t, v));
        let origin = x.at(0).to_vec();
        for i in 0..x.len() {
            for (v, o) in x.at_mut(i).iter_mut().zip(&origin) {
                *v -= o;
            }
        }
        let d = dim;
        let mut x2 = vec![0.0; (grid.len() - 1) * d * d];
        let (mut xu, mut dxu) = (vec![0.0; d], vec![0.0; d]);
        let mut xs = vec![0.0; d];
        for i in 0..grid.len() - 1 {
            let (s, t) = (grid.t(i), grid.t(i + 1));
            x_fn(s, &mut xs);
            let half = 0.5 * (t - s);
            let mid = 0.5 * (t + s);
            let block = &mut x2[i * d * d..(i + 1) * d * d];
            for (node, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
                let u = mid + half * node;
                x_fn(u, &mut xu);
                dx_fn(u, &mut dxu);
                for a in 0..d {
                    for b in 0..d {
                        block[a * d + b] += w * half * (xu[a] - xs[a]) * dxu[b];
                    }
                }
            }
            let inc: Vec<f64> = (0..d).map(|a| x.at(i + 1)[a] - x.at(i)[a]).collect();
            symmetrize(block, &inc);
        }
        Self::new(x, x2, gamma)
    }

    /// The zero rough path on a grid.
    pub fn zero(grid: TimeGrid, dim: usize, gamma: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(Inc1::zeros(grid, dim), vec![0.0; (n - 1) * dim * dim], gamma)
    }

    pub fn grid(&self) -> &TimeGrid {
        self.x.grid()
    }

    pub fn x(&self) -> &Inc1 {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        check_positive_exponent("gamma", gamma)?;
        self.gamma = gamma;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Consecutive second-level block on `[t_i, t_{i+1}]`.
    #[inline]
    pub fn x2_block(&self, i: usize) -> &[f64] {
        let dd = self.dim() * self.dim();
        &self.x2[i * dd..(i + 1) * dd]
    }

    pub fn x2_blocks(&self) -> &[f64] {
        &self.x2
    }

    /// `x_t - x_s` for grid indices.
    pub fn increment(&self, i: usize, j: usize) -> Vec<f64> {
        self.x.at(j).iter().zip(self.x.at(i)).map(|(a, b)| a - b).collect()
    }

    /// Second level on an arbitrary grid pair by Chen composition.
    pub fn chen_extend(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        if i >= j || j >= self.len() {
            return Err(Error::IndexOrder(i, j));
        }
        let d = self.dim();
        let mut acc = self.x2_block(i).to_vec();
        for k in i + 1..j {
            let left = self.increment(i, k);
            let right = self.increment(k, k + 1);
            let block = self.x2_block(k);
            for a in 0..d {
                for b in 0..d {
                    acc[a * d + b] += block[a * d + b] + left[a] * right[b];
                }
            }
        }
        Ok(acc)
    }

    /// Calls `f(j, X_{ij})` for every `j > i` up to `last` (inclusive),
    /// extending the second level one block at a time.
    pub(crate) fn for_each_from(&self, i: usize, last: usize, mut f: impl FnMut(usize, &[f64])) {
        let d = self.dim();
        let mut acc = vec![0.0; d * d];
        let xi = self.x.at(i);
        for k in i..last.min(self.len() - 1) {
            let xk = self.x.at(k);
            let xk1 = self.x.at(k + 1);
            let block = self.x2_block(k);
            for a in 0..d {
                let left = xk[a] - xi[a];
                for b in 0..d {
                    acc[a * d + b] += block[a * d + b] + left * (xk1[b] - xk[b]);
                }
            }
            f(k + 1, &acc);
        }
    }

    /// Largest `|X + X^T - dx (x) dx|` over consecutive blocks and a sample of
    /// extended pairs, relative to the largest `|dx|^2` seen.
    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim();
        let n = self.len();
        let check = |inc: &[f64], block: &[f64]| {
            let mut worst = 0.0f64;
            for a in 0..d {
                for b in 0..d {
                    let r = block[a * d + b] + block[b * d + a] - inc[a] * inc[b];
                    worst = worst.max(r.abs());
                }
            }
            worst
        };
        let mut worst = 0.0f64;
        let mut scale = f64::MIN_POSITIVE;
        for i in 0..n - 1 {
            let inc = self.increment(i, i + 1);
            scale = scale.max(inc.iter().map(|v| v * v).sum());
            worst = worst.max(check(&inc, self.x2_block(i)));
        }
        let stride = (n / 16).max(1);
        for i in (0..n - 1).step_by(stride) {
            self.for_each_from(i, n - 1, |j, block| {
                if (j - i) % stride == 0 || j == n - 1 {
                    let inc = self.increment(i, j);
                    scale = scale.max(inc.iter().map(|v| v * v).sum());
                    worst = worst.max(check(&inc, block));
                }
            });
        }
        worst / scale
    }

    /// Relative Chen defect of externally supplied second-level values on
    /// non-consecutive pairs `(i, j, block)` against the composition of
    /// consecutive blocks.
    pub fn chen_residual(&self, checkpoints: &[(usize, usize, Vec<f64>)]) -> Result<f64> {
        let mut worst = 0.0f64;
        let mut scale = f64::MIN_POSITIVE;
        for (i, j, block) in checkpoints {
            let composed = self.chen_extend(*i, *j)?;
            let inc = self.increment(*i, *j);
            scale = scale.max(inc.iter().map(|v| v * v).sum());
            for (a, b) in composed.iter().zip(block) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst / scale)
    }

    /// Restriction to every `stride`-th grid point, with blocks composed by Chen.
    pub fn restrict(&self, stride: usize) -> Result<Self> {
        let grid = self.grid().subgrid(stride)?;
        let indices: Vec<usize> = (0..self.len()).step_by(stride).collect();
        self.select(&indices).inspect(|rp| {
            debug_assert_eq!(rp.grid(), &grid);
        })
    }

    /// Restriction to the given increasing grid indices (first must be 0).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.first() != Some(&0) {
            return Err(Error::Config("selected indices must start at 0".into()));
        }
        let x = self.x.select(indices)?;
        let mut x2 = Vec::with_capacity((indices.len() - 1) * self.dim() * self.dim());
        for w in indices.windows(2) {
            x2.extend(self.chen_extend(w[0], w[1])?);
        }
        Self::new(x, x2, self.gamma)
    }

    /// `|x|_gamma + |X|_{2 gamma}` as grid seminorms over all pairs.
    pub fn rough_norm(&self, gamma: f64) -> Result<f64> {
        check_positive_exponent("gamma", gamma)?;
        let first = path_seminorm(self.grid(), self.dim(), self.x.values(), gamma, usize::MAX);
        Ok(first + self.area_seminorm(gamma, usize::MAX))
    }

    /// `sup |X_{st}| / (t - s)^{2 gamma}` over pairs at most `max_lag` apart.
    pub fn area_seminorm(&self, gamma: f64, max_lag: usize) -> f64 {
        let n = self.len();
        let grid = self.grid();
        (0..n - 1)
            .into_par_iter()
            .map(|i| {
                let mut best = 0.0f64;
                self.for_each_from(i, i.saturating_add(max_lag), |j, block| {
                    let nrm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
                    best = best.max(nrm / (grid.t(j) - grid.t(i)).powf(2.0 * gamma));
                });
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Estimate of the modulus of Holder roughness at exponent `exponent`
    /// (the sum `gamma + eps_hat`).
    ///
    /// For each scale `eps`, probe point `s` and unit direction `phi`, takes
    /// the best `|<phi, x_t - x_s>| / eps^exponent` over grid `t` with
    /// `eps/2 < |t - s| < eps`; the estimate is the minimum over `s`, `phi`
    /// and `eps`. Probe points are at most 512 equally spaced grid indices.
    pub fn roughness_modulus(&self, exponent: f64, eps_list: &[f64]) -> Result<RoughnessEstimate> {
        check_positive_exponent("exponent", exponent)?;
        let horizon = self.grid().horizon();
        let d = self.dim();
        let directions = direction_net(d);
        let n = self.len();
        let probe_stride = (n / 512).max(1);
        let points = self.grid().points();
        let mut per_eps = Vec::with_capacity(eps_list.len());
        let mut used = Vec::with_capacity(eps_list.len());
        for &eps in eps_list {
            if !(eps > 0.0 && eps <= horizon / 2.0 + 1e-15) {
                return Err(Error::Config(format!("roughness scale {eps} outside (0, T/2]")));
            }
            let scale = eps.powf(exponent);
            let mut worst = f64::INFINITY;
            let mut skipped = 0usize;
            for i in (0..n).step_by(probe_stride) {
                let s = points[i];
                let window: Vec<usize> = candidate_indices(points, s, eps);
                if window.is_empty() {
                    skipped += 1;
                    continue;
                }
                for phi in &directions {
                    let best = window
                        .iter()
                        .map(|&j| {
                            let xs = self.x.at(i);
                            let xt = self.x.at(j);
                            (0..d).map(|c| phi[c] * (xt[c] - xs[c])).sum::<f64>().abs()
                        })
                        .fold(0.0, f64::max);
                    worst = worst.min(best / scale);
                }
            }
            if skipped > 0 {
                warn!("roughness scan: {skipped} probe points had no grid point at scale {eps}");
            }
            if worst.is_finite() {
                per_eps.push(worst);
                used.push(eps);
            }
        }
        if per_eps.is_empty() {
            return Err(Error::DegenerateSampling(
                "no roughness window contained grid points".into(),
            ));
        }
        let modulus = per_eps.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(RoughnessEstimate {
            exponent,
            modulus,
            epsilon_grid: used,
            per_epsilon: per_eps,
        })
    }
}

fn candidate_indices(points: &[f64], s: f64, eps: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let lo = points.partition_point(|&p| p <= s - eps);
    let hi = points.partition_point(|&p| p < s + eps);
    for (j, &p) in points.iter().enumerate().take(hi).skip(lo) {
        let gap = (p - s).abs();
        if gap > eps / 2.0 && gap < eps {
            out.push(j);
        }
    }
    out
}

/// Unit directions used by the roughness scan: `+-1` in one dimension,
/// otherwise 32 angles on the half circle of every coordinate plane.
fn direction_net(d: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for k in 0..32 {
                let theta = std::f64::consts::PI * k as f64 / 32.0;
                let mut phi = vec![0.0; d];
                phi[a] = theta.cos();
                phi[b] = theta.sin();
                out.push(phi);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RoughnessEstimate {
    /// `gamma + eps_hat`.
    pub exponent: f64,
    pub modulus: f64,
    pub epsilon_grid: Vec<f64>,
    pub per_epsilon: Vec<f64>,
}

fn symmetrize(block: &mut [f64], inc: &[f64]) {
    let d = inc.len();
    for a in 0..d {
        for b in a..d {
            let anti = 0.5 * (block[a * d + b] - block[b * d + a]);
            let sym = 0.5 * inc[a] * inc[b];
            block[a * d + b] = sym + anti;
            block[b * d + a] = sym - anti;
        }
    }
}

/// Exact iterated-integral lift of the piecewise-linear interpolant of a
/// fine path onto a coarse grid whose points are all fine grid points.
pub fn lift_piecewise_linear(path: &Inc1, coarse: &TimeGrid, gamma: f64) -> Result<RoughPath> {
    let fine = path.grid();
    let mut indices = Vec::with_capacity(coarse.len());
    for &t in coarse.points() {
        indices.push(fine.index_of(t).ok_or(Error::GridsNotNested(t))?);
    }
    if *indices.last().expect("nonempty") != fine.len() - 1 {
        return Err(Error::GridsNotNested(fine.horizon()));
    }
    let d = path.dim();
    let mut x2 = vec![0.0; (indices.len() - 1) * d * d];
    let mut span = vec![0.0; d];
    let mut inc = vec![0.0; d];
    for (c, w) in indices.windows(2).enumerate() {
        let block = &mut x2[c * d * d..(c + 1) * d * d];
        span.iter_mut().for_each(|v| *v = 0.0);
        for k in w[0]..w[1] {
            for a in 0..d {
                inc[a] = path.at(k + 1)[a] - path.at(k)[a];
            }
            for a in 0..d {
                for b in 0..d {
                    block[a * d + b] += span[a] * inc[b] + 0.5 * inc[a] * inc[b];
                }
            }
            for a in 0..d {
                span[a] += inc[a];
            }
        }
        symmetrize(block, &span);
    }
    let mut x = path.select(&indices)?;
    let origin = x.at(0).to_vec();
    if origin.iter().any(|v| *v != 0.0) {
        for i in 0..x.len() {
            for (v, o) in x.at_mut(i).iter_mut().zip(&origin) {
                *v -= o;
            }
        }
    }
    RoughPath::new(x, x2, gamma)
}

const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize) -> RoughPath {
        RoughPath::from_smooth(TimeGrid::uniform(n, 1.0).unwrap(), 1, |t, v| v[0] = t, |_, v| v[0] = 1.0, 1.0)
            .unwrap()
    }

    #[test]
    fn linear_path_area() {
        let rp = linear(8);
        for j in 1..9 {
            let v = rp.chen_extend(0, j).unwrap()[0];
            let t = j as f64 / 8.0;
            assert!((v - t * t / 2.0).abs() < 1e-15);
        }
        assert_eq!(rp.chen_extend(3, 4).unwrap(), rp.x2_block(3).to_vec());
        assert!(rp.chen_extend(4, 4).is_err());
        assert!((rp.rough_norm(1.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn two_segment_lift() {
        let fine = TimeGrid::uniform(2, 1.0).unwrap();
        let (u, v) = ([1.0, 2.0], [-0.5, 3.0]);
        let path = Inc1::new(fine, 2, vec![0.0, 0.0, u[0], u[1], u[0] + v[0], u[1] + v[1]]).unwrap();
        let coarse = TimeGrid::uniform(1, 1.0).unwrap();
        let rp = lift_piecewise_linear(&path, &coarse, 0.4).unwrap();
        let block = rp.x2_block(0);
        for a in 0..2 {
            for b in 0..2 {
                let expected = u[a] * u[b] / 2.0 + v[a] * v[b] / 2.0 + u[a] * v[b];
                assert!((block[a * 2 + b] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn not_nested() {
        let path = Inc1::zeros(TimeGrid::uniform(4, 1.0).unwrap(), 1);
        let coarse = TimeGrid::uniform(3, 1.0).unwrap();
        assert!(matches!(lift_piecewise_linear(&path, &coarse, 0.4), Err(Error::GridsNotNested(_))));
    }

    #[test]
    fn roughness_of_linear_path() {
        let rp = linear(1024);
        let est = rp.roughness_modulus(1.0, &[0.5, 0.25, 0.125]).unwrap();
        assert!(est.modulus >= 0.5, "{:?}", est);
        let flat = RoughPath::zero(TimeGrid::uniform(64, 1.0).unwrap(), 2, 0.4).unwrap();
        assert_eq!(flat.roughness_modulus(0.45, &[0.25]).unwrap().modulus, 0.0);
    }

    #[test]
    fn restrict_composes_blocks() {
        let rp = RoughPath::from_smooth(
            TimeGrid::uniform(16, 1.0).unwrap(),
            2,
            |t, v| {
                v[0] = t;
                v[1] = t * t;
            },
            |t, v| {
                v[0] = 1.0;
                v[1] = 2.0 * t;
            },
            1.0,
        )
        .unwrap();
        let coarse = rp.restrict(4).unwrap();
        assert_eq!(coarse.len(), 5);
        let a = coarse.chen_extend(1, 3).unwrap();
        let b = rp.chen_extend(4, 12).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
        assert!(rp.symmetry_residual() < 1e-14);
    }
}
