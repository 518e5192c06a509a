//! One-, two- and three-index increments over a discrete time grid.
//!
//! A `k`-index increment assigns a vector to every ordered tuple of grid
//! points `t_{i_1} < ... < t_{i_k}`; entries with repeated indices are zero
//! by convention and are never stored. The coboundary `delta` maps
//! `Inc1 -> Inc2Grid -> Inc3Grid`:
//!
//! ```text
//! (delta f)_{st}  = f_t - f_s
//! (delta h)_{sut} = h_{st} - h_{su} - h_{ut}
//! ```
//!
//! and `delta . delta = 0` holds exactly in floating point, because every
//! entry of `delta(delta f)` is `(a - b) - (c - b) - (a - c)` evaluated
//! on the same operands.
//!
//! All seminorms in this module are *grid* seminorms: suprema over grid
//! tuples only. They are lower bounds for the corresponding continuum
//! seminorms.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive_exponent, Error, Result};

/// Strictly increasing time points `0 = t_0 < t_1 < ... < t_{n-1} = T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two points, got {}",
                points.len()
            )));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "first point must be 0, got {}",
                points[0]
            )));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing and finite ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    /// `n_intervals + 1` equally spaced points on `[0, horizon]`.
    pub fn uniform(n_intervals: usize, horizon: f64) -> Result<Self> {
        if n_intervals == 0 || !(horizon > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "uniform grid needs n >= 1 and T > 0 (n = {n_intervals}, T = {horizon})"
            )));
        }
        let n = n_intervals as f64;
        let points = (0..=n_intervals)
            .map(|i| horizon * (i as f64) / n)
            .collect();
        Self::new(points)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a grid has at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("grid is non-empty")
    }

    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    /// Spacing if the grid is uniform up to a relative tolerance of `1e-9`.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = self.horizon() / self.intervals() as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }

    /// Every `stride`-th point. The last point must be hit exactly.
    pub fn subgrid(&self, stride: usize) -> Result<Self> {
        if stride == 0 || !self.intervals().is_multiple_of(stride) {
            return Err(Error::InvalidGrid(format!(
                "stride {stride} does not divide {} intervals",
                self.intervals()
            )));
        }
        Self::new(self.points.iter().step_by(stride).copied().collect())
    }

    /// Sub-grid made of the given (increasing) indices.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| self.points[i]).collect())
    }

    /// Index of the grid point equal to `t` (relative tolerance `1e-12`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.horizon().max(1.0);
        let pos = self.points.partition_point(|&p| p < t - tol);
        (pos < self.points.len() && (self.points[pos] - t).abs() <= tol).then_some(pos)
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;
    fn try_from(points: Vec<f64>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(grid: TimeGrid) -> Self {
        grid.points
    }
}

/// A path sampled on a grid: one vector of length `dim` per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Inc1 {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
}

impl Inc1 {
    pub fn new(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if values.len() != grid.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * dim,
                got: values.len(),
            });
        }
        Ok(Self { grid, dim, values })
    }

    pub fn scalar(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn from_fn(grid: TimeGrid, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Self {
        let mut values = vec![0.0; grid.len() * dim];
        for (i, chunk) in values.chunks_mut(dim).enumerate() {
            f(grid.t(i), chunk);
        }
        Self { grid, dim, values }
    }

    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        let values = vec![0.0; grid.len() * dim];
        Self { grid, dim, values }
    }

    #[inline]
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Euclidean norm of the value at grid point `i`.
    pub fn norm_at(&self, i: usize) -> f64 {
        norm(self.at(i))
    }

    /// Restriction to the grid points with the given increasing indices.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let grid = self.grid.select(indices)?;
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            values.extend_from_slice(self.at(i));
        }
        Self::new(grid, self.dim, values)
    }

    /// Scalar path component `c`.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.dim).copied().collect()
    }
}

#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[inline]
fn pair_offset(n: usize, i: usize) -> usize {
    // number of pairs (a, b) with a < i
    i * (2 * n - i - 1) / 2
}

#[inline]
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    pair_offset(n, i) + (j - i - 1)
}

/// Two-index increment `h_{st}` stored for every pair `s < t` of grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct Inc2Grid {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
    zero: Vec<f64>,
}

impl Inc2Grid {
    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        let n = grid.len();
        let values = vec![0.0; n * (n - 1) / 2 * dim];
        Self {
            grid,
            dim,
            values,
            zero: vec![0.0; dim],
        }
    }

    pub fn from_fn(grid: TimeGrid, dim: usize, mut f: impl FnMut(usize, usize, &mut [f64])) -> Self {
        let mut out = Self::zeros(grid, dim);
        let n = out.grid.len();
        for i in 0..n {
            for j in i + 1..n {
                let k = pair_index(n, i, j) * dim;
                f(i, j, &mut out.values[k..k + dim]);
            }
        }
        out
    }

    /// Entry `(i, j)`; the diagonal returns zeros.
    ///
    /// Panics if `i > j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        if i == j {
            return &self.zero;
        }
        assert!(i < j, "Inc2Grid index order violated: ({i}, {j})");
        let k = pair_index(self.grid.len(), i, j) * self.dim;
        &self.values[k..k + self.dim]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        assert!(i < j, "Inc2Grid index order violated: ({i}, {j})");
        let k = pair_index(self.grid.len(), i, j) * self.dim;
        &mut self.values[k..k + self.dim]
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Iterate `(i, j, value)` over all stored pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        let n = self.grid.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = f(*v));
        out
    }
}

/// Three-index increment `h_{sut}` stored for every triple `s < u < t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inc3Grid {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
    first_offset: Vec<usize>,
    zero: Vec<f64>,
}

impl Inc3Grid {
    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        let n = grid.len();
        let mut first_offset = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for a in 0..n {
            first_offset.push(acc);
            let r = n - 1 - a;
            acc += r * r.saturating_sub(1) / 2;
        }
        first_offset.push(acc);
        Self {
            grid,
            dim,
            values: vec![0.0; acc * dim],
            first_offset,
            zero: vec![0.0; dim],
        }
    }

    pub fn from_fn(
        grid: TimeGrid,
        dim: usize,
        mut f: impl FnMut(usize, usize, usize, &mut [f64]),
    ) -> Self {
        let mut out = Self::zeros(grid, dim);
        let n = out.grid.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let idx = out.index(i, j, k) * dim;
                    f(i, j, k, &mut out.values[idx..idx + dim]);
                }
            }
        }
        out
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.grid.len();
        debug_assert!(i < j && j < k && k < n);
        self.first_offset[i] + (j - i - 1) * (2 * n - 2 - i - j) / 2 + (k - j - 1)
    }

    /// Entry `(i, j, k)`; tuples with a repeated index return zeros.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &[f64] {
        if i == j || j == k {
            return &self.zero;
        }
        assert!(i < j && j < k, "Inc3Grid index order violated: ({i}, {j}, {k})");
        let idx = self.index(i, j, k) * self.dim;
        &self.values[idx..idx + self.dim]
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, &[f64])> + '_ {
        let n = self.grid.len();
        (0..n).flat_map(move |i| {
            (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k, self.get(i, j, k))))
        })
    }
}

/// `(delta f)_{st} = f_t - f_s` on every pair of grid points.
pub fn delta1(f: &Inc1) -> Inc2Grid {
    let dim = f.dim();
    Inc2Grid::from_fn(f.grid().clone(), dim, |i, j, out| {
        for ((o, a), b) in out.iter_mut().zip(f.at(j)).zip(f.at(i)) {
            *o = a - b;
        }
    })
}

/// `(delta h)_{sut} = h_{st} - h_{su} - h_{ut}` on every triple.
pub fn delta2(h: &Inc2Grid) -> Inc3Grid {
    let dim = h.dim();
    Inc3Grid::from_fn(h.grid().clone(), dim, |i, j, k, out| {
        let (st, su, ut) = (h.get(i, k), h.get(i, j), h.get(j, k));
        for c in 0..dim {
            out[c] = st[c] - su[c] - ut[c];
        }
    })
}

/// Grid seminorm `max_{s<t} |f_t - f_s| / (t - s)^mu` of a path, computed
/// without materialising `delta f`.
pub fn holder_norm1(f: &Inc1, mu: f64) -> Result<f64> {
    check_positive_exponent("mu", mu)?;
    Ok(path_seminorm(f.grid(), f.dim(), f.values(), mu, usize::MAX))
}

/// Same as [`holder_norm1`] restricted to pairs at most `max_lag` indices
/// apart. A first pass over short lags gives a lower bound `b`; pairs with
/// `(t - s)^mu >= diam / b` cannot exceed it and are skipped, so the result
/// stays exact.
pub(crate) fn path_seminorm(
    grid: &TimeGrid,
    dim: usize,
    values: &[f64],
    mu: f64,
    max_lag: usize,
) -> f64 {
    let n = grid.len();
    let max_lag = max_lag.min(n - 1);
    let first = lag_scan(grid, dim, values, mu, max_lag.min(64), f64::INFINITY);
    if max_lag <= 64 || first == 0.0 {
        return first;
    }
    let origin = &values[..dim];
    let radius = (0..n)
        .map(|i| norm_diff(&values[i * dim..(i + 1) * dim], origin))
        .fold(0.0, f64::max);
    let horizon = (2.0 * radius / first).powf(1.0 / mu);
    first.max(lag_scan(grid, dim, values, mu, max_lag, horizon))
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum::<f64>().sqrt()
}

/// Largest ratio over pairs with at most `max_lag` indices and less than
/// `horizon` time between them.
fn lag_scan(grid: &TimeGrid, dim: usize, values: &[f64], mu: f64, max_lag: usize, horizon: f64) -> f64 {
    use rayon::prelude::*;
    let n = grid.len();
    let lag_table: Option<Vec<f64>> = grid.uniform_spacing().map(|h| {
        let lags = ((horizon / h).ceil() as usize).min(max_lag);
        (0..=lags).map(|k| (k as f64 * h).powf(-mu)).collect()
    });
    (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let a = &values[i * dim..(i + 1) * dim];
            let mut best = 0.0f64;
            for j in i + 1..(i + max_lag + 1).min(n) {
                let dt = grid.t(j) - grid.t(i);
                if dt >= horizon {
                    break;
                }
                let b = &values[j * dim..(j + 1) * dim];
                let w = match &lag_table {
                    Some(tab) => tab[j - i],
                    None => dt.powf(-mu),
                };
                best = best.max(norm_diff(a, b) * w);
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Grid seminorm `max_{s<t} |h_{st}| / (t - s)^mu`.
pub fn holder_norm2(h: &Inc2Grid, mu: f64) -> Result<f64> {
    check_positive_exponent("mu", mu)?;
    let g = h.grid();
    Ok(h
        .iter()
        .map(|(i, j, v)| norm(v) / (g.t(j) - g.t(i)).powf(mu))
        .fold(0.0, f64::max))
}

/// Grid seminorm `max_{s<u<t} |h_{sut}| / (t - s)^mu`.
pub fn holder_norm3(h: &Inc3Grid, mu: f64) -> Result<f64> {
    check_positive_exponent("mu", mu)?;
    let g = h.grid();
    Ok(h
        .iter()
        .map(|(i, _, k, v)| norm(v) / (g.t(k) - g.t(i)).powf(mu))
        .fold(0.0, f64::max))
}

/// Residual of the discrete product rule for scalar `g` and `h`.
///
/// With `(gh)_{st} = g_s h_{st}`, `(delta g h)_{sut} = (g_u - g_s) h_{ut}` and
/// `(g delta h)_{sut} = g_s (delta h)_{sut}`, the coboundary above satisfies
///
/// ```text
/// delta(gh) = g delta h - delta g h
/// ```
///
/// exactly. Returns the largest absolute deviation from that identity over
/// all triples.
pub fn product_rule_check(g: &Inc1, h: &Inc2Grid) -> Result<f64> {
    if g.dim() != 1 || h.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: g.dim().max(h.dim()),
        });
    }
    if g.grid() != h.grid() {
        return Err(Error::InvalidGrid("g and h live on different grids".into()));
    }
    let n = g.len();
    let gv = |i: usize| g.at(i)[0];
    let hv = |i: usize, j: usize| h.get(i, j)[0];
    let mut worst = 0.0f64;
    for s in 0..n {
        for u in s + 1..n {
            for t in u + 1..n {
                let lhs = gv(s) * hv(s, t) - gv(s) * hv(s, u) - gv(u) * hv(u, t);
                let dh = hv(s, t) - hv(s, u) - hv(u, t);
                let rhs = gv(s) * dh - (gv(u) - gv(s)) * hv(u, t);
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> TimeGrid {
        TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.1, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.6, 0.5]).is_err());
        let g = TimeGrid::uniform(8, 2.0).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.horizon(), 2.0);
        assert_eq!(g.uniform_spacing(), Some(0.25));
        assert_eq!(g.index_of(0.75), Some(3));
        assert_eq!(g.index_of(0.7), None);
        assert_eq!(g.subgrid(4).unwrap().points(), &[0.0, 1.0, 2.0]);
        assert!(g.subgrid(3).is_err());
    }

    #[test]
    fn delta1_constant_is_zero() {
        let f = Inc1::from_fn(TimeGrid::uniform(5, 1.0).unwrap(), 2, |_, v| {
            v[0] = 3.0;
            v[1] = -1.0;
        });
        assert_eq!(delta1(&f).max_abs(), 0.0);
    }

    #[test]
    fn delta1_identity_path() {
        let f = Inc1::scalar(grid3(), vec![0.0, 0.5, 1.0]).unwrap();
        let d = delta1(&f);
        assert_eq!(d.get(0, 1), &[0.5]);
        assert_eq!(d.get(1, 2), &[0.5]);
        assert_eq!(d.get(0, 2), &[1.0]);
        assert_eq!(d.get(1, 1), &[0.0]);
    }

    #[test]
    fn delta2_of_square_lag() {
        let g = TimeGrid::uniform(6, 1.0).unwrap();
        let h = Inc2Grid::from_fn(g.clone(), 1, |i, j, o| o[0] = (g.t(j) - g.t(i)).powi(2));
        let dh = delta2(&h);
        for (i, j, k, v) in dh.iter() {
            let expected = 2.0 * (g.t(j) - g.t(i)) * (g.t(k) - g.t(j));
            assert!((v[0] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn delta2_of_weighted_increment() {
        // h_st = g_s (x_t - x_s)  =>  (delta h)_sut = -(g_u - g_s)(x_t - x_u)
        let grid = TimeGrid::uniform(7, 1.0).unwrap();
        let g: Vec<f64> = grid.points().iter().map(|t| (3.0 * t).cos()).collect();
        let x: Vec<f64> = grid.points().iter().map(|t| t * t - t).collect();
        let h = Inc2Grid::from_fn(grid.clone(), 1, |i, j, o| o[0] = g[i] * (x[j] - x[i]));
        for (i, j, k, v) in delta2(&h).iter() {
            let expected = -(g[j] - g[i]) * (x[k] - x[j]);
            assert!((v[0] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn norms() {
        let g = TimeGrid::uniform(10, 1.0).unwrap();
        let lin = Inc2Grid::from_fn(g.clone(), 1, |i, j, o| o[0] = g.t(j) - g.t(i));
        assert!((holder_norm2(&lin, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let root = Inc2Grid::from_fn(g.clone(), 1, |i, j, o| o[0] = (g.t(j) - g.t(i)).sqrt());
        assert!((holder_norm2(&root, 0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!(holder_norm2(&lin, 0.0).is_err());
        assert_eq!(holder_norm3(&Inc3Grid::zeros(g.clone(), 1), 1.0).unwrap(), 0.0);

        // sup of 2(u-s)(t-u)/(t-s)^2 is attained at the midpoint
        let sq = Inc2Grid::from_fn(g.clone(), 1, |i, j, o| o[0] = (g.t(j) - g.t(i)).powi(2));
        assert!((holder_norm3(&delta2(&sq), 2.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn path_seminorm_matches_pair_scan() {
        let grid = TimeGrid::new(vec![0.0, 0.1, 0.35, 0.4, 0.8, 1.0]).unwrap();
        let f = Inc1::scalar(grid.clone(), vec![0.0, 0.3, -0.2, 0.1, 0.5, 0.45]).unwrap();
        let direct = holder_norm2(&delta1(&f), 0.4).unwrap();
        assert!((holder_norm1(&f, 0.4).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn product_rule_trivial_g() {
        let grid = TimeGrid::uniform(6, 1.0).unwrap();
        let g = Inc1::scalar(grid.clone(), vec![1.0; 7]).unwrap();
        let h = Inc2Grid::from_fn(grid.clone(), 1, |i, j, o| o[0] = (i * 7 + j) as f64 * 0.1);
        assert_eq!(product_rule_check(&g, &h).unwrap(), 0.0);
    }

    #[test]
    fn inc3_indexing_is_a_bijection() {
        let g = TimeGrid::uniform(9, 1.0).unwrap();
        let h = Inc3Grid::zeros(g, 1);
        let mut seen = vec![false; h.values.len()];
        for i in 0..10 {
            for j in i + 1..10 {
                for k in j + 1..10 {
                    let idx = h.index(i, j, k);
                    assert!(!seen[idx]);
                    seen[idx] = true;
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }
}
