//! Controlled paths and the rough integral.
//!
//! A path `z` is controlled by `x` when `z_t - z_s = zeta_s (x_t - x_s) + r_{st}`
//! with a remainder `r` of order `eta > gamma`. For such an integrand the
//! compensated Riemann sums
//!
//! ```text
//! sum_q  m_{t_q} dx_{t_q t_{q+1}} + zeta_{t_q} X_{t_q t_{q+1}}
//! ```
//!
//! converge as the mesh goes to zero whenever `eta + gamma > 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::{path_seminorm, Inc1, Inc2Grid, TimeGrid};
use crate::roughpath::RoughPath;

const MAX_DEPTH: u32 = 18;
const CAUCHY_TOL: f64 = 1e-9;

/// A map `R^in -> R^out` with Jacobian (`out x in`, row-major).
pub trait SmoothMap {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn eval(&self, xi: &[f64], out: &mut [f64]);
    fn jacobian(&self, xi: &[f64], out: &mut [f64]);
}

/// A scalar function with gradient and Hessian (`d x d`, row-major).
pub trait ScalarField {
    fn dim(&self) -> usize;
    fn value(&self, xi: &[f64]) -> f64;
    fn gradient(&self, xi: &[f64], out: &mut [f64]);
    fn hessian(&self, xi: &[f64], out: &mut [f64]);
}

/// [`SmoothMap`] built from two closures.
pub struct FnMap<F, J> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub f: F,
    pub jac: J,
}

impl<F, J> FnMap<F, J>
where
    F: Fn(&[f64], &mut [f64]),
    J: Fn(&[f64], &mut [f64]),
{
    pub fn new(in_dim: usize, out_dim: usize, f: F, jac: J) -> Self {
        Self { in_dim, out_dim, f, jac }
    }
}

impl<F, J> SmoothMap for FnMap<F, J>
where
    F: Fn(&[f64], &mut [f64]),
    J: Fn(&[f64], &mut [f64]),
{
    fn in_dim(&self) -> usize {
        self.in_dim
    }
    fn out_dim(&self) -> usize {
        self.out_dim
    }
    fn eval(&self, xi: &[f64], out: &mut [f64]) {
        (self.f)(xi, out)
    }
    fn jacobian(&self, xi: &[f64], out: &mut [f64]) {
        (self.jac)(xi, out)
    }
}

/// [`ScalarField`] built from three closures.
pub struct FnField<V, G, H> {
    pub dim: usize,
    pub value: V,
    pub gradient: G,
    pub hessian: H,
}

impl<V, G, H> FnField<V, G, H>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
    H: Fn(&[f64], &mut [f64]),
{
    pub fn new(dim: usize, value: V, gradient: G, hessian: H) -> Self {
        Self {
            dim,
            value,
            gradient,
            hessian,
        }
    }
}

impl<V, G, H> ScalarField for FnField<V, G, H>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
    H: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, xi: &[f64]) -> f64 {
        (self.value)(xi)
    }
    fn gradient(&self, xi: &[f64], out: &mut [f64]) {
        (self.gradient)(xi, out)
    }
    fn hessian(&self, xi: &[f64], out: &mut [f64]) {
        (self.hessian)(xi, out)
    }
}

/// Gradient of a scalar field seen as a smooth map (its Jacobian is the Hessian).
pub struct Gradient<'a, G: ScalarField + ?Sized>(pub &'a G);

impl<G: ScalarField + ?Sized> SmoothMap for Gradient<'_, G> {
    fn in_dim(&self) -> usize {
        self.0.dim()
    }
    fn out_dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, xi: &[f64], out: &mut [f64]) {
        self.0.gradient(xi, out)
    }
    fn jacobian(&self, xi: &[f64], out: &mut [f64]) {
        self.0.hessian(xi, out)
    }
}

/// `z` controlled by the base rough path with derivative `zeta` (`n x d` per point).
#[derive(Clone, Debug)]
pub struct ControlledPath<'a> {
    pub z: Inc1,
    zeta: Vec<f64>,
    pub eta: f64,
    base: &'a RoughPath,
}

impl<'a> ControlledPath<'a> {
    pub fn new(z: Inc1, zeta: Vec<f64>, eta: f64, base: &'a RoughPath) -> Result<Self> {
        if z.grid() != base.grid() {
            return Err(Error::InvalidGrid("controlled path and rough path grids differ".into()));
        }
        let expected = z.len() * z.dim() * base.dim();
        if zeta.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: zeta.len(),
            });
        }
        if !(eta > base.gamma()) {
            return Err(Error::InvalidExponent {
                name: "eta",
                value: eta,
                reason: "remainder order must exceed the driver exponent",
            });
        }
        Ok(Self { z, zeta, eta, base })
    }

    pub fn base(&self) -> &'a RoughPath {
        self.base
    }

    /// Gubinelli derivative at grid point `i` (`n x d`, row-major).
    pub fn zeta(&self, i: usize) -> &[f64] {
        let nd = self.z.dim() * self.base.dim();
        &self.zeta[i * nd..(i + 1) * nd]
    }

    /// `r_{ij} = z_j - z_i - zeta_i (x_j - x_i)`.
    pub fn remainder_at(&self, i: usize, j: usize) -> Vec<f64> {
        let (n, d) = (self.z.dim(), self.base.dim());
        let dx = self.base.increment(i, j);
        let zeta = self.zeta(i);
        (0..n)
            .map(|a| {
                let lin: f64 = (0..d).map(|b| zeta[a * d + b] * dx[b]).sum();
                self.z.at(j)[a] - self.z.at(i)[a] - lin
            })
            .collect()
    }

    /// Remainder on every pair (quadratic memory; for small grids).
    pub fn remainder(&self) -> Inc2Grid {
        Inc2Grid::from_fn(self.z.grid().clone(), self.z.dim(), |i, j, out| {
            out.copy_from_slice(&self.remainder_at(i, j))
        })
    }

    /// `sup |r_{st}| / (t - s)^level` over pairs at most `max_lag` apart.
    pub fn remainder_seminorm(&self, level: f64, max_lag: usize) -> f64 {
        use rayon::prelude::*;
        let grid = self.z.grid();
        let n = grid.len();
        (0..n - 1)
            .into_par_iter()
            .map(|i| {
                let mut best = 0.0f64;
                for j in i + 1..(i + max_lag + 1).min(n) {
                    let r = self.remainder_at(i, j);
                    let nrm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                    best = best.max(nrm / (grid.t(j) - grid.t(i)).powf(level));
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `gamma`-seminorm of the derivative path.
    pub fn zeta_seminorm(&self, gamma: f64) -> f64 {
        let nd = self.z.dim() * self.base.dim();
        path_seminorm(self.z.grid(), nd, &self.zeta, gamma, usize::MAX)
    }
}

/// `z = f(x)` with `zeta = Df(x)` and remainder order `gamma (1 + lambda)`.
pub fn compose_smooth<'a, F: SmoothMap + ?Sized>(f: &F, lambda: f64, rp: &'a RoughPath) -> Result<ControlledPath<'a>> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidExponent {
            name: "lambda",
            value: lambda,
            reason: "must lie in (0, 1]",
        });
    }
    if f.in_dim() != rp.dim() {
        return Err(Error::DimensionMismatch {
            expected: rp.dim(),
            got: f.in_dim(),
        });
    }
    let (n, d) = (f.out_dim(), rp.dim());
    let grid = rp.grid().clone();
    let mut zeta = vec![0.0; grid.len() * n * d];
    let mut z = Inc1::zeros(grid, n);
    for i in 0..rp.len() {
        let xi = rp.x().at(i);
        f.eval(xi, z.at_mut(i));
        f.jacobian(xi, &mut zeta[i * n * d..(i + 1) * n * d]);
    }
    check_finite(z.values())?;
    check_finite(&zeta)?;
    ControlledPath::new(z, zeta, rp.gamma() * (1.0 + lambda), rp)
}

/// `w = g(z)` with derivative `Dg(z) zeta`.
pub fn compose_controlled<'a, G: SmoothMap + ?Sized>(
    g: &G,
    lambda: f64,
    cp: &ControlledPath<'a>,
) -> Result<ControlledPath<'a>> {
    let rp = cp.base();
    let (n, d) = (cp.z.dim(), rp.dim());
    if g.in_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.in_dim(),
        });
    }
    let k = g.out_dim();
    let grid = rp.grid().clone();
    let mut w = Inc1::zeros(grid.clone(), k);
    let mut zeta = vec![0.0; grid.len() * k * d];
    let mut jac = vec![0.0; k * n];
    for i in 0..grid.len() {
        let zi = cp.z.at(i);
        g.eval(zi, w.at_mut(i));
        g.jacobian(zi, &mut jac);
        let inner = cp.zeta(i);
        let out = &mut zeta[i * k * d..(i + 1) * k * d];
        for a in 0..k {
            for b in 0..d {
                out[a * d + b] = (0..n).map(|c| jac[a * n + c] * inner[c * d + b]).sum();
            }
        }
    }
    check_finite(w.values())?;
    check_finite(&zeta)?;
    let eta = cp.eta.min(rp.gamma() * (1.0 + lambda));
    ControlledPath::new(w, zeta, eta, rp)
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|a| a.is_finite()) {
        Ok(())
    } else {
        Err(Error::Config("smooth map produced a non-finite value".into()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralResult {
    pub value: Vec<f64>,
    /// Richardson-style estimate `|S_k - S_{k-1}| / (2^theta - 1)`.
    pub error: f64,
    pub depth: u32,
    /// False when the grid was exhausted before the Cauchy criterion was met.
    pub converged: bool,
}

fn partition(s: usize, t: usize, depth: u32) -> Vec<usize> {
    let len = t - s;
    let parts = 1usize << depth.min(62);
    if parts >= len {
        return (s..=t).collect();
    }
    let mut out: Vec<usize> = (0..=parts).map(|j| s + j * len / parts).collect();
    out.dedup();
    out
}

/// Compensated Riemann sum of `m` against `x` over the given partition.
fn compensated_sum(m: &ControlledPath, points: &[usize]) -> Vec<f64> {
    let rp = m.base();
    let d = rp.dim();
    let n = m.z.dim() / d;
    let mut acc = vec![0.0; n];
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dx = rp.increment(a, b);
        let x2 = rp.chen_extend(a, b).expect("increasing partition");
        let mq = m.z.at(a);
        let zeta = m.zeta(a);
        for k in 0..n {
            let mut v = 0.0;
            for i in 0..d {
                v += mq[k * d + i] * dx[i];
                for i1 in 0..d {
                    // zeta row (k, i), column i1 pairs with X^{i1 i}
                    v += zeta[(k * d + i) * d + i1] * x2[i1 * d + i];
                }
            }
            acc[k] += v;
        }
    }
    acc
}

/// Rough integral of `m` (values `n x d`, row-major, `n = 1` for `R^d`-valued
/// integrands) between grid indices `s < t`, by compensated sums on nested
/// dyadic index partitions.
pub fn rough_integral(m: &ControlledPath, s: usize, t: usize) -> Result<IntegralResult> {
    let rp = m.base();
    let gamma = rp.gamma();
    if m.eta + gamma <= 1.0 {
        return Err(Error::RegularityBudget(m.eta + gamma));
    }
    if s >= t || t >= rp.len() {
        return Err(Error::IndexOrder(s, t));
    }
    let d = rp.dim();
    if !m.z.dim().is_multiple_of(d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.z.dim(),
        });
    }
    let theta = (m.eta + gamma - 1.0).clamp(0.05, 2.0);
    let richardson = 1.0 / (2f64.powf(theta) - 1.0);
    let m_scale = (s..=t).map(|q| m.z.norm_at(q)).fold(0.0, f64::max);
    let x_scale = (s..=t)
        .map(|q| rp.increment(s, q).iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let tol = CAUCHY_TOL * (m_scale * x_scale).max(f64::MIN_POSITIVE);
    let mut prev = compensated_sum(m, &[s, t]);
    let mut last_diff = f64::INFINITY;
    for depth in 1..=MAX_DEPTH {
        let points = partition(s, t, depth);
        let exhausted = points.len() == t - s + 1;
        let cur = compensated_sum(m, &points);
        let diff = cur.iter().zip(&prev).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        last_diff = diff;
        if diff < tol || exhausted {
            return Ok(IntegralResult {
                value: cur,
                error: diff * richardson,
                depth,
                converged: diff < tol,
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        depth: MAX_DEPTH as usize,
        difference: last_diff,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ItoStratonovich {
    /// Grid indices of the probe points.
    pub probes: Vec<usize>,
    pub depth: u32,
    /// Largest `|g(x_t) - g(x_s) - I_{st}|` over probe pairs.
    pub sup: f64,
    #[serde(skip)]
    pub residuals: Inc2Grid,
}

/// Residual of the change-of-variables formula `g(x_t) - g(x_s) = int_s^t grad g(x) dx`
/// with compensated sums on the uniform index partition of `2^depth` cells,
/// over all pairs of at most 65 probe points. `lambda` is the Hölder order of
/// the Hessian; `(2 + lambda) gamma > 1` is required.
pub fn ito_stratonovich_residual<G: ScalarField + ?Sized>(
    g: &G,
    rp: &RoughPath,
    depth: u32,
    lambda: f64,
) -> Result<ItoStratonovich> {
    let gamma = rp.gamma();
    if (2.0 + lambda) * gamma <= 1.0 {
        return Err(Error::RegularityBudget((1.0 + lambda) * gamma + gamma));
    }
    let n = rp.len() - 1;
    if !n.is_power_of_two() || (1usize << depth) > n {
        return Err(Error::InvalidGrid(format!(
            "need a power-of-two grid with at least 2^{depth} intervals, got {n}"
        )));
    }
    let d = rp.dim();
    let cells = 1usize << depth;
    let step = n / cells;
    let probes_count = cells.min(64);
    let probe_step = n / probes_count;
    let mut grad = vec![0.0; d];
    let mut hess = vec![0.0; d * d];
    // prefix[c] = compensated sum over the first c cells
    let mut prefix = vec![0.0; cells + 1];
    for c in 0..cells {
        let (a, b) = (c * step, (c + 1) * step);
        let xa = rp.x().at(a);
        g.gradient(xa, &mut grad);
        g.hessian(xa, &mut hess);
        let dx = rp.increment(a, b);
        let x2 = rp.chen_extend(a, b)?;
        let mut v = 0.0;
        for i in 0..d {
            v += grad[i] * dx[i];
            for i1 in 0..d {
                v += hess[i * d + i1] * x2[i1 * d + i];
            }
        }
        prefix[c + 1] = prefix[c] + v;
    }
    let probes: Vec<usize> = (0..=probes_count).map(|k| k * probe_step).collect();
    let probe_grid = TimeGrid::new(probes.iter().map(|&i| rp.grid().t(i)).collect())?;
    let gx: Vec<f64> = probes.iter().map(|&i| g.value(rp.x().at(i))).collect();
    let cell_of = |i: usize| i / step;
    let residuals = Inc2Grid::from_fn(probe_grid, 1, |a, b, out| {
        let integral = prefix[cell_of(probes[b])] - prefix[cell_of(probes[a])];
        out[0] = gx[b] - gx[a] - integral;
    });
    let sup = residuals.max_abs();
    Ok(ItoStratonovich {
        probes,
        depth,
        sup,
        residuals,
    })
}

/// Largest deviation of `delta(I - m dx - zeta X)` from `r dx + delta(zeta) X`
/// over triples of the given indices, with `I` the finest-grid compensated
/// sums. Only the scalar case `n = 1` is supported.
pub fn sewing_consistency(m: &ControlledPath, indices: &[usize]) -> Result<f64> {
    let rp = m.base();
    let d = rp.dim();
    if m.z.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.z.dim(),
        });
    }
    let germ = |a: usize, b: usize| -> f64 { compensated_sum(m, &[a, b])[0] };
    let integral = |a: usize, b: usize| -> f64 { compensated_sum(m, &(a..=b).collect::<Vec<_>>())[0] };
    let mut worst = 0.0f64;
    for (p, &s) in indices.iter().enumerate() {
        for (q, &u) in indices.iter().enumerate().skip(p + 1) {
            for &t in indices.iter().skip(q + 1) {
                let defect = |a: usize, b: usize| integral(a, b) - germ(a, b);
                let lhs = defect(s, t) - defect(s, u) - defect(u, t);
                let r = m.remainder_at(s, u);
                let dx = rp.increment(u, t);
                let x2 = rp.chen_extend(u, t)?;
                let (zs, zu) = (m.zeta(s), m.zeta(u));
                let mut rhs: f64 = r.iter().zip(&dx).map(|(a, b)| a * b).sum();
                for i in 0..d {
                    for i1 in 0..d {
                        rhs += (zu[i * d + i1] - zs[i * d + i1]) * x2[i1 * d + i];
                    }
                }
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth_rp(n: usize) -> RoughPath {
        RoughPath::from_smooth(
            TimeGrid::uniform(n, 1.0).unwrap(),
            1,
            |t, v| v[0] = (2.0 * t).sin(),
            |t, v| v[0] = 2.0 * (2.0 * t).cos(),
            0.45,
        )
        .unwrap()
    }

    fn identity(d: usize) -> FnMap<impl Fn(&[f64], &mut [f64]), impl Fn(&[f64], &mut [f64])> {
        FnMap::new(
            d,
            d,
            |xi: &[f64], out: &mut [f64]| out.copy_from_slice(xi),
            move |_: &[f64], out: &mut [f64]| {
                out.iter_mut().for_each(|v| *v = 0.0);
                for k in 0..d {
                    out[k * d + k] = 1.0;
                }
            },
        )
    }

    #[test]
    fn identity_has_zero_remainder() {
        let rp = smooth_rp(32);
        let cp = compose_smooth(&identity(1), 1.0, &rp).unwrap();
        assert!(cp.remainder().max_abs() < 1e-15);
    }

    #[test]
    fn square_remainder_is_increment_squared() {
        let rp = smooth_rp(32);
        let sq = FnMap::new(1, 1, |xi: &[f64], o: &mut [f64]| o[0] = xi[0] * xi[0], |xi: &[f64], o: &mut [f64]| o[0] = 2.0 * xi[0]);
        let cp = compose_smooth(&sq, 1.0, &rp).unwrap();
        for (i, j, r) in cp.remainder().iter() {
            let dx = rp.increment(i, j)[0];
            assert!((r[0] - dx * dx).abs() < 1e-14);
        }
    }

    #[test]
    fn self_integral_is_exact() {
        let rp = smooth_rp(64);
        let cp = compose_smooth(&identity(1), 1.0, &rp).unwrap();
        let res = rough_integral(&cp, 3, 50).unwrap();
        let (xa, xb) = (rp.x().at(3)[0], rp.x().at(50)[0]);
        assert!((res.value[0] - (xb * xb - xa * xa) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn budget_and_order_errors() {
        let rp = smooth_rp(8).with_gamma(0.3).unwrap();
        let cp = compose_smooth(&identity(1), 0.5, &rp).unwrap();
        assert!(matches!(rough_integral(&cp, 0, 8), Err(Error::RegularityBudget(_))));
        let rp = smooth_rp(8);
        let cp = compose_smooth(&identity(1), 1.0, &rp).unwrap();
        assert!(matches!(rough_integral(&cp, 4, 4), Err(Error::IndexOrder(4, 4))));
    }

    #[test]
    fn consistency_identity() {
        let rp = smooth_rp(16);
        let f = FnMap::new(1, 1, |xi: &[f64], o: &mut [f64]| o[0] = xi[0].cos(), |xi: &[f64], o: &mut [f64]| o[0] = -xi[0].sin());
        let cp = compose_smooth(&f, 1.0, &rp).unwrap();
        let defect = sewing_consistency(&cp, &[0, 3, 7, 12, 16]).unwrap();
        assert!(defect < 1e-13, "{defect}");
    }
}
