//! Fractional Brownian motion sampled exactly on a uniform grid.
//!
//! Increments (fractional Gaussian noise) are drawn by circulant embedding of
//! the autocovariance `c(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2`. If the
//! embedding has a negative eigenvalue the sampler falls back to the
//! Durbin-Levinson recursion, which is the sequential form of the Cholesky
//! factorisation of the Toeplitz covariance.

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{lift_piecewise_linear, RoughPath};
use crate::error::{Error, Result};
use crate::increments::{Inc1, TimeGrid};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FbmMethod {
    #[default]
    Circulant,
    Levinson,
}

/// Parameters of a sampled fBm rough path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FbmSpec {
    pub hurst: f64,
    #[serde(default = "one")]
    pub dim: usize,
    pub n: usize,
    #[serde(default = "default_refine")]
    pub refine: usize,
    pub seed: u64,
    #[serde(default = "one_f")]
    pub horizon: f64,
    /// `gamma = hurst - gamma_margin`.
    #[serde(default = "default_margin")]
    pub gamma_margin: f64,
    #[serde(default)]
    pub method: FbmMethod,
}

fn one() -> usize {
    1
}
fn one_f() -> f64 {
    1.0
}
fn default_refine() -> usize {
    4
}
fn default_margin() -> f64 {
    0.02
}

impl FbmSpec {
    pub fn new(hurst: f64, dim: usize, n: usize, refine: usize, seed: u64) -> Self {
        Self {
            hurst,
            dim,
            n,
            refine,
            seed,
            horizon: 1.0,
            gamma_margin: default_margin(),
            method: FbmMethod::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 1.0 / 3.0 && self.hurst <= 0.5) {
            return Err(Error::HurstOutOfRange(self.hurst));
        }
        if self.refine < 4 {
            return Err(Error::RefineFactor(self.refine));
        }
        if self.dim == 0 || self.n == 0 {
            return Err(Error::Config("fBm needs dim >= 1 and n >= 1".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.gamma_margin >= 0.0 && self.gamma_margin < self.hurst) {
            return Err(Error::Config(format!("gamma margin {} out of range", self.gamma_margin)));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.hurst - self.gamma_margin
    }

    /// The fBm path on the fine grid of `n * refine` intervals.
    pub fn sample_fine(&self) -> Result<Inc1> {
        self.validate()?;
        let n_fine = self.n * self.refine;
        let grid = TimeGrid::uniform(n_fine, self.horizon)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let scale = (self.horizon / n_fine as f64).powf(self.hurst);
        let mut values = vec![0.0; (n_fine + 1) * self.dim];
        for c in 0..self.dim {
            let noise = fbm_increments(self.hurst, n_fine, self.method, &mut rng)?;
            let mut acc = 0.0;
            for (k, z) in noise.iter().enumerate() {
                acc += scale * z;
                values[(k + 1) * self.dim + c] = acc;
            }
        }
        Inc1::new(grid, self.dim, values)
    }

    /// Sample and lift onto the coarse grid of `n` intervals.
    pub fn rough_path(&self) -> Result<RoughPath> {
        let fine = self.sample_fine()?;
        let coarse = TimeGrid::uniform(self.n, self.horizon)?;
        lift_piecewise_linear(&fine, &coarse, self.gamma())
    }
}

/// Convenience wrapper around [`FbmSpec::rough_path`].
pub fn fbm_rough_path(hurst: f64, dim: usize, n: usize, refine: usize, seed: u64) -> Result<RoughPath> {
    FbmSpec::new(hurst, dim, n, refine, seed).rough_path()
}

fn autocov(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// `n` samples of unit-step fractional Gaussian noise.
pub fn fbm_increments(hurst: f64, n: usize, method: FbmMethod, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if method == FbmMethod::Circulant {
        if let Some(v) = circulant(hurst, n, rng) {
            return Ok(v);
        }
        warn!("circulant embedding not nonnegative for H = {hurst}, n = {n}; using Levinson recursion");
    }
    Ok(levinson(hurst, n, rng))
}

fn circulant(hurst: f64, n: usize, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|k| {
            let lag = if k <= n { k } else { m - k };
            Complex::new(autocov(hurst, lag), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let top = row.iter().fold(0.0f64, |a, c| a.max(c.re.abs()));
    if row.iter().any(|c| c.re < -1e-10 * top) {
        return None;
    }
    let mut w: Vec<Complex<f64>> = row
        .iter()
        .map(|lam| {
            let amp = (lam.re.max(0.0) / m as f64).sqrt();
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Complex::new(amp * a, amp * b)
        })
        .collect();
    fft.process(&mut w);
    Some(w[..n].iter().map(|c| c.re).collect())
}

fn levinson(hurst: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let cov: Vec<f64> = (0..n).map(|k| autocov(hurst, k)).collect();
    let mut out = Vec::with_capacity(n);
    let mut phi = vec![0.0; n];
    let mut prev = vec![0.0; n];
    let mut var = cov[0];
    let z: f64 = StandardNormal.sample(rng);
    out.push(z * var.sqrt());
    for k in 1..n {
        let mut num = cov[k];
        for j in 0..k - 1 {
            num -= prev[j] * cov[k - 1 - j];
        }
        let refl = num / var;
        phi[k - 1] = refl;
        for j in 0..k - 1 {
            phi[j] = prev[j] - refl * prev[k - 2 - j];
        }
        var *= 1.0 - refl * refl;
        let mean: f64 = (0..k).map(|j| phi[j] * out[k - 1 - j]).sum();
        let z: f64 = StandardNormal.sample(rng);
        out.push(mean + z * var.sqrt());
        prev[..k].copy_from_slice(&phi[..k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guards() {
        assert!(matches!(FbmSpec::new(0.2, 1, 16, 4, 1).rough_path(), Err(Error::HurstOutOfRange(_))));
        assert!(matches!(FbmSpec::new(0.4, 1, 16, 2, 1).rough_path(), Err(Error::RefineFactor(2))));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = fbm_rough_path(0.4, 2, 64, 4, 11).unwrap();
        let b = fbm_rough_path(0.4, 2, 64, 4, 11).unwrap();
        assert_eq!(a, b);
        let c = fbm_rough_path(0.4, 2, 64, 4, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn lift_is_geometric() {
        let rp = fbm_rough_path(0.35, 2, 128, 4, 3).unwrap();
        assert!(rp.symmetry_residual() < 1e-10);
        assert!((rp.gamma() - 0.33).abs() < 1e-12);
    }

    #[test]
    fn levinson_matches_covariance_at_lag_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let reps = 4000;
        let (mut c0, mut c1) = (0.0, 0.0);
        for _ in 0..reps {
            let v = levinson(0.4, 4, &mut rng);
            c0 += v[0] * v[0];
            c1 += v[1] * v[2];
        }
        c0 /= reps as f64;
        c1 /= reps as f64;
        assert!((c0 - 1.0).abs() < 0.1);
        assert!((c1 - autocov(0.4, 1)).abs() < 0.06);
    }
}
