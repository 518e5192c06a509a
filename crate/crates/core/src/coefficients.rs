//! Radial power-type vector fields `sigma^j(xi) = v_j c1 min(|xi|^kappa, c2)`.
//!
//! The radial profile `s(r) = c1 min(r^kappa, c2)` is flat above the cap
//! radius `r_c = c2^{1/kappa}`. Derivatives at the kink use the branch below
//! the cap unless [`Smoothing::Mollified`] is selected, which blends the two
//! branches with a quintic smoothstep over a relative width of `1e-3`.
//!
//! Storage conventions for a field on `R^m` driven by `d` components:
//! * `sigma`: `m x d`, entry `(i, j)` at `i * d + j`;
//! * `dsigma`: entry `d_k sigma^{ij}` at `(j * m + i) * m + k`;
//! * `dsigma_sigma`: `(D sigma^j . sigma^l)^i` at `(i * d + l) * d + j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::norm;

const MOLLIFY_WIDTH: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    #[default]
    None,
    Mollified,
}

/// JSON form of a coefficient. A missing or null `c2` means no cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub kappa: f64,
    #[serde(default = "unit")]
    pub c1: f64,
    #[serde(default)]
    pub c2: Option<f64>,
    #[serde(default = "scalar_direction")]
    pub directions: Vec<Vec<f64>>,
    #[serde(default)]
    pub smoothing: Smoothing,
}

fn unit() -> f64 {
    1.0
}
fn scalar_direction() -> Vec<Vec<f64>> {
    vec![vec![1.0]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerCoefficient {
    kappa: f64,
    c1: f64,
    c2: f64,
    directions: Vec<Vec<f64>>,
    smoothing: Smoothing,
    m: usize,
}

impl PowerCoefficient {
    pub fn new(kappa: f64, c1: f64, c2: f64, directions: Vec<Vec<f64>>, smoothing: Smoothing) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidExponent {
                name: "kappa",
                value: kappa,
                reason: "must lie in (0, 1)",
            });
        }
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::Config(format!("c1 must be positive and finite, got {c1}")));
        }
        if !(c2 > 0.0) {
            return Err(Error::Config(format!("c2 must be positive, got {c2}")));
        }
        let m = directions.first().map(Vec::len).unwrap_or(0);
        if m == 0 || directions.iter().any(|v| v.len() != m) {
            return Err(Error::Config("directions must be non-empty vectors of equal length".into()));
        }
        Ok(Self {
            kappa,
            c1,
            c2,
            directions,
            smoothing,
            m,
        })
    }

    /// Scalar field `sigma(xi) = c1 min(|xi|^kappa, c2)` on the line.
    pub fn scalar(kappa: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(kappa, c1, c2, vec![vec![1.0]], Smoothing::None)
    }

    pub fn from_spec(spec: &CoefficientSpec) -> Result<Self> {
        Self::new(
            spec.kappa,
            spec.c1,
            spec.c2.unwrap_or(f64::INFINITY),
            spec.directions.clone(),
            spec.smoothing,
        )
    }

    pub fn spec(&self) -> CoefficientSpec {
        CoefficientSpec {
            kappa: self.kappa,
            c1: self.c1,
            c2: self.c2.is_finite().then_some(self.c2),
            directions: self.directions.clone(),
            smoothing: self.smoothing,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }
    /// State dimension.
    pub fn m(&self) -> usize {
        self.m
    }
    /// Number of driving components.
    pub fn d(&self) -> usize {
        self.directions.len()
    }
    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// Radius above which the profile is flat.
    pub fn cap_radius(&self) -> f64 {
        self.c2.powf(1.0 / self.kappa)
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.smoothing = smoothing;
        self
    }

    /// `(s, s', s'')` of the radial profile at `r > 0` (`s'`, `s''` are
    /// garbage-free only for `r > 0`).
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        let (k, c1) = (self.kappa, self.c1);
        let power = |r: f64| (c1 * r.powf(k), c1 * k * r.powf(k - 1.0), c1 * k * (k - 1.0) * r.powf(k - 2.0));
        if !self.c2.is_finite() {
            return power(r);
        }
        let rc = self.cap_radius();
        let flat = c1 * self.c2;
        match self.smoothing {
            Smoothing::None => {
                if r < rc {
                    power(r)
                } else {
                    (flat, 0.0, 0.0)
                }
            }
            Smoothing::Mollified => {
                let (lo, hi) = (rc * (1.0 - MOLLIFY_WIDTH), rc * (1.0 + MOLLIFY_WIDTH));
                if r <= lo {
                    power(r)
                } else if r >= hi {
                    (flat, 0.0, 0.0)
                } else {
                    let w = hi - lo;
                    let tau = (r - lo) / w;
                    let b = tau.powi(3) * (10.0 - 15.0 * tau + 6.0 * tau * tau);
                    let b1 = 30.0 * tau * tau * (1.0 - tau).powi(2) / w;
                    let b2 = 60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau) / (w * w);
                    let (p, p1, p2) = power(r);
                    let gap = p - flat;
                    (
                        flat + (1.0 - b) * gap,
                        (1.0 - b) * p1 - b1 * gap,
                        (1.0 - b) * p2 - 2.0 * b1 * p1 - b2 * gap,
                    )
                }
            }
        }
    }

    /// `sigma(xi)` as an `m x d` matrix (row-major).
    pub fn sigma(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m * self.d()];
        self.sigma_into(xi, &mut out);
        out
    }

    pub fn sigma_into(&self, xi: &[f64], out: &mut [f64]) {
        let r = norm(xi);
        let s = if r == 0.0 { 0.0 } else { self.profile(r).0 };
        let d = self.d();
        for (j, v) in self.directions.iter().enumerate() {
            for i in 0..self.m {
                out[i * d + j] = v[i] * s;
            }
        }
    }

    /// First derivative tensor; see the module docs for the layout.
    pub fn dsigma(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let r = norm(xi);
        if r == 0.0 {
            return Err(Error::OriginDerivative);
        }
        let (_, s1, _) = self.profile(r);
        let m = self.m;
        let mut out = vec![0.0; self.d() * m * m];
        for (j, v) in self.directions.iter().enumerate() {
            for i in 0..m {
                for k in 0..m {
                    out[(j * m + i) * m + k] = v[i] * s1 * xi[k] / r;
                }
            }
        }
        Ok(out)
    }

    /// `(D sigma^j . sigma^l)^i` at `(i * d + l) * d + j`.
    pub fn dsigma_sigma(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m * self.d() * self.d()];
        self.dsigma_sigma_into(xi, &mut out)?;
        Ok(out)
    }

    pub fn dsigma_sigma_into(&self, xi: &[f64], out: &mut [f64]) -> Result<()> {
        let r = norm(xi);
        if r == 0.0 {
            return Err(Error::OriginDerivative);
        }
        let (s, s1, _) = self.profile(r);
        let d = self.d();
        for (l, vl) in self.directions.iter().enumerate() {
            let radial: f64 = vl.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() / r;
            for (j, vj) in self.directions.iter().enumerate() {
                for i in 0..self.m {
                    out[(i * d + l) * d + j] = vj[i] * s1 * s * radial;
                }
            }
        }
        Ok(())
    }

    /// Frobenius norm of `D sigma` at `xi`.
    pub fn dsigma_norm(&self, xi: &[f64]) -> Result<f64> {
        Ok(norm(&self.dsigma(xi)?))
    }

    /// Frobenius norm of `D^2 sigma` at `xi`.
    pub fn d2sigma_norm(&self, xi: &[f64]) -> Result<f64> {
        let r = norm(xi);
        if r == 0.0 {
            return Err(Error::OriginDerivative);
        }
        let (_, s1, s2) = self.profile(r);
        let v2: f64 = self.directions.iter().map(|v| v.iter().map(|a| a * a).sum::<f64>()).sum();
        let tangential = (self.m as f64 - 1.0) * (s1 / r).powi(2);
        Ok(v2.sqrt() * (s2 * s2 + tangential).sqrt())
    }

    /// Lamperti pair of a scalar field with positive direction.
    pub fn lamperti(&self) -> Result<Lamperti> {
        if self.m != 1 || self.d() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.m.max(self.d()),
            });
        }
        let v = self.directions[0][0];
        if !(v > 0.0) {
            return Err(Error::NonIntegrable(format!(
                "sigma must be positive on the positive half-line (direction {v})"
            )));
        }
        if self.smoothing != Smoothing::None && self.c2.is_finite() {
            return Err(Error::Config("the Lamperti pair is defined for the unmollified profile".into()));
        }
        let c = v * self.c1;
        let k = self.kappa;
        let r_cap = self.cap_radius();
        let phi_cap = if r_cap.is_finite() {
            r_cap.powf(1.0 - k) / (c * (1.0 - k))
        } else {
            f64::INFINITY
        };
        Ok(Lamperti {
            c,
            kappa: k,
            r_cap,
            phi_cap,
            flat: c * self.c2,
        })
    }

    pub fn lamperti_phi(&self, xi: f64) -> Result<f64> {
        self.lamperti()?.phi(xi)
    }

    pub fn lamperti_phi_inverse(&self, u: f64) -> Result<f64> {
        self.lamperti()?.phi_inverse(u)
    }
}

/// `phi(xi) = int_0^xi ds / sigma(s)` and its inverse for a scalar power field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lamperti {
    c: f64,
    kappa: f64,
    r_cap: f64,
    phi_cap: f64,
    flat: f64,
}

impl Lamperti {
    pub fn phi(&self, xi: f64) -> Result<f64> {
        if xi < 0.0 {
            return Err(Error::NegativeArgument(xi));
        }
        let k = self.kappa;
        Ok(if xi <= self.r_cap {
            xi.powf(1.0 - k) / (self.c * (1.0 - k))
        } else {
            self.phi_cap + (xi - self.r_cap) / self.flat
        })
    }

    pub fn phi_inverse(&self, u: f64) -> Result<f64> {
        if u < 0.0 {
            return Err(Error::NegativeArgument(u));
        }
        let k = self.kappa;
        Ok(if u <= self.phi_cap {
            (self.c * (1.0 - k) * u).powf(1.0 / (1.0 - k))
        } else {
            self.r_cap + (u - self.phi_cap) * self.flat
        })
    }

    /// Odd extension `u -> -phi^{-1}(-u)` for negative arguments. Because the
    /// scalar field is even, this still solves `y' = sigma(y)`.
    pub fn phi_inverse_odd(&self, u: f64) -> f64 {
        let v = self.phi_inverse(u.abs()).expect("argument is non-negative");
        if u < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Sampling of radii along one ray for seminorm estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    /// Unit direction of the ray; defaults to the first coordinate axis.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
}

impl SampleSpec {
    pub fn new(r_min: f64, r_max: f64, count: usize) -> Self {
        Self {
            r_min,
            r_max,
            count,
            direction: None,
        }
    }

    /// Same range with `factor` times the density; contains every original point.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            count: (self.count - 1) * factor + 1,
            ..self.clone()
        }
    }

    pub fn radii(&self) -> Result<Vec<f64>> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min) || self.count < 2 {
            return Err(Error::DegenerateSampling(format!(
                "need 0 < r_min < r_max and at least two radii (got [{}, {}], {})",
                self.r_min, self.r_max, self.count
            )));
        }
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let n = self.count - 1;
        Ok((0..=n)
            .map(|i| {
                if i == n {
                    self.r_max
                } else {
                    (a + (b - a) * i as f64 / n as f64).exp()
                }
            })
            .collect())
    }

    pub fn points(&self, m: usize) -> Result<Vec<Vec<f64>>> {
        let dir = match &self.direction {
            Some(v) if v.len() == m => {
                let n = norm(v);
                if n == 0.0 {
                    return Err(Error::DegenerateSampling("zero sampling direction".into()));
                }
                v.iter().map(|a| a / n).collect()
            }
            Some(v) => {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: v.len(),
                })
            }
            None => {
                let mut e = vec![0.0; m];
                e[0] = 1.0;
                e
            }
        };
        Ok(self
            .radii()?
            .into_iter()
            .map(|r| dir.iter().map(|a| a * r).collect())
            .collect())
    }

    pub fn decades(&self) -> f64 {
        (self.r_max / self.r_min).log10()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeminormEstimate {
    pub alpha: f64,
    pub value: f64,
    pub samples: usize,
    /// Radii of the pair attaining the supremum.
    pub argmax: (f64, f64),
}

/// `sup |F(xi_2) - F(xi_1)| / ||xi_2|^alpha - |xi_1|^alpha|` over all pairs
/// of sample points with distinct radii.
pub fn seminorm_estimate<F>(f: F, alpha: f64, points: &[Vec<f64>]) -> Result<SeminormEstimate>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidExponent {
            name: "alpha",
            value: alpha,
            reason: "must lie in (0, 1]",
        });
    }
    let values: Vec<Vec<f64>> = points.iter().map(|p| f(p)).collect();
    let radii: Vec<f64> = points.iter().map(|p| norm(p)).collect();
    let mut best = 0.0f64;
    let mut argmax = (0.0, 0.0);
    let mut pairs = 0usize;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let den = (radii[b].powf(alpha) - radii[a].powf(alpha)).abs();
            if den == 0.0 {
                continue;
            }
            pairs += 1;
            let num: f64 = values[a]
                .iter()
                .zip(&values[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            if num / den > best {
                best = num / den;
                argmax = (radii[a], radii[b]);
            }
        }
    }
    if pairs == 0 {
        return Err(Error::DegenerateSampling("all sampled radii coincide".into()));
    }
    Ok(SeminormEstimate {
        alpha,
        value: best,
        samples: points.len(),
        argmax,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    /// Worst sampled ratio (meaning depends on the check).
    pub worst: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Default sampling for [`verify_hypotheses`]: 400 radii on
/// `[1e-7 R, R]` with `R = min(1, r_c / 2)`.
pub fn default_domain(pc: &PowerCoefficient) -> SampleSpec {
    let r_max = (0.5 * pc.cap_radius()).min(1.0);
    SampleSpec::new(1e-7 * r_max, r_max, 400)
}

const STABILITY: f64 = 1.05;

fn stable_seminorm<F>(f: F, alpha: f64, domain: &SampleSpec, m: usize) -> Result<(SeminormEstimate, SeminormEstimate)>
where
    F: Fn(&[f64]) -> Vec<f64> + Copy,
{
    let coarse = seminorm_estimate(f, alpha, &domain.points(m)?)?;
    let fine = seminorm_estimate(f, alpha, &domain.refined(4).points(m)?)?;
    Ok((coarse, fine))
}

fn seminorm_check(name: &str, coarse: SeminormEstimate, fine: SeminormEstimate) -> HypothesisCheck {
    let pass = fine.value.is_finite() && fine.value <= coarse.value * STABILITY + 1e-300;
    HypothesisCheck {
        name: name.into(),
        pass,
        worst: fine.value,
        detail: format!(
            "alpha = {:.4}: seminorm {:.6e} ({} radii), {:.6e} ({} radii); sup at radii ({:.3e}, {:.3e})",
            fine.alpha, coarse.value, coarse.samples, fine.value, fine.samples, fine.argmax.0, fine.argmax.1
        ),
    }
}

fn interpolation_check<F>(name: &str, f: F, alpha: f64, seminorm: f64, points: &[Vec<f64>]) -> HypothesisCheck
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let values: Vec<Vec<f64>> = points.iter().map(|p| f(p)).collect();
    let etas = [0.0, 0.5 * (1.0 - alpha), 1.0 - alpha];
    let mut worst = 0.0f64;
    let mut where_ = (0.0, 0.0, 0.0);
    for &eta in &etas {
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                let lhs = norm(&values[a].iter().zip(&values[b]).map(|(x, y)| y - x).collect::<Vec<_>>());
                let ra = norm(&points[a]);
                let rb = norm(&points[b]);
                let dist = norm(&points[a].iter().zip(&points[b]).map(|(x, y)| y - x).collect::<Vec<_>>());
                let rhs = alpha / (alpha + eta) * seminorm * (rb.powf(-eta) + ra.powf(-eta)) * dist.powf(alpha + eta);
                if lhs == 0.0 {
                    continue;
                }
                let ratio = lhs / rhs;
                if ratio > worst {
                    worst = ratio;
                    where_ = (eta, ra, rb);
                }
            }
        }
    }
    HypothesisCheck {
        name: name.into(),
        pass: worst <= 1.0 + 1e-9,
        worst,
        detail: format!(
            "max lhs/rhs = {worst:.6} at eta = {:.3}, radii ({:.3e}, {:.3e})",
            where_.0, where_.1, where_.2
        ),
    }
}

/// Sampled verification of the structural assumptions on a power coefficient.
///
/// Hölder-type conditions are sampled along one ray inside a bounded radius
/// range: the quotient for `D sigma . sigma` is not bounded across the
/// origin (the field is odd in one dimension) and, without a cap, the
/// one-dimensional Lamperti condition is only local. Named checks:
/// `kappa+gamma`, `vanishes_at_origin`, `holder_sigma`,
/// `holder_dsigma_sigma`, `lamperti_holder` (scalar fields only),
/// `interpolation_sigma`, `interpolation_dsigma_sigma`,
/// `derivative_envelope`, `lower_envelope`.
pub fn verify_hypotheses(pc: &PowerCoefficient, gamma: f64, domain: &SampleSpec) -> Result<HypothesisReport> {
    let mut checks = Vec::new();
    let k = pc.kappa();
    let m = pc.m();
    checks.push(HypothesisCheck {
        name: "kappa+gamma".into(),
        pass: k + gamma > 1.0,
        worst: k + gamma,
        detail: format!("kappa + gamma = {:.4} must exceed 1", k + gamma),
    });
    if domain.decades() < 6.0 - 1e-9 {
        return Err(Error::DegenerateSampling(format!(
            "sampled radii cover {:.2} decades, need at least 6",
            domain.decades()
        )));
    }
    let origin = vec![0.0; m];
    let s0 = norm(&pc.sigma(&origin));
    checks.push(HypothesisCheck {
        name: "vanishes_at_origin".into(),
        pass: s0 == 0.0,
        worst: s0,
        detail: "sigma(0) = 0".into(),
    });

    let sig = |xi: &[f64]| pc.sigma(xi);
    let (c, f) = stable_seminorm(sig, k, domain, m)?;
    let n_sigma = f.value;
    checks.push(seminorm_check("holder_sigma", c, f));

    let dss = |xi: &[f64]| pc.dsigma_sigma(xi).expect("sample points avoid the origin");
    let alpha2 = 2.0 * k - 1.0;
    let mut n_dss = None;
    if alpha2 > 0.0 {
        let (c, f) = stable_seminorm(dss, alpha2, domain, m)?;
        n_dss = Some(f.value);
        checks.push(seminorm_check("holder_dsigma_sigma", c, f));
    } else {
        checks.push(HypothesisCheck {
            name: "holder_dsigma_sigma".into(),
            pass: false,
            worst: f64::INFINITY,
            detail: format!("exponent 2 kappa - 1 = {alpha2:.3} is not positive"),
        });
    }

    if m == 1 && pc.d() == 1 {
        let lam = pc.lamperti()?;
        let beta = ((2.0 * k - 1.0) / (1.0 - k)).min(1.0);
        if beta > 0.0 {
            let us: Vec<Vec<f64>> = domain
                .radii()?
                .into_iter()
                .map(|r| lam.phi(r).map(|u| vec![u]))
                .collect::<Result<_>>()?;
            let us_fine: Vec<Vec<f64>> = domain
                .refined(4)
                .radii()?
                .into_iter()
                .map(|r| lam.phi(r).map(|u| vec![u]))
                .collect::<Result<_>>()?;
            let comp = |u: &[f64]| {
                let xi = lam.phi_inverse(u[0]).expect("u >= 0");
                pc.dsigma_sigma(&[xi]).expect("positive radius")
            };
            let c = seminorm_estimate(comp, beta, &us)?;
            let f = seminorm_estimate(comp, beta, &us_fine)?;
            checks.push(seminorm_check("lamperti_holder", c, f));
        } else {
            checks.push(HypothesisCheck {
                name: "lamperti_holder".into(),
                pass: false,
                worst: f64::INFINITY,
                detail: format!("exponent {beta:.3} is not positive"),
            });
        }
    }

    let pts = domain.points(m)?;
    checks.push(interpolation_check("interpolation_sigma", sig, k, n_sigma, &pts));
    if let Some(n) = n_dss {
        checks.push(interpolation_check("interpolation_dsigma_sigma", dss, alpha2, n, &pts));
    }

    let mut env1 = 0.0f64;
    let mut env2 = 0.0f64;
    for p in domain.refined(4).points(m)? {
        let r = norm(&p);
        env1 = env1.max(pc.dsigma_norm(&p)? * r.powf(1.0 - k));
        env2 = env2.max(pc.d2sigma_norm(&p)? * r.powf(2.0 - k));
    }
    checks.push(HypothesisCheck {
        name: "derivative_envelope".into(),
        pass: env1.is_finite() && env2.is_finite(),
        worst: env1.max(env2),
        detail: format!("sup |D sigma| r^(1-kappa) = {env1:.6e}, sup |D^2 sigma| r^(2-kappa) = {env2:.6e}"),
    });

    let lower = domain
        .points(m)?
        .iter()
        .map(|p| norm(&pc.sigma(p)) / norm(p).powf(k))
        .fold(f64::INFINITY, f64::min);
    checks.push(HypothesisCheck {
        name: "lower_envelope".into(),
        pass: lower > 0.0,
        worst: lower,
        detail: format!("inf |sigma(xi)| / |xi|^kappa = {lower:.6e} on the sampled radii"),
    });
    Ok(HypothesisReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> PowerCoefficient {
        PowerCoefficient::scalar(0.5, 1.0, f64::INFINITY).unwrap()
    }

    #[test]
    fn hand_values() {
        let pc = half();
        assert_eq!(pc.sigma(&[4.0]), vec![2.0]);
        assert!((pc.dsigma(&[4.0]).unwrap()[0] - 0.25).abs() < 1e-15);
        assert!((pc.dsigma_sigma(&[4.0]).unwrap()[0] - 0.5).abs() < 1e-15);
        assert_eq!(pc.sigma(&[0.0]), vec![0.0]);
        assert!(matches!(pc.dsigma(&[0.0]), Err(Error::OriginDerivative)));
        // odd in one dimension
        assert!((pc.dsigma_sigma(&[-4.0]).unwrap()[0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn lamperti_hand_values() {
        let pc = half();
        assert!((pc.lamperti_phi(4.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((pc.lamperti_phi_inverse(4.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((pc.lamperti_phi_inverse(3.0).unwrap() - 2.25).abs() < 1e-14);
        assert_eq!(pc.lamperti_phi(0.0).unwrap(), 0.0);
        assert!(matches!(pc.lamperti_phi(-1.0), Err(Error::NegativeArgument(_))));
    }

    #[test]
    fn capped_lamperti_round_trip() {
        let pc = PowerCoefficient::scalar(0.7, 1.3, 0.6).unwrap();
        let lam = pc.lamperti().unwrap();
        for i in 0..200 {
            let xi = 10f64.powf(-8.0 + 10.0 * i as f64 / 199.0);
            let back = lam.phi_inverse(lam.phi(xi).unwrap()).unwrap();
            assert!((back - xi).abs() <= 1e-12 * xi.max(1e-300) * 10.0, "{xi} {back}");
        }
    }

    #[test]
    fn mollified_profile_is_continuous() {
        let pc = PowerCoefficient::scalar(0.8, 1.0, 0.5).unwrap().with_smoothing(Smoothing::Mollified);
        let rc = pc.cap_radius();
        let lo = pc.profile(rc * (1.0 - 1e-3));
        let hi = pc.profile(rc * (1.0 + 1e-3));
        let below = pc.profile(rc * (1.0 - 1e-3) * (1.0 - 1e-12));
        assert!((lo.0 - below.0).abs() < 1e-10);
        assert!((lo.1 - below.1).abs() < 1e-8);
        assert!((hi.0 - 0.5).abs() < 1e-15);
        assert!(hi.1.abs() < 1e-15);
    }

    #[test]
    fn seminorm_of_pure_power() {
        let spec = SampleSpec::new(1e-4, 1e3, 60);
        let pts = spec.points(1).unwrap();
        let f = |xi: &[f64]| vec![norm(xi).powf(0.3)];
        let est = seminorm_estimate(f, 0.3, &pts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
        let pc = PowerCoefficient::scalar(0.6, 2.0, f64::INFINITY).unwrap();
        let est = seminorm_estimate(|xi: &[f64]| pc.sigma(xi), 0.6, &pts).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
        assert!(seminorm_estimate(f, 0.3, &[vec![1.0], vec![-1.0]]).is_err());
    }

    #[test]
    fn canonical_coefficient_passes() {
        let pc = PowerCoefficient::scalar(0.8, 1.0, f64::INFINITY).unwrap();
        let domain = SampleSpec::new(1e-7, 1.0, 120);
        let report = verify_hypotheses(&pc, 0.4, &domain).unwrap();
        assert!(report.all_pass(), "{:#?}", report);
        let bad = PowerCoefficient::scalar(0.3, 1.0, f64::INFINITY).unwrap();
        let report = verify_hypotheses(&bad, 0.4, &domain).unwrap();
        assert!(report.failures().contains(&"kappa+gamma"));
    }
}
