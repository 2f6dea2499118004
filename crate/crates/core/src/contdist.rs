//! Continuous-distribution tools: superiority of one measured quantity over
//! another, the exact distribution of a sample mean on a lattice, and moment
//! matching for Gaussians observed only on `x >= 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, domain, Error, Result};
use crate::quadrature::adaptive;
use crate::specfun::{erf, reg_inc_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianSpec {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(domain(format!("mu = {mu} must be finite")));
        }
        check_positive("sigma", sigma)?;
        Ok(Self { mu, sigma })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * PI).sqrt())
    }
}

/// Probability masses on the uniform lattice `origin + i·step`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    origin: f64,
    step: f64,
    mass: Vec<f64>,
}

const MASS_TOL: f64 = 1e-12;
const SPACING_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    value: f64,
    mass: f64,
}

impl DiscreteDistribution {
    pub fn new(origin: f64, step: f64, mass: Vec<f64>) -> Result<Self> {
        if !origin.is_finite() {
            return Err(domain(format!("origin = {origin} must be finite")));
        }
        check_positive("step", step)?;
        if mass.is_empty() {
            return Err(domain("distribution needs at least one grid point"));
        }
        if let Some(bad) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(domain(format!("mass {bad} is not a non-negative number")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(domain(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { origin, step, mass })
    }

    /// Equal mass on `count` consecutive lattice points.
    pub fn uniform(origin: f64, step: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(domain("uniform distribution needs at least one point"));
        }
        Self::new(origin, step, vec![1.0 / count as f64; count])
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn mean(&self) -> f64 {
        // offset from origin keeps the sum well conditioned
        let off: f64 = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| i as f64 * m)
            .sum();
        self.origin + self.step * off
    }

    pub fn variance(&self) -> f64 {
        let c: f64 = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| i as f64 * m)
            .sum();
        let v: f64 = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| (i as f64 - c).powi(2) * m)
            .sum();
        v * self.step * self.step
    }

    /// Reads `value,mass` rows (header required) on a uniform grid.
    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Input(format!("csv header: {e}")))?
            .clone();
        if headers.len() != 2 || &headers[0] != "value" || &headers[1] != "mass" {
            return Err(Error::Input(format!(
                "expected header `value,mass`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let rows: Vec<CsvRow> = rdr
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Input(format!("csv row: {e}")))?;
        match rows.len() {
            0 => Err(Error::Input("csv has no data rows".into())),
            1 => Self::new(rows[0].value, 1.0, vec![rows[0].mass]),
            n => {
                let step = (rows[n - 1].value - rows[0].value) / (n - 1) as f64;
                if step.is_nan() || step <= 0.0 {
                    return Err(Error::Input(
                        "csv values must be strictly increasing".into(),
                    ));
                }
                for (i, w) in rows.windows(2).enumerate() {
                    let d = w[1].value - w[0].value;
                    if (d - step).abs() > SPACING_TOL * step {
                        return Err(Error::Input(format!(
                            "non-uniform grid at row {}: spacing {d} vs {step}",
                            i + 2
                        )));
                    }
                }
                Self::new(rows[0].value, step, rows.iter().map(|r| r.mass).collect())
            }
        }
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for (i, &mass) in self.mass.iter().enumerate() {
            wtr.serialize(CsvRow {
                value: self.value(i),
                mass,
            })
            .map_err(|e| Error::Input(format!("csv write: {e}")))?;
        }
        wtr.flush()
            .map_err(|e| Error::Input(format!("csv write: {e}")))
    }
}

/// P(x₂ ≥ x₁ + δ) for independent Gaussians.
pub fn superiority_gaussian(p1: &GaussianSpec, p2: &GaussianSpec, delta: f64) -> Result<f64> {
    if !delta.is_finite() {
        return Err(domain("delta must be finite"));
    }
    let spread = (2.0 * (p1.sigma * p1.sigma + p2.sigma * p2.sigma)).sqrt();
    Ok(0.5 + 0.5 * erf((p2.mu - p1.mu - delta) / spread))
}

/// Same probability as [`superiority_gaussian`], computed by integrating the
/// inner Gaussian CDF `½ + ½·erf((x₂ - δ - μ₁)/(σ₁√2))` against the density
/// of x₂. Used to cross-check the closed form.
pub fn superiority_gaussian_nested(
    p1: &GaussianSpec,
    p2: &GaussianSpec,
    delta: f64,
) -> Result<f64> {
    if !delta.is_finite() {
        return Err(domain("delta must be finite"));
    }
    let lo = p2.mu - 40.0 * p2.sigma;
    let hi = p2.mu + 40.0 * p2.sigma;
    let mut breaks = Vec::new();
    for k in -12..=12 {
        breaks.push(p2.mu + k as f64 * p2.sigma);
        breaks.push(p1.mu + delta + k as f64 * p1.sigma);
    }
    let inner = |x2: f64| 0.5 + 0.5 * erf((x2 - delta - p1.mu) / (p1.sigma * SQRT_2));
    let v = adaptive(|x| inner(x) * p2.pdf(x), lo, hi, &breaks, 1e-17, 1e-14)?;
    Ok(v.clamp(0.0, 1.0))
}

/// P(x₂ ≥ x₁ + δ) for independent lattice distributions.
///
/// Ties (x₂ = x₁ + δ) count toward the event. Grid values closer than
/// 1e-9·step to the threshold are treated as ties.
pub fn superiority_tabulated(
    p1: &DiscreteDistribution,
    p2: &DiscreteDistribution,
    delta: f64,
) -> Result<f64> {
    if !delta.is_finite() {
        return Err(domain("delta must be finite"));
    }
    // tail[j] = P(x₂ >= value_j)
    let mut tail = vec![0.0; p2.len() + 1];
    for j in (0..p2.len()).rev() {
        tail[j] = tail[j + 1] + p2.mass[j];
    }
    let mut total = 0.0;
    for (i, &m1) in p1.mass.iter().enumerate() {
        if m1 == 0.0 {
            continue;
        }
        let t = (p1.value(i) + delta - p2.origin) / p2.step;
        let j = (t - SPACING_TOL).ceil();
        let j = if j <= 0.0 {
            0
        } else {
            (j as usize).min(p2.len())
        };
        total += m1 * tail[j];
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Largest support produced by [`mean_sampling_distribution`].
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 20;

pub fn mean_sampling_distribution(
    base: &DiscreteDistribution,
    n: u64,
) -> Result<DiscreteDistribution> {
    mean_sampling_distribution_with_cap(base, n, DEFAULT_SUPPORT_CAP)
}

/// Exact distribution of the mean of `n` independent draws from `base`:
/// the n-fold convolution on the lattice with step `step / n`.
pub fn mean_sampling_distribution_with_cap(
    base: &DiscreteDistribution,
    n: u64,
    cap: usize,
) -> Result<DiscreteDistribution> {
    if n == 0 {
        return Err(domain("sample size n must be at least 1"));
    }
    let support = (base.len() as u128 - 1) * n as u128 + 1;
    if support > cap as u128 {
        return Err(Error::Overflow(format!(
            "mean distribution support {support} exceeds cap {cap}"
        )));
    }
    let mut result = vec![1.0];
    let mut power = base.mass.clone();
    let mut k = n;
    loop {
        if k & 1 == 1 {
            result = convolve(&result, &power);
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        power = convolve(&power, &power);
    }
    Ok(DiscreteDistribution {
        origin: base.origin,
        step: base.step / n as f64,
        mass: result,
    })
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    (0..len)
        .into_par_iter()
        .map(|k| {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            (lo..=hi).map(|i| a[i] * b[k - i]).sum()
        })
        .collect()
}

/// Mean and standard deviation of a variable observed only on `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedMoments {
    pub m: f64,
    pub s: f64,
}

impl TruncatedMoments {
    pub fn new(m: f64, s: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(domain(format!("m = {m} must be finite")));
        }
        check_positive("s", s)?;
        Ok(Self { m, s })
    }
}

/// Moments of the Gaussian restricted to `[0, ∞)` by adaptive quadrature.
pub fn truncated_moments(spec: &GaussianSpec) -> Result<TruncatedMoments> {
    let (mu, sigma) = (spec.mu, spec.sigma);
    // density relative to its maximum on [0, ∞), attained at c
    let c = mu.max(0.0);
    let shift = (c - mu) * (c - mu);
    let g = move |x: f64| (-((x - mu) * (x - mu) - shift) / (2.0 * sigma * sigma)).exp();
    let scale = if mu >= 0.0 {
        sigma
    } else {
        sigma * sigma / (sigma - mu)
    };
    let hi = c + 40.0 * sigma;
    let mut breaks: Vec<f64> = [
        0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0,
    ]
    .iter()
    .map(|t| c + t * scale)
    .collect();
    breaks.extend((1..=12).map(|k| c - k as f64 * sigma));
    breaks.extend((1..=40).map(|k| c + k as f64 * sigma));

    let integrate = |f: &dyn Fn(f64) -> f64| adaptive(f, 0.0, hi, &breaks, 1e-300, 1e-14);
    let z = integrate(&g)?;
    let m = integrate(&|x| x * g(x))? / z;
    let var = integrate(&|x| (x - m) * (x - m) * g(x))? / z;
    TruncatedMoments::new(m, var.sqrt())
}

/// Γ_r(-1/2, μ²/2σ²) with Γ_r the upper-regularized incomplete gamma.
fn gamma_r_term(spec: &GaussianSpec) -> Result<f64> {
    let z = spec.mu * spec.mu / (2.0 * spec.sigma * spec.sigma);
    reg_inc_gamma(-0.5, z)
}

/// Truncated mean from the erf/Γ_r closed form
/// `μ(2 - Γ_r(-1/2, μ²/2σ²)) / (1 + erf(μ/√2σ))`.
///
/// Agrees with [`truncated_moments`] for μ > 0 only: the closed form depends
/// on μ² through Γ_r and loses the sign of μ. Undefined at μ = 0.
pub fn closed_form_mean(spec: &GaussianSpec) -> Result<f64> {
    let e = erf(spec.mu * FRAC_1_SQRT_2 / spec.sigma);
    let g = gamma_r_term(spec)?;
    Ok(spec.mu * (2.0 - g) / (1.0 + e))
}

/// Truncated variance from the published erf/Γ_r closed form, transcribed
/// term for term with E = erf(μ/√2σ) and G = Γ_r(-1/2, μ²/2σ²).
///
/// Kept for comparison only. It does not reproduce [`truncated_moments`]
/// under this or any other simple Γ_r convention, and for μ ≫ σ it tends to
/// (3σ² - μ²)/8 instead of σ².
pub fn closed_form_variance(spec: &GaussianSpec) -> Result<f64> {
    let (mu, sigma) = (spec.mu, spec.sigma);
    let e = erf(mu * FRAC_1_SQRT_2 / sigma);
    let g = gamma_r_term(spec)?;
    let (mu2, s2) = (mu * mu, sigma * sigma);
    let z = mu2 / (2.0 * s2);
    let first = (-z).exp() * (2.0 / PI).sqrt() * mu * sigma * (1.0 + e).powi(2)
        + e * (2.0 * (sigma - mu) * (mu + sigma) + (mu2 + s2) * e + mu2 * (4.0 - g) * g);
    let second = (5.0 * mu2 + s2 + (mu2 + s2) * e * (2.0 + e) - 4.0 * mu2 * g + mu2 * g * g) * g;
    Ok((first - second) / (1.0 + e).powi(3))
}

/// Recovers the untruncated (μ, σ) from moments observed on `x >= 0`.
///
/// Attainable moments satisfy `m > 0` and `0 < s/m < 1`. Damped Newton on
/// relative residuals from (m, s); if that stalls, bisection on α = μ/σ using
/// scale invariance of the forward map.
pub fn fit_truncated_gaussian(obs: &TruncatedMoments) -> Result<GaussianSpec> {
    let ratio = obs.s / obs.m;
    if !(obs.m > 0.0 && ratio < 1.0) {
        return Err(Error::NoSolution(format!(
            "(m, s) = ({}, {}) is not attainable: need m > 0 and s < m",
            obs.m, obs.s
        )));
    }
    if let Some(spec) = newton_fit(obs)? {
        return Ok(spec);
    }
    bisection_fit(obs)
}

const FIT_TOL: f64 = 1e-12;

fn residual(obs: &TruncatedMoments, mu: f64, sigma: f64) -> Result<[f64; 2]> {
    let t = truncated_moments(&GaussianSpec::new(mu, sigma)?)?;
    Ok([t.m / obs.m - 1.0, t.s / obs.s - 1.0])
}

fn norm(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

fn newton_fit(obs: &TruncatedMoments) -> Result<Option<GaussianSpec>> {
    let (mut mu, mut sigma) = (obs.m, obs.s);
    let mut r = residual(obs, mu, sigma)?;
    for _ in 0..60 {
        if norm(&r) < FIT_TOL {
            return Ok(Some(GaussianSpec::new(mu, sigma)?));
        }
        let h = 1e-6 * obs.s;
        let rp = residual(obs, mu + h, sigma)?;
        let rm = residual(obs, mu - h, sigma)?;
        let sp = residual(obs, mu, sigma + h)?;
        let sm = if sigma > 2.0 * h {
            residual(obs, mu, sigma - h)?
        } else {
            return Ok(None);
        };
        let j = [
            [(rp[0] - rm[0]) / (2.0 * h), (sp[0] - sm[0]) / (2.0 * h)],
            [(rp[1] - rm[1]) / (2.0 * h), (sp[1] - sm[1]) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let dmu = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dsig = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        let mut lambda = 1.0;
        loop {
            let (nmu, nsig) = (mu + lambda * dmu, sigma + lambda * dsig);
            if nsig > 0.0 {
                let nr = residual(obs, nmu, nsig)?;
                if norm(&nr) < norm(&r) {
                    mu = nmu;
                    sigma = nsig;
                    r = nr;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Ok(None);
            }
        }
    }
    Ok((norm(&r) < FIT_TOL).then_some(GaussianSpec::new(mu, sigma)?))
}

fn unit_moments(alpha: f64) -> Result<TruncatedMoments> {
    truncated_moments(&GaussianSpec::new(alpha, 1.0)?)
}

fn bisection_fit(obs: &TruncatedMoments) -> Result<GaussianSpec> {
    let target = obs.s / obs.m;
    // s/m decreases in α from 1 (α → -∞) to 0 (α → ∞)
    let ratio_at = |alpha: f64| -> Result<f64> {
        let t = unit_moments(alpha)?;
        Ok(t.s / t.m)
    };
    let mut lo = -1.0;
    while ratio_at(lo)? <= target {
        lo *= 2.0;
        if lo < -1e4 {
            return Err(Error::ConvergenceFailure(format!(
                "s/m = {target} is too close to 1 to resolve"
            )));
        }
    }
    let mut hi = 1.0;
    while ratio_at(hi)? >= target {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::ConvergenceFailure(format!(
                "s/m = {target} is too small to resolve"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let sigma = obs.m / unit_moments(alpha)?.m;
    GaussianSpec::new(alpha * sigma, sigma)
}
