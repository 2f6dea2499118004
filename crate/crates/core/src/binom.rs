//! Single-arm binomial significance in the continuum limit.
//!
//! The observed fraction `q` from `M` trials induces the density
//! `w(q, Q, M) = Q^{qM} (1-Q)^{(1-q)M} C(M, qM)` over the true efficacy `Q`.
//! `M` is a positive real throughout; `C` is the gamma-function binomial.
//! Only [`tail_discrete`] works with integer counts.

use rayon::prelude::*;

use crate::error::{check_positive, check_unit, domain, Result};
use crate::quadrature::{adaptive, integrate_panels, QuadratureConfig};
use crate::specfun::{ln_binom_kernel, reg_inc_beta_pair, Accuracy};

/// Observed efficacy `q` out of `m` trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialObservation {
    q: f64,
    m: f64,
}

impl TrialObservation {
    pub fn new(q: f64, m: f64) -> Result<Self> {
        check_unit("q", q)?;
        check_positive("M", m)?;
        Ok(Self { q, m })
    }

    /// Observation from integer counts, e.g. 154 successes out of 162.
    pub fn from_counts(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(domain(format!(
                "need 0 <= successes <= trials and trials > 0, got {successes}/{trials}"
            )));
        }
        Self::new(successes as f64 / trials as f64, trials as f64)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Success count q·M (not necessarily an integer).
    pub fn successes(&self) -> f64 {
        self.q * self.m
    }

    /// Shape parameters (qM + 1, M - qM + 1) of the normalized posterior.
    pub fn posterior_shape(&self) -> (f64, f64) {
        let k = self.successes();
        (k + 1.0, self.m - k + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceQuery {
    pub obs: TrialObservation,
    q0: f64,
}

impl SignificanceQuery {
    pub fn new(obs: TrialObservation, q0: f64) -> Result<Self> {
        check_unit("Q0", q0)?;
        Ok(Self { obs, q0 })
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub q0: f64,
    pub p: f64,
}

/// How [`significance_with`] evaluates the posterior tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignificanceMethod {
    /// Closed form through the regularized incomplete beta.
    #[default]
    IncompleteBeta,
    /// Adaptive quadrature of (M+1)·∫_{Q0}^1 w dQ.
    Quadrature,
}

/// w(q, Q, M).
pub fn density(q: f64, big_q: f64, m: f64) -> Result<f64> {
    check_unit("q", q)?;
    check_unit("Q", big_q)?;
    check_positive("M", m)?;
    Ok(ln_binom_kernel(q * m, m, big_q).exp())
}

/// Normalized posterior (M+1)·w(q, Q, M) over Q, i.e. the Beta(qM+1, M-qM+1) density.
pub fn posterior_density(obs: &TrialObservation, big_q: f64) -> f64 {
    (obs.m + 1.0) * ln_binom_kernel(obs.successes(), obs.m, big_q).exp()
}

/// ⌊q·M⌋ with products within 1e-9 of an integer snapped to it, so that
/// q = 61/100 with M = 100 counts as 61 successes.
pub(crate) fn count_floor(q: f64, m: f64) -> f64 {
    let x = q * m;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * m.max(1.0) {
        r
    } else {
        x.floor()
    }
}

/// Probability that M trials with true efficacy Q show more than ⌊qM⌋ successes.
pub fn tail_discrete(q: f64, big_q: f64, m: u64) -> Result<f64> {
    check_unit("q", q)?;
    check_unit("Q", big_q)?;
    if m == 0 {
        return Err(domain("tail_discrete needs M >= 1"));
    }
    let n = m as f64;
    let first = count_floor(q, n) as u64 + 1;
    let sum: f64 = (first..=m)
        .map(|k| ln_binom_kernel(k as f64, n, big_q).exp())
        .sum();
    Ok(sum.min(1.0))
}

fn q_tilde_density(big_q: f64, m: f64) -> impl Fn(f64) -> Result<f64> + Sync {
    move |qt: f64| Ok(ln_binom_kernel(qt * m, m, big_q).exp())
}

/// M·∫₀¹ w(q̃, Q, M) dq̃, the sum-to-integral normalization. It tends to 1
/// as M grows but is not exactly 1 for the gamma-generalized binomial
/// (about 0.42 at M = 1, Q = 0.1).
pub fn continuum_normalization(big_q: f64, m: f64, quad: &QuadratureConfig) -> Result<f64> {
    check_unit("Q", big_q)?;
    check_positive("M", m)?;
    let f = q_tilde_density(big_q, m);
    Ok(m * integrate_panels(&f, 0.0, 1.0, quad)?.value)
}

/// Continuum analogue of [`tail_discrete`]: the share of the q̃-density
/// lying above q. Normalized by the numerically integrated total, so
/// `tail_continuum(0, ..) = 1` exactly.
pub fn tail_continuum(q: f64, big_q: f64, m: f64, quad: &QuadratureConfig) -> Result<f64> {
    check_unit("q", q)?;
    check_unit("Q", big_q)?;
    check_positive("M", m)?;
    let f = q_tilde_density(big_q, m);
    let upper = integrate_panels(&f, q, 1.0, quad)?.value;
    let lower = integrate_panels(&f, 0.0, q, quad)?.value;
    Ok(upper / (lower + upper))
}

/// p(q, M; Q0): posterior probability that the true efficacy is at least Q0.
pub fn significance(query: &SignificanceQuery) -> Result<f64> {
    significance_with(query, SignificanceMethod::IncompleteBeta)
}

pub fn significance_with(query: &SignificanceQuery, method: SignificanceMethod) -> Result<f64> {
    let q0 = query.q0;
    if q0 == 0.0 {
        return Ok(1.0);
    }
    if q0 == 1.0 {
        return Ok(0.0);
    }
    let (a, b) = query.obs.posterior_shape();
    match method {
        SignificanceMethod::IncompleteBeta => {
            let (_, upper) = reg_inc_beta_pair(q0, a, b, &Accuracy::default())?;
            Ok(upper.clamp(0.0, 1.0))
        }
        SignificanceMethod::Quadrature => {
            let obs = query.obs;
            let mode = (a - 1.0) / (a + b - 2.0);
            let sd = (a * b / ((a + b) * (a + b) * (a + b + 1.0))).sqrt();
            let breaks: Vec<f64> = (-12..=12).map(|k| mode + k as f64 * sd).collect();
            let v = adaptive(
                |x| posterior_density(&obs, x),
                q0,
                1.0,
                &breaks,
                1e-300,
                1e-13,
            )?;
            Ok(v.clamp(0.0, 1.0))
        }
    }
}

/// Uniform grid of `points` thresholds on [0, 1].
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub const DEFAULT_CURVE_POINTS: usize = 201;

/// Significance over a strictly increasing grid of thresholds.
pub fn significance_curve(obs: &TrialObservation, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    for (i, &g) in grid.iter().enumerate() {
        check_unit("grid value", g)?;
        if i > 0 && g <= grid[i - 1] {
            return Err(domain(format!(
                "curve grid must be strictly increasing (index {i}: {g} after {})",
                grid[i - 1]
            )));
        }
    }
    grid.par_iter()
        .map(|&q0| {
            let p = significance(&SignificanceQuery::new(*obs, q0)?)?;
            Ok(CurvePoint { q0, p })
        })
        .collect()
}
