//! Placebo-controlled designs: joint posterior over the test efficacy `Q` and
//! the control efficacy `Π`, and the superiority probability P(Q ≥ Π + δ).
//!
//! Two evaluation paths are provided. [`superiority`] integrates
//! `Beta(Q; Mq+1, M-Mq+1) · I_{Q-δ}(Nπ+1, N-Nπ+1)` over `[δ, 1]` with the
//! composite panel rule. [`superiority_exact`] expands the same integral into
//! a finite sum of complete beta functions; it needs integer counts.

use crate::binom::{density, posterior_density, TrialObservation};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_panels, QuadratureConfig};
use crate::specfun::{lgamma, ln_beta, ln_binom_kernel, reg_inc_beta_pair, Accuracy};

/// Test arm, control arm and required margin δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateDesign {
    pub test: TrialObservation,
    pub control: TrialObservation,
    delta: f64,
}

impl BivariateDesign {
    pub fn new(test: TrialObservation, control: TrialObservation, delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(domain(format!("delta = {delta} must lie in [0, 1)")));
        }
        Ok(Self {
            test,
            control,
            delta,
        })
    }

    /// Convenience constructor from (q, M) and (π, N).
    pub fn from_parts(q: f64, m: f64, pi: f64, n: f64, delta: f64) -> Result<Self> {
        Self::new(
            TrialObservation::new(q, m)?,
            TrialObservation::new(pi, n)?,
            delta,
        )
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same design with the arms exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            test: self.control,
            control: self.test,
            delta: self.delta,
        }
    }
}

/// w(q,Q,M)·ω(π,Π,N).
pub fn joint_density(q: f64, big_q: f64, m: f64, pi: f64, big_pi: f64, n: f64) -> Result<f64> {
    Ok(density(q, big_q, m)? * density(pi, big_pi, n)?)
}

/// Panel-quadrature superiority probability.
///
/// Integrates over Q in [δ, 1] after a cubic change of variable.
pub fn superiority(design: &BivariateDesign, quad: &QuadratureConfig) -> Result<f64> {
    quad.validate()?;
    let delta = design.delta;
    let test = design.test;
    let (c1, c2) = design.control.posterior_shape();
    let acc = Accuracy::default();
    let f = move |big_q: f64| -> Result<f64> {
        let pdf = posterior_density(&test, big_q);
        if pdf == 0.0 {
            return Ok(0.0);
        }
        let y = (big_q - delta).clamp(0.0, 1.0);
        let (lower, _) = reg_inc_beta_pair(y, c1, c2, &acc)?;
        Ok(pdf * lower)
    };
    // Q = δ + (1-δ)·u²(3-2u) flattens the endpoint power laws of
    // non-integer posterior shapes so the panel rule keeps its order
    let span = 1.0 - delta;
    let g = move |u: f64| -> Result<f64> {
        let t = u * u * (3.0 - 2.0 * u);
        let dt = 6.0 * u * (1.0 - u);
        if dt == 0.0 {
            return Ok(0.0);
        }
        Ok(f(delta + span * t)? * span * dt)
    };
    let raw = integrate_panels(&g, 0.0, 1.0, quad)?.value;
    clamp_overshoot(raw, quad.rel_tol)
}

/// Values within 10·rel_tol outside [0, 1] are quadrature noise; anything
/// further out is reported.
fn clamp_overshoot(raw: f64, rel_tol: f64) -> Result<f64> {
    let eps = 10.0 * rel_tol;
    if raw < -eps || raw > 1.0 + eps || raw.is_nan() {
        return Err(Error::ConvergenceFailure(format!(
            "superiority quadrature returned {raw}, outside [0, 1] by more than {eps:e}"
        )));
    }
    Ok(raw.clamp(0.0, 1.0))
}

fn integer_count(name: &str, x: f64) -> Result<u64> {
    let r = x.round();
    if x < 0.0 || (x - r).abs() > 1e-9 * x.abs().max(1.0) {
        return Err(domain(format!("{name} = {x} is not an integer count")));
    }
    Ok(r as u64)
}

/// B_x(c+1, N-c+1) as a finite sum over j = c+1..=N+1 of
/// `c!(N-c)! / (j!(N+1-j)!) · x^j (1-x)^{N+1-j}`.
///
/// The sum is empty only for x = 0; at c = N it reduces to x^{N+1}/(N+1).
pub fn inc_beta_integer_series(n: u64, pi_count: u64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("series needs N >= 1"));
    }
    if pi_count > n {
        return Err(domain(format!("pi_count = {pi_count} exceeds N = {n}")));
    }
    crate::error::check_unit("x", x)?;
    let c = pi_count as f64;
    let l = (n + 1) as f64;
    // c!(N-c)!/(j!(N+1-j)!) = B(c+1, N-c+1) · C(N+1, j)
    let ln_b = ln_beta(c + 1.0, n as f64 - c + 1.0);
    let mut terms: Vec<f64> = (pi_count + 1..=n + 1)
        .map(|j| ln_binom_kernel(j as f64, l, x).exp())
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(ln_b.exp() * terms.iter().sum::<f64>())
}

/// ln k! for k = 0..=top; exact factorials where f64 holds them.
fn ln_factorials(top: usize) -> Vec<f64> {
    let mut fact = 1.0f64;
    (0..=top)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            if fact.is_finite() {
                fact.ln()
            } else {
                lgamma(k as f64 + 1.0)
            }
        })
        .collect()
}

/// Largest M + N accepted by [`superiority_exact`].
pub const DEFAULT_EXACT_LIMIT: u64 = 400;

pub fn superiority_exact(design: &BivariateDesign) -> Result<f64> {
    superiority_exact_with_limit(design, DEFAULT_EXACT_LIMIT)
}

/// Term-by-term evaluation for integer counts.
///
/// With a = Mq, b = M - Mq, c = Nπ and L = N + 1,
/// `p = (M+1)!/(a! b!) Σ_{j>c} C(L,j) ∫_δ¹ Q^a (1-Q)^b (Q-δ)^j (1-Q+δ)^{L-j} dQ`.
/// Substituting Q = δ + (1-δ)u and expanding both binomials in u leaves a
/// triple sum of non-negative terms times complete beta functions, which is
/// accumulated in log space.
pub fn superiority_exact_with_limit(design: &BivariateDesign, limit: u64) -> Result<f64> {
    let m = integer_count("M", design.test.m())?;
    let n = integer_count("N", design.control.m())?;
    let a = integer_count("M·q", design.test.successes())?;
    let c = integer_count("N·π", design.control.successes())?;
    if m + n > limit {
        return Err(Error::Overflow(format!(
            "exact superiority limited to M + N <= {limit}, got {}",
            m + n
        )));
    }
    let b = m - a;
    let l = n + 1;
    let delta = design.delta;

    let top = (a + b + l + 2) as usize;
    let lf = ln_factorials(top);
    let ln_choose = |n: u64, k: u64| lf[n as usize] - lf[k as usize] - lf[(n - k) as usize];
    // B(x+1, y+1) = x! y! / (x+y+1)!
    let ln_beta_int = |x: u64, y: u64| lf[x as usize] + lf[y as usize] - lf[(x + y + 1) as usize];

    let mut logs = Vec::new();
    if delta == 0.0 {
        for j in c + 1..=l {
            logs.push(ln_choose(l, j) + ln_beta_int(a + j, b + l - j));
        }
    } else {
        let ld = delta.ln();
        let l1d = (-delta).ln_1p();
        for j in c + 1..=l {
            let cj = ln_choose(l, j);
            for i in 0..=a {
                let ci = ln_choose(a, i);
                for k in 0..=l - j {
                    let pow = (a - i + k) as f64 * ld + (1 + b + i + l - k) as f64 * l1d;
                    logs.push(
                        cj + ci + ln_choose(l - j, k) + pow + ln_beta_int(i + j, b + l - j - k),
                    );
                }
            }
        }
    }
    if logs.is_empty() {
        return Ok(0.0);
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut scaled: Vec<f64> = logs.iter().map(|t| (t - peak).exp()).collect();
    scaled.sort_by(f64::total_cmp);
    let sum: f64 = scaled.iter().sum();
    let front = lf[(m + 1) as usize] - lf[a as usize] - lf[b as usize];
    Ok((front + peak + sum.ln()).exp().clamp(0.0, 1.0))
}
