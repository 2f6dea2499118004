//! Minimal trial counts: the smallest M whose significance (or superiority)
//! reaches a target probability.
//!
//! Both solvers treat the probability as a continuous function of real M,
//! bracket the crossing by doubling from M = 1, bisect to |ΔM| < 1e-3, and
//! then settle the integer answer by direct evaluation around the root.

use crate::binom::{significance, SignificanceQuery, TrialObservation};
use crate::bivariate::{superiority, BivariateDesign};
use crate::error::{check_positive, check_unit, domain, Error, Result};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeResult {
    /// Real M where the probability crosses the target.
    pub m_real: f64,
    /// Smallest integer M meeting the target.
    pub m_int: u64,
    /// Probability at `m_int`.
    pub achieved_p: f64,
}

const M_CEILING: f64 = 1e9;
const BISECT_TOL: f64 = 1e-3;
const SCAN_HALF_WIDTH: f64 = 3.0;

fn check_target(target: f64) -> Result<()> {
    if target > 0.0 && target < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("target = {target} must lie in (0, 1)")))
    }
}

/// Univariate inversion of p(q, M; Q0) = target.
pub fn required_trials(q: f64, q0: f64, target: f64) -> Result<SampleSizeResult> {
    check_unit("q", q)?;
    check_unit("Q0", q0)?;
    check_target(target)?;
    if q <= q0 {
        return Err(Error::NoSolution(format!(
            "q = {q} <= Q0 = {q0}: significance never reaches {target}"
        )));
    }
    solve(
        |m| significance(&SignificanceQuery::new(TrialObservation::new(q, m)?, q0)?),
        target,
    )
}

/// Bivariate inversion with N = ratio·M.
pub fn required_trials_bivariate(
    q: f64,
    pi: f64,
    delta: f64,
    target: f64,
    ratio: f64,
    quad: &QuadratureConfig,
) -> Result<SampleSizeResult> {
    check_unit("q", q)?;
    check_unit("pi", pi)?;
    check_target(target)?;
    check_positive("ratio", ratio)?;
    quad.validate()?;
    if !(0.0..1.0).contains(&delta) {
        return Err(domain(format!("delta = {delta} must lie in [0, 1)")));
    }
    if q <= pi + delta {
        return Err(Error::NoSolution(format!(
            "q = {q} <= pi + delta = {}: superiority never reaches {target}",
            pi + delta
        )));
    }
    solve(
        |m| {
            superiority(
                &BivariateDesign::from_parts(q, m, pi, ratio * m, delta)?,
                quad,
            )
        },
        target,
    )
}

fn solve<F: Fn(f64) -> Result<f64>>(p: F, target: f64) -> Result<SampleSizeResult> {
    let (mut lo, mut hi) = if p(1.0)? >= target {
        (1e-9, 1.0)
    } else {
        let mut lo = 1.0;
        let mut hi = 2.0;
        while p(hi)? < target {
            lo = hi;
            hi *= 2.0;
            if hi > M_CEILING {
                return Err(Error::ConvergenceFailure(format!(
                    "no crossing of {target} below M = {M_CEILING:e}"
                )));
            }
        }
        (lo, hi)
    };
    while hi - lo >= BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if p(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let m_real = 0.5 * (lo + hi);

    // p over integer M may ripple, so scan a window instead of rounding up
    let first = (m_real - SCAN_HALF_WIDTH).floor().max(1.0) as u64;
    let last = (m_real + SCAN_HALF_WIDTH).ceil() as u64;
    let mut found = None;
    for m in first..=last {
        let pm = p(m as f64)?;
        if pm >= target {
            found = Some((m, pm));
            break;
        }
    }
    let (mut m_int, mut achieved_p) = match found {
        Some(hit) => hit,
        None => {
            let mut m = last + 1;
            loop {
                let pm = p(m as f64)?;
                if pm >= target {
                    break (m, pm);
                }
                m += 1;
                if m as f64 > M_CEILING {
                    return Err(Error::ConvergenceFailure("integer scan ran away".into()));
                }
            }
        }
    };
    // confirm the predecessor misses the target
    while m_int > 1 {
        let prev = p((m_int - 1) as f64)?;
        if prev >= target {
            m_int -= 1;
            achieved_p = prev;
        } else {
            break;
        }
    }
    Ok(SampleSizeResult {
        m_real,
        m_int,
        achieved_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_uni(q: f64, q0: f64, m: u64) -> f64 {
        significance(
            &SignificanceQuery::new(TrialObservation::new(q, m as f64).unwrap(), q0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn face_recognition_example() {
        let r = required_trials(0.61, 0.5, 0.9).unwrap();
        assert!((r.m_real - 34.809).abs() < 0.01, "{}", r.m_real);
        assert_eq!(r.m_int, 35);
        assert!(r.achieved_p >= 0.9);
    }

    #[test]
    fn univariate_522() {
        let r = required_trials(0.45, 0.40, 0.99).unwrap();
        assert_eq!(r.m_int, 522);
        assert!(p_uni(0.45, 0.40, 521) < 0.99);
        assert!(r.m_real <= r.m_int as f64 && (r.m_int as f64) < r.m_real + 1.0);
    }

    #[test]
    fn no_solution_cases() {
        assert!(matches!(
            required_trials(0.61, 0.61, 0.9),
            Err(Error::NoSolution(_))
        ));
        let quad = QuadratureConfig::default();
        assert!(matches!(
            required_trials_bivariate(0.45, 0.45, 0.0, 0.99, 1.0, &quad),
            Err(Error::NoSolution(_))
        ));
        assert!(required_trials(0.7, 0.5, 1.0).is_err());
    }

    #[test]
    fn verification_property_and_target_monotonicity() {
        let mut prev = 0;
        for target in [0.6, 0.75, 0.9, 0.95, 0.99] {
            let r = required_trials(0.7, 0.55, target).unwrap();
            assert!(p_uni(0.7, 0.55, r.m_int) >= target);
            if r.m_int > 1 {
                assert!(p_uni(0.7, 0.55, r.m_int - 1) < target);
            }
            assert!(r.m_int >= prev);
            prev = r.m_int;
        }
    }

    #[test]
    fn bivariate_matches_linear_scan() {
        let quad = QuadratureConfig::default();
        let r = required_trials_bivariate(0.6, 0.4, 0.0, 0.9, 1.0, &quad).unwrap();
        let scan = (1u64..)
            .find(|&m| {
                let d = BivariateDesign::from_parts(0.6, m as f64, 0.4, m as f64, 0.0).unwrap();
                superiority(&d, &quad).unwrap() >= 0.9
            })
            .unwrap();
        assert_eq!(r.m_int, scan);
        assert!(r.m_int >= required_trials(0.6, 0.4, 0.9).unwrap().m_int);
    }

    #[test]
    fn easy_target_below_one_trial() {
        // with a flat prior p(M -> 0) = 1 - Q0 = 0.9
        let r = required_trials(0.9, 0.1, 0.5).unwrap();
        assert_eq!(r.m_int, 1);
        assert!(r.m_real <= 1.0);
    }
}
