//! Numerical integration used throughout the crate.
//!
//! Two rules live here:
//! - a composite two-point Gauss–Legendre rule on uniform panels, with panel
//!   doubling as the convergence certificate ([`QuadratureConfig`]);
//! - a globally adaptive Gauss–Kronrod (7/15) integrator for the cross-check
//!   paths and the truncated-Gaussian moments.
//!
//! Node values of the panel rule are evaluated in parallel and reduced with a
//! fixed pairwise tree, so the result does not depend on the thread count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};

/// Panel-quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub refine: bool,
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels: 10_000,
            refine: true,
            rel_tol: 1e-9,
            max_doublings: 6,
        }
    }
}

impl QuadratureConfig {
    pub fn new(panels: usize, refine: bool, rel_tol: f64, max_doublings: u32) -> Result<Self> {
        let cfg = Self {
            panels,
            refine,
            rel_tol,
            max_doublings,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 16 {
            return Err(domain(format!(
                "panels = {} must be at least 16",
                self.panels
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-3) {
            return Err(domain(format!(
                "quadrature rel_tol = {} must lie in (0, 1e-3)",
                self.rel_tol
            )));
        }
        if self.max_doublings == 0 {
            return Err(domain("max_doublings must be positive"));
        }
        Ok(())
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }
}

/// Outcome of a panel integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelEstimate {
    pub value: f64,
    /// |last - previous| when refinement ran, otherwise 0.
    pub abs_change: f64,
    pub panels: usize,
}

/// Sum with a fixed binary tree; error grows as O(log n) instead of O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

const GL2_OFFSET: f64 = 0.288_675_134_594_812_9; // 1 / (2√3)

/// Two-point Gauss–Legendre on `panels` uniform panels of [a, b].
pub fn gauss_legendre_panels<F>(f: &F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let h = (b - a) / panels as f64;
    let per_panel: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            let d = GL2_OFFSET * h;
            Ok(0.5 * h * (f(mid - d)? + f(mid + d)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&per_panel))
}

/// Panel integration with optional doubling until two successive estimates
/// agree to `cfg.rel_tol`.
pub fn integrate_panels<F>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<PanelEstimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if b <= a {
        return Ok(PanelEstimate {
            value: 0.0,
            abs_change: 0.0,
            panels: cfg.panels,
        });
    }
    let mut panels = cfg.panels;
    let mut value = gauss_legendre_panels(f, a, b, panels)?;
    if !cfg.refine {
        return Ok(PanelEstimate {
            value,
            abs_change: 0.0,
            panels,
        });
    }
    for _ in 0..cfg.max_doublings {
        panels *= 2;
        let next = gauss_legendre_panels(f, a, b, panels)?;
        let change = (next - value).abs();
        value = next;
        if change <= cfg.rel_tol * value.abs() || change == 0.0 {
            return Ok(PanelEstimate {
                value,
                abs_change: change,
                panels,
            });
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "panel quadrature not converged to {} after {} doublings ({} panels)",
        cfg.rel_tol, cfg.max_doublings, panels
    )))
}

// ---------------------------------------------------------------------------
// adaptive Gauss–Kronrod

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// (integral, |Kronrod - Gauss|, integral of |f|)
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (l, r) = (f(c - x), f(c + x));
        let s = l + r;
        kronrod += WGK[j] * s;
        abs += WGK[j] * (l.abs() + r.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive GK15 over [a, b] split first at `breaks`.
///
/// Stops once the summed error estimate is below max(abs_tol, rel_tol·|I|),
/// or below the roundoff level 50·ε·∫|f| where it can no longer shrink.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("adaptive quadrature needs a finite interval"));
    }
    if b <= a {
        return Ok(0.0);
    }
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let (value, err, abs) = gk15(&f, w[0], w[1]);
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value,
                err,
                abs,
            });
        }
    }
    const MAX_SEGMENTS: usize = 20_000;
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum();
        // error estimates cannot resolve below this
        let roundoff = 50.0 * f64::EPSILON * heap.iter().map(|s| s.abs).sum::<f64>();
        if err <= abs_tol.max(rel_tol * total.abs()).max(roundoff) {
            let mut parts: Vec<f64> = heap.into_iter().map(|s| s.value).collect();
            parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            return Ok(parts.iter().sum());
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::ConvergenceFailure(format!(
                "adaptive quadrature: error estimate {err:e} after {MAX_SEGMENTS} segments"
            )));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further; accept what we have
            heap.push(Segment { err: 0.0, ..worst });
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err, abs) = gk15(&f, lo, hi);
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                err,
                abs,
            });
        }
    }
}
