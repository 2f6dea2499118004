//! Significance of a vaccine trial with 154 protected out of 162, and the
//! full significance curve over the efficacy threshold.
//!
//! ```bash
//! cargo run --example vaccine_significance
//! ```

use binsig::binom::{significance_curve, uniform_grid, DEFAULT_CURVE_POINTS};
use binsig::{significance, SignificanceQuery, TrialObservation};

fn main() -> binsig::Result<()> {
    let obs = TrialObservation::from_counts(154, 162)?;
    println!("observed efficacy q = {:.5} from M = {}", obs.q(), obs.m());

    for q0 in [0.90, 0.93, 0.95] {
        let p = significance(&SignificanceQuery::new(obs, q0)?)?;
        println!("P(Q >= {q0:.2}) = {p:.6}");
    }

    // the curve falls from 1 to 0 as the threshold moves across q
    let curve = significance_curve(&obs, &uniform_grid(DEFAULT_CURVE_POINTS))?;
    println!("\nQ0      p");
    for pt in curve.iter().filter(|pt| pt.q0 >= 0.85).step_by(2) {
        println!("{:.3}  {:.6}", pt.q0, pt.p);
    }
    Ok(())
}
