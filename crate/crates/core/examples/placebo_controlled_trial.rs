//! A test arm at 45% against a control arm at 40%: the single-arm answer
//! treats 40% as exactly known, the two-arm answer accounts for the
//! uncertainty of the control arm too.
//!
//! The bivariate search evaluates the panel quadrature a few dozen times;
//! build with `--release` for speed.

use binsig::{
    required_trials, required_trials_bivariate, superiority, BivariateDesign, QuadratureConfig,
};

fn main() -> binsig::Result<()> {
    let quad = QuadratureConfig::default();
    for m in [1058.0, 1059.0] {
        let design = BivariateDesign::from_parts(0.45, m, 0.40, m, 0.0)?;
        println!(
            "M = N = {m}: P(Q >= Π) = {:.9}",
            superiority(&design, &quad)?
        );
    }

    let single = required_trials(0.45, 0.40, 0.99)?;
    let paired = required_trials_bivariate(0.45, 0.40, 0.0, 0.99, 1.0, &quad)?;
    println!("\ntrials for p >= 0.99:");
    println!("  known control rate: M >= {}", single.m_int);
    println!("  measured control:   M = N >= {}", paired.m_int);

    // a margin of two points or an unbalanced allocation
    let margin = required_trials_bivariate(0.45, 0.40, 0.02, 0.9, 1.0, &quad)?;
    let double_control = required_trials_bivariate(0.45, 0.40, 0.0, 0.99, 2.0, &quad)?;
    println!("  delta = 0.02, p >= 0.9: M = N >= {}", margin.m_int);
    println!("  N = 2M, p >= 0.99: M >= {}", double_control.m_int);
    Ok(())
}
