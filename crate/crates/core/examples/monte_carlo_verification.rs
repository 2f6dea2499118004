//! Posterior sampling estimates next to the analytic values.

use binsig::mc::{mc_significance, mc_superiority, McConfig};
use binsig::{
    significance, superiority, BivariateDesign, QuadratureConfig, SignificanceQuery,
    TrialObservation,
};

fn main() -> binsig::Result<()> {
    let cfg = McConfig::new(2024, 2_000_000)?;

    let query = SignificanceQuery::new(TrialObservation::from_counts(154, 162)?, 0.95)?;
    let analytic = significance(&query)?;
    let est = mc_significance(&query, &cfg)?;
    println!(
        "single arm:  analytic {analytic:.6}  mc {:.6} ± {:.6}  ({:.2} se)",
        est.value,
        est.std_err,
        est.z_score(analytic)
    );

    let design = BivariateDesign::from_parts(0.45, 1059.0, 0.40, 1059.0, 0.0)?;
    let analytic = superiority(&design, &QuadratureConfig::default())?;
    let est = mc_superiority(&design, &cfg)?;
    println!(
        "two arms:    analytic {analytic:.6}  mc {:.6} ± {:.6}  ({:.2} se)",
        est.value,
        est.std_err,
        est.z_score(analytic)
    );
    Ok(())
}
