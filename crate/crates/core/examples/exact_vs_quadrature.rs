//! Integer counts admit a finite-sum evaluation of the superiority
//! probability; compare it with panel quadrature at several panel counts.

use binsig::bivariate::{inc_beta_integer_series, superiority_exact};
use binsig::specfun::{inc_beta, Accuracy};
use binsig::{superiority, BivariateDesign, QuadratureConfig};

fn main() -> binsig::Result<()> {
    let design = BivariateDesign::from_parts(0.6, 10.0, 0.4, 10.0, 0.0)?;
    let exact = superiority_exact(&design)?;
    println!("exact series          {exact:.15}");
    for panels in [16, 100, 1_000, 10_000] {
        let quad = QuadratureConfig::default()
            .with_panels(panels)
            .without_refinement();
        let p = superiority(&design, &quad)?;
        println!(
            "{panels:>6} panels         {p:.15}  (diff {:.1e})",
            (p - exact).abs()
        );
    }

    let with_margin = BivariateDesign::from_parts(0.7, 30.0, 0.4, 20.0, 0.1)?;
    println!(
        "\nwith delta = 0.1: exact {:.12}, quadrature {:.12}",
        superiority_exact(&with_margin)?,
        superiority(&with_margin, &QuadratureConfig::default())?
    );

    let s = inc_beta_integer_series(12, 5, 0.37)?;
    let b = inc_beta(0.37, 6.0, 8.0, &Accuracy::default())?;
    println!("\nB_0.37(6, 8): series {s:.15e}, continued fraction {b:.15e}");
    Ok(())
}
