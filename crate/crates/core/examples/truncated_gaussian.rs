//! Returns that cannot fall below -100% look like a Gaussian cut at zero
//! (after shifting). Fitting the underlying Gaussian from the observed mean
//! and spread gives a wider curve than the naive one.

use binsig::contdist::{fit_truncated_gaussian, truncated_moments, GaussianSpec, TruncatedMoments};

fn main() -> binsig::Result<()> {
    println!("   mu  sigma  ->      m        s");
    for (mu, sigma) in [(3.0, 1.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (-2.0, 1.0)] {
        let t = truncated_moments(&GaussianSpec::new(mu, sigma)?)?;
        println!("{mu:>5} {sigma:>6}  -> {:>8.5} {:>8.5}", t.m, t.s);
    }

    let observed = TruncatedMoments::new(1.2, 0.9)?;
    let fit = fit_truncated_gaussian(&observed)?;
    println!(
        "\nobserved m = {}, s = {}  =>  mu = {:.6}, sigma = {:.6}",
        observed.m, observed.s, fit.mu, fit.sigma
    );
    let back = truncated_moments(&fit)?;
    println!("forward check: m = {:.10}, s = {:.10}", back.m, back.s);
    Ok(())
}
