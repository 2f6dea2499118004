//! Probability that one noisy measurement exceeds another, for Gaussian
//! and for tabulated distributions.

use binsig::contdist::{
    superiority_gaussian, superiority_gaussian_nested, superiority_tabulated, DiscreteDistribution,
    GaussianSpec,
};

fn main() -> binsig::Result<()> {
    let control = GaussianSpec::new(100.0, 15.0)?;
    for shift in [0.0, 2.0, 5.0, 15.0] {
        let test = GaussianSpec::new(100.0 + shift, 15.0)?;
        println!(
            "mean shift {shift:>4}: closed form {:.12}, nested {:.12}",
            superiority_gaussian(&control, &test, 0.0)?,
            superiority_gaussian_nested(&control, &test, 0.0)?
        );
    }

    // two dice: ties count toward "second >= first"
    let die = DiscreteDistribution::uniform(1.0, 1.0, 6)?;
    println!(
        "\nP(die2 >= die1)     = {:.6}",
        superiority_tabulated(&die, &die, 0.0)?
    );
    println!(
        "P(die2 >= die1 + 1) = {:.6}",
        superiority_tabulated(&die, &die, 1.0)?
    );
    Ok(())
}
