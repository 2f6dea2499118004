//! Single roulette spins are uniform on 0..=36; averages of many spins are
//! nearly Gaussian with a much smaller spread.

use binsig::contdist::{mean_sampling_distribution, DiscreteDistribution};
use binsig::mc::{mc_mean_distribution, McConfig};

fn main() -> binsig::Result<()> {
    let wheel = DiscreteDistribution::uniform(0.0, 1.0, 37)?;
    println!(
        "one spin:  mean {:.3}, sd {:.3}",
        wheel.mean(),
        wheel.variance().sqrt()
    );

    let exact = mean_sampling_distribution(&wheel, 1000)?;
    println!(
        "mean of 1000 spins (exact): mean {:.3}, sd {:.4}",
        exact.mean(),
        exact.variance().sqrt()
    );

    let casinos = mc_mean_distribution(&wheel, 1000, 100, &McConfig::default())?;
    println!(
        "100 simulated casinos:      mean {:.3}, sd {:.4}",
        casinos.mean(),
        casinos.variance().sqrt()
    );

    let thirty = mean_sampling_distribution(&wheel, 30)?;
    let peak = thirty.mass().iter().copied().fold(0.0, f64::max);
    println!("\nmean of 30 spins, every 20th grid point:");
    for (i, m) in thirty
        .mass()
        .iter()
        .enumerate()
        .step_by(20)
        .filter(|(_, m)| **m > 0.01 * peak)
    {
        let bar = "#".repeat((60.0 * m / peak).round() as usize);
        println!("{:>7.3} {bar}", thirty.value(i));
    }
    Ok(())
}
