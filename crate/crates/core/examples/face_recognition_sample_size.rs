//! How many trials are needed before a 61% hit rate beats coin flipping
//! with 90% probability, and how the answer grows with the target.

use binsig::required_trials;

fn main() -> binsig::Result<()> {
    let r = required_trials(0.61, 0.5, 0.9)?;
    println!("q = 0.61 vs Q0 = 0.5 at p >= 0.9:");
    println!("  real crossing M = {:.3}", r.m_real);
    println!("  minimal trials  = {} (p = {:.6})", r.m_int, r.achieved_p);

    println!("\ntarget   M");
    for target in [0.8, 0.9, 0.95, 0.99, 0.999] {
        let r = required_trials(0.61, 0.5, target)?;
        println!("{target:<7}  {}", r.m_int);
    }
    Ok(())
}
