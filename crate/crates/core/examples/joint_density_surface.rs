//! Writes the joint posterior surface of a 24/40 test arm against a 16/40
//! control arm as CSV (`Q,Pi,density`) on a 50 x 50 grid.
//!
//! ```bash
//! cargo run --example joint_density_surface > surface.csv
//! ```

use binsig::bivariate::joint_density;

fn main() -> binsig::Result<()> {
    let n = 50;
    let mut out = csv::Writer::from_writer(std::io::stdout());
    out.write_record(["Q", "Pi", "density"]).expect("stdout");
    let mut peak = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
            // scaled to integrate to one over the unit square
            let d = 41.0 * 41.0 * joint_density(0.6, x, 40.0, 0.4, y, 40.0)?;
            if d > peak.2 {
                peak = (x, y, d);
            }
            out.write_record([x.to_string(), y.to_string(), d.to_string()])
                .expect("stdout");
        }
    }
    out.flush().expect("stdout");
    eprintln!(
        "peak {:.2} at Q = {:.3}, Pi = {:.3}",
        peak.2, peak.0, peak.1
    );
    Ok(())
}
