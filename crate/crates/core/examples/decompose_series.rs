//! Split a simulated CO₂ series into a daily moving-average trend and the
//! seasonal residual.
//!
//! ```text
//! cargo run --example decompose_series -- [kernel]
//! ```

use co2cast::dataio::CO2_IN;
use co2cast::decompose::{moving_average_decompose, DEFAULT_KERNEL};
use co2cast::physics::{generate_scenario, office_scenario, OfficeScenario};

fn main() -> co2cast::Result<()> {
    let kernel = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(DEFAULT_KERNEL);
    let frame = generate_scenario(&office_scenario(&OfficeScenario {
        hours: 24 * 3,
        ..OfficeScenario::default()
    }))?;
    let co2 = &frame.channel(CO2_IN)?.values;
    let d = moving_average_decompose(co2, kernel)?;

    println!("{:>4} {:>9} {:>9} {:>9}", "hour", "co2", "trend", "seasonal");
    for (h, ((x, t), s)) in co2.iter().zip(&d.trend).zip(&d.seasonal).enumerate().step_by(3) {
        println!("{h:>4} {x:>9.1} {t:>9.1} {s:>9.1}");
    }
    let worst = d
        .reconstruct()
        .iter()
        .zip(co2)
        .map(|(r, x)| (r - x).abs())
        .fold(0.0, f64::max);
    println!("kernel {kernel}: largest |trend + seasonal - x| = {worst:.1e} ppm");
    Ok(())
}
