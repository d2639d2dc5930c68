//! Simulate a naturally ventilated office with the CO₂ mass balance and
//! write it as CSV.
//!
//! ```text
//! cargo run --release --example simulate_office -- [hours] [out.csv]
//! ```

use co2cast::dataio::{write_csv, CO2_IN};
use co2cast::physics::{
    generate_scenario, office_scenario, simulate_co2, steady_state, HourlyProfile, OfficeScenario, PhysicsConfig,
};

fn main() -> co2cast::Result<()> {
    let mut args = std::env::args().skip(1);
    let hours = args.next().and_then(|a| a.parse().ok()).unwrap_or(24 * 7 * 4);
    let out = args.next().unwrap_or_else(|| "office.csv".into());

    // A single room first: 100 m³, 120 kg/h of outdoor air, 500 ppm/h of generation.
    let room = PhysicsConfig {
        mdot: 120.0,
        rho: 1.2,
        volume: 100.0,
        co2_out: HourlyProfile::Constant(420.0),
        generation: HourlyProfile::Constant(500.0),
        step: 0.05,
    };
    let trace = simulate_co2(&room, 420.0, 6)?;
    println!(
        "air change rate {:.2} /h, steady state {} ppm",
        room.air_change_rate(),
        steady_state(&room)?
    );
    for (h, c) in trace.iter().enumerate() {
        println!("  t = {h} h: {c:.1} ppm");
    }

    let frame = generate_scenario(&office_scenario(&OfficeScenario {
        hours,
        ..OfficeScenario::default()
    }))?;
    let co2 = &frame.channel(CO2_IN)?.values;
    let max = co2.iter().cloned().fold(f64::MIN, f64::max);
    let mean = co2.iter().sum::<f64>() / co2.len() as f64;
    println!(
        "office: {} hourly rows, CO₂ mean {mean:.0} ppm, peak {max:.0} ppm",
        frame.len()
    );
    write_csv(&frame, &out)?;
    println!("wrote {out}");
    Ok(())
}
