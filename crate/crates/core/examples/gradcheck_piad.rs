//! Compare reverse-mode gradients of the PIAD-SRNN training loss with
//! central finite differences.
//!
//! ```text
//! cargo run --example gradcheck_piad
//! ```

use co2cast::dataio::{make_windows, Normalizer, Window, WindowSpec, CO2_IN};
use co2cast::model::{ModelConfig, PiadSrnn};
use co2cast::physics::{generate_scenario, office_scenario, OfficeScenario};
use co2cast::train::gradcheck;

fn main() -> co2cast::Result<()> {
    let frame = generate_scenario(&office_scenario(&OfficeScenario {
        hours: 300,
        ..OfficeScenario::default()
    }))?;
    let norm = Normalizer::fit(&frame, 0..frame.len())?;
    let set = make_windows(&frame, &norm, CO2_IN, WindowSpec::new(16, 4), 0..frame.len())?;
    let batch: Vec<&Window> = set.iter().step_by(50).take(4).collect();

    let mut model = PiadSrnn::new(ModelConfig {
        lookback: 16,
        horizon: 4,
        state_dim: 8,
        recurrent_init_scale: 1.0,
        ..ModelConfig::default()
    })?;
    let r = gradcheck(&mut model, &batch, &set.channels, 1e-4)?;
    println!(
        "{} entries checked, {} skipped next to a ReLU kink",
        r.checked, r.skipped
    );
    if let Some(name) = &r.worst_param {
        println!(
            "worst: {name}[{}] analytic {:.6e} numeric {:.6e}, relative error {:.2e}",
            r.worst_index, r.worst_analytic, r.worst_numeric, r.max_rel_error
        );
    }
    println!(
        "{}",
        if r.passed {
            "gradients agree"
        } else {
            "gradients DISAGREE"
        }
    );
    Ok(())
}
