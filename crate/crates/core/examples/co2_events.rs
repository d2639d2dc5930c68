//! Flag high-CO₂ events with an IQR outlier threshold fitted on training
//! data, and score forecasts of those events on the test range.
//!
//! ```text
//! cargo run --release --example co2_events
//! ```

use co2cast::dataio::{prepare, SplitRatios, WindowSpec, CO2_IN};
use co2cast::evalsuite::event_pipeline;
use co2cast::model::{AnyModel, ModelConfig, ModelKind};
use co2cast::physics::{generate_scenario, office_scenario, OfficeScenario};
use co2cast::train::{fit, TrainConfig};

fn main() -> co2cast::Result<()> {
    let frame = generate_scenario(&office_scenario(&OfficeScenario {
        hours: 4000,
        seed: 7,
        max_people: 5,
        ..OfficeScenario::default()
    }))?;
    let data = prepare(&frame, CO2_IN, WindowSpec::new(96, 96), SplitRatios::default(), true)?;
    let config = ModelConfig {
        state_dim: 16,
        ..ModelConfig::default()
    };
    let train_cfg = TrainConfig {
        learning_rate: 3e-3,
        max_epochs: 30,
        ..TrainConfig::default()
    };

    for kind in [ModelKind::Persistence, ModelKind::Dlinear, ModelKind::PiadSrnn] {
        let mut model = AnyModel::init(kind, config.clone())?;
        if let Some(t) = model.as_trainable_mut() {
            fit(t, &data.train, &data.val, &train_cfg)?;
        }
        let out = event_pipeline(model.as_forecaster(), &frame, &data.normalizer, &data.plan, CO2_IN)?;
        let r = &out.report;
        println!(
            "{:<12} threshold {:.0} ppm | TP {} FP {} TN {} FN {} | acc {:.3} prec {:.3} rec {:.3} F1 {:.3}",
            kind.as_str(),
            out.threshold.threshold,
            r.tp,
            r.fp,
            r.tn,
            r.fn_,
            r.accuracy,
            r.precision,
            r.recall,
            r.f1
        );
    }
    Ok(())
}
