//! Train PIAD-SRNN for several horizons, save each checkpoint, reload it and
//! report test error in ppm.
//!
//! ```text
//! cargo run --release --example forecast_horizons -- [epochs]
//! ```

use co2cast::dataio::{prepare, SplitRatios, WindowSpec, CO2_IN};
use co2cast::evalsuite::evaluate_forecast;
use co2cast::model::{load_checkpoint, save_checkpoint, AnyModel, ModelConfig, ModelKind};
use co2cast::physics::{generate_scenario, office_scenario, OfficeScenario};
use co2cast::train::{fit, TrainConfig};

fn main() -> co2cast::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(15);
    let frame = generate_scenario(&office_scenario(&OfficeScenario {
        hours: 4000,
        seed: 7,
        ..OfficeScenario::default()
    }))?;
    let dir = std::env::temp_dir().join("co2cast-horizons");
    std::fs::create_dir_all(&dir)?;

    for horizon in [24, 48, 96] {
        let data = prepare(
            &frame,
            CO2_IN,
            WindowSpec::new(96, horizon),
            SplitRatios::default(),
            true,
        )?;
        let mut model = AnyModel::init(
            ModelKind::PiadSrnn,
            ModelConfig {
                horizon,
                state_dim: 16,
                ..ModelConfig::default()
            },
        )?;
        let train_cfg = TrainConfig {
            learning_rate: 3e-3,
            max_epochs: epochs,
            ..TrainConfig::default()
        };
        fit(
            model.as_trainable_mut().expect("learnable"),
            &data.train,
            &data.val,
            &train_cfg,
        )?;

        let path = dir.join(format!("piad_T{horizon}.json"));
        save_checkpoint(&model, Some(&data.normalizer), &path)?;
        let restored = load_checkpoint(&path)?;
        let norm = restored.normalizer.expect("saved with normalizer");
        let Some(test) = &data.test else {
            println!("T={horizon}: test range too short");
            continue;
        };
        let m = evaluate_forecast(restored.model.as_forecaster(), test, &norm)?;
        println!(
            "T={horizon:>3}: {} test windows, MSE {:.4} (norm), RMSE {:.1} ppm, MAE {:.1} ppm",
            m.windows,
            m.mse,
            m.mse_ppm.sqrt(),
            m.mae_ppm
        );
    }
    println!("checkpoints in {}", dir.display());
    Ok(())
}
