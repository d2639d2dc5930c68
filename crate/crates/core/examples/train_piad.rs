//! Train PIAD-SRNN on a simulated office and compare it with the baselines.
//!
//! ```text
//! cargo run --release --example train_piad -- [state_dim] [epochs] [seed] [recurrent_init_scale] [learning_rate]
//! ```

use std::time::Instant;

use co2cast::baselines::Persistence;
use co2cast::dataio::{prepare, SplitRatios, WindowSpec, CO2_IN};
use co2cast::model::{AnyModel, ModelConfig, ModelKind};
use co2cast::physics::{generate_scenario, office_scenario, OfficeScenario};
use co2cast::train::{evaluate_loss, fit, TrainConfig};

fn main() -> co2cast::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let state_dim = args.first().map_or(64, |v| *v as usize);
    let epochs = args.get(1).map_or(20, |v| *v as usize);
    let seed = args.get(2).map_or(0, |v| *v as u64);
    let scale = args.get(3).copied().unwrap_or(0.01);
    let lr = args.get(4).copied().unwrap_or(3e-3);

    let frame = generate_scenario(&office_scenario(&OfficeScenario {
        hours: 4000,
        seed: 7,
        ..OfficeScenario::default()
    }))?;
    let data = prepare(&frame, CO2_IN, WindowSpec::new(96, 96), SplitRatios::default(), false)?;
    println!("train {} windows, val {} windows", data.train.len(), data.val.len());

    let config = ModelConfig {
        state_dim,
        recurrent_init_scale: scale,
        seed,
        ..ModelConfig::default()
    };
    let persistence = Persistence { config: config.clone() };
    println!("persistence val MSE {:.4}", evaluate_loss(&persistence, &data.val)?);

    let train_cfg = TrainConfig {
        max_epochs: epochs,
        learning_rate: lr,
        seed,
        ..TrainConfig::default()
    };
    for kind in [ModelKind::Linear, ModelKind::Dlinear, ModelKind::PiadSrnn] {
        let mut model = AnyModel::init(kind, config.clone())?;
        let started = Instant::now();
        let trainable = model.as_trainable_mut().expect("learnable model");
        let report = fit(trainable, &data.train, &data.val, &train_cfg)?;
        println!(
            "{:<10} val MSE {:.4} (best epoch {} of {}, {:.1}s, {} params)",
            kind.as_str(),
            report.best_val_loss,
            report.best_epoch,
            report.epochs_run,
            started.elapsed().as_secs_f64(),
            model.param_count()
        );
        if std::env::var_os("SHOW_HISTORY").is_some() {
            for r in &report.history {
                println!(
                    "  epoch {:>3} train {:.4e} val {:.4e}",
                    r.epoch, r.train_loss, r.val_loss
                );
            }
        }
    }
    Ok(())
}
