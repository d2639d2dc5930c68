//! Fill a long contiguous CO₂ gap with recursive one-step PIAD-SRNN
//! forecasts and compare against carrying the last observation forward.
//!
//! ```text
//! cargo run --release --example impute_gap
//! ```

use co2cast::dataio::{prepare, Cell, SplitRatios, WindowSpec, CO2_IN};
use co2cast::evalsuite::{forward_fill, impute_series, WarmupFallback};
use co2cast::model::{ModelConfig, PiadSrnn};
use co2cast::physics::{
    generate_scenario, inject_missingness, office_scenario, MissingMode, MissingSpec, OfficeScenario,
};
use co2cast::train::{fit, TrainConfig};

fn main() -> co2cast::Result<()> {
    let truth = generate_scenario(&office_scenario(&OfficeScenario {
        hours: 4000,
        seed: 7,
        ..OfficeScenario::default()
    }))?;
    // A 13.6 % block, placed inside the last fifth of the series.
    let test_start = truth.len() * 4 / 5;
    let masked = inject_missingness(
        &truth,
        &MissingSpec {
            fraction: 0.136,
            mode: MissingMode::Contiguous,
            channels: vec![CO2_IN.into()],
            region: Some(test_start..truth.len()),
        },
        1,
    )?;
    let gap: Vec<usize> = (0..masked.len())
        .filter(|&r| masked.channel(CO2_IN).map(|c| c.is_missing(r)).unwrap_or(false))
        .collect();
    println!("masked {} rows starting at {}", gap.len(), gap[0]);

    let config = ModelConfig {
        lookback: 48,
        horizon: 1,
        state_dim: 16,
        ..ModelConfig::default()
    };
    let data = prepare(&masked, CO2_IN, WindowSpec::new(48, 1), SplitRatios::default(), true)?;
    let mut model = PiadSrnn::new(config)?;
    let report = fit(
        &mut model,
        &data.train,
        &data.val,
        &TrainConfig {
            learning_rate: 3e-3,
            max_epochs: 40,
            ..TrainConfig::default()
        },
    )?;
    println!(
        "one-step model: best val MSE {:.4} at epoch {}",
        report.best_val_loss, report.best_epoch
    );

    let filled = impute_series(&model, &masked, &data.normalizer, CO2_IN, WarmupFallback::Error)?;
    let ffill = forward_fill(&masked, CO2_IN)?;
    let err = |f: &co2cast::dataio::TimeSeriesFrame| -> co2cast::Result<f64> {
        let (v, t) = (&f.channel(CO2_IN)?.values, &truth.channel(CO2_IN)?.values);
        Ok(gap.iter().map(|&r| (v[r] - t[r]).powi(2)).sum::<f64>() / gap.len() as f64)
    };
    let filled_cells = gap
        .iter()
        .filter(|&&r| {
            filled
                .channel(CO2_IN)
                .map(|c| c.cells[r] == Cell::Imputed)
                .unwrap_or(false)
        })
        .count();
    println!("imputed {filled_cells} of {} cells", gap.len());
    println!("gap MSE, model:        {:.1} ppm²", err(&filled)?);
    println!("gap MSE, forward fill: {:.1} ppm²", err(&ffill)?);
    Ok(())
}
