//! Parameter counts, multiply-accumulates and single-window latency for
//! every model family at the default configuration.
//!
//! ```text
//! cargo run --release --example bench_models -- [horizon]
//! ```

use co2cast::cli::bench_model;
use co2cast::model::{AnyModel, ModelConfig, ModelKind};

fn main() -> co2cast::Result<()> {
    let horizon = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(96);
    let config = ModelConfig {
        horizon,
        ..ModelConfig::default()
    };
    println!(
        "{:<12} {:>8} {:>10} {:>10} {:>10}",
        "model", "params", "MACs", "ms", "KiB"
    );
    for kind in ModelKind::ALL {
        let r = bench_model(&AnyModel::init(kind, config.clone())?)?;
        println!(
            "{:<12} {:>8} {:>10} {:>10.4} {:>10.1}",
            r.model,
            r.params,
            r.macs,
            r.latency_ms_mean,
            r.peak_memory_bytes as f64 / 1024.0
        );
    }
    Ok(())
}
