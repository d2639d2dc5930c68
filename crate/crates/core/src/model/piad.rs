//! PIAD-SRNN: a linear trend branch plus a PI-SRNN seasonal branch.
//!
//! Each configured continuous channel is split by a moving average. The
//! target channel's look-back trend feeds a single linear map to the
//! horizon. The per-step seasonal components, together with any channels
//! left undecomposed (the calendar encodings), form the PI-SRNN input.
//! The forecast is the plain sum of both branches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::api::{
    check_window, stack_rows, tensor_mut, tensor_ref, vector_mut, vector_ref, Forecaster, ModelConfig, ParamMut,
    ParamRef, Trainable,
};
use super::cell::{pi_srnn_encode, pi_srnn_forecast, record_encode_readout, CellVars, PiSrnnParams};
use crate::dataio::Window;
use crate::decompose::moving_average_decompose;
use crate::error::{Error, Result};
use crate::numerics::{add_vec, affine, GradTape, Tensor2, Var, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct PiadParams {
    pub seasonal: PiSrnnParams,
    pub trend_w: Tensor2,
    pub trend_b: Vector,
    pub kernel: usize,
}

/// Uniform(−1/√fan_in, 1/√fan_in) matrix, fan_in = rows.
pub(crate) fn uniform_init(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Tensor2 {
    let bound = 1.0 / (rows as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.gen_range(-bound..bound)).collect();
    Tensor2::from_vec(rows, cols, data).expect("init shape")
}

pub(crate) fn init_cell(rng: &mut ChaCha8Rng, config: &ModelConfig) -> PiSrnnParams {
    let (ds, du, t) = (config.state_dim, config.input_dim, config.horizon);
    PiSrnnParams {
        w_dss: uniform_init(rng, ds, ds).map(|w| w * config.recurrent_init_scale),
        b_dss: Vector::zeros(ds),
        w_dsu: uniform_init(rng, du, ds),
        b_dsu: Vector::zeros(ds),
        w_out: uniform_init(rng, ds, t),
        b_out: Vector::zeros(t),
        state_activation: config.state_activation,
    }
}

/// Seeded initial parameters: weights uniform in ±1/√fan_in, biases zero.
pub fn init_params(config: &ModelConfig) -> Result<PiadParams> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let seasonal = init_cell(&mut rng, config);
    let trend_w = uniform_init(&mut rng, config.lookback, config.horizon);
    Ok(PiadParams {
        seasonal,
        trend_w,
        trend_b: Vector::zeros(config.horizon),
        kernel: config.kernel,
    })
}

/// Exact parameter total of a PIAD-SRNN.
pub fn count_params(p: &PiadParams) -> usize {
    p.seasonal.param_count() + p.trend_w.rows() * p.trend_w.cols() + p.trend_b.len()
}

/// Multiply-accumulates in one forward pass of a single window.
pub fn count_macs(config: &ModelConfig) -> usize {
    let (l, t, ds, du) = (config.lookback, config.horizon, config.state_dim, config.input_dim);
    l * (ds * ds + du * ds) + ds * t + l * t
}

/// Branch inputs for one window: target trend and per-step seasonal inputs.
pub(crate) fn branch_inputs(
    input: &Tensor2,
    channels: &[String],
    config: &ModelConfig,
    kernel: usize,
) -> Result<(Vec<f64>, Vec<Vector>)> {
    let target = config.resolve(channels)?;
    let lookback = input.rows();
    let mut columns: Vec<Vec<f64>> = (0..channels.len()).map(|c| input.column(c)).collect();
    let mut target_trend = None;
    for (c, name) in channels.iter().enumerate() {
        if config.decomposed_channels.contains(name) {
            let d = moving_average_decompose(&columns[c], kernel)?;
            if c == target {
                target_trend = Some(d.trend);
            }
            columns[c] = d.seasonal;
        }
    }
    // An undecomposed target feeds its raw values to the trend branch.
    let target_trend = target_trend.unwrap_or_else(|| input.column(target));
    let steps = (0..lookback)
        .map(|t| Vector(columns.iter().map(|col| col[t]).collect()))
        .collect();
    Ok((target_trend, steps))
}

/// Forecast with both branch contributions: `(ŷ, trend_part, seasonal_part)`.
pub fn piad_forward(
    input: &Tensor2,
    channels: &[String],
    p: &PiadParams,
    config: &ModelConfig,
) -> Result<(Vector, Vector, Vector)> {
    check_window(input, config.lookback, channels)?;
    config.check_input_width(channels)?;
    let (trend, steps) = branch_inputs(input, channels, config, p.kernel)?;
    let trend_part = affine(&Vector(trend), &p.trend_w, &p.trend_b)?;
    let trace = pi_srnn_encode(&steps, config.lookback, &p.seasonal)?;
    let seasonal_part = pi_srnn_forecast(&trace, &p.seasonal)?;
    let y = add_vec(&trend_part, &seasonal_part);
    Ok((y, trend_part, seasonal_part))
}

/// A configured PIAD-SRNN forecaster.
#[derive(Clone, Debug, PartialEq)]
pub struct PiadSrnn {
    pub config: ModelConfig,
    pub params: PiadParams,
}

impl PiadSrnn {
    pub fn new(config: ModelConfig) -> Result<Self> {
        let params = init_params(&config)?;
        Ok(PiadSrnn { config, params })
    }

    pub fn from_parts(config: ModelConfig, params: PiadParams) -> Result<Self> {
        params.seasonal.validate()?;
        let expect = (config.lookback, config.horizon);
        if params.trend_w.shape() != expect || params.trend_b.len() != config.horizon {
            return Err(Error::Shape {
                op: "PIAD trend branch",
                left: params.trend_w.shape_str(),
                right: format!("{}x{}", expect.0, expect.1),
            });
        }
        Ok(PiadSrnn { config, params })
    }

    pub fn forward(&self, input: &Tensor2, channels: &[String]) -> Result<(Vector, Vector, Vector)> {
        piad_forward(input, channels, &self.params, &self.config)
    }
}

impl Forecaster for PiadSrnn {
    fn name(&self) -> &'static str {
        "piad-srnn"
    }

    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        Ok(self.forward(input, channels)?.0)
    }
}

impl Trainable for PiadSrnn {
    fn params(&self) -> Vec<ParamRef<'_>> {
        let s = &self.params.seasonal;
        vec![
            tensor_ref("W_dSS", &s.w_dss),
            vector_ref("b_dSS", &s.b_dss),
            tensor_ref("W_dSU", &s.w_dsu),
            vector_ref("b_dSU", &s.b_dsu),
            tensor_ref("W_out", &s.w_out),
            vector_ref("b_out", &s.b_out),
            tensor_ref("trend_W", &self.params.trend_w),
            vector_ref("trend_b", &self.params.trend_b),
        ]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let s = &mut self.params.seasonal;
        vec![
            tensor_mut("W_dSS", &mut s.w_dss),
            vector_mut("b_dSS", &mut s.b_dss),
            tensor_mut("W_dSU", &mut s.w_dsu),
            vector_mut("b_dSU", &mut s.b_dsu),
            tensor_mut("W_out", &mut s.w_out),
            vector_mut("b_out", &mut s.b_out),
            tensor_mut("trend_W", &mut self.params.trend_w),
            vector_mut("trend_b", &mut self.params.trend_b),
        ]
    }

    fn record(&self, tape: &mut GradTape, batch: &[&Window], channels: &[String]) -> Result<(Var, Vec<Var>)> {
        self.config.check_input_width(channels)?;
        let (l, du) = (self.config.lookback, self.config.input_dim);
        let mut trends = Vec::with_capacity(batch.len());
        let mut steps = Vec::with_capacity(batch.len());
        for w in batch {
            check_window(&w.input, l, channels)?;
            let (trend, u) = branch_inputs(&w.input, channels, &self.config, self.params.kernel)?;
            trends.push(trend);
            steps.push(u);
        }
        let inputs: Vec<Tensor2> = (0..l)
            .map(|t| {
                let mut data = Vec::with_capacity(batch.len() * du);
                for u in &steps {
                    data.extend_from_slice(u[t].as_slice());
                }
                Tensor2::from_vec(batch.len(), du, data).expect("step batch")
            })
            .collect();

        let cell = CellVars::record(tape, &self.params.seasonal);
        let trend_w = tape.leaf(self.params.trend_w.clone());
        let trend_b = tape.leaf(Tensor2::row(self.params.trend_b.as_slice()));

        let seasonal = record_encode_readout(tape, &cell, inputs, &self.params.seasonal)?;
        let trend_x = tape.leaf(Tensor2::from_vec(batch.len(), l, trends.concat())?);
        let trend = tape.affine(trend_x, trend_w, trend_b)?;
        let pred = tape.add(trend, seasonal)?;

        let mut vars = cell.all();
        vars.push(trend_w);
        vars.push(trend_b);
        Ok((pred, vars))
    }
}

/// PI-SRNN without decomposition: raw per-step inputs, direct readout.
#[derive(Clone, Debug, PartialEq)]
pub struct PiSrnn {
    pub config: ModelConfig,
    pub params: PiSrnnParams,
}

impl PiSrnn {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let params = init_cell(&mut rng, &config);
        Ok(PiSrnn { config, params })
    }

    fn steps(input: &Tensor2) -> Vec<Vector> {
        (0..input.rows()).map(|r| Vector(input.row_slice(r).to_vec())).collect()
    }
}

impl Forecaster for PiSrnn {
    fn name(&self) -> &'static str {
        "pi-srnn"
    }

    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        check_window(input, self.config.lookback, channels)?;
        self.config.check_input_width(channels)?;
        self.config.resolve(channels)?;
        let trace = pi_srnn_encode(&Self::steps(input), self.config.lookback, &self.params)?;
        pi_srnn_forecast(&trace, &self.params)
    }
}

impl Trainable for PiSrnn {
    fn params(&self) -> Vec<ParamRef<'_>> {
        let s = &self.params;
        vec![
            tensor_ref("W_dSS", &s.w_dss),
            vector_ref("b_dSS", &s.b_dss),
            tensor_ref("W_dSU", &s.w_dsu),
            vector_ref("b_dSU", &s.b_dsu),
            tensor_ref("W_out", &s.w_out),
            vector_ref("b_out", &s.b_out),
        ]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let s = &mut self.params;
        vec![
            tensor_mut("W_dSS", &mut s.w_dss),
            vector_mut("b_dSS", &mut s.b_dss),
            tensor_mut("W_dSU", &mut s.w_dsu),
            vector_mut("b_dSU", &mut s.b_dsu),
            tensor_mut("W_out", &mut s.w_out),
            vector_mut("b_out", &mut s.b_out),
        ]
    }

    fn record(&self, tape: &mut GradTape, batch: &[&Window], channels: &[String]) -> Result<(Var, Vec<Var>)> {
        self.config.check_input_width(channels)?;
        let (l, du) = (self.config.lookback, self.config.input_dim);
        for w in batch {
            check_window(&w.input, l, channels)?;
        }
        let inputs = (0..l)
            .map(|t| stack_rows(batch, du, |w| w.input.row_slice(t).to_vec()))
            .collect();
        let cell = CellVars::record(tape, &self.params);
        let pred = record_encode_readout(tape, &cell, inputs, &self.params)?;
        Ok((pred, cell.all()))
    }
}
