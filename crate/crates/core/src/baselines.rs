//! Reference forecasters: persistence, Linear, DLinear and a tanh RNN.
//!
//! Linear and DLinear read only the target column of the window; the RNN
//! reads the full per-step channel vector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::Window;
use crate::decompose::moving_average_decompose;
use crate::error::{invalid, Error, Result};
use crate::model::api::{check_window, stack_rows, tensor_mut, tensor_ref, vector_mut, vector_ref, ParamMut, ParamRef};
use crate::model::piad::uniform_init;
use crate::model::{Forecaster, ModelConfig, Trainable};
use crate::numerics::{add_vec, affine, GradTape, Tensor2, Var, Vector};

/// Repeats the last observed target value.
#[derive(Clone, Debug, PartialEq)]
pub struct Persistence {
    pub config: ModelConfig,
}

pub fn persistence_forecast(target_history: &[f64], horizon: usize) -> Result<Vector> {
    let last = target_history
        .last()
        .ok_or_else(|| invalid("persistence needs a non-empty window"))?;
    Ok(Vector(vec![*last; horizon]))
}

impl Forecaster for Persistence {
    fn name(&self) -> &'static str {
        "persistence"
    }

    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        let target = self.config.resolve(channels)?;
        persistence_forecast(&input.column(target), self.config.horizon)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearParams {
    pub w: Tensor2,
    pub b: Vector,
}

impl LinearParams {
    fn init(rng: &mut ChaCha8Rng, lookback: usize, horizon: usize) -> Self {
        LinearParams {
            w: uniform_init(rng, lookback, horizon),
            b: Vector::zeros(horizon),
        }
    }
}

/// `window·W + b` on the target history.
pub fn linear_forecast(window_target: &[f64], p: &LinearParams) -> Result<Vector> {
    if window_target.len() != p.w.rows() {
        return Err(Error::Shape {
            op: "linear_forecast",
            left: format!("window[{}]", window_target.len()),
            right: p.w.shape_str(),
        });
    }
    affine(&Vector(window_target.to_vec()), &p.w, &p.b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub config: ModelConfig,
    pub params: LinearParams,
}

impl LinearModel {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let params = LinearParams::init(&mut rng, config.lookback, config.horizon);
        Ok(LinearModel { config, params })
    }
}

impl Forecaster for LinearModel {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        check_window(input, self.config.lookback, channels)?;
        let target = self.config.resolve(channels)?;
        linear_forecast(&input.column(target), &self.params)
    }
}

impl Trainable for LinearModel {
    fn params(&self) -> Vec<ParamRef<'_>> {
        vec![tensor_ref("W", &self.params.w), vector_ref("b", &self.params.b)]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        vec![tensor_mut("W", &mut self.params.w), vector_mut("b", &mut self.params.b)]
    }

    fn record(&self, tape: &mut GradTape, batch: &[&Window], channels: &[String]) -> Result<(Var, Vec<Var>)> {
        let target = self.config.resolve(channels)?;
        let l = self.config.lookback;
        for w in batch {
            check_window(&w.input, l, channels)?;
        }
        let x = tape.leaf(stack_rows(batch, l, |w| w.input.column(target)));
        let w = tape.leaf(self.params.w.clone());
        let b = tape.leaf(Tensor2::row(self.params.b.as_slice()));
        let y = tape.affine(x, w, b)?;
        Ok((y, vec![w, b]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DLinearParams {
    pub trend: LinearParams,
    pub seasonal: LinearParams,
    pub kernel: usize,
}

/// Decomposes the target history and sums two linear branches.
pub fn dlinear_forward(window_target: &[f64], p: &DLinearParams) -> Result<Vector> {
    let d = moving_average_decompose(window_target, p.kernel)?;
    let trend = linear_forecast(&d.trend, &p.trend)?;
    let seasonal = linear_forecast(&d.seasonal, &p.seasonal)?;
    Ok(add_vec(&trend, &seasonal))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DLinearModel {
    pub config: ModelConfig,
    pub params: DLinearParams,
}

impl DLinearModel {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let trend = LinearParams::init(&mut rng, config.lookback, config.horizon);
        let seasonal = LinearParams::init(&mut rng, config.lookback, config.horizon);
        let kernel = config.kernel;
        Ok(DLinearModel {
            config,
            params: DLinearParams {
                trend,
                seasonal,
                kernel,
            },
        })
    }
}

impl Forecaster for DLinearModel {
    fn name(&self) -> &'static str {
        "dlinear"
    }

    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        check_window(input, self.config.lookback, channels)?;
        let target = self.config.resolve(channels)?;
        dlinear_forward(&input.column(target), &self.params)
    }
}

impl Trainable for DLinearModel {
    fn params(&self) -> Vec<ParamRef<'_>> {
        let p = &self.params;
        vec![
            tensor_ref("trend_W", &p.trend.w),
            vector_ref("trend_b", &p.trend.b),
            tensor_ref("seasonal_W", &p.seasonal.w),
            vector_ref("seasonal_b", &p.seasonal.b),
        ]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let p = &mut self.params;
        vec![
            tensor_mut("trend_W", &mut p.trend.w),
            vector_mut("trend_b", &mut p.trend.b),
            tensor_mut("seasonal_W", &mut p.seasonal.w),
            vector_mut("seasonal_b", &mut p.seasonal.b),
        ]
    }

    fn record(&self, tape: &mut GradTape, batch: &[&Window], channels: &[String]) -> Result<(Var, Vec<Var>)> {
        let target = self.config.resolve(channels)?;
        let l = self.config.lookback;
        let mut trend = Vec::with_capacity(batch.len() * l);
        let mut seasonal = Vec::with_capacity(batch.len() * l);
        for w in batch {
            check_window(&w.input, l, channels)?;
            let d = moving_average_decompose(&w.input.column(target), self.params.kernel)?;
            trend.extend(d.trend);
            seasonal.extend(d.seasonal);
        }
        let tx = tape.leaf(Tensor2::from_vec(batch.len(), l, trend)?);
        let sx = tape.leaf(Tensor2::from_vec(batch.len(), l, seasonal)?);
        let p = &self.params;
        let tw = tape.leaf(p.trend.w.clone());
        let tb = tape.leaf(Tensor2::row(p.trend.b.as_slice()));
        let sw = tape.leaf(p.seasonal.w.clone());
        let sb = tape.leaf(Tensor2::row(p.seasonal.b.as_slice()));
        let ty = tape.affine(tx, tw, tb)?;
        let sy = tape.affine(sx, sw, sb)?;
        let y = tape.add(ty, sy)?;
        Ok((y, vec![tw, tb, sw, sb]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VanillaRnnParams {
    pub w_hh: Tensor2,
    pub w_xh: Tensor2,
    pub b_h: Vector,
    pub w_out: Tensor2,
    pub b_out: Vector,
}

/// Hidden states `h_0..=h_L` of `h_{t+1} = tanh(h_t·W_hh + x_t·W_xh + b_h)`.
pub fn vanilla_rnn_states(inputs: &[Vector], p: &VanillaRnnParams) -> Result<Vec<Vector>> {
    let ds = p.w_hh.rows();
    let mut states = vec![Vector::zeros(ds)];
    for x in inputs {
        if x.len() != p.w_xh.rows() {
            return Err(Error::Shape {
                op: "vanilla_rnn",
                left: format!("x[{}]", x.len()),
                right: p.w_xh.shape_str(),
            });
        }
        let h = states.last().unwrap();
        let a = affine(h, &p.w_hh, &p.b_h)?;
        let c = affine(x, &p.w_xh, &Vector::zeros(ds))?;
        let next = Vector(a.iter().zip(c.iter()).map(|(u, v)| (u + v).tanh()).collect());
        states.push(next);
    }
    Ok(states)
}

pub fn vanilla_rnn_forward(inputs: &[Vector], p: &VanillaRnnParams) -> Result<Vector> {
    let states = vanilla_rnn_states(inputs, p)?;
    affine(states.last().unwrap(), &p.w_out, &p.b_out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VanillaRnn {
    pub config: ModelConfig,
    pub params: VanillaRnnParams,
}

impl VanillaRnn {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let (ds, du, t) = (config.state_dim, config.input_dim, config.horizon);
        let params = VanillaRnnParams {
            w_hh: uniform_init(&mut rng, ds, ds),
            w_xh: uniform_init(&mut rng, du, ds),
            b_h: Vector::zeros(ds),
            w_out: uniform_init(&mut rng, ds, t),
            b_out: Vector::zeros(t),
        };
        Ok(VanillaRnn { config, params })
    }
}

impl Forecaster for VanillaRnn {
    fn name(&self) -> &'static str {
        "vanilla-rnn"
    }

    fn lookback(&self) -> usize {
        self.config.lookback
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        check_window(input, self.config.lookback, channels)?;
        self.config.resolve(channels)?;
        let steps: Vec<Vector> = (0..input.rows()).map(|r| Vector(input.row_slice(r).to_vec())).collect();
        vanilla_rnn_forward(&steps, &self.params)
    }
}

impl Trainable for VanillaRnn {
    fn params(&self) -> Vec<ParamRef<'_>> {
        let p = &self.params;
        vec![
            tensor_ref("W_hh", &p.w_hh),
            tensor_ref("W_xh", &p.w_xh),
            vector_ref("b_h", &p.b_h),
            tensor_ref("W_out", &p.w_out),
            vector_ref("b_out", &p.b_out),
        ]
    }

    fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let p = &mut self.params;
        vec![
            tensor_mut("W_hh", &mut p.w_hh),
            tensor_mut("W_xh", &mut p.w_xh),
            vector_mut("b_h", &mut p.b_h),
            tensor_mut("W_out", &mut p.w_out),
            vector_mut("b_out", &mut p.b_out),
        ]
    }

    fn record(&self, tape: &mut GradTape, batch: &[&Window], channels: &[String]) -> Result<(Var, Vec<Var>)> {
        self.config.check_input_width(channels)?;
        let (l, du, ds) = (self.config.lookback, self.config.input_dim, self.config.state_dim);
        for w in batch {
            check_window(&w.input, l, channels)?;
        }
        let p = &self.params;
        let w_hh = tape.leaf(p.w_hh.clone());
        let w_xh = tape.leaf(p.w_xh.clone());
        let b_h = tape.leaf(Tensor2::row(p.b_h.as_slice()));
        let w_out = tape.leaf(p.w_out.clone());
        let b_out = tape.leaf(Tensor2::row(p.b_out.as_slice()));
        let mut h = tape.leaf(Tensor2::zeros(batch.len(), ds));
        for t in 0..l {
            let x = tape.leaf(stack_rows(batch, du, |w| w.input.row_slice(t).to_vec()));
            let a = tape.affine(h, w_hh, b_h)?;
            let c = tape.matmul(x, w_xh)?;
            let pre = tape.add(a, c)?;
            h = tape.tanh(pre)?;
        }
        let y = tape.affine(h, w_out, b_out)?;
        Ok((y, vec![w_hh, w_xh, b_h, w_out, b_out]))
    }
}
