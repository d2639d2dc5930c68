use serde::{Deserialize, Serialize};

use super::cell::StateActivation;
use crate::dataio::{Window, CHANNELS, CO2_IN, T_IN, T_OUT};
use crate::decompose::DEFAULT_KERNEL;
use crate::error::{invalid, Error, Result};
use crate::numerics::{GradTape, Tensor2, Var, Vector};

/// Shared configuration for every forecaster in the crate.
///
/// Not every model reads every field: the linear baselines ignore the state
/// width and only the decomposed models use `kernel`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub lookback: usize,
    pub horizon: usize,
    pub state_dim: usize,
    pub input_dim: usize,
    pub target_channel: String,
    pub decomposed_channels: Vec<String>,
    pub kernel: usize,
    pub state_activation: StateActivation,
    /// Multiplies the initial `W_dSS` draw.
    pub recurrent_init_scale: f64,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            lookback: 96,
            horizon: 96,
            state_dim: 64,
            input_dim: CHANNELS.len(),
            target_channel: CO2_IN.to_string(),
            decomposed_channels: vec![CO2_IN.into(), T_IN.into(), T_OUT.into()],
            kernel: DEFAULT_KERNEL,
            state_activation: StateActivation::Relu,
            recurrent_init_scale: 0.01,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lookback == 0 || self.horizon == 0 || self.state_dim == 0 || self.input_dim == 0 {
            return Err(invalid(format!(
                "lookback, horizon, state_dim and input_dim must be ≥ 1 (got {}, {}, {}, {})",
                self.lookback, self.horizon, self.state_dim, self.input_dim
            )));
        }
        if self.kernel == 0 {
            return Err(invalid("kernel must be ≥ 1"));
        }
        if !(self.recurrent_init_scale >= 0.0 && self.recurrent_init_scale.is_finite()) {
            return Err(invalid(format!(
                "recurrent_init_scale must be finite and ≥ 0, got {}",
                self.recurrent_init_scale
            )));
        }
        Ok(())
    }

    /// Checks that `channels` is a valid per-step input layout and returns
    /// the target column.
    pub fn resolve(&self, channels: &[String]) -> Result<usize> {
        let target = channels
            .iter()
            .position(|c| *c == self.target_channel)
            .ok_or_else(|| Error::MissingChannel(self.target_channel.clone()))?;
        for d in &self.decomposed_channels {
            if !channels.contains(d) {
                return Err(Error::MissingChannel(d.clone()));
            }
        }
        Ok(target)
    }

    pub(crate) fn check_input_width(&self, channels: &[String]) -> Result<()> {
        if channels.len() != self.input_dim {
            return Err(Error::Shape {
                op: "input layout",
                left: format!("{} channels", channels.len()),
                right: format!("input_dim {}", self.input_dim),
            });
        }
        Ok(())
    }
}

/// Read-only view of one named parameter array.
#[derive(Debug)]
pub struct ParamRef<'a> {
    pub name: &'static str,
    pub shape: (usize, usize),
    pub data: &'a [f64],
}

#[derive(Debug)]
pub struct ParamMut<'a> {
    pub name: &'static str,
    pub shape: (usize, usize),
    pub data: &'a mut [f64],
}

pub(crate) fn tensor_ref<'a>(name: &'static str, t: &'a Tensor2) -> ParamRef<'a> {
    ParamRef {
        name,
        shape: t.shape(),
        data: t.data(),
    }
}

pub(crate) fn vector_ref<'a>(name: &'static str, v: &'a Vector) -> ParamRef<'a> {
    ParamRef {
        name,
        shape: (1, v.len()),
        data: v.as_slice(),
    }
}

pub(crate) fn tensor_mut<'a>(name: &'static str, t: &'a mut Tensor2) -> ParamMut<'a> {
    ParamMut {
        name,
        shape: t.shape(),
        data: t.data_mut(),
    }
}

pub(crate) fn vector_mut<'a>(name: &'static str, v: &'a mut Vector) -> ParamMut<'a> {
    ParamMut {
        name,
        shape: (1, v.len()),
        data: v.as_mut_slice(),
    }
}

/// Anything that maps a normalised look-back window to a horizon forecast.
pub trait Forecaster {
    fn name(&self) -> &'static str;
    fn lookback(&self) -> usize;
    fn horizon(&self) -> usize;

    /// `input` is `lookback × channels` in normalised units; returns the
    /// next `horizon` target values in the same units.
    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector>;
}

/// A forecaster with differentiable parameters.
pub trait Trainable: Forecaster {
    /// Parameters in a fixed order shared with [`Trainable::params_mut`] and
    /// the vars returned by [`Trainable::record`].
    fn params(&self) -> Vec<ParamRef<'_>>;
    fn params_mut(&mut self) -> Vec<ParamMut<'_>>;

    /// Records the batched forward pass. Returns the `batch × horizon`
    /// prediction and one var per parameter.
    fn record(&self, tape: &mut GradTape, batch: &[&Window], channels: &[String]) -> Result<(Var, Vec<Var>)>;

    fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.data.len()).sum()
    }
}

pub(crate) fn check_window(input: &Tensor2, lookback: usize, channels: &[String]) -> Result<()> {
    if input.rows() != lookback || input.cols() != channels.len() {
        return Err(Error::Shape {
            op: "window",
            left: input.shape_str(),
            right: format!("{}x{}", lookback, channels.len()),
        });
    }
    Ok(())
}

/// Stacks one row per window: `f(window) -> row`.
pub(crate) fn stack_rows(batch: &[&Window], width: usize, f: impl Fn(&Window) -> Vec<f64>) -> Tensor2 {
    let mut data = Vec::with_capacity(batch.len() * width);
    for w in batch {
        let row = f(w);
        debug_assert_eq!(row.len(), width);
        data.extend(row);
    }
    Tensor2::from_vec(batch.len(), width, data).expect("stacked rows")
}
