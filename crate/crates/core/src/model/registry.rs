use serde::{Deserialize, Serialize};

use super::api::{Forecaster, ModelConfig, ParamMut, ParamRef, Trainable};
use super::piad::{count_macs, PiSrnn, PiadSrnn};
use crate::baselines::{DLinearModel, LinearModel, Persistence, VanillaRnn};
use crate::error::Result;
use crate::numerics::{Tensor2, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    PiadSrnn,
    PiSrnn,
    Linear,
    Dlinear,
    VanillaRnn,
    Persistence,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::PiadSrnn,
        ModelKind::PiSrnn,
        ModelKind::Linear,
        ModelKind::Dlinear,
        ModelKind::VanillaRnn,
        ModelKind::Persistence,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::PiadSrnn => "piad-srnn",
            ModelKind::PiSrnn => "pi-srnn",
            ModelKind::Linear => "linear",
            ModelKind::Dlinear => "dlinear",
            ModelKind::VanillaRnn => "vanilla-rnn",
            ModelKind::Persistence => "persistence",
        }
    }
}

/// Any forecaster this crate can build, train and checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    PiadSrnn(PiadSrnn),
    PiSrnn(PiSrnn),
    Linear(LinearModel),
    Dlinear(DLinearModel),
    VanillaRnn(VanillaRnn),
    Persistence(Persistence),
}

impl AnyModel {
    pub fn init(kind: ModelKind, config: ModelConfig) -> Result<Self> {
        config.validate()?;
        Ok(match kind {
            ModelKind::PiadSrnn => AnyModel::PiadSrnn(PiadSrnn::new(config)?),
            ModelKind::PiSrnn => AnyModel::PiSrnn(PiSrnn::new(config)?),
            ModelKind::Linear => AnyModel::Linear(LinearModel::new(config)?),
            ModelKind::Dlinear => AnyModel::Dlinear(DLinearModel::new(config)?),
            ModelKind::VanillaRnn => AnyModel::VanillaRnn(VanillaRnn::new(config)?),
            ModelKind::Persistence => AnyModel::Persistence(Persistence { config }),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::PiadSrnn(_) => ModelKind::PiadSrnn,
            AnyModel::PiSrnn(_) => ModelKind::PiSrnn,
            AnyModel::Linear(_) => ModelKind::Linear,
            AnyModel::Dlinear(_) => ModelKind::Dlinear,
            AnyModel::VanillaRnn(_) => ModelKind::VanillaRnn,
            AnyModel::Persistence(_) => ModelKind::Persistence,
        }
    }

    pub fn config(&self) -> &ModelConfig {
        match self {
            AnyModel::PiadSrnn(m) => &m.config,
            AnyModel::PiSrnn(m) => &m.config,
            AnyModel::Linear(m) => &m.config,
            AnyModel::Dlinear(m) => &m.config,
            AnyModel::VanillaRnn(m) => &m.config,
            AnyModel::Persistence(m) => &m.config,
        }
    }

    pub fn as_forecaster(&self) -> &dyn Forecaster {
        match self {
            AnyModel::PiadSrnn(m) => m,
            AnyModel::PiSrnn(m) => m,
            AnyModel::Linear(m) => m,
            AnyModel::Dlinear(m) => m,
            AnyModel::VanillaRnn(m) => m,
            AnyModel::Persistence(m) => m,
        }
    }

    /// `None` for persistence, which has nothing to learn.
    pub fn as_trainable(&self) -> Option<&dyn Trainable> {
        match self {
            AnyModel::PiadSrnn(m) => Some(m),
            AnyModel::PiSrnn(m) => Some(m),
            AnyModel::Linear(m) => Some(m),
            AnyModel::Dlinear(m) => Some(m),
            AnyModel::VanillaRnn(m) => Some(m),
            AnyModel::Persistence(_) => None,
        }
    }

    pub fn as_trainable_mut(&mut self) -> Option<&mut dyn Trainable> {
        match self {
            AnyModel::PiadSrnn(m) => Some(m),
            AnyModel::PiSrnn(m) => Some(m),
            AnyModel::Linear(m) => Some(m),
            AnyModel::Dlinear(m) => Some(m),
            AnyModel::VanillaRnn(m) => Some(m),
            AnyModel::Persistence(_) => None,
        }
    }

    pub fn params(&self) -> Vec<ParamRef<'_>> {
        self.as_trainable().map(|t| t.params()).unwrap_or_default()
    }

    pub fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        self.as_trainable_mut().map(|t| t.params_mut()).unwrap_or_default()
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.data.len()).sum()
    }

    /// Multiply-accumulates for one single-window forward pass.
    pub fn macs(&self) -> usize {
        let c = self.config();
        let (l, t, ds, du) = (c.lookback, c.horizon, c.state_dim, c.input_dim);
        match self.kind() {
            ModelKind::PiadSrnn => count_macs(c),
            ModelKind::PiSrnn => l * (ds * ds + du * ds) + ds * t,
            ModelKind::Linear => l * t,
            ModelKind::Dlinear => 2 * l * t,
            ModelKind::VanillaRnn => l * (ds * ds + du * ds) + ds * t,
            ModelKind::Persistence => 0,
        }
    }
}

impl Forecaster for AnyModel {
    fn name(&self) -> &'static str {
        self.as_forecaster().name()
    }

    fn lookback(&self) -> usize {
        self.as_forecaster().lookback()
    }

    fn horizon(&self) -> usize {
        self.as_forecaster().horizon()
    }

    fn forecast(&self, input: &Tensor2, channels: &[String]) -> Result<Vector> {
        self.as_forecaster().forecast(input, channels)
    }
}
