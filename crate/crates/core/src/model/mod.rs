//! PI-SRNN and PIAD-SRNN forecasters.

pub(crate) mod api;
mod cell;
pub mod checkpoint;
pub(crate) mod piad;
mod registry;

pub use api::{Forecaster, ModelConfig, ParamMut, ParamRef, Trainable};
pub use cell::{pi_srnn_encode, pi_srnn_forecast, pi_srnn_step, PiSrnnParams, StateActivation, StateTrace};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use piad::{count_macs, count_params, init_params, piad_forward, PiSrnn, PiadParams, PiadSrnn};
pub use registry::{AnyModel, ModelKind};
