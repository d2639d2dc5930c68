//! The PI-SRNN recurrence.
//!
//! One step maps state `S` and input `U` to
//!
//! ```text
//! dS    = F1(S·W_dSS + b_dSS + U·W_dSU + b_dSU)
//! S_next = F2(S + dS)
//! ```
//!
//! `W_dSS` plays the role of the physical state matrix and `W_dSU` the
//! input matrix of the discretised CO₂ mass balance. With both activations
//! ReLU and a non-negative initial state, every increment is non-negative,
//! so the state never decreases along a trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{relu, GradTape, Tensor2, Var, Vector};

/// Activation applied to `S + dS`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateActivation {
    #[default]
    Relu,
    /// Ablation: drop the outer ReLU.
    Identity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiSrnnParams {
    pub w_dss: Tensor2,
    pub b_dss: Vector,
    pub w_dsu: Tensor2,
    pub b_dsu: Vector,
    pub w_out: Tensor2,
    pub b_out: Vector,
    pub state_activation: StateActivation,
}

impl PiSrnnParams {
    pub fn zeros(state_dim: usize, input_dim: usize, horizon: usize) -> Self {
        PiSrnnParams {
            w_dss: Tensor2::zeros(state_dim, state_dim),
            b_dss: Vector::zeros(state_dim),
            w_dsu: Tensor2::zeros(input_dim, state_dim),
            b_dsu: Vector::zeros(state_dim),
            w_out: Tensor2::zeros(state_dim, horizon),
            b_out: Vector::zeros(horizon),
            state_activation: StateActivation::Relu,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.w_dss.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_dsu.rows()
    }

    pub fn horizon(&self) -> usize {
        self.w_out.cols()
    }

    pub fn validate(&self) -> Result<()> {
        let ds = self.state_dim();
        let checks = [
            ("W_dSS", self.w_dss.shape(), (ds, ds)),
            ("b_dSS", (1, self.b_dss.len()), (1, ds)),
            ("W_dSU", (self.w_dsu.rows(), self.w_dsu.cols()), (self.input_dim(), ds)),
            ("b_dSU", (1, self.b_dsu.len()), (1, ds)),
            ("W_out", (self.w_out.rows(), self.w_out.cols()), (ds, self.horizon())),
            ("b_out", (1, self.b_out.len()), (1, self.horizon())),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::Shape {
                    op: name,
                    left: format!("{}x{}", got.0, got.1),
                    right: format!("{}x{}", want.0, want.1),
                });
            }
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        let (ds, du, t) = (self.state_dim(), self.input_dim(), self.horizon());
        ds * ds + ds + du * ds + ds + ds * t + t
    }
}

/// States `S_0..=S_L` and increments `dS_1..=dS_L` of one encoding pass.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTrace {
    pub states: Vec<Vector>,
    pub deltas: Vec<Vector>,
}

impl StateTrace {
    pub fn last(&self) -> &Vector {
        self.states.last().expect("trace always holds S_0")
    }
}

/// One recurrence step. Returns `(dS, S_next)`.
pub fn pi_srnn_step(s: &Vector, u: &Vector, p: &PiSrnnParams) -> Result<(Vector, Vector)> {
    let ds = p.state_dim();
    if s.len() != ds || u.len() != p.input_dim() {
        return Err(Error::Shape {
            op: "pi_srnn_step",
            left: format!("S[{}], U[{}]", s.len(), u.len()),
            right: format!("W_dSS {}x{}, W_dSU {}x{}", ds, ds, p.w_dsu.rows(), p.w_dsu.cols()),
        });
    }
    // Same association order as the recorded path:
    // ((S·W_dSS + b_dSS) + U·W_dSU) + b_dSU
    let mut ss = vec![0.0; ds];
    for (i, &si) in s.iter().enumerate() {
        for (acc, &w) in ss.iter_mut().zip(p.w_dss.row_slice(i)) {
            *acc += si * w;
        }
    }
    let mut su = vec![0.0; ds];
    for (i, &ui) in u.iter().enumerate() {
        for (acc, &w) in su.iter_mut().zip(p.w_dsu.row_slice(i)) {
            *acc += ui * w;
        }
    }
    let pre: Vec<f64> = (0..ds).map(|j| ((ss[j] + p.b_dss[j]) + su[j]) + p.b_dsu[j]).collect();
    let d = relu(&Vector(pre));
    let sum = Vector(s.iter().zip(d.iter()).map(|(a, b)| a + b).collect());
    let next = match p.state_activation {
        StateActivation::Relu => relu(&sum),
        StateActivation::Identity => sum,
    };
    Ok((d, next))
}

/// Runs the recurrence over `inputs` from a zero state.
pub fn pi_srnn_encode(inputs: &[Vector], lookback: usize, p: &PiSrnnParams) -> Result<StateTrace> {
    if inputs.len() != lookback {
        return Err(Error::Shape {
            op: "pi_srnn_encode",
            left: format!("{} input steps", inputs.len()),
            right: format!("lookback {lookback}"),
        });
    }
    let mut states = Vec::with_capacity(lookback + 1);
    let mut deltas = Vec::with_capacity(lookback);
    states.push(Vector::zeros(p.state_dim()));
    for u in inputs {
        let (d, next) = pi_srnn_step(states.last().unwrap(), u, p)?;
        deltas.push(d);
        states.push(next);
    }
    Ok(StateTrace { states, deltas })
}

/// Direct multi-step readout `S_L·W_out + b_out`.
pub fn pi_srnn_forecast(trace: &StateTrace, p: &PiSrnnParams) -> Result<Vector> {
    crate::numerics::affine(trace.last(), &p.w_out, &p.b_out)
}

/// Tape handles for the PI-SRNN parameters, in declaration order.
pub(crate) struct CellVars {
    pub w_dss: Var,
    pub b_dss: Var,
    pub w_dsu: Var,
    pub b_dsu: Var,
    pub w_out: Var,
    pub b_out: Var,
}

impl CellVars {
    pub fn record(tape: &mut GradTape, p: &PiSrnnParams) -> Self {
        CellVars {
            w_dss: tape.leaf(p.w_dss.clone()),
            b_dss: tape.leaf(Tensor2::row(p.b_dss.as_slice())),
            w_dsu: tape.leaf(p.w_dsu.clone()),
            b_dsu: tape.leaf(Tensor2::row(p.b_dsu.as_slice())),
            w_out: tape.leaf(p.w_out.clone()),
            b_out: tape.leaf(Tensor2::row(p.b_out.as_slice())),
        }
    }

    pub fn all(&self) -> Vec<Var> {
        vec![self.w_dss, self.b_dss, self.w_dsu, self.b_dsu, self.w_out, self.b_out]
    }
}

/// Records the batched encoder and readout; `inputs[t]` is `batch × d_u`.
pub(crate) fn record_encode_readout(
    tape: &mut GradTape,
    vars: &CellVars,
    inputs: Vec<Tensor2>,
    p: &PiSrnnParams,
) -> Result<Var> {
    let batch = inputs.first().map_or(1, |u| u.rows());
    let mut s = tape.leaf(Tensor2::zeros(batch, p.state_dim()));
    for u in inputs {
        let u = tape.leaf(u);
        let a = tape.matmul(s, vars.w_dss)?;
        let a = tape.add_row(a, vars.b_dss)?;
        let c = tape.matmul(u, vars.w_dsu)?;
        let pre = tape.add(a, c)?;
        let pre = tape.add_row(pre, vars.b_dsu)?;
        let d = tape.relu(pre)?;
        let sum = tape.add(s, d)?;
        s = match p.state_activation {
            StateActivation::Relu => tape.relu(sum)?,
            StateActivation::Identity => sum,
        };
    }
    tape.affine(s, vars.w_out, vars.b_out)
}
