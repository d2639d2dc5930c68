//! Loss functions, Adam, the training loop and a finite-difference
//! gradient checker.
//!
//! Gradients come from the reverse-mode tape through the full unrolled
//! recurrence. Batches are visited in a seeded permutation per epoch so a
//! run is reproducible bit for bit.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::{Window, WindowSet};
use crate::error::{invalid, Error, Result};
use crate::model::{Forecaster, ParamMut, Trainable};
use crate::numerics::{reverse_grad, GradTape, Tensor2};

/// Finite-difference step used by [`gradcheck`].
pub const FD_STEP: f64 = 1e-5;

fn check_lengths(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(invalid(format!(
            "prediction has {} values, target {}",
            pred.len(),
            target.len()
        )));
    }
    Ok(())
}

pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(pred, target)?;
    let s: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(s / pred.len() as f64)
}

pub fn mae(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(pred, target)?;
    let s: f64 = pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum();
    Ok(s / pred.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 100,
            patience: 10,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(invalid(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.patience == 0 || self.batch_size == 0 {
            return Err(invalid("patience and batch size must be ≥ 1"));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {b}")));
            }
        }
        if !(self.eps > 0.0) {
            return Err(invalid("eps must be > 0"));
        }
        Ok(())
    }
}

/// First and second moments for every parameter array.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub step: u64,
}

impl AdamState {
    pub fn new(sizes: impl IntoIterator<Item = usize>) -> Self {
        let (m, v) = sizes.into_iter().map(|n| (vec![0.0; n], vec![0.0; n])).unzip();
        AdamState { m, v, step: 0 }
    }

    pub fn for_model(model: &dyn Trainable) -> Self {
        Self::new(model.params().iter().map(|p| p.data.len()))
    }
}

/// One bias-corrected Adam update. Nothing is modified if any gradient is
/// non-finite or a shape disagrees.
pub fn adam_step(
    params: &mut [ParamMut<'_>],
    grads: &[Tensor2],
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(invalid(format!(
            "{} parameters, {} gradients, {} optimiser slots",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    for ((p, g), m) in params.iter().zip(grads).zip(&state.m) {
        if g.data().len() != p.data.len() || m.len() != p.data.len() {
            return Err(Error::Shape {
                op: "adam_step",
                left: format!("{}x{}", p.shape.0, p.shape.1),
                right: g.shape_str(),
            });
        }
        if !g.is_finite() {
            return Err(Error::NonFiniteGradient(p.name.to_string()));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        for (((theta, &gi), mi), vi) in p.data.iter_mut().zip(g.data()).zip(m.iter_mut()).zip(v.iter_mut()) {
            *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
            *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
            let m_hat = *mi / c1;
            let v_hat = *vi / c2;
            *theta -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
    Ok(())
}

fn recorded_loss(
    tape: &mut GradTape,
    model: &dyn Trainable,
    batch: &[&Window],
    channels: &[String],
) -> Result<(crate::numerics::Var, Vec<crate::numerics::Var>)> {
    let (pred, vars) = model.record(tape, batch, channels)?;
    let horizon = model.horizon();
    let mut target = Vec::with_capacity(batch.len() * horizon);
    for w in batch {
        if w.target.len() != horizon {
            return Err(invalid(format!(
                "window target has {} steps, model horizon is {horizon}",
                w.target.len()
            )));
        }
        target.extend_from_slice(&w.target);
    }
    let target = tape.leaf(Tensor2::from_vec(batch.len(), horizon, target)?);
    let diff = tape.sub(pred, target)?;
    Ok((tape.mean_square(diff)?, vars))
}

/// Batch MSE and its gradient with respect to every parameter.
pub fn loss_and_gradients(
    model: &dyn Trainable,
    batch: &[&Window],
    channels: &[String],
) -> Result<(f64, Vec<Tensor2>)> {
    let mut tape = GradTape::new();
    let (loss, vars) = recorded_loss(&mut tape, model, batch, channels)?;
    let value = tape.value(loss)?[(0, 0)];
    let grads = reverse_grad(&tape, loss, &vars)?;
    Ok((value, grads))
}

/// Mean squared error over every window and horizon step, through the
/// plain forecast path.
pub fn evaluate_loss(model: &dyn Forecaster, set: &WindowSet) -> Result<f64> {
    if set.is_empty() {
        return Err(invalid("cannot evaluate on an empty window set"));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for w in set.iter() {
        let pred = model.forecast(&w.input, &set.channels)?;
        check_lengths(pred.as_slice(), &w.target)?;
        for (p, t) in pred.iter().zip(&w.target) {
            sum += (p - t) * (p - t);
        }
        n += w.target.len();
    }
    Ok(sum / n as f64)
}

/// Tracks the best validation loss and when to give up.
#[derive(Clone, Debug, PartialEq)]
pub struct EarlyStopping {
    pub patience: usize,
    pub best_loss: f64,
    pub best_epoch: usize,
    pub since_best: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best_loss: f64::INFINITY,
            best_epoch: 0,
            since_best: 0,
        }
    }

    /// Records an epoch's validation loss; returns `true` if it is a new best.
    pub fn observe(&mut self, epoch: usize, loss: f64) -> bool {
        if loss < self.best_loss {
            self.best_loss = loss;
            self.best_epoch = epoch;
            self.since_best = 0;
            true
        } else {
            self.since_best += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.since_best >= self.patience
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Entry 0 holds the losses of the untrained model.
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub epochs_run: usize,
    pub stopped_early: bool,
}

fn snapshot(model: &dyn Trainable) -> Vec<Vec<f64>> {
    model.params().iter().map(|p| p.data.to_vec()).collect()
}

fn restore(model: &mut dyn Trainable, saved: &[Vec<f64>]) {
    for (p, s) in model.params_mut().into_iter().zip(saved) {
        p.data.copy_from_slice(s);
    }
}

/// Trains with Adam on minibatch MSE and leaves the model at the epoch with
/// the lowest validation loss.
pub fn fit(model: &mut dyn Trainable, train: &WindowSet, val: &WindowSet, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(invalid(format!(
            "need non-empty training and validation windows (got {} and {})",
            train.len(),
            val.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = AdamState::for_model(model);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = vec![EpochRecord {
        epoch: 0,
        train_loss: evaluate_loss(model, train)?,
        val_loss: evaluate_loss(model, val)?,
    }];
    let mut stop = EarlyStopping::new(cfg.patience);
    let mut best = snapshot(model);
    let mut stopped_early = false;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut weighted = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&Window> = chunk.iter().map(|&i| &train.windows[i]).collect();
            let (loss, grads) = loss_and_gradients(model, &batch, &train.channels)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            adam_step(&mut model.params_mut(), &grads, &mut adam, cfg).map_err(|e| match e {
                Error::NonFiniteGradient(_) => Error::Divergence { epoch, loss: f64::NAN },
                other => other,
            })?;
            weighted += loss * batch.len() as f64;
        }
        let val_loss = evaluate_loss(model, val)?;
        if !val_loss.is_finite() {
            return Err(Error::Divergence { epoch, loss: val_loss });
        }
        history.push(EpochRecord {
            epoch,
            train_loss: weighted / train.len() as f64,
            val_loss,
        });
        if stop.observe(epoch, val_loss) {
            best = snapshot(model);
        } else if stop.should_stop() {
            stopped_early = true;
            break;
        }
    }

    restore(model, &best);
    Ok(TrainReport {
        epochs_run: history.len() - 1,
        history,
        best_epoch: stop.best_epoch,
        best_val_loss: stop.best_loss,
        stopped_early,
    })
}

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `|a − n| / max(|a|, |n|, 1e-6)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub max_rel_error: f64,
    pub checked: usize,
    /// Entries whose ±h perturbation flipped a ReLU.
    pub skipped: usize,
    pub worst_param: Option<String>,
    pub worst_index: usize,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares tape gradients of the batch MSE with central differences for
/// every parameter entry. Entries whose perturbation changes the sign of
/// any ReLU input are skipped, since the loss has a kink between the two
/// probes.
pub fn gradcheck(
    model: &mut dyn Trainable,
    batch: &[&Window],
    channels: &[String],
    tolerance: f64,
) -> Result<GradcheckReport> {
    let probe = |m: &dyn Trainable| -> Result<(f64, Vec<bool>)> {
        let mut tape = GradTape::new();
        let (loss, _) = recorded_loss(&mut tape, m, batch, channels)?;
        Ok((tape.value(loss)?[(0, 0)], tape.relu_pattern().to_vec()))
    };
    let (_, grads) = loss_and_gradients(model, batch, channels)?;
    let (_, pattern) = probe(model)?;

    let mut report = GradcheckReport {
        max_rel_error: 0.0,
        checked: 0,
        skipped: 0,
        worst_param: None,
        worst_index: 0,
        worst_analytic: 0.0,
        worst_numeric: 0.0,
        tolerance,
        passed: true,
    };
    let sizes: Vec<(String, usize)> = model
        .params()
        .iter()
        .map(|p| (p.name.to_string(), p.data.len()))
        .collect();
    for (k, (name, len)) in sizes.iter().enumerate() {
        for i in 0..*len {
            let original = model.params()[k].data[i];
            let set = |m: &mut dyn Trainable, v: f64| m.params_mut()[k].data[i] = v;
            set(model, original + FD_STEP);
            let (plus, p_plus) = probe(model)?;
            set(model, original - FD_STEP);
            let (minus, p_minus) = probe(model)?;
            set(model, original);
            if p_plus != pattern || p_minus != pattern {
                report.skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * FD_STEP);
            let analytic = grads[k].data()[i];
            let err = relative_error(analytic, numeric);
            report.checked += 1;
            if err > report.max_rel_error || report.worst_param.is_none() {
                report.max_rel_error = report.max_rel_error.max(err);
                report.worst_param = Some(name.clone());
                report.worst_index = i;
                report.worst_analytic = analytic;
                report.worst_numeric = numeric;
            }
        }
    }
    report.passed = report.max_rel_error < tolerance;
    Ok(report)
}
