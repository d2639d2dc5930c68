use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::frame::TimeSeriesFrame;
use crate::error::{invalid, Error, Result};
use crate::numerics::Tensor2;

/// Lower bound applied to every fitted standard deviation.
pub const STD_EPS: f64 = 1e-8;

/// Per-channel z-score statistics fitted on a training range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub channels: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    /// Fits mean and population standard deviation per channel over
    /// `range`, skipping missing cells.
    pub fn fit(frame: &TimeSeriesFrame, range: Range<usize>) -> Result<Self> {
        if range.is_empty() || range.end > frame.len() {
            return Err(invalid(format!(
                "normalizer range {range:?} is empty or exceeds {} rows",
                frame.len()
            )));
        }
        let mut mean = Vec::new();
        let mut std = Vec::new();
        for ch in frame.channels() {
            let obs: Vec<f64> = range
                .clone()
                .filter(|&i| !ch.is_missing(i))
                .map(|i| ch.values[i])
                .collect();
            if obs.is_empty() {
                return Err(invalid(format!(
                    "channel `{}` has no observed values in the training range",
                    ch.name
                )));
            }
            let n = obs.len() as f64;
            let m = obs.iter().sum::<f64>() / n;
            let var = obs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean.push(m);
            std.push(var.sqrt().max(STD_EPS));
        }
        Ok(Normalizer {
            channels: frame.channel_names(),
            mean,
            std,
        })
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingChannel(name.to_string()))
    }

    pub fn apply(&self, channel: usize, x: f64) -> f64 {
        (x - self.mean[channel]) / self.std[channel]
    }

    pub fn invert(&self, channel: usize, z: f64) -> f64 {
        z * self.std[channel] + self.mean[channel]
    }

    /// `n × channels` matrix of normalised values (missing cells stay `NaN`).
    pub fn transform(&self, frame: &TimeSeriesFrame) -> Result<Tensor2> {
        let names = frame.channel_names();
        if names != self.channels {
            return Err(Error::Shape {
                op: "Normalizer::transform",
                left: names.join(","),
                right: self.channels.join(","),
            });
        }
        let c = names.len();
        let mut out = Tensor2::zeros(frame.len(), c);
        for (j, ch) in frame.channels().iter().enumerate() {
            for (i, &v) in ch.values.iter().enumerate() {
                out[(i, j)] = self.apply(j, v);
            }
        }
        Ok(out)
    }
}
