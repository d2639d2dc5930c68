use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::frame::TimeSeriesFrame;
use super::normalize::Normalizer;
use crate::error::{invalid, Result};
use crate::numerics::Tensor2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub lookback: usize,
    pub horizon: usize,
    pub stride: usize,
}

impl WindowSpec {
    pub fn new(lookback: usize, horizon: usize) -> Self {
        WindowSpec {
            lookback,
            horizon,
            stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lookback == 0 || self.horizon == 0 || self.stride == 0 {
            return Err(invalid(format!("window spec fields must be ≥ 1: {self:?}")));
        }
        Ok(())
    }

    pub fn span(&self) -> usize {
        self.lookback + self.horizon
    }

    /// Windows that fit in `len` rows.
    pub fn count(&self, len: usize) -> usize {
        if len < self.span() {
            0
        } else {
            (len - self.span()) / self.stride + 1
        }
    }
}

/// One supervised example in normalised units.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    /// Frame row of the first input step.
    pub start: usize,
    /// `lookback × channels`.
    pub input: Tensor2,
    /// Next `horizon` values of the target channel.
    pub target: Vec<f64>,
    pub input_masked: bool,
    pub target_masked: bool,
}

impl Window {
    pub fn is_complete(&self) -> bool {
        !self.input_masked && !self.target_masked
    }

    /// Target-channel column of the input.
    pub fn target_history(&self, target: usize) -> Vec<f64> {
        self.input.column(target)
    }
}

#[derive(Clone, Debug)]
pub struct WindowSet {
    pub channels: Vec<String>,
    pub target: usize,
    pub spec: WindowSpec,
    pub windows: Vec<Window>,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Drops windows touching a missing cell, as used for training.
    pub fn complete_only(mut self) -> Self {
        self.windows.retain(Window::is_complete);
        self
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Window> {
        self.windows.iter()
    }
}

/// Sliding windows over `range`, normalised with `norm`.
///
/// Windows touching missing cells are kept and flagged; call
/// [`WindowSet::complete_only`] to drop them.
pub fn make_windows(
    frame: &TimeSeriesFrame,
    norm: &Normalizer,
    target_channel: &str,
    spec: WindowSpec,
    range: Range<usize>,
) -> Result<WindowSet> {
    spec.validate()?;
    if range.end > frame.len() {
        return Err(invalid(format!("range {range:?} exceeds {} rows", frame.len())));
    }
    let len = range.len();
    if len < spec.span() {
        return Err(invalid(format!(
            "range of {len} rows is shorter than lookback + horizon = {}",
            spec.span()
        )));
    }
    let target = frame.channel_index(target_channel)?;
    let z = norm.transform(frame)?;
    let c = z.cols();
    let missing_rows: Vec<bool> = (0..frame.len()).map(|r| frame.row_has_missing(r)).collect();
    let target_ch = &frame.channels()[target];

    let windows = (0..spec.count(len))
        .map(|k| {
            let start = range.start + k * spec.stride;
            let split = start + spec.lookback;
            let end = split + spec.horizon;
            let mut data = Vec::with_capacity(spec.lookback * c);
            for r in start..split {
                data.extend_from_slice(z.row_slice(r));
            }
            Window {
                start,
                input: Tensor2::from_vec(spec.lookback, c, data).expect("window shape"),
                target: (split..end).map(|r| z[(r, target)]).collect(),
                input_masked: missing_rows[start..split].iter().any(|m| *m),
                target_masked: (split..end).any(|r| target_ch.is_missing(r)),
            }
        })
        .collect();
    Ok(WindowSet {
        channels: frame.channel_names(),
        target,
        spec,
        windows,
    })
}
