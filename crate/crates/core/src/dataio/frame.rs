use chrono::{Duration, NaiveDateTime};

use crate::error::{invalid, Error, Result};

/// Channel names in on-disk column order.
pub const CHANNELS: [&str; 5] = ["co2_in", "t_in", "t_out", "hour", "num_week"];
pub const CO2_IN: &str = "co2_in";
pub const T_IN: &str = "t_in";
pub const T_OUT: &str = "t_out";
pub const HOUR: &str = "hour";
pub const NUM_WEEK: &str = "num_week";

/// Observation status of one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Observed,
    Missing,
    /// Filled by a model; the value is an estimate.
    Imputed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
    pub cells: Vec<Cell>,
}

impl Channel {
    pub fn observed(name: impl Into<String>, values: Vec<f64>) -> Self {
        let cells = vec![Cell::Observed; values.len()];
        Channel {
            name: name.into(),
            values,
            cells,
        }
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.cells[row] == Cell::Missing
    }

    pub fn missing_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Missing).count()
    }
}

/// Hourly multichannel observations with a per-cell missingness mask.
///
/// Missing cells hold `NaN` in `values`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesFrame {
    timestamps: Vec<NaiveDateTime>,
    channels: Vec<Channel>,
}

impl TimeSeriesFrame {
    pub fn new(timestamps: Vec<NaiveDateTime>, channels: Vec<Channel>) -> Result<Self> {
        let n = timestamps.len();
        for ch in &channels {
            if ch.values.len() != n || ch.cells.len() != n {
                return Err(invalid(format!(
                    "channel `{}` has {} values for {n} timestamps",
                    ch.name,
                    ch.values.len()
                )));
            }
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if w[1] - w[0] != Duration::hours(1) {
                return Err(invalid(format!(
                    "timestamps must advance by one hour (rows {i} and {})",
                    i + 1
                )));
            }
        }
        Ok(TimeSeriesFrame { timestamps, channels })
    }

    /// Hourly timestamps starting at `start`.
    pub fn hourly_index(start: NaiveDateTime, n: usize) -> Vec<NaiveDateTime> {
        (0..n).map(|i| start + Duration::hours(i as i64)).collect()
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_names(&self) -> Vec<String> {
        self.channels.iter().map(|c| c.name.clone()).collect()
    }

    pub fn channel_index(&self, name: &str) -> Result<usize> {
        self.channels
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::MissingChannel(name.to_string()))
    }

    pub fn channel(&self, name: &str) -> Result<&Channel> {
        Ok(&self.channels[self.channel_index(name)?])
    }

    pub fn channel_mut(&mut self, name: &str) -> Result<&mut Channel> {
        let i = self.channel_index(name)?;
        Ok(&mut self.channels[i])
    }

    /// Marks a cell missing and blanks its value.
    pub fn mask_cell(&mut self, channel: usize, row: usize) {
        let ch = &mut self.channels[channel];
        ch.values[row] = f64::NAN;
        ch.cells[row] = Cell::Missing;
    }

    pub fn any_missing(&self) -> bool {
        self.channels.iter().any(|c| c.cells.contains(&Cell::Missing))
    }

    /// First row holding a missing cell in any channel.
    pub fn first_missing_row(&self) -> Option<usize> {
        self.channels
            .iter()
            .filter_map(|c| c.cells.iter().position(|s| *s == Cell::Missing))
            .min()
    }

    pub fn row_has_missing(&self, row: usize) -> bool {
        self.channels.iter().any(|c| c.is_missing(row))
    }

    /// Copy of rows `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> TimeSeriesFrame {
        TimeSeriesFrame {
            timestamps: self.timestamps[range.clone()].to_vec(),
            channels: self
                .channels
                .iter()
                .map(|c| Channel {
                    name: c.name.clone(),
                    values: c.values[range.clone()].to_vec(),
                    cells: c.cells[range.clone()].to_vec(),
                })
                .collect(),
        }
    }
}
