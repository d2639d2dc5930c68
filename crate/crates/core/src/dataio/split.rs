use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::frame::TimeSeriesFrame;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.6,
            val: 0.2,
            test: 0.2,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|r| !(*r > 0.0)) {
            return Err(invalid(format!("split ratios must be positive: {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("split ratios sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Chronological train / validation / test ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train: Range<usize>,
    pub val: Range<usize>,
    pub test: Range<usize>,
    pub missing_to_test: bool,
}

fn scaled(n: usize, r: f64) -> usize {
    // Tolerate products like 0.6 * 100 = 60.000000000000007 or 59.99999999.
    ((n as f64) * r + 1e-9).floor() as usize
}

/// Splits `frame` chronologically.
///
/// With `missing_to_test`, a missing cell before the nominal test start pulls
/// the test boundary back to that row; train and validation then share the
/// remaining prefix in their original proportion.
pub fn chronological_split(
    frame: &TimeSeriesFrame,
    ratios: SplitRatios,
    missing_to_test: bool,
    min_train: usize,
) -> Result<SplitPlan> {
    ratios.validate()?;
    let n = frame.len();
    let mut train_end = scaled(n, ratios.train);
    let mut test_start = scaled(n, ratios.train + ratios.val).max(train_end);

    if missing_to_test {
        if let Some(first) = frame.first_missing_row() {
            if first < test_start {
                test_start = first;
                let frac = ratios.train / (ratios.train + ratios.val);
                train_end = scaled(test_start, frac);
            }
        }
    }
    if train_end < min_train {
        return Err(invalid(format!(
            "training range has {train_end} rows, fewer than the {min_train} needed for one window"
        )));
    }
    Ok(SplitPlan {
        train: 0..train_end,
        val: train_end..test_start,
        test: test_start..n,
        missing_to_test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::frame::{Channel, TimeSeriesFrame};
    use chrono::NaiveDate;

    fn frame(n: usize) -> TimeSeriesFrame {
        let start = NaiveDate::from_ymd_opt(2020, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        TimeSeriesFrame::new(
            TimeSeriesFrame::hourly_index(start, n),
            vec![Channel::observed("co2_in", vec![400.0; n])],
        )
        .unwrap()
    }

    #[test]
    fn nominal_split() {
        let p = chronological_split(&frame(100), SplitRatios::default(), true, 10).unwrap();
        assert_eq!((p.train, p.val, p.test), (0..60, 60..80, 80..100));
    }

    #[test]
    fn missing_block_moves_test_start() {
        let mut f = frame(100);
        for r in 50..70 {
            f.mask_cell(0, r);
        }
        let p = chronological_split(&f, SplitRatios::default(), true, 10).unwrap();
        assert_eq!(p.test, 50..100);
        assert_eq!(p.train, 0..37);
        assert_eq!(p.val, 37..50);

        let p = chronological_split(&f, SplitRatios::default(), false, 10).unwrap();
        assert_eq!(p.test, 80..100);
    }

    #[test]
    fn bad_ratios_and_short_train() {
        let r = SplitRatios {
            train: 0.5,
            val: 0.2,
            test: 0.2,
        };
        assert!(chronological_split(&frame(100), r, true, 1).is_err());
        assert!(chronological_split(&frame(100), SplitRatios::default(), true, 61).is_err());
    }

    #[test]
    fn ranges_partition_frame() {
        for n in [7usize, 33, 100, 1001] {
            let p = chronological_split(&frame(n), SplitRatios::default(), true, 0).unwrap();
            assert_eq!(p.train.start, 0);
            assert_eq!(p.train.end, p.val.start);
            assert_eq!(p.val.end, p.test.start);
            assert_eq!(p.test.end, n);
        }
    }
}
