//! Moving-average seasonal/trend split.
//!
//! The trend is a centred moving average over an edge-replicated copy of
//! the series; the seasonal part is whatever is left over. For an even
//! kernel the extra padding element goes to the back.
//!
//! Each window mean is taken relative to the window's first element,
//! `a + Σ(x − a)/k`, which keeps a constant window exactly constant.

use crate::error::{invalid, Result};

/// Default kernel for hourly data: one day.
pub const DEFAULT_KERNEL: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposedSeries {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub kernel: usize,
}

impl DecomposedSeries {
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        self.trend.iter().zip(&self.seasonal).map(|(t, s)| t + s).collect()
    }
}

/// Front and back padding for a kernel.
pub fn padding(kernel: usize) -> (usize, usize) {
    let total = kernel.saturating_sub(1);
    (total / 2, total - total / 2)
}

pub fn moving_average_decompose(series: &[f64], kernel: usize) -> Result<DecomposedSeries> {
    if kernel == 0 {
        return Err(invalid("moving-average kernel must be at least 1"));
    }
    if series.is_empty() {
        return Err(invalid("cannot decompose an empty series"));
    }
    let n = series.len();
    let (front, _) = padding(kernel);
    let first = series[0];
    let last = series[n - 1];
    let padded = |k: usize| -> f64 {
        // k indexes the padded sequence; map back onto the original.
        if k < front {
            first
        } else if k - front >= n {
            last
        } else {
            series[k - front]
        }
    };

    let mut trend = Vec::with_capacity(n);
    let mut seasonal = Vec::with_capacity(n);
    for (t, &x) in series.iter().enumerate() {
        let anchor = padded(t);
        let sum: f64 = (t..t + kernel).map(|k| padded(k) - anchor).sum();
        let m = anchor + sum / kernel as f64;
        trend.push(m);
        seasonal.push(x - m);
    }
    Ok(DecomposedSeries {
        trend,
        seasonal,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent oracle: materialise the padded series then average.
    fn oracle(series: &[f64], kernel: usize) -> (Vec<f64>, Vec<f64>) {
        let front = (kernel - 1) / 2;
        let back = kernel - 1 - front;
        let mut padded = vec![series[0]; front];
        padded.extend_from_slice(series);
        padded.extend(std::iter::repeat_n(*series.last().unwrap(), back));
        let trend: Vec<f64> = padded
            .windows(kernel)
            .map(|w| w[0] + w.iter().map(|x| x - w[0]).sum::<f64>() / kernel as f64)
            .collect();
        let seasonal = series.iter().zip(&trend).map(|(x, t)| x - t).collect();
        (trend, seasonal)
    }

    #[test]
    fn constant_series_has_zero_seasonal() {
        let d = moving_average_decompose(&[600.0; 100], 24).unwrap();
        assert!(d.trend.iter().all(|&t| t == 600.0));
        assert!(d.seasonal.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn any_constant_is_exact() {
        for c in [0.1, -3.7e5, 1.0 / 3.0, 412.345] {
            let d = moving_average_decompose(&[c; 50], 24).unwrap();
            assert!(d.seasonal.iter().all(|&s| s == 0.0));
        }
    }

    #[test]
    fn unit_kernel_is_identity() {
        let s = [3.0, -1.0, 8.5, 2.25];
        let d = moving_average_decompose(&s, 1).unwrap();
        assert_eq!(d.trend, s);
        assert!(d.seasonal.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn even_kernel_pads_back() {
        let d = moving_average_decompose(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(d.trend, vec![1.5, 2.5, 3.5, 4.0]);
        assert_eq!(d.seasonal, vec![-0.5, -0.5, -0.5, 0.0]);
        assert_eq!(oracle(&[1.0, 2.0, 3.0, 4.0], 2).0, d.trend);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(moving_average_decompose(&[1.0], 0).is_err());
        assert!(moving_average_decompose(&[], 3).is_err());
    }

    #[test]
    fn kernel_longer_than_series() {
        let s = [1.0, 5.0, 2.0];
        let d = moving_average_decompose(&s, 8).unwrap();
        let (t, _) = oracle(&s, 8);
        assert_eq!(d.trend, t);
    }

    proptest! {
        #[test]
        fn matches_oracle_and_reconstructs(
            s in prop::collection::vec(-1e3f64..1e3, 1..120),
            kernel in 1usize..30,
        ) {
            let d = moving_average_decompose(&s, kernel).unwrap();
            let (t, _) = oracle(&s, kernel);
            prop_assert_eq!(d.len(), s.len());
            let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            for i in 0..s.len() {
                prop_assert_eq!(d.trend[i], t[i]);
                let r = d.trend[i] + d.seasonal[i];
                prop_assert!((r - s[i]).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn shift_equivariant_on_interior(
            s in prop::collection::vec(-50.0f64..50.0, 80..120),
            kernel in 1usize..12,
            shift in 1usize..10,
        ) {
            let d = moving_average_decompose(&s, kernel).unwrap();
            let shifted = &s[shift..];
            let ds = moving_average_decompose(shifted, kernel).unwrap();
            // Interior indices of the shifted copy whose window never touches padding.
            for i in kernel..shifted.len().saturating_sub(kernel) {
                prop_assert!((ds.trend[i] - d.trend[i + shift]).abs() <= 1e-12 * 50.0 * kernel as f64);
            }
        }
    }
}
