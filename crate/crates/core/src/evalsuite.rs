//! Forecast metrics, gap imputation and IQR-based CO₂ event classification.

use std::ops::Range;
use std::time::Instant;

use chrono::{Datelike, Timelike};
use serde::{Deserialize, Serialize};

use crate::dataio::{Cell, Normalizer, SplitPlan, TimeSeriesFrame, WindowSet, HOUR, NUM_WEEK};
use crate::error::{invalid, Error, Result};
use crate::model::Forecaster;
use crate::numerics::Tensor2;
use crate::train::{mae, mse};

/// Errors for one model at one horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub horizon: usize,
    pub windows: usize,
    /// Normalised units.
    pub mse: f64,
    pub mae: f64,
    /// Physical units of the target (ppm for CO₂).
    pub mse_ppm: f64,
    pub mae_ppm: f64,
    #[serde(skip)]
    pub runtime_ms: f64,
}

/// Averages per-window MSE and MAE over `set`, on the normalised scale and
/// after inverting the target normalisation.
pub fn evaluate_forecast(model: &dyn Forecaster, set: &WindowSet, norm: &Normalizer) -> Result<MetricsReport> {
    if set.is_empty() {
        return Err(invalid("cannot evaluate on an empty test set"));
    }
    let started = Instant::now();
    let target = norm.index(&set.channels[set.target])?;
    let (mut s_mse, mut s_mae, mut s_mse_ppm, mut s_mae_ppm) = (0.0, 0.0, 0.0, 0.0);
    for w in set.iter() {
        let pred = model.forecast(&w.input, &set.channels)?;
        s_mse += mse(pred.as_slice(), &w.target)?;
        s_mae += mae(pred.as_slice(), &w.target)?;
        let pred_ppm: Vec<f64> = pred.iter().map(|&z| norm.invert(target, z)).collect();
        let true_ppm: Vec<f64> = w.target.iter().map(|&z| norm.invert(target, z)).collect();
        s_mse_ppm += mse(&pred_ppm, &true_ppm)?;
        s_mae_ppm += mae(&pred_ppm, &true_ppm)?;
    }
    let n = set.len() as f64;
    Ok(MetricsReport {
        model: model.name().to_string(),
        horizon: model.horizon(),
        windows: set.len(),
        mse: s_mse / n,
        mae: s_mae / n,
        mse_ppm: s_mse_ppm / n,
        mae_ppm: s_mae_ppm / n,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// What to do with a gap that starts before a full look-back is available.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmupFallback {
    #[default]
    Error,
    /// Fill with the training mean of the target.
    TrainingMean,
}

/// Fills masked covariate cells so every row is usable as model input.
///
/// Calendar channels are recomputed from timestamps; anything else carries
/// the last observation forward (or the first one backward at the start).
pub fn fill_covariates(frame: &mut TimeSeriesFrame, skip: usize) -> Result<()> {
    let stamps = frame.timestamps().to_vec();
    for c in 0..frame.channels().len() {
        if c == skip {
            continue;
        }
        let name = frame.channels()[c].name.clone();
        let ch = frame.channel_mut(&name)?;
        if ch.missing_count() == 0 {
            continue;
        }
        let first_obs = ch.cells.iter().position(|x| *x != Cell::Missing);
        let mut last = first_obs.map(|i| ch.values[i]);
        for (r, stamp) in stamps.iter().enumerate() {
            if ch.cells[r] != Cell::Missing {
                last = Some(ch.values[r]);
                continue;
            }
            let v = match name.as_str() {
                HOUR => stamp.hour() as f64,
                NUM_WEEK => stamp.weekday().num_days_from_monday() as f64,
                _ => last.ok_or_else(|| invalid(format!("channel `{name}` has no observed values")))?,
            };
            ch.values[r] = v;
            ch.cells[r] = Cell::Imputed;
        }
    }
    Ok(())
}

/// Fills every masked target cell with the model's one-step forecast from
/// the preceding look-back rows, in time order, so later fills consume
/// earlier ones. Observed cells are left untouched.
pub fn impute_series(
    model: &dyn Forecaster,
    frame: &TimeSeriesFrame,
    norm: &Normalizer,
    target_channel: &str,
    fallback: WarmupFallback,
) -> Result<TimeSeriesFrame> {
    let mut out = frame.clone();
    let target = out.channel_index(target_channel)?;
    if out.channels()[target].missing_count() == 0 {
        return Ok(out);
    }
    fill_covariates(&mut out, target)?;
    let channels = out.channel_names();
    let lookback = model.lookback();
    let norm_idx: Vec<usize> = channels.iter().map(|c| norm.index(c)).collect::<Result<_>>()?;
    let t_norm = norm_idx[target];

    for r in 0..out.len() {
        if !out.channels()[target].is_missing(r) {
            continue;
        }
        let value = if r < lookback {
            match fallback {
                WarmupFallback::Error => return Err(Error::ImputeWarmup { row: r, lookback }),
                WarmupFallback::TrainingMean => norm.mean[t_norm],
            }
        } else {
            let mut data = Vec::with_capacity(lookback * channels.len());
            for row in r - lookback..r {
                for (c, ch) in out.channels().iter().enumerate() {
                    data.push(norm.apply(norm_idx[c], ch.values[row]));
                }
            }
            let input = Tensor2::from_vec(lookback, channels.len(), data)?;
            let z = model.forecast(&input, &channels)?[0];
            norm.invert(t_norm, z)
        };
        let ch = out.channel_mut(target_channel)?;
        ch.values[r] = value;
        ch.cells[r] = Cell::Imputed;
    }
    Ok(out)
}

/// Last-observation-carried-forward fill of the target channel, the
/// reference imputer.
pub fn forward_fill(frame: &TimeSeriesFrame, target_channel: &str) -> Result<TimeSeriesFrame> {
    let mut out = frame.clone();
    let ch = out.channel_mut(target_channel)?;
    let mut last = None;
    for r in 0..ch.values.len() {
        if ch.cells[r] == Cell::Missing {
            let v = last.ok_or(Error::ImputeWarmup { row: r, lookback: 1 })?;
            ch.values[r] = v;
            ch.cells[r] = Cell::Imputed;
        } else {
            last = Some(ch.values[r]);
        }
    }
    Ok(out)
}

/// Box-and-whisker outlier threshold `q3 + 1.5·iqr`, in physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventThreshold {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub threshold: f64,
    /// Frame rows the quartiles were fitted on.
    #[serde(default)]
    pub fitted_on: Option<Range<usize>>,
}

/// Linear interpolation between order statistics at `(n − 1)·p`
/// (Hyndman and Fan type 7). `sorted` must be ascending.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn event_threshold(values: &[f64]) -> Result<EventThreshold> {
    if values.len() < 4 {
        return Err(invalid(format!(
            "need at least 4 values for quartiles, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("threshold values must be finite"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_type7(&sorted, 0.25);
    let q3 = quantile_type7(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok(EventThreshold {
        q1,
        q3,
        iqr,
        threshold: q3 + 1.5 * iqr,
        fitted_on: None,
    })
}

/// `1` where the value is strictly above the threshold.
pub fn classify_events(values: &[f64], th: &EventThreshold) -> Vec<u8> {
    values.iter().map(|&v| u8::from(v > th.threshold)).collect()
}

/// Binary confusion counts and the metrics derived from them, as fractions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl EventReport {
    /// Zero denominators give 0.
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let (tpf, fpf, tnf, fnf) = (tp as f64, fp as f64, tn as f64, fn_ as f64);
        let precision = ratio(tpf, tpf + fpf);
        let recall = ratio(tpf, tpf + fnf);
        EventReport {
            tp,
            fp,
            tn,
            fn_,
            accuracy: ratio(tpf + tnf, tpf + fpf + tnf + fnf),
            precision,
            recall,
            f1: ratio(2.0 * precision * recall, precision + recall),
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion_metrics(predicted: &[u8], truth: &[u8]) -> Result<EventReport> {
    if predicted.len() != truth.len() {
        return Err(invalid(format!(
            "{} predicted labels for {} true labels",
            predicted.len(),
            truth.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p != 0, t != 0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    Ok(EventReport::from_counts(tp, fp, tn, fn_))
}

/// Threshold, classification outcome and the number of forecast blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventOutcome {
    pub threshold: EventThreshold,
    pub report: EventReport,
    pub blocks: usize,
    pub skipped_blocks: usize,
}

/// Fits the threshold on observed training targets, then tiles the test
/// range with non-overlapping forecasts: the first look-back starts at the
/// test boundary and each block advances by the horizon. Every forecast
/// point is de-normalised, classified and compared with the label of the
/// observed value. Blocks touching a missing cell are skipped.
pub fn event_pipeline(
    model: &dyn Forecaster,
    frame: &TimeSeriesFrame,
    norm: &Normalizer,
    plan: &SplitPlan,
    target_channel: &str,
) -> Result<EventOutcome> {
    let (l, t) = (model.lookback(), model.horizon());
    if plan.test.len() < l + t {
        return Err(invalid(format!(
            "test range of {} rows is shorter than lookback + horizon = {}",
            plan.test.len(),
            l + t
        )));
    }
    let target = frame.channel_index(target_channel)?;
    let target_ch = &frame.channels()[target];
    let train_vals: Vec<f64> = plan
        .train
        .clone()
        .filter(|&r| !target_ch.is_missing(r))
        .map(|r| target_ch.values[r])
        .collect();
    let mut threshold = event_threshold(&train_vals)?;
    threshold.fitted_on = Some(plan.train.clone());

    let channels = frame.channel_names();
    let norm_idx: Vec<usize> = channels.iter().map(|c| norm.index(c)).collect::<Result<_>>()?;
    let t_norm = norm_idx[target];
    let z = norm.transform(frame)?;
    let (mut predicted, mut truth) = (Vec::new(), Vec::new());
    let (mut blocks, mut skipped) = (0, 0);
    let mut start = plan.test.start;
    while start + l + t <= plan.test.end {
        let (split, end) = (start + l, start + l + t);
        if (start..end).any(|r| frame.row_has_missing(r)) {
            skipped += 1;
        } else {
            let mut data = Vec::with_capacity(l * channels.len());
            for r in start..split {
                data.extend_from_slice(z.row_slice(r));
            }
            let pred = model.forecast(&Tensor2::from_vec(l, channels.len(), data)?, &channels)?;
            let ppm: Vec<f64> = pred.iter().map(|&v| norm.invert(t_norm, v)).collect();
            predicted.extend(classify_events(&ppm, &threshold));
            truth.extend(classify_events(&target_ch.values[split..end], &threshold));
            blocks += 1;
        }
        start += t;
    }
    if blocks == 0 {
        return Err(invalid("every forecast block in the test range touches a missing cell"));
    }
    Ok(EventOutcome {
        threshold,
        report: confusion_metrics(&predicted, &truth)?,
        blocks,
        skipped_blocks: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::Persistence;
    use crate::dataio::{make_windows, Channel, WindowSpec, CO2_IN};
    use crate::model::ModelConfig;
    use crate::numerics::Vector;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    // Sort by insertion and interpolate between the bracketing order statistics.
    fn brute_quantile(values: &[f64], p: f64) -> f64 {
        let mut s: Vec<f64> = Vec::new();
        for &v in values {
            let pos = s.iter().position(|x| *x > v).unwrap_or(s.len());
            s.insert(pos, v);
        }
        let h = (s.len() - 1) as f64 * p;
        let j = h as usize;
        if j + 1 >= s.len() {
            return s[j];
        }
        s[j] + (h - j as f64) * (s[j + 1] - s[j])
    }

    #[test]
    fn threshold_on_one_to_eight() {
        let th = event_threshold(&[8.0, 3.0, 1.0, 5.0, 2.0, 7.0, 4.0, 6.0]).unwrap();
        assert_eq!((th.q1, th.q3, th.iqr, th.threshold), (2.75, 6.25, 3.5, 11.5));
    }

    #[test]
    fn threshold_of_constant_data() {
        let th = event_threshold(&[451.12; 10]).unwrap();
        assert_eq!(th.threshold, 451.12);
        assert_eq!(th.iqr, 0.0);
        assert!(event_threshold(&[1.0, 2.0, 3.0]).is_err());
        assert!(event_threshold(&[1.0, 2.0, f64::NAN, 3.0]).is_err());
    }

    proptest! {
        #[test]
        fn threshold_matches_brute_force(v in prop::collection::vec(300.0f64..2000.0, 4..200)) {
            let th = event_threshold(&v).unwrap();
            prop_assert_eq!(th.q1, brute_quantile(&v, 0.25));
            prop_assert_eq!(th.q3, brute_quantile(&v, 0.75));
            prop_assert!(th.q3 >= th.q1 && th.threshold >= th.q3);
        }

        #[test]
        fn classification_is_monotone(v in 300.0f64..700.0, bump in 0.0f64..100.0) {
            let th = EventThreshold { q1: 0.0, q3: 0.0, iqr: 0.0, threshold: 451.12, fitted_on: None };
            let before = classify_events(&[v], &th)[0];
            let after = classify_events(&[v + bump], &th)[0];
            prop_assert!(after >= before);
        }

        #[test]
        fn counts_sum_to_points(p in prop::collection::vec(0u8..2, 0..100), seed in any::<u64>()) {
            let t: Vec<u8> = p.iter().enumerate().map(|(i, x)| x ^ (((seed >> (i % 64)) & 1) as u8)).collect();
            let r = confusion_metrics(&p, &t).unwrap();
            prop_assert_eq!(r.total(), p.len());
        }
    }

    #[test]
    fn classify_examples() {
        let th = EventThreshold {
            q1: 420.0,
            q3: 440.0,
            iqr: 20.0,
            threshold: 451.12,
            fitted_on: None,
        };
        assert_eq!(classify_events(&[440.0, 455.0], &th), vec![0, 1]);
        assert_eq!(classify_events(&[451.12], &th), vec![0]);
        assert_eq!(classify_events(&[400.0, 410.0], &th), vec![0, 0]);
    }

    #[test]
    fn office_one_counts() {
        let r = EventReport::from_counts(192, 84, 3799, 76);
        let pct = |x: f64| (x * 1e4).round() / 1e2;
        assert_eq!(pct(r.accuracy), 96.15);
        assert_eq!(pct(r.precision), 69.57);
        assert_eq!(pct(r.recall), 71.64);
        assert_eq!(pct(r.f1), 70.59);
    }

    #[test]
    fn degenerate_confusions() {
        let perfect = confusion_metrics(&[1, 0], &[1, 0]).unwrap();
        assert_eq!(
            (perfect.accuracy, perfect.precision, perfect.recall, perfect.f1),
            (1.0, 1.0, 1.0, 1.0)
        );
        let silent = confusion_metrics(&[0, 0, 0], &[1, 0, 1]).unwrap();
        assert_eq!((silent.tp, silent.fp, silent.fn_), (0, 0, 2));
        assert_eq!((silent.precision, silent.recall, silent.f1), (0.0, 0.0, 0.0));
        assert!(confusion_metrics(&[0], &[0, 1]).is_err());
        let json = serde_json::to_value(&silent).unwrap();
        assert_eq!(json["fn"], 2);
    }

    fn frame(co2: Vec<f64>) -> TimeSeriesFrame {
        let n = co2.len();
        let start = NaiveDate::from_ymd_opt(2020, 1, 6)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let stamps = TimeSeriesFrame::hourly_index(start, n);
        TimeSeriesFrame::new(
            stamps.clone(),
            vec![
                Channel::observed(CO2_IN, co2),
                Channel::observed("t_in", (0..n).map(|i| 21.0 + (i % 5) as f64 * 0.1).collect()),
                Channel::observed("t_out", (0..n).map(|i| 10.0 + (i % 7) as f64).collect()),
                Channel::observed(HOUR, stamps.iter().map(|t| t.hour() as f64).collect()),
                Channel::observed(
                    NUM_WEEK,
                    stamps
                        .iter()
                        .map(|t| t.weekday().num_days_from_monday() as f64)
                        .collect(),
                ),
            ],
        )
        .unwrap()
    }

    /// Predicts a fixed normalised value; used to force event outcomes.
    struct Constant {
        z: f64,
        l: usize,
        t: usize,
    }

    impl Forecaster for Constant {
        fn name(&self) -> &'static str {
            "constant"
        }
        fn lookback(&self) -> usize {
            self.l
        }
        fn horizon(&self) -> usize {
            self.t
        }
        fn forecast(&self, _: &Tensor2, _: &[String]) -> Result<Vector> {
            Ok(Vector(vec![self.z; self.t]))
        }
    }

    /// Returns the true future, read from a copy of the series.
    struct Oracle {
        series: Vec<f64>,
        l: usize,
        t: usize,
        start_of: Box<dyn Fn(&Tensor2) -> usize>,
    }

    impl Forecaster for Oracle {
        fn name(&self) -> &'static str {
            "oracle"
        }
        fn lookback(&self) -> usize {
            self.l
        }
        fn horizon(&self) -> usize {
            self.t
        }
        fn forecast(&self, input: &Tensor2, _: &[String]) -> Result<Vector> {
            let s = (self.start_of)(input) + self.l;
            Ok(Vector(self.series[s..s + self.t].to_vec()))
        }
    }

    fn spiky(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| if i % 17 == 3 { 900.0 } else { 420.0 + (i % 9) as f64 })
            .collect()
    }

    fn plan(n: usize) -> SplitPlan {
        crate::dataio::chronological_split(&frame(spiky(n)), Default::default(), false, 1).unwrap()
    }

    #[test]
    fn events_forced_outcomes() {
        let n = 400;
        let f = frame(spiky(n));
        let p = plan(n);
        let norm = Normalizer::fit(&f, p.train.clone()).unwrap();
        let t = norm.index(CO2_IN).unwrap();

        let low = Constant {
            z: norm.apply(t, 400.0),
            l: 8,
            t: 4,
        };
        let out = event_pipeline(&low, &f, &norm, &p, CO2_IN).unwrap();
        assert_eq!(out.report.tp, 0);
        assert_eq!(out.report.fp, 0);
        assert!(out.report.fn_ > 0);
        assert_eq!(out.report.total(), out.blocks * 4);

        let high = Constant {
            z: norm.apply(t, 5000.0),
            l: 8,
            t: 4,
        };
        assert_eq!(event_pipeline(&high, &f, &norm, &p, CO2_IN).unwrap().report.tn, 0);

        // The oracle recovers the window start from the hour/weekday columns.
        let z_series: Vec<f64> = spiky(n).iter().map(|&v| norm.apply(t, v)).collect();
        let (h, w) = (norm.index(HOUR).unwrap(), norm.index(NUM_WEEK).unwrap());
        let normh = norm.clone();
        let test_start = p.test.start;
        let perfect = Oracle {
            series: z_series,
            l: 8,
            t: 4,
            start_of: Box::new(move |x: &Tensor2| {
                let hour = normh.invert(h, x[(0, 3)]).round() as usize;
                let day = normh.invert(w, x[(0, 4)]).round() as usize;
                // The frame starts on a Monday at midnight and the test range
                // is shorter than a week, so (day, hour) pins down the row.
                let week_pos = day * 24 + hour;
                (test_start..n).find(|r| r % 168 == week_pos).unwrap()
            }),
        };
        let r = event_pipeline(&perfect, &f, &norm, &p, CO2_IN).unwrap().report;
        assert_eq!((r.fp, r.fn_), (0, 0));
        assert!(r.tp > 0);
    }

    #[test]
    fn events_need_long_enough_test() {
        let f = frame(spiky(40));
        let p = plan(40);
        let norm = Normalizer::fit(&f, p.train.clone()).unwrap();
        let m = Constant { z: 0.0, l: 8, t: 4 };
        assert!(event_pipeline(&m, &f, &norm, &p, CO2_IN).is_err());
    }

    #[test]
    fn metrics_average_per_window() {
        let f = frame((0..60).map(|i| 400.0 + i as f64).collect());
        let norm = Normalizer::fit(&f, 0..60).unwrap();
        let set = make_windows(&f, &norm, CO2_IN, WindowSpec::new(4, 2), 0..60).unwrap();
        let m = Persistence {
            config: ModelConfig {
                lookback: 4,
                horizon: 2,
                ..ModelConfig::default()
            },
        };
        let rep = evaluate_forecast(&m, &set, &norm).unwrap();
        // Persistence on a unit ramp misses by 1 and 2 ppm.
        assert!((rep.mse_ppm - 2.5).abs() < 1e-9);
        assert!((rep.mae_ppm - 1.5).abs() < 1e-9);
        let s = norm.std[0];
        assert!((rep.mse - 2.5 / (s * s)).abs() < 1e-12);
        assert_eq!(rep.windows, set.len());

        let mut one = set.clone();
        one.windows.truncate(1);
        let w = &one.windows[0];
        let pred = m.forecast(&w.input, &one.channels).unwrap();
        let single = evaluate_forecast(&m, &one, &norm).unwrap();
        assert_eq!(single.mse, mse(pred.as_slice(), &w.target).unwrap());

        let mut empty = set;
        empty.windows.clear();
        assert!(evaluate_forecast(&m, &empty, &norm).is_err());
    }

    fn persistence(l: usize) -> Persistence {
        Persistence {
            config: ModelConfig {
                lookback: l,
                horizon: 1,
                ..ModelConfig::default()
            },
        }
    }

    #[test]
    fn imputation_without_gaps_is_identity() {
        let f = frame(spiky(50));
        let norm = Normalizer::fit(&f, 0..50).unwrap();
        let out = impute_series(&persistence(4), &f, &norm, CO2_IN, WarmupFallback::Error).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn imputation_fills_block_recursively() {
        let mut f = frame(spiky(80));
        for r in 30..40 {
            f.mask_cell(0, r);
        }
        f.mask_cell(1, 35);
        let norm = Normalizer::fit(&f, 0..30).unwrap();
        let out = impute_series(&persistence(4), &f, &norm, CO2_IN, WarmupFallback::Error).unwrap();
        let co2 = out.channel(CO2_IN).unwrap();
        assert_eq!(co2.missing_count(), 0);
        // Persistence repeats the last observed value through the whole gap.
        let last = f.channel(CO2_IN).unwrap().values[29];
        for r in 30..40 {
            assert!((co2.values[r] - last).abs() < 1e-9);
            assert_eq!(co2.cells[r], Cell::Imputed);
        }
        let orig = f.channel(CO2_IN).unwrap();
        for r in (0..30).chain(40..80) {
            assert_eq!(co2.values[r].to_bits(), orig.values[r].to_bits());
        }
        assert_eq!(out.channel("t_in").unwrap().cells[35], Cell::Imputed);
        assert!(!out.any_missing());
    }

    #[test]
    fn imputation_warmup() {
        let mut f = frame(spiky(30));
        f.mask_cell(0, 2);
        let norm = Normalizer::fit(&f, 5..30).unwrap();
        assert!(matches!(
            impute_series(&persistence(4), &f, &norm, CO2_IN, WarmupFallback::Error),
            Err(Error::ImputeWarmup { row: 2, lookback: 4 })
        ));
        let out = impute_series(&persistence(4), &f, &norm, CO2_IN, WarmupFallback::TrainingMean).unwrap();
        assert_eq!(out.channel(CO2_IN).unwrap().values[2], norm.mean[0]);
    }

    #[test]
    fn calendar_covariates_come_from_timestamps() {
        let mut f = frame(spiky(30));
        let truth = f.clone();
        f.mask_cell(3, 10);
        f.mask_cell(4, 11);
        fill_covariates(&mut f, 0).unwrap();
        assert_eq!(
            f.channel(HOUR).unwrap().values[10],
            truth.channel(HOUR).unwrap().values[10]
        );
        assert_eq!(
            f.channel(NUM_WEEK).unwrap().values[11],
            truth.channel(NUM_WEEK).unwrap().values[11]
        );
    }

    #[test]
    fn forward_fill_reference() {
        let mut f = frame(spiky(10));
        f.mask_cell(0, 4);
        f.mask_cell(0, 5);
        let out = forward_fill(&f, CO2_IN).unwrap();
        let v = &out.channel(CO2_IN).unwrap().values;
        assert_eq!(v[4], v[3]);
        assert_eq!(v[5], v[3]);
    }
}
