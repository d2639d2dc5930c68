use super::frame::TimeSeriesFrame;
use super::normalize::Normalizer;
use super::split::{chronological_split, SplitPlan, SplitRatios};
use super::window::{make_windows, WindowSet, WindowSpec};
use crate::error::Result;

/// Everything a training run needs from a frame.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub plan: SplitPlan,
    pub normalizer: Normalizer,
    pub train: WindowSet,
    pub val: WindowSet,
    /// `None` when the test range is shorter than one window.
    pub test: Option<WindowSet>,
}

/// Splits, fits the normaliser on the training range and cuts complete
/// windows inside each range. No window crosses a range boundary.
pub fn prepare(
    frame: &TimeSeriesFrame,
    target_channel: &str,
    spec: WindowSpec,
    ratios: SplitRatios,
    missing_to_test: bool,
) -> Result<Prepared> {
    let plan = chronological_split(frame, ratios, missing_to_test, spec.span())?;
    let normalizer = Normalizer::fit(frame, plan.train.clone())?;
    let cut = |range: std::ops::Range<usize>| {
        make_windows(frame, &normalizer, target_channel, spec, range).map(WindowSet::complete_only)
    };
    let train = cut(plan.train.clone())?;
    let val = cut(plan.val.clone())?;
    let test = if plan.test.len() >= spec.span() {
        Some(cut(plan.test.clone())?)
    } else {
        None
    };
    Ok(Prepared {
        plan,
        normalizer,
        train,
        val,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{Channel, CO2_IN};
    use chrono::NaiveDate;

    #[test]
    fn windows_stay_inside_their_ranges() {
        let n = 200;
        let start = NaiveDate::from_ymd_opt(2020, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let mut f = TimeSeriesFrame::new(
            TimeSeriesFrame::hourly_index(start, n),
            vec![Channel::observed(CO2_IN, (0..n).map(|i| 400.0 + i as f64).collect())],
        )
        .unwrap();
        f.mask_cell(0, 150);
        let spec = WindowSpec::new(8, 4);
        let p = prepare(&f, CO2_IN, spec, SplitRatios::default(), true).unwrap();
        assert_eq!(p.plan.test, 150..200);
        assert!(p.train.iter().all(|w| w.start + 12 <= p.plan.train.end));
        assert!(p
            .val
            .iter()
            .all(|w| w.start >= p.plan.val.start && w.start + 12 <= p.plan.val.end));
        let test = p.test.unwrap();
        assert!(test.iter().all(|w| w.start > 150));
        assert_eq!(test.len(), 200 - 151 - 12 + 1);
    }
}
