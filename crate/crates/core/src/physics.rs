//! Single-zone CO₂ mass balance.
//!
//! ```text
//! dC/dt = (ṁ / (ρ·V)) · (C_out − C) + M/ρ
//! ```
//!
//! with the source term `M/ρ` given directly in ppm/h. Inputs are piecewise
//! constant over each hour; the ODE is integrated with classical RK4 at a
//! fixed sub-hour step and sampled on the hour.

use std::ops::Range;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataio::{Channel, TimeSeriesFrame, CO2_IN, HOUR, NUM_WEEK, T_IN, T_OUT};
use crate::error::{invalid, Error, Result};

/// Default integration step, hours.
pub const DEFAULT_STEP: f64 = 0.05;

/// A value per hour, or one value for all hours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HourlyProfile {
    Constant(f64),
    Hourly(Vec<f64>),
}

impl HourlyProfile {
    /// Value during hour `h`; an hourly profile holds its last value.
    pub fn at(&self, h: usize) -> f64 {
        match self {
            HourlyProfile::Constant(v) => *v,
            HourlyProfile::Hourly(v) => v[h.min(v.len() - 1)],
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            HourlyProfile::Constant(v) => Some(*v),
            HourlyProfile::Hourly(v) => {
                let first = *v.first()?;
                v.iter().all(|x| *x == first).then_some(first)
            }
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            HourlyProfile::Constant(v) => std::slice::from_ref(v),
            HourlyProfile::Hourly(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConfig {
    /// Ventilation mass flow, kg/h.
    pub mdot: f64,
    /// Air density, kg/m³.
    pub rho: f64,
    /// Zone volume, m³.
    pub volume: f64,
    /// Outdoor concentration, ppm.
    pub co2_out: HourlyProfile,
    /// Source term M/ρ, ppm/h.
    pub generation: HourlyProfile,
    /// Integration step, h.
    pub step: f64,
}

impl PhysicsConfig {
    /// Air-change rate ṁ/(ρV), 1/h.
    pub fn air_change_rate(&self) -> f64 {
        self.mdot / (self.rho * self.volume)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !(self.volume > 0.0) || !(self.mdot >= 0.0) || !(self.step > 0.0) {
            return Err(invalid(format!(
                "need rho > 0, volume > 0, mdot ≥ 0, step > 0 (got {}, {}, {}, {})",
                self.rho, self.volume, self.mdot, self.step
            )));
        }
        if let HourlyProfile::Hourly(v) = &self.co2_out {
            if v.is_empty() {
                return Err(invalid("outdoor CO2 profile is empty"));
            }
        }
        if let HourlyProfile::Hourly(v) = &self.generation {
            if v.is_empty() {
                return Err(invalid("generation profile is empty"));
            }
        }
        if self.generation.values().iter().any(|g| !(*g >= 0.0)) {
            return Err(invalid("generation must be non-negative"));
        }
        Ok(())
    }
}

/// Integrates from `c0` and returns `hours + 1` hourly samples, the first
/// being `c0`.
pub fn simulate_co2(cfg: &PhysicsConfig, c0: f64, hours: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(c0 >= 0.0) {
        return Err(invalid(format!("initial concentration must be ≥ 0, got {c0}")));
    }
    let a = cfg.air_change_rate();
    let substeps = (1.0 / cfg.step).round().max(1.0) as usize;
    let h = 1.0 / substeps as f64;

    let mut out = Vec::with_capacity(hours + 1);
    out.push(c0);
    let mut c = c0;
    let mut step_index = 0;
    for hour in 0..hours {
        let c_out = cfg.co2_out.at(hour);
        let g = cfg.generation.at(hour);
        let f = |c: f64| a * (c_out - c) + g;
        for _ in 0..substeps {
            let k1 = f(c);
            let k2 = f(c + 0.5 * h * k1);
            let k3 = f(c + 0.5 * h * k2);
            let k4 = f(c + h * k3);
            c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            step_index += 1;
            if !c.is_finite() {
                return Err(Error::NonFiniteState {
                    step: step_index,
                    time: step_index as f64 * h,
                });
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Fixed point `C_out + g / (ṁ/(ρV))` for constant inputs.
pub fn steady_state(cfg: &PhysicsConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.mdot == 0.0 {
        return Err(invalid("no finite steady state without ventilation (mdot = 0)"));
    }
    let c_out = cfg
        .co2_out
        .constant_value()
        .ok_or_else(|| invalid("steady state needs a constant outdoor profile"))?;
    let g = cfg
        .generation
        .constant_value()
        .ok_or_else(|| invalid("steady state needs a constant generation profile"))?;
    Ok(c_out + g / cfg.air_change_rate())
}

/// Concrete hourly profiles for one synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub start: NaiveDateTime,
    /// People present during each hour.
    pub occupancy: Vec<f64>,
    /// Source strength per person, ppm/h.
    pub per_person_rate: f64,
    pub co2_out: Vec<f64>,
    pub t_in: Vec<f64>,
    pub t_out: Vec<f64>,
    pub mdot: f64,
    pub rho: f64,
    pub volume: f64,
    pub step: f64,
    pub c0: f64,
    /// Standard deviation of additive sensor noise on indoor CO₂, ppm.
    pub sensor_noise: f64,
    pub seed: u64,
}

impl Scenario {
    pub fn len(&self) -> usize {
        self.occupancy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.is_empty()
    }
}

/// Knobs for [`office_scenario`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OfficeScenario {
    pub hours: usize,
    /// Must be a Monday at midnight for the weekday schedule to line up.
    pub start: NaiveDateTime,
    pub volume: f64,
    pub mdot: f64,
    pub rho: f64,
    pub per_person_rate: f64,
    pub max_people: u32,
    pub co2_out_mean: f64,
    pub sensor_noise: f64,
    pub seed: u64,
}

impl Default for OfficeScenario {
    fn default() -> Self {
        OfficeScenario {
            hours: 4000,
            start: NaiveDate::from_ymd_opt(2020, 1, 6)
                .unwrap()
                .and_hms_opt(0, 0, 0)
                .unwrap(),
            volume: 60.0,
            mdot: 144.0,
            rho: 1.2,
            per_person_rate: 150.0,
            max_people: 3,
            co2_out_mean: 415.0,
            sensor_noise: 3.0,
            seed: 0,
        }
    }
}

/// Seeded office rhythm: weekday occupancy around 9:00–17:00, empty
/// weekends, diurnal outdoor CO₂ and temperatures.
pub fn office_scenario(o: &OfficeScenario) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let n = o.hours;
    let weekday0 = o.start.weekday().num_days_from_monday() as usize;
    let hour0 = o.start.hour() as usize;
    let day_of = |t: usize| (hour0 + t) / 24;

    let mut occupancy = vec![0.0; n];
    let days = day_of(n.saturating_sub(1)) + 1;
    for day in 0..days {
        let weekday = (weekday0 + day) % 7;
        let (arrive, leave, people) = if weekday < 5 {
            (
                rng.gen_range(8..=9),
                rng.gen_range(16..=18),
                rng.gen_range(1..=o.max_people.max(1)) as f64,
            )
        } else if rng.gen_bool(0.15) {
            (10, rng.gen_range(12..=14), 1.0)
        } else {
            (0, 0, 0.0)
        };
        let lunch_out = rng.gen_bool(0.5);
        for hod in arrive..leave {
            let t = day * 24 + hod;
            if t < hour0 || t - hour0 >= n {
                continue;
            }
            let mut p = people;
            if hod == 12 && lunch_out {
                p = (p - 1.0).max(0.0);
            }
            occupancy[t - hour0] = p;
        }
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut co2_out = Vec::with_capacity(n);
    let mut t_out = Vec::with_capacity(n);
    let mut t_in = Vec::with_capacity(n);
    for (t, &occ) in occupancy.iter().enumerate() {
        let hod = ((hour0 + t) % 24) as f64;
        let season = (two_pi * t as f64 / (24.0 * 365.0)).cos();
        co2_out.push(o.co2_out_mean + 8.0 * (two_pi * (hod - 6.0) / 24.0).cos() + 1.5 * noise.sample(&mut rng));
        let to = 12.0 - 5.0 * season + 5.0 * (two_pi * (hod - 15.0) / 24.0).cos() + 0.8 * noise.sample(&mut rng);
        t_out.push(to);
        t_in.push(21.0 + 0.6 * occ.min(1.0) + 0.12 * (to - 12.0) + 0.2 * noise.sample(&mut rng));
    }

    Scenario {
        start: o.start,
        occupancy,
        per_person_rate: o.per_person_rate,
        co2_out,
        t_in,
        t_out,
        mdot: o.mdot,
        rho: o.rho,
        volume: o.volume,
        step: DEFAULT_STEP,
        c0: o.co2_out_mean,
        sensor_noise: o.sensor_noise,
        seed: o.seed,
    }
}

/// Builds a fully observed frame from a scenario.
pub fn generate_scenario(s: &Scenario) -> Result<TimeSeriesFrame> {
    let n = s.len();
    if n == 0 {
        return Err(invalid("scenario has no hours"));
    }
    for (name, len) in [
        ("co2_out", s.co2_out.len()),
        ("t_in", s.t_in.len()),
        ("t_out", s.t_out.len()),
    ] {
        if len != n {
            return Err(invalid(format!("profile `{name}` has {len} hours, occupancy has {n}")));
        }
    }
    let cfg = PhysicsConfig {
        mdot: s.mdot,
        rho: s.rho,
        volume: s.volume,
        co2_out: HourlyProfile::Hourly(s.co2_out.clone()),
        generation: HourlyProfile::Hourly(s.occupancy.iter().map(|p| p * s.per_person_rate).collect()),
        step: s.step,
    };
    let mut co2 = simulate_co2(&cfg, s.c0, n - 1)?;
    if s.sensor_noise > 0.0 {
        // Separate stream so noise does not perturb the profile draws.
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x05EE_DC02);
        let noise = Normal::new(0.0, s.sensor_noise).map_err(|e| invalid(e.to_string()))?;
        for c in &mut co2 {
            *c = (*c + noise.sample(&mut rng)).max(0.0);
        }
    }

    let hour0 = s.start.hour() as usize;
    let weekday0 = s.start.weekday().num_days_from_monday() as usize;
    let hour: Vec<f64> = (0..n).map(|t| ((hour0 + t) % 24) as f64).collect();
    let num_week: Vec<f64> = (0..n).map(|t| ((weekday0 + (hour0 + t) / 24) % 7) as f64).collect();

    TimeSeriesFrame::new(
        TimeSeriesFrame::hourly_index(s.start, n),
        vec![
            Channel::observed(CO2_IN, co2),
            Channel::observed(T_IN, s.t_in.clone()),
            Channel::observed(T_OUT, s.t_out.clone()),
            Channel::observed(HOUR, hour),
            Channel::observed(NUM_WEEK, num_week),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingMode {
    Contiguous,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingSpec {
    /// Fraction of all rows to blank in each chosen channel.
    pub fraction: f64,
    pub mode: MissingMode,
    pub channels: Vec<String>,
    /// Rows eligible for masking; the whole frame when absent.
    #[serde(default)]
    pub region: Option<Range<usize>>,
}

/// Blanks `floor(fraction · n)` rows of each chosen channel.
///
/// Contiguous mode masks one block at a seeded offset; random mode masks a
/// seeded set of rows. Both modes mask the same rows in every channel.
pub fn inject_missingness(frame: &TimeSeriesFrame, spec: &MissingSpec, seed: u64) -> Result<TimeSeriesFrame> {
    if !(0.0..=1.0).contains(&spec.fraction) {
        return Err(invalid(format!("missing fraction {} outside [0, 1]", spec.fraction)));
    }
    let n = frame.len();
    let count = (spec.fraction * n as f64).floor() as usize;
    let region = spec.region.clone().unwrap_or(0..n);
    if region.end > n || region.len() < count {
        return Err(invalid(format!(
            "cannot place {count} missing rows inside {region:?} of a {n}-row frame"
        )));
    }
    let idx: Vec<usize> = spec
        .channels
        .iter()
        .map(|c| frame.channel_index(c))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<usize> = match spec.mode {
        MissingMode::Contiguous => {
            let start = region.start + rng.gen_range(0..=region.len() - count);
            (start..start + count).collect()
        }
        MissingMode::Random => sample(&mut rng, region.len(), count)
            .into_iter()
            .map(|i| region.start + i)
            .collect(),
    };
    let mut out = frame.clone();
    for &c in &idx {
        for &r in &rows {
            out.mask_cell(c, r);
        }
    }
    Ok(out)
}
