//! Frames, CSV, normalisation, chronological splits and sliding windows.

mod csvio;
mod frame;
mod normalize;
mod prepare;
mod split;
mod window;

pub use csvio::{format_timestamp, parse_csv, read_csv, to_csv_string, write_csv};
pub use frame::{Cell, Channel, TimeSeriesFrame, CHANNELS, CO2_IN, HOUR, NUM_WEEK, T_IN, T_OUT};
pub use normalize::{Normalizer, STD_EPS};
pub use prepare::{prepare, Prepared};
pub use split::{chronological_split, SplitPlan, SplitRatios};
pub use window::{make_windows, Window, WindowSet, WindowSpec};
