//! CSV ingestion and emission.
//!
//! Header is `timestamp,co2_in,t_in,t_out,hour,num_week`. An empty field is
//! a missing cell. Values are written in shortest round-trip form, so a
//! write/read cycle reproduces every finite value bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Duration, NaiveDateTime};

use super::frame::{Cell, Channel, TimeSeriesFrame, CHANNELS};
use crate::error::{Error, Result};

const TIMESTAMP: &str = "timestamp";
const TS_FORMATS: [&str; 3] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S"];

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim().trim_end_matches('Z');
    TS_FORMATS.iter().find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%S").to_string()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<TimeSeriesFrame> {
    let mut text = String::new();
    File::open(path.as_ref())?.read_to_string(&mut text)?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<TimeSeriesFrame> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::Csv {
            line: 1,
            msg: e.to_string(),
        })?,
        None => {
            return Err(Error::Csv {
                line: 1,
                msg: "empty file".into(),
            })
        }
    };
    let expected: Vec<&str> = std::iter::once(TIMESTAMP).chain(CHANNELS).collect();
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Csv {
            line: 1,
            msg: format!("unknown header `{}`, expected `{}`", got.join(","), expected.join(",")),
        });
    }

    let mut timestamps: Vec<NaiveDateTime> = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); CHANNELS.len()];
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); CHANNELS.len()];

    for rec in records {
        let rec = rec.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec.get(0).is_some_and(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != expected.len() {
            return Err(Error::Csv {
                line,
                msg: format!("expected {} fields, found {}", expected.len(), rec.len()),
            });
        }
        let ts = parse_timestamp(&rec[0]).ok_or_else(|| Error::Csv {
            line,
            msg: format!("bad timestamp `{}`", &rec[0]),
        })?;
        if let Some(prev) = timestamps.last() {
            if ts <= *prev {
                return Err(Error::Csv {
                    line,
                    msg: format!("timestamp {} does not follow {}", &rec[0], format_timestamp(prev)),
                });
            }
            if ts - *prev != Duration::hours(1) {
                return Err(Error::Csv {
                    line,
                    msg: format!(
                        "gap between {} and {}; rows must be hourly",
                        format_timestamp(prev),
                        &rec[0]
                    ),
                });
            }
        }
        timestamps.push(ts);
        for (c, field) in rec.iter().skip(1).enumerate() {
            let field = field.trim();
            if field.is_empty() {
                values[c].push(f64::NAN);
                cells[c].push(Cell::Missing);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Csv {
                    line,
                    msg: format!("bad number `{field}` in column {}", CHANNELS[c]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv {
                        line,
                        msg: format!("non-finite value in column {}", CHANNELS[c]),
                    });
                }
                values[c].push(v);
                cells[c].push(Cell::Observed);
            }
        }
    }

    let channels = CHANNELS
        .iter()
        .zip(values.into_iter().zip(cells))
        .map(|(name, (values, cells))| Channel {
            name: name.to_string(),
            values,
            cells,
        })
        .collect();
    TimeSeriesFrame::new(timestamps, channels)
}

/// Serialises `frame`; it must carry exactly the standard channels.
pub fn to_csv_string(frame: &TimeSeriesFrame) -> Result<String> {
    let cols: Vec<&Channel> = CHANNELS.iter().map(|n| frame.channel(n)).collect::<Result<_>>()?;
    let mut out = String::with_capacity(frame.len() * 64);
    out.push_str(TIMESTAMP);
    for n in CHANNELS {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (i, ts) in frame.timestamps().iter().enumerate() {
        out.push_str(&format_timestamp(ts));
        for c in &cols {
            out.push(',');
            if c.cells[i] != Cell::Missing {
                out.push_str(&format!("{}", c.values[i]));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(frame: &TimeSeriesFrame, path: impl AsRef<Path>) -> Result<()> {
    let text = to_csv_string(frame)?;
    File::create(path.as_ref())?.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "timestamp,co2_in,t_in,t_out,hour,num_week\n";

    #[test]
    fn empty_field_is_missing() {
        let text = format!("{HEAD}2020-01-06T00:00:00,,21.5,4.0,0,0\n2020-01-06T01:00:00,431.25,21.5,4.0,1,0\n");
        let f = parse_csv(&text).unwrap();
        let co2 = f.channel("co2_in").unwrap();
        assert_eq!(co2.cells, vec![Cell::Missing, Cell::Observed]);
        assert_eq!(co2.values[1], 431.25);
    }

    #[test]
    fn duplicated_timestamp_cites_line() {
        let text = format!("{HEAD}2020-01-06T00:00:00,1,2,3,0,0\n2020-01-06T00:00:00,1,2,3,0,0\n");
        match parse_csv(&text) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_header_rejected() {
        let text = "time,co2,t_in,t_out,hour,num_week\n";
        assert!(matches!(parse_csv(text), Err(Error::Csv { line: 1, .. })));
    }

    #[test]
    fn ragged_row_rejected() {
        let text = format!("{HEAD}2020-01-06T00:00:00,1,2,3,0\n");
        match parse_csv(&text) {
            Err(Error::Csv { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("fields"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hourly_gap_rejected() {
        let text = format!("{HEAD}2020-01-06T00:00:00,1,2,3,0,0\n2020-01-06T03:00:00,1,2,3,3,0\n");
        assert!(matches!(parse_csv(&text), Err(Error::Csv { line: 3, .. })));
    }

    #[test]
    fn awkward_values_round_trip_bitwise() {
        let vals = [0.1 + 0.2, 1e-300, -123_456.789_012_345_68, 5e-324, 1.0 / 3.0];
        let ts = TimeSeriesFrame::hourly_index(parse_timestamp("2021-03-01T00:00:00").unwrap(), vals.len());
        let channels = CHANNELS.iter().map(|n| Channel::observed(*n, vals.to_vec())).collect();
        let f = TimeSeriesFrame::new(ts, channels).unwrap();
        let back = parse_csv(&to_csv_string(&f).unwrap()).unwrap();
        for (a, b) in f.channels().iter().zip(back.channels()) {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
