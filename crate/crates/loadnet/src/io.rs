//! Readers and writers for the CSV, text and JSON files the CLI exchanges.

use std::fs;
use std::path::Path;

use chrono::{NaiveDateTime, Timelike};
use loadnet_core::aggregate::{Scale, ScaleDataset};
use loadnet_core::calendar::{HolidayCalendar, HourRange};
use loadnet_core::ingest::{
    merge_sources, CleanHourlySeries, ConsumptionRow, ContinuityReport, HourlyValues,
    RawHourlyRecord, WeatherRow,
};
use loadnet_core::synth::format_hour;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

pub const CONSUMPTION_HEADER: &[&str] = &["timestamp", "kwh"];
pub const WEATHER_HEADER: &[&str] = &["timestamp", "temp_f", "humidity_pct"];
pub const SERIES_HEADER: &[&str] = &["timestamp", "kwh", "temp_f", "humidity_pct"];
pub const PERIOD_COLUMN: &str = "period_start";

const TIMESTAMP_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
];

/// Parses an ISO-8601 local timestamp. Minutes and seconds must be zero.
pub fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    let t = TIMESTAMP_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())?;
    (t.minute() == 0 && t.second() == 0 && t.nanosecond() == 0).then_some(t)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_owned(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })
}

/// A parsed CSV body: one entry per data row, with its 1-based file line.
struct Table {
    rows: Vec<(usize, csv::StringRecord)>,
}

fn parse_table(text: &str, origin: &Path, header: &[&str]) -> Result<Table> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_owned(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    // An entirely empty file has no header and no rows.
    if text.trim().is_empty() {
        return Ok(Table { rows: Vec::new() });
    }
    let found = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_err(
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push((line, record));
    }
    Ok(Table { rows })
}

fn cell_timestamp(origin: &Path, line: usize, text: &str) -> Result<NaiveDateTime> {
    parse_timestamp(text).ok_or_else(|| Error::Parse {
        path: origin.to_owned(),
        line,
        message: format!("bad timestamp `{text}`"),
    })
}

fn cell_number(origin: &Path, line: usize, text: &str) -> Result<f64> {
    text.parse::<f64>().map_err(|_| Error::Parse {
        path: origin.to_owned(),
        line,
        message: format!("bad number `{text}`"),
    })
}

/// Empty cells read as absent.
fn cell_optional(origin: &Path, line: usize, text: &str) -> Result<Option<f64>> {
    if text.is_empty() {
        Ok(None)
    } else {
        cell_number(origin, line, text).map(Some)
    }
}

pub fn parse_consumption(text: &str, origin: &Path) -> Result<Vec<ConsumptionRow>> {
    parse_table(text, origin, CONSUMPTION_HEADER)?
        .rows
        .iter()
        .map(|(line, r)| {
            Ok(ConsumptionRow {
                timestamp: cell_timestamp(origin, *line, &r[0])?,
                kwh: cell_optional(origin, *line, &r[1])?,
            })
        })
        .collect()
}

pub fn parse_weather(text: &str, origin: &Path) -> Result<Vec<WeatherRow>> {
    parse_table(text, origin, WEATHER_HEADER)?
        .rows
        .iter()
        .map(|(line, r)| {
            Ok(WeatherRow {
                timestamp: cell_timestamp(origin, *line, &r[0])?,
                temp_f: cell_optional(origin, *line, &r[1])?,
                humidity_pct: cell_optional(origin, *line, &r[2])?,
            })
        })
        .collect()
}

pub fn read_consumption(path: &Path) -> Result<Vec<ConsumptionRow>> {
    parse_consumption(&read_text(path)?, path)
}

pub fn read_weather(path: &Path) -> Result<Vec<WeatherRow>> {
    parse_weather(&read_text(path)?, path)
}

/// Smallest whole-hour range covering every timestamp of both sources.
pub fn covering_range(consumption: &[ConsumptionRow], weather: &[WeatherRow]) -> Result<HourRange> {
    let stamps = consumption
        .iter()
        .map(|r| r.timestamp)
        .chain(weather.iter().map(|r| r.timestamp));
    let (lo, hi) = stamps.fold(
        (None, None),
        |(lo, hi): (Option<NaiveDateTime>, Option<NaiveDateTime>), t| {
            (
                Some(lo.map_or(t, |l| l.min(t))),
                Some(hi.map_or(t, |h| h.max(t))),
            )
        },
    );
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(HourRange::new(lo, hi + chrono::Duration::hours(1))?),
        _ => Err(Error::Config(
            "input files are empty and no --start/--end range was given".into(),
        )),
    }
}

/// Reads both source files and merges them over `range`, or over the range
/// the files cover when `range` is `None`.
pub fn parse_hourly_files(
    consumption_path: &Path,
    weather_path: &Path,
    range: Option<HourRange>,
) -> Result<(Vec<RawHourlyRecord>, ContinuityReport, HourRange)> {
    let consumption = read_consumption(consumption_path)?;
    let weather = read_weather(weather_path)?;
    let range = match range {
        Some(r) => r,
        None => covering_range(&consumption, &weather)?,
    };
    let (records, report) = merge_sources(&consumption, &weather, range)?;
    Ok((records, report, range))
}

pub fn series_to_csv(series: &CleanHourlySeries) -> String {
    let mut out = SERIES_HEADER.join(",");
    out.push('\n');
    for (t, v) in series.iter() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_hour(t),
            v.kwh,
            v.temp_f,
            v.humidity_pct
        ));
    }
    out
}

pub fn parse_series(text: &str, origin: &Path) -> Result<CleanHourlySeries> {
    let table = parse_table(text, origin, SERIES_HEADER)?;
    let Some((first_line, first)) = table.rows.first() else {
        return Err(Error::Parse {
            path: origin.to_owned(),
            line: 1,
            message: "series file has no rows".into(),
        });
    };
    let start = cell_timestamp(origin, *first_line, &first[0])?;
    let mut values = Vec::with_capacity(table.rows.len());
    for (i, (line, r)) in table.rows.iter().enumerate() {
        let t = cell_timestamp(origin, *line, &r[0])?;
        if t != start + chrono::Duration::hours(i as i64) {
            return Err(Error::Parse {
                path: origin.to_owned(),
                line: *line,
                message: format!("expected consecutive hours, found {t}"),
            });
        }
        values.push(HourlyValues {
            kwh: cell_number(origin, *line, &r[1])?,
            temp_f: cell_number(origin, *line, &r[2])?,
            humidity_pct: cell_number(origin, *line, &r[3])?,
        });
    }
    Ok(CleanHourlySeries::new(start, values)?)
}

pub fn read_series(path: &Path) -> Result<CleanHourlySeries> {
    parse_series(&read_text(path)?, path)
}

pub fn write_series(path: &Path, series: &CleanHourlySeries) -> Result<()> {
    write_text(path, &series_to_csv(series))
}

pub fn dataset_to_csv(dataset: &ScaleDataset) -> String {
    let mut out = String::from(PERIOD_COLUMN);
    for c in dataset.columns() {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, t) in dataset.period_starts().iter().enumerate() {
        out.push_str(&format_hour(*t));
        for v in dataset.values(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Reads a dataset CSV; the scale follows from the header.
pub fn parse_dataset(text: &str, origin: &Path) -> Result<ScaleDataset> {
    let header_line = text.lines().next().unwrap_or_default();
    let scale = Scale::ALL
        .into_iter()
        .find(|s| {
            let mut names = header_line.split(',').map(str::trim);
            names.next() == Some(PERIOD_COLUMN) && names.eq(s.columns().iter().copied())
        })
        .ok_or_else(|| Error::Parse {
            path: origin.to_owned(),
            line: 1,
            message: format!("`{header_line}` is not the header of any scale"),
        })?;
    let header: Vec<&str> = std::iter::once(PERIOD_COLUMN)
        .chain(scale.columns().iter().copied())
        .collect();
    let table = parse_table(text, origin, &header)?;
    let mut starts = Vec::with_capacity(table.rows.len());
    let mut values = Vec::with_capacity(table.rows.len());
    for (line, r) in &table.rows {
        starts.push(cell_timestamp(origin, *line, &r[0])?);
        values.push(
            r.iter()
                .skip(1)
                .map(|c| cell_number(origin, *line, c))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(ScaleDataset::from_values(scale, starts, &values)?)
}

pub fn read_dataset(path: &Path) -> Result<ScaleDataset> {
    parse_dataset(&read_text(path)?, path)
}

pub fn write_dataset(path: &Path, dataset: &ScaleDataset) -> Result<()> {
    write_text(path, &dataset_to_csv(dataset))
}

pub fn read_holidays(path: &Path) -> Result<HolidayCalendar> {
    HolidayCalendar::parse(&read_text(path)?).map_err(|e| match e {
        loadnet_core::Error::MalformedDate { line, text } => Error::Parse {
            path: path.to_owned(),
            line,
            message: format!("bad date `{text}`"),
        },
        other => other.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps() {
        let t = parse_timestamp("2016-03-01T05:00").unwrap();
        assert_eq!(parse_timestamp("2016-03-01 05:00:00"), Some(t));
        assert_eq!(parse_timestamp("2016-03-01T05:00:00"), Some(t));
        assert_eq!(parse_timestamp("2016-03-01T05:30"), None);
        assert_eq!(parse_timestamp("yesterday"), None);
    }

    #[test]
    fn empty_cells_are_absent() {
        let rows = parse_weather(
            "timestamp,temp_f,humidity_pct\n2016-01-01T00:00,,55\n",
            Path::new("w"),
        )
        .unwrap();
        assert_eq!(rows[0].temp_f, None);
        assert_eq!(rows[0].humidity_pct, Some(55.0));
    }

    #[test]
    fn bad_row_reports_line() {
        let text = "timestamp,kwh\n2016-01-01T00:00,1\n2016-01-01T01:00,abc\n";
        match parse_consumption(text, Path::new("c.csv")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_header() {
        assert!(matches!(
            parse_consumption("time,kwh\n", Path::new("c")),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
