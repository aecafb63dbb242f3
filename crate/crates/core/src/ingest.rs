//! Merging and repair of raw hourly meter and weather readings.
//!
//! Consumption and weather rows are merged on exact hour timestamps. An hour
//! missing from either source is a gap. Gaps of one hour are *point gaps*;
//! two or more consecutive missing hours form a *block gap*. Individual
//! fields holding an impossible value (the `-999.99` sentinel, negative
//! consumption, humidity outside `[0, 100]`, or an empty cell) are *sentinel
//! hits*.
//!
//! Point gaps and sentinel hits are repaired with the mean of the valid
//! values of the same field at `t−2h, t−1h, t+1h, t+2h`. Block gaps are
//! filled hour by hour with the mean of the valid values at the same hour of
//! day on days `d−2, d−1, d+1, d+2`. Only values that were valid in the
//! input records are used as neighbours, so a repair never feeds another
//! repair within the same pass.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::calendar::{is_whole_hour, HourRange};
use crate::{Error, Result};

/// Marker recorded by the weather source for a failed measurement.
pub const SENTINEL: f64 = -999.99;
const SENTINEL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Kwh,
    TempF,
    HumidityPct,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Kwh, Field::TempF, Field::HumidityPct];

    pub fn name(self) -> &'static str {
        match self {
            Field::Kwh => "kwh",
            Field::TempF => "temp_f",
            Field::HumidityPct => "humidity_pct",
        }
    }

    /// Whether a stored value is usable for this field.
    pub fn is_valid(self, value: Option<f64>) -> bool {
        let Some(v) = value else { return false };
        if !v.is_finite() || (v - SENTINEL).abs() <= SENTINEL_TOLERANCE {
            return false;
        }
        match self {
            Field::Kwh => v >= 0.0,
            Field::TempF => true,
            Field::HumidityPct => (0.0..=100.0).contains(&v),
        }
    }
}

impl core::fmt::Display for Field {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// One consumption-file row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionRow {
    pub timestamp: NaiveDateTime,
    pub kwh: Option<f64>,
}

/// One weather-file row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherRow {
    pub timestamp: NaiveDateTime,
    pub temp_f: Option<f64>,
    pub humidity_pct: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawHourlyRecord {
    pub timestamp: NaiveDateTime,
    pub kwh: Option<f64>,
    pub temp_f: Option<f64>,
    pub humidity_pct: Option<f64>,
}

impl RawHourlyRecord {
    pub fn get(&self, field: Field) -> Option<f64> {
        match field {
            Field::Kwh => self.kwh,
            Field::TempF => self.temp_f,
            Field::HumidityPct => self.humidity_pct,
        }
    }

    pub fn set(&mut self, field: Field, value: f64) {
        let slot = match field {
            Field::Kwh => &mut self.kwh,
            Field::TempF => &mut self.temp_f,
            Field::HumidityPct => &mut self.humidity_pct,
        };
        *slot = Some(value);
    }

    fn valid(&self, field: Field) -> Option<f64> {
        let v = self.get(field);
        if field.is_valid(v) {
            v
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyValues {
    pub kwh: f64,
    pub temp_f: f64,
    pub humidity_pct: f64,
}

/// Gap-free hourly series starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanHourlySeries {
    start: NaiveDateTime,
    values: Vec<HourlyValues>,
}

impl CleanHourlySeries {
    /// Checks the series invariants: whole-hour start and valid fields.
    pub fn new(start: NaiveDateTime, values: Vec<HourlyValues>) -> Result<Self> {
        if !is_whole_hour(start) {
            return Err(Error::UnalignedTimestamp(start));
        }
        let range = HourRange::new(start, start + Duration::hours(values.len() as i64))?;
        let bad: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| {
                !(Field::Kwh.is_valid(Some(v.kwh))
                    && Field::TempF.is_valid(Some(v.temp_f))
                    && Field::HumidityPct.is_valid(Some(v.humidity_pct)))
            })
            .map(|(i, _)| i)
            .collect();
        if let Some(&first) = bad.first() {
            return Err(Error::ResidualGaps {
                count: bad.len(),
                first: range.hour(first),
            });
        }
        Ok(Self { start, values })
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn end(&self) -> NaiveDateTime {
        self.timestamp(self.values.len())
    }

    pub fn range(&self) -> HourRange {
        HourRange::new(self.start, self.end()).expect("series range is valid")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[HourlyValues] {
        &self.values
    }

    pub fn timestamp(&self, index: usize) -> NaiveDateTime {
        self.start + Duration::hours(index as i64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDateTime, &HourlyValues)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.timestamp(i), v))
    }

    pub fn to_records(&self) -> Vec<RawHourlyRecord> {
        self.iter()
            .map(|(t, v)| RawHourlyRecord {
                timestamp: t,
                kwh: Some(v.kwh),
                temp_f: Some(v.temp_f),
                humidity_pct: Some(v.humidity_pct),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub expected_count: usize,
    pub actual_count: usize,
    /// Isolated missing hours.
    pub point_gaps: Vec<NaiveDateTime>,
    /// Runs of two or more missing hours as half-open `[start, end)`.
    pub block_gaps: Vec<(NaiveDateTime, NaiveDateTime)>,
    pub sentinel_hits: Vec<(NaiveDateTime, Field)>,
}

impl ContinuityReport {
    /// Every missing hour, point and block, in chronological order.
    pub fn missing_hours(&self) -> Vec<NaiveDateTime> {
        let mut out: Vec<NaiveDateTime> = self.point_gaps.clone();
        for &(start, end) in &self.block_gaps {
            let mut t = start;
            while t < end {
                out.push(t);
                t += Duration::hours(1);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_clean(&self) -> bool {
        self.point_gaps.is_empty() && self.block_gaps.is_empty() && self.sentinel_hits.is_empty()
    }
}

fn index_unique<T>(
    rows: &[T],
    ts: impl Fn(&T) -> NaiveDateTime,
    source_name: &'static str,
) -> Result<BTreeMap<NaiveDateTime, usize>> {
    let mut map = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let t = ts(row);
        if !is_whole_hour(t) {
            return Err(Error::UnalignedTimestamp(t));
        }
        if map.insert(t, i).is_some() {
            return Err(Error::DuplicateTimestamp {
                timestamp: t,
                source_name,
            });
        }
    }
    Ok(map)
}

/// Joins the two sources on hour timestamps within `range` and reports
/// every absent hour and every invalid field.
pub fn merge_sources(
    consumption: &[ConsumptionRow],
    weather: &[WeatherRow],
    range: HourRange,
) -> Result<(Vec<RawHourlyRecord>, ContinuityReport)> {
    let usage = index_unique(consumption, |r| r.timestamp, "consumption")?;
    let climate = index_unique(weather, |r| r.timestamp, "weather")?;

    let mut records = Vec::with_capacity(range.hour_count());
    for (t, &ci) in usage.range(range.start()..range.end()) {
        if let Some(&wi) = climate.get(t) {
            records.push(RawHourlyRecord {
                timestamp: *t,
                kwh: consumption[ci].kwh,
                temp_f: weather[wi].temp_f,
                humidity_pct: weather[wi].humidity_pct,
            });
        }
    }
    let report = continuity_report(&records, range);
    Ok((records, report))
}

/// Recomputes the continuity report of chronologically sorted records.
pub fn continuity_report(records: &[RawHourlyRecord], range: HourRange) -> ContinuityReport {
    let mut present = alloc::vec![false; range.hour_count()];
    let mut sentinel_hits = Vec::new();
    let mut actual = 0;
    for r in records {
        let Some(i) = range.index_of(r.timestamp) else {
            continue;
        };
        present[i] = true;
        actual += 1;
        for field in Field::ALL {
            if !field.is_valid(r.get(field)) {
                sentinel_hits.push((r.timestamp, field));
            }
        }
    }

    let mut point_gaps = Vec::new();
    let mut block_gaps = Vec::new();
    let mut i = 0;
    while i < present.len() {
        if present[i] {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < present.len() && !present[i] {
            i += 1;
        }
        if i - run_start == 1 {
            point_gaps.push(range.hour(run_start));
        } else {
            block_gaps.push((range.hour(run_start), range.hour(i)));
        }
    }

    ContinuityReport {
        expected_count: range.hour_count(),
        actual_count: actual,
        point_gaps,
        block_gaps,
        sentinel_hits,
    }
}

fn by_time(records: &[RawHourlyRecord]) -> BTreeMap<NaiveDateTime, RawHourlyRecord> {
    records.iter().map(|r| (r.timestamp, *r)).collect()
}

fn neighbour_mean(
    snapshot: &BTreeMap<NaiveDateTime, RawHourlyRecord>,
    at: NaiveDateTime,
    field: Field,
    offsets_hours: [i64; 4],
) -> Option<f64> {
    let (sum, n) = offsets_hours
        .iter()
        .filter_map(|&o| {
            snapshot
                .get(&(at + Duration::hours(o)))
                .and_then(|r| r.valid(field))
        })
        .fold((0.0, 0u32), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / f64::from(n))
}

const HOUR_OFFSETS: [i64; 4] = [-2, -1, 1, 2];
const DAY_OFFSETS: [i64; 4] = [-48, -24, 24, 48];

/// Repairs the report's sentinel hits and point gaps in place of the
/// original values. Nothing else changes.
pub fn repair_local(
    records: &[RawHourlyRecord],
    report: &ContinuityReport,
) -> Result<Vec<RawHourlyRecord>> {
    let snapshot = by_time(records);
    let mut out = snapshot.clone();

    for &(at, field) in &report.sentinel_hits {
        let value = neighbour_mean(&snapshot, at, field, HOUR_OFFSETS)
            .ok_or(Error::UnrepairablePoint { at, field })?;
        if let Some(r) = out.get_mut(&at) {
            r.set(field, value);
        }
    }

    for &at in &report.point_gaps {
        let mut record = RawHourlyRecord {
            timestamp: at,
            kwh: None,
            temp_f: None,
            humidity_pct: None,
        };
        for field in Field::ALL {
            let value = neighbour_mean(&snapshot, at, field, HOUR_OFFSETS)
                .ok_or(Error::UnrepairablePoint { at, field })?;
            record.set(field, value);
        }
        out.insert(at, record);
    }

    Ok(out.into_values().collect())
}

/// Fills every hour of the report's block gaps from the same hour of day on
/// the two days before and after.
pub fn repair_block(
    records: &[RawHourlyRecord],
    report: &ContinuityReport,
) -> Result<Vec<RawHourlyRecord>> {
    let snapshot = by_time(records);
    let mut out = snapshot.clone();

    for &(start, end) in &report.block_gaps {
        let mut at = start;
        while at < end {
            let mut record = RawHourlyRecord {
                timestamp: at,
                kwh: None,
                temp_f: None,
                humidity_pct: None,
            };
            for field in Field::ALL {
                let value = neighbour_mean(&snapshot, at, field, DAY_OFFSETS)
                    .ok_or(Error::UnrepairableBlock { start, end, at })?;
                record.set(field, value);
            }
            out.insert(at, record);
            at += Duration::hours(1);
        }
    }

    Ok(out.into_values().collect())
}

/// Converts fully repaired records into a contiguous series covering `range`.
pub fn finalize_series(records: &[RawHourlyRecord], range: HourRange) -> Result<CleanHourlySeries> {
    let mut slots: Vec<Option<HourlyValues>> = alloc::vec![None; range.hour_count()];
    for r in records {
        let Some(i) = range.index_of(r.timestamp) else {
            continue;
        };
        if let (Some(kwh), Some(temp_f), Some(humidity_pct)) = (
            r.valid(Field::Kwh),
            r.valid(Field::TempF),
            r.valid(Field::HumidityPct),
        ) {
            slots[i] = Some(HourlyValues {
                kwh,
                temp_f,
                humidity_pct,
            });
        }
    }
    let holes: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_none())
        .map(|(i, _)| i)
        .collect();
    if let Some(&first) = holes.first() {
        return Err(Error::ResidualGaps {
            count: holes.len(),
            first: range.hour(first),
        });
    }
    CleanHourlySeries::new(
        range.start(),
        slots.into_iter().map(Option::unwrap).collect(),
    )
}

/// Merge, repair and finalize in one go.
pub fn clean(
    consumption: &[ConsumptionRow],
    weather: &[WeatherRow],
    range: HourRange,
) -> Result<(CleanHourlySeries, ContinuityReport)> {
    let (records, report) = merge_sources(consumption, weather, range)?;
    let records = repair_local(&records, &report)?;
    let records = repair_block(&records, &report)?;
    let series = finalize_series(&records, range)?;
    Ok((series, report))
}
