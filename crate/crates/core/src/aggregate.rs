//! Hourly, daily, weekly and monthly datasets built from a clean series.
//!
//! Totals are sums of hourly kWh; temperature and humidity are summarized
//! by max, min and arithmetic mean over the member hours. Weeks are
//! consecutive 7-day blocks anchored at the series start, with a trailing
//! partial week dropped.

use alloc::vec::Vec;
use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::calendar::{day_of_week, is_weekend, HolidayCalendar};
use crate::ingest::{CleanHourlySeries, HourlyValues};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Hourly,
    Daily,
    Weekly,
    Monthly,
}

const HOURLY_COLUMNS: &[&str] = &[
    "kwh",
    "month",
    "temp_f",
    "humidity_pct",
    "hour_of_day",
    "day_of_week",
    "is_weekend",
    "is_holiday",
];
const DAILY_COLUMNS: &[&str] = &[
    "kwh_total",
    "temp_max",
    "temp_min",
    "temp_avg",
    "hum_max",
    "hum_min",
    "hum_avg",
    "is_weekend",
    "is_holiday",
];
const WEEKLY_COLUMNS: &[&str] = &[
    "kwh_total",
    "temp_max",
    "temp_min",
    "temp_avg",
    "hum_max",
    "hum_min",
    "hum_avg",
    "holiday_count",
];
const MONTHLY_COLUMNS: &[&str] = &[
    "kwh_total",
    "temp_max",
    "temp_min",
    "temp_avg",
    "hum_max",
    "hum_min",
    "hum_avg",
    "weekend_day_count",
    "holiday_count",
];

impl Scale {
    pub const ALL: [Scale; 4] = [Scale::Hourly, Scale::Daily, Scale::Weekly, Scale::Monthly];

    pub fn name(self) -> &'static str {
        match self {
            Scale::Hourly => "hourly",
            Scale::Daily => "daily",
            Scale::Weekly => "weekly",
            Scale::Monthly => "monthly",
        }
    }

    /// Schema column names; the first is always the consumption target.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Scale::Hourly => HOURLY_COLUMNS,
            Scale::Daily => DAILY_COLUMNS,
            Scale::Weekly => WEEKLY_COLUMNS,
            Scale::Monthly => MONTHLY_COLUMNS,
        }
    }

    /// Columns usable as context factors (everything except consumption).
    pub fn context_columns(self) -> &'static [&'static str] {
        &self.columns()[1..]
    }

    /// Lag windows swept for this scale, in periods.
    pub fn lag_grid(self) -> &'static [usize] {
        match self {
            Scale::Hourly => &[0, 1, 2, 4, 6, 12, 24],
            Scale::Daily => &[0, 1, 3, 5, 7, 9, 11, 13],
            Scale::Weekly => &[0, 1, 2, 3, 4, 5],
            Scale::Monthly => &[0, 1, 2, 3, 4],
        }
    }
}

impl core::fmt::Display for Scale {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scale::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown scale `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyRow {
    pub kwh: f64,
    pub month: u8,
    pub temp_f: f64,
    pub humidity_pct: f64,
    pub hour_of_day: u8,
    pub day_of_week: u8,
    pub is_weekend: u8,
    pub is_holiday: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyRow {
    pub kwh_total: f64,
    pub temp_max: f64,
    pub temp_min: f64,
    pub temp_avg: f64,
    pub hum_max: f64,
    pub hum_min: f64,
    pub hum_avg: f64,
    pub is_weekend: u8,
    pub is_holiday: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeeklyRow {
    pub kwh_total: f64,
    pub temp_max: f64,
    pub temp_min: f64,
    pub temp_avg: f64,
    pub hum_max: f64,
    pub hum_min: f64,
    pub hum_avg: f64,
    pub holiday_count: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthlyRow {
    pub kwh_total: f64,
    pub temp_max: f64,
    pub temp_min: f64,
    pub temp_avg: f64,
    pub hum_max: f64,
    pub hum_min: f64,
    pub hum_avg: f64,
    pub weekend_day_count: u8,
    pub holiday_count: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", content = "rows", rename_all = "lowercase")]
pub enum Rows {
    Hourly(Vec<HourlyRow>),
    Daily(Vec<DailyRow>),
    Weekly(Vec<WeeklyRow>),
    Monthly(Vec<MonthlyRow>),
}

/// Rows of one scale, in chronological order, each with its period start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleDataset {
    period_starts: Vec<NaiveDateTime>,
    rows: Rows,
}

impl ScaleDataset {
    pub fn scale(&self) -> Scale {
        match self.rows {
            Rows::Hourly(_) => Scale::Hourly,
            Rows::Daily(_) => Scale::Daily,
            Rows::Weekly(_) => Scale::Weekly,
            Rows::Monthly(_) => Scale::Monthly,
        }
    }

    pub fn rows(&self) -> &Rows {
        &self.rows
    }

    pub fn period_starts(&self) -> &[NaiveDateTime] {
        &self.period_starts
    }

    pub fn len(&self) -> usize {
        self.period_starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.period_starts.is_empty()
    }

    pub fn columns(&self) -> &'static [&'static str] {
        self.scale().columns()
    }

    /// Consumption of row `i`.
    pub fn kwh(&self, i: usize) -> f64 {
        self.values(i)[0]
    }

    /// Row `i` in schema column order.
    pub fn values(&self, i: usize) -> Vec<f64> {
        match &self.rows {
            Rows::Hourly(r) => {
                let r = &r[i];
                alloc::vec![
                    r.kwh,
                    r.month.into(),
                    r.temp_f,
                    r.humidity_pct,
                    r.hour_of_day.into(),
                    r.day_of_week.into(),
                    r.is_weekend.into(),
                    r.is_holiday.into(),
                ]
            }
            Rows::Daily(r) => {
                let r = &r[i];
                alloc::vec![
                    r.kwh_total,
                    r.temp_max,
                    r.temp_min,
                    r.temp_avg,
                    r.hum_max,
                    r.hum_min,
                    r.hum_avg,
                    r.is_weekend.into(),
                    r.is_holiday.into(),
                ]
            }
            Rows::Weekly(r) => {
                let r = &r[i];
                alloc::vec![
                    r.kwh_total,
                    r.temp_max,
                    r.temp_min,
                    r.temp_avg,
                    r.hum_max,
                    r.hum_min,
                    r.hum_avg,
                    r.holiday_count.into(),
                ]
            }
            Rows::Monthly(r) => {
                let r = &r[i];
                alloc::vec![
                    r.kwh_total,
                    r.temp_max,
                    r.temp_min,
                    r.temp_avg,
                    r.hum_max,
                    r.hum_min,
                    r.hum_avg,
                    r.weekend_day_count.into(),
                    r.holiday_count.into(),
                ]
            }
        }
    }

    /// Total consumption over all rows.
    pub fn total_kwh(&self) -> f64 {
        (0..self.len()).map(|i| self.kwh(i)).sum()
    }

    /// Rebuilds a dataset from schema-ordered value rows, as read back from
    /// a CSV file.
    pub fn from_values(
        scale: Scale,
        period_starts: Vec<NaiveDateTime>,
        values: &[Vec<f64>],
    ) -> Result<Self> {
        if period_starts.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: period_starts.len(),
                right: values.len(),
            });
        }
        if period_starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "period starts are not strictly increasing".into(),
            ));
        }
        let width = scale.columns().len();
        for v in values {
            if v.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("dataset value"));
            }
        }
        let small = |x: f64| -> Result<u8> {
            if (0.0..=255.0).contains(&x) && libm::trunc(x) == x {
                Ok(x as u8)
            } else {
                Err(Error::InvalidConfig(alloc::format!(
                    "expected a small integer, got {x}"
                )))
            }
        };
        let rows = match scale {
            Scale::Hourly => Rows::Hourly(
                values
                    .iter()
                    .map(|v| {
                        Ok(HourlyRow {
                            kwh: v[0],
                            month: small(v[1])?,
                            temp_f: v[2],
                            humidity_pct: v[3],
                            hour_of_day: small(v[4])?,
                            day_of_week: small(v[5])?,
                            is_weekend: small(v[6])?,
                            is_holiday: small(v[7])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            Scale::Daily => Rows::Daily(
                values
                    .iter()
                    .map(|v| {
                        Ok(DailyRow {
                            kwh_total: v[0],
                            temp_max: v[1],
                            temp_min: v[2],
                            temp_avg: v[3],
                            hum_max: v[4],
                            hum_min: v[5],
                            hum_avg: v[6],
                            is_weekend: small(v[7])?,
                            is_holiday: small(v[8])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            Scale::Weekly => Rows::Weekly(
                values
                    .iter()
                    .map(|v| {
                        Ok(WeeklyRow {
                            kwh_total: v[0],
                            temp_max: v[1],
                            temp_min: v[2],
                            temp_avg: v[3],
                            hum_max: v[4],
                            hum_min: v[5],
                            hum_avg: v[6],
                            holiday_count: small(v[7])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            Scale::Monthly => Rows::Monthly(
                values
                    .iter()
                    .map(|v| {
                        Ok(MonthlyRow {
                            kwh_total: v[0],
                            temp_max: v[1],
                            temp_min: v[2],
                            temp_avg: v[3],
                            hum_max: v[4],
                            hum_min: v[5],
                            hum_avg: v[6],
                            weekend_day_count: small(v[7])?,
                            holiday_count: small(v[8])?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Self {
            period_starts,
            rows,
        })
    }
}

/// Sum, extrema and means over a block of hours.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Summary {
    kwh_total: f64,
    temp_max: f64,
    temp_min: f64,
    temp_avg: f64,
    hum_max: f64,
    hum_min: f64,
    hum_avg: f64,
}

fn summarize(hours: &[HourlyValues]) -> Summary {
    let n = hours.len() as f64;
    let mut s = Summary {
        kwh_total: 0.0,
        temp_max: f64::NEG_INFINITY,
        temp_min: f64::INFINITY,
        temp_avg: 0.0,
        hum_max: f64::NEG_INFINITY,
        hum_min: f64::INFINITY,
        hum_avg: 0.0,
    };
    for h in hours {
        s.kwh_total += h.kwh;
        s.temp_max = s.temp_max.max(h.temp_f);
        s.temp_min = s.temp_min.min(h.temp_f);
        s.temp_avg += h.temp_f;
        s.hum_max = s.hum_max.max(h.humidity_pct);
        s.hum_min = s.hum_min.min(h.humidity_pct);
        s.hum_avg += h.humidity_pct;
    }
    s.temp_avg /= n;
    s.hum_avg /= n;
    // Rounding in the mean can leave it a hair outside [min, max] when all
    // values are equal.
    s.temp_avg = s.temp_avg.clamp(s.temp_min, s.temp_max);
    s.hum_avg = s.hum_avg.clamp(s.hum_min, s.hum_max);
    s
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

pub fn build_hourly(series: &CleanHourlySeries, holidays: &HolidayCalendar) -> ScaleDataset {
    let mut starts = Vec::with_capacity(series.len());
    let mut rows = Vec::with_capacity(series.len());
    for (t, v) in series.iter() {
        let date = t.date();
        starts.push(t);
        rows.push(HourlyRow {
            kwh: v.kwh,
            month: date.month() as u8,
            temp_f: v.temp_f,
            humidity_pct: v.humidity_pct,
            hour_of_day: t.hour() as u8,
            day_of_week: day_of_week(date),
            is_weekend: flag(is_weekend(date)),
            is_holiday: flag(holidays.contains(date)),
        });
    }
    ScaleDataset {
        period_starts: starts,
        rows: Rows::Hourly(rows),
    }
}

fn require_midnight_start(series: &CleanHourlySeries) -> Result<()> {
    if series.start().hour() != 0 {
        return Err(Error::PartialPeriod("days"));
    }
    Ok(())
}

pub fn build_daily(series: &CleanHourlySeries, holidays: &HolidayCalendar) -> Result<ScaleDataset> {
    require_midnight_start(series)?;
    if series.len() % 24 != 0 {
        return Err(Error::PartialPeriod("days"));
    }
    let mut starts = Vec::with_capacity(series.len() / 24);
    let mut rows = Vec::with_capacity(series.len() / 24);
    for (d, day) in series.values().chunks_exact(24).enumerate() {
        let start = series.timestamp(d * 24);
        let date = start.date();
        let s = summarize(day);
        starts.push(start);
        rows.push(DailyRow {
            kwh_total: s.kwh_total,
            temp_max: s.temp_max,
            temp_min: s.temp_min,
            temp_avg: s.temp_avg,
            hum_max: s.hum_max,
            hum_min: s.hum_min,
            hum_avg: s.hum_avg,
            is_weekend: flag(is_weekend(date)),
            is_holiday: flag(holidays.contains(date)),
        });
    }
    Ok(ScaleDataset {
        period_starts: starts,
        rows: Rows::Daily(rows),
    })
}

pub fn build_weekly(
    series: &CleanHourlySeries,
    holidays: &HolidayCalendar,
) -> Result<ScaleDataset> {
    const WEEK: usize = 168;
    require_midnight_start(series)?;
    if series.len() < WEEK {
        return Err(Error::SeriesTooShort {
            hours: series.len(),
            needed: WEEK,
        });
    }
    let mut starts = Vec::new();
    let mut rows = Vec::new();
    for (w, week) in series.values().chunks_exact(WEEK).enumerate() {
        let start = series.timestamp(w * WEEK);
        let first = start.date();
        let s = summarize(week);
        starts.push(start);
        rows.push(WeeklyRow {
            kwh_total: s.kwh_total,
            temp_max: s.temp_max,
            temp_min: s.temp_min,
            temp_avg: s.temp_avg,
            hum_max: s.hum_max,
            hum_min: s.hum_min,
            hum_avg: s.hum_avg,
            holiday_count: holidays.count_between(first, first + Duration::days(6)) as u8,
        });
    }
    Ok(ScaleDataset {
        period_starts: starts,
        rows: Rows::Weekly(rows),
    })
}

fn first_of_next_month(date: NaiveDate) -> NaiveDate {
    let (y, m) = if date.month() == 12 {
        (date.year() + 1, 1)
    } else {
        (date.year(), date.month() + 1)
    };
    NaiveDate::from_ymd_opt(y, m, 1).unwrap()
}

pub fn build_monthly(
    series: &CleanHourlySeries,
    holidays: &HolidayCalendar,
) -> Result<ScaleDataset> {
    require_midnight_start(series)?;
    let start = series.start().date();
    if start.day() != 1 {
        return Err(Error::PartialPeriod("calendar months"));
    }
    let mut starts = Vec::new();
    let mut rows = Vec::new();
    let mut first = start;
    let mut offset = 0;
    while offset < series.len() {
        let next = first_of_next_month(first);
        let hours = (next - first).num_days() as usize * 24;
        if offset + hours > series.len() {
            return Err(Error::PartialPeriod("calendar months"));
        }
        let s = summarize(&series.values()[offset..offset + hours]);
        let last = next - Duration::days(1);
        let weekend_days = first
            .iter_days()
            .take_while(|d| *d < next)
            .filter(|d| is_weekend(*d))
            .count();
        starts.push(series.timestamp(offset));
        rows.push(MonthlyRow {
            kwh_total: s.kwh_total,
            temp_max: s.temp_max,
            temp_min: s.temp_min,
            temp_avg: s.temp_avg,
            hum_max: s.hum_max,
            hum_min: s.hum_min,
            hum_avg: s.hum_avg,
            weekend_day_count: weekend_days as u8,
            holiday_count: holidays.count_between(first, last) as u8,
        });
        offset += hours;
        first = next;
    }
    Ok(ScaleDataset {
        period_starts: starts,
        rows: Rows::Monthly(rows),
    })
}

pub fn build(
    scale: Scale,
    series: &CleanHourlySeries,
    holidays: &HolidayCalendar,
) -> Result<ScaleDataset> {
    match scale {
        Scale::Hourly => Ok(build_hourly(series, holidays)),
        Scale::Daily => build_daily(series, holidays),
        Scale::Weekly => build_weekly(series, holidays),
        Scale::Monthly => build_monthly(series, holidays),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn series(
        start: NaiveDateTime,
        hours: usize,
        f: impl Fn(usize) -> HourlyValues,
    ) -> CleanHourlySeries {
        CleanHourlySeries::new(start, (0..hours).map(f).collect()).unwrap()
    }

    fn ymd_h(y: i32, m: u32, d: u32, h: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(h, 0, 0)
            .unwrap()
    }

    fn constant(_: usize) -> HourlyValues {
        HourlyValues {
            kwh: 1.0,
            temp_f: 70.0,
            humidity_pct: 50.0,
        }
    }

    #[test]
    fn column_counts() {
        let widths: Vec<usize> = Scale::ALL.iter().map(|s| s.columns().len()).collect();
        assert_eq!(widths, vec![8, 9, 8, 9]);
    }

    #[test]
    fn scale_parse() {
        assert_eq!("Weekly".parse::<Scale>().unwrap(), Scale::Weekly);
        assert!("yearly".parse::<Scale>().is_err());
    }

    #[test]
    fn hourly_rows_and_holiday_flag() {
        let s = series(ymd_h(2016, 7, 3, 0), 48, constant);
        let cal: HolidayCalendar = [NaiveDate::from_ymd_opt(2016, 7, 4).unwrap()]
            .into_iter()
            .collect();
        let ds = build_hourly(&s, &cal);
        assert_eq!(ds.len(), 48);
        assert_eq!(ds.values(0).len(), 8);
        let Rows::Hourly(rows) = ds.rows() else {
            unreachable!()
        };
        assert_eq!(rows[34].is_holiday, 1);
        assert_eq!(rows[34].hour_of_day, 10);
        assert_eq!(rows[10].is_holiday, 0);
        assert_eq!(rows[10].is_weekend, 1);
        assert_eq!(rows[10].day_of_week, 7);
        assert_eq!(rows[34].day_of_week, 1);
    }

    #[test]
    fn daily_constant_total() {
        let s = series(ymd_h(2016, 1, 1, 0), 72, constant);
        let ds = build_daily(&s, &HolidayCalendar::new()).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.kwh(0), 24.0);
        assert_eq!(ds.values(1)[3], 70.0);
    }

    #[test]
    fn daily_rejects_partial_days() {
        let s = series(ymd_h(2016, 1, 1, 0), 30, constant);
        assert_eq!(
            build_daily(&s, &HolidayCalendar::new()),
            Err(Error::PartialPeriod("days"))
        );
        let s = series(ymd_h(2016, 1, 1, 1), 24, constant);
        assert!(build_daily(&s, &HolidayCalendar::new()).is_err());
    }

    #[test]
    fn weekly_truncates_and_counts_holidays() {
        let s = series(ymd_h(2016, 1, 1, 0), 16 * 24, constant);
        let ds = build_weekly(&s, &crate::calendar::texas_2016_2017()).unwrap();
        assert_eq!(ds.len(), 2);
        let Rows::Weekly(rows) = ds.rows() else {
            unreachable!()
        };
        assert_eq!(rows[0].holiday_count, 1);
        assert_eq!(rows[1].holiday_count, 0);
        let short = series(ymd_h(2016, 1, 1, 0), 100, constant);
        assert!(matches!(
            build_weekly(&short, &HolidayCalendar::new()),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn monthly_weekend_days() {
        let s = series(ymd_h(2016, 1, 1, 0), (31 + 29) * 24, constant);
        let ds = build_monthly(&s, &HolidayCalendar::new()).unwrap();
        assert_eq!(ds.len(), 2);
        let Rows::Monthly(rows) = ds.rows() else {
            unreachable!()
        };
        assert_eq!(rows[0].weekend_day_count, 10);
        assert_eq!(rows[1].weekend_day_count, 8);
        assert_eq!(rows[1].kwh_total, 29.0 * 24.0);
    }

    #[test]
    fn monthly_rejects_partial_months() {
        let s = series(ymd_h(2016, 1, 2, 0), 31 * 24, constant);
        assert!(build_monthly(&s, &HolidayCalendar::new()).is_err());
        let s = series(ymd_h(2016, 1, 1, 0), 40 * 24, constant);
        assert!(build_monthly(&s, &HolidayCalendar::new()).is_err());
    }

    #[test]
    fn values_round_trip() {
        let s = series(ymd_h(2016, 1, 1, 0), 60 * 24, |i| HourlyValues {
            kwh: i as f64 * 0.01,
            temp_f: 50.0 + (i % 24) as f64,
            humidity_pct: 30.0 + (i % 7) as f64,
        });
        let cal = crate::calendar::texas_2016_2017();
        for scale in Scale::ALL {
            let ds = build(scale, &s, &cal).unwrap();
            let values: Vec<Vec<f64>> = (0..ds.len()).map(|i| ds.values(i)).collect();
            let back =
                ScaleDataset::from_values(scale, ds.period_starts().to_vec(), &values).unwrap();
            assert_eq!(back, ds);
        }
    }
}
