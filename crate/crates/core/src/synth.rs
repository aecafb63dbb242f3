//! Seeded synthetic smart-meter data with known ground truth.
//!
//! Hourly load is a linear function of temperature, weekend and holiday
//! flags, a diurnal profile and a seasonal term, plus Gaussian noise:
//!
//! ```text
//! kwh(t) = base + temp_coeff·temp(t) + weekend_coeff·weekend(t)
//!        + holiday_coeff·holiday(t) + daily_amplitude·diurnal(t)
//!        + seasonal_amplitude·seasonal(t) + N(0, noise_sd²),   clamped ≥ 0
//! ```
//!
//! Temperature combines a seasonal cycle, a diurnal cycle peaking at 15:00,
//! a day-level AR(1) weather anomaly and hourly jitter. Humidity runs
//! opposite to the diurnal temperature cycle with its own anomaly and is
//! kept in `[5, 100]`.
//!
//! After the truth is generated, hours are dropped from one or both files
//! at `gap_rate`, `outage_count` multi-hour outages are cut from both files,
//! and weather fields are overwritten with the `-999.99` sentinel at
//! `sentinel_rate`.

use alloc::string::String;
use alloc::vec::Vec;
use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike};
use core::f64::consts::TAU;
use core::fmt::Write;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calendar::{is_weekend, texas_2016_2017, HolidayCalendar, HourRange};
use crate::ingest::{CleanHourlySeries, Field, HourlyValues, SENTINEL};
use crate::rng::{seeded, standard_normal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherConfig {
    pub temp_mean: f64,
    pub temp_seasonal_amplitude: f64,
    pub temp_diurnal_amplitude: f64,
    /// Standard deviation of the day-level temperature anomaly, °F.
    pub temp_anomaly_sd: f64,
    /// Day-to-day persistence of the anomaly, in `[0, 1)`.
    pub anomaly_persistence: f64,
    /// Hour-level temperature noise, °F.
    pub temp_jitter_sd: f64,
    pub humidity_mean: f64,
    pub humidity_diurnal_amplitude: f64,
    pub humidity_anomaly_sd: f64,
}

impl Default for WeatherConfig {
    fn default() -> Self {
        Self {
            temp_mean: 70.0,
            temp_seasonal_amplitude: 18.0,
            temp_diurnal_amplitude: 9.0,
            temp_anomaly_sd: 6.0,
            anomaly_persistence: 0.6,
            temp_jitter_sd: 3.0,
            humidity_mean: 62.0,
            humidity_diurnal_amplitude: 15.0,
            humidity_anomaly_sd: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub range: HourRange,
    pub base_kwh: f64,
    /// kWh per °F per hour.
    pub temp_coeff: f64,
    pub weekend_coeff: f64,
    pub holiday_coeff: f64,
    pub daily_amplitude: f64,
    pub seasonal_amplitude: f64,
    pub noise_sd: f64,
    pub seed: u64,
    /// Probability that any given hour is dropped from the files.
    pub gap_rate: f64,
    /// Probability that a present hour has one weather field replaced by
    /// the sentinel.
    pub sentinel_rate: f64,
    pub outage_count: usize,
    pub outage_hours: usize,
    pub weather: WeatherConfig,
    pub holidays: HolidayCalendar,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            range: HourRange::days(
                NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(2017, 12, 31).unwrap(),
            )
            .unwrap(),
            base_kwh: 0.2,
            temp_coeff: 0.02,
            weekend_coeff: 0.3,
            holiday_coeff: 0.4,
            daily_amplitude: 0.3,
            seasonal_amplitude: 0.1,
            noise_sd: 0.05,
            seed: 0,
            gap_rate: 0.005,
            sentinel_rate: 0.002,
            outage_count: 0,
            outage_hours: 6,
            weather: WeatherConfig::default(),
            holidays: texas_2016_2017(),
        }
    }
}

impl SynthConfig {
    /// No noise and no corruption.
    pub fn clean(self) -> Self {
        Self {
            noise_sd: 0.0,
            gap_rate: 0.0,
            sentinel_rate: 0.0,
            outage_count: 0,
            ..self
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let bad = |msg: &str| Err(crate::Error::InvalidConfig(msg.into()));
        if self.noise_sd.is_nan() || self.noise_sd < 0.0 {
            return bad("noise_sd must be non-negative");
        }
        for rate in [self.gap_rate, self.sentinel_rate] {
            if !(0.0..1.0).contains(&rate) {
                return bad("rates must lie in [0, 1)");
            }
        }
        if !(0.0..1.0).contains(&self.weather.anomaly_persistence) {
            return bad("anomaly_persistence must lie in [0, 1)");
        }
        if self.outage_count > 0 && self.outage_hours < 2 {
            return bad("outages must last at least 2 hours");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Consumption,
    Weather,
    Both,
}

/// What the generator corrupted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionLog {
    pub dropped: Vec<(NaiveDateTime, Source)>,
    pub sentinels: Vec<(NaiveDateTime, Field)>,
}

impl InjectionLog {
    /// Hours absent from at least one file, sorted.
    pub fn missing_hours(&self) -> Vec<NaiveDateTime> {
        self.dropped.iter().map(|d| d.0).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub consumption_csv: String,
    pub weather_csv: String,
    pub holidays_txt: String,
    pub truth: CleanHourlySeries,
    pub log: InjectionLog,
}

/// `YYYY-MM-DDTHH:00`.
pub fn format_hour(t: NaiveDateTime) -> String {
    let mut s = String::with_capacity(16);
    let _ = write!(
        s,
        "{:04}-{:02}-{:02}T{:02}:00",
        t.year(),
        t.month(),
        t.day(),
        t.hour()
    );
    s
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = libm::pow(10.0, decimals.into());
    libm::round(x * f) / f
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = seeded(seed);
    rng.set_stream(id);
    rng
}

fn day_of_year_phase(t: NaiveDateTime, peak_day: f64) -> f64 {
    let doy = f64::from(t.ordinal0()) + f64::from(t.hour()) / 24.0;
    libm::cos(TAU * (doy - peak_day) / 365.25)
}

fn hour_phase(t: NaiveDateTime, peak_hour: f64) -> f64 {
    libm::cos(TAU * (f64::from(t.hour()) - peak_hour) / 24.0)
}

pub fn generate(config: &SynthConfig) -> SynthOutput {
    let w = &config.weather;
    let range = config.range;
    let n = range.hour_count();

    let mut weather_rng = stream(config.seed, 1);
    let mut load_rng = stream(config.seed, 2);
    let mut corrupt_rng = stream(config.seed, 3);

    let innovation = libm::sqrt(1.0 - w.anomaly_persistence * w.anomaly_persistence);
    let mut temp_anomaly = 0.0;
    let mut hum_anomaly = 0.0;
    let mut current_day = None;

    let mut values = Vec::with_capacity(n);
    for t in range.hours() {
        if current_day != Some(t.date()) {
            current_day = Some(t.date());
            temp_anomaly = w.anomaly_persistence * temp_anomaly
                + innovation * w.temp_anomaly_sd * standard_normal(&mut weather_rng);
            hum_anomaly = w.anomaly_persistence * hum_anomaly
                + innovation * w.humidity_anomaly_sd * standard_normal(&mut weather_rng);
        }
        // coldest mid-January, hottest mid-July
        let temp = w.temp_mean - w.temp_seasonal_amplitude * day_of_year_phase(t, 15.0)
            + w.temp_diurnal_amplitude * hour_phase(t, 15.0)
            + temp_anomaly
            + w.temp_jitter_sd * standard_normal(&mut weather_rng);
        let humidity = (w.humidity_mean - w.humidity_diurnal_amplitude * hour_phase(t, 15.0)
            + hum_anomaly
            + 2.0 * standard_normal(&mut weather_rng))
        .clamp(5.0, 100.0);

        let date = t.date();
        let kwh = config.base_kwh
            + config.temp_coeff * temp
            + config.weekend_coeff * f64::from(u8::from(is_weekend(date)))
            + config.holiday_coeff * f64::from(u8::from(config.holidays.contains(date)))
            + config.daily_amplitude * hour_phase(t, 19.0)
            + config.seasonal_amplitude * day_of_year_phase(t, 15.0)
            + config.noise_sd * standard_normal(&mut load_rng);

        values.push(HourlyValues {
            kwh: round_to(kwh.max(0.0), 4),
            temp_f: round_to(temp, 2),
            humidity_pct: round_to(humidity, 2),
        });
    }

    let mut dropped: Vec<Option<Source>> = alloc::vec![None; n];
    for slot in dropped.iter_mut() {
        if corrupt_rng.gen_bool(config.gap_rate) {
            *slot = Some(match corrupt_rng.gen_range(0..3) {
                0 => Source::Consumption,
                1 => Source::Weather,
                _ => Source::Both,
            });
        }
    }
    // Outages keep two clear days at each end so the same-hour fill has data.
    let margin = 48;
    if config.outage_count > 0 && n > 2 * margin + config.outage_hours {
        for _ in 0..config.outage_count {
            let start = corrupt_rng.gen_range(margin..n - margin - config.outage_hours);
            for slot in &mut dropped[start..start + config.outage_hours] {
                *slot = Some(Source::Both);
            }
        }
    }

    let mut log = InjectionLog::default();
    let mut consumption_csv = String::from("timestamp,kwh\n");
    let mut weather_csv = String::from("timestamp,temp_f,humidity_pct\n");
    for (i, v) in values.iter().enumerate() {
        let t = range.hour(i);
        let stamp = format_hour(t);
        if let Some(source) = dropped[i] {
            log.dropped.push((t, source));
        }
        if !matches!(dropped[i], Some(Source::Consumption | Source::Both)) {
            let _ = writeln!(consumption_csv, "{stamp},{}", v.kwh);
        }
        if !matches!(dropped[i], Some(Source::Weather | Source::Both)) {
            let (mut temp, mut hum) = (v.temp_f, v.humidity_pct);
            if dropped[i].is_none() && corrupt_rng.gen_bool(config.sentinel_rate) {
                if corrupt_rng.gen_bool(0.5) {
                    temp = SENTINEL;
                    log.sentinels.push((t, Field::TempF));
                } else {
                    hum = SENTINEL;
                    log.sentinels.push((t, Field::HumidityPct));
                }
            }
            let _ = writeln!(weather_csv, "{stamp},{temp},{hum}");
        }
    }

    SynthOutput {
        consumption_csv,
        weather_csv,
        holidays_txt: config.holidays.to_text(),
        truth: CleanHourlySeries::new(range.start(), values).expect("generated values are valid"),
        log,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> SynthConfig {
        SynthConfig {
            range: HourRange::days(
                NaiveDate::from_ymd_opt(2016, 6, 1).unwrap(),
                NaiveDate::from_ymd_opt(2016, 6, 30).unwrap(),
            )
            .unwrap(),
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&short()), generate(&short()));
        let other = SynthConfig { seed: 1, ..short() };
        assert_ne!(generate(&short()).truth, generate(&other).truth);
    }

    #[test]
    fn file_layout() {
        let out = generate(&short().clean());
        let lines: Vec<&str> = out.consumption_csv.lines().collect();
        assert_eq!(lines.len(), 1 + 30 * 24);
        assert_eq!(lines[0], "timestamp,kwh");
        assert!(lines[1].starts_with("2016-06-01T00:00,"));
        assert!(out
            .weather_csv
            .starts_with("timestamp,temp_f,humidity_pct\n"));
        assert!(out.log.dropped.is_empty() && out.log.sentinels.is_empty());
    }

    #[test]
    fn outages_are_logged() {
        let cfg = SynthConfig {
            outage_count: 1,
            outage_hours: 5,
            gap_rate: 0.0,
            ..short()
        };
        let out = generate(&cfg);
        assert_eq!(out.log.dropped.len(), 5);
        assert!(out.log.dropped.iter().all(|d| d.1 == Source::Both));
        assert_eq!(out.consumption_csv.lines().count(), 1 + 30 * 24 - 5);
    }

    #[test]
    fn config_validation() {
        assert!(SynthConfig::default().validate().is_ok());
        assert!(SynthConfig {
            gap_rate: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SynthConfig {
            noise_sd: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn hour_format() {
        let t = NaiveDate::from_ymd_opt(2016, 7, 4)
            .unwrap()
            .and_hms_opt(9, 0, 0)
            .unwrap();
        assert_eq!(format_hour(t), "2016-07-04T09:00");
    }
}
