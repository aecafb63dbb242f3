use chrono::{Datelike, Duration, NaiveDate, Weekday};
use loadnet_core::aggregate::{build, build_hourly, Scale, ScaleDataset};
use loadnet_core::calendar::{texas_2016_2017, HolidayCalendar, HourRange};
use loadnet_core::ingest::CleanHourlySeries;
use loadnet_core::synth::{generate, SynthConfig};

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn series(first: NaiveDate, last: NaiveDate) -> CleanHourlySeries {
    let config = SynthConfig {
        range: HourRange::days(first, last).unwrap(),
        ..SynthConfig::default()
    };
    generate(&config).truth
}

fn two_years() -> CleanHourlySeries {
    series(day(2016, 1, 1), day(2017, 12, 31))
}

/// Independent scan over a block of hours: total, max, min, mean for
/// temperature then humidity.
fn scan(s: &CleanHourlySeries, from: usize, to: usize) -> [f64; 7] {
    let hours = &s.values()[from..to];
    let temps: Vec<f64> = hours.iter().map(|h| h.temp_f).collect();
    let hums: Vec<f64> = hours.iter().map(|h| h.humidity_pct).collect();
    let max = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::MAX, f64::min);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    [
        hours.iter().map(|h| h.kwh).sum(),
        max(&temps),
        min(&temps),
        mean(&temps),
        max(&hums),
        min(&hums),
        mean(&hums),
    ]
}

fn assert_close(got: &[f64], want: &[f64], what: &str) {
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        assert!(
            (g - w).abs() <= 1e-9 * w.abs().max(1.0),
            "{what} column {k}: {g} vs {w}"
        );
    }
}

fn weekend_days(first: NaiveDate, last: NaiveDate) -> f64 {
    first
        .iter_days()
        .take_while(|d| *d <= last)
        .filter(|d| matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .count() as f64
}

fn holidays_between(h: &HolidayCalendar, first: NaiveDate, last: NaiveDate) -> f64 {
    h.iter().filter(|d| *d >= first && *d <= last).count() as f64
}

#[test]
fn daily_rows_equal_scan_oracle() {
    let s = two_years();
    let h = texas_2016_2017();
    let ds = build(Scale::Daily, &s, &h).unwrap();
    assert_eq!(ds.len(), 731);
    for i in 0..ds.len() {
        let v = ds.values(i);
        assert_close(&v[..7], &scan(&s, i * 24, i * 24 + 24), "daily");
        let date = ds.period_starts()[i].date();
        assert_eq!(v[7], weekend_days(date, date));
        assert_eq!(v[8], holidays_between(&h, date, date));
    }
}

#[test]
fn weekly_rows_equal_scan_oracle() {
    let s = two_years();
    let h = texas_2016_2017();
    let ds = build(Scale::Weekly, &s, &h).unwrap();
    assert_eq!(ds.len(), 104);
    for w in 0..ds.len() {
        let v = ds.values(w);
        assert_close(&v[..7], &scan(&s, w * 168, w * 168 + 168), "weekly");
        let first = s.timestamp(w * 168).date();
        assert_eq!(v[7], holidays_between(&h, first, first + Duration::days(6)));
    }
}

#[test]
fn monthly_rows_equal_scan_oracle() {
    let s = two_years();
    let h = texas_2016_2017();
    let ds = build(Scale::Monthly, &s, &h).unwrap();
    assert_eq!(ds.len(), 24);
    let mut offset = 0;
    for (m, start) in ds.period_starts().iter().enumerate() {
        let first = start.date();
        let next = if first.month() == 12 {
            day(first.year() + 1, 1, 1)
        } else {
            day(first.year(), first.month() + 1, 1)
        };
        let hours = (next - first).num_days() as usize * 24;
        let v = ds.values(m);
        assert_close(&v[..7], &scan(&s, offset, offset + hours), "monthly");
        let last = next.pred_opt().unwrap();
        assert_eq!(v[7], weekend_days(first, last));
        assert!((8.0..=10.0).contains(&v[7]));
        assert_eq!(v[8], holidays_between(&h, first, last));
        offset += hours;
    }
    // January 2016 starts on a Friday: five Saturdays and five Sundays.
    assert_eq!(ds.values(0)[7], 10.0);
}

#[test]
fn totals_are_conserved_across_scales() {
    let s = two_years();
    let h = texas_2016_2017();
    let hourly: f64 = s.values().iter().map(|v| v.kwh).sum();
    for scale in [Scale::Hourly, Scale::Daily, Scale::Monthly] {
        let total = build(scale, &s, &h).unwrap().total_kwh();
        assert!(
            (total - hourly).abs() <= 1e-9 * hourly,
            "{scale}: {total} vs {hourly}"
        );
    }
    // weekly drops the trailing partial week
    let weekly = build(Scale::Weekly, &s, &h).unwrap().total_kwh();
    let covered: f64 = s.values()[..104 * 168].iter().map(|v| v.kwh).sum();
    assert!((weekly - covered).abs() <= 1e-9 * covered);
}

#[test]
fn hourly_categoricals_stay_in_range() {
    let s = series(day(2016, 7, 1), day(2016, 7, 7));
    let h: HolidayCalendar = [day(2016, 7, 4)].into_iter().collect();
    let ds = build_hourly(&s, &h);
    assert_eq!(ds.columns().len(), 8);
    for i in 0..ds.len() {
        let v = ds.values(i);
        let t = ds.period_starts()[i];
        assert_eq!(v[1], 7.0);
        assert!((0.0..=23.0).contains(&v[4]));
        assert!((1.0..=7.0).contains(&v[5]));
        assert_eq!(v[7], f64::from(u8::from(t.date() == day(2016, 7, 4))));
    }
}

#[test]
fn schema_widths() {
    assert_eq!(Scale::ALL.map(|s| s.columns().len()), [8, 9, 8, 9]);
}

#[test]
fn a_730_day_span_gives_730_days_and_104_weeks() {
    let s = series(day(2016, 1, 1), day(2017, 12, 30));
    let h = texas_2016_2017();
    assert_eq!(s.len(), 17_520);
    assert_eq!(build(Scale::Daily, &s, &h).unwrap().len(), 730);
    assert_eq!(build(Scale::Weekly, &s, &h).unwrap().len(), 104);
}

#[test]
fn csv_values_rebuild_the_dataset() {
    let s = series(day(2016, 1, 1), day(2016, 3, 31));
    let h = texas_2016_2017();
    for scale in Scale::ALL {
        let ds = build(scale, &s, &h).unwrap();
        let values: Vec<Vec<f64>> = (0..ds.len()).map(|i| ds.values(i)).collect();
        let back = ScaleDataset::from_values(scale, ds.period_starts().to_vec(), &values).unwrap();
        assert_eq!(back, ds);
    }
}
