use chrono::NaiveDateTime;
use loadnet_core::calendar::HourRange;
use loadnet_core::ingest::{
    clean, continuity_report, merge_sources, ConsumptionRow, Field, WeatherRow,
};
use loadnet_core::synth::{generate, Source, SynthConfig};

fn stamp(s: &str) -> NaiveDateTime {
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M").unwrap()
}

fn cell(s: &str) -> Option<f64> {
    (!s.is_empty()).then(|| s.parse().unwrap())
}

/// Minimal reader for the generator's two CSV layouts.
fn parse(consumption: &str, weather: &str) -> (Vec<ConsumptionRow>, Vec<WeatherRow>) {
    let body = |text: &str| -> Vec<Vec<String>> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').map(String::from).collect())
            .collect()
    };
    let c = body(consumption)
        .iter()
        .map(|r| ConsumptionRow {
            timestamp: stamp(&r[0]),
            kwh: cell(&r[1]),
        })
        .collect();
    let w = body(weather)
        .iter()
        .map(|r| WeatherRow {
            timestamp: stamp(&r[0]),
            temp_f: cell(&r[1]),
            humidity_pct: cell(&r[2]),
        })
        .collect();
    (c, w)
}

#[test]
fn clean_config_files_reproduce_the_truth() {
    let config = SynthConfig::default().clean();
    let out = generate(&config);
    assert_eq!(out.truth.len(), 17_544);
    assert!(out.log.dropped.is_empty() && out.log.sentinels.is_empty());
    let (c, w) = parse(&out.consumption_csv, &out.weather_csv);
    let (series, report) = clean(&c, &w, config.range).unwrap();
    assert!(report.is_clean());
    assert_eq!(report.expected_count, 17_544);
    assert_eq!(series, out.truth);
}

#[test]
fn gap_counts_follow_the_binomial_law() {
    let (n, p) = (17_544.0, 0.01);
    let mean = n * p;
    let sd = (n * p * (1.0f64 - p)).sqrt();
    for seed in 0..5 {
        let config = SynthConfig {
            gap_rate: p,
            sentinel_rate: 0.0,
            seed,
            ..SynthConfig::default()
        };
        let gaps = generate(&config).log.dropped.len() as f64;
        assert!(
            (gaps - mean).abs() <= 3.0 * sd,
            "seed {seed}: {gaps} gaps, expected {mean} ± {}",
            3.0 * sd
        );
    }
}

#[test]
fn report_matches_the_injection_log() {
    let config = SynthConfig {
        gap_rate: 0.01,
        sentinel_rate: 0.005,
        outage_count: 3,
        seed: 9,
        ..SynthConfig::default()
    };
    let out = generate(&config);
    let (c, w) = parse(&out.consumption_csv, &out.weather_csv);
    let (_, report) = clean(&c, &w, config.range).unwrap();
    assert_eq!(report.missing_hours(), out.log.missing_hours());
    let mut hits = report.sentinel_hits.clone();
    hits.sort();
    let mut logged = out.log.sentinels.clone();
    logged.sort();
    assert_eq!(hits, logged);
    assert!(out.log.dropped.iter().any(|d| d.1 == Source::Both));
}

#[test]
fn point_repair_error_is_bounded_by_local_variation() {
    let config = SynthConfig {
        noise_sd: 0.0,
        gap_rate: 0.01,
        sentinel_rate: 0.0,
        seed: 4,
        ..SynthConfig::default()
    };
    let out = generate(&config);
    let (c, w) = parse(&out.consumption_csv, &out.weather_csv);
    let (series, report) = clean(&c, &w, config.range).unwrap();
    let range: HourRange = config.range;
    assert!(!report.point_gaps.is_empty());

    let truth = out.truth.values();
    let (mut err_sum, mut tv_sum) = (0.0, 0.0);
    for t in &report.point_gaps {
        let i = range.index_of(*t).unwrap();
        if i < 2 || i + 2 >= truth.len() {
            continue;
        }
        let window: Vec<f64> = truth[i - 2..=i + 2].iter().map(|v| v.kwh).collect();
        let tv: f64 = window.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
        let err = (series.values()[i].kwh - truth[i].kwh).abs();
        assert!(
            err <= tv + 1e-12,
            "hour {t}: error {err} above variation {tv}"
        );
        err_sum += err;
        tv_sum += tv;
    }
    assert!(err_sum < tv_sum);
}

#[test]
fn sentinel_fields_are_only_weather() {
    let config = SynthConfig {
        sentinel_rate: 0.05,
        ..SynthConfig::default()
    };
    let out = generate(&config);
    let (c, w) = parse(&out.consumption_csv, &out.weather_csv);
    let (records, report) = merge_sources(&c, &w, config.range).unwrap();
    assert_eq!(report, continuity_report(&records, config.range));
    assert!(out.log.sentinels.iter().all(|s| s.1 != Field::Kwh));
    assert!(!out.log.sentinels.is_empty());
}
