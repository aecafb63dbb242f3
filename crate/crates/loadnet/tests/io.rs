use std::path::Path;

use chrono::NaiveDate;
use loadnet::io;
use loadnet::Error;
use loadnet_core::aggregate::{build, Scale};
use loadnet_core::calendar::{texas_2016_2017, HourRange};
use loadnet_core::synth::{generate, SynthConfig};

fn range(first: (u32, u32), last: (u32, u32)) -> HourRange {
    HourRange::days(
        NaiveDate::from_ymd_opt(2016, first.0, first.1).unwrap(),
        NaiveDate::from_ymd_opt(2016, last.0, last.1).unwrap(),
    )
    .unwrap()
}

#[test]
fn full_two_year_range_expects_17544_hours() {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(&SynthConfig::default());
    let c = dir.path().join("c.csv");
    let w = dir.path().join("w.csv");
    io::write_text(&c, &out.consumption_csv).unwrap();
    io::write_text(&w, &out.weather_csv).unwrap();
    let (records, report, r) = io::parse_hourly_files(&c, &w, None).unwrap();
    assert_eq!(r.hour_count(), 17_544);
    assert_eq!(report.expected_count, 17_544);
    assert_eq!(report.actual_count, records.len());
}

#[test]
fn empty_files_are_one_block_gap() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.csv");
    let w = dir.path().join("w.csv");
    io::write_text(&c, "timestamp,kwh\n").unwrap();
    io::write_text(&w, "").unwrap();
    let r = range((1, 1), (1, 2));
    let (records, report, _) = io::parse_hourly_files(&c, &w, Some(r)).unwrap();
    assert!(records.is_empty());
    assert_eq!(report.block_gaps, vec![(r.start(), r.end())]);
    assert!(report.point_gaps.is_empty());
}

#[test]
fn repeated_row_is_a_duplicate_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.csv");
    let w = dir.path().join("w.csv");
    io::write_text(
        &c,
        "timestamp,kwh\n2016-01-01T00:00,1\n2016-01-01T00:00,1\n",
    )
    .unwrap();
    io::write_text(&w, "timestamp,temp_f,humidity_pct\n").unwrap();
    let err = io::parse_hourly_files(&c, &w, Some(range((1, 1), (1, 1)))).unwrap_err();
    assert!(
        matches!(
            err,
            Error::Core(loadnet_core::Error::DuplicateTimestamp { .. })
        ),
        "{err}"
    );
}

#[test]
fn malformed_rows_name_their_line() {
    let text = "timestamp,temp_f,humidity_pct\n2016-01-01T00:00,70,50\n2016-01-01T01:15,70,50\n";
    let err = io::parse_weather(text, Path::new("w.csv")).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    assert!(err.to_string().starts_with("w.csv:3:"));
}

#[test]
fn series_and_dataset_files_round_trip_exactly() {
    let config = SynthConfig {
        range: range((1, 1), (3, 31)),
        ..SynthConfig::default()
    };
    let truth = generate(&config).truth;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clean.csv");
    io::write_series(&path, &truth).unwrap();
    assert_eq!(io::read_series(&path).unwrap(), truth);

    for scale in Scale::ALL {
        let ds = build(scale, &truth, &texas_2016_2017()).unwrap();
        let path = dir.path().join(format!("{scale}.csv"));
        io::write_dataset(&path, &ds).unwrap();
        let text = io::read_text(&path).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        assert_eq!(&header[1..], scale.columns());
        assert_eq!(io::read_dataset(&path).unwrap(), ds);
    }
}

#[test]
fn holiday_file_errors_carry_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    io::write_text(&path, "# holidays\n2016-01-01\nnot-a-date\n").unwrap();
    let err = io::read_holidays(&path).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
}
