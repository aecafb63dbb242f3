//! Calendar helpers: weekends, holiday sets and hour ranges.
//!
//! Timestamps are naive local time. Every day has 24 hours; there is no
//! daylight-saving adjustment.

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;
use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub fn is_weekend(date: NaiveDate) -> bool {
    matches!(date.weekday(), Weekday::Sat | Weekday::Sun)
}

/// 1 = Monday .. 7 = Sunday.
pub fn day_of_week(date: NaiveDate) -> u8 {
    date.weekday().number_from_monday() as u8
}

pub fn is_whole_hour(t: NaiveDateTime) -> bool {
    t.minute() == 0 && t.second() == 0 && t.nanosecond() == 0
}

/// Half-open span `[start, end)` of whole hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HourRange {
    start: NaiveDateTime,
    end: NaiveDateTime,
}

impl HourRange {
    pub fn new(start: NaiveDateTime, end: NaiveDateTime) -> Result<Self> {
        for t in [start, end] {
            if !is_whole_hour(t) {
                return Err(Error::UnalignedTimestamp(t));
            }
        }
        if end < start {
            return Err(Error::InvertedRange { start, end });
        }
        Ok(Self { start, end })
    }

    /// `[first 00:00, last + 1 day 00:00)`.
    pub fn days(first: NaiveDate, last_inclusive: NaiveDate) -> Result<Self> {
        Self::new(
            first.and_hms_opt(0, 0, 0).unwrap(),
            (last_inclusive + Duration::days(1))
                .and_hms_opt(0, 0, 0)
                .unwrap(),
        )
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn end(&self) -> NaiveDateTime {
        self.end
    }

    pub fn hour_count(&self) -> usize {
        (self.end - self.start).num_hours() as usize
    }

    pub fn contains(&self, t: NaiveDateTime) -> bool {
        self.start <= t && t < self.end
    }

    /// Position of `t` counted in hours from `start`, if inside the range.
    pub fn index_of(&self, t: NaiveDateTime) -> Option<usize> {
        if self.contains(t) && is_whole_hour(t) {
            Some((t - self.start).num_hours() as usize)
        } else {
            None
        }
    }

    pub fn hour(&self, index: usize) -> NaiveDateTime {
        self.start + Duration::hours(index as i64)
    }

    pub fn hours(&self) -> impl Iterator<Item = NaiveDateTime> + '_ {
        (0..self.hour_count()).map(move |i| self.hour(i))
    }
}

/// Number of hours in `[start, end)`.
pub fn expected_hour_count(start: NaiveDateTime, end: NaiveDateTime) -> Result<usize> {
    HourRange::new(start, end).map(|r| r.hour_count())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolidayCalendar {
    dates: BTreeSet<NaiveDate>,
}

impl HolidayCalendar {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses one ISO date (`YYYY-MM-DD`) per line. Blank lines and
    /// anything after `#` are ignored; duplicates collapse.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dates = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let date = NaiveDate::parse_from_str(content, "%Y-%m-%d").map_err(|_| {
                Error::MalformedDate {
                    line: i + 1,
                    text: content.to_string(),
                }
            })?;
            dates.insert(date);
        }
        Ok(Self { dates })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.dates.contains(&date)
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.dates.iter().copied()
    }

    /// Holidays in `[first, last]`.
    pub fn count_between(&self, first: NaiveDate, last: NaiveDate) -> usize {
        self.dates.range(first..=last).count()
    }

    /// Dates that fall outside `range`; callers report these as warnings.
    pub fn outside(&self, range: &HourRange) -> Vec<NaiveDate> {
        self.iter()
            .filter(|d| {
                let midnight = d.and_hms_opt(0, 0, 0).unwrap();
                midnight + Duration::hours(23) < range.start() || midnight >= range.end()
            })
            .collect()
    }

    /// One date per line, sorted.
    pub fn to_text(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut out = alloc::string::String::new();
        for d in self.iter() {
            let _ = writeln!(out, "{d}");
        }
        out
    }
}

impl FromIterator<NaiveDate> for HolidayCalendar {
    fn from_iter<I: IntoIterator<Item = NaiveDate>>(iter: I) -> Self {
        Self {
            dates: iter.into_iter().collect(),
        }
    }
}

/// Texas state and federal holidays observed in 2016 and 2017.
pub const TEXAS_2016_2017: &[(i32, u32, u32)] = &[
    (2016, 1, 1),
    (2016, 1, 18),
    (2016, 2, 15),
    (2016, 3, 2),
    (2016, 4, 21),
    (2016, 5, 30),
    (2016, 7, 4),
    (2016, 9, 5),
    (2016, 11, 11),
    (2016, 11, 24),
    (2016, 11, 25),
    (2016, 12, 23),
    (2016, 12, 26),
    (2017, 1, 2),
    (2017, 1, 16),
    (2017, 2, 20),
    (2017, 3, 2),
    (2017, 4, 21),
    (2017, 5, 29),
    (2017, 7, 4),
    (2017, 9, 4),
    (2017, 11, 10),
    (2017, 11, 23),
    (2017, 11, 24),
    (2017, 12, 25),
    (2017, 12, 26),
];

pub fn texas_2016_2017() -> HolidayCalendar {
    TEXAS_2016_2017
        .iter()
        .map(|&(y, m, d)| NaiveDate::from_ymd_opt(y, m, d).unwrap())
        .collect()
}
