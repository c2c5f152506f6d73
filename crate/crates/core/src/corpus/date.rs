//! Month-granularity calendar values and duration arithmetic.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::schema("date", format!("month {month} out of range")));
        }
        Ok(YearMonth { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ordinal: i64) -> Self {
        YearMonth {
            year: ordinal.div_euclid(12) as i32,
            month: ordinal.rem_euclid(12) as u32 + 1,
        }
    }

    pub fn plus_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed month difference `other - self`.
    pub fn months_until(self, other: YearMonth) -> i64 {
        other.ordinal() - self.ordinal()
    }

    /// Long form used in rendered CVs, e.g. "April 2022".
    pub fn long_form(self) -> String {
        format!("{} {}", MONTH_NAMES[self.month as usize - 1], self.year)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// An item's end point: a concrete month or the open "Ongoing" marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DateValue {
    Month(YearMonth),
    Ongoing,
}

impl DateValue {
    /// Ongoing resolves to `now`.
    pub fn resolve(self, now: YearMonth) -> YearMonth {
        match self {
            DateValue::Month(m) => m,
            DateValue::Ongoing => now,
        }
    }

    pub fn is_ongoing(self) -> bool {
        matches!(self, DateValue::Ongoing)
    }

    pub fn month(self) -> Option<YearMonth> {
        match self {
            DateValue::Month(m) => Some(m),
            DateValue::Ongoing => None,
        }
    }

    pub fn long_form(self) -> String {
        match self {
            DateValue::Month(m) => m.long_form(),
            DateValue::Ongoing => "Ongoing".to_string(),
        }
    }
}

impl From<YearMonth> for DateValue {
    fn from(m: YearMonth) -> Self {
        DateValue::Month(m)
    }
}

impl fmt::Display for DateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateValue::Month(m) => m.fmt(f),
            DateValue::Ongoing => f.write_str("Ongoing"),
        }
    }
}

impl FromStr for DateValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_date(s)
    }
}

impl TryFrom<String> for DateValue {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        parse_date(&s)
    }
}

impl From<DateValue> for String {
    fn from(d: DateValue) -> Self {
        d.to_string()
    }
}

/// The month "Ongoing" resolves to unless configured otherwise.
pub fn default_now() -> YearMonth {
    YearMonth { year: 2024, month: 6 }
}

/// Parse the date formats produced by CV parsers: ISO dates ("2019-09-15"),
/// year-month ("2019-09"), month names ("April 2022", "Apr 2022"),
/// "MM/YYYY", and a bare year (read as January). "Present" and "Ongoing"
/// map to [`DateValue::Ongoing`]. Days are discarded.
pub fn parse_date(text: &str) -> Result<DateValue> {
    parse_date_field("date", text)
}

/// [`parse_date`] with the offending field named in the error.
pub fn parse_date_field(field: &str, text: &str) -> Result<DateValue> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::schema(field, "empty date"));
    }
    if t.eq_ignore_ascii_case("present") || t.eq_ignore_ascii_case("ongoing") {
        return Ok(DateValue::Ongoing);
    }
    let date = NaiveDate::parse_from_str(t, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(&format!("{t}-01"), "%Y-%m-%d"))
        .or_else(|_| NaiveDate::parse_from_str(&format!("1 {t}"), "%d %B %Y"))
        .or_else(|_| NaiveDate::parse_from_str(&format!("01/{t}"), "%d/%m/%Y"))
        .ok()
        .or_else(|| {
            // bare year
            (t.len() == 4 && t.bytes().all(|b| b.is_ascii_digit()))
                .then(|| NaiveDate::from_ymd_opt(t.parse().ok()?, 1, 1))
                .flatten()
        });
    match date {
        Some(d) => Ok(DateValue::Month(YearMonth::new(d.year(), d.month())?)),
        None => Err(Error::schema(field, format!("unparseable date {t:?}"))),
    }
}

/// Whole months from `start` to `end` (Ongoing resolved to `now`):
/// `(end.year - start.year) * 12 + (end.month - start.month)`.
pub fn item_duration_months(start: YearMonth, end: DateValue, now: YearMonth) -> Result<u32> {
    let end = end.resolve(now);
    let months = start.months_until(end);
    if months < 0 {
        return Err(Error::Validation(format!("end {end} precedes start {start}")));
    }
    Ok(months as u32)
}

/// Human-readable duration, e.g. "1 year, 11 months".
pub fn format_duration(months: u32) -> String {
    let (years, rest) = (months / 12, months % 12);
    let plural = |n: u32, unit: &str| {
        if n == 1 {
            format!("1 {unit}")
        } else {
            format!("{n} {unit}s")
        }
    };
    match (years, rest) {
        (0, m) => plural(m, "month"),
        (y, 0) => plural(y, "year"),
        (y, m) => format!("{}, {}", plural(y, "year"), plural(m, "month")),
    }
}
