//! `xsd:dateTime` instants, day-time durations and the extended timeline
//! with `-INF` / `+INF` bounds used for undefined obligation windows.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, FixedOffset, NaiveDate, NaiveDateTime, NaiveTime, TimeDelta, TimeZone, Timelike};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("invalid lexical form {lexical:?} at offset {position}: {reason}")]
    Parse {
        lexical: String,
        position: usize,
        reason: &'static str,
    },
    #[error("duration {0:?} has year or month components, only day-time durations are supported")]
    UnsupportedDuration(String),
    #[error("date-time arithmetic overflowed")]
    Overflow,
}

fn parse_error(lexical: &str, position: usize, reason: &'static str) -> TimeError {
    TimeError::Parse {
        lexical: lexical.to_owned(),
        position,
        reason,
    }
}

/// A finite instant with millisecond resolution.
///
/// Equality, ordering and hashing use the absolute timeline; the original
/// offset is only kept for display.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DateTime(chrono::DateTime<FixedOffset>);

impl DateTime {
    pub fn from_chrono(value: chrono::DateTime<FixedOffset>) -> Self {
        let nanos = value.nanosecond() % 1_000_000_000;
        let truncated = value.with_nanosecond(nanos - nanos % 1_000_000).unwrap_or(value);
        DateTime(truncated)
    }

    pub fn as_chrono(&self) -> &chrono::DateTime<FixedOffset> {
        &self.0
    }

    /// Milliseconds since the Unix epoch.
    pub fn timestamp_millis(&self) -> i64 {
        self.0.timestamp_millis()
    }

    pub fn offset_seconds(&self) -> i32 {
        self.0.offset().local_minus_utc()
    }

    pub fn from_timestamp_millis(millis: i64, offset_seconds: i32) -> Result<Self, TimeError> {
        let offset = FixedOffset::east_opt(offset_seconds).ok_or(TimeError::Overflow)?;
        let utc = chrono::DateTime::from_timestamp_millis(millis).ok_or(TimeError::Overflow)?;
        Ok(DateTime(utc.with_timezone(&offset)))
    }

    pub fn checked_add(&self, duration: DayTimeDuration) -> Result<Self, TimeError> {
        self.0
            .checked_add_signed(TimeDelta::milliseconds(duration.millis))
            .map(DateTime)
            .ok_or(TimeError::Overflow)
    }

    pub fn checked_sub(&self, duration: DayTimeDuration) -> Result<Self, TimeError> {
        self.checked_add(DayTimeDuration {
            millis: duration.millis.checked_neg().ok_or(TimeError::Overflow)?,
        })
    }

    /// Signed distance `self - other`.
    pub fn since(&self, other: &DateTime) -> DayTimeDuration {
        DayTimeDuration {
            millis: self.timestamp_millis() - other.timestamp_millis(),
        }
    }

    /// Canonical lexical form in the instant's own offset.
    pub fn to_lexical(&self) -> String {
        use std::fmt::Write;
        let d = &self.0;
        let mut out = String::with_capacity(29);
        let year = d.year();
        if (0..=9999).contains(&year) {
            write!(out, "{year:04}")
        } else {
            write!(out, "{year:+05}")
        }
        .expect("write to String");
        for (sep, n) in [
            ('-', d.month()),
            ('-', d.day()),
            ('T', d.hour()),
            (':', d.minute()),
            (':', d.second()),
        ] {
            out.push(sep);
            push_two_digits(&mut out, n);
        }
        let millis = d.nanosecond() / 1_000_000;
        if millis != 0 {
            let frac = format!("{millis:03}");
            out.push('.');
            out.push_str(frac.trim_end_matches('0'));
        }
        let offset = self.offset_seconds();
        if offset == 0 {
            out.push('Z');
        } else {
            let sign = if offset < 0 { '-' } else { '+' };
            let abs = offset.abs();
            out.push(sign);
            push_two_digits(&mut out, abs.unsigned_abs() / 3600);
            out.push(':');
            push_two_digits(&mut out, (abs.unsigned_abs() % 3600) / 60);
        }
        out
    }

    /// Parses an `xsd:dateTime` lexical form. An explicit offset is required.
    pub fn parse(lexical: &str) -> Result<Self, TimeError> {
        DateTimeScanner::new(lexical).scan()
    }
}

fn push_two_digits(out: &mut String, n: u32) {
    out.push(char::from(b'0' + (n / 10 % 10) as u8));
    out.push(char::from(b'0' + (n % 10) as u8));
}

impl fmt::Display for DateTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lexical())
    }
}

impl fmt::Debug for DateTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DateTime({})", self.to_lexical())
    }
}

impl FromStr for DateTime {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DateTime::parse(s)
    }
}

struct DateTimeScanner<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> DateTimeScanner<'a> {
    fn new(text: &'a str) -> Self {
        DateTimeScanner {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn fail<T>(&self, position: usize, reason: &'static str) -> Result<T, TimeError> {
        Err(parse_error(self.text, position, reason))
    }

    fn digits(&mut self, count: usize, reason: &'static str) -> Result<u32, TimeError> {
        let start = self.pos;
        let mut value = 0u32;
        for _ in 0..count {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_digit() => {
                    value = value * 10 + u32::from(b - b'0');
                    self.pos += 1;
                }
                _ => return self.fail(self.pos.max(start), reason),
            }
        }
        Ok(value)
    }

    fn expect(&mut self, byte: u8, reason: &'static str) -> Result<(), TimeError> {
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(self.pos, reason)
        }
    }

    fn scan(mut self) -> Result<DateTime, TimeError> {
        if self.bytes.first() == Some(&b'-') {
            return self.fail(0, "negative years are not supported");
        }
        let year = self.digits(4, "expected four-digit year")?;
        if self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return self.fail(self.pos, "years beyond 9999 are not supported");
        }
        self.expect(b'-', "expected '-' after year")?;
        let month_pos = self.pos;
        let month = self.digits(2, "expected two-digit month")?;
        self.expect(b'-', "expected '-' after month")?;
        let day_pos = self.pos;
        let day = self.digits(2, "expected two-digit day")?;
        self.expect(b'T', "expected 'T' between date and time")?;
        let hour_pos = self.pos;
        let hour = self.digits(2, "expected two-digit hour")?;
        self.expect(b':', "expected ':' after hour")?;
        let minute_pos = self.pos;
        let minute = self.digits(2, "expected two-digit minute")?;
        self.expect(b':', "expected ':' after minute")?;
        let second_pos = self.pos;
        let second = self.digits(2, "expected two-digit second")?;
        let mut millis = 0u32;
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac_start = self.pos;
            let mut scale = 100;
            while let Some(b) = self.bytes.get(self.pos).filter(|b| b.is_ascii_digit()) {
                // Sub-millisecond digits are truncated.
                millis += u32::from(b - b'0') * scale;
                scale /= 10;
                self.pos += 1;
            }
            if self.pos == frac_start {
                return self.fail(self.pos, "expected digits after '.'");
            }
        }
        let offset_pos = self.pos;
        let offset_seconds: i32 = match self.bytes.get(self.pos) {
            Some(b'Z') => {
                self.pos += 1;
                0
            }
            Some(&sign @ (b'+' | b'-')) => {
                self.pos += 1;
                let hh = self.digits(2, "expected two-digit offset hour")?;
                self.expect(b':', "expected ':' in offset")?;
                let mm = self.digits(2, "expected two-digit offset minute")?;
                if mm >= 60 || hh > 14 || (hh == 14 && mm != 0) {
                    return self.fail(offset_pos, "offset out of range");
                }
                let secs = (hh * 3600 + mm * 60) as i32;
                if sign == b'-' {
                    -secs
                } else {
                    secs
                }
            }
            None => return self.fail(self.pos, "missing timezone offset"),
            Some(_) => return self.fail(self.pos, "expected 'Z' or a signed offset"),
        };
        if self.pos != self.bytes.len() {
            return self.fail(self.pos, "unexpected trailing characters");
        }
        if year == 0 {
            return self.fail(0, "year 0000 is not allowed");
        }
        if !(1..=12).contains(&month) {
            return self.fail(month_pos, "month out of range");
        }
        let date = NaiveDate::from_ymd_opt(year as i32, month, day);
        let Some(date) = date else {
            return self.fail(day_pos, "day out of range for month");
        };
        // 24:00:00 denotes the first instant of the following day.
        let (date, hour) = if hour == 24 {
            if minute != 0 || second != 0 || millis != 0 {
                return self.fail(hour_pos, "hour 24 is only valid as 24:00:00");
            }
            match date.succ_opt() {
                Some(next) => (next, 0),
                None => return self.fail(hour_pos, "date out of range"),
            }
        } else {
            (date, hour)
        };
        if hour > 23 {
            return self.fail(hour_pos, "hour out of range");
        }
        if minute > 59 {
            return self.fail(minute_pos, "minute out of range");
        }
        if second > 59 {
            return self.fail(second_pos, "second out of range");
        }
        let time = NaiveTime::from_hms_milli_opt(hour, minute, second, millis).expect("components validated above");
        let offset = FixedOffset::east_opt(offset_seconds).expect("offset validated above");
        let local = NaiveDateTime::new(date, time);
        match offset.from_local_datetime(&local).single() {
            Some(value) => Ok(DateTime(value)),
            None => self.fail(0, "date-time out of range"),
        }
    }
}

/// An `xsd:dayTimeDuration` with millisecond resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DayTimeDuration {
    millis: i64,
}

impl DayTimeDuration {
    pub const fn from_millis(millis: i64) -> Self {
        DayTimeDuration { millis }
    }

    pub const fn from_seconds(seconds: i64) -> Self {
        DayTimeDuration { millis: seconds * 1000 }
    }

    pub const fn from_hours(hours: i64) -> Self {
        DayTimeDuration::from_seconds(hours * 3600)
    }

    pub fn as_millis(&self) -> i64 {
        self.millis
    }

    pub fn checked_add(&self, other: DayTimeDuration) -> Option<Self> {
        self.millis.checked_add(other.millis).map(Self::from_millis)
    }

    pub fn checked_neg(&self) -> Option<Self> {
        self.millis.checked_neg().map(Self::from_millis)
    }

    /// Parses `xsd:duration` / `xsd:dayTimeDuration` lexical forms. Non-zero
    /// year or month components are rejected.
    pub fn parse(lexical: &str) -> Result<Self, TimeError> {
        let bytes = lexical.as_bytes();
        let mut pos = 0;
        let negative = bytes.first() == Some(&b'-');
        if negative {
            pos += 1;
        }
        if bytes.get(pos) != Some(&b'P') {
            return Err(parse_error(lexical, pos, "expected 'P'"));
        }
        pos += 1;
        let mut millis: i64 = 0;
        let mut in_time = false;
        let mut any = false;
        let mut time_component = false;
        let mut last_rank = 0u8;
        let mut calendar = false;
        while pos < bytes.len() {
            if bytes[pos] == b'T' {
                if in_time {
                    return Err(parse_error(lexical, pos, "duplicate 'T'"));
                }
                in_time = true;
                pos += 1;
                continue;
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == start {
                return Err(parse_error(lexical, pos, "expected digits"));
            }
            let whole: i64 = lexical[start..pos]
                .parse()
                .map_err(|_| parse_error(lexical, start, "number too large"))?;
            let mut frac_millis = 0i64;
            if bytes.get(pos) == Some(&b'.') {
                pos += 1;
                let frac_start = pos;
                let mut scale = 100;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    frac_millis += i64::from(bytes[pos] - b'0') * scale;
                    scale /= 10;
                    pos += 1;
                }
                if pos == frac_start {
                    return Err(parse_error(lexical, pos, "expected digits after '.'"));
                }
                if bytes.get(pos) != Some(&b'S') || !in_time {
                    return Err(parse_error(lexical, pos, "fractions are only allowed on seconds"));
                }
            }
            let Some(&designator) = bytes.get(pos) else {
                return Err(parse_error(lexical, pos, "missing component designator"));
            };
            let (rank, unit_millis) = match (in_time, designator) {
                (false, b'Y') => (1, None),
                (false, b'M') => (2, None),
                (false, b'D') => (3, Some(86_400_000)),
                (true, b'H') => (4, Some(3_600_000)),
                (true, b'M') => (5, Some(60_000)),
                (true, b'S') => (6, Some(1000)),
                _ => return Err(parse_error(lexical, pos, "unexpected component designator")),
            };
            if rank <= last_rank {
                return Err(parse_error(lexical, pos, "components out of order"));
            }
            last_rank = rank;
            match unit_millis {
                None => {
                    if whole != 0 {
                        calendar = true;
                    }
                }
                Some(unit) => {
                    let part = whole
                        .checked_mul(unit)
                        .and_then(|v| v.checked_add(frac_millis))
                        .ok_or_else(|| parse_error(lexical, start, "duration too large"))?;
                    millis = millis
                        .checked_add(part)
                        .ok_or_else(|| parse_error(lexical, start, "duration too large"))?;
                }
            }
            if in_time {
                time_component = true;
            }
            any = true;
            pos += 1;
        }
        if !any {
            return Err(parse_error(lexical, pos, "duration has no components"));
        }
        if in_time && !time_component {
            return Err(parse_error(lexical, pos, "'T' must be followed by a time component"));
        }
        if calendar {
            return Err(TimeError::UnsupportedDuration(lexical.to_owned()));
        }
        Ok(DayTimeDuration {
            millis: if negative { -millis } else { millis },
        })
    }

    pub fn to_lexical(&self) -> String {
        if self.millis == 0 {
            return "PT0S".to_owned();
        }
        let mut out = String::new();
        if self.millis < 0 {
            out.push('-');
        }
        let total = self.millis.unsigned_abs();
        let days = total / 86_400_000;
        let hours = (total / 3_600_000) % 24;
        let minutes = (total / 60_000) % 60;
        let seconds = (total / 1000) % 60;
        let millis = total % 1000;
        out.push('P');
        if days > 0 {
            out.push_str(&format!("{days}D"));
        }
        if hours > 0 || minutes > 0 || seconds > 0 || millis > 0 {
            out.push('T');
            if hours > 0 {
                out.push_str(&format!("{hours}H"));
            }
            if minutes > 0 {
                out.push_str(&format!("{minutes}M"));
            }
            if seconds > 0 || millis > 0 {
                if millis > 0 {
                    let frac = format!("{millis:03}");
                    out.push_str(&format!("{seconds}.{}S", frac.trim_end_matches('0')));
                } else {
                    out.push_str(&format!("{seconds}S"));
                }
            }
        }
        out
    }
}

impl fmt::Display for DayTimeDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lexical())
    }
}

/// A point on the extended timeline.
///
/// Variant order gives the total order `-INF < Finite(_) < +INF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeInstant {
    NegInfinity,
    Finite(DateTime),
    PosInfinity,
}

impl TimeInstant {
    pub fn finite(&self) -> Option<DateTime> {
        match self {
            TimeInstant::Finite(dt) => Some(*dt),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TimeInstant::Finite(_))
    }
}

impl From<DateTime> for TimeInstant {
    fn from(value: DateTime) -> Self {
        TimeInstant::Finite(value)
    }
}

impl fmt::Display for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeInstant::NegInfinity => f.write_str("-INF"),
            TimeInstant::PosInfinity => f.write_str("+INF"),
            TimeInstant::Finite(dt) => dt.fmt(f),
        }
    }
}

impl FromStr for TimeInstant {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_datetime(s)
    }
}

/// Parses a date-time lexical form or one of the sentinels `-INF` / `+INF`.
pub fn parse_datetime(lexical: &str) -> Result<TimeInstant, TimeError> {
    match lexical {
        "-INF" => Ok(TimeInstant::NegInfinity),
        "+INF" | "INF" => Ok(TimeInstant::PosInfinity),
        _ => DateTime::parse(lexical).map(TimeInstant::Finite),
    }
}

/// Adds a day-time duration given in lexical form. Infinite instants absorb
/// the addition.
pub fn add_duration(instant: TimeInstant, duration: &str) -> Result<TimeInstant, TimeError> {
    let duration = DayTimeDuration::parse(duration)?;
    add_day_time(instant, duration)
}

pub fn add_day_time(instant: TimeInstant, duration: DayTimeDuration) -> Result<TimeInstant, TimeError> {
    match instant {
        TimeInstant::Finite(dt) => dt.checked_add(duration).map(TimeInstant::Finite),
        infinite => Ok(infinite),
    }
}

pub fn compare_instants(a: &TimeInstant, b: &TimeInstant) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dt(s: &str) -> DateTime {
        DateTime::parse(s).unwrap()
    }

    #[test]
    fn parses_hospital_end_date() {
        let t = parse_datetime("2025-07-20T10:30:00+02:00").unwrap();
        assert_eq!(t.to_string(), "2025-07-20T10:30:00+02:00");
        assert_eq!(t.finite().unwrap().offset_seconds(), 7200);
    }

    #[test]
    fn sentinels() {
        assert_eq!(parse_datetime("+INF").unwrap(), TimeInstant::PosInfinity);
        assert_eq!(parse_datetime("-INF").unwrap(), TimeInstant::NegInfinity);
        assert_eq!(TimeInstant::PosInfinity.to_string(), "+INF");
    }

    #[test]
    fn offsets_normalize() {
        assert_eq!(dt("2025-07-20T08:30:00Z"), dt("2025-07-20T10:30:00+02:00"));
        assert_eq!(dt("2025-07-20T08:30:00-00:30"), dt("2025-07-20T09:00:00Z"));
    }

    #[test]
    fn sub_millisecond_truncated() {
        assert_eq!(dt("2025-01-01T00:00:00.1239Z").to_lexical(), "2025-01-01T00:00:00.123Z");
        assert_eq!(dt("2025-01-01T00:00:00.5Z").to_lexical(), "2025-01-01T00:00:00.5Z");
    }

    #[test]
    fn hour_24_rolls_over() {
        assert_eq!(dt("2025-12-31T24:00:00Z"), dt("2026-01-01T00:00:00Z"));
        assert!(DateTime::parse("2025-12-31T24:00:01Z").is_err());
    }

    #[test]
    fn malformed_inputs_report_position() {
        let cases = [
            ("2025-07-20T10:30:00", 19, "missing timezone offset"),
            ("2025-13-20T10:30:00Z", 5, "month out of range"),
            ("2025-02-30T10:30:00Z", 8, "day out of range for month"),
            ("2025-07-20 10:30:00Z", 10, "expected 'T' between date and time"),
            ("2025-07-20T10:30:00+15:00", 19, "offset out of range"),
            ("2025-07-20T10:30:00Zx", 20, "unexpected trailing characters"),
            ("25-07-20T10:30:00Z", 2, "expected four-digit year"),
            // An extra time component after the seconds.
            ("2025-07-21T10:00:12:00+02:00", 19, "expected 'Z' or a signed offset"),
        ];
        for (input, position, reason) in cases {
            match DateTime::parse(input) {
                Err(TimeError::Parse {
                    position: p, reason: r, ..
                }) => {
                    assert_eq!((p, r), (position, reason), "{input}");
                }
                other => panic!("{input}: {other:?}"),
            }
        }
    }

    #[test]
    fn adds_twelve_hours() {
        let start = parse_datetime("2025-07-20T10:30:00+02:00").unwrap();
        let deadline = add_duration(start, "PT12H").unwrap();
        assert_eq!(deadline.to_string(), "2025-07-20T22:30:00+02:00");
    }

    #[test]
    fn infinities_absorb() {
        assert_eq!(
            add_duration(TimeInstant::PosInfinity, "PT1H").unwrap(),
            TimeInstant::PosInfinity
        );
        assert_eq!(
            add_duration(TimeInstant::NegInfinity, "-P3D").unwrap(),
            TimeInstant::NegInfinity
        );
    }

    #[test]
    fn calendar_durations_rejected() {
        let t = parse_datetime("2025-07-20T10:30:00Z").unwrap();
        assert!(matches!(add_duration(t, "P1M"), Err(TimeError::UnsupportedDuration(_))));
        assert!(matches!(
            add_duration(t, "P1Y2D"),
            Err(TimeError::UnsupportedDuration(_))
        ));
        // Zero calendar parts are harmless.
        assert_eq!(add_duration(t, "P0Y1D").unwrap(), add_duration(t, "PT24H").unwrap());
    }

    #[test]
    fn duration_lexical_forms() {
        for (lexical, millis) in [
            ("PT12H", 43_200_000),
            ("P1DT1H", 90_000_000),
            ("-PT1.5S", -1500),
            ("PT90M", 5_400_000),
            ("P0D", 0),
        ] {
            assert_eq!(
                DayTimeDuration::parse(lexical).unwrap().as_millis(),
                millis,
                "{lexical}"
            );
        }
        for bad in ["", "P", "PT", "12H", "PT1H2H", "P1.5D", "PTH", "P1H"] {
            assert!(DayTimeDuration::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(DayTimeDuration::from_millis(90_061_500).to_lexical(), "P1DT1H1M1.5S");
        assert_eq!(DayTimeDuration::from_millis(-3_600_000).to_lexical(), "-PT1H");
    }

    #[test]
    fn sentinel_order() {
        let f = TimeInstant::Finite(dt("2025-07-20T10:30:00Z"));
        assert_eq!(compare_instants(&TimeInstant::NegInfinity, &f), Ordering::Less);
        assert_eq!(compare_instants(&f, &TimeInstant::PosInfinity), Ordering::Less);
        assert_eq!(compare_instants(&f, &f), Ordering::Equal);
        let late = TimeInstant::Finite(dt("2025-07-21T10:00:00+02:00"));
        let deadline = TimeInstant::Finite(dt("2025-07-20T22:30:00+02:00"));
        assert_eq!(compare_instants(&late, &deadline), Ordering::Greater);
    }
}
