//! UTC timestamps at second precision.

use chrono::{DateTime, SecondsFormat, Timelike, Utc};

/// Parses an RFC 3339 timestamp, converts it to UTC and drops sub-second digits.
pub fn parse(text: &str) -> Result<DateTime<Utc>, chrono::ParseError> {
    let parsed = DateTime::parse_from_rfc3339(text.trim())?;
    Ok(truncate(parsed.with_timezone(&Utc)))
}

pub fn truncate(ts: DateTime<Utc>) -> DateTime<Utc> {
    ts.with_nanosecond(0).unwrap_or(ts)
}

/// Canonical rendering, e.g. `2026-02-18T14:32:00Z`.
pub fn format(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub(crate) mod serde_secs {
    use chrono::{DateTime, Utc};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(ts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_zulu_form_verbatim() {
        let ts = parse("2026-02-18T14:32:00Z").unwrap();
        assert_eq!(format(&ts), "2026-02-18T14:32:00Z");
    }

    #[test]
    fn converts_offsets_and_drops_fraction() {
        let ts = parse("2026-02-18T16:32:00.750+02:00").unwrap();
        assert_eq!(format(&ts), "2026-02-18T14:32:00Z");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("yesterday").is_err());
        assert!(parse("2026-02-18").is_err());
    }
}
