//! Number formatting for descriptions and the matching digit checker.
//!
//! Values are rounded to two significant figures. Magnitudes of a million
//! and above use a scale word (`2.5 million`), thousands use comma grouping
//! (`12,000`), smaller values print their two significant digits (`4.5`,
//! `0.034`). When rounding changed the value an approximation qualifier is
//! prepended (`about 300`).

use std::sync::OnceLock;

use regex::Regex;

use crate::rng::SplitMix64;

pub const QUALIFIERS: [&str; 4] = ["about", "approximately", "nearly", "around"];

const SCALES: [(f64, &str); 4] = [(1e15, "quadrillion"), (1e12, "trillion"), (1e9, "billion"), (1e6, "million")];

pub fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let p = digits - 1 - v.abs().log10().floor() as i32;
    if p >= 0 {
        let s = 10f64.powi(p);
        (v * s).round() / s
    } else {
        let s = 10f64.powi(-p);
        (v / s).round() * s
    }
}

fn group_thousands(n: u64) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Two-significant-figure rendering of `v` and whether it equals `v` exactly.
pub fn format_plain(v: f64) -> (String, bool) {
    if v == 0.0 {
        return ("0".into(), true);
    }
    let r = round_sig(v, 2);
    let exact = (r - v).abs() <= 1e-9 * v.abs();
    let sign = if r < 0.0 { "-" } else { "" };
    let a = r.abs();
    let body = if let Some((scale, word)) = SCALES.iter().find(|(s, _)| a >= *s) {
        let m = round_sig(a / scale, 2);
        format!("{m} {word}")
    } else if a >= 1000.0 {
        group_thousands(a.round() as u64)
    } else {
        let decimals = (1 - a.log10().floor() as i32).max(0) as usize;
        let s = format!("{a:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    (format!("{sign}{body}"), exact)
}

/// [`format_plain`] with a sampled qualifier when the value was rounded.
pub fn format_number(v: f64, rng: &mut SplitMix64) -> String {
    let (s, exact) = format_plain(v);
    if exact {
        s
    } else {
        format!("{} {s}", rng.pick(&QUALIFIERS))
    }
}

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"-?\d[\d,]*(?:\.\d+)?(?: (?:million|billion|trillion|quadrillion))?").unwrap())
}

/// Digit-bearing spans of `text` that are neither in `allowed` nor inside one of `labels`.
///
/// Labels (years, names, title) are removed first, longest first, so digits
/// that belong to them are never mistaken for numbers.
pub fn unsupported_numbers(text: &str, allowed: &[String], labels: &[String]) -> Vec<String> {
    let mut stripped = text.to_string();
    let mut labels: Vec<&String> = labels.iter().filter(|l| !l.is_empty()).collect();
    labels.sort_by_key(|l| std::cmp::Reverse(l.len()));
    for l in labels {
        stripped = stripped.replace(l.as_str(), " ");
    }
    number_re()
        .find_iter(&stripped)
        .map(|m| m.as_str().trim_end_matches(',').to_string())
        .filter(|m| !allowed.iter().any(|a| a == m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_contract() {
        assert_eq!(format_plain(297.3), ("300".into(), false));
        assert_eq!(format_plain(40.0), ("40".into(), true));
        assert_eq!(format_plain(4.5), ("4.5".into(), true));
        assert_eq!(format_plain(0.0342), ("0.034".into(), false));
        assert_eq!(format_plain(12_345.0), ("12,000".into(), false));
        assert_eq!(format_plain(2.5e6), ("2.5 million".into(), true));
        assert_eq!(format_plain(19_870_000.0), ("20 million".into(), false));
        assert_eq!(format_plain(3.5e15), ("3.5 quadrillion".into(), true));
        assert_eq!(format_plain(9.96), ("10".into(), false));
        assert_eq!(format_plain(5.0), ("5".into(), true));
        assert_eq!(format_plain(0.301), ("0.3".into(), false));
        assert_eq!(format_plain(999_999.0), ("1 million".into(), false));
    }

    #[test]
    fn qualifier_only_when_rounded() {
        let mut rng = SplitMix64::new(1);
        let s = format_number(297.3, &mut rng);
        assert!(QUALIFIERS.iter().any(|q| s == format!("{q} 300")), "{s}");
        assert_eq!(format_number(40.0, &mut rng), "40");
    }

    #[test]
    fn checker() {
        let allowed = vec!["300".to_string(), "2.5 million".to_string()];
        let labels = vec!["1997".to_string()];
        assert!(unsupported_numbers("It rose to about 300 tonnes in 1997.", &allowed, &labels).is_empty());
        assert!(unsupported_numbers("It reached 2.5 million, up from 1997.", &allowed, &labels).is_empty());
        assert_eq!(unsupported_numbers("It reached 42 tonnes.", &allowed, &labels), vec!["42"]);
        assert_eq!(unsupported_numbers("It reached 2.5 billion.", &allowed, &labels), vec!["2.5 billion"]);
    }
}
