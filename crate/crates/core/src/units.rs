// SPDX-License-Identifier: Apache-2.0

//! SPICE-style engineering numbers: `97.083f`, `10.5u`, `100meg`.
//!
//! Values are parsed by rewriting the suffix into a decimal exponent and
//! handing the resulting string to the standard float parser, so `1000u`
//! and `0.001` produce the same `f64`. Printing works the same way in
//! reverse: the shortest round-tripping decimal is shifted to an
//! engineering exponent, which keeps `format_value(parse_value(s))` exact.

const SUFFIXES: [(&str, i32); 10] = [
    ("meg", 6),
    ("t", 12),
    ("g", 9),
    ("k", 3),
    ("m", -3),
    ("u", -6),
    ("n", -9),
    ("p", -12),
    ("f", -15),
    ("", 0),
];

fn suffix_for(exp: i32) -> &'static str {
    match exp {
        12 => "t",
        9 => "g",
        6 => "meg",
        3 => "k",
        0 => "",
        -3 => "m",
        -6 => "u",
        -9 => "n",
        -12 => "p",
        -15 => "f",
        _ => unreachable!("engineering exponent out of range"),
    }
}

/// Parses a number with an optional scale suffix. Returns `None` for
/// anything that is not a plain decimal followed by a known suffix.
pub fn parse_value(text: &str) -> Option<f64> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    let lower = s.to_ascii_lowercase();
    // numeric prefix: sign, digits, dot, exponent
    let bytes = lower.as_bytes();
    let mut end = 0;
    if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
        end += 1;
    }
    let digits_start = end;
    while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
        end += 1;
    }
    if end == digits_start {
        return None;
    }
    let mut exponent: i32 = 0;
    let mantissa_end = end;
    if end < bytes.len() && bytes[end] == b'e' {
        let mut k = end + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        let exp_digits = k;
        while k < bytes.len() && bytes[k].is_ascii_digit() {
            k += 1;
        }
        if k > exp_digits {
            exponent = lower[end + 1..k].parse().ok()?;
            end = k;
        }
    }
    let rest = &lower[end..];
    let scale = SUFFIXES
        .iter()
        .find(|(sfx, _)| *sfx == rest)
        .map(|&(_, e)| e)?;
    let mantissa = &lower[..mantissa_end];
    if mantissa.matches('.').count() > 1 {
        return None;
    }
    format!("{mantissa}e{}", exponent + scale).parse().ok()
}

/// Formats a value with the suffix that puts the mantissa in `[1, 1000)`.
/// Zero prints as `0`.
pub fn format_value(value: f64) -> String {
    format_value_or(value, "")
}

/// Like [`format_value`], but zero carries `zero_suffix` (the extractor
/// prints zero geometry as `0u`).
pub fn format_value_or(value: f64, zero_suffix: &str) -> String {
    if value == 0.0 {
        return format!("0{zero_suffix}");
    }
    if !value.is_finite() {
        return format!("{value}");
    }
    let sci = format!("{:e}", value.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mant.chars().filter(|c| *c != '.').collect();

    let eng = (exp.div_euclid(3) * 3).clamp(-15, 12);
    // number of digits in front of the decimal point; may be <= 0 below femto
    let point = exp - eng + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if digits.len() as i32 <= point {
        format!("{}{}", digits, "0".repeat((point - digits.len() as i32) as usize))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    let sign = if value < 0.0 { "-" } else { "" };
    format!("{sign}{body}{}", suffix_for(eng))
}
