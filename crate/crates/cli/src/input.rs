//! Parsing of polynomial inputs and the comma-separated literals used by the flags.

use std::fs;
use std::ops::RangeInclusive;

use newtonflow::{Complex, Polynomial};

/// Inline JSON when the argument starts with `{`, otherwise a path to a JSON file.
pub fn read_polynomial(source: &str) -> Result<Polynomial, String> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        fs::read_to_string(source).map_err(|e| format!("cannot read {source}: {e}"))?
    };
    Polynomial::from_json(&text).map_err(|e| e.to_string())
}

fn numbers<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {what}, got {s:?}"));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{part:?} is not a finite number"))?;
    }
    Ok(out)
}

/// `re,im` with no spaces.
pub fn parse_complex(s: &str) -> Result<Complex, String> {
    let [re, im] = numbers::<2>(s, "re,im")?;
    Ok(Complex::new(re, im))
}

/// `cx,cy,hw,hh`.
pub fn parse_window(s: &str) -> Result<[f64; 4], String> {
    numbers::<4>(s, "cx,cy,hw,hh")
}

/// `a..b`, inclusive.
pub fn parse_levels(s: &str) -> Result<RangeInclusive<i32>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i32 = a.parse().map_err(|_| format!("{a:?} is not an integer"))?;
    let b: i32 = b.parse().map_err(|_| format!("{b:?} is not an integer"))?;
    if a > b {
        return Err(format!("empty level range {s}"));
    }
    Ok(a..=b)
}
