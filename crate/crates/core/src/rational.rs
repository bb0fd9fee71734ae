//! Rational reconstruction of floating-point values for exact reporting.

use std::fmt;

/// Default denominator bound used by reports.
pub const DEFAULT_MAX_DENOMINATOR: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Fraction {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Best continued-fraction convergent of `x` with denominator at most
/// `max_den`, accepted only if it reproduces `x` within `tol`.
pub fn reconstruct(x: f64, max_den: i64, tol: f64) -> Option<Fraction> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = y;
    for _ in 0..64 {
        let a = r.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a as f64;
        if (p1 as f64 / q1 as f64 - y).abs() <= tol || frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let candidate = Fraction {
        num: sign * p1,
        den: q1,
    };
    ((candidate.value() - x).abs() <= tol).then_some(candidate)
}

/// Formats `x` as an exact fraction when one is found, else with 12
/// significant digits.
pub fn format_exact(x: f64) -> String {
    match reconstruct(x, DEFAULT_MAX_DENOMINATOR, 5e-14 * x.abs().max(1.0)) {
        Some(f) => f.to_string(),
        None => format_sig(x),
    }
}

/// Formats with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.11e}", x);
    let parsed: f64 = s.parse().unwrap_or(x);
    let mag = parsed.abs().log10();
    if (-5.0..12.0).contains(&mag) {
        let decimals = (11 - mag.floor() as i32).clamp(0, 17) as usize;
        let t = format!("{:.*}", decimals, parsed);
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        }
    } else {
        s
    }
}
