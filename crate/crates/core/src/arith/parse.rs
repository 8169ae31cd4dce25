//! Shell-safe text forms for exact numbers: `"p/q"`, `"p"`, `"r/s*sqrt5"`,
//! sums of those, and the alias `golden` for `(√5 − 1)/2`.

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::int::ExactInt;
use super::quadratic::QuadraticNumber;

pub fn parse_ratio<T: ExactInt>(s: &str) -> Result<Ratio<T>, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = T::parse_decimal(n).ok_or_else(|| format!("invalid integer {n:?} in {s:?}"))?;
    let d = T::parse_decimal(d).ok_or_else(|| format!("invalid integer {d:?} in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Ratio::new(n, d))
}

/// Parses an element of `Q(√5)`.
pub fn parse_quadratic<T: ExactInt>(s: &str) -> Result<QuadraticNumber<T>, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    match s.as_str() {
        "golden" => return Ok(QuadraticNumber::golden_angle()),
        "-golden" => return Ok(-QuadraticNumber::golden_angle()),
        "" => return Err("empty number".into()),
        _ => {}
    }
    let mut total = QuadraticNumber::<T>::zero();
    for term in split_terms(&s) {
        let (negative, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let value = if let Some(coef) = body.strip_suffix("sqrt5") {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let r = if coef.is_empty() { Ratio::one() } else { parse_ratio::<T>(coef)? };
            QuadraticNumber::new(Ratio::zero(), r)
        } else {
            QuadraticNumber::from_ratio(parse_ratio::<T>(body)?)
        };
        total = if negative { total - value } else { total + value };
    }
    Ok(total)
}

fn split_terms(s: &str) -> Vec<&str> {
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if i > start && (ch == '+' || ch == '-') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    terms
}
