//! Exact rational helpers for the closed-form coefficients.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v as i128)
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(num as i128, den as i128)
}

pub fn to_f64(r: &Rational) -> f64 {
    // i128 -> f64 conversion loses nothing for the small denominators in play
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, an integer, or a terminating decimal like `"0.25"`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().ok()?;
        let q: i128 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Ok(i) = s.parse::<i128>() {
        return Some(Rational::from_integer(i));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, decimals) = body.split_once('.')?;
    if decimals.is_empty() && whole.is_empty() {
        return None;
    }
    if decimals.len() > 30 || !decimals.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let whole: i128 = if whole.is_empty() { 0 } else { whole.parse().ok()? };
    let scale = 10i128.checked_pow(decimals.len() as u32)?;
    let dec: i128 = if decimals.is_empty() { 0 } else { decimals.parse().ok()? };
    let r = Rational::new(whole.checked_mul(scale)?.checked_add(dec)?, scale);
    Some(if neg { -r } else { r })
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse("1/6"), Some(frac(1, 6)));
        assert_eq!(parse("-3"), Some(int(-3)));
        assert_eq!(parse("0.25"), Some(frac(1, 4)));
        assert_eq!(parse("-.5"), Some(frac(-1, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("abc"), None);
    }
}
