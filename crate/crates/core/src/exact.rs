//! Exact rational scalars plus their decimal text forms.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Significant digits carried by every decimal rendering.
pub const DECIMAL_DIGITS: usize = 15;

pub fn rational(numer: i128, denom: i128) -> Rational {
    Ratio::new(numer, denom)
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Renders `r` with [`DECIMAL_DIGITS`] significant digits, rounding half away from zero.
/// Zero renders as `0.` followed by fifteen zeros.
pub fn render_decimal(r: &Rational) -> String {
    let negative = r.is_negative();
    let n = r.numer().abs();
    let d = *r.denom();
    let mut int_digits: Vec<u8> = (n / d).to_string().bytes().map(|b| b - b'0').collect();
    let mut rem = n % d;

    let mut significant = if int_digits == [0] { 0 } else { int_digits.len() };
    let mut frac: Vec<u8> = Vec::new();
    if n.is_zero() {
        frac = vec![0; DECIMAL_DIGITS];
    } else {
        while significant < DECIMAL_DIGITS || frac.is_empty() {
            rem *= 10;
            let digit = (rem / d) as u8;
            rem %= d;
            if significant > 0 || digit != 0 {
                significant += 1;
            }
            frac.push(digit);
        }
        if 2 * rem >= d {
            // carry
            let mut i = frac.len();
            let mut carry = true;
            while carry && i > 0 {
                i -= 1;
                if frac[i] == 9 {
                    frac[i] = 0;
                } else {
                    frac[i] += 1;
                    carry = false;
                }
            }
            let mut j = int_digits.len();
            while carry && j > 0 {
                j -= 1;
                if int_digits[j] == 9 {
                    int_digits[j] = 0;
                } else {
                    int_digits[j] += 1;
                    carry = false;
                }
            }
            if carry {
                int_digits.insert(0, 1);
            }
        }
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.extend(int_digits.iter().map(|d| (b'0' + d) as char));
    out.push('.');
    out.extend(frac.iter().map(|d| (b'0' + d) as char));
    out
}

/// Parses `"-1"`, `"0.25"`, `"1/3"` or `"2.5e-1"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = frac_part.len() as i32 - exponent;
    if !(-30..=30).contains(&scale) || int_part.len() + frac_part.len() > 30 {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value: i128 = if joined.is_empty() { 0 } else { joined.parse().map_err(|_| bad())? };
    if negative {
        value = -value;
    }
    let pow = 10i128.checked_pow(scale.unsigned_abs()).ok_or_else(bad)?;
    Ok(if scale >= 0 {
        Ratio::new(value, pow)
    } else {
        Ratio::from_integer(value.checked_mul(pow).ok_or_else(bad)?)
    })
}

/// `max(0, x)`, written out because `Ratio` has no `max` against a literal.
pub fn clamp_nonnegative(r: Rational) -> Rational {
    if r.is_negative() {
        Rational::zero()
    } else {
        r
    }
}
