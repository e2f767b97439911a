// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Exact rational helpers. Every monetary quantity in the crate is a
//! [`Rational`]; nothing in solver logic touches floating point.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `max(0, d)`.
pub fn positive_part(d: &Rational) -> Rational {
    if d.is_negative() {
        Rational::zero()
    } else {
        d.clone()
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, fraction)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = fraction.len();
        if digits == 0 || !fraction.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse::<BigInt>().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(digits as u32);
        let fraction: BigInt = fraction.parse().map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + fraction;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical string form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Lossy conversion for display purposes only.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(&int(-3)), int(0));
        assert_eq!(positive_part(&int(0)), int(0));
        assert_eq!(positive_part(&frac(5, 2)), frac(5, 2));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse("-1.5").unwrap(), frac(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format(&frac(2, 4)), "1/2");
        assert_eq!(format(&frac(4, 2)), "2");
        assert_eq!(format(&frac(-1, 3)), "-1/3");
        assert_eq!(format(&int(0)), "0");
    }
}
