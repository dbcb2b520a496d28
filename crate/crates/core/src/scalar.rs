//! Scalar types shared by the exact and floating paths.

use std::fmt::Debug;

use num::bigint::BigInt;
use num::{BigRational, Complex, Num, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type Complex64 = Complex<f64>;

/// Field-like scalars used by the generic cumulant transforms.
///
/// Implemented for [`Rational`] (exact path), `f64` and [`Complex64`]
/// (floating path). The two paths are never mixed inside one computation.
pub trait Scalar: Num + Clone + Debug + Send + Sync {
    fn from_i64(v: i64) -> Self;
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale down before converting
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `"p/q"`, or `"p"` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Some(if negative { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// `base^exp` for integer exponents, including negative ones.
pub fn rat_pow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num::pow(base.clone(), exp as usize)
    } else {
        num::pow(base.recip(), (-exp) as usize)
    }
}

pub fn abs_rel_gap(value: &Rational, target: &Rational) -> f64 {
    if target.is_zero() {
        to_f64(&value.abs())
    } else {
        to_f64(&((value - target) / target).abs())
    }
}
