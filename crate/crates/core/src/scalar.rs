//! Scalar fields the lattice code is generic over.
//!
//! Everything in [`crate::lattice`], [`crate::frame`], [`crate::translation`]
//! and [`crate::involution`] only needs field operations, so it is written
//! once over [`Scalar`] and instantiated with the exact [`Rational`] type for
//! identity checks and with `f64` when a real-valued chart is wanted.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// A field element usable as a lattice coordinate.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    /// Whether arithmetic is exact. Exact fields compare against zero exactly.
    const EXACT: bool;

    /// Zero test: exact for exact fields, an absolute `1e-12` window for floats.
    fn is_negligible(&self) -> bool;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("every field contains the integers")
    }

    /// `num / den`; panics on `den == 0`.
    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion from a rational; rounds for float fields.
    fn from_rational(q: &Rational) -> Self;

    /// Exact value as a rational. Non-finite floats have none.
    fn to_rational(&self) -> Option<Rational>;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() <= 1e-12
    }

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() <= 1e-6
    }

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q) as f32
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
}

/// Natural log of `|n|` for arbitrarily large integers; `-inf` for zero.
pub fn ln_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Conversion that survives numerators and denominators beyond `f64` range.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    if q.is_zero() {
        return 0.0;
    }
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_abs(q.numer()) - ln_abs(q.denom())).exp()
}

/// Parses `"7"`, `"-3/4"` and surrounding whitespace into a rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_normalized() {
        let q = parse_rational("6/-4").unwrap();
        assert_eq!(q, Rational::ratio(-3, 2));
        assert!(q.denom().is_positive());
        assert_eq!(format_rational(&q), "-3/2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400);
        let q = Rational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&q) - 3.0).abs() < 1e-12);
        assert!((ln_abs(&BigInt::from(10).pow(500)) - 500.0 * 10f64.ln()).abs() < 1e-9);
    }
}
