//! Floating-point views of huge exact values.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Natural logarithm of a positive integer of any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "logarithm of zero");
    let bits = x.bits();
    if bits <= 1000 {
        if let Some(f) = x.to_f64() {
            if f.is_finite() {
                return f.ln();
            }
        }
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(q: &BigRational) -> f64 {
    assert!(q.numer().sign() == Sign::Plus, "logarithm of a nonpositive value");
    ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())
}

/// Nearest-ish `f64` for a rational whose numerator or denominator may be
/// far outside the `f64` range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let sign = if q.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * ln_rational(&q.abs()).exp()
}

pub fn bigint_to_f64(x: &BigInt) -> f64 {
    rational_to_f64(&BigRational::from_integer(x.clone()))
}

/// Fixed `%.12g`-style formatting: 12 significant digits, trailing zeros kept.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_huge_integers() {
        let x = BigUint::from(3u32).pow(2000);
        let expect = 2000.0 * 3f64.ln();
        assert!((ln_biguint(&x) - expect).abs() < 1e-9);
    }

    #[test]
    fn rational_views() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!((rational_to_f64(&q) - 1.0f64 / 3.0).abs() < 1e-16);
        let big: BigInt = BigInt::from(7u32).pow(900u32);
        let q = BigRational::new(-(&big * BigInt::from(5)), big * BigInt::from(2));
        assert!((rational_to_f64(&q) + 2.5f64).abs() < 1e-12);
    }
}
