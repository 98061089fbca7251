//! Truncated formal power series with exact rational coefficients.
//!
//! A [`Series`] holds the coefficients of `z^0 ..= z^N` where `N` is its
//! truncation order. Coefficients are stored as integer numerators over one
//! shared positive denominator, so the integral series that make up every
//! tree-index generating function cost no more than plain big integers.
//!
//! Binary operations require equal orders. The checked variants
//! (`try_add`, `try_mul`, ...) return [`SeriesError::OrderMismatch`]; the
//! operator impls panic with the same message.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("1/(1-f) needs a vanishing constant term, found {constant}")]
    NonzeroConstant { constant: String },
    #[error("division by z^{k} is inexact: valuation is {valuation}")]
    InexactDivision { k: usize, valuation: usize },
    #[error("cannot divide a series of order {order} by z^{k}")]
    OrderTooSmall { order: usize, k: usize },
    #[error("constant term {constant} is not the square of a rational")]
    NotASquare { constant: String },
    #[error("cannot raise truncation order from {from} to {to}")]
    Widening { from: usize, to: usize },
    #[error("malformed series: {0}")]
    Malformed(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct Series {
    order: usize,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series {
            order,
            num: vec![BigInt::zero(); order + 1],
            den: BigInt::one(),
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, BigInt::one())
    }

    /// `c * z^k`, or zero when `k` exceeds the order.
    pub fn monomial(order: usize, k: usize, c: impl Into<BigInt>) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.num[k] = c.into();
        }
        s
    }

    /// The series `z`.
    pub fn z(order: usize) -> Self {
        Self::monomial(order, 1, 1)
    }

    /// Integer coefficients; missing entries are zero, extra ones are dropped.
    pub fn from_ints<I, C>(order: usize, coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        let mut s = Self::zero(order);
        for (slot, c) in s.num.iter_mut().zip(coeffs) {
            *slot = c.into();
        }
        s
    }

    pub fn from_rationals(order: usize, coeffs: &[BigRational]) -> Self {
        let den = coeffs
            .iter()
            .take(order + 1)
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut num = vec![BigInt::zero(); order + 1];
        for (slot, c) in num.iter_mut().zip(coeffs) {
            *slot = c.numer() * (&den / c.denom());
        }
        Self::normalized(order, num, den)
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> BigInt) -> Self {
        Series {
            order,
            num: (0..=order).map(&mut f).collect(),
            den: BigInt::one(),
        }
    }

    fn normalized(order: usize, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert_eq!(num.len(), order + 1);
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|c| *c = -&*c);
        }
        if !den.is_one() {
            let g = num.iter().fold(den.clone(), |g, c| g.gcd(c));
            if !g.is_one() {
                num.iter_mut().for_each(|c| *c /= &g);
                den /= &g;
            }
        }
        Series { order, num, den }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `z^k`; zero above the order.
    pub fn coeff(&self, k: usize) -> BigRational {
        match self.num.get(k) {
            Some(c) => BigRational::new(c.clone(), self.den.clone()),
            None => BigRational::zero(),
        }
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..=self.order).map(|k| self.coeff(k)).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Borrow the coefficients when every one of them is an integer.
    pub fn integer_coeffs(&self) -> Option<&[BigInt]> {
        self.is_integral().then_some(self.num.as_slice())
    }

    /// Integer coefficient of `z^k`. Panics on a non-integral series.
    pub fn int_coeff(&self, k: usize) -> &BigInt {
        assert!(self.is_integral(), "series has denominator {}", self.den);
        &self.num[k]
    }

    /// Index of the first nonzero coefficient, `order + 1` for the zero series.
    pub fn valuation(&self) -> usize {
        self.num
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.order + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn check_order(&self, other: &Series) -> Result<(), SeriesError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    pub fn try_add(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_order(other)?;
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            return Ok(Self::normalized(self.order, num, self.den.clone()));
        }
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        Ok(Self::normalized(self.order, num, den))
    }

    pub fn try_sub(&self, other: &Series) -> Result<Series, SeriesError> {
        self.try_add(&-other)
    }

    /// Cauchy product truncated at the common order.
    pub fn try_mul(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_order(other)?;
        let n = self.order;
        let mut num = vec![BigInt::zero(); n + 1];
        let (va, vb) = (self.valuation(), other.valuation());
        if va + vb <= n {
            for i in va..=n - vb {
                let a = &self.num[i];
                if a.is_zero() {
                    continue;
                }
                for (slot, b) in num[i + vb..].iter_mut().zip(&other.num[vb..]) {
                    if !b.is_zero() {
                        *slot += a * b;
                    }
                }
            }
        }
        Ok(Self::normalized(n, num, &self.den * &other.den))
    }

    pub fn square(&self) -> Series {
        self * self
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut acc = Series::one(self.order);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &BigRational) -> Series {
        let num = self.num.iter().map(|a| a * c.numer()).collect();
        Self::normalized(self.order, num, &self.den * c.denom())
    }

    pub fn scale_int(&self, c: i64) -> Series {
        let c = BigInt::from(c);
        let num = self.num.iter().map(|a| a * &c).collect();
        Self::normalized(self.order, num, self.den.clone())
    }

    /// `1 / (1 - f)` via `g_0 = 1`, `g_k = sum_{j=1..k} f_j g_{k-j}`.
    pub fn inv1m(&self) -> Result<Series, SeriesError> {
        if !self.num[0].is_zero() {
            return Err(SeriesError::NonzeroConstant {
                constant: self.coeff(0).to_string(),
            });
        }
        let n = self.order;
        if self.is_integral() {
            let mut g: Vec<BigInt> = Vec::with_capacity(n + 1);
            g.push(BigInt::one());
            let v = self.valuation();
            for k in 1..=n {
                let mut acc = BigInt::zero();
                for j in v..=k {
                    let f = &self.num[j];
                    if !f.is_zero() {
                        acc += f * &g[k - j];
                    }
                }
                g.push(acc);
            }
            return Ok(Series {
                order: n,
                num: g,
                den: BigInt::one(),
            });
        }
        let f = self.coeffs();
        let mut g: Vec<BigRational> = vec![BigRational::one()];
        for k in 1..=n {
            let acc = (1..=k).fold(BigRational::zero(), |acc, j| acc + &f[j] * &g[k - j]);
            g.push(acc);
        }
        Ok(Series::from_rationals(n, &g))
    }

    /// `z f'(z)`: coefficient `k` is multiplied by `k`.
    pub fn zderiv(&self) -> Series {
        let num = self
            .num
            .iter()
            .enumerate()
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        Self::normalized(self.order, num, self.den.clone())
    }

    /// Exact division by `z^k`; the result has order `N - k`.
    pub fn divz(&self, k: usize) -> Result<Series, SeriesError> {
        if k > self.order {
            return Err(SeriesError::OrderTooSmall {
                order: self.order,
                k,
            });
        }
        let v = self.valuation();
        if v < k {
            return Err(SeriesError::InexactDivision { k, valuation: v });
        }
        Ok(Series {
            order: self.order - k,
            num: self.num[k..].to_vec(),
            den: self.den.clone(),
        })
    }

    /// Multiplication by `z^k`, keeping the order.
    pub fn mulz(&self, k: usize) -> Series {
        let mut num = vec![BigInt::zero(); self.order + 1];
        if k <= self.order {
            num[k..].clone_from_slice(&self.num[..=self.order - k]);
        }
        Self::normalized(self.order, num, self.den.clone())
    }

    pub fn truncate(&self, order: usize) -> Result<Series, SeriesError> {
        if order > self.order {
            return Err(SeriesError::Widening {
                from: self.order,
                to: order,
            });
        }
        Ok(Self::normalized(
            order,
            self.num[..=order].to_vec(),
            self.den.clone(),
        ))
    }

    /// Pad with zero coefficients up to `order`, or truncate down to it.
    pub(crate) fn resized(&self, order: usize) -> Series {
        let mut num = self.num.clone();
        num.resize(order + 1, BigInt::zero());
        Self::normalized(order, num, self.den.clone())
    }

    /// Square root with positive constant term.
    pub fn sqrt(&self) -> Result<Series, SeriesError> {
        let c0 = self.coeff(0);
        let root = rational_sqrt(&c0)
            .filter(|r| !r.is_zero())
            .ok_or_else(|| SeriesError::NotASquare {
                constant: c0.to_string(),
            })?;
        let f = self.coeffs();
        let two_g0 = &root * BigInt::from(2);
        let mut g = vec![root];
        for k in 1..=self.order {
            let cross = (1..k).fold(BigRational::zero(), |acc, j| acc + &g[j] * &g[k - j]);
            g.push((&f[k] - cross) / &two_g0);
        }
        Ok(Series::from_rationals(self.order, &g))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Series, SeriesError> {
        serde_json::from_str(text).map_err(|e| SeriesError::Malformed(e.to_string()))
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

fn panic_on<T>(r: Result<T, SeriesError>) -> T {
    r.unwrap_or_else(|e| panic!("{e}"))
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        panic_on(self.try_add(rhs))
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        panic_on(self.try_sub(rhs))
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        panic_on(self.try_mul(rhs))
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Series> for Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Series> for Series {
            type Output = Series;
            fn $m(self, rhs: &Series) -> Series {
                (&self).$m(rhs)
            }
        }
        impl $tr<Series> for &Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in 0..=self.order {
            let c = self.coeff(k);
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(z^{})", self.order + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    order: usize,
    coeffs: Vec<String>,
}

impl From<Series> for SeriesJson {
    fn from(s: Series) -> Self {
        SeriesJson {
            order: s.order,
            coeffs: s.coeffs().iter().map(ToString::to_string).collect(),
        }
    }
}

impl TryFrom<SeriesJson> for Series {
    type Error = SeriesError;

    fn try_from(j: SeriesJson) -> Result<Self, Self::Error> {
        if j.coeffs.len() != j.order.saturating_add(1) {
            return Err(SeriesError::Malformed(format!(
                "order {} needs {} coefficients, found {}",
                j.order,
                j.order.saturating_add(1),
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Series::from_rationals(j.order, &coeffs))
    }
}

/// Parse a decimal integer or a `p/q` ratio.
pub fn parse_rational(text: &str) -> Result<BigRational, SeriesError> {
    let bad = || SeriesError::Malformed(format!("bad coefficient {text:?}"));
    let int = |s: &str| -> Result<BigInt, SeriesError> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(int(text)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() || q.is_negative() {
                return Err(bad());
            }
            Ok(BigRational::new(int(p)?, q))
        }
    }
}
