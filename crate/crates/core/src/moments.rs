//! Exact finite-n moments and correlation coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::enumerate::{bundles_of_size, tree_count, EnumerateError, DEFAULT_CAP};
use crate::monomial::Factor;
use crate::numeric::rational_to_f64;
use crate::series::Series;
use crate::systems::{SolveError, Solver, SystemId};

/// Decimal digits kept when `r` is irrational.
pub const R_DIGITS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MomentError {
    #[error("n = {n} is outside 1..={order}")]
    OutOfRange { n: usize, order: usize },
    #[error("unknown index {0:?}; expected sigma, z, rho or wiener")]
    UnknownIndex(String),
    #[error("pair {0:?} must be written X:Y")]
    BadPair(String),
    #[error("the pair (wiener, wiener) needs E(W^2), which has no generating function here")]
    Unsupported,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Sigma,
    Z,
    Rho,
    Wiener,
}

impl Index {
    pub const ALL: [Index; 4] = [Index::Sigma, Index::Z, Index::Rho, Index::Wiener];

    pub fn name(self) -> &'static str {
        match self {
            Index::Sigma => "sigma",
            Index::Z => "z",
            Index::Rho => "rho",
            Index::Wiener => "wiener",
        }
    }

    fn factor(self) -> Factor {
        match self {
            Index::Sigma => Factor::Sigma,
            Index::Z => Factor::Z,
            Index::Rho => Factor::Rho,
            Index::Wiener => Factor::W,
        }
    }

    fn mean_system(self) -> SystemId {
        match self {
            Index::Sigma => SystemId::S,
            Index::Z => SystemId::Z,
            Index::Rho => SystemId::R,
            Index::Wiener => SystemId::W,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Index {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self, MomentError> {
        match s {
            "sigma" => Ok(Index::Sigma),
            "z" => Ok(Index::Z),
            "rho" => Ok(Index::Rho),
            "wiener" | "w" => Ok(Index::Wiener),
            _ => Err(MomentError::UnknownIndex(s.to_string())),
        }
    }
}

/// An ordered pair of indices such as `sigma:z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pair(pub Index, pub Index);

impl Pair {
    /// The six distinct pairs with tabulated correlation asymptotics.
    pub const TABLE: [Pair; 6] = [
        Pair(Index::Sigma, Index::Z),
        Pair(Index::Sigma, Index::Rho),
        Pair(Index::Z, Index::Rho),
        Pair(Index::Wiener, Index::Sigma),
        Pair(Index::Wiener, Index::Z),
        Pair(Index::Wiener, Index::Rho),
    ];

    pub fn involves_wiener(self) -> bool {
        self.0 == Index::Wiener || self.1 == Index::Wiener
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

impl FromStr for Pair {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self, MomentError> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| MomentError::BadPair(s.to_string()))?;
        Ok(Pair(a.trim().parse()?, b.trim().parse()?))
    }
}

/// Correlation coefficient of one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Correlation {
    /// A variance is zero.
    Undefined,
    /// A variance is not known exactly at this n.
    Unavailable,
    Exact(BigRational),
    /// `scaled / 10^R_DIGITS`, truncated toward zero; off by less than `10^-R_DIGITS`.
    Approx { scaled: BigInt },
}

impl Correlation {
    /// From exact covariance and variances.
    pub fn from_moments(cov: &BigRational, var_x: &BigRational, var_y: &BigRational) -> Self {
        let denom = var_x * var_y;
        if denom.is_zero() {
            return Correlation::Undefined;
        }
        let sq = cov * cov / denom;
        let (p, q) = (sq.numer(), sq.denom());
        let (rp, rq) = (p.sqrt(), q.sqrt());
        let sign = if cov.is_negative() { -1 } else { 1 };
        if &(&rp * &rp) == p && &(&rq * &rq) == q {
            return Correlation::Exact(BigRational::new(rp * sign, rq));
        }
        let scale = BigInt::from(10u32).pow(2 * R_DIGITS);
        let root = (p * scale / q).sqrt();
        Correlation::Approx {
            scaled: root * sign,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Correlation::Undefined | Correlation::Unavailable => None,
            Correlation::Exact(r) => Some(rational_to_f64(r)),
            Correlation::Approx { scaled } => Some(rational_to_f64(&BigRational::new(
                scaled.clone(),
                BigInt::from(10u32).pow(R_DIGITS),
            ))),
        }
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Correlation::Undefined => f.write_str("undefined"),
            Correlation::Unavailable => f.write_str("unavailable"),
            Correlation::Exact(r) => write!(f, "{r}"),
            Correlation::Approx { scaled } => {
                let digits = scaled.abs().to_string();
                let width = R_DIGITS as usize + 1;
                let padded = format!("{digits:0>width$}");
                let (int, frac) = padded.split_at(padded.len() - R_DIGITS as usize);
                let sign = if scaled.is_negative() { "-" } else { "" };
                write!(f, "{sign}{int}.{frac}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentRow {
    pub n: usize,
    pub e_x: BigRational,
    pub e_y: BigRational,
    pub e_xy: BigRational,
    /// `None` for Wiener beyond the enumeration cap.
    pub var_x: Option<BigRational>,
    pub var_y: Option<BigRational>,
    pub cov: BigRational,
    pub r: Correlation,
}

impl MomentRow {
    fn build(
        n: usize,
        e_x: BigRational,
        e_y: BigRational,
        e_xy: BigRational,
        e_xx: Option<BigRational>,
        e_yy: Option<BigRational>,
    ) -> Self {
        let var_x = e_xx.map(|m| m - &e_x * &e_x);
        let var_y = e_yy.map(|m| m - &e_y * &e_y);
        let cov = &e_xy - &e_x * &e_y;
        let r = match (&var_x, &var_y) {
            (Some(vx), Some(vy)) => Correlation::from_moments(&cov, vx, vy),
            _ => Correlation::Unavailable,
        };
        MomentRow {
            n,
            e_x,
            e_y,
            e_xy,
            var_x,
            var_y,
            cov,
            r,
        }
    }
}

/// `[z^n] total / t_n`.
pub fn expected(total: &Series, n: usize) -> Result<BigRational, MomentError> {
    if n == 0 || n > total.order() {
        return Err(MomentError::OutOfRange {
            n,
            order: total.order(),
        });
    }
    let t = BigInt::from(tree_count(n));
    Ok(total.coeff(n) / BigRational::from_integer(t))
}

pub(crate) fn product_system(a: Index, b: Index) -> Option<SystemId> {
    use Index::*;
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    Some(match (a, b) {
        (Sigma, Sigma) => SystemId::SS,
        (Z, Z) => SystemId::ZZ,
        (Rho, Rho) => SystemId::RR,
        (Sigma, Z) => SystemId::SZ,
        (Sigma, Rho) => SystemId::SR,
        (Z, Rho) => SystemId::ZR,
        (Sigma, Wiener) => SystemId::DSWS,
        (Z, Wiener) => SystemId::DZWZ,
        (Rho, Wiener) => SystemId::DRWR,
        (Wiener, Wiener) => return None,
        _ => unreachable!("pair is ordered above"),
    })
}

#[derive(Debug, Default, Clone)]
struct Sums {
    count: BigUint,
    x: BigUint,
    y: BigUint,
    xy: BigUint,
    xx: BigUint,
    yy: BigUint,
}

fn enumeration_sums(pair: Pair, n: usize, cap: usize) -> Result<Sums, MomentError> {
    let (fx, fy) = (pair.0.factor(), pair.1.factor());
    let mut s = Sums::default();
    for b in bundles_of_size(n, cap)? {
        let (x, y) = (fx.eval(&b), fy.eval(&b));
        accumulate(&mut s, x, y);
    }
    Ok(s)
}

fn accumulate(s: &mut Sums, x: BigUint, y: BigUint) {
    s.count += 1u32;
    s.xy += &x * &y;
    s.xx += &x * &x;
    s.yy += &y * &y;
    s.x += x;
    s.y += y;
}

fn ratio(a: &BigUint, count: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(a.clone()), BigInt::from(count.clone()))
}

/// Mean of `W_n^2` by enumeration.
fn wiener_square_mean(n: usize, cap: usize) -> Result<BigRational, MomentError> {
    let mut count = BigUint::zero();
    let mut sum = BigUint::zero();
    for b in bundles_of_size(n, cap)? {
        count += 1u32;
        sum += &b.w * &b.w;
    }
    Ok(ratio(&sum, &count))
}

/// Row computed by summing over every tree of size `n`.
pub fn enumeration_row(pair: Pair, n: usize) -> Result<MomentRow, MomentError> {
    enumeration_row_capped(pair, n, DEFAULT_CAP)
}

pub fn enumeration_row_capped(pair: Pair, n: usize, cap: usize) -> Result<MomentRow, MomentError> {
    let s = enumeration_sums(pair, n, cap)?;
    let c = &s.count;
    Ok(MomentRow::build(
        n,
        ratio(&s.x, c),
        ratio(&s.y, c),
        ratio(&s.xy, c),
        Some(ratio(&s.xx, c)),
        Some(ratio(&s.yy, c)),
    ))
}

/// Rows for `n = 1..=n_max` from the generating-function series.
///
/// `E(W_n^2)` comes from enumeration, so Wiener variances (and `r`) are
/// only filled in for `n <= wiener_cap`.
pub fn correlation_table(
    pair: Pair,
    n_max: usize,
    wiener_cap: usize,
) -> Result<Vec<MomentRow>, MomentError> {
    correlation_table_with(&mut Solver::new(), pair, n_max, wiener_cap)
}

pub fn correlation_table_with(
    solver: &mut Solver,
    pair: Pair,
    n_max: usize,
    wiener_cap: usize,
) -> Result<Vec<MomentRow>, MomentError> {
    let Pair(a, b) = pair;
    let cross = product_system(a, b).ok_or(MomentError::Unsupported)?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let mean_a = solver.solve(a.mean_system(), n_max)?.total;
    let mean_b = solver.solve(b.mean_system(), n_max)?.total;
    let cross = solver.solve(cross, n_max)?.total;
    let square = |solver: &mut Solver, i: Index| -> Result<Option<Series>, MomentError> {
        match product_system(i, i) {
            Some(id) => Ok(Some(solver.solve(id, n_max)?.total)),
            None => Ok(None),
        }
    };
    let sq_a = square(solver, a)?;
    let sq_b = square(solver, b)?;
    let second = |sq: &Option<Series>, n: usize| -> Result<Option<BigRational>, MomentError> {
        match sq {
            Some(s) => Ok(Some(expected(s, n)?)),
            None if n <= wiener_cap.min(DEFAULT_CAP) => Ok(Some(wiener_square_mean(n, DEFAULT_CAP)?)),
            None => Ok(None),
        }
    };
    (1..=n_max)
        .map(|n| {
            Ok(MomentRow::build(
                n,
                expected(&mean_a, n)?,
                expected(&mean_b, n)?,
                expected(&cross, n)?,
                second(&sq_a, n)?,
                second(&sq_b, n)?,
            ))
        })
        .collect()
}

/// Exact `E(X_n)` for one index.
pub fn mean(solver: &mut Solver, index: Index, n: usize) -> Result<BigRational, MomentError> {
    expected(&solver.solve(index.mean_system(), n)?.total, n)
}

/// Exact `Var(X_n)` for sigma, z or rho.
pub fn variance(solver: &mut Solver, index: Index, n: usize) -> Result<BigRational, MomentError> {
    let id = product_system(index, index).ok_or(MomentError::Unsupported)?;
    let m = mean(solver, index, n)?;
    Ok(expected(&solver.solve(id, n)?.total, n)? - &m * &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn expected_examples() {
        let mut solver = Solver::new();
        assert_eq!(mean(&mut solver, Index::Sigma, 1).unwrap(), q(2, 1));
        assert_eq!(mean(&mut solver, Index::Sigma, 3).unwrap(), q(5, 1));
        assert_eq!(mean(&mut solver, Index::Rho, 3).unwrap(), q(6, 1));
        let s = solver.solve(SystemId::S, 3).unwrap().total;
        assert!(matches!(expected(&s, 4), Err(MomentError::OutOfRange { .. })));
        assert!(matches!(expected(&s, 0), Err(MomentError::OutOfRange { .. })));
    }

    #[test]
    fn self_correlation_is_one() {
        let rows = correlation_table(Pair(Index::Sigma, Index::Sigma), 8, 0).unwrap();
        assert_eq!(rows[0].r, Correlation::Undefined);
        for row in &rows[3..] {
            assert_eq!(row.r, Correlation::Exact(BigRational::one()), "n={}", row.n);
        }
    }

    #[test]
    fn identical_trees_give_undefined() {
        let rows = correlation_table(Pair(Index::Sigma, Index::Z), 3, 0).unwrap();
        assert_eq!(rows[2].var_x, Some(BigRational::zero()));
        assert_eq!(rows[2].r, Correlation::Undefined);
    }

    #[test]
    fn wiener_square_is_unsupported() {
        let err = correlation_table(Pair(Index::Wiener, Index::Wiener), 5, 5).unwrap_err();
        assert_eq!(err, MomentError::Unsupported);
    }

    #[test]
    fn irrational_r_is_truncated() {
        // cov^2 / (vx vy) = 1/2
        let r = Correlation::from_moments(&q(1, 1), &q(1, 1), &q(2, 1));
        let shown = r.to_string();
        assert_eq!(shown, "0.7071067811865475244008443621048490392848");
        let r = Correlation::from_moments(&q(-1, 1), &q(1, 1), &q(2, 1));
        assert!(r.to_string().starts_with("-0.70710678"));
        assert!((r.to_f64().unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("sigma:z".parse::<Pair>().unwrap(), Pair(Index::Sigma, Index::Z));
        assert!("sigma".parse::<Pair>().is_err());
        assert!("sigma:omega".parse::<Pair>().is_err());
    }

    #[test]
    fn small_correlation_matches_enumeration() {
        let rows = correlation_table(Pair(Index::Sigma, Index::Z), 5, 0).unwrap();
        assert_eq!(rows[4], enumeration_row(Pair(Index::Sigma, Index::Z), 5).unwrap());
        assert!(rows[4].r.to_f64().unwrap() < 0.0);
    }
}
