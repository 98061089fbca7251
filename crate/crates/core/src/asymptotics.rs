//! Published asymptotic constants, numerical singularity estimates and the
//! composition of the correlation asymptotics.
//!
//! Every moment is modelled as `A * b^n * n^alpha`. Constants with a closed
//! form are evaluated from it; the rest hold the published decimals as is.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::enumerate::DEFAULT_CAP;
use crate::moments::{self, product_system, Index, MomentError, Pair};
use crate::numeric::{ln_rational, rational_to_f64};
use crate::series::Series;
use crate::systems::{Solver, SystemId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticError {
    #[error("unknown quantity {0:?}")]
    UnknownQuantity(String),
    #[error("no catalog entry for {0}")]
    Missing(String),
    #[error("fit window ({lo}, {hi}) is empty or exceeds the series order {order}")]
    Window { lo: usize, hi: usize, order: usize },
    #[error("coefficient at z^{0} is not positive")]
    Nonpositive(usize),
    #[error("polynomial has no sign change on [{lo}, {hi}]")]
    Bracket { lo: String, hi: String },
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// A moment of the uniform random tree of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Mean(Index),
    Product(Index, Index),
    Variance(Index),
}

impl Quantity {
    /// Canonical form: products ordered with Wiener first, then sigma, z, rho.
    fn canonical(self) -> Self {
        match self {
            Quantity::Product(a, b) => {
                let key = |i: Index| if i == Index::Wiener { 0 } else { i as u8 + 1 };
                if key(a) <= key(b) {
                    Quantity::Product(a, b)
                } else {
                    Quantity::Product(b, a)
                }
            }
            q => q,
        }
    }

    /// Exact value at size `n`. Wiener variances come from enumeration.
    pub fn exact(self, solver: &mut Solver, n: usize) -> Result<BigRational, AsymptoticError> {
        Ok(match self {
            Quantity::Mean(i) => moments::mean(solver, i, n)?,
            Quantity::Variance(Index::Wiener) => {
                let row = moments::enumeration_row(Pair(Index::Wiener, Index::Wiener), n)?;
                row.var_x.expect("enumeration gives both variances")
            }
            Quantity::Variance(i) => moments::variance(solver, i, n)?,
            Quantity::Product(a, b) => {
                let id = product_system(a, b).ok_or(MomentError::Unsupported)?;
                moments::expected(&solver.solve(id, n).map_err(MomentError::from)?.total, n)?
            }
        })
    }
}

fn short(i: Index) -> &'static str {
    match i {
        Index::Wiener => "w",
        i => i.name(),
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.canonical() {
            Quantity::Mean(i) => write!(f, "E({})", short(i)),
            Quantity::Variance(i) => write!(f, "Var({})", short(i)),
            Quantity::Product(a, b) => write!(f, "E({}*{})", short(a), short(b)),
        }
    }
}

impl FromStr for Quantity {
    type Err = AsymptoticError;

    fn from_str(s: &str) -> Result<Self, AsymptoticError> {
        let bad = || AsymptoticError::UnknownQuantity(s.to_string());
        let t = s.trim();
        let (head, inner) = t
            .strip_suffix(')')
            .and_then(|body| body.split_once('('))
            .ok_or_else(bad)?;
        let index = |x: &str| x.trim().parse::<Index>().map_err(|_| bad());
        let q = match head.trim() {
            "E" => match inner.split_once('*') {
                Some((a, b)) => Quantity::Product(index(a)?, index(b)?),
                None => Quantity::Mean(index(inner)?),
            },
            "Var" => Quantity::Variance(index(inner)?),
            _ => return Err(bad()),
        };
        Ok(q.canonical())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticConstant {
    pub quantity: Quantity,
    pub amplitude: f64,
    /// Closed form of the amplitude when one is published.
    pub amplitude_form: Option<&'static str>,
    pub base: f64,
    pub base_form: Option<&'static str>,
    pub alpha: f64,
    pub source: &'static str,
}

impl AsymptoticConstant {
    /// `A * b^n * n^alpha`.
    pub fn eval(&self, n: usize) -> f64 {
        self.ln_eval(n).exp()
    }

    pub fn ln_eval(&self, n: usize) -> f64 {
        let n = n as f64;
        self.amplitude.ln() + n * self.base.ln() + self.alpha * n.ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationAsymptotic {
    pub pair: Pair,
    pub amplitude: f64,
    pub base: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityRecord {
    pub system: SystemId,
    pub z0: f64,
    pub exact_form: Option<&'static str>,
    /// Integer coefficients, constant term first.
    pub polynomial: Option<Vec<i64>>,
    /// Remaining factors of the published polynomial; none has a real root
    /// inside the bounds.
    pub other_factors: Vec<Vec<i64>>,
    /// Radius-of-convergence bounds `[lo, hi]`.
    pub interval: (f64, f64),
    /// Local expansion `c0 - c1 sqrt(1 - z/z0)` of the system total.
    pub expansion: (f64, f64),
}

impl SingularityRecord {
    /// Whether an estimate of `1/z0` is consistent with the radius bounds.
    pub fn admits_inverse(&self, inv_z0: f64) -> bool {
        inv_z0 >= 1.0 / self.interval.1 && inv_z0 <= 1.0 / self.interval.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub constants: Vec<AsymptoticConstant>,
    pub correlations: Vec<CorrelationAsymptotic>,
    pub singularities: Vec<SingularityRecord>,
}

impl Catalog {
    pub fn constant(&self, q: Quantity) -> Option<&AsymptoticConstant> {
        let q = q.canonical();
        self.constants.iter().find(|c| c.quantity == q)
    }

    pub fn lookup(&self, name: &str) -> Result<&AsymptoticConstant, AsymptoticError> {
        let q: Quantity = name.parse()?;
        self.constant(q)
            .ok_or_else(|| AsymptoticError::Missing(q.to_string()))
    }

    pub fn correlation(&self, pair: Pair) -> Option<&CorrelationAsymptotic> {
        self.correlations.iter().find(|c| c.pair == pair)
    }

    pub fn singularity(&self, id: SystemId) -> Option<&SingularityRecord> {
        self.singularities.iter().find(|s| s.system == id)
    }
}

/// Reference catalog of asymptotic constants.
pub fn reference_catalog() -> Catalog {
    use Index::*;
    let s13 = 13f64.sqrt();
    let s5 = 5f64.sqrt();
    let s14 = 14f64.sqrt();
    let sp = PI.sqrt();
    let c = |quantity, amplitude, amplitude_form, base, base_form, alpha, source| {
        AsymptoticConstant {
            quantity,
            amplitude,
            amplitude_form,
            base,
            base_form,
            alpha,
            source,
        }
    };
    let zr_c1 = (5.0 * (128985.0 + 57683.0 * s5) / 58.0).sqrt() / 232.0;
    let constants = vec![
        c(
            Quantity::Mean(Sigma),
            3f64.sqrt() * 16.0 / 27.0,
            Some("sqrt(3) (27/16)^(n-1), rewritten as (16 sqrt(3)/27) (27/16)^n"),
            27.0 / 16.0,
            Some("27/16"),
            0.0,
            "mean of the sigma-index, singularity of S2 at 4/27",
        ),
        c(
            Quantity::Mean(Z),
            ((65.0 - s13) / 78.0).sqrt(),
            Some("sqrt((65 - sqrt(13))/78)"),
            (35.0 + 13.0 * s13) / 54.0,
            Some("(35 + 13 sqrt(13))/54"),
            0.0,
            "mean of the Z-index, singularity of Z2 at (13 sqrt(13) - 35)/72",
        ),
        c(
            Quantity::Mean(Rho),
            16.0 / (3.0 * 15f64.sqrt()),
            Some("16/(3 sqrt(15))"),
            25.0 / 16.0,
            Some("25/16"),
            0.0,
            "mean of the rho-index, singularity of R1 at 4/25",
        ),
        c(
            Quantity::Product(Sigma, Z),
            0.92565,
            None,
            2.54408,
            None,
            0.0,
            "square-root singularity of SZ at 0.0982673",
        ),
        c(
            Quantity::Product(Sigma, Rho),
            1.36653,
            None,
            2.66477,
            None,
            0.0,
            "square-root singularity of SR at 0.0938166",
        ),
        c(
            Quantity::Product(Z, Rho),
            2.0 * zr_c1,
            Some("(1/116) sqrt(5 (128985 + 57683 sqrt(5))/58)"),
            8.0 * (7.0 - 3.0 * s5),
            Some("8 (7 - 3 sqrt(5))"),
            0.0,
            "square-root singularity of ZR at (7 + 3 sqrt(5))/128",
        ),
        c(
            Quantity::Variance(Sigma),
            1.03802,
            None,
            2.86096,
            None,
            0.0,
            "square-root singularity of SS at 0.0873832",
        ),
        c(
            Quantity::Variance(Z),
            0.77227,
            None,
            2.31549,
            None,
            0.0,
            "square-root singularity of ZZ at 0.107969",
        ),
        c(
            Quantity::Variance(Rho),
            64.0 * s14 / 147.0,
            Some("64 sqrt(14)/147"),
            81.0 / 32.0,
            Some("81/32"),
            0.0,
            "square-root singularity of RR at 8/81",
        ),
        c(
            Quantity::Mean(Wiener),
            sp / 4.0,
            Some("sqrt(pi)/4"),
            1.0,
            Some("1"),
            2.5,
            "mean Wiener index of plane trees",
        ),
        c(
            Quantity::Variance(Wiener),
            (16.0 - 5.0 * PI) / 80.0,
            Some("(16 - 5 pi)/80"),
            1.0,
            Some("1"),
            5.0,
            "variance of the Wiener index, quoted from Janson",
        ),
        c(
            Quantity::Product(Wiener, Sigma),
            20.0 * sp / 81.0,
            Some("20 sqrt(pi)/81"),
            27.0 / 16.0,
            Some("27/16"),
            2.5,
            "double pole of WS at 4/27",
        ),
        c(
            Quantity::Product(Wiener, Z),
            (91.0 - 5.0 * s13) * sp / 312.0,
            Some("(91 - 5 sqrt(13)) sqrt(pi)/312"),
            (35.0 + 13.0 * s13) / 54.0,
            Some("(35 + 13 sqrt(13))/54"),
            2.5,
            "double pole of WZ at (13 sqrt(13) - 35)/72",
        ),
        c(
            Quantity::Product(Wiener, Rho),
            4.0 * sp / 15.0,
            Some("4 sqrt(pi)/15"),
            25.0 / 16.0,
            Some("25/16"),
            2.5,
            "double pole of WR at 4/25",
        ),
    ];
    let r = |a, b, amplitude, base| CorrelationAsymptotic {
        pair: Pair(a, b),
        amplitude,
        base,
    };
    let correlations = vec![
        r(Sigma, Z, -1.01706, 0.99405),
        r(Sigma, Rho, 1.05088, 0.99023),
        r(Z, Rho, -1.08924, 0.97853),
        r(Wiener, Sigma, -0.27891, 0.99767),
        r(Wiener, Z, 0.40351, 0.99637),
        r(Wiener, Rho, -1.78357, 0.98209),
    ];
    let lo = 1.0 / 16.0;
    let s = |system, z0, exact_form, polynomial, other_factors, hi, expansion| {
        SingularityRecord {
            system,
            z0,
            exact_form,
            polynomial,
            other_factors,
            interval: (lo, hi),
            expansion,
        }
    };
    let singularities = vec![
        s(
            SystemId::SZ,
            0.0982673,
            None,
            None,
            vec![],
            (13.0 * s13 - 35.0) * (s5 - 1.0) / 144.0,
            (0.427020, 0.462827),
        ),
        s(
            SystemId::SR,
            0.0938166,
            None,
            Some(vec![3844, -40936, -412, 125]),
            vec![vec![-4, 27], vec![81, 0, 8]],
            2.0 * (s5 - 1.0) / 25.0,
            (0.560623, 0.683264),
        ),
        s(
            SystemId::ZR,
            (7.0 + 3.0 * s5) / 128.0,
            Some("(7 + 3 sqrt(5))/128"),
            Some(vec![1, -448, 4096]),
            vec![vec![531441, 2894400, 2560000]],
            4.0 / 25.0,
            ((211.0 + 93.0 * s5) / 928.0, zr_c1),
        ),
        s(
            SystemId::SS,
            0.0873832,
            None,
            None,
            vec![],
            64.0 / 729.0,
            (0.614803, 0.519010),
        ),
        s(
            SystemId::ZZ,
            0.107969,
            None,
            None,
            vec![],
            (1711.0 - 455.0 * s13) / 648.0,
            (0.296221, 0.386136),
        ),
        s(
            SystemId::RR,
            8.0 / 81.0,
            Some("8/81"),
            None,
            vec![],
            64.0 / 625.0,
            (
                (2432.0 * 2f64.sqrt() - 1632.0) / 3087.0,
                32.0 * s14 / 147.0,
            ),
        ),
    ];
    Catalog {
        constants,
        correlations,
        singularities,
    }
}

/// Radii of convergence of the base systems.
pub fn base_singularities() -> [(SystemId, f64, &'static str); 4] {
    [
        (SystemId::T, 0.25, "1/4"),
        (SystemId::S, 4.0 / 27.0, "4/27"),
        (SystemId::Z, (13.0 * 13f64.sqrt() - 35.0) / 72.0, "(13 sqrt(13) - 35)/72"),
        (SystemId::R, 4.0 / 25.0, "4/25"),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEstimate {
    /// Intercept `a` of `f_{n+1}/f_n = a + b/n`.
    pub inv_z0: f64,
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least-squares fit of successive coefficient ratios against `1/n` over
/// `lo <= n < hi`.
pub fn estimate_growth(
    total: &Series,
    lo: usize,
    hi: usize,
) -> Result<GrowthEstimate, AsymptoticError> {
    if lo == 0 || hi <= lo + 1 || hi > total.order() {
        return Err(AsymptoticError::Window {
            lo,
            hi,
            order: total.order(),
        });
    }
    for k in lo..=hi {
        if !total.coeff(k).is_positive() {
            return Err(AsymptoticError::Nonpositive(k));
        }
    }
    let points: Vec<(f64, f64)> = (lo..hi)
        .map(|k| {
            let q = total.coeff(k + 1) / total.coeff(k);
            (1.0 / k as f64, rational_to_f64(&q))
        })
        .collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(GrowthEstimate {
        inv_z0: intercept,
        slope,
        residual: (ss / m).sqrt(),
    })
}

/// Root bracket found by exact bisection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Root {
    pub fn value(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Horner evaluation; coefficients constant term first.
pub fn eval_poly(coeffs: &[BigInt], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// Default bisection width.
pub fn root_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u64.pow(12)))
}

/// Bisect until the bracket is no wider than `tol`. Every sign decision is
/// made in exact arithmetic.
pub fn find_root(
    coeffs: &[BigInt],
    lo: BigRational,
    hi: BigRational,
    tol: &BigRational,
) -> Result<Root, AsymptoticError> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let sign = |x: &BigRational| eval_poly(coeffs, x).signum();
    let s_lo = sign(&lo);
    let s_hi = sign(&hi);
    if s_lo.is_zero() {
        return Ok(Root { lo: lo.clone(), hi: lo });
    }
    if s_hi.is_zero() {
        return Ok(Root { lo: hi.clone(), hi });
    }
    if s_lo == s_hi {
        return Err(AsymptoticError::Bracket {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let two = BigRational::from_integer(2.into());
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi) / &two;
        let s = sign(&mid);
        if s.is_zero() {
            return Ok(Root { lo: mid.clone(), hi: mid });
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Root { lo, hi })
}

/// Parse a decimal such as `0.09` into an exact rational.
pub fn decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let neg = int.starts_with('-');
    let int = int.trim_start_matches('-');
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().ok()? / 10;
    let q = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if neg { -q } else { q })
}

struct Term {
    amplitude: f64,
    ln_base: f64,
    alpha: f64,
}

/// Compose each correlation of the catalog from its component moments.
///
/// The covariance numerator keeps whichever of `E(XY)` and `E(X) E(Y)` has
/// the larger growth, or both when they grow alike.
pub fn compose_correlations(catalog: &Catalog) -> Result<Vec<CorrelationAsymptotic>, AsymptoticError> {
    catalog
        .correlations
        .iter()
        .map(|c| compose_pair(catalog, c.pair))
        .collect()
}

pub fn compose_pair(catalog: &Catalog, pair: Pair) -> Result<CorrelationAsymptotic, AsymptoticError> {
    let get = |q: Quantity| {
        catalog
            .constant(q)
            .ok_or_else(|| AsymptoticError::Missing(q.to_string()))
    };
    let Pair(x, y) = pair;
    let (ex, ey) = (get(Quantity::Mean(x))?, get(Quantity::Mean(y))?);
    let exy = get(Quantity::Product(x, y))?;
    let (vx, vy) = (get(Quantity::Variance(x))?, get(Quantity::Variance(y))?);
    let joint = Term {
        amplitude: exy.amplitude,
        ln_base: exy.base.ln(),
        alpha: exy.alpha,
    };
    let product = Term {
        amplitude: ex.amplitude * ey.amplitude,
        ln_base: ex.base.ln() + ey.base.ln(),
        alpha: ex.alpha + ey.alpha,
    };
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let numerator = if same(joint.ln_base, product.ln_base) && same(joint.alpha, product.alpha) {
        Term {
            amplitude: joint.amplitude - product.amplitude,
            ..joint
        }
    } else if joint.ln_base > product.ln_base
        || (same(joint.ln_base, product.ln_base) && joint.alpha > product.alpha)
    {
        joint
    } else {
        Term {
            amplitude: -product.amplitude,
            ..product
        }
    };
    let denom_amp = (vx.amplitude * vy.amplitude).sqrt();
    let denom_ln_base = 0.5 * (vx.base.ln() + vy.base.ln());
    Ok(CorrelationAsymptotic {
        pair,
        amplitude: numerator.amplitude / denom_amp,
        base: (numerator.ln_base - denom_ln_base).exp(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub exact: BigRational,
    pub asymptotic: f64,
    /// `exact / asymptotic`.
    pub ratio: f64,
}

/// Exact values against the catalog asymptotic at the requested sizes.
pub fn convergence_report(
    solver: &mut Solver,
    catalog: &Catalog,
    quantity: Quantity,
    sizes: &[usize],
) -> Result<Vec<ConvergenceRow>, AsymptoticError> {
    let constant = catalog
        .constant(quantity)
        .ok_or_else(|| AsymptoticError::Missing(quantity.to_string()))?;
    if quantity == Quantity::Variance(Index::Wiener) {
        if let Some(&n) = sizes.iter().find(|&&n| n > DEFAULT_CAP) {
            return Err(MomentError::from(crate::enumerate::EnumerateError::OverCap {
                n,
                cap: DEFAULT_CAP,
            })
            .into());
        }
    }
    if let Some(&top) = sizes.iter().max() {
        // one solve at the largest size; smaller ones come from the memo
        if top > 0 && quantity != Quantity::Variance(Index::Wiener) {
            quantity.exact(solver, top)?;
        }
    }
    sizes
        .iter()
        .map(|&n| {
            let exact = quantity.exact(solver, n)?;
            let ln_ratio = if exact.is_positive() {
                ln_rational(&exact) - constant.ln_eval(n)
            } else {
                f64::NEG_INFINITY
            };
            Ok(ConvergenceRow {
                n,
                asymptotic: constant.eval(n),
                ratio: ln_ratio.exp(),
                exact,
            })
        })
        .collect()
}

/// Sizes `lo, lo+step, ..., hi`.
pub fn size_grid(lo: usize, hi: usize, step: usize) -> Vec<usize> {
    (lo..=hi).step_by(step.max(1)).collect()
}

/// Least-squares slope of `ln|ratio - 1|` against `ln n`.
pub fn error_slope(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), (r.ratio - 1.0).abs().ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// First index after which `|ratio - 1|` never increases again, if the last
/// two rows already decrease.
pub fn monotone_from(rows: &[ConvergenceRow]) -> Option<usize> {
    let err: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    let mut start = err.len().checked_sub(1)?;
    while start > 0 && err[start - 1] > err[start] {
        start -= 1;
    }
    if start + 1 >= err.len() {
        None
    } else {
        Some(rows[start].n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn lookup_examples() {
        let cat = reference_catalog();
        let sz = cat.lookup("E(sigma*z)").unwrap();
        assert_eq!((sz.amplitude, sz.base), (0.92565, 2.54408));
        assert_eq!(cat.lookup("E(z*sigma)").unwrap(), sz);
        let vr = cat.lookup("Var(rho)").unwrap();
        assert!(rel(vr.amplitude, 64.0 * 14f64.sqrt() / 147.0) < 1e-15);
        assert_eq!(vr.base, 81.0 / 32.0);
        assert_eq!(cat.singularity(SystemId::RR).unwrap().z0, 8.0 / 81.0);
        assert!(cat.lookup("E(omega)").is_err());
    }

    #[test]
    fn closed_forms_match_printed_decimals() {
        let cat = reference_catalog();
        let amp = |q: &str| cat.lookup(q).unwrap().amplitude;
        let base = |q: &str| cat.lookup(q).unwrap().base;
        assert!((amp("E(rho)") - 1.37706).abs() < 5e-6);
        assert!((amp("E(z)") - 0.88719).abs() < 5e-6);
        assert!((base("E(z)") - 1.51615).abs() < 5e-6);
        assert!((amp("E(sigma)") - 1.02640).abs() < 5e-6);
        assert_eq!(base("Var(rho)"), 2.53125);
        let zr = cat.singularity(SystemId::ZR).unwrap();
        assert!((zr.z0 - 0.107095).abs() < 5e-7);
    }

    #[test]
    fn quantity_names_round_trip() {
        for name in ["E(sigma)", "Var(z)", "E(w*rho)", "E(sigma*z)", "Var(w)"] {
            assert_eq!(name.parse::<Quantity>().unwrap().to_string(), name);
        }
        assert_eq!("E(rho*w)".parse::<Quantity>().unwrap().to_string(), "E(w*rho)");
        assert!("Cov(sigma)".parse::<Quantity>().is_err());
        assert!("E(sigma".parse::<Quantity>().is_err());
    }

    #[test]
    fn linear_root() {
        let poly = [BigInt::from(-4), BigInt::from(27)];
        let root = find_root(
            &poly,
            decimal("0.14").unwrap(),
            decimal("0.15").unwrap(),
            &root_tolerance(),
        )
        .unwrap();
        assert!((root.value() - 4.0 / 27.0).abs() < 1e-12);
        let err = find_root(&poly, decimal("0.2").unwrap(), decimal("0.3").unwrap(), &root_tolerance());
        assert!(matches!(err, Err(AsymptoticError::Bracket { .. })));
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(
            decimal("0.09").unwrap(),
            BigRational::new(9.into(), 100.into())
        );
        assert_eq!(decimal("-1.5").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert!(decimal("1e5").is_none());
        assert!(decimal(".").is_none());
    }

    #[test]
    fn expansions_give_amplitudes() {
        let cat = reference_catalog();
        let pairs = [
            (SystemId::SZ, "E(sigma*z)"),
            (SystemId::SR, "E(sigma*rho)"),
            (SystemId::ZR, "E(z*rho)"),
            (SystemId::SS, "Var(sigma)"),
            (SystemId::ZZ, "Var(z)"),
            (SystemId::RR, "Var(rho)"),
        ];
        for (id, q) in pairs {
            let s = cat.singularity(id).unwrap();
            let c = cat.lookup(q).unwrap();
            assert!(rel(2.0 * s.expansion.1, c.amplitude) < 1e-5, "{id}");
            assert!(rel(1.0 / (4.0 * s.z0), c.base) < 1e-5, "{id}");
            assert!(s.z0 > s.interval.0 && s.z0 < s.interval.1, "{id}");
        }
    }
}
