//! Functional-equation systems for the index generating functions.
//!
//! Every system is solved by z-adic fixed-point iteration from the zero
//! vector. Each right-hand side raises the valuation of a perturbation in
//! any unknown by at least one, or depends on an unknown updated earlier in
//! the same sweep, so after sweep `k` all coefficients up to `z^k` are final.
//! Sweep `k` therefore works at order `min(k, N)`; `N + 1` sweeps are run and
//! one more full-order sweep must reproduce the result exactly.
//!
//! Valuations of the base series: `T`, `S1`, `S2`, `Z2`, `R1` start at `z`;
//! `Z1`, `R2`, `D`, `W` start at `z^2`.
//!
//! Divisions by `z^k` only ever apply to known series. Such coefficients are
//! built from dependencies solved `MARGIN` orders higher and then truncated,
//! so no precision is lost.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::monomial::{Factor, Monomial};
use crate::series::{Series, SeriesError};

/// Extra order at which dependencies are solved.
const MARGIN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    T,
    S,
    Z,
    R,
    D,
    W,
    SZ,
    SR,
    ZR,
    SS,
    ZZ,
    RR,
    DSWS,
    DZWZ,
    DRWR,
}

impl SystemId {
    pub const ALL: [SystemId; 15] = [
        SystemId::T,
        SystemId::S,
        SystemId::Z,
        SystemId::R,
        SystemId::D,
        SystemId::W,
        SystemId::SZ,
        SystemId::SR,
        SystemId::ZR,
        SystemId::SS,
        SystemId::ZZ,
        SystemId::RR,
        SystemId::DSWS,
        SystemId::DZWZ,
        SystemId::DRWR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::T => "T",
            SystemId::S => "S",
            SystemId::Z => "Z",
            SystemId::R => "R",
            SystemId::D => "D",
            SystemId::W => "W",
            SystemId::SZ => "SZ",
            SystemId::SR => "SR",
            SystemId::ZR => "ZR",
            SystemId::SS => "SS",
            SystemId::ZZ => "ZZ",
            SystemId::RR => "RR",
            SystemId::DSWS => "DSWS",
            SystemId::DZWZ => "DZWZ",
            SystemId::DRWR => "DRWR",
        }
    }

    pub fn dependencies(self) -> &'static [SystemId] {
        use SystemId::*;
        match self {
            T | S | Z | SZ | SS | ZZ => &[],
            R | D => &[T],
            W => &[T, D],
            SR | DSWS => &[S],
            ZR | DZWZ => &[Z],
            RR => &[T, R],
            DRWR => &[T, R, D, W],
        }
    }

    /// Unknown names with the monomial each one sums over all trees.
    pub fn unknowns(self) -> Vec<(&'static str, Monomial)> {
        use Factor::*;
        let m = |fs: &[(Factor, u32)]| Monomial::new(fs.iter().copied());
        let pairs = |names: [&'static str; 4], a: [Factor; 2], b: [Factor; 2]| {
            vec![
                (names[0], m(&[(a[0], 1), (b[0], 1)])),
                (names[1], m(&[(a[0], 1), (b[1], 1)])),
                (names[2], m(&[(a[1], 1), (b[0], 1)])),
                (names[3], m(&[(a[1], 1), (b[1], 1)])),
            ]
        };
        let squares = |names: [&'static str; 3], a: [Factor; 2]| {
            vec![
                (names[0], m(&[(a[0], 2)])),
                (names[1], m(&[(a[0], 1), (a[1], 1)])),
                (names[2], m(&[(a[1], 2)])),
            ]
        };
        match self {
            SystemId::T => vec![("T", m(&[]))],
            SystemId::S => vec![("S1", m(&[(Sigma1, 1)])), ("S2", m(&[(Sigma2, 1)]))],
            SystemId::Z => vec![("Z1", m(&[(Z1, 1)])), ("Z2", m(&[(Z2, 1)]))],
            SystemId::R => vec![("R1", m(&[(Rho1, 1)])), ("R2", m(&[(Rho2, 1)]))],
            SystemId::D => vec![("D", m(&[(D, 1)]))],
            SystemId::W => vec![("W", m(&[(W, 1)]))],
            SystemId::SZ => pairs(["SZ11", "SZ12", "SZ21", "SZ22"], [Sigma1, Sigma2], [Z1, Z2]),
            SystemId::SR => pairs(
                ["SR11", "SR12", "SR21", "SR22"],
                [Sigma1, Sigma2],
                [Rho1, Rho2],
            ),
            SystemId::ZR => pairs(["ZR11", "ZR12", "ZR21", "ZR22"], [Z1, Z2], [Rho1, Rho2]),
            SystemId::SS => squares(["SS11", "SS12", "SS22"], [Sigma1, Sigma2]),
            SystemId::ZZ => squares(["ZZ11", "ZZ12", "ZZ22"], [Z1, Z2]),
            SystemId::RR => squares(["RR11", "RR12", "RR22"], [Rho1, Rho2]),
            SystemId::DSWS => pairs(["DS1", "DS2", "WS1", "WS2"], [D, W], [Sigma1, Sigma2]),
            SystemId::DZWZ => pairs(["DZ1", "DZ2", "WZ1", "WZ2"], [D, W], [Z1, Z2]),
            SystemId::DRWR => pairs(["DR1", "DR2", "WR1", "WR2"], [D, W], [Rho1, Rho2]),
        }
    }

    /// Weights of the unknowns in the system total.
    pub fn total_weights(self) -> Vec<i64> {
        match self {
            SystemId::T | SystemId::D | SystemId::W => vec![1],
            SystemId::S | SystemId::Z | SystemId::R => vec![1, 1],
            SystemId::SZ | SystemId::SR | SystemId::ZR => vec![1, 1, 1, 1],
            SystemId::SS | SystemId::ZZ | SystemId::RR => vec![1, 2, 1],
            SystemId::DSWS | SystemId::DZWZ | SystemId::DRWR => vec![0, 0, 1, 1],
        }
    }

    /// Monomial summed by the total.
    pub fn total_monomial(self) -> Monomial {
        use Factor::*;
        let m = |fs: &[(Factor, u32)]| Monomial::new(fs.iter().copied());
        match self {
            SystemId::T => m(&[]),
            SystemId::S => m(&[(Sigma, 1)]),
            SystemId::Z => m(&[(Z, 1)]),
            SystemId::R => m(&[(Rho, 1)]),
            SystemId::D => m(&[(D, 1)]),
            SystemId::W => m(&[(W, 1)]),
            SystemId::SZ => m(&[(Sigma, 1), (Z, 1)]),
            SystemId::SR => m(&[(Sigma, 1), (Rho, 1)]),
            SystemId::ZR => m(&[(Z, 1), (Rho, 1)]),
            SystemId::SS => m(&[(Sigma, 2)]),
            SystemId::ZZ => m(&[(Z, 2)]),
            SystemId::RR => m(&[(Rho, 2)]),
            SystemId::DSWS => m(&[(W, 1), (Sigma, 1)]),
            SystemId::DZWZ => m(&[(W, 1), (Z, 1)]),
            SystemId::DRWR => m(&[(W, 1), (Rho, 1)]),
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, SolveError> {
        let key: String = s.chars().filter(|&c| c != '/').collect::<String>().to_uppercase();
        SystemId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| SolveError::UnknownSystem(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("unknown system {0:?}; expected one of T, S, Z, R, D, W, SZ, SR, ZR, SS, ZZ, RR, DS/WS, DZ/WZ, DR/WR")]
    UnknownSystem(String),
    #[error("truncation order must be at least 1")]
    ZeroOrder,
    #[error("{system}: unknown {unknown} has coefficient {value} at z^{power}, expected a nonnegative integer (equation transcription error)")]
    Transcription {
        system: SystemId,
        unknown: &'static str,
        power: usize,
        value: String,
    },
    #[error("{system}: unknown {unknown} still changes at z^{power} after the final sweep")]
    NotConverged {
        system: SystemId,
        unknown: &'static str,
        power: usize,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub id: SystemId,
    pub order: usize,
    pub unknowns: Vec<(&'static str, Series)>,
    pub total: Series,
}

impl SystemSolution {
    pub fn get(&self, name: &str) -> Option<&Series> {
        self.unknowns
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s)
    }

    /// Series of the named unknown; panics when the system has no such name.
    pub fn series(&self, name: &str) -> &Series {
        self.get(name)
            .unwrap_or_else(|| panic!("{} has no unknown {name}", self.id))
    }

    pub fn truncate(&self, order: usize) -> Result<SystemSolution, SeriesError> {
        Ok(SystemSolution {
            id: self.id,
            order,
            unknowns: self
                .unknowns
                .iter()
                .map(|(n, s)| Ok((*n, s.truncate(order)?)))
                .collect::<Result<_, SeriesError>>()?,
            total: self.total.truncate(order)?,
        })
    }
}

/// Memoizing solver. Dependencies are solved once at the highest order
/// requested so far and truncated on reuse.
#[derive(Debug, Default)]
pub struct Solver {
    memo: HashMap<SystemId, SystemSolution>,
}

/// Solve one system from scratch.
pub fn solve(id: SystemId, order: usize) -> Result<SystemSolution, SolveError> {
    Solver::new().solve(id, order)
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&mut self, id: SystemId, order: usize) -> Result<SystemSolution, SolveError> {
        if order == 0 {
            return Err(SolveError::ZeroOrder);
        }
        if let Some(sol) = self.memo.get(&id) {
            if sol.order >= order {
                return Ok(sol.truncate(order)?);
            }
        }
        let sol = self.compute(id, order)?;
        self.memo.insert(id, sol.clone());
        Ok(sol)
    }

    /// Dependency series at `order + MARGIN`.
    fn dep(&mut self, id: SystemId, order: usize) -> Result<SystemSolution, SolveError> {
        self.solve(id, order + MARGIN)
    }

    fn compute(&mut self, id: SystemId, n: usize) -> Result<SystemSolution, SolveError> {
        let values = match id {
            SystemId::T => solve_t(n)?,
            SystemId::S => solve_s(n)?,
            SystemId::Z => solve_z(n)?,
            SystemId::R => {
                let t = self.dep(SystemId::T, n)?;
                solve_r(n, &t.total)?
            }
            SystemId::D => {
                let t = self.dep(SystemId::T, n)?;
                solve_d(n, &t.total)?
            }
            SystemId::W => {
                let t = self.dep(SystemId::T, n)?;
                let d = self.dep(SystemId::D, n)?;
                solve_w(n, &t.total, &d.total)?
            }
            SystemId::SZ => solve_sz(n)?,
            SystemId::SR => {
                let s = self.dep(SystemId::S, n)?;
                solve_sr(n, s.series("S1"), s.series("S2"))?
            }
            SystemId::ZR => {
                let z = self.dep(SystemId::Z, n)?;
                solve_zr(n, z.series("Z1"), z.series("Z2"))?
            }
            SystemId::SS => solve_ss(n)?,
            SystemId::ZZ => solve_zz(n)?,
            SystemId::RR => {
                let t = self.dep(SystemId::T, n)?;
                let r = self.dep(SystemId::R, n)?;
                solve_rr(n, &t.total, r.series("R1"), r.series("R2"))?
            }
            SystemId::DSWS => {
                let s = self.dep(SystemId::S, n)?;
                solve_dsws(n, s.series("S1"), s.series("S2"))?
            }
            SystemId::DZWZ => {
                let z = self.dep(SystemId::Z, n)?;
                solve_dzwz(n, z.series("Z1"), z.series("Z2"))?
            }
            SystemId::DRWR => {
                let t = self.dep(SystemId::T, n)?;
                let r = self.dep(SystemId::R, n)?;
                let d = self.dep(SystemId::D, n)?;
                let w = self.dep(SystemId::W, n)?;
                solve_drwr(
                    n,
                    &Known {
                        t: t.total,
                        r1: r.series("R1").clone(),
                        r2: r.series("R2").clone(),
                        d: d.total,
                        w: w.total,
                    },
                )?
            }
        };
        finish(id, n, values)
    }
}

fn finish(id: SystemId, n: usize, values: Vec<Series>) -> Result<SystemSolution, SolveError> {
    let names = id.unknowns();
    debug_assert_eq!(names.len(), values.len());
    for ((name, _), s) in names.iter().zip(&values) {
        check_index_series(id, name, s)?;
    }
    let mut total = Series::zero(n);
    for (w, s) in id.total_weights().into_iter().zip(&values) {
        if w != 0 {
            total = &total + &s.scale_int(w);
        }
    }
    Ok(SystemSolution {
        id,
        order: n,
        unknowns: names.into_iter().map(|(name, _)| name).zip(values).collect(),
        total,
    })
}

fn check_index_series(id: SystemId, unknown: &'static str, s: &Series) -> Result<(), SolveError> {
    for k in 0..=s.order() {
        let c: BigRational = s.coeff(k);
        if !c.is_integer() || c.is_negative() {
            return Err(SolveError::Transcription {
                system: id,
                unknown,
                power: k,
                value: c.to_string(),
            });
        }
    }
    Ok(())
}

/// Run the sweeps. `sweep(w, vars)` updates every unknown in place at
/// working order `w`.
fn fixed_point(
    id: SystemId,
    order: usize,
    count: usize,
    mut sweep: impl FnMut(usize, &mut [Series]) -> Result<(), SeriesError>,
) -> Result<Vec<Series>, SolveError> {
    let mut vars = vec![Series::zero(0); count];
    for k in 1..=order + 1 {
        let w = k.min(order);
        for v in vars.iter_mut() {
            *v = v.resized(w);
        }
        sweep(w, &mut vars)?;
    }
    let settled = vars.clone();
    sweep(order, &mut vars)?;
    let names = id.unknowns();
    for (i, (before, after)) in settled.iter().zip(&vars).enumerate() {
        if before != after {
            let power = (0..=order)
                .find(|&k| before.coeff(k) != after.coeff(k))
                .unwrap_or(0);
            return Err(SolveError::NotConverged {
                system: id,
                unknown: names[i].0,
                power,
            });
        }
    }
    Ok(vars)
}

/// A known series divided exactly by `z^k` and cut to order `n`.
fn over_z(s: &Series, k: usize, n: usize) -> Result<Series, SeriesError> {
    s.divz(k)?.truncate(n)
}

fn cut(s: &Series, w: usize) -> Series {
    s.truncate(w).expect("known series are solved above the working order")
}

fn solve_t(n: usize) -> Result<Vec<Series>, SolveError> {
    // T = z / (1 - T)
    fixed_point(SystemId::T, n, 1, |w, v| {
        v[0] = Series::z(w) * v[0].inv1m()?;
        Ok(())
    })
}

fn solve_s(n: usize) -> Result<Vec<Series>, SolveError> {
    // S1 = z / (1 - S2), S2 = z / (1 - S1 - S2)
    fixed_point(SystemId::S, n, 2, |w, v| {
        let z = Series::z(w);
        v[0] = &z * v[1].inv1m()?;
        v[1] = &z * (&v[0] + &v[1]).inv1m()?;
        Ok(())
    })
}

fn solve_z(n: usize) -> Result<Vec<Series>, SolveError> {
    // Z1 = z Z2 / (1 - Z1 - Z2)^2, Z2 = z / (1 - Z1 - Z2)
    fixed_point(SystemId::Z, n, 2, |w, v| {
        let z = Series::z(w);
        let g = (&v[0] + &v[1]).inv1m()?;
        v[1] = &z * &g;
        v[0] = &z * &v[1] * g.square();
        Ok(())
    })
}

fn solve_r(n: usize, t: &Series) -> Result<Vec<Series>, SolveError> {
    // R1 = z / (1 - R1 - T), R2 = z (R1 + R2) / (1 - T)^2
    let t = cut(t, n);
    let lin = Series::z(n) * t.inv1m()?.square();
    fixed_point(SystemId::R, n, 2, |w, v| {
        let z = Series::z(w);
        v[0] = &z * (&v[0] + &cut(&t, w)).inv1m()?;
        v[1] = cut(&lin, w) * (&v[0] + &v[1]);
        Ok(())
    })
}

fn solve_d(n: usize, t: &Series) -> Result<Vec<Series>, SolveError> {
    // D = z D / (1 - T)^2 + z T' - T
    let t = cut(t, n);
    let lin = Series::z(n) * t.inv1m()?.square();
    let forcing = t.zderiv() - &t;
    fixed_point(SystemId::D, n, 1, |w, v| {
        v[0] = cut(&lin, w) * &v[0] + cut(&forcing, w);
        Ok(())
    })
}

fn solve_w(n: usize, t: &Series, d: &Series) -> Result<Vec<Series>, SolveError> {
    // W = D + z W / (1 - T)^2 + 2 z^2 T' (D + z T') / (1 - T)^3
    let t = cut(t, n);
    let d = cut(d, n);
    let g = t.inv1m()?;
    let lin = Series::z(n) * g.square();
    let zt = t.zderiv();
    let forcing = &d + &(Series::z(n) * &zt * (&d + &zt) * g.pow(3)).scale_int(2);
    fixed_point(SystemId::W, n, 1, |w, v| {
        v[0] = cut(&lin, w) * &v[0] + cut(&forcing, w);
        Ok(())
    })
}

fn solve_sz(n: usize) -> Result<Vec<Series>, SolveError> {
    fixed_point(SystemId::SZ, n, 4, |w, v| {
        let z = Series::z(w);
        // SZ11 = z SZ22 / (1 - SZ21 - SZ22)^2, SZ12 = z / (1 - SZ21 - SZ22)
        let g = (&v[2] + &v[3]).inv1m()?;
        v[0] = &z * &v[3] * g.square();
        v[1] = &z * &g;
        // SZ21 = z (SZ12 + SZ22) / (1 - SZ)^2, SZ22 = z / (1 - SZ)
        let h = (&v[0] + &v[1] + &v[2] + &v[3]).inv1m()?;
        v[2] = &z * (&v[1] + &v[3]) * h.square();
        let h = (&v[0] + &v[1] + &v[2] + &v[3]).inv1m()?;
        v[3] = &z * h;
        Ok(())
    })
}

fn solve_sr(n: usize, s1: &Series, s2: &Series) -> Result<Vec<Series>, SolveError> {
    let s1_sq_z = over_z(&s1.square(), 1, n)?;
    let s2_sq_z = over_z(&s2.square(), 1, n)?;
    let (s1, s2) = (cut(s1, n), cut(s2, n));
    fixed_point(SystemId::SR, n, 4, |w, v| {
        let z = Series::z(w);
        let (s1, s2) = (cut(&s1, w), cut(&s2, w));
        // SR11 = z / (1 - SR21 - S2)
        v[0] = &z * (&v[2] + &s2).inv1m()?;
        // SR12 = S1^2 (SR21 + SR22) / z
        v[1] = cut(&s1_sq_z, w) * (&v[2] + &v[3]);
        // SR21 = z / (1 - SR11 - SR21 - S1 - S2)
        v[2] = &z * (&v[0] + &v[2] + &s1 + &s2).inv1m()?;
        // SR22 = S2^2 SR / z
        v[3] = cut(&s2_sq_z, w) * (&v[0] + &v[1] + &v[2] + &v[3]);
        Ok(())
    })
}

fn solve_zr(n: usize, z1: &Series, z2: &Series) -> Result<Vec<Series>, SolveError> {
    let z2_sq_z = over_z(&z2.square(), 1, n)?;
    let z1z2_2_z = over_z(&(z1 * z2).scale_int(2), 1, n)?;
    let (z1, z2) = (cut(z1, n), cut(z2, n));
    fixed_point(SystemId::ZR, n, 4, |w, v| {
        let z = Series::z(w);
        let (z1, z2) = (cut(&z1, w), cut(&z2, w));
        let zsum = &z1 + &z2;
        // ZR11 = z (ZR21 + Z2) / (1 - ZR11 - ZR21 - Z1 - Z2)^2
        let g = (&v[0] + &v[2] + &zsum).inv1m()?;
        v[0] = &z * (&v[2] + &z2) * g.square();
        // ZR21 = z / (1 - ZR11 - ZR21 - Z1 - Z2)
        v[2] = &z * (&v[0] + &v[2] + &zsum).inv1m()?;
        // ZR12 = Z2^2 (ZR21 + ZR22) / z + 2 Z1 Z2 ZR / z
        let total = &v[0] + &v[1] + &v[2] + &v[3];
        v[1] = cut(&z2_sq_z, w) * (&v[2] + &v[3]) + cut(&z1z2_2_z, w) * &total;
        // ZR22 = Z2^2 ZR / z
        let total = &v[0] + &v[1] + &v[2] + &v[3];
        v[3] = cut(&z2_sq_z, w) * total;
        Ok(())
    })
}

fn solve_ss(n: usize) -> Result<Vec<Series>, SolveError> {
    fixed_point(SystemId::SS, n, 3, |w, v| {
        let z = Series::z(w);
        // SS11 = z / (1 - SS22)
        v[0] = &z * v[2].inv1m()?;
        // SS12 = z / (1 - SS12 - SS22)
        v[1] = &z * (&v[1] + &v[2]).inv1m()?;
        // SS22 = z / (1 - SS11 - 2 SS12 - SS22)
        v[2] = &z * (&v[0] + &v[1].scale_int(2) + &v[2]).inv1m()?;
        Ok(())
    })
}

fn solve_zz(n: usize) -> Result<Vec<Series>, SolveError> {
    fixed_point(SystemId::ZZ, n, 3, |w, v| {
        let z = Series::z(w);
        let total = &v[0] + &v[1].scale_int(2) + &v[2];
        let g = total.inv1m()?;
        let g2 = g.square();
        let pair = &v[1] + &v[2];
        // ZZ11 = z ZZ22 / (1 - ZZ)^2 + 2 z (ZZ12 + ZZ22)^2 / (1 - ZZ)^3
        v[0] = &z * &v[2] * &g2 + (&z * pair.square() * &g2 * &g).scale_int(2);
        // ZZ12 = z (ZZ12 + ZZ22) / (1 - ZZ)^2
        v[1] = &z * &pair * &g2;
        // ZZ22 = z / (1 - ZZ)
        v[2] = &z * g;
        Ok(())
    })
}

fn solve_rr(
    n: usize,
    t: &Series,
    r1: &Series,
    r2: &Series,
) -> Result<Vec<Series>, SolveError> {
    let r1_sq_z = over_z(&r1.square(), 1, n)?;
    let t_sq_z = over_z(&t.square(), 1, n)?;
    let one = Series::one(t.order());
    let forcing22 = over_z(&(r2.square() * (&one - t)).scale_int(2), 1, n)?;
    let (t, r1, r2) = (cut(t, n), cut(r1, n), cut(r2, n));
    fixed_point(SystemId::RR, n, 3, |w, v| {
        let z = Series::z(w);
        let (t, r1, r2) = (cut(&t, w), cut(&r1, w), cut(&r2, w));
        // RR11 = z / (1 - RR11 - 2 R1 - T)
        v[0] = &z * (&v[0] + &r1.scale_int(2) + &t).inv1m()?;
        // RR12 = R1^2 (RR11 + RR12 + R1 + R2) / z
        v[1] = cut(&r1_sq_z, w) * (&v[0] + &v[1] + &r1 + &r2);
        // RR22 = T^2 RR / z + 2 R2^2 (1 - T) / z
        let total = &v[0] + &v[1].scale_int(2) + &v[2];
        v[2] = cut(&t_sq_z, w) * total + cut(&forcing22, w);
        Ok(())
    })
}

fn solve_dsws(n: usize, s1: &Series, s2: &Series) -> Result<Vec<Series>, SolveError> {
    let zs1 = s1.zderiv();
    let zs2 = s2.zderiv();
    let s2_sq_z = over_z(&s2.square(), 1, n)?;
    // 2 S1 S2 S2'
    let c_ws1 = over_z(&(s1 * s2 * &zs2).scale_int(2), 1, n)?;
    // 2 S2^3 (S1' + S2') / z
    let c_ws2 = over_z(&(s2.pow(3) * (&zs1 + &zs2)).scale_int(2), 2, n)?;
    let f_ds1 = cut(&(&zs1 - s1), n);
    let f_ds2 = cut(&(&zs2 - s2), n);
    let (s2, zs1, zs2) = (cut(s2, n), cut(&zs1, n), cut(&zs2, n));
    fixed_point(SystemId::DSWS, n, 4, |w, v| {
        let (s2, zs1, zs2) = (cut(&s2, w), cut(&zs1, w), cut(&zs2, w));
        let s2_sq_z = cut(&s2_sq_z, w);
        // DS1 = S2 DS2 + z S1' - S1
        v[0] = &s2 * &v[1] + cut(&f_ds1, w);
        // DS2 = S2^2 (DS1 + DS2) / z + z S2' - S2
        v[1] = &s2_sq_z * (&v[0] + &v[1]) + cut(&f_ds2, w);
        // WS1 = DS1 + S2 WS2 + 2 S1 S2 S2' (DS2 + z S2')
        v[2] = &v[0] + &(&s2 * &v[3]) + cut(&c_ws1, w) * (&v[1] + &zs2);
        // WS2 = DS2 + S2^2 (WS1 + WS2) / z
        //     + 2 S2^3 (S1' + S2') (DS1 + DS2 + z S1' + z S2') / z
        let reach = &v[0] + &v[1] + &zs1 + &zs2;
        v[3] = &v[1] + &(&s2_sq_z * (&v[2] + &v[3])) + cut(&c_ws2, w) * reach;
        Ok(())
    })
}

fn solve_dzwz(n: usize, z1: &Series, z2: &Series) -> Result<Vec<Series>, SolveError> {
    let zz1 = z1.zderiv();
    let zz2 = z2.zderiv();
    let zzs = &zz1 + &zz2;
    // 2 Z1 Z2 / z and Z2^2 / z
    let e = over_z(&(z1 * z2).scale_int(2), 1, n)?;
    let f = over_z(&z2.square(), 1, n)?;
    // 2 Z1 (Z1' + Z2'), 2 Z1 Z2', 6 Z1 Z2^2 (Z1' + Z2') / z, 2 Z2^3 (Z1' + Z2') / z
    let a = over_z(&(z1 * &zzs).scale_int(2), 1, n)?;
    let b = over_z(&(z1 * &zz2).scale_int(2), 1, n)?;
    let c = over_z(&(z1 * &z2.square() * &zzs).scale_int(6), 2, n)?;
    let g = over_z(&(z2.pow(3) * &zzs).scale_int(2), 2, n)?;
    let f_dz1 = cut(&(&zz1 - z1), n);
    let f_dz2 = cut(&(&zz2 - z2), n);
    let (zz2, zzs) = (cut(&zz2, n), cut(&zzs, n));
    fixed_point(SystemId::DZWZ, n, 4, |w, v| {
        let (e, f) = (cut(&e, w), cut(&f, w));
        let (zz2, zzs) = (cut(&zz2, w), cut(&zzs, w));
        // DZ1 = 2 Z1 Z2 (DZ1 + DZ2) / z + Z2^2 DZ2 / z + z Z1' - Z1
        v[0] = &e * (&v[0] + &v[1]) + &f * &v[1] + cut(&f_dz1, w);
        // DZ2 = Z2^2 (DZ1 + DZ2) / z + z Z2' - Z2
        v[1] = &f * (&v[0] + &v[1]) + cut(&f_dz2, w);
        let reach = &v[0] + &v[1] + &zzs;
        // WZ1 = DZ1 + 2 Z1 Z2 (WZ1 + WZ2) / z + Z2^2 WZ2 / z
        //     + 2 Z1 ((DZ2 + z Z2') (Z1' + Z2') + Z2' (DZ1 + DZ2 + z Z1' + z Z2'))
        //     + 6 Z1 Z2^2 (Z1' + Z2') (DZ1 + DZ2 + z Z1' + z Z2') / z
        v[2] = &v[0]
            + &e * (&v[2] + &v[3])
            + &f * &v[3]
            + cut(&a, w) * (&v[1] + &zz2)
            + (cut(&b, w) + cut(&c, w)) * &reach;
        // WZ2 = DZ2 + Z2^2 (WZ1 + WZ2) / z
        //     + 2 Z2^3 (Z1' + Z2') (DZ1 + DZ2 + z Z1' + z Z2') / z
        v[3] = &v[1] + &f * (&v[2] + &v[3]) + cut(&g, w) * &reach;
        Ok(())
    })
}

struct Known {
    t: Series,
    r1: Series,
    r2: Series,
    d: Series,
    w: Series,
}

fn solve_drwr(n: usize, k: &Known) -> Result<Vec<Series>, SolveError> {
    let zt = k.t.zderiv();
    let zr1 = k.r1.zderiv();
    let zr2 = k.r2.zderiv();
    let r = &k.r1 + &k.r2;
    let t3 = k.t.pow(3);
    let r1_sq_z = over_z(&k.r1.square(), 1, n)?;
    let t_sq_z = over_z(&k.t.square(), 1, n)?;
    // 2 R1^3 (R1' + T') / z
    let h = over_z(&(k.r1.pow(3) * (&zr1 + &zt)).scale_int(2), 2, n)?;
    // 2 T^3 T' / z
    let j = over_z(&(&t3 * &zt).scale_int(2), 2, n)?;
    let d_zt = &k.d + &zt;
    // DR2 forcing: 2 D T R2 / z + z R2' - R2
    let f_dr2 = over_z(&(&k.d * &k.t * &k.r2).scale_int(2), 1, n)? + cut(&(&zr2 - &k.r2), n);
    let f_dr1 = cut(&(&zr1 - &k.r1), n);
    // DR1 + D + z R1' + z T' minus DR1
    let reach1 = cut(&(&k.d + &zr1 + &zt), n);
    // WR2 forcing:
    //   2 T^3 W (R1 + R2) / z^2 + 2 T^3 (R1' + R2') (D + z T') / z
    //   + 6 T^4 T' (D + z T') (R1 + R2) / z^2
    let f_wr2 = over_z(&(&t3 * &k.w * &r).scale_int(2), 2, n)?
        + over_z(&(&t3 * (&zr1 + &zr2) * &d_zt).scale_int(2), 2, n)?
        + over_z(&(&t3 * &k.t * &zt * &d_zt * &r).scale_int(6), 3, n)?;
    let zrs = cut(&(&zr1 + &zr2), n);
    let d = cut(&k.d, n);
    let wk = cut(&k.w, n);
    fixed_point(SystemId::DRWR, n, 4, |w, v| {
        let r1_sq_z = cut(&r1_sq_z, w);
        let t_sq_z = cut(&t_sq_z, w);
        // DR1 = R1^2 (DR1 + D) / z + z R1' - R1
        v[0] = &r1_sq_z * (&v[0] + &cut(&d, w)) + cut(&f_dr1, w);
        // DR2 = 2 D T R2 / z + T^2 (DR1 + DR2) / z + z R2' - R2
        v[1] = &t_sq_z * (&v[0] + &v[1]) + cut(&f_dr2, w);
        // WR1 = DR1 + R1^2 (WR1 + W) / z
        //     + 2 R1^3 (R1' + T') (DR1 + D + z R1' + z T') / z
        v[2] = &v[0]
            + &r1_sq_z * (&v[2] + &cut(&wk, w))
            + cut(&h, w) * (&v[0] + &cut(&reach1, w));
        // WR2 = DR2 + T^2 (WR1 + WR2) / z
        //     + 2 T^3 (DR1 + DR2 + z R1' + z R2') T' / z + forcing
        v[3] = &v[1]
            + &t_sq_z * (&v[2] + &v[3])
            + cut(&j, w) * (&v[0] + &v[1] + &cut(&zrs, w))
            + cut(&f_wr2, w);
        Ok(())
    })
}

/// Closed forms in `q1 = sqrt(1 - 4z)` and `q2 = sqrt(2 (1 - 10z + q1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForms {
    pub q1: Series,
    pub q2: Series,
    pub t: Series,
    pub d: Series,
    pub w: Series,
    pub r1: Series,
    pub r2: Series,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error("closed forms need order at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("branch of {name} has constant term {constant}, expected 0")]
    Branch { name: &'static str, constant: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl ClosedForms {
    pub fn get(&self, name: &str) -> Option<&Series> {
        Some(match name {
            "q1" => &self.q1,
            "q2" => &self.q2,
            "T" => &self.t,
            "D" => &self.d,
            "W" => &self.w,
            "R1" => &self.r1,
            "R2" => &self.r2,
            _ => return None,
        })
    }
}

fn zero_branch(name: &'static str, s: Series) -> Result<Series, ClosedFormError> {
    if s.coeff(0).is_zero() {
        Ok(s)
    } else {
        Err(ClosedFormError::Branch {
            name,
            constant: s.coeff(0).to_string(),
        })
    }
}

pub fn closed_forms(order: usize) -> Result<ClosedForms, ClosedFormError> {
    if order < 2 {
        return Err(ClosedFormError::OrderTooSmall(order));
    }
    let one = Series::one(order);
    let z = Series::z(order);
    let four_z = z.scale_int(4);
    let q1 = (&one - &four_z).sqrt()?;
    let q2 = (&one - &z.scale_int(10) + &q1).scale_int(2).sqrt()?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let t = zero_branch("T", (&one - &q1).scale(&half))?;
    // 1 / q1^2 = 1 / (1 - 4z) and 1 / (1 + q1) = 1 / (2 (1 - T))
    let inv_q1_sq = four_z.inv1m()?;
    let z2 = z.square();
    let d = zero_branch("D", &z2 * &inv_q1_sq * t.inv1m()?)?;
    let w = zero_branch("W", &z2 * inv_q1_sq.square())?;
    let r1 = zero_branch("R1", (&one + &q1 - &q2).scale(&quarter))?;
    // (1 - q1) / (2 q1) = T / q1 = T q1 / (1 - 4z)
    let r2 = zero_branch("R2", &r1 * &t * &q1 * &inv_q1_sq)?;
    Ok(ClosedForms {
        q1,
        q2,
        t,
        d,
        w,
        r1,
        r2,
    })
}

/// Bivariate integer polynomial `sum c * z^i * s^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    terms: Vec<(u32, u32, i64)>,
}

impl BivariatePoly {
    /// Terms as `(power of z, power of s, coefficient)`.
    pub fn new(terms: &[(u32, u32, i64)]) -> Self {
        BivariatePoly {
            terms: terms.to_vec(),
        }
    }

    pub fn terms(&self) -> &[(u32, u32, i64)] {
        &self.terms
    }

    pub fn s_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    /// `P(z, s(z))` truncated at the order of `s`.
    pub fn evaluate(&self, s: &Series) -> Series {
        let n = s.order();
        let mut powers = vec![Series::one(n)];
        for j in 1..=self.s_degree() as usize {
            let next = &powers[j - 1] * s;
            powers.push(next);
        }
        let mut acc = Series::zero(n);
        for &(i, j, c) in &self.terms {
            acc = &acc + &powers[j as usize].mulz(i as usize).scale_int(c);
        }
        acc
    }
}

/// Whether `P(z, s(z)) = 0 mod z^(N+1)`.
pub fn verify_annihilator(s: &Series, poly: &BivariatePoly) -> bool {
    poly.evaluate(s).is_zero()
}

/// Published annihilating polynomials.
pub mod annihilators {
    use super::BivariatePoly;

    /// Satisfied by `SZ22`.
    pub fn sz22() -> BivariatePoly {
        BivariatePoly::new(&[
            (0, 10, 1),
            (1, 8, 2),
            (1, 7, -3),
            (2, 6, 1),
            (2, 5, -4),
            (2, 4, 3),
            (3, 3, -1),
            (3, 2, 2),
            (3, 1, -1),
            (4, 0, 1),
        ])
    }

    /// Satisfied by `SR11`.
    pub fn sr11() -> BivariatePoly {
        BivariatePoly::new(&[
            (1, 9, 1),
            (2, 7, -6),
            (3, 6, -4),
            (3, 5, 7),
            (4, 4, -2),
            (5, 3, -1),
            (4, 3, -3),
            (5, 2, 1),
            (5, 1, 1),
            (6, 0, -1),
        ])
    }

    /// Satisfied by the total `SS = SS11 + 2 SS12 + SS22`.
    pub fn ss_total() -> BivariatePoly {
        BivariatePoly::new(&[
            (0, 6, 1),
            (0, 5, -6),
            (1, 4, 4),
            (0, 4, 14),
            (2, 3, 8),
            (1, 3, -20),
            (0, 3, -16),
            (3, 2, 4),
            (2, 2, -30),
            (1, 2, 36),
            (0, 2, 9),
            (3, 1, -12),
            (2, 1, 36),
            (1, 1, -28),
            (0, 1, -2),
            (4, 0, -1),
            (3, 0, 8),
            (2, 0, -14),
            (1, 0, 8),
        ])
    }

    /// Satisfied by the total `ZZ = ZZ11 + 2 ZZ12 + ZZ22`.
    pub fn zz_total() -> BivariatePoly {
        BivariatePoly::new(&[
            (0, 8, 1),
            (0, 7, -7),
            (1, 6, -1),
            (0, 6, 21),
            (1, 5, 4),
            (0, 5, -35),
            (2, 4, 2),
            (1, 4, -5),
            (0, 4, 35),
            (2, 3, -7),
            (0, 3, -21),
            (3, 2, -1),
            (2, 2, 9),
            (1, 2, 5),
            (0, 2, 7),
            (3, 1, 2),
            (2, 1, -5),
            (1, 1, -4),
            (0, 1, -1),
            (4, 0, 1),
            (3, 0, -1),
            (2, 0, 1),
            (1, 0, 1),
        ])
    }

    /// `s^3 - 2 s^2 + s - z`, satisfied by `S2`.
    pub fn s2() -> BivariatePoly {
        BivariatePoly::new(&[(0, 3, 1), (0, 2, -2), (0, 1, 1), (1, 0, -1)])
    }

    /// `z^2 - z s + z s^2 + s^4`, satisfied by `Z2`.
    pub fn z2() -> BivariatePoly {
        BivariatePoly::new(&[(2, 0, 1), (1, 1, -1), (1, 2, 1), (0, 4, 1)])
    }
}
