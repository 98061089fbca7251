//! The invariant suite behind `treecorr verify`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::enumerate::{aggregate, tree_count};
use crate::sample::chi_square_uniformity;
use crate::series::Series;
use crate::systems::{annihilators, closed_forms, verify_annihilator, Solver, SystemId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Largest size compared against enumeration.
pub const ORACLE_MAX_N: usize = 10;

pub fn run_suite(order: usize, seed: u64) -> Vec<Check> {
    let order = order.max(2);
    let mut solver = Solver::new();
    let mut checks = oracle_checks(&mut solver, order.min(ORACLE_MAX_N));
    checks.extend(annihilator_checks(&mut solver, order));
    checks.extend(closed_form_checks(&mut solver, order));
    checks.extend(uniformity_checks(seed));
    checks
}

fn oracle_checks(solver: &mut Solver, n_max: usize) -> Vec<Check> {
    SystemId::ALL
        .iter()
        .map(|&id| {
            let sol = match solver.solve(id, n_max) {
                Ok(sol) => sol,
                Err(e) => return Check::new(format!("oracle {id}"), false, e.to_string()),
            };
            let unknowns = id.unknowns();
            let tags: Vec<_> = unknowns.iter().map(|(_, m)| m.clone()).collect();
            for n in 1..=n_max {
                let row = match aggregate(n, &tags) {
                    Ok(row) => row,
                    Err(e) => return Check::new(format!("oracle {id}"), false, e.to_string()),
                };
                for ((name, _), (_, sum)) in unknowns.iter().zip(&row.sums) {
                    if sol.series(name).int_coeff(n) != &BigInt::from(sum.clone()) {
                        return Check::new(
                            format!("oracle {id}"),
                            false,
                            format!("{name} differs from enumeration at n={n}"),
                        );
                    }
                }
            }
            Check::new(
                format!("oracle {id}"),
                true,
                format!("{} unknowns exact for n<={n_max}", unknowns.len()),
            )
        })
        .collect()
}

fn annihilator_checks(solver: &mut Solver, order: usize) -> Vec<Check> {
    let mut out = Vec::new();
    let mut check = |name: &str, id: SystemId, pick: &dyn Fn(&crate::systems::SystemSolution) -> Series, poly| {
        let passed = match solver.solve(id, order) {
            Ok(sol) => verify_annihilator(&pick(&sol), &poly),
            Err(_) => false,
        };
        out.push(Check::new(
            format!("annihilator {name}"),
            passed,
            format!("mod z^{}", order + 1),
        ));
    };
    check("SZ22", SystemId::SZ, &|s| s.series("SZ22").clone(), annihilators::sz22());
    check("SR11", SystemId::SR, &|s| s.series("SR11").clone(), annihilators::sr11());
    check("SS", SystemId::SS, &|s| s.total.clone(), annihilators::ss_total());
    check("ZZ", SystemId::ZZ, &|s| s.total.clone(), annihilators::zz_total());
    check("S2", SystemId::S, &|s| s.series("S2").clone(), annihilators::s2());
    check("Z2", SystemId::Z, &|s| s.series("Z2").clone(), annihilators::z2());
    out
}

fn closed_form_checks(solver: &mut Solver, order: usize) -> Vec<Check> {
    let closed = match closed_forms(order) {
        Ok(c) => c,
        Err(e) => return vec![Check::new("closed forms", false, e.to_string())],
    };
    let mut out = Vec::new();
    let pairs = [
        ("T", SystemId::T, None),
        ("D", SystemId::D, None),
        ("W", SystemId::W, None),
        ("R1", SystemId::R, Some("R1")),
        ("R2", SystemId::R, Some("R2")),
    ];
    for (name, id, unknown) in pairs {
        let passed = solver.solve(id, order).is_ok_and(|sol| {
            let s = match unknown {
                Some(u) => sol.series(u),
                None => &sol.total,
            };
            closed.get(name) == Some(s)
        });
        out.push(Check::new(format!("closed form {name}"), passed, format!("order {order}")));
    }
    let identities = identity_checks(solver, order);
    out.push(match identities {
        Ok(()) => Check::new("identities", true, format!("order {order}")),
        Err(name) => Check::new("identities", false, format!("{name} fails")),
    });
    out
}

fn identity_checks(solver: &mut Solver, n: usize) -> Result<(), &'static str> {
    let z = Series::z(n);
    let one = Series::one(n);

    let Ok(s) = solver.solve(SystemId::S, n) else {
        return Err("S solve");
    };
    let (s1, s2) = (s.series("S1"), s.series("S2"));
    let g = s2.inv1m().expect("S2 has no constant term");
    if *s1 != &z * &g {
        return Err("S1 = z/(1-S2)");
    }
    if *s2 != &z * g.square() {
        return Err("S2 = z/(1-S2)^2");
    }

    let Ok(zs) = solver.solve(SystemId::Z, n + 1) else {
        return Err("Z solve");
    };
    let cubed = zs.series("Z2").pow(3).divz(1).expect("valuation 3");
    if zs.series("Z1").resized(n) != cubed {
        return Err("Z1 = Z2^3/z");
    }

    let Ok(sz) = solver.solve(SystemId::SZ, n + 1) else {
        return Err("SZ solve");
    };
    let ratio = sz.series("SZ22").divz(1).expect("valuation 1");
    let recip = (&one - &ratio).inv1m().expect("SZ22/z starts at 1");
    if sz.total.resized(n) != &one - &recip {
        return Err("SZ = 1 - z/SZ22");
    }
    Ok(())
}

fn uniformity_checks(seed: u64) -> Vec<Check> {
    [4usize, 5, 6]
        .into_iter()
        .map(|n| {
            let m = 200 * u64::try_from(tree_count(n)).expect("small count") as usize;
            match chi_square_uniformity(n, m, seed, 0.999) {
                Ok(r) => Check::new(
                    format!("uniformity n={n}"),
                    r.passes(),
                    format!("chi2 {:.3} < {:.3}", r.statistic, r.critical_value),
                ),
                Err(e) => Check::new(format!("uniformity n={n}"), false, e.to_string()),
            }
        })
        .collect()
}

/// Exact `[z^n] W / t_n`, the expected Wiener index.
pub fn exact_wiener_mean(n: usize) -> BigRational {
    let sol = Solver::new()
        .solve(SystemId::W, n.max(1))
        .expect("W system solves");
    sol.total.coeff(n) / BigRational::from_integer(BigInt::from(tree_count(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_small_order() {
        let checks = run_suite(12, 0);
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(checks.len() > 20);
    }

    #[test]
    fn wiener_mean_small() {
        assert_eq!(exact_wiener_mean(3), BigRational::from_integer(4.into()));
    }
}
