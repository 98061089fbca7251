//! Acceptance gate. Every criterion runs at its pinned tolerance and prints
//! one `PASS` or `FAIL` line; the process exits nonzero if any fails.

use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use treecorr::asymptotics::{
    compose_correlations, convergence_report, decimal, error_slope, estimate_growth, find_root,
    monotone_from, reference_catalog, root_tolerance, size_grid, Quantity,
};
use treecorr::enumerate::{aggregate, tree_count};
use treecorr::moments::{correlation_table_with, enumeration_row, Index, Pair};
use treecorr::numeric::rational_to_f64;
use treecorr::sample::{chi_square_uniformity, empirical_moments, SampleConfig};
use treecorr::systems::{annihilators, closed_forms, verify_annihilator, Solver, SystemId};
use treecorr::Series;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, title: &'static str, failures: Vec<String>, summary: String) -> Outcome {
    let pass = failures.is_empty();
    let detail = if pass {
        summary
    } else {
        format!("{summary}; {}", failures.join("; "))
    };
    Outcome {
        id,
        title,
        pass,
        detail,
    }
}

// 1. every unknown of every system against split enumeration sums, n <= 10
fn oracle_equivalence() -> Outcome {
    const N: usize = 10;
    let start = Instant::now();
    let mut solver = Solver::new();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for id in SystemId::ALL.into_iter().filter(|&id| id != SystemId::T) {
        let sol = solver.solve(id, N).expect("solve");
        let unknowns = id.unknowns();
        let tags: Vec<_> = unknowns.iter().map(|(_, m)| m.clone()).collect();
        for n in 1..=N {
            let row = aggregate(n, &tags).expect("aggregate");
            for ((name, _), (_, sum)) in unknowns.iter().zip(&row.sums) {
                checked += 1;
                if sol.series(name).int_coeff(n) != &BigInt::from(sum.clone()) {
                    failures.push(format!("{id}.{name} at n={n}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        failures.push(format!("took {secs:.1}s, limit 120s"));
    }
    outcome(
        1,
        "oracle equivalence",
        failures,
        format!("{checked} coefficients exact in {secs:.1}s"),
    )
}

// 2. published annihilating polynomials modulo z^41
fn annihilating_polynomials() -> Outcome {
    let order = 40;
    let mut solver = Solver::new();
    let mut get = |id| solver.solve(id, order).expect("solve");
    let sz = get(SystemId::SZ);
    let sr = get(SystemId::SR);
    let ss = get(SystemId::SS);
    let zz = get(SystemId::ZZ);
    let checks = [
        ("SZ22", verify_annihilator(sz.series("SZ22"), &annihilators::sz22())),
        ("SR11", verify_annihilator(sr.series("SR11"), &annihilators::sr11())),
        ("SS", verify_annihilator(&ss.total, &annihilators::ss_total())),
        ("ZZ", verify_annihilator(&zz.total, &annihilators::zz_total())),
    ];
    let failures = checks
        .iter()
        .filter(|c| !c.1)
        .map(|c| format!("{} not annihilated", c.0))
        .collect();
    outcome(
        2,
        "annihilating polynomials",
        failures,
        "SZ22, SR11, SS, ZZ vanish mod z^41".into(),
    )
}

fn reciprocal_one_plus(s: &Series) -> Series {
    // 1 / s for s with constant term 1
    let one = Series::one(s.order());
    (&one - s).inv1m().expect("constant term 1")
}

// 3. closed forms and simplification identities to order 50
fn closed_form_identities() -> Outcome {
    let n = 50;
    let mut solver = Solver::new();
    let closed = closed_forms(n).expect("closed forms");
    let t = solver.solve(SystemId::T, n).unwrap();
    let r = solver.solve(SystemId::R, n).unwrap();
    let d = solver.solve(SystemId::D, n).unwrap();
    let w = solver.solve(SystemId::W, n).unwrap();
    let s = solver.solve(SystemId::S, n).unwrap();
    let z_hi = solver.solve(SystemId::Z, n + 2).unwrap();
    let z = z_hi.truncate(n).unwrap();
    let sz_hi = solver.solve(SystemId::SZ, n + 1).unwrap();
    let sz = sz_hi.truncate(n).unwrap();

    let zs = Series::z(n);
    let s1 = s.series("S1");
    let s2 = s.series("S2");
    let z2_cubed_over_z = z_hi.series("Z2").pow(3).divz(1).unwrap().truncate(n).unwrap();
    let z_over_sz22 = reciprocal_one_plus(&sz_hi.series("SZ22").divz(1).unwrap());
    let sz_identity = Series::one(n) - z_over_sz22;
    let one = Series::one(n);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let r2_from_r1 =
        (r.series("R1") * (&one - &closed.q1)).scale(&half) * reciprocal_one_plus(&closed.q1);

    let checks = [
        ("T", closed.t == t.total),
        ("R1", &closed.r1 == r.series("R1")),
        ("R2", &closed.r2 == r.series("R2")),
        ("D", closed.d == d.total),
        ("W", closed.w == w.total),
        ("S1 = z/(1-S2)", *s1 == &zs * s2.inv1m().unwrap()),
        ("S2 = z/(1-S2)^2", *s2 == &zs * s2.inv1m().unwrap().square()),
        ("Z1 = Z2^3/z", *z.series("Z1") == z2_cubed_over_z),
        ("SZ = 1 - z/SZ22", sz.total == sz_identity),
        ("R2 = R1 (1-q1)/(2 q1)", *r.series("R2") == r2_from_r1),
    ];
    let failures: Vec<String> = checks
        .iter()
        .filter(|c| !c.1)
        .map(|c| format!("{} differs", c.0))
        .collect();
    outcome(
        3,
        "closed forms and identities",
        failures,
        format!("{} exact series equalities at order {n}", checks.len()),
    )
}

// 4. ratio-fit singularity estimates at order 300
fn singularity_estimates() -> Outcome {
    let order = 300;
    let catalog = reference_catalog();
    let ids = [
        SystemId::SZ,
        SystemId::SR,
        SystemId::ZR,
        SystemId::SS,
        SystemId::ZZ,
        SystemId::RR,
    ];
    let totals: Vec<(SystemId, Series)> = thread::scope(|scope| {
        let handles: Vec<_> = ids
            .iter()
            .map(|&id| scope.spawn(move || (id, Solver::new().solve(id, order).unwrap().total)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (id, total) in &totals {
        let rec = catalog.singularity(*id).unwrap();
        let est = estimate_growth(total, 150, 300).unwrap();
        let target = 1.0 / rec.z0;
        let rel = (est.inv_z0 - target).abs() / target;
        parts.push(format!("{id} {:.6} ({:.2e})", est.inv_z0, rel));
        if rel > 2e-3 {
            failures.push(format!("{id} off by {rel:.2e}"));
        }
        if !rec.admits_inverse(est.inv_z0) {
            failures.push(format!("{id} estimate outside radius bounds"));
        }
    }
    outcome(4, "singularity estimates", failures, parts.join(", "))
}

// 5. exact bisection on the published polynomial factors
fn polynomial_roots() -> Outcome {
    let ints = |c: &[i64]| c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let tol = root_tolerance();
    let sr = find_root(
        &ints(&[3844, -40936, -412, 125]),
        decimal("0.09").unwrap(),
        decimal("0.10").unwrap(),
        &tol,
    )
    .unwrap();
    let zr = find_root(
        &ints(&[1, -448, 4096]),
        decimal("0.10").unwrap(),
        decimal("0.11").unwrap(),
        &tol,
    )
    .unwrap();
    // independent Newton iteration in floating point
    let mut x = 0.094f64;
    for _ in 0..50 {
        let f = ((125.0 * x - 412.0) * x - 40936.0) * x + 3844.0;
        let df = (375.0 * x - 824.0) * x - 40936.0;
        x -= f / df;
    }
    let zr_exact = (7.0 + 3.0 * 5f64.sqrt()) / 128.0;
    let mut failures = Vec::new();
    if (sr.value() - x).abs() > 1e-10 {
        failures.push(format!("SR root {} vs Newton {x}", sr.value()));
    }
    if (sr.value() - 0.0938166).abs() > 5e-8 {
        failures.push(format!("SR root {} does not round to 0.0938166", sr.value()));
    }
    if (zr.value() - zr_exact).abs() > 1e-10 {
        failures.push(format!("ZR root {} vs {zr_exact}", zr.value()));
    }
    outcome(
        5,
        "polynomial roots",
        failures,
        format!("SR {:.12}, ZR {:.12}", sr.value(), zr.value()),
    )
}

fn trend_check(
    solver: &mut Solver,
    q: Quantity,
    at: usize,
    tol: f64,
    window: (usize, usize),
    failures: &mut Vec<String>,
) -> String {
    let catalog = reference_catalog();
    let rows = convergence_report(solver, &catalog, q, &size_grid(window.0, window.1, 1)).unwrap();
    let end = rows.iter().find(|r| r.n == at).unwrap();
    let err = (end.ratio - 1.0).abs();
    if err > tol {
        failures.push(format!("{q} ratio {:.5} at n={at}", end.ratio));
    }
    let first = (rows[0].ratio - 1.0).abs();
    if err >= first {
        failures.push(format!("{q} error grows over the window"));
    }
    let n0 = monotone_from(&rows);
    match n0 {
        Some(n0) if n0 < window.1 => {}
        _ => failures.push(format!("{q} error not decreasing at the end of the window")),
    }
    format!("{q} {:.5} (monotone from {})", end.ratio, n0.unwrap_or(0))
}

// 6. exponential-growth moments at n = 200
fn mean_asymptotics() -> Outcome {
    use Index::*;
    let quantities = [
        Quantity::Mean(Sigma),
        Quantity::Mean(Z),
        Quantity::Mean(Rho),
        Quantity::Product(Sigma, Z),
        Quantity::Product(Sigma, Rho),
        Quantity::Product(Z, Rho),
        Quantity::Variance(Sigma),
        Quantity::Variance(Z),
        Quantity::Variance(Rho),
    ];
    let results: Vec<(String, Vec<String>)> = thread::scope(|scope| {
        let handles: Vec<_> = quantities
            .iter()
            .map(|&q| {
                scope.spawn(move || {
                    let mut failures = Vec::new();
                    let mut solver = Solver::new();
                    let s = trend_check(&mut solver, q, 200, 0.02, (50, 200), &mut failures);
                    (s, failures)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let summary = results.iter().map(|r| r.0.clone()).collect::<Vec<_>>().join(", ");
    let failures = results.into_iter().flat_map(|r| r.1).collect();
    outcome(6, "mean and variance asymptotics", failures, summary)
}

// 7. Wiener moments at n = 400 with an n^(-1/2) error trend
fn wiener_asymptotics() -> Outcome {
    use Index::*;
    let quantities = [
        Quantity::Mean(Wiener),
        Quantity::Product(Wiener, Sigma),
        Quantity::Product(Wiener, Z),
        Quantity::Product(Wiener, Rho),
    ];
    let catalog = reference_catalog();
    let results: Vec<(String, Vec<String>)> = thread::scope(|scope| {
        let handles: Vec<_> = quantities
            .iter()
            .map(|&q| {
                let catalog = &catalog;
                scope.spawn(move || {
                    let mut failures = Vec::new();
                    let mut solver = Solver::new();
                    let rows =
                        convergence_report(&mut solver, catalog, q, &size_grid(100, 400, 10))
                            .unwrap();
                    let last = rows.last().unwrap();
                    if (last.ratio - 1.0).abs() > 0.05 {
                        failures.push(format!("{q} ratio {:.5} at n=400", last.ratio));
                    }
                    let slope = error_slope(&rows);
                    if !(-0.7..=-0.3).contains(&slope) {
                        failures.push(format!("{q} log-log error slope {slope:.3}"));
                    }
                    (format!("{q} {:.5} slope {slope:.3}", last.ratio), failures)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let summary = results.iter().map(|r| r.0.clone()).collect::<Vec<_>>().join(", ");
    let failures = results.into_iter().flat_map(|r| r.1).collect();
    outcome(7, "Wiener asymptotics", failures, summary)
}

// 8. composed correlation asymptotics against the published table
fn table_reproduction() -> Outcome {
    let catalog = reference_catalog();
    let composed = compose_correlations(&catalog).unwrap();
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for c in &composed {
        let printed = catalog.correlation(c.pair).unwrap();
        let ra = ((c.amplitude - printed.amplitude) / printed.amplitude).abs();
        let rb = ((c.base - printed.base) / printed.base).abs();
        parts.push(format!("{} {:.5}*{:.5}^n", c.pair, c.amplitude, c.base));
        if ra > 5e-3 || rb > 5e-3 {
            failures.push(format!("{} amplitude {ra:.2e} base {rb:.2e}", c.pair));
        }
    }
    outcome(8, "correlation table", failures, parts.join(", "))
}

// 9. sampler uniformity and Monte Carlo Wiener moments
fn sampling() -> Outcome {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for n in [4usize, 5, 6] {
        let m = 200 * usize::try_from(tree_count(n)).unwrap();
        let chi = chi_square_uniformity(n, m, 12345, 0.999).unwrap();
        parts.push(format!("chi2(n={n}) {:.2}<{:.2}", chi.statistic, chi.critical_value));
        if !chi.passes() {
            failures.push(format!("chi-square fails at n={n}"));
        }
    }
    let w: treecorr::Monomial = "w".parse().unwrap();
    let est = empirical_moments(SampleConfig { n: 30, m: 100_000, seed: 2024 }, std::slice::from_ref(&w))
        .unwrap()
        .remove(0)
        .1;
    let sol = Solver::new().solve(SystemId::W, 30).unwrap();
    let exact = rational_to_f64(&(sol.total.coeff(30) / BigRational::from(BigInt::from(tree_count(30)))));
    let z = (est.mean_f64() - exact).abs() / est.std_error();
    parts.push(format!("E(W_30) {:.3} vs {exact:.3} ({z:.2} se)", est.mean_f64()));
    if z > 3.0 {
        failures.push(format!("mean W at n=30 is {z:.2} standard errors off"));
    }
    let est = empirical_moments(SampleConfig { n: 300, m: 200_000, seed: 2024 }, &[w])
        .unwrap()
        .remove(0)
        .1;
    let target = (16.0 - 5.0 * std::f64::consts::PI) / 80.0 * 300f64.powi(5);
    let ratio = est.variance_f64() / target;
    parts.push(format!("Var(W_300) ratio {ratio:.4}"));
    if (ratio - 1.0).abs() > 0.10 {
        failures.push(format!("Var(W_300) ratio {ratio:.4}"));
    }
    outcome(9, "sampling", failures, parts.join(", "))
}

// 10. series-based rows equal enumeration rows; signs at n = 60
fn exact_correlations() -> Outcome {
    use Index::*;
    let n_max = 10;
    let mut failures = Vec::new();
    let mut solver = Solver::new();
    let mut pairs = Vec::new();
    for (i, &a) in Index::ALL.iter().enumerate() {
        for &b in &Index::ALL[i..] {
            if !(a == Wiener && b == Wiener) {
                pairs.push(Pair(a, b));
            }
        }
    }
    for &pair in &pairs {
        let rows = correlation_table_with(&mut solver, pair, n_max, n_max).unwrap();
        for row in &rows {
            if *row != enumeration_row(pair, row.n).unwrap() {
                failures.push(format!("{pair} differs at n={}", row.n));
            }
        }
    }
    let mut signs = Vec::new();
    for (pair, want) in [
        (Pair(Sigma, Z), -1),
        (Pair(Sigma, Rho), 1),
        (Pair(Z, Rho), -1),
    ] {
        let row = correlation_table_with(&mut solver, pair, 60, 0)
            .unwrap()
            .pop()
            .unwrap();
        let r = row.r.to_f64().unwrap_or(0.0);
        signs.push(format!("r60({pair}) {r:.5}"));
        let got = if row.cov.is_positive() {
            1
        } else if row.cov.is_zero() {
            0
        } else {
            -1
        };
        if got != want {
            failures.push(format!("{pair} has the wrong sign at n=60"));
        }
    }
    outcome(
        10,
        "exact finite-n correlations",
        failures,
        format!("{} pairs for n<=10, {}", pairs.len(), signs.join(", ")),
    )
}

fn main() -> ExitCode {
    let jobs: Vec<fn() -> Outcome> = vec![
        oracle_equivalence,
        annihilating_polynomials,
        closed_form_identities,
        singularity_estimates,
        polynomial_roots,
        mean_asymptotics,
        wiener_asymptotics,
        table_reproduction,
        sampling,
        exact_correlations,
    ];
    let mut outcomes: Vec<Outcome> = thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|job| scope.spawn(job)).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    outcomes.sort_by_key(|o| o.id);
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {}: {}", o.id, o.title, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
