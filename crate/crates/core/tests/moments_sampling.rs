use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use treecorr::asymptotics::{estimate_growth, reference_catalog, Quantity};
use treecorr::moments::{correlation_table, Correlation, Index, Pair};
use treecorr::monomial::parse_tag_list;
use treecorr::numeric::rational_to_f64;
use treecorr::systems::{solve, Solver, SystemId};
use treecorr::{empirical_moments, SampleConfig};

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[test]
fn cauchy_schwarz_holds_exactly() {
    for pair in [
        Pair(Index::Sigma, Index::Z),
        Pair(Index::Sigma, Index::Rho),
        Pair(Index::Z, Index::Rho),
        Pair(Index::Wiener, Index::Rho),
    ] {
        for row in correlation_table(pair, 40, 10).unwrap() {
            let (Some(vx), Some(vy)) = (&row.var_x, &row.var_y) else { continue };
            assert!(!vx.is_negative() && !vy.is_negative());
            assert!(&row.cov * &row.cov <= vx * vy, "{pair} n={}", row.n);
            if let Some(r) = row.r.to_f64() {
                assert!(r.abs() <= 1.0, "{pair} n={}", row.n);
            }
        }
    }
}

#[test]
fn correlation_is_undefined_when_a_variance_vanishes() {
    let rows = correlation_table(Pair(Index::Sigma, Index::Z), 3, 10).unwrap();
    // sizes 1..3 give the same sigma on every tree
    assert!(rows.iter().all(|r| r.r == Correlation::Undefined));
}

#[test]
fn sampler_is_exact_on_degenerate_sizes() {
    let tags = parse_tag_list("sigma,w").unwrap();
    let three = empirical_moments(SampleConfig { n: 3, m: 1000, seed: 5 }, &tags).unwrap();
    assert_eq!(three[0].1.mean, int(5));
    assert_eq!(three[0].1.variance, int(0));
    let two = empirical_moments(SampleConfig { n: 2, m: 1000, seed: 5 }, &tags).unwrap();
    assert_eq!(two[1].1.mean, int(1));
}

#[test]
fn sampled_means_agree_with_exact_means() {
    let tags = parse_tag_list("sigma,z,rho,w").unwrap();
    let n = 25;
    let est = empirical_moments(SampleConfig { n, m: 40_000, seed: 99 }, &tags).unwrap();
    let mut solver = Solver::new();
    for ((_, e), index) in est.iter().zip(Index::ALL) {
        let exact = rational_to_f64(&treecorr::moments::mean(&mut solver, index, n).unwrap());
        let z = (e.mean_f64() - exact) / e.std_error();
        assert!(z.abs() < 4.0, "{index}: z = {z}");
    }
}

#[test]
fn sampler_is_reproducible() {
    let tags = parse_tag_list("rho^2").unwrap();
    let cfg = SampleConfig { n: 30, m: 300, seed: 1 };
    assert_eq!(empirical_moments(cfg, &tags).unwrap(), empirical_moments(cfg, &tags).unwrap());
}

#[test]
fn catalan_growth_rate_is_four() {
    let t = solve(SystemId::T, 200).unwrap().total;
    let est = estimate_growth(&t, 100, 200).unwrap();
    assert!((est.inv_z0 - 4.0).abs() / 4.0 < 1e-3, "{}", est.inv_z0);
}

#[test]
fn rho_mean_growth_matches_catalog() {
    let cat = reference_catalog();
    let c = cat.constant(Quantity::Mean(Index::Rho)).unwrap();
    let r = solve(SystemId::R, 150).unwrap().total;
    let est = estimate_growth(&r, 75, 150).unwrap();
    assert!((est.inv_z0 / 4.0 - c.base).abs() / c.base < 2e-3);
}
