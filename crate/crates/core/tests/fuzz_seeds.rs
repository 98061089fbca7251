//! Replays the checked-in fuzz corpus through the same round-trip
//! assertions the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use treecorr::monomial::parse_tag_list;
use treecorr::{parse_tree, Monomial, Series};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn tree_seeds() {
    let mut accepted = 0;
    for s in seeds("parse_tree") {
        if let Ok(t) = parse_tree(&s) {
            assert_eq!(t.encode(), s);
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn monomial_seeds() {
    for s in seeds("monomial") {
        if let Ok(m) = s.parse::<Monomial>() {
            assert_eq!(m.to_string().parse::<Monomial>().unwrap(), m);
        }
        let _ = parse_tag_list(&s);
    }
}

#[test]
fn series_seeds() {
    let mut accepted = 0;
    for s in seeds("series_json") {
        if let Ok(series) = Series::from_json(&s) {
            assert_eq!(Series::from_json(&series.to_json()).unwrap(), series);
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}
