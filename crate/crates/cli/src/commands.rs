use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Map, Number, Value};

use treecorr::asymptotics::{
    base_singularities, compose_pair, convergence_report, decimal, estimate_growth, find_root,
    reference_catalog, root_tolerance, size_grid, Catalog, Quantity,
};
use treecorr::enumerate::aggregate_capped;
use treecorr::moments::{correlation_table_with, Correlation, Index, Pair};
use treecorr::monomial::parse_tag_list;
use treecorr::numeric::{format_sig12, rational_to_f64};
use treecorr::systems::{Solver, SystemId};
use treecorr::verify::run_suite;
use treecorr::{compute_indices, empirical_moments, parse_tree, SampleConfig, Series};

use crate::{Check, CliError, Format};

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// A JSON number of any size.
fn big(x: &BigUint) -> Value {
    Value::Number(x.to_string().parse::<Number>().expect("decimal integer"))
}

fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Rows of a table as JSON objects keyed by header.
fn json_rows(header: &[String], rows: &[Vec<String>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                let obj: Map<String, Value> = header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| Value::String(c.clone())))
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

fn table(header: Vec<String>, rows: Vec<Vec<String>>, format: Format) -> String {
    match format {
        Format::Csv => csv_text(&header, &rows),
        Format::Json => pretty(&json_rows(&header, &rows)),
    }
}

pub fn indices(text: &str) -> Result<String, CliError> {
    let tree = parse_tree(text)?;
    let b = compute_indices(&tree);
    let v = json!({
        "tree": tree.encode(),
        "n": b.n,
        "sigma": big(&b.sigma()),
        "sigma1": big(&b.sigma1),
        "sigma2": big(&b.sigma2),
        "z": big(&b.z()),
        "z1": big(&b.z1),
        "z2": big(&b.z2),
        "rho": big(&b.rho()),
        "rho1": big(&b.rho1),
        "rho2": big(&b.rho2),
        "d": big(&b.d),
        "w": big(&b.w),
    });
    Ok(pretty(&v))
}

pub fn enumerate(sizes: &[usize], tags: &str, cap: usize, format: Format) -> Result<String, CliError> {
    let monomials = parse_tag_list(tags)?;
    let mut header = strings(&["n", "count"]);
    header.extend(monomials.iter().map(ToString::to_string));
    let mut rows = Vec::new();
    let mut objects = Vec::new();
    for &n in sizes {
        let agg = aggregate_capped(n, &monomials, cap)?;
        let mut row = vec![n.to_string(), agg.count.to_string()];
        row.extend(agg.sums.iter().map(|(_, s)| s.to_string()));
        rows.push(row);
        let mut obj = Map::new();
        obj.insert("n".into(), json!(n));
        obj.insert("count".into(), big(&agg.count));
        for (m, s) in &agg.sums {
            obj.insert(m.to_string(), big(s));
        }
        objects.push(Value::Object(obj));
    }
    Ok(match format {
        Format::Csv => csv_text(&header, &rows),
        Format::Json => pretty(&Value::Array(objects)),
    })
}

pub fn sample(n: usize, count: usize, seed: u64, stats: &str, format: Format) -> Result<String, CliError> {
    let monomials = parse_tag_list(stats)?;
    let cfg = SampleConfig { n, m: count, seed };
    let estimates = empirical_moments(cfg, &monomials)?;
    let header = strings(&["stat", "n", "m", "seed", "mean", "mean_float", "variance_float", "std_error"]);
    let rows = estimates
        .iter()
        .map(|(m, e)| {
            vec![
                m.to_string(),
                n.to_string(),
                count.to_string(),
                seed.to_string(),
                e.mean.to_string(),
                format_sig12(e.mean_f64()),
                format_sig12(e.variance_f64()),
                format_sig12(e.std_error()),
            ]
        })
        .collect();
    Ok(table(header, rows, format))
}

fn coefficient_strings(s: &Series) -> Vec<String> {
    s.coeffs().iter().map(ToString::to_string).collect()
}

pub fn series(system: &str, order: usize, format: Format) -> Result<String, CliError> {
    let id: SystemId = system.parse()?;
    if order == 0 {
        return Err(CliError::Usage("order must be at least 1".into()));
    }
    let sol = Solver::new().solve(id, order).map_err(failed)?;
    match format {
        Format::Json => {
            let names: Vec<&str> = sol.unknowns.iter().map(|(n, _)| *n).collect();
            let mut series = Map::new();
            for (name, s) in &sol.unknowns {
                series.insert(name.to_string(), serde_json::to_value(s).expect("series serialize"));
            }
            let v = json!({
                "system": id.name(),
                "order": order,
                "unknowns": names,
                "series": series,
                "total": serde_json::to_value(&sol.total).expect("series serialize"),
            });
            Ok(pretty(&v))
        }
        Format::Csv => {
            let mut header = vec!["k".to_string()];
            header.extend(sol.unknowns.iter().map(|(n, _)| n.to_string()));
            header.push("total".into());
            let columns: Vec<Vec<String>> = sol
                .unknowns
                .iter()
                .map(|(_, s)| s)
                .chain(std::iter::once(&sol.total))
                .map(coefficient_strings)
                .collect();
            let rows: Vec<Vec<String>> = (0..=order)
                .map(|k| {
                    let mut row = vec![k.to_string()];
                    row.extend(columns.iter().map(|c| c[k].clone()));
                    row
                })
                .collect();
            Ok(csv_text(&header, &rows))
        }
    }
}

fn opt_rational(q: &Option<BigRational>) -> (String, String) {
    match q {
        Some(q) => (q.to_string(), format_sig12(rational_to_f64(q))),
        None => ("unavailable".into(), "unavailable".into()),
    }
}

fn correlation_float(r: &Correlation) -> String {
    match r.to_f64() {
        Some(x) => format_sig12(x),
        None => r.to_string(),
    }
}

pub fn moments(pair: &str, max_n: usize, wiener_cap: usize, format: Format) -> Result<String, CliError> {
    let pair: Pair = pair.parse()?;
    let (x, y) = (pair.0.name(), pair.1.name());
    let labels = [
        format!("E({x})"),
        format!("E({y})"),
        format!("E({x}*{y})"),
        format!("Var({x})"),
        format!("Var({y})"),
        "Cov".to_string(),
        "r".to_string(),
    ];
    let mut header = vec!["n".to_string()];
    header.extend(labels.iter().cloned());
    header.extend(labels.iter().map(|l| format!("{l}_float")));
    let rows = correlation_table_with(&mut Solver::new(), pair, max_n, wiener_cap)
        .map_err(failed)?
        .into_iter()
        .map(|r| {
            let (vx, vx_f) = opt_rational(&r.var_x);
            let (vy, vy_f) = opt_rational(&r.var_y);
            let f = |q: &BigRational| format_sig12(rational_to_f64(q));
            vec![
                r.n.to_string(),
                r.e_x.to_string(),
                r.e_y.to_string(),
                r.e_xy.to_string(),
                vx,
                vy,
                r.cov.to_string(),
                r.r.to_string(),
                f(&r.e_x),
                f(&r.e_y),
                f(&r.e_xy),
                vx_f,
                vy_f,
                f(&r.cov),
                correlation_float(&r.r),
            ]
        })
        .collect();
    Ok(table(header, rows, format))
}

/// One computed-versus-reference comparison.
struct Record {
    check: &'static str,
    subject: String,
    computed: f64,
    reference: f64,
    tolerance: f64,
    /// Roots are compared absolutely, everything else relatively.
    absolute: bool,
    passed: bool,
}

impl Record {
    fn new(check: &'static str, subject: String, computed: f64, reference: f64, tolerance: f64) -> Self {
        let err = relative_error(computed, reference);
        Record {
            check,
            subject,
            computed,
            reference,
            tolerance,
            absolute: false,
            passed: err <= tolerance,
        }
    }

    fn error(&self) -> f64 {
        if self.absolute {
            (self.computed - self.reference).abs()
        } else {
            relative_error(self.computed, self.reference)
        }
    }
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Tolerance on fitted `1/z0`.
const GROWTH_TOL: f64 = 2e-3;
/// Tolerance on amplitudes and bases derived from singular expansions.
const EXPANSION_TOL: f64 = 1e-5;
/// Absolute agreement of a bisected root with the tabulated decimal.
const ROOT_TOL: f64 = 5e-8;

fn parse_window(text: Option<&str>, order: usize) -> Result<(usize, usize), CliError> {
    let Some(text) = text else {
        return Ok((order / 2, order));
    };
    let bad = || CliError::Usage(format!("window {text:?} is not LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || hi <= lo + 1 || hi > order {
        return Err(CliError::Usage(format!(
            "window {lo}:{hi} must satisfy 1 <= lo < hi - 1 and hi <= order {order}"
        )));
    }
    Ok((lo, hi))
}

fn growth_records(
    solver: &mut Solver,
    catalog: &Catalog,
    order: usize,
    window: (usize, usize),
) -> Result<Vec<Record>, CliError> {
    let mut targets: Vec<(SystemId, f64)> = base_singularities()
        .iter()
        .map(|&(id, z0, _)| (id, z0))
        .collect();
    targets.extend(catalog.singularities.iter().map(|s| (s.system, s.z0)));
    let mut out = Vec::new();
    for (id, z0) in targets {
        let total = solver.solve(id, order).map_err(failed)?.total;
        let est = estimate_growth(&total, window.0, window.1)?;
        let mut rec = Record::new("growth", id.name().to_string(), est.inv_z0, 1.0 / z0, GROWTH_TOL);
        if let Some(s) = catalog.singularity(id) {
            rec.passed &= s.admits_inverse(est.inv_z0);
        }
        out.push(rec);
    }
    Ok(out)
}

fn root_records(catalog: &Catalog) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for s in &catalog.singularities {
        let Some(poly) = &s.polynomial else { continue };
        let coeffs: Vec<_> = poly.iter().map(|&c| c.into()).collect();
        let lo = decimal(&s.interval.0.to_string()).expect("finite bound");
        let hi = decimal(&s.interval.1.to_string()).expect("finite bound");
        let root = find_root(&coeffs, lo, hi, &root_tolerance())?;
        let value = root.value();
        out.push(Record {
            check: "roots",
            subject: s.system.name().to_string(),
            computed: value,
            reference: s.z0,
            tolerance: ROOT_TOL,
            absolute: true,
            passed: (value - s.z0).abs() <= ROOT_TOL,
        });
    }
    Ok(out)
}

fn expansion_records(catalog: &Catalog) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for s in &catalog.singularities {
        let q = match s.system {
            SystemId::SZ => Quantity::Product(Index::Sigma, Index::Z),
            SystemId::SR => Quantity::Product(Index::Sigma, Index::Rho),
            SystemId::ZR => Quantity::Product(Index::Z, Index::Rho),
            SystemId::SS => Quantity::Variance(Index::Sigma),
            SystemId::ZZ => Quantity::Variance(Index::Z),
            SystemId::RR => Quantity::Variance(Index::Rho),
            _ => continue,
        };
        let c = catalog
            .constant(q)
            .ok_or_else(|| failed(format!("no catalog entry for {q}")))?;
        let name = s.system.name();
        out.push(Record::new("expansions", format!("{name} amplitude"), 2.0 * s.expansion.1, c.amplitude, EXPANSION_TOL));
        out.push(Record::new("expansions", format!("{name} base"), 1.0 / (4.0 * s.z0), c.base, EXPANSION_TOL));
    }
    Ok(out)
}

fn catalog_table(catalog: &Catalog) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(&["quantity", "amplitude", "base", "alpha", "amplitude_form", "base_form", "source"]);
    let rows = catalog
        .constants
        .iter()
        .map(|c| {
            vec![
                c.quantity.to_string(),
                format_sig12(c.amplitude),
                format_sig12(c.base),
                c.alpha.to_string(),
                c.amplitude_form.unwrap_or("").to_string(),
                c.base_form.unwrap_or("").to_string(),
                c.source.to_string(),
            ]
        })
        .collect();
    (header, rows)
}

fn record_table(records: &[Record]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(&["check", "subject", "computed", "reference", "error", "tolerance", "pass"]);
    let rows = records
        .iter()
        .map(|r| {
            vec![
                r.check.to_string(),
                r.subject.clone(),
                format_sig12(r.computed),
                format_sig12(r.reference),
                format_sig12(r.error()),
                format_sig12(r.tolerance),
                r.passed.to_string(),
            ]
        })
        .collect();
    (header, rows)
}

fn record_json(records: &[Record]) -> Value {
    Value::Array(
        records
            .iter()
            .map(|r| {
                json!({
                    "check": r.check,
                    "subject": r.subject,
                    "computed": float(r.computed),
                    "reference": float(r.reference),
                    "error": float(r.error()),
                    "tolerance": float(r.tolerance),
                    "pass": r.passed,
                })
            })
            .collect(),
    )
}

pub fn asymptotics(check: Check, order: usize, window: Option<&str>, format: Format) -> Result<String, CliError> {
    let catalog = reference_catalog();
    if check == Check::Catalog {
        let (header, rows) = catalog_table(&catalog);
        return Ok(table(header, rows, format));
    }
    let window = parse_window(window, order)?;
    let mut solver = Solver::new();
    let mut records = Vec::new();
    if matches!(check, Check::All | Check::Growth) {
        records.extend(growth_records(&mut solver, &catalog, order, window)?);
    }
    if matches!(check, Check::All | Check::Roots) {
        records.extend(root_records(&catalog)?);
    }
    if matches!(check, Check::All | Check::Expansions) {
        records.extend(expansion_records(&catalog)?);
    }
    Ok(match format {
        Format::Csv => {
            let (header, rows) = record_table(&records);
            csv_text(&header, &rows)
        }
        Format::Json => {
            let mut v = json!({
                "order": order,
                "window": [window.0, window.1],
                "records": record_json(&records),
            });
            if check == Check::All {
                let (header, rows) = catalog_table(&catalog);
                v["catalog"] = json_rows(&header, &rows);
            }
            pretty(&v)
        }
    })
}

/// Quantities whose convergence is tabulated by `report`.
fn report_quantities() -> Vec<Quantity> {
    use Index::*;
    let mut q: Vec<Quantity> = [Sigma, Z, Rho, Wiener].into_iter().map(Quantity::Mean).collect();
    q.extend([Sigma, Z, Rho].into_iter().map(Quantity::Variance));
    q.extend([
        Quantity::Product(Sigma, Z),
        Quantity::Product(Sigma, Rho),
        Quantity::Product(Z, Rho),
        Quantity::Product(Wiener, Sigma),
        Quantity::Product(Wiener, Z),
        Quantity::Product(Wiener, Rho),
    ]);
    q
}

pub fn report(order: usize, step: usize, format: Format) -> Result<String, CliError> {
    if order == 0 {
        return Err(CliError::Usage("order must be at least 1".into()));
    }
    let catalog = reference_catalog();
    let corr_header = strings(&[
        "pair",
        "reference_amplitude",
        "composed_amplitude",
        "reference_base",
        "composed_base",
        "relative_error",
    ]);
    let mut corr_rows = Vec::new();
    for printed in &catalog.correlations {
        let composed = compose_pair(&catalog, printed.pair)?;
        let err = relative_error(composed.amplitude, printed.amplitude)
            .max(relative_error(composed.base, printed.base));
        corr_rows.push(vec![
            printed.pair.to_string(),
            format_sig12(printed.amplitude),
            format_sig12(composed.amplitude),
            format_sig12(printed.base),
            format_sig12(composed.base),
            format_sig12(err),
        ]);
    }

    let sizes = size_grid(step.max(1), order, step);
    let mut solver = Solver::new();
    let conv_header = strings(&["quantity", "n", "exact", "asymptotic", "ratio"]);
    let mut conv_rows = Vec::new();
    for q in report_quantities() {
        for row in convergence_report(&mut solver, &catalog, q, &sizes)? {
            conv_rows.push(vec![
                q.to_string(),
                row.n.to_string(),
                row.exact.to_string(),
                format_sig12(row.asymptotic),
                format_sig12(row.ratio),
            ]);
        }
    }
    Ok(match format {
        Format::Csv => {
            let mut s = csv_text(&corr_header, &corr_rows);
            s.push('\n');
            s.push_str(&csv_text(&conv_header, &conv_rows));
            s
        }
        Format::Json => pretty(&json!({
            "correlations": json_rows(&corr_header, &corr_rows),
            "convergence": json_rows(&conv_header, &conv_rows),
        })),
    })
}

/// Text report and the name of the first failing check.
pub fn verify(order: usize, seed: u64) -> (String, Option<String>) {
    let checks = run_suite(order, seed);
    let mut out = String::new();
    for c in &checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed} of {} checks passed\n", checks.len()));
    (out, checks.into_iter().find(|c| !c.passed).map(|c| c.name))
}
