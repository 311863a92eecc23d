//! Python bindings. Exact integers come back as Python ints, high-precision
//! reals as decimal strings.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sector_core::bounds::{subsequential_limits, BoundsEngine};
use sector_core::cli::{self, Command, Format, RunConfig};
use sector_core::oracle::{LatticeOracle, ScanStrategy};
use sector_core::real::DEFAULT_PRECISION;
use sector_core::sector::{parse_radius, SectorProfile};
use sector_core::{Alpha, Error};

create_exception!(sector, SectorError, PyException);
create_exception!(sector, InputError, SectorError);
create_exception!(sector, PrecisionError, SectorError);
create_exception!(sector, CheckFailed, SectorError);

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match cli::exit_code(&err) {
        cli::EXIT_PRECISION => PrecisionError::new_err(msg),
        cli::EXIT_CHECK_FAILED => CheckFailed::new_err(msg),
        _ => InputError::new_err(msg),
    }
}

fn alpha(spec: &str) -> PyResult<Alpha> {
    Alpha::parse(spec).map_err(to_py)
}

/// Partial quotients a_0 .. a_{count-1}.
#[pyfunction]
fn quotients(spec: &str, count: usize) -> PyResult<Vec<BigInt>> {
    alpha(spec)?.cf().quotients(count).map_err(to_py)
}

/// Convergents (p_k, q_k) for k = 0 .. count-1.
#[pyfunction]
fn convergents(spec: &str, count: usize) -> PyResult<Vec<(BigInt, BigInt)>> {
    let a = alpha(spec)?;
    let convs = a.cf().convergents(count).map_err(to_py)?;
    Ok(convs.into_iter().map(|c| (c.p, c.q)).collect())
}

/// `(θ(r), A(r), branch)` from the convergent formula; `r` accepts a decimal
/// or `r2:<rational>`.
#[pyfunction]
#[pyo3(signature = (spec, r, precision = DEFAULT_PRECISION, digits = 20))]
fn area(spec: &str, r: &str, precision: u32, digits: usize) -> PyResult<(String, String, i64)> {
    let a = alpha(spec)?;
    let r = parse_radius(r, precision).map_err(to_py)?;
    let profile = SectorProfile::covering(&a, &r.squared(), 2, precision).map_err(to_py)?;
    let theta = profile.theta_cf(&r).map_err(to_py)?;
    let (area, branch) = profile.area_with_branch(&r).map_err(to_py)?;
    Ok((theta.to_decimal(digits), area.to_decimal(digits), branch.label()))
}

/// `m_k`, `M_k` for `k = 0 .. depth-1` as a list of dicts.
#[pyfunction]
#[pyo3(signature = (spec, depth = 40, precision = DEFAULT_PRECISION, digits = 20))]
fn extrema<'py>(py: Python<'py>, spec: &str, depth: usize, precision: u32, digits: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let a = alpha(spec)?;
    let profile = SectorProfile::build(&a, depth, precision).map_err(to_py)?;
    let records = profile.extrema(profile.depth()).map_err(to_py)?;
    records
        .into_iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("k", e.k)?;
            d.set_item("m", e.m.to_decimal(digits))?;
            d.set_item("M", e.big_m.to_decimal(digits))?;
            d.set_item("r2_lo", e.r2_lo)?;
            d.set_item("r2_hi", e.r2_hi)?;
            Ok(d)
        })
        .collect()
}

/// Every bracket for `k = 0..=max_k`.
#[pyfunction]
#[pyo3(signature = (spec, max_k = 30, precision = DEFAULT_PRECISION, digits = 20))]
fn bounds<'py>(py: Python<'py>, spec: &str, max_k: usize, precision: u32, digits: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let a = alpha(spec)?;
    let engine = BoundsEngine::new(&a, max_k, precision).map_err(to_py)?;
    let brackets = engine.all().map_err(to_py)?;
    brackets
        .into_iter()
        .map(|b| {
            let d = PyDict::new(py);
            d.set_item("k", b.k)?;
            d.set_item("target", b.target.name())?;
            d.set_item("lower", b.lower.to_decimal(digits))?;
            d.set_item("value", b.value.to_decimal(digits))?;
            d.set_item("upper", b.upper.to_decimal(digits))?;
            d.set_item("holds", b.holds)?;
            Ok(d)
        })
        .collect()
}

/// Limits `C_i` and the aggregates `m`, `nu`, `M`, `mu`, each as
/// `(decimal, exact)`.
#[pyfunction]
#[pyo3(signature = (spec, precision = DEFAULT_PRECISION, digits = 20))]
fn limits<'py>(py: Python<'py>, spec: &str, precision: u32, digits: usize) -> PyResult<Bound<'py, PyDict>> {
    let a = alpha(spec)?;
    let c = subsequential_limits(a.cf(), precision).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("period", c.period.clone())?;
    let cs: Vec<(String, String)> = c
        .limits
        .iter()
        .map(|l| (l.c.to_real(precision).to_decimal(digits), l.c.to_string()))
        .collect();
    d.set_item("C", cs)?;
    for (name, agg) in [("m", &c.m), ("nu", &c.nu), ("M", &c.big_m), ("mu", &c.mu)] {
        d.set_item(name, (agg.value.to_decimal(digits), agg.exact.to_string()))?;
    }
    Ok(d)
}

type BestPoint = (Option<(i64, i64)>, String, String, bool);

/// The oracle at radius `r`: `(best_point, theta_exact, theta_cf, agree)`.
#[pyfunction]
#[pyo3(signature = (spec, r, precision = DEFAULT_PRECISION, digits = 20))]
fn best_point(spec: &str, r: &str, precision: u32, digits: usize) -> PyResult<BestPoint> {
    let a = alpha(spec)?;
    let r = parse_radius(r, precision).map_err(to_py)?;
    let res = sector_core::oracle::best_point(&a, &r, precision).map_err(to_py)?;
    Ok((
        res.best_point.map(|p| (p.q, p.p)),
        res.theta_exact.to_decimal(digits),
        res.theta_cf.to_decimal(digits),
        res.matches_cf,
    ))
}

/// Disagreement intervals on `(r_min, r_max]` as a list of dicts.
#[pyfunction]
#[pyo3(signature = (spec, r_min, r_max, samples = 10_000, precision = DEFAULT_PRECISION))]
fn discrepancy_scan<'py>(
    py: Python<'py>,
    spec: &str,
    r_min: &str,
    r_max: &str,
    samples: usize,
    precision: u32,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let a = alpha(spec)?;
    let lo = parse_radius(r_min, precision).map_err(to_py)?;
    let hi = parse_radius(r_max, precision).map_err(to_py)?;
    let oracle = LatticeOracle::new(&a, &hi, ScanStrategy::Auto, precision).map_err(to_py)?;
    let found = oracle.discrepancy_scan(&lo, &hi, samples).map_err(to_py)?;
    found
        .into_iter()
        .map(|x| {
            let d = PyDict::new(py);
            d.set_item("r_lo", x.r_lo)?;
            d.set_item("r_hi", x.r_hi)?;
            d.set_item("r2_lo", x.r2_lo)?;
            d.set_item("r2_hi", x.r2_hi)?;
            d.set_item("oracle_point", x.oracle_point)?;
            d.set_item("cf_branch", x.cf_branch)?;
            Ok(d)
        })
        .collect()
}

/// Runs a CLI subcommand in-process and returns `(exit_status, report)`.
#[pyfunction]
#[pyo3(signature = (command, spec, depth = 40, precision = DEFAULT_PRECISION, r_min = None, r_max = None, samples = None, json = false, digits = 20))]
#[allow(clippy::too_many_arguments)]
fn run(
    command: &str,
    spec: &str,
    depth: u64,
    precision: u32,
    r_min: Option<String>,
    r_max: Option<String>,
    samples: Option<u64>,
    json: bool,
    digits: u64,
) -> PyResult<(i32, String)> {
    let command = match command {
        "expand" => Command::Expand,
        "area" => Command::Area,
        "extrema" => Command::Extrema,
        "bounds" => Command::Bounds,
        "limits" => Command::Limits,
        "oracle-check" => Command::OracleCheck,
        "discrepancy-scan" => Command::DiscrepancyScan,
        other => return Err(InputError::new_err(format!("unknown command `{other}`"))),
    };
    let cfg = RunConfig {
        alpha: Some(spec.to_string()),
        depth,
        precision,
        r_min,
        r_max,
        samples,
        format: Some(if json { Format::Json } else { Format::Csv }),
        out: None,
        digits,
    };
    let out = cli::execute(command, &cfg).map_err(to_py)?;
    Ok((out.status(), out.text))
}

#[pymodule]
fn sector(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SectorError", py.get_type::<SectorError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("PrecisionError", py.get_type::<PrecisionError>())?;
    m.add("CheckFailed", py.get_type::<CheckFailed>())?;
    m.add_function(wrap_pyfunction!(quotients, m)?)?;
    m.add_function(wrap_pyfunction!(convergents, m)?)?;
    m.add_function(wrap_pyfunction!(area, m)?)?;
    m.add_function(wrap_pyfunction!(extrema, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(limits, m)?)?;
    m.add_function(wrap_pyfunction!(best_point, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
