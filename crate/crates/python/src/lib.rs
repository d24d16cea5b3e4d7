//! Python bindings. Build with `--features extension-module` and import the
//! resulting shared library as `pygrauert`.

use grauert::beams::{beam_spec, floquet_frame, Curvature};
use grauert::geometries::{
    circle_eigendata, sphere_eigendata, torus_eigendata, tube_point, EigenIndex, Eigendata, EigendataEntry, Geometry,
};
use grauert::qfunction::{q_eval_many, QFunctionSpec};
use grauert::symplectic::{classify, power_sequence, SymplecticMap};
use grauert::weyl::{husimi_sup, l2_norm_boundary, tempered_sum, Quadrature, SearchGrid};
use grauert::GrauertError;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: GrauertError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn map(rows: Vec<Vec<f64>>) -> PyResult<SymplecticMap> {
    SymplecticMap::from_rows(&rows, 1e-9).map_err(py_err)
}

fn geometry(name: &str, m: Option<usize>) -> PyResult<Geometry> {
    match (name, m) {
        ("circle", _) => Ok(Geometry::Circle),
        ("sphere", _) => Ok(Geometry::Sphere),
        ("torus", Some(m)) => Ok(Geometry::Torus { m }),
        ("torus", None) => Err(PyValueError::new_err("torus needs m")),
        _ => Err(PyValueError::new_err(format!("unknown geometry {name:?}"))),
    }
}

fn eigendata(g: Geometry, lambda_max: f64) -> PyResult<Eigendata> {
    match g {
        Geometry::Circle => circle_eigendata(lambda_max),
        Geometry::Torus { m } => torus_eigendata(m, lambda_max),
        _ => sphere_eigendata(lambda_max.ceil() as usize),
    }
    .map_err(py_err)
}

fn entry(g: Geometry, k: Option<Vec<i64>>, harmonic: Option<(usize, i64)>) -> PyResult<EigendataEntry> {
    match (g, k, harmonic) {
        (Geometry::Sphere, _, Some((n, m))) => {
            Ok(EigendataEntry { lambda: ((n * (n + 1)) as f64).sqrt(), index: EigenIndex::Sphere { n, m } })
        }
        (Geometry::Circle, Some(k), _) if k.len() == 1 => {
            Ok(EigendataEntry { lambda: k[0].unsigned_abs() as f64, index: EigenIndex::Circle(k[0]) })
        }
        (Geometry::Torus { .. }, Some(k), _) => {
            let lambda = k.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
            Ok(EigendataEntry { lambda, index: EigenIndex::Torus(k.into()) })
        }
        _ => Err(PyValueError::new_err("pass k for the circle and tori, harmonic=(N, M) for the sphere")),
    }
}

/// Classification tag of a symplectic matrix given as a list of rows.
#[pyfunction]
fn classify_matrix(rows: Vec<Vec<f64>>) -> PyResult<String> {
    Ok(classify(&map(rows)?, 1e-9).map_err(py_err)?.to_string())
}

/// Matrix elements `G_1..G_n` with the branch tracked along the powers.
#[pyfunction]
fn matrix_elements(rows: Vec<Vec<f64>>, n: usize) -> PyResult<Vec<Complex64>> {
    Ok(power_sequence(&map(rows)?, n).map_err(py_err)?.into_iter().map(|g| g.value).collect())
}

/// `Q(λ)` for `G_n = e^{ins₀}` (pass `s0`) or `Π (cosh nμ_j)^{−1/2}` (pass `mus`).
#[pyfunction]
#[pyo3(signature = (period, lambdas, s0=None, mus=None))]
fn q_values(period: f64, lambdas: Vec<f64>, s0: Option<f64>, mus: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
    let spec = match (s0, mus) {
        (Some(s0), None) => QFunctionSpec::elliptic(period, s0),
        (None, Some(mus)) => QFunctionSpec::hyperbolic(period, mus),
        _ => return Err(PyValueError::new_err("pass exactly one of s0 and mus")),
    }
    .map_err(py_err)?;
    q_eval_many(&spec, &lambdas).map_err(py_err)
}

/// Tempered counting function `P^τ_{[0,λ]}(ζ, ζ̄)` at `ζ = E(x, τ·direction)`.
#[pyfunction]
#[pyo3(signature = (geometry_name, tau, lam, x, direction, m=None))]
fn tempered_counting(
    geometry_name: &str,
    tau: f64,
    lam: f64,
    x: Vec<f64>,
    direction: Vec<f64>,
    m: Option<usize>,
) -> PyResult<f64> {
    let g = geometry(geometry_name, m)?;
    let data = eigendata(g, lam.max(1.0))?;
    let p = tube_point(g, &x, &direction, tau).map_err(py_err)?;
    tempered_sum(&data, &p, tau, lam).map_err(py_err)
}

/// `‖φ^ℂ‖²` over the tube boundary.
#[pyfunction]
#[pyo3(signature = (geometry_name, tau, k=None, harmonic=None, m=None))]
fn boundary_norm(
    geometry_name: &str,
    tau: f64,
    k: Option<Vec<i64>>,
    harmonic: Option<(usize, i64)>,
    m: Option<usize>,
) -> PyResult<f64> {
    let e = entry(geometry(geometry_name, m)?, k, harmonic)?;
    l2_norm_boundary(&e, tau, Quadrature::Auto).map_err(py_err)
}

/// Husimi supremum and its location `(value, x, xi)`.
#[pyfunction]
#[pyo3(signature = (geometry_name, tau, k=None, harmonic=None, m=None))]
fn husimi_maximum(
    geometry_name: &str,
    tau: f64,
    k: Option<Vec<i64>>,
    harmonic: Option<(usize, i64)>,
    m: Option<usize>,
) -> PyResult<(f64, Vec<f64>, Vec<f64>)> {
    let e = entry(geometry(geometry_name, m)?, k, harmonic)?;
    let s = husimi_sup(&e, tau, SearchGrid::default(), Quadrature::Auto).map_err(py_err)?;
    Ok((s.value, s.argmax.x, s.argmax.xi))
}

/// Floquet angles and `r_k` of the Gaussian beam along a geodesic with
/// curvature `base + eps·cos(freq·s)`.
#[pyfunction]
#[pyo3(signature = (base, eps, freq, length, k, steps=10_000))]
fn beam_quantization(base: f64, eps: f64, freq: f64, length: f64, k: i64, steps: usize) -> PyResult<(Vec<f64>, f64)> {
    let frame = floquet_frame(&Curvature::cosine(base, eps, freq), length, steps).map_err(py_err)?;
    let spec = beam_spec(&frame, k).map_err(py_err)?;
    Ok((frame.alphas, spec.r))
}

/// Runs the verification suites: `[(id, title, passed, line)]`.
#[pyfunction]
fn verify_all() -> Vec<(u32, String, bool, String)> {
    grauert::verify::verify_all().criteria.into_iter().map(|c| (c.id, c.title.clone(), c.passed(), c.line())).collect()
}

#[pymodule]
fn pygrauert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_elements, m)?)?;
    m.add_function(wrap_pyfunction!(q_values, m)?)?;
    m.add_function(wrap_pyfunction!(tempered_counting, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_norm, m)?)?;
    m.add_function(wrap_pyfunction!(husimi_maximum, m)?)?;
    m.add_function(wrap_pyfunction!(beam_quantization, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
