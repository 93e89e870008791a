use num_complex::Complex64;
use num_integer::Integer;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cyclotorsion::analytic::{period_lattice, rational_reconstruct, theta_map};
use cyclotorsion::arith::ring::{format_rational, Ring};
use cyclotorsion::counting::{compute_delta as delta_core, count_rational_points, CompactSetSpec, CountConfig};
use cyclotorsion::cyclotomic::{sl2_torsion_order, CyclotomicField, CyclotomicNumber, RootOfUnityTuple, Sl2Order};
use cyclotorsion::elliptic::EllipticScheme;
use cyclotorsion::extension::FieldTower;
use cyclotorsion::precise::Complex;
use cyclotorsion::search::{self, SearchConfig, TorsionCertificate};
use cyclotorsion::torus;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_cyc(s: &str) -> PyResult<CyclotomicNumber> {
    CyclotomicNumber::parse(s).map_err(value_err)
}

/// An element of a cyclotomic field `Q(ζ_N)`.
#[pyclass(name = "Cyclotomic", module = "cyclotorsion")]
#[derive(Clone)]
struct PyCyclotomic {
    inner: CyclotomicNumber,
}

impl PyCyclotomic {
    fn common(&self, o: &PyCyclotomic) -> PyResult<(CyclotomicNumber, CyclotomicNumber)> {
        let n = self.inner.field().conductor().lcm(&o.inner.field().conductor());
        let k = CyclotomicField::new(n);
        Ok((self.inner.lift(&k).map_err(value_err)?, o.inner.lift(&k).map_err(value_err)?))
    }
}

#[pymethods]
impl PyCyclotomic {
    /// Parses expressions such as `"z5 + z5^-1"` or `"-4 + 4(z8 + z8^7)"`.
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        Ok(PyCyclotomic { inner: parse_cyc(expr)? })
    }

    #[getter]
    fn conductor(&self) -> u64 {
        self.inner.field().conductor()
    }

    fn degree(&self) -> usize {
        self.inner.degree_over_q()
    }

    /// Coefficients of the minimal polynomial over Q, constant term first.
    fn minimal_polynomial(&self) -> Vec<String> {
        self.inner.minimal_polynomial().coeffs().iter().map(format_rational).collect()
    }

    #[pyo3(signature = (j=1, prec=128))]
    fn embed(&self, j: u64, prec: u32) -> PyResult<Complex64> {
        Ok(self.inner.embed(j, prec).map_err(value_err)?.to_c64())
    }

    fn is_zero(&self) -> bool {
        Ring::is_zero(&self.inner)
    }

    fn __add__(&self, o: &PyCyclotomic) -> PyResult<Self> {
        let (a, b) = self.common(o)?;
        Ok(PyCyclotomic { inner: a.add_ref(&b) })
    }

    fn __sub__(&self, o: &PyCyclotomic) -> PyResult<Self> {
        let (a, b) = self.common(o)?;
        Ok(PyCyclotomic { inner: a.sub_ref(&b) })
    }

    fn __mul__(&self, o: &PyCyclotomic) -> PyResult<Self> {
        let (a, b) = self.common(o)?;
        Ok(PyCyclotomic { inner: a.mul_ref(&b) })
    }

    fn __truediv__(&self, o: &PyCyclotomic) -> PyResult<Self> {
        let (a, b) = self.common(o)?;
        let q = a.try_div(&b).map_err(|_| PyArithmeticError::new_err("division by zero"))?;
        Ok(PyCyclotomic { inner: q })
    }

    fn __eq__(&self, o: &PyCyclotomic) -> PyResult<bool> {
        let (a, b) = self.common(o)?;
        Ok(Ring::is_zero(&a.sub_ref(&b)))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Cyclotomic(N={}, {})", self.inner.field().conductor(), self.inner)
    }
}

/// A tuple of roots of unity `(ζ_N^{e_1}, …, ζ_N^{e_n})`.
#[pyclass(name = "RootTuple", module = "cyclotorsion")]
#[derive(Clone)]
struct PyRootTuple {
    inner: RootOfUnityTuple,
}

#[pymethods]
impl PyRootTuple {
    #[new]
    fn new(order: u64, exponents: Vec<i64>) -> PyResult<Self> {
        Ok(PyRootTuple { inner: RootOfUnityTuple::new(order, exponents).map_err(value_err)? })
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order
    }

    #[getter]
    fn exponents(&self) -> Vec<u64> {
        self.inner.exponents.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.n
    }

    fn tuple_order(&self) -> u64 {
        self.inner.tuple_order()
    }

    fn sum(&self) -> PyCyclotomic {
        PyCyclotomic { inner: self.inner.sum_of_roots() }
    }

    fn has_vanishing_subsum(&self) -> PyResult<bool> {
        self.inner.has_vanishing_subsum().map_err(value_err)
    }

    /// `(dimension, witness blocks)` of the largest torus coset in the
    /// variety `Σ x_i = ζ` through this tuple.
    fn maximal_subgroup(&self, zeta: &PyCyclotomic) -> PyResult<(usize, Option<Vec<Vec<usize>>>)> {
        let r = torus::maximal_subgroup_dimension(&self.inner, &zeta.inner).map_err(value_err)?;
        Ok((r.dimension, r.witness.map(|w| w.blocks)))
    }

    fn __repr__(&self) -> String {
        format!("RootTuple(N={}, {:?})", self.inner.order, self.inner.exponents)
    }
}

/// An elliptic scheme `y² = x³ + a x² + b x + c` over the λ-line with a
/// section of abscissa `x0(λ)`.
#[pyclass(name = "Scheme", module = "cyclotorsion")]
#[derive(Clone)]
struct PyScheme {
    inner: EllipticScheme,
}

#[pymethods]
impl PyScheme {
    #[new]
    fn new(a: &str, b: &str, c: &str, section_x: &str) -> PyResult<Self> {
        let j = cyclotorsion::elliptic::SchemeJson { a: a.into(), b: b.into(), c: c.into(), section_x: section_x.into() };
        Ok(PyScheme { inner: EllipticScheme::from_json(&j).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (x0=2))]
    fn legendre(x0: i64) -> Self {
        PyScheme { inner: EllipticScheme::legendre(x0) }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).unwrap()
    }

    /// Finite bad parameters as `(kind, integer polynomial, approximate root, height)`.
    #[pyo3(signature = (prec=128))]
    fn bad_set(&self, prec: u32) -> Vec<(String, Vec<String>, Complex64, f64)> {
        let b = self.inner.bad_reduction_set(prec);
        b.points
            .iter()
            .chain(&b.section_poles)
            .map(|p| (format!("{:?}", p.kind), p.poly.iter().map(|c| c.to_string()).collect(), p.approx_c64(), p.height))
            .collect()
    }

    /// Exact order `≤ t_max` of the section at a cyclotomic `λ`, or `None`.
    fn torsion_order(&self, lam: &PyCyclotomic, t_max: u64) -> PyResult<Option<u64>> {
        let tower = FieldTower::linear(&lam.inner);
        let sp = self.inner.specialize(&tower, &tower.generator()).map_err(value_err)?;
        sp.torsion_order(t_max).map_err(|_| PyRuntimeError::new_err("tower split unexpectedly"))
    }

    /// Betti coordinates `(b1, b2, err_log2)` and their rational
    /// reconstructions with denominators up to `qmax`.
    #[pyo3(signature = (lam, prec=256, qmax=1000))]
    fn betti(&self, lam: &PyCyclotomic, prec: u32, qmax: u64) -> PyResult<(f64, f64, f64, Option<String>, Option<String>)> {
        let l = lam.inner.embed(1, prec).map_err(value_err)?;
        let lp = theta_map::<Complex>(&self.inner, &l, &[], None).map_err(value_err)?;
        let rec = |x: &Complex| rational_reconstruct(&x.re, qmax, 1e-20).ok().flatten().map(|r| format_rational(&r));
        Ok((lp.betti.b1.re.to_f64(), lp.betti.b2.re.to_f64(), lp.betti.err_log2, rec(&lp.betti.b1), rec(&lp.betti.b2)))
    }
}

/// An exactly re-checkable torsion certificate.
#[pyclass(name = "Certificate", module = "cyclotorsion")]
#[derive(Clone)]
struct PyCertificate {
    inner: TorsionCertificate,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyCertificate { inner: serde_json::from_str(s).map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_pretty()
    }

    #[getter]
    fn tuple(&self) -> PyRootTuple {
        PyRootTuple { inner: self.inner.tuple.clone() }
    }

    #[getter]
    fn lambda_minpoly(&self) -> Vec<String> {
        self.inner.lambda_minpoly.clone()
    }

    #[getter]
    fn curve_order(&self) -> u64 {
        self.inner.curve_order
    }

    #[getter]
    fn tuple_order(&self) -> u64 {
        self.inner.tuple_order
    }

    #[getter]
    fn combined_order(&self) -> u64 {
        self.inner.combined_order
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree.absolute
    }

    #[getter]
    fn betti(&self) -> (String, String) {
        (self.inner.betti.b1_rational.clone(), self.inner.betti.b2_rational.clone())
    }

    /// Re-runs every check; returns `(passed, [(name, ok, detail), …])`.
    fn certify(&self, py: Python<'_>) -> (bool, Vec<(String, bool, String)>) {
        let r = py.allow_threads(|| search::certify(&self.inner));
        (r.passed, r.checks.into_iter().map(|c| (c.name.to_string(), c.ok, c.detail)).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(N={}, exponents={:?}, minpoly={:?}, m={}, T={})",
            self.inner.tuple.order, self.inner.tuple.exponents, self.inner.lambda_minpoly, self.inner.curve_order, self.inner.combined_order
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n, n_max, skip_vanishing_subsums=false, all_orders=false))]
fn enumerate_tuples(n: usize, n_max: u64, skip_vanishing_subsums: bool, all_orders: bool) -> Vec<PyRootTuple> {
    search::enumerate_tuples(n, n_max, skip_vanishing_subsums, all_orders).map(|t| PyRootTuple { inner: t }).collect()
}

/// Runs a search from a JSON configuration. Returns the certificates and
/// the resume token when the budget stopped the run.
#[pyfunction]
#[pyo3(signature = (config_json, resume=None))]
fn run_search(py: Python<'_>, config_json: &str, resume: Option<String>) -> PyResult<(Vec<PyCertificate>, Option<String>)> {
    let cfg: SearchConfig = serde_json::from_str(config_json).map_err(value_err)?;
    let out = py.allow_threads(|| search::run_search(&cfg, resume.as_deref())).map_err(value_err)?;
    Ok((out.certificates.into_iter().map(|c| PyCertificate { inner: c }).collect(), out.resume))
}

/// Search restricted to the given tuples.
#[pyfunction]
#[pyo3(signature = (tuples, t_max, precision_bits=256))]
fn certify_tuples(py: Python<'_>, tuples: Vec<PyRootTuple>, t_max: u64, precision_bits: u32) -> PyResult<Vec<PyCertificate>> {
    let mut cfg = SearchConfig::certify_only(tuples.into_iter().map(|t| t.inner).collect(), t_max);
    cfg.precision_bits = precision_bits;
    let out = py.allow_threads(|| search::run_search(&cfg, None)).map_err(value_err)?;
    Ok(out.certificates.into_iter().map(|c| PyCertificate { inner: c }).collect())
}

/// Periods `(ω1, ω2, τ)` of `y² = x³ + a x² + b x + c`, given as expressions.
#[pyfunction]
#[pyo3(signature = (a, b, c, prec=128))]
fn periods(a: &str, b: &str, c: &str, prec: u32) -> PyResult<(Complex64, Complex64, Complex64)> {
    let e = |s: &str| -> PyResult<Complex> { parse_cyc(s)?.embed(1, prec).map_err(value_err) };
    let lat = period_lattice(&e(a)?, &e(b)?, &e(c)?).map_err(value_err)?;
    Ok((lat.w1.to_c64(), lat.w2.to_c64(), lat.tau.to_c64()))
}

/// Order of `[[0, 1], [-1, λ]]` in `SL_2`, `None` when infinite.
#[pyfunction]
fn sl2_order(lam: &PyCyclotomic) -> Option<u64> {
    match sl2_torsion_order(&lam.inner) {
        Sl2Order::Finite(m) => Some(m),
        Sl2Order::Infinite => None,
    }
}

#[pyfunction]
fn compute_delta(a: f64, bad_heights: Vec<f64>, k_degree: u32) -> PyResult<f64> {
    Ok(delta_core(a, &bad_heights, k_degree).map_err(value_err)?.delta)
}

/// Rational-point count on the default Legendre configuration, as JSON.
#[pyfunction]
#[pyo3(signature = (n=2, t_max=16, precision_bits=256))]
fn count_points(py: Python<'_>, n: usize, t_max: u64, precision_bits: u32) -> PyResult<String> {
    let cfg = CountConfig { n, t_max, precision_bits, ..CountConfig::default() };
    let r = py
        .allow_threads(|| count_rational_points(&EllipticScheme::legendre(2), &CompactSetSpec::legendre_default(), &cfg))
        .map_err(value_err)?;
    Ok(serde_json::to_string(&r).unwrap())
}

#[pymodule]
#[pyo3(name = "cyclotorsion")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCyclotomic>()?;
    m.add_class::<PyRootTuple>()?;
    m.add_class::<PyScheme>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(enumerate_tuples, m)?)?;
    m.add_function(wrap_pyfunction!(run_search, m)?)?;
    m.add_function(wrap_pyfunction!(certify_tuples, m)?)?;
    m.add_function(wrap_pyfunction!(periods, m)?)?;
    m.add_function(wrap_pyfunction!(sl2_order, m)?)?;
    m.add_function(wrap_pyfunction!(compute_delta, m)?)?;
    m.add_function(wrap_pyfunction!(count_points, m)?)?;
    Ok(())
}
