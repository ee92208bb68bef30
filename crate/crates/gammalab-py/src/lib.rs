//! Python bindings: representations, Bessel tables, gamma factors and the
//! level-zero local factors.
//!
//! Scalars of `F_q^×` cross the boundary as exponents of the field's
//! canonical generator.

use std::sync::Arc;

use gammalab::bessel::BesselTable;
use gammalab::charkit::{galois_orbit, regular_orbit_representatives, restriction_is_trivial, AddChar};
use gammalab::cuspchar::CuspidalRep;
use gammalab::exjs::{self, FeOptions};
use gammalab::ffield::{build_field, FieldCtx};
use gammalab::levelzero::{self, LevelZeroCtx};
use gammalab::GammaError;
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: GammaError) -> PyErr {
    match e {
        GammaError::NonConstantRatio { .. } | GammaError::OracleFailed(_) | GammaError::DimensionBoundViolated(_) => {
            PyArithmeticError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A cuspidal representation of `GL_n(F_q)` attached to `θ = gen^k`.
#[pyclass(name = "CuspidalRep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRep {
    inner: CuspidalRep,
    e: u32,
}

#[pymethods]
impl PyRep {
    #[new]
    #[pyo3(signature = (p, n, k, e = 1))]
    fn new(p: u32, n: u32, k: i64, e: u32) -> PyResult<Self> {
        let f = build_field(p, e, n).map_err(to_py)?;
        Ok(PyRep { inner: CuspidalRep::new(&f, n, k).map_err(to_py)?, e })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.field().p()
    }
    #[getter]
    fn e(&self) -> u32 {
        self.e
    }
    #[getter]
    fn q(&self) -> u64 {
        self.inner.field().q()
    }
    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }
    #[getter]
    fn k(&self) -> u64 {
        self.inner.theta().exponent()
    }
    #[getter]
    fn degree(&self) -> f64 {
        self.inner.degree()
    }

    /// Exponents of the Frobenius orbit of `θ`.
    fn orbit(&self) -> Vec<u64> {
        galois_orbit(self.k(), self.q(), self.n())
    }

    fn has_shalika_vector(&self) -> bool {
        let n = self.inner.n();
        n % 2 == 0 && restriction_is_trivial(self.inner.theta(), n / 2)
    }

    fn contragredient(&self) -> Self {
        PyRep { inner: self.inner.contragredient(), e: self.e }
    }

    /// `⟨χ, χ⟩` over conjugacy classes and the character degree.
    fn verify_irreducible(&self) -> PyResult<(f64, f64)> {
        let r = self.inner.verify_irreducible().map_err(to_py)?;
        Ok((r.inner_product, r.degree))
    }

    /// `dim Hom_H(π, 1)` for the multiplicity-one subgroup.
    fn homdim(&self) -> PyResult<i64> {
        Ok(exjs::homdim_check(&self.inner).map_err(to_py)?.dimension)
    }

    fn __repr__(&self) -> String {
        format!("CuspidalRep(p={}, e={}, n={}, k={})", self.p(), self.e, self.n(), self.k())
    }
}

/// A rational function `X^x_shift · num(X) / den(X)` in `X = q^{-s}`.
#[pyclass(name = "RatQS", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRatQS {
    inner: levelzero::RatQS,
}

#[pymethods]
impl PyRatQS {
    #[getter]
    fn num(&self) -> Vec<Complex64> {
        self.inner.num.clone()
    }
    #[getter]
    fn den(&self) -> Vec<Complex64> {
        self.inner.den.clone()
    }
    #[getter]
    fn x_shift(&self) -> i64 {
        self.inner.x_shift
    }

    fn __call__(&self, x: Complex64) -> Complex64 {
        self.inner.eval(x)
    }

    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    fn has_pole(&self) -> bool {
        self.inner.has_pole()
    }

    fn approx_eq(&self, other: &PyRatQS) -> bool {
        self.inner.approx_eq(&other.inner)
    }

    fn __mul__(&self, other: &PyRatQS) -> PyRatQS {
        PyRatQS { inner: self.inner.mul(&other.inner) }
    }

    fn __repr__(&self) -> String {
        format!("RatQS({})", self.inner)
    }
}

fn wrap(r: levelzero::RatQS) -> PyRatQS {
    PyRatQS { inner: r }
}

/// The tabulated Bessel function of a representation.
#[pyclass(name = "BesselTable", frozen)]
struct PyBessel {
    inner: BesselTable,
    field: Arc<FieldCtx>,
}

fn build_table(rep: &PyRep, psi_inverse: bool) -> BesselTable {
    BesselTable::build(&rep.inner, &AddChar::new(rep.inner.field(), psi_inverse))
}

#[pymethods]
impl PyBessel {
    #[new]
    #[pyo3(signature = (rep, psi_inverse = false))]
    fn new(py: Python<'_>, rep: &PyRep, psi_inverse: bool) -> Self {
        let inner = py.detach(|| build_table(rep, psi_inverse));
        PyBessel { inner, field: rep.inner.field().clone() }
    }

    /// `𝓑(antidiag(λ_1 I_{n_1}, …, λ_r I_{n_r}))` with `λ_i = gen^{exponents[i]}`.
    fn value(&self, composition: Vec<usize>, exponents: Vec<usize>) -> PyResult<Complex64> {
        let q1 = self.field.q() as usize - 1;
        let scalars: Vec<u32> = exponents.iter().map(|&j| self.field.fq_from_slot(j % q1 + 1)).collect();
        self.inner
            .entry(&composition, &scalars)
            .ok_or_else(|| PyValueError::new_err("not a cell of the table: check the composition length"))
    }

    /// `(composition, exponents, value)` for every cell.
    fn entries(&self) -> Vec<(Vec<usize>, Vec<usize>, Complex64)> {
        self.inner
            .entries()
            .iter()
            .map(|((c, s), v)| (c.clone(), s.iter().map(|&x| self.field.fq_slot(x) - 1).collect(), *v))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.entries().len()
    }
}

/// `γ(π, ∧², ψ)` by the ratio, torus and closed-form routes.
///
/// Returns `(ratio, torus, closed_form or None, residual, pairs_checked)`.
#[pyfunction]
#[pyo3(signature = (rep, psi_inverse = false, trials = 128, seed = 0x6a73))]
fn gamma(
    py: Python<'_>,
    rep: &PyRep,
    psi_inverse: bool,
    trials: usize,
    seed: u64,
) -> PyResult<(Complex64, Complex64, Option<Complex64>, f64, usize)> {
    py.detach(|| {
        let table = build_table(rep, psi_inverse);
        let opts = FeOptions { seed, trials, ..FeOptions::default() };
        let ratio = exjs::gamma_ratio(&table, &opts).map_err(to_py)?;
        let torus = exjs::gamma_torus(&table).map_err(to_py)?;
        let closed = match exjs::gamma_closed(&rep.inner, table.psi()) {
            Ok(r) => Some(r.value),
            Err(GammaError::UnsupportedN(_) | GammaError::PreconditionViolated(_)) => None,
            Err(e) => return Err(to_py(e)),
        };
        Ok((ratio.value, torus.value, closed, ratio.residual, ratio.pairs_checked))
    })
}

/// `(criterion, nonvanishing_found, broken_equation_holds)`.
#[pyfunction]
#[pyo3(signature = (rep, samples = 1000, seed = 1))]
fn shalika_detect(py: Python<'_>, rep: &PyRep, samples: usize, seed: u64) -> PyResult<(bool, bool, bool)> {
    py.detach(|| {
        let r = exjs::shalika_detect(&build_table(rep, false), samples, 100_000, seed).map_err(to_py)?;
        Ok((r.criterion, r.nonvanishing_found, r.consistent()))
    })
}

/// `(L, ε, γ)` of the level zero representation with `ω_π(ϖ) = c`.
#[pyfunction]
#[pyo3(signature = (rep, c = Complex64::new(1.0, 0.0), psi_inverse = false))]
fn local_factors(py: Python<'_>, rep: &PyRep, c: Complex64, psi_inverse: bool) -> PyResult<(PyRatQS, PyRatQS, PyRatQS)> {
    py.detach(|| {
        let ctx = LevelZeroCtx::new(&build_table(rep, psi_inverse), c).map_err(to_py)?;
        let (l, eps) = levelzero::local_l_eps(&ctx).map_err(to_py)?;
        Ok((wrap(l), wrap(eps), wrap(levelzero::local_gamma(&ctx).map_err(to_py)?)))
    })
}

/// `(γ̃, max_residual, pairs_checked)` for the modified functional equation.
#[pyfunction]
#[pyo3(signature = (rep, trials = 128, seed = 0x6a73))]
fn modified_fe(py: Python<'_>, rep: &PyRep, trials: usize, seed: u64) -> PyResult<(PyRatQS, f64, usize)> {
    py.detach(|| {
        let opts = FeOptions { seed, trials, ..FeOptions::default() };
        let r = levelzero::modified_fe_check(&build_table(rep, false), &opts).map_err(to_py)?;
        Ok((wrap(r.gamma), r.max_residual, r.pairs_checked))
    })
}

/// `1/(1 − c X^m)`.
#[pyfunction]
fn l_factor(c: Complex64, m: u32) -> PyResult<PyRatQS> {
    levelzero::l_factor(c, m).map(wrap).map_err(to_py)
}

#[pyfunction(name = "regular_orbit_representatives")]
fn orbit_reps(q: u64, n: u32) -> Vec<u64> {
    regular_orbit_representatives(q, n)
}

#[pymodule]
fn gammalab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRep>()?;
    m.add_class::<PyBessel>()?;
    m.add_class::<PyRatQS>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(shalika_detect, m)?)?;
    m.add_function(wrap_pyfunction!(local_factors, m)?)?;
    m.add_function(wrap_pyfunction!(modified_fe, m)?)?;
    m.add_function(wrap_pyfunction!(l_factor, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_reps, m)?)?;
    m.add("SCHEMA", "gammalab/1")?;
    Ok(())
}
