//! Python bindings for the core types: near-fields, cyclotomic schemes,
//! Zsigmondy primes and the census harness.

use nearcyc_core::census::{run_census as census, CensusOptions, Check};
use nearcyc_core::nearfield::{
    classify_variants, count_dickson_nearfields, verify_nearfield_axioms, DicksonNearField,
    DicksonPair,
};
use nearcyc_core::scheme::{self, AutGroup, CyclotomicScheme};
use nearcyc_core::{zsigmondy, Elt};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::path::PathBuf;

fn err(e: nearcyc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// True when (q, n) parameterizes a Dickson near-field.
#[pyfunction]
fn is_dickson_pair(q: u64, n: u32) -> PyResult<bool> {
    DicksonPair::is_valid(q, n).map_err(err)
}

/// Number of isomorphism classes of Dickson near-fields for (q, n).
#[pyfunction]
fn count_nearfields(q: u64, n: u32) -> PyResult<u64> {
    count_dickson_nearfields(q, n).map_err(err)
}

/// Partition of the variant indices into isomorphism classes (brute force).
#[pyfunction]
fn variant_classes(q: u64, n: u32) -> PyResult<Vec<Vec<usize>>> {
    classify_variants(q, n).map_err(err)
}

/// Zsigmondy primes Z_k(q, n).
#[pyfunction]
#[pyo3(signature = (q, n, k = 0))]
fn zsigmondy_primes(q: u64, n: u32, k: u64) -> PyResult<Vec<u64>> {
    zsigmondy::zsigmondy_primes(q, n, k).map_err(err)
}

/// Homogenized cyclotomic polynomial value Phi_n(alpha, beta).
#[pyfunction]
#[pyo3(signature = (n, alpha, beta = 1))]
fn cyclotomic_poly_value(n: u32, alpha: i128, beta: i128) -> PyResult<i128> {
    zsigmondy::cyclotomic_poly_value(n, alpha, beta).map_err(err)
}

/// A finite Dickson near-field.
#[pyclass(name = "NearField")]
struct PyNearField {
    inner: DicksonNearField,
}

#[pymethods]
impl PyNearField {
    #[new]
    #[pyo3(signature = (q, n, variant = 0))]
    fn new(q: u64, n: u32, variant: usize) -> PyResult<Self> {
        Ok(PyNearField {
            inner: DicksonNearField::new(q, n, variant).map_err(err)?,
        })
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    #[getter]
    fn variant(&self) -> usize {
        self.inner.variant
    }

    #[getter]
    fn is_field(&self) -> bool {
        self.inner.is_field()
    }

    /// y o x in the twisted multiplication.
    fn circ(&self, y: Elt, x: Elt) -> PyResult<Elt> {
        if y >= self.inner.order() || x >= self.inner.order() {
            return Err(PyValueError::new_err("element out of range"));
        }
        Ok(self.inner.circ(y, x))
    }

    fn circ_order(&self, x: Elt) -> PyResult<u64> {
        self.inner.circ_order(x).map_err(err)
    }

    /// Exhaustive near-field axiom check; True iff everything passes.
    fn verify_axioms(&self) -> PyResult<bool> {
        Ok(verify_nearfield_axioms(&self.inner).map_err(err)?.all_pass())
    }

    /// All multiplicative subgroups as sorted element lists, deterministic.
    fn subgroups(&self) -> PyResult<Vec<Vec<Elt>>> {
        let mg = self.inner.mult_group().map_err(err)?;
        Ok(mg
            .subgroups()
            .into_iter()
            .map(|s| s.iter().map(|&i| mg.elements[i]).collect())
            .collect())
    }

    /// Cyc(K, NF) for the subgroup at the given enumeration index.
    fn scheme(&self, subgroup: usize) -> PyResult<PyScheme> {
        let subs = self.subgroups()?;
        let k = subs
            .get(subgroup)
            .ok_or_else(|| PyValueError::new_err(format!("subgroup index out of range (have {})", subs.len())))?;
        Ok(PyScheme {
            inner: scheme::build_cyclotomic(&self.inner, k).map_err(err)?,
        })
    }

    /// Cyc(K, NF) for an explicit subgroup K.
    fn scheme_from(&self, k: Vec<Elt>) -> PyResult<PyScheme> {
        Ok(PyScheme {
            inner: scheme::build_cyclotomic(&self.inner, &k).map_err(err)?,
        })
    }

    fn mult_table_csv(&self) -> String {
        self.inner.mult_table_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "NearField(q={}, n={}, variant={})",
            self.inner.pair.q, self.inner.pair.n, self.inner.variant
        )
    }
}

/// A cyclotomic association scheme.
#[pyclass(name = "Scheme")]
struct PyScheme {
    inner: CyclotomicScheme,
}

#[pymethods]
impl PyScheme {
    #[getter]
    fn n(&self) -> usize {
        self.inner.scheme.n
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.scheme.rank
    }

    #[getter]
    fn valency(&self) -> u64 {
        self.inner.valency
    }

    #[getter]
    fn is_trivial(&self) -> bool {
        self.inner.scheme.is_trivial()
    }

    /// Row-major N x N relation indices; 0 is the diagonal class.
    #[getter]
    fn colors(&self) -> Vec<u16> {
        self.inner.scheme.colors.clone()
    }

    fn color(&self, x: usize, y: usize) -> PyResult<u16> {
        if x >= self.inner.scheme.n || y >= self.inner.scheme.n {
            return Err(PyValueError::new_err("point out of range"));
        }
        Ok(self.inner.scheme.color(x, y))
    }

    fn is_primitive(&self) -> bool {
        self.inner.scheme.is_primitive()
    }

    /// |Aut(C)|; None when it does not fit in 64 bits.
    fn aut_order(&self) -> PyResult<Option<u64>> {
        Ok(scheme::aut_group(&self.inner).map_err(err)?.order())
    }

    /// True iff the theorem-path group T.Gbar equals the brute-force
    /// color-automorphism group; None for trivial schemes.
    fn aut_matches_bruteforce(&self) -> PyResult<Option<bool>> {
        match scheme::aut_group(&self.inner).map_err(err)? {
            AutGroup::Symmetric(_) => Ok(None),
            AutGroup::Group(g) => {
                let oracle = scheme::aut_bruteforce(&self.inner.scheme).map_err(err)?;
                Ok(Some(g.same_group(&oracle)))
            }
        }
    }

    fn to_json(&self) -> String {
        self.inner.scheme.to_json(self.inner.valency)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scheme(n={}, rank={}, valency={})",
            self.inner.scheme.n, self.inner.scheme.rank, self.inner.valency
        )
    }
}

/// Isomorphism test via conjugacy of the linear closures.
#[pyfunction]
fn are_isomorphic(a: &PyScheme, b: &PyScheme) -> PyResult<bool> {
    Ok(scheme::are_isomorphic(&a.inner, &b.inner).map_err(err)?.0)
}

/// Run the census and return the JSON report as a string.
#[pyfunction]
#[pyo3(signature = (max_order, checks = None, cache_dir = None))]
fn run_census(
    max_order: u64,
    checks: Option<Vec<String>>,
    cache_dir: Option<PathBuf>,
) -> PyResult<String> {
    let mut opts = CensusOptions::new(max_order);
    if let Some(names) = checks {
        opts.checks = names
            .iter()
            .map(|s| s.parse::<Check>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
    }
    opts.cache_dir = cache_dir;
    Ok(census(&opts).map_err(err)?.to_json())
}

#[pymodule]
fn nearcyc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNearField>()?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(is_dickson_pair, m)?)?;
    m.add_function(wrap_pyfunction!(count_nearfields, m)?)?;
    m.add_function(wrap_pyfunction!(variant_classes, m)?)?;
    m.add_function(wrap_pyfunction!(zsigmondy_primes, m)?)?;
    m.add_function(wrap_pyfunction!(cyclotomic_poly_value, m)?)?;
    m.add_function(wrap_pyfunction!(are_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(run_census, m)?)?;
    Ok(())
}
