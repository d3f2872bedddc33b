//! Python bindings: parse structures and formulas, check, and generate reduction
//! instances. Errors surface as `ValueError`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use h2mc_core::formula::{self, classify_fragment, count_so_alternations};
use h2mc_core::kripke::{self, extract_traces, is_acyclic, is_tree_shaped, print_kripke, unroll_to_tree};
use h2mc_core::reductions::{self, Instance};
use h2mc_core::semantics::{check_with, CheckOptions};

fn err(e: h2mc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite Kripke structure.
#[pyclass(name = "Structure", module = "h2mc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Structure(kripke::KripkeStructure);

#[pymethods]
impl Structure {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        kripke::parse_kripke(text).map(Structure).map_err(err)
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.0.num_states()
    }

    #[getter]
    fn aps(&self) -> Vec<String> {
        self.0.aps().to_vec()
    }

    fn is_tree(&self) -> bool {
        is_tree_shaped(&self.0)
    }

    fn is_acyclic(&self) -> bool {
        is_acyclic(&self.0)
    }

    /// Traces in canonical order, rendered as words like `{a}{a,b}`.
    fn traces(&self) -> PyResult<Vec<String>> {
        let ts = extract_traces(&self.0).map_err(err)?;
        Ok((0..ts.len()).map(|i| ts.show(i)).collect())
    }

    fn unroll(&self) -> PyResult<Self> {
        unroll_to_tree(&self.0).map(Structure).map_err(err)
    }

    fn to_text(&self) -> String {
        print_kripke(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Structure(states={}, aps={:?})", self.0.num_states(), self.0.aps())
    }
}

/// A closed prenex formula.
#[pyclass(name = "Formula", module = "h2mc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Formula(formula::Formula);

#[pymethods]
impl Formula {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        formula::parse_formula(text).map(Formula).map_err(err)
    }

    /// One of `quantifier_free`, `fixpoint_fragment`, `sigma_k`, `pi_k`, `mixed`.
    fn fragment(&self) -> String {
        classify_fragment(&self.0).to_string()
    }

    fn so_alternations(&self) -> usize {
        count_so_alternations(&self.0)
    }

    fn dualize(&self) -> PyResult<Self> {
        formula::dualize(&self.0).map(Formula).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_pretty_string()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.0.to_string())
    }
}

#[pyclass(name = "CheckResult", module = "h2mc", frozen, get_all)]
struct CheckResult {
    verdict: bool,
    /// Fixpoint variable → trace indices (into `Structure.traces()`).
    witnesses: BTreeMap<String, Vec<usize>>,
    stats: BTreeMap<String, u64>,
}

#[pymethods]
impl CheckResult {
    fn __bool__(&self) -> bool {
        self.verdict
    }

    fn __repr__(&self) -> String {
        format!("CheckResult(verdict={}, witnesses={:?})", self.verdict, self.witnesses)
    }
}

/// Model-check `formula` on `structure`. `prune=False` evaluates the prefix
/// literally; `brute_force=True` solves fixpoints by enumerating minimal sets.
#[pyfunction]
#[pyo3(signature = (structure, formula, prune = true, brute_force = false))]
fn check(structure: &Structure, formula: &Formula, prune: bool, brute_force: bool) -> PyResult<CheckResult> {
    let mut opts = if brute_force {
        CheckOptions::brute_force()
    } else {
        CheckOptions::default()
    };
    opts.prune = prune;
    let r = check_with(&structure.0, &formula.0, &opts).map_err(err)?;
    let s = r.stats;
    Ok(CheckResult {
        verdict: r.verdict,
        witnesses: r
            .fixpoint_witnesses
            .iter()
            .map(|(x, a)| (x.to_string(), a.to_vec()))
            .collect(),
        stats: BTreeMap::from([
            ("subsets_enumerated".to_string(), s.subsets_enumerated),
            ("fixpoint_rounds".to_string(), s.fixpoint_rounds),
            ("body_evaluations".to_string(), s.body_evaluations),
            ("memo_hits".to_string(), s.memo_hits),
        ]),
    })
}

fn split(inst: Instance) -> (Structure, Formula, BTreeMap<String, String>) {
    let meta = inst.meta.into_iter().collect();
    (Structure(inst.structure), Formula(inst.formula), meta)
}

/// `(structure, formula, meta)` for a Horn input in the clause-per-line format.
#[pyfunction]
fn horn_instance(text: &str) -> PyResult<(Structure, Formula, BTreeMap<String, String>)> {
    let h = reductions::parse_horn(text).map_err(err)?;
    Ok(split(reductions::horn_to_instance(&h)))
}

/// `(structure, formula, meta)` for a QBF input (`a`/`e` prefix lines, then the matrix).
#[pyfunction]
fn qbf_instance(text: &str) -> PyResult<(Structure, Formula, BTreeMap<String, String>)> {
    let y = reductions::parse_qbf(text).map_err(err)?;
    reductions::qbf_to_instance(&y).map(split).map_err(err)
}

#[pyfunction]
fn horn_satisfiable(text: &str) -> PyResult<bool> {
    reductions::parse_horn(text)
        .map(|h| reductions::horn_oracle(&h))
        .map_err(err)
}

#[pyfunction]
fn qbf_valid(text: &str) -> PyResult<bool> {
    reductions::parse_qbf(text)
        .map(|y| reductions::qbf_oracle(&y))
        .map_err(err)
}

#[pymodule]
fn h2mc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Structure>()?;
    m.add_class::<Formula>()?;
    m.add_class::<CheckResult>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(horn_instance, m)?)?;
    m.add_function(wrap_pyfunction!(qbf_instance, m)?)?;
    m.add_function(wrap_pyfunction!(horn_satisfiable, m)?)?;
    m.add_function(wrap_pyfunction!(qbf_valid, m)?)?;
    Ok(())
}
