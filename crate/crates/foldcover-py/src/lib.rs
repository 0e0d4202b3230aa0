//! Python bindings for the foldcover library.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use foldcover::completion::{regular_complete, CompletionOptions};
use foldcover::cover_model::{to_perm_rep, verify_certificate, CoverCertificate};
use foldcover::pipeline::{build_family, uniform_degree, BuildOptions, CoverFamily, CoverSpec, PipelineError};
use foldcover::slopes::{cusp_cover_index, slope_intersection, Slope, SlopeSystem};
use foldcover::{Alphabet, LabeledGraph, Word};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pipeline_err(e: PipelineError) -> PyErr {
    match e {
        PipelineError::GadgetContract(_) | PipelineError::Completion(_) => PyRuntimeError::new_err(e.to_string()),
        other => value_err(other),
    }
}

#[pyclass(name = "Alphabet", module = "foldcover", skip_from_py_object)]
#[derive(Clone)]
struct PyAlphabet(Alphabet);

#[pymethods]
impl PyAlphabet {
    #[staticmethod]
    fn surface(genus: usize, boundary_count: usize) -> PyResult<Self> {
        Alphabet::surface(genus, boundary_count).map(PyAlphabet).map_err(value_err)
    }

    #[staticmethod]
    fn free(names: Vec<String>) -> PyResult<Self> {
        Alphabet::free(names).map(PyAlphabet).map_err(value_err)
    }

    fn names(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    /// Parses and reduces; returns the reduced word rendered back.
    fn reduce(&self, text: &str) -> PyResult<String> {
        let w = self.0.parse_word(text).map_err(value_err)?;
        Ok(self.0.render(&w))
    }

    fn word_length(&self, text: &str) -> PyResult<usize> {
        Ok(self.0.parse_word(text).map_err(value_err)?.len())
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }
}

#[pyclass(name = "Graph", module = "foldcover", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph(LabeledGraph);

impl PyGraph {
    fn word(&self, text: &str) -> PyResult<Word> {
        self.0.alphabet().parse_word(text).map_err(value_err)
    }
}

#[pymethods]
impl PyGraph {
    /// Single base vertex over `alphabet`.
    #[new]
    fn new(alphabet: &PyAlphabet) -> Self {
        PyGraph(LabeledGraph::new(alphabet.0.clone()))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        LabeledGraph::parse_text(text).map(PyGraph).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn to_dot(&self) -> String {
        self.0.to_dot()
    }

    fn add_loop(&self, word: &str) -> PyResult<Self> {
        Ok(PyGraph(self.0.add_loop(&self.word(word)?)))
    }

    /// Returns the new graph and the path's end vertex.
    fn add_path(&self, word: &str) -> PyResult<(Self, usize)> {
        let (g, end) = self.0.add_path(&self.word(word)?).map_err(value_err)?;
        Ok((PyGraph(g), end))
    }

    /// Returns the folded graph and the old-to-new vertex map.
    fn fold(&self) -> (Self, Vec<usize>) {
        let (g, map) = self.0.fold();
        (PyGraph(g), map)
    }

    fn is_member(&self, word: &str) -> PyResult<bool> {
        let w = self.word(word)?;
        if !self.0.is_folded() {
            return Err(value_err("graph is not folded"));
        }
        Ok(self.0.is_member(&w))
    }

    fn accepts_unfolded(&self, word: &str) -> PyResult<bool> {
        Ok(self.0.accepts_unfolded(&self.word(word)?))
    }

    fn is_folded(&self) -> bool {
        self.0.is_folded()
    }

    fn is_regular(&self) -> bool {
        self.0.is_regular()
    }

    /// Cycle lengths of the word's permutation; the graph must be regular.
    fn cycle_type(&self, word: &str) -> PyResult<Vec<usize>> {
        let rep = to_perm_rep(&self.0).map_err(value_err)?;
        Ok(rep.cycle_type(&self.word(word)?))
    }

    /// Regular completion in which each listed word acts as one full cycle.
    #[pyo3(signature = (peripheral, seed = 0))]
    fn complete(&self, peripheral: Vec<String>, seed: u64) -> PyResult<Self> {
        let words = peripheral.iter().map(|s| self.word(s)).collect::<PyResult<Vec<_>>>()?;
        let opts = CompletionOptions { seed, ..CompletionOptions::default() };
        let c = regular_complete(&self.0, &words, &opts).map_err(value_err)?;
        Ok(PyGraph(c.graph))
    }

    fn canonical_form(&self) -> Vec<u8> {
        self.0.canonical_form()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edges().len()
    }

    #[getter]
    fn base(&self) -> usize {
        self.0.base()
    }

    fn __repr__(&self) -> String {
        format!("Graph(m={}, edges={})", self.0.vertex_count(), self.0.edges().len())
    }
}

#[pyclass(name = "CoverSpec", module = "foldcover", skip_from_py_object)]
#[derive(Clone)]
struct PySpec(CoverSpec);

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoverSpec::from_json(text).map(PySpec).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn case(&self) -> &'static str {
        self.0.case().tag()
    }

    #[getter]
    fn d_i(&self) -> u64 {
        self.0.d_i()
    }

    fn alphabet(&self) -> PyAlphabet {
        PyAlphabet(self.0.pres.alphabet().clone())
    }
}

#[pyclass(name = "Certificate", module = "foldcover", skip_from_py_object)]
struct PyCertificate(CoverCertificate);

#[pymethods]
impl PyCertificate {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    /// Check name -> pass flag.
    fn checks(&self) -> BTreeMap<String, bool> {
        self.0.checks.iter().map(|c| (c.name.to_string(), c.pass)).collect()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }
}

#[pyclass(name = "CoverFamily", module = "foldcover", skip_from_py_object)]
#[derive(Clone)]
struct PyFamily(CoverFamily);

#[pymethods]
impl PyFamily {
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn n_min(&self) -> u64 {
        self.0.n_min
    }

    #[getter]
    fn m_star(&self) -> u64 {
        self.0.m_star
    }

    #[getter]
    fn d_i(&self) -> u64 {
        self.0.d_i
    }

    #[getter]
    fn case(&self) -> &'static str {
        self.0.case.tag()
    }

    fn instantiate(&self, nstar: u64) -> PyResult<PyGraph> {
        self.0.instantiate(nstar).map(PyGraph).map_err(pipeline_err)
    }
}

#[pyfunction]
#[pyo3(signature = (spec, seed = 0))]
fn build(py: Python<'_>, spec: &PySpec, seed: u64) -> PyResult<PyFamily> {
    let mut opts = BuildOptions::default();
    opts.completion.seed = seed;
    let s = spec.0.clone();
    py.detach(move || build_family(&s, &opts)).map(PyFamily).map_err(pipeline_err)
}

#[pyfunction]
fn verify(graph: &PyGraph, spec: &PySpec, nstar: u64) -> PyCertificate {
    PyCertificate(verify_certificate(&graph.0, &spec.0, nstar))
}

#[pyfunction]
fn uniform(families: Vec<PyRef<'_, PyFamily>>, nstar: u64) -> PyResult<Vec<PyGraph>> {
    let fams: Vec<CoverFamily> = families.iter().map(|f| f.0.clone()).collect();
    let out = uniform_degree(&fams, nstar).map_err(pipeline_err)?;
    Ok(out.into_iter().map(PyGraph).collect())
}

#[pyfunction]
#[pyo3(name = "slope_intersection")]
fn py_slope_intersection(s1: (i64, i64), s2: (i64, i64)) -> PyResult<u64> {
    let a = Slope::new(s1.0, s1.1).map_err(value_err)?;
    let b = Slope::new(s2.0, s2.1).map_err(value_err)?;
    Ok(slope_intersection(a, b))
}

#[pyfunction]
#[pyo3(name = "cusp_cover_index")]
fn py_cusp_cover_index(m1: u64, m2: u64, s1: (i64, i64), s2: (i64, i64)) -> PyResult<u64> {
    let a = Slope::new(s1.0, s1.1).map_err(value_err)?;
    let b = Slope::new(s2.0, s2.1).map_err(value_err)?;
    cusp_cover_index(m1, m2, a, b).map_err(value_err)
}

/// `d_ik` per torus for surface `i` and their lcm, from the slope-file text.
#[pyfunction]
fn slope_d(text: &str, i: usize) -> PyResult<(Vec<u64>, u64)> {
    let sys = SlopeSystem::parse(text).map_err(value_err)?;
    Ok((sys.d_list(i).map_err(value_err)?, sys.d_i(i).map_err(value_err)?))
}

#[pymodule]
#[pyo3(name = "foldcover")]
fn foldcover_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlphabet>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PySpec>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(uniform, m)?)?;
    m.add_function(wrap_pyfunction!(py_slope_intersection, m)?)?;
    m.add_function(wrap_pyfunction!(py_cusp_cover_index, m)?)?;
    m.add_function(wrap_pyfunction!(slope_d, m)?)?;
    Ok(())
}
