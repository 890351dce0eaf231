//! Python bindings for the alternating-pushdown-system decision procedure.
//!
//! Exposes a `System` class wrapping parse/serialize, the transformation
//! pipeline, the decision procedure with certificates on both sides, and
//! the proof checker. Proofs cross the boundary as JSON strings in the
//! same format the CLI uses.
//!
//! ```python
//! import apds
//! s = apds.System.parse(open("e1.apds").read())
//! verdict = s.decide("S(a b)")
//! assert verdict.provable
//! assert s.check_proof(verdict.certificate) == []
//! ```

use std::collections::BTreeMap;
use std::sync::OnceLock;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use apds_core::atom::Atom;
use apds_core::certify::{RefuteError, Refuter};
use apds_core::decide::Decider;
use apds_core::normalize::to_small_step;
use apds_core::parse::{parse_atom, parse_system};
use apds_core::proof::{check_proof, eliminate_cuts, measure, ProofTree};
use apds_core::saturate::saturate;
use apds_core::system::SystemClass;

fn value_error(msg: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(msg.to_string())
}

fn parse_config(text: &str) -> PyResult<Atom> {
    let atom = parse_atom(text).map_err(value_error)?;
    if atom.is_open() {
        return Err(value_error(format!("configuration {atom} must be closed")));
    }
    Ok(atom)
}

fn parse_proof(text: &str) -> PyResult<ProofTree> {
    ProofTree::from_json(text).map_err(value_error)
}

/// Outcome of a decision: exactly one certificate side is populated.
#[pyclass(frozen)]
struct Verdict {
    #[pyo3(get)]
    provable: bool,
    /// Proof of the configuration in the original system (JSON), if provable.
    #[pyo3(get)]
    certificate: Option<String>,
    /// Proof of the negated configuration in the negated automaton (JSON),
    /// if unprovable and requested.
    #[pyo3(get)]
    refutation: Option<String>,
}

#[pymethods]
impl Verdict {
    fn __repr__(&self) -> String {
        format!("Verdict(provable={})", if self.provable { "True" } else { "False" })
    }
}

/// An alternating pushdown system: a named finite rule set over declared
/// state and stack alphabets.
///
/// The decision pipeline (normalization, saturation, complementation) is
/// built lazily on first use and shared across queries.
#[pyclass(frozen)]
struct System {
    inner: apds_core::system::System,
    decider: OnceLock<Result<Decider, String>>,
    refuter: OnceLock<Result<Refuter, String>>,
}

impl System {
    fn wrap(inner: apds_core::system::System) -> System {
        System { inner, decider: OnceLock::new(), refuter: OnceLock::new() }
    }

    fn decider(&self) -> PyResult<&Decider> {
        self.decider
            .get_or_init(|| Decider::new(&self.inner).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(value_error)
    }

    fn refuter(&self) -> PyResult<&Refuter> {
        self.refuter
            .get_or_init(|| Refuter::new(&self.inner).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(value_error)
    }
}

#[pymethods]
impl System {
    /// Parse a system from its textual format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<System> {
        parse_system(text).map(System::wrap).map_err(value_error)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    /// Computed class marker: "general", "small-step", "saturated",
    /// "multi-automaton", or "negation-extended".
    #[getter]
    fn system_class(&self) -> String {
        self.inner.class().to_string()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.states().iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn stack_symbols(&self) -> Vec<String> {
        self.inner.stack().iter().map(|s| s.to_string()).collect()
    }

    #[getter]
    fn rule_ids(&self) -> Vec<String> {
        self.inner.rules().iter().map(|r| r.id().to_string()).collect()
    }

    /// Canonical textual form (round-trips through `parse`).
    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// The equivalent small-step system and the fresh-state erasure map.
    fn normalize(&self) -> (System, BTreeMap<String, String>) {
        let (n, m) = to_small_step(&self.inner);
        let map = m
            .fresh_states()
            .map(|(fresh, orig, word)| (fresh.to_string(), format!("{orig}({word})")))
            .collect();
        (System::wrap(n), map)
    }

    /// Closure under the saturation rules (small-step input).
    fn saturate(&self) -> PyResult<System> {
        match self.inner.class() {
            SystemClass::SmallStep | SystemClass::Saturated | SystemClass::MultiAutomaton => {
                Ok(System::wrap(saturate(&self.inner)))
            }
            other => Err(value_error(format!("saturate expects a small-step system, got {other}"))),
        }
    }

    /// The multi-automaton deciding this system (normalized and saturated
    /// first if needed).
    fn multi_automaton(&self) -> PyResult<System> {
        Ok(System::wrap(self.decider()?.automaton().clone()))
    }

    /// Instantiates all neutral and elim conclusions (small-step input).
    fn tilde(&self) -> PyResult<System> {
        match self.inner.class() {
            SystemClass::SmallStep | SystemClass::Saturated | SystemClass::MultiAutomaton => {
                Ok(System::wrap(apds_core::complement::tilde(&self.inner)))
            }
            other => Err(value_error(format!("tilde expects a small-step system, got {other}"))),
        }
    }

    /// The negation extension of the (small-step form of this) system.
    fn negation_extension(&self) -> PyResult<System> {
        Ok(System::wrap(self.refuter()?.negation().system().clone()))
    }

    /// Decide provability of a closed configuration like `"S(a b)"`.
    ///
    /// The certificate is replayed into this system; the refutation (built
    /// when `want_refutation`) is a finite proof in the negated automaton.
    #[pyo3(signature = (config, want_refutation = true))]
    fn decide(&self, config: &str, want_refutation: bool) -> PyResult<Verdict> {
        let atom = parse_config(config)?;
        let verdict = self
            .decider()?
            .decide(&atom, want_refutation)
            .map_err(value_error)?;
        Ok(Verdict {
            provable: verdict.provable,
            certificate: verdict.certificate.map(|p| p.to_json()),
            refutation: verdict.refutation.map(|p| p.to_json()),
        })
    }

    /// Membership of a configuration (decided on the multi-automaton).
    fn member(&self, config: &str) -> PyResult<bool> {
        let atom = parse_config(config)?;
        self.decider()?.member(&atom).map_err(value_error)
    }

    /// The depth-bounded prefix (JSON) of the co-inductive counterexample
    /// proof of `!config` in the negation extension.
    #[pyo3(signature = (config, depth = 4))]
    fn refute(&self, config: &str, depth: usize) -> PyResult<String> {
        let atom = parse_config(config)?;
        match self.refuter()?.unfold(&atom, depth) {
            Ok(prefix) => Ok(prefix.to_json()),
            Err(RefuteError::Provable(a)) => {
                Err(value_error(format!("{a} is provable; there is nothing to refute")))
            }
            Err(e) => Err(value_error(e)),
        }
    }

    /// The expansion map behind `refute`, as JSON keyed by negated-automaton
    /// rule id.
    fn expansion_map(&self) -> PyResult<String> {
        Ok(self.refuter()?.expansion().to_json())
    }

    /// Check a proof (JSON) against this system; returns the list of
    /// issues, empty when the proof is valid.
    #[pyo3(signature = (proof, admit_hypotheses = false))]
    fn check_proof(&self, proof: &str, admit_hypotheses: bool) -> PyResult<Vec<String>> {
        let tree = parse_proof(proof)?;
        Ok(match check_proof(&self.inner, &tree, admit_hypotheses) {
            Ok(()) => Vec::new(),
            Err(issues) => issues.iter().map(|i| i.to_string()).collect(),
        })
    }

    /// Rewrite a proof over this (saturated) system into a cut-free one.
    /// Returns the normal form (JSON) and one description per reduction step.
    fn eliminate_cuts(&self, proof: &str) -> PyResult<(String, Vec<String>)> {
        match self.inner.class() {
            SystemClass::Saturated | SystemClass::MultiAutomaton => {}
            other => {
                return Err(value_error(format!(
                    "eliminate_cuts expects a saturated system, got {other}"
                )))
            }
        }
        let tree = parse_proof(proof)?;
        if let Err(issues) = check_proof(&self.inner, &tree, false) {
            return Err(value_error(format!("proof does not check: {}", issues[0])));
        }
        let (normal, steps) = eliminate_cuts(&self.inner, &tree).map_err(value_error)?;
        let rendered = steps
            .iter()
            .map(|s| {
                format!(
                    "{} cut at {:?} -> rule {}, measure {}",
                    s.shape, s.position, s.rule, s.measure_after
                )
            })
            .collect();
        Ok((normal.to_json(), rendered))
    }

    /// The (elim, neutral) node counts of a proof over this system.
    fn measure(&self, proof: &str) -> PyResult<(usize, usize)> {
        let tree = parse_proof(proof)?;
        let m = measure(&self.inner, &tree);
        Ok((m.0, m.1))
    }

    /// Bounded exhaustive proof search (testing aid): the proof as JSON,
    /// or None when none exists within the bounds.
    #[pyo3(signature = (config, depth = 8, word_bound = 6))]
    fn oracle_search(&self, config: &str, depth: usize, word_bound: usize) -> PyResult<Option<String>> {
        let atom = parse_config(config)?;
        Ok(apds_core::oracle::search(&self.inner, &atom, depth, word_bound).map(|p| p.to_json()))
    }

    fn __repr__(&self) -> String {
        format!(
            "System(name='{}', class='{}', rules={})",
            self.inner.name(),
            self.inner.class(),
            self.inner.rules().len()
        )
    }
}

/// Convenience alias for `System.parse`.
#[pyfunction]
fn parse(text: &str) -> PyResult<System> {
    System::parse(text)
}

#[pymodule]
fn apds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    Ok(())
}
