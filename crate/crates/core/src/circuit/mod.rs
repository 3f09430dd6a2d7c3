//! Circuits in Pauli form, observables, Clifford canonicalization and
//! parameterized circuit builders.

mod builders;
mod clifford;
mod graph;

use serde::{Deserialize, Serialize};

pub use builders::{
    build_hea_blocks, build_hea_brickwall, build_qaoa, build_random_local, build_random_nonlocal,
    hea_block_pairs, hea_mixed_circuit, light_cone_size, qaoa_mixed_circuit,
};
pub use clifford::{canonicalize, CliffordGate, CliffordOp, MixedCircuit, MixedOp, PauliForm};
pub use graph::{random_regular_graph, Graph};

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// Ordered Pauli rotation generators `P_1 … P_M`; `P_1` is applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliCircuit {
    n_qubits: usize,
    generators: Vec<PauliOperator>,
}

impl PauliCircuit {
    /// Builds a circuit, dropping identity generators.
    pub fn new(n_qubits: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("circuit needs at least one qubit"));
        }
        for g in &generators {
            if g.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    expected: n_qubits,
                    found: g.n_qubits(),
                });
            }
        }
        let generators = generators
            .into_iter()
            .filter(|g| !g.is_identity())
            .collect();
        Ok(PauliCircuit {
            n_qubits,
            generators,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of parameters `M`.
    pub fn n_params(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    /// Generator for 1-based parameter index `m`.
    pub fn generator(&self, m: usize) -> &PauliOperator {
        &self.generators[m - 1]
    }
}

/// Real linear combination of Pauli strings.
///
/// Signs are folded into the coefficients, so every stored Pauli has sign +1
/// and no two terms share a string.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<(f64, PauliOperator)>,
}

const MERGE_TOLERANCE: f64 = 1e-12;

impl Observable {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliOperator)>) -> Result<Self> {
        let mut merged: Vec<(f64, PauliOperator)> = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    expected: n_qubits,
                    found: p.n_qubits(),
                });
            }
            if !c.is_finite() {
                return Err(Error::invalid(format!("non-finite coefficient {c}")));
            }
            let c = c * p.sign() as f64;
            let key = p.unsigned();
            match merged.iter_mut().find(|(_, q)| *q == key) {
                Some(slot) => slot.0 += c,
                None => merged.push((c, key)),
            }
        }
        merged.retain(|(c, _)| c.abs() >= MERGE_TOLERANCE);
        Ok(Observable {
            n_qubits,
            terms: merged,
        })
    }

    pub fn from_pauli(p: PauliOperator) -> Self {
        let n = p.n_qubits();
        Observable::new(n, vec![(1.0, p)]).expect("single term is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliOperator)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The signed Pauli when this is a single term with coefficient ±1.
    pub fn as_single_pauli(&self) -> Option<PauliOperator> {
        match self.terms.as_slice() {
            [(c, p)] if *c == 1.0 => Some(p.clone()),
            [(c, p)] if *c == -1.0 => Some(p.negated()),
            _ => None,
        }
    }

    /// Applies `f` to every Pauli, keeping coefficients.
    pub fn map_paulis(&self, mut f: impl FnMut(&PauliOperator) -> PauliOperator) -> Self {
        let terms = self.terms.iter().map(|(c, p)| (*c, f(p))).collect();
        Observable::new(self.n_qubits, terms).expect("mapping preserves size")
    }
}

/// JSON circuit file: generators plus a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub generators: Vec<PauliOperator>,
    pub hamiltonian: Vec<HamiltonianTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub coeff: f64,
    pub pauli: String,
}

impl CircuitFile {
    pub fn new(circuit: &PauliCircuit, h: &Observable) -> Self {
        CircuitFile {
            n_qubits: circuit.n_qubits(),
            generators: circuit.generators().to_vec(),
            hamiltonian: h
                .terms()
                .iter()
                .map(|(c, p)| HamiltonianTerm {
                    coeff: *c,
                    pauli: p.letters(),
                })
                .collect(),
        }
    }

    pub fn into_parts(self) -> Result<(PauliCircuit, Observable)> {
        let circuit = PauliCircuit::new(self.n_qubits, self.generators)?;
        let mut terms = Vec::with_capacity(self.hamiltonian.len());
        for t in self.hamiltonian {
            terms.push((t.coeff, t.pauli.parse::<PauliOperator>()?));
        }
        let h = Observable::new(self.n_qubits, terms)?;
        Ok((circuit, h))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }
}
