//! Which leaves of the expansion tree contribute, as a Boolean quadratic
//! system in the branch vector `k`.
//!
//! Leaf `k` carries `O(k) = P_1^{k_1} … P_M^{k_M} H` (up to phase). It exists
//! iff every chosen `P_i` anti-commutes with `P_{i+1}^{k_{i+1}} … H`, and has
//! nonzero expectation iff `Σ k_i (P_i)_X = H_X`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::PauliCircuit;
use crate::error::{Error, Result};
use crate::pauli::{BitVec, PauliOperator};
use crate::series::MonomialKey;

/// Branch vector: bit `i − 1` is `k_i`, set when `P_i` entered as a sine.
pub type BranchVector = BitVec;

/// Largest supported parameter count; branch vectors are packed in a `u64`.
pub const MAX_VARS: usize = 64;
/// Largest affine solution space walked exhaustively.
pub const MAX_AFFINE_DIM: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MqSystem {
    m_vars: usize,
    n_qubits: usize,
    /// `pair_rows[i]` bit `j` (`j > i`) is `⟨P_{i+1}, P_{j+1}⟩`.
    pair_rows: Vec<u64>,
    /// Bit `i` is `⟨P_{i+1}, H⟩`.
    h_row: u64,
    /// Row `q`: bit `i` is `(P_{i+1})_X` at qubit `q`.
    x_rows: Vec<u64>,
    /// Bit `q` of `H_X`.
    x_target: Vec<bool>,
}

impl MqSystem {
    pub fn new(circuit: &PauliCircuit, h: &PauliOperator) -> Result<Self> {
        if h.n_qubits() != circuit.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: circuit.n_qubits(),
                found: h.n_qubits(),
            });
        }
        let m = circuit.n_params();
        if m > MAX_VARS {
            return Err(Error::guard(format!(
                "MQ system limited to {MAX_VARS} variables, got {m}"
            )));
        }
        let gens = circuit.generators();
        let mut pair_rows = vec![0u64; m];
        let mut h_row = 0u64;
        for i in 0..m {
            for j in i + 1..m {
                if !gens[i].commutes_unchecked(&gens[j]) {
                    pair_rows[i] |= 1 << j;
                }
            }
            if !gens[i].commutes_unchecked(h) {
                h_row |= 1 << i;
            }
        }
        let n = circuit.n_qubits();
        let x_rows = (0..n)
            .map(|q| {
                gens.iter()
                    .enumerate()
                    .filter(|(_, g)| g.x_bits().get(q))
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        let x_target = (0..n).map(|q| h.x_bits().get(q)).collect();
        Ok(MqSystem {
            m_vars: m,
            n_qubits: n,
            pair_rows,
            h_row,
            x_rows,
            x_target,
        })
    }

    pub fn m_vars(&self) -> usize {
        self.m_vars
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `⟨P_i, P_j⟩` for 1-based `i ≠ j`.
    pub fn anticommutes(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j) - 1, i.max(j) - 1);
        self.pair_rows[a] >> b & 1 == 1
    }

    /// `⟨P_i, H⟩` for 1-based `i`.
    pub fn anticommutes_with_h(&self, i: usize) -> bool {
        self.h_row >> (i - 1) & 1 == 1
    }

    fn pack(&self, k: &BranchVector) -> Result<u64> {
        k.check_len(self.m_vars)?;
        Ok(k.words().first().copied().unwrap_or(0))
    }

    fn quadratic_ok(&self, k: u64) -> bool {
        (0..self.m_vars).all(|i| {
            if k >> i & 1 == 0 {
                return true;
            }
            let parity = ((self.pair_rows[i] & k).count_ones() + (self.h_row >> i & 1) as u32) & 1;
            parity == 1
        })
    }

    fn linear_ok(&self, k: u64) -> bool {
        self.x_rows
            .iter()
            .zip(&self.x_target)
            .all(|(row, &t)| ((row & k).count_ones() & 1 == 1) == t)
    }

    /// Branch-consistency rows `k_i (1 + ⟨P_i,H⟩ + Σ_{j>i} k_j ⟨P_i,P_j⟩) = 0`.
    pub fn satisfies_quadratic(&self, k: &BranchVector) -> Result<bool> {
        Ok(self.quadratic_ok(self.pack(k)?))
    }

    /// X rows `Σ_i k_i (P_i)_X = H_X`.
    pub fn satisfies_linear(&self, k: &BranchVector) -> Result<bool> {
        Ok(self.linear_ok(self.pack(k)?))
    }

    pub fn satisfies(&self, k: &BranchVector) -> Result<bool> {
        let k = self.pack(k)?;
        Ok(self.linear_ok(k) && self.quadratic_ok(k))
    }

    /// Particular solution and null-space basis of the X rows, or `None`
    /// when they are inconsistent.
    fn solve_linear(&self) -> Option<(u64, Vec<u64>)> {
        let mut rows: Vec<(u64, bool)> = self
            .x_rows
            .iter()
            .copied()
            .zip(self.x_target.iter().copied())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.m_vars {
            let bit = 1u64 << col;
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0 & bit != 0) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0 & bit != 0 {
                    row.0 ^= pivot.0;
                    row.1 ^= pivot.1;
                }
            }
            pivots.push(col);
            r += 1;
        }
        if rows[r..].iter().any(|&(_, t)| t) {
            return None;
        }
        let mut particular = 0u64;
        for (row, &col) in rows.iter().zip(&pivots) {
            if row.1 {
                particular |= 1 << col;
            }
        }
        let free: Vec<usize> = (0..self.m_vars).filter(|c| !pivots.contains(c)).collect();
        let null = free
            .iter()
            .map(|&f| {
                let mut v = 1u64 << f;
                for (row, &col) in rows.iter().zip(&pivots) {
                    if row.0 >> f & 1 == 1 {
                        v |= 1 << col;
                    }
                }
                v
            })
            .collect();
        Some((particular, null))
    }

    /// Rank of the X rows.
    pub fn linear_rank(&self) -> usize {
        let mut basis: Vec<u64> = Vec::new();
        for &row in &self.x_rows {
            let mut v = row;
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len()
    }

    /// Plain-text algebraic normal form, one polynomial `= 0` per line, in
    /// variables `k1 … kM`.
    pub fn to_anf(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "# variables k1..k{}; each line is a polynomial equal to 0 over GF(2)",
            self.m_vars
        )
        .unwrap();
        for i in 0..self.m_vars {
            let mut monomials = Vec::new();
            if self.h_row >> i & 1 == 0 {
                monomials.push(format!("k{}", i + 1));
            }
            for j in i + 1..self.m_vars {
                if self.pair_rows[i] >> j & 1 == 1 {
                    monomials.push(format!("k{}*k{}", i + 1, j + 1));
                }
            }
            if !monomials.is_empty() {
                writeln!(out, "{}", monomials.join(" + ")).unwrap();
            }
        }
        for (row, &t) in self.x_rows.iter().zip(&self.x_target) {
            let mut monomials: Vec<String> = (0..self.m_vars)
                .filter(|i| row >> i & 1 == 1)
                .map(|i| format!("k{}", i + 1))
                .collect();
            if t {
                monomials.push("1".into());
            }
            if !monomials.is_empty() {
                writeln!(out, "{}", monomials.join(" + ")).unwrap();
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MqSolutions {
    /// Sorted ascending by `(k_M, …, k_1)` read as a binary number.
    pub solutions: Vec<BranchVector>,
    /// True when more than `cap` solutions exist; `solutions` then holds the
    /// first `cap` in walk order, sorted.
    pub overflow: bool,
    pub affine_dim: usize,
}

/// All branch vectors satisfying the system: the affine solution space of the
/// X rows is walked in Gray-code order and filtered by the quadratic rows.
pub fn enumerate_solutions(sys: &MqSystem, cap: usize) -> Result<MqSolutions> {
    let Some((particular, null)) = sys.solve_linear() else {
        return Ok(MqSolutions {
            solutions: Vec::new(),
            overflow: false,
            affine_dim: 0,
        });
    };
    let dim = null.len();
    if dim > MAX_AFFINE_DIM {
        return Err(Error::guard(format!(
            "affine solution space of dimension {dim} exceeds the limit {MAX_AFFINE_DIM}"
        )));
    }
    let mut found = Vec::new();
    let mut overflow = false;
    let mut k = particular;
    for step in 0u64..1 << dim {
        if step > 0 {
            k ^= null[step.trailing_zeros() as usize];
        }
        if sys.quadratic_ok(k) {
            if found.len() == cap {
                overflow = true;
                break;
            }
            found.push(k);
        }
    }
    found.sort_unstable();
    Ok(MqSolutions {
        solutions: found
            .into_iter()
            .map(|k| BitVec::from_u64(sys.m_vars, k))
            .collect(),
        overflow,
        affine_dim: dim,
    })
}

/// `k_i = 1` iff parameter `i` carries a sine in `key`.
pub fn leaf_branch_vector(key: &MonomialKey, circuit: &PauliCircuit) -> Result<BranchVector> {
    let m = circuit.n_params();
    if key.max_index() > m {
        return Err(Error::invalid(format!(
            "monomial references parameter {} of a {m}-parameter circuit",
            key.max_index()
        )));
    }
    let mut k = BitVec::zeros(m);
    for i in key.sine_indices() {
        k.set(i - 1, true);
    }
    Ok(k)
}

/// JSON form of [`MqSolutions`]: bit strings list `k_1` first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionsFile {
    pub n_params: usize,
    pub count: usize,
    pub overflow: bool,
    pub solutions: Vec<String>,
}

impl SolutionsFile {
    pub fn new(n_params: usize, s: &MqSolutions) -> Self {
        SolutionsFile {
            n_params,
            count: s.solutions.len(),
            overflow: s.overflow,
            solutions: s.solutions.iter().map(|k| k.to_string()).collect(),
        }
    }
}
