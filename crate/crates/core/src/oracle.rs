//! Dense statevector reference for small circuits.
//!
//! Basis index bit `q` is qubit `q`. Everything here is exponential in the
//! qubit count or the parameter count and guarded accordingly.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{CliffordGate, MixedCircuit, MixedOp, Observable, PauliCircuit};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::series::{Factor, FourierSeries, MonomialKey};

pub const MAX_QUBITS: usize = 14;
pub const DEFAULT_MAX_GRID_PARAMS: usize = 9;
const NORM_DRIFT: f64 = 1e-9;
const EXTRACT_DROP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// `(z mask, x mask, phase)` with `P|b⟩ = phase·(−1)^{|z & (b⊕x)|} |b⊕x⟩`.
fn pauli_action(p: &PauliOperator) -> (usize, usize, Complex64) {
    let z = p.z_bits().words()[0] as usize;
    let x = p.x_bits().words()[0] as usize;
    let minus_i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    let phase = minus_i_pow[(z & x).count_ones() as usize % 4] * p.sign() as f64;
    (z, x, phase)
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("state needs at least one qubit"));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::guard(format!(
                "statevector limited to {MAX_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: n,
            });
        }
        Ok(())
    }

    /// `exp(-i φ/2 P)`: `cos(φ/2) ψ − i sin(φ/2) P ψ`.
    pub fn apply_rotation(&mut self, p: &PauliOperator, phi: f64) -> Result<()> {
        self.check_width(p.n_qubits())?;
        let (z, x, phase) = pauli_action(p);
        let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
        let coeff = Complex64::new(0.0, -s) * phase;
        let mut out: Vec<Complex64> = self.amplitudes.iter().map(|a| a * c).collect();
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let target = b ^ x;
            let sign = if (z & target).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            out[target] += coeff * amp * sign;
        }
        self.amplitudes = out;
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: CliffordGate) -> Result<()> {
        let qs = gate.qubits();
        if qs.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!("{gate:?} out of range")));
        }
        let amps = &mut self.amplitudes;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match gate {
            CliffordGate::H(q) => {
                let bit = 1 << q;
                for b in 0..amps.len() {
                    if b & bit == 0 {
                        let (a0, a1) = (amps[b], amps[b | bit]);
                        amps[b] = (a0 + a1) * r;
                        amps[b | bit] = (a0 - a1) * r;
                    }
                }
            }
            CliffordGate::S(q) | CliffordGate::Sdg(q) => {
                let ph = if matches!(gate, CliffordGate::S(_)) {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
                for (b, a) in amps.iter_mut().enumerate() {
                    if b >> q & 1 == 1 {
                        *a *= ph;
                    }
                }
            }
            CliffordGate::Cnot { control, target } => {
                for b in 0..amps.len() {
                    if b >> control & 1 == 1 && b >> target & 1 == 0 {
                        amps.swap(b, b | 1 << target);
                    }
                }
            }
            CliffordGate::Cz(a, c) => {
                for (b, amp) in amps.iter_mut().enumerate() {
                    if b >> a & 1 == 1 && b >> c & 1 == 1 {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn pauli_expectation(&self, p: &PauliOperator) -> Result<f64> {
        self.check_width(p.n_qubits())?;
        let (z, x, phase) = pauli_action(p);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let target = b ^ x;
            let sign = if (z & target).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            acc += self.amplitudes[target].conj() * amp * sign;
        }
        Ok((acc * phase).re)
    }

    pub fn expectation(&self, h: &Observable) -> Result<f64> {
        h.terms()
            .iter()
            .map(|(c, p)| Ok(c * self.pauli_expectation(p)?))
            .sum()
    }

    fn check_norm(&self) -> Result<()> {
        let drift = (self.norm_sq() - 1.0).abs();
        if drift > NORM_DRIFT {
            return Err(Error::NumericalDrift(format!(
                "state norm drifted by {drift:e}"
            )));
        }
        Ok(())
    }
}

fn check_params(expected: usize, phi: &[f64]) -> Result<()> {
    if phi.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: phi.len(),
        });
    }
    Ok(())
}

/// `⟨0|U†(φ) H U(φ)|0⟩` with `P_1` applied first.
pub fn simulate_loss(circuit: &PauliCircuit, h: &Observable, phi: &[f64]) -> Result<f64> {
    check_params(circuit.n_params(), phi)?;
    let mut psi = StateVector::zero(circuit.n_qubits())?;
    for (g, &angle) in circuit.generators().iter().zip(phi) {
        psi.apply_rotation(g, angle)?;
    }
    psi.check_norm()?;
    psi.expectation(h)
}

/// Loss of a mixed Clifford/rotation circuit, simulated gate by gate.
pub fn simulate_mixed_loss(mc: &MixedCircuit, h: &Observable, phi: &[f64]) -> Result<f64> {
    check_params(mc.n_params(), phi)?;
    let mut psi = StateVector::zero(mc.n_qubits())?;
    let mut angles = phi.iter();
    for op in mc.ops() {
        match op {
            MixedOp::Clifford(g) => psi.apply_gate(*g)?,
            MixedOp::Rotation(p) => psi.apply_rotation(p, *angles.next().expect("counted"))?,
        }
    }
    psi.check_norm()?;
    psi.expectation(h)
}

/// Exact Fourier coefficients from the loss on the grid `{0, 2π/3, 4π/3}^M`.
///
/// On three equispaced points, `{1, cos, sin}` are orthogonal, so
/// `A = ⅓ Σ f_j`, `B = ⅔ Σ f_j cos θ_j`, `C = ⅔ Σ f_j sin θ_j` recover
/// `A + B cos θ + C sin θ` exactly; applying this along every axis inverts
/// the full tensor grid.
pub fn extract_coefficients(
    circuit: &PauliCircuit,
    h: &Observable,
    max_params: usize,
) -> Result<FourierSeries> {
    let m = circuit.n_params();
    if m > max_params {
        return Err(Error::guard(format!(
            "coefficient extraction needs 3^{m} evaluations; limit is {max_params} parameters"
        )));
    }
    if circuit.n_qubits() > MAX_QUBITS {
        return Err(Error::guard(format!(
            "statevector limited to {MAX_QUBITS} qubits, got {}",
            circuit.n_qubits()
        )));
    }
    let total = 3usize.pow(m as u32);
    let theta = |j: usize| 2.0 * PI * j as f64 / 3.0;
    // index digit k (base 3, least significant first) is the grid point of parameter k + 1
    let mut values = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut r = idx;
            let phi: Vec<f64> = (0..m)
                .map(|_| {
                    let t = theta(r % 3);
                    r /= 3;
                    t
                })
                .collect();
            simulate_loss(circuit, h, &phi)
        })
        .collect::<Result<Vec<f64>>>()?;
    let basis = |a: usize, j: usize| match a {
        0 => 1.0 / 3.0,
        1 => 2.0 / 3.0 * theta(j).cos(),
        _ => 2.0 / 3.0 * theta(j).sin(),
    };
    let mut stride = 1;
    for _ in 0..m {
        let mut next = vec![0.0; total];
        for base in 0..total {
            if (base / stride) % 3 != 0 {
                continue;
            }
            for a in 0..3 {
                next[base + a * stride] = (0..3)
                    .map(|j| basis(a, j) * values[base + j * stride])
                    .sum();
            }
        }
        values = next;
        stride *= 3;
    }
    let mut series = FourierSeries::new(m);
    for (idx, &c) in values.iter().enumerate() {
        if c.abs() < EXTRACT_DROP {
            continue;
        }
        let mut r = idx;
        let mut entries = Vec::new();
        for k in 1..=m {
            match r % 3 {
                1 => entries.push((k, Factor::Cos)),
                2 => entries.push((k, Factor::Sin)),
                _ => {}
            }
            r /= 3;
        }
        series.add_term(MonomialKey::from_sorted(entries), c)?;
    }
    Ok(series)
}

/// `3^M`, the number of coefficients of a generic loss with `M` parameters.
pub fn count_generic_coefficients(m: u32) -> BigUint {
    BigUint::from(3u32).pow(m)
}

/// Monte-Carlo `⟨|F − S|²⟩` over uniform angles, with `F` simulated; returns
/// `(mean, standard error)`.
pub fn sampled_residual(
    circuit: &PauliCircuit,
    h: &Observable,
    series: &FourierSeries,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::invalid(
            "sampled residual needs at least two samples",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            (0..circuit.n_params())
                .map(|_| rng.gen_range(0.0..2.0 * PI))
                .collect()
        })
        .collect();
    let sq = points
        .par_iter()
        .map(|phi| Ok((simulate_loss(circuit, h, phi)? - series.evaluate(phi)?).powi(2)))
        .collect::<Result<Vec<f64>>>()?;
    let mean = sq.iter().sum::<f64>() / samples as f64;
    let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok((mean, (var / samples as f64).sqrt()))
}
