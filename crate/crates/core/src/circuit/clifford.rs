use super::{Observable, PauliCircuit};
use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, PhasedPauli};

/// Elementary Clifford gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::Sdg(q) => vec![q],
            CliffordGate::Cnot { control, target } => vec![control, target],
            CliffordGate::Cz(a, b) => vec![a, b],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.iter().any(|&q| q >= n) {
            return Err(Error::invalid(format!(
                "{self:?} out of range for {n} qubits"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::invalid(format!("{self:?} acts twice on one qubit")));
        }
        Ok(())
    }

    /// `C† Z_q C` (`x = false`) or `C† X_q C` (`x = true`) for a qubit the gate touches.
    fn image(&self, n: usize, q: usize, x: bool) -> PauliOperator {
        let one = |q: usize, c: char| PauliOperator::single(n, q, c).expect("in range");
        let two = |a: usize, ca: char, b: usize, cb: char| {
            let mut s: Vec<char> = vec!['I'; n];
            s[a] = ca;
            s[b] = cb;
            PauliOperator::parse(&s.into_iter().collect::<String>(), None).expect("valid")
        };
        match (*self, x) {
            (CliffordGate::H(_), false) => one(q, 'X'),
            (CliffordGate::H(_), true) => one(q, 'Z'),
            (CliffordGate::S(_) | CliffordGate::Sdg(_), false) => one(q, 'Z'),
            (CliffordGate::S(_), true) => one(q, 'Y').negated(),
            (CliffordGate::Sdg(_), true) => one(q, 'Y'),
            (CliffordGate::Cnot { control, target }, false) => {
                if q == target {
                    two(control, 'Z', target, 'Z')
                } else {
                    one(q, 'Z')
                }
            }
            (CliffordGate::Cnot { control, target }, true) => {
                if q == control {
                    two(control, 'X', target, 'X')
                } else {
                    one(q, 'X')
                }
            }
            (CliffordGate::Cz(..), false) => one(q, 'Z'),
            (CliffordGate::Cz(a, b), true) => {
                let other = if q == a { b } else { a };
                two(q, 'X', other, 'Z')
            }
        }
    }
}

/// Clifford unitary `C` stored as its conjugation tableau `P ↦ C† P C`.
///
/// `images[q]` is the image of `Z_q` and `images[n + q]` the image of `X_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordOp {
    n: usize,
    images: Vec<PauliOperator>,
}

impl CliffordOp {
    pub fn identity(n: usize) -> Self {
        let mut images = Vec::with_capacity(2 * n);
        for c in ['Z', 'X'] {
            for q in 0..n {
                images.push(PauliOperator::single(n, q, c).expect("in range"));
            }
        }
        CliffordOp { n, images }
    }

    pub fn from_gate(n: usize, gate: CliffordGate) -> Result<Self> {
        let mut op = CliffordOp::identity(n);
        op.then_gate(gate)?;
        Ok(op)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn z_image(&self, q: usize) -> &PauliOperator {
        &self.images[q]
    }

    pub fn x_image(&self, q: usize) -> &PauliOperator {
        &self.images[self.n + q]
    }

    /// `C† P C`.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator> {
        if p.n_qubits() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: p.n_qubits(),
            });
        }
        let w = p.z_bits().and_count(p.x_bits()) as i64;
        let mut acc = PhasedPauli::identity(self.n);
        acc.phase = (2 * p.is_negative() as i64 - w).rem_euclid(4) as u8;
        for q in p.z_bits().iter_ones() {
            acc.mul_assign(&self.images[q].to_phased());
        }
        for q in p.x_bits().iter_ones() {
            acc.mul_assign(&self.images[self.n + q].to_phased());
        }
        Ok(acc
            .into_hermitian()
            .expect("Clifford image of a Hermitian Pauli is Hermitian"))
    }

    /// Appends `gate` after this Clifford in time: `C ← G·C`.
    pub fn then_gate(&mut self, gate: CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        // (GC)† P (GC) = C† (G† P G) C
        let mut updates = Vec::new();
        for q in gate.qubits() {
            for (x, slot) in [(false, q), (true, self.n + q)] {
                let img = gate.image(self.n, q, x);
                updates.push((slot, self.conjugate(&img)?));
            }
        }
        for (slot, img) in updates {
            self.images[slot] = img;
        }
        Ok(())
    }

    /// Appends another Clifford after this one in time.
    pub fn then(&self, later: &CliffordOp) -> Result<CliffordOp> {
        if later.n != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: later.n,
            });
        }
        let images = later
            .images
            .iter()
            .map(|img| self.conjugate(img))
            .collect::<Result<Vec<_>>>()?;
        Ok(CliffordOp { n: self.n, images })
    }

    /// Images of `Z_q`, `X_q` anti-commute pairwise per qubit and all other pairs commute.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let should_anti = i != j && i % n == j % n;
                let anti = !self.images[i].commutes_unchecked(&self.images[j]);
                if anti != should_anti {
                    return false;
                }
            }
        }
        true
    }
}

/// A gate of a circuit with both constant Clifford gates and Pauli rotations.
#[derive(Clone, Debug, PartialEq)]
pub enum MixedOp {
    Clifford(CliffordGate),
    /// `exp(-i φ/2 P)` with its own parameter.
    Rotation(PauliOperator),
}

/// Time-ordered circuit of Clifford gates and Pauli rotations.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedCircuit {
    n_qubits: usize,
    ops: Vec<MixedOp>,
}

/// Pauli form of a mixed circuit: rotations plus the accumulated Clifford
/// that still has to be absorbed into the observable.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliForm {
    pub circuit: PauliCircuit,
    pub frame: CliffordOp,
}

impl PauliForm {
    /// `H ↦ C† H C` for the accumulated Clifford `C`.
    pub fn observable(&self, h: &Observable) -> Result<Observable> {
        if h.n_qubits() != self.frame.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: self.frame.n_qubits(),
                found: h.n_qubits(),
            });
        }
        Ok(h.map_paulis(|p| self.frame.conjugate(p).expect("sizes checked")))
    }
}

impl MixedCircuit {
    pub fn new(n_qubits: usize) -> Self {
        MixedCircuit {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[MixedOp] {
        &self.ops
    }

    pub fn push_gate(&mut self, gate: CliffordGate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.ops.push(MixedOp::Clifford(gate));
        Ok(self)
    }

    /// Appends a rotation; an identity generator is only a global phase and is
    /// dropped, as in [`PauliCircuit::new`].
    pub fn push_rotation(&mut self, generator: PauliOperator) -> Result<&mut Self> {
        if generator.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: generator.n_qubits(),
            });
        }
        if !generator.is_identity() {
            self.ops.push(MixedOp::Rotation(generator));
        }
        Ok(self)
    }

    /// Number of rotation parameters.
    pub fn n_params(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, MixedOp::Rotation(_)))
            .count()
    }

    /// Moves every Clifford gate past the later rotations.
    ///
    /// With `D` the Clifford accumulated so far, `R(P) D = D R(D† P D)`, so each
    /// rotation generator is conjugated by the Cliffords that precede it in time.
    pub fn to_pauli_form(&self) -> Result<PauliForm> {
        let mut frame = CliffordOp::identity(self.n_qubits);
        let mut generators = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            match op {
                MixedOp::Clifford(g) => frame.then_gate(*g)?,
                MixedOp::Rotation(p) => generators.push(frame.conjugate(p)?),
            }
        }
        Ok(PauliForm {
            circuit: PauliCircuit::new(self.n_qubits, generators)?,
            frame,
        })
    }
}

/// Pauli form of `(mc, h)` with the accumulated Clifford absorbed into `h`.
pub fn canonicalize(mc: &MixedCircuit, h: &Observable) -> Result<(PauliCircuit, Observable)> {
    let form = mc.to_pauli_form()?;
    let h = form.observable(h)?;
    Ok((form.circuit, h))
}
