//! Pauli operators in the binary symplectic representation.
//!
//! A [`PauliOperator`] stores a Hermitian Pauli string `±P` as two bit
//! vectors (`z`, `x`) and a sign. The phase convention is
//!
//! ```text
//! P(z, x) = (-i)^{|z & x|} Z(z) X(x)
//! ```
//!
//! so that `z_q = x_q = 1` is the Hermitian `Y` on qubit `q`. Products are
//! computed on the ordered `Z(z) X(x)` form with a phase exponent mod 4 and
//! brought back to this Hermitian form; only products that are Hermitian
//! (`a·b` for commuting, `i·a·b` for anti-commuting operands) are exposed.
//!
//! Qubit 0 is the leftmost character of the text form.

mod basis;
mod bits;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use basis::Gf2Basis;
pub use bits::BitVec;

use crate::error::{Error, Result};

/// Hermitian Pauli string with sign ±1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    z: BitVec,
    x: BitVec,
    negative: bool,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            z: BitVec::zeros(n),
            x: BitVec::zeros(n),
            negative: false,
        }
    }

    pub fn from_parts(z: BitVec, x: BitVec, negative: bool) -> Result<Self> {
        if z.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: z.len(),
                found: x.len(),
            });
        }
        Ok(PauliOperator { z, x, negative })
    }

    /// Single-qubit letter `c` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, c: char) -> Result<Self> {
        let mut p = PauliOperator::identity(n);
        p.set_letter(q, c)?;
        Ok(p)
    }

    /// Parses a string over `{I, X, Y, Z}` with the given sign (+1 when `None`).
    pub fn parse(text: &str, sign: Option<i8>) -> Result<Self> {
        let n = text.chars().count();
        if n == 0 {
            return Err(Error::EmptyPauli);
        }
        let mut p = PauliOperator::identity(n);
        for (q, c) in text.chars().enumerate() {
            p.set_letter(q, c)?;
        }
        match sign {
            None | Some(1) => {}
            Some(-1) => p.negative = true,
            Some(s) => return Err(Error::invalid(format!("Pauli sign must be ±1, got {s}"))),
        }
        Ok(p)
    }

    /// Uniformly random Pauli over `{I, X, Y, Z}^n` with sign +1.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = PauliOperator::identity(n);
        for q in 0..n {
            let c = ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)];
            p.set_letter(q, c).expect("valid letter");
        }
        p
    }

    /// Uniformly random Pauli over `{X, Y, Z}^n` (full support) with sign +1.
    pub fn random_full_support<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = PauliOperator::identity(n);
        for q in 0..n {
            let c = ['X', 'Y', 'Z'][rng.gen_range(0..3)];
            p.set_letter(q, c).expect("valid letter");
        }
        p
    }

    fn set_letter(&mut self, q: usize, c: char) -> Result<()> {
        let (z, x) = match c {
            'I' => (false, false),
            'X' => (false, true),
            'Y' => (true, true),
            'Z' => (true, false),
            other => return Err(Error::InvalidPauliChar(other)),
        };
        if q >= self.n_qubits() {
            return Err(Error::invalid(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits()
            )));
        }
        self.z.set(q, z);
        self.x.set(q, x);
        Ok(())
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.z.len()
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    /// +1 or -1.
    #[inline]
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn negated(&self) -> Self {
        PauliOperator {
            negative: !self.negative,
            ..self.clone()
        }
    }

    /// Same string with sign +1.
    pub fn unsigned(&self) -> Self {
        PauliOperator {
            negative: false,
            ..self.clone()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_zero() && self.x.is_zero()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.z
            .words()
            .iter()
            .zip(self.x.words())
            .map(|(z, x)| (z | x).count_ones() as usize)
            .sum()
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.z.get(q), self.x.get(q)) {
            (false, false) => 'I',
            (false, true) => 'X',
            (true, true) => 'Y',
            (true, false) => 'Z',
        }
    }

    /// Letter string without the sign.
    pub fn letters(&self) -> String {
        (0..self.n_qubits()).map(|q| self.letter(q)).collect()
    }

    fn check_same_size(&self, other: &PauliOperator) -> Result<()> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits(),
                found: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// True iff the symplectic product `z·x' + x·z'` vanishes mod 2.
    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        self.check_same_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliOperator) -> bool {
        let acc = self
            .z
            .words()
            .iter()
            .zip(other.x.words())
            .zip(self.x.words().iter().zip(other.z.words()))
            .fold(0u64, |acc, ((z1, x2), (x1, z2))| {
                acc ^ (z1 & x2) ^ (x1 & z2)
            });
        acc.count_ones() & 1 == 0
    }

    /// Hermitian product: `a·b` if the operands commute, `i·a·b` otherwise.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.check_same_size(other)?;
        Ok(self.multiply_unchecked(other))
    }

    #[inline]
    pub(crate) fn multiply_unchecked(&self, other: &PauliOperator) -> PauliOperator {
        let anti = !self.commutes_unchecked(other);
        let z = self.z.xor(&other.z);
        let x = self.x.xor(&other.x);
        // i^e with e = 2(s_a+s_b) - w_a - w_b + 2|x_a & z_b| + w (+1 for the i factor)
        let wa = self.z.and_count(&self.x) as i64;
        let wb = other.z.and_count(&other.x) as i64;
        let w = z.and_count(&x) as i64;
        let cross = self.x.and_count(&other.z) as i64;
        let e = 2 * (self.negative as i64 + other.negative as i64) - wa - wb
            + 2 * cross
            + w
            + anti as i64;
        let e = e.rem_euclid(4);
        debug_assert!(e % 2 == 0, "Hermitian product produced phase i^{e}");
        PauliOperator {
            z,
            x,
            negative: e == 2,
        }
    }

    /// `⟨0…0| P |0…0⟩`: the sign if `P` is diagonal, 0 otherwise.
    pub fn expectation_in_zero(&self) -> i8 {
        if self.x.is_zero() {
            self.sign()
        } else {
            0
        }
    }

    pub(crate) fn to_phased(&self) -> PhasedPauli {
        let w = self.z.and_count(&self.x) as i64;
        PhasedPauli {
            phase: (2 * self.negative as i64 - w).rem_euclid(4) as u8,
            z: self.z.clone(),
            x: self.x.clone(),
        }
    }
}

/// `i^phase · Z(z) X(x)`, used for composing Clifford images where
/// intermediate products need not be Hermitian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PhasedPauli {
    pub phase: u8,
    pub z: BitVec,
    pub x: BitVec,
}

impl PhasedPauli {
    pub fn identity(n: usize) -> Self {
        PhasedPauli {
            phase: 0,
            z: BitVec::zeros(n),
            x: BitVec::zeros(n),
        }
    }

    /// Right-multiplies by `other` in place.
    pub fn mul_assign(&mut self, other: &PhasedPauli) {
        let cross = self.x.and_count(&other.z);
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * cross) % 4) as u8;
        self.z.xor_assign(&other.z);
        self.x.xor_assign(&other.x);
    }

    /// Converts back to Hermitian form; `None` if the phase is ±i.
    pub fn into_hermitian(self) -> Option<PauliOperator> {
        let w = self.z.and_count(&self.x);
        let e = (self.phase as u32 + w) % 4;
        match e {
            0 => Some(PauliOperator {
                z: self.z,
                x: self.x,
                negative: false,
            }),
            2 => Some(PauliOperator {
                z: self.z,
                x: self.x,
                negative: true,
            }),
            _ => None,
        }
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        } else {
            f.write_str("+")?;
        }
        f.write_str(&self.letters())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Accepts an optional leading `+` or `-`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('-') {
            PauliOperator::parse(rest, Some(-1))
        } else if let Some(rest) = s.strip_prefix('+') {
            PauliOperator::parse(rest, Some(1))
        } else {
            PauliOperator::parse(s, None)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PauliJson {
    sign: i8,
    pauli: String,
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PauliJson {
            sign: self.sign(),
            pauli: self.letters(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PauliJson::deserialize(deserializer)?;
        PauliOperator::parse(&raw.pauli, Some(raw.sign)).map_err(serde::de::Error::custom)
    }
}
