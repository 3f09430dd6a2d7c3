use super::BitVec;
use crate::error::Result;

/// Row-echelon basis of a subspace of GF(2)^n.
///
/// Each row's pivot is its lowest set bit; rows are kept sorted by pivot and
/// every row is zero below its pivot, so a single ordered pass reduces any
/// vector against the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Basis {
    n: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Gf2Basis {
    pub fn new(n: usize) -> Self {
        Gf2Basis {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after reduction against the rows.
    pub fn reduce(&self, v: &BitVec) -> Result<BitVec> {
        v.check_len(self.n)?;
        Ok(self.reduce_unchecked(v))
    }

    fn reduce_unchecked(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    /// Inserts `v`, returning whether it was independent of the current rows.
    pub fn insert(&mut self, v: &BitVec) -> Result<bool> {
        let r = self.reduce(v)?;
        let Some(p) = r.first_one() else {
            return Ok(false);
        };
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        Ok(true)
    }

    /// Value-style insert: returns the extended basis and the independence flag.
    pub fn with(&self, v: &BitVec) -> Result<(Gf2Basis, bool)> {
        let mut b = self.clone();
        let independent = b.insert(v)?;
        Ok((b, independent))
    }

    pub fn in_span(&self, v: &BitVec) -> Result<bool> {
        v.check_len(self.n)?;
        Ok(self.contains(v))
    }

    /// Span membership without the length check (hot path of the expansion).
    #[inline]
    pub(crate) fn contains(&self, v: &BitVec) -> bool {
        if self.rows.len() == self.n {
            return true;
        }
        if v.is_zero() {
            return true;
        }
        self.reduce_unchecked(v).is_zero()
    }
}
