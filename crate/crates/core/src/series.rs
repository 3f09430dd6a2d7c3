//! Multivariate trigonometric polynomials in `cos φ_m`, `sin φ_m`.
//!
//! Every monomial uses each parameter at most once, so a term of degree `m`
//! has mean square `2^{-m}` under the uniform angle measure and distinct
//! monomials are orthogonal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are treated as cancelled.
pub const ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Cos,
    Sin,
}

/// Trigonometric monomial `∏ f_m(φ_m)` over a set of 1-based parameter indices.
///
/// Ordered by degree first, then lexicographically by `(index, factor)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MonomialKey {
    entries: Vec<(usize, Factor)>,
}

impl MonomialKey {
    pub fn constant() -> Self {
        MonomialKey::default()
    }

    /// Sorts the entries; rejects repeated parameters and index 0.
    pub fn new(mut entries: Vec<(usize, Factor)>) -> Result<Self> {
        entries.sort();
        if entries.first().is_some_and(|e| e.0 == 0) {
            return Err(Error::invalid("parameter indices are 1-based"));
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("parameter repeated in monomial"));
        }
        Ok(MonomialKey { entries })
    }

    /// Caller guarantees strictly increasing indices.
    pub(crate) fn from_sorted(entries: Vec<(usize, Factor)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        MonomialKey { entries }
    }

    pub fn entries(&self) -> &[(usize, Factor)] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0)
    }

    /// Parameter indices carrying a sine.
    pub fn sine_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .filter(|(_, f)| *f == Factor::Sin)
            .map(|(m, _)| *m)
    }

    pub fn eval_with(&self, cos: &[f64], sin: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(m, f)| match f {
                Factor::Cos => cos[m - 1],
                Factor::Sin => sin[m - 1],
            })
            .product()
    }
}

impl Ord for MonomialKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for MonomialKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fourier series of a loss function over `n_params` angles.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FourierSeries {
    n_params: usize,
    terms: BTreeMap<MonomialKey, f64>,
}

impl FourierSeries {
    pub fn new(n_params: usize) -> Self {
        FourierSeries {
            n_params,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n_params: usize,
        terms: impl IntoIterator<Item = (MonomialKey, f64)>,
    ) -> Result<Self> {
        let mut s = FourierSeries::new(n_params);
        for (k, c) in terms {
            s.add_term(k, c)?;
        }
        s.terms.retain(|_, c| c.abs() >= ZERO_TOLERANCE);
        Ok(s)
    }

    /// Adds `c` to the coefficient of `key`.
    pub fn add_term(&mut self, key: MonomialKey, c: f64) -> Result<()> {
        if key.max_index() > self.n_params {
            return Err(Error::invalid(format!(
                "monomial references parameter {} of {}",
                key.max_index(),
                self.n_params
            )));
        }
        if !c.is_finite() {
            return Err(Error::invalid(format!("non-finite coefficient {c}")));
        }
        *self.terms.entry(key).or_insert(0.0) += c;
        Ok(())
    }

    pub(crate) fn terms_mut(&mut self) -> &mut BTreeMap<MonomialKey, f64> {
        &mut self.terms
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, f64)> {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    pub fn coefficient(&self, key: &MonomialKey) -> f64 {
        self.terms.get(key).copied().unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.terms
            .keys()
            .map(MonomialKey::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, phi: &[f64]) -> Result<f64> {
        if phi.len() != self.n_params {
            return Err(Error::LengthMismatch {
                expected: self.n_params,
                found: phi.len(),
            });
        }
        let cos: Vec<f64> = phi.iter().map(|p| p.cos()).collect();
        let sin: Vec<f64> = phi.iter().map(|p| p.sin()).collect();
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| c * k.eval_with(&cos, &sin))
            .sum())
    }

    /// `⟨F²⟩` over uniform angles: `Σ c² 2^{-degree}`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c * c * 0.5f64.powi(k.degree() as i32))
            .sum()
    }

    /// Keeps terms of degree ≤ `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> FourierSeries {
        FourierSeries {
            n_params: self.n_params,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() <= max_degree)
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// `⟨|∇F|²⟩ = -⟨F ΔF⟩ = Σ degree · c² · 2^{-degree}`.
    pub fn gradient_variance(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let d = k.degree();
                d as f64 * c * c * 0.5f64.powi(d as i32)
            })
            .sum()
    }

    /// `wa·a + wb·b`, dropping cancelled coefficients.
    pub fn merge(a: &FourierSeries, b: &FourierSeries, wa: f64, wb: f64) -> Result<FourierSeries> {
        if a.n_params != b.n_params {
            return Err(Error::LengthMismatch {
                expected: a.n_params,
                found: b.n_params,
            });
        }
        let mut out = FourierSeries::new(a.n_params);
        for (k, c) in &a.terms {
            *out.terms.entry(k.clone()).or_insert(0.0) += wa * c;
        }
        for (k, c) in &b.terms {
            *out.terms.entry(k.clone()).or_insert(0.0) += wb * c;
        }
        out.terms.retain(|_, c| c.abs() >= ZERO_TOLERANCE);
        Ok(out)
    }

    /// Renames parameters: index `i` becomes `mapping[i - 1]`.
    pub fn relabel(&self, mapping: &[usize]) -> Result<FourierSeries> {
        if mapping.len() != self.n_params {
            return Err(Error::LengthMismatch {
                expected: self.n_params,
                found: mapping.len(),
            });
        }
        let mut out = FourierSeries::new(self.n_params);
        for (k, c) in &self.terms {
            let key = MonomialKey::new(
                k.entries
                    .iter()
                    .map(|&(m, f)| (mapping[m - 1], f))
                    .collect(),
            )?;
            out.add_term(key, *c)?;
        }
        Ok(out)
    }

    pub fn level_stats(&self) -> LevelStats {
        let levels = self.n_params + 1;
        let mut l = vec![0u64; levels];
        let mut nu = vec![0.0f64; levels];
        for (k, c) in &self.terms {
            let d = k.degree();
            l[d] += 1;
            nu[d] += c * c * 0.5f64.powi(d as i32);
        }
        let norm_sq = nu.iter().sum();
        LevelStats { l, nu, norm_sq }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SeriesJson::from(self)).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

impl Serialize for FourierSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    n_params: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    factors: Vec<(usize, Factor)>,
    coeff: f64,
}

impl From<&FourierSeries> for SeriesJson {
    fn from(s: &FourierSeries) -> Self {
        SeriesJson {
            n_params: s.n_params,
            terms: s
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    factors: k.entries.clone(),
                    coeff: *c,
                })
                .collect(),
        }
    }
}

impl TryFrom<SeriesJson> for FourierSeries {
    type Error = Error;

    fn try_from(raw: SeriesJson) -> Result<Self> {
        let mut s = FourierSeries::new(raw.n_params);
        for t in raw.terms {
            s.add_term(MonomialKey::new(t.factors)?, t.coeff)?;
        }
        Ok(s)
    }
}

/// Per-level term counts `l(m)` and norm contributions `ν(m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub l: Vec<u64>,
    pub nu: Vec<f64>,
    pub norm_sq: f64,
}

impl LevelStats {
    /// CSV with columns `m,l,nu,cumulative` (cumulative norm up to level m).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,l,nu,cumulative\n");
        let mut cum = 0.0;
        for (m, (l, nu)) in self.l.iter().zip(&self.nu).enumerate() {
            cum += nu;
            writeln!(out, "{m},{l},{nu},{cum}").unwrap();
        }
        out
    }
}
