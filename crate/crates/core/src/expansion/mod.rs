//! Recursive expansion of the dressed Hamiltonian `U†(φ) H U(φ)`.
//!
//! Generators are consumed from `P_M` down to `P_1`. A generator commuting
//! with the current observable passes through; an anti-commuting one splits
//! the node into a `cos φ_m` child keeping the observable and a `sin φ_m`
//! child carrying `i·P_m·O`. A leaf contributes `sign` to its monomial when
//! its observable has no X part.
//!
//! With pruning enabled, a node at depth `i` is dropped as soon as its X
//! vector leaves the GF(2) span of `(P_1)_X … (P_i)_X`: no later product can
//! cancel the X part, so every leaf below it has zero expectation.

mod estimate;
mod reorder;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use estimate::{mc_estimate, McEstimate};
pub use reorder::{reorder, Reordering};

use crate::circuit::{Observable, PauliCircuit};
use crate::error::{Error, Result};
use crate::pauli::{BitVec, Gf2Basis, PauliOperator};
use crate::series::{Factor, FourierSeries, MonomialKey, ZERO_TOLERANCE};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reorder {
    #[default]
    None,
    /// Moves generators commuting with the observable to be processed first.
    DelayedBranching,
    /// Moves generators with an X vector outside the others' span to be
    /// processed first, so their branches are span-tested immediately.
    EarlyPruning,
}

impl Reorder {
    pub const ALL: [Reorder; 3] = [
        Reorder::None,
        Reorder::DelayedBranching,
        Reorder::EarlyPruning,
    ];
}

impl fmt::Display for Reorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reorder::None => "none",
            Reorder::DelayedBranching => "delayed-branching",
            Reorder::EarlyPruning => "early-pruning",
        })
    }
}

impl FromStr for Reorder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "none" => Ok(Reorder::None),
            "delayed-branching" => Ok(Reorder::DelayedBranching),
            "early-pruning" => Ok(Reorder::EarlyPruning),
            _ => Err(Error::invalid(format!("unknown reorder strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpansionOptions {
    pub prune_by_expectation: bool,
    /// Highest Fourier degree kept; deeper nodes are cut.
    pub max_level: Option<usize>,
    /// Deepen the level cap until the residual bound drops to this value.
    pub target_residual: Option<f64>,
    pub reorder: Reorder,
    /// Error out once more nodes than this have been created.
    pub node_budget: Option<u64>,
    pub parallel: bool,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            prune_by_expectation: true,
            max_level: None,
            target_residual: None,
            reorder: Reorder::None,
            node_budget: None,
            parallel: true,
        }
    }
}

impl ExpansionOptions {
    pub fn unpruned() -> Self {
        ExpansionOptions {
            prune_by_expectation: false,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(eps) = self.target_residual {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::invalid(format!(
                    "target residual {eps} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Per-level statistics and traversal counters of one expansion.
///
/// For multi-term observables the level counts are summed over terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub n_params: usize,
    /// Dressed-Hamiltonian terms (leaves reached) by level.
    pub n: Vec<u64>,
    /// Leaves with nonzero expectation by level.
    pub l: Vec<u64>,
    pub delta: Vec<f64>,
    pub cumulative_delta: Vec<f64>,
    pub nu: Vec<f64>,
    /// Terminal nodes of the traversed tree: leaves, cut nodes and nodes
    /// whose only child was pruned.
    pub nodes_visited: u64,
    pub nodes_pruned: u64,
    pub nodes_created: u64,
    pub nodes_cut: u64,
    /// Upper bound on `⟨|F − F^{(m)}|²⟩` from the weight of cut nodes.
    pub residual_bound: f64,
    pub max_level: Option<usize>,
    /// False when pruning hid dressed terms, so `n` is a lower bound.
    pub n_exact: bool,
    /// Original 1-based index of each processed generator, when reordered.
    pub generator_order: Option<Vec<usize>>,
    /// Excluded from equality-sensitive output; see [`ExpansionReport::without_timing`].
    pub wall_time_secs: f64,
}

impl ExpansionReport {
    fn from_tallies(
        n_params: usize,
        tallies: &[(f64, Tally)],
        prune: bool,
        max_level: Option<usize>,
    ) -> Self {
        let mut n = vec![0u64; n_params + 1];
        let mut l = vec![0u64; n_params + 1];
        let (mut visited, mut pruned, mut created, mut cut) = (0, 0, 0, 0);
        let mut root_sum = 0.0;
        for (c, t) in tallies {
            for (a, b) in n.iter_mut().zip(&t.n) {
                *a += b;
            }
            for (a, b) in l.iter_mut().zip(&t.l) {
                *a += b;
            }
            visited += t.terminals;
            pruned += t.pruned;
            created += t.created;
            cut += t.cut;
            root_sum += c.abs() * t.cut_mass.sqrt();
        }
        let delta: Vec<f64> = n
            .iter()
            .enumerate()
            .map(|(m, &k)| k as f64 * 0.5f64.powi(m as i32))
            .collect();
        let cumulative_delta = delta
            .iter()
            .scan(0.0, |acc, d| {
                *acc += d;
                Some(*acc)
            })
            .collect();
        let nu = l
            .iter()
            .enumerate()
            .map(|(m, &k)| k as f64 * 0.5f64.powi(m as i32))
            .collect();
        ExpansionReport {
            n_params,
            n,
            l,
            delta,
            cumulative_delta,
            nu,
            nodes_visited: visited,
            nodes_pruned: pruned,
            nodes_created: created,
            nodes_cut: cut,
            residual_bound: root_sum * root_sum,
            max_level,
            n_exact: !prune,
            generator_order: None,
            wall_time_secs: 0.0,
        }
    }

    /// Total dressed terms `Σ_m n(m)`.
    pub fn total_terms(&self) -> u64 {
        self.n.iter().sum()
    }

    /// Total nonzero leaves `Σ_m l(m)`.
    pub fn total_nonzero(&self) -> u64 {
        self.l.iter().sum()
    }

    /// `Σ_m 2^{M−m} n(m)` in exact integer arithmetic; equals `2^M` times the
    /// number of observable terms for complete unpruned expansions.
    pub fn weighted_population(&self) -> BigUint {
        let m_max = self.n_params;
        self.n
            .iter()
            .enumerate()
            .map(|(m, &k)| BigUint::from(k) << (m_max - m))
            .sum()
    }

    pub fn without_timing(&self) -> Self {
        ExpansionReport {
            wall_time_secs: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// GF(2) spans of the generator X vectors over every prefix `P_1 … P_i`.
#[derive(Clone, Debug)]
pub struct PrefixSpans {
    spans: Vec<Gf2Basis>,
}

impl PrefixSpans {
    pub fn new(circuit: &PauliCircuit) -> Self {
        let mut basis = Gf2Basis::new(circuit.n_qubits());
        let mut spans = Vec::with_capacity(circuit.n_params() + 1);
        spans.push(basis.clone());
        for g in circuit.generators() {
            basis.insert(g.x_bits()).expect("generator width matches");
            spans.push(basis.clone());
        }
        PrefixSpans { spans }
    }

    /// Span of the first `i` generators.
    pub fn prefix(&self, i: usize) -> &Gf2Basis {
        &self.spans[i]
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Whether a node at `depth` with X vector `x` can still reach a leaf
    /// with nonzero expectation.
    pub fn admits(&self, depth: usize, x: &BitVec) -> bool {
        self.spans[depth].contains(x)
    }
}

/// A partially conjugated observable with `depth` generators left to process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputationalNode {
    pub depth: usize,
    pub observable: PauliOperator,
    /// Trig factors collected so far, in processing order (descending index).
    pub factors: Vec<(usize, Factor)>,
}

impl ComputationalNode {
    pub fn root(circuit: &PauliCircuit, observable: PauliOperator) -> Self {
        ComputationalNode {
            depth: circuit.n_params(),
            observable,
            factors: Vec::new(),
        }
    }

    /// Number of trig factors, i.e. the Fourier degree of every leaf below.
    pub fn level(&self) -> usize {
        self.factors.len()
    }

    /// Number of sine factors, the weight of the branch vector.
    pub fn sine_count(&self) -> usize {
        self.factors.iter().filter(|f| f.1 == Factor::Sin).count()
    }

    pub fn monomial_key(&self) -> MonomialKey {
        MonomialKey::from_sorted(self.factors.iter().rev().copied().collect())
    }
}

/// One application of the conjugation rule; the second node is the sine
/// branch when the generator anti-commutes with the observable.
pub fn conjugate_step(
    node: &ComputationalNode,
    generator: &PauliOperator,
) -> Result<(ComputationalNode, Option<ComputationalNode>)> {
    if node.depth == 0 {
        return Err(Error::invalid("node has no generators left"));
    }
    let m = node.depth;
    if generator.commutes(&node.observable)? {
        let mut next = node.clone();
        next.depth = m - 1;
        return Ok((next, None));
    }
    let mut cos = node.clone();
    cos.depth = m - 1;
    cos.factors.push((m, Factor::Cos));
    let mut sin = ComputationalNode {
        depth: m - 1,
        observable: generator.multiply_unchecked(&node.observable),
        factors: node.factors.clone(),
    };
    sin.factors.push((m, Factor::Sin));
    Ok((cos, Some(sin)))
}

/// `Σ_t c_t ⟨0|P_t|0⟩` over terms commuting with every generator: the
/// constant Fourier coefficient, without any expansion.
pub fn average_loss(circuit: &PauliCircuit, h: &Observable) -> Result<f64> {
    check_widths(circuit, h)?;
    Ok(h.terms()
        .iter()
        .filter(|(_, p)| circuit.generators().iter().all(|g| g.commutes_unchecked(p)))
        .map(|(c, p)| c * p.expectation_in_zero() as f64)
        .sum())
}

fn check_widths(circuit: &PauliCircuit, h: &Observable) -> Result<()> {
    if circuit.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: circuit.n_qubits(),
            found: h.n_qubits(),
        });
    }
    Ok(())
}

/// Expands `F` for `circuit` and observable `h` under `opts`.
pub fn expand(
    circuit: &PauliCircuit,
    h: &Observable,
    opts: &ExpansionOptions,
) -> Result<(FourierSeries, ExpansionReport)> {
    check_widths(circuit, h)?;
    opts.validate()?;
    let start = Instant::now();
    let (series, mut report) = match opts.reorder {
        Reorder::None => expand_in_order(circuit, h, opts)?,
        strategy => {
            let r = reorder(circuit, h, strategy)?;
            let (series, mut report) = expand_in_order(&r.circuit, h, opts)?;
            report.generator_order = Some(r.original_index.clone());
            (series.relabel(&r.original_index)?, report)
        }
    };
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((series, report))
}

/// [`expand`] for a single Pauli observable with coefficient one.
pub fn expand_pauli(
    circuit: &PauliCircuit,
    h: &PauliOperator,
    opts: &ExpansionOptions,
) -> Result<(FourierSeries, ExpansionReport)> {
    expand(circuit, &Observable::from_pauli(h.clone()), opts)
}

fn expand_in_order(
    circuit: &PauliCircuit,
    h: &Observable,
    opts: &ExpansionOptions,
) -> Result<(FourierSeries, ExpansionReport)> {
    let m = circuit.n_params();
    match opts.target_residual {
        None => expand_capped(circuit, h, opts, opts.max_level),
        Some(eps) => {
            let top = opts.max_level.map_or(m, |c| c.min(m));
            let mut level = 0;
            loop {
                let out = expand_capped(circuit, h, opts, Some(level))?;
                if out.1.residual_bound <= eps || level >= top {
                    return Ok(out);
                }
                level += 1;
            }
        }
    }
}

fn expand_capped(
    circuit: &PauliCircuit,
    h: &Observable,
    opts: &ExpansionOptions,
    max_level: Option<usize>,
) -> Result<(FourierSeries, ExpansionReport)> {
    let spans = opts.prune_by_expectation.then(|| PrefixSpans::new(circuit));
    let budget = opts.node_budget.map(|limit| Budget {
        limit,
        used: AtomicU64::new(0),
    });
    let engine = Engine {
        generators: circuit.generators(),
        spans: spans.as_ref(),
        max_level,
        budget: budget.as_ref(),
    };
    let mut series = FourierSeries::new(circuit.n_params());
    let mut tallies = Vec::with_capacity(h.len());
    for (c, p) in h.terms() {
        let root = ComputationalNode::root(circuit, p.clone());
        let tally = if opts.parallel {
            engine.run_parallel(root)?
        } else {
            let mut t = Tally::new(circuit.n_params());
            engine.run(root, &mut t)?;
            t
        };
        let mut seen = BTreeSet::new();
        for (key, sign) in &tally.leaves {
            assert!(seen.insert(key), "duplicate leaf monomial {key:?}");
            series.add_term(key.clone(), c * *sign as f64)?;
        }
        tallies.push((*c, tally));
    }
    series.terms_mut().retain(|_, c| c.abs() >= ZERO_TOLERANCE);
    let report = ExpansionReport::from_tallies(
        circuit.n_params(),
        &tallies,
        opts.prune_by_expectation,
        max_level,
    );
    Ok((series, report))
}

struct Budget {
    limit: u64,
    used: AtomicU64,
}

const BUDGET_FLUSH: u64 = 4096;

struct Tally {
    n: Vec<u64>,
    l: Vec<u64>,
    terminals: u64,
    pruned: u64,
    created: u64,
    unflushed: u64,
    cut: u64,
    cut_mass: f64,
    leaves: Vec<(MonomialKey, i8)>,
}

impl Tally {
    fn new(n_params: usize) -> Self {
        Tally {
            n: vec![0; n_params + 1],
            l: vec![0; n_params + 1],
            terminals: 0,
            pruned: 0,
            created: 0,
            unflushed: 0,
            cut: 0,
            cut_mass: 0.0,
            leaves: Vec::new(),
        }
    }

    fn absorb(&mut self, other: Tally) {
        for (a, b) in self.n.iter_mut().zip(&other.n) {
            *a += b;
        }
        for (a, b) in self.l.iter_mut().zip(&other.l) {
            *a += b;
        }
        self.terminals += other.terminals;
        self.pruned += other.pruned;
        self.created += other.created;
        self.cut += other.cut;
        self.cut_mass += other.cut_mass;
        self.leaves.extend(other.leaves);
    }
}

struct Engine<'a> {
    generators: &'a [PauliOperator],
    spans: Option<&'a PrefixSpans>,
    max_level: Option<usize>,
    budget: Option<&'a Budget>,
}

enum Descent {
    Finished,
    Split(ComputationalNode, ComputationalNode),
}

impl Engine<'_> {
    fn admits(&self, depth: usize, p: &PauliOperator) -> bool {
        self.spans.is_none_or(|s| s.admits(depth, p.x_bits()))
    }

    fn count_created(&self, tally: &mut Tally, k: u64) -> Result<()> {
        tally.created += k;
        tally.unflushed += k;
        if tally.unflushed >= BUDGET_FLUSH {
            self.flush_budget(tally)?;
        }
        Ok(())
    }

    fn flush_budget(&self, tally: &mut Tally) -> Result<()> {
        let k = std::mem::take(&mut tally.unflushed);
        if let Some(b) = self.budget {
            let used = b.used.fetch_add(k, Ordering::Relaxed) + k;
            if used > b.limit {
                return Err(Error::guard(format!("node budget of {} exceeded", b.limit)));
            }
        }
        Ok(())
    }

    /// Root admission; `None` when the root itself is pruned.
    fn admit_root(&self, root: ComputationalNode, tally: &mut Tally) -> Option<ComputationalNode> {
        if self.admits(root.depth, &root.observable) {
            Some(root)
        } else {
            tally.pruned += 1;
            None
        }
    }

    /// Follows `node` through commuting generators until it terminates or
    /// reaches a split with two live children.
    fn descend(&self, mut node: ComputationalNode, tally: &mut Tally) -> Result<Descent> {
        loop {
            if node.depth == 0 {
                let level = node.level();
                tally.terminals += 1;
                tally.n[level] += 1;
                let e = node.observable.expectation_in_zero();
                if e != 0 {
                    tally.l[level] += 1;
                    tally.leaves.push((node.monomial_key(), e));
                }
                return Ok(Descent::Finished);
            }
            let m = node.depth;
            let g = &self.generators[m - 1];
            if g.commutes_unchecked(&node.observable) {
                self.count_created(tally, 1)?;
                node.depth = m - 1;
                if !self.admits(m - 1, &node.observable) {
                    tally.pruned += 1;
                    tally.terminals += 1;
                    return Ok(Descent::Finished);
                }
                continue;
            }
            self.count_created(tally, 2)?;
            let sin_obs = g.multiply_unchecked(&node.observable);
            let cos_ok = self.admits(m - 1, &node.observable);
            let sin_ok = self.admits(m - 1, &sin_obs);
            tally.pruned += u64::from(!cos_ok) + u64::from(!sin_ok);
            let level = node.level() + 1;
            if self.max_level.is_some_and(|cap| level > cap) {
                let kept = u64::from(cos_ok) + u64::from(sin_ok);
                tally.cut += kept;
                tally.terminals += kept.max(1);
                tally.cut_mass += kept as f64 * 0.5f64.powi(level as i32);
                return Ok(Descent::Finished);
            }
            let mut sin = (sin_ok).then(|| {
                let mut factors = node.factors.clone();
                factors.push((m, Factor::Sin));
                ComputationalNode {
                    depth: m - 1,
                    observable: sin_obs,
                    factors,
                }
            });
            node.depth = m - 1;
            node.factors.push((m, Factor::Cos));
            match (cos_ok, sin.take()) {
                (true, Some(s)) => return Ok(Descent::Split(node, s)),
                (true, None) => {}
                (false, Some(s)) => node = s,
                (false, None) => {
                    tally.terminals += 1;
                    return Ok(Descent::Finished);
                }
            }
        }
    }

    fn run(&self, root: ComputationalNode, tally: &mut Tally) -> Result<()> {
        let Some(root) = self.admit_root(root, tally) else {
            return Ok(());
        };
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            let mut current = node;
            while let Descent::Split(cos, sin) = self.descend(current, tally)? {
                stack.push(sin);
                current = cos;
            }
        }
        self.flush_budget(tally)
    }

    /// Breadth-first splitting into a frontier, then independent subtrees in
    /// parallel. Subtree tallies are merged in frontier order.
    fn run_parallel(&self, root: ComputationalNode) -> Result<Tally> {
        let n_params = root.depth;
        let mut head = Tally::new(n_params);
        let Some(root) = self.admit_root(root, &mut head) else {
            return Ok(head);
        };
        let target = 8 * rayon::current_num_threads().max(1);
        let mut frontier = vec![root];
        while frontier.len() < target {
            let mut next = Vec::with_capacity(2 * frontier.len());
            for node in frontier {
                if let Descent::Split(a, b) = self.descend(node, &mut head)? {
                    next.push(a);
                    next.push(b);
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        self.flush_budget(&mut head)?;
        let parts: Vec<Result<Tally>> = frontier
            .into_par_iter()
            .map(|node| {
                let mut t = Tally::new(n_params);
                self.run(node, &mut t)?;
                Ok(t)
            })
            .collect();
        for part in parts {
            head.absorb(part?);
        }
        Ok(head)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_random_nonlocal;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn circuit(gens: &[&str]) -> PauliCircuit {
        let n = gens[0].trim_start_matches(['+', '-']).len();
        PauliCircuit::new(n, gens.iter().map(|g| p(g)).collect()).unwrap()
    }

    fn key(e: &[(usize, Factor)]) -> MonomialKey {
        MonomialKey::new(e.to_vec()).unwrap()
    }

    #[test]
    fn step_commuting_and_anticommuting() {
        let c = circuit(&["Z"]);
        let node = ComputationalNode::root(&c, p("Z"));
        let (a, b) = conjugate_step(&node, &p("Z")).unwrap();
        assert!(b.is_none());
        assert_eq!((a.depth, a.observable.clone(), a.level()), (0, p("Z"), 0));

        let (cos, sin) = conjugate_step(&node, &p("X")).unwrap();
        let sin = sin.unwrap();
        assert_eq!(cos.observable, p("Z"));
        assert_eq!(sin.observable, p("Y"));
        assert_eq!(sin.monomial_key(), key(&[(1, Factor::Sin)]));
        assert_eq!((cos.level(), sin.level(), sin.sine_count()), (1, 1, 1));

        let neg = ComputationalNode::root(&c, p("-Z"));
        let (_, sin) = conjugate_step(&neg, &p("X")).unwrap();
        assert_eq!(sin.unwrap().observable, p("-Y"));
        assert!(conjugate_step(&cos, &p("X")).is_err());
    }

    #[test]
    fn single_rotation_gives_cosine() {
        let c = circuit(&["X"]);
        let (s, r) = expand_pauli(&c, &p("Z"), &ExpansionOptions::unpruned()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&key(&[(1, Factor::Cos)])), 1.0);
        assert_eq!(r.n, vec![0, 2]);
        assert_eq!(r.l, vec![0, 1]);
        assert_eq!(r.cumulative_delta[1], 1.0);
        assert_eq!(s.l2_norm_sq(), 0.5);
    }

    #[test]
    fn commuting_rotation_gives_constant() {
        let c = circuit(&["Z"]);
        let (s, r) = expand_pauli(&c, &p("Z"), &ExpansionOptions::default()).unwrap();
        assert_eq!(s.coefficient(&MonomialKey::constant()), 1.0);
        assert_eq!(s.len(), 1);
        assert_eq!(r.n, vec![1, 0]);
        assert_eq!(r.l, vec![1, 0]);
        assert_eq!(r.nodes_visited, 1);
    }

    #[test]
    fn average_loss_examples() {
        assert_eq!(
            average_loss(&circuit(&["X"]), &Observable::from_pauli(p("Z"))).unwrap(),
            0.0
        );
        assert_eq!(
            average_loss(&circuit(&["Z"]), &Observable::from_pauli(p("Z"))).unwrap(),
            1.0
        );
        assert_eq!(
            average_loss(&circuit(&["Z"]), &Observable::from_pauli(p("-Z"))).unwrap(),
            -1.0
        );
    }

    #[test]
    fn population_invariant_unpruned() {
        for seed in 0..40 {
            let (c, h) = build_random_nonlocal(5, 10, seed).unwrap();
            let (_, r) = expand(&c, &h, &ExpansionOptions::unpruned()).unwrap();
            assert_eq!(r.weighted_population(), BigUint::from(1u32) << 10);
            assert!(r.total_terms() <= 1 << 10);
            assert_eq!(r.nodes_visited, r.total_terms());
            assert_eq!(r.residual_bound, 0.0);
        }
    }

    #[test]
    fn pruning_preserves_series() {
        for seed in 0..40 {
            let (c, h) = build_random_nonlocal(6, 12, seed).unwrap();
            let (a, ra) = expand(&c, &h, &ExpansionOptions::unpruned()).unwrap();
            let (b, rb) = expand(&c, &h, &ExpansionOptions::default()).unwrap();
            assert_eq!(a, b);
            assert_eq!(ra.l, rb.l);
            assert!(rb.nodes_visited <= ra.nodes_visited);
            assert!(a.terms().all(|(_, c)| c.abs() == 1.0));
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        for seed in 0..10 {
            let (c, h) = build_random_nonlocal(6, 14, seed).unwrap();
            for prune in [false, true] {
                let base = ExpansionOptions {
                    prune_by_expectation: prune,
                    ..Default::default()
                };
                let serial = ExpansionOptions {
                    parallel: false,
                    ..base.clone()
                };
                let (a, ra) = expand(&c, &h, &base).unwrap();
                let (b, rb) = expand(&c, &h, &serial).unwrap();
                assert_eq!(a.to_json(), b.to_json());
                assert_eq!(ra.without_timing(), rb.without_timing());
            }
        }
    }

    #[test]
    fn truncation_matches_deleting_high_degrees() {
        for seed in 0..20 {
            let (c, h) = build_random_nonlocal(5, 10, seed).unwrap();
            let (full, rfull) = expand(&c, &h, &ExpansionOptions::unpruned()).unwrap();
            for m in 0..=10 {
                for prune in [false, true] {
                    let opts = ExpansionOptions {
                        prune_by_expectation: prune,
                        max_level: Some(m),
                        ..Default::default()
                    };
                    let (s, r) = expand(&c, &h, &opts).unwrap();
                    assert_eq!(s, full.truncate(m));
                    let tail = FourierSeries::merge(&full, &s, 1.0, -1.0).unwrap();
                    assert!(tail.l2_norm_sq() <= r.residual_bound + 1e-12);
                    if !prune {
                        let expect = 1.0 - rfull.cumulative_delta[m];
                        assert!((r.residual_bound - expect).abs() < 1e-12);
                        assert_eq!(&r.n[..=m], &rfull.n[..=m]);
                    }
                }
            }
        }
    }

    #[test]
    fn epsilon_mode_stops_at_first_sufficient_level() {
        let (c, h) = build_random_nonlocal(5, 10, 3).unwrap();
        let (_, rfull) = expand(&c, &h, &ExpansionOptions::unpruned()).unwrap();
        let opts = ExpansionOptions {
            prune_by_expectation: false,
            target_residual: Some(0.25),
            ..Default::default()
        };
        let (_, r) = expand(&c, &h, &opts).unwrap();
        let m = r.max_level.unwrap();
        assert!(r.residual_bound <= 0.25);
        assert!(1.0 - rfull.cumulative_delta[m] <= 0.25 + 1e-12);
        if m > 0 {
            assert!(1.0 - rfull.cumulative_delta[m - 1] > 0.25);
        }
        let bad = ExpansionOptions {
            target_residual: Some(0.0),
            ..Default::default()
        };
        assert!(expand(&c, &h, &bad).is_err());
    }

    #[test]
    fn multi_term_is_linear() {
        for seed in 0..20 {
            let (c, h1) = build_random_nonlocal(5, 9, seed).unwrap();
            let (_, h2) = build_random_nonlocal(5, 9, seed + 1000).unwrap();
            let p1 = h1.terms()[0].1.clone();
            let p2 = h2.terms()[0].1.clone();
            let h = Observable::new(5, vec![(0.3, p1.clone()), (-1.7, p2.clone())]).unwrap();
            let (s, _) = expand(&c, &h, &ExpansionOptions::default()).unwrap();
            let (a, _) = expand_pauli(&c, &p1, &ExpansionOptions::default()).unwrap();
            let (b, _) = expand_pauli(&c, &p2, &ExpansionOptions::default()).unwrap();
            assert_eq!(s, FourierSeries::merge(&a, &b, 0.3, -1.7).unwrap());
        }
    }

    #[test]
    fn node_budget_is_enforced() {
        let (c, h) = build_random_nonlocal(6, 14, 1).unwrap();
        let opts = ExpansionOptions {
            prune_by_expectation: false,
            node_budget: Some(10),
            ..Default::default()
        };
        assert!(expand(&c, &h, &opts).unwrap_err().is_guard());
    }

    #[test]
    fn qubit_mismatch_rejected() {
        let c = circuit(&["XX"]);
        assert!(expand_pauli(&c, &p("Z"), &ExpansionOptions::default()).is_err());
    }

    #[test]
    fn reorder_names_round_trip() {
        for r in Reorder::ALL {
            assert_eq!(r.to_string().parse::<Reorder>().unwrap(), r);
        }
        assert!("sideways".parse::<Reorder>().is_err());
    }
}
