//! Ensembles of random circuits: level statistics, closed-form predictions
//! for random Pauli circuits, node-count scaling and QAOA complexity.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    build_hea_brickwall, build_qaoa, build_random_local, build_random_nonlocal, light_cone_size,
    random_regular_graph, Graph, Observable, PauliCircuit,
};
use crate::error::{Error, Result};
use crate::expansion::{expand, mc_estimate, ExpansionOptions, ExpansionReport};
use crate::pauli::PauliOperator;

/// Circuit family of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Full-support generators and observable.
    Random { n: usize, m: usize },
    /// Generators of fixed weight, full-support observable.
    RandomLocal { n: usize, m: usize, weight: usize },
    /// Random `d`-regular graph on `n` vertices, one random edge observable.
    Qaoa { n: usize, d: usize, p: usize },
    /// Brick-wall HEA with a `Z` observable on a random qubit.
    Hea { n: usize, layers: usize },
}

fn default_samples() -> usize {
    10_000
}

fn default_limit() -> f64 {
    1e7
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub options: ExpansionOptions,
    /// Walks per Monte-Carlo node estimate.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Trials whose estimated node count exceeds this are not expanded.
    #[serde(default = "default_limit")]
    pub full_expansion_limit: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, trials: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind,
            trials,
            seed,
            options: ExpansionOptions::default(),
            samples: default_samples(),
            full_expansion_limit: default_limit(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the circuit and observable of one trial.
    pub fn build(&self, seed: u64) -> Result<(PauliCircuit, Observable)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.kind {
            EnsembleKind::Random { n, m } => build_random_nonlocal(n, m, seed),
            EnsembleKind::RandomLocal { n, m, weight } => {
                let c = build_random_local(n, m, weight, seed)?;
                rng.set_stream(1);
                let h = PauliOperator::random_full_support(n, &mut rng);
                Ok((c, Observable::from_pauli(h)))
            }
            EnsembleKind::Qaoa { n, d, p } => {
                let g = random_regular_graph(n, d, seed)?;
                let (c, obs) = build_qaoa(&g, p)?;
                let pick = rng.gen_range(0..obs.len());
                Ok((c, obs[pick].clone()))
            }
            EnsembleKind::Hea { n, layers } => {
                let form = build_hea_brickwall(n, layers)?;
                let q = rng.gen_range(0..n);
                let h =
                    form.observable(&Observable::from_pauli(PauliOperator::single(n, q, 'Z')?))?;
                Ok((form.circuit, h))
            }
        }
    }
}

/// Per-trial seeds derived from the master seed.
pub fn trial_seeds(master: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..trials).map(|_| rng.gen()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    /// Present when the trial was fully expanded.
    pub report: Option<ExpansionReport>,
    /// Exact `nodes_visited`, or its Monte-Carlo estimate.
    pub nodes: f64,
    pub estimated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub trials: Vec<TrialResult>,
    pub n_mean: Vec<f64>,
    pub l_mean: Vec<f64>,
    pub l_std: Vec<f64>,
    pub nu_mean: Vec<f64>,
    pub nu_std: Vec<f64>,
    pub log10_nodes_mean: f64,
    pub log10_nodes_std: f64,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, var.sqrt())
}

fn run_trial(spec: &EnsembleSpec, trial: usize, seed: u64) -> Result<TrialResult> {
    let (c, h) = spec.build(seed)?;
    let est = mc_estimate(&c, &h, &spec.options, spec.samples, seed)?;
    if est.mean > spec.full_expansion_limit {
        return Ok(TrialResult {
            trial,
            seed,
            report: None,
            nodes: est.mean,
            estimated: true,
        });
    }
    let (_, mut report) = expand(&c, &h, &spec.options)?;
    report.wall_time_secs = 0.0;
    Ok(TrialResult {
        trial,
        seed,
        nodes: report.nodes_visited as f64,
        report: Some(report),
        estimated: false,
    })
}

/// Runs every trial (in parallel) and aggregates the expanded ones.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    if spec.trials == 0 {
        return Err(Error::invalid("ensemble needs at least one trial"));
    }
    let seeds = trial_seeds(spec.seed, spec.trials);
    let trials = seeds
        .par_iter()
        .enumerate()
        .map(|(t, &s)| run_trial(spec, t, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(trials))
}

fn aggregate(trials: Vec<TrialResult>) -> EnsembleResult {
    let reports: Vec<&ExpansionReport> = trials.iter().filter_map(|t| t.report.as_ref()).collect();
    let levels = reports.iter().map(|r| r.n.len()).max().unwrap_or(0);
    let stat = |f: &dyn Fn(&ExpansionReport) -> f64| {
        mean_std(&reports.iter().map(|r| f(r)).collect::<Vec<_>>())
    };
    let mut n_mean = Vec::with_capacity(levels);
    let (mut l_mean, mut l_std, mut nu_mean, mut nu_std) = (vec![], vec![], vec![], vec![]);
    for m in 0..levels {
        n_mean.push(stat(&|r| r.n.get(m).copied().unwrap_or(0) as f64).0);
        let (a, b) = stat(&|r| r.l.get(m).copied().unwrap_or(0) as f64);
        l_mean.push(a);
        l_std.push(b);
        let (a, b) = stat(&|r| r.nu.get(m).copied().unwrap_or(0.0));
        nu_mean.push(a);
        nu_std.push(b);
    }
    let logs: Vec<f64> = trials
        .iter()
        .filter(|t| t.nodes > 0.0)
        .map(|t| t.nodes.log10())
        .collect();
    let (log10_nodes_mean, log10_nodes_std) = mean_std(&logs);
    EnsembleResult {
        trials,
        n_mean,
        l_mean,
        l_std,
        nu_mean,
        nu_std,
        log10_nodes_mean,
        log10_nodes_std,
    }
}

impl EnsembleResult {
    /// One row per trial and level; estimated trials get a single row with
    /// empty level columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,m,n_m,l_m,nu_m,nodes,pruned,estimate_flag\n");
        for t in &self.trials {
            match &t.report {
                Some(r) => {
                    for m in 0..r.n.len() {
                        writeln!(
                            out,
                            "{},{m},{},{},{},{},{},0",
                            t.trial, r.n[m], r.l[m], r.nu[m], t.nodes, r.nodes_pruned
                        )
                        .unwrap();
                    }
                }
                None => writeln!(out, "{},,,,,{},,1", t.trial, t.nodes).unwrap(),
            }
        }
        out
    }
}

/// Closed-form level statistics of random full-support circuits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedStats {
    /// `(3/2)^M`.
    pub n_total: f64,
    /// `2^{m−M} binom(M, m)`.
    pub n_by_level: Vec<f64>,
    /// `2^{−N} (3/2)^M`.
    pub l_total: f64,
    pub l_by_level: Vec<f64>,
    /// `2^{−N−M} binom(M, m)`.
    pub nu_by_level: Vec<f64>,
}

pub fn predicted_random_stats(m: usize, n: usize) -> PredictedStats {
    let mut binom = vec![1.0f64; m + 1];
    for k in 1..=m {
        binom[k] = binom[k - 1] * (m + 1 - k) as f64 / k as f64;
    }
    let two = |e: i64| 2f64.powi(e as i32);
    let n_by_level: Vec<f64> = (0..=m)
        .map(|k| two(k as i64 - m as i64) * binom[k])
        .collect();
    let scale = two(-(n as i64));
    PredictedStats {
        n_total: 1.5f64.powi(m as i32),
        l_total: scale * 1.5f64.powi(m as i32),
        l_by_level: n_by_level.iter().map(|v| v * scale).collect(),
        nu_by_level: binom
            .iter()
            .map(|b| b * two(-(n as i64) - m as i64))
            .collect(),
        n_by_level,
    }
}

/// Depth `round(n / log2(3/2))` at which random circuits have `O(1)` terms.
pub fn scaling_depth(n: usize) -> usize {
    (n as f64 / 1.5f64.log2()).round() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub m: usize,
    pub mean_nodes: f64,
    pub mean_terms: f64,
    /// `mean_nodes / mean_terms`.
    pub ratio: f64,
    /// Trials that hit the node budget and used a Monte-Carlo node count.
    pub estimated_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log2(ratio)` against `n`.
    pub slope: f64,
}

/// Pruned node count per nonzero Fourier term for random circuits at the
/// critical depth, over `trials` circuits per size.
pub fn scaling_experiment(
    n_list: &[usize],
    trials: usize,
    node_budget: u64,
    seed: u64,
) -> Result<ScalingTable> {
    if trials == 0 || n_list.is_empty() {
        return Err(Error::invalid("scaling experiment needs sizes and trials"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let m = scaling_depth(n);
        let opts = ExpansionOptions {
            node_budget: Some(node_budget),
            ..Default::default()
        };
        let seeds = trial_seeds(seed.wrapping_add(i as u64), trials);
        let outcomes = seeds
            .par_iter()
            .map(|&s| {
                let (c, h) = build_random_nonlocal(n, m, s)?;
                match expand(&c, &h, &opts) {
                    Ok((series, r)) => Ok((r.nodes_visited as f64, series.len() as f64, false)),
                    Err(e) if e.is_guard() => {
                        let est = mc_estimate(&c, &h, &ExpansionOptions::default(), 10_000, s)?;
                        let terms = predicted_random_stats(m, n).l_total;
                        Ok((est.mean, terms, true))
                    }
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mean_nodes = outcomes.iter().map(|o| o.0).sum::<f64>() / trials as f64;
        let mean_terms = outcomes.iter().map(|o| o.1).sum::<f64>() / trials as f64;
        rows.push(ScalingRow {
            n,
            m,
            mean_nodes,
            mean_terms,
            ratio: mean_nodes / mean_terms,
            estimated_trials: outcomes.iter().filter(|o| o.2).count(),
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.ratio.log2())).collect();
    Ok(ScalingTable {
        slope: least_squares_slope(&pts),
        rows,
    })
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaComplexity {
    pub d: usize,
    pub p: usize,
    /// Light-cone qubit count `N_c`.
    pub n_qubits: usize,
    pub n_params: usize,
    /// Estimated pruned node count per graph.
    pub estimates: Vec<f64>,
    pub log10_mean: f64,
    pub log10_std: f64,
}

/// Light-cone QAOA instance for graph `index`: a random `d`-regular graph on
/// `N_c` vertices (a cycle for `d = 2`) and one random edge observable.
pub fn qaoa_light_cone_instance(
    d: usize,
    p: usize,
    seed: u64,
) -> Result<(PauliCircuit, Observable)> {
    let nc = light_cone_size(d as u64, p as u32)? as usize;
    let graph = if d == 2 {
        Graph::cycle(nc)?
    } else {
        random_regular_graph(nc, d, seed)?
    };
    let (c, obs) = build_qaoa(&graph, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = rng.gen_range(0..obs.len());
    Ok((c, obs[pick].clone()))
}

/// Pruned Monte-Carlo node counts over `graphs` light-cone instances,
/// summarized as mean and deviation of `log10`.
pub fn qaoa_complexity_estimate(
    d: usize,
    p: usize,
    graphs: usize,
    samples: usize,
    seed: u64,
) -> Result<QaoaComplexity> {
    if graphs == 0 {
        return Err(Error::invalid("need at least one graph"));
    }
    let seeds = trial_seeds(seed, graphs);
    let mut n_qubits = 0;
    let mut n_params = 0;
    let mut estimates = Vec::with_capacity(graphs);
    for &s in &seeds {
        let (c, h) = qaoa_light_cone_instance(d, p, s)?;
        n_qubits = c.n_qubits();
        n_params = c.n_params();
        estimates.push(mc_estimate(&c, &h, &ExpansionOptions::default(), samples, s)?.mean);
    }
    let logs: Vec<f64> = estimates.iter().map(|e| e.max(1.0).log10()).collect();
    let (log10_mean, log10_std) = mean_std(&logs);
    Ok(QaoaComplexity {
        d,
        p,
        n_qubits,
        n_params,
        estimates,
        log10_mean,
        log10_std,
    })
}
