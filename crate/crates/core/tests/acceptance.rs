//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the process
//! exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pauli_fourier::circuit::{
    build_hea_brickwall, build_qaoa, build_random_nonlocal, light_cone_size, random_regular_graph,
    Graph,
};
use pauli_fourier::expansion::mc_estimate;
use pauli_fourier::mq::{enumerate_solutions, leaf_branch_vector, MqSystem};
use pauli_fourier::oracle::{extract_coefficients, sampled_residual, simulate_loss};
use pauli_fourier::stats::{
    mean_std, predicted_random_stats, qaoa_complexity_estimate, qaoa_light_cone_instance,
    scaling_experiment, EnsembleKind, EnsembleSpec,
};
use pauli_fourier::{
    expand, expand_pauli, ExpansionOptions, FourierSeries, Observable, PauliCircuit, PauliOperator,
    Reorder,
};

type Instance = (PauliCircuit, Observable);
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Random instance drawn from one of the four suite families, `n ≤ 8`, `M ≤ 14`.
fn suite_instance(index: usize, rng: &mut ChaCha8Rng) -> Instance {
    let seed = rng.gen();
    match index % 4 {
        0 => build_random_nonlocal(rng.gen_range(2..=8), rng.gen_range(1..=14), seed).unwrap(),
        1 => {
            let n = rng.gen_range(2..=8);
            let kind = EnsembleKind::RandomLocal {
                n,
                m: rng.gen_range(1..=14),
                weight: 2,
            };
            EnsembleSpec::new(kind, 1, seed).build(seed).unwrap()
        }
        // the only 3-regular graph with M = 2.5 n ≤ 14 is K4
        2 => {
            let graph = random_regular_graph(4, 3, seed).unwrap();
            let (c, obs) = build_qaoa(&graph, 1).unwrap();
            let pick = rng.gen_range(0..obs.len());
            (c, obs[pick].clone())
        }
        _ => {
            let n = rng.gen_range(2..=4);
            let form = build_hea_brickwall(n, 2).unwrap();
            let z = Observable::from_pauli(PauliOperator::random(n, rng));
            let h = form.observable(&z).unwrap();
            (form.circuit, h)
        }
    }
}

/// Instance with `M ≤ 8` and `n ≤ 6` from the same four families; QAOA uses a
/// cycle since every 3-regular graph already has `M ≥ 10`.
fn small_instance(index: usize, rng: &mut ChaCha8Rng) -> Instance {
    let seed = rng.gen();
    match index % 4 {
        0 => build_random_nonlocal(rng.gen_range(2..=6), rng.gen_range(1..=8), seed).unwrap(),
        1 => {
            let kind = EnsembleKind::RandomLocal {
                n: rng.gen_range(2..=6),
                m: rng.gen_range(1..=8),
                weight: 2,
            };
            EnsembleSpec::new(kind, 1, seed).build(seed).unwrap()
        }
        2 => {
            let (c, obs) = build_qaoa(&Graph::cycle(rng.gen_range(3..=4)).unwrap(), 1).unwrap();
            let pick = rng.gen_range(0..obs.len());
            (c, obs[pick].clone())
        }
        _ => {
            let n = rng.gen_range(2..=3);
            let form = build_hea_brickwall(n, 2).unwrap();
            let h = form
                .observable(&Observable::from_pauli(PauliOperator::random(n, rng)))
                .unwrap();
            (form.circuit, h)
        }
    }
}

fn suite(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| suite_instance(i, &mut rng)).collect()
}

fn random_angles(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..m)
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

fn max_coefficient_gap(a: &FourierSeries, b: &FourierSeries) -> f64 {
    let keys: BTreeSet<_> = a
        .terms()
        .map(|(k, _)| k.clone())
        .chain(b.terms().map(|(k, _)| k.clone()))
        .collect();
    keys.iter()
        .map(|k| (a.coefficient(k) - b.coefficient(k)).abs())
        .fold(0.0, f64::max)
}

fn single_pauli_instances(count: usize, seed: u64) -> Vec<(PauliCircuit, PauliOperator)> {
    suite(count, seed)
        .into_iter()
        .flat_map(|(c, h)| {
            h.terms()
                .iter()
                .map(|(_, p)| (c.clone(), p.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let instances = suite(200, 1);
    let worst = instances
        .par_iter()
        .enumerate()
        .map(|(i, (c, h))| {
            let (series, _) = expand(c, h, &ExpansionOptions::default()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
            (0..20)
                .map(|_| {
                    let phi = random_angles(c.n_params(), &mut rng);
                    (series.evaluate(&phi).unwrap() - simulate_loss(c, h, &phi).unwrap()).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs <= 300.0,
        format!("200 circuits x 20 angles, max |engine - oracle| = {worst:.2e}, {secs:.1} s"),
    )
}

fn extraction_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let instances: Vec<Instance> = (0..50).map(|i| small_instance(i, &mut rng)).collect();
    let worst = instances
        .par_iter()
        .map(|(c, h)| {
            let (a, _) = expand(c, h, &ExpansionOptions::default()).unwrap();
            let b = extract_coefficients(c, h, 8).unwrap();
            max_coefficient_gap(&a, &b)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("50 circuits with M <= 8, max coefficient gap {worst:.2e}"),
    )
}

fn invariant_suite() -> Outcome {
    let instances = single_pauli_instances(200, 1);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, (c, p))| {
            let (series, report) = expand_pauli(c, p, &ExpansionOptions::unpruned()).unwrap();
            let m = c.n_params();
            let full = num_bigint::BigUint::from(1u8) << m;
            let mut bad = Vec::new();
            if report.weighted_population() != full {
                bad.push("Delta(M) != 1");
            }
            if report.total_terms() > 1u64 << m {
                bad.push("sum n(m) > 2^M");
            }
            if series.terms().any(|(_, c)| c.abs() != 1.0) {
                bad.push("coefficient not +-1");
            }
            if series.l2_norm_sq() > 1.0 + 1e-12 {
                bad.push("norm > 1");
            }
            (!bad.is_empty()).then(|| format!("#{i}: {}", bad.join(", ")))
        })
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{} single-Pauli expansions, violations: {failures:?}",
            instances.len()
        ),
    )
}

fn pruning_soundness() -> Outcome {
    let instances = suite(200, 1);
    let failures: Vec<usize> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, (c, h))| {
            let (a, ra) = expand(c, h, &ExpansionOptions::default()).unwrap();
            let (b, rb) = expand(c, h, &ExpansionOptions::unpruned()).unwrap();
            (a != b || ra.nodes_visited > rb.nodes_visited).then_some(i)
        })
        .collect();
    outcome(
        failures.is_empty(),
        format!("200 circuits, mismatches at {failures:?}"),
    )
}

/// Standard error of a mean of counts, floored by the Poisson error of the
/// predicted mean so that rare levels with no hits are not judged at zero width.
fn count_se(values: &[f64], predicted: f64) -> f64 {
    let (_, sd) = mean_std(values);
    (sd * sd).max(predicted).sqrt() / (values.len() as f64).sqrt()
}

fn random_statistics() -> Outcome {
    let (n, m, trials) = (8, 14, 400);
    let spec = EnsembleSpec {
        options: ExpansionOptions::unpruned(),
        ..EnsembleSpec::new(EnsembleKind::Random { n, m }, trials, 5)
    };
    let result = pauli_fourier::stats::run_ensemble(&spec).unwrap();
    let reports: Vec<_> = result
        .trials
        .iter()
        .map(|t| t.report.clone().unwrap())
        .collect();
    let predicted = predicted_random_stats(m, n);

    let totals: Vec<f64> = reports.iter().map(|r| r.total_terms() as f64).collect();
    let (mean_total, _) = mean_std(&totals);
    let ratio = mean_total / predicted.n_total;
    let total_ok = (0.5..=2.0).contains(&ratio);

    let mut worst_level = 0.0f64;
    for level in 0..=m {
        let values: Vec<f64> = reports.iter().map(|r| r.l[level] as f64).collect();
        let (mean, _) = mean_std(&values);
        let z = (mean - predicted.l_by_level[level]).abs()
            / count_se(&values, predicted.l_by_level[level]);
        worst_level = worst_level.max(z);
    }

    let nu: Vec<f64> = reports.iter().map(|r| r.nu.iter().sum()).collect();
    let (nu_mean, nu_sd) = mean_std(&nu);
    let nu_target = 2f64.powi(-(n as i32));
    let nu_z = (nu_mean - nu_target).abs() / (nu_sd / (trials as f64).sqrt());

    outcome(
        total_ok && worst_level <= 3.0 && nu_z <= 3.0,
        format!(
            "{trials} trials: mean terms {mean_total:.1} vs {:.1} (ratio {ratio:.2}), worst level z = {worst_level:.2}, sum nu z = {nu_z:.2}",
            predicted.n_total
        ),
    )
}

fn mq_equivalence() -> Outcome {
    let instances: Vec<_> = single_pauli_instances(100, 6)
        .into_iter()
        .take(100)
        .collect();
    let failures: Vec<usize> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, (c, p))| {
            let (series, _) = expand_pauli(c, p, &ExpansionOptions::unpruned()).unwrap();
            let expected: BTreeSet<String> = series
                .terms()
                .map(|(k, _)| leaf_branch_vector(k, c).unwrap().to_string())
                .collect();
            let sys = MqSystem::new(c, p).unwrap();
            let sols = enumerate_solutions(&sys, 1 << 20).unwrap();
            let found: BTreeSet<String> = sols.solutions.iter().map(|k| k.to_string()).collect();
            (sols.overflow || found != expected).then_some(i)
        })
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{} instances, set mismatches at {failures:?}",
            instances.len()
        ),
    )
}

fn mc_estimator() -> Outcome {
    let results: Vec<(u64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|s| {
            let (c, h) = build_random_nonlocal(8, 16, 7000 + s).unwrap();
            let opts = ExpansionOptions::default();
            let (_, r) = expand(&c, &h, &opts).unwrap();
            let est = mc_estimate(&c, &h, &opts, 10_000, s).unwrap();
            (r.nodes_visited, est.mean)
        })
        .collect();
    let within = results
        .iter()
        .filter(|(exact, est)| {
            let exact = *exact as f64;
            *est >= exact / 2.0 && *est <= exact * 2.0
        })
        .count();
    outcome(
        within * 10 >= results.len() * 9,
        format!("{within}/50 estimates within a factor 2 of the exact node count"),
    )
}

fn truncation_bound() -> Outcome {
    let failures: Vec<String> = (0..20u64)
        .into_par_iter()
        .flat_map_iter(|s| {
            let (c, h) = build_random_nonlocal(6, 10, 8000 + s).unwrap();
            let (series, report) = expand(&c, &h, &ExpansionOptions::unpruned()).unwrap();
            (0..=c.n_params())
                .filter_map(|m| {
                    let truncated = series.truncate(m);
                    let (mean, se) = sampled_residual(&c, &h, &truncated, 10_000, s).unwrap();
                    let bound = 1.0 - report.cumulative_delta[m];
                    (mean > bound + 3.0 * se + 1e-12)
                        .then(|| format!("instance {s} m={m}: {mean:.4} > {bound:.4}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    outcome(
        failures.is_empty(),
        format!("20 instances x all m, violations: {failures:?}"),
    )
}

fn finite_difference_gradient_sq(c: &PauliCircuit, h: &Observable, phi: &[f64]) -> f64 {
    let step = 1e-4;
    let mut total = 0.0;
    let mut shifted = phi.to_vec();
    for j in 0..phi.len() {
        shifted[j] = phi[j] + step;
        let up = simulate_loss(c, h, &shifted).unwrap();
        shifted[j] = phi[j] - step;
        let down = simulate_loss(c, h, &shifted).unwrap();
        shifted[j] = phi[j];
        total += ((up - down) / (2.0 * step)).powi(2);
    }
    total
}

fn gradient_variance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut instances = Vec::new();
    while instances.len() < 20 {
        let n = rng.gen_range(2..=4);
        let (c, h) = build_random_nonlocal(n, rng.gen_range(2..=6), rng.gen()).unwrap();
        let (series, _) = expand(&c, &h, &ExpansionOptions::default()).unwrap();
        if series.max_degree() > 0 {
            instances.push((c, h, series));
        }
    }
    let worst = instances
        .par_iter()
        .enumerate()
        .map(|(i, (c, h, series))| {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + i as u64);
            let samples: Vec<f64> = (0..10_000)
                .map(|_| {
                    finite_difference_gradient_sq(c, h, &random_angles(c.n_params(), &mut rng))
                })
                .collect();
            let (mean, sd) = mean_std(&samples);
            let se = sd / (samples.len() as f64).sqrt();
            (mean - series.gradient_variance()).abs() / se.max(1e-12)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 3.0,
        format!("20 instances, worst |formula - MC| = {worst:.2} SE"),
    )
}

fn qaoa_anchors() -> Outcome {
    let nc = light_cone_size(3, 3).unwrap();
    let (c, _) = qaoa_light_cone_instance(3, 3, 0).unwrap();
    let est = qaoa_complexity_estimate(3, 1, 50, 10_000, 10).unwrap();
    outcome(
        nc == 30 && c.n_params() == 225 && (0.3..=2.1).contains(&est.log10_mean),
        format!(
            "N_c(3,3) = {nc}, M = {}, d=3 p=1 log10 nodes = {:.2} +- {:.2}",
            c.n_params(),
            est.log10_mean,
            est.log10_std
        ),
    )
}

fn delayed_branching_instance(a: usize) -> Instance {
    let n = a + 1;
    let mut gens = Vec::new();
    for i in 0..a {
        let mut s = vec!['I'; n];
        s[i] = 'X';
        s[a] = 'X';
        gens.push(PauliOperator::parse(&s.iter().collect::<String>(), None).unwrap());
    }
    for j in 0..a {
        gens.push(PauliOperator::single(n, j, 'X').unwrap());
    }
    let h = PauliOperator::parse(&"Z".repeat(n), None).unwrap();
    (
        PauliCircuit::new(n, gens).unwrap(),
        Observable::from_pauli(h),
    )
}

fn reordering() -> Outcome {
    let instances = suite(50, 11);
    let mismatches: Vec<String> = instances
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (c, h))| {
            let (base, _) = expand(c, h, &ExpansionOptions::default()).unwrap();
            Reorder::ALL
                .into_iter()
                .filter(move |&strategy| {
                    let opts = ExpansionOptions {
                        reorder: strategy,
                        ..Default::default()
                    };
                    let (s, _) = expand(c, h, &opts).unwrap();
                    max_coefficient_gap(&s, &base) > 1e-12
                })
                .map(move |strategy| format!("#{i} {strategy}"))
        })
        .collect();
    let (c, h) = delayed_branching_instance(5);
    let (_, adverse) = expand(&c, &h, &ExpansionOptions::default()).unwrap();
    let opts = ExpansionOptions {
        reorder: Reorder::DelayedBranching,
        ..Default::default()
    };
    let (_, reordered) = expand(&c, &h, &opts).unwrap();
    let gain = adverse.nodes_visited as f64 / reordered.nodes_visited.max(1) as f64;
    outcome(
        mismatches.is_empty() && gain >= 4.0,
        format!(
            "50 circuits x {} strategies, mismatches {mismatches:?}; constructed instance {} -> {} nodes",
            Reorder::ALL.len(),
            adverse.nodes_visited,
            reordered.nodes_visited
        ),
    )
}

fn scaling_slope() -> Outcome {
    let n_list: Vec<usize> = (8..=18).step_by(2).collect();
    let table = scaling_experiment(&n_list, 20, 1_000_000, 12).unwrap();
    let rows: BTreeMap<usize, String> = table
        .rows
        .iter()
        .map(|r| {
            (
                r.n,
                format!(
                    "{:.1}{}",
                    r.ratio,
                    if r.estimated_trials > 0 { "*" } else { "" }
                ),
            )
        })
        .collect();
    outcome(
        (0.3..=0.5).contains(&table.slope),
        format!("slope {:.3}, nodes/term by n: {rows:?}", table.slope),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 coefficient extraction", extraction_equivalence),
        ("3 invariant suite", invariant_suite),
        ("4 pruning soundness", pruning_soundness),
        ("5 random-circuit statistics", random_statistics),
        ("6 MQ equivalence", mq_equivalence),
        ("7 Monte-Carlo estimator", mc_estimator),
        ("8 truncation bound", truncation_bound),
        ("9 gradient variance", gradient_variance),
        ("10 QAOA anchors", qaoa_anchors),
        ("11 reordering", reordering),
        ("12 scaling slope", scaling_slope),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {verdict} ({}; {:.1} s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
