use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pauli_fourier::circuit::{
    build_hea_blocks, build_hea_brickwall, build_qaoa, random_regular_graph, CircuitFile, Graph,
};
use pauli_fourier::expansion::{mc_estimate, McEstimate};
use pauli_fourier::mq::{enumerate_solutions, MqSystem, SolutionsFile};
use pauli_fourier::oracle::{extract_coefficients, sampled_residual, simulate_loss};
use pauli_fourier::stats::{run_ensemble, EnsembleKind, EnsembleSpec};
use pauli_fourier::{
    expand, ExpansionOptions, FourierSeries, Observable, PauliCircuit, PauliOperator, Reorder,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Guard(_) => 2,
        }
    }
}

impl From<pauli_fourier::Error> for CliError {
    fn from(e: pauli_fourier::Error) -> Self {
        match e {
            pauli_fourier::Error::GuardExceeded(msg) => CliError::Guard(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "pauli-fourier",
    version,
    about = "Fourier series of Clifford+Pauli variational loss functions"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a circuit file.
    Gen(GenArgs),
    /// Expand the loss function into its Fourier series.
    Expand(ExpandArgs),
    /// Evaluate the loss at one angle vector.
    Eval(EvalArgs),
    /// Recover the series from loss values on the 3-point grid.
    Extract(ExtractArgs),
    /// Enumerate contributing branch vectors of the quadratic system.
    Mq(MqArgs),
    /// Monte-Carlo estimate of the expansion node count.
    Estimate(EstimateArgs),
    /// Run an ensemble described by a JSON spec.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Random,
    RandomLocal,
    Qaoa,
    Hea,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Qubits (vertices for QAOA).
    #[arg(long)]
    n: Option<usize>,
    /// Parameters for random circuits.
    #[arg(long)]
    m: Option<usize>,
    /// Generator weight for random-local circuits.
    #[arg(long, default_value_t = 2)]
    weight: usize,
    /// Degree of the random regular QAOA graph.
    #[arg(long)]
    d: Option<usize>,
    /// QAOA layers.
    #[arg(long)]
    p: Option<usize>,
    /// Edge-list file for QAOA instead of a random regular graph.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// HEA brick-wall layers.
    #[arg(long)]
    layers: Option<usize>,
    /// HEA block count (overrides --layers).
    #[arg(long)]
    blocks: Option<usize>,
    /// Qubit of the HEA `Z` observable.
    #[arg(long, default_value_t = 0)]
    qubit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long)]
    max_level: Option<usize>,
    /// Disable X-span pruning.
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value = "none", value_parser = parse_reorder)]
    reorder: Reorder,
}

fn parse_reorder(s: &str) -> Result<Reorder, String> {
    s.parse().map_err(|e: pauli_fourier::Error| e.to_string())
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Deepen the level cap until the residual bound is at most this.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Abort after creating this many nodes.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Series JSON (standard output if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-level CSV of the series.
    #[arg(long)]
    levels_csv: Option<PathBuf>,
    /// Also estimate ⟨|F − series|²⟩ by simulation at this many random angles.
    #[arg(long)]
    sampled_residual: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Comma-separated angles, one per generator.
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    /// Also simulate the loss with the statevector oracle.
    #[arg(long)]
    oracle: bool,
    /// Evaluate this series instead of expanding the circuit.
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value_t = pauli_fourier::oracle::DEFAULT_MAX_GRID_PARAMS)]
    max_params: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MqArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    /// Hamiltonian term to use when there are several.
    #[arg(long)]
    term: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the system in algebraic normal form.
    #[arg(long)]
    anf: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregated means and deviations as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn check_input(path: &Path) -> CliResult<()> {
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "input file {} does not exist",
            path.display()
        )));
    }
    Ok(())
}

fn check_output(path: &Option<PathBuf>) -> CliResult<()> {
    if let Some(p) = path {
        let parent = p
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(CliError::Usage(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        out.write_all(b"\n")
                    }
                })
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn load_circuit(path: &Path) -> CliResult<(PauliCircuit, Observable)> {
    let text = read(path)?;
    let file = CircuitFile::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(file.into_parts()?)
}

fn engine_options(e: &EngineArgs) -> ExpansionOptions {
    ExpansionOptions {
        prune_by_expectation: !e.no_prune,
        max_level: e.max_level,
        reorder: e.reorder,
        ..Default::default()
    }
}

fn require(v: Option<usize>, flag: &str, kind: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --kind {kind}")))
}

fn gen(args: &GenArgs) -> CliResult<()> {
    check_output(&args.out)?;
    if let Some(g) = &args.graph {
        check_input(g)?;
    }
    let (circuit, h) = match args.kind {
        Kind::Random | Kind::RandomLocal => {
            let n = require(args.n, "n", "random")?;
            let m = require(args.m, "m", "random")?;
            let kind = match args.kind {
                Kind::Random => EnsembleKind::Random { n, m },
                _ => EnsembleKind::RandomLocal {
                    n,
                    m,
                    weight: args.weight,
                },
            };
            EnsembleSpec::new(kind, 1, args.seed).build(args.seed)?
        }
        Kind::Qaoa => {
            let p = require(args.p, "p", "qaoa")?;
            let graph = match &args.graph {
                Some(path) => Graph::parse_edge_list(&read(path)?, args.n)?,
                None => {
                    let n = require(args.n, "n", "qaoa")?;
                    let d = require(args.d, "d", "qaoa")?;
                    random_regular_graph(n, d, args.seed)?
                }
            };
            let (c, obs) = build_qaoa(&graph, p)?;
            let terms = obs.iter().flat_map(|o| o.terms().iter().cloned()).collect();
            (c.clone(), Observable::new(c.n_qubits(), terms)?)
        }
        Kind::Hea => {
            let n = require(args.n, "n", "hea")?;
            let form = match (args.blocks, args.layers) {
                (Some(b), _) => build_hea_blocks(n, b)?,
                (None, Some(l)) => build_hea_brickwall(n, l)?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "--layers or --blocks is required for --kind hea".into(),
                    ))
                }
            };
            if args.qubit >= n {
                return Err(CliError::Usage(format!(
                    "--qubit {} outside 0..{n}",
                    args.qubit
                )));
            }
            let z = Observable::from_pauli(PauliOperator::single(n, args.qubit, 'Z')?);
            let h = form.observable(&z)?;
            (form.circuit, h)
        }
    };
    write(&args.out, &CircuitFile::new(&circuit, &h).to_json())
}

fn expand_cmd(args: &ExpandArgs) -> CliResult<()> {
    check_input(&args.circuit)?;
    for out in [&args.out, &args.report, &args.levels_csv] {
        check_output(out)?;
    }
    if let Some(eps) = args.epsilon {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(CliError::Usage(format!("--epsilon {eps} outside (0, 1]")));
        }
    }
    let (circuit, h) = load_circuit(&args.circuit)?;
    let opts = ExpansionOptions {
        target_residual: args.epsilon,
        node_budget: Some(args.budget),
        ..engine_options(&args.engine)
    };
    let (series, report) = expand(&circuit, &h, &opts)?;
    write(&args.out, &series.to_json())?;
    if args.report.is_some() {
        let mut value = serde_json::to_value(&report).expect("report serializes");
        if let Some(k) = args.sampled_residual {
            let (mean, se) = sampled_residual(&circuit, &h, &series, k, args.seed)?;
            value["sampled_residual"] =
                serde_json::json!({ "mean": mean, "std_error": se, "samples": k });
        }
        let text = serde_json::to_string_pretty(&value).expect("json value serializes");
        write(&args.report, &text)?;
    }
    if args.levels_csv.is_some() {
        write(&args.levels_csv, &series.level_stats().to_csv())?;
    }
    eprintln!(
        "{} terms, {} nodes visited, residual bound {}",
        series.len(),
        report.nodes_visited,
        report.residual_bound
    );
    Ok(())
}

fn parse_phi(text: &str) -> CliResult<Vec<f64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--phi: cannot parse {s:?} as a number")))
        })
        .collect()
}

fn eval(args: &EvalArgs) -> CliResult<()> {
    check_input(&args.circuit)?;
    if let Some(s) = &args.series {
        check_input(s)?;
    }
    let phi = parse_phi(&args.phi)?;
    let (circuit, h) = load_circuit(&args.circuit)?;
    if phi.len() != circuit.n_params() {
        return Err(CliError::Usage(format!(
            "--phi has {} angles but the circuit has {} parameters",
            phi.len(),
            circuit.n_params()
        )));
    }
    let series = match &args.series {
        Some(path) => FourierSeries::from_json(&read(path)?)?,
        None => {
            let opts = ExpansionOptions {
                node_budget: Some(args.budget),
                ..Default::default()
            };
            expand(&circuit, &h, &opts)?.0
        }
    };
    let mut text = format!("engine {:.15e}\n", series.evaluate(&phi)?);
    if args.oracle {
        text += &format!("oracle {:.15e}\n", simulate_loss(&circuit, &h, &phi)?);
    }
    write(&None, &text)
}

fn extract(args: &ExtractArgs) -> CliResult<()> {
    check_input(&args.circuit)?;
    check_output(&args.out)?;
    let (circuit, h) = load_circuit(&args.circuit)?;
    let series = extract_coefficients(&circuit, &h, args.max_params)?;
    write(&args.out, &series.to_json())
}

fn mq(args: &MqArgs) -> CliResult<()> {
    check_input(&args.circuit)?;
    check_output(&args.out)?;
    check_output(&args.anf)?;
    let (circuit, h) = load_circuit(&args.circuit)?;
    let term = match (args.term, h.len()) {
        (Some(t), len) if t < len => t,
        (Some(t), len) => return Err(CliError::Usage(format!("--term {t} outside 0..{len}"))),
        (None, 1) => 0,
        (None, len) => {
            return Err(CliError::Usage(format!(
                "the Hamiltonian has {len} terms; choose one with --term"
            )))
        }
    };
    let (coeff, pauli) = &h.terms()[term];
    let sys = MqSystem::new(&circuit, pauli)?;
    let solutions = enumerate_solutions(&sys, args.cap)?;
    if args.anf.is_some() {
        write(&args.anf, &sys.to_anf())?;
    }
    let file = SolutionsFile::new(circuit.n_params(), &solutions);
    write(
        &args.out,
        &serde_json::to_string_pretty(&file).expect("solutions serialize"),
    )?;
    if solutions.overflow {
        eprintln!(
            "warning: more than {} solutions; output truncated",
            args.cap
        );
    }
    eprintln!(
        "{} solutions for term {term} (coefficient {coeff})",
        solutions.solutions.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct EstimateOutput {
    n_params: usize,
    #[serde(flatten)]
    estimate: McEstimate,
    seed: u64,
}

fn estimate(args: &EstimateArgs) -> CliResult<()> {
    check_input(&args.circuit)?;
    check_output(&args.out)?;
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let (circuit, h) = load_circuit(&args.circuit)?;
    let est = mc_estimate(
        &circuit,
        &h,
        &engine_options(&args.engine),
        args.samples,
        args.seed,
    )?;
    let out = EstimateOutput {
        n_params: circuit.n_params(),
        estimate: est,
        seed: args.seed,
    };
    write(
        &args.out,
        &serde_json::to_string_pretty(&out).expect("estimate serializes"),
    )
}

fn stats(args: &StatsArgs) -> CliResult<()> {
    check_input(&args.spec)?;
    check_output(&args.out)?;
    check_output(&args.summary)?;
    let spec = EnsembleSpec::from_json(&read(&args.spec)?)?;
    let result = run_ensemble(&spec)?;
    write(&args.out, &result.to_csv())?;
    if args.summary.is_some() {
        let summary = serde_json::json!({
            "n_mean": result.n_mean,
            "l_mean": result.l_mean,
            "l_std": result.l_std,
            "nu_mean": result.nu_mean,
            "nu_std": result.nu_std,
            "log10_nodes_mean": result.log10_nodes_mean,
            "log10_nodes_std": result.log10_nodes_std,
            "estimated_trials": result.trials.iter().filter(|t| t.estimated).count(),
        });
        write(
            &args.summary,
            &serde_json::to_string_pretty(&summary).expect("summary serializes"),
        )?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Expand(a) => expand_cmd(a),
        Command::Eval(a) => eval(a),
        Command::Extract(a) => extract(a),
        Command::Mq(a) => mq(a),
        Command::Estimate(a) => estimate(a),
        Command::Stats(a) => stats(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout(), "{}", e.render());
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            let body = rendered.trim_start_matches("error: ");
            eprint!("usage error: {body}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
