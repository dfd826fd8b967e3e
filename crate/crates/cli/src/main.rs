//! `sseplab` — command-line front end.
//!
//! Exit codes: 0 success, 2 validation/input error, 3 solver non-convergence.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use sseplab_cli::io::{self, fmt_f64, IoError};
use sseplab_cli::suites;
use sseplab_core::bernoulli::{
    feynman_expansion_w, graph_expansion_w, noncoincident_cumulants,
    reconstruct_coincident_cumulant, taylor_log_z_series, BernoulliModel, ExpansionSeries,
};
use sseplab_core::cumulants::MomentTable;
use sseplab_core::graphs::{chromatic_polynomial, enumerate_chromatic_graphs, mu_graph, SimpleGraph};
use sseplab_core::grid::GridFunction;
use sseplab_core::partitions::{enumerate_noncrossing, enumerate_partitions};
use sseplab_core::ssep::{
    equivalence_report, exact_steady_state, f0_ssep, f_ssep_free, psi_sharp, psi_ssep,
    rate_function_ssep, simulate_ssep, steady_mean_profile, OrderedPoints,
};
use sseplab_core::Error;

#[derive(Parser)]
#[command(name = "sseplab", version, about = "Partition-lattice cumulants, free probability, and SSEP large deviations")]
struct Cli {
    /// Write output here instead of stdout (atomic: temp file + rename)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate set partitions of {1..n}
    Partitions {
        #[arg(long)]
        n: usize,
        /// Restrict to non-crossing partitions
        #[arg(long)]
        noncrossing: bool,
    },
    /// Graph combinatorics
    Graphs {
        #[command(subcommand)]
        command: GraphsCommand,
    },
    /// Joint cumulants of a finite Bernoulli model
    Cumulants {
        /// Model JSON ({"sites":N,"probs":[...]} or {"independent":[...]})
        #[arg(long)]
        model: PathBuf,
        /// Site index sequence, possibly with repeats, e.g. 1,1,2
        #[arg(long, value_delimiter = ',')]
        sites: Option<Vec<usize>>,
    },
    /// Truncated expansion of log Z in the variables e_i = e^{h_i} - 1
    Expand {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Route::Graph)]
        route: Route,
        /// Evaluate the series at e = (e_1,...,e_N)
        #[arg(long, value_delimiter = ',')]
        eval: Option<Vec<f64>>,
    },
    /// Scaled free energy F[h] of the SSEP via the variational principle
    FreeEnergy(ProfileArgs),
    /// Large-deviation rate function I[n] of the SSEP density profile
    Rate(ProfileArgs),
    /// SSEP-specific operations
    Ssep {
        #[command(subcommand)]
        command: SsepCommand,
    },
    /// Run the verification suites
    Verify {
        /// `all`, a suite number 1..9, or a suite name
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 20260823)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GraphsCommand {
    /// Chromatic polynomial and Möbius number of a simple graph
    Chromatic {
        #[arg(long)]
        vertices: usize,
        /// Edge list like 1-2,2-3,1-3
        #[arg(long, default_value = "")]
        edges: String,
    },
    /// Enumerate connected chromatic-class bipartite graphs
    Enumerate {
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        max_edges: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Route {
    Graph,
    Feynman,
    Taylor,
}

#[derive(Args)]
struct ProfileArgs {
    /// Profile CSV with `x,value` header
    #[arg(long, conflicts_with = "constant")]
    profile: Option<PathBuf>,
    /// Constant profile value (used with --m)
    #[arg(long)]
    constant: Option<f64>,
    /// Grid size for --constant
    #[arg(long, default_value_t = 512)]
    m: usize,
}

#[derive(Subcommand)]
enum SsepCommand {
    /// Free cumulant psi#(x_1,...,x_n) of indicator functions
    Psi {
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
        /// Cyclic-class sum psi^ssep instead of the ordered psi#
        #[arg(long)]
        cyclic: bool,
    },
    /// Generating function F0[a] from the integral representation
    F0 {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Rate function (alias of the top-level `rate`)
    Rate(ProfileArgs),
    /// Gillespie simulation of the open chain
    Simulate {
        #[arg(long)]
        sites: usize,
        #[arg(long, default_value_t = 1e6)]
        tmax: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact steady state of the open chain
    Exact {
        #[arg(long)]
        sites: usize,
    },
    /// Free-vs-classical equivalence report on standard profiles
    Verify {
        #[arg(long, default_value = "equivalence")]
        suite: String,
        #[arg(long, default_value_t = 512)]
        m: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Validation-style failures exit 2; non-convergence exits 3.
fn exit_code_for(e: &CliError) -> u8 {
    match e {
        CliError::Io(_) => 2,
        CliError::Core(Error::NoConvergence { .. }) => 3,
        CliError::Core(_) => 2,
    }
}

#[derive(Debug)]
enum CliError {
    Io(IoError),
    Core(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Io(IoError(msg.into()))
}

type CliResult = Result<ExitCode, CliError>;

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Partitions { n, noncrossing } => cmd_partitions(cli, *n, *noncrossing),
        Command::Graphs { command } => match command {
            GraphsCommand::Chromatic { vertices, edges } => cmd_chromatic(cli, *vertices, edges),
            GraphsCommand::Enumerate { sites, max_edges } => {
                cmd_enumerate_graphs(cli, *sites, *max_edges)
            }
        },
        Command::Cumulants { model, sites } => cmd_cumulants(cli, model, sites.as_deref()),
        Command::Expand { model, degree, route, eval } => {
            cmd_expand(cli, model, *degree, *route, eval.as_deref())
        }
        Command::FreeEnergy(p) => cmd_free_energy(cli, p),
        Command::Rate(p) => cmd_rate(cli, p),
        Command::Ssep { command } => match command {
            SsepCommand::Psi { points, cyclic } => cmd_psi(cli, points, *cyclic),
            SsepCommand::F0 { profile } => cmd_f0(cli, profile),
            SsepCommand::Rate(p) => cmd_rate(cli, p),
            SsepCommand::Simulate { sites, tmax, seed } => cmd_simulate(cli, *sites, *tmax, *seed),
            SsepCommand::Exact { sites } => cmd_exact(cli, *sites),
            SsepCommand::Verify { suite, m } => cmd_ssep_verify(cli, suite, *m),
        },
        Command::Verify { suite, seed } => cmd_verify(cli, suite, *seed),
    }
}

fn emit(cli: &Cli, content: &str) -> CliResult {
    io::emit(cli.output.as_deref(), content)?;
    Ok(ExitCode::SUCCESS)
}

fn require_json(cli: &Cli, what: &str) -> Result<(), CliError> {
    if cli.format == Format::Csv {
        return Err(validation(format!("{what} has no CSV form; use --format json")));
    }
    Ok(())
}

// --- subcommands ----------------------------------------------------------

fn cmd_partitions(cli: &Cli, n: usize, noncrossing: bool) -> CliResult {
    let parts = if noncrossing { enumerate_noncrossing(n)? } else { enumerate_partitions(n)? };
    match cli.format {
        Format::Json => {
            let mut out = String::new();
            let _ = writeln!(out, "{{");
            let _ = writeln!(out, "  \"n\": {n},");
            let _ = writeln!(out, "  \"noncrossing\": {noncrossing},");
            let _ = writeln!(out, "  \"count\": {},", parts.len());
            let _ = writeln!(out, "  \"partitions\": [");
            for (i, p) in parts.iter().enumerate() {
                let blocks: Vec<String> = p
                    .blocks()
                    .iter()
                    .map(|b| format!("[{}]", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                let comma = if i + 1 < parts.len() { "," } else { "" };
                let _ = writeln!(out, "    [{}]{comma}", blocks.join(","));
            }
            let _ = writeln!(out, "  ]");
            let _ = writeln!(out, "}}");
            emit(cli, &out)
        }
        Format::Csv => {
            let mut out = String::from("partition\n");
            for p in &parts {
                let blocks: Vec<String> = p
                    .blocks()
                    .iter()
                    .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                    .collect();
                let _ = writeln!(out, "{}", blocks.join("|"));
            }
            emit(cli, &out)
        }
    }
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| validation(format!("edge `{tok}`: expected `a-b`")))?;
            let a: usize =
                a.trim().parse().map_err(|e| validation(format!("edge `{tok}`: {e}")))?;
            let b: usize =
                b.trim().parse().map_err(|e| validation(format!("edge `{tok}`: {e}")))?;
            Ok((a, b))
        })
        .collect()
}

fn cmd_chromatic(cli: &Cli, vertices: usize, edges: &str) -> CliResult {
    require_json(cli, "chromatic output")?;
    let g = SimpleGraph::new(vertices, parse_edges(edges)?)?;
    let chi = chromatic_polynomial(&g)?;
    let coeffs: Vec<String> = chi.coeffs().iter().map(BigInt::to_string).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"vertices\": {vertices},");
    let _ = writeln!(out, "  \"edges\": {},", g.edge_count());
    let _ = writeln!(out, "  \"connected\": {},", g.is_connected());
    let _ = writeln!(out, "  \"chromatic_coeffs\": [{}],", coeffs.join(","));
    if g.is_connected() {
        let _ = writeln!(out, "  \"mu\": {}", mu_graph(&g)?);
    } else {
        let _ = writeln!(out, "  \"mu\": null");
    }
    let _ = writeln!(out, "}}");
    emit(cli, &out)
}

fn cmd_enumerate_graphs(cli: &Cli, sites: usize, max_edges: usize) -> CliResult {
    require_json(cli, "graph list")?;
    let graphs = enumerate_chromatic_graphs(sites, max_edges)?;
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"sites\": {sites},");
    let _ = writeln!(out, "  \"max_edges\": {max_edges},");
    let _ = writeln!(out, "  \"count\": {},", graphs.len());
    let _ = writeln!(out, "  \"graphs\": [");
    for (i, g) in graphs.iter().enumerate() {
        let whites: Vec<String> = g.white_tags().iter().map(|t| t.to_string()).collect();
        let edges: Vec<String> =
            g.edges().iter().map(|&(b, w)| format!("[{b},{w}]")).collect();
        let comma = if i + 1 < graphs.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"blacks\": {}, \"whites\": [{}], \"edges\": [{}]}}{comma}",
            g.black_count(),
            whites.join(","),
            edges.join(",")
        );
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    emit(cli, &out)
}

fn cmd_cumulants(cli: &Cli, model_path: &PathBuf, sites: Option<&[usize]>) -> CliResult {
    let model = io::read_model(model_path)?;
    let table = noncoincident_cumulants(&model);
    if let Some(seq) = sites {
        require_json(cli, "single cumulant")?;
        let value = reconstruct_coincident_cumulant(&table, seq)?;
        let seq_s: Vec<String> = seq.iter().map(|x| x.to_string()).collect();
        return emit(
            cli,
            &format!("{{\"sites\": [{}], \"cumulant\": {}}}\n", seq_s.join(","), fmt_f64(value)),
        );
    }
    // all non-coincident cumulants, by subset
    let n = model.n();
    let mut rows: Vec<(Vec<usize>, f64)> = Vec::new();
    for mask in 1usize..1 << n {
        let subset: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        rows.push((subset.clone(), table.get(&subset)?));
    }
    rows.sort_by_key(|(s, _)| (s.len(), s.clone()));
    match cli.format {
        Format::Json => {
            let mut out = String::new();
            let _ = writeln!(out, "{{");
            let _ = writeln!(out, "  \"sites\": {n},");
            let _ = writeln!(out, "  \"cumulants\": [");
            for (i, (s, v)) in rows.iter().enumerate() {
                let s_s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                let comma = if i + 1 < rows.len() { "," } else { "" };
                let _ = writeln!(
                    out,
                    "    {{\"sites\": [{}], \"value\": {}}}{comma}",
                    s_s.join(","),
                    fmt_f64(*v)
                );
            }
            let _ = writeln!(out, "  ]");
            let _ = writeln!(out, "}}");
            emit(cli, &out)
        }
        Format::Csv => {
            let mut out = String::from("sites,value\n");
            for (s, v) in &rows {
                let s_s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "{},{}", s_s.join(" "), fmt_f64(*v));
            }
            emit(cli, &out)
        }
    }
}

fn expansion_for(
    model: &BernoulliModel,
    degree: usize,
    route: Route,
) -> Result<ExpansionSeries<f64>, CliError> {
    let n = model.n();
    Ok(match route {
        Route::Graph => {
            let t = noncoincident_cumulants(model);
            graph_expansion_w(&t, n, degree)?
        }
        Route::Feynman => {
            let t = noncoincident_cumulants(model);
            feynman_expansion_w(&t, n, degree)?
        }
        Route::Taylor => {
            let mut m = MomentTable::new(n);
            fill_moments(model, &mut m, &mut Vec::new(), 1, degree);
            taylor_log_z_series(&m, n, degree)?
        }
    })
}

fn fill_moments(
    model: &BernoulliModel,
    m: &mut MomentTable<f64>,
    cur: &mut Vec<usize>,
    start: usize,
    left: usize,
) {
    if !cur.is_empty() {
        let mut distinct = cur.clone();
        distinct.dedup();
        m.set(cur, model.subset_moment(&distinct));
    }
    if left == 0 {
        return;
    }
    for i in start..=model.n() {
        cur.push(i);
        fill_moments(model, m, cur, i, left - 1);
        cur.pop();
    }
}

fn cmd_expand(
    cli: &Cli,
    model_path: &PathBuf,
    degree: usize,
    route: Route,
    eval: Option<&[f64]>,
) -> CliResult {
    let model = io::read_model(model_path)?;
    let series = expansion_for(&model, degree, route)?;
    let terms: Vec<(&Vec<u8>, &f64)> = series.terms().collect();
    let value = eval.map(|e| series.eval(e)).transpose()?;
    match cli.format {
        Format::Json => {
            let mut out = String::new();
            let _ = writeln!(out, "{{");
            let _ = writeln!(out, "  \"sites\": {},", model.n());
            let _ = writeln!(out, "  \"degree\": {degree},");
            let _ = writeln!(out, "  \"terms\": [");
            for (i, (mono, c)) in terms.iter().enumerate() {
                let mono_s: Vec<String> = mono.iter().map(|e| e.to_string()).collect();
                let comma = if i + 1 < terms.len() { "," } else { "" };
                let _ = writeln!(
                    out,
                    "    {{\"monomial\": [{}], \"coeff\": {}}}{comma}",
                    mono_s.join(","),
                    fmt_f64(**c)
                );
            }
            let _ = writeln!(out, "  ],");
            match value {
                Some(v) => {
                    let _ = writeln!(out, "  \"value\": {}", fmt_f64(v));
                }
                None => {
                    let _ = writeln!(out, "  \"value\": null");
                }
            }
            let _ = writeln!(out, "}}");
            emit(cli, &out)
        }
        Format::Csv => {
            let mut out = String::from("monomial,coeff\n");
            for (mono, c) in &terms {
                let mono_s: Vec<String> = mono.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "{},{}", mono_s.join(" "), fmt_f64(**c));
            }
            emit(cli, &out)
        }
    }
}

fn load_profile(p: &ProfileArgs) -> Result<GridFunction, CliError> {
    match (&p.profile, p.constant) {
        (Some(path), None) => Ok(io::read_profile(path)?),
        (None, Some(c)) => Ok(GridFunction::constant(p.m, c)?),
        (None, None) => Err(validation("provide --profile or --constant")),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn solution_json(label: &str, value: f64, sol: &sseplab_core::scaling::VariationalSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"{label}\": {},", fmt_f64(value));
    let _ = writeln!(out, "  \"iterations\": {},", sol.iterations);
    let _ = writeln!(out, "  \"residual\": {},", fmt_f64(sol.residual));
    let _ = writeln!(out, "  \"g\": [{}],", grid_list(&sol.g));
    let _ = writeln!(out, "  \"q\": [{}]", grid_list(&sol.q));
    let _ = writeln!(out, "}}");
    out
}

fn grid_list(g: &GridFunction) -> String {
    g.values().iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

fn cmd_free_energy(cli: &Cli, p: &ProfileArgs) -> CliResult {
    let h = load_profile(p)?;
    let sol = f_ssep_free(&h)?;
    match cli.format {
        Format::Json => emit(cli, &solution_json("f", sol.f_value, &sol)),
        Format::Csv => emit(cli, &io::profile_csv(&sol.g)),
    }
}

fn cmd_rate(cli: &Cli, p: &ProfileArgs) -> CliResult {
    let n = load_profile(p)?;
    let j = rate_function_ssep(&n)?;
    match cli.format {
        Format::Json => emit(cli, &format!("{{\"rate\": {}}}\n", fmt_f64(j))),
        Format::Csv => emit(cli, &format!("rate\n{}\n", fmt_f64(j))),
    }
}

fn cmd_psi(cli: &Cli, points: &[f64], cyclic: bool) -> CliResult {
    let value = if cyclic {
        psi_ssep(&OrderedPoints::new(points.to_vec())?)?
    } else {
        psi_sharp(points)?
    };
    let kind = if cyclic { "psi_ssep" } else { "psi_sharp" };
    match cli.format {
        Format::Json => {
            let pts: Vec<String> = points.iter().map(|&x| fmt_f64(x)).collect();
            emit(
                cli,
                &format!("{{\"{kind}\": {}, \"points\": [{}]}}\n", fmt_f64(value), pts.join(",")),
            )
        }
        Format::Csv => emit(cli, &format!("{kind}\n{}\n", fmt_f64(value))),
    }
}

fn cmd_f0(cli: &Cli, profile: &PathBuf) -> CliResult {
    let a = io::read_profile(profile)?;
    let v = f0_ssep(&a)?;
    match cli.format {
        Format::Json => emit(cli, &format!("{{\"f0\": {}}}\n", fmt_f64(v))),
        Format::Csv => emit(cli, &format!("f0\n{}\n", fmt_f64(v))),
    }
}

fn cmd_simulate(cli: &Cli, sites: usize, tmax: f64, seed: u64) -> CliResult {
    let stats = simulate_ssep(sites, tmax, seed)?;
    match cli.format {
        Format::Json => {
            let means: Vec<String> = stats.means.iter().map(|&v| fmt_f64(v)).collect();
            let sems: Vec<String> = stats.sems.iter().map(|&v| fmt_f64(v)).collect();
            let mut out = String::new();
            let _ = writeln!(out, "{{");
            let _ = writeln!(out, "  \"sites\": {},", stats.sites);
            let _ = writeln!(out, "  \"t_total\": {},", fmt_f64(stats.t_total));
            let _ = writeln!(out, "  \"means\": [{}],", means.join(","));
            let _ = writeln!(out, "  \"sems\": [{}]", sems.join(","));
            let _ = writeln!(out, "}}");
            emit(cli, &out)
        }
        Format::Csv => {
            let mut out = String::from("site,mean,sem\n");
            for i in 0..stats.sites {
                let _ =
                    writeln!(out, "{},{},{}", i + 1, fmt_f64(stats.means[i]), fmt_f64(stats.sems[i]));
            }
            emit(cli, &out)
        }
    }
}

fn cmd_exact(cli: &Cli, sites: usize) -> CliResult {
    let pi = exact_steady_state(sites)?;
    let rho = steady_mean_profile(&pi, sites);
    match cli.format {
        Format::Json => {
            let rho_s: Vec<String> = rho.iter().map(|&v| fmt_f64(v)).collect();
            emit(
                cli,
                &format!("{{\"sites\": {sites}, \"density\": [{}]}}\n", rho_s.join(",")),
            )
        }
        Format::Csv => {
            let mut out = String::from("site,density\n");
            for (i, &v) in rho.iter().enumerate() {
                let _ = writeln!(out, "{},{}", i + 1, fmt_f64(v));
            }
            emit(cli, &out)
        }
    }
}

fn cmd_ssep_verify(cli: &Cli, suite: &str, m: usize) -> CliResult {
    if suite != "equivalence" {
        return Err(validation(format!("unknown ssep suite `{suite}` (expected `equivalence`)")));
    }
    require_json(cli, "equivalence report")?;
    let profiles = vec![
        ("0.5", GridFunction::constant(m, 0.5)?),
        ("1", GridFunction::constant(m, 1.0)?),
        ("x(1-x)", GridFunction::from_fn(m, |x| x * (1.0 - x))?),
        ("sin(pi x)", GridFunction::from_fn(m, |x| (std::f64::consts::PI * x).sin())?),
    ];
    let rows = equivalence_report(&profiles.iter().map(|(_, h)| h.clone()).collect::<Vec<_>>());
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"m\": {m},");
    let _ = writeln!(out, "  \"profiles\": [");
    for (i, ((label, _), row)) in profiles.iter().zip(&rows).enumerate() {
        let comma = if i + 1 < rows.len() { "," } else { "" };
        match &row.error {
            Some(e) => {
                let _ = writeln!(out, "    {{\"h\": \"{label}\", \"error\": {:?}}}{comma}", e);
            }
            None => {
                let _ = writeln!(
                    out,
                    "    {{\"h\": \"{label}\", \"f_free\": {}, \"f_classical\": {}, \"abs_diff\": {}, \"bridge_derivative\": {}, \"bridge_integral\": {}}}{comma}",
                    fmt_f64(row.f_free),
                    fmt_f64(row.f_classical),
                    fmt_f64(row.abs_diff),
                    fmt_f64(row.bridge_derivative),
                    fmt_f64(row.bridge_integral),
                );
            }
        }
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    emit(cli, &out)
}

fn cmd_verify(cli: &Cli, suite: &str, seed: u64) -> CliResult {
    require_json(cli, "verification report")?;
    let results = match suite {
        "all" => suites::run_all(seed),
        s => {
            let id = match s.parse::<usize>() {
                Ok(id) if (1..=9).contains(&id) => id,
                _ => match suites::SUITE_NAMES.iter().position(|&n| n == s) {
                    Some(pos) => pos + 1,
                    None => {
                        return Err(validation(format!(
                            "unknown suite `{s}` (use `all`, 1..9, or one of {:?})",
                            suites::SUITE_NAMES
                        )))
                    }
                },
            };
            vec![suites::run_suite(id, seed)]
        }
    };
    let mut all_passed = true;
    for r in &results {
        println!("{}", r.summary_line());
        for d in &r.details {
            println!("    {d}");
        }
        all_passed &= r.passed;
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} suites passed", results.len());
    if let Some(path) = &cli.output {
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"seed\": {seed},");
        let _ = writeln!(out, "  \"suites\": [");
        for (i, r) in results.iter().enumerate() {
            let comma = if i + 1 < results.len() { "," } else { "" };
            let _ = writeln!(
                out,
                "    {{\"id\": {}, \"name\": \"{}\", \"passed\": {}}}{comma}",
                r.id, r.name, r.passed
            );
        }
        let _ = writeln!(out, "  ]");
        let _ = writeln!(out, "}}");
        io::write_atomic(path, &out)?;
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
