//! Command-line front end: instance generation, matching width, program
//! construction and transformation, certificates, bounds, the separation
//! table and the verification suites.
//!
//! Machine-readable records (JSON lines, or CSV where offered) go to
//! standard output; logs and warnings go to standard error. Exit codes:
//! 0 success, 1 verification failure, 2 usage error, 3 resource limit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use robplab::bounds::{
    certificate_from_nrobp, estimate_containment_prob, f_const, min_t_cover_size,
    nrobp_size_lower_bound, separation_report, RNG_ALGORITHM,
};
use robplab::bp::{build_frontier_obdd, Nrobp};
use robplab::cnf::phi;
use robplab::error::Error;
use robplab::family::{canonical_tree_decomposition, family_graph, validate_td, TdCheck};
use robplab::graph::Graph;
use robplab::io;
use robplab::mw::{
    exact_mw, falsify_lower_bound, heuristic_mw_upper, Permutation, DEFAULT_EXACT_LIMIT,
};
use robplab::transform::{to_arosrn, to_traditional, uniformize};
use robplab::verify::{run_all, VerifyConfig};

const DEFAULT_VC_LIMIT: u32 = 20;

#[derive(Parser)]
#[command(name = "robplab", version, about = "Read-once branching program workbench")]
struct Cli {
    /// Cap on worker threads for parallel sampling (default: rayon's choice).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family instance: graph, CNF, tree decomposition, metadata.
    Gen(GenArgs),
    /// Write the monotone 2-CNF of a graph.
    Phi(PhiArgs),
    /// Matching width: exact subset DP, heuristic search, or falsification.
    Mw(MwArgs),
    /// Build the frontier OBDD of phi(graph) along a variable order.
    BuildObdd(BuildObddArgs),
    /// Transform a program into a uniform one.
    Uniformize(UniformizeArgs),
    /// Convert between the edge-labelled and traditional models.
    Convert(ConvertArgs),
    /// Extract and verify a t-cover certificate from a program.
    Certify(CertifyArgs),
    /// Lower-bound quantities for a graph.
    Bounds(BoundsArgs),
    /// Separation table for the binary-tree path family.
    Separation(SeparationArgs),
    /// Run the property suites of every module.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Treewidth target, at least 3.
    #[arg(short, long)]
    k: u32,
    /// Tree height.
    #[arg(short, long)]
    r: u32,
    /// Output prefix; writes <prefix>.gr, <prefix>.cnf, <prefix>.td, <prefix>.json.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct PhiArgs {
    /// Input graph (.gr).
    #[arg(short, long)]
    graph: PathBuf,
    /// Output DIMACS file; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MwArgs {
    /// Input graph (.gr).
    #[arg(short, long)]
    graph: PathBuf,
    /// Vertex-count cap for the exact subset DP.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    limit: u32,
    /// Use seeded local search instead of the exact DP.
    #[arg(long)]
    heuristic: bool,
    /// Search for a permutation of width below this bound.
    #[arg(long, conflicts_with = "heuristic")]
    falsify: Option<u32>,
    /// Iteration budget for search modes.
    #[arg(long, default_value_t = 50_000)]
    budget: u64,
    /// Seed for search modes (required there, unused by the exact DP).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BuildObddArgs {
    /// Input graph (.gr).
    #[arg(short, long)]
    graph: PathBuf,
    /// Comma-separated vertex order; identity when omitted.
    #[arg(long)]
    order: Option<String>,
    /// Output program file; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UniformizeArgs {
    /// Input program (nrobp format).
    #[arg(short, long)]
    bp: PathBuf,
    /// Output program file; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Emit one record per rewrite step.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertTarget {
    Traditional,
    Arosrn,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input program (nrobp or tnrobp format, detected by header).
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    to: ConvertTarget,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Input program (nrobp format).
    #[arg(short, long)]
    bp: PathBuf,
    /// Graph whose phi the program is expected to compute (.gr).
    #[arg(short, long)]
    graph: PathBuf,
    /// Witness floor.
    #[arg(short, long)]
    t: u32,
    /// Vertex-count cap for minimal-VC enumeration.
    #[arg(long, default_value_t = DEFAULT_VC_LIMIT)]
    vc_limit: u32,
}

#[derive(Args)]
struct BoundsArgs {
    /// Input graph (.gr).
    #[arg(short, long)]
    graph: PathBuf,
    /// Compute the exact matching width and the size bound it implies.
    #[arg(long)]
    exact_mw: bool,
    /// Use a known matching-width value for the size bound.
    #[arg(long, conflicts_with = "exact_mw")]
    mw_value: Option<u32>,
    /// Vertex-count cap for the exact subset DP.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    limit: u32,
    /// Minimum t-cover size for this floor.
    #[arg(short, long)]
    t: Option<u32>,
    /// Monte-Carlo containment estimate for this comma-separated vertex set.
    #[arg(long)]
    sample: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    trials: u32,
    /// Seed for sampling (required with --sample).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SeparationArgs {
    /// Rows r = 1..=r_max.
    #[arg(long, default_value_t = 40)]
    r_max: u32,
    /// Emit CSV instead of JSON lines.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the randomized suites.
    #[arg(long)]
    seed: u64,
    /// Larger catalogs, more trials, bigger budgets.
    #[arg(long)]
    full: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not set thread pool size: {e}");
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::SizeLimit { .. } => 3,
        Error::InvalidParameter(_)
        | Error::Parse { .. }
        | Error::NotAPermutation
        | Error::VertexOutOfRange { .. }
        | Error::VariableOutOfRange { .. } => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Phi(args) => cmd_phi(args),
        Command::Mw(args) => cmd_mw(args),
        Command::BuildObdd(args) => cmd_build_obdd(args),
        Command::Uniformize(args) => cmd_uniformize(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Separation(args) => cmd_separation(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

/// Returns true when the text went to a file (so a record should follow on
/// standard output).
fn emit_or_write(out: &Option<PathBuf>, text: &str) -> Result<bool, Error> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(true)
        }
        None => {
            print!("{text}");
            Ok(false)
        }
    }
}

fn print_record<T: Serialize>(record: &T) {
    println!("{}", serde_json::to_string(record).expect("record serializes"));
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    io::parse_gr(&read_file(path)?)
}

fn load_bp(path: &Path) -> Result<Nrobp, Error> {
    io::parse_bp(&read_file(path)?)
}

fn warn_if_raised(name: &str, value: u32, default: u32) {
    if value > default {
        eprintln!(
            "warning: {name} raised to {value} (default {default}); memory and time grow steeply"
        );
    }
}

#[derive(Serialize)]
struct GenRecord<'a> {
    op: &'a str,
    #[serde(flatten)]
    params: robplab::family::FamilyParams,
    max_degree: u32,
    td_width: u32,
    regime_k_at_least_50: bool,
    regime_r_at_least_5_log_k: bool,
    graph_file: String,
    cnf_file: String,
    td_file: String,
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let fam = family_graph(args.k, args.r)?;
    let g = fam.product.graph();
    let td = canonical_tree_decomposition(&fam.product);
    let width = match validate_td(g, &td) {
        TdCheck::Valid { width } => width,
        TdCheck::Invalid(v) => {
            return Err(Error::InvalidParameter(format!(
                "canonical decomposition failed validation: {v:?}"
            )))
        }
    };
    let f = phi(g)?;
    let with_ext = |ext: &str| {
        let mut p = args.out.clone();
        let name = format!(
            "{}.{ext}",
            p.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        );
        p.set_file_name(name);
        p
    };
    let graph_file = with_ext("gr");
    let cnf_file = with_ext("cnf");
    let td_file = with_ext("td");
    let meta_file = with_ext("json");
    std::fs::write(&graph_file, io::write_gr(g))?;
    std::fs::write(&cnf_file, io::write_dimacs(&f))?;
    std::fs::write(&td_file, io::write_td(&td))?;
    let record = GenRecord {
        op: "gen",
        params: fam.params,
        max_degree: g.max_degree(),
        td_width: width,
        regime_k_at_least_50: args.k >= 50,
        regime_r_at_least_5_log_k: args.r >= 5 * robplab::family::ceil_log2(args.k),
        graph_file: graph_file.display().to_string(),
        cnf_file: cnf_file.display().to_string(),
        td_file: td_file.display().to_string(),
    };
    std::fs::write(
        &meta_file,
        format!("{}\n", serde_json::to_string(&record).expect("serializes")),
    )?;
    print_record(&record);
    Ok(ExitCode::SUCCESS)
}

fn cmd_phi(args: PhiArgs) -> Result<ExitCode, Error> {
    let g = load_graph(&args.graph)?;
    let f = phi(&g)?;
    if emit_or_write(&args.out, &io::write_dimacs(&f))? {
        #[derive(Serialize)]
        struct PhiRecord<'a> {
            op: &'a str,
            variables: u32,
            clauses: usize,
        }
        print_record(&PhiRecord {
            op: "phi",
            variables: f.variable_count(),
            clauses: f.clauses().len(),
        });
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MwRecord<'a> {
    op: &'a str,
    mode: &'a str,
    width: u32,
    permutation: Vec<u32>,
    prefix_lengths: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct FalsifyRecord<'a> {
    op: &'a str,
    bound: u32,
    rng: &'a str,
    seed: u64,
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<u32>,
}

fn cmd_mw(args: MwArgs) -> Result<ExitCode, Error> {
    let g = load_graph(&args.graph)?;
    warn_if_raised("--limit", args.limit, DEFAULT_EXACT_LIMIT);
    if let Some(bound) = args.falsify {
        let seed = args.seed.ok_or_else(|| {
            Error::InvalidParameter("--falsify needs --seed (randomized search)".into())
        })?;
        let record = match falsify_lower_bound(&g, bound, args.budget, seed) {
            Some(sv) => FalsifyRecord {
                op: "falsify",
                bound,
                rng: RNG_ALGORITHM,
                seed,
                found: true,
                width: Some(robplab::mw::permutation_width(&g, &sv)?),
                permutation: Some(sv.into_vec()),
            },
            None => FalsifyRecord {
                op: "falsify",
                bound,
                rng: RNG_ALGORITHM,
                seed,
                found: false,
                permutation: None,
                width: None,
            },
        };
        print_record(&record);
        return Ok(ExitCode::SUCCESS);
    }
    let (mode, seed, result) = if args.heuristic {
        let seed = args.seed.ok_or_else(|| {
            Error::InvalidParameter("--heuristic needs --seed (randomized search)".into())
        })?;
        ("heuristic", Some(seed), heuristic_mw_upper(&g, args.budget, seed))
    } else {
        ("exact", None, exact_mw(&g, args.limit)?)
    };
    print_record(&MwRecord {
        op: "mw",
        mode,
        width: result.width,
        permutation: result.permutation,
        prefix_lengths: result.prefix_lengths,
        rng: seed.map(|_| RNG_ALGORITHM),
        seed,
    });
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BpStats<'a> {
    op: &'a str,
    nodes: u32,
    edges: usize,
    variables: u32,
}

fn cmd_build_obdd(args: BuildObddArgs) -> Result<ExitCode, Error> {
    let g = load_graph(&args.graph)?;
    let order = match &args.order {
        None => Permutation::identity(g.vertex_count()),
        Some(text) => {
            let ids: Vec<u32> = text
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad vertex `{t}` in order")))
                })
                .collect::<Result<_, _>>()?;
            Permutation::new(ids, g.vertex_count())?
        }
    };
    let z = build_frontier_obdd(&g, &order)?;
    if emit_or_write(&args.out, &io::write_bp(&z))? {
        print_record(&BpStats {
            op: "build-obdd",
            nodes: z.node_count(),
            edges: z.edge_count(),
            variables: z.num_vars(),
        });
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_uniformize(args: UniformizeArgs) -> Result<ExitCode, Error> {
    let z = load_bp(&args.bp)?;
    let out = uniformize(&z);
    if args.trace {
        for step in &out.steps {
            print_record(step);
        }
    }
    if emit_or_write(&args.out, &io::write_bp(&out.program))? {
        #[derive(Serialize)]
        struct UniformizeRecord<'a> {
            op: &'a str,
            nodes: u32,
            edges: usize,
            cleaned_edges: usize,
            initial_irregular: usize,
            steps: usize,
        }
        print_record(&UniformizeRecord {
            op: "uniformize",
            nodes: out.program.node_count(),
            edges: out.program.edge_count(),
            cleaned_edges: out.cleaned_edge_count,
            initial_irregular: out.initial_irregular_count,
            steps: out.steps.len(),
        });
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_convert(args: ConvertArgs) -> Result<ExitCode, Error> {
    let text = read_file(&args.input)?;
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('c'))
        .unwrap_or("");
    let kind = header.split_whitespace().next().unwrap_or("");
    let converted = match (kind, args.to) {
        ("nrobp", ConvertTarget::Traditional) => {
            io::write_tbp(&to_traditional(&io::parse_bp(&text)?))
        }
        ("tnrobp", ConvertTarget::Arosrn) => io::write_bp(&to_arosrn(&io::parse_tbp(&text)?)?),
        ("nrobp", ConvertTarget::Arosrn) => {
            return Err(Error::InvalidParameter(
                "input is already in the edge-labelled model".into(),
            ))
        }
        ("tnrobp", ConvertTarget::Traditional) => {
            return Err(Error::InvalidParameter(
                "input is already in the traditional model".into(),
            ))
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unrecognized program header `{kind}`"
            )))
        }
    };
    if emit_or_write(&args.out, &converted)? {
        #[derive(Serialize)]
        struct ConvertRecord<'a> {
            op: &'a str,
            to: &'a str,
        }
        print_record(&ConvertRecord {
            op: "convert",
            to: match args.to {
                ConvertTarget::Traditional => "traditional",
                ConvertTarget::Arosrn => "arosrn",
            },
        });
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode, Error> {
    let z = load_bp(&args.bp)?;
    let g = load_graph(&args.graph)?;
    warn_if_raised("--vc-limit", args.vc_limit, DEFAULT_VC_LIMIT);
    let cert = certificate_from_nrobp(&z, &g, args.t, args.vc_limit)?;
    #[derive(Serialize)]
    struct CertifyRecord<'a> {
        op: &'a str,
        t: u32,
        set_count: usize,
        implied_bound: f64,
        node_count: u32,
        edge_count: usize,
        sets: &'a [Vec<u32>],
        sources: &'a [u32],
    }
    print_record(&CertifyRecord {
        op: "certify",
        t: cert.t,
        set_count: cert.family.len(),
        implied_bound: cert.implied_bound,
        node_count: z.node_count(),
        edge_count: z.edge_count(),
        sets: cert.family.sets(),
        sources: &cert.sources,
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode, Error> {
    let g = load_graph(&args.graph)?;
    warn_if_raised("--limit", args.limit, DEFAULT_EXACT_LIMIT);
    let max_degree = g.max_degree();
    #[derive(Serialize)]
    struct SampleSection {
        set: Vec<u32>,
        trials: u32,
        rng: &'static str,
        seed: u64,
        estimate: f64,
        bound: f64,
    }
    #[derive(Serialize)]
    struct BoundsRecord<'a> {
        op: &'a str,
        vertices: u32,
        edges: usize,
        max_degree: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        f_value: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mw: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        nrobp_lower_bound: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        t: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        min_t_cover: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        cover_bound: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        sample: Option<SampleSection>,
    }
    let f_value = (max_degree >= 1).then(|| f_const(max_degree));
    let mw = if args.exact_mw {
        Some(exact_mw(&g, args.limit)?.width)
    } else {
        args.mw_value
    };
    let nrobp_lower_bound = match mw {
        Some(w) if w > 0 && g.edge_count() == 0 => {
            return Err(Error::InvalidParameter(
                "positive matching width is impossible for an edgeless graph".into(),
            ))
        }
        Some(w) => Some(nrobp_size_lower_bound(&g, w)),
        None => None,
    };
    let (min_t_cover, cover_bound) = match args.t {
        None => (None, None),
        Some(t) => {
            let size = min_t_cover_size(&g, t)?;
            let bound = if t == 0 || max_degree == 0 {
                1.0
            } else {
                2f64.powf(t as f64 / f_const(max_degree))
            };
            (Some(size), Some(bound))
        }
    };
    let sample = match &args.sample {
        None => None,
        Some(text) => {
            let seed = args.seed.ok_or_else(|| {
                Error::InvalidParameter("--sample needs --seed (randomized)".into())
            })?;
            let set: Vec<u32> = text
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad vertex `{t}` in set")))
                })
                .collect::<Result<_, _>>()?;
            let (estimate, bound) = estimate_containment_prob(&g, &set, args.trials, seed)?;
            Some(SampleSection {
                set,
                trials: args.trials,
                rng: RNG_ALGORITHM,
                seed,
                estimate,
                bound,
            })
        }
    };
    print_record(&BoundsRecord {
        op: "bounds",
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        max_degree,
        f_value,
        mw,
        nrobp_lower_bound,
        t: args.t,
        min_t_cover,
        cover_bound,
        sample,
    });
    Ok(ExitCode::SUCCESS)
}

fn cmd_separation(args: SeparationArgs) -> Result<ExitCode, Error> {
    if args.r_max < 1 {
        return Err(Error::InvalidParameter("--r-max must be at least 1".into()));
    }
    let rs: Vec<u32> = (1..=args.r_max).collect();
    let rows = separation_report(&rs)?;
    if args.csv {
        println!("r,n,mw_bound,nrobp_lb,ddnnf_ub,ratio,log2_ratio,k_at_least_50,r_at_least_5_log_k");
        for row in &rows {
            println!(
                "{},{},{},{},{},{},{},{},{}",
                row.r,
                row.n,
                row.mw_bound,
                row.nrobp_lb,
                row.ddnnf_ub,
                row.ratio,
                row.log2_ratio,
                row.regime.k_at_least_50,
                row.regime.r_at_least_5_log_k
            );
        }
    } else {
        for row in &rows {
            print_record(row);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let cfg = if args.full {
        VerifyConfig::full(args.seed)
    } else {
        VerifyConfig::quick(args.seed)
    };
    let outcomes = run_all(&cfg);
    let mut failed = 0;
    for outcome in &outcomes {
        print_record(outcome);
        let status = if outcome.passed { "pass" } else { "FAIL" };
        eprintln!("{status} {} ({} ms)", outcome.check, outcome.millis);
        if let Some(witness) = &outcome.witness {
            eprintln!("     witness: {witness}");
        }
        if !outcome.passed {
            failed += 1;
        }
    }
    eprintln!("{} checks, {failed} failed", outcomes.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
