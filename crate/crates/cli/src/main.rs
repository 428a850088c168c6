mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use socmine::analysis::{
    baseline_pairwise, mutual_information, summarize, top_relations, write_mi_csv,
    write_summary_table, write_top_relations_csv, Smoothing, TermCategoryTable,
};
use socmine::corpus::{generate_corpus, CorpusSpec, EdgeModel};
use socmine::engine::{self, mine_patterns, ExpansionMode, RunConfig, RunReport};
use socmine::extract::{read_patterns, write_patterns, Pattern, PatternSet};
use socmine::graph::{ExportFormat, SocialGraph};
use socmine::search::{
    LiveBackend, LiveConfig, QueryCache, ReplayBackend, RetryPolicy, SearchBackend, SearchGateway,
    DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT, DEFAULT_TOP_K,
};
use socmine::{Entity, EntityCatalog};

use config::ConfigFile;

#[derive(Parser)]
#[command(name = "socmine", version, about = "Build social graphs from search-result snippets")]
struct Cli {
    /// Flat key = value file; flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a graph from seed entities.
    Extract(ExtractArgs),
    /// Mine connector phrases from pair queries over an existing graph.
    MinePatterns(MineArgs),
    /// Pairwise co-occurrence baseline.
    Baseline(BaselineArgs),
    /// Distributions, top relations and pattern-term MI.
    Analyze(AnalyzeArgs),
    /// Write a synthetic corpus with its ground-truth graph.
    MakeCorpus(CorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Bf,
    Prio,
    PatternIter,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Backend {
    Replay,
    Live,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Report {
    Dist,
    Top,
    Mi,
    All,
}

#[derive(Args)]
struct SourceArgs {
    /// Entity catalog, one name per line.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Snippet corpus for the replay backend.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Directory for cached query results, reused across runs.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Required to send queries to the live search API.
    #[arg(long)]
    live: bool,
    /// Live search API URL.
    #[arg(long)]
    endpoint: Option<String>,
    /// Results kept per query.
    #[arg(long)]
    k: Option<usize>,
    /// Request budget; unlimited if not set.
    #[arg(long)]
    max_requests: Option<u64>,
    /// Path prefix for every output file.
    #[arg(long)]
    output_prefix: Option<String>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Age decay for the prio mode.
    #[arg(long)]
    alpha: Option<f64>,
    /// Snippets needed to add a new edge.
    #[arg(long)]
    tau: Option<u64>,
    /// Score a mined phrase must exceed (pattern-iter).
    #[arg(long)]
    sigma: Option<u64>,
    /// Heaviest edges pair-queried per mining round (pattern-iter).
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Seed entities, one per line.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Query patterns, one per line (`\s` is the single-space pattern).
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Patterns matched in snippets but never sent as queries.
    #[arg(long)]
    match_patterns: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Edge list to take the heaviest pairs from.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of heaviest edges to pair-query.
    #[arg(long)]
    h: Option<usize>,
    /// Score a phrase must exceed to be admitted.
    #[arg(long)]
    sigma: Option<u64>,
    /// Patterns already in use; admitted phrases are appended.
    #[arg(long)]
    patterns: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Seed entities, one per line.
    #[arg(long)]
    seeds: Option<PathBuf>,
    /// Overlap-coefficient threshold, strictly between 0 and 1.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge list to analyse.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dist")]
    report: Report,
    #[arg(long, default_value_t = 15)]
    top_k: usize,
    /// `CATEGORY=PATTERN_FILE`, repeatable.
    #[arg(long = "mi-input")]
    mi_inputs: Vec<String>,
    /// Report raw pointwise MI instead of add-one smoothed.
    #[arg(long)]
    no_smoothing: bool,
    #[arg(long)]
    output_prefix: Option<String>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    nodes: usize,
    /// Random model with this many edges.
    #[arg(long, conflicts_with_all = ["edge_list", "pa_edges_per_node"])]
    edges: Option<usize>,
    /// Explicit edges, one `i<TAB>j<TAB>snippets` line each (node indices).
    #[arg(long, conflicts_with = "pa_edges_per_node")]
    edge_list: Option<PathBuf>,
    /// Preferential attachment with this many edges per new node.
    #[arg(long)]
    pa_edges_per_node: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pa_exponent: f64,
    /// `PHRASE:FREQUENCY` or `PHRASE`, repeatable.
    #[arg(long = "pattern")]
    patterns: Vec<String>,
    #[arg(long, default_value_t = 10)]
    domains: usize,
    /// Share of all snippets that mention only one entity, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 2)]
    min_snippets: u32,
    #[arg(long, default_value_t = 4)]
    max_snippets: u32,
    #[arg(long)]
    output_prefix: Option<String>,
}

enum Status {
    Complete,
    Aborted(String),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Aborted(reason)) => {
            eprintln!("run aborted: {reason}; partial outputs were written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Extract(args) => extract(args, &cfg),
        Command::MinePatterns(args) => mine(args, &cfg),
        Command::Baseline(args) => baseline(args, &cfg),
        Command::Analyze(args) => analyze(args, &cfg),
        Command::MakeCorpus(args) => make_corpus(args),
    }
}

fn resolve_enum<T: ValueEnum + Copy>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match cfg.get::<String>(key)? {
        None => Ok(default),
        Some(raw) => T::from_str(&raw, true).map_err(|e| anyhow!("config key {key}: {e}")),
    }
}

fn required_path(flag: Option<PathBuf>, cfg: &ConfigFile, key: &str) -> Result<PathBuf> {
    cfg.optional(flag, key)?
        .ok_or_else(|| anyhow!("--{key} is required"))
}

fn output_path(prefix: &str, suffix: &str) -> Result<PathBuf> {
    let path = PathBuf::from(format!("{prefix}{suffix}"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    Ok(path)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> socmine::Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn load_catalog(path: &Path) -> Result<EntityCatalog> {
    let file = File::open(path).with_context(|| format!("cannot open catalog {}", path.display()))?;
    let (catalog, stats) =
        EntityCatalog::load(BufReader::new(file)).with_context(|| format!("in catalog {}", path.display()))?;
    log::info!(
        "catalog: {} entities ({} blank lines, {} duplicates skipped)",
        stats.loaded,
        stats.blank,
        stats.duplicates
    );
    Ok(catalog)
}

fn load_seeds(path: &Path, catalog: &EntityCatalog) -> Result<Vec<Entity>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read seeds {}", path.display()))?;
    let mut seeds = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let entity = catalog
            .lookup(line)
            .ok_or_else(|| anyhow!("invalid configuration: seed {line:?} is not in the catalog"))?;
        if !seeds.contains(entity) {
            seeds.push(entity.clone());
        }
    }
    if seeds.is_empty() {
        bail!("invalid configuration: seed file {} is empty", path.display());
    }
    Ok(seeds)
}

fn load_patterns(path: &Path) -> Result<Vec<Pattern>> {
    let file = File::open(path).with_context(|| format!("cannot open patterns {}", path.display()))?;
    read_patterns(BufReader::new(file)).with_context(|| format!("in pattern file {}", path.display()))
}

fn load_graph(path: &Path) -> Result<SocialGraph> {
    let file = File::open(path).with_context(|| format!("cannot open graph {}", path.display()))?;
    SocialGraph::read_edge_list(BufReader::new(file)).with_context(|| format!("in edge list {}", path.display()))
}

/// Builds the search gateway for a run; `max_requests` of `None` means no cap.
fn open_gateway(src: &SourceArgs, cfg: &ConfigFile, run: &RunConfig) -> Result<SearchGateway> {
    let backend_kind = resolve_enum(src.backend, cfg, "backend", Backend::Replay)?;
    let backend: Box<dyn SearchBackend> = match backend_kind {
        Backend::Replay => {
            let corpus = required_path(src.corpus.clone(), cfg, "corpus")?;
            let replay = ReplayBackend::open(&corpus).with_context(|| format!("in corpus {}", corpus.display()))?;
            log::info!("replay corpus: {} snippets", replay.len());
            Box::new(replay)
        }
        Backend::Live => {
            if !src.live {
                bail!("invalid configuration: the live backend spends API quota; pass --live to confirm");
            }
            let endpoint = cfg.resolve(src.endpoint.clone(), "endpoint", DEFAULT_ENDPOINT.to_string())?;
            Box::new(LiveBackend::new(LiveConfig::from_env(endpoint, DEFAULT_API_KEY_ENV)?)?)
        }
    };
    let cache = match cfg.optional(src.cache_dir.clone(), "cache-dir")? {
        Some(dir) => QueryCache::persistent(dir)?,
        None => QueryCache::in_memory(),
    };
    Ok(run.build_gateway(backend, cache))
}

fn source_settings(src: &SourceArgs, cfg: &ConfigFile, run: &mut RunConfig) -> Result<String> {
    run.k = cfg.resolve(src.k, "k", DEFAULT_TOP_K)?;
    run.max_requests = cfg.optional(src.max_requests, "max-requests")?;
    Ok(cfg.resolve(src.output_prefix.clone(), "output-prefix", "out".to_string())?)
}

fn write_run_outputs(prefix: &str, graph: &SocialGraph, report: &RunReport) -> Result<()> {
    write_file(&output_path(prefix, ".edges")?, |w| graph.write_edge_list(w))?;
    write_file(&output_path(prefix, ".graphml")?, |w| graph.export(ExportFormat::GraphMl, w))?;
    write_file(&output_path(prefix, ".trace.csv")?, |w| report.write_trace_csv(w))?;
    write_file(&output_path(prefix, ".summary.txt")?, |w| report.write_summary(w))?;
    Ok(())
}

fn status_of(report: &RunReport) -> Status {
    match &report.aborted {
        Some(reason) => Status::Aborted(reason.clone()),
        None => Status::Complete,
    }
}

fn extract(args: ExtractArgs, cfg: &ConfigFile) -> Result<Status> {
    let mut run = RunConfig {
        retry: RetryPolicy::default(),
        ..RunConfig::default()
    };
    let prefix = source_settings(&args.source, cfg, &mut run)?;
    run.tau = cfg.resolve(args.tau, "tau", run.tau)?;
    run.sigma = cfg.resolve(args.sigma, "sigma", run.sigma)?;
    run.h = cfg.resolve(args.h, "h", run.h)?;
    run.max_iterations = cfg.resolve(args.max_iterations, "max-iterations", run.max_iterations)?;
    let alpha = cfg.resolve(args.alpha, "alpha", 0.0)?;
    run.mode = match resolve_enum(args.mode, cfg, "mode", Mode::Bf)? {
        Mode::Bf => ExpansionMode::BreadthFirst,
        Mode::Prio => ExpansionMode::Priority { alpha },
        Mode::PatternIter => ExpansionMode::PatternIter,
    };
    run.query_patterns = match cfg.optional(args.patterns, "patterns")? {
        Some(path) => load_patterns(&path)?,
        None => vec![Pattern::seed("and")?],
    };
    if let Some(path) = cfg.optional(args.match_patterns, "match-patterns")? {
        run.match_patterns = load_patterns(&path)?;
    }
    // range checks come before any file or network access
    if run.tau < 1 {
        bail!("invalid configuration: tau must be ≥ 1");
    }
    let catalog = load_catalog(&required_path(args.source.catalog.clone(), cfg, "catalog")?)?;
    run.seeds = load_seeds(&required_path(args.seeds, cfg, "seeds")?, &catalog)?;
    run.validate(&catalog)?;
    let gateway = open_gateway(&args.source, cfg, &run)?;

    let outcome = engine::run(&run, &gateway, &catalog)?;
    write_run_outputs(&prefix, &outcome.graph, &outcome.report)?;
    write_file(&output_path(&prefix, ".patterns")?, |w| write_patterns(w, &outcome.patterns))?;
    eprintln!(
        "{} nodes, {} edges, {} requests",
        outcome.report.nodes_found, outcome.report.edges_found, outcome.report.requests_used
    );
    Ok(status_of(&outcome.report))
}

fn mine(args: MineArgs, cfg: &ConfigFile) -> Result<Status> {
    let mut run = RunConfig::default();
    let prefix = source_settings(&args.source, cfg, &mut run)?;
    let h = cfg.resolve(args.h, "h", run.h)?;
    let sigma = cfg.resolve(args.sigma, "sigma", run.sigma)?;
    if h < 1 || sigma < 1 {
        bail!("invalid configuration: h and sigma must be ≥ 1");
    }
    let catalog = load_catalog(&required_path(args.source.catalog.clone(), cfg, "catalog")?)?;
    let graph = load_graph(&required_path(args.graph, cfg, "graph")?)?;
    let mut active: PatternSet = match cfg.optional(args.patterns, "patterns")? {
        Some(path) => load_patterns(&path)?.into_iter().collect(),
        None => PatternSet::new(),
    };
    let gateway = open_gateway(&args.source, cfg, &run)?;
    let pass = mine_patterns(&graph, &gateway, &catalog, h)?;

    let path = output_path(&prefix, ".candidates.csv")?;
    let mut rows = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::NonNumeric)
        .from_path(&path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    rows.write_record(["phrase", "n", "m", "d", "score", "admitted"])?;
    for cand in &pass.candidates {
        let admitted = cand.score() > sigma && !active.contains_key(&cand.phrase);
        if admitted {
            active.insert(cand.to_pattern()?);
        }
        rows.write_record([
            cand.phrase.clone(),
            cand.n.to_string(),
            cand.m.to_string(),
            cand.d.to_string(),
            cand.score().to_string(),
            admitted.to_string(),
        ])?;
    }
    rows.flush()?;
    write_file(&output_path(&prefix, ".patterns")?, |w| write_patterns(w, &active))?;
    eprintln!(
        "{} pair queries, {} candidates, {} requests",
        pass.pair_queries,
        pass.candidates.len(),
        gateway.used_requests()
    );
    Ok(match pass.failure() {
        Some(reason) => Status::Aborted(reason.to_string()),
        None => Status::Complete,
    })
}

fn baseline(args: BaselineArgs, cfg: &ConfigFile) -> Result<Status> {
    let mut run = RunConfig::default();
    let prefix = source_settings(&args.source, cfg, &mut run)?;
    let threshold = cfg.resolve(args.threshold, "threshold", 0.5)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        bail!("invalid configuration: threshold must lie strictly between 0 and 1");
    }
    let catalog = load_catalog(&required_path(args.source.catalog.clone(), cfg, "catalog")?)?;
    let seeds = load_seeds(&required_path(args.seeds, cfg, "seeds")?, &catalog)?;
    let gateway = open_gateway(&args.source, cfg, &run)?;
    let (graph, report) = baseline_pairwise(&seeds, &gateway, &catalog, threshold)?;
    write_run_outputs(&prefix, &graph, &report)?;
    eprintln!(
        "{} nodes, {} edges, {} requests",
        report.nodes_found, report.edges_found, report.requests_used
    );
    Ok(status_of(&report))
}

fn analyze(args: AnalyzeArgs, cfg: &ConfigFile) -> Result<Status> {
    let prefix = cfg.resolve(args.output_prefix.clone(), "output-prefix", "out".to_string())?;
    // `all` includes MI only when there is input for it
    let wants = |r: Report| {
        args.report == r || (args.report == Report::All && (r != Report::Mi || !args.mi_inputs.is_empty()))
    };
    if wants(Report::Mi) && args.mi_inputs.is_empty() {
        bail!("invalid configuration: --report mi needs at least one --mi-input CATEGORY=FILE");
    }
    if wants(Report::Dist) || wants(Report::Top) {
        let graph = load_graph(&required_path(args.graph.clone(), cfg, "graph")?)?;
        if wants(Report::Dist) {
            let (degree, weight) = summarize(&graph);
            write_file(&output_path(&prefix, ".degree_hist.csv")?, |w| degree.write_histogram_csv(w))?;
            write_file(&output_path(&prefix, ".weight_hist.csv")?, |w| weight.write_histogram_csv(w))?;
            write_file(&output_path(&prefix, ".dist.tsv")?, |w| write_summary_table(w, &degree, &weight))?;
        }
        if wants(Report::Top) {
            let top = top_relations(&graph, args.top_k);
            write_file(&output_path(&prefix, ".top.csv")?, |w| write_top_relations_csv(w, &top))?;
        }
    }
    if wants(Report::Mi) {
        let mut table = TermCategoryTable::new();
        for input in &args.mi_inputs {
            let (category, file) = input
                .split_once('=')
                .ok_or_else(|| anyhow!("invalid configuration: --mi-input expects CATEGORY=FILE, got {input:?}"))?;
            for pattern in load_patterns(Path::new(file))? {
                table.add_phrase(pattern.phrase(), category, 1);
            }
        }
        if table.total() == 0 {
            bail!("invalid configuration: MI inputs contain no terms");
        }
        let smoothing = if args.no_smoothing { Smoothing::None } else { Smoothing::AddOne };
        let scores = mutual_information(&table, smoothing);
        write_file(&output_path(&prefix, ".mi.csv")?, |w| write_mi_csv(w, &scores))?;
    }
    Ok(Status::Complete)
}

fn parse_weighted_pattern(raw: &str) -> Result<(String, u32)> {
    match raw.rsplit_once(':') {
        Some((phrase, weight)) if !phrase.is_empty() && weight.chars().all(|c| c.is_ascii_digit()) && !weight.is_empty() => {
            Ok((phrase.to_string(), weight.parse()?))
        }
        _ => Ok((raw.to_string(), 1)),
    }
}

fn read_explicit_edges(path: &Path) -> Result<Vec<(usize, usize, u32)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split('\t').collect();
        let parsed = match fields.as_slice() {
            [a, b, n] => (a.trim().parse(), b.trim().parse(), n.trim().parse()),
            _ => bail!("{} line {}: expected i<TAB>j<TAB>snippets", path.display(), i + 1),
        };
        match parsed {
            (Ok(a), Ok(b), Ok(n)) => edges.push((a, b, n)),
            _ => bail!("{} line {}: expected non-negative integers", path.display(), i + 1),
        }
    }
    Ok(edges)
}

fn make_corpus(args: CorpusArgs) -> Result<Status> {
    let edge_model = if let Some(path) = &args.edge_list {
        EdgeModel::Explicit(read_explicit_edges(path)?)
    } else if let Some(m) = args.pa_edges_per_node {
        EdgeModel::PreferentialAttachment {
            edges_per_node: m,
            exponent: args.pa_exponent,
        }
    } else {
        EdgeModel::Random {
            edges: args.edges.unwrap_or(60),
        }
    };
    let patterns = if args.patterns.is_empty() {
        vec![("and".to_string(), 1)]
    } else {
        args.patterns
            .iter()
            .map(|p| parse_weighted_pattern(p))
            .collect::<Result<_>>()?
    };
    let spec = CorpusSpec {
        seed: args.seed,
        nodes: args.nodes,
        edge_model,
        patterns,
        domains: args.domains,
        noise_ratio: args.noise,
        snippets_per_edge: (args.min_snippets, args.max_snippets),
    };
    let corpus = generate_corpus(&spec)?;
    let prefix = args.output_prefix.unwrap_or_else(|| "corpus".to_string());
    write_file(&output_path(&prefix, ".tsv")?, |w| corpus.write_corpus(w))?;
    write_file(&output_path(&prefix, ".truth.edges")?, |w| corpus.write_truth(w))?;
    write_file(&output_path(&prefix, ".catalog.txt")?, |w| corpus.write_catalog(w))?;
    eprintln!(
        "{} snippets, {} planted edges",
        corpus.records.len(),
        corpus.truth.edge_count()
    );
    Ok(Status::Complete)
}
