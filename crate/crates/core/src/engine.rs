//! Budgeted graph expansion with a static pattern set, and iterative
//! expansion that mines new connector patterns between rounds.

use std::collections::HashSet;
use std::io::Write;

use crate::catalog::{Entity, EntityCatalog};
use crate::error::{Error, Result};
use crate::extract::{
    extract_edges, extract_pattern_candidates, Pattern, PatternCandidate, PatternSet,
};
use crate::frontier::{Frontier, FrontierMode};
use crate::graph::{MergeOutcome, SocialGraph};
use crate::search::{
    is_queryable_phrase, BudgetLedger, GatewayConfig, Query, QueryCache, RetryPolicy,
    SearchBackend, SearchGateway, Snippet, DEFAULT_TOP_K, PAGE_SIZE,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpansionMode {
    BreadthFirst,
    Priority { alpha: f64 },
    PatternIter,
}

impl ExpansionMode {
    pub fn name(&self) -> &'static str {
        match self {
            ExpansionMode::BreadthFirst => "bf",
            ExpansionMode::Priority { .. } => "prio",
            ExpansionMode::PatternIter => "pattern-iter",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seeds: Vec<Entity>,
    /// Patterns sent as query text (and matched).
    pub query_patterns: Vec<Pattern>,
    /// Additional patterns used only when scanning snippets.
    pub match_patterns: Vec<Pattern>,
    pub tau: u64,
    pub sigma: u64,
    pub h: usize,
    pub k: usize,
    /// `None` means no request cap.
    pub max_requests: Option<u64>,
    pub max_iterations: usize,
    pub mode: ExpansionMode,
    pub retry: RetryPolicy,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seeds: Vec::new(),
            query_patterns: Vec::new(),
            match_patterns: Vec::new(),
            tau: 2,
            sigma: 5,
            h: 100,
            k: DEFAULT_TOP_K,
            max_requests: None,
            max_iterations: 2,
            mode: ExpansionMode::BreadthFirst,
            retry: RetryPolicy::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self, catalog: &EntityCatalog) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::config("tau must be ≥ 1"));
        }
        if self.sigma < 1 {
            return Err(Error::config("sigma must be ≥ 1"));
        }
        if self.h < 1 {
            return Err(Error::config("h must be ≥ 1"));
        }
        if self.k < 1 {
            return Err(Error::config("k must be ≥ 1"));
        }
        if self.max_requests == Some(0) {
            return Err(Error::config("max_requests must be ≥ 1"));
        }
        if let ExpansionMode::Priority { alpha } = self.mode {
            if !(alpha.is_finite() && alpha >= 0.0) {
                return Err(Error::config("alpha must be a finite value ≥ 0"));
            }
        }
        if self.mode == ExpansionMode::PatternIter && self.max_iterations < 1 {
            return Err(Error::config("max_iterations must be ≥ 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seed set is empty"));
        }
        if let Some(missing) = self.seeds.iter().find(|s| !catalog.contains(s)) {
            return Err(Error::config(format!("seed {missing} is not in the catalog")));
        }
        if self.query_patterns.is_empty() {
            return Err(Error::config("no query patterns"));
        }
        Ok(())
    }

    pub fn ledger(&self) -> BudgetLedger {
        self.max_requests
            .map_or_else(BudgetLedger::unlimited, BudgetLedger::new)
    }

    pub fn gateway_config(&self) -> GatewayConfig {
        GatewayConfig {
            top_k: self.k,
            page_size: PAGE_SIZE,
            retry: self.retry,
        }
    }

    /// Gateway over `backend` with this run's budget and paging.
    pub fn build_gateway(&self, backend: impl SearchBackend + 'static, cache: QueryCache) -> SearchGateway {
        SearchGateway::new(backend, cache, self.ledger(), self.gateway_config())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    Expand(Entity),
    PatternMining { iteration: usize },
}

/// Counters after one step. `nodes`, `edges` and `requests` are cumulative;
/// `requests` counts budget-charged requests, so it reads the same whether or
/// not results came from the cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: u64,
    pub kind: StepKind,
    pub new_nodes: usize,
    pub new_edges: usize,
    pub nodes: usize,
    pub edges: usize,
    pub requests: u64,
}

/// Patterns admitted after a mining round, in descending score order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmittedPatterns {
    pub iteration: usize,
    pub patterns: Vec<PatternCandidate>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    pub nodes_found: usize,
    pub edges_found: usize,
    /// Requests actually sent to the backend.
    pub requests_used: u64,
    /// Requests counted against the budget.
    pub requests_charged: u64,
    pub pair_requests: u64,
    pub queries_issued: u64,
    pub cache_hits: u64,
    pub patterns_active: usize,
    pub trace: Vec<StepRecord>,
    pub admitted: Vec<AdmittedPatterns>,
    /// Set when the run stopped on a backend failure.
    pub aborted: Option<String>,
}

impl RunReport {
    pub fn is_complete(&self) -> bool {
        self.aborted.is_none()
    }

    /// `step,kind,entity,new_nodes,new_edges,nodes,edges,requests`
    pub fn write_trace_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step", "kind", "entity", "new_nodes", "new_edges", "nodes", "edges", "requests"])
            .map_err(csv_err)?;
        for r in &self.trace {
            let (kind, entity) = match &r.kind {
                StepKind::Expand(e) => ("expand", e.name().to_string()),
                StepKind::PatternMining { iteration } => ("pattern-mining", format!("iteration {iteration}")),
            };
            out.write_record([
                r.step.to_string(),
                kind.to_string(),
                entity,
                r.new_nodes.to_string(),
                r.new_edges.to_string(),
                r.nodes.to_string(),
                r.edges.to_string(),
                r.requests.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "status: {}", if self.is_complete() { "complete" } else { "incomplete" })?;
        if let Some(reason) = &self.aborted {
            writeln!(w, "aborted: {reason}")?;
        }
        writeln!(w, "nodes: {}", self.nodes_found)?;
        writeln!(w, "edges: {}", self.edges_found)?;
        writeln!(w, "requests: {}", self.requests_used)?;
        writeln!(w, "requests_charged: {}", self.requests_charged)?;
        writeln!(w, "pair_requests: {}", self.pair_requests)?;
        writeln!(w, "queries: {}", self.queries_issued)?;
        writeln!(w, "cache_hits: {}", self.cache_hits)?;
        writeln!(w, "steps: {}", self.trace.len())?;
        writeln!(w, "patterns_active: {}", self.patterns_active)?;
        for round in &self.admitted {
            let list: Vec<String> = round
                .patterns
                .iter()
                .map(|c| format!("{:?} ({})", c.phrase, c.score()))
                .collect();
            writeln!(w, "admitted[{}]: {}", round.iteration, list.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::config(format!("CSV: {other:?}")),
    }
}

/// A point of the nodes/edges-versus-requests curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvePoint {
    pub requests: u64,
    pub nodes: usize,
    pub edges: usize,
}

pub fn step_trace_to_curve(report: &RunReport) -> Vec<CurvePoint> {
    report
        .trace
        .iter()
        .map(|r| CurvePoint {
            requests: r.requests,
            nodes: r.nodes,
            edges: r.edges,
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub graph: SocialGraph,
    pub report: RunReport,
    pub patterns: PatternSet,
}

enum Stop {
    Budget,
    Failed(String),
}

struct Expansion<'a> {
    gateway: &'a SearchGateway,
    catalog: &'a EntityCatalog,
    tau: u64,
}

impl Expansion<'_> {
    /// Issues every queryable connectivity query for `entity`, merges the
    /// incident evidence and reports what changed.
    fn expand(
        &self,
        entity: &Entity,
        query_patterns: &PatternSet,
        match_patterns: &PatternSet,
        graph: &mut SocialGraph,
    ) -> (MergeOutcome, Option<Stop>) {
        let mut snippets: Vec<Snippet> = Vec::new();
        let mut seen = HashSet::new();
        let mut stop = None;
        for pattern in query_patterns.iter().filter(|p| is_queryable_phrase(p.phrase())) {
            let query = match Query::connectivity(entity, pattern.phrase()) {
                Ok(q) => q,
                Err(e) => {
                    log::debug!("skipping query for {entity}: {e}");
                    continue;
                }
            };
            match self.gateway.search(&query) {
                Ok(result) => {
                    for s in result.snippets {
                        if seen.insert((s.url.clone(), s.text.clone())) {
                            snippets.push(s);
                        }
                    }
                }
                Err(Error::BudgetExhausted { .. }) => {
                    stop = Some(Stop::Budget);
                    break;
                }
                Err(e) => {
                    stop = Some(Stop::Failed(e.to_string()));
                    break;
                }
            }
        }
        let mut evidence = extract_edges(&snippets, match_patterns.as_slice(), self.catalog);
        evidence.retain(|ev| ev.pair.contains(entity));
        (graph.merge_evidence(&evidence, self.tau), stop)
    }
}

fn matching_set(config: &RunConfig) -> PatternSet {
    config
        .query_patterns
        .iter()
        .chain(&config.match_patterns)
        .cloned()
        .collect()
}

fn finish(graph: SocialGraph, mut report: RunReport, patterns: PatternSet, gateway: &SearchGateway) -> RunOutcome {
    let ledger = gateway.ledger();
    report.nodes_found = graph.node_count();
    report.edges_found = graph.edge_count();
    report.requests_used = ledger.used_requests();
    report.requests_charged = ledger.charged_requests();
    report.pair_requests = ledger.pair_requests();
    report.queries_issued = ledger.queries_issued();
    report.cache_hits = ledger.cache_hits();
    report.patterns_active = patterns.len();
    RunOutcome { graph, report, patterns }
}

/// Pops entities breadth-first or by priority, queries each with every query
/// pattern, and stops once the request budget is spent or the frontier is
/// empty.
pub fn expand_static(
    config: &RunConfig,
    gateway: &SearchGateway,
    catalog: &EntityCatalog,
) -> Result<RunOutcome> {
    config.validate(catalog)?;
    let frontier_mode = match config.mode {
        ExpansionMode::BreadthFirst => FrontierMode::Fifo,
        ExpansionMode::Priority { alpha } => FrontierMode::Priority { alpha },
        ExpansionMode::PatternIter => {
            return Err(Error::config("pattern-iter runs use expand_with_pattern_mining"))
        }
    };
    let query_patterns: PatternSet = config.query_patterns.iter().cloned().collect();
    let match_patterns = matching_set(config);
    let engine = Expansion {
        gateway,
        catalog,
        tau: config.tau,
    };

    let mut graph = SocialGraph::with_nodes(config.seeds.iter().cloned());
    let mut frontier = Frontier::new();
    for seed in &config.seeds {
        frontier.push(seed.clone(), 0);
    }
    let mut report = RunReport::default();
    let mut step = 0u64;
    while !gateway.is_exhausted() {
        let Some(entry) = frontier.pop_next(&graph, step, frontier_mode) else {
            break;
        };
        let (outcome, stop) = engine.expand(&entry.entity, &query_patterns, &match_patterns, &mut graph);
        for (pair, _) in &outcome.new_edges {
            if let Some(other) = pair.other(&entry.entity) {
                frontier.push(other.clone(), step);
            }
        }
        report.trace.push(StepRecord {
            step,
            kind: StepKind::Expand(entry.entity),
            new_nodes: outcome.new_nodes.len(),
            new_edges: outcome.new_edges.len(),
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            requests: gateway.charged_requests(),
        });
        step += 1;
        match stop {
            Some(Stop::Failed(reason)) => {
                report.aborted = Some(reason);
                break;
            }
            Some(Stop::Budget) => break,
            None => {}
        }
    }
    Ok(finish(graph, report, query_patterns, gateway))
}

/// Alternates full breadth-first rounds over the current candidates with a
/// pattern-mining pass over pair queries for the heaviest edges.
///
/// Entities are expanded at most once per run; candidates for the next round
/// are the entities reached through new edges in this round.
pub fn expand_with_pattern_mining(
    config: &RunConfig,
    gateway: &SearchGateway,
    catalog: &EntityCatalog,
) -> Result<RunOutcome> {
    config.validate(catalog)?;
    if config.mode != ExpansionMode::PatternIter {
        return Err(Error::config("expand_with_pattern_mining requires pattern-iter mode"));
    }
    let mut query_patterns: PatternSet = config.query_patterns.iter().cloned().collect();
    let mut match_patterns = matching_set(config);
    let engine = Expansion {
        gateway,
        catalog,
        tau: config.tau,
    };

    let mut graph = SocialGraph::with_nodes(config.seeds.iter().cloned());
    let mut report = RunReport::default();
    let mut expanded: HashSet<Entity> = HashSet::new();
    let mut candidates: Vec<Entity> = config.seeds.clone();
    let mut step = 0u64;

    'rounds: for iteration in 0..config.max_iterations {
        let mut next: Vec<Entity> = Vec::new();
        let mut queued: HashSet<Entity> = HashSet::new();
        for entity in &candidates {
            if expanded.contains(entity) {
                continue;
            }
            if gateway.is_exhausted() {
                break 'rounds;
            }
            expanded.insert(entity.clone());
            let (outcome, stop) = engine.expand(entity, &query_patterns, &match_patterns, &mut graph);
            for (pair, _) in &outcome.new_edges {
                if let Some(other) = pair.other(entity) {
                    if !expanded.contains(other) && queued.insert(other.clone()) {
                        next.push(other.clone());
                    }
                }
            }
            report.trace.push(StepRecord {
                step,
                kind: StepKind::Expand(entity.clone()),
                new_nodes: outcome.new_nodes.len(),
                new_edges: outcome.new_edges.len(),
                nodes: graph.node_count(),
                edges: graph.edge_count(),
                requests: gateway.charged_requests(),
            });
            step += 1;
            match stop {
                Some(Stop::Failed(reason)) => {
                    report.aborted = Some(reason);
                    break 'rounds;
                }
                Some(Stop::Budget) => break 'rounds,
                None => {}
            }
        }
        candidates = next;

        let pass = mine_patterns(&graph, gateway, catalog, config.h)?;
        let halted = match pass.stop {
            Some(Stop::Failed(reason)) => {
                report.aborted = Some(reason);
                break;
            }
            Some(Stop::Budget) => true,
            None => false,
        };
        let mut admitted = Vec::new();
        for cand in pass.candidates {
            if cand.score() > config.sigma && !query_patterns.contains_key(&cand.phrase) {
                let pattern = cand.to_pattern()?;
                query_patterns.insert(pattern.clone());
                match_patterns.insert(pattern);
                admitted.push(cand);
            }
        }
        log::info!(
            "iteration {iteration}: {} nodes, {} edges, admitted {} patterns",
            graph.node_count(),
            graph.edge_count(),
            admitted.len()
        );
        report.trace.push(StepRecord {
            step,
            kind: StepKind::PatternMining { iteration },
            new_nodes: 0,
            new_edges: 0,
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            requests: gateway.charged_requests(),
        });
        step += 1;
        report.admitted.push(AdmittedPatterns {
            iteration,
            patterns: admitted,
        });
        if halted {
            break;
        }
    }
    Ok(finish(graph, report, query_patterns, gateway))
}

/// Candidates from one mining pass, and why the pass stopped early, if it did.
pub struct MiningPass {
    pub candidates: Vec<PatternCandidate>,
    pub pair_queries: usize,
    stop: Option<Stop>,
}

impl MiningPass {
    pub fn budget_exhausted(&self) -> bool {
        matches!(self.stop, Some(Stop::Budget))
    }

    pub fn failure(&self) -> Option<&str> {
        match &self.stop {
            Some(Stop::Failed(reason)) => Some(reason),
            _ => None,
        }
    }
}

/// Pair-queries the `h` heaviest edges, heaviest first, and aggregates every
/// connector phrase seen between consecutive mentions in the results.
pub fn mine_patterns(
    graph: &SocialGraph,
    gateway: &SearchGateway,
    catalog: &EntityCatalog,
    h: usize,
) -> Result<MiningPass> {
    let mut snippets: Vec<Snippet> = Vec::new();
    let mut seen = HashSet::new();
    let mut stop = None;
    let mut pair_queries = 0;
    for (pair, _) in graph.top_edges(h) {
        let query = Query::pair(pair.first(), pair.second())?;
        match gateway.search(&query) {
            Ok(result) => {
                pair_queries += 1;
                for s in result.snippets {
                    if seen.insert((s.url.clone(), s.text.clone())) {
                        snippets.push(s);
                    }
                }
            }
            Err(Error::BudgetExhausted { .. }) => {
                stop = Some(Stop::Budget);
                break;
            }
            Err(e) => {
                stop = Some(Stop::Failed(e.to_string()));
                break;
            }
        }
    }
    Ok(MiningPass {
        candidates: extract_pattern_candidates(&snippets, catalog),
        pair_queries,
        stop,
    })
}

/// Dispatches on `config.mode`.
pub fn run(config: &RunConfig, gateway: &SearchGateway, catalog: &EntityCatalog) -> Result<RunOutcome> {
    match config.mode {
        ExpansionMode::PatternIter => expand_with_pattern_mining(config, gateway, catalog),
        _ => expand_static(config, gateway, catalog),
    }
}
