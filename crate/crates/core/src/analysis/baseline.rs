//! Pairwise co-occurrence baseline: one query per entity, one per candidate
//! pair, and an overlap-coefficient threshold.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::catalog::{Entity, EntityCatalog};
use crate::engine::{RunReport, StepKind, StepRecord};
use crate::error::{Error, Result};
use crate::extract::EntityPair;
use crate::graph::SocialGraph;
use crate::search::{Query, SearchGateway, Snippet};

/// `co / min(a, b)`, zero when either side has no results.
pub fn overlap_coefficient(co: u64, a: u64, b: u64) -> f64 {
    let smaller = a.min(b);
    if smaller == 0 {
        0.0
    } else {
        co as f64 / smaller as f64
    }
}

enum Halt {
    Budget,
    Failed(String),
}

fn classify(e: Error) -> Halt {
    match e {
        Error::BudgetExhausted { .. } => Halt::Budget,
        other => Halt::Failed(other.to_string()),
    }
}

struct Baseline<'a> {
    gateway: &'a SearchGateway,
    catalog: &'a EntityCatalog,
    single: HashMap<Entity, Vec<Snippet>>,
}

impl Baseline<'_> {
    fn single(&mut self, e: &Entity) -> std::result::Result<&[Snippet], Halt> {
        if !self.single.contains_key(e) {
            let q = Query::entity(e).map_err(classify)?;
            let res = self.gateway.search(&q).map_err(classify)?;
            self.single.insert(e.clone(), res.snippets);
        }
        Ok(&self.single[e])
    }

    fn mentions_both(&self, snippet: &Snippet, a: &Entity, b: &Entity) -> bool {
        let found = self.catalog.find_entities(&snippet.text);
        found.iter().any(|m| &m.entity == a) && found.iter().any(|m| &m.entity == b)
    }

    /// Co-occurring catalog entities in `e`'s own results, in first-seen order.
    fn candidates(&self, e: &Entity) -> Vec<Entity> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for snippet in &self.single[e] {
            for m in self.catalog.find_entities(&snippet.text) {
                if &m.entity != e && seen.insert(m.entity.clone()) {
                    out.push(m.entity);
                }
            }
        }
        out
    }
}

/// Runs the baseline from `seeds` until the gateway budget is spent or no
/// unprocessed entity remains. `threshold` must lie strictly between 0 and 1.
pub fn baseline_pairwise(
    seeds: &[Entity],
    gateway: &SearchGateway,
    catalog: &EntityCatalog,
    threshold: f64,
) -> Result<(SocialGraph, RunReport)> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::config("baseline threshold must lie in (0, 1)"));
    }
    if seeds.is_empty() {
        return Err(Error::config("seed set is empty"));
    }
    let mut graph = SocialGraph::with_nodes(seeds.iter().cloned());
    let mut report = RunReport::default();
    let mut run = Baseline {
        gateway,
        catalog,
        single: HashMap::new(),
    };
    let mut pool: VecDeque<Entity> = seeds.iter().cloned().collect();
    let mut pooled: HashSet<Entity> = seeds.iter().cloned().collect();
    let mut evaluated: HashSet<EntityPair> = HashSet::new();
    let mut step = 0u64;

    'pool: while let Some(entity) = pool.pop_front() {
        if gateway.is_exhausted() {
            break;
        }
        let nodes_before = graph.node_count();
        let edges_before = graph.edge_count();
        let mut halt = None;
        match run.single(&entity) {
            Ok(_) => {
                for candidate in run.candidates(&entity) {
                    let Some(pair) = EntityPair::new(entity.clone(), candidate.clone()) else {
                        continue;
                    };
                    if !evaluated.insert(pair.clone()) {
                        continue;
                    }
                    let counts = run.single(&candidate).map(|s| s.len() as u64).and_then(|b| {
                        let q = Query::pair(&entity, &candidate).map_err(classify)?;
                        let res = gateway.search(&q).map_err(classify)?;
                        let co = res
                            .snippets
                            .iter()
                            .filter(|s| run.mentions_both(s, &entity, &candidate))
                            .count() as u64;
                        Ok((co, b))
                    });
                    let (co, b) = match counts {
                        Ok(c) => c,
                        Err(h) => {
                            halt = Some(h);
                            break;
                        }
                    };
                    let a = run.single[&entity].len() as u64;
                    let score = overlap_coefficient(co, a, b);
                    if co > 0 && score > threshold {
                        graph.add_weight(pair, co);
                        if pooled.insert(candidate.clone()) {
                            pool.push_back(candidate);
                        }
                    }
                }
            }
            Err(h) => halt = Some(h),
        }
        report.trace.push(StepRecord {
            step,
            kind: StepKind::Expand(entity),
            new_nodes: graph.node_count() - nodes_before,
            new_edges: graph.edge_count() - edges_before,
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            requests: gateway.charged_requests(),
        });
        step += 1;
        match halt {
            Some(Halt::Budget) => break 'pool,
            Some(Halt::Failed(reason)) => {
                report.aborted = Some(reason);
                break 'pool;
            }
            None => {}
        }
    }

    let ledger = gateway.ledger();
    report.nodes_found = graph.node_count();
    report.edges_found = graph.edge_count();
    report.requests_used = ledger.used_requests();
    report.requests_charged = ledger.charged_requests();
    report.pair_requests = ledger.pair_requests();
    report.queries_issued = ledger.queries_issued();
    report.cache_hits = ledger.cache_hits();
    Ok((graph, report))
}
