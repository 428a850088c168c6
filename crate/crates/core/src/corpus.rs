//! Deterministic synthetic snippet corpora with a known ground-truth graph.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::Entity;
use crate::error::{Error, Result};
use crate::extract::EntityPair;
use crate::graph::SocialGraph;
use crate::search::{write_records, SnippetRecord};
use crate::text::normalize;

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "kl", "st", "tr", "sh",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];
const CODAS: &[&str] = &["", "", "", "n", "r", "l", "s", "k", "m"];

const FILLER: &[&str] = &[
    "news", "report", "photo", "today", "archive", "gallery", "interview", "update", "story", "event",
    "review", "video", "profile", "weekly", "feature",
];

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeModel {
    /// Node-index pairs with the number of snippets to render for each.
    Explicit(Vec<(usize, usize, u32)>),
    /// Uniformly random distinct pairs.
    Random { edges: usize },
    /// Growth model: each new node attaches to `edges_per_node` existing
    /// nodes chosen with probability proportional to `(degree + 1)^exponent`.
    PreferentialAttachment { edges_per_node: usize, exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub seed: u64,
    pub nodes: usize,
    pub edge_model: EdgeModel,
    /// Connector phrases with relative frequencies.
    pub patterns: Vec<(String, u32)>,
    pub domains: usize,
    /// Fraction of all snippets that mention a single entity and no pair.
    pub noise_ratio: f64,
    /// Inclusive range of snippets per generated edge; ignored by
    /// [`EdgeModel::Explicit`].
    pub snippets_per_edge: (u32, u32),
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            nodes: 50,
            edge_model: EdgeModel::Random { edges: 60 },
            patterns: vec![("and".to_string(), 1)],
            domains: 10,
            noise_ratio: 0.0,
            snippets_per_edge: (2, 4),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    /// Node names by index.
    pub entities: Vec<Entity>,
    /// Planted edges weighted by the number of rendered snippets.
    pub truth: SocialGraph,
    pub records: Vec<SnippetRecord>,
}

impl GeneratedCorpus {
    pub fn write_corpus<W: Write>(&self, w: W) -> Result<()> {
        write_records(w, &self.records)
    }

    pub fn write_truth<W: Write>(&self, w: W) -> Result<()> {
        self.truth.write_edge_list(w)
    }

    pub fn write_catalog<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.entities {
            writeln!(w, "{}", e.name())?;
        }
        Ok(())
    }
}

fn validate(spec: &CorpusSpec) -> Result<()> {
    if spec.nodes < 2 {
        return Err(Error::config("corpus needs at least 2 nodes"));
    }
    if spec.patterns.is_empty() || spec.patterns.iter().all(|(_, w)| *w == 0) {
        return Err(Error::config("corpus needs at least one pattern with positive frequency"));
    }
    if spec.domains == 0 {
        return Err(Error::config("corpus needs at least one domain"));
    }
    if !(0.0..1.0).contains(&spec.noise_ratio) {
        return Err(Error::config("noise ratio must lie in [0, 1)"));
    }
    let (lo, hi) = spec.snippets_per_edge;
    if lo == 0 || lo > hi {
        return Err(Error::config("snippets per edge must be a non-empty range starting at ≥ 1"));
    }
    let max_edges = spec.nodes * (spec.nodes - 1) / 2;
    match &spec.edge_model {
        EdgeModel::Explicit(edges) => {
            let mut seen = HashSet::new();
            for &(a, b, n) in edges {
                if a >= spec.nodes || b >= spec.nodes || a == b || n == 0 {
                    return Err(Error::config(format!("invalid explicit edge ({a}, {b}, {n})")));
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(Error::config(format!("duplicate explicit edge ({a}, {b})")));
                }
            }
        }
        EdgeModel::Random { edges } if *edges > max_edges => {
            return Err(Error::config(format!("{edges} edges do not fit on {} nodes", spec.nodes)));
        }
        EdgeModel::PreferentialAttachment {
            edges_per_node,
            exponent,
        } => {
            if *edges_per_node == 0 || *edges_per_node >= spec.nodes {
                return Err(Error::config("edges_per_node must lie in [1, nodes)"));
            }
            if !exponent.is_finite() || *exponent < 0.0 {
                return Err(Error::config("attachment exponent must be finite and ≥ 0"));
            }
        }
        EdgeModel::Random { .. } => {}
    }
    Ok(())
}

fn syllable(rng: &mut ChaCha8Rng, with_coda: bool) -> String {
    let mut s = String::new();
    s.push_str(ONSETS.choose(rng).unwrap());
    s.push_str(NUCLEI.choose(rng).unwrap());
    if with_coda {
        s.push_str(CODAS.choose(rng).unwrap());
    }
    s
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Unique two-token names; no token collides with a pattern or filler word.
fn make_names(rng: &mut ChaCha8Rng, count: usize, reserved: &HashSet<String>) -> Vec<Entity> {
    let mut names = Vec::with_capacity(count);
    let mut used = HashSet::new();
    while names.len() < count {
        let first = format!("{}{}", syllable(rng, false), syllable(rng, true));
        let last_len = rng.random_range(2..=3);
        let last: String = (0..last_len).map(|i| syllable(rng, i + 1 == last_len)).collect();
        if reserved.contains(&first) || reserved.contains(&last) {
            continue;
        }
        let name = format!("{} {}", capitalize(&first), capitalize(&last));
        if used.insert(normalize(&name)) {
            names.push(Entity::new(&name));
        }
    }
    names
}

fn random_edges(rng: &mut ChaCha8Rng, nodes: usize, edges: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    while out.len() < edges {
        let a = rng.random_range(0..nodes);
        let b = rng.random_range(0..nodes);
        if a != b {
            out.insert((a.min(b), a.max(b)));
        }
    }
    out
}

fn attachment_edges(rng: &mut ChaCha8Rng, nodes: usize, m: usize, exponent: f64) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    let mut degree = vec![0usize; nodes];
    // complete core of m + 1 nodes
    for a in 0..=m {
        for b in a + 1..=m {
            out.insert((a, b));
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    for new in m + 1..nodes {
        let weights: Vec<f64> = degree[..new].iter().map(|&d| ((d + 1) as f64).powf(exponent)).collect();
        let dist = WeightedIndex::new(&weights).expect("positive weights");
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(dist.sample(rng));
        }
        for t in targets {
            out.insert((t, new));
            degree[t] += 1;
            degree[new] += 1;
        }
    }
    out
}

fn filler_words(rng: &mut ChaCha8Rng, max: usize) -> String {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| *FILLER.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn join_nonempty(parts: &[&str]) -> String {
    parts.iter().filter(|p| !p.is_empty()).copied().collect::<Vec<_>>().join(" ")
}

/// Generates a corpus; identical specs give identical output.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<GeneratedCorpus> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut reserved: HashSet<String> = FILLER.iter().map(|s| s.to_string()).collect();
    for (p, _) in &spec.patterns {
        reserved.extend(normalize(p).split(' ').map(str::to_string));
    }
    let entities = make_names(&mut rng, spec.nodes, &reserved);

    let (lo, hi) = spec.snippets_per_edge;
    let planted: Vec<(usize, usize, u32)> = match &spec.edge_model {
        EdgeModel::Explicit(edges) => edges.clone(),
        EdgeModel::Random { edges } => random_edges(&mut rng, spec.nodes, *edges)
            .into_iter()
            .map(|(a, b)| (a, b, rng.random_range(lo..=hi)))
            .collect(),
        EdgeModel::PreferentialAttachment {
            edges_per_node,
            exponent,
        } => attachment_edges(&mut rng, spec.nodes, *edges_per_node, *exponent)
            .into_iter()
            .map(|(a, b)| (a, b, rng.random_range(lo..=hi)))
            .collect(),
    };

    let pattern_dist = WeightedIndex::new(spec.patterns.iter().map(|(_, w)| *w))
        .map_err(|e| Error::config(format!("pattern frequencies: {e}")))?;
    let mut truth = SocialGraph::with_nodes(entities.iter().cloned());
    let mut texts: Vec<String> = Vec::new();
    for &(a, b, count) in &planted {
        let pair = EntityPair::new(entities[a].clone(), entities[b].clone()).expect("distinct endpoints");
        truth.add_weight(pair, u64::from(count));
        for _ in 0..count {
            let pattern = &spec.patterns[pattern_dist.sample(&mut rng)].0;
            let (x, y) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
            let prefix = filler_words(&mut rng, 2);
            let suffix = filler_words(&mut rng, 3);
            let connector = if pattern.trim().is_empty() { "" } else { pattern.trim() };
            texts.push(join_nonempty(&[
                &prefix,
                entities[x].name(),
                connector,
                entities[y].name(),
                &suffix,
            ]));
        }
    }
    let noise = if spec.noise_ratio > 0.0 {
        ((texts.len() as f64) * spec.noise_ratio / (1.0 - spec.noise_ratio)).round() as usize
    } else {
        0
    };
    for _ in 0..noise {
        let e = entities.choose(&mut rng).unwrap();
        let prefix = filler_words(&mut rng, 3);
        let suffix = filler_words(&mut rng, 3);
        texts.push(join_nonempty(&[&prefix, e.name(), &suffix]));
    }
    texts.shuffle(&mut rng);

    let records = texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            let domain = format!("site{}.example", rng.random_range(0..spec.domains));
            SnippetRecord::new(format!("http://www.{domain}/p/{i}"), domain, text)
        })
        .collect();
    Ok(GeneratedCorpus {
        entities,
        truth,
        records,
    })
}
