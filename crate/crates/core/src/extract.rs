//! Connector patterns and snippet scanning.
//!
//! A snippet contributes evidence for a pair of entities when two consecutive
//! entity mentions are separated by exactly a known connector phrase. The same
//! scan, with the phrase left open, yields candidate phrases for pattern
//! mining.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use crate::catalog::{Entity, EntityCatalog};
use crate::error::{Error, Result};
use crate::search::Snippet;
use crate::text::normalize;

pub const MAX_PATTERN_CHARS: usize = 60;
pub const MAX_PATTERN_TOKENS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternOrigin {
    Seed,
    Mined,
}

/// A connector phrase. The whitespace-only phrase is stored as a single space
/// and matches a gap consisting only of whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    phrase: String,
    origin: PatternOrigin,
}

impl Pattern {
    pub fn new(phrase: &str, origin: PatternOrigin) -> Result<Self> {
        if phrase.is_empty() {
            return Err(Error::config("empty pattern"));
        }
        if phrase.trim().is_empty() {
            return Ok(Self::space(origin));
        }
        let phrase = phrase.trim();
        if phrase.chars().count() > MAX_PATTERN_CHARS {
            return Err(Error::config(format!(
                "pattern {phrase:?} is longer than {MAX_PATTERN_CHARS} characters"
            )));
        }
        Ok(Self {
            phrase: phrase.to_string(),
            origin,
        })
    }

    pub fn seed(phrase: &str) -> Result<Self> {
        Self::new(phrase, PatternOrigin::Seed)
    }

    pub fn space(origin: PatternOrigin) -> Self {
        Self {
            phrase: " ".to_string(),
            origin,
        }
    }

    pub fn phrase(&self) -> &str {
        &self.phrase
    }

    pub fn origin(&self) -> PatternOrigin {
        self.origin
    }

    pub fn is_space(&self) -> bool {
        self.phrase == " "
    }

    /// Comparison key against a classified gap.
    pub fn key(&self) -> String {
        if self.is_space() {
            " ".to_string()
        } else {
            normalize(&self.phrase)
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_space() {
            f.write_str("\u{2423}")
        } else {
            f.write_str(&self.phrase)
        }
    }
}

/// Insertion-ordered set of patterns, unique by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
    keys: HashSet<String>,
}

impl PatternSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pattern: Pattern) -> bool {
        if self.keys.insert(pattern.key()) {
            self.patterns.push(pattern);
            true
        } else {
            false
        }
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pattern> {
        self.patterns.iter()
    }

    pub fn as_slice(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

impl FromIterator<Pattern> for PatternSet {
    fn from_iter<I: IntoIterator<Item = Pattern>>(iter: I) -> Self {
        let mut set = Self::new();
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl<'a> IntoIterator for &'a PatternSet {
    type Item = &'a Pattern;
    type IntoIter = std::slice::Iter<'a, Pattern>;
    fn into_iter(self) -> Self::IntoIter {
        self.patterns.iter()
    }
}

/// Reads a pattern file: one pattern per line, `\s` for the single-space
/// pattern, `\\` and `\t` as escapes. Empty lines are skipped.
pub fn read_patterns<R: BufRead>(reader: R) -> Result<Vec<Pattern>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let mut phrase = String::new();
        let mut chars = line.chars();
        while let Some(c) = chars.next() {
            if c != '\\' {
                phrase.push(c);
                continue;
            }
            match chars.next() {
                Some('s') => phrase.push(' '),
                Some('t') => phrase.push('\t'),
                Some('\\') => phrase.push('\\'),
                other => {
                    return Err(Error::parse(
                        i + 1,
                        format!("bad escape \\{}", other.map(String::from).unwrap_or_default()),
                    ))
                }
            }
        }
        out.push(Pattern::seed(&phrase).map_err(|e| Error::parse(i + 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn write_patterns<'a, W: Write>(
    mut w: W,
    patterns: impl IntoIterator<Item = &'a Pattern>,
) -> Result<()> {
    for p in patterns {
        if p.is_space() {
            writeln!(w, "\\s")?;
        } else {
            writeln!(w, "{}", p.phrase().replace('\\', "\\\\").replace('\t', "\\t"))?;
        }
    }
    Ok(())
}

/// Unordered pair of distinct entities, stored in name order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityPair(Entity, Entity);

impl EntityPair {
    /// `None` when both sides are the same entity.
    pub fn new(a: Entity, b: Entity) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(EntityPair(a, b)),
            std::cmp::Ordering::Greater => Some(EntityPair(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &Entity {
        &self.0
    }

    pub fn second(&self) -> &Entity {
        &self.1
    }

    pub fn contains(&self, e: &Entity) -> bool {
        &self.0 == e || &self.1 == e
    }

    /// The endpoint that is not `e`.
    pub fn other(&self, e: &Entity) -> Option<&Entity> {
        if &self.0 == e {
            Some(&self.1)
        } else if &self.1 == e {
            Some(&self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for EntityPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.0, self.1)
    }
}

/// Co-occurrence evidence for one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeEvidence {
    pub pair: EntityPair,
    pub count: u64,
    /// `(pattern key, domain)` for each supporting occurrence.
    pub support: Vec<(String, String)>,
}

/// Text between two consecutive mentions, classified.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Gap {
    Empty,
    Space,
    Phrase(String),
}

fn classify_gap(raw: &str) -> Gap {
    if raw.is_empty() {
        Gap::Empty
    } else if raw.chars().all(char::is_whitespace) {
        Gap::Space
    } else {
        Gap::Phrase(normalize(raw))
    }
}

/// Consecutive mentions of distinct entities in a snippet, with the gap text
/// between them.
fn adjacent_pairs(text: &str, catalog: &EntityCatalog) -> Vec<(EntityPair, Gap)> {
    let mentions = catalog.find_entities(text);
    mentions
        .windows(2)
        .filter_map(|w| {
            let pair = EntityPair::new(w[0].entity.clone(), w[1].entity.clone())?;
            Some((pair, classify_gap(&text[w[0].end..w[1].start])))
        })
        .collect()
}

/// Pair evidence from `<entity> <pattern> <entity>` occurrences. Output is
/// sorted by pair and does not depend on snippet or pattern order.
pub fn extract_edges(
    snippets: &[Snippet],
    patterns: &[Pattern],
    catalog: &EntityCatalog,
) -> Vec<EdgeEvidence> {
    let keys: HashSet<String> = patterns.iter().map(Pattern::key).collect();
    let mut by_pair: BTreeMap<EntityPair, Vec<(String, String)>> = BTreeMap::new();
    for snippet in snippets {
        for (pair, gap) in adjacent_pairs(&snippet.text, catalog) {
            let key = match gap {
                Gap::Empty => continue,
                Gap::Space => " ".to_string(),
                Gap::Phrase(p) => p,
            };
            if keys.contains(&key) {
                by_pair
                    .entry(pair)
                    .or_default()
                    .push((key, snippet.domain.clone()));
            }
        }
    }
    by_pair
        .into_iter()
        .map(|(pair, mut support)| {
            support.sort();
            EdgeEvidence {
                pair,
                count: support.len() as u64,
                support,
            }
        })
        .collect()
}

/// n * m * d^2.
pub fn pattern_score(n: u64, m: u64, d: u64) -> u64 {
    n * m * d * d
}

/// Aggregated statistics for a candidate connector phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCandidate {
    /// Normalized phrase; `" "` for the whitespace gap.
    pub phrase: String,
    /// Occurrences.
    pub n: u64,
    /// Distinct entity pairs.
    pub m: u64,
    /// Distinct domains.
    pub d: u64,
}

impl PatternCandidate {
    pub fn score(&self) -> u64 {
        pattern_score(self.n, self.m, self.d)
    }

    pub fn to_pattern(&self) -> Result<Pattern> {
        Pattern::new(&self.phrase, PatternOrigin::Mined)
    }
}

fn acceptable_candidate(phrase: &str, catalog: &EntityCatalog) -> bool {
    phrase.chars().count() <= MAX_PATTERN_CHARS
        && phrase.split(' ').count() <= MAX_PATTERN_TOKENS
        && catalog.find_entities(phrase).is_empty()
}

/// Every gap between consecutive distinct mentions, aggregated by phrase.
/// Sorted by descending score, then phrase.
pub fn extract_pattern_candidates(
    snippets: &[Snippet],
    catalog: &EntityCatalog,
) -> Vec<PatternCandidate> {
    #[derive(Default)]
    struct Acc {
        n: u64,
        pairs: HashSet<EntityPair>,
        domains: HashSet<String>,
    }
    let mut acc: HashMap<String, Acc> = HashMap::new();
    for snippet in snippets {
        for (pair, gap) in adjacent_pairs(&snippet.text, catalog) {
            let phrase = match gap {
                Gap::Empty => continue,
                Gap::Space => " ".to_string(),
                Gap::Phrase(p) if acceptable_candidate(&p, catalog) => p,
                Gap::Phrase(_) => continue,
            };
            let a = acc.entry(phrase).or_default();
            a.n += 1;
            a.pairs.insert(pair);
            a.domains.insert(snippet.domain.clone());
        }
    }
    let mut out: Vec<PatternCandidate> = acc
        .into_iter()
        .map(|(phrase, a)| PatternCandidate {
            phrase,
            n: a.n,
            m: a.pairs.len() as u64,
            d: a.domains.len() as u64,
        })
        .collect();
    out.sort_by(|a, b| b.score().cmp(&a.score()).then_with(|| a.phrase.cmp(&b.phrase)));
    out
}
