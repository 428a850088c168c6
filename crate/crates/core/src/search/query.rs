use std::fmt;

use crate::catalog::Entity;
use crate::error::{Error, Result};
use crate::text::normalize;

/// Characters the search API refuses as query text.
pub const FORBIDDEN_QUERY_CHARS: [char; 3] = ['&', ',', '+'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    /// `"<entity>" <pattern>`
    Connectivity,
    /// `"<entity>" "<entity>"`
    Pair,
    /// `"<entity>"`, used by the pairwise baseline.
    Entity,
}

/// A query string as sent to a backend.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    raw: String,
    kind: QueryKind,
}

/// Quoted phrases and bare words of a query, normalized.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryTerms {
    pub phrases: Vec<String>,
    pub words: Vec<String>,
}

fn quote(entity: &Entity) -> String {
    format!("\"{}\"", entity.name().replace('"', " ").trim())
}

/// True if a connector phrase may be sent as bare query text.
pub fn is_queryable_phrase(phrase: &str) -> bool {
    !phrase.trim().is_empty()
        && !phrase.contains('"')
        && !phrase.contains(FORBIDDEN_QUERY_CHARS)
}

impl Query {
    pub fn connectivity(entity: &Entity, phrase: &str) -> Result<Self> {
        if !is_queryable_phrase(phrase) {
            return Err(Error::InvalidQuery {
                query: format!("{} {}", quote(entity), phrase),
                reason: "pattern cannot be used as query text".to_string(),
            });
        }
        Self::parse(format!("{} {}", quote(entity), phrase.trim()), QueryKind::Connectivity)
    }

    pub fn pair(a: &Entity, b: &Entity) -> Result<Self> {
        Self::parse(format!("{} {}", quote(a), quote(b)), QueryKind::Pair)
    }

    pub fn entity(e: &Entity) -> Result<Self> {
        Self::parse(quote(e), QueryKind::Entity)
    }

    /// Validates a raw query: balanced quotes, no forbidden characters outside
    /// quotes, and at least one term.
    pub fn parse(raw: impl Into<String>, kind: QueryKind) -> Result<Self> {
        let raw = raw.into();
        let invalid = |raw: &str, reason: &str| Error::InvalidQuery {
            query: raw.to_string(),
            reason: reason.to_string(),
        };
        let mut inside = false;
        for c in raw.chars() {
            if c == '"' {
                inside = !inside;
            } else if !inside && FORBIDDEN_QUERY_CHARS.contains(&c) {
                return Err(invalid(&raw, "forbidden character outside quotes"));
            }
        }
        if inside {
            return Err(invalid(&raw, "unbalanced quotes"));
        }
        let query = Query { raw, kind };
        let terms = query.terms();
        if terms.phrases.is_empty() && terms.words.is_empty() {
            return Err(invalid(&query.raw, "empty query"));
        }
        Ok(query)
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn kind(&self) -> QueryKind {
        self.kind
    }

    /// Normalized raw query; equal keys share a cache entry.
    pub fn cache_key(&self) -> String {
        normalize(&self.raw)
    }

    pub fn terms(&self) -> QueryTerms {
        let mut terms = QueryTerms::default();
        for (i, part) in self.raw.split('"').enumerate() {
            if i % 2 == 1 {
                let p = normalize(part);
                if !p.is_empty() {
                    terms.phrases.push(p);
                }
            } else {
                terms
                    .words
                    .extend(normalize(part).split(' ').filter(|w| !w.is_empty()).map(str::to_string));
            }
        }
        terms
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}
