//! Person-name dictionary and dictionary matching over free text.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::text::{is_word_char, normalize, NormalizedText};

/// A catalog person, identified by its canonical name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entity(Arc<str>);

impl Entity {
    pub fn new(name: &str) -> Self {
        Entity(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Entity {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Outcome counters for [`EntityCatalog::load`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub loaded: usize,
    pub blank: usize,
    pub duplicates: usize,
}

/// An occurrence of a catalog entity in a text. `start..end` are byte offsets
/// into the original text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityMatch {
    pub entity: Entity,
    pub start: usize,
    pub end: usize,
}

/// Immutable dictionary of canonical names keyed by their normalized form.
#[derive(Debug, Clone, Default)]
pub struct EntityCatalog {
    names: Vec<Entity>,
    index: HashMap<String, Entity>,
    max_key_len: usize,
}

impl EntityCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads one name per line. Blank lines and names whose normalized form
    /// was already seen are skipped.
    pub fn load<R: Read>(mut source: R) -> Result<(Self, LoadStats)> {
        let mut bytes = Vec::new();
        source.read_to_end(&mut bytes)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::Encoding {
            offset: e.valid_up_to(),
        })?;
        let mut catalog = Self::new();
        let mut stats = LoadStats::default();
        for line in text.lines() {
            match catalog.insert(line) {
                Some(true) => stats.loaded += 1,
                Some(false) => stats.duplicates += 1,
                None => stats.blank += 1,
            }
        }
        Ok((catalog, stats))
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut catalog = Self::new();
        for name in names {
            catalog.insert(name.as_ref());
        }
        catalog
    }

    /// Returns `None` for a blank name, `Some(false)` for a duplicate.
    fn insert(&mut self, raw: &str) -> Option<bool> {
        let key = normalize(raw);
        if key.is_empty() {
            return None;
        }
        if self.index.contains_key(&key) {
            return Some(false);
        }
        let canonical = Entity::new(&raw.split_whitespace().collect::<Vec<_>>().join(" "));
        self.max_key_len = self.max_key_len.max(key.len());
        self.index.insert(key, canonical.clone());
        self.names.push(canonical);
        Some(true)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Canonical names in load order.
    pub fn entities(&self) -> &[Entity] {
        &self.names
    }

    /// Looks a name up through its normalized form.
    pub fn lookup(&self, name: &str) -> Option<&Entity> {
        self.index.get(&normalize(name))
    }

    pub fn contains(&self, entity: &Entity) -> bool {
        self.lookup(entity.name()).is_some_and(|e| e == entity)
    }

    /// All non-overlapping, token-bounded catalog names in `text`, scanning
    /// left to right and taking the longest name at each position.
    pub fn find_entities(&self, text: &str) -> Vec<EntityMatch> {
        let normalized = NormalizedText::new(text);
        self.find_in_normalized(&normalized)
    }

    pub(crate) fn find_in_normalized(&self, text: &NormalizedText) -> Vec<EntityMatch> {
        let mut out = Vec::new();
        if self.index.is_empty() {
            return out;
        }
        let norm = text.as_str();
        let segments: Vec<(usize, usize)> = text.segment_ranges().collect();
        let mut i = 0;
        while i < segments.len() {
            let start = segments[i].0;
            let preceded_by_word = norm[..start].chars().next_back().is_some_and(is_word_char);
            if norm[start..].starts_with(' ') || preceded_by_word {
                i += 1;
                continue;
            }
            let mut best: Option<(usize, &Entity)> = None;
            let mut j = i;
            while j < segments.len() && segments[j].1 - start <= self.max_key_len {
                let end = segments[j].1;
                let followed_by_word = norm[end..].chars().next().is_some_and(is_word_char);
                if !followed_by_word && !norm[..end].ends_with(' ') {
                    if let Some(entity) = self.index.get(&norm[start..end]) {
                        best = Some((j, entity));
                    }
                }
                j += 1;
            }
            match best {
                Some((last, entity)) => {
                    let (a, b) = text
                        .original_span(start, segments[last].1)
                        .expect("segment-aligned span");
                    out.push(EntityMatch {
                        entity: entity.clone(),
                        start: a,
                        end: b,
                    });
                    i = last + 1;
                }
                None => i += 1,
            }
        }
        out
    }
}
