//! Query result cache, in memory and optionally mirrored to a directory.
//!
//! Each on-disk entry is `<sha256(key)>.tsv`: a `#query<TAB><raw><TAB><pages>`
//! header line followed by snippet records. `<pages>` is the number of backend
//! requests the entry originally cost.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use super::query::Query;
use super::record::{escape_field, format_record, read_records, SnippetRecord};
use crate::error::{Error, Result};

const HEADER_PREFIX: &str = "#query\t";

/// A cached result list and the requests it took to fetch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub records: Vec<SnippetRecord>,
    /// `None` for entries written without the count.
    pub requests: Option<u64>,
}

#[derive(Debug, Default)]
pub struct QueryCache {
    dir: Option<PathBuf>,
    entries: Mutex<HashMap<String, CacheEntry>>,
}

impl QueryCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir: Some(dir),
            entries: Mutex::default(),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn file_name(key: &str) -> String {
        format!("{}.tsv", hex::encode(Sha256::digest(key.as_bytes())))
    }

    pub fn get(&self, query: &Query) -> Result<Option<CacheEntry>> {
        let key = query.cache_key();
        if let Some(hit) = self.entries.lock().expect("cache lock").get(&key) {
            return Ok(Some(hit.clone()));
        }
        let Some(dir) = &self.dir else {
            return Ok(None);
        };
        let path = dir.join(Self::file_name(&key));
        if !path.exists() {
            return Ok(None);
        }
        let mut reader = BufReader::new(fs::File::open(&path)?);
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let Some(fields) = header.trim_end_matches(['\r', '\n']).strip_prefix(HEADER_PREFIX) else {
            return Err(Error::parse(1, format!("{}: missing query header", path.display())));
        };
        let requests = fields
            .rsplit_once('\t')
            .and_then(|(_, n)| n.parse().ok());
        let entry = CacheEntry {
            records: read_records(reader, 2)?,
            requests,
        };
        self.entries
            .lock()
            .expect("cache lock")
            .insert(key, entry.clone());
        Ok(Some(entry))
    }

    pub fn put(&self, query: &Query, records: &[SnippetRecord], requests: u64) -> Result<()> {
        let key = query.cache_key();
        if let Some(dir) = &self.dir {
            let path = dir.join(Self::file_name(&key));
            let tmp = path.with_extension("tmp");
            {
                let mut f = fs::File::create(&tmp)?;
                writeln!(f, "{HEADER_PREFIX}{}\t{requests}", escape_field(query.raw()))?;
                for r in records {
                    writeln!(f, "{}", format_record(r))?;
                }
                f.sync_all()?;
            }
            fs::rename(&tmp, &path)?;
        }
        self.entries
            .lock()
            .expect("cache lock")
            .insert(
                key,
                CacheEntry {
                    records: records.to_vec(),
                    requests: Some(requests),
                },
            );
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::query::QueryKind;

    #[test]
    fn persists_between_instances() {
        let dir = tempfile::tempdir().unwrap();
        let q = Query::parse("\"Ann Lee\" and", QueryKind::Connectivity).unwrap();
        let records = vec![SnippetRecord::new("http://x.org/1", "x.org", "Ann Lee and\tBob")];
        QueryCache::persistent(dir.path()).unwrap().put(&q, &records, 2).unwrap();

        let fresh = QueryCache::persistent(dir.path()).unwrap();
        let same_key = Query::parse("\"ann  lee\" AND", QueryKind::Connectivity).unwrap();
        let entry = fresh.get(&same_key).unwrap().unwrap();
        assert_eq!(entry.records, records);
        assert_eq!(entry.requests, Some(2));

        let file = dir.path().join(QueryCache::file_name(&q.cache_key()));
        let body = fs::read_to_string(file).unwrap();
        assert!(body.starts_with("#query\t\"Ann Lee\" and\t2\n"));
    }

    #[test]
    fn miss_returns_none() {
        let c = QueryCache::in_memory();
        let q = Query::parse("\"x\"", QueryKind::Entity).unwrap();
        assert_eq!(c.get(&q).unwrap(), None);
        c.put(&q, &[], 1).unwrap();
        assert_eq!(c.get(&q).unwrap().unwrap().records, vec![]);
    }

    #[test]
    fn header_without_page_count_still_loads() {
        let dir = tempfile::tempdir().unwrap();
        let q = Query::parse("\"Ann Lee\" and", QueryKind::Connectivity).unwrap();
        let file = dir.path().join(QueryCache::file_name(&q.cache_key()));
        fs::write(&file, "#query\t\"Ann Lee\" and\n").unwrap();
        let entry = QueryCache::persistent(dir.path()).unwrap().get(&q).unwrap().unwrap();
        assert_eq!(entry.requests, None);
    }
}
