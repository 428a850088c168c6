//! Deterministic backend answering queries from a stored snippet corpus.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::query::Query;
use super::record::{read_records, SnippetRecord};
use super::{BackendError, SearchBackend};
use crate::error::Result;
use crate::text::{contains_phrase, normalize};

#[derive(Debug, Clone)]
struct Indexed {
    record: SnippetRecord,
    normalized: String,
}

/// Returns every corpus snippet containing all query terms, in corpus order.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    corpus: Vec<Indexed>,
}

impl ReplayBackend {
    pub fn new(records: Vec<SnippetRecord>) -> Self {
        let corpus = records
            .into_iter()
            .map(|record| Indexed {
                normalized: normalize(&record.text),
                record,
            })
            .collect();
        Self { corpus }
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        Ok(Self::new(read_records(reader, 1)?))
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn len(&self) -> usize {
        self.corpus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpus.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &SnippetRecord> {
        self.corpus.iter().map(|i| &i.record)
    }

    /// All matching records, unpaged.
    pub fn matching(&self, query: &Query) -> Vec<&SnippetRecord> {
        let terms = query.terms();
        self.corpus
            .iter()
            .filter(|s| {
                terms.phrases.iter().all(|p| contains_phrase(&s.normalized, p))
                    && terms.words.iter().all(|w| contains_phrase(&s.normalized, w))
            })
            .map(|s| &s.record)
            .collect()
    }
}

impl SearchBackend for ReplayBackend {
    fn fetch_page(
        &self,
        query: &Query,
        offset: usize,
        count: usize,
    ) -> std::result::Result<Vec<SnippetRecord>, BackendError> {
        Ok(self
            .matching(query)
            .into_iter()
            .skip(offset)
            .take(count)
            .cloned()
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::query::QueryKind;

    fn corpus() -> ReplayBackend {
        let text = "http://a.com/1\ta.com\tX says A B and C\n\
                    http://b.com/2\tb.com\tA  b and D\n\
                    http://c.com/3\tc.com\tA Bc and D\n\
                    http://c.com/4\tc.com\tA B with D\n";
        ReplayBackend::from_reader(text.as_bytes()).unwrap()
    }

    #[test]
    fn phrase_and_word_containment() {
        let q = Query::parse("\"A B\" and", QueryKind::Connectivity).unwrap();
        let hits = corpus().fetch_page(&q, 0, 50).unwrap();
        let urls: Vec<_> = hits.iter().map(|r| r.url.as_str()).collect();
        assert_eq!(urls, vec!["http://a.com/1", "http://b.com/2"]);
    }

    #[test]
    fn absent_phrase_is_empty() {
        let q = Query::parse("\"Nobody Here\"", QueryKind::Entity).unwrap();
        assert!(corpus().fetch_page(&q, 0, 50).unwrap().is_empty());
    }

    #[test]
    fn pages_are_slices_in_corpus_order() {
        let records: Vec<_> = (0..120)
            .map(|i| SnippetRecord::new(format!("http://s.com/{i}"), "s.com", format!("A B and Z{i}")))
            .collect();
        let b = ReplayBackend::new(records);
        let q = Query::parse("\"A B\"", QueryKind::Entity).unwrap();
        let sizes: Vec<usize> = (0..4).map(|p| b.fetch_page(&q, p * 50, 50).unwrap().len()).collect();
        assert_eq!(sizes, vec![50, 50, 20, 0]);
        assert_eq!(b.fetch_page(&q, 100, 50).unwrap()[0].url, "http://s.com/100");
        assert_eq!(b.fetch_page(&q, 0, 50).unwrap(), b.fetch_page(&q, 0, 50).unwrap());
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = ReplayBackend::from_reader("a\tb\tc\nonly two\tfields\n".as_bytes()).unwrap_err();
        assert!(matches!(err, crate::Error::Parse { line: 2, .. }));
    }
}
