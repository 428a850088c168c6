//! Paged search over a live web-search API or a replayed corpus, with a
//! result cache and request budget accounting.

mod cache;
mod domain;
mod gateway;
mod ledger;
mod live;
mod query;
mod record;
mod replay;

use std::fmt;

pub use cache::QueryCache;
pub use domain::registrable_domain;
pub use gateway::{GatewayConfig, RetryPolicy, SearchGateway, SearchResult};
pub use ledger::{BudgetLedger, LedgerEntry};
pub use live::{parse_response, LiveBackend, LiveConfig, DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT};
pub use query::{is_queryable_phrase, Query, QueryKind, QueryTerms, FORBIDDEN_QUERY_CHARS};
pub use record::{
    escape_field, format_record, parse_record, read_records, unescape_field, write_records,
    SnippetRecord,
};
pub use replay::ReplayBackend;

/// Results per backend request.
pub const PAGE_SIZE: usize = 50;
/// Results kept per query.
pub const DEFAULT_TOP_K: usize = 200;

/// A failed backend request. The gateway retries these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendError(pub String);

impl BackendError {
    pub fn new(msg: impl Into<String>) -> Self {
        BackendError(msg.into())
    }
}

impl fmt::Display for BackendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BackendError {}

/// A source of paged search results.
pub trait SearchBackend: Send + Sync {
    /// Returns at most `count` results starting at `offset` in the backend's
    /// ranking.
    fn fetch_page(
        &self,
        query: &Query,
        offset: usize,
        count: usize,
    ) -> Result<Vec<SnippetRecord>, BackendError>;
}

impl<B: SearchBackend + ?Sized> SearchBackend for Box<B> {
    fn fetch_page(
        &self,
        query: &Query,
        offset: usize,
        count: usize,
    ) -> Result<Vec<SnippetRecord>, BackendError> {
        (**self).fetch_page(query, offset, count)
    }
}

impl<B: SearchBackend + ?Sized> SearchBackend for std::sync::Arc<B> {
    fn fetch_page(
        &self,
        query: &Query,
        offset: usize,
        count: usize,
    ) -> Result<Vec<SnippetRecord>, BackendError> {
        (**self).fetch_page(query, offset, count)
    }
}

/// One ranked search hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snippet {
    pub text: String,
    pub url: String,
    /// Lower-case registrable domain.
    pub domain: String,
    /// 1-based position in the query's result list.
    pub rank: usize,
}

impl Snippet {
    pub fn new(text: impl Into<String>, url: impl Into<String>, domain: impl Into<String>, rank: usize) -> Self {
        Self {
            text: text.into(),
            url: url.into(),
            domain: domain.into(),
            rank,
        }
    }
}
