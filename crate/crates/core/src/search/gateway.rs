use std::collections::HashSet;
use std::sync::Mutex;
use std::time::Duration;

use super::cache::QueryCache;
use super::ledger::BudgetLedger;
use super::query::Query;
use super::record::SnippetRecord;
use super::{SearchBackend, Snippet, DEFAULT_TOP_K, PAGE_SIZE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each further failure.
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            initial_backoff: Duration::from_secs(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GatewayConfig {
    /// Results kept per query.
    pub top_k: usize,
    pub page_size: usize,
    pub retry: RetryPolicy,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        Self {
            top_k: DEFAULT_TOP_K,
            page_size: PAGE_SIZE,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub snippets: Vec<Snippet>,
    /// Backend requests issued for this call; zero on a cache hit.
    pub requests: u64,
    /// Requests counted against the budget: the uncached cost the first time
    /// a query is asked through this gateway, zero on repeats.
    pub charged: u64,
    pub cached: bool,
}

/// Front door to a backend: paging, retries, caching, and budget accounting.
pub struct SearchGateway {
    backend: Box<dyn SearchBackend>,
    cache: QueryCache,
    ledger: Mutex<BudgetLedger>,
    /// Cache keys already charged in this session.
    charged: Mutex<HashSet<String>>,
    config: GatewayConfig,
}

impl SearchGateway {
    pub fn new(
        backend: impl SearchBackend + 'static,
        cache: QueryCache,
        ledger: BudgetLedger,
        config: GatewayConfig,
    ) -> Self {
        Self {
            backend: Box::new(backend),
            cache,
            ledger: Mutex::new(ledger),
            charged: Mutex::new(HashSet::new()),
            config,
        }
    }

    pub fn config(&self) -> &GatewayConfig {
        &self.config
    }

    /// Snapshot of the ledger.
    pub fn ledger(&self) -> BudgetLedger {
        self.ledger.lock().expect("ledger lock").clone()
    }

    pub fn used_requests(&self) -> u64 {
        self.ledger.lock().expect("ledger lock").used_requests()
    }

    pub fn charged_requests(&self) -> u64 {
        self.ledger.lock().expect("ledger lock").charged_requests()
    }

    pub fn is_exhausted(&self) -> bool {
        self.ledger.lock().expect("ledger lock").is_exhausted()
    }

    pub fn cache(&self) -> &QueryCache {
        &self.cache
    }

    /// Up to `top_k` results for `query`.
    pub fn search(&self, query: &Query) -> Result<SearchResult> {
        self.search_top(query, self.config.top_k)
    }

    pub fn search_top(&self, query: &Query, k: usize) -> Result<SearchResult> {
        if k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        let key = query.cache_key();
        let first = !self.charged.lock().expect("charge lock").contains(&key);
        if first {
            let ledger = self.ledger.lock().expect("ledger lock");
            if ledger.is_exhausted() {
                return Err(Error::BudgetExhausted {
                    used: ledger.charged_requests(),
                    max: ledger.max_requests().unwrap_or(u64::MAX),
                });
            }
        }
        let page_size = self.config.page_size.max(1);
        if let Some(entry) = self.cache.get(query)? {
            let charged = if first {
                entry
                    .requests
                    .unwrap_or_else(|| uncached_cost(entry.records.len(), self.config.top_k, page_size))
            } else {
                0
            };
            self.charged.lock().expect("charge lock").insert(key);
            self.ledger
                .lock()
                .expect("ledger lock")
                .record(query, 0, charged, true);
            return Ok(SearchResult {
                snippets: rank(entry.records.into_iter().take(k)),
                requests: 0,
                charged,
                cached: true,
            });
        }

        let pages = k.div_ceil(page_size);
        let mut records = Vec::new();
        let mut requests = 0u64;
        let mut failure = None;
        for page in 0..pages {
            match self.fetch_with_retry(query, page * page_size, page_size) {
                Ok(batch) => {
                    requests += 1;
                    let short = batch.len() < page_size;
                    records.extend(batch);
                    if short {
                        break;
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        self.ledger
            .lock()
            .expect("ledger lock")
            .record(query, requests, requests, false);
        if let Some(e) = failure {
            return Err(e);
        }
        self.charged.lock().expect("charge lock").insert(key);

        let mut seen = HashSet::new();
        records.retain(|r| seen.insert((r.url.clone(), r.text.clone())));
        records.truncate(k);
        self.cache.put(query, &records, requests)?;
        Ok(SearchResult {
            snippets: rank(records),
            requests,
            charged: requests,
            cached: false,
        })
    }

    fn fetch_with_retry(&self, query: &Query, offset: usize, count: usize) -> Result<Vec<SnippetRecord>> {
        let attempts = self.config.retry.attempts.max(1);
        let mut delay = self.config.retry.initial_backoff;
        let mut last = None;
        for attempt in 1..=attempts {
            match self.backend.fetch_page(query, offset, count) {
                Ok(batch) => return Ok(batch),
                Err(e) => {
                    log::warn!("search {:?} offset {offset} attempt {attempt} failed: {e}", query.raw());
                    last = Some(e);
                    if attempt < attempts {
                        std::thread::sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(Error::Backend {
            attempts,
            message: last.map(|e| e.0).unwrap_or_default(),
        })
    }
}

/// Pages an uncached fetch of `found` results would have taken.
fn uncached_cost(found: usize, top_k: usize, page_size: usize) -> u64 {
    let full = found.min(top_k) / page_size;
    let probe = usize::from(found < top_k);
    (full + probe).clamp(1, top_k.div_ceil(page_size)) as u64
}

fn rank(records: impl IntoIterator<Item = SnippetRecord>) -> Vec<Snippet> {
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| Snippet {
            text: r.text,
            url: r.url,
            domain: r.domain,
            rank: i + 1,
        })
        .collect()
}
