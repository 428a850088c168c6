use super::query::{Query, QueryKind};

/// One answered query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub query: String,
    pub kind: QueryKind,
    /// Backend requests actually sent.
    pub requests: u64,
    /// Requests counted against the budget.
    pub charged: u64,
    pub cached: bool,
}

/// Request accounting against an optional cap. Counters only grow.
///
/// Two counts are kept. `used_requests` is what the backend actually served.
/// `charged_requests` is what the same queries would have cost with an empty
/// cache, and is the one the cap applies to, so a warm cache changes spend
/// but not how far a run gets.
#[derive(Debug, Clone, Default)]
pub struct BudgetLedger {
    max_requests: Option<u64>,
    used_requests: u64,
    charged_requests: u64,
    pair_requests: u64,
    queries_issued: u64,
    cache_hits: u64,
    log: Vec<LedgerEntry>,
}

impl BudgetLedger {
    pub fn new(max_requests: u64) -> Self {
        Self {
            max_requests: Some(max_requests),
            ..Self::default()
        }
    }

    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn max_requests(&self) -> Option<u64> {
        self.max_requests
    }

    pub fn used_requests(&self) -> u64 {
        self.used_requests
    }

    pub fn charged_requests(&self) -> u64 {
        self.charged_requests
    }

    /// Requests spent on pair queries; included in `used_requests`.
    pub fn pair_requests(&self) -> u64 {
        self.pair_requests
    }

    /// Queries answered by the backend (cache hits excluded).
    pub fn queries_issued(&self) -> u64 {
        self.queries_issued
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits
    }

    pub fn log(&self) -> &[LedgerEntry] {
        &self.log
    }

    pub fn is_exhausted(&self) -> bool {
        self.max_requests.is_some_and(|max| self.charged_requests >= max)
    }

    /// Adds `requests` to both counts. The cap is not enforced here; a query
    /// batch that crosses it still completes.
    pub fn charge(&mut self, requests: u64) {
        self.used_requests += requests;
        self.charged_requests += requests;
    }

    pub(crate) fn record(&mut self, query: &Query, requests: u64, charged: u64, cached: bool) {
        self.used_requests += requests;
        self.charged_requests += charged;
        if query.kind() == QueryKind::Pair {
            self.pair_requests += requests;
        }
        if cached {
            self.cache_hits += 1;
        } else {
            self.queries_issued += 1;
        }
        self.log.push(LedgerEntry {
            query: query.raw().to_string(),
            kind: query.kind(),
            requests,
            charged,
            cached,
        });
    }
}
