//! HTTP web-search backend.
//!
//! Speaks the Bing Web Search v7 response shape: `GET <endpoint>?q=..&count=..&offset=..`
//! with the key in the `Ocp-Apim-Subscription-Key` header, answering
//! `{"webPages": {"value": [{"name", "url", "snippet"}]}}`. Any service that
//! answers in that shape can be used by pointing `endpoint` at it.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::Deserialize;

use super::domain::registrable_domain;
use super::query::Query;
use super::record::SnippetRecord;
use super::{BackendError, SearchBackend};
use crate::error::{Error, Result};

pub const DEFAULT_ENDPOINT: &str = "https://api.bing.microsoft.com/v7.0/search";
pub const DEFAULT_API_KEY_ENV: &str = "SEARCH_API_KEY";

#[derive(Debug, Clone)]
pub struct LiveConfig {
    pub endpoint: String,
    pub api_key: String,
    /// Maximum concurrent in-flight requests.
    pub max_in_flight: usize,
    /// Minimum spacing between request starts.
    pub min_interval: Duration,
    pub timeout: Duration,
}

impl LiveConfig {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            max_in_flight: 4,
            min_interval: Duration::from_millis(100),
            timeout: Duration::from_secs(30),
        }
    }

    /// Reads the key from the environment variable `var`.
    pub fn from_env(endpoint: impl Into<String>, var: &str) -> Result<Self> {
        let key = std::env::var(var)
            .map_err(|_| Error::config(format!("environment variable {var} is not set")))?;
        Ok(Self::new(endpoint, key))
    }
}

#[derive(Debug, Deserialize)]
struct ApiResponse {
    #[serde(rename = "webPages")]
    web_pages: Option<WebPages>,
}

#[derive(Debug, Deserialize)]
struct WebPages {
    #[serde(default)]
    value: Vec<WebPage>,
}

#[derive(Debug, Deserialize)]
struct WebPage {
    url: String,
    #[serde(default)]
    snippet: String,
}

/// Converts an API response body into snippet records. Hits whose URL has no
/// usable host are dropped.
pub fn parse_response(body: &str) -> std::result::Result<Vec<SnippetRecord>, BackendError> {
    let parsed: ApiResponse =
        serde_json::from_str(body).map_err(|e| BackendError::new(format!("bad response: {e}")))?;
    Ok(parsed
        .web_pages
        .map(|p| p.value)
        .unwrap_or_default()
        .into_iter()
        .filter_map(|page| {
            let domain = registrable_domain(&page.url)?;
            Some(SnippetRecord::new(page.url, domain, page.snippet))
        })
        .collect())
}

#[derive(Debug, Default)]
struct Throttle {
    in_flight: usize,
    last_start: Option<Instant>,
}

pub struct LiveBackend {
    config: LiveConfig,
    client: reqwest::blocking::Client,
    throttle: Mutex<Throttle>,
    slot_free: Condvar,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .user_agent(concat!("socmine/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| Error::config(format!("HTTP client: {e}")))?;
        Ok(Self {
            config,
            client,
            throttle: Mutex::default(),
            slot_free: Condvar::new(),
        })
    }

    fn acquire(&self) {
        let mut t = self.throttle.lock().expect("throttle lock");
        loop {
            if t.in_flight < self.config.max_in_flight.max(1) {
                let wait = t
                    .last_start
                    .map(|s| self.config.min_interval.saturating_sub(s.elapsed()))
                    .unwrap_or_default();
                if wait.is_zero() {
                    t.in_flight += 1;
                    t.last_start = Some(Instant::now());
                    return;
                }
                t = self.slot_free.wait_timeout(t, wait).expect("throttle lock").0;
            } else {
                t = self.slot_free.wait(t).expect("throttle lock");
            }
        }
    }

    fn release(&self) {
        self.throttle.lock().expect("throttle lock").in_flight -= 1;
        self.slot_free.notify_all();
    }
}

impl SearchBackend for LiveBackend {
    fn fetch_page(
        &self,
        query: &Query,
        offset: usize,
        count: usize,
    ) -> std::result::Result<Vec<SnippetRecord>, BackendError> {
        self.acquire();
        let response = self
            .client
            .get(&self.config.endpoint)
            .query(&[
                ("q", query.raw().to_string()),
                ("count", count.to_string()),
                ("offset", offset.to_string()),
            ])
            .header("Ocp-Apim-Subscription-Key", &self.config.api_key)
            .send()
            .and_then(|r| r.error_for_status())
            .and_then(|r| r.text());
        self.release();
        let body = response.map_err(|e| BackendError::new(e.to_string()))?;
        parse_response(&body)
    }
}
