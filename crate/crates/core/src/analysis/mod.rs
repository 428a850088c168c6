//! Summaries of finished graphs, pattern-term analysis, and the pairwise
//! baseline used for comparison.

mod baseline;
mod mi;
mod porter;

use std::collections::BTreeMap;
use std::io::Write;

pub use baseline::{baseline_pairwise, overlap_coefficient};
pub use mi::{mutual_information, stemmed_terms, MiScore, Smoothing, TermCategoryTable};
pub use porter::stem;

use crate::engine::csv_err;
use crate::error::Result;
use crate::extract::EntityPair;
use crate::graph::SocialGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub standard_deviation: f64,
    pub median: f64,
    /// value -> frequency
    pub histogram: BTreeMap<u64, u64>,
    /// True when there were no values; the statistics are then zero.
    pub empty: bool,
}

impl DistributionSummary {
    pub fn from_values(values: &[u64]) -> Self {
        if values.is_empty() {
            return Self {
                count: 0,
                mean: 0.0,
                standard_deviation: 0.0,
                median: 0.0,
                histogram: BTreeMap::new(),
                empty: true,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid] as f64
        } else {
            (sorted[mid - 1] as f64 + sorted[mid] as f64) / 2.0
        };
        let mut histogram = BTreeMap::new();
        for &v in values {
            *histogram.entry(v).or_default() += 1;
        }
        Self {
            count: values.len(),
            mean,
            standard_deviation: var.sqrt(),
            median,
            histogram,
            empty: false,
        }
    }

    /// `value,frequency` rows in ascending value order.
    pub fn write_histogram_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = quoted_writer(w);
        out.write_record(["value", "frequency"]).map_err(csv_err)?;
        for (v, f) in &self.histogram {
            out.write_record([v.to_string(), f.to_string()]).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Degree distribution over every node, weight distribution over every edge.
pub fn summarize(graph: &SocialGraph) -> (DistributionSummary, DistributionSummary) {
    let degrees: Vec<u64> = graph.nodes().map(|n| graph.degree(n) as u64).collect();
    let weights: Vec<u64> = graph.edges().map(|(_, w)| w).collect();
    (
        DistributionSummary::from_values(&degrees),
        DistributionSummary::from_values(&weights),
    )
}

pub fn write_summary_table<W: Write>(
    mut w: W,
    degree: &DistributionSummary,
    weight: &DistributionSummary,
) -> Result<()> {
    writeln!(w, "measure\tcount\tmean\tsd\tmedian")?;
    for (name, s) in [("degree", degree), ("weight", weight)] {
        writeln!(
            w,
            "{name}\t{}\t{:.4}\t{:.4}\t{}",
            s.count, s.mean, s.standard_deviation, s.median
        )?;
    }
    Ok(())
}

/// The `k` heaviest relations as `(rank, pair, weight)`, ranks from 1.
pub fn top_relations(graph: &SocialGraph, k: usize) -> Vec<(usize, EntityPair, u64)> {
    graph
        .top_edges(k)
        .into_iter()
        .enumerate()
        .map(|(i, (pair, w))| (i + 1, pair, w))
        .collect()
}

pub fn write_top_relations_csv<W: Write>(w: W, relations: &[(usize, EntityPair, u64)]) -> Result<()> {
    let mut out = quoted_writer(w);
    out.write_record(["rank", "source", "target", "weight"]).map_err(csv_err)?;
    for (rank, pair, weight) in relations {
        out.write_record([
            rank.to_string(),
            pair.first().name().to_string(),
            pair.second().name().to_string(),
            weight.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_mi_csv<W: Write>(w: W, scores: &[MiScore]) -> Result<()> {
    let mut out = quoted_writer(w);
    out.write_record(["term", "category", "score"]).map_err(csv_err)?;
    for s in scores {
        out.write_record([s.term.as_str(), s.category.as_str(), &format!("{:.6}", s.score)])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn quoted_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::NonNumeric)
        .from_writer(w)
}
