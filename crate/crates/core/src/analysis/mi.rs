//! Pointwise mutual information between stemmed pattern terms and categories.

use std::collections::BTreeMap;

use super::porter::stem;
use crate::text::normalize;

/// Co-occurrence counts of stemmed terms with category labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermCategoryTable {
    counts: BTreeMap<(String, String), u64>,
    term_totals: BTreeMap<String, u64>,
    category_totals: BTreeMap<String, u64>,
    total: u64,
}

/// Lower-cased, stemmed word tokens of a phrase.
pub fn stemmed_terms(phrase: &str) -> Vec<String> {
    normalize(phrase)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(stem)
        .collect()
}

impl TermCategoryTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` to an already-stemmed term.
    pub fn add(&mut self, term: &str, category: &str, count: u64) {
        *self
            .counts
            .entry((term.to_string(), category.to_string()))
            .or_default() += count;
        *self.term_totals.entry(term.to_string()).or_default() += count;
        *self.category_totals.entry(category.to_string()).or_default() += count;
        self.total += count;
    }

    /// Stems every word of `phrase` and adds `weight` for each.
    pub fn add_phrase(&mut self, phrase: &str, category: &str, weight: u64) {
        for term in stemmed_terms(phrase) {
            self.add(&term, category, weight);
        }
    }

    pub fn count(&self, term: &str, category: &str) -> u64 {
        self.counts
            .get(&(term.to_string(), category.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn term_total(&self, term: &str) -> u64 {
        self.term_totals.get(term).copied().unwrap_or(0)
    }

    pub fn category_total(&self, category: &str) -> u64 {
        self.category_totals.get(category).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Terms with a non-zero total, sorted.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_totals
            .iter()
            .filter(|(_, n)| **n > 0)
            .map(|(t, _)| t.as_str())
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.category_totals.keys().map(String::as_str)
    }

    pub fn scaled(&self, factor: u64) -> Self {
        let mut out = Self::new();
        for ((t, c), n) in &self.counts {
            out.add(t, c, n * factor);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// One pseudo-count per (term, category) cell.
    #[default]
    AddOne,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiScore {
    pub term: String,
    pub category: String,
    pub score: f64,
}

/// `ln(P(t,c) / (P(t) P(c)))` for every term and category. Grouped by
/// category in name order, then by descending score, then by term.
///
/// Without smoothing, cells with a zero count have no finite score and are
/// left out.
pub fn mutual_information(table: &TermCategoryTable, smoothing: Smoothing) -> Vec<MiScore> {
    let terms: Vec<&str> = table.terms().collect();
    let categories: Vec<&str> = table.categories().collect();
    let pseudo = match smoothing {
        Smoothing::AddOne => 1.0,
        Smoothing::None => 0.0,
    };
    let n = table.total() as f64 + pseudo * (terms.len() * categories.len()) as f64;
    let mut out = Vec::new();
    if n == 0.0 {
        return out;
    }
    for category in &categories {
        let p_c = (table.category_total(category) as f64 + pseudo * terms.len() as f64) / n;
        let mut scores: Vec<MiScore> = terms
            .iter()
            .filter_map(|term| {
                let joint = table.count(term, category) as f64 + pseudo;
                if joint == 0.0 {
                    return None;
                }
                let p_t = (table.term_total(term) as f64 + pseudo * categories.len() as f64) / n;
                Some(MiScore {
                    term: term.to_string(),
                    category: category.to_string(),
                    score: (joint / n / (p_t * p_c)).ln(),
                })
            })
            .collect();
        scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
        out.extend(scores);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(list: &[MiScore], term: &str, category: &str) -> f64 {
        list.iter()
            .find(|s| s.term == term && s.category == category)
            .map(|s| s.score)
            .unwrap()
    }

    fn two_by_two() -> TermCategoryTable {
        let mut t = TermCategoryTable::new();
        t.add("x", "c1", 8);
        t.add("x", "c2", 2);
        t.add("y", "c1", 2);
        t.add("y", "c2", 8);
        t
    }

    #[test]
    fn smoothed_two_by_two() {
        // cells become 9,3,3,9 out of 24; every marginal is 1/2
        let mi = mutual_information(&two_by_two(), Smoothing::AddOne);
        let hi = ((9.0 / 24.0) / 0.25f64).ln();
        let lo = ((3.0 / 24.0) / 0.25f64).ln();
        assert!((score(&mi, "x", "c1") - hi).abs() < 1e-9);
        assert!((score(&mi, "x", "c2") - lo).abs() < 1e-9);
        assert!((score(&mi, "y", "c2") - hi).abs() < 1e-9);
        assert!((hi - 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn unsmoothed_two_by_two() {
        let mi = mutual_information(&two_by_two(), Smoothing::None);
        assert!((score(&mi, "x", "c1") - 1.6f64.ln()).abs() < 1e-9);
        assert!((score(&mi, "y", "c1") - 0.4f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn exclusive_and_uniform_terms() {
        let mut t = TermCategoryTable::new();
        t.add("only", "politics", 5);
        t.add("both", "politics", 5);
        t.add("both", "movies", 5);
        t.add("other", "movies", 5);
        let mi = mutual_information(&t, Smoothing::AddOne);
        assert!(score(&mi, "only", "politics") > 0.0);
        assert!(score(&mi, "only", "movies") < 0.0);
        assert!(score(&mi, "both", "politics").abs() < 1e-12);
        // ranking: category order, then score
        assert_eq!(mi[0].category, "movies");
        assert_eq!(mi[0].term, "other");
    }

    #[test]
    fn phrases_are_stemmed() {
        let mut t = TermCategoryTable::new();
        t.add_phrase("and President", "politics", 2);
        t.add_phrase("played with", "movies", 1);
        assert_eq!(t.count("presid", "politics"), 2);
        assert_eq!(t.count("plai", "movies"), 1);
        assert_eq!(t.total(), 6);
    }

    proptest! {
        #[test]
        fn unsmoothed_scores_are_scale_invariant(
            cells in proptest::collection::vec((0usize..5, 0usize..3, 1u64..50), 1..20),
            factor in 1u64..20,
        ) {
            let mut t = TermCategoryTable::new();
            for (term, cat, n) in cells {
                t.add(&format!("t{term}"), &format!("c{cat}"), n);
            }
            let a = mutual_information(&t, Smoothing::None);
            let b = mutual_information(&t.scaled(factor), Smoothing::None);
            prop_assert_eq!(a.len(), b.len());
            for x in &a {
                prop_assert!((x.score - score(&b, &x.term, &x.category)).abs() < 1e-9);
            }
        }

        #[test]
        fn marginals_match_cells(cells in proptest::collection::vec((0usize..5, 0usize..3, 0u64..50), 0..20)) {
            let mut t = TermCategoryTable::new();
            for (term, cat, n) in cells {
                t.add(&format!("t{term}"), &format!("c{cat}"), n);
            }
            let cats: Vec<String> = t.categories().map(str::to_string).collect();
            for term in t.terms() {
                let row: u64 = cats.iter().map(|c| t.count(term, c)).sum();
                prop_assert_eq!(row, t.term_total(term));
            }
            let all: u64 = cats.iter().map(|c| t.category_total(c)).sum();
            prop_assert_eq!(all, t.total());
        }
    }
}
