//! Undirected weighted social graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::catalog::Entity;
use crate::error::{Error, Result};
use crate::extract::{EdgeEvidence, EntityPair};

/// Result of one [`SocialGraph::merge_evidence`] call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeOutcome {
    /// Endpoints that were not in the graph before, in name order.
    pub new_nodes: Vec<Entity>,
    /// Newly inserted edges with their initial weight, in pair order.
    pub new_edges: Vec<(EntityPair, u64)>,
    /// Existing edges whose weight grew.
    pub reinforced: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    GraphMl,
    Dot,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SocialGraph {
    nodes: BTreeSet<Entity>,
    edges: BTreeMap<EntityPair, u64>,
    degrees: HashMap<Entity, usize>,
}

impl SocialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes(nodes: impl IntoIterator<Item = Entity>) -> Self {
        let mut g = Self::new();
        for n in nodes {
            g.add_node(n);
        }
        g
    }

    /// Returns true if the node is new.
    pub fn add_node(&mut self, e: Entity) -> bool {
        self.nodes.insert(e)
    }

    pub fn contains_node(&self, e: &Entity) -> bool {
        self.nodes.contains(e)
    }

    pub fn contains_edge(&self, pair: &EntityPair) -> bool {
        self.edges.contains_key(pair)
    }

    pub fn weight(&self, pair: &EntityPair) -> Option<u64> {
        self.edges.get(pair).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Entity> {
        self.nodes.iter()
    }

    /// Edges in pair order.
    pub fn edges(&self) -> impl Iterator<Item = (&EntityPair, u64)> {
        self.edges.iter().map(|(p, w)| (p, *w))
    }

    pub fn degree(&self, e: &Entity) -> usize {
        self.degrees.get(e).copied().unwrap_or(0)
    }

    /// Adds `weight` to the edge, inserting it (and its endpoints) if absent.
    /// Returns true if the edge is new. Weights of zero are ignored.
    pub fn add_weight(&mut self, pair: EntityPair, weight: u64) -> bool {
        if weight == 0 {
            return false;
        }
        if let Some(w) = self.edges.get_mut(&pair) {
            *w += weight;
            return false;
        }
        self.nodes.insert(pair.first().clone());
        self.nodes.insert(pair.second().clone());
        *self.degrees.entry(pair.first().clone()).or_default() += 1;
        *self.degrees.entry(pair.second().clone()).or_default() += 1;
        self.edges.insert(pair, weight);
        true
    }

    /// Inserts pairs with `count >= tau` that are not yet edges and adds the
    /// count to pairs that already are, whatever the count.
    pub fn merge_evidence(&mut self, evidence: &[EdgeEvidence], tau: u64) -> MergeOutcome {
        let mut outcome = MergeOutcome::default();
        for ev in evidence {
            if ev.count == 0 {
                continue;
            }
            if self.edges.contains_key(&ev.pair) {
                self.add_weight(ev.pair.clone(), ev.count);
                outcome.reinforced += 1;
            } else if ev.count >= tau {
                for end in [ev.pair.first(), ev.pair.second()] {
                    if !self.nodes.contains(end) {
                        outcome.new_nodes.push(end.clone());
                    }
                }
                self.add_weight(ev.pair.clone(), ev.count);
                outcome.new_edges.push((ev.pair.clone(), ev.count));
            }
        }
        outcome.new_nodes.sort();
        outcome.new_nodes.dedup();
        outcome.new_edges.sort();
        outcome
    }

    /// The `h` heaviest edges; ties go to the lexicographically smaller pair.
    pub fn top_edges(&self, h: usize) -> Vec<(EntityPair, u64)> {
        let mut all: Vec<(EntityPair, u64)> = self.edges.iter().map(|(p, w)| (p.clone(), *w)).collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(h);
        all
    }

    pub fn export<W: Write>(&self, format: ExportFormat, sink: W) -> Result<()> {
        match format {
            ExportFormat::EdgeList => self.write_edge_list(sink),
            ExportFormat::GraphMl => self.write_graphml(sink),
            ExportFormat::Dot => self.write_dot(sink),
        }
    }

    /// `name1<TAB>name2<TAB>weight` per edge, sorted. Isolated nodes are not
    /// written.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for (pair, weight) in &self.edges {
            writeln!(w, "{}\t{}\t{}", pair.first(), pair.second(), weight)?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut g = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [a, b, w] = fields[..] else {
                return Err(Error::parse(i + 1, "expected name<TAB>name<TAB>weight"));
            };
            let weight: u64 = w
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad weight {w:?}")))?;
            if weight == 0 {
                return Err(Error::parse(i + 1, "weight must be positive"));
            }
            let pair = EntityPair::new(Entity::new(a), Entity::new(b))
                .ok_or_else(|| Error::parse(i + 1, "self-loop"))?;
            if !g.add_weight(pair, weight) {
                return Err(Error::parse(i + 1, "duplicate edge"));
            }
        }
        Ok(g)
    }

    fn write_graphml<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
        writeln!(w, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">"#)?;
        writeln!(w, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="long"/>"#)?;
        writeln!(w, r#"  <graph id="G" edgedefault="undirected">"#)?;
        for n in &self.nodes {
            writeln!(w, r#"    <node id="{}"/>"#, xml_escape(n.name()))?;
        }
        for (pair, weight) in &self.edges {
            writeln!(
                w,
                r#"    <edge source="{}" target="{}"><data key="weight">{}</data></edge>"#,
                xml_escape(pair.first().name()),
                xml_escape(pair.second().name()),
                weight
            )?;
        }
        writeln!(w, "  </graph>")?;
        writeln!(w, "</graphml>")?;
        Ok(())
    }

    fn write_dot<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "graph social {{")?;
        for n in &self.nodes {
            writeln!(w, "  \"{}\";", dot_escape(n.name()))?;
        }
        for (pair, weight) in &self.edges {
            writeln!(
                w,
                "  \"{}\" -- \"{}\" [weight={weight}];",
                dot_escape(pair.first().name()),
                dot_escape(pair.second().name())
            )?;
        }
        writeln!(w, "}}")?;
        Ok(())
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
