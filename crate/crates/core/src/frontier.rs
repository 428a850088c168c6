//! Expansion frontier: first-in-first-out or popularity/novelty priority.
//!
//! The priority of a queued entity is `degree * exp(-alpha * age)`, where
//! `age` is the number of expansion steps since it was enqueued and the
//! degree is read from the live graph at pop time.

use std::collections::{HashSet, VecDeque};

use crate::catalog::Entity;
use crate::graph::SocialGraph;

/// Decay settings commonly compared: pure popularity and two novelty levels.
pub const STANDARD_ALPHAS: [f64; 3] = [0.0, 0.005, 0.01];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrontierMode {
    Fifo,
    Priority { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierEntry {
    pub entity: Entity,
    /// Expansion steps completed when the entity was enqueued.
    pub inserted_at_step: u64,
    /// Global enqueue order.
    seq: u64,
}

/// `degree * exp(-alpha * (current_step - inserted_at_step))`.
pub fn compute_priority(
    entry: &FrontierEntry,
    graph: &SocialGraph,
    current_step: u64,
    alpha: f64,
) -> f64 {
    let age = current_step.saturating_sub(entry.inserted_at_step) as f64;
    graph.degree(&entry.entity) as f64 * (-alpha * age).exp()
}

#[derive(Debug, Clone, Default)]
pub struct Frontier {
    queue: VecDeque<FrontierEntry>,
    queued: HashSet<Entity>,
    visited: HashSet<Entity>,
    next_seq: u64,
}

impl Frontier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Enqueues `entity` unless it is already queued or was popped before.
    pub fn push(&mut self, entity: Entity, step: u64) -> bool {
        if self.visited.contains(&entity) || self.queued.contains(&entity) {
            return false;
        }
        self.queued.insert(entity.clone());
        self.queue.push_back(FrontierEntry {
            entity,
            inserted_at_step: step,
            seq: self.next_seq,
        });
        self.next_seq += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn is_visited(&self, e: &Entity) -> bool {
        self.visited.contains(e)
    }

    pub fn is_queued(&self, e: &Entity) -> bool {
        self.queued.contains(e)
    }

    pub fn entries(&self) -> impl Iterator<Item = &FrontierEntry> {
        self.queue.iter()
    }

    /// Removes the next entry and marks it visited. In priority mode the
    /// highest score wins; ties go to the earlier step, then to the earlier
    /// enqueue.
    pub fn pop_next(
        &mut self,
        graph: &SocialGraph,
        current_step: u64,
        mode: FrontierMode,
    ) -> Option<FrontierEntry> {
        let index = match mode {
            FrontierMode::Fifo => 0,
            FrontierMode::Priority { alpha } => {
                // TODO: switch to a lazily re-keyed max-heap (key ln(degree) + alpha * t)
                // once frontiers grow past desk scale; this scan is O(len) per pop.
                let mut best: Option<(usize, f64)> = None;
                for (i, entry) in self.queue.iter().enumerate() {
                    let phi = compute_priority(entry, graph, current_step, alpha);
                    let better = match best {
                        None => true,
                        Some((j, best_phi)) => {
                            let cur = &self.queue[j];
                            phi > best_phi
                                || (phi == best_phi
                                    && (entry.inserted_at_step, entry.seq)
                                        < (cur.inserted_at_step, cur.seq))
                        }
                    };
                    if better {
                        best = Some((i, phi));
                    }
                }
                best?.0
            }
        };
        let entry = self.queue.remove(index)?;
        self.queued.remove(&entry.entity);
        self.visited.insert(entry.entity.clone());
        Some(entry)
    }
}
