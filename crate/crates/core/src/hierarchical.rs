//! Agglomerative merging of cohesive sets.
//!
//! Starting from singletons, any pair of sets with positive cohesion is
//! merged until every remaining pair is incohesive. Each merge raises the
//! modularity `Q = sum_k g(S_k, S_k)` by `2 g(S_i, S_j)`, and every set left at
//! the end is a cluster.

use std::fmt::Write as _;

use crate::cohesion::{cohesion_sum, CohesionMatrix};
use crate::error::{domain, Result};
use crate::metric::PointSet;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergePolicy {
    /// Merge the most cohesive pair; ties go to the smallest id pair.
    #[default]
    GreedyMax,
    /// Merge the first cohesive pair in id-pair order.
    FirstFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeEvent {
    pub left: usize,
    pub right: usize,
    pub merged: usize,
    /// `g(S_left, S_right)` at the time of the merge.
    pub cohesion: f64,
    /// Set for merges requested past the natural stopping point.
    pub forced: bool,
}

/// Dendrogram of a run. Leaves carry ids `0..n`; the `i`-th merge creates id
/// `n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree {
    pub n: usize,
    pub events: Vec<MergeEvent>,
    /// Sets alive when the cohesive merges ran out, keyed by id.
    pub final_sets: Vec<(usize, PointSet)>,
    /// Sets alive after any forced merges; equals `final_sets` when none ran.
    pub forced_sets: Vec<(usize, PointSet)>,
}

impl MergeTree {
    pub fn natural_events(&self) -> impl Iterator<Item = &MergeEvent> {
        self.events.iter().filter(|e| !e.forced)
    }

    pub fn forced_events(&self) -> impl Iterator<Item = &MergeEvent> {
        self.events.iter().filter(|e| e.forced)
    }

    /// The stopping partition of cohesive merging.
    pub fn partition(&self) -> Partition {
        Self::to_partition(self.n, &self.final_sets)
    }

    pub fn forced_partition(&self) -> Partition {
        Self::to_partition(self.n, &self.forced_sets)
    }

    fn to_partition(n: usize, sets: &[(usize, PointSet)]) -> Partition {
        Partition::from_sets(n, sets.iter().map(|(_, s)| s.clone()).collect())
            .expect("merge tree sets partition the points")
    }

    /// Text dendrogram: `merge <a> <b> -> <k> gamma=<value>` per cohesive
    /// merge, then `final <id>: <members>` per surviving set, then
    /// `forced <a> <b> -> <k> gamma=<value>` per forced merge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in self.natural_events() {
            let _ = writeln!(
                out,
                "merge {} {} -> {} gamma={}",
                e.left, e.right, e.merged, e.cohesion
            );
        }
        for (id, s) in &self.final_sets {
            let _ = writeln!(out, "final {id}: {s}");
        }
        for e in self.forced_events() {
            let _ = writeln!(
                out,
                "forced {} {} -> {} gamma={}",
                e.left, e.right, e.merged, e.cohesion
            );
        }
        out
    }
}

struct Cluster {
    id: usize,
    slot: usize,
    members: Vec<usize>,
}

struct Agglomeration<'a> {
    g: &'a CohesionMatrix,
    /// Set-level cohesion indexed by slot; a merge reuses the left slot.
    table: Vec<f64>,
    stride: usize,
    alive: Vec<Cluster>,
    next_id: usize,
    tol: f64,
}

impl<'a> Agglomeration<'a> {
    fn new(g: &'a CohesionMatrix) -> Self {
        let n = g.n();
        Self {
            g,
            table: g.matrix().as_slice().to_vec(),
            stride: n,
            alive: (0..n)
                .map(|x| Cluster {
                    id: x,
                    slot: x,
                    members: vec![x],
                })
                .collect(),
            next_id: n,
            tol: g.tolerance(),
        }
    }

    fn cohesion(&self, a: usize, b: usize) -> f64 {
        self.table[self.alive[a].slot * self.stride + self.alive[b].slot]
    }

    /// Positions (into `alive`, which is sorted by id) of the pair to merge.
    fn select(&self, policy: MergePolicy, require_positive: bool) -> Option<(usize, usize)> {
        let k = self.alive.len();
        let pairs = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
        match policy {
            MergePolicy::FirstFound if require_positive => pairs
                .into_iter()
                .find(|&(i, j)| self.cohesion(i, j) > self.tol),
            _ => {
                let best = (0..k)
                    .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                    .map(|(i, j)| self.cohesion(i, j))
                    .fold(f64::NEG_INFINITY, f64::max);
                if !best.is_finite() || (require_positive && best <= self.tol) {
                    return None;
                }
                // Near-equal values are ties: rounding in the incremental
                // updates must not decide the order.
                (0..k)
                    .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                    .find(|&(i, j)| self.cohesion(i, j) >= best - self.tol)
            }
        }
    }

    fn merge(&mut self, i: usize, j: usize, forced: bool) -> MergeEvent {
        let (si, sj) = (self.alive[i].slot, self.alive[j].slot);
        let s = self.stride;
        let gij = self.table[si * s + sj];
        let self_term = self.table[si * s + si] + 2.0 * gij + self.table[sj * s + sj];
        for other in &self.alive {
            let l = other.slot;
            if l == si || l == sj {
                continue;
            }
            let v = self.table[si * s + l] + self.table[sj * s + l];
            self.table[si * s + l] = v;
            self.table[l * s + si] = v;
        }
        self.table[si * s + si] = self_term;

        let right = self.alive.remove(j);
        let mut left = self.alive.remove(i);
        let event = MergeEvent {
            left: left.id,
            right: right.id,
            merged: self.next_id,
            cohesion: gij,
            forced,
        };
        left.members.extend(right.members);
        left.members.sort_unstable();
        left.id = self.next_id;
        self.next_id += 1;
        // The fresh id is the largest, so pushing keeps `alive` sorted by id.
        self.alive.push(left);
        event
    }

    fn snapshot(&self) -> Vec<(usize, PointSet)> {
        let n = self.g.n();
        self.alive
            .iter()
            .map(|c| {
                (
                    c.id,
                    PointSet::new(n, c.members.iter().copied()).expect("members in range"),
                )
            })
            .collect()
    }

    #[cfg(test)]
    fn max_table_error(&self) -> f64 {
        let sets = self.snapshot();
        let mut worst = 0.0f64;
        for (a, (_, sa)) in sets.iter().enumerate() {
            for (b, (_, sb)) in sets.iter().enumerate() {
                let direct = cohesion_sum(self.g, sa, sb);
                worst = worst.max((direct - self.cohesion(a, b)).abs());
            }
        }
        worst
    }
}

/// Runs cohesive merging to its natural stop.
pub fn run_hierarchical(g: &CohesionMatrix, policy: MergePolicy) -> MergeTree {
    run_hierarchical_forced(g, policy, 0)
}

/// Runs cohesive merging, then performs up to `forced` additional merges of
/// the most cohesive remaining pair even though it is incohesive.
pub fn run_hierarchical_forced(
    g: &CohesionMatrix,
    policy: MergePolicy,
    forced: usize,
) -> MergeTree {
    let mut state = Agglomeration::new(g);
    let mut events = Vec::new();
    while let Some((i, j)) = state.select(policy, true) {
        events.push(state.merge(i, j, false));
    }
    let final_sets = state.snapshot();
    for _ in 0..forced {
        match state.select(MergePolicy::GreedyMax, false) {
            Some((i, j)) => events.push(state.merge(i, j, true)),
            None => break,
        }
    }
    let forced_sets = state.snapshot();
    MergeTree {
        n: g.n(),
        events,
        final_sets,
        forced_sets,
    }
}

/// Modularity `Q = sum_k g(S_k, S_k)`.
pub fn modularity(g: &CohesionMatrix, p: &Partition) -> Result<f64> {
    if p.n() != g.n() {
        return Err(domain(format!(
            "partition covers {} points, matrix has {}",
            p.n(),
            g.n()
        )));
    }
    Ok(p.sets().iter().map(|s| cohesion_sum(g, s, s)).sum())
}
