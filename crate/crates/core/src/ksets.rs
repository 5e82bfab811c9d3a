//! Triangular distance and the K-sets / dual K-sets partitional algorithms.
//!
//! The triangular distance from a point to a set is
//! `Delta(x, S) = 2 dbar({x}, S) - dbar(S, S)`, or in cohesion form
//! `g(x,x) - (2/|S|) g({x}, S) + (1/|S|^2) g(S, S)`. K-sets repeatedly moves
//! each point to the set with the smallest triangular distance; every move
//! strictly increases the normalized modularity `R = sum_k g(S_k,S_k)/|S_k|`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohesion::{cohesion_sum, CohesionMatrix};
use crate::datagen::unit_f64;
use crate::error::{domain, Result};
use crate::metric::{check_set, scaled_tolerance, sum_between, DistanceMatrix, PointSet};
use crate::partition::Partition;

pub const DEFAULT_MAX_PASSES: usize = 100;

/// `2 dbar({x}, S) - dbar(S, S)`.
pub fn triangular_distance(d: &DistanceMatrix, x: usize, s: &PointSet) -> Result<f64> {
    check_set(d, s, "set")?;
    let size = s.len() as f64;
    let to_x: f64 = s.iter().map(|y| d.get(x, y)).sum();
    Ok(2.0 * to_x / size - sum_between(d, s, s) / (size * size))
}

/// Triangular distance computed from a cohesion matrix.
pub fn triangular_distance_cohesion(g: &CohesionMatrix, x: usize, s: &PointSet) -> Result<f64> {
    if s.is_empty() {
        return Err(domain("set must be nonempty"));
    }
    if s.universe() != g.n() {
        return Err(domain("point set does not match matrix size"));
    }
    let size = s.len() as f64;
    let to_x: f64 = s.iter().map(|y| g.get(x, y)).sum();
    Ok(g.get(x, x) - 2.0 * to_x / size + cohesion_sum(g, s, s) / (size * size))
}

/// Normalized modularity `R = sum_k g(S_k, S_k) / |S_k|`.
pub fn normalized_modularity(g: &CohesionMatrix, p: &Partition) -> Result<f64> {
    if p.n() != g.n() {
        return Err(domain(format!(
            "partition covers {} points, matrix has {}",
            p.n(),
            g.n()
        )));
    }
    Ok(p.sets()
        .iter()
        .map(|s| cohesion_sum(g, s, s) / s.len() as f64)
        .sum())
}

/// Squared distance from `phi(x)` to the centroid of `phi(S)` under the Gram
/// matrix `sigma I + G`, expanded from Gram entries (`lhs`), against the
/// closed form `(1 - 2/|S| [x in S] + 1/|S|) sigma + Delta(x, S)` (`rhs`).
pub fn kernel_identity_check(
    g: &CohesionMatrix,
    sigma: f64,
    x: usize,
    s: &PointSet,
) -> Result<(f64, f64)> {
    let delta = triangular_distance_cohesion(g, x, s)?;
    let gram = |i: usize, j: usize| g.get(i, j) + if i == j { sigma } else { 0.0 };
    let size = s.len() as f64;
    let cross: f64 = s.iter().map(|y| gram(x, y)).sum();
    let within: f64 = s
        .iter()
        .map(|y1| s.iter().map(|y2| gram(y1, y2)).sum::<f64>())
        .sum();
    let lhs = gram(x, x) - 2.0 * cross / size + within / (size * size);
    let indicator = if s.contains(x) { 1.0 } else { 0.0 };
    let rhs = (1.0 - 2.0 / size * indicator + 1.0 / size) * sigma + delta;
    Ok((lhs, rhs))
}

/// `2 dbar(Si, Sj) - dbar(Si, Si) - dbar(Sj, Sj)` for every pair `i < j`.
/// Nonnegative values mean the two sets are clusters when viewed in isolation.
pub fn pairwise_separation(d: &DistanceMatrix, p: &Partition) -> Vec<((usize, usize), f64)> {
    let sets = p.sets();
    let avg = |a: &PointSet, b: &PointSet| sum_between(d, a, b) / (a.len() * b.len()) as f64;
    let within: Vec<f64> = sets.iter().map(|s| avg(s, s)).collect();
    let mut out = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            out.push((
                (i, j),
                2.0 * avg(&sets[i], &sets[j]) - within[i] - within[j],
            ));
        }
    }
    out
}

/// Uniform random assignment of `n` points to `k` labels, redrawn until every
/// label is used.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    check_k(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let labels: Vec<usize> = (0..n)
            .map(|_| ((unit_f64(rng.next_u64()) * k as f64) as usize).min(k - 1))
            .collect();
        let mut used = vec![false; k];
        for &l in &labels {
            used[l] = true;
        }
        if used.iter().all(|&u| u) {
            return Partition::from_labels(&labels);
        }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        Err(domain(format!("K = {k} must satisfy 2 <= K <= n = {n}")))
    } else {
        Ok(())
    }
}

/// Starting partition for a K-sets run.
#[derive(Debug, Clone)]
pub enum Init {
    Partition(Partition),
    /// Seeded [`random_partition`].
    Seed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveRecord {
    /// Zero-based pass in which the move happened.
    pub pass: usize,
    pub point: usize,
    pub from: usize,
    pub to: usize,
    /// `Delta(point, S_from)` before the move.
    pub delta_from: f64,
    /// `Delta(point, S_to)` before the move.
    pub delta_to: f64,
    /// The point was the sole member of `from`, so it stayed put.
    pub skipped: bool,
}

#[derive(Debug, Clone)]
pub struct KSetsRun {
    pub partition: Partition,
    pub history: Vec<MoveRecord>,
    /// `R` of the initial partition followed by `R` after each applied move.
    pub r_trace: Vec<f64>,
    /// Passes executed, including the final pass without changes.
    pub passes: usize,
    pub converged: bool,
}

impl KSetsRun {
    pub fn moves(&self) -> impl Iterator<Item = &MoveRecord> {
        self.history.iter().filter(|m| !m.skipped)
    }

    pub fn move_count(&self) -> usize {
        self.moves().count()
    }

    pub fn final_r(&self) -> f64 {
        *self.r_trace.last().expect("trace holds the initial value")
    }
}

/// How a K-sets variant turns maintained sums into triangular distances.
trait SetGeometry {
    fn n(&self) -> usize;
    fn entry(&self, x: usize, y: usize) -> f64;
    /// `Delta(x, S)` from `sum_{y in S} e(x, y)`, `sum_{y,z in S} e(y, z)`, `|S|`.
    fn delta(&self, x: usize, to_set: f64, within: f64, size: f64) -> f64;
    /// `R` from per-set within-sums and sizes.
    fn normalized_modularity(&self, within: &[f64], sizes: &[usize]) -> f64;
    /// Scale of the induced distances, for the move tolerance.
    fn distance_scale(&self) -> f64;
}

struct DistanceGeometry<'a> {
    d: &'a DistanceMatrix,
    /// `sum_x g(x, x)`, which equals `n * dbar(Omega, Omega)`.
    trace: f64,
}

impl SetGeometry for DistanceGeometry<'_> {
    fn n(&self) -> usize {
        self.d.n()
    }

    #[inline]
    fn entry(&self, x: usize, y: usize) -> f64 {
        self.d.get(x, y)
    }

    #[inline]
    fn delta(&self, _x: usize, to_set: f64, within: f64, size: f64) -> f64 {
        2.0 * to_set / size - within / (size * size)
    }

    fn normalized_modularity(&self, within: &[f64], sizes: &[usize]) -> f64 {
        let spread: f64 = within.iter().zip(sizes).map(|(w, &s)| w / s as f64).sum();
        self.trace - spread
    }

    fn distance_scale(&self) -> f64 {
        self.d.max_entry()
    }
}

struct CohesionGeometry<'a> {
    g: &'a CohesionMatrix,
}

impl SetGeometry for CohesionGeometry<'_> {
    fn n(&self) -> usize {
        self.g.n()
    }

    #[inline]
    fn entry(&self, x: usize, y: usize) -> f64 {
        self.g.get(x, y)
    }

    #[inline]
    fn delta(&self, x: usize, to_set: f64, within: f64, size: f64) -> f64 {
        self.g.get(x, x) - 2.0 * to_set / size + within / (size * size)
    }

    fn normalized_modularity(&self, within: &[f64], sizes: &[usize]) -> f64 {
        within.iter().zip(sizes).map(|(w, &s)| w / s as f64).sum()
    }

    fn distance_scale(&self) -> f64 {
        let n = self.g.n();
        let mut scale = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                let d = (self.g.get(x, x) + self.g.get(y, y)) / 2.0 - self.g.get(x, y);
                scale = scale.max(d.abs());
            }
        }
        scale
    }
}

/// Incrementally maintained K-sets state.
struct Assignment<'a, G: SetGeometry> {
    geom: &'a G,
    k: usize,
    label: Vec<usize>,
    sizes: Vec<usize>,
    /// `to_set[x * k + c] = sum_{y in S_c} e(x, y)`.
    to_set: Vec<f64>,
    /// `within[c] = sum_{y, z in S_c} e(y, z)`.
    within: Vec<f64>,
}

impl<'a, G: SetGeometry> Assignment<'a, G> {
    fn new(geom: &'a G, p: &Partition) -> Self {
        let n = geom.n();
        let k = p.k();
        let label = p.assignment().to_vec();
        let mut sizes = vec![0; k];
        for &c in &label {
            sizes[c] += 1;
        }
        let mut to_set = vec![0.0; n * k];
        for x in 0..n {
            for y in 0..n {
                to_set[x * k + label[y]] += geom.entry(x, y);
            }
        }
        let mut within = vec![0.0; k];
        for x in 0..n {
            within[label[x]] += to_set[x * k + label[x]];
        }
        Self {
            geom,
            k,
            label,
            sizes,
            to_set,
            within,
        }
    }

    #[inline]
    fn delta(&self, x: usize, c: usize) -> f64 {
        self.geom.delta(
            x,
            self.to_set[x * self.k + c],
            self.within[c],
            self.sizes[c] as f64,
        )
    }

    fn move_point(&mut self, x: usize, to: usize) {
        let from = self.label[x];
        let k = self.k;
        let exx = self.geom.entry(x, x);
        self.within[from] -= 2.0 * self.to_set[x * k + from] - exx;
        self.within[to] += 2.0 * self.to_set[x * k + to] + exx;
        for z in 0..self.geom.n() {
            let e = self.geom.entry(z, x);
            self.to_set[z * k + from] -= e;
            self.to_set[z * k + to] += e;
        }
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        self.label[x] = to;
    }

    fn normalized_modularity(&self) -> f64 {
        self.geom.normalized_modularity(&self.within, &self.sizes)
    }

    fn partition(&self) -> Partition {
        Partition::from_labels(&self.label).expect("no set is ever emptied")
    }

    #[cfg(test)]
    fn max_drift(&self) -> f64 {
        let fresh = Assignment::new(self.geom, &self.partition());
        let a = self
            .to_set
            .iter()
            .zip(&fresh.to_set)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        self.within
            .iter()
            .zip(&fresh.within)
            .fold(a, |m, (x, y)| m.max((x - y).abs()))
    }
}

fn resolve_init(n: usize, k: usize, init: Init) -> Result<Partition> {
    check_k(n, k)?;
    match init {
        Init::Seed(seed) => random_partition(n, k, seed),
        Init::Partition(p) => {
            if p.n() != n {
                return Err(domain(format!(
                    "initial partition covers {} points, expected {n}",
                    p.n()
                )));
            }
            if p.k() != k {
                return Err(domain(format!(
                    "initial partition has {} sets, expected K = {k}",
                    p.k()
                )));
            }
            Ok(p)
        }
    }
}

fn run_engine<G: SetGeometry>(
    geom: &G,
    k: usize,
    init: Init,
    max_passes: usize,
) -> Result<KSetsRun> {
    let n = geom.n();
    let start = resolve_init(n, k, init)?;
    let tol = scaled_tolerance(geom.distance_scale());
    let mut state = Assignment::new(geom, &start);
    let mut history = Vec::new();
    let mut r_trace = vec![state.normalized_modularity()];
    let mut passes = 0;
    let mut converged = false;

    while passes < max_passes {
        let pass = passes;
        passes += 1;
        let mut changed = false;
        for x in 0..n {
            let current = state.label[x];
            let here = state.delta(x, current);
            let deltas: Vec<f64> = (0..k).map(|c| state.delta(x, c)).collect();
            let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
            // Sets within `tol` of the minimum tie: the current set wins a
            // tie, otherwise the lowest id. Judging ties with a tolerance keeps
            // the primal and dual runs on the same path despite rounding.
            if here <= min + tol {
                continue;
            }
            let best = (0..k)
                .find(|&c| deltas[c] <= min + tol)
                .expect("minimum is attained");
            let best_delta = deltas[best];
            let skipped = state.sizes[current] == 1;
            history.push(MoveRecord {
                pass,
                point: x,
                from: current,
                to: best,
                delta_from: here,
                delta_to: best_delta,
                skipped,
            });
            if skipped {
                continue;
            }
            state.move_point(x, best);
            r_trace.push(state.normalized_modularity());
            changed = true;
        }
        if !changed {
            converged = true;
            break;
        }
    }

    Ok(KSetsRun {
        partition: state.partition(),
        history,
        r_trace,
        passes,
        converged,
    })
}

/// K-sets on a distance matrix.
///
/// Points are visited in index order; a point moves only if another set is
/// closer by more than `tol = 1e-9 * max d`. Sets within `tol` of the closest
/// count as tied (current set first, then lowest id). The sole member of a set
/// never moves; the attempt is recorded as a skipped move. Stops after a pass
/// without moves or after `max_passes` passes.
pub fn run_ksets(d: &DistanceMatrix, k: usize, init: Init, max_passes: usize) -> Result<KSetsRun> {
    let trace = d.n() as f64 * d.matrix().mean();
    run_engine(&DistanceGeometry { d, trace }, k, init, max_passes)
}

/// Dual K-sets on a cohesion matrix. On the dual of a distance matrix it
/// reproduces [`run_ksets`] move for move.
pub fn run_dual_ksets(
    g: &CohesionMatrix,
    k: usize,
    init: Init,
    max_passes: usize,
) -> Result<KSetsRun> {
    run_engine(&CohesionGeometry { g }, k, init, max_passes)
}

/// Dense point-to-set triangular distances of a partition, `n x K`
/// flattened, for reporting.
pub fn triangular_distances(d: &DistanceMatrix, p: &Partition) -> Vec<f64> {
    let trace = d.n() as f64 * d.matrix().mean();
    let geom = DistanceGeometry { d, trace };
    let state = Assignment::new(&geom, p);
    (0..d.n())
        .flat_map(|x| (0..p.k()).map(move |c| (x, c)))
        .map(|(x, c)| state.delta(x, c))
        .collect()
}
