//! Brute-force oracles and seeded instance pools shared by the integration
//! tests and the acceptance runner. Everything here is computed straight from
//! the definitions, without touching the library's incremental machinery.
#![allow(dead_code, clippy::type_complexity, clippy::needless_range_loop)]

use ksets_core::{DistanceMatrix, Graph, PointSet, SquareMatrix};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }
}

/// Proptest settings without on-disk regression files (integration test
/// directories have no `lib.rs` for proptest to anchor them to).
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= TOL * scale.max(1.0)
}

// ---------------------------------------------------------------- pools

pub fn line4() -> DistanceMatrix {
    let x = [0.0f64, 1.0, 2.0, 4.0];
    DistanceMatrix::metric(SquareMatrix::from_fn(4, |i, j| (x[i] - x[j]).abs())).unwrap()
}

/// Points in `dim` dimensions; every fifth instance carries a duplicate point.
pub fn euclidean(n: usize, dim: usize, rng: &mut TestRng) -> SquareMatrix {
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| 10.0 * rng.unit()).collect())
        .collect();
    if n >= 3 && rng.below(5) == 0 {
        pts[n - 1] = pts[0].clone();
    }
    SquareMatrix::from_fn(n, |i, j| {
        pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}

/// Shortest-path closure of random positive weights.
pub fn floyd_closure(n: usize, rng: &mut TestRng) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let w = 0.1 + 5.0 * rng.unit();
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
    }
    floyd_warshall(&mut m);
    m
}

pub fn floyd_warshall(m: &mut SquareMatrix) {
    let n = m.n();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[(i, k)] + m[(k, j)];
                if via < m[(i, j)] {
                    m[(i, j)] = via;
                }
            }
        }
    }
}

/// Random connected graph: a random tree plus extra edges.
pub fn random_connected_graph(n: usize, extra: usize, rng: &mut TestRng) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let u = rng.below(v);
        g.add_edge(u, v).unwrap();
    }
    for _ in 0..extra {
        let (a, b) = (rng.below(n), rng.below(n));
        if a != b {
            g.add_edge(a, b).unwrap();
        }
    }
    g
}

pub fn random_tree(n: usize, rng: &mut TestRng) -> Graph {
    random_connected_graph(n, 0, rng)
}

/// Hop counts by Floyd-Warshall over the adjacency matrix.
pub fn hop_oracle(g: &Graph) -> SquareMatrix {
    let n = g.n();
    let mut m = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else if g.has_edge(i, j) {
            1.0
        } else {
            f64::INFINITY
        }
    });
    floyd_warshall(&mut m);
    m
}

/// One metric from the mixed pool: Euclidean, shortest-path closure, or
/// graph geodesic.
pub fn pool_metric(seed: u64, n: usize) -> DistanceMatrix {
    let mut rng = TestRng::new(seed);
    let m = match seed % 3 {
        0 => {
            let dim = rng.range(1, 4);
            euclidean(n, dim, &mut rng)
        }
        1 => floyd_closure(n, &mut rng),
        _ => {
            let extra = rng.below(n + 1);
            hop_oracle(&random_connected_graph(n, extra, &mut rng))
        }
    };
    DistanceMatrix::metric(m).expect("pool instances are metrics")
}

/// Symmetric, zero diagonal, nonnegative, generally not a metric.
pub fn random_symmetric(n: usize, rng: &mut TestRng) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = 10.0 * rng.unit();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn random_subset(n: usize, rng: &mut TestRng) -> PointSet {
    loop {
        let s = PointSet::new(n, (0..n).filter(|_| rng.below(2) == 0)).unwrap();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Every nonempty subset of `0..n` (bitmask order).
pub fn all_subsets(n: usize) -> Vec<PointSet> {
    (1u32..(1 << n))
        .map(|mask| PointSet::new(n, (0..n).filter(|&i| mask >> i & 1 == 1)).unwrap())
        .collect()
}

pub fn proper_subsets(n: usize) -> Vec<PointSet> {
    all_subsets(n).into_iter().filter(|s| s.len() < n).collect()
}

// ---------------------------------------------------------------- oracles

pub fn avg(d: &SquareMatrix, s1: &[usize], s2: &[usize]) -> f64 {
    let mut t = 0.0;
    for &x in s1 {
        for &y in s2 {
            t += d[(x, y)];
        }
    }
    t / (s1.len() * s2.len()) as f64
}

pub fn omega(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `RC(S1 || S2) = dbar(S1, S2) - dbar(S1, Omega)`.
pub fn rc(d: &SquareMatrix, s1: &[usize], s2: &[usize]) -> f64 {
    avg(d, s1, s2) - avg(d, s1, &omega(d.n()))
}

/// `gamma(x,y) = RC(Omega || y) - RC(x || y)`.
pub fn gamma_point(d: &SquareMatrix, x: usize, y: usize) -> f64 {
    rc(d, &omega(d.n()), &[y]) - rc(d, &[x], &[y])
}

pub fn gamma_sets(d: &SquareMatrix, s1: &[usize], s2: &[usize]) -> f64 {
    let mut t = 0.0;
    for &x in s1 {
        for &y in s2 {
            t += gamma_point(d, x, y);
        }
    }
    t
}

/// Cohesion matrix by direct evaluation of every entry.
pub fn cohesion_oracle(d: &SquareMatrix) -> SquareMatrix {
    SquareMatrix::from_fn(d.n(), |x, y| gamma_point(d, x, y))
}

/// Triangular distance as the double average of `d(x,z1) + d(x,z2) - d(z1,z2)`.
pub fn delta_oracle(d: &SquareMatrix, x: usize, s: &[usize]) -> f64 {
    let mut t = 0.0;
    for &z1 in s {
        for &z2 in s {
            t += d[(x, z1)] + d[(x, z2)] - d[(z1, z2)];
        }
    }
    t / (s.len() * s.len()) as f64
}

/// Triangular distance straight from a cohesion matrix.
pub fn delta_cohesion_oracle(g: &SquareMatrix, x: usize, s: &[usize]) -> f64 {
    let k = s.len() as f64;
    let to_x: f64 = s.iter().map(|&y| g[(x, y)]).sum();
    let within: f64 = s
        .iter()
        .flat_map(|&a| s.iter().map(move |&b| (a, b)))
        .map(|(a, b)| g[(a, b)])
        .sum();
    g[(x, x)] - 2.0 * to_x / k + within / (k * k)
}

pub fn sets_of(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (x, &l) in labels.iter().enumerate() {
        out[l].push(x);
    }
    out
}

/// `R = sum_k gamma(S_k, S_k) / |S_k|`, via point-level cohesions.
pub fn r_oracle(d: &SquareMatrix, sets: &[Vec<usize>]) -> f64 {
    sets.iter()
        .map(|s| gamma_sets(d, s, s) / s.len() as f64)
        .sum()
}

pub fn q_oracle(d: &SquareMatrix, sets: &[Vec<usize>]) -> f64 {
    sets.iter().map(|s| gamma_sets(d, s, s)).sum()
}

/// Effective resistance by grounding `j` and injecting a unit current at `i`:
/// solve the reduced Laplacian with partial-pivot elimination.
pub fn resistance_oracle(g: &Graph, i: usize, j: usize) -> f64 {
    if i == j {
        return 0.0;
    }
    let n = g.n();
    let idx: Vec<usize> = (0..n).filter(|&v| v != j).collect();
    let m = idx.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, &u) in idx.iter().enumerate() {
        for (c, &v) in idx.iter().enumerate() {
            a[r][c] = if u == v {
                g.degree(u) as f64
            } else if g.has_edge(u, v) {
                -1.0
            } else {
                0.0
            };
        }
        a[r][m] = if u == i { 1.0 } else { 0.0 };
    }
    for col in 0..m {
        let p = (col..m)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, p);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let r = idx.iter().position(|&v| v == i).unwrap();
    a[r][m] / a[r][r]
}

/// Mutual information over natural logs, by hash counting.
pub fn nmi_oracle(a: &[usize], b: &[usize]) -> f64 {
    use std::collections::HashMap;
    let n = a.len() as f64;
    let mut ca: HashMap<usize, f64> = HashMap::new();
    let mut cb: HashMap<usize, f64> = HashMap::new();
    let mut cab: HashMap<(usize, usize), f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1.0;
        *cb.entry(y).or_default() += 1.0;
        *cab.entry((x, y)).or_default() += 1.0;
    }
    let h = |c: &HashMap<usize, f64>| -> f64 { c.values().map(|&v| -(v / n) * (v / n).ln()).sum() };
    let (ha, hb) = (h(&ca), h(&cb));
    let mi: f64 = cab
        .iter()
        .map(|(&(x, y), &v)| (v / n) * (v * n / (ca[&x] * cb[&y])).ln())
        .sum();
    let same = cab.len() == ca.len() && ca.len() == cb.len();
    if same {
        1.0
    } else if ha == 0.0 || hb == 0.0 {
        0.0
    } else {
        mi / (ha * hb).sqrt()
    }
}

/// Brute-force search over `{-1, 0, 1}^n` for `v` with `v' M v < -tol`.
pub fn negative_direction(m: &SquareMatrix) -> Option<(Vec<i32>, f64)> {
    let n = m.n();
    let total = 3usize.pow(n as u32);
    let mut best: Option<(Vec<i32>, f64)> = None;
    for code in 0..total {
        let mut c = code;
        let v: Vec<i32> = (0..n)
            .map(|_| {
                let t = (c % 3) as i32 - 1;
                c /= 3;
                t
            })
            .collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += v[i] as f64 * m[(i, j)] * v[j] as f64;
            }
        }
        if q < -TOL && best.as_ref().is_none_or(|b| q < b.1) {
            best = Some((v, q));
        }
    }
    best
}

/// Naive greedy agglomeration: recomputes every pair cohesion from the point
/// level each step; largest gamma wins, ties to the smallest id pair; merges
/// only while gamma > tol. Returns `(left, right, new_id, gamma)` events and
/// the final member lists by id.
pub fn hierarchical_oracle(
    g: &SquareMatrix,
) -> (Vec<(usize, usize, usize, f64)>, Vec<(usize, Vec<usize>)>) {
    let n = g.n();
    let tol = TOL * g.max_abs();
    let mut alive: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut events = Vec::new();
    let mut next = n;
    let coh = |a: &[usize], b: &[usize]| -> f64 {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .map(|(x, y)| g[(x, y)])
            .sum()
    };
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..alive.len() {
            for j in i + 1..alive.len() {
                let v = coh(&alive[i].1, &alive[j].1);
                if best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((_, _, vmax)) = best else { break };
        if vmax <= tol {
            break;
        }
        // smallest id pair among the near-maximal ones
        let mut pick = None;
        'outer: for i in 0..alive.len() {
            for j in i + 1..alive.len() {
                let v = coh(&alive[i].1, &alive[j].1);
                if v >= vmax - tol {
                    pick = Some((i, j, v));
                    break 'outer;
                }
            }
        }
        let (i, j, v) = pick.unwrap();
        let (a, b) = (alive[i].clone(), alive[j].clone());
        events.push((a.0, b.0, next, v));
        let mut members = a.1.clone();
        members.extend(&b.1);
        members.sort_unstable();
        alive.remove(j);
        alive.remove(i);
        alive.push((next, members));
        next += 1;
    }
    (events, alive)
}

/// Naive K-sets replay: full recomputation of every triangular distance at
/// every step, same visiting order and tie rules as the library. Returns the
/// applied moves `(pass, point, from, to)` and final labels.
pub fn ksets_oracle(
    d: &SquareMatrix,
    init: &[usize],
    k: usize,
    max_passes: usize,
) -> (Vec<(usize, usize, usize, usize)>, Vec<usize>) {
    let n = d.n();
    let tol = TOL * d.max_abs();
    let mut labels = init.to_vec();
    let mut moves = Vec::new();
    for pass in 0..max_passes {
        let mut changed = false;
        for x in 0..n {
            let sets = sets_of(&labels, k);
            let cur = labels[x];
            let deltas: Vec<f64> = sets.iter().map(|s| delta_oracle(d, x, s)).collect();
            let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
            if deltas[cur] <= min + tol || sets[cur].len() == 1 {
                continue;
            }
            let best = (0..k).find(|&c| deltas[c] <= min + tol).unwrap();
            labels[x] = best;
            moves.push((pass, x, cur, best));
            changed = true;
        }
        if !changed {
            break;
        }
    }
    (moves, labels)
}
