//! Undirected graphs and the distances derived from them: geodesic
//! (shortest-path hop count), resistance, and Euclidean point distances.

use std::collections::VecDeque;

use crate::error::{domain, Error, Result};
use crate::matrix::SquareMatrix;
use crate::metric::DistanceMatrix;

/// Simple undirected graph on vertices `0..n`, sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph, ignoring repeated edges. Self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool> {
        let n = self.n();
        if a >= n || b >= n {
            return Err(domain(format!(
                "edge ({a}, {b}) out of range for {n} vertices"
            )));
        }
        if a == b {
            return Err(domain(format!("self-loop at vertex {a}")));
        }
        match self.adj[a].binary_search(&b) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[a].insert(pos, b);
                let pos = self.adj[b].binary_search(&a).unwrap_err();
                self.adj[b].insert(pos, a);
                Ok(true)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn adjacency_matrix(&self) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(self.n());
        for (a, b) in self.edges() {
            m[(a, b)] = 1.0;
            m[(b, a)] = 1.0;
        }
        m
    }

    /// Label of the connected component of each vertex; components are
    /// numbered by their smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced by `keep` (relabelled in the given order).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).expect("indices in range and distinct");
                }
            }
        }
        g
    }

    /// Largest connected component (ties: the one with the smallest vertex)
    /// and the original ids of its vertices, ascending.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let comp = self.components();
        let count = comp.iter().max().map_or(0, |&c| c + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count).fold(0, |b, c| if sizes[c] > sizes[b] { c } else { b });
        let keep: Vec<usize> = (0..self.n()).filter(|&v| comp[v] == best).collect();
        (self.induced(&keep), keep)
    }

    /// Removes isolated vertices, keeping the relative order of the others.
    /// Returns the compacted graph and the original id of each kept vertex.
    pub fn without_isolated(&self) -> (Graph, Vec<usize>) {
        let keep: Vec<usize> = (0..self.n()).filter(|&v| self.degree(v) > 0).collect();
        (self.induced(&keep), keep)
    }

    fn bfs(&self, s: usize, dist: &mut [usize]) {
        dist.fill(usize::MAX);
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
}

/// Hop-count matrix with `None` for unreachable pairs.
fn hop_counts(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let mut dist = vec![0usize; n];
    (0..n)
        .map(|s| {
            g.bfs(s, &mut dist);
            dist.iter()
                .map(|&d| (d != usize::MAX).then_some(d))
                .collect()
        })
        .collect()
}

/// Shortest-path hop counts. Fails on a disconnected graph.
pub fn geodesic_distance(g: &Graph) -> Result<DistanceMatrix> {
    let hops = hop_counts(g);
    let n = g.n();
    let mut m = SquareMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            match hops[a][b] {
                Some(h) => m[(a, b)] = h as f64,
                None => return Err(Error::Disconnected { a, b }),
            }
        }
    }
    // Path metrics satisfy the triangle inequality by construction.
    Ok(DistanceMatrix::new_unchecked(m).with_metric_flag(true))
}

/// Stand-in distance for unreachable pairs in [`geodesic_distance_filled`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unreachable {
    /// Largest finite distance plus one.
    Auto,
    Value(f64),
}

/// Geodesic distance where unreachable pairs get a fixed value. Any value of
/// at least half the largest finite distance keeps the result a metric.
pub fn geodesic_distance_filled(g: &Graph, fill: Unreachable) -> Result<DistanceMatrix> {
    let hops = hop_counts(g);
    let n = g.n();
    let max_finite = hops.iter().flatten().filter_map(|h| *h).max().unwrap_or(0) as f64;
    let value = match fill {
        Unreachable::Auto => max_finite + 1.0,
        Unreachable::Value(v) => {
            if !v.is_finite() || v < max_finite / 2.0 || v <= 0.0 {
                return Err(domain(format!(
                    "unreachable distance {v} must be positive and at least half the diameter {max_finite}"
                )));
            }
            v
        }
    };
    let m = SquareMatrix::from_fn(n, |a, b| hops[a][b].map_or(value, |h| h as f64));
    Ok(DistanceMatrix::new_unchecked(m).with_metric_flag(true))
}

/// Effective resistance between every pair of vertices of a connected graph
/// with unit edge weights: `R(i,j) = G_ii + G_jj - G_ij - G_ji` where `G` is
/// the pseudo-inverse of the Laplacian.
pub fn resistance_distance(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.n();
    if n == 0 {
        return Ok(DistanceMatrix::new_unchecked(SquareMatrix::zeros(0)).with_metric_flag(true));
    }
    let comp = g.components();
    if let Some(b) = comp.iter().position(|&c| c != 0) {
        return Err(Error::Disconnected { a: 0, b });
    }
    // L + J/n is nonsingular for a connected graph; its inverse minus J/n is
    // the Laplacian pseudo-inverse.
    let shift = 1.0 / n as f64;
    let mut a = SquareMatrix::from_fn(n, |i, j| {
        let l = if i == j {
            g.degree(i) as f64
        } else if g.has_edge(i, j) {
            -1.0
        } else {
            0.0
        };
        l + shift
    });
    invert_spd(&mut a)?;
    let r = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            (a[(i, i)] + a[(j, j)] - a[(i, j)] - a[(j, i)]).max(0.0)
        }
    });
    // Symmetrize away rounding.
    let r = SquareMatrix::from_fn(n, |i, j| (r[(i, j)] + r[(j, i)]) / 2.0);
    Ok(DistanceMatrix::new_unchecked(r).with_metric_flag(true))
}

/// In-place Gauss-Jordan inversion of a symmetric positive definite matrix.
fn invert_spd(a: &mut SquareMatrix) -> Result<()> {
    let n = a.n();
    let scale = a.max_abs().max(1.0);
    let data = a.as_mut_slice();
    for k in 0..n {
        let pivot = data[k * n + k];
        if pivot.is_nan() || pivot <= 1e-12 * scale {
            return Err(domain("matrix is singular or not positive definite"));
        }
        let inv = 1.0 / pivot;
        for j in 0..n {
            data[k * n + j] *= inv;
        }
        data[k * n + k] = inv;
        let pivot_row: Vec<f64> = data[k * n..(k + 1) * n].to_vec();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = data[i * n + k];
            if f == 0.0 {
                continue;
            }
            let row = &mut data[i * n..(i + 1) * n];
            for j in 0..n {
                if j != k {
                    row[j] -= f * pivot_row[j];
                }
            }
            row[k] = -f * inv;
        }
    }
    Ok(())
}

/// Pairwise Euclidean distances between points in the plane.
pub fn euclidean_distance(points: &[[f64; 2]]) -> Result<DistanceMatrix> {
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(domain("point coordinates must be finite"));
    }
    let m = SquareMatrix::from_fn(points.len(), |i, j| {
        let dx = points[i][0] - points[j][0];
        let dy = points[i][1] - points[j][1];
        dx.hypot(dy)
    });
    Ok(DistanceMatrix::new_unchecked(m).with_metric_flag(true))
}

/// Graph joining points whose Euclidean distance is strictly below `eps`.
pub fn epsilon_graph(points: &[[f64; 2]], eps: f64) -> Result<Graph> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(domain(format!("epsilon must be positive, got {eps}")));
    }
    let d = euclidean_distance(points)?;
    let n = points.len();
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if d.get(i, j) < eps {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}
