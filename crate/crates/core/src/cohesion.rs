//! Cohesion measures, the cluster predicate, and the distance/cohesion
//! duality.
//!
//! The cohesion between two points is the double-centred, sign-flipped
//! distance
//!
//! ```text
//! g(x, y) = dbar(Omega, y) + dbar(x, Omega) - dbar(Omega, Omega) - d(x, y)
//! ```
//!
//! and `d(x, y) = (g(x, x) + g(y, y)) / 2 - g(x, y)` maps a cohesion matrix
//! back to a distance matrix. The two transforms are mutually inverse.

use crate::error::{domain, Error, Result};
use crate::matrix::SquareMatrix;
use crate::metric::{
    avg_distance, check_set, rel_distance_sets, scaled_tolerance, Axiom, AxiomCheck,
    DistanceMatrix, PointSet, ValidationReport,
};

/// Symmetric matrix with zero row sums (C1, C2). C3 is opt-in through
/// [`CohesionMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CohesionMatrix {
    m: SquareMatrix,
    c3_checked: bool,
}

impl CohesionMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let n = m.n();
        let tol = scaled_tolerance(m.max_abs());
        for x in 0..n {
            let row = m.row(x);
            if let Some(y) = row.iter().position(|v| !v.is_finite()) {
                return Err(domain(format!("entry ({x},{y}) is not finite")));
            }
            let s: f64 = row.iter().sum();
            if s.abs() > tol {
                return Err(domain(format!("row {x} sums to {s}, expected 0")));
            }
            for y in x + 1..n {
                if (m[(x, y)] - m[(y, x)]).abs() > tol {
                    return Err(domain(format!(
                        "asymmetric entries ({x},{y}) = {} and ({y},{x}) = {}",
                        m[(x, y)],
                        m[(y, x)]
                    )));
                }
            }
        }
        Ok(Self {
            m,
            c3_checked: false,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub(crate) fn new_unchecked(m: SquareMatrix) -> Self {
        Self {
            m,
            c3_checked: false,
        }
    }

    /// Runs [`validate_cohesion`] and records whether C1-C3 all hold.
    pub fn validate(&mut self) -> ValidationReport {
        let report = validate_cohesion(&self.m);
        self.c3_checked = report.is_valid();
        report
    }

    pub fn is_c3_checked(&self) -> bool {
        self.c3_checked
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.m[(x, y)]
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.m
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub(crate) fn tolerance(&self) -> f64 {
        scaled_tolerance(self.max_abs())
    }

    /// Sum of the diagonal, i.e. the normalized modularity of the all-singletons
    /// partition.
    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|x| self.get(x, x)).sum()
    }
}

/// Cohesion between two points computed directly from the distances.
pub fn cohesion_point(d: &DistanceMatrix, x: usize, y: usize) -> f64 {
    let n = d.n();
    let nf = n as f64;
    let to_y: f64 = (0..n).map(|z| d.get(z, y)).sum::<f64>() / nf;
    let from_x: f64 = d.matrix().row(x).iter().sum::<f64>() / nf;
    to_y + from_x - d.matrix().mean() - d.get(x, y)
}

/// Dual cohesion matrix of a distance matrix.
pub fn cohesion_matrix(d: &DistanceMatrix) -> CohesionMatrix {
    let m = d.matrix();
    let r = m.row_means();
    let mean = m.mean();
    let g = SquareMatrix::from_fn(d.n(), |x, y| r[y] + r[x] - mean - m[(x, y)]);
    let mut g = CohesionMatrix::new_unchecked(g);
    // Lemma: the dual of a validated metric satisfies C1-C3.
    g.c3_checked = d.is_metric_checked();
    g
}

fn dual_distance_raw(g: &CohesionMatrix) -> SquareMatrix {
    let m = g.matrix();
    SquareMatrix::from_fn(g.n(), |x, y| {
        if x == y {
            0.0
        } else {
            (m[(x, x)] + m[(y, y)]) / 2.0 - m[(x, y)]
        }
    })
}

/// Dual distance `(g(x,x) + g(y,y)) / 2 - g(x,y)`.
///
/// Fails if the result breaks D1 (which happens when C3 does not hold).
/// Use [`dual_distance_checked`] to run the full C1-C3 check first.
pub fn dual_distance(g: &CohesionMatrix) -> Result<DistanceMatrix> {
    let d = DistanceMatrix::new(dual_distance_raw(g))?;
    // Dual of a validated cohesion measure is a metric.
    Ok(d.with_metric_flag(g.c3_checked))
}

/// [`dual_distance`] preceded by [`validate_cohesion`]; axiom violations are
/// reported as [`Error::Axiom`].
pub fn dual_distance_checked(g: &CohesionMatrix) -> Result<DistanceMatrix> {
    let report = validate_cohesion(g.matrix());
    if !report.is_valid() {
        return Err(Error::Axiom(Box::new(report)));
    }
    Ok(DistanceMatrix::new_unchecked(dual_distance_raw(g)).with_metric_flag(true))
}

fn check_cset(g: &CohesionMatrix, s: &PointSet, what: &str) -> Result<()> {
    if s.is_empty() {
        return Err(domain(format!("{what} must be nonempty")));
    }
    if s.universe() != g.n() {
        return Err(domain(format!(
            "point set over {} points used with a {}-point matrix",
            s.universe(),
            g.n()
        )));
    }
    Ok(())
}

pub(crate) fn cohesion_sum(g: &CohesionMatrix, s1: &PointSet, s2: &PointSet) -> f64 {
    s1.iter()
        .map(|x| {
            let row = g.matrix().row(x);
            s2.iter().map(|y| row[y]).sum::<f64>()
        })
        .sum()
}

/// `sum_{x in s1} sum_{y in s2} g(x, y)`.
pub fn cohesion_sets(g: &CohesionMatrix, s1: &PointSet, s2: &PointSet) -> Result<f64> {
    check_cset(g, s1, "first set")?;
    check_cset(g, s2, "second set")?;
    Ok(cohesion_sum(g, s1, s2))
}

/// A set is a cluster when it is cohesive to itself.
pub fn is_cluster(g: &CohesionMatrix, s: &PointSet) -> Result<bool> {
    Ok(cohesion_sets(g, s, s)? >= -g.tolerance())
}

/// The ten equivalent characterisations of a cluster, each stored as a
/// signed margin that is nonnegative exactly when the statement holds.
///
/// Index `k` corresponds to statement `(k+1)`:
///
/// 0. `g(S,S) >= 0`
/// 1. `g(Sc,Sc) >= 0`
/// 2. `g(S,Sc) <= 0`
/// 3. `g(S,S) >= g(S,Sc)`
/// 4. `2 dbar(S,Omega) - dbar(Omega,Omega) - dbar(S,S) >= 0`
/// 5. `RC(Omega||S) >= RC(S||S)`
/// 6. `RC(Sc||S) >= RC(S||S)`
/// 7. `2 dbar(S,Sc) - dbar(S,S) - dbar(Sc,Sc) >= 0`
/// 8. `RC(S||Sc) >= RC(Omega||Sc)`
/// 9. `RC(Sc||S) >= RC(Omega||S)`
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub statements: [bool; 10],
    pub values: [f64; 10],
    pub is_cluster: bool,
}

impl ClusterReport {
    pub fn unanimous(&self) -> bool {
        self.statements.iter().all(|&b| b == self.statements[0])
    }
}

/// Evaluates all ten cluster statements for `s`. Statements (i)-(iv) go
/// through the cohesion matrix, the rest through average and relative
/// distances, so the report cross-checks two independent routes.
pub fn theorem1_statements(d: &DistanceMatrix, s: &PointSet) -> Result<ClusterReport> {
    check_set(d, s, "set")?;
    if s.is_all() {
        return Err(domain(
            "set must be a proper subset (its complement is empty)",
        ));
    }
    let sc = s.complement();
    let omega = d.omega();
    let g = cohesion_matrix(d);

    let g_ss = cohesion_sum(&g, s, s);
    let g_cc = cohesion_sum(&g, &sc, &sc);
    let g_sc = cohesion_sum(&g, s, &sc);

    let avg = |a: &PointSet, b: &PointSet| avg_distance(d, a, b);
    let rc = |a: &PointSet, b: &PointSet| rel_distance_sets(d, a, b);

    let values = [
        g_ss,
        g_cc,
        -g_sc,
        g_ss - g_sc,
        2.0 * avg(s, &omega)? - avg(&omega, &omega)? - avg(s, s)?,
        rc(&omega, s)? - rc(s, s)?,
        rc(&sc, s)? - rc(s, s)?,
        2.0 * avg(s, &sc)? - avg(s, s)? - avg(&sc, &sc)?,
        rc(s, &sc)? - rc(&omega, &sc)?,
        rc(&sc, s)? - rc(&omega, s)?,
    ];

    // Cohesion margins are sums over up to n^2 pairs; distance margins are
    // averages.
    let tol_avg = scaled_tolerance(d.max_entry());
    let tol_sum = tol_avg * (d.n() * d.n()) as f64;
    let mut statements = [false; 10];
    for (k, (&v, st)) in values.iter().zip(statements.iter_mut()).enumerate() {
        let tol = if k < 4 { tol_sum } else { tol_avg };
        *st = v >= -tol;
    }
    Ok(ClusterReport {
        statements,
        values,
        is_cluster: statements[0],
    })
}

/// Checks C1-C3 on a raw square matrix. The C3 check is O(n^3).
pub fn validate_cohesion(m: &SquareMatrix) -> ValidationReport {
    validate_cohesion_scaled(m, m.max_abs())
}

fn validate_cohesion_scaled(m: &SquareMatrix, scale: f64) -> ValidationReport {
    let n = m.n();
    let tol = scaled_tolerance(scale);
    let mut c1 = AxiomCheck::new(Axiom::C1);
    let mut c2 = AxiomCheck::new(Axiom::C2);
    let mut c3 = AxiomCheck::new(Axiom::C3);
    for x in 0..n {
        let row = m.row(x);
        for y in x + 1..n {
            c1.observe(&[x, y], -(row[y] - m[(y, x)]).abs(), tol);
        }
        c2.observe(&[x], -row.iter().sum::<f64>().abs(), tol);
    }
    for x in 0..n {
        let row = m.row(x);
        let gxx = row[x];
        for y in 0..n {
            let ry = m.row(y);
            let gxy = row[y];
            for z in 0..n {
                c3.observe(&[x, y, z], gxx + ry[z] - row[z] - gxy, tol);
            }
        }
    }
    ValidationReport {
        tolerance: tol,
        checks: vec![c1, c2, c3],
    }
}

/// How the diagonal of a similarity matrix is filled in before centring.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalPolicy {
    /// Caller-supplied diagonal; must satisfy the lower bound below.
    Explicit(Vec<f64>),
    /// `2 * max_offdiag - min_offdiag` on every diagonal entry.
    Default,
    /// The smallest admissible value per point:
    /// `max over distinct y, z != x of b(x,z) + b(x,y) - b(y,z)`.
    ExactMax,
}

/// Lower bound on `b(x, x)` over distinct `y, z` both different from `x`.
fn diagonal_bound(b: &SquareMatrix, x: usize) -> Option<f64> {
    let n = b.n();
    let mut best: Option<f64> = None;
    for y in (0..n).filter(|&y| y != x) {
        for z in (0..n).filter(|&z| z != x && z != y) {
            let v = b[(x, z)] + b[(x, y)] - b[(y, z)];
            best = Some(best.map_or(v, |m: f64| m.max(v)));
        }
    }
    best
}

/// Builds a cohesion matrix from a symmetric similarity matrix by fixing the
/// diagonal and double-centring.
///
/// The diagonal must dominate `b(x,z) + b(x,y) - b(y,z)` for all distinct
/// `y, z != x`. With fewer than three points that bound is vacuous, so the
/// pairwise condition `b(x,x) + b(y,y) >= 2 b(x,y)` is enforced as well.
pub fn cohesion_from_similarity(
    b0: &SquareMatrix,
    policy: &DiagonalPolicy,
) -> Result<CohesionMatrix> {
    let n = b0.n();
    let tol = scaled_tolerance(b0.max_abs());
    for x in 0..n {
        for y in x + 1..n {
            if (b0[(x, y)] - b0[(y, x)]).abs() > tol {
                return Err(Error::Input(format!(
                    "similarity is not symmetric at ({x},{y})"
                )));
            }
        }
    }

    let mut b1 = b0.clone();
    match policy {
        DiagonalPolicy::Explicit(diag) => {
            if diag.len() != n {
                return Err(Error::Input(format!(
                    "diagonal has {} entries for {n} points",
                    diag.len()
                )));
            }
            for (x, &v) in diag.iter().enumerate() {
                b1[(x, x)] = v;
            }
        }
        DiagonalPolicy::Default => {
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for x in 0..n {
                for y in (0..n).filter(|&y| y != x) {
                    hi = hi.max(b0[(x, y)]);
                    lo = lo.min(b0[(x, y)]);
                }
            }
            let v = if n > 1 { 2.0 * hi - lo } else { 0.0 };
            for x in 0..n {
                b1[(x, x)] = v;
            }
        }
        DiagonalPolicy::ExactMax => {
            for x in 0..n {
                let v = match diagonal_bound(b0, x) {
                    Some(v) => v,
                    None => (0..n)
                        .filter(|&y| y != x)
                        .map(|y| b0[(x, y)])
                        .fold(0.0f64, f64::max),
                };
                b1[(x, x)] = v;
            }
        }
    }

    let tol1 = scaled_tolerance(b1.max_abs());
    for x in 0..n {
        if let Some(bound) = diagonal_bound(&b1, x) {
            if b1[(x, x)] < bound - tol1 {
                return Err(domain(format!(
                    "diagonal entry {x} = {} is below the required bound {bound}",
                    b1[(x, x)]
                )));
            }
        }
        for y in x + 1..n {
            if b1[(x, x)] + b1[(y, y)] - 2.0 * b1[(x, y)] < -tol1 {
                return Err(domain(format!(
                    "diagonal entries {x} and {y} are too small for similarity {}",
                    b1[(x, y)]
                )));
            }
        }
    }

    let r = b1.row_means();
    let mean = b1.mean();
    let centred = SquareMatrix::from_fn(n, |x, y| b1[(x, y)] - r[y] - r[x] + mean);
    // Centring can cancel everything (constant similarities), so judge the
    // result on the scale of the input.
    let report = validate_cohesion_scaled(&centred, centred.max_abs().max(b1.max_abs()));
    if !report.is_valid() {
        return Err(Error::Axiom(Box::new(report)));
    }
    let mut g = CohesionMatrix::new_unchecked(centred);
    g.c3_checked = true;
    Ok(g)
}

/// Cohesion of a simple graph from its 0/1 adjacency matrix:
/// `2 delta(i,j) + a(i,j) - (2 + k_i)/n - (2 + k_j)/n + (2m + 2n)/n^2`.
pub fn graph_cohesion(adjacency: &SquareMatrix) -> Result<CohesionMatrix> {
    let n = adjacency.n();
    for i in 0..n {
        if adjacency[(i, i)] != 0.0 {
            return Err(Error::Input(format!("self-loop at node {i}")));
        }
        for j in 0..n {
            let a = adjacency[(i, j)];
            if a != 0.0 && a != 1.0 {
                return Err(Error::Input(format!(
                    "adjacency entry ({i},{j}) = {a} is not 0 or 1"
                )));
            }
            if a != adjacency[(j, i)] {
                return Err(Error::Input(format!(
                    "adjacency is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let nf = n as f64;
    let degree: Vec<f64> = adjacency.rows().map(|r| r.iter().sum()).collect();
    let m = degree.iter().sum::<f64>() / 2.0;
    let constant = (2.0 * m + 2.0 * nf) / (nf * nf);
    let g = SquareMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 2.0 } else { 0.0 };
        delta + adjacency[(i, j)] - (2.0 + degree[i]) / nf - (2.0 + degree[j]) / nf + constant
    });
    let mut g = CohesionMatrix::new_unchecked(g);
    // 2*delta + a is an admissible similarity, so C3 holds by construction.
    g.c3_checked = true;
    Ok(g)
}
