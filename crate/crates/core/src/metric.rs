//! Distance matrices, point sets, and the average / relative distance
//! primitives.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::matrix::SquareMatrix;

/// Base absolute tolerance; every check scales it by the largest matrix entry.
pub const TOLERANCE: f64 = 1e-9;

pub(crate) fn scaled_tolerance(max_abs: f64) -> f64 {
    TOLERANCE * max_abs
}

/// Sorted set of distinct point indices drawn from `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    universe: usize,
    members: Vec<usize>,
}

impl PointSet {
    pub fn new(universe: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= universe {
                return Err(domain(format!(
                    "point {last} out of range for {universe} points"
                )));
            }
        }
        Ok(Self { universe, members })
    }

    /// The whole space `0..universe`.
    pub fn all(universe: usize) -> Self {
        Self {
            universe,
            members: (0..universe).collect(),
        }
    }

    pub fn singleton(universe: usize, x: usize) -> Result<Self> {
        Self::new(universe, [x])
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.members.len() == self.universe
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn complement(&self) -> Self {
        let mut members = Vec::with_capacity(self.universe - self.members.len());
        let mut inside = self.members.iter().peekable();
        for x in 0..self.universe {
            if inside.peek() == Some(&&x) {
                inside.next();
            } else {
                members.push(x);
            }
        }
        Self {
            universe: self.universe,
            members,
        }
    }

    pub fn union(&self, other: &PointSet) -> Self {
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        members.sort_unstable();
        members.dedup();
        Self {
            universe: self.universe.max(other.universe),
            members,
        }
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        other.iter().all(|x| !self.contains(x))
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for x in &self.members {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        Ok(())
    }
}

/// The distance (D1-D4) and cohesion (C1-C3) axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// Nonnegativity.
    D1,
    /// Zero diagonal.
    D2,
    /// Symmetry.
    D3,
    /// Triangle inequality.
    D4,
    /// Symmetry.
    C1,
    /// Zero row sums.
    C2,
    /// `g[x][x] + g[y][z] - g[x][z] - g[x][y] >= 0`.
    C3,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::D1 => "D1",
            Axiom::D2 => "D2",
            Axiom::D3 => "D3",
            Axiom::D4 => "D4",
            Axiom::C1 => "C1",
            Axiom::C2 => "C2",
            Axiom::C3 => "C3",
        };
        f.write_str(s)
    }
}

/// Outcome of checking one axiom over a whole matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    /// Number of index tuples violating the axiom.
    pub violations: usize,
    /// First violating tuple in row-major scan order, with its signed margin
    /// (negative means violated).
    pub witness: Option<(Vec<usize>, f64)>,
    /// Most negative margin seen, or `0.0` when nothing was violated.
    pub worst: f64,
}

impl AxiomCheck {
    pub(crate) fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            violations: 0,
            witness: None,
            worst: 0.0,
        }
    }

    /// Records `margin` for `tuple`; anything below `-tol` is a violation.
    pub(crate) fn observe(&mut self, tuple: &[usize], margin: f64, tol: f64) {
        if margin < -tol {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some((tuple.to_vec(), margin));
            }
            self.worst = self.worst.min(margin);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn violated(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            let names: Vec<String> = self.checks.iter().map(|c| c.axiom.to_string()).collect();
            return write!(f, "{} hold", names.join(", "));
        }
        let mut first = true;
        for c in self.violated() {
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{} violated {} time(s)", c.axiom, c.violations)?;
            if let Some((w, v)) = &c.witness {
                write!(f, ", witness {w:?} margin {v}")?;
            }
        }
        Ok(())
    }
}

/// Checks D1-D4 on a raw square matrix. The triangle check is O(n^3).
pub fn validate_metric(m: &SquareMatrix) -> ValidationReport {
    let n = m.n();
    let tol = scaled_tolerance(m.max_abs());
    let mut d1 = AxiomCheck::new(Axiom::D1);
    let mut d2 = AxiomCheck::new(Axiom::D2);
    let mut d3 = AxiomCheck::new(Axiom::D3);
    let mut d4 = AxiomCheck::new(Axiom::D4);
    for x in 0..n {
        d2.observe(&[x], -m[(x, x)].abs(), tol);
        for y in 0..n {
            d1.observe(&[x, y], m[(x, y)], tol);
            if x < y {
                d3.observe(&[x, y], -(m[(x, y)] - m[(y, x)]).abs(), tol);
            }
        }
    }
    for x in 0..n {
        let rx = m.row(x);
        for y in 0..n {
            let dxy = rx[y];
            for z in 0..n {
                d4.observe(&[x, y, z], rx[z] + m[(z, y)] - dxy, tol);
            }
        }
    }
    ValidationReport {
        tolerance: tol,
        checks: vec![d1, d2, d3, d4],
    }
}

/// Symmetric, nonnegative matrix with zero diagonal (D1-D3). D4 is opt-in
/// through [`DistanceMatrix::validate`]; without it the algorithms still run
/// but their convergence and nonnegativity guarantees do not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    m: SquareMatrix,
    metric_checked: bool,
}

impl DistanceMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let n = m.n();
        let tol = scaled_tolerance(m.max_abs());
        for x in 0..n {
            if m[(x, x)].abs() > tol {
                return Err(domain(format!(
                    "diagonal entry ({x},{x}) is {}, expected 0",
                    m[(x, x)]
                )));
            }
            for y in 0..n {
                let v = m[(x, y)];
                if !v.is_finite() {
                    return Err(domain(format!("entry ({x},{y}) is not finite")));
                }
                if v < -tol {
                    return Err(domain(format!("entry ({x},{y}) = {v} is negative")));
                }
                if y > x && (v - m[(y, x)]).abs() > tol {
                    return Err(domain(format!(
                        "asymmetric entries ({x},{y}) = {v} and ({y},{x}) = {}",
                        m[(y, x)]
                    )));
                }
            }
        }
        Ok(Self {
            m,
            metric_checked: false,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    /// Builds the matrix and requires the full metric check to pass.
    pub fn metric(m: SquareMatrix) -> Result<Self> {
        let mut d = Self::new(m)?;
        let report = d.validate();
        if report.is_valid() {
            Ok(d)
        } else {
            Err(Error::Axiom(Box::new(report)))
        }
    }

    pub(crate) fn new_unchecked(m: SquareMatrix) -> Self {
        Self {
            m,
            metric_checked: false,
        }
    }

    pub(crate) fn with_metric_flag(mut self, flag: bool) -> Self {
        self.metric_checked = flag;
        self
    }

    /// Runs [`validate_metric`] and records whether it passed.
    pub fn validate(&mut self) -> ValidationReport {
        let report = validate_metric(&self.m);
        self.metric_checked = report.is_valid();
        report
    }

    pub fn is_metric_checked(&self) -> bool {
        self.metric_checked
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

    pub fn max_entry(&self) -> f64 {
        self.m.max_abs()
    }

    /// All points, `Omega`.
    pub fn omega(&self) -> PointSet {
        PointSet::all(self.n())
    }
}

fn require_nonempty(s: &PointSet, what: &str) -> Result<()> {
    if s.is_empty() {
        Err(domain(format!("{what} must be nonempty")))
    } else {
        Ok(())
    }
}

fn require_universe(d: &DistanceMatrix, s: &PointSet) -> Result<()> {
    if s.universe() != d.n() {
        Err(domain(format!(
            "point set over {} points used with a {}-point matrix",
            s.universe(),
            d.n()
        )))
    } else {
        Ok(())
    }
}

pub(crate) fn check_set(d: &DistanceMatrix, s: &PointSet, what: &str) -> Result<()> {
    require_nonempty(s, what)?;
    require_universe(d, s)
}

/// Sum of `d(x, y)` over `x in s1`, `y in s2`.
pub(crate) fn sum_between(d: &DistanceMatrix, s1: &PointSet, s2: &PointSet) -> f64 {
    s1.iter()
        .map(|x| {
            let row = d.m.row(x);
            s2.iter().map(|y| row[y]).sum::<f64>()
        })
        .sum()
}

/// Average distance between a random point of `s1` and a random point of `s2`.
pub fn avg_distance(d: &DistanceMatrix, s1: &PointSet, s2: &PointSet) -> Result<f64> {
    check_set(d, s1, "first set")?;
    check_set(d, s2, "second set")?;
    Ok(sum_between(d, s1, s2) / (s1.len() * s2.len()) as f64)
}

/// `d(x, y)` recentred by the average distance from `x` to all points.
pub fn rel_distance_point(d: &DistanceMatrix, x: usize, y: usize) -> f64 {
    let row = d.m.row(x);
    row[y] - row.iter().sum::<f64>() / d.n() as f64
}

/// Average relative distance from a random point to `y`.
pub fn rel_distance_to_point(d: &DistanceMatrix, y: usize) -> f64 {
    let n = d.n() as f64;
    let to_y = (0..d.n()).map(|z| d.get(z, y)).sum::<f64>() / n;
    to_y - d.m.mean()
}

/// Relative distance from `s1` to `s2`: `dbar(s1, s2) - dbar(s1, Omega)`.
pub fn rel_distance_sets(d: &DistanceMatrix, s1: &PointSet, s2: &PointSet) -> Result<f64> {
    let omega = d.omega();
    Ok(avg_distance(d, s1, s2)? - avg_distance(d, s1, &omega)?)
}
