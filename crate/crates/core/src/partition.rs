use crate::error::{domain, Result};
use crate::metric::PointSet;

/// Assignment of `n` points to `K` disjoint, nonempty sets covering all points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    sets: Vec<PointSet>,
}

impl Partition {
    /// Builds a partition from explicit sets; set `k` gets label `k`.
    pub fn from_sets(n: usize, sets: Vec<PointSet>) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (k, s) in sets.iter().enumerate() {
            if s.universe() != n {
                return Err(domain(format!(
                    "set {k} is over {} points, expected {n}",
                    s.universe()
                )));
            }
            if s.is_empty() {
                return Err(domain(format!("set {k} is empty")));
            }
            for x in s.iter() {
                if assignment[x] != usize::MAX {
                    return Err(domain(format!(
                        "point {x} appears in sets {} and {k}",
                        assignment[x]
                    )));
                }
                assignment[x] = k;
            }
        }
        if let Some(x) = assignment.iter().position(|&k| k == usize::MAX) {
            return Err(domain(format!("point {x} is not covered by any set")));
        }
        Ok(Self { assignment, sets })
    }

    /// Convenience over [`Partition::from_sets`] taking plain index lists.
    pub fn from_index_sets(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| PointSet::new(n, s.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sets(n, sets)
    }

    /// Builds a partition from per-point labels. Distinct label values are
    /// renumbered `0..K` in ascending order.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        let mut values: Vec<usize> = labels.to_vec();
        values.sort_unstable();
        values.dedup();
        let mut members = vec![Vec::new(); values.len()];
        for (x, l) in labels.iter().enumerate() {
            let k = values.binary_search(l).expect("label present");
            members[k].push(x);
        }
        let sets = members
            .into_iter()
            .map(|m| PointSet::new(n, m))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sets(n, sets)
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn label_of(&self, x: usize) -> usize {
        self.assignment[x]
    }
}
