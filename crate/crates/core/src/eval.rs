//! Comparing a clustering with ground truth.

use std::collections::BTreeMap;

use crate::error::{domain, Result};

/// Co-occurrence counts of two labelings. Rows follow the sorted distinct
/// labels of `a`, columns those of `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_totals: Vec<u64>,
    pub col_totals: Vec<u64>,
    pub total: u64,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = BTreeMap::new();
    for &l in labels {
        ids.entry(l).or_insert(0);
    }
    for (i, v) in ids.values_mut().enumerate() {
        *v = i;
    }
    (labels.iter().map(|l| ids[l]).collect(), ids.len())
}

impl ContingencyTable {
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(domain(format!(
                "labelings have different lengths ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        let (a, ka) = compact(a);
        let (b, kb) = compact(b);
        let mut counts = vec![vec![0u64; kb]; ka];
        for (&i, &j) in a.iter().zip(&b) {
            counts[i][j] += 1;
        }
        let row_totals = counts.iter().map(|r| r.iter().sum()).collect();
        let col_totals = (0..kb).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(Self {
            counts,
            row_totals,
            col_totals,
            total: a.len() as u64,
        })
    }

    /// Whether the two labelings induce the same partition.
    pub fn same_partition(&self) -> bool {
        self.row_totals.len() == self.col_totals.len()
            && self
                .counts
                .iter()
                .all(|r| r.iter().filter(|&&c| c > 0).count() == 1)
    }

    fn entropy(totals: &[u64], n: f64) -> f64 {
        totals
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.total as f64;
        let mut mi = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                let expected = self.row_totals[i] as f64 * self.col_totals[j] as f64;
                mi += c / n * (c * n / expected).ln();
            }
        }
        mi.max(0.0)
    }
}

/// `I(A;B) / sqrt(H(A) H(B))` with natural logarithms. Identical partitions
/// score 1 (also when both are a single cluster); otherwise a zero entropy
/// scores 0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(a, b)?;
    if t.same_partition() {
        return Ok(1.0);
    }
    let n = t.total as f64;
    let ha = ContingencyTable::entropy(&t.row_totals, n);
    let hb = ContingencyTable::entropy(&t.col_totals, n);
    if ha <= 0.0 || hb <= 0.0 {
        return Ok(0.0);
    }
    Ok((t.mutual_information() / (ha * hb).sqrt()).clamp(0.0, 1.0))
}
