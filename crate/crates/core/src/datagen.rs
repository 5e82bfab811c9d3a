//! Seeded synthetic datasets: two concentric rings of points and the
//! stochastic block model.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`. Uniform reals are `(next_u64 >> 11) * 2^-53`, so the
//! streams are easy to reproduce outside Rust.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::graphs::Graph;

/// Maps a raw 64-bit draw to a uniform real in `[0, 1)`.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    pub data: T,
    /// Ground-truth cluster id of each point or node.
    pub labels: Vec<usize>,
    pub seed: u64,
}

/// Two concentric rings. The outer ring (label 0) comes first.
#[derive(Debug, Clone, PartialEq)]
pub struct RingsConfig {
    pub n_outer: usize,
    pub n_inner: usize,
    pub r_outer: [f64; 2],
    pub r_inner: [f64; 2],
}

impl Default for RingsConfig {
    fn default() -> Self {
        Self {
            n_outer: 300,
            n_inner: 200,
            r_outer: [20.0, 22.0],
            r_inner: [10.0, 12.0],
        }
    }
}

fn check_interval(name: &str, r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] > 0.0 && r[0] < r[1]) {
        return Err(domain(format!(
            "{name} radius interval [{}, {}] must satisfy 0 < lo < hi",
            r[0], r[1]
        )));
    }
    Ok(())
}

/// Points `(r cos phi, r sin phi)` with `r` uniform in the ring's radius
/// interval and `phi` uniform in `[0, 2 pi)`; radius is drawn before angle.
pub fn gen_two_rings(cfg: &RingsConfig, seed: u64) -> Result<LabeledDataset<Vec<[f64; 2]>>> {
    if cfg.n_outer == 0 || cfg.n_inner == 0 {
        return Err(domain("ring point counts must be positive"));
    }
    check_interval("outer", cfg.r_outer)?;
    check_interval("inner", cfg.r_inner)?;
    let mut rng = rng(seed);
    let mut points = Vec::with_capacity(cfg.n_outer + cfg.n_inner);
    let mut labels = Vec::with_capacity(points.capacity());
    for (label, count, [lo, hi]) in [(0, cfg.n_outer, cfg.r_outer), (1, cfg.n_inner, cfg.r_inner)] {
        for _ in 0..count {
            let r = lo + (hi - lo) * unit_f64(rng.next_u64());
            let phi = std::f64::consts::TAU * unit_f64(rng.next_u64());
            points.push([r * phi.cos(), r * phi.sin()]);
            labels.push(label);
        }
    }
    Ok(LabeledDataset {
        data: points,
        labels,
        seed,
    })
}

/// `(c_in, c_out)` with the given mean degree and gap `c_in - c_out`, from
/// `c_in + (q - 1) c_out = q * mean_degree`.
pub fn sbm_rates(q: usize, mean_degree: f64, gap: f64) -> Result<(f64, f64)> {
    if q == 0 {
        return Err(domain("q must be positive"));
    }
    let qf = q as f64;
    let c_out = (qf * mean_degree - gap) / qf;
    let c_in = c_out + gap;
    if c_out < 0.0 || c_in < c_out {
        return Err(domain(format!(
            "mean degree {mean_degree} and gap {gap} give c_in = {c_in}, c_out = {c_out}"
        )));
    }
    Ok((c_in, c_out))
}

/// Detectability threshold `q sqrt(mean_degree)` for `|c_in - c_out|`.
pub fn sbm_threshold(q: usize, mean_degree: f64) -> f64 {
    q as f64 * mean_degree.sqrt()
}

/// Planted partition with `q` equal blocks (node `i` in block `i / (n/q)`).
///
/// Pairs `i < j` are visited in lexicographic order, each consuming one draw
/// `u`; an edge is present iff `u < p`. Isolated vertices are then dropped,
/// keeping the order of the remaining nodes.
pub fn gen_sbm(
    n: usize,
    q: usize,
    c_in: f64,
    c_out: f64,
    seed: u64,
) -> Result<LabeledDataset<Graph>> {
    if q == 0 || n == 0 || !n.is_multiple_of(q) {
        return Err(domain(format!(
            "q = {q} must be positive and divide n = {n}"
        )));
    }
    let nf = n as f64;
    let (p_in, p_out) = (c_in / nf, c_out / nf);
    for (name, p) in [("c_in / n", p_in), ("c_out / n", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("{name} = {p} is not a probability")));
        }
    }
    let block = n / q;
    let mut rng = rng(seed);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let p = if i / block == j / block { p_in } else { p_out };
            if unit_f64(rng.next_u64()) < p {
                g.add_edge(i, j)?;
            }
        }
    }
    let (g, keep) = g.without_isolated();
    let labels = keep.iter().map(|&v| v / block).collect();
    Ok(LabeledDataset {
        data: g,
        labels,
        seed,
    })
}
