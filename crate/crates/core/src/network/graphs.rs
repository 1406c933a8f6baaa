//! Unweighted undirected graph generators. Every generator returns a
//! symmetric 0/1 adjacency; scale it with [`InteractionMatrix::scaled`] to
//! turn edges into interaction weights.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::InteractionMatrix;
use crate::error::{Error, Result};
use crate::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    ErdosRenyi { p: f64 },
    BarabasiAlbert { m: usize },
    WattsStrogatz { k: usize, p: f64 },
}

impl GraphSpec {
    pub fn generate(&self, n: usize, seed: u64) -> Result<InteractionMatrix> {
        match *self {
            GraphSpec::ErdosRenyi { p } => generate_er(n, p, seed),
            GraphSpec::BarabasiAlbert { m } => generate_ba(n, m, seed),
            GraphSpec::WattsStrogatz { k, p } => generate_sw(n, k, p, seed),
        }
    }

    /// Expected mean degree of the generated graph.
    pub fn nominal_mean_degree(&self, n: usize) -> f64 {
        match *self {
            GraphSpec::ErdosRenyi { p } => p * (n as f64 - 1.0),
            GraphSpec::BarabasiAlbert { m } => {
                // complete seed of m + 1 nodes, then m edges per new node
                let seed_edges = (m * (m + 1) / 2) as f64;
                let edges = seed_edges + (n.saturating_sub(m + 1) * m) as f64;
                2.0 * edges / n as f64
            }
            GraphSpec::WattsStrogatz { k, .. } => k as f64,
        }
    }
}

fn symmetric_from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<InteractionMatrix> {
    let mut m = InteractionMatrix::zeros(n)?;
    for (i, j) in edges {
        m.set(i, j, 1.0);
        m.set(j, i, 1.0);
    }
    m.directed = false;
    Ok(m)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("probability {p} outside [0, 1]")))
    }
}

/// G(n, p): every unordered pair is an edge independently with probability `p`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<InteractionMatrix> {
    if n < 2 {
        return Err(Error::InvalidSpec("graph needs at least 2 nodes".into()));
    }
    check_probability(p)?;
    let mut rng = seeded_rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    symmetric_from_edges(n, edges)
}

/// Preferential attachment: a complete core of `m + 1` nodes, then each new
/// node links to `m` distinct existing nodes chosen proportionally to degree.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<InteractionMatrix> {
    if m < 1 || n <= m {
        return Err(Error::InvalidSpec(format!(
            "preferential attachment needs m >= 1 and n > m (n = {n}, m = {m})"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut edges = Vec::new();
    // one entry per edge endpoint, so uniform picks are degree-proportional
    let mut endpoints: Vec<usize> = Vec::new();
    for i in 0..=m {
        for j in i + 1..=m {
            edges.push((i, j));
            endpoints.extend([i, j]);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for new in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((new, t));
            endpoints.extend([new, t]);
        }
    }
    symmetric_from_edges(n, edges)
}

/// Watts-Strogatz: ring lattice with `k / 2` neighbours on each side, each
/// lattice edge rewired to a uniformly random new endpoint with probability
/// `p` (no self-loops, no duplicate edges).
pub fn generate_sw(n: usize, k: usize, p: f64, seed: u64) -> Result<InteractionMatrix> {
    if k == 0 || k % 2 != 0 || k >= n {
        return Err(Error::InvalidSpec(format!(
            "small-world base degree must be even, positive and below n (n = {n}, k = {k})"
        )));
    }
    check_probability(p)?;
    let mut m = InteractionMatrix::zeros(n)?;
    for i in 0..n {
        for step in 1..=k / 2 {
            let j = (i + step) % n;
            m.set(i, j, 1.0);
            m.set(j, i, 1.0);
        }
    }
    let mut rng = seeded_rng(seed);
    for step in 1..=k / 2 {
        for i in 0..n {
            let j = (i + step) % n;
            if rng.random::<f64>() >= p || m.get(i, j) == 0.0 {
                continue;
            }
            let degree = m.row(i).iter().filter(|&&v| v != 0.0).count();
            if degree >= n - 1 {
                continue;
            }
            let target = loop {
                let t = rng.random_range(0..n);
                if t != i && m.get(i, t) == 0.0 {
                    break t;
                }
            };
            m.set(i, j, 0.0);
            m.set(j, i, 0.0);
            m.set(i, target, 1.0);
            m.set(target, i, 1.0);
        }
    }
    m.directed = false;
    Ok(m)
}

/// Number of non-zero entries per row.
pub fn degrees(a: &InteractionMatrix) -> Vec<usize> {
    (0..a.n_nodes())
        .map(|i| a.row(i).iter().filter(|&&v| v != 0.0).count())
        .collect()
}
