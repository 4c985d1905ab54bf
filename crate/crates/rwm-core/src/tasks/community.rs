//! Local community detection: rank nodes by visiting score, then take the
//! prefix with the smallest conductance.

use serde::Serialize;

use crate::accel::{run_with_strategy, UpdateStrategy};
use crate::engine::RwmConfig;
use crate::error::{Error, Result};
use crate::multinet::{MultiNetwork, Network, QuerySpec};

/// A detected community: the chosen ranking prefix in rank order.
#[derive(Debug, Clone, Serialize)]
pub struct Community {
    pub layer: usize,
    pub members: Vec<u32>,
    pub conductance: f64,
    pub prefix_len: usize,
}

/// Weighted conductance of a node set: cut weight over the smaller side's
/// volume. Requires a nonempty strict subset of the nodes. A set with no
/// outgoing edges has conductance zero.
pub fn conductance(members: &[u32], net: &Network) -> Result<f64> {
    let n = net.node_count();
    if members.is_empty() {
        return Err(Error::Sweep("empty node set".into()));
    }
    let mut in_set = vec![false; n];
    let mut count = 0usize;
    for &u in members {
        if u as usize >= n {
            return Err(Error::Sweep(format!("node {u} out of range for {n} nodes")));
        }
        if !in_set[u as usize] {
            in_set[u as usize] = true;
            count += 1;
        }
    }
    if count == n {
        return Err(Error::Sweep("node set must be a strict subset".into()));
    }
    let mut cut = 0.0;
    let mut vol = 0.0;
    for &u in members {
        if !in_set[u as usize] {
            continue;
        }
        vol += net.weighted_degree(u);
        let (nbrs, weights) = net.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(weights) {
            if !in_set[v as usize] {
                cut += w;
            }
        }
    }
    if cut == 0.0 {
        return Ok(0.0);
    }
    let denom = vol.min(net.total_volume() - vol);
    Ok(cut / denom)
}

/// Sweeps prefixes of the score ranking (descending score, ties by
/// ascending node id) and returns the prefix with the smallest conductance.
/// Only prefixes of positive-score nodes are candidates, and the full node
/// set is never one; conductance ties resolve to the shorter prefix.
pub fn sweep_cut(scores: &[f64], net: &Network) -> Result<Community> {
    let n = net.node_count();
    if scores.len() != n {
        return Err(Error::Sweep(format!("{} scores for {n} nodes", scores.len())));
    }
    let mut order: Vec<u32> = (0..n as u32).filter(|&u| scores[u as usize] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::Sweep("no positive scores to rank".into()));
    }
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then_with(|| a.cmp(&b))
    });
    let max_prefix = if order.len() == n { n - 1 } else { order.len() };
    if max_prefix == 0 {
        return Err(Error::Sweep("graph too small to sweep".into()));
    }

    let total_vol = net.total_volume();
    let mut in_set = vec![false; n];
    let mut cut = 0.0;
    let mut vol = 0.0;
    let mut best_phi = f64::INFINITY;
    let mut best_len = 0usize;
    for (idx, &u) in order[..max_prefix].iter().enumerate() {
        let (nbrs, weights) = net.neighbors(u);
        let mut into_set = 0.0;
        for (&v, &w) in nbrs.iter().zip(weights) {
            if in_set[v as usize] {
                into_set += w;
            }
        }
        in_set[u as usize] = true;
        vol += net.weighted_degree(u);
        cut += net.weighted_degree(u) - 2.0 * into_set;
        // self-loops neither cut nor connect into the set twice
        let self_loop = net.adjacency().get(u, u as usize);
        cut -= self_loop;

        let phi = if cut <= 0.0 {
            0.0
        } else {
            cut / vol.min(total_vol - vol)
        };
        if phi < best_phi {
            best_phi = phi;
            best_len = idx + 1;
        }
    }
    Ok(Community {
        layer: net.layer_id(),
        members: order[..best_len].to_vec(),
        conductance: best_phi,
        prefix_len: best_len,
    })
}

/// Runs the engine from `query` and sweeps every layer's final vector.
pub fn detect_local_communities(
    mn: &MultiNetwork,
    query: &QuerySpec,
    cfg: &RwmConfig,
    strategy: UpdateStrategy,
) -> Result<Vec<Community>> {
    let result = run_with_strategy(mn, query, cfg, strategy)?;
    (0..mn.layer_count())
        .map(|i| sweep_cut(result.state.vector(i), mn.layer(i)))
        .collect()
}
