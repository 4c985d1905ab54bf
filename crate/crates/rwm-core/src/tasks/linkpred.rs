//! Link prediction: run the engine from every node of the target layer and
//! score unconnected pairs by the larger of the two directional visiting
//! probabilities.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::accel::{run_with_strategy, UpdateStrategy};
use crate::engine::RwmConfig;
use crate::error::{Error, Result};
use crate::multinet::{MultiNetwork, Network, QuerySpec};

/// Candidate edge with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredPair {
    pub u: u32,
    pub v: u32,
    pub score: f64,
}

/// Scores every unconnected node pair of `layer` and returns the top `k`
/// by score, ties broken by ascending pair. Sources the engine cannot seed
/// from (no path into some layer) are skipped.
pub fn predict_links(
    mn: &MultiNetwork,
    layer: usize,
    cfg: &RwmConfig,
    strategy: UpdateStrategy,
    k: usize,
) -> Result<Vec<ScoredPair>> {
    if layer >= mn.layer_count() {
        return Err(Error::Query(format!(
            "layer {layer} out of range for {} layers",
            mn.layer_count()
        )));
    }
    let net = mn.layer(layer);
    let n = net.node_count();
    let rows: Vec<Vec<(u32, f64)>> = (0..n as u32)
        .into_par_iter()
        .map(|u| {
            let result = match run_with_strategy(mn, &QuerySpec::single(layer, u), cfg, strategy) {
                Ok(r) => r,
                Err(_) => return Vec::new(),
            };
            let x = result.state.vector(layer);
            x.iter()
                .enumerate()
                .filter_map(|(v, &s)| {
                    let v = v as u32;
                    if s > 0.0 && v != u && !net.has_edge(u, v) {
                        Some((v, s))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();

    let mut best: HashMap<(u32, u32), f64> = HashMap::new();
    for (u, row) in rows.iter().enumerate() {
        let u = u as u32;
        for &(v, s) in row {
            let key = (u.min(v), u.max(v));
            let slot = best.entry(key).or_insert(0.0);
            if s > *slot {
                *slot = s;
            }
        }
    }
    let mut pairs: Vec<ScoredPair> =
        best.into_iter().map(|((u, v), score)| ScoredPair { u, v, score }).collect();
    pairs.sort_by(|a, b| {
        b.score.total_cmp(&a.score).then_with(|| (a.u, a.v).cmp(&(b.u, b.v)))
    });
    pairs.truncate(k);
    Ok(pairs)
}

/// Fraction of the top `k` predictions that are probe pairs. The
/// denominator is always `k`.
pub fn precision_at_k(predicted: &[ScoredPair], probe: &[(u32, u32)], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let probe: HashSet<(u32, u32)> =
        probe.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let hits = predicted
        .iter()
        .take(k)
        .filter(|p| probe.contains(&(p.u, p.v)))
        .count();
    hits as f64 / k as f64
}

/// Removes a seeded random fraction of the edges, returning the thinned
/// layer and the removed pairs (ascending). Weights of surviving edges are
/// untouched; removed pairs are reported without weights.
pub fn probe_split(net: &Network, fraction: f64, seed: u64) -> Result<(Network, Vec<(u32, u32)>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!("probe fraction must be in [0, 1), got {fraction}")));
    }
    let mut edges = net.undirected_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    edges.shuffle(&mut rng);
    let cut = (edges.len() as f64 * fraction).floor() as usize;
    let mut probe: Vec<(u32, u32)> = edges[..cut].iter().map(|&(u, v, _)| (u, v)).collect();
    probe.sort_unstable();
    let kept = &edges[cut..];
    let thinned = Network::from_edges(net.node_count(), kept)?;
    Ok((thinned, probe))
}
