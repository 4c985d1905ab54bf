//! Synthetic instances and timing harness: planted-partition base graphs,
//! derived layer stacks, and strategy-by-strategy wall-clock comparison.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::accel::{run_with_strategy, UpdateStrategy};
use crate::engine::RwmConfig;
use crate::error::{Error, Result};
use crate::multinet::{MultiNetwork, Network, QuerySpec};
use crate::tasks::sweep_cut;

/// Planted-partition graph description. Nodes split into `communities`
/// near-equal contiguous blocks; `mixing` is the expected fraction of a
/// node's degree that leaves its block.
#[derive(Debug, Clone, Serialize)]
pub struct PlantedPartition {
    pub nodes: usize,
    pub avg_degree: f64,
    pub communities: usize,
    pub mixing: f64,
    pub seed: u64,
}

impl PlantedPartition {
    fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Synth("need at least 2 nodes".into()));
        }
        if self.communities == 0 || self.communities > self.nodes {
            return Err(Error::Synth(format!(
                "community count {} out of range for {} nodes",
                self.communities, self.nodes
            )));
        }
        if !(self.avg_degree > 0.0) || self.avg_degree >= self.nodes as f64 {
            return Err(Error::Synth(format!(
                "average degree {} infeasible for {} nodes",
                self.avg_degree, self.nodes
            )));
        }
        if !(0.0..1.0).contains(&self.mixing) {
            return Err(Error::Synth(format!("mixing must be in [0, 1), got {}", self.mixing)));
        }
        if self.communities == 1 && self.mixing != 0.0 {
            return Err(Error::Synth("mixing must be 0 with a single community".into()));
        }
        Ok(())
    }
}

fn block_of(node: usize, nodes: usize, blocks: usize) -> u32 {
    (node * blocks / nodes) as u32
}

fn block_bounds(b: usize, nodes: usize, blocks: usize) -> (usize, usize) {
    // contiguous near-equal blocks: block b covers [b*n/B, (b+1)*n/B)
    (b * nodes / blocks, (b + 1) * nodes / blocks)
}

fn sample_pair_count(pairs: u64, p: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
    if pairs == 0 || p <= 0.0 {
        return Ok(0);
    }
    if p > 1.0 {
        return Err(Error::Synth(format!(
            "edge probability {p:.4} above 1; lower the degree or raise the block size"
        )));
    }
    let bin = Binomial::new(pairs, p)
        .map_err(|e| Error::Synth(format!("binomial sampling failed: {e}")))?;
    Ok(bin.sample(rng))
}

/// Generates the base graph and the planted block label per node. Edge
/// counts per block pair are drawn binomially, then distinct pairs are
/// sampled uniformly, so the construction scales to large sparse graphs.
pub fn generate_base(spec: &PlantedPartition) -> Result<(Network, Vec<u32>)> {
    spec.validate()?;
    let n = spec.nodes;
    let b = spec.communities;
    let labels: Vec<u32> = (0..n).map(|v| block_of(v, n, b)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    let key = |u: usize, v: usize| (u.min(v) as u64) * n as u64 + u.max(v) as u64;

    // within-block edges
    for blk in 0..b {
        let (lo, hi) = block_bounds(blk, n, b);
        let size = hi - lo;
        if size < 2 {
            continue;
        }
        let p_in = if b == 1 {
            spec.avg_degree / (n as f64 - 1.0)
        } else {
            spec.avg_degree * (1.0 - spec.mixing) / (size as f64 - 1.0)
        };
        let pairs = (size as u64) * (size as u64 - 1) / 2;
        let count = sample_pair_count(pairs, p_in, &mut rng)?;
        let mut placed = 0;
        while placed < count {
            let u = lo + rng.random_range(0..size);
            let v = lo + rng.random_range(0..size);
            if u == v || !seen.insert(key(u, v)) {
                continue;
            }
            edges.push((u.min(v) as u32, u.max(v) as u32, 1.0));
            placed += 1;
        }
    }
    // between-block edges
    if b > 1 {
        let mean_size = n as f64 / b as f64;
        let p_out = spec.avg_degree * spec.mixing / (n as f64 - mean_size);
        for ba in 0..b {
            for bb in (ba + 1)..b {
                let (alo, ahi) = block_bounds(ba, n, b);
                let (blo, bhi) = block_bounds(bb, n, b);
                let pairs = ((ahi - alo) as u64) * ((bhi - blo) as u64);
                let count = sample_pair_count(pairs, p_out, &mut rng)?;
                let mut placed = 0;
                while placed < count {
                    let u = alo + rng.random_range(0..ahi - alo);
                    let v = blo + rng.random_range(0..bhi - blo);
                    if !seen.insert(key(u, v)) {
                        continue;
                    }
                    edges.push((u as u32, v as u32, 1.0));
                    placed += 1;
                }
            }
        }
    }
    Ok((Network::from_edges(n, &edges)?, labels))
}

/// How to split a base graph into layers: `layers` independent subsamples
/// keeping each base edge with probability `keep_ratio`.
#[derive(Debug, Clone, Serialize)]
pub struct LayerDerivation {
    pub layers: usize,
    pub keep_ratio: f64,
    pub seed: u64,
}

/// Derives a multiplex stack by independently subsampling the base edges
/// per layer. A node left with no edges in some layer gets one of its base
/// edges back, so every layer's transition column keeps full mass and walks
/// conserve probability exactly.
pub fn derive_layers(base: &Network, d: &LayerDerivation) -> Result<MultiNetwork> {
    if d.layers == 0 {
        return Err(Error::Synth("need at least one layer".into()));
    }
    if !(d.keep_ratio > 0.0 && d.keep_ratio <= 1.0) {
        return Err(Error::Synth(format!("keep ratio must be in (0, 1], got {}", d.keep_ratio)));
    }
    let base_edges = base.undirected_edges();
    let n = base.node_count();
    let mut layers = Vec::with_capacity(d.layers);
    for li in 0..d.layers {
        let mut rng = ChaCha8Rng::seed_from_u64(d.seed ^ (li as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(li as u64));
        let mut kept: Vec<(u32, u32, f64)> = base_edges
            .iter()
            .copied()
            .filter(|_| rng.random::<f64>() < d.keep_ratio)
            .collect();
        // repair: nodes the subsample isolated get one incident base edge back
        let mut degree = vec![0u32; n];
        for &(u, v, _) in &kept {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut kept_set: HashSet<(u32, u32)> = kept.iter().map(|&(u, v, _)| (u, v)).collect();
        for u in 0..n as u32 {
            if degree[u as usize] > 0 || base.is_isolated(u) {
                continue;
            }
            let (nbrs, weights) = base.neighbors(u);
            let pick = rng.random_range(0..nbrs.len());
            let v = nbrs[pick];
            let w = weights[pick];
            let e = (u.min(v), u.max(v));
            if kept_set.insert(e) {
                kept.push((e.0, e.1, w));
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        layers.push(Network::from_edges(n, &kept)?);
    }
    MultiNetwork::multiplex(layers)
}

/// A labeled instance for the timing harness.
pub struct BenchInstance {
    pub label: String,
    pub mn: MultiNetwork,
    /// Planted block per node, when known; enables F1 scoring.
    pub blocks: Option<Vec<u32>>,
}

/// One instance-strategy measurement.
#[derive(Debug, Clone, Serialize)]
pub struct BenchCell {
    pub instance: String,
    pub nodes: usize,
    pub layers: usize,
    pub strategy: String,
    pub trials: usize,
    pub reps: usize,
    pub median_ms: f64,
    pub mean_iterations: f64,
    pub mean_support_split: f64,
    pub mean_support_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_f1: Option<f64>,
}

/// Timing and quality summary across instances and strategies.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "instance\tnodes\tlayers\tstrategy\ttrials\treps\tmedian_ms\tmean_iterations\tmean_support_split\tmean_support_final\tmean_f1\n",
        );
        for c in &self.cells {
            let f1 = c.mean_f1.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.instance,
                c.nodes,
                c.layers,
                c.strategy,
                c.trials,
                c.reps,
                c.median_ms,
                c.mean_iterations,
                c.mean_support_split,
                c.mean_support_final,
                f1
            );
        }
        out
    }

    /// Median wall-clock of one instance-strategy cell, if present.
    pub fn median_ms(&self, instance: &str, strategy: UpdateStrategy) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.instance == instance && c.strategy == strategy.name())
            .map(|c| c.median_ms)
    }
}

/// F1 overlap between a detected member set and the planted block of the
/// query node.
pub fn f1_against_block(members: &[u32], blocks: &[u32], query: u32) -> f64 {
    let target = blocks[query as usize];
    let truth: HashSet<u32> = (0..blocks.len() as u32).filter(|&v| blocks[v as usize] == target).collect();
    let hits = members.iter().filter(|&&m| truth.contains(&m)).count();
    if members.is_empty() || truth.is_empty() {
        return 0.0;
    }
    2.0 * hits as f64 / (members.len() + truth.len()) as f64
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Times every strategy on every instance. Per instance, `trials` query
/// nodes are drawn once (never isolated in their layer, when avoidable) and
/// shared across strategies; each strategy's full trial sweep is repeated
/// `reps` times and the median wall-clock is reported. Iteration counts,
/// support sizes, and F1 (when blocks are known) come from the last
/// repetition, which is deterministic anyway.
pub fn run_benchmark(
    instances: &[BenchInstance],
    strategies: &[UpdateStrategy],
    cfg: &RwmConfig,
    trials: usize,
    reps: usize,
) -> Result<BenchReport> {
    if trials == 0 || reps == 0 {
        return Err(Error::Config("trials and reps must be at least 1".into()));
    }
    let mut cells = Vec::new();
    for inst in instances {
        let k = inst.mn.layer_count();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut queries = Vec::with_capacity(trials);
        for _ in 0..trials {
            let layer = rng.random_range(0..k);
            let n = inst.mn.layer(layer).node_count();
            let mut node = rng.random_range(0..n) as u32;
            for _ in 0..64 {
                if !inst.mn.layer(layer).is_isolated(node) {
                    break;
                }
                node = rng.random_range(0..n) as u32;
            }
            queries.push(QuerySpec::single(layer, node));
        }
        for &strategy in strategies {
            let mut durations = Vec::with_capacity(reps);
            let mut last_runs = Vec::new();
            for _ in 0..reps {
                let started = Instant::now();
                let runs: Vec<_> = queries
                    .iter()
                    .map(|q| run_with_strategy(&inst.mn, q, cfg, strategy))
                    .collect::<Result<_>>()?;
                durations.push(started.elapsed().as_secs_f64() * 1e3);
                last_runs = runs;
            }
            let mut iterations = 0.0;
            let mut support_split = 0.0;
            let mut support_final = 0.0;
            let mut f1_sum = 0.0;
            for (q, run) in queries.iter().zip(&last_runs) {
                iterations += run.state.iteration() as f64;
                support_split += run.support_at_split[q.layer] as f64;
                support_final += run.support_final[q.layer] as f64;
                if let Some(blocks) = &inst.blocks {
                    let c = sweep_cut(run.state.vector(q.layer), inst.mn.layer(q.layer))?;
                    f1_sum += f1_against_block(&c.members, blocks, q.nodes[0]);
                }
            }
            let t = trials as f64;
            cells.push(BenchCell {
                instance: inst.label.clone(),
                nodes: inst.mn.layer(0).node_count(),
                layers: k,
                strategy: strategy.name().to_string(),
                trials,
                reps,
                median_ms: median(durations),
                mean_iterations: iterations / t,
                mean_support_split: support_split / t,
                mean_support_final: support_final / t,
                mean_f1: inst.blocks.as_ref().map(|_| f1_sum / t),
            });
        }
    }
    Ok(BenchReport { cells })
}
