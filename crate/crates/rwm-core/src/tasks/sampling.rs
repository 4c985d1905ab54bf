//! Walk-corpus sampling for embedding pipelines. Walks follow the frozen
//! blended operator of the target layer, one corpus line per walk.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::accel::{run_with_strategy, UpdateStrategy};
use crate::engine::RwmConfig;
use crate::error::{Error, Result};
use crate::multinet::{CscMatrix, MultiNetwork, NetworkMode};
use crate::QuerySpec;

/// Walk sampling knobs. `walk_length` counts steps, so each line holds the
/// start node plus up to `walk_length` sampled nodes. With `bias = (p, q)`
/// steps are reweighted as in second-order walks: returning to the previous
/// node scales by `1/p`, moving to one of its operator-neighbors keeps the
/// weight, and anything else scales by `1/q`.
#[derive(Debug, Clone)]
pub struct SamplerParams {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub bias: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams { walks_per_node: 10, walk_length: 40, bias: None, seed: 0 }
    }
}

impl SamplerParams {
    fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 || self.walk_length == 0 {
            return Err(Error::Config("walks_per_node and walk_length must be at least 1".into()));
        }
        if let Some((p, q)) = self.bias {
            if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
                return Err(Error::Config(format!("bias parameters must be positive, got ({p}, {q})")));
            }
        }
        Ok(())
    }
}

/// Sampled walks over one layer, grouped by start node.
#[derive(Debug, Clone)]
pub struct WalkCorpus {
    pub layer: usize,
    pub walks: Vec<Vec<u32>>,
}

impl WalkCorpus {
    /// One walk per line, nodes space-separated.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for walk in &self.walks {
            let mut line = String::with_capacity(walk.len() * 6);
            for (i, u) in walk.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&u.to_string());
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Sparse column `c` of walker `layer`'s blended operator, normalized to a
/// probability distribution. Empty when the column carries no mass.
fn operator_column(
    mn: &MultiNetwork,
    layer: usize,
    w_row: &[f64],
    c: u32,
) -> Vec<(u32, f64)> {
    let k = mn.layer_count();
    let mut acc: HashMap<u32, f64> = HashMap::new();
    for j in 0..k {
        let wij = w_row[j];
        if wij == 0.0 {
            continue;
        }
        if j == layer || mn.mode() == NetworkMode::Multiplex {
            let (rows, vals) = mn.layer(j).transition().col(c as usize);
            for (&r, &v) in rows.iter().zip(vals) {
                *acc.entry(r).or_insert(0.0) += wij * v;
            }
        } else {
            let (Some(fwd), Some(back)) = (mn.cross(layer, j), mn.cross(j, layer)) else {
                continue;
            };
            let over = sparse_column(fwd.matrix(), c);
            let walked = sparse_apply(mn.layer(j).transition(), &over);
            let landed = sparse_apply(back.matrix(), &walked);
            for (r, v) in landed {
                *acc.entry(r).or_insert(0.0) += wij * v;
            }
        }
    }
    let total: f64 = acc.values().sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let mut col: Vec<(u32, f64)> = acc.into_iter().map(|(r, v)| (r, v / total)).collect();
    col.sort_unstable_by_key(|&(r, _)| r);
    col
}

fn sparse_column(m: &CscMatrix, c: u32) -> Vec<(u32, f64)> {
    let (rows, vals) = m.col(c as usize);
    rows.iter().copied().zip(vals.iter().copied()).collect()
}

fn sparse_apply(m: &CscMatrix, x: &[(u32, f64)]) -> Vec<(u32, f64)> {
    let mut acc: HashMap<u32, f64> = HashMap::new();
    for &(c, xc) in x {
        let (rows, vals) = m.col(c as usize);
        for (&r, &v) in rows.iter().zip(vals) {
            *acc.entry(r).or_insert(0.0) += v * xc;
        }
    }
    let mut out: Vec<(u32, f64)> = acc.into_iter().collect();
    out.sort_unstable_by_key(|&(r, _)| r);
    out
}

fn pick_weighted(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let r = rng.random::<f64>() * total;
    let mut cum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cum += w;
        if r < cum {
            return i;
        }
    }
    weights.len() - 1
}

/// Samples `walks_per_node` walks from every node of `layer`. Each start
/// node gets its own converged run (relevance frozen after the planned
/// reinforcement phase) and its own deterministic random stream, so corpora
/// are reproducible under any worker count. Walks truncate at nodes whose
/// operator column is empty.
pub fn sample_contexts(
    mn: &MultiNetwork,
    layer: usize,
    cfg: &RwmConfig,
    params: &SamplerParams,
) -> Result<WalkCorpus> {
    params.validate()?;
    cfg.validate()?;
    if layer >= mn.layer_count() {
        return Err(Error::Query(format!(
            "layer {layer} out of range for {} layers",
            mn.layer_count()
        )));
    }
    let n = mn.layer(layer).node_count();
    let per_node: Vec<Vec<Vec<u32>>> = (0..n as u32)
        .into_par_iter()
        .map(|start| -> Result<Vec<Vec<u32>>> {
            let result =
                run_with_strategy(mn, &QuerySpec::single(layer, start), cfg, UpdateStrategy::EarlyStop)?;
            let w_row = result.state.relevance_row_normalized(layer);
            let mut columns: HashMap<u32, Vec<(u32, f64)>> = HashMap::new();
            let column = |c: u32, columns: &mut HashMap<u32, Vec<(u32, f64)>>| {
                columns.entry(c).or_insert_with(|| operator_column(mn, layer, &w_row, c)).clone()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ start as u64);
            let mut walks = Vec::with_capacity(params.walks_per_node);
            for _ in 0..params.walks_per_node {
                let mut walk = Vec::with_capacity(params.walk_length + 1);
                walk.push(start);
                let mut prev: Option<u32> = None;
                let mut cur = start;
                for _ in 0..params.walk_length {
                    let col = column(cur, &mut columns);
                    if col.is_empty() {
                        break;
                    }
                    let idx = match (params.bias, prev) {
                        (Some((p, q)), Some(back)) => {
                            let prev_nbrs: Vec<u32> =
                                column(back, &mut columns).iter().map(|&(r, _)| r).collect();
                            let weights: Vec<f64> = col
                                .iter()
                                .map(|&(v, w)| {
                                    if v == back {
                                        w / p
                                    } else if prev_nbrs.binary_search(&v).is_ok() {
                                        w
                                    } else {
                                        w / q
                                    }
                                })
                                .collect();
                            pick_weighted(&weights, &mut rng)
                        }
                        _ => {
                            let weights: Vec<f64> = col.iter().map(|&(_, w)| w).collect();
                            pick_weighted(&weights, &mut rng)
                        }
                    };
                    let next = col[idx].0;
                    prev = Some(cur);
                    cur = next;
                    walk.push(cur);
                }
                walks.push(walk);
            }
            Ok(walks)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WalkCorpus { layer, walks: per_node.into_iter().flatten().collect() })
}
