//! Core iteration: one walker per layer, mutual reinforcement through a
//! relevance matrix, and restart bias toward the seed nodes.
//!
//! Each iteration is synchronous. Every walker advances from the same
//! snapshot of all vectors, and only then does the relevance matrix absorb
//! the new agreement increment. Walker `i` moves through a blended operator
//! that routes mass out to each layer `j`, one step along `j`'s edges, and
//! back, weighted by the row-normalized relevance of `j` to `i`. The
//! operator is never materialized during iteration; it is applied as a
//! chain of sparse products.

use crate::error::{Error, Result};
use crate::multinet::{MultiNetwork, NetworkMode, QuerySpec};

/// Iteration parameters shared by every run mode.
#[derive(Debug, Clone)]
pub struct RwmConfig {
    /// Probability of following an edge; the rest restarts at the seed.
    pub alpha: f64,
    /// Per-iteration decay of relevance increments, in (0, 1).
    pub lambda: f64,
    /// Operator-change tolerance; sizes the reinforcement phase.
    pub epsilon: f64,
    /// Probability mass a truncated update must cover, in (0, 1].
    pub theta: f64,
    /// Hard cap on iterations.
    pub max_iters: usize,
    /// Stop once the largest per-layer L1 change falls below this.
    pub vector_tol: f64,
    /// Seed for randomized consumers (walk sampling, benchmarks).
    pub seed: u64,
}

impl Default for RwmConfig {
    fn default() -> Self {
        RwmConfig {
            alpha: 0.9,
            lambda: 0.7,
            epsilon: 0.01,
            theta: 0.9,
            max_iters: 1000,
            vector_tol: 1e-9,
            seed: 0,
        }
    }
}

impl RwmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::Config(format!("lambda must be in (0, 1), got {}", self.lambda)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must be in (0, 1), got {}", self.epsilon)));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must be in (0, 1], got {}", self.theta)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.vector_tol >= 0.0 && self.vector_tol.is_finite()) {
            return Err(Error::Config(format!("vector_tol must be finite and >= 0, got {}", self.vector_tol)));
        }
        Ok(())
    }
}

/// Mutable run state: per-layer visiting vectors, the restart vectors they
/// are biased toward, and the accumulated relevance matrix.
///
/// Invariants kept by the stepping functions: vectors stay entrywise
/// nonnegative; the relevance matrix has ones on construction's diagonal and
/// never decreases entrywise; `relevance(i, j) <= [i == j] + lambda / (1 - lambda)`.
#[derive(Debug, Clone)]
pub struct WalkerState {
    pub(crate) vectors: Vec<Vec<f64>>,
    pub(crate) restart: Vec<Vec<f64>>,
    // K*K row-major, raw accumulated weights (not row-normalized)
    pub(crate) relevance: Vec<f64>,
    pub(crate) t: usize,
    pub(crate) query: QuerySpec,
}

impl WalkerState {
    pub fn layer_count(&self) -> usize {
        self.vectors.len()
    }

    /// Current visiting vector of walker `i`.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    /// Restart vector of walker `i` (fixed after initialization).
    pub fn restart_vector(&self, i: usize) -> &[f64] {
        &self.restart[i]
    }

    /// Raw accumulated relevance of layer `j` for walker `i`.
    pub fn relevance(&self, i: usize, j: usize) -> f64 {
        self.relevance[i * self.layer_count() + j]
    }

    /// Row `i` of the relevance matrix, normalized to sum to one.
    pub fn relevance_row_normalized(&self, i: usize) -> Vec<f64> {
        let k = self.layer_count();
        let row = &self.relevance[i * k..(i + 1) * k];
        let sum: f64 = row.iter().sum();
        row.iter().map(|w| w / sum).collect()
    }

    /// Completed iterations.
    pub fn iteration(&self) -> usize {
        self.t
    }

    pub fn query(&self) -> &QuerySpec {
        &self.query
    }

    /// Nonzero entries per walker vector.
    pub fn support_sizes(&self) -> Vec<usize> {
        self.vectors.iter().map(|x| x.iter().filter(|&&v| v > 0.0).count()).collect()
    }
}

pub(crate) fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub(crate) fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 1.0)
}

/// Builds the starting state. The seed layer gets uniform mass over the
/// query nodes. In general mode other layers are seeded through their
/// cross-transition; when that lands on nothing, the seed is pushed along
/// the query layer's edges hop by hop until some reached node carries a
/// cross-edge over, and the mapped vector is normalized. A layer that no
/// such walk can reach is an error.
pub fn init_state(mn: &MultiNetwork, query: &QuerySpec, cfg: &RwmConfig) -> Result<WalkerState> {
    cfg.validate()?;
    let k = mn.layer_count();
    if query.layer >= k {
        return Err(Error::Query(format!("layer {} out of range for {k} layers", query.layer)));
    }
    let nq = mn.layer(query.layer).node_count();
    let mut nodes = query.nodes.clone();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.is_empty() {
        return Err(Error::Query("empty query node set".into()));
    }
    if let Some(&bad) = nodes.iter().find(|&&u| u as usize >= nq) {
        return Err(Error::Query(format!("node {bad} out of range for {nq} nodes")));
    }

    let mut x_q = vec![0.0; nq];
    let share = 1.0 / nodes.len() as f64;
    for &u in &nodes {
        x_q[u as usize] = share;
    }

    let mut restart = Vec::with_capacity(k);
    for i in 0..k {
        if i == query.layer || mn.mode() == NetworkMode::Multiplex {
            restart.push(x_q.clone());
            continue;
        }
        let mut seeded = match mn.cross(query.layer, i) {
            Some(ct) => ct.apply(&x_q),
            None => vec![0.0; mn.layer(i).node_count()],
        };
        if l1_norm(&seeded) == 0.0 {
            seeded = seed_via_walk(mn, query.layer, i, &x_q)?;
        }
        let mass = l1_norm(&seeded);
        debug_assert!(mass > 0.0);
        for v in &mut seeded {
            *v /= mass;
        }
        restart.push(seeded);
    }

    let mut relevance = vec![0.0; k * k];
    for i in 0..k {
        relevance[i * k + i] = 1.0;
    }
    Ok(WalkerState {
        vectors: restart.clone(),
        restart,
        relevance,
        t: 0,
        query: QuerySpec { layer: query.layer, nodes },
    })
}

/// Walks the seed distribution outward along the query layer until a node
/// with cross-edges into layer `target` holds walk mass, then maps it over.
fn seed_via_walk(mn: &MultiNetwork, q: usize, target: usize, x_q: &[f64]) -> Result<Vec<f64>> {
    let Some(ct) = mn.cross(q, target) else {
        return Err(Error::Unreachable { from: q, to: target });
    };
    let net = mn.layer(q);
    let n = net.node_count();
    let mut visited = vec![false; n];
    let mut frontier: Vec<u32> = Vec::new();
    for (u, &v) in x_q.iter().enumerate() {
        if v > 0.0 {
            visited[u] = true;
            frontier.push(u as u32);
        }
    }
    let mut walked = x_q.to_vec();
    let mut scratch = vec![0.0; n];
    for _hop in 1..=n {
        let mut next: Vec<u32> = Vec::new();
        for &u in &frontier {
            let (nbrs, _) = net.neighbors(u);
            for &v in nbrs {
                if !visited[v as usize] {
                    visited[v as usize] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            return Err(Error::Unreachable { from: q, to: target });
        }
        net.transition().apply(&walked, &mut scratch);
        std::mem::swap(&mut walked, &mut scratch);
        if next.iter().any(|&u| ct.matrix().col_nnz(u as usize) > 0) {
            let out = ct.apply(&walked);
            if l1_norm(&out) > 0.0 {
                return Ok(out);
            }
        }
        frontier = next;
    }
    Err(Error::Unreachable { from: q, to: target })
}

/// Applies walker `i`'s blended operator to `input` term by term, without
/// normalization: sum over j of `w_row[j] * S_{j->i} P_j S_{i->j} input`.
pub fn propagate_layer(mn: &MultiNetwork, i: usize, w_row: &[f64], input: &[f64]) -> Vec<f64> {
    let k = mn.layer_count();
    let n_i = mn.layer(i).node_count();
    let mut acc = vec![0.0; n_i];
    for j in 0..k {
        let wij = w_row[j];
        if wij == 0.0 {
            continue;
        }
        if j == i || mn.mode() == NetworkMode::Multiplex {
            mn.layer(j).transition().apply_scaled_add(input, wij, &mut acc);
        } else {
            let (Some(fwd), Some(back)) = (mn.cross(i, j), mn.cross(j, i)) else {
                continue;
            };
            let mut over = vec![0.0; mn.layer(j).node_count()];
            fwd.matrix().apply(input, &mut over);
            let mut walked = vec![0.0; mn.layer(j).node_count()];
            mn.layer(j).transition().apply(&over, &mut walked);
            back.matrix().apply_scaled_add(&walked, wij, &mut acc);
        }
    }
    acc
}

/// One application of walker `i`'s transition operator to its own vector.
/// General mode rescales the result to unit mass, mirroring the column
/// normalization of the materialized operator. Returns None when every
/// route loses all mass (degenerate step); the caller substitutes the
/// restart vector.
pub fn apply_modified_transition(
    i: usize,
    state: &WalkerState,
    mn: &MultiNetwork,
) -> Option<Vec<f64>> {
    let w_row = state.relevance_row_normalized(i);
    let mut z = propagate_layer(mn, i, &w_row, &state.vectors[i]);
    let mass = l1_norm(&z);
    if mass == 0.0 {
        return None;
    }
    if mn.mode() == NetworkMode::General {
        for v in &mut z {
            *v /= mass;
        }
    }
    Some(z)
}

/// Relevance matrix after absorbing the agreement increment of the current
/// iterate. Walker pairs are compared on restart-adjusted vectors (the
/// restart share is subtracted and negatives clamp to zero), with walker
/// `j`'s vector mapped into `i`'s node space first. The increment decays
/// as `lambda^t`, so calls expect `state.t` to already count this iterate.
pub fn update_relevance(state: &WalkerState, mn: &MultiNetwork, cfg: &RwmConfig) -> Vec<f64> {
    let k = state.layer_count();
    let decay = cfg.lambda.powi(state.t as i32);
    let adjusted: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            state.vectors[i]
                .iter()
                .zip(&state.restart[i])
                .map(|(&x, &r)| (x - (1.0 - cfg.alpha) * r).max(0.0))
                .collect()
        })
        .collect();
    let mut relevance = state.relevance.clone();
    for i in 0..k {
        for j in 0..k {
            let agreement = if i == j || mn.mode() == NetworkMode::Multiplex {
                cosine(&adjusted[i], &adjusted[j])
            } else {
                let mapped = mn.map_between(j, i, &adjusted[j]);
                cosine(&adjusted[i], &mapped)
            };
            relevance[i * k + j] += decay * agreement;
        }
    }
    relevance
}

fn advance_vectors(state: &mut WalkerState, mn: &MultiNetwork, cfg: &RwmConfig) {
    let k = state.layer_count();
    let mut next = Vec::with_capacity(k);
    for i in 0..k {
        let propagated =
            apply_modified_transition(i, state, mn).unwrap_or_else(|| state.restart[i].clone());
        let x_next: Vec<f64> = propagated
            .iter()
            .zip(&state.restart[i])
            .map(|(&z, &r)| cfg.alpha * z + (1.0 - cfg.alpha) * r)
            .collect();
        next.push(x_next);
    }
    state.vectors = next;
    state.t += 1;
}

/// One full iteration: synchronous vector advance, then relevance update.
pub fn step(state: &mut WalkerState, mn: &MultiNetwork, cfg: &RwmConfig) {
    advance_vectors(state, mn, cfg);
    state.relevance = update_relevance(state, mn, cfg);
}

/// One iteration with the relevance matrix held fixed.
pub fn step_frozen(state: &mut WalkerState, mn: &MultiNetwork, cfg: &RwmConfig) {
    advance_vectors(state, mn, cfg);
}

/// Runs full iterations until the largest per-layer L1 change drops below
/// `vector_tol` or `max_iters` is reached.
pub fn run(mn: &MultiNetwork, query: &QuerySpec, cfg: &RwmConfig) -> Result<WalkerState> {
    let mut state = init_state(mn, query, cfg)?;
    while state.t < cfg.max_iters {
        let prev = state.vectors.clone();
        step(&mut state, mn, cfg);
        let delta = (0..state.layer_count())
            .map(|i| l1_diff(&state.vectors[i], &prev[i]))
            .fold(0.0, f64::max);
        if delta < cfg.vector_tol {
            break;
        }
    }
    Ok(state)
}

/// Default size cap for materializing an operator densely.
pub const DENSE_OPERATOR_CAP: usize = 4096;

/// Materializes walker `i`'s operator as a dense row-major matrix by
/// evaluating it column by column. General mode normalizes each nonzero
/// column to sum to one. Intended for diagnostics; errors above `cap`.
pub fn dense_operator(
    mn: &MultiNetwork,
    state: &WalkerState,
    i: usize,
    cap: usize,
) -> Result<Vec<f64>> {
    let n = mn.layer(i).node_count();
    if n > cap {
        return Err(Error::DenseCap { layer: i, nodes: n, cap });
    }
    let w_row = state.relevance_row_normalized(i);
    let mut m = vec![0.0; n * n];
    let mut unit = vec![0.0; n];
    for c in 0..n {
        unit[c] = 1.0;
        let mut col = propagate_layer(mn, i, &w_row, &unit);
        unit[c] = 0.0;
        if mn.mode() == NetworkMode::General {
            let s = l1_norm(&col);
            if s > 0.0 {
                for v in &mut col {
                    *v /= s;
                }
            }
        }
        for (r, &v) in col.iter().enumerate() {
            m[r * n + c] = v;
        }
    }
    Ok(m)
}

/// Largest entrywise operator change per layer between two states,
/// computed on dense materializations.
pub fn transition_residual(
    mn: &MultiNetwork,
    before: &WalkerState,
    after: &WalkerState,
    cap: usize,
) -> Result<Vec<f64>> {
    let k = mn.layer_count();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let a = dense_operator(mn, before, i, cap)?;
        let b = dense_operator(mn, after, i, cap)?;
        let delta = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        out.push(delta);
    }
    Ok(out)
}

/// Per-layer operator change at each of the first `steps` iterations.
#[derive(Debug, Clone)]
pub struct ResidualTrace {
    /// `per_layer[i][t]` is the operator change of layer `i` between
    /// iterations `t` and `t + 1`.
    pub per_layer: Vec<Vec<f64>>,
}

/// Runs `steps` full iterations recording the dense operator change at each.
pub fn residual_trace(
    mn: &MultiNetwork,
    query: &QuerySpec,
    cfg: &RwmConfig,
    steps: usize,
    cap: usize,
) -> Result<ResidualTrace> {
    let k = mn.layer_count();
    let mut state = init_state(mn, query, cfg)?;
    let mut ops: Vec<Vec<f64>> =
        (0..k).map(|i| dense_operator(mn, &state, i, cap)).collect::<Result<_>>()?;
    let mut per_layer = vec![Vec::with_capacity(steps); k];
    for _ in 0..steps {
        step(&mut state, mn, cfg);
        for (i, trace) in per_layer.iter_mut().enumerate() {
            let next = dense_operator(mn, &state, i, cap)?;
            let delta = ops[i].iter().zip(&next).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            trace.push(delta);
            ops[i] = next;
        }
    }
    Ok(ResidualTrace { per_layer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multinet::{CrossTransition, Network};

    fn triangle() -> Network {
        Network::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn cfg() -> RwmConfig {
        RwmConfig::default()
    }

    #[test]
    fn single_step_on_triangle() {
        // from e_0 with alpha 0.5: half restarts, half splits over neighbors
        let mn = MultiNetwork::multiplex(vec![triangle()]).unwrap();
        let cfg = RwmConfig { alpha: 0.5, ..cfg() };
        let mut state = init_state(&mn, &QuerySpec::single(0, 0), &cfg).unwrap();
        step(&mut state, &mn, &cfg);
        let x = state.vector(0);
        assert!((x[0] - 0.5).abs() < 1e-15);
        assert!((x[1] - 0.25).abs() < 1e-15);
        assert!((x[2] - 0.25).abs() < 1e-15);
        assert_eq!(state.iteration(), 1);
    }

    #[test]
    fn multi_node_query_splits_mass_uniformly() {
        let mn = MultiNetwork::multiplex(vec![triangle()]).unwrap();
        let state = init_state(&mn, &QuerySpec::multi(0, vec![2, 0, 2]), &cfg()).unwrap();
        assert_eq!(state.restart_vector(0), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn config_validation_rejects_out_of_range() {
        let mn = MultiNetwork::multiplex(vec![triangle()]).unwrap();
        for bad in [
            RwmConfig { alpha: 0.0, ..cfg() },
            RwmConfig { alpha: 1.5, ..cfg() },
            RwmConfig { lambda: 1.0, ..cfg() },
            RwmConfig { epsilon: 0.0, ..cfg() },
            RwmConfig { theta: 0.0, ..cfg() },
            RwmConfig { max_iters: 0, ..cfg() },
            RwmConfig { vector_tol: f64::NAN, ..cfg() },
        ] {
            assert!(init_state(&mn, &QuerySpec::single(0, 0), &bad).is_err());
        }
    }

    #[test]
    fn query_validation() {
        let mn = MultiNetwork::multiplex(vec![triangle()]).unwrap();
        assert!(init_state(&mn, &QuerySpec::single(1, 0), &cfg()).is_err());
        assert!(init_state(&mn, &QuerySpec::single(0, 3), &cfg()).is_err());
        assert!(init_state(&mn, &QuerySpec { layer: 0, nodes: vec![] }, &cfg()).is_err());
    }

    #[test]
    fn zero_tolerance_runs_all_iterations() {
        let mn = MultiNetwork::multiplex(vec![triangle()]).unwrap();
        let cfg = RwmConfig { vector_tol: 0.0, max_iters: 10, ..cfg() };
        let state = run(&mn, &QuerySpec::single(0, 0), &cfg).unwrap();
        assert_eq!(state.iteration(), 10);
    }

    #[test]
    fn identical_layers_reach_full_agreement() {
        // two identical layers: adjusted vectors coincide, so each increment
        // is the full decay factor
        let mn = MultiNetwork::multiplex(vec![triangle(), triangle()]).unwrap();
        let cfg = cfg();
        let mut state = init_state(&mn, &QuerySpec::single(0, 0), &cfg).unwrap();
        assert_eq!(state.relevance(0, 0), 1.0);
        assert_eq!(state.relevance(0, 1), 0.0);

        step(&mut state, &mn, &cfg);
        assert!((state.relevance(0, 1) - cfg.lambda).abs() < 1e-12);
        assert!((state.relevance(0, 0) - (1.0 + cfg.lambda)).abs() < 1e-12);
        let row = state.relevance_row_normalized(0);
        let denom = 1.0 + 2.0 * cfg.lambda;
        assert!((row[0] - (1.0 + cfg.lambda) / denom).abs() < 1e-12);
        assert!((row[1] - cfg.lambda / denom).abs() < 1e-12);
    }

    #[test]
    fn relevance_stays_below_geometric_cap() {
        let layers = vec![
            triangle(),
            Network::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap(),
        ];
        let mn = MultiNetwork::multiplex(layers).unwrap();
        let cfg = cfg();
        let mut state = init_state(&mn, &QuerySpec::single(0, 0), &cfg).unwrap();
        let cap = cfg.lambda / (1.0 - cfg.lambda);
        for _ in 0..60 {
            let before = state.relevance.clone();
            step(&mut state, &mn, &cfg);
            for i in 0..2 {
                for j in 0..2 {
                    let w = state.relevance(i, j);
                    assert!(w + 1e-12 >= before[i * 2 + j], "relevance must not decrease");
                    let bound = if i == j { 1.0 + cap } else { cap };
                    assert!(w <= bound + 1e-9, "w({i},{j}) = {w} above {bound}");
                }
            }
        }
    }

    #[test]
    fn relevance_update_sees_the_whole_post_advance_generation() {
        // hand-built 2-layer case: both walkers leave the query node on the
        // first step, and their new supports overlap on node 1 only
        let a = Network::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let b = Network::from_edges(3, &[(0, 2, 1.0), (0, 1, 1.0)]).unwrap();
        let mn = MultiNetwork::multiplex(vec![a, b]).unwrap();
        let cfg = RwmConfig { alpha: 0.8, ..cfg() };
        let mut state = init_state(&mn, &QuerySpec::single(0, 0), &cfg).unwrap();
        step(&mut state, &mn, &cfg);

        assert!(l1_diff(state.vector(0), &[0.2, 0.8, 0.0]) < 1e-15);
        assert!(l1_diff(state.vector(1), &[0.2, 0.4, 0.4]) < 1e-15);

        // off-diagonal weight from the post-advance vectors:
        // cos([0, .8, 0], [0, .4, .4]) = 1/sqrt(2), decayed once
        let want = cfg.lambda / 2f64.sqrt();
        assert!((state.relevance[1] - want).abs() < 1e-12);
        assert!((state.relevance[2] - want).abs() < 1e-12);

        // updating walker by walker instead would compare walker 0's new
        // vector against walker 1's restart residue, which shares no support
        let y0_new = [0.0, 0.8, 0.0];
        let y1_old = [0.8, 0.0, 0.0];
        assert_eq!(cosine(&y0_new, &y1_old), 0.0);
        assert!(want > 1e-3, "fixture must separate the two orderings");

        // with the matrix frozen the next advance is per-walker and exact
        let snapshot = state.clone();
        let mut expected = Vec::new();
        for i in 0..2 {
            let z = apply_modified_transition(i, &snapshot, &mn)
                .unwrap_or_else(|| snapshot.restart[i].clone());
            let x: Vec<f64> = z
                .iter()
                .zip(&snapshot.restart[i])
                .map(|(&p, &r)| cfg.alpha * p + (1.0 - cfg.alpha) * r)
                .collect();
            expected.push(x);
        }
        let mut stepped = snapshot.clone();
        step_frozen(&mut stepped, &mn, &cfg);
        for i in 0..2 {
            assert!(l1_diff(stepped.vector(i), &expected[i]) < 1e-15);
        }
        assert_eq!(stepped.relevance, snapshot.relevance);
    }

    #[test]
    fn degenerate_step_restores_restart_mass() {
        // both layers leave the query node isolated: propagation loses all
        // mass and the restart vector substitutes
        let a = Network::from_edges(3, &[(1, 2, 1.0)]).unwrap();
        let b = Network::from_edges(3, &[(1, 2, 2.0)]).unwrap();
        let mn = MultiNetwork::multiplex(vec![a, b]).unwrap();
        let cfg = cfg();
        let mut state = init_state(&mn, &QuerySpec::single(0, 0), &cfg).unwrap();
        assert!(apply_modified_transition(0, &state, &mn).is_none());
        step(&mut state, &mn, &cfg);
        for i in 0..2 {
            assert_eq!(state.vector(i), state.restart_vector(i));
            assert!((l1_norm(state.vector(i)) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn general_mode_seeds_through_cross_edges() {
        let a = triangle();
        let b = Network::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let fwd = CrossTransition::from_edges(0, 1, 3, 2, &[(0, 0, 1.0), (0, 1, 3.0)]).unwrap();
        let back = CrossTransition::from_edges(1, 0, 2, 3, &[(0, 0, 1.0), (1, 0, 3.0)]).unwrap();
        let mn = MultiNetwork::general(vec![a, b], vec![fwd, back]).unwrap();
        let state = init_state(&mn, &QuerySpec::single(0, 0), &cfg()).unwrap();
        assert_eq!(state.restart_vector(1), &[0.25, 0.75]);
    }

    #[test]
    fn seeding_walks_to_the_nearest_bridge() {
        // path 0-1-2 in the query layer; only node 2 crosses over, two hops
        // from the seed
        let a = Network::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let b = Network::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let fwd = CrossTransition::from_edges(0, 1, 3, 2, &[(2, 1, 1.0)]).unwrap();
        let back = CrossTransition::from_edges(1, 0, 2, 3, &[(1, 2, 1.0)]).unwrap();
        let mn = MultiNetwork::general(vec![a, b], vec![fwd, back]).unwrap();
        let state = init_state(&mn, &QuerySpec::single(0, 0), &cfg()).unwrap();
        // P^2 e_0 = (1/2, 0, 1/2); only node 2 maps over; normalized to e_1
        assert_eq!(state.restart_vector(1), &[0.0, 1.0]);
    }

    #[test]
    fn unreachable_layer_is_an_error() {
        let a = Network::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let b = Network::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        // the only bridge sits in the component not containing the seed
        let fwd = CrossTransition::from_edges(0, 1, 4, 2, &[(2, 0, 1.0)]).unwrap();
        let back = CrossTransition::from_edges(1, 0, 2, 4, &[(0, 2, 1.0)]).unwrap();
        let mn = MultiNetwork::general(vec![a, b], vec![fwd, back]).unwrap();
        let err = init_state(&mn, &QuerySpec::single(0, 0), &cfg()).unwrap_err();
        assert!(matches!(err, Error::Unreachable { from: 0, to: 1 }));
    }

    #[test]
    fn general_degenerate_transition_signals_none() {
        // surgically place all mass on a node that is isolated in its own
        // layer and has no cross-edges out
        let a = Network::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        let b = Network::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let fwd = CrossTransition::from_edges(0, 1, 3, 2, &[(0, 0, 1.0)]).unwrap();
        let back = CrossTransition::from_edges(1, 0, 2, 3, &[(0, 0, 1.0)]).unwrap();
        let mn = MultiNetwork::general(vec![a, b], vec![fwd, back]).unwrap();
        let mut state = init_state(&mn, &QuerySpec::single(0, 0), &cfg()).unwrap();
        let mut x = vec![0.0; 3];
        x[2] = 1.0;
        state.vectors[0] = x;
        assert!(apply_modified_transition(0, &state, &mn).is_none());
    }

    #[test]
    fn residual_trace_decays_within_multiplex_bound() {
        let layers = vec![
            triangle(),
            Network::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap(),
            Network::from_edges(3, &[(0, 2, 1.0), (1, 2, 1.0)]).unwrap(),
        ];
        let mn = MultiNetwork::multiplex(layers).unwrap();
        let cfg = cfg();
        let trace =
            residual_trace(&mn, &QuerySpec::single(0, 0), &cfg, 12, DENSE_OPERATOR_CAP).unwrap();
        let k = 3.0;
        for per_layer in &trace.per_layer {
            for (t, &delta) in per_layer.iter().enumerate() {
                let bound = cfg.lambda.powi(t as i32) * k;
                assert!(delta <= bound + 1e-12, "delta {delta} above bound {bound} at t {t}");
            }
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let mn = MultiNetwork::multiplex(vec![triangle()]).unwrap();
        let state = init_state(&mn, &QuerySpec::single(0, 0), &cfg()).unwrap();
        assert!(matches!(
            dense_operator(&mn, &state, 0, 2),
            Err(Error::DenseCap { layer: 0, nodes: 3, cap: 2 })
        ));
    }
}
