//! Bounded shortcuts around the full iteration: freezing the relevance
//! matrix once its per-step change is provably below tolerance, and
//! truncating vector updates to the head of the probability mass.

use std::collections::VecDeque;
use std::str::FromStr;

use crate::engine::{
    self, init_state, l1_diff, l1_norm, propagate_layer, step, step_frozen, RwmConfig, WalkerState,
};
use crate::error::Result;
use crate::multinet::{MultiNetwork, NetworkMode, QuerySpec};

/// How a run trades exactness for speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateStrategy {
    /// Full vector updates and relevance updates every iteration.
    Exact,
    /// Full vector updates; relevance updates stop after the planned split.
    EarlyStop,
    /// Truncated vector updates throughout; relevance updates stop after
    /// the planned split.
    Partial,
}

impl UpdateStrategy {
    pub const ALL: [UpdateStrategy; 3] =
        [UpdateStrategy::Exact, UpdateStrategy::EarlyStop, UpdateStrategy::Partial];

    pub fn name(&self) -> &'static str {
        match self {
            UpdateStrategy::Exact => "exact",
            UpdateStrategy::EarlyStop => "earlystop",
            UpdateStrategy::Partial => "partial",
        }
    }
}

impl FromStr for UpdateStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(UpdateStrategy::Exact),
            "earlystop" => Ok(UpdateStrategy::EarlyStop),
            "partial" => Ok(UpdateStrategy::Partial),
            other => Err(format!("unknown strategy {other:?} (expected exact, earlystop, partial)")),
        }
    }
}

/// Iteration budget: `reinforce` iterations with relevance updates, then
/// frozen-relevance iterations up to `cap` total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhasePlan {
    pub reinforce: usize,
    pub cap: usize,
}

/// Smallest iteration count after which every further relevance increment
/// moves the blended operator by less than `epsilon` in total.
///
/// The geometric tail of increments beyond `t` sums to at most
/// `lambda^t * K / (1 - lambda)` per operator entry in multiplex mode, and
/// gains a factor `K * (largest_layer + 2)` in general mode.
pub fn split_time(
    cfg: &RwmConfig,
    layer_count: usize,
    largest_layer: usize,
    mode: NetworkMode,
) -> usize {
    let k = layer_count as f64;
    let target = match mode {
        NetworkMode::Multiplex => cfg.epsilon * (1.0 - cfg.lambda) / k,
        NetworkMode::General => {
            cfg.epsilon * (1.0 - cfg.lambda) / (k * k * (largest_layer as f64 + 2.0))
        }
    };
    let t = target.ln() / cfg.lambda.ln();
    t.ceil().max(1.0) as usize
}

/// Phase budget for a concrete network stack.
pub fn plan(mn: &MultiNetwork, cfg: &RwmConfig) -> PhasePlan {
    let largest = mn.layers().iter().map(|l| l.node_count()).max().unwrap_or(1);
    let reinforce =
        split_time(cfg, mn.layer_count(), largest, mn.mode()).min(cfg.max_iters);
    PhasePlan { reinforce, cap: cfg.max_iters }
}

/// Per-walker adjacency the truncation scan expands across: every edge some
/// blended-operator term can move mass along, projected into the walker's
/// node space. Without this closure the scan could strand mass that arrived
/// through another layer's edges and never reach the covering factor.
///
/// Multiplex stacks share one union list across walkers. General stacks get
/// one list per walker, built by chaining cross-map, step, and return
/// supports; cost follows the sparsity of the cross maps.
pub struct ReachLists {
    shared: bool,
    lists: Vec<Vec<Vec<u32>>>,
}

impl ReachLists {
    pub fn build(mn: &MultiNetwork) -> ReachLists {
        match mn.mode() {
            NetworkMode::Multiplex => {
                let n = mn.layer(0).node_count();
                let mut union: Vec<Vec<u32>> = Vec::with_capacity(n);
                for u in 0..n as u32 {
                    let mut nbrs: Vec<u32> = Vec::new();
                    for layer in mn.layers() {
                        nbrs.extend_from_slice(layer.neighbors(u).0);
                    }
                    nbrs.sort_unstable();
                    nbrs.dedup();
                    union.push(nbrs);
                }
                ReachLists { shared: true, lists: vec![union] }
            }
            NetworkMode::General => {
                let lists = (0..mn.layer_count()).map(|i| general_reach(mn, i)).collect();
                ReachLists { shared: false, lists }
            }
        }
    }

    pub fn walker(&self, i: usize) -> &[Vec<u32>] {
        if self.shared {
            &self.lists[0]
        } else {
            &self.lists[i]
        }
    }
}

fn general_reach(mn: &MultiNetwork, i: usize) -> Vec<Vec<u32>> {
    let own = mn.layer(i);
    let n = own.node_count();
    let mut out = Vec::with_capacity(n);
    for u in 0..n as u32 {
        let mut nbrs: Vec<u32> = own.neighbors(u).0.to_vec();
        for j in 0..mn.layer_count() {
            if j == i {
                continue;
            }
            // support of the round trip: map u into layer j, step there,
            // map the endpoints back
            let fwd = mn.cross(i, j).expect("general stack has both directions").matrix();
            let back = mn.cross(j, i).expect("general stack has both directions").matrix();
            let step = mn.layer(j).transition();
            for &u2 in fwd.col(u as usize).0 {
                for &v2 in step.col(u2 as usize).0 {
                    nbrs.extend_from_slice(back.col(v2 as usize).0);
                }
            }
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        out.push(nbrs);
    }
    out
}

/// Head of a walker vector kept by a truncated update.
#[derive(Debug, Clone)]
pub struct PartialSplit {
    /// The input vector restricted to the kept nodes; zero elsewhere.
    pub covered: Vec<f64>,
    /// Mass of `covered`.
    pub covered_mass: f64,
    /// Every node the scan pushed, in push order.
    pub visited: Vec<u32>,
}

/// Breadth-first truncation of `x`: starting from the restart support and
/// expanding over `nbrs` in ascending node order, nodes are kept until the
/// kept mass reaches `theta`. Nodes are marked at push; zero-mass pops still
/// count as kept entries.
pub fn partial_split(x: &[f64], restart: &[f64], nbrs: &[Vec<u32>], theta: f64) -> PartialSplit {
    let n = x.len();
    let mut covered = vec![0.0; n];
    let mut visited_mark = vec![false; n];
    let mut visited = Vec::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    for (u, &r) in restart.iter().enumerate() {
        if r > 0.0 {
            visited_mark[u] = true;
            visited.push(u as u32);
            queue.push_back(u as u32);
        }
    }
    let mut mass = 0.0;
    while mass < theta {
        let Some(u) = queue.pop_front() else { break };
        for &v in &nbrs[u as usize] {
            if !visited_mark[v as usize] {
                visited_mark[v as usize] = true;
                visited.push(v);
                queue.push_back(v);
            }
        }
        covered[u as usize] = x[u as usize];
        mass += x[u as usize];
    }
    PartialSplit { covered, covered_mass: mass, visited }
}

/// Truncated advance of walker `i`: the kept head moves through the blended
/// operator and the truncated tail re-enters as extra restart mass, so the
/// result sums to exactly one when the input does.
///
/// General mode rescales the propagated head to preserve its mass, matching
/// the unit normalization of the full step. A head that loses all its mass
/// hands it to the restart vector instead.
pub fn partial_step(
    i: usize,
    state: &WalkerState,
    mn: &MultiNetwork,
    cfg: &RwmConfig,
    nbrs: &[Vec<u32>],
) -> Vec<f64> {
    let split = partial_split(state.vector(i), state.restart_vector(i), nbrs, cfg.theta);
    let w_row = state.relevance_row_normalized(i);
    let mut z = propagate_layer(mn, i, &w_row, &split.covered);
    let raw_mass = l1_norm(&z);
    if raw_mass == 0.0 {
        z.copy_from_slice(state.restart_vector(i));
        for v in &mut z {
            *v *= split.covered_mass;
        }
    } else if mn.mode() == NetworkMode::General {
        let scale = split.covered_mass / raw_mass;
        for v in &mut z {
            *v *= scale;
        }
    }
    let restart_share = 1.0 - cfg.alpha * split.covered_mass;
    z.iter()
        .zip(state.restart_vector(i))
        .map(|(&p, &r)| cfg.alpha * p + restart_share * r)
        .collect()
}

/// One truncated iteration of every walker from a shared snapshot. With
/// `freeze` the relevance matrix stays fixed.
pub fn step_partial(
    state: &mut WalkerState,
    mn: &MultiNetwork,
    cfg: &RwmConfig,
    freeze: bool,
    reach: &ReachLists,
) {
    let k = state.layer_count();
    let mut next = Vec::with_capacity(k);
    for i in 0..k {
        next.push(partial_step(i, state, mn, cfg, reach.walker(i)));
    }
    state.vectors = next;
    state.t += 1;
    if !freeze {
        state.relevance = engine::update_relevance(state, mn, cfg);
    }
}

/// Outcome of a strategy run plus the locality counters benchmarks consume.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub state: WalkerState,
    pub plan: PhasePlan,
    pub strategy: UpdateStrategy,
    /// Whether the vector tolerance was met before the iteration cap.
    pub converged: bool,
    /// Nonzero entries per walker vector when the reinforcement phase ended.
    pub support_at_split: Vec<usize>,
    /// Nonzero entries per walker vector at the final iterate.
    pub support_final: Vec<usize>,
}

/// Runs to convergence under the chosen strategy.
///
/// The reinforcement phase always runs its planned length so the relevance
/// matrix absorbs the full increment schedule; only the second phase stops
/// on the vector tolerance.
pub fn run_with_strategy(
    mn: &MultiNetwork,
    query: &QuerySpec,
    cfg: &RwmConfig,
    strategy: UpdateStrategy,
) -> Result<RunResult> {
    let plan = plan(mn, cfg);
    let mut state = init_state(mn, query, cfg)?;
    let mut converged = false;
    let mut support_at_split: Option<Vec<usize>> = None;

    let partial = strategy == UpdateStrategy::Partial;
    let freezes = strategy != UpdateStrategy::Exact;
    let reach = if partial { Some(ReachLists::build(mn)) } else { None };

    while state.t < plan.reinforce {
        if let Some(reach) = &reach {
            step_partial(&mut state, mn, cfg, false, reach);
        } else {
            step(&mut state, mn, cfg);
        }
    }
    if state.t == plan.reinforce {
        support_at_split = Some(state.support_sizes());
    }
    while state.t < plan.cap {
        let prev = state.vectors.clone();
        match (&reach, freezes) {
            (Some(reach), _) => step_partial(&mut state, mn, cfg, true, reach),
            (None, true) => step_frozen(&mut state, mn, cfg),
            (None, false) => step(&mut state, mn, cfg),
        }
        let delta = (0..state.layer_count())
            .map(|i| l1_diff(&state.vectors[i], &prev[i]))
            .fold(0.0, f64::max);
        if delta < cfg.vector_tol {
            converged = true;
            break;
        }
    }
    let support_final = state.support_sizes();
    Ok(RunResult {
        plan,
        strategy,
        converged,
        support_at_split: support_at_split.unwrap_or_else(|| support_final.clone()),
        support_final,
        state,
    })
}

/// Two-phase run with full vector updates: relevance reinforcement for the
/// planned split, then frozen-relevance iteration to convergence.
pub fn run_two_phase(mn: &MultiNetwork, query: &QuerySpec, cfg: &RwmConfig) -> Result<RunResult> {
    run_with_strategy(mn, query, cfg, UpdateStrategy::EarlyStop)
}

/// Two-phase run with truncated vector updates in both phases.
pub fn run_partial(mn: &MultiNetwork, query: &QuerySpec, cfg: &RwmConfig) -> Result<RunResult> {
    run_with_strategy(mn, query, cfg, UpdateStrategy::Partial)
}

/// Convenience check used by tests and benches: per-step truncation error
/// of one walker against the exact step from the same state.
pub fn partial_step_error(
    i: usize,
    state: &WalkerState,
    mn: &MultiNetwork,
    cfg: &RwmConfig,
) -> f64 {
    let reach = ReachLists::build(mn);
    let approx = partial_step(i, state, mn, cfg, reach.walker(i));
    let exact = {
        let z = engine::apply_modified_transition(i, state, mn)
            .unwrap_or_else(|| state.restart_vector(i).to_vec());
        z.iter()
            .zip(state.restart_vector(i))
            .map(|(&p, &r)| cfg.alpha * p + (1.0 - cfg.alpha) * r)
            .collect::<Vec<f64>>()
    };
    l1_diff(&approx, &exact)
}

impl std::fmt::Display for UpdateStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated strategy list.
pub fn parse_strategies(s: &str) -> std::result::Result<Vec<UpdateStrategy>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<UpdateStrategy>())
        .collect()
}
