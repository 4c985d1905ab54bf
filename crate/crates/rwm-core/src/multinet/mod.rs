//! Layered network model: per-layer undirected graphs plus optional
//! cross-layer transition matrices connecting different node spaces.

mod load;
mod sparse;

pub use load::{
    load_cross_edges, load_edge_list, load_manifest, save_manifest, write_edge_list, CrossEntry,
    Manifest,
};
pub use sparse::CscMatrix;

use serde::Serialize;

use crate::error::{Error, Result};

/// One undirected, positively weighted graph layer.
///
/// The adjacency matrix is kept symmetric; the transition matrix is the
/// adjacency with every nonzero column scaled to sum to one. Columns of
/// isolated nodes stay identically zero, so a walk never gains mass there
/// on its own.
#[derive(Debug, Clone)]
pub struct Network {
    layer_id: usize,
    node_count: usize,
    edge_count: usize,
    adjacency: CscMatrix,
    transition: CscMatrix,
    weighted_degree: Vec<f64>,
}

impl Network {
    /// Builds a layer from undirected edges. Weights must be positive and
    /// finite; duplicate edges are merged by summing weights.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32, f64)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Graph("layer has no nodes".into()));
        }
        if node_count > u32::MAX as usize {
            return Err(Error::Graph("node count exceeds u32 range".into()));
        }
        let mut triplets = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(Error::Graph(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Graph(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            triplets.push((v, u, w));
            if u != v {
                triplets.push((u, v, w));
            }
        }
        let adjacency = CscMatrix::from_triplets(node_count, node_count, &triplets);
        let transition = adjacency.column_normalized();
        let weighted_degree = (0..node_count).map(|c| adjacency.col_sum(c)).collect();
        let mut loops = 0;
        for c in 0..node_count {
            if adjacency.get(c as u32, c) != 0.0 {
                loops += 1;
            }
        }
        let edge_count = (adjacency.nnz() + loops) / 2;
        Ok(Network { layer_id: 0, node_count, edge_count, adjacency, transition, weighted_degree })
    }

    pub fn layer_id(&self) -> usize {
        self.layer_id
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn adjacency(&self) -> &CscMatrix {
        self.adjacency_ref()
    }

    fn adjacency_ref(&self) -> &CscMatrix {
        &self.adjacency
    }

    pub fn transition(&self) -> &CscMatrix {
        &self.transition
    }

    /// Neighbor list of `u` with edge weights, ascending by node id.
    pub fn neighbors(&self, u: u32) -> (&[u32], &[f64]) {
        self.adjacency.col(u as usize)
    }

    pub fn weighted_degree(&self, u: u32) -> f64 {
        self.weighted_degree[u as usize]
    }

    pub fn total_volume(&self) -> f64 {
        self.weighted_degree.iter().sum()
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adjacency.col_nnz(u as usize)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency.get(v, u as usize) != 0.0
    }

    pub fn is_isolated(&self, u: u32) -> bool {
        self.degree(u) == 0
    }

    /// Undirected edge list with `u <= v`, ascending, one entry per edge.
    pub fn undirected_edges(&self) -> Vec<(u32, u32, f64)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.node_count {
            let (rows, vals) = self.adjacency.col(u);
            for (&v, &w) in rows.iter().zip(vals) {
                if v as usize >= u {
                    out.push((u as u32, v, w));
                }
            }
        }
        out
    }
}

/// Column-stochastic transition from layer `from` into layer `to`.
/// The matrix is `|V_to| x |V_from|`; columns of nodes without cross-edges
/// are zero. The two directions of a cross-edge file are independent
/// matrices and are not transposes of each other after normalization.
#[derive(Debug, Clone)]
pub struct CrossTransition {
    from: usize,
    to: usize,
    matrix: CscMatrix,
}

impl CrossTransition {
    /// Builds from cross-edges given as (source node in `from`, target node
    /// in `to`, weight), normalizing every column.
    pub fn from_edges(
        from: usize,
        to: usize,
        n_from: usize,
        n_to: usize,
        edges: &[(u32, u32, f64)],
    ) -> Result<Self> {
        let mut triplets = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u as usize >= n_from || v as usize >= n_to {
                return Err(Error::Graph(format!(
                    "cross-edge ({u}, {v}) out of range for {n_from} x {n_to} layer pair"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Graph(format!("cross-edge ({u}, {v}) has invalid weight {w}")));
            }
            triplets.push((v, u, w));
        }
        let matrix = CscMatrix::from_triplets(n_to, n_from, &triplets).column_normalized();
        Ok(CrossTransition { from, to, matrix })
    }

    pub fn from_layer(&self) -> usize {
        self.from
    }

    pub fn to_layer(&self) -> usize {
        self.to
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.matrix.rows()];
        self.matrix.apply(x, &mut out);
        out
    }
}

/// Whether all layers share one node set (implicit identity mapping) or
/// are linked by explicit cross-transition matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkMode {
    Multiplex,
    General,
}

/// A stack of layers plus the cross-layer transitions between them.
#[derive(Debug, Clone)]
pub struct MultiNetwork {
    mode: NetworkMode,
    layers: Vec<Network>,
    // flat K*K table, None on the diagonal and for absent pairs
    cross: Vec<Option<CrossTransition>>,
}

impl MultiNetwork {
    /// Layers over one shared node set; cross-transitions are implicit
    /// identities.
    pub fn multiplex(mut layers: Vec<Network>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Graph("at least one layer required".into()));
        }
        let n = layers[0].node_count;
        if layers.iter().any(|l| l.node_count != n) {
            return Err(Error::Graph("multiplex layers must share one node set".into()));
        }
        for (i, l) in layers.iter_mut().enumerate() {
            l.layer_id = i;
        }
        let k = layers.len();
        Ok(MultiNetwork { mode: NetworkMode::Multiplex, layers, cross: (0..k * k).map(|_| None).collect() })
    }

    /// Layers with their own node sets, linked by explicit cross-transitions.
    /// Every declared pair must come with both directions.
    pub fn general(mut layers: Vec<Network>, cross: Vec<CrossTransition>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Graph("at least one layer required".into()));
        }
        for (i, l) in layers.iter_mut().enumerate() {
            l.layer_id = i;
        }
        let k = layers.len();
        let mut table: Vec<Option<CrossTransition>> = (0..k * k).map(|_| None).collect();
        for ct in cross {
            let (i, j) = (ct.from, ct.to);
            if i >= k || j >= k || i == j {
                return Err(Error::Graph(format!("invalid cross pair ({i}, {j})")));
            }
            if ct.matrix.cols() != layers[i].node_count || ct.matrix.rows() != layers[j].node_count
            {
                return Err(Error::Graph(format!(
                    "cross ({i}, {j}) shaped {}x{}, layers have {} and {} nodes",
                    ct.matrix.rows(),
                    ct.matrix.cols(),
                    layers[i].node_count,
                    layers[j].node_count
                )));
            }
            if table[i * k + j].is_some() {
                return Err(Error::Graph(format!("duplicate cross pair ({i}, {j})")));
            }
            table[i * k + j] = Some(ct);
        }
        for i in 0..k {
            for j in 0..k {
                if i != j && table[i * k + j].is_some() != table[j * k + i].is_some() {
                    return Err(Error::Graph(format!(
                        "cross pair ({i}, {j}) declared in one direction only"
                    )));
                }
            }
        }
        Ok(MultiNetwork { mode: NetworkMode::General, layers, cross: table })
    }

    /// Replaces layer `i` with a same-sized network, keeping the mode and
    /// all cross-transitions. Used to re-run walks on a probed-out layer.
    pub fn with_layer(&self, i: usize, mut layer: Network) -> Result<MultiNetwork> {
        if i >= self.layers.len() {
            return Err(Error::Graph(format!("layer {i} out of range")));
        }
        if layer.node_count != self.layers[i].node_count {
            return Err(Error::Graph(format!(
                "replacement for layer {i} has {} nodes, expected {}",
                layer.node_count, self.layers[i].node_count
            )));
        }
        layer.layer_id = i;
        let mut out = self.clone();
        out.layers[i] = layer;
        Ok(out)
    }

    pub fn mode(&self) -> NetworkMode {
        self.mode
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, i: usize) -> &Network {
        &self.layers[i]
    }

    pub fn layers(&self) -> &[Network] {
        &self.layers
    }

    /// Cross-transition from layer `from` into `to`; None in multiplex mode
    /// (identity) and for undeclared pairs.
    pub fn cross(&self, from: usize, to: usize) -> Option<&CrossTransition> {
        self.cross[from * self.layers.len() + to].as_ref()
    }

    /// Maps a vector in layer `from`'s node space into layer `to`'s space.
    /// Multiplex mode copies; an undeclared general pair yields zeros.
    pub fn map_between(&self, from: usize, to: usize, x: &[f64]) -> Vec<f64> {
        if from == to || self.mode == NetworkMode::Multiplex {
            return x.to_vec();
        }
        match self.cross(from, to) {
            Some(ct) => ct.apply(x),
            None => vec![0.0; self.layers[to].node_count],
        }
    }

    /// Structural warnings: isolated nodes, cross columns with no edges, and
    /// layer pairs with no cross mass flow at all.
    pub fn validate(&self) -> ValidationReport {
        let k = self.layers.len();
        let mut report = ValidationReport::default();
        for (i, layer) in self.layers.iter().enumerate() {
            let nodes: Vec<u32> =
                (0..layer.node_count as u32).filter(|&u| layer.is_isolated(u)).collect();
            if !nodes.is_empty() {
                report.isolated_nodes.push(LayerIsolation { layer: i, nodes });
            }
        }
        if self.mode == NetworkMode::General {
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    match self.cross(i, j) {
                        Some(ct) => {
                            let empty: Vec<u32> = (0..ct.matrix.cols() as u32)
                                .filter(|&c| ct.matrix.col_nnz(c as usize) == 0)
                                .collect();
                            if !empty.is_empty() {
                                report.empty_cross_columns.push(CrossGap {
                                    from: i,
                                    to: j,
                                    nodes: empty,
                                });
                            }
                            if ct.matrix.nnz() == 0 {
                                report.unreachable_pairs.push((i, j));
                            }
                        }
                        None => report.unreachable_pairs.push((i, j)),
                    }
                }
            }
        }
        report
    }
}

/// Nodes of one layer that no edge touches.
#[derive(Debug, Clone, Serialize)]
pub struct LayerIsolation {
    pub layer: usize,
    pub nodes: Vec<u32>,
}

/// Nodes of layer `from` with no cross-edge into layer `to`.
#[derive(Debug, Clone, Serialize)]
pub struct CrossGap {
    pub from: usize,
    pub to: usize,
    pub nodes: Vec<u32>,
}

/// Non-fatal structural findings from [`MultiNetwork::validate`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub isolated_nodes: Vec<LayerIsolation>,
    pub empty_cross_columns: Vec<CrossGap>,
    pub unreachable_pairs: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.isolated_nodes.is_empty()
            && self.empty_cross_columns.is_empty()
            && self.unreachable_pairs.is_empty()
    }
}

/// Starting point of a run: one layer and one or more seed nodes on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuerySpec {
    pub layer: usize,
    pub nodes: Vec<u32>,
}

impl QuerySpec {
    pub fn single(layer: usize, node: u32) -> Self {
        QuerySpec { layer, nodes: vec![node] }
    }

    pub fn multi(layer: usize, mut nodes: Vec<u32>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        QuerySpec { layer, nodes }
    }
}
