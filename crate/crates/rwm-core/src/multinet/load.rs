//! Text formats: tab-separated edge lists and the JSON manifest tying a
//! layer stack together.
//!
//! Edge lines are `u<TAB>v<TAB>weight` with zero-based node ids. Blank lines
//! and lines starting with `#` are skipped. A layer file may open with a
//! `%nodes N` directive; otherwise the node count is the largest id plus one.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multinet::{CrossTransition, MultiNetwork, Network, NetworkMode};

fn split_fields(line: &str) -> Vec<&str> {
    line.split(['\t', ' ']).filter(|f| !f.is_empty()).collect()
}

fn parse_node(field: &str, line: usize) -> Result<u32> {
    field
        .parse::<u32>()
        .map_err(|_| Error::parse(line, format!("expected node id, got {field:?}")))
}

fn parse_weight(field: Option<&str>, line: usize) -> Result<f64> {
    match field {
        None => Ok(1.0),
        Some(f) => {
            let w = f
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("expected weight, got {f:?}")))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::parse(line, format!("weight must be positive, got {w}")));
            }
            Ok(w)
        }
    }
}

/// Reads one layer. An explicit `node_count` wins over the `%nodes`
/// directive; with neither, the count is inferred from the largest id.
pub fn load_edge_list<R: BufRead>(reader: R, node_count: Option<usize>) -> Result<Network> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    let mut max_id: Option<u32> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if let Some(rest) = body.strip_prefix('%') {
            let fields = split_fields(rest);
            match fields.as_slice() {
                ["nodes", n] => {
                    let n = n
                        .parse::<usize>()
                        .map_err(|_| Error::parse(lineno, format!("bad node count {n:?}")))?;
                    declared = Some(n);
                }
                _ => return Err(Error::parse(lineno, format!("unknown directive %{rest}"))),
            }
            continue;
        }
        let fields = split_fields(body);
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(lineno, format!("expected 2 or 3 fields, got {}", fields.len())));
        }
        let u = parse_node(fields[0], lineno)?;
        let v = parse_node(fields[1], lineno)?;
        let w = parse_weight(fields.get(2).copied(), lineno)?;
        if let Some(n) = node_count.or(declared) {
            if u as usize >= n || v as usize >= n {
                return Err(Error::parse(
                    lineno,
                    format!("node id {} out of range for {n} nodes", u.max(v)),
                ));
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let n = match node_count.or(declared) {
        Some(n) => n,
        None => match max_id {
            Some(m) => m as usize + 1,
            None => return Err(Error::Graph("empty edge list with no node count".into())),
        },
    };
    Network::from_edges(n, &edges)
}

/// Reads cross-edges `u<TAB>v<TAB>weight` with `u` in layer `from` and `v`
/// in layer `to`, returning both transition directions.
pub fn load_cross_edges<R: BufRead>(
    reader: R,
    from: usize,
    to: usize,
    n_from: usize,
    n_to: usize,
) -> Result<(CrossTransition, CrossTransition)> {
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields = split_fields(body);
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(lineno, format!("expected 2 or 3 fields, got {}", fields.len())));
        }
        let u = parse_node(fields[0], lineno)?;
        let v = parse_node(fields[1], lineno)?;
        let w = parse_weight(fields.get(2).copied(), lineno)?;
        if u as usize >= n_from {
            return Err(Error::parse(lineno, format!("node {u} out of range for {n_from} nodes")));
        }
        if v as usize >= n_to {
            return Err(Error::parse(lineno, format!("node {v} out of range for {n_to} nodes")));
        }
        edges.push((u, v, w));
    }
    let fwd = CrossTransition::from_edges(from, to, n_from, n_to, &edges)?;
    let rev: Vec<(u32, u32, f64)> = edges.iter().map(|&(u, v, w)| (v, u, w)).collect();
    let back = CrossTransition::from_edges(to, from, n_to, n_from, &rev)?;
    Ok((fwd, back))
}

/// Writes a layer as `%nodes N` plus one `u<TAB>v<TAB>w` line per undirected
/// edge with `u <= v`, ascending. Weights round-trip exactly.
pub fn write_edge_list<W: Write>(net: &Network, mut out: W) -> Result<()> {
    writeln!(out, "%nodes {}", net.node_count())?;
    for (u, v, w) in net.undirected_edges() {
        writeln!(out, "{u}\t{v}\t{w}")?;
    }
    Ok(())
}

/// Cross-edge file reference inside a manifest. `i` and `j` are layer
/// indices; the file holds edges from `i`-nodes to `j`-nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossEntry {
    pub i: usize,
    pub j: usize,
    pub path: String,
}

/// On-disk description of a multi-layer dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub mode: String,
    pub layers: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross: Vec<CrossEntry>,
}

impl Manifest {
    pub fn multiplex(layers: Vec<String>) -> Self {
        Manifest { mode: "multiplex".into(), layers, cross: Vec::new() }
    }

    pub fn general(layers: Vec<String>, cross: Vec<CrossEntry>) -> Self {
        Manifest { mode: "general".into(), layers, cross }
    }
}

pub fn save_manifest(manifest: &Manifest, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, manifest)?;
    writeln!(f)?;
    Ok(())
}

/// Loads a manifest and every file it references. Relative paths resolve
/// against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<MultiNetwork> {
    let file = File::open(path)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_reader(BufReader::new(file))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mode = match manifest.mode.as_str() {
        "multiplex" => NetworkMode::Multiplex,
        "general" => NetworkMode::General,
        other => return Err(Error::Manifest(format!("unknown mode {other:?}"))),
    };
    if manifest.layers.is_empty() {
        return Err(Error::Manifest("manifest lists no layers".into()));
    }
    if mode == NetworkMode::Multiplex && !manifest.cross.is_empty() {
        return Err(Error::Manifest("multiplex manifest must not list cross files".into()));
    }

    let resolve = |p: &str| -> PathBuf {
        let pb = PathBuf::from(p);
        if pb.is_absolute() {
            pb
        } else {
            base.join(pb)
        }
    };

    let mut layers = Vec::with_capacity(manifest.layers.len());
    for entry in &manifest.layers {
        let lp = resolve(entry);
        let f = File::open(&lp).map_err(|e| Error::Manifest(format!("{}: {e}", lp.display())))?;
        let net = load_edge_list(BufReader::new(f), None)
            .map_err(|e| Error::Manifest(format!("{}: {e}", lp.display())))?;
        layers.push(net);
    }
    if mode == NetworkMode::Multiplex {
        return MultiNetwork::multiplex(layers);
    }

    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut cross = Vec::with_capacity(manifest.cross.len() * 2);
    for entry in &manifest.cross {
        let (i, j) = (entry.i, entry.j);
        if i >= layers.len() || j >= layers.len() || i == j {
            return Err(Error::Manifest(format!("invalid cross pair ({i}, {j})")));
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(Error::Manifest(format!("duplicate cross pair ({i}, {j})")));
        }
        let cp = resolve(&entry.path);
        let f = File::open(&cp).map_err(|e| Error::Manifest(format!("{}: {e}", cp.display())))?;
        let (fwd, back) = load_cross_edges(
            BufReader::new(f),
            i,
            j,
            layers[i].node_count(),
            layers[j].node_count(),
        )
        .map_err(|e| match e {
            Error::Parse { line, message } => {
                Error::Manifest(format!("{} line {line}: {message}", cp.display()))
            }
            other => other,
        })?;
        cross.push(fwd);
        cross.push(back);
    }
    MultiNetwork::general(layers, cross)
}
