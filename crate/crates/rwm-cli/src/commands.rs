use std::fs;
use std::io::Write;

use serde::Serialize;

use rwm_core::accel::run_with_strategy;
use rwm_core::multinet::{load_manifest, save_manifest, write_edge_list, Manifest};
use rwm_core::synthbench::{
    derive_layers, generate_base, run_benchmark, BenchInstance, LayerDerivation, PlantedPartition,
};
use rwm_core::tasks::{
    detect_local_communities, precision_at_k, predict_links, probe_split, sample_contexts,
    SamplerParams, ScoredPair,
};
use rwm_core::{Error, QuerySpec, Result};

use crate::cli::{BenchArgs, Format, GenArgs, LinkpredArgs, QueryArgs, RankArgs, SampleArgs};
use crate::render::sink;

pub fn query(args: QueryArgs) -> Result<()> {
    let mn = load_manifest(&args.manifest)?;
    let q = QuerySpec::multi(args.layer, args.node.clone());
    let communities = detect_local_communities(&mn, &q, &args.walk.config(), args.walk.mode)?;
    let mut out = sink(args.output.as_deref())?;
    match args.format {
        Format::Json => {
            for c in &communities {
                writeln!(out, "{}", serde_json::to_string(c)?)?;
            }
        }
        Format::Tsv => {
            writeln!(out, "layer\tconductance\tsize\tmembers")?;
            for c in &communities {
                let members: Vec<String> = c.members.iter().map(|m| m.to_string()).collect();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    c.layer,
                    c.conductance,
                    c.members.len(),
                    members.join(",")
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RankRow {
    layer: usize,
    node: u32,
    score: f64,
}

pub fn rank(args: RankArgs) -> Result<()> {
    let mn = load_manifest(&args.manifest)?;
    let q = QuerySpec::multi(args.layer, args.node.clone());
    let result = run_with_strategy(&mn, &q, &args.walk.config(), args.walk.mode)?;
    let mut out = sink(args.output.as_deref())?;
    if args.format == Format::Tsv {
        writeln!(out, "layer\tnode\tscore")?;
    }
    for i in 0..mn.layer_count() {
        let scores = result.state.vector(i);
        let mut order: Vec<u32> = (0..scores.len() as u32).collect();
        order.sort_by(|&a, &b| {
            scores[b as usize].total_cmp(&scores[a as usize]).then(a.cmp(&b))
        });
        for u in order {
            let row = RankRow { layer: i, node: u, score: scores[u as usize] };
            match args.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&row)?)?,
                Format::Tsv => writeln!(out, "{}\t{}\t{}", row.layer, row.node, row.score)?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LinkpredReport {
    layer: usize,
    removed: usize,
    k: usize,
    precision_at_k: f64,
    pairs: Vec<ScoredPair>,
}

pub fn linkpred(args: LinkpredArgs) -> Result<()> {
    let mn = load_manifest(&args.manifest)?;
    if args.target >= mn.layer_count() {
        return Err(Error::Query(format!(
            "target layer {} out of range for {} layers",
            args.target,
            mn.layer_count()
        )));
    }
    let k = args.k as usize;
    let (reduced, probe) = probe_split(mn.layer(args.target), args.remove, args.walk.seed)?;
    let probed = mn.with_layer(args.target, reduced)?;
    let pairs = predict_links(&probed, args.target, &args.walk.config(), args.walk.mode, k)?;
    let precision = precision_at_k(&pairs, &probe, k);
    let report = LinkpredReport {
        layer: args.target,
        removed: probe.len(),
        k,
        precision_at_k: precision,
        pairs,
    };
    let mut out = sink(args.output.as_deref())?;
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report)?)?,
        Format::Tsv => {
            writeln!(
                out,
                "# layer {}, removed {} probe edges, precision@{} = {}",
                report.layer, report.removed, report.k, report.precision_at_k
            )?;
            writeln!(out, "u\tv\tscore")?;
            for p in &report.pairs {
                writeln!(out, "{}\t{}\t{}", p.u, p.v, p.score)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn sample(args: SampleArgs) -> Result<()> {
    let mn = load_manifest(&args.manifest)?;
    let params = SamplerParams {
        walks_per_node: args.walks_per_node,
        walk_length: args.walk_length,
        bias: args.p.zip(args.q),
        seed: args.walk.seed,
    };
    let corpus = sample_contexts(&mn, args.target, &args.walk.config(), &params)?;
    let mut out = sink(args.output.as_deref())?;
    corpus.write_text(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn gen(args: GenArgs) -> Result<()> {
    let spec = PlantedPartition {
        nodes: args.nodes,
        avg_degree: args.avg_degree,
        communities: args.communities,
        mixing: args.mixing,
        seed: args.seed,
    };
    let (base, blocks) = generate_base(&spec)?;
    let derivation = LayerDerivation {
        layers: args.layers,
        keep_ratio: args.keep_ratio,
        seed: args.seed,
    };
    let mn = derive_layers(&base, &derivation)?;

    fs::create_dir_all(&args.out)?;
    let mut layer_files = Vec::with_capacity(mn.layer_count());
    for i in 0..mn.layer_count() {
        let name = format!("layer_{i}.tsv");
        let f = fs::File::create(args.out.join(&name))?;
        write_edge_list(mn.layer(i), std::io::BufWriter::new(f))?;
        layer_files.push(name);
    }
    let mut bf = std::io::BufWriter::new(fs::File::create(args.out.join("blocks.tsv"))?);
    writeln!(bf, "node\tblock")?;
    for (u, b) in blocks.iter().enumerate() {
        writeln!(bf, "{u}\t{b}")?;
    }
    bf.flush()?;

    let manifest_path = args.out.join("manifest.json");
    save_manifest(&Manifest::multiplex(layer_files), &manifest_path)?;
    println!("{}", manifest_path.display());
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let cfg = args.walk.config();
    let mut instances = Vec::with_capacity(args.nodes.len());
    for (idx, &n) in args.nodes.iter().enumerate() {
        let spec = PlantedPartition {
            nodes: n,
            avg_degree: args.avg_degree,
            communities: args.communities,
            mixing: args.mixing,
            seed: args.walk.seed.wrapping_add(idx as u64),
        };
        let (base, blocks) = generate_base(&spec)?;
        let derivation = LayerDerivation {
            layers: args.layers,
            keep_ratio: args.keep_ratio,
            seed: args.walk.seed.wrapping_add(idx as u64),
        };
        let mn = derive_layers(&base, &derivation)?;
        instances.push(BenchInstance { label: format!("n{n}"), mn, blocks: Some(blocks) });
    }
    let report = run_benchmark(
        &instances,
        &args.strategies,
        &cfg,
        args.trials as usize,
        args.reps as usize,
    )?;
    let mut out = sink(args.output.as_deref())?;
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Tsv => write!(out, "{}", report.to_tsv())?,
    }
    out.flush()?;
    Ok(())
}
