//! Applications built on the walk engine: local community detection by
//! conductance sweep, link prediction from symmetrized visiting scores, and
//! walk-corpus sampling for embedding pipelines.

mod community;
mod linkpred;
mod sampling;

pub use community::{conductance, detect_local_communities, sweep_cut, Community};
pub use linkpred::{precision_at_k, predict_links, probe_split, ScoredPair};
pub use sampling::{sample_contexts, SamplerParams, WalkCorpus};
