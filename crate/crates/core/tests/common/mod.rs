#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ontoweave::ingest::{InputBundle, HIERARCHY_FILE, MAPPINGS_FILE, NODES_FILE};
use ontoweave::model::{HierarchyEdge, MergeSet, NodeTable};
use ontoweave::pipeline::{
    integrate, Integration, DOMAIN_HIERARCHY_FILE, DOMAIN_MAPPINGS_FILE, DOMAIN_NODES_FILE,
};
use ontoweave::synth::{generate, SynthParams, CONFIG_FILE};

pub const CORPUS_SIZE: usize = 60;

/// The synthetic fixture corpus: bundles of 3 to 6 sources and 50 to 500
/// concepts with multi-target noise and obsolete chains.
pub fn corpus() -> Vec<InputBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..CORPUS_SIZE as u64)
        .map(|i| generate(&SynthParams::corpus(&mut rng), 1000 + i))
        .collect()
}

/// Bundles of at most 30 concepts.
pub fn tiny_corpus(n: usize) -> Vec<InputBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x71a1);
    (0..n as u64)
        .map(|i| generate(&SynthParams::tiny(&mut rng), 5000 + i))
        .collect()
}

pub fn run(bundle: &InputBundle) -> Integration {
    integrate(bundle.clone(), Vec::new()).expect("fixture validates")
}

pub fn merge_pairs(merges: &MergeSet) -> BTreeSet<(String, String)> {
    merges
        .iter()
        .map(|m| (m.source.to_string(), m.target.to_string()))
        .collect()
}

pub fn edge_pairs(edges: &[HierarchyEdge]) -> BTreeSet<(String, String)> {
    edges
        .iter()
        .map(|e| (e.child.to_string(), e.parent.to_string()))
        .collect()
}

/// Same content, different row order.
pub fn shuffled(bundle: &InputBundle, seed: u64) -> InputBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = bundle.nodes.records().to_vec();
    records.shuffle(&mut rng);
    let mut mappings = bundle.mappings.clone();
    mappings.shuffle(&mut rng);
    let mut hierarchy = bundle.hierarchy.clone();
    hierarchy.shuffle(&mut rng);
    InputBundle {
        nodes: NodeTable::new(records).unwrap(),
        mappings,
        hierarchy,
        config: bundle.config.clone(),
    }
}

/// Turns a run's output directory into an input directory for a rerun.
pub fn outputs_as_inputs(output: &Path, input: &Path, config: &Path) {
    fs::create_dir_all(input).unwrap();
    fs::copy(output.join(DOMAIN_NODES_FILE), input.join(NODES_FILE)).unwrap();
    fs::copy(output.join(DOMAIN_MAPPINGS_FILE), input.join(MAPPINGS_FILE)).unwrap();
    fs::copy(
        output.join(DOMAIN_HIERARCHY_FILE),
        input.join(HIERARCHY_FILE),
    )
    .unwrap();
    fs::copy(config, input.join(CONFIG_FILE)).unwrap();
}
