//! Seeded synthetic bundles for tests and benchmarks.
//!
//! Concepts are drawn per source and tied to latent entities; sources that
//! share an entity get equivalence mappings between their members. Noise
//! covers multi-target mappings, obsolete renaming chains, ungrouped
//! relations, within-source equivalences and cross-source hierarchy edges.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{render_config, InputBundle, HIERARCHY_FILE, MAPPINGS_FILE, NODES_FILE};
use crate::model::{
    AlignmentConfig, ConceptId, HierarchyEdge, Mapping, MappingTypeGroup, NodeRecord, NodeTable,
    RelationTag, SourceId,
};
use crate::pipeline::{edges_table, mappings_table, nodes_table};

pub const EQUIVALENT: &str = "equivalent_to";
pub const XREF: &str = "database_cross_reference";
pub const UNGROUPED: &str = "related_to";
pub const CONFIG_FILE: &str = "config.toml";

const NAMES: [&str; 6] = ["MONDO", "DOID", "ORPHANET", "NCIT", "MESH", "OMIM"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Number of sources, seed included.
    pub sources: usize,
    /// Current concepts across all sources.
    pub concepts: usize,
    /// Target number of mapping rows.
    pub mappings: usize,
    /// Target number of hierarchy rows.
    pub edges: usize,
    /// Share of non-seed concepts that duplicate an entity already present
    /// in another source.
    pub overlap: f64,
    /// Share of filler mappings pointing at an unrelated concept.
    pub multi_target: f64,
    /// Share of current concepts with an obsolete predecessor.
    pub obsolete: f64,
    /// Share of extra hierarchy edges whose parent is in another source.
    pub cross_edges: f64,
    /// Share of filler mappings with a relation outside every group.
    pub ungrouped: f64,
    /// Adds shortcut edges onto mapped concepts, edges touching obsolete
    /// concepts and dangling rows.
    pub adversarial: bool,
}

impl SynthParams {
    /// Random parameters for the small-fixture corpus: 3 to 6 sources, 50 to
    /// 500 concepts, overlap 0.1 to 0.6.
    pub fn corpus(rng: &mut impl Rng) -> Self {
        let concepts = rng.gen_range(50..=500);
        Self {
            sources: rng.gen_range(3..=6),
            concepts,
            mappings: concepts * rng.gen_range(10..=25) / 10,
            edges: concepts * rng.gen_range(10..=14) / 10,
            overlap: rng.gen_range(0.1..=0.6),
            multi_target: rng.gen_range(0.05..=0.3),
            obsolete: rng.gen_range(0.0..=0.1),
            cross_edges: rng.gen_range(0.0..=0.5),
            ungrouped: rng.gen_range(0.0..=0.1),
            adversarial: rng.gen_bool(0.5),
        }
    }

    /// Bundles small enough for exhaustive checking (at most 30 concepts
    /// including obsolete ones).
    pub fn tiny(rng: &mut impl Rng) -> Self {
        let concepts = rng.gen_range(6..=20);
        Self {
            sources: rng.gen_range(2..=4),
            concepts,
            mappings: concepts * rng.gen_range(8..=20) / 10,
            edges: concepts * rng.gen_range(8..=14) / 10,
            overlap: rng.gen_range(0.2..=0.7),
            multi_target: rng.gen_range(0.0..=0.4),
            obsolete: rng.gen_range(0.0..=0.1),
            cross_edges: rng.gen_range(0.0..=0.5),
            ungrouped: 0.05,
            adversarial: rng.gen_bool(0.5),
        }
    }

    /// The size of a large production run: 200k concepts, 450k mappings,
    /// 270k hierarchy edges over six sources.
    pub fn large() -> Self {
        Self {
            sources: 6,
            concepts: 200_000,
            mappings: 450_000,
            edges: 270_000,
            overlap: 0.8,
            multi_target: 0.1,
            obsolete: 0.03,
            cross_edges: 0.2,
            ungrouped: 0.02,
            adversarial: false,
        }
    }
}

pub fn source_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match NAMES.get(i) {
            Some(name) => name.to_string(),
            None => format!("SRC{i}"),
        })
        .collect()
}

pub fn synth_config(sources: &[String]) -> AlignmentConfig {
    let group = |name: &str, rel: &str| MappingTypeGroup {
        name: name.to_owned(),
        relations: [RelationTag::new(rel)].into_iter().collect(),
    };
    AlignmentConfig::new(
        SourceId::new(sources[0].clone()),
        sources.iter().cloned().map(SourceId::new).collect(),
        vec![group("eqv", EQUIVALENT), group("xref", XREF)],
    )
    .expect("synthetic config is valid")
}

struct Builder {
    rng: ChaCha8Rng,
    /// Current concepts per source, in creation order.
    by_source: Vec<Vec<ConceptId>>,
    obsolete: Vec<ConceptId>,
    mappings: Vec<Mapping>,
    seen: HashSet<(ConceptId, ConceptId, &'static str)>,
    edges: Vec<HierarchyEdge>,
    edge_seen: HashSet<(ConceptId, ConceptId)>,
}

impl Builder {
    fn map(&mut self, a: &ConceptId, b: &ConceptId, relation: &'static str) -> bool {
        if a == b {
            return false;
        }
        let key = if a < b {
            (a.clone(), b.clone(), relation)
        } else {
            (b.clone(), a.clone(), relation)
        };
        if !self.seen.insert(key) {
            return false;
        }
        let (s, t) = if self.rng.gen_bool(0.5) {
            (a, b)
        } else {
            (b, a)
        };
        self.mappings
            .push(Mapping::new(s.clone(), t.clone(), relation, "synthetic"));
        true
    }

    fn edge(&mut self, child: &ConceptId, parent: &ConceptId) -> bool {
        if child == parent || !self.edge_seen.insert((child.clone(), parent.clone())) {
            return false;
        }
        self.edges
            .push(HierarchyEdge::new(child.clone(), parent.clone()));
        true
    }

    fn random_concept(&mut self) -> ConceptId {
        loop {
            let s = self.rng.gen_range(0..self.by_source.len());
            if let Some(c) = self.by_source[s].choose(&mut self.rng) {
                return c.clone();
            }
        }
    }

    fn random_in_other_source(&mut self, not: &str) -> Option<ConceptId> {
        let options: Vec<usize> = (0..self.by_source.len())
            .filter(|&s| !self.by_source[s].is_empty() && self.by_source[s][0].source() != not)
            .collect();
        let s = *options.choose(&mut self.rng)?;
        self.by_source[s].choose(&mut self.rng).cloned()
    }
}

fn id(source: &str, n: usize) -> ConceptId {
    ConceptId::parse(&format!("{source}:{n:07}")).expect("generated ids are well formed")
}

/// Generates a bundle. The same parameters and seed always give the same
/// bundle.
pub fn generate(params: &SynthParams, seed: u64) -> InputBundle {
    let names = source_names(params.sources.max(1));
    let config = synth_config(&names);
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        by_source: vec![Vec::new(); names.len()],
        obsolete: Vec::new(),
        mappings: Vec::new(),
        seen: HashSet::new(),
        edges: Vec::new(),
        edge_seen: HashSet::new(),
    };

    // Concepts and their entities.
    let mut counts = vec![params.concepts / names.len(); names.len()];
    for _ in 0..params.concepts % names.len() {
        let s = b.rng.gen_range(0..names.len());
        counts[s] += 1;
    }
    let mut entities: Vec<Vec<ConceptId>> = Vec::new();
    let mut entity_of: HashMap<ConceptId, usize> = HashMap::new();
    for (s, name) in names.iter().enumerate() {
        for n in 0..counts[s] {
            let c = id(name, n + 1);
            let mut joined = false;
            if s > 0 && !entities.is_empty() && b.rng.gen_bool(params.overlap) {
                for _ in 0..4 {
                    let e = b.rng.gen_range(0..entities.len());
                    if entities[e].iter().all(|m| m.source() != name.as_str()) {
                        entities[e].push(c.clone());
                        entity_of.insert(c.clone(), e);
                        joined = true;
                        break;
                    }
                }
            }
            if !joined {
                entity_of.insert(c.clone(), entities.len());
                entities.push(vec![c.clone()]);
            }
            b.by_source[s].push(c);
        }
    }

    // Entity links.
    let linked: Vec<Vec<ConceptId>> = entities.iter().filter(|e| e.len() > 1).cloned().collect();
    for e in &linked {
        for i in 1..e.len() {
            let j = b.rng.gen_range(0..i);
            let rel = if b.rng.gen_bool(0.7) {
                EQUIVALENT
            } else {
                XREF
            };
            b.map(&e[i], &e[j], rel);
        }
    }
    let links = b.mappings.len();

    // Obsolete predecessors, sometimes chained, ambiguous or referenced
    // from other sources.
    let mut next_local = counts.clone();
    for s in 0..names.len() {
        for i in 0..counts[s] {
            if !b.rng.gen_bool(params.obsolete) {
                continue;
            }
            let current = b.by_source[s][i].clone();
            next_local[s] += 1;
            let old = id(&names[s], next_local[s]);
            b.obsolete.push(old.clone());
            b.map(&old, &current, EQUIVALENT);
            if b.rng.gen_bool(0.3) {
                next_local[s] += 1;
                let older = id(&names[s], next_local[s]);
                b.obsolete.push(older.clone());
                b.map(&older, &old, EQUIVALENT);
            }
            if b.rng.gen_bool(0.1) && counts[s] > 1 {
                let other = b.by_source[s][b.rng.gen_range(0..counts[s])].clone();
                b.map(&old, &other, EQUIVALENT);
            }
            if b.rng.gen_bool(0.5) {
                if let Some(x) = b.random_in_other_source(&names[s]) {
                    b.map(&x, &old, EQUIVALENT);
                }
            }
        }
    }

    // Filler mappings. Each kind has its own quota so that exhausting the
    // correct pairs does not turn the remainder into noise.
    let remaining = params.mappings.saturating_sub(b.mappings.len()) as f64;
    let quotas = [
        (remaining * params.ungrouped) as usize,
        (remaining * params.multi_target) as usize,
        (remaining * 0.02) as usize,
    ];
    for (kind, quota) in quotas.into_iter().enumerate() {
        let (mut added, mut attempts) = (0, 0);
        while added < quota && attempts < quota * 20 {
            attempts += 1;
            let done = match kind {
                0 => {
                    let (x, y) = (b.random_concept(), b.random_concept());
                    b.map(&x, &y, UNGROUPED)
                }
                1 => {
                    // Mostly a second, wrong target next to a correct one.
                    let rel = if b.rng.gen_bool(0.5) {
                        EQUIVALENT
                    } else {
                        XREF
                    };
                    let correct = b.mappings[..links]
                        .choose(&mut b.rng)
                        .filter(|_| b.rng.gen_bool(0.8))
                        .cloned();
                    let target = match correct {
                        Some(m) => {
                            let s = names
                                .iter()
                                .position(|n| n == m.target.source())
                                .expect("known source");
                            let rel = if m.relation.as_str() == EQUIVALENT {
                                EQUIVALENT
                            } else {
                                XREF
                            };
                            b.by_source[s]
                                .choose(&mut b.rng)
                                .cloned()
                                .map(|y| (m.source, y, rel))
                        }
                        None => {
                            let x = b.random_concept();
                            b.random_in_other_source(x.source()).map(|y| (x, y, rel))
                        }
                    };
                    target.is_some_and(|(x, y, rel)| b.map(&x, &y, rel))
                }
                _ => {
                    let s = b.rng.gen_range(0..names.len());
                    match (
                        b.by_source[s].choose(&mut b.rng).cloned(),
                        b.by_source[s].choose(&mut b.rng).cloned(),
                    ) {
                        (Some(x), Some(y)) => b.map(&x, &y, EQUIVALENT),
                        _ => false,
                    }
                }
            };
            if done {
                added += 1;
            }
        }
    }
    // Correct pairs fill the rest while any are left.
    let mut attempts = 0;
    while b.mappings.len() < params.mappings && attempts < params.mappings * 4 && !linked.is_empty()
    {
        attempts += 1;
        let e = linked.choose(&mut b.rng).expect("non-empty");
        let pair: Vec<ConceptId> = e.choose_multiple(&mut b.rng, 2).cloned().collect();
        let rel = if b.rng.gen_bool(0.5) {
            EQUIVALENT
        } else {
            XREF
        };
        b.map(&pair[0], &pair[1], rel);
    }

    // Hierarchies follow one latent taxonomy: concepts are ordered by entity
    // and every parent belongs to an earlier entity, so merging along
    // correct links closes no cycle.
    let ordered: Vec<Vec<ConceptId>> = b
        .by_source
        .iter()
        .map(|list| {
            let mut list = list.clone();
            list.sort_by_key(|c| entity_of[c]);
            list
        })
        .collect();
    for list in &ordered {
        let roots = (list.len() / 40).max(1);
        for i in roots..list.len() {
            let p = b.rng.gen_range(0..i);
            b.edge(&list[i], &list[p]);
        }
    }
    let mapped: Vec<ConceptId> = linked.iter().flatten().cloned().collect();
    let mut attempts = 0;
    while b.edges.len() < params.edges && attempts < params.edges * 20 {
        attempts += 1;
        let s = b.rng.gen_range(0..names.len());
        let list = &ordered[s];
        if list.len() < 2 {
            continue;
        }
        let i = b.rng.gen_range(1..list.len());
        let child = list[i].clone();
        if b.rng.gen_bool(params.cross_edges) {
            // Adversarial parents ignore the taxonomy.
            let parent = if params.adversarial && !mapped.is_empty() && b.rng.gen_bool(0.5) {
                mapped.choose(&mut b.rng).cloned()
            } else {
                b.random_in_other_source(&names[s])
                    .filter(|p| entity_of[p] < entity_of[&child])
            };
            if let Some(p) = parent.filter(|p| p.source() != names[s].as_str()) {
                b.edge(&child, &p);
            }
        } else {
            let p = list[b.rng.gen_range(0..i)].clone();
            b.edge(&child, &p);
        }
    }
    if params.adversarial {
        if let Some(old) = b.obsolete.first().cloned() {
            let parent = b.random_concept();
            if parent.source() != old.source() {
                b.edge(&old, &parent);
            }
        }
        let ghost = id(&names[names.len() - 1], 9_999_999);
        let x = b.random_concept();
        b.map(&x, &ghost, EQUIVALENT);
    }

    let mut records: Vec<NodeRecord> = b
        .by_source
        .iter()
        .flatten()
        .map(|c| NodeRecord {
            id: c.clone(),
            obsolete: false,
        })
        .chain(b.obsolete.iter().map(|c| NodeRecord {
            id: c.clone(),
            obsolete: true,
        }))
        .collect();
    records.shuffle(&mut b.rng);
    let mut mappings = b.mappings;
    mappings.shuffle(&mut b.rng);
    let mut hierarchy = b.edges;
    hierarchy.shuffle(&mut b.rng);

    InputBundle {
        nodes: NodeTable::new(records).expect("generated ids are unique"),
        mappings,
        hierarchy,
        config,
    }
}

/// Writes the three input tables and `config.toml` into `dir`.
pub fn write_bundle(bundle: &InputBundle, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let tables = [
        nodes_table(NODES_FILE, &bundle.nodes),
        mappings_table(MAPPINGS_FILE, &bundle.mappings),
        edges_table(HIERARCHY_FILE, &bundle.hierarchy),
    ];
    for t in &tables {
        fs::write(dir.join(&t.name), t.to_csv().map_err(io::Error::other)?)?;
    }
    fs::write(dir.join(CONFIG_FILE), render_config(&bundle.config))
}
