//! Hierarchy assembly: attaches unmerged concepts to the seed hierarchy
//! through pruned shortest paths.

mod dag;
mod graph;
mod path;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::dedup::apply_merges;
use crate::model::{
    AlignmentConfig, ConceptId, HierarchyEdge, HierarchyEdgeSet, MergeSet, SourceId,
};

pub use dag::{cyclic_components, verify_dag};
pub use graph::{get_hierarchy, shortest_path_to_root, CyclicSource, SourceHierarchyGraph};
pub use path::{convert_to_edges, prune_path, NoAnchorOnPath};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub concept: ConceptId,
    pub anchor: ConceptId,
    /// Edges on the shortest path to root before pruning.
    pub original_path_length: usize,
    /// Edges added to the domain hierarchy.
    pub pruned_path_length: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityResult {
    pub domain_hierarchy: HierarchyEdgeSet,
    pub connected: BTreeSet<ConceptId>,
    pub disconnected: BTreeSet<ConceptId>,
    pub attachments: Vec<Attachment>,
    /// Rewritten seed edges removed because merging closed a cycle.
    pub dropped_seed_edges: HierarchyEdgeSet,
    /// Non-seed sources whose rewritten hierarchy contains a cycle.
    pub cyclic_sources: Vec<CyclicSource>,
}

/// `true` if `to` is reachable from `from` along child → parent edges.
/// Incremental cycle detection over child → parent edges, keeping a
/// topological order in which every child precedes its parents
/// (Pearce and Kelly). Only the window between the endpoints of an edge
/// that contradicts the order is searched and reordered.
struct DynamicOrder {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    /// Position of each node in the order.
    rank: Vec<usize>,
    seen: Vec<bool>,
}

impl DynamicOrder {
    fn new(n: usize) -> Self {
        Self {
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            rank: (0..n).collect(),
            seen: vec![false; n],
        }
    }

    /// Adds `child -> parent` unless it would close a cycle. Returns whether
    /// the edge was added.
    fn insert(&mut self, child: usize, parent: usize) -> bool {
        if child == parent {
            return false;
        }
        let (lower, upper) = (self.rank[parent], self.rank[child]);
        if upper < lower {
            self.parents[child].push(parent);
            self.children[parent].push(child);
            return true;
        }
        let Some(ahead) = self.collect(parent, upper, true, Some(child)) else {
            return false;
        };
        let behind = self
            .collect(child, lower, false, None)
            .expect("no target to find");
        for &v in ahead.iter().chain(&behind) {
            self.seen[v] = false;
        }
        self.reorder(behind, ahead);
        self.parents[child].push(parent);
        self.children[parent].push(child);
        true
    }

    /// Nodes reachable from `start` within the rank window, following
    /// parents (`up`) or children. `None` if `target` is reached.
    fn collect(
        &mut self,
        start: usize,
        bound: usize,
        up: bool,
        target: Option<usize>,
    ) -> Option<Vec<usize>> {
        let mut found = vec![start];
        let mut stack = vec![start];
        self.seen[start] = true;
        while let Some(v) = stack.pop() {
            let next = if up {
                &self.parents[v]
            } else {
                &self.children[v]
            };
            for &w in next {
                if Some(w) == target {
                    for &f in &found {
                        self.seen[f] = false;
                    }
                    return None;
                }
                let inside = if up {
                    self.rank[w] < bound
                } else {
                    self.rank[w] > bound
                };
                if inside && !self.seen[w] {
                    self.seen[w] = true;
                    found.push(w);
                    stack.push(w);
                }
            }
        }
        Some(found)
    }

    /// Places `behind` (the child and its descendants) before `ahead` (the
    /// parent and its ancestors), reusing their current positions.
    fn reorder(&mut self, mut behind: Vec<usize>, mut ahead: Vec<usize>) {
        behind.sort_unstable_by_key(|&v| self.rank[v]);
        ahead.sort_unstable_by_key(|&v| self.rank[v]);
        let mut slots: Vec<usize> = behind.iter().chain(&ahead).map(|&v| self.rank[v]).collect();
        slots.sort_unstable();
        for (v, slot) in behind.into_iter().chain(ahead).zip(slots) {
            self.rank[v] = slot;
        }
    }
}

/// Seed edges after merge rewriting. Rewriting a cross-source parent onto a
/// seed concept can close a cycle, so edges are admitted one at a time,
/// original edges first and then rewritten ones, each group in ascending
/// order, and an edge that would close a cycle is dropped. The original
/// seed hierarchy is acyclic and therefore survives intact.
fn seed_hierarchy(
    seed: &SourceId,
    original: &[HierarchyEdge],
    rewritten: &[HierarchyEdge],
) -> (Vec<HierarchyEdge>, Vec<HierarchyEdge>) {
    let untouched: HashSet<&HierarchyEdge> = original.iter().collect();
    let mut edges: Vec<&HierarchyEdge> = rewritten
        .iter()
        .filter(|e| e.child.belongs_to(seed))
        .collect();
    edges.sort_by(|a, b| {
        untouched
            .contains(b)
            .cmp(&untouched.contains(a))
            .then_with(|| a.cmp(b))
    });
    edges.dedup();

    let mut index: HashMap<&ConceptId, usize> = HashMap::new();
    for e in &edges {
        for c in [&e.child, &e.parent] {
            let next = index.len();
            index.entry(c).or_insert(next);
        }
    }
    let mut order = DynamicOrder::new(index.len());
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for e in edges {
        if order.insert(index[&e.child], index[&e.parent]) {
            kept.push(e.clone());
        } else {
            dropped.push(e.clone());
        }
    }
    kept.sort();
    dropped.sort();
    (kept, dropped)
}

/// Builds the domain hierarchy.
///
/// The domain hierarchy starts as the seed hierarchy. Anchors are its
/// concepts plus both ends of every merge onto a seed concept. Sources are
/// then visited in priority order and, within a source, unmerged concepts
/// in id order. Each concept's shortest path to a root of its source's
/// merge-rewritten hierarchy is truncated at the first anchor, stripped of
/// interior concepts that are not unmerged concepts of that source, and
/// added as edges; its concepts become anchors for later ones.
pub fn connect_concepts(
    unmerged: &BTreeSet<ConceptId>,
    hierarchy: &[HierarchyEdge],
    canonical_merges: &MergeSet,
    config: &AlignmentConfig,
) -> ConnectivityResult {
    let seed = config.seed();
    let rewritten = apply_merges(&hierarchy.to_vec(), canonical_merges);

    let (seed_edges, dropped_seed_edges) = seed_hierarchy(seed, hierarchy, &rewritten);
    let mut connected: HashSet<ConceptId> = seed_edges
        .iter()
        .flat_map(|e| [e.child.clone(), e.parent.clone()])
        .collect();
    for m in canonical_merges
        .iter()
        .filter(|m| m.target.belongs_to(seed))
    {
        connected.insert(m.source.clone());
        connected.insert(m.target.clone());
    }
    let mut domain: BTreeSet<HierarchyEdge> = seed_edges.into_iter().collect();

    let mut by_source: BTreeMap<String, Vec<HierarchyEdge>> = BTreeMap::new();
    for e in rewritten {
        by_source
            .entry(e.child.source().to_owned())
            .or_default()
            .push(e);
    }

    let mut attachments = Vec::new();
    let mut cyclic_sources = Vec::new();
    for source in config.sources().iter().skip(1) {
        let edges = by_source.remove(source.as_str()).unwrap_or_default();
        let graph = match get_hierarchy(source, &edges) {
            Ok(g) => g,
            Err(err) => {
                cyclic_sources.push(err);
                SourceHierarchyGraph::build(source, &edges)
            }
        };
        let keep: BTreeSet<&ConceptId> = unmerged.iter().filter(|c| c.belongs_to(source)).collect();
        for &c in &keep {
            if connected.contains(c) {
                continue;
            }
            let Some(path) = graph.shortest_path_to_root(c) else {
                continue;
            };
            let Ok(pruned) = prune_path(&path, |x| keep.contains(x), |x| connected.contains(x))
            else {
                continue;
            };
            let added = convert_to_edges(&pruned);
            attachments.push(Attachment {
                concept: c.clone(),
                anchor: pruned
                    .concepts()
                    .last()
                    .expect("pruned path is non-empty")
                    .clone(),
                original_path_length: path.len() - 1,
                pruned_path_length: added.len(),
            });
            connected.extend(pruned.0);
            domain.extend(added);
        }
    }

    let connected: BTreeSet<ConceptId> = connected.into_iter().collect();
    let disconnected = unmerged.difference(&connected).cloned().collect();
    ConnectivityResult {
        domain_hierarchy: domain.into_iter().collect(),
        connected,
        disconnected,
        attachments,
        dropped_seed_edges,
        cyclic_sources,
    }
}
