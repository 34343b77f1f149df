use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::model::{ConceptId, HierarchyEdge, Path, SourceId};

use super::verify_dag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("hierarchy of source `{ontology}` is cyclic: {}", render(.cycle))]
pub struct CyclicSource {
    pub ontology: SourceId,
    pub cycle: Vec<ConceptId>,
}

fn render(cycle: &[ConceptId]) -> String {
    cycle
        .iter()
        .map(|c| c.as_str())
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Child → parents adjacency over one source's hierarchy edges (edges whose
/// child belongs to the source). Parents from other sources have no
/// outgoing edges here and are therefore roots.
#[derive(Debug, Clone)]
pub struct SourceHierarchyGraph {
    source: SourceId,
    edges: Vec<HierarchyEdge>,
    /// Sorted, so index order is id order.
    ids: Vec<ConceptId>,
    index: HashMap<ConceptId, usize>,
    /// Parent indices per node, ascending.
    parents: Vec<Vec<usize>>,
    /// Hops to the nearest root; `None` when only cycles are reachable.
    depth: Vec<Option<u32>>,
}

impl SourceHierarchyGraph {
    /// Builds the subgraph without checking for cycles.
    pub fn build(source: &SourceId, edges: &[HierarchyEdge]) -> Self {
        let edges: Vec<HierarchyEdge> = edges
            .iter()
            .filter(|e| e.child.belongs_to(source))
            .cloned()
            .collect();
        let mut ids: Vec<ConceptId> = edges
            .iter()
            .flat_map(|e| [e.child.clone(), e.parent.clone()])
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<ConceptId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let mut parents = vec![Vec::new(); ids.len()];
        let mut children = vec![Vec::new(); ids.len()];
        for e in &edges {
            let (c, p) = (index[&e.child], index[&e.parent]);
            parents[c].push(p);
            children[p].push(c);
        }
        for p in &mut parents {
            p.sort_unstable();
            p.dedup();
        }

        // Multi-source BFS from every root along reversed edges.
        let mut depth = vec![None; ids.len()];
        let mut queue = VecDeque::new();
        for (i, p) in parents.iter().enumerate() {
            if p.is_empty() {
                depth[i] = Some(0);
                queue.push_back(i);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = depth[v].unwrap() + 1;
            for &ch in &children[v] {
                if depth[ch].is_none() {
                    depth[ch] = Some(d);
                    queue.push_back(ch);
                }
            }
        }

        Self {
            source: source.clone(),
            edges,
            ids,
            index,
            parents,
            depth,
        }
    }

    pub fn source(&self) -> &SourceId {
        &self.source
    }

    pub fn edges(&self) -> &[HierarchyEdge] {
        &self.edges
    }

    pub fn contains(&self, c: &ConceptId) -> bool {
        self.index.contains_key(c)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = &ConceptId> {
        self.parents
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_empty())
            .map(|(i, _)| &self.ids[i])
    }

    pub fn parents_of(&self, c: &ConceptId) -> impl Iterator<Item = &ConceptId> {
        self.index
            .get(c)
            .into_iter()
            .flat_map(|&i| self.parents[i].iter().map(|&p| &self.ids[p]))
    }

    /// Minimum-hop child → parent path from `c` to any root. Among paths of
    /// equal length the lexicographically smallest id sequence wins. `None`
    /// if `c` is not in the graph or no root is reachable from it.
    pub fn shortest_path_to_root(&self, c: &ConceptId) -> Option<Path> {
        let mut v = *self.index.get(c)?;
        let mut d = self.depth[v]?;
        let mut path = Vec::with_capacity(d as usize + 1);
        path.push(self.ids[v].clone());
        while d > 0 {
            // Parents are in id order, so the first one on a shortest route
            // is the lexicographic choice.
            v = *self.parents[v]
                .iter()
                .find(|&&p| self.depth[p] == Some(d - 1))
                .expect("depth is consistent with parents");
            d -= 1;
            path.push(self.ids[v].clone());
        }
        Some(Path(path))
    }
}

/// Subgraph of `edges` whose child belongs to `source`.
pub fn get_hierarchy(
    source: &SourceId,
    edges: &[HierarchyEdge],
) -> Result<SourceHierarchyGraph, CyclicSource> {
    let graph = SourceHierarchyGraph::build(source, edges);
    verify_dag(graph.edges()).map_err(|cycle| CyclicSource {
        ontology: source.clone(),
        cycle,
    })?;
    Ok(graph)
}

pub fn shortest_path_to_root(c: &ConceptId, graph: &SourceHierarchyGraph) -> Option<Path> {
    graph.shortest_path_to_root(c)
}
