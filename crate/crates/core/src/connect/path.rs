use thiserror::Error;

use crate::model::{ConceptId, HierarchyEdge, Path};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no anchor on path starting at `{0}`")]
pub struct NoAnchorOnPath(pub ConceptId);

/// Truncates `path` at its first anchor (inclusive) and drops interior
/// concepts that are not retained. The start concept and the terminal
/// anchor always survive.
pub fn prune_path<K, A>(path: &Path, keep: K, anchors: A) -> Result<Path, NoAnchorOnPath>
where
    K: Fn(&ConceptId) -> bool,
    A: Fn(&ConceptId) -> bool,
{
    let concepts = path.concepts();
    let start = concepts.first().expect("path is non-empty");
    let end = concepts
        .iter()
        .skip(1)
        .position(anchors)
        .map(|i| i + 1)
        .ok_or_else(|| NoAnchorOnPath(start.clone()))?;
    let mut out = Vec::with_capacity(end + 1);
    out.push(start.clone());
    out.extend(concepts[1..end].iter().filter(|c| keep(c)).cloned());
    out.push(concepts[end].clone());
    Ok(Path(out))
}

/// Consecutive pairs of a path as child ⊑ parent edges.
pub fn convert_to_edges(path: &Path) -> Vec<HierarchyEdge> {
    path.concepts()
        .windows(2)
        .map(|w| HierarchyEdge::new(w[0].clone(), w[1].clone()))
        .collect()
}
