//! Triple algebra shared by every stage: concept ids, mappings, hierarchy
//! edges, merges and the alignment configuration.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("concept id `{0}` has no `SOURCE:` namespace prefix")]
    MissingPrefix(String),
    #[error("concept id `{0}` has an empty local part")]
    EmptyLocal(String),
}

/// A namespaced concept name such as `MONDO:0004979`.
///
/// The source is everything before the first colon; the local part may
/// itself contain colons. Comparison and hashing are on the full text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(Arc<str>);

impl ConceptId {
    pub fn parse(text: &str) -> Result<Self, IdError> {
        let text = text.trim();
        match text.find(':') {
            None | Some(0) => Err(IdError::MissingPrefix(text.to_owned())),
            Some(i) if i + 1 == text.len() => Err(IdError::EmptyLocal(text.to_owned())),
            Some(_) => Ok(Self(Arc::from(text))),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn source(&self) -> &str {
        let colon = self.0.find(':').expect("validated at construction");
        &self.0[..colon]
    }

    pub fn local(&self) -> &str {
        let colon = self.0.find(':').expect("validated at construction");
        &self.0[colon + 1..]
    }

    pub fn belongs_to(&self, source: &SourceId) -> bool {
        self.source() == source.as_str()
    }
}

impl fmt::Debug for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for ConceptId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Ontology namespace, e.g. `MONDO`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceId(String);

impl SourceId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into().trim().to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Mapping relation label, ASCII-lowercased and trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RelationTag(String);

impl RelationTag {
    pub fn new(tag: &str) -> Self {
        Self(tag.trim().to_ascii_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl<'de> Deserialize<'de> for RelationTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Ok(Self::new(&raw))
    }
}

impl fmt::Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: ConceptId,
    pub obsolete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate concept id `{0}`")]
pub struct DuplicateId(pub ConceptId);

/// Ordered concept table. Ids are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeTable {
    records: Vec<NodeRecord>,
}

impl NodeTable {
    pub fn new(records: Vec<NodeRecord>) -> Result<Self, DuplicateId> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(&r.id) {
                return Err(DuplicateId(r.id.clone()));
            }
        }
        Ok(Self { records })
    }

    /// Builds a table of current (non-obsolete) concepts.
    pub fn from_current<I: IntoIterator<Item = ConceptId>>(ids: I) -> Result<Self, DuplicateId> {
        Self::new(
            ids.into_iter()
                .map(|id| NodeRecord {
                    id,
                    obsolete: false,
                })
                .collect(),
        )
    }

    pub fn records(&self) -> &[NodeRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &ConceptId> {
        self.records.iter().map(|r| &r.id)
    }

    pub fn current(&self) -> impl Iterator<Item = &ConceptId> {
        self.records.iter().filter(|r| !r.obsolete).map(|r| &r.id)
    }

    pub fn obsolete(&self) -> impl Iterator<Item = &ConceptId> {
        self.records.iter().filter(|r| r.obsolete).map(|r| &r.id)
    }

    pub fn id_set(&self) -> HashSet<&ConceptId> {
        self.ids().collect()
    }
}

/// `source --relation--> target`, with free-text provenance carried for reporting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mapping {
    pub source: ConceptId,
    pub target: ConceptId,
    pub relation: RelationTag,
    pub provenance: String,
}

impl Mapping {
    pub fn new(source: ConceptId, target: ConceptId, relation: &str, provenance: &str) -> Self {
        Self {
            source,
            target,
            relation: RelationTag::new(relation),
            provenance: provenance.to_owned(),
        }
    }

    pub fn is_within_source(&self) -> bool {
        self.source.source() == self.target.source()
    }
}

/// `child ⊑ parent`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HierarchyEdge {
    pub child: ConceptId,
    pub parent: ConceptId,
}

impl HierarchyEdge {
    pub fn new(child: ConceptId, parent: ConceptId) -> Self {
        Self { child, parent }
    }
}

/// `source ⇒ target`: `source` can be replaced by `target` everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Merge {
    pub source: ConceptId,
    pub target: ConceptId,
}

impl Merge {
    pub fn new(source: ConceptId, target: ConceptId) -> Self {
        Self { source, target }
    }
}

pub type MappingSet = Vec<Mapping>;
pub type HierarchyEdgeSet = Vec<HierarchyEdge>;

/// A collection of merges. Stability is computed on demand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeSet {
    merges: Vec<Merge>,
}

impl MergeSet {
    pub fn new(merges: Vec<Merge>) -> Self {
        Self { merges }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Merge> {
        self.merges.iter()
    }

    pub fn as_slice(&self) -> &[Merge] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    pub fn push(&mut self, merge: Merge) {
        self.merges.push(merge);
    }

    pub fn extend<I: IntoIterator<Item = Merge>>(&mut self, it: I) {
        self.merges.extend(it);
    }

    /// Sorted by (source, target) with exact duplicates removed.
    pub fn canonicalized(mut self) -> Self {
        self.merges.sort();
        self.merges.dedup();
        self
    }

    /// Lookup from merge source to merge target. On a stable set each
    /// source has exactly one target.
    pub fn substitution(&self) -> HashMap<&ConceptId, &ConceptId> {
        self.merges.iter().map(|m| (&m.source, &m.target)).collect()
    }

    pub fn is_stable(&self) -> bool {
        is_stable(self)
    }
}

impl<'a> IntoIterator for &'a MergeSet {
    type Item = &'a Merge;
    type IntoIter = std::slice::Iter<'a, Merge>;

    fn into_iter(self) -> Self::IntoIter {
        self.merges.iter()
    }
}

impl FromIterator<Merge> for MergeSet {
    fn from_iter<I: IntoIterator<Item = Merge>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Every concept occurs in at most one merge, and no merge target is also
/// a merge source. Several sources may share one target.
pub fn is_stable(merges: &MergeSet) -> bool {
    let mut sources: HashSet<&ConceptId> = HashSet::with_capacity(merges.len());
    let mut targets: HashSet<&ConceptId> = HashSet::new();
    for m in merges {
        if m.source == m.target || !sources.insert(&m.source) {
            return false;
        }
        targets.insert(&m.target);
    }
    sources.is_disjoint(&targets)
}

/// Ordered, child-to-root list of concepts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path(pub Vec<ConceptId>);

impl Path {
    pub fn concepts(&self) -> &[ConceptId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
    Both,
}

/// Anything exposing a source and a target concept.
pub trait Triple {
    fn source_concept(&self) -> &ConceptId;
    fn target_concept(&self) -> &ConceptId;
}

impl Triple for Mapping {
    fn source_concept(&self) -> &ConceptId {
        &self.source
    }
    fn target_concept(&self) -> &ConceptId {
        &self.target
    }
}

impl Triple for Merge {
    fn source_concept(&self) -> &ConceptId {
        &self.source
    }
    fn target_concept(&self) -> &ConceptId {
        &self.target
    }
}

impl Triple for HierarchyEdge {
    fn source_concept(&self) -> &ConceptId {
        &self.child
    }
    fn target_concept(&self) -> &ConceptId {
        &self.parent
    }
}

/// Concept names at the requested position(s) of every triple.
pub fn sig<'a, T, I>(items: I, side: Side) -> BTreeSet<ConceptId>
where
    T: Triple + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut out = BTreeSet::new();
    for t in items {
        if matches!(side, Side::Source | Side::Both) {
            out.insert(t.source_concept().clone());
        }
        if matches!(side, Side::Target | Side::Both) {
            out.insert(t.target_concept().clone());
        }
    }
    out
}

/// All members of a path; position is irrelevant for paths.
pub fn sig_path(path: &Path) -> BTreeSet<ConceptId> {
    path.0.iter().cloned().collect()
}

/// Concepts of `nodes` whose namespace is `source`.
pub fn get_concepts<'a, I>(nodes: I, source: &SourceId) -> BTreeSet<ConceptId>
where
    I: IntoIterator<Item = &'a ConceptId>,
{
    nodes
        .into_iter()
        .filter(|c| c.belongs_to(source))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTypeGroup {
    pub name: String,
    pub relations: BTreeSet<RelationTag>,
}

/// Seed source, source priority (seed first) and the ordered relation groups
/// driving the alignment loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignmentConfig {
    seed: SourceId,
    sources: Vec<SourceId>,
    groups: Vec<MappingTypeGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("seed `{0}` must be listed first in `sources`")]
    SeedNotFirst(SourceId),
    #[error("source `{0}` listed more than once")]
    DuplicateSource(SourceId),
    #[error("relation `{relation}` appears in both group `{first}` and group `{second}`")]
    OverlappingGroups {
        relation: RelationTag,
        first: String,
        second: String,
    },
    #[error("mapping-type group `{0}` lists no relations")]
    EmptyGroup(String),
    #[error("at least one mapping-type group is required")]
    NoGroups,
    #[error("config syntax: {0}")]
    Syntax(String),
}

impl AlignmentConfig {
    pub fn new(
        seed: SourceId,
        sources: Vec<SourceId>,
        groups: Vec<MappingTypeGroup>,
    ) -> Result<Self, ConfigError> {
        if sources.first() != Some(&seed) {
            return Err(ConfigError::SeedNotFirst(seed));
        }
        let mut seen = HashSet::new();
        for s in &sources {
            if !seen.insert(s) {
                return Err(ConfigError::DuplicateSource(s.clone()));
            }
        }
        if groups.is_empty() {
            return Err(ConfigError::NoGroups);
        }
        let mut owner: HashMap<&RelationTag, &str> = HashMap::new();
        for g in &groups {
            if g.relations.is_empty() {
                return Err(ConfigError::EmptyGroup(g.name.clone()));
            }
            for r in &g.relations {
                if let Some(first) = owner.insert(r, &g.name) {
                    return Err(ConfigError::OverlappingGroups {
                        relation: r.clone(),
                        first: first.to_owned(),
                        second: g.name.clone(),
                    });
                }
            }
        }
        Ok(Self {
            seed,
            sources,
            groups,
        })
    }

    pub fn seed(&self) -> &SourceId {
        &self.seed
    }

    /// Priority order, highest first; the seed is always first.
    pub fn sources(&self) -> &[SourceId] {
        &self.sources
    }

    pub fn groups(&self) -> &[MappingTypeGroup] {
        &self.groups
    }

    /// 0 is the highest priority (the seed). `None` for unknown sources.
    pub fn priority(&self, source: &str) -> Option<usize> {
        self.sources.iter().position(|s| s.as_str() == source)
    }

    pub fn group_of(&self, relation: &RelationTag) -> Option<usize> {
        self.groups
            .iter()
            .position(|g| g.relations.contains(relation))
    }

    pub fn is_seed(&self, c: &ConceptId) -> bool {
        c.belongs_to(&self.seed)
    }
}
