//! Brute-force reference for deduplication and hierarchy assembly.
//!
//! Works on plain strings and nested loops, sharing no code with the
//! library beyond the input types. Intended for bundles of a few dozen
//! concepts.

use std::collections::{BTreeMap, BTreeSet};

use ontoweave::ingest::InputBundle;

pub type Pair = (String, String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub merges: BTreeSet<Pair>,
    pub domain_concepts: BTreeSet<String>,
    pub unmerged: BTreeSet<String>,
    pub domain_hierarchy: BTreeSet<Pair>,
}

fn prefix(id: &str) -> &str {
    &id[..id.find(':').unwrap()]
}

struct Row {
    s: String,
    t: String,
    rel: String,
    prov: String,
}

pub fn run(bundle: &InputBundle) -> OracleOutcome {
    let cfg = &bundle.config;
    let sources: Vec<String> = cfg
        .sources()
        .iter()
        .map(|s| s.as_str().to_owned())
        .collect();
    let seed = sources[0].clone();
    let groups: Vec<BTreeSet<String>> = cfg
        .groups()
        .iter()
        .map(|g| g.relations.iter().map(|r| r.as_str().to_owned()).collect())
        .collect();
    let prio = |id: &str| sources.iter().position(|s| s == prefix(id)).unwrap();

    let obsolete: BTreeSet<String> = bundle.nodes.obsolete().map(|c| c.to_string()).collect();
    let current: BTreeSet<String> = bundle.nodes.current().map(|c| c.to_string()).collect();
    let rows: Vec<Row> = bundle
        .mappings
        .iter()
        .map(|m| Row {
            s: m.source.to_string(),
            t: m.target.to_string(),
            rel: m.relation.to_string(),
            prov: m.provenance.clone(),
        })
        .collect();

    // Obsolete renaming over within-source mappings of the first group.
    let is_internal = |r: &Row| prefix(&r.s) == prefix(&r.t) && groups[0].contains(&r.rel);
    let links: Vec<Pair> = rows
        .iter()
        .filter(|r| is_internal(r))
        .map(|r| (r.s.clone(), r.t.clone()))
        .collect();
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for o in &obsolete {
        // Component of `o` among obsolete concepts.
        let mut comp: BTreeSet<String> = BTreeSet::from([o.clone()]);
        loop {
            let before = comp.len();
            for (a, b) in &links {
                if obsolete.contains(a)
                    && obsolete.contains(b)
                    && (comp.contains(a) || comp.contains(b))
                {
                    comp.insert(a.clone());
                    comp.insert(b.clone());
                }
            }
            if comp.len() == before {
                break;
            }
        }
        let mut exits: BTreeSet<&String> = BTreeSet::new();
        for (a, b) in &links {
            if comp.contains(a) && current.contains(b) {
                exits.insert(b);
            }
            if comp.contains(b) && current.contains(a) {
                exits.insert(a);
            }
        }
        if exits.len() == 1 {
            rename.insert(o.clone(), (*exits.iter().next().unwrap()).clone());
        }
    }

    // Drop internal rows, rename, drop self rows and duplicates, then drop
    // rows still naming an obsolete concept.
    let sub = |x: &str, map: &BTreeMap<String, String>| {
        map.get(x).cloned().unwrap_or_else(|| x.to_owned())
    };
    let mut updated: Vec<Row> = Vec::new();
    for r in rows.iter().filter(|r| !is_internal(r)) {
        let (s, t) = (sub(&r.s, &rename), sub(&r.t, &rename));
        if s == t {
            continue;
        }
        if updated
            .iter()
            .any(|u| u.s == s && u.t == t && u.rel == r.rel && u.prov == r.prov)
        {
            continue;
        }
        updated.push(Row {
            s,
            t,
            rel: r.rel.clone(),
            prov: r.prov.clone(),
        });
    }
    updated.retain(|r| !obsolete.contains(&r.s) && !obsolete.contains(&r.t));

    // Alignment loop.
    let mut pool: BTreeSet<String> = current
        .iter()
        .filter(|c| prefix(c) != seed)
        .cloned()
        .collect();
    let mut merges: Vec<Pair> = rename.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
    for g in &groups {
        for s in &sources {
            let mut targets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
            for r in &updated {
                if !g.contains(&r.rel) || prefix(&r.s) == prefix(&r.t) {
                    continue;
                }
                let (other, target) = if prefix(&r.t) == s {
                    (&r.s, &r.t)
                } else if prefix(&r.s) == s {
                    (&r.t, &r.s)
                } else {
                    continue;
                };
                if pool.contains(other) {
                    targets
                        .entry(other.clone())
                        .or_default()
                        .insert(target.clone());
                }
            }
            for (other, ts) in targets {
                if ts.len() == 1 {
                    pool.remove(&other);
                    merges.push((other, ts.into_iter().next().unwrap()));
                }
            }
        }
    }

    // Aggregation by naive component merging.
    let mut clusters: Vec<BTreeSet<String>> = Vec::new();
    for (a, b) in &merges {
        let mut joined: BTreeSet<String> = BTreeSet::from([a.clone(), b.clone()]);
        let mut rest = Vec::new();
        for c in clusters {
            if c.contains(a) || c.contains(b) {
                joined.extend(c);
            } else {
                rest.push(c);
            }
        }
        rest.push(joined);
        clusters = rest;
    }
    let renamed: BTreeSet<&String> = merges
        .iter()
        .filter(|(a, b)| prefix(a) == prefix(b))
        .map(|(a, _)| a)
        .collect();
    let mut canonical_merges: BTreeSet<Pair> = BTreeSet::new();
    for c in &clusters {
        let seeds: Vec<&String> = c
            .iter()
            .filter(|x| prefix(x) == seed && !renamed.contains(x))
            .collect();
        if seeds.len() >= 2 {
            for x in c.iter().filter(|x| !seeds.contains(x)) {
                canonical_merges.insert((x.clone(), seeds[0].clone()));
            }
            continue;
        }
        let best = c
            .iter()
            .min_by_key(|x| (prio(x), renamed.contains(x), (*x).clone()))
            .unwrap();
        for x in c.iter().filter(|x| *x != best) {
            canonical_merges.insert((x.clone(), best.clone()));
        }
    }
    let canon: BTreeMap<String, String> = canonical_merges.iter().cloned().collect();

    let unmerged: BTreeSet<String> = current
        .iter()
        .filter(|c| !canon.contains_key(*c))
        .cloned()
        .collect();
    let mut domain_concepts = unmerged.clone();
    domain_concepts.extend(canon.values().cloned());

    // Hierarchy assembly.
    let mut rewritten: Vec<Pair> = Vec::new();
    for e in &bundle.hierarchy {
        let (c, p) = (
            sub(e.child.as_str(), &canon),
            sub(e.parent.as_str(), &canon),
        );
        if c != p && !rewritten.contains(&(c.clone(), p.clone())) {
            rewritten.push((c, p));
        }
    }
    let original: BTreeSet<Pair> = bundle
        .hierarchy
        .iter()
        .map(|e| (e.child.to_string(), e.parent.to_string()))
        .collect();
    let mut candidates: Vec<Pair> = rewritten
        .iter()
        .filter(|(c, _)| prefix(c) == seed)
        .cloned()
        .collect();
    candidates.sort_by_key(|e| (!original.contains(e), e.clone()));
    let mut seed_edges: BTreeSet<Pair> = BTreeSet::new();
    for (c, p) in candidates {
        if !reachable(&seed_edges, &p).contains(&c) {
            seed_edges.insert((c, p));
        }
    }
    let mut connected: BTreeSet<String> = seed_edges
        .iter()
        .flat_map(|(c, p)| [c.clone(), p.clone()])
        .collect();
    for (a, b) in &canonical_merges {
        if prefix(b) == seed {
            connected.insert(a.clone());
            connected.insert(b.clone());
        }
    }
    let mut domain = seed_edges.clone();
    for s in sources.iter().skip(1) {
        let sub_edges: Vec<&Pair> = rewritten.iter().filter(|(c, _)| prefix(c) == s).collect();
        let keep: BTreeSet<&String> = unmerged.iter().filter(|c| prefix(c) == s).collect();
        for c in &keep {
            if connected.contains(*c) {
                continue;
            }
            let Some(path) = best_path(&sub_edges, c) else {
                continue;
            };
            let Some(cut) = path
                .iter()
                .skip(1)
                .position(|x| connected.contains(x))
                .map(|i| i + 1)
            else {
                continue;
            };
            let mut pruned = vec![path[0].clone()];
            pruned.extend(path[1..cut].iter().filter(|x| keep.contains(x)).cloned());
            pruned.push(path[cut].clone());
            for w in pruned.windows(2) {
                domain.insert((w[0].clone(), w[1].clone()));
            }
            connected.extend(pruned);
        }
    }

    OracleOutcome {
        merges: canonical_merges,
        domain_concepts,
        unmerged,
        domain_hierarchy: domain,
    }
}

fn reachable(edges: &BTreeSet<Pair>, from: &str) -> BTreeSet<String> {
    let mut seen: BTreeSet<String> = BTreeSet::from([from.to_owned()]);
    loop {
        let before = seen.len();
        for (c, p) in edges {
            if seen.contains(c) {
                seen.insert(p.clone());
            }
        }
        if seen.len() == before {
            return seen;
        }
    }
}

/// Enumerates every simple path from `start` to a node without outgoing
/// edges and returns the shortest, lexicographically smallest one.
fn best_path(edges: &[&Pair], start: &str) -> Option<Vec<String>> {
    if !edges.iter().any(|(c, p)| c == start || p == start) {
        return None;
    }
    let mut found: Vec<Vec<String>> = Vec::new();
    let mut stack = vec![vec![start.to_owned()]];
    while let Some(path) = stack.pop() {
        let last = path.last().unwrap();
        let next: Vec<&String> = edges
            .iter()
            .filter(|(c, _)| c == last)
            .map(|(_, p)| p)
            .collect();
        if next.is_empty() {
            found.push(path);
            continue;
        }
        for p in next {
            if !path.contains(p) {
                let mut q = path.clone();
                q.push(p.clone());
                stack.push(q);
            }
        }
    }
    found
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
}
