use std::collections::{BTreeMap, BTreeSet};

use crate::model::{ConceptId, HierarchyEdge};

/// Checks that `edges` (child → parent) form a DAG. On failure returns one
/// concrete cycle, closed by repeating its first concept, e.g. `[a, b, a]`.
///
/// Traversal visits concepts and their parents in id order, so the witness
/// is deterministic.
pub fn verify_dag(edges: &[HierarchyEdge]) -> Result<(), Vec<ConceptId>> {
    let mut ids: BTreeSet<&ConceptId> = BTreeSet::new();
    for e in edges {
        ids.insert(&e.child);
        ids.insert(&e.parent);
    }
    let ids: Vec<&ConceptId> = ids.into_iter().collect();
    let index: BTreeMap<&ConceptId, usize> = ids.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for e in edges {
        parents[index[&e.child]].push(index[&e.parent]);
    }
    for p in &mut parents {
        p.sort_unstable();
        p.dedup();
    }

    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let mut colour = vec![WHITE; ids.len()];
    // (node, next parent slot)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for start in 0..ids.len() {
        if colour[start] != WHITE {
            continue;
        }
        colour[start] = GREY;
        stack.push((start, 0));
        while let Some(&mut (v, ref mut slot)) = stack.last_mut() {
            if let Some(&p) = parents[v].get(*slot) {
                *slot += 1;
                match colour[p] {
                    WHITE => {
                        colour[p] = GREY;
                        stack.push((p, 0));
                    }
                    GREY => {
                        let from = stack.iter().position(|&(n, _)| n == p).unwrap();
                        let mut cycle: Vec<ConceptId> =
                            stack[from..].iter().map(|&(n, _)| ids[n].clone()).collect();
                        cycle.push(ids[p].clone());
                        return Err(cycle);
                    }
                    _ => {}
                }
            } else {
                colour[v] = BLACK;
                stack.pop();
            }
        }
    }
    Ok(())
}

/// Strongly connected component label per node of a graph given as
/// adjacency lists over `0..adj.len()`. Iterative Tarjan.
fn scc_labels<I>(adj: &[I]) -> Vec<usize>
where
    I: AsRef<[usize]>,
{
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut label = vec![UNSEEN; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_order = 0;
    let mut labels = 0;
    for start in 0..n {
        if order[start] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        order[start] = next_order;
        low[start] = next_order;
        next_order += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut slot)) = call.last_mut() {
            if let Some(&p) = adj[v].as_ref().get(*slot) {
                *slot += 1;
                if order[p] == UNSEEN {
                    order[p] = next_order;
                    low[p] = next_order;
                    next_order += 1;
                    stack.push(p);
                    on_stack[p] = true;
                    call.push((p, 0));
                } else if on_stack[p] {
                    low[v] = low[v].min(order[p]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == order[v] {
                    loop {
                        let w = stack.pop().expect("v is on the stack");
                        on_stack[w] = false;
                        label[w] = labels;
                        if w == v {
                            break;
                        }
                    }
                    labels += 1;
                }
            }
        }
    }
    label
}

/// Groups the edges lying on at least one cycle by strongly connected
/// component. An edge is on a cycle exactly when both ends share a
/// component. Components come out in order of their smallest edge.
pub fn cyclic_components(edges: &[HierarchyEdge]) -> Vec<Vec<HierarchyEdge>> {
    let mut ids: BTreeSet<&ConceptId> = BTreeSet::new();
    for e in edges {
        ids.insert(&e.child);
        ids.insert(&e.parent);
    }
    let index: BTreeMap<&ConceptId, usize> = ids.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); index.len()];
    for e in edges {
        parents[index[&e.child]].push(index[&e.parent]);
    }
    let component = scc_labels(&parents);

    let mut grouped: BTreeMap<usize, Vec<HierarchyEdge>> = BTreeMap::new();
    for e in edges {
        let (c, p) = (component[index[&e.child]], component[index[&e.parent]]);
        if c == p && e.child != e.parent {
            grouped.entry(c).or_default().push(e.clone());
        }
    }
    let mut out: Vec<Vec<HierarchyEdge>> = grouped
        .into_values()
        .map(|mut g| {
            g.sort();
            g.dedup();
            g
        })
        .collect();
    out.sort();
    out
}
