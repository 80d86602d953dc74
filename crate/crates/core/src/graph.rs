//! Support-graph utilities shared by the real and tropical automata.

/// Strongly connected components of a directed graph on `0..n`, in
/// topological order: every edge goes from a component to itself or to a
/// component with a larger index.
pub fn strongly_connected_components(successors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = successors.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;

    // Iterative Tarjan; each frame is (node, position in its successor list).
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < successors[v].len() {
                let w = successors[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    // Tarjan emits sinks first.
    components.reverse();
    components
}

/// Nodes reachable from any of `sources` (sources included).
pub fn reachable_from(successors: &[Vec<usize>], sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; successors.len()];
    let mut todo: Vec<usize> = Vec::new();
    for s in sources {
        if !seen[s] {
            seen[s] = true;
            todo.push(s);
        }
    }
    while let Some(v) = todo.pop() {
        for &w in &successors[v] {
            if !seen[w] {
                seen[w] = true;
                todo.push(w);
            }
        }
    }
    seen
}

pub fn reverse(successors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut preds = vec![Vec::new(); successors.len()];
    for (v, succ) in successors.iter().enumerate() {
        for &w in succ {
            preds[w].push(v);
        }
    }
    preds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_topological(succ: &[Vec<usize>], comps: &[Vec<usize>]) -> bool {
        let mut comp_of = vec![0; succ.len()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        succ.iter()
            .enumerate()
            .all(|(v, ws)| ws.iter().all(|&w| comp_of[v] <= comp_of[w]))
    }

    #[test]
    fn chain_with_cycle() {
        // 0 -> 1 <-> 2 -> 3
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let comps = strongly_connected_components(&succ);
        assert_eq!(comps, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn three_cycle_is_one_component() {
        let succ = vec![vec![1], vec![2], vec![0]];
        assert_eq!(strongly_connected_components(&succ), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn acyclic_graph_gives_singletons_in_order() {
        let succ = vec![vec![2], vec![0], vec![], vec![1]];
        let comps = strongly_connected_components(&succ);
        assert!(comps.iter().all(|c| c.len() == 1));
        assert!(is_topological(&succ, &comps));
    }

    #[test]
    fn reachability() {
        let succ = vec![vec![1], vec![], vec![0]];
        assert_eq!(reachable_from(&succ, [0]), vec![true, true, false]);
        assert_eq!(reachable_from(&reverse(&succ), [1]), vec![true, true, true]);
    }

    proptest::proptest! {
        #[test]
        fn random_graphs_are_topologically_condensed(edges in proptest::collection::vec((0usize..8, 0usize..8), 0..30)) {
            let mut succ = vec![Vec::new(); 8];
            for (a, b) in edges {
                succ[a].push(b);
            }
            let comps = strongly_connected_components(&succ);
            let total: usize = comps.iter().map(Vec::len).sum();
            proptest::prop_assert_eq!(total, 8);
            proptest::prop_assert!(is_topological(&succ, &comps));
            // members of a component reach each other
            for c in &comps {
                let r = reachable_from(&succ, [c[0]]);
                let back = reachable_from(&reverse(&succ), [c[0]]);
                proptest::prop_assert!(c.iter().all(|&v| r[v] && back[v]));
            }
        }
    }
}
