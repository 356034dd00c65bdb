use alloc::vec;
use alloc::vec::Vec;

/// Strongly connected components of a directed graph, as a component id per
/// vertex. Iterative Tarjan.
pub(crate) fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(top) = call.last_mut() {
            let (v, child) = *top;
            if index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(child) {
                top.1 += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("v is on the stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Vertices lying on some cycle.
pub(crate) fn on_cycle(adj: &[Vec<usize>], comp: &[usize]) -> Vec<bool> {
    let mut size = vec![0usize; comp.iter().copied().max().map_or(0, |m| m + 1)];
    for &c in comp {
        size[c] += 1;
    }
    (0..adj.len())
        .map(|v| size[comp[v]] > 1 || adj[v].contains(&v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_bridge() {
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![]];
        let c = scc(&adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[2]);
        assert_eq!(on_cycle(&adj, &c), [true, true, true, true, false]);
    }

    #[test]
    fn self_loop_counts_as_cycle() {
        let adj = vec![vec![0], vec![0]];
        let c = scc(&adj);
        assert_eq!(on_cycle(&adj, &c), [true, false]);
    }
}
