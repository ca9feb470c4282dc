//! Small deterministic graphs used by tests, examples and the synthetic
//! volume experiment.

use rand::Rng;

use super::Graph;

/// Path `P_n`.
pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
}

/// Complete graph `K_n`.
pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// Cycle `C_n`, `n >= 3`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Star `K_{1,k}` with the center at node 0.
pub fn star(k: usize) -> Graph {
    Graph::from_edges(k + 1, (1..=k).map(|i| (0, i)))
}

/// A cycle of `cycle_len` nodes whose node 0 is joined to the root of a
/// complete `branching`-ary tree of the given depth.
///
/// Nodes `0..cycle_len` are the cycle, the tree follows in breadth-first
/// order starting with its root.
pub fn cycle_plus_tree(cycle_len: usize, branching: usize, depth: usize) -> Graph {
    assert!(cycle_len >= 3 && branching >= 1);
    let mut edges: Vec<(usize, usize)> = (0..cycle_len).map(|i| (i, (i + 1) % cycle_len)).collect();
    let root = cycle_len;
    edges.push((0, root));
    let mut level = vec![root];
    let mut next_id = root + 1;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * branching);
        for &p in &level {
            for _ in 0..branching {
                edges.push((p, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    Graph::from_edges(next_id, edges)
}

/// Erdos-Renyi `G(n, p)`.
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(path(5).num_edges(), 4);
        assert_eq!(complete(5).num_edges(), 10);
        assert_eq!(cycle(6).num_edges(), 6);
        assert_eq!(star(3).degree(0), 3);
        let g = cycle_plus_tree(20, 3, 3);
        assert_eq!(g.n(), 20 + 1 + 3 + 9 + 27);
        assert_eq!(g.num_edges(), g.n());
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(20), 4);
    }
}
