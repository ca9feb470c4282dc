//! Maximum clique by bitset branch and bound.

use std::time::{Duration, Instant};

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueResult {
    /// Members of the largest clique found, sorted.
    pub members: Vec<usize>,
    /// `false` when the time budget ran out and the result may be too small.
    pub exact: bool,
}

impl CliqueResult {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    return None;
                }
                let b = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + b)
            })
        })
    }
}

struct Search<'a> {
    nbrs: &'a [Bits],
    best: Vec<usize>,
    current: Vec<usize>,
    deadline: Option<Instant>,
    calls: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn expand(&mut self, mut p: Bits, mut x: Bits) {
        self.calls += 1;
        if self.calls.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        if p.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return;
        }
        if self.current.len() + p.count() <= self.best.len() {
            return;
        }
        // Tomita pivot: the vertex of P u X with most neighbors in P
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| (p.and_count(&self.nbrs[u]), std::cmp::Reverse(u)))
            .expect("P is nonempty");
        let candidates: Vec<usize> = p
            .iter()
            .filter(|&v| !is_set(&self.nbrs[pivot], v))
            .collect();
        for v in candidates {
            if self.current.len() + p.count() <= self.best.len() {
                return;
            }
            self.current.push(v);
            self.expand(p.and(&self.nbrs[v]), x.and(&self.nbrs[v]));
            self.current.pop();
            p.clear(v);
            x.set(v);
            if self.timed_out {
                return;
            }
        }
    }
}

fn is_set(b: &Bits, i: usize) -> bool {
    b.0[i / 64] >> (i % 64) & 1 == 1
}

/// Greedy clique: from every start vertex, repeatedly add the candidate with
/// the most neighbors among the remaining candidates.
pub fn greedy_clique(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let nbrs = bitsets(g);
    let mut best: Vec<usize> = Vec::new();
    for s in 0..n {
        if g.degree(s) < best.len() {
            continue;
        }
        let mut clique = vec![s];
        let mut cand = nbrs[s].clone();
        while !cand.is_empty() {
            let v = cand
                .iter()
                .max_by_key(|&u| (cand.and_count(&nbrs[u]), std::cmp::Reverse(u)))
                .expect("nonempty");
            clique.push(v);
            cand = cand.and(&nbrs[v]);
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best.sort_unstable();
    best
}

fn bitsets(g: &Graph) -> Vec<Bits> {
    (0..g.n())
        .map(|i| {
            let mut b = Bits::empty(g.n());
            for &j in g.neighbors(i) {
                b.set(j as usize);
            }
            b
        })
        .collect()
}

/// Exact maximum clique (Bron-Kerbosch with Tomita pivoting and a size
/// bound), seeded with the greedy clique. If `budget` runs out the best
/// clique found so far is returned with `exact = false`.
pub fn max_clique(g: &Graph, budget: Option<Duration>) -> CliqueResult {
    let n = g.n();
    if n == 0 {
        return CliqueResult {
            members: vec![],
            exact: true,
        };
    }
    let nbrs = bitsets(g);
    let mut search = Search {
        nbrs: &nbrs,
        best: greedy_clique(g),
        current: Vec::new(),
        deadline: budget.map(|b| Instant::now() + b),
        calls: 0,
        timed_out: false,
    };
    let mut all = Bits::empty(n);
    (0..n).for_each(|i| all.set(i));
    search.expand(all, Bits::empty(n));
    let mut members = search.best;
    members.sort_unstable();
    CliqueResult {
        members,
        exact: !search.timed_out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;

    #[test]
    fn small_cases() {
        assert_eq!(max_clique(&generators::complete(5), None).size(), 5);
        assert_eq!(max_clique(&generators::cycle(6), None).size(), 2);
        assert_eq!(max_clique(&Graph::empty(3), None).size(), 1);
        assert_eq!(max_clique(&Graph::empty(0), None).size(), 0);
    }

    #[test]
    fn members_form_a_clique() {
        let g = Graph::from_edges(
            7,
            [
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (3, 4),
                (3, 5),
                (4, 5),
                (2, 4),
                (2, 5),
                (5, 6),
            ],
        );
        let c = max_clique(&g, None);
        assert_eq!(c.members, vec![2, 3, 4, 5]);
        assert!(c.exact);
    }

    #[test]
    fn spans_several_words() {
        let mut edges = Vec::new();
        for i in 100..110 {
            for j in i + 1..110 {
                edges.push((i, j));
            }
        }
        edges.push((0, 150));
        let g = Graph::from_edges(160, edges);
        assert_eq!(max_clique(&g, None).members, (100..110).collect::<Vec<_>>());
    }
}
