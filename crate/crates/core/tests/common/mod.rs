//! Exponential-time reference counts straight from the definitions.

#![allow(dead_code)]

use treecorr::Tree;

pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn of(t: &Tree) -> Self {
        let parents = t.parents();
        let edges = parents
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
            .collect();
        Graph { n: parents.len(), edges }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b)) || self.edges.contains(&(b, a))
    }
}

/// (containing root, avoiding root)
pub type Split = (u64, u64);

fn split(counts: impl Iterator<Item = bool>) -> Split {
    counts.fold((0, 0), |(a, b), root| if root { (a + 1, b) } else { (a, b + 1) })
}

pub fn independent_sets(g: &Graph) -> Split {
    assert!(g.n <= 20);
    split((0u32..1 << g.n).filter_map(|mask| {
        let ok = g
            .edges
            .iter()
            .all(|&(a, b)| mask & (1 << a) == 0 || mask & (1 << b) == 0);
        ok.then_some(mask & 1 == 1)
    }))
}

/// Matchings, split by whether the root is covered.
pub fn matchings(g: &Graph) -> Split {
    let m = g.edges.len();
    assert!(m <= 20);
    split((0u32..1 << m).filter_map(|mask| {
        let mut used = vec![false; g.n];
        for (i, &(a, b)) in g.edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if used[a] || used[b] {
                    return None;
                }
                used[a] = true;
                used[b] = true;
            }
        }
        Some(used[0])
    }))
}

/// Nonempty connected vertex subsets.
pub fn subtrees(g: &Graph) -> Split {
    assert!(g.n <= 20);
    split((1u32..1 << g.n).filter_map(|mask| {
        let members: Vec<usize> = (0..g.n).filter(|&v| mask & (1 << v) != 0).collect();
        let mut seen = vec![members[0]];
        let mut i = 0;
        while i < seen.len() {
            let v = seen[i];
            for &u in &members {
                if !seen.contains(&u) && g.adjacent(u, v) {
                    seen.push(u);
                }
            }
            i += 1;
        }
        (seen.len() == members.len()).then_some(mask & 1 == 1)
    }))
}

pub fn distances_from(g: &Graph, src: usize) -> Vec<u64> {
    let mut dist = vec![u64::MAX; g.n];
    dist[src] = 0;
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &(a, b) in &g.edges {
            let u = if a == v { b } else if b == v { a } else { continue };
            if dist[u] == u64::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Total distance from the root.
pub fn root_distance(g: &Graph) -> u64 {
    distances_from(g, 0).iter().sum()
}

pub fn wiener(g: &Graph) -> u64 {
    (0..g.n).map(|v| distances_from(g, v).iter().sum::<u64>()).sum::<u64>() / 2
}
