//! Fixed-size clique search: branch and bound over a degeneracy ordering
//! with bitset candidate sets.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(bits: usize) -> Self {
        Self {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|w| w * 64 + self.words[w].trailing_zeros() as usize)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Bitset) -> Bitset {
        Bitset {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    w * 64 + bit
                })
            })
        })
    }
}

/// Undirected graph on `0..n` as adjacency bitsets.
#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Bitset>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Bitset::new(n); n],
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueOutcome {
    /// Vertices of a clique of the requested size, ascending.
    Found(Vec<usize>),
    NotFound,
    /// Gave up after the node budget.
    Exhausted,
}

/// Looks for a clique with exactly `size` vertices, visiting at most
/// `budget` search nodes.
pub fn find_clique(g: &Graph, size: usize, budget: u64) -> CliqueOutcome {
    let n = g.len();
    if size == 0 {
        return CliqueOutcome::Found(Vec::new());
    }
    if size > n {
        return CliqueOutcome::NotFound;
    }

    // Degeneracy order by repeatedly removing a minimum-degree vertex; a
    // vertex removed with fewer than size-1 remaining neighbours cannot be
    // in a solution that uses only later vertices.
    let mut alive = Bitset::new(n);
    for v in 0..n {
        alive.insert(v);
    }
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = alive
            .iter()
            .min_by_key(|&v| (degree[v], v))
            .expect("vertices remain");
        alive.remove(v);
        order.push(v);
        for u in g.adj[v].and(&alive).iter() {
            degree[u] -= 1;
        }
    }

    let mut later = Bitset::new(n);
    for v in 0..n {
        later.insert(v);
    }
    let mut nodes = 0u64;
    let mut clique = Vec::with_capacity(size);
    for &v in &order {
        later.remove(v);
        let cand = g.adj[v].and(&later);
        if cand.count() + 1 < size {
            continue;
        }
        clique.push(v);
        match extend(g, &mut clique, cand, size - 1, &mut nodes, budget) {
            Some(true) => {
                clique.sort_unstable();
                return CliqueOutcome::Found(clique);
            }
            Some(false) => {
                clique.pop();
            }
            None => return CliqueOutcome::Exhausted,
        }
    }
    CliqueOutcome::NotFound
}

/// `None` once the node budget is spent.
fn extend(
    g: &Graph,
    clique: &mut Vec<usize>,
    mut cand: Bitset,
    need: usize,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    if need == 0 {
        return Some(true);
    }
    while cand.count() >= need {
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        if color_bound(g, &cand) < need {
            return Some(false);
        }
        let v = cand.first().expect("count ≥ need ≥ 1");
        cand.remove(v);
        let next = cand.and(&g.adj[v]);
        if next.count() + 1 >= need {
            clique.push(v);
            if extend(g, clique, next, need - 1, nodes, budget)? {
                return Some(true);
            }
            clique.pop();
        }
    }
    Some(false)
}

/// Number of colours in a greedy colouring of the candidate set, an upper
/// bound on its clique number.
fn color_bound(g: &Graph, cand: &Bitset) -> usize {
    let mut uncolored = cand.clone();
    let mut colors = 0;
    while uncolored.count() > 0 {
        colors += 1;
        let mut available = uncolored.clone();
        while let Some(v) = available.first() {
            available.remove(v);
            uncolored.remove(v);
            for u in g.adj[v].iter() {
                available.remove(u);
            }
        }
    }
    colors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::for_each_combination;
    use proptest::prelude::*;

    fn brute_clique(g: &Graph, size: usize) -> bool {
        let verts: Vec<usize> = (0..g.len()).collect();
        let mut found = false;
        for_each_combination(&verts, size, |c| {
            found = c
                .iter()
                .all(|&a| c.iter().all(|&b| a == b || g.has_edge(a, b)));
            !found
        });
        found
    }

    #[test]
    fn bitset_iterates_in_order() {
        let mut b = Bitset::new(130);
        for i in [0, 63, 64, 129] {
            b.insert(i);
        }
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(b.count(), 4);
    }

    #[test]
    fn triangle_in_path_plus_chord() {
        let mut g = Graph::new(5);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)] {
            g.add_edge(a, b);
        }
        assert_eq!(
            find_clique(&g, 3, u64::MAX),
            CliqueOutcome::Found(vec![1, 2, 3])
        );
        assert_eq!(find_clique(&g, 4, u64::MAX), CliqueOutcome::NotFound);
        // first vertex of the degeneracy order: lowest index among minimum degree
        assert_eq!(find_clique(&g, 1, u64::MAX), CliqueOutcome::Found(vec![0]));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // a 5-partite complete graph has no 6-clique but plenty of 5-cliques
        let n = 40;
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in 0..n {
                if a % 5 != b % 5 {
                    g.add_edge(a, b);
                }
            }
        }
        assert_eq!(find_clique(&g, 6, 3), CliqueOutcome::Exhausted);
        assert!(matches!(find_clique(&g, 5, 1000), CliqueOutcome::Found(_)));
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(n in 1usize..13, size in 1usize..6, edges in proptest::collection::vec(any::<bool>(), 78)) {
            let mut g = Graph::new(n);
            let mut e = edges.into_iter();
            for a in 0..n {
                for b in a + 1..n {
                    if e.next().unwrap_or(false) {
                        g.add_edge(a, b);
                    }
                }
            }
            let expected = brute_clique(&g, size);
            match find_clique(&g, size, u64::MAX) {
                CliqueOutcome::Found(c) => {
                    prop_assert!(expected);
                    prop_assert_eq!(c.len(), size);
                    for &a in &c {
                        for &b in &c {
                            prop_assert!(a == b || g.has_edge(a, b));
                        }
                    }
                }
                CliqueOutcome::NotFound => prop_assert!(!expected),
                CliqueOutcome::Exhausted => prop_assert!(false),
            }
        }
    }
}
