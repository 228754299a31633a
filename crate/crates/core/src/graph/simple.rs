use std::collections::VecDeque;

/// Undirected simple graph over local indices `0..n`, with the global id of
/// every local node.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SimpleGraph {
    pub nodes: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            nodes: (0..n).collect(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn with_nodes(nodes: Vec<usize>) -> Self {
        let n = nodes.len();
        SimpleGraph {
            nodes,
            adj: vec![Vec::new(); n],
        }
    }

    /// Build from local edge pairs; loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = SimpleGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Returns false for loops and existing edges.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        match self.adj[a].binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[a].insert(pos, b);
                let pos = self.adj[b].binary_search(&a).unwrap_err();
                self.adj[b].insert(pos, a);
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (a, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// Hop distances from `src`; `u32::MAX` marks unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components as sorted node lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let d = self.bfs(s);
            let comp: Vec<usize> = (0..self.len()).filter(|&v| d[v] != u32::MAX).collect();
            for &v in &comp {
                seen[v] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Subgraph on the given local nodes, keeping their global ids.
    pub fn induced(&self, local: &[usize]) -> SimpleGraph {
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &v) in local.iter().enumerate() {
            pos[v] = k;
        }
        let mut g = SimpleGraph::with_nodes(local.iter().map(|&v| self.nodes[v]).collect());
        for (k, &v) in local.iter().enumerate() {
            for &w in self.neighbors(v) {
                if pos[w] != usize::MAX && k < pos[w] {
                    g.add_edge(k, pos[w]);
                }
            }
        }
        g
    }

    /// Largest connected component, ties to the one with the lowest node.
    pub fn largest_component(&self) -> SimpleGraph {
        let comps = self.components();
        match comps.iter().enumerate().max_by_key(|(k, c)| (c.len(), std::cmp::Reverse(*k))) {
            Some((_, c)) => self.induced(c),
            None => SimpleGraph::default(),
        }
    }

    /// Hop distance matrix, row-major; `u32::MAX` for unreachable pairs.
    pub fn all_pairs(&self) -> Vec<Vec<u32>> {
        (0..self.len()).map(|v| self.bfs(v)).collect()
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
        SimpleGraph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = SimpleGraph::path(n);
        if n > 2 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    /// Node 0 joined to `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|k| (0, k)).collect();
        SimpleGraph::from_edges(leaves + 1, &edges)
    }
}
