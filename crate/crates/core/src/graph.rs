//! Simple undirected graphs over dense vertex ids, plus the connectivity
//! routines the solvers share.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// A simple undirected graph. Vertex ids are `0..n`; names are surface syntax.
#[derive(Debug, Clone)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and duplicate names.
    pub fn new(
        names: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) || name.contains(',') {
                return Err(Error::Validation(format!("bad vertex name {name:?}")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate vertex name {name:?}")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) has an unknown endpoint"
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at {}", names[a])));
            }
            let e = (a.min(b), a.max(b));
            list.push(e);
            adj[a].push(b);
            adj[b].push(a);
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            let (a, b) = w[0];
            return Err(Error::Validation(format!(
                "duplicate edge {} {}",
                names[a], names[b]
            )));
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph {
            names,
            index,
            adj,
            edges: list,
        })
    }

    /// Vertices named `0..n`.
    pub fn with_default_names(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Graph::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(min, max)` pairs in ascending lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// True when `set` is non-empty and induces a connected subgraph.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let mut member = vec![false; self.vertex_count()];
        for &u in set {
            if u >= member.len() {
                return false;
            }
            member[u] = true;
        }
        let target = member.iter().filter(|&&m| m).count();
        let mut seen = vec![false; self.vertex_count()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if member[y] && !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        reached == target
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0
            || self.is_connected_subset(&(0..self.vertex_count()).collect::<Vec<_>>())
    }

    /// Edges with both endpoints in `set`, ascending.
    pub fn induced_edges(&self, set: &[usize]) -> Vec<(usize, usize)> {
        let mut member = vec![false; self.vertex_count()];
        for &u in set {
            member[u] = true;
        }
        self.edges
            .iter()
            .copied()
            .filter(|&(a, b)| member[a] && member[b])
            .collect()
    }

    /// BFS distances from `v`; `None` for unreachable vertices.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap() + 1;
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Whether removing `u` disconnects the subgraph induced by `set`.
    pub fn is_cut_vertex_of(&self, set: &[usize], u: usize) -> bool {
        let rest: Vec<usize> = set.iter().copied().filter(|&x| x != u).collect();
        !rest.is_empty() && !self.is_connected_subset(&rest)
    }

    /// If the graph is a simple path, its vertices in order starting from the
    /// endpoint with the smaller id. A single vertex counts as a path.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        if n == 0 || self.edge_count() != n - 1 || self.adj.iter().any(|nb| nb.len() > 2) {
            return None;
        }
        if n == 1 {
            return Some(vec![0]);
        }
        let start = (0..n).find(|&v| self.degree(v) == 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = self.adj[cur].iter().find(|&&y| y != prev) {
            order.push(next);
            prev = cur;
            cur = next;
            if order.len() > n {
                return None;
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Enumerates every connected vertex set `S` with `seed ⊆ S`,
    /// `S ∖ seed ⊆ allowed` and `|S| ≤ max_size`, each exactly once.
    ///
    /// `seed` must itself be connected. `descend(members, blocked)` is asked
    /// before each branching step; returning `false` prunes every extension
    /// of `members` that avoids the vertices flagged in `blocked`. Emitted
    /// slices are sorted.
    pub fn for_each_connected_superset<D, F>(
        &self,
        seed: &[usize],
        allowed: Option<&[bool]>,
        max_size: usize,
        mut descend: D,
        mut emit: F,
    ) where
        D: FnMut(&[usize], &[bool]) -> bool,
        F: FnMut(&[usize]),
    {
        if seed.is_empty() || seed.len() > max_size {
            return;
        }
        let n = self.vertex_count();
        let mut blocked = vec![false; n];
        if let Some(mask) = allowed {
            for v in 0..n {
                blocked[v] = !mask[v];
            }
        }
        for &s in seed {
            blocked[s] = true;
        }
        let mut frontier = Vec::new();
        for &s in seed {
            for &y in &self.adj[s] {
                if !blocked[y] && !frontier.contains(&y) {
                    frontier.push(y);
                }
            }
        }
        let mut members = seed.to_vec();
        let mut walker = SupersetWalk {
            graph: self,
            max_size,
            members: &mut members,
            blocked: &mut blocked,
            descend: &mut descend,
            emit: &mut emit,
            scratch: Vec::new(),
        };
        walker.walk(frontier);
    }

    /// All connected vertex sets of size in `min_size..=max_size`, each
    /// sorted, in ascending lexicographic order.
    pub fn connected_subsets(&self, min_size: usize, max_size: usize) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        for s in 0..n {
            let allowed: Vec<bool> = (0..n).map(|v| v > s).collect();
            self.for_each_connected_superset(
                &[s],
                Some(&allowed),
                max_size,
                |_, _| true,
                |set| {
                    if set.len() >= min_size {
                        out.push(set.to_vec());
                    }
                },
            );
        }
        out.sort();
        out
    }
}

struct SupersetWalk<'a, D, F> {
    graph: &'a Graph,
    max_size: usize,
    members: &'a mut Vec<usize>,
    blocked: &'a mut Vec<bool>,
    descend: &'a mut D,
    emit: &'a mut F,
    scratch: Vec<usize>,
}

impl<D, F> SupersetWalk<'_, D, F>
where
    D: FnMut(&[usize], &[bool]) -> bool,
    F: FnMut(&[usize]),
{
    fn walk(&mut self, mut frontier: Vec<usize>) {
        if frontier.is_empty() || self.members.len() == self.max_size {
            self.scratch.clear();
            self.scratch.extend_from_slice(self.members);
            self.scratch.sort_unstable();
            (self.emit)(&self.scratch);
            return;
        }
        if !(self.descend)(self.members, self.blocked) {
            return;
        }
        let (pos, &u) = frontier
            .iter()
            .enumerate()
            .min_by_key(|&(_, &x)| x)
            .expect("frontier is non-empty");
        frontier.swap_remove(pos);

        // include u
        self.blocked[u] = true;
        self.members.push(u);
        let mut grown = frontier.clone();
        for &y in self.graph.neighbors(u) {
            if !self.blocked[y] && !grown.contains(&y) {
                grown.push(y);
            }
        }
        self.walk(grown);
        self.members.pop();

        // exclude u (stays blocked)
        self.walk(frontier);
        self.blocked[u] = false;
    }
}
