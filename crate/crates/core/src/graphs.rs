//! Small graphs on at most 16 vertices as adjacency bitsets, with forbidden
//! induced pattern detection, class membership predicates and brute-force
//! canonical forms.
//!
//! Every class predicate has a second, independent formulation
//! ([`is_member_alt`]) used to cross-check the first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_VERTICES: usize = 16;
pub const MAX_CANONICAL: usize = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("{n} vertices exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("unknown graph class {0:?}")]
    UnknownClass(String),
    #[error("malformed graph6 string: {0}")]
    Graph6(String),
}

/// Undirected simple graph with vertices `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: [u16; MAX_VERTICES],
}

/// Position of the pair `i < j` in the upper-triangle bit order
/// (column by column: (0,1), (0,2), (1,2), (0,3), ...).
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

#[inline]
fn bits(mut m: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge { n, max: MAX_VERTICES });
        }
        Ok(Graph { n, adj: [0; MAX_VERTICES] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(GraphError::InvalidEdge(u, v));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Graph whose edge `{i, j}` is present iff bit [`pair_index`]`(i, j)` is set.
    pub fn from_upper_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 11, "upper-triangle masks hold at most 11 vertices");
        let mut g = Graph { n, adj: [0; MAX_VERTICES] };
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            let (i, j) = unpair(b);
            g.add_edge(i, j);
        }
        g
    }

    pub fn upper_mask(&self) -> u64 {
        assert!(self.n <= 11, "upper-triangle masks hold at most 11 vertices");
        let mut mask = 0u64;
        for (i, j) in self.edges() {
            mask |= 1 << pair_index(i, j);
        }
        mask
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n).expect("complete graph size");
        for j in 1..n {
            for i in 0..j {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle size")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path size")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> u16 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn all_vertices(&self) -> u16 {
        ((1u32 << self.n) - 1) as u16
    }

    pub fn edge_count(&self) -> usize {
        self.adj[..self.n].iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 1..self.n {
            for i in bits(self.adj[j] & ((1 << j) - 1)) {
                out.push((i, j));
            }
        }
        out
    }

    /// Vertices reachable from `start` inside `within`.
    pub fn component(&self, start: usize, within: u16) -> u16 {
        let mut seen = 1u16 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u16;
            for v in bits(frontier) {
                next |= self.adj[v];
            }
            next &= within & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Whether the subgraph induced by the nonempty set `within` is connected.
    pub fn is_connected_within(&self, within: u16) -> bool {
        within != 0 && self.component(within.trailing_zeros() as usize, within) == within
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.is_connected_within(self.all_vertices())
    }

    /// Subgraph induced by `subset`, relabelled in increasing vertex order.
    pub fn induced(&self, subset: u16) -> Graph {
        let vs: Vec<usize> = bits(subset).collect();
        let mut g = Graph { n: vs.len(), adj: [0; MAX_VERTICES] };
        for (a, &u) in vs.iter().enumerate() {
            for (b, &v) in vs.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// The graph with vertex `v` renamed `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        let mut g = Graph { n: self.n, adj: [0; MAX_VERTICES] };
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    fn require_connected(&self) -> Result<(), GraphError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }
}

/// `(i, j)` for every pair index of graphs on at most 11 vertices.
const PAIRS: [(u8, u8); 55] = {
    let mut out = [(0u8, 0u8); 55];
    let mut j = 1;
    let mut k = 0;
    while j < 11 {
        let mut i = 0;
        while i < j {
            out[k] = (i as u8, j as u8);
            k += 1;
            i += 1;
        }
        j += 1;
    }
    out
};

fn unpair(b: usize) -> (usize, usize) {
    let (i, j) = PAIRS[b];
    (i as usize, j as usize)
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Hop distances inside `within`; `u8::MAX` for unreachable pairs.
fn distances_within(g: &Graph, within: u16) -> [[u8; MAX_VERTICES]; MAX_VERTICES] {
    let mut d = [[u8::MAX; MAX_VERTICES]; MAX_VERTICES];
    for s in bits(within) {
        let mut seen = 1u16 << s;
        let mut frontier = seen;
        let mut level = 0u8;
        d[s][s] = 0;
        while frontier != 0 {
            level += 1;
            let mut next = 0u16;
            for v in bits(frontier) {
                next |= g.adj[v];
            }
            next &= within & !seen;
            for v in bits(next) {
                d[s][v] = level;
            }
            seen |= next;
            frontier = next;
        }
    }
    d
}

/// All-pairs hop distances (`None` when disconnected).
pub fn distances(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let d = distances_within(g, g.all_vertices());
    (0..g.n).map(|u| (0..g.n).map(|v| if d[u][v] == u8::MAX { None } else { Some(d[u][v] as u32) }).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    C4,
    Diamond,
    /// A clique on four vertices (hence any larger clique).
    K4Plus,
}

/// Calls `f` on every 4-subset with its edge count and degree-2 indicator.
fn for_each_quad(g: &Graph, mut f: impl FnMut(u16, usize) -> bool) -> bool {
    let n = g.n;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let s = (1u16 << a) | (1 << b) | (1 << c) | (1 << d);
                    let e = [a, b, c, d].iter().map(|&v| (g.adj[v] & s).count_ones() as usize).sum::<usize>() / 2;
                    if f(s, e) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

pub fn has_induced(g: &Graph, pattern: Pattern) -> bool {
    for_each_quad(g, |s, e| match pattern {
        Pattern::C4 => e == 4 && bits(s).all(|v| (g.adj[v] & s).count_ones() == 2),
        Pattern::Diamond => e == 5,
        Pattern::K4Plus => e == 6,
    })
}

/// Some edge has an endpoint of degree 1.
pub fn has_pendant_edge(g: &Graph) -> Result<bool, GraphError> {
    g.require_connected()?;
    Ok((0..g.n).any(|v| g.degree(v) == 1))
}

/// Some edge disconnects the graph when removed.
pub fn has_bridge(g: &Graph) -> Result<bool, GraphError> {
    g.require_connected()?;
    Ok(g.edges().into_iter().any(|(u, v)| {
        let mut h = *g;
        h.remove_edge(u, v);
        !h.is_connected()
    }))
}

/// Biconnected components as (vertex set, edge count).
pub fn blocks(g: &Graph) -> Vec<(u16, usize)> {
    struct St<'a> {
        g: &'a Graph,
        disc: [u8; MAX_VERTICES],
        low: [u8; MAX_VERTICES],
        time: u8,
        stack: Vec<(usize, usize)>,
        out: Vec<(u16, usize)>,
    }
    fn dfs(s: &mut St<'_>, u: usize, parent: Option<usize>) {
        s.time += 1;
        s.disc[u] = s.time;
        s.low[u] = s.time;
        for v in bits(s.g.adj[u]) {
            if s.disc[v] == 0 {
                s.stack.push((u, v));
                dfs(s, v, Some(u));
                s.low[u] = s.low[u].min(s.low[v]);
                if s.low[v] >= s.disc[u] {
                    let mut verts = 0u16;
                    let mut edges = 0;
                    while let Some((a, b)) = s.stack.pop() {
                        verts |= (1 << a) | (1 << b);
                        edges += 1;
                        if (a, b) == (u, v) {
                            break;
                        }
                    }
                    s.out.push((verts, edges));
                }
            } else if Some(v) != parent && s.disc[v] < s.disc[u] {
                s.stack.push((u, v));
                s.low[u] = s.low[u].min(s.disc[v]);
            }
        }
    }
    let mut s = St { g, disc: [0; MAX_VERTICES], low: [0; MAX_VERTICES], time: 0, stack: Vec::new(), out: Vec::new() };
    for v in 0..g.n {
        if s.disc[v] == 0 {
            dfs(&mut s, v, None);
        }
    }
    s.out
}

/// Membership predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphClass {
    Block,
    Ptolemaic,
    Cactus23,
    Cactus3,
    Cactus4,
    DistanceHereditary,
    Chordal,
    WeaklyGeodetic,
}

impl GraphClass {
    pub const ALL: [GraphClass; 8] = [
        GraphClass::Block,
        GraphClass::Ptolemaic,
        GraphClass::Cactus23,
        GraphClass::Cactus3,
        GraphClass::Cactus4,
        GraphClass::DistanceHereditary,
        GraphClass::Chordal,
        GraphClass::WeaklyGeodetic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GraphClass::Block => "block",
            GraphClass::Ptolemaic => "ptolemaic",
            GraphClass::Cactus23 => "cactus23",
            GraphClass::Cactus3 => "cactus3",
            GraphClass::Cactus4 => "cactus4",
            GraphClass::DistanceHereditary => "distance_hereditary",
            GraphClass::Chordal => "chordal",
            GraphClass::WeaklyGeodetic => "weakly_geodetic",
        }
    }

    /// Allowed cycle lengths for cactus classes, where an edge counts as a 2-cycle.
    fn cactus_sizes(self) -> Option<&'static [usize]> {
        match self {
            GraphClass::Cactus23 => Some(&[2, 3]),
            GraphClass::Cactus3 => Some(&[3]),
            GraphClass::Cactus4 => Some(&[4]),
            _ => None,
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for GraphClass {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GraphClass::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| GraphError::UnknownClass(s.to_string()))
    }
}

/// Every induced path between two vertices is a shortest path.
pub fn is_distance_hereditary(g: &Graph) -> bool {
    let d = distances_within(g, g.all_vertices());
    fn extend(g: &Graph, d: &[[u8; MAX_VERTICES]; MAX_VERTICES], start: usize, end: usize, path: u16, len: u8) -> bool {
        let inner = path & !(1 << end);
        for x in bits(g.adj[end] & !path) {
            if g.adj[x] & inner != 0 {
                continue;
            }
            if d[start][x] != len + 1 || !extend(g, d, start, x, path | (1 << x), len + 1) {
                return false;
            }
        }
        true
    }
    (0..g.n).all(|s| extend(g, &d, s, s, 1 << s, 0))
}

/// Distances in every connected induced subgraph equal distances in `g`.
pub fn is_distance_hereditary_by_subgraphs(g: &Graph) -> bool {
    let full = distances_within(g, g.all_vertices());
    (1..=g.all_vertices()).all(|s| {
        if !g.is_connected_within(s) {
            return true;
        }
        let d = distances_within(g, s);
        bits(s).all(|u| bits(s).all(|v| d[u][v] == full[u][v]))
    })
}

/// Repeatedly removes a vertex whose remaining neighbourhood is a clique.
pub fn is_chordal(g: &Graph) -> bool {
    let mut alive = g.all_vertices();
    while alive != 0 {
        let simplicial = bits(alive).find(|&v| {
            let nb = g.adj[v] & alive;
            bits(nb).all(|u| nb & !(1 << u) & !g.adj[u] == 0)
        });
        match simplicial {
            Some(v) => alive &= !(1 << v),
            None => return false,
        }
    }
    true
}

/// No vertex subset of size at least 4 induces a cycle.
pub fn is_chordal_by_cycles(g: &Graph) -> bool {
    (1..=g.all_vertices())
        .all(|s| s.count_ones() < 4 || !(bits(s).all(|v| (g.adj[v] & s).count_ones() == 2) && g.is_connected_within(s)))
}

/// `d(u,v) d(w,x) <= d(u,w) d(v,x) + d(u,x) d(v,w)` for all four vertices.
pub fn satisfies_ptolemy_inequality(g: &Graph) -> bool {
    let d = distances_within(g, g.all_vertices());
    let d = |a: usize, b: usize| d[a][b] as u32;
    !for_each_quad(g, |s, _| {
        let q: Vec<usize> = bits(s).collect();
        let (a, b, c, e) = (q[0], q[1], q[2], q[3]);
        let p = [d(a, b) * d(c, e), d(a, c) * d(b, e), d(a, e) * d(b, c)];
        p[0] > p[1] + p[2] || p[1] > p[0] + p[2] || p[2] > p[0] + p[1]
    })
}

/// Pairs at distance two have exactly one common neighbour.
pub fn is_weakly_geodetic(g: &Graph) -> bool {
    let d = distances_within(g, g.all_vertices());
    (0..g.n).all(|u| (u + 1..g.n).all(|v| d[u][v] != 2 || (g.adj[u] & g.adj[v]).count_ones() == 1))
}

fn blocks_are_cliques(g: &Graph) -> bool {
    blocks(g).iter().all(|&(vs, e)| {
        let k = vs.count_ones() as usize;
        e == k * (k - 1) / 2
    })
}

fn blocks_are_cycles(g: &Graph, sizes: &[usize]) -> bool {
    if g.n == 1 {
        // a lone vertex belongs exactly to the classes that admit bridges
        return sizes.contains(&2);
    }
    blocks(g).iter().all(|&(vs, e)| {
        let k = vs.count_ones() as usize;
        (k == 2 || e == k) && sizes.contains(&k)
    })
}

/// Decides membership from each class's defining property.
pub fn is_member(g: &Graph, class: GraphClass) -> Result<bool, GraphError> {
    g.require_connected()?;
    Ok(match class {
        GraphClass::Block => blocks_are_cliques(g),
        GraphClass::Ptolemaic => {
            let by_structure = is_chordal(g) && is_distance_hereditary(g);
            assert_eq!(
                by_structure,
                satisfies_ptolemy_inequality(g),
                "chordal distance-hereditary disagrees with the ptolemaic inequality on {g:?}"
            );
            by_structure
        }
        GraphClass::Cactus23 | GraphClass::Cactus3 | GraphClass::Cactus4 => {
            blocks_are_cycles(g, class.cactus_sizes().expect("cactus class"))
        }
        GraphClass::DistanceHereditary => is_distance_hereditary(g),
        GraphClass::Chordal => is_chordal(g),
        GraphClass::WeaklyGeodetic => is_weakly_geodetic(g),
    })
}

/// Lengths of simple paths from `u` to `v` avoiding `visited`, stopping after two.
fn simple_path_lengths(g: &Graph, u: usize, v: usize, visited: u16, len: usize, out: &mut Vec<usize>) {
    if out.len() > 1 {
        return;
    }
    if u == v {
        out.push(len);
        return;
    }
    for w in bits(g.adj[u] & !visited) {
        simple_path_lengths(g, w, v, visited | (1 << w), len + 1, out);
    }
}

/// Every edge lies on at most one cycle, of an allowed length; bridges are
/// allowed only when 2 is an allowed length.
fn is_cactus_by_edge_cycles(g: &Graph, sizes: &[usize]) -> bool {
    if g.n == 1 {
        return sizes.contains(&2);
    }
    g.edges().into_iter().all(|(u, v)| {
        let mut h = *g;
        h.remove_edge(u, v);
        let mut lens = Vec::new();
        simple_path_lengths(&h, u, v, 1 << u, 0, &mut lens);
        match lens.as_slice() {
            [] => sizes.contains(&2),
            [l] => sizes.contains(&(l + 1)),
            _ => false,
        }
    })
}

/// Second formulation of each class, independent of [`is_member`].
pub fn is_member_alt(g: &Graph, class: GraphClass) -> Result<bool, GraphError> {
    g.require_connected()?;
    Ok(match class {
        GraphClass::Block => {
            !has_induced(g, Pattern::C4) && !has_induced(g, Pattern::Diamond) && is_distance_hereditary_by_subgraphs(g)
        }
        GraphClass::Ptolemaic => satisfies_ptolemy_inequality(g),
        GraphClass::Cactus23 | GraphClass::Cactus3 | GraphClass::Cactus4 => {
            is_cactus_by_edge_cycles(g, class.cactus_sizes().expect("cactus class"))
        }
        GraphClass::DistanceHereditary => is_distance_hereditary_by_subgraphs(g),
        GraphClass::Chordal => is_chordal_by_cycles(g),
        GraphClass::WeaklyGeodetic => !has_induced(g, Pattern::C4) && !has_induced(g, Pattern::Diamond),
    })
}

/// Calls `f` with every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Relabelling of upper-triangle masks under a vertex permutation, one table
/// entry per pair.
pub fn permuted_pair_indices(n: usize, perm: &[usize]) -> Vec<u8> {
    let mut out = vec![0u8; n * (n.max(1) - 1) / 2];
    for j in 1..n {
        for i in 0..j {
            let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            out[pair_index(i, j)] = pair_index(a, b) as u8;
        }
    }
    out
}

#[inline]
pub fn apply_pair_map(mask: u64, map: &[u8]) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= 1 << map[b];
    }
    out
}

/// Smallest upper-triangle mask over all relabellings.
pub fn canonical_mask(g: &Graph) -> Result<u64, GraphError> {
    if g.n > MAX_CANONICAL {
        return Err(GraphError::TooLarge { n: g.n, max: MAX_CANONICAL });
    }
    let mask = g.upper_mask();
    let mut best = mask;
    for_each_permutation(g.n, |p| {
        best = best.min(apply_pair_map(mask, &permuted_pair_indices(g.n, p)));
    });
    Ok(best)
}

/// Byte string equal for two graphs iff they are isomorphic: the vertex
/// count followed by the big-endian minimal adjacency mask.
pub fn canonical_form(g: &Graph) -> Result<Vec<u8>, GraphError> {
    let mask = canonical_mask(g)?;
    let mut out = vec![g.n as u8];
    out.extend_from_slice(&mask.to_be_bytes()[3..]);
    Ok(out)
}

/// graph6 encoding: one byte `n + 63`, then the upper triangle in
/// [`pair_index`] order, six bits per byte, most significant first, each plus 63.
pub fn to_graph6(g: &Graph) -> String {
    let mut out = vec![(g.n + 63) as u8];
    let total = g.n * g.n.saturating_sub(1) / 2;
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..g.n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            k += 1;
            if k % 6 == 0 {
                out.push(acc + 63);
                acc = 0;
            }
        }
    }
    if !total.is_multiple_of(6) {
        out.push((acc << (6 - total % 6)) + 63);
    }
    String::from_utf8(out).expect("graph6 is printable ASCII")
}

pub fn from_graph6(s: &str) -> Result<Graph, GraphError> {
    let bytes = s.trim().as_bytes();
    let (&first, rest) = bytes.split_first().ok_or_else(|| GraphError::Graph6("empty".into()))?;
    if !(63..=126).contains(&first) {
        return Err(GraphError::Graph6(format!("bad size byte {first}")));
    }
    let n = (first - 63) as usize;
    let mut g = Graph::empty(n)?;
    let total = n * n.saturating_sub(1) / 2;
    if rest.len() != total.div_ceil(6) {
        return Err(GraphError::Graph6(format!("expected {} data bytes, found {}", total.div_ceil(6), rest.len())));
    }
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = rest[k / 6];
            if !(63..=126).contains(&byte) {
                return Err(GraphError::Graph6(format!("bad data byte {byte}")));
            }
            if (byte - 63) >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Edge-list JSON form: `{"n": 3, "edges": [[0, 1], [1, 2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&Graph> for EdgeList {
    fn from(g: &Graph) -> Self {
        EdgeList { n: g.n, edges: g.edges() }
    }
}

impl TryFrom<&EdgeList> for Graph {
    type Error = GraphError;

    fn try_from(e: &EdgeList) -> Result<Self, Self::Error> {
        Graph::from_edges(e.n, &e.edges)
    }
}
