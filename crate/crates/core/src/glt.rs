//! Graph-labeled trees with clique and star labels (clique-star trees).
//!
//! Leaves are graph vertices. Every internal node carries a label whose
//! marker vertices ("slots") are in bijection with its incident tree edges.
//! In a clique label all slots are adjacent. In a star label the center slot
//! is adjacent to every extremity and extremities are pairwise non-adjacent.
//! Two leaves are adjacent in the accessibility graph iff the tree path
//! between them enters and leaves every internal node through adjacent slots.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{has_bridge, has_induced, has_pendant_edge, Graph, GraphError, Pattern};

pub const MIN_GENERATED_LEAVES: usize = 3;
pub const MAX_GENERATED_LEAVES: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GltError {
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("tree is not reduced")]
    NotReduced,
    #[error("leaf count {n} is outside {min}..={max}")]
    LeafCount { n: usize, min: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid tree JSON: {0}")]
    Json(String),
    #[error("unknown tree policy {0:?}")]
    UnknownPolicy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf {
        label: usize,
    },
    Clique,
    /// `center` is a slot index.
    Star {
        center: usize,
    },
}

/// Kind of a slot as seen across a tree edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Leaf,
    Clique,
    Center,
    Extremity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphLabeledTree {
    kinds: Vec<NodeKind>,
    /// `ports[v][s] = (w, t)`: slot `s` of `v` is joined to slot `t` of `w`.
    ports: Vec<Vec<(usize, usize)>>,
}

impl Default for GraphLabeledTree {
    fn default() -> Self {
        Self::new()
    }
}

impl GraphLabeledTree {
    pub fn new() -> Self {
        GraphLabeledTree { kinds: Vec::new(), ports: Vec::new() }
    }

    fn add(&mut self, kind: NodeKind) -> usize {
        self.kinds.push(kind);
        self.ports.push(Vec::new());
        self.kinds.len() - 1
    }

    pub fn add_leaf(&mut self, label: usize) -> usize {
        self.add(NodeKind::Leaf { label })
    }

    pub fn add_clique(&mut self) -> usize {
        self.add(NodeKind::Clique)
    }

    /// A star whose center must be set with [`Self::set_center`].
    pub fn add_star(&mut self) -> usize {
        self.add(NodeKind::Star { center: usize::MAX })
    }

    /// Joins `u` and `v` through a new slot on each; returns the two slots.
    pub fn connect(&mut self, u: usize, v: usize) -> (usize, usize) {
        let (su, sv) = (self.ports[u].len(), self.ports[v].len());
        self.ports[u].push((v, sv));
        self.ports[v].push((u, su));
        (su, sv)
    }

    pub fn set_center(&mut self, star: usize, slot: usize) {
        match &mut self.kinds[star] {
            NodeKind::Star { center } => *center = slot,
            other => panic!("node {star} is {other:?}, not a star"),
        }
    }

    /// Joins `star` to `other`, making the new slot of `star` its center.
    pub fn connect_center(&mut self, star: usize, other: usize) -> (usize, usize) {
        let slots = self.connect(star, other);
        self.set_center(star, slots.0);
        slots
    }

    /// A single clique node with leaves `0..k`.
    pub fn single_clique(k: usize) -> Self {
        let mut t = GraphLabeledTree::new();
        let c = t.add_clique();
        for label in 0..k {
            let l = t.add_leaf(label);
            t.connect(c, l);
        }
        t
    }

    /// A single star node with its center on leaf 0 and extremities on `1..k`.
    pub fn single_star(k: usize) -> Self {
        let mut t = GraphLabeledTree::new();
        let s = t.add_star();
        for label in 0..k {
            let l = t.add_leaf(label);
            if label == 0 {
                t.connect_center(s, l);
            } else {
                t.connect(s, l);
            }
        }
        t
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, v: usize) -> NodeKind {
        self.kinds[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.ports[v].len()
    }

    pub fn port(&self, v: usize, slot: usize) -> (usize, usize) {
        self.ports[v][slot]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        matches!(self.kinds[v], NodeKind::Leaf { .. })
    }

    /// `(node, label)` for every leaf.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        self.kinds
            .iter()
            .enumerate()
            .filter_map(|(v, k)| match k {
                NodeKind::Leaf { label } => Some((v, *label)),
                _ => None,
            })
            .collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    pub fn slot_kind(&self, v: usize, slot: usize) -> SlotKind {
        match self.kinds[v] {
            NodeKind::Leaf { .. } => SlotKind::Leaf,
            NodeKind::Clique => SlotKind::Clique,
            NodeKind::Star { center } if center == slot => SlotKind::Center,
            NodeKind::Star { .. } => SlotKind::Extremity,
        }
    }

    /// Adjacency of two distinct slots inside the label of `v`.
    pub fn slots_adjacent(&self, v: usize, a: usize, b: usize) -> bool {
        a != b
            && match self.kinds[v] {
                NodeKind::Leaf { .. } => false,
                NodeKind::Clique => true,
                NodeKind::Star { center } => a == center || b == center,
            }
    }

    /// Checks the slot bijection, tree shape, leaf labels `0..n` and star centers.
    pub fn check(&self) -> Result<(), GltError> {
        let bad = |m: String| Err(GltError::Malformed(m));
        let n = self.kinds.len();
        if n == 0 {
            return bad("no nodes".into());
        }
        let mut degree_sum = 0;
        for v in 0..n {
            degree_sum += self.ports[v].len();
            for (s, &(w, t)) in self.ports[v].iter().enumerate() {
                if w >= n || w == v || t >= self.ports[w].len() || self.ports[w][t] != (v, s) {
                    return bad(format!("slot {s} of node {v} is not matched"));
                }
            }
            match self.kinds[v] {
                NodeKind::Leaf { .. } if self.ports[v].len() != 1 && n > 1 => {
                    return bad(format!("leaf node {v} has degree {}", self.ports[v].len()));
                }
                NodeKind::Clique | NodeKind::Star { .. } if self.ports[v].len() < 2 => {
                    return bad(format!("internal node {v} has degree {}", self.ports[v].len()));
                }
                NodeKind::Star { center } if center >= self.ports[v].len() => {
                    return bad(format!("star node {v} has no valid center"));
                }
                _ => {}
            }
        }
        if degree_sum / 2 != n - 1 {
            return bad(format!("{} edges on {n} nodes", degree_sum / 2));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.ports[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("not connected".into());
        }
        let mut labels: Vec<usize> = self.leaves().into_iter().map(|(_, l)| l).collect();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| i != l) {
            return bad(format!("leaf labels {labels:?} are not 0..{}", labels.len()));
        }
        Ok(())
    }

    /// Internal degrees at least 3, no clique-clique edge, and no edge from a
    /// star center to another star's extremity.
    pub fn is_reduced(&self) -> bool {
        if self.check().is_err() {
            return false;
        }
        (0..self.kinds.len()).all(|v| {
            self.is_leaf(v)
                || self.degree(v) >= 3
                    && self.ports[v].iter().enumerate().all(|(s, &(w, t))| {
                        let pair = (self.slot_kind(v, s), self.slot_kind(w, t));
                        !matches!(
                            pair,
                            (SlotKind::Clique, SlotKind::Clique)
                                | (SlotKind::Center, SlotKind::Extremity)
                                | (SlotKind::Extremity, SlotKind::Center)
                        )
                    })
        })
    }

    /// Every `(node, entry slot)` reachable from `from` by leaving through
    /// `slot` along alternated paths.
    pub fn alternated_reach(&self, from: usize, slot: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![self.ports[from][slot]];
        while let Some((w, q)) = stack.pop() {
            out.push((w, q));
            if self.is_leaf(w) {
                continue;
            }
            for r in 0..self.degree(w) {
                if self.slots_adjacent(w, q, r) {
                    stack.push(self.ports[w][r]);
                }
            }
        }
        out
    }

    fn reached_leaves(&self, from: usize, slot: usize) -> Vec<usize> {
        self.alternated_reach(from, slot)
            .into_iter()
            .filter_map(|(w, _)| match self.kinds[w] {
                NodeKind::Leaf { label } => Some(label),
                _ => None,
            })
            .collect()
    }

    /// The graph on leaf labels defined by alternated paths.
    pub fn accessibility_graph(&self) -> Result<Graph, GltError> {
        self.check()?;
        let leaves = self.leaves();
        let mut g = Graph::empty(leaves.len())?;
        if leaves.len() < 2 {
            return Ok(g);
        }
        for &(v, a) in &leaves {
            for b in self.reached_leaves(v, 0) {
                g.add_edge(a, b);
            }
        }
        Ok(g)
    }

    fn internal_of<F: Fn(NodeKind) -> bool + 'static>(&self, pred: F) -> impl Iterator<Item = usize> + '_ {
        (0..self.kinds.len()).filter(move |&v| pred(self.kinds[v]))
    }

    fn stars(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.kinds.iter().enumerate().filter_map(|(v, k)| match k {
            NodeKind::Star { center } => Some((v, *center)),
            _ => None,
        })
    }

    pub fn has_pattern(&self, pattern: TreePattern) -> Result<bool, GltError> {
        if !self.is_reduced() {
            return Err(GltError::NotReduced);
        }
        let is_clique = |k: NodeKind| k == NodeKind::Clique;
        Ok(match pattern {
            TreePattern::CenterCenterPath => self.stars().any(|(s, c)| {
                self.alternated_reach(s, c)
                    .iter()
                    .any(|&(w, q)| matches!(self.kinds[w], NodeKind::Star { center } if center == q))
            }),
            TreePattern::CliqueCenterPath => {
                self.stars().any(|(s, c)| self.alternated_reach(s, c).iter().any(|&(w, _)| is_clique(self.kinds[w])))
            }
            TreePattern::CliqueDegreeAtLeast(d) => self.internal_of(is_clique).any(|v| self.degree(v) >= d),
            TreePattern::CliqueCliqueAlternated => self.internal_of(is_clique).any(|v| {
                (0..self.degree(v)).any(|s| self.alternated_reach(v, s).iter().any(|&(w, _)| is_clique(self.kinds[w])))
            }),
            TreePattern::StarCenterAndExtremityLeaf => self.stars().any(|(s, c)| {
                self.is_leaf(self.ports[s][c].0)
                    && (0..self.degree(s)).any(|x| x != c && self.is_leaf(self.ports[s][x].0))
            }),
            TreePattern::StarStarExtremityBridge => self.stars().any(|(s, c)| {
                self.is_leaf(self.ports[s][c].0)
                    && self.ports[s].iter().enumerate().any(|(x, &(w, t))| {
                        x != c
                            && matches!(self.kinds[w], NodeKind::Star { center } if center != t
                                && self.is_leaf(self.ports[w][center].0))
                    })
            }),
        })
    }

    fn encode_from(&self, v: usize, parent_slot: Option<usize>) -> String {
        let children = |skip: Option<usize>| -> Vec<String> {
            let mut c: Vec<String> = (0..self.degree(v))
                .filter(|&s| Some(s) != parent_slot && Some(s) != skip)
                .map(|s| {
                    let (w, t) = self.ports[v][s];
                    self.encode_from(w, Some(t))
                })
                .collect();
            c.sort();
            c
        };
        match self.kinds[v] {
            NodeKind::Leaf { .. } => match parent_slot {
                Some(_) => "L".into(),
                None => format!("L[{}]", children(None).join(",")),
            },
            NodeKind::Clique => format!("K({})", children(None).join(",")),
            NodeKind::Star { center } => {
                if parent_slot == Some(center) {
                    format!("C({})", children(None).join(","))
                } else {
                    let (w, t) = self.ports[v][center];
                    let head = if parent_slot.is_none() { "S" } else { "X" };
                    format!("{head}[{}]({})", self.encode_from(w, Some(t)), children(Some(center)).join(","))
                }
            }
        }
    }

    /// Node or edge at the middle of a longest path.
    fn centers(&self) -> Vec<usize> {
        let n = self.kinds.len();
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut remaining = n;
        let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &(w, _) in &self.ports[v] {
                    if deg[w] > 1 {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
                deg[v] = 0;
            }
            layer = next;
        }
        let mut c: Vec<usize> = (0..n).filter(|&v| deg[v] > 0 || remaining == n && n <= 2).collect();
        if c.is_empty() {
            c = layer;
        }
        c
    }

    /// Encoding equal for two trees iff they are isomorphic as unlabeled
    /// clique-star trees (leaf labels ignored, star centers respected).
    pub fn canonical_encoding(&self) -> String {
        match self.centers().as_slice() {
            [v] => self.encode_from(*v, None),
            [u, v] => {
                let s = self.ports[*u].iter().position(|&(w, _)| w == *v).expect("central edge");
                let t = self.ports[*u][s].1;
                let mut halves = [self.encode_from(*u, Some(s)), self.encode_from(*v, Some(t))];
                halves.sort();
                format!("{}={}", halves[0], halves[1])
            }
            _ => unreachable!("a tree has one or two centers"),
        }
    }

    pub fn to_json_value(&self) -> TreeJson {
        let nodes = self
            .kinds
            .iter()
            .map(|k| match *k {
                NodeKind::Leaf { label } => NodeJson::Leaf { label },
                NodeKind::Clique => NodeJson::Clique,
                NodeKind::Star { center } => NodeJson::Star { center },
            })
            .collect();
        let mut edges = Vec::new();
        for (v, ports) in self.ports.iter().enumerate() {
            for (s, &(w, t)) in ports.iter().enumerate() {
                if v < w {
                    edges.push(EdgeJson { a: v, a_slot: s, b: w, b_slot: t });
                }
            }
        }
        TreeJson { nodes, edges }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("trees always serialise")
    }

    pub fn from_json_value(j: &TreeJson) -> Result<Self, GltError> {
        let n = j.nodes.len();
        let mut slots: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new(); n];
        for e in &j.edges {
            for (v, s, w, t) in [(e.a, e.a_slot, e.b, e.b_slot), (e.b, e.b_slot, e.a, e.a_slot)] {
                if v >= n || w >= n {
                    return Err(GltError::Json(format!("edge endpoint {} out of range", v.max(w))));
                }
                if slots[v].len() <= s {
                    slots[v].resize(s + 1, None);
                }
                if slots[v][s].replace((w, t)).is_some() {
                    return Err(GltError::Json(format!("slot {s} of node {v} used twice")));
                }
            }
        }
        let ports = slots
            .into_iter()
            .enumerate()
            .map(|(v, ss)| {
                ss.into_iter()
                    .enumerate()
                    .map(|(s, p)| p.ok_or_else(|| GltError::Json(format!("slot {s} of node {v} is unused"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let kinds = j
            .nodes
            .iter()
            .map(|k| match *k {
                NodeJson::Leaf { label } => NodeKind::Leaf { label },
                NodeJson::Clique => NodeKind::Clique,
                NodeJson::Star { center } => NodeKind::Star { center },
            })
            .collect();
        let t = GraphLabeledTree { kinds, ports };
        t.check()?;
        Ok(t)
    }

    pub fn from_json(text: &str) -> Result<Self, GltError> {
        let j: TreeJson = serde_json::from_str(text).map_err(|e| GltError::Json(e.to_string()))?;
        Self::from_json_value(&j)
    }
}

/// Serialized tree: nodes in id order, each edge once with the slot used at
/// both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeJson {
    Leaf { label: usize },
    Clique,
    Star { center: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub a: usize,
    pub a_slot: usize,
    pub b: usize,
    pub b_slot: usize,
}

/// Tree patterns that mirror forbidden induced subgraphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreePattern {
    /// An alternated path joining the centers of two stars.
    CenterCenterPath,
    /// An alternated path from a star center to a clique node.
    CliqueCenterPath,
    CliqueDegreeAtLeast(usize),
    /// An alternated path between two clique nodes.
    CliqueCliqueAlternated,
    /// A star with its center and one extremity on leaves.
    StarCenterAndExtremityLeaf,
    /// Two stars joined extremity to extremity, both centers on leaves.
    StarStarExtremityBridge,
}

/// Structural constraints for tree generation, one per graph class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreePolicy {
    /// Every reduced clique-star tree.
    DistanceHereditary,
    /// Star centers only on leaves.
    Block,
    /// No center-center paths.
    Ptolemaic,
    /// Block, with cliques of degree exactly 3.
    Cactus23,
    /// 2,3-cactus, with star extremities only on cliques.
    Cactus3,
    /// No cliques; stars either pair up center to center with two
    /// extremities each, or have their center on a leaf.
    Cactus4,
}

impl TreePolicy {
    pub const ALL: [TreePolicy; 6] = [
        TreePolicy::DistanceHereditary,
        TreePolicy::Block,
        TreePolicy::Ptolemaic,
        TreePolicy::Cactus23,
        TreePolicy::Cactus3,
        TreePolicy::Cactus4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TreePolicy::DistanceHereditary => "distance_hereditary",
            TreePolicy::Block => "block",
            TreePolicy::Ptolemaic => "ptolemaic",
            TreePolicy::Cactus23 => "cactus23",
            TreePolicy::Cactus3 => "cactus3",
            TreePolicy::Cactus4 => "cactus4",
        }
    }
}

impl fmt::Display for TreePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for TreePolicy {
    type Err = GltError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TreePolicy::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| GltError::UnknownPolicy(s.to_string()))
    }
}

impl From<crate::classes::ClassName> for TreePolicy {
    fn from(c: crate::classes::ClassName) -> Self {
        use crate::classes::ClassName;
        match c {
            ClassName::Block => TreePolicy::Block,
            ClassName::Ptolemaic => TreePolicy::Ptolemaic,
            ClassName::Cactus23 => TreePolicy::Cactus23,
            ClassName::Cactus3 => TreePolicy::Cactus3,
            ClassName::Cactus4 => TreePolicy::Cactus4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Top {
    Leaf,
    Clique,
    /// Star attached to its parent through its center.
    StarC,
    /// Star attached to its parent through an extremity.
    StarX,
}

/// Star roles for 4-cacti: `Q` stars pair up center to center, `R` stars
/// have their center on a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Plain,
    Q,
    R,
}

/// A subtree hanging from a parent edge. For `StarX` the first child is the
/// one on the center slot.
#[derive(Debug)]
struct Shape {
    top: Top,
    role: Role,
    size: usize,
    /// An alternated path from the parent edge ends at a star center.
    hot: bool,
    children: Vec<usize>,
}

impl Shape {
    fn top_slot(&self) -> SlotKind {
        match self.top {
            Top::Leaf => SlotKind::Leaf,
            Top::Clique => SlotKind::Clique,
            Top::StarC => SlotKind::Center,
            Top::StarX => SlotKind::Extremity,
        }
    }
}

fn edge_allowed(policy: TreePolicy, parent: SlotKind, parent_role: Role, child: &Shape) -> bool {
    use SlotKind::*;
    let c = child.top_slot();
    if matches!((parent, c), (Clique, Clique) | (Center, Extremity) | (Extremity, Center)) {
        return false;
    }
    let centers_on_leaves = !(parent == Center && c != Leaf) && !(c == Center && parent != Leaf);
    match policy {
        TreePolicy::DistanceHereditary | TreePolicy::Ptolemaic => true,
        TreePolicy::Block | TreePolicy::Cactus23 => centers_on_leaves,
        TreePolicy::Cactus3 => {
            centers_on_leaves && !(parent == Extremity && c != Clique) && !(c == Extremity && parent != Clique)
        }
        TreePolicy::Cactus4 => match (parent, c) {
            (Leaf, Center) => child.role == Role::R,
            (Leaf, Extremity) => child.role == Role::Q,
            (Center, Leaf) => parent_role == Role::R,
            (Center, Center) => parent_role == Role::Q && child.role == Role::Q,
            (Extremity, Leaf) => parent_role == Role::Q,
            (Extremity, Extremity) => (parent_role == Role::Q) != (child.role == Role::Q),
            _ => false,
        },
    }
}

/// Calls `f` with every nondecreasing sequence of candidates whose sizes sum
/// to `remaining`, with length in `min..=max`.
#[allow(clippy::too_many_arguments)]
fn multisets(
    shapes: &[Shape],
    cands: &[usize],
    start: usize,
    remaining: usize,
    min: usize,
    max: usize,
    cur: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        if cur.len() >= min {
            f(cur);
        }
        return;
    }
    if cur.len() == max {
        return;
    }
    for i in start..cands.len() {
        let s = shapes[cands[i]].size;
        if s > remaining {
            break;
        }
        if cur.len() + 1 == max && s != remaining {
            continue;
        }
        cur.push(cands[i]);
        multisets(shapes, cands, i, remaining - s, min, max, cur, f);
        cur.pop();
    }
}

fn build_shapes(policy: TreePolicy, max_size: usize) -> Vec<Shape> {
    let mut shapes = vec![Shape { top: Top::Leaf, role: Role::Plain, size: 1, hot: false, children: vec![] }];
    let roles: &[Role] = if policy == TreePolicy::Cactus4 { &[Role::Q, Role::R] } else { &[Role::Plain] };
    let ptolemaic = policy == TreePolicy::Ptolemaic;
    for m in 2..=max_size {
        let mut fresh = Vec::new();
        let cands = |shapes: &[Shape], slot: SlotKind, role: Role| -> Vec<usize> {
            (0..shapes.len()).filter(|&i| shapes[i].size < m && edge_allowed(policy, slot, role, &shapes[i])).collect()
        };
        if policy != TreePolicy::Cactus4 {
            let max = if matches!(policy, TreePolicy::Cactus23 | TreePolicy::Cactus3) { 2 } else { usize::MAX };
            let c = cands(&shapes, SlotKind::Clique, Role::Plain);
            multisets(&shapes, &c, 0, m, 2, max, &mut Vec::new(), &mut |kids| {
                let hot = kids.iter().filter(|&&k| shapes[k].hot).count();
                if ptolemaic && hot > 1 {
                    return;
                }
                fresh.push(Shape {
                    top: Top::Clique,
                    role: Role::Plain,
                    size: m,
                    hot: hot > 0,
                    children: kids.to_vec(),
                });
            });
        }
        for &role in roles {
            let max = if role == Role::Q { 2 } else { usize::MAX };
            let c = cands(&shapes, SlotKind::Extremity, role);
            multisets(&shapes, &c, 0, m, 2, max, &mut Vec::new(), &mut |kids| {
                fresh.push(Shape { top: Top::StarC, role, size: m, hot: true, children: kids.to_vec() });
            });
        }
        for &role in roles {
            let max = if role == Role::Q { 1 } else { usize::MAX };
            let ext = cands(&shapes, SlotKind::Extremity, role);
            for center in cands(&shapes, SlotKind::Center, role) {
                if ptolemaic && shapes[center].hot {
                    continue;
                }
                let rest = m - shapes[center].size;
                multisets(&shapes, &ext, 0, rest, 1, max, &mut vec![], &mut |kids| {
                    let mut children = vec![center];
                    children.extend_from_slice(kids);
                    fresh.push(Shape { top: Top::StarX, role, size: m, hot: false, children });
                });
            }
        }
        shapes.extend(fresh);
    }
    shapes
}

fn materialize(shapes: &[Shape], id: usize, t: &mut GraphLabeledTree, next_label: &mut usize) -> usize {
    let shape = &shapes[id];
    let v = match shape.top {
        Top::Leaf => {
            *next_label += 1;
            return t.add_leaf(*next_label - 1);
        }
        Top::Clique => t.add_clique(),
        Top::StarC | Top::StarX => t.add_star(),
    };
    for (i, &c) in shape.children.iter().enumerate() {
        let w = materialize(shapes, c, t, next_label);
        let (sv, sw) = t.connect(v, w);
        if shape.top == Top::StarX && i == 0 {
            t.set_center(v, sv);
        }
        if shapes[c].top == Top::StarC {
            t.set_center(w, sw);
        }
    }
    v
}

/// Every reduced clique-star tree with `n_leaves` leaves satisfying
/// `policy`, one per isomorphism class, leaves labelled `0..n_leaves`.
pub fn generate_trees(n_leaves: usize, policy: TreePolicy) -> Result<Vec<GraphLabeledTree>, GltError> {
    if !(MIN_GENERATED_LEAVES..=MAX_GENERATED_LEAVES).contains(&n_leaves) {
        return Err(GltError::LeafCount { n: n_leaves, min: MIN_GENERATED_LEAVES, max: MAX_GENERATED_LEAVES });
    }
    let shapes = build_shapes(policy, n_leaves - 1);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (id, shape) in shapes.iter().enumerate() {
        if shape.size != n_leaves - 1 || !edge_allowed(policy, SlotKind::Leaf, Role::Plain, shape) {
            continue;
        }
        let mut t = GraphLabeledTree::new();
        let root = t.add_leaf(0);
        let mut next = 1;
        let v = materialize(&shapes, id, &mut t, &mut next);
        let (_, sv) = t.connect(root, v);
        if shape.top == Top::StarC {
            t.set_center(v, sv);
        }
        if seen.insert(t.canonical_encoding()) {
            out.push(t);
        }
    }
    Ok(out)
}

/// Lemmas on alternated paths, checked on one tree:
/// maximal alternated paths stop only at leaves; paths leaving a node through
/// distinct slots reach disjoint nonempty leaf sets; a clique node of degree
/// `d` yields a clique on `d` vertices.
pub fn check_path_lemmas(t: &GraphLabeledTree) -> Result<(), String> {
    let g = t.accessibility_graph().map_err(|e| e.to_string())?;
    for v in 0..t.node_count() {
        if t.is_leaf(v) {
            continue;
        }
        let mut owner = vec![usize::MAX; t.leaf_count()];
        let mut witnesses = Vec::new();
        for s in 0..t.degree(v) {
            let reach = t.alternated_reach(v, s);
            for &(w, q) in &reach {
                if !t.is_leaf(w) && !(0..t.degree(w)).any(|r| t.slots_adjacent(w, q, r)) {
                    return Err(format!("alternated path from node {v} slot {s} stops at internal node {w}"));
                }
            }
            let leaves = t.reached_leaves(v, s);
            let Some(&first) = leaves.first() else {
                return Err(format!("no leaf reached from node {v} slot {s}"));
            };
            witnesses.push(first);
            for l in leaves {
                if owner[l] != usize::MAX {
                    return Err(format!("leaf {l} reached from slots {} and {s} of node {v}", owner[l]));
                }
                owner[l] = s;
            }
        }
        if t.kind(v) == NodeKind::Clique {
            for (i, &a) in witnesses.iter().enumerate() {
                for &b in &witnesses[i + 1..] {
                    if !g.has_edge(a, b) {
                        return Err(format!("clique node {v}: leaves {a} and {b} are not adjacent"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the forbidden-pattern equivalences over every reduced tree of
/// one size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub leaves: usize,
    pub trees: usize,
    /// Counterexamples per equivalence: C4, diamond, K4, pendant, bridge, paths.
    pub failures: Vec<String>,
}

/// Checks, on every reduced clique-star tree with `n` leaves, that each
/// induced pattern occurs in the accessibility graph iff the matching tree
/// pattern occurs, plus [`check_path_lemmas`].
pub fn check_lemma_suite(n: usize) -> Result<LemmaReport, GltError> {
    let trees = generate_trees(n, TreePolicy::DistanceHereditary)?;
    let mut failures = Vec::new();
    for t in &trees {
        let g = t.accessibility_graph()?;
        let p = |pat| t.has_pattern(pat);
        let checks = [
            ("C4", has_induced(&g, Pattern::C4), p(TreePattern::CenterCenterPath)?),
            ("diamond", has_induced(&g, Pattern::Diamond), p(TreePattern::CliqueCenterPath)?),
            (
                "K4",
                has_induced(&g, Pattern::K4Plus),
                p(TreePattern::CliqueDegreeAtLeast(4))? || p(TreePattern::CliqueCliqueAlternated)?,
            ),
            ("pendant", has_pendant_edge(&g)?, p(TreePattern::StarCenterAndExtremityLeaf)?),
            (
                "bridge",
                has_bridge(&g)?,
                p(TreePattern::StarCenterAndExtremityLeaf)? || p(TreePattern::StarStarExtremityBridge)?,
            ),
        ];
        for (name, in_graph, in_tree) in checks {
            if in_graph != in_tree {
                failures.push(format!("{name}: graph {in_graph}, tree {in_tree} on {}", t.canonical_encoding()));
            }
        }
        if let Err(e) = check_path_lemmas(t) {
            failures.push(format!("paths: {e} on {}", t.canonical_encoding()));
        }
    }
    Ok(LemmaReport { leaves: n, trees: trees.len(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{canonical_mask, is_member, GraphClass};
    use std::collections::BTreeSet;

    /// Two degree-3 stars joined center to center, leaves on the extremities.
    fn c4_tree() -> GraphLabeledTree {
        let mut t = GraphLabeledTree::new();
        let (s1, s2) = (t.add_star(), t.add_star());
        let (a, b) = t.connect(s1, s2);
        t.set_center(s1, a);
        t.set_center(s2, b);
        for (star, labels) in [(s1, [0, 1]), (s2, [2, 3])] {
            for l in labels {
                let leaf = t.add_leaf(l);
                t.connect(star, leaf);
            }
        }
        t
    }

    /// A star whose center meets a clique with two leaves.
    fn diamond_tree() -> GraphLabeledTree {
        let mut t = GraphLabeledTree::new();
        let (s, c) = (t.add_star(), t.add_clique());
        t.connect_center(s, c);
        for l in 0..2 {
            let leaf = t.add_leaf(l);
            t.connect(s, leaf);
        }
        for l in 2..4 {
            let leaf = t.add_leaf(l);
            t.connect(c, leaf);
        }
        t
    }

    #[test]
    fn reduced_examples() {
        assert!(GraphLabeledTree::single_clique(3).is_reduced());
        let mut t = GraphLabeledTree::new();
        let (c1, c2) = (t.add_clique(), t.add_clique());
        t.connect(c1, c2);
        for (c, l) in [(c1, 0), (c1, 1), (c2, 2), (c2, 3)] {
            let leaf = t.add_leaf(l);
            t.connect(c, leaf);
        }
        assert!(t.check().is_ok());
        assert!(!t.is_reduced());

        let mut t = GraphLabeledTree::new();
        let (s1, s2) = (t.add_star(), t.add_star());
        t.connect_center(s1, s2);
        let l0 = t.add_leaf(0);
        t.connect_center(s2, l0);
        for (s, l) in [(s1, 1), (s1, 2), (s2, 3)] {
            let leaf = t.add_leaf(l);
            t.connect(s, leaf);
        }
        assert!(t.check().is_ok());
        assert!(!t.is_reduced());
        assert_eq!(t.has_pattern(TreePattern::CenterCenterPath), Err(GltError::NotReduced));
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let mut t = GraphLabeledTree::new();
        let s = t.add_star();
        for l in 0..3 {
            let leaf = t.add_leaf(l);
            t.connect(s, leaf);
        }
        assert!(matches!(t.check(), Err(GltError::Malformed(_))));
        let mut t = GraphLabeledTree::single_clique(3);
        t.add_leaf(5);
        assert!(t.check().is_err());
    }

    #[test]
    fn accessibility_examples() {
        let k3 = GraphLabeledTree::single_clique(3).accessibility_graph().unwrap();
        assert_eq!(k3, Graph::complete(3));
        let p3 = GraphLabeledTree::single_star(3).accessibility_graph().unwrap();
        assert_eq!(p3, Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap());
        let c4 = c4_tree().accessibility_graph().unwrap();
        assert_eq!(c4, Graph::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap());
        assert!(has_induced(&c4, Pattern::C4));
    }

    #[test]
    fn pattern_examples() {
        assert!(c4_tree().has_pattern(TreePattern::CenterCenterPath).unwrap());
        assert!(diamond_tree().has_pattern(TreePattern::CliqueCenterPath).unwrap());
        assert!(has_induced(&diamond_tree().accessibility_graph().unwrap(), Pattern::Diamond));
        assert!(GraphLabeledTree::single_star(3).has_pattern(TreePattern::StarCenterAndExtremityLeaf).unwrap());
        assert!(!GraphLabeledTree::single_clique(4).has_pattern(TreePattern::CliqueCliqueAlternated).unwrap());
        assert!(GraphLabeledTree::single_clique(4).has_pattern(TreePattern::CliqueDegreeAtLeast(4)).unwrap());
    }

    #[test]
    fn json_round_trip() {
        for t in [c4_tree(), diamond_tree(), GraphLabeledTree::single_star(4)] {
            let back = GraphLabeledTree::from_json(&t.to_json()).unwrap();
            assert_eq!(back, t);
        }
        let text = r#"{"nodes":[{"kind":"clique"},{"kind":"leaf","label":0},{"kind":"leaf","label":1},{"kind":"leaf","label":2}],
            "edges":[{"a":0,"a_slot":0,"b":1,"b_slot":0},{"a":0,"a_slot":1,"b":2,"b_slot":0},{"a":0,"a_slot":2,"b":3,"b_slot":0}]}"#;
        let t = GraphLabeledTree::from_json(text).unwrap();
        assert_eq!(t.accessibility_graph().unwrap(), Graph::complete(3));
        let bad =
            r#"{"nodes":[{"kind":"clique"},{"kind":"leaf","label":0}],"edges":[{"a":0,"a_slot":1,"b":1,"b_slot":0}]}"#;
        assert!(GraphLabeledTree::from_json(bad).is_err());
    }

    #[test]
    fn canonical_encoding_ignores_labels_and_slot_order() {
        let mut t = GraphLabeledTree::new();
        let l3 = t.add_leaf(3);
        let s2 = t.add_star();
        t.connect(s2, l3);
        let l2 = t.add_leaf(2);
        t.connect(s2, l2);
        let s1 = t.add_star();
        let (a, b) = t.connect(s2, s1);
        t.set_center(s2, a);
        t.set_center(s1, b);
        for l in [1, 0] {
            let leaf = t.add_leaf(l);
            t.connect(s1, leaf);
        }
        assert_eq!(t.canonical_encoding(), c4_tree().canonical_encoding());
        assert_ne!(
            GraphLabeledTree::single_star(3).canonical_encoding(),
            GraphLabeledTree::single_clique(3).canonical_encoding()
        );
    }

    #[test]
    fn generation_examples() {
        let block3 = generate_trees(3, TreePolicy::Block).unwrap();
        assert_eq!(block3.len(), 2);
        let graphs: BTreeSet<u64> =
            block3.iter().map(|t| canonical_mask(&t.accessibility_graph().unwrap()).unwrap()).collect();
        let want: BTreeSet<u64> =
            [Graph::complete(3), Graph::path(3)].iter().map(|g| canonical_mask(g).unwrap()).collect();
        assert_eq!(graphs, want);
        assert_eq!(generate_trees(4, TreePolicy::Block).unwrap().len(), 4);
        assert!(generate_trees(4, TreePolicy::Cactus3).unwrap().is_empty());
        assert_eq!(generate_trees(5, TreePolicy::Cactus3).unwrap().len(), 1);
        assert!(matches!(generate_trees(2, TreePolicy::Block), Err(GltError::LeafCount { .. })));
        assert!(matches!(generate_trees(9, TreePolicy::Block), Err(GltError::LeafCount { .. })));
    }

    #[test]
    fn generated_trees_are_reduced_and_distinct_graphs() {
        for policy in TreePolicy::ALL {
            for n in 3..=6 {
                let trees = generate_trees(n, policy).unwrap();
                let mut forms = BTreeSet::new();
                for t in &trees {
                    assert!(t.is_reduced(), "{policy} {n}");
                    assert_eq!(t.leaf_count(), n);
                    let g = t.accessibility_graph().unwrap();
                    assert!(g.is_connected());
                    assert!(forms.insert(canonical_mask(&g).unwrap()), "{policy} {n}: repeated graph");
                }
            }
        }
    }

    #[test]
    fn unconstrained_trees_give_distance_hereditary_graphs() {
        // connected distance-hereditary graphs on 3..6 vertices: 2, 6, 18, 73
        for (n, want) in [(3, 2), (4, 6), (5, 18), (6, 73)] {
            let trees = generate_trees(n, TreePolicy::DistanceHereditary).unwrap();
            assert_eq!(trees.len(), want, "n = {n}");
            for t in &trees {
                assert!(is_member(&t.accessibility_graph().unwrap(), GraphClass::DistanceHereditary).unwrap());
            }
        }
    }

    #[test]
    fn lemma_suite_small() {
        for n in 3..=5 {
            let report = check_lemma_suite(n).unwrap();
            assert!(report.failures.is_empty(), "{:?}", report.failures);
        }
    }

    #[test]
    fn policy_names() {
        for p in TreePolicy::ALL {
            assert_eq!(p.as_str().parse::<TreePolicy>().unwrap(), p);
        }
        assert!("dh".parse::<TreePolicy>().is_err());
    }
}
