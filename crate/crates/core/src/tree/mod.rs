//! Exact algorithms on explicit finite acyclic graphs.
//!
//! Half-spaces, the containment order on directed edges, coherent edge sets
//! and their transversals, Helly common vertices, convex hulls,
//! lexicographically least paths and weighted pruning. Every operation checks
//! its preconditions and reports violations with a witness.
//!
//! Vertex identifiers are opaque and totally ordered; whenever an operation
//! may return "any" vertex it returns the least one.

mod format;

pub use format::{parse_tree_document, FormatError, TreeDocument};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(String),
    #[error("edge endpoint {0} is not a listed vertex")]
    UnknownVertex(String),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(String, String),
    #[error("edge {{{0}, {1}}} closes a cycle")]
    Cycle(String, String),
    #[error("({0} -> {1}) is not an edge of the tree")]
    InvalidEdge(String, String),
    #[error("edges {0} and {1} are not coherent: their terminus half-spaces are disjoint")]
    NotCoherent(String, String),
    #[error("family members {0} and {1} do not intersect")]
    NotPairwiseIntersecting(usize, usize),
    #[error("empty subtree family")]
    EmptyFamily,
    #[error("family member {0} is empty or does not induce a connected subgraph")]
    NotSubtree(usize),
    #[error("no path from {0} to the target set")]
    NoPath(String),
    #[error("improper edge coloring: edges {0} and {1} share a vertex and the color {2}")]
    ImproperColoring(String, String, u64),
    #[error("edge {0} has no color")]
    MissingColor(String),
    #[error("vertex set is not convex: {0} lies on a geodesic between members")]
    NotConvex(String),
    #[error("vertex {0} has no weight")]
    MissingWeight(String),
    #[error("vertex {0} has a non-positive weight")]
    NonPositiveWeight(String),
}

fn show<V: Debug>(v: &V) -> String {
    format!("{v:?}")
}

/// A finite acyclic graph (a forest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree<V: Ord> {
    adj: BTreeMap<V, BTreeSet<V>>,
}

/// An ordered pair of adjacent vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DirectedEdge<V> {
    pub origin: V,
    pub terminus: V,
}

impl<V: Clone> DirectedEdge<V> {
    pub fn new(origin: V, terminus: V) -> Self {
        DirectedEdge { origin, terminus }
    }

    pub fn inverse(&self) -> Self {
        DirectedEdge::new(self.terminus.clone(), self.origin.clone())
    }
}

impl<V: Debug> DirectedEdge<V> {
    fn label(&self) -> String {
        format!("({:?} -> {:?})", self.origin, self.terminus)
    }
}

fn undirected<V: Ord + Clone>(u: &V, v: &V) -> (V, V) {
    if u <= v {
        (u.clone(), v.clone())
    } else {
        (v.clone(), u.clone())
    }
}

/// Natural-number colors on undirected edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeColoring<V: Ord> {
    colors: BTreeMap<(V, V), u64>,
}

impl<V: Ord + Clone> EdgeColoring<V> {
    pub fn new() -> Self {
        EdgeColoring {
            colors: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, u: &V, v: &V, color: u64) {
        self.colors.insert(undirected(u, v), color);
    }

    pub fn get(&self, u: &V, v: &V) -> Option<u64> {
        self.colors.get(&undirected(u, v)).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// Positive rational vertex weights.
pub type VertexWeights<V> = BTreeMap<V, BigRational>;

/// A list of vertex subsets, each expected to induce a connected subgraph.
pub type SubtreeFamily<V> = Vec<BTreeSet<V>>;

impl<V: Ord + Clone + Debug> FiniteTree<V> {
    /// Builds a forest, rejecting self-loops, unknown endpoints, duplicate
    /// edges and cycles.
    pub fn new(
        vertices: impl IntoIterator<Item = V>,
        edges: impl IntoIterator<Item = (V, V)>,
    ) -> Result<Self, TreeError> {
        let mut adj: BTreeMap<V, BTreeSet<V>> =
            vertices.into_iter().map(|v| (v, BTreeSet::new())).collect();
        // union-find over vertex positions to detect cycles
        let index: BTreeMap<V, usize> = adj.keys().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..index.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (u, v) in edges {
            if u == v {
                return Err(TreeError::SelfLoop(show(&u)));
            }
            let (&iu, &iv) = match (index.get(&u), index.get(&v)) {
                (Some(a), Some(b)) => (a, b),
                (None, _) => return Err(TreeError::UnknownVertex(show(&u))),
                (_, None) => return Err(TreeError::UnknownVertex(show(&v))),
            };
            if adj[&u].contains(&v) {
                return Err(TreeError::DuplicateEdge(show(&u), show(&v)));
            }
            let (ru, rv) = (find(&mut parent, iu), find(&mut parent, iv));
            if ru == rv {
                return Err(TreeError::Cycle(show(&u), show(&v)));
            }
            parent[ru] = rv;
            adj.get_mut(&u).unwrap().insert(v.clone());
            adj.get_mut(&v).unwrap().insert(u);
        }
        Ok(FiniteTree { adj })
    }

    pub fn vertices(&self) -> impl Iterator<Item = &V> {
        self.adj.keys()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn contains(&self, v: &V) -> bool {
        self.adj.contains_key(v)
    }

    /// Undirected edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(V, V)> {
        self.adj
            .iter()
            .flat_map(|(u, ns)| ns.iter().filter(move |v| u < *v).map(move |v| (u.clone(), v.clone())))
            .collect()
    }

    /// Both orientations of every edge.
    pub fn directed_edges(&self) -> Vec<DirectedEdge<V>> {
        self.adj
            .iter()
            .flat_map(|(u, ns)| ns.iter().map(move |v| DirectedEdge::new(u.clone(), v.clone())))
            .collect()
    }

    pub fn neighbors(&self, v: &V) -> impl Iterator<Item = &V> {
        self.adj.get(v).into_iter().flatten()
    }

    pub fn has_edge(&self, u: &V, v: &V) -> bool {
        self.adj.get(u).is_some_and(|ns| ns.contains(v))
    }

    fn check_edge(&self, e: &DirectedEdge<V>) -> Result<(), TreeError> {
        if self.has_edge(&e.origin, &e.terminus) {
            Ok(())
        } else {
            Err(TreeError::InvalidEdge(show(&e.origin), show(&e.terminus)))
        }
    }

    /// The connected component of `v`.
    pub fn component(&self, v: &V) -> BTreeSet<V> {
        self.reach(v, None)
    }

    /// Vertices reachable from `start` without traversing the undirected edge `cut`.
    fn reach(&self, start: &V, cut: Option<(&V, &V)>) -> BTreeSet<V> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start.clone());
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(&u) {
                if let Some((a, b)) = cut {
                    if (&u == a && w == b) || (&u == b && w == a) {
                        continue;
                    }
                }
                if seen.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
        seen
    }

    /// The half-space `V^o(e)`: the component of `origin(e)` once the edge is removed.
    pub fn half_space(&self, e: &DirectedEdge<V>) -> Result<BTreeSet<V>, TreeError> {
        self.check_edge(e)?;
        Ok(self.reach(&e.origin, Some((&e.origin, &e.terminus))))
    }

    /// The unique geodesic from `x` to `y`, or `None` if they lie in different components.
    pub fn geodesic(&self, x: &V, y: &V) -> Option<Vec<V>> {
        let mut prev: BTreeMap<V, V> = BTreeMap::new();
        let mut queue = VecDeque::from([x.clone()]);
        prev.insert(x.clone(), x.clone());
        while let Some(u) = queue.pop_front() {
            if &u == y {
                let mut path = vec![u.clone()];
                let mut cur = u;
                while &cur != x {
                    cur = prev[&cur].clone();
                    path.push(cur.clone());
                }
                path.reverse();
                return Some(path);
            }
            for w in self.neighbors(&u) {
                if !prev.contains_key(w) {
                    prev.insert(w.clone(), u.clone());
                    queue.push_back(w.clone());
                }
            }
        }
        None
    }

    fn index(&self) -> RootedIndex<V> {
        RootedIndex::new(self)
    }
}

/// Euler-tour index of a forest, each component rooted at its least vertex.
/// Every half-space is either a rooted subtree or the complement of one
/// within its component, which makes containment and intersection tests O(1).
struct RootedIndex<V: Ord> {
    parent: BTreeMap<V, Option<V>>,
    depth: BTreeMap<V, usize>,
    tin: BTreeMap<V, usize>,
    tout: BTreeMap<V, usize>,
    root_of: BTreeMap<V, V>,
}

/// A half-space in rooted form.
enum Side<'a, V> {
    /// The subtree below the given vertex.
    Below(&'a V),
    /// The component minus the subtree below the given vertex.
    Above(&'a V),
}

impl<V> Clone for Side<'_, V> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<V> Copy for Side<'_, V> {}

impl<V: Ord + Clone + Debug> RootedIndex<V> {
    fn new(tree: &FiniteTree<V>) -> Self {
        let mut idx = RootedIndex {
            parent: BTreeMap::new(),
            depth: BTreeMap::new(),
            tin: BTreeMap::new(),
            tout: BTreeMap::new(),
            root_of: BTreeMap::new(),
        };
        let mut clock = 0usize;
        for root in tree.vertices() {
            if idx.parent.contains_key(root) {
                continue;
            }
            idx.parent.insert(root.clone(), None);
            idx.depth.insert(root.clone(), 0);
            // iterative DFS: (vertex, neighbor list, next position)
            let mut stack: Vec<(V, Vec<V>, usize)> = vec![(root.clone(), tree.neighbors(root).cloned().collect(), 0)];
            idx.tin.insert(root.clone(), clock);
            idx.root_of.insert(root.clone(), root.clone());
            clock += 1;
            while let Some((u, ns, pos)) = stack.last_mut() {
                if *pos < ns.len() {
                    let w = ns[*pos].clone();
                    *pos += 1;
                    if idx.parent.contains_key(&w) {
                        continue;
                    }
                    let u = u.clone();
                    idx.parent.insert(w.clone(), Some(u.clone()));
                    idx.depth.insert(w.clone(), idx.depth[&u] + 1);
                    idx.tin.insert(w.clone(), clock);
                    idx.root_of.insert(w.clone(), root.clone());
                    clock += 1;
                    let wn = tree.neighbors(&w).cloned().collect();
                    stack.push((w, wn, 0));
                } else {
                    idx.tout.insert(u.clone(), clock);
                    stack.pop();
                }
            }
        }
        idx
    }

    /// `a` lies in the subtree below `b`.
    fn below(&self, a: &V, b: &V) -> bool {
        self.tin[b] <= self.tin[a] && self.tin[a] < self.tout[b]
    }

    fn same_component(&self, a: &V, b: &V) -> bool {
        self.root_of[a] == self.root_of[b]
    }

    /// Rooted form of `V^o(e)`.
    fn side<'a>(&self, e: &'a DirectedEdge<V>) -> Side<'a, V> {
        if self.parent[&e.origin].as_ref() == Some(&e.terminus) {
            Side::Below(&e.origin)
        } else {
            Side::Above(&e.terminus)
        }
    }

    /// `a ⊆ b` for half-spaces of the same forest.
    fn subset(&self, a: Side<'_, V>, b: Side<'_, V>) -> bool {
        let (ca, cb) = match (a, b) {
            (Side::Below(x) | Side::Above(x), Side::Below(y) | Side::Above(y)) => (x, y),
        };
        if !self.same_component(ca, cb) {
            return false;
        }
        match (a, b) {
            (Side::Below(x), Side::Below(y)) => self.below(x, y),
            (Side::Below(x), Side::Above(y)) => !self.below(x, y) && !self.below(y, x),
            // the complement of a subtree contains the root, which no subtree below a child does
            (Side::Above(_), Side::Below(_)) => false,
            (Side::Above(x), Side::Above(y)) => self.below(y, x),
        }
    }

    fn intersect(&self, a: Side<'_, V>, b: Side<'_, V>) -> bool {
        let (ca, cb) = match (a, b) {
            (Side::Below(x) | Side::Above(x), Side::Below(y) | Side::Above(y)) => (x, y),
        };
        if !self.same_component(ca, cb) {
            return false;
        }
        match (a, b) {
            (Side::Below(x), Side::Below(y)) => self.below(x, y) || self.below(y, x),
            (Side::Below(x), Side::Above(y)) | (Side::Above(y), Side::Below(x)) => !self.below(x, y),
            (Side::Above(_), Side::Above(_)) => true,
        }
    }
}

/// The half-space `V^o(e)`.
pub fn half_space<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    e: &DirectedEdge<V>,
) -> Result<BTreeSet<V>, TreeError> {
    tree.half_space(e)
}

/// `e0 ≤ e1` iff `V^o(e0) ⊆ V^o(e1)`.
pub fn edge_leq<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    e0: &DirectedEdge<V>,
    e1: &DirectedEdge<V>,
) -> Result<bool, TreeError> {
    tree.check_edge(e0)?;
    tree.check_edge(e1)?;
    let idx = tree.index();
    Ok(idx.subset(idx.side(e0), idx.side(e1)))
}

fn first_incoherent_pair<'a, V: Ord + Clone + Debug>(
    idx: &RootedIndex<V>,
    edges: &'a [DirectedEdge<V>],
) -> Option<(&'a DirectedEdge<V>, &'a DirectedEdge<V>)> {
    let inverses: Vec<DirectedEdge<V>> = edges.iter().map(DirectedEdge::inverse).collect();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if !idx.same_component(&edges[i].origin, &edges[j].origin) {
                continue;
            }
            if !idx.intersect(idx.side(&inverses[i]), idx.side(&inverses[j])) {
                return Some((&edges[i], &edges[j]));
            }
        }
    }
    None
}

/// True iff the terminus half-spaces of any two edges of `h` lying in one
/// component intersect.
pub fn is_coherent<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    h: &[DirectedEdge<V>],
) -> Result<bool, TreeError> {
    for e in h {
        tree.check_edge(e)?;
    }
    let idx = tree.index();
    Ok(first_incoherent_pair(&idx, h).is_none())
}

/// Maximal edges of a coherent set together with the classes of the induced
/// equivalence relation and the transversal formed by their origins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoherentTransversal<V> {
    pub maximal: Vec<DirectedEdge<V>>,
    pub classes: Vec<BTreeSet<V>>,
    pub representatives: Vec<V>,
}

/// For coherent `h` the half-spaces `V^o(e)`, `e ∈ h`, are pairwise nested or
/// disjoint, so the classes of "contained in a common `V^o(e)`" are exactly the
/// half-spaces of the `≤`-maximal edges, and their origins form a transversal.
pub fn coherent_transversal<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    h: &[DirectedEdge<V>],
) -> Result<CoherentTransversal<V>, TreeError> {
    for e in h {
        tree.check_edge(e)?;
    }
    let idx = tree.index();
    if let Some((a, b)) = first_incoherent_pair(&idx, h) {
        return Err(TreeError::NotCoherent(a.label(), b.label()));
    }
    let edges: BTreeSet<&DirectedEdge<V>> = h.iter().collect();
    let mut maximal: Vec<DirectedEdge<V>> = edges
        .iter()
        .filter(|e| {
            !edges
                .iter()
                .any(|f| f != *e && idx.subset(idx.side(e), idx.side(f)))
        })
        .map(|e| (*e).clone())
        .collect();
    maximal.sort_by(|a, b| a.origin.cmp(&b.origin).then_with(|| a.terminus.cmp(&b.terminus)));
    let classes = maximal
        .iter()
        .map(|e| tree.half_space(e))
        .collect::<Result<Vec<_>, _>>()?;
    let representatives = maximal.iter().map(|e| e.origin.clone()).collect();
    Ok(CoherentTransversal {
        maximal,
        classes,
        representatives,
    })
}

fn is_connected_subset<V: Ord + Clone + Debug>(tree: &FiniteTree<V>, s: &BTreeSet<V>) -> bool {
    let Some(start) = s.first() else { return false };
    if s.iter().any(|v| !tree.contains(v)) {
        return false;
    }
    let mut seen = BTreeSet::from([start.clone()]);
    let mut stack = vec![start.clone()];
    while let Some(u) = stack.pop() {
        for w in tree.neighbors(&u) {
            if s.contains(w) && seen.insert(w.clone()) {
                stack.push(w.clone());
            }
        }
    }
    seen.len() == s.len()
}

/// A vertex common to every member of a pairwise-intersecting family of
/// subtrees (the least such vertex).
///
/// With each component rooted at its least vertex, every subtree has a unique
/// shallowest vertex; the deepest of these lies in all members. The common
/// intersection is then grown from it.
pub fn helly_common_vertex<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    family: &SubtreeFamily<V>,
) -> Result<V, TreeError> {
    if family.is_empty() {
        return Err(TreeError::EmptyFamily);
    }
    for (i, s) in family.iter().enumerate() {
        if !is_connected_subset(tree, s) {
            return Err(TreeError::NotSubtree(i));
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if family[i].intersection(&family[j]).next().is_none() {
                return Err(TreeError::NotPairwiseIntersecting(i, j));
            }
        }
    }
    let idx = tree.index();
    let top = |s: &BTreeSet<V>| -> V {
        s.iter()
            .min_by_key(|v| idx.depth[*v])
            .cloned()
            .expect("nonempty")
    };
    let anchor = family
        .iter()
        .map(top)
        .max_by_key(|v| idx.depth[v])
        .expect("nonempty family");
    debug_assert!(family.iter().all(|s| s.contains(&anchor)));
    let in_all = |v: &V| family.iter().all(|s| s.contains(v));
    let mut best = anchor.clone();
    let mut seen = BTreeSet::from([anchor.clone()]);
    let mut stack = vec![anchor];
    while let Some(u) = stack.pop() {
        if u < best {
            best = u.clone();
        }
        for w in tree.neighbors(&u) {
            if in_all(w) && seen.insert(w.clone()) {
                stack.push(w.clone());
            }
        }
    }
    Ok(best)
}

/// Union of all geodesics between members of `s`, computed per component by
/// repeatedly deleting leaves outside `s`.
pub fn convex_hull<V: Ord + Clone + Debug>(tree: &FiniteTree<V>, s: &BTreeSet<V>) -> BTreeSet<V> {
    let mut hull = BTreeSet::new();
    let mut done: BTreeSet<V> = BTreeSet::new();
    for v in s {
        if done.contains(v) || !tree.contains(v) {
            continue;
        }
        let comp = tree.component(v);
        let mut alive = comp.clone();
        let mut degree: BTreeMap<V, usize> = comp.iter().map(|u| (u.clone(), tree.neighbors(u).count())).collect();
        let mut leaves: Vec<V> = comp
            .iter()
            .filter(|u| degree[*u] <= 1 && !s.contains(*u))
            .cloned()
            .collect();
        while let Some(leaf) = leaves.pop() {
            if !alive.remove(&leaf) {
                continue;
            }
            for w in tree.neighbors(&leaf) {
                if alive.contains(w) {
                    let d = degree.get_mut(w).unwrap();
                    *d -= 1;
                    if *d <= 1 && !s.contains(w) {
                        leaves.push(w.clone());
                    }
                }
            }
        }
        done.extend(comp);
        hull.extend(alive);
    }
    hull
}

fn check_coloring<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    coloring: &EdgeColoring<V>,
) -> Result<(), TreeError> {
    for v in tree.vertices() {
        let mut used: BTreeMap<u64, &V> = BTreeMap::new();
        for w in tree.neighbors(v) {
            let c = coloring
                .get(v, w)
                .ok_or_else(|| TreeError::MissingColor(format!("{{{v:?}, {w:?}}}")))?;
            if let Some(prev) = used.insert(c, w) {
                return Err(TreeError::ImproperColoring(
                    format!("{{{v:?}, {prev:?}}}"),
                    format!("{{{v:?}, {w:?}}}"),
                    c,
                ));
            }
        }
    }
    Ok(())
}

/// The lexicographically least shortest path from `x` to the set `a`.
pub fn lex_least_path<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    coloring: &EdgeColoring<V>,
    x: &V,
    a: &BTreeSet<V>,
) -> Result<Vec<V>, TreeError> {
    check_coloring(tree, coloring)?;
    if !tree.contains(x) {
        return Err(TreeError::UnknownVertex(show(x)));
    }
    // distances to `a`, restricted to the component of x
    let mut dist: BTreeMap<V, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for v in a.iter().filter(|v| tree.contains(v)) {
        dist.insert(v.clone(), 0);
        queue.push_back(v.clone());
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for w in tree.neighbors(&u) {
            if !dist.contains_key(w) {
                dist.insert(w.clone(), du + 1);
                queue.push_back(w.clone());
            }
        }
    }
    let Some(&d0) = dist.get(x) else {
        return Err(TreeError::NoPath(show(x)));
    };
    let mut path = vec![x.clone()];
    let mut cur = x.clone();
    for step in (0..d0).rev() {
        let next = tree
            .neighbors(&cur)
            .filter(|w| dist.get(*w) == Some(&step))
            .min_by_key(|w| coloring.get(&cur, w).expect("checked"))
            .cloned()
            .expect("a closer neighbor exists");
        path.push(next.clone());
        cur = next;
    }
    Ok(path)
}

/// An edge pointing into `Y` whose origin half-space misses `Y`, with the
/// exact weight of that half-space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrunedEdge<V> {
    pub edge: DirectedEdge<V>,
    pub mass: Weight,
    pub exceeds_bound: bool,
}

/// Every directed edge `e` of the saturation of the convex set `y` with
/// `V^o(e) ∩ y = ∅`, together with the weight of `V^o(e)`.
pub fn prune_rho_finite<V: Ord + Clone + Debug>(
    tree: &FiniteTree<V>,
    weights: &VertexWeights<V>,
    y: &BTreeSet<V>,
    bound: &Weight,
) -> Result<Vec<PrunedEdge<V>>, TreeError> {
    if let Some(v) = convex_hull(tree, y).difference(y).next() {
        return Err(TreeError::NotConvex(show(v)));
    }
    let mut out = Vec::new();
    let mut done: BTreeSet<V> = BTreeSet::new();
    for root in y {
        if done.contains(root) {
            continue;
        }
        // root the component at a member of y; an edge (child -> parent)
        // qualifies iff the child's subtree misses y
        let mut order = vec![root.clone()];
        let mut parent: BTreeMap<V, V> = BTreeMap::new();
        let mut i = 0;
        while i < order.len() {
            let u = order[i].clone();
            for w in tree.neighbors(&u) {
                if Some(w) != parent.get(&u) {
                    parent.insert(w.clone(), u.clone());
                    order.push(w.clone());
                }
            }
            i += 1;
        }
        let mut mass: BTreeMap<V, BigRational> = BTreeMap::new();
        let mut hits: BTreeMap<V, bool> = BTreeMap::new();
        for u in order.iter().rev() {
            let w = weights
                .get(u)
                .ok_or_else(|| TreeError::MissingWeight(show(u)))?;
            if !w.is_positive() {
                return Err(TreeError::NonPositiveWeight(show(u)));
            }
            let m = mass.remove(u).unwrap_or_else(BigRational::zero) + w;
            let h = hits.remove(u).unwrap_or(false) || y.contains(u);
            if let Some(p) = parent.get(u) {
                if !h {
                    let mw = Weight::Finite(m.clone());
                    out.push(PrunedEdge {
                        edge: DirectedEdge::new(u.clone(), p.clone()),
                        exceeds_bound: &mw > bound,
                        mass: mw,
                    });
                }
                *mass.entry(p.clone()).or_insert_with(BigRational::zero) += &m;
                *hits.entry(p.clone()).or_insert(false) |= h;
            }
        }
        done.extend(order);
    }
    out.sort_by(|a, b| a.edge.cmp(&b.edge));
    Ok(out)
}
