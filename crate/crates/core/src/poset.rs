//! Finite posets, their comparability graphs and the 2-skeleton of the
//! order complex.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a [`Poset`], identified by its declaration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A finite partially ordered set with a closed order relation.
///
/// Elements are opaque names, ordered by declaration; every deterministic
/// iteration in the crate follows that order.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, Elem>,
    leq: Vec<bool>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset")
            .field("elements", &self.names)
            .field("covers", &self.cover_pairs().len())
            .finish()
    }
}

/// On-disk form: `{"elements": [...], "le": [[a, b], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub elements: Vec<String>,
    pub le: Vec<(String, String)>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `relations` over `elements`.
    pub fn build<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self> {
        let mut names = Vec::with_capacity(elements.len());
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            let name = e.as_ref().to_string();
            if index.insert(name.clone(), Elem(i as u32)).is_some() {
                return Err(Error::DuplicateElement(name));
            }
            names.push(name);
        }
        let n = names.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in relations {
            let a = lookup(&index, a.as_ref())?;
            let b = lookup(&index, b.as_ref())?;
            leq[a.index() * n + b.index()] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::AntisymmetryViolation(names[i].clone(), names[j].clone()));
                }
            }
        }
        Ok(Poset { names, index, leq })
    }

    /// The chain `0 <= 1 <= ... <= n-1` with decimal names.
    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let rel: Vec<(String, String)> =
            (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
        Poset::build(&names, &rel).expect("chains are posets")
    }

    /// `{a, b, c}` with `a <= c` and `b <= c`.
    pub fn diamond() -> Self {
        Poset::build(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).expect("valid")
    }

    /// The circle `{a1, a2, b1, b2}` with every `a_i <= b_j`.
    pub fn circle() -> Self {
        Poset::build(
            &["a1", "a2", "b1", "b2"],
            &[("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")],
        )
        .expect("valid")
    }

    pub fn antichain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Poset::build::<String>(&names, &[]).expect("valid")
    }

    pub fn from_file(file: &PosetFile) -> Result<Self> {
        Poset::build(&file.elements, &file.le)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PosetFile = serde_json::from_str(text)?;
        Poset::from_file(&file)
    }

    /// The closed relation, pairs sorted lexicographically by name.
    pub fn to_file(&self) -> PosetFile {
        let mut le: Vec<(String, String)> = self
            .elements()
            .flat_map(|a| self.elements().filter(move |&b| self.le(a, b)).map(move |b| (a, b)))
            .map(|(a, b)| (self.name(a).to_string(), self.name(b).to_string()))
            .collect();
        le.sort();
        PosetFile { elements: self.names.clone(), le }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data serializes")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone + '_ {
        (0..self.names.len() as u32).map(Elem)
    }

    pub fn elem(&self, name: &str) -> Result<Elem> {
        lookup(&self.index, name)
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[inline]
    pub fn le(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.names.len() + b.index()]
    }

    #[inline]
    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.le(a, b)
    }

    #[inline]
    pub fn comparable(&self, a: Elem, b: Elem) -> bool {
        self.le(a, b) || self.le(b, a)
    }

    /// Name-based comparability query.
    pub fn comparable_by_name(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.comparable(self.elem(a)?, self.elem(b)?))
    }

    pub fn is_upward_directed(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.elements().any(|c| self.le(a, c) && self.le(b, c))))
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([Elem(0)]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for y in self.elements() {
                if !seen[y.index()] && self.comparable(x, y) {
                    seen[y.index()] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `{ z : x <= z and y <= z }` in declaration order.
    pub fn upper_bounds(&self, x: Elem, y: Elem) -> Vec<Elem> {
        self.elements().filter(|&z| self.le(x, z) && self.le(y, z)).collect()
    }

    pub fn common_upper_bounds(&self, xs: &[Elem]) -> Vec<Elem> {
        self.elements().filter(|&z| xs.iter().all(|&x| self.le(x, z))).collect()
    }

    pub fn first_upper_bound(&self, x: Elem, y: Elem) -> Option<Elem> {
        self.elements().find(|&z| self.le(x, z) && self.le(y, z))
    }

    /// Every strictly increasing 3-chain `a < b < c`, lexicographic in
    /// declaration order.
    pub fn triangles(&self) -> Vec<(Elem, Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements().filter(|&b| self.lt(a, b)) {
                for c in self.elements().filter(|&c| self.lt(b, c)) {
                    out.push((a, b, c));
                }
            }
        }
        out.sort();
        out
    }

    /// Pairs `a < b` with nothing strictly between.
    pub fn cover_pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements().filter(|&b| self.lt(a, b)) {
                if !self.elements().any(|m| self.lt(a, m) && self.lt(m, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn comparability_graph(&self) -> ComparabilityGraph {
        let mut edges = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.lt(a, b) {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_by_key(|&(a, b)| (a.min(b), a.max(b)));
        ComparabilityGraph {
            vertices: self.elements().collect(),
            edges,
        }
    }

    /// True when `a <= b` implies that `a` is declared no later than `b`.
    pub fn is_monotone_enumeration(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| !self.le(a, b) || a <= b))
    }
}

fn lookup(index: &HashMap<String, Elem>, name: &str) -> Result<Elem> {
    index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
}

/// Comparable distinct pairs of a poset. Each edge is stored once, oriented
/// from the smaller element to the larger one, sorted by declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparabilityGraph {
    pub vertices: Vec<Elem>,
    pub edges: Vec<(Elem, Elem)>,
}

impl ComparabilityGraph {
    pub fn edge_index(&self) -> HashMap<(Elem, Elem), usize> {
        self.edges.iter().enumerate().map(|(i, &(a, b))| ((a, b), i)).collect()
    }

    fn neighbours(&self, n: usize) -> Vec<Vec<Elem>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a.index()].push(b);
            adj[b.index()].push(a);
        }
        for list in &mut adj {
            list.sort();
        }
        adj
    }

    /// Depth-first spanning tree from `root`, neighbours visited in
    /// declaration order. Covers only the component of `root`.
    pub fn spanning_tree(&self, root: Elem) -> SpanningTree {
        let n = self.vertices.len();
        let adj = self.neighbours(n);
        let mut parent: Vec<Option<Elem>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree_edges = Vec::new();
        depth[root.index()] = 0;
        let mut stack: Vec<(Elem, usize)> = vec![(root, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if let Some(&w) = adj[v.index()].get(next) {
                top.1 += 1;
                if depth[w.index()] == usize::MAX {
                    depth[w.index()] = depth[v.index()] + 1;
                    parent[w.index()] = Some(v);
                    tree_edges.push((v.min(w), v.max(w)));
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
            }
        }
        SpanningTree { root, parent, depth, tree_edges }
    }
}

/// A rooted spanning tree of (a component of) the comparability graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: Elem,
    parent: Vec<Option<Elem>>,
    depth: Vec<usize>,
    /// Tree edges as `(min, max)` by declaration index.
    pub tree_edges: Vec<(Elem, Elem)>,
}

impl SpanningTree {
    pub fn reaches(&self, e: Elem) -> bool {
        self.depth[e.index()] != usize::MAX
    }

    pub fn spans(&self) -> bool {
        self.depth.iter().all(|&d| d != usize::MAX)
    }

    pub fn contains_edge(&self, a: Elem, b: Elem) -> bool {
        self.parent[a.index()] == Some(b) || self.parent[b.index()] == Some(a)
    }

    /// Vertex sequence of the tree path from `from` to `to`, both included.
    pub fn route(&self, from: Elem, to: Elem) -> Vec<Elem> {
        let (mut x, mut y) = (from, to);
        let mut head = vec![x];
        let mut tail = vec![y];
        while self.depth[x.index()] > self.depth[y.index()] {
            x = self.parent[x.index()].expect("non-root has a parent");
            head.push(x);
        }
        while self.depth[y.index()] > self.depth[x.index()] {
            y = self.parent[y.index()].expect("non-root has a parent");
            tail.push(y);
        }
        while x != y {
            x = self.parent[x.index()].expect("non-root has a parent");
            y = self.parent[y.index()].expect("non-root has a parent");
            head.push(x);
            tail.push(y);
        }
        tail.pop();
        head.extend(tail.into_iter().rev());
        head
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: &Poset, n: &str) -> Elem {
        p.elem(n).unwrap()
    }

    #[test]
    fn closure_of_fan() {
        let p = Poset::diamond();
        assert_eq!(p.to_file().le.len(), 5);
        assert!(p.le(e(&p, "a"), e(&p, "c")));
        assert!(!p.comparable(e(&p, "a"), e(&p, "b")));
        assert!(p.comparable(e(&p, "a"), e(&p, "a")));
    }

    #[test]
    fn singleton_and_cycle() {
        let p = Poset::build(&["a"], &[]).unwrap();
        assert_eq!(p.to_file().le, vec![("a".to_string(), "a".to_string())]);
        let err = Poset::build(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, Error::AntisymmetryViolation(..)));
        let err = Poset::build(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap_err();
        assert!(matches!(err, Error::AntisymmetryViolation(..)));
    }

    #[test]
    fn unknown_and_duplicate_names() {
        assert_eq!(
            Poset::build(&["a"], &[("a", "z")]).unwrap_err(),
            Error::UnknownElement("z".into())
        );
        assert_eq!(Poset::build::<&str>(&["a", "a"], &[]).unwrap_err(), Error::DuplicateElement("a".into()));
        assert!(Poset::diamond().comparable_by_name("a", "q").is_err());
    }

    #[test]
    fn directedness_and_connectivity() {
        assert!(Poset::diamond().is_upward_directed());
        assert!(!Poset::circle().is_upward_directed());
        assert!(Poset::build(&["a"], &[]).unwrap().is_upward_directed());
        assert!(Poset::circle().is_connected());
        assert!(Poset::diamond().is_connected());
        assert!(!Poset::antichain(2).is_connected());
    }

    #[test]
    fn upper_bound_queries() {
        let d = Poset::diamond();
        assert_eq!(d.upper_bounds(e(&d, "a"), e(&d, "b")), vec![e(&d, "c")]);
        let c = Poset::circle();
        assert!(c.upper_bounds(e(&c, "b1"), e(&c, "b2")).is_empty());
        let ch = Poset::chain(3);
        assert_eq!(ch.upper_bounds(Elem(0), Elem(1)), vec![Elem(1), Elem(2)]);
    }

    #[test]
    fn triangle_listing() {
        assert_eq!(Poset::chain(3).triangles(), vec![(Elem(0), Elem(1), Elem(2))]);
        assert!(Poset::circle().triangles().is_empty());
        assert!(Poset::diamond().triangles().is_empty());
        assert_eq!(Poset::chain(4).triangles().len(), 4);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let p = Poset::circle();
        let text = p.to_json();
        let q = Poset::from_json(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.to_json(), text);
        assert!(Poset::from_json("{\"elements\": [\"a\"]}").is_err());
    }

    #[test]
    fn dfs_tree_on_circle_leaves_one_chord() {
        let c = Poset::circle();
        let g = c.comparability_graph();
        assert_eq!(g.edges.len(), 4);
        let t = g.spanning_tree(e(&c, "a1"));
        assert!(t.spans());
        assert_eq!(t.tree_edges.len(), 3);
        assert!(!t.contains_edge(e(&c, "a1"), e(&c, "b2")));
        assert_eq!(
            t.route(e(&c, "a1"), e(&c, "b2")),
            vec![e(&c, "a1"), e(&c, "b1"), e(&c, "a2"), e(&c, "b2")]
        );
        assert_eq!(t.route(e(&c, "b2"), e(&c, "b2")), vec![e(&c, "b2")]);
    }
}
