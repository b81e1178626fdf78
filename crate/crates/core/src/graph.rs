//! Finite simple graphs and the combinatorics attached to a defining graph:
//! links, stars, vertex domination, the labelled quotient by domination
//! equivalence, amalgamated copies along a full subgraph, and cotrees.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type VertexSet = BTreeSet<Vertex>;
/// `perm[v]` is the image of `v`.
pub type Permutation = Vec<usize>;

/// Default vertex bound for exhaustive automorphism and isomorphism search.
pub const DEFAULT_AUT_BOUND: usize = 10;

/// A finite simple graph with named vertices. Vertex order is input order and
/// every enumeration in the crate follows it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    names: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl SimpleGraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let mut g = Self::with_names(names)?;
        for (a, b) in edges {
            let u = g.index_of(a.as_ref())?;
            let v = g.index_of(b.as_ref())?;
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn from_indices(names: Vec<String>, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Self::with_names(names)?;
        for &(u, v) in edges {
            if u >= g.order() || v >= g.order() {
                return Err(Error::UnknownVertex(format!("#{}", u.max(v))));
            }
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    fn with_names(names: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateVertex(n.clone()));
            }
        }
        let n = names.len();
        Ok(SimpleGraph {
            names,
            adj: vec![vec![false; n]; n],
        })
    }

    fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(self.names[u].clone()));
        }
        self.adj[u][v] = true;
        self.adj[v][u] = true;
        Ok(())
    }

    /// Null graph on `n` vertices named `a, b, c, ...`.
    pub fn null(n: usize) -> Self {
        Self::from_indices(default_names(n), &[]).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_indices(default_names(n), &edges).unwrap()
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_indices(default_names(n), &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::from_indices(default_names(n), &edges).unwrap()
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Result<Vertex> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.order() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{v}")))
        }
    }

    #[inline]
    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u][v]
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v]
            .iter()
            .enumerate()
            .filter_map(|(u, &e)| e.then_some(u))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].iter().filter(|&&e| e).count()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically ordered.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let n = self.order();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.adj[u][v])
            .collect()
    }

    pub fn vertex_set(&self) -> VertexSet {
        (0..self.order()).collect()
    }

    pub fn set_names(&self, set: &VertexSet) -> Vec<&str> {
        set.iter().map(|&v| self.name(v)).collect()
    }

    pub fn link(&self, v: Vertex) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.lk(v))
    }

    pub fn star(&self, v: Vertex) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.st(v))
    }

    /// Connected components of the full subgraph on `V - st(v)`.
    pub fn components_minus_star(&self, v: Vertex) -> Result<Vec<VertexSet>> {
        self.check_vertex(v)?;
        Ok(self.cc(v))
    }

    /// `v <= w` iff `lk(v) ⊆ st(w)`.
    pub fn dominates(&self, v: Vertex, w: Vertex) -> Result<bool> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        Ok(self.leq(v, w))
    }

    pub(crate) fn lk(&self, v: Vertex) -> VertexSet {
        self.neighbors(v).collect()
    }

    pub(crate) fn st(&self, v: Vertex) -> VertexSet {
        let mut s = self.lk(v);
        s.insert(v);
        s
    }

    pub(crate) fn cc(&self, v: Vertex) -> Vec<VertexSet> {
        let star = self.st(v);
        let rest: VertexSet = (0..self.order()).filter(|u| !star.contains(u)).collect();
        self.components_of(&rest)
    }

    #[inline]
    pub(crate) fn leq(&self, v: Vertex, w: Vertex) -> bool {
        self.neighbors(v).all(|u| u == w || self.adj[w][u])
    }

    /// Partition of `set` into connected components of the full subgraph it
    /// spans, each component listed by its least vertex first.
    pub fn components_of(&self, set: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for &start in set {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(u) = queue.pop_front() {
                comp.insert(u);
                for w in self.neighbors(u) {
                    if set.contains(&w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_of(&self.vertex_set())
    }

    /// Full subgraph spanned by `set`, vertices kept in input order.
    pub fn induced(&self, set: &VertexSet) -> SimpleGraph {
        let verts: Vec<Vertex> = set.iter().copied().collect();
        let names = verts.iter().map(|&v| self.names[v].clone()).collect();
        let mut edges = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.adj[u][v] {
                    edges.push((i, j));
                }
            }
        }
        SimpleGraph::from_indices(names, &edges).unwrap()
    }

    pub fn complement(&self) -> SimpleGraph {
        let n = self.order();
        let mut adj = vec![vec![false; n]; n];
        for u in 0..n {
            for v in 0..n {
                adj[u][v] = u != v && !self.adj[u][v];
            }
        }
        SimpleGraph {
            names: self.names.clone(),
            adj,
        }
    }

    /// Whether `sub` (matched by vertex names) is a full subgraph of `self`.
    pub fn is_full_subgraph(&self, sub: &SimpleGraph) -> Result<bool> {
        let idx: Vec<Vertex> = sub
            .names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<_>>()?;
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                if sub.adj[i][j] != self.adj[idx[i]][idx[j]] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn domination_structure(&self) -> DominationStructure {
        let n = self.order();
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|v| (0..n).map(|w| self.leq(v, w)).collect())
            .collect();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<Vertex>> = Vec::new();
        for v in 0..n {
            if class_of[v] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let members: Vec<Vertex> = (v..n)
                .filter(|&w| class_of[w] == usize::MAX && leq[v][w] && leq[w][v])
                .collect();
            for &w in &members {
                class_of[w] = id;
            }
            classes.push(members);
        }
        let kinds = classes
            .iter()
            .map(|c| match c.as_slice() {
                [_] => ClassKind::Singleton,
                [u, w, ..] if self.adj[*u][*w] => ClassKind::Complete,
                _ => ClassKind::Null,
            })
            .collect();
        DominationStructure {
            leq,
            classes,
            kinds,
            class_of,
        }
    }

    pub fn quotient_graph(&self) -> LabeledQuotientGraph {
        let dom = self.domination_structure();
        let names: Vec<String> = dom
            .classes
            .iter()
            .map(|c| {
                let members: Vec<&str> = c.iter().map(|&v| self.name(v)).collect();
                format!("[{}]", members.join(","))
            })
            .collect();
        let k = dom.classes.len();
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                // Well defined on representatives: adjacency is constant across classes.
                if self.adj[dom.classes[i][0]][dom.classes[j][0]] {
                    edges.push((i, j));
                }
            }
        }
        let labels = dom
            .classes
            .iter()
            .zip(&dom.kinds)
            .map(|(c, &kind)| ClassLabel {
                kind,
                size: c.len(),
            })
            .collect();
        LabeledQuotientGraph {
            graph: SimpleGraph::from_indices(names, &edges).unwrap(),
            labels,
            classes: dom.classes,
        }
    }

    /// All vertex permutations preserving the edge set, in lexicographic order
    /// of their image vectors.
    pub fn automorphisms(&self, bound: usize) -> Result<Vec<Permutation>> {
        self.check_bound(bound)?;
        let colors = vec![0usize; self.order()];
        let mut out = Vec::new();
        search_isomorphisms(self, self, &colors, &colors, &mut |p| {
            out.push(p.to_vec());
            true
        });
        Ok(out)
    }

    /// Order of `Aut(Γ)` without materialising the permutations.
    pub fn automorphism_count(&self, bound: usize) -> Result<u64> {
        self.check_bound(bound)?;
        let colors = vec![0usize; self.order()];
        let mut count = 0u64;
        search_isomorphisms(self, self, &colors, &colors, &mut |_| {
            count += 1;
            true
        });
        Ok(count)
    }

    /// An isomorphism `self -> other` (`perm[v]` is the image of `v`), if any.
    pub fn find_isomorphism(&self, other: &SimpleGraph, bound: usize) -> Result<Option<Permutation>> {
        self.check_bound(bound)?;
        if self.order() != other.order() {
            return Ok(None);
        }
        let mut a: Vec<usize> = (0..self.order()).map(|v| self.degree(v)).collect();
        let mut b: Vec<usize> = (0..other.order()).map(|v| other.degree(v)).collect();
        a.sort_unstable();
        b.sort_unstable();
        if a != b || self.edges().len() != other.edges().len() {
            return Ok(None);
        }
        let colors = vec![0usize; self.order()];
        let mut found = None;
        search_isomorphisms(self, other, &colors, &colors, &mut |p| {
            found = Some(p.to_vec());
            false
        });
        Ok(found)
    }

    pub fn is_isomorphic(&self, other: &SimpleGraph, bound: usize) -> Result<bool> {
        Ok(self.find_isomorphism(other, bound)?.is_some())
    }

    fn check_bound(&self, bound: usize) -> Result<()> {
        if self.order() > bound {
            return Err(Error::BoundExceeded {
                what: "vertex count",
                actual: self.order(),
                bound,
            });
        }
        Ok(())
    }

    /// `d` copies of the graph glued along the full subgraph spanned by `lam`.
    ///
    /// Vertices of `lam` keep their names and come first; the copy `k` of an
    /// outside vertex `x` is named `x_k` (`k = 0..d`). For `d = 1` the graph is
    /// returned unchanged.
    pub fn amalgam(&self, lam: &VertexSet, d: usize) -> Result<SimpleGraph> {
        if d < 1 {
            return Err(Error::InvalidArgument("d must be at least 1".into()));
        }
        for &v in lam {
            self.check_vertex(v)?;
        }
        if d == 1 || lam.len() == self.order() {
            return Ok(self.clone());
        }
        let inside: Vec<Vertex> = lam.iter().copied().collect();
        let outside: Vec<Vertex> = (0..self.order()).filter(|v| !lam.contains(v)).collect();
        let mut names: Vec<String> = inside.iter().map(|&v| self.names[v].clone()).collect();
        // new index of (copy k, original vertex)
        let mut index = vec![vec![usize::MAX; self.order()]; d];
        for (i, &v) in inside.iter().enumerate() {
            for row in index.iter_mut() {
                row[v] = i;
            }
        }
        for (k, row) in index.iter_mut().enumerate() {
            for &v in &outside {
                row[v] = names.len();
                names.push(format!("{}_{}", self.names[v], k));
            }
        }
        let mut edges = BTreeSet::new();
        for row in &index {
            for (u, v) in self.edges() {
                let (a, b) = (row[u], row[v]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        let out = SimpleGraph::from_indices(names, &edges)?;
        if out.names.iter().collect::<BTreeSet<_>>().len() != out.order() {
            return Err(Error::InvalidArgument("copy names collide with existing vertices".into()));
        }
        Ok(out)
    }

    /// As [`SimpleGraph::amalgam`], with Λ given as a subgraph that must be full.
    pub fn amalgam_along(&self, lambda: &SimpleGraph, d: usize) -> Result<SimpleGraph> {
        if !self.is_full_subgraph(lambda)? {
            return Err(Error::NotFull(lambda.names.join(",")));
        }
        let lam = lambda
            .names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<VertexSet>>()?;
        self.amalgam(&lam, d)
    }

    /// Decompose into a cotree by splitting the graph or its complement into
    /// connected components. A prime piece yields an induced `P4`.
    pub fn cograph_decompose(&self) -> std::result::Result<Cotree, P4Witness> {
        let tree = self.decompose_set(&self.vertex_set())?;
        Ok(tree)
    }

    fn decompose_set(&self, set: &VertexSet) -> std::result::Result<Cotree, P4Witness> {
        if set.len() == 1 {
            return Ok(Cotree::Leaf(*set.iter().next().unwrap()));
        }
        let comps = self.components_of(set);
        if comps.len() != 1 {
            let children = comps
                .iter()
                .map(|c| self.decompose_set(c))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            return Ok(Cotree::Union(sort_children(children)));
        }
        let co = self.complement();
        let cocomps = co.components_of(set);
        if cocomps.len() != 1 {
            let children = cocomps
                .iter()
                .map(|c| self.decompose_set(c))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            return Ok(Cotree::Join(sort_children(children)));
        }
        Err(self
            .find_p4_in(set)
            .expect("a prime piece with connected complement contains an induced P4"))
    }

    fn find_p4_in(&self, set: &VertexSet) -> Option<P4Witness> {
        for &b in set {
            for &c in set {
                if b == c || !self.adj[b][c] {
                    continue;
                }
                for &a in set {
                    if a == b || a == c || !self.adj[a][b] || self.adj[a][c] {
                        continue;
                    }
                    for &d in set {
                        if d == a || d == b || d == c {
                            continue;
                        }
                        if self.adj[c][d] && !self.adj[b][d] && !self.adj[a][d] {
                            return Some(P4Witness([a, b, c, d]));
                        }
                    }
                }
            }
        }
        None
    }

    /// Graphviz DOT text.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for n in &self.names {
            s.push_str(&format!("  \"{}\";\n", escape_dot(n)));
        }
        for (u, v) in self.edges() {
            s.push_str(&format!(
                "  \"{}\" -- \"{}\";\n",
                escape_dot(&self.names[u]),
                escape_dot(&self.names[v])
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(u, v)| [self.names[u].clone(), self.names[v].clone()])
                .collect(),
        }
    }

    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        let edges: Vec<(&str, &str)> = doc
            .edges
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let verts: Vec<&str> = doc.vertices.iter().map(|s| s.as_str()).collect();
        Self::new(&verts, &edges)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).unwrap()
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(u, v)| format!("{}-{}", self.names[u], self.names[v]))
            .collect();
        write!(f, "V={{{}}} E={{{}}}", self.names.join(","), edges.join(","))
    }
}

/// On-disk graph format: `{"vertices": [...], "edges": [[u, v], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("v{i}")
            }
        })
        .collect()
}

/// Backtracking search for bijections `g -> h` preserving adjacency and
/// colours. The callback returns `false` to stop.
fn search_isomorphisms(
    g: &SimpleGraph,
    h: &SimpleGraph,
    gcol: &[usize],
    hcol: &[usize],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    let n = g.order();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        i: usize,
        g: &SimpleGraph,
        h: &SimpleGraph,
        gcol: &[usize],
        hcol: &[usize],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let n = g.order();
        if i == n {
            return visit(image);
        }
        let deg = g.degree(i);
        for j in 0..n {
            if used[j] || gcol[i] != hcol[j] || h.degree(j) != deg {
                continue;
            }
            if (0..i).any(|k| g.adj[i][k] != h.adj[j][image[k]]) {
                continue;
            }
            image[i] = j;
            used[j] = true;
            let go_on = rec(i + 1, g, h, gcol, hcol, image, used, visit);
            used[j] = false;
            image[i] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(0, g, h, gcol, hcol, &mut image, &mut used, visit);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassKind {
    Singleton,
    Complete,
    Null,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationStructure {
    /// `leq[v][w]` iff `v <= w`.
    pub leq: Vec<Vec<bool>>,
    /// Equivalence classes, ordered by least member.
    pub classes: Vec<Vec<Vertex>>,
    pub kinds: Vec<ClassKind>,
    pub class_of: Vec<usize>,
}

impl DominationStructure {
    pub fn equivalent(&self, v: Vertex, w: Vertex) -> bool {
        self.class_of[v] == self.class_of[w]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }
}

/// Label of a quotient vertex: the RAAG spanned by the class, `F_size` for a
/// null class and `Z^size` for a complete one. Singletons are `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    pub kind: ClassKind,
    pub size: usize,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ClassKind::Singleton => write!(f, "Z"),
            ClassKind::Null => write!(f, "F_{}", self.size),
            ClassKind::Complete => write!(f, "Z^{}", self.size),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledQuotientGraph {
    pub graph: SimpleGraph,
    pub labels: Vec<ClassLabel>,
    pub classes: Vec<Vec<Vertex>>,
}

impl LabeledQuotientGraph {
    /// Label-preserving automorphisms of the quotient.
    pub fn automorphisms(&self, bound: usize) -> Result<Vec<Permutation>> {
        self.graph.check_bound(bound)?;
        let mut palette: Vec<ClassLabel> = self.labels.clone();
        palette.sort();
        palette.dedup();
        let colors: Vec<usize> = self
            .labels
            .iter()
            .map(|l| palette.binary_search(l).unwrap())
            .collect();
        let mut out = Vec::new();
        search_isomorphisms(&self.graph, &self.graph, &colors, &colors, &mut |p| {
            out.push(p.to_vec());
            true
        });
        Ok(out)
    }
}

/// An induced path `a - b - c - d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct P4Witness(pub [Vertex; 4]);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cotree {
    Leaf(Vertex),
    Join(Vec<Cotree>),
    Union(Vec<Cotree>),
}

impl Cotree {
    pub fn vertices(&self) -> VertexSet {
        let mut out = VertexSet::new();
        self.collect_vertices(&mut out);
        out
    }

    fn collect_vertices(&self, out: &mut VertexSet) {
        match self {
            Cotree::Leaf(v) => {
                out.insert(*v);
            }
            Cotree::Join(cs) | Cotree::Union(cs) => cs.iter().for_each(|c| c.collect_vertices(out)),
        }
    }

    fn min_vertex(&self) -> Vertex {
        self.vertices().into_iter().next().unwrap_or(usize::MAX)
    }

    /// Isomorphism-invariant shape string; equal for isomorphic cographs.
    pub fn shape_key(&self) -> String {
        match self {
            Cotree::Leaf(_) => "v".into(),
            Cotree::Join(cs) | Cotree::Union(cs) => {
                let mut keys: Vec<String> = cs.iter().map(|c| c.shape_key()).collect();
                keys.sort();
                let tag = if matches!(self, Cotree::Join(_)) { 'J' } else { 'U' };
                format!("{tag}({})", keys.join(","))
            }
        }
    }

    /// Rebuild the graph: joins add all edges between children, unions add none.
    /// `names` is the vertex-name table of the decomposed graph.
    pub fn evaluate(&self, names: &[String]) -> SimpleGraph {
        let verts: Vec<Vertex> = self.vertices().into_iter().collect();
        let pos = |v: Vertex| verts.binary_search(&v).unwrap();
        let mut edges = Vec::new();
        self.collect_edges(&mut edges);
        let edges: Vec<_> = edges.into_iter().map(|(u, v)| (pos(u), pos(v))).collect();
        let sub_names = verts.iter().map(|&v| names[v].clone()).collect();
        SimpleGraph::from_indices(sub_names, &edges).unwrap()
    }

    fn collect_edges(&self, out: &mut Vec<(Vertex, Vertex)>) {
        match self {
            Cotree::Leaf(_) => {}
            Cotree::Union(cs) => cs.iter().for_each(|c| c.collect_edges(out)),
            Cotree::Join(cs) => {
                cs.iter().for_each(|c| c.collect_edges(out));
                let sets: Vec<VertexSet> = cs.iter().map(|c| c.vertices()).collect();
                for i in 0..sets.len() {
                    for j in i + 1..sets.len() {
                        for &u in &sets[i] {
                            for &v in &sets[j] {
                                out.push((u.min(v), u.max(v)));
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn render(&self, g: &SimpleGraph) -> String {
        match self {
            Cotree::Leaf(v) => g.name(*v).to_string(),
            Cotree::Join(cs) | Cotree::Union(cs) => {
                let inner: Vec<String> = cs.iter().map(|c| c.render(g)).collect();
                let tag = if matches!(self, Cotree::Join(_)) { "Join" } else { "Union" };
                format!("{tag}({})", inner.join(", "))
            }
        }
    }
}

fn sort_children(mut children: Vec<Cotree>) -> Vec<Cotree> {
    children.sort_by_cached_key(|c| (c.shape_key(), c.min_vertex()));
    children
}
