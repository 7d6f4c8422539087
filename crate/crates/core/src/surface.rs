//! Surface groups and small CW models of surfaces.
//!
//! A [`CwSurface`] has oriented edges and faces given as closed edge paths.
//! Vertex 0 is always the base vertex. A bordered surface additionally
//! carries its boundary cycle, written as a closed path starting at vertex 0;
//! capping it with one more face gives a closed surface, so every edge is
//! used exactly twice, once in each direction, by the faces together with the
//! boundary word.
//!
//! Paths are read left to right: `[e₁, e₂]` walks `e₁` first.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Letter of a word in the free group on numbered generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverted: bool,
}

impl Letter {
    pub fn new(generator: usize) -> Self {
        Letter { generator, inverted: false }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverted: !self.inverted }
    }
}

pub type Word = Vec<Letter>;

/// `[x, y] = x y x⁻¹ y⁻¹`
pub fn commutator(x: Letter, y: Letter) -> Word {
    vec![x, y, x.inv(), y.inv()]
}

/// `[a₁,b₁]⋯[a_g,b_g]` with `a_i = 2i`, `b_i = 2i + 1`.
pub fn commutator_product(genus: usize) -> Word {
    (0..genus).flat_map(|i| commutator(Letter::new(2 * i), Letter::new(2 * i + 1))).collect()
}

/// Standard presentation of the fundamental group of a closed or
/// one-boundary orientable surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfacePresentation {
    pub genus: usize,
    pub boundary_components: usize,
    pub generators: Vec<String>,
    /// Present iff closed.
    pub relator: Option<Word>,
    /// Present iff there is one boundary component.
    pub boundary_word: Option<Word>,
}

impl SurfacePresentation {
    /// `⟨a₁, b₁, …, a_g, b_g | [a₁,b₁]⋯[a_g,b_g]⟩`
    pub fn closed(genus: usize) -> Self {
        SurfacePresentation {
            genus,
            boundary_components: 0,
            generators: generator_names(genus),
            relator: Some(commutator_product(genus)),
            boundary_word: None,
        }
    }

    /// Free group on `a₁, …, b_g`, boundary loop `[a₁,b₁]⋯[a_g,b_g]`.
    pub fn bordered(genus: usize) -> Self {
        SurfacePresentation {
            genus,
            boundary_components: 1,
            generators: generator_names(genus),
            relator: None,
            boundary_word: Some(commutator_product(genus)),
        }
    }

    pub fn render(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".into();
        }
        word.iter()
            .map(|l| {
                let name = &self.generators[l.generator];
                if l.inverted {
                    format!("{name}⁻¹")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn generator_names(genus: usize) -> Vec<String> {
    (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect()
}

/// An edge traversed forwards (`src -> tgt`) or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl SignedEdge {
    pub fn fwd(edge: usize) -> Self {
        SignedEdge { edge, forward: true }
    }

    pub fn bwd(edge: usize) -> Self {
        SignedEdge { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        SignedEdge { edge: self.edge, forward: !self.forward }
    }

    /// One-based signed encoding used in JSON files: `+(e+1)` or `-(e+1)`.
    pub fn to_signed(self) -> i64 {
        let k = self.edge as i64 + 1;
        if self.forward {
            k
        } else {
            -k
        }
    }

    pub fn from_signed(k: i64) -> Option<Self> {
        match k {
            0 => None,
            k if k > 0 => Some(SignedEdge::fwd((k - 1) as usize)),
            k => Some(SignedEdge::bwd((-k - 1) as usize)),
        }
    }
}

impl fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.forward {
            write!(f, "e{}", self.edge)
        } else {
            write!(f, "e{}⁻¹", self.edge)
        }
    }
}

impl Serialize for SignedEdge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_signed())
    }
}

impl<'de> Deserialize<'de> for SignedEdge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let k = i64::deserialize(d)?;
        SignedEdge::from_signed(k).ok_or_else(|| serde::de::Error::custom("edge 0 is not a valid signed edge"))
    }
}

pub type EdgePath = Vec<SignedEdge>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("edge {edge} has endpoint {vertex} outside 0..{vertices}")]
    VertexOutOfRange { edge: usize, vertex: usize, vertices: usize },
    #[error("{what} uses edge {edge}, but there are only {edges} edges")]
    EdgeOutOfRange { what: String, edge: usize, edges: usize },
    #[error("{what} is not a connected edge path at step {step}")]
    BrokenPath { what: String, step: usize },
    #[error("{what} does not close up")]
    NotClosed { what: String },
    #[error("boundary cycle must start at the base vertex 0")]
    BoundaryOffBase,
    #[error("boundary cycle revisits {0}; it must be a simple cycle")]
    BoundaryNotSimple(String),
    #[error("edge {edge} is used {uses} times by faces and boundary (expected once in each direction)")]
    NotASurface { edge: usize, uses: String },
    #[error("the complex is not connected (vertex {vertex} is unreachable from the base)")]
    Disconnected { vertex: usize },
    #[error("face {0} has an empty boundary word")]
    EmptyFace(usize),
    #[error("a CW surface needs at least one vertex")]
    Empty,
    #[error("base vertex must be 0, got {0}")]
    BaseNotZero(usize),
    #[error("standard loops must come in (a, b) pairs; got {0} loops")]
    OddLoopCount(usize),
    #[error("standard loop {index} does not start and end at the base vertex")]
    LoopOffBase { index: usize },
    #[error("{what} needs size at least {min}, got {n}")]
    GridSize { what: &'static str, n: usize, min: usize },
}

/// Whether a CW model is closed or has one boundary component, and its genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Closed { genus: usize },
    Bordered { genus: usize },
}

impl SurfaceKind {
    pub fn genus(self) -> usize {
        match self {
            SurfaceKind::Closed { genus } | SurfaceKind::Bordered { genus } => genus,
        }
    }
}

/// Combinatorial 2-complex modelling an orientable surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwSurface {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    faces: Vec<EdgePath>,
    boundary: Option<EdgePath>,
    standard_loops: Option<Vec<EdgePath>>,
}

impl CwSurface {
    /// Validates and builds a complex. `standard_loops`, when given, are
    /// closed paths at vertex 0 representing `a₁, b₁, …, a_g, b_g`, such that
    /// `[a₁,b₁]⋯[a_g,b_g]` is null-homotopic (closed case) or homotopic to
    /// the boundary loop (bordered case). The boundary must be a simple
    /// cycle.
    pub fn new(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        faces: Vec<EdgePath>,
        boundary: Option<EdgePath>,
        standard_loops: Option<Vec<EdgePath>>,
    ) -> Result<Self, SurfaceError> {
        if vertices == 0 {
            return Err(SurfaceError::Empty);
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            for vertex in [u, v] {
                if vertex >= vertices {
                    return Err(SurfaceError::VertexOutOfRange { edge: e, vertex, vertices });
                }
            }
        }
        let c = CwSurface { vertices, edges, faces, boundary, standard_loops };
        for (i, face) in c.faces.iter().enumerate() {
            if face.is_empty() {
                return Err(SurfaceError::EmptyFace(i));
            }
            c.closed_path_start(face, &format!("face {i}"))?;
        }
        if let Some(b) = &c.boundary {
            if c.closed_path_start(b, "boundary")? != Some(0) && !b.is_empty() {
                return Err(SurfaceError::BoundaryOffBase);
            }
            let mut seen_vertex = vec![false; c.vertices];
            let mut seen_edge = vec![false; c.edges.len()];
            for &step in b {
                if std::mem::replace(&mut seen_edge[step.edge], true) {
                    return Err(SurfaceError::BoundaryNotSimple(format!("edge {}", step.edge)));
                }
                let v = c.endpoints(step).0;
                if std::mem::replace(&mut seen_vertex[v], true) {
                    return Err(SurfaceError::BoundaryNotSimple(format!("vertex {v}")));
                }
            }
        }
        let mut forward = vec![0usize; c.edges.len()];
        let mut backward = vec![0usize; c.edges.len()];
        for step in c.faces.iter().chain(c.boundary.iter()).flatten() {
            if step.forward {
                forward[step.edge] += 1;
            } else {
                backward[step.edge] += 1;
            }
        }
        for e in 0..c.edges.len() {
            if forward[e] != 1 || backward[e] != 1 {
                return Err(SurfaceError::NotASurface { edge: e, uses: format!("{}+/{}-", forward[e], backward[e]) });
            }
        }
        if let Some(loops) = &c.standard_loops {
            if loops.len() % 2 != 0 {
                return Err(SurfaceError::OddLoopCount(loops.len()));
            }
            for (index, l) in loops.iter().enumerate() {
                let start = c.closed_path_start(l, &format!("standard loop {index}"))?;
                if start.is_some_and(|s| s != 0) {
                    return Err(SurfaceError::LoopOffBase { index });
                }
            }
        }
        c.spanning_tree()?;
        Ok(c)
    }

    /// Start vertex of a closed edge path (`None` for the empty path).
    fn closed_path_start(&self, path: &[SignedEdge], what: &str) -> Result<Option<usize>, SurfaceError> {
        let Some(first) = path.first() else {
            return Ok(None);
        };
        let mut at = None;
        for (step, s) in path.iter().enumerate() {
            if s.edge >= self.edges.len() {
                return Err(SurfaceError::EdgeOutOfRange { what: what.into(), edge: s.edge, edges: self.edges.len() });
            }
            let (from, to) = self.endpoints(*s);
            if at.is_some_and(|v| v != from) {
                return Err(SurfaceError::BrokenPath { what: what.into(), step });
            }
            at = Some(to);
        }
        let start = self.endpoints(*first).0;
        if at != Some(start) {
            return Err(SurfaceError::NotClosed { what: what.into() });
        }
        Ok(Some(start))
    }

    /// `(start, end)` of a traversed edge.
    pub fn endpoints(&self, s: SignedEdge) -> (usize, usize) {
        let (u, v) = self.edges[s.edge];
        if s.forward {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn faces(&self) -> &[EdgePath] {
        &self.faces
    }

    pub fn boundary(&self) -> Option<&EdgePath> {
        self.boundary.as_ref()
    }

    pub fn standard_loops(&self) -> Option<&[EdgePath]> {
        self.standard_loops.as_deref()
    }

    pub fn base(&self) -> usize {
        0
    }

    /// Vertices visited by the boundary cycle.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices];
        if let Some(b) = &self.boundary {
            on[0] = true;
            for &s in b {
                let (u, v) = self.endpoints(s);
                on[u] = true;
                on[v] = true;
            }
        }
        on
    }

    /// Edges traversed by the boundary cycle.
    pub fn boundary_edges(&self) -> Vec<bool> {
        let mut on = vec![false; self.edges.len()];
        for s in self.boundary.iter().flatten() {
            on[s.edge] = true;
        }
        on
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Closed or bordered, with the genus read off the Euler characteristic.
    pub fn kind(&self) -> SurfaceKind {
        let chi = self.euler_characteristic();
        match self.boundary {
            None => SurfaceKind::Closed { genus: ((2 - chi) / 2) as usize },
            Some(_) => SurfaceKind::Bordered { genus: ((1 - chi) / 2) as usize },
        }
    }

    /// Rank of `H₁` over ℚ: `dim ker ∂₁ − rank ∂₂`.
    pub fn h1_rank(&self) -> usize {
        let n_edges = self.edges.len();
        let d1: Vec<Vec<i64>> = self
            .edges
            .iter()
            .filter(|(u, v)| u != v)
            .map(|&(u, v)| {
                let mut row = vec![0; self.vertices];
                row[u] -= 1;
                row[v] += 1;
                row
            })
            .collect();
        let d2: Vec<Vec<i64>> = self
            .faces
            .iter()
            .map(|face| {
                let mut row = vec![0; n_edges];
                for s in face {
                    row[s.edge] += if s.forward { 1 } else { -1 };
                }
                row
            })
            .collect();
        n_edges - integer_rank(d1) - integer_rank(d2)
    }

    /// Spanning tree rooted at vertex 0.
    ///
    /// For a bordered surface the boundary cycle is walked first, so every
    /// boundary vertex is reached from the base along the boundary; the rest
    /// is breadth-first in edge order.
    pub fn spanning_tree(&self) -> Result<SpanningTree, SurfaceError> {
        let mut parent: Vec<Option<SignedEdge>> = vec![None; self.vertices];
        let mut reached = vec![false; self.vertices];
        let mut is_tree = vec![false; self.edges.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        reached[0] = true;
        queue.push_back(0);
        for &s in self.boundary.iter().flatten() {
            let (u, v) = self.endpoints(s);
            if reached[u] && !reached[v] {
                reached[v] = true;
                parent[v] = Some(s);
                is_tree[s.edge] = true;
                order.push(s);
                queue.push_back(v);
            }
        }
        let mut incident: Vec<Vec<SignedEdge>> = vec![Vec::new(); self.vertices];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            incident[u].push(SignedEdge::fwd(e));
            incident[v].push(SignedEdge::bwd(e));
        }
        while let Some(u) = queue.pop_front() {
            for &s in &incident[u] {
                let v = self.endpoints(s).1;
                if !reached[v] {
                    reached[v] = true;
                    parent[v] = Some(s);
                    is_tree[s.edge] = true;
                    order.push(s);
                    queue.push_back(v);
                }
            }
        }
        if let Some(vertex) = reached.iter().position(|&r| !r) {
            return Err(SurfaceError::Disconnected { vertex });
        }
        let mut path_from_base: Vec<EdgePath> = vec![Vec::new(); self.vertices];
        for &s in &order {
            let (u, v) = self.endpoints(s);
            let mut p = path_from_base[u].clone();
            p.push(s);
            path_from_base[v] = p;
        }
        let loops = (0..self.edges.len())
            .filter(|&e| !is_tree[e])
            .map(|e| {
                let (u, v) = self.edges[e];
                let mut word = path_from_base[u].clone();
                word.push(SignedEdge::fwd(e));
                word.extend(path_from_base[v].iter().rev().map(|s| s.reversed()));
                TreeLoop { edge: e, word }
            })
            .collect();
        Ok(SpanningTree { order, is_tree, path_from_base, loops })
    }

    /// The `n × n` square grid on the torus.
    ///
    /// Vertex `(i, j)` is `i·n + j`; edge `2(i·n + j)` runs `(i,j) → (i,j+1)`
    /// and edge `2(i·n + j) + 1` runs `(i,j) → (i+1,j)`, indices mod `n`.
    /// Face `(i, j)` is `h(i,j) v(i,j+1) h(i+1,j)⁻¹ v(i,j)⁻¹`. For `n = 1`
    /// this is the one-square torus `a b a⁻¹ b⁻¹`.
    pub fn torus_grid(n: usize) -> Self {
        let (edges, faces) = torus_grid_cells(n);
        let loops = torus_grid_loops(n);
        CwSurface::new(n * n, edges, faces, None, Some(loops)).expect("torus grid is a valid surface")
    }

    /// `torus_grid(n)` with face 0 removed; its boundary is that face's word.
    /// Needs `n >= 2` so that the boundary is a simple cycle.
    pub fn punctured_torus_grid(n: usize) -> Self {
        assert!(n >= 2, "punctured torus grid needs n >= 2");
        let (edges, mut faces) = torus_grid_cells(n);
        let boundary = faces.remove(0);
        let loops = torus_grid_loops(n);
        CwSurface::new(n * n, edges, faces, Some(boundary), Some(loops)).expect("punctured grid is a valid surface")
    }

    /// Two vertices joined by two edges, glued along two bigons: `χ = 2`.
    pub fn sphere() -> Self {
        let edges = vec![(0, 1), (0, 1)];
        let faces = vec![
            vec![SignedEdge::fwd(0), SignedEdge::bwd(1)],
            vec![SignedEdge::fwd(1), SignedEdge::bwd(0)],
        ];
        CwSurface::new(2, edges, faces, None, Some(Vec::new())).expect("sphere is a valid surface")
    }

    /// One vertex, `2g` loops and a single `4g`-gon `[a₁,b₁]⋯[a_g,b_g]`.
    /// Genus 0 falls back to [`sphere`](Self::sphere).
    pub fn genus(g: usize) -> Self {
        if g == 0 {
            return Self::sphere();
        }
        let edges = vec![(0, 0); 2 * g];
        let face = word_to_path(&commutator_product(g));
        let loops = (0..2 * g).map(|e| vec![SignedEdge::fwd(e)]).collect();
        CwSurface::new(1, edges, vec![face], None, Some(loops)).expect("polygon model is a valid surface")
    }

    /// One vertex, loops `a₁, …, b_g` and a boundary loop `c` (the last edge),
    /// with one face `[a₁,b₁]⋯[a_g,b_g] c⁻¹`. Genus 0 is the disk with a
    /// single edge on its boundary.
    pub fn bordered_genus(g: usize) -> Self {
        let c = 2 * g;
        let edges = vec![(0, 0); 2 * g + 1];
        let mut face = word_to_path(&commutator_product(g));
        face.push(SignedEdge::bwd(c));
        let loops = (0..2 * g).map(|e| vec![SignedEdge::fwd(e)]).collect();
        CwSurface::new(1, edges, vec![face], Some(vec![SignedEdge::fwd(c)]), Some(loops))
            .expect("bordered polygon model is a valid surface")
    }

    /// The disk: one vertex, one boundary loop, one face.
    pub fn disk() -> Self {
        Self::bordered_genus(0)
    }
}

/// Surface file forms: `{"closed": g}`, `{"bordered": g}`, `{"torus_grid": n}`,
/// `{"punctured_torus_grid": n}`, `{"sphere": true}`, `{"disk": true}` or an
/// explicit complex `{"cw": {...}}` with 1-based signed edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceSpec {
    Closed { closed: usize },
    Bordered { bordered: usize },
    TorusGrid { torus_grid: usize },
    PuncturedTorusGrid { punctured_torus_grid: usize },
    Sphere { sphere: bool },
    Disk { disk: bool },
    Cw { cw: CwSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwSpec {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub faces: Vec<EdgePath>,
    #[serde(default)]
    pub boundary: Option<EdgePath>,
    #[serde(default)]
    pub standard_loops: Option<Vec<EdgePath>>,
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<CwSurface, SurfaceError> {
        match self {
            SurfaceSpec::Closed { closed } => Ok(CwSurface::genus(*closed)),
            SurfaceSpec::Bordered { bordered } => Ok(CwSurface::bordered_genus(*bordered)),
            SurfaceSpec::TorusGrid { torus_grid: n } => {
                if *n < 1 {
                    return Err(SurfaceError::GridSize { what: "torus_grid", n: *n, min: 1 });
                }
                Ok(CwSurface::torus_grid(*n))
            }
            SurfaceSpec::PuncturedTorusGrid { punctured_torus_grid: n } => {
                if *n < 2 {
                    return Err(SurfaceError::GridSize { what: "punctured_torus_grid", n: *n, min: 2 });
                }
                Ok(CwSurface::punctured_torus_grid(*n))
            }
            SurfaceSpec::Sphere { .. } => Ok(CwSurface::sphere()),
            SurfaceSpec::Disk { .. } => Ok(CwSurface::disk()),
            SurfaceSpec::Cw { cw } => CwSurface::new(
                cw.vertices,
                cw.edges.clone(),
                cw.faces.clone(),
                cw.boundary.clone(),
                cw.standard_loops.clone(),
            ),
        }
    }
}

fn word_to_path(word: &[Letter]) -> EdgePath {
    word.iter().map(|l| SignedEdge { edge: l.generator, forward: !l.inverted }).collect()
}

fn torus_grid_cells(n: usize) -> (Vec<(usize, usize)>, Vec<EdgePath>) {
    assert!(n >= 1, "torus grid needs n >= 1");
    let vertex = |i: usize, j: usize| (i % n) * n + (j % n);
    let horizontal = |i: usize, j: usize| 2 * vertex(i, j);
    let vertical = |i: usize, j: usize| 2 * vertex(i, j) + 1;
    let mut edges = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            edges.push((vertex(i, j), vertex(i, j + 1)));
            edges.push((vertex(i, j), vertex(i + 1, j)));
        }
    }
    let faces = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            vec![
                SignedEdge::fwd(horizontal(i, j)),
                SignedEdge::fwd(vertical(i, j + 1)),
                SignedEdge::bwd(horizontal(i + 1, j)),
                SignedEdge::bwd(vertical(i, j)),
            ]
        })
        .collect();
    (edges, faces)
}

/// Row 0 and column 0 of the grid, as loops at vertex 0.
fn torus_grid_loops(n: usize) -> Vec<EdgePath> {
    let row = (0..n).map(|j| SignedEdge::fwd(2 * j)).collect();
    let column = (0..n).map(|i| SignedEdge::fwd(2 * (i * n) + 1)).collect();
    vec![row, column]
}

/// A spanning tree with the tree paths and the loop generator of each
/// non-tree edge.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    /// Tree edges oriented away from the base, in the order they were added.
    pub order: Vec<SignedEdge>,
    pub is_tree: Vec<bool>,
    /// Tree path from the base vertex to each vertex.
    pub path_from_base: Vec<EdgePath>,
    pub loops: Vec<TreeLoop>,
}

/// `path(base → u) · e · path(v → base)` for a non-tree edge `e: u → v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLoop {
    pub edge: usize,
    pub word: EdgePath,
}

impl SpanningTree {
    pub fn tree_edges(&self) -> Vec<usize> {
        self.order.iter().map(|s| s.edge).collect()
    }
}

/// Rank of an integer matrix by fraction-free elimination with gcd
/// reduction of each row.
fn integer_rank(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in rank + 1..rows.len() {
            let factor = rows[r][col];
            if factor == 0 {
                continue;
            }
            let lead = rows[rank][col];
            for k in col..cols {
                rows[r][k] = rows[r][k] * lead - rows[rank][k] * factor;
            }
            let g = rows[r].iter().fold(0i64, |acc, &x| gcd(acc, x.abs()));
            if g > 1 {
                rows[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentations() {
        let p0 = SurfacePresentation::closed(0);
        assert!(p0.generators.is_empty());
        assert_eq!(p0.relator, Some(vec![]));
        let p1 = SurfacePresentation::closed(1);
        assert_eq!(p1.render(p1.relator.as_ref().unwrap()), "a1 b1 a1⁻¹ b1⁻¹");
        let p2 = SurfacePresentation::closed(2);
        assert_eq!(p2.generators.len(), 4);
        assert_eq!(p2.render(p2.relator.as_ref().unwrap()), "a1 b1 a1⁻¹ b1⁻¹ a2 b2 a2⁻¹ b2⁻¹");
        let d = SurfacePresentation::bordered(0);
        assert_eq!(d.boundary_word, Some(vec![]));
        assert!(d.relator.is_none());
        let b2 = SurfacePresentation::bordered(2);
        assert_eq!(b2.boundary_word, p2.relator);
    }

    #[test]
    fn bordered_presentation_matches_cw_euler_characteristic() {
        for g in 0..4 {
            let p = SurfacePresentation::bordered(g);
            let c = CwSurface::bordered_genus(g);
            assert_eq!(c.kind(), SurfaceKind::Bordered { genus: g });
            assert_eq!(c.euler_characteristic(), 1 - p.generators.len() as i64);
        }
    }

    #[test]
    fn torus_grid_counts() {
        let t1 = CwSurface::torus_grid(1);
        assert_eq!((t1.n_vertices(), t1.n_edges(), t1.n_faces()), (1, 2, 1));
        assert_eq!(t1.faces()[0], vec![SignedEdge::fwd(0), SignedEdge::fwd(1), SignedEdge::bwd(0), SignedEdge::bwd(1)]);
        assert_eq!(t1.euler_characteristic(), 0);
        for n in 1..5 {
            let t = CwSurface::torus_grid(n);
            assert_eq!((t.n_vertices(), t.n_edges(), t.n_faces()), (n * n, 2 * n * n, n * n));
            assert_eq!(t.kind(), SurfaceKind::Closed { genus: 1 });
            assert_eq!(t.h1_rank(), 2);
        }
    }

    #[test]
    fn sphere_and_genus_models() {
        assert_eq!(CwSurface::sphere().euler_characteristic(), 2);
        assert_eq!(CwSurface::sphere().h1_rank(), 0);
        assert_eq!(CwSurface::genus(2).euler_characteristic(), -2);
        for g in 1..5 {
            assert_eq!(CwSurface::genus(g).h1_rank(), 2 * g);
        }
    }

    #[test]
    fn spanning_trees() {
        let t1 = CwSurface::torus_grid(1).spanning_tree().unwrap();
        assert!(t1.order.is_empty());
        assert_eq!(t1.loops.len(), 2);
        assert_eq!(t1.loops[0].word, vec![SignedEdge::fwd(0)]);
        let t2 = CwSurface::torus_grid(2).spanning_tree().unwrap();
        assert_eq!(t2.order.len(), 3);
        assert_eq!(t2.loops.len(), 5);
        let s = CwSurface::sphere().spanning_tree().unwrap();
        assert_eq!(s.loops.len(), 1);
        assert_eq!(s.loops[0].word, vec![SignedEdge::fwd(1), SignedEdge::bwd(0)]);
    }

    #[test]
    fn boundary_is_walked_first() {
        let c = CwSurface::punctured_torus_grid(2);
        assert_eq!(c.kind(), SurfaceKind::Bordered { genus: 1 });
        let tree = c.spanning_tree().unwrap();
        let boundary = c.boundary().unwrap();
        assert_eq!(tree.order, boundary[..3].to_vec());
        assert_eq!(c.h1_rank(), 2);
    }

    #[test]
    fn rejects_bad_complexes() {
        let disconnected = CwSurface::new(2, vec![(0, 0), (0, 0)], vec![vec![
            SignedEdge::fwd(0),
            SignedEdge::fwd(1),
            SignedEdge::bwd(0),
            SignedEdge::bwd(1),
        ]], None, None);
        assert_eq!(disconnected, Err(SurfaceError::Disconnected { vertex: 1 }));
        let broken = CwSurface::new(2, vec![(0, 1), (0, 1)], vec![vec![SignedEdge::fwd(0), SignedEdge::fwd(1)]], None, None);
        assert!(matches!(broken, Err(SurfaceError::BrokenPath { .. })));
        let once = CwSurface::new(1, vec![(0, 0)], vec![vec![SignedEdge::fwd(0)]], None, None);
        assert!(matches!(once, Err(SurfaceError::NotASurface { .. })));
    }

    #[test]
    fn signed_edge_encoding() {
        assert_eq!(SignedEdge::fwd(0).to_signed(), 1);
        assert_eq!(SignedEdge::from_signed(-3), Some(SignedEdge::bwd(2)));
        assert_eq!(SignedEdge::from_signed(0), None);
    }

    #[test]
    fn surface_file_forms() {
        let parse = |t: &str| serde_json::from_str::<SurfaceSpec>(t).unwrap().build();
        assert_eq!(parse(r#"{"closed": 2}"#).unwrap(), CwSurface::genus(2));
        assert_eq!(parse(r#"{"torus_grid": 2}"#).unwrap(), CwSurface::torus_grid(2));
        assert_eq!(parse(r#"{"sphere": true}"#).unwrap(), CwSurface::sphere());
        assert_eq!(parse(r#"{"disk": true}"#).unwrap(), CwSurface::disk());
        assert!(matches!(parse(r#"{"punctured_torus_grid": 1}"#), Err(SurfaceError::GridSize { .. })));
        let torus = parse(r#"{"cw": {"vertices": 1, "edges": [[0,0],[0,0]], "faces": [[1,2,-1,-2]], "standard_loops": [[1],[2]]}}"#);
        assert_eq!(torus.unwrap(), CwSurface::torus_grid(1));
    }
}
