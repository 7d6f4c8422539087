//! Flat groupoid-valued fields on a CW surface and the pointwise gauge action.
//!
//! A field assigns an object to every vertex and an arrow `X(u) → X(v)` to
//! every edge `u → v`. It is flat when the arrows along every face compose to
//! the identity. A path `e₁ e₂ ⋯ e_k` evaluates to `X̂(e_k)⋯X̂(e₁)`, with
//! backwards steps contributing the inverse arrow.
//!
//! A gauge element picks an arrow `φ(v)` out of each `X(v)` and acts by
//! `X(v) ↦ t(φ(v))`, `X̂(e) ↦ φ(v)·X̂(e)·φ(u)⁻¹` for `e: u → v`. Any gauge
//! element is the product of the moves that are non-trivial at a single
//! vertex (apply them one vertex at a time; each later move sees the
//! already-updated objects), so orbits are the connected components of the
//! graph whose edges are single-vertex moves.
//!
//! On a bordered surface a boundary subgroupoid `H` constrains fields and
//! gauge: boundary vertices take objects of `H`, boundary edges take arrows of
//! `H`, and the gauge at boundary vertices takes values in `H`.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingroupoid::{FiniteGroupoid, GroupoidError, Subgroupoid};
use crate::surface::{CwSurface, SignedEdge, SpanningTree, SurfaceError};

/// Vertex and edge assignment of a field. Ordered lexicographically by
/// `(vertex_map, edge_map)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeMorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

/// An arrow out of the current object at every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeElement {
    pub phi: Vec<usize>,
}

impl GaugeElement {
    pub fn identity(g: &FiniteGroupoid, m: &LatticeMorphism) -> Self {
        GaugeElement { phi: m.vertex_map.iter().map(|&x| g.identity(x)).collect() }
    }

    /// Pointwise `self · first`, the element acting as `first` followed by
    /// `self`.
    pub fn after(&self, first: &GaugeElement, g: &FiniteGroupoid) -> Option<GaugeElement> {
        let phi = self.phi.iter().zip(&first.phi).map(|(&b, &a)| g.compose(b, a)).collect::<Option<_>>()?;
        Some(GaugeElement { phi })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("{what} has length {found}, expected {expected}")]
    Shape { what: &'static str, expected: usize, found: usize },
    #[error("gauge arrow {arrow} at vertex {vertex} does not start at the field's object {object}")]
    NotAnchored { vertex: usize, arrow: usize, object: usize },
    #[error("gauge arrow {arrow} at boundary vertex {vertex} is not in the boundary subgroupoid")]
    GaugeOffBoundary { vertex: usize, arrow: usize },
    #[error("enumeration would visit up to {candidates} candidates, above the limit of {limit}")]
    TooLarge { candidates: u128, limit: u64 },
}

/// A failed condition of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatnessViolation {
    /// Edge arrow does not run between the images of its endpoints.
    Anchor { edge: usize, expected: (usize, usize), found: (usize, usize) },
    /// Composing around the face does not give the identity.
    Face { face: usize, holonomy: usize },
    /// Boundary vertex outside the boundary subgroupoid's objects.
    BoundaryObject { vertex: usize, object: usize },
    /// Boundary edge outside the boundary subgroupoid.
    BoundaryArrow { edge: usize, arrow: usize },
}

/// Holonomy of a field at the base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Holonomy {
    pub base_object: usize,
    /// One entry per non-tree edge, in edge order.
    pub tree_loops: Vec<usize>,
    /// Values on the surface's standard loops `a₁, b₁, …`, when it has them.
    /// Path values reverse concatenation order; their inverses form the
    /// representation of the surface group.
    pub standard: Option<Vec<usize>>,
}

/// Options for [`Lattice::enumerate_flat`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    /// Fix every spanning-tree edge to an identity arrow.
    pub gauge_fixed: bool,
    /// Cap on the a-priori candidate bound.
    pub limit: u64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { gauge_fixed: false, limit: crate::DEFAULT_LIMIT }
    }
}

/// A gauge orbit with its least member as representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaugeOrbit {
    pub representative: LatticeMorphism,
    pub size: usize,
    /// Indices into the field list passed to [`Lattice::gauge_orbits`].
    #[serde(skip)]
    pub members: Vec<usize>,
}

/// A surface, a target groupoid and (for bordered surfaces) a boundary
/// subgroupoid.
#[derive(Clone, Debug)]
pub struct Lattice<'a> {
    surface: &'a CwSurface,
    groupoid: &'a FiniteGroupoid,
    boundary: Subgroupoid,
    tree: SpanningTree,
    on_boundary: Vec<bool>,
    boundary_edge: Vec<bool>,
}

impl<'a> Lattice<'a> {
    /// `boundary` is ignored on closed surfaces and defaults to the whole
    /// groupoid on bordered ones.
    pub fn new(
        surface: &'a CwSurface,
        groupoid: &'a FiniteGroupoid,
        boundary: Option<Subgroupoid>,
    ) -> Result<Self, LatticeError> {
        let boundary = match boundary {
            Some(h) => {
                h.ensure_fits(groupoid)?;
                h
            }
            None => Subgroupoid::full(groupoid),
        };
        Ok(Lattice {
            surface,
            groupoid,
            boundary,
            tree: surface.spanning_tree()?,
            on_boundary: surface.boundary_vertices(),
            boundary_edge: surface.boundary_edges(),
        })
    }

    pub fn surface(&self) -> &CwSurface {
        self.surface
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        self.groupoid
    }

    pub fn boundary_subgroupoid(&self) -> &Subgroupoid {
        &self.boundary
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    fn arrow_of(&self, m: &LatticeMorphism, s: SignedEdge) -> usize {
        let a = m.edge_map[s.edge];
        if s.forward {
            a
        } else {
            self.groupoid.inverse(a)
        }
    }

    /// Arrow obtained by walking `path` from `start`. Assumes the field is
    /// anchored.
    pub fn path_arrow(&self, m: &LatticeMorphism, start: usize, path: &[SignedEdge]) -> usize {
        let g = self.groupoid;
        path.iter().fold(g.identity(m.vertex_map[start]), |acc, &s| g.mul(self.arrow_of(m, s), acc))
    }

    fn check_shape(&self, m: &LatticeMorphism) -> Result<(), LatticeError> {
        let c = self.surface;
        if m.vertex_map.len() != c.n_vertices() {
            return Err(LatticeError::Shape { what: "vertex_map", expected: c.n_vertices(), found: m.vertex_map.len() });
        }
        if m.edge_map.len() != c.n_edges() {
            return Err(LatticeError::Shape { what: "edge_map", expected: c.n_edges(), found: m.edge_map.len() });
        }
        for &x in &m.vertex_map {
            self.groupoid.check_object(x)?;
        }
        for &a in &m.edge_map {
            self.groupoid.check_arrow(a)?;
        }
        Ok(())
    }

    /// All violated conditions; empty means the field is flat and anchored.
    /// Faces are only evaluated once every edge is anchored.
    pub fn check_flatness(&self, m: &LatticeMorphism) -> Result<Vec<FlatnessViolation>, LatticeError> {
        self.check_shape(m)?;
        let g = self.groupoid;
        let mut out = Vec::new();
        for (edge, &(u, v)) in self.surface.edges().iter().enumerate() {
            let a = m.edge_map[edge];
            let expected = (m.vertex_map[u], m.vertex_map[v]);
            let found = (g.source(a), g.target(a));
            if expected != found {
                out.push(FlatnessViolation::Anchor { edge, expected, found });
            }
        }
        if self.surface.boundary().is_some() {
            for (vertex, &object) in m.vertex_map.iter().enumerate() {
                if self.on_boundary[vertex] && !self.boundary.contains_object(object) {
                    out.push(FlatnessViolation::BoundaryObject { vertex, object });
                }
            }
            for (edge, &arrow) in m.edge_map.iter().enumerate() {
                if self.boundary_edge[edge] && !self.boundary.contains_arrow(arrow) {
                    out.push(FlatnessViolation::BoundaryArrow { edge, arrow });
                }
            }
        }
        if out.iter().any(|v| matches!(v, FlatnessViolation::Anchor { .. })) {
            return Ok(out);
        }
        for (face, word) in self.surface.faces().iter().enumerate() {
            let start = self.surface.endpoints(word[0]).0;
            let holonomy = self.path_arrow(m, start, word);
            if !g.is_identity(holonomy) {
                out.push(FlatnessViolation::Face { face, holonomy });
            }
        }
        Ok(out)
    }

    pub fn is_flat(&self, m: &LatticeMorphism) -> bool {
        self.check_flatness(m).map(|v| v.is_empty()).unwrap_or(false)
    }

    /// Acts by `φ` on an anchored field.
    pub fn apply_gauge(&self, m: &LatticeMorphism, phi: &GaugeElement) -> Result<LatticeMorphism, LatticeError> {
        self.check_shape(m)?;
        let g = self.groupoid;
        if phi.phi.len() != m.vertex_map.len() {
            return Err(LatticeError::Shape { what: "gauge", expected: m.vertex_map.len(), found: phi.phi.len() });
        }
        for (vertex, &arrow) in phi.phi.iter().enumerate() {
            g.check_arrow(arrow)?;
            let object = m.vertex_map[vertex];
            if g.source(arrow) != object {
                return Err(LatticeError::NotAnchored { vertex, arrow, object });
            }
            if self.surface.boundary().is_some() && self.on_boundary[vertex] && !self.boundary.contains_arrow(arrow) {
                return Err(LatticeError::GaugeOffBoundary { vertex, arrow });
            }
        }
        for (edge, &(u, v)) in self.surface.edges().iter().enumerate() {
            let a = m.edge_map[edge];
            if g.source(a) != m.vertex_map[u] || g.target(a) != m.vertex_map[v] {
                return Err(LatticeError::Groupoid(GroupoidError::NotConnecting {
                    arrow: a,
                    from: m.vertex_map[u],
                    to: m.vertex_map[v],
                }));
            }
        }
        Ok(self.gauge_unchecked(m, &phi.phi))
    }

    fn gauge_unchecked(&self, m: &LatticeMorphism, phi: &[usize]) -> LatticeMorphism {
        let g = self.groupoid;
        let vertex_map = phi.iter().map(|&a| g.target(a)).collect();
        let edge_map = self
            .surface
            .edges()
            .iter()
            .zip(&m.edge_map)
            .map(|(&(u, v), &a)| g.mul(g.mul(phi[v], a), g.inverse(phi[u])))
            .collect();
        LatticeMorphism { vertex_map, edge_map }
    }

    /// Moves non-trivial only at `vertex`, by `arrow`.
    fn single_vertex_move(&self, m: &LatticeMorphism, vertex: usize, arrow: usize) -> LatticeMorphism {
        let g = self.groupoid;
        let mut out = m.clone();
        out.vertex_map[vertex] = g.target(arrow);
        let inv = g.inverse(arrow);
        for (edge, &(u, v)) in self.surface.edges().iter().enumerate() {
            let mut a = out.edge_map[edge];
            if v == vertex {
                a = g.mul(arrow, a);
            }
            if u == vertex {
                a = g.mul(a, inv);
            }
            out.edge_map[edge] = a;
        }
        out
    }

    /// Arrows allowed as gauge values at `vertex` over `object`.
    fn gauge_choices(&self, vertex: usize, object: usize) -> Vec<usize> {
        if self.surface.boundary().is_some() && self.on_boundary[vertex] {
            self.boundary.arrows_from(self.groupoid, object)
        } else {
            self.groupoid.arrows_from(object).to_vec()
        }
    }

    /// Edge order used by the search: tree edges outward from the base, then
    /// the remaining edges by index.
    fn search_order(&self) -> Vec<SignedEdge> {
        let mut order = self.tree.order.clone();
        order.extend((0..self.surface.n_edges()).filter(|&e| !self.tree.is_tree[e]).map(SignedEdge::fwd));
        order
    }

    fn allowed_objects(&self, vertex: usize) -> Vec<usize> {
        (0..self.groupoid.n_objects())
            .filter(|&x| !(self.surface.boundary().is_some() && self.on_boundary[vertex]) || self.boundary.contains_object(x))
            .collect()
    }

    /// A-priori bound on the leaves of the search tree.
    pub fn candidate_bound(&self, options: &EnumerateOptions) -> u128 {
        let g = self.groupoid;
        let max_out = (0..g.n_objects()).map(|x| g.arrows_from(x).len()).max().unwrap_or(0) as u128;
        let max_hom = if options.gauge_fixed {
            (0..g.n_objects()).map(|x| g.isotropy_arrows(x).len()).max().unwrap_or(0)
        } else {
            (0..g.n_objects())
                .flat_map(|x| (0..g.n_objects()).map(move |y| (x, y)))
                .map(|(x, y)| g.hom(x, y).len())
                .max()
                .unwrap_or(0)
        } as u128;
        let tree = if options.gauge_fixed { 1 } else { max_out.saturating_pow(self.tree.order.len() as u32) };
        let loops = max_hom.saturating_pow(self.tree.loops.len() as u32);
        (g.n_objects() as u128).saturating_mul(tree).saturating_mul(loops)
    }

    /// Every flat field (satisfying the boundary conditions), sorted.
    ///
    /// Edges are assigned tree-first, so each tree edge fixes the object of
    /// its far end and each later edge ranges over one hom-set. A face is
    /// checked as soon as its last edge is assigned. With `gauge_fixed`, tree
    /// edges are identities and the result has one field per holonomy at the
    /// base, i.e. `|fields| / Π_{v ≠ base} |s⁻¹(X(v))|` of the unfixed count.
    pub fn enumerate_flat(&self, options: &EnumerateOptions) -> Result<Vec<LatticeMorphism>, LatticeError> {
        let candidates = self.candidate_bound(options);
        if candidates > options.limit as u128 {
            return Err(LatticeError::TooLarge { candidates, limit: options.limit });
        }
        let order = self.search_order();
        // faces whose last edge (in search order) is at position i
        let mut position = vec![0; self.surface.n_edges()];
        for (i, s) in order.iter().enumerate() {
            position[s.edge] = i;
        }
        let mut ready: Vec<Vec<usize>> = vec![Vec::new(); order.len() + 1];
        for (f, word) in self.surface.faces().iter().enumerate() {
            let last = word.iter().map(|s| position[s.edge]).max().map_or(0, |p| p + 1);
            ready[last].push(f);
        }
        let search = Search { lattice: self, order: &order, ready: &ready, gauge_fixed: options.gauge_fixed };

        let n = self.surface.n_vertices();
        let mut roots: Vec<(usize, Option<usize>)> = Vec::new();
        for x in self.allowed_objects(0) {
            if order.is_empty() {
                roots.push((x, None));
                continue;
            }
            let mut vertex_map = vec![None; n];
            vertex_map[0] = Some(x);
            roots.extend(search.choices(0, &vertex_map).into_iter().map(|a| (x, Some(a))));
        }
        let mut fields: Vec<LatticeMorphism> = roots
            .into_par_iter()
            .flat_map_iter(|(x, first)| {
                let mut vertex_map = vec![None; n];
                vertex_map[0] = Some(x);
                let mut edge_map = vec![usize::MAX; self.surface.n_edges()];
                let mut out = Vec::new();
                match first {
                    Some(a) => {
                        if search.assign(0, a, &mut vertex_map, &mut edge_map) {
                            search.extend(1, &mut vertex_map, &mut edge_map, &mut out);
                        }
                    }
                    None => search.extend(0, &mut vertex_map, &mut edge_map, &mut out),
                }
                out
            })
            .collect();
        fields.sort();
        Ok(fields)
    }

    /// Partitions `fields` into gauge orbits, ordered by representative.
    ///
    /// `fields` should be closed under gauge, as returned by
    /// [`enumerate_flat`](Self::enumerate_flat) without gauge fixing. Moves
    /// leading outside the set are ignored.
    pub fn gauge_orbits(&self, fields: &[LatticeMorphism]) -> Vec<GaugeOrbit> {
        let index: HashMap<&LatticeMorphism, usize> = fields.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let links: Vec<(usize, usize)> = fields
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, m)| {
                let mut out = Vec::new();
                for (vertex, &object) in m.vertex_map.iter().enumerate() {
                    for arrow in self.gauge_choices(vertex, object) {
                        if self.groupoid.is_identity(arrow) {
                            continue;
                        }
                        let moved = self.single_vertex_move(m, vertex, arrow);
                        if let Some(&j) = index.get(&moved) {
                            out.push((i, j));
                        }
                    }
                }
                out
            })
            .collect();
        let mut uf = UnionFind::<usize>::new(fields.len());
        for (i, j) in links {
            uf.union(i, j);
        }
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut orbits: Vec<GaugeOrbit> = Vec::new();
        let mut sorted: Vec<usize> = (0..fields.len()).collect();
        sorted.sort_by(|&a, &b| fields[a].cmp(&fields[b]));
        for i in sorted {
            let root = uf.find(i);
            let k = *by_root.entry(root).or_insert_with(|| {
                orbits.push(GaugeOrbit { representative: fields[i].clone(), size: 0, members: Vec::new() });
                orbits.len() - 1
            });
            orbits[k].size += 1;
            orbits[k].members.push(i);
        }
        orbits
    }

    /// Holonomy at the base vertex along the tree loops and, if present, the
    /// standard loops.
    pub fn holonomy(&self, m: &LatticeMorphism) -> Holonomy {
        let tree_loops = self.tree.loops.iter().map(|l| self.path_arrow(m, 0, &l.word)).collect();
        let standard = self
            .surface
            .standard_loops()
            .map(|loops| loops.iter().map(|l| self.path_arrow(m, 0, l)).collect());
        Holonomy { base_object: m.vertex_map[0], tree_loops, standard }
    }
}

struct Search<'s, 'a> {
    lattice: &'s Lattice<'a>,
    order: &'s [SignedEdge],
    ready: &'s [Vec<usize>],
    gauge_fixed: bool,
}

impl Search<'_, '_> {
    /// Arrows allowed for the edge at position `i`, given the objects fixed
    /// so far.
    fn choices(&self, i: usize, vertex_map: &[Option<usize>]) -> Vec<usize> {
        let l = self.lattice;
        let g = l.groupoid;
        let s = self.order[i];
        let (u, v) = l.surface.endpoints(s);
        let x = vertex_map[u].expect("search order reaches the start of every edge first");
        let mut out: Vec<usize> = match vertex_map[v] {
            Some(y) => g.hom(x, y).to_vec(),
            None if self.gauge_fixed => vec![g.identity(x)],
            None => g.arrows_from(x).to_vec(),
        };
        let constrained = l.surface.boundary().is_some();
        out.retain(|&a| {
            let far_ok = vertex_map[v].is_some()
                || !(constrained && l.on_boundary[v])
                || l.boundary.contains_object(g.target(a));
            let edge_ok = !(constrained && l.boundary_edge[s.edge]) || l.boundary.contains_arrow(a);
            far_ok && edge_ok
        });
        // a stored edge value runs along the edge's own orientation
        if !s.forward {
            out = out.into_iter().map(|a| g.inverse(a)).collect();
            out.sort_unstable();
        }
        out
    }

    /// Records edge value `a` at position `i`; false if a face closing here
    /// is not flat.
    fn assign(&self, i: usize, a: usize, vertex_map: &mut [Option<usize>], edge_map: &mut [usize]) -> bool {
        let l = self.lattice;
        let g = l.groupoid;
        let s = self.order[i];
        edge_map[s.edge] = a;
        let (u, v) = l.surface.edges()[s.edge];
        vertex_map[u].get_or_insert(g.source(a));
        vertex_map[v].get_or_insert(g.target(a));
        self.ready[i + 1].iter().all(|&f| {
            let word = &l.surface.faces()[f];
            let start = l.surface.endpoints(word[0]).0;
            let x = vertex_map[start].expect("assigned");
            let h = word.iter().fold(g.identity(x), |acc, &s| {
                let a = edge_map[s.edge];
                g.mul(if s.forward { a } else { g.inverse(a) }, acc)
            });
            g.is_identity(h)
        })
    }

    fn extend(&self, i: usize, vertex_map: &mut Vec<Option<usize>>, edge_map: &mut Vec<usize>, out: &mut Vec<LatticeMorphism>) {
        if i == self.order.len() {
            out.push(LatticeMorphism {
                vertex_map: vertex_map.iter().map(|x| x.expect("connected complex")).collect(),
                edge_map: edge_map.clone(),
            });
            return;
        }
        let s = self.order[i];
        let (_, v) = self.lattice.surface.endpoints(s);
        let far_was_set = vertex_map[v].is_some();
        for a in self.choices(i, vertex_map) {
            if self.assign(i, a, vertex_map, edge_map) {
                self.extend(i + 1, vertex_map, edge_map, out);
            }
            if !far_was_set {
                vertex_map[v] = None;
            }
        }
        edge_map[s.edge] = usize::MAX;
    }
}
