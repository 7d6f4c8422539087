//! Finite groupoids stored as dense composition tables.
//!
//! Arrows and objects are dense indices. The product `compose(g, h)` means
//! "g after h" and exists exactly when `target(h) == source(g)`; then
//! `source(gh) = source(h)` and `target(gh) = target(g)`.
//!
//! A [`FiniteGroupoid`] can only be obtained through validation, so every
//! value of the type satisfies the groupoid axioms. Use [`validate`] to get a
//! report on raw [`GroupoidTables`] without failing.

mod bisection;
mod constructors;
mod spec;
mod sub;

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bisection::{Bisection, BisectionGroup, BisectionError, MAX_BISECTION_CANDIDATES};
pub use constructors::{cyclic_group_table, permutations, symmetric_group_table, GroupTable};
pub use spec::{GroupSpec, GroupoidSpec, SubgroupoidSpec};
pub use sub::{double_cosets, DoubleCoset, Subgroupoid};

const NONE: usize = usize::MAX;
const MAX_REPORTED_VIOLATIONS: usize = 64;

/// One arrow row of [`GroupoidTables`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub id: usize,
    pub src: usize,
    pub tgt: usize,
}

/// Raw, unvalidated groupoid data in the on-disk layout.
///
/// `compose` lists triples `[g, h, gh]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidTables {
    pub objects: usize,
    pub arrows: Vec<ArrowSpec>,
    pub identity: Vec<usize>,
    pub inverse: Vec<usize>,
    pub compose: Vec<[usize; 3]>,
}

/// Malformed tables: these are not axiom failures, the data cannot even be
/// read as a partial multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("arrow ids must be dense 0..n in order; row {row} has id {id}")]
    NonDenseArrowIds { row: usize, id: usize },
    #[error("arrow {arrow} has endpoint {object} outside 0..{objects}")]
    ObjectOutOfRange { arrow: usize, object: usize, objects: usize },
    #[error("{table} table has length {len}, expected {expected}")]
    TableLength { table: &'static str, len: usize, expected: usize },
    #[error("{table} table references arrow {arrow} but there are only {arrows} arrows")]
    ArrowOutOfRange { table: &'static str, arrow: usize, arrows: usize },
    #[error("compose entry ({g}, {h}) is given for a non-composable pair")]
    NotComposable { g: usize, h: usize },
    #[error("compose entry ({g}, {h}) is given twice with different products")]
    ConflictingProduct { g: usize, h: usize },
    #[error("compose table is missing the composable pair ({g}, {h})")]
    MissingProduct { g: usize, h: usize },
}

/// The axiom a [`Violation`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// `s(gh) = s(h)` and `t(gh) = t(g)`.
    ProductEndpoints,
    /// `(fg)h = f(gh)`.
    Associativity,
    /// `s(id x) = t(id x) = x`.
    IdentityEndpoints,
    /// `id(t g) g = g`.
    LeftIdentity,
    /// `g id(s g) = g`.
    RightIdentity,
    /// `g g⁻¹ = id(t g)`.
    RightInverse,
    /// `g⁻¹ g = id(s g)`.
    LeftInverse,
}

impl Axiom {
    pub fn describe(self) -> &'static str {
        match self {
            Axiom::ProductEndpoints => "s(gh)=s(h), t(gh)=t(g)",
            Axiom::Associativity => "(fg)h=f(gh)",
            Axiom::IdentityEndpoints => "s(id x)=t(id x)=x",
            Axiom::LeftIdentity => "id(t g)·g=g",
            Axiom::RightIdentity => "g·id(s g)=g",
            Axiom::RightInverse => "g·g⁻¹=id",
            Axiom::LeftInverse => "g⁻¹·g=id",
        }
    }
}

/// A failed axiom with the arrow ids that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// True when more violations existed than were recorded.
    pub truncated: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, axiom: Axiom, witness: Vec<usize>) {
        if self.violations.len() < MAX_REPORTED_VIOLATIONS {
            self.violations.push(Violation { axiom, witness });
        } else {
            self.truncated = true;
        }
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error("groupoid axioms fail: {}", summarize(.0))]
    Axioms(ValidationReport),
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("table is not a group action: {0}")]
    NotAnAction(String),
    #[error("object {object} is out of range (groupoid has {objects} objects)")]
    ObjectOutOfRange { object: usize, objects: usize },
    #[error("arrow {arrow} is out of range (groupoid has {arrows} arrows)")]
    ArrowOutOfRange { arrow: usize, arrows: usize },
    #[error("arrow {arrow} does not go from object {from} to object {to}")]
    NotConnecting { arrow: usize, from: usize, to: usize },
    #[error("not a subgroupoid: {0}")]
    NotASubgroupoid(String),
}

fn summarize(report: &ValidationReport) -> String {
    let mut names: Vec<&str> = report.violations.iter().map(|v| v.axiom.describe()).collect();
    names.dedup();
    names.join("; ")
}

/// A validated finite groupoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    n_objects: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
    identity: Vec<usize>,
    inverse: Vec<usize>,
    /// Row-major `n_arrows × n_arrows` table, `NONE` off the composable set.
    table: Vec<usize>,
    /// Arrows grouped by source object, ascending.
    from: Vec<Vec<usize>>,
    /// Arrows grouped by target object, ascending.
    into: Vec<Vec<usize>>,
    /// `hom[x * n + y]`: arrows `x -> y`, ascending.
    hom: Vec<Vec<usize>>,
}

/// Checks the groupoid axioms on raw tables.
///
/// Structural problems (wrong lengths, out-of-range ids, a compose table that
/// is not exactly defined on the composable pairs) are reported as `Err`;
/// axiom failures are listed in the returned report.
pub fn validate(tables: &GroupoidTables) -> Result<ValidationReport, StructuralError> {
    let g = FiniteGroupoid::from_tables_unchecked(tables)?;
    Ok(g.axiom_report())
}

impl FiniteGroupoid {
    /// Builds and validates a groupoid from raw tables.
    pub fn from_tables(tables: &GroupoidTables) -> Result<Self, GroupoidError> {
        let g = Self::from_tables_unchecked(tables)?;
        let report = g.axiom_report();
        if report.passed() {
            Ok(g)
        } else {
            Err(GroupoidError::Axioms(report))
        }
    }

    pub(crate) fn from_parts(
        n_objects: usize,
        src: Vec<usize>,
        tgt: Vec<usize>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        mut product: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self, GroupoidError> {
        let n = src.len();
        let mut table = vec![NONE; n * n];
        for g in 0..n {
            for h in 0..n {
                if tgt[h] == src[g] {
                    table[g * n + h] = product(g, h);
                }
            }
        }
        let g = Self::assemble(n_objects, src, tgt, identity, inverse, table)?;
        let report = g.axiom_report();
        if report.passed() {
            Ok(g)
        } else {
            Err(GroupoidError::Axioms(report))
        }
    }

    fn from_tables_unchecked(t: &GroupoidTables) -> Result<Self, StructuralError> {
        let n = t.arrows.len();
        for (row, a) in t.arrows.iter().enumerate() {
            if a.id != row {
                return Err(StructuralError::NonDenseArrowIds { row, id: a.id });
            }
            for object in [a.src, a.tgt] {
                if object >= t.objects {
                    return Err(StructuralError::ObjectOutOfRange { arrow: row, object, objects: t.objects });
                }
            }
        }
        let src: Vec<usize> = t.arrows.iter().map(|a| a.src).collect();
        let tgt: Vec<usize> = t.arrows.iter().map(|a| a.tgt).collect();
        let mut table = vec![NONE; n * n];
        for &[g, h, gh] in &t.compose {
            for arrow in [g, h, gh] {
                if arrow >= n {
                    return Err(StructuralError::ArrowOutOfRange { table: "compose", arrow, arrows: n });
                }
            }
            if tgt[h] != src[g] {
                return Err(StructuralError::NotComposable { g, h });
            }
            let slot = &mut table[g * n + h];
            if *slot != NONE && *slot != gh {
                return Err(StructuralError::ConflictingProduct { g, h });
            }
            *slot = gh;
        }
        for g in 0..n {
            for h in 0..n {
                if tgt[h] == src[g] && table[g * n + h] == NONE {
                    return Err(StructuralError::MissingProduct { g, h });
                }
            }
        }
        Self::assemble(t.objects, src, tgt, t.identity.clone(), t.inverse.clone(), table)
    }

    fn assemble(
        n_objects: usize,
        src: Vec<usize>,
        tgt: Vec<usize>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        table: Vec<usize>,
    ) -> Result<Self, StructuralError> {
        let n = src.len();
        if identity.len() != n_objects {
            return Err(StructuralError::TableLength { table: "identity", len: identity.len(), expected: n_objects });
        }
        if inverse.len() != n {
            return Err(StructuralError::TableLength { table: "inverse", len: inverse.len(), expected: n });
        }
        for (table_name, values) in [("identity", &identity), ("inverse", &inverse)] {
            if let Some(&arrow) = values.iter().find(|&&a| a >= n) {
                return Err(StructuralError::ArrowOutOfRange { table: table_name, arrow, arrows: n });
            }
        }
        let mut from = vec![Vec::new(); n_objects];
        let mut into = vec![Vec::new(); n_objects];
        let mut hom = vec![Vec::new(); n_objects * n_objects];
        for a in 0..n {
            from[src[a]].push(a);
            into[tgt[a]].push(a);
            hom[src[a] * n_objects + tgt[a]].push(a);
        }
        Ok(FiniteGroupoid { n_objects, src, tgt, identity, inverse, table, from, into, hom })
    }

    fn axiom_report(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.n_arrows();
        for x in 0..self.n_objects {
            let e = self.identity[x];
            if self.src[e] != x || self.tgt[e] != x {
                report.record(Axiom::IdentityEndpoints, vec![e]);
            }
        }
        for g in 0..n {
            for &h in &self.into[self.src[g]] {
                let gh = self.table[g * n + h];
                if self.src[gh] != self.src[h] || self.tgt[gh] != self.tgt[g] {
                    report.record(Axiom::ProductEndpoints, vec![g, h]);
                }
            }
        }
        // Associativity only makes sense once products land where expected.
        if !report.violates(Axiom::ProductEndpoints) {
            for f in 0..n {
                for &g in &self.into[self.src[f]] {
                    let fg = self.table[f * n + g];
                    for &h in &self.into[self.src[g]] {
                        let gh = self.table[g * n + h];
                        if self.table[fg * n + h] != self.table[f * n + gh] {
                            report.record(Axiom::Associativity, vec![f, g, h]);
                        }
                    }
                }
            }
        }
        for g in 0..n {
            let left = self.identity[self.tgt[g]];
            if self.src[left] != self.tgt[g] || self.table[left * n + g] != g {
                report.record(Axiom::LeftIdentity, vec![g]);
            }
            let right = self.identity[self.src[g]];
            if self.tgt[right] != self.src[g] || self.table[g * n + right] != g {
                report.record(Axiom::RightIdentity, vec![g]);
            }
            let inv = self.inverse[g];
            let ok_right = self.tgt[inv] == self.src[g] && self.table[g * n + inv] == self.identity[self.tgt[g]];
            if !ok_right {
                report.record(Axiom::RightInverse, vec![g, inv]);
            }
            let ok_left = self.src[g] == self.tgt[inv] && self.table[inv * n + g] == self.identity[self.src[g]];
            if !ok_left {
                report.record(Axiom::LeftInverse, vec![inv, g]);
            }
        }
        report
    }

    /// Serializes back to the explicit table layout.
    pub fn to_tables(&self) -> GroupoidTables {
        let n = self.n_arrows();
        let arrows = (0..n).map(|id| ArrowSpec { id, src: self.src[id], tgt: self.tgt[id] }).collect();
        let mut compose = Vec::new();
        for g in 0..n {
            for &h in &self.into[self.src[g]] {
                compose.push([g, h, self.table[g * n + h]]);
            }
        }
        GroupoidTables {
            objects: self.n_objects,
            arrows,
            identity: self.identity.clone(),
            inverse: self.inverse.clone(),
            compose,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_arrows(&self) -> usize {
        self.src.len()
    }

    pub fn source(&self, a: usize) -> usize {
        self.src[a]
    }

    pub fn target(&self, a: usize) -> usize {
        self.tgt[a]
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.identity[self.src[a]] == a
    }

    /// `g` after `h`, or `None` when `target(h) != source(g)`.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        let p = self.table[g * self.n_arrows() + h];
        (p != NONE).then_some(p)
    }

    /// Like [`compose`](Self::compose) but panics off the composable set.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.compose(g, h)
            .unwrap_or_else(|| panic!("arrows {g} and {h} are not composable"))
    }

    /// `a h a⁻¹`.
    pub fn conjugate(&self, a: usize, h: usize) -> usize {
        self.mul(self.mul(a, h), self.inverse[a])
    }

    /// Arrows with source `x`, ascending.
    pub fn arrows_from(&self, x: usize) -> &[usize] {
        &self.from[x]
    }

    /// Arrows with target `x`, ascending.
    pub fn arrows_into(&self, x: usize) -> &[usize] {
        &self.into[x]
    }

    /// Arrows `x -> y`, ascending.
    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        &self.hom[x * self.n_objects + y]
    }

    /// Arrows `x -> x`, ascending.
    pub fn isotropy_arrows(&self, x: usize) -> &[usize] {
        self.hom(x, x)
    }

    pub(crate) fn check_object(&self, x: usize) -> Result<(), GroupoidError> {
        if x < self.n_objects {
            Ok(())
        } else {
            Err(GroupoidError::ObjectOutOfRange { object: x, objects: self.n_objects })
        }
    }

    pub(crate) fn check_arrow(&self, a: usize) -> Result<(), GroupoidError> {
        if a < self.n_arrows() {
            Ok(())
        } else {
            Err(GroupoidError::ArrowOutOfRange { arrow: a, arrows: self.n_arrows() })
        }
    }

    /// Partition of the objects into leaves (connectivity classes).
    ///
    /// Each leaf is sorted and leaves are ordered by their least object.
    pub fn leaves(&self) -> Vec<Vec<usize>> {
        partition_by_arrows(self.n_objects, (0..self.n_arrows()).map(|a| (self.src[a], self.tgt[a])))
    }

    /// For each object, the index of its leaf in [`leaves`](Self::leaves).
    pub fn leaf_index(&self) -> Vec<usize> {
        leaf_lookup(self.n_objects, &self.leaves())
    }

    /// The isotropy group at `x`, as a one-object groupoid.
    pub fn isotropy_group(&self, x: usize) -> Result<IsotropyGroup, GroupoidError> {
        self.check_object(x)?;
        let arrows = self.isotropy_arrows(x).to_vec();
        let local: BTreeMap<usize, usize> = arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let m = arrows.len();
        let group = FiniteGroupoid::from_parts(
            1,
            vec![0; m],
            vec![0; m],
            vec![local[&self.identity[x]]],
            arrows.iter().map(|&a| local[&self.inverse[a]]).collect(),
            |i, j| local[&self.mul(arrows[i], arrows[j])],
        )?;
        Ok(IsotropyGroup { object: x, arrows, group })
    }

    /// The isomorphism `G_x^x -> G_y^y`, `h ↦ a h a⁻¹`, for an arrow `a: x -> y`.
    ///
    /// The result is checked to be a bijective homomorphism before it is
    /// returned.
    pub fn conjugate_isotropy(&self, x: usize, y: usize, a: usize) -> Result<IsotropyIso, GroupoidError> {
        self.check_object(x)?;
        self.check_object(y)?;
        self.check_arrow(a)?;
        if self.src[a] != x || self.tgt[a] != y {
            return Err(GroupoidError::NotConnecting { arrow: a, from: x, to: y });
        }
        let map: BTreeMap<usize, usize> =
            self.isotropy_arrows(x).iter().map(|&h| (h, self.conjugate(a, h))).collect();
        let iso = IsotropyIso { from: x, to: y, via: a, map };
        assert!(iso.is_isomorphism(self), "conjugation by arrow {a} failed to be an isomorphism");
        Ok(iso)
    }

    /// The disjoint union, objects and arrows of each part shifted in order.
    pub fn disjoint_union(parts: &[FiniteGroupoid]) -> Result<Self, GroupoidError> {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        let mut identity = Vec::new();
        let mut inverse = Vec::new();
        let mut offsets = Vec::new();
        let (mut obj_off, mut arr_off) = (0, 0);
        for p in parts {
            offsets.push(arr_off);
            src.extend(p.src.iter().map(|&x| x + obj_off));
            tgt.extend(p.tgt.iter().map(|&x| x + obj_off));
            identity.extend(p.identity.iter().map(|&a| a + arr_off));
            inverse.extend(p.inverse.iter().map(|&a| a + arr_off));
            obj_off += p.n_objects;
            arr_off += p.n_arrows();
        }
        let owner: Vec<usize> = parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| std::iter::repeat_n(i, p.n_arrows()))
            .collect();
        FiniteGroupoid::from_parts(obj_off, src, tgt, identity, inverse, |g, h| {
            let part = owner[g];
            let off = offsets[part];
            parts[part].mul(g - off, h - off) + off
        })
    }
}

pub(crate) fn partition_by_arrows(
    n_objects: usize,
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(n_objects);
    for (x, y) in edges {
        uf.union(x, y);
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut root_to_least: BTreeMap<usize, usize> = BTreeMap::new();
    for x in 0..n_objects {
        let root = uf.find(x);
        let least = *root_to_least.entry(root).or_insert(x);
        classes.entry(least).or_default().push(x);
    }
    classes.into_values().collect()
}

pub(crate) fn leaf_lookup(n_objects: usize, leaves: &[Vec<usize>]) -> Vec<usize> {
    let mut index = vec![NONE; n_objects];
    for (i, leaf) in leaves.iter().enumerate() {
        for &x in leaf {
            index[x] = i;
        }
    }
    index
}

/// Isotropy group `G_x^x` with the correspondence between its local arrow
/// indices and arrow ids of the parent groupoid (`arrows[local] = parent`).
#[derive(Clone, Debug)]
pub struct IsotropyGroup {
    pub object: usize,
    pub arrows: Vec<usize>,
    pub group: FiniteGroupoid,
}

impl IsotropyGroup {
    pub fn order(&self) -> usize {
        self.arrows.len()
    }
}

/// Conjugation isomorphism between two isotropy groups along an arrow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotropyIso {
    pub from: usize,
    pub to: usize,
    pub via: usize,
    pub map: BTreeMap<usize, usize>,
}

impl IsotropyIso {
    pub fn apply(&self, h: usize) -> Option<usize> {
        self.map.get(&h).copied()
    }

    /// Bijective onto `G_to^to` and multiplicative.
    pub fn is_isomorphism(&self, g: &FiniteGroupoid) -> bool {
        let domain = g.isotropy_arrows(self.from);
        let codomain = g.isotropy_arrows(self.to);
        if self.map.len() != domain.len() || domain.len() != codomain.len() {
            return false;
        }
        let mut image: Vec<usize> = self.map.values().copied().collect();
        image.sort_unstable();
        if image != codomain {
            return false;
        }
        domain.iter().all(|&p| {
            domain.iter().all(|&q| self.map[&g.mul(p, q)] == g.mul(self.map[&p], self.map[&q]))
        })
    }
}
