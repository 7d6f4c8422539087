//! Holonomy-side moduli: tuples in isotropy groups up to the adjoint action,
//! per leaf, and their comparison with lattice gauge orbits.
//!
//! Closed genus `g`: at each object `x`, tuples `(z₁, w₁, …, z_g, w_g)` in
//! `G_x^x` with `[z₁,w₁]⋯[z_g,w_g] = id(x)`, where `[z,w] = z w z⁻¹ w⁻¹`.
//! An arrow `γ: x → y` sends such a tuple at `x` to the conjugated tuple at
//! `y`. All arrows of the groupoid act, so a class may move its base object
//! within a leaf.
//!
//! One boundary component with boundary subgroupoid `H`: base objects range
//! over the objects of `H`, tuples are free but the commutator product must
//! lie in `H_x^x`, and only arrows of `H` act. Classes are grouped by the
//! leaves of `H`.
//!
//! The canonical representative of a class is its least `(base, tuple)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fingroupoid::{double_cosets, DoubleCoset, FiniteGroupoid, GroupoidError, Subgroupoid};
use crate::lattice::{EnumerateOptions, Lattice, LatticeError, LatticeMorphism};
use crate::surface::{CwSurface, SurfaceKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{candidates} tuples at object {object} exceed the limit of {limit}")]
    TooLarge { object: usize, candidates: u128, limit: u64 },
    #[error("surface has no standard loops, so holonomy classes cannot be matched to orbits")]
    NoStandardLoops,
    #[error("surface has {found} standard loops, expected {expected} for genus {genus}")]
    LoopCount { genus: usize, expected: usize, found: usize },
}

/// A representation of the surface group at a base object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FlatRep {
    pub base: usize,
    pub tuple: Vec<usize>,
}

/// One point of the moduli space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuliClass {
    pub representative: FlatRep,
    /// Number of representations (over all base objects) in the class.
    pub orbit_size: usize,
    pub leaf: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafModuli {
    pub leaf: usize,
    pub objects: Vec<usize>,
    pub rep_count: usize,
    pub class_count: usize,
    pub representatives: Vec<ModuliClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuliSpace {
    pub genus: usize,
    pub bordered: bool,
    pub leaves: Vec<LeafModuli>,
}

impl ModuliSpace {
    pub fn class_count(&self) -> usize {
        self.leaves.iter().map(|l| l.class_count).sum()
    }

    pub fn rep_count(&self) -> usize {
        self.leaves.iter().map(|l| l.rep_count).sum()
    }

    pub fn classes(&self) -> impl Iterator<Item = &ModuliClass> {
        self.leaves.iter().flat_map(|l| &l.representatives)
    }
}

/// `[z₁,w₁]⋯[z_g,w_g]` in the isotropy group at `x`.
pub fn commutator_product(g: &FiniteGroupoid, x: usize, tuple: &[usize]) -> usize {
    tuple.chunks(2).fold(g.identity(x), |acc, pair| {
        let (z, w) = (pair[0], pair[1]);
        let c = g.mul(g.mul(z, w), g.mul(g.inverse(z), g.inverse(w)));
        g.mul(acc, c)
    })
}

/// Every tuple of length `len` over `elements`, in lexicographic order.
fn tuples(elements: &[usize], len: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = elements.len();
    let total = if len == 0 { 1 } else if n == 0 { 0 } else { n.pow(len as u32) };
    (0..total).map(move |mut k| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = elements[k % n];
            k /= n;
        }
        t
    })
}

fn check_size(g: &FiniteGroupoid, x: usize, len: usize, limit: u64) -> Result<(), ModuliError> {
    let candidates = (g.isotropy_arrows(x).len() as u128).saturating_pow(len as u32);
    if candidates > limit as u128 {
        return Err(ModuliError::TooLarge { object: x, candidates, limit });
    }
    Ok(())
}

/// Least image of `rep` under the arrows in `acting` (which must include the
/// identity at `rep.base` and be closed enough to reach the whole orbit).
fn canonical(g: &FiniteGroupoid, rep: &FlatRep, acting: &[usize]) -> FlatRep {
    acting
        .iter()
        .map(|&a| FlatRep { base: g.target(a), tuple: rep.tuple.iter().map(|&h| g.conjugate(a, h)).collect() })
        .min()
        .expect("identity always acts")
}

/// Which arrows act on representations.
#[derive(Clone, Copy)]
enum Acting<'a> {
    All,
    Sub(&'a Subgroupoid),
}

impl Acting<'_> {
    fn from(&self, g: &FiniteGroupoid, x: usize) -> Vec<usize> {
        match self {
            Acting::All => g.arrows_from(x).to_vec(),
            Acting::Sub(h) => h.arrows_from(g, x),
        }
    }
}

/// Canonical form of a representation under the closed-case action.
pub fn canonical_closed(g: &FiniteGroupoid, rep: &FlatRep) -> FlatRep {
    canonical(g, rep, g.arrows_from(rep.base))
}

/// Canonical form under the action of the boundary subgroupoid.
pub fn canonical_open(g: &FiniteGroupoid, sub: &Subgroupoid, rep: &FlatRep) -> FlatRep {
    canonical(g, rep, &sub.arrows_from(g, rep.base))
}

fn leaf_moduli(
    g: &FiniteGroupoid,
    genus: usize,
    leaf: usize,
    objects: &[usize],
    acting: Acting<'_>,
    keep: impl Fn(usize, usize) -> bool + Sync,
) -> LeafModuli {
    let mut classes: BTreeMap<FlatRep, usize> = BTreeMap::new();
    let mut rep_count = 0;
    for &x in objects {
        let acts = acting.from(g, x);
        for tuple in tuples(g.isotropy_arrows(x), 2 * genus) {
            if !keep(x, commutator_product(g, x, &tuple)) {
                continue;
            }
            rep_count += 1;
            *classes.entry(canonical(g, &FlatRep { base: x, tuple }, &acts)).or_default() += 1;
        }
    }
    let representatives: Vec<ModuliClass> = classes
        .into_iter()
        .map(|(representative, orbit_size)| ModuliClass { representative, orbit_size, leaf })
        .collect();
    LeafModuli { leaf, objects: objects.to_vec(), rep_count, class_count: representatives.len(), representatives }
}

/// Moduli of flat connections on the closed surface of the given genus.
pub fn moduli_closed(g: &FiniteGroupoid, genus: usize, limit: u64) -> Result<ModuliSpace, ModuliError> {
    for x in 0..g.n_objects() {
        check_size(g, x, 2 * genus, limit)?;
    }
    let leaves: Vec<LeafModuli> = g
        .leaves()
        .par_iter()
        .enumerate()
        .map(|(i, objects)| leaf_moduli(g, genus, i, objects, Acting::All, |_, p| g.is_identity(p)))
        .collect();
    Ok(ModuliSpace { genus, bordered: false, leaves })
}

/// Closed-case classes seen from a single base object: tuples at `x` up to
/// conjugation by `G_x^x`. Equals the class count of the leaf containing `x`.
pub fn moduli_closed_at(g: &FiniteGroupoid, genus: usize, x: usize, limit: u64) -> Result<LeafModuli, ModuliError> {
    g.check_object(x)?;
    check_size(g, x, 2 * genus, limit)?;
    let leaf = g.leaf_index()[x];
    let iso = Subgroupoid::generated(g, [x], g.isotropy_arrows(x).iter().copied())?;
    Ok(leaf_moduli(g, genus, leaf, &[x], Acting::Sub(&iso), |_, p| g.is_identity(p)))
}

/// Moduli for one boundary component with boundary subgroupoid `sub`.
pub fn moduli_open(g: &FiniteGroupoid, genus: usize, sub: &Subgroupoid, limit: u64) -> Result<ModuliSpace, ModuliError> {
    sub.ensure_fits(g)?;
    for x in sub.objects() {
        check_size(g, x, 2 * genus, limit)?;
    }
    let leaves: Vec<LeafModuli> = sub
        .leaves(g)
        .par_iter()
        .enumerate()
        .map(|(i, objects)| leaf_moduli(g, genus, i, objects, Acting::Sub(sub), |_, p| sub.contains_arrow(p)))
        .collect();
    Ok(ModuliSpace { genus, bordered: true, leaves })
}

/// Strip `I × I` with boundary conditions `sub0` at one end and `sub1` at the
/// other: the double cosets `sub1 \ G / sub0`.
pub fn moduli_interval(g: &FiniteGroupoid, sub0: &Subgroupoid, sub1: &Subgroupoid) -> Result<Vec<DoubleCoset>, ModuliError> {
    Ok(double_cosets(g, sub0, sub1)?)
}

/// `|p⁻¹(id)|` summed over the objects of one leaf (or of all objects).
pub fn count_morphisms(g: &FiniteGroupoid, genus: usize, leaf: Option<usize>, limit: u64) -> Result<u64, ModuliError> {
    let objects: Vec<usize> = match leaf {
        Some(i) => g.leaves().get(i).cloned().unwrap_or_default(),
        None => (0..g.n_objects()).collect(),
    };
    let mut total = 0;
    for x in objects {
        check_size(g, x, 2 * genus, limit)?;
        total += tuples(g.isotropy_arrows(x), 2 * genus)
            .filter(|t| g.is_identity(commutator_product(g, x, t)))
            .count() as u64;
    }
    Ok(total)
}

/// Per-leaf counts from both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafComparison {
    pub leaf: usize,
    pub objects: Vec<usize>,
    pub lattice_orbits: usize,
    pub holonomy_classes: usize,
}

/// One matched pair of the bijection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub orbit_representative: LatticeMorphism,
    pub orbit_size: usize,
    pub holonomy_class: FlatRep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub kind: SurfaceKind,
    pub field_count: usize,
    pub lattice_orbit_count: usize,
    pub holonomy_class_count: usize,
    pub leaves: Vec<LeafComparison>,
    /// Present when the surface has standard loops.
    pub bijection: Option<Vec<Correspondence>>,
    /// Problems found while matching; empty when the two sides agree.
    pub mismatches: Vec<String>,
    pub holonomy: ModuliSpace,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Computes the lattice gauge orbits and the holonomy classes independently
/// and matches them.
///
/// Orbits are mapped to classes through the holonomy along the surface's
/// standard loops. The map must be constant on each orbit, injective, and
/// onto. Without standard loops only the counts are compared.
pub fn compare_lattice_vs_holonomy(
    c: &CwSurface,
    g: &FiniteGroupoid,
    sub: Option<&Subgroupoid>,
    limit: u64,
) -> Result<Comparison, ModuliError> {
    let kind = c.kind();
    let genus = kind.genus();
    let bordered = matches!(kind, SurfaceKind::Bordered { .. });
    let sub = match (bordered, sub) {
        (true, Some(h)) => h.clone(),
        _ => Subgroupoid::full(g),
    };
    let holonomy = if bordered { moduli_open(g, genus, &sub, limit)? } else { moduli_closed(g, genus, limit)? };

    let lattice = Lattice::new(c, g, bordered.then(|| sub.clone()))?;
    let fields = lattice.enumerate_flat(&EnumerateOptions { gauge_fixed: false, limit })?;
    let orbits = lattice.gauge_orbits(&fields);

    let leaf_of: Vec<Option<usize>> = {
        let mut v = vec![None; g.n_objects()];
        for l in &holonomy.leaves {
            for &x in &l.objects {
                v[x] = Some(l.leaf);
            }
        }
        v
    };
    let mut mismatches = Vec::new();
    let mut per_leaf = vec![0usize; holonomy.leaves.len()];
    for o in &orbits {
        match leaf_of[o.representative.vertex_map[0]] {
            Some(l) => per_leaf[l] += 1,
            None => mismatches.push(format!("orbit of {:?} has its base outside every leaf", o.representative)),
        }
    }
    let leaves: Vec<LeafComparison> = holonomy
        .leaves
        .iter()
        .map(|l| LeafComparison {
            leaf: l.leaf,
            objects: l.objects.clone(),
            lattice_orbits: per_leaf[l.leaf],
            holonomy_classes: l.class_count,
        })
        .collect();
    for l in &leaves {
        if l.lattice_orbits != l.holonomy_classes {
            mismatches.push(format!(
                "leaf {}: {} lattice orbits vs {} holonomy classes",
                l.leaf, l.lattice_orbits, l.holonomy_classes
            ));
        }
    }

    let bijection = match c.standard_loops() {
        None => None,
        Some(loops) if loops.len() != 2 * genus => {
            return Err(ModuliError::LoopCount { genus, expected: 2 * genus, found: loops.len() })
        }
        Some(_) => {
            // Path values compose in reverse order of concatenation, so the
            // representation of the surface group is the inverse path value.
            let classify = |m: &LatticeMorphism| {
                let h = lattice.holonomy(m);
                let tuple = h.standard.expect("standard loops present").into_iter().map(|a| g.inverse(a)).collect();
                let rep = FlatRep { base: h.base_object, tuple };
                if bordered {
                    canonical_open(g, &sub, &rep)
                } else {
                    canonical_closed(g, &rep)
                }
            };
            let class_of: Vec<FlatRep> = fields.par_iter().map(classify).collect();
            let known: BTreeSet<&FlatRep> = holonomy.classes().map(|k| &k.representative).collect();
            let mut hit: HashMap<&FlatRep, usize> = HashMap::new();
            let mut pairs = Vec::with_capacity(orbits.len());
            for (k, o) in orbits.iter().enumerate() {
                let target = &class_of[o.members[0]];
                if o.members.iter().any(|&i| class_of[i] != *target) {
                    mismatches.push(format!("orbit {k} maps to more than one holonomy class"));
                }
                if !known.contains(target) {
                    mismatches.push(format!("orbit {k} maps to {target:?}, which is not a holonomy class"));
                }
                if let Some(prev) = hit.insert(target, k) {
                    mismatches.push(format!("orbits {prev} and {k} map to the same class {target:?}"));
                }
                pairs.push(Correspondence {
                    orbit_representative: o.representative.clone(),
                    orbit_size: o.size,
                    holonomy_class: target.clone(),
                });
            }
            for k in &known {
                if !hit.contains_key(k) {
                    mismatches.push(format!("holonomy class {k:?} is not reached by any orbit"));
                }
            }
            Some(pairs)
        }
    };
    if orbits.len() != holonomy.class_count() {
        mismatches.push(format!("{} lattice orbits vs {} holonomy classes", orbits.len(), holonomy.class_count()));
    }
    mismatches.dedup();

    Ok(Comparison {
        kind,
        field_count: fields.len(),
        lattice_orbit_count: orbits.len(),
        holonomy_class_count: holonomy.class_count(),
        leaves,
        bijection,
        mismatches,
        holonomy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroupoid::{cyclic_group_table, permutations, symmetric_group_table};
    use crate::DEFAULT_LIMIT;

    fn group(table: Vec<Vec<usize>>) -> FiniteGroupoid {
        FiniteGroupoid::group(&table).unwrap()
    }

    fn trivial_z2_action() -> FiniteGroupoid {
        FiniteGroupoid::action(&cyclic_group_table(2), 2, &[vec![0, 1], vec![0, 1]]).unwrap()
    }

    #[test]
    fn genus_zero_gives_leaves() {
        for g in [FiniteGroupoid::pair(3), trivial_z2_action(), group(symmetric_group_table(3))] {
            let m = moduli_closed(&g, 0, DEFAULT_LIMIT).unwrap();
            assert_eq!(m.class_count(), g.leaves().len());
        }
    }

    #[test]
    fn closed_genus_one_counts() {
        assert_eq!(moduli_closed(&group(cyclic_group_table(3)), 1, DEFAULT_LIMIT).unwrap().class_count(), 9);
        assert_eq!(moduli_closed(&FiniteGroupoid::pair(4), 2, DEFAULT_LIMIT).unwrap().class_count(), 1);
        // commuting pairs of S3 up to conjugation: (e,*) 3, (t,t'), t,t' in <t> 1 each → 8
        let s3 = moduli_closed(&group(symmetric_group_table(3)), 1, DEFAULT_LIMIT).unwrap();
        assert_eq!(s3.rep_count(), 18);
        assert_eq!(s3.class_count(), 8);
    }

    #[test]
    fn orbit_sizes_sum_to_rep_count() {
        let m = moduli_closed(&group(symmetric_group_table(3)), 2, DEFAULT_LIMIT).unwrap();
        for l in &m.leaves {
            assert_eq!(l.representatives.iter().map(|c| c.orbit_size).sum::<usize>(), l.rep_count);
        }
    }

    #[test]
    fn basepoint_independence() {
        let s3 = symmetric_group_table(3);
        // S3 permuting 3 points: one leaf, isotropy Z2 at every point
        let act = permutations(3);
        let g = FiniteGroupoid::action(&s3, 3, &act).unwrap();
        let whole = moduli_closed(&g, 1, DEFAULT_LIMIT).unwrap();
        for x in 0..3 {
            assert_eq!(moduli_closed_at(&g, 1, x, DEFAULT_LIMIT).unwrap().class_count, whole.class_count());
        }
    }

    #[test]
    fn open_cases() {
        let z2 = group(cyclic_group_table(2));
        let m = moduli_open(&z2, 1, &Subgroupoid::base(&z2), DEFAULT_LIMIT).unwrap();
        assert_eq!(m.class_count(), 4);
        let g = FiniteGroupoid::pair(3);
        let sub = Subgroupoid::identities_over(&g, [0, 2]).unwrap();
        assert_eq!(moduli_open(&g, 0, &sub, DEFAULT_LIMIT).unwrap().class_count(), 2);
        let s3 = group(symmetric_group_table(3));
        let full = moduli_open(&s3, 1, &Subgroupoid::full(&s3), DEFAULT_LIMIT).unwrap();
        // all 36 pairs up to simultaneous conjugation
        assert_eq!(full.class_count(), 11);
    }

    #[test]
    fn counting() {
        assert_eq!(count_morphisms(&group(cyclic_group_table(2)), 1, Some(0), DEFAULT_LIMIT).unwrap(), 4);
        assert_eq!(count_morphisms(&group(symmetric_group_table(3)), 1, None, DEFAULT_LIMIT).unwrap(), 18);
        assert_eq!(count_morphisms(&FiniteGroupoid::pair(3), 0, None, DEFAULT_LIMIT).unwrap(), 3);
    }

    #[test]
    fn interval() {
        let g = FiniteGroupoid::pair(3);
        let base = Subgroupoid::base(&g);
        assert_eq!(moduli_interval(&g, &base, &base).unwrap().len(), 9);
    }

    #[test]
    fn comparisons() {
        let z2 = group(cyclic_group_table(2));
        let cases = [
            (CwSurface::torus_grid(2), z2.clone(), 4),
            (CwSurface::torus_grid(1), FiniteGroupoid::pair(3), 1),
            (CwSurface::sphere(), trivial_z2_action(), 2),
        ];
        for (c, g, n) in cases {
            let r = compare_lattice_vs_holonomy(&c, &g, None, DEFAULT_LIMIT).unwrap();
            assert!(r.agrees(), "{:?}", r.mismatches);
            assert_eq!((r.lattice_orbit_count, r.holonomy_class_count), (n, n));
        }
    }

    #[test]
    fn bordered_comparisons() {
        let s3 = group(symmetric_group_table(3));
        let z2_in_s3 = Subgroupoid::generated(&s3, [0], [1]).unwrap();
        for c in [CwSurface::bordered_genus(1), CwSurface::punctured_torus_grid(2)] {
            for sub in [Subgroupoid::base(&s3), z2_in_s3.clone(), Subgroupoid::full(&s3)] {
                let r = compare_lattice_vs_holonomy(&c, &s3, Some(&sub), DEFAULT_LIMIT).unwrap();
                assert!(r.agrees(), "{:?} {:?} {:?}", c.n_edges(), sub.objects(), r.mismatches);
            }
        }
    }
}
