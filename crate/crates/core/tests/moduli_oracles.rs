use std::collections::BTreeSet;

use groupoid_moduli::fingroupoid::{cyclic_group_table, permutations, symmetric_group_table};
use groupoid_moduli::moduli::{
    compare_lattice_vs_holonomy, count_morphisms, moduli_closed, moduli_closed_at, moduli_interval, moduli_open,
};
use groupoid_moduli::lattice::EnumerateOptions;
use groupoid_moduli::{CwSurface, FiniteGroupoid, Lattice, Subgroupoid, DEFAULT_LIMIT};
use proptest::prelude::*;

fn group(table: &[Vec<usize>]) -> FiniteGroupoid {
    FiniteGroupoid::group(table).unwrap()
}

/// All `k`-tuples from `pool`.
fn tuples(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| pool.iter().map(move |&a| [t.clone(), vec![a]].concat()))
            .collect();
    }
    out
}

fn commutators(g: &FiniteGroupoid, x: usize, t: &[usize]) -> usize {
    let mut acc = g.identity(x);
    for pair in t.chunks(2) {
        let (z, w) = (pair[0], pair[1]);
        let c = g.mul(g.mul(z, w), g.mul(g.inverse(z), g.inverse(w)));
        acc = g.mul(acc, c);
    }
    acc
}

/// Orbits of `(base, tuple)` under conjugation by the arrows in `acting`,
/// found by closing each starting point under single conjugations.
fn orbit_count(
    g: &FiniteGroupoid,
    genus: usize,
    objects: &[usize],
    acting: &[usize],
    keep: impl Fn(usize, usize) -> bool,
) -> usize {
    let mut points = BTreeSet::new();
    for &x in objects {
        for t in tuples(g.isotropy_arrows(x), 2 * genus) {
            if keep(x, commutators(g, x, &t)) {
                points.insert((x, t));
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut orbits = 0;
    for p in &points {
        if seen.contains(p) {
            continue;
        }
        orbits += 1;
        let mut stack = vec![p.clone()];
        seen.insert(p.clone());
        while let Some((x, t)) = stack.pop() {
            for &a in acting.iter().filter(|&&a| g.source(a) == x) {
                let next = (g.target(a), t.iter().map(|&h| g.conjugate(a, h)).collect::<Vec<_>>());
                assert!(points.contains(&next), "conjugation leaves the set");
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
    }
    orbits
}

fn closed_oracle(g: &FiniteGroupoid, genus: usize) -> usize {
    let all: Vec<usize> = (0..g.n_arrows()).collect();
    let objects: Vec<usize> = (0..g.n_objects()).collect();
    orbit_count(g, genus, &objects, &all, |_, p| g.is_identity(p))
}

fn open_oracle(g: &FiniteGroupoid, genus: usize, sub: &Subgroupoid) -> usize {
    orbit_count(g, genus, &sub.objects(), &sub.arrows(), |_, p| sub.contains_arrow(p))
}

fn zoo() -> Vec<FiniteGroupoid> {
    vec![
        group(&cyclic_group_table(2)),
        group(&cyclic_group_table(3)),
        group(&symmetric_group_table(3)),
        FiniteGroupoid::pair(3),
        FiniteGroupoid::action(&symmetric_group_table(3), 3, &permutations(3)).unwrap(),
        FiniteGroupoid::disjoint_union(&[group(&cyclic_group_table(2)), FiniteGroupoid::pair(2)]).unwrap(),
    ]
}

#[test]
fn genus_one_counts_by_double_loop() {
    for (g, expected) in [(group(&cyclic_group_table(2)), 4), (group(&cyclic_group_table(3)), 9), (group(&symmetric_group_table(3)), 18)] {
        let mut pairs = 0;
        for a in 0..g.n_arrows() {
            for b in 0..g.n_arrows() {
                if g.mul(a, b) == g.mul(b, a) {
                    pairs += 1;
                }
            }
        }
        assert_eq!(pairs, expected);
        assert_eq!(count_morphisms(&g, 1, None, DEFAULT_LIMIT).unwrap(), expected);
        assert_eq!(moduli_closed(&g, 1, DEFAULT_LIMIT).unwrap().rep_count(), expected as usize);
    }
}

#[test]
fn closed_classes_match_brute_force() {
    let s3 = group(&symmetric_group_table(3));
    assert_eq!(closed_oracle(&s3, 1), 8);
    assert_eq!(moduli_closed(&s3, 1, DEFAULT_LIMIT).unwrap().class_count(), 8);
    for g in zoo() {
        for genus in 0..=2 {
            assert_eq!(moduli_closed(&g, genus, DEFAULT_LIMIT).unwrap().class_count(), closed_oracle(&g, genus));
        }
    }
}

#[test]
fn open_classes_match_brute_force() {
    let s3 = group(&symmetric_group_table(3));
    let full = Subgroupoid::full(&s3);
    assert_eq!(open_oracle(&s3, 1, &full), 11);
    assert_eq!(moduli_open(&s3, 1, &full, DEFAULT_LIMIT).unwrap().class_count(), 11);
    for g in zoo() {
        let subs = [Subgroupoid::full(&g), Subgroupoid::base(&g)];
        for sub in &subs {
            for genus in 0..=1 {
                assert_eq!(moduli_open(&g, genus, sub, DEFAULT_LIMIT).unwrap().class_count(), open_oracle(&g, genus, sub));
            }
        }
    }
}

#[test]
fn abelian_open_with_full_boundary_equals_closed() {
    for n in 1..=5 {
        let g = group(&cyclic_group_table(n));
        for genus in 0..=2 {
            let open = moduli_open(&g, genus, &Subgroupoid::full(&g), DEFAULT_LIMIT).unwrap();
            let closed = moduli_closed(&g, genus, DEFAULT_LIMIT).unwrap();
            assert_eq!(open.class_count(), closed.class_count());
            assert_eq!(closed.class_count(), n.pow(2 * genus as u32));
        }
    }
}

#[test]
fn interval_double_cosets() {
    let s3 = group(&symmetric_group_table(3));
    let z2 = Subgroupoid::generated(&s3, [0], [1]).unwrap();
    assert_eq!(moduli_interval(&s3, &z2, &z2).unwrap().len(), 2);
    for n in 1..=4 {
        let g = FiniteGroupoid::pair(n);
        let base = Subgroupoid::base(&g);
        assert_eq!(moduli_interval(&g, &base, &base).unwrap().len(), n * n);
    }
}

#[test]
fn bordered_lattice_agrees_with_holonomy() {
    let s3 = group(&symmetric_group_table(3));
    let subs = [Subgroupoid::base(&s3), Subgroupoid::generated(&s3, [0], [1]).unwrap(), Subgroupoid::full(&s3)];
    for c in [CwSurface::bordered_genus(1), CwSurface::punctured_torus_grid(2)] {
        for sub in &subs {
            let cmp = compare_lattice_vs_holonomy(&c, &s3, Some(sub), DEFAULT_LIMIT).unwrap();
            assert!(cmp.agrees(), "{:?}", cmp.mismatches);
            assert_eq!(cmp.holonomy_class_count, open_oracle(&s3, 1, sub));
        }
    }
}

/// Inverse standard-loop values of every flat field satisfy the surface
/// relation, checked by multiplying out the commutators by hand.
#[test]
fn inverse_loop_values_satisfy_the_surface_relation() {
    let s3 = group(&symmetric_group_table(3));
    let base = Subgroupoid::base(&s3);
    for (c, sub) in [(CwSurface::genus(2), None), (CwSurface::bordered_genus(2), Some(base.clone()))] {
        let lattice = Lattice::new(&c, &s3, sub.clone()).unwrap();
        let fields = lattice.enumerate_flat(&EnumerateOptions::default()).unwrap();
        assert!(!fields.is_empty());
        for m in &fields {
            let h = lattice.holonomy(m);
            let rho: Vec<usize> = h.standard.unwrap().iter().map(|&a| s3.inverse(a)).collect();
            let relation = commutators(&s3, h.base_object, &rho);
            match &sub {
                None => assert!(s3.is_identity(relation)),
                Some(b) => assert!(b.contains_arrow(relation)),
            }
        }
    }
}

#[test]
fn genus_two_lattice_agrees_with_holonomy() {
    for g in zoo() {
        let cmp = compare_lattice_vs_holonomy(&CwSurface::genus(2), &g, None, DEFAULT_LIMIT).unwrap();
        assert!(cmp.agrees(), "{:?}", &cmp.mismatches[..cmp.mismatches.len().min(3)]);
        assert_eq!(cmp.lattice_orbit_count, closed_oracle(&g, 2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn class_count_is_independent_of_base_object(gi in 0usize..6, genus in 0usize..=1) {
        let g = &zoo()[gi];
        let space = moduli_closed(g, genus, DEFAULT_LIMIT).unwrap();
        for leaf in &space.leaves {
            for &x in &leaf.objects {
                prop_assert_eq!(moduli_closed_at(g, genus, x, DEFAULT_LIMIT).unwrap().class_count, leaf.class_count);
            }
        }
    }

    #[test]
    fn orbit_sizes_sum_to_representation_count(gi in 0usize..6, genus in 0usize..=2) {
        let g = &zoo()[gi];
        let space = moduli_closed(g, genus, DEFAULT_LIMIT).unwrap();
        let total: usize = space.classes().map(|c| c.orbit_size).sum();
        prop_assert_eq!(total, space.rep_count());
        prop_assert_eq!(space.rep_count() as u64, count_morphisms(g, genus, None, DEFAULT_LIMIT).unwrap());
    }
}
