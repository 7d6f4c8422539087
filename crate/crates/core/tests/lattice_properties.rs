use groupoid_moduli::fingroupoid::{cyclic_group_table, permutations, symmetric_group_table};
use groupoid_moduli::lattice::{EnumerateOptions, GaugeElement};
use groupoid_moduli::surface::SignedEdge;
use groupoid_moduli::{CwSurface, FiniteGroupoid, Lattice, LatticeMorphism, Subgroupoid};
use proptest::prelude::*;

fn groupoids() -> Vec<FiniteGroupoid> {
    let z2 = FiniteGroupoid::group(&cyclic_group_table(2)).unwrap();
    vec![
        FiniteGroupoid::pair(2),
        FiniteGroupoid::group(&cyclic_group_table(3)).unwrap(),
        FiniteGroupoid::group(&symmetric_group_table(3)).unwrap(),
        FiniteGroupoid::disjoint_union(&[z2, FiniteGroupoid::pair(2)]).unwrap(),
        FiniteGroupoid::action(&symmetric_group_table(3), 3, &permutations(3)).unwrap(),
    ]
}

fn surfaces() -> Vec<CwSurface> {
    vec![CwSurface::sphere(), CwSurface::genus(1), CwSurface::torus_grid(1), CwSurface::bordered_genus(1)]
}

/// Path value computed directly from the edge arrows.
fn walk(g: &FiniteGroupoid, m: &LatticeMorphism, path: &[SignedEdge], start: usize) -> usize {
    let mut acc = g.identity(start);
    for s in path {
        let a = m.edge_map[s.edge];
        let step = if s.forward { a } else { g.inverse(a) };
        acc = g.compose(step, acc).expect("path steps compose");
    }
    acc
}

fn flat_by_hand(c: &CwSurface, g: &FiniteGroupoid, m: &LatticeMorphism) -> bool {
    let anchored = c.edges().iter().zip(&m.edge_map).all(|(&(u, v), &a)| {
        g.source(a) == m.vertex_map[u] && g.target(a) == m.vertex_map[v]
    });
    anchored
        && c.faces().iter().all(|f| {
            let start = m.vertex_map[c.endpoints(f[0]).0];
            walk(g, m, f, start) == g.identity(start)
        })
}

/// A gauge element chosen from `seeds`, respecting the boundary subgroupoid.
fn gauge_from(lattice: &Lattice, m: &LatticeMorphism, seeds: &[usize]) -> GaugeElement {
    let g = lattice.groupoid();
    let on_boundary = lattice.surface().boundary_vertices();
    let phi = m
        .vertex_map
        .iter()
        .enumerate()
        .map(|(v, &x)| {
            let options = if on_boundary[v] {
                lattice.boundary_subgroupoid().arrows_from(g, x)
            } else {
                g.arrows_from(x).to_vec()
            };
            options[seeds[v % seeds.len()] % options.len()]
        })
        .collect();
    GaugeElement { phi }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_agrees_with_direct_flatness(gi in 0usize..5, si in 0usize..4) {
        let g = &groupoids()[gi];
        let c = &surfaces()[si];
        let lattice = Lattice::new(c, g, None).unwrap();
        for m in lattice.enumerate_flat(&EnumerateOptions::default()).unwrap() {
            prop_assert!(flat_by_hand(c, g, &m));
            prop_assert!(lattice.is_flat(&m));
        }
    }

    #[test]
    fn gauge_preserves_flatness_and_conjugates_holonomy(
        gi in 0usize..5,
        si in 0usize..4,
        pick in any::<prop::sample::Index>(),
        seeds in prop::collection::vec(0usize..64, 1..6),
    ) {
        let g = &groupoids()[gi];
        let c = &surfaces()[si];
        let lattice = Lattice::new(c, g, None).unwrap();
        let fields = lattice.enumerate_flat(&EnumerateOptions::default()).unwrap();
        let m = &fields[pick.index(fields.len())];
        let phi = gauge_from(&lattice, m, &seeds);
        let moved = lattice.apply_gauge(m, &phi).unwrap();
        prop_assert!(flat_by_hand(c, g, &moved));

        let before = lattice.holonomy(m);
        let after = lattice.holonomy(&moved);
        let a = phi.phi[0];
        prop_assert_eq!(after.base_object, g.target(a));
        let conjugated: Vec<usize> = before.tree_loops.iter().map(|&h| g.conjugate(a, h)).collect();
        prop_assert_eq!(after.tree_loops, conjugated);
        if let (Some(b), Some(s)) = (before.standard, after.standard) {
            let conjugated: Vec<usize> = b.iter().map(|&h| g.conjugate(a, h)).collect();
            prop_assert_eq!(s, conjugated);
        }
    }

    #[test]
    fn gauge_composes(
        gi in 0usize..5,
        pick in any::<prop::sample::Index>(),
        first in prop::collection::vec(0usize..64, 1..6),
        second in prop::collection::vec(0usize..64, 1..6),
    ) {
        let g = &groupoids()[gi];
        let c = CwSurface::torus_grid(1);
        let lattice = Lattice::new(&c, g, None).unwrap();
        let fields = lattice.enumerate_flat(&EnumerateOptions::default()).unwrap();
        let m = &fields[pick.index(fields.len())];
        let a = gauge_from(&lattice, m, &first);
        let once = lattice.apply_gauge(m, &a).unwrap();
        let b = gauge_from(&lattice, &once, &second);
        let twice = lattice.apply_gauge(&once, &b).unwrap();
        let combined = b.after(&a, g).unwrap();
        prop_assert_eq!(lattice.apply_gauge(m, &combined).unwrap(), twice);
    }
}

/// Without gauge fixing every field is a gauge-fixed field moved by a gauge
/// element that is trivial at the base: `|s⁻¹(x)|^(V−1)` choices for each.
#[test]
fn gauge_fixing_counts() {
    for c in [CwSurface::sphere(), CwSurface::torus_grid(1), CwSurface::torus_grid(2)] {
        for g in groupoids() {
            let bound = (g.n_arrows() as u128).pow(c.n_edges() as u32);
            if bound > 20_000_000 {
                continue;
            }
            let lattice = Lattice::new(&c, &g, None).unwrap();
            let all = lattice.enumerate_flat(&EnumerateOptions::default()).unwrap();
            let fixed = lattice
                .enumerate_flat(&EnumerateOptions { gauge_fixed: true, ..Default::default() })
                .unwrap();
            let expected: usize = (0..g.n_objects())
                .map(|x| {
                    let at_x = fixed.iter().filter(|m| m.vertex_map[0] == x).count();
                    at_x * g.arrows_from(x).len().pow(c.n_vertices() as u32 - 1)
                })
                .sum();
            assert_eq!(all.len(), expected, "{} vertices, {} arrows", c.n_vertices(), g.n_arrows());
            for m in &fixed {
                assert!(lattice.tree().tree_edges().iter().all(|&e| g.is_identity(m.edge_map[e])));
            }
        }
    }
}

/// On the one-square torus a flat field is a commuting pair in one isotropy
/// group.
#[test]
fn one_square_torus_is_commuting_pairs() {
    let c = CwSurface::torus_grid(1);
    for g in groupoids() {
        let mut oracle = 0;
        for x in 0..g.n_objects() {
            let iso = g.isotropy_arrows(x);
            for &a in iso {
                for &b in iso {
                    if g.mul(a, b) == g.mul(b, a) {
                        oracle += 1;
                    }
                }
            }
        }
        let lattice = Lattice::new(&c, &g, None).unwrap();
        assert_eq!(lattice.enumerate_flat(&EnumerateOptions::default()).unwrap().len(), oracle);
    }
}

#[test]
fn sphere_with_pair_groupoid() {
    let c = CwSurface::sphere();
    let g = FiniteGroupoid::pair(3);
    let lattice = Lattice::new(&c, &g, None).unwrap();
    let all = lattice.enumerate_flat(&EnumerateOptions::default()).unwrap();
    assert_eq!(all.len(), 9);
    assert_eq!(lattice.gauge_orbits(&all).len(), 1);
}

#[test]
fn boundary_constraint_is_enforced() {
    let c = CwSurface::bordered_genus(1);
    let g = FiniteGroupoid::group(&symmetric_group_table(3)).unwrap();
    let sub = Subgroupoid::base(&g);
    let lattice = Lattice::new(&c, &g, Some(sub)).unwrap();
    let fields = lattice.enumerate_flat(&EnumerateOptions::default()).unwrap();
    // commuting pairs in S3
    assert_eq!(fields.len(), 18);
    let boundary = c.boundary().unwrap();
    for m in &fields {
        assert!(g.is_identity(walk(&g, m, boundary, m.vertex_map[0])));
    }
}
