//! Standard finite groupoids: groups, pair groupoids and action groupoids.

use super::{FiniteGroupoid, GroupoidError};

/// Multiplication table of a finite group: `table[a][b] = a·b`.
pub type GroupTable = Vec<Vec<usize>>;

/// Cyclic group `Z_n` with `a·b = (a + b) mod n`.
pub fn cyclic_group_table(n: usize) -> GroupTable {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Symmetric group on `k` letters. Elements are the permutations of
/// `0..k` in lexicographic order (element 0 is the identity) and
/// `(p·q)(i) = p(q(i))`.
pub fn symmetric_group_table(k: usize) -> GroupTable {
    let perms = permutations(k);
    let index = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).expect("closed under composition");
    perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| index(&q.iter().map(|&i| p[i]).collect::<Vec<_>>()))
                .collect()
        })
        .collect()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Identity element and inverses of a group table, or a description of
/// the first failing group axiom.
pub(crate) fn group_structure(table: &[Vec<usize>]) -> Result<(usize, Vec<usize>), GroupoidError> {
    let n = table.len();
    if n == 0 {
        return Err(GroupoidError::NotAGroup("empty table".into()));
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(GroupoidError::NotAGroup(format!("row {a} has length {}, expected {n}", row.len())));
        }
        if let Some(&c) = row.iter().find(|&&c| c >= n) {
            return Err(GroupoidError::NotAGroup(format!("entry {c} in row {a} is out of range")));
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| GroupoidError::NotAGroup("no two-sided identity".into()))?;
    let mut inverse = Vec::with_capacity(n);
    for a in 0..n {
        let inv = (0..n)
            .find(|&b| table[a][b] == e && table[b][a] == e)
            .ok_or_else(|| GroupoidError::NotAGroup(format!("element {a} has no inverse")))?;
        inverse.push(inv);
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(GroupoidError::NotAGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                }
            }
        }
    }
    Ok((e, inverse))
}

impl FiniteGroupoid {
    /// A group seen as a groupoid over one object; arrow ids are the table's
    /// element indices.
    pub fn group(table: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        let (e, inverse) = group_structure(table)?;
        let n = table.len();
        FiniteGroupoid::from_parts(1, vec![0; n], vec![0; n], vec![e], inverse, |g, h| table[g][h])
    }

    /// The pair groupoid `M × M` over `n` objects.
    ///
    /// Arrow `src * n + tgt` is the unique arrow `src -> tgt`.
    pub fn pair(n: usize) -> Self {
        let m = n * n;
        let src: Vec<usize> = (0..m).map(|a| a / n).collect();
        let tgt: Vec<usize> = (0..m).map(|a| a % n).collect();
        let identity = (0..n).map(|x| x * n + x).collect();
        let inverse = (0..m).map(|a| (a % n) * n + a / n).collect();
        FiniteGroupoid::from_parts(n, src.clone(), tgt, identity, inverse, |g, h| src[h] * n + g % n)
            .expect("pair groupoid satisfies the axioms")
    }

    /// The action groupoid of a left action `act[g][m] = g·m` of a group on
    /// `points` points.
    ///
    /// Arrow `m * |G| + g` is the pair `(m, g)` with source `m` and target
    /// `g·m`; `(g', g·m)(g, m) = (g'g, m)`.
    pub fn action(table: &[Vec<usize>], points: usize, act: &[Vec<usize>]) -> Result<Self, GroupoidError> {
        let (e, group_inverse) = group_structure(table)?;
        let order = table.len();
        if act.len() != order {
            return Err(GroupoidError::NotAnAction(format!("{} rows for a group of order {order}", act.len())));
        }
        for (g, row) in act.iter().enumerate() {
            if row.len() != points || row.iter().any(|&m| m >= points) {
                return Err(GroupoidError::NotAnAction(format!("row {g} is not a map on {points} points")));
            }
        }
        if (0..points).any(|m| act[e][m] != m) {
            return Err(GroupoidError::NotAnAction("identity does not act trivially".into()));
        }
        for g in 0..order {
            for h in 0..order {
                for m in 0..points {
                    if act[table[g][h]][m] != act[g][act[h][m]] {
                        return Err(GroupoidError::NotAnAction(format!("({g}·{h})·{m} ≠ {g}·({h}·{m})")));
                    }
                }
            }
        }
        let arrows = points * order;
        let point = |a: usize| a / order;
        let element = |a: usize| a % order;
        let src: Vec<usize> = (0..arrows).map(point).collect();
        let tgt: Vec<usize> = (0..arrows).map(|a| act[element(a)][point(a)]).collect();
        let identity = (0..points).map(|m| m * order + e).collect();
        let inverse = (0..arrows)
            .map(|a| {
                let g = element(a);
                act[g][point(a)] * order + group_inverse[g]
            })
            .collect();
        FiniteGroupoid::from_parts(points, src, tgt, identity, inverse, |g, h| {
            point(h) * order + table[element(g)][element(h)]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> Vec<Vec<usize>> {
        vec![vec![0, 1], vec![1, 0]]
    }

    fn trivial_action() -> Vec<Vec<usize>> {
        vec![vec![0, 1], vec![0, 1]]
    }

    #[test]
    fn pair_groupoid_of_two() {
        let g = FiniteGroupoid::pair(2);
        assert_eq!(g.n_arrows(), 4);
        assert_eq!(g.leaves(), vec![vec![0, 1]]);
    }

    #[test]
    fn s3_as_groupoid() {
        let g = FiniteGroupoid::group(&symmetric_group_table(3)).unwrap();
        assert_eq!((g.n_objects(), g.n_arrows()), (1, 6));
        assert_eq!(g.identity(0), 0);
    }

    #[test]
    fn swap_action_is_transitive_with_trivial_isotropy() {
        let g = FiniteGroupoid::action(&cyclic_group_table(2), 2, &swap()).unwrap();
        assert_eq!(g.n_arrows(), 4);
        assert_eq!(g.leaves(), vec![vec![0, 1]]);
        assert_eq!(g.isotropy_group(0).unwrap().order(), 1);
    }

    #[test]
    fn trivial_action_gives_two_leaves_with_z2_isotropy() {
        let g = FiniteGroupoid::action(&cyclic_group_table(2), 2, &trivial_action()).unwrap();
        assert_eq!(g.leaves(), vec![vec![0], vec![1]]);
        assert_eq!(g.isotropy_group(0).unwrap().order(), 2);
    }

    #[test]
    fn pair_groupoid_isotropy_is_trivial() {
        let g = FiniteGroupoid::pair(3);
        let iso = g.isotropy_group(0).unwrap();
        assert_eq!(iso.arrows, vec![g.identity(0)]);
    }

    #[test]
    fn disjoint_union_of_groups_has_singleton_leaves() {
        let z2 = FiniteGroupoid::group(&cyclic_group_table(2)).unwrap();
        let g = FiniteGroupoid::disjoint_union(&[z2.clone(), z2]).unwrap();
        assert_eq!(g.leaves(), vec![vec![0], vec![1]]);
        assert_eq!(g.n_arrows(), 4);
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(matches!(FiniteGroupoid::group(&[vec![0, 0], vec![0, 1]]), Err(GroupoidError::NotAGroup(_))));
        let not_action = vec![vec![0, 1], vec![0, 0]];
        assert!(matches!(
            FiniteGroupoid::action(&cyclic_group_table(2), 2, &not_action),
            Err(GroupoidError::NotAnAction(_))
        ));
    }

    #[test]
    fn conjugate_isotropy_identity_and_s3_points() {
        let s3 = symmetric_group_table(3);
        let perms = permutations(3);
        let act: Vec<Vec<usize>> = perms.to_vec();
        let g = FiniteGroupoid::action(&s3, 3, &act).unwrap();
        let iso = g.conjugate_isotropy(0, 0, g.identity(0)).unwrap();
        assert!(iso.map.iter().all(|(a, b)| a == b));

        let order = s3.len();
        let group_inverse: Vec<usize> = (0..order).map(|a| (0..order).find(|&b| s3[a][b] == 0).unwrap()).collect();
        for a in g.arrows_from(0).iter().copied().filter(|&a| g.target(a) != 0) {
            let y = g.target(a);
            let elem = a % order;
            let iso = g.conjugate_isotropy(0, y, a).unwrap();
            for (&h, &image) in &iso.map {
                let expected = s3[s3[elem][h % order]][group_inverse[elem]];
                assert_eq!(image, y * order + expected);
            }
        }
        assert!(matches!(g.conjugate_isotropy(1, 2, g.identity(0)), Err(GroupoidError::NotConnecting { .. })));
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(permutations(3)[0], vec![0, 1, 2]);
        assert_eq!(permutations(3)[5], vec![2, 1, 0]);
        assert_eq!(permutations(4).len(), 24);
    }
}
