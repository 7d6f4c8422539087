use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{partition_by_arrows, FiniteGroupoid, GroupoidError};

/// A subgroupoid of a parent [`FiniteGroupoid`], stored as masks over the
/// parent's objects and arrows.
///
/// The object set plays the role of the sub-base on which boundary values
/// live. Construction checks closure, so holding a value means the masks
/// describe a genuine subgroupoid of the parent it was built against.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroupoid {
    objects: Vec<bool>,
    arrows: Vec<bool>,
}

impl Subgroupoid {
    /// Checks that the given sets form a subgroupoid of `g`.
    pub fn new(
        g: &FiniteGroupoid,
        objects: impl IntoIterator<Item = usize>,
        arrows: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GroupoidError> {
        let mut object_mask = vec![false; g.n_objects()];
        for x in objects {
            g.check_object(x)?;
            object_mask[x] = true;
        }
        let mut arrow_mask = vec![false; g.n_arrows()];
        for a in arrows {
            g.check_arrow(a)?;
            arrow_mask[a] = true;
        }
        let sub = Subgroupoid { objects: object_mask, arrows: arrow_mask };
        sub.check_closed(g)?;
        Ok(sub)
    }

    /// Smallest subgroupoid containing the given objects and arrows.
    pub fn generated(
        g: &FiniteGroupoid,
        objects: impl IntoIterator<Item = usize>,
        arrows: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GroupoidError> {
        let mut object_mask = vec![false; g.n_objects()];
        let mut arrow_mask = vec![false; g.n_arrows()];
        let mut stack = Vec::new();
        for x in objects {
            g.check_object(x)?;
            object_mask[x] = true;
        }
        for a in arrows {
            g.check_arrow(a)?;
            stack.push(a);
        }
        for x in 0..g.n_objects() {
            if object_mask[x] {
                stack.push(g.identity(x));
            }
        }
        while let Some(a) = stack.pop() {
            if arrow_mask[a] {
                continue;
            }
            arrow_mask[a] = true;
            for x in [g.source(a), g.target(a)] {
                if !object_mask[x] {
                    object_mask[x] = true;
                    stack.push(g.identity(x));
                }
            }
            stack.push(g.inverse(a));
            let members: Vec<usize> = (0..g.n_arrows()).filter(|&b| arrow_mask[b]).collect();
            for b in members {
                if let Some(p) = g.compose(a, b) {
                    stack.push(p);
                }
                if let Some(p) = g.compose(b, a) {
                    stack.push(p);
                }
            }
        }
        Ok(Subgroupoid { objects: object_mask, arrows: arrow_mask })
    }

    /// Identities only, over every object ("trivial" boundary condition).
    pub fn base(g: &FiniteGroupoid) -> Self {
        Self::identities_over(g, 0..g.n_objects()).expect("objects in range")
    }

    /// Identities over the given objects.
    pub fn identities_over(
        g: &FiniteGroupoid,
        objects: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GroupoidError> {
        let objects: Vec<usize> = objects.into_iter().collect();
        for &x in &objects {
            g.check_object(x)?;
        }
        let arrows: Vec<usize> = objects.iter().map(|&x| g.identity(x)).collect();
        Self::new(g, objects, arrows)
    }

    /// The whole groupoid.
    pub fn full(g: &FiniteGroupoid) -> Self {
        Subgroupoid { objects: vec![true; g.n_objects()], arrows: vec![true; g.n_arrows()] }
    }

    fn check_closed(&self, g: &FiniteGroupoid) -> Result<(), GroupoidError> {
        let fail = |msg: String| Err(GroupoidError::NotASubgroupoid(msg));
        for x in self.objects() {
            if !self.arrows[g.identity(x)] {
                return fail(format!("identity of object {x} is missing"));
            }
        }
        let members = self.arrows();
        for &a in &members {
            if !self.objects[g.source(a)] || !self.objects[g.target(a)] {
                return fail(format!("arrow {a} has an endpoint outside the object set"));
            }
            if !self.arrows[g.inverse(a)] {
                return fail(format!("inverse of arrow {a} is missing"));
            }
            for &b in &members {
                if let Some(p) = g.compose(a, b) {
                    if !self.arrows[p] {
                        return fail(format!("product of arrows {a} and {b} is missing"));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when the masks have the shape of `g`.
    pub fn fits(&self, g: &FiniteGroupoid) -> bool {
        self.objects.len() == g.n_objects() && self.arrows.len() == g.n_arrows()
    }

    pub(crate) fn ensure_fits(&self, g: &FiniteGroupoid) -> Result<(), GroupoidError> {
        if self.fits(g) {
            Ok(())
        } else {
            Err(GroupoidError::NotASubgroupoid("built against a different groupoid".into()))
        }
    }

    pub fn contains_object(&self, x: usize) -> bool {
        self.objects.get(x).copied().unwrap_or(false)
    }

    pub fn contains_arrow(&self, a: usize) -> bool {
        self.arrows.get(a).copied().unwrap_or(false)
    }

    pub fn objects(&self) -> Vec<usize> {
        (0..self.objects.len()).filter(|&x| self.objects[x]).collect()
    }

    pub fn arrows(&self) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a]).collect()
    }

    /// Member arrows with source `x`, ascending.
    pub fn arrows_from(&self, g: &FiniteGroupoid, x: usize) -> Vec<usize> {
        g.arrows_from(x).iter().copied().filter(|&a| self.arrows[a]).collect()
    }

    /// Leaves of the subgroupoid: a partition of its object set, ordered by
    /// least object.
    pub fn leaves(&self, g: &FiniteGroupoid) -> Vec<Vec<usize>> {
        let edges = self.arrows().into_iter().map(|a| (g.source(a), g.target(a)));
        partition_by_arrows(g.n_objects(), edges)
            .into_iter()
            .filter(|leaf| self.objects[leaf[0]])
            .collect()
    }
}

/// One double coset `H₁ γ H₀` in the interval moduli.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCoset {
    /// Least arrow id in the class.
    pub representative: usize,
    pub size: usize,
    pub members: Vec<usize>,
}

/// Double cosets `h1 \ (t⁻¹(obj h1) ∩ s⁻¹(obj h0)) / h0`.
///
/// Two arrows are identified when `γ' = b₁ γ b₀⁻¹` for composable
/// `b₁ ∈ h1`, `b₀ ∈ h0`. Classes are returned in order of representative.
pub fn double_cosets(
    g: &FiniteGroupoid,
    h0: &Subgroupoid,
    h1: &Subgroupoid,
) -> Result<Vec<DoubleCoset>, GroupoidError> {
    h0.ensure_fits(g)?;
    h1.ensure_fits(g)?;
    let n = g.n_arrows();
    let admissible: Vec<bool> =
        (0..n).map(|a| h1.contains_object(g.target(a)) && h0.contains_object(g.source(a))).collect();
    let mut uf = UnionFind::<usize>::new(n);
    for gamma in (0..n).filter(|&a| admissible[a]) {
        for b1 in h1.arrows_from(g, g.target(gamma)) {
            uf.union(gamma, g.mul(b1, gamma));
        }
        for b0 in h0.arrows_from(g, g.source(gamma)) {
            uf.union(gamma, g.mul(gamma, g.inverse(b0)));
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut root_to_rep: BTreeMap<usize, usize> = BTreeMap::new();
    for a in (0..n).filter(|&a| admissible[a]) {
        let rep = *root_to_rep.entry(uf.find(a)).or_insert(a);
        classes.entry(rep).or_default().push(a);
    }
    Ok(classes
        .into_iter()
        .map(|(representative, members)| DoubleCoset { representative, size: members.len(), members })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroupoid::{cyclic_group_table, symmetric_group_table};

    #[test]
    fn base_and_full_subgroupoids() {
        let g = FiniteGroupoid::pair(3);
        let base = Subgroupoid::base(&g);
        assert_eq!(base.arrows(), vec![0, 4, 8]);
        assert_eq!(base.leaves(&g).len(), 3);
        assert_eq!(Subgroupoid::full(&g).leaves(&g), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn non_closed_sets_are_rejected() {
        let g = FiniteGroupoid::pair(3);
        // arrow 0->1 without its inverse
        assert!(matches!(Subgroupoid::new(&g, [0, 1], [0, 4, 1]), Err(GroupoidError::NotASubgroupoid(_))));
        // identity missing
        assert!(Subgroupoid::new(&g, [0, 1], [0]).is_err());
    }

    #[test]
    fn generated_closes_up() {
        let g = FiniteGroupoid::pair(3);
        let sub = Subgroupoid::generated(&g, [], [1]).unwrap(); // 0 -> 1
        assert_eq!(sub.objects(), vec![0, 1]);
        assert_eq!(sub.arrows(), vec![0, 1, 3, 4]);
        let s3 = FiniteGroupoid::group(&symmetric_group_table(3)).unwrap();
        assert_eq!(Subgroupoid::generated(&s3, [], [3]).unwrap().arrows().len(), 3);
    }

    #[test]
    fn base_base_double_cosets_are_single_arrows() {
        let g = FiniteGroupoid::pair(3);
        let base = Subgroupoid::base(&g);
        let classes = double_cosets(&g, &base, &base).unwrap();
        assert_eq!(classes.len(), 9);
        assert!(classes.iter().all(|c| c.size == 1));
    }

    #[test]
    fn full_full_double_cosets_are_leaves() {
        let z2 = FiniteGroupoid::group(&cyclic_group_table(2)).unwrap();
        let g = FiniteGroupoid::disjoint_union(&[FiniteGroupoid::pair(2), z2]).unwrap();
        let full = Subgroupoid::full(&g);
        assert_eq!(double_cosets(&g, &full, &full).unwrap().len(), g.leaves().len());
    }

    #[test]
    fn z2_double_cosets_in_s3() {
        let s3 = FiniteGroupoid::group(&symmetric_group_table(3)).unwrap();
        // element 1 is the transposition swapping 1 and 2
        let z2 = Subgroupoid::new(&s3, [0], [0, 1]).unwrap();
        let classes = double_cosets(&s3, &z2, &z2).unwrap();
        assert_eq!(classes.iter().map(|c| c.size).collect::<Vec<_>>(), vec![2, 4]);
    }
}
