//! Bisections of a finite groupoid and their group law
//! `(σ₁σ₂)(x) = σ₁(t(σ₂(x))) σ₂(x)`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::FiniteGroupoid;

/// Upper bound on `Π_x |s⁻¹(x)|` accepted by [`FiniteGroupoid::bisections`].
pub const MAX_BISECTION_CANDIDATES: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisectionError {
    #[error("{candidates} candidate bisections exceed the limit of {limit}")]
    TooMany { candidates: u128, limit: u128 },
}

/// A section of the source map whose target map is a bijection of objects.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Bisection {
    pub sigma: Vec<usize>,
}

impl Bisection {
    /// The object permutation `x ↦ t(σ(x))`.
    pub fn psi(&self, g: &FiniteGroupoid) -> Vec<usize> {
        self.sigma.iter().map(|&a| g.target(a)).collect()
    }

    pub fn is_valid(&self, g: &FiniteGroupoid) -> bool {
        if self.sigma.len() != g.n_objects() {
            return false;
        }
        let mut hit = vec![false; g.n_objects()];
        for (x, &a) in self.sigma.iter().enumerate() {
            if a >= g.n_arrows() || g.source(a) != x || std::mem::replace(&mut hit[g.target(a)], true) {
                return false;
            }
        }
        true
    }

    /// `self ∘ other` under the bisection group law.
    pub fn compose(&self, other: &Bisection, g: &FiniteGroupoid) -> Bisection {
        let sigma = other.sigma.iter().map(|&b| g.mul(self.sigma[g.target(b)], b)).collect();
        Bisection { sigma }
    }

    pub fn inverse(&self, g: &FiniteGroupoid) -> Bisection {
        let mut sigma = vec![0; self.sigma.len()];
        for &a in &self.sigma {
            sigma[g.target(a)] = g.inverse(a);
        }
        Bisection { sigma }
    }
}

/// All bisections of a groupoid, in lexicographic order of `sigma`, with
/// their multiplication table.
#[derive(Clone, Debug)]
pub struct BisectionGroup {
    pub elements: Vec<Bisection>,
    /// `table[i * n + j]` is the index of `elements[i] ∘ elements[j]`.
    pub table: Vec<usize>,
    pub identity: usize,
}

impl FiniteGroupoid {
    /// Enumerates the bisection group by backtracking over objects.
    pub fn bisections(&self) -> Result<BisectionGroup, BisectionError> {
        let candidates = (0..self.n_objects())
            .map(|x| self.arrows_from(x).len() as u128)
            .try_fold(1u128, |acc, k| acc.checked_mul(k).filter(|&v| v <= MAX_BISECTION_CANDIDATES));
        let Some(_) = candidates else {
            let total = (0..self.n_objects())
                .map(|x| self.arrows_from(x).len() as u128)
                .fold(1u128, |acc, k| acc.saturating_mul(k));
            return Err(BisectionError::TooMany { candidates: total, limit: MAX_BISECTION_CANDIDATES });
        };

        let mut elements = Vec::new();
        let mut sigma = Vec::with_capacity(self.n_objects());
        let mut used = vec![false; self.n_objects()];
        self.extend_bisection(&mut sigma, &mut used, &mut elements);

        let index: HashMap<&Bisection, usize> = elements.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                table.push(index[&a.compose(b, self)]);
            }
        }
        let id = Bisection { sigma: (0..self.n_objects()).map(|x| self.identity(x)).collect() };
        let identity = index[&id];
        Ok(BisectionGroup { elements, table, identity })
    }

    fn extend_bisection(&self, sigma: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Bisection>) {
        let x = sigma.len();
        if x == self.n_objects() {
            out.push(Bisection { sigma: sigma.clone() });
            return;
        }
        for &a in self.arrows_from(x) {
            let y = self.target(a);
            if used[y] {
                continue;
            }
            used[y] = true;
            sigma.push(a);
            self.extend_bisection(sigma, used, out);
            sigma.pop();
            used[y] = false;
        }
    }
}

impl BisectionGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order() + j]
    }

    /// The bisection group as a one-object groupoid (so the groupoid
    /// validator doubles as a group-axiom check).
    pub fn to_groupoid(&self, g: &FiniteGroupoid) -> FiniteGroupoid {
        let n = self.order();
        let index: HashMap<&Bisection, usize> = self.elements.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let inverse = self.elements.iter().map(|b| index[&b.inverse(g)]).collect();
        FiniteGroupoid::from_parts(1, vec![0; n], vec![0; n], vec![self.identity], inverse, |i, j| self.mul(i, j))
            .expect("bisections form a group")
    }

    /// `ψ(σ₁σ₂) = ψ(σ₁)∘ψ(σ₂)` for all pairs and every `ψ(σ)` maps each leaf
    /// onto itself.
    pub fn psi_is_leaf_preserving_homomorphism(&self, g: &FiniteGroupoid) -> bool {
        let psi: Vec<Vec<usize>> = self.elements.iter().map(|b| b.psi(g)).collect();
        let leaf = g.leaf_index();
        let n = self.order();
        let hom = (0..n).all(|i| {
            (0..n).all(|j| {
                let composed: Vec<usize> = psi[j].iter().map(|&y| psi[i][y]).collect();
                composed == psi[self.mul(i, j)]
            })
        });
        let preserves = psi.iter().all(|p| p.iter().enumerate().all(|(x, &y)| leaf[x] == leaf[y]));
        hom && preserves
    }
}
