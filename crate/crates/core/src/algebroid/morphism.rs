//! Discretised morphism equations on a rectangular chart grid.
//!
//! A field is `X: grid → ℝⁿ` and `j: grid → ℝ^{r×2}` (`j[A][α]`, α = 1, 2).
//! At interior nodes, with central differences,
//!
//! * `R_A = ∂₁ j_{A2} − ∂₂ j_{A1} + f^{BC}_A(X) j_{B1} j_{C2}`
//! * `R^μ_α = ∂_α X^μ − ρ^{μA}(X) j_{Aα}`
//!
//! The infinitesimal gauge transformation with parameter `β: grid → ℝʳ` is
//! `δj_{Aα} = −∂_α β_A − f^{BC}_A(X) j_{Bα} β_C`, `δX^μ = −ρ^{μA}(X) β_A`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::checks::{abs_or_inf, loglog_slope, max_of};
use super::data::AlgebroidData;
use super::expr::{coordinate_names, ExprError, ExprSource, Field};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorphismError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("grid needs at least 3 nodes per side, got {0:?}")]
    GridTooSmall([usize; 2]),
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("{what} has {found} entries, expected {expected}")]
    Shape { what: &'static str, expected: usize, found: usize },
    #[error("refinement study needs an analytic field")]
    NotAnalytic,
}

/// Nodes `origin + (i·h, k·h)` for `i < n[0]`, `k < n[1]`; node `(i, k)` is
/// stored at `i·n[1] + k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub n: [usize; 2],
}

impl Grid {
    /// `[a, b]²` with `cells` cells per side.
    pub fn square(a: f64, b: f64, cells: usize) -> Self {
        Grid { origin: [a, a], spacing: (b - a) / cells as f64, n: [cells + 1, cells + 1] }
    }

    pub fn nodes(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.n[1] + k
    }

    pub fn point(&self, i: usize, k: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.spacing, self.origin[1] + k as f64 * self.spacing]
    }

    /// The grid without its outer ring of nodes.
    pub fn interior(&self) -> Grid {
        Grid {
            origin: [self.origin[0] + self.spacing, self.origin[1] + self.spacing],
            spacing: self.spacing,
            n: [self.n[0] - 2, self.n[1] - 2],
        }
    }

    /// Same square, half the spacing.
    pub fn refined(&self) -> Grid {
        Grid { origin: self.origin, spacing: self.spacing / 2.0, n: [2 * self.n[0] - 1, 2 * self.n[1] - 1] }
    }

    fn validate(&self) -> Result<(), MorphismError> {
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(MorphismError::BadSpacing(self.spacing));
        }
        if self.n[0] < 3 || self.n[1] < 3 {
            return Err(MorphismError::GridTooSmall(self.n));
        }
        Ok(())
    }
}

/// Nodal values of `(X, j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismField {
    pub grid: Grid,
    /// `x[node][μ]`
    pub x: Vec<Vec<f64>>,
    /// `j[node][A] = [j_{A1}, j_{A2}]`
    pub j: Vec<Vec<[f64; 2]>>,
}

/// Field file forms: analytic in the chart coordinates `u1, u2`, or nodal
/// values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Analytic { grid: Grid, x: Vec<ExprSource>, j: Vec<[ExprSource; 2]> },
    Values(MorphismField),
}

impl FieldSpec {
    pub fn build(&self) -> Result<MorphismField, MorphismError> {
        match self {
            FieldSpec::Analytic { grid, x, j } => sample_field(*grid, x, j),
            FieldSpec::Values(m) => {
                m.grid.validate()?;
                Ok(m.clone())
            }
        }
    }

    /// The same analytic field on a grid with half the spacing.
    pub fn refined(&self) -> Result<FieldSpec, MorphismError> {
        match self {
            FieldSpec::Analytic { grid, x, j } => Ok(FieldSpec::Analytic { grid: grid.refined(), x: x.clone(), j: j.clone() }),
            FieldSpec::Values(_) => Err(MorphismError::NotAnalytic),
        }
    }
}

/// Samples expressions in `u1, u2` at every node.
pub fn sample_field(grid: Grid, x: &[ExprSource], j: &[[ExprSource; 2]]) -> Result<MorphismField, MorphismError> {
    grid.validate()?;
    let names = coordinate_names("u", 2);
    let xs = x.iter().map(|e| Field::parse(e, &names)).collect::<Result<Vec<_>, _>>()?;
    let js = j
        .iter()
        .map(|[a, b]| Ok([Field::parse(a, &names)?, Field::parse(b, &names)?]))
        .collect::<Result<Vec<_>, ExprError>>()?;
    Ok(MorphismField {
        grid,
        x: nodal(grid, |p| xs.iter().map(|f| f.eval(p)).collect()),
        j: nodal(grid, |p| js.iter().map(|[a, b]| [a.eval(p), b.eval(p)]).collect()),
    })
}

/// Samples vector-valued expressions (e.g. a gauge parameter) at every node.
pub fn sample_vector(grid: Grid, exprs: &[ExprSource]) -> Result<Vec<Vec<f64>>, MorphismError> {
    let names = coordinate_names("u", 2);
    let fs = exprs.iter().map(|e| Field::parse(e, &names)).collect::<Result<Vec<_>, _>>()?;
    Ok(nodal(grid, |p| fs.iter().map(|f| f.eval(p)).collect()))
}

fn nodal<T>(grid: Grid, f: impl Fn(&[f64]) -> T) -> Vec<T> {
    (0..grid.n[0]).flat_map(|i| (0..grid.n[1]).map(move |k| (i, k))).map(|(i, k)| f(&grid.point(i, k))).collect()
}

fn check_field(a: &AlgebroidData, m: &MorphismField) -> Result<(), MorphismError> {
    m.grid.validate()?;
    let nodes = m.grid.nodes();
    for (what, found) in [("x", m.x.len()), ("j", m.j.len())] {
        if found != nodes {
            return Err(MorphismError::Shape { what, expected: nodes, found });
        }
    }
    if let Some(bad) = m.x.iter().find(|v| v.len() != a.dim_m) {
        return Err(MorphismError::Shape { what: "x at a node", expected: a.dim_m, found: bad.len() });
    }
    if let Some(bad) = m.j.iter().find(|v| v.len() != a.rank_e) {
        return Err(MorphismError::Shape { what: "j at a node", expected: a.rank_e, found: bad.len() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismResidual {
    pub interior_nodes: usize,
    pub spacing: f64,
    pub tol: f64,
    /// `max |R_A|`
    pub curvature_residual: f64,
    /// `max |R^μ_α|`
    pub anchor_residual: f64,
    pub passed: bool,
}

impl MorphismResidual {
    pub fn max_residual(&self) -> f64 {
        self.curvature_residual.max(self.anchor_residual)
    }
}

/// Both residuals at every interior node.
pub fn morphism_residual(a: &AlgebroidData, m: &MorphismField, tol: f64) -> Result<MorphismResidual, MorphismError> {
    check_field(a, m)?;
    let g = m.grid;
    let h2 = 2.0 * g.spacing;
    let (n, r) = (a.dim_m, a.rank_e);
    let mut curvature: Vec<f64> = Vec::new();
    let mut anchor: Vec<f64> = Vec::new();
    for i in 1..g.n[0] - 1 {
        for k in 1..g.n[1] - 1 {
            let at = g.index(i, k);
            let (east, west) = (g.index(i + 1, k), g.index(i - 1, k));
            let (north, south) = (g.index(i, k + 1), g.index(i, k - 1));
            let x = &m.x[at];
            let j = &m.j[at];
            let f = a.f_at(x);
            let rho = a.rho_at(x);
            for c in 0..r {
                let mut v = (m.j[east][c][1] - m.j[west][c][1]) / h2 - (m.j[north][c][0] - m.j[south][c][0]) / h2;
                for ia in 0..r {
                    for ib in 0..r {
                        v += f[ia][ib][c] * j[ia][0] * j[ib][1];
                    }
                }
                curvature.push(v);
            }
            for mu in 0..n {
                let dx = [(m.x[east][mu] - m.x[west][mu]) / h2, (m.x[north][mu] - m.x[south][mu]) / h2];
                for al in 0..2 {
                    let v = dx[al] - (0..r).map(|ia| rho[mu][ia] * j[ia][al]).sum::<f64>();
                    anchor.push(v);
                }
            }
        }
    }
    let curvature_residual = max_of(curvature);
    let anchor_residual = max_of(anchor);
    Ok(MorphismResidual {
        interior_nodes: (g.n[0] - 2) * (g.n[1] - 2),
        spacing: g.spacing,
        tol,
        curvature_residual,
        anchor_residual,
        passed: curvature_residual <= tol && anchor_residual <= tol,
    })
}

/// `m + ε·δm` on the interior grid (where `dβ` has central differences).
pub fn infinitesimal_gauge(
    a: &AlgebroidData,
    m: &MorphismField,
    beta: &[Vec<f64>],
    epsilon: f64,
) -> Result<MorphismField, MorphismError> {
    check_field(a, m)?;
    let g = m.grid;
    if beta.len() != g.nodes() {
        return Err(MorphismError::Shape { what: "beta", expected: g.nodes(), found: beta.len() });
    }
    if let Some(bad) = beta.iter().find(|b| b.len() != a.rank_e) {
        return Err(MorphismError::Shape { what: "beta at a node", expected: a.rank_e, found: bad.len() });
    }
    let inner = g.interior();
    let h2 = 2.0 * g.spacing;
    let (n, r) = (a.dim_m, a.rank_e);
    let mut x_out = Vec::with_capacity(inner.nodes());
    let mut j_out = Vec::with_capacity(inner.nodes());
    for i in 1..g.n[0] - 1 {
        for k in 1..g.n[1] - 1 {
            let at = g.index(i, k);
            let (east, west) = (g.index(i + 1, k), g.index(i - 1, k));
            let (north, south) = (g.index(i, k + 1), g.index(i, k - 1));
            let x = &m.x[at];
            let b = &beta[at];
            let rho = a.rho_at(x);
            let f = a.f_at(x);
            let new_x: Vec<f64> =
                (0..n).map(|mu| x[mu] - epsilon * (0..r).map(|ia| rho[mu][ia] * b[ia]).sum::<f64>()).collect();
            let new_j: Vec<[f64; 2]> = (0..r)
                .map(|c| {
                    let db = [(beta[east][c] - beta[west][c]) / h2, (beta[north][c] - beta[south][c]) / h2];
                    let mut out = m.j[at][c];
                    for (al, slot) in out.iter_mut().enumerate() {
                        let mut delta = -db[al];
                        for ib in 0..r {
                            for ic in 0..r {
                                delta -= f[ib][ic][c] * m.j[at][ib][al] * b[ic];
                            }
                        }
                        *slot += epsilon * delta;
                    }
                    out
                })
                .collect();
            x_out.push(new_x);
            j_out.push(new_j);
        }
    }
    Ok(MorphismField { grid: inner, x: x_out, j: j_out })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeOrderStudy {
    pub epsilons: Vec<f64>,
    /// `|residual(ε) − residual(0)|` of the gauged field.
    pub residual_growth: Vec<f64>,
    pub baseline: f64,
    pub slope: f64,
}

/// Residual growth of the gauged field as a function of `ε`.
pub fn gauge_order_study(
    a: &AlgebroidData,
    m: &MorphismField,
    beta: &[Vec<f64>],
    epsilons: &[f64],
) -> Result<GaugeOrderStudy, MorphismError> {
    let residual = |eps: f64| -> Result<f64, MorphismError> {
        Ok(morphism_residual(a, &infinitesimal_gauge(a, m, beta, eps)?, 0.0)?.max_residual())
    };
    let baseline = residual(0.0)?;
    let residual_growth = epsilons
        .iter()
        .map(|&e| residual(e).map(|r| abs_or_inf(r - baseline)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GaugeOrderStudy { epsilons: epsilons.to_vec(), slope: loglog_slope(epsilons, &residual_growth), residual_growth, baseline })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub spacings: Vec<f64>,
    pub residuals: Vec<f64>,
    pub order: f64,
}

/// Residual of an analytic field on `levels` successively halved grids.
pub fn refinement_study(a: &AlgebroidData, spec: &FieldSpec, levels: usize) -> Result<RefinementStudy, MorphismError> {
    let mut spec = spec.clone();
    let mut spacings = Vec::new();
    let mut residuals = Vec::new();
    for level in 0..levels {
        if level > 0 {
            spec = spec.refined()?;
        }
        let m = spec.build()?;
        spacings.push(m.grid.spacing);
        residuals.push(morphism_residual(a, &m, 0.0)?.max_residual());
    }
    Ok(RefinementStudy { order: loglog_slope(&spacings, &residuals), spacings, residuals })
}

/// Standard inputs for the convergence studies.
pub mod examples {
    use super::*;
    use crate::algebroid::data::{catalog, AlgebroidSpec};

    /// Rank-one abelian algebroid over a point.
    pub fn abelian_point() -> AlgebroidSpec {
        AlgebroidSpec { dim_m: 0, rank_e: 1, rho: vec![], f: vec![vec![vec![0.0.into()]]] }
    }

    /// `j = dφ` with `φ = sin(u1 + 2·u2)` on `[0, 1]²` with `cells` cells per
    /// side.
    pub fn exact_abelian(cells: usize) -> FieldSpec {
        FieldSpec::Analytic {
            grid: Grid::square(0.0, 1.0, cells),
            x: vec![],
            j: vec![["cos(u1 + 2*u2)".into(), "2*cos(u1 + 2*u2)".into()]],
        }
    }

    /// Constant `X` with `j = 0` for the so(3)* Lie–Poisson algebroid: an
    /// exact solution.
    pub fn lie_poisson_vacuum() -> (AlgebroidSpec, FieldSpec) {
        let field = FieldSpec::Analytic {
            grid: Grid::square(0.0, 1.0, 16),
            x: vec![0.3.into(), (-0.2).into(), 0.5.into()],
            j: vec![[0.0.into(), 0.0.into()]; 3],
        };
        (catalog::so3_lie_poisson(), field)
    }

    pub fn gauge_parameter() -> Vec<ExprSource> {
        vec!["sin(u1 + u2)".into(), "u2 * cos(2*u1)".into(), "u1 * u2 - 0.5".into()]
    }

    pub const EPSILONS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::algebroid::data::catalog;

    #[test]
    fn constant_vacuum_has_zero_residual() {
        let (a, f) = lie_poisson_vacuum();
        let r = morphism_residual(&a.build().unwrap(), &f.build().unwrap(), 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_residual(), 0.0);
    }

    #[test]
    fn exact_form_converges_at_second_order() {
        let a = abelian_point().build().unwrap();
        let study = refinement_study(&a, &exact_abelian(16), 3).unwrap();
        assert_eq!(study.spacings, vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]);
        assert!((1.8..=2.2).contains(&study.order), "{study:?}");
    }

    #[test]
    fn moving_off_a_leaf_is_flagged() {
        // so(3) over a line with zero anchor: leaves are points, so X may not move
        let a = catalog::so3_line().build().unwrap();
        let f = FieldSpec::Analytic {
            grid: Grid::square(0.0, 1.0, 8),
            x: vec!["u1".into()],
            j: vec![[0.0.into(), 0.0.into()]; 3],
        };
        let r = morphism_residual(&a, &f.build().unwrap(), 1e-6).unwrap();
        assert!(!r.passed && (r.anchor_residual - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_parameter_changes_nothing_but_the_border() {
        let (a, f) = lie_poisson_vacuum();
        let (a, m) = (a.build().unwrap(), f.build().unwrap());
        let zero = vec![vec![0.0; 3]; m.grid.nodes()];
        let g = infinitesimal_gauge(&a, &m, &zero, 0.3).unwrap();
        assert_eq!(g.grid, m.grid.interior());
        assert!(g.x.iter().all(|x| x == &m.x[0]));
        assert!(g.j.iter().all(|j| j.iter().all(|v| *v == [0.0, 0.0])));
    }

    #[test]
    fn abelian_gauge_keeps_the_form_exact() {
        let a = abelian_point().build().unwrap();
        let spec = exact_abelian(32);
        let m = spec.build().unwrap();
        let beta = sample_vector(m.grid, &["u1^2 * sin(u2)".into()]).unwrap();
        let before = morphism_residual(&a, &infinitesimal_gauge(&a, &m, &beta, 0.0).unwrap(), 0.0).unwrap();
        let after = morphism_residual(&a, &infinitesimal_gauge(&a, &m, &beta, 0.5).unwrap(), 0.0).unwrap();
        assert!((after.max_residual() - before.max_residual()).abs() < 1e-12);
    }

    #[test]
    fn gauge_residual_grows_quadratically() {
        let (a, f) = lie_poisson_vacuum();
        let (a, m) = (a.build().unwrap(), f.build().unwrap());
        let beta = sample_vector(m.grid, &gauge_parameter()).unwrap();
        let study = gauge_order_study(&a, &m, &beta, &EPSILONS).unwrap();
        assert!((1.8..=2.2).contains(&study.slope), "{study:?}");
    }

    #[test]
    fn translation_invariance() {
        let a = catalog::so3_lie_poisson().build().unwrap();
        let make = |origin: f64| FieldSpec::Analytic {
            grid: Grid { origin: [origin, origin], spacing: 0.05, n: [11, 11] },
            x: vec![0.1.into(), 0.2.into(), 0.3.into()],
            j: vec![["0.4".into(), "-0.1".into()]; 3],
        };
        let r0 = morphism_residual(&a, &make(0.0).build().unwrap(), 1e-6).unwrap();
        let r1 = morphism_residual(&a, &make(3.25).build().unwrap(), 1e-6).unwrap();
        assert_eq!(r0.curvature_residual, r1.curvature_residual);
        assert_eq!(r0.anchor_residual, r1.anchor_residual);
    }

    #[test]
    fn small_grids_are_rejected() {
        let f = FieldSpec::Analytic { grid: Grid::square(0.0, 1.0, 1), x: vec![], j: vec![["0".into(), "0".into()]] };
        assert!(matches!(f.build(), Err(MorphismError::GridTooSmall(_))));
        let m = exact_abelian(4).build().unwrap();
        assert!(matches!(morphism_residual(&catalog::so3_line().build().unwrap(), &m, 1e-6), Err(MorphismError::Shape { .. })));
    }
}
