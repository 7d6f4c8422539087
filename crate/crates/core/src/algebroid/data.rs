//! Anchors, structure functions and Poisson tensors as evaluable fields,
//! with their JSON forms and a catalog of standard examples.
//!
//! Index conventions: `rho[μ][A] = ρ^{μA}`, `f[A][B][C] = f^{AB}_C`,
//! `alpha[μ][ν] = α^{μν}`. Base coordinates are named `x1, …, xn`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{coordinate_names, ExprError, ExprSource, Field};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{what} has shape {found}, expected {expected}")]
    Shape { what: &'static str, expected: String, found: String },
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
}

/// Anchor and structure functions on a trivialising chart.
#[derive(Clone, Debug)]
pub struct AlgebroidData {
    pub dim_m: usize,
    pub rank_e: usize,
    pub rho: Vec<Vec<Field>>,
    pub f: Vec<Vec<Vec<Field>>>,
}

impl AlgebroidData {
    pub fn rho_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.rho.iter().map(|row| row.iter().map(|r| r.eval(x)).collect()).collect()
    }

    pub fn f_at(&self, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
        self.f.iter().map(|fa| fa.iter().map(|fab| fab.iter().map(|c| c.eval(x)).collect()).collect()).collect()
    }

    /// A Lie algebra with the given structure constants over an
    /// `dim_m`-dimensional base, with zero anchor.
    pub fn lie_algebra(dim_m: usize, constants: &[Vec<Vec<f64>>]) -> Self {
        let rank_e = constants.len();
        AlgebroidData {
            dim_m,
            rank_e,
            rho: vec![vec![Field::constant(0.0); rank_e]; dim_m],
            f: constants
                .iter()
                .map(|fa| fa.iter().map(|fab| fab.iter().map(|&c| Field::constant(c)).collect()).collect())
                .collect(),
        }
    }
}

/// A bivector field `α^{μν}`.
#[derive(Clone, Debug)]
pub struct PoissonData {
    pub dim_m: usize,
    pub alpha: Vec<Vec<Field>>,
}

impl PoissonData {
    pub fn alpha_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.alpha.iter().map(|row| row.iter().map(|a| a.eval(x)).collect()).collect()
    }
}

/// `{"dim_M": n, "rank_E": r, "rho": [[expr; r]; n], "f": [[[expr; r]; r]; r]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebroidSpec {
    #[serde(rename = "dim_M")]
    pub dim_m: usize,
    #[serde(rename = "rank_E")]
    pub rank_e: usize,
    pub rho: Vec<Vec<ExprSource>>,
    pub f: Vec<Vec<Vec<ExprSource>>>,
}

/// `{"dim_M": n, "alpha": [[expr; n]; n]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonSpec {
    #[serde(rename = "dim_M")]
    pub dim_m: usize,
    pub alpha: Vec<Vec<ExprSource>>,
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), DataError> {
    if expected == found {
        Ok(())
    } else {
        Err(DataError::Shape { what, expected: expected.to_string(), found: found.to_string() })
    }
}

impl AlgebroidSpec {
    pub fn build(&self) -> Result<AlgebroidData, DataError> {
        let names = coordinate_names("x", self.dim_m);
        check_len("rho rows", self.dim_m, self.rho.len())?;
        let rho = self
            .rho
            .iter()
            .map(|row| {
                check_len("rho row", self.rank_e, row.len())?;
                row.iter().map(|e| Ok(Field::parse(e, &names)?)).collect::<Result<Vec<_>, DataError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        check_len("f", self.rank_e, self.f.len())?;
        let f = self
            .f
            .iter()
            .map(|fa| {
                check_len("f[A]", self.rank_e, fa.len())?;
                fa.iter()
                    .map(|fab| {
                        check_len("f[A][B]", self.rank_e, fab.len())?;
                        fab.iter().map(|e| Ok(Field::parse(e, &names)?)).collect::<Result<Vec<_>, DataError>>()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AlgebroidData { dim_m: self.dim_m, rank_e: self.rank_e, rho, f })
    }
}

impl PoissonSpec {
    pub fn build(&self) -> Result<PoissonData, DataError> {
        let names = coordinate_names("x", self.dim_m);
        check_len("alpha rows", self.dim_m, self.alpha.len())?;
        let alpha = self
            .alpha
            .iter()
            .map(|row| {
                check_len("alpha row", self.dim_m, row.len())?;
                row.iter().map(|e| Ok(Field::parse(e, &names)?)).collect::<Result<Vec<_>, DataError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PoissonData { dim_m: self.dim_m, alpha })
    }
}

fn texts<const N: usize>(row: [&str; N]) -> Vec<ExprSource> {
    row.iter().map(|&s| ExprSource::from(s)).collect()
}

/// `ε^{ABC}` for indices in `0..3`.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Structure constants `f^{AB}_C = ε^{ABC}` of so(3).
pub fn so3_constants() -> Vec<Vec<Vec<f64>>> {
    (0..3).map(|a| (0..3).map(|b| (0..3).map(|c| levi_civita(a, b, c)).collect()).collect()).collect()
}

fn constant_spec(constants: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<ExprSource>>> {
    constants.iter().map(|fa| fa.iter().map(|fab| fab.iter().map(|&c| ExprSource::Number(c)).collect()).collect()).collect()
}

/// Named examples.
pub mod catalog {
    use super::*;

    pub const ALGEBROIDS: &[&str] =
        &["so3_point", "so3_line", "so3_lie_poisson", "so3_lie_poisson_broken", "tangent_r1", "frame_r2"];
    pub const POISSON: &[&str] = &["so3_dual", "symplectic_r2", "curved_r2"];

    /// so(3) over a point (`dim_M = 0`).
    pub fn so3_point() -> AlgebroidSpec {
        AlgebroidSpec { dim_m: 0, rank_e: 3, rho: vec![], f: constant_spec(&so3_constants()) }
    }

    /// so(3) over the line with zero anchor.
    pub fn so3_line() -> AlgebroidSpec {
        AlgebroidSpec { dim_m: 1, rank_e: 3, rho: vec![texts(["0", "0", "0"])], f: constant_spec(&so3_constants()) }
    }

    /// The cotangent algebroid of so(3)* written out: anchor
    /// `ρ^{μA} = ε^{Aμλ} x_λ`, constants `f^{AB}_C = ε^{ABC}`.
    pub fn so3_lie_poisson() -> AlgebroidSpec {
        AlgebroidSpec {
            dim_m: 3,
            rank_e: 3,
            rho: vec![texts(["0", "-x3", "x2"]), texts(["x3", "0", "-x1"]), texts(["-x2", "x1", "0"])],
            f: constant_spec(&so3_constants()),
        }
    }

    /// [`so3_lie_poisson`] with the sign of `f^{12}_3` (and `f^{21}_3`)
    /// flipped. The bracket is still a Lie algebra (so(2,1)), but the anchor
    /// no longer intertwines it with the bracket of vector fields.
    pub fn so3_lie_poisson_broken() -> AlgebroidSpec {
        let mut c = so3_constants();
        c[0][1][2] = -c[0][1][2];
        c[1][0][2] = -c[1][0][2];
        AlgebroidSpec { f: constant_spec(&c), ..so3_lie_poisson() }
    }

    /// `Tℝ`: anchor 1, no bracket.
    pub fn tangent_r1() -> AlgebroidSpec {
        AlgebroidSpec { dim_m: 1, rank_e: 1, rho: vec![texts(["1"])], f: vec![vec![texts(["0"])]] }
    }

    /// `Tℝ²` in the frame `e₁ = ∂_x`, `e₂ = exp(sin x) ∂_y`, where
    /// `[e₁, e₂] = cos(x) e₂`.
    pub fn frame_r2() -> AlgebroidSpec {
        AlgebroidSpec {
            dim_m: 2,
            rank_e: 2,
            rho: vec![texts(["1", "0"]), texts(["0", "exp(sin(x1))"])],
            f: vec![vec![texts(["0", "0"]), texts(["0", "cos(x1)"])], vec![texts(["0", "-cos(x1)"]), texts(["0", "0"])]],
        }
    }

    /// Lie–Poisson structure `α^{μν} = ε^{μνλ} x_λ` on so(3)*.
    pub fn so3_dual() -> PoissonSpec {
        PoissonSpec {
            dim_m: 3,
            alpha: vec![texts(["0", "x3", "-x2"]), texts(["-x3", "0", "x1"]), texts(["x2", "-x1", "0"])],
        }
    }

    /// Constant symplectic form on ℝ².
    pub fn symplectic_r2() -> PoissonSpec {
        PoissonSpec { dim_m: 2, alpha: vec![texts(["0", "1"]), texts(["-1", "0"])] }
    }

    /// A non-constant bivector on ℝ² (Poisson since every bivector in two
    /// dimensions is).
    pub fn curved_r2() -> PoissonSpec {
        PoissonSpec {
            dim_m: 2,
            alpha: vec![texts(["0", "exp(x1) * cos(x2) + x1^2"]), texts(["-(exp(x1) * cos(x2) + x1^2)", "0"])],
        }
    }

    pub fn algebroid(name: &str) -> Result<AlgebroidSpec, DataError> {
        Ok(match name {
            "so3_point" => so3_point(),
            "so3_line" => so3_line(),
            "so3_lie_poisson" => so3_lie_poisson(),
            "so3_lie_poisson_broken" => so3_lie_poisson_broken(),
            "tangent_r1" => tangent_r1(),
            "frame_r2" => frame_r2(),
            other => return Err(DataError::UnknownCatalog(other.into())),
        })
    }

    pub fn poisson(name: &str) -> Result<PoissonSpec, DataError> {
        Ok(match name {
            "so3_dual" => so3_dual(),
            "symplectic_r2" => symplectic_r2(),
            "curved_r2" => curved_r2(),
            other => return Err(DataError::UnknownCatalog(other.into())),
        })
    }
}
