//! Finite-difference residuals of the algebroid axioms, the Poisson
//! constructions and the subalgebroid conditions.
//!
//! All derivatives are central differences with step `h`. Maxima are taken
//! over the sample points; a NaN anywhere makes the maximum infinite so that
//! it can never pass a tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{AlgebroidData, PoissonData};
use super::expr::Field;

pub const DEFAULT_H: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_SEED: u64 = 7;

/// `n` points drawn uniformly from the closed unit ball of ℝ^dim.
pub fn sample_unit_ball(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| loop {
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
            if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                break p;
            }
        })
        .collect()
}

/// Central difference `∂_μ f(x)`.
pub fn partial(f: &Field, x: &[f64], mu: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    p[mu] = x[mu] + h;
    let up = f.eval(&p);
    p[mu] = x[mu] - h;
    let down = f.eval(&p);
    (up - down) / (2.0 * h)
}

pub(crate) fn abs_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v.abs()
    }
}

pub(crate) fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().map(abs_or_inf).fold(0.0, f64::max)
}

/// Residuals of the two algebroid consistency equations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub points: usize,
    pub h: f64,
    pub tol: f64,
    /// `max |ρ^{νA}∂_νρ^{μB} − ρ^{νB}∂_νρ^{μA} − f^{AB}_C ρ^{μC}|`
    pub anchor_residual: f64,
    /// `max |ρ^{μ[D}∂_μ f^{AB]}_C + f^{[AB}_L f^{D]L}_C|`, antisymmetrised
    /// over `D, A, B` with weight `1/6`.
    pub bracket_residual: f64,
    /// `max |f^{AB}_C + f^{BA}_C|`
    pub antisymmetry_residual: f64,
    pub passed: bool,
}

impl AxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.anchor_residual.max(self.bracket_residual).max(self.antisymmetry_residual)
    }
}

/// Signed permutations of three slots.
const PERMS3: [([usize; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([0, 2, 1], -1.0),
    ([2, 1, 0], -1.0),
    ([1, 0, 2], -1.0),
];

fn axiom_residuals_at(a: &AlgebroidData, x: &[f64], h: f64) -> (f64, f64, f64) {
    let (n, r) = (a.dim_m, a.rank_e);
    let rho = a.rho_at(x);
    let f = a.f_at(x);
    // d_rho[ν][μ][A] = ∂_ν ρ^{μA}
    let d_rho: Vec<Vec<Vec<f64>>> =
        (0..n).map(|nu| a.rho.iter().map(|row| row.iter().map(|c| partial(c, x, nu, h)).collect()).collect()).collect();
    // d_f[μ][A][B][C] = ∂_μ f^{AB}_C
    let d_f: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|mu| {
            a.f.iter()
                .map(|fa| fa.iter().map(|fab| fab.iter().map(|c| partial(c, x, mu, h)).collect()).collect())
                .collect()
        })
        .collect();

    let mut anchor: f64 = 0.0;
    for mu in 0..n {
        for ia in 0..r {
            for ib in 0..r {
                let mut v = 0.0;
                for nu in 0..n {
                    v += rho[nu][ia] * d_rho[nu][mu][ib] - rho[nu][ib] * d_rho[nu][mu][ia];
                }
                for c in 0..r {
                    v -= f[ia][ib][c] * rho[mu][c];
                }
                anchor = anchor.max(abs_or_inf(v));
            }
        }
    }

    let t = |d: usize, ia: usize, ib: usize, c: usize| {
        let mut v = 0.0;
        for mu in 0..n {
            v += rho[mu][d] * d_f[mu][ia][ib][c];
        }
        for l in 0..r {
            v += f[ia][ib][l] * f[d][l][c];
        }
        v
    };
    let mut bracket: f64 = 0.0;
    for d in 0..r {
        for ia in 0..r {
            for ib in 0..r {
                for c in 0..r {
                    let idx = [d, ia, ib];
                    let v: f64 = PERMS3.iter().map(|(p, s)| s * t(idx[p[0]], idx[p[1]], idx[p[2]], c)).sum::<f64>() / 6.0;
                    bracket = bracket.max(abs_or_inf(v));
                }
            }
        }
    }

    let mut antisym: f64 = 0.0;
    for ia in 0..r {
        for ib in 0..r {
            for c in 0..r {
                antisym = antisym.max(abs_or_inf(f[ia][ib][c] + f[ib][ia][c]));
            }
        }
    }
    (anchor, bracket, antisym)
}

/// Evaluates both consistency equations at every sample point.
pub fn check_axioms(a: &AlgebroidData, samples: &[Vec<f64>], h: f64, tol: f64) -> AxiomReport {
    let per_point: Vec<(f64, f64, f64)> = samples.par_iter().map(|x| axiom_residuals_at(a, x, h)).collect();
    let anchor_residual = max_of(per_point.iter().map(|p| p.0));
    let bracket_residual = max_of(per_point.iter().map(|p| p.1));
    let antisymmetry_residual = max_of(per_point.iter().map(|p| p.2));
    let passed = anchor_residual <= tol && bracket_residual <= tol && antisymmetry_residual <= tol;
    AxiomReport { points: samples.len(), h, tol, anchor_residual, bracket_residual, antisymmetry_residual, passed }
}

/// The cotangent algebroid of a Poisson structure: `E = T*M` with basis
/// `dx^A`, anchor `ρ^{μA} = α^{Aμ}` (so `ρ(dx^A) = α^{Aμ}∂_μ`) and
/// `f^{AB}_C = ∂_C α^{AB}` by central differences with step `h`.
pub fn poisson_to_algebroid(p: &PoissonData, h: f64) -> AlgebroidData {
    let n = p.dim_m;
    let rho = (0..n).map(|mu| (0..n).map(|a| p.alpha[a][mu].clone()).collect()).collect();
    let f = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|c| {
                            let alpha = p.alpha[a][b].clone();
                            Field::new(move |x| partial(&alpha, x, c, h))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    AlgebroidData { dim_m: n, rank_e: n, rho, f }
}

/// The fibrewise-linear Poisson structure on the dual bundle, in
/// coordinates `(X¹, …, Xⁿ, λ¹, …, λʳ)`:
/// `{λ^A, λ^B} = f^{AB}_C λ^C`, `{λ^A, X^μ} = ρ^{μA}`, `{X^μ, X^ν} = 0`.
///
/// With this normalisation the Jacobi identity of the result is equivalent
/// to the two consistency equations of the algebroid.
pub fn dual_poisson(a: &AlgebroidData) -> PoissonData {
    let (n, r) = (a.dim_m, a.rank_e);
    let dim = n + r;
    let mut alpha = vec![vec![Field::constant(0.0); dim]; dim];
    for ia in 0..r {
        for ib in 0..r {
            let fab: Vec<Field> = a.f[ia][ib].clone();
            alpha[n + ia][n + ib] = Field::new(move |p| {
                let (x, lambda) = p.split_at(n);
                fab.iter().zip(lambda).map(|(c, l)| c.eval(x) * l).sum()
            });
        }
        for mu in 0..n {
            let rho = a.rho[mu][ia].clone();
            let minus = rho.clone();
            alpha[n + ia][mu] = Field::new(move |p| rho.eval(&p[..n]));
            alpha[mu][n + ia] = Field::new(move |p| -minus.eval(&p[..n]));
        }
    }
    PoissonData { dim_m: dim, alpha }
}

/// `max |π^{il}∂_l π^{jk} + π^{jl}∂_l π^{ki} + π^{kl}∂_l π^{ij}|` and the
/// largest antisymmetry defect `|π^{ij} + π^{ji}|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobiReport {
    pub dim: usize,
    pub points: usize,
    pub h: f64,
    pub tol: f64,
    pub jacobi_residual: f64,
    pub antisymmetry_residual: f64,
    pub passed: bool,
}

fn jacobi_at(p: &PoissonData, x: &[f64], h: f64) -> (f64, f64) {
    let d = p.dim_m;
    let pi = p.alpha_at(x);
    // d_pi[l][j][k] = ∂_l π^{jk}
    let d_pi: Vec<Vec<Vec<f64>>> =
        (0..d).map(|l| p.alpha.iter().map(|row| row.iter().map(|c| partial(c, x, l, h)).collect()).collect()).collect();
    let mut jac: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut v = 0.0;
                for l in 0..d {
                    v += pi[i][l] * d_pi[l][j][k] + pi[j][l] * d_pi[l][k][i] + pi[k][l] * d_pi[l][i][j];
                }
                jac = jac.max(abs_or_inf(v));
            }
        }
    }
    let mut antisym: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            antisym = antisym.max(abs_or_inf(pi[i][j] + pi[j][i]));
        }
    }
    (jac, antisym)
}

pub fn jacobi_residual(p: &PoissonData, samples: &[Vec<f64>], h: f64, tol: f64) -> JacobiReport {
    let per_point: Vec<(f64, f64)> = samples.par_iter().map(|x| jacobi_at(p, x, h)).collect();
    let jacobi_residual = max_of(per_point.iter().map(|v| v.0));
    let antisymmetry_residual = max_of(per_point.iter().map(|v| v.1));
    JacobiReport {
        dim: p.dim_m,
        points: samples.len(),
        h,
        tol,
        jacobi_residual,
        antisymmetry_residual,
        passed: jacobi_residual <= tol && antisymmetry_residual <= tol,
    }
}

/// Splits base coordinates into transverse ones (zero on the submanifold)
/// and tangent ones, and the fibre basis into the sub-basis and the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubalgebroidChart {
    /// Base coordinates vanishing on the submanifold.
    pub transverse: Vec<usize>,
    /// Fibre basis vectors spanning the subbundle.
    pub sub_basis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubalgebroidReport {
    pub points: usize,
    pub tol: f64,
    /// `max |ρ^{μ̂ a}|` over transverse `μ̂` and sub-basis `a`.
    pub anchor_residual: f64,
    /// `max |f^{ab}_n|` over sub-basis `a, b` and complementary `n`.
    pub bracket_residual: f64,
    pub passed: bool,
}

/// Checks that the anchor of the sub-basis is tangent to the submanifold
/// and that the sub-basis closes under the bracket there. Sample points are
/// projected onto the submanifold (transverse coordinates set to 0).
pub fn subalgebroid_check(
    a: &AlgebroidData,
    chart: &SubalgebroidChart,
    samples: &[Vec<f64>],
    tol: f64,
) -> SubalgebroidReport {
    let complement: Vec<usize> = (0..a.rank_e).filter(|c| !chart.sub_basis.contains(c)).collect();
    let per_point: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|x| {
            let mut x = x.clone();
            for &mu in &chart.transverse {
                x[mu] = 0.0;
            }
            let mut anchor: f64 = 0.0;
            for &mu in &chart.transverse {
                for &ia in &chart.sub_basis {
                    anchor = anchor.max(abs_or_inf(a.rho[mu][ia].eval(&x)));
                }
            }
            let mut bracket: f64 = 0.0;
            for &ia in &chart.sub_basis {
                for &ib in &chart.sub_basis {
                    for &c in &complement {
                        bracket = bracket.max(abs_or_inf(a.f[ia][ib][c].eval(&x)));
                    }
                }
            }
            (anchor, bracket)
        })
        .collect();
    let anchor_residual = max_of(per_point.iter().map(|v| v.0));
    let bracket_residual = max_of(per_point.iter().map(|v| v.1));
    SubalgebroidReport {
        points: samples.len(),
        tol,
        anchor_residual,
        bracket_residual,
        passed: anchor_residual <= tol && bracket_residual <= tol,
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::super::data::{catalog, so3_constants};
    use super::*;

    fn ball(dim: usize) -> Vec<Vec<f64>> {
        sample_unit_ball(dim, DEFAULT_POINTS, DEFAULT_SEED)
    }

    #[test]
    fn samples_are_in_the_ball_and_reproducible() {
        let s = sample_unit_ball(3, 50, 1);
        assert!(s.iter().all(|p| p.iter().map(|v| v * v).sum::<f64>() <= 1.0));
        assert_eq!(s, sample_unit_ball(3, 50, 1));
        assert_eq!(sample_unit_ball(0, 4, 1), vec![Vec::<f64>::new(); 4]);
    }

    #[test]
    fn lie_algebra_with_zero_anchor_passes() {
        let a = catalog::so3_line().build().unwrap();
        let r = check_axioms(&a, &ball(1), DEFAULT_H, DEFAULT_TOL);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn lie_poisson_passes_and_broken_fails() {
        let p = catalog::so3_dual().build().unwrap();
        let a = poisson_to_algebroid(&p, DEFAULT_H);
        let r = check_axioms(&a, &ball(3), DEFAULT_H, DEFAULT_TOL);
        assert!(r.passed && r.max_residual() < 1e-6, "{r:?}");
        let broken = catalog::so3_lie_poisson_broken().build().unwrap();
        let r = check_axioms(&broken, &ball(3), DEFAULT_H, DEFAULT_TOL);
        assert!(r.max_residual() > 1e-2, "{r:?}");
    }

    #[test]
    fn derived_anchor_matches_written_out_lie_poisson() {
        let derived = poisson_to_algebroid(&catalog::so3_dual().build().unwrap(), DEFAULT_H);
        let written = catalog::so3_lie_poisson().build().unwrap();
        for x in ball(3).iter().take(10) {
            let (r1, r2) = (derived.rho_at(x), written.rho_at(x));
            let (f1, f2) = (derived.f_at(x), written.f_at(x));
            for i in 0..3 {
                for j in 0..3 {
                    assert!((r1[i][j] - r2[i][j]).abs() < 1e-12);
                    for k in 0..3 {
                        assert!((f1[i][j][k] - f2[i][j][k]).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn untransposed_anchor_breaks_the_anchor_equation() {
        // ρ^{μA} = α^{μA} instead of α^{Aμ}
        let p = catalog::so3_dual().build().unwrap();
        let mut a = poisson_to_algebroid(&p, DEFAULT_H);
        a.rho = p.alpha.clone();
        let r = check_axioms(&a, &ball(3), DEFAULT_H, DEFAULT_TOL);
        assert!(r.anchor_residual > 1e-2);
    }

    #[test]
    fn planar_bivectors_give_algebroids() {
        for spec in [catalog::symplectic_r2(), catalog::curved_r2()] {
            let a = poisson_to_algebroid(&spec.build().unwrap(), DEFAULT_H);
            let r = check_axioms(&a, &ball(2), DEFAULT_H, DEFAULT_TOL);
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn dual_poisson_cases() {
        let so3 = catalog::so3_point().build().unwrap();
        let r = jacobi_residual(&dual_poisson(&so3), &ball(3), DEFAULT_H, DEFAULT_TOL);
        assert!(r.passed && r.jacobi_residual < 1e-6, "{r:?}");
        let t = catalog::tangent_r1().build().unwrap();
        let r = jacobi_residual(&dual_poisson(&t), &ball(2), DEFAULT_H, DEFAULT_TOL);
        assert_eq!(r.jacobi_residual, 0.0);
        let broken = catalog::so3_lie_poisson_broken().build().unwrap();
        let r = jacobi_residual(&dual_poisson(&broken), &ball(6), DEFAULT_H, DEFAULT_TOL);
        assert!(!r.passed && r.jacobi_residual > 1e-2, "{r:?}");
    }

    #[test]
    fn dual_of_lie_algebra_is_lie_poisson() {
        let so3 = catalog::so3_point().build().unwrap();
        let pi = dual_poisson(&so3);
        let lp = catalog::so3_dual().build().unwrap();
        let c = so3_constants();
        for x in ball(3).iter().take(10) {
            let a = pi.alpha_at(x);
            let b = lp.alpha_at(x);
            for i in 0..3 {
                for j in 0..3 {
                    let expected: f64 = (0..3).map(|k| c[i][j][k] * x[k]).sum();
                    assert!((a[i][j] - expected).abs() < 1e-12);
                    assert!((a[i][j] - b[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn subalgebroid_conditions() {
        let so3 = catalog::so3_line().build().unwrap();
        let samples = ball(1);
        let whole = SubalgebroidChart { transverse: vec![], sub_basis: vec![0, 1, 2] };
        assert!(subalgebroid_check(&so3, &whole, &samples, DEFAULT_TOL).passed);
        let line = SubalgebroidChart { transverse: vec![], sub_basis: vec![0] };
        assert!(subalgebroid_check(&so3, &line, &samples, DEFAULT_TOL).passed);
        let plane = SubalgebroidChart { transverse: vec![], sub_basis: vec![0, 1] };
        let r = subalgebroid_check(&so3, &plane, &samples, DEFAULT_TOL);
        assert!(!r.passed && r.bracket_residual == 1.0);
        // the origin of so(3)* with the full fibre: the anchor vanishes there
        let lp = catalog::so3_lie_poisson().build().unwrap();
        let origin = SubalgebroidChart { transverse: vec![0, 1, 2], sub_basis: vec![0, 1, 2] };
        assert!(subalgebroid_check(&lp, &origin, &ball(3), DEFAULT_TOL).passed);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }
}
