//! Numerical checks of the smooth side: algebroid consistency equations,
//! Poisson structures, and the discretised morphism and gauge equations.

pub mod checks;
pub mod data;
pub mod expr;
pub mod morphism;

pub use checks::{
    check_axioms, dual_poisson, jacobi_residual, loglog_slope, poisson_to_algebroid, sample_unit_ball,
    subalgebroid_check, AxiomReport, JacobiReport, SubalgebroidChart, SubalgebroidReport,
};
pub use data::{catalog, AlgebroidData, AlgebroidSpec, DataError, PoissonData, PoissonSpec};
pub use expr::{ExprError, ExprSource, Field};
pub use morphism::{
    gauge_order_study, infinitesimal_gauge, morphism_residual, refinement_study, FieldSpec, GaugeOrderStudy, Grid,
    MorphismError, MorphismField, MorphismResidual, RefinementStudy,
};
