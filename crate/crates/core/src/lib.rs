//! Moduli spaces of groupoid morphisms from surface fundamental groupoids
//! into finite groupoids, together with numerical checks of the smooth
//! (Lie algebroid) side.
//!
//! The exact, combinatorial part of the crate is organised bottom-up:
//!
//! * [`fingroupoid`]: finite groupoids given by composition tables, their
//!   leaves, isotropy groups, bisections, subgroupoids and double cosets.
//! * [`surface`]: presentations of surface groups and small CW models of
//!   closed and one-boundary surfaces.
//! * [`lattice`]: flat groupoid-valued fields on a CW surface, the pointwise
//!   gauge action and gauge-orbit enumeration.
//! * [`moduli`]: the holonomy side (representations into isotropy groups up
//!   to the adjoint action) and the cross-check against lattice orbits.
//!
//! [`algebroid`] holds the floating-point part: anchor and structure
//! functions given as analytic expressions, finite-difference residuals of
//! the algebroid axioms, the dual Poisson tensor, and the discretised
//! morphism and gauge equations on a chart grid.
//!
//! Composition convention used throughout: `compose(g, h)` is "g after h" and
//! is defined exactly when `target(h) == source(g)`.

pub mod algebroid;
pub mod fingroupoid;
pub mod lattice;
pub mod moduli;
pub mod surface;

pub use fingroupoid::{FiniteGroupoid, Subgroupoid};
pub use lattice::{Lattice, LatticeMorphism};
pub use surface::{CwSurface, SurfacePresentation, SurfaceSpec};

/// Default cap on enumeration work (candidate assignments).
pub const DEFAULT_LIMIT: u64 = 100_000_000;
