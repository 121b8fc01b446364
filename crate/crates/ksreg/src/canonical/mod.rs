//! The canonical transformation built on the complete integral, and
//! everything riding on it: the analytic close-encounter propagator, the
//! globally defined Cartesian first integrals, and the completeness
//! verification machinery.
//!
//! # The map
//!
//! The complete integral `W(u; ν)` of the regularized Hamilton–Jacobi
//! equation generates a canonical transformation of the KS phase space,
//!
//! ```text
//!   U = ∂W/∂u (u; ν)          (implicitly defines  ν = ν̂(u, U))
//!   n = ∂W/∂ν (u; ν̂)         (evaluates            n = n̂(u, U))
//! ```
//!
//! conjugating the flow of `K_I` to the trivial one: `ν` is constant and
//! `n(s) = n(0) + 2μ ν s`. Orbits through and around the collision
//! `u = 0` become straight lines.
//!
//! # Module map
//!
//! * [`frame`] — cached series bundle of one `W(·; ν)`: gradients,
//!   Hessians, parameter jets; the trusted-radius residual scan.
//! * [`nu`] — the nonlinear inversion `ν̂(u, U)` (Broyden with an exact
//!   collision-point Jacobian `√(8μ) I`).
//! * [`chi4`] — the forward map `χ₄`, its inverse (`u` from `n` at fixed
//!   `ν`), and the conjugate-variable state type.
//! * [`encounter`] — the analytic encounter propagator: march the linear
//!   flow, recover states, locate the exit, integrate the time law.
//! * [`integrals`] — the bilinear first-integral triple and its globally
//!   defined Cartesian representatives.
//! * [`bracket`] — numeric Poisson brackets with error control,
//!   symplecticity defect, independence/involution reports, and the
//!   asymptote-manifold rank certificate.
//! * [`planar`] — the two-variable Levi-Civita pipeline, an independent
//!   cross-check of the spatial machinery on planar data.

pub mod bracket;
pub mod chi4;
pub mod encounter;
pub mod frame;
pub mod integrals;
pub mod nu;
pub mod planar;

#[cfg(test)]
pub(crate) mod testutil;

pub use bracket::{
    bracket_of_gradients, central_gradient, completeness_check, default_scales, encounter_scales,
    integral_component_at, poisson_bracket, prop5_rank, richardson_gradient, symplectic_defect,
    CompletenessReport, GradientEstimate, IntegralComponent,
};
pub use chi4::{chi4, chi4_inverse, n_hat, ActionAngleState, Chi4Inverse};
pub use encounter::{
    encounter_map, encounter_map_configured, EncounterDiagnostics, EncounterResult,
    MarchDirection,
};
pub use frame::{residual_radius_scan, EncounterFrame};
pub use integrals::{
    cartesian_integrals, cartesian_integrals_in_chart, first_integrals_nnu, ChartIntegrals,
    FirstIntegralTriple,
};
pub use nu::{nu_hat, nu_hat_guided, nu_hat_polished, NuSolve};
pub use planar::{
    planar_embed, planar_encounter_map, planar_encounter_map_configured, planar_invert,
    planar_jacobian_det, planar_parameters, PlanarDiagnostics, PlanarEncounterResult,
    PlanarFrame, PlanarInverse, PlanarParamSolve,
};
