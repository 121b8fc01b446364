//! Kustaanheimo–Stiefel (KS) regularization of close encounters in the
//! spatial circular restricted three-body problem (CRTBP).
//!
//! The crate builds, from first principles, an *analytic* propagator for close
//! encounters with the small primary of the CRTBP. Instead of integrating the
//! stiff Cartesian equations through a near-collision, it
//!
//! 1. lifts the planetocentric state to the KS double cover `u ∈ R⁴`, where the
//!    collision singularity becomes a regular point of a polynomial-like
//!    Hamiltonian `K` in the rescaled time `s` (`dt = |u|² ds`);
//! 2. solves the Hamilton–Jacobi equation of `K` by a Cauchy–Kowalevski power
//!    series in `u` (the [`hjsolver`] module), parameterized by a 4-vector `ν`
//!    that selects the incoming asymptote and by energy-like constants;
//! 3. uses the resulting complete integral `W(u; ν)` as the generating function
//!    of a canonical transformation `χ₄: (u, U) → (n, ν)` in which the encounter
//!    flow is *exactly linear*: `ν(s) = ν(0)`, `n(s) = n(0) + 2μ ν(0) s`
//!    (the [`canonical`] module);
//! 4. pushes the conserved quantities of that linear flow back to Cartesian
//!    coordinates, obtaining first integrals `𝒩 = (𝒩_X, 𝒩_Y, 𝒩_Z)` of the
//!    encounter that are globally defined across the collision set.
//!
//! A planar Levi-Civita (LC) variant of the same pipeline is provided both as
//! an independent cross-check and because the planar problem is of interest in
//! its own right.
//!
//! # Units and conventions
//!
//! Synodic (rotating) frame of the CRTBP with unit mass sum, unit angular
//! velocity, and unit primary–secondary separation. The mass ratio `μ ∈ (0, ½]`
//! is the mass of the *secondary* (the smaller body). Two Cartesian charts are
//! used:
//!
//! * **barycentric**: positions `(x, y, z)`, conjugate momenta `(p_x, p_y, p_z)`
//!   (momenta equal inertial velocities expressed in rotating axes); the
//!   secondary sits at `(1−μ, 0, 0)`, the primary at `(−μ, 0, 0)`;
//! * **planetocentric**: the same chart translated so the chosen body is at the
//!   origin, `X = x − (1−μ)`, with momenta adjusted so the transformation is
//!   canonical: `P_X = p_x`, `P_Y = p_y − (1−μ)`, `P_Z = p_z`.
//!
//! Encounters with the *primary* body reduce to the secondary case through an
//! exact mirror symmetry (see [`kscore::ham`]); everything downstream treats
//! the secondary case.
//!
//! # Crate layout
//!
//! | module       | contents                                                            |
//! |--------------|---------------------------------------------------------------------|
//! | [`scalar`]   | scalar abstraction (`f64`, `f32`, forward-mode jets)                |
//! | [`algebra`]  | dense truncated multivariate power series over a [`scalar::Scalar`] |
//! | [`kscore`]   | KS/LC geometry, Hamiltonians, charts, state types                   |
//! | [`hjsolver`] | Cauchy–Kowalevski series solution of the HJ equation                |
//! | [`canonical`]| the transformation `χ₄`, encounter map, first integrals, brackets   |
//! | [`dynamics`] | reference adaptive Runge–Kutta integration (oracles), time mapping  |
//! | [`verify`]   | seeded, deterministic verification suites used by the CLI and tests |
//! | [`tol`]      | centralized numeric tolerances and defaults                         |
//!
//! The numerical kernels ([`algebra`], the series construction in
//! [`hjsolver`], the frame maps in [`kscore`]) are generic over the
//! [`scalar::Scalar`] trait; `f64` type aliases are re-exported at the crate
//! root ([`Series`], [`Series32`]). Instantiating the same code with
//! [`scalar::Jet`] yields exact derivatives of every series coefficient with
//! respect to chosen parameters — the mechanism behind the dual-path
//! parameter-derivative checks and the Newton Jacobians of [`canonical`].
//!
//! # Determinism
//!
//! Every randomized routine takes an explicit seed and derives per-sample
//! sub-seeds, so results are independent of thread scheduling; repeated runs
//! with the same seed produce byte-identical reports.
//!
//! # Example
//!
//! Build the complete integral at the reference parameters and evaluate the
//! first integrals of an encounter state:
//!
//! ```
//! use ksreg::kscore::Params;
//! use ksreg::hjsolver::HjSolver;
//! use ksreg::canonical::EncounterFrame;
//!
//! let params = Params::new(0.01, -1.8).unwrap();
//! let solver = HjSolver::new(params, 8).unwrap();
//! // Unit asymptote direction e1: coefficient of u1 in W is sqrt(8 mu).
//! let sol = solver.complete_integral(&[1.0, 0.0, 0.0, 0.0]).unwrap();
//! let c1 = sol.w.coeff(&[1, 0, 0, 0]).unwrap();
//! assert!((c1 - (8.0 * 0.01f64).sqrt()).abs() < 1e-12);
//! # let _ = EncounterFrame::new(&sol);
//! ```

pub mod algebra;
pub mod canonical;
pub mod dynamics;
pub mod error;
pub mod hjsolver;
pub mod io;
pub mod kscore;
pub mod linalg;
pub mod sampling;
pub mod scalar;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Jet, Jet2, Jet4, Scalar};

/// Dense truncated multivariate power series with `f64` coefficients — the
/// working type of every concrete pipeline in this crate.
pub type Series = algebra::MultiSeries<f64>;

/// Single-precision instantiation of the series algebra. Useful for quick
/// storage-bound experiments; the verification suites run in `f64`.
pub type Series32 = algebra::MultiSeries<f32>;
