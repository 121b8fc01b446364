//! Geometry and Hamiltonians of the KS-regularized restricted three-body
//! problem.
//!
//! This module owns everything that is *exact* (no series, no iteration):
//!
//! * [`types`] — state and parameter types for the three charts in play
//!   (rotating barycentric, rotating planetocentric, KS phase space);
//! * [`maps`] — the KS matrix `A(u)`, the Hopf-type projection `π`, the
//!   bilinear invariant `ℓ`, fiber rotations, and the magnetic-type vector
//!   potential `b_ω` produced by the rotating frame;
//! * [`frames`] — the quaternion-multiplication matrices `S_ν`, their induced
//!   spatial rotations `Π(S_ν)`, and the rotated frame vectors entering the
//!   Hamilton–Jacobi construction;
//! * [`charts`] — the two global KS chart sections (`+X`/`−X`), their planar
//!   Levi-Civita analog, chart transition angles, and phase-space projection;
//! * [`ham`] — the Hamiltonians: rotating barycentric `h`, planetocentric
//!   `H`, regularized `K_{λR}` with its identity-frame specialization `K_I`,
//!   the planar `K₂`, analytic gradients, and the primary-body mirror.
//!
//! Everything here is verified against structural identities (exact in real
//! arithmetic) by the `kscore` verification suite.

pub mod charts;
pub mod frames;
pub mod ham;
pub mod maps;
pub mod types;

pub use charts::{lc_lift, lc_project, phase_project, select_chart, transition_angle_between};
pub use frames::{frame_vectors, pi_snu, rnu_tilde, snu_matrix};
pub use ham::{ham_bary, ham_ks_identity, ham_ks_identity_grad, ham_planeto, mirror_to_secondary};
pub use maps::{bilinear, fiber_rotation, ks_matrix, ks_project, vector_potential};
pub use types::{Body, CartState, Chart, KsState, Params, PlanetoState};
