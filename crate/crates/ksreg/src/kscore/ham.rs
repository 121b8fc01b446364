//! Hamiltonians of the problem, their exact relations, and analytic
//! gradients.
//!
//! # The chain of Hamiltonians
//!
//! Rotating **barycentric** (the textbook CRTBP form; momenta are inertial
//! velocities in rotating axes):
//!
//! ```text
//!   h = |p|²/2 + p_x y − p_y x − (1−μ)/ρ₁ − μ/ρ₂ ,
//! ```
//!
//! with `ρ₁, ρ₂` the distances to the primary `(−μ,0,0)` and the secondary
//! `(1−μ,0,0)`. The canonical planetocentric translation (see
//! [`crate::kscore::types`]) turns it *exactly* into
//!
//! ```text
//!   H = |P|²/2 + P_X Y − P_Y X − μ/r − (1−μ)(1/ρ − 1 + X) − (1−μ) − (1−μ)²/2 ,
//! ```
//!
//! `r = |(X,Y,Z)|`, `ρ = |(X+1,Y,Z)|` — no approximation: the extra constants
//! absorb the momentum shift, and `h(state) = H(translate(state))` holds
//! identically.
//!
//! The KS lift with time rescaling `dt = |u|² ds` on the energy level
//! `H = E` produces the **regularized** Hamiltonian family (scaling `λ > 0`,
//! rotation `R ∈ SO(3)`, `ω = Rᵀe₃`, `e = Rᵀe₁`):
//!
//! ```text
//!   K_{λR}(u, U) = |U − λ² b_ω(u)|² / (8λ²) − (λ²/2) |u|² |ω ∧ π(u)|²
//!                  − μ/λ − |u|² E_μ
//!                  − (1−μ) |u|² ( 1/|λπ(u) + e| − 1 + λ π(u)·e ) ,
//! ```
//!
//! with `E_μ = E + (1−μ) + (1−μ)²/2`. At `λ = 1, R = I` this is `K_I`, and
//!
//! ```text
//!   K_I(u, U) = |u|² ( H(π̃(u, U)) − E )        on the fiber ℓ(u, U) = 0,
//! ```
//!
//! so the zero level of `K_I` is the lifted energy level, *including* the
//! collision `u = 0` where `K_I = −μ ≠ 0`… more precisely the level
//! `K_I = 0` contains the collision states with `|U|² = 8μ`. All of this is
//! polynomial plus one inverse square root — analytic near `u = 0`.
//!
//! The frame equivariance that powers the whole construction is
//!
//! ```text
//!   K_I(S_ν u, S_ν U / |ν|²) = |ν|² · K_{λR}(u, U),   λ = |ν|², R = Π(S_ν),
//! ```
//!
//! verified numerically here and in the verification suite.
//!
//! Encounters with the **primary** body are handled by the exact mirror
//! `(x, y, z, p_x, p_y, p_z) → (−x, −y, z, −p_x, −p_y, p_z)`, `μ → 1−μ`
//! ([`mirror_to_secondary`]), under which `h` is invariant up to the swap of
//! body roles.

use crate::kscore::maps::{
    ks_project, ks_project_jacobian, vector_potential, vector_potential_dir,
};
use crate::kscore::types::{CartState, KsState, PlanetoState};
use crate::linalg::{dot3, norm2_3, norm2_4};

/// Rotating barycentric Hamiltonian `h`.
pub fn ham_bary(s: &CartState, mu: f64) -> f64 {
    let c = 1.0 - mu;
    let rho1 = ((s.x + mu) * (s.x + mu) + s.y * s.y + s.z * s.z).sqrt();
    let rho2 = ((s.x - c) * (s.x - c) + s.y * s.y + s.z * s.z).sqrt();
    0.5 * (s.px * s.px + s.py * s.py + s.pz * s.pz) + s.px * s.y - s.py * s.x
        - c / rho1
        - mu / rho2
}

/// Gradient of [`ham_bary`]: `(∂h/∂x, ∂h/∂y, ∂h/∂z, ∂h/∂p_x, ∂h/∂p_y, ∂h/∂p_z)`.
pub fn ham_bary_grad(s: &CartState, mu: f64) -> [f64; 6] {
    let c = 1.0 - mu;
    let d1 = [s.x + mu, s.y, s.z];
    let d2 = [s.x - c, s.y, s.z];
    let r13 = norm2_3(&d1).powf(1.5);
    let r23 = norm2_3(&d2).powf(1.5);
    [
        -s.py + c * d1[0] / r13 + mu * d2[0] / r23,
        s.px + c * d1[1] / r13 + mu * d2[1] / r23,
        c * d1[2] / r13 + mu * d2[2] / r23,
        s.px + s.y,
        s.py - s.x,
        s.pz,
    ]
}

/// Rotating planetocentric Hamiltonian `H` (secondary at the origin).
pub fn ham_planeto(s: &PlanetoState, mu: f64) -> f64 {
    let c = 1.0 - mu;
    let r = s.radius();
    let rho = ((s.x + 1.0) * (s.x + 1.0) + s.y * s.y + s.z * s.z).sqrt();
    0.5 * (s.px * s.px + s.py * s.py + s.pz * s.pz) + s.px * s.y - s.py * s.x
        - mu / r
        - c * (1.0 / rho - 1.0 + s.x)
        - c
        - 0.5 * c * c
}

/// Gradient of [`ham_planeto`] in the order `(X, Y, Z, P_X, P_Y, P_Z)`.
pub fn ham_planeto_grad(s: &PlanetoState, mu: f64) -> [f64; 6] {
    let c = 1.0 - mu;
    let r3 = (s.x * s.x + s.y * s.y + s.z * s.z).powf(1.5);
    let rho3 = ((s.x + 1.0) * (s.x + 1.0) + s.y * s.y + s.z * s.z).powf(1.5);
    [
        -s.py + mu * s.x / r3 + c * ((s.x + 1.0) / rho3 - 1.0),
        s.px + mu * s.y / r3 + c * s.y / rho3,
        mu * s.z / r3 + c * s.z / rho3,
        s.px + s.y,
        s.py - s.x,
        s.pz,
    ]
}

/// Two-body ("Kepler") reduction of the planetocentric Hamiltonian: the
/// rotating-frame problem with only the central mass `μ` and none of the
/// distant-body terms. Validation hook for the regularized flow (circular
/// orbits of the central body are closed-form).
pub fn ham_planeto_kepler(s: &PlanetoState, mu: f64) -> f64 {
    let r = s.radius();
    0.5 * (s.px * s.px + s.py * s.py + s.pz * s.pz) + s.px * s.y - s.py * s.x - mu / r
}

/// Gradient of [`ham_planeto_kepler`].
pub fn ham_planeto_kepler_grad(s: &PlanetoState, mu: f64) -> [f64; 6] {
    let r3 = (s.x * s.x + s.y * s.y + s.z * s.z).powf(1.5);
    [
        -s.py + mu * s.x / r3,
        s.px + mu * s.y / r3,
        mu * s.z / r3,
        s.px + s.y,
        s.py - s.x,
        s.pz,
    ]
}

/// Shared core of the regularized Hamiltonians (identity frame, `λ = 1`):
/// `central` is the mass at the origin, `e_eff` the effective energy
/// constant, `distant` the coefficient of the distant-body terms
/// (`1 − μ`, or `0` for the Kepler reduction).
fn ks_identity_core(u: &[f64; 4], p: &[f64; 4], central: f64, e_eff: f64, distant: f64) -> f64 {
    let e3 = [0.0, 0.0, 1.0];
    let b = vector_potential(&e3, u);
    let q = ks_project(u);
    let n2 = norm2_4(u);
    let w = [p[0] - b[0], p[1] - b[1], p[2] - b[2], p[3] - b[3]];
    let kinetic = 0.125 * norm2_4(&w);
    // |e₃ ∧ q|² = q₁² + q₂².
    let wedge = q[0] * q[0] + q[1] * q[1];
    let mut k = kinetic - 0.5 * n2 * wedge - central - n2 * e_eff;
    if distant != 0.0 {
        let rho = ((q[0] + 1.0) * (q[0] + 1.0) + q[1] * q[1] + q[2] * q[2]).sqrt();
        k -= distant * n2 * (1.0 / rho - 1.0 + q[0]);
    }
    k
}

/// Gradient core matching [`ks_identity_core`]; returns `(∂K/∂u, ∂K/∂p)`.
fn ks_identity_core_grad(
    u: &[f64; 4],
    p: &[f64; 4],
    central_unused: f64,
    e_eff: f64,
    distant: f64,
) -> ([f64; 4], [f64; 4]) {
    let _ = central_unused; // the constant −μ has zero gradient
    let e3 = [0.0, 0.0, 1.0];
    let b = vector_potential(&e3, u);
    let q = ks_project(u);
    let jq = ks_project_jacobian(u);
    let n2 = norm2_4(u);
    let w = [p[0] - b[0], p[1] - b[1], p[2] - b[2], p[3] - b[3]];
    let wedge = q[0] * q[0] + q[1] * q[1];

    // ∂K/∂p = (p − b)/4.
    let dp = [0.25 * w[0], 0.25 * w[1], 0.25 * w[2], 0.25 * w[3]];

    // Distant-body potential pieces.
    let (g, dg_dq) = if distant != 0.0 {
        let d = [q[0] + 1.0, q[1], q[2]];
        let rho = norm2_3(&d).sqrt();
        let rho3 = rho * rho * rho;
        (
            1.0 / rho - 1.0 + q[0],
            [-d[0] / rho3 + 1.0, -d[1] / rho3, -d[2] / rho3],
        )
    } else {
        (0.0, [0.0; 3])
    };

    let mut du = [0.0f64; 4];
    for j in 0..4 {
        let mut ej = [0.0f64; 4];
        ej[j] = 1.0;
        // Kinetic term: −(1/4) (p − b) · ∂b/∂u_j.
        let db = vector_potential_dir(&e3, u, &ej);
        let t1 = -0.25 * (w[0] * db[0] + w[1] * db[1] + w[2] * db[2] + w[3] * db[3]);
        // Centrifugal term: −u_j |e₃∧q|² − |u|² (q₁ ∂q₁ + q₂ ∂q₂)/∂u_j.
        let t2 = -u[j] * wedge - n2 * (q[0] * jq[0][j] + q[1] * jq[1][j]);
        // Energy term.
        let t3 = -2.0 * u[j] * e_eff;
        // Distant-body term: −distant (2 u_j g + |u|² ∇_q g · ∂q/∂u_j).
        let t4 = if distant != 0.0 {
            let dq_j = [jq[0][j], jq[1][j], jq[2][j]];
            -distant * (2.0 * u[j] * g + n2 * dot3(&dg_dq, &dq_j))
        } else {
            0.0
        };
        du[j] = t1 + t2 + t3 + t4;
    }
    (du, dp)
}

/// The identity-frame regularized Hamiltonian `K_I`.
pub fn ham_ks_identity(u: &[f64; 4], p: &[f64; 4], mu: f64, energy: f64) -> f64 {
    let c = 1.0 - mu;
    let e_mu = energy + c + 0.5 * c * c;
    ks_identity_core(u, p, mu, e_mu, c)
}

/// Analytic gradient of `K_I`: `(∂K/∂u, ∂K/∂p)`.
pub fn ham_ks_identity_grad(
    u: &[f64; 4],
    p: &[f64; 4],
    mu: f64,
    energy: f64,
) -> ([f64; 4], [f64; 4]) {
    let c = 1.0 - mu;
    let e_mu = energy + c + 0.5 * c * c;
    ks_identity_core_grad(u, p, mu, e_mu, c)
}

/// Kepler reduction of `K_I` (distant-body terms removed, energy constant
/// not shifted). Validation hook paired with [`ham_planeto_kepler`].
pub fn ham_ks_kepler(u: &[f64; 4], p: &[f64; 4], mu: f64, energy: f64) -> f64 {
    ks_identity_core(u, p, mu, energy, 0.0)
}

/// Gradient of [`ham_ks_kepler`].
pub fn ham_ks_kepler_grad(
    u: &[f64; 4],
    p: &[f64; 4],
    mu: f64,
    energy: f64,
) -> ([f64; 4], [f64; 4]) {
    ks_identity_core_grad(u, p, mu, energy, 0.0)
}

/// The general scaled-and-rotated regularized Hamiltonian `K_{λR}`, with the
/// rotation supplied through its pulled-back frame vectors `ω = Rᵀe₃`,
/// `e = Rᵀe₁`.
pub fn ham_ks_scaled(
    u: &[f64; 4],
    p: &[f64; 4],
    mu: f64,
    energy: f64,
    lambda: f64,
    omega: &[f64; 3],
    e: &[f64; 3],
) -> f64 {
    let c = 1.0 - mu;
    let e_mu = energy + c + 0.5 * c * c;
    let l2 = lambda * lambda;
    let b = vector_potential(omega, u);
    let q = ks_project(u);
    let n2 = norm2_4(u);
    let w = [
        p[0] - l2 * b[0],
        p[1] - l2 * b[1],
        p[2] - l2 * b[2],
        p[3] - l2 * b[3],
    ];
    let kinetic = norm2_4(&w) / (8.0 * l2);
    let wq = crate::linalg::cross3(omega, &q);
    let lq_e = [lambda * q[0] + e[0], lambda * q[1] + e[1], lambda * q[2] + e[2]];
    kinetic - 0.5 * l2 * n2 * norm2_3(&wq) - mu / lambda - n2 * e_mu
        - c * n2 * (1.0 / norm2_3(&lq_e).sqrt() - 1.0 + lambda * dot3(&q, e))
}

// ───────────────────────── planar Levi-Civita ─────────────────────────

/// The planar regularized Hamiltonian `K₂` (the restriction of `K_I` to the
/// invariant planar submanifold `u₃ = u₄ = p₃ = p₄ = 0` in LC variables):
///
/// ```text
///   K₂ = [(U₁ + 2|u|²u₂)² + (U₂ − 2|u|²u₁)²]/8 − |u|⁶/2 − μ − |u|² E_μ
///        − (1−μ) |u|² ( 1/√(1 + 2X + |u|⁴) − 1 + X ),   X = u₁² − u₂².
/// ```
pub fn ham_lc(u: &[f64; 2], p: &[f64; 2], mu: f64, energy: f64) -> f64 {
    let c = 1.0 - mu;
    let e_mu = energy + c + 0.5 * c * c;
    let n2 = u[0] * u[0] + u[1] * u[1];
    let x = u[0] * u[0] - u[1] * u[1];
    let w1 = p[0] + 2.0 * n2 * u[1];
    let w2 = p[1] - 2.0 * n2 * u[0];
    let rho = (1.0 + 2.0 * x + n2 * n2).sqrt();
    0.125 * (w1 * w1 + w2 * w2) - 0.5 * n2 * n2 * n2 - mu - n2 * e_mu
        - c * n2 * (1.0 / rho - 1.0 + x)
}

/// Analytic gradient of [`ham_lc`]: `(∂K₂/∂u, ∂K₂/∂p)`.
pub fn ham_lc_grad(u: &[f64; 2], p: &[f64; 2], mu: f64, energy: f64) -> ([f64; 2], [f64; 2]) {
    let c = 1.0 - mu;
    let e_mu = energy + c + 0.5 * c * c;
    let n2 = u[0] * u[0] + u[1] * u[1];
    let x = u[0] * u[0] - u[1] * u[1];
    let w1 = p[0] + 2.0 * n2 * u[1];
    let w2 = p[1] - 2.0 * n2 * u[0];
    let rho2 = 1.0 + 2.0 * x + n2 * n2;
    let rho = rho2.sqrt();
    let rho3 = rho2 * rho;
    let g = 1.0 / rho - 1.0 + x;

    let dp = [0.25 * w1, 0.25 * w2];

    // ∂w₁/∂u = (4u₁u₂, 2|u|² + 4u₂²), ∂w₂/∂u = (−2|u|² − 4u₁², −4u₁u₂).
    let dw1 = [4.0 * u[0] * u[1], 2.0 * n2 + 4.0 * u[1] * u[1]];
    let dw2 = [-2.0 * n2 - 4.0 * u[0] * u[0], -4.0 * u[0] * u[1]];
    // ∂ρ²/∂u = (4u₁ + 4|u|²u₁, −4u₂ + 4|u|²u₂); ∂g/∂u = −∂ρ²/∂u/(2ρ³) + ∂X/∂u.
    let dg = [
        -(2.0 * u[0] + 2.0 * n2 * u[0]) / rho3 + 2.0 * u[0],
        -(-2.0 * u[1] + 2.0 * n2 * u[1]) / rho3 - 2.0 * u[1],
    ];
    let mut du = [0.0f64; 2];
    for j in 0..2 {
        du[j] = 0.25 * (w1 * dw1[j] + w2 * dw2[j])
            - 3.0 * n2 * n2 * u[j]
            - 2.0 * u[j] * e_mu
            - c * (2.0 * u[j] * g + n2 * dg[j]);
    }
    (du, dp)
}

// ───────────────────────── the primary-body mirror ─────────────────────────

/// Maps an encounter with the **primary** onto the secondary case: mirrors
/// the state through `(x, y) → (−x, −y)` (momenta likewise, `z` fixed) and
/// swaps the mass ratio to `1 − μ`. Exactly energy-preserving:
/// `h_μ(state) = h_{1−μ}(mirror(state))`.
pub fn mirror_to_secondary(s: &CartState, mu: f64) -> (CartState, f64) {
    (
        CartState {
            x: -s.x,
            y: -s.y,
            z: s.z,
            px: -s.px,
            py: -s.py,
            pz: s.pz,
        },
        1.0 - mu,
    )
}

/// Convenience: `K_I` evaluated on a [`KsState`].
pub fn ham_ks_identity_state(state: &KsState, mu: f64, energy: f64) -> f64 {
    ham_ks_identity(&state.u, &state.p, mu, energy)
}
