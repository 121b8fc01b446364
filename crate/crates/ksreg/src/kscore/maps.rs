//! The KS matrix algebra: `A(u)`, the projection `π`, the bilinear invariant
//! `ℓ`, fiber rotations, and the rotating-frame vector potential `b_ω`.
//!
//! # Mathematical background
//!
//! The KS map sends `u ∈ R⁴` to the spatial position `q = π(u)` through the
//! linear-in-`u` matrix `A(u)`:
//!
//! ```text
//!          ⎡ u₁ −u₂ −u₃  u₄ ⎤
//!   A(u) = ⎢ u₂  u₁ −u₄ −u₃ ⎥      (q, 0) = A(u) u,
//!          ⎢ u₃  u₄  u₁  u₂ ⎥      A(u) Aᵀ(u) = |u|² I.
//!          ⎣ u₄ −u₃  u₂ −u₁ ⎦
//! ```
//!
//! so `q₁ = u₁²−u₂²−u₃²+u₄²`, `q₂ = 2(u₁u₂−u₃u₄)`, `q₃ = 2(u₁u₃+u₂u₄)` and
//! `|q| = |u|²`. The preimage of a point is a circle (the *fiber*), generated
//! by the rotations `S⁰_α = cos α · I + sin α · Ω` with
//!
//! ```text
//!       ⎡ 0  0  0 −1 ⎤
//!   Ω = ⎢ 0  0  1  0 ⎥ ,   ℓ(u, w) = ⟨u, Ω w⟩ = u₄w₁ − u₃w₂ + u₂w₃ − u₁w₄.
//!       ⎢ 0 −1  0  0 ⎥
//!       ⎣ 1  0  0  0 ⎦
//! ```
//!
//! The bilinear form `ℓ` is the fiber invariant: KS momenta of physical
//! states satisfy `ℓ(u, p) = 0`, and the condition is preserved by the
//! regularized flow.
//!
//! The rotating frame adds a magnetic-type term to the regularized
//! Hamiltonian through the quadratic-in-`u` vector potential
//!
//! ```text
//!   b_ω(u) = 2 Aᵀ(u) Λ_ω A(u) u,        Λ_ω (q, 0) = (ω ∧ q, 0),
//! ```
//!
//! where `ω` is the frame's angular velocity seen in the KS chart.
//!
//! All identities quoted above are exercised numerically by the `kscore`
//! verification suite over random states.

use crate::linalg::{matvec4, transpose4};
use crate::scalar::Scalar;

/// The KS matrix `A(u)` (row-major).
#[inline]
pub fn ks_matrix<T: Scalar>(u: &[T; 4]) -> [[T; 4]; 4] {
    let [u1, u2, u3, u4] = *u;
    [
        [u1, -u2, -u3, u4],
        [u2, u1, -u4, -u3],
        [u3, u4, u1, u2],
        [u4, -u3, u2, -u1],
    ]
}

/// The KS projection `π(u)`: first three components of `A(u) u` (the fourth
/// vanishes identically).
#[inline]
pub fn ks_project<T: Scalar>(u: &[T; 4]) -> [T; 3] {
    let [u1, u2, u3, u4] = *u;
    let two = T::from_f64(2.0);
    [
        u1 * u1 - u2 * u2 - u3 * u3 + u4 * u4,
        two * (u1 * u2 - u3 * u4),
        two * (u1 * u3 + u2 * u4),
    ]
}

/// Jacobian of the KS projection: `∂π/∂u = 2 Â(u)` with `Â` the first three
/// rows of `A(u)`. Returned row-major (3 × 4).
#[inline]
pub fn ks_project_jacobian<T: Scalar>(u: &[T; 4]) -> [[T; 4]; 3] {
    let a = ks_matrix(u);
    let two = T::from_f64(2.0);
    let mut j = [[T::zero(); 4]; 3];
    for (ji, ai) in j.iter_mut().zip(a.iter()) {
        for (jij, aij) in ji.iter_mut().zip(ai.iter()) {
            *jij = two * *aij;
        }
    }
    j
}

/// The fiber-generating matrix `Ω`.
#[inline]
pub fn omega4<T: Scalar>() -> [[T; 4]; 4] {
    let o = T::zero();
    let l = T::one();
    [
        [o, o, o, -l],
        [o, o, l, o],
        [o, -l, o, o],
        [l, o, o, o],
    ]
}

/// The bilinear invariant `ℓ(u, w) = ⟨u, Ω w⟩`.
#[inline]
pub fn bilinear<T: Scalar>(u: &[T; 4], w: &[T; 4]) -> T {
    u[3] * w[0] - u[2] * w[1] + u[1] * w[2] - u[0] * w[3]
}

/// The fiber rotation `S⁰_α = cos α · I + sin α · Ω`.
#[inline]
pub fn fiber_rotation<T: Scalar>(alpha: T) -> [[T; 4]; 4] {
    let (s, c) = (alpha.sin(), alpha.cos());
    let o = T::zero();
    [
        [c, o, o, -s],
        [o, c, s, o],
        [o, -s, c, o],
        [s, o, o, c],
    ]
}

/// The generator `Λ_ω` of the frame rotation in the 4-component embedding:
/// `Λ_ω (q, 0) = (ω ∧ q, 0)` (fourth row and column zero).
#[inline]
pub fn lambda_omega<T: Scalar>(omega: &[T; 3]) -> [[T; 4]; 4] {
    let o = T::zero();
    let [w1, w2, w3] = *omega;
    [
        [o, -w3, w2, o],
        [w3, o, -w1, o],
        [-w2, w1, o, o],
        [o, o, o, o],
    ]
}

/// The rotating-frame vector potential `b_ω(u) = 2 Aᵀ(u) Λ_ω A(u) u`.
#[inline]
pub fn vector_potential<T: Scalar>(omega: &[T; 3], u: &[T; 4]) -> [T; 4] {
    let a = ks_matrix(u);
    let q4 = matvec4(&a, u); // (π(u), 0)
    let lam = lambda_omega(omega);
    let w = matvec4(&lam, &q4); // (ω ∧ π(u), 0)
    let at = transpose4(&a);
    let two = T::from_f64(2.0);
    let mut b = matvec4(&at, &w);
    for bi in &mut b {
        *bi *= two;
    }
    b
}

/// Directional derivative of the vector potential: `∂b_ω/∂u · v`.
///
/// `b_ω` is a cubic polynomial, trilinear as `Aᵀ(·) Λ_ω A(·) (·)`, so the
/// derivative is the sum of the three single-slot substitutions of `v`.
#[inline]
pub fn vector_potential_dir<T: Scalar>(omega: &[T; 3], u: &[T; 4], v: &[T; 4]) -> [T; 4] {
    let a_u = ks_matrix(u);
    let a_v = ks_matrix(v);
    let lam = lambda_omega(omega);
    let two = T::from_f64(2.0);

    // Slot 1: Aᵀ(v) Λ A(u) u.
    let t1 = matvec4(&transpose4(&a_v), &matvec4(&lam, &matvec4(&a_u, u)));
    // Slot 2: Aᵀ(u) Λ A(v) u.
    let t2 = matvec4(&transpose4(&a_u), &matvec4(&lam, &matvec4(&a_v, u)));
    // Slot 3: Aᵀ(u) Λ A(u) v.
    let t3 = matvec4(&transpose4(&a_u), &matvec4(&lam, &matvec4(&a_u, v)));

    let mut out = [T::zero(); 4];
    for i in 0..4 {
        out[i] = two * (t1[i] + t2[i] + t3[i]);
    }
    out
}
