//! Frame matrices attached to the asymptote parameter `ν ∈ R⁴ ∖ {0}`.
//!
//! # Mathematical background
//!
//! Identifying `R⁴` with the quaternions via `(ν₁, ν₂, ν₃, ν₄) ↔ ν₁ + ν₂ i +
//! ν₃ j + ν₄ k`, left multiplication by `ν` is the linear map
//!
//! ```text
//!          ⎡ ν₁ −ν₂ −ν₃ −ν₄ ⎤
//!   S_ν =  ⎢ ν₂  ν₁ −ν₄  ν₃ ⎥ ,   S_ν e₁ = ν,   S_νᵀ S_ν = |ν|² I .
//!          ⎢ ν₃  ν₄  ν₁ −ν₂ ⎥
//!          ⎣ ν₄ −ν₃  ν₂  ν₁ ⎦
//! ⎦```
//!
//! `S_ν` is equivariant for the KS projection: there is a rotation
//! `Π(S_ν) ∈ SO(3)` with
//!
//! ```text
//!   π(S_ν u) = |ν|² · Π(S_ν) · π(u)      for all u ∈ R⁴,
//! ```
//!
//! and `|ν|² Π(S_ν)` is the quadratic-in-`ν` matrix [`rnu_tilde`] below
//! (an Euler–Rodrigues-type parameterization; its columns are obtained by
//! polarizing `π`). The frame vectors that enter the scaled-and-rotated
//! regularized Hamiltonian are the pullbacks of the rotation axis and of the
//! direction to the distant body:
//!
//! ```text
//!   ω(ν) = Π(S_ν)ᵀ (0, 0, 1),     e(ν) = Π(S_ν)ᵀ (1, 0, 0).
//! ```
//!
//! Everything is generic over [`Scalar`] so that jet instantiations give
//! exact ∂/∂ν of any downstream quantity.

use crate::linalg::transpose3;
use crate::scalar::Scalar;

/// Left quaternion multiplication matrix `S_ν` (row-major).
#[inline]
pub fn snu_matrix<T: Scalar>(nu: &[T; 4]) -> [[T; 4]; 4] {
    let [n1, n2, n3, n4] = *nu;
    [
        [n1, -n2, -n3, -n4],
        [n2, n1, -n4, n3],
        [n3, n4, n1, -n2],
        [n4, -n3, n2, n1],
    ]
}

/// The scaled rotation `R̃_ν = |ν|² Π(S_ν)` (row-major, 3 × 3), quadratic in
/// `ν`, defined by `π(S_ν u) = R̃_ν π(u)`.
#[inline]
pub fn rnu_tilde<T: Scalar>(nu: &[T; 4]) -> [[T; 3]; 3] {
    let [n1, n2, n3, n4] = *nu;
    let two = T::from_f64(2.0);
    let s11 = n1 * n1;
    let s22 = n2 * n2;
    let s33 = n3 * n3;
    let s44 = n4 * n4;
    [
        [
            s11 - s22 - s33 + s44,
            -two * (n1 * n2 + n3 * n4),
            -two * (n1 * n3 - n2 * n4),
        ],
        [
            two * (n1 * n2 - n3 * n4),
            s11 - s22 + s33 - s44,
            -two * (n1 * n4 + n2 * n3),
        ],
        [
            two * (n1 * n3 + n2 * n4),
            two * (n1 * n4 - n2 * n3),
            s11 + s22 - s33 - s44,
        ],
    ]
}

/// The rotation `Π(S_ν) = R̃_ν / |ν|²`.
#[inline]
pub fn pi_snu<T: Scalar>(nu: &[T; 4]) -> [[T; 3]; 3] {
    let n2 = crate::linalg::norm2_4(nu);
    let inv = n2.recip();
    let mut r = rnu_tilde(nu);
    for row in &mut r {
        for x in row {
            *x *= inv;
        }
    }
    r
}

/// The rotated frame vectors `(ω, e) = (Π(S_ν)ᵀ e₃, Π(S_ν)ᵀ e₁)`: rows 3 and
/// 1 of `Π(S_ν)`.
#[inline]
pub fn frame_vectors<T: Scalar>(nu: &[T; 4]) -> ([T; 3], [T; 3]) {
    let r = pi_snu(nu);
    let rt = transpose3(&r);
    // Πᵀ e₃ is the third column of Πᵀ, i.e. the third row of Π; same for e₁.
    let omega = [rt[0][2], rt[1][2], rt[2][2]];
    let e = [rt[0][0], rt[1][0], rt[2][0]];
    (omega, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kscore::maps::ks_project;
    use crate::linalg::{dot3, matvec3, matvec4, norm2_4};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand4(rng: &mut StdRng) -> [f64; 4] {
        std::array::from_fn(|_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn snu_is_a_scaled_orthogonal_map_with_first_column_nu() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..50 {
            let nu = rand4(&mut rng);
            let s = snu_matrix(&nu);
            let n2 = norm2_4(&nu);
            // S_ν e₁ = ν.
            let e1 = [1.0, 0.0, 0.0, 0.0];
            let se1 = matvec4(&s, &e1);
            for i in 0..4 {
                assert!((se1[i] - nu[i]).abs() < 1e-15);
            }
            // Columns are orthogonal with common norm |ν|.
            for a in 0..4 {
                for b in 0..4 {
                    let dot: f64 = (0..4).map(|i| s[i][a] * s[i][b]).sum();
                    let expect = if a == b { n2 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn projection_equivariance_defines_the_rotation() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let nu = rand4(&mut rng);
            if norm2_4(&nu) < 0.1 {
                continue;
            }
            let u = rand4(&mut rng);
            let s = snu_matrix(&nu);
            let su = matvec4(&s, &u);
            // π(S_ν u) = R̃_ν π(u).
            let lhs = ks_project(&su);
            let rhs = matvec3(&rnu_tilde(&nu), &ks_project(&u));
            for k in 0..3 {
                assert!(
                    (lhs[k] - rhs[k]).abs() < 1e-12,
                    "equivariance failed: {lhs:?} vs {rhs:?}"
                );
            }
        }
    }

    #[test]
    fn pi_snu_is_a_proper_rotation() {
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..50 {
            let nu = rand4(&mut rng);
            if norm2_4(&nu) < 0.1 {
                continue;
            }
            let r = pi_snu(&nu);
            // Rows orthonormal.
            for a in 0..3 {
                for b in 0..3 {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((dot3(&r[a], &r[b]) - expect).abs() < 1e-12);
                }
            }
            // det = +1.
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert!((det - 1.0).abs() < 1e-12);
            // Frame vectors are unit and correctly placed.
            let (omega, e) = frame_vectors(&nu);
            let re = matvec3(&r, &e);
            let rw = matvec3(&r, &omega);
            assert!((re[0] - 1.0).abs() < 1e-12 && re[1].abs() < 1e-12 && re[2].abs() < 1e-12);
            assert!((rw[2] - 1.0).abs() < 1e-12 && rw[0].abs() < 1e-12 && rw[1].abs() < 1e-12);
        }
    }

    #[test]
    fn identity_nu_gives_identity_frames() {
        let nu = [1.0, 0.0, 0.0, 0.0];
        let r = pi_snu(&nu);
        for i in 0..3 {
            for j in 0..3 {
                let expect: f64 = if i == j { 1.0 } else { 0.0 };
                assert!((r[i][j] - expect).abs() < 1e-15);
            }
        }
        let (omega, e) = frame_vectors(&nu);
        assert_eq!(omega, [0.0, 0.0, 1.0]);
        assert_eq!(e, [1.0, 0.0, 0.0]);
    }
}
