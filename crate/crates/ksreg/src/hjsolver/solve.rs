//! The characteristic solve: fixed-point construction of the normal-frame
//! generating series.
//!
//! # The equation
//!
//! The generating series `W̃(ũ; κ, ν)` is determined by the first-order PDE
//! obtained from the scaled-frame Hamiltonian on the level `κ/λ`
//! (`λ = |ν|²`, `ω = Π(S_ν)ᵀe₃`, `e = Π(S_ν)ᵀe₁`):
//!
//! ```text
//!   ∂W̃/∂ũ₁ = λ² b_{ω,1}(ũ)
//!           + √8 √λ · [ (μ+κ) + (λ³/2)|ũ|² |ω ∧ π(ũ)|² + λ E_μ |ũ|²
//!                        + (1−μ) λ |ũ|² G(ũ)
//!                        − (1/(8λ)) Σ_{j=2..4} (∂W̃/∂ũ_j − λ² b_{ω,j}(ũ))² ]^{1/2}
//! ```
//!
//! with `G(ũ) = 1/|λπ(ũ) + e| − 1 + λ π(ũ)·e` and the boundary data
//! `W̃|_{ũ₁=0} = 0`. The square root has the strictly positive constant term
//! `μ + κ`, so the right side is an analytic series and truncated arithmetic
//! applies directly.
//!
//! # Why simple iteration terminates
//!
//! Write `W̃ = Σ_k W̃_k` by homogeneous degree. The degree-`k` part of the
//! right side only involves `∂W̃/∂ũ_j` through degree `k−1`, i.e. `W̃`
//! through degree `k`; integrating in `ũ₁` then determines `W̃_{k+1}`. The
//! iteration `W̃ ← ∫₀^{ũ₁} F(ũ, ∂W̃) dũ₁` is therefore strictly triangular
//! across degrees: pass `k` freezes degree `k+1`, and after at most `N`
//! passes the truncated series is *bitwise* stationary (every coefficient is
//! computed by the same floating-point expression from inputs that no longer
//! change). The loop runs to the first bitwise fixed point and fails loudly
//! if `N + 2` passes do not reach one.
//!
//! # Degree-wise guarantee
//!
//! At the fixed point the PDE holds exactly in order-`N` arithmetic through
//! degree `N − 1`; equivalently, the Hamiltonian residual
//! `K(ũ, ∇W̃) − κ/λ` has vanishing coefficients (to roundoff) for all
//! degrees `≤ N − 1`. Degree-`N` coefficients of the residual are truncation
//! junk and are never tested against tolerances.

use crate::algebra::MultiSeries;
use crate::error::{Error, Result};
use crate::hjsolver::tables::KsSeriesTables;
use crate::scalar::Scalar;

/// Frame data derived from `ν`: `λ = |ν|²` and the pulled-back frame vectors
/// `ω = Π(S_ν)ᵀ e₃`, `e = Π(S_ν)ᵀ e₁`. Generic so that jets flow through.
pub(crate) fn frame_data<T: Scalar>(nu: &[T; 4]) -> (T, [T; 3], [T; 3]) {
    let (n1, n2, n3, n4) = (nu[0], nu[1], nu[2], nu[3]);
    let lambda = n1 * n1 + n2 * n2 + n3 * n3 + n4 * n4;
    let inv = lambda.recip();
    let two = T::from_f64(2.0);
    // Rows 1 and 3 of |ν|² Π(S_ν) (quadratic in ν).
    let r1 = [
        n1 * n1 - n2 * n2 - n3 * n3 + n4 * n4,
        -((n1 * n2 + n3 * n4) * two),
        -((n1 * n3 - n2 * n4) * two),
    ];
    let r3 = [
        (n1 * n3 + n2 * n4) * two,
        (n1 * n4 - n2 * n3) * two,
        n1 * n1 + n2 * n2 - n3 * n3 - n4 * n4,
    ];
    let e = [r1[0] * inv, r1[1] * inv, r1[2] * inv];
    let omega = [r3[0] * inv, r3[1] * inv, r3[2] * inv];
    (lambda, omega, e)
}

/// The parameter-dependent, pass-independent pieces of the right-hand side.
struct RhsParts<T: Scalar> {
    /// Everything under the square root that does not involve `∂W̃`:
    /// `(μ+κ) + (λ³/2)|ũ|²|ω∧π(ũ)|² + λE_μ|ũ|² + (1−μ)λ|ũ|²G(ũ)`.
    static_inner: MultiSeries<T>,
    /// `c_j = λ² b_{ω,j}(ũ)`, the gauge shift of each momentum.
    c: [MultiSeries<T>; 4],
    /// `√8 √λ`.
    sqrt8_lambda: T,
    /// `1/(8λ)`.
    inv_8lambda: T,
}

fn build_rhs_parts<T: Scalar>(
    tables: &KsSeriesTables,
    mu: f64,
    energy: f64,
    kappa: T,
    nu: &[T; 4],
) -> Result<RhsParts<T>> {
    let bs = tables.basis;
    let (lambda, omega, e) = frame_data(nu);
    let c1m = 1.0 - mu;
    let e_mu = T::from_f64(energy + c1m + 0.5 * c1m * c1m);

    // Bridge the structural f64 series into T-arithmetic.
    let lift = |src: &MultiSeries<f64>| MultiSeries::<T>::from_f64_series(src);
    let n2 = lift(&tables.n2);
    let n4 = lift(&tables.n4);

    // ω·π(ũ) and e·π(ũ) as linear combinations of the projection quadratics.
    let mut wq = MultiSeries::<T>::zeros(bs);
    let mut eq = MultiSeries::<T>::zeros(bs);
    for k in 0..3 {
        wq.add_scaled_f64(&tables.q[k], omega[k])?;
        eq.add_scaled_f64(&tables.q[k], e[k])?;
    }

    // |ω ∧ π(ũ)|² = |π(ũ)|² − (ω·π(ũ))² for the unit vector ω, and
    // |π(ũ)|² = |ũ|⁴.
    let wedge = n4.sub(&wq.mul(&wq)?)?;

    // G(ũ) = (1 + 2λ e·π + λ²|ũ|⁴)^(−1/2) − 1 + λ e·π.
    let one = T::one();
    let mut rho2 = MultiSeries::<T>::constant(bs, one);
    rho2 = rho2.add(&eq.scale(T::from_f64(2.0) * lambda))?;
    rho2 = rho2.add(&n4.scale(lambda * lambda))?;
    let g = rho2
        .pow_real(-0.5)?
        .sub(&MultiSeries::<T>::constant(bs, one))?
        .add(&eq.scale(lambda))?;

    // Static part under the square root.
    let half_l3 = T::from_f64(0.5) * lambda * lambda * lambda;
    let mut static_inner = MultiSeries::<T>::constant(bs, T::from_f64(mu) + kappa);
    static_inner = static_inner.add(&n2.mul(&wedge)?.scale(half_l3))?;
    static_inner = static_inner.add(&n2.scale(lambda * e_mu))?;
    static_inner = static_inner.add(&n2.mul(&g)?.scale(T::from_f64(c1m) * lambda))?;

    // Gauge shifts c_j = λ² Σ_k ω_k b_{e_k, j}.
    let l2 = lambda * lambda;
    let c = std::array::from_fn(|j| {
        let mut cj = MultiSeries::<T>::zeros(bs);
        for k in 0..3 {
            cj.add_scaled_f64(&tables.b[k][j], l2 * omega[k]).unwrap();
        }
        cj
    });

    Ok(RhsParts {
        static_inner,
        c,
        sqrt8_lambda: T::from_f64(8.0f64.sqrt()) * lambda.sqrt(),
        inv_8lambda: (T::from_f64(8.0) * lambda).recip(),
    })
}

/// Solves the characteristic equation for the normal-frame generating
/// series `W̃(ũ; κ, ν)` at the order fixed by `tables`.
///
/// Generic over the scalar so the same code path produces plain series and
/// jet-valued series (parameter derivatives).
///
/// # Errors
/// [`Error::NonPositiveBase`] when `μ + κ ≤ 0` (square root undefined);
/// [`Error::PicardStalled`] if the iteration fails to reach a bitwise fixed
/// point (which the triangular structure rules out short of NaN pollution).
pub fn solve_normal_frame<T: Scalar>(
    tables: &KsSeriesTables,
    mu: f64,
    energy: f64,
    kappa: T,
    nu: &[T; 4],
) -> Result<MultiSeries<T>> {
    let parts = build_rhs_parts(tables, mu, energy, kappa, nu)?;
    let order = tables.basis.order();
    let mut w = MultiSeries::<T>::zeros(tables.basis);
    for _pass in 0..order + 2 {
        // Step 1: momentum series P_j = ∂W̃/∂ũ_j minus the gauge shift.
        let mut inner = parts.static_inner.clone();
        for j in 1..4 {
            let d = w.partial(j)?.sub(&parts.c[j])?;
            inner = inner.sub(&d.mul(&d)?.scale(parts.inv_8lambda))?;
        }
        // Step 2: the transported momentum ∂W̃/∂ũ₁ from the solved branch.
        let f = parts
            .c[0]
            .add(&inner.pow_real(0.5)?.scale(parts.sqrt8_lambda))?;
        // Step 3: integrate from the data surface ũ₁ = 0.
        let next = f.antiderivative(0)?;
        // Step 4: accept on bitwise stationarity.
        if next == w {
            return Ok(w);
        }
        w = next;
    }
    Err(Error::PicardStalled {
        passes: order + 2,
        order,
    })
}

/// Assembles the complete integral `W(u; ν) = W̃(S_νᵀ u / |ν|²; κ_ν, ν)`
/// from the normal-frame series by linear composition.
pub fn assemble_complete<T: Scalar>(
    wtilde: &MultiSeries<T>,
    nu: &[T; 4],
) -> Result<MultiSeries<T>> {
    let (n1, n2, n3, n4) = (nu[0], nu[1], nu[2], nu[3]);
    let lambda = n1 * n1 + n2 * n2 + n3 * n3 + n4 * n4;
    let inv = lambda.recip();
    // S_ν columns are the rows of S_νᵀ; S_ν has rows
    //   (ν₁,−ν₂,−ν₃,−ν₄), (ν₂,ν₁,−ν₄,ν₃), (ν₃,ν₄,ν₁,−ν₂), (ν₄,−ν₃,ν₂,ν₁).
    let s = [
        [n1, -n2, -n3, -n4],
        [n2, n1, -n4, n3],
        [n3, n4, n1, -n2],
        [n4, -n3, n2, n1],
    ];
    let mut m = [T::zero(); 16];
    for i in 0..4 {
        for j in 0..4 {
            m[i * 4 + j] = s[j][i] * inv; // (S_νᵀ)_{ij} / λ
        }
    }
    wtilde.compose_linear(&m, T::one())
}

/// Evaluates the identity-frame Hamiltonian on a gradient series:
/// `K_I(u, ∇W(u))` as a series in `u`. Used for residual checks of the
/// complete integral, whose defining equation is `K_I(u, ∇W) = κ_ν`.
pub fn identity_hamiltonian_on_gradient(
    tables: &KsSeriesTables,
    w: &MultiSeries<f64>,
    mu: f64,
    energy: f64,
) -> Result<MultiSeries<f64>> {
    let bs = tables.basis;
    let c1m = 1.0 - mu;
    let e_mu = energy + c1m + 0.5 * c1m * c1m;

    // Kinetic part (1/8) Σ_j (∂W/∂u_j − b_{e₃,j})².
    let mut k = MultiSeries::<f64>::constant(bs, -mu);
    for j in 0..4 {
        let d = w.partial(j)?.sub(&tables.b[2][j])?;
        k = k.add(&d.mul(&d)?.scale(0.125))?;
    }
    // Centrifugal part −(1/2)|u|² |e₃ ∧ π(u)|², with
    // |e₃ ∧ π(u)|² = |u|⁴ − π₃(u)².
    let wedge = tables.n4.sub(&tables.q[2].mul(&tables.q[2])?)?;
    k = k.sub(&tables.n2.mul(&wedge)?.scale(0.5))?;
    // Energy part −|u|² E_μ.
    k = k.sub(&tables.n2.scale(e_mu))?;
    // Distant-body part −(1−μ)|u|² (1/|π(u)+e₁| − 1 + π₁(u)).
    let one = MultiSeries::<f64>::constant(bs, 1.0);
    let rho2 = one
        .add(&tables.q[0].scale(2.0))?
        .add(&tables.n4)?;
    let g = rho2.pow_real(-0.5)?.sub(&one)?.add(&tables.q[0])?;
    k = k.sub(&tables.n2.mul(&g)?.scale(c1m))?;
    Ok(k)
}
