//! Planar Levi-Civita instance of the Hamilton–Jacobi construction.
//!
//! The planar problem (`z = p_z = 0`) regularizes through the complex square
//! `(X, Y) = (u₁² − u₂², 2u₁u₂)`, and its regularized Hamiltonian `K₂` is
//! exactly the restriction of the spatial `K_I` to the invariant submanifold
//! `u₃ = u₄ = p₃ = p₄ = 0` (verified in [`crate::kscore::ham`]). The
//! complete-integral family correspondingly shrinks from `ν ∈ R⁴` to two
//! parameters: a level `κ` and a fiber angle `α`,
//!
//! ```text
//!   K₂(u, ∂W₂/∂u(u; κ, α)) = κ,        W₂(u; κ, α) = W̃₂(R_αᵀ u; κ, α),
//! ```
//!
//! where `R_α` is the LC fiber rotation and `W̃₂` solves the conjugated
//! equation `K₂(R_α ũ, R_α ∇W̃₂) = κ`. Conjugation only touches the
//! distant-body potential — complex squaring doubles angles, so the rotated
//! projection is `R_{2α} π₂(ũ)` and
//!
//! ```text
//!   g̃(ũ; α) = (1 + 2 cos2α·q̃₁ − 2 sin2α·q̃₂ + |ũ|⁴)^(−1/2) − 1
//!             + cos2α·q̃₁ − sin2α·q̃₂ ,      q̃ = π₂(ũ).
//! ```
//!
//! Everything else mirrors the spatial solver: the characteristic equation
//! solved for `∂W̃₂/∂ũ₁` with data `W̃₂|_{ũ₁=0} = 0`, a strictly triangular
//! fixed point, and jets for the parameter derivatives `(∂W₂/∂α, ∂W₂/∂κ)`
//! that drive the planar encounter march.
//!
//! # The planar–spatial correspondence
//!
//! For a planar asymptote `ν = ρ(cos α, sin α, 0, 0)` the spatial complete
//! integral restricted to the invariant plane coincides *exactly* with
//! `W₂(·; κ_ν, α)`: both solve the same planar PDE on the same level with
//! the same vanishing data on `{ν·u = 0}` and the same square-root branch.
//! This is the sharpest cross-check between the two pipelines and is tested
//! below coefficient-by-coefficient.

use crate::algebra::MultiSeries;
use crate::error::{Error, Result};
use crate::hjsolver::tables::LcSeriesTables;
use crate::scalar::{Jet2, Scalar};
use crate::Series;

/// Driver for the planar Hamilton–Jacobi construction at a fixed order.
pub struct LcSolver {
    mu: f64,
    energy: f64,
    order: usize,
    tables: LcSeriesTables,
}

impl LcSolver {
    /// Creates a planar solver.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] for `μ ∉ (0, ½]`, non-finite energy, or an
    /// order outside `2 ..= 16`.
    pub fn new(mu: f64, energy: f64, order: usize) -> Result<Self> {
        if !(mu > 0.0 && mu <= 0.5) || !energy.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu = {mu}, energy = {energy}; required mu in (0, 0.5] and finite energy"
            )));
        }
        if !(2..=crate::tol::MAX_ORDER).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "truncation order {order} outside 2..={}",
                crate::tol::MAX_ORDER
            )));
        }
        let tables = LcSeriesTables::new(order)?;
        Ok(LcSolver {
            mu,
            energy,
            order,
            tables,
        })
    }

    /// Mass ratio.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Energy level `E`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Truncation order.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The structural tables.
    pub fn tables(&self) -> &LcSeriesTables {
        &self.tables
    }

    /// Solves the conjugated normal-frame equation for `W̃₂(ũ; κ, α)`,
    /// generic over the scalar (jets supply `∂/∂(α, κ)`).
    ///
    /// # Errors
    /// [`Error::NonPositiveBase`] when `μ + κ ≤ 0`; [`Error::PicardStalled`]
    /// if the fixed point is not reached (NaN pollution).
    pub fn normal_frame_t<T: Scalar>(&self, kappa: T, alpha: T) -> Result<MultiSeries<T>> {
        let bs = self.tables.basis;
        let c1m = 1.0 - self.mu;
        let e_mu = T::from_f64(self.energy + c1m + 0.5 * c1m * c1m);
        let two_alpha = alpha * T::from_f64(2.0);
        let (c2, s2) = (two_alpha.cos(), two_alpha.sin());

        let lift = |src: &MultiSeries<f64>| MultiSeries::<T>::from_f64_series(src);
        let n2 = lift(&self.tables.n2);
        let n4 = lift(&self.tables.n4);
        let b = [lift(&self.tables.b[0]), lift(&self.tables.b[1])];

        // Rotated first projection component cos2α·q̃₁ − sin2α·q̃₂.
        let mut eq = MultiSeries::<T>::zeros(bs);
        eq.add_scaled_f64(&self.tables.q[0], c2)?;
        eq.add_scaled_f64(&self.tables.q[1], -s2)?;

        // g̃(ũ; α) = (1 + 2 eq + |ũ|⁴)^(−1/2) − 1 + eq.
        let one = MultiSeries::<T>::constant(bs, T::one());
        let rho2 = one.add(&eq.scale(T::from_f64(2.0)))?.add(&n4)?;
        let g = rho2.pow_real(-0.5)?.sub(&one)?.add(&eq)?;

        // Static part under the square root:
        // (μ+κ) + |ũ|⁶/2 + |ũ|² E_μ + (1−μ)|ũ|² g̃.
        let mut static_inner = MultiSeries::<T>::constant(bs, T::from_f64(self.mu) + kappa);
        static_inner = static_inner.add(&n2.mul(&n4)?.scale(T::from_f64(0.5)))?;
        static_inner = static_inner.add(&n2.scale(e_mu))?;
        static_inner = static_inner.add(&n2.mul(&g)?.scale(T::from_f64(c1m)))?;

        let sqrt8 = T::from_f64(8.0f64.sqrt());
        let eighth = T::from_f64(0.125);

        let mut w = MultiSeries::<T>::zeros(bs);
        for _pass in 0..self.order + 2 {
            let d = w.partial(1)?.sub(&b[1])?;
            let inner = static_inner.sub(&d.mul(&d)?.scale(eighth))?;
            let f = b[0].add(&inner.pow_real(0.5)?.scale(sqrt8))?;
            let next = f.antiderivative(0)?;
            if next == w {
                return Ok(w);
            }
            w = next;
        }
        Err(Error::PicardStalled {
            passes: self.order + 2,
            order: self.order,
        })
    }

    /// The planar complete integral `W₂(u; κ, α) = W̃₂(R_αᵀu; κ, α)`.
    ///
    /// # Errors
    /// Same failure modes as [`LcSolver::normal_frame_t`].
    pub fn complete_integral(&self, kappa: f64, alpha: f64) -> Result<Series> {
        let wt = self.normal_frame_t::<f64>(kappa, alpha)?;
        let (c, s) = (alpha.cos(), alpha.sin());
        // R_αᵀ row-major.
        wt.compose_linear(&[c, s, -s, c], 1.0)
    }

    /// Planar complete integral in jet arithmetic: jet slot 0 carries
    /// `∂/∂α`, slot 1 carries `∂/∂κ`.
    ///
    /// # Errors
    /// Same failure modes as [`LcSolver::normal_frame_t`].
    pub fn complete_integral_jet(&self, kappa: f64, alpha: f64) -> Result<MultiSeries<Jet2>> {
        let alpha_j = Jet2::variable(alpha, 0);
        let kappa_j = Jet2::variable(kappa, 1);
        let wt = self.normal_frame_t::<Jet2>(kappa_j, alpha_j)?;
        let (c, s) = (alpha_j.cos(), alpha_j.sin());
        wt.compose_linear(&[c, s, -s, c], Jet2::constant(1.0))
    }

    /// The planar Hamiltonian residual series `K₂(u, ∇W₂) − κ`. Coefficients
    /// through degree `N − 1` vanish to roundoff.
    ///
    /// # Errors
    /// Propagates series arithmetic failures (mismatched bases).
    pub fn residual(&self, w2: &Series, kappa: f64) -> Result<Series> {
        let bs = self.tables.basis;
        let c1m = 1.0 - self.mu;
        let e_mu = self.energy + c1m + 0.5 * c1m * c1m;
        let mut k = MultiSeries::<f64>::constant(bs, -self.mu - kappa);
        for j in 0..2 {
            let d = w2.partial(j)?.sub(&self.tables.b[j])?;
            k = k.add(&d.mul(&d)?.scale(0.125))?;
        }
        k = k.sub(&self.tables.n2.mul(&self.tables.n4)?.scale(0.5))?;
        k = k.sub(&self.tables.n2.scale(e_mu))?;
        let one = MultiSeries::<f64>::constant(bs, 1.0);
        let rho2 = one.add(&self.tables.q[0].scale(2.0))?.add(&self.tables.n4)?;
        let g = rho2.pow_real(-0.5)?.sub(&one)?.add(&self.tables.q[0])?;
        k = k.sub(&self.tables.n2.mul(&g)?.scale(c1m))?;
        Ok(k)
    }

    /// Largest residual coefficient over the guaranteed degrees `≤ N − 1`.
    ///
    /// # Errors
    /// Propagates series arithmetic failures (mismatched bases).
    pub fn residual_max(&self, w2: &Series, kappa: f64) -> Result<f64> {
        Ok(self.residual(w2, kappa)?.max_abs_through(self.order - 1))
    }
}
