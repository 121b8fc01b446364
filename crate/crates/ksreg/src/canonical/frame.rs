//! Evaluation frame for one member of the complete-integral family.
//!
//! A single asymptote parameter `ν` pins down one generating function
//! `W(u; ν)`. Everything the canonical transformation does at that `ν` —
//! gradients `∂W/∂u`, conjugate coordinates `n = ∂W/∂ν`, the mixed Hessian
//! `∂²W/∂u∂ν` that drives the Newton inversion — reduces to *evaluating
//! fixed series*. [`EncounterFrame`] performs the solves once and caches:
//!
//! ```text
//!   w        W(u; ν)                      scalar series in u
//!   dw[j]    ∂W/∂uⱼ                       4 series        (momenta U)
//!   d2w      ∂²W/∂uᵢ∂uⱼ                   upper triangle  (Newton on U)
//!   w_jet    W with ∂/∂ν in jet slots     n(u) = ∂W/∂ν
//!   dw_jet   ∂(w_jet)/∂uⱼ                 ∂n/∂u = ∂²W/∂ν∂u
//! ```
//!
//! After construction, every operation is a polynomial evaluation — a few
//! microseconds — so marching an encounter through hundreds of regularized
//! time steps costs no further PDE solves.

use crate::algebra::MultiSeries;
use crate::error::{Error, Result};
use crate::hjsolver::{HjSolution, HjSolver};
use crate::kscore::types::Params;
use crate::scalar::Jet4;
use crate::Series;

/// Cached series data of the complete integral at one `ν`: the generating
/// function, its `u`-gradient and Hessian, and the `ν`-jet variants that
/// give the conjugate coordinates and the mixed Hessian.
pub struct EncounterFrame {
    params: Params,
    order: usize,
    /// `W(u; ν)`.
    w: Series,
    /// `∂W/∂uⱼ`.
    dw: [Series; 4],
    /// `∂²W/∂uᵢ∂uⱼ`, stored for `i ≤ j` at index `i·4 + j`.
    d2w: Vec<Series>,
    /// `W` with exact `∂/∂ν` carried in the jet slots.
    w_jet: MultiSeries<Jet4>,
    /// `∂(w_jet)/∂uⱼ`: value part `∂W/∂uⱼ`, jet part `∂²W/∂uⱼ∂ν`.
    dw_jet: [MultiSeries<Jet4>; 4],
}

impl EncounterFrame {
    /// Builds the frame for an existing complete-integral solution. Re-runs
    /// the series solve once in jet arithmetic (for the `ν`-derivatives) and
    /// differentiates; the solution's own `f64` series are reused as-is.
    ///
    /// # Errors
    /// Propagates solver failures from the jet re-solve; the parameters of
    /// `sol` were already validated when it was produced.
    pub fn new(sol: &HjSolution) -> Result<Self> {
        let solver = HjSolver::new(sol.params, sol.order)?;
        Self::from_solver(&solver, sol)
    }

    /// Like [`EncounterFrame::new`] but reuses an existing solver (and its
    /// structural tables) instead of rebuilding them.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] if the solver's order differs from the
    /// solution's; otherwise as [`EncounterFrame::new`].
    pub fn from_solver(solver: &HjSolver, sol: &HjSolution) -> Result<Self> {
        if solver.order() != sol.order {
            return Err(Error::InvalidParameter(format!(
                "frame solver order {} does not match solution order {}",
                solver.order(),
                sol.order
            )));
        }
        let dw = [
            sol.w.partial(0)?,
            sol.w.partial(1)?,
            sol.w.partial(2)?,
            sol.w.partial(3)?,
        ];
        // Upper-triangular Hessian block; the lookup symmetrizes.
        let mut d2w = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                if i <= j {
                    d2w.push(dw[i].partial(j)?);
                } else {
                    d2w.push(Series::zeros(sol.w.basis()));
                }
            }
        }
        let w_jet = solver.complete_integral_jet(&sol.params.nu)?;
        let dw_jet = [
            w_jet.partial(0)?,
            w_jet.partial(1)?,
            w_jet.partial(2)?,
            w_jet.partial(3)?,
        ];
        Ok(EncounterFrame {
            params: sol.params,
            order: sol.order,
            w: sol.w.clone(),
            dw,
            d2w,
            w_jet,
            dw_jet,
        })
    }

    /// The problem parameters of the underlying solution (with `κ`, `λ` and
    /// `ν` filled in).
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Truncation order of the cached series.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The asymptote parameter `ν` this frame was built at.
    pub fn nu(&self) -> [f64; 4] {
        self.params.nu
    }

    /// The energy level `κ_ν = μ(‖ν‖² − 1)` of this family member.
    pub fn level(&self) -> f64 {
        self.params.kappa
    }

    /// The generating function value `W(u; ν)`.
    ///
    /// # Errors
    /// Dimension mismatch of the evaluation point (propagated).
    pub fn w_value(&self, u: &[f64; 4]) -> Result<f64> {
        self.w.eval(u)
    }

    /// The momentum map `U = ∂W/∂u (u; ν)`.
    ///
    /// # Errors
    /// Dimension mismatch of the evaluation point (propagated).
    pub fn grad_u(&self, u: &[f64; 4]) -> Result<[f64; 4]> {
        Ok([
            self.dw[0].eval(u)?,
            self.dw[1].eval(u)?,
            self.dw[2].eval(u)?,
            self.dw[3].eval(u)?,
        ])
    }

    /// The Hessian `∂²W/∂u² (u; ν)` (symmetric 4 × 4).
    ///
    /// # Errors
    /// Dimension mismatch of the evaluation point (propagated).
    pub fn hessian_uu(&self, u: &[f64; 4]) -> Result<[[f64; 4]; 4]> {
        let mut h = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v = self.d2w[i * 4 + j].eval(u)?;
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        Ok(h)
    }

    /// The conjugate coordinate map `n(u) = ∂W/∂ν (u; ν)` — the value each
    /// series coefficient's jet gradient assembles at `u`.
    ///
    /// # Errors
    /// Dimension mismatch of the evaluation point (propagated).
    pub fn n_of_u(&self, u: &[f64; 4]) -> Result<[f64; 4]> {
        let uj: [Jet4; 4] = std::array::from_fn(|k| Jet4::constant(u[k]));
        Ok(self.w_jet.eval(&uj)?.grad())
    }

    /// The mixed Hessian `M[l][j] = ∂n_l/∂u_j = ∂²W/∂ν_l∂u_j (u; ν)` — the
    /// Jacobian of [`EncounterFrame::n_of_u`], nonsingular near `u = 0`
    /// (determinant `(8μ)² = 64μ²` at the collision for unit `ν`).
    ///
    /// # Errors
    /// Dimension mismatch of the evaluation point (propagated).
    pub fn n_jacobian(&self, u: &[f64; 4]) -> Result<[[f64; 4]; 4]> {
        let uj: [Jet4; 4] = std::array::from_fn(|k| Jet4::constant(u[k]));
        let mut m = [[0.0; 4]; 4];
        for (j, dwj) in self.dw_jet.iter().enumerate() {
            let col = dwj.eval(&uj)?.grad();
            for l in 0..4 {
                m[l][j] = col[l];
            }
        }
        Ok(m)
    }
}

/// Largest radius `r` (in `‖u‖`) at which the guaranteed-order residual
/// bound of the solution stays below `tol·√(8μ)`: the residual series of a
/// degree-`N` solve vanishes through degree `N − 1`, so its first junk block
/// (degree `N`) bounds the pointwise residual on a ball of radius `r` by
/// `Σ_{|α|=N} |c_α| · r^N`. Bisects `r` on that bound. This is the startup
/// validation behind the default trust radius
/// ([`crate::tol::TRUST_RADIUS`]).
///
/// # Errors
/// Propagates residual-assembly failures.
pub fn residual_radius_scan(solver: &HjSolver, sol: &HjSolution, tol: f64) -> Result<f64> {
    let residual = solver.residual(sol)?;
    let junk: f64 = {
        let bs = residual.basis();
        let block = bs.degree_block(sol.order);
        block.map(|r| residual.coeff_at(r).abs()).sum()
    };
    let scale = (8.0 * sol.params.mu).sqrt();
    if junk == 0.0 {
        return Ok(1.0);
    }
    // Monotone bound junk·r^N ≤ tol·scale  ⇔  r ≤ (tol·scale/junk)^(1/N).
    Ok((tol * scale / junk).powf(1.0 / sol.order as f64).min(1.0))
}
