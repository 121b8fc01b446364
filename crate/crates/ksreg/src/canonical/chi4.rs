//! The canonical transformation and its Newton inverse.
//!
//! # Forward direction
//!
//! With the complete integral `W(u; ν)` as a generating function of the
//! second kind (old coordinates `u`, new momenta `ν`), the transformation
//!
//! ```text
//!   U = ∂W/∂u(u; ν),        n = ∂W/∂ν(u; ν)
//! ```
//!
//! maps `(u, U) ↦ (n, ν)` symplectically wherever the mixed Hessian
//! `∂²W/∂u∂ν` is invertible. The new Hamiltonian depends on the momenta
//! alone, `K̂(n, ν) = μ(‖ν‖² − 1)`, so the transformed flow is trivial:
//!
//! ```text
//!   ν(s) = ν(0),        n(s) = n(0) + 2μ ν(0) s.
//! ```
//!
//! Computing the forward map at a state costs one nonlinear solve for `ν`
//! ([`crate::canonical::nu_hat`]) plus one jet evaluation for `n`.
//!
//! # Inverse direction
//!
//! Recovering the state at regularized time `s` inverts the *coordinate*
//! half with the *parameter fixed*: solve `n(u) = n_target` for `u` by a
//! damped 4 × 4 Newton iteration (Jacobian `∂n/∂u` = mixed Hessian, exactly
//! `√(8μ)·I` at the collision, hence condition number 1 where it matters),
//! then read the momentum off `U = ∂W/∂u`. All per-iteration quantities are
//! polynomial evaluations on a fixed [`EncounterFrame`].

use nalgebra::{Matrix4, Vector4};

use crate::canonical::frame::EncounterFrame;
use crate::canonical::nu::{nu_hat, NuSolve};
use crate::error::{Error, Result};
use crate::hjsolver::HjSolver;
use crate::kscore::types::KsState;
use crate::tol;

/// The transformed variables of the canonical map: conjugate coordinate
/// 4-vector `n` and asymptote parameter `ν`. For physical motions the
/// bilinear invariant carries over: `ℓ(n, ν) = 0` exactly when
/// `ℓ(u, U) = 0`, and `‖ν‖ = 1` on the zero level of the regularized
/// Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionAngleState {
    /// Conjugate coordinates `n = ∂W/∂ν`, drifting linearly in `s`.
    pub n: [f64; 4],
    /// Asymptote parameter (new momenta), constant along the flow.
    pub nu: [f64; 4],
}

/// Outcome of the Newton inversion [`chi4_inverse`].
#[derive(Clone, Copy, Debug)]
pub struct Chi4Inverse {
    /// The recovered KS state `(u, ∂W/∂u(u; ν))`.
    pub state: KsState,
    /// Newton iterations spent.
    pub iters: usize,
    /// Final residual `‖n(u) − n_target‖∞`.
    pub residual: f64,
    /// Spectral condition number of the final Jacobian `∂n/∂u`.
    pub condition: f64,
    /// Warning flag: condition number above
    /// [`tol::ILL_CONDITION_LIMIT`] (result still returned).
    pub ill_conditioned: bool,
}

/// The conjugate-coordinate map `n̂(u; ν) = ∂W/∂ν(u; ν)` on a fixed frame.
///
/// # Errors
/// Propagates evaluation failures (dimension mismatch).
pub fn n_hat(frame: &EncounterFrame, u: &[f64; 4]) -> Result<[f64; 4]> {
    frame.n_of_u(u)
}

/// Forward canonical map at a concrete state: solves for `ν̂(u, U)`, builds
/// the evaluation frame of that family member, and reads off `n̂`. Returns
/// the frame for reuse (propagation, inversion, diagnostics) together with
/// the `ν`-solve telemetry.
///
/// # Errors
/// As [`nu_hat`] plus frame-construction failures.
pub fn chi4(solver: &HjSolver, state: &KsState) -> Result<(ActionAngleState, EncounterFrame, NuSolve)> {
    let solve = nu_hat(solver, state)?;
    let sol = solver.complete_integral(&solve.nu)?;
    let frame = EncounterFrame::from_solver(solver, &sol)?;
    let n = frame.n_of_u(&state.u)?;
    Ok((
        ActionAngleState { n, nu: solve.nu },
        frame,
        solve,
    ))
}

/// Inverts the coordinate half of the canonical map on a fixed frame:
/// finds `u` with `∂W/∂ν(u; ν) = n_target` (damped Newton, warm-startable),
/// then completes the state with `U = ∂W/∂u(u; ν)`.
///
/// # Errors
/// * [`Error::DomainExceeded`] when an iterate leaves the trusted ball —
///   the analytic continuation is not followed outside it;
/// * [`Error::NewtonDiverged`] on a singular Jacobian or exhausted budget.
pub fn chi4_inverse(
    frame: &EncounterFrame,
    n_target: &[f64; 4],
    guess: Option<[f64; 4]>,
) -> Result<Chi4Inverse> {
    let target = Vector4::from_iterator(*n_target);
    let scale = 1.0 + target.amax();
    let tol_abs = tol::NEWTON_TOL * scale;
    let mut u = Vector4::from_iterator(guess.unwrap_or([0.0; 4]));

    let eval = |u: &Vector4<f64>| -> Result<(Vector4<f64>, [f64; 4])> {
        let ua = [u[0], u[1], u[2], u[3]];
        let n = frame.n_of_u(&ua)?;
        Ok((Vector4::from_iterator(n) - target, ua))
    };
    let jac_at = |ua: &[f64; 4]| -> Result<Matrix4<f64>> {
        let m = frame.n_jacobian(ua)?;
        Ok(Matrix4::from_fn(|l, j| m[l][j]))
    };

    let (mut g, mut ua) = eval(&u)?;
    let mut iters = 0;
    while g.amax() > tol_abs {
        iters += 1;
        if iters > tol::NEWTON_MAX_ITERS {
            return Err(Error::NewtonDiverged {
                what: "coordinate recovery from conjugate variables",
                residual: g.amax(),
                iters: tol::NEWTON_MAX_ITERS,
            });
        }
        let jac = jac_at(&ua)?;
        let step = jac.lu().solve(&(-g)).ok_or(Error::NewtonDiverged {
            what: "coordinate recovery (singular mixed Hessian)",
            residual: g.amax(),
            iters,
        })?;
        // Damped update: halve while the residual refuses to decrease.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=6 {
            let trial = u + step * lambda;
            let radius = trial.norm();
            if radius > tol::TRUST_RADIUS {
                // Trying to continue past the trusted ball: shrink first;
                // report only if even tiny steps point outside.
                if lambda <= 1.0 / 64.0 {
                    return Err(Error::DomainExceeded {
                        radius,
                        limit: tol::TRUST_RADIUS,
                    });
                }
                lambda *= 0.5;
                continue;
            }
            let (gt, ta) = eval(&trial)?;
            if gt.norm() < g.norm() || gt.amax() <= tol_abs {
                accepted = Some((trial, gt, ta));
                break;
            }
            lambda *= 0.5;
        }
        let Some((trial, gt, ta)) = accepted else {
            return Err(Error::NewtonDiverged {
                what: "coordinate recovery from conjugate variables",
                residual: g.amax(),
                iters,
            });
        };
        u = trial;
        g = gt;
        ua = ta;
    }

    // Conditioning of the converged Jacobian (warning, not failure).
    let jac = jac_at(&ua)?;
    let svd = jac.svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let uu = frame.grad_u(&ua)?;
    Ok(Chi4Inverse {
        state: KsState { u: ua, p: uu },
        iters,
        residual: g.amax(),
        condition,
        ill_conditioned: condition > tol::ILL_CONDITION_LIMIT,
    })
}
