//! Inversion of the momentum relation: recovering the asymptote parameter.
//!
//! # The problem
//!
//! The complete integral generates the canonical change of variables through
//!
//! ```text
//!   Uⱼ = ∂W/∂uⱼ(u; ν)            (j = 1..4, unknown ν ∈ R⁴∖{0}),
//! ```
//!
//! so propagating a concrete state `(u, U)` first requires solving this
//! 4 × 4 nonlinear system for `ν` — the regularized analogue of reading the
//! osculating asymptote off a hyperbolic flyby. Near the collision the
//! system is a small perturbation of a linear one:
//!
//! ```text
//!   ∂W/∂u(u; ν) = √(8μ) ν + O(‖u‖),
//! ```
//!
//! because the linear-in-`u` part of `W` is exactly `√(8μ)(ν·u)`. Hence
//!
//! * at `u = 0` the inversion is *exact*: `ν = U/√(8μ)`, no iteration;
//! * for `‖u‖ > 0` the Jacobian `∂U/∂ν` stays within `O(‖u‖)` of
//!   `√(8μ)·I`, and a quasi-Newton iteration started from `U/√(8μ)`
//!   converges in a handful of steps anywhere in the trusted ball.
//!
//! # The iteration
//!
//! Evaluating the residual at a candidate `ν` requires a fresh series solve
//! (the family member `W(·; ν)` changes with `ν`), which dominates the cost.
//! The solver therefore runs Broyden's good update seeded with the exact
//! collision Jacobian `√(8μ)·I`, spending one series solve per iteration,
//! and falls back to the *exact* Jacobian — the mixed Hessian `∂²W/∂u∂ν`
//! from a jet-arithmetic solve — only when damping stalls. Steps are damped
//! by halving while they increase the residual.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::hjsolver::HjSolver;
use crate::kscore::types::KsState;
use crate::scalar::Jet4;
use crate::tol;

/// Result of an asymptote-parameter solve.
#[derive(Clone, Copy, Debug)]
pub struct NuSolve {
    /// The recovered parameter `ν̂(u, U)`.
    pub nu: [f64; 4],
    /// Newton/Broyden iterations spent (0 when `u = 0`).
    pub iters: usize,
    /// Final residual `‖∂W/∂u(u; ν̂) − U‖∞`.
    pub residual: f64,
}

/// Maximum step halvings before a damped iteration gives up on descent.
const MAX_HALVINGS: usize = 6;

/// Iteration index at which the quasi-Newton Jacobian is refreshed with the
/// exact mixed Hessian even without a stall (insurance against a slowly
/// drifting Broyden approximation).
const REFRESH_AT: usize = 12;

/// Fixed-size array view of an nalgebra 4-vector.
#[inline]
fn arr(v: &Vector4<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

/// Evaluates the residual `G(ν) = ∂W/∂u(u; ν) − U` at one candidate `ν`
/// (one full series solve).
fn residual_at(solver: &HjSolver, u: &[f64; 4], uu: &[f64; 4], nu: &[f64; 4]) -> Result<Vector4<f64>> {
    let sol = solver.complete_integral(nu)?;
    let mut g = Vector4::zeros();
    for j in 0..4 {
        g[j] = sol.w.partial(j)?.eval(u)? - uu[j];
    }
    Ok(g)
}

/// Exact Jacobian `∂G/∂ν = ∂²W/∂u∂ν (u; ν)` from a jet-arithmetic solve.
fn exact_jacobian(solver: &HjSolver, u: &[f64; 4], nu: &[f64; 4]) -> Result<Matrix4<f64>> {
    let w_jet = solver.complete_integral_jet(nu)?;
    let uj: [Jet4; 4] = std::array::from_fn(|k| Jet4::constant(u[k]));
    let mut jac = Matrix4::zeros();
    for j in 0..4 {
        let row = w_jet.partial(j)?.eval(&uj)?.grad();
        for l in 0..4 {
            jac[(j, l)] = row[l];
        }
    }
    Ok(jac)
}

/// Recovers `ν̂(u, U)`: the unique family parameter whose generating
/// function reproduces the momentum, `∂W/∂u(u; ν̂) = U`. Iterates from the
/// collision-exact guess `U/√(8μ)`.
///
/// # Errors
/// * [`Error::DomainExceeded`] when `‖u‖` exceeds the trusted radius;
/// * [`Error::NewtonDiverged`] when the damped iteration exhausts its
///   budget ([`tol::NEWTON_MAX_ITERS`]).
pub fn nu_hat(solver: &HjSolver, state: &KsState) -> Result<NuSolve> {
    nu_hat_guided(solver, state, None)
}

/// [`nu_hat`] followed by one full-Jacobian Newton step, pushing the
/// residual from the standard stopping tolerance to the rounding floor.
///
/// Numeric differentiation of quantities built on `ν̂` (Poisson brackets,
/// symplectic-defect checks) divides the solver's stopping noise by the
/// finite-difference step; the polish buys those paths three to four extra
/// digits for the price of one jet solve.
///
/// # Errors
/// As [`nu_hat`].
pub fn nu_hat_polished(
    solver: &HjSolver,
    state: &KsState,
    guess: Option<[f64; 4]>,
) -> Result<NuSolve> {
    let coarse = nu_hat_guided(solver, state, guess)?;
    if state.radius() == 0.0 {
        return Ok(coarse);
    }
    let jac = exact_jacobian(solver, &state.u, &coarse.nu)?;
    let g = residual_at(solver, &state.u, &state.p, &coarse.nu)?;
    let step = match jac.lu().solve(&(-g)) {
        Some(s) => s,
        None => return Ok(coarse),
    };
    let nu = Vector4::from_iterator(coarse.nu) + step;
    let g_new = residual_at(solver, &state.u, &state.p, &arr(&nu))?;
    if g_new.amax() <= g.amax() {
        Ok(NuSolve {
            nu: arr(&nu),
            iters: coarse.iters + 1,
            residual: g_new.amax(),
        })
    } else {
        Ok(coarse)
    }
}

/// [`nu_hat`] with an explicit initial guess — the warm-start used when
/// tracking `ν̂` along an arc, where the previous sample is already within
/// the Newton basin.
///
/// # Errors
/// As [`nu_hat`].
pub fn nu_hat_guided(
    solver: &HjSolver,
    state: &KsState,
    guess: Option<[f64; 4]>,
) -> Result<NuSolve> {
    let u = state.u;
    let uu = state.p;
    let radius = state.radius();
    if radius > tol::TRUST_RADIUS {
        return Err(Error::DomainExceeded {
            radius,
            limit: tol::TRUST_RADIUS,
        });
    }
    let s8 = (8.0 * solver.params().mu).sqrt();
    let scale = 1.0 + uu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol_abs = tol::NEWTON_TOL * scale;

    // Collision point: the linear structure makes the inversion closed-form.
    if radius == 0.0 {
        return Ok(NuSolve {
            nu: std::array::from_fn(|j| uu[j] / s8),
            iters: 0,
            residual: 0.0,
        });
    }

    let start = guess.unwrap_or(std::array::from_fn(|j| uu[j] / s8));
    let mut nu = Vector4::from_iterator(start);
    let mut g = residual_at(solver, &u, &uu, &arr(&nu))?;
    let mut jac = Matrix4::identity() * s8;
    let mut used_exact = false;

    for iter in 1..=tol::NEWTON_MAX_ITERS {
        if g.amax() <= tol_abs {
            return Ok(NuSolve {
                nu: arr(&nu),
                iters: iter - 1,
                residual: g.amax(),
            });
        }
        // Scheduled refresh: swap in the exact mixed Hessian once.
        if iter == REFRESH_AT && !used_exact {
            jac = exact_jacobian(solver, &u, &arr(&nu))?;
            used_exact = true;
        }
        let step = jac.lu().solve(&(-g)).ok_or(Error::NewtonDiverged {
            what: "asymptote parameter (singular Jacobian)",
            residual: g.amax(),
            iters: iter,
        })?;

        // Damped line search: halve until the residual decreases.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = nu + step * lambda;
            let gt = residual_at(solver, &u, &uu, &arr(&trial))?;
            if gt.norm() < g.norm() || gt.amax() <= tol_abs {
                accepted = Some((trial, gt, lambda));
                break;
            }
            lambda *= 0.5;
        }
        let (trial, gt, lambda) = match accepted {
            Some(t) => t,
            None if !used_exact => {
                // Broyden's model went bad: rebuild from the exact mixed
                // Hessian and retry the iteration from the same point.
                jac = exact_jacobian(solver, &u, &arr(&nu))?;
                used_exact = true;
                continue;
            }
            None => {
                return Err(Error::NewtonDiverged {
                    what: "asymptote parameter",
                    residual: g.amax(),
                    iters: iter,
                })
            }
        };

        // Broyden good update on the accepted secant pair.
        let dnu = step * lambda;
        let dg = gt - g;
        let denom = dnu.norm_squared();
        if denom > 0.0 {
            jac += (dg - jac * dnu) * dnu.transpose() / denom;
        }
        nu = trial;
        g = gt;
    }
    Err(Error::NewtonDiverged {
        what: "asymptote parameter",
        residual: g.amax(),
        iters: tol::NEWTON_MAX_ITERS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::testutil::level_state;
    use crate::kscore::charts::{lift_default, rotate_fiber};
    use crate::kscore::ham::ham_ks_identity;
    use crate::kscore::maps::fiber_rotation;
    use crate::kscore::types::Params;
    use crate::linalg::matvec4;

    fn solver(order: usize) -> HjSolver {
        HjSolver::new(Params::new(0.01, -1.8).unwrap(), order).unwrap()
    }

    #[test]
    fn collision_inversion_is_exact() {
        let sv = solver(6);
        let s8 = (8.0 * 0.01f64).sqrt();
        let nu_true = [0.36, -0.8, 0.3, 0.37];
        let state = KsState {
            u: [0.0; 4],
            p: std::array::from_fn(|j| s8 * nu_true[j]),
        };
        let out = nu_hat(&sv, &state).unwrap();
        assert_eq!(out.iters, 0);
        for j in 0..4 {
            assert!((out.nu[j] - nu_true[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_evaluation_confirms_the_inverse() {
        // Manufactured data: pick ν, evaluate U = ∂W/∂u(u; ν), then invert.
        let sv = solver(8);
        let nu_true = [0.9, 0.25, -0.33, 0.1];
        let sol = sv.complete_integral(&nu_true).unwrap();
        let u = [0.05, -0.04, 0.06, 0.02];
        let uu = std::array::from_fn(|j| sol.w.partial(j).unwrap().eval(&u).unwrap());
        let out = nu_hat(&sv, &KsState { u, p: uu }).unwrap();
        for j in 0..4 {
            assert!(
                (out.nu[j] - nu_true[j]).abs() < 1e-11,
                "nu[{j}] = {} vs {}, iters {}",
                out.nu[j],
                nu_true[j],
                out.iters
            );
        }
        assert!(out.residual <= tol::NEWTON_TOL * 2.0);
    }

    #[test]
    fn unit_norm_on_the_zero_level() {
        // Lift an H = E state: K_I = |u|²(H − E) = 0, so ‖ν̂‖ = 1.
        //
        // The norm defect is the pointwise series defect divided by 2μ, so
        // the state must sit where truncation is far below the tolerance:
        // |u| ≈ 0.028 at order 12 leaves ~1e-10 against the 1e-9 budget.
        let sv = solver(12);
        let st = level_state(0.01, -1.8, [6e-4, -4e-4, 3e-4], [0.2, 0.9, -0.4]);
        let (ks, _) = lift_default(&st).unwrap();
        let out = nu_hat(&sv, &ks).unwrap();
        let norm = out.nu.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(
            (norm - 1.0).abs() < tol::CHK_NU_UNIT,
            "‖ν̂‖ − 1 = {:e}",
            norm - 1.0
        );
    }

    #[test]
    fn level_identity_off_the_zero_set() {
        // Perturb the momentum off the energy level; then K_I(u,U) = κ ≠ 0
        // and the recovered parameter satisfies ‖ν̂‖² = 1 + κ/μ. The defect
        // of the identity is the series truncation over μ, hence the small
        // radius (|u| ≈ 0.03 at order 12 → ~4e-10 against 1e-8).
        let sv = solver(12);
        let st = level_state(0.01, -1.8, [5e-4, 4e-4, -6e-4], [-0.3, 0.8, 0.52]);
        let (mut ks, _) = lift_default(&st).unwrap();
        for j in 0..4 {
            ks.p[j] *= 1.01; // small off-level push
        }
        let kappa = ham_ks_identity(&ks.u, &ks.p, 0.01, -1.8);
        let out = nu_hat(&sv, &ks).unwrap();
        let lam = out.nu.iter().map(|x| x * x).sum::<f64>();
        assert!(
            (lam - (1.0 + kappa / 0.01)).abs() < tol::CHK_NU_LEVEL,
            "‖ν̂‖² − (1 + κ/μ) = {:e}",
            lam - (1.0 + kappa / 0.01)
        );
    }

    #[test]
    fn fiber_equivariance() {
        // ν̂(S⁰_α u, S⁰_α U) = S⁰_α ν̂(u, U): the fiber rotation is a right
        // quaternion multiplication, commuting with every frame map S_ν.
        let sv = solver(8);
        let st = level_state(0.01, -1.8, [-0.003, 0.007, 0.004], [0.6, -0.5, 0.63]);
        let (ks, _) = lift_default(&st).unwrap();
        let base = nu_hat(&sv, &ks).unwrap();
        let alpha = 0.83;
        let rotated = rotate_fiber(&ks, alpha);
        let out = nu_hat(&sv, &rotated).unwrap();
        let expect = matvec4(&fiber_rotation(alpha), &base.nu);
        for j in 0..4 {
            assert!(
                (out.nu[j] - expect[j]).abs() < 1e-9,
                "component {j}: {} vs {}",
                out.nu[j],
                expect[j]
            );
        }
    }

    #[test]
    fn warm_start_cuts_iterations() {
        let sv = solver(8);
        let st = level_state(0.01, -1.8, [0.008, 0.002, 0.003], [-0.1, -0.8, 0.3]);
        let (ks, _) = lift_default(&st).unwrap();
        let cold = nu_hat(&sv, &ks).unwrap();
        let warm = nu_hat_guided(&sv, &ks, Some(cold.nu)).unwrap();
        assert!(warm.iters <= 1, "warm start took {} iterations", warm.iters);
    }

    #[test]
    fn outside_trust_ball_is_rejected() {
        let sv = solver(4);
        let state = KsState {
            u: [0.2, 0.0, 0.0, 0.0],
            p: [0.3, 0.0, 0.0, 0.0],
        };
        match nu_hat(&sv, &state) {
            Err(Error::DomainExceeded { radius, limit }) => {
                assert!((radius - 0.2).abs() < 1e-15);
                assert!((limit - tol::TRUST_RADIUS).abs() < 1e-15);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }
}
