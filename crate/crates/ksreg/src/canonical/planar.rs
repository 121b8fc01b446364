//! The planar Levi-Civita counterpart of the canonical encounter pipeline.
//!
//! # Structure
//!
//! The planar problem regularizes with the two-variable parabolic map
//! `X = u₁² − u₂²`, `Y = 2u₁u₂` and the level-set Hamiltonian
//! `K₂(u, U; E)`, and its Hamilton–Jacobi equation admits a complete
//! integral `W₂(u; κ, α)` with two parameters: the level value `κ` and a
//! rotation angle `α`, with exact linear part
//!
//! ```text
//!   W₂ = √(8(μ+κ)) (u₁ cos α + u₂ sin α) + O(‖u‖²).
//! ```
//!
//! The conjugate coordinates are `n_α = ∂W₂/∂α` and `n_κ = ∂W₂/∂κ`. In
//! these variables the flow trivializes: differentiating the identity
//! `K₂(u, ∂W₂/∂u) = κ` along an orbit gives
//!
//! ```text
//!   α, κ, n_α  constant,      n_κ(s) = n_κ(0) + s,
//! ```
//!
//! the planar analogue of the four-dimensional linear drift. The mixed
//! Hessian of `W₂` in `(u; α, κ)` has determinant of magnitude 4 at
//! `u = 0` — uniformly in `α` and in `κ` near 0 — so the whole pipeline
//! (parameter recovery, state recovery, encounter map) is nonsingular
//! through the collision, exactly as in the spatial case.
//!
//! # Role
//!
//! Besides being useful on its own for planar data, this pipeline is an
//! independent cross-check of the spatial one: planar initial data keeps
//! `Z = P_Z = 0`, so the spatial encounter map restricted to the plane
//! must reproduce the planar map's exits. The two implementations share
//! no series code (two-variable vs four-variable recursions), which makes
//! the agreement a strong end-to-end test.

use crate::algebra::MultiSeries;
use crate::dynamics::time::quad_adaptive;
use crate::error::{Error, Result};
use crate::hjsolver::planar::LcSolver;
use crate::kscore::charts::{lc_lift, lc_phase_project};
use crate::kscore::ham::{ham_lc, ham_lc_grad, ham_planeto};
use crate::kscore::types::PlanetoState;
use crate::scalar::Jet2;
use crate::tol;

type Series2 = MultiSeries<f64>;

/// Cached series data of one planar complete integral `W₂(·; κ, α)`:
/// everything the marching loop evaluates, solved once.
pub struct PlanarFrame {
    kappa: f64,
    alpha: f64,
    /// `W₂` with parameters frozen.
    w: Series2,
    /// `∂W₂/∂uⱼ`.
    dw: [Series2; 2],
    /// `W₂` with first-order parameter jets (slot 0 = `∂/∂α`,
    /// slot 1 = `∂/∂κ`).
    w_jet: MultiSeries<Jet2>,
    /// `∂/∂uⱼ` of the jet series — mixed second derivatives.
    dw_jet: [MultiSeries<Jet2>; 2],
}

impl PlanarFrame {
    /// Solves the planar complete integral at `(κ, α)` and caches the
    /// derivative series.
    ///
    /// # Errors
    /// Propagates solver failures (invalid parameters, degree overflow).
    pub fn new(solver: &LcSolver, kappa: f64, alpha: f64) -> Result<Self> {
        let w = solver.complete_integral(kappa, alpha)?;
        let dw = [w.partial(0)?, w.partial(1)?];
        let w_jet = solver.complete_integral_jet(kappa, alpha)?;
        let dw_jet = [w_jet.partial(0)?, w_jet.partial(1)?];
        Ok(PlanarFrame {
            kappa,
            alpha,
            w,
            dw,
            w_jet,
            dw_jet,
        })
    }

    /// Level value `κ` of this frame.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Rotation angle `α` of this frame.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `W₂(u)`.
    ///
    /// # Errors
    /// Series evaluation failures (non-finite input).
    pub fn w_value(&self, u: &[f64; 2]) -> Result<f64> {
        self.w.eval(u)
    }

    /// Gradient `∂W₂/∂u` — the momenta `U` on the invariant family.
    ///
    /// # Errors
    /// Series evaluation failures.
    pub fn grad_u(&self, u: &[f64; 2]) -> Result<[f64; 2]> {
        Ok([self.dw[0].eval(u)?, self.dw[1].eval(u)?])
    }

    /// Conjugate coordinates `(n_α, n_κ) = (∂W₂/∂α, ∂W₂/∂κ)` at `u`.
    ///
    /// # Errors
    /// Series evaluation failures.
    pub fn conjugates(&self, u: &[f64; 2]) -> Result<[f64; 2]> {
        let uj = [Jet2::constant(u[0]), Jet2::constant(u[1])];
        let v = self.w_jet.eval(&uj)?;
        Ok(v.grad())
    }

    /// Jacobian `M[k][j] = ∂n_k/∂u_j` of the conjugate coordinates.
    ///
    /// # Errors
    /// Series evaluation failures.
    pub fn conjugate_jacobian(&self, u: &[f64; 2]) -> Result<[[f64; 2]; 2]> {
        let uj = [Jet2::constant(u[0]), Jet2::constant(u[1])];
        let mut m = [[0.0; 2]; 2];
        for j in 0..2 {
            let g = self.dw_jet[j].eval(&uj)?.grad();
            m[0][j] = g[0];
            m[1][j] = g[1];
        }
        Ok(m)
    }
}

/// Determinant of the mixed Hessian `∂²W₂/∂u∂(α,κ)` at `u = 0` — the
/// nondegeneracy certificate of the planar canonical map. Its magnitude
/// is 4 for every admissible `(κ, α)`.
///
/// # Errors
/// Solver failures.
pub fn planar_jacobian_det(solver: &LcSolver, kappa: f64, alpha: f64) -> Result<f64> {
    let frame = PlanarFrame::new(solver, kappa, alpha)?;
    let m = frame.conjugate_jacobian(&[0.0, 0.0])?;
    // Rows of j₂ run over u, columns over (α, κ).
    Ok(m[0][0] * m[1][1] - m[1][0] * m[0][1])
}

/// Result of recovering the planar parameters `(α̂, κ̂)` from a phase
/// point `(u, U)`.
#[derive(Clone, Copy, Debug)]
pub struct PlanarParamSolve {
    /// Recovered rotation angle.
    pub alpha: f64,
    /// Recovered level value (closed form, exact up to truncation).
    pub kappa: f64,
    /// Gauss–Newton iterations spent on `α̂`.
    pub iters: usize,
    /// Final `‖∂W₂/∂u − U‖∞`.
    pub residual: f64,
}

/// Recovers `(α̂, κ̂)` such that `U = ∂W₂/∂u(u; κ̂, α̂)`.
///
/// `κ̂` needs no iteration at all: composing the complete integral with
/// the Hamiltonian gives `K₂(u, ∂W₂/∂u) = κ` identically, so
/// `κ̂ = K₂(u, U)` in closed form. The angle is then a one-parameter
/// Gauss–Newton iteration on the two-component gradient residual, started
/// from the collision-exact value `α̂₀ = atan2(U₂, U₁)`.
///
/// With a *truncated* series the two-equation one-unknown system is
/// inconsistent by the pointwise truncation defect at `u`, so the
/// iteration ends at a least-squares floor instead of at zero residual.
/// Reaching stationarity — a negligible Gauss–Newton step, or no
/// line-search descent left — is therefore a successful exit; the floor
/// is reported in [`PlanarParamSolve::residual`] for callers that want to
/// monitor the series consistency at the evaluation point.
///
/// # Errors
/// [`Error::DomainExceeded`] outside the trusted ball;
/// [`Error::NewtonDiverged`] if the damped iteration exhausts its budget
/// without reaching either the tolerance or a stationary point.
pub fn planar_parameters(
    solver: &LcSolver,
    u: &[f64; 2],
    uu: &[f64; 2],
) -> Result<PlanarParamSolve> {
    let radius = (u[0] * u[0] + u[1] * u[1]).sqrt();
    if radius > tol::TRUST_RADIUS {
        return Err(Error::DomainExceeded {
            radius,
            limit: tol::TRUST_RADIUS,
        });
    }
    let kappa = ham_lc(u, uu, solver.mu(), solver.energy());
    let mut alpha = uu[1].atan2(uu[0]);
    let tol_abs = tol::NEWTON_TOL * (1.0 + uu[0].abs().max(uu[1].abs()));

    if radius == 0.0 {
        return Ok(PlanarParamSolve {
            alpha,
            kappa,
            iters: 0,
            residual: 0.0,
        });
    }

    let residual_of = |a: f64| -> Result<([f64; 2], [f64; 2])> {
        // Gradient residual and its α-derivative from one jet solve.
        let wj = solver.complete_integral_jet(kappa, a)?;
        let uj = [Jet2::constant(u[0]), Jet2::constant(u[1])];
        let mut g = [0.0; 2];
        let mut dg = [0.0; 2];
        for j in 0..2 {
            let v = wj.partial(j)?.eval(&uj)?;
            g[j] = v.v - uu[j];
            dg[j] = v.grad()[0];
        }
        Ok((g, dg))
    };

    let (mut g, mut dg) = residual_of(alpha)?;
    let mut iters = 0usize;
    loop {
        let gmax = g[0].abs().max(g[1].abs());
        if gmax <= tol_abs {
            return Ok(PlanarParamSolve {
                alpha,
                kappa,
                iters,
                residual: gmax,
            });
        }
        if iters >= tol::NEWTON_MAX_ITERS {
            return Err(Error::NewtonDiverged {
                what: "planar rotation angle",
                residual: gmax,
                iters,
            });
        }
        // Gauss–Newton step for the overdetermined 2-in-1 system.
        let jtj = dg[0] * dg[0] + dg[1] * dg[1];
        if jtj == 0.0 {
            return Err(Error::NewtonDiverged {
                what: "planar rotation angle (flat residual)",
                residual: gmax,
                iters,
            });
        }
        let step = -(dg[0] * g[0] + dg[1] * g[1]) / jtj;
        // A negligible normal-equations step means the least-squares floor
        // has been reached (see the doc comment): successful stationary exit.
        if step.abs() <= f64::EPSILON * (1.0 + alpha.abs()) {
            return Ok(PlanarParamSolve {
                alpha,
                kappa,
                iters,
                residual: gmax,
            });
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=6 {
            let trial = alpha + lambda * step;
            let (gt, dgt) = residual_of(trial)?;
            if gt[0].abs().max(gt[1].abs()) < gmax {
                accepted = Some((trial, gt, dgt));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((a, gt, dgt)) => {
                alpha = a;
                g = gt;
                dg = dgt;
                iters += 1;
            }
            None => {
                // No descent left along the Gauss–Newton direction: the
                // iterate is stationary at the least-squares floor.
                return Ok(PlanarParamSolve {
                    alpha,
                    kappa,
                    iters,
                    residual: gmax,
                });
            }
        }
    }
}

/// Result of the planar state recovery `(n_α, n_κ) ↦ (u, U)`.
#[derive(Clone, Copy, Debug)]
pub struct PlanarInverse {
    /// Recovered spinor point.
    pub u: [f64; 2],
    /// Recovered momenta `∂W₂/∂u`.
    pub uu: [f64; 2],
    /// Newton iterations.
    pub iters: usize,
    /// Final residual.
    pub residual: f64,
}

/// Solves `(∂W₂/∂α, ∂W₂/∂κ)(u) = n_target` for `u` with the frame's
/// parameters frozen — the planar canonical inversion. The 2×2 Jacobian
/// has determinant near ±4 throughout the ball.
///
/// # Errors
/// [`Error::DomainExceeded`] when the iterates leave the trusted ball;
/// [`Error::NewtonDiverged`] on exhaustion or a singular Jacobian.
pub fn planar_invert(
    frame: &PlanarFrame,
    n_target: &[f64; 2],
    guess: Option<[f64; 2]>,
) -> Result<PlanarInverse> {
    let tol_abs = tol::NEWTON_TOL * (1.0 + n_target[0].abs().max(n_target[1].abs()));
    let mut ua = guess.unwrap_or([0.0, 0.0]);
    let mut g = {
        let n = frame.conjugates(&ua)?;
        [n[0] - n_target[0], n[1] - n_target[1]]
    };
    let mut iters = 0;
    for _ in 0..tol::NEWTON_MAX_ITERS {
        let gmax = g[0].abs().max(g[1].abs());
        if gmax <= tol_abs {
            let uu = frame.grad_u(&ua)?;
            return Ok(PlanarInverse {
                u: ua,
                uu,
                iters,
                residual: gmax,
            });
        }
        iters += 1;
        let m = frame.conjugate_jacobian(&ua)?;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return Err(Error::NewtonDiverged {
                what: "planar state recovery (singular Jacobian)",
                residual: gmax,
                iters,
            });
        }
        let step = [
            -(m[1][1] * g[0] - m[0][1] * g[1]) / det,
            -(-m[1][0] * g[0] + m[0][0] * g[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=6 {
            let trial = [ua[0] + lambda * step[0], ua[1] + lambda * step[1]];
            let radius = (trial[0] * trial[0] + trial[1] * trial[1]).sqrt();
            if radius > tol::TRUST_RADIUS {
                if lambda <= 1.0 / 64.0 {
                    return Err(Error::DomainExceeded {
                        radius,
                        limit: tol::TRUST_RADIUS,
                    });
                }
                lambda *= 0.5;
                continue;
            }
            let n = frame.conjugates(&trial)?;
            let gt = [n[0] - n_target[0], n[1] - n_target[1]];
            if gt[0].abs().max(gt[1].abs()) < gmax || gt[0].abs().max(gt[1].abs()) <= tol_abs {
                accepted = Some((trial, gt));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, gt)) => {
                ua = trial;
                g = gt;
            }
            None => {
                return Err(Error::NewtonDiverged {
                    what: "planar state recovery",
                    residual: gmax,
                    iters,
                })
            }
        }
    }
    Err(Error::NewtonDiverged {
        what: "planar state recovery",
        residual: g[0].abs().max(g[1].abs()),
        iters,
    })
}

/// Health telemetry of one planar encounter propagation.
#[derive(Clone, Copy, Debug)]
pub struct PlanarDiagnostics {
    /// Change of the recovered angle between entry and exit (wrapped).
    pub alpha_drift: f64,
    /// Change of the recovered level value between entry and exit.
    pub kappa_drift: f64,
    /// `|K₂(exit) − K₂(entry)|`.
    pub energy_drift: f64,
    /// Largest Newton iteration count over all recoveries.
    pub newton_iters_max: usize,
}

/// Outcome of a planar encounter propagation. Planar states are
/// `[X, Y, P_X, P_Y]` in the planetocentric rotating frame.
#[derive(Clone, Copy, Debug)]
pub struct PlanarEncounterResult {
    /// Validated entry state.
    pub entry: [f64; 4],
    /// Exit state on the encounter circle.
    pub exit: [f64; 4],
    /// Recovered angle at entry.
    pub alpha: f64,
    /// Recovered level value at entry.
    pub kappa: f64,
    /// Conjugate coordinates `(n_α, n_κ)` at entry.
    pub n0: [f64; 2],
    /// Regularized time of the exit crossing.
    pub s_exit: f64,
    /// Physical time spent inside the circle.
    pub t_exit: f64,
    /// Telemetry.
    pub diagnostics: PlanarDiagnostics,
}

/// Forward planar encounter propagation with the default budget.
///
/// # Errors
/// As [`planar_encounter_map_configured`].
pub fn planar_encounter_map(
    solver: &LcSolver,
    entry: &[f64; 4],
    sigma: f64,
) -> Result<PlanarEncounterResult> {
    planar_encounter_map_configured(solver, entry, sigma, 1.0, tol::ENCOUNTER_S_BUDGET)
}

/// Planar encounter propagation with explicit march direction
/// (`direction = ±1.0`) and `s`-budget. Mirrors the spatial
/// [`crate::canonical::encounter_map_configured`] step for step: lift,
/// recover `(α̂, κ̂, n(0))`, march `n_κ(s) = n_κ(0) + s`, bracket the
/// circle re-crossing, refine with a secant, and integrate `‖u‖² ds` for
/// the physical time.
///
/// # Errors
/// [`Error::InvalidParameter`] on a violated entry contract;
/// [`Error::DomainExceeded`], [`Error::NoExit`], and Newton failures as
/// in the spatial map.
pub fn planar_encounter_map_configured(
    solver: &LcSolver,
    entry: &[f64; 4],
    sigma: f64,
    direction: f64,
    s_budget: f64,
) -> Result<PlanarEncounterResult> {
    let mu = solver.mu();
    let energy = solver.energy();
    let sign = if direction >= 0.0 { 1.0 } else { -1.0 };

    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "encounter radius sigma = {sigma} must be positive"
        )));
    }
    let [x, y, px, py] = *entry;
    let r_entry = (x * x + y * y).sqrt();
    if (r_entry - sigma).abs() > tol::ENTRY_SPHERE_TOL * sigma.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "entry state is not on the encounter circle: |position| = {r_entry:.15e}, sigma = {sigma:.15e}"
        )));
    }
    let h_entry = ham_planeto(&planar_embed(entry), mu);
    if (h_entry - energy).abs() > tol::ENTRY_ENERGY_TOL * energy.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "entry state is off the energy level: H = {h_entry:.15e}, E = {energy:.15e}"
        )));
    }
    let u_radius = sigma.sqrt();
    if u_radius > tol::TRUST_RADIUS {
        return Err(Error::DomainExceeded {
            radius: u_radius,
            limit: tol::TRUST_RADIUS,
        });
    }

    let (u0, uu0) = lc_lift(x, y, px, py)?;
    let params = planar_parameters(solver, &u0, &uu0)?;
    let frame = PlanarFrame::new(solver, params.kappa, params.alpha)?;
    let n0 = frame.conjugates(&u0)?;
    let k_entry = ham_lc(&u0, &uu0, mu, energy);
    let mut iters_max = params.iters;

    let target = |s: f64| -> [f64; 2] { [n0[0], n0[1] + s] };
    let radial_rate = |u: &[f64; 2], uu: &[f64; 2]| -> f64 {
        let (_, dk_dp) = ham_lc_grad(u, uu, mu, energy);
        2.0 * (u[0] * dk_dp[0] + u[1] * dk_dp[1])
    };

    if sign * radial_rate(&u0, &uu0) >= 0.0 {
        return Ok(PlanarEncounterResult {
            entry: *entry,
            exit: *entry,
            alpha: params.alpha,
            kappa: params.kappa,
            n0,
            s_exit: 0.0,
            t_exit: 0.0,
            diagnostics: PlanarDiagnostics {
                alpha_drift: 0.0,
                kappa_drift: 0.0,
                energy_drift: 0.0,
                newton_iters_max: iters_max,
            },
        });
    }

    // ── march, arm, bracket ─────────────────────────────────────────────
    let rate_floor = 0.05 * u_radius * (8.0 * mu).sqrt();
    let arm_tol = 1e-4 * sigma;
    let mut samples: Vec<(f64, [f64; 2])> = vec![(0.0, u0)];
    let mut u = u0;
    let mut uu = uu0;
    let mut s = 0.0;
    let mut g_prev = 0.0;
    let mut armed = false;
    let bracket;
    loop {
        let (_, dk_dp) = ham_lc_grad(&u, &uu, mu, energy);
        let rate = (2.0 * (u[0] * dk_dp[0] + u[1] * dk_dp[1])).abs();
        let u_speed = (dk_dp[0] * dk_dp[0] + dk_dp[1] * dk_dp[1]).sqrt();
        let radius = (u[0] * u[0] + u[1] * u[1]).sqrt();
        let ds_radius = (sigma / 20.0) / rate.max(rate_floor);
        let ds_spinor = 0.1 * radius.max(0.25 * u_radius) / u_speed.max(1e-300);
        let ds = ds_radius.min(ds_spinor);
        let s_next = s + sign * ds;
        if s_next.abs() > s_budget {
            return Err(Error::NoExit { s_max: s_budget });
        }
        let inv = planar_invert(&frame, &target(s_next), Some(u))?;
        iters_max = iters_max.max(inv.iters);
        let g = inv.u[0] * inv.u[0] + inv.u[1] * inv.u[1] - sigma;
        if g < -arm_tol {
            armed = true;
        }
        if armed && g_prev < 0.0 && g >= 0.0 {
            bracket = (s, s_next);
            break;
        }
        samples.push((s_next, inv.u));
        u = inv.u;
        uu = inv.uu;
        s = s_next;
        g_prev = g;
    }

    // ── secant refinement ───────────────────────────────────────────────
    let (mut s_lo, mut s_hi) = bracket;
    let guess0 = u;
    let eval_g = |s_q: f64, guess: [f64; 2], iters_max: &mut usize| -> Result<(f64, PlanarInverse)> {
        let inv = planar_invert(&frame, &target(s_q), Some(guess))?;
        *iters_max = (*iters_max).max(inv.iters);
        Ok((inv.u[0] * inv.u[0] + inv.u[1] * inv.u[1] - sigma, inv))
    };
    let (mut g_lo, _) = eval_g(s_lo, guess0, &mut iters_max)?;
    let (mut g_hi, mut inv_hi) = eval_g(s_hi, guess0, &mut iters_max)?;
    let mut s_exit = s_hi;
    let mut inv_exit = inv_hi;
    let mut guess = guess0;
    for _ in 0..80 {
        if (s_hi - s_lo).abs() <= 1e-13 * s_hi.abs().max(1.0) || g_hi == 0.0 {
            break;
        }
        let denom = g_hi - g_lo;
        let mut s_mid = if denom != 0.0 {
            s_hi - g_hi * (s_hi - s_lo) / denom
        } else {
            0.5 * (s_lo + s_hi)
        };
        let span = s_hi - s_lo;
        let (gmin, gmax) = {
            let a = s_lo + 0.1 * span;
            let b = s_hi - 0.1 * span;
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        s_mid = s_mid.clamp(gmin, gmax);
        let (g_mid, inv_mid) = eval_g(s_mid, guess, &mut iters_max)?;
        guess = inv_mid.u;
        if g_mid < 0.0 {
            s_lo = s_mid;
            g_lo = g_mid;
        } else {
            s_hi = s_mid;
            g_hi = g_mid;
            inv_hi = inv_mid;
        }
        s_exit = s_hi;
        inv_exit = inv_hi;
        if g_mid.abs() <= 1e-13 * sigma {
            s_exit = s_mid;
            inv_exit = inv_mid;
            break;
        }
    }

    // ── physical time ───────────────────────────────────────────────────
    samples.push((s_exit, inv_exit.u));
    let mut quad_iters = iters_max;
    let integrand = |s_q: f64| -> Result<f64> {
        let idx = samples
            .binary_search_by(|(sv, _)| {
                (sign * sv)
                    .partial_cmp(&(sign * s_q))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or_else(|i| i.min(samples.len() - 1));
        let inv = planar_invert(&frame, &target(s_q), Some(samples[idx].1))?;
        quad_iters = quad_iters.max(inv.iters);
        Ok(inv.u[0] * inv.u[0] + inv.u[1] * inv.u[1])
    };
    // The integrand is recovered through a Newton inversion per node, so the
    // quadrature tolerance must sit above that recovery noise.
    let t_exit = quad_adaptive(
        integrand,
        0.0,
        s_exit,
        tol::QUAD_SOLVE_REL_TOL,
        tol::QUAD_ABS_TOL,
    )?;
    iters_max = quad_iters;

    // ── projection and telemetry ────────────────────────────────────────
    let exit = lc_phase_project(&inv_exit.u, &inv_exit.uu)?;
    let exit_params = planar_parameters(solver, &inv_exit.u, &inv_exit.uu)?;
    iters_max = iters_max.max(exit_params.iters);
    let mut alpha_drift = (exit_params.alpha - params.alpha).abs();
    // The angle lives on the circle; compare the short way around.
    alpha_drift = alpha_drift.min((alpha_drift - 2.0 * std::f64::consts::PI).abs());
    let k_exit = ham_lc(&inv_exit.u, &inv_exit.uu, mu, energy);
    Ok(PlanarEncounterResult {
        entry: *entry,
        exit,
        alpha: params.alpha,
        kappa: params.kappa,
        n0,
        s_exit,
        t_exit,
        diagnostics: PlanarDiagnostics {
            alpha_drift,
            kappa_drift: (exit_params.kappa - params.kappa).abs(),
            energy_drift: (k_exit - k_entry).abs(),
            newton_iters_max: iters_max,
        },
    })
}

/// Embeds a planar state `[X, Y, P_X, P_Y]` into the spatial
/// planetocentric phase space (`Z = P_Z = 0`).
pub fn planar_embed(state: &[f64; 4]) -> PlanetoState {
    PlanetoState {
        x: state[0],
        y: state[1],
        z: 0.0,
        px: state[2],
        py: state[3],
        pz: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::encounter::encounter_map;
    use crate::canonical::testutil::level_state;
    use crate::hjsolver::HjSolver;
    use crate::kscore::types::Params;

    fn lc(order: usize) -> LcSolver {
        LcSolver::new(0.01, -1.8, order).unwrap()
    }

    fn planar_entry(sigma: f64, theta: f64) -> [f64; 4] {
        // An entering planar state on the circle and the energy level,
        // built through the spatial helper with the z-components zeroed.
        let pos = [sigma * theta.cos(), sigma * theta.sin(), 0.0];
        let radial = [theta.cos(), theta.sin(), 0.0];
        let tangent = [-theta.sin(), theta.cos(), 0.0];
        // Mostly tangential aim with a definite inward pull.
        let aim = [
            0.6 * tangent[0] - 0.8 * radial[0],
            0.6 * tangent[1] - 0.8 * radial[1],
            0.0,
        ];
        let s = level_state(0.01, -1.8, pos, aim);
        assert!(s.entering());
        [s.x, s.y, s.px, s.py]
    }

    #[test]
    fn linear_coefficient_matches_the_closed_form() {
        let sv = lc(8);
        for &(kappa, alpha) in &[(0.0, 0.3), (0.02, -1.1), (-0.005, 2.4)] {
            let frame = PlanarFrame::new(&sv, kappa, alpha).unwrap();
            let g = frame.grad_u(&[0.0, 0.0]).unwrap();
            let c = (8.0 * (0.01 + kappa)).sqrt();
            assert!((g[0] - c * alpha.cos()).abs() < tol::CHK_LEADING_COEFF);
            assert!((g[1] - c * alpha.sin()).abs() < tol::CHK_LEADING_COEFF);
        }
    }

    #[test]
    fn jacobian_determinant_magnitude_is_four() {
        let sv = lc(8);
        for k in 0..8 {
            let alpha = k as f64 * std::f64::consts::PI / 4.0 + 0.13;
            for &kappa in &[0.0, 0.015] {
                let det = planar_jacobian_det(&sv, kappa, alpha).unwrap();
                assert!(
                    (det.abs() - 4.0).abs() < tol::CHK_JACOBIAN_DET_PLANAR,
                    "alpha {alpha}, kappa {kappa}: j2 = {det}"
                );
            }
        }
    }

    #[test]
    fn parameters_recover_from_manufactured_momenta() {
        // Manufactured momenta still carry the truncation defect of the
        // series they came from, so the recovery floor is set by the
        // pointwise defect at `u`.  At |u| = 0.02 and order 12 that floor
        // sits near 3e-15, far below the asserted 1e-10 / 1e-11 bounds.
        let sv = lc(12);
        let (alpha_true, kappa_true) = (0.74, 0.008);
        let frame = PlanarFrame::new(&sv, kappa_true, alpha_true).unwrap();
        let u = [0.016, -0.012];
        let uu = frame.grad_u(&u).unwrap();
        let rec = planar_parameters(&sv, &u, &uu).unwrap();
        assert!(
            (rec.alpha - alpha_true).abs() < 1e-10,
            "alpha {} vs {}",
            rec.alpha,
            alpha_true
        );
        assert!(
            (rec.kappa - kappa_true).abs() < 1e-11,
            "kappa {} vs {}",
            rec.kappa,
            kappa_true
        );
    }

    #[test]
    fn inversion_round_trips_the_conjugates() {
        let sv = lc(10);
        let frame = PlanarFrame::new(&sv, 0.0, -0.42).unwrap();
        let u = [0.05, 0.035];
        let n = frame.conjugates(&u).unwrap();
        let inv = planar_invert(&frame, &n, None).unwrap();
        assert!((inv.u[0] - u[0]).abs() < tol::CHK_ROUNDTRIP);
        assert!((inv.u[1] - u[1]).abs() < tol::CHK_ROUNDTRIP);
        let uu = frame.grad_u(&u).unwrap();
        assert!((inv.uu[0] - uu[0]).abs() < tol::CHK_ROUNDTRIP);
        assert!((inv.uu[1] - uu[1]).abs() < tol::CHK_ROUNDTRIP);
    }

    #[test]
    fn exit_lies_on_the_circle() {
        let sv = lc(10);
        let entry = planar_entry(1e-3, 0.8);
        let res = planar_encounter_map(&sv, &entry, 1e-3).unwrap();
        let r_exit = (res.exit[0] * res.exit[0] + res.exit[1] * res.exit[1]).sqrt();
        assert!((r_exit - 1e-3).abs() < 1e-12);
        assert!(res.s_exit > 0.0 && res.t_exit > 0.0);
        assert!(res.diagnostics.kappa_drift < 1e-9);
        assert!(res.diagnostics.alpha_drift < 1e-7);
    }

    #[test]
    fn reverse_direction_from_an_entering_state_is_the_identity() {
        let sv = lc(8);
        let entry = planar_entry(1e-3, -1.9);
        let res = planar_encounter_map_configured(&sv, &entry, 1e-3, -1.0, tol::ENCOUNTER_S_BUDGET)
            .unwrap();
        assert_eq!(res.s_exit, 0.0);
        assert_eq!(res.exit, entry);
    }

    #[test]
    fn planar_and_spatial_encounters_agree() {
        // The plane is invariant: the spatial pipeline started from
        // embedded planar data must land on the embedded planar exit.
        let sigma = 1e-3;
        let lc_solver = lc(10);
        let sp_solver = HjSolver::new(Params::new(0.01, -1.8).unwrap(), 10).unwrap();
        let entry = planar_entry(sigma, 0.55);
        let planar = planar_encounter_map(&lc_solver, &entry, sigma).unwrap();
        let spatial = encounter_map(&sp_solver, &planar_embed(&entry), sigma).unwrap();

        assert!(spatial.exit.z.abs() < 1e-10, "z = {}", spatial.exit.z);
        assert!(spatial.exit.pz.abs() < 1e-10, "pz = {}", spatial.exit.pz);
        let sp = [
            spatial.exit.x,
            spatial.exit.y,
            spatial.exit.px,
            spatial.exit.py,
        ];
        for j in 0..4 {
            assert!(
                (sp[j] - planar.exit[j]).abs() < tol::CHK_PLANAR_SPATIAL,
                "component {j}: spatial {} vs planar {}",
                sp[j],
                planar.exit[j]
            );
        }
        assert!(
            (spatial.t_exit - planar.t_exit).abs() < tol::CHK_PLANAR_SPATIAL,
            "t: spatial {} vs planar {}",
            spatial.t_exit,
            planar.t_exit
        );
    }
}
