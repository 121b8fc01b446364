//! Poisson brackets, symplecticity checks, and the completeness report.
//!
//! # Numeric differentiation policy
//!
//! Everything here rests on gradients of scalar fields that are expensive
//! or impossible to differentiate in closed form (they contain a Newton
//! inversion). Two stencils are provided:
//!
//! * [`central_gradient`] — plain second-order central differences; used
//!   in bulk sweeps (rank statistics) where ~6 digits suffice;
//! * [`richardson_gradient`] — three central stencils at `h`, `h/2`,
//!   `h/4`, extrapolated twice (sixth order), with a per-component error
//!   estimate taken from the change between the two fourth-order
//!   extrapolants; used wherever a bracket must be trusted to `1e-7`.
//!
//! Steps are per-coordinate: `hᵢ = scaleᵢ` as supplied by the caller.
//! Fields built on the close-encounter machinery vary on the scale of the
//! planetocentric radius in position and on the momentum magnitude in
//! momentum, so [`encounter_scales`] derives suitable steps from the state
//! itself; [`ks_scales`] does the same on the KS phase space.
//!
//! Brackets combine two estimated gradients. Error estimates propagate
//! *componentwise* through the pairing — near a collision `∂H/∂q ~ μ/r²`
//! is enormous while `∂H/∂p` stays O(1), and only the momentum-difference
//! errors of the other field (which use a large, noise-friendly step) meet
//! the big factor. A norm-based bound would cross-multiply the worst error
//! with the worst gradient and reject brackets that are in fact accurate.
//! The propagated estimate is compared against the caller's accuracy
//! requirement and [`Error::DerivativeAccuracy`] is raised when it cannot
//! be met — a bracket that silently lost its digits is worse than no
//! bracket.
//!
//! Analytic gradients (e.g. the closed-form Hamiltonian gradient) enter
//! the same pipeline through [`GradientEstimate::exact`] with zero error,
//! which both sharpens the bound and removes half the stencil cost.
//!
//! # What the checks establish
//!
//! * canonical pairs: `{q̂ᵢ, p̂ⱼ} = δᵢⱼ` for the projected Cartesian
//!   coordinates on the KS phase space, and `{p̂ᵢ, p̂ⱼ} = 0` exactly on
//!   the bilinear zero set `ℓ(u, U) = 0`;
//! * first integrals: `{H, 𝒩²} = {H, 𝒩_Z} = {𝒩², 𝒩_Z} = 0` at states
//!   near the secondary;
//! * independence: the gradients of `(H, 𝒩², 𝒩_Z)` span three
//!   dimensions at almost every sampled state (rank via SVD of the
//!   row-normalized 3×6 gradient matrix);
//! * the asymptote-manifold Jacobian — the five defining functions
//!   `Fⱼ = Uⱼ − ∂W/∂uⱼ`, `F₅ = ℓ(u, U)` — has full rank 5 at the
//!   collision section, so the common zero set is a 3-manifold;
//! * symplecticity: the numeric Jacobian `J` of `(u, U) ↦ (n, ν)`
//!   satisfies `Jᵀ Ω₈ J = Ω₈`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::canonical::frame::EncounterFrame;
use crate::canonical::integrals::{cartesian_integrals_in_chart, first_integrals_nnu};
use crate::canonical::nu::nu_hat_polished;
use crate::error::{Error, Result};
use crate::hjsolver::HjSolver;
use crate::kscore::charts::select_chart;
use crate::kscore::ham::ham_planeto_grad;
use crate::kscore::types::{Chart, KsState, PlanetoState};
use crate::tol;

/// A numeric gradient with per-component accuracy estimates.
#[derive(Clone, Debug)]
pub struct GradientEstimate {
    /// Estimated partial derivatives.
    pub grad: Vec<f64>,
    /// Per-component a-posteriori error estimates (same length as `grad`).
    pub err: Vec<f64>,
}

impl GradientEstimate {
    /// Wraps an analytically known gradient: zero error in every component.
    pub fn exact(grad: Vec<f64>) -> Self {
        let err = vec![0.0; grad.len()];
        Self { grad, err }
    }

    /// Largest per-component error estimate.
    pub fn max_err(&self) -> f64 {
        self.err.iter().fold(0.0f64, |m, e| m.max(*e))
    }
}

/// Plain central-difference gradient, one step size, second order.
///
/// # Errors
/// Dimension mismatch between `x` and `scales`; failures of `f`.
pub fn central_gradient<F>(f: F, x: &[f64], scales: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if x.len() != scales.len() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates but {} scales were supplied",
            x.len(),
            scales.len()
        )));
    }
    let mut grad = vec![0.0; x.len()];
    let mut work = x.to_vec();
    for i in 0..x.len() {
        let h = scales[i];
        work[i] = x[i] + h;
        let fp = f(&work)?;
        work[i] = x[i] - h;
        let fm = f(&work)?;
        work[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

/// Richardson-extrapolated central-difference gradient with per-component
/// error estimates: three central stencils at `h`, `h/2`, `h/4` per
/// coordinate, extrapolated twice.
///
/// With `D(h)` the plain central difference, the fourth-order extrapolants
/// are `R(h) = (4·D(h/2) − D(h))/3` at the two finer levels, and the
/// returned value is the sixth-order combination `(16·R(h/2) − R(h))/15`.
/// The error estimate per component is `|R(h/2) − R(h)|/4` — the classical
/// `1/15` truncation estimate of the finer extrapolant inflated to absorb
/// the amplification of evaluation noise by the fine stencil.
///
/// # Errors
/// As [`central_gradient`].
pub fn richardson_gradient<F>(f: F, x: &[f64], scales: &[f64]) -> Result<GradientEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if x.len() != scales.len() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates but {} scales were supplied",
            x.len(),
            scales.len()
        )));
    }
    let mut grad = vec![0.0; x.len()];
    let mut err = vec![0.0; x.len()];
    let mut work = x.to_vec();
    let diff = |i: usize, h: f64, work: &mut Vec<f64>| -> Result<f64> {
        work[i] = x[i] + h;
        let fp = f(work)?;
        work[i] = x[i] - h;
        let fm = f(work)?;
        work[i] = x[i];
        Ok((fp - fm) / (2.0 * h))
    };
    for i in 0..x.len() {
        let h = scales[i];
        let d1 = diff(i, h, &mut work)?;
        let d2 = diff(i, 0.5 * h, &mut work)?;
        let d3 = diff(i, 0.25 * h, &mut work)?;
        let r_coarse = (4.0 * d2 - d1) / 3.0;
        let r_fine = (4.0 * d3 - d2) / 3.0;
        grad[i] = (16.0 * r_fine - r_coarse) / 15.0;
        err[i] = (r_fine - r_coarse).abs() / 4.0;
    }
    Ok(GradientEstimate { grad, err })
}

/// Default per-coordinate steps for a generic phase point:
/// `FD_STEP · (1 + |xᵢ|)`.
pub fn default_scales(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| tol::FD_STEP * (1.0 + v.abs())).collect()
}

/// Per-coordinate steps adapted to a planetocentric state near the
/// secondary: positions vary on the scale of the radius (1% steps),
/// momenta on the asymptote scale (see [`tol::FD_MOM_FRAC`]).
pub fn encounter_scales(state: &PlanetoState) -> [f64; 6] {
    let r = state.radius();
    let p = (state.px * state.px + state.py * state.py + state.pz * state.pz)
        .sqrt()
        .max(1.0);
    [
        tol::FD_POS_FRAC * r,
        tol::FD_POS_FRAC * r,
        tol::FD_POS_FRAC * r,
        tol::FD_MOM_FRAC * p,
        tol::FD_MOM_FRAC * p,
        tol::FD_MOM_FRAC * p,
    ]
}

/// Per-coordinate steps for fields on the KS phase space `(u, U)`: the
/// projection formulas carry `1/‖u‖²` factors, so `u` steps follow `‖u‖`
/// and `U` steps follow `max(‖U‖, √(8μ))`.
pub fn ks_scales(ks: &KsState, mu: f64) -> [f64; 8] {
    let un = ks.u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let pn = ks
        .p
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max((8.0 * mu).sqrt());
    let hu = tol::FD_KS_FRAC * un;
    let hp = tol::FD_KS_FRAC * pn;
    [hu, hu, hu, hu, hp, hp, hp, hp]
}

/// Canonical Poisson bracket `{f, g}` of two scalar fields at a phase
/// point of even dimension `2k` laid out as `(q₁..q_k, p₁..p_k)`:
///
/// ```text
///   {f, g} = Σᵢ ∂f/∂qᵢ · ∂g/∂pᵢ − ∂f/∂pᵢ · ∂g/∂qᵢ
/// ```
///
/// Gradients come from [`richardson_gradient`] with the supplied scales.
/// The componentwise propagated accuracy estimate (see
/// [`bracket_of_gradients`]) must not exceed `accuracy_limit`.
///
/// # Errors
/// [`Error::DimensionMismatch`] on odd dimension or mismatched scales;
/// [`Error::DerivativeAccuracy`] when the bracket cannot be trusted to
/// `accuracy_limit`; failures of the fields.
pub fn poisson_bracket<F, G>(
    f: F,
    g: G,
    x: &[f64],
    scales: &[f64],
    accuracy_limit: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<f64>,
{
    if x.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "phase dimension {} is odd",
            x.len()
        )));
    }
    let gf = richardson_gradient(&f, x, scales)?;
    let gg = richardson_gradient(&g, x, scales)?;
    bracket_of_gradients(&gf, &gg, accuracy_limit)
}

/// Combines two precomputed gradient estimates into the bracket value,
/// enforcing the propagated accuracy limit. Split out so drivers that
/// need several brackets of the same fields pay for each gradient once.
///
/// The propagated estimate follows the bracket's own pairing: each term
/// `∂f/∂qᵢ·∂g/∂pᵢ − ∂f/∂pᵢ·∂g/∂qᵢ` contributes
/// `|∂f|·err(∂g) + |∂g|·err(∂f) + err·err` with the *paired* components,
/// so a large-but-analytic gradient component never multiplies an
/// unrelated difference error.
///
/// # Errors
/// [`Error::DerivativeAccuracy`], [`Error::DimensionMismatch`].
pub fn bracket_of_gradients(
    gf: &GradientEstimate,
    gg: &GradientEstimate,
    accuracy_limit: f64,
) -> Result<f64> {
    if gf.grad.len() != gg.grad.len() || gf.grad.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "gradient lengths {} and {}",
            gf.grad.len(),
            gg.grad.len()
        )));
    }
    let k = gf.grad.len() / 2;
    let mut estimate = 0.0;
    let term = |a: f64, ea: f64, b: f64, eb: f64| a.abs() * eb + b.abs() * ea + ea * eb;
    for i in 0..k {
        estimate += term(gf.grad[i], gf.err[i], gg.grad[k + i], gg.err[k + i]);
        estimate += term(gf.grad[k + i], gf.err[k + i], gg.grad[i], gg.err[i]);
    }
    if estimate > accuracy_limit {
        return Err(Error::DerivativeAccuracy {
            estimate,
            limit: accuracy_limit,
        });
    }
    let mut sum = 0.0;
    for i in 0..k {
        sum += gf.grad[i] * gg.grad[k + i] - gf.grad[k + i] * gg.grad[i];
    }
    Ok(sum)
}

/// Which Cartesian first-integral component a field closure evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralComponent {
    /// `𝒩² = N_X² + N_Y² + N_Z²`.
    NSq,
    /// `𝒩_Z`.
    NZ,
}

/// Evaluates one first-integral component at a six-dimensional
/// planetocentric phase point through a *fixed* chart (the chart must not
/// switch inside a finite-difference stencil) with a polished `ν̂` solve,
/// keeping stopping noise at the rounding floor.
///
/// # Errors
/// Lift and Newton failures as in
/// [`crate::canonical::cartesian_integrals`].
pub fn integral_component_at(
    solver: &HjSolver,
    x: &[f64],
    chart: Chart,
    which: IntegralComponent,
    guess: Option<[f64; 4]>,
) -> Result<f64> {
    let state = PlanetoState::from_array([x[0], x[1], x[2], x[3], x[4], x[5]]);
    let ks = crate::kscore::charts::chart_lift(&state, chart)?;
    let nu_solve = nu_hat_polished(solver, &ks, guess)?;
    let sol = solver.complete_integral(&nu_solve.nu)?;
    let frame = EncounterFrame::from_solver(solver, &sol)?;
    let n = frame.n_of_u(&ks.u)?;
    let c = first_integrals_nnu(&n, &nu_solve.nu);
    Ok(match which {
        IntegralComponent::NSq => c[0] * c[0] + c[1] * c[1] + c[2] * c[2],
        IntegralComponent::NZ => c[2],
    })
}

/// Largest entry of `Jᵀ Ω₈ J − Ω₈` for the numeric Jacobian `J` of the
/// canonical map `(u, U) ↦ (n, ν)` at `state` — the symplecticity defect.
///
/// # Errors
/// Newton failures of the underlying map evaluations.
pub fn symplectic_defect(solver: &HjSolver, state: &KsState) -> Result<f64> {
    let center = nu_hat_polished(solver, state, None)?;
    let map = |x: &[f64]| -> Result<[f64; 8]> {
        let ks = KsState {
            u: [x[0], x[1], x[2], x[3]],
            p: [x[4], x[5], x[6], x[7]],
        };
        let nu_solve = nu_hat_polished(solver, &ks, Some(center.nu))?;
        let sol = solver.complete_integral(&nu_solve.nu)?;
        let frame = EncounterFrame::from_solver(solver, &sol)?;
        let n = frame.n_of_u(&ks.u)?;
        Ok([
            n[0],
            n[1],
            n[2],
            n[3],
            nu_solve.nu[0],
            nu_solve.nu[1],
            nu_solve.nu[2],
            nu_solve.nu[3],
        ])
    };

    let mut x0 = [0.0; 8];
    x0[..4].copy_from_slice(&state.u);
    x0[4..].copy_from_slice(&state.p);
    // Jacobian column by column, one central stencil per phase coordinate.
    let mut jac = DMatrix::zeros(8, 8);
    let mut work = x0;
    for j in 0..8 {
        let h = 1e-5 * (1.0 + x0[j].abs());
        work[j] = x0[j] + h;
        let fp = map(&work)?;
        work[j] = x0[j] - h;
        let fm = map(&work)?;
        work[j] = x0[j];
        for i in 0..8 {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    // Ω₈ in (q, p) block layout: [0 I; −I 0].
    let mut omega = DMatrix::zeros(8, 8);
    for i in 0..4 {
        omega[(i, i + 4)] = 1.0;
        omega[(i + 4, i)] = -1.0;
    }
    let defect = jac.transpose() * &omega * &jac - omega;
    Ok(defect.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Rank (and smallest-to-largest singular-value ratio) of the 5×8
/// Jacobian of the asymptote-manifold defining functions
/// `Fⱼ = Uⱼ − ∂W/∂uⱼ` (j = 1..4), `F₅ = ℓ(u, U)` at the collision
/// section `(u, U) = (0, √(8μ) ν)`.
///
/// Full rank 5 certifies that the asymptote set is a codimension-5
/// submanifold — a 3-manifold of the 8-dimensional phase space.
///
/// # Errors
/// Series-evaluation failures from the frame.
pub fn prop5_rank(frame: &EncounterFrame) -> Result<(usize, f64)> {
    let hess = frame.hessian_uu(&[0.0; 4])?;
    let s8 = (8.0 * frame.params().mu).sqrt();
    let nu = frame.nu();
    let mut m = DMatrix::zeros(5, 8);
    for j in 0..4 {
        for l in 0..4 {
            m[(j, l)] = -hess[j][l];
        }
        m[(j, 4 + j)] = 1.0;
    }
    // ∂ℓ/∂u at U = √(8μ)ν; the ∂ℓ/∂U block vanishes at u = 0.
    m[(4, 0)] = -s8 * nu[3];
    m[(4, 1)] = s8 * nu[2];
    m[(4, 2)] = -s8 * nu[1];
    m[(4, 3)] = s8 * nu[0];
    let sv = m.svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let rank = sv.iter().filter(|&&s| s > tol::RANK_REL_CUTOFF * smax).count();
    Ok((rank, if smax > 0.0 { smin / smax } else { 0.0 }))
}

/// Summary of the completeness verification over a state sample.
#[derive(Clone, Copy, Debug)]
pub struct CompletenessReport {
    /// States examined for gradient independence.
    pub states: usize,
    /// States where `{∇H, ∇𝒩², ∇𝒩_Z}` had rank 3.
    pub rank3_count: usize,
    /// `rank3_count / states`.
    pub rank3_fraction: f64,
    /// Smallest σ₃/σ₁ ratio seen (row-normalized gradient matrix).
    pub min_rank_ratio: f64,
    /// States where the three pairwise brackets were evaluated.
    pub bracket_states: usize,
    /// Largest `|{H, 𝒩²}|` observed.
    pub max_bracket_h_nsq: f64,
    /// Largest `|{H, 𝒩_Z}|` observed.
    pub max_bracket_h_nz: f64,
    /// Largest `|{𝒩², 𝒩_Z}|` observed.
    pub max_bracket_nsq_nz: f64,
    /// Worst Richardson error estimate among the bracket gradients.
    pub max_gradient_error: f64,
}

/// Establishes, over a sample of planetocentric states, that
/// `(H, 𝒩², 𝒩_Z)` behaves as a complete independent involutive triple:
/// gradient rank 3 at (almost) every state, pairwise Poisson brackets at
/// zero within `1e-7`.
///
/// Rank statistics run at every state with plain central differences
/// (cheap, parallel); the more expensive Richardson brackets run on the
/// first `bracket_states` states only.
///
/// # Errors
/// Lift/Newton/accuracy failures from the underlying evaluations.
pub fn completeness_check(
    solver: &HjSolver,
    states: &[PlanetoState],
    bracket_states: usize,
) -> Result<CompletenessReport> {
    let mu = solver.params().mu;

    // ── gradient-independence sweep ─────────────────────────────────────
    let ratios: Vec<f64> = states
        .par_iter()
        .map(|state| -> Result<f64> {
            let chart = select_chart(state.x, state.y, state.z)?;
            // One warm ν̂ at the stencil center serves every node.
            let center = cartesian_integrals_in_chart(solver, state, chart, None)?;
            let x = state.to_array();
            let scales = encounter_scales(state);
            let triple = |p: &[f64]| -> Result<[f64; 3]> {
                let s = PlanetoState::from_array([p[0], p[1], p[2], p[3], p[4], p[5]]);
                let v = cartesian_integrals_in_chart(solver, &s, chart, Some(center.nu))?;
                Ok(v.components)
            };
            // Central differences of (𝒩², 𝒩_Z) from one sweep of triple
            // evaluations; ∇H is closed-form.
            let mut g_nsq = [0.0; 6];
            let mut g_nz = [0.0; 6];
            let mut work = x;
            for i in 0..6 {
                let h = scales[i];
                work[i] = x[i] + h;
                let cp = triple(&work)?;
                work[i] = x[i] - h;
                let cm = triple(&work)?;
                work[i] = x[i];
                let nsq = |c: &[f64; 3]| c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
                g_nsq[i] = (nsq(&cp) - nsq(&cm)) / (2.0 * h);
                g_nz[i] = (cp[2] - cm[2]) / (2.0 * h);
            }
            let g_h = ham_planeto_grad(state, mu);
            // Row-normalize: rank cares about directions, not magnitudes.
            let mut m = DMatrix::zeros(3, 6);
            for (row, g) in [g_h, g_nsq, g_nz].iter().enumerate() {
                let norm = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
                for col in 0..6 {
                    m[(row, col)] = g[col] / norm;
                }
            }
            let sv = m.svd(false, false).singular_values;
            let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
            let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            Ok(if smax > 0.0 { smin / smax } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    let rank3_count = ratios
        .iter()
        .filter(|&&r| r > tol::RANK_REL_CUTOFF)
        .count();
    let min_rank_ratio = ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));

    // ── involution sweep (Richardson brackets) ──────────────────────────
    let n_br = bracket_states.min(states.len());
    let brackets: Vec<(f64, f64, f64, f64)> = states[..n_br]
        .par_iter()
        .map(|state| -> Result<(f64, f64, f64, f64)> {
            let chart = select_chart(state.x, state.y, state.z)?;
            let center = cartesian_integrals_in_chart(solver, state, chart, None)?;
            let x = state.to_array();
            let scales = encounter_scales(state);
            let field = |which: IntegralComponent| {
                move |p: &[f64]| integral_component_at(solver, p, chart, which, Some(center.nu))
            };
            let g_h = GradientEstimate::exact(ham_planeto_grad(state, mu).to_vec());
            let g_nsq = richardson_gradient(field(IntegralComponent::NSq), &x, &scales)?;
            let g_nz = richardson_gradient(field(IntegralComponent::NZ), &x, &scales)?;
            let lim = tol::CHK_POISSON_INTEGRALS;
            let b1 = bracket_of_gradients(&g_h, &g_nsq, lim)?;
            let b2 = bracket_of_gradients(&g_h, &g_nz, lim)?;
            let b3 = bracket_of_gradients(&g_nsq, &g_nz, lim)?;
            let err = g_nsq.max_err().max(g_nz.max_err());
            Ok((b1.abs(), b2.abs(), b3.abs(), err))
        })
        .collect::<Result<Vec<_>>>()?;

    let fold_max = |sel: fn(&(f64, f64, f64, f64)) -> f64| {
        brackets.iter().map(sel).fold(0.0f64, f64::max)
    };
    Ok(CompletenessReport {
        states: states.len(),
        rank3_count,
        rank3_fraction: rank3_count as f64 / states.len().max(1) as f64,
        min_rank_ratio,
        bracket_states: n_br,
        max_bracket_h_nsq: fold_max(|t| t.0),
        max_bracket_h_nz: fold_max(|t| t.1),
        max_bracket_nsq_nz: fold_max(|t| t.2),
        max_gradient_error: fold_max(|t| t.3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::testutil::level_state;
    use crate::kscore::charts::{lift_default, phase_project};
    use crate::kscore::maps::bilinear;
    use crate::kscore::types::Params;

    fn solver(order: usize) -> HjSolver {
        HjSolver::new(Params::new(0.01, -1.8).unwrap(), order).unwrap()
    }

    #[test]
    fn richardson_gradient_nails_a_polynomial() {
        let f = |x: &[f64]| Ok(x[0] * x[0] * x[1] + 3.0 * x[1] - x[0]);
        let x = [1.3, -0.7];
        let est = richardson_gradient(f, &x, &default_scales(&x)).unwrap();
        let exact = [2.0 * x[0] * x[1] - 1.0, x[0] * x[0] + 3.0];
        assert!((est.grad[0] - exact[0]).abs() < 1e-10);
        assert!((est.grad[1] - exact[1]).abs() < 1e-10);
        assert!(est.max_err() < 1e-9);
    }

    #[test]
    fn richardson_error_estimate_covers_the_true_error() {
        // A function with strong higher derivatives: the estimate must
        // bound the actual extrapolation error (a-posteriori soundness).
        let f = |x: &[f64]| Ok((5.0 * x[0]).exp() * (3.0 * x[1]).sin());
        let x = [0.3, 0.7];
        let est = richardson_gradient(f, &x, &[1e-2, 1e-2]).unwrap();
        let e5 = (5.0 * x[0]).exp();
        let exact = [
            5.0 * e5 * (3.0 * x[1]).sin(),
            3.0 * e5 * (3.0 * x[1]).cos(),
        ];
        for i in 0..2 {
            let true_err = (est.grad[i] - exact[i]).abs();
            assert!(
                true_err <= est.err[i].max(1e-12),
                "component {i}: true error {true_err:e} vs estimate {:e}",
                est.err[i]
            );
        }
    }

    #[test]
    fn impossible_accuracy_demand_is_reported() {
        // exp has nonvanishing higher derivatives, so the Richardson
        // defect is positive and an absurd limit must trip the gate.
        let f = |x: &[f64]| Ok((3.0 * x[0]).exp());
        let g = |x: &[f64]| Ok((x[0] * x[0] + x[1]).sin());
        let x = [0.4, 0.9];
        match poisson_bracket(f, g, &x, &default_scales(&x), 1e-30) {
            Err(Error::DerivativeAccuracy { estimate, limit }) => {
                assert!(estimate > limit);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn projected_coordinates_are_canonical_pairs() {
        // {q̂ᵢ, p̂ⱼ} = δᵢⱼ on the KS phase space (dimension 8), evaluated
        // at a lifted physical state (ℓ = 0 there).
        let state = level_state(0.01, -1.8, [0.006, -0.004, 0.005], [0.3, 0.8, -0.52]);
        let (ks, _) = lift_default(&state).unwrap();
        let mut x = [0.0; 8];
        x[..4].copy_from_slice(&ks.u);
        x[4..].copy_from_slice(&ks.p);
        let scales = ks_scales(&ks, 0.01);
        let q_field = |i: usize| {
            move |p: &[f64]| -> Result<f64> {
                let s = KsState {
                    u: [p[0], p[1], p[2], p[3]],
                    p: [p[4], p[5], p[6], p[7]],
                };
                Ok(phase_project(&s)?.to_array()[i])
            }
        };
        let p_field = |j: usize| {
            move |p: &[f64]| -> Result<f64> {
                let s = KsState {
                    u: [p[0], p[1], p[2], p[3]],
                    p: [p[4], p[5], p[6], p[7]],
                };
                Ok(phase_project(&s)?.to_array()[3 + j])
            }
        };
        for i in 0..3 {
            for j in 0..3 {
                let val = poisson_bracket(q_field(i), p_field(j), &x, &scales, 1e-8).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (val - want).abs() < tol::CHK_POISSON_COORDS,
                    "{{q{i}, p{j}}} = {val}"
                );
            }
        }
    }

    #[test]
    fn projected_momenta_commute_on_the_bilinear_zero_set() {
        let state = level_state(0.01, -1.8, [0.004, 0.0055, -0.003], [-0.6, 0.25, 0.76]);
        let (ks, _) = lift_default(&state).unwrap();
        assert!(bilinear(&ks.u, &ks.p).abs() < 1e-14);
        let mut x = [0.0; 8];
        x[..4].copy_from_slice(&ks.u);
        x[4..].copy_from_slice(&ks.p);
        let scales = ks_scales(&ks, 0.01);
        let p_field = |j: usize| {
            move |p: &[f64]| -> Result<f64> {
                let s = KsState {
                    u: [p[0], p[1], p[2], p[3]],
                    p: [p[4], p[5], p[6], p[7]],
                };
                Ok(phase_project(&s)?.to_array()[3 + j])
            }
        };
        for i in 0..3 {
            for j in (i + 1)..3 {
                let val = poisson_bracket(p_field(i), p_field(j), &x, &scales, 1e-8).unwrap();
                assert!(
                    val.abs() < tol::CHK_POISSON_COORDS,
                    "{{p{i}, p{j}}} = {val}"
                );
            }
        }
    }

    #[test]
    fn hamiltonian_commutes_with_the_cartesian_integrals() {
        // Near a collision ∂H/∂q ~ μ/r² is enormous, so the state sits at
        // a radius where the series truncation bias is far below the
        // bracket budget (|u| ≈ 0.032 at order 16), ∇H is analytic, and
        // the integral gradients use encounter-adapted steps.
        let sv = solver(16);
        let state = level_state(0.01, -1.8, [6e-4, 4.5e-4, -5.5e-4], [0.45, -0.35, 0.82]);
        let chart = select_chart(state.x, state.y, state.z).unwrap();
        let center = cartesian_integrals_in_chart(&sv, &state, chart, None).unwrap();
        let x = state.to_array();
        let scales = encounter_scales(&state);
        let g_h = GradientEstimate::exact(ham_planeto_grad(&state, 0.01).to_vec());
        for which in [IntegralComponent::NSq, IntegralComponent::NZ] {
            let g_n = richardson_gradient(
                |p: &[f64]| integral_component_at(&sv, p, chart, which, Some(center.nu)),
                &x,
                &scales,
            )
            .unwrap();
            let val =
                bracket_of_gradients(&g_h, &g_n, tol::CHK_POISSON_INTEGRALS).unwrap();
            assert!(
                val.abs() < tol::CHK_POISSON_INTEGRALS,
                "{{H, {which:?}}} = {val:e}"
            );
        }
    }

    #[test]
    fn canonical_map_is_symplectic() {
        let sv = solver(10);
        let state = level_state(0.01, -1.8, [0.005, -0.0035, 0.004], [0.2, 0.75, -0.63]);
        let (ks, _) = lift_default(&state).unwrap();
        let defect = symplectic_defect(&sv, &ks).unwrap();
        assert!(defect < tol::CHK_SYMPLECTIC, "defect {defect:e}");
    }

    #[test]
    fn asymptote_manifold_jacobian_has_full_rank() {
        let sv = solver(8);
        for seed in 0..5u64 {
            let raw = [
                (seed as f64 * 0.713).sin(),
                (seed as f64 * 1.31 + 0.4).cos(),
                (seed as f64 * 0.47 - 1.1).sin(),
                (seed as f64 * 2.17 + 0.9).cos(),
            ];
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nu: [f64; 4] = std::array::from_fn(|j| raw[j] / norm);
            let sol = sv.complete_integral(&nu).unwrap();
            let frame = EncounterFrame::from_solver(&sv, &sol).unwrap();
            let (rank, ratio) = prop5_rank(&frame).unwrap();
            assert_eq!(rank, 5, "nu {nu:?}, ratio {ratio:e}");
        }
    }

    #[test]
    fn completeness_holds_on_a_small_sample() {
        let sv = solver(6);
        let mut states = Vec::new();
        for k in 0..12 {
            let a = 0.9 * k as f64 + 0.3;
            let pos = [
                0.006 * a.sin() + 0.002,
                0.005 * (1.7 * a).cos(),
                0.004 * (0.9 * a + 1.0).sin(),
            ];
            let aim = [(2.0 * a).cos(), (1.3 * a).sin(), (0.7 * a + 0.5).cos()];
            states.push(level_state(0.01, -1.8, pos, aim));
        }
        let report = completeness_check(&sv, &states, 0).unwrap();
        assert_eq!(report.rank3_count, report.states);
        assert!(report.rank3_fraction >= 0.99);
        assert!(report.min_rank_ratio > tol::RANK_REL_CUTOFF);
    }
}
