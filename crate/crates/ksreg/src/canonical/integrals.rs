//! First integrals of the close-encounter dynamics, in both the
//! transformed variables and the original Cartesian ones.
//!
//! # The bilinear integrals
//!
//! In the conjugate variables `(n, ν)` produced by the canonical map, the
//! regularized Hamiltonian is `μ(‖ν‖² − 1)`: every `ν`-component is
//! constant and `n` drifts linearly along `ν`. Any antisymmetric bilinear
//! form in `(n, ν)` whose `n`-direction is killed by the drift is then a
//! first integral. The three used throughout are
//!
//! ```text
//!   N_X = ν₁ n₄ − ν₄ n₁
//!   N_Y = ½ (ν₁ n₃ − n₁ ν₃ + n₂ ν₄ − n₄ ν₂)
//!   N_Z = ½ (ν₁ n₂ − n₁ ν₂ + n₄ ν₃ − n₃ ν₄)
//! ```
//!
//! Each is exactly constant along `n(s) = n(0) + 2μ ν s` (the increment
//! cancels by antisymmetry) and invariant under the simultaneous fiber
//! rotation `(n, ν) ↦ (S⁰_α n, S⁰_α ν)` — the gauge freedom of the KS
//! lift. That invariance is what makes the *Cartesian* representatives
//! below well defined: the two atlas charts differ exactly by such a
//! rotation, so both produce the same numbers.
//!
//! # Cartesian representatives
//!
//! [`cartesian_integrals`] evaluates the triple as functions of the
//! planetocentric state: lift through an atlas chart, recover `ν̂` by
//! nonlinear inversion, evaluate `n̂ = ∂W/∂ν`, and combine. Near the
//! collision the triple limits onto (minus) the angular momentum about the
//! secondary: `𝒩_Z = P_X·Y − P_Y·X + O(r^{3/2})` as the planetocentric
//! radius `r → 0`, which is the quantitative content of the small-radius
//! test below.

use crate::canonical::chi4::chi4;
use crate::canonical::nu::nu_hat_guided;
use crate::error::{Error, Result};
use crate::hjsolver::HjSolver;
use crate::kscore::charts::chart_lift;
use crate::kscore::ham::ham_planeto;
use crate::kscore::types::{Chart, PlanetoState};
use crate::tol;

/// The antisymmetric first-integral triple `(N_X, N_Y, N_Z)` in the
/// transformed variables.
///
/// Pure arithmetic: no series evaluation, no error paths.
pub fn first_integrals_nnu(n: &[f64; 4], nu: &[f64; 4]) -> [f64; 3] {
    let n_x = nu[0] * n[3] - nu[3] * n[0];
    let n_y = 0.5 * (nu[0] * n[2] - n[0] * nu[2] + n[1] * nu[3] - n[3] * nu[1]);
    let n_z = 0.5 * (nu[0] * n[1] - n[0] * nu[1] + n[3] * nu[2] - n[2] * nu[3]);
    [n_x, n_y, n_z]
}

/// First-integral values of one planetocentric state, with provenance.
#[derive(Clone, Copy, Debug)]
pub struct FirstIntegralTriple {
    /// Energy `H` of the state (closed form, chart-independent).
    pub h: f64,
    /// `𝒩² = N_X² + N_Y² + N_Z²`.
    pub n_sq: f64,
    /// `𝒩_Z`.
    pub n_z: f64,
    /// The raw components `(N_X, N_Y, N_Z)`.
    pub components: [f64; 3],
    /// Chart whose lift produced `components`.
    pub chart: Chart,
    /// When both charts are admissible at the state: the largest
    /// component-wise difference between their values. `None` when only
    /// one chart applies.
    pub discrepancy: Option<f64>,
}

/// Result of evaluating the triple through one specific chart.
#[derive(Clone, Copy, Debug)]
pub struct ChartIntegrals {
    /// The components `(N_X, N_Y, N_Z)`.
    pub components: [f64; 3],
    /// Recovered asymptote parameter `ν̂`.
    pub nu: [f64; 4],
    /// Conjugate coordinates `n̂`.
    pub n: [f64; 4],
    /// Newton iterations spent recovering `ν̂` (0 on a warm hit).
    pub iters: usize,
}

/// Evaluates the first-integral components of `state` through `chart`,
/// optionally warm-starting the `ν̂` inversion (drivers walking along a
/// trajectory reuse the previous `ν̂`).
///
/// # Errors
/// [`Error::ChartUndefined`] when the chart does not cover the state;
/// [`Error::DomainExceeded`] outside the trusted ball; Newton failures
/// from the `ν̂` recovery.
pub fn cartesian_integrals_in_chart(
    solver: &HjSolver,
    state: &PlanetoState,
    chart: Chart,
    guess: Option<[f64; 4]>,
) -> Result<ChartIntegrals> {
    let ks = chart_lift(state, chart)?;
    let nu_solve = nu_hat_guided(solver, &ks, guess)?;
    let sol = solver.complete_integral(&nu_solve.nu)?;
    let frame = crate::canonical::frame::EncounterFrame::from_solver(solver, &sol)?;
    let n = frame.n_of_u(&ks.u)?;
    Ok(ChartIntegrals {
        components: first_integrals_nnu(&n, &nu_solve.nu),
        nu: nu_solve.nu,
        n,
        iters: nu_solve.iters,
    })
}

/// Evaluates the globally defined Cartesian first integrals
/// `(H, 𝒩², 𝒩_Z)` at a planetocentric state near the secondary.
///
/// Both atlas charts are tried. Where both apply their values agree up to
/// the nonlinear-solve tolerance (the chart transition is a fiber rotation
/// and the triple is fiber-invariant); the `+X` value is returned and the
/// observed difference is recorded as a diagnostic.
///
/// # Errors
/// [`Error::DomainExceeded`] when the state lies outside the trusted
/// ball; [`Error::ChartUndefined`] only in the impossible case that
/// neither chart covers the state (their bad sets intersect solely at the
/// collision, which the ball check already excludes); Newton failures
/// from the `ν̂` recovery.
pub fn cartesian_integrals(solver: &HjSolver, state: &PlanetoState) -> Result<FirstIntegralTriple> {
    let u_radius = state.radius().sqrt();
    if u_radius > tol::TRUST_RADIUS {
        return Err(Error::DomainExceeded {
            radius: u_radius,
            limit: tol::TRUST_RADIUS,
        });
    }
    let h = ham_planeto(state, solver.params().mu);

    let plus = match cartesian_integrals_in_chart(solver, state, Chart::PlusX, None) {
        Ok(v) => Some(v),
        Err(Error::ChartUndefined { .. }) => None,
        Err(e) => return Err(e),
    };
    let minus = match cartesian_integrals_in_chart(solver, state, Chart::MinusX, None) {
        Ok(v) => Some(v),
        Err(Error::ChartUndefined { .. }) => None,
        Err(e) => return Err(e),
    };

    let (primary, chart, discrepancy) = match (plus, minus) {
        (Some(p), Some(m)) => {
            let gap = (0..3)
                .map(|j| (p.components[j] - m.components[j]).abs())
                .fold(0.0f64, f64::max);
            (p, Chart::PlusX, Some(gap))
        }
        (Some(p), None) => (p, Chart::PlusX, None),
        (None, Some(m)) => (m, Chart::MinusX, None),
        (None, None) => {
            return Err(Error::ChartUndefined {
                chart: Chart::PlusX.name(),
                x: state.x,
                y: state.y,
                z: state.z,
            })
        }
    };
    let c = primary.components;
    Ok(FirstIntegralTriple {
        h,
        n_sq: c[0] * c[0] + c[1] * c[1] + c[2] * c[2],
        n_z: c[2],
        components: c,
        chart,
        discrepancy,
    })
}

/// Convenience wrapper of [`chi4`] returning only what the first-integral
/// drivers need: `(n, ν)` of a KS state.
///
/// # Errors
/// As [`chi4`].
pub fn conjugate_pair(
    solver: &HjSolver,
    state: &crate::kscore::types::KsState,
) -> Result<([f64; 4], [f64; 4])> {
    let (aa, _, _) = chi4(solver, state)?;
    Ok((aa.n, aa.nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::testutil::level_state;
    use crate::kscore::maps::fiber_rotation;
    use crate::kscore::types::Params;
    use crate::linalg::matvec4;

    fn solver(order: usize) -> HjSolver {
        HjSolver::new(Params::new(0.01, -1.8).unwrap(), order).unwrap()
    }

    #[test]
    fn equal_arguments_annihilate_the_triple() {
        let n = [0.3, -1.2, 0.7, 2.01];
        let vals = first_integrals_nnu(&n, &n);
        assert_eq!(vals, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn fiber_rotation_leaves_the_triple_unchanged() {
        let n = [0.11, -0.52, 0.83, 0.24];
        let nu = [0.96, 0.12, -0.2, 0.14];
        let base = first_integrals_nnu(&n, &nu);
        for k in 0..12 {
            let alpha = 0.5231 * k as f64 - 2.9;
            let s0 = fiber_rotation(alpha);
            let rot = first_integrals_nnu(&matvec4(&s0, &n), &matvec4(&s0, &nu));
            for j in 0..3 {
                assert!(
                    (rot[j] - base[j]).abs() < 1e-12,
                    "alpha {alpha}, component {j}: {} vs {}",
                    rot[j],
                    base[j]
                );
            }
        }
    }

    #[test]
    fn linear_drift_along_nu_is_invisible() {
        let n = [0.31, 0.12, -0.73, 0.05];
        let nu = [0.8, -0.3, 0.42, 0.27];
        let base = first_integrals_nnu(&n, &nu);
        for &s in &[0.1, -2.0, 17.5, 1e4] {
            let shifted: [f64; 4] = std::array::from_fn(|j| n[j] + 2.0 * 0.01 * nu[j] * s);
            let vals = first_integrals_nnu(&shifted, &nu);
            let scale = 1.0 + s.abs();
            for j in 0..3 {
                assert!(
                    (vals[j] - base[j]).abs() < 1e-13 * scale,
                    "s {s}, component {j}"
                );
            }
        }
    }

    #[test]
    fn both_charts_report_the_same_cartesian_integrals() {
        let sv = solver(8);
        let states = [
            level_state(0.01, -1.8, [0.002, 0.0015, -0.001], [0.3, -0.5, 0.8]),
            level_state(0.01, -1.8, [-0.001, 0.003, 0.002], [-0.1, 0.4, 0.9]),
            level_state(0.01, -1.8, [0.0, 0.004, -0.0025], [0.7, 0.1, -0.6]),
        ];
        for state in &states {
            let triple = cartesian_integrals(&sv, state).unwrap();
            let gap = triple
                .discrepancy
                .expect("off-axis states admit both charts");
            assert!(
                gap < tol::CHK_CHART_CONSISTENCY,
                "chart discrepancy {gap:e}"
            );
            assert_eq!(triple.chart, Chart::PlusX);
            assert!((triple.h - -1.8).abs() < 1e-12);
        }
    }

    #[test]
    fn small_radius_defect_of_nz_scales_superlinearly() {
        // 𝒩_Z approaches P_X·Y − P_Y·X as r → 0 with an O(r^{3/2})
        // remainder; a log-log fit over three decades must show an
        // exponent comfortably above 1.
        let sv = solver(8);
        let dir = [0.41, 0.66, -0.63];
        let aim = [-0.35, 0.2, 0.45];
        let mut pts = Vec::new();
        for &r in &[1e-5f64, 1e-4, 1e-3] {
            let pos = [dir[0] * r, dir[1] * r, dir[2] * r];
            let state = level_state(0.01, -1.8, pos, aim);
            let triple = cartesian_integrals(&sv, &state).unwrap();
            let l_z = state.px * state.y - state.py * state.x;
            let defect = (triple.n_z - l_z).abs();
            assert!(defect > 0.0, "defect vanished at r = {r}");
            pts.push((r.ln(), defect.ln()));
        }
        let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
        assert!(
            slope >= tol::CHK_SLOPE_MIN,
            "small-radius exponent {slope} below {}",
            tol::CHK_SLOPE_MIN
        );
    }

    #[test]
    fn integrals_are_constant_along_an_integrated_trajectory() {
        use crate::dynamics::fields::CartField;
        use crate::dynamics::rk::Dopri5;
        use crate::kscore::ham::ham_planeto;

        // A trajectory that *stays* in the region where the series is
        // accurate: an inclined near-circular orbit around the secondary,
        // deep inside its Hill sphere (r₀ ≈ 1e-3 vs r_Hill ≈ 0.15). The
        // planetocentric radius then holds near r₀ for a full period and
        // the drift measures genuine conservation, not series truncation
        // at radii the trajectory was never supposed to visit.
        let mu = 0.01f64;
        let r0 = 1.05e-3;
        let v_c = (mu / r0).sqrt();
        let incl = 0.35f64;
        // Rotating-frame momenta: p = v + (−y, x, 0) at position (r₀,0,0).
        let state = PlanetoState {
            x: r0,
            y: 0.0,
            z: 0.0,
            px: 0.0,
            py: v_c * incl.cos() + r0,
            pz: v_c * incl.sin(),
        };
        let energy = ham_planeto(&state, mu);
        let sv = HjSolver::new(Params::new(mu, energy).unwrap(), 12).unwrap();
        let field = CartField::full(mu);
        let integ = Dopri5::default();
        let base = cartesian_integrals(&sv, &state).unwrap();
        // One orbital period is 2π√(r₀³/μ) ≈ 2.1e-3.
        let span = 4.4e-4;
        let mut y = state.to_array();
        let mut t = 0.0;
        for _ in 0..5 {
            let traj = integ.integrate(&field, t, &y, t + span).unwrap();
            t = traj.t_end;
            y = traj.y_end;
            let here_state = PlanetoState::from_array(y);
            let r = here_state.radius();
            assert!(
                (0.8 * r0..1.25 * r0).contains(&r),
                "orbit left the calibrated shell: r = {r:e} at t = {t}"
            );
            let here = cartesian_integrals(&sv, &here_state).unwrap();
            assert!(
                (here.n_sq - base.n_sq).abs() < tol::CHK_INTEGRAL_DRIFT,
                "n_sq drift {:e} at t = {t}",
                here.n_sq - base.n_sq
            );
            assert!(
                (here.n_z - base.n_z).abs() < tol::CHK_INTEGRAL_DRIFT,
                "n_z drift {:e} at t = {t}",
                here.n_z - base.n_z
            );
        }
    }
}
