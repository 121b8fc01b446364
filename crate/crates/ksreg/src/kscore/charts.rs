//! KS chart sections, chart transitions, and phase-space projection.
//!
//! The KS projection `π` is 1-to-circle, so lifting a spatial state needs a
//! *section*. Two sections cover `R³ ∖ {0}`:
//!
//! ```text
//!   +X chart (valid for r + X > 0):
//!       u = ( √((r+X)/2),  Y/√(2(r+X)),  Z/√(2(r+X)),  0 )
//!   −X chart (valid for r − X > 0):
//!       u = ( Y/√(2(r−X)),  √((r−X)/2),  0,  Z/√(2(r−X)) )
//! ```
//!
//! Either way the momentum lift is `p = 2 Aᵀ(u) (P, 0)`, which automatically
//! satisfies the fiber condition `ℓ(u, p) = 0`, and the inverse is the phase
//! projection `P = A(u) p / (2|u|²)` (whose fourth component is `ℓ(u,p)/|u|²`,
//! zero on physical states).
//!
//! Two lifts of the same spatial state differ by a fiber rotation `S⁰_α`; the
//! angle is recovered by [`transition_angle_between`]. The **default chart
//! rule** used across the crate picks `+X` when `X > 0`, `−X` when `X < 0`,
//! and `+X` on the plane `X = 0` away from the origin.
//!
//! The planar Levi-Civita (LC) analog — `(X, Y) = (u₁² − u₂², 2u₁u₂)`, i.e.
//! complex squaring — is provided for the planar pipeline: [`lc_lift`] uses
//! the principal branch (`u₁ ≥ 0`, `sign(u₂) = sign(Y)`).

use crate::error::{Error, Result};
use crate::kscore::maps::{bilinear, fiber_rotation, ks_matrix, ks_project};
use crate::kscore::types::{Chart, KsState, PlanetoState};
use crate::linalg::{matvec4, norm2_4, transpose4};

/// Applies the default chart rule to a planetocentric position.
///
/// # Errors
/// [`Error::ChartUndefined`] at the origin (the collision point has no lift).
pub fn select_chart(x: f64, y: f64, z: f64) -> Result<Chart> {
    if x > 0.0 {
        Ok(Chart::PlusX)
    } else if x < 0.0 {
        Ok(Chart::MinusX)
    } else if y != 0.0 || z != 0.0 {
        Ok(Chart::PlusX)
    } else {
        Err(Error::ChartUndefined {
            chart: Chart::PlusX.name(),
            x,
            y,
            z,
        })
    }
}

/// Lifts a planetocentric state to the KS phase space through the given
/// chart section.
///
/// # Errors
/// [`Error::ChartUndefined`] when the position lies on the chart's excluded
/// half-line (including the origin).
pub fn chart_lift(state: &PlanetoState, chart: Chart) -> Result<KsState> {
    let r = state.radius();
    let u = match chart {
        Chart::PlusX => {
            let d = r + state.x;
            if d <= 0.0 {
                return Err(Error::ChartUndefined {
                    chart: chart.name(),
                    x: state.x,
                    y: state.y,
                    z: state.z,
                });
            }
            let s = (0.5 * d).sqrt();
            let inv = 1.0 / (2.0 * d).sqrt();
            [s, state.y * inv, state.z * inv, 0.0]
        }
        Chart::MinusX => {
            let d = r - state.x;
            if d <= 0.0 {
                return Err(Error::ChartUndefined {
                    chart: chart.name(),
                    x: state.x,
                    y: state.y,
                    z: state.z,
                });
            }
            let s = (0.5 * d).sqrt();
            let inv = 1.0 / (2.0 * d).sqrt();
            [state.y * inv, s, 0.0, state.z * inv]
        }
    };
    // Momentum lift p = 2 Aᵀ(u) (P, 0).
    let at = transpose4(&ks_matrix(&u));
    let pp = [state.px, state.py, state.pz, 0.0];
    let mut p = matvec4(&at, &pp);
    for pi in &mut p {
        *pi *= 2.0;
    }
    Ok(KsState { u, p })
}

/// Lifts through the default chart rule, returning the chart used.
///
/// # Errors
/// [`Error::ChartUndefined`] at the origin.
pub fn lift_default(state: &PlanetoState) -> Result<(KsState, Chart)> {
    let chart = select_chart(state.x, state.y, state.z)?;
    Ok((chart_lift(state, chart)?, chart))
}

/// Projects a KS state back to the planetocentric chart:
/// `position = π(u)`, `P = A(u) p / (2|u|²)`.
///
/// The fourth component of `A(u) p` equals `ℓ(u, p)` and is discarded; on
/// physical states it vanishes.
///
/// # Errors
/// [`Error::InvalidParameter`] at `u = 0` (no projection of the collision).
pub fn phase_project(state: &KsState) -> Result<PlanetoState> {
    let n2 = norm2_4(&state.u);
    if n2 == 0.0 {
        return Err(Error::InvalidParameter(
            "phase projection at u = 0 (collision point)".into(),
        ));
    }
    let q = ks_project(&state.u);
    let ap = matvec4(&ks_matrix(&state.u), &state.p);
    let inv = 0.5 / n2;
    Ok(PlanetoState {
        x: q[0],
        y: q[1],
        z: q[2],
        px: ap[0] * inv,
        py: ap[1] * inv,
        pz: ap[2] * inv,
    })
}

/// Recovers the fiber angle `α` with `u_to = S⁰_α u_from`:
/// `α = atan2(⟨u_to, Ω u_from⟩, ⟨u_to, u_from⟩)`.
///
/// Finite for any pair of nonzero spinors on the same fiber; for spinors on
/// *different* fibers it returns the best-aligning angle (callers that need
/// an exact transition verify the projections agree beforehand).
pub fn transition_angle_between(u_from: &[f64; 4], u_to: &[f64; 4]) -> f64 {
    // ⟨u_to, Ω u_from⟩ = ℓ(u_to, u_from) with our sign convention for Ω.
    let omega_u: [f64; 4] = [-u_from[3], u_from[2], -u_from[1], u_from[0]];
    let sin_part: f64 = u_to.iter().zip(&omega_u).map(|(a, b)| a * b).sum();
    let cos_part: f64 = u_to.iter().zip(u_from).map(|(a, b)| a * b).sum();
    sin_part.atan2(cos_part)
}

/// Applies a fiber rotation to a full KS state (positions and momenta rotate
/// with the same orthogonal matrix, which is symplectic on the fiber).
pub fn rotate_fiber(state: &KsState, alpha: f64) -> KsState {
    let s = fiber_rotation(alpha);
    KsState {
        u: matvec4(&s, &state.u),
        p: matvec4(&s, &state.p),
    }
}

// ───────────────────────── planar Levi-Civita ─────────────────────────

/// The LC projection `(X, Y) = (u₁² − u₂², 2 u₁ u₂)` (complex squaring).
#[inline]
pub fn lc_project(u: &[f64; 2]) -> [f64; 2] {
    [u[0] * u[0] - u[1] * u[1], 2.0 * u[0] * u[1]]
}

/// Lifts a planar state `(X, Y, P_X, P_Y)` through the principal LC branch:
/// `u₁ = √((r+X)/2) ≥ 0`, `u₂ = sign(Y) √((r−X)/2)` (with `sign(0) = +1`),
/// and `U = 2 A₂ᵀ(u) P` for the 2 × 2 matrix `A₂ = [[u₁, −u₂], [u₂, u₁]]`.
///
/// # Errors
/// [`Error::ChartUndefined`] at the origin.
pub fn lc_lift(x: f64, y: f64, px: f64, py: f64) -> Result<([f64; 2], [f64; 2])> {
    let r = (x * x + y * y).sqrt();
    if r == 0.0 {
        return Err(Error::ChartUndefined {
            chart: "LC",
            x,
            y,
            z: 0.0,
        });
    }
    let u1 = (0.5 * (r + x)).sqrt();
    let u2_mag = (0.5 * (r - x)).max(0.0).sqrt();
    let u2 = if y < 0.0 { -u2_mag } else { u2_mag };
    let u = [u1, u2];
    let uu = [
        2.0 * (u1 * px + u2 * py),
        2.0 * (-u2 * px + u1 * py),
    ];
    Ok((u, uu))
}

/// Projects a planar LC state back: `(X, Y) = lc_project(u)`,
/// `P = A₂(u) U / (2|u|²)`.
///
/// # Errors
/// [`Error::InvalidParameter`] at `u = 0`.
pub fn lc_phase_project(u: &[f64; 2], uu: &[f64; 2]) -> Result<[f64; 4]> {
    let n2 = u[0] * u[0] + u[1] * u[1];
    if n2 == 0.0 {
        return Err(Error::InvalidParameter(
            "LC projection at u = 0 (collision point)".into(),
        ));
    }
    let q = lc_project(u);
    let inv = 0.5 / n2;
    let px = (u[0] * uu[0] - u[1] * uu[1]) * inv;
    let py = (u[1] * uu[0] + u[0] * uu[1]) * inv;
    Ok([q[0], q[1], px, py])
}

/// Sanity accessor used by tests and diagnostics: the lift's fiber defect
/// `ℓ(u, p)`, which must vanish for lifted states.
pub fn lift_bilinear_defect(state: &KsState) -> f64 {
    bilinear(&state.u, &state.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_planeto(rng: &mut StdRng) -> PlanetoState {
        PlanetoState {
            x: rng.gen_range(-1.0..1.0),
            y: rng.gen_range(-1.0..1.0),
            z: rng.gen_range(-1.0..1.0),
            px: rng.gen_range(-2.0..2.0),
            py: rng.gen_range(-2.0..2.0),
            pz: rng.gen_range(-2.0..2.0),
        }
    }

    #[test]
    fn lift_project_round_trips_in_both_charts() {
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..200 {
            let s = random_planeto(&mut rng);
            for chart in [Chart::PlusX, Chart::MinusX] {
                let lifted = match chart_lift(&s, chart) {
                    Ok(l) => l,
                    Err(_) => continue, // excluded half-line
                };
                // Fiber condition holds exactly by construction.
                assert!(lift_bilinear_defect(&lifted).abs() < 1e-12);
                let back = phase_project(&lifted).unwrap();
                for (a, b) in back.to_array().iter().zip(s.to_array()) {
                    assert!((a - b).abs() < 1e-11, "chart {chart:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn chart_rule_matches_its_specification() {
        assert_eq!(select_chart(0.5, 0.0, 0.0).unwrap(), Chart::PlusX);
        assert_eq!(select_chart(-0.5, 0.1, 0.0).unwrap(), Chart::MinusX);
        assert_eq!(select_chart(0.0, 0.2, 0.0).unwrap(), Chart::PlusX);
        assert_eq!(select_chart(0.0, 0.0, -0.3).unwrap(), Chart::PlusX);
        assert!(select_chart(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn both_charts_agree_up_to_a_fiber_rotation_on_the_overlap() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let mut s = random_planeto(&mut rng);
            s.x *= 0.3; // keep well inside the overlap
            if s.radius() < 1e-3 {
                continue;
            }
            let a = chart_lift(&s, Chart::PlusX).unwrap();
            let b = chart_lift(&s, Chart::MinusX).unwrap();
            let alpha = transition_angle_between(&a.u, &b.u);
            let rotated = rotate_fiber(&a, alpha);
            for i in 0..4 {
                assert!(
                    (rotated.u[i] - b.u[i]).abs() < 1e-10,
                    "u mismatch after transition"
                );
                assert!(
                    (rotated.p[i] - b.p[i]).abs() < 1e-9,
                    "p mismatch after transition"
                );
            }
        }
    }

    #[test]
    fn lc_lift_round_trips_on_the_principal_branch() {
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..200 {
            let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (px, py) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (u, uu) = lc_lift(x, y, px, py).unwrap();
            assert!(u[0] >= 0.0);
            let back = lc_phase_project(&u, &uu).unwrap();
            for (a, b) in back.iter().zip([x, y, px, py]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
