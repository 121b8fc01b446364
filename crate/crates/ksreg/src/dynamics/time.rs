//! The regularized-to-physical time map and its adaptive quadrature.
//!
//! The regularizing change of independent variable is
//!
//! ```text
//!     dt = |u(s)|² ds ,      t(s) = ∫₀ˢ |u(σ)|² dσ ,
//! ```
//!
//! so recovering the physical epoch along an arc given only `s ↦ u(s)` is a
//! one-dimensional quadrature. Two producers use it:
//!
//! * the analytic close-encounter propagator, whose `u(s)` comes from the
//!   generating-series flow and is smooth but only available pointwise, and
//! * [`physical_time`], which re-derives the time column of a numerically
//!   integrated regularized trajectory *independently* of the integrator's
//!   own `dt/ds` quadrature variable — a cross-check used by the suites.
//!
//! The engine is an adaptive Gauss(7)/Kronrod(15) rule: each panel is
//! estimated with both embedded rules, and panels whose discrepancy exceeds
//! the tolerance are bisected. The integrands here are analytic, so the
//! subdivision depth stays tiny; the cap only guards against misuse.

use crate::dynamics::fields::KsField;
use crate::dynamics::rk::{Dopri5, Trajectory};
use crate::error::{Error, Result};
use crate::tol;

// ─────────────────── Gauss(7)/Kronrod(15) node set ───────────────────
//
// Classical 15-point Kronrod extension of the 7-point Gauss–Legendre rule
// on [−1, 1]. Nodes are symmetric; the positive half is stored. The Gauss
// nodes are the odd-indexed Kronrod nodes.

/// Kronrod abscissae (non-negative half, descending).
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching [`XK`].
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Gauss weights for the odd-indexed Kronrod abscissae (descending).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod panel: returns `(K15 value, |K15 − G7|)`.
fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let (fp, fm);
        if XK[i] == 0.0 {
            fp = f(c)?;
            fm = 0.0;
        } else {
            fp = f(c + h * XK[i])?;
            fm = f(c - h * XK[i])?;
        }
        let pair = fp + fm;
        kron += WK[i] * pair;
        // Odd indices (and the centre, index 7) are the embedded Gauss
        // nodes; even indices are Kronrod-only.
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok((kron * h, (kron - gauss).abs() * h.abs()))
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`.
///
/// Bisects panels until the embedded error estimate satisfies
/// `err ≤ max(abs_tol, rel_tol · |integral so far|)` panel-proportionally.
/// The integrand may fail (e.g. a nonlinear solve behind it diverges); the
/// failure propagates. Subdivision beyond `2¹⁵` panels raises
/// [`Error::MaxSteps`].
pub fn quad_adaptive<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    // Step 1: whole-interval estimate seeds the work stack.
    let (v0, e0) = gk15(&mut f, a, b)?;
    let mut total = v0;
    let mut stack: Vec<(f64, f64, f64, f64)> = vec![(a, b, v0, e0)];
    let mut panels = 1_usize;
    const MAX_PANELS: usize = 1 << 15;

    while let Some((pa, pb, pv, pe)) = stack.pop() {
        let width_frac = ((pb - pa) / (b - a)).abs();
        let budget = (rel_tol * total.abs()).max(abs_tol) * width_frac.max(1e-12);
        if pe <= budget {
            continue;
        }
        if panels >= MAX_PANELS {
            return Err(Error::MaxSteps(MAX_PANELS));
        }
        // Step 2: bisect the offending panel and replace its contribution.
        let pm = 0.5 * (pa + pb);
        let (vl, el) = gk15(&mut f, pa, pm)?;
        let (vr, er) = gk15(&mut f, pm, pb)?;
        total += vl + vr - pv;
        panels += 1;
        stack.push((pa, pm, vl, el));
        stack.push((pm, pb, vr, er));
    }
    if !total.is_finite() {
        return Err(Error::NonFinite {
            context: "adaptive quadrature".into(),
        });
    }
    Ok(total)
}

/// Physical elapsed time along a pointwise-known regularized arc:
/// `t(s) = ∫₀ˢ |u(σ)|² dσ` with `u` supplied by the callback.
pub fn elapsed_time<F>(mut u_of_s: F, s: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<[f64; 4]>,
{
    quad_adaptive(
        |sigma| {
            let u = u_of_s(sigma)?;
            Ok(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3])
        },
        0.0,
        s,
        tol::QUAD_REL_TOL,
        tol::QUAD_ABS_TOL,
    )
}

/// Physical epochs at the arc parameters `s_grid` along a numerically
/// integrated regularized trajectory, recomputed by adaptive quadrature of
/// `|u(s)|²` (independent of the trajectory's own time column).
///
/// `s_grid` must be increasing and start at the trajectory's initial `s`;
/// the returned vector is the cumulative, strictly monotone time map with
/// `t(s₀) = 0`.
pub fn physical_time(
    traj: &Trajectory<9>,
    integ: &Dopri5,
    field: &KsField,
    s_grid: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(s_grid.len());
    let mut t_acc = 0.0;
    let mut s_prev = traj.t_start();
    for &s in s_grid {
        if s < s_prev {
            return Err(Error::InvalidParameter(
                "time-map grid must be increasing".into(),
            ));
        }
        let seg = quad_adaptive(
            |sigma| {
                let y = traj.sample(integ, field, sigma)?;
                Ok(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3])
            },
            s_prev,
            s,
            tol::QUAD_REL_TOL,
            tol::QUAD_ABS_TOL,
        )?;
        t_acc += seg;
        out.push(t_acc);
        s_prev = s;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Polynomials up to degree 10 are integrated to machine precision
    /// (K15 is exact through degree 22, so adaptivity never triggers).
    #[test]
    fn polynomials_are_exact() {
        for k in 0..=10_u32 {
            let v = quad_adaptive(|x| Ok(x.powi(k as i32)), 0.0, 1.0, 1e-13, 1e-15).unwrap();
            let exact = 1.0 / f64::from(k + 1);
            assert!((v - exact).abs() < 1e-14, "k = {k}: {v} vs {exact}");
        }
    }

    /// A classic smooth integral and a reversed-orientation variant.
    #[test]
    fn smooth_integrals_match_closed_forms() {
        let v = quad_adaptive(|x| Ok(x.sin()), 0.0, std::f64::consts::PI, 1e-13, 1e-15).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = quad_adaptive(|x| Ok(x.sin()), std::f64::consts::PI, 0.0, 1e-13, 1e-15).unwrap();
        assert!((v + 2.0).abs() < 1e-13);
        let v = quad_adaptive(|x| Ok((-x).exp()), 0.0, 30.0, 1e-13, 1e-15).unwrap();
        assert!((v - 1.0).abs() < 5e-13, "{v}");
    }

    /// A near-singular integrand forces subdivision and still converges.
    #[test]
    fn adaptivity_handles_boundary_layers() {
        let eps = 1e-4;
        let v = quad_adaptive(|x| Ok(1.0 / (x + eps).sqrt()), 0.0, 1.0, 1e-12, 1e-15).unwrap();
        let exact = 2.0 * ((1.0 + eps).sqrt() - eps.sqrt());
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    /// Integrand failures propagate instead of being swallowed.
    #[test]
    fn integrand_errors_propagate() {
        let res = quad_adaptive(
            |x| {
                if x > 0.5 {
                    Err(crate::error::Error::NewtonDiverged {
                        what: "synthetic integrand failure",
                        residual: 1.0,
                        iters: 1,
                    })
                } else {
                    Ok(1.0)
                }
            },
            0.0,
            1.0,
            1e-12,
            1e-15,
        );
        assert!(res.is_err());
    }

    /// Constant-radius arcs have the linear time map `t = c² s`.
    #[test]
    fn constant_radius_time_map_is_linear() {
        let c = 0.3_f64;
        let u = |_s: f64| Ok([c, 0.0, 0.0, 0.0]);
        let t = elapsed_time(u, 2.5).unwrap();
        assert!((t - c * c * 2.5).abs() < 1e-14);
        let t0 = elapsed_time(u, 0.0).unwrap();
        assert_eq!(t0, 0.0);
    }
}
