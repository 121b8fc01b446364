//! Hamiltonian vector fields for the reference integrator.
//!
//! Every analytic object in this crate is validated against direct numerical
//! integration of a Hamiltonian flow. Four flows appear:
//!
//! | field               | dim | variables            | Hamiltonian                      |
//! |---------------------|-----|----------------------|----------------------------------|
//! | [`CartBaryField`]   | 6   | `(x, p)`             | rotating barycentric `h`         |
//! | [`CartField`]       | 6   | `(X, P)`             | rotating planetocentric `H`      |
//! | [`KsField`]         | 9   | `(u, U, t)`          | regularized `K_I` (or its Kepler reduction) |
//! | [`LcField`]         | 5   | `(u₁, u₂, U₁, U₂, t)`| planar regularized `K₂`          |
//!
//! All use the canonical equations `q̇ = ∂H/∂p`, `ṗ = −∂H/∂q` with the
//! closed-form gradients from the core module — finite differences never
//! enter an integration loop. The regularized fields evolve in the
//! fictitious arc parameter `s` and carry the physical time as an extra
//! quadrature variable obeying
//!
//! ```text
//!     dt/ds = |u|² ,
//! ```
//!
//! so a regularized trajectory knows, at every accepted step, the physical
//! epoch at which the Cartesian flow should be interrogated for comparison.
//! The Kepler switches drop the distant-primary terms; they exist purely as
//! validation hooks (a circular two-body orbit is then an exact solution).

use crate::dynamics::rk::OdeField;
use crate::kscore::ham::{
    ham_bary_grad, ham_ks_identity_grad, ham_ks_kepler_grad, ham_lc_grad,
    ham_planeto_grad, ham_planeto_kepler_grad,
};
use crate::kscore::types::{CartState, KsState, PlanetoState};

/// Rotating-frame barycentric flow; state `(x, y, z, p_x, p_y, p_z)`.
#[derive(Debug, Clone, Copy)]
pub struct CartBaryField {
    /// Mass ratio of the secondary.
    pub mu: f64,
}

impl OdeField<6> for CartBaryField {
    fn rhs(&self, _t: f64, y: &[f64; 6], out: &mut [f64; 6]) {
        let s = CartState::from_array(*y);
        let g = ham_bary_grad(&s, self.mu);
        // q̇ = ∂h/∂p, ṗ = −∂h/∂q.
        out[0] = g[3];
        out[1] = g[4];
        out[2] = g[5];
        out[3] = -g[0];
        out[4] = -g[1];
        out[5] = -g[2];
    }
}

/// Rotating-frame planetocentric flow; state `(X, Y, Z, P_X, P_Y, P_Z)`.
///
/// With `kepler = true` the distant-primary terms are removed, leaving the
/// rotating two-body problem around the secondary (validation hook).
#[derive(Debug, Clone, Copy)]
pub struct CartField {
    /// Mass ratio of the secondary.
    pub mu: f64,
    /// Drop the distant-primary potential terms.
    pub kepler: bool,
}

impl CartField {
    /// The full planetocentric field.
    pub fn full(mu: f64) -> Self {
        CartField { mu, kepler: false }
    }

    /// The rotating two-body validation field.
    pub fn kepler(mu: f64) -> Self {
        CartField { mu, kepler: true }
    }
}

impl OdeField<6> for CartField {
    fn rhs(&self, _t: f64, y: &[f64; 6], out: &mut [f64; 6]) {
        let s = PlanetoState::from_array(*y);
        let g = if self.kepler {
            ham_planeto_kepler_grad(&s, self.mu)
        } else {
            ham_planeto_grad(&s, self.mu)
        };
        out[0] = g[3];
        out[1] = g[4];
        out[2] = g[5];
        out[3] = -g[0];
        out[4] = -g[1];
        out[5] = -g[2];
    }
}

/// Regularized flow of `K_I`; state `(u₁..u₄, U₁..U₄, t)` in the arc
/// parameter `s`, with the physical time integrated alongside via
/// `dt/ds = |u|²`.
#[derive(Debug, Clone, Copy)]
pub struct KsField {
    /// Mass ratio of the secondary.
    pub mu: f64,
    /// Rotating-frame energy level `E` fixed by the regularization.
    pub energy: f64,
    /// Drop the distant-primary terms (Kepler validation hook; the energy
    /// constant then enters unshifted).
    pub kepler: bool,
}

impl KsField {
    /// The full regularized field at `(μ, E)`.
    pub fn full(mu: f64, energy: f64) -> Self {
        KsField {
            mu,
            energy,
            kepler: false,
        }
    }

    /// The regularized rotating two-body validation field.
    pub fn kepler(mu: f64, energy: f64) -> Self {
        KsField {
            mu,
            energy,
            kepler: true,
        }
    }

    /// Packs a KS phase-space state and an epoch into the 9-dim vector.
    pub fn pack(state: &KsState, t: f64) -> [f64; 9] {
        [
            state.u[0], state.u[1], state.u[2], state.u[3], state.p[0],
            state.p[1], state.p[2], state.p[3], t,
        ]
    }

    /// Splits the 9-dim vector into the phase-space state and the epoch.
    pub fn unpack(y: &[f64; 9]) -> (KsState, f64) {
        (
            KsState {
                u: [y[0], y[1], y[2], y[3]],
                p: [y[4], y[5], y[6], y[7]],
            },
            y[8],
        )
    }
}

impl OdeField<9> for KsField {
    fn rhs(&self, _s: f64, y: &[f64; 9], out: &mut [f64; 9]) {
        let u = [y[0], y[1], y[2], y[3]];
        let p = [y[4], y[5], y[6], y[7]];
        let (du, dp) = if self.kepler {
            ham_ks_kepler_grad(&u, &p, self.mu, self.energy)
        } else {
            ham_ks_identity_grad(&u, &p, self.mu, self.energy)
        };
        for j in 0..4 {
            out[j] = dp[j]; // u' = ∂K/∂U
            out[4 + j] = -du[j]; // U' = −∂K/∂u
        }
        out[8] = u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
    }
}

/// Planar Levi-Civita regularized flow of `K₂`; state
/// `(u₁, u₂, U₁, U₂, t)` in the arc parameter, `dt/ds = |u|²`.
#[derive(Debug, Clone, Copy)]
pub struct LcField {
    /// Mass ratio of the secondary.
    pub mu: f64,
    /// Rotating-frame energy level `E`.
    pub energy: f64,
}

impl OdeField<5> for LcField {
    fn rhs(&self, _s: f64, y: &[f64; 5], out: &mut [f64; 5]) {
        let u = [y[0], y[1]];
        let p = [y[2], y[3]];
        let (du, dp) = ham_lc_grad(&u, &p, self.mu, self.energy);
        out[0] = dp[0];
        out[1] = dp[1];
        out[2] = -du[0];
        out[3] = -du[1];
        out[4] = u[0] * u[0] + u[1] * u[1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rk::Dopri5;
    use crate::kscore::charts::{lc_lift, lift_default};
    use crate::kscore::ham::{
        ham_bary, ham_ks_identity, ham_lc, ham_planeto,
    };
    use crate::kscore::maps::bilinear;
    use crate::kscore::types::{CartState, PlanetoState};

    fn sample_planeto() -> PlanetoState {
        PlanetoState {
            x: 0.012,
            y: -0.007,
            z: 0.004,
            px: 0.9,
            py: 1.1,
            pz: -0.5,
        }
    }

    /// Autonomous Hamiltonians are conserved along their own flows.
    #[test]
    fn hamiltonians_are_conserved_along_their_flows() {
        let mu = 0.01;
        let integ = Dopri5::default();

        // Barycentric flow from a mid-field state.
        let bary0 = CartState {
            x: 0.4,
            y: 0.3,
            z: 0.1,
            px: -0.2,
            py: 0.5,
            pz: 0.1,
        };
        let h0 = ham_bary(&bary0, mu);
        let f = CartBaryField { mu };
        let y1 = integ.endpoint(&f, 0.0, &bary0.to_array(), 2.0).unwrap();
        let h1 = ham_bary(&CartState::from_array(y1), mu);
        assert!((h1 - h0).abs() < 1e-11, "bary drift {:e}", h1 - h0);

        // Planetocentric flow close to the secondary.
        let p0 = sample_planeto();
        let hp0 = ham_planeto(&p0, mu);
        let f = CartField::full(mu);
        let y1 = integ.endpoint(&f, 0.0, &p0.to_array(), 0.02).unwrap();
        let hp1 = ham_planeto(&PlanetoState::from_array(y1), mu);
        assert!((hp1 - hp0).abs() < 1e-10, "planeto drift {:e}", hp1 - hp0);
    }

    /// The regularized flow conserves `K_I` and the bilinear invariant, and
    /// its time column is strictly increasing.
    #[test]
    fn regularized_flow_conserves_its_invariants() {
        let mu = 0.01;
        let p0 = sample_planeto();
        let energy = ham_planeto(&p0, mu);
        let (ks0, _chart) = lift_default(&p0).unwrap();
        let k0 = ham_ks_identity(&ks0.u, &ks0.p, mu, energy);
        assert!(k0.abs() < 1e-13, "lift is not on the zero level: {k0:e}");
        assert!(ks0.bilinear().abs() < 1e-13);

        let f = KsField::full(mu, energy);
        let integ = Dopri5::default();
        let traj = integ
            .integrate(&f, 0.0, &KsField::pack(&ks0, 0.0), 4.0)
            .unwrap();
        let mut t_prev = 0.0;
        for s in traj
            .steps
            .iter()
            .map(|st| (st.t, st.y))
            .chain(std::iter::once((traj.t_end, traj.y_end)))
        {
            let (ks, t) = KsField::unpack(&s.1);
            let k = ham_ks_identity(&ks.u, &ks.p, mu, energy);
            assert!(k.abs() < 1e-11, "K_I drift {k:e} at s = {}", s.0);
            assert!(
                bilinear(&ks.u, &ks.p).abs() < 1e-12,
                "bilinear drift at s = {}",
                s.0
            );
            assert!(t >= t_prev, "time not monotone at s = {}", s.0);
            t_prev = t;
        }
    }

    /// The planar regularized flow conserves `K₂`.
    #[test]
    fn planar_flow_conserves_its_hamiltonian() {
        let mu = 0.01;
        let energy = -1.8;
        // Build a planar state on the K₂ = 0 level is not required; K₂ is
        // conserved on every level set.
        let (u, uu) = lc_lift(0.009, -0.004, 1.3, 0.8).unwrap();
        let k0 = ham_lc(&u, &uu, mu, energy);
        let f = LcField { mu, energy };
        let integ = Dopri5::default();
        let y1 = integ
            .endpoint(&f, 0.0, &[u[0], u[1], uu[0], uu[1], 0.0], 3.0)
            .unwrap();
        let k1 = ham_lc(&[y1[0], y1[1]], &[y1[2], y1[3]], mu, energy);
        assert!((k1 - k0).abs() < 1e-11, "K₂ drift {:e}", k1 - k0);
        assert!(y1[4] > 0.0);
    }

    /// Planar Cartesian data stays planar: the `(Z, P_Z)` pair is invariant.
    #[test]
    fn planar_initial_data_stays_planar() {
        let mu = 0.01;
        let p0 = PlanetoState {
            x: 0.011,
            y: 0.006,
            z: 0.0,
            px: -0.8,
            py: 1.2,
            pz: 0.0,
        };
        let integ = Dopri5::default();
        let f = CartField::full(mu);
        let traj = integ.integrate(&f, 0.0, &p0.to_array(), 0.05).unwrap();
        for st in &traj.steps {
            assert!(st.y[2].abs() < 1e-12 && st.y[5].abs() < 1e-12);
        }
        assert!(traj.y_end[2].abs() < 1e-12 && traj.y_end[5].abs() < 1e-12);
    }
}
