//! State and parameter types.
//!
//! Three phase-space charts appear throughout the crate:
//!
//! * [`CartState`] — rotating **barycentric** chart `(x, y, z, p_x, p_y, p_z)`;
//!   momenta are inertial velocities expressed in rotating axes. The primary
//!   (mass `1 − μ`) sits at `(−μ, 0, 0)`, the secondary (mass `μ`) at
//!   `(1 − μ, 0, 0)`.
//! * [`PlanetoState`] — rotating **planetocentric** chart centered on the
//!   encountered body, reached from the barycentric chart by the *canonical*
//!   translation `X = x − (1−μ), P_X = p_x, P_Y = p_y − (1−μ), P_Z = p_z`
//!   (for the secondary; the momentum shift keeps the transformation
//!   symplectic because the rotating-frame Hamiltonian mixes positions and
//!   momenta).
//! * [`KsState`] — the KS double cover: position spinor `u ∈ R⁴` and its
//!   conjugate momentum `p ∈ R⁴`, with the physical fiber condition
//!   `ℓ(u, p) = 0`.
//!
//! [`Params`] bundles the problem constants: mass ratio, rotating-frame
//! energy `E`, the spectral shift `κ`, the scaling `λ`, the asymptote
//! parameter `ν`, and which body is encountered.

use crate::error::{Error, Result};
use crate::linalg::norm2_4;

/// Which primary body an encounter is referred to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Body {
    /// The smaller body, mass `μ`, at barycentric `(1−μ, 0, 0)`. The native
    /// case: every formula in this crate is written for it.
    Secondary,
    /// The larger body, mass `1−μ`, at `(−μ, 0, 0)`. Handled by the exact
    /// mirror `(x, y, z, p_x, p_y, p_z) → (−x, −y, z, −p_x, −p_y, p_z)`
    /// combined with `μ → 1−μ`, which maps the problem onto the secondary
    /// case; see [`crate::kscore::ham::mirror_to_secondary`].
    Primary,
}

/// KS chart label. Both charts cover all of `R³ ∖ {0}` except one half-line
/// each; together they are global away from collision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// Section valid away from the negative `X` half-line (`r + X > 0`).
    PlusX,
    /// Section valid away from the positive `X` half-line (`r − X > 0`).
    MinusX,
}

impl Chart {
    /// Short display name used in errors and reports.
    pub fn name(self) -> &'static str {
        match self {
            Chart::PlusX => "+X",
            Chart::MinusX => "-X",
        }
    }
}

/// Rotating barycentric state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartState {
    /// Position components.
    pub x: f64,
    /// Position components.
    pub y: f64,
    /// Position components.
    pub z: f64,
    /// Conjugate momenta (inertial velocity in rotating axes).
    pub px: f64,
    /// Conjugate momenta.
    pub py: f64,
    /// Conjugate momenta.
    pub pz: f64,
}

/// Rotating planetocentric state (origin at the encountered body).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanetoState {
    /// Position components relative to the body.
    pub x: f64,
    /// Position components relative to the body.
    pub y: f64,
    /// Position components relative to the body.
    pub z: f64,
    /// Conjugate momenta of the planetocentric chart.
    pub px: f64,
    /// Conjugate momenta.
    pub py: f64,
    /// Conjugate momenta.
    pub pz: f64,
}

/// KS phase-space state: position spinor and conjugate momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsState {
    /// Position spinor `u ∈ R⁴` (the body is `u = 0`).
    pub u: [f64; 4],
    /// Conjugate momentum `p ∈ R⁴`. Physical states satisfy `ℓ(u, p) = 0`.
    pub p: [f64; 4],
}

impl CartState {
    /// Barycentric → planetocentric canonical translation for the secondary.
    /// (For the primary, first apply the mirror; see [`Body`].)
    pub fn to_planeto(&self, mu: f64) -> PlanetoState {
        let c = 1.0 - mu;
        PlanetoState {
            x: self.x - c,
            y: self.y,
            z: self.z,
            px: self.px,
            py: self.py - c,
            pz: self.pz,
        }
    }

    /// Component array `(x, y, z, p_x, p_y, p_z)`.
    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.px, self.py, self.pz]
    }

    /// Builds a state from a component array.
    pub fn from_array(a: [f64; 6]) -> Self {
        CartState {
            x: a[0],
            y: a[1],
            z: a[2],
            px: a[3],
            py: a[4],
            pz: a[5],
        }
    }
}

impl PlanetoState {
    /// Planetocentric → barycentric inverse of [`CartState::to_planeto`].
    pub fn to_bary(&self, mu: f64) -> CartState {
        let c = 1.0 - mu;
        CartState {
            x: self.x + c,
            y: self.y,
            z: self.z,
            px: self.px,
            py: self.py + c,
            pz: self.pz,
        }
    }

    /// Distance to the encountered body.
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// True when the state moves toward the body: `d(r²)/dt < 0`. The
    /// rotating-frame cross terms cancel in `position · velocity`, leaving
    /// the plain inner product `position · momentum`.
    pub fn entering(&self) -> bool {
        self.x * self.px + self.y * self.py + self.z * self.pz < 0.0
    }

    /// Component array `(X, Y, Z, P_X, P_Y, P_Z)`.
    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.px, self.py, self.pz]
    }

    /// Builds a state from a component array.
    pub fn from_array(a: [f64; 6]) -> Self {
        PlanetoState {
            x: a[0],
            y: a[1],
            z: a[2],
            px: a[3],
            py: a[4],
            pz: a[5],
        }
    }
}

impl KsState {
    /// KS radius `|u|` (the planetocentric distance is `|u|²`).
    pub fn radius(&self) -> f64 {
        norm2_4(&self.u).sqrt()
    }

    /// The bilinear invariant `ℓ(u, p)`; zero on physical states.
    pub fn bilinear(&self) -> f64 {
        crate::kscore::maps::bilinear(&self.u, &self.p)
    }
}

/// Problem constants shared by the solver, the canonical transformation, and
/// the verification suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    /// Mass ratio of the secondary, `μ ∈ (0, ½]`.
    pub mu: f64,
    /// Rotating-frame (Jacobi-type) energy `E` of the orbits under study.
    pub energy: f64,
    /// Spectral shift `κ` of the rotated-frame generating series; the
    /// composed complete integral fixes `κ = μ(|ν|² − 1)`.
    pub kappa: f64,
    /// Scaling parameter `λ > 0` of the generalized regularized Hamiltonian.
    pub lambda: f64,
    /// Asymptote parameter `ν ∈ R⁴` selecting the encounter branch.
    pub nu: [f64; 4],
    /// The encountered body.
    pub body: Body,
}

impl Params {
    /// Creates parameters for a secondary encounter with `κ = 0`, `λ = 1`,
    /// `ν = e₁` (the canonical starting frame).
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] when `μ ∉ (0, ½]` or a value is not finite.
    pub fn new(mu: f64, energy: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 0.5) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass ratio mu = {mu}; required mu in (0, 0.5]"
            )));
        }
        if !energy.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "energy = {energy} is not finite"
            )));
        }
        Ok(Params {
            mu,
            energy,
            kappa: 0.0,
            lambda: 1.0,
            nu: [1.0, 0.0, 0.0, 0.0],
            body: Body::Secondary,
        })
    }

    /// Replaces the spectral shift `κ`.
    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter("kappa must be finite".into()));
        }
        self.kappa = kappa;
        Ok(self)
    }

    /// Replaces the scaling `λ` (must be strictly positive).
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda}; required lambda > 0"
            )));
        }
        self.lambda = lambda;
        Ok(self)
    }

    /// Replaces the asymptote parameter `ν` (must be nonzero and finite).
    pub fn with_nu(mut self, nu: [f64; 4]) -> Result<Self> {
        if nu.iter().any(|x| !x.is_finite()) || norm2_4(&nu) == 0.0 {
            return Err(Error::InvalidParameter(
                "nu must be finite and nonzero".into(),
            ));
        }
        self.nu = nu;
        Ok(self)
    }

    /// Replaces the encountered body.
    pub fn with_body(mut self, body: Body) -> Self {
        self.body = body;
        self
    }

    /// The shifted energy constant `E_μ = E + (1−μ) + (1−μ)²/2` absorbed by
    /// the planetocentric chart (the two constant terms come from the
    /// momentum shift and the expansion of the distant-body potential).
    #[inline]
    pub fn e_mu(&self) -> f64 {
        let c = 1.0 - self.mu;
        self.energy + c + 0.5 * c * c
    }

    /// The spectral shift selected by the composed complete integral at the
    /// asymptote parameter `ν`: `κ_ν = μ(|ν|² − 1)`.
    #[inline]
    pub fn kappa_nu(&self) -> f64 {
        self.mu * (norm2_4(&self.nu) - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planetocentric_translation_round_trips() {
        let s = CartState {
            x: 0.99,
            y: 0.02,
            z: -0.01,
            px: 0.1,
            py: 1.05,
            pz: -0.3,
        };
        let mu = 0.01;
        let p = s.to_planeto(mu);
        assert!((p.x - (s.x - 0.99)).abs() < 1e-15);
        assert!((p.py - (s.py - 0.99)).abs() < 1e-15);
        let back = p.to_bary(mu);
        assert_eq!(back, s);
    }

    #[test]
    fn params_validate_their_ranges() {
        assert!(Params::new(0.0, -1.8).is_err());
        assert!(Params::new(0.6, -1.8).is_err());
        assert!(Params::new(0.01, f64::NAN).is_err());
        let p = Params::new(0.01, -1.8).unwrap();
        assert!(p.with_lambda(0.0).is_err());
        assert!(p.with_nu([0.0; 4]).is_err());
        // E_mu = E + (1−μ) + (1−μ)²/2 at μ = 0.01, E = −1.8.
        let e = p.e_mu();
        assert!((e - (-1.8 + 0.99 + 0.5 * 0.99 * 0.99)).abs() < 1e-15);
    }
}
