//! Panicking wrappers around the deterministic state constructors in
//! [`crate::sampling`], for concise use inside the canonical-layer tests.

use crate::kscore::types::PlanetoState;

/// Planetocentric state on the energy level `H = E`; see
/// [`crate::sampling::level_state`].
///
/// # Panics
/// If no real momentum magnitude exists on this level.
pub(crate) fn level_state(mu: f64, energy: f64, pos: [f64; 3], dir: [f64; 3]) -> PlanetoState {
    crate::sampling::level_state(mu, energy, pos, dir).unwrap()
}

/// Entering state on the sphere `‖x‖ = σ` and the level `H = E` with the
/// reference inward pull; see [`crate::sampling::entry_state`].
///
/// # Panics
/// As [`level_state`].
pub(crate) fn entry_state(
    mu: f64,
    energy: f64,
    sigma: f64,
    pos_dir: [f64; 3],
    aim: [f64; 3],
) -> PlanetoState {
    crate::sampling::entry_state(mu, energy, sigma, pos_dir, aim, 0.8).unwrap()
}
