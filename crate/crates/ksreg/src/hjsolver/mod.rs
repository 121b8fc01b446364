//! Series solution of the regularized Hamilton–Jacobi equation.
//!
//! # What is being solved
//!
//! The encounter propagator needs a *complete integral* of the regularized
//! Hamiltonian: a family of generating functions `W(u; ν)`, analytic in `u`
//! near the collision and smooth in the 4-parameter family `ν ∈ R⁴ ∖ {0}`,
//! satisfying
//!
//! ```text
//!   K_I(u, ∂W/∂u(u; ν)) = κ_ν ≡ μ(|ν|² − 1),      W(0; ν) = 0,
//! ```
//!
//! with the nondegeneracy `det ∂²W/∂u∂ν ≠ 0` (at the collision the value is
//! exactly `64μ²`). The construction:
//!
//! 1. pass to the **normal frame**: `W(u; ν) = W̃(S_νᵀ u/|ν|²; κ_ν, ν)`,
//!    where the frame change turns the asymptote direction `ν` into the first
//!    coordinate axis — the frame equivariance of the Hamiltonian family
//!    makes this exact (see [`crate::kscore::ham`]);
//! 2. solve the normal-frame equation for `∂W̃/∂ũ₁` (the square-root branch
//!    with positive constant term `√(8(μ+κ)|ν|²)`) and integrate from the
//!    data surface `ũ₁ = 0` — a strictly triangular fixed point across
//!    degrees, run to bitwise stationarity (see [`solve`] internals);
//! 3. compose with the linear frame map to return to the original variables.
//!
//! Taking the series coefficients in jet arithmetic ([`crate::scalar::Jet`])
//! instead of `f64` yields the exact partials of every coefficient with
//! respect to `ν` — i.e. the series for `n = ∂W/∂ν` and the mixed Hessians
//! that the canonical transformation requires — with no step-size error.
//!
//! The planar Levi-Civita pipeline (2 variables, parameters `(κ, α)`) lives
//! in [`planar`] and mirrors the same construction.
//!
//! # Guarantees and diagnostics
//!
//! * the constant and linear structure is exact: `W` has no constant term,
//!   its linear part is `√(8μ) (ν·u)`, and `W̃`'s only linear term is
//!   `√(8(μ+κ)|ν|²) ũ₁`;
//! * the Hamiltonian residual `K_I(u, ∇W) − κ_ν` vanishes (to roundoff)
//!   through degree `N − 1` at truncation order `N` ([`HjSolver::residual`]);
//! * truncation quality on a ball is estimated by [`HjSolution::radius_estimate`],
//!   a root-test diagnostic on the coefficient growth.

pub mod planar;
mod solve;
mod tables;

pub use solve::{assemble_complete, identity_hamiltonian_on_gradient, solve_normal_frame};
pub use tables::{KsSeriesTables, LcSeriesTables};

use crate::algebra::MultiSeries;
use crate::error::{Error, Result};
use crate::kscore::types::Params;
use crate::scalar::Jet4;
use crate::Series;

/// Driver for the spatial Hamilton–Jacobi construction at a fixed truncation
/// order. Owns the structural series tables, so one solver amortizes them
/// across many `ν`.
pub struct HjSolver {
    params: Params,
    order: usize,
    tables: KsSeriesTables,
}

/// A complete-integral solve at one asymptote parameter `ν`.
pub struct HjSolution {
    /// Problem parameters with `kappa`, `lambda`, and `nu` filled in from the
    /// solve (`kappa = μ(|ν|²−1)` for the complete integral).
    pub params: Params,
    /// Truncation order `N`.
    pub order: usize,
    /// The normal-frame series `W̃(ũ; κ, ν)`.
    pub wtilde: Series,
    /// The complete integral `W(u; ν) = W̃(S_νᵀu/|ν|²; κ_ν, ν)`.
    pub w: Series,
}

impl HjSolver {
    /// Creates a solver for the given problem parameters and truncation
    /// order (`2 ..= 16`).
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] for an order outside the supported range.
    pub fn new(params: Params, order: usize) -> Result<Self> {
        if !(2..=crate::tol::MAX_ORDER).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "truncation order {order} outside 2..={}",
                crate::tol::MAX_ORDER
            )));
        }
        let tables = KsSeriesTables::new(order)?;
        Ok(HjSolver {
            params,
            order,
            tables,
        })
    }

    /// The problem parameters this solver was built with.
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Truncation order.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The structural tables (shared with residual evaluation and tests).
    pub fn tables(&self) -> &KsSeriesTables {
        &self.tables
    }

    fn validate_nu(nu: &[f64; 4]) -> Result<f64> {
        let lambda: f64 = nu.iter().map(|x| x * x).sum();
        if !lambda.is_finite() || lambda == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "asymptote parameter nu = {nu:?} must be finite and nonzero"
            )));
        }
        Ok(lambda)
    }

    /// Solves for the complete integral at the asymptote parameter `ν`
    /// (energy level slaved to the family: `κ_ν = μ(|ν|² − 1)`).
    ///
    /// # Errors
    /// Invalid `ν`, or a failed series solve (see [`solve_normal_frame`]).
    pub fn complete_integral(&self, nu: &[f64; 4]) -> Result<HjSolution> {
        let lambda = Self::validate_nu(nu)?;
        let kappa = self.params.mu * (lambda - 1.0);
        let wtilde = solve_normal_frame(
            &self.tables,
            self.params.mu,
            self.params.energy,
            kappa,
            nu,
        )?;
        let w = assemble_complete(&wtilde, nu)?;
        let params = self
            .params
            .with_kappa(kappa)?
            .with_lambda(lambda)?
            .with_nu(*nu)?;
        Ok(HjSolution {
            params,
            order: self.order,
            wtilde,
            w,
        })
    }

    /// Solves the normal-frame equation with an *explicit* level `κ`
    /// (decoupled from the family constraint). Returns only `W̃`.
    ///
    /// # Errors
    /// Invalid `ν`, or `μ + κ ≤ 0` (the square-root branch degenerates).
    pub fn normal_frame(&self, kappa: f64, nu: &[f64; 4]) -> Result<Series> {
        Self::validate_nu(nu)?;
        if self.params.mu + kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "level kappa = {kappa} must satisfy mu + kappa > 0"
            )));
        }
        solve_normal_frame(
            &self.tables,
            self.params.mu,
            self.params.energy,
            kappa,
            nu,
        )
    }

    /// Complete integral in jet arithmetic: every coefficient carries its
    /// exact gradient with respect to `ν` (direction `k` in jet slot `k`).
    /// Evaluating the returned series at a constant-jet point `u` yields
    /// `W(u; ν)` and `∂W/∂ν(u; ν)`; its `u`-partials evaluated likewise give
    /// the mixed Hessian `∂²W/∂u∂ν`.
    ///
    /// # Errors
    /// Same failure modes as [`HjSolver::complete_integral`].
    pub fn complete_integral_jet(&self, nu: &[f64; 4]) -> Result<MultiSeries<Jet4>> {
        Self::validate_nu(nu)?;
        let nu_j: [Jet4; 4] = std::array::from_fn(|k| Jet4::variable(nu[k], k));
        let lambda = nu_j[0] * nu_j[0] + nu_j[1] * nu_j[1] + nu_j[2] * nu_j[2] + nu_j[3] * nu_j[3];
        let kappa = Jet4::constant(self.params.mu) * (lambda - Jet4::constant(1.0));
        let wtilde = solve_normal_frame(
            &self.tables,
            self.params.mu,
            self.params.energy,
            kappa,
            &nu_j,
        )?;
        assemble_complete(&wtilde, &nu_j)
    }

    /// The Hamiltonian residual series `K_I(u, ∇W) − κ_ν` of a solution.
    ///
    /// Coefficients through degree `N − 1` are guaranteed to vanish to
    /// roundoff; the degree-`N` block is truncation junk.
    ///
    /// # Errors
    /// Propagates series arithmetic failures (mismatched bases).
    pub fn residual(&self, sol: &HjSolution) -> Result<Series> {
        let k = identity_hamiltonian_on_gradient(
            &self.tables,
            &sol.w,
            self.params.mu,
            self.params.energy,
        )?;
        let kappa_const = MultiSeries::<f64>::constant(self.tables.basis, sol.params.kappa);
        k.sub(&kappa_const)
    }

    /// Largest residual coefficient over the guaranteed degrees `≤ N − 1`.
    ///
    /// # Errors
    /// Propagates series arithmetic failures (mismatched bases).
    pub fn residual_max(&self, sol: &HjSolution) -> Result<f64> {
        Ok(self.residual(sol)?.max_abs_through(self.order - 1))
    }
}

impl HjSolution {
    /// Root-test estimate of the convergence radius of the complete
    /// integral: the median over the upper half of the computed degrees `k`
    /// of `a_k^{-1/k}`, where `a_k` is the largest coefficient magnitude in
    /// degree `k`. Purely a diagnostic — truncation error on a ball of
    /// radius `r` scales like `(r / estimate)^{N+1}`.
    pub fn radius_estimate(&self) -> f64 {
        let by_degree = self.w.max_abs_by_degree();
        let mut roots: Vec<f64> = by_degree
            .iter()
            .enumerate()
            .skip(self.order / 2)
            .filter(|(_, a)| **a > 0.0)
            .map(|(k, a)| a.powf(-1.0 / k as f64))
            .collect();
        if roots.is_empty() {
            return f64::INFINITY;
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots[roots.len() / 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kscore::types::Params;
    use crate::scalar::Scalar as _;

    fn reference_solver(order: usize) -> HjSolver {
        let params = Params::new(0.01, -1.8).unwrap();
        HjSolver::new(params, order).unwrap()
    }

    #[test]
    fn linear_structure_is_exact() {
        let solver = reference_solver(6);
        let nu = [0.6, -0.3, 0.5, 0.4];
        let sol = solver.complete_integral(&nu).unwrap();
        let lambda: f64 = nu.iter().map(|x| x * x).sum();
        let kappa = 0.01 * (lambda - 1.0);
        // W̃'s only linear coefficient: √(8(μ+κ)λ) on ũ₁.
        let c = sol.wtilde.coeff(&[1, 0, 0, 0]).unwrap();
        assert!((c - (8.0 * (0.01 + kappa) * lambda).sqrt()).abs() < 1e-13);
        for exp in [[0u16, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]] {
            assert_eq!(sol.wtilde.coeff(&exp).unwrap(), 0.0);
        }
        // W's linear part: √(8μ) ν_j, exactly.
        let s8mu = (8.0 * 0.01f64).sqrt();
        let exps = [[1u16, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        for (j, exp) in exps.iter().enumerate() {
            let cj = sol.w.coeff(exp).unwrap();
            assert!(
                (cj - s8mu * nu[j]).abs() < 1e-13,
                "linear coeff {j}: {cj} vs {}",
                s8mu * nu[j]
            );
        }
        // No constant term, no collision-level offset.
        assert_eq!(sol.w.coeff(&[0, 0, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn residual_vanishes_through_the_guaranteed_degrees() {
        let solver = reference_solver(8);
        for nu in [
            [1.0, 0.0, 0.0, 0.0],
            [0.5, 0.5, -0.5, 0.5],
            [0.9, -0.2, 0.3, -0.1],
        ] {
            let sol = solver.complete_integral(&nu).unwrap();
            let r = solver.residual_max(&sol).unwrap();
            let scale = (8.0 * 0.01f64).sqrt();
            assert!(r < 1e-11 * scale.max(1.0), "residual {r} for nu {nu:?}");
            // The degree-N block is NOT guaranteed — it should in fact be
            // visibly nonzero (truncation junk), confirming the test bites.
            let full = solver.residual(&sol).unwrap();
            assert!(full.max_abs_tail(solver.order()) > 1e-9);
        }
    }

    #[test]
    fn jet_solution_agrees_with_plain_solution_and_finite_differences() {
        let solver = reference_solver(5);
        let nu = [0.8, 0.1, -0.4, 0.2];
        let sol = solver.complete_integral(&nu).unwrap();
        let wj = solver.complete_integral_jet(&nu).unwrap();
        // Values agree with the f64 path.
        for r in 0..sol.w.coeffs().len() {
            let a = sol.w.coeff_at(r);
            let b = wj.coeff_at(r).value();
            assert!((a - b).abs() < 1e-13, "coeff {r}: {a} vs {b}");
        }
        // Jet derivatives of a nontrivial cubic coefficient vs Richardson
        // finite differences in ν.
        let probe = [2u16, 1, 0, 0];
        let dw = wj.coeff(&probe).unwrap().grad();
        for k in 0..4 {
            let h = 1e-5;
            let mut fd = [0.0f64; 2];
            for (i, step) in [h, 0.5 * h].iter().enumerate() {
                let mut np = nu;
                let mut nm = nu;
                np[k] += step;
                nm[k] -= step;
                let cp = solver
                    .complete_integral(&np)
                    .unwrap()
                    .w
                    .coeff(&probe)
                    .unwrap();
                let cm = solver
                    .complete_integral(&nm)
                    .unwrap()
                    .w
                    .coeff(&probe)
                    .unwrap();
                fd[i] = (cp - cm) / (2.0 * step);
            }
            let rich = (4.0 * fd[1] - fd[0]) / 3.0;
            assert!(
                (dw[k] - rich).abs() < 1e-8 * dw[k].abs().max(1.0),
                "d/dnu[{k}]: jet {} vs fd {}",
                dw[k],
                rich
            );
        }
    }

    #[test]
    fn collision_jacobian_determinant_is_exact() {
        // det ∂²W/∂u∂ν at u = 0 equals 64 μ² for every ν: the linear part of
        // W is √(8μ)(ν·u), so the mixed Hessian at the collision is √(8μ) I.
        for (mu, nu) in [
            (0.01, [1.0, 0.0, 0.0, 0.0]),
            (0.1, [0.7, -0.2, 0.5, 0.3]),
            (0.5, [0.3, 0.9, -0.1, 0.4]),
        ] {
            let params = Params::new(mu, -1.8).unwrap();
            let solver = HjSolver::new(params, 4).unwrap();
            let wj = solver.complete_integral_jet(&nu).unwrap();
            // Mixed Hessian: jet gradients of the four linear coefficients.
            let exps = [[1u16, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
            let mut m = [[0.0f64; 4]; 4];
            for (i, exp) in exps.iter().enumerate() {
                let c = wj.coeff(exp).unwrap();
                m[i] = c.grad();
            }
            let det = nalgebra::Matrix4::from_fn(|i, j| m[i][j]).determinant();
            let expect = 64.0 * mu * mu;
            assert!(
                (det - expect).abs() < 1e-9 * expect,
                "mu {mu}: det {det} vs {expect}"
            );
        }
    }

    #[test]
    fn explicit_level_decouples_from_the_family() {
        let solver = reference_solver(5);
        let nu = [1.0, 0.0, 0.0, 0.0];
        let kappa = 0.02;
        let wt = solver.normal_frame(kappa, &nu).unwrap();
        let c = wt.coeff(&[1, 0, 0, 0]).unwrap();
        assert!((c - (8.0 * (0.01 + kappa)).sqrt()).abs() < 1e-13);
        // Rejects levels that kill the square root.
        assert!(solver.normal_frame(-0.5, &nu).is_err());
    }

    #[test]
    fn pointwise_hamilton_jacobi_identity_holds_on_a_small_ball() {
        let solver = reference_solver(10);
        let nu = [0.9, 0.3, -0.2, 0.1];
        let sol = solver.complete_integral(&nu).unwrap();
        let grads: Vec<Series> = (0..4).map(|j| sol.w.partial(j).unwrap()).collect();
        // Ball radius well inside the convergence domain so the degree-(N+1)
        // tail sits below the tolerance (the guarantee is coefficient-wise;
        // pointwise defects scale like (r/R)^(N+1)).
        let mut worst: f64 = 0.0;
        for t in 0..20 {
            let theta = t as f64 * 0.31;
            let u = [
                0.02 * theta.cos(),
                0.02 * theta.sin(),
                0.012 * (2.0 * theta).cos(),
                0.012 * (3.0 * theta).sin(),
            ];
            let p: [f64; 4] = std::array::from_fn(|j| grads[j].eval(&u).unwrap());
            let k = crate::kscore::ham::ham_ks_identity(&u, &p, 0.01, -1.8);
            worst = worst.max((k - sol.params.kappa).abs());
        }
        assert!(worst < 1e-10, "pointwise HJ defect {worst}");
    }

    #[test]
    fn radius_estimate_is_order_one_at_reference_parameters() {
        let solver = reference_solver(10);
        let sol = solver.complete_integral(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = sol.radius_estimate();
        assert!(r > 0.05 && r < 10.0, "radius estimate {r}");
    }
}
