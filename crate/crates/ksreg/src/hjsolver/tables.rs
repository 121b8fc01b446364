//! Structural power series shared by every Hamilton–Jacobi solve.
//!
//! The right-hand side of the characteristic equation is assembled from a
//! handful of *fixed* polynomial ingredients — the projection components
//! `q(u) = π(u)`, the squared norm `|u|²`, and the twelve cubic components of
//! the direction-wise vector potentials `b_{e_k}(u)` — none of which depend
//! on the parameters `(μ, E, κ, ν)`. They are therefore computed once per
//! `(variables, order)` pair as plain `f64` series (their coefficients are
//! small integers) and injected into the parameter-carrying arithmetic via
//! [`MultiSeries::add_scaled_f64`], which keeps the expensive structural work
//! out of the jet-valued solves.

use crate::algebra::basis::{basis, Basis};
use crate::algebra::MultiSeries;
use crate::error::Result;

/// Structural tables for the spatial (four-variable) solver.
pub struct KsSeriesTables {
    /// The underlying monomial basis (4 variables at the solve order).
    pub basis: &'static Basis,
    /// Components of `π(u)`: three quadratics.
    pub q: [MultiSeries<f64>; 3],
    /// `|u|²`.
    pub n2: MultiSeries<f64>,
    /// `|u|⁴ = |π(u)|²` (cached square of `n2`).
    pub n4: MultiSeries<f64>,
    /// `b[k][j]` is the `j`-th component of `b_{e_{k+1}}(u)`; each is a cubic
    /// with integer coefficients. The physical potential for a unit vector
    /// `ω` is `b_ω = ω₁ b[0] + ω₂ b[1] + ω₃ b[2]` componentwise.
    pub b: [[MultiSeries<f64>; 4]; 3],
}

/// Rows of the KS matrix `A(u)` as linear series (helper for the tables).
fn ks_matrix_series(bs: &'static Basis) -> [[MultiSeries<f64>; 4]; 4] {
    let var = |j: usize| MultiSeries::<f64>::variable(bs, j).unwrap();
    let u1 = var(0);
    let u2 = var(1);
    let u3 = var(2);
    let u4 = var(3);
    [
        [u1.clone(), u2.neg(), u3.neg(), u4.clone()],
        [u2.clone(), u1.clone(), u4.neg(), u3.neg()],
        [u3.clone(), u4.clone(), u1.clone(), u2.clone()],
        [u4.clone(), u3.neg(), u2.clone(), u1.neg()],
    ]
}

impl KsSeriesTables {
    /// Builds the tables at the given truncation order.
    ///
    /// # Errors
    /// Propagates basis validation (order out of the supported range).
    pub fn new(order: usize) -> Result<Self> {
        let bs = basis(4, order)?;
        let a = ks_matrix_series(bs);
        // q = first three components of A(u)u (the fourth vanishes
        // identically by the structure of A).
        let var = |j: usize| MultiSeries::<f64>::variable(bs, j).unwrap();
        let u: [MultiSeries<f64>; 4] = [var(0), var(1), var(2), var(3)];
        let comp = |row: &[MultiSeries<f64>; 4]| -> MultiSeries<f64> {
            let mut acc = row[0].mul(&u[0]).unwrap();
            for j in 1..4 {
                acc = acc.add(&row[j].mul(&u[j]).unwrap()).unwrap();
            }
            acc
        };
        let q = [comp(&a[0]), comp(&a[1]), comp(&a[2])];
        let n2 = {
            let mut acc = u[0].mul(&u[0]).unwrap();
            for j in 1..4 {
                acc = acc.add(&u[j].mul(&u[j]).unwrap()).unwrap();
            }
            acc
        };
        let n4 = n2.mul(&n2).unwrap();

        // b_ω(u) = 2 Aᵀ(u) Λ_ω A(u) u with Λ_ω v = (ω ∧ v₁₂₃, 0). For
        // ω = e_k the product Λ_ω (q, 0) picks two components of q:
        //   e₁: (0, −q₃, q₂, 0),  e₂: (q₃, 0, −q₁, 0),  e₃: (−q₂, q₁, 0, 0).
        let zero = MultiSeries::<f64>::zeros(bs);
        let lam_q: [[MultiSeries<f64>; 4]; 3] = [
            [zero.clone(), q[2].neg(), q[1].clone(), zero.clone()],
            [q[2].clone(), zero.clone(), q[0].neg(), zero.clone()],
            [q[1].neg(), q[0].clone(), zero.clone(), zero.clone()],
        ];
        let b = std::array::from_fn(|k| {
            std::array::from_fn(|j| {
                // (Aᵀ w)_j = Σ_i A_{ij} w_i, then doubled; the fourth
                // component of Λ_ω(q, 0) is identically zero and skipped.
                let mut acc = MultiSeries::<f64>::zeros(bs);
                for i in 0..3 {
                    acc = acc.add(&a[i][j].mul(&lam_q[k][i]).unwrap()).unwrap();
                }
                acc.scale(2.0)
            })
        });
        Ok(KsSeriesTables { basis: bs, q, n2, n4, b })
    }
}

/// Structural tables for the planar (two-variable) solver.
pub struct LcSeriesTables {
    /// The underlying monomial basis (2 variables at the solve order).
    pub basis: &'static Basis,
    /// Components of the complex square `(u₁² − u₂², 2u₁u₂)`.
    pub q: [MultiSeries<f64>; 2],
    /// `|u|²`.
    pub n2: MultiSeries<f64>,
    /// `|u|⁴`.
    pub n4: MultiSeries<f64>,
    /// The planar vector potential `b(u) = (−2|u|²u₂, 2|u|²u₁)`.
    pub b: [MultiSeries<f64>; 2],
}

impl LcSeriesTables {
    /// Builds the planar tables at the given truncation order.
    ///
    /// # Errors
    /// Propagates basis validation (order out of the supported range).
    pub fn new(order: usize) -> Result<Self> {
        let bs = basis(2, order)?;
        let var = |j: usize| MultiSeries::<f64>::variable(bs, j).unwrap();
        let u1 = var(0);
        let u2 = var(1);
        let u1u1 = u1.mul(&u1).unwrap();
        let u2u2 = u2.mul(&u2).unwrap();
        let q = [
            u1u1.sub(&u2u2).unwrap(),
            u1.mul(&u2).unwrap().scale(2.0),
        ];
        let n2 = u1u1.add(&u2u2).unwrap();
        let n4 = n2.mul(&n2).unwrap();
        let b = [
            n2.mul(&u2).unwrap().scale(-2.0),
            n2.mul(&u1).unwrap().scale(2.0),
        ];
        Ok(LcSeriesTables { basis: bs, q, n2, n4, b })
    }
}
