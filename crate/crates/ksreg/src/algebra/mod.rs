//! Dense truncated multivariate power series.
//!
//! A [`MultiSeries<T>`] is a polynomial of total degree ≤ N in `nvars`
//! variables with coefficients in a [`Scalar`] type, stored densely in the
//! graded-lexicographic rank order of its interned [`Basis`]. All arithmetic
//! is **truncated**: any product term of total degree > N is discarded, which
//! makes the type an exact model of the quotient ring
//! `T[u₁..u_v] / (degree > N)` — precisely the arithmetic the
//! Cauchy–Kowalevski construction in [`crate::hjsolver`] requires.
//!
//! # Operations
//!
//! | group          | operations                                                       |
//! |----------------|------------------------------------------------------------------|
//! | ring           | [`add`](MultiSeries::add), [`sub`](MultiSeries::sub), [`mul`](MultiSeries::mul), [`neg`](MultiSeries::neg), [`scale`](MultiSeries::scale) |
//! | analytic       | [`pow_real`](MultiSeries::pow_real) (real exponent, positive constant term), [`sqrt`](MultiSeries::sqrt), [`recip`](MultiSeries::recip) |
//! | calculus       | [`partial`](MultiSeries::partial), [`antiderivative`](MultiSeries::antiderivative) |
//! | geometry       | [`compose_linear`](MultiSeries::compose_linear) — precomposition with a linear map |
//! | evaluation     | [`eval`](MultiSeries::eval) — Horner-free dense evaluation, ascending degree |
//!
//! # Numerical conventions
//!
//! * Coefficients whose every component is smaller in magnitude than
//!   [`tol::COEFF_FLUSH`] are flushed to exact zero after each operation, so
//!   structural zeros stay exactly zero across long computations.
//! * Antidifferentiation shifts degrees up by one; if a nonzero top-degree
//!   coefficient falls off the truncation, the result is marked
//!   [`truncated`](MultiSeries::truncated) (a sticky, propagating flag).
//! * Binary operations require *the same* interned basis (equal variable
//!   count and order) and report [`Error::DimensionMismatch`] otherwise.
//!
//! # Example
//!
//! ```
//! use ksreg::algebra::{basis, MultiSeries};
//!
//! let b = basis(2, 6).unwrap();
//! let x = MultiSeries::<f64>::variable(b, 0).unwrap();
//! let y = MultiSeries::<f64>::variable(b, 1).unwrap();
//! let one = MultiSeries::<f64>::constant(b, 1.0);
//! // (1 + x² + y²)^(−1/2) · (1 + x² + y²)^(1/2) = 1 (through degree 6).
//! let g = one.add(&x.mul(&x).unwrap()).unwrap().add(&y.mul(&y).unwrap()).unwrap();
//! let p = g.pow_real(0.5).unwrap().mul(&g.pow_real(-0.5).unwrap()).unwrap();
//! assert!((p.coeff(&[0, 0]).unwrap() - 1.0).abs() < 1e-15);
//! assert!(p.max_abs_tail(1) < 1e-14);
//! ```

pub mod basis;

pub use basis::{basis, Basis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tol;

/// Dense truncated power series over the scalar `T`. See the module docs.
#[derive(Clone)]
pub struct MultiSeries<T: Scalar> {
    basis: &'static Basis,
    coeffs: Vec<T>,
    truncated: bool,
}

impl<T: Scalar> PartialEq for MultiSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.basis, other.basis)
            && self.truncated == other.truncated
            && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> std::fmt::Debug for MultiSeries<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let nnz = self.coeffs.iter().filter(|c| **c != T::zero()).count();
        write!(
            f,
            "MultiSeries({} vars, order {}, {} nonzero",
            self.basis.nvars(),
            self.basis.order(),
            nnz
        )?;
        // Print the first few nonzero terms for debugging ergonomics.
        let mut shown = 0;
        for (r, c) in self.coeffs.iter().enumerate() {
            if *c == T::zero() {
                continue;
            }
            write!(f, ", {:?}·u^{:?}", c, self.basis.exponent(r))?;
            shown += 1;
            if shown == 6 {
                write!(f, ", …")?;
                break;
            }
        }
        write!(f, ")")
    }
}

impl<T: Scalar> MultiSeries<T> {
    // ───────────────────────── constructors ─────────────────────────

    /// The zero series on `basis`.
    pub fn zeros(basis: &'static Basis) -> Self {
        MultiSeries {
            basis,
            coeffs: vec![T::zero(); basis.len()],
            truncated: false,
        }
    }

    /// The constant series `c`.
    pub fn constant(basis: &'static Basis, c: T) -> Self {
        let mut s = Self::zeros(basis);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate series `u_j`.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if `j ≥ nvars`.
    pub fn variable(basis: &'static Basis, j: usize) -> Result<Self> {
        if j >= basis.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "variable index {j} out of range for {} variables",
                basis.nvars()
            )));
        }
        let mut s = Self::zeros(basis);
        // Rank of δ_j: the degree-1 block lists u₁, u₂, … in order.
        s.coeffs[basis.degree_block(1).start + j] = T::one();
        Ok(s)
    }

    /// The linear form `Σ_j c_j u_j` (no constant term).
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if `c.len() != nvars`.
    pub fn linear_form(basis: &'static Basis, c: &[T]) -> Result<Self> {
        if c.len() != basis.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "linear form with {} coefficients on {} variables",
                c.len(),
                basis.nvars()
            )));
        }
        let mut s = Self::zeros(basis);
        let start = basis.degree_block(1).start;
        for (j, cj) in c.iter().enumerate() {
            s.coeffs[start + j] = *cj;
        }
        Ok(s)
    }

    /// Wraps an explicit coefficient vector (rank order).
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if the length is not `basis.len()`.
    pub fn from_coeffs(basis: &'static Basis, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector of length {} for a basis of {} monomials",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(MultiSeries {
            basis,
            coeffs,
            truncated: false,
        })
    }

    /// Converts an `f64`-coefficient series into the scalar `T` (same basis).
    pub fn from_f64_series(src: &MultiSeries<f64>) -> Self {
        MultiSeries {
            basis: src.basis,
            coeffs: src.coeffs.iter().map(|&c| T::from_f64(c)).collect(),
            truncated: src.truncated,
        }
    }

    // ───────────────────────── accessors ─────────────────────────

    /// The interned basis this series lives on.
    #[inline]
    pub fn basis(&self) -> &'static Basis {
        self.basis
    }

    /// Coefficients in rank order.
    #[inline]
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient at a rank (panics on out-of-range rank).
    #[inline]
    pub fn coeff_at(&self, rank: usize) -> T {
        self.coeffs[rank]
    }

    /// Coefficient of the monomial with the given exponent tuple.
    ///
    /// # Errors
    /// Propagates rank-lookup errors (wrong arity, degree beyond order).
    pub fn coeff(&self, exponent: &[u16]) -> Result<T> {
        Ok(self.coeffs[self.basis.rank_of(exponent)?])
    }

    /// Sets the coefficient of the monomial with the given exponent tuple.
    ///
    /// # Errors
    /// Propagates rank-lookup errors.
    pub fn set_coeff(&mut self, exponent: &[u16], value: T) -> Result<()> {
        let r = self.basis.rank_of(exponent)?;
        self.coeffs[r] = value;
        Ok(())
    }

    /// True when a nonzero coefficient has been lost to the truncation order
    /// by [`antiderivative`](Self::antiderivative) anywhere in this series'
    /// history (the flag propagates through arithmetic).
    #[inline]
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Largest total degree with a nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        for r in (0..self.coeffs.len()).rev() {
            if self.coeffs[r] != T::zero() {
                return self.basis.degree_of(r);
            }
        }
        0
    }

    /// Maximum coefficient magnitude (principal part) in each degree block.
    pub fn max_abs_by_degree(&self) -> Vec<f64> {
        (0..=self.basis.order())
            .map(|d| {
                self.basis.degree_block(d).fold(0.0f64, |m, r| {
                    m.max(self.coeffs[r].abs_value())
                })
            })
            .collect()
    }

    /// Maximum coefficient magnitude over degrees ≥ `from_degree`.
    pub fn max_abs_tail(&self, from_degree: usize) -> f64 {
        let start = self.basis.degree_block(from_degree).start;
        self.coeffs[start..]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs_value()))
    }

    /// Maximum coefficient magnitude over degrees ≤ `to_degree`.
    pub fn max_abs_through(&self, to_degree: usize) -> f64 {
        let end = self.basis.degree_block(to_degree).end;
        self.coeffs[..end]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs_value()))
    }

    // ───────────────────────── ring operations ─────────────────────────

    /// Checks basis compatibility for binary operations.
    fn same_basis(&self, other: &Self) -> Result<()> {
        if std::ptr::eq(self.basis, other.basis) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "series on ({} vars, order {}) combined with ({} vars, order {})",
                self.basis.nvars(),
                self.basis.order(),
                other.basis.nvars(),
                other.basis.order()
            )))
        }
    }

    /// Flushes denormal-range coefficients to exact zero (in place).
    fn flush(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = c.flush_tiny(tol::COEFF_FLUSH);
        }
        self
    }

    /// Sum of two series on the same basis.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += *o;
        }
        out.truncated |= other.truncated;
        Ok(out.flush())
    }

    /// Difference of two series on the same basis.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= *o;
        }
        out.truncated |= other.truncated;
        Ok(out.flush())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -*c;
        }
        out
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, c: T) -> Self {
        let mut out = self.clone();
        for x in &mut out.coeffs {
            *x *= c;
        }
        out.flush()
    }

    /// Adds `c · src` in place, where `src` has `f64` coefficients on the same
    /// basis. This is the bridge that instantiates cached `f64` structural
    /// series (KS projection polynomials etc.) into jet-valued computations
    /// without rebuilding them.
    pub fn add_scaled_f64(&mut self, src: &MultiSeries<f64>, c: T) -> Result<()> {
        if !std::ptr::eq(self.basis, src.basis) {
            return Err(Error::DimensionMismatch(
                "add_scaled_f64 across different bases".into(),
            ));
        }
        for (x, s) in self.coeffs.iter_mut().zip(&src.coeffs) {
            if *s != 0.0 {
                *x += c * T::from_f64(*s);
            }
        }
        Ok(())
    }

    /// Truncated product of two series on the same basis.
    ///
    /// One pass over the basis multiplication table; cost is independent of
    /// sparsity (the table only contains in-truncation pairs).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        let mut out = Self::zeros(self.basis);
        out.truncated = self.truncated || other.truncated;
        let a = &self.coeffs;
        let b = &other.coeffs;
        let c = &mut out.coeffs;
        for &(ra, rb, rc) in self.basis.mul_table() {
            c[rc as usize] += a[ra as usize] * b[rb as usize];
        }
        Ok(out.flush())
    }

    /// Product with a series of degree ≤ 1 (`c₀ + Σ c_j u_j`).
    ///
    /// O(len · nvars) via the shift tables — much cheaper than the full
    /// multiplication table; used heavily by linear composition. Internal:
    /// callers guarantee `lin` is at most linear.
    pub(crate) fn mul_linear(&self, lin: &Self) -> Result<Self> {
        self.same_basis(lin)?;
        debug_assert!(
            lin.degree() <= 1,
            "mul_linear called with a factor of degree {}",
            lin.degree()
        );
        let nv = self.basis.nvars();
        let c0 = lin.coeffs[0];
        let lin_start = self.basis.degree_block(1).start;
        let mut out = Self::zeros(self.basis);
        out.truncated = self.truncated || lin.truncated;
        for r in 0..self.coeffs.len() {
            let a = self.coeffs[r];
            if a == T::zero() {
                continue;
            }
            if c0 != T::zero() {
                out.coeffs[r] += a * c0;
            }
            for j in 0..nv {
                let cj = lin.coeffs[lin_start + j];
                if cj == T::zero() {
                    continue;
                }
                if let Some(up) = self.basis.rank_up(r, j) {
                    out.coeffs[up] += a * cj;
                }
            }
        }
        Ok(out.flush())
    }

    // ───────────────────────── analytic operations ─────────────────────────

    /// Real power `self^r` for arbitrary real `r`.
    ///
    /// Writes `self = c₀ (1 + x)` with `x` the zero-constant-term part scaled
    /// by `1/c₀`, expands `(1 + x)^r` by the binomial series — exact for a
    /// truncated argument, since `x^k` has minimum degree `k` — via a Horner
    /// scheme in `x` (N truncated multiplications), then scales by `c₀^r`.
    ///
    /// # Errors
    /// [`Error::NonPositiveBase`] when the constant term's principal part is
    /// not strictly positive (no real branch);
    /// [`Error::NonFinite`] when the constant term is not finite.
    pub fn pow_real(&self, r: f64) -> Result<Self> {
        let c0 = self.coeffs[0];
        if !c0.is_finite_all() {
            return Err(Error::NonFinite {
                context: "pow_real constant term".into(),
            });
        }
        if c0.value() <= 0.0 {
            return Err(Error::NonPositiveBase { value: c0.value() });
        }
        let n = self.basis.order();
        // x = self / c₀ − 1 (zero constant term by construction).
        let mut x = self.scale(c0.recip());
        x.coeffs[0] = T::zero();

        // Binomial coefficients C(r, k) for k = 0..=N, exact recurrence.
        let mut binoms = Vec::with_capacity(n + 1);
        let mut b = 1.0f64;
        binoms.push(b);
        for k in 1..=n {
            b *= (r - (k as f64 - 1.0)) / k as f64;
            binoms.push(b);
        }

        // Horner in x: Σ C(r,k) x^k = C0 + x(C1 + x(C2 + …)).
        let mut acc = Self::constant(self.basis, T::from_f64(binoms[n]));
        for k in (0..n).rev() {
            acc = acc.mul(&x)?;
            acc.coeffs[0] += T::from_f64(binoms[k]);
        }
        let mut out = acc.scale(c0.powf_const(r));
        out.truncated = self.truncated;
        Ok(out)
    }

    /// Square root, `self^(1/2)`. See [`pow_real`](Self::pow_real).
    pub fn sqrt(&self) -> Result<Self> {
        self.pow_real(0.5)
    }

    /// Reciprocal, `self^(−1)`. See [`pow_real`](Self::pow_real).
    pub fn recip(&self) -> Result<Self> {
        self.pow_real(-1.0)
    }

    // ───────────────────────── calculus ─────────────────────────

    /// Partial derivative with respect to `u_j`.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if `j ≥ nvars`.
    pub fn partial(&self, j: usize) -> Result<Self> {
        if j >= self.basis.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "partial with respect to variable {j} of {}",
                self.basis.nvars()
            )));
        }
        let mut out = Self::zeros(self.basis);
        out.truncated = self.truncated;
        for r in 0..self.coeffs.len() {
            let c = self.coeffs[r];
            if c == T::zero() {
                continue;
            }
            if let Some(down) = self.basis.rank_down(r, j) {
                let e = self.basis.exponent(r)[j] as f64;
                out.coeffs[down] = c * T::from_f64(e);
            }
        }
        Ok(out.flush())
    }

    /// Antiderivative with respect to `u_j`, with zero integration constant.
    ///
    /// Degrees shift up by one; a nonzero coefficient at the truncation order
    /// has nowhere to go and is dropped, setting the sticky
    /// [`truncated`](Self::truncated) flag on the result.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if `j ≥ nvars`.
    pub fn antiderivative(&self, j: usize) -> Result<Self> {
        if j >= self.basis.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "antiderivative with respect to variable {j} of {}",
                self.basis.nvars()
            )));
        }
        let mut out = Self::zeros(self.basis);
        out.truncated = self.truncated;
        for r in 0..self.coeffs.len() {
            let c = self.coeffs[r];
            if c == T::zero() {
                continue;
            }
            match self.basis.rank_up(r, j) {
                Some(up) => {
                    let e = self.basis.exponent(r)[j] as f64;
                    out.coeffs[up] = c * T::from_f64(1.0 / (e + 1.0));
                }
                None => out.truncated = true,
            }
        }
        Ok(out.flush())
    }

    // ───────────────────────── evaluation ─────────────────────────

    /// Evaluates the series at a point.
    ///
    /// Monomial values are built by one multiplication each, ascending rank:
    /// `u^e = u^(e−δ_j) · u_j` with `j` the first active variable, the parent
    /// value being already available. Summation is in ascending degree, which
    /// for a convergent-series tail sums small terms late.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] on wrong point arity;
    /// [`Error::NonFinite`] if the point has non-finite components.
    pub fn eval(&self, point: &[T]) -> Result<T> {
        if point.len() != self.basis.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "evaluation point of dimension {} on {} variables",
                point.len(),
                self.basis.nvars()
            )));
        }
        if point.iter().any(|x| !x.is_finite_all()) {
            return Err(Error::NonFinite {
                context: "series evaluation point".into(),
            });
        }
        let len = self.coeffs.len();
        let mut mono = vec![T::zero(); len];
        mono[0] = T::one();
        let mut total = self.coeffs[0];
        for r in 1..len {
            // Parent product: strip one power of the first active variable.
            let j = self.basis.first_var(r).expect("rank ≥ 1 has a variable");
            let parent = self.basis.rank_down(r, j).expect("consistent with first_var");
            let v = mono[parent] * point[j];
            mono[r] = v;
            let c = self.coeffs[r];
            if c != T::zero() {
                total += c * v;
            }
        }
        Ok(total)
    }

    // ───────────────────────── composition ─────────────────────────

    /// Precomposition with a scaled linear map:
    /// returns the series `u ↦ self(scale · M u)`, with `M` given row-major
    /// (`nvars × nvars`). Degree is preserved, so the composition is exact
    /// (no truncation loss).
    ///
    /// The algorithm walks the exponent tree depth-first, maintaining the
    /// running product `Π_j ℓ_j(u)^{e_j}` of the substituted linear forms
    /// `ℓ_j = scale·(M u)_j`, so each tree edge costs one multiplication by a
    /// linear series.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if `matrix.len() != nvars²`.
    pub fn compose_linear(&self, matrix: &[T], scale: T) -> Result<Self> {
        let nv = self.basis.nvars();
        if matrix.len() != nv * nv {
            return Err(Error::DimensionMismatch(format!(
                "linear map with {} entries on {} variables",
                matrix.len(),
                nv
            )));
        }
        // ℓ_j(u) = scale · Σ_k M[j][k] u_k.
        let ells: Vec<Self> = (0..nv)
            .map(|j| {
                let row: Vec<T> = (0..nv).map(|k| scale * matrix[j * nv + k]).collect();
                Self::linear_form(self.basis, &row)
            })
            .collect::<Result<_>>()?;
        let mut acc = Self::zeros(self.basis);
        acc.truncated = self.truncated;
        let unit = Self::constant(self.basis, T::one());
        let mut prefix: Vec<u16> = Vec::with_capacity(nv);
        self.compose_rec(0, self.basis.order(), &mut prefix, &unit, &ells, &mut acc)?;
        Ok(acc.flush())
    }

    /// Depth-first walk for [`compose_linear`]: `prefix` holds exponents of
    /// the first `pos` variables, `prod = Π ℓ_j^{prefix_j}`, `rem` bounds the
    /// remaining total degree.
    fn compose_rec(
        &self,
        pos: usize,
        rem: usize,
        prefix: &mut Vec<u16>,
        prod: &Self,
        ells: &[Self],
        acc: &mut Self,
    ) -> Result<()> {
        let nv = self.basis.nvars();
        if pos == nv {
            let r = self
                .basis
                .rank_of(prefix)
                .expect("prefix constructed within bounds");
            let c = self.coeffs[r];
            if c != T::zero() {
                // acc += c · prod.
                for (a, p) in acc.coeffs.iter_mut().zip(&prod.coeffs) {
                    *a += c * *p;
                }
            }
            return Ok(());
        }
        let mut p = prod.clone();
        for k in 0..=rem {
            prefix.push(k as u16);
            self.compose_rec(pos + 1, rem - k, prefix, &p, ells, acc)?;
            prefix.pop();
            if k < rem {
                p = p.mul_linear(&ells[pos])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_series(b: &'static Basis, rng: &mut StdRng, max_degree: usize) -> MultiSeries<f64> {
        let mut s = MultiSeries::zeros(b);
        let end = b.degree_block(max_degree).end;
        for r in 0..end {
            s.coeffs[r] = rng.gen_range(-1.0..1.0);
        }
        s
    }

    #[test]
    fn product_matches_hand_expansion() {
        let b = basis(2, 4).unwrap();
        let x = MultiSeries::<f64>::variable(b, 0).unwrap();
        let y = MultiSeries::<f64>::variable(b, 1).unwrap();
        let one = MultiSeries::constant(b, 1.0);
        // (1 + x)(1 − x) = 1 − x².
        let p = one.add(&x).unwrap().mul(&one.sub(&x).unwrap()).unwrap();
        assert_eq!(p.coeff(&[0, 0]).unwrap(), 1.0);
        assert_eq!(p.coeff(&[1, 0]).unwrap(), 0.0);
        assert_eq!(p.coeff(&[2, 0]).unwrap(), -1.0);
        // (x + y)² = x² + 2xy + y².
        let s = x.add(&y).unwrap();
        let s2 = s.mul(&s).unwrap();
        assert_eq!(s2.coeff(&[2, 0]).unwrap(), 1.0);
        assert_eq!(s2.coeff(&[1, 1]).unwrap(), 2.0);
        assert_eq!(s2.coeff(&[0, 2]).unwrap(), 1.0);
    }

    #[test]
    fn multiplication_truncates_beyond_the_order() {
        let b = basis(2, 3).unwrap();
        let x = MultiSeries::<f64>::variable(b, 0).unwrap();
        let x3 = x.mul(&x).unwrap().mul(&x).unwrap();
        assert_eq!(x3.coeff(&[3, 0]).unwrap(), 1.0);
        // x³ · x = 0 after truncation at order 3.
        let x4 = x3.mul(&x).unwrap();
        assert!(x4.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn ring_axioms_hold_on_random_series() {
        let b = basis(4, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_series(b, &mut rng, 6);
            let c = random_series(b, &mut rng, 6);
            let d = random_series(b, &mut rng, 6);
            // Commutativity.
            let ac = a.mul(&c).unwrap();
            let ca = c.mul(&a).unwrap();
            for (x, y) in ac.coeffs().iter().zip(ca.coeffs()) {
                assert!((x - y).abs() < 1e-12);
            }
            // Associativity.
            let l = a.mul(&c).unwrap().mul(&d).unwrap();
            let r = a.mul(&c.mul(&d).unwrap()).unwrap();
            for (x, y) in l.coeffs().iter().zip(r.coeffs()) {
                assert!((x - y).abs() < 1e-11);
            }
            // Distributivity.
            let l2 = a.mul(&c.add(&d).unwrap()).unwrap();
            let r2 = a.mul(&c).unwrap().add(&a.mul(&d).unwrap()).unwrap();
            for (x, y) in l2.coeffs().iter().zip(r2.coeffs()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mul_linear_agrees_with_full_mul() {
        let b = basis(4, 8).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        let a = random_series(b, &mut rng, 8);
        let mut lin = MultiSeries::zeros(b);
        lin.coeffs[0] = 0.3;
        for r in b.degree_block(1) {
            lin.coeffs[r] = rng.gen_range(-1.0..1.0);
        }
        let full = a.mul(&lin).unwrap();
        let fast = a.mul_linear(&lin).unwrap();
        for (x, y) in full.coeffs().iter().zip(fast.coeffs()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn pow_real_squares_and_inverts_consistently() {
        let b = basis(3, 7).unwrap();
        let mut rng = StdRng::seed_from_u64(13);
        let mut a = random_series(b, &mut rng, 7).scale(0.2);
        a.coeffs[0] = 1.7; // strictly positive constant term
        // (a^½)² = a.
        let root = a.pow_real(0.5).unwrap();
        let sq = root.mul(&root).unwrap();
        for (x, y) in sq.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
        // a · a⁻¹ = 1.
        let inv = a.recip().unwrap();
        let unit = a.mul(&inv).unwrap();
        assert!((unit.coeff_at(0) - 1.0).abs() < 1e-12);
        assert!(unit.max_abs_tail(1) < 1e-12);
        // a^2 by pow_real matches mul.
        let p2 = a.pow_real(2.0).unwrap();
        let m2 = a.mul(&a).unwrap();
        for (x, y) in p2.coeffs().iter().zip(m2.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn pow_real_rejects_non_positive_constant_terms() {
        let b = basis(2, 3).unwrap();
        let x = MultiSeries::<f64>::variable(b, 0).unwrap();
        assert!(matches!(
            x.pow_real(0.5),
            Err(Error::NonPositiveBase { .. })
        ));
        let neg = MultiSeries::constant(b, -1.0);
        assert!(neg.sqrt().is_err());
    }

    #[test]
    fn calculus_round_trips_and_flags_truncation() {
        let b = basis(2, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(17);
        let a = random_series(b, &mut rng, 4); // top degree empty: no loss
        let back = a.antiderivative(0).unwrap().partial(0).unwrap();
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(!back.truncated());
        // A full-order series loses its top degree on antidifferentiation.
        let full = random_series(b, &mut rng, 5);
        assert!(full.antiderivative(1).unwrap().truncated());
        // Mixed partials commute.
        let d01 = a.partial(0).unwrap().partial(1).unwrap();
        let d10 = a.partial(1).unwrap().partial(0).unwrap();
        assert_eq!(d01.coeffs(), d10.coeffs());
    }

    #[test]
    fn leibniz_rule_holds() {
        let b = basis(3, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(19);
        let f = random_series(b, &mut rng, 3);
        let g = random_series(b, &mut rng, 3);
        let lhs = f.mul(&g).unwrap().partial(2).unwrap();
        let rhs = f
            .partial(2)
            .unwrap()
            .mul(&g)
            .unwrap()
            .add(&f.mul(&g.partial(2).unwrap()).unwrap())
            .unwrap();
        for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_matches_naive_monomial_summation() {
        let b = basis(4, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        let a = random_series(b, &mut rng, 5);
        let p = [0.3, -0.2, 0.15, 0.4];
        let direct: f64 = (0..b.len())
            .map(|r| {
                let e = b.exponent(r);
                a.coeff_at(r)
                    * p.iter()
                        .zip(e)
                        .map(|(x, &k)| x.powi(k as u32))
                        .product::<f64>()
            })
            .sum();
        let fast = a.eval(&p).unwrap();
        assert!((fast - direct).abs() < 1e-13);
        assert!(a.eval(&[f64::NAN, 0.0, 0.0, 0.0]).is_err());
        assert!(a.eval(&[0.0; 3]).is_err());
    }

    #[test]
    fn compose_linear_commutes_with_evaluation() {
        let b = basis(4, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(29);
        let a = random_series(b, &mut rng, 6);
        let m: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scale = 0.8;
        let composed = a.compose_linear(&m, scale).unwrap();
        for _ in 0..5 {
            let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-0.5..0.5));
            let mx: Vec<f64> = (0..4)
                .map(|i| scale * (0..4).map(|k| m[i * 4 + k] * x[k]).sum::<f64>())
                .collect();
            let lhs = composed.eval(&x).unwrap();
            let rhs = a.eval(&mx).unwrap();
            assert!((lhs - rhs).abs() < 1e-11, "lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn binary_operations_reject_mismatched_bases() {
        let a = MultiSeries::<f64>::constant(basis(4, 6).unwrap(), 1.0);
        let c = MultiSeries::<f64>::constant(basis(4, 7).unwrap(), 1.0);
        assert!(matches!(a.add(&c), Err(Error::DimensionMismatch(_))));
        assert!(a.mul(&c).is_err());
    }

    #[test]
    fn jet_coefficients_propagate_parameter_derivatives() {
        use crate::scalar::Jet;
        // d/dλ of (1 + λ·x)² = 2x(1 + λx): check the x-coefficient derivative.
        let b = basis(2, 4).unwrap();
        let lam0 = 0.7;
        let lam = Jet::<1>::variable(lam0, 0);
        let x = MultiSeries::<Jet<1>>::variable(b, 0).unwrap();
        let one = MultiSeries::constant(b, Jet::constant(1.0));
        let f = one.add(&x.scale(lam)).unwrap();
        let f2 = f.mul(&f).unwrap();
        let cx = f2.coeff(&[1, 0]).unwrap(); // 2λ
        assert!((cx.v - 2.0 * lam0).abs() < 1e-15);
        assert!((cx.d[0] - 2.0).abs() < 1e-15);
        let cxx = f2.coeff(&[2, 0]).unwrap(); // λ²
        assert!((cxx.d[0] - 2.0 * lam0).abs() < 1e-15);
    }
}
