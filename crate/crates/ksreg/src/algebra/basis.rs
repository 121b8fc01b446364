//! Monomial bases for dense truncated multivariate power series.
//!
//! A [`Basis`] fixes a variable count `nvars` and a truncation order `N` and
//! enumerates every monomial of total degree ≤ N in *graded lexicographic*
//! order: ascending total degree, and within each degree block descending
//! lexicographic exponent (so degree 2 in two variables lists `u₁², u₁u₂,
//! u₂²`). The position of a monomial in this enumeration is its **rank**; a
//! series is stored as one coefficient per rank.
//!
//! Alongside the enumeration, a basis precomputes the index tables that make
//! series arithmetic cheap and allocation-free:
//!
//! * `shift_up[j]`/`shift_down[j]` — rank of `e ± δ_j` for every rank
//!   (sentinel when the shift leaves the truncation or hits a zero exponent);
//!   these drive differentiation, antidifferentiation, multiplication by
//!   linear forms, and the monomial-evaluation recursion;
//! * a lazily built **multiplication table**: every ordered pair of ranks
//!   whose degrees sum within the truncation, with the rank of the product
//!   monomial. Full products are a single pass over this table.
//!
//! Bases are interned: [`basis`] returns a `&'static Basis` per
//! `(nvars, order)` pair, built once and deliberately leaked (the set of
//! configurations is tiny and process-lifetime, which frees every series from
//! carrying ownership or lifetimes).

use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::tol;

/// Sentinel rank for "no such monomial" in the shift tables.
pub const NO_RANK: u32 = u32::MAX;

/// Monomial enumeration and index tables for a fixed `(nvars, order)`.
///
/// Obtain instances through [`basis`]; they cannot be constructed directly.
/// All tables are immutable after construction except the multiplication
/// table, which is built on first use behind a [`OnceLock`].
pub struct Basis {
    nvars: usize,
    order: usize,
    /// Exponent tuples, rank-major: `exponents[r*nvars .. (r+1)*nvars]`.
    exponents: Vec<u16>,
    /// `offsets[d]` = rank of the first monomial of total degree `d`;
    /// `offsets[order + 1]` = total number of monomials.
    offsets: Vec<usize>,
    /// Total degree of each rank (redundant with `offsets`, kept for O(1) access).
    degrees: Vec<u8>,
    /// `shift_up[j][r]` = rank of `exponent(r) + δ_j`, or [`NO_RANK`].
    shift_up: Vec<Vec<u32>>,
    /// `shift_down[j][r]` = rank of `exponent(r) − δ_j`, or [`NO_RANK`].
    shift_down: Vec<Vec<u32>>,
    /// Index of the first variable with a nonzero exponent (u8::MAX for rank 0).
    first_var: Vec<u8>,
    /// Pascal triangle `binom[n][k]`, `n ≤ order + nvars`.
    binom: Vec<Vec<usize>>,
    /// Ordered pairs `(ra, rb, rank(ea + eb))` with `deg(ra) + deg(rb) ≤ order`.
    mul_table: OnceLock<Vec<(u32, u32, u32)>>,
}

impl Basis {
    /// Number of variables.
    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Truncation order (maximum total degree).
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of monomials, `C(order + nvars, nvars)`.
    #[inline]
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    /// True only for the degenerate case (never constructed).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Exponent tuple of a rank.
    #[inline]
    pub fn exponent(&self, rank: usize) -> &[u16] {
        &self.exponents[rank * self.nvars..(rank + 1) * self.nvars]
    }

    /// Total degree of a rank.
    #[inline]
    pub fn degree_of(&self, rank: usize) -> usize {
        self.degrees[rank] as usize
    }

    /// Rank range `[start, end)` of the degree-`d` block.
    #[inline]
    pub fn degree_block(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    /// First variable with a nonzero exponent at `rank` (rank 0 ⇒ `None`).
    #[inline]
    pub fn first_var(&self, rank: usize) -> Option<usize> {
        let v = self.first_var[rank];
        (v != u8::MAX).then_some(v as usize)
    }

    /// Rank of `exponent(rank) + δ_j`, if still within the truncation.
    #[inline]
    pub fn rank_up(&self, rank: usize, j: usize) -> Option<usize> {
        let r = self.shift_up[j][rank];
        (r != NO_RANK).then_some(r as usize)
    }

    /// Rank of `exponent(rank) − δ_j`, if the exponent of `u_j` is nonzero.
    #[inline]
    pub fn rank_down(&self, rank: usize, j: usize) -> Option<usize> {
        let r = self.shift_down[j][rank];
        (r != NO_RANK).then_some(r as usize)
    }

    /// Binomial coefficient from the precomputed Pascal table.
    #[inline]
    fn choose(&self, n: usize, k: usize) -> usize {
        self.binom[n][k]
    }

    /// Number of monomials in `v` variables of total degree exactly `s`.
    #[inline]
    fn count_exact(&self, v: usize, s: usize) -> usize {
        if v == 0 {
            return usize::from(s == 0);
        }
        self.choose(s + v - 1, v - 1)
    }

    /// Rank of an exponent tuple.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] for a tuple of the wrong length,
    /// [`Error::DegreeOutOfRange`] when the total degree exceeds the order.
    pub fn rank_of(&self, exponent: &[u16]) -> Result<usize> {
        if exponent.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "exponent tuple has {} entries, basis has {} variables",
                exponent.len(),
                self.nvars
            )));
        }
        let degree: usize = exponent.iter().map(|&e| e as usize).sum();
        if degree > self.order {
            return Err(Error::DegreeOutOfRange {
                exponent: exponent.to_vec(),
                degree,
                order: self.order,
            });
        }
        Ok(self.rank_of_unchecked(exponent, degree))
    }

    /// Rank computation proper: combinatorial counting, no allocation.
    ///
    /// Within the degree-`d` block, tuples are ordered by descending first
    /// exponent, then recursively on the tail; the rank is the block offset
    /// plus the number of tuples that precede (i.e. have a larger entry at
    /// the first position where they differ).
    #[inline]
    fn rank_of_unchecked(&self, exponent: &[u16], degree: usize) -> usize {
        let mut rank = self.offsets[degree];
        let mut rem = degree;
        for pos in 0..self.nvars - 1 {
            let e = exponent[pos] as usize;
            let tail_vars = self.nvars - pos - 1;
            // Count tuples whose entry at `pos` exceeds `e`.
            for k in (e + 1)..=rem {
                rank += self.count_exact(tail_vars, rem - k);
            }
            rem -= e;
        }
        rank
    }

    /// The multiplication table, built on first use.
    ///
    /// Entries are ordered pairs `(ra, rb, rc)` with
    /// `exponent(rc) = exponent(ra) + exponent(rb)`, enumerated in ascending
    /// `(ra, rb)`; products of monomials whose degrees sum beyond the order
    /// are absent (truncation happens by construction, not by filtering).
    pub fn mul_table(&self) -> &[(u32, u32, u32)] {
        self.mul_table.get_or_init(|| {
            let mut table = Vec::new();
            let mut sum = vec![0u16; self.nvars];
            for ra in 0..self.len() {
                let da = self.degree_of(ra);
                let ea = self.exponent(ra).to_vec();
                // Ranks are degree-sorted, so the compatible rb form a prefix.
                let rb_end = self.offsets[self.order - da + 1];
                for rb in 0..rb_end {
                    let eb = self.exponent(rb);
                    for (s, (&a, &b)) in sum.iter_mut().zip(ea.iter().zip(eb)) {
                        *s = a + b;
                    }
                    let dc = da + self.degree_of(rb);
                    let rc = self.rank_of_unchecked(&sum, dc);
                    table.push((ra as u32, rb as u32, rc as u32));
                }
            }
            table
        })
    }
}

/// Builds the full basis for `(nvars, order)`. Internal; see [`basis`].
fn build(nvars: usize, order: usize) -> Basis {
    // Step 1: Pascal triangle up to the largest n the rank formula needs.
    let nmax = order + nvars;
    let mut binom = vec![vec![0usize; nmax + 1]; nmax + 1];
    for (n, row) in binom.iter_mut().enumerate() {
        row[0] = 1;
        for k in 1..=n {
            // Each row is built from the previous; row n has n+1 entries.
            row[k] = if k == n { 1 } else { 0 };
        }
    }
    for n in 2..=nmax {
        for k in 1..n {
            binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
        }
    }

    // Step 2: enumerate exponent tuples degree by degree, descending
    // lexicographic within each degree block.
    let mut exponents: Vec<u16> = Vec::new();
    let mut offsets = vec![0usize; order + 2];
    let mut degrees: Vec<u8> = Vec::new();
    let mut tuple = vec![0u16; nvars];
    for d in 0..=order {
        offsets[d] = degrees.len();
        enumerate_degree(nvars, d, 0, &mut tuple, &mut |t| {
            exponents.extend_from_slice(t);
            degrees.push(d as u8);
        });
        offsets[d + 1] = degrees.len();
    }
    let len = degrees.len();

    let mut basis = Basis {
        nvars,
        order,
        exponents,
        offsets,
        degrees,
        shift_up: Vec::new(),
        shift_down: Vec::new(),
        first_var: Vec::new(),
        binom,
        mul_table: OnceLock::new(),
    };

    // Step 3: shift tables and first-variable index from the enumeration.
    let mut shift_up = vec![vec![NO_RANK; len]; nvars];
    let mut shift_down = vec![vec![NO_RANK; len]; nvars];
    let mut first_var = vec![u8::MAX; len];
    let mut work = vec![0u16; nvars];
    for r in 0..len {
        let d = basis.degree_of(r);
        let e = basis.exponent(r).to_vec();
        if let Some(j) = e.iter().position(|&x| x > 0) {
            first_var[r] = j as u8;
        }
        for j in 0..nvars {
            if d < order {
                work.copy_from_slice(&e);
                work[j] += 1;
                shift_up[j][r] = basis.rank_of_unchecked(&work, d + 1) as u32;
            }
            if e[j] > 0 {
                work.copy_from_slice(&e);
                work[j] -= 1;
                shift_down[j][r] = basis.rank_of_unchecked(&work, d - 1) as u32;
            }
        }
    }
    basis.shift_up = shift_up;
    basis.shift_down = shift_down;
    basis.first_var = first_var;
    basis
}

/// Visits every `nvars`-tuple of total degree exactly `d`, descending
/// lexicographically, writing into `tuple[pos..]`.
fn enumerate_degree(
    nvars: usize,
    rem: usize,
    pos: usize,
    tuple: &mut Vec<u16>,
    visit: &mut impl FnMut(&[u16]),
) {
    if pos == nvars - 1 {
        tuple[pos] = rem as u16;
        visit(tuple);
        return;
    }
    for k in (0..=rem).rev() {
        tuple[pos] = k as u16;
        enumerate_degree(nvars, rem - k, pos + 1, tuple, visit);
    }
}

/// Process-wide intern table of bases.
static REGISTRY: Mutex<Vec<(usize, usize, &'static Basis)>> = Mutex::new(Vec::new());

/// Returns the interned basis for `(nvars, order)`, building it on first use.
///
/// The crate's pipelines use 4 variables (KS) and 2 (Levi-Civita); variable
/// counts up to 4 and orders 1..=[`tol::MAX_ORDER`] are accepted, which keeps
/// every multiplication table comfortably bounded.
///
/// # Errors
/// [`Error::InvalidParameter`] outside those ranges.
pub fn basis(nvars: usize, order: usize) -> Result<&'static Basis> {
    if !(1..=4).contains(&nvars) {
        return Err(Error::InvalidParameter(format!(
            "nvars = {nvars}: supported range is 1..=4"
        )));
    }
    if !(1..=tol::MAX_ORDER).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "order = {order}: supported range is 1..={}",
            tol::MAX_ORDER
        )));
    }
    let mut reg = REGISTRY.lock().expect("basis registry poisoned");
    if let Some(&(_, _, b)) = reg.iter().find(|(v, o, _)| *v == nvars && *o == order) {
        return Ok(b);
    }
    let b: &'static Basis = Box::leak(Box::new(build(nvars, order)));
    reg.push((nvars, order, b));
    Ok(b)
}
