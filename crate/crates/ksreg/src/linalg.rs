//! Small fixed-size linear algebra over a generic [`Scalar`].
//!
//! The KS geometry lives in dimensions 3 and 4, and several maps must run on
//! jet scalars (for exact parameter derivatives), which rules out the `f64`
//! matrix types of general-purpose crates for those paths. These helpers are
//! the minimal set of array-based operations the geometric kernels need;
//! anything requiring factorizations (LU solves, SVD ranks) is done in `f64`
//! with `nalgebra` at the call sites.

use crate::scalar::Scalar;

/// `m · v` for a 4×4 matrix in row-major `[[T; 4]; 4]` layout.
#[inline]
pub fn matvec4<T: Scalar>(m: &[[T; 4]; 4], v: &[T; 4]) -> [T; 4] {
    let mut out = [T::zero(); 4];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

/// Transpose of a 4×4 matrix.
#[inline]
pub fn transpose4<T: Scalar>(m: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[j][i] = m[i][j];
        }
    }
    out
}

/// Matrix product of two 4×4 matrices.
#[inline]
pub fn matmul4<T: Scalar>(a: &[[T; 4]; 4], b: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// `m · v` for a 3×3 matrix in row-major layout.
#[inline]
pub fn matvec3<T: Scalar>(m: &[[T; 3]; 3], v: &[T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

/// Transpose of a 3×3 matrix.
#[inline]
pub fn transpose3<T: Scalar>(m: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = m[i][j];
        }
    }
    out
}

/// Euclidean inner product in R⁴.
#[inline]
pub fn dot4<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Euclidean inner product in R³.
#[inline]
pub fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Cross product in R³.
#[inline]
pub fn cross3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Squared Euclidean norm in R⁴.
#[inline]
pub fn norm2_4<T: Scalar>(a: &[T; 4]) -> T {
    dot4(a, a)
}

/// Squared Euclidean norm in R³.
#[inline]
pub fn norm2_3<T: Scalar>(a: &[T; 3]) -> T {
    dot3(a, a)
}

/// Component-wise `a + c·b` in R⁴.
#[inline]
pub fn axpy4<T: Scalar>(a: &[T; 4], c: T, b: &[T; 4]) -> [T; 4] {
    [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]]
}

/// Component-wise difference in R⁴.
#[inline]
pub fn sub4<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> [T; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Scale a 4-vector.
#[inline]
pub fn scale4<T: Scalar>(c: T, a: &[T; 4]) -> [T; 4] {
    [c * a[0], c * a[1], c * a[2], c * a[3]]
}

/// Maximum absolute value (of principal parts) over a slice.
#[inline]
pub fn max_abs<T: Scalar>(xs: &[T]) -> f64 {
    xs.iter().fold(0.0_f64, |m, x| m.max(x.abs_value()))
}

/// Euclidean norm of an `f64` slice.
#[inline]
pub fn norm_f64(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matvec_transpose_agree() {
        let a = [
            [1.0, 2.0, 0.0, -1.0],
            [0.5, -3.0, 4.0, 2.0],
            [2.0, 1.0, 1.0, 0.0],
            [-1.0, 0.0, 3.0, 1.0],
        ];
        let v = [1.0, -2.0, 0.5, 3.0];
        // (Aᵀ)ᵀ = A and A·v agree with the naive sum.
        assert_eq!(transpose4(&transpose4(&a)), a);
        let av = matvec4(&a, &v);
        for i in 0..4 {
            let s: f64 = (0..4).map(|j| a[i][j] * v[j]).sum();
            assert!((av[i] - s).abs() < 1e-15);
        }
        // (A·A)·v = A·(A·v).
        let aa = matmul4(&a, &a);
        let lhs = matvec4(&aa, &v);
        let rhs = matvec4(&a, &av);
        for i in 0..4 {
            assert!((lhs[i] - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_product_is_orthogonal() {
        let a: [f64; 3] = [1.0, 2.0, 3.0];
        let b: [f64; 3] = [-0.5, 4.0, 1.0];
        let c = cross3(&a, &b);
        assert!(dot3(&a, &c).abs() < 1e-15);
        assert!(dot3(&b, &c).abs() < 1e-15);
    }
}
