//! Small dense Hermitian linear algebra on top of nalgebra.
//!
//! Everything here operates on `DMatrix<Complex64>` at the dimensions this
//! crate cares about (a few dozen levels), so the cubic-cost routines are
//! never the bottleneck.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(m.nrows(), m.ncols());
    for (c, &k) in order.iter().enumerate() {
        vectors.set_column(c, &se.eigenvectors.column(k));
    }
    (eigenvalues, vectors)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix: `V f(Λ) V†`.
/// Eigenvalues in `[-clip, 0)` are set to zero before `f` is applied.
pub fn hermitian_map(
    m: &DMatrix<Complex64>,
    clip: f64,
    f: impl Fn(f64) -> f64,
) -> DMatrix<Complex64> {
    let (eigenvalues, v) = hermitian_eigen(m);
    let d = DVector::from_iterator(
        eigenvalues.len(),
        eigenvalues.iter().map(|&lambda| {
            let lambda = if lambda < 0.0 && lambda >= -clip {
                0.0
            } else {
                lambda
            };
            Complex64::new(f(lambda), 0.0)
        }),
    );
    let mut scaled = v.clone();
    for c in 0..scaled.ncols() {
        let col = scaled.column(c) * d[c];
        scaled.set_column(c, &col);
    }
    scaled * v.adjoint()
}

/// Fractional power `m^x` on the support: zero eigenvalues map to zero for
/// any `x` (including negative), so the power is taken on the support only.
pub fn hermitian_pow(m: &DMatrix<Complex64>, x: f64, clip: f64) -> DMatrix<Complex64> {
    hermitian_map(
        m,
        clip,
        |lambda| if lambda <= 0.0 { 0.0 } else { lambda.powf(x) },
    )
}

/// Real part of the trace.
pub fn trace_re(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows()).map(|k| m[(k, k)].re).sum()
}

/// `Tr[a b]`, real part.
pub fn trace_product_re(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let mut t = 0.0;
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            t += (a[(r, c)] * b[(c, r)]).re;
        }
    }
    t
}

/// Von Neumann entropy `-Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(m: &DMatrix<Complex64>, clip: f64) -> f64 {
    let (eigenvalues, _) = hermitian_eigen(m);
    -eigenvalues
        .iter()
        .filter(|&&lambda| lambda > clip)
        .map(|&lambda| lambda * lambda.ln())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigen_of_real_symmetric_2x2() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let (eig, v) = hermitian_eigen(&m);
        assert_abs_diff_eq!(eig[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 3.0, epsilon = 1e-12);
        let reconstructed =
            &v * DMatrix::from_diagonal(&DVector::from_vec(vec![
                Complex64::new(eig[0], 0.0),
                Complex64::new(eig[1], 0.0),
            ])) * v.adjoint();
        for r in 0..2 {
            for c in 0..2 {
                assert!((reconstructed[(r, c)] - m[(r, c)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_handles_complex_entries() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -0.5),
                Complex64::new(0.0, 0.5),
                Complex64::new(1.0, 0.0),
            ],
        );
        let (eig, _) = hermitian_eigen(&m);
        assert_abs_diff_eq!(eig[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn pow_on_support_only() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let r = hermitian_pow(&m, -0.5, 1e-10);
        assert_abs_diff_eq!(r[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[(1, 1)].re, 0.0, epsilon = 1e-12);
    }
}
