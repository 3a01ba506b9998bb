//! Central finite-difference gradient oracle. Kept deliberately independent
//! of the analytic backward pass so the two can be checked against each
//! other.

use crate::matrix::DenseMatrix;

/// Approximates `d loss / d at` entry by entry with central differences
/// `(f(x+h) - f(x-h)) / 2h`. Panics if the loss comes back non-finite.
pub fn finite_diff_grad(
    mut loss_fn: impl FnMut(&DenseMatrix) -> f64,
    at: &DenseMatrix,
    h: f64,
) -> DenseMatrix {
    assert!(h > 0.0, "step must be positive");
    let (rows, cols) = at.shape();
    let mut grad = DenseMatrix::zeros(rows, cols);
    let mut probe = at.clone();
    for i in 0..rows {
        for j in 0..cols {
            let orig = probe.get(i, j);
            probe.set(i, j, orig + h);
            let plus = loss_fn(&probe);
            probe.set(i, j, orig - h);
            let minus = loss_fn(&probe);
            probe.set(i, j, orig);
            assert!(
                plus.is_finite() && minus.is_finite(),
                "loss non-finite at ({i}, {j})"
            );
            grad.set(i, j, (plus - minus) / (2.0 * h));
        }
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::glorot_init;
    use crate::rng::SplitMix64;

    fn sum_of_squares(m: &DenseMatrix) -> f64 {
        m.data().iter().map(|x| x * x).sum()
    }

    #[test]
    fn sum_of_squares_gradient() {
        let at = DenseMatrix::from_rows(&[[1.0, 2.0]]);
        let grad = finite_diff_grad(sum_of_squares, &at, 1e-5);
        // d/dx sum x^2 = 2x
        assert!((grad.get(0, 0) - 2.0).abs() < 1e-8);
        assert!((grad.get(0, 1) - 4.0).abs() < 1e-8);
    }

    #[test]
    fn constant_loss_gives_zero() {
        let at = DenseMatrix::from_rows(&[[3.0, -1.0], [0.5, 2.0]]);
        let grad = finite_diff_grad(|_| 42.0, &at, 1e-5);
        assert_eq!(grad, DenseMatrix::zeros(2, 2));
    }

    #[test]
    fn trace_xtx_gradient_is_2x() {
        // trace(X^T X) is the sum of squares of all entries, gradient 2X.
        let x = glorot_init(2, 2, &mut SplitMix64::new(9));
        let grad = finite_diff_grad(
            |m| {
                let xtx = m.transpose().matmul(m);
                (0..xtx.rows()).map(|i| xtx.get(i, i)).sum()
            },
            &x,
            1e-5,
        );
        for i in 0..2 {
            for j in 0..2 {
                assert!((grad.get(i, j) - 2.0 * x.get(i, j)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn error_shrinks_quadratically() {
        // For f(x) = x^4 the central-difference error term is O(h^2); the
        // measured error should drop by about 100x when h drops by 10x.
        let at = DenseMatrix::from_rows(&[[1.5]]);
        let f = |m: &DenseMatrix| m.get(0, 0).powi(4);
        let exact = 4.0 * 1.5f64.powi(3);
        let err = |h: f64| (finite_diff_grad(f, &at, h).get(0, 0) - exact).abs();
        let coarse = err(1e-2);
        let fine = err(1e-3);
        assert!(fine < coarse / 50.0, "coarse {coarse}, fine {fine}");
    }
}
