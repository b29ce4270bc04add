//! Small dense helpers shared by the analysis and feedback layers.

use nalgebra::DMatrix;

use crate::multijet::Scalar;

/// Solves the square system `a·x = b` by Gaussian elimination with partial
/// pivoting on the real parts. Works for any [`Scalar`] so it can run inside
/// dual-number evaluations. Returns `None` when a pivot vanishes.
pub(crate) fn solve_generic<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].re().abs().total_cmp(&a[j][col].re().abs())
        })?;
        if a[pivot][col].re() == 0.0 || !a[pivot][col].re().is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] = a[row][k] - sub;
            }
            let sub = factor * b[col];
            b[row] = b[row] - sub;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Least squares `min ‖b·u − rhs‖` through the normal equations; `b` is
/// `rows × cols` with `rows ≥ cols`.
pub(crate) fn least_squares_generic<S: Scalar>(b: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    let cols = b.first().map_or(0, Vec::len);
    let mut normal = vec![vec![S::zero(); cols]; cols];
    let mut projected = vec![S::zero(); cols];
    for (row, &r) in b.iter().zip(rhs) {
        for i in 0..cols {
            projected[i] = projected[i] + row[i] * r;
            for k in 0..cols {
                normal[i][k] = normal[i][k] + row[i] * row[k];
            }
        }
    }
    solve_generic(normal, projected)
}

/// `σ_min / σ_max` over the `min(rows, cols)` singular values; zero for matrices with non-finite entries or no columns.
pub fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() || m.iter().any(|x| !x.is_finite()) {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// Numerical rank with singular values below `tol · σ_max` dropped.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * max).count()
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multijet::Dual;

    #[test]
    fn solves_with_pivoting() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        let x = solve_generic(a, vec![4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve_generic(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]).is_none());
    }

    #[test]
    fn least_squares_consistent_system() {
        // b = [[1,0],[0,1],[1,1]], u = (2, -1)
        let b = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let u = least_squares_generic(&b, &[2.0, -1.0, 1.0]).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-14 && (u[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn generic_solve_differentiates() {
        // x(t) solves [[t, 1],[1, 2]] x = (1, 0); dx/dt at t = 1 by duals vs. closed form.
        let t = Dual::variable(1.0);
        let one = Dual::constant(1.0);
        let two = Dual::constant(2.0);
        let x = solve_generic(vec![vec![t, one], vec![one, two]], vec![one, Dual::constant(0.0)]).unwrap();
        // x0 = 2 / (2t - 1), dx0/dt = -4 / (2t - 1)^2
        assert!((x[0].re - 2.0).abs() < 1e-14);
        assert!((x[0].eps + 4.0).abs() < 1e-13);
    }

    #[test]
    fn condition_and_rank() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-12]);
        assert!((reciprocal_condition(&m) - 1e-12).abs() < 1e-20);
        assert_eq!(numerical_rank(&m, 1e-9), 1);
        let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert_eq!(reciprocal_condition(&nan), 0.0);
    }
}
