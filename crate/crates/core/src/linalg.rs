//! Dense solves for the tiny systems that show up here (m ≤ a handful).

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot is exactly zero or not finite.
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        let p = a[pivot][col];
        if p == 0.0 || !p.is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

fn norm_one(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    (0..n)
        .map(|j| a.iter().map(|r| r[j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number, via the explicit inverse. Infinite when singular.
pub(crate) fn condition_estimate(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut inverse = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        match solve(a.to_vec(), e) {
            Some(col) => {
                for i in 0..n {
                    inverse[i][j] = col[i];
                }
            }
            None => return f64::INFINITY,
        }
    }
    norm_one(a) * norm_one(&inverse)
}
