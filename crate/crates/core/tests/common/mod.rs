//! Independent constructions shared by the oracle and acceptance tests.
#![allow(dead_code)]

use airace::{PayoffMatrix, Strategy};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng, scale: f64) -> PayoffMatrix {
    let matrix = (0..3)
        .map(|_| (0..3).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect();
    PayoffMatrix::new(Strategy::ALL.to_vec(), matrix).unwrap()
}

/// Probability of reaching `k = Z` from `k = 1` on the explicit chain,
/// from the interior equations `x_k = T⁻ x_{k−1} + T⁺ x_{k+1} + (1 − T⁺ − T⁻) x_k`.
pub fn absorbing_chain_fixation(
    pi: &PayoffMatrix,
    mutant: usize,
    resident: usize,
    z: usize,
    beta: f64,
) -> f64 {
    let (aa, ab) = (pi.at(mutant, mutant), pi.at(mutant, resident));
    let (ba, bb) = (pi.at(resident, mutant), pi.at(resident, resident));
    let zf = z as f64;
    let n = z - 1;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for k in 1..z {
        let kf = k as f64;
        // payoffs counted by brute force over the co-players of one focal
        let mut f_mutant = 0.0;
        let mut f_resident = 0.0;
        for other in 0..z {
            let other_is_mutant = other < k;
            if other != 0 {
                f_mutant += if other_is_mutant { aa } else { ab };
            }
            if other != k {
                f_resident += if other_is_mutant { ba } else { bb };
            }
        }
        f_mutant /= zf - 1.0;
        f_resident /= zf - 1.0;
        let meet = kf / zf * (zf - kf) / (zf - 1.0);
        let up = meet / (1.0 + (-beta * (f_mutant - f_resident)).exp());
        let down = meet / (1.0 + (-beta * (f_resident - f_mutant)).exp());
        let i = k - 1;
        diag[i] = up + down;
        if k > 1 {
            lower[i] = -down;
        }
        if k < z - 1 {
            upper[i] = -up;
        } else {
            rhs[i] = up;
        }
    }
    // Thomas algorithm; the system is a diagonally dominant M-matrix
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    }
    x[0]
}

/// Stationary weights of a 3-state chain as sums over spanning trees
/// directed into each state.
pub fn tree_stationary(t: &[Vec<f64>]) -> Vec<f64> {
    let w = [
        t[1][0] * t[2][0] + t[1][2] * t[2][0] + t[2][1] * t[1][0],
        t[0][1] * t[2][1] + t[0][2] * t[2][1] + t[2][0] * t[0][1],
        t[0][2] * t[1][2] + t[0][1] * t[1][2] + t[1][0] * t[0][2],
    ];
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}
