//! Simulated fixation against the analytic values over a grid of
//! population sizes, selection strengths and random games.

use airace::evodyn::{AnalyticFixation, FixationSolver};
use airace::mcsim::{simulate_fixation_at, SimConfig};
use airace::{DynamicsParams, PayoffMatrix, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn simulation_agrees_in_most_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let games: Vec<PayoffMatrix> = (0..5)
        .map(|_| {
            let matrix = (0..3)
                .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            PayoffMatrix::new(Strategy::ALL.to_vec(), matrix).unwrap()
        })
        .collect();

    let runs = 4_000;
    let mut cells = 0;
    let mut agree = 0;
    for beta in [0.0, 0.1, 1.0] {
        for z in [10, 50, 100] {
            let d = DynamicsParams::new(z, beta);
            for (g, pi) in games.iter().enumerate() {
                let (mutant, resident) = (g % 3, (g + 1) % 3);
                let rho = AnalyticFixation.fixation(pi, mutant, resident, &d).unwrap();
                let cfg = SimConfig::new(runs, (z as u64) << 8 | g as u64, 10_000_000);
                let est = simulate_fixation_at(pi, mutant, resident, &d, &cfg).unwrap();
                assert_eq!(est.non_absorbed, 0);
                let se = (rho * (1.0 - rho) / runs as f64).sqrt().max(est.std_error);
                cells += 1;
                if (est.estimate - rho).abs() <= 3.0 * se {
                    agree += 1;
                }
            }
        }
    }
    assert_eq!(cells, 45);
    assert!(agree as f64 >= 0.95 * cells as f64, "{agree}/{cells}");
}
