mod common;

use lowthrust_mpc::socp::{SolverSettings, SolverStatus};
use lowthrust_mpc::tracker::{solve_segment, solve_segment_dense};

#[test]
fn segment_solutions_match_dual_oracle() {
    let settings = SolverSettings::default();
    for seed in 0..24 {
        let p = common::random_segment(seed);
        let sol = solve_segment(&p, &settings);
        assert_eq!(sol.status, SolverStatus::Optimal, "seed {seed}");
        let (lo, hi) = common::dual_bounds(&p);
        let scale = sol.objective.abs().max(1e-3);
        assert!(
            hi - lo <= 1e-8 * scale,
            "seed {seed}: oracle bracket [{lo}, {hi}]"
        );
        assert!(
            (sol.objective - lo).abs() <= 1e-6 * scale,
            "seed {seed}: solver {} oracle {lo}",
            sol.objective
        );
        assert!(
            sol.primal_residual <= 1e-8 && sol.dual_residual <= 1e-8,
            "seed {seed}: residuals {} {}",
            sol.primal_residual,
            sol.dual_residual
        );
        // The unpacked controls respect the bounds and reproduce the objective.
        for (k, a) in sol.accels.iter().enumerate() {
            assert!(a.norm() <= p.bounds[k] * (1.0 + 1e-12));
        }
        let direct = p.objective(&sol.accels);
        assert!(
            (direct - sol.objective).abs() <= 1e-6 * scale,
            "seed {seed}: {direct} vs {}",
            sol.objective
        );
        assert!(sol.objective <= sol.guess_objective + 1e-9 * scale);
    }
}

#[test]
fn structured_and_dense_backends_agree_on_random_segments() {
    let settings = SolverSettings::default();
    for seed in 100..110 {
        let p = common::random_segment(seed);
        let a = solve_segment(&p, &settings);
        let b = solve_segment_dense(&p, &settings);
        assert_eq!(b.status, SolverStatus::Optimal);
        assert!(
            (a.objective - b.objective).abs() <= 1e-6 * b.objective.abs().max(1e-3),
            "seed {seed}"
        );
    }
}
