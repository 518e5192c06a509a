//! Scalar equations: the closed-form solution against the general scheme,
//! and the two solutions started from zero.

use roughpower::coefficients::PowerCoefficient;
use roughpower::increments::TimeGrid;
use roughpower::roughpath::RoughPath;
use roughpower::solver::{solve_1d_lamperti, solve_md_davie, SolverParams, ZeroMode};

fn main() -> roughpower::Result<()> {
    let rp = RoughPath::from_smooth(
        TimeGrid::uniform(1 << 12, 1.0)?,
        1,
        |t, v| v[0] = -2.6 * t + 0.4 * (7.0 * t).sin(),
        |t, v| v[0] = -2.6 + 2.8 * (7.0 * t).cos(),
        1.0,
    )?;
    let pc = PowerCoefficient::scalar(0.5, 1.0, f64::INFINITY)?;
    let exact = solve_1d_lamperti(&pc, 1.0, rp.x(), ZeroMode::Absorb)?.solution;
    let md = solve_md_davie(&pc, &[1.0], &rp, &SolverParams::new(1.0, 0.5)?)?;
    println!("closed form reaches zero at {:?}, scheme at {:?}", exact.zero_time(), md.zero_time());
    let diff = md
        .grid_indices
        .iter()
        .enumerate()
        .map(|(p, &i)| (md.y.at(p)[0] - exact.y.at(i)[0]).abs())
        .fold(0.0, f64::max);
    println!("sup difference {diff:.2e}");

    let from_zero = solve_1d_lamperti(&pc, 0.0, rp.x(), ZeroMode::Absorb)?;
    let trivial = from_zero.trivial.expect("zero start has a trivial branch");
    println!("a = 0: nontrivial y_1 = {:.5}, trivial y_1 = {}", from_zero.solution.y.at(rp.len() - 1)[0], trivial.y.at(rp.len() - 1)[0]);
    Ok(())
}
