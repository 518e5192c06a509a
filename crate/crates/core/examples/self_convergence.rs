//! Self-convergence of the scheme for a capped two-dimensional coefficient.

use roughpower::analysis::convergence_study;
use roughpower::coefficients::{PowerCoefficient, Smoothing};
use roughpower::roughpath::FbmSpec;
use roughpower::solver::SolverParams;

fn main() -> roughpower::Result<()> {
    let rp = FbmSpec::new(0.45, 2, 1 << 14, 4, 11).rough_path()?;
    let pc = PowerCoefficient::new(0.7, 0.4, 1.5, vec![vec![1.0, 0.3], vec![-0.2, 1.0]], Smoothing::Mollified)?;
    let params = SolverParams::new(rp.gamma(), 0.7)?;
    let report = convergence_study(&pc, &[0.8, 0.6], &rp, &params, &[4, 8, 16, 32, 64])?;
    for (stride, mesh, err) in &report.levels {
        println!("stride {stride:>3} (mesh {mesh:.2e}): sup error {err:.3e}");
    }
    println!("observed order {:.3} (3 gamma - 1 = {:.3})", report.order.slope, 3.0 * rp.gamma() - 1.0);
    Ok(())
}
