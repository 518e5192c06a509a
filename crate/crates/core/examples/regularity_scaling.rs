//! Per-shell seminorms of a solution reaching zero and their decay in `q`.

use roughpower::analysis::{scaling_study, Exponents, ScalingOptions};
use roughpower::coefficients::PowerCoefficient;
use roughpower::roughpath::FbmSpec;
use roughpower::solver::{solve_md_davie, SolverParams};

fn main() -> roughpower::Result<()> {
    let rp = FbmSpec::new(0.42, 1, 1 << 18, 4, 6).rough_path()?.with_gamma(0.4)?;
    let pc = PowerCoefficient::scalar(0.8, 4.0, f64::INFINITY)?;
    let sp = solve_md_davie(&pc, &[0.25], &rp, &SolverParams::new(0.4, 0.8)?)?;
    let exps = Exponents::new(0.4, 0.8)?;
    let report = scaling_study(&sp, &rp, &pc, &exps, &ScalingOptions::default())?;
    for c in [&report.y_slope, &report.remainder_slope, &report.r_slope] {
        println!(
            "{:>16}: slope {:.3} +- {:.3}, target {:.3}, pass {}",
            c.quantity, c.fit.slope, c.fit.slope_stderr, c.target, c.pass
        );
    }
    println!("fitted constants {:?}", report.fitted_constants);
    println!("{} shells; first rows of the CSV:", report.records.len());
    for line in report.to_csv().lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
