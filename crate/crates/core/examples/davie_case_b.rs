//! A scalar solution driven by fBm that reaches zero, with its shell ladder.

use roughpower::coefficients::PowerCoefficient;
use roughpower::roughpath::FbmSpec;
use roughpower::solver::{solve_md_davie, SolverParams};

fn main() -> roughpower::Result<()> {
    let rp = FbmSpec::new(0.42, 1, 1 << 18, 4, 6).rough_path()?.with_gamma(0.4)?;
    let pc = PowerCoefficient::scalar(0.8, 4.0, f64::INFINITY)?;
    let params = SolverParams::new(0.4, 0.8)?;
    let sp = solve_md_davie(&pc, &[0.25], &rp, &params)?;
    println!("case {:?}, zero at {:?}, {} shells", sp.case, sp.zero_time(), sp.shells.len());
    println!("unresolved jumps {}, invariant violations {}", sp.unresolved_jumps, sp.check_shells().len());
    for e in sp.shells.entries.iter().take(12) {
        println!("  q = {:>2}  lambda = {:.6}  tau = {:?}", e.q, e.lambda, e.tau);
    }
    println!("approaching zero over the last 20 shells: {}", sp.shells.approaches_zero(20));
    Ok(())
}
