//! Gaps between successive shell entries, on a ramp and on an fBm-driven solution.

use roughpower::analysis::{gap_study, Exponents, GapOptions};
use roughpower::coefficients::PowerCoefficient;
use roughpower::roughpath::FbmSpec;
use roughpower::solver::{solve_md_davie, track_radii, SolverParams};

fn main() -> roughpower::Result<()> {
    let n = 1 << 16;
    let times: Vec<f64> = (0..n - n / 4096).map(|i| i as f64 / n as f64).collect();
    let radii: Vec<f64> = times.iter().map(|t| 1.0 - t).collect();
    let ramp = track_radii(&times, &radii);
    for (q, gap) in ramp.gaps().into_iter().filter(|g| g.0 >= 0).take(8) {
        println!("ramp q = {q:>2}: gap {gap:.6}, closed form {:.6}", 0.375 * 2f64.powi(-q));
    }

    let rp = FbmSpec::new(0.42, 1, 1 << 18, 4, 6).rough_path()?.with_gamma(0.4)?;
    let pc = PowerCoefficient::scalar(0.8, 4.0, f64::INFINITY)?;
    let sp = solve_md_davie(&pc, &[0.25], &rp, &SolverParams::new(0.4, 0.8)?)?;
    let exps = Exponents::new(0.4, 0.8)?;
    let report = gap_study(&sp.shells, &exps, &GapOptions::default())?;
    println!(
        "fBm: gap exponent {:.3} +- {:.3}, references [{:.3}, {:.3}], band {:?}, pass {}",
        report.fit.slope, report.fit.slope_stderr, report.lower_reference, report.upper_reference, report.band, report.pass
    );
    Ok(())
}
