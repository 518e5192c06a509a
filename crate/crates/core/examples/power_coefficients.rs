//! Power-type coefficients and the hypothesis checks run on them.

use roughpower::coefficients::{default_domain, verify_hypotheses, PowerCoefficient, Smoothing};

fn main() -> roughpower::Result<()> {
    let pc = PowerCoefficient::scalar(0.8, 1.0, f64::INFINITY)?;
    println!("sigma(0.5) = {:?}, (D sigma . sigma)(0.5) = {:?}", pc.sigma(&[0.5]), pc.dsigma_sigma(&[0.5])?);
    let lam = pc.lamperti()?;
    println!("phi(0.5) = {:.5}, phi^-1(phi(0.5)) = {:.5}", lam.phi(0.5)?, lam.phi_inverse(lam.phi(0.5)?)?);

    for (kappa, gamma) in [(0.8, 0.4), (0.3, 0.4)] {
        let pc = PowerCoefficient::scalar(kappa, 1.0, f64::INFINITY)?;
        let report = verify_hypotheses(&pc, gamma, &default_domain(&pc))?;
        println!("kappa = {kappa}, gamma = {gamma}: all pass = {}, failures {:?}", report.all_pass(), report.failures());
    }

    let capped = PowerCoefficient::new(0.7, 1.0, 0.5, vec![vec![1.0, 0.0], vec![0.5, 1.0]], Smoothing::Mollified)?;
    println!("cap radius {:.4}", capped.cap_radius());
    for r in [0.1, 0.3, 0.37, 0.5, 1.0] {
        println!("  |sigma| at radius {r}: {:.5}", capped.sigma(&[r, 0.0]).iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    Ok(())
}
