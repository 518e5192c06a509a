//! Compensated Riemann sums for a smooth function of an fBm rough path.

use roughpower::controlled::{compose_smooth, rough_integral, sewing_consistency, FnMap};
use roughpower::roughpath::FbmSpec;

fn main() -> roughpower::Result<()> {
    let rp = FbmSpec::new(0.4, 2, 2048, 4, 3).rough_path()?;
    // integrand (cos x2, x1) so that int f(x) dx = int cos(x2) dx1 + x1 dx2
    let f = FnMap::new(
        2,
        2,
        |x: &[f64], o: &mut [f64]| {
            o[0] = x[1].cos();
            o[1] = x[0];
        },
        |x: &[f64], j: &mut [f64]| {
            j.copy_from_slice(&[0.0, -x[1].sin(), 1.0, 0.0]);
        },
    );
    let m = compose_smooth(&f, 1.0, &rp)?;
    let n = rp.len() - 1;
    let whole = rough_integral(&m, 0, n)?;
    let left = rough_integral(&m, 0, n / 3)?;
    let right = rough_integral(&m, n / 3, n)?;
    println!("int_0^1 = {:.8} (error estimate {:.1e}, depth {}, converged {})", whole.value[0], whole.error, whole.depth, whole.converged);
    println!("additivity defect {:.1e}", (whole.value[0] - left.value[0] - right.value[0]).abs());
    let probes: Vec<usize> = (0..=n).step_by(n / 8).collect();
    println!("sewing consistency defect {:.1e}", sewing_consistency(&m, &probes)?);
    println!("remainder 2gamma-seminorm {:.4}", m.remainder_seminorm(2.0 * rp.gamma(), 64));
    Ok(())
}
