//! Sewing a closed three-index increment and checking the a priori bound.

use roughpower::increments::{delta2, holder_norm2, Inc2Grid, TimeGrid};
use roughpower::sewing::{discrete_sewing_check, k_mu, recenter, sew, sew_refined};

fn main() -> roughpower::Result<()> {
    let grid = TimeGrid::uniform(24, 1.0)?;
    let mu = 1.5;
    let g = Inc2Grid::from_fn(grid.clone(), 1, |i, j, v| {
        let (s, t) = (grid.t(i), grid.t(j));
        v[0] = (t - s).powf(mu) * (2.0 * s).cos();
    });
    let h = delta2(&g);
    let res = sew(&h, mu)?;
    println!("|Lambda h|_mu = {:.5}", holder_norm2(&res.lambda_h, mu)?);
    println!("bound (1/(2^mu - 2)) |h|_split = {:.5}", res.bound());
    println!("{}", serde_json::to_string_pretty(&res.summary())?);

    let r = recenter(&g);
    let check = discrete_sewing_check(&r, mu)?;
    println!("discrete: |R|_mu = {:.5} <= K_mu |delta R|_mu = {:.5}: {}", check.lhs, check.rhs, check.pass);
    for m in [1.05, 1.2, 2.0] {
        println!("K_{m} = {:.10}", k_mu(m)?);
    }

    // the same germ sewn on dyadic refinements of a coarse grid
    let coarse = TimeGrid::uniform(4, 1.0)?;
    let h_fn = |s: f64, u: f64, t: f64, out: &mut [f64]| {
        let g = |a: f64, b: f64| (b - a).powf(mu) * (2.0 * a).cos();
        out[0] = g(s, t) - g(s, u) - g(u, t);
    };
    let refined = sew_refined(h_fn, 1, &coarse, mu, 12)?;
    println!("refined sewing on [0, 1]: {:.8}", refined.lambda_h.get(0, 4)[0]);
    Ok(())
}
