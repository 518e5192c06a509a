//! One- and two-index increments, the difference operator and the product rule.

use roughpower::increments::{delta1, delta2, holder_norm1, holder_norm2, product_rule_check, Inc1, Inc2Grid, TimeGrid};

fn main() -> roughpower::Result<()> {
    let grid = TimeGrid::new(vec![0.0, 0.1, 0.25, 0.5, 0.8, 1.0])?;
    let f = Inc1::from_fn(grid.clone(), 2, |t, v| {
        v[0] = t.sqrt();
        v[1] = (3.0 * t).sin();
    });
    let df = delta1(&f);
    println!("f_t - f_s on (0.1, 0.8): {:?}", df.get(1, 4));
    println!("max |delta delta f| = {:e}", delta2(&df).max_abs());
    println!("grid 1/2-Hölder seminorm of f: {:.4}", holder_norm1(&f, 0.5)?);

    let g = Inc1::from_fn(grid.clone(), 1, |t, v| v[0] = 1.0 + t * t);
    let h = Inc2Grid::from_fn(grid.clone(), 1, |i, j, v| v[0] = (grid.t(j) - grid.t(i)).powi(2));
    println!("|h|_2 = {:.4}", holder_norm2(&h, 2.0)?);
    println!("delta h on (0, 0.25, 1): {:?}", delta2(&h).get(0, 2, 5));
    println!("product rule defect: {:e}", product_rule_check(&g, &h)?);
    Ok(())
}
