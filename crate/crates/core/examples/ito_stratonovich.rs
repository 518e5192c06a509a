//! Change-of-variables residuals for smooth functions of an fBm path.

use roughpower::analysis::{ito_stratonovich_study, StandardField, TestFunction};
use roughpower::roughpath::FbmSpec;

fn main() -> roughpower::Result<()> {
    let rp = FbmSpec::new(0.4, 1, 1 << 14, 4, 5).rough_path()?;
    let fields = [StandardField::Sin, StandardField::Cubic, StandardField::Quadratic];
    let on: Vec<_> = fields.iter().map(|f| f.on(1)).collect();
    let suite: Vec<TestFunction> = fields
        .iter()
        .zip(&on)
        .map(|(f, g)| TestFunction { name: f.name(), field: g, lambda: f.lambda() })
        .collect();
    let depths: Vec<u32> = (8..=14).collect();
    let table = ito_stratonovich_study(&rp, &suite, &depths)?;
    for row in &table.rows {
        println!("{:>9} depth {:>2}: {:.3e}", row.function, row.depth, row.sup_residual);
    }
    for (name, order) in &table.orders {
        println!("{name}: fitted order {order:?} (3 gamma - 1 = {:.3})", 3.0 * rp.gamma() - 1.0);
    }
    Ok(())
}
