//! Sample fractional Brownian motion, lift it and store it on disk.

use roughpower::io::{read_rough_path, write_rough_path, PathMeta};
use roughpower::roughpath::FbmSpec;

fn main() -> roughpower::Result<()> {
    let spec = FbmSpec::new(0.4, 2, 4096, 4, 7);
    let rp = spec.rough_path()?;
    println!("{} points, gamma = {}", rp.len(), rp.gamma());
    println!("symmetry residual {:e}", rp.symmetry_residual());
    println!("X over [0, 1]: {:?}", rp.chen_extend(0, rp.len() - 1)?);
    println!("|x|_gamma + |X|_2gamma on every 16th point: {:.4}", rp.restrict(16)?.rough_norm(rp.gamma())?);
    let est = rp.roughness_modulus(0.4, &[0.01, 0.03, 0.1])?;
    println!("roughness modulus estimate: {:.4}", est.modulus);

    let dir = std::env::temp_dir().join("roughpower-fbm-lift");
    let meta = PathMeta {
        hurst: Some(spec.hurst),
        seed: Some(spec.seed),
        refine_factor: Some(spec.refine),
        ..PathMeta::for_path(&rp)
    };
    write_rough_path(&dir, &rp, &meta)?;
    let back = read_rough_path(&dir)?;
    println!("stored in {}; Chen defect of stored checkpoints {:e}", dir.display(), back.rough_path.chen_residual(&back.checkpoints)?);
    Ok(())
}
