//! Acceptance run: one pass/fail line per criterion.
//!
//! Built with `harness = false`, so the lines are printed on every
//! `cargo test`; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roughpower::analysis::{
    convergence_study, gap_study, global_holder_report, ito_stratonovich_study, ols, scaling_study, Exponents,
    GapOptions, ScalingOptions, StandardField, TestFunction,
};
use roughpower::coefficients::{PowerCoefficient, Smoothing};
use roughpower::controlled::{compose_smooth, rough_integral, FnMap};
use roughpower::increments::{delta1, delta2, holder_norm2, holder_norm3, product_rule_check, Inc1, Inc2Grid, TimeGrid};
use roughpower::roughpath::{lift_piecewise_linear, FbmSpec, RoughPath};
use roughpower::sewing::{discrete_sewing_check, k_mu, recenter, sew};
use roughpower::solver::{
    remainder_grid, solve_1d_lamperti, solve_md_davie, track_radii, Case, SolutionPath, SolverParams, ZeroMode,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_grid(rng: &mut ChaCha8Rng, n: usize) -> TimeGrid {
    let mut pts = vec![0.0];
    for _ in 1..n {
        let last = *pts.last().unwrap();
        pts.push(last + rng.gen_range(0.01..1.0));
    }
    TimeGrid::new(pts).unwrap()
}

fn c1_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_dd = 0.0f64;
    let mut worst_pr = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(4..12);
        let dim = rng.gen_range(1..4);
        let grid = random_grid(&mut rng, n);
        let f = Inc1::from_fn(grid.clone(), dim, |_, v| v.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0)));
        let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst_dd = worst_dd.max(delta2(&delta1(&f)).max_abs() / scale);

        let g = Inc1::from_fn(grid.clone(), 1, |_, v| v[0] = rng.gen_range(-1.0..1.0));
        let h = Inc2Grid::from_fn(grid.clone(), 1, |_, _, v| v[0] = rng.gen_range(-1.0..1.0));
        // oracle: delta of the product (g h)_{st} = g_s h_{st}, written out by hand
        let gh = Inc2Grid::from_fn(grid.clone(), 1, |i, j, v| v[0] = g.at(i)[0] * h.get(i, j)[0]);
        let lhs = delta2(&gh);
        let dh = delta2(&h);
        let mut dev = 0.0f64;
        for s in 0..n {
            for u in s + 1..n {
                for t in u + 1..n {
                    let rhs = g.at(s)[0] * dh.get(s, u, t)[0] - (g.at(u)[0] - g.at(s)[0]) * h.get(u, t)[0];
                    dev = dev.max((lhs.get(s, u, t)[0] - rhs).abs());
                }
            }
        }
        let scale = lhs.max_abs().max(1e-300);
        worst_pr = worst_pr.max(dev / scale).max(product_rule_check(&g, &h).unwrap() / scale);
    }
    outcome(
        worst_dd < 1e-12 && worst_pr < 1e-12,
        format!("max relative |delta delta f| = {worst_dd:.1e}, product rule defect = {worst_pr:.1e} (100 instances)"),
    )
}

/// `X_{t_i t_j}` of the piecewise-linear fine path, summed segment by segment.
fn direct_area(fine: &Inc1, refine: usize, i: usize, j: usize) -> Vec<f64> {
    let d = fine.dim();
    let mut area = vec![0.0; d * d];
    let mut span = vec![0.0; d];
    for k in i * refine..j * refine {
        let inc: Vec<f64> = (0..d).map(|a| fine.at(k + 1)[a] - fine.at(k)[a]).collect();
        for a in 0..d {
            for b in 0..d {
                area[a * d + b] += span[a] * inc[b] + 0.5 * inc[a] * inc[b];
            }
        }
        for a in 0..d {
            span[a] += inc[a];
        }
    }
    area
}

fn c2_lift() -> Outcome {
    let mut worst_chen = 0.0f64;
    let mut worst_sym = 0.0f64;
    for (k, h) in [0.35, 0.4, 0.45].into_iter().enumerate() {
        let spec = FbmSpec::new(h, 2, 4096, 4, 100 + k as u64);
        let fine = spec.sample_fine().unwrap();
        let coarse = TimeGrid::uniform(4096, 1.0).unwrap();
        let rp = lift_piecewise_linear(&fine, &coarse, spec.gamma()).unwrap();
        let pairs = [(0, 4096), (0, 2048), (1000, 3333), (17, 18 + 1500), (4000, 4096)];
        let checkpoints: Vec<_> = pairs
            .iter()
            .map(|&(i, j)| (i, j, direct_area(&fine, 4, i, j)))
            .collect();
        worst_chen = worst_chen.max(rp.chen_residual(&checkpoints).unwrap());
        worst_sym = worst_sym.max(rp.symmetry_residual());
    }
    outcome(
        worst_chen < 1e-10 && worst_sym < 1e-10,
        format!("Chen residual {worst_chen:.1e}, symmetry residual {worst_sym:.1e} (H = 0.35, 0.4, 0.45; n = 4096)"),
    )
}

/// Riemann zeta by direct partial sums with an Euler-Maclaurin tail.
fn zeta_oracle(s: f64) -> f64 {
    let n = 200_000usize;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-s);
    }
    let nf = n as f64;
    sum + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
}

fn c3_sewing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_lambda = 0.0f64;
    let mut worst_plain = 0.0f64;
    let mut worst_discrete = 0.0f64;
    let mut worst_k = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for mu in [1.05, 1.2, 2.0] {
        worst_k = worst_k.max((k_mu(mu).unwrap() - 2f64.powf(mu) * zeta_oracle(mu)).abs() / k_mu(mu).unwrap());
        for _ in 0..100 {
            let n = rng.gen_range(5..14);
            let grid = random_grid(&mut rng, n);
            let dim = rng.gen_range(1..3);
            let coef: Vec<f64> = (0..4 * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let pw = rng.gen_range(0.5..2.5);
            let g = Inc2Grid::from_fn(grid.clone(), dim, |i, j, v| {
                let (s, t) = (grid.t(i), grid.t(j));
                for c in 0..dim {
                    let a = &coef[4 * c..4 * c + 4];
                    v[c] = a[0] * (t - s).powf(pw) * (1.0 + s).sin() + a[1] * (t * t - s * s) * s.cos() + a[2] * (s * t).sin()
                        + a[3];
                }
            });
            let h = delta2(&g);
            let res = sew(&h, mu).unwrap();
            // oracle: delta(Lambda h) must give back h
            let back = delta2(&res.lambda_h);
            let mut inv = 0.0f64;
            for (i, j, k, v) in h.iter() {
                for (a, b) in v.iter().zip(back.get(i, j, k)) {
                    inv = inv.max((a - b).abs());
                }
            }
            worst_inverse = worst_inverse.max(inv / h.max_abs().max(1e-300));
            let lam = holder_norm2(&res.lambda_h, mu).unwrap();
            let split_bound = res.norm_h_split / (2f64.powf(mu) - 2.0);
            let plain_bound = res.norm_h / (2f64.powf(mu) - 2.0);
            if split_bound > 0.0 {
                worst_lambda = worst_lambda.max(lam / split_bound);
                worst_plain = worst_plain.max(lam / plain_bound);
            }
            let r = recenter(&g);
            let check = discrete_sewing_check(&r, mu).unwrap();
            let rhs = k_mu(mu).unwrap() * holder_norm3(&delta2(&r), mu).unwrap();
            if rhs > 0.0 {
                worst_discrete = worst_discrete.max(check.lhs / rhs);
            }
        }
    }
    outcome(
        worst_lambda <= 1.05 && worst_discrete <= 1.0 + 1e-12 && worst_k < 1e-8 && worst_inverse < 1e-10,
        format!(
            "max |Lambda h|/bound = {worst_lambda:.3} (split norm; plain-norm ratio {worst_plain:.3}), \
             max |R|/(K |delta R|) = {worst_discrete:.3}, K_mu vs partial sums {worst_k:.1e}, \
             |delta Lambda h - h| = {worst_inverse:.1e}"
        ),
    )
}

fn gauss_legendre_8() -> ([f64; 8], [f64; 8]) {
    let x = [
        -0.960_289_856_497_536_3,
        -0.796_666_477_413_626_7,
        -0.525_532_409_916_329,
        -0.183_434_642_495_649_8,
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    let w = [
        0.101_228_536_290_376_26,
        0.222_381_034_453_374_47,
        0.313_706_645_877_887_3,
        0.362_683_783_378_362,
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_47,
        0.101_228_536_290_376_26,
    ];
    (x, w)
}

fn c4_integral() -> Outcome {
    // smooth driver and integrand
    let xf = |t: f64, v: &mut [f64]| {
        v[0] = (3.0 * t).sin();
        v[1] = 1.0 - (2.0 * t).cos() + 0.3 * t;
    };
    let dxf = |t: f64, v: &mut [f64]| {
        v[0] = 3.0 * (3.0 * t).cos();
        v[1] = 2.0 * (2.0 * t).sin() + 0.3;
    };
    let f = FnMap::new(
        2,
        2,
        |x: &[f64], o: &mut [f64]| {
            o[0] = x[1].cos() * x[0];
            o[1] = (x[0] + x[1]).sin();
        },
        |x: &[f64], j: &mut [f64]| {
            j[0] = x[1].cos();
            j[1] = -x[1].sin() * x[0];
            j[2] = (x[0] + x[1]).cos();
            j[3] = (x[0] + x[1]).cos();
        },
    );
    let n = 1 << 16;
    let rp = RoughPath::from_smooth(TimeGrid::uniform(n, 1.0).unwrap(), 2, xf, dxf, 1.0).unwrap();
    let m = compose_smooth(&f, 1.0, &rp).unwrap();
    let ri = rough_integral(&m, 0, n).unwrap();
    // oracle: Riemann-Stieltjes integral int f(x_t) . x'(t) dt by composite Gauss-Legendre
    let (gx, gw) = gauss_legendre_8();
    let cells = 2000;
    let mut quad = 0.0;
    for c in 0..cells {
        let (a, b) = (c as f64 / cells as f64, (c + 1) as f64 / cells as f64);
        for (x, w) in gx.iter().zip(&gw) {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let (mut xv, mut dv, mut fv) = ([0.0; 2], [0.0; 2], [0.0; 2]);
            xf(t, &mut xv);
            dxf(t, &mut dv);
            use roughpower::controlled::SmoothMap;
            f.eval(&xv, &mut fv);
            quad += 0.5 * (b - a) * w * (fv[0] * dv[0] + fv[1] * dv[1]);
        }
    }
    let smooth_err = (ri.value[0] - quad).abs() / quad.abs().max(1.0);

    // additivity on fBm drivers
    let mut worst_ratio = 0.0f64;
    for (k, h) in [0.4, 0.45].into_iter().enumerate() {
        let rp = FbmSpec::new(h, 2, 2048, 4, 40 + k as u64).rough_path().unwrap();
        let m = compose_smooth(&f, 1.0, &rp).unwrap();
        for split in [512, 1024, 1536] {
            let whole = rough_integral(&m, 0, 2048).unwrap();
            let left = rough_integral(&m, 0, split).unwrap();
            let right = rough_integral(&m, split, 2048).unwrap();
            let defect = (whole.value[0] - left.value[0] - right.value[0]).abs();
            let reported = whole.error + left.error + right.error;
            worst_ratio = worst_ratio.max(defect / reported.max(1e-300));
        }
    }
    outcome(
        smooth_err < 1e-8 && worst_ratio < 2.0,
        format!(
            "smooth driver: |compensated - quadrature| = {smooth_err:.1e}; fBm additivity defect / reported error <= {worst_ratio:.3}"
        ),
    )
}

fn c5_ito_stratonovich() -> Outcome {
    let spec = FbmSpec {
        gamma_margin: 0.02,
        ..FbmSpec::new(0.4, 1, 1 << 14, 4, 5)
    };
    let rp = spec.rough_path().unwrap();
    let depths: Vec<u32> = (8..=14).collect();
    let sin = StandardField::Sin.on(1);
    let quad = StandardField::Quadratic.on(1);
    let suite = [
        TestFunction {
            name: "sin",
            field: &sin,
            lambda: 1.0,
        },
        TestFunction {
            name: "quadratic",
            field: &quad,
            lambda: 1.0,
        },
    ];
    let table = ito_stratonovich_study(&rp, &suite, &depths).unwrap();
    let order = table.orders[0].1.unwrap_or(f64::NAN);
    let target = 3.0 * 0.38 - 1.0 - 0.1;
    let scale = rp.x().values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let quad_tol = 1e-12 * scale * scale;
    let quad_worst = table
        .rows
        .iter()
        .filter(|r| r.function == "quadratic")
        .map(|r| r.sup_residual)
        .fold(0.0, f64::max);
    outcome(
        (rp.gamma() - 0.38).abs() < 1e-12 && order >= target && quad_worst <= quad_tol,
        format!("sin: fitted order {order:.3} >= {target:.3}; quadratic: max residual {quad_worst:.1e} <= {quad_tol:.1e}"),
    )
}

/// Slope of `log sup |R|` against `log |t - s|` over the given lags, with
/// the supremum taken over all starts in the window.
fn local_remainder_exponent(r: &Inc2Grid, lags: &[usize]) -> Option<f64> {
    let g = r.grid();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &lag in lags.iter().filter(|&&l| l < g.len()) {
        let mut sup = 0.0f64;
        let mut dt = 0.0f64;
        for i in 0..g.len() - lag {
            let v = r.get(i, i + lag)[0].abs();
            if v > sup {
                sup = v;
                dt = g.t(i + lag) - g.t(i);
            }
        }
        if sup > 1e-14 {
            xs.push(dt.ln());
            ys.push(sup.ln());
        }
    }
    (xs.len() >= 3).then(|| ols(&xs, &ys).unwrap().slope)
}

/// Smooth scalar driver that reaches `-2` on `[0, 1]`.
fn smooth_scalar_driver(n: usize) -> RoughPath {
    RoughPath::from_smooth(
        TimeGrid::uniform(n, 1.0).unwrap(),
        1,
        |t, v| v[0] = -2.6 * t + 0.4 * (7.0 * t).sin(),
        |t, v| v[0] = -2.6 + 2.8 * (7.0 * t).cos(),
        1.0,
    )
    .unwrap()
}

fn c6_lamperti() -> Outcome {
    let n = 1 << 14;
    let rp = smooth_scalar_driver(n);
    let a = 1.0;
    let pc = PowerCoefficient::scalar(0.5, 1.0, f64::INFINITY).unwrap();
    let md = solve_md_davie(&pc, &[a], &rp, &SolverParams::new(1.0, 0.5).unwrap()).unwrap();
    let lam = solve_1d_lamperti(&pc, a, rp.x(), ZeroMode::Absorb).unwrap().solution;
    // oracle: (sqrt(a) + x / 2)^2 until the bracket vanishes
    let exact: Vec<f64> = (0..rp.len())
        .map(|i| {
            let w = a.sqrt() + rp.x().at(i)[0] / 2.0;
            if w > 0.0 {
                w * w
            } else {
                0.0
            }
        })
        .collect();
    let zero = exact.iter().position(|&v| v == 0.0).unwrap_or(rp.len());
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut md_err = 0.0f64;
    for (p, &i) in md.grid_indices.iter().enumerate() {
        if i < zero {
            md_err = md_err.max((md.y.at(p)[0] - exact[i]).abs() / scale);
        }
    }
    let lam_err = (0..zero).map(|i| (lam.y.at(i)[0] - exact[i]).abs() / scale).fold(0.0, f64::max);

    // square-root case: the remainder vanishes identically away from zero
    let window = remainder_grid(&lam, &rp, &pc, 0, 256).unwrap();
    let sqrt_remainder = window.max_abs();

    // non-degenerate power: the remainder decays with the expected local exponent
    let pc7 = PowerCoefficient::scalar(0.7, 1.0, f64::INFINITY).unwrap();
    let lam7 = solve_1d_lamperti(&pc7, a, rp.x(), ZeroMode::Absorb).unwrap().solution;
    let r7 = remainder_grid(&lam7, &rp, &pc7, 6912, 6912 + 1024).unwrap();
    let exponent = local_remainder_exponent(&r7, &[8, 16, 32, 64, 128, 256, 512]).unwrap_or(f64::NAN);
    let target = 3.0 * rp.gamma() - 0.15;
    outcome(
        md_err < 1e-3 && lam_err < 1e-12 && sqrt_remainder < 1e-12 && exponent >= target,
        format!(
            "md vs closed form {md_err:.1e}, Lamperti vs closed form {lam_err:.1e} before zero; \
             kappa = 1/2 remainder {sqrt_remainder:.1e} (vanishes identically); kappa = 0.7 local exponent {exponent:.3} >= {target:.2}"
        ),
    )
}

struct CaseB {
    rp: RoughPath,
    pc: PowerCoefficient,
    params: SolverParams,
    sp: SolutionPath,
    seed: u64,
}

fn case_b_run() -> CaseB {
    let pc = PowerCoefficient::scalar(0.8, 4.0, f64::INFINITY).unwrap();
    let params = SolverParams::new(0.4, 0.8).unwrap();
    for seed in 6.. {
        let rp = FbmSpec::new(0.42, 1, 1 << 18, 4, seed).rough_path().unwrap();
        let sp = solve_md_davie(&pc, &[0.25], &rp, &params).unwrap();
        if sp.case == Case::B {
            return CaseB { rp, pc, params, sp, seed };
        }
    }
    unreachable!()
}

fn c7_scaling(run: &CaseB) -> Outcome {
    let exps = Exponents::new(0.4, 0.8).unwrap();
    let report = scaling_study(&run.sp, &run.rp, &run.pc, &exps, &ScalingOptions::default()).unwrap();
    let (y, r) = (&report.y_slope, &report.remainder_slope);
    outcome(
        y.pass && r.pass,
        format!(
            "seed {}: {} shells with q in [3, 12]; y slope {:.3} +- {:.3} (target {:.2} +- 0.15), \
             R slope {:.3} +- {:.3} (target {:.2} +- 0.25), r slope {:.3} (reference {:.2})",
            run.seed,
            report.records.len(),
            y.fit.slope,
            y.fit.slope_stderr,
            y.target,
            r.fit.slope,
            r.fit.slope_stderr,
            r.target,
            report.r_slope.fit.slope,
            report.r_slope.target
        ),
    )
}

fn c8_gaps(run: &CaseB) -> Outcome {
    let exps = Exponents::new(0.4, 0.8).unwrap();
    let report = gap_study(&run.sp.shells, &exps, &GapOptions::default()).unwrap();

    // ramp y = 1 - t: crossing gaps are (3/8) 2^{-q_k} in closed form
    let n = 1usize << 20;
    let h = 1.0 / n as f64;
    let times: Vec<f64> = (0..n - (n >> 12)).map(|i| i as f64 * h).collect();
    let radii: Vec<f64> = times.iter().map(|t| 1.0 - t).collect();
    let trace = track_radii(&times, &radii);
    let gaps: Vec<(i32, f64)> = trace.gaps().into_iter().filter(|(q, _)| (1..=10).contains(q)).collect();
    let bias = gaps
        .iter()
        .map(|(q, g)| (g - 0.375 * 2f64.powi(-q)).abs())
        .fold(0.0, f64::max);
    let xs: Vec<f64> = gaps.iter().map(|g| g.0 as f64).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.1.log2()).collect();
    let ramp_slope = ols(&xs, &ys).unwrap().slope;
    outcome(
        report.pass && (ramp_slope + 1.0).abs() < 0.01 && bias <= h * (1.0 + 1e-9),
        format!(
            "fBm run: gap exponent {:.3} +- {:.3} in [{:.3}, {:.3}] over {} gaps (alpha = {:.2}); \
             ramp: exponent {ramp_slope:.4}, max |gap - closed form| = {bias:.1e} (mesh {h:.1e})",
            report.fit.slope,
            report.fit.slope_stderr,
            report.band.0,
            report.band.1,
            report.gaps.len(),
            exps.alpha()
        ),
    )
}

fn c9_global(run: &CaseB) -> Outcome {
    let coarse = solve_md_davie(&run.pc, &[0.25], &run.rp.restrict(2).unwrap(), &run.params).unwrap();
    let report = global_holder_report(&coarse, &run.sp, 0.4);
    outcome(
        report.pass && coarse.case == Case::B,
        format!(
            "grid 0.4-seminorm on [0, 1]: {:.4} (half grid) -> {:.4} (full grid), growth {:.3}",
            report.coarse, report.fine, report.growth
        ),
    )
}

fn c10_nonuniqueness() -> Outcome {
    let rp = RoughPath::from_smooth(
        TimeGrid::uniform(4096, 1.0).unwrap(),
        1,
        |t, v| v[0] = t + 0.3 * (5.0 * t).sin(),
        |t, v| v[0] = 1.0 + 1.5 * (5.0 * t).cos(),
        1.0,
    )
    .unwrap();
    let pc = PowerCoefficient::scalar(0.5, 1.0, f64::INFINITY).unwrap();
    let sol = solve_1d_lamperti(&pc, 0.0, rp.x(), ZeroMode::Absorb).unwrap();
    let Some(trivial) = sol.trivial else {
        return outcome(false, "no trivial solution returned".into());
    };
    // oracle: x_t^2 / 4 (x stays positive after 0) and the zero path
    let mut err = 0.0f64;
    for i in 0..rp.len() {
        let x = rp.x().at(i)[0];
        err = err.max((sol.solution.y.at(i)[0] - x * x.abs() / 4.0).abs());
    }
    let start = 64;
    let nontrivial_r = remainder_grid(&sol.solution, &rp, &pc, start, start + 256).unwrap().max_abs();
    let trivial_max = trivial.y.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nonzero = sol.solution.y.values().iter().any(|v| *v != 0.0);
    outcome(
        err < 1e-12 && nontrivial_r < 1e-12 && trivial_max == 0.0 && nonzero,
        format!(
            "nontrivial solution vs x^2/4: {err:.1e}, remainder {nontrivial_r:.1e}; zero solution sup {trivial_max:.0e}"
        ),
    )
}

fn c11_self_convergence() -> Outcome {
    let spec = FbmSpec::new(0.45, 2, 1 << 14, 4, 11);
    let rp = spec.rough_path().unwrap();
    let gamma = rp.gamma();
    let pc = PowerCoefficient::new(
        0.7,
        0.4,
        1.5,
        vec![vec![1.0, 0.3], vec![-0.2, 1.0]],
        Smoothing::Mollified,
    )
    .unwrap();
    let params = SolverParams::new(gamma, 0.7).unwrap();
    let report = convergence_study(&pc, &[0.8, 0.6], &rp, &params, &[4, 8, 16, 32, 64]).unwrap();
    let target = 3.0 * gamma - 1.0 - 0.1;
    let levels: Vec<String> = report.levels.iter().map(|(s, _, e)| format!("{s}:{e:.1e}")).collect();
    outcome(
        report.order.slope >= target,
        format!(
            "observed order {:.3} >= {target:.3} (errors by stride {})",
            report.order.slope,
            levels.join(" ")
        ),
    )
}

fn main() {
    let mut failed = Vec::new();
    let mut report = |id: usize, title: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        println!(
            "[{}] C{id:<2} {title}: {} ({:.1} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    };
    let s = Duration::from_secs;
    report(1, "algebraic exactness", s(5), &mut c1_algebra);
    report(2, "geometric lift", s(10), &mut c2_lift);
    report(3, "sewing bounds", s(30), &mut c3_sewing);
    report(4, "rough integral", s(60), &mut c4_integral);
    report(5, "change of variables", s(120), &mut c5_ito_stratonovich);
    report(6, "scalar closed form", s(60), &mut c6_lamperti);
    let start = Instant::now();
    let run = case_b_run();
    let solve_time = start.elapsed();
    println!("      case-B run: seed {}, zero at t = {:?} ({:.1} s)", run.seed, run.sp.zero_time(), solve_time.as_secs_f64());
    report(7, "regularity scaling", s(600) - solve_time, &mut || c7_scaling(&run));
    report(8, "stopping-time gaps", s(60), &mut || c8_gaps(&run));
    report(9, "global Hölder continuity", s(60), &mut || c9_global(&run));
    report(10, "non-uniqueness at zero", s(10), &mut c10_nonuniqueness);
    report(11, "scheme self-convergence", s(120), &mut c11_self_convergence);
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
