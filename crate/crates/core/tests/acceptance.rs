//! Acceptance criteria, one line per criterion. Exits nonzero if any fail.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use msl::convex_geometry::{default_sup_resolution, Exponent, UnitVector};
use msl::nodal_density::{
    analytic_density, crofton_estimate, phi_regularity_profile, CroftonBudget, HyperplaneFamily, PrunedArrangement,
};
use msl::pw_functions::{jensen_functional, ronkin_estimate, spectrum_certificate, CosineProduct, CosineTerm};
use msl::sampling_experiments::{density_sweep, make_test_function, nested_families, sampling_ratio, SweepConfig};
use msl::sharpness_construction::{
    construct_example, density_bound_margin, mu_2d_quarter_turn, mu_functional, verify_2d_sharpness,
    verify_ball_sharpness, ConstructionConfig, WeightFunction,
};
use msl::{mean_width, perimeter_2d, sharp_constant, ConvexBody, SphereQuadrature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Duration, fn() -> Outcome);
type Replay<'a> = Box<dyn Fn() -> String + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Independent oracle: the unit-ball volume through the Gamma function.
fn omega(k: usize) -> f64 {
    PI.powf(k as f64 / 2.0) / libm::tgamma(k as f64 / 2.0 + 1.0)
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return UnitVector::new(v.iter().map(|x| x / n).collect()).unwrap();
        }
    }
}

fn c1_constants() -> Outcome {
    let want = [(2, PI / 2.0), (3, 2.0), (4, 3.0 * PI / 4.0)];
    let mut worst = 0.0f64;
    for (d, a) in want {
        let oracle = d as f64 / 2.0 * omega(d) / omega(d - 1);
        let got = sharp_constant(d as i64).unwrap();
        worst = worst.max((got - a).abs()).max((got - oracle).abs());
    }
    ok(worst <= 1e-12, format!("max error {worst:.2e}"))
}

fn c2a_ball_width() -> Outcome {
    let mut worst = String::new();
    let mut pass = true;
    for d in 2..=4 {
        let quad = SphereQuadrature::for_dimension(d, 11).unwrap();
        for r in [0.5, 1.0, 3.0] {
            let w = mean_width(&ConvexBody::ball(d, r).unwrap(), &quad).unwrap();
            let good = if d <= 3 { (w.value - 2.0 * r).abs() <= 1e-6 } else { w.agrees_with(2.0 * r, 3.0) };
            if !good {
                pass = false;
                worst = format!("d={d} R={r}: {} (se {:.1e})", w.value, w.se());
            }
        }
    }
    ok(pass, if pass { "all 9 cases".into() } else { worst })
}

fn c2b_cube_width() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (d, want) in [(2, 4.0 / PI), (3, 1.5)] {
        let w = mean_width(&ConvexBody::cube(d, 1.0).unwrap(), &SphereQuadrature::for_dimension(d, 0).unwrap()).unwrap();
        pass &= (w.value - want).abs() <= 1e-4;
        parts.push(format!("d={d}: {:.6} vs {:.6}", w.value, want));
    }
    ok(pass, parts.join("; "))
}

fn c3_sphere_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pass = true;
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let quad = SphereQuadrature::for_dimension(d, 5).unwrap();
        let want = 2.0 * omega(d - 1);
        for _ in 0..10 {
            let v = random_unit(d, &mut rng);
            let e = quad.integrate(|t| t.iter().zip(v.as_slice()).map(|(a, b)| a * b).sum::<f64>().abs());
            if d <= 3 {
                pass &= (e.value - want).abs() <= 1e-4;
                worst = worst.max((e.value - want).abs());
            } else {
                pass &= e.agrees_with(want, 3.0);
            }
        }
    }
    ok(pass, format!("max deterministic error {worst:.2e}"))
}

fn c4_cauchy() -> Outcome {
    let mut bodies = vec![ConvexBody::ball(2, 1.0).unwrap(), ConvexBody::cube(2, 1.0).unwrap()];
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        bodies.push(ConvexBody::lp_ball_2d(p).unwrap());
    }
    let mut worst = 0.0f64;
    for b in &bodies {
        let r = perimeter_2d(b).unwrap();
        let rel = (r.perimeter.value - r.pi_mean_width.value).abs() / r.pi_mean_width.value;
        worst = worst.max(rel);
    }
    ok(worst <= 0.005, format!("max relative gap {worst:.2e}"))
}

fn random_raw(d: usize, rng: &mut ChaCha8Rng) -> PrunedArrangement {
    let k = rng.random_range(1..=3);
    let fams = (0..k)
        .map(|_| {
            let s = rng.random_range(0.5..2.0);
            HyperplaneFamily::new(random_unit(d, rng), s, rng.random_range(0.0..s)).unwrap()
        })
        .collect();
    PrunedArrangement::raw(d, fams).unwrap()
}

fn c5_crofton() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = 30.0;
    let (mut pass, mut worst_z, mut worst_rel) = (true, 0.0f64, 0.0f64);
    for i in 0..20 {
        let d = 2 + i % 2;
        let arr = random_raw(d, &mut rng);
        let e = crofton_estimate(&arr, &vec![0.0; d], r, 2000, 4, i as u64).unwrap();
        let vol = omega(d) * r.powi(d as i32);
        let dens = analytic_density(arr.families());
        let (v, se) = (e.value / vol, e.se() / vol);
        let z = (v - dens).abs() / se;
        worst_z = worst_z.max(z);
        worst_rel = worst_rel.max(se / v);
        pass &= z <= 3.0 && se / v <= 0.02;
    }
    ok(pass, format!("max |z| {worst_z:.2}, max relative se {worst_rel:.4}"))
}

fn random_certified(body: &ConvexBody, rng: &mut ChaCha8Rng) -> CosineProduct {
    let d = body.dimension();
    let n = rng.random_range(1..=6);
    let terms: Vec<CosineTerm> =
        (0..n).map(|_| CosineTerm::new(rng.random_range(0.05..1.0), random_unit(d, rng)).unwrap()).collect();
    let raw = CosineProduct::new(d, terms.clone()).unwrap();
    let g = spectrum_certificate(&raw, body, default_sup_resolution(d)).unwrap().gauge_max;
    let scale = rng.random_range(0.3..0.999) / g;
    CosineProduct::new(d, terms.into_iter().map(|t| CosineTerm::new(t.a * scale, t.nu).unwrap()).collect()).unwrap()
}

fn c6_bound_margin() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bodies = [
        ConvexBody::ball(2, 1.0).unwrap(),
        ConvexBody::cube(2, 0.7).unwrap(),
        ConvexBody::lp_ball_2d(1.5).unwrap(),
        ConvexBody::lp_ball_2d(4.0).unwrap(),
        ConvexBody::ball(3, 2.0).unwrap(),
        ConvexBody::cube(3, 1.0).unwrap(),
    ];
    let quads = [SphereQuadrature::for_dimension(2, 0).unwrap(), SphereQuadrature::for_dimension(3, 0).unwrap()];
    let (mut worst, mut fails) = (f64::INFINITY, 0);
    for i in 0..200 {
        let body = &bodies[i % bodies.len()];
        let f = random_certified(body, &mut rng);
        match density_bound_margin(&f, body, &quads[body.dimension() - 2]) {
            Ok(m) => worst = worst.min(m.value),
            Err(_) => fails += 1,
        }
    }
    ok(worst >= -1e-9 && fails == 0, format!("min margin {worst:.4}, certificate failures {fails}"))
}

fn c7_ball_pincer() -> Outcome {
    let cfg = ConstructionConfig::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for (d, tol, ceiling) in [(2usize, 0.15, PI), (3, 0.2, 4.0)] {
        for seed in 0..5 {
            match verify_ball_sharpness(d, 0.005, 400, Some(0.01), &cfg, seed) {
                Ok(r) => {
                    let a = &r.achieved_density;
                    let good = a.value >= ceiling - tol && a.value <= ceiling + 3.0 * a.se();
                    pass &= good;
                    lines.push(format!("d{d}s{seed}={:.3}", a.value));
                }
                Err(e) => {
                    pass = false;
                    lines.push(format!("d{d}s{seed}: {e}"));
                }
            }
        }
    }
    ok(pass, lines.join(" "))
}

fn c8_quarter_turn() -> Outcome {
    let cfg = ConstructionConfig::default();
    let (delta, n, rho) = (0.002, 2500, 0.0005);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1.05, 1.5, 4.0, 8.0] {
        let body = ConvexBody::lp_ball_2d(p).unwrap();
        let w = mean_width(&body, &SphereQuadrature::for_dimension(2, 0).unwrap()).unwrap().value;
        let mu = mu_2d_quarter_turn(&body).unwrap().mu.value;
        let disc = (2.0 / mu - PI / 2.0 * w).abs() / (PI / 2.0 * w);
        pass &= disc <= 0.01;
        let mut low = f64::INFINITY;
        for seed in 0..3 {
            match verify_2d_sharpness(&body, delta, n, Some(rho), &cfg, seed) {
                Ok(r) => low = low.min(r.achieved_density.value - ((PI / 2.0 - delta) * w - 0.1)),
                Err(_) => low = f64::NEG_INFINITY,
            }
        }
        pass &= low >= 0.0;
        if p == 1.05 {
            let limit = PI / 2.0 * w;
            pass &= (limit / (2.0 * 2f64.sqrt()) - 1.0).abs() <= 0.02;
        }
        parts.push(format!("p={p}: disc {disc:.1e}, min slack {low:.3}"));
    }
    ok(pass, parts.join("; "))
}

fn c9_mu() -> Outcome {
    let g = WeightFunction::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, res) in [(2, 2048), (3, 128), (4, 20000)] {
        let ball = ConvexBody::ball(d, 1.0).unwrap();
        let want = 2.0 * omega(d - 1) / (d as f64 * omega(d));
        let m = mu_functional(&ball, &g, 20_000, res, 100, 9).unwrap();
        let z = (m.mu_hat.value - want).abs() / m.mu_hat.se();
        pass &= z <= 3.0;
        parts.push(format!("ball d={d} z={z:.2}"));
    }
    for p in [1.5, 4.0] {
        let body = ConvexBody::lp_ball_2d(p).unwrap();
        let m = mu_functional(&body, &g, 20_000, 2048, 100, 19).unwrap();
        let q = mu_2d_quarter_turn(&body).unwrap().mu;
        let comb = (m.mu_hat.se().powi(2) + q.se().powi(2)).sqrt() + q.tolerance.unwrap_or(0.0);
        let z = (m.mu_hat.value - q.value).abs() / comb;
        pass &= z <= 3.0;
        parts.push(format!("lp{p} z={z:.2}"));
    }
    ok(pass, parts.join(", "))
}

fn c10_jensen() -> Outcome {
    let single = CosineProduct::from_pairs(2, &[(1.0, &[1.0, 0.0])]).unwrap();
    let e1 = UnitVector::new(vec![1.0, 0.0]).unwrap();
    let r = jensen_functional(&single, &[0.0, 0.0], &e1, 1.0, 1.0).unwrap();
    let closed = 2.0 * (4f64.ln() + (4.0f64 / 3.0).ln());
    let mut pass = (r.lhs - closed).abs() <= 1e-9 && r.lhs < r.rhs;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut done = 0;
    while done < 100 {
        let d = rng.random_range(2..=3);
        let n = rng.random_range(1..=5);
        let terms: Vec<CosineTerm> =
            (0..n).map(|_| CosineTerm::new(rng.random_range(0.1..2.0), random_unit(d, &mut rng)).unwrap()).collect();
        let f = CosineProduct::new(d, terms).unwrap();
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let theta = random_unit(d, &mut rng);
        let t = rng.random_range(0.1..10.0);
        let h = f.spectral_support(theta.as_slice());
        if let Ok(rep) = jensen_functional(&f, &x, &theta, t, h) {
            pass &= rep.lhs < rep.rhs;
            done += 1;
        }
    }
    ok(pass, format!("closed form lhs {:.10} vs {closed:.10}", r.lhs))
}

fn c11_ronkin() -> Outcome {
    let f = CosineProduct::from_pairs(2, &[(1.0, &[1.0, 0.0])]).unwrap();
    let a = ronkin_estimate(&f, 10.0, 200_000, 1).unwrap();
    let b = ronkin_estimate(&f, 40.0, 200_000, 2).unwrap();
    let ratio = a.value / b.value;
    let rel = ((a.se() / a.value).powi(2) + (b.se() / b.value).powi(2)).sqrt();
    let pass = a.value >= 0.0 && b.value >= 0.0 && (ratio - 4.0).abs() <= 1.0 && rel <= 0.1;
    ok(pass, format!("ratio {ratio:.3}, combined relative error {rel:.3}"))
}

fn c12_phi() -> Outcome {
    let e1 = UnitVector::new(vec![1.0, 0.0]).unwrap();
    let e2 = UnitVector::new(vec![0.0, 1.0]).unwrap();
    let fams = vec![HyperplaneFamily::new(e1, 1.0, 0.0).unwrap(), HyperplaneFamily::new(e2, 1.0, 0.0).unwrap()];
    let pruned = PrunedArrangement::new(2, fams.clone(), 0.2).unwrap();
    let raw = PrunedArrangement::raw(2, fams).unwrap();
    let radii = [0.01, 0.03, 0.05, 0.09];
    let centers = vec![vec![0.0, 0.0], vec![0.31, 0.77]];
    let b = CroftonBudget::default();
    let p = phi_regularity_profile(&pruned, &radii, &centers, b, 12).unwrap();
    let q = phi_regularity_profile(&raw, &radii[..1], &[vec![0.0, 0.0]], b, 12).unwrap();
    let top = p.iter().map(|r| r.sup_phi_ratio).fold(0.0, f64::max);
    let pass = top <= 1.02 && q[0].sup_phi_ratio >= 1.9;
    ok(pass, format!("pruned max {top:.4}, raw at crossing {:.4}", q[0].sup_phi_ratio))
}

fn c13_sweep() -> Outcome {
    let ball = ConvexBody::ball(2, 1.0).unwrap();
    let bank = make_test_function(&ball, 0.3, &[vec![0.3, 0.2]]).unwrap();
    // inclusion monotonicity and scale invariance on shared grids
    let fams = nested_families(2, &[0.5, 1.5, 4.0], 13).unwrap();
    let mut mono = true;
    let mut scale = true;
    for f in &bank {
        let mut prev = 0.0;
        for k in 1..=3 {
            let g = PrunedArrangement::raw(2, fams[..k].to_vec()).unwrap();
            let r = sampling_ratio(f, &g, Exponent(2.0), 30.0, 0.15).unwrap();
            mono &= r.trajectory_norm >= prev;
            prev = r.trajectory_norm;
            let s = sampling_ratio(&f.scaled(-7.5), &g, Exponent(2.0), 30.0, 0.15).unwrap();
            scale &= s.ratio.to_bits() == r.ratio.to_bits();
        }
    }
    let grid: Vec<f64> = [0.3, 0.6, 1.0, 1.5].iter().map(|c| c * PI).collect();
    let t = density_sweep(&ball, Exponent(2.0), &grid, &SweepConfig::default(), &[0, 1, 2]).unwrap();
    let mut gap = f64::INFINITY;
    for s in 0..3 {
        let rows: Vec<_> = t.rows.iter().filter(|r| r.seed == s).collect();
        gap = gap.min(rows[0].max_ratio / rows[rows.len() - 1].max_ratio);
    }
    ok(mono && scale && gap >= 5.0, format!("monotone {mono}, scale-invariant {scale}, min gap {gap:.3e}"))
}

fn c14_determinism() -> Outcome {
    let twice = |f: &dyn Fn() -> String| f() == f();
    let ball2 = ConvexBody::ball(2, 1.0).unwrap();
    let cfg = ConstructionConfig::default();
    let checks: Vec<(&str, Replay<'_>)> = vec![
        ("quadrature", Box::new(|| {
            let q = SphereQuadrature::for_dimension(4, 3).unwrap();
            serde_json::to_string(&mean_width(&ConvexBody::ball(4, 1.0).unwrap(), &q).unwrap()).unwrap()
        })),
        ("crofton", Box::new(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(14);
            let arr = random_raw(3, &mut rng);
            serde_json::to_string(&crofton_estimate(&arr, &[0.0; 3], 10.0, 500, 4, 2).unwrap()).unwrap()
        })),
        ("mu", Box::new(|| {
            serde_json::to_string(&mu_functional(&ball2, &WeightFunction::default(), 5000, 512, 20, 4).unwrap()).unwrap()
        })),
        ("construct", Box::new(|| {
            serde_json::to_string(&construct_example(&ball2, &WeightFunction::default(), 200, 0.02, None, &cfg, 8).unwrap())
                .unwrap()
        })),
        ("ronkin", Box::new(|| {
            let f = CosineProduct::from_pairs(2, &[(1.0, &[0.6, 0.8])]).unwrap();
            serde_json::to_string(&ronkin_estimate(&f, 5.0, 10_000, 3).unwrap()).unwrap()
        })),
        ("sweep", Box::new(|| {
            let grid: Vec<f64> = [0.3, 1.5].iter().map(|c| c * PI).collect();
            let cfg = SweepConfig { box_half_width: Some(25.0), ..SweepConfig::default() };
            serde_json::to_string(&density_sweep(&ball2, Exponent(1.0), &grid, &cfg, &[5]).unwrap()).unwrap()
        })),
    ];
    let bad: Vec<&str> = checks.iter().filter(|(_, f)| !twice(f.as_ref())).map(|(n, _)| *n).collect();
    ok(bad.is_empty(), if bad.is_empty() { "6 randomized runs repeated".into() } else { format!("differs: {bad:?}") })
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 constants", Duration::from_millis(1), c1_constants),
        ("2a mean width of balls", Duration::from_secs(5), c2a_ball_width),
        ("2b mean width of cubes", Duration::from_secs(5), c2b_cube_width),
        ("3 sphere identity", Duration::from_secs(60), c3_sphere_identity),
        ("4 Cauchy relation", Duration::from_secs(5), c4_cauchy),
        ("5 Crofton vs analytic density", Duration::from_secs(60), c5_crofton),
        ("6 nodal density bound", Duration::from_secs(60), c6_bound_margin),
        ("7 ball sharpness pincer", Duration::from_secs(300), c7_ball_pincer),
        ("8 quarter-turn sharpness", Duration::from_secs(300), c8_quarter_turn),
        ("9 mu cross-validation", Duration::from_secs(600), c9_mu),
        ("10 Jensen bound", Duration::from_secs(60), c10_jensen),
        ("11 Ronkin decay", Duration::from_secs(60), c11_ronkin),
        ("12 phi regularity", Duration::from_secs(60), c12_phi),
        ("13 sampling sweep", Duration::from_secs(600), c13_sweep),
        ("14 determinism", Duration::from_secs(600), c14_determinism),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let out = run();
        let took = t0.elapsed();
        let in_time = took <= budget;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget_note = if in_time { String::new() } else { format!(" [over budget {budget:?}]") };
        println!("{} {name}: {} ({:.2?}){budget_note}", if pass { "PASS" } else { "FAIL" }, out.detail, took);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
