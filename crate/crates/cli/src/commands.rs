use msl::convex_geometry::{unit_ball_volume, BodySpec, Exponent, UnitVector};
use msl::nodal_density::{
    analytic_density, center_grid, crofton_estimate, lower_density_estimate, nodal_arrangement, phi_regularity_profile,
    prune, CroftonBudget, DEFAULT_CROFTON_DIRS, DEFAULT_LINES_PER_DIR,
};
use msl::pw_functions::{jensen_functional, ronkin_estimate};
use msl::sampling_experiments::{density_sweep, SweepConfig};
use msl::sharpness_construction::{
    construct_example, density_bound_margin, verify_2d_sharpness, verify_ball_sharpness, ConstructionConfig,
    WeightFunction,
};
use msl::{mean_width, sharp_constant, ConvexBody, CosineProduct, Estimate, PrunedArrangement, SphereQuadrature};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{CliError, Output};
use crate::params::{BodyArg, Params};

type Res<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn seed(p: &Params) -> u64 {
    p.seed.unwrap_or(0)
}

fn dim(p: &Params, default: usize) -> Res<usize> {
    match &p.d {
        Some(d) => d.single().map_err(invalid),
        None => Ok(default),
    }
}

fn body(p: &Params) -> Res<ConvexBody> {
    let spec = match &p.body {
        None => return Err(invalid("--body is required")),
        Some(BodyArg::Spec(s)) => s.clone(),
        Some(BodyArg::Name(name)) => {
            let d = dim(p, 2)?;
            let r = p.radius.unwrap_or(1.0);
            match name.as_str() {
                "ball" => BodySpec::Ball { dimension: d, radius: r },
                "cube" => BodySpec::Cube { dimension: d, half_width: r },
                "lp" | "lp2d" => BodySpec::Lp2d {
                    dimension: d,
                    p: p.p.ok_or_else(|| invalid("lp bodies need --p"))?,
                },
                "oracle-grid" => BodySpec::OracleGrid {
                    dimension: d,
                    grid: p.grid.clone().ok_or_else(|| invalid("oracle-grid bodies need --grid"))?,
                },
                other => return Err(invalid(format!("unknown body {other:?}; use ball, cube, lp or oracle-grid"))),
            }
        }
    };
    Ok(spec.build()?)
}

fn product(p: &Params) -> Res<CosineProduct> {
    p.f.clone().ok_or_else(|| invalid("a cosine product is required (--f or config key \"f\")"))
}

/// From `arrangement`, else the nodal set of `f` pruned at `rho` (default 0).
fn arrangement(p: &Params) -> Res<PrunedArrangement> {
    let arr = match (&p.arrangement, &p.f) {
        (Some(a), _) => a.clone(),
        (None, Some(f)) => prune(f.dimension(), nodal_arrangement(f)?, 0.0)?,
        (None, None) => return Err(invalid("an arrangement or a cosine product is required")),
    };
    Ok(match p.rho {
        Some(r) => arr.with_rho(r)?,
        None => arr,
    })
}

fn unit(v: &[f64]) -> Res<UnitVector> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(invalid("direction must be a nonzero vector"));
    }
    Ok(UnitVector::new(v.iter().map(|x| x / n).collect())?)
}

fn budget(p: &Params) -> CroftonBudget {
    CroftonBudget {
        n_dirs: p.n_dirs.unwrap_or(DEFAULT_CROFTON_DIRS),
        lines_per_dir: p.lines.unwrap_or(DEFAULT_LINES_PER_DIR),
    }
}

fn construction(p: &Params) -> ConstructionConfig {
    let d = ConstructionConfig::default();
    ConstructionConfig {
        mu_samples: p.mu_samples,
        polar_resolution: p.polar_resolution,
        certificate_resolution: p.certificate_resolution,
        bootstrap_reps: p.bootstrap.unwrap_or(d.bootstrap_reps),
        max_retries: p.max_retries.unwrap_or(d.max_retries),
        ..d
    }
}

fn weight(p: &Params) -> WeightFunction {
    WeightFunction::constant(p.g.unwrap_or(1.0))
}

pub fn constants(p: &Params) -> Res<Output> {
    let ds = match &p.d {
        Some(d) => d.expand().map_err(invalid)?,
        None => (2..=4).collect(),
    };
    let mut rows = Vec::new();
    let mut csv = String::from("d,omega_d,omega_d_minus_1,A_d\n");
    for d in ds {
        let (w, w1, a) = (unit_ball_volume(d as i64)?, unit_ball_volume(d as i64 - 1)?, sharp_constant(d as i64)?);
        csv.push_str(&format!("{d},{w},{w1},{a}\n"));
        rows.push(json!({
            "d": d,
            "omega_d": Estimate::exact(w),
            "omega_d_minus_1": Estimate::exact(w1),
            "A_d": Estimate::exact(a),
        }));
    }
    Ok(Output::new(json!({ "rows": rows }), Some(csv)))
}

pub fn mean_width_cmd(p: &Params) -> Res<Output> {
    let k = body(p)?;
    let quad = SphereQuadrature::for_dimension(k.dimension(), seed(p))?;
    let w = mean_width(&k, &quad)?;
    let csv = format!(
        "body,d,mean_width,std_error,tolerance\n\"{}\",{},{},{},{}\n",
        k.describe(),
        k.dimension(),
        w.value,
        w.std_error.map(|v| v.to_string()).unwrap_or_default(),
        w.tolerance.map(|v| v.to_string()).unwrap_or_default()
    );
    Ok(Output::new(
        json!({
            "body": k.describe(),
            "body_spec": k.to_spec(),
            "scheme": format!("{:?}", quad.scheme()),
            "quadrature_nodes": quad.len(),
            "mean_width": w,
        }),
        Some(csv),
    ))
}

pub fn density(p: &Params) -> Res<Output> {
    let arr = arrangement(p)?;
    let d = arr.dimension();
    let radii = p.radii.clone().unwrap_or_else(|| vec![5.0, 10.0, 20.0]);
    let centers = match &p.centers {
        Some(c) => c.clone(),
        None => {
            let period = arr.families().iter().map(|f| f.spacing).fold(1.0, f64::max);
            center_grid(d, period / 2.0, p.center_grid.unwrap_or(3))
        }
    };
    let mut report = lower_density_estimate(&arr, &radii, &centers, budget(p), seed(p))?;
    let r_list = p.r_list.clone().unwrap_or_else(|| vec![0.02, 0.05, 0.1]);
    if !r_list.is_empty() {
        report.phi_profile = phi_regularity_profile(&arr, &r_list, &centers, budget(p), seed(p) ^ 1)?;
    }
    let csv = report.to_csv();
    Ok(Output::new(to_json(&report), Some(csv)))
}

pub fn construct(p: &Params) -> Res<Output> {
    let k = body(p)?;
    let run = construct_example(&k, &weight(p), p.n.unwrap_or(400), p.delta.unwrap_or(0.01), p.rho, &construction(p), seed(p))?;
    Ok(Output::new(to_json(&run), None))
}

pub fn verify_ball(p: &Params) -> Res<Output> {
    let d = dim(p, 2)?;
    let r = verify_ball_sharpness(d, p.delta.unwrap_or(0.005), p.n.unwrap_or(400), p.rho, &construction(p), seed(p))?;
    Ok(Output::new(to_json(&r), None))
}

pub fn verify_2d(p: &Params) -> Res<Output> {
    let k = body(p)?;
    let r = verify_2d_sharpness(&k, p.delta.unwrap_or(0.005), p.n.unwrap_or(400), p.rho, &construction(p), seed(p))?;
    Ok(Output::new(to_json(&r), None))
}

pub fn bound_margin(p: &Params) -> Res<Output> {
    let k = body(p)?;
    let f = product(p)?;
    let quad = SphereQuadrature::for_dimension(k.dimension(), seed(p))?;
    let m = density_bound_margin(&f, &k, &quad)?;
    Ok(Output::new(
        json!({
            "body": k.describe(),
            "analytic_density": Estimate::exact(analytic_density(&nodal_arrangement(&f)?)),
            "margin": m,
        }),
        None,
    ))
}

pub fn jensen(p: &Params) -> Res<Output> {
    let f = product(p)?;
    let d = f.dimension();
    let x = p.x.clone().unwrap_or_else(|| vec![0.0; d]);
    let theta = unit(p.theta.as_deref().ok_or_else(|| invalid("--theta is required"))?)?;
    let h = p.h_theta.unwrap_or_else(|| f.spectral_support(theta.as_slice()));
    let r = jensen_functional(&f, &x, &theta, p.t.unwrap_or(1.0), h)?;
    Ok(Output::new(
        json!({
            "lhs": Estimate::exact(r.lhs),
            "rhs": Estimate::exact(r.rhs),
            "zeros": r.zeros,
            "h_theta": h,
            "holds": r.lhs <= r.rhs,
        }),
        None,
    ))
}

pub fn ronkin(p: &Params) -> Res<Output> {
    let f = product(p)?;
    let r = p.radius.unwrap_or(10.0);
    let e = ronkin_estimate(&f, r, p.samples.unwrap_or(100_000), seed(p))?;
    Ok(Output::new(json!({ "R": r, "estimate": e }), None))
}

pub fn crofton(p: &Params) -> Res<Output> {
    let arr = arrangement(p)?;
    let d = arr.dimension();
    let center = p.center.clone().unwrap_or_else(|| vec![0.0; d]);
    let r = p.radius.unwrap_or(10.0);
    let b = budget(p);
    let e = crofton_estimate(&arr, &center, r, b.n_dirs, b.lines_per_dir, seed(p))?;
    let vol = unit_ball_volume(d as i64)? * r.powi(d as i32);
    Ok(Output::new(
        json!({
            "R": r,
            "measure": e,
            "density": Estimate { value: e.value / vol, std_error: e.std_error.map(|s| s / vol), tolerance: e.tolerance.map(|t| t / vol), exact: e.exact },
            "analytic_density": Estimate::exact(analytic_density(arr.families())),
        }),
        None,
    ))
}

pub fn sampling_sweep(p: &Params) -> Res<Output> {
    let k = body(p)?;
    let d = k.dimension();
    let norm = p.norm_p.unwrap_or(Exponent(2.0));
    let densities = match &p.densities {
        Some(v) => v.clone(),
        None => {
            let w = mean_width(&k, &SphereQuadrature::for_dimension(d, seed(p))?)?.value;
            let thr = sharp_constant(d as i64)? * w;
            [0.3, 0.5, 0.75, 1.0, 1.25, 1.5].iter().map(|c| c * thr).collect()
        }
    };
    let base = SweepConfig::default();
    let cfg = SweepConfig {
        margin: p.margin.unwrap_or(base.margin),
        shifts: if d == 2 { base.shifts } else { vec![vec![0.3; d]] },
        box_half_width: p.box_half_width,
        resolution: p.resolution,
        adversarial: p.adversarial.unwrap_or(true),
    };
    let seeds = p.seeds.clone().unwrap_or_else(|| vec![seed(p)]);
    let t = density_sweep(&k, norm, &densities, &cfg, &seeds)?;
    let csv = t.to_csv();
    Ok(Output::new(to_json(&t), Some(csv)))
}
