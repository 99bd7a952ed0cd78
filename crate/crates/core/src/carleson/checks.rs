//! The named property-check suite.
//!
//! Each check exercises one of the structural facts the rest of the library
//! leans on (distance identities, volume comparability, exponent stability,
//! averaging inequalities, kernel norm bands, norm/modular consistency) on
//! randomized desk-scale samples, and reports the observed constant.

use crate::analysis::expr::HoloFunction;
use crate::analysis::measure::QuadMeasure;
use crate::analysis::norm::{check_norm_modular_bound, luxemburg_norm};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::geometry::{
    anisotropic_distance, ball_volume, involution, pseudo_distance, Point,
};
use crate::kernels::{test_function, KernelSpec, TestFamily};
use crate::report::PropertyReport;
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All check names accepted by [`run_property_check`].
pub const CHECK_NAMES: [&str; 10] = [
    "mobius_identity",
    "volume_band",
    "comparability",
    "exponent_stability",
    "jensen",
    "pointwise",
    "anisotropic",
    "oscillation",
    "norm_estimate",
    "norm_modular",
];

/// Shared configuration for the property checks.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub radial: usize,
    pub angular: usize,
    pub rho_max: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            samples: 10_000,
            seed: 7,
            radial: 200,
            angular: 128,
            rho_max: 1.0 - 1e-4,
        }
    }
}

pub fn run_property_check(name: &str, cfg: &CheckConfig) -> Result<PropertyReport> {
    match name {
        "mobius_identity" => check_mobius_identity(cfg),
        "volume_band" => check_volume_band(cfg),
        "comparability" => check_comparability(cfg),
        "exponent_stability" => check_exponent_stability(cfg),
        "jensen" => check_jensen(cfg),
        "pointwise" => check_pointwise(cfg),
        "anisotropic" => check_anisotropic(cfg),
        "oscillation" => check_oscillation(cfg),
        "norm_estimate" => check_norm_estimate(cfg),
        "norm_modular" => check_norm_modular(cfg),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

fn rng_for(cfg: &CheckConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt)
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, max_modulus: f64) -> Point<f64> {
    let coords = crate::analysis::expr::random_ball_point::<f64>(rng, dim);
    let scaled = coords.into_iter().map(|c| c * max_modulus).collect();
    Point::from_coords_clamped(scaled)
}

/// Exact pseudo-ball membership d(z,w) < s via the distance identity
/// (1 - d^2) |1 - <z,w>|^2 = (1-|z|^2)(1-|w|^2); cheap and branch-free.
fn in_pseudo_ball(z: &Point<f64>, w: &Point<f64>, s: f64) -> bool {
    let a = (Complex::new(1.0, 0.0) - z.inner(w).unwrap()).norm_sqr();
    z.one_minus_norm_sqr() * w.one_minus_norm_sqr() > (1.0 - s * s) * a
}

/// A point of E(z, s): the involution at z applied to a point of the
/// s-ball (which lands at pseudo-distance exactly |v| from z).
fn point_in_pseudo_ball(
    rng: &mut ChaCha8Rng,
    z: &Point<f64>,
    s: f64,
) -> Result<Point<f64>> {
    let v = random_point(rng, z.dim(), s * 0.999);
    involution(z, &v)
}

fn check_mobius_identity(cfg: &CheckConfig) -> Result<PropertyReport> {
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    for dim in 1..=3usize {
        let mut rng = rng_for(cfg, 0x6d6f_6269 ^ dim as u64);
        for _ in 0..cfg.samples {
            let z = random_point(&mut rng, dim, 0.9999);
            let w = random_point(&mut rng, dim, 0.9999);
            let d = pseudo_distance(&z, &w)?;
            let lhs = (1.0 - d * d)
                * (Complex::new(1.0, 0.0) - z.inner(&w)?).norm_sqr();
            let rhs = z.one_minus_norm_sqr() * w.one_minus_norm_sqr();
            let resid = (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE);
            worst = worst.max(resid);
            samples += 1;
        }
    }
    Ok(PropertyReport::passing(
        "mobius_identity",
        samples,
        worst,
        1e-10,
        "relative residual of the distance identity over dims 1..=3".into(),
    ))
}

fn check_volume_band(cfg: &CheckConfig) -> Result<PropertyReport> {
    let mut rng = rng_for(cfg, 0x766f_6c75);
    let mut worst = 0.0f64;
    let samples = cfg.samples.max(1000);
    for _ in 0..samples {
        let z = random_point(&mut rng, 1, 0.99);
        let s = 0.2 + 0.7 * rng.gen::<f64>();
        let v = ball_volume(&z, s)?.value;
        // Independent oracle: E(z,s) is the Euclidean disk of radius
        // s (1-|z|^2) / (1 - s^2 |z|^2); normalized area = radius^2.
        let om = z.one_minus_norm_sqr();
        let zz = z.norm_sqr();
        let radius = s * om / (1.0 - s * s * zz);
        let oracle = radius * radius;
        worst = worst.max((v - oracle).abs() / oracle);
        // Band of the volume comparability: V / (1-|z|^2)^2 must lie in
        // [s^2, s^2/(1-s^2)^2].
        let ratio = v / (om * om);
        let lo = s * s;
        let hi = s * s / (1.0 - s * s).powi(2);
        if ratio < lo * (1.0 - 1e-9) || ratio > hi * (1.0 + 1e-9) {
            worst = worst.max(1.0);
        }
    }
    Ok(PropertyReport::passing(
        "volume_band",
        samples,
        worst,
        1e-6,
        "relative gap to the Euclidean-disk area oracle, plus band containment".into(),
    ))
}

fn check_comparability(cfg: &CheckConfig) -> Result<PropertyReport> {
    let s = 0.6f64;
    let mut rng = rng_for(cfg, 0x636f_6d70);
    let mut worst = 1.0f64;
    let samples = cfg.samples.max(1000);
    for _ in 0..samples {
        let z = random_point(&mut rng, cfg.dim, 0.9995);
        let w = point_in_pseudo_ball(&mut rng, &z, s)?;
        let om_z = z.one_minus_norm_sqr();
        let om_w = w.one_minus_norm_sqr();
        let cross = (Complex::new(1.0, 0.0) - z.inner(&w)?).norm();
        let a = random_point(&mut rng, cfg.dim, 0.9995);
        let ca = (Complex::new(1.0, 0.0) - z.inner(&a)?).norm();
        let cb = (Complex::new(1.0, 0.0) - w.inner(&a)?).norm();
        for ratio in [om_z / om_w, om_z / cross, ca / cb] {
            worst = worst.max(ratio.max(1.0 / ratio));
        }
    }
    Ok(PropertyReport::passing(
        "comparability",
        samples,
        worst,
        16.0,
        format!("two-sided comparability constant at s = {s}"),
    ))
}

fn check_exponent_stability(cfg: &CheckConfig) -> Result<PropertyReport> {
    let p = ExponentField::<f64>::affine_example(cfg.dim)?;
    let s = 1.0f64.tanh();
    let mut rng = rng_for(cfg, 0x6578_7073);
    let mut worst_log = 0.0f64;
    let samples = cfg.samples.max(1000);
    for _ in 0..samples {
        // Anchors biased toward the boundary, down to 1 - |a| ~ 1e-3.
        let u = rng.gen::<f64>() * 3.0;
        let t = 1.0 - 10.0f64.powf(-u);
        let a = {
            let dir = random_point(&mut rng, cfg.dim, 1.0 - 1e-9);
            let norm = dir.norm_sqr().sqrt().max(1e-12);
            let coords = dir.coords().iter().map(|c| c * (t / norm)).collect();
            Point::from_coords_clamped(coords)
        };
        let z = point_in_pseudo_ball(&mut rng, &a, s)?;
        let w = point_in_pseudo_ball(&mut rng, &a, s)?;
        let gap = (p.eval(&z) - p.eval(&w)).abs();
        let log_q = gap * (1.0 / a.one_minus_norm_sqr()).ln().max(0.0);
        worst_log = worst_log.max(log_q);
    }
    Ok(PropertyReport::passing(
        "exponent_stability",
        samples,
        worst_log.exp(),
        100.0,
        "max of (1-|a|^2)^-|p(z)-p(w)| over Bergman-1 balls, |a| up to 0.999".into(),
    ))
}

fn check_jensen(cfg: &CheckConfig) -> Result<PropertyReport> {
    let p = ExponentField::<f64>::affine_example(1)?;
    let mu = QuadMeasure::<f64>::lebesgue(1, cfg.radial, cfg.angular, cfg.rho_max)?;
    let s = 1.0f64.tanh();
    let mut rng = rng_for(cfg, 0x6a65_6e73);
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    let anchors = [0.0, 0.3, 0.6, 0.9, 0.99];
    for _ in 0..5 {
        let f = random_polynomial(&mut rng, 4);
        let norm = luxemburg_norm(&f, &p, &mu)?;
        let f = f.scale(Complex::new(1.0 / norm.max(1e-12), 0.0));
        for &aa in &anchors {
            let a = Point::disk(Complex::new(aa, 0.0))?;
            let (vol, avg_abs, avg_mod) = ball_averages(&f, &p, &mu, &a, s);
            if vol <= 0.0 {
                continue;
            }
            for _ in 0..20 {
                let z = point_in_pseudo_ball(&mut rng, &a, s)?;
                let lhs = avg_abs.powf(p.eval(&z));
                let k = lhs / (avg_mod + 1.0);
                worst = worst.max(k);
                samples += 1;
            }
        }
    }
    Ok(PropertyReport::passing(
        "jensen",
        samples,
        worst,
        50.0,
        "averaging constant for unit-norm polynomials over Bergman-1 balls".into(),
    ))
}

fn ball_averages(
    f: &HoloFunction<f64>,
    p: &ExponentField<f64>,
    mu: &QuadMeasure<f64>,
    a: &Point<f64>,
    s: f64,
) -> (f64, f64, f64) {
    let mut vol = 0.0;
    let mut sum_abs = 0.0;
    let mut sum_mod = 0.0;
    for (w, &wt) in mu.nodes().iter().zip(mu.weights().iter()) {
        if !in_pseudo_ball(a, w, s) {
            continue;
        }
        let m = f.eval(w).norm();
        vol += wt;
        sum_abs += wt * m;
        sum_mod += wt * if m > 0.0 { m.powf(p.eval(w)) } else { 0.0 };
    }
    if vol > 0.0 {
        (vol, sum_abs / vol, sum_mod / vol)
    } else {
        (0.0, 0.0, 0.0)
    }
}

fn random_polynomial(rng: &mut ChaCha8Rng, degree: usize) -> HoloFunction<f64> {
    let coeffs: Vec<Complex<f64>> = (0..=degree)
        .map(|_| Complex::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
        .collect();
    HoloFunction::disk_polynomial(&coeffs).unwrap()
}

fn check_pointwise(cfg: &CheckConfig) -> Result<PropertyReport> {
    let p = ExponentField::<f64>::affine_example(1)?;
    let mu = QuadMeasure::<f64>::lebesgue(1, cfg.radial, cfg.angular, cfg.rho_max)?;
    let mut rng = rng_for(cfg, 0x7074_7773);
    let mut family: Vec<HoloFunction<f64>> = Vec::new();
    for _ in 0..6 {
        family.push(random_polynomial(&mut rng, 4));
    }
    for &aa in &[0.5, 0.9, 0.99] {
        let spec = KernelSpec::new(Point::disk(Complex::new(aa, 0.0))?, 2.0, 0.0)?;
        family.push(test_function(&spec, &p, TestFamily::F)?);
    }
    // Normalize each member to unit norm.
    let family: Result<Vec<HoloFunction<f64>>> = family
        .into_iter()
        .map(|f| {
            let n = luxemburg_norm(&f, &p, &mu)?;
            Ok(f.scale(Complex::new(1.0 / n.max(1e-300), 0.0)))
        })
        .collect();
    let family = family?;
    let shells: Vec<f64> = (1..=8).map(|k| 1.0 - 2.0f64.powi(-k)).collect();
    let mut shell_max = vec![0.0f64; shells.len()];
    let mut samples = 0usize;
    for f in &family {
        for (k, &t) in shells.iter().enumerate() {
            let t = t.min(0.995);
            for j in 0..64 {
                let th = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
                let z = Point::from_coords_clamped(vec![Complex::from_polar(t, th)]);
                let q = f.eval(&z).norm()
                    * z.one_minus_norm_sqr().powf(2.0 / p.eval(&z));
                shell_max[k] = shell_max[k].max(q);
                samples += 1;
            }
        }
    }
    let overall = shell_max.iter().cloned().fold(0.0, f64::max);
    let blow_up = shell_max[0] > 0.0
        && shell_max.last().unwrap() > &(10.0 * shell_max[0]);
    Ok(PropertyReport {
        name: "pointwise".into(),
        samples,
        observed_bound: overall,
        asserted_bound: None,
        pass: overall.is_finite() && !blow_up,
        notes: format!("shell maxima of |f(z)| (1-|z|^2)^((n+1)/p(z)): {shell_max:?}"),
    })
}

fn check_anisotropic(cfg: &CheckConfig) -> Result<PropertyReport> {
    let mut worst = 1.0f64;
    let mut samples = 0usize;
    for dim in [1usize, 2] {
        let mut rng = rng_for(cfg, 0x616e_6973 ^ dim as u64);
        for _ in 0..cfg.samples.max(1000) / 2 {
            // Anchors near the boundary, as the comparison requires.
            let t = 0.9 + 0.099 * rng.gen::<f64>();
            let dir = random_point(&mut rng, dim, 1.0 - 1e-9);
            let norm = dir.norm_sqr().sqrt().max(1e-12);
            let a = Point::from_coords_clamped(
                dir.coords().iter().map(|c| c * (t / norm)).collect(),
            );
            let z = point_in_pseudo_ball(&mut rng, &a, 1.0f64.tanh())?;
            let w = random_point(&mut rng, dim, 0.999);
            let d = pseudo_distance(&z, &w)?;
            if d < 1e-6 {
                continue;
            }
            let q = anisotropic_distance(&a, &z, &w)?;
            let ratio = d / q;
            worst = worst.max(ratio.max(1.0 / ratio));
            samples += 1;
        }
    }
    Ok(PropertyReport::passing(
        "anisotropic",
        samples,
        worst,
        32.0,
        "two-sided constant between d(z,w) and the frame quantity, dims 1 and 2".into(),
    ))
}

fn check_oscillation(cfg: &CheckConfig) -> Result<PropertyReport> {
    let (s1, s2) = (0.3f64, 0.6f64);
    let mu = QuadMeasure::<f64>::lebesgue(1, cfg.radial, cfg.angular, cfg.rho_max)?;
    let mut rng = rng_for(cfg, 0x6f73_6369);
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    for &pv in &[2.0f64, 3.5] {
        for _ in 0..4 {
            let f = random_polynomial(&mut rng, 4);
            for _ in 0..10 {
                let z = random_point(&mut rng, 1, 0.99);
                let w = point_in_pseudo_ball(&mut rng, &z, s1)?;
                let d = pseudo_distance(&z, &w)?;
                if d < 1e-3 {
                    continue;
                }
                let mut vol = 0.0;
                let mut sum = 0.0;
                for (node, &wt) in mu.nodes().iter().zip(mu.weights().iter()) {
                    if !in_pseudo_ball(&z, node, s2) {
                        continue;
                    }
                    vol += wt;
                    sum += wt * f.eval(node).norm().powf(pv);
                }
                if vol <= 0.0 || sum <= 0.0 {
                    continue;
                }
                let avg = sum / vol;
                let lhs = (f.eval(&z) - f.eval(&w)).norm().powf(pv);
                worst = worst.max(lhs / (d.powf(pv) * avg));
                samples += 1;
            }
        }
    }
    Ok(PropertyReport::passing(
        "oscillation",
        samples,
        worst,
        100.0,
        format!("oscillation constant at s1 = {s1}, s2 = {s2}, p in {{2, 3.5}}"),
    ))
}

fn check_norm_estimate(cfg: &CheckConfig) -> Result<PropertyReport> {
    let p = ExponentField::<f64>::affine_example(1)?;
    let mu = QuadMeasure::<f64>::lebesgue(1, cfg.radial.max(300), cfg.angular.max(256), cfg.rho_max)?;
    let n_power = 2.0f64;
    let mut products = Vec::new();
    for &t in &[0.0, 0.5, 0.9, 0.99] {
        let z = Point::disk(Complex::new(t, 0.0))?;
        let f = HoloFunction::kernel_power(&z, n_power);
        let norm = luxemburg_norm(&f, &p, &mu)?;
        let om = z.one_minus_norm_sqr();
        products.push(norm * om.powf(n_power - 2.0 / p.eval(&z)));
    }
    let max = products.iter().cloned().fold(f64::MIN, f64::max);
    let min = products.iter().cloned().fold(f64::MAX, f64::min);
    Ok(PropertyReport::passing(
        "norm_estimate",
        products.len(),
        max / min,
        10.0,
        format!("normalized kernel-norm products: {products:?}"),
    ))
}

fn check_norm_modular(cfg: &CheckConfig) -> Result<PropertyReport> {
    let mu = QuadMeasure::<f64>::lebesgue(1, cfg.radial, cfg.angular, cfg.rho_max)?;
    let mut rng = rng_for(cfg, 0x6e6d_6f64);
    let fields = [
        ExponentField::<f64>::affine_example(1)?,
        ExponentField::<f64>::constant(1, 2.0)?,
        ExponentField::<f64>::constant(1, 3.5)?,
    ];
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    for p in &fields {
        for _ in 0..3 {
            let f = random_polynomial(&mut rng, 4);
            let rep = check_norm_modular_bound(&f, p, &mu)?;
            worst = worst.max(rep.observed_bound);
            samples += rep.samples;
        }
    }
    Ok(PropertyReport::passing(
        "norm_modular",
        samples,
        worst,
        1e-8,
        "unit-sphere and norm-vs-modular consistency over random polynomials".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> CheckConfig {
        CheckConfig {
            samples: 2000,
            radial: 120,
            angular: 96,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn unknown_check_errors() {
        assert!(matches!(
            run_property_check("no_such_check", &quick_cfg()),
            Err(Error::UnknownCheck(_))
        ));
    }

    #[test]
    fn mobius_identity_passes() {
        let r = run_property_check("mobius_identity", &quick_cfg()).unwrap();
        assert!(r.pass, "{}", r.notes);
        assert!(r.observed_bound <= 1e-10);
    }

    #[test]
    fn volume_band_passes() {
        let r = run_property_check("volume_band", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {} ({})", r.observed_bound, r.notes);
    }

    #[test]
    fn comparability_passes() {
        let r = run_property_check("comparability", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {}", r.observed_bound);
    }

    #[test]
    fn exponent_stability_passes() {
        let r = run_property_check("exponent_stability", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {}", r.observed_bound);
    }

    #[test]
    fn jensen_passes() {
        let r = run_property_check("jensen", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {}", r.observed_bound);
    }

    #[test]
    fn pointwise_passes() {
        let r = run_property_check("pointwise", &quick_cfg()).unwrap();
        assert!(r.pass, "{}", r.notes);
    }

    #[test]
    fn anisotropic_passes() {
        let r = run_property_check("anisotropic", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {}", r.observed_bound);
    }

    #[test]
    fn oscillation_passes() {
        let r = run_property_check("oscillation", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {}", r.observed_bound);
    }

    #[test]
    fn norm_estimate_passes() {
        let r = run_property_check("norm_estimate", &quick_cfg()).unwrap();
        assert!(r.pass, "{}", r.notes);
    }

    #[test]
    fn norm_modular_passes() {
        let r = run_property_check("norm_modular", &quick_cfg()).unwrap();
        assert!(r.pass, "observed {}", r.observed_bound);
    }

    #[test]
    fn all_names_run() {
        let cfg = CheckConfig {
            samples: 500,
            radial: 80,
            angular: 64,
            ..CheckConfig::default()
        };
        for name in CHECK_NAMES {
            let r = run_property_check(name, &cfg).unwrap();
            assert_eq!(r.name, name);
        }
    }
}
