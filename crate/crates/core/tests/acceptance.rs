//! Acceptance suite: one criterion per test, each printing a single
//! pass/fail line with its observed quantity and tolerance.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use varbergman::analysis::{luxemburg_norm, modular, HoloFunction, Modular, QuadMeasure};
use varbergman::carleson::{run_property_check, wco_symbol_sup, CheckConfig};
use varbergman::cli::{load_scenario, render_json, run_task, shells_csv, Overrides, RunOutput};
use varbergman::exponent::ExponentField;
use varbergman::geometry::{ball_volume, make_lattice, Point};
use varbergman::operators::{pullback_measure_diff, DiffSpec, PullbackSide, PullbackVariant, WcoSpec};
use varbergman::analysis::SelfMap;

fn report(criterion: u32, label: &str, detail: &str, ok: bool) {
    println!(
        "criterion {criterion} ({label}): {} [{detail}]",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} ({label}) failed: {detail}");
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_scenario(kind: &str, file: &str) -> RunOutput {
    let s = load_scenario(&scenario_dir().join(file)).unwrap();
    run_task(kind, &s, &Overrides::default()).unwrap()
}

#[test]
fn criterion_01_distance_identity() {
    let cfg = CheckConfig {
        samples: 10_000,
        ..CheckConfig::default()
    };
    let rep = run_property_check("mobius_identity", &cfg).unwrap();
    report(
        1,
        "distance identity",
        &format!("max residual {:.3e} <= 1e-10 over dims 1..3", rep.observed_bound),
        rep.pass && rep.observed_bound <= 1e-10,
    );
}

#[test]
fn criterion_02_norm_closed_form() {
    let mu = QuadMeasure::<f64>::lebesgue(1, 400, 512, 1.0 - 1e-6).unwrap();
    let mut worst = 0.0f64;
    for &p in &[2.0f64, 3.5] {
        let field = ExponentField::constant(1, p).unwrap();
        for k in 0..=3u32 {
            let f = HoloFunction::monomial(1, 0, k, Complex::new(1.0, 0.0)).unwrap();
            let n = luxemburg_norm(&f, &field, &mu).unwrap();
            let expect = (1.0 / (k as f64 * p / 2.0 + 1.0)).powf(1.0 / p);
            worst = worst.max((n - expect).abs() / expect);
        }
    }
    report(
        2,
        "constant-exponent norms",
        &format!("max relative error {worst:.3e} <= 1e-6"),
        worst <= 1e-6,
    );
}

#[test]
fn criterion_03_norm_modular_consistency() {
    let mu = QuadMeasure::<f64>::lebesgue(1, 240, 256, 1.0 - 1e-4).unwrap();
    let fields = [
        ExponentField::<f64>::constant(1, 2.0).unwrap(),
        ExponentField::<f64>::constant(1, 3.5).unwrap(),
        ExponentField::<f64>::affine_example(1).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0003);
    let mut worst_unit = 0.0f64;
    let mut bound_ok = true;
    for i in 0..20 {
        let coeffs: Vec<Complex<f64>> = (0..5)
            .map(|_| Complex::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        let f = HoloFunction::disk_polynomial(&coeffs).unwrap();
        let p = &fields[i % fields.len()];
        let norm = luxemburg_norm(&f, p, &mu).unwrap();
        let scaled = f.clone().scale(Complex::new(1.0 / norm, 0.0));
        match modular(&scaled, p, &mu) {
            Modular::Finite(v) => worst_unit = worst_unit.max((v - 1.0).abs()),
            Modular::Overflow { .. } => bound_ok = false,
        }
        match modular(&f, p, &mu) {
            Modular::Finite(rho) => bound_ok &= norm <= rho + 1.0 + 1e-8,
            Modular::Overflow { .. } => bound_ok = false,
        }
    }
    report(
        3,
        "norm/modular consistency",
        &format!("max |rho(f/norm) - 1| = {worst_unit:.3e} <= 1e-8; norm <= rho + 1 held: {bound_ok}"),
        worst_unit <= 1e-8 && bound_ok,
    );
}

#[test]
fn criterion_04_kernel_norm_band() {
    let rep = run_property_check("norm_estimate", &CheckConfig::default()).unwrap();
    report(
        4,
        "kernel norm band",
        &format!("band {:.4} <= 10", rep.observed_bound),
        rep.pass && rep.observed_bound <= 10.0,
    );
}

#[test]
fn criterion_05_ball_volume() {
    // Counting quadrature nodes inside a sharp ball boundary converges
    // slowly at the radial tangency rows, so this check uses a fine radial
    // mesh and centers/radii where a 2x margin against 1e-3 holds.
    let mu = QuadMeasure::<f64>::lebesgue(1, 1600, 4096, 1.0 - 1e-4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
    let mut worst_formula = 0.0f64;
    let mut worst_count = 0.0f64;
    for _ in 0..1000 {
        let rho = 0.85 * rng.gen::<f64>().sqrt();
        let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let z = Point::disk(Complex::from_polar(rho, th)).unwrap();
        let s = 0.45 + 0.35 * rng.gen::<f64>();
        let zz = z.norm_sqr();
        let closed = s * s * (1.0 - zz).powi(2) / (1.0 - s * s * zz).powi(2);
        let v = ball_volume(&z, s).unwrap().value;
        worst_formula = worst_formula.max((v - closed).abs() / closed);
        let r = s.atanh();
        let counted = varbergman::carleson::ball_mass(&mu, &z, r).unwrap();
        worst_count = worst_count.max((counted - closed).abs() / closed);
    }
    report(
        5,
        "ball volume",
        &format!("formula error {worst_formula:.3e} <= 1e-12; node-count error {worst_count:.3e} <= 1e-3"),
        worst_formula <= 1e-12 && worst_count <= 1e-3,
    );
}

#[test]
fn criterion_06_lattice_contract() {
    let coarse = make_lattice::<f64>(1, 1.0, 1.0 - 1e-4).unwrap();
    let fine = make_lattice::<f64>(1, 1.0, 1.0 - 1e-5).unwrap();
    let min_sep = coarse.min_pairwise_bergman();
    let audit = coarse.coverage_audit(100_000, 0xacce_0006);
    let t_region = coarse.t_max() - 4.0;
    let overlap_coarse = coarse.overlap_audit(t_region, 2000);
    let overlap_fine = fine.overlap_audit(t_region, 2000);
    let ok = min_sep >= 0.5
        && audit.uncovered == 0
        && overlap_coarse > 0
        && overlap_coarse == overlap_fine;
    report(
        6,
        "lattice contract",
        &format!(
            "min separation {min_sep:.6} >= 0.5; uncovered {}/{}; overlap {overlap_coarse} vs refined {overlap_fine}",
            audit.uncovered, audit.checked
        ),
        ok,
    );
}

#[test]
fn criterion_07_carleson_discrimination() {
    let decay = run_scenario("carleson", "carleson-decay.json");
    let flat = run_scenario("carleson", "carleson-flat.json");
    let growth = run_scenario("carleson", "carleson-growth.json");
    let ok = decay.failures.is_empty() && flat.failures.is_empty() && growth.failures.is_empty();
    report(
        7,
        "Carleson density family",
        &format!(
            "decay {:?}; flat {:?}; growth {:?}",
            decay.failures, flat.failures, growth.failures
        ),
        ok,
    );
}

#[test]
fn criterion_08_toeplitz_reproducing() {
    let out = run_scenario("toeplitz", "toeplitz-reproduce.json");
    let max_err = out.report["toeplitz"]["max_reproduction_error"]
        .as_f64()
        .unwrap();
    let anti = out.report["toeplitz"]["antiholomorphic_leak"].as_f64().unwrap();
    report(
        8,
        "Toeplitz reproduction",
        &format!("max error {max_err:.3e} <= 1e-6; antiholomorphic leak {anti:.3e} <= 1e-6"),
        out.failures.is_empty() && max_err <= 1e-6 && anti <= 1e-6,
    );
}

#[test]
fn criterion_09_symbol_divergence() {
    let d = |x: f64| x * (1.0 - x * x).powf(-4.0 * x / (16.0 - x * x));
    let ratio = d(1.0 - 1e-6) / d(1.0 - 1e-2);
    let p = ExponentField::<f64>::affine_example(1).unwrap();
    let u = HoloFunction::monomial(1, 0, 1, Complex::new(1.0, 0.0)).unwrap();
    let neg = SelfMap::scalar_multiple(1, Complex::new(-1.0, 0.0)).unwrap();
    let rep = wco_symbol_sup(&u, &neg, &p).unwrap();
    report(
        9,
        "symbol divergence",
        &format!("oracle ratio {ratio:.3} >= 10; divergence flag {}", rep.divergence_flag),
        ratio >= 10.0 && rep.divergence_flag,
    );
}

#[test]
fn criterion_10_difference_diagnostics() {
    let p = ExponentField::<f64>::constant(1, 2.0).unwrap();
    let base = QuadMeasure::<f64>::lebesgue(1, 60, 64, 0.999).unwrap();
    let one = HoloFunction::constant(1, Complex::new(1.0, 0.0));
    let two_thirds = HoloFunction::constant(1, Complex::new(2.0 / 3.0, 0.0));
    let half = SelfMap::scalar_multiple(1, Complex::new(0.5, 0.0)).unwrap();

    // Same symbol and same map: every pull-back variant vanishes.
    let same = DiffSpec::with_default_alpha(
        WcoSpec::new(one.clone(), half.clone()).unwrap(),
        WcoSpec::new(one.clone(), half.clone()).unwrap(),
        &p,
    )
    .unwrap();
    // Same map, different weights: the distance-weighted measures vanish.
    let same_map = DiffSpec::with_default_alpha(
        WcoSpec::new(one.clone(), half.clone()).unwrap(),
        WcoSpec::new(two_thirds.clone(), half.clone()).unwrap(),
        &p,
    )
    .unwrap();
    // Same weights, different maps: the weight-gap measures vanish.
    let neg_half = SelfMap::scalar_multiple(1, Complex::new(-0.5, 0.0)).unwrap();
    let same_weight = DiffSpec::with_default_alpha(
        WcoSpec::new(one.clone(), half.clone()).unwrap(),
        WcoSpec::new(one.clone(), neg_half).unwrap(),
        &p,
    )
    .unwrap();
    let mass = |spec: &DiffSpec<f64>, side, variant| {
        pullback_measure_diff(&p, spec, side, variant, &base)
            .unwrap()
            .total_mass()
    };
    let mut zeros_ok = true;
    for side in [PullbackSide::First, PullbackSide::Second] {
        zeros_ok &= mass(&same, side, PullbackVariant::Dist) == 0.0;
        zeros_ok &= mass(&same, side, PullbackVariant::Lambda(same.alpha)) == 0.0;
        zeros_ok &= mass(&same_map, side, PullbackVariant::Dist) == 0.0;
        zeros_ok &= mass(&same_weight, side, PullbackVariant::Lambda(same_weight.alpha)) == 0.0;
    }
    let out = run_scenario("diff", "diff-compact-image.json");
    let finite = out.report["diff"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["report"]["constant"].as_f64().is_some_and(f64::is_finite));
    let bounded = out.report["diff"]["bounded_consistent"] == serde_json::json!(true);
    report(
        10,
        "difference diagnostics",
        &format!(
            "trivial zeros {zeros_ok}; compact-image finite {finite}, bounded-consistent {bounded}"
        ),
        zeros_ok && out.failures.is_empty() && finite && bounded,
    );
}

#[test]
fn criterion_11_determinism() {
    let s = load_scenario(&scenario_dir().join("carleson-growth.json")).unwrap();
    let a = run_task("carleson", &s, &Overrides::default()).unwrap();
    let b = run_task("carleson", &s, &Overrides::default()).unwrap();
    let json_eq = render_json(&a.report) == render_json(&b.report);
    let csv_eq = a.shells_csv == b.shells_csv;
    // Sanity: the CSV helper itself is stable on the same profile.
    let csv_stable = a
        .shells_csv
        .as_deref()
        .map(|c| c.starts_with("shell_index,"))
        .unwrap_or(false);
    let _ = shells_csv(&[]);
    report(
        11,
        "determinism",
        &format!("JSON identical {json_eq}; CSV identical {csv_eq}; CSV well-formed {csv_stable}"),
        json_eq && csv_eq && csv_stable,
    );
}
