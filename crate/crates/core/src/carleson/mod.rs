//! Carleson ratio sweeps and operator boundedness/compactness diagnostics.
//!
//! The central quantity is mu(B(a,r)) / (1-|a|^2)^(n+1+beta), swept over
//! lattice centers. Its sup diagnoses boundedness, its decay toward the
//! boundary diagnoses compactness, and shell-by-shell growth flags
//! divergence. Verdict thresholds are engineering constants recorded in
//! every report.

pub mod checks;

pub use checks::{run_property_check, CheckConfig, CHECK_NAMES};

use crate::analysis::expr::{HoloFunction, SelfMap};
use crate::analysis::measure::QuadMeasure;
use crate::analysis::norm::SampledFunction;
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::geometry::lattice::Lattice;
use crate::geometry::{pseudo_distance, Point};
use crate::kernels::{test_function, KernelSpec, TestFamily};
use crate::operators::{
    apply_diff, apply_toeplitz, apply_wco, omega_weight, DiffSpec, PullbackSide,
    PullbackVariant, ToeplitzSpec, WcoSpec,
};
use crate::report::{
    CarlesonReport, PropertyReport, ShellEntry, DECAY_THRESHOLD, DIVERGENCE_THRESHOLD,
};
use crate::scalar::Real;

/// Any of the operators the diagnostics can probe.
#[derive(Debug, Clone)]
pub enum OperatorSpec<R: Real> {
    Toeplitz(ToeplitzSpec<R>),
    Wco(WcoSpec<R>),
    Diff(DiffSpec<R>),
}

impl<R: Real> OperatorSpec<R> {
    pub fn apply(&self, f: &HoloFunction<R>, z: &Point<R>) -> Result<crate::scalar::C<R>> {
        match self {
            OperatorSpec::Toeplitz(t) => apply_toeplitz(t, f, z),
            OperatorSpec::Wco(w) => Ok(apply_wco(w, f, z)),
            OperatorSpec::Diff(d) => Ok(apply_diff(d, f, z)),
        }
    }
}

/// mu-mass of the Bergman ball B(a, r).
///
/// Polar-grid measures (n = 1 volume grids and their densities) use an exact
/// per-row angular window; other measures fall back to a radially pruned
/// scan. Both are exact membership tests, not binning.
pub fn ball_mass<R: Real>(mu: &QuadMeasure<R>, a: &Point<R>, r: R) -> Result<R> {
    let s = r.tanh();
    if let Some(grid) = mu.polar() {
        return Ok(ball_mass_polar(mu, grid, a, s));
    }
    let sa = a.norm_sqr().sqrt();
    let mut mass = R::zero();
    for (w, &wt) in mu.nodes().iter().zip(mu.weights().iter()) {
        if wt == R::zero() {
            continue;
        }
        let sw = w.norm_sqr().sqrt();
        // Radial lower bound on the pseudo-distance prunes most nodes.
        let lb = ((sa - sw).abs()) / (R::one() - sa * sw);
        if lb >= s {
            continue;
        }
        if pseudo_distance(a, w)? < s {
            mass = mass + wt;
        }
    }
    Ok(mass)
}

fn ball_mass_polar<R: Real>(
    mu: &QuadMeasure<R>,
    grid: &crate::analysis::measure::PolarGrid<R>,
    a: &Point<R>,
    s: R,
) -> R {
    let ca = a.coords()[0];
    let rho_a = ca.norm();
    let theta_a = if rho_a > R::zero() {
        ca.im.atan2(ca.re)
    } else {
        R::zero()
    };
    let om_a = a.one_minus_norm_sqr();
    let one_minus_s2 = (R::one() - s) * (R::one() + s);
    let m = grid.angular;
    let two_pi = R::of(2.0 * std::f64::consts::PI);
    let mut mass = R::zero();
    for (i, &rho) in grid.radii.iter().enumerate() {
        let om = (R::one() - rho) * (R::one() + rho);
        let one_minus_rr = (R::one() - rho_a) + rho_a * (R::one() - rho);
        let q_num = om_a * om / one_minus_s2 - one_minus_rr * one_minus_rr;
        if q_num <= R::zero() {
            continue;
        }
        let denom = R::of(4.0) * rho_a * rho;
        let row = &mu.weights()[i * m..(i + 1) * m];
        if denom == R::zero() || q_num / denom >= R::one() {
            // Whole row inside the ball.
            for &w in row {
                mass = mass + w;
            }
            continue;
        }
        let dmax = R::of(2.0) * (q_num / denom).sqrt().asin();
        // theta_j = 2 pi (j + 1/2) / m; want |theta_j - theta_a| < dmax mod 2 pi.
        let scale = R::of(m as f64) / two_pi;
        let lo = ((theta_a - dmax) * scale - R::of(0.5)).ceil().as_f64() as i64;
        let hi = ((theta_a + dmax) * scale - R::of(0.5)).floor().as_f64() as i64;
        if hi < lo {
            continue;
        }
        if (hi - lo + 1) as usize >= m {
            for &w in row {
                mass = mass + w;
            }
            continue;
        }
        let mi = m as i64;
        for j in lo..=hi {
            let jj = j.rem_euclid(mi) as usize;
            mass = mass + row[jj];
        }
    }
    mass
}

fn shell_index(one_minus_a: f64) -> usize {
    // 1 - |a| in (2^-(k+1), 2^-k] gets index k.
    if one_minus_a >= 1.0 {
        0
    } else {
        (-one_minus_a.log2()).floor().min(60.0).max(0.0) as usize
    }
}

fn ratio_sweep<R: Real>(
    mu: &QuadMeasure<R>,
    r: R,
    beta: R,
    lattice: &Lattice<R>,
    mode: &str,
) -> Result<CarlesonReport> {
    if lattice.centers().is_empty() {
        return Err(Error::InvalidArgument("empty lattice".into()));
    }
    if lattice.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            left: lattice.dim(),
            right: mu.dim(),
        });
    }
    let n1b = R::of(mu.dim() as f64 + 1.0) + beta;
    let mut constant = f64::NEG_INFINITY;
    let mut argmax: Vec<[f64; 2]> = Vec::new();
    let mut shells: std::collections::BTreeMap<usize, (f64, bool)> =
        std::collections::BTreeMap::new();
    let mut any_overflow = false;
    for a in lattice.centers() {
        let mass = ball_mass(mu, a, r)?;
        let om = a.one_minus_norm_sqr();
        let ratio = if mass == R::zero() {
            R::zero()
        } else if mass.is_finite() {
            (mass.ln() - n1b * om.ln()).exp()
        } else {
            R::infinity()
        };
        let overflow = !ratio.is_finite() && mass > R::zero();
        any_overflow |= overflow;
        let one_minus_mod = (R::one() - a.norm_sqr().sqrt()).as_f64();
        let k = shell_index(one_minus_mod);
        let entry = shells.entry(k).or_insert((f64::NEG_INFINITY, false));
        let rv = ratio.as_f64();
        if rv > entry.0 {
            entry.0 = rv;
        }
        entry.1 |= overflow;
        if rv > constant {
            constant = rv;
            argmax = a
                .coords()
                .iter()
                .map(|c| [c.re.as_f64(), c.im.as_f64()])
                .collect();
        }
    }
    let shell_profile: Vec<ShellEntry> = shells
        .iter()
        .map(|(&k, &(v, f))| ShellEntry {
            shell_index: k,
            one_minus_a: 2.0f64.powi(-(k as i32)),
            max_ratio: v,
            flag: f,
        })
        .collect();
    let first = shell_profile.first().map(|e| e.max_ratio).unwrap_or(0.0);
    let last = shell_profile.last().map(|e| e.max_ratio).unwrap_or(0.0);
    let peak = shell_profile
        .iter()
        .map(|e| e.max_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let divergence_flag =
        any_overflow || (first > 0.0 && last > DIVERGENCE_THRESHOLD * first);
    let compact_flag = peak <= 0.0 || last <= DECAY_THRESHOLD * peak;
    Ok(CarlesonReport {
        constant,
        argmax_center: argmax,
        r: r.as_f64(),
        beta: beta.as_f64(),
        rho_max: lattice.coverage_radius().as_f64(),
        shell_profile,
        divergence_flag,
        compact_flag,
        mode: mode.to_string(),
        decay_threshold: DECAY_THRESHOLD,
        divergence_threshold: DIVERGENCE_THRESHOLD,
    })
}

/// Boundedness sweep: sup over centers of mu(B(a,r)) / (1-|a|^2)^(n+1+beta).
pub fn carleson_constant<R: Real>(
    mu: &QuadMeasure<R>,
    r: R,
    beta: R,
    lattice: &Lattice<R>,
) -> Result<CarlesonReport> {
    ratio_sweep(mu, r, beta, lattice, "sup")
}

/// Compactness sweep: same ratios, verdict from shell-max decay.
pub fn vanishing_profile<R: Real>(
    mu: &QuadMeasure<R>,
    r: R,
    beta: R,
    lattice: &Lattice<R>,
) -> Result<CarlesonReport> {
    ratio_sweep(mu, r, beta, lattice, "vanishing")
}

/// Shelled sup of the weighted-composition symbol quantity
/// |u(z)| (1-|z|^2)^((n+1)/p(z)) / (1-|phi(z)|^2)^((n+1)/p(phi(z))).
#[derive(Debug, Clone)]
pub struct SymbolSupReport {
    pub sup: f64,
    pub shells: Vec<ShellEntry>,
    pub divergence_flag: bool,
    pub report: PropertyReport,
}

/// Number of decimal shells 1 - |z| = 10^-k probed by `wco_symbol_sup`.
pub const SYMBOL_SHELLS: usize = 6;
const SYMBOL_ANGULAR: usize = 256;

pub fn wco_symbol_sup<R: Real>(
    u: &HoloFunction<R>,
    phi: &SelfMap<R>,
    p: &ExponentField<R>,
) -> Result<SymbolSupReport> {
    let n = phi.dim();
    let n1 = R::of(n as f64 + 1.0);
    let quantity = |z: &Point<R>| -> R {
        let w = phi.apply(z);
        let uz = u.eval(z).norm();
        if uz == R::zero() {
            return R::zero();
        }
        let log_val = uz.ln() + (n1 / p.eval(z)) * z.one_minus_norm_sqr().ln()
            - (n1 / p.eval(&w)) * w.one_minus_norm_sqr().ln();
        if log_val.as_f64() > 700.0 {
            R::infinity()
        } else {
            log_val.exp()
        }
    };
    let mut rng_points = Vec::new();
    for k in 0..=SYMBOL_SHELLS {
        let one_minus = 10.0f64.powi(-(k as i32));
        let t = R::of(1.0 - one_minus);
        rng_points.push((k, t));
    }
    let mut shells = Vec::new();
    let mut sup = 0.0f64;
    let mut samples = 0usize;
    let mut any_overflow = false;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(
        0x7379_6d62_6f6c_0001,
    );
    for (k, t) in rng_points {
        let mut shell_max = 0.0f64;
        let mut flag = false;
        if t == R::zero() {
            let q = quantity(&Point::origin(n)).as_f64();
            shell_max = q;
            samples += 1;
        } else if n == 1 {
            for j in 0..SYMBOL_ANGULAR {
                let th = R::of(2.0 * std::f64::consts::PI * (j as f64) / SYMBOL_ANGULAR as f64);
                let z = Point::from_coords_clamped(vec![crate::scalar::C::new(
                    t * th.cos(),
                    t * th.sin(),
                )]);
                let q = quantity(&z).as_f64();
                if !q.is_finite() {
                    flag = true;
                }
                shell_max = shell_max.max(q);
                samples += 1;
            }
        } else {
            for _ in 0..SYMBOL_ANGULAR {
                let dir = crate::analysis::expr::random_direction::<R>(&mut rng, n);
                let coords = dir.into_iter().map(|d| d * t).collect();
                let z = Point::from_coords_clamped(coords);
                let q = quantity(&z).as_f64();
                if !q.is_finite() {
                    flag = true;
                }
                shell_max = shell_max.max(q);
                samples += 1;
            }
        }
        any_overflow |= flag;
        sup = sup.max(shell_max);
        shells.push(ShellEntry {
            shell_index: k,
            one_minus_a: 10.0f64.powi(-(k as i32)),
            max_ratio: shell_max,
            flag,
        });
    }
    let first = shells
        .iter()
        .find(|e| e.shell_index == 1)
        .map(|e| e.max_ratio)
        .unwrap_or(0.0);
    let last = shells.last().map(|e| e.max_ratio).unwrap_or(0.0);
    let divergence_flag =
        any_overflow || (first > 0.0 && last >= DIVERGENCE_THRESHOLD * first);
    let report = PropertyReport {
        name: "wco_symbol_sup".into(),
        samples,
        observed_bound: sup,
        asserted_bound: None,
        pass: sup.is_finite() && !divergence_flag,
        notes: format!(
            "shell maxima {:?}; divergence = {divergence_flag}",
            shells.iter().map(|e| e.max_ratio).collect::<Vec<_>>()
        ),
    };
    Ok(SymbolSupReport {
        sup,
        shells,
        divergence_flag,
        report,
    })
}

/// Probe compactness via the normalized kernel family: the norm of T f_a
/// must decay as |a| -> 1 for a compact T.
pub fn compactness_probe<R: Real>(
    op: &OperatorSpec<R>,
    p: &ExponentField<R>,
    norm_mu: &QuadMeasure<R>,
    family: &[Point<R>],
) -> Result<PropertyReport> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty probe family".into()));
    }
    let n = norm_mu.dim();
    let n_power = R::of(n as f64 + 1.0);
    let mut norms = Vec::with_capacity(family.len());
    for a in family {
        let spec = KernelSpec::new(a.clone(), n_power, R::zero())?;
        let f = test_function(&spec, p, TestFamily::F)?;
        let moduli: Result<Vec<R>> = norm_mu
            .nodes()
            .iter()
            .map(|z| op.apply(&f, z).map(|v| v.norm()))
            .collect();
        let sampled = SampledFunction::from_moduli(moduli?, p, norm_mu);
        norms.push(sampled.luxemburg_norm()?.as_f64());
    }
    let first = norms[0];
    let last = *norms.last().unwrap();
    let any_overflow = norms.iter().any(|v| !v.is_finite());
    let compact_consistent =
        !any_overflow && (first <= 0.0 || last <= DECAY_THRESHOLD * first);
    let observed = if first > 0.0 { last / first } else { 0.0 };
    Ok(PropertyReport {
        name: "compactness_probe".into(),
        samples: family.len(),
        observed_bound: observed,
        asserted_bound: None,
        pass: !any_overflow,
        notes: format!(
            "norms {norms:?}; compact-consistent = {compact_consistent}; divergence = {any_overflow}"
        ),
    })
}

/// The four Carleson reports driving the boundedness test for a difference
/// of weighted composition operators, plus a combined verdict.
#[derive(Debug, Clone)]
pub struct DiffDiagnostics {
    pub reports: Vec<(String, CarlesonReport)>,
    pub bounded_consistent: bool,
}

pub fn diff_diagnostics<R: Real>(
    spec: &DiffSpec<R>,
    p: &ExponentField<R>,
    base: &QuadMeasure<R>,
    r: R,
    lattice: &Lattice<R>,
    include_plus: bool,
) -> Result<DiffDiagnostics> {
    use crate::operators::pullback_measure_diff as pb;
    let alpha = spec.alpha;
    let mut jobs: Vec<(String, PullbackSide, PullbackVariant<R>)> = vec![
        ("mu_first_dist".into(), PullbackSide::First, PullbackVariant::Dist),
        ("mu_second_dist".into(), PullbackSide::Second, PullbackVariant::Dist),
        (
            "lambda_first".into(),
            PullbackSide::First,
            PullbackVariant::Lambda(alpha),
        ),
        (
            "lambda_second".into(),
            PullbackSide::Second,
            PullbackVariant::Lambda(alpha),
        ),
    ];
    if include_plus {
        jobs.push((
            "mu_first_dist_plus".into(),
            PullbackSide::First,
            PullbackVariant::DistPlus,
        ));
        jobs.push((
            "mu_second_dist_plus".into(),
            PullbackSide::Second,
            PullbackVariant::DistPlus,
        ));
        jobs.push((
            "lambda_first_plus".into(),
            PullbackSide::First,
            PullbackVariant::LambdaPlus(alpha),
        ));
        jobs.push((
            "lambda_second_plus".into(),
            PullbackSide::Second,
            PullbackVariant::LambdaPlus(alpha),
        ));
    }
    let mut reports = Vec::new();
    let mut bounded = true;
    for (name, side, variant) in jobs {
        let mu = pb(p, spec, side, variant, base)?;
        let rep = carleson_constant(&mu, r, R::zero(), lattice)?;
        bounded &= rep.constant.is_finite() && !rep.divergence_flag;
        reports.push((name, rep));
    }
    Ok(DiffDiagnostics {
        reports,
        bounded_consistent: bounded,
    })
}

/// Shelled grid of probe points reaching 1 - |a| = 10^-k, for probe families.
pub fn boundary_family<R: Real>(dim: usize, moduli: &[f64]) -> Vec<Point<R>> {
    moduli
        .iter()
        .map(|&t| {
            let mut coords = vec![crate::scalar::C::new(R::zero(), R::zero()); dim];
            coords[0] = crate::scalar::C::new(R::of(t), R::zero());
            Point::from_coords_clamped(coords)
        })
        .collect()
}

/// Omega-weight diagnostic helper exposed for scenario reporting.
pub fn omega_at<R: Real>(p: &ExponentField<R>, phi: &SelfMap<R>, z: &Point<R>) -> f64 {
    omega_weight(p, phi, z).as_f64()
}
