//! Toeplitz operators, weighted composition operators, their differences,
//! and the weighted pull-back measures that diagnose them.

use crate::analysis::expr::{HoloFunction, SelfMap};
use crate::analysis::measure::{Provenance, QuadMeasure};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::geometry::{pseudo_distance, Point};
use crate::kernels::kernel_beta;
use crate::scalar::{tree_sum_c, C, Real};

/// T_mu^beta f(z) = integral of f(w) (1-<z,w>)^-(n+1+beta) d mu(w).
#[derive(Debug, Clone)]
pub struct ToeplitzSpec<R: Real> {
    pub mu: QuadMeasure<R>,
    pub beta: R,
}

impl<R: Real> ToeplitzSpec<R> {
    pub fn new(mu: QuadMeasure<R>, beta: R) -> Result<Self> {
        if beta < R::zero() {
            return Err(Error::InvalidArgument(format!(
                "beta must be >= 0, got {}",
                beta.as_f64()
            )));
        }
        Ok(Self { mu, beta })
    }
}

/// C_{u,phi} f = u * (f o phi).
#[derive(Debug, Clone)]
pub struct WcoSpec<R: Real> {
    pub u: HoloFunction<R>,
    pub phi: SelfMap<R>,
}

impl<R: Real> WcoSpec<R> {
    pub fn new(u: HoloFunction<R>, phi: SelfMap<R>) -> Result<Self> {
        if u.dim() != phi.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: phi.dim(),
            });
        }
        Ok(Self { u, phi })
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }
}

/// The difference C_{u,phi} - C_{v,psi} with the auxiliary power alpha
/// (required to be at least (n+1) p+).
#[derive(Debug, Clone)]
pub struct DiffSpec<R: Real> {
    pub first: WcoSpec<R>,
    pub second: WcoSpec<R>,
    pub alpha: R,
}

impl<R: Real> DiffSpec<R> {
    pub fn new(
        first: WcoSpec<R>,
        second: WcoSpec<R>,
        alpha: R,
        p: &ExponentField<R>,
    ) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch {
                left: first.dim(),
                right: second.dim(),
            });
        }
        let floor = R::of(first.dim() as f64 + 1.0) * p.p_plus();
        if alpha < floor - R::of(1e-12) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} below (n+1) p+ = {}",
                alpha.as_f64(),
                floor.as_f64()
            )));
        }
        Ok(Self {
            first,
            second,
            alpha,
        })
    }

    /// The default choice alpha = (n+1) p+.
    pub fn with_default_alpha(
        first: WcoSpec<R>,
        second: WcoSpec<R>,
        p: &ExponentField<R>,
    ) -> Result<Self> {
        let alpha = R::of(first.dim() as f64 + 1.0) * p.p_plus();
        Self::new(first, second, alpha, p)
    }
}

/// Apply a Toeplitz operator at a point by quadrature.
pub fn apply_toeplitz<R: Real>(
    spec: &ToeplitzSpec<R>,
    f: &HoloFunction<R>,
    z: &Point<R>,
) -> Result<C<R>> {
    let mut terms = Vec::with_capacity(spec.mu.len());
    for (w, &wt) in spec.mu.nodes().iter().zip(spec.mu.weights().iter()) {
        let k = kernel_beta(z, w, spec.beta)?;
        terms.push(f.eval(w) * k * C::new(wt, R::zero()));
    }
    Ok(tree_sum_c(&terms))
}

/// Apply a weighted composition operator: u(z) f(phi(z)).
pub fn apply_wco<R: Real>(spec: &WcoSpec<R>, f: &HoloFunction<R>, z: &Point<R>) -> C<R> {
    let w = spec.phi.apply(z);
    spec.u.eval(z) * f.eval(&w)
}

/// Apply the difference of two weighted composition operators.
pub fn apply_diff<R: Real>(spec: &DiffSpec<R>, f: &HoloFunction<R>, z: &Point<R>) -> C<R> {
    apply_wco(&spec.first, f, z) - apply_wco(&spec.second, f, z)
}

/// The exponent-mismatch weight
/// omega_phi(z) = (1 - |phi(z)|^2)^(-(n+1)(p(z) - p(phi(z)))/p(phi(z))),
/// computed in log space; +infinity on overflow.
pub fn omega_weight<R: Real>(p: &ExponentField<R>, phi: &SelfMap<R>, z: &Point<R>) -> R {
    let w = phi.apply(z);
    let n1 = R::of(phi.dim() as f64 + 1.0);
    let pz = p.eval(z);
    let pw = p.eval(&w);
    let exponent = n1 * (pz - pw) / pw;
    let log_om = w.one_minus_norm_sqr().ln();
    let e = -exponent * log_om;
    if e.as_f64() > 700.0 {
        R::infinity()
    } else {
        e.exp()
    }
}

/// d(z) = pseudo-hyperbolic distance between phi(z) and psi(z).
pub fn joint_distance<R: Real>(
    phi: &SelfMap<R>,
    psi: &SelfMap<R>,
    z: &Point<R>,
) -> Result<R> {
    pseudo_distance(&phi.apply(z), &psi.apply(z))
}

/// Which weighted pull-back measure to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PullbackVariant<R: Real> {
    /// |u|^p omega_phi.
    Plain,
    /// |u|^p (omega_phi + 1).
    PlainPlus,
    /// |u|^p d^p omega_phi.
    Dist,
    /// |u|^p (d^p omega_phi + 1).
    DistPlus,
    /// |u - v|^p (1 - d)^alpha omega_phi.
    Lambda(R),
    /// |u - v|^p (1 - d)^alpha (omega_phi + 1).
    LambdaPlus(R),
}

/// Which symbol/map pair of a difference spec drives the pull-back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PullbackSide {
    First,
    Second,
}

/// Build the weighted pull-back of `base` through phi: point masses at
/// phi(node_k) with weights weight_k x integrand(node_k). Overflowing nodes
/// keep a +infinity weight so downstream diagnostics report divergence.
pub fn pullback_measure<R: Real>(
    p: &ExponentField<R>,
    spec: &WcoSpec<R>,
    variant: PullbackVariant<R>,
    base: &QuadMeasure<R>,
) -> Result<QuadMeasure<R>> {
    match variant {
        PullbackVariant::Plain | PullbackVariant::PlainPlus => {}
        _ => {
            return Err(Error::InvalidArgument(
                "distance and lambda variants need a difference spec".into(),
            ))
        }
    }
    pullback_impl(p, spec, None, variant, base)
}

/// Pull-back for difference specs; `side` selects (u,phi) or (v,psi).
pub fn pullback_measure_diff<R: Real>(
    p: &ExponentField<R>,
    spec: &DiffSpec<R>,
    side: PullbackSide,
    variant: PullbackVariant<R>,
    base: &QuadMeasure<R>,
) -> Result<QuadMeasure<R>> {
    let (own, other) = match side {
        PullbackSide::First => (&spec.first, &spec.second),
        PullbackSide::Second => (&spec.second, &spec.first),
    };
    pullback_impl(p, own, Some(other), variant, base)
}

fn pullback_impl<R: Real>(
    p: &ExponentField<R>,
    own: &WcoSpec<R>,
    other: Option<&WcoSpec<R>>,
    variant: PullbackVariant<R>,
    base: &QuadMeasure<R>,
) -> Result<QuadMeasure<R>> {
    if base.dim() != own.dim() {
        return Err(Error::DimensionMismatch {
            left: base.dim(),
            right: own.dim(),
        });
    }
    if !matches!(base.provenance(), Provenance::Lebesgue { .. }) {
        return Err(Error::InvalidArgument(
            "pull-back base must be a volume quadrature".into(),
        ));
    }
    let mut masses = Vec::with_capacity(base.len());
    for (z, &wt) in base.nodes().iter().zip(base.weights().iter()) {
        let target = own.phi.apply(z);
        let pz = p.eval(z);
        let omega = omega_weight(p, &own.phi, z);
        let symbol = match variant {
            PullbackVariant::Lambda(_) | PullbackVariant::LambdaPlus(_) => {
                let o = other.ok_or_else(|| {
                    Error::InvalidArgument("lambda variant needs a difference spec".into())
                })?;
                (own.u.eval(z) - o.u.eval(z)).norm()
            }
            _ => own.u.eval(z).norm(),
        };
        let symbol_pow = pow_nonneg(symbol, pz);
        let factor = match variant {
            PullbackVariant::Plain => omega,
            PullbackVariant::PlainPlus => omega + R::one(),
            PullbackVariant::Dist | PullbackVariant::DistPlus => {
                let o = other.ok_or_else(|| {
                    Error::InvalidArgument("distance variant needs a difference spec".into())
                })?;
                let d = joint_distance(&own.phi, &o.phi, z)?;
                let dp = pow_nonneg(d, pz);
                if matches!(variant, PullbackVariant::Dist) {
                    dp * omega
                } else {
                    dp * omega + R::one()
                }
            }
            PullbackVariant::Lambda(alpha) => {
                let o = other.expect("checked above");
                let d = joint_distance(&own.phi, &o.phi, z)?;
                pow_nonneg(R::one() - d, alpha) * omega
            }
            PullbackVariant::LambdaPlus(alpha) => {
                let o = other.expect("checked above");
                let d = joint_distance(&own.phi, &o.phi, z)?;
                pow_nonneg(R::one() - d, alpha) * (omega + R::one())
            }
        };
        let weight = wt * symbol_pow * factor;
        let weight = if weight.is_nan() { R::infinity() } else { weight };
        masses.push((target, weight));
    }
    QuadMeasure::point_masses_with_provenance(
        base.dim(),
        masses,
        Provenance::Pullback(format!("{variant:?}")),
    )
}

/// x^q for x >= 0 with the convention 0^q = 0 for q > 0 and 0^0 = 1.
fn pow_nonneg<R: Real>(x: R, q: R) -> R {
    if x == R::zero() {
        if q == R::zero() {
            R::one()
        } else {
            R::zero()
        }
    } else {
        let e = q * x.ln();
        if e.as_f64() > 700.0 {
            R::infinity()
        } else {
            e.exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    fn disk(re: f64, im: f64) -> Point<f64> {
        Point::disk(Complex::new(re, im)).unwrap()
    }

    fn dv() -> QuadMeasure<f64> {
        QuadMeasure::lebesgue(1, 240, 256, 1.0 - 1e-5).unwrap()
    }

    fn one() -> HoloFunction<f64> {
        HoloFunction::constant(1, Complex::new(1.0, 0.0))
    }

    #[test]
    fn toeplitz_with_dv_reproduces() {
        let spec = ToeplitzSpec::new(dv(), 0.0).unwrap();
        let f = HoloFunction::disk_polynomial(&[
            Complex::new(0.5, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, -0.5),
            Complex::new(0.25, 0.0),
        ])
        .unwrap();
        for z in [disk(0.0, 0.0), disk(0.5, -0.3), disk(-0.8, 0.0)] {
            let tv = apply_toeplitz(&spec, &f, &z).unwrap();
            let fv = f.eval(&z);
            assert!((tv - fv).norm() < 1e-6);
        }
    }

    #[test]
    fn toeplitz_point_mass() {
        let w0 = disk(0.3, 0.2);
        let mu = QuadMeasure::point_masses(1, vec![(w0.clone(), 2.0)]).unwrap();
        let spec = ToeplitzSpec::new(mu, 1.0).unwrap();
        let f = HoloFunction::monomial(1, 0, 1, Complex::new(1.0, 0.0)).unwrap();
        let z = disk(0.4, -0.1);
        let got = apply_toeplitz(&spec, &f, &z).unwrap();
        let inner = z.inner(&w0).unwrap();
        let expect = Complex::new(2.0, 0.0)
            * f.eval(&w0)
            * (Complex::new(1.0, 0.0) - inner).powf(-3.0);
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn wco_identity_and_difference() {
        let id = SelfMap::identity(1);
        let spec = WcoSpec::new(one(), id.clone()).unwrap();
        let f = HoloFunction::monomial(1, 0, 2, Complex::new(1.0, 0.0)).unwrap();
        let z = disk(0.6, 0.1);
        assert!((apply_wco(&spec, &f, &z) - f.eval(&z)).norm() < 1e-14);

        // (C_{u,phi} - C_{v,psi}) 1 = u - v.
        let u = HoloFunction::monomial(1, 0, 1, Complex::new(1.0, 0.0)).unwrap();
        let v = HoloFunction::constant(1, Complex::new(0.25, 0.0));
        let p = ExponentField::constant(1, 2.0).unwrap();
        let d = DiffSpec::with_default_alpha(
            WcoSpec::new(u.clone(), id.clone()).unwrap(),
            WcoSpec::new(v.clone(), id).unwrap(),
            &p,
        )
        .unwrap();
        let got = apply_diff(&d, &one(), &z);
        let expect = u.eval(&z) - v.eval(&z);
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn omega_trivial_cases() {
        let id = SelfMap::identity(1);
        let p = ExponentField::affine_example(1).unwrap();
        assert_relative_eq!(omega_weight(&p, &id, &disk(0.7, 0.2)), 1.0, epsilon = 1e-12);

        let pc = ExponentField::constant(1, 3.0).unwrap();
        let neg = SelfMap::scalar_multiple(1, Complex::new(-1.0, 0.0)).unwrap();
        assert_relative_eq!(omega_weight(&pc, &neg, &disk(0.9, 0.0)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn omega_affine_oracle() {
        // p = 4 + Re z, phi = -z, z = 0.9:
        // exponent 2 (p(0.9) - p(-0.9)) / p(-0.9) = 2 * 1.8 / 3.1,
        // omega = 0.19^(-36/31) ~ 6.879.
        let p = ExponentField::affine_example(1).unwrap();
        let neg = SelfMap::scalar_multiple(1, Complex::new(-1.0, 0.0)).unwrap();
        let om = omega_weight(&p, &neg, &disk(0.9, 0.0));
        let expect = (1.0 - 0.81f64).powf(-2.0 * 1.8 / 3.1);
        assert_relative_eq!(om, expect, epsilon = 1e-10);
        assert!((om - 6.88).abs() < 0.01);
    }

    #[test]
    fn joint_distance_oracle() {
        let half = SelfMap::scalar_multiple(1, Complex::new(0.5, 0.0)).unwrap();
        let neg_half = SelfMap::scalar_multiple(1, Complex::new(-0.5, 0.0)).unwrap();
        let d = joint_distance(&half, &neg_half, &disk(0.5, 0.0)).unwrap();
        assert_relative_eq!(d, 8.0 / 17.0, epsilon = 1e-12);

        let zero_map = SelfMap::new(vec![HoloFunction::constant(
            1,
            Complex::new(0.0, 0.0),
        )])
        .unwrap();
        let phi = SelfMap::scalar_multiple(1, Complex::new(0.5, 0.0)).unwrap();
        let z = disk(0.6, 0.0);
        let d0 = joint_distance(&phi, &zero_map, &z).unwrap();
        assert_relative_eq!(d0, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn pullback_identity_is_base() {
        let base = QuadMeasure::lebesgue(1, 60, 32, 0.999).unwrap();
        let p = ExponentField::constant(1, 2.0).unwrap();
        let spec = WcoSpec::new(one(), SelfMap::identity(1)).unwrap();
        let mu = pullback_measure(&p, &spec, PullbackVariant::Plain, &base).unwrap();
        assert_eq!(mu.len(), base.len());
        for (a, b) in mu.weights().iter().zip(base.weights().iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn pullback_trivial_zero_cases() {
        let base = QuadMeasure::lebesgue(1, 40, 32, 0.99).unwrap();
        let p = ExponentField::constant(1, 2.0).unwrap();
        let phi = SelfMap::scalar_multiple(1, Complex::new(0.5, 0.0)).unwrap();
        let same = DiffSpec::with_default_alpha(
            WcoSpec::new(one(), phi.clone()).unwrap(),
            WcoSpec::new(one(), phi.clone()).unwrap(),
            &p,
        )
        .unwrap();
        // phi = psi: distance measure vanishes.
        let mu = pullback_measure_diff(
            &p,
            &same,
            PullbackSide::First,
            PullbackVariant::Dist,
            &base,
        )
        .unwrap();
        assert_eq!(mu.total_mass(), 0.0);
        // u = v: lambda measure vanishes.
        let mu = pullback_measure_diff(
            &p,
            &same,
            PullbackSide::First,
            PullbackVariant::Lambda(6.0),
            &base,
        )
        .unwrap();
        assert_eq!(mu.total_mass(), 0.0);
    }

    #[test]
    fn pullback_monotonicity() {
        let base = QuadMeasure::lebesgue(1, 40, 32, 0.99).unwrap();
        let p = ExponentField::affine_example(1).unwrap();
        let u = HoloFunction::disk_polynomial(&[
            Complex::new(0.5, 0.0),
            Complex::new(0.25, 0.1),
        ])
        .unwrap();
        let phi = SelfMap::scalar_multiple(1, Complex::new(0.5, 0.0)).unwrap();
        let spec = WcoSpec::new(u, phi).unwrap();
        let plain = pullback_measure(&p, &spec, PullbackVariant::Plain, &base).unwrap();
        let plus = pullback_measure(&p, &spec, PullbackVariant::PlainPlus, &base).unwrap();
        for (a, b) in plus.weights().iter().zip(plain.weights().iter()) {
            assert!(a >= b);
        }
    }

    #[test]
    fn pullback_transfer_identity() {
        // Point-mass sum of g over the pull-back equals the direct sum of
        // g(phi(z)) |u|^p omega dV: same terms in the same order.
        let base = QuadMeasure::lebesgue(1, 40, 32, 0.99).unwrap();
        let p = ExponentField::affine_example(1).unwrap();
        let u = HoloFunction::monomial(1, 0, 1, Complex::new(1.0, 0.0)).unwrap();
        let phi = SelfMap::scalar_multiple(1, Complex::new(-0.5, 0.0)).unwrap();
        let spec = WcoSpec::new(u.clone(), phi.clone()).unwrap();
        let mu = pullback_measure(&p, &spec, PullbackVariant::Plain, &base).unwrap();
        let g = |w: &Point<f64>| (1.0 + w.coords()[0].re).abs();
        let lhs: f64 = mu
            .nodes()
            .iter()
            .zip(mu.weights().iter())
            .map(|(w, &wt)| g(w) * wt)
            .sum();
        let rhs: f64 = base
            .nodes()
            .iter()
            .zip(base.weights().iter())
            .map(|(z, &wt)| {
                let pz = p.eval(z);
                g(&phi.apply(z)) * u.eval(z).norm().powf(pz) * omega_weight(&p, &phi, z) * wt
            })
            .sum();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-10, max_relative = 1e-10);
    }

    #[test]
    fn diff_spec_alpha_floor() {
        let p = ExponentField::constant(1, 2.0).unwrap();
        let phi = SelfMap::scalar_multiple(1, Complex::new(0.5, 0.0)).unwrap();
        let a = WcoSpec::new(one(), phi.clone()).unwrap();
        let b = WcoSpec::new(one(), phi).unwrap();
        assert!(DiffSpec::new(a.clone(), b.clone(), 3.0, &p).is_err());
        assert!(DiffSpec::new(a, b, 4.0, &p).is_ok());
    }
}
