//! Modulars and Luxemburg-Nakano norms over discrete measures.
//!
//! The modular of f is the weighted node sum of |f|^p with the power taken
//! in log space; the norm is the unique gamma with modular(f/gamma) = 1,
//! found by bracketing and bisection on the strictly decreasing map
//! gamma -> modular(f/gamma).

use crate::analysis::expr::HoloFunction;
use crate::analysis::measure::QuadMeasure;
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::report::PropertyReport;
use crate::scalar::{tree_sum, Real};

/// Result of a modular evaluation: finite, or overflow at a named node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modular<R: Real> {
    Finite(R),
    Overflow { node: usize },
}

impl<R: Real> Modular<R> {
    /// The value, with +infinity standing in for overflow.
    pub fn value(&self) -> R {
        match self {
            Modular::Finite(v) => *v,
            Modular::Overflow { .. } => R::infinity(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Modular::Finite(_))
    }

    pub fn overflow_node(&self) -> Option<usize> {
        match self {
            Modular::Finite(_) => None,
            Modular::Overflow { node } => Some(*node),
        }
    }
}

/// Exponent above which exp() is treated as overflow (f64 overflows at ~709).
const LOG_OVERFLOW: f64 = 700.0;

/// Function values cached at the nodes of a measure, ready for repeated
/// modular evaluations at different scales (the norm bisection evaluates the
/// function exactly once per node).
#[derive(Debug, Clone)]
pub struct SampledFunction<R: Real> {
    /// ln|f| at each node; -infinity where f vanishes.
    lnabs: Vec<R>,
    /// p at each node.
    p: Vec<R>,
    /// measure weight at each node.
    w: Vec<R>,
}

impl<R: Real> SampledFunction<R> {
    pub fn sample(f: &HoloFunction<R>, p: &ExponentField<R>, mu: &QuadMeasure<R>) -> Self {
        let values = mu.nodes().iter().map(|z| f.eval(z).norm());
        Self::from_moduli(values.collect(), p, mu)
    }

    /// Build from precomputed moduli |f(node_k)| (e.g. operator images).
    pub fn from_moduli(moduli: Vec<R>, p: &ExponentField<R>, mu: &QuadMeasure<R>) -> Self {
        debug_assert_eq!(moduli.len(), mu.len());
        let lnabs = moduli
            .into_iter()
            .map(|m| if m > R::zero() { m.ln() } else { R::neg_infinity() })
            .collect();
        let pvals = mu.nodes().iter().map(|z| p.eval(z)).collect();
        Self {
            lnabs,
            p: pvals,
            w: mu.weights().to_vec(),
        }
    }

    /// Modular of f / gamma, passed as ln(gamma).
    pub fn modular_scaled(&self, ln_gamma: R) -> Modular<R> {
        let mut terms = Vec::with_capacity(self.lnabs.len());
        for k in 0..self.lnabs.len() {
            let w = self.w[k];
            if w == R::zero() {
                terms.push(R::zero());
                continue;
            }
            let la = self.lnabs[k];
            if la == R::neg_infinity() {
                terms.push(R::zero());
                continue;
            }
            if !la.is_finite() || !w.is_finite() {
                return Modular::Overflow { node: k };
            }
            let e = self.p[k] * (la - ln_gamma) + w.ln();
            if e.as_f64() > LOG_OVERFLOW {
                return Modular::Overflow { node: k };
            }
            terms.push(e.exp());
        }
        let total = tree_sum(&terms);
        if total.is_finite() {
            Modular::Finite(total)
        } else {
            Modular::Overflow {
                node: terms
                    .iter()
                    .position(|t| !t.is_finite())
                    .unwrap_or(0),
            }
        }
    }

    /// True if f vanishes (or the measure is zero) at every node.
    pub fn is_null(&self) -> bool {
        self.lnabs
            .iter()
            .zip(self.w.iter())
            .all(|(&la, &w)| la == R::neg_infinity() || w == R::zero())
    }

    /// Luxemburg-Nakano norm of the cached values: the infimum of gamma > 0
    /// with modular(f/gamma) <= 1.
    pub fn luxemburg_norm(&self) -> Result<R> {
        if self.is_null() {
            return Ok(R::zero());
        }
        // Bracket on ln(gamma): rho is strictly decreasing and continuous.
        let mut lo = R::zero(); // ln gamma with rho > 1
        let mut hi = R::zero(); // ln gamma with rho <= 1
        let at = |lg: R| self.modular_scaled(lg).value();
        let rho0 = at(R::zero());
        let ln2 = R::of(std::f64::consts::LN_2);
        if rho0 > R::one() {
            let mut step = ln2;
            let mut found = false;
            let mut cur = R::zero();
            for _ in 0..200 {
                let next = cur + step;
                if at(next) <= R::one() {
                    lo = cur;
                    hi = next;
                    found = true;
                    break;
                }
                cur = next;
                step = step * R::of(2.0);
            }
            if !found {
                return Err(Error::BracketFailure(200));
            }
        } else {
            let mut step = ln2;
            let mut found = false;
            let mut cur = R::zero();
            for _ in 0..200 {
                let next = cur - step;
                if at(next) > R::one() {
                    lo = next;
                    hi = cur;
                    found = true;
                    break;
                }
                cur = next;
                step = step * R::of(2.0);
            }
            if !found {
                // rho stays <= 1 arbitrarily far down: only possible when
                // the positive part already sums below 1 in the limit, i.e.
                // effectively null mass; treat the infimum as 0.
                return Ok(R::zero());
            }
        }
        for _ in 0..200 {
            let mid = (lo + hi) * R::of(0.5);
            let rho = at(mid);
            if (rho - R::one()).abs() < R::of(1e-10) {
                return Ok(mid.exp());
            }
            if rho > R::one() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < R::of(1e-12) {
                break;
            }
        }
        Ok(((lo + hi) * R::of(0.5)).exp())
    }
}

/// The modular of f with respect to (p, mu): weighted sum of |f|^p.
pub fn modular<R: Real>(
    f: &HoloFunction<R>,
    p: &ExponentField<R>,
    mu: &QuadMeasure<R>,
) -> Modular<R> {
    SampledFunction::sample(f, p, mu).modular_scaled(R::zero())
}

/// Luxemburg-Nakano norm of f with respect to (p, mu).
pub fn luxemburg_norm<R: Real>(
    f: &HoloFunction<R>,
    p: &ExponentField<R>,
    mu: &QuadMeasure<R>,
) -> Result<R> {
    SampledFunction::sample(f, p, mu).luxemburg_norm()
}

/// Consistency of norm and modular: the unit-sphere equivalence
/// (modular(f/||f||) = 1 for f != 0) and the bound ||f|| <= modular(f) + 1.
pub fn check_norm_modular_bound<R: Real>(
    f: &HoloFunction<R>,
    p: &ExponentField<R>,
    mu: &QuadMeasure<R>,
) -> Result<PropertyReport> {
    let sampled = SampledFunction::sample(f, p, mu);
    let rho = sampled.modular_scaled(R::zero());
    let norm = sampled.luxemburg_norm()?;
    if norm == R::zero() {
        return Err(Error::InvalidArgument(
            "norm/modular consistency check needs f != 0".into(),
        ));
    }
    let unit_gap = (sampled.modular_scaled(norm.ln()).value() - R::one()).abs();
    let bound_excess = if rho.is_finite() {
        (norm - rho.value() - R::one()).max(R::zero())
    } else {
        R::zero()
    };
    let observed = unit_gap.max(bound_excess).as_f64();
    let asserted = 1e-8;
    Ok(PropertyReport {
        name: "norm_modular".into(),
        samples: mu.len(),
        observed_bound: observed,
        asserted_bound: Some(asserted),
        pass: observed <= asserted,
        notes: format!(
            "modular = {:.6e}, norm = {:.6e}, unit-sphere gap = {:.3e}, bound excess = {:.3e}",
            rho.value().as_f64(),
            norm.as_f64(),
            unit_gap.as_f64(),
            bound_excess.as_f64()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use approx::assert_relative_eq;
    use num_complex::Complex;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dv() -> QuadMeasure<f64> {
        QuadMeasure::lebesgue(1, 200, 128, 1.0 - 1e-4).unwrap()
    }

    #[test]
    fn modular_of_zero_and_one() {
        let mu = dv();
        let p = ExponentField::constant(1, 2.0).unwrap();
        let zero = HoloFunction::constant(1, Complex::new(0.0, 0.0));
        assert_eq!(modular(&zero, &p, &mu).value(), 0.0);
        let one = HoloFunction::constant(1, Complex::new(1.0, 0.0));
        assert_relative_eq!(modular(&one, &p, &mu).value(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn modular_z_squared() {
        // Integral |z|^2 dV = 1/2.
        let mu = dv();
        let p = ExponentField::constant(1, 2.0).unwrap();
        let f = HoloFunction::monomial(1, 0, 1, Complex::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(modular(&f, &p, &mu).value(), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn norm_constant_exponent_closed_form() {
        // ||z||_p = (integral |z|^p dV)^(1/p) = (1/(p/2+1))^(1/p).
        let mu = dv();
        let f = HoloFunction::monomial(1, 0, 1, Complex::new(1.0, 0.0)).unwrap();
        for pv in [2.0, 3.5] {
            let p = ExponentField::constant(1, pv).unwrap();
            let n = luxemburg_norm(&f, &p, &mu).unwrap();
            let expect = (1.0 / (pv / 2.0 + 1.0)).powf(1.0 / pv);
            assert_relative_eq!(n, expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn norm_zero_function() {
        let mu = dv();
        let p = ExponentField::constant(1, 2.0).unwrap();
        let zero = HoloFunction::constant(1, Complex::new(0.0, 0.0));
        assert_eq!(luxemburg_norm(&zero, &p, &mu).unwrap(), 0.0);
    }

    #[test]
    fn norm_homogeneity() {
        let mu = dv();
        let p = ExponentField::affine_example(1).unwrap();
        let f = HoloFunction::disk_polynomial(&[
            Complex::new(0.3, 0.1),
            Complex::new(-1.0, 0.5),
            Complex::new(0.0, 2.0),
        ])
        .unwrap();
        let base = luxemburg_norm(&f, &p, &mu).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let c = Complex::new(rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0);
            let scaled = f.clone().scale(c);
            let ns = luxemburg_norm(&scaled, &p, &mu).unwrap();
            assert_relative_eq!(ns, c.norm() * base, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn unit_sphere_consistency() {
        let mu = dv();
        let p = ExponentField::affine_example(1).unwrap();
        let f = HoloFunction::disk_polynomial(&[
            Complex::new(1.0, 0.0),
            Complex::new(0.5, -0.25),
        ])
        .unwrap();
        let s = SampledFunction::sample(&f, &p, &mu);
        let norm = s.luxemburg_norm().unwrap();
        let rho_at_norm = s.modular_scaled(norm.ln()).value();
        assert!((rho_at_norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn modular_monotone_in_scale() {
        let mu = dv();
        let p = ExponentField::affine_example(1).unwrap();
        let f = HoloFunction::monomial(1, 0, 2, Complex::new(1.5, 0.0)).unwrap();
        let s = SampledFunction::sample(&f, &p, &mu);
        let mut prev = f64::INFINITY;
        for lg in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let v = s.modular_scaled(lg).value();
            assert!(v < prev, "modular not strictly decreasing in gamma");
            prev = v;
        }
    }

    #[test]
    fn overflow_sentinel_reported() {
        // A point mass very close to the boundary with a strongly singular
        // kernel power overflows the modular.
        let a = Point::disk(Complex::new(1.0 - 1e-12, 0.0)).unwrap();
        let mu = QuadMeasure::point_masses(1, vec![(a.clone(), 1.0)]).unwrap();
        let p = ExponentField::constant(1, 50.0).unwrap();
        let f = HoloFunction::kernel_power(&a, 2.0);
        let m = modular(&f, &p, &mu);
        assert!(!m.is_finite());
        assert_eq!(m.overflow_node(), Some(0));
    }

    #[test]
    fn norm_modular_bound_report() {
        let mu = dv();
        let p = ExponentField::affine_example(1).unwrap();
        let f = HoloFunction::disk_polynomial(&[
            Complex::new(0.7, 0.0),
            Complex::new(0.0, 1.2),
            Complex::new(0.4, 0.0),
        ])
        .unwrap();
        let report = check_norm_modular_bound(&f, &p, &mu).unwrap();
        assert!(report.pass, "{}", report.notes);
    }
}
