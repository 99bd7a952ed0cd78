//! Reproducing kernels, normalized kernel test families, and the Bergman
//! projection (plain and absolute variants), all by direct quadrature.

use crate::analysis::expr::HoloFunction;
use crate::analysis::measure::QuadMeasure;
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::geometry::Point;
use crate::scalar::{tree_sum_c, C, Real};

/// Parameters of the kernel test families: pole a, main power N >= n+1, and
/// an optional boundary power beta >= 0.
#[derive(Debug, Clone)]
pub struct KernelSpec<R: Real> {
    pub a: Point<R>,
    pub n_power: R,
    pub beta: R,
}

impl<R: Real> KernelSpec<R> {
    pub fn new(a: Point<R>, n_power: R, beta: R) -> Result<Self> {
        let n1 = R::of(a.dim() as f64 + 1.0);
        if n_power < n1 {
            return Err(Error::InvalidArgument(format!(
                "kernel power {} below n+1 = {}",
                n_power.as_f64(),
                n1.as_f64()
            )));
        }
        if beta < R::zero() {
            return Err(Error::InvalidArgument(format!(
                "beta must be >= 0, got {}",
                beta.as_f64()
            )));
        }
        Ok(Self { a, n_power, beta })
    }
}

/// Which normalized family a spec generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFamily {
    /// f: prefactor (1-|a|^2)^(N+beta-(n+1)/p(a)) times (1-<z,a>)^-(N+beta).
    F,
    /// h: same shape, normalized with the conjugate exponent p'(a).
    H,
    /// g: the h-family carrying an extra (1-|z|^2)^beta boundary factor.
    G,
}

/// K_z(w) = (1 - <w,z>)^-(n+1).
pub fn kernel<R: Real>(z: &Point<R>, w: &Point<R>) -> Result<C<R>> {
    kernel_beta(z, w, R::zero())
}

/// The beta-shifted kernel (1 - <z,w>)^-(n+1+beta) used by Toeplitz sums.
pub fn kernel_beta<R: Real>(z: &Point<R>, w: &Point<R>, beta: R) -> Result<C<R>> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: w.dim(),
        });
    }
    let n1b = R::of(z.dim() as f64 + 1.0) + beta;
    let base = C::new(R::one(), R::zero()) - z.inner(w)?;
    Ok((base.ln() * C::new(-n1b, R::zero())).exp())
}

/// Build a normalized test function of the requested family.
pub fn test_function<R: Real>(
    spec: &KernelSpec<R>,
    p: &ExponentField<R>,
    family: TestFamily,
) -> Result<HoloFunction<R>> {
    let n = spec.a.dim();
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: n,
        });
    }
    let n1 = R::of(n as f64 + 1.0);
    let total_power = spec.n_power + spec.beta;
    let pa = match family {
        TestFamily::F => p.eval(&spec.a),
        TestFamily::H | TestFamily::G => {
            let q = p.conjugate()?;
            q.eval(&spec.a)
        }
    };
    let prefactor = spec
        .a
        .one_minus_norm_sqr()
        .powf(total_power - n1 / pa);
    let core = HoloFunction::kernel_power(&spec.a, total_power)
        .scale(C::new(prefactor, R::zero()));
    match family {
        TestFamily::F | TestFamily::H => Ok(core),
        TestFamily::G => {
            let b = HoloFunction::boundary_factor(n, spec.beta)?;
            HoloFunction::product(vec![core, b])
        }
    }
}

/// Quadrature Bergman projection: sum of g(w_k) (1-<z,w_k>)^-(n+1) w_k.
/// With `absolute` the kernel is replaced by its modulus.
pub fn bergman_project<R: Real>(
    g: impl Fn(&Point<R>) -> C<R>,
    mu: &QuadMeasure<R>,
    z: &Point<R>,
    absolute: bool,
) -> Result<C<R>> {
    let mut terms = Vec::with_capacity(mu.len());
    for (w, &wt) in mu.nodes().iter().zip(mu.weights().iter()) {
        let k = kernel_beta(z, w, R::zero())?;
        let k = if absolute {
            C::new(k.norm(), R::zero())
        } else {
            k
        };
        terms.push(g(w) * k * C::new(wt, R::zero()));
    }
    Ok(tree_sum_c(&terms))
}

/// Convenience wrapper projecting an expression.
pub fn bergman_project_fn<R: Real>(
    g: &HoloFunction<R>,
    mu: &QuadMeasure<R>,
    z: &Point<R>,
    absolute: bool,
) -> Result<C<R>> {
    bergman_project(|w| g.eval(w), mu, z, absolute)
}
