//! Variable exponents p(.) on the unit ball: evaluation, range, conjugate
//! exponent, and a log-Holder (Dini-Lipschitz) estimator.
//!
//! Exponents are built from a small closed palette (constants, real-linear
//! parts `Re<z,b>`, a radial palette, sums, scalar multiples, conjugation)
//! so that ranges are computable and validation is sound. Arbitrary user
//! callables are deliberately excluded.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{C, Real};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Radial palette entries g(t), t = |z| in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum RadialKind<R: Real> {
    /// Polynomial in t: c0 + c1 t + c2 t^2 + ...
    Poly(Vec<R>),
    /// Discontinuous step: `below` for t < at, `above` for t >= at.
    /// Useful as a deliberately non-log-Holder example.
    Step { at: R, below: R, above: R },
}

impl<R: Real> RadialKind<R> {
    fn eval(&self, t: R) -> R {
        match self {
            RadialKind::Poly(coeffs) => {
                let mut acc = R::zero();
                for &c in coeffs.iter().rev() {
                    acc = acc * t + c;
                }
                acc
            }
            RadialKind::Step { at, below, above } => {
                if t < *at {
                    *below
                } else {
                    *above
                }
            }
        }
    }
}

/// Expression tree for a variable exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum ExponentExpr<R: Real> {
    Const(R),
    /// Re<z, b> with a fixed coefficient vector b.
    ReLinear(Vec<C<R>>),
    /// g(|z|) from the radial palette.
    Radial(RadialKind<R>),
    Sum(Box<ExponentExpr<R>>, Box<ExponentExpr<R>>),
    Scale(R, Box<ExponentExpr<R>>),
    /// Holder conjugate p/(p-1) of the inner expression.
    Conjugate(Box<ExponentExpr<R>>),
}

impl<R: Real> ExponentExpr<R> {
    /// Raw evaluation on coordinates (no clamping to the cached range).
    fn eval_raw(&self, z: &[C<R>]) -> R {
        match self {
            ExponentExpr::Const(c) => *c,
            ExponentExpr::ReLinear(b) => {
                let mut re = R::zero();
                for (zi, bi) in z.iter().zip(b.iter()) {
                    // Re(z_i * conj(b_i))
                    re = re + zi.re * bi.re + zi.im * bi.im;
                }
                re
            }
            ExponentExpr::Radial(g) => {
                let t = z
                    .iter()
                    .map(|c| c.norm_sqr())
                    .fold(R::zero(), |a, b| a + b)
                    .sqrt();
                g.eval(t)
            }
            ExponentExpr::Sum(a, b) => a.eval_raw(z) + b.eval_raw(z),
            ExponentExpr::Scale(s, a) => *s * a.eval_raw(z),
            ExponentExpr::Conjugate(a) => {
                let p = a.eval_raw(z);
                p / (p - R::one())
            }
        }
    }

    fn dim_bound(&self) -> usize {
        match self {
            ExponentExpr::Const(_) | ExponentExpr::Radial(_) => 0,
            ExponentExpr::ReLinear(b) => b.len(),
            ExponentExpr::Sum(a, b) => a.dim_bound().max(b.dim_bound()),
            ExponentExpr::Scale(_, a) | ExponentExpr::Conjugate(a) => a.dim_bound(),
        }
    }

    /// True if the expression is affine in z: a constant plus one combined
    /// real-linear part. For these the range on the closed ball is exact.
    fn affine_parts(&self) -> Option<(R, Vec<C<R>>)> {
        match self {
            ExponentExpr::Const(c) => Some((*c, Vec::new())),
            ExponentExpr::ReLinear(b) => Some((R::zero(), b.clone())),
            ExponentExpr::Radial(_) | ExponentExpr::Conjugate(_) => None,
            ExponentExpr::Sum(a, b) => {
                let (ca, va) = a.affine_parts()?;
                let (cb, vb) = b.affine_parts()?;
                Some((ca + cb, add_vectors(&va, &vb)))
            }
            ExponentExpr::Scale(s, a) => {
                let (ca, va) = a.affine_parts()?;
                Some((*s * ca, va.iter().map(|&v| v * *s).collect()))
            }
        }
    }

    fn step_radii(&self, out: &mut Vec<R>) {
        match self {
            ExponentExpr::Radial(RadialKind::Step { at, .. }) => out.push(*at),
            ExponentExpr::Sum(a, b) => {
                a.step_radii(out);
                b.step_radii(out);
            }
            ExponentExpr::Scale(_, a) | ExponentExpr::Conjugate(a) => a.step_radii(out),
            _ => {}
        }
    }
}

fn add_vectors<R: Real>(a: &[C<R>], b: &[C<R>]) -> Vec<C<R>> {
    let n = a.len().max(b.len());
    let zero = C::new(R::zero(), R::zero());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or(zero) + b.get(i).copied().unwrap_or(zero)
        })
        .collect()
}

/// A validated variable exponent with cached range and log-Holder estimate.
///
/// Validation enforces 1 < p- <= p+ < infinity. Ranges are exact for affine
/// expressions (extremes of Re<z,b> on the closed ball are +-|b|); otherwise
/// they come from dense sampling widened by a 1e-3 guard band.
#[derive(Debug, Clone)]
pub struct ExponentField<R: Real> {
    dim: usize,
    expr: ExponentExpr<R>,
    p_minus: R,
    p_plus: R,
    range_exact: bool,
    log_holder: R,
    log_holder_flagged: bool,
}

const RANGE_DIRECTIONS: usize = 64;
const RANGE_RADII: usize = 96;
const RANGE_RANDOM: usize = 8192;
const RANGE_GUARD: f64 = 1e-3;
const LOG_HOLDER_BUILD_SAMPLES: usize = 1000;
const LOG_HOLDER_SEED: u64 = 0x6c6f_6768_6f6c_6465;

impl<R: Real> ExponentField<R> {
    /// Validate an expression as an exponent on the closed ball of dimension
    /// `dim`. Fails if 1 < p- <= p+ < infinity cannot be certified.
    pub fn new(dim: usize, expr: ExponentExpr<R>) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(Error::BadDimension { n: dim });
        }
        if expr.dim_bound() > dim {
            return Err(Error::DimensionMismatch {
                left: expr.dim_bound(),
                right: dim,
            });
        }
        let (p_minus, p_plus, range_exact) = compute_range(dim, &expr)?;
        if !(p_minus > R::one()) || !p_plus.is_finite() || p_minus > p_plus {
            return Err(Error::ExponentRange {
                p_minus: p_minus.as_f64(),
                p_plus: p_plus.as_f64(),
            });
        }
        let mut field = Self {
            dim,
            expr,
            p_minus,
            p_plus,
            range_exact,
            log_holder: R::zero(),
            log_holder_flagged: false,
        };
        let est_small =
            field.log_holder_estimate(LOG_HOLDER_BUILD_SAMPLES, LOG_HOLDER_SEED);
        let est_large =
            field.log_holder_estimate(8 * LOG_HOLDER_BUILD_SAMPLES, LOG_HOLDER_SEED);
        field.log_holder = est_large;
        // A healthy estimator saturates; sustained growth as the pair stream
        // probes smaller separations signals a discontinuity.
        field.log_holder_flagged =
            est_large > est_small * R::of(1.25) + R::of(1e-9);
        Ok(field)
    }

    /// Constant exponent p(z) = c.
    pub fn constant(dim: usize, c: R) -> Result<Self> {
        Self::new(dim, ExponentExpr::Const(c))
    }

    /// The exponent (n+3) + Re(z_1 + ... + z_n), a standard affine example.
    pub fn affine_example(dim: usize) -> Result<Self> {
        let b = vec![C::new(R::one(), R::zero()); dim];
        Self::new(
            dim,
            ExponentExpr::Sum(
                Box::new(ExponentExpr::Const(R::of(dim as f64 + 3.0))),
                Box::new(ExponentExpr::ReLinear(b)),
            ),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &ExponentExpr<R> {
        &self.expr
    }

    /// p(z), clamped into the validated range [p-, p+].
    pub fn eval(&self, z: &Point<R>) -> R {
        let raw = self.expr.eval_raw(z.coords());
        raw.max(self.p_minus).min(self.p_plus)
    }

    /// Evaluation on raw coordinates (closed-ball totality; same clamping).
    pub fn eval_coords(&self, z: &[C<R>]) -> R {
        let raw = self.expr.eval_raw(z);
        raw.max(self.p_minus).min(self.p_plus)
    }

    /// (p-, p+).
    pub fn range(&self) -> (R, R) {
        (self.p_minus, self.p_plus)
    }

    pub fn p_minus(&self) -> R {
        self.p_minus
    }

    pub fn p_plus(&self) -> R {
        self.p_plus
    }

    /// Whether the cached range is exact (affine forms) rather than sampled.
    pub fn range_exact(&self) -> bool {
        self.range_exact
    }

    /// True when the exponent is constant over the ball.
    pub fn is_constant(&self) -> bool {
        self.p_plus - self.p_minus <= R::of(1e-14) * self.p_plus
    }

    /// Holder conjugate p'(z) = p(z)/(p(z)-1) as a validated field.
    pub fn conjugate(&self) -> Result<ExponentField<R>> {
        ExponentField::new(
            self.dim,
            ExponentExpr::Conjugate(Box::new(self.expr.clone())),
        )
    }

    /// Cached log-Holder constant estimate from construction time.
    pub fn log_holder_cached(&self) -> R {
        self.log_holder
    }

    /// Whether the estimator kept growing under sample doubling at
    /// construction time (typical of discontinuous radial entries).
    pub fn log_holder_flagged(&self) -> bool {
        self.log_holder_flagged
    }

    /// Max over sampled pairs with |z-w| < 1/2 of |p(z)-p(w)| log(1/|z-w|).
    ///
    /// A lower bound for the true Dini-Lipschitz constant. The pair stream
    /// is a deterministic function of `seed`, so for fixed seed the result
    /// is monotone nondecreasing in `samples`.
    pub fn log_holder_estimate(&self, samples: usize, seed: u64) -> R {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = R::zero();
        let mut produced = 0usize;
        while produced < samples {
            let z = random_closed_ball(&mut rng, self.dim);
            // Offsets shrink along the stream so late pairs probe ever
            // smaller separations (where log(1/|z-w|) is large).
            let scale = 0.25 / (1.0 + (produced as f64) * 0.01);
            let mut w = Vec::with_capacity(self.dim);
            for zi in &z {
                let dre = (rng.gen::<f64>() * 2.0 - 1.0) * scale;
                let dim_ = (rng.gen::<f64>() * 2.0 - 1.0) * scale;
                w.push(C::new(zi.re + R::of(dre), zi.im + R::of(dim_)));
            }
            let wn: R = w
                .iter()
                .map(|c| c.norm_sqr())
                .fold(R::zero(), |a, b| a + b)
                .sqrt();
            if wn > R::one() {
                // Pull back onto the closed ball; the pair stays valid.
                let s = R::one() / wn;
                for c in &mut w {
                    *c = *c * s;
                }
            }
            let dist: R = z
                .iter()
                .zip(w.iter())
                .map(|(a, b): (&C<R>, &C<R>)| (*a - *b).norm_sqr())
                .fold(R::zero(), |a, b| a + b)
                .sqrt();
            produced += 1;
            if dist <= R::of(1e-15) || dist >= R::of(0.5) {
                continue;
            }
            let gap = (self.expr.eval_raw(&z) - self.expr.eval_raw(&w)).abs();
            let val = gap * (R::one() / dist).ln();
            if val > best {
                best = val;
            }
        }
        best
    }
}

fn random_closed_ball<R: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C<R>> {
    // Uniform in the ball: Gaussian direction, radius u^(1/2n).
    loop {
        let mut v = Vec::with_capacity(dim);
        let mut norm2 = 0.0f64;
        for _ in 0..dim {
            let (a, b) = gauss_pair(rng);
            let (c, d) = gauss_pair(rng);
            let _ = (b, d);
            v.push((a, c));
            norm2 += a * a + c * c;
        }
        if norm2 <= 1e-300 {
            continue;
        }
        let u: f64 = rng.gen::<f64>();
        let scale = u.powf(1.0 / (2.0 * dim as f64)) / norm2.sqrt();
        return v
            .into_iter()
            .map(|(a, c)| C::new(R::of(a * scale), R::of(c * scale)))
            .collect();
    }
}

fn gauss_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

fn compute_range<R: Real>(
    dim: usize,
    expr: &ExponentExpr<R>,
) -> Result<(R, R, bool)> {
    if let Some((c, b)) = expr.affine_parts() {
        let norm: R = b
            .iter()
            .map(|v| v.norm_sqr())
            .fold(R::zero(), |a, x| a + x)
            .sqrt();
        return Ok((c - norm, c + norm, true));
    }
    // Conjugate of an affine (or otherwise exactly ranged) inner expression:
    // p/(p-1) is monotone decreasing, so the range maps exactly.
    if let ExponentExpr::Conjugate(inner) = expr {
        let (lo, hi, exact) = compute_range(dim, inner)?;
        if !(lo > R::one()) {
            return Err(Error::ExponentRange {
                p_minus: lo.as_f64(),
                p_plus: hi.as_f64(),
            });
        }
        return Ok((hi / (hi - R::one()), lo / (lo - R::one()), exact));
    }
    // Sampled bounds with a guard band: structured grid (directions x radii,
    // including radii straddling any step discontinuities) plus random fill.
    let mut lo = R::infinity();
    let mut hi = R::neg_infinity();
    let mut radii: Vec<R> = (0..RANGE_RADII)
        .map(|i| R::of(i as f64 / (RANGE_RADII - 1) as f64))
        .collect();
    let mut steps = Vec::new();
    expr.step_radii(&mut steps);
    for s in steps {
        for eps in [-1e-9, 0.0, 1e-9] {
            let t = (s + R::of(eps)).max(R::zero()).min(R::one());
            radii.push(t);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7261_6e67_6500_0001);
    let observe = |z: &[C<R>], lo: &mut R, hi: &mut R| {
        let v = expr.eval_raw(z);
        if v < *lo {
            *lo = v;
        }
        if v > *hi {
            *hi = v;
        }
    };
    for &t in &radii {
        for k in 0..RANGE_DIRECTIONS {
            let mut dir = random_closed_ball::<R>(&mut rng, dim);
            let _ = k;
            let dn: R = dir
                .iter()
                .map(|c| c.norm_sqr())
                .fold(R::zero(), |a, b| a + b)
                .sqrt();
            if dn <= R::of(1e-300) {
                continue;
            }
            let s = t / dn;
            for c in &mut dir {
                *c = *c * s;
            }
            observe(&dir, &mut lo, &mut hi);
        }
    }
    for _ in 0..RANGE_RANDOM {
        let z = random_closed_ball::<R>(&mut rng, dim);
        observe(&z, &mut lo, &mut hi);
    }
    Ok((lo - R::of(RANGE_GUARD), hi + R::of(RANGE_GUARD), false))
}
