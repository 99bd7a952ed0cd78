//! Holomorphic function expressions and holomorphic self-maps of the ball.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{C, Real};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Expression tree for functions on the ball.
///
/// Most constructors produce holomorphic expressions; `boundary_factor` and
/// `conj` are the deliberate exceptions (tracked by a flag) and exist for
/// integrands like the boundary-weighted kernel families.
#[derive(Debug, Clone)]
pub enum Expr<R: Real> {
    /// coeff * z^alpha (multi-index power).
    Monomial { coeff: C<R>, alpha: Vec<u32> },
    /// (1 - <z,a>)^(-power), principal branch; Re(1 - <z,a>) > 0 on the ball.
    KernelPower { a: Vec<C<R>>, power: R },
    /// (1 - |z|^2)^beta — non-holomorphic boundary weight.
    BoundaryFactor { beta: R },
    Sum(Vec<Expr<R>>),
    Product(Vec<Expr<R>>),
    Scale(C<R>, Box<Expr<R>>),
    /// f(phi(z)) for a validated self-map phi.
    Compose(Box<Expr<R>>, SelfMap<R>),
    /// Complex conjugate of the inner expression — non-holomorphic.
    Conj(Box<Expr<R>>),
}

impl<R: Real> Expr<R> {
    fn eval(&self, z: &[C<R>]) -> C<R> {
        match self {
            Expr::Monomial { coeff, alpha } => {
                let mut acc = *coeff;
                for (zi, &k) in z.iter().zip(alpha.iter()) {
                    acc = acc * zi.powu(k);
                }
                acc
            }
            Expr::KernelPower { a, power } => {
                let mut inner = C::new(R::zero(), R::zero());
                for (zi, ai) in z.iter().zip(a.iter()) {
                    inner = inner + zi * ai.conj();
                }
                let base = C::new(R::one(), R::zero()) - inner;
                (base.ln() * C::new(-*power, R::zero())).exp()
            }
            Expr::BoundaryFactor { beta } => {
                let ns = z.iter().map(|c| c.norm_sqr()).fold(R::zero(), |s, v| s + v);
                let om = (R::one() - ns).max(R::zero());
                C::new(om.powf(*beta), R::zero())
            }
            Expr::Sum(terms) => {
                let mut acc = C::new(R::zero(), R::zero());
                for t in terms {
                    acc = acc + t.eval(z);
                }
                acc
            }
            Expr::Product(factors) => {
                let mut acc = C::new(R::one(), R::zero());
                for f in factors {
                    acc = acc * f.eval(z);
                }
                acc
            }
            Expr::Scale(c, inner) => *c * inner.eval(z),
            Expr::Compose(inner, map) => {
                let w = map.apply_coords(z);
                inner.eval(&w)
            }
            Expr::Conj(inner) => inner.eval(z).conj(),
        }
    }

    fn holomorphic(&self) -> bool {
        match self {
            Expr::Monomial { .. } | Expr::KernelPower { .. } => true,
            Expr::BoundaryFactor { .. } => false,
            Expr::Sum(v) | Expr::Product(v) => v.iter().all(|e| e.holomorphic()),
            Expr::Scale(_, e) => e.holomorphic(),
            Expr::Compose(e, _) => e.holomorphic(),
            Expr::Conj(e) => matches!(**e, Expr::Monomial { coeff, ref alpha }
                if coeff.im == R::zero() && alpha.iter().all(|&k| k == 0)),
        }
    }

    fn dim_bound(&self) -> usize {
        match self {
            Expr::Monomial { alpha, .. } => alpha.len(),
            Expr::KernelPower { a, .. } => a.len(),
            Expr::BoundaryFactor { .. } => 0,
            Expr::Sum(v) | Expr::Product(v) => {
                v.iter().map(|e| e.dim_bound()).max().unwrap_or(0)
            }
            Expr::Scale(_, e) | Expr::Conj(e) => e.dim_bound(),
            Expr::Compose(e, m) => e.dim_bound().max(m.dim()),
        }
    }
}

/// An evaluable function on the ball with a holomorphy flag.
#[derive(Debug, Clone)]
pub struct HoloFunction<R: Real> {
    dim: usize,
    expr: Expr<R>,
    holomorphic: bool,
}

impl<R: Real> HoloFunction<R> {
    pub fn new(dim: usize, expr: Expr<R>) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(Error::BadDimension { n: dim });
        }
        if expr.dim_bound() > dim {
            return Err(Error::DimensionMismatch {
                left: expr.dim_bound(),
                right: dim,
            });
        }
        let holomorphic = expr.holomorphic();
        Ok(Self {
            dim,
            expr,
            holomorphic,
        })
    }

    /// The constant function c.
    pub fn constant(dim: usize, c: C<R>) -> Self {
        Self::new(
            dim,
            Expr::Monomial {
                coeff: c,
                alpha: vec![0; dim],
            },
        )
        .expect("constant is always valid")
    }

    /// coeff * z_j^k in dimension `dim`.
    pub fn monomial(dim: usize, j: usize, k: u32, coeff: C<R>) -> Result<Self> {
        if j >= dim {
            return Err(Error::InvalidArgument(format!(
                "coordinate index {j} out of range for dimension {dim}"
            )));
        }
        let mut alpha = vec![0; dim];
        alpha[j] = k;
        Self::new(dim, Expr::Monomial { coeff, alpha })
    }

    /// One-variable polynomial c_0 + c_1 z + ... (n = 1).
    pub fn disk_polynomial(coeffs: &[C<R>]) -> Result<Self> {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| Expr::Monomial {
                coeff: c,
                alpha: vec![k as u32],
            })
            .collect();
        Self::new(1, Expr::Sum(terms))
    }

    /// (1 - <z,a>)^(-power).
    pub fn kernel_power(a: &Point<R>, power: R) -> Self {
        Self::new(
            a.dim(),
            Expr::KernelPower {
                a: a.coords().to_vec(),
                power,
            },
        )
        .expect("kernel power is always valid")
    }

    /// (1 - |z|^2)^beta.
    pub fn boundary_factor(dim: usize, beta: R) -> Result<Self> {
        if beta < R::zero() {
            return Err(Error::InvalidArgument(format!(
                "boundary factor power must be >= 0, got {}",
                beta.as_f64()
            )));
        }
        Self::new(dim, Expr::BoundaryFactor { beta })
    }

    pub fn sum(terms: Vec<HoloFunction<R>>) -> Result<Self> {
        let dim = terms.iter().map(|f| f.dim).max().unwrap_or(1);
        Self::new(dim, Expr::Sum(terms.into_iter().map(|f| f.expr).collect()))
    }

    pub fn product(factors: Vec<HoloFunction<R>>) -> Result<Self> {
        let dim = factors.iter().map(|f| f.dim).max().unwrap_or(1);
        Self::new(
            dim,
            Expr::Product(factors.into_iter().map(|f| f.expr).collect()),
        )
    }

    pub fn scale(self, c: C<R>) -> Self {
        let dim = self.dim;
        Self::new(dim, Expr::Scale(c, Box::new(self.expr))).expect("scale keeps validity")
    }

    pub fn compose(self, map: &SelfMap<R>) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: map.dim(),
            });
        }
        let dim = self.dim;
        Self::new(dim, Expr::Compose(Box::new(self.expr), map.clone()))
    }

    pub fn conj(self) -> Self {
        let dim = self.dim;
        Self::new(dim, Expr::Conj(Box::new(self.expr))).expect("conj keeps validity")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_holomorphic(&self) -> bool {
        self.holomorphic
    }

    pub fn eval(&self, z: &Point<R>) -> C<R> {
        self.expr.eval(z.coords())
    }

    pub fn eval_coords(&self, z: &[C<R>]) -> C<R> {
        self.expr.eval(z)
    }
}

/// A holomorphic self-map of the ball, validated on a boundary-refined grid.
#[derive(Debug, Clone)]
pub struct SelfMap<R: Real> {
    dim: usize,
    components: std::sync::Arc<Vec<HoloFunction<R>>>,
    sup_modulus_estimate: R,
}

const VALIDATION_SHELLS: usize = 20;
const VALIDATION_ANGULAR: usize = 64;
const VALIDATION_RANDOM: usize = 2000;
const VALIDATION_SEED: u64 = 0x7365_6c66_6d61_7000;

impl<R: Real> SelfMap<R> {
    /// Validate `components` as a self-map: every component holomorphic and
    /// |phi(z)| < 1 on a dense grid refined toward the boundary.
    pub fn new(components: Vec<HoloFunction<R>>) -> Result<Self> {
        let dim = components.len();
        if dim == 0 || dim > 8 {
            return Err(Error::BadDimension { n: dim });
        }
        for c in &components {
            if !c.is_holomorphic() {
                return Err(Error::InvalidArgument(
                    "self-map components must be holomorphic".into(),
                ));
            }
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: c.dim(),
                    right: dim,
                });
            }
        }
        let map = Self {
            dim,
            components: std::sync::Arc::new(components),
            sup_modulus_estimate: R::zero(),
        };
        let mut sup = R::zero();
        let mut check = |z: &[C<R>]| -> Result<()> {
            let w = map.apply_coords(z);
            let m: R = w
                .iter()
                .map(|c| c.norm_sqr())
                .fold(R::zero(), |a, b| a + b)
                .sqrt();
            if !(m < R::one()) {
                return Err(Error::NotSelfMap {
                    modulus: m.as_f64(),
                });
            }
            if m > sup {
                sup = m;
            }
            Ok(())
        };
        // Structured shells t = 1 - 2^-k plus a deepest shell near 1e-6.
        let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
        for k in 0..=VALIDATION_SHELLS {
            let t = if k == 0 {
                R::zero()
            } else {
                R::one() - R::of(2.0f64.powi(-(k as i32))).max(R::of(1e-6))
            };
            for _ in 0..VALIDATION_ANGULAR {
                let dir = random_direction::<R>(&mut rng, dim);
                let z: Vec<C<R>> = dir.iter().map(|&d| d * t).collect();
                check(&z)?;
            }
        }
        for _ in 0..VALIDATION_RANDOM {
            let z = random_ball_point::<R>(&mut rng, dim);
            check(&z)?;
        }
        Ok(Self {
            sup_modulus_estimate: sup,
            ..map
        })
    }

    /// The identity map.
    pub fn identity(dim: usize) -> Self {
        let comps = (0..dim)
            .map(|j| {
                HoloFunction::monomial(dim, j, 1, C::new(R::one(), R::zero())).unwrap()
            })
            .collect();
        Self::new(comps).expect("identity is a self-map")
    }

    /// z -> c * z for |c| <= 1 (strict self-map when |c| < 1; c on the unit
    /// circle is a rotation and still maps the open ball to itself).
    pub fn scalar_multiple(dim: usize, c: C<R>) -> Result<Self> {
        let comps = (0..dim)
            .map(|j| HoloFunction::monomial(dim, j, 1, c).unwrap())
            .collect();
        Self::new(comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[HoloFunction<R>] {
        &self.components
    }

    /// Largest |phi(z)| observed during validation sampling.
    pub fn sup_modulus_estimate(&self) -> R {
        self.sup_modulus_estimate
    }

    pub fn apply_coords(&self, z: &[C<R>]) -> Vec<C<R>> {
        self.components.iter().map(|c| c.eval_coords(z)).collect()
    }

    pub fn apply(&self, z: &Point<R>) -> Point<R> {
        Point::from_coords_clamped(self.apply_coords(z.coords()))
    }
}

pub(crate) fn random_direction<R: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C<R>> {
    loop {
        let mut v = Vec::with_capacity(dim);
        let mut n2 = 0.0f64;
        for _ in 0..dim {
            let a = gauss(rng);
            let b = gauss(rng);
            n2 += a * a + b * b;
            v.push((a, b));
        }
        if n2 > 1e-300 {
            let s = 1.0 / n2.sqrt();
            return v
                .into_iter()
                .map(|(a, b)| C::new(R::of(a * s), R::of(b * s)))
                .collect();
        }
    }
}

pub(crate) fn random_ball_point<R: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C<R>> {
    let dir = random_direction::<R>(rng, dim);
    let u: f64 = rng.gen::<f64>();
    let t = R::of(u.powf(1.0 / (2.0 * dim as f64)) * (1.0 - 1e-9));
    dir.into_iter().map(|d| d * t).collect()
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
