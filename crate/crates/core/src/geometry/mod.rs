//! Pseudo-hyperbolic and Bergman geometry of the unit ball in C^n.
//!
//! Provides the involutive automorphisms sigma_z, the pseudo-hyperbolic
//! distance d(z,w) = |sigma_z(w)|, the Bergman metric
//! beta(z,w) = atanh d(z,w), ball volumes, boundary frames, and (in the
//! [`lattice`] submodule) constructive r-lattices.

pub mod lattice;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use rand::Rng;

pub use lattice::{make_lattice, Lattice};

/// Maximum supported complex dimension.
pub const MAX_DIM: usize = 8;

/// A point of the open unit ball in C^n, 1 <= n <= 8.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<R: Real> {
    coords: Vec<C<R>>,
}

impl<R: Real> Point<R> {
    pub fn new(coords: Vec<C<R>>) -> Result<Self> {
        let n = coords.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::BadDimension { n });
        }
        let p = Point { coords };
        let ns = p.norm_sqr();
        if ns >= R::one() {
            return Err(Error::OutsideBall {
                norm: ns.sqrt().as_f64(),
            });
        }
        Ok(p)
    }

    /// One-dimensional point from a complex value.
    pub fn disk(z: C<R>) -> Result<Self> {
        Self::new(vec![z])
    }

    /// One-dimensional point on the real axis.
    pub fn disk_re(x: R) -> Result<Self> {
        Self::disk(C::new(x, R::zero()))
    }

    pub fn origin(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM);
        Point {
            coords: vec![C::new(R::zero(), R::zero()); n],
        }
    }

    /// Internal constructor for values known to lie in the ball up to
    /// rounding; pulls barely-outside results back inside.
    pub(crate) fn from_coords_clamped(mut coords: Vec<C<R>>) -> Self {
        let ns: R = coords.iter().map(|c| c.norm_sqr()).sum();
        if ns >= R::one() {
            let scale = (R::one() - R::of(1e-14)).sqrt() / ns.sqrt();
            for c in coords.iter_mut() {
                *c = *c * scale;
            }
        }
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[C<R>] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> R {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> R {
        self.norm_sqr().sqrt()
    }

    /// 1 - |z|^2, the boundary weight.
    pub fn one_minus_norm_sqr(&self) -> R {
        R::one() - self.norm_sqr()
    }

    /// Hermitian inner product <z, w> = sum z_i conj(w_i).
    pub fn inner(&self, other: &Self) -> Result<C<R>> {
        check_dims(self, other)?;
        Ok(inner_raw(&self.coords, &other.coords))
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.norm_sqr() == R::zero())
    }
}

fn check_dims<R: Real>(z: &Point<R>, w: &Point<R>) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: w.dim(),
        });
    }
    Ok(())
}

fn inner_raw<R: Real>(z: &[C<R>], w: &[C<R>]) -> C<R> {
    let mut acc = C::new(R::zero(), R::zero());
    for (a, b) in z.iter().zip(w.iter()) {
        acc = acc + a * b.conj();
    }
    acc
}

/// The involutive automorphism sigma_z of the ball, evaluated at w.
///
/// sigma_z exchanges 0 and z. For z = 0 the formula degenerates; the
/// convention sigma_0 = -id is used, consistent with the one-dimensional
/// Mobius quotient (z - w)/(1 - conj(z) w).
pub fn involution<R: Real>(z: &Point<R>, w: &Point<R>) -> Result<Point<R>> {
    check_dims(z, w)?;
    let zs = z.norm_sqr();
    if zs == R::zero() {
        let coords = w.coords.iter().map(|c| -c).collect();
        return Ok(Point::from_coords_clamped(coords));
    }
    // P_z(w) = (<w,z>/|z|^2) z, the projection onto the span of z.
    let wz = inner_raw(&w.coords, &z.coords);
    let coef = wz / zs;
    let denom = C::new(R::one(), R::zero()) - wz;
    let root = (R::one() - zs).sqrt();
    let coords = z
        .coords
        .iter()
        .zip(w.coords.iter())
        .map(|(zi, wi)| {
            let proj = coef * zi;
            ((zi - proj) + (proj - wi) * root) / denom
        })
        .collect();
    Ok(Point::from_coords_clamped(coords))
}

/// Pseudo-hyperbolic distance d(z,w) = |sigma_z(w)|, in [0,1).
pub fn pseudo_distance<R: Real>(z: &Point<R>, w: &Point<R>) -> Result<R> {
    let s = involution(z, w)?;
    Ok(s.norm().min(R::one() - R::epsilon()))
}

/// Bergman metric beta(z,w) = (1/2) log((1+d)/(1-d)) = atanh d(z,w).
pub fn bergman_distance<R: Real>(z: &Point<R>, w: &Point<R>) -> Result<R> {
    let d = pseudo_distance(z, w)?;
    Ok(d.atanh())
}

/// Result of a ball volume computation: the normalized volume of the
/// pseudo-hyperbolic ball E(center, s), with an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct BallVolume<R> {
    pub value: R,
    pub error_estimate: R,
}

/// Normalized volume of E(center, s).
///
/// Exact closed forms for a centered ball (s^{2n}) and for n = 1, where
/// E(z,s) is the Euclidean disk of radius s(1-|z|^2)/(1-s^2|z|^2).
/// For n >= 2 an off-center volume is estimated by deterministic
/// quasi-Monte Carlo sampling with a reported standard error.
pub fn ball_volume<R: Real>(center: &Point<R>, s: R) -> Result<BallVolume<R>> {
    if s <= R::zero() || s >= R::one() {
        return Err(Error::InvalidArgument(format!(
            "radius s must lie in (0,1), got {}",
            s.as_f64()
        )));
    }
    let n = center.dim();
    if center.is_origin() {
        return Ok(BallVolume {
            value: s.powi(2 * n as i32),
            error_estimate: R::zero(),
        });
    }
    if n == 1 {
        let zs = center.norm_sqr();
        let r_euc = s * (R::one() - zs) / (R::one() - s * s * zs);
        return Ok(BallVolume {
            value: r_euc * r_euc,
            error_estimate: R::of(1e-15),
        });
    }
    // Off-center, n >= 2: sample the ball uniformly and count membership.
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6265_7267_6d61_6e00);
    let samples = 200_000usize;
    let mut hits = 0usize;
    for _ in 0..samples {
        let p = sample_ball_uniform::<R, _>(n, &mut rng);
        if pseudo_distance(center, &p)? < s {
            hits += 1;
        }
    }
    let frac = R::of(hits as f64 / samples as f64);
    let err = (frac * (R::one() - frac) / R::of(samples as f64)).sqrt();
    Ok(BallVolume {
        value: frac,
        error_estimate: err,
    })
}

/// Draw a point uniformly (w.r.t. normalized Lebesgue measure) in the ball.
pub fn sample_ball_uniform<R: Real, G: Rng>(n: usize, rng: &mut G) -> Point<R> {
    // Isotropic direction from 2n Gaussians, radius from u^(1/2n).
    loop {
        let mut coords: Vec<C<R>> = Vec::with_capacity(n);
        let mut ns = 0.0f64;
        let mut raw: Vec<(f64, f64)> = Vec::with_capacity(n);
        for _ in 0..n {
            let re = gaussian(rng);
            let im = gaussian(rng);
            ns += re * re + im * im;
            raw.push((re, im));
        }
        if ns == 0.0 {
            continue;
        }
        let u: f64 = rng.gen::<f64>();
        let radius = u.powf(1.0 / (2.0 * n as f64));
        let scale = radius / ns.sqrt();
        for (re, im) in raw {
            coords.push(C::new(R::of(re * scale), R::of(im * scale)));
        }
        return Point::from_coords_clamped(coords);
    }
}

fn gaussian<G: Rng>(rng: &mut G) -> f64 {
    // Box-Muller.
    loop {
        let u1: f64 = rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        if u1 > 1e-300 {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Boundary frame at an anchor a != 0: the vectors a^j = U*(|a| e_j),
/// j = 2..n, for a unitary U with U a = |a| e_1.
#[derive(Debug, Clone)]
pub struct BoundaryFrame<R: Real> {
    pub anchor: Point<R>,
    pub vectors: Vec<Point<R>>,
}

/// Construct the boundary frame at `a` via a Householder unitary completion.
///
/// For n = 1 the vector list is empty.
pub fn boundary_frame<R: Real>(a: &Point<R>) -> Result<BoundaryFrame<R>> {
    let norm = a.norm();
    if norm == R::zero() {
        return Err(Error::InvalidArgument(
            "boundary frame requires a != 0".into(),
        ));
    }
    let n = a.dim();
    if n == 1 {
        return Ok(BoundaryFrame {
            anchor: a.clone(),
            vectors: vec![],
        });
    }
    // Householder vector v = a + phase * |a| e_1 reflects a onto the first
    // axis; a^j = H(|a| e_j) since the phase correction acts only on e_1.
    let a1 = a.coords[0];
    let phase = if a1.norm_sqr() == R::zero() {
        C::new(R::one(), R::zero())
    } else {
        a1 / a1.norm()
    };
    let mut v = a.coords.to_vec();
    v[0] = v[0] + phase * norm;
    let vns: R = v.iter().map(|c| c.norm_sqr()).sum();
    let two = R::of(2.0);
    let mut vectors = Vec::with_capacity(n - 1);
    for j in 1..n {
        // H e_j = e_j - 2 conj(v_j)/|v|^2 * v
        let coef = v[j].conj() * (two / vns);
        let coords: Vec<C<R>> = (0..n)
            .map(|i| {
                let e = if i == j { C::new(R::one(), R::zero()) } else { C::new(R::zero(), R::zero()) };
                (e - coef * v[i]) * norm
            })
            .collect();
        vectors.push(Point::from_coords_clamped(coords));
    }
    Ok(BoundaryFrame {
        anchor: a.clone(),
        vectors,
    })
}

/// The anisotropic comparison quantity
/// (|<z-w, a>| + sqrt(1-|a|) sum_j |<z-w, a^j>|) / |1 - <z,w>|,
/// comparable with d(z,w) for anchors near the boundary.
pub fn anisotropic_distance<R: Real>(a: &Point<R>, z: &Point<R>, w: &Point<R>) -> Result<R> {
    check_dims(z, w)?;
    check_dims(a, z)?;
    let frame = boundary_frame(a)?;
    let diff: Vec<C<R>> = z
        .coords
        .iter()
        .zip(w.coords.iter())
        .map(|(zi, wi)| zi - wi)
        .collect();
    let mut num = inner_raw(&diff, &a.coords).norm();
    let root = (R::one() - a.norm()).sqrt();
    for aj in &frame.vectors {
        num = num + root * inner_raw(&diff, &aj.coords).norm();
    }
    let denom = (C::new(R::one(), R::zero()) - inner_raw(&z.coords, &w.coords)).norm();
    Ok(num / denom)
}

/// A random unitary n x n matrix (Gram-Schmidt on a Gaussian matrix),
/// row-major. Used by the invariance checks.
pub fn random_unitary<R: Real, G: Rng>(n: usize, rng: &mut G) -> Vec<Vec<C<R>>> {
    let mut rows: Vec<Vec<C<R>>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<C<R>> = (0..n)
            .map(|_| C::new(R::of(gaussian(rng)), R::of(gaussian(rng))))
            .collect();
        for prev in &rows {
            let proj = inner_raw(&v, prev);
            for i in 0..n {
                v[i] = v[i] - proj * prev[i];
            }
        }
        let ns: R = v.iter().map(|c| c.norm_sqr()).sum();
        if ns.as_f64() < 1e-12 {
            continue;
        }
        let inv = ns.sqrt().recip();
        for c in v.iter_mut() {
            *c = *c * inv;
        }
        rows.push(v);
    }
    rows
}

/// Apply a unitary (row-major, acting as (Uz)_i = sum_j U_ij z_j).
pub fn apply_unitary<R: Real>(u: &[Vec<C<R>>], z: &Point<R>) -> Point<R> {
    let n = z.dim();
    let coords: Vec<C<R>> = (0..n)
        .map(|i| {
            let mut acc = C::new(R::zero(), R::zero());
            for j in 0..n {
                acc = acc + u[i][j] * z.coords[j];
            }
            acc
        })
        .collect();
    Point::from_coords_clamped(coords)
}
