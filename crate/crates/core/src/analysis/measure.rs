//! Discrete quadrature measures on the ball.
//!
//! Every integral in the library is a finite weighted sum over nodes. The
//! normalized volume measure dV (total mass 1) is discretized for n = 1 as a
//! boundary-graded polar grid (Gauss-Legendre panels in the radius, uniform
//! angles) and for n >= 2 as stratified random sampling with equal weights.

use crate::analysis::expr::{random_ball_point, HoloFunction};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{C, Real};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Where a measure came from; retained for reporting and fast-path dispatch.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Lebesgue {
        radial: usize,
        angular: usize,
        rho_max: f64,
    },
    Density(String),
    Pullback(String),
    PointMasses,
}

/// Polar layout metadata for n = 1 volume grids: node index = i * angular + j
/// where i indexes `radii` and j the uniform angles (offset half a step).
#[derive(Debug, Clone)]
pub struct PolarGrid<R: Real> {
    pub radii: Vec<R>,
    pub angular: usize,
}

impl<R: Real> PolarGrid<R> {
    pub fn theta(&self, j: usize) -> R {
        R::of(2.0 * std::f64::consts::PI) * (R::of(j as f64) + R::of(0.5))
            / R::of(self.angular as f64)
    }
}

/// A positive discrete measure: weighted nodes in the ball.
#[derive(Debug, Clone)]
pub struct QuadMeasure<R: Real> {
    dim: usize,
    nodes: Vec<Point<R>>,
    weights: Vec<R>,
    total_mass: R,
    provenance: Provenance,
    polar: Option<PolarGrid<R>>,
}

const BALL_SAMPLE_SEED: u64 = 0x6d65_6173_7572_6500;

impl<R: Real> QuadMeasure<R> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Point<R>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> R {
        self.total_mass
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn polar(&self) -> Option<&PolarGrid<R>> {
        self.polar.as_ref()
    }

    /// Normalized volume measure dV, discretized.
    ///
    /// For n = 1, `radial` is a total radial-node budget spread over panels
    /// that halve geometrically toward |z| = 1 until the panel width drops
    /// below 1 - rho_max; Gauss-Legendre nodes inside each panel keep the
    /// total mass at exactly 1 and polynomial moments near machine accuracy.
    pub fn lebesgue(dim: usize, radial: usize, angular: usize, rho_max: f64) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(Error::BadDimension { n: dim });
        }
        if radial < 4 || angular < 4 {
            return Err(Error::InvalidArgument(
                "resolution must be at least 4x4".into(),
            ));
        }
        if !(rho_max > 0.0 && rho_max < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_max must lie in (0,1), got {rho_max}"
            )));
        }
        if dim == 1 {
            Self::lebesgue_disk(radial, angular, rho_max)
        } else {
            Self::lebesgue_ball(dim, radial, angular)
        }
    }

    fn lebesgue_disk(radial: usize, angular: usize, rho_max: f64) -> Result<Self> {
        // Panels [0, 1/2], [1/2, 3/4], ... halving until width <= 1 - rho_max,
        // then a final panel reaching 1 (nodes stay strictly interior).
        let mut edges = vec![0.0f64];
        let mut edge = 0.5f64;
        while 1.0 - edge > (1.0 - rho_max) * 1.0000001 {
            edges.push(edge);
            edge = (edge + 1.0) / 2.0;
        }
        edges.push(1.0);
        let panels = edges.len() - 1;
        let per_panel = (radial / panels).max(4);
        let (gl_x, gl_w) = gauss_legendre::<R>(per_panel);

        let mut radii = Vec::with_capacity(panels * per_panel);
        let mut radial_w = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let (a, b) = (edges[p], edges[p + 1]);
            let mid = R::of((a + b) / 2.0);
            let half = R::of((b - a) / 2.0);
            for (&x, &w) in gl_x.iter().zip(gl_w.iter()) {
                let rho = mid + half * x;
                // dV on the disk: 2 rho d rho x normalized angle.
                radii.push(rho);
                radial_w.push(w * half * R::of(2.0) * rho);
            }
        }

        let inv_m = R::one() / R::of(angular as f64);
        let grid = PolarGrid {
            radii: radii.clone(),
            angular,
        };
        let mut nodes = Vec::with_capacity(radii.len() * angular);
        let mut weights = Vec::with_capacity(radii.len() * angular);
        for (i, &rho) in radii.iter().enumerate() {
            for j in 0..angular {
                let th = grid.theta(j);
                let z = C::new(rho * th.cos(), rho * th.sin());
                nodes.push(Point::from_coords_clamped(vec![z]));
                weights.push(radial_w[i] * inv_m);
            }
        }
        let total_mass = crate::scalar::tree_sum(&weights);
        Ok(Self {
            dim: 1,
            nodes,
            weights,
            total_mass,
            provenance: Provenance::Lebesgue {
                radial,
                angular,
                rho_max,
            },
            polar: Some(grid),
        })
    }

    fn lebesgue_ball(dim: usize, radial: usize, angular: usize) -> Result<Self> {
        // Stratified sampling: `radial` equal-volume strata (uniform in
        // u = |z|^(2n)), `angular` samples per stratum, equal weights.
        let total = radial * angular;
        let mut rng = ChaCha8Rng::seed_from_u64(BALL_SAMPLE_SEED ^ dim as u64);
        let w = R::one() / R::of(total as f64);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for s in 0..radial {
            let u_lo = s as f64 / radial as f64;
            let u_hi = (s + 1) as f64 / radial as f64;
            for k in 0..angular {
                let frac = (k as f64 + 0.5) / angular as f64;
                let u = u_lo + (u_hi - u_lo) * frac;
                let t = R::of(u.powf(1.0 / (2.0 * dim as f64)).min(1.0 - 1e-12));
                let dir = crate::analysis::expr::random_direction::<R>(&mut rng, dim);
                let coords: Vec<C<R>> = dir.into_iter().map(|d| d * t).collect();
                nodes.push(Point::from_coords_clamped(coords));
                weights.push(w);
            }
        }
        let total_mass = crate::scalar::tree_sum(&weights);
        Ok(Self {
            dim,
            nodes,
            weights,
            total_mass,
            provenance: Provenance::Lebesgue {
                radial,
                angular,
                rho_max: 1.0,
            },
            polar: None,
        })
    }

    /// Multiply a base measure's weights by a pointwise density |g(w)|.
    pub fn with_modulus_density(base: &Self, g: &HoloFunction<R>, label: &str) -> Result<Self> {
        base.with_density_fn(|z| g.eval(z).norm(), label)
    }

    /// Multiply a base measure's weights by (1 - |w|^2)^t for a real t
    /// (negative powers allowed; nodes are strictly interior).
    pub fn with_boundary_power(base: &Self, t: R, label: &str) -> Result<Self> {
        base.with_density_fn(|z| z.one_minus_norm_sqr().powf(t), label)
    }

    fn with_density_fn(
        &self,
        density: impl Fn(&Point<R>) -> R,
        label: &str,
    ) -> Result<Self> {
        let mut weights = Vec::with_capacity(self.weights.len());
        for (k, (node, &w)) in self.nodes.iter().zip(self.weights.iter()).enumerate() {
            let d = density(node);
            if !d.is_finite() || d < R::zero() {
                return Err(Error::NonFiniteDensity { node: k });
            }
            weights.push(w * d);
        }
        let total_mass = crate::scalar::tree_sum(&weights);
        Ok(Self {
            dim: self.dim,
            nodes: self.nodes.clone(),
            weights,
            total_mass,
            provenance: Provenance::Density(label.to_string()),
            polar: self.polar.clone(),
        })
    }

    /// A finite sum of point masses.
    pub fn point_masses(dim: usize, masses: Vec<(Point<R>, R)>) -> Result<Self> {
        Self::point_masses_with_provenance(dim, masses, Provenance::PointMasses)
    }

    pub(crate) fn point_masses_with_provenance(
        dim: usize,
        masses: Vec<(Point<R>, R)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut nodes = Vec::with_capacity(masses.len());
        let mut weights = Vec::with_capacity(masses.len());
        for (k, (p, w)) in masses.into_iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: p.dim(),
                    right: dim,
                });
            }
            if w < R::zero() || !(w.is_finite() || w == R::infinity()) {
                return Err(Error::NonFiniteDensity { node: k });
            }
            nodes.push(p);
            weights.push(w);
        }
        let total_mass = crate::scalar::tree_sum(&weights);
        Ok(Self {
            dim,
            nodes,
            weights,
            total_mass,
            provenance,
            polar: None,
        })
    }

    /// Uniform random points of the ball for audit grids (not a quadrature).
    pub fn sample_points(dim: usize, count: usize, seed: u64) -> Vec<Point<R>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| Point::from_coords_clamped(random_ball_point::<R>(&mut rng, dim)))
            .collect()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence (accurate to machine precision for m <= a few hundred).
pub fn gauss_legendre<R: Real>(m: usize) -> (Vec<R>, Vec<R>) {
    let mut x = vec![0.0f64; m];
    let mut w = vec![0.0f64; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -t;
        x[m - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (
        x.into_iter().map(R::of).collect(),
        w.into_iter().map(R::of).collect(),
    )
}

fn legendre(m: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}
