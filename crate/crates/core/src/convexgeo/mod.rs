//! Convex bodies given by finite vertex sets, optionally thickened by a
//! ball, and queried through their support functions.

mod hull;
mod separation;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rootsys::CoxeterGroup;

pub use separation::{
    select_contact_pair, separating_functional, tangency_check, ContactCertificate, ContactPair, TangencyReport,
};

/// Default direction counts for sampled support-function comparisons.
pub const DEFAULT_DIRECTIONS_2D: usize = 720;
pub const DEFAULT_DIRECTIONS_ND: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<f64>>,
    /// Radius of the ball added to the vertex hull.
    pub eps: f64,
    /// `false` when `vertices` is the raw generating set (dimension > 3).
    pub exact: bool,
}

impl ConvexBody {
    pub fn point(x: &[f64]) -> Self {
        ConvexBody { ambient_dim: x.len(), vertices: vec![x.to_vec()], eps: 0.0, exact: true }
    }

    /// `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        convex_hull(&[vec![lo], vec![hi]])
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        eps_neighborhood(&ConvexBody::point(center), radius)
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn support(&self, lambda: &[f64]) -> f64 {
        support_function(self, lambda)
    }

    /// Dimension of the affine span of the vertices.
    pub fn affine_dim(&self) -> usize {
        hull::affine_basis(&self.vertices).len()
    }

    /// True when the vertex hull has empty interior.
    pub fn is_lower_dimensional(&self) -> bool {
        self.affine_dim() < self.ambient_dim
    }

    /// Euclidean distance from `y` to the body (zero inside).
    pub fn distance(&self, y: &[f64]) -> f64 {
        let p = separation::project_to_hull(self, y);
        (linalg::norm(&linalg::sub(y, &p)) - self.eps).max(0.0)
    }

    pub fn contains(&self, y: &[f64], slack: f64) -> bool {
        self.distance(y) <= slack
    }

    /// Bounding box of the body.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.ambient_dim;
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in &self.vertices {
            for i in 0..n {
                lo[i] = lo[i].min(v[i] - self.eps);
                hi[i] = hi[i].max(v[i] + self.eps);
            }
        }
        (lo, hi)
    }

    /// Image under a linear map `x ↦ Mx`.
    pub fn transform(&self, m: &linalg::Matrix) -> Result<Self> {
        let pts: Vec<Vec<f64>> = self.vertices.iter().map(|v| m.apply(v)).collect();
        let mut b = convex_hull(&pts)?;
        b.eps = self.eps;
        Ok(b)
    }
}

/// Hull of a finite point set.
pub fn convex_hull(points: &[Vec<f64>]) -> Result<ConvexBody> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let n = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coordinate".into()));
    }
    match hull::extreme_points(points) {
        Some(mut vertices) if n <= 3 => {
            if n == 1 {
                vertices.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
            }
            Ok(ConvexBody { ambient_dim: n, vertices, eps: 0.0, exact: true })
        }
        _ => {
            let mut vertices: Vec<Vec<f64>> = Vec::new();
            for p in points {
                if !vertices.iter().any(|q| linalg::max_abs_diff(p, q) <= 1e-9) {
                    vertices.push(p.clone());
                }
            }
            Ok(ConvexBody { ambient_dim: n, vertices, eps: 0.0, exact: false })
        }
    }
}

/// `h_B(λ) = max_v λ(v) + ε|λ|`.
pub fn support_function(b: &ConvexBody, lambda: &[f64]) -> f64 {
    let m = b
        .vertices
        .iter()
        .map(|v| linalg::dot(lambda, v))
        .fold(f64::NEG_INFINITY, f64::max);
    m + b.eps * linalg::norm(lambda)
}

pub fn minkowski_sum(a: &ConvexBody, b: &ConvexBody) -> Result<ConvexBody> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim, found: b.ambient_dim });
    }
    let mut pts = Vec::with_capacity(a.vertices.len() * b.vertices.len());
    for u in &a.vertices {
        for v in &b.vertices {
            pts.push(linalg::add(u, v));
        }
    }
    let mut out = convex_hull(&pts)?;
    out.eps = a.eps + b.eps;
    Ok(out)
}

/// Union hull `conv(A ∪ B)` of two bodies with equal thickening.
pub fn hull_union(a: &ConvexBody, b: &ConvexBody) -> Result<ConvexBody> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim, found: b.ambient_dim });
    }
    if (a.eps - b.eps).abs() > 1e-15 {
        return Err(Error::InvalidParameter("union hull needs equal smoothing radii".into()));
    }
    let pts: Vec<Vec<f64>> = a.vertices.iter().chain(&b.vertices).cloned().collect();
    let mut out = convex_hull(&pts)?;
    out.eps = a.eps;
    Ok(out)
}

/// `C + B_ε`.
pub fn eps_neighborhood(c: &ConvexBody, eps: f64) -> Result<ConvexBody> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("smoothing radius must be positive, got {eps}")));
    }
    let mut out = c.clone();
    out.eps += eps;
    Ok(out)
}

/// Unit directions used for sampled comparisons: `±1` in one dimension,
/// equally spaced angles in the plane, seeded Gaussian directions above.
pub fn sample_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Vec<f64> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
                if let Some(u) = linalg::unit(&v) {
                    out.push(u);
                }
            }
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub distance: f64,
    pub directions: usize,
    pub seed: u64,
}

/// Directional lower bound `max_λ |h_A(λ) − h_B(λ)|` over unit directions.
pub fn hausdorff(a: &ConvexBody, b: &ConvexBody, directions: usize) -> Result<f64> {
    Ok(hausdorff_report(a, b, directions, 0)?.distance)
}

pub fn hausdorff_report(a: &ConvexBody, b: &ConvexBody, directions: usize, seed: u64) -> Result<HausdorffReport> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim, found: b.ambient_dim });
    }
    if directions < 20 {
        return Err(Error::InvalidParameter(format!("need at least 20 directions, got {directions}")));
    }
    let dirs = sample_directions(a.ambient_dim, directions, seed);
    let distance = dirs
        .iter()
        .map(|l| (support_function(a, l) - support_function(b, l)).abs())
        .fold(0.0, f64::max);
    Ok(HausdorffReport { distance, directions: dirs.len(), seed })
}

/// `h_B(wᵀλ) = h_B(λ)` for every group element over sampled directions.
pub fn is_invariant_body(b: &ConvexBody, g: &CoxeterGroup, tol: f64) -> bool {
    let dirs = sample_directions(b.ambient_dim, 64, 0x5eed);
    g.elements.iter().all(|w| {
        dirs.iter().all(|l| {
            let wl = w.apply_inverse(l);
            (support_function(b, &wl) - support_function(b, l)).abs() <= tol
        })
    })
}

/// Random point in the cube `[-half, half]^n`.
pub(crate) fn random_point(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half..=half)).collect()
}

/// Box–Muller normal sample.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{generate_group, RootSystem};

    fn square() -> ConvexBody {
        convex_hull(&[vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    #[test]
    fn support_examples() {
        let b = ConvexBody::interval(-1.0, 1.0).unwrap();
        assert_eq!(support_function(&b, &[1.0]), 1.0);
        let s = square();
        let t = eps_neighborhood(&s, 0.1).unwrap();
        let l = [0.6, 0.8];
        assert!((t.support(&l) - s.support(&l) - 0.1).abs() < 1e-15);
        let ball = ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap();
        assert!((ball.support(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn random_hull_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..50).map(|_| random_point(&mut rng, 2, 1.0)).collect();
        let b = convex_hull(&pts).unwrap();
        assert!(b.vertices.len() < 50);
        for l in sample_directions(2, 100, 0) {
            let brute = pts.iter().map(|p| linalg::dot(&l, p)).fold(f64::NEG_INFINITY, f64::max);
            assert!((b.support(&l) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn minkowski_examples() {
        let a = ConvexBody::interval(0.0, 1.0).unwrap();
        let z = ConvexBody::point(&[0.0]);
        assert_eq!(hausdorff(&minkowski_sum(&a, &z).unwrap(), &a, 20).unwrap(), 0.0);
        let e = ConvexBody::interval(-0.1, 0.1).unwrap();
        let s = minkowski_sum(&a, &e).unwrap();
        assert_eq!(s.vertices, vec![vec![-0.1], vec![1.1]]);
        assert!(minkowski_sum(&a, &square()).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let a = ConvexBody::interval(0.0, 1.0).unwrap();
        let b = ConvexBody::interval(0.0, 1.2).unwrap();
        assert!((hausdorff(&a, &b, 20).unwrap() - 0.2).abs() < 1e-12);
        let s = square();
        let t = eps_neighborhood(&s, 0.1).unwrap();
        assert!((hausdorff(&s, &t, 1000).unwrap() - 0.1).abs() < 1e-3);
        assert!(hausdorff(&s, &t, 10).is_err());
    }

    #[test]
    fn eps_neighborhood_requires_positive_radius() {
        assert!(eps_neighborhood(&square(), 0.0).is_err());
        let ball = ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap();
        assert!(ball.is_lower_dimensional());
        assert!((ball.distance(&[2.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariance_examples() {
        let b1 = RootSystem::rank_one();
        let g1 = generate_group(&b1, 100).unwrap();
        assert!(!is_invariant_body(&ConvexBody::interval(0.0, 1.0).unwrap(), &g1, 1e-9));
        assert!(is_invariant_body(&ConvexBody::ball(&[0.0], 0.5).unwrap(), &g1, 1e-9));

        let rs = RootSystem::build(crate::rootsys::Family::A, 2).unwrap();
        let g = generate_group(&rs, 100).unwrap();
        let orbit = g.orbit(&[0.7, -0.1, -0.6]);
        let hex = eps_neighborhood(&convex_hull(&orbit).unwrap(), 0.2).unwrap();
        assert!(is_invariant_body(&hex, &g, 1e-9));
        let lopsided = convex_hull(&[vec![0.7, -0.1, -0.6], vec![-0.1, 0.7, -0.6]]).unwrap();
        assert!(!is_invariant_body(&lopsided, &g, 1e-9));
    }
}
