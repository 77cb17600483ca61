//! Metric projection, separating functionals, the contact pair `(x₀, λ₀)`
//! and the wall tangency check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hull::{affine_basis, monotone_chain};
use super::{is_invariant_body, random_point, support_function, ConvexBody};
use crate::diffop::DualPoly;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rootsys::{CoxeterGroup, RootSystem};

const FW_ITERATIONS: usize = 200;

/// Nearest point of the vertex hull (ignoring the ball thickening).
pub(crate) fn project_to_hull(b: &ConvexBody, y: &[f64]) -> Vec<f64> {
    project_with(b, y, FW_ITERATIONS)
}

fn project_with(b: &ConvexBody, y: &[f64], iterations: usize) -> Vec<f64> {
    let v = &b.vertices;
    if v.len() == 1 {
        return v[0].clone();
    }
    let basis = affine_basis(v);
    if b.exact && basis.len() <= 2 {
        return project_low_dim(v, &basis, y);
    }
    frank_wolfe(v, y, iterations)
}

fn project_low_dim(v: &[Vec<f64>], basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let o = &v[0];
    let to_local = |p: &[f64]| -> Vec<f64> {
        let d = linalg::sub(p, o);
        basis.iter().map(|b| linalg::dot(&d, b)).collect()
    };
    let to_global = |l: &[f64]| -> Vec<f64> {
        let mut p = o.clone();
        for (c, b) in l.iter().zip(basis) {
            p = linalg::axpy(&p, *c, b);
        }
        p
    };
    let yl = to_local(y);
    let local: Vec<Vec<f64>> = v.iter().map(|p| to_local(p)).collect();
    if basis.len() == 1 {
        let lo = local.iter().map(|l| l[0]).fold(f64::INFINITY, f64::min);
        let hi = local.iter().map(|l| l[0]).fold(f64::NEG_INFINITY, f64::max);
        return to_global(&[yl[0].clamp(lo, hi)]);
    }
    let flat: Vec<[f64; 2]> = local.iter().map(|l| [l[0], l[1]]).collect();
    let order = monotone_chain(&flat);
    let m = order.len();
    let mut inside = true;
    for k in 0..m {
        let a = flat[order[k]];
        let b = flat[order[(k + 1) % m]];
        let c = (b[0] - a[0]) * (yl[1] - a[1]) - (b[1] - a[1]) * (yl[0] - a[0]);
        if c < 0.0 {
            inside = false;
            break;
        }
    }
    if inside {
        return to_global(&yl);
    }
    let mut best = [0.0, 0.0];
    let mut best_d = f64::INFINITY;
    for k in 0..m {
        let a = flat[order[k]];
        let b = flat[order[(k + 1) % m]];
        let e = [b[0] - a[0], b[1] - a[1]];
        let len2 = e[0] * e[0] + e[1] * e[1];
        let t = if len2 > 0.0 {
            (((yl[0] - a[0]) * e[0] + (yl[1] - a[1]) * e[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = [a[0] + t * e[0], a[1] + t * e[1]];
        let d = (q[0] - yl[0]).powi(2) + (q[1] - yl[1]).powi(2);
        if d < best_d {
            best_d = d;
            best = q;
        }
    }
    to_global(&best)
}

/// Conditional-gradient iteration for `min |p − y|²` over the hull.
fn frank_wolfe(v: &[Vec<f64>], y: &[f64], iterations: usize) -> Vec<f64> {
    let mut p = v
        .iter()
        .min_by(|a, b| {
            let da = linalg::norm(&linalg::sub(a, y));
            let db = linalg::norm(&linalg::sub(b, y));
            da.partial_cmp(&db).unwrap()
        })
        .unwrap()
        .clone();
    for _ in 0..iterations {
        let g = linalg::sub(&p, y);
        let s = v
            .iter()
            .min_by(|a, b| linalg::dot(&g, a).partial_cmp(&linalg::dot(&g, b)).unwrap())
            .unwrap();
        let d = linalg::sub(s, &p);
        let dd = linalg::dot(&d, &d);
        if dd <= 1e-300 {
            break;
        }
        let gamma = (-linalg::dot(&g, &d) / dd).clamp(0.0, 1.0);
        if gamma <= 0.0 {
            break;
        }
        p = linalg::axpy(&p, gamma, &d);
    }
    p
}

/// A functional `λ` with `max_C λ < λ(y0)`, by default the unit direction
/// from the projection of `y0` onto `C` towards `y0`.
pub fn separating_functional(y0: &[f64], c: &ConvexBody) -> Result<Vec<f64>> {
    if y0.len() != c.ambient_dim {
        return Err(Error::DimensionMismatch { expected: c.ambient_dim, found: y0.len() });
    }
    let mut iterations = FW_ITERATIONS;
    loop {
        let p = project_with(c, y0, iterations);
        let r = linalg::sub(y0, &p);
        let d = linalg::norm(&r);
        if d - c.eps <= 1e-9 {
            return Err(Error::PointInsideBody);
        }
        let lambda = linalg::scale(&r, 1.0 / d);
        if support_function(c, &lambda) < linalg::dot(&lambda, y0) {
            return Ok(lambda);
        }
        if iterations >= 100 * FW_ITERATIONS {
            return Err(Error::PointInsideBody);
        }
        iterations *= 10;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactCertificate {
    /// `λ₀(x₀)`
    pub lambda_x0: f64,
    /// `max_C λ₀`
    pub max_on_c: f64,
    /// `min_α |λ₀(x_α)|` over all roots; `None` for an empty root system.
    pub min_root_value: Option<f64>,
    /// `|p(λ₀)|`
    pub abs_p: f64,
}

impl ContactCertificate {
    pub fn is_positive(&self) -> bool {
        self.lambda_x0 > self.max_on_c && self.min_root_value.map_or(true, |m| m > 0.0) && self.abs_p > 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactPair {
    pub x0: Vec<f64>,
    pub lambda0: Vec<f64>,
    pub y0: Vec<f64>,
    pub perturbations_used: usize,
    pub seed: u64,
    pub certificate: ContactCertificate,
}

const GENERICITY_MARGIN: f64 = 1e-6;

fn is_generic(lambda: &[f64], rs: &RootSystem, p: &DualPoly) -> bool {
    let n = linalg::norm(lambda);
    if n == 0.0 {
        return false;
    }
    if p.eval(lambda).abs() <= GENERICITY_MARGIN * n.powi(p.degree() as i32) {
        return false;
    }
    (0..rs.len()).all(|i| {
        let x = rs.coroot(i).expect("root index in range");
        linalg::dot(lambda, &x).abs() > GENERICITY_MARGIN * n * linalg::norm(&x)
    })
}

/// Choose `y0 ∈ S \ C`, a root-generic `λ₀` separating `y0` from `C` with
/// `p(λ₀) ≠ 0`, and `x₀ ∈ S` maximizing `λ₀`.
pub fn select_contact_pair(
    s: &[Vec<f64>],
    c: &ConvexBody,
    rs: &RootSystem,
    p: &DualPoly,
    max_perturbations: usize,
    seed: u64,
) -> Result<ContactPair> {
    let n = c.ambient_dim;
    if rs.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rs.ambient_dim() });
    }
    if let Some(q) = s.iter().find(|q| q.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: q.len() });
    }
    // farthest exterior point, first one on ties
    let mut y0: Option<(&Vec<f64>, f64)> = None;
    for q in s {
        let d = c.distance(q);
        if d > 1e-9 && y0.map_or(true, |(_, best)| d > best) {
            y0 = Some((q, d));
        }
    }
    let (y0, _) = y0.ok_or(Error::NoExteriorPoint)?;
    let base = separating_functional(y0, c)?;
    let in_u0 = |l: &[f64]| support_function(c, l) < linalg::dot(l, y0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lambda = base.clone();
    let mut used = 0;
    let mut radius = 0.1;
    while !is_generic(&lambda, rs, p) {
        if used >= max_perturbations {
            return Err(Error::GenericityFailure { tries: used });
        }
        used += 1;
        let delta = random_point(&mut rng, n, radius);
        let cand = linalg::add(&base, &delta);
        if in_u0(&cand) {
            lambda = cand;
        } else {
            radius *= 0.5;
        }
    }
    let lambda = linalg::unit(&lambda).expect("nonzero functional");

    let mut x0 = &s[0];
    let mut best = f64::NEG_INFINITY;
    for q in s {
        let v = linalg::dot(&lambda, q);
        if v > best {
            best = v;
            x0 = q;
        }
    }
    let min_root_value = (0..rs.len())
        .map(|i| linalg::dot(&lambda, &rs.coroot(i).expect("root index in range")).abs())
        .reduce(f64::min);
    let certificate = ContactCertificate {
        lambda_x0: best,
        max_on_c: support_function(c, &lambda),
        min_root_value,
        abs_p: p.eval(&lambda).abs(),
    };
    Ok(ContactPair { x0: x0.clone(), lambda0: lambda, y0: y0.clone(), perturbations_used: used, seed, certificate })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    pub wall_points: usize,
    pub max_abs_cos: f64,
    pub max_wall_residual: f64,
    pub vacuous: bool,
    /// The vertex hull has empty interior; the smoothing lemma's hypothesis
    /// is not met but `C + B_ε` still has a C¹ boundary.
    pub lower_dimensional_core: bool,
}

/// Exposed point `∇h(λ)` by central differences of the support function.
fn exposed_point(b: &ConvexBody, lambda: &[f64]) -> Vec<f64> {
    let step = 1e-6 * linalg::norm(lambda).max(1.0);
    (0..lambda.len())
        .map(|i| {
            let mut lp = lambda.to_vec();
            let mut lm = lambda.to_vec();
            lp[i] += step;
            lm[i] -= step;
            (support_function(b, &lp) - support_function(b, &lm)) / (2.0 * step)
        })
        .collect()
}

/// For walls `ker α` meeting `∂B`, estimate the outward normal from the
/// local boundary geometry and measure its angle with `x_α`.
pub fn tangency_check(b: &ConvexBody, rs: &RootSystem, g: &CoxeterGroup, wall_samples: usize) -> Result<TangencyReport> {
    if !(b.eps > 0.0) {
        return Err(Error::InvalidParameter("tangency check needs a smoothed body".into()));
    }
    if !is_invariant_body(b, g, 1e-8) {
        return Err(Error::NotInvariant);
    }
    let n = b.ambient_dim;
    let lower_dimensional_core = b.is_lower_dimensional();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a9);
    let mut wall_points = 0;
    let mut max_abs_cos: f64 = 0.0;
    let mut max_wall_residual: f64 = 0.0;
    for &i in rs.positive() {
        let y = rs.root(i)?.to_vec();
        let xa = rs.coroot(i)?;
        let yu = linalg::unit(&y).expect("nonzero root");
        for _ in 0..wall_samples.max(1) {
            // a direction orthogonal to y_α
            let r = random_point(&mut rng, n, 1.0);
            let perp = linalg::axpy(&r, -linalg::dot(&r, &yu), &yu);
            let Some(lambda) = linalg::unit(&perp) else { continue };
            if n < 2 {
                continue;
            }
            let x = exposed_point(b, &lambda);
            let residual = linalg::dot(&y, &x).abs();
            if residual >= 1e-6 {
                continue;
            }
            wall_points += 1;
            max_wall_residual = max_wall_residual.max(residual);
            // tangent vectors from exposed points of nearby functionals
            let delta = 1e-3;
            let mut tangents: Vec<Vec<f64>> = Vec::new();
            let mut basis: Vec<Vec<f64>> = vec![lambda.clone()];
            for k in 0..n {
                let Some(mu) = linalg::gram_schmidt_step(&basis, &linalg::unit_vector(n, k), 1e-8) else {
                    continue;
                };
                basis.push(mu.clone());
                let xp = exposed_point(b, &linalg::axpy(&lambda, delta, &mu));
                let xm = exposed_point(b, &linalg::axpy(&lambda, -delta, &mu));
                tangents.push(linalg::sub(&xp, &xm));
            }
            let mut tb: Vec<Vec<f64>> = Vec::new();
            for t in &tangents {
                if let Some(u) = linalg::gram_schmidt_step(&tb, t, 1e-12) {
                    tb.push(u);
                }
            }
            if tb.len() + 1 != n {
                continue;
            }
            // the normal is the orthogonal complement of the tangent space,
            // oriented outward
            let mut normal = None;
            for k in 0..n {
                if let Some(u) = linalg::gram_schmidt_step(&tb, &linalg::unit_vector(n, k), 1e-6) {
                    normal = Some(u);
                    break;
                }
            }
            let Some(mut nv) = normal else { continue };
            if linalg::dot(&nv, &lambda) < 0.0 {
                nv = linalg::scale(&nv, -1.0);
            }
            let cos = linalg::dot(&nv, &xa).abs() / linalg::norm(&xa);
            max_abs_cos = max_abs_cos.max(cos);
        }
    }
    Ok(TangencyReport {
        wall_points,
        max_abs_cos,
        max_wall_residual,
        vacuous: wall_points == 0,
        lower_dimensional_core,
    })
}
