//! Root systems, reflections and the finite Coxeter groups they generate.
//!
//! A root `α` is stored through its dual vector `y_α`, so that
//! `α(x) = ⟨x, y_α⟩` for the standard inner product of the ambient space.

mod cone;
mod group;
mod invariance;

pub use cone::{
    check_cone_lemma, in_theta_orbit_of_chamber, weyl_product, ConeLemmaReport, ThetaCone, WeylProduct,
};
pub use group::{generate_group, parabolic_subgroup, CoxeterGroup, GroupElement, DEFAULT_GROUP_CAP};
pub use invariance::{
    check_function_equivariance, check_operator_equivariance, root_orbits, symmetrize, Character,
    EquivarianceReport, MultiplicityFunction,
};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Coordinate tolerance used for root and matrix comparisons.
pub const ROOT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    I2,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "BC" => Ok(Family::BC),
            "I2" | "I" => Ok(Family::I2),
            _ => Err(Error::UnsupportedFamily { family: s.to_string(), rank: 0 }),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::BC => "BC",
            Family::I2 => "I2",
        };
        f.write_str(s)
    }
}

/// A finite root system together with a fixed simple system.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RootSystemJson", into = "RootSystemJson")]
pub struct RootSystem {
    label: String,
    ambient_dim: usize,
    roots: Vec<Vec<f64>>,
    simple: Vec<usize>,
    positive: Vec<usize>,
    reduced: bool,
    crystallographic: bool,
    /// Coefficients of every root over the simple roots.
    simple_coords: Vec<Vec<f64>>,
}

/// Serialized form of a [`RootSystem`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemJson {
    pub label: String,
    pub ambient_dim: usize,
    pub roots: Vec<Vec<f64>>,
    pub simple: Vec<usize>,
    #[serde(default)]
    pub positive: Vec<usize>,
    #[serde(default)]
    pub reduced: bool,
    #[serde(default)]
    pub crystallographic: bool,
}

impl From<RootSystem> for RootSystemJson {
    fn from(rs: RootSystem) -> Self {
        RootSystemJson {
            label: rs.label,
            ambient_dim: rs.ambient_dim,
            roots: rs.roots,
            simple: rs.simple,
            positive: rs.positive,
            reduced: rs.reduced,
            crystallographic: rs.crystallographic,
        }
    }
}

impl TryFrom<RootSystemJson> for RootSystem {
    type Error = Error;

    // positive/reduced/crystallographic are recomputed from the data
    fn try_from(j: RootSystemJson) -> Result<Self> {
        RootSystem::from_parts(&j.label, j.ambient_dim, j.roots, j.simple)
    }
}

fn unit_vec(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = s;
    v
}

fn two_hot(n: usize, i: usize, si: f64, j: usize, sj: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = si;
    v[j] = sj;
    v
}

impl RootSystem {
    /// Standard realizations of the classical families and the dihedral
    /// family. `A_n` lives in `R^{n+1}` with roots `e_i - e_j`; rank 0 of
    /// family `A` is the empty system on `R`.
    pub fn build(family: Family, rank: usize) -> Result<Self> {
        let unsupported = || Error::UnsupportedFamily { family: family.to_string(), rank };
        let n = rank;
        let label = format!("{family}{rank}");
        match family {
            Family::A => {
                let dim = n + 1;
                let mut roots = Vec::new();
                for i in 0..dim {
                    for j in 0..dim {
                        if i != j {
                            roots.push(two_hot(dim, i, 1.0, j, -1.0));
                        }
                    }
                }
                let simple = (0..n)
                    .map(|j| find_exact(&roots, &two_hot(dim, j, 1.0, j + 1, -1.0)))
                    .collect();
                Self::from_parts(&label, dim, roots, simple)
            }
            Family::B | Family::C | Family::BC => {
                if n == 0 {
                    return Err(unsupported());
                }
                let mut roots = Vec::new();
                push_long_roots(n, &mut roots);
                if matches!(family, Family::B | Family::BC) {
                    for i in 0..n {
                        roots.push(unit_vec(n, i, 1.0));
                        roots.push(unit_vec(n, i, -1.0));
                    }
                }
                if matches!(family, Family::C | Family::BC) {
                    for i in 0..n {
                        roots.push(unit_vec(n, i, 2.0));
                        roots.push(unit_vec(n, i, -2.0));
                    }
                }
                let mut simple: Vec<usize> = (0..n - 1)
                    .map(|j| find_exact(&roots, &two_hot(n, j, 1.0, j + 1, -1.0)))
                    .collect();
                let last = match family {
                    Family::C => unit_vec(n, n - 1, 2.0),
                    _ => unit_vec(n, n - 1, 1.0),
                };
                simple.push(find_exact(&roots, &last));
                Self::from_parts(&label, n, roots, simple)
            }
            Family::D => {
                if n < 2 {
                    return Err(unsupported());
                }
                let mut roots = Vec::new();
                push_long_roots(n, &mut roots);
                let mut simple: Vec<usize> = (0..n - 1)
                    .map(|j| find_exact(&roots, &two_hot(n, j, 1.0, j + 1, -1.0)))
                    .collect();
                simple.push(find_exact(&roots, &two_hot(n, n - 2, 1.0, n - 1, 1.0)));
                Self::from_parts(&label, n, roots, simple)
            }
            Family::I2 => {
                let m = rank;
                if m < 2 {
                    return Err(unsupported());
                }
                let roots: Vec<Vec<f64>> = (0..2 * m)
                    .map(|k| {
                        let t = k as f64 * PI / m as f64;
                        vec![clean(t.cos()), clean(t.sin())]
                    })
                    .collect();
                // α₁ at angle 0, α₂ at angle π - π/m
                let simple = vec![0, m - 1];
                Self::from_parts(&format!("I2({m})"), 2, roots, simple)
            }
        }
    }

    /// Rank-one system `{±e}` on the real line.
    pub fn rank_one() -> Self {
        Self::build(Family::B, 1).expect("B1 is valid")
    }

    /// Validating constructor. `simple` holds indices into `roots`.
    pub fn from_parts(
        label: &str,
        ambient_dim: usize,
        roots: Vec<Vec<f64>>,
        simple: Vec<usize>,
    ) -> Result<Self> {
        let bad = |msg: String| Error::InvalidRootSystem(msg);
        if ambient_dim == 0 {
            return Err(bad("ambient dimension must be positive".into()));
        }
        for (i, r) in roots.iter().enumerate() {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: r.len() });
            }
            if linalg::norm(r) <= ROOT_TOL {
                return Err(bad(format!("root {i} is zero")));
            }
        }
        for &s in &simple {
            if s >= roots.len() {
                return Err(Error::InvalidIndex { index: s, len: roots.len() });
            }
        }
        let mut sorted = simple.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != simple.len() {
            return Err(bad("duplicate simple root".into()));
        }

        // (R2): closure under reflections
        for a in &roots {
            let xa = coroot_of(a);
            for b in &roots {
                let image = linalg::axpy(b, -linalg::dot(b, &xa), a);
                // r_α acts on dual vectors the same way, since it is orthogonal
                if find_close(&roots, &image).is_none() {
                    return Err(bad(format!("not closed under reflection: r({a:?}) {b:?}")));
                }
            }
        }

        let simple_vecs: Vec<Vec<f64>> = simple.iter().map(|&i| roots[i].clone()).collect();
        if linalg::rank(&simple_vecs, 1e-9) != simple_vecs.len() {
            return Err(bad("simple roots are linearly dependent".into()));
        }
        let mut simple_coords = Vec::with_capacity(roots.len());
        let mut positive = Vec::new();
        for (i, r) in roots.iter().enumerate() {
            let (c, resid) = linalg::coefficients_in_basis(&simple_vecs, r)
                .ok_or_else(|| bad("singular simple Gram matrix".into()))?;
            if resid > 1e-7 {
                return Err(bad(format!("root {i} is not in the span of the simple roots")));
            }
            let nonneg = c.iter().all(|&v| v >= -1e-9);
            let nonpos = c.iter().all(|&v| v <= 1e-9);
            if !(nonneg || nonpos) {
                return Err(bad(format!("root {i} has mixed-sign simple coordinates")));
            }
            if nonneg {
                positive.push(i);
            }
            simple_coords.push(c);
        }
        if positive.len() * 2 != roots.len() {
            return Err(bad("roots do not split as Σ⁺ ⊔ -Σ⁺".into()));
        }

        // (R1) reducedness: only ±α are proportional to α
        let mut reduced = true;
        for (i, a) in roots.iter().enumerate() {
            for b in roots.iter().skip(i + 1) {
                if let Some(c) = proportionality(a, b) {
                    if (c.abs() - 1.0).abs() > 1e-9 {
                        reduced = false;
                    }
                }
            }
        }

        let mut crystallographic = true;
        'outer: for a in &roots {
            let aa = linalg::dot(a, a);
            for b in &roots {
                let c = 2.0 * linalg::dot(a, b) / aa;
                if (c - c.round()).abs() > 1e-9 {
                    crystallographic = false;
                    break 'outer;
                }
            }
        }

        Ok(RootSystem {
            label: label.to_string(),
            ambient_dim,
            roots,
            simple,
            positive,
            reduced,
            crystallographic,
            simple_coords,
        })
    }

    /// Empty root system on `R^n`.
    pub fn empty(ambient_dim: usize) -> Result<Self> {
        Self::from_parts("empty", ambient_dim, Vec::new(), Vec::new())
    }

    /// Orthogonal direct sum, acting on `R^{n+m}`.
    pub fn direct_sum(&self, other: &RootSystem) -> Result<Self> {
        let n = self.ambient_dim;
        let m = other.ambient_dim;
        let mut roots = Vec::new();
        for r in &self.roots {
            let mut v = r.clone();
            v.extend(std::iter::repeat(0.0).take(m));
            roots.push(v);
        }
        for r in &other.roots {
            let mut v = vec![0.0; n];
            v.extend_from_slice(r);
            roots.push(v);
        }
        let offset = self.roots.len();
        let simple = self
            .simple
            .iter()
            .copied()
            .chain(other.simple.iter().map(|&s| s + offset))
            .collect();
        Self::from_parts(&format!("{}x{}", self.label, other.label), n + m, roots, simple)
    }

    /// Express the system in the coordinates of an orthonormal family of
    /// columns of `basis` (roots must lie in their span). Root order and
    /// simple indices are preserved.
    pub fn restrict_to(&self, basis: &Matrix) -> Result<Self> {
        if basis.rows != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: basis.rows });
        }
        if basis.orthogonality_defect() > 1e-9 {
            return Err(Error::InvalidParameter("basis columns must be orthonormal".into()));
        }
        let mut roots = Vec::with_capacity(self.roots.len());
        for r in &self.roots {
            let p = basis.apply_transpose(r);
            let back = basis.apply(&p);
            if linalg::max_abs_diff(&back, r) > 1e-9 {
                return Err(Error::InvalidParameter("roots do not lie in the span of the basis".into()));
            }
            roots.push(p.into_iter().map(clean).collect());
        }
        Self::from_parts(&self.label, basis.cols, roots, self.simple.clone())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[Vec<f64>] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> Result<&[f64]> {
        self.roots
            .get(i)
            .map(|v| v.as_slice())
            .ok_or(Error::InvalidIndex { index: i, len: self.roots.len() })
    }

    /// Indices of the simple roots Π.
    pub fn simple(&self) -> &[usize] {
        &self.simple
    }

    /// Indices of the positive roots Σ⁺.
    pub fn positive(&self) -> &[usize] {
        &self.positive
    }

    pub fn rank(&self) -> usize {
        self.simple.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_crystallographic(&self) -> bool {
        self.crystallographic
    }

    /// Coefficients of root `i` over the simple roots.
    pub fn simple_coordinates(&self, i: usize) -> &[f64] {
        &self.simple_coords[i]
    }

    /// `α(x)` for root index `i`.
    pub fn evaluate(&self, i: usize, x: &[f64]) -> f64 {
        linalg::dot(&self.roots[i], x)
    }

    /// `x_α = 2 y_α / ⟨y_α, y_α⟩`.
    pub fn coroot(&self, i: usize) -> Result<Vec<f64>> {
        Ok(coroot_of(self.root(i)?))
    }

    /// `r_α(x) = x - α(x) x_α`.
    pub fn reflect(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.root(i)?;
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: x.len() });
        }
        let xa = coroot_of(y);
        Ok(linalg::axpy(x, -linalg::dot(x, y), &xa))
    }

    /// Matrix of `r_α`: `I - x_α y_αᵀ`.
    pub fn reflection_matrix(&self, i: usize) -> Result<Matrix> {
        let y = self.root(i)?;
        let xa = coroot_of(y);
        let n = self.ambient_dim;
        let mut m = Matrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, m.get(r, c) - xa[r] * y[c]);
            }
        }
        Ok(m)
    }

    /// Index of the root equal to `y` within [`ROOT_TOL`].
    pub fn find_root(&self, y: &[f64]) -> Option<usize> {
        find_close(&self.roots, y)
    }

    /// Validate a subset Θ of simple positions (indices into [`Self::simple`]).
    pub fn check_theta(&self, theta: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.simple.len()];
        for &t in theta {
            if t >= self.simple.len() {
                return Err(Error::ThetaNotSubset(format!(
                    "simple position {t} out of range (rank {})",
                    self.simple.len()
                )));
            }
            if seen[t] {
                return Err(Error::ThetaNotSubset(format!("duplicate simple position {t}")));
            }
            seen[t] = true;
        }
        Ok(())
    }

    /// Root indices of `⟨Θ⟩`: roots supported on the simple positions in Θ.
    pub fn theta_span(&self, theta: &[usize]) -> Vec<usize> {
        (0..self.roots.len())
            .filter(|&i| {
                self.simple_coords[i]
                    .iter()
                    .enumerate()
                    .all(|(k, c)| theta.contains(&k) || c.abs() <= 1e-9)
            })
            .collect()
    }

    /// Root indices of `⟨Θ⟩⁺`.
    pub fn theta_positive(&self, theta: &[usize]) -> Vec<usize> {
        let span = self.theta_span(theta);
        self.positive.iter().copied().filter(|i| span.contains(i)).collect()
    }

    /// Root indices of `Σ⁺ \ ⟨Θ⟩⁺`.
    pub fn theta_complement_positive(&self, theta: &[usize]) -> Vec<usize> {
        let inside = self.theta_positive(theta);
        self.positive.iter().copied().filter(|i| !inside.contains(i)).collect()
    }

    /// The reduced subsystem `Δ = {α ∈ Σ : 2α ∉ Σ}` as root indices.
    pub fn reduced_indices(&self) -> Vec<usize> {
        (0..self.roots.len())
            .filter(|&i| find_close(&self.roots, &linalg::scale(&self.roots[i], 2.0)).is_none())
            .collect()
    }

    /// Full simple position list `0..rank`.
    pub fn all_simple_positions(&self) -> Vec<usize> {
        (0..self.simple.len()).collect()
    }

    /// Readable name for root `i`: `e1-e2` style for type-A coordinates,
    /// otherwise the coordinate vector.
    pub fn root_name(&self, i: usize) -> String {
        let r = &self.roots[i];
        let mut parts = Vec::new();
        for (k, &c) in r.iter().enumerate() {
            if c.abs() <= 1e-12 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else if parts.is_empty() { "" } else { "+" };
            let mag = c.abs();
            if (mag - 1.0).abs() < 1e-12 {
                parts.push(format!("{sign}e{}", k + 1));
            } else {
                parts.push(format!("{sign}{mag:.6}e{}", k + 1));
            }
        }
        parts.concat()
    }
}

fn push_long_roots(n: usize, roots: &mut Vec<Vec<f64>>) {
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0)] {
                roots.push(two_hot(n, i, si, j, sj));
            }
        }
    }
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-15 {
        0.0
    } else {
        v
    }
}

pub(crate) fn coroot_of(y: &[f64]) -> Vec<f64> {
    linalg::scale(y, 2.0 / linalg::dot(y, y))
}

fn find_exact(roots: &[Vec<f64>], y: &[f64]) -> usize {
    find_close(roots, y).expect("standard simple root present")
}

pub(crate) fn find_close(roots: &[Vec<f64>], y: &[f64]) -> Option<usize> {
    roots.iter().position(|r| linalg::max_abs_diff(r, y) <= ROOT_TOL)
}

/// `Some(c)` if `b = c a`.
fn proportionality(a: &[f64], b: &[f64]) -> Option<f64> {
    let c = linalg::dot(a, b) / linalg::dot(a, a);
    if linalg::max_abs_diff(&linalg::scale(a, c), b) <= ROOT_TOL {
        Some(c)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_has_six_roots_and_standard_simple_system() {
        let rs = RootSystem::build(Family::A, 2).unwrap();
        assert_eq!(rs.ambient_dim(), 3);
        assert_eq!(rs.len(), 6);
        // oracle: all ordered pairs i != j among 3 coordinates
        let mut expected = 0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let mut v = vec![0.0; 3];
                    v[i] = 1.0;
                    v[j] = -1.0;
                    assert!(rs.find_root(&v).is_some());
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 6);
        let s: Vec<&[f64]> = rs.simple().iter().map(|&i| rs.root(i).unwrap()).collect();
        assert_eq!(s[0], &[1.0, -1.0, 0.0]);
        assert_eq!(s[1], &[0.0, 1.0, -1.0]);
        assert_eq!(rs.positive().len(), 3);
        assert!(rs.is_reduced() && rs.is_crystallographic());
    }

    #[test]
    fn empty_system_from_rank_zero() {
        let rs = RootSystem::build(Family::A, 0).unwrap();
        assert!(rs.is_empty());
        assert_eq!(rs.rank(), 0);
        let g = generate_group(&rs, 10).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn dihedral_roots_are_at_multiples_of_pi_over_m() {
        let rs = RootSystem::build(Family::I2, 5).unwrap();
        assert_eq!(rs.len(), 10);
        // oracle: close the seed root (1,0) under the two simple reflections
        let mut found: Vec<Vec<f64>> = vec![vec![1.0, 0.0]];
        let mut frontier = found.clone();
        while let Some(v) = frontier.pop() {
            for &s in rs.simple() {
                let w = rs.reflect(s, &v).unwrap();
                if find_close(&found, &w).is_none() {
                    found.push(w.clone());
                    frontier.push(w);
                }
            }
        }
        assert_eq!(found.len(), 10);
        for k in 0..10 {
            let t = k as f64 * PI / 5.0;
            assert!(find_close(&found, &[t.cos(), t.sin()]).is_some());
            assert!(rs.find_root(&[t.cos(), t.sin()]).is_some());
        }
        assert!(!rs.is_crystallographic());
    }

    #[test]
    fn bc_is_not_reduced() {
        let rs = RootSystem::build(Family::BC, 2).unwrap();
        assert!(!rs.is_reduced());
        // ±e_i, ±2e_i, ±e_1±e_2
        assert_eq!(rs.len(), 4 + 4 + 4);
        assert_eq!(rs.reduced_indices().len(), 4 + 4);
        assert!(rs.is_crystallographic());
    }

    #[test]
    fn unsupported_combinations() {
        assert!(RootSystem::build(Family::I2, 1).is_err());
        // I2(2) is A1 x A1
        assert_eq!(RootSystem::build(Family::I2, 2).unwrap().len(), 4);
        assert!(RootSystem::build(Family::D, 1).is_err());
        assert!(RootSystem::build(Family::B, 0).is_err());
        assert!("Q".parse::<Family>().is_err());
    }

    #[test]
    fn coroot_examples() {
        let rs = RootSystem::from_parts("t", 2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![0]).unwrap();
        assert_eq!(rs.coroot(0).unwrap(), vec![2.0, 0.0]);
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let i = a2.find_root(&[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(a2.coroot(i).unwrap(), vec![1.0, -1.0, 0.0]);
        // rescaling the inner product by c sends y_α to y_α / c and leaves
        // x_α fixed
        let y = [1.0, -1.0, 0.0];
        for c in [0.5, 2.0, 7.0] {
            let yc: Vec<f64> = y.iter().map(|v| v / c).collect();
            let ip = c * linalg::dot(&yc, &yc);
            let xa: Vec<f64> = yc.iter().map(|v| 2.0 * v / ip).collect();
            assert!(linalg::max_abs_diff(&xa, &[1.0, -1.0, 0.0]) < 1e-12);
        }
        assert!(a2.coroot(17).is_err());
    }

    #[test]
    fn reflection_examples() {
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let i = a2.find_root(&[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(a2.reflect(i, &[3.0, 1.0, 0.0]).unwrap(), vec![1.0, 3.0, 0.0]);
        let xa = a2.coroot(i).unwrap();
        assert_eq!(a2.reflect(i, &xa).unwrap(), linalg::scale(&xa, -1.0));
        let x = [0.3, -1.2, 2.5];
        let back = a2.reflect(i, &a2.reflect(i, &x).unwrap()).unwrap();
        assert!(linalg::max_abs_diff(&back, &x) < 1e-12);
    }

    #[test]
    fn restrict_a2_to_plane_matches_dihedral_geometry() {
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let b = linalg::sum_zero_basis(3);
        let p = a2.restrict_to(&b).unwrap();
        assert_eq!(p.ambient_dim(), 2);
        assert_eq!(p.len(), 6);
        for r in p.roots() {
            assert!((linalg::norm(r) - 2f64.sqrt()).abs() < 1e-12);
        }
        assert_eq!(generate_group(&p, 100).unwrap().order(), 6);
    }

    #[test]
    fn json_roundtrip_revalidates() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let s = serde_json::to_string(&rs).unwrap();
        let back: RootSystem = serde_json::from_str(&s).unwrap();
        assert_eq!(back.roots(), rs.roots());
        assert_eq!(back.positive(), rs.positive());
        let broken = s.replace("\"simple\":[", "\"simple\":[0,");
        assert!(serde_json::from_str::<RootSystem>(&broken).is_err());
    }
}
