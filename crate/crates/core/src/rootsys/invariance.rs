use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{find_close, CoxeterGroup, GroupElement, RootSystem};
use crate::diffop::{DiffOp, ExprFn};
use crate::error::{Error, Result};
use crate::linalg;

/// Partition of the root indices into orbits of the group generated by all
/// root reflections.
pub fn root_orbits(rs: &RootSystem) -> Vec<Vec<usize>> {
    let n = rs.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let reflections: Vec<_> = (0..n).map(|i| rs.reflection_matrix(i).expect("valid index")).collect();
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut k = 0;
        while k < members.len() {
            let y = rs.roots()[members[k]].clone();
            for r in &reflections {
                let img = r.apply(&y);
                let j = find_close(rs.roots(), &img).expect("root system closed under reflections");
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

/// Group-invariant function on the roots, stored once per orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicityFunction {
    pub orbits: Vec<Vec<usize>>,
    pub values: Vec<f64>,
}

impl MultiplicityFunction {
    pub fn constant(rs: &RootSystem, value: f64) -> Self {
        let orbits = root_orbits(rs);
        let values = vec![value; orbits.len()];
        MultiplicityFunction { orbits, values }
    }

    /// Values listed in orbit order (orbits are ordered by smallest root index).
    pub fn from_orbit_values(rs: &RootSystem, values: &[f64]) -> Result<Self> {
        let orbits = root_orbits(rs);
        if values.len() != orbits.len() {
            return Err(Error::DimensionMismatch { expected: orbits.len(), found: values.len() });
        }
        Ok(MultiplicityFunction { orbits, values: values.to_vec() })
    }

    /// Build from a per-root rule; fails if the rule is not constant on orbits.
    pub fn from_fn(rs: &RootSystem, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let orbits = root_orbits(rs);
        let mut values = Vec::with_capacity(orbits.len());
        for orbit in &orbits {
            let v = f(&rs.roots()[orbit[0]]);
            for &i in orbit {
                if (f(&rs.roots()[i]) - v).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(
                        "multiplicity is not constant on a root orbit".into(),
                    ));
                }
            }
            values.push(v);
        }
        Ok(MultiplicityFunction { orbits, values })
    }

    /// Value at root index `i`.
    pub fn value(&self, i: usize) -> f64 {
        self.orbits
            .iter()
            .position(|o| o.contains(&i))
            .map(|k| self.values[k])
            .unwrap_or(0.0)
    }
}

/// `(1/|W|) Σ_w f(w⁻¹ x)`.
pub fn symmetrize<'a, F>(g: &'a CoxeterGroup, f: F) -> impl Fn(&[f64]) -> f64 + 'a
where
    F: Fn(&[f64]) -> f64 + 'a,
{
    move |x: &[f64]| {
        let s: f64 = g.elements.iter().map(|w| f(&w.apply_inverse(x))).sum();
        s / g.order() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    Trivial,
    Sign,
}

impl Character {
    pub fn value(self, w: &GroupElement) -> f64 {
        match self {
            Character::Trivial => 1.0,
            Character::Sign => w.determinant().signum(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub character: Character,
    pub samples: usize,
    pub group_order: usize,
    pub max_deviation: f64,
    pub tol: f64,
    pub passed: bool,
}

fn sample_box(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half..half)).collect()
}

/// Check `f(w⁻¹x) = χ(w) f(x)` on `samples` seeded points of `[-3,3]^n`.
pub fn check_function_equivariance(
    g: &CoxeterGroup,
    f: &dyn Fn(&[f64]) -> f64,
    character: Character,
    samples: usize,
    seed: u64,
    tol: f64,
) -> EquivarianceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = sample_box(&mut rng, g.ambient_dim, 3.0);
        let fx = f(&x);
        for w in &g.elements {
            let d = (f(&w.apply_inverse(&x)) - character.value(w) * fx).abs();
            worst = worst.max(d);
        }
    }
    EquivarianceReport {
        character,
        samples,
        group_order: g.order(),
        max_deviation: worst,
        tol,
        passed: worst <= tol,
    }
}

/// Check `w·D = χ(w) D` by applying both sides to seeded Gaussian test
/// functions at seeded points away from the singular hyperplanes of `D`.
/// Deviations are measured relative to `max(1, |Df(x)|)`.
pub fn check_operator_equivariance(
    g: &CoxeterGroup,
    op: &DiffOp,
    character: Character,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<EquivarianceReport> {
    if op.dim() != g.ambient_dim {
        return Err(Error::DimensionMismatch { expected: g.ambient_dim, found: op.dim() });
    }
    let conjugates: Vec<DiffOp> = g.elements.iter().map(|w| op.w_conjugate(w)).collect();
    let walls: Vec<Vec<f64>> = op.singular_forms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.ambient_dim;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut attempts = 0;
    while done < samples {
        attempts += 1;
        if attempts > 1000 * samples.max(1) {
            return Err(Error::InvalidParameter("could not sample points off the singular set".into()));
        }
        let x = sample_box(&mut rng, n, 2.0);
        if walls.iter().any(|l| linalg::dot(l, &x).abs() < 1e-2) {
            continue;
        }
        let center = sample_box(&mut rng, n, 1.0);
        let test = ExprFn::gaussian(&center, 1.0);
        let base = op.apply_at(&test, &x)?;
        let scale = base.abs().max(1.0);
        for (w, dw) in g.elements.iter().zip(&conjugates) {
            let lhs = dw.apply_at(&test, &x)?;
            worst = worst.max((lhs - character.value(w) * base).abs() / scale);
        }
        done += 1;
    }
    Ok(EquivarianceReport {
        character,
        samples,
        group_order: g.order(),
        max_deviation: worst,
        tol,
        passed: worst <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{generate_group, Family};

    #[test]
    fn orbits_of_b2_split_long_and_short() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let orbits = root_orbits(&rs);
        assert_eq!(orbits.len(), 2);
        let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 4]);
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        assert_eq!(root_orbits(&a2).len(), 1);
        let bc1 = RootSystem::build(Family::BC, 1).unwrap();
        assert_eq!(root_orbits(&bc1).len(), 2);
    }

    #[test]
    fn multiplicity_rule_must_be_invariant() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let m = MultiplicityFunction::from_fn(&rs, |y| linalg::dot(y, y)).unwrap();
        let long = rs.find_root(&[1.0, 1.0]).unwrap();
        let short = rs.find_root(&[0.0, -1.0]).unwrap();
        assert_eq!(m.value(long), 2.0);
        assert_eq!(m.value(short), 1.0);
        assert!(MultiplicityFunction::from_fn(&rs, |y| y[0]).is_err());
    }

    #[test]
    fn symmetrize_examples() {
        let r1 = RootSystem::rank_one();
        let g1 = generate_group(&r1, 10).unwrap();
        let s = symmetrize(&g1, |x: &[f64]| x[0]);
        assert_eq!(s(&[0.4]), 0.0);

        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let g = generate_group(&a2, 100).unwrap();
        let s = symmetrize(&g, |x: &[f64]| x[0]);
        let x = [0.3, -1.1, 2.0];
        assert!((s(&x) - (0.3 - 1.1 + 2.0) / 3.0).abs() < 1e-12);

        let inv = |x: &[f64]| linalg::dot(x, x);
        let s = symmetrize(&g, inv);
        assert!((s(&x) - inv(&x)).abs() < 1e-12);
        let rep = check_function_equivariance(&g, &s, Character::Trivial, 50, 1, 1e-12);
        assert!(rep.passed);
    }

    #[test]
    fn odd_function_has_sign_character() {
        let g = generate_group(&RootSystem::rank_one(), 10).unwrap();
        let f = |x: &[f64]| x[0];
        assert!(check_function_equivariance(&g, &f, Character::Sign, 30, 2, 1e-14).passed);
        assert!(!check_function_equivariance(&g, &f, Character::Trivial, 30, 2, 1e-14).passed);
    }
}
