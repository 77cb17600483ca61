use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::RootSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// Grid used for hashing matrix entries. Distinct group elements at the
/// ranks we handle differ by far more than this in some entry.
const KEY_SCALE: f64 = 1e7;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupElement {
    pub matrix: Matrix,
    /// Simple positions (indices into `Π`) whose reflections multiply to
    /// `matrix`, left to right.
    pub word: Vec<usize>,
}

impl GroupElement {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.apply(x)
    }

    /// `w⁻¹ x`; the matrices are orthogonal.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.apply_transpose(x)
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.max_abs_diff(&Matrix::identity(self.matrix.rows)) <= 1e-9
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoxeterGroup {
    pub ambient_dim: usize,
    pub elements: Vec<GroupElement>,
    /// Simple positions whose reflections generate the group.
    pub generator_indices: Vec<usize>,
}

impl CoxeterGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> &GroupElement {
        &self.elements[0]
    }

    /// Position of the element with matrix `m`, if present.
    pub fn find(&self, m: &Matrix) -> Option<usize> {
        self.elements.iter().position(|e| e.matrix.max_abs_diff(m) <= 1e-9)
    }

    /// All images `w x`, duplicates removed.
    pub fn orbit(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for e in &self.elements {
            let y = e.apply(x);
            if !out.iter().any(|z| linalg::max_abs_diff(z, &y) <= 1e-9) {
                out.push(y);
            }
        }
        out
    }
}

fn matrix_key(m: &Matrix) -> Vec<i64> {
    m.data.iter().map(|v| (v * KEY_SCALE).round() as i64).collect()
}

fn closure(
    ambient_dim: usize,
    gens: &[(usize, Matrix)],
    generator_indices: Vec<usize>,
    cap: usize,
) -> Result<CoxeterGroup> {
    let id = Matrix::identity(ambient_dim);
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(matrix_key(&id), 0);
    let mut elements = vec![GroupElement { matrix: id, word: Vec::new() }];
    if elements.len() > cap {
        return Err(Error::GroupTooLarge { cap });
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (pos, g) in gens {
            let m = elements[i].matrix.mul(g);
            let key = matrix_key(&m);
            if seen.contains_key(&key) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::GroupTooLarge { cap });
            }
            let mut word = elements[i].word.clone();
            word.push(*pos);
            seen.insert(key, elements.len());
            queue.push_back(elements.len());
            elements.push(GroupElement { matrix: m, word });
        }
    }
    Ok(CoxeterGroup { ambient_dim, elements, generator_indices })
}

/// Breadth-first closure of the simple reflections.
pub fn generate_group(rs: &RootSystem, cap: usize) -> Result<CoxeterGroup> {
    if cap == 0 {
        return Err(Error::InvalidParameter("group cap must be at least 1".into()));
    }
    let positions = rs.all_simple_positions();
    generate_from_positions(rs, &positions, cap)
}

fn generate_from_positions(rs: &RootSystem, positions: &[usize], cap: usize) -> Result<CoxeterGroup> {
    let gens = positions
        .iter()
        .map(|&p| Ok((p, rs.reflection_matrix(rs.simple()[p])?)))
        .collect::<Result<Vec<_>>>()?;
    closure(rs.ambient_dim(), &gens, positions.to_vec(), cap)
}

/// `W_Θ`, generated by the simple reflections at the positions in `theta`.
pub fn parabolic_subgroup(rs: &RootSystem, g: &CoxeterGroup, theta: &[usize]) -> Result<CoxeterGroup> {
    rs.check_theta(theta)?;
    let mut sorted = theta.to_vec();
    sorted.sort_unstable();
    let mut full = g.generator_indices.clone();
    full.sort_unstable();
    if sorted == full {
        return Ok(g.clone());
    }
    for p in &sorted {
        if !g.generator_indices.contains(p) {
            return Err(Error::ThetaNotSubset(format!(
                "simple position {p} is not a generator of the given group"
            )));
        }
    }
    let sub = generate_from_positions(rs, &sorted, g.order().max(1))?;
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family;

    fn check_group_axioms(g: &CoxeterGroup) {
        for e in &g.elements {
            assert!(e.matrix.orthogonality_defect() < 1e-9);
            assert!((e.determinant().abs() - 1.0).abs() < 1e-9);
        }
        for a in &g.elements {
            assert!(g.find(&a.matrix.transpose()).is_some());
            for b in g.elements.iter().step_by(3) {
                assert!(g.find(&a.matrix.mul(&b.matrix)).is_some());
            }
        }
    }

    #[test]
    fn small_orders() {
        let cases = [
            (Family::A, 1, 2),
            (Family::A, 2, 6),
            (Family::A, 3, 24),
            (Family::B, 2, 8),
            (Family::B, 3, 48),
            (Family::D, 3, 24),
            (Family::BC, 2, 8),
            (Family::I2, 5, 10),
        ];
        for (f, r, order) in cases {
            let rs = RootSystem::build(f, r).unwrap();
            let g = generate_group(&rs, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(g.order(), order, "{f}{r}");
            check_group_axioms(&g);
        }
    }

    #[test]
    fn rank_one_is_plus_minus_identity() {
        let g = generate_group(&RootSystem::rank_one(), 10).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.elements[1].matrix.data, vec![-1.0]);
    }

    #[test]
    fn words_reproduce_matrices() {
        let rs = RootSystem::build(Family::B, 3).unwrap();
        let g = generate_group(&rs, DEFAULT_GROUP_CAP).unwrap();
        for e in &g.elements {
            let mut m = Matrix::identity(3);
            for &p in &e.word {
                m = m.mul(&rs.reflection_matrix(rs.simple()[p]).unwrap());
            }
            assert!(m.max_abs_diff(&e.matrix) < 1e-9);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let rs = RootSystem::build(Family::I2, 17).unwrap();
        assert!(matches!(generate_group(&rs, 10), Err(Error::GroupTooLarge { cap: 10 })));
    }

    #[test]
    fn parabolics() {
        let rs = RootSystem::build(Family::A, 2).unwrap();
        let g = generate_group(&rs, 100).unwrap();
        assert_eq!(parabolic_subgroup(&rs, &g, &[0, 1]).unwrap().order(), 6);
        assert_eq!(parabolic_subgroup(&rs, &g, &[]).unwrap().order(), 1);
        assert_eq!(parabolic_subgroup(&rs, &g, &[0]).unwrap().order(), 2);
        assert!(parabolic_subgroup(&rs, &g, &[2]).is_err());
    }
}
