//! Extreme-point extraction in dimensions 1 to 3.

use crate::linalg;

const TOL: f64 = 1e-9;

fn dedup(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| linalg::max_abs_diff(p, q) <= TOL) {
            out.push(p.clone());
        }
    }
    out
}

/// Orthonormal basis of the affine span directions of `points` (relative
/// to the first point).
pub(crate) fn affine_basis(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p0 = &points[0];
    let scale = points
        .iter()
        .map(|p| linalg::norm(&linalg::sub(p, p0)))
        .fold(0.0, f64::max)
        .max(1.0);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in points.iter().skip(1) {
        if let Some(u) = linalg::gram_schmidt_step(&basis, &linalg::sub(p, p0), TOL * scale) {
            basis.push(u);
        }
    }
    basis
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; returns indices in counter-clockwise order,
/// dropping collinear boundary points.
pub(crate) fn monotone_chain(pts: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| {
        pts[i][0]
            .partial_cmp(&pts[j][0])
            .unwrap()
            .then(pts[i][1].partial_cmp(&pts[j][1]).unwrap())
    });
    if idx.len() < 3 {
        return idx;
    }
    let scale = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    let tol = TOL * scale * scale;
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= tol
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= tol
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Extreme points of a finite set in `R^n`, `n ≤ 3`. Returns `None` when
/// exact extraction is not available (higher affine dimension than 3 or
/// too many points for the brute-force 3-D search).
pub(crate) fn extreme_points(points: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let pts = dedup(points);
    if pts.len() <= 1 {
        return Some(pts);
    }
    let basis = affine_basis(&pts);
    let p0 = pts[0].clone();
    let local: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| {
            let d = linalg::sub(p, &p0);
            basis.iter().map(|b| linalg::dot(&d, b)).collect()
        })
        .collect();
    match basis.len() {
        0 => Some(vec![p0]),
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, l) in local.iter().enumerate() {
                if l[0] < local[lo][0] {
                    lo = i;
                }
                if l[0] > local[hi][0] {
                    hi = i;
                }
            }
            Some(vec![pts[lo].clone(), pts[hi].clone()])
        }
        2 => {
            let flat: Vec<[f64; 2]> = local.iter().map(|l| [l[0], l[1]]).collect();
            Some(monotone_chain(&flat).into_iter().map(|i| pts[i].clone()).collect())
        }
        3 if pts.len() <= 200 => Some(hull_3d(&pts)),
        _ => None,
    }
}

/// Brute-force facet search for a full-dimensional set in `R^3`.
fn hull_3d(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = pts.len();
    let scale = pts.iter().map(|p| linalg::norm(p)).fold(1.0, f64::max);
    let tol = TOL * scale;
    let mut keep = vec![false; n];
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let a = linalg::sub(&pts[j], &pts[i]);
                let b = linalg::sub(&pts[k], &pts[i]);
                let nrm = vec![
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let Some(u) = linalg::unit(&nrm) else { continue };
                if linalg::norm(&nrm) < tol * scale {
                    continue;
                }
                let off = linalg::dot(&u, &pts[i]);
                let mut above = false;
                let mut below = false;
                for p in pts {
                    let s = linalg::dot(&u, p) - off;
                    if s > tol {
                        above = true;
                    } else if s < -tol {
                        below = true;
                    }
                }
                if above && below {
                    continue;
                }
                let (u, off) = if above { (linalg::scale(&u, -1.0), -off) } else { (u, off) };
                if planes.iter().any(|(v, o)| linalg::max_abs_diff(v, &u) <= 1e-9 && (o - off).abs() <= tol) {
                    continue;
                }
                planes.push((u, off));
            }
        }
    }
    for (u, off) in &planes {
        let on: Vec<usize> = (0..n).filter(|&m| (linalg::dot(u, &pts[m]) - off).abs() <= tol).collect();
        let face: Vec<Vec<f64>> = on.iter().map(|&m| pts[m].clone()).collect();
        let basis = affine_basis(&face);
        let f0 = face[0].clone();
        if basis.len() < 2 {
            for &m in &on {
                keep[m] = true;
            }
            continue;
        }
        let flat: Vec<[f64; 2]> = face
            .iter()
            .map(|p| {
                let d = linalg::sub(p, &f0);
                [linalg::dot(&d, &basis[0]), linalg::dot(&d, &basis[1])]
            })
            .collect();
        for i in monotone_chain(&flat) {
            keep[on[i]] = true;
        }
    }
    pts.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_endpoints() {
        let v = extreme_points(&[vec![0.2], vec![0.9], vec![0.5]]).unwrap();
        assert_eq!(v, vec![vec![0.2], vec![0.9]]);
    }

    #[test]
    fn square_drops_center_and_edge_midpoints() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![0.5, 0.0],
        ];
        assert_eq!(extreme_points(&pts).unwrap().len(), 4);
    }

    #[test]
    fn cube_has_eight_vertices() {
        let mut pts = Vec::new();
        for a in [0.0, 1.0] {
            for b in [0.0, 1.0] {
                for c in [0.0, 1.0] {
                    pts.push(vec![a, b, c]);
                }
            }
        }
        pts.push(vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.5, 1.0]);
        assert_eq!(extreme_points(&pts).unwrap().len(), 8);
    }

    #[test]
    fn planar_set_in_space() {
        let pts = vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.2, 0.2, 1.0]];
        assert_eq!(extreme_points(&pts).unwrap().len(), 3);
    }
}
