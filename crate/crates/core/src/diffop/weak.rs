//! Distributions given by piecewise densities, and their images under
//! differential operators paired against test functions.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::op::DiffOp;
use super::smooth::{SmoothFn, TensorBump};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityPiece {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub density: Expr,
}

/// `u = Σ χ_{box_k} · ρ_k`, a compactly supported locally integrable function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiecewiseDensity {
    pub dim: usize,
    pub pieces: Vec<DensityPiece>,
}

impl PiecewiseDensity {
    /// Characteristic function of the box `[lo, hi]`.
    pub fn indicator(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let mut u = PiecewiseDensity { dim: lo.len(), pieces: Vec::new() };
        u.push(lo, hi, Expr::one())?;
        Ok(u)
    }

    pub fn push(&mut self, lo: &[f64], hi: &[f64], density: Expr) -> Result<()> {
        if lo.len() != self.dim || hi.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: lo.len() });
        }
        if lo.iter().zip(hi).any(|(a, b)| !(b > a) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter("density regions must be bounded boxes".into()));
        }
        self.pieces.push(DensityPiece { lo: lo.to_vec(), hi: hi.to_vec(), density });
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .filter(|p| x.iter().zip(&p.lo).zip(&p.hi).all(|((v, a), b)| v >= a && v <= b))
            .map(|p| p.density.eval(x))
            .sum()
    }
}

/// Tensor composite Gauss–Legendre rule on a box.
pub fn composite_gauss(
    rule: &GaussLegendre,
    lo: &[f64],
    hi: &[f64],
    cells: usize,
    f: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let n = lo.len();
    let pairs = rule.as_node_weight_pairs();
    // 1-D nodes and weights across all cells, per axis
    let axes: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| {
            let w = (hi[i] - lo[i]) / cells as f64;
            let mut pts = Vec::with_capacity(cells * pairs.len());
            for c in 0..cells {
                let a = lo[i] + c as f64 * w;
                for &(x, wt) in pairs {
                    pts.push((a + 0.5 * w * (x + 1.0), 0.5 * w * wt));
                }
            }
            pts
        })
        .collect();
    let counts: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let total: usize = counts.iter().product();
    let mut sum = 0.0;
    let mut x = vec![0.0; n];
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for i in (0..n).rev() {
            let k = rem % counts[i];
            rem /= counts[i];
            x[i] = axes[i][k].0;
            w *= axes[i][k].1;
        }
        sum += w * f(&x)?;
    }
    Ok(sum)
}

fn intersect(lo: &[f64], hi: &[f64], other: Option<(Vec<f64>, Vec<f64>)>) -> Option<(Vec<f64>, Vec<f64>)> {
    let (olo, ohi) = match other {
        Some(b) => b,
        None => return Some((lo.to_vec(), hi.to_vec())),
    };
    let l: Vec<f64> = lo.iter().zip(&olo).map(|(a, b)| a.max(*b)).collect();
    let h: Vec<f64> = hi.iter().zip(&ohi).map(|(a, b)| a.min(*b)).collect();
    if l.iter().zip(&h).all(|(a, b)| b > a) {
        Some((l, h))
    } else {
        None
    }
}

/// `⟨Du, φ⟩ := ⟨u, Dᵗφ⟩` by composite Gauss quadrature with `quad_points`
/// nodes per cell, refined once; the two results must agree to
/// `1e-8 · max(1, |I|)`.
pub fn weak_apply(op: &DiffOp, u: &PiecewiseDensity, phi: &dyn SmoothFn, quad_points: usize) -> Result<f64> {
    weak_apply_transposed(&op.transpose(), u, phi, quad_points)
}

fn weak_apply_transposed(dt: &DiffOp, u: &PiecewiseDensity, phi: &dyn SmoothFn, quad_points: usize) -> Result<f64> {
    if dt.dim() != u.dim || phi.dim() != u.dim {
        return Err(Error::DimensionMismatch { expected: u.dim, found: dt.dim() });
    }
    let q = NonZeroUsize::new(quad_points).ok_or_else(|| Error::InvalidParameter("quad_points must be positive".into()))?;
    let rule = GaussLegendre::new(q);
    let base_cells = if u.dim == 1 { 32 } else { 8 };
    let mut coarse = 0.0;
    let mut fine = 0.0;
    for piece in &u.pieces {
        let Some((lo, hi)) = intersect(&piece.lo, &piece.hi, phi.support_box()) else {
            continue;
        };
        let integrand = |x: &[f64]| -> Result<f64> {
            let rho = piece.density.eval(x);
            if rho == 0.0 {
                return Ok(0.0);
            }
            Ok(rho * dt.apply_at(phi, x)?)
        };
        coarse += composite_gauss(&rule, &lo, &hi, base_cells, &integrand)?;
        fine += composite_gauss(&rule, &lo, &hi, 2 * base_cells, &integrand)?;
    }
    if (coarse - fine).abs() > 1e-8 * fine.abs().max(1.0) {
        return Err(Error::QuadratureNonconvergence { coarse, fine });
    }
    Ok(fine)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanResult {
    pub probe_width: f64,
    pub rel_threshold: f64,
    pub centers: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub max_abs: f64,
    pub flagged: Vec<Vec<f64>>,
}

/// Evaluate `|⟨Du, φ_c⟩|` for bumps `φ_c` of half-width `eps` centred at
/// each `c`; centres above `rel_threshold · max` are flagged.
pub fn distr_support_scan(
    op: &DiffOp,
    u: &PiecewiseDensity,
    eps: f64,
    centers: &[Vec<f64>],
    rel_threshold: f64,
) -> Result<ScanResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("probe width must be positive".into()));
    }
    let dt = op.transpose();
    let values: Result<Vec<f64>> = centers
        .par_iter()
        .map(|c| weak_apply_transposed(&dt, u, &TensorBump::new(c, eps), 16))
        .collect();
    let values = values?;
    let max_abs = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let flagged = if max_abs <= 1e-300 {
        Vec::new()
    } else {
        centers
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.abs() > rel_threshold * max_abs)
            .map(|(c, _)| c.clone())
            .collect()
    };
    Ok(ScanResult { probe_width: eps, rel_threshold, centers: centers.to_vec(), values, max_abs, flagged })
}
