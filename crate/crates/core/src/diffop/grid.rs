//! Uniform grids and finite-difference application of operators.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::op::DiffOp;
use super::smooth::SmoothFn;
use crate::error::{Error, Result};
use crate::linalg;

/// Tensor grid with `points[i]` nodes from `lo[i]` to `hi[i]` inclusive.
/// Flat indices run with the last coordinate fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: points.len() });
        }
        if lo.is_empty() {
            return Err(Error::EmptyInput);
        }
        for i in 0..lo.len() {
            if points[i] < 2 || !(hi[i] > lo[i]) {
                return Err(Error::InvalidParameter(format!(
                    "grid axis {i} needs at least 2 points and hi > lo"
                )));
            }
        }
        Ok(Grid { lo, hi, points })
    }

    /// Same extent and resolution on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Grid::new(vec![lo; dim], vec![hi; dim], vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn spacing(&self, i: usize) -> f64 {
        (self.hi[i] - self.lo[i]) / (self.points[i] - 1) as f64
    }

    pub fn h_max(&self) -> f64 {
        (0..self.dim()).map(|i| self.spacing(i)).fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        (0..self.dim()).map(|i| self.spacing(i)).fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = flat % self.points[i];
            flat /= self.points[i];
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(i, &k)| self.lo[i] + k as f64 * self.spacing(i))
            .collect()
    }

    /// The grid shifted by half a step on every axis.
    pub fn offset_half(&self) -> Grid {
        let lo = (0..self.dim()).map(|i| self.lo[i] + 0.5 * self.spacing(i)).collect();
        let hi = (0..self.dim()).map(|i| self.hi[i] + 0.5 * self.spacing(i)).collect();
        Grid { lo, hi, points: self.points.clone() }
    }

    /// Same extent with `2n - 1` points per axis (spacing halved).
    pub fn refined(&self) -> Grid {
        Grid { lo: self.lo.clone(), hi: self.hi.clone(), points: self.points.iter().map(|n| 2 * n - 1).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn sample(grid: &Grid, f: &dyn SmoothFn) -> SampledField {
        let values = (0..grid.len()).into_par_iter().map(|k| f.value(&grid.coords(k))).collect();
        SampledField { grid: grid.clone(), values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV with columns `x1..xn,value` and a header row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.grid.dim()).map(|i| format!("x{i}")).collect();
        header.push("value".into());
        wr.write_record(&header).map_err(csv_err)?;
        for (k, v) in self.values.iter().enumerate() {
            let mut rec: Vec<String> = self.grid.coords(k).iter().map(|c| format!("{c}")).collect();
            rec.push(format!("{v:e}"));
            wr.write_record(&rec).map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::Other, e))
}

/// Fornberg's weights for the `m`-th derivative at 0 on the given nodes.
pub fn fd_weights(m: usize, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let z = 0.0;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Half-width of the central stencil for derivative order `d` at accuracy `p`.
pub fn stencil_radius(d: u32, p: usize) -> usize {
    if d == 0 {
        0
    } else {
        (d as usize + 1) / 2 - 1 + p / 2
    }
}

/// Central weights on offsets `-r..=r` (unit spacing).
pub fn central_weights(d: u32, p: usize) -> Vec<f64> {
    let r = stencil_radius(d, p) as i64;
    let nodes: Vec<f64> = (-r..=r).map(|k| k as f64).collect();
    fd_weights(d as usize, &nodes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FdOptions {
    /// 2 or 4.
    pub fd_order: usize,
    /// Combine steps `h` and `2h` to cancel the leading error term.
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { fd_order: 4, richardson: false }
    }
}

/// Tensor stencil for `∂^alpha` as `(offset per axis, weight)` pairs, with
/// node step `step` (in grid units) and physical spacings `h`.
fn tensor_stencil(alpha: &[u32], p: usize, step: i64, h: &[f64]) -> Vec<(Vec<i64>, f64)> {
    let mut out: Vec<(Vec<i64>, f64)> = vec![(Vec::new(), 1.0)];
    for (i, &d) in alpha.iter().enumerate() {
        let w = central_weights(d, p);
        let r = stencil_radius(d, p) as i64;
        let scale = (step as f64 * h[i]).powi(d as i32);
        let mut next = Vec::new();
        for (off, wt) in &out {
            for (k, wk) in w.iter().enumerate() {
                if *wk == 0.0 {
                    continue;
                }
                let mut o = off.clone();
                o.push((k as i64 - r) * step);
                next.push((o, wt * wk / scale));
            }
        }
        out = next;
    }
    out
}

/// Finite-difference `Df` on the grid. Coefficients are evaluated
/// pointwise; a grid point within `h/2` of a singular hyperplane of `D`
/// is an error.
pub fn apply_grid(op: &DiffOp, f: &dyn SmoothFn, grid: &Grid, opts: FdOptions) -> Result<SampledField> {
    let n = grid.dim();
    if op.dim() != n || f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: op.dim() });
    }
    if opts.fd_order != 2 && opts.fd_order != 4 {
        return Err(Error::InvalidParameter("fd_order must be 2 or 4".into()));
    }
    let h: Vec<f64> = (0..n).map(|i| grid.spacing(i)).collect();
    let singular = op.singular_forms();
    let half = 0.5 * grid.h_min();

    let terms = op.compiled_terms();
    let mut stencils = Vec::with_capacity(terms.len());
    let mut pad = 0i64;
    for (alpha, _) in &terms {
        let fine = tensor_stencil(alpha, opts.fd_order, 1, &h);
        let st = if opts.richardson && alpha.iter().any(|&d| d > 0) {
            let coarse = tensor_stencil(alpha, opts.fd_order, 2, &h);
            let q = 2f64.powi(opts.fd_order as i32);
            let mut merged: Vec<(Vec<i64>, f64)> = Vec::new();
            for (o, w) in fine.into_iter().map(|(o, w)| (o, w * q / (q - 1.0))).chain(
                coarse.into_iter().map(|(o, w)| (o, -w / (q - 1.0))),
            ) {
                match merged.iter_mut().find(|(m, _)| *m == o) {
                    Some(e) => e.1 += w,
                    None => merged.push((o, w)),
                }
            }
            merged
        } else {
            fine
        };
        for (o, _) in &st {
            for v in o {
                pad = pad.max(v.abs());
            }
        }
        stencils.push(st);
    }

    // padded sample of f
    let pdims: Vec<usize> = grid.points.iter().map(|&p| p + 2 * pad as usize).collect();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * pdims[i + 1];
    }
    let total: usize = pdims.iter().product();
    let samples: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut x = vec![0.0; n];
            for i in 0..n {
                let k = rem / strides[i];
                rem %= strides[i];
                x[i] = grid.lo[i] + (k as f64 - pad as f64) * h[i];
            }
            f.value(&x)
        })
        .collect();

    let flat_stencils: Vec<Vec<(isize, f64)>> = stencils
        .iter()
        .map(|st| {
            st.iter()
                .map(|(o, w)| {
                    let off: isize = o.iter().zip(&strides).map(|(a, s)| *a as isize * *s as isize).sum();
                    (off, *w)
                })
                .collect()
        })
        .collect();

    let values: Result<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let idx = grid.multi_index(k);
            let x: Vec<f64> = (0..n).map(|i| grid.lo[i] + idx[i] as f64 * h[i]).collect();
            for d in &singular {
                if linalg::dot(d, &x).abs() < half * (1.0 - 1e-9) {
                    return Err(Error::SingularGridPoint { x: x.clone() });
                }
            }
            let base: usize = idx.iter().zip(&strides).map(|(i, s)| (i + pad as usize) * s).sum();
            let mut acc = 0.0;
            for ((_, coeff), st) in terms.iter().zip(&flat_stencils) {
                let mut d = 0.0;
                for (off, w) in st {
                    d += w * samples[(base as isize + off) as usize];
                }
                if d != 0.0 {
                    acc += coeff.eval(&x)? * d;
                }
            }
            Ok(acc)
        })
        .collect();
    Ok(SampledField { grid: grid.clone(), values: values? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::expr::Expr;
    use crate::diffop::smooth::{ExprFn, FnSmooth};

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let w = central_weights(2, 2);
        assert_eq!(w.len(), 3);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14);
        let w = central_weights(1, 4);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn laplacian_of_quadratic() {
        let g = Grid::cube(2, -1.0, 1.0, 41).unwrap();
        let f = FnSmooth { dim: 2, f: |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]) };
        let out = apply_grid(&DiffOp::laplacian(2), &f, &g, FdOptions { fd_order: 2, richardson: false }).unwrap();
        for v in &out.values {
            assert!((v - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn euler_derivative_of_gaussian() {
        let mut op = DiffOp::new(1, "x d/dx");
        op.add_term(&[1], &Expr::coord(0)).unwrap();
        let f = ExprFn::gaussian(&[0.0], 1.0);
        let g = Grid::cube(1, -3.0, 3.0, 601).unwrap();
        let out = apply_grid(&op, &f, &g, FdOptions::default()).unwrap();
        let mut worst: f64 = 0.0;
        for (k, v) in out.values.iter().enumerate() {
            let x = g.coords(k)[0];
            worst = worst.max((v + 2.0 * x * x * (-x * x).exp()).abs());
        }
        assert!(worst < 1e-4, "{worst}");
        let rich = apply_grid(&op, &f, &g, FdOptions { fd_order: 2, richardson: true }).unwrap();
        let plain = apply_grid(&op, &f, &g, FdOptions { fd_order: 2, richardson: false }).unwrap();
        let err = |field: &SampledField| {
            field
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let x = g.coords(k)[0];
                    (v + 2.0 * x * x * (-x * x).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(err(&rich) < err(&plain));
    }

    #[test]
    fn singular_grid_points_are_rejected() {
        let mut op = DiffOp::new(1, "1/x d/dx");
        op.add_term(&[1], &Expr::coord(0).recip()).unwrap();
        let f = ExprFn::gaussian(&[0.0], 1.0);
        let g = Grid::cube(1, -1.0, 1.0, 21).unwrap();
        assert!(matches!(
            apply_grid(&op, &f, &g, FdOptions::default()),
            Err(Error::SingularGridPoint { .. })
        ));
        assert!(apply_grid(&op, &f, &g.offset_half(), FdOptions::default()).is_ok());
    }

    #[test]
    fn csv_has_header() {
        let g = Grid::cube(1, 0.0, 1.0, 3).unwrap();
        let f = FnSmooth { dim: 1, f: |x: &[f64]| x[0] };
        let mut buf = Vec::new();
        SampledField::sample(&g, &f).write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x1,value\n"));
        assert_eq!(s.lines().count(), 4);
    }
}
