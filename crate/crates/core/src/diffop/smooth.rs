//! Smooth test functions with exact derivatives.

use std::collections::HashMap;
use std::sync::Mutex;

use super::expr::Expr;

/// A smooth function on `R^dim`. Implementors that cannot supply exact
/// derivatives return `None` for every nonzero multi-index; such functions
/// can still be sampled on grids.
pub trait SmoothFn: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn derivative(&self, x: &[f64], alpha: &[u32]) -> Option<f64> {
        if alpha.iter().all(|&k| k == 0) {
            Some(self.value(x))
        } else {
            None
        }
    }

    /// Axis-aligned box containing the support, if compact.
    fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
}

/// `ψ(t) = exp(1 - 1/(1 - t²))` on `|t| < 1`, zero outside.
pub fn bump_profile(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Derivatives `ψ^{(j)}(t)` for `j = 0..=order`, from the Taylor jet of
/// `exp(1 - 1/u)` with `u = 1 - t²`.
pub fn bump_profile_jet(t: f64, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    if t.abs() >= 1.0 {
        return out;
    }
    let a0 = 1.0 - t * t;
    let a1 = -2.0 * t;
    let a2 = -1.0;
    // w = 1/u as a power series in s = τ - t
    let mut w = vec![0.0; order + 1];
    w[0] = 1.0 / a0;
    for n in 1..=order {
        let mut acc = a1 * w[n - 1];
        if n >= 2 {
            acc += a2 * w[n - 2];
        }
        w[n] = -acc / a0;
    }
    let mut g: Vec<f64> = w.iter().map(|v| -v).collect();
    g[0] += 1.0;
    let mut e = vec![0.0; order + 1];
    e[0] = g[0].exp();
    for n in 1..=order {
        let mut acc = 0.0;
        for j in 1..=n {
            acc += j as f64 * g[j] * e[n - j];
        }
        e[n] = acc / n as f64;
    }
    let mut fact = 1.0;
    for (k, o) in out.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *o = fact * e[k];
    }
    out
}

/// `∏ ψ((x_i - c_i)/r_i)`: a smooth bump supported in a box.
#[derive(Clone, Debug)]
pub struct TensorBump {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
}

impl TensorBump {
    pub fn new(center: &[f64], radius: f64) -> Self {
        TensorBump { center: center.to_vec(), radii: vec![radius; center.len()] }
    }
}

impl SmoothFn for TensorBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(&self.radii)
            .zip(x)
            .map(|((c, r), xi)| bump_profile((xi - c) / r))
            .product()
    }

    fn derivative(&self, x: &[f64], alpha: &[u32]) -> Option<f64> {
        let mut v = 1.0;
        for i in 0..self.center.len() {
            let k = alpha[i] as usize;
            let r = self.radii[i];
            let t = (x[i] - self.center[i]) / r;
            let jet = bump_profile_jet(t, k);
            v *= jet[k] / r.powi(k as i32);
            if v == 0.0 {
                break;
            }
        }
        Some(v)
    }

    fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let lo = self.center.iter().zip(&self.radii).map(|(c, r)| c - r).collect();
        let hi = self.center.iter().zip(&self.radii).map(|(c, r)| c + r).collect();
        Some((lo, hi))
    }
}

/// A function given by an expression tree; derivatives are computed
/// symbolically and cached per multi-index.
#[derive(Debug)]
pub struct ExprFn {
    pub expr: Expr,
    dim: usize,
    support: Option<(Vec<f64>, Vec<f64>)>,
    cache: Mutex<HashMap<Vec<u32>, Expr>>,
}

impl Clone for ExprFn {
    fn clone(&self) -> Self {
        ExprFn::new(self.expr.clone(), self.dim)
    }
}

impl ExprFn {
    pub fn new(expr: Expr, dim: usize) -> Self {
        ExprFn { expr, dim, support: None, cache: Mutex::new(HashMap::new()) }
    }

    /// `exp(-|x - c|² / w²)`
    pub fn gaussian(center: &[f64], width: f64) -> Self {
        let terms = center
            .iter()
            .enumerate()
            .map(|(i, c)| Expr::sum(vec![Expr::coord(i), Expr::c(-c)]).pow(2))
            .collect();
        let e = Expr::sum(terms).scale(-1.0 / (width * width)).exp();
        ExprFn::new(e.simplify(), center.len())
    }

    fn derivative_expr(&self, alpha: &[u32]) -> Expr {
        let mut cache = self.cache.lock().expect("derivative cache poisoned");
        cache.entry(alpha.to_vec()).or_insert_with(|| self.expr.diff_multi(alpha)).clone()
    }
}

impl SmoothFn for ExprFn {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    fn derivative(&self, x: &[f64], alpha: &[u32]) -> Option<f64> {
        Some(self.derivative_expr(alpha).eval(x))
    }

    fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.support.clone()
    }
}

/// Value-only wrapper around a closure.
pub struct FnSmooth<F: Fn(&[f64]) -> f64 + Sync> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> SmoothFn for FnSmooth<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_finite_differences() {
        for &t in &[-0.8, -0.3, 0.0, 0.45, 0.9] {
            let jet = bump_profile_jet(t, 3);
            assert!((jet[0] - bump_profile(t)).abs() < 1e-15);
            let h = 1e-5;
            let d1 = (bump_profile(t + h) - bump_profile(t - h)) / (2.0 * h);
            assert!((jet[1] - d1).abs() < 1e-6 * d1.abs().max(1.0));
            let j1p = bump_profile_jet(t + h, 1)[1];
            let j1m = bump_profile_jet(t - h, 1)[1];
            let d2 = (j1p - j1m) / (2.0 * h);
            assert!((jet[2] - d2).abs() < 1e-5 * d2.abs().max(1.0));
        }
        assert_eq!(bump_profile_jet(1.0, 2), vec![0.0; 3]);
    }

    #[test]
    fn gaussian_derivatives() {
        let g = ExprFn::gaussian(&[0.5, -0.2], 0.7);
        let x = [0.1, 0.3];
        let h = 1e-5;
        let dx = (g.value(&[x[0] + h, x[1]]) - g.value(&[x[0] - h, x[1]])) / (2.0 * h);
        assert!((g.derivative(&x, &[1, 0]).unwrap() - dx).abs() < 1e-8);
        let lap = g.derivative(&x, &[2, 0]).unwrap() + g.derivative(&x, &[0, 2]).unwrap();
        let r2 = (x[0] - 0.5f64).powi(2) + (x[1] + 0.2f64).powi(2);
        let w2 = 0.49;
        let exact = g.value(&x) * (4.0 * r2 / (w2 * w2) - 4.0 / w2);
        assert!((lap - exact).abs() < 1e-12);
    }
}
