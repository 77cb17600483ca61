use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::normal::{CompiledForm, NormalForm};
use super::smooth::SmoothFn;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rootsys::{GroupElement, RootSystem, ThetaCone};

pub type MultiIndex = Vec<u32>;

fn index_string(alpha: &[u32]) -> String {
    alpha.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_index(s: &str, dim: usize) -> Result<MultiIndex> {
    let v: std::result::Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
    let v = v.map_err(|_| Error::InvalidParameter(format!("bad multi-index '{s}'")))?;
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(v)
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// A homogeneous-or-not polynomial in the dual variable `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualPoly {
    pub dim: usize,
    /// `(coefficient, exponents)` pairs.
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl DualPoly {
    pub fn constant(c: f64, dim: usize) -> Self {
        DualPoly { dim, terms: vec![(c, vec![0; dim])] }
    }

    /// `⟨λ, λ⟩`
    pub fn norm_squared(dim: usize) -> Self {
        let terms = (0..dim)
            .map(|i| {
                let mut e = vec![0; dim];
                e[i] = 2;
                (1.0, e)
            })
            .collect();
        DualPoly { dim, terms }
    }

    /// `λ_1^k` on the line.
    pub fn power_1d(k: u32) -> Self {
        DualPoly { dim: 1, terms: vec![(1.0, vec![k])] }
    }

    pub fn eval(&self, lambda: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(lambda).map(|(k, l)| l.powi(*k as i32)).product::<f64>())
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }
}

/// Claimed form `σ(D)(x,λ) = p(λ) ∏ α(x)^{n(α)} P(x,λ)` on `a_Θ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Factorization {
    pub p: DualPoly,
    /// `(root index, n(α))`
    pub exponents: Vec<(usize, u32)>,
    pub theta: Vec<usize>,
    pub rs: RootSystem,
}

impl Factorization {
    /// `p(λ) ∏ α(x)^{n(α)}`
    pub fn divisor(&self, x: &[f64], lambda: &[f64]) -> f64 {
        let mut d = self.p.eval(lambda);
        for &(i, n) in &self.exponents {
            d *= self.rs.evaluate(i, x).powi(n as i32);
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegKind {
    /// powers of `δ = ∏ sinh α`
    Delta,
    /// powers of `π = ∏ α`
    Pi,
}

/// `δ^power` or `π^power` over `Σ⁺`.
pub fn weyl_expr(rs: &RootSystem, kind: RegKind, power: i32) -> Expr {
    let factors = rs
        .positive()
        .iter()
        .map(|&i| {
            let l = Expr::linear(&rs.roots()[i]);
            let base = match kind {
                RegKind::Delta => l.sinh(),
                RegKind::Pi => l,
            };
            base.pow(power)
        })
        .collect();
    Expr::product(factors)
}

#[derive(Clone, Debug)]
struct Coeff {
    nf: NormalForm,
    compiled: CompiledForm,
}

impl Coeff {
    fn new(nf: NormalForm) -> Self {
        let compiled = nf.compile();
        Coeff { nf, compiled }
    }
}

/// `D = Σ a_I(x) ∂^I` on `R^dim`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DiffOpJson", into = "DiffOpJson")]
pub struct DiffOp {
    dim: usize,
    label: String,
    terms: BTreeMap<MultiIndex, Coeff>,
    factorization: Option<Factorization>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffOpJson {
    pub schema_version: u32,
    pub label: String,
    pub dim: usize,
    /// Multi-index strings such as `"2,0"` mapped to coefficient trees.
    pub terms: BTreeMap<String, Expr>,
    #[serde(default)]
    pub factorization: Option<Factorization>,
}

impl From<DiffOp> for DiffOpJson {
    fn from(op: DiffOp) -> Self {
        DiffOpJson {
            schema_version: crate::SCHEMA_VERSION,
            label: op.label,
            dim: op.dim,
            terms: op.terms.iter().map(|(k, c)| (index_string(k), c.nf.to_expr())).collect(),
            factorization: op.factorization,
        }
    }
}

impl TryFrom<DiffOpJson> for DiffOp {
    type Error = Error;

    fn try_from(j: DiffOpJson) -> Result<Self> {
        if j.schema_version != crate::SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema_version {}",
                j.schema_version
            )));
        }
        let mut op = DiffOp::new(j.dim, &j.label);
        for (k, e) in &j.terms {
            op.add_term(&parse_index(k, j.dim)?, e)?;
        }
        op.factorization = j.factorization;
        Ok(op)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub operator: String,
    pub theta: Vec<usize>,
    pub samples: usize,
    pub skipped_small_divisor: usize,
    pub min_p: f64,
    pub max_p: f64,
    pub min_abs_p: f64,
    pub near_wall_samples: usize,
    pub near_wall_min_abs: f64,
    pub near_wall_max_abs: f64,
    pub margin_tol: f64,
    pub seed: u64,
    pub passed: bool,
}

fn unit_sphere_sample(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = linalg::norm(&v);
        if r > 0.1 && r <= 1.0 {
            return linalg::scale(&v, 1.0 / r);
        }
    }
}

/// Rejection sample from `a_Θ ∩ [-half, half]^n`.
pub fn sample_in_cone(rng: &mut ChaCha8Rng, cone: &ThetaCone, n: usize, half: f64) -> Result<Vec<f64>> {
    for _ in 0..1_000_000 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-half..half)).collect();
        if cone.contains(&x) {
            return Ok(x);
        }
    }
    Err(Error::InvalidParameter("could not sample the cone a_theta".into()))
}

impl DiffOp {
    pub fn new(dim: usize, label: &str) -> Self {
        DiffOp { dim, label: label.to_string(), terms: BTreeMap::new(), factorization: None }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = DiffOp::new(dim, "identity");
        op.add_term_nf(&vec![0; dim], NormalForm::constant(1.0, dim));
        op
    }

    /// `∂^alpha`
    pub fn partial(alpha: &[u32]) -> Self {
        let dim = alpha.len();
        let mut op = DiffOp::new(dim, &format!("d^({})", index_string(alpha)));
        op.add_term_nf(alpha, NormalForm::constant(1.0, dim));
        op
    }

    /// `Σ ∂_i²`
    pub fn laplacian(dim: usize) -> Self {
        let mut op = DiffOp::new(dim, "laplacian");
        for i in 0..dim {
            let mut a = vec![0; dim];
            a[i] = 2;
            op.add_term_nf(&a, NormalForm::constant(1.0, dim));
        }
        op
    }

    /// Directional derivative `∂(y) = Σ y_i ∂_i`.
    pub fn directional(y: &[f64]) -> Self {
        let dim = y.len();
        let mut op = DiffOp::new(dim, "directional");
        for (i, &v) in y.iter().enumerate() {
            if v != 0.0 {
                let mut a = vec![0; dim];
                a[i] = 1;
                op.add_term_nf(&a, NormalForm::constant(v, dim));
            }
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn add_term(&mut self, alpha: &[u32], coeff: &Expr) -> Result<()> {
        if alpha.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: alpha.len() });
        }
        let nf = NormalForm::from_expr(coeff, self.dim)?;
        self.add_term_nf(alpha, nf);
        Ok(())
    }

    fn add_term_nf(&mut self, alpha: &[u32], nf: NormalForm) {
        let sum = match self.terms.get(alpha) {
            Some(c) => c.nf.add(&nf),
            None => nf,
        };
        if sum.is_zero() {
            self.terms.remove(alpha);
        } else {
            self.terms.insert(alpha.to_vec(), Coeff::new(sum));
        }
    }

    /// Nonzero terms in multi-index order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &NormalForm)> {
        self.terms.iter().map(|(k, c)| (k, &c.nf))
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Option<&NormalForm> {
        self.terms.get(alpha).map(|c| &c.nf)
    }

    pub fn coefficient_expr(&self, alpha: &[u32]) -> Expr {
        self.coefficient(alpha).map(|nf| nf.to_expr()).unwrap_or_else(Expr::zero)
    }

    /// Evaluate the coefficient of `∂^alpha` at `x` (0 if absent).
    pub fn eval_coefficient(&self, alpha: &[u32], x: &[f64]) -> Result<f64> {
        match self.terms.get(alpha) {
            Some(c) => c.compiled.eval(x),
            None => Ok(0.0),
        }
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Unit normals of hyperplanes on which some coefficient has a pole.
    pub fn singular_forms(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for c in self.terms.values() {
            for d in c.nf.singular_directions() {
                if !out.iter().any(|e| linalg::max_abs_diff(e, &d) <= 1e-9) {
                    out.push(d);
                }
            }
        }
        out
    }

    pub fn is_regular(&self) -> bool {
        self.singular_forms().is_empty()
    }

    fn check_off_singular(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        for d in self.singular_forms() {
            if linalg::dot(&d, x).abs() < super::normal::POLE_TOL {
                return Err(Error::SingularPoint { x: x.to_vec() });
            }
        }
        Ok(())
    }

    /// `Σ_{|I|=m} a_I(x) λ^I`. Points on a singular hyperplane of any
    /// coefficient are rejected.
    pub fn principal_symbol(&self, x: &[f64], lambda: &[f64]) -> Result<f64> {
        self.check_off_singular(x)?;
        if lambda.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: lambda.len() });
        }
        let m = self.order();
        let mut s = 0.0;
        for (alpha, c) in &self.terms {
            if alpha.iter().sum::<u32>() != m {
                continue;
            }
            let mono: f64 = alpha.iter().zip(lambda).map(|(k, l)| l.powi(*k as i32)).product();
            s += c.compiled.eval(x)? * mono;
        }
        Ok(s)
    }

    /// `(Df)(x)` using exact derivatives of `f`.
    pub fn apply_at(&self, f: &dyn SmoothFn, x: &[f64]) -> Result<f64> {
        self.check_off_singular(x)?;
        let mut s = 0.0;
        for (alpha, c) in &self.terms {
            let d = f.derivative(x, alpha).ok_or_else(|| {
                Error::InvalidParameter("test function provides no derivatives".into())
            })?;
            if d != 0.0 {
                s += c.compiled.eval(x)? * d;
            }
        }
        Ok(s)
    }

    /// Formal transpose `Dᵗg = Σ (-1)^{|I|} ∂^I(a_I g)`, expanded by the
    /// Leibniz rule.
    pub fn transpose(&self) -> DiffOp {
        let mut out = DiffOp::new(self.dim, &format!("({})^t", self.label));
        for (alpha, c) in &self.terms {
            let sign = if alpha.iter().sum::<u32>() % 2 == 0 { 1.0 } else { -1.0 };
            for beta in sub_indices(alpha) {
                let rest: Vec<u32> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
                let binom: f64 = alpha.iter().zip(&beta).map(|(a, b)| binomial(*a, *b)).product();
                let coeff = c.nf.diff_multi(&rest).scale(sign * binom);
                out.add_term_nf(&beta, coeff);
            }
        }
        out
    }

    /// The operator `D'` with `(D'g)(u) = (Df)(Tu)` whenever `g = f ∘ T`
    /// and `f` is constant along `ker Tᵀ`: coefficients become `a_I(Tu)`
    /// and `∂_i` becomes `Σ_k T_ik ∂_k`. `T` is `dim × k`.
    pub fn change_variables(&self, t: &Matrix) -> Result<DiffOp> {
        if t.rows != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: t.rows });
        }
        let k = t.cols;
        let mut out = DiffOp::new(k, &self.label);
        for (alpha, c) in &self.terms {
            let a = NormalForm::from_expr(&c.nf.to_expr().change_variables(t), k)?;
            let mut poly: BTreeMap<Vec<u32>, f64> = BTreeMap::from([(vec![0; k], 1.0)]);
            for (i, &ai) in alpha.iter().enumerate() {
                for _ in 0..ai {
                    let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                    for (mono, v) in &poly {
                        for j in 0..k {
                            let tij = t.get(i, j);
                            if tij == 0.0 {
                                continue;
                            }
                            let mut m = mono.clone();
                            m[j] += 1;
                            *next.entry(m).or_insert(0.0) += v * tij;
                        }
                    }
                    poly = next;
                }
            }
            for (mono, v) in poly {
                if v.abs() > 1e-15 {
                    out.add_term_nf(&mono, a.scale(v));
                }
            }
        }
        Ok(out)
    }

    /// `w·D`, acting by `(w·D)f = w·D(w⁻¹·f)`.
    pub fn w_conjugate(&self, w: &GroupElement) -> DiffOp {
        self.change_variables(&w.matrix.transpose())
            .expect("orthogonal change of variables stays in the algebra")
            .with_label(&self.label)
    }

    pub fn scale(&self, s: f64) -> DiffOp {
        let mut out = DiffOp::new(self.dim, &self.label);
        for (alpha, c) in &self.terms {
            out.add_term_nf(alpha, c.nf.scale(s));
        }
        out
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = self.clone();
        out.factorization = None;
        for (alpha, c) in &other.terms {
            out.add_term_nf(alpha, c.nf.clone());
        }
        Ok(out)
    }

    /// `e(x) · D`
    pub fn mul_expr(&self, e: &Expr) -> Result<DiffOp> {
        let f = NormalForm::from_expr(e, self.dim)?;
        let mut out = DiffOp::new(self.dim, &self.label);
        for (alpha, c) in &self.terms {
            out.add_term_nf(alpha, c.nf.mul(&f));
        }
        Ok(out)
    }

    /// `δ^{2k} D` or `π^{2k} D`; fails if any coefficient keeps a pole.
    pub fn regularize(&self, rs: &RootSystem, k: u32, kind: RegKind) -> Result<DiffOp> {
        if k == 0 {
            return Err(Error::InvalidParameter("regularization power must be positive".into()));
        }
        let out = self.multiply_by_weyl(rs, 2 * k as i32, kind)?;
        let remaining = out.singular_forms();
        if !remaining.is_empty() {
            return Err(Error::InsufficientPower { remaining });
        }
        Ok(out)
    }

    /// `δ^power D` or `π^power D` with no regularity check.
    pub fn multiply_by_weyl(&self, rs: &RootSystem, power: i32, kind: RegKind) -> Result<DiffOp> {
        if rs.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rs.ambient_dim() });
        }
        let name = match kind {
            RegKind::Delta => "delta",
            RegKind::Pi => "pi",
        };
        Ok(self
            .mul_expr(&weyl_expr(rs, kind, power))?
            .with_label(&format!("{name}^{power}*{}", self.label)))
    }

    pub fn with_factorization(mut self, f: Factorization) -> Self {
        self.factorization = Some(f);
        self
    }

    pub fn factorization(&self) -> Option<&Factorization> {
        self.factorization.as_ref()
    }

    /// Sample `P = σ / (p ∏ α^{n(α)})` on `a_Θ ∩ [-5,5]^n` times the unit
    /// sphere, plus along sequences approaching the walls of `⟨Θ⟩⁺` that
    /// run through `a_Θ`.
    pub fn check_factorization(&self, samples: usize, seed: u64, margin_tol: f64) -> Result<FactorizationReport> {
        let fac = self.factorization.as_ref().ok_or(Error::MissingFactorization)?;
        let rs = &fac.rs;
        let n = self.dim;
        if rs.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rs.ambient_dim() });
        }
        let cone = ThetaCone::new(rs, &fac.theta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_p = f64::INFINITY;
        let mut max_p = f64::NEG_INFINITY;
        let mut min_abs = f64::INFINITY;
        let mut skipped = 0;
        for _ in 0..samples {
            let x = sample_in_cone(&mut rng, &cone, n, 5.0)?;
            let lambda = unit_sphere_sample(&mut rng, n);
            let div = fac.divisor(&x, &lambda);
            if div.abs() <= 1e-8 {
                skipped += 1;
                continue;
            }
            let p = self.principal_symbol(&x, &lambda)? / div;
            min_p = min_p.min(p);
            max_p = max_p.max(p);
            min_abs = min_abs.min(p.abs());
        }

        let walls = rs.theta_positive(&fac.theta);
        let mut nw_min = f64::INFINITY;
        let mut nw_max: f64 = 0.0;
        let mut nw_count = 0;
        if !walls.is_empty() {
            for _ in 0..(samples / 20).max(10) {
                let x = sample_in_cone(&mut rng, &cone, n, 5.0)?;
                let a = walls[rng.gen_range(0..walls.len())];
                let y = &rs.roots()[a];
                let on_wall = linalg::axpy(&x, -rs.evaluate(a, &x) / linalg::dot(y, y), y);
                let lambda = unit_sphere_sample(&mut rng, n);
                for k in 1..=6 {
                    let s = 10f64.powi(-k);
                    let xk = linalg::axpy(&on_wall, s, &linalg::sub(&x, &on_wall));
                    let div = fac.divisor(&xk, &lambda);
                    if div == 0.0 || !div.is_finite() {
                        continue;
                    }
                    let p = (self.principal_symbol(&xk, &lambda)? / div).abs();
                    nw_min = nw_min.min(p);
                    nw_max = nw_max.max(p);
                    nw_count += 1;
                }
            }
        }
        let near_ok = nw_count == 0 || (nw_min > margin_tol && nw_max.is_finite());
        Ok(FactorizationReport {
            operator: self.label.clone(),
            theta: fac.theta.clone(),
            samples,
            skipped_small_divisor: skipped,
            min_p,
            max_p,
            min_abs_p: min_abs,
            near_wall_samples: nw_count,
            near_wall_min_abs: if nw_count == 0 { 0.0 } else { nw_min },
            near_wall_max_abs: nw_max,
            margin_tol,
            seed,
            passed: min_abs.is_finite() && min_abs > margin_tol && near_ok,
        })
    }

    /// Pairs `(I, compiled a_I)` for fast repeated evaluation.
    pub(crate) fn compiled_terms(&self) -> Vec<(MultiIndex, CompiledForm)> {
        self.terms.iter().map(|(k, c)| (k.clone(), c.compiled.clone())).collect()
    }
}

/// All `J ≤ I` componentwise.
fn sub_indices(alpha: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for &a in alpha {
        let mut next = Vec::new();
        for prefix in &out {
            for b in 0..=a {
                let mut p: Vec<u32> = prefix.clone();
                p.push(b);
                next.push(p);
            }
        }
        out = next;
    }
    out
}
