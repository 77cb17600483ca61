//! Canonical sums of monomials in linear forms, `sinh`, `cosh` and `exp`.
//!
//! A monomial is `c · ∏ ℓ_j(x)^{k_j} · ∏ sinh(μ_j(x))^{a_j} · ∏ cosh(ν_j(x))^{b_j}
//! · exp(η(x))` with integer (possibly negative) exponents. Linear factors
//! are stored through unit directions, hyperbolic factors through their
//! full forms; both are sign normalized. `coth` is rewritten as
//! `cosh · sinh⁻¹`, which is what lets products such as `sinh² · coth`
//! cancel by exponent arithmetic.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::linalg;

const KEY_SCALE: f64 = 1e9;
/// Below this `|t|` a factor `t^v` with `v < 0` is treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Lin,
    Sinh,
    Cosh,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Atom {
    pub kind: AtomKind,
    pub form: Vec<f64>,
    #[serde(skip)]
    key: Vec<i64>,
}

fn round_key(v: &[f64]) -> Vec<i64> {
    v.iter().map(|x| (x * KEY_SCALE).round() as i64).collect()
}

/// Flip `v` so that its first clearly nonzero entry is positive.
fn sign_normalize(v: &[f64]) -> (Vec<f64>, f64) {
    let s = match v.iter().find(|x| x.abs() > 1e-12) {
        Some(x) if *x < 0.0 => -1.0,
        _ => 1.0,
    };
    (linalg::scale(v, s), s)
}

impl Atom {
    fn new(kind: AtomKind, form: Vec<f64>) -> Atom {
        let key = round_key(&form);
        Atom { kind, form, key }
    }

    fn cmp_key(&self, other: &Atom) -> Ordering {
        (self.kind, &self.key).cmp(&(other.kind, &other.key))
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub atoms: Vec<(Atom, i32)>,
    /// Exponential factor `exp(⟨exp_form, x⟩)`; all zeros when absent.
    pub exp_form: Vec<f64>,
}

impl Monomial {
    fn constant(c: f64, dim: usize) -> Monomial {
        Monomial { coeff: c, atoms: Vec::new(), exp_form: vec![0.0; dim] }
    }

    fn canonicalize(mut self) -> Monomial {
        self.atoms.sort_by(|a, b| a.0.cmp_key(&b.0));
        let mut out: Vec<(Atom, i32)> = Vec::with_capacity(self.atoms.len());
        for (a, k) in self.atoms {
            match out.last_mut() {
                Some((b, kb)) if *b == a => *kb += k,
                _ => out.push((a, k)),
            }
        }
        out.retain(|(_, k)| *k != 0);
        self.atoms = out;
        self
    }

    fn key(&self) -> (Vec<(u8, Vec<i64>, i32)>, Vec<i64>) {
        (
            self.atoms.iter().map(|(a, k)| (a.kind as u8, a.key.clone(), *k)).collect(),
            round_key(&self.exp_form),
        )
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Monomial {
            coeff: self.coeff * other.coeff,
            atoms,
            exp_form: linalg::add(&self.exp_form, &other.exp_form),
        }
        .canonicalize()
    }

    fn inverse(&self) -> Result<Monomial> {
        if self.coeff == 0.0 {
            return Err(Error::OutsideAlgebra("reciprocal of zero".into()));
        }
        Ok(Monomial {
            coeff: 1.0 / self.coeff,
            atoms: self.atoms.iter().map(|(a, k)| (a.clone(), -k)).collect(),
            exp_form: linalg::scale(&self.exp_form, -1.0),
        })
    }

    fn has_exp(&self) -> bool {
        self.exp_form.iter().any(|v| *v != 0.0)
    }

    /// Order of vanishing (negative for a pole) along each hyperplane the
    /// monomial touches, keyed by the unit normal.
    fn valuations(&self) -> Vec<(Vec<f64>, i32)> {
        let mut out: Vec<(Vec<f64>, Vec<i64>, i32)> = Vec::new();
        for (a, k) in &self.atoms {
            let dir = match a.kind {
                AtomKind::Lin => a.form.clone(),
                AtomKind::Sinh => sign_normalize(&linalg::unit(&a.form).expect("nonzero form")).0,
                AtomKind::Cosh => continue,
            };
            let key = round_key(&dir);
            match out.iter_mut().find(|(_, kk, _)| *kk == key) {
                Some(entry) => entry.2 += k,
                None => out.push((dir, key, *k)),
            }
        }
        out.into_iter().map(|(d, _, v)| (d, v)).collect()
    }

    fn diff(&self, i: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        for (j, (a, k)) in self.atoms.iter().enumerate() {
            let s = a.form[i];
            if s == 0.0 {
                continue;
            }
            let mut m = self.clone();
            m.coeff *= *k as f64 * s;
            m.atoms[j].1 -= 1;
            match a.kind {
                AtomKind::Lin => {}
                AtomKind::Sinh => m.atoms.push((Atom::new(AtomKind::Cosh, a.form.clone()), 1)),
                AtomKind::Cosh => m.atoms.push((Atom::new(AtomKind::Sinh, a.form.clone()), 1)),
            }
            out.push(m.canonicalize());
        }
        if self.exp_form[i] != 0.0 {
            let mut m = self.clone();
            m.coeff *= self.exp_form[i];
            out.push(m);
        }
        out
    }

    fn to_expr(&self) -> Expr {
        let mut factors = vec![Expr::c(self.coeff)];
        for (a, k) in &self.atoms {
            let base = match a.kind {
                AtomKind::Lin => Expr::linear(&a.form),
                AtomKind::Sinh => Expr::linear(&a.form).sinh(),
                AtomKind::Cosh => Expr::linear(&a.form).cosh(),
            };
            factors.push(if *k == 1 { base } else { base.pow(*k) });
        }
        if self.has_exp() {
            factors.push(Expr::linear(&self.exp_form).exp());
        }
        Expr::product(factors).simplify()
    }
}

/// A canonical sum of monomials on `R^dim`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalForm {
    pub dim: usize,
    pub terms: Vec<Monomial>,
}

impl NormalForm {
    pub fn zero(dim: usize) -> Self {
        NormalForm { dim, terms: Vec::new() }
    }

    pub fn constant(c: f64, dim: usize) -> Self {
        NormalForm { dim, terms: vec![Monomial::constant(c, dim)] }.merged()
    }

    /// `⟨form, x⟩`
    pub fn linear(form: &[f64]) -> Self {
        let dim = form.len();
        let n = linalg::norm(form);
        if n == 0.0 {
            return Self::zero(dim);
        }
        let (d, s) = sign_normalize(&linalg::scale(form, 1.0 / n));
        let m = Monomial {
            coeff: s * n,
            atoms: vec![(Atom::new(AtomKind::Lin, d), 1)],
            exp_form: vec![0.0; dim],
        };
        NormalForm { dim, terms: vec![m] }
    }

    fn hyperbolic(kind: AtomKind, form: &[f64]) -> Self {
        let dim = form.len();
        let (f, s) = sign_normalize(form);
        let coeff = if kind == AtomKind::Sinh { s } else { 1.0 };
        let m = Monomial { coeff, atoms: vec![(Atom::new(kind, f), 1)], exp_form: vec![0.0; dim] };
        NormalForm { dim, terms: vec![m] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if this form has no non-constant monomials.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [m] if m.atoms.is_empty() && !m.has_exp() => Some(m.coeff),
            _ => None,
        }
    }

    fn merged(mut self) -> Self {
        let mut map: BTreeMap<(Vec<(u8, Vec<i64>, i32)>, Vec<i64>), Monomial> = BTreeMap::new();
        for m in self.terms.drain(..) {
            let m = m.canonicalize();
            match map.get_mut(&m.key()) {
                Some(acc) => acc.coeff += m.coeff,
                None => {
                    map.insert(m.key(), m);
                }
            }
        }
        let scale = map.values().map(|m| m.coeff.abs()).fold(0.0, f64::max);
        self.terms = map
            .into_values()
            .filter(|m| m.coeff != 0.0 && m.coeff.abs() > 1e-13 * scale)
            .collect();
        self
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        NormalForm { dim: self.dim, terms }.merged()
    }

    pub fn scale(&self, s: f64) -> NormalForm {
        let mut out = self.clone();
        for m in &mut out.terms {
            m.coeff *= s;
        }
        out.merged()
    }

    pub fn mul(&self, other: &NormalForm) -> NormalForm {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        NormalForm { dim: self.dim, terms }.merged()
    }

    /// Integer power. Negative powers are only available for single
    /// monomials; anything else leaves the coefficient algebra.
    pub fn pow(&self, n: i32) -> Result<NormalForm> {
        if n >= 0 {
            let mut acc = NormalForm::constant(1.0, self.dim);
            for _ in 0..n {
                acc = acc.mul(self);
            }
            return Ok(acc);
        }
        match self.terms.as_slice() {
            [m] => {
                let inv = NormalForm { dim: self.dim, terms: vec![m.inverse()?] }.merged();
                inv.pow(-n)
            }
            [] => Err(Error::OutsideAlgebra("reciprocal of zero".into())),
            _ => Err(Error::OutsideAlgebra(
                "reciprocal of a sum of monomials is not supported".into(),
            )),
        }
    }

    /// `(form, constant)` if this is an affine function.
    fn as_affine(&self) -> Option<(Vec<f64>, f64)> {
        let mut form = vec![0.0; self.dim];
        let mut c = 0.0;
        for m in &self.terms {
            if m.has_exp() {
                return None;
            }
            match m.atoms.as_slice() {
                [] => c += m.coeff,
                [(a, 1)] if a.kind == AtomKind::Lin => {
                    for (f, d) in form.iter_mut().zip(&a.form) {
                        *f += m.coeff * d;
                    }
                }
                _ => return None,
            }
        }
        Some((form, c))
    }

    fn linear_argument(&self, what: &str) -> Result<Vec<f64>> {
        match self.as_affine() {
            Some((form, c)) if c == 0.0 => Ok(form),
            _ => Err(Error::OutsideAlgebra(format!("{what} of a non-linear argument"))),
        }
    }

    pub fn from_expr(e: &Expr, dim: usize) -> Result<NormalForm> {
        Ok(match e {
            Expr::Const { value } => NormalForm::constant(*value, dim),
            Expr::Coord { index } => {
                if *index >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: index + 1 });
                }
                NormalForm::linear(&linalg::unit_vector(dim, *index))
            }
            Expr::Linear { form } => {
                if form.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: form.len() });
                }
                NormalForm::linear(form)
            }
            Expr::Sum { terms } => {
                let mut acc = NormalForm::zero(dim);
                for t in terms {
                    acc = acc.add(&NormalForm::from_expr(t, dim)?);
                }
                acc
            }
            Expr::Product { factors } => {
                let mut acc = NormalForm::constant(1.0, dim);
                for f in factors {
                    acc = acc.mul(&NormalForm::from_expr(f, dim)?);
                }
                acc
            }
            Expr::Pow { base, exp } => NormalForm::from_expr(base, dim)?.pow(*exp)?,
            Expr::Recip { arg } => NormalForm::from_expr(arg, dim)?.pow(-1)?,
            Expr::Sinh { arg } => {
                let a = NormalForm::from_expr(arg, dim)?;
                if let Some(c) = a.as_constant() {
                    return Ok(NormalForm::constant(c.sinh(), dim));
                }
                NormalForm::hyperbolic(AtomKind::Sinh, &a.linear_argument("sinh")?)
            }
            Expr::Cosh { arg } => {
                let a = NormalForm::from_expr(arg, dim)?;
                if let Some(c) = a.as_constant() {
                    return Ok(NormalForm::constant(c.cosh(), dim));
                }
                NormalForm::hyperbolic(AtomKind::Cosh, &a.linear_argument("cosh")?)
            }
            Expr::Coth { arg } => {
                let a = NormalForm::from_expr(arg, dim)?;
                if let Some(c) = a.as_constant() {
                    if c == 0.0 {
                        return Err(Error::OutsideAlgebra("coth(0)".into()));
                    }
                    return Ok(NormalForm::constant(1.0 / c.tanh(), dim));
                }
                let l = a.linear_argument("coth")?;
                NormalForm::hyperbolic(AtomKind::Cosh, &l)
                    .mul(&NormalForm::hyperbolic(AtomKind::Sinh, &l).pow(-1)?)
            }
            Expr::Exp { arg } => {
                let a = NormalForm::from_expr(arg, dim)?;
                let (form, c) = a
                    .as_affine()
                    .ok_or_else(|| Error::OutsideAlgebra("exp of a non-affine argument".into()))?;
                let m = Monomial { coeff: c.exp(), atoms: Vec::new(), exp_form: form };
                NormalForm { dim, terms: vec![m] }.merged()
            }
        })
    }

    pub fn to_expr(&self) -> Expr {
        Expr::sum(self.terms.iter().map(Monomial::to_expr).collect()).simplify()
    }

    pub fn diff(&self, i: usize) -> NormalForm {
        let terms = self.terms.iter().flat_map(|m| m.diff(i)).collect();
        NormalForm { dim: self.dim, terms }.merged()
    }

    pub fn diff_multi(&self, alpha: &[u32]) -> NormalForm {
        let mut out = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.diff(i);
            }
        }
        out
    }

    /// Unit normals (sign normalized) of hyperplanes on which some monomial
    /// has a pole.
    pub fn singular_directions(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for m in &self.terms {
            for (d, v) in m.valuations() {
                if v < 0 && !out.iter().any(|e| linalg::max_abs_diff(e, &d) <= 1e-9) {
                    out.push(d);
                }
            }
        }
        out
    }

    pub fn compile(&self) -> CompiledForm {
        CompiledForm { terms: self.terms.iter().map(compile_monomial).collect() }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.compile().eval(x)
    }
}

#[derive(Clone, Debug)]
struct DirGroup {
    dir: Vec<f64>,
    valuation: i32,
    /// `(c, b)`: a factor `sinh(c t)^b` with `t = ⟨dir, x⟩`.
    sinh: Vec<(f64, i32)>,
}

#[derive(Clone, Debug)]
struct CompiledMonomial {
    coeff: f64,
    groups: Vec<DirGroup>,
    cosh: Vec<(Vec<f64>, i32)>,
    exp_form: Option<Vec<f64>>,
}

/// Evaluation-ready form. Each factor `sinh(c t)^b` is evaluated as
/// `(c t)^b · sinhc(c t)^b` and the powers of `t` are collected per
/// hyperplane, so removable singularities evaluate to their limits.
#[derive(Clone, Debug)]
pub struct CompiledForm {
    terms: Vec<CompiledMonomial>,
}

fn compile_monomial(m: &Monomial) -> CompiledMonomial {
    let mut coeff = m.coeff;
    let mut groups: Vec<DirGroup> = Vec::new();
    let mut cosh = Vec::new();
    for (a, k) in &m.atoms {
        let (dir, c) = match a.kind {
            AtomKind::Cosh => {
                cosh.push((a.form.clone(), *k));
                continue;
            }
            AtomKind::Lin => (a.form.clone(), None),
            AtomKind::Sinh => {
                let n = linalg::norm(&a.form);
                (linalg::scale(&a.form, 1.0 / n), Some(n))
            }
        };
        let g = match groups.iter_mut().position(|g| linalg::max_abs_diff(&g.dir, &dir) <= 1e-9) {
            Some(p) => &mut groups[p],
            None => {
                groups.push(DirGroup { dir, valuation: 0, sinh: Vec::new() });
                groups.last_mut().expect("just pushed")
            }
        };
        g.valuation += k;
        if let Some(c) = c {
            coeff *= c.powi(*k);
            g.sinh.push((c, *k));
        }
    }
    let exp_form = if m.has_exp() { Some(m.exp_form.clone()) } else { None };
    CompiledMonomial { coeff, groups, cosh, exp_form }
}

/// `sinh(z)/z`, accurate near 0.
pub fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

impl CompiledForm {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for m in &self.terms {
            let mut v = m.coeff;
            for g in &m.groups {
                let t = linalg::dot(&g.dir, x);
                if g.valuation < 0 && t.abs() < POLE_TOL {
                    return Err(Error::SingularPoint { x: x.to_vec() });
                }
                if g.valuation != 0 {
                    v *= t.powi(g.valuation);
                }
                for &(c, b) in &g.sinh {
                    v *= sinhc(c * t).powi(b);
                }
            }
            for (f, k) in &m.cosh {
                v *= linalg::dot(f, x).cosh().powi(*k);
            }
            if let Some(e) = &m.exp_form {
                v *= linalg::dot(e, x).exp();
            }
            total += v;
        }
        Ok(total)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_squared_times_coth_is_regular() {
        let x = Expr::coord(0);
        let e = Expr::product(vec![x.clone().sinh().pow(2), x.clone().coth()]);
        let nf = NormalForm::from_expr(&e, 1).unwrap();
        assert!(nf.singular_directions().is_empty());
        assert!(nf.eval(&[0.0]).unwrap().abs() < 1e-15);
        let v = nf.eval(&[0.8]).unwrap();
        assert!((v - 0.8f64.sinh() * 0.8f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn coth_of_double_angle_needs_one_sinh_power() {
        let x = Expr::coord(0);
        let c2 = Expr::linear(&[2.0]).coth();
        let one = NormalForm::from_expr(&Expr::product(vec![x.clone().sinh(), c2.clone()]), 1).unwrap();
        assert!(one.singular_directions().is_empty());
        // sinh x coth 2x -> cosh 2x / (2 cosh x) at 0 gives 1/2
        assert!((one.eval(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
        let bare = NormalForm::from_expr(&c2, 1).unwrap();
        assert_eq!(bare.singular_directions().len(), 1);
        assert!(matches!(bare.eval(&[0.0]), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn reciprocal_of_sum_is_rejected() {
        let e = Expr::sum(vec![Expr::coord(0), Expr::one()]).recip();
        assert!(matches!(NormalForm::from_expr(&e, 1), Err(Error::OutsideAlgebra(_))));
    }

    #[test]
    fn differentiation_agrees_with_tree() {
        let l = Expr::linear(&[1.0, -1.0]);
        let e = Expr::product(vec![
            l.clone().sinh().pow(2),
            Expr::linear(&[0.5, 2.0]).coth(),
            Expr::coord(1).recip(),
            Expr::linear(&[0.3, 0.1]).exp(),
        ]);
        let nf = NormalForm::from_expr(&e, 2).unwrap();
        let x = [0.4, 0.9];
        for i in 0..2 {
            let a = nf.diff(i).eval(&x).unwrap();
            let b = e.diff(i).eval(&x);
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
        let back = nf.to_expr();
        assert!((back.eval(&x) - e.eval(&x)).abs() < 1e-12);
    }

    #[test]
    fn like_terms_cancel() {
        let x = Expr::coord(0);
        let e = Expr::sum(vec![x.clone().recip(), x.clone().recip().scale(-1.0)]);
        assert!(NormalForm::from_expr(&e, 1).unwrap().is_zero());
        let neg = Expr::sum(vec![Expr::linear(&[-2.0]).sinh(), Expr::linear(&[2.0]).sinh()]);
        assert!(NormalForm::from_expr(&neg, 1).unwrap().is_zero());
    }
}
