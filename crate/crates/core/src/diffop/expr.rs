//! Coefficient expression trees.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Expr {
    Const { value: f64 },
    /// The coordinate `x_index`.
    Coord { index: usize },
    /// The linear form `x ↦ ⟨form, x⟩`.
    Linear { form: Vec<f64> },
    Sum { terms: Vec<Expr> },
    Product { factors: Vec<Expr> },
    Pow { base: Box<Expr>, exp: i32 },
    Recip { arg: Box<Expr> },
    Sinh { arg: Box<Expr> },
    Cosh { arg: Box<Expr> },
    Coth { arg: Box<Expr> },
    Exp { arg: Box<Expr> },
}

impl Expr {
    pub fn c(value: f64) -> Expr {
        Expr::Const { value }
    }

    pub fn zero() -> Expr {
        Expr::c(0.0)
    }

    pub fn one() -> Expr {
        Expr::c(1.0)
    }

    pub fn coord(index: usize) -> Expr {
        Expr::Coord { index }
    }

    pub fn linear(form: &[f64]) -> Expr {
        Expr::Linear { form: form.to_vec() }
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum { terms }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::Product { factors }
    }

    pub fn pow(self, exp: i32) -> Expr {
        Expr::Pow { base: Box::new(self), exp }
    }

    pub fn recip(self) -> Expr {
        Expr::Recip { arg: Box::new(self) }
    }

    pub fn sinh(self) -> Expr {
        Expr::Sinh { arg: Box::new(self) }
    }

    pub fn cosh(self) -> Expr {
        Expr::Cosh { arg: Box::new(self) }
    }

    pub fn coth(self) -> Expr {
        Expr::Coth { arg: Box::new(self) }
    }

    pub fn exp(self) -> Expr {
        Expr::Exp { arg: Box::new(self) }
    }

    pub fn scale(self, s: f64) -> Expr {
        Expr::product(vec![Expr::c(s), self])
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const { value } => Some(*value),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Largest coordinate index referenced, plus one (0 for constants).
    pub fn min_dim(&self) -> usize {
        match self {
            Expr::Const { .. } => 0,
            Expr::Coord { index } => index + 1,
            Expr::Linear { form } => form.len(),
            Expr::Sum { terms } => terms.iter().map(Expr::min_dim).max().unwrap_or(0),
            Expr::Product { factors } => factors.iter().map(Expr::min_dim).max().unwrap_or(0),
            Expr::Pow { base, .. } => base.min_dim(),
            Expr::Recip { arg }
            | Expr::Sinh { arg }
            | Expr::Cosh { arg }
            | Expr::Coth { arg }
            | Expr::Exp { arg } => arg.min_dim(),
        }
    }

    /// Direct evaluation. Poles produce infinities or NaN.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const { value } => *value,
            Expr::Coord { index } => x[*index],
            Expr::Linear { form } => linalg::dot(form, x),
            Expr::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
            Expr::Product { factors } => factors.iter().map(|t| t.eval(x)).product(),
            Expr::Pow { base, exp } => base.eval(x).powi(*exp),
            Expr::Recip { arg } => 1.0 / arg.eval(x),
            Expr::Sinh { arg } => arg.eval(x).sinh(),
            Expr::Cosh { arg } => arg.eval(x).cosh(),
            Expr::Coth { arg } => 1.0 / arg.eval(x).tanh(),
            Expr::Exp { arg } => arg.eval(x).exp(),
        }
    }

    /// Partial derivative in `x_i`.
    pub fn diff(&self, i: usize) -> Expr {
        let d = match self {
            Expr::Const { .. } => Expr::zero(),
            Expr::Coord { index } => Expr::c(if *index == i { 1.0 } else { 0.0 }),
            Expr::Linear { form } => Expr::c(form.get(i).copied().unwrap_or(0.0)),
            Expr::Sum { terms } => Expr::sum(terms.iter().map(|t| t.diff(i)).collect()),
            Expr::Product { factors } => {
                let mut terms = Vec::new();
                for k in 0..factors.len() {
                    let dk = factors[k].diff(i).simplify();
                    if dk.is_zero() {
                        continue;
                    }
                    let mut fs = factors.clone();
                    fs[k] = dk;
                    terms.push(Expr::product(fs));
                }
                Expr::sum(terms)
            }
            Expr::Pow { base, exp } => {
                if *exp == 0 {
                    Expr::zero()
                } else {
                    Expr::product(vec![
                        Expr::c(*exp as f64),
                        (**base).clone().pow(exp - 1),
                        base.diff(i),
                    ])
                }
            }
            Expr::Recip { arg } => Expr::product(vec![
                Expr::c(-1.0),
                Expr::Recip { arg: arg.clone() }.pow(2),
                arg.diff(i),
            ]),
            Expr::Sinh { arg } => Expr::product(vec![(**arg).clone().cosh(), arg.diff(i)]),
            Expr::Cosh { arg } => Expr::product(vec![(**arg).clone().sinh(), arg.diff(i)]),
            Expr::Coth { arg } => Expr::product(vec![
                Expr::sum(vec![Expr::one(), (**arg).clone().coth().pow(2).scale(-1.0)]),
                arg.diff(i),
            ]),
            Expr::Exp { arg } => Expr::product(vec![self.clone(), arg.diff(i)]),
        };
        d.simplify()
    }

    /// Derivative along a multi-index.
    pub fn diff_multi(&self, alpha: &[u32]) -> Expr {
        let mut e = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                e = e.diff(i);
            }
        }
        e
    }

    /// Constant folding and flattening; no algebraic rewriting.
    pub fn simplify(self) -> Expr {
        match self {
            Expr::Linear { form } => {
                if form.iter().all(|v| *v == 0.0) {
                    Expr::zero()
                } else {
                    Expr::Linear { form }
                }
            }
            Expr::Sum { terms } => {
                let mut konst = 0.0;
                let mut out = Vec::new();
                for t in terms {
                    match t.simplify() {
                        Expr::Const { value } => konst += value,
                        Expr::Sum { terms } => out.extend(terms),
                        other => out.push(other),
                    }
                }
                if konst != 0.0 {
                    out.push(Expr::c(konst));
                }
                match out.len() {
                    0 => Expr::zero(),
                    1 => out.pop().expect("one term"),
                    _ => Expr::Sum { terms: out },
                }
            }
            Expr::Product { factors } => {
                let mut konst = 1.0;
                let mut out = Vec::new();
                for f in factors {
                    match f.simplify() {
                        Expr::Const { value } => konst *= value,
                        Expr::Product { factors } => {
                            for g in factors {
                                match g {
                                    Expr::Const { value } => konst *= value,
                                    other => out.push(other),
                                }
                            }
                        }
                        other => out.push(other),
                    }
                }
                if konst == 0.0 {
                    return Expr::zero();
                }
                if konst != 1.0 {
                    out.insert(0, Expr::c(konst));
                }
                match out.len() {
                    0 => Expr::one(),
                    1 => out.pop().expect("one factor"),
                    _ => Expr::Product { factors: out },
                }
            }
            Expr::Pow { base, exp } => {
                let b = base.simplify();
                match (exp, b) {
                    (0, _) => Expr::one(),
                    (1, b) => b,
                    (e, Expr::Const { value }) => Expr::c(value.powi(e)),
                    (e, Expr::Pow { base, exp }) => Expr::Pow { base, exp: exp * e }.simplify(),
                    (e, b) => Expr::Pow { base: Box::new(b), exp: e },
                }
            }
            Expr::Recip { arg } => match arg.simplify() {
                Expr::Const { value } if value != 0.0 => Expr::c(1.0 / value),
                a => Expr::Recip { arg: Box::new(a) },
            },
            Expr::Sinh { arg } => match arg.simplify() {
                Expr::Const { value } => Expr::c(value.sinh()),
                a => Expr::Sinh { arg: Box::new(a) },
            },
            Expr::Cosh { arg } => match arg.simplify() {
                Expr::Const { value } => Expr::c(value.cosh()),
                a => Expr::Cosh { arg: Box::new(a) },
            },
            Expr::Coth { arg } => match arg.simplify() {
                Expr::Const { value } if value != 0.0 => Expr::c(1.0 / value.tanh()),
                a => Expr::Coth { arg: Box::new(a) },
            },
            Expr::Exp { arg } => match arg.simplify() {
                Expr::Const { value } => Expr::c(value.exp()),
                a => Expr::Exp { arg: Box::new(a) },
            },
            other => other,
        }
    }

    /// The expression `u ↦ e(T u)`, for a `n × k` matrix `T` (`n` the
    /// current dimension, `k` the new one).
    pub fn change_variables(&self, t: &Matrix) -> Expr {
        match self {
            Expr::Const { .. } => self.clone(),
            Expr::Coord { index } => Expr::Linear { form: t.row(*index).to_vec() },
            Expr::Linear { form } => Expr::Linear { form: t.apply_transpose(form) },
            Expr::Sum { terms } => Expr::sum(terms.iter().map(|e| e.change_variables(t)).collect()),
            Expr::Product { factors } => {
                Expr::product(factors.iter().map(|e| e.change_variables(t)).collect())
            }
            Expr::Pow { base, exp } => base.change_variables(t).pow(*exp),
            Expr::Recip { arg } => arg.change_variables(t).recip(),
            Expr::Sinh { arg } => arg.change_variables(t).sinh(),
            Expr::Cosh { arg } => arg.change_variables(t).cosh(),
            Expr::Coth { arg } => arg.change_variables(t).coth(),
            Expr::Exp { arg } => arg.change_variables(t).exp(),
        }
        .simplify()
    }
}

fn fmt_form(f: &mut fmt::Formatter<'_>, form: &[f64]) -> fmt::Result {
    write!(f, "<")?;
    for (i, v) in form.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, ";x>")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const { value } => write!(f, "{value}"),
            Expr::Coord { index } => write!(f, "x{}", index + 1),
            Expr::Linear { form } => fmt_form(f, form),
            Expr::Sum { terms } => {
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Expr::Product { factors } => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            Expr::Pow { base, exp } => write!(f, "({base})^{exp}"),
            Expr::Recip { arg } => write!(f, "1/({arg})"),
            Expr::Sinh { arg } => write!(f, "sinh({arg})"),
            Expr::Cosh { arg } => write!(f, "cosh({arg})"),
            Expr::Coth { arg } => write!(f, "coth({arg})"),
            Expr::Exp { arg } => write!(f, "exp({arg})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(e: &Expr, x: &[f64], i: usize) -> f64 {
        let h = 1e-5;
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[i] += h;
        m[i] -= h;
        (e.eval(&p) - e.eval(&m)) / (2.0 * h)
    }

    #[test]
    fn derivative_rules_match_finite_differences() {
        let l = Expr::linear(&[1.0, -0.5]);
        let exprs = vec![
            l.clone().sinh(),
            l.clone().cosh().pow(3),
            l.clone().coth(),
            l.clone().recip(),
            Expr::product(vec![Expr::coord(0), l.clone().exp(), Expr::coord(1).pow(-2)]),
            Expr::sum(vec![Expr::c(2.0), Expr::coord(0).pow(2).scale(3.0)]),
        ];
        let x = [0.7, 0.3];
        for e in &exprs {
            for i in 0..2 {
                let d = e.diff(i).eval(&x);
                let n = fd(e, &x, i);
                assert!((d - n).abs() < 1e-6 * n.abs().max(1.0), "{e}: {d} vs {n}");
            }
        }
    }

    #[test]
    fn change_of_variables_composes() {
        let e = Expr::product(vec![Expr::coord(0), Expr::linear(&[1.0, 2.0]).sinh()]);
        let t = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let u = [0.2, -0.9];
        let tu = t.apply(&u);
        assert!((e.change_variables(&t).eval(&u) - e.eval(&tu)).abs() < 1e-14);
    }

    #[test]
    fn json_is_tagged() {
        let e = Expr::coord(0).sinh();
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains("\"node\":\"sinh\""));
        let back: Expr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
