//! Named operators with their root-system data, canonical regularizations
//! and declared symbol factorizations.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffop::{DiffOp, DualPoly, Expr, Factorization, RegKind};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rootsys::{root_orbits, Family, MultiplicityFunction, RootSystem};

pub type Params = BTreeMap<String, f64>;

fn unit_root_index(rs: &RootSystem) -> usize {
    rs.positive()[0]
}

/// `∂(y)` with coefficient `c`, added to `op`.
fn add_directional(op: &mut DiffOp, y: &[f64], c: &Expr) -> Result<()> {
    let n = y.len();
    for (j, &yj) in y.iter().enumerate() {
        if yj == 0.0 {
            continue;
        }
        let mut alpha = vec![0u32; n];
        alpha[j] = 1;
        op.add_term(&alpha, &c.clone().scale(yj))?;
    }
    Ok(())
}

/// `p(λ) ∏_{α ∈ ⟨Θ⟩⁺} α(x)^n` on `a_Θ`.
pub fn factorization_on(rs: &RootSystem, theta: &[usize], p: DualPoly, n: u32) -> Result<Factorization> {
    rs.check_theta(theta)?;
    let exponents = rs.theta_positive(theta).into_iter().map(|i| (i, n)).collect();
    Ok(Factorization { p, exponents, theta: theta.to_vec(), rs: rs.clone() })
}

/// `x² d²/dx² + a x d/dx + b`
pub fn euler(a: f64, b: f64) -> DiffOp {
    let mut op = DiffOp::new(1, &format!("euler({a},{b})"));
    op.add_term(&[2], &Expr::coord(0).pow(2)).expect("dimension 1");
    op.add_term(&[1], &Expr::coord(0).scale(a)).expect("dimension 1");
    op.add_term(&[0], &Expr::c(b)).expect("dimension 1");
    op
}

/// `x d/dx`
pub fn x_ddx() -> DiffOp {
    let mut op = DiffOp::new(1, "x*d/dx");
    op.add_term(&[1], &Expr::coord(0)).expect("dimension 1");
    op
}

/// `d²/dx² + (a coth x + b coth 2x) d/dx`
pub fn jacobi_1d(a: f64, b: f64) -> DiffOp {
    let mut op = DiffOp::new(1, &format!("jacobi1d({a},{b})"));
    op.add_term(&[2], &Expr::one()).expect("dimension 1");
    let drift = Expr::sum(vec![
        Expr::coord(0).coth().scale(a),
        Expr::coord(0).scale(2.0).coth().scale(b),
    ]);
    op.add_term(&[1], &drift).expect("dimension 1");
    op
}

/// `d²/dx² + (a/x + b/(2x)) d/dx`
pub fn bessel_1d(a: f64, b: f64) -> DiffOp {
    let mut op = DiffOp::new(1, &format!("bessel1d({a},{b})"));
    op.add_term(&[2], &Expr::one()).expect("dimension 1");
    let drift = Expr::sum(vec![
        Expr::coord(0).recip().scale(a),
        Expr::coord(0).scale(2.0).recip().scale(b),
    ]);
    op.add_term(&[1], &drift).expect("dimension 1");
    op
}

/// `L = Δ + Σ_{α∈Σ⁺} m_α coth α(x) ∂(y_α)`
pub fn hyper_l(rs: &RootSystem, m: &MultiplicityFunction) -> Result<DiffOp> {
    let mut op = DiffOp::laplacian(rs.ambient_dim()).with_label(&format!("hyperL[{}]", rs.label()));
    for &i in rs.positive() {
        let y = &rs.roots()[i];
        let c = Expr::linear(y).coth().scale(m.value(i));
        add_directional(&mut op, y, &c)?;
    }
    Ok(op)
}

/// `L₀ = Δ + Σ_{α∈Σ⁺} m_α α(x)⁻¹ ∂(y_α)`
pub fn bessel_l0(rs: &RootSystem, m: &MultiplicityFunction) -> Result<DiffOp> {
    let mut op = DiffOp::laplacian(rs.ambient_dim()).with_label(&format!("besselL0[{}]", rs.label()));
    for &i in rs.positive() {
        let y = &rs.roots()[i];
        let c = Expr::linear(y).recip().scale(m.value(i));
        add_directional(&mut op, y, &c)?;
    }
    Ok(op)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpCase {
    I,
    II,
    V,
}

impl FromStr for OpCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(OpCase::I),
            "II" | "2" => Ok(OpCase::II),
            "V" | "5" => Ok(OpCase::V),
            other => Err(Error::InvalidParameter(format!(
                "potential case '{other}' is not supported (use I, II or V)"
            ))),
        }
    }
}

impl std::fmt::Display for OpCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OpCase::I => "I",
            OpCase::II => "II",
            OpCase::V => "V",
        })
    }
}

impl OpCase {
    /// Regularizing weight used for this potential.
    pub fn reg_kind(self) -> RegKind {
        match self {
            OpCase::II => RegKind::Delta,
            OpCase::I | OpCase::V => RegKind::Pi,
        }
    }
}

/// `S = −½Δ + Σ_{α∈Σ⁺} g_α² v(α(x))` with `v(ξ) = ξ⁻²`, `sinh⁻²ξ` or
/// `ξ⁻² + ω²ξ²`.
pub fn op_hamiltonian(rs: &RootSystem, g: &MultiplicityFunction, case: OpCase, omega: Option<f64>) -> Result<DiffOp> {
    let omega = match (case, omega) {
        (OpCase::V, Some(w)) => w,
        (OpCase::V, None) => return Err(Error::InvalidParameter("case V needs omega".into())),
        _ => 0.0,
    };
    let n = rs.ambient_dim();
    let mut op = DiffOp::laplacian(n)
        .scale(-0.5)
        .with_label(&format!("op{case}[{}]", rs.label()));
    let mut potential = Vec::new();
    for &i in rs.positive() {
        let l = Expr::linear(&rs.roots()[i]);
        let g2 = g.value(i).powi(2);
        let v = match case {
            OpCase::I => l.pow(-2),
            OpCase::II => l.sinh().pow(-2),
            OpCase::V => Expr::sum(vec![l.clone().pow(-2), l.pow(2).scale(omega * omega)]),
        };
        potential.push(v.scale(g2));
    }
    if !potential.is_empty() {
        op.add_term(&vec![0; n], &Expr::sum(potential))?;
    }
    Ok(op)
}

/// Calogero operator on `R^{n+1}` with the `A_n` roots.
pub fn calogero(n: usize, g: f64) -> Result<DiffOp> {
    if n == 0 {
        return Err(Error::InvalidParameter("calogero needs n ≥ 1".into()));
    }
    let rs = RootSystem::build(Family::A, n)?;
    let m = MultiplicityFunction::constant(&rs, g);
    Ok(op_hamiltonian(&rs, &m, OpCase::I, None)?.with_label(&format!("calogero({n},{g})")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftSign {
    Plus,
    Minus,
}

/// `c Δ_S(x)^{±1} ∏_{α∈S⁺} λ(x_α)` with `Δ_S = ∏_{α∈S⁺} sinh α`.
pub fn shift_symbol(
    rs: &RootSystem,
    orbit: &[usize],
    sign: ShiftSign,
    x: &[f64],
    lambda: &[f64],
    c: f64,
) -> Result<f64> {
    if !rs.is_reduced() {
        return Err(Error::InvalidParameter("shift symbols need a reduced root system".into()));
    }
    let n = rs.ambient_dim();
    if x.len() != n || lambda.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len().min(lambda.len()) });
    }
    let mut wanted = orbit.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    if !root_orbits(rs).iter().any(|o| *o == wanted) {
        return Err(Error::InvalidParameter("root subset is not a single orbit".into()));
    }
    let mut delta = 1.0;
    let mut prod = 1.0;
    for &i in rs.positive() {
        if wanted.binary_search(&i).is_err() {
            continue;
        }
        delta *= rs.evaluate(i, x).sinh();
        prod *= linalg::dot(lambda, &rs.coroot(i)?);
    }
    match sign {
        ShiftSign::Plus => Ok(c * delta * prod),
        ShiftSign::Minus => {
            if delta.abs() <= crate::diffop::POLE_TOL {
                return Err(Error::SingularPoint { x: x.to_vec() });
            }
            Ok(c * prod / delta)
        }
    }
}

/// A named operator with its regularization and factorization data.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Params,
    pub rs: RootSystem,
    /// The operator as written, possibly singular.
    pub op: DiffOp,
    /// Smooth-coefficient operator with attached factorization.
    pub regularized: DiffOp,
    /// Further regularizations that are only claimed at symbol level.
    pub symbol_variants: Vec<DiffOp>,
    pub theta: Vec<usize>,
    pub note: String,
}

struct Spec {
    name: &'static str,
    summary: &'static str,
    params: &'static [(&'static str, f64)],
    default_rs: &'static str,
    fixed_rs: bool,
    regularization: &'static str,
}

const REGISTRY: &[Spec] = &[
    Spec {
        name: "euler",
        summary: "x^2 d^2/dx^2 + a x d/dx + b",
        params: &[("a", 1.0), ("b", 0.0)],
        default_rs: "B1",
        fixed_rs: true,
        regularization: "none",
    },
    Spec {
        name: "xddx",
        summary: "x d/dx",
        params: &[],
        default_rs: "B1",
        fixed_rs: true,
        regularization: "none",
    },
    Spec {
        name: "jacobi1d",
        summary: "d^2/dx^2 + (a coth x + b coth 2x) d/dx",
        params: &[("a", 2.0), ("b", 1.0)],
        default_rs: "B1",
        fixed_rs: true,
        regularization: "delta^2",
    },
    Spec {
        name: "bessel1d",
        summary: "d^2/dx^2 + (a/x + b/(2x)) d/dx",
        params: &[("a", 2.0), ("b", 1.0)],
        default_rs: "B1",
        fixed_rs: true,
        regularization: "pi^2",
    },
    Spec {
        name: "hyperL",
        summary: "Laplacian + sum m_a coth a(x) d(y_a)",
        params: &[("m", 2.0)],
        default_rs: "A2",
        fixed_rs: false,
        regularization: "delta^2",
    },
    Spec {
        name: "besselL0",
        summary: "Laplacian + sum m_a a(x)^-1 d(y_a)",
        params: &[("m", 2.0)],
        default_rs: "A2",
        fixed_rs: false,
        regularization: "pi^2",
    },
    Spec {
        name: "calogero",
        summary: "-Laplacian/2 + g^2 sum a(x)^-2 on the A_n roots",
        params: &[("g", 1.0)],
        default_rs: "A2",
        fixed_rs: false,
        regularization: "pi^2",
    },
    Spec {
        name: "opI",
        summary: "-Laplacian/2 + sum g_a^2 a(x)^-2",
        params: &[("g", 1.0)],
        default_rs: "A2",
        fixed_rs: false,
        regularization: "pi^2",
    },
    Spec {
        name: "opII",
        summary: "-Laplacian/2 + sum g_a^2 sinh^-2 a(x)",
        params: &[("g", 1.0)],
        default_rs: "A2",
        fixed_rs: false,
        regularization: "delta^2",
    },
    Spec {
        name: "opV",
        summary: "-Laplacian/2 + sum g_a^2 (a(x)^-2 + omega^2 a(x)^2)",
        params: &[("g", 1.0), ("omega", 1.0)],
        default_rs: "A2",
        fixed_rs: false,
        regularization: "pi^2",
    },
];

/// Parse labels such as `A2`, `BC1`, `B3` or `I2(5)`.
pub fn root_system_from_label(label: &str) -> Result<RootSystem> {
    let s = label.trim();
    if let Some(rest) = s.strip_prefix("I2(").or_else(|| s.strip_prefix("i2(")) {
        let m = rest
            .strip_suffix(')')
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| Error::InvalidParameter(format!("bad root system label '{label}'")))?;
        return RootSystem::build(Family::I2, m);
    }
    let split = s
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| Error::InvalidParameter(format!("bad root system label '{label}'")))?;
    let family: Family = s[..split].parse()?;
    let rank: usize = s[split..]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad root system label '{label}'")))?;
    RootSystem::build(family, rank)
}

fn multiplicity(rs: &RootSystem, params: &Params, key: &str, default: f64) -> Result<MultiplicityFunction> {
    let orbits = root_orbits(rs);
    let per_orbit: Vec<Option<f64>> = (0..orbits.len())
        .map(|k| params.get(&format!("{key}{}", k + 1)).copied())
        .collect();
    let base = params.get(key).copied().unwrap_or(default);
    let values: Vec<f64> = per_orbit.iter().map(|v| v.unwrap_or(base)).collect();
    MultiplicityFunction::from_orbit_values(rs, &values)
}

fn check_params(spec: &Spec, rs: &RootSystem, params: &Params) -> Result<()> {
    let orbit_count = root_orbits(rs).len();
    for key in params.keys() {
        let known = spec.params.iter().any(|(k, _)| k == key)
            || spec.params.iter().any(|(k, _)| {
                key.strip_prefix(k)
                    .and_then(|r| r.parse::<usize>().ok())
                    .is_some_and(|j| (1..=orbit_count).contains(&j) && *k != "omega")
            });
        if !known {
            return Err(Error::InvalidParameter(format!("operator '{}' has no parameter '{key}'", spec.name)));
        }
    }
    Ok(())
}

fn param(spec: &Spec, params: &Params, key: &str) -> f64 {
    params
        .get(key)
        .copied()
        .or_else(|| spec.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
        .unwrap_or(0.0)
}

/// Registered operator names.
pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.name).collect()
}

/// Build a registered operator. `rs` defaults to the registry's root
/// system; rank-one operators accept only `B1`.
pub fn build_entry(name: &str, rs: Option<&RootSystem>, params: &Params) -> Result<CatalogEntry> {
    let spec = REGISTRY
        .iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownOperator(name.to_string()))?;
    let default_rs = root_system_from_label(spec.default_rs)?;
    let rs = match rs {
        Some(r) if spec.fixed_rs && (r.ambient_dim() != 1 || r.len() != 2) => {
            return Err(Error::InvalidParameter(format!("operator '{}' lives on the rank-one system B1", spec.name)));
        }
        Some(r) => r.clone(),
        None => default_rs,
    };
    check_params(spec, &rs, params)?;
    let all = rs.all_simple_positions();
    let n = rs.ambient_dim();
    let rank_one_fac = |k: u32, nexp: u32| {
        Factorization {
            p: DualPoly::power_1d(k),
            exponents: vec![(unit_root_index(&rs), nexp)],
            theta: all.clone(),
            rs: rs.clone(),
        }
    };
    let mut symbol_variants = Vec::new();
    let (op, regularized, note) = match spec.name {
        "euler" => {
            let op = euler(param(spec, params, "a"), param(spec, params, "b"));
            let reg = op.clone().with_factorization(rank_one_fac(2, 2));
            (op, reg, "regular; sigma = x^2 lambda^2".to_string())
        }
        "xddx" => {
            let op = x_ddx();
            let reg = op.clone().with_factorization(rank_one_fac(1, 1));
            (op, reg, "regular; sigma = x lambda".to_string())
        }
        "jacobi1d" => {
            let op = jacobi_1d(param(spec, params, "a"), param(spec, params, "b"));
            let reg = op.regularize(&rs, 1, RegKind::Delta)?.with_factorization(rank_one_fac(2, 2));
            (op, reg, "sinh^2 x L; P = (sinh x / x)^2 >= 1".to_string())
        }
        "bessel1d" => {
            let op = bessel_1d(param(spec, params, "a"), param(spec, params, "b"));
            let reg = op.regularize(&rs, 1, RegKind::Pi)?.with_factorization(rank_one_fac(2, 2));
            (op, reg, "x^2 L0; P = 1".to_string())
        }
        "hyperL" => {
            let m = multiplicity(&rs, params, "m", param(spec, params, "m"))?;
            let op = hyper_l(&rs, &m)?;
            let fac = factorization_on(&rs, &all, DualPoly::norm_squared(n), 2)?;
            let reg = op.regularize(&rs, 1, RegKind::Delta)?.with_factorization(fac);
            (op, reg, "delta^2 L; P = (delta/pi)^2".to_string())
        }
        "besselL0" => {
            let m = multiplicity(&rs, params, "m", param(spec, params, "m"))?;
            let op = bessel_l0(&rs, &m)?;
            let fac = factorization_on(&rs, &all, DualPoly::norm_squared(n), 2)?;
            let reg = op.regularize(&rs, 1, RegKind::Pi)?.with_factorization(fac);
            (op, reg, "pi^2 L0; P = 1".to_string())
        }
        "calogero" | "opI" | "opII" | "opV" => {
            let case = match spec.name {
                "opII" => OpCase::II,
                "opV" => OpCase::V,
                _ => OpCase::I,
            };
            if spec.name == "calogero" && rs.label().chars().next() != Some('A') {
                return Err(Error::InvalidParameter("calogero is defined on A_n".into()));
            }
            let g = multiplicity(&rs, params, "g", param(spec, params, "g"))?;
            let omega = (case == OpCase::V).then(|| param(spec, params, "omega"));
            let mut op = op_hamiltonian(&rs, &g, case, omega)?;
            if spec.name == "calogero" {
                op = op.with_label(&format!("calogero[{}]", rs.label()));
            }
            let kind = case.reg_kind();
            let fac = factorization_on(&rs, &all, DualPoly::norm_squared(n), 2)?;
            let reg = op.regularize(&rs, 1, kind)?.with_factorization(fac);
            if case == OpCase::I {
                let fac1 = factorization_on(&rs, &all, DualPoly::norm_squared(n), 1)?;
                symbol_variants.push(op.multiply_by_weyl(&rs, 1, RegKind::Pi)?.with_factorization(fac1));
            }
            let note = match case {
                OpCase::II => "delta^2 S; P = -(delta/pi)^2 / 2",
                _ => "pi^2 S; P = -1/2",
            };
            (op, reg, note.to_string())
        }
        _ => unreachable!("registry names are exhaustive"),
    };
    let mut full_params = Params::new();
    for (k, v) in spec.params {
        full_params.insert(k.to_string(), *v);
    }
    for (k, v) in params {
        full_params.insert(k.clone(), *v);
    }
    Ok(CatalogEntry {
        name: spec.name.to_string(),
        params: full_params,
        rs,
        op,
        regularized,
        symbol_variants,
        theta: all,
        note,
    })
}

/// Every registered operator with default parameters, plus the
/// multivariable ones on `B2` and `BC2` (non-reduced, two multiplicities).
pub fn default_entries() -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for spec in REGISTRY {
        out.push(build_entry(spec.name, None, &Params::new())?);
    }
    for label in ["B2", "BC2"] {
        let rs = root_system_from_label(label)?;
        for name in ["hyperL", "besselL0", "opI", "opII", "opV"] {
            out.push(build_entry(name, Some(&rs), &Params::new())?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpDescriptor {
    pub name: String,
    pub summary: String,
    pub parameters: BTreeMap<String, f64>,
    pub root_system: String,
    pub theta: Vec<usize>,
    pub singular_forms: Vec<Vec<f64>>,
    pub regularization: String,
}

/// JSON-ready description of each registered operator on its default
/// root system.
pub fn descriptors() -> Result<Vec<OpDescriptor>> {
    REGISTRY
        .iter()
        .map(|spec| {
            let e = build_entry(spec.name, None, &Params::new())?;
            Ok(OpDescriptor {
                name: spec.name.to_string(),
                summary: spec.summary.to_string(),
                parameters: e.params.clone(),
                root_system: e.rs.label().to_string(),
                theta: e.theta.iter().map(|t| t + 1).collect(),
                singular_forms: e.op.singular_forms(),
                regularization: spec.regularization.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::ExprFn;
    use crate::rootsys::{check_operator_equivariance, generate_group, Character};

    #[test]
    fn euler_examples() {
        let op = euler(0.0, 0.0);
        assert_eq!(op.principal_symbol(&[2.0], &[3.0]).unwrap(), 36.0);
        let f = ExprFn::new(Expr::coord(0).pow(2), 1);
        for x in [0.3, -1.7, 2.0] {
            assert!((op.apply_at(&f, &[x]).unwrap() - 2.0 * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_examples() {
        let op = jacobi_1d(1.0, 0.0);
        assert!((op.eval_coefficient(&[1], &[1.0]).unwrap() - 1.0f64.tanh().recip()).abs() < 1e-12);
        let e = build_entry("jacobi1d", None, &Params::from([("a".into(), 1.0), ("b".into(), 0.0)])).unwrap();
        let s = e.regularized.principal_symbol(&[1.0], &[1.0]).unwrap();
        assert!((s - 1.0f64.sinh().powi(2)).abs() < 1e-12);
        assert!(e.regularized.is_regular());
        assert!(e.op.principal_symbol(&[0.0], &[1.0]).is_err());
    }

    #[test]
    fn bessel_examples() {
        let e = build_entry("bessel1d", None, &Params::from([("a".into(), 1.0), ("b".into(), 0.0)])).unwrap();
        assert!((e.regularized.principal_symbol(&[2.0], &[1.0]).unwrap() - 4.0).abs() < 1e-12);
        let f = ExprFn::new(Expr::coord(0).pow(2), 1);
        for x in [0.5, 1.5, -2.0] {
            assert!((e.regularized.apply_at(&f, &[x]).unwrap() - 4.0 * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_specializations_match() {
        let bc1 = RootSystem::build(Family::BC, 1).unwrap();
        let (a, b) = (1.3, 0.8);
        // orbits ordered by smallest root index; find which is the long one
        let orbits = root_orbits(&bc1);
        let values: Vec<f64> = orbits
            .iter()
            .map(|o| if linalg::norm(&bc1.roots()[o[0]]) > 1.5 { b / 2.0 } else { a })
            .collect();
        let m = MultiplicityFunction::from_orbit_values(&bc1, &values).unwrap();
        let pairs = [(hyper_l(&bc1, &m).unwrap(), jacobi_1d(a, b)), (bessel_l0(&bc1, &m).unwrap(), bessel_1d(a, b))];
        for (multi, single) in pairs {
            for k in 0..50 {
                let x = -2.45 + 0.1 * k as f64;
                for idx in [[1u32], [2]] {
                    let u = multi.eval_coefficient(&idx, &[x]).unwrap();
                    let v = single.eval_coefficient(&idx, &[x]).unwrap();
                    assert!((u - v).abs() < 1e-12 * v.abs().max(1.0), "{x} {idx:?}");
                }
            }
        }
    }

    #[test]
    fn a2_hyper_symbol() {
        let e = build_entry("hyperL", None, &Params::new()).unwrap();
        let x = [0.9, 0.2, -1.1];
        let l = [0.3, -0.5, 0.2];
        let delta: f64 = e.rs.positive().iter().map(|&i| e.rs.evaluate(i, &x).sinh()).product();
        let s = e.regularized.principal_symbol(&x, &l).unwrap();
        assert!((s - linalg::dot(&l, &l) * delta * delta).abs() < 1e-12);
    }

    #[test]
    fn bessel_a2_symbol_value() {
        let e = build_entry("besselL0", None, &Params::new()).unwrap();
        let s = e.regularized.principal_symbol(&[2.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((s - 4.0).abs() < 1e-12);
    }

    #[test]
    fn calogero_examples() {
        let op = calogero(1, 1.0).unwrap();
        assert!((op.eval_coefficient(&[0, 0], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let rs = RootSystem::build(Family::A, 2).unwrap();
        let e = build_entry("calogero", Some(&rs), &Params::new()).unwrap();
        let x = [0.4, -0.3, 1.2];
        let l = [0.1, 0.7, -0.2];
        let pi: f64 = rs.positive().iter().map(|&i| rs.evaluate(i, &x)).product();
        let s = e.regularized.principal_symbol(&x, &l).unwrap();
        assert!((s + 0.5 * linalg::dot(&l, &l) * pi * pi).abs() < 1e-12);
        let m = MultiplicityFunction::constant(&rs, 1.0);
        let direct = op_hamiltonian(&rs, &m, OpCase::I, None).unwrap();
        let cal = calogero(2, 1.0).unwrap();
        assert!((direct.eval_coefficient(&[0, 0, 0], &x).unwrap() - cal.eval_coefficient(&[0, 0, 0], &x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn op_potentials() {
        let b1 = RootSystem::rank_one();
        let g = MultiplicityFunction::constant(&b1, 1.0);
        let v = op_hamiltonian(&b1, &g, OpCase::V, Some(1.0)).unwrap();
        assert!((v.eval_coefficient(&[0], &[2.0]).unwrap() - 4.25).abs() < 1e-12);
        let ii = op_hamiltonian(&b1, &g, OpCase::II, None).unwrap();
        assert!((ii.eval_coefficient(&[0], &[1.0]).unwrap() - 0.7240616).abs() < 1e-6);
        assert!("III".parse::<OpCase>().is_err());
        assert!(op_hamiltonian(&b1, &g, OpCase::V, None).is_err());
    }

    #[test]
    fn shift_symbol_examples() {
        let b1 = RootSystem::rank_one();
        let orbit = root_orbits(&b1)[0].clone();
        let v = shift_symbol(&b1, &orbit, ShiftSign::Plus, &[1.0], &[1.0], 1.0).unwrap();
        assert!((v - 2.0 * 1.0f64.sinh()).abs() < 1e-12);
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let orbit = root_orbits(&a2)[0].clone();
        let l = [1.0, 1.0, 0.0];
        assert_eq!(shift_symbol(&a2, &orbit, ShiftSign::Plus, &[0.3, 0.1, -0.4], &l, 1.0).unwrap(), 0.0);
        assert!(matches!(
            shift_symbol(&a2, &orbit, ShiftSign::Minus, &[0.3, 0.3, -0.6], &l, 1.0),
            Err(Error::SingularPoint { .. })
        ));
        let bc1 = RootSystem::build(Family::BC, 1).unwrap();
        assert!(shift_symbol(&bc1, &[0], ShiftSign::Plus, &[1.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn regularizations_are_smooth_and_factor() {
        for e in default_entries().unwrap() {
            assert!(e.regularized.is_regular(), "{}", e.name);
            let r = e.regularized.check_factorization(300, 5, 1e-12).unwrap();
            assert!(r.passed, "{} on {}: {r:?}", e.name, e.rs.label());
        }
    }

    #[test]
    fn entries_are_invariant() {
        for e in default_entries().unwrap() {
            let g = generate_group(&e.rs, 1000).unwrap();
            for op in [&e.op, &e.regularized] {
                let r = check_operator_equivariance(&g, op, Character::Trivial, 30, 9, 1e-8).unwrap();
                assert!(r.passed, "{} {}: {}", e.name, op.label(), r.max_deviation);
            }
        }
    }

    #[test]
    fn registry_lookup() {
        assert!(matches!(build_entry("nope", None, &Params::new()), Err(Error::UnknownOperator(_))));
        assert!(build_entry("jacobi1d", None, &Params::from([("q".into(), 1.0)])).is_err());
        assert!(build_entry("jacobi1d", Some(&root_system_from_label("A2").unwrap()), &Params::new()).is_err());
        assert_eq!(root_system_from_label("I2(5)").unwrap().len(), 10);
        assert_eq!(descriptors().unwrap().len(), names().len());
    }
}
