use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CoxeterGroup, RootSystem};
use crate::error::Result;
use crate::linalg;

/// The open cone `a_Θ = {x : α(x) > 0 for α ∈ Σ⁺ \ ⟨Θ⟩⁺}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaCone {
    /// Simple positions making up Θ.
    pub theta: Vec<usize>,
    /// Root indices whose positivity defines the cone.
    pub strict_inequalities: Vec<usize>,
    /// Dual vectors of those roots, in the same order.
    pub forms: Vec<Vec<f64>>,
}

impl ThetaCone {
    pub fn new(rs: &RootSystem, theta: &[usize]) -> Result<Self> {
        rs.check_theta(theta)?;
        let mut theta = theta.to_vec();
        theta.sort_unstable();
        let strict_inequalities = if theta.is_empty() {
            // positivity on Π already forces positivity on Σ⁺
            rs.simple().to_vec()
        } else {
            rs.theta_complement_positive(&theta)
        };
        let forms = strict_inequalities.iter().map(|&i| rs.roots()[i].clone()).collect();
        Ok(ThetaCone { theta, strict_inequalities, forms })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.forms.iter().all(|y| linalg::dot(y, x) > 0.0)
    }

    /// Membership in the closure, with slack.
    pub fn contains_closed(&self, x: &[f64], slack: f64) -> bool {
        self.forms.iter().all(|y| linalg::dot(y, x) >= -slack)
    }

    /// `min α(x)` over the defining forms divided by `|y_α|`: the distance
    /// to the nearest wall when positive. `+∞` when there are no walls.
    pub fn wall_margin(&self, x: &[f64]) -> f64 {
        self.forms
            .iter()
            .map(|y| linalg::dot(y, x) / linalg::norm(y))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Move `x` into `{α(x) ≥ 0 : α ∈ Θ}` with simple reflections from Θ.
pub(crate) fn theta_dominant(rs: &RootSystem, theta: &[usize], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    // bounded by the length of the longest element; the cap only guards
    // against non-finite input
    for _ in 0..100_000 {
        let neg = theta.iter().copied().find(|&p| rs.evaluate(rs.simple()[p], &y) < 0.0);
        match neg {
            Some(p) => y = rs.reflect(rs.simple()[p], &y).expect("simple index valid"),
            None => break,
        }
    }
    y
}

/// Membership in `W_Θ · closure(a⁺)`.
pub fn in_theta_orbit_of_chamber(rs: &RootSystem, theta: &[usize], x: &[f64], slack: f64) -> bool {
    let y = theta_dominant(rs, theta, x);
    rs.simple().iter().all(|&s| rs.evaluate(s, &y) >= -slack)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeLemmaReport {
    pub theta: Vec<usize>,
    pub samples: usize,
    pub excluded_near_wall: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub box_half_width: f64,
    pub seed: u64,
}

impl ConeLemmaReport {
    pub fn agreement_ratio(&self) -> f64 {
        let tested = self.agreements + self.disagreements;
        if tested == 0 {
            1.0
        } else {
            self.agreements as f64 / tested as f64
        }
    }
}

/// Compare `closure(W_Θ · closure(a⁺))` with the dual cone
/// `{x : α(x) ≥ 0, α ∈ Σ⁺ \ ⟨Θ⟩⁺}` on uniform samples from `[-5,5]^n`.
/// Points within `1e-9` of any root hyperplane are skipped.
pub fn check_cone_lemma(
    rs: &RootSystem,
    _group: &CoxeterGroup,
    theta: &[usize],
    num_samples: usize,
    seed: u64,
) -> Result<ConeLemmaReport> {
    let cone = ThetaCone::new(rs, theta)?;
    let half = 5.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rs.ambient_dim();
    let mut report = ConeLemmaReport {
        theta: cone.theta.clone(),
        samples: num_samples,
        excluded_near_wall: 0,
        agreements: 0,
        disagreements: 0,
        box_half_width: half,
        seed,
    };
    for _ in 0..num_samples {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-half..half)).collect();
        if rs.roots().iter().any(|y| linalg::dot(y, &x).abs() < 1e-9) {
            report.excluded_near_wall += 1;
            continue;
        }
        let lhs = in_theta_orbit_of_chamber(rs, &cone.theta, &x, 0.0);
        let rhs = cone.contains_closed(&x, 0.0);
        if lhs == rhs {
            report.agreements += 1;
        } else {
            report.disagreements += 1;
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeylProduct {
    /// `π_Θ = ∏_{⟨Θ⟩⁺} α`
    Pi,
    /// `δ_Θ = ∏_{⟨Θ⟩⁺} sinh α`
    Delta,
    /// `δ_Θᶜ = ∏_{Σ⁺ \ ⟨Θ⟩⁺} sinh α`
    DeltaComplement,
    /// `π = ∏_{Σ⁺} α`
    PiFull,
    /// `δ = ∏_{Σ⁺} sinh α`
    DeltaFull,
}

impl WeylProduct {
    /// Root indices the product runs over.
    pub fn roots(self, rs: &RootSystem, theta: &[usize]) -> Vec<usize> {
        match self {
            WeylProduct::Pi | WeylProduct::Delta => rs.theta_positive(theta),
            WeylProduct::DeltaComplement => rs.theta_complement_positive(theta),
            WeylProduct::PiFull | WeylProduct::DeltaFull => rs.positive().to_vec(),
        }
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, WeylProduct::Delta | WeylProduct::DeltaComplement | WeylProduct::DeltaFull)
    }
}

/// Evaluate one of the Weyl products at `x`. Empty products are 1.
pub fn weyl_product(rs: &RootSystem, theta: &[usize], kind: WeylProduct, x: &[f64]) -> Result<f64> {
    rs.check_theta(theta)?;
    let hyperbolic = kind.is_hyperbolic();
    Ok(kind
        .roots(rs, theta)
        .into_iter()
        .map(|i| {
            let a = rs.evaluate(i, x);
            if hyperbolic {
                a.sinh()
            } else {
                a
            }
        })
        .product())
}
