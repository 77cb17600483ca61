//! Named scenario bundles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{counterexample_demo, support_check, BumpSpec, CheckOptions, CounterexampleReport, SupportReport};
use crate::catalog::{self, factorization_on, Params};
use crate::convexgeo::{convex_hull, ConvexBody};
use crate::diffop::{DiffOp, DualPoly, FdOptions, Grid, RegKind};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rootsys::{generate_group, Family, RootSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub points_1d: usize,
    pub extent_1d: f64,
    pub points_2d: usize,
    pub extent_2d: f64,
    pub fd_order: usize,
    pub richardson: bool,
    pub threshold: f64,
    pub eps: f64,
    /// Halo added to the budget in rank one (the grid there is fine enough
    /// that none is needed).
    pub halo_1d: f64,
    pub directions: usize,
    pub probe_width: f64,
    pub scan_centers: usize,
    pub scan_threshold: f64,
    pub seed: u64,
    /// Keep sampled fields in memory for CSV export.
    #[serde(skip)]
    pub keep_fields: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            points_1d: 2001,
            extent_1d: 5.0,
            points_2d: 301,
            extent_2d: 3.0,
            fd_order: 4,
            richardson: false,
            threshold: 1e-8,
            eps: 0.1,
            halo_1d: 0.0,
            directions: 720,
            probe_width: 0.05,
            scan_centers: 401,
            scan_threshold: 1e-6,
            seed: 0,
            keep_fields: false,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("points_1d", self.points_1d as f64),
            ("extent_1d", self.extent_1d),
            ("points_2d", self.points_2d as f64),
            ("extent_2d", self.extent_2d),
            ("threshold", self.threshold),
            ("eps", self.eps),
            ("directions", self.directions as f64),
            ("probe_width", self.probe_width),
            ("scan_centers", self.scan_centers as f64),
            ("scan_threshold", self.scan_threshold),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{k} must be positive")));
            }
        }
        if self.halo_1d < 0.0 {
            return Err(Error::Config("halo_1d must be non-negative".into()));
        }
        if self.fd_order != 2 && self.fd_order != 4 {
            return Err(Error::Config("fd_order must be 2 or 4".into()));
        }
        if self.threshold >= 1.0 || self.scan_threshold >= 1.0 {
            return Err(Error::Config("thresholds must be below 1".into()));
        }
        if self.points_1d < 3 || self.points_2d < 3 {
            return Err(Error::Config("grids need at least 3 points per axis".into()));
        }
        Ok(())
    }

    fn options(&self, halo: Option<f64>) -> CheckOptions {
        CheckOptions {
            fd: FdOptions { fd_order: self.fd_order, richardson: self.richardson },
            rel_threshold: self.threshold,
            directions: self.directions,
            halo,
            seed: self.seed,
            keep_fields: self.keep_fields,
        }
    }

    fn grid_1d(&self) -> Result<Grid> {
        Grid::cube(1, -self.extent_1d, self.extent_1d, self.points_1d)
    }

    fn grid_2d(&self) -> Result<Grid> {
        Grid::cube(2, -self.extent_2d, self.extent_2d, self.points_2d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub schema_version: u32,
    pub scenario: String,
    pub config: VerifyConfig,
    pub reports: Vec<SupportReport>,
    pub counterexample: Option<CounterexampleReport>,
    pub passed: bool,
}

const NAMES: &[&str] = &[
    "rank1-abc",
    "jacobi-1d",
    "bessel-1d",
    "calogero-A2",
    "hyper-A2",
    "bessel-A2",
    "theta-halfspace",
    "counterexample",
];

pub fn scenario_names() -> &'static [&'static str] {
    NAMES
}

struct Case {
    label: &'static str,
    op: DiffOp,
    rs: RootSystem,
    spec: BumpSpec,
}

/// `B1` with the negative root declared simple, so that the chamber is the
/// negative half-line.
fn mirrored_rank_one() -> Result<RootSystem> {
    RootSystem::from_parts("B1-", 1, vec![vec![1.0], vec![-1.0]], vec![1])
}

fn interval(lo: f64, hi: f64) -> ConvexBody {
    ConvexBody::interval(lo, hi).expect("finite endpoints")
}

/// Cases (a) support in the positive half-line, (b) its mirror image and
/// (c) a symmetric support.
fn rank_one_cases(op: &DiffOp, eps: f64, symmetric: Option<ConvexBody>) -> Result<Vec<Case>> {
    let b1 = RootSystem::rank_one();
    let c = match symmetric {
        Some(body) => BumpSpec::new(body, eps, &[0]),
        None => BumpSpec::hull_only(vec![interval(1.0, 2.0), interval(-2.0, -1.0)], eps, &[0]),
    };
    Ok(vec![
        Case { label: "a", op: op.clone(), rs: b1.clone(), spec: BumpSpec::new(interval(1.0, 2.0), eps, &[]) },
        Case { label: "b", op: op.clone(), rs: mirrored_rank_one()?, spec: BumpSpec::new(interval(-2.0, -1.0), eps, &[]) },
        Case { label: "c", op: op.clone(), rs: b1, spec: c },
    ])
}

/// `A2` in orthonormal coordinates of the sum-zero plane.
pub(crate) fn a2_plane() -> Result<RootSystem> {
    RootSystem::build(Family::A, 2)?.restrict_to(&linalg::sum_zero_basis(3))
}

fn hexagon(rs: &RootSystem) -> Result<ConvexBody> {
    let g = generate_group(rs, 100)?;
    convex_hull(&g.orbit(&[0.9, 0.35]))
}

fn plane_case(name: &str, params: &[(&str, f64)], eps: f64) -> Result<Case> {
    let rs = a2_plane()?;
    let params: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let entry = catalog::build_entry(name, Some(&rs), &params)?;
    let spec = BumpSpec::new(hexagon(&rs)?, eps, &rs.all_simple_positions());
    Ok(Case { label: "hexagon", op: entry.regularized, rs, spec })
}

fn theta_case(eps: f64) -> Result<Case> {
    let rs = a2_plane()?;
    let basis = linalg::sum_zero_basis(3);
    // W_Θ-orbits (swap of the first two coordinates) inside a_Θ
    let pts: Vec<Vec<f64>> = [[1.0, 0.4, -1.4], [0.4, 1.0, -1.4], [0.9, 0.7, -1.6], [0.7, 0.9, -1.6]]
        .iter()
        .map(|p| basis.apply_transpose(p))
        .collect();
    let body = convex_hull(&pts)?;
    let params: Params = [("m".to_string(), 2.0)].into_iter().collect();
    let theta = [0];
    let op = catalog::build_entry("hyperL", Some(&rs), &params)?
        .op
        .regularize(&rs, 1, RegKind::Delta)?
        .with_factorization(factorization_on(&rs, &theta, DualPoly::norm_squared(2), 2)?);
    Ok(Case { label: "theta={1}", op, rs, spec: BumpSpec::new(body, eps, &theta) })
}

fn run_cases(scenario: &str, cases: Vec<Case>, grid: &Grid, opts: &CheckOptions) -> Result<Vec<SupportReport>> {
    let out: Result<Vec<SupportReport>> = cases
        .par_iter()
        .map(|c| {
            let mut r = support_check(&c.op, &c.spec, &c.rs, grid, opts)?;
            r.scenario = scenario.to_string();
            r.case = c.label.to_string();
            Ok(r)
        })
        .collect();
    out
}

/// Run a registered scenario bundle.
pub fn run_scenario(name: &str, config: &VerifyConfig) -> Result<ScenarioResult> {
    config.validate()?;
    let eps = config.eps;
    let opts_1d = config.options(Some(config.halo_1d));
    let opts_2d = config.options(None);
    let mut counterexample = None;
    let reports = match name {
        "rank1-abc" => {
            let cases = rank_one_cases(&catalog::x_ddx(), eps, None)?;
            run_cases(name, cases, &config.grid_1d()?, &opts_1d)?
        }
        "jacobi-1d" | "bessel-1d" => {
            let op_name = if name == "jacobi-1d" { "jacobi1d" } else { "bessel1d" };
            let params: Params = [("a".to_string(), 2.0), ("b".to_string(), 1.0)].into_iter().collect();
            let op = catalog::build_entry(op_name, None, &params)?.regularized;
            let cases = rank_one_cases(&op, eps, Some(interval(-2.0, 2.0)))?;
            run_cases(name, cases, &config.grid_1d()?, &opts_1d)?
        }
        "calogero-A2" => run_cases(name, vec![plane_case("calogero", &[("g", 1.0)], eps)?], &config.grid_2d()?, &opts_2d)?,
        "hyper-A2" => run_cases(name, vec![plane_case("hyperL", &[("m", 2.0)], eps)?], &config.grid_2d()?, &opts_2d)?,
        "bessel-A2" => run_cases(name, vec![plane_case("besselL0", &[("m", 2.0)], eps)?], &config.grid_2d()?, &opts_2d)?,
        "theta-halfspace" => run_cases(name, vec![theta_case(eps)?], &config.grid_2d()?, &opts_2d)?,
        "counterexample" => {
            counterexample = Some(counterexample_demo(
                config.probe_width,
                config.scan_centers,
                -0.5,
                1.5,
                config.scan_threshold,
            )?);
            Vec::new()
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    let passed = reports.iter().all(|r| r.passed && r.contained) && counterexample.as_ref().map_or(true, |c| c.passed);
    Ok(ScenarioResult {
        schema_version: crate::SCHEMA_VERSION,
        scenario: name.to_string(),
        config: config.clone(),
        reports,
        counterexample,
        passed,
    })
}
