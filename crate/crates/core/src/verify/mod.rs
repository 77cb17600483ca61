//! Bumps with prescribed convex support, support estimation on grids and
//! hull comparison for `f` and `Df`.

mod scenarios;

use serde::{Deserialize, Serialize};

use crate::convexgeo::{convex_hull, hausdorff_report, is_invariant_body, ConvexBody, DEFAULT_DIRECTIONS_2D};
use crate::diffop::{
    apply_grid, distr_support_scan, DiffOp, FdOptions, Grid, PiecewiseDensity, SampledField, SmoothFn,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rootsys::{generate_group, parabolic_subgroup, RootSystem, ThetaCone, DEFAULT_GROUP_CAP};

pub use scenarios::{run_scenario, scenario_names, ScenarioResult, VerifyConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpMode {
    /// Average over `W_Θ`; `f` itself is invariant.
    Symmetrized,
    /// Sum of piece bumps; only the hull of the support is invariant.
    HullOnly,
}

/// Core polytopes `C_k ⊂ a_Θ`, a smoothing width `ε` and the region `Θ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpSpec {
    pub pieces: Vec<ConvexBody>,
    pub eps: f64,
    pub theta: Vec<usize>,
    pub mode: BumpMode,
}

impl BumpSpec {
    pub fn new(core: ConvexBody, eps: f64, theta: &[usize]) -> Self {
        BumpSpec { pieces: vec![core], eps, theta: theta.to_vec(), mode: BumpMode::Symmetrized }
    }

    pub fn hull_only(pieces: Vec<ConvexBody>, eps: f64, theta: &[usize]) -> Self {
        BumpSpec { pieces, eps, theta: theta.to_vec(), mode: BumpMode::HullOnly }
    }

    /// Hull of all pieces.
    pub fn core(&self) -> Result<ConvexBody> {
        let pts: Vec<Vec<f64>> = self.pieces.iter().flat_map(|p| p.vertices.iter().cloned()).collect();
        convex_hull(&pts)
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    fn phi(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-1.0 / t).exp()
        }
    }
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = phi(t);
        a / (a + phi(1.0 - t))
    }
}

/// Outward half-planes `n·x ≤ b` describing a body of dimension ≤ 2.
fn halfspaces(c: &ConvexBody) -> Result<Vec<(Vec<f64>, f64)>> {
    let v = &c.vertices;
    match c.ambient_dim {
        1 => {
            let lo = v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![(vec![1.0], hi), (vec![-1.0], -lo)])
        }
        2 => {
            let mut normals: Vec<Vec<f64>> = Vec::new();
            match c.affine_dim() {
                0 => {
                    normals = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
                }
                1 => {
                    let d = linalg::unit(&linalg::sub(&v[1], &v[0])).expect("distinct vertices");
                    let p = vec![-d[1], d[0]];
                    normals = vec![d.clone(), p.clone(), linalg::scale(&d, -1.0), linalg::scale(&p, -1.0)];
                }
                _ => {
                    let m = v.len() as f64;
                    let centroid = vec![v.iter().map(|p| p[0]).sum::<f64>() / m, v.iter().map(|p| p[1]).sum::<f64>() / m];
                    let mut order: Vec<usize> = (0..v.len()).collect();
                    let ang = |p: &Vec<f64>| (p[1] - centroid[1]).atan2(p[0] - centroid[0]);
                    order.sort_by(|&i, &j| ang(&v[i]).partial_cmp(&ang(&v[j])).unwrap());
                    for k in 0..order.len() {
                        let a = &v[order[k]];
                        let b = &v[order[(k + 1) % order.len()]];
                        let e = linalg::sub(b, a);
                        // counter-clockwise order: outward normal is e rotated by −90°
                        if let Some(nrm) = linalg::unit(&[e[1], -e[0]]) {
                            normals.push(nrm);
                        }
                    }
                }
            }
            Ok(normals
                .into_iter()
                .map(|nrm| {
                    let b = v.iter().map(|p| linalg::dot(&nrm, p)).fold(f64::NEG_INFINITY, f64::max);
                    (nrm, b)
                })
                .collect())
        }
        d => Err(Error::InvalidParameter(format!("bumps are implemented in dimensions 1 and 2, got {d}"))),
    }
}

/// Vertices of `{n_j·x ≤ b_j + ε}`.
fn offset_vertices(hs: &[(Vec<f64>, f64)], eps: f64) -> Vec<Vec<f64>> {
    if hs[0].0.len() == 1 {
        return hs.iter().map(|(n, b)| vec![n[0] * (b + eps)]).collect();
    }
    let mut sorted: Vec<&(Vec<f64>, f64)> = hs.iter().collect();
    sorted.sort_by(|a, b| a.0[1].atan2(a.0[0]).partial_cmp(&b.0[1].atan2(b.0[0])).unwrap());
    let m = sorted.len();
    (0..m)
        .filter_map(|k| {
            let (n1, b1) = sorted[k];
            let (n2, b2) = sorted[(k + 1) % m];
            let det = n1[0] * n2[1] - n1[1] * n2[0];
            if det.abs() < 1e-14 {
                return None;
            }
            let (c1, c2) = (b1 + eps, b2 + eps);
            Some(vec![(c1 * n2[1] - c2 * n1[1]) / det, (n1[0] * c2 - n2[0] * c1) / det])
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Piece {
    halfspaces: Vec<(Vec<f64>, f64)>,
}

impl Piece {
    fn value(&self, x: &[f64], eps: f64) -> f64 {
        let mut v = 1.0;
        for (n, b) in &self.halfspaces {
            v *= smooth_step((b + eps - linalg::dot(n, x)) / eps);
            if v == 0.0 {
                break;
            }
        }
        v
    }
}

/// A smooth function equal to 1 on the core pieces and vanishing outside
/// their facet offsets by `ε`.
#[derive(Clone, Debug)]
pub struct Bump {
    dim: usize,
    eps: f64,
    pieces: Vec<Piece>,
    /// Inverses of the averaging group elements.
    inverses: Vec<Matrix>,
    support: ConvexBody,
}

impl Bump {
    /// Hull of the exact support `⋃ W_Θ·P_ε`.
    pub fn support_hull(&self) -> &ConvexBody {
        &self.support
    }
}

impl SmoothFn for Bump {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for w in &self.inverses {
            let y = w.apply(x);
            total += self.pieces.iter().map(|p| p.value(&y, self.eps)).sum::<f64>();
        }
        total / self.inverses.len() as f64
    }

    fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some(self.support.bounding_box())
    }
}

/// Build the bump of `spec` for the root system `rs`; checks that the
/// offset polytopes lie in `a_Θ` and that the core hull is `W_Θ`-invariant.
pub fn make_bump(spec: &BumpSpec, rs: &RootSystem) -> Result<Bump> {
    if !(spec.eps > 0.0) {
        return Err(Error::InvalidParameter("bump width must be positive".into()));
    }
    if spec.pieces.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = rs.ambient_dim();
    if let Some(p) = spec.pieces.iter().find(|p| p.ambient_dim != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.ambient_dim });
    }
    let cone = ThetaCone::new(rs, &spec.theta)?;
    let mut pieces = Vec::new();
    let mut support_pts = Vec::new();
    for body in &spec.pieces {
        let hs = halfspaces(body)?;
        let verts = offset_vertices(&hs, spec.eps);
        if verts.iter().any(|v| !cone.contains(v)) {
            return Err(Error::BodyNotInRegion);
        }
        support_pts.extend(verts);
        pieces.push(Piece { halfspaces: hs });
    }
    let g = generate_group(rs, DEFAULT_GROUP_CAP)?;
    let wt = parabolic_subgroup(rs, &g, &spec.theta)?;
    let core = spec.core()?;
    let scale = core.vertices.iter().map(|v| linalg::norm(v)).fold(1.0, f64::max);
    if !is_invariant_body(&core, &wt, 1e-9 * scale) {
        return Err(Error::BodyNotInvariant);
    }
    let inverses = match spec.mode {
        BumpMode::Symmetrized => wt.elements.iter().map(|w| w.matrix.transpose()).collect(),
        BumpMode::HullOnly => vec![Matrix::identity(n)],
    };
    let mut all = Vec::new();
    for w in &wt.elements {
        for p in &support_pts {
            all.push(w.apply(p));
        }
    }
    let support = convex_hull(&all)?;
    Ok(Bump { dim: n, eps: spec.eps, pieces, inverses, support })
}

/// Grid points where `|value| > rel_threshold · max|value|`.
pub fn estimate_support(field: &SampledField, rel_threshold: f64) -> Result<Vec<Vec<f64>>> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidParameter("relative threshold must lie in (0,1)".into()));
    }
    let max = field.max_abs();
    if max <= 1e-300 {
        return Ok(Vec::new());
    }
    Ok(field
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > rel_threshold * max)
        .map(|(k, _)| field.grid.coords(k))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: Vec<usize>,
    pub h: f64,
    pub fd_order: usize,
    pub richardson: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub two_h: f64,
    pub eps: f64,
    pub halo: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub schema_version: u32,
    pub scenario: String,
    pub case: String,
    pub operator: String,
    pub grid: GridSpec,
    pub threshold: f64,
    pub hull_f: ConvexBody,
    pub hull_df: ConvexBody,
    pub hausdorff_distance: f64,
    pub directions: usize,
    pub budget: Budget,
    /// `hull_df ⊆ P_ε + (fd_order/2)·h` on the sampled directions, where
    /// `P_ε` is the exact support of the bump.
    pub contained: bool,
    pub passed: bool,
    pub seed: u64,
    /// Sampled `f` and `Df`, kept on request for CSV export.
    #[serde(skip)]
    pub fields: Option<Box<(SampledField, SampledField)>>,
}

/// Options for [`support_check`].
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub fd: FdOptions,
    pub rel_threshold: f64,
    pub directions: usize,
    /// Finite-difference halo; defaults to `(fd_order/2)·h`.
    pub halo: Option<f64>,
    pub seed: u64,
    pub keep_fields: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            fd: FdOptions::default(),
            rel_threshold: 1e-8,
            directions: DEFAULT_DIRECTIONS_2D,
            halo: None,
            seed: 0,
            keep_fields: false,
        }
    }
}

/// Sample `f` and `Df` on `grid`, estimate both supports and compare the
/// hulls against the budget `2h + ε + halo`.
pub fn support_check(
    op: &DiffOp,
    spec: &BumpSpec,
    rs: &RootSystem,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<SupportReport> {
    let bump = make_bump(spec, rs)?;
    let f = SampledField::sample(grid, &bump);
    let df = apply_grid(op, &bump, grid, opts.fd)?;
    let supp_f = estimate_support(&f, opts.rel_threshold)?;
    let supp_df = estimate_support(&df, opts.rel_threshold)?;
    let hull_f = convex_hull(&supp_f)?;
    let hull_df = convex_hull(&supp_df)?;
    let h = grid.h_max();
    let halo = opts.halo.unwrap_or(opts.fd.fd_order as f64 / 2.0 * h);
    let hd = hausdorff_report(&hull_f, &hull_df, opts.directions.max(20), opts.seed)?;
    let dirs = crate::convexgeo::sample_directions(grid.dim(), opts.directions.max(20), opts.seed);
    // locality: Df can only leak past supp f as far as the stencil reaches
    let reach = opts.fd.fd_order as f64 / 2.0 * h;
    let exact = bump.support_hull();
    let contained = dirs.iter().all(|l| hull_df.support(l) <= exact.support(l) + reach * (1.0 + 1e-9));
    let budget = Budget { two_h: 2.0 * h, eps: spec.eps, halo, total: 2.0 * h + spec.eps + halo };
    Ok(SupportReport {
        schema_version: crate::SCHEMA_VERSION,
        scenario: String::new(),
        case: String::new(),
        operator: op.label().to_string(),
        grid: GridSpec {
            lo: grid.lo.clone(),
            hi: grid.hi.clone(),
            points: grid.points.clone(),
            h,
            fd_order: opts.fd.fd_order,
            richardson: opts.fd.richardson,
        },
        threshold: opts.rel_threshold,
        passed: hd.distance <= budget.total,
        hausdorff_distance: hd.distance,
        directions: hd.directions,
        hull_f,
        hull_df,
        budget,
        contained,
        seed: opts.seed,
        fields: opts.keep_fields.then(|| Box::new((f, df))),
    })
}

/// One weak scan: flagged centres and their hull.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub operator: String,
    pub density: String,
    pub flagged: usize,
    /// `[min, max]` of flagged centres, absent when nothing is flagged.
    pub hull: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub schema_version: u32,
    pub probe_width: f64,
    pub centers: usize,
    pub center_range: [f64; 2],
    pub rel_threshold: f64,
    pub du: ScanSummary,
    pub u: ScanSummary,
    pub symmetric_du: ScanSummary,
    pub hausdorff_du_u: f64,
    /// Flagged centres of `Du` lie in `[1 − ε, 1 + ε]`.
    pub du_localized: bool,
    pub passed: bool,
}

fn scan_summary(op: &DiffOp, u: &PiecewiseDensity, name: &str, eps: f64, centers: &[Vec<f64>], thr: f64) -> Result<ScanSummary> {
    let r = distr_support_scan(op, u, eps, centers, thr)?;
    let xs: Vec<f64> = r.flagged.iter().map(|c| c[0]).collect();
    let hull = if xs.is_empty() {
        None
    } else {
        Some([xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)])
    };
    Ok(ScanSummary { operator: op.label().to_string(), density: name.to_string(), flagged: xs.len(), hull })
}

/// Weak scans of `x d/dx` on `χ_[0,1]` and `χ_[−1,1]` and of the identity
/// on `χ_[0,1]`; passes when the hull of `Du` is the single point 1 (up to
/// the probe width) and differs from the hull of `u` by at least 0.9.
pub fn counterexample_demo(probe_width: f64, centers: usize, lo: f64, hi: f64, rel_threshold: f64) -> Result<CounterexampleReport> {
    if centers < 2 || !(hi > lo) {
        return Err(Error::InvalidParameter("need at least two scan centres on a proper interval".into()));
    }
    let pts: Vec<Vec<f64>> = (0..centers)
        .map(|k| vec![lo + (hi - lo) * k as f64 / (centers - 1) as f64])
        .collect();
    let x_ddx = crate::catalog::x_ddx();
    let unit = PiecewiseDensity::indicator(&[0.0], &[1.0])?;
    let sym = PiecewiseDensity::indicator(&[-1.0], &[1.0])?;
    let du = scan_summary(&x_ddx, &unit, "chi[0,1]", probe_width, &pts, rel_threshold)?;
    let u = scan_summary(&DiffOp::identity(1).with_label("identity"), &unit, "chi[0,1]", probe_width, &pts, rel_threshold)?;
    // the symmetric indicator is scanned on the mirrored range
    let r = lo.abs().max(hi.abs());
    let sym_pts: Vec<Vec<f64>> = (0..centers)
        .map(|k| vec![-r + 2.0 * r * k as f64 / (centers - 1) as f64])
        .collect();
    let symmetric_du = scan_summary(&x_ddx, &sym, "chi[-1,1]", probe_width, &sym_pts, rel_threshold)?;
    let (hausdorff_du_u, du_localized) = match (du.hull, u.hull) {
        (Some(a), Some(b)) => {
            let d = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
            let tol = 1e-12;
            (d, a[0] >= 1.0 - probe_width - tol && a[1] <= 1.0 + probe_width + tol)
        }
        _ => (0.0, false),
    };
    Ok(CounterexampleReport {
        schema_version: crate::SCHEMA_VERSION,
        probe_width,
        centers,
        center_range: [lo, hi],
        rel_threshold,
        passed: du_localized && hausdorff_du_u >= 0.9,
        du,
        u,
        symmetric_du,
        hausdorff_du_u,
        du_localized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexgeo::eps_neighborhood;
    use crate::rootsys::Family;

    #[test]
    fn smooth_step_is_monotone_and_flat() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.2), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 1..100 {
            let v = smooth_step(k as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn rank_one_even_bump() {
        let rs = RootSystem::rank_one();
        let spec = BumpSpec::new(ConvexBody::interval(-1.0, 1.0).unwrap(), 0.1, &[0]);
        let b = make_bump(&spec, &rs).unwrap();
        assert_eq!(b.value(&[0.0]), 1.0);
        assert_eq!(b.value(&[1.1]), 0.0);
        assert!(b.value(&[1.09]) > 0.0);
        assert_eq!(b.value(&[0.7]), b.value(&[-0.7]));
        assert_eq!(b.support_hull().vertices, vec![vec![-1.1], vec![1.1]]);
    }

    #[test]
    fn bump_preconditions() {
        let rs = RootSystem::rank_one();
        // Θ = ∅: the region is the positive half-line
        let bad = BumpSpec::new(ConvexBody::interval(0.05, 1.0).unwrap(), 0.1, &[]);
        assert!(matches!(make_bump(&bad, &rs), Err(Error::BodyNotInRegion)));
        let lopsided = BumpSpec::new(ConvexBody::interval(-1.0, 2.0).unwrap(), 0.1, &[0]);
        assert!(matches!(make_bump(&lopsided, &rs), Err(Error::BodyNotInvariant)));
        let pieces = vec![ConvexBody::interval(1.0, 2.0).unwrap(), ConvexBody::interval(-2.0, -1.0).unwrap()];
        let b = make_bump(&BumpSpec::hull_only(pieces, 0.1, &[0]), &rs).unwrap();
        assert_eq!(b.value(&[0.0]), 0.0);
        assert_eq!(b.support_hull().vertices, vec![vec![-2.1], vec![2.1]]);
    }

    #[test]
    fn hexagon_bump_is_invariant() {
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let basis = linalg::sum_zero_basis(3);
        let rs = a2.restrict_to(&basis).unwrap();
        let g = generate_group(&rs, 100).unwrap();
        let hex = convex_hull(&g.orbit(&[0.9, 0.35])).unwrap();
        let b = make_bump(&BumpSpec::new(hex.clone(), 0.1, &[0, 1]), &rs).unwrap();
        let f = |x: &[f64]| b.value(x);
        let r = crate::rootsys::check_function_equivariance(&g, &f, crate::rootsys::Character::Trivial, 200, 1, 1e-12);
        assert!(r.passed);
        // support hull is the facet offset, which contains the rounded body
        let rounded = eps_neighborhood(&hex, 0.1).unwrap();
        for l in crate::convexgeo::sample_directions(2, 90, 0) {
            assert!(b.support_hull().support(&l) >= rounded.support(&l) - 1e-12);
        }
    }

    #[test]
    fn support_estimation() {
        let rs = RootSystem::rank_one();
        let b = make_bump(&BumpSpec::new(ConvexBody::interval(-0.9, 0.9).unwrap(), 0.1, &[0]), &rs).unwrap();
        let grid = Grid::cube(1, -2.0, 2.0, 401).unwrap();
        let f = SampledField::sample(&grid, &b);
        let s = estimate_support(&f, 1e-8).unwrap();
        let lo = s.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = s.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 1.0).abs() < 0.02 && (hi - 1.0).abs() < 0.02, "{lo} {hi}");
        let zero = SampledField { grid: grid.clone(), values: vec![0.0; grid.len()] };
        assert!(estimate_support(&zero, 1e-8).unwrap().is_empty());
        let noisy = SampledField { grid: grid.clone(), values: f.values.iter().map(|v| v + 1e-15).collect() };
        assert_eq!(estimate_support(&noisy, 1e-8).unwrap().len(), s.len());
        assert!(estimate_support(&f, 1.5).is_err());
    }

    #[test]
    fn counterexample() {
        let r = counterexample_demo(0.05, 401, -0.5, 1.5, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let u = r.u.hull.unwrap();
        assert!(u[0] <= 0.02 && u[1] >= 0.98);
        let s = r.symmetric_du.hull.unwrap();
        assert!((s[0] + 1.0).abs() <= 0.05 + 1e-12 && (s[1] - 1.0).abs() <= 0.05 + 1e-12);
    }
}
