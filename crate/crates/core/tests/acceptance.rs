//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::num::NonZeroUsize;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsupport::catalog::{self, CatalogEntry};
use wsupport::convexgeo::{convex_hull, sample_directions};
use wsupport::diffop::{composite_gauss, DiffOp, SmoothFn};
use wsupport::rootsys::{check_cone_lemma, generate_group, Family, RootSystem, ThetaCone, DEFAULT_GROUP_CAP};
use wsupport::verify::{counterexample_demo, run_scenario, VerifyConfig};
use wsupport::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn c1_counterexample() -> Result<Outcome> {
    let t = Instant::now();
    let r = counterexample_demo(0.05, 401, -0.5, 1.5, 1e-6)?;
    let el = t.elapsed();
    let du = r.du.hull.unwrap_or([f64::NAN, f64::NAN]);
    let u = r.u.hull.unwrap_or([f64::NAN, f64::NAN]);
    let ok = du[0] >= 0.95 - 1e-12
        && du[1] <= 1.05 + 1e-12
        && u[0] <= 0.02
        && u[1] >= 0.98
        && el < Duration::from_secs(5);
    Ok(outcome(ok, format!("hull(Du)=[{:.3},{:.3}] hull(u)=[{:.3},{:.3}] in {:.2}s", du[0], du[1], u[0], u[1], secs(el))))
}

fn scenario_line(names: &[&str], limit: Duration, expect_cases: usize) -> Result<Outcome> {
    let config = VerifyConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        let t = Instant::now();
        let r = run_scenario(name, &config)?;
        let el = t.elapsed();
        ok &= r.reports.len() == expect_cases && el < limit;
        for rep in &r.reports {
            ok &= rep.passed && rep.contained && rep.hausdorff_distance <= rep.budget.total;
            parts.push(format!("{}/{} d={:.3}<={:.3}", name, rep.case, rep.hausdorff_distance, rep.budget.total));
        }
        parts.push(format!("{name} {:.2}s", secs(el)));
    }
    Ok(outcome(ok, parts.join(", ")))
}

fn c2_rank_one() -> Result<Outcome> {
    // each scenario runs its three cases; the limit is per case
    scenario_line(&["rank1-abc", "jacobi-1d"], Duration::from_secs(10), 3)
}

fn c3_plane() -> Result<Outcome> {
    scenario_line(&["hyper-A2", "bessel-A2", "calogero-A2"], Duration::from_secs(60), 1)
}

fn c4_parabolic() -> Result<Outcome> {
    scenario_line(&["theta-halfspace"], Duration::from_secs(60), 1)
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0..1u32 << n).map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect()).collect()
}

fn c5_cone_lemma() -> Result<Outcome> {
    let t = Instant::now();
    let mut disagreements = 0;
    let mut tested = 0;
    let mut runs = 0;
    for label in ["A2", "B2", "I2(5)"] {
        let rs = catalog::root_system_from_label(label)?;
        let g = generate_group(&rs, DEFAULT_GROUP_CAP)?;
        for theta in subsets(rs.rank()) {
            let r = check_cone_lemma(&rs, &g, &theta, 10_000, 11)?;
            disagreements += r.disagreements;
            tested += r.agreements + r.disagreements;
            runs += 1;
        }
    }
    let el = t.elapsed();
    Ok(outcome(
        disagreements == 0 && el < Duration::from_secs(5),
        format!("{runs} (system, theta) pairs, {tested} points, {disagreements} disagreements in {:.2}s", secs(el)),
    ))
}

fn all_operators(entries: &[CatalogEntry]) -> Vec<(&CatalogEntry, &DiffOp)> {
    entries
        .iter()
        .flat_map(|e| std::iter::once(&e.op).chain(std::iter::once(&e.regularized)).chain(&e.symbol_variants).map(move |d| (e, d)))
        .collect()
}

/// A point whose distance to every root hyperplane exceeds `margin`.
fn regular_point(rng: &mut ChaCha8Rng, rs: &RootSystem, margin: f64) -> Vec<f64> {
    let cone = ThetaCone::new(rs, &[]).expect("empty theta");
    let n = rs.ambient_dim();
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        if cone.wall_margin(&x) > margin {
            return x;
        }
    }
}

/// `∏ (1 - t_i²)^4` with `t = (x - c)/r`: a C³ bump whose products are
/// polynomial on the overlap of two supports, so Gauss rules resolve the
/// pairing integrals to rounding.
struct PolyBump {
    center: Vec<f64>,
    radii: Vec<f64>,
}

const POLY_BUMP: [f64; 9] = [1.0, 0.0, -4.0, 0.0, 6.0, 0.0, -4.0, 0.0, 1.0];

impl PolyBump {
    fn new(center: &[f64], radius: f64) -> Self {
        PolyBump { center: center.to_vec(), radii: vec![radius; center.len()] }
    }

    fn profile(t: f64, k: usize) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let mut c = POLY_BUMP.to_vec();
        for _ in 0..k {
            c = c.iter().enumerate().skip(1).map(|(j, a)| j as f64 * a).collect();
        }
        c.iter().rev().fold(0.0, |acc, a| acc * t + a)
    }
}

impl SmoothFn for PolyBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (0..x.len()).map(|i| Self::profile((x[i] - self.center[i]) / self.radii[i], 0)).product()
    }

    fn derivative(&self, x: &[f64], alpha: &[u32]) -> Option<f64> {
        if alpha.iter().any(|&k| k > 3) {
            return None;
        }
        Some(
            (0..x.len())
                .map(|i| {
                    let k = alpha[i] as usize;
                    Self::profile((x[i] - self.center[i]) / self.radii[i], k) / self.radii[i].powi(k as i32)
                })
                .product(),
        )
    }

    fn support_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let lo = self.center.iter().zip(&self.radii).map(|(c, r)| c - r).collect();
        let hi = self.center.iter().zip(&self.radii).map(|(c, r)| c + r).collect();
        Some((lo, hi))
    }
}

fn pairing(op: &DiffOp, f: &PolyBump, g: &PolyBump, rule: &GaussLegendre) -> Result<f64> {
    let lo: Vec<f64> = f.center.iter().zip(&g.center).zip(&f.radii).map(|((a, b), r)| a.max(*b) - r).collect();
    let hi: Vec<f64> = f.center.iter().zip(&g.center).zip(&f.radii).map(|((a, b), r)| a.min(*b) + r).collect();
    composite_gauss(rule, &lo, &hi, 2, &|x| Ok(op.apply_at(f, x)? * g.value(x)))
}

fn c6_symbol_algebra() -> Result<Outcome> {
    let entries = catalog::default_entries()?;
    let ops = all_operators(&entries);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_sym: f64 = 0.0;
    let mut sym_ok = true;
    for (e, d) in &ops {
        let dt = d.transpose();
        let sign = if d.order() % 2 == 0 { 1.0 } else { -1.0 };
        for _ in 0..100 {
            let x = regular_point(&mut rng, &e.rs, 0.05);
            let lam: Vec<f64> = (0..d.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = d.principal_symbol(&x, &lam)?;
            let b = dt.principal_symbol(&x, &lam)?;
            let err = (b - sign * a).abs() / a.abs().max(1.0);
            worst_sym = worst_sym.max(err);
            sym_ok &= err <= 1e-9;
        }
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(12).unwrap());
    let radius = 0.35;
    let mut worst_quad: f64 = 0.0;
    let mut pairs = 0;
    for e in &entries {
        for d in [&e.op, &e.regularized] {
            let dt = d.transpose();
            let n = d.dim();
            let margin = radius * (n as f64).sqrt() * 2.0 + 0.1;
            for _ in 0..10 {
                let c = regular_point(&mut rng, &e.rs, margin);
                let c2: Vec<f64> = c.iter().map(|v| v + rng.gen_range(-0.15..0.15)).collect();
                let f = PolyBump::new(&c, radius);
                let g = PolyBump::new(&c2, radius);
                let lhs = pairing(d, &f, &g, &rule)?;
                let rhs = pairing(&dt, &g, &f, &rule)?;
                let err = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-12);
                worst_quad = worst_quad.max(err);
                pairs += 1;
            }
        }
    }
    Ok(outcome(
        sym_ok && worst_quad <= 1e-6,
        format!(
            "{} operators, max symbol error {:.1e}; {} bump pairs, max relative pairing error {:.1e}",
            ops.len(),
            worst_sym,
            pairs,
            worst_quad
        ),
    ))
}

fn c7_factorization() -> Result<Outcome> {
    let entries = catalog::default_entries()?;
    let mut ok = true;
    let mut min_abs = f64::INFINITY;
    let mut jacobi_min = f64::NAN;
    for e in &entries {
        let r = e.regularized.check_factorization(1000, 7, 1e-12)?;
        ok &= r.passed && r.min_abs_p > 0.0;
        min_abs = min_abs.min(r.min_abs_p);
        if e.name == "jacobi1d" {
            jacobi_min = r.min_p;
            ok &= r.min_p >= 1.0 - 1e-9;
        }
    }
    Ok(outcome(
        ok,
        format!("{} regularized operators, min |P| {:.3e}, jacobi1d min P {:.12}", entries.len(), min_abs, jacobi_min),
    ))
}

fn c8_oracles() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    let cases: Vec<(Family, usize, usize)> = [(Family::A, 2, 6), (Family::A, 3, 24), (Family::B, 3, 48)]
        .into_iter()
        .chain((2..=8).map(|m| (Family::I2, m, 2 * m)))
        .collect();
    for (family, rank, expected) in cases {
        let g = generate_group(&RootSystem::build(family, rank)?, DEFAULT_GROUP_CAP)?;
        ok &= g.order() == expected;
        parts.push(format!("{family}{rank}:{}", g.order()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for dim in 1..=3 {
        for _ in 0..5 {
            let pts: Vec<Vec<f64>> = (0..40).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            let hull = convex_hull(&pts)?;
            for l in sample_directions(dim, 100, rng.gen()) {
                let brute = pts.iter().map(|p| p.iter().zip(&l).map(|(a, b)| a * b).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
                worst = worst.max((hull.support(&l) - brute).abs());
            }
        }
    }
    ok &= worst <= 1e-9;
    Ok(outcome(ok, format!("orders {}; hull support error {:.1e}", parts.join(" "), worst)))
}

fn run_verify(dir: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_wsupport"))
        .args(["verify", "all", "--seed", "42", "--out-dir"])
        .arg(dir)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn c9_determinism() -> Result<Outcome> {
    let a = tempfile::tempdir()?;
    let b = tempfile::tempdir()?;
    let ok_a = run_verify(a.path());
    let ok_b = run_verify(b.path());
    let mut files = 0;
    let mut identical = true;
    let mut entries: Vec<_> = std::fs::read_dir(a.path())?.collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in &entries {
        let x = std::fs::read(e.path())?;
        let y = std::fs::read(b.path().join(e.file_name())).unwrap_or_default();
        identical &= x == y;
        files += 1;
    }
    let expected = wsupport::verify::scenario_names().len();
    Ok(outcome(
        ok_a && ok_b && identical && files == expected,
        format!("{files} report files from two runs, identical: {identical}"),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("counterexample reproduction", c1_counterexample),
        ("rank-1 support theorem", c2_rank_one),
        ("A2 plane support theorem", c3_plane),
        ("parabolic case", c4_parabolic),
        ("cone lemma", c5_cone_lemma),
        ("symbol algebra", c6_symbol_algebra),
        ("factorization", c7_factorization),
        ("group and hull oracles", c8_oracles),
        ("determinism", c9_determinism),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!("criterion {} {}: {} ({})", k + 1, name, if passed { "PASS" } else { "FAIL" }, detail);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
