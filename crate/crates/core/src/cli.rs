//! Command-line front end.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{self, Params};
use crate::diffop::DualPoly;
use crate::error::{Error, Result};
use crate::rootsys::{check_cone_lemma, generate_group, root_orbits, Family, RootSystem, ThetaCone};
use crate::verify::{run_scenario, scenario_names, ScenarioResult, VerifyConfig};
use crate::SCHEMA_VERSION;

#[derive(Parser, Debug)]
#[command(name = "wsupport", version, about = "Root systems, invariant singular operators and support checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a root system and print roots, group order and orbits.
    Roots(RootsArgs),
    /// Evaluate the principal symbol of a catalog operator.
    Symbol(SymbolArgs),
    /// Run support-theorem scenarios and write JSON reports.
    Verify(VerifyArgs),
    /// Operator catalog.
    Ops {
        #[command(subcommand)]
        action: OpsAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum OpsAction {
    /// List registered operators as JSON.
    List,
}

#[derive(Args, Debug)]
pub struct RootsArgs {
    /// A, B, C, D, BC or I2
    pub family: String,
    /// Rank (for I2, the dihedral order m)
    pub rank: usize,
    /// Comma-separated 1-based simple positions
    #[arg(long)]
    pub theta: Option<String>,
    /// Largest group to enumerate
    #[arg(long, default_value_t = crate::rootsys::DEFAULT_GROUP_CAP)]
    pub cap: usize,
    /// Cone-lemma sample count
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write JSON here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SymbolArgs {
    /// Operator name (see `ops list`)
    pub op: String,
    /// Root system label such as A2, B2, BC1 or I2(5)
    pub root_system: Option<String>,
    /// Operator parameter, `key=value`; repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Use the canonical regularization
    #[arg(long)]
    pub reg: bool,
    /// Point, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Covector, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub lam: Option<String>,
    /// Run the factorization check of the regularized operator
    #[arg(long)]
    pub factor: bool,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Scenario name, or `all`
    pub scenario: String,
    /// key=value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Configuration override, `key=value`; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Points per axis for every grid
    #[arg(long)]
    pub grid: Option<usize>,
    /// Grid spacing, or `auto` to derive it from --grid
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for report files
    #[arg(long, default_value = "reports")]
    pub out_dir: PathBuf,
    /// Also dump sampled f and Df as CSV
    #[arg(long)]
    pub csv: bool,
}

/// Parse argv and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Roots(a) => cmd_roots(&a),
        Command::Symbol(a) => cmd_symbol(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Ops { action: OpsAction::List } => {
            let v = json!({ "schema_version": SCHEMA_VERSION, "operators": catalog::descriptors()? });
            print_json(&v)?;
            Ok(0)
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("'{p}' is not a number")))
        })
        .collect()
}

fn parse_theta(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(Error::ThetaNotSubset(format!("'{p}' is not a 1-based simple position"))),
        })
        .collect()
}

fn parse_pairs(items: &[String]) -> Result<Vec<(String, String)>> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got '{kv}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn cmd_roots(a: &RootsArgs) -> Result<i32> {
    let family: Family = a
        .family
        .parse()
        .map_err(|_| Error::UnsupportedFamily { family: a.family.clone(), rank: a.rank })?;
    let rs = RootSystem::build(family, a.rank)?;
    let g = generate_group(&rs, a.cap)?;
    let roots: Vec<Value> = (0..rs.len())
        .map(|i| {
            Ok(json!({
                "index": i,
                "name": rs.root_name(i),
                "vector": rs.roots()[i],
                "coroot": rs.coroot(i)?,
                "positive": rs.positive().contains(&i),
                "simple": rs.simple().iter().position(|&s| s == i).map(|p| p + 1),
            }))
        })
        .collect::<Result<_>>()?;
    let orbits: Vec<Vec<String>> = root_orbits(&rs)
        .iter()
        .map(|o| o.iter().map(|&i| rs.root_name(i)).collect())
        .collect();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "root_system": rs.label(),
        "ambient_dim": rs.ambient_dim(),
        "rank": rs.rank(),
        "reduced": rs.is_reduced(),
        "crystallographic": rs.is_crystallographic(),
        "roots": roots,
        "group_order": g.order(),
        "orbits": orbits,
    });
    if let Some(t) = &a.theta {
        let theta = parse_theta(t)?;
        let cone = ThetaCone::new(&rs, &theta)?;
        let report = check_cone_lemma(&rs, &g, &theta, a.samples, a.seed)?;
        doc["theta"] = json!({
            "positions": theta.iter().map(|p| p + 1).collect::<Vec<_>>(),
            "inequalities": cone.strict_inequalities.iter().map(|&i| rs.root_name(i)).collect::<Vec<_>>(),
            "cone_lemma": report,
            "agreement": report.agreement_ratio(),
        });
    }
    match &a.out {
        Some(p) => write_atomic(p, format!("{}\n", serde_json::to_string_pretty(&doc)?).as_bytes())?,
        None => print_json(&doc)?,
    }
    Ok(0)
}

fn cmd_symbol(a: &SymbolArgs) -> Result<i32> {
    let rs = a.root_system.as_deref().map(catalog::root_system_from_label).transpose()?;
    let mut params = Params::new();
    for (k, v) in parse_pairs(&a.params)? {
        let v: f64 = v.parse().map_err(|_| Error::InvalidParameter(format!("parameter {k}: '{v}' is not a number")))?;
        params.insert(k, v);
    }
    let entry = catalog::build_entry(&a.op, rs.as_ref(), &params)?;
    let op = if a.reg { &entry.regularized } else { &entry.op };
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "operator": op.label(),
        "root_system": entry.rs.label(),
        "parameters": entry.params,
        "regularized": a.reg,
        "singular_forms": op.singular_forms(),
    });
    let mut code = 0;
    if let Some(xs) = &a.x {
        let x = parse_list(xs)?;
        let n = op.dim();
        let lam = match &a.lam {
            Some(l) => parse_list(l)?,
            None => {
                let mut l = vec![0.0; n];
                l[0] = 1.0;
                l
            }
        };
        if x.len() != n || lam.len() != n {
            return Err(Error::InvalidParameter(format!("--x and --lam need {n} components")));
        }
        let s = op.principal_symbol(&x, &lam)?;
        doc["x"] = json!(x);
        doc["lambda"] = json!(lam);
        doc["symbol"] = json!(s);
    }
    if a.factor {
        let r = entry.regularized.check_factorization(a.samples, a.seed, 1e-12)?;
        if !r.passed {
            code = 1;
        }
        doc["factorization"] = serde_json::to_value(&r)?;
        doc["factorization_p"] = serde_json::to_value(
            entry.regularized.factorization().map(|f| &f.p).unwrap_or(&DualPoly::constant(1.0, op.dim())),
        )?;
    }
    print_json(&doc)?;
    Ok(code)
}

/// Read a flat `key=value` file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Apply `key=value` overrides to a configuration; unknown keys and
/// ill-typed values are errors.
pub fn apply_overrides(config: &VerifyConfig, pairs: &[(String, String)]) -> Result<VerifyConfig> {
    let mut map = match serde_json::to_value(config)? {
        Value::Object(m) => m,
        _ => unreachable!("config serializes to an object"),
    };
    for (k, v) in pairs {
        let slot = map.get_mut(k).ok_or_else(|| Error::Config(format!("unknown key '{k}'")))?;
        let parsed = match slot {
            Value::Bool(_) => v.parse::<bool>().map(Value::from).ok(),
            Value::Number(n) if n.is_u64() => v.parse::<u64>().map(Value::from).ok(),
            Value::Number(_) => v.parse::<f64>().ok().and_then(|f| serde_json::Number::from_f64(f).map(Value::Number)),
            _ => Some(Value::from(v.as_str())),
        };
        *slot = parsed.ok_or_else(|| Error::Config(format!("bad value '{v}' for '{k}'")))?;
    }
    let mut out: VerifyConfig = serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(e.to_string()))?;
    out.keep_fields = config.keep_fields;
    out.validate()?;
    Ok(out)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let mut pairs = Vec::new();
    if let Some(p) = &a.config {
        pairs.extend(read_config_file(p)?);
    }
    pairs.extend(parse_pairs(&a.set)?);
    let mut config = apply_overrides(&VerifyConfig::default(), &pairs)?;
    if let Some(n) = a.grid {
        config.points_1d = n;
        config.points_2d = n;
    }
    match a.h.as_deref() {
        None | Some("auto") => {}
        Some(h) => {
            let h: f64 = h.parse().map_err(|_| Error::Config(format!("--h expects a number or 'auto', got '{h}'")))?;
            if !(h > 0.0) {
                return Err(Error::Config("--h must be positive".into()));
            }
            config.points_1d = (2.0 * config.extent_1d / h).round() as usize + 1;
            config.points_2d = (2.0 * config.extent_2d / h).round() as usize + 1;
        }
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    config.keep_fields = a.csv;
    config.validate()?;

    let names: Vec<&str> = if a.scenario == "all" {
        scenario_names().to_vec()
    } else if scenario_names().contains(&a.scenario.as_str()) {
        vec![a.scenario.as_str()]
    } else {
        return Err(Error::UnknownScenario(a.scenario.clone()));
    };
    let mut all_passed = true;
    let mut summary = BTreeMap::new();
    for name in names {
        let result = run_scenario(name, &config)?;
        write_result(&a.out_dir, &result, a.csv)?;
        all_passed &= result.passed;
        summary.insert(name.to_string(), result.passed);
        eprintln!("{name}: {}", if result.passed { "pass" } else { "FAIL" });
    }
    print_json(&json!({ "schema_version": SCHEMA_VERSION, "out_dir": a.out_dir, "passed": summary }))?;
    Ok(if all_passed { 0 } else { 1 })
}

fn write_result(dir: &Path, r: &ScenarioResult, csv: bool) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(r)?);
    write_atomic(&dir.join(format!("{}.json", r.scenario)), text.as_bytes())?;
    if csv {
        for rep in &r.reports {
            if let Some(fields) = &rep.fields {
                let case: String = rep.case.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
                for (tag, field) in [("f", &fields.0), ("df", &fields.1)] {
                    let mut buf = Vec::new();
                    field.write_csv(&mut buf)?;
                    write_atomic(&dir.join(format!("{}_{}_{}.csv", r.scenario, case, tag)), &buf)?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_are_strict() {
        let base = VerifyConfig::default();
        let c = apply_overrides(&base, &[("eps".into(), "0.2".into()), ("points_1d".into(), "101".into())]).unwrap();
        assert_eq!(c.eps, 0.2);
        assert_eq!(c.points_1d, 101);
        assert!(matches!(apply_overrides(&base, &[("esp".into(), "0.2".into())]), Err(Error::Config(_))));
        assert!(apply_overrides(&base, &[("points_1d".into(), "many".into())]).is_err());
        assert!(apply_overrides(&base, &[("eps".into(), "-1".into())]).is_err());
    }

    #[test]
    fn theta_is_one_based() {
        assert_eq!(parse_theta("1,2").unwrap(), vec![0, 1]);
        assert!(parse_theta("0").is_err());
        assert!(parse_theta("").unwrap().is_empty());
    }
}
