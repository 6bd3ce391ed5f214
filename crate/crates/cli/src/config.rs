//! Run configuration: JSON schema, flag overrides and resolved defaults.

use std::f64::consts::SQRT_2;
use std::path::Path;

use levy_liouville::generator::MCConfig;
use levy_liouville::structure::{default_halfwidth, SearchParams};
use levy_liouville::{validate_triplet, Bernstein, Growth, Psi, Triplet, TripletSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloInput {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub paths: Option<usize>,
    #[serde(default)]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StripPoint {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Candidate harmonic function for `check-harmonic`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CandidateSpec {
    /// `cos(γ·x)` on its own torus, checked spectrally
    Trig { gamma: Vec<f64> },
    /// `e^{η·x}`, checked by Monte Carlo at the probe points
    Exponential { eta: Vec<f64> },
}

/// Expected outcomes, used by `examples`.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default)]
    pub verdict: Option<String>,
    #[serde(default)]
    pub trig_witness: Option<Vec<f64>>,
    #[serde(default)]
    pub strong_verdict: Option<String>,
    #[serde(default)]
    pub exponential_witness: Option<Vec<f64>>,
    #[serde(default)]
    pub duality: Option<String>,
}

/// A configuration file as written by the user.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub triplet: TripletSpec<f64>,
    #[serde(default)]
    pub subordinator: Option<Bernstein>,
    #[serde(default)]
    pub search: Option<SearchParams>,
    #[serde(default)]
    pub monte_carlo: Option<MonteCarloInput>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub growth: Option<String>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub strip_points: Option<Vec<StripPoint>>,
    #[serde(default)]
    pub time: Option<f64>,
    #[serde(default)]
    pub candidate: Option<CandidateSpec>,
    #[serde(default)]
    pub probes: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub expect: Option<Expect>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub workers: Option<usize>,
    pub box_halfwidth: Option<f64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub growth: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloSettings {
    pub seed: u64,
    pub paths: usize,
}

/// Every parameter a command may read, with defaults filled in. The worker
/// count is left out on purpose: results do not depend on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub triplet: TripletSpec<f64>,
    pub subordinator: Option<Bernstein>,
    pub search: SearchParams,
    pub monte_carlo: MonteCarloSettings,
    pub times: Vec<f64>,
    pub growth: Option<String>,
    pub points: Vec<Vec<f64>>,
    pub strip_points: Vec<StripPoint>,
    pub time: f64,
    pub candidate: Option<CandidateSpec>,
    pub probes: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
}

pub struct Run {
    pub resolved: Resolved,
    pub triplet: Triplet,
    pub workers: usize,
}

impl Run {
    pub fn symbol(&self) -> Psi {
        let base: Psi = self.triplet.clone().into();
        match &self.resolved.subordinator {
            Some(h) => levy_liouville::subordinate(h.clone(), base),
            None => base,
        }
    }

    pub fn mc(&self) -> MCConfig {
        MCConfig::new(self.resolved.monte_carlo.seed, self.resolved.monte_carlo.paths, self.workers)
    }

    pub fn growth(&self) -> Result<Option<Growth>, CliError> {
        self.resolved
            .growth
            .as_deref()
            .map(|g| g.parse::<Growth>().map_err(|e| CliError::schema("/growth", e.to_string())))
            .transpose()
    }
}

/// JSON pointer of a `serde_path_to_error` path.
fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn unexpected(v: &Value) -> String {
    use serde::de::Unexpected;
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => Unexpected::Bool(*b).to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => Unexpected::Unsigned(u).to_string(),
            (None, Some(i)) => Unexpected::Signed(i).to_string(),
            _ => Unexpected::Float(n.as_f64().unwrap_or(f64::NAN)).to_string(),
        },
        Value::String(s) => Unexpected::Str(s).to_string(),
        Value::Array(_) => Unexpected::Seq.to_string(),
        Value::Object(_) => Unexpected::Map.to_string(),
    }
}

/// First descendant of `v` (document order, `v` itself excluded) accepted by
/// `hit`, as a pointer suffix.
fn find(v: &Value, hit: &dyn Fn(&Value) -> bool) -> Option<String> {
    let children: Vec<(String, &Value)> = match v {
        Value::Array(a) => a.iter().enumerate().map(|(i, c)| (i.to_string(), c)).collect(),
        Value::Object(m) => m.iter().map(|(k, c)| (escape(k), c)).collect(),
        _ => return None,
    };
    for (key, child) in children {
        if hit(child) {
            return Some(format!("/{key}"));
        }
        if let Some(rest) = find(child, hit) {
            return Some(format!("/{key}{rest}"));
        }
    }
    None
}

/// Internally tagged enums hide the path below the tagged object; recover
/// it from the value or field named in the message.
fn refine(doc: &Value, base: String, message: &str) -> String {
    let Some(node) = doc.pointer(&base) else { return base };
    if let Some(rest) = message.strip_prefix("unknown field `") {
        let field = rest.split('`').next().unwrap_or_default().to_string();
        if node.get(&field).is_some() {
            return format!("{base}/{}", escape(&field));
        }
        let holder = |v: &Value| v.get(&field).is_some();
        if let Some(suffix) = find(node, &holder) {
            return format!("{base}{suffix}/{}", escape(&field));
        }
        return base;
    }
    for prefix in ["invalid type: ", "invalid value: "] {
        if let Some(rest) = message.strip_prefix(prefix) {
            let Some((shown, _)) = rest.rsplit_once(", expected") else { continue };
            let matches = |v: &Value| unexpected(v) == shown;
            if let Some(suffix) = find(node, &matches) {
                return format!("{base}{suffix}");
            }
        }
    }
    base
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let message = e.inner().to_string();
        let doc: Value = serde_json::from_str(text).unwrap_or(Value::Null);
        let pointer = refine(&doc, pointer_of(e.path()), &message);
        CliError::schema(if pointer.is_empty() { "/".into() } else { pointer }, message)
    })
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn resolve(cfg: RunConfig, o: &Overrides) -> Result<Run, CliError> {
    let report = validate_triplet(&cfg.triplet).map_err(|e| CliError::schema(format!("/triplet{}", e.pointer()), e.to_string()))?;
    if !report.gaussian_psd {
        return Err(CliError::schema("/triplet/gaussian", "covariance is not positive semidefinite"));
    }
    if let Some(c) = report.components.iter().find(|c| !c.finite) {
        return Err(CliError::schema(format!("/triplet/jumps/{}", c.index), "jump integral ∫ min(|x|², 1) dν is infinite"));
    }
    let triplet = Triplet::try_from(cfg.triplet.clone()).map_err(|e| CliError::schema("/triplet", e.to_string()))?;
    if let Some(h) = &cfg.subordinator {
        h.validate().map_err(|e| CliError::schema("/subordinator", e.to_string()))?;
    }
    let n = triplet.dim();

    let mut search = cfg.search.unwrap_or_default();
    if let Some(w) = o.box_halfwidth {
        search.box_halfwidth = Some(w);
    }
    if let Some(g) = o.grid {
        search.grid_points = Some(g);
    }
    if let Some(t) = o.tol {
        search.tol = t;
    }
    if let Some(s) = o.seed {
        search.seed = s;
    }
    if search.box_halfwidth.is_none() {
        search.box_halfwidth = Some(default_halfwidth(&triplet));
    }

    let mc = cfg.monte_carlo.unwrap_or_default();
    let monte_carlo = MonteCarloSettings {
        seed: o.seed.or(mc.seed).unwrap_or(0),
        paths: o.paths.or(mc.paths).unwrap_or(100_000),
    };
    let workers = o.workers.or(mc.workers).unwrap_or(1);
    if monte_carlo.paths == 0 || workers == 0 {
        return Err(CliError::schema("/monte_carlo", "paths and workers must be at least 1"));
    }

    let check_dims = |pointer: &str, v: &[f64]| {
        if v.len() != n {
            Err(CliError::schema(pointer, format!("expected {n} coordinates, found {}", v.len())))
        } else {
            Ok(())
        }
    };
    let points = cfg.points.unwrap_or_else(|| {
        let mut pts: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let mut far = vec![0.0; n];
        far[0] = std::f64::consts::TAU;
        pts.push(far);
        pts
    });
    for (i, p) in points.iter().enumerate() {
        check_dims(&format!("/points/{i}"), p)?;
    }
    let strip_points = cfg.strip_points.unwrap_or_default();
    for (i, p) in strip_points.iter().enumerate() {
        check_dims(&format!("/strip_points/{i}/xi"), &p.xi)?;
        check_dims(&format!("/strip_points/{i}/eta"), &p.eta)?;
    }
    let probes = cfg.probes.unwrap_or_else(|| vec![vec![0.0; n], vec![0.3; n]]);
    for (i, p) in probes.iter().enumerate() {
        check_dims(&format!("/probes/{i}"), p)?;
    }
    match &cfg.candidate {
        Some(CandidateSpec::Trig { gamma }) => check_dims("/candidate/gamma", gamma)?,
        Some(CandidateSpec::Exponential { eta }) => check_dims("/candidate/eta", eta)?,
        None => {}
    }
    let times = cfg.times.unwrap_or_else(|| vec![1.0, SQRT_2]);
    if times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(CliError::schema("/times", "times must be positive and finite"));
    }
    let time = cfg.time.unwrap_or(1.0);
    if !(time >= 0.0 && time.is_finite()) {
        return Err(CliError::schema("/time", "time must be nonnegative and finite"));
    }

    let resolved = Resolved {
        triplet: cfg.triplet,
        subordinator: cfg.subordinator,
        search,
        monte_carlo,
        times,
        growth: o.growth.clone().or(cfg.growth),
        points,
        strip_points,
        time,
        candidate: cfg.candidate,
        probes,
        expect: cfg.expect,
    };
    let run = Run { resolved, triplet, workers };
    run.growth()?;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_carry_pointers() {
        let e = parse(r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]],"jumps":[{"type":"stable","alpha":"x","scale":1}]}}"#)
            .unwrap_err();
        assert!(matches!(e, CliError::Schema { ref pointer, .. } if pointer == "/triplet/jumps/0/alpha"), "{e:?}");
        let e = parse(r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]]},"colour":1}"#).unwrap_err();
        assert!(matches!(e, CliError::Schema { ref pointer, .. } if pointer == "/colour"), "{e:?}");
        let radial = r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]],"jumps":[{"type":"atoms","atoms":[{"location":[1],"mass":1}]},
            {"type":"radial","r_min":0.1,"r_max":2,"profile":{"kind":"power","coef":1,"exponent":2,"shift":0}}]}}"#;
        let e = parse(radial).unwrap_err();
        assert!(matches!(e, CliError::Schema { ref pointer, .. } if pointer == "/triplet/jumps/1/profile/shift"), "{e:?}");
        let e = parse(r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]]},"subordinator":{"kind":"power","alpha":true}}"#).unwrap_err();
        assert!(matches!(e, CliError::Schema { ref pointer, .. } if pointer == "/subordinator/alpha"), "{e:?}");
        let cfg = parse(r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]],"jumps":[{"type":"stable","alpha":2.5,"scale":1}]}}"#)
            .unwrap();
        let e = resolve(cfg, &Overrides::default()).err().unwrap();
        assert!(matches!(e, CliError::Schema { ref pointer, .. } if pointer == "/triplet/jumps/0/alpha"), "{e:?}");
    }

    #[test]
    fn flags_override_the_file() {
        let cfg = parse(r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[1]]},"monte_carlo":{"seed":3,"paths":10}}"#).unwrap();
        let o = Overrides { seed: Some(9), box_halfwidth: Some(5.0), ..Default::default() };
        let run = resolve(cfg, &o).unwrap();
        assert_eq!(run.resolved.monte_carlo, MonteCarloSettings { seed: 9, paths: 10 });
        assert_eq!(run.resolved.search.box_halfwidth, Some(5.0));
        assert_eq!(run.resolved.times, vec![1.0, SQRT_2]);
    }
}
