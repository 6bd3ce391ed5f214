//! One function per subcommand. Each returns the `result` object of the
//! report together with whether the outcome was conclusive.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use levy_liouville::generator::{check_harmonic, sample_paths, semigroup_apply_spectral, Candidate};
use levy_liouville::structure::{
    cross_check_duality, find_zero_set, liouville_verdict, liouville_verdict_symbol, smoothness_order, strong_liouville_verdict,
    trig_witness, DualityOutcome, Verdict,
};
use levy_liouville::{eval_psi_complex, validate_triplet, ComplexStripArg, StructureError, TripletSpec};
use serde_json::{json, Value};

use crate::config::{CandidateSpec, Run};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Conclusive,
    Inconclusive,
}

pub type Outcome = Result<(Value, Status), CliError>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn require_triplet(run: &Run, command: &str) -> Result<(), CliError> {
    if run.resolved.subordinator.is_some() {
        return Err(CliError::schema("/subordinator", format!("`{command}` works on the triplet itself; remove the subordinator")));
    }
    Ok(())
}

fn verdict_status(v: &Verdict) -> Status {
    if v.is_inconclusive() {
        Status::Inconclusive
    } else {
        Status::Conclusive
    }
}

/// Structural checks only; the triplet is not required to be admissible.
pub fn validate(spec: &TripletSpec<f64>) -> Outcome {
    let report = validate_triplet(spec).map_err(|e| CliError::schema(format!("/triplet{}", e.pointer()), e.to_string()))?;
    let order = smoothness_order(&spec.jumps);
    let ok = report.ok;
    let result = json!({ "report": to_value(&report), "smoothness_order": order.to_string() });
    if ok {
        Ok((result, Status::Conclusive))
    } else {
        let pointer = if !report.gaussian_psd {
            "/triplet/gaussian".to_string()
        } else {
            let i = report.components.iter().find(|c| !c.finite).map(|c| c.index).unwrap_or(0);
            format!("/triplet/jumps/{i}")
        };
        Err(CliError::schema(pointer, "triplet is not admissible"))
    }
}

pub fn symbol(run: &Run, out: &Path) -> Outcome {
    let s = run.symbol();
    let path = out.join("symbol.csv");
    let mut csv = create(&path)?;
    let n = s.dim();
    let header: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
    writeln!(csv, "{},re,im", header.join(",")).map_err(io(&path))?;
    let mut values = Vec::new();
    for xi in &run.resolved.points {
        let v = s.eval(xi);
        let coords: Vec<String> = xi.iter().map(|c| format!("{c:?}")).collect();
        writeln!(csv, "{},{:?},{:?}", coords.join(","), v.re, v.im).map_err(io(&path))?;
        values.push(json!({ "xi": xi, "re": v.re, "im": v.im }));
    }
    csv.flush().map_err(io(&path))?;
    let strip: Vec<Value> = run
        .resolved
        .strip_points
        .iter()
        .map(|p| match eval_psi_complex(&s, &ComplexStripArg::new(p.xi.clone(), p.eta.clone())) {
            Ok(v) => json!({ "xi": p.xi, "eta": p.eta, "re": v.re, "im": v.im }),
            Err(e) => json!({ "xi": p.xi, "eta": p.eta, "error": e.to_string() }),
        })
        .collect();
    Ok((json!({ "values": values, "strip": strip, "csv": "symbol.csv" }), Status::Conclusive))
}

pub fn zeroset(run: &Run) -> Outcome {
    let z = find_zero_set(&run.symbol(), &run.resolved.search)?;
    let status = if z.is_conclusive() { Status::Conclusive } else { Status::Inconclusive };
    Ok((to_value(&z), status))
}

pub fn verdict(run: &Run) -> Outcome {
    let v = match run.resolved.subordinator {
        None => liouville_verdict(&run.triplet, &run.resolved.search)?,
        Some(_) => liouville_verdict_symbol(&run.symbol(), &run.resolved.search)?,
    };
    Ok((to_value(&v), verdict_status(&v)))
}

pub fn strong_verdict(run: &Run) -> Outcome {
    require_triplet(run, "strong-verdict")?;
    let g = run.growth()?.ok_or_else(|| CliError::Usage("strong-verdict needs a growth bound (--growth or \"growth\")".into()))?;
    let v = strong_liouville_verdict(&run.triplet, &g, &run.resolved.search, &run.mc())?;
    Ok((to_value(&v), verdict_status(&v)))
}

/// Verdicts of ψ and h∘ψ side by side; they must agree.
pub fn subordinate(run: &Run) -> Outcome {
    let h = run
        .resolved
        .subordinator
        .clone()
        .ok_or_else(|| CliError::Usage("subordinate needs a \"subordinator\" in the config".into()))?;
    let base = liouville_verdict(&run.triplet, &run.resolved.search)?;
    let layered = liouville_verdict_symbol(&run.symbol(), &run.resolved.search)?;
    let values: Vec<Value> = run
        .resolved
        .points
        .iter()
        .map(|xi| {
            let v = run.symbol().eval(xi);
            json!({ "xi": xi, "re": v.re, "im": v.im })
        })
        .collect();
    let agree = base.verdict == layered.verdict;
    let result = json!({
        "bernstein": to_value(&h),
        "base": to_value(&base),
        "subordinated": to_value(&layered),
        "verdicts_agree": agree,
        "values": values,
    });
    if base.is_inconclusive() || layered.is_inconclusive() {
        return Ok((result, Status::Inconclusive));
    }
    if !agree {
        return Err(CliError::Usage(format!(
            "subordination changed the verdict: {:?} became {:?}",
            base.verdict, layered.verdict
        )));
    }
    Ok((result, Status::Conclusive))
}

pub fn simulate(run: &Run, out: &Path) -> Outcome {
    require_triplet(run, "simulate")?;
    let paths = sample_paths(&run.triplet, run.resolved.time, &run.mc())?;
    let n = run.triplet.dim();
    let path = out.join("simulate.csv");
    let mut csv = create(&path)?;
    let header: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
    writeln!(csv, "path,{}", header.join(",")).map_err(io(&path))?;
    let mut mean = vec![0.0; n];
    for (i, p) in paths.iter().enumerate() {
        let coords: Vec<String> = p.value.iter().map(|c| format!("{c:?}")).collect();
        writeln!(csv, "{i},{}", coords.join(",")).map_err(io(&path))?;
        for (m, v) in mean.iter_mut().zip(&p.value) {
            *m += v;
        }
    }
    csv.flush().map_err(io(&path))?;
    let count = paths.len() as f64;
    mean.iter_mut().for_each(|m| *m /= count);
    let mut cov = vec![vec![0.0; n]; n];
    for p in &paths {
        for i in 0..n {
            for j in 0..n {
                cov[i][j] += (p.value[i] - mean[i]) * (p.value[j] - mean[j]);
            }
        }
    }
    let denom = (count - 1.0).max(1.0);
    cov.iter_mut().flatten().for_each(|c| *c /= denom);
    let result = json!({ "time": run.resolved.time, "paths": paths.len(), "mean": mean, "covariance": cov, "csv": "simulate.csv" });
    Ok((result, Status::Conclusive))
}

pub fn check_harmonic_cmd(run: &Run, out: &Path) -> Outcome {
    let candidate = run
        .resolved
        .candidate
        .clone()
        .ok_or_else(|| CliError::Usage("check-harmonic needs a \"candidate\" in the config".into()))?;
    let s = run.symbol();
    let times = &run.resolved.times;
    let path = out.join("check-harmonic.csv");
    let mut csv = create(&path)?;
    let report = match &candidate {
        CandidateSpec::Trig { gamma } => {
            let f = trig_witness(gamma);
            let report = check_harmonic(&s, Candidate::Grid(&f), times, &run.mc())?;
            let pf = semigroup_apply_spectral(&s, times[0], &f);
            let n = f.grid.dim();
            let header: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
            writeln!(csv, "{},f,ptf_re,ptf_im", header.join(",")).map_err(io(&path))?;
            for k in 0..f.grid.len() {
                let coords: Vec<String> = f.grid.point(k).iter().map(|c| format!("{c:?}")).collect();
                let p = pf.values[k];
                writeln!(csv, "{},{:?},{:?},{:?}", coords.join(","), f.values[k].re, p.re, p.im).map_err(io(&path))?;
            }
            report
        }
        CandidateSpec::Exponential { eta } => {
            let eta = eta.clone();
            let f = move |x: &[f64]| x.iter().zip(&eta).map(|(a, b)| a * b).sum::<f64>().exp();
            let probes = run.resolved.probes.clone();
            let report = check_harmonic(&s, Candidate::Callable { f: &f, probes }, times, &run.mc())?;
            let n = run.triplet.dim();
            let header: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
            writeln!(csv, "time,{},target,estimate,stderr,z_score", header.join(",")).map_err(io(&path))?;
            for p in &report.probes {
                let coords: Vec<String> = p.x.iter().map(|c| format!("{c:?}")).collect();
                writeln!(csv, "{:?},{},{:?},{:?},{:?},{:?}", p.time, coords.join(","), p.target, p.estimate, p.stderr, p.z_score)
                    .map_err(io(&path))?;
            }
            report
        }
    };
    csv.flush().map_err(io(&path))?;
    let result = json!({ "candidate": to_value(&candidate), "report": to_value(&report), "csv": "check-harmonic.csv" });
    Ok((result, Status::Conclusive))
}

pub fn duality(run: &Run) -> Outcome {
    require_triplet(run, "duality")?;
    match cross_check_duality(&run.triplet, &run.resolved.search) {
        Ok(r) => {
            let result = to_value(&r);
            match r.outcome {
                DualityOutcome::Equal => Ok((result, Status::Conclusive)),
                DualityOutcome::Inconclusive => Ok((result, Status::Inconclusive)),
                DualityOutcome::Different => Err(CliError::Usage(format!(
                    "zero-set annihilator and exact group differ: {}",
                    serde_json::to_string(&r.comparison).unwrap_or_default()
                ))),
            }
        }
        Err(StructureError::ExactPathUnavailable(reason)) => {
            let z = find_zero_set(&run.symbol(), &run.resolved.search)?;
            let result = json!({ "outcome": "inconclusive", "exact_path": reason, "zero_set": to_value(&z) });
            Ok((result, Status::Inconclusive))
        }
        Err(e) => Err(e.into()),
    }
}
