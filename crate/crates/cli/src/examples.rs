//! The bundled corpus and its pass/fail table.

use serde::Serialize;
use serde_json::Value;

use crate::commands::{self, Status};
use crate::config::{self, Expect, Overrides};
use crate::error::CliError;

pub const CORPUS: &[(&str, &str)] = &[
    ("bm", include_str!("../corpus/bm.json")),
    ("bm_drift1", include_str!("../corpus/bm_drift1.json")),
    ("poisson1", include_str!("../corpus/poisson1.json")),
    ("atoms_2_3", include_str!("../corpus/atoms_2_3.json")),
    ("weierstrass", include_str!("../corpus/weierstrass.json")),
    ("planar_degenerate", include_str!("../corpus/planar_degenerate.json")),
    ("stable_half", include_str!("../corpus/stable_half.json")),
    ("subordinated_bm", include_str!("../corpus/subordinated_bm.json")),
];

const VECTOR_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub example: String,
    pub check: String,
    pub expected: Value,
    pub observed: Value,
    pub pass: bool,
}

fn close(a: &Value, b: &[f64]) -> bool {
    a.as_array().is_some_and(|v| {
        v.len() == b.len() && v.iter().zip(b).all(|(x, y)| x.as_f64().is_some_and(|x| (x - y).abs() < VECTOR_TOL))
    })
}

fn field(result: &Value, pointer: &str) -> Value {
    result.pointer(pointer).cloned().unwrap_or(Value::Null)
}

fn check_example(name: &str, text: &str, overrides: &Overrides) -> Vec<Row> {
    let mut rows = Vec::new();
    let mut push = |check: &str, expected: Value, observed: Value, pass: bool| {
        rows.push(Row { example: name.into(), check: check.into(), expected, observed, pass });
    };
    let run = match config::parse(text).and_then(|c| config::resolve(c, overrides)) {
        Ok(run) => run,
        Err(e) => {
            push("config", Value::Null, Value::String(e.to_string()), false);
            return rows;
        }
    };
    let expect = run.resolved.expect.clone().unwrap_or_default();
    let Expect { verdict, trig_witness, strong_verdict, exponential_witness, duality } = expect;
    let outcome = |r: Result<(Value, Status), CliError>| r.map(|(v, _)| v).map_err(|e| Value::String(e.to_string()));

    if verdict.is_some() || trig_witness.is_some() {
        match outcome(commands::verdict(&run)) {
            Ok(v) => {
                if let Some(want) = verdict {
                    let got = field(&v, "/verdict");
                    push("verdict", Value::String(want.clone()), got.clone(), got == Value::String(want));
                }
                if let Some(want) = trig_witness {
                    let got = field(&v, "/witness/vector");
                    push("trig witness", want.clone().into(), got.clone(), close(&got, &want));
                }
            }
            Err(e) => push("verdict", Value::Null, e, false),
        }
    }
    if strong_verdict.is_some() || exponential_witness.is_some() {
        match outcome(commands::strong_verdict(&run)) {
            Ok(v) => {
                if let Some(want) = strong_verdict {
                    let got = field(&v, "/verdict");
                    push("strong verdict", Value::String(want.clone()), got.clone(), got == Value::String(want));
                }
                if let Some(want) = exponential_witness {
                    let got = field(&v, "/witness/vector");
                    let kind = field(&v, "/witness/kind");
                    let pass = close(&got, &want) && kind == "exponential";
                    push("exponential witness", want.into(), got, pass);
                }
            }
            Err(e) => push("strong verdict", Value::Null, e, false),
        }
    }
    if let Some(want) = duality {
        match outcome(commands::duality(&run)) {
            Ok(v) => {
                let got = field(&v, "/outcome");
                push("duality", Value::String(want.clone()), got.clone(), got == Value::String(want));
            }
            Err(e) => push("duality", Value::String(want), e, false),
        }
    }
    rows
}

/// Runs every corpus entry; the table goes to stdout.
pub fn run(overrides: &Overrides) -> Vec<Row> {
    let rows: Vec<Row> = CORPUS.iter().flat_map(|(name, text)| check_example(name, text, overrides)).collect();
    println!("{:<18} {:<20} {:<26} {:<26} result", "example", "check", "expected", "observed");
    for r in &rows {
        println!(
            "{:<18} {:<20} {:<26} {:<26} {}",
            r.example,
            r.check,
            r.expected.to_string(),
            r.observed.to_string(),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    rows
}
