//! Resolving command-line arguments to processes, witnesses, strategies and games.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use procmat::game::presets::{ocb_game, ocb_strategy};
use procmat::game::{GameSpec, Instrument, Strategy, IN_LEG, OUT_LEG};
use procmat::linalg::OperatorJson;
use procmat::process::{fixed_order, ocb_process, qs_marginal, CausalOrder};
use procmat::witness::ocb_witness;
use procmat::{Operator, ProcessMatrix, Witness};

use crate::args::Builtin;
use crate::CliError;

/// Where an input came from, echoed in the report.
pub struct Source {
    pub text: String,
    pub echo: Value,
}

fn read_source(arg: &str) -> Result<Source, CliError> {
    let (bytes, path) = if arg == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Input(format!("reading stdin: {e}")))?;
        (buf, "-".to_string())
    } else {
        let buf = std::fs::read(arg).map_err(|e| CliError::Input(format!("reading {arg}: {e}")))?;
        (buf, arg.to_string())
    };
    let digest: String = Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    let text =
        String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{path} is not UTF-8")))?;
    Ok(Source {
        text,
        echo: json!({"kind": "file", "path": path, "sha256": digest}),
    })
}

fn builtin_echo(name: &str) -> Value {
    json!({"kind": "builtin", "name": name})
}

pub fn builtin_process(b: Builtin, d: usize) -> Result<ProcessMatrix, CliError> {
    let w = match b {
        Builtin::FixedOrderAb => fixed_order(CausalOrder::AliceFirst, d),
        Builtin::FixedOrderBa => fixed_order(CausalOrder::BobFirst, d),
        Builtin::QsMarginal => qs_marginal(d),
        Builtin::Ocb if d == 2 => Ok(ocb_process()),
        Builtin::Ocb => {
            return Err(CliError::Usage(
                "the OCB process is defined only for --dim 2".into(),
            ))
        }
    };
    w.map_err(|e| CliError::Usage(e.to_string()))
}

fn builtin_by_name(name: &str) -> Option<Builtin> {
    use clap::ValueEnum;
    Builtin::from_str(name, false).ok()
}

pub fn load_operator(arg: &str) -> Result<(Operator, Value), CliError> {
    if let Some(b) = builtin_by_name(arg) {
        return Ok((builtin_process(b, 2)?.into_operator(), builtin_echo(arg)));
    }
    let src = read_source(arg)?;
    let op = Operator::from_json(&src.text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((op, src.echo))
}

pub fn load_process(arg: &str) -> Result<(ProcessMatrix, Value), CliError> {
    let (op, echo) = load_operator(arg)?;
    let w =
        ProcessMatrix::from_any_order(&op).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((w, echo))
}

/// `{"m": Operator, "scale": s, "terms": {name: Operator}}`; `scale` defaults to 1.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    m: OperatorJson,
    #[serde(default = "one")]
    scale: f64,
    #[serde(default)]
    terms: BTreeMap<String, OperatorJson>,
}

fn one() -> f64 {
    1.0
}

fn to_canonical(j: OperatorJson) -> procmat::Result<Operator> {
    let op = Operator::try_from(j)?;
    Ok(ProcessMatrix::from_any_order(&op)?.into_operator())
}

pub fn load_witness(arg: &str) -> Result<(Witness, Value), CliError> {
    if arg == "ocb" {
        return Ok((ocb_witness(), builtin_echo(arg)));
    }
    let src = read_source(arg)?;
    let parse = || -> procmat::Result<Witness> {
        let f: WitnessFile = serde_json::from_str(&src.text)?;
        let w = Witness::new(to_canonical(f.m)?, f.scale)?;
        if f.terms.is_empty() {
            return Ok(w);
        }
        let terms = f
            .terms
            .into_iter()
            .map(|(k, j)| Ok((k, to_canonical(j)?)))
            .collect::<procmat::Result<_>>()?;
        w.with_terms(terms)
    };
    let w = parse().map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((w, src.echo))
}

/// `{"alice": [[Choi, ...], ...], "bob": [...]}`: per setting, one Choi
/// operator per outcome on a two-leg `(input, output)` layout.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    alice: Vec<Vec<OperatorJson>>,
    bob: Vec<Vec<OperatorJson>>,
}

fn instrument(outcomes: Vec<OperatorJson>) -> procmat::Result<Instrument> {
    let ops = outcomes
        .into_iter()
        .map(|j| Operator::try_from(j)?.relabel(&[IN_LEG, OUT_LEG]))
        .collect::<procmat::Result<_>>()?;
    Instrument::new(ops)
}

pub fn load_strategy(arg: &str) -> Result<(Strategy, Value), CliError> {
    if arg == "ocb" {
        return Ok((ocb_strategy(), builtin_echo(arg)));
    }
    let src = read_source(arg)?;
    let parse = || -> procmat::Result<Strategy> {
        let f: StrategyFile = serde_json::from_str(&src.text)?;
        Ok(Strategy {
            alice: f
                .alice
                .into_iter()
                .map(instrument)
                .collect::<procmat::Result<_>>()?,
            bob: f
                .bob
                .into_iter()
                .map(instrument)
                .collect::<procmat::Result<_>>()?,
        })
    };
    let s = parse().map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((s, src.echo))
}

pub fn load_game(arg: &str) -> Result<(GameSpec, Value), CliError> {
    if arg == "ocb" {
        return Ok((ocb_game(), builtin_echo(arg)));
    }
    let src = read_source(arg)?;
    let g: GameSpec =
        serde_json::from_str(&src.text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    g.validate()
        .map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((g, src.echo))
}
