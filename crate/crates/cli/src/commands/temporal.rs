use serde_json::{json, Value};

use chronoq::chain::{classical_chain_tamper_contrast, parse_records, record_string, QuantumChain, Record};
use chronoq::qcore::{bell_state, computational_basis, pauli_x, pauli_y, pauli_z, BellLabel, Module, Operator, StateVector, TOL_ALG};
use chronoq::temporal::{entanglement_swap, TemporalRegister};
use chronoq::Error;

use crate::{ChainCmd, Check, CliResult, Ctx, Outcome, PauliOp, SwapArgs};

/// A tampered chain must fall below fidelity `1 - TAMPER_GAP`.
const TAMPER_GAP: f64 = 1e-6;

fn event_rows(reg: &TemporalRegister) -> Vec<Value> {
    reg.events()
        .iter()
        .map(|e| {
            let modes: Vec<String> = e.modes.iter().map(ToString::to_string).collect();
            json!({ "t": e.t, "event": e.event, "modes": modes.join(" ") })
        })
        .collect()
}

pub fn swap(args: &SwapArgs, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    let mut rng = ctx.rng(Module::Temporal);
    let z: Vec<StateVector> = computational_basis(2);
    let run = entanglement_swap(args.label, args.early.then_some(z.as_slice()), &mut rng)?;
    let mut result = json!({
        "label": args.label.symbol(),
        "early": args.early,
        "middle": run.middle.label.symbol(),
        "middle_probability": run.middle.probability,
        "first_outcome": run.first_outcome,
    });
    let mut outcome_checks = Vec::new();
    if args.early {
        let ordered = run.register.consumed_before_created("1", "3");
        result["consumed_before_created"] = json!(ordered);
        outcome_checks.push(Check::holds("photon 1 consumed before photon 3 created", ordered));
    } else {
        let rho = run.register.reduced(&[run.first.clone(), run.last.clone()])?;
        let (mut best, mut best_f) = (BellLabel::PhiPlus, f64::NEG_INFINITY);
        for l in BellLabel::ALL {
            let f = rho.expectation(&Operator::projector(&bell_state(l)))?.re;
            if f > best_f {
                (best, best_f) = (l, f);
            }
        }
        result["outer_pair"] = json!(best.symbol());
        result["outer_fidelity"] = json!(best_f);
        outcome_checks.push(Check::within("outer pair is a Bell state", best_f, 1.0, ctx.tol(TOL_ALG)));
    }
    result["rows"] = json!(event_rows(&run.register));
    Ok(("swap".into(), Outcome::new(result).checks(outcome_checks)))
}

fn pauli(op: PauliOp) -> Operator {
    match op {
        PauliOp::X => pauli_x(),
        PauliOp::Y => pauli_y(),
        PauliOp::Z => pauli_z(),
    }
}

fn records_arg(s: &str) -> CliResult<Vec<Record>> {
    let records = parse_records(s)?;
    if records.is_empty() {
        return Err(Error::InvalidArgument("at least one record is required".into()).into());
    }
    Ok(records)
}

fn demo(records: &str, ctx: &Ctx) -> CliResult<Outcome> {
    let records = records_arg(records)?;
    let chain = QuantumChain::from_records(&records, &mut ctx.rng(Module::Chain))?;
    let export = chain.export()?;
    let expected = record_string(&records);
    let decoded = chain.decode().ok();
    let modes: Vec<String> = chain.modes().iter().map(ToString::to_string).collect();
    let accessible: Vec<String> = chain.accessible_modes().iter().map(ToString::to_string).collect();
    Ok(Outcome::new(json!({
        "records": expected,
        "blocks": records.len(),
        "timestamps": export.timestamps,
        "valid": export.valid,
        "fidelity": export.fidelity,
        "decoded": decoded,
        "fusion_attempts": chain.fusion_attempts(),
        "modes": modes,
        "accessible_modes": accessible,
    }))
    .check(Check::equals("decode round trip", json!(decoded), json!(expected)))
    .check(Check::within("chain fidelity", export.fidelity, 1.0, ctx.tol(TOL_ALG))))
}

fn tamper(records: &str, op: PauliOp, mode: Option<&str>, ctx: &Ctx) -> CliResult<Outcome> {
    let records = records_arg(records)?;
    let mut chain = QuantumChain::from_records(&records, &mut ctx.rng(Module::Chain))?;
    let target = match mode {
        Some(label) => chain
            .modes()
            .iter()
            .find(|m| m.spatial == label || m.to_string() == label)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("no chain photon labelled `{label}`")))?,
        None => chain.accessible_modes().last().cloned().ok_or(Error::InvalidChain)?,
    };
    let before = chain.fidelity()?;
    let (after, tamper_error) = match chain.tamper(&target, &pauli(op)) {
        Ok(f) => (f, None),
        Err(e @ Error::TemporalInaccessible(_)) => (chain.fidelity()?, Some(e.code())),
        Err(e) => return Err(e.into()),
    };
    let decode = chain.decode();
    let decode_error = decode.as_ref().err().map(Error::code);
    let result = json!({
        "records": record_string(&records),
        "target": target.to_string(),
        "op": format!("{op:?}"),
        "tamper_error": tamper_error,
        "fidelity_before": before,
        "fidelity_after": after,
        "valid": chain.is_valid(),
        "decoded": decode.as_ref().ok(),
        "decode_error": decode_error,
    });
    let checks = match tamper_error {
        None => vec![
            Check::at_most("fidelity drops", after, 1.0 - TAMPER_GAP, 0.0),
            Check::equals("tamper detected", json!(decode_error), json!("DECODE_MISMATCH")),
        ],
        Some(_) => vec![
            Check::holds("past photon unreachable", true),
            Check::equals("chain intact", json!(decode.ok()), json!(record_string(&records))),
        ],
    };
    Ok(Outcome::new(result).checks(checks))
}

fn contrast(records: &str, index: usize, ctx: &Ctx) -> CliResult<Outcome> {
    let records = records_arg(records)?;
    let c = classical_chain_tamper_contrast(&records, index, &mut ctx.rng(Module::Chain))?;
    let n = records.len();
    let mut result = serde_json::to_value(&c).expect("contrast serializes");
    result["records"] = json!(record_string(&records));
    Ok(Outcome::new(result)
        .check(Check::equals(
            "classical invalidates blocks >= index",
            json!([c.invalidated_range_classical.0, c.invalidated_range_classical.1]),
            json!([index, n]),
        ))
        .check(Check::at_most("quantum fidelity drops", c.quantum_fidelity_after, 1.0 - TAMPER_GAP, 0.0)))
}

pub fn chain(cmd: &ChainCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    Ok(match cmd {
        ChainCmd::Demo { records } => ("chain demo".into(), demo(records, ctx)?),
        ChainCmd::Tamper { records, op, mode } => ("chain tamper".into(), tamper(records, *op, mode.as_deref(), ctx)?),
        ChainCmd::Contrast { records, index } => ("chain contrast".into(), contrast(records, *index, ctx)?),
    })
}
