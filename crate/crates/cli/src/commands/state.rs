use serde_json::{json, Value};

use chronoq::entangle::concurrence;
use chronoq::qcore::{bell_state, ghz_state, DensityOperator, StateVector, TOL_ALG};
use chronoq::Error;

use super::bits;
use crate::{Check, CliResult, Ctx, Outcome, StateCmd};

fn amplitude_rows(psi: &StateVector, n: usize) -> Vec<Value> {
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > TOL_ALG)
        .map(|(i, a)| json!({ "basis": bits(i, n), "re": a.re, "im": a.im, "probability": a.norm_sqr() }))
        .collect()
}

fn inspect(psi: &StateVector, n: usize, ctx: &Ctx) -> CliResult<(Value, Vec<Check>)> {
    let tol = ctx.tol(TOL_ALG);
    let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    let rest = 1usize << (n - 1);
    let c = concurrence(psi, (2, rest))?;
    let rho = DensityOperator::from_pure(psi);
    let first = rho.partial_trace(&[2, rest], &[0])?;
    let mixed = DensityOperator::maximally_mixed(2)?;
    let deviation = first.as_operator().max_abs_diff(&mixed.as_operator());
    let result = json!({
        "qubits": n,
        "dim": psi.dim(),
        "norm": norm,
        "concurrence": c,
        "first_qubit_purity": first.purity(),
        "rows": amplitude_rows(psi, n),
    });
    let checks = vec![
        Check::within("normalized", norm, 1.0, tol),
        Check::within("concurrence across first qubit", c, 1.0, tol),
        Check::at_most("first qubit maximally mixed", deviation, 0.0, tol),
    ];
    Ok((result, checks))
}

pub fn run(cmd: &StateCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    match cmd {
        StateCmd::Bell { label } => {
            let psi = bell_state(*label);
            let (mut result, checks) = inspect(&psi, 2, ctx)?;
            result["label"] = json!(label.symbol());
            result["bits"] = json!(format!("{}{}", label.bits().0, label.bits().1));
            Ok(("state bell".into(), Outcome::new(result).checks(checks)))
        }
        StateCmd::Ghz { qubits } => {
            if *qubits < 2 {
                return Err(Error::InvalidArgument("GHZ inspection needs at least 2 qubits".into()).into());
            }
            let psi = ghz_state(*qubits)?;
            let (result, checks) = inspect(&psi, *qubits, ctx)?;
            Ok(("state ghz".into(), Outcome::new(result).checks(checks)))
        }
    }
}
