use std::f64::consts::{SQRT_2, TAU};

use serde_json::{json, Value};

use chronoq::foundations::{
    decoherence_average, entropic_lg_scan, gleason_qubit_pauli, gleason_reconstruct, lg_k3, lg_k3_max,
    optimize_temporal_chsh, PrecessionModel, Valuation, TOL_RECON,
};
use chronoq::qcore::{random_basis, random_density, DensityOperator, Module, StateVector, MAX_QUBITS};
use chronoq::Error;

use crate::{Check, CliResult, Ctx, GleasonCmd, LgCmd, Outcome};

/// Tolerance of the frame-averaged decoherence identity at ~10⁴ frames.
const AVERAGE_TOL: f64 = 0.02;

fn roundtrip(dim: usize, samples: u64, frames: u64, ctx: &Ctx) -> CliResult<Outcome> {
    if !(2..=1 << (MAX_QUBITS / 2)).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dim {dim} outside 2..={}", 1 << (MAX_QUBITS / 2))).into());
    }
    let rng = ctx.rng(Module::Foundations);
    let tol = ctx.tol(TOL_RECON);
    let (mut max_err, mut pauli_err) = (0.0f64, 0.0f64);
    for s in 0..samples {
        let mut r = rng.fork(s);
        let rho: DensityOperator = random_density(dim, dim, &mut r);
        let frame: Vec<StateVector> = random_basis(dim, &mut r);
        let val = Valuation::from_density(&rho, &frame)?;
        let rec = gleason_reconstruct(&val, &frame)?;
        max_err = max_err.max(rec.as_operator().max_abs_diff(&rho.as_operator()));
        if dim == 2 {
            pauli_err = pauli_err.max(gleason_qubit_pauli(&val, &frame)?.max_abs_diff(&rho.as_operator()));
        }
    }
    let mut result = json!({
        "dim": dim,
        "samples": samples,
        "max_error": max_err,
        "valuation_entries": 2 * dim * dim - dim,
    });
    let mut checks = vec![Check::at_most("reconstruction error", max_err, 0.0, tol)];
    if dim == 2 {
        result["max_pauli_error"] = json!(pauli_err);
        checks.push(Check::at_most("qubit Pauli form error", pauli_err, 0.0, tol));
    }
    if frames > 0 {
        let rho: DensityOperator = random_density(dim, dim, &mut rng.fork(samples));
        let avg = decoherence_average(&rho, frames, &rng.fork(1 << 40))?;
        let err = avg.max_abs_diff(&rho.as_operator());
        result["frames"] = json!(frames);
        result["decoherence_average_error"] = json!(err);
        checks.push(Check::at_most("(d+1)<rho_P> - I recovers rho", err, 0.0, AVERAGE_TOL));
    }
    Ok(Outcome::new(result).checks(checks))
}

pub fn gleason(cmd: &GleasonCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    match cmd {
        GleasonCmd::Roundtrip { dim, samples, frames } => {
            Ok(("gleason roundtrip".into(), roundtrip(*dim, *samples, *frames, ctx)?))
        }
    }
}

fn k3(omega: f64, tau: Option<f64>, points: usize, ctx: &Ctx) -> CliResult<Outcome> {
    let model = PrecessionModel::new(omega)?;
    let closed = |t: f64| 2.0 * model.closed_form_correlator(t) - model.closed_form_correlator(2.0 * t);
    let mut outcome = match tau {
        Some(t) => {
            let k = lg_k3(&model, t)?;
            Outcome::new(json!({ "omega": omega, "tau": t, "k3": k, "closed_form": closed(t), "classical_bound": 1.0 }))
                .check(Check::within("K3 against closed form", k, closed(t), ctx.tol(1e-9)))
        }
        None => {
            let m = lg_k3_max(&model)?;
            Outcome::new(json!({
                "omega": omega,
                "k3_max": m.k3_max,
                "tau_star": m.tau_star,
                "omega_tau_star": omega.abs() * m.tau_star,
                "classical_bound": 1.0,
            }))
            .check(Check::within("K3 maximum", m.k3_max, 1.5, ctx.tol(1e-6)))
            .check(Check::within("cos(omega tau*)", (omega * m.tau_star).cos(), 0.5, 1e-4))
        }
    };
    if points > 0 {
        let period = TAU / omega.abs();
        let rows = (1..=points)
            .map(|i| {
                let t = period * i as f64 / points as f64;
                Ok(json!({ "tau": t, "k3": lg_k3(&model, t)?, "closed_form": closed(t) }))
            })
            .collect::<CliResult<Vec<Value>>>()?;
        outcome.result.insert("rows".into(), Value::Array(rows));
    }
    Ok(outcome)
}

pub fn lg(cmd: &LgCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    match cmd {
        LgCmd::K3 { omega, tau, points } => Ok(("lg k3".into(), k3(*omega, *tau, *points, ctx)?)),
        LgCmd::TemporalChsh { omega, t1, t2 } => {
            let model = PrecessionModel::new(*omega)?;
            let (value, _) = optimize_temporal_chsh(&model, *t1, *t2)?;
            let outcome = Outcome::new(json!({ "omega": omega, "t1": t1, "t2": t2, "value": value, "classical_bound": 2.0 }))
                .check(Check::within("temporal CHSH optimum", value, 2.0 * SQRT_2, ctx.tol(1e-3)));
            Ok(("lg temporal-chsh".into(), outcome))
        }
        LgCmd::Entropic { omega, points } => {
            let model = PrecessionModel::new(*omega)?;
            let scan = entropic_lg_scan(&model, *points)?;
            let violated = scan.violated;
            let mut result = serde_json::to_value(scan).expect("scan serializes");
            result["omega"] = json!(omega);
            Ok(("lg entropic".into(), Outcome::new(result).check(Check::holds("entropic LG violation found", violated))))
        }
    }
}
