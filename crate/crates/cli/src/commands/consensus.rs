use serde_json::json;

use chronoq::consensus::{averaged_pass_probability, check_fidelity_bounds, ghz_fidelity, Network};
use chronoq::qcore::{ghz_state, random_unitary, DensityOperator, Module, RandomSource, MAX_QUBITS};
use chronoq::Error;

use crate::{Check, CliResult, ConsensusCmd, Ctx, NetworkArgs, Outcome};

/// Stream offset for drawing cheat unitaries, away from the round streams.
const CHEAT_STREAM: u64 = 1 << 40;

fn candidate(net: &NetworkArgs) -> CliResult<DensityOperator> {
    if !(0.0..=1.0).contains(&net.noise) {
        return Err(Error::InvalidArgument(format!("noise {} outside [0, 1]", net.noise)).into());
    }
    if net.nodes < 2 || net.nodes > MAX_QUBITS / 2 {
        return Err(Error::InvalidArgument(format!("nodes must be in 2..={}", MAX_QUBITS / 2)).into());
    }
    let ghz = DensityOperator::from_pure(&ghz_state(net.nodes)?);
    let mixed = DensityOperator::maximally_mixed(1 << net.nodes)?;
    Ok(DensityOperator::mixture(&[(1.0 - net.noise, ghz), (net.noise, mixed)])?)
}

/// The last `dishonest` nodes apply Haar-random single-qubit rotations.
fn network(n: usize, dishonest: usize, rng: &RandomSource) -> CliResult<Network> {
    if dishonest > n {
        return Err(Error::InvalidArgument(format!("{dishonest} dishonest nodes out of {n}")).into());
    }
    let mut net = Network::honest(n)?;
    for id in n - dishonest..n {
        net = net.with_cheat(id, random_unitary(2, &mut rng.fork(CHEAT_STREAM + id as u64)))?;
    }
    Ok(net)
}

pub fn run(cmd: &ConsensusCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    let rng = ctx.rng(Module::Consensus);
    match cmd {
        ConsensusCmd::Run { net, rounds, dishonest } => {
            let rho = candidate(net)?;
            let network = network(net.nodes, *dishonest, &rng)?;
            let est = network.estimate_pass_probability(&rho, *rounds, &rng)?;
            let analytic = averaged_pass_probability(&network.effective_state(&rho)?)?;
            let se = (analytic * (1.0 - analytic) / *rounds as f64).max(0.0).sqrt();
            let outcome = Outcome::new(json!({
                "n": net.nodes,
                "rounds": rounds,
                "dishonest": dishonest,
                "noise": net.noise,
                "passes": est.passes,
                "pass_rate": est.p_hat,
                "std_err": est.std_err,
                "analytic_pass": analytic,
                "fidelity": ghz_fidelity(&rho)?,
            }))
            .check(Check::statistical("pass rate", est.p_hat, analytic, se));
            Ok(("consensus run".into(), outcome))
        }
        ConsensusCmd::Bounds { net, rounds, honest, samples } => {
            let rho = candidate(net)?;
            let report = check_fidelity_bounds(&rho, *honest, *samples, *rounds, &rng)?;
            let rows: Vec<_> = report
                .cheats
                .iter()
                .map(|c| {
                    json!({
                        "kind": c.kind,
                        "pass_rate": c.pass.p_hat,
                        "lower": c.lower,
                        "f_prime": c.f_prime,
                        "ok": c.ok,
                    })
                })
                .collect();
            let outcome = Outcome::new(json!({
                "n": report.n,
                "rounds": report.rounds,
                "honest_count": report.honest_count,
                "noise": net.noise,
                "pass_rate": report.pass_rate,
                "std_err": report.std_err,
                "fidelity": report.fidelity,
                "honest_lower": report.honest_lower,
                "honest_bound_ok": report.honest_bound_ok,
                "slack": report.slack,
                "dishonest_bound_ok": report.dishonest_bound_ok,
                "rows": rows,
            }))
            .check(Check::holds("F >= 2P - 1 - 3SE", report.honest_bound_ok))
            .check(Check::holds("4P - 3 <= F' + slack", report.dishonest_bound_ok));
            Ok(("consensus bounds".into(), outcome))
        }
        ConsensusCmd::Admit { net, rounds, threshold, record, dishonest } => {
            let rho = candidate(net)?;
            let mut network = network(net.nodes, *dishonest, &rng)?;
            let report = network.admit_block(&rho, *record, *rounds, *threshold, &mut rng.clone())?;
            let mut result = serde_json::to_value(&report).expect("admission serializes");
            result["record"] = json!(record.to_string());
            result["n"] = json!(net.nodes);
            let fidelity = ghz_fidelity(&rho)?;
            result["fidelity"] = json!(fidelity);
            let outcome = Outcome::new(result);
            let outcome = if *dishonest == 0 && net.noise == 0.0 {
                outcome.check(Check::holds("ideal honest candidate accepted", report.accepted || *threshold > 1.0))
            } else {
                outcome
            };
            Ok(("consensus admit".into(), outcome))
        }
    }
}
