use serde_json::{json, Value};

use chronoq::games::{
    best_classical_chsh, chsh_game, monty_classic, monty_ignorant, monty_teleport, pbr_game, qkd_session,
    superdense_roundtrip, teleport_standard, unreliable_teleport, ChshStrategy, Eavesdropper, GameStats, Ontology,
    Strategy,
};
use chronoq::qcore::{random_state, BellLabel, DensityOperator, Module, RandomSource, StateVector, TOL_ALG};
use chronoq::{Error, Rational};

use crate::{Check, ChshPlayer, CliResult, Ctx, GameCmd, Outcome};

fn stats_checks(s: &GameStats) -> Vec<Check> {
    let label = format!("{} {}", s.game, s.strategy);
    let mut checks = vec![Check::statistical(format!("{label} win rate"), s.empirical, s.analytic, s.std_err)];
    if let Some(e) = &s.event {
        checks.push(Check::statistical(format!("{label} {}", e.event), e.empirical, e.analytic, e.std_err));
    }
    checks
}

fn single(s: GameStats) -> Outcome {
    let checks = stats_checks(&s);
    Outcome::new(serde_json::to_value(&s).expect("stats serialize")).checks(checks)
}

fn table(stats: Vec<GameStats>) -> Outcome {
    let checks: Vec<Check> = stats.iter().flat_map(stats_checks).collect();
    let rows: Vec<Value> = stats.iter().map(|s| serde_json::to_value(s).expect("stats serialize")).collect();
    Outcome::new(json!({ "games": rows.len(), "rows": rows })).checks(checks)
}

fn chsh_rows(player: ChshPlayer, trials: u64, rng: &RandomSource) -> CliResult<Vec<GameStats>> {
    let mut out = Vec::new();
    if player != ChshPlayer::Quantum {
        out.push(chsh_game(&best_classical_chsh().1, trials, &rng.fork(0))?);
    }
    if player != ChshPlayer::Classical {
        out.push(chsh_game(&ChshStrategy::QuantumOptimal, trials, &rng.fork(1))?);
    }
    Ok(out)
}

fn parse_split(s: &str) -> CliResult<[Rational; 3]> {
    let parts: Vec<Rational> = s
        .split(',')
        .map(|p| p.trim().parse::<Rational>().map_err(|e| Error::InvalidArgument(format!("split entry `{p}`: {e}"))))
        .collect::<Result<_, _>>()?;
    <[Rational; 3]>::try_from(parts)
        .map_err(|_| Error::InvalidArgument("split needs exactly three entries q1,q2,q3".into()).into())
}

fn teleport(ctx: &Ctx) -> CliResult<Outcome> {
    let rng = ctx.rng(Module::Games);
    let tol = ctx.tol(TOL_ALG);
    let mixed = DensityOperator::maximally_mixed(2)?;
    let (mut min_fidelity, mut reduced_err, mut branches) = (f64::INFINITY, 0.0f64, [0u64; 4]);
    for t in 0..ctx.trials {
        let mut r = rng.fork(t);
        let psi: StateVector = random_state(2, &mut r);
        let rep = teleport_standard(&psi, &mut r)?;
        min_fidelity = min_fidelity.min(rep.fidelity);
        reduced_err = reduced_err.max(rep.bob_premeasure_reduced.as_operator().max_abs_diff(&mixed.as_operator()));
        branches[2 * rep.branch.0 as usize + rep.branch.1 as usize] += 1;
    }
    let n = ctx.trials as f64;
    let se = (0.25 * 0.75 / n).sqrt();
    let rows: Vec<Value> = branches
        .iter()
        .enumerate()
        .map(|(i, &c)| json!({ "branch": format!("{}{}", i >> 1, i & 1), "count": c, "frequency": c as f64 / n }))
        .collect();
    let branch_checks =
        branches.iter().enumerate().map(|(i, &c)| Check::statistical(format!("branch {}{} rate", i >> 1, i & 1), c as f64 / n, 0.25, se));
    Ok(Outcome::new(json!({
        "states": ctx.trials,
        "min_fidelity": min_fidelity,
        "max_reduced_deviation": reduced_err,
        "rows": rows,
    }))
    .check(Check::within("teleported fidelity", min_fidelity, 1.0, tol))
    .check(Check::at_most("Bob's reduced state before the message is I/2", reduced_err, 0.0, tol))
    .checks(branch_checks))
}

fn superdense(ctx: &Ctx) -> CliResult<Outcome> {
    let rng = ctx.rng(Module::Games);
    let mut counts = [[0u64; 2]; 4];
    for t in 0..ctx.trials {
        let mut r = rng.fork(t);
        let bits = (r.bit(), r.bit());
        let decoded = superdense_roundtrip(bits, &mut r)?;
        let k = 2 * bits.0 as usize + bits.1 as usize;
        counts[k][(decoded == bits) as usize] += 1;
    }
    let errors: u64 = counts.iter().map(|c| c[0]).sum();
    let rows: Vec<Value> = counts
        .iter()
        .enumerate()
        .map(|(k, c)| json!({ "bits": format!("{}{}", k >> 1, k & 1), "sent": c[0] + c[1], "decoded_ok": c[1] }))
        .collect();
    Ok(Outcome::new(json!({ "trials": ctx.trials, "errors": errors, "rows": rows }))
        .check(Check::equals("decoding errors", errors, 0u64)))
}

fn qkd(protocol: chronoq::games::QkdProtocol, eve: Eavesdropper, key_bits: usize, ctx: &Ctx) -> CliResult<Outcome> {
    let report = qkd_session(protocol, key_bits, eve, &ctx.rng(Module::Games))?;
    let expected = match eve {
        Eavesdropper::None => 0.0,
        Eavesdropper::InterceptResend => 0.25,
    };
    let se = (expected * (1.0 - expected) / key_bits as f64).sqrt();
    let mut result = serde_json::to_value(&report).expect("qkd report serializes");
    result["expected_qber"] = json!(expected);
    Ok(Outcome::new(result).check(Check::statistical("qber", report.qber, expected, se)))
}

fn all(ctx: &Ctx) -> CliResult<Outcome> {
    let rng = ctx.rng(Module::Games);
    let n = ctx.trials;
    let mut stats = Vec::new();
    let epistemic = Ontology::epistemic(Rational::new(1, 4))?;
    for (i, s) in [Strategy::Stick, Strategy::Switch].iter().enumerate() {
        let r = |k: u64| rng.fork(16 * k + i as u64);
        stats.push(monty_classic(s, n, &r(0))?);
        stats.push(monty_ignorant(s, n, &r(1))?);
        stats.push(monty_teleport(s, BellLabel::PhiPlus, n, &r(2))?);
        stats.push(unreliable_teleport(s, n, &r(3))?);
        stats.push(pbr_game(&Ontology::Ontic, s, n, &r(4))?);
        stats.push(pbr_game(&epistemic, s, n, &r(5))?);
    }
    stats.extend(chsh_rows(ChshPlayer::Both, n, &rng.fork(16 * 6))?);
    Ok(table(stats))
}

pub fn run(cmd: &GameCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    let rng = ctx.rng(Module::Games);
    let n = ctx.trials;
    Ok(match cmd {
        GameCmd::MontyClassic(a) => ("game monty-classic".into(), single(monty_classic(&a.strategy, n, &rng)?)),
        GameCmd::MontyIgnorant(a) => ("game monty-ignorant".into(), single(monty_ignorant(&a.strategy, n, &rng)?)),
        GameCmd::Teleport => ("game teleport".into(), teleport(ctx)?),
        GameCmd::MontyTeleport { s, bell } => {
            ("game monty-teleport".into(), single(monty_teleport(&s.strategy, *bell, n, &rng)?))
        }
        GameCmd::UnreliableTeleport(a) => {
            ("game unreliable-teleport".into(), single(unreliable_teleport(&a.strategy, n, &rng)?))
        }
        GameCmd::Superdense => ("game superdense".into(), superdense(ctx)?),
        GameCmd::Chsh { player } => {
            let rows = chsh_rows(*player, n, &rng)?;
            let outcome = if rows.len() == 1 { single(rows.into_iter().next().expect("one row")) } else { table(rows) };
            ("game chsh".into(), outcome)
        }
        GameCmd::PbrOntic(a) => ("game pbr-ontic".into(), single(pbr_game(&Ontology::Ontic, &a.strategy, n, &rng)?)),
        GameCmd::PbrEpistemic { s, q, split } => {
            let ontology = match split {
                Some(split) => Ontology::epistemic_split(parse_split(split)?)?,
                None => Ontology::epistemic(*q)?,
            };
            let stats = pbr_game(&ontology, &s.strategy, n, &rng)?;
            let mut outcome = single(stats);
            outcome.result.insert("q".into(), json!(ontology.q().to_string()));
            ("game pbr-epistemic".into(), outcome)
        }
        GameCmd::Qkd { protocol, eve, key_bits } => ("game qkd".into(), qkd(*protocol, *eve, *key_bits, ctx)?),
        GameCmd::All => ("game all".into(), all(ctx)?),
    })
}
