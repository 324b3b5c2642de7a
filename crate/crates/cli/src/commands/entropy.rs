use serde_json::json;

use chronoq::infotheory::{entropic_uncertainty_bound, typical_codec_roundtrip, ProbDist, TypicalCodec};
use chronoq::qcore::{born_distribution, computational_basis, random_state, x_basis, Module, StateVector, TOL_ALG};

use crate::{Check, CliResult, Ctx, EntropyCmd, Outcome};

/// Probability that a Bernoulli(p) block lands in the codebook. The codec admits whole
/// weight classes, so one representative per weight decides the class.
fn codebook_mass(codec: &TypicalCodec, p: f64) -> CliResult<f64> {
    let n = codec.n();
    let mut mass = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        let seq: Vec<usize> = (0..n).map(|i| (i < k) as usize).collect();
        if codec.encode(&seq)?.is_some() {
            mass += binom * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        }
    }
    Ok(mass)
}

fn codec(n: usize, p: f64, rate: f64, ctx: &Ctx) -> CliResult<Outcome> {
    let codec = TypicalCodec::for_rate(n, rate, ProbDist::bernoulli(p)?)?;
    let stats = typical_codec_roundtrip(&codec, ctx.trials, &ctx.rng(Module::Info));
    let analytic = codebook_mass(&codec, p)?;
    let se = (analytic * (1.0 - analytic) / stats.trials as f64).sqrt();
    Ok(Outcome::new(json!({
        "n": n,
        "p": p,
        "entropy": codec.source().entropy(),
        "rate": rate,
        "width": codec.width(),
        "codebook_len": codec.codebook_len(),
        "trials": stats.trials,
        "successes": stats.successes,
        "success_rate": stats.success_rate,
        "analytic_success": analytic,
        "std_err": se,
    }))
    .check(Check::statistical("success rate", stats.success_rate, analytic, se)))
}

fn uncertainty(samples: u64, ctx: &Ctx) -> CliResult<Outcome> {
    let (z, x): (Vec<StateVector>, Vec<StateVector>) = (computational_basis(2), x_basis());
    let bound = entropic_uncertainty_bound(&x, &z)?;
    let rng = ctx.rng(Module::Info);
    let (mut min, mut sum) = (f64::INFINITY, 0.0);
    for s in 0..samples {
        let psi: StateVector = random_state(2, &mut rng.fork(s));
        let h = |basis: &[StateVector]| -> CliResult<f64> {
            Ok(ProbDist::from_weights(&born_distribution(&psi, basis)?)?.entropy())
        };
        let total = h(&x)? + h(&z)?;
        min = min.min(total);
        sum += total;
    }
    Ok(Outcome::new(json!({
        "samples": samples,
        "bound": bound,
        "min_sum": min,
        "mean_sum": sum / samples as f64,
    }))
    .check(Check::at_least("H(X) + H(Z) >= bound", min, bound, ctx.tol(TOL_ALG))))
}

pub fn run(cmd: &EntropyCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    Ok(match cmd {
        EntropyCmd::Codec { n, p, rate } => ("entropy codec".into(), codec(*n, *p, *rate, ctx)?),
        EntropyCmd::Uncertainty { samples } => ("entropy uncertainty".into(), uncertainty(*samples, ctx)?),
    })
}
