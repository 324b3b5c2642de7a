use serde_json::json;

use chronoq::entangle::{
    chsh_monte_carlo, chsh_value, concurrence, horodecki_max, optimize_chsh, ppt_min_eigenvalue, ppt_spectrum,
    werner_chsh_crossing, ObservableSettings, WernerState,
};
use chronoq::qcore::{bell_state, random_state, BellLabel, DensityOperator, Module, StateVector, TOL_ALG};

use crate::{Check, ChshSource, CliResult, Ctx, EntangleCmd, Outcome};

/// Partial-transpose spectrum of a unit-trace Werner state, ascending.
fn werner_pt_spectrum(f: f64) -> [f64; 4] {
    let mut s = [(3.0 - 6.0 * f) / 6.0, (2.0 * f + 1.0) / 6.0, (2.0 * f + 1.0) / 6.0, (2.0 * f + 1.0) / 6.0];
    s.sort_by(f64::total_cmp);
    s
}

fn werner(points: u64, ctx: &Ctx) -> CliResult<Outcome> {
    let tol = ctx.tol(TOL_ALG);
    let mut rows = Vec::new();
    let (mut spectrum_err, mut onset_ok) = (0.0f64, true);
    for k in 0..points {
        let f = k as f64 / (points - 1) as f64;
        let w = WernerState::new(f)?;
        let mut spec = ppt_spectrum(&w.rho, (2, 2), 1)?;
        spec.sort_by(f64::total_cmp);
        let expected = werner_pt_spectrum(f);
        let err = spec.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        spectrum_err = spectrum_err.max(err);
        let entangled = spec[0] < -tol;
        onset_ok &= entangled == (f > 0.5);
        let chsh_max = horodecki_max(&w.rho)?;
        rows.push(json!({
            "f": f,
            "pt_min": spec[0],
            "pt_spectrum": spec,
            "entangled": entangled,
            "chsh_max": chsh_max,
            "violates_chsh": chsh_max > 2.0 + tol,
        }));
    }
    let crossing = werner_chsh_crossing(1e-6)?;
    let crossing_closed = (1.0 + 3.0 / std::f64::consts::SQRT_2) / 4.0;
    Ok(Outcome::new(json!({ "points": points, "chsh_crossing": crossing, "rows": rows }))
        .check(Check::at_most("pt spectrum matches (2F+1)/6, (3-6F)/6", spectrum_err, 0.0, tol))
        .check(Check::holds("negativity onset at F = 0.5", onset_ok))
        .check(Check::within("chsh crossing", crossing, crossing_closed, 0.005)))
}

fn chsh(source: ChshSource, f: f64, ctx: &Ctx) -> CliResult<Outcome> {
    let (rho, closed) = match source {
        ChshSource::Singlet => (DensityOperator::from_pure(&bell_state(BellLabel::PsiMinus)), 2.0 * std::f64::consts::SQRT_2),
        ChshSource::Werner => {
            let w = WernerState::new(f)?;
            (w.rho, 2.0 * std::f64::consts::SQRT_2 * (4.0 * f - 1.0) / 3.0)
        }
    };
    let settings = ObservableSettings::standard();
    let analytic = chsh_value(&rho, &settings)?;
    let mc = chsh_monte_carlo(&rho, &settings, ctx.trials, &ctx.rng(Module::Entangle))?;
    let optimum = optimize_chsh(&rho)?;
    let tol = ctx.tol(TOL_ALG);
    Ok(Outcome::new(json!({
        "source": match source { ChshSource::Singlet => "singlet", ChshSource::Werner => "werner" },
        "f": if source == ChshSource::Werner { Some(f) } else { None },
        "analytic": analytic,
        "closed_form": closed,
        "optimized": optimum.value,
        "optimized_settings": optimum.vectors,
        "monte_carlo": mc,
    }))
    .check(Check::within("analytic CHSH", analytic, closed, tol))
    .check(Check::statistical("sampled CHSH", mc.value, analytic, mc.std_err))
    .check(Check::at_least("optimized at least standard", optimum.value, analytic, tol)))
}

fn concurrence_scan(samples: u64, ctx: &Ctx) -> CliResult<Outcome> {
    let tol = ctx.tol(TOL_ALG);
    let rng = ctx.rng(Module::Entangle);
    let (mut oracle_err, mut ppt_err, mut sum, mut entangled) = (0.0f64, 0.0f64, 0.0, 0u64);
    for s in 0..samples {
        let psi: StateVector = random_state(4, &mut rng.fork(s));
        let a = psi.amplitudes();
        let oracle = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let c = concurrence(&psi, (2, 2))?;
        let pt_min = ppt_min_eigenvalue(&DensityOperator::from_pure(&psi), (2, 2), 1)?;
        oracle_err = oracle_err.max((c - oracle).abs());
        ppt_err = ppt_err.max((pt_min + c / 2.0).abs());
        sum += c;
        entangled += (pt_min < -tol) as u64;
    }
    Ok(Outcome::new(json!({
        "samples": samples,
        "mean_concurrence": sum / samples as f64,
        "entangled": entangled,
        "max_oracle_deviation": oracle_err,
        "max_pt_deviation": ppt_err,
    }))
    .check(Check::at_most("concurrence = 2|ad - bc|", oracle_err, 0.0, tol))
    .check(Check::at_most("pt minimum = -C/2", ppt_err, 0.0, tol)))
}

pub fn run(cmd: &EntangleCmd, ctx: &Ctx) -> CliResult<(String, Outcome)> {
    Ok(match cmd {
        EntangleCmd::Werner { points } => ("entangle werner".into(), werner(*points, ctx)?),
        EntangleCmd::Chsh { source, f } => ("entangle chsh".into(), chsh(*source, *f, ctx)?),
        EntangleCmd::Concurrence { samples } => ("entangle concurrence".into(), concurrence_scan(*samples, ctx)?),
    })
}
