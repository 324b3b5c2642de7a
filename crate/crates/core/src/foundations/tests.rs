use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::qcore::{
    computational_basis, pauli_x, pauli_z, plus, random_basis, random_density, random_state, DensityOperator, Operator,
    RandomSource, StateVector,
};

const TOL: f64 = 1e-9;

fn rng(stream: u64) -> RandomSource {
    RandomSource::new(17, stream)
}

fn max_diff(a: &Operator, b: &Operator) -> f64 {
    a.max_abs_diff(b)
}

#[test]
fn pure_zero_reconstructs_in_standard_frame() {
    let rho = DensityOperator::from_pure(&StateVector::basis(2, 0).unwrap());
    let frame = computational_basis(2);
    let val = Valuation::from_density(&rho, &frame).unwrap();
    assert_eq!(val.len(), 2 * 4 - 2);
    assert!((val.value(&frame[0]).unwrap() - 1.0).abs() < TOL);
    assert!(val.value(&frame[1]).unwrap().abs() < TOL);
    assert!((val.value(&plus()).unwrap() - 0.5).abs() < TOL);
    let out = gleason_reconstruct(&val, &frame).unwrap();
    assert!(out.approx_eq(&rho, TOL));
    val.check_frames().unwrap();
    assert_eq!(val.frames().len(), 3);
}

/// Oracle: `ρ_jk` from the polarization identity evaluated directly on `ρ`.
fn polarization_oracle(rho: &DensityOperator, frame: &[StateVector]) -> Operator {
    let d = rho.dim();
    let f = |x: &[crate::scalar::Cx<f64>]| {
        if x.iter().all(|a| a.norm() < TOL) {
            return 0.0;
        }
        let v = StateVector::normalized(x.to_vec()).unwrap();
        let n2: f64 = x.iter().map(|a| a.norm_sqr()).sum();
        n2 * rho.expectation(&Operator::projector(&v)).unwrap().re
    };
    let mut m = nalgebra::DMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let (x, y) = (frame[j].amplitudes(), frame[k].amplitudes());
            let comb = |c: crate::scalar::Cx<f64>| x.iter().zip(y).map(|(a, b)| a + c * b).collect::<Vec<_>>();
            let one = crate::scalar::Cx::new(1.0, 0.0);
            let i = crate::scalar::Cx::new(0.0, 1.0);
            let re = (f(&comb(one)) - f(&comb(-one))) / 4.0;
            let im = -(f(&comb(i)) - f(&comb(-i))) / 4.0;
            m[(j, k)] = crate::scalar::Cx::new(re, im);
        }
    }
    let n = nalgebra::DMatrix::from_fn(d, d, |r, c| frame[c].amplitude(r));
    Operator::from_matrix(&n * m * n.adjoint()).unwrap()
}

#[test]
fn round_trip_on_random_states() {
    let mut r = rng(1);
    for d in 2..=4 {
        for _ in 0..50 {
            let rho = random_density(d, 1 + r.below(d), &mut r);
            let frame = random_basis(d, &mut r);
            let val = Valuation::from_density(&rho, &frame).unwrap();
            assert_eq!(val.len(), 2 * d * d - d);
            let out = gleason_reconstruct(&val, &frame).unwrap();
            assert!(max_diff(&out.as_operator(), &rho.as_operator()) <= TOL_RECON);
            assert!(max_diff(&polarization_oracle(&rho, &frame), &rho.as_operator()) <= TOL_RECON);
        }
    }
}

#[test]
fn qubit_pauli_form_matches_general_formula() {
    let mut r = rng(2);
    for _ in 0..50 {
        let rho = random_density(2, 2, &mut r);
        let frame = random_basis(2, &mut r);
        let val = Valuation::from_density(&rho, &frame).unwrap();
        let pauli = gleason_qubit_pauli(&val, &frame).unwrap();
        assert!(max_diff(&pauli, &rho.as_operator()) < TOL);
        assert!(max_diff(&pauli, &gleason_reconstruct_raw(&val, &frame).unwrap()) < TOL);
    }
}

#[test]
fn missing_entries_and_bad_frames_are_rejected() {
    let rho = DensityOperator::maximally_mixed(3).unwrap();
    let frame = computational_basis(3);
    let mut val = Valuation::new(3);
    val.add_frame(&frame, &[1.0 / 3.0; 3]).unwrap();
    assert!(matches!(gleason_reconstruct(&val, &frame), Err(Error::MissingValuation(_))));
    assert!(val.add_frame(&frame, &[0.5, 0.5, 0.5]).is_err());
    let bad = vec![frame[0].clone(), frame[0].clone(), frame[2].clone()];
    assert!(Valuation::from_density(&rho, &bad).is_err());
    assert!(val.insert(&StateVector::basis(2, 0).unwrap(), 0.5).is_err());
}

#[test]
fn noisy_valuations_are_repaired() {
    let mut r = rng(3);
    for d in 2..=4 {
        for _ in 0..20 {
            let rho = random_density(d, 1, &mut r);
            let frame = random_basis(d, &mut r);
            let noisy = Valuation::from_density(&rho, &frame).unwrap().perturbed(1e-4, &mut r);
            let out = gleason_reconstruct(&noisy, &frame).unwrap();
            assert!(out.as_operator().is_psd(TOL));
            assert!((out.as_operator().trace().re - 1.0).abs() < TOL);
            assert!(max_diff(&out.as_operator(), &rho.as_operator()) <= 1e-2);
        }
    }
}

#[test]
fn grossly_inconsistent_valuations_fail() {
    let frame = computational_basis(2);
    let mut val = Valuation::new(2);
    for (n, v) in Valuation::required_vectors(&frame).iter().zip([1.0, 0.0, 1.0, 0.0, 1.0, 0.0]) {
        val.insert(n, v).unwrap();
    }
    let raw = gleason_reconstruct_raw(&val, &frame).unwrap();
    assert!(raw.min_eigenvalue() < -PSD_REPAIR_TOL);
    assert!(matches!(gleason_reconstruct(&val, &frame), Err(Error::NotPsd(_))));
}

#[test]
fn decoherence_examples() {
    let z = computational_basis(2);
    let diag = DensityOperator::new(Operator::from_reals(2, &[0.3, 0.0, 0.0, 0.7]).unwrap()).unwrap();
    assert!(gleason_decohere(&diag, &z).unwrap().approx_eq(&diag, TOL));
    let p = DensityOperator::from_pure(&plus());
    assert!(gleason_decohere(&p, &z).unwrap().approx_eq(&DensityOperator::maximally_mixed(2).unwrap(), TOL));
}

#[test]
fn frame_average_recovers_the_state() {
    let mut r = rng(4);
    for d in 2..=4 {
        let rho = random_density(d, d, &mut r);
        let avg = decoherence_average(&rho, 10_000, &rng(40 + d as u64)).unwrap();
        let err = max_diff(&avg, &rho.as_operator());
        assert!(err <= 0.02, "d={d} err={err}");
        assert!((avg.trace().re - 1.0).abs() < 1e-9);
    }
    let a = decoherence_average(&DensityOperator::maximally_mixed(3).unwrap(), 700, &rng(5)).unwrap();
    let b = decoherence_average(&DensityOperator::maximally_mixed(3).unwrap(), 700, &rng(5)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn k3_examples() {
    let m = PrecessionModel::new(1.0).unwrap();
    assert!((lg_k3(&m, 1e-7).unwrap() - 1.0).abs() < 1e-9);
    assert!((lg_k3(&m, PI / 3.0).unwrap() - 1.5).abs() < TOL);
    assert!(lg_k3(&m, 0.0).is_err());
    let best = lg_k3_max(&m).unwrap();
    assert!((best.k3_max - 1.5).abs() < 1e-6);
    assert!((best.tau_star - PI / 3.0).abs() < 1e-4 || (best.tau_star - 5.0 * PI / 3.0).abs() < 1e-4);
    let fast = PrecessionModel::new(2.5).unwrap();
    let best = lg_k3_max(&fast).unwrap();
    assert!((best.k3_max - 1.5).abs() < 1e-6);
}

#[test]
fn sequential_simulator_matches_closed_form() {
    let mut r = rng(6);
    for _ in 0..100 {
        let omega = 0.1 + 3.0 * r.uniform();
        let n = [r.normal(), r.normal(), r.normal()];
        let obs = crate::entangle::bloch_observable(n);
        let m = PrecessionModel::with(omega, random_state(2, &mut r), obs).unwrap();
        let (t1, dt) = (r.uniform(), 2.0 * r.uniform());
        let sim = two_time_correlator(&m, (t1, &m.observable), (t1 + dt, &m.observable)).unwrap();
        assert!((sim - m.closed_form_correlator(dt)).abs() < TOL);
        let tau = 0.05 + r.uniform();
        let k3 = 2.0 * m.closed_form_correlator(tau) - m.closed_form_correlator(2.0 * tau);
        assert!((lg_k3(&m, tau).unwrap() - k3).abs() < TOL);
        let dist = m.sequential_distribution(&[(0.1, &m.observable), (0.5, &m.observable), (0.9, &m.observable)]).unwrap();
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < TOL);
    }
    let m = PrecessionModel::new(1.0).unwrap();
    assert!(m.sequential_distribution(&[(1.0, &m.observable), (0.5, &m.observable)]).is_err());
    assert!(PrecessionModel::with(1.0, StateVector::basis(2, 0).unwrap(), Operator::identity(2)).is_err());
}

#[test]
fn commuting_models_respect_the_bounds() {
    let mut r = rng(7);
    for _ in 0..1000 {
        let m = MarkovModel::random(&mut r);
        let tau = m.time_scale() * r.uniform() + 1e-6;
        let k3 = lg_k3(&m, tau).unwrap();
        assert!((-3.0 - TOL..=1.0 + TOL).contains(&k3), "{k3}");
        let s = TemporalChshSettings {
            a1: m.random_response(&mut r),
            a2: m.random_response(&mut r),
            b1: m.random_response(&mut r),
            b2: m.random_response(&mut r),
        };
        let (t1, t2) = (r.uniform(), 1.0 + r.uniform());
        assert!(temporal_chsh(&m, &s, t1, t2).unwrap().abs() <= 2.0 + TOL);
        let e = entropic_lg_check(&m, t1, 0.5 * (t1 + t2), t2).unwrap();
        assert!(!e.violated, "{e:?}");
    }
    // A precession model whose observable commutes with the dynamics is classical.
    let m = PrecessionModel::with(1.3, plus(), pauli_x()).unwrap();
    assert!((lg_k3_max(&m).unwrap().k3_max - 1.0).abs() < TOL);
}

#[test]
fn temporal_chsh_optimum() {
    let m = PrecessionModel::new(0.7).unwrap();
    let (value, s) = optimize_temporal_chsh(&m, 0.3, 1.9).unwrap();
    assert!((value - 2.0 * 2f64.sqrt()).abs() < 1e-3, "{value}");
    assert!(value <= 2.0 * 2f64.sqrt() + TOL);
    let z = pauli_z::<f64>();
    let commuting = TemporalChshSettings { a1: z.clone(), a2: z.clone(), b1: z.clone(), b2: z.clone() };
    assert!(temporal_chsh(&m, &commuting, 0.3, 1.9).unwrap().abs() <= 2.0 + TOL);
    // Swapping A₁ ↔ A₂ moves the subtracted term from ⟨A₁B₂⟩ to ⟨A₂B₂⟩.
    let swapped = TemporalChshSettings { a1: s.a2.clone(), a2: s.a1.clone(), b1: s.b1.clone(), b2: s.b2.clone() };
    let c = |a: &Operator, b: &Operator| two_time_correlator(&m, (0.3, a), (1.9, b)).unwrap();
    let sw = temporal_chsh(&m, &swapped, 0.3, 1.9).unwrap();
    assert!((value - sw - 2.0 * (c(&s.a2, &s.b2) - c(&s.a1, &s.b2))).abs() < TOL);
}

#[test]
fn entropic_lg_violation_for_precession() {
    let m = PrecessionModel::new(1.0).unwrap();
    let scan = entropic_lg_scan(&m, 2000).unwrap();
    assert!(scan.violated && scan.margin > 0.0, "{scan:?}");
    let e = entropic_lg_check(&m, 0.0, scan.tau, 2.0 * scan.tau).unwrap();
    assert!(e.violated);
    let degenerate = entropic_lg_check(&m, 0.4, 0.4, 1.1).unwrap();
    assert!((degenerate.lhs - degenerate.rhs).abs() < TOL && !degenerate.violated);
    assert!(entropic_lg_check(&m, 1.0, 0.5, 2.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn markov_k3_is_bounded(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let mut r = RandomSource::new(seed, 0);
        let m = MarkovModel::random(&mut r);
        let k3 = lg_k3(&m, 1e-6 + frac * m.time_scale()).unwrap();
        prop_assert!((-3.0 - TOL..=1.0 + TOL).contains(&k3));
    }

    #[test]
    fn precession_k3_never_exceeds_three_halves(omega in 0.05f64..5.0, tau in 0.001f64..10.0) {
        let m = PrecessionModel::new(omega).unwrap();
        prop_assert!(lg_k3(&m, tau).unwrap() <= 1.5 + TOL);
    }
}
