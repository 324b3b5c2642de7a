use super::*;
use crate::entangle::state_distance;
use crate::error::Error;
use crate::qcore::{
    bell_state, computational_basis, x_basis, BellLabel, DensityOperator, RandomSource, StateVector,
};
use crate::scalar::Cx;

const TOL: f64 = 1e-9;

fn rng(stream: u64) -> RandomSource {
    RandomSource::new(31, stream)
}

fn m(s: &str, t: u64) -> ModeId {
    ModeId::new(s, t)
}

#[test]
fn create_pairs_and_ordering() {
    let mut reg = TemporalRegister::new();
    reg.create_pair(BellLabel::PsiMinus, ("a", "b"), 0).unwrap();
    assert_eq!(reg.live_modes().len(), 2);
    assert!(reg.state().approx_eq(&bell_state(BellLabel::PsiMinus), TOL));
    reg.create_pair(BellLabel::PsiMinus, ("a", "b"), 1).unwrap();
    let expected = bell_state::<f64>(BellLabel::PsiMinus).tensor(&bell_state(BellLabel::PsiMinus)).unwrap();
    assert!(reg.state().approx_eq(&expected, TOL));
    let err = reg.create_pair(BellLabel::PsiMinus, ("c", "d"), 0).unwrap_err();
    assert!(matches!(err, Error::TimeOrder { requested: 0, clock: 1 }));
    let err = reg.create_pair(BellLabel::PsiMinus, ("a", "e"), 1).unwrap_err();
    assert_eq!(err.code(), "DUPLICATE_MODE");
}

#[test]
fn create_after_measurement_must_not_go_back() {
    let mut reg = TemporalRegister::new();
    let (a, b) = reg.create_pair(BellLabel::PhiPlus, ("a", "b"), 0).unwrap();
    let b = reg.delay(&b, 2).unwrap();
    reg.bell_project(&a, &b, BellLabel::PhiPlus).unwrap();
    assert_eq!(reg.clock(), 2);
    assert!(reg.create_pair(BellLabel::PhiPlus, ("c", "d"), 1).is_err());
    assert!(reg.create_pair(BellLabel::PhiPlus, ("c", "d"), 2).is_ok());
}

#[test]
fn delay_relabels_only() {
    let mut reg = TemporalRegister::new();
    let (_, b) = reg.create_pair(BellLabel::PsiMinus, ("a", "b"), 0).unwrap();
    let before = reg.state().clone();
    let b1 = reg.delay(&b, 1).unwrap();
    assert_eq!(reg.live_modes(), vec![m("a", 0), m("b", 1)]);
    assert!(reg.state().approx_eq(&before, 0.0));
    let b3 = reg.delay(&b1, 2).unwrap();

    let mut other = TemporalRegister::new();
    let (_, ob) = other.create_pair(BellLabel::PsiMinus, ("a", "b"), 0).unwrap();
    assert_eq!(other.delay(&ob, 3).unwrap(), b3);
    assert!(matches!(reg.delay(&b, 1), Err(Error::UnknownMode(_))));
    assert!(reg.delay(&b3, 0).is_err());
}

#[test]
fn measuring_both_halves_of_a_pair_returns_its_label() {
    for label in BellLabel::ALL {
        let mut reg = TemporalRegister::new();
        let (a, b) = reg.create_pair(label, ("a", "b"), 0).unwrap();
        let out = reg.bell_measure(&a, &b, &mut rng(1)).unwrap();
        assert_eq!(out.label, label);
        assert!((out.probability - 1.0).abs() < TOL);
        assert!(reg.live_modes().is_empty());
        assert!(matches!(reg.bell_measure(&a, &b, &mut rng(1)), Err(Error::ConsumedMode(_))));
    }
    let mut reg = TemporalRegister::new();
    let (a, _) = reg.create_pair(BellLabel::PhiPlus, ("a", "b"), 0).unwrap();
    assert!(matches!(reg.bell_measure(&a, &a, &mut rng(1)), Err(Error::SelfMeasurement)));
}

/// Oracle: `⟨L|₂₃ (β₁₂ ⊗ β₃₄)` by explicit index sums.
fn outer_after_swap(pair: BellLabel, middle: BellLabel) -> (f64, StateVector) {
    let b = bell_state::<f64>(pair);
    let l = bell_state::<f64>(middle);
    let mut out = vec![Cx::new(0.0, 0.0); 4];
    for q1 in 0..2 {
        for q4 in 0..2 {
            for q2 in 0..2 {
                for q3 in 0..2 {
                    out[q1 * 2 + q4] +=
                        l.amplitude(q2 * 2 + q3).conj() * b.amplitude(q1 * 2 + q2) * b.amplitude(q3 * 2 + q4);
                }
            }
        }
    }
    let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    (p, StateVector::normalized(out).unwrap())
}

#[test]
fn swap_outcomes_are_uniform_and_outer_pair_is_bell() {
    for pair in BellLabel::ALL {
        for middle in BellLabel::ALL {
            let (reg, p) = swap_postselected(pair, middle).unwrap();
            let (p_oracle, outer) = outer_after_swap(pair, middle);
            assert!((p - 0.25).abs() < TOL && (p_oracle - 0.25).abs() < TOL);
            let state = reg.state_in_order(&[m("1", 0), m("4", 2)]).unwrap();
            assert!((state.fidelity(&outer).unwrap() - 1.0).abs() < TOL);
            if pair == BellLabel::PsiMinus {
                assert!((state.fidelity(&bell_state(middle)).unwrap() - 1.0).abs() < TOL);
            }
        }
    }
}

#[test]
fn early_measurement_is_logged_before_late_creation() {
    let basis = computational_basis::<f64>(2);
    for trial in 0..16 {
        let mut r = rng(100 + trial);
        let run = entanglement_swap(BellLabel::PsiMinus, Some(&basis), &mut r).unwrap();
        assert!(run.register.consumed_before_created("1", "4"));
        assert!(!run.register.consumed_before_created("4", "1"));
        let times: Vec<u64> = run.register.events().iter().map(|e| e.t).collect();
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(run.register.live_modes(), vec![m("4", 2)]);
        // Photon 4 is steered to ⟨m₁|L⟩.
        let (_, want) = bell_state::<f64>(run.middle.label)
            .contract(&basis[run.first_outcome.unwrap()], &[0])
            .unwrap();
        assert!(run.register.state().approx_eq_up_to_phase(&want.unwrap(), TOL));
    }
    let jsonl = entanglement_swap(BellLabel::PsiMinus, None, &mut rng(5)).unwrap().register.event_log_jsonl();
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(first["event"], "create");
    assert_eq!(first["t"], 0);
    assert_eq!(first["modes"][0]["spatial"], "1");
}

#[test]
fn first_photon_marginal_ignores_the_swap() {
    for basis in [computational_basis::<f64>(2), x_basis()] {
        let mut with = TemporalRegister::new();
        let (first, m2) = with.create_pair(BellLabel::PsiMinus, ("1", "2"), 0).unwrap();
        let m2 = with.delay(&m2, 1).unwrap();
        let (m3, _) = with.create_pair(BellLabel::PsiMinus, ("3", "4"), 1).unwrap();
        let without = with.clone();
        let rho_without = without.reduced(std::slice::from_ref(&first)).unwrap();
        let mut total = DensityOperator::from_pure(&StateVector::basis(2, 0).unwrap()).as_operator().scale_real(0.0);
        for label in BellLabel::ALL {
            let mut branch = with.clone();
            let p = branch.bell_project(&m2, &m3, label).unwrap();
            total = &total + &branch.reduced(std::slice::from_ref(&first)).unwrap().as_operator().scale_real(p);
        }
        let rho_with = DensityOperator::new(total).unwrap();
        assert!(rho_with.approx_eq(&rho_without, TOL));
        for b in &basis {
            let p: f64 = rho_with.expectation(&crate::qcore::Operator::projector(b)).unwrap().re;
            assert!((p - 0.5).abs() < TOL);
        }
    }
}

#[test]
fn pbs_fusion_of_psi_plus_pairs() {
    let mut reg = TemporalRegister::new();
    let (a0, b0) = reg.create_pair(BellLabel::PsiPlus, ("a0", "b0"), 0).unwrap();
    let b0 = reg.delay(&b0, 1).unwrap();
    let (a1, b1) = reg.create_pair(BellLabel::PsiPlus, ("a1", "b1"), 1).unwrap();
    let b1 = reg.delay(&b1, 1).unwrap();
    assert!((reg.fusion_probability(&b0, &a1, 0).unwrap() - 0.5).abs() < TOL);
    let p = reg.fuse_postselect(&b0, &a1, 0).unwrap();
    assert!((p - 0.5).abs() < TOL);
    let state = reg.state_in_order(&[a0, b0, a1, b1]).unwrap();
    let mut amps = [0.0; 16];
    amps[0b0110] = 1.0;
    amps[0b1001] = 1.0;
    assert!(state.approx_eq(&StateVector::from_reals(&amps).unwrap(), TOL));
}

#[test]
fn fusing_aligned_modes_always_succeeds_and_failure_invalidates() {
    let mut reg = TemporalRegister::new();
    let ids = reg.create(&StateVector::from_bits(&[0, 0]).unwrap(), &["a", "b"], 0).unwrap();
    assert!(reg.pbs_fuse(&ids[0], &ids[1], &mut rng(2)).unwrap());
    assert!(reg.is_valid());

    let mut bad = TemporalRegister::new();
    let ids = bad.create(&StateVector::from_bits(&[0, 1]).unwrap(), &["a", "b"], 0).unwrap();
    assert!(!bad.pbs_fuse(&ids[0], &ids[1], &mut rng(2)).unwrap());
    assert!(!bad.is_valid());
    assert_eq!(bad.delay(&ids[0], 1).unwrap_err().code(), "INVALID_REGISTER");
}

#[test]
fn fused_phi_pairs_match_temporal_ghz() {
    for n in 1..=4 {
        let chain = fuse_pairs(BellLabel::PhiPlus, n).unwrap();
        let state = chain.register.state_in_order(&chain.order).unwrap();
        assert!(state.approx_eq(&temporal_ghz_closed_form(n).unwrap(), TOL));
        assert!((chain.probability - 0.5f64.powi(n as i32 - 1)).abs() < TOL);
        assert_eq!(chain.order.first().unwrap(), &m("a0", 0));
        assert_eq!(chain.order.last().unwrap(), &m(&format!("b{}", n - 1), n as u64));
    }
}

#[test]
fn recursive_density_matches_fusion() {
    for label in BellLabel::ALL {
        for n in 1..=3 {
            let pair = DensityOperator::from_pure(&bell_state(label));
            let rho = ghz_density_recursive(&pair, n).unwrap();
            let chain = fuse_pairs(label, n).unwrap();
            let fused = DensityOperator::from_pure(&chain.register.state_in_order(&chain.order).unwrap());
            assert!(rho.approx_eq(&fused, TOL));
            assert!((rho.as_operator().trace().re - 1.0).abs() < TOL);
        }
    }
    let mixed = DensityOperator::mixture(&[
        (0.9, DensityOperator::from_pure(&bell_state(BellLabel::PhiPlus))),
        (0.1, DensityOperator::maximally_mixed(4).unwrap()),
    ])
    .unwrap();
    assert!(ghz_density_recursive(&mixed, 1).unwrap().approx_eq(&mixed, TOL));
    let fid = state_distance(
        &ghz_density_recursive(&mixed, 2).unwrap(),
        &DensityOperator::from_pure(&temporal_ghz_closed_form(2).unwrap()),
    )
    .unwrap()
    .fidelity;
    assert!(fid < 1.0 && fid > 0.8);
    assert!(ghz_density_recursive(&mixed, 6).is_err());
}

#[test]
fn accessibility_follows_the_clock() {
    let chain = fuse_pairs(BellLabel::PhiPlus, 3).unwrap();
    let mut reg = chain.register.clone();
    reg.advance_clock(3).unwrap();
    let accessible: Vec<&ModeId> = chain.order.iter().filter(|m| reg.is_accessible(m)).collect();
    assert_eq!(accessible, vec![&m("b2", 3)]);
    assert!(reg.advance_clock(2).is_err());
}

#[test]
fn h_graph_state_is_normalized_target() {
    let h = h_graph_state();
    assert_eq!(h.dim(), 64);
    let cut = crate::entangle::schmidt(&h, (8, 8)).unwrap();
    assert_eq!(cut.rank(), 2);
    assert!(h.fidelity(&temporal_ghz_closed_form(3).unwrap()).unwrap() < 1.0);
}
