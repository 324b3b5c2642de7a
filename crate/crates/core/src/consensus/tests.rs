use std::f64::consts::PI;

use super::*;
use crate::chain::Record;
use crate::qcore::{
    ghz_state, minus, pauli_z, plus, random_density, random_state, DensityOperator, RandomSource, StateVector,
};

const TOL: f64 = 1e-9;

fn rng(stream: u64) -> RandomSource {
    RandomSource::new(5, stream)
}

fn ghz(n: usize) -> DensityOperator {
    DensityOperator::from_pure(&ghz_state(n).unwrap())
}

#[test]
fn sampled_angles_satisfy_the_constraint() {
    let mut r = rng(0);
    for k in 0..10_000 {
        let n = 2 + k % 5;
        let t = sample_theta_angles(n, &mut r).unwrap();
        assert_eq!(t.angles.len(), n);
        assert!(t.angles.iter().all(|a| (0.0..PI).contains(a)));
        let sum: f64 = t.angles.iter().sum();
        assert!((sum - t.multiple as f64 * PI).abs() < TOL);
    }
    let two = sample_theta_angles(2, &mut r).unwrap();
    assert!((two.angles[0] + two.angles[1] - PI).abs() < TOL || two.angles.iter().all(|a| *a == 0.0));
    let zero = ThetaAngles::new(vec![0.0, 0.0, 0.0]).unwrap();
    assert_eq!(zero.multiple, 0);
    assert!(ThetaAngles::new(vec![1.0, 1.0]).is_err());
    assert!(sample_theta_angles(1, &mut r).is_err());
}

#[test]
fn theta_measurement_examples() {
    let mut r = rng(1);
    for _ in 0..100 {
        assert_eq!(theta_measure(&plus(), 0, 0.0, &mut r).unwrap().0, 0);
        assert_eq!(theta_measure(&minus(), 0, 0.0, &mut r).unwrap().0, 1);
    }
    let zero = StateVector::basis(2, 0).unwrap();
    let ones: u32 = (0..20_000).map(|_| theta_measure(&zero, 0, 1.234, &mut r).unwrap().0 as u32).sum();
    let p = ones as f64 / 20_000.0;
    assert!((p - 0.5).abs() < 3.0 * (0.25f64 / 20_000.0).sqrt());
    let (_, rest) = theta_measure(&ghz_state(3).unwrap(), 1, 0.5, &mut r).unwrap();
    assert_eq!(rest.unwrap().dim(), 4);
    assert!(theta_measure(&zero, 0, PI, &mut r).is_err());
    assert!(theta_measure(&zero, 1, 0.1, &mut r).is_err());
}

#[test]
fn sequential_measurement_matches_joint_distribution() {
    let mut r = rng(2);
    let psi = random_state::<f64>(8, &mut r);
    let angles = sample_theta_angles(3, &mut r).unwrap();
    let dist = outcome_distribution(&DensityOperator::from_pure(&psi), &angles).unwrap();
    // Oracle: amplitude ⟨Y_θ|ψ⟩ built from explicit basis vectors.
    for y in 0..8 {
        let mut bra = StateVector::basis(1, 0).unwrap();
        for q in 0..3 {
            let bit = (y >> (2 - q)) & 1;
            bra = bra.tensor(&theta_basis(angles.angles[q])[bit]).unwrap();
        }
        let p = bra.fidelity(&psi).unwrap();
        assert!((dist[y] - p).abs() < TOL);
    }
    let trials = 20_000;
    let mut counts = [0u32; 8];
    for _ in 0..trials {
        let mut state = Some(psi.clone());
        let mut y = 0;
        for q in 0..3 {
            let (bit, rest) = theta_measure(state.as_ref().unwrap(), 0, angles.angles[q], &mut r).unwrap();
            y = (y << 1) | bit as usize;
            state = rest;
        }
        counts[y] += 1;
    }
    for y in 0..8 {
        let f = counts[y] as f64 / trials as f64;
        let se = (dist[y] * (1.0 - dist[y]) / trials as f64).sqrt();
        assert!((f - dist[y]).abs() < 4.0 * se + 1e-3);
    }
}

#[test]
fn ghz_never_violates_parity() {
    let mut r = rng(3);
    for n in 2..=6 {
        let rho = ghz(n);
        for _ in 0..50 {
            let angles = sample_theta_angles(n, &mut r).unwrap();
            assert!(violation_probability(&rho, &angles).unwrap() < 1e-12);
        }
        assert!((averaged_pass_probability(&rho).unwrap() - 1.0).abs() < TOL);
    }
}

#[test]
fn honest_rounds_on_ghz_always_pass() {
    let net = Network::honest(4).unwrap();
    let mut r = rng(4);
    for _ in 0..200 {
        assert!(net.run_round(&ghz(4), &mut r).unwrap().pass);
    }
    let est = net.estimate_pass_probability(&ghz(4), 10_000, &rng(5)).unwrap();
    assert_eq!(est.passes, 10_000);
    assert_eq!(est.std_err, 0.0);
    assert!(net.run_round(&ghz(3), &mut r).is_err());
}

#[test]
fn product_and_mixed_states_pass_half_the_time() {
    let net = Network::honest(3).unwrap();
    let zeros = DensityOperator::from_pure(&StateVector::zeros(3).unwrap());
    let mixed = DensityOperator::maximally_mixed(8).unwrap();
    for rho in [zeros, mixed] {
        let est = net.estimate_pass_probability(&rho, 10_000, &rng(6)).unwrap();
        assert!((est.p_hat - 0.5).abs() < 4.0 * est.std_err);
        assert!((averaged_pass_probability(&rho).unwrap() - 0.5).abs() < TOL);
    }
}

#[test]
fn a_z_cheat_is_caught() {
    let net = Network::honest(3).unwrap().with_cheat(1, pauli_z()).unwrap();
    let est = net.estimate_pass_probability(&ghz(3), 2_000, &rng(7)).unwrap();
    assert!(est.p_hat < 0.9);
    assert!(!net.nodes[1].honest);
}

#[test]
fn estimates_match_the_averaged_probability() {
    let mut r = rng(8);
    for _ in 0..5 {
        let rho = DensityOperator::mixture(&[(0.7, ghz(3)), (0.3, random_density(8, 3, &mut r))]).unwrap();
        let exact = averaged_pass_probability(&rho).unwrap();
        let est = Network::honest(3).unwrap().estimate_pass_probability(&rho, 20_000, &r.fork(9)).unwrap();
        assert!((est.p_hat - exact).abs() < 4.0 * est.std_err + 1e-3);
        // F ≥ 2P - 1 holds exactly for the averaged probability.
        assert!(ghz_fidelity(&rho).unwrap() >= 2.0 * exact - 1.0 - TOL);
    }
}

#[test]
fn dephased_ghz_respects_honest_bound() {
    let z = crate::qcore::Operator::identity(4).tensor(&pauli_z()).unwrap();
    let rho = DensityOperator::mixture(&[(0.9, ghz(3)), (0.1, ghz(3).evolve(&z).unwrap())]).unwrap();
    let est = Network::honest(3).unwrap().estimate_pass_probability(&rho, 10_000, &rng(10)).unwrap();
    assert!((ghz_fidelity(&rho).unwrap() - 0.9).abs() < TOL);
    assert!(2.0 * est.p_hat - 1.0 <= ghz_fidelity(&rho).unwrap() + 3.0 * 2.0 * est.std_err);
}

#[test]
fn fidelity_bounds_report() {
    let report = check_fidelity_bounds(&ghz(3), 3, 10, 1_000, &rng(11)).unwrap();
    assert!((report.fidelity - 1.0).abs() < TOL);
    assert!((report.honest_lower - 1.0).abs() < TOL);
    assert!(report.honest_bound_ok && report.dishonest_bound_ok);
    assert!(report.cheats.is_empty());

    let report = check_fidelity_bounds(&ghz(4), 2, 20, 4_000, &rng(12)).unwrap();
    assert_eq!(report.cheats.len(), 20);
    assert!(report.cheats.iter().any(|c| c.kind == "joint"));
    assert!(report.dishonest_bound_ok, "{report:?}");
    assert!(check_fidelity_bounds(&ghz(3), 0, 1, 10, &rng(0)).is_err());
}

#[test]
fn corrected_fidelity_undoes_local_cheats() {
    let mut r = rng(13);
    let u = crate::qcore::random_unitary::<f64>(2, &mut r);
    let cheated = ghz(3).evolve(&crate::qcore::Operator::identity(4).tensor(&u).unwrap()).unwrap();
    assert!(ghz_fidelity(&cheated).unwrap() < 0.999);
    // No candidate hints: the optimizer alone must find U†.
    let f = max_corrected_fidelity(&cheated, &[2], &[]).unwrap();
    assert!((f - 1.0).abs() < 1e-6);
}

#[test]
fn admission_extends_honest_chains_only() {
    let mut net = Network::honest(4).unwrap().with_cheat(3, pauli_z()).unwrap();
    let mut r = rng(14);
    let rec: Record = "01".parse().unwrap();
    let report = net.admit_block(&ghz(4), rec, 100, 0.0, &mut r).unwrap();
    assert!(!report.warnings.is_empty());

    let mut honest = Network::honest(4).unwrap();
    let report = honest.admit_block(&ghz(4), rec, 100, 0.99, &mut r).unwrap();
    assert!(report.accepted);
    assert_eq!(report.extended_nodes, vec![0, 1, 2, 3]);
    let report = honest.admit_block(&ghz(4), "10".parse().unwrap(), 100, 0.99, &mut r).unwrap();
    assert!(report.accepted);
    for chain in &honest.local_chains {
        assert_eq!(chain.as_ref().unwrap().decode().unwrap(), "0110");
    }
    let forgery = DensityOperator::from_pure(&StateVector::zeros(4).unwrap());
    let report = honest.admit_block(&forgery, rec, 100, 0.99, &mut r).unwrap();
    assert!(!report.accepted);
    assert!(honest.admit_block(&ghz(4), rec, 0, 0.99, &mut r).is_err());

    // Tampering one node's copy leaves the others untouched.
    let mut copy = honest.local_chains[0].take().unwrap();
    let last = copy.accessible_modes().pop().unwrap();
    copy.tamper(&last, &crate::qcore::pauli_x()).unwrap();
    assert!(!copy.is_valid());
    for chain in honest.local_chains.iter().skip(1) {
        assert!(chain.as_ref().unwrap().is_valid());
    }
}

#[test]
fn verifier_selection_is_uniform() {
    let net = Network::honest(5).unwrap();
    let mut r = rng(15);
    let mut counts = [0f64; 5];
    let draws = 10_000;
    for _ in 0..draws {
        counts[net.run_round(&ghz(5), &mut r).unwrap().verifier] += 1.0;
    }
    let expected = draws as f64 / 5.0;
    let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    // χ²(4) critical value at 1%.
    assert!(chi2 < 13.277, "chi2 = {chi2}");
}
