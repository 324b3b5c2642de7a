use super::*;
use crate::scalar::Cx;

const TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Cx<f64> {
    Cx::new(re, im)
}

fn rng(stream: u64) -> RandomSource {
    RandomSource::new(2024, stream)
}

#[test]
fn tensor_of_basis_states_sets_index_one() {
    let s = StateVector::<f64>::basis(2, 0).unwrap().tensor(&StateVector::basis(2, 1).unwrap()).unwrap();
    let expected = [0.0, 1.0, 0.0, 0.0];
    for (a, e) in s.amplitudes().iter().zip(expected) {
        assert!((a - c(e, 0.0)).norm() < TOL);
    }
}

#[test]
fn x_on_first_qubit_maps_phi_plus_to_psi_plus() {
    let xi = pauli_x::<f64>().tensor(&Operator::identity(2)).unwrap();
    let out = bell_state::<f64>(BellLabel::PhiPlus).apply(&xi).unwrap();
    assert!(out.approx_eq(&bell_state(BellLabel::PsiPlus), TOL));
    let local = bell_state::<f64>(BellLabel::PhiMinus).apply_on(&pauli_x(), &[0]).unwrap();
    assert!(local.approx_eq_up_to_phase(&bell_state(BellLabel::PsiMinus), TOL));
}

#[test]
fn tensor_is_compatible_with_operator_action() {
    let mut r = rng(1);
    for _ in 0..20 {
        let a = random_unitary::<f64>(2, &mut r);
        let b = random_unitary::<f64>(4, &mut r);
        let v = random_state::<f64>(2, &mut r);
        let w = random_state::<f64>(4, &mut r);
        let lhs = v.tensor(&w).unwrap().apply(&a.tensor(&b).unwrap()).unwrap();
        let rhs = v.apply(&a).unwrap().tensor(&w.apply(&b).unwrap()).unwrap();
        assert!(lhs.approx_eq(&rhs, TOL));
    }
}

#[test]
fn tensor_rejects_oversized_registers() {
    let big = StateVector::<f64>::zeros(12).unwrap();
    assert!(matches!(big.tensor(&big), Err(crate::Error::TooLarge { .. })));
    assert!(ghz_state::<f64>(21).is_err());
}

#[test]
fn local_application_matches_dense_kronecker() {
    let mut r = rng(2);
    let psi = random_state::<f64>(8, &mut r);
    let u = random_unitary::<f64>(2, &mut r);
    let id = Operator::identity(2);
    let dense = tensor_all(&[id.clone(), u.clone(), id.clone()]).unwrap();
    assert!(psi.apply_on(&u, &[1]).unwrap().approx_eq(&psi.apply(&dense).unwrap(), TOL));

    // CNOT with control 2 and target 0 as an explicit basis permutation.
    let mut perm = vec![0.0; 64];
    for b in 0..8usize {
        let (q0, q2) = ((b >> 2) & 1, b & 1);
        let out = ((q0 ^ q2) << 2) | (b & 0b011);
        perm[out * 8 + b] = 1.0;
    }
    let dense = Operator::<f64>::from_reals(8, &perm).unwrap();
    assert!(psi.apply_on(&cnot(), &[2, 0]).unwrap().approx_eq(&psi.apply(&dense).unwrap(), TOL));
}

#[test]
fn adjoint_properties() {
    assert!(hadamard::<f64>().adjoint().approx_eq(&hadamard(), TOL));
    let s_dag = standard_gate::<f64>("S", None).unwrap().adjoint();
    assert!(s_dag.approx_eq(&Operator::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)]).unwrap(), TOL));
    let mut r = rng(3);
    let a = random_unitary::<f64>(4, &mut r).scale(c(0.3, 1.2));
    let b = random_unitary::<f64>(4, &mut r);
    assert!(a.adjoint().adjoint().approx_eq(&a, TOL));
    assert!((&a * &b).adjoint().approx_eq(&(&b.adjoint() * &a.adjoint()), TOL));
}

#[test]
fn standard_gates_are_unitary_and_satisfy_identities() {
    for g in Gate::ALL {
        let angle = g.is_rotation().then_some(0.731);
        assert!(g.matrix::<f64>(angle).unwrap().is_unitary(TOL), "{g}");
    }
    let zero = StateVector::<f64>::basis(2, 0).unwrap();
    let one = StateVector::<f64>::basis(2, 1).unwrap();
    assert!(zero.apply(&pauli_x()).unwrap().approx_eq(&one, TOL));
    assert!(zero.apply(&hadamard()).unwrap().approx_eq(&plus(), TOL));
    let hxh = &(&hadamard::<f64>() * &pauli_x()) * &hadamard();
    assert!(hxh.approx_eq(&pauli_z(), TOL));
}

#[test]
fn standard_gate_errors() {
    assert_eq!(standard_gate::<f64>("Q", None).unwrap_err().code(), "UNKNOWN_GATE");
    assert_eq!(standard_gate::<f64>("X", Some(0.1)).unwrap_err().code(), "UNEXPECTED_ANGLE");
    assert_eq!(standard_gate::<f64>("Rz", None).unwrap_err().code(), "MISSING_ANGLE");
}

#[test]
fn rotations_match_exponential_form() {
    let theta = 1.234_f64;
    let rx = standard_gate::<f64>("Rx", Some(theta)).unwrap();
    let expect = &Operator::identity(2).scale_real((theta / 2.0).cos())
        - &pauli_x::<f64>().scale(c(0.0, (theta / 2.0).sin()));
    assert!(rx.approx_eq(&expect, TOL));
}

#[test]
fn bell_states_are_orthonormal() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phi = bell_state::<f64>(BellLabel::PhiPlus);
    assert!(phi.approx_eq(&StateVector::new(vec![c(r, 0.), c(0., 0.), c(0., 0.), c(r, 0.)]).unwrap(), TOL));
    let psi = bell_state::<f64>(BellLabel::PsiMinus);
    assert!(psi.approx_eq(&StateVector::new(vec![c(0., 0.), c(r, 0.), c(-r, 0.), c(0., 0.)]).unwrap(), TOL));
    for (i, a) in BellLabel::ALL.iter().enumerate() {
        for (j, b) in BellLabel::ALL.iter().enumerate() {
            let ip = bell_state::<f64>(*a).inner(&bell_state(*b)).unwrap();
            assert!((ip - c((i == j) as u8 as f64, 0.0)).norm() < TOL);
        }
    }
}

#[test]
fn ghz_amplitudes() {
    assert!(ghz_state::<f64>(2).unwrap().approx_eq(&bell_state(BellLabel::PhiPlus), TOL));
    for n in 2..=MAX_QUBITS {
        let g = ghz_state::<f64>(n).unwrap();
        let norm: f64 = g.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < TOL);
        assert!((g.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < TOL);
        assert!((g.amplitude((1 << n) - 1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < TOL);
    }
}

#[test]
fn born_distribution_examples() {
    let z = computational_basis::<f64>(2);
    let p = born_distribution(&plus(), &z).unwrap();
    assert!((p[0] - 0.5).abs() < TOL && (p[1] - 0.5).abs() < TOL);
    let p = born_distribution(&StateVector::<f64>::basis(2, 0).unwrap(), &z).unwrap();
    assert!((p[0] - 1.0).abs() < TOL && p[1].abs() < TOL);
    let skew = vec![StateVector::<f64>::basis(2, 0).unwrap(), plus()];
    assert_eq!(born_distribution(&plus(), &skew).unwrap_err(), crate::Error::NonOrthonormalBasis);
}

#[test]
fn measurement_frequencies_match_born_rule() {
    let mut r = rng(4);
    let psi = random_state::<f64>(4, &mut r);
    let basis = random_basis::<f64>(4, &mut r);
    let probs = born_distribution(&psi, &basis).unwrap();
    let trials = 100_000;
    let mut counts = [0usize; 4];
    for t in 0..trials {
        let mut src = RandomSource::for_trial(9, Module::Core, t);
        counts[measure(&psi, &basis, &mut src).unwrap().index] += 1;
    }
    for (k, p) in probs.iter().enumerate() {
        let f = counts[k] as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((f - p).abs() <= 3.0 * se + 1e-12, "outcome {k}: {f} vs {p}");
    }
}

#[test]
fn measuring_one_qubit_of_phi_plus_collapses_both() {
    let phi = bell_state::<f64>(BellLabel::PhiPlus);
    let z = computational_basis::<f64>(2);
    let mut zeros = 0;
    for t in 0..2000 {
        let mut src = RandomSource::new(5, t);
        let out = measure_local(&phi, &z, &[0], &mut src).unwrap();
        assert!((out.probability - 0.5).abs() < TOL);
        let expect = StateVector::basis(4, if out.index == 0 { 0 } else { 3 }).unwrap();
        assert!(out.post_state.approx_eq_up_to_phase(&expect, TOL));
        let again = measure_local(&out.post_state, &z, &[0], &mut src).unwrap();
        assert_eq!(again.index, out.index);
        zeros += (out.index == 0) as usize;
    }
    let se = (0.25f64 / 2000.0).sqrt();
    assert!((zeros as f64 / 2000.0 - 0.5).abs() < 3.0 * se);
}

#[test]
fn measure_and_discard_returns_remainder() {
    let ghz = ghz_state::<f64>(3).unwrap();
    let mut src = rng(6);
    let out = measure_and_discard(&ghz, &x_basis(), &[1], &mut src).unwrap();
    let expect = bell_state::<f64>(if out.index == 0 { BellLabel::PhiPlus } else { BellLabel::PhiMinus });
    assert!(out.post_state.approx_eq_up_to_phase(&expect, TOL));
}

#[test]
fn degenerate_measurement_is_rejected() {
    let psi = StateVector::<f64>::basis(2, 0).unwrap();
    let basis = vec![StateVector::basis(2, 0).unwrap(), StateVector::basis(2, 1).unwrap()];
    assert!(measure(&psi, &basis, &mut rng(7)).is_ok());
}

#[test]
fn partial_trace_examples() {
    let phi = DensityOperator::from_pure(&bell_state::<f64>(BellLabel::PhiPlus));
    let reduced = phi.partial_trace(&[2, 2], &[0]).unwrap();
    assert!(reduced.approx_eq(&DensityOperator::maximally_mixed(2).unwrap(), TOL));

    let mut r = rng(8);
    let r1 = random_density::<f64>(2, 2, &mut r);
    let r2 = random_density::<f64>(3, 2, &mut r);
    let r3 = random_density::<f64>(2, 1, &mut r);
    let all = r1.tensor(&r2).unwrap().tensor(&r3).unwrap();
    assert!(all.partial_trace(&[2, 3, 2], &[0]).unwrap().approx_eq(&r1, TOL));
    assert!(all.partial_trace(&[2, 3, 2], &[1]).unwrap().approx_eq(&r2, TOL));
    let swapped = all.partial_trace(&[2, 3, 2], &[2, 0]).unwrap();
    assert!(swapped.approx_eq(&r3.tensor(&r1).unwrap(), TOL));
    assert!(all.partial_trace(&[2, 2], &[0]).is_err());
    let whole = all.partial_trace(&[2, 3, 2], &[]).unwrap();
    assert!((whole.entry(0, 0).re - 1.0).abs() < TOL);
}

#[test]
fn purity_examples() {
    assert!((DensityOperator::from_pure(&StateVector::<f64>::basis(2, 0).unwrap()).purity() - 1.0).abs() < TOL);
    assert!((DensityOperator::<f64>::maximally_mixed(2).unwrap().purity() - 0.5).abs() < TOL);
}

#[test]
fn density_validation() {
    let not_psd = Operator::<f64>::from_reals(2, &[1.5, 0., 0., -0.5]).unwrap();
    assert_eq!(DensityOperator::new(not_psd).unwrap_err().code(), "INVALID_DENSITY");
    let not_herm = Operator::<f64>::from_reals(2, &[0.5, 0.1, 0., 0.5]).unwrap();
    assert!(DensityOperator::new(not_herm).is_err());
    let mut r = rng(9);
    let rho = random_density::<f64>(4, 3, &mut r);
    assert!(DensityOperator::new(rho.as_operator()).is_ok());
}

#[test]
fn complex_hermitian_eigenvalues_are_correct() {
    // σ_y has eigenvalues ±1; a complex Hermitian check of the eigensolver path.
    let ev = pauli_y::<f64>().hermitian_eigenvalues();
    assert!((ev[0] + 1.0).abs() < TOL && (ev[1] - 1.0).abs() < TOL);
    let mut r = rng(10);
    let rho = random_density::<f64>(4, 4, &mut r);
    let (vals, vecs) = rho.eigen();
    for (k, v) in vals.iter().enumerate() {
        let col = vecs.column(k).into_owned();
        let lhs = rho.matrix() * &col;
        assert!((lhs - col * c(*v, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn povm_probabilities_sum_to_one() {
    let e0 = Operator::<f64>::from_reals(2, &[0.5, 0., 0., 0.]).unwrap();
    let e1 = Operator::<f64>::from_reals(2, &[0.5, 0., 0., 1.]).unwrap();
    let p = DensityOperator::from_pure(&plus::<f64>()).povm_probabilities(&[e0.clone(), e1]).unwrap();
    assert!((p[0] - 0.25).abs() < TOL && (p[1] - 0.75).abs() < TOL);
    assert!(DensityOperator::from_pure(&plus::<f64>()).povm_probabilities(&[e0]).is_err());
}

#[test]
fn global_phase_equality_is_separate_from_exact_equality() {
    let phi = bell_state::<f64>(BellLabel::PhiPlus);
    let phased = StateVector::new(phi.amplitudes().iter().map(|a| a * c(0.0, 1.0)).collect()).unwrap();
    assert!(phi.approx_eq_up_to_phase(&phased, TOL));
    assert!(!phi.approx_eq(&phased, TOL));
}

#[test]
fn random_source_is_reproducible() {
    let mut a = RandomSource::new(1, 2);
    let mut b = RandomSource::new(1, 2);
    let mut other = RandomSource::new(1, 3);
    let xs: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
    let ys: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
    let zs: Vec<f64> = (0..8).map(|_| other.uniform()).collect();
    assert_eq!(xs, ys);
    assert_ne!(xs, zs);
}

#[test]
fn single_precision_core_works() {
    let phi = bell_state::<f32>(BellLabel::PhiPlus);
    let reduced = DensityOperator::from_pure(&phi).partial_trace(&[2, 2], &[1]).unwrap();
    assert!((reduced.purity() - 0.5).abs() < 1e-5);
    assert!(hadamard::<f32>().is_unitary(1e-5));
}

/// Best unitary (orthogonal Procrustes) mapping `|ψ,0⟩, |φ,0⟩` to `|ψ,ψ⟩, |φ,φ⟩`.
#[test]
fn no_unitary_clones_non_orthogonal_states() {
    let mut r = rng(11);
    let zero = StateVector::<f64>::basis(2, 0).unwrap();
    for _ in 0..50 {
        let psi = random_state::<f64>(2, &mut r);
        let phi = random_state::<f64>(2, &mut r);
        let overlap = psi.fidelity(&phi).unwrap();
        if !(0.05..0.95).contains(&overlap) {
            continue;
        }
        let cols_in = [psi.tensor(&zero).unwrap(), phi.tensor(&zero).unwrap()];
        let cols_out = [psi.tensor(&psi).unwrap(), phi.tensor(&phi).unwrap()];
        let a = nalgebra::DMatrix::from_fn(4, 2, |i, j| cols_in[j].amplitude(i));
        let b = nalgebra::DMatrix::from_fn(4, 2, |i, j| cols_out[j].amplitude(i));
        let svd = (&b * a.adjoint()).svd(true, true);
        let u = svd.u.unwrap() * svd.v_t.unwrap();
        let best = Operator::from_matrix(u).unwrap();
        assert!(best.is_unitary(1e-8));
        let f0 = cols_in[0].apply(&best).unwrap().fidelity(&cols_out[0]).unwrap();
        let f1 = cols_in[1].apply(&best).unwrap().fidelity(&cols_out[1]).unwrap();
        assert!(f0.min(f1) < 0.999, "cloned to {f0}, {f1}");
    }
}
