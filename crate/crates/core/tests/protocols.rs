use chronoq::chain::{parse_records, record_string, QuantumChain};
use chronoq::consensus::Network;
use chronoq::games::{monty_classic, monty_classic_tree, Strategy};
use chronoq::qcore::{ghz_state, pauli_x, pauli_z, DensityOperator, Module, RandomSource};
use chronoq::{Error, Rational};

fn rng(module: Module) -> RandomSource {
    RandomSource::for_trial(7, module, 0)
}

#[test]
fn chain_grows_block_by_block_and_detects_tampering() {
    let records = parse_records("01,11,00,10").unwrap();
    let mut r = rng(Module::Chain);
    let mut chain = QuantumChain::new(records[0]).unwrap();
    for (k, rec) in records.iter().enumerate().skip(1) {
        chain.append(*rec, &mut r).unwrap();
        assert_eq!(chain.decode().unwrap(), record_string(&records[..=k]));
        assert!((chain.fidelity().unwrap() - 1.0).abs() < 1e-9);
    }
    let live = chain.accessible_modes().pop().unwrap();
    let mut tampered = chain.clone();
    tampered.tamper(&live, &pauli_z()).unwrap();
    assert!(matches!(tampered.decode(), Err(Error::DecodeMismatch)));
    let past = chain.modes()[0].clone();
    assert_eq!(chain.tamper(&past, &pauli_x()).unwrap_err().code(), "TEMPORAL_INACCESSIBLE");
}

#[test]
fn honest_network_admits_a_ghz_candidate() {
    let ghz = DensityOperator::from_pure(&ghz_state(3).unwrap());
    let mut net = Network::honest(3).unwrap();
    let record = "10".parse().unwrap();
    let report = net.admit_block(&ghz, record, 200, 0.99, &mut rng(Module::Consensus)).unwrap();
    assert!(report.accepted);
    assert_eq!(report.pass_rate, 1.0);

    let mut cheating = Network::honest(3).unwrap().with_cheat(2, pauli_x()).unwrap();
    let report = cheating.admit_block(&ghz, record, 200, 0.99, &mut rng(Module::Consensus)).unwrap();
    assert!(!report.accepted);
}

#[test]
fn sampled_game_matches_exact_tree() {
    let exact = monty_classic_tree::<Rational>(&Strategy::Switch).conditional_win().unwrap();
    assert_eq!(exact, Rational::new(2, 3));
    let stats = monty_classic(&Strategy::Switch, 20_000, &rng(Module::Games)).unwrap();
    assert_eq!(stats.analytic_exact.as_deref(), Some("2/3"));
    assert!(stats.pass);
    let again = monty_classic(&Strategy::Switch, 20_000, &rng(Module::Games)).unwrap();
    assert_eq!(stats, again);
}
