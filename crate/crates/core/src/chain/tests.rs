use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::qcore::{pauli_x, pauli_z, random_unitary, Operator, RandomSource, StateVector};
use crate::temporal::ModeId;

const TOL: f64 = 1e-9;

fn rng(stream: u64) -> RandomSource {
    RandomSource::new(11, stream)
}

fn recs(s: &str) -> Vec<Record> {
    parse_records(s).unwrap()
}

#[test]
fn blocks_are_superdense_bell_states() {
    let cases = [("00", [1.0, 0.0, 0.0, 1.0]), ("10", [1.0, 0.0, 0.0, -1.0]), ("11", [0.0, 1.0, -1.0, 0.0])];
    for (r, amps) in cases {
        let reg = encode_block(r.parse().unwrap(), 3).unwrap();
        assert!(reg.state().approx_eq(&StateVector::from_reals(&amps).unwrap(), TOL));
        assert_eq!(reg.live_modes(), vec![ModeId::new("p0", 3), ModeId::new("p1", 4)]);
    }
    assert!("2".parse::<Record>().is_err());
    assert!(Record::new(0, 2).is_err());
}

#[test]
fn worked_example_chain() {
    let chain = QuantumChain::from_records(&recs("00,10"), &mut rng(0)).unwrap();
    assert!(chain.state().unwrap().approx_eq_up_to_phase(&chain_target(&recs("00,10")).unwrap(), TOL));
    let times: Vec<u64> = chain.modes().iter().map(|m| m.time_step).collect();
    assert_eq!(times, vec![0, 1, 1, 2]);

    let chain = QuantumChain::from_records(&recs("00,10,11"), &mut rng(0)).unwrap();
    assert_eq!(chain.decode().unwrap(), "001011");
    let mut amps = [0.0; 64];
    amps[0b001011] = 1.0;
    amps[0b110100] = 1.0;
    assert!(chain.state().unwrap().approx_eq_up_to_phase(&StateVector::from_reals(&amps).unwrap(), TOL));
    assert_eq!(chain.timestamps(), &[0, 1, 2]);
}

#[test]
fn single_block_chain_is_its_bell_state() {
    for r in Record::all() {
        let chain = QuantumChain::from_records(&[r], &mut rng(1)).unwrap();
        assert!(chain.state().unwrap().approx_eq(&block_state(r), TOL));
        assert_eq!(chain.decode().unwrap(), r.to_string());
    }
}

/// Structural oracle: exactly two complementary branches of modulus 1/√2 with phase (-1)^{r₁}.
fn check_structure(state: &StateVector, records: &[Record]) {
    let n = 2 * records.len();
    let support: Vec<usize> = (0..state.dim()).filter(|&i| state.amplitude(i).norm() > 1e-9).collect();
    assert_eq!(support.len(), 2);
    assert_eq!(support[0] ^ support[1], (1 << n) - 1);
    for &i in &support {
        assert!((state.amplitude(i).norm() - 0.5f64.sqrt()).abs() < TOL);
    }
    let bits: String = format!("{:0width$b}", support[0], width = n);
    assert_eq!(&bits[1..], &record_string(records)[1..]);
    let ratio = state.amplitude(support[1]) / state.amplitude(support[0]);
    let sign = if records[0].r1 == 1 { -1.0 } else { 1.0 };
    assert!((ratio.re - sign).abs() < TOL && ratio.im.abs() < TOL);
}

#[test]
fn exhaustive_round_trip_on_three_blocks() {
    let mut r = rng(2);
    for a in Record::all() {
        for b in Record::all() {
            for c in Record::all() {
                let records = [a, b, c];
                let chain = QuantumChain::from_records(&records, &mut r).unwrap();
                assert_eq!(chain.decode().unwrap(), record_string(&records));
                check_structure(&chain.state().unwrap(), &records);
            }
        }
    }
}

#[test]
fn random_long_chains_round_trip() {
    let mut r = rng(3);
    for _ in 0..20 {
        let len = 5 + r.below(3);
        let records: Vec<Record> = (0..len).map(|_| Record::random(&mut r)).collect();
        let chain = QuantumChain::from_records(&records, &mut r).unwrap();
        assert_eq!(chain.decode().unwrap(), record_string(&records));
        assert!((chain.fidelity().unwrap() - 1.0).abs() < TOL);
        assert!(chain.fusion_attempts() as usize >= len - 1);
    }
}

#[test]
fn only_the_last_photon_is_accessible() {
    let mut chain = QuantumChain::from_records(&recs("00,10,11"), &mut rng(4)).unwrap();
    assert_eq!(chain.accessible_modes(), vec![ModeId::new("p5", 3)]);
    let past = chain.modes()[1].clone();
    let err = chain.tamper(&past, &pauli_x()).unwrap_err();
    assert_eq!(err.code(), "TEMPORAL_INACCESSIBLE");
    assert!(matches!(chain.tamper(&ModeId::new("zz", 0), &pauli_x()), Err(Error::UnknownMode(_))));
    assert!(chain.is_valid());
}

#[test]
fn tampering_the_live_photon_breaks_the_chain() {
    let base = QuantumChain::from_records(&recs("00,10"), &mut rng(5)).unwrap();
    let last = base.accessible_modes().pop().unwrap();

    let mut ident = base.clone();
    ident.tamper(&last, &Operator::identity(2)).unwrap();
    assert!(ident.is_valid());
    assert_eq!(ident.decode().unwrap(), "0010");

    for op in [pauli_x(), pauli_z()] {
        let mut c = base.clone();
        let f = c.tamper(&last, &op).unwrap();
        assert!(f < 1.0 - 1e-6);
        assert!(!c.is_valid());
        assert!(matches!(c.decode(), Err(Error::DecodeMismatch)));
        assert!(matches!(c.append("00".parse().unwrap(), &mut rng(6)), Err(Error::InvalidChain)));
    }
}

#[test]
fn random_unitaries_away_from_identity_are_detected() {
    let mut r = rng(7);
    let base = QuantumChain::from_records(&recs("01,11,00"), &mut r).unwrap();
    let last = base.accessible_modes().pop().unwrap();
    let mut checked = 0;
    while checked < 1000 {
        let u = random_unitary::<f64>(2, &mut r);
        if phase_distance_to_identity(&u) <= 0.01 {
            continue;
        }
        let mut c = base.clone();
        assert!(c.tamper(&last, &u).unwrap() < 1.0 - 1e-6);
        checked += 1;
    }
}

/// `min_φ ‖U - e^{iφ} I‖` in operator norm, by a fine scan over φ.
fn phase_distance_to_identity(u: &Operator) -> f64 {
    (0..3600)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / 3600.0;
            let p = crate::scalar::Cx::new(phi.cos(), phi.sin());
            let d = u - &Operator::identity(2).scale(p);
            d.matrix().singular_values().max()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn statistics_decoder_recovers_records() {
    let records = recs("10,01,11");
    let chain = QuantumChain::from_records(&records, &mut rng(8)).unwrap();
    let stats = chain.statistics_decode(200, &mut rng(9)).unwrap();
    assert_eq!(stats.bits, "100111");
    assert!((stats.agreement - 1.0).abs() < TOL);
}

#[test]
fn export_shape() {
    let chain = QuantumChain::from_records(&recs("00,10,11"), &mut rng(10)).unwrap();
    let json = serde_json::to_value(chain.export().unwrap()).unwrap();
    assert_eq!(json["records"], serde_json::json!(["00", "10", "11"]));
    assert_eq!(json["timestamps"], serde_json::json!([0, 1, 2]));
    assert_eq!(json["valid"], true);
}

#[test]
fn splitmix_reference_values() {
    // Reference stream of SplitMix64 seeded with 0: successive outputs use x = k·γ.
    assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
}

#[test]
fn classical_chain_invalidates_suffix() {
    let records = recs("00,01,10,11,00");
    let chain = ClassicalChain::from_records(&records);
    assert!(chain.validity().iter().all(|v| *v));
    for (i, b) in chain.blocks.iter().enumerate().skip(1) {
        assert_eq!(b.prev_digest, chain.blocks[i - 1].digest);
    }
    let mut t = chain.clone();
    t.tamper(2, "11".parse().unwrap()).unwrap();
    assert_eq!(t.validity(), vec![true, true, false, false, false]);
    let mut t = chain.clone();
    t.tamper(0, "11".parse().unwrap()).unwrap();
    assert!(t.validity().iter().all(|v| !v));
    assert!(t.tamper(9, "11".parse().unwrap()).is_err());
}

#[test]
fn tamper_contrast() {
    let records = recs("00,01,10,11,00");
    for i in 0..5 {
        let c = classical_chain_tamper_contrast(&records, i, &mut rng(12)).unwrap();
        assert_eq!(c.invalidated_range_classical, (i, 5));
        assert_eq!(c.invalidated_range_quantum, (0, 5));
        assert!(c.quantum_fidelity_after < 1.0 - 1e-6);
        assert_eq!(c.quantum_target_error.is_some(), i < 4);
    }
    assert!(classical_chain_tamper_contrast(&records, 5, &mut rng(12)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decode_inverts_append(bits in proptest::collection::vec((0u8..2, 0u8..2), 1..8), seed in any::<u64>()) {
        let records: Vec<Record> = bits.iter().map(|&(a, b)| Record::new(a, b).unwrap()).collect();
        let chain = QuantumChain::from_records(&records, &mut RandomSource::new(seed, 0)).unwrap();
        prop_assert_eq!(chain.decode().unwrap(), record_string(&records));
    }
}
