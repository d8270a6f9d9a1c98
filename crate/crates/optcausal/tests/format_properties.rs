use optcausal::report::{DistributionDoc, ReportDoc};
use optcausal::text::{parse_circuit, write_circuit};
use optcausal_core::engine::{joint_distribution, CausalityReport, CheckKind};
use optcausal_testkit::{random_dag, random_quantum_circuit};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in [random_dag(&mut rng, 10), random_quantum_circuit(&mut rng).0] {
            let text = write_circuit(&c);
            let back = parse_circuit(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(write_circuit(&back), text);
        }
    }

    #[test]
    fn distribution_json_round_trips(seed in any::<u64>()) {
        let (c, b) = random_quantum_circuit(&mut ChaCha8Rng::seed_from_u64(seed));
        let doc = DistributionDoc::from(&joint_distribution(&c, &b).unwrap());
        let back: DistributionDoc = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn report_json_round_trips(dev in 0.0f64..2.0, tol in 1e-15f64..1.0, witness in "[ -~]{0,40}") {
        let doc = ReportDoc::from(&CausalityReport::new(CheckKind::MarginalInvariance, tol, dev, witness, vec![]));
        let back: ReportDoc = serde_json::from_str(&optcausal::report::to_json(&doc)).unwrap();
        prop_assert_eq!(back, doc);
    }
}
