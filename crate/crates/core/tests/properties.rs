mod common;

use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn common_mode_commutators(p in params(1.0)) {
        check_commutators(&p)?;
    }

    #[test]
    fn drive_vector_is_rotated_unitarily(p in params(2.0)) {
        check_drive_unitarity(&p)?;
    }

    #[test]
    fn decay_rates_are_conserved(p in params(1.0)) {
        check_decay_sum(&p)?;
    }

    #[test]
    fn evolution_keeps_trace_and_positivity(p in params(0.8), n1 in 0usize..3, n2 in 0usize..3) {
        check_trace_and_positivity(&p, [n1, n2])?;
    }

    #[test]
    fn local_and_common_agree_on_photon_number(p in params(0.6)) {
        check_representation_equivalence(&p)?;
    }
}
