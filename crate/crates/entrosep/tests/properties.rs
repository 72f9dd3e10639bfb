//! Property tests for the two invariants everything else leans on:
//! product states never trip a criterion, and state serialization is a
//! bit-exact roundtrip.

use proptest::prelude::*;

use entrosep::criteria::evaluate_all;
use entrosep::qstate::{
    product_state, random_density_matrix_with, rng_stream, DensityMatrix, ProductParams,
};

proptest! {
    // Soundness: every criterion bound is a theorem about separable states,
    // so no product state may ever be flagged, however wild the angles.
    #[test]
    fn product_states_never_violate_any_criterion(
        alpha in -20.0..20.0f64,
        beta in -20.0..20.0f64,
        delta in -20.0..20.0f64,
        gamma in -20.0..20.0f64,
    ) {
        let p = ProductParams::new(alpha, beta, delta, gamma);
        let rho = product_state(&p).density();
        for v in evaluate_all(&rho).unwrap() {
            prop_assert!(
                !v.violated,
                "{} fired on a product state: value {} bound {}",
                v.criterion_id, v.value, v.bound
            );
        }
    }

    // Determinism of the on-disk format: parse(write(rho)) returns the
    // exact same matrix, and writing again yields the same bytes.
    #[test]
    fn state_json_roundtrip_is_bit_exact(seed in any::<u64>(), da in 2..=3usize, db in 2..=3usize) {
        let mut rng = rng_stream(seed, 9);
        let rho = random_density_matrix_with(da, db, &mut rng);
        let text = rho.to_json();
        let back = DensityMatrix::from_json(&text).unwrap();
        prop_assert_eq!(back.dim_a(), da);
        prop_assert_eq!(back.dim_b(), db);
        prop_assert_eq!(rho.matrix(), back.matrix());
        prop_assert_eq!(text, back.to_json());
    }
}
