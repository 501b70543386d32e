//! Randomized algebraic laws of the coefficient layer.

use proptest::collection::vec;
use proptest::prelude::*;
use zetalab_core::c64;
use zetalab_core::coeffs::{
    dirichlet_convolve, dirichlet_convolve_int, divisor_sequence_int, CoefficientSequence,
};

fn sequences() -> impl Strategy<Value = CoefficientSequence> {
    vec((-2.0f64..2.0, -2.0f64..2.0), 1..40).prop_map(|pairs| {
        let values = pairs.into_iter().map(|(re, im)| c64(re, im)).collect();
        CoefficientSequence::from_values(values, false)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Dirichlet convolution is commutative. The two orders sum the same
    /// products, so they agree to rounding.
    #[test]
    fn convolution_commutes(a in sequences(), b in sequences()) {
        let n = a.len().min(b.len());
        let ab = dirichlet_convolve(&a, &b, n).unwrap();
        let ba = dirichlet_convolve(&b, &a, n).unwrap();
        for i in 1..=n {
            let gap = (ab.get(i) - ba.get(i)).norm();
            prop_assert!(gap <= 1e-12 * (1.0 + ab.get(i).norm()));
        }
    }

    /// The unit sequence is a two-sided identity, exactly: the convolution
    /// sum collapses to a single term.
    #[test]
    fn unit_is_identity(a in sequences()) {
        let n = a.len();
        let e = CoefficientSequence::unit(n);
        let ae = dirichlet_convolve(&a, &e, n).unwrap();
        let ea = dirichlet_convolve(&e, &a, n).unwrap();
        for i in 1..=n {
            prop_assert_eq!(ae.get(i), a.get(i));
            prop_assert_eq!(ea.get(i), a.get(i));
        }
    }

    /// Integer divisor functions satisfy d_j * d_k = d_{j+k} exactly.
    #[test]
    fn integer_divisor_addition(j in 0i64..=3, k in 0i64..=3, n in 1usize..=80) {
        let dj = divisor_sequence_int(j, n);
        let dk = divisor_sequence_int(k, n);
        let sum = divisor_sequence_int(j + k, n);
        prop_assert_eq!(dirichlet_convolve_int(&dj, &dk), sum);
    }

    /// Convolution is associative to rounding.
    #[test]
    fn convolution_associates(a in sequences(), b in sequences(), c in sequences()) {
        let n = a.len().min(b.len()).min(c.len());
        let left = dirichlet_convolve(&dirichlet_convolve(&a, &b, n).unwrap(), &c, n).unwrap();
        let right = dirichlet_convolve(&a, &dirichlet_convolve(&b, &c, n).unwrap(), n).unwrap();
        for i in 1..=n {
            let gap = (left.get(i) - right.get(i)).norm();
            prop_assert!(gap <= 1e-10 * (1.0 + left.get(i).norm()));
        }
    }
}
