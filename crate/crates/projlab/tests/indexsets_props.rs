//! Counting identities and structural invariants of the index-set layer.

use num_traits::ToPrimitive;
use projlab::indexsets::{
    binomial, prime_map, prime_map_inverse, prime_pi, primes_up_to, IndexSet, MultiIndex,
};
use projlab::special;
use proptest::prelude::*;

fn choose(n: u64, k: u64) -> u64 {
    binomial(n, k).to_u64().expect("fits in u64")
}

#[test]
fn layer_sizes_are_binomial_coefficients() {
    for n in 1..=6usize {
        for m in 0..=6u32 {
            let (n64, m64) = (n as u64, m as u64);
            assert_eq!(IndexSet::full(m, n).unwrap().len() as u64, choose(n64 + m64 - 1, m64));
            assert_eq!(IndexSet::full_up_to(m, n).unwrap().len() as u64, choose(n64 + m64, m64));
            if m64 <= n64 {
                assert_eq!(IndexSet::tetrahedral(m, n).unwrap().len() as u64, choose(n64, m64));
            }
        }
    }
}

#[test]
fn multiplicities_sum_to_power_of_dimension() {
    for n in 1..=5usize {
        for m in 0..=7u32 {
            let total: u64 = IndexSet::full(m, n)
                .unwrap()
                .members()
                .iter()
                .map(|a| a.multiplicity().to_u64().unwrap())
                .sum();
            assert_eq!(total, (n as u64).pow(m));
        }
    }
}

#[test]
fn degree_slices_partition_the_ball() {
    for n in 1..=4usize {
        for m in 0..=5u32 {
            let ball = IndexSet::full_up_to(m, n).unwrap();
            let mut total = 0;
            for k in 0..=m {
                let slice = ball.degree_slice(k);
                assert!(slice.members().iter().all(|a| a.degree() == k));
                let layer = IndexSet::full(k, n).unwrap();
                for alpha in layer.members() {
                    assert!(slice.contains(alpha));
                }
                assert_eq!(slice.len(), layer.len());
                total += slice.len();
            }
            assert_eq!(total, ball.len());
        }
    }
}

#[test]
fn reduced_set_drops_one_degree() {
    for n in 2..=5usize {
        for m in 1..=4u32 {
            let reduced = IndexSet::full(m, n).unwrap().reduced_set().unwrap();
            let expected = IndexSet::full(m - 1, n).unwrap();
            assert_eq!(reduced.len(), expected.len());
            for alpha in expected.members() {
                assert!(reduced.contains(alpha));
            }
            if m as usize <= n {
                let reduced = IndexSet::tetrahedral(m, n).unwrap().reduced_set().unwrap();
                let expected = IndexSet::tetrahedral(m - 1, n).unwrap();
                assert_eq!(reduced.len(), expected.len());
                for alpha in expected.members() {
                    assert!(reduced.contains(alpha));
                }
            }
        }
    }
}

#[test]
fn prime_map_round_trips() {
    for k in 1..=5000u128 {
        let alpha = prime_map(k as u64);
        assert_eq!(prime_map_inverse(&alpha).unwrap(), k);
    }
}

#[test]
fn prime_generated_set_matches_direct_map() {
    for x in [2u64, 10, 30, 100] {
        let j = IndexSet::prime_generated(x).unwrap();
        assert_eq!(j.dimension(), prime_pi(x));
        assert_eq!(j.len() as u64, x);
        for k in 1..=x {
            let alpha = prime_map(k).padded(j.dimension());
            assert!(j.contains(&alpha), "missing exponent vector of {k}");
        }
    }
}

#[test]
fn prime_homog_is_the_degree_slice() {
    for (x, m) in [(30u64, 1u32), (30, 2), (100, 2), (100, 3)] {
        let homog = IndexSet::prime_homog(x, m).unwrap();
        let slice = IndexSet::prime_generated(x).unwrap().degree_slice(m);
        assert_eq!(homog.len(), slice.len());
        for alpha in slice.members() {
            assert!(homog.contains(alpha));
        }
    }
}

#[test]
fn sieve_matches_reference_counts() {
    assert_eq!(primes_up_to(100).len(), 25);
    assert_eq!(prime_pi(97), 25);
    assert_eq!(prime_pi(96), 24);
    assert_eq!(primes_up_to(2), vec![2]);
    // pi(10^6) is a standard reference value.
    assert_eq!(prime_pi(1_000_000), 78_498);
}

#[test]
fn exact_binomials_agree_with_log_gamma() {
    for n in 0..=60u64 {
        for k in 0..=n {
            let exact = binomial(n, k).to_f64().unwrap();
            let viagamma = special::ln_binomial(n, k).exp();
            assert!(
                (exact - viagamma).abs() <= 1e-9 * exact.max(1.0),
                "binomial({n},{k}): {exact} vs {viagamma}"
            );
        }
    }
}

fn arb_alpha() -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0u32..6, 1..6).prop_map(MultiIndex::new)
}

proptest! {
    #[test]
    fn rearrangement_preserves_the_multiset(alpha in arb_alpha()) {
        let dec = alpha.decreasing_rearrangement();
        let mut a = alpha.entries().to_vec();
        let mut b = dec.entries().to_vec();
        prop_assert!(b.windows(2).all(|w| w[0] >= w[1]));
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert_eq!(alpha.degree(), dec.degree());
        prop_assert_eq!(alpha.multiplicity(), dec.multiplicity());
    }

    #[test]
    fn unit_steps_invert(alpha in arb_alpha(), k in 0usize..5) {
        let k = k % alpha.dimension();
        let up = alpha.plus_unit(k);
        prop_assert_eq!(up.degree(), alpha.degree() + 1);
        prop_assert_eq!(up.minus_unit(k).unwrap(), alpha.clone());
        match alpha.minus_unit(k) {
            Some(down) => prop_assert_eq!(down.plus_unit(k), alpha),
            None => prop_assert_eq!(alpha.entries()[k], 0),
        }
    }

    #[test]
    fn tetra_even_split_reconstructs(alpha in arb_alpha()) {
        let (tetra, even) = alpha.tetra_even_decompose();
        prop_assert!(tetra.is_tetrahedral());
        for i in 0..alpha.dimension() {
            prop_assert_eq!(even.entries()[i] % 2, 0);
            prop_assert_eq!(
                alpha.entries()[i],
                tetra.entries()[i] + even.entries()[i]
            );
        }
    }

    #[test]
    fn json_round_trips_custom_sets(
        members in prop::collection::btree_set(
            prop::collection::vec(0u32..5, 3), 1..12)
    ) {
        let members: Vec<MultiIndex> =
            members.into_iter().map(MultiIndex::new).collect();
        let j = IndexSet::custom(members).unwrap();
        let back = IndexSet::from_json(&j.to_json()).unwrap();
        prop_assert_eq!(back.dimension(), j.dimension());
        prop_assert_eq!(back.len(), j.len());
        for alpha in j.members() {
            prop_assert!(back.contains(alpha));
        }
    }
}
