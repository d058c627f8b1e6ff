//! Property tests for the word layer over randomly drawn power vectors.
//! The reference is the brute-force oracle in `common`; the library's
//! prepend and step recursions must agree with it exactly, and the
//! structural identities must hold word for word.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use blowup::{
    cylinder_partition_check, e_minus, e_weight, labelled_addresses, omega_level, omega_member,
    omega_step, PowerVector, Word,
};

fn arb_pv() -> impl Strategy<Value = PowerVector> {
    prop::collection::vec(1u32..=4, 2..=4)
        .prop_filter("gcd must be 1", |a| {
            a.iter().copied().fold(0, gcd) == 1
        })
        .prop_filter("all-ones four-letter alphabets blow past desk scale", |a| {
            !(a.len() == 4 && a.iter().all(|&x| x == 1))
        })
        .prop_map(|a| PowerVector::new(a).unwrap())
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn omega_matches_the_brute_force_oracle(pv in arb_pv(), k in 0u32..=8) {
        let ours: BTreeSet<Word> = omega_level(k, &pv).unwrap().into_iter().collect();
        let oracle: BTreeSet<Word> = common::oracle_omega(k, &pv).into_iter().collect();
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn members_satisfy_the_weight_inequalities(pv in arb_pv(), k in 0u32..=8) {
        for w in omega_level(k, &pv).unwrap() {
            let e = e_weight(&w, &pv).unwrap();
            let em = e_minus(&w, &pv).unwrap();
            prop_assert!(e > k && k >= em, "{w}: e={e}, e_minus={em}, k={k}");
            prop_assert!(omega_member(&w, k, &pv).unwrap());
        }
    }

    #[test]
    fn prepending_partitions_the_next_levels(pv in arb_pv(), k in 0u32..=8) {
        // Every member of Omega_{k + a_i} with first letter i is i
        // prepended to a member of Omega_k, and the images of the
        // prepend maps are disjoint by construction (distinct first
        // letters), so the union over i recovers each level exactly.
        let base = omega_level(k, &pv).unwrap();
        for i in pv.letters() {
            let target = k + pv.a(i);
            let expected: BTreeSet<Word> = omega_level(target, &pv)
                .unwrap()
                .into_iter()
                .filter(|w| w.first() == Some(i))
                .collect();
            let prepended: BTreeSet<Word> = base
                .iter()
                .map(|w| Word::single(i).concat(w))
                .collect();
            prop_assert_eq!(prepended, expected);
        }
    }

    #[test]
    fn stepping_gives_the_next_level(pv in arb_pv(), k in 0u32..=8) {
        let here = omega_level(k, &pv).unwrap();
        let stepped: BTreeSet<Word> = omega_step(k, &here, &pv).unwrap().into_iter().collect();
        let next: BTreeSet<Word> = omega_level(k + 1, &pv).unwrap().into_iter().collect();
        prop_assert_eq!(stepped, next);
    }

    #[test]
    fn cylinders_partition_the_address_space(pv in arb_pv(), k in 0u32..=6) {
        let a_max = *pv.as_slice().iter().max().unwrap();
        let check = cylinder_partition_check(k, k + a_max, &pv).unwrap();
        prop_assert!(check.ok, "witness: {:?}", check.witness);
    }

    #[test]
    fn labelled_addresses_coincide_with_omega(pv in arb_pv(), k in 0u32..=8) {
        let labelled = labelled_addresses(k, &pv).unwrap();
        let mut direct = omega_level(k, &pv).unwrap();
        direct.sort();
        let mut entries = labelled.entries;
        entries.sort();
        prop_assert_eq!(entries, direct);
    }
}
