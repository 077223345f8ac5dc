mod common;

use common::*;
use exceptional::catalog::{builtin_corpus, FieldRecord};
use exceptional::local::{analyze, LocalGaloisType};
use exceptional::ZPoly;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ok(c: Check) -> std::result::Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

fn zpoly(max_deg: usize, bound: i64) -> impl Strategy<Value = ZPoly> {
    (prop::collection::vec(-bound..=bound, 1..=max_deg), (1..=bound).prop_flat_map(|b| prop_oneof![Just(b), Just(-b)]))
        .prop_map(|(mut c, lead)| {
            c.push(lead);
            ZPoly::from_i64(&c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn sturm_agrees_with_floating_roots(f in zpoly(5, 50)) {
        prop_assume!(f.deg() >= 1);
        check_sturm(&f).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn factorization_mod_p_remultiplies(c in prop::collection::vec(-500i64..500, 1..=9), i in 0usize..25) {
        let p = exceptional::arith::primes_up_to(100)[i];
        ok(check_factor_mod_p(&c, p))?;
    }

    #[test]
    fn padic_splitting_degrees(f in zpoly(5, 30), i in 0usize..4) {
        prop_assume!(f.deg() >= 2);
        ok(check_padic_splitting(&f, [2, 3, 5, 7][i]))?;
    }

    #[test]
    fn discriminant_of_product(f in zpoly(4, 20), g in zpoly(4, 20)) {
        ok(check_disc_product(&f, &g))?;
    }

    #[test]
    fn conductor_algebra(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ok(check_conductor_algebra(&random_character(&mut rng), &random_character(&mut rng)))?;
    }

    #[test]
    fn catalog_round_trip(records in prop::collection::vec(record(), 0..6)) {
        ok(check_round_trip(&records))?;
    }
}

/// Arbitrary records satisfying the catalog invariants (not necessarily real fields).
fn record() -> impl Strategy<Value = FieldRecord> {
    let primes = prop::sample::subsequence(vec![2u64, 3, 5, 7, 11, 23, 59], 1..=3);
    (
        "[a-z][a-z0-9-]{0,10}",
        prop::bool::ANY,
        primes,
        prop::collection::vec(1u32..4, 3),
        prop::bool::ANY,
        prop::collection::vec(-9i64..=9, 5),
    )
        .prop_map(|(label, quintic, ps, exps, negative, mut coeffs)| {
            let degree = if quintic { 5 } else { 4 };
            coeffs.truncate(degree);
            coeffs.push(1);
            let mut d = BigInt::from(if negative { -1 } else { 1 });
            for (p, e) in ps.iter().zip(exps) {
                d *= BigInt::from(*p).pow(e);
            }
            FieldRecord {
                label,
                degree,
                coeffs: ZPoly::from_i64(&coeffs),
                group_label: if quintic { "A5".into() } else { "S4".into() },
                field_discriminant: d,
                ramified_primes: ps,
            }
        })
}

#[test]
fn tschirnhaus_stability() {
    check_tschirnhaus_stability().unwrap();
}

#[test]
fn square_discriminant_quintics() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in square_disc_quintics(&mut rng, 200) {
        check_frobenius_consistency(&f, 10_000).unwrap();
    }
}

#[test]
fn local_invariants() {
    check_local_invariants().unwrap();
}

#[test]
fn reduction_mod_lambda_is_multiplicative() {
    check_mod_lambda_homomorphism(40, 3).unwrap();
    check_mod_lambda_homomorphism(40, 7).unwrap();
}

#[test]
fn family_invariants() {
    check_family_invariants().unwrap();
}

#[test]
fn weights_match_oracles() {
    weight_oracles(50).unwrap();
}

#[test]
fn induced_conductor_oracle_covers_all_twists() {
    // every character of (Z/p³)^× is checked
    let d8 = LocalGaloisType::DihedralTwoPower { group_order: 8, b: Some(1), t: Some(0), m_unramified: true };
    assert_eq!(induced_conductor_oracle(&d8, 59, 4).unwrap(), 59 * 59 * 58);
    assert_eq!(induced_conductor_oracle(&d8, 11, 4).unwrap(), 11 * 11 * 10);
    let d6 = LocalGaloisType::TameDihedral { m: 3 };
    assert_eq!(induced_conductor_oracle(&d6, 23, 3).unwrap(), 23 * 23 * 22);
    assert_eq!(induced_conductor_oracle(&d6, 2, 3).unwrap(), 4);
}

#[test]
fn induced_conductor_oracle_rejects_a_wrong_rule() {
    // a cyclic rule on a dihedral prime must disagree somewhere
    let tame = LocalGaloisType::TameCyclic { m: 2, e: 2 };
    assert!(induced_conductor_oracle(&tame, 11, 4).is_err());
}

#[test]
fn embeddings() {
    check_embeddings().unwrap();
}

#[test]
fn detection() {
    check_detection_properties().unwrap();
}

#[test]
fn builtin_corpus_is_consistent() {
    check_round_trip(&builtin_corpus()).unwrap();
    for (r, g) in builtin_corpus().iter().zip(&GOLDEN) {
        let a = analyze(&r.coeffs, g.ell).unwrap();
        assert_eq!(a.field_discriminant, r.field_discriminant, "{}", r.label);
        assert_eq!(a.ramified_primes, r.ramified_primes, "{}", r.label);
        assert_eq!(a.group.to_string(), r.group_label, "{}", r.label);
    }
}
