//! Cross-module property suites: ring laws for the cyclotomic integers,
//! sampled character-sum identities, and count-level invariants that tie
//! the closed forms to their oracles.

use hermarc::aschreier::{self, CurveParams};
use hermarc::charsums::{self, closed_to_cyclo, weil_brute, weil_closed};
use hermarc::cyclo::CycloInt;
use hermarc::gf::{self, Elem, TowerSpec};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn cyclo_ring_laws(m in prop::sample::select(vec![2u64, 3, 5, 7, 12, 20]),
                       seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deg = CycloInt::zero(m).unwrap().coeffs().len();
        let mut rand_elem = || {
            let mut acc = CycloInt::zero(m).unwrap();
            for k in 0..deg {
                let c: i64 = rng.gen_range(-50..50);
                acc = acc.add(&CycloInt::zeta_pow(m, k as u64).unwrap().scale(c)).unwrap();
            }
            acc
        };
        let (a, b, c) = (rand_elem(), rand_elem(), rand_elem());
        // commutativity
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        // associativity
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        // distributivity
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        // additive inverse
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn cyclo_conj_distributes(
        m in prop::sample::select(vec![2u64, 3, 5, 7, 12, 20]),
        seed in any::<u64>()
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deg = CycloInt::zero(m).unwrap().coeffs().len();
        let mut rand_elem = || {
            let mut acc = CycloInt::zero(m).unwrap();
            for k in 0..deg {
                let c: i64 = rng.gen_range(-50..50);
                acc = acc.add(&CycloInt::zeta_pow(m, k as u64).unwrap().scale(c)).unwrap();
            }
            acc
        };
        let (a, b) = (rand_elem(), rand_elem());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.add(&b).unwrap().conj(), a.conj().add(&b.conj()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().conj(), a.conj().mul(&b.conj()).unwrap());
    }
}

/// Sampled Weil-sum identities for a (p, n, ell, r) set: exact closed =
/// brute, the magnitude table, and the character-sum decomposition of
/// the affine count.
fn weil_identity_suite(p: u64, n: u32, ell: u32, r: u32, samples: u64, seed: u64) {
    let spec = TowerSpec::new(p, n, ell).unwrap();
    let order = spec.order();
    let q = spec.q();
    let u = gf::gcd(ell as u64, r as u64) as u32;
    let m = charsums::embed_index(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = Elem(rng.gen_range(1..order) as u32);
        let b = Elem(rng.gen_range(0..order) as u32);
        let c = Elem(rng.gen_range(0..order) as u32);

        let brute = weil_brute(&spec, r, a, b, c);
        let (cv, branch) = weil_closed(&spec, r, a, b, c).unwrap();
        let closed = closed_to_cyclo(&cv).unwrap();
        assert_eq!(
            brute.lift_to(m).unwrap(),
            closed,
            "(p,n,ell,r)=({p},{n},{ell},{r}) a={a:?} b={b:?} c={c:?} branch={branch:?}"
        );

        // |R|^2 is one of the four magnitudes of the branch table
        let norm = brute
            .norm_sq()
            .as_rational_integer()
            .expect("|R|^2 is a rational integer");
        let allowed = [
            BigInt::from(0),
            BigInt::from(q).pow(ell),
            BigInt::from(q).pow(ell + u),
            BigInt::from(q).pow(ell + 2 * u),
        ];
        assert!(allowed.contains(&norm), "unexpected |R|^2 = {norm}");

        // summing R over the F_q-scalings of (a,b,c) recovers N - q^ell
        let mut total = CycloInt::from_integer(charsums::chi_index(p), q.pow(ell) as i64).unwrap();
        for h in spec.subfield_elements(n).unwrap() {
            if h.is_zero() {
                continue;
            }
            let term = weil_brute(&spec, r, spec.mul(h, a), spec.mul(h, b), spec.mul(h, c));
            total = total.add(&term).unwrap();
        }
        let params = CurveParams::new(r, a, b, c).unwrap();
        assert_eq!(
            total.as_rational_integer(),
            Some(BigInt::from(aschreier::count_brute(&spec, &params))),
            "character decomposition of the count failed"
        );
    }
}

#[test]
fn weil_identities_sampled() {
    for &(p, n, ell, r) in &[
        (2u64, 1u32, 3u32, 1u32),
        (2, 1, 3, 2),
        (2, 2, 3, 2),
        (3, 1, 3, 2),
        (3, 1, 2, 1),
        (3, 1, 4, 2),
        (2, 1, 4, 3),
        (2, 1, 5, 3),
    ] {
        weil_identity_suite(p, n, ell, r, 60, 0x5eed ^ (p << 8) ^ r as u64);
    }
}

#[test]
fn counts_are_multiples_of_q_and_hasse_weil_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(p, n, ell, r) in &[(2u64, 1u32, 3u32, 2u32), (3, 1, 2, 0), (3, 1, 4, 1), (2, 1, 4, 3)] {
        let spec = TowerSpec::new(p, n, ell).unwrap();
        let q = spec.q();
        let g = aschreier::genus(q, r);
        let (lo, hi) = aschreier::hasse_weil_interval(q, ell, g);
        for _ in 0..300 {
            let params = CurveParams::new(
                r,
                Elem(rng.gen_range(1..spec.order()) as u32),
                Elem(rng.gen_range(0..spec.order()) as u32),
                Elem(rng.gen_range(0..spec.order()) as u32),
            )
            .unwrap();
            let (n_closed, _) = aschreier::count_closed(&spec, &params).unwrap();
            assert_eq!(n_closed % q, 0);
            let projective = n_closed + 1;
            assert!(
                (lo..=hi).contains(&projective),
                "projective count {projective} outside [{lo}, {hi}]"
            );
        }
    }
}

#[test]
fn classifier_matches_count_criterion_sampled() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for &(p, n, ell, r) in &[(3u64, 1u32, 2u32, 0u32), (3, 1, 4, 1), (2, 1, 4, 3), (3, 1, 4, 2)] {
        let spec = TowerSpec::new(p, n, ell).unwrap();
        for _ in 0..200 {
            let params = CurveParams::new(
                r,
                Elem(rng.gen_range(1..spec.order()) as u32),
                Elem(rng.gen_range(0..spec.order()) as u32),
                Elem(rng.gen_range(0..spec.order()) as u32),
            )
            .unwrap();
            let rep = aschreier::classify(&spec, &params).unwrap();
            assert!(rep.count_consistent, "params {params:?}: {rep:?}");
        }
    }
}

#[test]
fn gauss_sum_closed_forms_for_more_characteristics() {
    // eta-weighted and trivial-character Gauss sums against brute sums
    for p in [3u64, 7, 11] {
        let spec = TowerSpec::new(p, 1, 2).unwrap();
        for d in [1u32, 2] {
            for f in spec.subfield_elements(d).unwrap() {
                let brute = charsums::gauss_eta_brute(&spec, f, d).unwrap();
                let closed = closed_to_cyclo(&charsums::gauss_eta(&spec, f, d).unwrap()).unwrap();
                assert_eq!(brute.lift_to(charsums::embed_index(p)).unwrap(), closed);
                let trivial = charsums::gauss_trivial_brute(&spec, f, d).unwrap();
                assert_eq!(
                    trivial.as_rational_integer(),
                    Some(BigInt::from(charsums::gauss_trivial(&spec, f, d)))
                );
            }
        }
    }
}
