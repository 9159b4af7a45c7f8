//! Randomized invariants of the code, permutation and equivalence layers.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdcode::cyclotomic::{factor_cyclotomic, RingElement};
use sdcode::decomp::{self, AutomorphismSpec};
use sdcode::equiv::{
    are_equivalent, brute_force_aut_order, brute_force_equiv, canonical_form, canonical_key,
};
use sdcode::{BinaryCode, BitVector, Permutation};

/// A code of length `n` spanned by the given row bit patterns.
fn code_from(n: usize, rows: &[u32]) -> BinaryCode {
    let rows = rows
        .iter()
        .map(|&bits| {
            let mut v = BitVector::zeros(n);
            for i in 0..n {
                v.set(i, bits >> i & 1 == 1);
            }
            v
        })
        .collect();
    BinaryCode::from_rows(n, rows).unwrap()
}

fn small_code(max_n: usize) -> impl Strategy<Value = BinaryCode> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0u32..(1 << n), 1..=n).prop_map(move |rows| code_from(n, &rows))
    })
}

fn shuffle_of(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn code_and_shuffle(max_n: usize) -> impl Strategy<Value = (BinaryCode, Vec<usize>)> {
    small_code(max_n).prop_flat_map(|c| {
        let n = c.n();
        (Just(c), shuffle_of(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(code in small_code(16)) {
        let back = BinaryCode::parse(&code.to_text()).unwrap();
        prop_assert!(back.same_space(&code));
        prop_assert_eq!(back.k(), code.k());
    }

    #[test]
    fn dual_is_an_involution(code in small_code(16)) {
        let dual = code.dual();
        prop_assert_eq!(code.k() + dual.k(), code.n());
        prop_assert!(dual.dual().same_space(&code));
        for a in code.rows() {
            for b in dual.rows() {
                prop_assert!(!a.dot(b));
            }
        }
    }

    #[test]
    fn weight_distribution_is_consistent(code in small_code(14)) {
        let wd = code.weight_distribution().unwrap();
        let total: u64 = wd.counts().iter().sum();
        prop_assert_eq!(total, 1u64 << code.k());
        prop_assert_eq!(wd.counts()[0], 1);
        let first = wd.counts().iter().skip(1).position(|&c| c > 0).map(|i| i + 1);
        let mw = code.min_weight(None).unwrap();
        prop_assert_eq!(first, mw.as_ref().map(|m| m.weight));
        if let Some(m) = mw {
            prop_assert!(code.contains(&m.witness));
            prop_assert_eq!(m.witness.weight(), m.weight);
        }
    }

    #[test]
    fn canonical_key_ignores_relabeling((code, perm) in code_and_shuffle(16)) {
        let moved = code.permute(&perm).unwrap();
        prop_assert_eq!(canonical_key(&code).unwrap(), canonical_key(&moved).unwrap());
    }

    #[test]
    fn canonical_labeling_reaches_the_key_code(code in small_code(14)) {
        let canon = canonical_form(&code).unwrap();
        let relabeled = code.permute(canon.labeling.images()).unwrap();
        prop_assert_eq!(canonical_key(&relabeled).unwrap(), canon.key);
        for g in &canon.aut.generators {
            prop_assert!(code.permute(g.images()).unwrap().same_space(&code));
        }
    }

    #[test]
    fn equivalence_agrees_with_brute_force(a in small_code(7), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = a.n();
        let b = {
            use rand::seq::SliceRandom;
            let mut rows: Vec<u32> = (0..a.k()).map(|_| rand::Rng::gen_range(&mut rng, 0..1u32 << n)).collect();
            rows.shuffle(&mut rng);
            code_from(n, &rows)
        };
        prop_assert_eq!(are_equivalent(&a, &b).unwrap(), brute_force_equiv(&a, &b).unwrap());
    }

    #[test]
    fn group_order_agrees_with_brute_force(code in small_code(8)) {
        let fast = canonical_form(&code).unwrap().aut.order;
        let slow = brute_force_aut_order(&code).unwrap();
        prop_assert_eq!(fast, slow.into());
    }

    #[test]
    fn permutation_cycle_notation_round_trips(perm in shuffle_of(12)) {
        let p = Permutation::from_images(perm).unwrap();
        let back = Permutation::parse_cycles(12, &p.to_string()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert!(p.then(&p.inverse()).is_identity());
    }

    #[test]
    fn random_self_dual_codes_split_under_identity_type(seed in any::<u64>(), half in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = BinaryCode::random_self_dual(2 * half, &mut rng);
        prop_assert!(code.is_self_dual());
        // With every coordinate fixed the fixed part is the whole code.
        let pi = decomp::structure_split(&code, 0, 2 * half).unwrap();
        prop_assert_eq!(pi.k2, half);
    }

    #[test]
    fn idempotents_are_orthogonal(p in prop::sample::select(vec![3usize, 5, 7, 11, 13, 17])) {
        let sys = factor_cyclotomic(p).unwrap();
        let ids = sys.idempotents();
        let mut sum = RingElement::zero(p);
        for (i, a) in ids.iter().enumerate() {
            prop_assert_eq!(&a.mul(a).unwrap(), a);
            for b in &ids[i + 1..] {
                prop_assert!(a.mul(b).unwrap().is_zero());
            }
            sum = sum.add(a).unwrap();
        }
        // Together they form the identity of the even-weight ring P.
        let one_plus_x = RingElement::one(p).add(&RingElement::monomial(p, 1)).unwrap();
        prop_assert_eq!(sum.mul(&one_plus_x).unwrap(), one_plus_x);
        prop_assert!(sum.is_even());
    }
}

#[test]
fn split_assemble_round_trip_on_a_three_cycle_code() {
    let set = sdcode::classify::golay_so23_dataset().unwrap();
    let plan = sdcode::classify::order7_three_cycle_plan(&set).unwrap();
    let spec = AutomorphismSpec::new(7, 3, 23).unwrap();
    for cand in &plan.candidates {
        let code = sdcode::classify::assemble_candidate(&plan, cand).unwrap();
        let parts = decomp::split(&code, &spec).unwrap();
        let pi = decomp::project_pi(&parts.fixed, &spec).unwrap();
        let phi = decomp::map_phi(&parts.even, &spec).unwrap();
        assert!(pi.same_space(&cand.pi));
        let again = decomp::assemble(&pi, &phi, &spec).unwrap();
        assert!(again.same_space(&code));
    }
}
