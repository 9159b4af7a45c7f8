//! Enumeration of the `M1` components for type 7-(6,2) and the three-cycle
//! construction for type 7-(3,23).

use sdcode::catalog;
use sdcode::classify::{
    enumerate_m1_cases, golay23, golay_so23_dataset, m1_canonical_key, phi_from_m1,
    three_cycle_phi, M1Equivalence,
};
use sdcode::cyclotomic::{factor_cyclotomic, form_vanishes, module_decompose};
use sdcode::decomp::{self, AutomorphismSpec};
use sdcode::equiv::are_equivalent;

#[test]
fn m1_class_counts() {
    let count = |dims, eq| enumerate_m1_cases(dims, eq).unwrap().len();
    assert_eq!(count((1, 5), M1Equivalence::Monomial), 1);
    assert_eq!(count((2, 4), M1Equivalence::Monomial), 9);
    assert_eq!(count((3, 3), M1Equivalence::Monomial), 22);
    assert_eq!(count((3, 3), M1Equivalence::MonomialWithSwap), 18);
}

#[test]
fn two_dimensional_classes_are_the_bundled_ones_in_order() {
    let classes = enumerate_m1_cases((2, 4), M1Equivalence::Monomial).unwrap();
    let keys: Vec<_> = classes
        .iter()
        .map(|m| m1_canonical_key(m, M1Equivalence::Monomial).unwrap())
        .collect();
    for i in 1..=9 {
        let m = catalog::module(&format!("M1_7_6_2_A{i}")).unwrap();
        let k = m1_canonical_key(&m, M1Equivalence::Monomial).unwrap();
        assert_eq!(keys.iter().position(|x| *x == k), Some(i - 1), "A{i}");
    }
}

#[test]
fn one_dimensional_class_is_the_bundled_one() {
    let classes = enumerate_m1_cases((1, 5), M1Equivalence::Monomial).unwrap();
    let bundled = catalog::module("M1_7_6_2_I").unwrap();
    assert_eq!(
        m1_canonical_key(&classes[0], M1Equivalence::Monomial).unwrap(),
        m1_canonical_key(&bundled, M1Equivalence::Monomial).unwrap()
    );
}

#[test]
fn every_enumerated_phi_is_self_dual_with_weight_eight_image() {
    let sys = factor_cyclotomic(7).unwrap();
    let spec = AutomorphismSpec::new(7, 6, 0).unwrap();
    for (dims, eq) in [
        ((1, 5), M1Equivalence::Monomial),
        ((2, 4), M1Equivalence::Monomial),
        ((3, 3), M1Equivalence::MonomialWithSwap),
    ] {
        for m1 in enumerate_m1_cases(dims, eq).unwrap() {
            let phi = phi_from_m1(&m1).unwrap();
            let (_, d) = module_decompose(&phi, &sys).unwrap();
            assert_eq!(d, vec![dims.0, dims.1]);
            assert!(form_vanishes(&phi, &phi).unwrap());
            let image = decomp::lift_phi(&phi, &spec).unwrap();
            let mw = image.min_weight(None).unwrap().unwrap().weight;
            assert!(mw >= 8, "{dims:?}: weight {mw}");
        }
    }
}

#[test]
fn three_cycle_phi_matches_bundled_components() {
    let phi = three_cycle_phi().unwrap();
    let sys = factor_cyclotomic(7).unwrap();
    let (parts, dims) = module_decompose(&phi, &sys).unwrap();
    assert_eq!(dims, vec![1, 2]);
    let spec = AutomorphismSpec::new(7, 3, 0).unwrap();
    for (part, name) in parts.iter().zip(["M1_7_3_23", "M2_7_3_23"]) {
        let bundled = catalog::module(name).unwrap();
        let a = decomp::lift_phi(part, &spec).unwrap();
        let b = decomp::lift_phi(&bundled, &spec).unwrap();
        assert!(a.same_space(&b), "{name}");
    }
}

#[test]
fn golay_hyperplanes_are_three_inequivalent_codes() {
    let g = golay23();
    assert_eq!((g.n(), g.k()), (23, 12));
    assert_eq!(g.min_weight(None).unwrap().unwrap().weight, 7);
    let set = golay_so23_dataset().unwrap();
    assert_eq!(set.entries.len(), 3);
    for (i, a) in set.entries.iter().enumerate() {
        assert!(a.code.is_self_orthogonal());
        assert_eq!(a.code.k(), 10);
        assert_eq!(a.code.min_weight(None).unwrap().unwrap().weight, 8);
        for b in &set.entries[i + 1..] {
            assert!(!are_equivalent(&a.code, &b.code).unwrap());
        }
    }
}
