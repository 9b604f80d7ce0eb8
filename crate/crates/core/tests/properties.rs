//! Randomized algebraic laws over small rings.

use proptest::prelude::*;
use tensorpure::enumerate::{count_morphisms, enumerate_extensions, enumerate_modules, sample_morphisms};
use tensorpure::linalg::gcd;
use tensorpure::module::{cokernel, direct_sum, hom_module, kernel, tensor};
use tensorpure::purity::{
    double_dual_unit, dual, dual_conflation, is_flat, is_flat_structural, is_injective, is_pure, is_pure_oracle,
    triangle_identity_check,
};
use tensorpure::{FiniteModule, Morphism, RingSpec};

/// A ring `Z/n` with `2 <= n <= 24` and a module over it of order at most
/// `max_order`.
fn modules(count: usize, max_order: u128) -> impl Strategy<Value = Vec<FiniteModule>> {
    (2u64..=24).prop_flat_map(move |n| {
        let pool = enumerate_modules(RingSpec::new(n).unwrap(), max_order);
        proptest::collection::vec(proptest::sample::select(pool), count)
    })
}

fn pair_gcd_product(m: &FiniteModule, n: &FiniteModule) -> u128 {
    let mut p = 1u128;
    for &a in m.factors() {
        for &b in n.factors() {
            p *= gcd(a, b) as u128;
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_and_tensor_orders_are_gcd_products(ms in modules(2, 64)) {
        let expected = pair_gcd_product(&ms[0], &ms[1]);
        prop_assert_eq!(hom_module(&ms[0], &ms[1]).unwrap().module().order(), expected);
        prop_assert_eq!(tensor(&ms[0], &ms[1]).unwrap().order(), expected);
        prop_assert_eq!(count_morphisms(&ms[0], &ms[1]), expected);
    }

    #[test]
    fn tensor_is_symmetric_and_unital(ms in modules(2, 64)) {
        prop_assert_eq!(tensor(&ms[0], &ms[1]).unwrap(), tensor(&ms[1], &ms[0]).unwrap());
        let unit = ms[0].ring().unit();
        prop_assert_eq!(&tensor(&ms[0], &unit).unwrap(), &ms[0]);
    }

    #[test]
    fn dual_is_a_perfect_duality(ms in modules(1, 64)) {
        let m = &ms[0];
        prop_assert_eq!(&dual(m), m);
        prop_assert!(double_dual_unit(m).is_iso());
        prop_assert!(triangle_identity_check(m));
    }

    #[test]
    fn flatness_tests_agree(ms in modules(1, 64)) {
        let m = &ms[0];
        prop_assert_eq!(is_flat(m), is_flat_structural(m));
        prop_assert_eq!(is_flat(m), is_injective(&dual(m)));
    }

    #[test]
    fn kernel_and_cokernel_orders_balance(ms in modules(2, 32), seed in any::<u64>()) {
        let f = sample_morphisms(&ms[0], &ms[1], 1, seed).remove(0);
        let (k, i) = kernel(&f);
        let (c, p) = cokernel(&f);
        prop_assert!(i.is_mono());
        prop_assert!(p.is_epi());
        prop_assert_eq!(k.order() * f.image_order(), ms[0].order());
        prop_assert_eq!(c.order() * f.image_order(), ms[1].order());
        prop_assert!(f.compose(&i).unwrap().is_zero());
        prop_assert!(p.compose(&f).unwrap().is_zero());
    }

    #[test]
    fn composition_is_associative(ms in modules(4, 16), seed in any::<u64>()) {
        let f = sample_morphisms(&ms[0], &ms[1], 1, seed).remove(0);
        let g = sample_morphisms(&ms[1], &ms[2], 1, seed ^ 1).remove(0);
        let h = sample_morphisms(&ms[2], &ms[3], 1, seed ^ 2).remove(0);
        let left = h.compose(&g).unwrap().compose(&f).unwrap();
        let right = h.compose(&g.compose(&f).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(&f.compose(&Morphism::identity(&ms[0])).unwrap(), &f);
    }

    #[test]
    fn split_conflations_are_pure(ms in modules(2, 32)) {
        let s = direct_sum(&ms[0], &ms[1]).unwrap();
        let c = tensorpure::make_conflation(s.injections[0].clone(), s.projections[1].clone()).unwrap();
        prop_assert!(is_pure(&c).is_pure);
        prop_assert!(is_pure_oracle(&c).is_pure);
    }

    #[test]
    fn purity_methods_agree(ms in modules(2, 8), pick in any::<prop::sample::Index>()) {
        let all = enumerate_extensions(&ms[0], &ms[1]);
        prop_assume!(!all.is_empty());
        let c = &all[pick.index(all.len())];
        prop_assert_eq!(is_pure(c).is_pure, is_pure_oracle(c).is_pure);
        let d = dual_conflation(c).unwrap();
        prop_assert_eq!(d.left().order(), c.right().order());
        prop_assert_eq!(d.right().order(), c.left().order());
    }
}
