//! Sampled checks of the currying bijection
//! `Hom(F ⊗ G, K) ≅ Hom(F, Hom(G, K))`: both directions are inverse, and
//! currying is natural in each of the three arguments.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::enumerate::{enumerate_modules, sample_morphisms_with};
use crate::module::{tensor_mor, Adjunction, FiniteModule, Morphism, RingSpec};
use crate::report::{Counterexample, SuiteResult};

fn pick(modules: &[FiniteModule], rng: &mut ChaCha8Rng) -> FiniteModule {
    modules.choose(rng).expect("nonempty").clone()
}

fn one(m: &FiniteModule, n: &FiniteModule, rng: &mut ChaCha8Rng) -> Morphism {
    sample_morphisms_with(m, n, 1, rng).remove(0)
}

/// Checks one triple `(F, G, K)` with a sampled `φ : F ⊗ G → K`, sampled
/// maps `a : F' → F`, `b : G' → G`, `c : K → K'`, and a sampled
/// `θ : F → Hom(G, K)`. Returns the failing law, if any.
pub fn check_triple(
    f: &FiniteModule,
    g: &FiniteModule,
    k: &FiniteModule,
    others: &[FiniteModule],
    rng: &mut ChaCha8Rng,
) -> Option<&'static str> {
    let adj = Adjunction::new(f, g, k).expect("same ring");
    let phi = one(adj.tensor().module(), k, rng);
    let curried = adj.curry(&phi);
    if adj.uncurry(&curried) != phi {
        return Some("uncurry ∘ curry");
    }
    let theta = one(f, adj.inner_hom().module(), rng);
    if adj.curry(&adj.uncurry(&theta)) != theta {
        return Some("curry ∘ uncurry");
    }
    let x = adj.lhs().to_element(&phi);
    if adj.backward(&adj.forward(&x)) != x {
        return Some("backward ∘ forward");
    }

    // naturality in F: curry(φ ∘ (a ⊗ 1)) = curry(φ) ∘ a
    let f2 = pick(others, rng);
    let a = one(&f2, f, rng);
    let adj_f = Adjunction::new(&f2, g, k).expect("same ring");
    let lhs = adj_f.curry(
        &phi.compose(&tensor_mor(&a, &Morphism::identity(g)).expect("same ring"))
            .expect("composable"),
    );
    if lhs != curried.compose(&a).expect("composable") {
        return Some("naturality in F");
    }

    // naturality in G: curry(φ ∘ (1 ⊗ b)) = Hom(b, K) ∘ curry(φ)
    let g2 = pick(others, rng);
    let b = one(&g2, g, rng);
    let adj_g = Adjunction::new(f, &g2, k).expect("same ring");
    let lhs = adj_g.curry(
        &phi.compose(&tensor_mor(&Morphism::identity(f), &b).expect("same ring"))
            .expect("composable"),
    );
    let restrict = adj
        .inner_hom()
        .functor_map(adj_g.inner_hom(), &b, &Morphism::identity(k));
    if lhs != restrict.compose(&curried).expect("composable") {
        return Some("naturality in G");
    }

    // naturality in K: curry(c ∘ φ) = Hom(G, c) ∘ curry(φ)
    let k2 = pick(others, rng);
    let c = one(k, &k2, rng);
    let adj_k = Adjunction::new(f, g, &k2).expect("same ring");
    let lhs = adj_k.curry(&c.compose(&phi).expect("composable"));
    let push = adj
        .inner_hom()
        .functor_map(adj_k.inner_hom(), &Morphism::identity(g), &c);
    if lhs != push.compose(&curried).expect("composable") {
        return Some("naturality in K");
    }
    None
}

/// Seed of the `i`-th triple drawn under `seed`, so each triple can be
/// replayed on its own.
fn triple_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

/// Draws `(F, G, K)` from `pool` with `triple_seed` and checks them.
pub fn check_seeded_triple(
    pool: &[FiniteModule],
    triple_seed: u64,
) -> (FiniteModule, FiniteModule, FiniteModule, Option<&'static str>) {
    let mut rng = ChaCha8Rng::seed_from_u64(triple_seed);
    let (f, g, k) = (pick(pool, &mut rng), pick(pool, &mut rng), pick(pool, &mut rng));
    let failure = check_triple(&f, &g, &k, pool, &mut rng);
    (f, g, k, failure)
}

/// `samples` random triples of modules of order at most `max_order`,
/// spread over `moduli` in turn.
pub fn verify_adjunction(moduli: &[u64], max_order: u128, samples: usize, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("adjunction");
    let pools: Vec<(u64, Vec<FiniteModule>)> = moduli
        .iter()
        .map(|&n| {
            (
                n,
                enumerate_modules(RingSpec::new(n).expect("valid modulus"), max_order),
            )
        })
        .collect();
    if pools.is_empty() {
        return out;
    }
    for i in 0..samples {
        let (n, pool) = &pools[i % pools.len()];
        let s = triple_seed(seed, i);
        let (f, g, k, failure) = check_seeded_triple(pool, s);
        out.record("triple", failure.is_none(), || Counterexample {
            check: "adjunction".into(),
            leg: failure.unwrap_or_default().into(),
            detail: format!("F = {f}, G = {g}, K = {k}"),
            data: serde_json::json!({ "n": n, "max_order": max_order, "seed": s, "f": f, "g": g, "k": k }),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_adjunction_laws() {
        let r = verify_adjunction(&[4, 6, 9, 12], 16, 100, 1);
        assert!(r.passed(), "{:?}", r.counterexamples);
        assert_eq!(r.checked, 100);
    }
}
