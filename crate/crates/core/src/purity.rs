//! The character dual `M⁺ = Hom(M, Z/n)`, the double-dual unit
//! `λ_M : M → M⁺⁺`, tensor-purity of conflations, injectivity, flatness, and
//! the verification suites built on them.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_cyclic, enumerate_modules, extension_classes, for_each_extension};
use crate::error::{Error, Result};
use crate::exact::{check_conflation, make_conflation, pullback, splits, Conflation, ConflationDefect, SplitWitness};
use crate::linalg::{divisors, gcd};
use crate::module::{
    cached_tensor, cokernel, kernel, tensor_mor_with, Adjunction, FiniteModule, HomModule, Morphism, RingSpec,
};
use crate::report::{Counterexample, SuiteResult};
use crate::system::{extend_along, section_of, MorphismEquation};

thread_local! {
    static DUALS: RefCell<HashMap<FiniteModule, Rc<HomModule>>> = RefCell::new(HashMap::new());
}

/// `Hom(M, J)` with its element/morphism correspondence (memoized per thread).
pub fn dual_hom(m: &FiniteModule) -> Rc<HomModule> {
    DUALS.with(|cache| {
        if let Some(h) = cache.borrow().get(m) {
            return Rc::clone(h);
        }
        let h = Rc::new(HomModule::new(m, &m.ring().cogenerator()).expect("same ring"));
        cache.borrow_mut().insert(m.clone(), Rc::clone(&h));
        h
    })
}

pub fn dual(m: &FiniteModule) -> FiniteModule {
    dual_hom(m).module().clone()
}

/// `f⁺ : N⁺ → M⁺`, `ψ ↦ ψ ∘ f`.
pub fn dual_mor(f: &Morphism) -> Morphism {
    let source = dual_hom(f.codomain());
    let target = dual_hom(f.domain());
    let j = f.ring().cogenerator();
    source.functor_map(&target, f, &Morphism::identity(&j))
}

/// `Z⁺ → Y⁺ → X⁺` for `X → Y → Z`.
pub fn dual_conflation(c: &Conflation) -> Result<Conflation> {
    make_conflation(dual_mor(c.deflation()), dual_mor(c.inflation()))
}

/// `λ_M : M → M⁺⁺`, obtained by currying `M ⊗ M⁺ ≅ M⁺ ⊗ M → J`
/// (symmetry followed by evaluation) through the tensor-hom adjunction.
pub fn double_dual_unit(m: &FiniteModule) -> Morphism {
    let j = m.ring().cogenerator();
    let m_plus = dual(m);
    let adj = Adjunction::new(m, &m_plus, &j).expect("same ring");
    let (swapped, swap) = adj.tensor().swap().expect("same ring");
    let hom = dual_hom(m);
    let gens: Vec<Morphism> = (0..m_plus.rank()).map(|a| hom.generator(a)).collect();
    let ev = swapped.bilinear_map(&j, |a, i| gens[a].column(i));
    let lambda = adj.curry(&ev.compose_unchecked(&swap));
    debug_assert_eq!(lambda.codomain(), &dual(&m_plus));
    lambda
}

/// `(λ_M)⁺ ∘ λ_{M⁺} = 1_{M⁺}`.
pub fn triangle_identity_check(m: &FiniteModule) -> bool {
    let lambda = double_dual_unit(m);
    let lambda_dual = double_dual_unit(&dual(m));
    dual_mor(&lambda).compose_unchecked(&lambda_dual).is_identity()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PurityMethod {
    DualSplits,
    TensorOracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityWitness {
    /// A splitting of the dual conflation.
    DualSplit(SplitWitness),
    /// The dual conflation admits no section.
    DualDoesNotSplit,
    /// Tensoring with `[divisor]` breaks exactness as described by `defect`.
    FailingDivisor { divisor: u64, defect: ConflationDefect },
    /// Every cyclic test module preserved exactness.
    AllDivisorsExact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurityVerdict {
    pub is_pure: bool,
    pub method: PurityMethod,
    pub witness: PurityWitness,
}

/// Pure iff the dual conflation splits.
pub fn is_pure(c: &Conflation) -> PurityVerdict {
    let dual = dual_conflation(c).expect("the dual of a conflation is a conflation");
    match splits(&dual) {
        Some(w) => PurityVerdict {
            is_pure: true,
            method: PurityMethod::DualSplits,
            witness: PurityWitness::DualSplit(w),
        },
        None => PurityVerdict {
            is_pure: false,
            method: PurityMethod::DualSplits,
            witness: PurityWitness::DualDoesNotSplit,
        },
    }
}

/// Pure iff `L ⊗ [d]` is a conflation for every divisor `d > 1` of `n`.
pub fn is_pure_oracle(c: &Conflation) -> PurityVerdict {
    is_pure_oracle_skipping(c, None)
}

/// [`is_pure_oracle`] with one divisor left out of the test family. Only
/// meaningful as a deliberately broken oracle for mutation testing.
pub fn is_pure_oracle_skipping(c: &Conflation, skip: Option<u64>) -> PurityVerdict {
    let ring = c.ring();
    for d in ring.proper_divisors() {
        if Some(d) == skip {
            continue;
        }
        let t = FiniteModule::cyclic(ring, d).expect("divisor");
        if let Err(defect) = tensor_exact(&t, c) {
            return PurityVerdict {
                is_pure: false,
                method: PurityMethod::TensorOracle,
                witness: PurityWitness::FailingDivisor { divisor: d, defect },
            };
        }
    }
    PurityVerdict {
        is_pure: true,
        method: PurityMethod::TensorOracle,
        witness: PurityWitness::AllDivisorsExact,
    }
}

/// Whether `T ⊗ L` is a conflation.
pub fn tensor_exact(t: &FiniteModule, c: &Conflation) -> std::result::Result<(), ConflationDefect> {
    let tx = cached_tensor(t, c.left());
    let ty = cached_tensor(t, c.middle());
    let tz = cached_tensor(t, c.right());
    let id = Morphism::identity(t);
    let f = tensor_mor_with(&tx, &ty, &id, c.inflation());
    let g = tensor_mor_with(&ty, &tz, &id, c.deflation());
    check_conflation(&f, &g)
}

/// The inclusion of the ideal `dZ/n ≅ [n/d]` into `Z/n`.
fn ideal_inclusion(ring: RingSpec, d: u64) -> Morphism {
    let n = ring.modulus();
    let ideal = FiniteModule::cyclic(ring, n / d).expect("divisor");
    Morphism::from_images(ideal, ring.unit(), &[vec![d]]).expect("well defined")
}

/// A map from an ideal `dZ/n` to `M` that does not extend to `Z/n`, if any.
pub fn baer_obstruction(m: &FiniteModule) -> Option<(u64, Morphism)> {
    let ring = m.ring();
    for d in divisors(ring.modulus()) {
        if d == ring.modulus() {
            continue;
        }
        let inc = ideal_inclusion(ring, d);
        let hom = HomModule::new(inc.domain(), m).expect("same ring");
        // Extendable maps form a subgroup, so generators suffice.
        for k in 0..hom.module().rank() {
            let phi = hom.generator(k);
            if extend_along(&inc, &phi).is_none() {
                return Some((d, phi));
            }
        }
    }
    None
}

/// Baer's criterion over the finitely many ideals of `Z/n`.
pub fn is_injective(m: &FiniteModule) -> bool {
    baer_obstruction(m).is_none()
}

/// Whether `Hom(L, M)` is exact, i.e. restriction `Hom(Y, M) → Hom(X, M)`
/// along the inflation is onto.
pub fn hom_exact_into(m: &FiniteModule, c: &Conflation) -> bool {
    let f = c.inflation();
    let eq = MorphismEquation::new(
        vec![(f.codomain().clone(), m.clone())],
        &[(f.domain().clone(), m.clone())],
        |phi| vec![phi[0].compose_unchecked(f)],
    );
    eq.image_order() == HomModule::new(f.domain(), m).expect("same ring").module().order()
}

/// Injectivity tested directly on a family of conflations.
pub fn is_injective_by_conflations<'a>(m: &FiniteModule, family: impl IntoIterator<Item = &'a Conflation>) -> bool {
    family.into_iter().all(|c| hom_exact_into(m, c))
}

/// Flat iff `M⁺` is injective.
pub fn is_flat(m: &FiniteModule) -> bool {
    is_injective(&dual(m))
}

/// Structural flatness test: for every prime `p`, the `p`-part of each
/// invariant factor is either trivial or the full `p`-part of `n`.
pub fn is_flat_structural(m: &FiniteModule) -> bool {
    let n = m.modulus();
    let primes: Vec<u64> = divisors(n)
        .into_iter()
        .filter(|&p| p > 1 && divisors(p).len() == 2)
        .collect();
    let p_part = |x: u64, p: u64| {
        let mut x = x;
        let mut out = 1;
        while x.is_multiple_of(p) {
            x /= p;
            out *= p;
        }
        out
    };
    m.factors().iter().all(|&d| {
        primes.iter().all(|&p| {
            let part = p_part(d, p);
            part == 1 || part == p_part(n, p)
        })
    })
}

/// `T ⊗ −` preserves every conflation of `family`.
pub fn is_flat_by_tensor<'a>(m: &FiniteModule, family: impl IntoIterator<Item = &'a Conflation>) -> bool {
    family.into_iter().all(|c| tensor_exact(m, c).is_ok())
}

/// The objects and maps produced while splitting the dual of a conflation
/// that ends in a flat object.
#[derive(Clone, Debug)]
pub struct SectionExtraction {
    /// Pullback of `f⁺ : G⁺ → F⁺⁺` along `λ_F`.
    pub pullback_object: FiniteModule,
    /// Top row `K⁺ → Q → F` of the pullback diagram.
    pub top_row: Conflation,
    /// `t' : F → Q` with `t ∘ t' = 1_F`.
    pub splitting: Morphism,
    /// `g₁ = g ∘ t' : F → G⁺`.
    pub lifted: Morphism,
    /// `g₁⁺ ∘ λ_G : G → F⁺`, a retraction of `f : F⁺ → G`.
    pub retraction: Morphism,
}

/// Splits the dual `F⁺ → G → K` of a conflation `c` ending in a flat `F`.
///
/// Dualizing gives `K⁺ → G⁺ → F⁺⁺`; pulling the deflation back along
/// `λ_F : F → F⁺⁺` yields a conflation `K⁺ → Q → F` ending in `F`, hence
/// pure and split by some `t'`. With `g₁ = g∘t'` one gets `f⁺ g₁ = λ_F`,
/// and `g₁⁺ ∘ λ_G` retracts `f` because `(λ_F)⁺ λ_{F⁺} = 1`.
pub fn extract_section(c: &Conflation) -> Result<SectionExtraction> {
    let flat = c.right();
    if !is_flat(flat) {
        return Err(Error::NotFlat(flat.to_string()));
    }
    let dual_c = dual_conflation(c)?;
    let f = dual_c.inflation();
    let lambda_f = double_dual_unit(flat);
    let f_plus = dual_mor(f);
    let pb = pullback(&f_plus, &lambda_f)?;
    let t = pb.to_other.clone();
    let (_, top_inc) = kernel(&t);
    let top_row = make_conflation(top_inc, t.clone())?;
    if !is_pure(&top_row).is_pure {
        return Err(Error::InternalInconsistency(
            "top row of the pullback diagram is not pure".into(),
        ));
    }
    let splitting = section_of(&t).ok_or_else(|| Error::InternalInconsistency("pure top row does not split".into()))?;
    let lifted = pb.to_deflation_source.compose_unchecked(&splitting);
    if f_plus.compose_unchecked(&lifted) != lambda_f {
        return Err(Error::InternalInconsistency("f⁺ ∘ g₁ differs from λ_F".into()));
    }
    let lambda_g = double_dual_unit(f.codomain());
    let retraction = dual_mor(&lifted).compose_unchecked(&lambda_g);
    if !retraction.compose_unchecked(f).is_identity() {
        return Err(Error::InternalInconsistency("g₁⁺ ∘ k ∘ f is not the identity".into()));
    }
    Ok(SectionExtraction {
        pullback_object: pb.object,
        top_row,
        splitting,
        lifted,
        retraction,
    })
}

/// Every pure conflation starting at `M` with end term of order at most
/// `max_end` (one conflation per extension class, at most `class_cap` per
/// end term) admits a retraction.
pub fn is_pure_injective(m: &FiniteModule, max_end: u128, class_cap: usize, seed: u64) -> bool {
    pure_injectivity_failures(m, max_end, class_cap, seed).is_empty()
}

/// Pure conflations starting at `M` that do not split, within the bounds.
pub fn pure_injectivity_failures(m: &FiniteModule, max_end: u128, class_cap: usize, seed: u64) -> Vec<Conflation> {
    let mut out = Vec::new();
    for z in enumerate_modules(m.ring(), max_end) {
        for c in extension_classes(m, &z, class_cap, seed) {
            if is_pure(&c).is_pure && splits(&c).is_none() {
                out.push(c);
            }
        }
    }
    out
}

fn ce(check: &str, leg: &str, detail: String, data: serde_json::Value) -> Counterexample {
    Counterexample {
        check: check.into(),
        leg: leg.into(),
        detail,
        data,
    }
}

fn module_json(m: &FiniteModule) -> serde_json::Value {
    serde_json::to_value(m).expect("modules serialize")
}

/// Bounds for [`verify_purity_agreement`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PurityBounds {
    /// Largest kernel order.
    pub max_kernel: u128,
    /// Largest end-term order.
    pub max_end: u128,
    /// `None`: every monomorphic extension; `Some(c)`: at most `c` seeded
    /// extension classes per pair of end terms.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Divisor left out of the tensor oracle (mutation testing only).
    pub skip_divisor: Option<u64>,
}

/// Compares both purity decisions on one conflation; also checks that the
/// dual is a conflation.
pub fn check_purity_instance(c: &Conflation, skip_divisor: Option<u64>, out: &mut SuiteResult) {
    let data = || serde_json::json!({ "conflation": c.to_json(), "skip_divisor": skip_divisor });
    let dual = dual_conflation(c);
    out.record("dual_is_conflation", dual.is_ok(), || {
        ce("prop1", "dual", format!("{:?}", dual.as_ref().err()), data())
    });
    if dual.is_err() {
        return;
    }
    let primary = is_pure(c);
    let oracle = is_pure_oracle_skipping(c, skip_divisor);
    out.record("agreement", primary.is_pure == oracle.is_pure, || {
        ce(
            "prop1",
            "dual-splits/tensor-oracle",
            format!(
                "dual splits: {}, tensor oracle: {} ({:?})",
                primary.is_pure, oracle.is_pure, oracle.witness
            ),
            data(),
        )
    });
    if primary.is_pure {
        *out.counts.entry("pure".into()).or_default() += 1;
    }
}

/// For every conflation `K → Y → F` within the bounds, "the dual splits"
/// and "tensoring with every cyclic module preserves exactness" agree.
pub fn verify_purity_agreement(ring: RingSpec, bounds: &PurityBounds) -> SuiteResult {
    let mut out = SuiteResult::new("prop1");
    let kernels = enumerate_modules(ring, bounds.max_kernel);
    let ends = enumerate_modules(ring, bounds.max_end);
    for k in &kernels {
        for f in &ends {
            match bounds.samples {
                None => for_each_extension(k, f, |c| check_purity_instance(&c, bounds.skip_divisor, &mut out)),
                Some(count) => {
                    for c in extension_classes(k, f, count, bounds.seed) {
                        check_purity_instance(&c, bounds.skip_divisor, &mut out);
                    }
                }
            }
        }
    }
    out
}

/// Bounds shared by the flatness and pure-injectivity suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatnessBounds {
    /// Largest order of the object under test.
    pub max_order: u128,
    /// Largest order of the other end of the quantified conflations.
    pub max_kernel: u128,
    /// Extension classes examined per pair of end terms.
    pub class_cap: usize,
    pub seed: u64,
}

/// Conflations `[a] → Y → [b]` for all cyclic `[a]`, `[b]`, one per
/// extension class: the test family for flatness by tensoring.
pub fn cyclic_test_conflations(ring: RingSpec) -> Vec<Conflation> {
    let cyclic = enumerate_cyclic(ring, ring.modulus() as u128);
    let mut out = Vec::new();
    for a in &cyclic {
        for b in &cyclic {
            out.extend(extension_classes(a, b, usize::MAX, 0));
        }
    }
    out
}

/// The three flatness verdicts on one module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessVerdicts {
    pub tensor_flat: bool,
    pub dual_injective: bool,
    pub conflations_pure: bool,
}

/// (i) `− ⊗ M` preserves the cyclic test conflations, (ii) `M⁺` is
/// injective, (iii) every listed conflation ending in `M` is pure. The
/// three must agree and match the structural test; for flat `M` the dual of
/// every listed conflation is split by [`extract_section`], and for
/// non-flat `M` it refuses.
pub fn check_flat_module(m: &FiniteModule, family: &[Conflation], bounds: &FlatnessBounds, out: &mut SuiteResult) {
    let ring = m.ring();
    let mj = module_json(m);
    let mut ending = Vec::new();
    for k in enumerate_modules(ring, bounds.max_kernel) {
        ending.extend(extension_classes(&k, m, bounds.class_cap, bounds.seed));
    }
    let impure = ending.iter().find(|c| !is_pure(c).is_pure);
    let v = FlatnessVerdicts {
        tensor_flat: is_flat_by_tensor(m, family),
        dual_injective: is_injective(&dual(m)),
        conflations_pure: impure.is_none(),
    };
    let agree = v.tensor_flat == v.dual_injective && v.dual_injective == v.conflations_pure;
    out.record("three_way", agree, || {
        ce(
            "flat-equiv",
            "tensor/dual-injective/conflations-pure",
            format!("{v:?}"),
            serde_json::json!({ "module": mj, "impure": impure.map(|c| c.to_json()) }),
        )
    });
    let structural = is_flat_structural(m);
    out.record("structural", structural == v.dual_injective, || {
        ce(
            "flat-equiv",
            "structural",
            format!("structural {structural}, dual injective {}", v.dual_injective),
            serde_json::json!({ "module": mj }),
        )
    });
    if v.dual_injective {
        for c in &ending {
            let r = extract_section(c);
            out.record("extract_section", r.is_ok(), || {
                ce(
                    "flat-equiv",
                    "extract-section",
                    format!("{:?}", r.as_ref().err()),
                    serde_json::json!({ "module": mj, "conflation": c.to_json() }),
                )
            });
        }
    } else if let Some(c) = ending.first() {
        let r = extract_section(c);
        out.record("extract_section_rejects", matches!(r, Err(Error::NotFlat(_))), || {
            ce(
                "flat-equiv",
                "extract-section-precondition",
                "non-flat end accepted".into(),
                serde_json::json!({ "module": mj }),
            )
        });
    }
}

/// [`check_flat_module`] for each `M` with `|M| ≤ max_order`.
pub fn verify_flat_equiv(ring: RingSpec, bounds: &FlatnessBounds) -> SuiteResult {
    let mut out = SuiteResult::new("flat-equiv");
    let family = cyclic_test_conflations(ring);
    for m in enumerate_modules(ring, bounds.max_order) {
        check_flat_module(&m, &family, bounds, &mut out);
    }
    out
}

/// `λ_F` is a monomorphism (here an isomorphism), `F → F⁺⁺ → coker λ_F`
/// is pure, `F⁺⁺` is pure injective with end terms of order
/// `≤ max_kernel`, and the triangle identity holds.
pub fn check_enough_pi_module(f: &FiniteModule, bounds: &FlatnessBounds, out: &mut SuiteResult) {
    let data = || serde_json::json!({ "module": module_json(f) });
    let lambda = double_dual_unit(f);
    let mono = lambda.is_mono();
    out.record("lambda_mono", mono, || {
        ce("enough-pi", "lambda-mono", "λ_F is not a monomorphism".into(), data())
    });
    out.record("lambda_iso", lambda.is_iso(), || {
        ce("enough-pi", "lambda-iso", "λ_F is not an isomorphism".into(), data())
    });
    if mono {
        let (_, q) = cokernel(&lambda);
        let pure = make_conflation(lambda.clone(), q).map(|c| is_pure(&c).is_pure);
        out.record("embedding_pure", pure == Ok(true), || {
            ce("enough-pi", "embedding-pure", format!("{pure:?}"), data())
        });
    }
    let dd = dual(&dual(f));
    let failures = pure_injectivity_failures(&dd, bounds.max_kernel, bounds.class_cap, bounds.seed);
    out.record("double_dual_pure_injective", failures.is_empty(), || {
        ce(
            "enough-pi",
            "pure-injective",
            "a pure conflation starting at F⁺⁺ does not split".into(),
            serde_json::json!({ "module": module_json(f), "conflation": failures[0].to_json() }),
        )
    });
    out.record("triangle_identity", triangle_identity_check(f), || {
        ce("enough-pi", "triangle", "(λ_F)⁺ λ_{F⁺} ≠ 1".into(), data())
    });
}

/// [`check_enough_pi_module`] for each `F` with `|F| ≤ max_order`.
pub fn verify_enough_pure_injectives(ring: RingSpec, bounds: &FlatnessBounds) -> SuiteResult {
    let mut out = SuiteResult::new("enough-pi");
    for f in enumerate_modules(ring, bounds.max_order) {
        check_enough_pi_module(&f, bounds, &mut out);
    }
    out
}

/// Order identities between cyclic modules: `|Hom([a],[b])| = |[a]⊗[b]| =
/// gcd(a, b)` for all divisors `a`, `b` of `n`, and `|M⁺| = |M|` for every
/// `M` with `|M| ≤ max_order`.
pub fn verify_structural(ring: RingSpec, max_order: u128) -> SuiteResult {
    let mut out = SuiteResult::new("structural");
    let divs = divisors(ring.modulus());
    for &a in &divs {
        for &b in &divs {
            let (ma, mb) = (
                FiniteModule::cyclic(ring, a).expect("divisor"),
                FiniteModule::cyclic(ring, b).expect("divisor"),
            );
            let hom = HomModule::new(&ma, &mb).expect("same ring").module().order();
            let tensor = cached_tensor(&ma, &mb).module().order();
            let g = gcd(a, b) as u128;
            out.record("cyclic_orders", hom == g && tensor == g, || {
                ce(
                    "structural",
                    "hom/tensor/gcd",
                    format!("|Hom| = {hom}, |⊗| = {tensor}, gcd = {g}"),
                    serde_json::json!({ "a": a, "b": b, "n": ring.modulus() }),
                )
            });
        }
    }
    for m in enumerate_modules(ring, max_order) {
        let d = dual(&m);
        out.record("dual_order", d.order() == m.order(), || {
            ce(
                "structural",
                "dual-order",
                format!("|M| = {}, |M⁺| = {}", m.order(), d.order()),
                serde_json::json!({ "module": module_json(&m) }),
            )
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::tests::nonsplit_z4;

    fn ring(n: u64) -> RingSpec {
        RingSpec::new(n).unwrap()
    }

    fn module(n: u64, f: &[u64]) -> FiniteModule {
        FiniteModule::new(ring(n), f.to_vec()).unwrap()
    }

    /// `λ_M` computed directly: `x ↦ (ψ ↦ ψ(x))`.
    fn lambda_direct(m: &FiniteModule) -> Morphism {
        let mp = dual_hom(m);
        let mpp = dual_hom(mp.module());
        let images: Vec<Vec<u64>> = (0..m.rank())
            .map(|i| {
                let x = m.basis_element(i);
                let values: Vec<Vec<u64>> = (0..mp.module().rank()).map(|k| mp.generator(k).apply(&x)).collect();
                let functional = Morphism::from_images(mp.module().clone(), m.ring().unit(), &values).unwrap();
                mpp.to_element(&functional)
            })
            .collect();
        Morphism::from_images(m.clone(), mpp.module().clone(), &images).unwrap()
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&module(4, &[2])).factors(), &[2]);
        assert_eq!(dual(&ring(4).unit()).factors(), &[4]);
        // contravariance on a composable pair
        let (a, b, c) = (module(4, &[2, 4]), module(4, &[4]), module(4, &[2, 2]));
        let f = Morphism::new(a.clone(), b.clone(), vec![vec![2, 1]]).unwrap();
        let g = Morphism::new(b, c, vec![vec![1], vec![0]]).unwrap();
        let lhs = dual_mor(&g.compose(&f).unwrap());
        let rhs = dual_mor(&f).compose(&dual_mor(&g)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lambda_matches_direct_evaluation() {
        for n in [4u64, 6, 8, 9, 12] {
            for m in enumerate_modules(ring(n), 36) {
                assert_eq!(double_dual_unit(&m), lambda_direct(&m), "M = {m}");
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let z = FiniteModule::zero(ring(4));
        assert!(double_dual_unit(&z).is_zero());
        let l = double_dual_unit(&module(4, &[2]));
        assert!(l.is_iso());
        // naturality λ_N ∘ f = f⁺⁺ ∘ λ_M
        let (m, n) = (module(12, &[2, 6]), module(12, &[3, 12]));
        for f in crate::enumerate::sample_morphisms(&m, &n, 20, 3) {
            let lhs = double_dual_unit(&n).compose(&f).unwrap();
            let rhs = dual_mor(&dual_mor(&f)).compose(&double_dual_unit(&m)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn triangle_examples() {
        assert!(triangle_identity_check(&FiniteModule::zero(ring(4))));
        assert!(triangle_identity_check(&module(4, &[2, 4])));
    }

    #[test]
    fn purity_examples() {
        let c = nonsplit_z4();
        let v = is_pure(&c);
        assert!(!v.is_pure);
        assert_eq!(v.witness, PurityWitness::DualDoesNotSplit);
        let o = is_pure_oracle(&c);
        assert!(!o.is_pure);
        assert!(matches!(
            o.witness,
            PurityWitness::FailingDivisor {
                divisor: 2,
                defect: ConflationDefect::InflationNotMono { .. }
            }
        ));
        let s = Conflation::split(&module(4, &[2]), &module(4, &[2])).unwrap();
        let v = is_pure(&s);
        assert!(v.is_pure);
        if let PurityWitness::DualSplit(w) = &v.witness {
            assert!(w.verifies(&dual_conflation(&s).unwrap()));
        } else {
            panic!("expected a splitting");
        }
        assert!(is_pure_oracle(&s).is_pure);
        // skipping d = 2 hides the defect
        assert!(is_pure_oracle_skipping(&c, Some(2)).is_pure);
    }

    #[test]
    fn injectivity_examples() {
        assert!(is_injective(&ring(4).unit()));
        let (d, phi) = baer_obstruction(&module(4, &[2])).unwrap();
        assert_eq!(d, 2);
        assert_eq!(phi.matrix(), &[vec![1]]);
        assert!(is_injective(&module(2, &[2])));
        assert!(is_injective(&module(12, &[3])));
        assert!(!is_injective(&module(12, &[6])));
    }

    #[test]
    fn flatness_examples() {
        assert!(is_flat(&ring(4).unit()));
        assert!(!is_flat(&module(4, &[2])));
        assert!(is_flat(&module(4, &[4, 4])));
        assert!(is_flat_structural(&module(4, &[4, 4])));
        let fam = cyclic_test_conflations(ring(4));
        assert!(!is_flat_by_tensor(&module(4, &[2]), &fam));
        assert!(is_flat_by_tensor(&module(4, &[4, 4]), &fam));
    }

    #[test]
    fn extract_section_examples() {
        let r4 = ring(4);
        for f in [r4.unit(), module(4, &[4, 4])] {
            for k in enumerate_modules(r4, 4) {
                for c in extension_classes(&k, &f, 64, 0) {
                    let x = extract_section(&c).unwrap();
                    let dual_c = dual_conflation(&c).unwrap();
                    assert!(x.retraction.compose(dual_c.inflation()).unwrap().is_identity());
                }
            }
        }
        let c = nonsplit_z4();
        assert!(matches!(extract_section(&c), Err(Error::NotFlat(_))));
    }

    #[test]
    fn pure_injective_examples() {
        let r4 = ring(4);
        assert!(is_pure_injective(&FiniteModule::zero(r4), 8, 64, 0));
        for x in enumerate_modules(r4, 8) {
            assert!(is_pure_injective(&dual(&x), 8, 64, 0));
        }
    }

    #[test]
    fn flat_equiv_small() {
        let b = FlatnessBounds {
            max_order: 16,
            max_kernel: 4,
            class_cap: 64,
            seed: 0,
        };
        let r = verify_flat_equiv(ring(4), &b);
        assert!(r.passed(), "{:?}", r.counterexamples);
        let r = verify_enough_pure_injectives(ring(4), &b);
        assert!(r.passed(), "{:?}", r.counterexamples);
    }

    #[test]
    fn purity_agreement_small() {
        let mut b = PurityBounds {
            max_kernel: 4,
            max_end: 4,
            samples: None,
            seed: 0,
            skip_divisor: None,
        };
        let r = verify_purity_agreement(ring(4), &b);
        assert!(r.passed(), "{:?}", r.counterexamples);
        assert!(r.counts["pure"] > 0 && r.counts["pure"] < r.counts["agreement"]);
        b.skip_divisor = Some(2);
        let r = verify_purity_agreement(ring(4), &b);
        assert!(!r.passed());
        assert_eq!(r.counterexamples[0].leg, "dual-splits/tensor-oracle");
        b.skip_divisor = None;
        b.samples = Some(3);
        assert!(verify_purity_agreement(ring(12), &b).passed());
    }

    #[test]
    fn structural_small() {
        for n in [4u64, 12] {
            assert!(verify_structural(ring(n), 16).passed());
        }
    }
}
