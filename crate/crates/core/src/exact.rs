//! Conflations (short exact sequences), pullbacks and pushouts, split
//! detection, and an exhaustive check of the exact-category axioms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_modules, MorphismIter};
use crate::error::{Error, Result};
use crate::module::{cokernel, direct_sum, kernel, FiniteModule, Morphism, RingSpec};
use crate::report::{Counterexample, SuiteResult};
use crate::system::{retraction_of, section_of, MorphismEquation};

/// Why a pair `(f, g)` failed to be a conflation, with a witness element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConflationDefect {
    /// `cod(f) ≠ dom(g)`.
    Shape(String),
    /// `g(f(e_i)) ≠ 0` for the given generator of `dom(f)`.
    CompositeNonzero { generator: usize },
    /// A nonzero element of `ker f`.
    InflationNotMono { element: Vec<u64> },
    /// An element of `cod(g)` outside the image of `g`.
    DeflationNotEpi { element: Vec<u64> },
    /// An element of `ker g` outside the image of `f`.
    KernelNotImage { element: Vec<u64> },
}

impl fmt::Display for ConflationDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConflationDefect::Shape(s) => write!(f, "shape mismatch: {s}"),
            ConflationDefect::CompositeNonzero { generator } => {
                write!(f, "g∘f is nonzero on generator {generator}")
            }
            ConflationDefect::InflationNotMono { element } => {
                write!(f, "f kills the nonzero element {element:?}")
            }
            ConflationDefect::DeflationNotEpi { element } => {
                write!(f, "{element:?} is not in the image of g")
            }
            ConflationDefect::KernelNotImage { element } => {
                write!(f, "{element:?} lies in ker g but not in im f")
            }
        }
    }
}

/// A validated pair `X --f--> Y --g--> Z` with `f = ker g` and `g = coker f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConflationRepr", into = "ConflationRepr")]
pub struct Conflation {
    inflation: Morphism,
    deflation: Morphism,
}

#[derive(Serialize, Deserialize)]
struct ConflationRepr {
    f: Morphism,
    g: Morphism,
}

impl TryFrom<ConflationRepr> for Conflation {
    type Error = Error;

    fn try_from(r: ConflationRepr) -> Result<Self> {
        make_conflation(r.f, r.g)
    }
}

impl From<Conflation> for ConflationRepr {
    fn from(c: Conflation) -> Self {
        ConflationRepr {
            f: c.inflation,
            g: c.deflation,
        }
    }
}

/// Checks both universal properties and returns the validated pair.
///
/// With `g∘f = 0`, `f` mono and `g` epi, the comparison maps
/// `dom f → ker g` and `coker f → cod g` are injective and surjective
/// respectively; they are isomorphisms exactly when every generator of
/// `ker g` lies in `im f`.
pub fn make_conflation(f: Morphism, g: Morphism) -> Result<Conflation> {
    check_conflation(&f, &g).map_err(Error::NotAConflation)?;
    Ok(Conflation {
        inflation: f,
        deflation: g,
    })
}

pub fn check_conflation(f: &Morphism, g: &Morphism) -> std::result::Result<(), ConflationDefect> {
    if f.codomain() != g.domain() {
        return Err(ConflationDefect::Shape(format!(
            "cod(f) = {} but dom(g) = {}",
            f.codomain(),
            g.domain()
        )));
    }
    for (i, col) in f.columns().iter().enumerate() {
        if !g.codomain().is_zero_element(&g.apply(col)) {
            return Err(ConflationDefect::CompositeNonzero { generator: i });
        }
    }
    if !f.is_mono() {
        let (_, inc) = kernel(f);
        return Err(ConflationDefect::InflationNotMono { element: inc.column(0) });
    }
    if !g.is_epi() {
        let solver = g.solver();
        let element = (0..g.codomain().rank())
            .map(|j| g.codomain().basis_element(j))
            .find(|e| solver.solve(e).is_none())
            .expect("a non-surjective map misses a generator");
        return Err(ConflationDefect::DeflationNotEpi { element });
    }
    // Orders: |ker g| = |Y| / |Z|; im f ⊆ ker g with |im f| = |X|.
    if f.domain().order() * g.codomain().order() != g.domain().order() {
        let (_, inc) = kernel(g);
        let solver = f.solver();
        let element = inc
            .columns()
            .into_iter()
            .find(|y| solver.solve(y).is_none())
            .expect("ker g is strictly larger than im f");
        return Err(ConflationDefect::KernelNotImage { element });
    }
    Ok(())
}

impl Conflation {
    pub(crate) fn new_unchecked(f: Morphism, g: Morphism) -> Self {
        debug_assert!(check_conflation(&f, &g).is_ok());
        Conflation {
            inflation: f,
            deflation: g,
        }
    }

    /// `X → X ⊕ Z → Z`.
    pub fn split(x: &FiniteModule, z: &FiniteModule) -> Result<Self> {
        let b = direct_sum(x, z)?;
        let [i1, _] = b.injections;
        let [_, p2] = b.projections;
        make_conflation(i1, p2)
    }

    pub fn inflation(&self) -> &Morphism {
        &self.inflation
    }

    pub fn deflation(&self) -> &Morphism {
        &self.deflation
    }

    pub fn left(&self) -> &FiniteModule {
        self.inflation.domain()
    }

    pub fn middle(&self) -> &FiniteModule {
        self.inflation.codomain()
    }

    pub fn right(&self) -> &FiniteModule {
        self.deflation.codomain()
    }

    pub fn ring(&self) -> RingSpec {
        self.inflation.ring()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("conflations serialize")
    }
}

/// A section of the deflation and a retraction of the inflation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitWitness {
    pub section: Morphism,
    pub retraction: Morphism,
}

impl SplitWitness {
    /// Rechecks `g∘s = 1` and `r∘f = 1`.
    pub fn verifies(&self, c: &Conflation) -> bool {
        c.deflation().compose(&self.section).is_ok_and(|m| m.is_identity())
            && self.retraction.compose(c.inflation()).is_ok_and(|m| m.is_identity())
    }
}

/// Lexicographically smallest section and retraction, or `None` when the
/// conflation does not split.
pub fn splits(c: &Conflation) -> Option<SplitWitness> {
    let section = section_of(c.deflation());
    let retraction = retraction_of(c.inflation());
    match (section, retraction) {
        (Some(section), Some(retraction)) => Some(SplitWitness { section, retraction }),
        (None, None) => None,
        (s, r) => panic!(
            "section/retraction disagree on {:?}: section {}, retraction {}",
            c,
            s.is_some(),
            r.is_some()
        ),
    }
}

/// Sign used in the fiber condition of [`pullback_with`]; only
/// [`FiberSign::Correct`] produces a pullback. The other variant exists so
/// that the axiom checks can be shown to detect a broken construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberSign {
    #[default]
    Correct,
    Flipped,
}

#[derive(Clone, Debug)]
pub struct Pullback {
    pub object: FiniteModule,
    /// `Q → dom(g)`.
    pub to_deflation_source: Morphism,
    /// `Q → dom(h)`; a deflation when `g` is.
    pub to_other: Morphism,
}

/// Fiber product `{(y, w) : g(y) = h(w)}` of a deflation `g` and any `h`.
pub fn pullback(g: &Morphism, h: &Morphism) -> Result<Pullback> {
    pullback_with(g, h, FiberSign::Correct)
}

pub fn pullback_with(g: &Morphism, h: &Morphism, sign: FiberSign) -> Result<Pullback> {
    if g.codomain() != h.codomain() {
        return Err(Error::NotComposable(format!(
            "pullback of {} -> {} and {} -> {}",
            g.domain(),
            g.codomain(),
            h.domain(),
            h.codomain()
        )));
    }
    if !g.is_epi() {
        return Err(Error::NotADeflation);
    }
    let b = direct_sum(g.domain(), h.domain())?;
    let [p1, p2] = &b.projections;
    let left = g.compose_unchecked(p1);
    let right = h.compose_unchecked(p2);
    let difference = match sign {
        FiberSign::Correct => left.sub(&right)?,
        FiberSign::Flipped => left.add(&right)?,
    };
    let (object, inc) = kernel(&difference);
    Ok(Pullback {
        to_deflation_source: p1.compose_unchecked(&inc),
        to_other: p2.compose_unchecked(&inc),
        object,
    })
}

#[derive(Clone, Debug)]
pub struct Pushout {
    pub object: FiniteModule,
    /// `cod(f) → Q`.
    pub from_inflation_target: Morphism,
    /// `cod(h) → Q`; an inflation when `f` is.
    pub from_other: Morphism,
}

/// `(cod f ⊕ cod h) / {(f(x), -h(x))}` for an inflation `f` and any `h`.
pub fn pushout(f: &Morphism, h: &Morphism) -> Result<Pushout> {
    if f.domain() != h.domain() {
        return Err(Error::NotComposable(format!(
            "pushout of {} -> {} and {} -> {}",
            f.domain(),
            f.codomain(),
            h.domain(),
            h.codomain()
        )));
    }
    if !f.is_mono() {
        return Err(Error::NotAnInflation);
    }
    let b = direct_sum(f.codomain(), h.codomain())?;
    let [i1, i2] = &b.injections;
    let pair = i1.compose_unchecked(f).sub(&i2.compose_unchecked(h))?;
    let (object, q) = cokernel(&pair);
    Ok(Pushout {
        from_inflation_target: q.compose_unchecked(i1),
        from_other: q.compose_unchecked(i2),
        object,
    })
}

/// Bounds and switches for [`axiom_suite`].
#[derive(Clone, Debug)]
pub struct AxiomBounds {
    pub max_order: u128,
    pub fiber_sign: FiberSign,
}

impl AxiomBounds {
    pub fn new(max_order: u128) -> Self {
        AxiomBounds {
            max_order,
            fiber_sign: FiberSign::Correct,
        }
    }
}

fn morphism_json(name: &str, m: &Morphism) -> (String, serde_json::Value) {
    (name.to_string(), serde_json::to_value(m).expect("morphisms serialize"))
}

fn counterexample(leg: &str, detail: String, data: Vec<(String, serde_json::Value)>) -> Counterexample {
    Counterexample {
        check: "axioms".into(),
        leg: leg.into(),
        detail,
        data: serde_json::Value::Object(data.into_iter().collect()),
    }
}

/// The kernel row `ker d → dom d → cod d` of an epimorphism.
fn kernel_conflation(d: &Morphism) -> std::result::Result<(), ConflationDefect> {
    let (_, inc) = kernel(d);
    check_conflation(&inc, d)
}

/// The cokernel row `dom i → cod i → coker i` of a monomorphism.
fn cokernel_conflation(i: &Morphism) -> std::result::Result<(), ConflationDefect> {
    let (_, q) = cokernel(i);
    check_conflation(i, &q)
}

/// Checks, on every enumerated module of order at most `max_order`:
/// identities are inflations and deflations; composites of deflations
/// (inflations) are deflations (inflations); pullbacks of deflations and
/// pushouts of inflations along arbitrary morphisms are again deflations and
/// inflations, with the universal property checked through the unit object.
pub fn axiom_suite(ring: RingSpec, bounds: &AxiomBounds) -> SuiteResult {
    let mut out = SuiteResult::new("axioms");
    let modules = if bounds.max_order == 0 {
        vec![FiniteModule::zero(ring)]
    } else {
        enumerate_modules(ring, bounds.max_order)
    };

    for m in &modules {
        let id = Morphism::identity(m);
        let zero = FiniteModule::zero(ring);
        let r = check_conflation(&id, &Morphism::zero(m, &zero));
        out.record("identity_inflation", r.is_ok(), || {
            counterexample("i", format!("{r:?}"), vec![morphism_json("identity", &id)])
        });
        let r = check_conflation(&Morphism::zero(&zero, m), &id);
        out.record("identity_deflation", r.is_ok(), || {
            counterexample("ii", format!("{r:?}"), vec![morphism_json("identity", &id)])
        });
    }

    // Epimorphisms and monomorphisms between enumerated modules, per pair.
    let pairs: Vec<(usize, usize)> = (0..modules.len())
        .flat_map(|a| (0..modules.len()).map(move |b| (a, b)))
        .collect();
    let mut epis = vec![vec![Vec::new(); modules.len()]; modules.len()];
    let mut monos = vec![vec![Vec::new(); modules.len()]; modules.len()];
    for &(a, b) in &pairs {
        let (x, y) = (&modules[a], &modules[b]);
        if x.order() >= y.order() {
            epis[a][b] = MorphismIter::new(x, y).filter(|f| f.is_epi()).collect();
        }
        if x.order() <= y.order() {
            monos[a][b] = MorphismIter::new(x, y).filter(|f| f.is_mono()).collect();
        }
    }

    for a in 0..modules.len() {
        for b in 0..modules.len() {
            for c in 0..modules.len() {
                for d1 in &epis[a][b] {
                    for d2 in &epis[b][c] {
                        let comp = d2.compose_unchecked(d1);
                        let ok = comp.is_epi() && kernel_conflation(&comp).is_ok();
                        out.record("deflation_composition", ok, || {
                            counterexample(
                                "iii",
                                "composite of deflations is not a deflation".into(),
                                vec![morphism_json("first", d1), morphism_json("second", d2)],
                            )
                        });
                    }
                }
                for i1 in &monos[a][b] {
                    for i2 in &monos[b][c] {
                        let comp = i2.compose_unchecked(i1);
                        let ok = comp.is_mono() && cokernel_conflation(&comp).is_ok();
                        out.record("inflation_composition", ok, || {
                            counterexample(
                                "iii",
                                "composite of inflations is not an inflation".into(),
                                vec![morphism_json("first", i1), morphism_json("second", i2)],
                            )
                        });
                    }
                }
            }
        }
    }

    for yi in 0..modules.len() {
        for (zi, z) in modules.iter().enumerate() {
            for g in &epis[yi][zi] {
                for w in &modules {
                    for h in MorphismIter::new(w, z) {
                        let (ok, detail) = check_pullback(g, &h, bounds.fiber_sign);
                        out.record("pullback_of_deflation", ok, || {
                            counterexample("iv", detail, vec![morphism_json("g", g), morphism_json("h", &h)])
                        });
                    }
                }
            }
            for f in &monos[zi][yi] {
                for w in &modules {
                    for h in MorphismIter::new(z, w) {
                        let (ok, detail) = check_pushout(f, &h);
                        out.record("pushout_of_inflation", ok, || {
                            counterexample("iv", detail, vec![morphism_json("f", f), morphism_json("h", &h)])
                        });
                    }
                }
            }
        }
    }
    out
}

/// Pullback checks: the square commutes, the leg opposite `g` is a deflation
/// whose kernel row is a conflation, `|Q|·|Z| = |Y|·|W|`, and mediating maps
/// out of the unit object exist and are unique.
pub fn check_pullback(g: &Morphism, h: &Morphism, sign: FiberSign) -> (bool, String) {
    let pb = match pullback_with(g, h, sign) {
        Ok(pb) => pb,
        Err(e) => return (false, e.to_string()),
    };
    let lhs = g.compose_unchecked(&pb.to_deflation_source);
    let rhs = h.compose_unchecked(&pb.to_other);
    if lhs != rhs {
        return (false, "pullback square does not commute".into());
    }
    if !pb.to_other.is_epi() {
        return (false, "pulled back leg is not an epimorphism".into());
    }
    if let Err(d) = kernel_conflation(&pb.to_other) {
        return (false, format!("pulled back leg is not a deflation: {d}"));
    }
    if pb.object.order() * g.codomain().order() != g.domain().order() * h.domain().order() {
        return (false, "fiber product has the wrong order".into());
    }
    if !mediating_maps_unique(&pb.object, &pb.to_deflation_source, &pb.to_other) {
        return (false, "mediating morphism is not unique".into());
    }
    (true, String::new())
}

/// The pair `(a, b)` out of `Q` is jointly injective: the only map
/// `u : R → Q` with `a∘u = 0` and `b∘u = 0` is zero.
fn mediating_maps_unique(q: &FiniteModule, a: &Morphism, b: &Morphism) -> bool {
    let unit = q.ring().unit();
    let eq = MorphismEquation::new(
        vec![(unit.clone(), q.clone())],
        &[
            (unit.clone(), a.codomain().clone()),
            (unit.clone(), b.codomain().clone()),
        ],
        |u| vec![a.compose_unchecked(&u[0]), b.compose_unchecked(&u[0])],
    );
    eq.solve_homogeneous_count() == 1
}

pub fn check_pushout(f: &Morphism, h: &Morphism) -> (bool, String) {
    let po = match pushout(f, h) {
        Ok(po) => po,
        Err(e) => return (false, e.to_string()),
    };
    let lhs = po.from_inflation_target.compose_unchecked(f);
    let rhs = po.from_other.compose_unchecked(h);
    if lhs != rhs {
        return (false, "pushout square does not commute".into());
    }
    if !po.from_other.is_mono() {
        return (false, "pushed out leg is not a monomorphism".into());
    }
    if let Err(d) = cokernel_conflation(&po.from_other) {
        return (false, format!("pushed out leg is not an inflation: {d}"));
    }
    if po.object.order() * f.domain().order() != f.codomain().order() * h.codomain().order() {
        return (false, "pushout has the wrong order".into());
    }
    // Joint surjectivity of the two legs (uniqueness of comediating maps).
    let b = direct_sum(f.codomain(), h.codomain()).expect("same ring");
    let [p1, p2] = &b.projections;
    let joint = po
        .from_inflation_target
        .compose_unchecked(p1)
        .add(&po.from_other.compose_unchecked(p2))
        .expect("parallel");
    if !joint.is_epi() {
        return (false, "pushout legs are not jointly epimorphic".into());
    }
    (true, String::new())
}

/// Replays an axiom counterexample.
pub fn replay_axiom(c: &Counterexample, sign: FiberSign) -> Result<bool> {
    let get = |key: &str| -> Result<Morphism> {
        serde_json::from_value(c.data[key].clone()).map_err(|e| Error::Config(e.to_string()))
    };
    Ok(match (c.leg.as_str(), c.data.get("g"), c.data.get("f")) {
        ("iv", Some(_), _) => check_pullback(&get("g")?, &get("h")?, sign).0,
        ("iv", None, Some(_)) => check_pushout(&get("f")?, &get("h")?).0,
        _ => return Err(Error::Config(format!("cannot replay axiom leg {}", c.leg))),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn ring(n: u64) -> RingSpec {
        RingSpec::new(n).unwrap()
    }

    fn module(n: u64, f: &[u64]) -> FiniteModule {
        FiniteModule::new(ring(n), f.to_vec()).unwrap()
    }

    fn mor(dom: &FiniteModule, cod: &FiniteModule, m: Vec<Vec<u64>>) -> Morphism {
        Morphism::new(dom.clone(), cod.clone(), m).unwrap()
    }

    /// 0 → [2] → [4] → [2] → 0 over Z/4.
    pub(crate) fn nonsplit_z4() -> Conflation {
        let (m2, m4) = (module(4, &[2]), module(4, &[4]));
        make_conflation(mor(&m2, &m4, vec![vec![2]]), mor(&m4, &m2, vec![vec![1]])).unwrap()
    }

    #[test]
    fn make_conflation_examples() {
        nonsplit_z4();
        let c = Conflation::split(&module(4, &[2]), &module(4, &[4])).unwrap();
        assert_eq!(c.middle().factors(), &[2, 4]);
        let (m2, m4) = (module(4, &[2]), module(4, &[4]));
        let err = make_conflation(Morphism::zero(&m2, &m4), mor(&m4, &m2, vec![vec![1]])).unwrap_err();
        assert!(matches!(
            err,
            Error::NotAConflation(ConflationDefect::InflationNotMono { .. })
        ));
        let err = make_conflation(mor(&m2, &m4, vec![vec![2]]), Morphism::zero(&m4, &m2)).unwrap_err();
        assert!(matches!(
            err,
            Error::NotAConflation(ConflationDefect::DeflationNotEpi { .. })
        ));
    }

    #[test]
    fn pullback_examples() {
        let (m2, m4) = (module(4, &[2]), module(4, &[4]));
        let g = mor(&m4, &m2, vec![vec![1]]);
        let pb = pullback(&g, &Morphism::identity(&m2)).unwrap();
        assert_eq!(pb.object.factors(), &[4]);
        let pb = pullback(&g, &Morphism::zero(&m2, &m2)).unwrap();
        assert_eq!(pb.object.factors(), &[2, 2]);
        let pb = pullback(&g, &Morphism::identity(&m2)).unwrap();
        assert!(pb.to_deflation_source.is_iso());
        assert!(check_pullback(&g, &Morphism::identity(&m2), FiberSign::Correct).0);
        assert!(pullback(&Morphism::zero(&m4, &m2), &Morphism::identity(&m2)).is_err());
    }

    #[test]
    fn flipped_fiber_sign_is_detected() {
        let m4 = module(4, &[4]);
        let g = Morphism::identity(&m4);
        let h = Morphism::identity(&m4);
        assert!(!check_pullback(&g, &h, FiberSign::Flipped).0);
    }

    #[test]
    fn pushout_examples() {
        let (m2, m4) = (module(4, &[2]), module(4, &[4]));
        let f = mor(&m2, &m4, vec![vec![2]]);
        assert_eq!(pushout(&f, &Morphism::identity(&m2)).unwrap().object.factors(), &[4]);
        // Along the zero map to 0 the pushout is coker f; along the zero
        // endomorphism of [2] it is coker f ⊕ [2].
        let zero = FiniteModule::zero(ring(4));
        assert_eq!(pushout(&f, &Morphism::zero(&m2, &zero)).unwrap().object.factors(), &[2]);
        assert_eq!(
            pushout(&f, &Morphism::zero(&m2, &m2)).unwrap().object.factors(),
            &[2, 2]
        );
        assert!(check_pushout(&f, &Morphism::identity(&m2)).0);
    }

    #[test]
    fn splits_examples() {
        assert!(splits(&nonsplit_z4()).is_none());
        let c = Conflation::split(&module(4, &[2]), &module(4, &[2])).unwrap();
        let w = splits(&c).unwrap();
        assert!(w.verifies(&c));
        let c = Conflation::split(&module(12, &[2, 6]), &module(12, &[3])).unwrap();
        assert!(splits(&c).unwrap().verifies(&c));
    }

    #[test]
    fn small_axiom_suite() {
        let r = axiom_suite(ring(4), &AxiomBounds::new(4));
        assert!(r.passed(), "{:?}", r.counterexamples);
        let r = axiom_suite(ring(4), &AxiomBounds::new(0));
        assert!(r.passed());
        assert_eq!(r.checked, 2 + 2 + 1 + 1);
        let mut b = AxiomBounds::new(4);
        b.fiber_sign = FiberSign::Flipped;
        let r = axiom_suite(ring(4), &b);
        assert!(!r.passed());
        let c = &r.counterexamples[0];
        assert_eq!(c.leg, "iv");
        assert!(!replay_axiom(c, FiberSign::Flipped).unwrap());
        assert!(replay_axiom(c, FiberSign::Correct).unwrap());
    }
}
