//! Bounded cochain complexes, chain maps and conflations of complexes with
//! the degreewise exact structure.
//!
//! A [`Complex`] stores its components on a contiguous degree range
//! `lo..=hi`; everything outside that range is zero, and acyclicity is
//! checked at the boundary of the range as well.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_cyclic, enumerate_morphisms, extension_classes};
use crate::error::{Error, Result};
use crate::exact::{check_conflation, Conflation};
use crate::module::{direct_sum, kernel, tensor_mor_with, FiniteModule, Morphism, RingSpec, TensorProduct};
use crate::purity::{double_dual_unit, dual, dual_mor, is_flat, is_injective};
use crate::report::{Counterexample, SuiteResult};
use crate::system::{MorphismEquation, Shape};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct Complex {
    ring: RingSpec,
    lo: i64,
    components: Vec<FiniteModule>,
    /// `differentials[k] : components[k] → components[k + 1]`.
    differentials: Vec<Morphism>,
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    n: u64,
    degrees: Vec<i64>,
    components: Vec<FiniteModule>,
    differentials: Vec<Morphism>,
}

impl TryFrom<ComplexRepr> for Complex {
    type Error = Error;

    fn try_from(r: ComplexRepr) -> Result<Self> {
        let ring = RingSpec::new(r.n)?;
        let lo = r.degrees.first().copied().unwrap_or(0);
        let contiguous = r.degrees.iter().enumerate().all(|(k, &d)| d == lo + k as i64);
        if !contiguous || r.degrees.len() != r.components.len() {
            return Err(Error::InvalidComplex(
                "degrees must be consecutive, one per component".into(),
            ));
        }
        Complex::new(ring, lo, r.components, r.differentials)
    }
}

impl From<Complex> for ComplexRepr {
    fn from(c: Complex) -> Self {
        ComplexRepr {
            n: c.ring.modulus(),
            degrees: c.degrees().collect(),
            components: c.components,
            differentials: c.differentials,
        }
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        write!(f, "deg {}: ", self.lo)?;
        for (k, m) in self.components.iter().enumerate() {
            if k > 0 {
                write!(f, " -{:?}-> ", self.differentials[k - 1].matrix())?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl Complex {
    pub fn new(ring: RingSpec, lo: i64, components: Vec<FiniteModule>, differentials: Vec<Morphism>) -> Result<Self> {
        if differentials.len() + 1 != components.len().max(1) {
            return Err(Error::InvalidComplex(format!(
                "{} components need {} differentials, got {}",
                components.len(),
                components.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for m in &components {
            ring.check_same(&m.ring())?;
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.domain() != &components[k] || d.codomain() != &components[k + 1] {
                return Err(Error::InvalidComplex(format!(
                    "differential in degree {} has the wrong shape",
                    lo + k as i64
                )));
            }
        }
        for k in 1..differentials.len() {
            if !differentials[k].compose_unchecked(&differentials[k - 1]).is_zero() {
                return Err(Error::DifferentialSquare {
                    degree: lo + k as i64 - 1,
                });
            }
        }
        Ok(Complex {
            ring,
            lo,
            components,
            differentials,
        })
    }

    pub fn zero(ring: RingSpec) -> Self {
        Complex {
            ring,
            lo: 0,
            components: Vec::new(),
            differentials: Vec::new(),
        }
    }

    /// `M` in a single degree.
    pub fn concentrated(m: &FiniteModule, degree: i64) -> Self {
        Complex {
            ring: m.ring(),
            lo: degree,
            components: vec![m.clone()],
            differentials: Vec::new(),
        }
    }

    /// `M =id= M` in degrees `degree`, `degree + 1`.
    pub fn disk(m: &FiniteModule, degree: i64) -> Self {
        Complex {
            ring: m.ring(),
            lo: degree,
            components: vec![m.clone(), m.clone()],
            differentials: vec![Morphism::identity(m)],
        }
    }

    /// Two-term complex `d : A → B` in degrees `degree`, `degree + 1`.
    pub fn two_term(d: &Morphism, degree: i64) -> Self {
        Complex {
            ring: d.ring(),
            lo: degree,
            components: vec![d.domain().clone(), d.codomain().clone()],
            differentials: vec![d.clone()],
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last stored degree; `lo - 1` for the empty complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.components.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn span(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, d: i64) -> FiniteModule {
        self.index(d)
            .map(|k| self.components[k].clone())
            .unwrap_or_else(|| FiniteModule::zero(self.ring))
    }

    /// `∂^d : X^d → X^{d+1}`.
    pub fn differential(&self, d: i64) -> Morphism {
        match self.index(d) {
            Some(k) if k < self.differentials.len() => self.differentials[k].clone(),
            _ => Morphism::zero(&self.component(d), &self.component(d + 1)),
        }
    }

    fn index(&self, d: i64) -> Option<usize> {
        (self.degrees().contains(&d)).then(|| (d - self.lo) as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(FiniteModule::is_zero)
    }

    /// Product of the component orders.
    pub fn total_order(&self) -> u128 {
        self.components.iter().map(FiniteModule::order).product()
    }

    /// Builds a complex on `lo..=hi` from per-degree components and
    /// differentials, validating it.
    pub fn from_fn(
        ring: RingSpec,
        lo: i64,
        hi: i64,
        component: impl Fn(i64) -> FiniteModule,
        differential: impl Fn(i64) -> Morphism,
    ) -> Result<Self> {
        let components: Vec<FiniteModule> = (lo..=hi).map(component).collect();
        let differentials: Vec<Morphism> = (lo..hi).map(differential).collect();
        Complex::new(ring, lo, components, differentials)
    }
}

/// `X[k]`: `X[k]ᵈ = X^{d+k}` with differential `(−1)ᵏ ∂`.
pub fn shift(x: &Complex, k: i64) -> Complex {
    Complex {
        ring: x.ring,
        lo: x.lo - k,
        components: x.components.clone(),
        differentials: x.differentials.iter().map(|d| sign(d, k % 2 != 0)).collect(),
    }
}

/// Smallest range containing both supports.
fn union_range(a: &Complex, b: &Complex) -> (i64, i64) {
    match (a.components.is_empty(), b.components.is_empty()) {
        (true, true) => (0, -1),
        (true, false) => (b.lo, b.hi()),
        (false, true) => (a.lo, a.hi()),
        (false, false) => (a.lo.min(b.lo), a.hi().max(b.hi())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    lo: i64,
    maps: Vec<Morphism>,
}

impl ChainMap {
    /// `component(d)` is called for every degree in the union of the
    /// supports; the result must commute with the differentials.
    pub fn from_fn(source: &Complex, target: &Complex, component: impl Fn(i64) -> Morphism) -> Result<Self> {
        let (lo, hi) = union_range(source, target);
        let maps: Vec<Morphism> = (lo..=hi).map(component).collect();
        let f = ChainMap {
            source: source.clone(),
            target: target.clone(),
            lo,
            maps,
        };
        for d in lo..=hi {
            let m = f.component(d);
            if m.domain() != &source.component(d) || m.codomain() != &target.component(d) {
                return Err(Error::NotComposable(format!(
                    "chain map component in degree {d} has the wrong shape"
                )));
            }
        }
        for d in lo - 1..=hi {
            let lhs = target.differential(d).compose_unchecked(&f.component(d));
            let rhs = f.component(d + 1).compose_unchecked(&source.differential(d));
            if lhs != rhs {
                return Err(Error::NotAChainMap { degree: d });
            }
        }
        Ok(f)
    }

    pub fn identity(x: &Complex) -> Self {
        ChainMap {
            source: x.clone(),
            target: x.clone(),
            lo: x.lo,
            maps: x.components.iter().map(Morphism::identity).collect(),
        }
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        ChainMap::from_fn(source, target, |d| {
            Morphism::zero(&source.component(d), &target.component(d))
        })
        .expect("zero is a chain map")
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn component(&self, d: i64) -> Morphism {
        let k = d - self.lo;
        if k >= 0 && (k as usize) < self.maps.len() {
            self.maps[k as usize].clone()
        } else {
            Morphism::zero(&self.source.component(d), &self.target.component(d))
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::NotComposable("chain map codomain differs from domain".into()));
        }
        ChainMap::from_fn(&first.source, &self.target, |d| {
            self.component(d).compose_unchecked(&first.component(d))
        })
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.source.degrees().all(|d| self.component(d).is_identity())
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(Morphism::is_zero)
    }
}

/// `X → Y → Z` with `(fᵈ, gᵈ)` a conflation in every degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexConflation {
    f: ChainMap,
    g: ChainMap,
}

impl ComplexConflation {
    pub fn new(f: ChainMap, g: ChainMap) -> Result<Self> {
        if f.target != g.source {
            return Err(Error::NotComposable(
                "inflation codomain differs from deflation domain".into(),
            ));
        }
        let c = ComplexConflation { f, g };
        let (lo, hi) = c.range();
        for d in lo..=hi {
            check_conflation(&c.f.component(d), &c.g.component(d)).map_err(Error::NotAConflation)?;
        }
        Ok(c)
    }

    pub fn inflation(&self) -> &ChainMap {
        &self.f
    }

    pub fn deflation(&self) -> &ChainMap {
        &self.g
    }

    pub fn left(&self) -> &Complex {
        &self.f.source
    }

    pub fn middle(&self) -> &Complex {
        &self.f.target
    }

    pub fn right(&self) -> &Complex {
        &self.g.target
    }

    /// Union of the three supports.
    pub fn range(&self) -> (i64, i64) {
        let (a, b) = union_range(self.left(), self.middle());
        let (c, d) = union_range(self.middle(), self.right());
        if a > b {
            (c, d)
        } else if c > d {
            (a, b)
        } else {
            (a.min(c), b.max(d))
        }
    }

    /// The module conflation in degree `d`.
    pub fn degree(&self, d: i64) -> Conflation {
        crate::exact::make_conflation(self.f.component(d), self.g.component(d)).expect("validated degreewise")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("complex conflations serialize")
    }
}

/// Every cohomology group vanishes, including at the ends of the support.
pub fn is_acyclic(x: &Complex) -> bool {
    x.degrees()
        .all(|d| x.component(d).order() == x.differential(d).image_order() * x.differential(d - 1).image_order())
}

/// `X ⊗ T`, degreewise.
pub fn tensor_complex(x: &Complex, t: &FiniteModule) -> Complex {
    let products: Vec<TensorProduct> = x
        .components
        .iter()
        .map(|m| TensorProduct::new(m, t).expect("same ring"))
        .collect();
    let id = Morphism::identity(t);
    let differentials = x
        .differentials
        .iter()
        .enumerate()
        .map(|(k, d)| tensor_mor_with(&products[k], &products[k + 1], d, &id))
        .collect();
    Complex::new(
        x.ring,
        x.lo,
        products.iter().map(|p| p.module().clone()).collect(),
        differentials,
    )
    .expect("tensoring preserves ∂∂ = 0")
}

/// `X ⊗ [d]` is acyclic for every divisor `d > 1` of `n`.
pub fn is_pure_acyclic(x: &Complex) -> bool {
    x.ring.proper_divisors().into_iter().all(|d| {
        let t = FiniteModule::cyclic(x.ring, d).expect("divisor");
        is_acyclic(&tensor_complex(x, &t))
    })
}

/// `Ker ∂ᵈ` for every degree of the support.
pub fn kernels(x: &Complex) -> Vec<(i64, FiniteModule)> {
    x.degrees().map(|d| (d, kernel(&x.differential(d)).0)).collect()
}

/// Acyclic with every `Ker ∂ᵈ` flat.
pub fn is_flat_complex(x: &Complex) -> bool {
    is_acyclic(x) && kernels(x).iter().all(|(_, k)| is_flat(k))
}

fn sign(m: &Morphism, negate: bool) -> Morphism {
    if negate {
        m.neg()
    } else {
        m.clone()
    }
}

/// `(X⁺)ᵐ = (X⁻ᵐ)⁺` with differential `(−1)^{m+1} (∂^{−m−1})⁺`.
pub fn dual_complex(x: &Complex) -> Complex {
    if x.components.is_empty() {
        return Complex::zero(x.ring);
    }
    let (lo, hi) = (-x.hi(), -x.lo);
    Complex::from_fn(
        x.ring,
        lo,
        hi,
        |m| dual(&x.component(-m)),
        |m| sign(&dual_mor(&x.differential(-m - 1)), (m + 1) % 2 != 0),
    )
    .expect("the dual of a complex is a complex")
}

/// `f⁺ : Y⁺ → X⁺` for `f : X → Y`.
pub fn dual_chain_map(f: &ChainMap) -> ChainMap {
    let (s, t) = (dual_complex(&f.target), dual_complex(&f.source));
    ChainMap::from_fn(&s, &t, |m| dual_mor(&f.component(-m))).expect("dual of a chain map")
}

/// `Z⁺ → Y⁺ → X⁺`.
pub fn dual_complex_conflation(c: &ComplexConflation) -> Result<ComplexConflation> {
    ComplexConflation::new(dual_chain_map(&c.g), dual_chain_map(&c.f))
}

/// The isomorphism `X → X⁺⁺`, equal to `(−1)ᵈ λ` in degree `d` (the sign
/// compensates for the two dual differentials).
pub fn double_dual_unit_complex(x: &Complex) -> Result<ChainMap> {
    let dd = dual_complex(&dual_complex(x));
    ChainMap::from_fn(x, &dd, |d| sign(&double_dual_unit(&x.component(d)), d % 2 != 0))
}

/// A chain-level section of `g` and retraction of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSplitWitness {
    pub section: ChainMap,
    pub retraction: ChainMap,
}

/// Lexicographically smallest chain map `s` with `g ∘ s = 1`.
pub fn chain_section(g: &ChainMap) -> Option<ChainMap> {
    let (y, z) = (&g.source, &g.target);
    let (lo, hi) = union_range(y, z);
    let degrees: Vec<i64> = (lo..=hi).collect();
    let unknowns: Vec<Shape> = degrees.iter().map(|&d| (z.component(d), y.component(d))).collect();
    let mut targets: Vec<Shape> = degrees.iter().map(|&d| (z.component(d), z.component(d))).collect();
    targets.extend(degrees.iter().map(|&d| (z.component(d), y.component(d + 1))));
    let at = |s: &[Morphism], d: i64| -> Morphism {
        let k = d - lo;
        if (0..s.len() as i64).contains(&k) {
            s[k as usize].clone()
        } else {
            Morphism::zero(&z.component(d), &y.component(d))
        }
    };
    let eq = MorphismEquation::new(unknowns, &targets, |s| {
        let mut out: Vec<Morphism> = degrees
            .iter()
            .map(|&d| g.component(d).compose_unchecked(&at(s, d)))
            .collect();
        out.extend(degrees.iter().map(|&d| {
            let a = y.differential(d).compose_unchecked(&at(s, d));
            let b = at(s, d + 1).compose_unchecked(&z.differential(d));
            a.sub(&b).expect("same shape")
        }));
        out
    });
    let mut rhs: Vec<Morphism> = degrees.iter().map(|&d| Morphism::identity(&z.component(d))).collect();
    rhs.extend(
        degrees
            .iter()
            .map(|&d| Morphism::zero(&z.component(d), &y.component(d + 1))),
    );
    let s = eq.solve(&rhs)?;
    Some(ChainMap::from_fn(z, y, |d| at(&s, d)).expect("solution commutes with differentials"))
}

/// Lexicographically smallest chain map `r` with `r ∘ f = 1`.
pub fn chain_retraction(f: &ChainMap) -> Option<ChainMap> {
    let (x, y) = (&f.source, &f.target);
    let (lo, hi) = union_range(x, y);
    let degrees: Vec<i64> = (lo..=hi).collect();
    let unknowns: Vec<Shape> = degrees.iter().map(|&d| (y.component(d), x.component(d))).collect();
    let mut targets: Vec<Shape> = degrees.iter().map(|&d| (x.component(d), x.component(d))).collect();
    targets.extend(degrees.iter().map(|&d| (y.component(d), x.component(d + 1))));
    let at = |r: &[Morphism], d: i64| -> Morphism {
        let k = d - lo;
        if (0..r.len() as i64).contains(&k) {
            r[k as usize].clone()
        } else {
            Morphism::zero(&y.component(d), &x.component(d))
        }
    };
    let eq = MorphismEquation::new(unknowns, &targets, |r| {
        let mut out: Vec<Morphism> = degrees
            .iter()
            .map(|&d| at(r, d).compose_unchecked(&f.component(d)))
            .collect();
        out.extend(degrees.iter().map(|&d| {
            let a = x.differential(d).compose_unchecked(&at(r, d));
            let b = at(r, d + 1).compose_unchecked(&y.differential(d));
            a.sub(&b).expect("same shape")
        }));
        out
    });
    let mut rhs: Vec<Morphism> = degrees.iter().map(|&d| Morphism::identity(&x.component(d))).collect();
    rhs.extend(
        degrees
            .iter()
            .map(|&d| Morphism::zero(&y.component(d), &x.component(d + 1))),
    );
    let r = eq.solve(&rhs)?;
    Some(ChainMap::from_fn(y, x, |d| at(&r, d)).expect("solution commutes with differentials"))
}

/// Splitting in the category of complexes, or `None`.
pub fn splits_as_complexes(c: &ComplexConflation) -> Option<ComplexSplitWitness> {
    match (chain_section(&c.g), chain_retraction(&c.f)) {
        (Some(section), Some(retraction)) => Some(ComplexSplitWitness { section, retraction }),
        (None, None) => None,
        (s, r) => panic!(
            "chain section/retraction disagree: section {}, retraction {}",
            s.is_some(),
            r.is_some()
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexPurityVerdict {
    pub is_pure: bool,
    /// A splitting of the dual complex conflation when pure.
    pub witness: Option<ComplexSplitWitness>,
}

/// Pure iff the dual complex conflation splits as complexes.
pub fn is_pure_complex_conflation(c: &ComplexConflation) -> ComplexPurityVerdict {
    let dual = dual_complex_conflation(c).expect("the dual of a conflation is a conflation");
    let witness = splits_as_complexes(&dual);
    ComplexPurityVerdict {
        is_pure: witness.is_some(),
        witness,
    }
}

/// A contracting homotopy `hᵈ : Xᵈ → X^{d−1}` with `∂h + h∂ = 1`.
pub fn contraction(x: &Complex) -> Option<Vec<Morphism>> {
    let degrees: Vec<i64> = x.degrees().collect();
    let lo = x.lo;
    let unknowns: Vec<Shape> = degrees.iter().map(|&d| (x.component(d), x.component(d - 1))).collect();
    let targets: Vec<Shape> = degrees.iter().map(|&d| (x.component(d), x.component(d))).collect();
    let at = |h: &[Morphism], d: i64| -> Morphism {
        let k = d - lo;
        if (0..h.len() as i64).contains(&k) {
            h[k as usize].clone()
        } else {
            Morphism::zero(&x.component(d), &x.component(d - 1))
        }
    };
    let eq = MorphismEquation::new(unknowns, &targets, |h| {
        degrees
            .iter()
            .map(|&d| {
                let a = x.differential(d - 1).compose_unchecked(&at(h, d));
                let b = at(h, d + 1).compose_unchecked(&x.differential(d));
                a.add(&b).expect("same shape")
            })
            .collect()
    });
    let rhs: Vec<Morphism> = degrees.iter().map(|&d| Morphism::identity(&x.component(d))).collect();
    eq.solve(&rhs)
}

pub fn is_contractible(x: &Complex) -> bool {
    contraction(x).is_some()
}

/// Contractible with injective components.
pub fn is_injective_complex(x: &Complex) -> bool {
    x.components.iter().all(is_injective) && is_contractible(x)
}

/// `|Hom(X, I)|` in the category of complexes.
pub fn chain_hom_order(x: &Complex, i: &Complex) -> u128 {
    let (lo, hi) = union_range(x, i);
    let degrees: Vec<i64> = (lo..=hi).collect();
    let unknowns: Vec<Shape> = degrees.iter().map(|&d| (x.component(d), i.component(d))).collect();
    let targets: Vec<Shape> = degrees.iter().map(|&d| (x.component(d), i.component(d + 1))).collect();
    let at = |p: &[Morphism], d: i64| -> Morphism {
        let k = d - lo;
        if (0..p.len() as i64).contains(&k) {
            p[k as usize].clone()
        } else {
            Morphism::zero(&x.component(d), &i.component(d))
        }
    };
    MorphismEquation::new(unknowns, &targets, |p| {
        degrees
            .iter()
            .map(|&d| {
                let a = i.differential(d).compose_unchecked(&at(p, d));
                let b = at(p, d + 1).compose_unchecked(&x.differential(d));
                a.sub(&b).expect("same shape")
            })
            .collect()
    })
    .solve_homogeneous_count()
}

/// `Hom(−, I)` takes `c` to a short exact sequence of abelian groups. Left
/// exactness is automatic, so this compares orders.
pub fn hom_exact_into_complex(i: &Complex, c: &ComplexConflation) -> bool {
    chain_hom_order(c.middle(), i) == chain_hom_order(c.left(), i) * chain_hom_order(c.right(), i)
}

/// `X[−1] → P → X` with `Pᵈ = Xᵈ ⊕ X^{d−1}`, `∂(a, b) = (∂a, a − ∂b)`.
/// `P` is contractible, and the conflation splits iff `X` is contractible.
pub fn cone_conflation(x: &Complex) -> ComplexConflation {
    let ring = x.ring;
    if x.components.is_empty() {
        let z = Complex::zero(ring);
        return ComplexConflation::new(ChainMap::identity(&z), ChainMap::identity(&z)).expect("zero");
    }
    let (lo, hi) = (x.lo, x.hi() + 1);
    let sums: Vec<_> = (lo..=hi)
        .map(|d| direct_sum(&x.component(d), &x.component(d - 1)).expect("same ring"))
        .collect();
    let sum = |d: i64| &sums[(d - lo) as usize];
    let p = Complex::from_fn(
        ring,
        lo,
        hi,
        |d| sum(d).sum.clone(),
        |d| {
            let (s, t) = (sum(d), sum(d + 1));
            let first = t.injections[0]
                .compose_unchecked(&x.differential(d))
                .compose_unchecked(&s.projections[0]);
            let second = t.injections[1].compose_unchecked(
                &s.projections[0]
                    .sub(&x.differential(d - 1).compose_unchecked(&s.projections[1]))
                    .expect("same shape"),
            );
            first.add(&second).expect("same shape")
        },
    )
    .expect("cone is a complex");
    let k = Complex::from_fn(
        ring,
        lo + 1,
        hi,
        |d| x.component(d - 1),
        |d| x.differential(d - 1).neg(),
    )
    .expect("shift is a complex");
    let f = ChainMap::from_fn(&k, &p, |d| {
        if (lo..=hi).contains(&d) {
            sum(d).injections[1].clone()
        } else {
            Morphism::zero(&k.component(d), &p.component(d))
        }
    })
    .expect("inclusion is a chain map");
    let g = ChainMap::from_fn(&p, x, |d| {
        if (lo..=hi).contains(&d) {
            sum(d).projections[0].clone()
        } else {
            Morphism::zero(&p.component(d), &x.component(d))
        }
    })
    .expect("projection is a chain map");
    ComplexConflation::new(f, g).expect("cone sequence is degreewise split exact")
}

/// All complexes in degrees `0..span` whose components are cyclic of order
/// at most `max_component` (zero allowed in the interior, nonzero at both
/// ends), preceded by the zero complex.
pub fn enumerate_complexes(ring: RingSpec, max_component: u128, span: usize) -> Vec<Complex> {
    let cyclic = enumerate_cyclic(ring, max_component);
    let nonzero: Vec<&FiniteModule> = cyclic.iter().filter(|m| !m.is_zero()).collect();
    let mut out = vec![Complex::zero(ring)];
    for len in 1..=span {
        let mut choice = vec![0usize; len];
        loop {
            let comps: Vec<FiniteModule> = choice.iter().map(|&i| cyclic[i].clone()).collect();
            if !comps[0].is_zero() && !comps[len - 1].is_zero() {
                extend_differentials(ring, &comps, &mut Vec::new(), &mut out);
            }
            // odometer over component choices
            let mut idx = len;
            loop {
                if idx == 0 {
                    break;
                }
                idx -= 1;
                choice[idx] += 1;
                if choice[idx] < cyclic.len() {
                    break;
                }
                choice[idx] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    let _ = nonzero;
    out
}

fn extend_differentials(ring: RingSpec, comps: &[FiniteModule], chosen: &mut Vec<Morphism>, out: &mut Vec<Complex>) {
    let k = chosen.len();
    if k + 1 >= comps.len() {
        out.push(Complex::new(ring, 0, comps.to_vec(), chosen.clone()).expect("∂∂ = 0 by construction"));
        return;
    }
    for d in enumerate_morphisms(&comps[k], &comps[k + 1]) {
        if let Some(prev) = chosen.last() {
            if !d.compose_unchecked(prev).is_zero() {
                continue;
            }
        }
        chosen.push(d);
        extend_differentials(ring, comps, chosen, out);
        chosen.pop();
    }
}

/// Complex conflations `K → Y → F` whose degreewise conflations run over
/// the extension classes of `(Kᵈ, Fᵈ)` (at most `class_cap` per degree) and
/// whose middle differential runs over every compatible choice with
/// `∂∂ = 0`. Stops after `limit` conflations.
pub fn complex_extensions(
    k: &Complex,
    f: &Complex,
    class_cap: usize,
    seed: u64,
    limit: usize,
) -> Vec<ComplexConflation> {
    let mut out = Vec::new();
    let (lo, hi) = union_range(k, f);
    if lo > hi {
        return out;
    }
    let classes: Vec<Vec<Conflation>> = (lo..=hi)
        .map(|d| extension_classes(&k.component(d), &f.component(d), class_cap, seed))
        .collect();
    let mut state = ExtensionSearch {
        k,
        f,
        lo,
        classes: &classes,
        limit,
        out: &mut out,
    };
    state.descend(&mut Vec::new(), &mut Vec::new());
    out
}

struct ExtensionSearch<'a> {
    k: &'a Complex,
    f: &'a Complex,
    lo: i64,
    classes: &'a [Vec<Conflation>],
    limit: usize,
    out: &'a mut Vec<ComplexConflation>,
}

impl ExtensionSearch<'_> {
    fn descend(&mut self, levels: &mut Vec<Conflation>, diffs: &mut Vec<Morphism>) {
        if self.out.len() >= self.limit {
            return;
        }
        let i = levels.len();
        if i == self.classes.len() {
            self.emit(levels, diffs);
            return;
        }
        let d = self.lo + i as i64;
        for c in &self.classes[i] {
            let candidates = match levels.last() {
                None => vec![None],
                Some(prev) => middle_differentials(self.k, self.f, d - 1, prev, c)
                    .into_iter()
                    .filter(|m| diffs.last().is_none_or(|p| m.compose_unchecked(p).is_zero()))
                    .map(Some)
                    .collect(),
            };
            for m in candidates {
                levels.push(c.clone());
                if let Some(m) = &m {
                    diffs.push(m.clone());
                }
                self.descend(levels, diffs);
                if m.is_some() {
                    diffs.pop();
                }
                levels.pop();
                if self.out.len() >= self.limit {
                    return;
                }
            }
        }
    }

    fn emit(&mut self, levels: &[Conflation], diffs: &[Morphism]) {
        let lo = self.lo;
        let ring = self.k.ring();
        let y = Complex::new(
            ring,
            lo,
            levels.iter().map(|c| c.middle().clone()).collect(),
            diffs.to_vec(),
        )
        .expect("∂∂ = 0 checked during search");
        let at = |d: i64| &levels[(d - lo) as usize];
        let inside = |d: i64| (0..levels.len() as i64).contains(&(d - lo));
        let f = ChainMap::from_fn(self.k, &y, |d| {
            if inside(d) {
                at(d).inflation().clone()
            } else {
                Morphism::zero(&self.k.component(d), &y.component(d))
            }
        })
        .expect("compatible by construction");
        let g = ChainMap::from_fn(&y, self.f, |d| {
            if inside(d) {
                at(d).deflation().clone()
            } else {
                Morphism::zero(&y.component(d), &self.f.component(d))
            }
        })
        .expect("compatible by construction");
        self.out
            .push(ComplexConflation::new(f, g).expect("degreewise conflations"));
    }
}

/// All `D : Y^d → Y^{d+1}` with `D f = f ∂_K` and `g D = ∂_F g`.
fn middle_differentials(k: &Complex, f: &Complex, d: i64, below: &Conflation, above: &Conflation) -> Vec<Morphism> {
    let (y0, y1) = (below.middle().clone(), above.middle().clone());
    let targets = [(below.left().clone(), y1.clone()), (y0.clone(), above.right().clone())];
    let eq = MorphismEquation::new(vec![(y0, y1)], &targets, |m| {
        vec![
            m[0].compose_unchecked(below.inflation()),
            above.deflation().compose_unchecked(&m[0]),
        ]
    });
    let rhs = [
        above.inflation().compose_unchecked(&k.differential(d)),
        f.differential(d).compose_unchecked(below.deflation()),
    ];
    eq.all_solutions(&rhs).into_iter().map(|mut v| v.remove(0)).collect()
}

/// Test conflations for injectivity of `I`: disks on module conflations
/// between cyclic modules in every degree of the support, and the cone
/// conflation `I → P → I[1]` starting at `I`.
pub fn injective_test_conflations(i: &Complex) -> Vec<ComplexConflation> {
    let ring = i.ring;
    let cyclic = enumerate_cyclic(ring, ring.modulus() as u128);
    let cone = cone_conflation(&shift(i, 1));
    debug_assert!(i.components.is_empty() || cone.left() == i);
    let mut out = vec![cone];
    for d in i.degrees() {
        for a in &cyclic {
            for b in &cyclic {
                for c in extension_classes(a, b, usize::MAX, 0) {
                    out.push(disk_conflation(&c, d));
                }
            }
        }
    }
    out
}

/// The disk functor in degree `d` applied to a module conflation.
pub fn disk_conflation(c: &Conflation, d: i64) -> ComplexConflation {
    let (x, y, z) = (
        Complex::disk(c.left(), d),
        Complex::disk(c.middle(), d),
        Complex::disk(c.right(), d),
    );
    let f = ChainMap::from_fn(&x, &y, |_| c.inflation().clone()).expect("disk of a morphism");
    let g = ChainMap::from_fn(&y, &z, |_| c.deflation().clone()).expect("disk of a morphism");
    ComplexConflation::new(f, g).expect("disk of a conflation")
}

/// The componentwise split conflation `X → Y → Z` with
/// `X = (0 → [p])`, `Y = ([p] =id= [p])`, `Z = ([p] → 0)` for the smallest
/// prime `p | n`: every degree splits but no chain section exists.
pub fn componentwise_split_witness(ring: RingSpec) -> ComplexConflation {
    let p = crate::linalg::divisors(ring.modulus())[1];
    let m = FiniteModule::cyclic(ring, p).expect("prime divisor");
    let x = Complex::concentrated(&m, 1);
    let y = Complex::disk(&m, 0);
    let z = Complex::concentrated(&m, 0);
    let f = ChainMap::from_fn(&x, &y, |d| {
        if d == 1 {
            Morphism::identity(&m)
        } else {
            Morphism::zero(&x.component(d), &y.component(d))
        }
    })
    .expect("inclusion");
    let g = ChainMap::from_fn(&y, &z, |d| {
        if d == 0 {
            Morphism::identity(&m)
        } else {
            Morphism::zero(&y.component(d), &z.component(d))
        }
    })
    .expect("projection");
    ComplexConflation::new(f, g).expect("degreewise split")
}

/// Kernels for the conflations ending in `F`: every cyclic module placed in
/// a single degree or as a disk, within one degree of the support.
fn kernel_family(f: &Complex) -> Vec<Complex> {
    let ring = f.ring;
    let cyclic: Vec<FiniteModule> = enumerate_cyclic(ring, ring.modulus() as u128)
        .into_iter()
        .filter(|m| !m.is_zero())
        .collect();
    let (lo, hi) = if f.components.is_empty() {
        (0, 0)
    } else {
        (f.lo - 1, f.hi() + 1)
    };
    let mut out = Vec::new();
    for d in lo..=hi {
        for m in &cyclic {
            out.push(Complex::concentrated(m, d));
            if d < hi {
                out.push(Complex::disk(m, d));
            }
        }
    }
    out
}

/// The cone conflation ending in `F` followed by extensions of `F` by the
/// kernel family, at most `limit` in total.
pub fn conflations_ending_in(f: &Complex, class_cap: usize, seed: u64, limit: usize) -> Vec<ComplexConflation> {
    let mut out = vec![cone_conflation(f)];
    for k in kernel_family(f) {
        if out.len() >= limit {
            break;
        }
        let room = limit - out.len();
        out.extend(complex_extensions(&k, f, class_cap, seed, room));
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexBounds {
    /// Largest component order.
    pub max_component: u128,
    pub span: usize,
    /// Extension classes per degree.
    pub class_cap: usize,
    /// Conflations ending in each complex.
    pub conflation_limit: usize,
    pub seed: u64,
}

fn ce(leg: &str, detail: String, data: serde_json::Value) -> Counterexample {
    Counterexample {
        check: "complexes".into(),
        leg: leg.into(),
        detail,
        data,
    }
}

/// The four verdicts on a complex `F`: flat complex; `F⁺` injective;
/// pure acyclic with flat kernels; every listed conflation ending in `F`
/// pure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatComplexVerdicts {
    pub flat: bool,
    pub dual_injective: bool,
    pub pure_acyclic_flat_kernels: bool,
    pub conflations_pure: bool,
}

impl FlatComplexVerdicts {
    pub fn agree(&self) -> bool {
        self.flat == self.dual_injective
            && self.dual_injective == self.pure_acyclic_flat_kernels
            && self.pure_acyclic_flat_kernels == self.conflations_pure
    }
}

pub fn flat_complex_verdicts(f: &Complex, family: &[ComplexConflation]) -> FlatComplexVerdicts {
    FlatComplexVerdicts {
        flat: is_flat_complex(f),
        dual_injective: is_injective_complex(&dual_complex(f)),
        pure_acyclic_flat_kernels: is_pure_acyclic(f) && kernels(f).iter().all(|(_, k)| is_flat(k)),
        conflations_pure: family.iter().all(|c| is_pure_complex_conflation(c).is_pure),
    }
}

/// The four-way flatness equivalence on one complex, together with the
/// injective-complex oracle, the double dual, and (on the first listed
/// conflations) the dual-splitting and degreewise-purity properties.
pub fn check_complex(f: &Complex, bounds: &ComplexBounds, out: &mut SuiteResult) {
    let cj = serde_json::to_value(f).expect("complexes serialize");
    let data = || serde_json::json!({ "complex": cj });
    let family = conflations_ending_in(f, bounds.class_cap, bounds.seed, bounds.conflation_limit);
    let v = flat_complex_verdicts(f, &family);
    out.record("four_way", v.agree(), || ce("four-way", format!("{v:?}"), data()));

    let dual = dual_complex(f);
    let oracle = injective_test_conflations(&dual)
        .iter()
        .all(|c| hom_exact_into_complex(&dual, c));
    out.record("injective_oracle", oracle == v.dual_injective, || {
        ce(
            "injective-oracle",
            format!("primary {}, oracle {oracle}", v.dual_injective),
            data(),
        )
    });

    let dd = double_dual_unit_complex(f);
    let iso = dd
        .as_ref()
        .is_ok_and(|m| m.source().degrees().all(|d| m.component(d).is_iso()));
    out.record("double_dual", iso, || {
        ce("double-dual", format!("{:?}", dd.err()), data())
    });

    for c in family.iter().skip(1).take(8) {
        let with = |leg: &str, detail: String| {
            ce(
                leg,
                detail,
                serde_json::json!({ "complex": cj, "conflation": c.to_json() }),
            )
        };
        let pure = is_pure_complex_conflation(c).is_pure;
        let (lo, hi) = c.range();
        let degreewise = (lo..=hi).all(|d| crate::purity::is_pure(&c.degree(d)).is_pure);
        out.record("pure_implies_degreewise", !pure || degreewise, || {
            with(
                "pure-implies-degreewise",
                "pure complex conflation with an impure degree".into(),
            )
        });
        let split = splits_as_complexes(c).is_some();
        let dual_split = dual_complex_conflation(c)
            .ok()
            .and_then(|d| splits_as_complexes(&d))
            .is_some();
        out.record("split_iff_dual_split", split == dual_split, || {
            with(
                "split-iff-dual-split",
                format!("split {split}, dual split {dual_split}"),
            )
        });
    }
}

/// The componentwise-split conflation is degreewise pure but not pure.
pub fn check_witness(ring: RingSpec, out: &mut SuiteResult) {
    let w = componentwise_split_witness(ring);
    let (lo, hi) = w.range();
    let degreewise = (lo..=hi).all(|d| crate::purity::is_pure(&w.degree(d)).is_pure);
    let pure = is_pure_complex_conflation(&w).is_pure;
    out.record("componentwise_split_witness", degreewise && !pure, || {
        ce(
            "witness",
            format!("degreewise pure {degreewise}, pure as complexes {pure}"),
            serde_json::json!({ "n": ring.modulus(), "witness": w.to_json() }),
        )
    });
}

/// [`check_complex`] on every enumerated complex, plus [`check_witness`].
pub fn verify_flat_complex_equiv(ring: RingSpec, bounds: &ComplexBounds) -> SuiteResult {
    let mut out = SuiteResult::new("complexes");
    for f in enumerate_complexes(ring, bounds.max_component, bounds.span) {
        check_complex(&f, bounds, &mut out);
    }
    check_witness(ring, &mut out);
    out
}
