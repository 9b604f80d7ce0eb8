//! Finite `Z/n`-modules in invariant-factor form and the morphisms between
//! them.
//!
//! A module is stored as its divisibility chain `d_1 | d_2 | ... | d_k`, each
//! `d_i > 1` dividing `n`, so two modules are isomorphic exactly when their
//! factor lists are equal. Elements are coordinate vectors with the `i`-th
//! entry reduced mod `d_i`.

use std::cell::OnceCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, gcd, howell_form, smith_form, span_order, LinearSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingSpec {
    modulus: u64,
}

impl RingSpec {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(RingSpec { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The free module of rank one, unit for the tensor product.
    pub fn unit(&self) -> FiniteModule {
        FiniteModule::from_chain(*self, vec![self.modulus])
    }

    /// `Z/n` is self-injective and cogenerates the finite modules.
    pub fn cogenerator(&self) -> FiniteModule {
        self.unit()
    }

    /// Divisors `d > 1` of `n`, the cyclic test family `[d]`.
    pub fn proper_divisors(&self) -> Vec<u64> {
        linalg::divisors(self.modulus).into_iter().filter(|&d| d > 1).collect()
    }

    pub fn check_same(&self, other: &RingSpec) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::RingMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ModuleRepr", into = "ModuleRepr")]
pub struct FiniteModule {
    ring: RingSpec,
    factors: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ModuleRepr {
    n: u64,
    factors: Vec<u64>,
}

impl TryFrom<ModuleRepr> for FiniteModule {
    type Error = Error;

    fn try_from(r: ModuleRepr) -> Result<Self> {
        FiniteModule::new(RingSpec::new(r.n)?, r.factors)
    }
}

impl From<FiniteModule> for ModuleRepr {
    fn from(m: FiniteModule) -> Self {
        ModuleRepr {
            n: m.ring.modulus,
            factors: m.factors,
        }
    }
}

impl fmt::Debug for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        write!(f, "[")?;
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

impl FiniteModule {
    pub fn new(ring: RingSpec, factors: Vec<u64>) -> Result<Self> {
        let n = ring.modulus;
        let bad = |reason| Error::InvalidFactors {
            modulus: n,
            factors: factors.clone(),
            reason,
        };
        if factors.iter().any(|&d| d <= 1) {
            return Err(bad("every factor must exceed 1"));
        }
        if factors.iter().any(|&d| !n.is_multiple_of(d)) {
            return Err(bad("every factor must divide the modulus"));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(bad("factors must form a divisibility chain"));
        }
        Ok(FiniteModule { ring, factors })
    }

    pub(crate) fn from_chain(ring: RingSpec, factors: Vec<u64>) -> Self {
        debug_assert!(FiniteModule::new(ring, factors.clone()).is_ok());
        FiniteModule { ring, factors }
    }

    pub fn zero(ring: RingSpec) -> Self {
        FiniteModule {
            ring,
            factors: Vec::new(),
        }
    }

    pub fn cyclic(ring: RingSpec, order: u64) -> Result<Self> {
        if order == 1 {
            return Ok(Self::zero(ring));
        }
        Self::new(ring, vec![order])
    }

    pub fn free(ring: RingSpec, rank: usize) -> Self {
        FiniteModule {
            ring,
            factors: vec![ring.modulus; rank],
        }
    }

    /// Canonical form of an arbitrary direct sum of cyclic modules `⊕ Z/c_i`.
    pub fn from_cyclic_orders(ring: RingSpec, orders: &[u64]) -> Result<Self> {
        let n = ring.modulus;
        if let Some(&c) = orders.iter().find(|&&c| c == 0 || !n.is_multiple_of(c)) {
            return Err(Error::InvalidFactors {
                modulus: n,
                factors: orders.to_vec(),
                reason: if c == 0 {
                    "zero order"
                } else {
                    "order does not divide the modulus"
                },
            });
        }
        Ok(canonicalize(&Presentation::diagonal(ring, orders)).module)
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.ring.modulus
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| d as u128).product()
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn zero_element(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn basis_element(&self, i: usize) -> Vec<u64> {
        let mut v = self.zero_element();
        v[i] = 1 % self.factors[i];
        v
    }

    pub fn reduce(&self, v: &[i128]) -> Vec<u64> {
        v.iter()
            .zip(&self.factors)
            .map(|(&x, &d)| linalg::mod_reduce(x, d))
            .collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((a, b), d)| (a + b) % d)
            .collect()
    }

    pub fn scale(&self, x: &[u64], c: u64) -> Vec<u64> {
        x.iter()
            .zip(&self.factors)
            .map(|(&a, &d)| ((a as u128 * c as u128) % d as u128) as u64)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.factors).map(|(&a, &d)| (d - a % d) % d).collect()
    }

    pub fn is_zero_element(&self, x: &[u64]) -> bool {
        x.iter().zip(&self.factors).all(|(a, d)| a % d == 0)
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.rank() && x.iter().zip(&self.factors).all(|(a, d)| a < d)
    }

    /// All elements in odometer order (last coordinate fastest).
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.factors {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Image of an element under the injective embedding into `(Z/n)^k`
    /// given by `x_i ↦ (n/d_i) x_i`.
    pub(crate) fn embed(&self, x: &[u64]) -> Vec<u64> {
        let n = self.ring.modulus;
        x.iter().zip(&self.factors).map(|(&a, &d)| (a % d) * (n / d)).collect()
    }
}

/// A presentation `(Z/n)^g / ⟨relations⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    ring: RingSpec,
    generator_count: usize,
    relations: Vec<Vec<u64>>,
}

impl Presentation {
    pub fn new(ring: RingSpec, generator_count: usize, relations: Vec<Vec<u64>>) -> Result<Self> {
        let n = ring.modulus;
        let mut reduced = Vec::with_capacity(relations.len());
        for r in relations {
            if r.len() != generator_count {
                return Err(Error::InvalidPresentation {
                    expected: generator_count,
                    got: r.len(),
                });
            }
            reduced.push(r.into_iter().map(|x| x % n).collect());
        }
        Ok(Presentation {
            ring,
            generator_count,
            relations: reduced,
        })
    }

    /// `⊕ Z/c_i` presented on one generator per summand.
    pub fn diagonal(ring: RingSpec, orders: &[u64]) -> Self {
        let n = ring.modulus;
        let g = orders.len();
        let relations = orders
            .iter()
            .enumerate()
            .filter(|(_, &c)| c % n != 0)
            .map(|(i, &c)| {
                let mut r = vec![0; g];
                r[i] = c % n;
                r
            })
            .collect();
        Presentation {
            ring,
            generator_count: g,
            relations,
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relations(&self) -> &[Vec<u64>] {
        &self.relations
    }
}

/// A presented module in canonical form, with the change of basis between
/// presentation generators ("raw" coordinates) and canonical generators.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub module: FiniteModule,
    /// `to_canonical[k][i]`: coordinate `k` of the image of raw generator `i`.
    to_canonical: Vec<Vec<u64>>,
    /// `lifts[k]`: raw coordinates (mod n) of canonical generator `k`.
    lifts: Vec<Vec<u64>>,
    /// Number of raw generators.
    raw_count: usize,
}

impl Canonical {
    /// Canonical coordinates of a raw coordinate vector.
    pub fn project(&self, raw: &[u64]) -> Vec<u64> {
        let coords: Vec<i128> = self
            .to_canonical
            .iter()
            .map(|row| row.iter().zip(raw).map(|(&a, &x)| a as i128 * x as i128).sum())
            .collect();
        self.module.reduce(&coords)
    }

    /// Canonical coordinates of raw generator `i`.
    pub fn project_generator(&self, i: usize) -> Vec<u64> {
        self.to_canonical.iter().map(|row| row[i]).collect()
    }

    /// Raw coordinates representing canonical generator `k`.
    pub fn lift(&self, k: usize) -> &[u64] {
        &self.lifts[k]
    }

    /// Raw coordinates representing a canonical element.
    pub fn lift_element(&self, x: &[u64]) -> Vec<u64> {
        let n = self.module.modulus();
        let mut raw = vec![0u64; self.raw_count];
        for (k, &c) in x.iter().enumerate() {
            for (r, &l) in raw.iter_mut().zip(&self.lifts[k]) {
                *r = ((*r as u128 + c as u128 * l as u128) % n as u128) as u64;
            }
        }
        raw
    }

    pub fn generator_count(&self) -> usize {
        self.raw_count
    }

    /// The projection from the free module on the presentation generators.
    pub fn projection(&self) -> Morphism {
        let g = self.raw_len();
        let free = FiniteModule::free(self.module.ring(), g);
        Morphism::from_matrix_unchecked(free, self.module.clone(), self.to_canonical.clone())
    }

    fn raw_len(&self) -> usize {
        self.raw_count
    }
}

/// Invariant-factor form of a presented module.
pub fn canonicalize(p: &Presentation) -> Canonical {
    canonicalize_raw(p.ring, p.generator_count, &p.relations)
}

pub(crate) fn canonicalize_raw(ring: RingSpec, g: usize, relations: &[Vec<u64>]) -> Canonical {
    let n = ring.modulus;
    let smith = smith_form(n, relations, g);
    let kept: Vec<usize> = (0..g).filter(|&k| smith.diagonal[k] > 1).collect();
    let factors: Vec<u64> = kept.iter().map(|&k| smith.diagonal[k]).collect();
    let module = FiniteModule::from_chain(ring, factors);
    let to_canonical = kept
        .iter()
        .zip(module.factors())
        .map(|(&k, &d)| (0..g).map(|i| smith.v[i][k] % d).collect())
        .collect();
    let lifts = kept.iter().map(|&k| smith.v_inv[k].clone()).collect();
    Canonical {
        module,
        to_canonical,
        lifts,
        raw_count: g,
    }
}

/// A homomorphism between canonical modules, stored as `matrix[j][i]`: the
/// `j`-th coordinate of the image of domain generator `i`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MorphismRepr", into = "MorphismRepr")]
pub struct Morphism {
    domain: FiniteModule,
    codomain: FiniteModule,
    matrix: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    dom: FiniteModule,
    cod: FiniteModule,
    matrix: Vec<Vec<u64>>,
}

impl TryFrom<MorphismRepr> for Morphism {
    type Error = Error;

    fn try_from(r: MorphismRepr) -> Result<Self> {
        Morphism::new(r.dom, r.cod, r.matrix)
    }
}

impl From<Morphism> for MorphismRepr {
    fn from(m: Morphism) -> Self {
        MorphismRepr {
            dom: m.domain,
            cod: m.codomain,
            matrix: m.matrix,
        }
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} : {} -> {}", self.matrix, self.domain, self.codomain)
    }
}

impl Morphism {
    /// Validates shape, reduction of entries, and well-definedness
    /// `d_i * a[j][i] ≡ 0 (mod e_j)`.
    pub fn new(domain: FiniteModule, codomain: FiniteModule, matrix: Vec<Vec<u64>>) -> Result<Self> {
        domain.ring.check_same(&codomain.ring)?;
        let (m, r) = (domain.rank(), codomain.rank());
        let cols = matrix.first().map_or(m, |row| row.len());
        if matrix.len() != r || matrix.iter().any(|row| row.len() != m) {
            return Err(Error::Shape {
                expected_rows: r,
                expected_cols: m,
                rows: matrix.len(),
                cols,
            });
        }
        for (j, row) in matrix.iter().enumerate() {
            let e = codomain.factors[j];
            for (i, &a) in row.iter().enumerate() {
                let d = domain.factors[i];
                if a >= e || !(d as u128 * a as u128).is_multiple_of(e as u128) {
                    return Err(Error::IllDefined {
                        row: j,
                        col: i,
                        value: a,
                        source_order: d,
                        target_order: e,
                    });
                }
            }
        }
        Ok(Morphism {
            domain,
            codomain,
            matrix,
        })
    }

    pub(crate) fn from_matrix_unchecked(domain: FiniteModule, codomain: FiniteModule, matrix: Vec<Vec<u64>>) -> Self {
        let f = Morphism {
            domain,
            codomain,
            matrix,
        };
        debug_assert!(
            Morphism::new(f.domain.clone(), f.codomain.clone(), f.matrix.clone()).is_ok(),
            "ill-defined morphism {f:?}"
        );
        f
    }

    /// The morphism sending domain generator `i` to `images[i]` (already
    /// reduced codomain elements).
    pub(crate) fn from_images_unchecked(domain: FiniteModule, codomain: FiniteModule, images: &[Vec<u64>]) -> Self {
        let matrix = (0..codomain.rank())
            .map(|j| images.iter().map(|img| img[j]).collect())
            .collect();
        Self::from_matrix_unchecked(domain, codomain, matrix)
    }

    /// Validated counterpart of building a morphism from generator images.
    pub fn from_images(domain: FiniteModule, codomain: FiniteModule, images: &[Vec<u64>]) -> Result<Self> {
        if images.len() != domain.rank() || images.iter().any(|v| v.len() != codomain.rank()) {
            return Err(Error::Shape {
                expected_rows: codomain.rank(),
                expected_cols: domain.rank(),
                rows: images.first().map_or(0, |v| v.len()),
                cols: images.len(),
            });
        }
        let matrix = (0..codomain.rank())
            .map(|j| images.iter().map(|img| img[j] % codomain.factors[j]).collect())
            .collect();
        Self::new(domain, codomain, matrix)
    }

    pub fn identity(m: &FiniteModule) -> Self {
        let k = m.rank();
        let matrix = (0..k).map(|j| (0..k).map(|i| u64::from(i == j)).collect()).collect();
        Morphism {
            domain: m.clone(),
            codomain: m.clone(),
            matrix,
        }
    }

    pub fn zero(domain: &FiniteModule, codomain: &FiniteModule) -> Self {
        Morphism {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: vec![vec![0; domain.rank()]; codomain.rank()],
        }
    }

    pub fn domain(&self) -> &FiniteModule {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteModule {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn ring(&self) -> RingSpec {
        self.domain.ring
    }

    /// Image of domain generator `i`.
    pub fn column(&self, i: usize) -> Vec<u64> {
        self.matrix.iter().map(|row| row[i]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u64>> {
        (0..self.domain.rank()).map(|i| self.column(i)).collect()
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.matrix
            .iter()
            .zip(&self.codomain.factors)
            .map(|(row, &e)| {
                let s: u128 = row.iter().zip(x).map(|(&a, &b)| a as u128 * b as u128).sum();
                (s % e as u128) as u64
            })
            .collect()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &Morphism) -> Result<Morphism> {
        if first.codomain != self.domain {
            return Err(Error::NotComposable(format!(
                "{} -> {} then {} -> {}",
                first.domain, first.codomain, self.domain, self.codomain
            )));
        }
        Ok(self.compose_unchecked(first))
    }

    pub(crate) fn compose_unchecked(&self, first: &Morphism) -> Morphism {
        debug_assert_eq!(first.codomain, self.domain);
        let images: Vec<Vec<u64>> = first.columns().iter().map(|c| self.apply(c)).collect();
        Morphism::from_images_unchecked(first.domain.clone(), self.codomain.clone(), &images)
    }

    fn check_parallel(&self, other: &Morphism) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::NotComposable(format!(
                "cannot add maps {} -> {} and {} -> {}",
                self.domain, self.codomain, other.domain, other.codomain
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.check_parallel(other)?;
        Ok(self.combine(other, 1))
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.check_parallel(other)?;
        Ok(self.combine(other, -1))
    }

    fn combine(&self, other: &Morphism, sign: i128) -> Morphism {
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .zip(&self.codomain.factors)
            .map(|((a, b), &e)| {
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| linalg::mod_reduce(x as i128 + sign * y as i128, e))
                    .collect()
            })
            .collect();
        Morphism {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
        }
    }

    pub fn neg(&self) -> Morphism {
        Morphism::zero(&self.domain, &self.codomain).combine(self, -1)
    }

    pub fn scale(&self, c: u64) -> Morphism {
        let images: Vec<Vec<u64>> = self.columns().iter().map(|col| self.codomain.scale(col, c)).collect();
        Morphism::from_images_unchecked(self.domain.clone(), self.codomain.clone(), &images)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|row| row.iter().all(|&a| a == 0))
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && *self == Morphism::identity(&self.domain)
    }

    /// `|im f|`.
    pub fn image_order(&self) -> u128 {
        let n = self.domain.modulus();
        let rows = self.columns().iter().map(|c| self.codomain.embed(c)).collect();
        span_order(n, rows, self.codomain.rank())
    }

    pub fn is_mono(&self) -> bool {
        self.image_order() == self.domain.order()
    }

    pub fn is_epi(&self) -> bool {
        self.image_order() == self.codomain.order()
    }

    pub fn is_iso(&self) -> bool {
        self.domain.order() == self.codomain.order() && self.is_mono()
    }

    /// A linear system for `f(x) = y`.
    pub fn solver(&self) -> LinearSystem {
        LinearSystem::new(
            self.domain.modulus(),
            self.domain.factors.clone(),
            self.codomain.factors.clone(),
            &self.columns(),
        )
    }

    /// Lexicographically smallest `x` with `f(x) = y`.
    pub fn preimage(&self, y: &[u64]) -> Option<Vec<u64>> {
        self.solver().solve(y)
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_iso() {
            return None;
        }
        let solver = self.solver();
        let images: Vec<Vec<u64>> = (0..self.codomain.rank())
            .map(|j| solver.solve(&self.codomain.basis_element(j)).expect("iso is onto"))
            .collect();
        Some(Morphism::from_images_unchecked(
            self.codomain.clone(),
            self.domain.clone(),
            &images,
        ))
    }
}

/// Generators (in `(Z/n)^s`) of the relation module
/// `{c : Σ c_j gens_j = 0}` among elements of `target`.
pub(crate) fn relations_among(target: &FiniteModule, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = target.modulus();
    let r = target.rank();
    let s = gens.len();
    let rows = gens
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut row = target.embed(g);
            row.resize(r + s, 0);
            row[r + j] = 1;
            row
        })
        .collect();
    howell_form(n, rows, r + s)
        .into_iter()
        .filter(|row| row[..r].iter().all(|&x| x == 0))
        .map(|row| row[r..].to_vec())
        .collect()
}

/// The submodule of `ambient` generated by `gens`, with its inclusion.
pub(crate) fn submodule(ambient: &FiniteModule, gens: &[Vec<u64>]) -> (FiniteModule, Morphism) {
    let relations = relations_among(ambient, gens);
    let canonical = canonicalize_raw(ambient.ring(), gens.len(), &relations);
    let images: Vec<Vec<u64>> = (0..canonical.module.rank())
        .map(|k| {
            let mut acc = ambient.zero_element();
            for (c, g) in canonical.lift(k).iter().zip(gens) {
                acc = ambient.add(&acc, &ambient.scale(g, *c));
            }
            acc
        })
        .collect();
    let inclusion = Morphism::from_images_unchecked(canonical.module.clone(), ambient.clone(), &images);
    (canonical.module, inclusion)
}

/// `ambient / ⟨gens⟩` with its projection.
pub(crate) fn quotient(ambient: &FiniteModule, gens: &[Vec<u64>]) -> (FiniteModule, Morphism) {
    let k = ambient.rank();
    let mut relations: Vec<Vec<u64>> = Presentation::diagonal(ambient.ring(), ambient.factors()).relations;
    relations.extend(gens.iter().cloned());
    let canonical = canonicalize_raw(ambient.ring(), k, &relations);
    let images: Vec<Vec<u64>> = (0..k).map(|i| canonical.project_generator(i)).collect();
    let projection = Morphism::from_images_unchecked(ambient.clone(), canonical.module.clone(), &images);
    (canonical.module, projection)
}

/// Kernel of `f` with its inclusion into `dom(f)`.
pub fn kernel(f: &Morphism) -> (FiniteModule, Morphism) {
    let dom = f.domain();
    let gens: Vec<Vec<u64>> = relations_among(f.codomain(), &f.columns())
        .iter()
        .map(|c| dom.reduce(&c.iter().map(|&x| x as i128).collect::<Vec<_>>()))
        .collect();
    submodule(dom, &gens)
}

/// Image of `f` with its inclusion into `cod(f)`.
pub fn image(f: &Morphism) -> (FiniteModule, Morphism) {
    submodule(f.codomain(), &f.columns())
}

/// Cokernel `cod(f) / im(f)` with its projection.
pub fn cokernel(f: &Morphism) -> (FiniteModule, Morphism) {
    quotient(f.codomain(), &f.columns())
}

/// `M ⊕ N` with injections and projections.
#[derive(Clone, Debug)]
pub struct Biproduct {
    pub sum: FiniteModule,
    pub injections: [Morphism; 2],
    pub projections: [Morphism; 2],
}

pub fn direct_sum(m: &FiniteModule, n: &FiniteModule) -> Result<Biproduct> {
    m.ring().check_same(&n.ring())?;
    let orders: Vec<u64> = m.factors().iter().chain(n.factors()).copied().collect();
    let canonical = canonicalize(&Presentation::diagonal(m.ring(), &orders));
    let sum = canonical.module.clone();
    let (a, b) = (m.rank(), n.rank());
    let inj = |offset: usize, part: &FiniteModule| {
        let images: Vec<Vec<u64>> = (0..part.rank())
            .map(|i| canonical.project_generator(offset + i))
            .collect();
        Morphism::from_images_unchecked(part.clone(), sum.clone(), &images)
    };
    let proj = |offset: usize, part: &FiniteModule| {
        let images: Vec<Vec<u64>> = (0..sum.rank())
            .map(|k| {
                let raw = canonical.lift(k);
                part.reduce(
                    &raw[offset..offset + part.rank()]
                        .iter()
                        .map(|&x| x as i128)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        Morphism::from_images_unchecked(sum.clone(), part.clone(), &images)
    };
    Ok(Biproduct {
        injections: [inj(0, m), inj(a, n)],
        projections: [proj(0, m), proj(a, n)],
        sum: {
            debug_assert_eq!(canonical.generator_count(), a + b);
            sum.clone()
        },
    })
}

/// `M ⊗ N`, presented on the pairs of generators `e_i ⊗ e'_j` with relations
/// `gcd(d_i, e_j)`.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    left: FiniteModule,
    right: FiniteModule,
    canonical: Canonical,
}

impl TensorProduct {
    pub fn new(left: &FiniteModule, right: &FiniteModule) -> Result<Self> {
        left.ring().check_same(&right.ring())?;
        let orders: Vec<u64> = left
            .factors()
            .iter()
            .flat_map(|&d| right.factors().iter().map(move |&e| gcd(d, e)))
            .collect();
        let canonical = canonicalize(&Presentation::diagonal(left.ring(), &orders));
        Ok(TensorProduct {
            left: left.clone(),
            right: right.clone(),
            canonical,
        })
    }

    pub fn module(&self) -> &FiniteModule {
        &self.canonical.module
    }

    pub fn left(&self) -> &FiniteModule {
        &self.left
    }

    pub fn right(&self) -> &FiniteModule {
        &self.right
    }

    fn raw_index(&self, i: usize, j: usize) -> usize {
        i * self.right.rank() + j
    }

    /// `x ⊗ y` in canonical coordinates.
    pub fn pure_tensor(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let n = self.left.modulus();
        let mut raw = vec![0u64; self.left.rank() * self.right.rank()];
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                raw[self.raw_index(i, j)] = ((a as u128 * b as u128) % n as u128) as u64;
            }
        }
        self.canonical.project(&raw)
    }

    /// Writes canonical generator `k` as `Σ c_ij e_i ⊗ e'_j`.
    pub fn decompose(&self, k: usize) -> Vec<(usize, usize, u64)> {
        let raw = self.canonical.lift(k);
        let r = self.right.rank();
        raw.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(idx, &c)| (idx / r, idx % r, c))
            .collect()
    }

    /// The bilinear extension of `(i, j) ↦ value(i, j)` as a morphism
    /// `M ⊗ N → target`. The caller guarantees bilinearity.
    pub(crate) fn bilinear_map(&self, target: &FiniteModule, value: impl Fn(usize, usize) -> Vec<u64>) -> Morphism {
        let images: Vec<Vec<u64>> = (0..self.module().rank())
            .map(|k| {
                let mut acc = target.zero_element();
                for (i, j, c) in self.decompose(k) {
                    acc = target.add(&acc, &target.scale(&value(i, j), c));
                }
                acc
            })
            .collect();
        Morphism::from_images_unchecked(self.module().clone(), target.clone(), &images)
    }

    /// The symmetry `M ⊗ N → N ⊗ M`.
    pub fn swap(&self) -> Result<(TensorProduct, Morphism)> {
        let other = TensorProduct::new(&self.right, &self.left)?;
        let map = self.bilinear_map(other.module(), |i, j| {
            other.pure_tensor(&self.right.basis_element(j), &self.left.basis_element(i))
        });
        Ok((other, map))
    }
}

thread_local! {
    static TENSORS: std::cell::RefCell<std::collections::HashMap<(FiniteModule, FiniteModule), std::rc::Rc<TensorProduct>>> =
        Default::default();
}

/// [`TensorProduct::new`], memoized per thread.
pub fn cached_tensor(left: &FiniteModule, right: &FiniteModule) -> std::rc::Rc<TensorProduct> {
    TENSORS.with(|cache| {
        let key = (left.clone(), right.clone());
        if let Some(t) = cache.borrow().get(&key) {
            return std::rc::Rc::clone(t);
        }
        let t = std::rc::Rc::new(TensorProduct::new(left, right).expect("same ring"));
        cache.borrow_mut().insert(key, std::rc::Rc::clone(&t));
        t
    })
}

pub fn tensor(m: &FiniteModule, n: &FiniteModule) -> Result<FiniteModule> {
    Ok(TensorProduct::new(m, n)?.module().clone())
}

/// `f ⊗ g` between the canonical tensor products of the domains and codomains.
pub fn tensor_mor(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    let source = TensorProduct::new(f.domain(), g.domain())?;
    let target = TensorProduct::new(f.codomain(), g.codomain())?;
    Ok(tensor_mor_with(&source, &target, f, g))
}

pub(crate) fn tensor_mor_with(source: &TensorProduct, target: &TensorProduct, f: &Morphism, g: &Morphism) -> Morphism {
    source.bilinear_map(target.module(), |i, j| target.pure_tensor(&f.column(i), &g.column(j)))
}

/// The internal hom `Hom(M, N)` as a canonical module.
///
/// Raw generator `(i, j)` is the map sending `e_i` to `(e_j / g) e'_j` with
/// `g = gcd(d_i, e_j)`; it has additive order `g`.
#[derive(Clone, Debug)]
pub struct HomModule {
    source: FiniteModule,
    target: FiniteModule,
    canonical: Canonical,
}

impl HomModule {
    pub fn new(source: &FiniteModule, target: &FiniteModule) -> Result<Self> {
        source.ring().check_same(&target.ring())?;
        let canonical = canonicalize(&Presentation::diagonal(
            source.ring(),
            &Self::raw_orders(source, target),
        ));
        Ok(HomModule {
            source: source.clone(),
            target: target.clone(),
            canonical,
        })
    }

    fn raw_orders(source: &FiniteModule, target: &FiniteModule) -> Vec<u64> {
        source
            .factors()
            .iter()
            .flat_map(|&d| target.factors().iter().map(move |&e| gcd(d, e)))
            .collect()
    }

    pub fn module(&self) -> &FiniteModule {
        &self.canonical.module
    }

    pub fn source(&self) -> &FiniteModule {
        &self.source
    }

    pub fn target(&self) -> &FiniteModule {
        &self.target
    }

    fn step(&self, i: usize, j: usize) -> u64 {
        let e = self.target.factors()[j];
        e / gcd(self.source.factors()[i], e)
    }

    /// The morphism represented by an element of the hom module.
    pub fn to_morphism(&self, x: &[u64]) -> Morphism {
        let raw = self.canonical.lift_element(x);
        let r = self.target.rank();
        let matrix = (0..r)
            .map(|j| {
                let e = self.target.factors()[j];
                (0..self.source.rank())
                    .map(|i| {
                        let c = raw[i * r + j] as u128;
                        ((c * self.step(i, j) as u128) % e as u128) as u64
                    })
                    .collect()
            })
            .collect();
        Morphism::from_matrix_unchecked(self.source.clone(), self.target.clone(), matrix)
    }

    /// The element of the hom module representing `f`.
    pub fn to_element(&self, f: &Morphism) -> Vec<u64> {
        debug_assert_eq!(f.domain(), &self.source);
        debug_assert_eq!(f.codomain(), &self.target);
        let r = self.target.rank();
        let mut raw = vec![0u64; self.source.rank() * r];
        for (j, row) in f.matrix().iter().enumerate() {
            for (i, &a) in row.iter().enumerate() {
                raw[i * r + j] = a / self.step(i, j);
            }
        }
        self.canonical.project(&raw)
    }

    /// Morphism for canonical generator `k`.
    pub fn generator(&self, k: usize) -> Morphism {
        self.to_morphism(&self.module().basis_element(k))
    }

    /// `Hom(a, b) : Hom(M, N) → Hom(M', N')`, `φ ↦ b ∘ φ ∘ a` for
    /// `a : M' → M` and `b : N → N'`.
    pub fn functor_map(&self, other: &HomModule, pre: &Morphism, post: &Morphism) -> Morphism {
        let images: Vec<Vec<u64>> = (0..self.module().rank())
            .map(|k| {
                let phi = self.generator(k);
                other.to_element(&post.compose_unchecked(&phi.compose_unchecked(pre)))
            })
            .collect();
        Morphism::from_images_unchecked(self.module().clone(), other.module().clone(), &images)
    }
}

pub fn hom_module(m: &FiniteModule, n: &FiniteModule) -> Result<HomModule> {
    HomModule::new(m, n)
}

/// The currying bijection `Hom(F ⊗ G, K) ≅ Hom(F, Hom(G, K))`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    tensor: TensorProduct,
    inner: HomModule,
    lhs: OnceCell<HomModule>,
    rhs: OnceCell<HomModule>,
}

impl Adjunction {
    pub fn new(f: &FiniteModule, g: &FiniteModule, k: &FiniteModule) -> Result<Self> {
        let tensor = TensorProduct::new(f, g)?;
        let inner = HomModule::new(g, k)?;
        // The outer hom modules are only needed for `forward`/`backward`.
        Ok(Adjunction {
            tensor,
            inner,
            lhs: OnceCell::new(),
            rhs: OnceCell::new(),
        })
    }

    pub fn tensor(&self) -> &TensorProduct {
        &self.tensor
    }

    /// `Hom(G, K)`.
    pub fn inner_hom(&self) -> &HomModule {
        &self.inner
    }

    /// `Hom(F ⊗ G, K)`.
    pub fn lhs(&self) -> &HomModule {
        self.lhs
            .get_or_init(|| HomModule::new(self.tensor.module(), self.inner.target()).expect("same ring"))
    }

    /// `Hom(F, Hom(G, K))`.
    pub fn rhs(&self) -> &HomModule {
        self.rhs
            .get_or_init(|| HomModule::new(self.tensor.left(), self.inner.module()).expect("same ring"))
    }

    /// `φ ↦ (x ↦ (y ↦ φ(x ⊗ y)))`.
    pub fn curry(&self, phi: &Morphism) -> Morphism {
        let (f, g) = (self.tensor.left(), self.tensor.right());
        let k = self.inner.target();
        let images: Vec<Vec<u64>> = (0..f.rank())
            .map(|i| {
                let col: Vec<Vec<u64>> = (0..g.rank())
                    .map(|j| phi.apply(&self.tensor.pure_tensor(&f.basis_element(i), &g.basis_element(j))))
                    .collect();
                let psi = Morphism::from_images_unchecked(g.clone(), k.clone(), &col);
                self.inner.to_element(&psi)
            })
            .collect();
        Morphism::from_images_unchecked(f.clone(), self.inner.module().clone(), &images)
    }

    /// `θ ↦ (x ⊗ y ↦ θ(x)(y))`.
    pub fn uncurry(&self, theta: &Morphism) -> Morphism {
        let k = self.inner.target().clone();
        let partial: Vec<Morphism> = theta.columns().iter().map(|c| self.inner.to_morphism(c)).collect();
        self.tensor.bilinear_map(&k, |i, j| partial[i].column(j))
    }

    /// The bijection on hom-module elements.
    pub fn forward(&self, x: &[u64]) -> Vec<u64> {
        self.rhs().to_element(&self.curry(&self.lhs().to_morphism(x)))
    }

    pub fn backward(&self, y: &[u64]) -> Vec<u64> {
        self.lhs().to_element(&self.uncurry(&self.rhs().to_morphism(y)))
    }
}

pub fn adjunction_iso(f: &FiniteModule, g: &FiniteModule, k: &FiniteModule) -> Result<Adjunction> {
    Adjunction::new(f, g, k)
}

/// Evaluation `Hom(G, K) ⊗ G → K`, `φ ⊗ x ↦ φ(x)`.
pub fn evaluation(g: &FiniteModule, k: &FiniteModule) -> Result<(TensorProduct, Morphism)> {
    let hom = HomModule::new(g, k)?;
    let tensor = TensorProduct::new(hom.module(), g)?;
    let gens: Vec<Morphism> = (0..hom.module().rank()).map(|a| hom.generator(a)).collect();
    let ev = tensor.bilinear_map(k, |a, j| gens[a].column(j));
    Ok((tensor, ev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: u64) -> RingSpec {
        RingSpec::new(n).unwrap()
    }

    fn module(n: u64, f: &[u64]) -> FiniteModule {
        FiniteModule::new(ring(n), f.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RingSpec::new(1).is_err());
        assert!(FiniteModule::new(ring(4), vec![4, 2]).is_err());
        assert!(FiniteModule::new(ring(6), vec![4]).is_err());
        assert!(FiniteModule::new(ring(6), vec![1]).is_err());
        // [2] -> [4] with 1 ↦ 1 is not well defined.
        assert!(Morphism::new(module(4, &[2]), module(4, &[4]), vec![vec![1]]).is_err());
        assert!(Morphism::new(module(4, &[2]), module(4, &[4]), vec![vec![2]]).is_ok());
    }

    #[test]
    fn canonicalize_examples() {
        let p = Presentation::new(ring(4), 1, vec![vec![2]]).unwrap();
        assert_eq!(canonicalize(&p).module.factors(), &[2]);
        let p = Presentation::new(ring(6), 2, vec![]).unwrap();
        assert_eq!(canonicalize(&p).module.factors(), &[6, 6]);
        let p = Presentation::new(ring(4), 2, vec![vec![2, 2]]).unwrap();
        assert_eq!(canonicalize(&p).module.factors(), &[2, 4]);
        assert!(Presentation::new(ring(4), 2, vec![vec![1]]).is_err());
    }

    #[test]
    fn canonical_change_of_basis_is_consistent() {
        let p = Presentation::new(ring(12), 3, vec![vec![4, 6, 3], vec![6, 0, 8]]).unwrap();
        let c = canonicalize(&p);
        // projecting the lift of each canonical generator gives it back
        for k in 0..c.module.rank() {
            assert_eq!(c.project(c.lift(k)), c.module.basis_element(k));
        }
        // relations project to zero
        for r in p.relations() {
            assert!(c.module.is_zero_element(&c.project(r)));
        }
        assert!(c.projection().is_epi());
    }

    #[test]
    fn kernel_and_cokernel_examples() {
        let z4 = module(4, &[4]);
        let times2 = Morphism::new(z4.clone(), z4.clone(), vec![vec![2]]).unwrap();
        let (k, inc) = kernel(&times2);
        assert_eq!(k.factors(), &[2]);
        assert_eq!(inc.column(0), vec![2]);
        let (c, _) = cokernel(&times2);
        assert_eq!(c.factors(), &[2]);

        let m = module(4, &[2, 4]);
        let id = Morphism::identity(&m);
        assert!(kernel(&id).0.is_zero());
        assert!(cokernel(&id).0.is_zero());

        let zero = Morphism::zero(&module(4, &[2]), &z4);
        let (k, inc) = kernel(&zero);
        assert_eq!(k.factors(), &[2]);
        assert!(inc.is_identity());
        assert_eq!(cokernel(&zero).0.factors(), &[4]);
    }

    #[test]
    fn direct_sum_examples() {
        let s = direct_sum(&module(4, &[2]), &module(4, &[2])).unwrap();
        assert_eq!(s.sum.factors(), &[2, 2]);
        let s = direct_sum(&module(4, &[4]), &module(4, &[2])).unwrap();
        assert_eq!(s.sum.factors(), &[2, 4]);
        let m = module(4, &[2, 4]);
        let s = direct_sum(&m, &FiniteModule::zero(ring(4))).unwrap();
        assert_eq!(s.sum, m);
        assert!(s.injections[0].is_identity());
        assert!(direct_sum(&module(4, &[2]), &module(6, &[2])).is_err());
    }

    #[test]
    fn tensor_and_hom_examples() {
        assert_eq!(tensor(&module(4, &[2]), &module(4, &[2])).unwrap().factors(), &[2]);
        assert_eq!(
            tensor(&module(4, &[2, 4]), &module(4, &[2])).unwrap().factors(),
            &[2, 2]
        );
        let n = module(12, &[2, 6]);
        assert_eq!(tensor(&ring(12).unit(), &n).unwrap(), n);
        assert_eq!(
            hom_module(&module(4, &[2]), &module(4, &[4]))
                .unwrap()
                .module()
                .factors(),
            &[2]
        );
        assert!(hom_module(&FiniteModule::zero(ring(4)), &module(4, &[4]))
            .unwrap()
            .module()
            .is_zero());
        assert_eq!(
            hom_module(&module(4, &[2, 4]), &module(4, &[2]))
                .unwrap()
                .module()
                .factors(),
            &[2, 2]
        );
    }

    #[test]
    fn hom_elements_round_trip() {
        let h = hom_module(&module(12, &[2, 6]), &module(12, &[3, 12])).unwrap();
        for x in h.module().elements() {
            let f = h.to_morphism(&x);
            assert_eq!(h.to_element(&f), x);
        }
    }

    #[test]
    fn evaluation_examples() {
        let r = ring(4);
        let m2 = module(4, &[2]);
        let (t, ev) = evaluation(&m2, &m2).unwrap();
        let hom = hom_module(&m2, &m2).unwrap();
        let id = hom.to_element(&Morphism::identity(&m2));
        assert_eq!(ev.apply(&t.pure_tensor(&id, &[1])), vec![1]);
        let (_, ev) = evaluation(&m2, &FiniteModule::zero(r)).unwrap();
        assert!(ev.is_zero());
        let k = module(4, &[2, 4]);
        let (_, ev) = evaluation(&r.unit(), &k).unwrap();
        assert!(ev.is_iso());
    }
}
