//! Linear equations whose unknowns are morphisms.
//!
//! Sections, retractions, chain-level splittings and contracting homotopies
//! are all solutions of `L(s_1, …, s_m) = (b_1, …, b_k)` with `L` additive in
//! the unknown morphisms. [`MorphismEquation`] samples `L` on a basis of the
//! unknown hom-groups and hands the result to [`LinearSystem`].

use crate::linalg::{gcd, LinearSystem};
use crate::module::{FiniteModule, Morphism};

/// Shape `(domain, codomain)` of an unknown or target morphism.
pub type Shape = (FiniteModule, FiniteModule);

#[derive(Clone, Debug)]
struct BasisEntry {
    shape: usize,
    row: usize,
    col: usize,
    step: u64,
}

pub struct MorphismEquation {
    unknowns: Vec<Shape>,
    basis: Vec<BasisEntry>,
    system: LinearSystem,
}

fn zero_of(shape: &Shape) -> Morphism {
    Morphism::zero(&shape.0, &shape.1)
}

fn flatten(targets: &[Shape], values: &[Morphism]) -> Vec<u64> {
    debug_assert_eq!(targets.len(), values.len());
    values
        .iter()
        .flat_map(|m| m.matrix().iter().flat_map(|row| row.iter().copied()))
        .collect()
}

impl MorphismEquation {
    /// `map` must be additive in its arguments and return one morphism per
    /// target shape.
    pub fn new(unknowns: Vec<Shape>, targets: &[Shape], map: impl Fn(&[Morphism]) -> Vec<Morphism>) -> Self {
        let n = unknowns
            .iter()
            .chain(targets)
            .map(|(d, _)| d.modulus())
            .next()
            .unwrap_or(2);
        let mut basis = Vec::new();
        let mut unknown_orders = Vec::new();
        for (s, (dom, cod)) in unknowns.iter().enumerate() {
            for (j, &e) in cod.factors().iter().enumerate() {
                for (i, &d) in dom.factors().iter().enumerate() {
                    let g = gcd(d, e);
                    if g > 1 {
                        basis.push(BasisEntry {
                            shape: s,
                            row: j,
                            col: i,
                            step: e / g,
                        });
                        unknown_orders.push(g);
                    }
                }
            }
        }
        let target_orders: Vec<u64> = targets
            .iter()
            .flat_map(|(dom, cod)| {
                cod.factors()
                    .iter()
                    .flat_map(move |&e| std::iter::repeat_n(e, dom.rank()))
            })
            .collect();
        let mut args: Vec<Morphism> = unknowns.iter().map(zero_of).collect();
        let images: Vec<Vec<u64>> = basis
            .iter()
            .map(|b| {
                let zero = std::mem::replace(
                    &mut args[b.shape],
                    single_entry(&unknowns[b.shape], b.row, b.col, b.step),
                );
                let image = flatten(targets, &map(&args));
                args[b.shape] = zero;
                image
            })
            .collect();
        let system = LinearSystem::new(n, unknown_orders, target_orders, &images);
        MorphismEquation {
            unknowns,
            basis,
            system,
        }
    }

    fn assemble(&self, coords: &[u64]) -> Vec<Morphism> {
        let mut mats: Vec<Vec<Vec<u64>>> = self
            .unknowns
            .iter()
            .map(|(d, c)| vec![vec![0; d.rank()]; c.rank()])
            .collect();
        for (b, &x) in self.basis.iter().zip(coords) {
            mats[b.shape][b.row][b.col] = x * b.step;
        }
        self.unknowns
            .iter()
            .zip(mats)
            .map(|((d, c), m)| Morphism::from_matrix_unchecked(d.clone(), c.clone(), m))
            .collect()
    }

    /// Solution with lexicographically smallest matrices (row-major, in
    /// unknown order), or `None`.
    pub fn solve(&self, rhs: &[Morphism]) -> Option<Vec<Morphism>> {
        let b: Vec<u64> = rhs
            .iter()
            .flat_map(|m| m.matrix().iter().flat_map(|row| row.iter().copied()))
            .collect();
        self.system.solve(&b).map(|x| self.assemble(&x))
    }

    pub fn solve_homogeneous_count(&self) -> u128 {
        self.system.kernel_order()
    }

    /// Every solution (use only when the solution set is small).
    pub fn all_solutions(&self, rhs: &[Morphism]) -> Vec<Vec<Morphism>> {
        let b: Vec<u64> = rhs
            .iter()
            .flat_map(|m| m.matrix().iter().flat_map(|row| row.iter().copied()))
            .collect();
        self.system.all_solutions(&b).iter().map(|x| self.assemble(x)).collect()
    }

    /// Order of the image of `L`.
    pub fn image_order(&self) -> u128 {
        self.system.image_order()
    }
}

fn single_entry(shape: &Shape, row: usize, col: usize, value: u64) -> Morphism {
    let (d, c) = shape;
    let mut m = vec![vec![0; d.rank()]; c.rank()];
    m[row][col] = value;
    Morphism::from_matrix_unchecked(d.clone(), c.clone(), m)
}

/// Lexicographically smallest `s` with `g ∘ s = id`.
pub fn section_of(g: &Morphism) -> Option<Morphism> {
    let shape = (g.codomain().clone(), g.domain().clone());
    let target = (g.codomain().clone(), g.codomain().clone());
    let eq = MorphismEquation::new(vec![shape], &[target], |s| vec![g.compose_unchecked(&s[0])]);
    eq.solve(&[Morphism::identity(g.codomain())]).map(|mut v| v.remove(0))
}

/// Lexicographically smallest `r` with `r ∘ f = id`.
pub fn retraction_of(f: &Morphism) -> Option<Morphism> {
    let shape = (f.codomain().clone(), f.domain().clone());
    let target = (f.domain().clone(), f.domain().clone());
    let eq = MorphismEquation::new(vec![shape], &[target], |r| vec![r[0].compose_unchecked(f)]);
    eq.solve(&[Morphism::identity(f.domain())]).map(|mut v| v.remove(0))
}

/// Lexicographically smallest `e : B → E` with `e ∘ i = φ` for `i : A → B`,
/// `φ : A → E`.
pub fn extend_along(i: &Morphism, phi: &Morphism) -> Option<Morphism> {
    let shape = (i.codomain().clone(), phi.codomain().clone());
    let target = (phi.domain().clone(), phi.codomain().clone());
    let eq = MorphismEquation::new(vec![shape], &[target], |e| vec![e[0].compose_unchecked(i)]);
    eq.solve(std::slice::from_ref(phi)).map(|mut v| v.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::RingSpec;

    fn module(n: u64, f: &[u64]) -> FiniteModule {
        FiniteModule::new(RingSpec::new(n).unwrap(), f.to_vec()).unwrap()
    }

    #[test]
    fn section_of_reduction_fails() {
        // [4] -> [2] reduction has no section: s(1) ∈ {0, 2} both map to 0.
        let g = Morphism::new(module(4, &[4]), module(4, &[2]), vec![vec![1]]).unwrap();
        assert!(section_of(&g).is_none());
    }

    #[test]
    fn section_is_lexicographically_smallest() {
        // projection [2,2] -> [2] onto the second coordinate: sections are
        // 1 ↦ (a, 1) with a ∈ {0, 1}; the smallest is (0, 1).
        let g = Morphism::new(module(4, &[2, 2]), module(4, &[2]), vec![vec![0, 1]]).unwrap();
        let s = section_of(&g).unwrap();
        assert_eq!(s.column(0), vec![0, 1]);
    }

    #[test]
    fn solution_counts() {
        let m = module(4, &[2, 4]);
        let eq = MorphismEquation::new(vec![(m.clone(), m.clone())], &[(m.clone(), m.clone())], |s| {
            vec![s[0].clone()]
        });
        assert_eq!(eq.solve_homogeneous_count(), 1);
        assert_eq!(eq.image_order(), 2 * 2 * 2 * 4);
        let eq = MorphismEquation::new(vec![(m.clone(), m.clone())], &[], |_| vec![]);
        assert_eq!(eq.all_solutions(&[]).len(), 32);
    }
}
