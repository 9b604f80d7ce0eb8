//! Deterministic enumeration of modules, morphisms and conflations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{check_conflation, Conflation};
use crate::linalg::{divisors, gcd};
use crate::module::{canonicalize_raw, cokernel, FiniteModule, Morphism, RingSpec};

/// Every canonical module over `Z/n` of order at most `max_order`, including
/// the zero module, sorted by order, then rank, then factor list.
pub fn enumerate_modules(ring: RingSpec, max_order: u128) -> Vec<FiniteModule> {
    let n = ring.modulus();
    let divs: Vec<u64> = divisors(n).into_iter().filter(|&d| d > 1).collect();
    let mut chains: Vec<Vec<u64>> = Vec::new();
    let mut stack: Vec<(Vec<u64>, u128)> = vec![(Vec::new(), 1)];
    while let Some((chain, order)) = stack.pop() {
        if order > max_order {
            continue;
        }
        for &d in &divs {
            if chain.last().is_none_or(|&last| d % last == 0) && order * d as u128 <= max_order {
                let mut next = chain.clone();
                next.push(d);
                stack.push((next, order * d as u128));
            }
        }
        chains.push(chain);
    }
    let mut modules: Vec<FiniteModule> = chains
        .into_iter()
        .map(|c| FiniteModule::new(ring, c).expect("chains are valid"))
        .collect();
    modules.sort_by(|a, b| (a.order(), a.rank(), a.factors()).cmp(&(b.order(), b.rank(), b.factors())));
    modules
}

/// Cyclic modules `[d]` for every divisor `d > 1` of `n` with `d ≤ max_order`.
pub fn enumerate_cyclic(ring: RingSpec, max_order: u128) -> Vec<FiniteModule> {
    ring.proper_divisors()
        .into_iter()
        .filter(|&d| d as u128 <= max_order)
        .map(|d| FiniteModule::cyclic(ring, d).unwrap())
        .collect()
}

/// Admissible values for each matrix entry, row-major.
fn entry_ranges(m: &FiniteModule, n: &FiniteModule) -> Vec<(u64, u64)> {
    n.factors()
        .iter()
        .flat_map(|&e| m.factors().iter().map(move |&d| (e / gcd(d, e), gcd(d, e))))
        .collect()
}

/// All morphisms `M → N` in odometer order over row-major matrix entries,
/// last entry fastest.
pub struct MorphismIter {
    domain: FiniteModule,
    codomain: FiniteModule,
    ranges: Vec<(u64, u64)>,
    counters: Vec<u64>,
    done: bool,
}

impl MorphismIter {
    pub fn new(domain: &FiniteModule, codomain: &FiniteModule) -> Self {
        MorphismIter {
            ranges: entry_ranges(domain, codomain),
            counters: vec![0; domain.rank() * codomain.rank()],
            domain: domain.clone(),
            codomain: codomain.clone(),
            done: false,
        }
    }

    fn current(&self) -> Morphism {
        let m = self.domain.rank();
        let matrix = (0..self.codomain.rank())
            .map(|j| {
                (0..m)
                    .map(|i| self.counters[j * m + i] * self.ranges[j * m + i].0)
                    .collect()
            })
            .collect();
        Morphism::from_matrix_unchecked(self.domain.clone(), self.codomain.clone(), matrix)
    }
}

impl Iterator for MorphismIter {
    type Item = Morphism;

    fn next(&mut self) -> Option<Morphism> {
        if self.done {
            return None;
        }
        let out = self.current();
        let mut k = self.counters.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.counters[k] += 1;
            if self.counters[k] < self.ranges[k].1 {
                break;
            }
            self.counters[k] = 0;
        }
        Some(out)
    }
}

pub fn enumerate_morphisms(m: &FiniteModule, n: &FiniteModule) -> Vec<Morphism> {
    MorphismIter::new(m, n).collect()
}

/// Number of morphisms `M → N` (the order of `Hom(M, N)`).
pub fn count_morphisms(m: &FiniteModule, n: &FiniteModule) -> u128 {
    entry_ranges(m, n).iter().map(|&(_, g)| g as u128).product()
}

/// A uniform sample of morphisms drawn with a seeded generator.
pub fn sample_morphisms(m: &FiniteModule, n: &FiniteModule, count: usize, seed: u64) -> Vec<Morphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_morphisms_with(m, n, count, &mut rng)
}

pub fn sample_morphisms_with(m: &FiniteModule, n: &FiniteModule, count: usize, rng: &mut impl Rng) -> Vec<Morphism> {
    let ranges = entry_ranges(m, n);
    let k = m.rank();
    (0..count)
        .map(|_| {
            let matrix = (0..n.rank())
                .map(|j| {
                    (0..k)
                        .map(|i| {
                            let (step, g) = ranges[j * k + i];
                            rng.gen_range(0..g) * step
                        })
                        .collect()
                })
                .collect();
            Morphism::from_matrix_unchecked(m.clone(), n.clone(), matrix)
        })
        .collect()
}

/// Calls `visit` on every conflation `K → Y → F` where `Y` is canonical of
/// order `|K|·|F|`, the inflation is any monomorphism `K → Y` whose cokernel
/// is exactly `F`, and the deflation is the canonical cokernel projection.
pub fn for_each_extension(k: &FiniteModule, f: &FiniteModule, mut visit: impl FnMut(Conflation)) {
    let ring = k.ring();
    let order = k.order() * f.order();
    for y in enumerate_modules(ring, order) {
        if y.order() != order || !may_extend(k, f, &y) {
            continue;
        }
        for inc in MorphismIter::new(k, &y) {
            if !inc.is_mono() {
                continue;
            }
            let (q, proj) = cokernel(&inc);
            if &q != f {
                continue;
            }
            debug_assert!(check_conflation(&inc, &proj).is_ok());
            visit(Conflation::new_unchecked(inc, proj));
        }
    }
}

/// Necessary conditions on a middle term: `Y` needs at least as many
/// summands as `K` and `F`, and the `p`-rank of `Y` is at most the sum of
/// the `p`-ranks of `K` and `F`.
fn may_extend(k: &FiniteModule, f: &FiniteModule, y: &FiniteModule) -> bool {
    if y.rank() < k.rank().max(f.rank()) || y.rank() > k.rank() + f.rank() {
        return false;
    }
    let n = y.modulus();
    divisors(n)
        .into_iter()
        .filter(|&p| p > 1 && divisors(p).len() == 2)
        .all(|p| {
            let prank = |m: &FiniteModule| m.factors().iter().filter(|&&d| d % p == 0).count();
            prank(y) <= prank(k) + prank(f) && prank(y) >= prank(k).max(prank(f))
        })
}

pub fn enumerate_extensions(k: &FiniteModule, f: &FiniteModule) -> Vec<Conflation> {
    let mut out = Vec::new();
    for_each_extension(k, f, |c| out.push(c));
    out
}

/// Per generator `f_i` of `F` (order `d_i`) and generator `e_j` of `K`
/// (order `κ_j`), the cocycle coordinate ranges over `t·u` for
/// `t < q`, where `u = κ_j / gcd(κ_j, n/d_i)` generates the
/// `(n/d_i)`-torsion of `Z/κ_j` and `q` is the index of `d_i·Z/κ_j` in it.
fn cocycle_ranges(k: &FiniteModule, f: &FiniteModule) -> Vec<(u64, u64)> {
    let n = k.modulus();
    f.factors()
        .iter()
        .flat_map(|&d| {
            k.factors().iter().map(move |&kappa| {
                let torsion = gcd(kappa, n / d);
                let u = kappa / torsion;
                let q = torsion * gcd(d, kappa) / kappa;
                (u, q)
            })
        })
        .collect()
}

/// Number of cocycle representatives, i.e. `|Ext¹(F, K)|`.
pub fn extension_class_count(k: &FiniteModule, f: &FiniteModule) -> u128 {
    cocycle_ranges(k, f).iter().map(|&(_, q)| q as u128).product()
}

/// The conflation `K → Y → F` glued by a cocycle: `Y` is generated by `K`
/// and lifts `f_i` of the generators of `F` subject to `d_i f_i = c_i`.
pub fn extension_from_cocycle(k: &FiniteModule, f: &FiniteModule, cocycle: &[Vec<u64>]) -> Conflation {
    let ring = k.ring();
    let n = ring.modulus();
    let (a, b) = (k.rank(), f.rank());
    let g = a + b;
    let mut relations = Vec::new();
    for (j, &kappa) in k.factors().iter().enumerate() {
        let mut r = vec![0; g];
        r[j] = kappa % n;
        relations.push(r);
    }
    for (i, &d) in f.factors().iter().enumerate() {
        let mut r = vec![0; g];
        r[a + i] = d % n;
        for (j, &c) in cocycle[i].iter().enumerate() {
            r[j] = (n - c % n) % n;
        }
        relations.push(r);
    }
    let canonical = canonicalize_raw(ring, g, &relations);
    let y = canonical.module.clone();
    let inc_images: Vec<Vec<u64>> = (0..a).map(|j| canonical.project_generator(j)).collect();
    let inc = Morphism::from_images_unchecked(k.clone(), y.clone(), &inc_images);
    let proj_images: Vec<Vec<u64>> = (0..y.rank())
        .map(|l| {
            let raw = canonical.lift(l);
            f.reduce(&raw[a..].iter().map(|&x| x as i128).collect::<Vec<_>>())
        })
        .collect();
    let proj = Morphism::from_images_unchecked(y, f.clone(), &proj_images);
    debug_assert!(check_conflation(&inc, &proj).is_ok(), "{inc:?} {proj:?}");
    Conflation::new_unchecked(inc, proj)
}

/// One conflation per class of `Ext¹(F, K)` when there are at most `cap`
/// classes. Otherwise the split class followed by `cap - 1` cocycles drawn
/// uniformly with the seeded generator.
pub fn extension_classes(k: &FiniteModule, f: &FiniteModule, cap: usize, seed: u64) -> Vec<Conflation> {
    let ranges = cocycle_ranges(k, f);
    let count = extension_class_count(k, f);
    let shape = |flat: &[u64]| -> Vec<Vec<u64>> {
        flat.chunks(k.rank().max(1))
            .take(f.rank())
            .map(|c| c.iter().take(k.rank()).copied().collect())
            .collect()
    };
    let to_cocycle = |ts: &[u64]| -> Vec<Vec<u64>> {
        let flat: Vec<u64> = ts.iter().zip(&ranges).map(|(&t, &(u, _))| t * u).collect();
        if k.rank() == 0 {
            vec![Vec::new(); f.rank()]
        } else {
            shape(&flat)
        }
    };
    let mut out = Vec::new();
    if count <= cap as u128 {
        let mut ts = vec![0u64; ranges.len()];
        loop {
            out.push(extension_from_cocycle(k, f, &to_cocycle(&ts)));
            let mut idx = ts.len();
            loop {
                if idx == 0 {
                    return out;
                }
                idx -= 1;
                ts[idx] += 1;
                if ts[idx] < ranges[idx].1 {
                    break;
                }
                ts[idx] = 0;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.push(extension_from_cocycle(k, f, &to_cocycle(&vec![0; ranges.len()])));
    while out.len() < cap {
        let ts: Vec<u64> = ranges.iter().map(|&(_, q)| rng.gen_range(0..q)).collect();
        out.push(extension_from_cocycle(k, f, &to_cocycle(&ts)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::hom_module;

    fn ring(n: u64) -> RingSpec {
        RingSpec::new(n).unwrap()
    }

    fn module(n: u64, f: &[u64]) -> FiniteModule {
        FiniteModule::new(ring(n), f.to_vec()).unwrap()
    }

    fn factor_lists(ms: &[FiniteModule]) -> Vec<Vec<u64>> {
        ms.iter().map(|m| m.factors().to_vec()).collect()
    }

    #[test]
    fn module_enumeration_examples() {
        assert_eq!(
            factor_lists(&enumerate_modules(ring(4), 4)),
            vec![vec![], vec![2], vec![4], vec![2, 2]]
        );
        assert_eq!(factor_lists(&enumerate_modules(ring(4), 1)), vec![Vec::<u64>::new()]);
        assert_eq!(
            factor_lists(&enumerate_modules(ring(6), 6)),
            vec![vec![], vec![2], vec![3], vec![2, 2], vec![6]]
        );
    }

    #[test]
    fn morphism_enumeration_examples() {
        let ms = enumerate_morphisms(&module(4, &[2]), &module(4, &[4]));
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[1].matrix(), &[vec![2]]);
        assert_eq!(
            enumerate_morphisms(&FiniteModule::zero(ring(4)), &module(4, &[2, 4])).len(),
            1
        );
        for n in [4u64, 6, 12] {
            let mods = enumerate_modules(ring(n), 16);
            for a in &mods {
                for b in &mods {
                    let h = hom_module(a, b).unwrap();
                    assert_eq!(count_morphisms(a, b), h.module().order());
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let (a, b) = (module(12, &[2, 6]), module(12, &[6, 12]));
        assert_eq!(sample_morphisms(&a, &b, 5, 7), sample_morphisms(&a, &b, 5, 7));
    }

    #[test]
    fn extension_examples() {
        let m2 = module(4, &[2]);
        let exts = enumerate_extensions(&m2, &m2);
        let mut middles: Vec<_> = exts.iter().map(|c| c.middle().factors().to_vec()).collect();
        middles.sort();
        middles.dedup();
        assert_eq!(middles, vec![vec![2, 2], vec![4]]);

        let f = module(4, &[2, 4]);
        let exts = enumerate_extensions(&FiniteModule::zero(ring(4)), &f);
        assert_eq!(exts.len(), 1);
        assert!(exts[0].deflation().is_identity());

        let b2 = module(2, &[2]);
        let exts = enumerate_extensions(&b2, &b2);
        assert!(exts.iter().all(|c| c.middle().factors() == [2, 2]));
        assert!(!exts.is_empty());
    }

    #[test]
    fn extension_classes_cover_ext() {
        let m2 = module(4, &[2]);
        assert_eq!(extension_class_count(&m2, &m2), 2);
        let classes = extension_classes(&m2, &m2, 100, 0);
        let middles: Vec<_> = classes.iter().map(|c| c.middle().factors().to_vec()).collect();
        assert_eq!(middles, vec![vec![2, 2], vec![4]]);
        // Z/n is injective over itself: no nontrivial extensions by it.
        assert_eq!(extension_class_count(&module(12, &[12]), &module(12, &[2, 6])), 1);
        assert_eq!(extension_class_count(&module(12, &[2, 6]), &module(12, &[12])), 1);
        // Over Z/2 everything splits.
        assert_eq!(extension_class_count(&module(2, &[2]), &module(2, &[2])), 1);
    }

    #[test]
    fn extension_class_middles_match_mono_enumeration() {
        for n in [4u64, 6, 8, 9] {
            let mods = enumerate_modules(ring(n), 8);
            for k in &mods {
                for f in &mods {
                    let mut a: Vec<_> = enumerate_extensions(k, f).iter().map(|c| c.middle().clone()).collect();
                    let mut b: Vec<_> = extension_classes(k, f, 10_000, 0)
                        .iter()
                        .map(|c| c.middle().clone())
                        .collect();
                    a.sort();
                    a.dedup();
                    b.sort();
                    b.dedup();
                    assert_eq!(a, b, "n={n} K={k} F={f}");
                }
            }
        }
    }
}
