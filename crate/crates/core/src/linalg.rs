//! Linear algebra over `Z/n`.
//!
//! Every module in this crate is a `Z/n`-module, so all matrix work happens
//! with residues in `[0, n)`. Transforms are built from integer-unimodular
//! steps (swaps, elementary additions, 2x2 Bezout blocks) and unit scalings,
//! so they stay invertible after reduction mod `n`.
//!
//! Two normal forms are provided:
//!
//! * [`howell_form`]: row echelon form with the Howell property. For every
//!   `k`, the rows whose first `k` entries vanish span exactly the elements of
//!   the row module whose first `k` entries vanish. This gives kernels,
//!   membership tests and linear solving.
//! * [`smith_form`]: diagonalisation with the column transform and its inverse
//!   tracked, used to put presentations into invariant-factor form.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

#[inline]
pub fn mod_reduce(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

#[inline]
fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// A unit `u` of `Z/n` with `a*u ≡ gcd(a, n) (mod n)`.
pub fn normalizing_unit(a: u64, n: u64) -> u64 {
    let a = a % n;
    if a == 0 {
        return 1;
    }
    let g = gcd(a, n);
    // a = g*a', n = g*n'; any lift of a'^{-1} mod n' that is a unit mod n works.
    let n_red = n / g;
    let a_red = a / g;
    let (_, inv, _) = ext_gcd(a_red as i128, n_red as i128);
    let base = mod_reduce(inv, n_red.max(1));
    let mut u = base;
    while gcd(u, n) != 1 {
        u += n_red;
    }
    debug_assert_eq!(mul_mod(a, u, n), g);
    u % n
}

fn row_scale(row: &mut [u64], u: u64, n: u64) {
    for x in row.iter_mut() {
        *x = mul_mod(*x, u, n);
    }
}

/// `dst -= q * src` (mod n).
fn row_sub(dst: &mut [u64], src: &[u64], q: u64, n: u64) {
    if q == 0 {
        return;
    }
    let q = q % n;
    for (d, s) in dst.iter_mut().zip(src) {
        let t = mul_mod(*s, q, n);
        *d = if *d >= t { *d - t } else { *d + n - t };
    }
}

/// Replaces `(x, y)` by `(s*x + t*y, b'*x - a'*y)` entrywise.
fn bezout_pair(x: &mut [u64], y: &mut [u64], s: i128, t: i128, bq: i128, aq: i128, n: u64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi as i128, *yi as i128);
        *xi = mod_reduce(s * a + t * b, n);
        *yi = mod_reduce(bq * a - aq * b, n);
    }
}

fn bezout_coeffs(a: u64, b: u64) -> (u64, i128, i128, i128, i128) {
    let (g, s, t) = ext_gcd(a as i128, b as i128);
    (g as u64, s, t, b as i128 / g, a as i128 / g)
}

/// Howell form of the row module spanned by `rows` (each of length `cols`).
///
/// Returned rows are nonzero, in echelon order, each pivot is a divisor of `n`
/// (strictly less than `n`), and entries above a pivot are reduced modulo it.
pub fn howell_form(n: u64, mut rows: Vec<Vec<u64>>, cols: usize) -> Vec<Vec<u64>> {
    for row in rows.iter_mut() {
        debug_assert_eq!(row.len(), cols);
        for x in row.iter_mut() {
            *x %= n;
        }
    }
    let mut r = 0;
    for c in 0..cols {
        let Some(first) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, first);
        for i in r + 1..rows.len() {
            if rows[i][c] == 0 {
                continue;
            }
            let (head, tail) = rows.split_at_mut(i);
            let pivot_row = &mut head[r];
            let other = &mut tail[0];
            let (a, b) = (pivot_row[c], other[c]);
            if b % a == 0 {
                row_sub(other, pivot_row, b / a, n);
            } else {
                let (_, s, t, bq, aq) = bezout_coeffs(a, b);
                bezout_pair(pivot_row, other, s, t, bq, aq, n);
            }
        }
        let u = normalizing_unit(rows[r][c], n);
        row_scale(&mut rows[r], u, n);
        let p = rows[r][c];
        let mut annihilated = rows[r].clone();
        row_scale(&mut annihilated, n / p, n);
        if annihilated.iter().any(|&x| x != 0) {
            rows.push(annihilated);
        }
        for i in 0..r {
            let q = rows[i][c] / p;
            if q != 0 {
                let (head, tail) = rows.split_at_mut(r);
                row_sub(&mut head[i], &tail[0], q, n);
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

fn pivot_col(row: &[u64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

/// Reduces `v` against a Howell basis. The result is zero iff `v` lies in the
/// row module, and the reduction is the coordinatewise-minimal representative
/// of the coset when the basis is a Howell form.
pub fn howell_reduce(n: u64, basis: &[Vec<u64>], v: &mut [u64]) {
    for row in basis {
        let c = pivot_col(row).expect("howell rows are nonzero");
        let p = row[c];
        let q = v[c] / p;
        if q != 0 {
            row_sub(v, row, q, n);
        }
    }
}

/// Order of the row module described by a Howell basis.
pub fn howell_order(n: u64, basis: &[Vec<u64>]) -> u128 {
    basis
        .iter()
        .map(|row| (n / row[pivot_col(row).unwrap()]) as u128)
        .product()
}

/// Order of the submodule of `(Z/n)^cols` spanned by `rows`.
pub fn span_order(n: u64, rows: Vec<Vec<u64>>, cols: usize) -> u128 {
    howell_order(n, &howell_form(n, rows, cols))
}

/// Smith form of a relation matrix over `Z/n` with tracked column transform.
///
/// With `A` the input (rows are relations on `cols` generators), there is an
/// invertible row transform `U` such that `U * A * v = diag(diagonal)`.
/// `diagonal[k]` divides `n`, a value of `n` meaning the column carries no
/// relation, and `diagonal[k] | diagonal[k + 1]`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<u64>,
    pub v: Vec<Vec<u64>>,
    pub v_inv: Vec<Vec<u64>>,
}

pub fn smith_form(n: u64, rows: &[Vec<u64>], cols: usize) -> SmithForm {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % n).collect()).collect();
    let identity = |k: usize| -> Vec<Vec<u64>> {
        (0..k)
            .map(|i| (0..k).map(|j| u64::from(i == j) % n).collect())
            .collect()
    };
    let mut v = identity(cols);
    let mut v_inv = identity(cols);
    let nrows = a.len();
    let mut t = 0;
    let mut diagonal = Vec::with_capacity(cols);

    while t < nrows.min(cols) {
        // Pivot: entry with the smallest ideal gcd(entry, n).
        let mut best: Option<(u64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let g = gcd(x, n);
                    if best.is_none_or(|(bg, _, _)| g < bg) {
                        best = Some((g, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            v_inv.swap(t, pj);
        }
        loop {
            let u = normalizing_unit(a[t][t], n);
            row_scale(&mut a[t], u, n);
            // Clear the column below the pivot with row operations.
            for i in t + 1..nrows {
                let b = a[i][t];
                if b == 0 {
                    continue;
                }
                let (head, tail) = a.split_at_mut(i);
                let (pivot_row, other) = (&mut head[t], &mut tail[0]);
                let p = pivot_row[t];
                if b.is_multiple_of(p) {
                    row_sub(other, pivot_row, b / p, n);
                } else {
                    let (_, s, tt, bq, aq) = bezout_coeffs(p, b);
                    bezout_pair(pivot_row, other, s, tt, bq, aq, n);
                    let u = normalizing_unit(pivot_row[t], n);
                    row_scale(pivot_row, u, n);
                }
            }
            // Clear the row right of the pivot with column operations.
            let mut row_dirty = false;
            for j in t + 1..cols {
                let b = a[t][j];
                if b == 0 {
                    continue;
                }
                let p = a[t][t];
                if b.is_multiple_of(p) {
                    let q = b / p;
                    col_add(&mut a, j, t, n - q % n, n);
                    col_add(&mut v, j, t, n - q % n, n);
                    // inverse: row t of v_inv += q * row j
                    let src = v_inv[j].clone();
                    row_sub(&mut v_inv[t], &src, n - q % n, n);
                } else {
                    let (_, s, tt, bq, aq) = bezout_coeffs(p, b);
                    col_bezout(&mut a, t, j, s, tt, bq, aq, n);
                    col_bezout(&mut v, t, j, s, tt, bq, aq, n);
                    // E^{-1} rows (t, j): (a' row_t + b' row_j, tt row_t - s row_j)
                    let (rt, rj) = (v_inv[t].clone(), v_inv[j].clone());
                    for k in 0..cols {
                        let (x, y) = (rt[k] as i128, rj[k] as i128);
                        v_inv[t][k] = mod_reduce(aq * x + bq * y, n);
                        v_inv[j][k] = mod_reduce(tt * x - s * y, n);
                    }
                    row_dirty = true;
                }
            }
            let column_dirty = (t + 1..nrows).any(|i| a[i][t] != 0);
            if row_dirty || column_dirty {
                continue;
            }
            let p = a[t][t];
            let offender = (t + 1..nrows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(p)));
            match offender {
                Some(i) => {
                    let src = a[i].clone();
                    row_sub(&mut a[t], &src, n - 1, n);
                }
                None => break,
            }
        }
        let u = normalizing_unit(a[t][t], n);
        row_scale(&mut a[t], u, n);
        diagonal.push(a[t][t]);
        t += 1;
    }
    diagonal.resize(cols, n);
    SmithForm { diagonal, v, v_inv }
}

/// `col_dst += q * col_src` for every row.
fn col_add(m: &mut [Vec<u64>], dst: usize, src: usize, q: u64, n: u64) {
    for row in m.iter_mut() {
        row[dst] = (row[dst] + mul_mod(row[src], q, n)) % n;
    }
}

#[allow(clippy::too_many_arguments)]
fn col_bezout(m: &mut [Vec<u64>], i: usize, j: usize, s: i128, t: i128, bq: i128, aq: i128, n: u64) {
    for row in m.iter_mut() {
        let (x, y) = (row[i] as i128, row[j] as i128);
        row[i] = mod_reduce(s * x + t * y, n);
        row[j] = mod_reduce(bq * x - aq * y, n);
    }
}

/// A linear system `L(x) = b` with unknowns `x_u ∈ Z/g_u` and targets
/// `y_k ∈ Z/t_k`, every `g_u` and `t_k` dividing `n`.
///
/// Both sides are embedded into `Z/n` by the scalings `n/g_u` and `n/t_k`,
/// which are injective and order preserving on representatives, so the
/// lexicographically smallest embedded solution is the lexicographically
/// smallest solution.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    n: u64,
    unknown_orders: Vec<u64>,
    target_orders: Vec<u64>,
    /// Howell rows whose pivot lies in the target block.
    image_rows: Vec<Vec<u64>>,
    /// Howell rows living purely in the unknown block (the solution kernel).
    kernel_rows: Vec<Vec<u64>>,
}

impl LinearSystem {
    /// `images[u]` is `L(e_u)` in target coordinates.
    pub fn new(n: u64, unknown_orders: Vec<u64>, target_orders: Vec<u64>, images: &[Vec<u64>]) -> Self {
        assert_eq!(images.len(), unknown_orders.len());
        let t = target_orders.len();
        let cols = t + unknown_orders.len();
        let rows: Vec<Vec<u64>> = images
            .iter()
            .enumerate()
            .map(|(u, img)| {
                let mut row = vec![0u64; cols];
                for (k, (&y, &ord)) in img.iter().zip(&target_orders).enumerate() {
                    row[k] = mul_mod(y % ord, n / ord, n);
                }
                row[t + u] = (n / unknown_orders[u]) % n;
                row
            })
            .collect();
        let howell = howell_form(n, rows, cols);
        let (image_rows, kernel_rows): (Vec<_>, Vec<_>) =
            howell.into_iter().partition(|row| pivot_col(row).unwrap() < t);
        let kernel_rows = kernel_rows.into_iter().map(|r| r[t..].to_vec()).collect();
        LinearSystem {
            n,
            unknown_orders,
            target_orders,
            image_rows,
            kernel_rows,
        }
    }

    pub fn unknown_count(&self) -> usize {
        self.unknown_orders.len()
    }

    fn decode(&self, embedded: &[u64]) -> Vec<u64> {
        embedded
            .iter()
            .zip(&self.unknown_orders)
            .map(|(&x, &g)| x / (self.n / g))
            .collect()
    }

    /// Lexicographically smallest solution of `L(x) = rhs`, if any.
    pub fn solve(&self, rhs: &[u64]) -> Option<Vec<u64>> {
        let n = self.n;
        let t = self.target_orders.len();
        let mut v = vec![0u64; t + self.unknown_orders.len()];
        for (k, (&y, &ord)) in rhs.iter().zip(&self.target_orders).enumerate() {
            v[k] = mul_mod(y % ord, n / ord, n);
        }
        howell_reduce(n, &self.image_rows, &mut v);
        if v[..t].iter().any(|&x| x != 0) {
            return None;
        }
        let mut x: Vec<u64> = v[t..].iter().map(|&e| (n - e) % n).collect();
        howell_reduce(n, &self.kernel_rows, &mut x);
        Some(self.decode(&x))
    }

    /// Number of solutions of the homogeneous system.
    pub fn kernel_order(&self) -> u128 {
        howell_order(self.n, &self.kernel_rows)
    }

    /// Generators of the homogeneous solution module, one per Howell row,
    /// together with the additive order of each generator's coefficient.
    pub fn kernel_basis(&self) -> Vec<(Vec<u64>, u64)> {
        self.kernel_rows
            .iter()
            .map(|row| {
                let p = row[pivot_col(row).unwrap()];
                (self.decode(row), self.n / p)
            })
            .collect()
    }

    /// Order of the image `L(⊕ Z/g_u)` inside the target.
    pub fn image_order(&self) -> u128 {
        // |image| = |domain| / |kernel|
        let domain: u128 = self.unknown_orders.iter().map(|&g| g as u128).product();
        domain / self.kernel_order()
    }

    /// Every solution of `L(x) = rhs`, in no particular order.
    pub fn all_solutions(&self, rhs: &[u64]) -> Vec<Vec<u64>> {
        let Some(particular) = self.solve(rhs) else {
            return Vec::new();
        };
        let basis = self.kernel_basis();
        let mut out = Vec::new();
        let mut counters = vec![0u64; basis.len()];
        loop {
            let mut x = particular.clone();
            for ((gen, _), &c) in basis.iter().zip(&counters) {
                for ((xi, &gi), &ord) in x.iter_mut().zip(gen).zip(&self.unknown_orders) {
                    *xi = (*xi + c * gi) % ord;
                }
            }
            out.push(x);
            let mut k = 0;
            loop {
                if k == basis.len() {
                    return out;
                }
                counters[k] += 1;
                if counters[k] < basis[k].1 {
                    break;
                }
                counters[k] = 0;
                k += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_span(n: u64, rows: &[Vec<u64>], cols: usize) -> std::collections::BTreeSet<Vec<u64>> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0; cols]);
        loop {
            let mut grew = false;
            let current: Vec<_> = set.iter().cloned().collect();
            for v in &current {
                for r in rows {
                    let w: Vec<u64> = v.iter().zip(r).map(|(a, b)| (a + b) % n).collect();
                    grew |= set.insert(w);
                }
            }
            if !grew {
                return set;
            }
        }
    }

    #[test]
    fn normalizing_unit_hits_gcd() {
        for n in 2..40u64 {
            for a in 0..n {
                let u = normalizing_unit(a, n);
                assert_eq!(gcd(u, n), 1);
                if a != 0 {
                    assert_eq!(a * u % n, gcd(a, n));
                }
            }
        }
    }

    #[test]
    fn howell_property_on_small_example() {
        // Over Z/4, <(2, 1)> contains (0, 2) but no row starts at column 1 in
        // plain echelon form; Howell form must expose it.
        let h = howell_form(4, vec![vec![2, 1]], 2);
        assert_eq!(h.len(), 2);
        assert_eq!(pivot_col(&h[1]), Some(1));
        assert_eq!(howell_order(4, &h), 4);
    }

    #[test]
    fn howell_order_matches_brute_force() {
        let cases: Vec<(u64, Vec<Vec<u64>>)> = vec![
            (12, vec![vec![4, 6, 3], vec![6, 0, 8]]),
            (8, vec![vec![2, 4, 6], vec![4, 2, 0], vec![0, 6, 4]]),
            (9, vec![vec![3, 6], vec![6, 3]]),
            (6, vec![vec![2, 3, 1]]),
        ];
        for (n, rows) in cases {
            let cols = rows[0].len();
            let h = howell_form(n, rows.clone(), cols);
            let span = brute_span(n, &rows, cols);
            assert_eq!(howell_order(n, &h), span.len() as u128);
            for v in &span {
                let mut w = v.clone();
                howell_reduce(n, &h, &mut w);
                assert!(w.iter().all(|&x| x == 0), "{v:?} not reduced");
            }
        }
    }

    #[test]
    fn smith_form_of_two_by_two_over_z4() {
        // rows {(2, 2)} over Z/4 present Z/2 ⊕ Z/4.
        let s = smith_form(4, &[vec![2, 2]], 2);
        assert_eq!(s.diagonal, vec![2, 4]);
    }

    #[test]
    fn smith_transform_is_invertible() {
        let rows = vec![vec![4, 6, 3], vec![6, 0, 8], vec![2, 2, 2]];
        let s = smith_form(12, &rows, 3);
        for i in 0..3 {
            for j in 0..3 {
                let x: u64 = (0..3).map(|k| s.v[i][k] * s.v_inv[k][j]).sum::<u64>() % 12;
                assert_eq!(x, u64::from(i == j));
            }
        }
        for w in s.diagonal.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn linear_system_lexmin() {
        // x0 + x1 = 1 over Z/4 with x0, x1 ∈ Z/4: smallest solution (0, 1).
        let sys = LinearSystem::new(4, vec![4, 4], vec![4], &[vec![1], vec![1]]);
        assert_eq!(sys.solve(&[1]), Some(vec![0, 1]));
        assert_eq!(sys.kernel_order(), 4);
        assert_eq!(sys.all_solutions(&[1]).len(), 4);
        // 2x = 1 has no solution.
        let sys = LinearSystem::new(4, vec![4], vec![4], &[vec![2]]);
        assert_eq!(sys.solve(&[1]), None);
    }
}
