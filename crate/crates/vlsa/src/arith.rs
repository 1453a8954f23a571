//! Exact rational scalars and sparse linear algebra over Q.
//!
//! Everything downstream (brackets, prolongations, singular-vector systems)
//! reduces to `nullspace` / `rank` / `solve` on sparse rational matrices.
//! Elimination is fraction-free: rows are cleared to integers and updated by
//! cross-multiplication with content stripping, so no rational gcd churn
//! happens mid-elimination; kernel vectors are recovered rationally at the end.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p", "-p", "p/q" into an exact rational.
pub fn rat_parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Render as "p" or "p/q" (canonical reduced form, denominator positive).
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sparse rational matrix; absent entries are zero.
#[derive(Debug, Clone, Default)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rat) {
        if v.is_zero() {
            return;
        }
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        let e = self.entries.entry((r, c)).or_insert_with(Rat::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Append a new row given as sparse (col, value) pairs.
    pub fn push_row(&mut self, row: &[(usize, Rat)]) {
        let r = self.rows;
        self.rows += 1;
        for (c, v) in row {
            if !v.is_zero() {
                assert!(*c < self.cols);
                self.entries.insert((r, *c), v.clone());
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn int_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut rows: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); self.rows];
        for ((r, c), v) in &self.entries {
            rows[*r].push((*c, v.clone()));
        }
        rows.iter()
            .map(|row| {
                if row.is_empty() {
                    return Vec::new();
                }
                let mut lcm = BigInt::one();
                for (_, v) in row {
                    lcm = num::integer::lcm(lcm, v.denom().clone());
                }
                let mut out: Vec<(usize, BigInt)> = row
                    .iter()
                    .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
                    .collect();
                strip_content(&mut out);
                out
            })
            .collect()
    }
}

fn strip_content(row: &mut Vec<(usize, BigInt)>) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = num::integer::gcd(g, v.clone());
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v = &*v / &g;
    }
}

/// Sparse merge r1*a - r2*b with content stripping.
fn row_combine(
    a: &[(usize, BigInt)],
    fa: &BigInt,
    b: &[(usize, BigInt)],
    fb: &BigInt,
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push((a[i].0, &a[i].1 * fa));
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, -(&b[j].1 * fb)));
            j += 1;
        } else {
            let v = &a[i].1 * fa - &b[j].1 * fb;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    let mut out = out;
    strip_content(&mut out);
    out
}

struct Echelon {
    /// Pivot rows in elimination order, paired with their pivot column.
    rows: Vec<(usize, Vec<(usize, BigInt)>)>,
    pivot_cols: Vec<usize>,
    cols: usize,
}

/// Forward elimination. Column order is input order; within a column the pivot
/// is the smallest-magnitude nonzero entry, lowest original row index breaking
/// ties, so the reduction (and everything built on it) is deterministic.
fn eliminate(mat: &RatMatrix) -> Echelon {
    let mut active: Vec<(usize, Vec<(usize, BigInt)>)> = mat
        .int_rows()
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .collect();
    let mut pivots: Vec<(usize, Vec<(usize, BigInt)>)> = Vec::new();
    let mut pivot_cols = Vec::new();

    for col in 0..mat.cols {
        // Rows still active all have leading column >= col.
        let mut best: Option<(usize, &BigInt)> = None;
        for (k, (_idx, row)) in active.iter().enumerate() {
            if let Some((c0, v0)) = row.first() {
                if *c0 == col {
                    let better = match best {
                        None => true,
                        Some((_, bv)) => v0.abs() < bv.abs(),
                    };
                    if better {
                        best = Some((k, v0));
                    }
                }
            }
        }
        let Some((k, _)) = best else { continue };
        let (_, prow) = active.remove(k);
        let pval = prow[0].1.clone();
        for (_, row) in active.iter_mut() {
            if let Some((c0, v0)) = row.first() {
                if *c0 == col {
                    let v0 = v0.clone();
                    *row = row_combine(&prow, &v0, row, &pval).into_iter().collect();
                    // row_combine computed prow*v0 - row*pval; negate to keep orientation stable
                    for (_, v) in row.iter_mut() {
                        *v = -&*v;
                    }
                }
            }
        }
        active.retain(|(_, r)| !r.is_empty());
        pivot_cols.push(col);
        pivots.push((col, prow));
    }
    Echelon {
        rows: pivots,
        pivot_cols,
        cols: mat.cols,
    }
}

/// Row rank, computed exactly.
pub fn rank(mat: &RatMatrix) -> usize {
    eliminate(mat).pivot_cols.len()
}

/// Basis of {v : M v = 0}. Each basis vector is normalized so that its first
/// nonzero coordinate is 1; the basis order follows free-column order.
pub fn nullspace(mat: &RatMatrix) -> Vec<Vec<Rat>> {
    let ech = eliminate(mat);
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; mat.cols];
        for c in &ech.pivot_cols {
            v[*c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..mat.cols {
        if pivot_set[free] {
            continue;
        }
        let mut x: Vec<Rat> = vec![Rat::zero(); mat.cols];
        x[free] = Rat::one();
        // Echelon rows have strictly increasing pivot columns; solve bottom-up.
        for (pc, row) in ech.rows.iter().rev() {
            let mut acc = Rat::zero();
            let mut pv = BigInt::zero();
            for (c, v) in row {
                if c == pc {
                    pv = v.clone();
                } else if !x[*c].is_zero() {
                    acc += Rat::from_integer(v.clone()) * &x[*c];
                }
            }
            if !acc.is_zero() {
                x[*pc] = -acc / Rat::from_integer(pv);
            }
        }
        if let Some(first) = x.iter().position(|v| !v.is_zero()) {
            let lead = x[first].clone();
            for v in x.iter_mut() {
                *v /= lead.clone();
            }
        }
        basis.push(x);
    }
    basis
}

/// Particular solution of M x = b with all free variables set to zero, or None
/// if the system is inconsistent.
pub fn solve(mat: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(b.len(), mat.rows);
    let mut aug = RatMatrix::new(mat.rows, mat.cols + 1);
    for ((r, c), v) in &mat.entries {
        aug.set(*r, *c, v.clone());
    }
    for (r, v) in b.iter().enumerate() {
        aug.set(r, mat.cols, v.clone());
    }
    let ech = eliminate(&aug);
    if ech.pivot_cols.contains(&mat.cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![Rat::zero(); mat.cols + 1];
    x[mat.cols] = -Rat::one(); // move b to the other side: [A | b] (x, -1) = 0
    for (pc, row) in ech.rows.iter().rev() {
        let mut acc = Rat::zero();
        let mut pv = BigInt::zero();
        for (c, v) in row {
            if c == pc {
                pv = v.clone();
            } else if !x[*c].is_zero() {
                acc += Rat::from_integer(v.clone()) * &x[*c];
            }
        }
        x[*pc] = if acc.is_zero() {
            Rat::zero()
        } else {
            -acc / Rat::from_integer(pv)
        };
    }
    x.truncate(mat.cols);
    Some(x)
}

/// Apply M to a dense vector.
pub fn mat_vec(mat: &RatMatrix, x: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); mat.rows];
    for ((r, c), v) in &mat.entries {
        if !x[*c].is_zero() {
            out[*r] += v * &x[*c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, data: &[(usize, usize, i64)]) -> RatMatrix {
        let mut mat = RatMatrix::new(rows, cols);
        for (r, c, v) in data {
            mat.set(*r, *c, rat_i(*v));
        }
        mat
    }

    /// Independent oracle: plain rational Gauss-Jordan, no sharing with the
    /// fraction-free path.
    fn rref_rank_oracle(mat: &RatMatrix) -> usize {
        let mut a: Vec<Vec<Rat>> = (0..mat.rows)
            .map(|r| (0..mat.cols).map(|c| mat.get(r, c)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..mat.cols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pv = a[rank][col].clone();
            for v in a[rank].iter_mut() {
                *v /= pv.clone();
            }
            for r in 0..a.len() {
                if r != rank && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..mat.cols {
                        let t = &a[rank][c] * &f;
                        a[r][c] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let mat = m(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        assert!(nullspace(&mat).is_empty());
        assert_eq!(rank(&mat), 2);
    }

    #[test]
    fn zero_matrix_gives_standard_basis() {
        let mat = m(2, 3, &[]);
        let ns = nullspace(&mat);
        assert_eq!(ns.len(), 3);
        for (i, v) in ns.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { rat_i(1) } else { rat_i(0) });
            }
        }
        assert_eq!(rank(&mat), 0);
    }

    #[test]
    fn rank_one_two_by_two() {
        // [[1,2],[2,4]]: kernel (1, -1/2) after leading-one normalization.
        let mat = m(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        assert_eq!(rank(&mat), 1);
        assert_eq!(rref_rank_oracle(&mat), 1);
        let ns = nullspace(&mat);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0][0], rat_i(1));
        assert_eq!(ns[0][1], rat_frac(-1, 2));
        // substitution oracle
        for y in mat_vec(&mat, &ns[0]) {
            assert!(y.is_zero());
        }
    }

    #[test]
    fn rank_plus_nullity_and_exactness_on_pseudorandom_matrices() {
        // Deterministic LCG so the test is reproducible without extra deps.
        let mut state: u64 = 0x9E3779B97F4A7C15;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for trial in 0..40 {
            let rows = 1 + (next() % 7) as usize;
            let cols = 1 + (next() % 7) as usize;
            let mut mat = RatMatrix::new(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if next() % 3 != 0 {
                        let num = (next() % 11) as i64 - 5;
                        let den = 1 + (next() % 4) as i64;
                        mat.set(r, c, rat_frac(num, den));
                    }
                }
            }
            let rk = rank(&mat);
            assert_eq!(rk, rref_rank_oracle(&mat), "trial {trial}");
            let ns = nullspace(&mat);
            assert_eq!(rk + ns.len(), cols, "trial {trial}");
            for v in &ns {
                for y in mat_vec(&mat, v) {
                    assert!(y.is_zero(), "trial {trial}");
                }
            }
            // determinism: rerun bitwise identical
            let ns2 = nullspace(&mat);
            assert_eq!(ns, ns2);
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let mat = m(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        let sol = solve(&mat, &[rat_i(3), rat_i(6)]).unwrap();
        let y = mat_vec(&mat, &sol);
        assert_eq!(y, vec![rat_i(3), rat_i(6)]);
        assert!(solve(&mat, &[rat_i(3), rat_i(7)]).is_none());
    }

    #[test]
    fn rational_parse_roundtrip() {
        for s in ["3", "-4", "1/2", "-7/3", "0"] {
            let r = rat_parse(s).unwrap();
            assert_eq!(rat_str(&r), s);
        }
        assert!(rat_parse("1/0").is_none());
    }
}
