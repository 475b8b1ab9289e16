//! Linear algebra over the chain ring `Z/p^M`.
//!
//! Submodules of `(Z/p^M)^k` are compared through their Howell normal form,
//! which is canonical: two row spans are equal iff their Howell bases are
//! identical. Because `Z/p^M` is local, every nonzero entry is `p^v·u` with `u`
//! a unit, so pivots can always be normalized to a power of `p`.

use crate::error::{Error, Result};
use crate::layer::LayerElement;
use crate::padic::{valuation_of, PadicContext, PadicScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZModMatrix {
    ctx: PadicContext,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ZModMatrix {
    pub fn zeros(ctx: PadicContext, rows: usize, cols: usize) -> Self {
        Self {
            ctx,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_rows(ctx: PadicContext, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            entries.extend(r.iter().map(|&v| v % ctx.modulus()));
        }
        Ok(Self {
            ctx,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_signed_rows(ctx: PadicContext, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| ctx.from_i64(v).value()).collect())
            .collect();
        Self::from_rows(ctx, cols, &rows)
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> PadicScalar {
        self.ctx.from_u64(self.entries[r * self.cols + c])
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// A matrix in Howell normal form. Rows are echelon-ordered, every pivot is
/// `p^v` with `v < M`, entries above a pivot `p^v` lie in `[0, p^v)`, and the
/// span has the Howell property: any span element vanishing on the first `j`
/// columns is a combination of the rows whose pivot column is `≥ j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HowellBasis {
    ctx: PadicContext,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<(usize, u32)>,
}

impl HowellBasis {
    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// `(column, valuation)` of each pivot, in row order.
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `log_p` of the number of elements in the span.
    pub fn log_size(&self) -> u32 {
        let m = self.ctx.precision();
        self.pivots.iter().map(|&(_, v)| m - v).sum()
    }

    pub fn as_matrix(&self) -> ZModMatrix {
        ZModMatrix::from_rows(self.ctx, self.cols, &self.rows).expect("rows have basis width")
    }

    /// Decides `v ∈ span` by successive pivot elimination.
    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let ctx = self.ctx;
        let mut work: Vec<u64> = v.iter().map(|&x| x % ctx.modulus()).collect();
        let mut next_col = 0;
        for (row, &(col, val)) in self.rows.iter().zip(&self.pivots) {
            if work[next_col..col].iter().any(|&x| x != 0) {
                return Ok(false);
            }
            let entry = work[col];
            if valuation_of(entry, &ctx) < val {
                return Ok(false);
            }
            let q = ctx.from_u64(entry).div_p_power(val);
            sub_scaled(&ctx, &mut work, row, q);
            debug_assert_eq!(work[col], 0);
            next_col = col + 1;
        }
        Ok(work.iter().all(|&x| x == 0))
    }
}

/// `target -= q·row`, entrywise mod `p^M`.
fn sub_scaled(ctx: &PadicContext, target: &mut [u64], row: &[u64], q: PadicScalar) {
    if q.is_zero() {
        return;
    }
    let m = ctx.modulus() as u128;
    for (t, &r) in target.iter_mut().zip(row) {
        let s = (q.value() as u128 * r as u128) % m;
        *t = ((*t as u128 + m - s) % m) as u64;
    }
}

fn scale_row(ctx: &PadicContext, row: &[u64], q: PadicScalar) -> Vec<u64> {
    row.iter()
        .map(|&r| ctx.reduce_u128(q.value() as u128 * r as u128))
        .collect()
}

/// Howell normal form of the row span of `m`.
pub fn howell(m: &ZModMatrix) -> HowellBasis {
    howell_from_rows(m.ctx, m.cols, m.row_vecs())
}

pub(crate) fn howell_from_rows(ctx: PadicContext, cols: usize, rows: Vec<Vec<u64>>) -> HowellBasis {
    let mut pending: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<(usize, u32)> = Vec::new();

    for col in 0..cols {
        // Pivot: the pending row with minimal valuation in this column.
        let best = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .min_by_key(|(_, r)| valuation_of(r[col], &ctx))
            .map(|(i, _)| i);
        let Some(idx) = best else { continue };
        let mut pivot = pending.swap_remove(idx);
        let v = valuation_of(pivot[col], &ctx);
        // Normalize the pivot entry to exactly p^v.
        let unit = ctx.from_u64(pivot[col]).div_p_power(v);
        let unit_inv = unit.inv_unit().expect("quotient by p^v is a unit");
        pivot = scale_row(&ctx, &pivot, unit_inv);
        debug_assert_eq!(pivot[col], ctx.p_power(v).value());

        for r in pending.iter_mut() {
            if r[col] != 0 {
                let q = ctx.from_u64(r[col]).div_p_power(v);
                sub_scaled(&ctx, r, &pivot, q);
            }
        }
        // p^{M-v}·pivot vanishes in this column but may carry information
        // further right; it must stay in the pending set.
        if v > 0 {
            let sat = scale_row(&ctx, &pivot, ctx.p_power(ctx.precision() - v));
            pending.push(sat);
        }
        pending.retain(|r| r.iter().any(|&x| x != 0));
        basis.push(pivot);
        pivots.push((col, v));
    }
    debug_assert!(pending.is_empty());

    // Reduce entries above each pivot into [0, p^v).
    for i in 0..basis.len() {
        let (col, v) = pivots[i];
        let pv = ctx.p().pow(v);
        let pivot_row = basis[i].clone();
        for upper in basis.iter_mut().take(i) {
            let q = upper[col] / pv;
            if q != 0 {
                sub_scaled(&ctx, upper, &pivot_row, ctx.from_u64(q));
            }
        }
    }

    HowellBasis {
        ctx,
        cols,
        rows: basis,
        pivots,
    }
}

/// All `k×k` minors of a matrix over `Λ_n^{(M)}`, by cofactor expansion.
/// Ordered lexicographically by (row subset, column subset).
pub fn minors(m: &[Vec<LayerElement>], k: usize) -> Result<Vec<LayerElement>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if k == 0 || k > rows.min(cols) {
        return Err(Error::SizeTooLarge { k, rows, cols });
    }
    if let Some(bad) = m.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            got: bad.len(),
        });
    }
    let first = &m[0][0];
    for e in m.iter().flatten() {
        if e.ctx() != first.ctx() {
            return Err(Error::ContextMismatch);
        }
        if e.layer() != first.layer() {
            return Err(Error::LayerMismatch(first.layer(), e.layer()));
        }
    }
    let row_sets = subsets(rows, k);
    let col_sets = subsets(cols, k);
    let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
    for rs in &row_sets {
        for cs in &col_sets {
            let sub: Vec<Vec<&LayerElement>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| &m[r][c]).collect())
                .collect();
            out.push(cofactor_det(&sub));
        }
    }
    Ok(out)
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<&LayerElement>]) -> LayerElement {
    let size = m.len();
    match size {
        1 => m[0][0].clone(),
        2 => &(m[0][0] * m[1][1]) - &(m[0][1] * m[1][0]),
        _ => {
            let mut acc = LayerElement::zero(m[0][0].ctx(), m[0][0].layer());
            for j in 0..size {
                if m[0][j].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<&LayerElement>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, e)| *e)
                            .collect()
                    })
                    .collect();
                let term = m[0][j] * &cofactor_det(&sub);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ctx(p: u64, m: u32) -> PadicContext {
        PadicContext::new(p, m).unwrap()
    }

    /// Every Z/p^M-combination of the rows, by closure under addition.
    fn enumerate_span(ctx: PadicContext, cols: usize, rows: &[Vec<u64>]) -> HashSet<Vec<u64>> {
        let m = ctx.modulus();
        let mut span: HashSet<Vec<u64>> = HashSet::new();
        span.insert(vec![0; cols]);
        let mut frontier = vec![vec![0; cols]];
        while let Some(v) = frontier.pop() {
            for r in rows {
                let w: Vec<u64> = v.iter().zip(r).map(|(a, b)| (a + b) % m).collect();
                if span.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        span
    }

    #[test]
    fn howell_examples() {
        let c9 = ctx(3, 2);
        let zero = ZModMatrix::from_rows(c9, 2, &[vec![0, 0]]).unwrap();
        assert!(howell(&zero).is_empty());
        let dup = ZModMatrix::from_rows(c9, 1, &[vec![3], vec![3]]).unwrap();
        assert_eq!(howell(&dup).rows(), &[vec![3]]);
    }

    #[test]
    fn howell_saturation_row_appears() {
        // Over Z/9 the row (3, 1) forces (0, 3) = 3·(3, 1) into the basis.
        let c = ctx(3, 2);
        let m = ZModMatrix::from_rows(c, 2, &[vec![3, 1]]).unwrap();
        let h = howell(&m);
        assert_eq!(h.rows(), &[vec![3, 1], vec![0, 3]]);
        assert!(h.contains(&[3, 4]).unwrap());
        assert!(h.contains(&[0, 0]).unwrap());
        assert!(!h.contains(&[0, 1]).unwrap());
        assert!(h.contains(&[0, 1, 2]).is_err());
    }

    #[test]
    fn field_case_is_rref() {
        let c = ctx(3, 1);
        let m = ZModMatrix::from_rows(c, 3, &[vec![2, 1, 0], vec![1, 2, 1], vec![0, 0, 1]]).unwrap();
        let h = howell(&m);
        // Row space is spanned by (1,2,0) and (0,0,1).
        assert_eq!(h.rows(), &[vec![1, 2, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn minors_examples() {
        let c = ctx(3, 2);
        let g = LayerElement::from_coeffs(c, 1, &[1, 2, 0]).unwrap();
        let h = LayerElement::from_coeffs(c, 1, &[0, 3, 1]).unwrap();
        let z = LayerElement::zero(c, 1);
        let diag = vec![vec![g.clone(), z.clone()], vec![z.clone(), h.clone()]];
        assert_eq!(minors(&diag, 2).unwrap(), vec![&g * &h]);
        let row = vec![vec![g.clone(), h.clone()]];
        assert_eq!(minors(&row, 1).unwrap(), vec![g.clone(), h.clone()]);
        assert!(matches!(minors(&row, 2), Err(Error::SizeTooLarge { .. })));
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(
            subsets(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<u64>>)> {
        (1usize..=3, 1usize..=4).prop_flat_map(|(cols, rows)| {
            (
                Just(cols),
                prop::collection::vec(prop::collection::vec(0u64..9, cols), rows),
            )
        })
    }

    proptest! {
        #[test]
        fn membership_matches_enumeration((cols, rows) in small_matrix()) {
            let c = ctx(3, 2);
            let h = howell(&ZModMatrix::from_rows(c, cols, &rows).unwrap());
            let span = enumerate_span(c, cols, &rows);
            prop_assert_eq!(span.len() as u64, 3u64.pow(h.log_size()));
            // Walk all of (Z/9)^cols.
            let total = 9usize.pow(cols as u32);
            for idx in 0..total {
                let mut v = vec![0u64; cols];
                let mut t = idx;
                for slot in v.iter_mut() {
                    *slot = (t % 9) as u64;
                    t /= 9;
                }
                prop_assert_eq!(h.contains(&v).unwrap(), span.contains(&v));
            }
        }

        #[test]
        fn howell_is_canonical_and_idempotent(
            (cols, mut rows) in small_matrix(),
            seed in any::<u64>(),
        ) {
            let c = ctx(3, 2);
            let h = howell(&ZModMatrix::from_rows(c, cols, &rows).unwrap());
            prop_assert_eq!(howell(&h.as_matrix()), h.clone());
            // Shuffle rows deterministically from the seed.
            let len = rows.len();
            let mut s = seed;
            for i in (1..len).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                rows.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(howell(&ZModMatrix::from_rows(c, cols, &rows).unwrap()), h);
        }
    }
}
