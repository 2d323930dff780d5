//! Exact Gaussian elimination over `F_q`, shared by the local-multiplicity
//! oracle and the density rank tests.

use crate::ffield::{FieldCtx, Fq};

/// Row-reduce in place; returns the rank. Rows may have differing logical
/// width but must all have length `ncols`.
pub fn rank(ctx: &FieldCtx, rows: &mut Vec<Vec<Fq>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = ctx.inv(rows[rank][col]).expect("pivot nonzero");
        for j in col..ncols {
            rows[rank][j] = ctx.mul(rows[rank][j], inv);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col];
            for j in col..ncols {
                let t = ctx.mul(factor, rows[rank][j]);
                rows[r][j] = ctx.sub(rows[r][j], t);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Incremental rank tracker: feed rows one at a time, keeping only the
/// reduced pivot rows. Cheap when the column count is small.
pub struct RankTracker<'a> {
    ctx: &'a FieldCtx,
    ncols: usize,
    /// reduced rows, each with a recorded pivot column
    rows: Vec<(usize, Vec<Fq>)>,
}

impl<'a> RankTracker<'a> {
    pub fn new(ctx: &'a FieldCtx, ncols: usize) -> Self {
        RankTracker { ctx, ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Returns true if the row increased the rank.
    pub fn add_row(&mut self, mut row: Vec<Fq>) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        for (piv, r) in &self.rows {
            if row[*piv].is_zero() {
                continue;
            }
            let factor = row[*piv];
            for j in 0..self.ncols {
                let t = self.ctx.mul(factor, r[j]);
                row[j] = self.ctx.sub(row[j], t);
            }
        }
        let Some(piv) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = self.ctx.inv(row[piv]).expect("pivot nonzero");
        for c in row.iter_mut() {
            *c = self.ctx.mul(*c, inv);
        }
        self.rows.push((piv, row));
        true
    }

    /// True iff the row lies in the current row space.
    pub fn contains(&self, row: &[Fq]) -> bool {
        let mut row = row.to_vec();
        for (piv, r) in &self.rows {
            if row[*piv].is_zero() {
                continue;
            }
            let factor = row[*piv];
            for j in 0..self.ncols {
                let t = self.ctx.mul(factor, r[j]);
                row[j] = self.ctx.sub(row[j], t);
            }
        }
        row.iter().all(|c| c.is_zero())
    }
}

/// Basis of the right nullspace of the matrix (rows x ncols).
pub fn nullspace(ctx: &FieldCtx, rows: &[Vec<Fq>], ncols: usize) -> Vec<Vec<Fq>> {
    let mut mat: Vec<Vec<Fq>> = rows.to_vec();
    let _ = rank(ctx, &mut mat, ncols);
    // locate pivot columns in the reduced matrix
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r < mat.len() && !mat[r][c].is_zero() {
            pivot_of_col[c] = Some(r);
            pivots.push(c);
            r += 1;
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Fq::default(); ncols];
        v[free] = ctx.one();
        for &pc in &pivots {
            let r = pivot_of_col[pc].unwrap();
            v[pc] = ctx.neg(mat[r][free]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn rank_and_nullspace() {
        let ctx = make_field(5, 1).unwrap();
        let e = |v: i64| ctx.from_i64(v);
        let rows = vec![
            vec![e(1), e(2), e(3)],
            vec![e(2), e(4), e(6)],
            vec![e(0), e(1), e(1)],
        ];
        let mut m = rows.clone();
        assert_eq!(rank(&ctx, &mut m, 3), 2);
        let ns = nullspace(&ctx, &rows, 3);
        assert_eq!(ns.len(), 1);
        // check the kernel vector
        for row in &rows {
            let mut acc = ctx.zero();
            for (a, b) in row.iter().zip(ns[0].iter()) {
                acc = ctx.add(acc, ctx.mul(*a, *b));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn tracker_matches_batch_rank() {
        let ctx = make_field(7, 1).unwrap();
        let e = |v: i64| ctx.from_i64(v);
        let rows = vec![
            vec![e(1), e(0), e(2)],
            vec![e(0), e(3), e(1)],
            vec![e(1), e(3), e(3)],
            vec![e(5), e(1), e(0)],
        ];
        let mut t = RankTracker::new(&ctx, 3);
        for r in &rows {
            t.add_row(r.clone());
        }
        let mut m = rows.clone();
        assert_eq!(t.rank(), rank(&ctx, &mut m, 3));
        assert!(t.contains(&[e(1), e(3), e(3)])); // row0 + row1
    }
}
