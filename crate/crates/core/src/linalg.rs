//! Gauss-Jordan elimination over expressions in the parameters.
//!
//! Parameters are generic: any entry that is not identically zero is taken
//! to be invertible.

use lagsym_expr::{zero_test, Expr, Node};

pub(crate) fn is_zero_entry(e: &Expr, seed: u64) -> bool {
    e.is_zero() || (!e.is_laurent_polynomial() && zero_test(e, seed).is_zero())
}

/// 0: rational constant, 1: single Laurent monomial, 2: anything else.
fn pivot_class(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(_) => 0,
        Node::Add(_) => 2,
        _ if e.is_laurent_polynomial() => 1,
        _ => 2,
    }
}

pub(crate) struct Echelon {
    pub rows: Vec<Vec<Expr>>,
    /// (row, column) of each pivot, in column order.
    pub pivots: Vec<(usize, usize)>,
}

/// Reduces the first `ncols` columns of `rows`. Constant and monomial pivots
/// are normalized to 1; general pivots eliminate fraction-free.
pub(crate) fn reduce(mut rows: Vec<Vec<Expr>>, ncols: usize, seed: u64) -> Echelon {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let best = (rank..rows.len())
            .filter(|&r| !is_zero_entry(&rows[r][c], seed))
            .min_by_key(|&r| (pivot_class(&rows[r][c]), rows[r][c].size()));
        let Some(best) = best else { continue };
        rows.swap(rank, best);
        let mut p = rows[rank][c].clone();
        if pivot_class(&p) <= 1 && !p.is_one() {
            let inv = p.recip();
            for v in rows[rank].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            p = Expr::one();
        }
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[c].is_zero() {
                continue;
            }
            let e = row[c].clone();
            for (j, v) in row.iter_mut().enumerate() {
                if j == c {
                    *v = Expr::zero();
                } else if !prow[j].is_zero() || !p.is_one() {
                    *v = if p.is_one() { &*v - &e * &prow[j] } else { &p * &*v - &e * &prow[j] };
                }
            }
        }
        pivots.push((rank, c));
        rank += 1;
    }
    Echelon { rows, pivots }
}

/// Null space basis: one vector per free column `f`, with entry 1 at `f`,
/// 0 at the other free columns.
pub(crate) fn null_space(ech: &Echelon, ncols: usize) -> Vec<(usize, Vec<Expr>)> {
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    (0..ncols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|f| {
            let mut v = vec![Expr::zero(); ncols];
            v[f] = Expr::one();
            for &(r, c) in &ech.pivots {
                let entry = &ech.rows[r][f];
                if !entry.is_zero() {
                    v[c] = -(entry / &ech.rows[r][c]);
                }
            }
            (f, v)
        })
        .collect()
}

pub(crate) fn rank(rows: Vec<Vec<Expr>>, ncols: usize, seed: u64) -> usize {
    reduce(rows, ncols, seed).pivots.len()
}

/// Solves the square system `a z = b`; `None` when `a` is singular.
pub(crate) fn solve(a: &[Vec<Expr>], b: &[Expr], seed: u64) -> Option<Vec<Expr>> {
    let n = a.len();
    let rows: Vec<Vec<Expr>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    let ech = reduce(rows, n, seed);
    if ech.pivots.len() < n {
        return None;
    }
    let mut z = vec![Expr::zero(); n];
    for &(r, c) in &ech.pivots {
        z[c] = &ech.rows[r][n] / &ech.rows[r][c];
    }
    Some(z)
}
