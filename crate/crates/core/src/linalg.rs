//! Dense linear algebra over a finite field.

use crate::field::{Fq, FqElem};

/// Reduced row echelon form; `pivots[r]` is the pivot column of row `r`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<FqElem>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Row reduction with pivots searched left to right.
pub fn rref(f: &Fq, mut m: Vec<Vec<FqElem>>, ncols: usize) -> Rref {
    for row in m.iter_mut() {
        row.resize(ncols, FqElem::ZERO);
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let k = f.neg(row[c]);
                f.axpy(row, k, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Rref { rows: m, pivots }
}

/// Basis of `{x : M x = 0}` for an `nrows x ncols` matrix.
pub fn kernel(f: &Fq, m: &[Vec<FqElem>], ncols: usize) -> Vec<Vec<FqElem>> {
    let r = rref(f, m.to_vec(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !r.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![FqElem::ZERO; ncols];
            x[fc] = FqElem::ONE;
            for (row, &pc) in r.rows.iter().zip(&r.pivots) {
                x[pc] = f.neg(row[fc]);
            }
            x
        })
        .collect()
}

/// Some solution of `M x = b`, if one exists.
pub fn solve(f: &Fq, m: &[Vec<FqElem>], b: &[FqElem], ncols: usize) -> Option<Vec<FqElem>> {
    let aug: Vec<Vec<FqElem>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.resize(ncols, FqElem::ZERO);
            r.push(*bi);
            r
        })
        .collect();
    let r = rref(f, aug, ncols + 1);
    if r.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![FqElem::ZERO; ncols];
    for (row, &pc) in r.rows.iter().zip(&r.pivots) {
        x[pc] = row[ncols];
    }
    Some(x)
}

/// Echelon basis of the row span with pairwise distinct *last* nonzero
/// positions, each normalized to have last nonzero entry 1, sorted by that
/// position.
pub fn top_echelon(f: &Fq, vecs: Vec<Vec<FqElem>>, n: usize) -> Vec<Vec<FqElem>> {
    let rev: Vec<Vec<FqElem>> = vecs
        .into_iter()
        .map(|mut v| {
            v.resize(n, FqElem::ZERO);
            v.reverse();
            v
        })
        .collect();
    let r = rref(f, rev, n);
    let mut out: Vec<Vec<FqElem>> = r
        .rows
        .into_iter()
        .map(|mut v| {
            v.reverse();
            v
        })
        .collect();
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_solve() {
        let f = Fq::new(3, 1).unwrap();
        let e = |k| f.from_int(k);
        let m = vec![vec![e(1), e(1), e(0)], vec![e(0), e(1), e(1)]];
        let k = kernel(&f, &m, 3);
        assert_eq!(k.len(), 1);
        for row in &m {
            let s = row.iter().zip(&k[0]).fold(FqElem::ZERO, |acc, (a, b)| f.add(acc, f.mul(*a, *b)));
            assert!(s.is_zero());
        }
        let x = solve(&f, &m, &[e(1), e(2)], 3).unwrap();
        assert_eq!(f.add(x[0], x[1]), e(1));
        assert_eq!(f.add(x[1], x[2]), e(2));
        assert!(solve(&f, &[vec![e(0)]], &[e(1)], 1).is_none());
    }

    #[test]
    fn top_echelon_distinct_tops() {
        let f = Fq::new(2, 1).unwrap();
        let e = |k| f.from_int(k);
        let v = vec![vec![e(1), e(1), e(1)], vec![e(1), e(0), e(1)], vec![e(0), e(1), e(0)]];
        let b = top_echelon(&f, v, 3);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0], vec![e(0), e(1), e(0)]);
        assert_eq!(b[1][2], e(1));
    }
}
