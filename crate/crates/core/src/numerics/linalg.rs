//! Exact linear algebra over the rationals.

use num_traits::{One, Zero};

use num_bigint::BigInt;

use super::rational::{primitive_integer_vector, Q};
use crate::par::{for_each_mut, map_slice, Exec};

/// Bring `m` to reduced row echelon form in place and return the pivot
/// columns. Row eliminations for a fixed pivot run under `exec`.
///
/// `prefer` gives the column order in which pivots are searched; columns
/// listed first become pivots whenever possible.
pub fn rref_ordered(m: &mut Vec<Vec<Q>>, prefer: &[usize], exec: Exec) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for &col in prefer {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for_each_mut(exec, m, |r, target| {
            if r == row || target[col].is_zero() {
                return;
            }
            let f = target[col].clone();
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t -= &f * p;
                }
            }
        });
        pivots.push(col);
        row += 1;
    }
    m.truncate(row.max(0));
    pivots
}

pub fn rref(m: &mut Vec<Vec<Q>>, ncols: usize, exec: Exec) -> Vec<usize> {
    let order: Vec<usize> = (0..ncols).collect();
    rref_ordered(m, &order, exec)
}

/// Basis of `{x : m x = 0}`, one vector per free column: the vector with
/// a 1 in that free column and 0 in the others.
///
/// Rows are cleared to integers and eliminated fraction-free (Bareiss), so
/// intermediate entries stay bounded by minors of `m`.
pub fn nullspace(m: &[Vec<Q>], ncols: usize, exec: Exec) -> Vec<Vec<Q>> {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| primitive_integer_vector(r))
        .collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..ncols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let (head, tail) = a.split_at_mut(row + 1);
        let pr = &head[row];
        let pv = &pr[col];
        for_each_mut(exec, tail, |_, target| {
            let f = std::mem::take(&mut target[col]);
            for j in col + 1..ncols {
                let t = pv * &target[j] - &f * &pr[j];
                target[j] = t / &prev;
            }
        });
        prev = a[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    map_slice(exec, &free, |&f| {
        let mut v = vec![Q::zero(); ncols];
        v[f] = Q::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let s: Q = (pc + 1..ncols)
                .filter(|&j| !v[j].is_zero() && !a[k][j].is_zero())
                .map(|j| &v[j] * Q::from_integer(a[k][j].clone()))
                .sum();
            v[pc] = -s / Q::from_integer(a[k][pc].clone());
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::qi;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = nullspace(&m, 4, Exec::Sequential);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let s: Q = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let m = mat(&[&[2, 1], &[1, 3]]);
        assert!(nullspace(&m, 2, Exec::Parallel).is_empty());
    }

    #[test]
    fn strategies_agree() {
        let m: Vec<Vec<Q>> = (0..30).map(|i| (0..40).map(|j| qi(((i * 7 + j * 3) % 11) as i64 - 5)).collect()).collect();
        assert_eq!(nullspace(&m, 40, Exec::Sequential), nullspace(&m, 40, Exec::Parallel));
    }
}
