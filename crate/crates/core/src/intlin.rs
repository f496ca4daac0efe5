//! Exact integer linear algebra over `BigInt`: Smith normal form with
//! transforms, integer kernels and integer solutions of linear systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major integer matrix.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity(n: usize) -> IntMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn mat_vec(m: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Result of a Smith normal form computation: `u * a * v = d` with `u`, `v`
/// unimodular and `d` diagonal, `d[i][i] | d[i+1][i+1]`, entries non-negative.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
}

impl Smith {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row[dst] -= q * row[src]
fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row) {
        *x -= q * s;
    }
}

/// col[dst] -= q * col[src]
fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

pub fn smith_normal_form(a: &IntMatrix, cols: usize) -> Smith {
    let rows = a.len();
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    let mut rank = 0;

    for t in 0..steps {
        // smallest nonzero entry of the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let q = d[i][t].div_floor(&d[t][t]);
                    row_axpy(&mut d, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    if !d[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let q = d[t][j].div_floor(&d[t][t]);
                    col_axpy(&mut d, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    if !d[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest remainder in row/column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !d[i][t].is_zero() && d[i][t].abs() < d[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !d[t][j].is_zero() && d[t][j].abs() < d[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap(t, best.0);
                    u.swap(t, best.0);
                } else if best.1 != t {
                    swap_cols(&mut d, t, best.1);
                    swap_cols(&mut v, t, best.1);
                }
                continue;
            }
            // divisibility of the remaining block by the pivot
            let mut offender = None;
            'search: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !d[i][j].is_multiple_of(&d[t][t]) {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        rank += 1;
    }

    let diagonal = (0..steps).map(|i| d[i][i].clone()).collect();
    Smith {
        u,
        v,
        diagonal,
        rank,
    }
}

/// Basis of the integer kernel `{x : a x = 0}` (columns returned as vectors).
pub fn kernel(a: &IntMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(a, cols);
    (s.rank..cols)
        .map(|j| s.v.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// One integer solution of `a x = z`, if any exists.
pub fn solve(a: &IntMatrix, cols: usize, z: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(a, cols);
    let uz = mat_vec(&s.u, z);
    let mut y = vec![BigInt::zero(); cols];
    for (i, value) in uz.iter().enumerate() {
        if i < s.rank {
            let (q, r) = value.div_rem(&s.diagonal[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !value.is_zero() {
            return None;
        }
    }
    Some(mat_vec(&s.v, &y))
}

/// Free rank and torsion coefficients of the abelian group with `generators`
/// generators and one relation per row of `relations`.
pub fn abelian_invariants(relations: &IntMatrix, generators: usize) -> (usize, Vec<BigInt>) {
    if relations.is_empty() {
        return (generators, Vec::new());
    }
    let s = smith_normal_form(relations, generators);
    (generators - s.rank, s.torsion())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let n = b[0].len();
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn smith_of_unipotent_minus_identity() {
        // (1 2;0 1) - I
        let s = smith_normal_form(&m(&[&[0, 2], &[0, 0]]), 2);
        assert_eq!(s.rank, 1);
        assert_eq!(s.torsion(), vec![BigInt::from(2)]);
    }

    #[test]
    fn smith_transforms_are_consistent() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a, 3);
        let d = mul(&mul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[i][j].is_zero());
                }
            }
        }
        let diag: Vec<i64> = s.diagonal.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(diag, vec![2, 6, 12]);
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[&[1, 2, 3]]);
        for k in kernel(&a, 3) {
            assert!(mat_vec(&a, &k).iter().all(Zero::is_zero));
        }
        assert_eq!(kernel(&a, 3).len(), 2);
        let x = solve(&m(&[&[2, 4]]), 2, &[BigInt::from(6)]).unwrap();
        assert_eq!(mat_vec(&m(&[&[2, 4]]), &x), vec![BigInt::from(6)]);
        assert!(solve(&m(&[&[2, 4]]), 2, &[BigInt::from(3)]).is_none());
    }
}
