//! Small exact integer matrices: products, determinants, rational rank and inverse,
//! Smith normal form.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rat::Q;

pub type Mat = Vec<Vec<i64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0; c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn cols(m: &Mat) -> usize {
    m.first().map_or(0, |r| r.len())
}

pub fn transpose(m: &Mat) -> Mat {
    let (r, c) = (m.len(), cols(m));
    (0..c).map(|j| (0..r).map(|i| m[i][j]).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), cols(b));
    let mut out = zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut acc: i128 = 0;
            for t in 0..k {
                acc += a[i][t] as i128 * b[t][j] as i128;
            }
            out[i][j] = i64::try_from(acc).expect("matrix entry overflow");
        }
    }
    out
}

pub fn mul_vec(a: &Mat, v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn to_q(m: &Mat) -> Vec<Vec<Q>> {
    m.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect()
}

/// Row echelon form over ℚ; returns the rank and the determinant (square input).
fn eliminate(mut a: Vec<Vec<Q>>) -> (usize, Q) {
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    let mut det = Q::one();
    let mut rank = 0;
    for j in 0..c {
        let Some(p) = (rank..r).find(|&i| !a[i][j].is_zero()) else {
            det = Q::zero();
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            det = -det;
        }
        let piv = a[rank][j].clone();
        det *= &piv;
        for i in rank + 1..r {
            if a[i][j].is_zero() {
                continue;
            }
            let f = &a[i][j] / &piv;
            for k in j..c {
                let t = &f * &a[rank][k];
                a[i][k] -= t;
            }
        }
        rank += 1;
    }
    if rank < r {
        det = Q::zero();
    }
    (rank, det)
}

pub fn rank(m: &Mat) -> usize {
    eliminate(to_q(m)).0
}

pub fn det(m: &Mat) -> i64 {
    assert_eq!(m.len(), cols(m), "det of a non-square matrix");
    if m.is_empty() {
        return 1;
    }
    eliminate(to_q(m)).1.to_integer().to_i64().expect("determinant overflow")
}

/// Inverse over ℚ, `None` if singular.
pub fn inverse_q(m: &Mat) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a = to_q(m);
    for (i, row) in a.iter_mut().enumerate() {
        row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
    }
    for j in 0..n {
        let p = (j..n).find(|&i| !a[i][j].is_zero())?;
        a.swap(p, j);
        let piv = a[j][j].clone();
        for x in a[j].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != j && !a[i][j].is_zero() {
                let f = a[i][j].clone();
                for k in 0..2 * n {
                    let t = &f * &a[j][k];
                    a[i][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(m: &Mat) -> Option<Mat> {
    let inv = inverse_q(m)?;
    inv.into_iter()
        .map(|r| r.into_iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect())
        .collect()
}

/// Smith normal form: unimodular U, V with U·A·V = D diagonal, d_i | d_{i+1}, d_i ≥ 0.
pub struct Smith {
    pub u: Mat,
    pub d: Vec<i64>,
    pub v: Mat,
}

pub fn smith(a: &Mat) -> Smith {
    let (r, c) = (a.len(), cols(a));
    let mut m = a.clone();
    let mut u = identity(r);
    let mut v = identity(c);
    let n = r.min(c);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the remaining block to the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(t, bi);
            u.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..r {
                let f = m[i][t] / p;
                if f != 0 {
                    for k in 0..c {
                        m[i][k] -= f * m[t][k];
                    }
                    for k in 0..r {
                        u[i][k] -= f * u[t][k];
                    }
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let f = m[t][j] / p;
                if f != 0 {
                    for row in m.iter_mut() {
                        row[j] -= f * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= f * row[t];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for k in 0..c {
                        m[t][k] += m[i][k];
                    }
                    for k in 0..r {
                        u[t][k] += u[i][k];
                    }
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let d = (0..n).map(|i| m[i][i]).collect();
    Smith { u, d, v }
}

/// Kernel dimension of (A − I) over ℚ.
pub fn fixed_rank(a: &Mat) -> usize {
    let n = a.len();
    let mut m = a.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= 1;
    }
    n - rank(&m)
}

pub fn is_symmetric(m: &Mat) -> bool {
    (0..m.len()).all(|i| (0..m.len()).all(|j| m[i][j] == m[j][i]))
}

/// Positive definiteness via leading principal minors.
pub fn is_positive_definite(m: &Mat) -> bool {
    (1..=m.len()).all(|k| {
        let sub: Mat = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        eliminate(to_q(&sub)).1.is_positive()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_small() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&a);
        assert_eq!(s.d, vec![2, 6, 12]);
        let d = mul(&mul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[i][j], if i == j { s.d[i] } else { 0 });
            }
        }
        assert_eq!(det(&s.u).abs(), 1);
        assert_eq!(det(&s.v).abs(), 1);
    }

    #[test]
    fn inverse_and_rank() {
        let a = vec![vec![2, 1], vec![1, 1]];
        assert_eq!(inverse_unimodular(&a), Some(vec![vec![1, -1], vec![-1, 2]]));
        assert_eq!(rank(&vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(det(&vec![vec![0, 1], vec![1, 0]]), -1);
        assert!(is_positive_definite(&vec![vec![2, 1], vec![1, 2]]));
        assert!(!is_positive_definite(&vec![vec![1, 2], vec![2, 1]]));
        assert_eq!(fixed_rank(&vec![vec![0, 1], vec![1, 0]]), 1);
    }

    proptest! {
        #[test]
        fn smith_is_a_factorisation(entries in proptest::collection::vec(-9i64..10, 9)) {
            let a: Mat = entries.chunks(3).map(|c| c.to_vec()).collect();
            let s = smith(&a);
            let d = mul(&mul(&s.u, &a), &s.v);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(d[i][j], if i == j { s.d[i] } else { 0 });
                }
            }
            for w in s.d.windows(2) {
                prop_assert!(w[0] == 0 && w[1] == 0 || w[0] != 0 && w[1] % w[0] == 0);
            }
            prop_assert_eq!(s.d.iter().product::<i64>().abs(), det(&a).abs());
        }
    }
}
