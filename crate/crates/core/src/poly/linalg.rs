//! Small dense linear algebra: fraction-free determinants and characteristic
//! polynomials over Z, Hermite normal form, and row reduction over F_p.

use crate::arith::{inv_mod, mul_mod};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

/// Determinant by Bareiss elimination; exact over Z.
pub fn det_bareiss(m: &IntMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Characteristic polynomial det(xI - A), lowest degree first, via the
/// division-free Berkowitz recurrence. Coefficients are reduced modulo
/// `modulus` (symmetric residues are not used; results lie in [0, m)).
pub fn charpoly(a: &IntMat, modulus: Option<&BigInt>) -> Vec<BigInt> {
    let n = a.len();
    let red = |x: BigInt| match modulus {
        Some(m) => x.mod_floor(m),
        None => x,
    };
    // highest degree first while building
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for r in 0..n {
        let mut t: Vec<BigInt> = Vec::with_capacity(r + 2);
        t.push(BigInt::one());
        t.push(red(-a[r][r].clone()));
        // v = A_r^k S, starting with S = column r above row r
        let mut v: Vec<BigInt> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let rs: BigInt = (0..r).map(|j| &a[r][j] * &v[j]).sum();
            t.push(red(-rs));
            v = (0..r)
                .map(|i| red((0..r).map(|j| &a[i][j] * &v[j]).sum()))
                .collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = BigInt::zero();
            for (j, cj) in c.iter().enumerate() {
                if j <= i {
                    acc += &t[i - j] * cj;
                }
            }
            *slot = red(acc);
        }
        c = next;
    }
    c.reverse();
    c
}

/// Row-style Hermite normal form of the lattice spanned by `rows`:
/// upper triangular, positive pivots, entries above a pivot reduced into
/// [0, pivot). Zero rows are dropped.
pub fn hnf(rows: &[Vec<BigInt>]) -> IntMat {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut a: IntMat = rows.to_vec();
    let mut out: IntMat = Vec::new();
    let mut col = 0;
    while col < ncols && !a.is_empty() {
        // gcd-combine all rows into one with a pivot in this column
        loop {
            let nz: Vec<usize> = (0..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz
                .iter()
                .min_by(|&&i, &&j| a[i][col].abs().cmp(&a[j][col].abs()))
                .unwrap();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = a[i][col].div_floor(&a[piv][col]);
                let prow = a[piv].clone();
                for (x, y) in a[i].iter_mut().zip(prow.iter()) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(i) = (0..a.len()).find(|&i| !a[i][col].is_zero()) {
            let mut row = a.remove(i);
            if row[col].is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(row);
        }
        a.retain(|r| r.iter().any(|x| !x.is_zero()));
        col += 1;
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let pc = (0..ncols).find(|&c| !out[i][c].is_zero()).unwrap();
        let piv = out[i][pc].clone();
        for k in 0..i {
            let q = out[k][pc].div_floor(&piv);
            if !q.is_zero() {
                let r = out[i].clone();
                for (x, y) in out[k].iter_mut().zip(r.iter()) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

/// Reduced row echelon form over F_p. Returns the nonzero rows and their pivot columns.
pub fn rref_mod(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    if a.is_empty() {
        return (a, Vec::new());
    }
    let ncols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(i) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, i);
        let inv = inv_mod(a[r][c], p).expect("nonzero mod prime");
        for x in a[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let prow = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x = (*x + p - mul_mod(f, *y, p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank_mod(rows: &[Vec<u64>], p: u64) -> usize {
    rref_mod(rows, p).1.len()
}

/// Basis of { x : M x = 0 } over F_p, where `m` lists the rows of M and `ncols` its width.
pub fn kernel_mod(m: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let (r, pivots) = rref_mod(m, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (row, &pc) in r.iter().zip(pivots.iter()) {
                v[pc] = (p - row[fc]) % p;
            }
            v
        })
        .collect()
}

/// Basis of { v : v M = 0 } (left kernel), M given by rows.
pub fn left_kernel_mod(m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    if m.is_empty() {
        return Vec::new();
    }
    let nrows = m.len();
    let ncols = m[0].len();
    let t: Vec<Vec<u64>> = (0..ncols).map(|j| (0..nrows).map(|i| m[i][j]).collect()).collect();
    kernel_mod(&t, nrows, p)
}

/// Coordinates of `v` in the span of `basis` (rows), or None if outside.
pub fn solve_in_span(basis: &[Vec<u64>], v: &[u64], p: u64) -> Option<Vec<u64>> {
    let k = basis.len();
    let n = v.len();
    // columns = basis vectors; augmented system
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut r: Vec<u64> = (0..k).map(|j| basis[j][i] % p).collect();
            r.push(v[i] % p);
            r
        })
        .collect();
    let (r, pivots) = rref_mod(&rows, p);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![0u64; k];
    for (row, &pc) in r.iter().zip(pivots.iter()) {
        x[pc] = row[k];
    }
    Some(x)
}
