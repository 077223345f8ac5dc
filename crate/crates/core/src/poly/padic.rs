//! Splitting of a prime in the stem field Q[x]/(f).
//!
//! A p-maximal order is reached from Z[θ] by Round 2 enlargement (radical,
//! then ring of multipliers). The residue algebra O/pO is split into local
//! components with random elements; each component gives one prime with
//! exact (e, f). Factor approximants over Z_p come from lifted idempotents.

use crate::arith::{self, mul_mod};
use crate::error::{Error, Result};
use crate::poly::linalg::{charpoly, hnf, left_kernel_mod, rank_mod, solve_in_span, IntMat};
use crate::poly::{discriminant, PrimeFieldPoly, ZPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PAdicFactor {
    /// Monic factor of the monic associate of f, coefficients reduced mod p^precision.
    pub approximant: ZPoly,
    pub e: u32,
    pub f: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PAdicFactorization {
    pub p: u64,
    pub precision: u32,
    pub factors: Vec<PAdicFactor>,
    /// v_p of the stem-field discriminant.
    pub disc_valuation: u32,
}

impl PAdicFactorization {
    /// Sorted (e, f) multiset.
    pub fn ef(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self.factors.iter().map(|x| (x.e, x.f)).collect();
        v.sort_unstable();
        v
    }

    pub fn is_unramified(&self) -> bool {
        self.factors.iter().all(|x| x.e == 1)
    }
}

/// An order of Q[θ] given by basis rows (power-basis coordinates over `denom`)
/// and its multiplication table in that basis.
#[derive(Clone, Debug)]
struct Order {
    n: usize,
    basis: IntMat,
    denom: BigInt,
    table: Vec<Vec<Vec<BigInt>>>,
}

fn poly_mulmod(a: &[BigInt], b: &[BigInt], f: &ZPoly) -> Vec<BigInt> {
    let n = f.deg();
    let mut prod = vec![BigInt::zero(); 2 * n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    // f monic: x^n = -(c_0 + ... + c_{n-1} x^{n-1})
    for k in (n..2 * n).rev() {
        let c = std::mem::take(&mut prod[k]);
        if c.is_zero() {
            continue;
        }
        for i in 0..n {
            prod[k - n + i] -= &c * f.coeff(i);
        }
    }
    prod.truncate(n);
    prod
}

/// Solves c · B = v for upper-triangular B, requiring an integral solution.
fn solve_upper(b: &IntMat, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = b.len();
    let mut c = vec![BigInt::zero(); n];
    for k in 0..n {
        let mut acc = v[k].clone();
        for i in 0..k {
            acc -= &c[i] * &b[i][k];
        }
        let (q, r) = acc.div_rem(&b[k][k]);
        if !r.is_zero() {
            return None;
        }
        c[k] = q;
    }
    Some(c)
}

impl Order {
    fn equation_order(f: &ZPoly) -> Order {
        let n = f.deg();
        let basis: IntMat = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        Order::with_basis(f, basis, BigInt::one())
    }

    fn with_basis(f: &ZPoly, basis: IntMat, denom: BigInt) -> Order {
        let n = f.deg();
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = poly_mulmod(&basis[i], &basis[j], f);
                // prod / denom^2 = c·basis / denom  =>  c·basis = prod / denom
                let v: Vec<BigInt> = prod
                    .iter()
                    .map(|x| {
                        let (q, r) = x.div_rem(&denom);
                        assert!(r.is_zero(), "order not closed under multiplication");
                        q
                    })
                    .collect();
                let c = solve_upper(&basis, &v).expect("order not closed under multiplication");
                table[i][j] = c.clone();
                table[j][i] = c;
            }
        }
        Order { n, basis, denom, table }
    }

    fn mul(&self, x: &[BigInt], y: &[BigInt], m: Option<&BigInt>) -> Vec<BigInt> {
        let n = self.n;
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let s = &x[i] * &y[j];
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot += &s * &self.table[i][j][k];
                }
            }
        }
        if let Some(m) = m {
            out.iter_mut().for_each(|v| *v = v.mod_floor(m));
        }
        out
    }

    fn residue(&self, p: u64) -> Residue {
        let pb = BigInt::from(p);
        let table = self
            .table
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect())
                    .collect()
            })
            .collect();
        let one = self.one().iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect();
        Residue { n: self.n, p, table, one }
    }

    /// Coordinates of the power-basis vector `v` (over denominator 1).
    fn coords_of_power(&self, v: &[BigInt]) -> Vec<BigInt> {
        let scaled: Vec<BigInt> = v.iter().map(|x| x * &self.denom).collect();
        solve_upper(&self.basis, &scaled).expect("Z[θ] lies in every order")
    }

    fn one(&self) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.n];
        e[0] = BigInt::one();
        self.coords_of_power(&e)
    }

    /// v_p([O : Z[θ]])
    fn index_valuation(&self, p: u64) -> u32 {
        let vd = arith::valuation(&self.denom, p).unwrap_or(0) * self.n as u32;
        let vdet: u32 = (0..self.n)
            .map(|i| arith::valuation(&self.basis[i][i], p).unwrap_or(0))
            .sum();
        vd - vdet
    }


    /// One Round 2 step; None when the order is already p-maximal.
    fn enlarge(&self, f: &ZPoly, p: u64) -> Option<Order> {
        let n = self.n;
        let pb = BigInt::from(p);
        let rad = self.residue(p).radical();
        let mut gens: IntMat = (0..n)
            .map(|i| (0..n).map(|k| if k == i { pb.clone() } else { BigInt::zero() }).collect())
            .collect();
        gens.extend(rad.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()));
        let ib = hnf(&gens);
        // action of O/pO on I/pI
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut w = vec![BigInt::zero(); n];
                w[i] = BigInt::one();
                let mut row = Vec::with_capacity(n * n);
                for beta in &ib {
                    let prod = self.mul(&w, beta, None);
                    let c = solve_upper(&ib, &prod).expect("radical is an ideal");
                    row.extend(c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()));
                }
                row
            })
            .collect();
        let ker = left_kernel_mod(&rows, p);
        if ker.is_empty() {
            return None;
        }
        let mut ugens: IntMat = (0..n)
            .map(|i| (0..n).map(|k| if k == i { pb.clone() } else { BigInt::zero() }).collect())
            .collect();
        ugens.extend(ker.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()));
        let ub = hnf(&ugens);
        // new basis = (1/p) U, expressed in the power basis
        let prod: IntMat = ub
            .iter()
            .map(|u| {
                (0..n)
                    .map(|k| (0..n).map(|i| &u[i] * &self.basis[i][k]).sum())
                    .collect()
            })
            .collect();
        let mut basis = hnf(&prod);
        let mut denom = &self.denom * &pb;
        let g = basis
            .iter()
            .flatten()
            .fold(denom.clone(), |g, x| g.gcd(x));
        if !g.is_one() {
            basis.iter_mut().flatten().for_each(|x| *x /= &g);
            denom /= &g;
        }
        Some(Order::with_basis(f, basis, denom))
    }
}

/// The F_p-algebra O/pO with its structure constants.
struct Residue {
    n: usize,
    p: u64,
    table: Vec<Vec<Vec<u64>>>,
    one: Vec<u64>,
}

impl Residue {
    fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let (n, p) = (self.n, self.p);
        let mut out = vec![0u64; n];
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0 {
                    continue;
                }
                let s = mul_mod(x[i], y[j], p);
                for k in 0..n {
                    out[k] = (out[k] + mul_mod(s, self.table[i][j][k], p)) % p;
                }
            }
        }
        out
    }

    fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one.clone();
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn unit(&self, i: usize) -> Vec<u64> {
        (0..self.n).map(|k| u64::from(k == i)).collect()
    }

    /// Least power q of p with q ≥ n; x -> x^q kills exactly the radical.
    fn frobenius_exponent(&self) -> (u64, u32) {
        let mut q = self.p;
        let mut j = 1;
        while (q as usize) < self.n {
            q *= self.p;
            j += 1;
        }
        (q, j)
    }

    fn radical(&self) -> Vec<Vec<u64>> {
        let (_, j) = self.frobenius_exponent();
        let f: Vec<Vec<u64>> = (0..self.n).map(|i| self.pow(&self.unit(i), self.p)).collect();
        let mut acc = f.clone();
        for _ in 1..j {
            acc = mat_mul_mod(&acc, &f, self.p);
        }
        left_kernel_mod(&acc, self.p)
    }
}

fn mat_mul_mod(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = b[0].len();
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &x)| (acc + mul_mod(x, b[k][j], p)) % p)
                })
                .collect()
        })
        .collect()
}

/// A component of O/pO: a subspace (rows) that is an ideal and a ring.
struct Component {
    basis: Vec<Vec<u64>>,
    f: u32,
}

fn random_in(basis: &[Vec<u64>], p: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = basis[0].len();
    let mut v = vec![0u64; n];
    for b in basis {
        let c = rng.gen_range(0..p);
        for k in 0..n {
            v[k] = (v[k] + mul_mod(c, b[k], p)) % p;
        }
    }
    v
}

/// Char poly over F_p of multiplication by `x` on the ideal spanned by `basis`.
fn charpoly_on(alg: &Residue, x: &[u64], basis: &[Vec<u64>]) -> PrimeFieldPoly {
    let p = alg.p;
    let m: IntMat = basis
        .iter()
        .map(|v| {
            let img = alg.mul(x, v);
            solve_in_span(basis, &img, p)
                .expect("component is an ideal")
                .into_iter()
                .map(BigInt::from)
                .collect()
        })
        .collect();
    let cp = charpoly(&m, Some(&BigInt::from(p)));
    PrimeFieldPoly::new(p, cp.iter().map(|c| c.to_u64().unwrap()).collect())
}

/// Evaluate a polynomial at an element of O/pO.
fn eval_at(alg: &Residue, g: &PrimeFieldPoly, x: &[u64]) -> Vec<u64> {
    let (n, p) = (alg.n, alg.p);
    let mut acc = vec![0u64; n];
    for &c in g.coeffs().iter().rev() {
        acc = alg.mul(&acc, x);
        for k in 0..n {
            acc[k] = (acc[k] + mul_mod(c, alg.one[k], p)) % p;
        }
    }
    acc
}

fn split_components(alg: &Residue, rng: &mut ChaCha8Rng) -> Result<Vec<Component>> {
    let (n, p) = (alg.n, alg.p);
    let (q, _) = alg.frobenius_exponent();
    let full: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|k| u64::from(k == i)).collect()).collect();
    let mut pending = vec![full];
    let mut done = Vec::new();
    while let Some(v) = pending.pop() {
        let dim = v.len();
        let frob: Vec<Vec<u64>> = v.iter().map(|b| alg.pow(b, q)).collect();
        let residue_dim = rank_mod(&frob, p);
        let mut settled = false;
        for _ in 0..200 {
            let x = random_in(&v, p, rng);
            let cp = charpoly_on(alg, &x, &v);
            let fac = cp.factor();
            if fac.len() > 1 {
                for (g, k) in fac {
                    let h = (0..k).fold(PrimeFieldPoly::one(p), |a, _| a.mul(&g));
                    let hx = eval_at(alg, &h, &x);
                    let imgs: Vec<Vec<u64>> = v.iter().map(|b| alg.mul(&hx, b)).collect();
                    let coeffs = left_kernel_mod(&imgs, p);
                    let sub: Vec<Vec<u64>> = coeffs
                        .iter()
                        .map(|c| {
                            let mut w = vec![0u64; n];
                            for (cj, bj) in c.iter().zip(v.iter()) {
                                for k in 0..n {
                                    w[k] = (w[k] + mul_mod(*cj, bj[k], p)) % p;
                                }
                            }
                            w
                        })
                        .collect();
                    pending.push(sub);
                }
                settled = true;
                break;
            }
            let g = &fac[0].0;
            if g.deg() == residue_dim {
                debug_assert_eq!(dim % residue_dim, 0);
                done.push(Component { basis: v.clone(), f: residue_dim as u32 });
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Error::Inconsistent(format!(
                "could not split the residue algebra at p = {p}"
            )));
        }
    }
    Ok(done)
}

fn seeded_rng(f: &ZPoly, p: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&p.to_le_bytes());
    for c in f.coeffs() {
        eat(&c.to_signed_bytes_le());
        eat(b",");
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// p-maximal order of the stem field of a monic irreducible f.
fn p_maximal(f: &ZPoly, p: u64) -> Order {
    let mut order = Order::equation_order(f);
    while let Some(next) = order.enlarge(f, p) {
        order = next;
    }
    order
}

/// v_p of the stem-field discriminant of an irreducible polynomial.
pub fn field_disc_valuation(f: &ZPoly, p: u64) -> Result<u32> {
    let g = f.monic_associate();
    let d = discriminant(&g)?;
    let vd = arith::valuation(&d, p).ok_or(Error::NotSquarefree)?;
    if vd < 2 {
        return Ok(vd);
    }
    let order = p_maximal(&g, p);
    Ok(vd - 2 * order.index_valuation(p))
}

/// The (e, f) multiset of p in Q[x]/(f) and v_p of the discriminant, without
/// computing factor approximants. Works for any squarefree f.
pub fn splitting_type(f: &ZPoly, p: u64) -> Result<(Vec<(u32, u32)>, u32)> {
    let g = f.primitive_part().monic_associate();
    if g.deg() == 1 {
        return Ok((vec![(1, 1)], 0));
    }
    let disc = discriminant(&g)?;
    let vd = arith::valuation(&disc, p).ok_or(Error::NotSquarefree)?;
    let order = p_maximal(&g, p);
    let mut rng = seeded_rng(&g, p);
    let comps = split_components(&order.residue(p), &mut rng)?;
    let mut ef: Vec<(u32, u32)> = comps.iter().map(|c| (c.basis.len() as u32 / c.f, c.f)).collect();
    ef.sort_unstable();
    Ok((ef, vd - 2 * order.index_valuation(p)))
}

/// Certified splitting data of p in Q[x]/(f).
pub fn padic_splitting(f: &ZPoly, p: u64, max_precision: u32) -> Result<PAdicFactorization> {
    if f.deg() < 1 {
        return Err(Error::Domain("padic_splitting needs degree at least 1".into()));
    }
    if !arith::is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let g = f.primitive_part().monic_associate();
    let n = g.deg();
    let disc = discriminant(&g)?;
    let vd = arith::valuation(&disc, p).ok_or(Error::NotSquarefree)?;
    if n == 1 {
        return Ok(PAdicFactorization {
            p,
            precision: 1,
            factors: vec![PAdicFactor { approximant: g, e: 1, f: 1 }],
            disc_valuation: 0,
        });
    }
    let order = p_maximal(&g, p);
    let disc_valuation = vd - 2 * order.index_valuation(p);
    let mut rng = seeded_rng(&g, p);
    let alg = order.residue(p);
    let comps = split_components(&alg, &mut rng)?;

    // idempotents of O/pO: project 1 onto the components
    let all: Vec<Vec<u64>> = comps.iter().flat_map(|c| c.basis.iter().cloned()).collect();
    let coords = solve_in_span(&all, &alg.one, p)
        .ok_or_else(|| Error::Inconsistent("components do not span O/pO".into()))?;
    let mut idems: Vec<Vec<u64>> = Vec::new();
    let mut offset = 0;
    for c in &comps {
        let mut e = vec![0u64; n];
        for (j, b) in c.basis.iter().enumerate() {
            let cj = coords[offset + j];
            for k in 0..n {
                e[k] = (e[k] + mul_mod(cj, b[k], p)) % p;
            }
        }
        offset += c.basis.len();
        idems.push(e);
    }

    let mut theta = vec![BigInt::zero(); n];
    theta[1] = BigInt::one();
    let theta = order.coords_of_power(&theta);

    let start = (2 * vd + 4).min(max_precision.max(1));
    let mut k = start;
    loop {
        let modulus = BigInt::from(p).pow(k);
        let mut factors = Vec::new();
        for (c, e0) in comps.iter().zip(idems.iter()) {
            let mut e: Vec<BigInt> = e0.iter().map(|&x| BigInt::from(x)).collect();
            let mut prec = 1u32;
            while prec < k {
                let e2 = order.mul(&e, &e, Some(&modulus));
                let e3 = order.mul(&e2, &e, Some(&modulus));
                e = e2
                    .iter()
                    .zip(e3.iter())
                    .map(|(a, b)| (a * BigInt::from(3) - b * BigInt::from(2)).mod_floor(&modulus))
                    .collect();
                prec *= 2;
            }
            let te = order.mul(&theta, &e, Some(&modulus));
            let mat: IntMat = (0..n)
                .map(|i| {
                    let mut w = vec![BigInt::zero(); n];
                    w[i] = BigInt::one();
                    order.mul(&te, &w, Some(&modulus))
                })
                .collect();
            let cp = charpoly(&mat, Some(&modulus));
            let d = c.basis.len();
            let approx = ZPoly::new(cp[n - d..].to_vec());
            let dim = d as u32;
            factors.push(PAdicFactor { approximant: approx, e: dim / c.f, f: c.f });
        }
        let prod = factors
            .iter()
            .fold(ZPoly::one(), |acc, x| (&acc * &x.approximant).reduce_big(&modulus));
        if prod == g.reduce_big(&modulus) {
            factors.sort_by(|a, b| {
                (a.e * a.f, a.e, a.f)
                    .cmp(&(b.e * b.f, b.e, b.f))
                    .then_with(|| a.approximant.coeffs().cmp(b.approximant.coeffs()))
            });
            return Ok(PAdicFactorization { p, precision: k, factors, disc_valuation });
        }
        if k >= max_precision {
            return Err(Error::Precision { p: BigInt::from(p), reached: k });
        }
        k = (k * 2).min(max_precision);
    }
}

/// Degree multiset of f mod p, used as a cross-check when p does not divide disc(f).
pub fn unramified_degrees(f: &ZPoly, p: u64) -> Vec<usize> {
    f.reduce_mod(p).factor_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> ZPoly {
        ZPoly::from_i64(c)
    }

    #[test]
    fn gaussian_integers() {
        let s = padic_splitting(&zp(&[1, 0, 1]), 5, 40).unwrap();
        assert_eq!(s.ef(), vec![(1, 1), (1, 1)]);
        let s = padic_splitting(&zp(&[1, 0, 1]), 2, 40).unwrap();
        assert_eq!(s.ef(), vec![(2, 1)]);
        assert_eq!(s.disc_valuation, 2);
        let s = padic_splitting(&zp(&[1, 0, 1]), 3, 40).unwrap();
        assert_eq!(s.ef(), vec![(1, 2)]);
    }

    #[test]
    fn non_monogenic_index() {
        // Q(sqrt 5) from x^2 - 5 vs x^2 - x - 1; and x^2 - 45 has index 3
        let s = padic_splitting(&zp(&[-45, 0, 1]), 3, 40).unwrap();
        assert_eq!(s.ef(), vec![(1, 2)]);
        assert_eq!(s.disc_valuation, 0);
        let s = padic_splitting(&zp(&[-45, 0, 1]), 5, 40).unwrap();
        assert_eq!(s.ef(), vec![(2, 1)]);
    }

    #[test]
    fn cubic_with_common_index_divisor() {
        // Dedekind's x^3 - x^2 - 2x - 8: 2 splits completely although f mod 2 = x^2 (x + 1)
        let s = padic_splitting(&zp(&[-8, -2, -1, 1]), 2, 40).unwrap();
        assert_eq!(s.ef(), vec![(1, 1), (1, 1), (1, 1)]);
    }
}
