use crate::arith::{inv_mod, mul_mod};
use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

/// Polynomial over F_p, coefficients in [0, p), lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeFieldPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl PrimeFieldPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut c: Vec<u64> = coeffs.into_iter().map(|x| x % p).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        PrimeFieldPoly { p, coeffs: c }
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Self {
        let m = p as i64;
        Self::new(p, coeffs.iter().map(|&x| x.rem_euclid(m) as u64).collect())
    }

    pub fn zero(p: u64) -> Self {
        PrimeFieldPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p).unwrap();
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        let p = self.p;
        Self::new(p, self.coeffs.iter().map(|&c| mul_mod(c, k, p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| (self.c(i) + o.c(i)) % p)
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let p = self.p;
        Self::new(p, (0..n).map(|i| (self.c(i) + p - o.c(i)) % p).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut v = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        Self::new(p, v)
    }

    fn c(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, g: &Self) -> (Self, Self) {
        assert!(!g.is_zero(), "division by zero polynomial");
        let p = self.p;
        let mut r = self.coeffs.clone();
        let dg = g.deg();
        if r.len() < g.coeffs.len() {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(g.lc(), p).unwrap();
        let mut q = vec![0u64; r.len() - dg];
        for k in (0..q.len()).rev() {
            let coef = mul_mod(r[k + dg], inv, p);
            q[k] = coef;
            if coef != 0 {
                for (j, &gj) in g.coeffs.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mul_mod(coef, gj, p)) % p;
                }
            }
        }
        r.truncate(dg);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, g: &Self) -> Self {
        self.divrem(g).1
    }

    pub fn div(&self, g: &Self) -> Self {
        self.divrem(g).0
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
        )
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).deg() == 0
    }

    /// self^e mod m
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    /// Distinct roots in F_p, ascending.
    pub fn roots(&self) -> Vec<u64> {
        let mut r: Vec<u64> = self
            .factor()
            .into_iter()
            .filter(|(g, _)| g.deg() == 1)
            .map(|(g, _)| (self.p - g.coeffs[0]) % self.p)
            .collect();
        r.sort_unstable();
        r
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by degree and then by coefficient vector. The leading
    /// coefficient is dropped.
    pub fn factor(&self) -> Vec<(PrimeFieldPoly, u32)> {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed());
        let mut out = Vec::new();
        for (sq, mult) in self.monic().squarefree_decomposition() {
            for (g, d) in sq.distinct_degree() {
                for h in g.equal_degree(d, &mut rng) {
                    out.push((h, mult));
                }
            }
        }
        out.sort_by(|a, b| {
            a.0.deg()
                .cmp(&b.0.deg())
                .then_with(|| a.0.coeffs.cmp(&b.0.coeffs))
        });
        out
    }

    /// Degree pattern of the irreducible factors (with multiplicity), sorted.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .factor()
            .into_iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.deg(), m as usize))
            .collect();
        d.sort_unstable();
        d
    }

    fn seed(&self) -> u64 {
        // FNV-1a over (p, coeffs) so factorizations are reproducible
        let mut h: u64 = 0xcbf29ce484222325;
        for w in std::iter::once(self.p).chain(self.coeffs.iter().copied()) {
            for b in w.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    /// Squarefree factors of a monic polynomial with their multiplicities.
    fn squarefree_decomposition(&self) -> Vec<(PrimeFieldPoly, u32)> {
        let p = self.p;
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let mut c = self.gcd(&self.derivative());
        let mut w = self.div(&c);
        let mut i = 1u32;
        while w.deg() > 0 {
            let y = w.gcd(&c);
            let z = w.div(&y);
            if z.deg() > 0 {
                out.push((z.monic(), i));
            }
            i += 1;
            w = y;
            c = c.div(&w);
        }
        if c.deg() > 0 {
            // c is a polynomial in x^p
            let root = Self::new(p, c.coeffs.iter().step_by(p as usize).copied().collect());
            for (g, m) in root.squarefree_decomposition() {
                out.push((g, m * p as u32));
            }
        }
        out
    }

    /// Splits a monic squarefree polynomial into products of irreducibles of equal degree.
    fn distinct_degree(&self) -> Vec<(PrimeFieldPoly, usize)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = Self::x(p);
        let mut h = x.rem(&f);
        let pe = BigUint::from(p);
        let mut i = 1;
        while f.deg() >= 2 * i {
            h = h.pow_mod(&pe, &f);
            let g = h.sub(&x).gcd(&f);
            if g.deg() > 0 {
                out.push((g.clone(), i));
                f = f.div(&g);
                h = h.rem(&f);
            }
            i += 1;
        }
        if f.deg() > 0 {
            let d = f.deg();
            out.push((f, d));
        }
        out
    }

    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<PrimeFieldPoly> {
        let n = self.deg();
        if n == d {
            return vec![self.clone()];
        }
        let p = self.p;
        loop {
            let a = Self::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
            if a.deg() == 0 {
                continue;
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
                a.pow_mod(&e, self).sub(&Self::one(p))
            };
            if b.is_zero() {
                continue;
            }
            let g = b.gcd(self);
            if g.deg() > 0 && g.deg() < n {
                let mut out = g.equal_degree(d, rng);
                out.extend(self.div(&g).monic().equal_degree(d, rng));
                return out;
            }
        }
    }

    pub fn is_irreducible(&self) -> bool {
        let f = self.factor();
        f.len() == 1 && f[0].1 == 1
    }
}

impl fmt::Display for PrimeFieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.p);
        }
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}*x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}*x^{i}"),
            };
            parts.push(t);
        }
        write!(f, "{} (mod {})", parts.join(" + "), self.p)
    }
}

/// Factorization over F_p as a free function.
pub fn factor_mod_p(f: &PrimeFieldPoly) -> Vec<(PrimeFieldPoly, u32)> {
    f.factor()
}

/// Evaluates a polynomial at every element of F_p; brute force for small p.
pub fn brute_force_roots(f: &PrimeFieldPoly) -> Vec<u64> {
    (0..f.modulus()).filter(|&x| f.eval(x) == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[i64]) -> PrimeFieldPoly {
        PrimeFieldPoly::from_i64(p, c)
    }

    fn expand(p: u64, fs: &[(PrimeFieldPoly, u32)]) -> PrimeFieldPoly {
        fs.iter().fold(PrimeFieldPoly::one(p), |acc, (g, m)| {
            (0..*m).fold(acc, |a, _| a.mul(g))
        })
    }

    #[test]
    fn small_factorizations() {
        let f = fp(5, &[1, 0, 1]);
        let fs = f.factor();
        assert_eq!(fs, vec![(fp(5, &[2, 1]), 1), (fp(5, &[3, 1]), 1)]);
        assert_eq!(fp(3, &[1, 0, 1]).factor(), vec![(fp(3, &[1, 0, 1]), 1)]);
    }

    #[test]
    fn repeated_and_inseparable() {
        // (x+1)^3 (x^2+x+1) over F_2 and x^9 - x^3 over F_3
        let a = fp(2, &[1, 1]);
        let b = fp(2, &[1, 1, 1]);
        let f = a.mul(&a).mul(&a).mul(&b);
        assert_eq!(f.factor(), vec![(a, 3), (b, 1)]);
        let g = fp(3, &[0, 0, 0, -1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(expand(3, &g.factor()), g);
    }

    #[test]
    fn trace_map_splitting() {
        // product of the two irreducible quadratics... over F_2 there is one;
        // use the three irreducible cubics' product pieces instead
        let c1 = fp(2, &[1, 1, 0, 1]);
        let c2 = fp(2, &[1, 0, 1, 1]);
        let f = c1.mul(&c2);
        assert_eq!(f.factor(), vec![(c2, 1), (c1, 1)]);
    }

    #[test]
    fn large_prime_roots() {
        let p = 2147483647;
        // (x - 5)(x - 123456789)(x^2 + 1)
        let f = fp(p, &[-5, 1]).mul(&fp(p, &[-123456789, 1])).mul(&fp(p, &[1, 0, 1]));
        assert_eq!(f.roots(), vec![5, 123456789]);
    }
}
