//! Explicit A5 ⊂ PGL₂ embeddings.
//!
//! With ω = ε + ε⁻¹ and c = ε² − ε⁻²,
//!
//!   x ↦ [[−c, ω], [ω, c]],   y ↦ [[ε², −ω], [0, ε⁻²]]
//!
//! satisfies x² = y⁵ = (xy)³ = 1 projectively. Here ε is a primitive 5th root of
//! unity, except over fields of characteristic 5 where ε = 1. Replacing ε by ε²
//! gives the second embedding; over F₈₁ the two are told apart by tr²/det at the
//! images of y and y², which swap.
//!
//! Coefficient rings are Z[t]/(g), optionally reduced mod p: F_{p^m} with g the
//! first irreducible monic of degree m in lexicographic order, and Z[ζ₅] with
//! g = Φ₅.

use crate::error::{Error, Result};
use crate::poly::PrimeFieldPoly;
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;

pub const CLOSURE_CAP: usize = 10_000;

/// Z[t]/(g(t)), reduced mod p when `p` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientRing {
    pub p: Option<u64>,
    /// Monic modulus, lowest degree first.
    pub modulus: Vec<i64>,
}

pub type Elem = Vec<i64>;

impl CoefficientRing {
    pub fn cyclotomic5() -> CoefficientRing {
        CoefficientRing { p: None, modulus: vec![1, 1, 1, 1, 1] }
    }

    /// F_{p^m}.
    pub fn finite(p: u64, m: usize) -> Result<CoefficientRing> {
        if !crate::arith::is_prime_u64(p) || m == 0 {
            return Err(Error::Domain(format!("F_{p}^{m} is not a finite field descriptor")));
        }
        if m == 1 {
            return Ok(CoefficientRing { p: Some(p), modulus: vec![0, 1] });
        }
        let total = (p as u128).pow(m as u32);
        for idx in 0..total {
            let mut c = Vec::with_capacity(m + 1);
            let mut r = idx;
            for _ in 0..m {
                c.push((r % p as u128) as u64);
                r /= p as u128;
            }
            c.push(1);
            let f = PrimeFieldPoly::new(p, c.clone());
            if f.is_irreducible() {
                return Ok(CoefficientRing { p: Some(p), modulus: c.into_iter().map(|x| x as i64).collect() });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_some()
    }

    /// Number of elements of a finite ring.
    pub fn size(&self) -> Option<u64> {
        self.p.map(|p| p.pow(self.degree() as u32))
    }

    fn reduce_coeff(&self, x: i64) -> i64 {
        match self.p {
            Some(p) => x.rem_euclid(p as i64),
            None => x,
        }
    }

    fn normalize(&self, mut v: Vec<i64>) -> Elem {
        let d = self.degree();
        // reduce by the monic modulus from the top
        while v.len() > d {
            let top = v.pop().unwrap();
            if top != 0 {
                let shift = v.len() - d;
                for (i, &g) in self.modulus[..d].iter().enumerate() {
                    v[shift + i] -= top * g;
                }
            }
        }
        v.resize(d, 0);
        v.into_iter().map(|x| self.reduce_coeff(x)).collect()
    }

    pub fn from_int(&self, a: i64) -> Elem {
        self.normalize(vec![a])
    }

    pub fn zero(&self) -> Elem {
        self.from_int(0)
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    /// The class of t.
    pub fn generator(&self) -> Elem {
        self.normalize(vec![0, 1])
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.normalize(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.normalize(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.normalize(a.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = vec![0i64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.reduce_coeff(out[i + j] + x * y);
            }
        }
        self.normalize(out)
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse in a finite field (a^(q−2)); in Z[ζ₅] only units ±ζ^k are handled.
    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::Domain("zero is not invertible".into()));
        }
        match self.size() {
            Some(q) => Ok(self.pow(a, q - 2)),
            None => {
                // ζ has order 10 up to sign, so units of finite order have a⁻¹ = a⁹ up to sign
                for k in 1..=10 {
                    let cand = self.pow(a, k);
                    if cand == self.one() {
                        return Ok(self.pow(a, k - 1));
                    }
                }
                Err(Error::Domain("element is not a root of unity in Z[ζ5]".into()))
            }
        }
    }

    /// First nonidentity element (in coefficient order) whose 5th power is 1.
    pub fn primitive_fifth_root(&self) -> Result<Elem> {
        if self.p.is_none() {
            return Ok(self.generator());
        }
        let q = self.size().unwrap();
        if !(q - 1).is_multiple_of(5) {
            return Err(Error::Domain(format!("F_{q} has no primitive 5th root of unity")));
        }
        let p = self.p.unwrap() as i64;
        let d = self.degree();
        for idx in 2..q {
            let mut v = Vec::with_capacity(d);
            let mut r = idx as i64;
            for _ in 0..d {
                v.push(r % p);
                r /= p;
            }
            if self.pow(&v, 5) == self.one() && v != self.one() {
                return Ok(v);
            }
        }
        unreachable!("a cyclic group of order divisible by 5 has an element of order 5")
    }
}

/// A 2×2 matrix up to scalars, stored as a normalized representative [a, b, c, d].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjMat2 {
    pub entries: [Elem; 4],
}

impl ProjMat2 {
    pub fn new(ring: &CoefficientRing, entries: [Elem; 4]) -> Result<ProjMat2> {
        let m = ProjMat2 { entries };
        if ring.is_zero(&m.det(ring)) {
            return Err(Error::Domain("singular matrix".into()));
        }
        Ok(m.normalized(ring))
    }

    pub fn identity(ring: &CoefficientRing) -> ProjMat2 {
        ProjMat2 { entries: [ring.one(), ring.zero(), ring.zero(), ring.one()] }
    }

    pub fn det(&self, ring: &CoefficientRing) -> Elem {
        let [a, b, c, d] = &self.entries;
        ring.sub(&ring.mul(a, d), &ring.mul(b, c))
    }

    pub fn trace(&self, ring: &CoefficientRing) -> Elem {
        ring.add(&self.entries[0], &self.entries[3])
    }

    pub fn mul(&self, o: &ProjMat2, ring: &CoefficientRing) -> ProjMat2 {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &o.entries;
        let m = ProjMat2 {
            entries: [
                ring.add(&ring.mul(a, e), &ring.mul(b, g)),
                ring.add(&ring.mul(a, f), &ring.mul(b, h)),
                ring.add(&ring.mul(c, e), &ring.mul(d, g)),
                ring.add(&ring.mul(c, f), &ring.mul(d, h)),
            ],
        };
        m.normalized(ring)
    }

    pub fn pow(&self, k: usize, ring: &CoefficientRing) -> ProjMat2 {
        (0..k).fold(ProjMat2::identity(ring), |acc, _| acc.mul(self, ring))
    }

    /// Field case: first nonzero entry scaled to 1. Cyclotomic case: content 1,
    /// first nonzero coordinate positive.
    pub fn normalized(&self, ring: &CoefficientRing) -> ProjMat2 {
        let first = self.entries.iter().find(|e| !ring.is_zero(e)).expect("nonzero matrix").clone();
        if ring.is_finite() {
            let inv = ring.inv(&first).expect("field element");
            ProjMat2 { entries: self.entries.clone().map(|e| ring.mul(&e, &inv)) }
        } else {
            let coords = self.entries.iter().flatten();
            let g = coords.clone().fold(0i64, |g, &x| num_integer::gcd(g, x));
            let sign = coords.copied().find(|&x| x != 0).map_or(1, i64::signum);
            let s = g * sign;
            ProjMat2 { entries: self.entries.clone().map(|e| e.into_iter().map(|x| x / s).collect()) }
        }
    }

    pub fn is_scalar(&self, ring: &CoefficientRing) -> bool {
        let [a, b, c, d] = &self.entries;
        ring.is_zero(b) && ring.is_zero(c) && a == d
    }

    /// tr²/det, an invariant of the projective class (finite fields only).
    pub fn trace_invariant(&self, ring: &CoefficientRing) -> Result<Elem> {
        let t = self.trace(ring);
        Ok(ring.mul(&ring.mul(&t, &t), &ring.inv(&self.det(ring))?))
    }
}

/// Where the embedding lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingField {
    /// F_{ℓ^m}.
    Finite { ell: u64, m: usize },
    Cyclotomic,
}

impl fmt::Display for EmbeddingField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddingField::Finite { ell, m } => write!(f, "F_{}", ell.pow(*m as u32)),
            EmbeddingField::Cyclotomic => write!(f, "Z[ζ5]"),
        }
    }
}

pub struct Embedding {
    pub ring: CoefficientRing,
    pub epsilon: Elem,
    pub x: ProjMat2,
    pub y: ProjMat2,
}

pub fn build_embedding(field: EmbeddingField, epsilon_power: u32) -> Result<Embedding> {
    if epsilon_power != 1 && epsilon_power != 2 {
        return Err(Error::Domain(format!("epsilon power must be 1 or 2, got {epsilon_power}")));
    }
    let ring = match field {
        EmbeddingField::Finite { ell, m } => CoefficientRing::finite(ell, m)?,
        EmbeddingField::Cyclotomic => CoefficientRing::cyclotomic5(),
    };
    let base = if ring.p == Some(5) { ring.one() } else { ring.primitive_fifth_root()? };
    let eps = ring.pow(&base, epsilon_power as u64);
    let eps_inv = ring.inv(&eps)?;
    let omega = ring.add(&eps, &eps_inv);
    let e2 = ring.mul(&eps, &eps);
    let e2_inv = ring.mul(&eps_inv, &eps_inv);
    let c = ring.sub(&e2, &e2_inv);
    let x = ProjMat2::new(&ring, [ring.neg(&c), omega.clone(), omega.clone(), c])?;
    let y = ProjMat2::new(&ring, [e2, ring.neg(&omega), ring.zero(), e2_inv])?;
    Ok(Embedding { ring, epsilon: eps, x, y })
}

/// x² = y⁵ = (xy)³ = 1 in PGL₂.
pub fn verify_presentation(ring: &CoefficientRing, x: &ProjMat2, y: &ProjMat2) -> bool {
    let xy = x.mul(y, ring);
    x.pow(2, ring).is_scalar(ring) && y.pow(5, ring).is_scalar(ring) && xy.pow(3, ring).is_scalar(ring)
}

/// Reduction of Z[ζ5] at a prime over 11 (ζ5 ↦ 3). Since 11 is prime to 60 it
/// is injective on the finite image.
fn reduce_at_eleven(ring: &CoefficientRing, m: &ProjMat2) -> Result<ProjMat2> {
    let f11 = CoefficientRing::finite(11, 1)?;
    let ev = |e: &Elem| {
        let v = e.iter().rev().fold(0i64, |acc, &c| (acc * 3 + c).rem_euclid(11));
        f11.from_int(v)
    };
    debug_assert_eq!(ring.modulus, vec![1, 1, 1, 1, 1]);
    ProjMat2::new(&f11, [ev(&m.entries[0]), ev(&m.entries[1]), ev(&m.entries[2]), ev(&m.entries[3])])
}

/// Order of ⟨x, y⟩ in PGL₂, by closure (over Z[ζ5] after reduction at 11).
pub fn generated_group_order(ring: &CoefficientRing, x: &ProjMat2, y: &ProjMat2) -> Result<usize> {
    if !ring.is_finite() {
        let f11 = CoefficientRing::finite(11, 1)?;
        return generated_group_order(&f11, &reduce_at_eleven(ring, x)?, &reduce_at_eleven(ring, y)?);
    }
    let id = ProjMat2::identity(ring);
    let mut seen: HashSet<ProjMat2> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in [x, y] {
            let h = g.mul(s, ring);
            if seen.insert(h.clone()) {
                if seen.len() > CLOSURE_CAP {
                    return Err(Error::Domain(format!("group order exceeds the cap {CLOSURE_CAP}")));
                }
                queue.push_back(h);
            }
        }
    }
    Ok(seen.len())
}

/// tr²/det at y, y², y³, y⁴: the order-5 classes in a fixed order.
pub fn trace_fingerprint(ring: &CoefficientRing, y: &ProjMat2) -> Result<Vec<Elem>> {
    (1..5).map(|k| y.pow(k, ring).trace_invariant(ring)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristic_five() {
        let e = build_embedding(EmbeddingField::Finite { ell: 5, m: 1 }, 1).unwrap();
        let r = &e.ring;
        let x = ProjMat2::new(r, [r.from_int(0), r.from_int(2), r.from_int(2), r.from_int(0)]).unwrap();
        let y = ProjMat2::new(r, [r.from_int(1), r.from_int(-2), r.from_int(0), r.from_int(1)]).unwrap();
        assert_eq!(e.x, x);
        assert_eq!(e.y, y);
        assert!(verify_presentation(r, &e.x, &e.y));
        assert_eq!(generated_group_order(r, &e.x, &e.y).unwrap(), 60);
    }

    #[test]
    fn f81_pair() {
        let a = build_embedding(EmbeddingField::Finite { ell: 3, m: 4 }, 1).unwrap();
        let b = build_embedding(EmbeddingField::Finite { ell: 3, m: 4 }, 2).unwrap();
        for e in [&a, &b] {
            assert!(verify_presentation(&e.ring, &e.x, &e.y));
            assert_eq!(generated_group_order(&e.ring, &e.x, &e.y).unwrap(), 60);
        }
        assert_ne!(trace_fingerprint(&a.ring, &a.y).unwrap(), trace_fingerprint(&b.ring, &b.y).unwrap());
    }

    #[test]
    fn cyclotomic_and_degenerate() {
        let e = build_embedding(EmbeddingField::Cyclotomic, 1).unwrap();
        assert!(verify_presentation(&e.ring, &e.x, &e.y));
        assert_eq!(generated_group_order(&e.ring, &e.x, &e.y).unwrap(), 60);
        let r = CoefficientRing::finite(5, 1).unwrap();
        let id = ProjMat2::identity(&r);
        assert!(verify_presentation(&r, &id, &id));
        assert_eq!(generated_group_order(&r, &id, &id).unwrap(), 1);
        assert!(build_embedding(EmbeddingField::Finite { ell: 3, m: 2 }, 1).is_err());
    }
}
