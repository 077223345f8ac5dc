//! Dirichlet characters with exact root-of-unity values.
//!
//! A character mod N is stored prime by prime. For odd p the value at the
//! canonical generator g (smallest primitive root mod p², hence mod every
//! p^k) is kept as a fraction a/b in [0, 1), meaning ζ_b^a. For 2^k the
//! generators are −1 (k ≥ 2) and 5 (k ≥ 3).

use crate::arith::{self, canonical_primitive_root};
use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

type Q = Ratio<u64>;

fn frac(r: Q) -> Q {
    let f = r.fract();
    if f < Q::zero() {
        f + Q::one()
    } else {
        f
    }
}

fn neg(r: Q) -> Q {
    if r.is_zero() {
        r
    } else {
        Q::one() - r
    }
}

/// One local component: values at the canonical generators of (Z/p^k)^×.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Part {
    k: u32,
    vals: Vec<Q>,
}

fn generator_count(p: u64, k: u32) -> usize {
    match (p, k) {
        (_, 0) => 0,
        (2, 1) => 0,
        (2, 2) => 1,
        (2, _) => 2,
        _ => 1,
    }
}

/// Orders of the canonical generators of (Z/p^k)^×.
fn generator_orders(p: u64, k: u32) -> Vec<u64> {
    match (p, k) {
        (_, 0) | (2, 1) => vec![],
        (2, 2) => vec![2],
        (2, _) => vec![2, 1 << (k - 2)],
        _ => vec![p.pow(k - 1) * (p - 1)],
    }
}

fn generator_labels(p: u64, k: u32) -> Vec<String> {
    let pk = p.pow(k);
    match (p, k) {
        (_, 0) | (2, 1) => vec![],
        (2, 2) => vec![format!("{pk}:-1")],
        (2, _) => vec![format!("{pk}:-1"), format!("{pk}:5")],
        _ => vec![format!("{pk}:{}", canonical_primitive_root(p))],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletChar {
    modulus: u64,
    parts: BTreeMap<u64, Part>,
}

impl DirichletChar {
    pub fn trivial(modulus: u64) -> DirichletChar {
        assert!(modulus >= 1);
        let parts = arith::factorize_u64(modulus)
            .into_iter()
            .map(|(p, k)| (p, Part { k, vals: vec![Q::zero(); generator_count(p, k)] }))
            .collect();
        DirichletChar { modulus, parts }
    }

    /// A character of (Z/p^k)^× from its values at the canonical generators,
    /// each given as a fraction of a full turn.
    pub fn on_prime_power(p: u64, k: u32, vals: &[(u64, u64)]) -> Result<DirichletChar> {
        if !arith::is_prime_u64(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if vals.len() != generator_count(p, k) {
            return Err(Error::Domain(format!(
                "(Z/{}Z)^× has {} canonical generators, got {} values",
                p.pow(k),
                generator_count(p, k),
                vals.len()
            )));
        }
        let mut v = Vec::new();
        for (&(a, b), ord) in vals.iter().zip(generator_orders(p, k)) {
            if b == 0 {
                return Err(Error::Domain("zero denominator".into()));
            }
            let q = frac(Q::new(a % b, b));
            if ord % q.denom() != 0 {
                return Err(Error::Domain(format!(
                    "value {a}/{b} has order {} not dividing the generator order {ord}",
                    q.denom()
                )));
            }
            v.push(q);
        }
        let mut parts = BTreeMap::new();
        if k > 0 {
            parts.insert(p, Part { k, vals: v });
        }
        Ok(DirichletChar { modulus: p.pow(k), parts })
    }

    /// Build from the serialized form: exponents in Z/order keyed by generator label.
    pub fn from_exponents(modulus: u64, order: u64, exponents: &BTreeMap<String, u64>) -> Result<DirichletChar> {
        if modulus == 0 || order == 0 {
            return Err(Error::Domain("modulus and order must be positive".into()));
        }
        let mut chi = DirichletChar::trivial(1);
        for (p, k) in arith::factorize_u64(modulus) {
            let labels = generator_labels(p, k);
            let vals: Vec<(u64, u64)> = labels
                .iter()
                .map(|l| (exponents.get(l).copied().unwrap_or(0) % order, order))
                .collect();
            chi = chi.mul(&DirichletChar::on_prime_power(p, k, &vals)?);
        }
        for l in exponents.keys() {
            if !chi.labels().contains(l) {
                return Err(Error::Domain(format!("unknown generator label {l} for modulus {modulus}")));
            }
        }
        if chi.order() != order {
            return Err(Error::Domain(format!("declared order {order} but the exponents give order {}", chi.order())));
        }
        Ok(chi)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.parts
            .values()
            .flat_map(|p| p.vals.iter())
            .fold(1, |acc, v| arith::lcm_u64(acc, *v.denom()))
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn labels(&self) -> Vec<String> {
        self.parts.iter().flat_map(|(&p, part)| generator_labels(p, part.k)).collect()
    }

    /// Exponents in Z/order, keyed by generator label.
    pub fn exponents(&self) -> BTreeMap<String, u64> {
        let n = self.order();
        let mut out = BTreeMap::new();
        for (&p, part) in &self.parts {
            for (l, v) in generator_labels(p, part.k).into_iter().zip(&part.vals) {
                out.insert(l, v.numer() * (n / v.denom()));
            }
        }
        out
    }

    pub fn conductor_exponent(&self, p: u64) -> u32 {
        let Some(part) = self.parts.get(&p) else { return 0 };
        if p == 2 {
            match part.vals.as_slice() {
                [] => 0,
                [m1] => {
                    if m1.is_zero() {
                        0
                    } else {
                        2
                    }
                }
                [m1, five] => {
                    if !five.is_zero() {
                        2 + five.denom().trailing_zeros()
                    } else if !m1.is_zero() {
                        2
                    } else {
                        0
                    }
                }
                _ => unreachable!(),
            }
        } else {
            let b = *part.vals[0].denom();
            if b == 1 {
                0
            } else {
                1 + arith::valuation(&b.into(), p).unwrap_or(0)
            }
        }
    }

    pub fn conductor(&self) -> u64 {
        self.parts.keys().map(|&p| p.pow(self.conductor_exponent(p))).product()
    }

    /// The same character viewed modulo a multiple of its modulus.
    pub fn lift(&self, modulus: u64) -> Result<DirichletChar> {
        if !modulus.is_multiple_of(self.modulus) {
            return Err(Error::Domain(format!("{} does not divide {modulus}", self.modulus)));
        }
        let mut out = DirichletChar::trivial(modulus);
        for (p, part) in out.parts.iter_mut() {
            if let Some(old) = self.parts.get(p) {
                if *p == 2 {
                    if old.k >= 2 {
                        part.vals[0] = old.vals[0];
                    }
                    if old.k >= 3 {
                        part.vals[1] = old.vals[1];
                    }
                } else if old.k >= 1 {
                    part.vals[0] = old.vals[0];
                }
            }
        }
        Ok(out)
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> DirichletChar {
        let mut out = DirichletChar::trivial(self.conductor());
        for (p, part) in out.parts.iter_mut() {
            let old = &self.parts[p];
            if *p == 2 {
                part.vals[0] = old.vals[0];
                if part.k >= 3 {
                    part.vals[1] = old.vals[1];
                }
            } else {
                part.vals[0] = old.vals[0];
            }
        }
        out
    }

    fn combine(&self, other: &DirichletChar, f: impl Fn(Q, Q) -> Q) -> DirichletChar {
        let m = arith::lcm_u64(self.modulus, other.modulus);
        let a = self.lift(m).unwrap();
        let b = other.lift(m).unwrap();
        let mut out = a.clone();
        for (p, part) in out.parts.iter_mut() {
            for (i, v) in part.vals.iter_mut().enumerate() {
                *v = frac(f(*v, b.parts[p].vals[i]));
            }
        }
        out
    }

    pub fn mul(&self, other: &DirichletChar) -> DirichletChar {
        self.combine(other, |x, y| x + y)
    }

    pub fn inverse(&self) -> DirichletChar {
        self.combine(&DirichletChar::trivial(1), |x, _| neg(x))
    }

    pub fn pow(&self, e: i64) -> DirichletChar {
        let k = e.unsigned_abs();
        let base = self.combine(&DirichletChar::trivial(1), |x, _| frac(x * Q::from(k)));
        if e < 0 {
            base.inverse()
        } else {
            base
        }
    }

    pub fn square(&self) -> DirichletChar {
        self.pow(2)
    }

    /// The component on (Z/p^k)^× as a character of that modulus.
    pub fn component(&self, p: u64) -> DirichletChar {
        match self.parts.get(&p) {
            None => DirichletChar::trivial(1),
            Some(part) => {
                let mut parts = BTreeMap::new();
                parts.insert(p, part.clone());
                DirichletChar { modulus: p.pow(part.k), parts }
            }
        }
    }

    pub fn primes(&self) -> Vec<u64> {
        self.parts.keys().copied().collect()
    }

    /// Removes the ℓ-primary part: the unique χ' of order prime to ℓ with χ = χ_ℓ·χ'.
    /// This is what reduction mod λ does to values.
    pub fn prime_to_part(&self, ell: u64) -> DirichletChar {
        self.combine(&DirichletChar::trivial(1), |x, _| {
            let b = *x.denom();
            let mut lpart = 1u64;
            while b % (lpart * ell) == 0 {
                lpart *= ell;
            }
            let rest = b / lpart;
            if rest == 1 {
                return Q::zero();
            }
            let inv = arith::inv_mod(lpart % rest, rest).unwrap();
            Q::new(arith::mul_mod(*x.numer() % rest, inv, rest), rest)
        })
    }

    /// χ(a) as a fraction of a full turn; `None` when gcd(a, N) > 1.
    pub fn eval(&self, a: i64) -> Option<Q> {
        let a_mod = a.rem_euclid(self.modulus.max(1) as i64) as u64;
        if a_mod.gcd(&self.modulus) != 1 && self.modulus > 1 {
            return None;
        }
        let mut acc = Q::zero();
        for (&p, part) in &self.parts {
            let pk = p.pow(part.k);
            let x = a_mod % pk;
            let logs = discrete_logs(p, part.k, x);
            for (l, v) in logs.iter().zip(&part.vals) {
                acc = frac(acc + *v * Q::from(*l));
            }
        }
        Some(acc)
    }

    /// χ(a) as an exponent in Z/order.
    pub fn eval_exponent(&self, a: i64) -> Option<u64> {
        let n = self.order();
        self.eval(a).map(|q| q.numer() * (n / q.denom()))
    }
}

/// Exponents of x in terms of the canonical generators of (Z/p^k)^×.
fn discrete_logs(p: u64, k: u32, x: u64) -> Vec<u64> {
    let pk = p.pow(k);
    match (p, k) {
        (_, 0) | (2, 1) => vec![],
        (2, _) => {
            let s = if x % 4 == 1 { 0 } else { 1 };
            let y = if s == 0 { x } else { pk - x };
            if k == 2 {
                return vec![s];
            }
            let mut t = 1u64;
            let mut e = 0u64;
            while t != y % pk {
                t = t * 5 % pk;
                e += 1;
            }
            vec![s, e]
        }
        _ => {
            let g = canonical_primitive_root(p);
            let mut t = 1u64;
            let mut e = 0u64;
            while t != x {
                t = arith::mul_mod(t, g, pk);
                e += 1;
            }
            vec![e]
        }
    }
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial mod {}", self.modulus);
        }
        let ex: Vec<String> = self.exponents().into_iter().map(|(l, e)| format!("{l}^{e}")).collect();
        write!(f, "order {} mod {} [{}]", self.order(), self.modulus, ex.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct CharRepr {
    modulus: u64,
    order: u64,
    exponents: BTreeMap<String, u64>,
}

impl Serialize for DirichletChar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharRepr { modulus: self.modulus, order: self.order(), exponents: self.exponents() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletChar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CharRepr::deserialize(d)?;
        DirichletChar::from_exponents(r.modulus, r.order, &r.exponents).map_err(serde::de::Error::custom)
    }
}

/// A character of order prime to ℓ, thought of through its mod-λ values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModLChar {
    #[serde(flatten)]
    pub chi: DirichletChar,
    pub ell: u64,
}

impl ModLChar {
    pub fn trivial(modulus: u64, ell: u64) -> ModLChar {
        ModLChar { chi: DirichletChar::trivial(modulus), ell }
    }

    pub fn is_trivial(&self) -> bool {
        self.chi.is_trivial()
    }

    pub fn order(&self) -> u64 {
        self.chi.order()
    }

    pub fn mul(&self, other: &ModLChar) -> ModLChar {
        assert_eq!(self.ell, other.ell);
        ModLChar { chi: self.chi.mul(&other.chi), ell: self.ell }
    }
}

impl fmt::Display for ModLChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod λ | {})", self.chi, self.ell)
    }
}

pub fn reduce_mod_lambda(chi: &DirichletChar, ell: u64) -> Result<ModLChar> {
    let n = chi.order();
    if n.is_multiple_of(ell) {
        return Err(Error::OrderNotPrimeToEll { order: n, ell });
    }
    Ok(ModLChar { chi: chi.clone(), ell })
}

pub fn conductor(chi: &DirichletChar) -> u64 {
    chi.conductor()
}

/// Characters of U_p with conductor exponent ≤ c_max and order prime to ℓ,
/// each as a primitive character mod p^c. Sorted by conductor exponent,
/// then order, then values.
pub fn enumerate_local_twists(p: u64, c_max: u32, ell: u64) -> Vec<DirichletChar> {
    let k = if p == 2 && c_max == 1 { 0 } else { c_max };
    let mut out: Vec<DirichletChar> = Vec::new();
    let orders = generator_orders(p, k);
    let mut idx = vec![0u64; orders.len()];
    loop {
        let vals: Vec<(u64, u64)> = idx.iter().zip(&orders).map(|(&i, &o)| (i, o)).collect();
        let chi = DirichletChar::on_prime_power(p, k, &vals).expect("valid generator values");
        if ell == 0 || !chi.order().is_multiple_of(ell) {
            out.push(chi.primitive());
        }
        // odometer over all value tuples
        let mut j = 0;
        loop {
            if j == idx.len() {
                out.sort_by(|a, b| {
                    (a.conductor_exponent(p), a.order())
                        .cmp(&(b.conductor_exponent(p), b.order()))
                        .then_with(|| a.cmp(b))
                });
                out.dedup();
                return out;
            }
            idx[j] += 1;
            if idx[j] < orders[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Character of U_p cutting out the quadratic extension Q_p(√d), d = p^v·u,
/// given v mod 2 and u modulo p (odd p) or modulo 8 (p = 2).
pub fn quadratic_character(p: u64, v_odd: bool, unit: u64) -> DirichletChar {
    if p == 2 {
        let m1 = if unit % 4 == 3 { (1, 2) } else { (0, 2) };
        let five = if v_odd { (1, 2) } else { (0, 2) };
        DirichletChar::on_prime_power(2, 3, &[m1, five]).unwrap().primitive()
    } else if v_odd {
        legendre(p)
    } else {
        DirichletChar::trivial(1)
    }
}

/// The Legendre symbol mod an odd prime.
pub fn legendre(p: u64) -> DirichletChar {
    DirichletChar::on_prime_power(p, 1, &[(1, 2)]).unwrap()
}

/// The canonical character of exact order e on (Z/p)^×, e | p − 1: g ↦ ζ_e.
pub fn canonical_tame(p: u64, e: u64) -> Result<DirichletChar> {
    if e == 1 {
        return Ok(DirichletChar::trivial(1));
    }
    if p == 2 || !(p - 1).is_multiple_of(e) {
        return Err(Error::Inconsistent(format!("no tame character of order {e} at {p}")));
    }
    DirichletChar::on_prime_power(p, 1, &[(1, e)])
}

/// The canonical wild character of order p on U_p (odd p), conductor p²: g ↦ ζ_p.
pub fn canonical_wild(p: u64) -> DirichletChar {
    DirichletChar::on_prime_power(p, 2, &[(1, p)]).unwrap()
}

/// Value of χ at a unit, checked against a brute-force power table (used in tests).
pub fn check_units_mod(chi: &DirichletChar) -> bool {
    let n = chi.modulus();
    let g = |a: u64| chi.eval(a as i64);
    (1..n.max(2)).filter(|a| a.gcd(&n) == 1).all(|a| {
        (1..n.max(2)).filter(|b| b.gcd(&n) == 1).all(|b| {
            let ab = a * b % n.max(1);
            match (g(a), g(b), g(ab)) {
                (Some(x), Some(y), Some(z)) => frac(x + y) == z,
                _ => false,
            }
        })
    })
}
