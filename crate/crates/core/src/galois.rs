//! Galois groups of irreducible quartics and quintics, restricted to the
//! question that matters here: is the group A4, S4 or A5?

use crate::arith::{self, is_square};
use crate::error::{Error, Result};
use crate::perm::{Group, Perm};
use crate::poly::{discriminant, sturm_real_roots, ZPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlobalGroup {
    A4,
    S4,
    A5,
    #[serde(rename = "OTHER")]
    Other(String),
}

impl GlobalGroup {
    pub fn is_exceptional(&self) -> bool {
        !matches!(self, GlobalGroup::Other(_))
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            GlobalGroup::A4 => Some(12),
            GlobalGroup::S4 => Some(24),
            GlobalGroup::A5 => Some(60),
            GlobalGroup::Other(_) => None,
        }
    }

    /// The group as permutations of the roots of the stem polynomial.
    pub fn permutation_group(&self) -> Option<Group> {
        match self {
            GlobalGroup::A4 => Some(Group::alternating(4)),
            GlobalGroup::S4 => Some(Group::symmetric(4)),
            GlobalGroup::A5 => Some(Group::alternating(5)),
            GlobalGroup::Other(_) => None,
        }
    }

    pub fn parse(s: &str) -> Option<GlobalGroup> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A4" | "4T4" => Some(GlobalGroup::A4),
            "S4" | "4T5" => Some(GlobalGroup::S4),
            "A5" | "5T4" => Some(GlobalGroup::A5),
            _ => None,
        }
    }
}

impl fmt::Display for GlobalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalGroup::A4 => write!(f, "A4"),
            GlobalGroup::S4 => write!(f, "S4"),
            GlobalGroup::A5 => write!(f, "A5"),
            GlobalGroup::Other(r) => write!(f, "OTHER ({r})"),
        }
    }
}

/// How much we know about irreducibility over Q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    /// Factorization patterns mod small primes rule out every degree split.
    Proved,
    /// No rational root and no contradiction found, but some split was not excluded.
    Screened,
    Reducible(String),
}

const SCREEN_PRIMES: usize = 20;

/// Rational-root check plus factorization patterns modulo the first 20 primes
/// not dividing lc·disc. A degree split d + (n−d) over Q forces every pattern
/// to contain a sub-multiset summing to d.
pub fn irreducibility_screen(f: &ZPoly) -> Result<Irreducibility> {
    let n = f.deg();
    if n == 0 {
        return Err(Error::Domain("constant polynomial".into()));
    }
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    if n == 1 {
        return Ok(Irreducibility::Proved);
    }
    if let Some(r) = f.rational_roots().first() {
        return Ok(Irreducibility::Reducible(format!("rational root {r}")));
    }
    let bad = discriminant(f)? * f.lc();
    let mut open: Vec<usize> = (2..=n / 2).collect();
    let mut used = 0;
    let mut p = 2u64;
    while used < SCREEN_PRIMES && !open.is_empty() {
        if !(&bad % BigInt::from(p)).is_zero() {
            used += 1;
            let pattern = f.reduce_mod(p).factor_degrees();
            open.retain(|&d| subset_sums(&pattern)[d]);
        }
        p = arith::next_prime(p);
    }
    Ok(if open.is_empty() { Irreducibility::Proved } else { Irreducibility::Screened })
}

fn subset_sums(parts: &[usize]) -> Vec<bool> {
    let total: usize = parts.iter().sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in parts {
        for s in (d..=total).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

/// Classical resolvent with roots r1r2+r3r4, r1r3+r2r4, r1r4+r2r3.
/// A non-monic quartic is replaced by its monic associate first.
pub fn resolvent_cubic(f: &ZPoly) -> Result<ZPoly> {
    if f.deg() != 4 || f.is_zero() {
        return Err(Error::Domain(format!("resolvent cubic needs a quartic, got degree {}", f.deg())));
    }
    let g = if f.is_monic() { f.clone() } else { f.monic_associate() };
    let a = g.coeff(3);
    let b = g.coeff(2);
    let c = g.coeff(1);
    let d = g.coeff(0);
    let four = BigInt::from(4);
    Ok(ZPoly::new(vec![
        -(&a * &a * &d - &four * &b * &d + &c * &c),
        &a * &c - &four * &d,
        -b,
        BigInt::one(),
    ]))
}

pub fn is_non_real(f: &ZPoly) -> Result<bool> {
    Ok(sturm_real_roots(f)? < f.deg())
}

/// Galois group of the splitting field of an irreducible quartic or quintic.
pub fn galois_group(f: &ZPoly) -> Result<GlobalGroup> {
    let n = f.deg();
    if n != 4 && n != 5 {
        return Err(Error::Domain(format!("degree {n} unsupported (need 4 or 5)")));
    }
    if let Irreducibility::Reducible(why) = irreducibility_screen(f)? {
        return Ok(GlobalGroup::Other(format!("reducible input: {why}")));
    }
    let g = f.primitive_part().monic_associate();
    let square = is_square(&discriminant(&g)?);
    if n == 4 {
        let r = resolvent_cubic(&g)?;
        let roots = r.rational_roots().len();
        return Ok(match (roots, square) {
            (0, false) => GlobalGroup::S4,
            (0, true) => GlobalGroup::A4,
            (1, _) => GlobalGroup::Other("dihedral or cyclic (D4 or C4)".into()),
            _ => GlobalGroup::Other("V4 (biquadratic)".into()),
        });
    }
    let solvable = !sextic_resolvent(&g)?.integer_roots().is_empty();
    Ok(match (solvable, square) {
        (false, true) => GlobalGroup::A5,
        (false, false) => GlobalGroup::Other("S5".into()),
        (true, true) => GlobalGroup::Other("solvable (D5 or C5)".into()),
        (true, false) => GlobalGroup::Other("solvable (F20)".into()),
    })
}

/// Labels 0..4 on a pentagon: edges i,i+1 against diagonals i,i+2.
fn f20_invariant(r: &[u64], q: u64) -> u64 {
    let mut s: i128 = 0;
    for i in 0..5 {
        s += arith::mul_mod(r[i], r[(i + 1) % 5], q) as i128;
        s -= arith::mul_mod(r[i], r[(i + 2) % 5], q) as i128;
    }
    let s = s.rem_euclid(q as i128) as u64;
    arith::mul_mod(s, s, q)
}

fn f20_coset_reps() -> Vec<Perm> {
    let f20 = Group::generated(5, &[Perm(vec![1, 2, 3, 4, 0]), Perm(vec![0, 2, 4, 1, 3])]);
    debug_assert_eq!(f20.order(), 20);
    let mut reps: Vec<Perm> = Vec::new();
    let mut covered: Vec<Perm> = Vec::new();
    for s in Group::symmetric(5).elements {
        if covered.contains(&s) {
            continue;
        }
        covered.extend(f20.elements.iter().map(|h| s.compose(h)));
        reps.push(s);
    }
    reps
}

/// Degree-6 resolvent whose roots are the F20-invariant
/// (Σ edges x_i x_j − Σ diagonals x_i x_j)² evaluated on a Tschirnhaus image of
/// the roots of the monic quintic g. It has a rational root iff the group is
/// contained in F20. Coefficients are assembled by CRT over primes where g
/// splits completely; the transformation is changed until the resolvent is
/// squarefree.
pub fn sextic_resolvent(g: &ZPoly) -> Result<ZPoly> {
    if g.deg() != 5 || !g.is_monic() {
        return Err(Error::Domain("sextic resolvent needs a monic quintic".into()));
    }
    let reps = f20_coset_reps();
    let disc = discriminant(g)?;
    for k in 0u64..8 {
        let b = g.root_bound();
        let bt = if k == 0 { b.clone() } else { &b * &b + BigInt::from(k) * &b };
        let theta_bound = BigInt::from(100) * bt.pow(4);
        let bound = BigInt::from(64) * theta_bound.pow(6) * 2;
        let mut modulus = BigInt::one();
        let mut acc = vec![BigInt::zero(); 7];
        let mut q = 1u64 << 31;
        while modulus <= bound {
            q = arith::next_prime(q);
            if (&disc % BigInt::from(q)).is_zero() {
                continue;
            }
            let roots = g.reduce_mod(q).roots();
            if roots.len() != 5 {
                continue;
            }
            let t: Vec<u64> = roots
                .iter()
                .map(|&r| if k == 0 { r } else { (arith::mul_mod(r, r, q) + arith::mul_mod(k, r, q)) % q })
                .collect();
            // ∏ (y − θ_σ) mod q, lowest degree first
            let mut poly = vec![1u64];
            for s in &reps {
                let permuted: Vec<u64> = (0..5).map(|i| t[s.apply(i)]).collect();
                let th = f20_invariant(&permuted, q);
                let mut next = vec![0u64; poly.len() + 1];
                for (i, &c) in poly.iter().enumerate() {
                    next[i + 1] = (next[i + 1] + c) % q;
                    next[i] = (next[i] + q - arith::mul_mod(c, th, q)) % q;
                }
                poly = next;
            }
            let qb = BigInt::from(q);
            for i in 0..7 {
                acc[i] = crt(&acc[i], &modulus, &BigInt::from(poly[i]), &qb);
            }
            modulus *= &qb;
        }
        let half = &modulus / 2;
        let coeffs: Vec<BigInt> = acc
            .into_iter()
            .map(|c| if c > half { c - &modulus } else { c })
            .collect();
        let r = ZPoly::new(coeffs);
        if r.is_squarefree() {
            return Ok(r);
        }
    }
    Err(Error::Inconsistent("no squarefree sextic resolvent found".into()))
}

fn crt(a: &BigInt, m: &BigInt, b: &BigInt, n: &BigInt) -> BigInt {
    // x ≡ a (m), x ≡ b (n), m and n coprime
    let inv = crate::poly::mod_inverse(&m.mod_floor(n), n).expect("coprime moduli");
    let t = ((b - a) * inv).mod_floor(n);
    let x = a + m * t;
    x.mod_floor(&(m * n))
}

/// Frobenius cycle types at good primes below `bound`, used to cross-check a verdict:
/// each observed type must occur in the claimed group.
pub fn frobenius_cycle_types(f: &ZPoly, bound: u64) -> Result<Vec<Vec<usize>>> {
    let bad = discriminant(f)? * f.lc();
    let mut out = Vec::new();
    for p in arith::primes_up_to(bound) {
        if (&bad % BigInt::from(p)).is_zero() {
            continue;
        }
        let mut d = f.reduce_mod(p).factor_degrees();
        d.sort_unstable();
        if !out.contains(&d) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Cycle types realized by the permutation group of a verdict.
pub fn cycle_types_of(group: &GlobalGroup) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    if let Some(g) = group.permutation_group() {
        for e in g.elements {
            let c = e.cycle_type();
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolvent_of_x4_plus_1() {
        let r = resolvent_cubic(&ZPoly::from_i64(&[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(r, ZPoly::from_i64(&[0, -4, 0, 1]));
    }

    #[test]
    fn corpus_groups() {
        assert_eq!(galois_group(&ZPoly::from_i64(&[3, 11, -7, -1, 1])).unwrap(), GlobalGroup::S4);
        assert_eq!(galois_group(&ZPoly::from_i64(&[9, 0, 6, 3, 0, 1])).unwrap(), GlobalGroup::A5);
        assert!(matches!(galois_group(&ZPoly::from_i64(&[1, 0, 0, 0, 1])).unwrap(), GlobalGroup::Other(_)));
    }

    #[test]
    fn solvable_quintics() {
        // x^5 - 2: F20; x^5 - 5x + 12: D5; x^5 + 20x + 16: A5
        assert!(matches!(galois_group(&ZPoly::from_i64(&[-2, 0, 0, 0, 0, 1])).unwrap(), GlobalGroup::Other(_)));
        assert!(matches!(galois_group(&ZPoly::from_i64(&[12, -5, 0, 0, 0, 1])).unwrap(), GlobalGroup::Other(_)));
        assert_eq!(galois_group(&ZPoly::from_i64(&[16, 20, 0, 0, 0, 1])).unwrap(), GlobalGroup::A5);
        assert_eq!(
            galois_group(&ZPoly::from_i64(&[1, -1, 0, 0, 0, 1])).unwrap(),
            GlobalGroup::Other("S5".into())
        );
    }

    #[test]
    fn reducible_inputs() {
        let f = ZPoly::from_i64(&[2, 0, 3, 0, 1]); // (x^2+1)(x^2+2)
        assert!(matches!(irreducibility_screen(&f).unwrap(), Irreducibility::Screened | Irreducibility::Reducible(_)));
        assert!(matches!(galois_group(&ZPoly::from_i64(&[-1, 0, 0, 0, 1])).unwrap(), GlobalGroup::Other(_)));
    }
}
