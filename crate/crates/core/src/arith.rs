//! Integer helpers shared across modules: valuations, small primes,
//! modular exponentiation, primitive roots and integer factorization.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// p-adic valuation of a nonzero integer. Returns `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Removes all factors of `p`; returns (valuation, cofactor).
pub fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = valuation(n, p).unwrap_or(0);
    let m = n / BigInt::from(p).pow(v);
    (v, m)
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime_u64(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

pub fn is_prime(n: &BigInt) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => {
            if n.sign() != Sign::Plus {
                return false;
            }
            let u: BigUint = n.magnitude().clone();
            num_prime::nt_funcs::is_prime(&u, None).probably()
        }
    }
}

/// Primes in increasing order, starting at 2.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime_u64(k) {
        k += 1;
    }
    k
}

/// Prime factorization of a nonzero integer's absolute value, primes ascending.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let m: BigUint = n.magnitude().clone();
    if m.is_zero() || m.is_one() {
        return Vec::new();
    }
    let fac = num_prime::nt_funcs::factorize(m);
    fac.into_iter()
        .map(|(p, e)| (BigInt::from(p), e as u32))
        .collect()
}

/// Prime support of a nonzero integer.
pub fn prime_support(n: &BigInt) -> Vec<BigInt> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let phi = euler_phi(m);
    let mut ord = phi;
    for (q, _) in factorize_u64(phi) {
        while ord.is_multiple_of(q) && pow_mod(a, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Smallest positive integer that is a primitive root modulo p and p^2,
/// hence modulo every power of the odd prime p.
pub fn canonical_primitive_root(p: u64) -> u64 {
    assert!(p > 2 && is_prime_u64(p));
    let p2 = p * p;
    (2..p2)
        .find(|&g| {
            g % p != 0 && multiplicative_order(g, p) == p - 1 && multiplicative_order(g, p2) == p * (p - 1)
        })
        .expect("primitive root exists")
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / a.gcd(&b) * b
}

pub fn big_to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}

pub fn abs_big(n: &BigInt) -> BigInt {
    n.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(-205379), 59), Some(3));
        assert_eq!(valuation(&BigInt::from(12), 5), Some(0));
        assert_eq!(valuation(&BigInt::zero(), 5), None);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(canonical_primitive_root(3), 2);
        assert_eq!(canonical_primitive_root(7), 3);
        assert_eq!(canonical_primitive_root(23), 5);
        assert_eq!(canonical_primitive_root(29), 2);
        assert_eq!(multiplicative_order(canonical_primitive_root(59), 59 * 59), 59 * 58);
    }

    #[test]
    fn factoring() {
        let f = factorize(&BigInt::from(3470769));
        assert_eq!(f, vec![(BigInt::from(3), 8), (BigInt::from(23), 2)]);
        assert!(is_square(&BigInt::from(3470769)));
    }
}
