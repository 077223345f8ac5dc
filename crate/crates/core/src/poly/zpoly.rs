use crate::arith;
use crate::error::{Error, Result};
use crate::poly::linalg::det_bareiss;
use crate::poly::PrimeFieldPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// Polynomial with integer coefficients, lowest degree first. The zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// x
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// The monomial c·x^k.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, treating the zero polynomial as degree 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder: lc(g)^(deg f - deg g + 1) · f mod g.
    pub fn pseudo_rem(&self, g: &ZPoly) -> ZPoly {
        assert!(!g.is_zero(), "division by zero polynomial");
        let dg = g.deg();
        let lg = g.lc();
        let mut r = self.clone();
        if r.is_zero() || r.deg() < dg {
            return r;
        }
        let mut steps = r.deg() - dg + 1;
        while !r.is_zero() && r.deg() >= dg {
            let shift = r.deg() - dg;
            let lr = r.lc();
            r = r.scale(&lg) - g.scale(&lr).shift(shift);
            steps -= 1;
        }
        for _ in 0..steps {
            r = r.scale(&lg);
        }
        r
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// Exact division; None if `g` does not divide `self` over Z.
    pub fn div_exact(&self, g: &ZPoly) -> Option<ZPoly> {
        if g.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        let mut r = self.clone();
        let dg = g.deg();
        if r.deg() < dg {
            return None;
        }
        let mut q = vec![BigInt::zero(); r.deg() - dg + 1];
        let lg = g.lc();
        while !r.is_zero() && r.deg() >= dg {
            let (qc, rem) = r.lc().div_rem(&lg);
            if !rem.is_zero() {
                return None;
            }
            let s = r.deg() - dg;
            q[s] = qc.clone();
            r = r - g.scale(&qc).shift(s);
        }
        if r.is_zero() {
            Some(ZPoly::new(q))
        } else {
            None
        }
    }

    /// Greatest common divisor over Q, returned primitive with positive leading coefficient.
    pub fn gcd(&self, other: &ZPoly) -> ZPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// f(x + c)
    pub fn translate(&self, c: &BigInt) -> ZPoly {
        let xc = ZPoly::new(vec![c.clone(), BigInt::one()]);
        self.compose(&xc)
    }

    /// f(-x)
    pub fn negate_x(&self) -> ZPoly {
        ZPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// f(g(x))
    pub fn compose(&self, g: &ZPoly) -> ZPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(ZPoly::zero(), |acc, c| &(&acc * g) + &ZPoly::constant(c.clone()))
    }

    /// Monic integer polynomial ±a^(n-1)·f(x/a) with a = |lc(f)|; its roots are a times those of f.
    pub fn monic_associate(&self) -> ZPoly {
        let n = self.deg();
        let a = self.lc();
        let mut sign_fix = BigInt::one();
        if a.is_negative() {
            sign_fix = -BigInt::one();
        }
        let a_abs = a.abs();
        let mut v = Vec::with_capacity(n + 1);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i == n {
                v.push(BigInt::one());
            } else {
                // c_i · a^(n-1-i), sign-normalized so the result is monic
                v.push(c * a_abs.pow((n - 1 - i) as u32) * &sign_fix);
            }
        }
        ZPoly::new(v)
    }

    pub fn reduce_mod(&self, p: u64) -> PrimeFieldPoly {
        let pb = BigInt::from(p);
        PrimeFieldPoly::new(
            p,
            self.coeffs
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        )
    }

    /// Coefficients reduced into [0, m).
    pub fn reduce_big(&self, m: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| c.mod_floor(m)).collect())
    }

    /// Upper bound on the absolute value of every complex root (Cauchy).
    pub fn root_bound(&self) -> BigInt {
        let lc = self.lc().abs();
        let m = self.coeffs[..self.deg()]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigInt::one() + m.div_ceil(&lc)
    }

    /// Rational roots, ascending, without multiplicity.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        if self.deg() == 0 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut f = self.primitive_part();
        if f.coeffs[0].is_zero() {
            roots.push(BigRational::zero());
            let k = f.coeffs.iter().position(|c| !c.is_zero()).unwrap();
            f = ZPoly::new(f.coeffs[k..].to_vec());
        }
        if f.deg() > 0 {
            let g = f.monic_associate();
            let a = f.lc().abs();
            for r in integer_roots_monic(&g) {
                // roots of the associate are |a| times the roots of f
                let cand = BigRational::new(r, a.clone());
                if self.eval_rational(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }

    pub fn integer_roots(&self) -> Vec<BigInt> {
        self.rational_roots()
            .into_iter()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
            .collect()
    }
}

/// Integer roots of a monic polynomial with nonzero constant term: every such
/// root is a simple or multiple root modulo a suitable prime q; candidates
/// are recovered from q-adic lifts and verified exactly.
fn integer_roots_monic(g: &ZPoly) -> Vec<BigInt> {
    let sqf = {
        let d = g.gcd(&g.derivative());
        if d.deg() == 0 {
            g.clone()
        } else {
            g.div_exact(&d).expect("gcd divides").primitive_part()
        }
    };
    let bound = sqf.root_bound();
    let mut q = 3u64;
    loop {
        let r = sqf.reduce_mod(q);
        if r.deg() == sqf.deg() && r.is_squarefree() {
            break;
        }
        q = arith::next_prime(q);
    }
    let fq = sqf.reduce_mod(q);
    let roots_q = fq.roots();
    let qb = BigInt::from(q);
    let mut modulus = qb.clone();
    let two_bound = &bound * 2 + 1;
    let mut lifts: Vec<BigInt> = roots_q.iter().map(|&r| BigInt::from(r)).collect();
    let deriv = sqf.derivative();
    // Newton lifting r <- r - f(r)/f'(r) mod q^(2k)
    while modulus <= two_bound {
        let next = &modulus * &modulus;
        lifts = lifts
            .into_iter()
            .map(|r| {
                let fr = sqf.eval(&r);
                let dr = deriv.eval(&r).mod_floor(&next);
                let inv = mod_inverse(&dr, &next).expect("simple root mod q");
                (r - fr * inv).mod_floor(&next)
            })
            .collect();
        modulus = next;
    }
    let half = &modulus / 2;
    let mut out = Vec::new();
    for r in lifts {
        let cand = if r > half { r - &modulus } else { r };
        if sqf.eval(&cand).is_zero() {
            out.push(cand);
        }
    }
    out
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Resultant via the Sylvester determinant.
pub fn resultant(f: &ZPoly, g: &ZPoly) -> BigInt {
    if f.is_zero() || g.is_zero() {
        return BigInt::zero();
    }
    let m = f.deg();
    let n = g.deg();
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    if m == 0 {
        return f.lc().pow(n as u32);
    }
    if n == 0 {
        return g.lc().pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            mat[i][i + j] = f.coeffs[m - j].clone();
        }
    }
    for i in 0..m {
        for j in 0..=n {
            mat[n + i][i + j] = g.coeffs[n - j].clone();
        }
    }
    det_bareiss(&mat)
}

/// disc(f) = (-1)^(n(n-1)/2) · res(f, f') / lc(f).
pub fn discriminant(f: &ZPoly) -> Result<BigInt> {
    let n = match f.degree() {
        None | Some(0) => {
            return Err(Error::Domain(
                "discriminant needs a polynomial of degree at least 1".into(),
            ))
        }
        Some(n) => n,
    };
    if n == 1 {
        return Ok(BigInt::one());
    }
    let r = resultant(f, &f.derivative());
    let d = r / f.lc();
    if (n * (n - 1) / 2) % 2 == 1 {
        Ok(-d)
    } else {
        Ok(d)
    }
}

fn sign_changes(signs: &[i8]) -> usize {
    let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sgn(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of distinct real roots of a squarefree polynomial.
pub fn sturm_real_roots(f: &ZPoly) -> Result<usize> {
    if f.deg() == 0 {
        return Err(Error::Domain("real-root count needs degree at least 1".into()));
    }
    if !f.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        let (a, b) = (&seq[n - 2], &seq[n - 1]);
        if b.deg() == 0 {
            break;
        }
        let delta = a.deg() - b.deg() + 1;
        let mut r = a.pseudo_rem(b);
        // undo the sign of lc(b)^delta so the sequence keeps true remainder signs
        if b.lc().is_negative() && delta % 2 == 1 {
            r = -r;
        }
        let r = -r;
        if r.is_zero() {
            break;
        }
        let c = r.content();
        seq.push(ZPoly::new(r.coeffs.iter().map(|x| x / &c).collect()));
    }
    let at_pos: Vec<i8> = seq.iter().map(|p| sgn(&p.lc())).collect();
    let at_neg: Vec<i8> = seq
        .iter()
        .map(|p| if p.deg() % 2 == 0 { sgn(&p.lc()) } else { -sgn(&p.lc()) })
        .collect();
    Ok(sign_changes(&at_neg) - sign_changes(&at_pos))
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ZPoly::new(v)
    }
}

impl Add for ZPoly {
    type Output = ZPoly;
    fn add(self, o: ZPoly) -> ZPoly {
        &self + &o
    }
}

impl Sub for ZPoly {
    type Output = ZPoly;
    fn sub(self, o: ZPoly) -> ZPoly {
        &self - &o
    }
}

impl Mul for ZPoly {
    type Output = ZPoly;
    fn mul(self, o: ZPoly) -> ZPoly {
        &self * &o
    }
}

impl Neg for ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ZPoly {
    type Err = Error;

    /// Accepts a JSON coefficient array (lowest degree first) or an
    /// expression such as `x^4 - x^3 - 7*x^2 + 11*x + 3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let v: Vec<serde_json::Number> = serde_json::from_str(t)
                .map_err(|e| Error::Format(format!("bad coefficient array: {e}")))?;
            let c = v
                .iter()
                .map(|n| {
                    BigInt::from_str(&n.to_string())
                        .map_err(|_| Error::Format(format!("non-integer coefficient {n}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(ZPoly::new(c));
        }
        parse_expr(t)
    }
}

fn parse_expr(s: &str) -> Result<ZPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Format("empty polynomial".into()));
    }
    let bad = || Error::Format(format!("cannot parse polynomial '{s}'"));
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut acc = ZPoly::zero();
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term.strip_prefix('+').unwrap_or(&term)),
        };
        let (coef, power) = match body.find('x') {
            None => (BigInt::from_str(body).map_err(|_| bad())?, 0usize),
            Some(pos) => {
                let cpart = body[..pos].trim_end_matches('*');
                let c = if cpart.is_empty() {
                    BigInt::one()
                } else {
                    BigInt::from_str(cpart).map_err(|_| bad())?
                };
                let rest = &body[pos + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|e| e.parse::<usize>().ok())
                        .ok_or_else(bad)?
                };
                (c, k)
            }
        };
        let coef = if neg { -coef } else { coef };
        acc = &acc + &ZPoly::monomial(coef, power);
    }
    Ok(acc)
}

impl Serialize for ZPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::bigjson::vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for ZPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        crate::bigjson::vec::deserialize(d).map(ZPoly::new)
    }
}
