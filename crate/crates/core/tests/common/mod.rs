//! Oracles and property checks shared by the integration suites. Each check
//! returns `Err(description)` on the first counterexample.

#![allow(dead_code)]

use exceptional::arith;
use exceptional::catalog::{self, builtin_corpus, detect, parse_catalog, CatalogFormat, FieldRecord};
use exceptional::character::{enumerate_local_twists, reduce_mod_lambda, DirichletChar};
use exceptional::embedding::{build_embedding, generated_group_order, trace_fingerprint, verify_presentation, EmbeddingField};
use exceptional::galois::{frobenius_cycle_types, galois_group, GlobalGroup};
use exceptional::local::{analyze, local_type, LocalGaloisType};
use exceptional::poly::{discriminant, factor_mod_p, padic_splitting, resultant, sturm_real_roots, PrimeFieldPoly};
use exceptional::recipe::{self, enumerate_serre_types, epsilon_p, evaluate_twist, local_recipe, n_p, weight_set, TwistBound};
use exceptional::ZPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::Rng;
use std::collections::BTreeSet;

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------- golden corpus

pub struct Golden {
    pub label: &'static str,
    pub coeffs: &'static [i64],
    pub ell: u64,
}

pub const GOLDEN: [Golden; 4] = [
    Golden { label: "qdelta-59", coeffs: &[3, 11, -7, -1, 1], ell: 59 },
    Golden { label: "s4-m4-11", coeffs: &[-13, 16, -4, -2, 1], ell: 11 },
    Golden { label: "s4-level4-19", coeffs: &[-2, -6, -2, -1, 1], ell: 19 },
    Golden { label: "a5-23", coeffs: &[9, 0, 6, 3, 0, 1], ell: 3 },
];

pub fn poly(c: &[i64]) -> ZPoly {
    ZPoly::from_i64(c)
}

// ---------------------------------------------------------------- weight oracles

/// Orbits of the units a mod n under a ↦ −a, the orbit of 1 first.
fn sign_orbits(n: u64) -> Vec<Vec<u64>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in 1..n {
        if a.gcd(&n) != 1 || seen.contains(&a) {
            continue;
        }
        let orbit: BTreeSet<u64> = [a, n - a].into_iter().collect();
        seen.extend(orbit.iter().copied());
        out.push(orbit.into_iter().collect());
    }
    out
}

/// Weights from the inertia action χ^{k−1} ⊕ 1 with χ^{k−1} of exact order e:
/// k − 1 = a(ℓ − 1)/e with a a unit mod e. One class per ±a.
pub fn ordinary_oracle(ell: u64, e: u64) -> Vec<BTreeSet<u64>> {
    sign_orbits(e)
        .into_iter()
        .map(|orbit| orbit.into_iter().map(|a| a * (ell - 1) / e + 1).collect())
        .collect()
}

/// Weights from level-2 fundamental characters ψ^a ⊕ ψ^{ℓa} with projective
/// inertia of order m: a = a₀(ℓ + 1)/m, weights {a + 1, ℓ + 2 − a}.
pub fn supersingular_oracle(ell: u64, m: u64) -> Vec<BTreeSet<u64>> {
    sign_orbits(m)
        .into_iter()
        .map(|orbit| {
            orbit
                .into_iter()
                .flat_map(|a0| {
                    let a = a0 * (ell + 1) / m;
                    [a + 1, ell + 2 - a]
                })
                .collect()
        })
        .collect()
}

fn compare_weights(t: &LocalGaloisType, ell: u64, classes: &[BTreeSet<u64>]) -> Check {
    let w = weight_set(t, ell).map_err(|e| format!("{t} at ℓ = {ell}: {e}"))?;
    let all: BTreeSet<u64> = classes.iter().flatten().copied().collect();
    ensure!(w.values == all, "{t} at ℓ = {ell}: {:?} vs oracle {:?}", w.values, all);
    match (&w.partition, classes.len()) {
        (None, 1) => Ok(()),
        (Some(p), 2) => {
            ensure!(p.plus == classes[0] && p.minus == classes[1], "{t} at ℓ = {ell}: partition {p:?} vs {classes:?}");
            Ok(())
        }
        (p, n) => Err(format!("{t} at ℓ = {ell}: partition {p:?} but {n} oracle classes")),
    }
}

/// Every ℓ < bound, every e, m ∈ {2, 3, 4, 5}; inadmissible pairs must be refused.
pub fn weight_oracles(bound: u64) -> Check {
    for ell in arith::primes_up_to(bound).into_iter().filter(|&l| l >= 3) {
        for k in 2..=5u64 {
            let cyc = LocalGaloisType::TameCyclic { m: k as u32, e: k as u32 };
            if (ell - 1) % k == 0 {
                let classes = ordinary_oracle(ell, k);
                compare_weights(&cyc, ell, &classes)?;
                for c in &classes {
                    let v: Vec<u64> = c.iter().copied().collect();
                    if v.len() == 2 {
                        ensure!(v[0] + v[1] == ell + 1, "ordinary companions {v:?} at ℓ = {ell}");
                    }
                }
            } else {
                ensure!(weight_set(&cyc, ell).is_err(), "TameCyclic e = {k} accepted at ℓ = {ell}");
            }
            let dih = LocalGaloisType::TameDihedral { m: k as u32 };
            if (ell + 1) % k == 0 {
                let classes = supersingular_oracle(ell, k);
                compare_weights(&dih, ell, &classes)?;
                for c in &classes {
                    let v: Vec<u64> = c.iter().copied().collect();
                    let sum = if v.len() == 2 { v[0] + v[1] } else { 2 * v[0] };
                    ensure!(sum == ell + 3, "supersingular pair {v:?} at ℓ = {ell}");
                }
                if k == 4 {
                    let d8 = LocalGaloisType::DihedralTwoPower { group_order: 8, b: Some(1), t: Some(0), m_unramified: true };
                    compare_weights(&d8, ell, &classes)?;
                }
            } else {
                ensure!(weight_set(&dih, ell).is_err(), "TameDihedral m = {k} accepted at ℓ = {ell}");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- induced conductor oracle

/// Z_p[w]/p^K with w² = s·w + r irreducible mod p.
struct Unramified2 {
    p: i128,
    pk: i128,
    s: i128,
    r: i128,
}

type El = (i128, i128);

impl Unramified2 {
    fn new(p: u64, k: u32) -> Unramified2 {
        let pk = (p as i128).pow(k);
        if p == 2 {
            return Unramified2 { p: 2, pk, s: -1, r: -1 };
        }
        let nonres = (2..p).find(|&d| arith::pow_mod(d, (p - 1) / 2, p) == p - 1).unwrap();
        Unramified2 { p: p as i128, pk, s: 0, r: nonres as i128 }
    }

    fn red(&self, x: El) -> El {
        (x.0.rem_euclid(self.pk), x.1.rem_euclid(self.pk))
    }

    fn mul(&self, x: El, y: El) -> El {
        let bd = x.1 * y.1 % self.pk;
        self.red((x.0 * y.0 + bd * self.r, x.0 * y.1 + x.1 * y.0 + bd * self.s))
    }

    fn pow(&self, mut x: El, mut e: u128) -> El {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// (a + bw)(a + bw') = a² + abs − b²r.
    fn norm(&self, x: El) -> i128 {
        (x.0 * x.0 + x.0 * x.1 % self.pk * self.s - x.1 * x.1 % self.pk * self.r).rem_euclid(self.pk)
    }

    fn is_unit(&self, x: El) -> bool {
        self.norm(x) % self.p != 0
    }
}

fn dlog(g: u64, x: u64, m: u64) -> u64 {
    let mut t = 1u64;
    let mut e = 0;
    while t != x % m {
        t = arith::mul_mod(t, g, m);
        e += 1;
        assert!(e < m, "{x} is not a power of {g} mod {m}");
    }
    e
}

/// Oracle for ρ = Ind_M β with M/Q_p unramified quadratic and β tame with
/// β^{1−p} of exact order m on O_M^×, normalized so that β|Z_p^× = ε_p.
/// Compares the recipe's n_p(φ) with v_p(disc M) + f·c_M(β·φ∘N) = 2·c_M(β·φ∘N)
/// for every φ on U_p of conductor exponent ≤ 3. Returns the number of φ checked.
pub fn induced_conductor_oracle(t: &LocalGaloisType, p: u64, m: u64) -> std::result::Result<usize, String> {
    let eps = epsilon_p(t, p).map_err(|e| e.to_string())?;
    ensure!(eps.conductor_exponent(p) <= 1, "ε_{p} is not tame");
    let mut checked = 0;
    if p == 2 {
        let ring = Unramified2::new(2, 3);
        // F_4^× = ⟨w̄⟩; β(x) = a·log(x̄)/3, and Z_2^× maps to 1 in F_4^× so ε tame part is trivial
        let a = (1..3).find(|a| 3u64.gcd(a) == 3 / m).unwrap() as i64;
        let log4 = |x: El| match (x.0 & 1, x.1 & 1) {
            (1, 0) => 0i64,
            (0, 1) => 1,
            _ => 2,
        };
        let units: Vec<El> = (0..8).flat_map(|x| (0..8).map(move |y| (x, y))).filter(|&x| ring.is_unit(x)).collect();
        for phi in enumerate_local_twists(2, 3, 0) {
            let value = |x: El| {
                let f = phi.eval(ring.norm(x) as i64).expect("unit norm");
                Ratio::new(a * log4(x), 3) + Ratio::new(*f.numer() as i64, *f.denom() as i64)
            };
            let trivial_on = |k: u32| {
                let q = 1i128 << k;
                units.iter().filter(|x| k == 0 || ((x.0 - 1) % q == 0 && x.1 % q == 0)).all(|&x| value(x).is_integer())
            };
            let c_m = (0..=3).find(|&k| trivial_on(k)).ok_or("conductor above 3")?;
            let n = n_p(t, 2, &phi).map_err(|e| e.to_string())?;
            ensure!(n == 2 * c_m, "p = 2, φ = {phi}: recipe {n}, induced {}", 2 * c_m);
            checked += 1;
        }
        return Ok(checked);
    }
    let ring = Unramified2::new(p, 3);
    let p3 = p.pow(3);
    let ord = p * p * (p - 1);
    let q = p * p - 1;
    let g = arith::canonical_primitive_root(p);
    // Teichmüller lift of a generator of F_{p²}^×: γ^{p⁴} mod p³
    let gamma = (0..p as i128)
        .flat_map(|x| (1..p as i128).map(move |y| (x, y)))
        .find(|&x| {
            arith::factorize_u64(q).iter().all(|&(l, _)| {
                let small = Unramified2::new(p, 1);
                small.pow(x, (q / l) as u128) != (1, 0)
            })
        })
        .unwrap();
    let zeta = ring.pow(gamma, (p as u128).pow(4));
    let log_norm = |x: El| dlog(g, ring.norm(x) as u64, p3);
    let l_zeta = log_norm(zeta);
    // a with gcd(a, p + 1) = (p + 1)/m and a/(p − 1) = ε(N ζ)
    let eps_at = eps.eval(ring.norm(zeta) as i64).expect("unit");
    let a = (0..q)
        .find(|&a| a.gcd(&(p + 1)) == (p + 1) / m && Ratio::new(a % (p - 1), p - 1) == eps_at)
        .ok_or_else(|| format!("no β at p = {p} matching ε = {eps}"))?;
    let level_logs: Vec<[u64; 2]> = (1..=3u32)
        .map(|k| {
            let pk = (p as i128).pow(k);
            [log_norm(ring.red((1 + pk, 0))), log_norm(ring.red((1, pk)))]
        })
        .collect();
    for j in 0..ord {
        let trivial_level = |k: usize| level_logs[k - 1].iter().all(|&l| (j as u128 * l as u128).is_multiple_of(ord as u128));
        let mut c_m = (1..=3).find(|&k| trivial_level(k)).unwrap_or(4);
        if c_m == 1 {
            let v = Ratio::new(a as u128, q as u128) + Ratio::new((j as u128 * l_zeta as u128) % ord as u128, ord as u128);
            if v.is_integer() {
                c_m = 0;
            }
        }
        ensure!(c_m <= 3, "conductor above 3 for j = {j}");
        let phi = DirichletChar::on_prime_power(p, 3, &[(j, ord)]).map_err(|e| e.to_string())?.primitive();
        let n = n_p(t, p, &phi).map_err(|e| e.to_string())?;
        ensure!(n == 2 * c_m as u32, "p = {p}, φ = {phi}: recipe {n}, induced {}", 2 * c_m);
        checked += 1;
    }
    Ok(checked)
}

// ---------------------------------------------------------------- exact_poly properties

pub fn random_poly<R: Rng>(rng: &mut R, deg: usize, bound: i64) -> ZPoly {
    let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(-bound..=bound)).collect();
    let mut lead = 0;
    while lead == 0 {
        lead = rng.gen_range(-bound..=bound);
    }
    c.push(lead);
    ZPoly::from_i64(&c)
}

/// Aberth iteration in f64; `None` when a root sits too close to the real axis to call.
pub fn float_real_root_count(f: &ZPoly) -> Option<usize> {
    use num_traits::ToPrimitive;
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap()).collect();
    let n = c.len() - 1;
    let lc = c[n];
    let a: Vec<f64> = c.iter().map(|x| x / lc).collect();
    let radius = 1.0 + a[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<(f64, f64)> =
        (0..n).map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            (radius * th.cos(), radius * th.sin())
        }).collect();
    let cmul = |x: (f64, f64), y: (f64, f64)| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
    let cdiv = |x: (f64, f64), y: (f64, f64)| {
        let d = y.0 * y.0 + y.1 * y.1;
        ((x.0 * y.0 + x.1 * y.1) / d, (x.1 * y.0 - x.0 * y.1) / d)
    };
    for _ in 0..500 {
        let old = z.clone();
        for i in 0..n {
            let (mut pv, mut dv) = ((1.0, 0.0), (0.0, 0.0));
            for k in (0..n).rev() {
                dv = (cmul(dv, z[i]).0 + pv.0, cmul(dv, z[i]).1 + pv.1);
                pv = (cmul(pv, z[i]).0 + a[k], cmul(pv, z[i]).1);
            }
            let ratio = cdiv(pv, dv);
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = (z[i].0 - old[j].0, z[i].1 - old[j].1);
                    let inv = cdiv((1.0, 0.0), d);
                    s = (s.0 + inv.0, s.1 + inv.1);
                }
            }
            let denom = (1.0 - cmul(ratio, s).0, -cmul(ratio, s).1);
            let step = cdiv(ratio, denom);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
        }
    }
    let mut real = 0;
    for r in &z {
        let scale = 1.0 + r.0.hypot(r.1);
        let im = r.1.abs() / scale;
        if im < 1e-9 {
            real += 1;
        } else if im < 1e-4 {
            return None;
        }
    }
    Some(real)
}

/// Returns whether the case was decided by the float oracle.
pub fn check_sturm(f: &ZPoly) -> std::result::Result<bool, String> {
    if !f.is_squarefree() {
        return Ok(false);
    }
    let exact = sturm_real_roots(f).map_err(|e| e.to_string())?;
    ensure!((f.deg() - exact).is_multiple_of(2), "{f}: {exact} real roots leaves an odd number of non-real ones");
    match float_real_root_count(f) {
        Some(r) => {
            ensure!(r == exact, "{f}: Sturm {exact}, floating isolation {r}");
            Ok(true)
        }
        None => Ok(false),
    }
}

pub fn check_factor_mod_p(coeffs: &[i64], p: u64) -> Check {
    let f = PrimeFieldPoly::from_i64(p, coeffs);
    if f.is_zero() {
        return Ok(());
    }
    let mut prod = PrimeFieldPoly::one(p).scale(f.lc());
    for (g, k) in factor_mod_p(&f) {
        ensure!(g.is_irreducible(), "factor {g} of {f} mod {p} is reducible");
        for _ in 0..k {
            prod = prod.mul(&g);
        }
    }
    ensure!(prod == f, "factors of {f} mod {p} multiply to {prod}");
    Ok(())
}

pub fn check_padic_splitting(f: &ZPoly, p: u64) -> Check {
    if !f.is_squarefree() || f.deg() < 1 {
        return Ok(());
    }
    let s = padic_splitting(f, p, 60).map_err(|e| format!("{f} at {p}: {e}"))?;
    let total: u32 = s.factors.iter().map(|x| x.e * x.f).sum();
    ensure!(total as usize == f.deg(), "{f} at {p}: Σ e·f = {total}");
    let d = discriminant(f).map_err(|e| e.to_string())? * f.lc();
    if !(d % BigInt::from(p)).is_zero() {
        let mut fs: Vec<usize> = s.factors.iter().map(|x| x.f as usize).collect();
        fs.sort_unstable();
        let mut modp = f.reduce_mod(p).factor_degrees();
        modp.sort_unstable();
        ensure!(fs == modp, "{f} at {p}: residue degrees {fs:?} vs factorization {modp:?}");
    }
    Ok(())
}

pub fn check_disc_product(f: &ZPoly, g: &ZPoly) -> Check {
    let fg = f * g;
    let lhs = discriminant(&fg).map_err(|e| e.to_string())?;
    let r = resultant(f, g);
    let rhs = discriminant(f).map_err(|e| e.to_string())? * discriminant(g).map_err(|e| e.to_string())? * &r * &r;
    ensure!(lhs == rhs, "disc({f} · {g}) = {lhs}, product formula {rhs}");
    Ok(())
}

// ---------------------------------------------------------------- galois_id properties

pub fn check_tschirnhaus_stability() -> Check {
    for gld in &GOLDEN {
        let f = poly(gld.coeffs);
        let g0 = galois_group(&f).map_err(|e| e.to_string())?;
        for c in -2..=2i64 {
            let h = f.translate(&BigInt::from(c));
            let g1 = galois_group(&h).map_err(|e| e.to_string())?;
            ensure!(g1 == g0, "{}: x ↦ x + {c} gives {g1}, expected {g0}", gld.label);
            let g2 = galois_group(&h.negate_x()).map_err(|e| e.to_string())?;
            ensure!(g2 == g0, "{}: x ↦ −x − {c} gives {g2}, expected {g0}", gld.label);
        }
    }
    Ok(())
}

fn types(list: &[&[usize]]) -> Vec<Vec<usize>> {
    list.iter().map(|t| t.to_vec()).collect()
}

/// Quintics with square discriminant: images of known A5, D5 and C5 quintics
/// under x ↦ a·x + c, which keeps the group and the square class of the discriminant.
pub fn square_disc_quintics<R: Rng>(rng: &mut R, count: usize) -> Vec<ZPoly> {
    let seeds: [&[i64]; 4] = [&[9, 0, 6, 3, 0, 1], &[16, 20, 0, 0, 0, 1], &[12, -5, 0, 0, 0, 1], &[1, 3, -3, -4, 1, 1]];
    (0..count)
        .map(|_| {
            let f = poly(seeds[rng.gen_range(0..seeds.len())]);
            let a = BigInt::from(rng.gen_range(1..=3));
            let c = BigInt::from(rng.gen_range(-5..=5));
            let lin = ZPoly::new(vec![c, a]);
            f.compose(&lin)
        })
        .collect()
}

/// A5 or a solvable subgroup of A5: every Frobenius cycle type must lie in the claimed group.
pub fn check_frobenius_consistency(f: &ZPoly, bound: u64) -> Check {
    let d = discriminant(f).map_err(|e| e.to_string())?;
    ensure!(arith::is_square(&d.abs()) && d.is_positive(), "{f}: discriminant {d} is not a square");
    let group = galois_group(f).map_err(|e| e.to_string())?;
    let allowed = match &group {
        GlobalGroup::A5 => types(&[&[1, 1, 1, 1, 1], &[1, 2, 2], &[1, 1, 3], &[5]]),
        GlobalGroup::Other(r) if r.contains("D5") => types(&[&[1, 1, 1, 1, 1], &[1, 2, 2], &[5]]),
        g => return Err(format!("{f}: square discriminant but verdict {g}")),
    };
    for t in frobenius_cycle_types(f, bound).map_err(|e| e.to_string())? {
        ensure!(allowed.contains(&t), "{f}: Frobenius type {t:?} outside {group}");
    }
    Ok(())
}

// ---------------------------------------------------------------- local_analyzer properties

pub fn check_local_invariants() -> Check {
    for gld in &GOLDEN {
        let f = poly(gld.coeffs);
        let a = analyze(&f, gld.ell).map_err(|e| format!("{}: {e}", gld.label))?;
        let v_field = |p: u64| arith::valuation(&a.field_discriminant, p).unwrap_or(0);
        for (&p, rep) in &a.primes {
            let pred = rep.predicted_disc_valuation.ok_or_else(|| format!("{}: no prediction at {p}", gld.label))?;
            ensure!(pred == rep.disc_valuation, "{} at {p}: type predicts v = {pred}, found {}", gld.label, rep.disc_valuation);
            ensure!(v_field(p) == rep.disc_valuation, "{} at {p}: field disc valuation {}", gld.label, v_field(p));
        }
        for (&p, t) in &a.local_types {
            match *t {
                LocalGaloisType::TameCyclic { e, .. } => {
                    ensure!(p % e as u64 == 1 % e as u64, "{}: TameCyclic e = {e} at {p}", gld.label)
                }
                LocalGaloisType::TameDihedral { m } => {
                    ensure!((p + 1) % m as u64 == 0, "{}: TameDihedral m = {m} at {p}", gld.label)
                }
                _ => {}
            }
        }
        let disc = discriminant(&f).map_err(|e| e.to_string())?;
        let group = a.group.clone();
        for p in arith::primes_up_to(60) {
            if (&disc % BigInt::from(p)).is_zero() {
                continue;
            }
            let t = local_type(&f, &group, p).map_err(|e| format!("{} at {p}: {e}", gld.label))?;
            ensure!(t.is_unramified(), "{} at unramified {p}: {t}", gld.label);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- char_algebra properties

pub fn random_character<R: Rng>(rng: &mut R) -> DirichletChar {
    let primes = [2u64, 3, 5, 7, 11];
    let mut chi = DirichletChar::trivial(1);
    for &p in &primes {
        if rng.gen_bool(0.5) {
            let c = rng.gen_range(1..=if p == 2 { 4 } else { 2 });
            let list = enumerate_local_twists(p, c, 0);
            chi = chi.mul(&list[rng.gen_range(0..list.len())]);
        }
    }
    chi
}

pub fn check_conductor_algebra(a: &DirichletChar, b: &DirichletChar) -> Check {
    let ab = a.mul(b);
    let l = arith::lcm_u64(a.conductor(), b.conductor());
    ensure!(l.is_multiple_of(ab.conductor()), "cond({a} · {b}) = {} does not divide {l}", ab.conductor());
    ensure!(a.inverse().conductor() == a.conductor(), "cond({a}⁻¹) differs");
    Ok(())
}

pub fn characters_mod(n: u64) -> Vec<DirichletChar> {
    let mut out = vec![DirichletChar::trivial(1)];
    for (p, k) in arith::factorize_u64(n) {
        let local = enumerate_local_twists(p, k, 0);
        out = out.iter().flat_map(|x| local.iter().map(move |y| x.mul(y))).collect();
    }
    out.into_iter().map(|x| x.lift(n).expect("lift to the full modulus")).collect()
}

pub fn check_mod_lambda_homomorphism(n: u64, ell: u64) -> Check {
    let chars: Vec<DirichletChar> = characters_mod(n).into_iter().filter(|x| x.order() % ell != 0).collect();
    ensure!(characters_mod(n).len() as u64 == arith::euler_phi(n), "character count mod {n}");
    for a in &chars {
        for b in &chars {
            let lhs = reduce_mod_lambda(&a.mul(b), ell).map_err(|e| e.to_string())?;
            let rhs = reduce_mod_lambda(a, ell).unwrap().mul(&reduce_mod_lambda(b, ell).unwrap());
            ensure!(lhs == rhs, "reduction is not multiplicative at ({a}, {b})");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- serre_recipe properties

pub fn check_family_invariants() -> Check {
    for gld in &GOLDEN {
        let a = analyze(&poly(gld.coeffs), gld.ell).map_err(|e| e.to_string())?;
        let fams = enumerate_serre_types(&a, &TwistBound::uniform(2)).map_err(|e| e.to_string())?;
        ensure!(!fams.is_empty(), "{}: no families", gld.label);
        for f in &fams {
            if let Some(n) = f.n {
                ensure!(n % gld.ell != 0, "{}: ℓ divides N = {n}", gld.label);
            }
            if let Some(nu) = &f.nu {
                ensure!(nu.order() % gld.ell != 0, "{}: ν of order {}", gld.label, nu.order());
            }
            ensure!(recipe::check_family(f, gld.ell), "{}: family {f} fails its own check", gld.label);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- a5_embedding properties

pub fn check_embeddings() -> Check {
    let f5 = build_embedding(EmbeddingField::Finite { ell: 5, m: 1 }, 1).map_err(|e| e.to_string())?;
    ensure!(verify_presentation(&f5.ring, &f5.x, &f5.y), "F5 presentation");
    let o = generated_group_order(&f5.ring, &f5.x, &f5.y).map_err(|e| e.to_string())?;
    ensure!(o == 60, "F5 order {o}");
    let mut prints = Vec::new();
    for pw in [1, 2] {
        let e = build_embedding(EmbeddingField::Finite { ell: 3, m: 4 }, pw).map_err(|e| e.to_string())?;
        ensure!(verify_presentation(&e.ring, &e.x, &e.y), "F81 presentation (ε^{pw})");
        let o = generated_group_order(&e.ring, &e.x, &e.y).map_err(|e| e.to_string())?;
        ensure!(o == 60, "F81 order {o} (ε^{pw})");
        prints.push(trace_fingerprint(&e.ring, &e.y).map_err(|e| e.to_string())?);
    }
    ensure!(prints[0] != prints[1], "ε and ε² have equal fingerprints");
    Ok(())
}

// ---------------------------------------------------------------- field_catalog properties

pub fn check_round_trip(records: &[FieldRecord]) -> Check {
    let csv = parse_catalog(catalog::to_csv(records).as_bytes(), CatalogFormat::Csv).map_err(|e| e.to_string())?;
    ensure!(csv.records == records && csv.rejects.is_empty(), "CSV round trip changed the records");
    let jl = parse_catalog(catalog::to_json_lines(records).as_bytes(), CatalogFormat::JsonLines).map_err(|e| e.to_string())?;
    ensure!(jl.records == records && jl.rejects.is_empty(), "JSON-lines round trip changed the records");
    Ok(())
}

pub const DETECT_QUERIES: [(u64, u64, u64); 4] = [(1, 16, 59), (8, 4, 11), (4, 6, 19), (23, 2, 3)];

/// Monotonicity over every sub-catalog of the corpus, and re-validation of matches.
pub fn check_detection_properties() -> Check {
    let corpus = builtin_corpus();
    let one = DirichletChar::trivial(1);
    for (n, k, ell) in DETECT_QUERIES {
        let full = detect(n, k, &one, ell, &corpus).map_err(|e| e.to_string())?;
        ensure!(!full.matches.is_empty(), "no match for ({n}, {k}, {ell})");
        let full_labels: BTreeSet<String> = full.matches.iter().map(|m| m.record.label.clone()).collect();
        for mask in 0u32..(1 << corpus.len()) {
            let sub: Vec<FieldRecord> = corpus.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| r.clone()).collect();
            let r = detect(n, k, &one, ell, &sub).map_err(|e| e.to_string())?;
            ensure!(r.matches.len() + r.negatives.len() + r.skipped.len() == sub.len(), "record accounting for mask {mask}");
            for m in &r.matches {
                ensure!(full_labels.contains(&m.record.label), "adding records removed the match {}", m.record.label);
            }
        }
        for m in &full.matches {
            let a = analyze(&m.record.coeffs, ell).map_err(|e| e.to_string())?;
            let recipes: Vec<_> = a
                .s_primes()
                .iter()
                .map(|&p| local_recipe(&a.local_types[&p], p, ell))
                .collect::<exceptional::Result<_>>()
                .map_err(|e| e.to_string())?;
            let (n2, nu2, _) = evaluate_twist(&recipes, &m.family.twist, ell);
            ensure!(n2 == m.family.n && nu2 == m.family.nu, "{}: witness recomputes to ({n2:?}, {nu2:?})", m.record.label);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- cli properties

pub fn schema_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

/// Runs the built binary; returns (exit code, stdout).
pub fn run_exc(args: &[&str], envs: &[(&str, &str)]) -> (i32, String) {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_exc"));
    cmd.args(args).env_remove("EXC_CATALOG");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("exc runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 stdout"))
}

/// (subcommand arguments, expected exit code) for the golden corpus.
pub fn golden_invocations() -> Vec<(Vec<String>, i32)> {
    let mut v: Vec<(Vec<String>, i32)> = Vec::new();
    let s = |x: &[&str]| x.iter().map(|a| a.to_string()).collect::<Vec<_>>();
    for g in &GOLDEN {
        let p = serde_json::to_string(g.coeffs).unwrap();
        let ell = g.ell.to_string();
        v.push((s(&["analyze", "--poly", &p, "--ell", &ell]), 0));
        v.push((s(&["serre-types", "--poly", &p, "--ell", &ell, "--twist-bound", "1"]), 0));
        let a = analyze(&poly(g.coeffs), g.ell).unwrap();
        for q in a.ramified_primes {
            v.push((s(&["local", "--poly", &p, "--p", &q.to_string()]), 0));
        }
    }
    for (n, k, ell) in DETECT_QUERIES {
        v.push((s(&["detect", "--N", &n.to_string(), "--k", &k.to_string(), "--nu", "trivial", "--ell", &ell.to_string()]), 0));
    }
    v.push((s(&["detect", "--N", "1", "--k", "3", "--ell", "7"]), 1));
    v.push((s(&["analyze", "--poly", "[1,0,0,1]", "--ell", "7"]), 1));
    v.push((s(&["corollary1"]), 0));
    v.push((s(&["corollary1", "--variant", "M2", "--c", "3"]), 0));
    for (f, e) in [("F5", "1"), ("F81", "1"), ("F81", "2"), ("Z[zeta5]", "1")] {
        v.push((s(&["embed-check", "--field", f, "--epsilon-power", e]), 0));
    }
    v
}

pub fn check_cli_contract() -> Check {
    let dir = schema_dir();
    for (args, code) in golden_invocations() {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let (c1, out1) = run_exc(&argv, &[]);
        let (c2, out2) = run_exc(&argv, &[]);
        ensure!(c1 == code, "exc {}: exit {c1}, expected {code}", args.join(" "));
        ensure!(c1 == c2 && out1 == out2, "exc {}: output differs between runs", args.join(" "));
        let doc: serde_json::Value =
            serde_json::from_str(&out1).map_err(|e| format!("exc {}: stdout is not JSON: {e}", args.join(" ")))?;
        let path = dir.join(format!("{}.schema.json", args[0]));
        let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| format!("{path:?}: {e}"))?)
            .map_err(|e| format!("{path:?}: {e}"))?;
        let compiled = jsonschema::JSONSchema::compile(&schema).map_err(|e| format!("{path:?}: {e}"))?;
        let violations: Vec<String> = match compiled.validate(&doc) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
        };
        ensure!(violations.is_empty(), "exc {}: schema violations: {}", args.join(" "), violations.join("; "));
    }
    Ok(())
}
