//! Decomposition-group types of K/Q at a prime.
//!
//! The splitting field K has group G ∈ {A4, S4, A5} acting on the roots of the
//! stem polynomial. At p the decomposition group D and inertia group I ⊲ D are
//! pinned down by matching certified splitting data against what every
//! admissible pair (D, I) predicts:
//!
//! - the stem polynomial (the G-set of roots),
//! - the resolvent cubic (the three pairings of a quartic's roots),
//! - x² − disc for S4 quartics (the sign character),
//! - for each pairing fixed by D, the quadratic field generated by
//!   x₀ + x₁ − x₂ − x₃ over the root of the resolvent cubic,
//! - the sextic resolvent for quintics (cosets of D5 in A5).
//!
//! A pair (D, I) is admissible when D/I is cyclic, I has a normal Sylow p-subgroup
//! P with I/P cyclic, and some Frobenius lift d and tame generator t satisfy
//! d t d⁻¹ ≡ t^p mod P. Tame candidates must also reproduce the discriminant
//! valuation n − #(I-orbits). Candidates that survive but give different types
//! are reported as an ambiguity, never resolved by guessing. Known ambiguous
//! row: D5 versus C5 at p = 5 when v₅(stem disc) = 8.
//!
//! For dihedral 2-power types the break data come from conductor–discriminant
//! bookkeeping on the quadratic subfields. `t` is taken as 0 when M is
//! unramified and as the lower break of Gal(M/Q_p) otherwise: this is the
//! reading under which the tame order-8 case gives b = 1, t = 0 and
//! n_p(φ) = 2·max{1, c_p(φ)}.

use crate::arith;
use crate::error::{Error, Result};
use crate::galois::{galois_group, is_non_real, irreducibility_screen, resolvent_cubic, sextic_resolvent, GlobalGroup, Irreducibility};
use crate::perm::{ef_pattern, CosetAction, Group, Perm};
use crate::poly::{discriminant, padic_splitting, splitting_type, ZPoly};
use crate::character::{quadratic_character, DirichletChar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

const PADIC_CAP: u32 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Peu,
    Tres,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeilVariant {
    M2,
    M3,
    M4,
}

impl WeilVariant {
    pub fn parse(s: &str) -> Option<WeilVariant> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M2" => Some(WeilVariant::M2),
            "M3" => Some(WeilVariant::M3),
            "M4" => Some(WeilVariant::M4),
            _ => None,
        }
    }
}

/// Class of an element of Q_p^× modulo squares: parity of the valuation and
/// the unit part mod 8 (p = 2) or mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadClass {
    pub p: u64,
    pub v_odd: bool,
    pub unit: u64,
}

impl QuadClass {
    fn unit_modulus(p: u64) -> u64 {
        if p == 2 {
            8
        } else {
            p
        }
    }

    pub fn of_integer(n: &BigInt, p: u64) -> Option<QuadClass> {
        let v = arith::valuation(n, p)?;
        let pv = BigInt::from(p).pow(v);
        let u = (n / pv).mod_floor(&BigInt::from(Self::unit_modulus(p)));
        Some(QuadClass { p, v_odd: v % 2 == 1, unit: u.to_u64().unwrap() })
    }

    /// Class of x known modulo p^k, if the precision suffices.
    pub fn of_approximation(x: &BigInt, p: u64, k: u32) -> Option<QuadClass> {
        let pk = BigInt::from(p).pow(k);
        let x = x.mod_floor(&pk);
        if x.is_zero() {
            return None;
        }
        let v = arith::valuation(&x, p)?;
        let need = if p == 2 { 3 } else { 1 };
        if v + need > k {
            return None;
        }
        QuadClass::of_integer(&x, p)
    }

    pub fn mul(&self, o: &QuadClass) -> QuadClass {
        let m = Self::unit_modulus(self.p);
        let mut unit = self.unit * o.unit % m;
        if self.v_odd && o.v_odd {
            // p·p = p², a square: the unit part is unchanged
        } else {
            unit %= m;
        }
        QuadClass { p: self.p, v_odd: self.v_odd ^ o.v_odd, unit }
    }

    pub fn is_square(&self) -> bool {
        if self.v_odd {
            return false;
        }
        if self.p == 2 {
            self.unit % 8 == 1
        } else {
            arith::pow_mod(self.unit, (self.p - 1) / 2, self.p) == 1
        }
    }

    /// Conductor exponent of the quadratic character = v_p(disc Q_p(√x)).
    pub fn conductor(&self) -> u32 {
        if self.is_square() {
            return 0;
        }
        match (self.p, self.v_odd) {
            (2, true) => 3,
            (2, false) if self.unit % 4 == 3 => 2,
            (_, true) => 1,
            _ => 0,
        }
    }

    pub fn is_unramified(&self) -> bool {
        self.conductor() == 0
    }

    /// (e, f) pattern of Q_p(√x).
    pub fn pattern(&self) -> Vec<(u32, u32)> {
        if self.is_square() {
            vec![(1, 1), (1, 1)]
        } else if self.is_unramified() {
            vec![(1, 2)]
        } else {
            vec![(2, 1)]
        }
    }

    /// The quadratic character of U_p attached to Q_p(√x).
    pub fn character(&self) -> DirichletChar {
        quadratic_character(self.p, self.v_odd, self.unit)
    }
}

impl fmt::Display for QuadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.v_odd { format!("{}·", self.p) } else { String::new() };
        write!(f, "{v}{} mod {}", self.unit, Self::unit_modulus(self.p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum LocalGaloisType {
    Unramified {
        f: u32,
    },
    TameCyclic {
        m: u32,
        e: u32,
    },
    WildCyclic {
        m: u32,
        e: u32,
        /// Class cutting out K_𝔭 when it is quadratic over Q_2.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<QuadClass>,
    },
    TameDihedral {
        m: u32,
    },
    WildDihedralEll {
        totally_ramified: bool,
        regime: Regime,
        /// Conductor exponent of β on M.
        b: u32,
    },
    DihedralTwoPower {
        group_order: u32,
        b: Option<u32>,
        t: Option<u32>,
        #[serde(rename = "M_unramified")]
        m_unramified: bool,
    },
    PrimitiveA4,
    PrimitiveS4 {
        variant: WeilVariant,
    },
}

impl LocalGaloisType {
    pub fn is_unramified(&self) -> bool {
        matches!(self, LocalGaloisType::Unramified { .. })
    }

    /// Order of the decomposition group.
    pub fn group_order(&self) -> u32 {
        match self {
            LocalGaloisType::Unramified { f } => *f,
            LocalGaloisType::TameCyclic { m, .. } | LocalGaloisType::WildCyclic { m, .. } => *m,
            LocalGaloisType::TameDihedral { m } => 2 * m,
            LocalGaloisType::WildDihedralEll { .. } => 0,
            LocalGaloisType::DihedralTwoPower { group_order, .. } => *group_order,
            LocalGaloisType::PrimitiveA4 => 12,
            LocalGaloisType::PrimitiveS4 { .. } => 24,
        }
    }
}

impl fmt::Display for LocalGaloisType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalGaloisType::Unramified { f: d } => write!(f, "unramified (f = {d})"),
            LocalGaloisType::TameCyclic { m, e } => write!(f, "tame cyclic of order {m}, e = {e}"),
            LocalGaloisType::WildCyclic { m, e, .. } => write!(f, "wild cyclic of order {m}, e = {e}"),
            LocalGaloisType::TameDihedral { m } => write!(f, "tame dihedral of order {}", 2 * m),
            LocalGaloisType::WildDihedralEll { totally_ramified, regime, b } => {
                let t = if *totally_ramified { "totally ramified" } else { "not totally ramified" };
                write!(f, "wild dihedral, {t}, regime {regime:?}, b = {b}")
            }
            LocalGaloisType::DihedralTwoPower { group_order, b, t, m_unramified } => {
                let show = |x: &Option<u32>| x.map_or("?".to_string(), |v| v.to_string());
                let m = if *m_unramified { "unramified" } else { "ramified" };
                write!(f, "dihedral of order {group_order}, b = {}, t = {}, M {m}", show(b), show(t))
            }
            LocalGaloisType::PrimitiveA4 => write!(f, "primitive A4 (M1)"),
            LocalGaloisType::PrimitiveS4 { variant } => write!(f, "primitive S4 ({variant:?})"),
        }
    }
}

/// Discriminant valuations that separate peu from très ramifié at 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeuTresTable {
    pub quintic: BTreeMap<u32, Regime>,
    /// Quartic stem fields: v₃(disc) = 1 + b with b = 2 (peu) or 4 (très),
    /// by the same conductor count as the quintic rows.
    pub quartic: BTreeMap<u32, Regime>,
}

impl Default for PeuTresTable {
    fn default() -> Self {
        PeuTresTable {
            quintic: BTreeMap::from([(4, Regime::Peu), (6, Regime::Tres)]),
            quartic: BTreeMap::from([(3, Regime::Peu), (5, Regime::Tres)]),
        }
    }
}

impl PeuTresTable {
    pub fn lookup(&self, degree: usize, v: u32) -> Result<Regime> {
        let table = if degree == 5 { &self.quintic } else { &self.quartic };
        table.get(&v).copied().ok_or(Error::UnclassifiedWildRegime(v))
    }
}

/// One row of the shipped 2-adic table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeilRow {
    pub variant: WeilVariant,
    pub stem_v2: u32,
    pub cubic_splitting: Vec<(u32, u32)>,
    pub cubic_v2: u32,
    /// Quartic whose completion at 2 generates the Weil field; breaks fingerprint ties.
    pub reference: Vec<i64>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeilTable {
    pub provenance: String,
    pub rows: Vec<WeilRow>,
}

pub fn weil_table() -> &'static WeilTable {
    static TABLE: OnceLock<WeilTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        serde_json::from_str(include_str!("../data/weil_2adic.json")).expect("shipped 2-adic table parses")
    })
}

/// Observable fingerprint of an S4 quartic at 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeilFingerprint {
    pub stem_v2: u32,
    pub cubic_splitting: Vec<(u32, u32)>,
    pub cubic_v2: u32,
}

impl fmt::Display for WeilFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v2(stem) = {}, cubic at 2 = {:?}, v2(cubic) = {})", self.stem_v2, self.cubic_splitting, self.cubic_v2)
    }
}

// ---------------------------------------------------------------------------
// candidate (D, I) pairs

fn subgroups_of(g: &GlobalGroup) -> &'static [Group] {
    static S4: OnceLock<Vec<Group>> = OnceLock::new();
    static A4: OnceLock<Vec<Group>> = OnceLock::new();
    static A5: OnceLock<Vec<Group>> = OnceLock::new();
    let cell = match g {
        GlobalGroup::S4 => &S4,
        GlobalGroup::A4 => &A4,
        GlobalGroup::A5 => &A5,
        GlobalGroup::Other(_) => unreachable!("only exceptional groups are analyzed"),
    };
    cell.get_or_init(|| g.permutation_group().unwrap().subgroups())
}

fn d5_in_a5() -> &'static Group {
    static D5: OnceLock<Group> = OnceLock::new();
    D5.get_or_init(|| {
        Group::generated(5, &[Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]), Perm::from_cycles(5, &[&[1, 4], &[2, 3]])])
    })
}

fn coset_action_a5() -> &'static CosetAction {
    static ACT: OnceLock<CosetAction> = OnceLock::new();
    ACT.get_or_init(|| CosetAction::new(&Group::alternating(5), d5_in_a5()))
}

fn generated_with(base: &Group, x: &Perm) -> Group {
    let mut gens = base.elements.clone();
    gens.push(x.clone());
    Group::generated(base.degree(), &gens)
}

/// Admissible as (decomposition, inertia) at p.
fn admissible(d: &Group, i: &Group, p: u64) -> bool {
    if i.order() == 1 || !i.is_subgroup_of(d) || !i.is_normal_in(d) {
        return false;
    }
    let sylow = match i.normal_sylow(p as usize) {
        Some(s) => s,
        None => return false,
    };
    let frobs: Vec<&Perm> = d.elements.iter().filter(|x| generated_with(i, x) == *d).collect();
    let tames: Vec<&Perm> = i.elements.iter().filter(|x| generated_with(&sylow, x) == *i).collect();
    frobs.iter().any(|fr| {
        let fi = fr.inverse();
        tames.iter().any(|t| {
            let tp = t.pow((p % t.order() as u64) as usize);
            sylow.contains(&fr.compose(t).compose(&fi).compose(&tp.inverse()))
        })
    })
}

fn pairing_action(g: &Perm) -> Perm {
    let img: Vec<u8> = (0..3)
        .map(|j| {
            let a = g.apply(0);
            let b = g.apply(j + 1);
            let partner = if a == 0 {
                b
            } else if b == 0 {
                a
            } else {
                (1..4).find(|x| *x != a && *x != b).unwrap()
            };
            (partner - 1) as u8
        })
        .collect();
    Perm(img)
}

fn sign_action(g: &Perm) -> Perm {
    if g.is_even() {
        Perm(vec![0, 1])
    } else {
        Perm(vec![1, 0])
    }
}

/// The decomposition type up to the data still to be computed (b, t, regime, variant).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    TameCyclic { m: u32, e: u32 },
    WildCyclic { m: u32, e: u32 },
    TameDihedral { m: u32 },
    WildDihedral { m: u32, totally: bool },
    TwoPower { order: u32, transitive: bool },
    PrimitiveA4,
    PrimitiveS4,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::TameCyclic { m, e } => write!(f, "TameCyclic(m={m}, e={e})"),
            Shape::WildCyclic { m, e } => write!(f, "WildCyclic(m={m}, e={e})"),
            Shape::TameDihedral { m } => write!(f, "TameDihedral(m={m})"),
            Shape::WildDihedral { m, totally } => write!(f, "WildDihedral(order {}, totally={totally})", 2 * m),
            Shape::TwoPower { order, transitive } => write!(f, "DihedralTwoPower(order {order}, transitive={transitive})"),
            Shape::PrimitiveA4 => write!(f, "PrimitiveA4"),
            Shape::PrimitiveS4 => write!(f, "PrimitiveS4"),
        }
    }
}

fn shape_of(d: &Group, i: &Group, p: u64) -> Shape {
    let order = d.order() as u32;
    let e = i.order() as u32;
    let wild = (e as u64).is_multiple_of(p);
    if d.is_cyclic() {
        return if wild { Shape::WildCyclic { m: order, e } } else { Shape::TameCyclic { m: order, e } };
    }
    if d.is_dihedral() {
        let m = order / 2;
        if m % 2 == 1 {
            return if wild {
                Shape::WildDihedral { m, totally: i.order() == d.order() }
            } else {
                Shape::TameDihedral { m }
            };
        }
        let transitive = d.orbits().len() == 1;
        return Shape::TwoPower { order, transitive };
    }
    if order == 12 {
        Shape::PrimitiveA4
    } else {
        Shape::PrimitiveS4
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Fingerprint {
    stem: Vec<(u32, u32)>,
    cubic: Option<Vec<(u32, u32)>>,
    sign: Option<Vec<(u32, u32)>>,
    pairs: Option<Vec<Vec<(u32, u32)>>>,
    sextic: Option<Vec<(u32, u32)>>,
}

fn predicted(group: &GlobalGroup, d: &Group, i: &Group) -> Fingerprint {
    let n = d.degree();
    let id = |g: &Perm| g.clone();
    let stem = ef_pattern(d, i, &id, n);
    let quartic = n == 4;
    let cubic = quartic.then(|| ef_pattern(d, i, &pairing_action, 3));
    let sign = matches!(group, GlobalGroup::S4).then(|| ef_pattern(d, i, &sign_action, 2));
    let pairs = quartic.then(|| {
        let mut out: Vec<Vec<(u32, u32)>> = (0..3u8)
            .filter(|&j| d.elements.iter().all(|g| pairing_action(g).apply(j as usize) == j as usize))
            .map(|j| {
                let block = [0usize, j as usize + 1];
                let stab: Vec<&Perm> = d
                    .elements
                    .iter()
                    .filter(|g| {
                        let img = [g.apply(block[0]), g.apply(block[1])];
                        img.contains(&block[0]) && img.contains(&block[1])
                    })
                    .collect();
                if stab.len() == d.order() {
                    vec![(1, 1), (1, 1)]
                } else if i.elements.iter().all(|x| stab.contains(&x)) {
                    vec![(1, 2)]
                } else {
                    vec![(2, 1)]
                }
            })
            .collect();
        out.sort();
        out
    });
    let sextic = (n == 5).then(|| {
        let act = coset_action_a5();
        ef_pattern(d, i, &|g: &Perm| act.image(g), act.len())
    });
    Fingerprint { stem, cubic, sign, pairs, sextic }
}

// ---------------------------------------------------------------------------
// observed data

/// The field being analyzed, with lazily computed auxiliary polynomials.
pub struct FieldContext {
    /// Monic associate of the primitive part of the input.
    pub g: ZPoly,
    pub group: GlobalGroup,
    pub disc: BigInt,
    cubic: OnceCell<ZPoly>,
    sextic: OnceCell<Result<ZPoly>>,
}

impl FieldContext {
    pub fn new(f: &ZPoly, group: GlobalGroup) -> Result<FieldContext> {
        let g = f.primitive_part().monic_associate();
        let disc = discriminant(&g)?;
        Ok(FieldContext { g, group, disc, cubic: OnceCell::new(), sextic: OnceCell::new() })
    }

    pub fn degree(&self) -> usize {
        self.g.deg()
    }

    fn cubic(&self) -> &ZPoly {
        self.cubic.get_or_init(|| resolvent_cubic(&self.g).expect("quartic"))
    }

    fn sextic(&self) -> Result<&ZPoly> {
        self.sextic
            .get_or_init(|| sextic_resolvent(&self.g))
            .as_ref()
            .map_err(|e| e.clone())
    }
}

/// Lifts a simple root r0 of h in Z_p to precision p^k by Newton's method.
fn lift_root(h: &ZPoly, r0: &BigInt, p: u64, k: u32) -> Result<BigInt> {
    let dh = h.derivative();
    let mut r = r0.clone();
    for _ in 0..64 {
        let hv = h.eval(&r);
        if hv.is_zero() {
            return Ok(r);
        }
        let dv = dh.eval(&r);
        let s = arith::valuation(&dv, p).ok_or(Error::NotSquarefree)?;
        let vh = arith::valuation(&hv, p).unwrap();
        if vh <= 2 * s {
            return Err(Error::Precision { p: BigInt::from(p), reached: vh });
        }
        if vh >= k + s {
            return Ok(r);
        }
        let m = BigInt::from(p).pow(k + 2 * s + 2);
        let ps = BigInt::from(p).pow(s);
        let unit = (&dv / &ps).mod_floor(&m);
        let inv = crate::poly::mod_inverse(&unit, &m).ok_or(Error::NotSquarefree)?;
        r = (&r - (&hv / &ps) * inv).mod_floor(&m);
    }
    Err(Error::Precision { p: BigInt::from(p), reached: k })
}

/// Roots in Z_p of a squarefree monic integer polynomial, to precision p^k.
fn padic_roots(h: &ZPoly, p: u64, k: u32) -> Result<Vec<BigInt>> {
    let split = padic_splitting(h, p, PADIC_CAP)?;
    split
        .factors
        .iter()
        .filter(|x| x.approximant.deg() == 1)
        .map(|x| lift_root(h, &(-x.approximant.coeff(0)), p, k))
        .collect()
}

/// Square classes of x₀ + x₁ − x₂ − x₃ squared, one for each pairing fixed over Q_p.
fn fixed_pairing_classes(ctx: &FieldContext, p: u64) -> Result<Vec<QuadClass>> {
    let g = &ctx.g;
    let e1 = -g.coeff(3);
    let e2 = g.coeff(2);
    let e4 = g.coeff(0);
    let base = &e1 * &e1 - BigInt::from(4) * &e2;
    let mut k = 16u32;
    loop {
        let roots = padic_roots(ctx.cubic(), p, k)?;
        let mut out = Vec::new();
        let mut short = false;
        for r in &roots {
            let a = &base + BigInt::from(4) * r;
            let class = match QuadClass::of_approximation(&a, p, k) {
                Some(c) => Some(c),
                // x₀ + x₁ = x₂ + x₃: the same quadratic field is generated by x₀x₁ − x₂x₃
                None => QuadClass::of_approximation(&(r * r - BigInt::from(4) * &e4), p, k),
            };
            match class {
                Some(c) => out.push(c),
                None => short = true,
            }
        }
        if !short {
            return Ok(out);
        }
        if k >= PADIC_CAP {
            return Err(Error::Precision { p: BigInt::from(p), reached: k });
        }
        k *= 2;
    }
}

/// Square classes of the discriminants of the quadratic Q_p-factors of h.
fn quadratic_factor_classes(h: &ZPoly, p: u64) -> Result<Vec<QuadClass>> {
    let split = padic_splitting(h, p, PADIC_CAP)?;
    let vd = arith::valuation(&discriminant(&split_source(h))?, p).unwrap_or(0);
    let trusted = split.precision.saturating_sub(vd);
    split
        .factors
        .iter()
        .filter(|x| x.approximant.deg() == 2)
        .map(|x| {
            let a = x.approximant.coeff(1);
            let b = x.approximant.coeff(0);
            let d = &a * &a - BigInt::from(4) * b;
            QuadClass::of_approximation(&d, p, trusted)
                .ok_or(Error::Precision { p: BigInt::from(p), reached: split.precision })
        })
        .collect()
}

fn split_source(h: &ZPoly) -> ZPoly {
    h.primitive_part().monic_associate()
}

#[derive(Clone, Debug)]
struct Observed {
    fp: Fingerprint,
    v: u32,
    pair_classes: Vec<QuadClass>,
}

fn observe(ctx: &FieldContext, p: u64) -> Result<Observed> {
    let (stem, v) = splitting_type(&ctx.g, p)?;
    let quartic = ctx.degree() == 4;
    let cubic = if quartic { Some(splitting_type(ctx.cubic(), p)?.0) } else { None };
    let sign = if matches!(ctx.group, GlobalGroup::S4) {
        let x2 = ZPoly::new(vec![-ctx.disc.clone(), BigInt::zero(), BigInt::one()]);
        Some(splitting_type(&x2, p)?.0)
    } else {
        None
    };
    let pair_classes = if quartic { fixed_pairing_classes(ctx, p)? } else { Vec::new() };
    let pairs = quartic.then(|| {
        let mut v: Vec<Vec<(u32, u32)>> = pair_classes.iter().map(|c| c.pattern()).collect();
        v.sort();
        v
    });
    let sextic = if ctx.degree() == 5 { Some(splitting_type(ctx.sextic()?, p)?.0) } else { None };
    Ok(Observed { fp: Fingerprint { stem, cubic, sign, pairs, sextic }, v, pair_classes })
}

fn pair_action(g: &Perm, n: usize) -> Perm {
    Perm((0..n * n).map(|k| (g.apply(k / n) * n + g.apply(k % n)) as u8).collect())
}

/// Splitting of the polynomial with roots α + c·β over all ordered pairs of roots.
fn ordered_pair_splitting(ctx: &FieldContext, p: u64) -> Result<Option<Vec<(u32, u32)>>> {
    for c in 2..20 {
        let h = sum_polynomial(&ctx.g, &ctx.g, c);
        if h.is_squarefree() {
            return Ok(Some(splitting_type(&h, p)?.0));
        }
    }
    Ok(None)
}

/// Conductor of the permutation representation on the roots when I is tame.
fn tame_disc_valuation(i: &Group) -> u32 {
    (i.degree() - i.orbits().len()) as u32
}

/// Admissible pairs whose predictions match the observations.
fn matching_candidates(ctx: &FieldContext, p: u64, obs: &Observed) -> Vec<(Group, Group, Shape)> {
    let subs = subgroups_of(&ctx.group);
    let mut out = Vec::new();
    for d in subs {
        for i in subs {
            if i.order() > d.order() || d.order() % i.order() != 0 || !admissible(d, i, p) {
                continue;
            }
            if predicted(&ctx.group, d, i) != obs.fp {
                continue;
            }
            let shape = shape_of(d, i, p);
            let consistent = match &shape {
                _ if !(i.order() as u64).is_multiple_of(p) => tame_disc_valuation(i) == obs.v,
                // order-p characters of U_p have conductor 2 (p = 3, 5)
                Shape::WildCyclic { m, e } if m == e && (p == 3 || p == 5) => {
                    let moved = i.orbits().iter().filter(|o| o.len() > 1).count() as u32;
                    obs.v == moved * 2 * (p as u32 - 1)
                }
                _ => true,
            };
            if consistent {
                out.push((d.clone(), i.clone(), shape));
            }
        }
    }
    out
}

/// Decomposition and inertia groups at p, with the observations used.
pub struct Decomposition {
    pub decomposition: Group,
    pub inertia: Group,
    pub stem_splitting: Vec<(u32, u32)>,
    pub disc_valuation: u32,
    shape: Shape,
    obs: Observed,
}

pub fn decompose(ctx: &FieldContext, p: u64) -> Result<Option<Decomposition>> {
    let obs = observe(ctx, p)?;
    if obs.fp.stem.iter().all(|&(e, _)| e == 1) {
        return Ok(None);
    }
    let mut cands = matching_candidates(ctx, p, &obs);
    let mut shapes: BTreeSet<Shape> = cands.iter().map(|c| c.2.clone()).collect();
    if shapes.len() > 1 {
        // e.g. C4 against D4 at 2: the ordered pairs of roots tell them apart
        if let Some(seen) = ordered_pair_splitting(ctx, p)? {
            let n = ctx.degree();
            cands.retain(|(d, i, _)| ef_pattern(d, i, &|g: &Perm| pair_action(g, n), n * n) == seen);
            shapes = cands.iter().map(|c| c.2.clone()).collect();
        }
    }
    match shapes.len() {
        0 => Err(Error::Inconsistent(format!(
            "no decomposition group in {} reproduces the splitting data {:?}",
            ctx.group, obs.fp
        ))),
        1 => {
            let (d, i, shape) = cands.into_iter().next().unwrap();
            Ok(Some(Decomposition {
                decomposition: d,
                inertia: i,
                stem_splitting: obs.fp.stem.clone(),
                disc_valuation: obs.v,
                shape,
                obs,
            }))
        }
        _ => Err(Error::Ambiguous { prime: p, candidates: shapes.iter().map(|s| s.to_string()).collect() }),
    }
}

// ---------------------------------------------------------------------------
// break data

/// b for an odd-m dihedral decomposition group from the stem discriminant:
/// the permutation character is (#orbits)·1 + m_sgn·sgn + m₂·(2-dim), where
/// each 2-dim constituent Ind_M β has conductor v(d_M) + f_M·b.
fn odd_dihedral_b(d: &Group, i: &Group, v: u32) -> Result<u32> {
    let n = d.degree() as i64;
    let order = d.order() as i64;
    let m = order / 2;
    let rot = d.elements.iter().find(|g| g.order() as i64 == m).unwrap();
    let rotations = Group::generated(d.degree(), std::slice::from_ref(rot));
    let sgn = |g: &Perm| if rotations.contains(g) { 1 } else { -1 };
    let m_sgn: i64 = d.elements.iter().map(|g| g.fixed_points() as i64 * sgn(g)).sum::<i64>() / order;
    let orbits = d.orbits().len() as i64;
    let m2 = (n - orbits - m_sgn) / 2;
    let ramified_m = !i.is_subgroup_of(&rotations);
    let vdm: i64 = if ramified_m { 1 } else { 0 };
    let f_m: i64 = if ramified_m { 1 } else { 2 };
    let num = v as i64 - m_sgn * vdm;
    if m2 <= 0 || num % m2 != 0 || (num / m2 - vdm) % f_m != 0 {
        return Err(Error::Inconsistent(format!("discriminant valuation {v} fits no dihedral conductor")));
    }
    let b = (num / m2 - vdm) / f_m;
    if b < 1 {
        return Err(Error::Inconsistent(format!("dihedral break b = {b} < 1")));
    }
    Ok(b as u32)
}

struct TwoPowerData {
    b: u32,
    t: u32,
    m_unramified: bool,
}

fn m_data(m: &QuadClass, numerator: i64) -> Result<TwoPowerData> {
    let f_m = if m.is_unramified() { 2 } else { 1 };
    if numerator <= 0 || numerator % f_m != 0 {
        return Err(Error::Inconsistent(format!("conductor count {numerator} is not f_M·b")));
    }
    let t = if m.is_unramified() { 0 } else { m.conductor() - 1 };
    Ok(TwoPowerData { b: (numerator / f_m) as u32, t, m_unramified: m.is_unramified() })
}

/// b, t for a dihedral 2-power decomposition group at 2.
fn two_power_data(ctx: &FieldContext, dec: &Decomposition) -> Result<Option<TwoPowerData>> {
    let d = &dec.decomposition;
    let i = &dec.inertia;
    let v = dec.disc_valuation as i64;
    if d.order() == 8 {
        // perm character = 1 + ε' + Ind_M β, ε' the fixed pairing, M = disc·ε'
        let eps = dec.obs.pair_classes[0];
        let m = QuadClass::of_integer(&ctx.disc, 2).unwrap().mul(&eps);
        let rest = v - eps.conductor() as i64 - m.conductor() as i64;
        return m_data(&m, rest).map(Some);
    }
    let classes: Vec<QuadClass> = match ctx.degree() {
        4 if d.orbits().len() == 1 => dec.obs.pair_classes.clone(),
        4 => {
            let ab = quadratic_factor_classes(&ctx.g, 2)?;
            if ab.len() != 2 {
                return Err(Error::Inconsistent("V4 stem without two quadratic factors".into()));
            }
            vec![ab[0], ab[1], ab[0].mul(&ab[1])]
        }
        _ => quadratic_factor_classes(ctx.sextic()?, 2)?,
    };
    if classes.len() != 3 {
        return Ok(None);
    }
    let v_k: i64 = classes.iter().map(|c| c.conductor() as i64).sum();
    // K/M must be ramified: any M when I = V4, the unramified one when |I| = 2
    let mut choices: Vec<&QuadClass> =
        classes.iter().filter(|c| i.order() == 4 || c.is_unramified()).collect();
    choices.sort_by_key(|c| (c.conductor(), **c));
    let m = match choices.first() {
        Some(m) => **m,
        None => return Err(Error::Inconsistent("no quadratic subfield M with K/M ramified".into())),
    };
    m_data(&m, v_k - 2 * m.conductor() as i64).map(Some)
}

// ---------------------------------------------------------------------------
// the 2-adic Weil classification

fn weil_fingerprint(ctx: &FieldContext) -> Result<WeilFingerprint> {
    let (_, stem_v2) = splitting_type(&ctx.g, 2)?;
    let (cubic_splitting, cubic_v2) = splitting_type(ctx.cubic(), 2)?;
    Ok(WeilFingerprint { stem_v2, cubic_splitting, cubic_v2 })
}

/// Res_y(g(y), f(z − c·y)), the polynomial whose roots are x + c·y.
fn sum_polynomial(f: &ZPoly, g: &ZPoly, c: i64) -> ZPoly {
    let n = f.deg() * g.deg();
    let ys: Vec<BigInt> = (0..=n as i64).map(BigInt::from).collect();
    let vals: Vec<BigInt> = ys
        .iter()
        .map(|z| {
            // f(z − c·y) as a polynomial in y
            let lin = ZPoly::new(vec![z.clone(), BigInt::from(-c)]);
            crate::poly::resultant(g, &f.compose(&lin))
        })
        .collect();
    interpolate(&ys, &vals)
}

/// Newton interpolation with exact rational arithmetic; the result is integral here.
fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> ZPoly {
    use num_rational::BigRational;
    let n = xs.len();
    let mut coef: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = BigRational::from_integer(&xs[i] - &xs[i - j]);
            coef[i] = (&coef[i] - &coef[i - 1]) / den;
        }
    }
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n];
    for k in (0..n).rev() {
        // acc = acc·(x − xs[k]) + coef[k]
        let mut next = vec![BigRational::zero(); n];
        for d in 0..n {
            if d + 1 < n {
                next[d + 1] = &next[d + 1] + &acc[d];
            }
            next[d] = &next[d] - &acc[d] * BigRational::from_integer(xs[k].clone());
        }
        next[0] = &next[0] + &coef[k];
        acc = next;
    }
    ZPoly::new(acc.into_iter().map(|c| c.to_integer()).collect())
}

/// True when the completions at p of the two quartic stem fields are isomorphic
/// (both assumed to be fields locally): their tensor product then has a factor
/// of degree 4.
pub fn locally_isomorphic(f: &ZPoly, g: &ZPoly, p: u64) -> Result<bool> {
    let f = f.primitive_part().monic_associate();
    let g = g.primitive_part().monic_associate();
    for c in 1..20 {
        let h = sum_polynomial(&f, &g, c);
        if !h.is_squarefree() {
            continue;
        }
        let (ef, _) = splitting_type(&h, p)?;
        return Ok(ef.iter().any(|&(e, fd)| (e * fd) as usize == f.deg()));
    }
    Err(Error::Inconsistent("no separating linear combination found".into()))
}

fn weil_variant(ctx: &FieldContext) -> Result<WeilVariant> {
    let fp = weil_fingerprint(ctx)?;
    let rows: Vec<&WeilRow> = weil_table()
        .rows
        .iter()
        .filter(|r| r.stem_v2 == fp.stem_v2 && r.cubic_splitting == fp.cubic_splitting && r.cubic_v2 == fp.cubic_v2)
        .collect();
    match rows.len() {
        0 => Err(Error::UnclassifiedTwoAdic(fp.to_string())),
        1 => Ok(rows[0].variant),
        _ => {
            let mut hits = Vec::new();
            for r in &rows {
                if locally_isomorphic(&ctx.g, &ZPoly::from_i64(&r.reference), 2)? {
                    hits.push(r.variant);
                }
            }
            match hits.as_slice() {
                [v] => Ok(*v),
                _ => Err(Error::UnclassifiedTwoAdic(format!("{fp}; reference test matched {hits:?}"))),
            }
        }
    }
}

/// M1 for A4 quartics, M2/M3/M4 for S4 quartics, from the shipped fingerprint table.
pub fn classify_weil_2adic(f: &ZPoly) -> Result<LocalGaloisType> {
    if f.deg() != 4 {
        return Err(Error::Domain("the 2-adic Weil classification needs a quartic".into()));
    }
    let group = galois_group(f)?;
    if !matches!(group, GlobalGroup::A4 | GlobalGroup::S4) {
        return Err(Error::Precondition(format!("group {group} is not A4 or S4")));
    }
    let ctx = FieldContext::new(f, group)?;
    let dec = decompose(&ctx, 2)?;
    match dec.as_ref().map(|d| &d.shape) {
        Some(Shape::PrimitiveA4) => Ok(LocalGaloisType::PrimitiveA4),
        Some(Shape::PrimitiveS4) => Ok(LocalGaloisType::PrimitiveS4 { variant: weil_variant(&ctx)? }),
        Some(s) => Err(Error::Precondition(format!("local type at 2 is solvable: {s}"))),
        None => Err(Error::Precondition("2 is unramified".into())),
    }
}

// ---------------------------------------------------------------------------
// public entry points

fn type_from(ctx: &FieldContext, p: u64, dec: &Decomposition, table: &PeuTresTable) -> Result<LocalGaloisType> {
    let t = match dec.shape.clone() {
        Shape::TameCyclic { m, e } => {
            if p % e as u64 != 1 {
                return Err(Error::Inconsistent(format!("tame cyclic e = {e} at p = {p} needs p ≡ 1 mod e")));
            }
            LocalGaloisType::TameCyclic { m, e }
        }
        Shape::WildCyclic { m, e } => {
            let alpha = if m == 2 && p == 2 {
                quadratic_factor_classes(&ctx.g, 2)?.first().copied()
            } else {
                None
            };
            LocalGaloisType::WildCyclic { m, e, alpha }
        }
        Shape::TameDihedral { m } => {
            if !(p + 1).is_multiple_of(m as u64) {
                return Err(Error::Inconsistent(format!("tame dihedral m = {m} at p = {p} needs p ≡ −1 mod m")));
            }
            LocalGaloisType::TameDihedral { m }
        }
        Shape::WildDihedral { totally, .. } => {
            let b = odd_dihedral_b(&dec.decomposition, &dec.inertia, dec.disc_valuation)?;
            let regime = if totally && p == 3 {
                table.lookup(ctx.degree(), dec.disc_valuation)?
            } else {
                Regime::NotApplicable
            };
            LocalGaloisType::WildDihedralEll { totally_ramified: totally, regime, b }
        }
        Shape::TwoPower { order, .. } => {
            if p != 2 {
                LocalGaloisType::DihedralTwoPower { group_order: order, b: Some(1), t: Some(0), m_unramified: true }
            } else {
                match two_power_data(ctx, dec)? {
                    Some(x) => LocalGaloisType::DihedralTwoPower {
                        group_order: order,
                        b: Some(x.b),
                        t: Some(x.t),
                        m_unramified: x.m_unramified,
                    },
                    None => LocalGaloisType::DihedralTwoPower { group_order: order, b: None, t: None, m_unramified: false },
                }
            }
        }
        Shape::PrimitiveA4 => LocalGaloisType::PrimitiveA4,
        Shape::PrimitiveS4 => LocalGaloisType::PrimitiveS4 { variant: weil_variant(ctx)? },
    };
    Ok(t)
}

/// Local type using a prepared context.
pub fn local_type_in(ctx: &FieldContext, p: u64, table: &PeuTresTable) -> Result<(LocalGaloisType, Option<Decomposition>)> {
    if !arith::is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if !(&ctx.disc % BigInt::from(p)).is_zero() {
        let f = ctx.g.reduce_mod(p).factor_degrees().into_iter().fold(1u64, |a, d| arith::lcm_u64(a, d as u64));
        return Ok((LocalGaloisType::Unramified { f: f as u32 }, None));
    }
    match decompose(ctx, p)? {
        None => {
            let (ef, _) = splitting_type(&ctx.g, p)?;
            let f = ef.iter().fold(1u64, |a, &(_, fd)| arith::lcm_u64(a, fd as u64));
            Ok((LocalGaloisType::Unramified { f: f as u32 }, None))
        }
        Some(dec) => Ok((type_from(ctx, p, &dec, table)?, Some(dec))),
    }
}

fn exceptional_group(f: &ZPoly, group: &GlobalGroup) -> Result<()> {
    if !group.is_exceptional() {
        return Err(Error::Precondition(format!("group {group} is not exceptional")));
    }
    let expected = if matches!(group, GlobalGroup::A5) { 5 } else { 4 };
    if f.deg() != expected {
        return Err(Error::Precondition(format!("group {group} needs a degree-{expected} polynomial")));
    }
    Ok(())
}

/// Decomposition-group type of K at p.
pub fn local_type(f: &ZPoly, group: &GlobalGroup, p: u64) -> Result<LocalGaloisType> {
    exceptional_group(f, group)?;
    let ctx = FieldContext::new(f, group.clone())?;
    local_type_in(&ctx, p, &PeuTresTable::default()).map(|x| x.0)
}

pub fn classify_peu_tres(f: &ZPoly, ell: u64) -> Result<Regime> {
    classify_peu_tres_with(f, ell, &PeuTresTable::default())
}

/// Peu/très ramifié at 3 from v₃ of the stem-field discriminant.
pub fn classify_peu_tres_with(f: &ZPoly, ell: u64, table: &PeuTresTable) -> Result<Regime> {
    if ell != 3 {
        return Err(Error::Domain(format!("peu/très is defined at ℓ = 3, got {ell}")));
    }
    let group = galois_group(f)?;
    exceptional_group(f, &group)?;
    let ctx = FieldContext::new(f, group)?;
    let (t, dec) = local_type_in(&ctx, 3, table)?;
    match (t, dec) {
        (LocalGaloisType::WildDihedralEll { totally_ramified: true, regime, .. }, Some(_)) => Ok(regime),
        (t, _) => Err(Error::Precondition(format!("local type at 3 is {t}, not totally ramified wild dihedral"))),
    }
}

/// Everything the recipe needs about one ramified prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    pub stem_splitting: Vec<(u32, u32)>,
    pub disc_valuation: u32,
    pub decomposition_order: u32,
    pub inertia_order: u32,
    /// Discriminant valuation implied by the type, where the type determines it.
    pub predicted_disc_valuation: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldAnalysis {
    pub polynomial: ZPoly,
    pub group: GlobalGroup,
    pub non_real: bool,
    pub irreducibility: Irreducibility,
    pub ell: u64,
    #[serde(with = "crate::bigjson")]
    pub field_discriminant: BigInt,
    pub ramified_primes: Vec<u64>,
    pub local_types: BTreeMap<u64, LocalGaloisType>,
    pub primes: BTreeMap<u64, PrimeReport>,
    /// Product of the ramified primes other than ℓ.
    #[serde(rename = "S", with = "crate::bigjson")]
    pub s: BigInt,
    /// Type at ℓ (Unramified when ℓ does not ramify).
    pub ell_type: LocalGaloisType,
    pub ell_ramified: bool,
    pub notes: Vec<String>,
}

impl FieldAnalysis {
    /// Primes dividing S, ascending.
    pub fn s_primes(&self) -> Vec<u64> {
        self.ramified_primes.iter().copied().filter(|&p| p != self.ell).collect()
    }
}

fn predicted_valuation(t: &LocalGaloisType, dec: &Decomposition, p: u64, degree: usize) -> Option<u32> {
    if !(dec.inertia.order() as u64).is_multiple_of(p) {
        return Some(tame_disc_valuation(&dec.inertia));
    }
    match t {
        LocalGaloisType::WildCyclic { m, e, .. } if m == e && (p == 3 || p == 5) => {
            let moved = dec.inertia.orbits().iter().filter(|o| o.len() > 1).count() as u32;
            Some(moved * 2 * (p as u32 - 1))
        }
        LocalGaloisType::WildDihedralEll { totally_ramified: true, b, .. } if p == 3 => {
            Some(if degree == 5 { 2 + b } else { 1 + b })
        }
        LocalGaloisType::PrimitiveS4 { variant } => {
            weil_table().rows.iter().find(|r| r.variant == *variant).map(|r| r.stem_v2)
        }
        _ => None,
    }
}

/// Full local analysis of the splitting field of f for the prime ℓ.
pub fn analyze(f: &ZPoly, ell: u64) -> Result<FieldAnalysis> {
    analyze_with(f, ell, &PeuTresTable::default())
}

pub fn analyze_with(f: &ZPoly, ell: u64, table: &PeuTresTable) -> Result<FieldAnalysis> {
    if ell < 3 || !arith::is_prime_u64(ell) {
        return Err(Error::Domain(format!("ℓ = {ell} is not an odd prime")));
    }
    let n = f.deg();
    if n != 4 && n != 5 {
        return Err(Error::NotExceptional(format!("group OTHER (degree {n} unsupported)")));
    }
    let irreducibility = irreducibility_screen(f)?;
    if let Irreducibility::Reducible(why) = &irreducibility {
        return Err(Error::NotExceptional(format!("group OTHER (reducible input: {why})")));
    }
    let group = galois_group(f)?;
    if !group.is_exceptional() {
        return Err(Error::NotExceptional(format!("group {group}")));
    }
    let non_real = is_non_real(f)?;
    if !non_real {
        return Err(Error::NotExceptional("K is totally real".into()));
    }
    let ctx = FieldContext::new(f, group.clone())?;
    let mut notes = Vec::new();
    if irreducibility == Irreducibility::Screened {
        notes.push("irreducibility screened mod small primes, not proved".into());
    }
    let mut local_types = BTreeMap::new();
    let mut primes = BTreeMap::new();
    let mut field_disc = if ctx.disc.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut ell_type = None;
    for q in arith::prime_support(&ctx.disc) {
        let p = q.to_u64().ok_or_else(|| Error::Domain(format!("prime {q} exceeds 64 bits")))?;
        let (t, dec) = local_type_in(&ctx, p, table).map_err(|e| e.at_prime(p))?;
        let dec = match dec {
            Some(d) => d,
            None => {
                if p == ell {
                    ell_type = Some(t);
                }
                continue;
            }
        };
        field_disc *= BigInt::from(p).pow(dec.disc_valuation);
        let predicted = predicted_valuation(&t, &dec, p, n);
        if let Some(pv) = predicted {
            if pv != dec.disc_valuation {
                return Err(Error::Inconsistent(format!(
                    "type {t} predicts v_p(disc) = {pv}, observed {}",
                    dec.disc_valuation
                ))
                .at_prime(p));
            }
        }
        primes.insert(
            p,
            PrimeReport {
                stem_splitting: dec.stem_splitting.clone(),
                disc_valuation: dec.disc_valuation,
                decomposition_order: dec.decomposition.order() as u32,
                inertia_order: dec.inertia.order() as u32,
                predicted_disc_valuation: predicted,
            },
        );
        if p == ell {
            ell_type = Some(t.clone());
        }
        local_types.insert(p, t);
    }
    let ell_type = match ell_type {
        Some(t) => t,
        None => local_type_in(&ctx, ell, table)?.0,
    };
    let ramified_primes: Vec<u64> = local_types.keys().copied().collect();
    let s = ramified_primes.iter().filter(|&&p| p != ell).fold(BigInt::one(), |a, &p| a * BigInt::from(p));
    let ell_ramified = local_types.contains_key(&ell);
    if !ell_ramified {
        notes.push(format!("ℓ = {ell} is unramified in K: no weight in 2..ℓ−1 (weight-1 regime)"));
    }
    if matches!(group, GlobalGroup::A5) {
        notes.push("A5 image: modularity assumed".into());
    }
    Ok(FieldAnalysis {
        polynomial: f.clone(),
        group,
        non_real,
        irreducibility,
        ell,
        field_discriminant: field_disc,
        ramified_primes,
        local_types,
        primes,
        s,
        ell_type,
        ell_ramified,
        notes,
    })
}
