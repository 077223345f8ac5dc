//! Serre invariants (N, k, ν) from local types.
//!
//! For each p | S a [`LocalRecipe`] gives ε_p, the rule for n_p(φ_p) and the
//! rule for δ_p(φ_p); the type at ℓ gives the weight set. A family is one
//! choice of local twists φ_p with N = ∏ p^(n_p − δ_p) and ν = ∏ ε_p⁻¹ φ_p⁻²
//! reduced mod λ.
//!
//! Determinants in the tame 2-power dihedral cases come from ρ = Ind_M β with
//! M unramified: on units det ρ = β restricted to Z_p^×, and β^(p−1) has order m.
//! Writing β = χ^a on F_{p²}^× forces gcd(p+1, a) = (p+1)/m, so β(−1) = (−1)^a.
//! For m = 4 this gives the Legendre symbol when (p+1)/4 is odd and a square of a
//! tame character (taken trivial) when (p+1)/4 is even.

use crate::character::{canonical_tame, canonical_wild, legendre, reduce_mod_lambda, DirichletChar, ModLChar};
use crate::error::{Error, Result};
use crate::galois::GlobalGroup;
use crate::local::{FieldAnalysis, LocalGaloisType, Regime, WeilVariant};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const MODULARITY_NOTE: &str = "modularity assumed (A5 image)";
pub const OUTSIDE_WINDOW_NOTE: &str = "weight 4 lies outside the 2 ≤ k ≤ ℓ−1 window (très ramifié convention)";

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightPartition {
    pub plus: BTreeSet<u64>,
    pub minus: BTreeSet<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightSet {
    pub values: BTreeSet<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<WeightPartition>,
}

impl WeightSet {
    fn plain(values: &[u64]) -> WeightSet {
        WeightSet { values: values.iter().copied().collect(), partition: None }
    }

    fn split(plus: [u64; 2], minus: [u64; 2]) -> WeightSet {
        let plus: BTreeSet<u64> = plus.into_iter().collect();
        let minus: BTreeSet<u64> = minus.into_iter().collect();
        WeightSet { values: plus.union(&minus).copied().collect(), partition: Some(WeightPartition { plus, minus }) }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.values.contains(&k)
    }
}

fn congruence(ell: u64, modulus: u64, residue: i64, what: &str) -> Result<()> {
    if (ell as i64 - residue).rem_euclid(modulus as i64) != 0 {
        return Err(Error::Inconsistent(format!("{what} at ℓ = {ell} needs ℓ ≡ {residue} mod {modulus}")));
    }
    Ok(())
}

fn ordinary_weights(e: u64, l: u64) -> WeightSet {
    match e {
        2 => WeightSet::plain(&[l.div_ceil(2)]),
        3 => WeightSet::plain(&[l.div_ceil(3), (2 * l + 1) / 3]),
        4 => WeightSet::plain(&[l.div_ceil(4), (3 * l + 1) / 4]),
        _ => WeightSet::split([l.div_ceil(5), (4 * l + 1) / 5], [(2 * l + 3) / 5, (3 * l + 2) / 5]),
    }
}

fn supersingular_weights(m: u64, l: u64) -> WeightSet {
    match m {
        2 => WeightSet::plain(&[(l + 3) / 2]),
        3 => WeightSet::plain(&[(l + 4) / 3, (2 * l + 5) / 3]),
        4 => WeightSet::plain(&[(l + 5) / 4, (3 * l + 7) / 4]),
        _ => WeightSet::split([(l + 6) / 5, (4 * l + 9) / 5], [(2 * l + 7) / 5, (3 * l + 8) / 5]),
    }
}

/// 𝔚_ℓ from the type of K at ℓ.
pub fn weight_set(t: &LocalGaloisType, ell: u64) -> Result<WeightSet> {
    if ell < 3 || ell.is_multiple_of(2) {
        return Err(Error::Domain(format!("ℓ = {ell} is not an odd prime")));
    }
    match t {
        LocalGaloisType::Unramified { .. } | LocalGaloisType::WildCyclic { .. } => Ok(WeightSet::default()),
        LocalGaloisType::TameCyclic { e, .. } => {
            let e = *e as u64;
            if !(2..=5).contains(&e) {
                return Err(Error::Inconsistent(format!("tame cyclic e = {e} at ℓ")));
            }
            congruence(ell, e, 1, "tame cyclic type")?;
            Ok(ordinary_weights(e, ell))
        }
        LocalGaloisType::TameDihedral { m } => {
            let m = *m as u64;
            if !(2..=5).contains(&m) {
                return Err(Error::Inconsistent(format!("tame dihedral m = {m} at ℓ")));
            }
            congruence(ell, m, -1, "tame dihedral type")?;
            Ok(supersingular_weights(m, ell))
        }
        LocalGaloisType::DihedralTwoPower { group_order, m_unramified, .. } => {
            if !m_unramified {
                return Err(Error::Inconsistent("2-power dihedral type at odd ℓ with M ramified".into()));
            }
            let m = *group_order as u64 / 2;
            congruence(ell, m, -1, "tame dihedral type")?;
            Ok(supersingular_weights(m, ell))
        }
        LocalGaloisType::WildDihedralEll { totally_ramified, regime, .. } => {
            if !totally_ramified {
                return Ok(WeightSet::default());
            }
            match (ell, regime) {
                (5, _) => Ok(WeightSet::plain(&[3])),
                (3, Regime::Peu) => Ok(WeightSet::plain(&[2])),
                (3, Regime::Tres) => Ok(WeightSet::plain(&[4])),
                _ => Err(Error::Inconsistent(format!("wild dihedral type at ℓ = {ell} with regime {regime:?}"))),
            }
        }
        LocalGaloisType::PrimitiveA4 | LocalGaloisType::PrimitiveS4 { .. } => {
            Err(Error::Inconsistent("primitive local type at an odd prime".into()))
        }
    }
}

/// How n_p depends on the twist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum NRule {
    /// c_p(α·φ) + c_p(φ).
    Cyclic { alpha: DirichletChar },
    /// v_p(d_M) + f(M/Q_p)·max{t + b, γ(φ)}.
    Dihedral { b: u32, t: u32, m_unramified: bool },
    /// `base` when c_p(φ) ≤ `threshold`, else 2·c_p(φ).
    Primitive { threshold: u32, base: u32 },
    Unsupported { reason: String },
}

impl NRule {
    pub fn eval(&self, p: u64, phi: &DirichletChar) -> Result<u32> {
        let c = phi.conductor_exponent(p);
        match self {
            NRule::Cyclic { alpha } => Ok(alpha.mul(phi).conductor_exponent(p) + c),
            NRule::Dihedral { b, t, m_unramified: true } => Ok(2 * (t + b).max(c)),
            NRule::Dihedral { b, t, m_unramified: false } => {
                let gamma = if c >= t + 2 { 2 * c + 1 - t } else { 0 };
                Ok(t + 1 + (t + b).max(gamma))
            }
            NRule::Primitive { threshold, base } => Ok(if c <= *threshold { *base } else { 2 * c }),
            NRule::Unsupported { reason } => Err(Error::ExternalReference(reason.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DeltaRule {
    AlwaysZero,
    /// δ = 1 iff φ̄_p equals ᾱ on U_p.
    OneIffPhibarEqualsAlphabar { alpha: DirichletChar },
}

impl DeltaRule {
    pub fn eval(&self, p: u64, phi: &DirichletChar, ell: u64) -> u32 {
        match self {
            DeltaRule::AlwaysZero => 0,
            DeltaRule::OneIffPhibarEqualsAlphabar { alpha } => {
                let diff = phi.component(p).mul(&alpha.component(p).inverse()).prime_to_part(ell);
                u32::from(diff.is_trivial())
            }
        }
    }
}

/// The local ingredients of the recipe at one prime p ≠ ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRecipe {
    pub p: u64,
    pub local_type: LocalGaloisType,
    /// ε_p on U_p, or why it is not available.
    pub epsilon: std::result::Result<DirichletChar, String>,
    pub n_rule: NRule,
    pub delta_rule: DeltaRule,
}

impl LocalRecipe {
    pub fn epsilon(&self) -> Result<&DirichletChar> {
        self.epsilon.as_ref().map_err(|e| Error::ExternalReference(e.clone()))
    }
}

fn two_part(n: u64) -> u64 {
    1 << n.trailing_zeros()
}

/// α restricted to U_p for a cyclic local type.
fn cyclic_alpha(t: &LocalGaloisType, p: u64) -> Result<DirichletChar> {
    match t {
        LocalGaloisType::TameCyclic { e, .. } => canonical_tame(p, *e as u64),
        LocalGaloisType::WildCyclic { e, alpha, .. } => {
            let e = *e as u64;
            if p == 2 {
                return match (e, alpha) {
                    (2, Some(class)) => Ok(class.character()),
                    _ => Err(Error::ExternalReference(format!("wild cyclic type at 2 with e = {e}"))),
                };
            }
            let mut wild = 1;
            let mut tame = e;
            while tame.is_multiple_of(p) {
                wild *= p;
                tame /= p;
            }
            if wild != p {
                return Err(Error::ExternalReference(format!("wild cyclic type at {p} with e = {e}")));
            }
            Ok(canonical_wild(p).mul(&canonical_tame(p, tame)?))
        }
        _ => unreachable!("cyclic types only"),
    }
}

fn primitive_epsilon(variant: Option<WeilVariant>) -> DirichletChar {
    match variant {
        None | Some(WeilVariant::M2) => DirichletChar::on_prime_power(2, 2, &[(1, 2)]).unwrap(),
        Some(_) => DirichletChar::trivial(1),
    }
}

/// ε_p on U_p.
pub fn epsilon_p(t: &LocalGaloisType, p: u64) -> Result<DirichletChar> {
    match t {
        LocalGaloisType::Unramified { .. } | LocalGaloisType::TameDihedral { .. } => Ok(DirichletChar::trivial(1)),
        LocalGaloisType::TameCyclic { .. } | LocalGaloisType::WildCyclic { .. } => cyclic_alpha(t, p),
        LocalGaloisType::WildDihedralEll { totally_ramified, .. } => {
            Ok(if *totally_ramified { legendre(p) } else { DirichletChar::trivial(1) })
        }
        LocalGaloisType::DihedralTwoPower { group_order, .. } => {
            if p == 2 {
                return Err(Error::ExternalReference(format!(
                    "determinant for the dihedral type of order {group_order} at 2"
                )));
            }
            match group_order {
                8 if ((p + 1) / 4) % 2 == 1 => Ok(legendre(p)),
                8 => Ok(DirichletChar::trivial(1)),
                _ if p % 4 == 1 => canonical_tame(p, two_part(p - 1)),
                _ => Ok(DirichletChar::trivial(1)),
            }
        }
        LocalGaloisType::PrimitiveA4 => Ok(primitive_epsilon(None)),
        LocalGaloisType::PrimitiveS4 { variant } => {
            if p != 2 {
                return Err(Error::Inconsistent("primitive type away from 2".into()));
            }
            Ok(primitive_epsilon(Some(*variant)))
        }
    }
}

fn n_rule(t: &LocalGaloisType, p: u64) -> NRule {
    match t {
        LocalGaloisType::Unramified { .. } => NRule::Cyclic { alpha: DirichletChar::trivial(1) },
        LocalGaloisType::TameCyclic { .. } | LocalGaloisType::WildCyclic { .. } => match cyclic_alpha(t, p) {
            Ok(alpha) => NRule::Cyclic { alpha },
            Err(e) => NRule::Unsupported {
                reason: match e.root() {
                    Error::ExternalReference(why) => why.clone(),
                    _ => e.to_string(),
                },
            },
        },
        LocalGaloisType::TameDihedral { .. } => NRule::Dihedral { b: 1, t: 0, m_unramified: true },
        LocalGaloisType::WildDihedralEll { totally_ramified, b, .. } => {
            NRule::Dihedral { b: *b, t: 0, m_unramified: !totally_ramified }
        }
        LocalGaloisType::DihedralTwoPower { b: Some(b), t: Some(tt), m_unramified, .. } => {
            NRule::Dihedral { b: *b, t: *tt, m_unramified: *m_unramified }
        }
        LocalGaloisType::DihedralTwoPower { group_order, .. } => NRule::Unsupported {
            reason: format!("break data for the dihedral type of order {group_order} at {p} not determined"),
        },
        LocalGaloisType::PrimitiveA4 => NRule::Primitive { threshold: 2, base: 5 },
        LocalGaloisType::PrimitiveS4 { variant } => match variant {
            WeilVariant::M2 | WeilVariant::M3 => NRule::Primitive { threshold: 3, base: 7 },
            WeilVariant::M4 => NRule::Primitive { threshold: 1, base: 3 },
        },
    }
}

fn delta_rule(t: &LocalGaloisType, ell: u64) -> DeltaRule {
    match t {
        // M unramified, so ᾱ is trivial on U_p
        LocalGaloisType::TameDihedral { m } if (*m as u64).is_multiple_of(ell) => {
            DeltaRule::OneIffPhibarEqualsAlphabar { alpha: DirichletChar::trivial(1) }
        }
        _ => DeltaRule::AlwaysZero,
    }
}

pub fn local_recipe(t: &LocalGaloisType, p: u64, ell: u64) -> Result<LocalRecipe> {
    if p == ell {
        return Err(Error::Domain(format!("the recipe at p = ℓ = {p} is the weight set, not a level factor")));
    }
    let epsilon = match epsilon_p(t, p) {
        Ok(e) => Ok(e),
        Err(e) => match e.root() {
            Error::ExternalReference(why) => Err(why.clone()),
            _ => return Err(e),
        },
    };
    Ok(LocalRecipe { p, local_type: t.clone(), epsilon, n_rule: n_rule(t, p), delta_rule: delta_rule(t, ell) })
}

pub fn n_p(t: &LocalGaloisType, p: u64, phi: &DirichletChar) -> Result<u32> {
    n_rule(t, p).eval(p, phi)
}

pub fn delta_p(t: &LocalGaloisType, p: u64, phi: &DirichletChar, ell: u64) -> u32 {
    delta_rule(t, ell).eval(p, phi, ell)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalTwist {
    pub p: u64,
    pub phi: DirichletChar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreTypeFamily {
    /// One witness φ = (φ_p); further witnesses with the same (N, ν) follow.
    pub twist: Vec<LocalTwist>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub other_witnesses: Vec<Vec<LocalTwist>>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub weights: WeightSet,
    pub nu: Option<ModLChar>,
    pub sign_indeterminate: bool,
    pub partial: bool,
    pub notes: Vec<String>,
}

impl fmt::Display for SerreTypeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n.map_or("?".into(), |n| n.to_string());
        let nu = self.nu.as_ref().map_or("?".into(), |x| x.chi.to_string());
        write!(f, "N = {n}, k ∈ {:?}, ν = {nu}", self.weights.values)
    }
}

/// Conductor-exponent bounds for the local twists, per prime.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwistBound {
    pub default: u32,
    pub per_prime: BTreeMap<u64, u32>,
}

impl TwistBound {
    pub fn uniform(c: u32) -> TwistBound {
        TwistBound { default: c, per_prime: BTreeMap::new() }
    }

    pub fn at(&self, p: u64) -> u32 {
        self.per_prime.get(&p).copied().unwrap_or(self.default)
    }
}

fn family_notes(analysis: &FieldAnalysis, weights: &WeightSet) -> Vec<String> {
    let mut notes = Vec::new();
    if matches!(analysis.group, GlobalGroup::A5) {
        notes.push(MODULARITY_NOTE.to_string());
    }
    if analysis.ell == 3 && weights.contains(4) {
        notes.push(OUTSIDE_WINDOW_NOTE.to_string());
    }
    if weights.partition.is_some() {
        notes.push("k lies in 𝔚⁺ or in 𝔚⁻ for one sign that is not determined locally".to_string());
    }
    for p in analysis.s_primes() {
        if matches!(analysis.local_types[&p], LocalGaloisType::TameCyclic { e: 5, .. }) {
            notes.push(format!("α_{p} is taken as the canonical character of order 5; the other class of 5-cycles gives α_{p}²"));
        }
    }
    notes
}

/// The invariants for one tuple of local twists.
pub fn evaluate_twist(recipes: &[LocalRecipe], twist: &[LocalTwist], ell: u64) -> (Option<u64>, Option<ModLChar>, Vec<String>) {
    let mut errors = Vec::new();
    let mut n_total: Option<u64> = Some(1);
    let mut nu: Option<DirichletChar> = Some(DirichletChar::trivial(1));
    for (r, tw) in recipes.iter().zip(twist) {
        match r.n_rule.eval(r.p, &tw.phi) {
            Ok(n) => {
                let d = r.delta_rule.eval(r.p, &tw.phi, ell);
                n_total = n_total.map(|x| x * r.p.pow(n - d));
            }
            Err(e) => {
                errors.push(format!("n_{}: {e}", r.p));
                n_total = None;
            }
        }
        match r.epsilon() {
            Ok(eps) => nu = nu.map(|x| x.mul(&eps.inverse()).mul(&tw.phi.square().inverse())),
            Err(e) => {
                errors.push(format!("ε_{}: {e}", r.p));
                nu = None;
            }
        }
    }
    let nu = nu.map(|x| reduce_mod_lambda(&x.prime_to_part(ell).primitive(), ell).expect("prime-to-ℓ part"));
    (n_total, nu, errors)
}

/// All minimal Serre types for K and ℓ with local twists inside the bound.
pub fn enumerate_serre_types(analysis: &FieldAnalysis, bound: &TwistBound) -> Result<Vec<SerreTypeFamily>> {
    let ell = analysis.ell;
    let weights = weight_set(&analysis.ell_type, ell)?;
    if weights.is_empty() {
        return Ok(Vec::new());
    }
    let primes = analysis.s_primes();
    let recipes: Vec<LocalRecipe> = primes
        .iter()
        .map(|&p| local_recipe(&analysis.local_types[&p], p, ell).map_err(|e| e.at_prime(p)))
        .collect::<Result<_>>()?;
    let choices: Vec<Vec<DirichletChar>> = primes
        .iter()
        .map(|&p| crate::character::enumerate_local_twists(p, bound.at(p), ell))
        .collect();
    let base_notes = family_notes(analysis, &weights);
    let mut families: Vec<SerreTypeFamily> = Vec::new();
    let mut index: BTreeMap<(Option<u64>, Option<ModLChar>), usize> = BTreeMap::new();
    let mut idx = vec![0usize; primes.len()];
    loop {
        let twist: Vec<LocalTwist> =
            primes.iter().zip(&idx).zip(&choices).map(|((&p, &i), c)| LocalTwist { p, phi: c[i].clone() }).collect();
        let (n, nu, errors) = evaluate_twist(&recipes, &twist, ell);
        let key = (n, nu.clone());
        match index.get(&key) {
            Some(&i) => families[i].other_witnesses.push(twist),
            None => {
                index.insert(key, families.len());
                let mut notes = base_notes.clone();
                notes.extend(errors.iter().cloned());
                families.push(SerreTypeFamily {
                    twist,
                    other_witnesses: Vec::new(),
                    n,
                    sign_indeterminate: weights.partition.is_some(),
                    weights: weights.clone(),
                    nu,
                    partial: !errors.is_empty(),
                    notes,
                });
            }
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                families.sort_by(|a, b| (a.n, &a.nu).cmp(&(b.n, &b.nu)));
                return Ok(families);
            }
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// The non-minimal shape (N·m², k, ν·φ²) for a global φ of conductor m prime to ℓ·S.
pub fn auxiliary_twists(family: &SerreTypeFamily, phi: &DirichletChar, ramified: &[u64], ell: u64) -> Result<SerreTypeFamily> {
    let m = phi.conductor();
    for &p in ramified.iter().chain(std::iter::once(&ell)) {
        if m.is_multiple_of(p) {
            return Err(Error::Domain(format!("twist conductor {m} is not prime to {p}")));
        }
    }
    let mut out = family.clone();
    out.n = family.n.map(|n| n * m * m);
    out.nu = family.nu.as_ref().map(|nu| {
        let chi = nu.chi.mul(&phi.square()).prime_to_part(ell).primitive();
        reduce_mod_lambda(&chi, ell).expect("prime-to-ℓ part")
    });
    if m > 1 {
        out.notes.push(format!("auxiliary twist by a character of conductor {m}"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorollaryVariant {
    #[serde(rename = "unramified_at_2")]
    UnramifiedAt2,
    M2,
    M3,
    M4,
}

impl CorollaryVariant {
    pub fn parse(s: &str) -> Option<CorollaryVariant> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "unramified_at_2" | "unramified" => Some(CorollaryVariant::UnramifiedAt2),
            other => WeilVariant::parse(other).map(|v| match v {
                WeilVariant::M2 => CorollaryVariant::M2,
                WeilVariant::M3 => CorollaryVariant::M3,
                WeilVariant::M4 => CorollaryVariant::M4,
            }),
        }
    }

    pub fn all() -> [CorollaryVariant; 4] {
        [CorollaryVariant::UnramifiedAt2, CorollaryVariant::M2, CorollaryVariant::M3, CorollaryVariant::M4]
    }
}

/// (n₂, ε₂) for an S4 field with D4 at ℓ, by the type at 2 and c₂(φ) = c.
pub fn corollary_table(variant: CorollaryVariant, c: u32) -> (u32, DirichletChar) {
    match variant {
        CorollaryVariant::UnramifiedAt2 => (2 * c, DirichletChar::trivial(1)),
        CorollaryVariant::M2 => (if c <= 3 { 7 } else { 2 * c }, primitive_epsilon(Some(WeilVariant::M2))),
        CorollaryVariant::M3 => (if c <= 3 { 7 } else { 2 * c }, primitive_epsilon(Some(WeilVariant::M3))),
        CorollaryVariant::M4 => (if c <= 1 { 3 } else { 2 * c }, primitive_epsilon(Some(WeilVariant::M4))),
    }
}

/// A few characters of U_p of exact conductor exponent c and order prime to ℓ,
/// enough to realize the smallest n_p among all such twists.
fn twist_representatives(recipe: &LocalRecipe, c: u32, ell: u64) -> Vec<DirichletChar> {
    let p = recipe.p;
    let mut reps = Vec::new();
    let generic = match (p, c) {
        (_, 0) => Some(DirichletChar::trivial(1)),
        (2, 1) => None,
        (2, 2) => DirichletChar::on_prime_power(2, 2, &[(1, 2)]).ok(),
        (2, _) => DirichletChar::on_prime_power(2, c, &[(0, 2), (1, 1 << (c - 2))]).ok(),
        (_, 1) => Some(legendre(p)),
        _ => DirichletChar::on_prime_power(p, c, &[(1, p.pow(c - 1))]).ok(),
    };
    reps.extend(generic);
    if let NRule::Cyclic { alpha } = &recipe.n_rule {
        let inv = alpha.inverse().prime_to_part(ell).primitive();
        if inv.conductor_exponent(p) == c {
            reps.push(inv.clone());
            if let Some(g) = reps.first().cloned() {
                reps.push(inv.mul(&g).primitive());
            }
        }
    }
    reps.retain(|x| x.conductor_exponent(p) == c && x.order() % ell != 0);
    reps
}

/// Largest c with n_p(c) − 1 ≤ v, or `None` if even c = 0 does not fit.
pub fn twist_bound_for(recipe: &LocalRecipe, v: u32, ell: u64) -> Option<u32> {
    let mut best = None;
    // every rule has n_p(φ) ≥ c_p(φ)
    for c in 0..=(v + 1) {
        let fits = twist_representatives(recipe, c, ell)
            .iter()
            .any(|phi| recipe.n_rule.eval(recipe.p, phi).map(|n| n <= v + 1).unwrap_or(false));
        if fits {
            best = Some(c);
        }
    }
    best
}

/// ℓ ∤ N and ν has order prime to ℓ and conductor dividing N.
pub fn check_family(f: &SerreTypeFamily, ell: u64) -> bool {
    let n_ok = f.n.is_none_or(|n| n % ell != 0);
    let nu_ok = match (&f.nu, f.n) {
        (Some(nu), Some(n)) => nu.order() % ell != 0 && n % nu.chi.conductor() == 0,
        (Some(nu), None) => nu.order() % ell != 0,
        _ => true,
    };
    n_ok && nu_ok && f.n.is_none_or(|n| n.gcd(&ell) == 1)
}
