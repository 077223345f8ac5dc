//! Field catalogs and the reverse query: which catalogued fields are consistent
//! with given invariants (N, k, ν, ℓ)?
//!
//! Candidates come from a catalog rather than from a class-field-theoretic
//! construction, so a detection is only as complete as the catalog it searched.

use crate::arith;
use crate::character::DirichletChar;
use crate::error::{Error, Result};
use crate::galois::{galois_group, is_non_real, GlobalGroup};
use crate::local::analyze;
use crate::poly::ZPoly;
use crate::recipe::{enumerate_serre_types, local_recipe, twist_bound_for, SerreTypeFamily, TwistBound};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Read;

pub const COMPLETENESS_NOTE: &str =
    "candidates come from the supplied catalog, not from a class field theory construction; completeness depends on the catalog";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub label: String,
    pub degree: usize,
    pub coeffs: ZPoly,
    pub group_label: String,
    #[serde(with = "crate::bigjson")]
    pub field_discriminant: BigInt,
    pub ramified_primes: Vec<u64>,
}

impl FieldRecord {
    fn validate(self) -> std::result::Result<FieldRecord, String> {
        if self.degree != 4 && self.degree != 5 {
            return Err("degree out of range".into());
        }
        if self.coeffs.deg() != self.degree || self.coeffs.is_zero() {
            return Err(format!("degree {} does not match the polynomial degree {}", self.degree, self.coeffs.deg()));
        }
        if self.field_discriminant.is_zero() {
            return Err("zero discriminant".into());
        }
        let support: Vec<u64> = arith::prime_support(&self.field_discriminant)
            .iter()
            .map(|p| p.to_u64().unwrap_or(u64::MAX))
            .collect();
        let mut listed = self.ramified_primes.clone();
        listed.sort_unstable();
        if support != listed {
            return Err(format!("ramified primes {listed:?} differ from the discriminant's prime support {support:?}"));
        }
        Ok(FieldRecord { ramified_primes: listed, ..self })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogFormat {
    Csv,
    JsonLines,
}

impl CatalogFormat {
    pub fn parse(s: &str) -> Option<CatalogFormat> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(CatalogFormat::Csv),
            "json-lines" | "jsonl" | "ndjson" => Some(CatalogFormat::JsonLines),
            _ => None,
        }
    }

    /// Guess from a file name.
    pub fn from_path(path: &str) -> CatalogFormat {
        if path.ends_with(".jsonl") || path.ends_with(".ndjson") || path.ends_with(".json") {
            CatalogFormat::JsonLines
        } else {
            CatalogFormat::Csv
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub records: Vec<FieldRecord>,
    pub rejects: Vec<Reject>,
}

const CSV_COLUMNS: [&str; 6] = ["label", "degree", "coeffs", "group_label", "discriminant", "ramified_primes"];

fn parse_primes(s: &str) -> std::result::Result<Vec<u64>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<u64>().map_err(|_| format!("bad prime {x:?}")))
        .collect()
}

fn record_from_cells(cells: &[String]) -> std::result::Result<FieldRecord, String> {
    if cells.len() != 6 {
        return Err(format!("expected 6 columns, found {}", cells.len()));
    }
    let degree = cells[1].trim().parse::<usize>().map_err(|_| format!("bad degree {:?}", cells[1]))?;
    let coeffs: ZPoly = cells[2].trim().parse().map_err(|e| format!("bad coefficients: {e}"))?;
    let disc = cells[4].trim().parse::<BigInt>().map_err(|_| format!("bad discriminant {:?}", cells[4]))?;
    FieldRecord {
        label: cells[0].trim().to_string(),
        degree,
        coeffs,
        group_label: cells[3].trim().to_string(),
        field_discriminant: disc,
        ramified_primes: parse_primes(&cells[5])?,
    }
    .validate()
}

/// Rejoins an unquoted coefficient list that the CSV reader split at its commas.
fn merge_bracket_cells(raw: Vec<String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut open: Option<String> = None;
    for cell in raw {
        match open.take() {
            Some(mut acc) => {
                acc.push(',');
                acc.push_str(&cell);
                if cell.contains(']') {
                    out.push(acc);
                } else {
                    open = Some(acc);
                }
            }
            None if cell.trim_start().starts_with('[') && !cell.contains(']') => open = Some(cell),
            None => out.push(cell),
        }
    }
    out.extend(open);
    out
}

fn parse_csv(text: &str) -> Result<(Vec<FieldRecord>, Vec<Reject>, usize)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    let mut rows = 0;
    let mut header_seen = false;
    for row in reader.records() {
        let row = row.map_err(|e| Error::Format(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let cells = merge_bracket_cells(row.iter().map(str::to_string).collect());
        if cells.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let names: Vec<String> = cells.iter().map(|c| c.trim().to_ascii_lowercase()).collect();
            if names == CSV_COLUMNS {
                continue;
            }
        }
        rows += 1;
        match record_from_cells(&cells) {
            Ok(r) => records.push(r),
            Err(reason) => rejects.push(Reject { line, reason }),
        }
    }
    Ok((records, rejects, rows))
}

fn cell_of(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn list_cell(items: &[Value], sep: &str) -> String {
    items.iter().map(cell_of).collect::<Vec<_>>().join(sep)
}

fn record_from_json(line: &str) -> std::result::Result<FieldRecord, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = v.as_object().ok_or("not a JSON object")?;
    let mut cells = Vec::new();
    for key in CSV_COLUMNS {
        let val = obj.get(key).ok_or_else(|| format!("missing key {key:?}"))?;
        let cell = match (key, val) {
            ("coeffs", Value::Array(items)) => format!("[{}]", list_cell(items, ",")),
            (_, Value::Array(items)) => list_cell(items, ";"),
            _ => cell_of(val),
        };
        cells.push(cell);
    }
    record_from_cells(&cells)
}

fn parse_jsonl(text: &str) -> (Vec<FieldRecord>, Vec<Reject>, usize) {
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        match record_from_json(line) {
            Ok(r) => records.push(r),
            Err(reason) => rejects.push(Reject { line: i + 1, reason }),
        }
    }
    (records, rejects, rows)
}

/// Reads a catalog; malformed rows become rejects with their line numbers.
pub fn parse_catalog<R: Read>(mut input: R, format: CatalogFormat) -> Result<Catalog> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (records, rejects, rows) = match format {
        CatalogFormat::Csv => parse_csv(&text)?,
        CatalogFormat::JsonLines => parse_jsonl(&text),
    };
    if rows > 0 && 2 * rejects.len() > rows {
        return Err(Error::Format(format!(
            "{} of {rows} rows rejected (first: line {}: {})",
            rejects.len(),
            rejects[0].line,
            rejects[0].reason
        )));
    }
    Ok(Catalog { records, rejects })
}

pub fn load_catalog(path: &str) -> Result<Catalog> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    parse_catalog(file, CatalogFormat::from_path(path))
}

fn primes_cell(ps: &[u64]) -> String {
    ps.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

pub fn to_csv(records: &[FieldRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).unwrap();
    for r in records {
        w.write_record([
            r.label.clone(),
            r.degree.to_string(),
            serde_json::to_string(&r.coeffs).unwrap(),
            r.group_label.clone(),
            r.field_discriminant.to_string(),
            primes_cell(&r.ramified_primes),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn to_json_lines(records: &[FieldRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let mut obj = serde_json::Map::new();
        obj.insert("label".into(), Value::String(r.label.clone()));
        obj.insert("degree".into(), Value::from(r.degree));
        obj.insert("coeffs".into(), serde_json::to_value(&r.coeffs).unwrap());
        obj.insert("group_label".into(), Value::String(r.group_label.clone()));
        obj.insert("discriminant".into(), Value::Number(crate::bigjson::to_number(&r.field_discriminant)));
        obj.insert("ramified_primes".into(), Value::from(r.ramified_primes.clone()));
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

/// The four worked examples: QΔ (ℓ = 59), the M4 field (ℓ = 11), the level-4 field
/// (ℓ = 19) and the A5 quintic (ℓ = 3).
pub fn builtin_corpus() -> Vec<FieldRecord> {
    let rec = |label: &str, c: &[i64], g: &str, d: i64, ps: &[u64]| FieldRecord {
        label: label.into(),
        degree: c.len() - 1,
        coeffs: ZPoly::from_i64(c),
        group_label: g.into(),
        field_discriminant: BigInt::from(d),
        ramified_primes: ps.to_vec(),
    };
    vec![
        rec("qdelta-59", &[3, 11, -7, -1, 1], "S4", -205_379, &[59]),
        rec("s4-m4-11", &[-13, 16, -4, -2, 1], "S4", -21_296, &[2, 11]),
        rec("s4-level4-19", &[-2, -6, -2, -1, 1], "S4", -27_436, &[2, 19]),
        rec("a5-23", &[9, 0, 6, 3, 0, 1], "A5", 42_849, &[3, 23]),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Negative {
    pub label: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtered {
    pub candidates: Vec<FieldRecord>,
    pub negatives: Vec<Negative>,
    pub notes: Vec<String>,
}

/// Records ramified only at primes dividing N·ℓ, with verified exceptional group and non-real.
pub fn filter_candidates(catalog: &[FieldRecord], ell: u64, n: u64) -> Filtered {
    let mut out = Filtered::default();
    let mut sorted: Vec<&FieldRecord> = catalog.iter().collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label));
    for r in sorted {
        let neg = |reason: String| Negative { label: r.label.clone(), reason };
        if let Some(p) = r.ramified_primes.iter().find(|&&p| !(n * ell).is_multiple_of(p)) {
            out.negatives.push(neg(format!("ramified at {p}, which does not divide N·ℓ")));
            continue;
        }
        let group = match galois_group(&r.coeffs) {
            Ok(g) => g,
            Err(e) => {
                out.negatives.push(neg(format!("group not computed: {e}")));
                continue;
            }
        };
        if !group.is_exceptional() {
            out.negatives.push(neg(format!("group {group} (catalog says {})", r.group_label)));
            continue;
        }
        if GlobalGroup::parse(&r.group_label).as_ref() != Some(&group) {
            out.notes.push(format!("{}: catalog group {} but computed {group}", r.label, r.group_label));
        }
        match is_non_real(&r.coeffs) {
            Ok(true) => out.candidates.push(r.clone()),
            Ok(false) => out.negatives.push(neg("totally real".into())),
            Err(e) => out.negatives.push(neg(format!("reality test failed: {e}"))),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchQuality {
    Exact,
    UpToSign,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u64,
    pub nu: DirichletChar,
    pub ell: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub record: FieldRecord,
    pub family: SerreTypeFamily,
    pub quality: MatchQuality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub query: Query,
    pub matches: Vec<Match>,
    pub negatives: Vec<Negative>,
    /// Records whose analysis could not be completed.
    pub skipped: Vec<Negative>,
    pub notes: Vec<String>,
}

/// Conductor-exponent bound per prime of S implied by v_p(N).
pub fn twist_bounds(analysis: &crate::local::FieldAnalysis, n: u64) -> Result<Option<TwistBound>> {
    let mut bound = TwistBound::uniform(0);
    for p in analysis.s_primes() {
        let v = arith::valuation(&BigInt::from(n), p).unwrap_or(0);
        let recipe = local_recipe(&analysis.local_types[&p], p, analysis.ell)?;
        match twist_bound_for(&recipe, v, analysis.ell) {
            Some(c) => {
                bound.per_prime.insert(p, c);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(bound))
}

enum Verdict {
    Match(SerreTypeFamily, MatchQuality),
    Negative(String),
    Skipped(String),
}

fn judge(record: &FieldRecord, q: &Query, nu: &DirichletChar) -> Verdict {
    let analysis = match analyze(&record.coeffs, q.ell) {
        Ok(a) => a,
        Err(Error::NotExceptional(why)) => return Verdict::Negative(why),
        Err(e) => return Verdict::Skipped(e.to_string()),
    };
    if !analysis.ell_ramified {
        return Verdict::Negative(format!("ℓ = {} is unramified in K (weight-1 regime)", q.ell));
    }
    let s_rad: u64 = analysis.s_primes().iter().product();
    let n_rad: u64 = arith::factorize_u64(q.n).iter().map(|(p, _)| p).product();
    if s_rad != n_rad {
        return Verdict::Negative(format!("the primes of N differ from those of S = {s_rad}"));
    }
    let bound = match twist_bounds(&analysis, q.n) {
        Ok(Some(b)) => b,
        Ok(None) => return Verdict::Negative("N is below the smallest level this field allows".into()),
        Err(e) => return Verdict::Skipped(e.to_string()),
    };
    let families = match enumerate_serre_types(&analysis, &bound) {
        Ok(f) => f,
        Err(e) if e.is_external_reference() => return Verdict::Skipped(e.to_string()),
        Err(e) => return Verdict::Skipped(e.to_string()),
    };
    let mut best: Option<(SerreTypeFamily, MatchQuality)> = None;
    for f in families {
        if !f.weights.contains(q.k) {
            continue;
        }
        let n_ok = f.n.is_none_or(|n| n == q.n);
        let nu_ok = f.nu.as_ref().is_none_or(|x| x.chi == *nu);
        if !(n_ok && nu_ok) {
            continue;
        }
        let quality = if f.partial {
            MatchQuality::Partial
        } else if f.sign_indeterminate {
            MatchQuality::UpToSign
        } else {
            MatchQuality::Exact
        };
        if best.as_ref().is_none_or(|(_, b)| quality < *b) {
            best = Some((f, quality));
        }
    }
    match best {
        Some((f, qual)) => Verdict::Match(f, qual),
        None => Verdict::Negative(format!("no Serre type (N = {}, k = {}, ν) among the field's families", q.n, q.k)),
    }
}

/// The reverse query over a catalog.
pub fn detect(n: u64, k: u64, nu: &DirichletChar, ell: u64, catalog: &[FieldRecord]) -> Result<DetectionReport> {
    if ell < 3 || !arith::is_prime_u64(ell) {
        return Err(Error::Domain(format!("ℓ = {ell} is not an odd prime")));
    }
    if !(2..ell).contains(&k) {
        return Err(Error::Domain(format!("weight {k} outside 2..ℓ−1")));
    }
    if n == 0 || n.is_multiple_of(ell) {
        return Err(Error::Domain(format!("level {n} must be positive and prime to ℓ")));
    }
    if nu.order().is_multiple_of(ell) {
        return Err(Error::OrderNotPrimeToEll { order: nu.order(), ell });
    }
    let nu = nu.primitive();
    if !n.is_multiple_of(nu.conductor()) {
        return Err(Error::Domain(format!("ν has conductor {} not dividing N = {n}", nu.conductor())));
    }
    let filtered = filter_candidates(catalog, ell, n);
    let query = Query { n, k, nu: nu.clone(), ell };
    let mut report = DetectionReport {
        query: query.clone(),
        matches: Vec::new(),
        negatives: filtered.negatives,
        skipped: Vec::new(),
        notes: vec![COMPLETENESS_NOTE.to_string()],
    };
    report.notes.extend(filtered.notes);
    // per-record work is independent
    let verdicts: Vec<(FieldRecord, Verdict)> = std::thread::scope(|s| {
        let handles: Vec<_> = filtered
            .candidates
            .iter()
            .map(|r| {
                let q = &query;
                let nu = &nu;
                s.spawn(move || (r.clone(), judge(r, q, nu)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("detection worker")).collect()
    });
    for (record, v) in verdicts {
        match v {
            Verdict::Match(family, quality) => report.matches.push(Match { record, family, quality }),
            Verdict::Negative(reason) => report.negatives.push(Negative { label: record.label, reason }),
            Verdict::Skipped(reason) => report.skipped.push(Negative { label: record.label, reason }),
        }
    }
    report.negatives.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(report)
}

/// Labels in a report by outcome, for quick checks.
pub fn report_outcomes(r: &DetectionReport) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for m in &r.matches {
        out.insert(m.record.label.clone(), format!("{:?}", m.quality));
    }
    for n in &r.negatives {
        out.insert(n.label.clone(), "negative".into());
    }
    for n in &r.skipped {
        out.insert(n.label.clone(), "skipped".into());
    }
    out
}
