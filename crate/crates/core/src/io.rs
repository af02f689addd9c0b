//! JSON and CSV forms of table functions, expansions and wavelet tables.
//!
//! A cell value is written in one of three shapes:
//! * `{re, im}` (floating mode);
//! * `{mag_num, mag_den, [mag_surd], phase_num, phase_den}` for
//!   `(mag_num/mag_den)·[√p]·e(phase_num/phase_den)`;
//! * `{terms: [...]}` with one such polar record per term, for exact values
//!   that are not a single monomial.
//!
//! `digits` lists the cell representative's digits from position `−M` up to
//! `K − 1`. Big integers are written as JSON numbers when they fit in 64 bits
//! and as decimal strings otherwise; both are accepted on input.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::function_space::LocallyConstantFn;
use crate::kozyrev::{KozyrevIndex, WaveletExpansion, Window};
use crate::phase::RationalPhase;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigIntText(pub BigInt);

impl Serialize for BigIntText {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BigIntText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(BigIntText(v.into())),
            Raw::Text(s) => s.trim().parse().map(BigIntText).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarRecord {
    pub mag_num: BigIntText,
    pub mag_den: BigIntText,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mag_surd: bool,
    pub phase_num: u64,
    pub phase_den: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRecord {
    Float { re: f64, im: f64 },
    Polar(PolarRecord),
    Terms { terms: Vec<PolarRecord> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub digits: Vec<u64>,
    #[serde(flatten)]
    pub value: ValueRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionRecord {
    pub prime: u64,
    pub support_exponent: i64,
    pub resolution_exponent: i64,
    pub cells: Vec<CellRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRecord {
    pub n_min: i64,
    pub n_max: i64,
    pub max_depth: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub n: i64,
    pub m_digits: Vec<u64>,
    pub j: u64,
    #[serde(flatten)]
    pub value: ValueRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionRecord {
    pub prime: u64,
    pub window: WindowRecord,
    pub coefficients: Vec<CoefficientRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletTableRecord {
    pub n: i64,
    pub m_digits: Vec<u64>,
    pub j: u64,
    pub cells: Vec<CellRecord>,
}

fn polar(coef: &BigRational, surd: bool, phase: RationalPhase) -> PolarRecord {
    PolarRecord {
        mag_num: BigIntText(coef.numer().clone()),
        mag_den: BigIntText(coef.denom().clone()),
        mag_surd: surd,
        phase_num: phase.num(),
        phase_den: phase.den(),
    }
}

/// Single-term form, if any. The stored form is tried first: reduction
/// unfolds `√2` into two roots of unity.
fn monomial_form(c: &Cyclotomic) -> Option<(BigRational, bool, RationalPhase)> {
    c.as_monomial().or_else(|| c.canonical().as_monomial())
}

/// Exact values keep their exact shape; everything else is `{re, im}`.
pub fn value_record<S: Scalar>(v: &S) -> ValueRecord {
    match v.as_cyclotomic() {
        Some(c) => match monomial_form(c) {
            Some((mag, surd, phase)) => ValueRecord::Polar(polar(&mag, surd, phase)),
            None => ValueRecord::Terms { terms: c.canonical().terms().map(|(q, s, ph)| polar(q, s, ph)).collect() },
        },
        None => {
            let z = v.to_complex();
            ValueRecord::Float { re: z.re, im: z.im }
        }
    }
}

fn polar_value(p: u64, r: &PolarRecord, field: &str) -> Result<Cyclotomic> {
    if r.mag_den.0.is_zero() {
        return Err(Error::Parse(format!("{field}.mag_den: zero denominator")));
    }
    if r.phase_den == 0 {
        return Err(Error::Parse(format!("{field}.phase_den: zero denominator")));
    }
    let mut d = r.phase_den;
    while d % p == 0 {
        d /= p;
    }
    if d != 1 {
        return Err(Error::Parse(format!("{field}.phase_den: {} is not a power of {p}", r.phase_den)));
    }
    let mag = BigRational::new(r.mag_num.0.clone(), r.mag_den.0.clone());
    Ok(Cyclotomic::monomial(p, mag, r.mag_surd, RationalPhase::new(r.phase_num as i128, r.phase_den as u128)))
}

/// Converts a record to a scalar; floating records are rejected in exact mode.
pub fn value_from_record<S: Scalar>(p: u64, r: &ValueRecord, field: &str) -> Result<S> {
    match r {
        ValueRecord::Float { re, im } => S::from_complex(Complex64::new(*re, *im)).ok_or_else(|| {
            Error::Parse(format!("{field}: floating value {{re, im}} cannot be read in exact mode"))
        }),
        ValueRecord::Polar(pr) => Ok(S::from_cyclotomic(&polar_value(p, pr, field)?)),
        ValueRecord::Terms { terms } => {
            let mut acc = Cyclotomic::zero();
            for (t, pr) in terms.iter().enumerate() {
                acc = acc + polar_value(p, pr, &format!("{field}.terms[{t}]"))?;
            }
            Ok(S::from_cyclotomic(&acc))
        }
    }
}

fn cell_records<S: Scalar>(f: &LocallyConstantFn<S>) -> Vec<CellRecord> {
    f.entries().map(|(i, v)| CellRecord { digits: f.cell(i).rep_digits(), value: value_record(v) }).collect()
}

pub fn function_to_record<S: Scalar>(f: &LocallyConstantFn<S>) -> FunctionRecord {
    FunctionRecord {
        prime: f.prime(),
        support_exponent: f.support_exponent(),
        resolution_exponent: f.resolution_exponent(),
        cells: cell_records(f),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        // serde_json appends its own " at line L column C"
        let msg = inner.to_string();
        let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m).to_string();
        Error::Parse(format!("line {line}, column {column}, field {path}: {msg}"))
    })
}

fn cell_index(p: u64, depth: i64, digits: &[u64], field: &str) -> Result<u64> {
    if digits.len() as i64 != depth {
        return Err(Error::Parse(format!("{field}.digits: expected {depth} digits, found {}", digits.len())));
    }
    if let Some(d) = digits.iter().find(|&&d| d >= p) {
        return Err(Error::Parse(format!("{field}.digits: digit {d} out of range for p = {p}")));
    }
    Ok(digits.iter().rev().fold(0, |acc, &d| acc * p + d))
}

pub fn function_from_record<S: Scalar>(r: &FunctionRecord) -> Result<LocallyConstantFn<S>> {
    let p = r.prime;
    crate::padic::check_prime(p).map_err(|e| Error::Parse(format!("prime: {e}")))?;
    let depth = r.support_exponent + r.resolution_exponent;
    let mut entries = Vec::with_capacity(r.cells.len());
    let mut seen = std::collections::BTreeSet::new();
    for (c, cell) in r.cells.iter().enumerate() {
        let field = format!("cells[{c}]");
        let i = cell_index(p, depth, &cell.digits, &field)?;
        if !seen.insert(i) {
            return Err(Error::Parse(format!("{field}.digits: cell listed twice")));
        }
        entries.push((i, value_from_record::<S>(p, &cell.value, &field)?));
    }
    LocallyConstantFn::from_table(p, r.support_exponent, r.resolution_exponent, entries)
}

pub fn function_to_json<S: Scalar>(f: &LocallyConstantFn<S>) -> String {
    serde_json::to_string_pretty(&function_to_record(f)).expect("records serialize")
}

pub fn function_from_json<S: Scalar>(text: &str) -> Result<LocallyConstantFn<S>> {
    function_from_record(&parse_json::<FunctionRecord>(text)?)
}

pub fn expansion_to_record<S: Scalar>(e: &WaveletExpansion<S>) -> ExpansionRecord {
    let w = e.window();
    ExpansionRecord {
        prime: e.prime(),
        window: WindowRecord { n_min: w.n_min, n_max: w.n_max, max_depth: w.max_depth },
        coefficients: e
            .iter()
            .map(|(idx, c)| CoefficientRecord {
                n: idx.n,
                m_digits: idx.m_digits.clone(),
                j: idx.j,
                value: value_record(c),
            })
            .collect(),
    }
}

pub fn expansion_from_record<S: Scalar>(r: &ExpansionRecord) -> Result<WaveletExpansion<S>> {
    let p = r.prime;
    crate::padic::check_prime(p).map_err(|e| Error::Parse(format!("prime: {e}")))?;
    let window = Window::new(r.window.n_min, r.window.n_max, r.window.max_depth)
        .map_err(|e| Error::Parse(format!("window: {e}")))?;
    let mut out = WaveletExpansion::new(p, window)?;
    for (c, rec) in r.coefficients.iter().enumerate() {
        let field = format!("coefficients[{c}]");
        let idx = KozyrevIndex::new(rec.n, &rec.m_digits, rec.j);
        idx.validate(p).map_err(|e| Error::Parse(format!("{field}: {e}")))?;
        out.insert(idx, value_from_record::<S>(p, &rec.value, &field)?)?;
    }
    Ok(out)
}

pub fn expansion_to_json<S: Scalar>(e: &WaveletExpansion<S>) -> String {
    serde_json::to_string_pretty(&expansion_to_record(e)).expect("records serialize")
}

pub fn expansion_from_json<S: Scalar>(text: &str) -> Result<WaveletExpansion<S>> {
    expansion_from_record(&parse_json::<ExpansionRecord>(text)?)
}

pub fn wavelet_table_record<S: Scalar>(idx: &KozyrevIndex, f: &LocallyConstantFn<S>) -> WaveletTableRecord {
    WaveletTableRecord { n: idx.n, m_digits: idx.m_digits.clone(), j: idx.j, cells: cell_records(f) }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `|v|`, printed verbatim in exact mode.
pub fn fmt_magnitude<S: Scalar>(v: &S) -> String {
    if let Some(c) = v.as_cyclotomic() {
        if let Some((mag, surd, _)) = monomial_form(c) {
            let p = c.prime().unwrap_or(2);
            return Cyclotomic::monomial(p, mag.abs(), surd, RationalPhase::ZERO).to_string();
        }
    }
    fmt_float(v.to_complex().norm())
}

/// `(phase_num, phase_den)` of a value, exact where possible.
pub fn phase_of<S: Scalar>(v: &S) -> (String, String) {
    match v.as_cyclotomic().and_then(monomial_form) {
        Some((_, _, phase)) => (phase.num().to_string(), phase.den().to_string()),
        None => {
            let z = v.to_complex();
            let turns = z.im.atan2(z.re) / std::f64::consts::TAU;
            (fmt_float(turns.rem_euclid(1.0)), "1".into())
        }
    }
}

/// Schematic export: `cell_label,norm_exponent,phase_num,phase_den,magnitude`
/// for every support cell of every wavelet, with `cell_label` the wavelet
/// label followed by the cell digits.
pub fn wavelet_table_csv<S: Scalar>(tables: &[(KozyrevIndex, LocallyConstantFn<S>)]) -> String {
    let mut out = String::from("cell_label,norm_exponent,phase_num,phase_den,magnitude\n");
    for (idx, f) in tables {
        for (i, v) in f.entries() {
            let cell = f.cell(i);
            let digits: Vec<String> = cell.rep_digits().iter().map(u64::to_string).collect();
            let m: Vec<String> = idx.m_digits.iter().map(u64::to_string).collect();
            let norm = cell.norm_exponent().map_or_else(|| "-inf".to_string(), |e| e.to_string());
            let (pn, pd) = phase_of(v);
            let _ = writeln!(
                out,
                "n={} m={} j={} cell={},{norm},{pn},{pd},{}",
                idx.n,
                m.join(" "),
                idx.j,
                digits.join(" "),
                fmt_magnitude(v)
            );
        }
    }
    out
}
