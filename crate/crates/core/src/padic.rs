//! Finite-precision elements of `Q_p` in Laurent-digit form
//! `p^N (d_0 + d_1 p + … + d_{K-1} p^{K-1}) + O(p^{N+K})`, plus the affine
//! group `ax + b` over them.
//!
//! Digits are canonical (`0..p`), negatives are carried as p-adic complements
//! and precision propagates pessimistically: a sum is known modulo the
//! coarser of its operands' absolute precisions.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::RationalPhase;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not prime")))
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn ord_p(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "ord_p(0) is infinite");
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// `p^e` as a rational, any sign of `e`.
pub fn p_pow_rational(p: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// `abs_precision: None` is the exact zero; `Some(a)` means `0 + O(p^a)`.
    Zero { abs_precision: Option<i64>, lost: bool },
    Unit { valuation: i64, digits: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicNumber {
    prime: u64,
    repr: Repr,
}

impl PAdicNumber {
    pub fn zero(p: u64) -> Self {
        PAdicNumber { prime: p, repr: Repr::Zero { abs_precision: None, lost: false } }
    }

    fn zero_at(p: u64, abs_precision: i64, lost: bool) -> Self {
        PAdicNumber { prime: p, repr: Repr::Zero { abs_precision: Some(abs_precision), lost } }
    }

    /// The `precision`-digit expansion of `num/den`.
    pub fn from_rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        p: u64,
        precision: usize,
    ) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        check_prime(p)?;
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        if precision == 0 {
            return Err(Error::invalid("precision must be at least 1"));
        }
        if num.is_zero() {
            return Ok(PAdicNumber::zero(p));
        }
        let (vn, vd) = (ord_p(&num, p), ord_p(&den, p));
        let pb = BigInt::from(p);
        let unit_num = &num / num_traits::pow(pb.clone(), vn as usize);
        let unit_den = &den / num_traits::pow(pb.clone(), vd as usize);
        let modulus = num_traits::pow(pb, precision);
        let inv = unit_den.extended_gcd(&modulus).x;
        let value = (unit_num * inv).mod_floor(&modulus);
        Ok(PAdicNumber {
            prime: p,
            repr: Repr::Unit { valuation: vn as i64 - vd as i64, digits: base_p_digits(&value, p, precision) },
        })
    }

    pub fn from_integer(n: i64, p: u64, precision: usize) -> Result<Self> {
        PAdicNumber::from_rational(n, 1, p, precision)
    }

    /// `p^valuation · Σ digits[i] p^i`; leading zero digits are absorbed into
    /// the valuation, and an all-zero digit string gives zero modulo
    /// `p^(valuation + len)`.
    pub fn from_digits(p: u64, valuation: i64, digits: &[u64]) -> Result<Self> {
        check_prime(p)?;
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::invalid(format!("digit {d} out of range for p = {p}")));
        }
        let abs = valuation + digits.len() as i64;
        Ok(normalize(p, valuation, digits.to_vec(), abs, false))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Zero that resulted from complete cancellation of nonzero operands.
    pub fn precision_lost(&self) -> bool {
        matches!(self.repr, Repr::Zero { lost: true, .. })
    }

    /// Exponent of the leading digit; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { valuation, .. } => Some(*valuation),
            Repr::Zero { .. } => None,
        }
    }

    pub fn digits(&self) -> &[u64] {
        match &self.repr {
            Repr::Unit { digits, .. } => digits,
            Repr::Zero { .. } => &[],
        }
    }

    /// Number of significant digits (0 for zero).
    pub fn precision(&self) -> usize {
        self.digits().len()
    }

    /// The value is known modulo `p^abs_precision`; `None` for the exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { valuation, digits } => Some(valuation + digits.len() as i64),
            Repr::Zero { abs_precision, .. } => *abs_precision,
        }
    }

    /// `|x|_p = p^(−valuation)`, and 0 for zero.
    pub fn norm(&self) -> BigRational {
        match self.valuation() {
            Some(v) => p_pow_rational(self.prime, -v),
            None => BigRational::zero(),
        }
    }

    fn check_same_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch { left: self.prime, right: other.prime })
        }
    }

    /// Drops every digit at or above `p^abs`.
    pub fn truncate(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_precision, lost } => {
                let a = abs_precision.map_or(abs, |x| x.min(abs));
                match abs_precision {
                    None if abs == i64::MAX => self.clone(),
                    _ => PAdicNumber::zero_at(self.prime, a, *lost),
                }
            }
            Repr::Unit { valuation, digits } => {
                let keep = abs - valuation;
                if keep <= 0 {
                    PAdicNumber::zero_at(self.prime, abs, false)
                } else if keep as usize >= digits.len() {
                    self.clone()
                } else {
                    PAdicNumber {
                        prime: self.prime,
                        repr: Repr::Unit { valuation: *valuation, digits: digits[..keep as usize].to_vec() },
                    }
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        let p = self.prime;
        let (a, b) = match (&self.repr, &other.repr) {
            (Repr::Zero { abs_precision, .. }, _) => {
                return Ok(match abs_precision {
                    None => other.clone(),
                    Some(a) => other.truncate(*a),
                })
            }
            (_, Repr::Zero { abs_precision, .. }) => {
                return Ok(match abs_precision {
                    None => self.clone(),
                    Some(a) => self.truncate(*a),
                })
            }
            (Repr::Unit { valuation: va, digits: da }, Repr::Unit { valuation: vb, digits: db }) => {
                ((*va, da), (*vb, db))
            }
        };
        let abs = (a.0 + a.1.len() as i64).min(b.0 + b.1.len() as i64);
        let lo = a.0.min(b.0);
        let len = (abs - lo) as usize;
        let mut out = vec![0u64; len];
        let mut carry = 0u64;
        for (i, slot) in out.iter_mut().enumerate() {
            let pos = lo + i as i64;
            let s = digit_at(a, pos) + digit_at(b, pos) + carry;
            *slot = s % p;
            carry = s / p;
        }
        Ok(normalize(p, lo, out, abs, true))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_prime(other)?;
        let p = self.prime;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_precision: za, lost }, Repr::Zero { abs_precision: zb, .. }) => {
                Ok(match (za, zb) {
                    (Some(x), Some(y)) => PAdicNumber::zero_at(p, x + y, *lost),
                    _ => PAdicNumber::zero(p),
                })
            }
            (Repr::Zero { abs_precision, lost }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Zero { abs_precision, lost }) => Ok(match abs_precision {
                None => PAdicNumber::zero(p),
                Some(a) => PAdicNumber::zero_at(p, a + valuation, *lost),
            }),
            (Repr::Unit { valuation: va, digits: da }, Repr::Unit { valuation: vb, digits: db }) => {
                let k = da.len().min(db.len());
                let mut acc = vec![0u128; k];
                for (i, &x) in da.iter().take(k).enumerate() {
                    for (j, &y) in db.iter().take(k - i).enumerate() {
                        acc[i + j] += x as u128 * y as u128;
                    }
                }
                let mut digits = vec![0u64; k];
                let mut carry = 0u128;
                for (i, slot) in digits.iter_mut().enumerate() {
                    let s = acc[i] + carry;
                    *slot = (s % p as u128) as u64;
                    carry = s / p as u128;
                }
                Ok(PAdicNumber { prime: p, repr: Repr::Unit { valuation: va + vb, digits } })
            }
        }
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Unit { valuation, digits } => {
                PAdicNumber { prime: self.prime, repr: Repr::Unit { valuation: valuation + k, digits: digits.clone() } }
            }
            Repr::Zero { abs_precision, lost } => PAdicNumber {
                prime: self.prime,
                repr: Repr::Zero { abs_precision: abs_precision.map(|a| a + k), lost: *lost },
            },
        }
    }

    /// `Σ d_i p^(N+i)` over the represented digits, as an exact rational.
    pub fn truncated_rational(&self) -> BigRational {
        let mut acc = BigRational::zero();
        if let Repr::Unit { valuation, digits } = &self.repr {
            for (i, &d) in digits.iter().enumerate() {
                if d != 0 {
                    acc += p_pow_rational(self.prime, valuation + i as i64) * BigInt::from(d);
                }
            }
        }
        acc
    }

    /// `{x}_p`: the digits at negative powers of `p`, summed.
    pub fn fractional_part(&self) -> BigRational {
        let mut acc = BigRational::zero();
        if let Repr::Unit { valuation, digits } = &self.repr {
            for (i, &d) in digits.iter().enumerate() {
                let e = valuation + i as i64;
                if e >= 0 {
                    break;
                }
                acc += p_pow_rational(self.prime, e) * BigInt::from(d);
            }
        }
        acc
    }

    /// `χ(x) = exp(2πi{x}_p)` as an exact phase.
    pub fn character_phase(&self) -> RationalPhase {
        let f = self.fractional_part();
        let num = f.numer().to_i128().expect("fractional part numerator overflows i128");
        let den = f.denom().to_u128().expect("fractional part denominator overflows u128");
        RationalPhase::new(num, den)
    }

    /// `Σ ξ_m p^m ↦ Σ ξ_m p^(−m−1)` on the represented digits.
    pub fn monna(&self) -> BigRational {
        let mut acc = BigRational::zero();
        if let Repr::Unit { valuation, digits } = &self.repr {
            for (i, &d) in digits.iter().enumerate() {
                if d != 0 {
                    acc += p_pow_rational(self.prime, -(valuation + i as i64) - 1) * BigInt::from(d);
                }
            }
        }
        acc
    }

    /// Digit at `p^pos` (0 outside the represented range).
    pub fn digit_at(&self, pos: i64) -> u64 {
        match &self.repr {
            Repr::Unit { valuation, digits } => digit_at((*valuation, digits), pos),
            Repr::Zero { .. } => 0,
        }
    }

    pub fn to_record(&self) -> PAdicRecord {
        match &self.repr {
            Repr::Unit { valuation, digits } => PAdicRecord {
                prime: self.prime,
                valuation: Some(*valuation),
                digits: digits.clone(),
                precision: Some(digits.len() as i64),
            },
            Repr::Zero { abs_precision, .. } => {
                PAdicRecord { prime: self.prime, valuation: None, digits: vec![], precision: *abs_precision }
            }
        }
    }

    pub fn from_record(r: &PAdicRecord) -> Result<Self> {
        check_prime(r.prime)?;
        match r.valuation {
            None => {
                if !r.digits.is_empty() {
                    return Err(Error::invalid("zero must carry no digits"));
                }
                Ok(match r.precision {
                    None => PAdicNumber::zero(r.prime),
                    Some(a) => PAdicNumber::zero_at(r.prime, a, false),
                })
            }
            Some(v) => {
                if r.digits.first().is_none_or(|&d| d == 0) {
                    return Err(Error::invalid("leading digit must be nonzero"));
                }
                if r.precision.is_some_and(|k| k != r.digits.len() as i64) {
                    return Err(Error::invalid("precision must equal the number of digits"));
                }
                PAdicNumber::from_digits(r.prime, v, &r.digits)
            }
        }
    }
}

impl std::ops::Neg for PAdicNumber {
    type Output = PAdicNumber;
    fn neg(self) -> PAdicNumber {
        PAdicNumber::neg(&self)
    }
}

impl PAdicNumber {
    /// Additive inverse by p-adic complement.
    pub fn neg(&self) -> PAdicNumber {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { valuation, digits } => {
                let p = self.prime;
                let digits = digits
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| if i == 0 { p - d } else { p - 1 - d })
                    .collect();
                PAdicNumber { prime: p, repr: Repr::Unit { valuation: *valuation, digits } }
            }
        }
    }
}

fn digit_at((valuation, digits): (i64, &Vec<u64>), pos: i64) -> u64 {
    let i = pos - valuation;
    if i < 0 || i as usize >= digits.len() {
        0
    } else {
        digits[i as usize]
    }
}

fn normalize(p: u64, lo: i64, digits: Vec<u64>, abs: i64, lost: bool) -> PAdicNumber {
    match digits.iter().position(|&d| d != 0) {
        None => PAdicNumber::zero_at(p, abs, lost),
        Some(i) => PAdicNumber {
            prime: p,
            repr: Repr::Unit { valuation: lo + i as i64, digits: digits[i..].to_vec() },
        },
    }
}

pub(crate) fn base_p_digits(value: &BigInt, p: u64, count: usize) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v = value.clone();
    (0..count)
        .map(|_| {
            let (q, r) = v.div_mod_floor(&pb);
            v = q;
            r.to_u64().unwrap()
        })
        .collect()
}

/// JSON form `{prime, valuation, digits, precision}`. Zero has a null
/// valuation, no digits, and its absolute precision (null when exact).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicRecord {
    pub prime: u64,
    pub valuation: Option<i64>,
    pub digits: Vec<u64>,
    pub precision: Option<i64>,
}

fn power_term(p: u64, e: i64) -> String {
    match e {
        0 => "1".to_string(),
        1 => format!("{p}"),
        _ => format!("{p}^{e}"),
    }
}

impl fmt::Display for PAdicNumber {
    /// `p^N * (d0 + d1*p + d2*p^2 + …) ~ O(p^{N+K})`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        match &self.repr {
            Repr::Zero { abs_precision: None, .. } => write!(f, "0"),
            Repr::Zero { abs_precision: Some(a), .. } => write!(f, "0 ~ O({p}^{a})"),
            Repr::Unit { valuation, digits } => {
                write!(f, "{p}^{valuation} * (")?;
                for (i, d) in digits.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    match i {
                        0 => write!(f, "{d}")?,
                        _ => write!(f, "{d}*{}", power_term(p, i as i64))?,
                    }
                }
                write!(f, ") ~ O({p}^{})", valuation + digits.len() as i64)
            }
        }
    }
}

fn parse_err(s: &str) -> Error {
    Error::Parse(format!("not a p-adic number: {s:?}"))
}

fn parse_big_o(s: &str) -> Option<(u64, i64)> {
    let inner = s.trim().strip_prefix("O(")?.strip_suffix(')')?;
    let (p, e) = inner.split_once('^')?;
    Some((p.trim().parse().ok()?, e.trim().parse().ok()?))
}

impl FromStr for PAdicNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, tail) = match s.split_once('~') {
            Some((b, t)) => (b.trim(), Some(t.trim())),
            None => (s.trim(), None),
        };
        let big_o = match tail {
            Some(t) => Some(parse_big_o(t).ok_or_else(|| parse_err(s))?),
            None => None,
        };
        if body == "0" {
            return match big_o {
                None => Err(Error::Parse("exact zero needs a prime: write `0 ~ O(p^a)`".into())),
                Some((p, a)) => {
                    check_prime(p)?;
                    Ok(PAdicNumber::zero_at(p, a, false))
                }
            };
        }
        let (head, rest) = body.split_once('*').ok_or_else(|| parse_err(s))?;
        let (p, n) = head.trim().split_once('^').ok_or_else(|| parse_err(s))?;
        let p: u64 = p.trim().parse().map_err(|_| parse_err(s))?;
        let n: i64 = n.trim().parse().map_err(|_| parse_err(s))?;
        let inner = rest.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| parse_err(s))?;
        let mut digits = Vec::new();
        for (i, term) in inner.split('+').enumerate() {
            let term = term.trim();
            let (d, pw) = match term.split_once('*') {
                Some((d, pw)) => (d.trim(), Some(pw.trim())),
                None => (term, None),
            };
            let expected = power_term(p, i as i64);
            match pw {
                None if i == 0 => {}
                Some(pw) if pw == expected => {}
                _ => return Err(parse_err(s)),
            }
            digits.push(d.parse::<u64>().map_err(|_| parse_err(s))?);
        }
        if let Some((q, a)) = big_o {
            if q != p || a != n + digits.len() as i64 {
                return Err(Error::Parse(format!("inconsistent precision term in {s:?}")));
            }
        }
        if digits.first() == Some(&0) {
            return Err(Error::Parse("leading digit must be nonzero".into()));
        }
        PAdicNumber::from_digits(p, n, &digits)
    }
}

/// The affine map `ξ ↦ aξ + b`, `a ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineElement {
    a: PAdicNumber,
    b: PAdicNumber,
}

impl AffineElement {
    pub fn new(a: PAdicNumber, b: PAdicNumber) -> Result<Self> {
        if a.prime() != b.prime() {
            return Err(Error::PrimeMismatch { left: a.prime(), right: b.prime() });
        }
        if a.is_zero() {
            return Err(Error::invalid("affine scale must be nonzero"));
        }
        Ok(AffineElement { a, b })
    }

    pub fn identity(p: u64, precision: usize) -> Result<Self> {
        AffineElement::new(PAdicNumber::from_integer(1, p, precision)?, PAdicNumber::zero(p))
    }

    pub fn a(&self) -> &PAdicNumber {
        &self.a
    }

    pub fn b(&self) -> &PAdicNumber {
        &self.b
    }

    /// `g(a₁,b₁)·g(a₂,b₂) = g(a₁a₂, b₁ + a₁b₂)`.
    pub fn compose(&self, other: &AffineElement) -> Result<AffineElement> {
        let a = self.a.try_mul(&other.a)?;
        let b = self.b.try_add(&self.a.try_mul(&other.b)?)?;
        AffineElement::new(a, b)
    }

    pub fn apply(&self, x: &PAdicNumber) -> Result<PAdicNumber> {
        self.a.try_mul(x)?.try_add(&self.b)
    }
}

impl PartialOrd for PAdicNumber {
    /// Orders by norm only; values of equal norm are incomparable unless equal.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            return Some(Ordering::Equal);
        }
        match self.norm().cmp(&other.norm()) {
            Ordering::Equal => None,
            o => Some(o),
        }
    }
}

/// `n` as a rational when it is one, for building values from CLI strings like `3/4`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let a: BigInt = a.parse().map_err(|_| bad())?;
    let b: BigInt = b.parse().map_err(|_| bad())?;
    if b.is_zero() {
        return Err(Error::invalid("zero denominator"));
    }
    Ok(BigRational::new(a, b))
}

/// The expansion of a rational with enough digits to be exact when its
/// denominator is a power of `p` and it is non-negative.
pub fn padic_from_big_rational(q: &BigRational, p: u64, precision: usize) -> Result<PAdicNumber> {
    PAdicNumber::from_rational(q.numer().clone(), q.denom().clone(), p, precision)
}
