//! Exact arithmetic in `Q(ζ_{p^∞}, √p)`.
//!
//! Values are kept as sparse sums `Σ c · (√p)^s · e(φ)` with rational `c`,
//! `s ∈ {0, 1}` and `φ ∈ Q/Z` of p-power denominator. Sums are not reduced
//! eagerly; [`Cyclotomic::canonical`] maps a value to its unique normal form
//! (power basis modulo the cyclotomic polynomial), which is what equality and
//! zero tests use.
//!
//! `√p` lies in `Q(ζ_8)` for `p = 2` and in `Q(ζ_p)` for `p ≡ 1 (mod 4)`;
//! for those primes the canonical form rewrites it through a Gauss sum. For
//! `p ≡ 3 (mod 4)` it is independent of every `ζ_{p^k}` and the surd part is
//! normalized separately.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::phase::RationalPhase;

type Key = (bool, RationalPhase);

#[derive(Clone, Default)]
pub struct Cyclotomic {
    /// 0 while the value is a plain rational.
    prime: u64,
    terms: BTreeMap<Key, BigRational>,
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

fn p_log(den: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut d = den;
    while d > 1 {
        assert!(d % p == 0, "phase denominator {den} is not a power of {p}");
        d /= p;
        k += 1;
    }
    k
}

fn legendre(a: u64, p: u64) -> i64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

fn merge_prime(a: u64, b: u64) -> u64 {
    match (a, b) {
        (0, q) | (q, 0) => q,
        (x, y) if x == y => x,
        (x, y) => panic!("cyclotomic values over different primes combined: {x} and {y}"),
    }
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic::default()
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut out = Cyclotomic::zero();
        out.push(false, RationalPhase::ZERO, q);
        out
    }

    pub fn from_integer(v: i64) -> Self {
        Cyclotomic::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `e(φ) = exp(2πiφ)`; the prime is read off the denominator.
    pub fn root_of_unity(phase: RationalPhase) -> Self {
        let mut out = Cyclotomic::zero();
        if phase.den() > 1 {
            out.prime = smallest_prime_factor(phase.den());
            p_log(phase.den(), out.prime);
        }
        out.push(false, phase, BigRational::one());
        out
    }

    /// `p^(e/2)`.
    pub fn sqrt_p_power(p: u64, e: i64) -> Self {
        let half = e.div_euclid(2);
        let surd = e.rem_euclid(2) == 1;
        let base = BigRational::from_integer(BigInt::from(p));
        let coef = if half >= 0 {
            num_traits::pow(base, half as usize)
        } else {
            num_traits::pow(base.recip(), (-half) as usize)
        };
        let mut out = Cyclotomic { prime: p, terms: BTreeMap::new() };
        out.push(surd, RationalPhase::ZERO, coef);
        out
    }

    /// `coef · (√p)^surd · e(phase)`.
    pub fn monomial(p: u64, coef: BigRational, surd: bool, phase: RationalPhase) -> Self {
        let mut out = Cyclotomic { prime: p, terms: BTreeMap::new() };
        out.push(surd, phase, coef);
        out
    }

    pub fn prime(&self) -> Option<u64> {
        (self.prime != 0).then_some(self.prime)
    }

    /// Raw (unreduced) terms: `(coef, surd, phase)`.
    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, bool, RationalPhase)> {
        self.terms.iter().map(|((s, ph), c)| (c, *s, *ph))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn push(&mut self, surd: bool, phase: RationalPhase, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((surd, phase)) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn conj(&self) -> Self {
        Cyclotomic {
            prime: self.prime,
            terms: self.terms.iter().map(|((s, ph), c)| ((*s, -*ph), c.clone())).collect(),
        }
    }

    /// Multiplies by `e(φ)` by shifting every phase.
    pub fn mul_phase(&self, phase: RationalPhase) -> Self {
        if phase.is_zero() {
            return self.clone();
        }
        let mut out = Cyclotomic {
            prime: merge_prime(self.prime, Cyclotomic::root_of_unity(phase).prime),
            terms: BTreeMap::new(),
        };
        for ((s, ph), c) in &self.terms {
            out.push(*s, *ph + phase, c.clone());
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Cyclotomic::zero();
        }
        Cyclotomic {
            prime: self.prime,
            terms: self.terms.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }

    /// The unique normal form: surds folded into the cyclotomic field where
    /// possible, then every phase class reduced to the power basis
    /// `{ζ^r : top base-p digit of r ≠ p−1}` at the largest level present.
    pub fn canonical(&self) -> Self {
        let p = self.prime;
        if p == 0 {
            return self.clone();
        }
        // fold √p into Q(ζ) when it lives there
        let mut plain: Vec<(bool, RationalPhase, BigRational)> = Vec::new();
        for ((s, ph), c) in &self.terms {
            if *s && (p == 2 || p % 4 == 1) {
                if p == 2 {
                    plain.push((false, *ph + RationalPhase::new(1, 8), c.clone()));
                    plain.push((false, *ph + RationalPhase::new(7, 8), c.clone()));
                } else {
                    for a in 1..p {
                        let ph_a = *ph + RationalPhase::new(a as i128, p as u128);
                        let c_a = if legendre(a, p) == 1 { c.clone() } else { -c.clone() };
                        plain.push((false, ph_a, c_a));
                    }
                }
            } else {
                plain.push((*s, *ph, c.clone()));
            }
        }
        let level = plain.iter().map(|(_, ph, _)| p_log(ph.den(), p)).max().unwrap_or(0);
        let n = p.pow(level);
        let top = if level > 0 { p.pow(level - 1) } else { 1 };
        let mut acc: HashMap<(bool, u64), BigRational> = HashMap::new();
        for (s, ph, c) in plain {
            let r = ph.num() * (n / ph.den());
            if level > 0 && r / top == p - 1 {
                let low = r - (p - 1) * top;
                for t in 0..(p - 1) {
                    *acc.entry((s, low + t * top)).or_insert_with(BigRational::zero) -= &c;
                }
            } else {
                *acc.entry((s, r)).or_insert_with(BigRational::zero) += &c;
            }
        }
        let mut out = Cyclotomic { prime: p, terms: BTreeMap::new() };
        for ((s, r), c) in acc {
            if !c.is_zero() {
                out.push(s, RationalPhase::new(r as i128, n as u128), c);
            }
        }
        out
    }

    /// Same value with `e(φ + 1/2)` written as `−e(φ)`; merges terms that
    /// differ only by sign without unfolding `√p`. Only `p = 2` has such
    /// pairs.
    pub fn fold_signs(&self) -> Self {
        if self.prime != 2 {
            return self.clone();
        }
        let half = RationalPhase::new(1, 2);
        let mut out = Cyclotomic { prime: self.prime, terms: BTreeMap::new() };
        for ((s, ph), c) in &self.terms {
            if 2 * ph.num() as i128 >= ph.den() as i128 {
                out.push(*s, *ph + half, -c.clone());
            } else {
                out.push(*s, *ph, c.clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        // a single stored term has a nonzero coefficient
        match self.terms.len() {
            0 => true,
            1 => false,
            _ => self.canonical().terms.is_empty(),
        }
    }

    /// `Some(q)` when the value is the rational `q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        let c = self.canonical();
        match c.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let ((s, ph), q) = c.terms.iter().next().unwrap();
                (!*s && ph.is_zero()).then(|| q.clone())
            }
            _ => None,
        }
    }

    /// Single-term values as `(magnitude, surd, phase)` with a positive
    /// magnitude; a negative coefficient is absorbed as a half turn.
    pub fn as_monomial(&self) -> Option<(BigRational, bool, RationalPhase)> {
        if self.terms.is_empty() {
            return Some((BigRational::zero(), false, RationalPhase::ZERO));
        }
        if self.terms.len() != 1 {
            return None;
        }
        let ((s, ph), c) = self.terms.iter().next().unwrap();
        if c.is_negative() {
            Some((-c.clone(), *s, *ph + RationalPhase::new(1, 2)))
        } else {
            Some((c.clone(), *s, *ph))
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let sq = (self.prime as f64).sqrt();
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, ((s, ph), c)| {
            let mag = c.to_f64().unwrap_or(f64::NAN) * if *s { sq } else { 1.0 };
            let (cs, sn) = ph.cos_sin();
            acc + Complex64::new(mag * cs, mag * sn)
        })
    }

    /// `|z|²` when it is rational (always the case for monomials).
    pub fn norm_sqr_rational(&self) -> Option<BigRational> {
        (self * &self.conj()).as_rational()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let half = RationalPhase::new(1, 2);
        for (i, ((s, ph), c)) in self.terms.iter().enumerate() {
            // e(1/2) = −1 goes into the sign
            let (c, ph) = if *ph == half { (-c.clone(), RationalPhase::ZERO) } else { (c.clone(), *ph) };
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = c.abs();
            let bare = !*s && ph.is_zero();
            let mut sep = "";
            if bare || !c.is_one() {
                write!(f, "{c}")?;
                sep = "*";
            }
            if *s {
                write!(f, "{sep}sqrt({})", self.prime)?;
                sep = "*";
            }
            if !ph.is_zero() {
                write!(f, "{sep}e({ph})")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let mut out = self.clone();
        out.prime = merge_prime(self.prime, rhs.prime);
        for ((s, ph), c) in &rhs.terms {
            out.push(*s, *ph, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let mut out = self.clone();
        out.prime = merge_prime(self.prime, rhs.prime);
        for ((s, ph), c) in &rhs.terms {
            out.push(*s, *ph, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let p = merge_prime(self.prime, rhs.prime);
        let mut out = Cyclotomic { prime: p, terms: BTreeMap::new() };
        for ((s1, ph1), c1) in &self.terms {
            for ((s2, ph2), c2) in &rhs.terms {
                let mut c = c1 * c2;
                if *s1 && *s2 {
                    c *= BigRational::from_integer(BigInt::from(p));
                }
                out.push(*s1 ^ *s2, *ph1 + *ph2, c);
            }
        }
        out
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        &self + &rhs
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        &self - &rhs
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        &self * &rhs
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            prime: self.prime,
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::default()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::from_integer(1)
    }
}
