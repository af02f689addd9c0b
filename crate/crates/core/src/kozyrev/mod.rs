//! Kozyrev wavelets
//!
//! `ψ_{n,m,j}(ξ) = p^(−n/2) χ(j p^(n−1) ξ) Ω(|p^n ξ − m|_p ≤ 1)`
//!
//! with `n ∈ Z`, `m ∈ Q_p/Z_p` stored by its fractional digits and
//! `j ∈ [1, p−1]`. The support is the ball `p^(−n)(m + Z_p)`, which splits
//! into `p` cells of radius `p^(n−1)`; the wavelet is a constant times a
//! distinct `p`-th root of unity on each.

pub mod displays;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::function_space::{cell_count, LocallyConstantFn};
use crate::padic::{check_prime, PAdicNumber};
use crate::phase::RationalPhase;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KozyrevIndex {
    pub n: i64,
    /// `(m_1, …, m_k)` for `m = Σ m_i p^(−i)`; no trailing zeros.
    pub m_digits: Vec<u64>,
    pub j: u64,
}

impl KozyrevIndex {
    /// Trailing zero digits of `m` are stripped.
    pub fn new(n: i64, m_digits: &[u64], j: u64) -> Self {
        let mut m_digits = m_digits.to_vec();
        while m_digits.last() == Some(&0) {
            m_digits.pop();
        }
        KozyrevIndex { n, m_digits, j }
    }

    pub fn mother() -> Self {
        KozyrevIndex::new(0, &[], 1)
    }

    pub fn validate(&self, p: u64) -> Result<()> {
        check_prime(p)?;
        if self.j == 0 || self.j >= p {
            return Err(Error::invalid(format!("j = {} outside [1, {}]", self.j, p - 1)));
        }
        if let Some(d) = self.m_digits.iter().find(|&&d| d >= p) {
            return Err(Error::invalid(format!("digit {d} of m out of range for p = {p}")));
        }
        if self.m_digits.last() == Some(&0) {
            return Err(Error::invalid("m has trailing zero digits"));
        }
        Ok(())
    }

    /// `k` with `m ∈ p^(−k) Z_p` minimal.
    pub fn depth(&self) -> i64 {
        self.m_digits.len() as i64
    }

    /// `p^k · m = Σ m_i p^(k−i)`, an integer in `[0, p^k)`.
    pub fn m_int(&self, p: u64) -> u64 {
        self.m_digits.iter().fold(0, |acc, &d| acc * p + d)
    }

    /// `m` as an exact p-adic number (zero when `m = 0`).
    pub fn m_padic(&self, p: u64) -> PAdicNumber {
        let digits: Vec<u64> = self.m_digits.iter().rev().copied().collect();
        if digits.is_empty() {
            return PAdicNumber::zero(p);
        }
        PAdicNumber::from_digits(p, -self.depth(), &digits).expect("validated digits")
    }

    /// Fractional digits of `x`, i.e. the class of `x` in `Q_p/Z_p`.
    pub fn m_digits_of(x: &PAdicNumber) -> Vec<u64> {
        match x.valuation() {
            Some(v) if v < 0 => {
                let mut d: Vec<u64> = (1..=-v).map(|i| x.digit_at(-i)).collect();
                while d.last() == Some(&0) {
                    d.pop();
                }
                d
            }
            _ => vec![],
        }
    }

    pub fn with_n(&self, n: i64) -> Self {
        KozyrevIndex { n, m_digits: self.m_digits.clone(), j: self.j }
    }

    /// Tight frame of the support ball: `(n + k, 1 − n)`.
    pub fn frame(&self) -> (i64, i64) {
        (self.n + self.depth(), 1 - self.n)
    }

    /// The `p` support cells in [`frame`](Self::frame) and their phases.
    /// Cell `m_int + t p^k` carries `e(j (m_int + t p^k) / p^(k+1))`.
    pub fn support_cells(&self, p: u64) -> Vec<(u64, RationalPhase)> {
        let k = self.depth() as u32;
        let base = self.m_int(p);
        let pk = p.pow(k);
        (0..p)
            .map(|t| {
                let i = base + t * pk;
                (i, RationalPhase::new(self.j as i128 * i as i128, (pk * p) as u128))
            })
            .collect()
    }

    /// `ψ_{n,m,j}(ξ − b) = phase · ψ_{n, m + p^n b, j}(ξ)` with
    /// `phase = χ(−j p^(n−1) b)`. Needs `b` modulo `p^(1−n)`.
    pub fn translated(&self, p: u64, b: &PAdicNumber) -> Result<(RationalPhase, KozyrevIndex)> {
        if b.is_zero() {
            return Ok((RationalPhase::ZERO, self.clone()));
        }
        if let Some(a) = b.abs_precision() {
            if a < 1 - self.n {
                return Err(Error::InsufficientPrecision { needed: 1 - self.n, available: a });
            }
        }
        let jb = b.try_mul(&PAdicNumber::from_integer(self.j as i64, p, b.precision().max(1))?)?;
        let phase = -jb.shift(self.n - 1).character_phase();
        let m_new = self.m_padic(p).try_add(&b.shift(self.n).truncate(0))?;
        Ok((phase, KozyrevIndex { n: self.n, m_digits: KozyrevIndex::m_digits_of(&m_new), j: self.j }))
    }
}

impl fmt::Display for KozyrevIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m=[", self.n)?;
        for (i, d) in self.m_digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "], j={})", self.j)
    }
}

/// `ψ_{n,m,j}(ξ)` straight from the defining formula.
pub fn evaluate<S: Scalar>(p: u64, idx: &KozyrevIndex, xi: &PAdicNumber) -> Result<S> {
    idx.validate(p)?;
    if xi.prime() != p {
        return Err(Error::PrimeMismatch { left: p, right: xi.prime() });
    }
    let n = idx.n;
    if let Some(v) = xi.valuation() {
        // |p^n ξ| > max(1, |m|) puts ξ outside the support at any precision
        if v < -n - idx.depth() {
            return Ok(S::zero());
        }
    }
    if let Some(a) = xi.abs_precision() {
        if a < 1 - n {
            return Err(Error::InsufficientPrecision { needed: 1 - n, available: a });
        }
    }
    let offset = xi.shift(n).try_sub(&idx.m_padic(p))?;
    if offset.valuation().is_some_and(|v| v < 0) {
        return Ok(S::zero());
    }
    let j = PAdicNumber::from_integer(idx.j as i64, p, xi.precision().max(1))?;
    let phase = xi.try_mul(&j)?.shift(n - 1).character_phase();
    Ok(S::sqrt_p_power(p, -n).mul_phase(phase))
}

/// The wavelet as a table function in its tight frame, refined `extra_depth` times.
pub fn materialize<S: Scalar>(p: u64, idx: &KozyrevIndex, extra_depth: u32) -> Result<LocallyConstantFn<S>> {
    idx.validate(p)?;
    let (m, k) = idx.frame();
    let amp = S::sqrt_p_power(p, -idx.n);
    let f = LocallyConstantFn::from_table(
        p,
        m,
        k,
        idx.support_cells(p).into_iter().map(|(i, ph)| (i, amp.mul_phase(ph))),
    )?;
    if extra_depth == 0 {
        Ok(f)
    } else {
        f.reframe(m, k + extra_depth as i64)
    }
}

/// Scale range `[n_min, n_max]` and maximal depth of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub n_min: i64,
    pub n_max: i64,
    pub max_depth: u32,
}

impl Window {
    pub fn new(n_min: i64, n_max: i64, max_depth: u32) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::invalid(format!("empty window [{n_min}, {n_max}]")));
        }
        Ok(Window { n_min, n_max, max_depth })
    }

    pub fn contains(&self, idx: &KozyrevIndex) -> bool {
        (self.n_min..=self.n_max).contains(&idx.n) && idx.depth() <= self.max_depth as i64
    }

    /// Every index in the window, in key order, for all `j`.
    pub fn indices(&self, p: u64) -> Result<Vec<KozyrevIndex>> {
        // p^D classes of m with depth ≤ D
        let per_n = cell_count(p, self.max_depth as i64, 0)?;
        let total = per_n as u128 * (self.n_max - self.n_min + 1) as u128 * (p - 1) as u128;
        let cap = crate::function_space::cell_cap();
        if total > cap as u128 {
            return Err(Error::CapExceeded { requested: total, cap });
        }
        let mut ms: Vec<Vec<u64>> = vec![vec![]];
        for d in 1..=self.max_depth {
            let count = p.pow(d);
            for v in 0..count {
                // digits m_1..m_d, m_d ≠ 0
                let digits: Vec<u64> = (0..d).map(|i| v / p.pow(d - 1 - i) % p).collect();
                if digits[d as usize - 1] != 0 {
                    ms.push(digits);
                }
            }
        }
        let mut out = Vec::new();
        for n in self.n_min..=self.n_max {
            for m in &ms {
                for j in 1..p {
                    out.push(KozyrevIndex { n, m_digits: m.clone(), j });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// The window shrunk by `d` scales on each side.
    pub fn interior(&self, d: i64) -> Option<Window> {
        let (lo, hi) = (self.n_min + d, self.n_max - d);
        (lo <= hi).then_some(Window { n_min: lo, n_max: hi, max_depth: self.max_depth })
    }

    /// The smallest window whose wavelets, with the ball indicator, span the
    /// functions of frame `(M, K)`: `n ∈ [1−K, M]`, depth ≤ `M − n`.
    pub fn resolving(m: i64, k: i64) -> Result<Window> {
        Window::new(1 - k, m, (m + k - 1).max(0) as u32)
    }
}

/// Sparse coefficients over wavelet labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletExpansion<S> {
    prime: u64,
    window: Window,
    coefficients: BTreeMap<KozyrevIndex, S>,
}

impl<S: Scalar> WaveletExpansion<S> {
    pub fn new(p: u64, window: Window) -> Result<Self> {
        check_prime(p)?;
        Ok(WaveletExpansion { prime: p, window, coefficients: BTreeMap::new() })
    }

    pub fn unit(p: u64, window: Window, idx: KozyrevIndex) -> Result<Self> {
        let mut e = Self::new(p, window)?;
        e.insert(idx, S::one())?;
        Ok(e)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coefficient(&self, idx: &KozyrevIndex) -> S {
        self.coefficients.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&KozyrevIndex, &S)> {
        self.coefficients.iter()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    fn clip_error(&self, idx: &KozyrevIndex) -> Error {
        Error::WindowClip { index: idx.to_string(), n_min: self.window.n_min, n_max: self.window.n_max }
    }

    /// Adds `c` at `idx`; fails with a clip error outside the window.
    pub fn insert(&mut self, idx: KozyrevIndex, c: S) -> Result<()> {
        idx.validate(self.prime)?;
        if !self.window.contains(&idx) {
            return Err(self.clip_error(&idx));
        }
        if c.is_zero() {
            return Ok(());
        }
        let v = match self.coefficients.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.coefficients.insert(idx, v);
        }
        Ok(())
    }

    pub fn with_window(&self, window: Window) -> Result<Self> {
        let mut out = Self::new(self.prime, window)?;
        for (k, v) in &self.coefficients {
            out.insert(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch { left: self.prime, right: other.prime });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coefficients {
            out.insert(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coefficients(|_, v| c.clone() * v.clone())
    }

    /// Applies `f(index, coefficient)` to each coefficient, keeping labels.
    pub fn map_coefficients(&self, f: impl Fn(&KozyrevIndex, &S) -> S) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .map(|(k, v)| (k.clone(), f(k, v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        WaveletExpansion { prime: self.prime, window: self.window, coefficients }
    }

    /// Moves every coefficient to `f(index)` (plus a phase), failing on the
    /// first label that leaves the window.
    pub fn relabel(&self, f: impl Fn(&KozyrevIndex) -> Result<(RationalPhase, KozyrevIndex)>) -> Result<Self> {
        let mut out = Self::new(self.prime, self.window)?;
        for (k, v) in &self.coefficients {
            let (ph, k2) = f(k)?;
            out.insert(k2, v.mul_phase(ph))?;
        }
        Ok(out)
    }

    /// `Σ |c|²`.
    pub fn norm_sqr(&self) -> S {
        self.coefficients.values().fold(S::zero(), |acc, v| acc + v.conj() * v.clone())
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coefficients.values().map(|v| v.to_complex().norm()).fold(0.0, f64::max)
    }

    /// First coefficient that is not negligible at `tol`.
    pub fn first_violation(&self, tol: f64) -> Option<(&KozyrevIndex, &S)> {
        self.coefficients.iter().find(|(_, v)| !v.negligible(tol))
    }

    pub fn vanishes(&self, tol: f64) -> bool {
        self.first_violation(tol).is_none()
    }

    /// Coefficient-wise equality (exact, or within `tol` in floating mode).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.try_sub(other)?.vanishes(tol))
    }
}

/// `c_idx = ⟨ψ_idx, f⟩` for every index of the window; indices outside are
/// not computed.
pub fn analyze<S: Scalar>(f: &LocallyConstantFn<S>, window: Window) -> Result<WaveletExpansion<S>> {
    let p = f.prime();
    let mut out = WaveletExpansion::new(p, window)?;
    for idx in window.indices(p)? {
        // wavelets whose ball misses the frame of f contribute nothing
        let (m, _) = idx.frame();
        if idx.depth() > 0 && m > f.support_exponent() {
            continue;
        }
        let psi = materialize::<S>(p, &idx, 0)?;
        let c = psi.inner_product(f)?;
        out.insert(idx, c)?;
    }
    Ok(out)
}

/// `Σ c_idx ψ_idx` at resolution `k`, on the smallest ball holding every term.
pub fn synthesize<S: Scalar>(e: &WaveletExpansion<S>, k: i64) -> Result<LocallyConstantFn<S>> {
    let p = e.prime();
    let finest = e.iter().map(|(idx, _)| 1 - idx.n).max().unwrap_or(k);
    if finest > k {
        return Err(Error::invalid(format!("resolution {k} is coarser than the finest term ({finest})")));
    }
    let m = e.iter().map(|(idx, _)| idx.frame().0).max().unwrap_or(-k).max(-k);
    let mut acc = LocallyConstantFn::<S>::zero(p, m, k)?;
    for (idx, c) in e.iter() {
        let psi = materialize::<S>(p, idx, 0)?.scale(c);
        acc = acc.try_add(&psi)?;
    }
    acc.reframe(m, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use num_complex::Complex64;

    type C = Cyclotomic;

    #[test]
    fn index_normalization_and_validation() {
        let i = KozyrevIndex::new(0, &[1, 0, 0], 1);
        assert_eq!(i.m_digits, vec![1]);
        assert!(i.validate(2).is_ok());
        assert!(KozyrevIndex::new(0, &[], 0).validate(3).is_err());
        assert!(KozyrevIndex::new(0, &[], 3).validate(3).is_err());
        assert!(KozyrevIndex::new(0, &[3], 1).validate(3).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let p = 3;
        let mother = KozyrevIndex::mother();
        assert_eq!(evaluate::<C>(p, &mother, &PAdicNumber::zero(p)).unwrap(), C::from_integer(1));
        let unit = PAdicNumber::from_integer(1, p, 3).unwrap();
        assert_eq!(
            evaluate::<C>(p, &mother, &unit).unwrap(),
            C::root_of_unity(RationalPhase::new(1, 3))
        );
        let far = PAdicNumber::from_rational(1, 27, p, 3).unwrap();
        assert!(evaluate::<C>(p, &KozyrevIndex::new(2, &[], 1), &far).unwrap().is_zero());
        // ξ known only modulo p^0: the character of p^(−1)ξ is undecidable
        assert!(matches!(
            evaluate::<C>(p, &mother, &unit.truncate(0)),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn materialize_agrees_with_evaluate() {
        for p in [2u64, 3] {
            for idx in Window::new(-1, 1, 2).unwrap().indices(p).unwrap() {
                let f = materialize::<C>(p, &idx, 1).unwrap();
                for cell in crate::function_space::enumerate_cells(p, f.support_exponent(), f.resolution_exponent())
                    .unwrap()
                {
                    let xi = cell.representative();
                    assert_eq!(f.value(cell.index), evaluate::<C>(p, &idx, &xi).unwrap(), "{idx} {cell:?}");
                }
            }
        }
    }

    #[test]
    fn mother_support_has_unit_measure() {
        let f = materialize::<C>(2, &KozyrevIndex::mother(), 0).unwrap();
        assert_eq!(f.support_measure(0.0), num_rational::BigRational::from_integer(1.into()));
        assert!(f.integrate().is_zero());
    }

    #[test]
    fn window_enumeration_counts() {
        // p = 3, depth ≤ 1: m ∈ {0, 1/3, 2/3}, j ∈ {1, 2}
        let w = Window::new(0, 1, 1).unwrap();
        assert_eq!(w.indices(3).unwrap().len(), 2 * 3 * 2);
        assert_eq!(w.interior(1), None);
        assert_eq!(Window::new(-2, 2, 0).unwrap().interior(1).unwrap().n_max, 1);
    }

    #[test]
    fn translation_label_map() {
        let p = 3;
        let idx = KozyrevIndex::new(1, &[2], 1);
        let b = PAdicNumber::from_rational(1, 9, p, 4).unwrap();
        let (ph, moved) = idx.translated(p, &b).unwrap();
        let lhs = materialize::<C>(p, &idx, 0).unwrap().translate(&b).unwrap();
        let rhs = materialize::<C>(p, &moved, 0).unwrap().map(|v| v.mul_phase(ph));
        assert!(lhs.pointwise_eq(&rhs, 0.0).unwrap());
    }

    #[test]
    fn analysis_round_trip_float() {
        let p = 2;
        let w = Window::new(-1, 1, 1).unwrap();
        let idx = KozyrevIndex::new(0, &[1], 1);
        let f = materialize::<Complex64>(p, &idx, 0).unwrap();
        let e = analyze(&f, w).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.coefficient(&idx) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let g = synthesize(&e, f.resolution_exponent()).unwrap();
        assert!(g.pointwise_eq(&f, 1e-12).unwrap());
    }
}
