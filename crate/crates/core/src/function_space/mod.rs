//! Locally constant functions with compact support, stored as value tables
//! over coset cells.
//!
//! A function in frame `(M, K)` vanishes outside the ball `|ξ|_p ≤ p^M` and
//! is constant on cosets of `p^K Z_p`. The ball splits into `p^(M+K)` cells;
//! cell `i` is `i·p^(−M) + p^K Z_p`, so the base-p digits of `i` are the
//! digits of the representative at `p^(−M) … p^(K−1)`.

mod fourier;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{check_prime, p_pow_rational, PAdicNumber};
use crate::scalar::Scalar;

pub use fourier::dft_p_power;

static CELL_CAP: AtomicU64 = AtomicU64::new(1_000_000);

pub const DEFAULT_CELL_CAP: u64 = 1_000_000;

/// Upper bound on the number of cells any single enumeration may touch.
pub fn cell_cap() -> u64 {
    CELL_CAP.load(Ordering::Relaxed)
}

pub fn set_cell_cap(cap: u64) {
    CELL_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// `p^(M+K)` if it is within the cap.
pub fn cell_count(p: u64, support_exponent: i64, resolution_exponent: i64) -> Result<u64> {
    let depth = support_exponent + resolution_exponent;
    if depth < 0 {
        return Err(Error::invalid(format!(
            "empty frame: support exponent {support_exponent} + resolution exponent {resolution_exponent} < 0"
        )));
    }
    let cap = cell_cap();
    let mut n: u128 = 1;
    for _ in 0..depth {
        n *= p as u128;
        if n > cap as u128 {
            let requested = (p as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
            return Err(Error::CapExceeded { requested, cap });
        }
    }
    Ok(n as u64)
}

fn pow_u64(p: u64, e: i64) -> u64 {
    p.pow(e as u32)
}

/// The coset `index·p^(−M) + p^K Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetCell {
    pub prime: u64,
    pub support_exponent: i64,
    pub cell_exponent: i64,
    pub index: u64,
}

impl CosetCell {
    pub fn depth(&self) -> i64 {
        self.support_exponent + self.cell_exponent
    }

    /// Digits of the representative at `p^(−M)`, …, `p^(K−1)`.
    pub fn rep_digits(&self) -> Vec<u64> {
        let mut v = self.index;
        (0..self.depth())
            .map(|_| {
                let d = v % self.prime;
                v /= self.prime;
                d
            })
            .collect()
    }

    /// The representative, known modulo `p^K`.
    pub fn representative(&self) -> PAdicNumber {
        PAdicNumber::from_digits(self.prime, -self.support_exponent, &self.rep_digits())
            .expect("cell digits are canonical")
    }

    /// `e` with `|ξ|_p = p^e` on the whole cell; `None` for the cell at 0.
    pub fn norm_exponent(&self) -> Option<i64> {
        if self.index == 0 {
            return None;
        }
        let mut v = self.index;
        let mut k = 0;
        while v % self.prime == 0 {
            v /= self.prime;
            k += 1;
        }
        Some(self.support_exponent - k)
    }

    /// Haar measure `p^(−K)`.
    pub fn measure(&self) -> BigRational {
        p_pow_rational(self.prime, -self.cell_exponent)
    }

    pub fn contains(&self, xi: &PAdicNumber) -> Result<bool> {
        Ok(locate(self.prime, self.support_exponent, self.cell_exponent, xi)? == Some(self.index))
    }
}

/// Index of the cell of frame `(M, K)` holding `ξ`, or `None` outside the ball.
pub fn locate(p: u64, m: i64, k: i64, xi: &PAdicNumber) -> Result<Option<u64>> {
    if xi.prime() != p {
        return Err(Error::PrimeMismatch { left: p, right: xi.prime() });
    }
    if let Some(v) = xi.valuation() {
        if v < -m {
            return Ok(None);
        }
    }
    match xi.abs_precision() {
        Some(a) if a < k => return Err(Error::InsufficientPrecision { needed: k, available: a }),
        _ => {}
    }
    Ok(Some(digits_index(p, m, k, xi)))
}

/// All `p^(M+K)` cells of the ball `|ξ|_p ≤ p^M` at resolution `K`.
pub fn enumerate_cells(p: u64, m: i64, k: i64) -> Result<Vec<CosetCell>> {
    check_prime(p)?;
    let n = cell_count(p, m, k)?;
    Ok((0..n).map(|index| CosetCell { prime: p, support_exponent: m, cell_exponent: k, index }).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocallyConstantFn<S> {
    prime: u64,
    support_exponent: i64,
    resolution_exponent: i64,
    table: BTreeMap<u64, S>,
}

impl<S: Scalar> LocallyConstantFn<S> {
    pub fn zero(p: u64, support_exponent: i64, resolution_exponent: i64) -> Result<Self> {
        check_prime(p)?;
        if support_exponent + resolution_exponent < 0 {
            return Err(Error::invalid("support exponent + resolution exponent must be ≥ 0"));
        }
        Ok(LocallyConstantFn { prime: p, support_exponent, resolution_exponent, table: BTreeMap::new() })
    }

    /// `Ω(|ξ|_p ≤ p^M)` in the frame `(M, −M)`.
    pub fn ball_indicator(p: u64, m: i64) -> Result<Self> {
        let mut f = Self::zero(p, m, -m)?;
        f.table.insert(0, S::one());
        Ok(f)
    }

    /// Builds from `(index, value)` pairs; repeated indices add up.
    pub fn from_table(
        p: u64,
        support_exponent: i64,
        resolution_exponent: i64,
        entries: impl IntoIterator<Item = (u64, S)>,
    ) -> Result<Self> {
        let mut f = Self::zero(p, support_exponent, resolution_exponent)?;
        let depth = support_exponent + resolution_exponent;
        let bound = (p as u128).checked_pow(depth as u32);
        for (i, v) in entries {
            if bound.is_some_and(|b| i as u128 >= b) {
                return Err(Error::invalid(format!("cell index {i} out of range for p^{depth} cells")));
            }
            f.add_at(i, v);
        }
        Ok(f)
    }

    /// Tabulates `value(cell)` over every cell of the frame.
    pub fn from_fn(
        p: u64,
        support_exponent: i64,
        resolution_exponent: i64,
        mut value: impl FnMut(&CosetCell) -> S,
    ) -> Result<Self> {
        let cells = enumerate_cells(p, support_exponent, resolution_exponent)?;
        Self::from_table(p, support_exponent, resolution_exponent, cells.iter().map(|c| (c.index, value(c))))
    }

    fn add_at(&mut self, i: u64, v: S) {
        if v.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.table.entry(i) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + v;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn support_exponent(&self) -> i64 {
        self.support_exponent
    }

    pub fn resolution_exponent(&self) -> i64 {
        self.resolution_exponent
    }

    /// Number of cells in the frame, `p^(M+K)`.
    pub fn frame_size(&self) -> u128 {
        (self.prime as u128).pow((self.support_exponent + self.resolution_exponent) as u32)
    }

    pub fn cell(&self, index: u64) -> CosetCell {
        CosetCell {
            prime: self.prime,
            support_exponent: self.support_exponent,
            cell_exponent: self.resolution_exponent,
            index,
        }
    }

    /// Value on cell `index`; missing cells are zero.
    pub fn value(&self, index: u64) -> S {
        self.table.get(&index).cloned().unwrap_or_else(S::zero)
    }

    /// Stored (nonzero) entries in ascending cell order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, &S)> {
        self.table.iter().map(|(i, v)| (*i, v))
    }

    pub fn nnz(&self) -> usize {
        self.table.len()
    }

    pub fn is_zero(&self) -> bool {
        self.table.values().all(|v| v.is_zero())
    }

    pub fn eval(&self, xi: &PAdicNumber) -> Result<S> {
        Ok(match locate(self.prime, self.support_exponent, self.resolution_exponent, xi)? {
            Some(i) => self.value(i),
            None => S::zero(),
        })
    }

    /// Value on cell `index` of the frame `(m, k)`, which must be at least as
    /// fine as this function's resolution.
    pub fn value_in_frame(&self, m: i64, k: i64, index: u64) -> S {
        debug_assert!(k >= self.resolution_exponent);
        let p = self.prime;
        let depth = self.support_exponent + self.resolution_exponent;
        let modulus = pow_u64(p, depth) as u128;
        let j = if m >= self.support_exponent {
            let step = pow_u64(p, m - self.support_exponent);
            if index % step != 0 {
                return S::zero();
            }
            (index / step) as u128 % modulus
        } else {
            (index as u128 * pow_u64(p, self.support_exponent - m) as u128) % modulus
        };
        self.value(j as u64)
    }

    /// The same function in frame `(m, k)`; `k` may not be coarser than the
    /// current resolution and the new ball must contain the support.
    pub fn reframe(&self, m: i64, k: i64) -> Result<Self> {
        if k < self.resolution_exponent {
            return Err(Error::invalid(format!(
                "cannot coarsen resolution from {} to {k}",
                self.resolution_exponent
            )));
        }
        let p = self.prime;
        let mut out = Self::zero(p, m, k)?;
        cell_count(p, m, k)?;
        if m + self.resolution_exponent < 0 {
            if self.table.is_empty() {
                return Ok(out);
            }
            return Err(Error::invalid(format!("function is nonzero outside the ball |ξ| ≤ {p}^{m}")));
        }
        let sub = pow_u64(p, k - self.resolution_exponent);
        let stride = pow_u64(p, m + self.resolution_exponent);
        for (&j, v) in &self.table {
            let base = if m >= self.support_exponent {
                j * pow_u64(p, m - self.support_exponent)
            } else {
                let step = pow_u64(p, self.support_exponent - m);
                if j % step != 0 {
                    return Err(Error::invalid(format!(
                        "function is nonzero outside the ball |ξ| ≤ {p}^{m}"
                    )));
                }
                j / step
            };
            for s in 0..sub {
                out.table.insert(base + s * stride, v.clone());
            }
        }
        Ok(out)
    }

    pub fn refine(&self) -> Self {
        self.reframe(self.support_exponent, self.resolution_exponent + 1).expect("refinement within cap")
    }

    /// Smallest frame containing both functions' frames.
    fn common_frame(&self, other: &Self) -> Result<(i64, i64)> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch { left: self.prime, right: other.prime });
        }
        Ok((
            self.support_exponent.max(other.support_exponent),
            self.resolution_exponent.max(other.resolution_exponent),
        ))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (m, k) = self.common_frame(other)?;
        let mut out = self.reframe(m, k)?;
        for (i, v) in other.reframe(m, k)?.table {
            out.add_at(i, v);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| c.clone() * v.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = LocallyConstantFn {
            prime: self.prime,
            support_exponent: self.support_exponent,
            resolution_exponent: self.resolution_exponent,
            table: BTreeMap::new(),
        };
        for (&i, v) in &self.table {
            out.add_at(i, f(v));
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    fn cell_measure(&self) -> S {
        S::from_rational(&p_pow_rational(self.prime, -self.resolution_exponent))
    }

    /// `∫ f dξ` with `Z_p` of unit measure.
    pub fn integrate(&self) -> S {
        let sum = self.table.values().fold(S::zero(), |acc, v| acc + v.clone());
        sum * self.cell_measure()
    }

    /// `⟨f, g⟩ = ∫ conj(f)·g dξ`. Runs over the stored cells of whichever
    /// function has the finer resolution.
    pub fn inner_product(&self, other: &Self) -> Result<S> {
        self.common_frame(other)?;
        let (fine, coarse, conj_fine) = if self.resolution_exponent >= other.resolution_exponent {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let (m, k) = (fine.support_exponent, fine.resolution_exponent);
        let mut acc = S::zero();
        for (&i, v) in &fine.table {
            let w = coarse.value_in_frame(m, k, i);
            if w.is_zero() {
                continue;
            }
            acc = acc + if conj_fine { v.conj() * w } else { w.conj() * v.clone() };
        }
        Ok(acc * fine.cell_measure())
    }

    pub fn norm_sqr(&self) -> S {
        self.inner_product(self).expect("same prime")
    }

    /// `ξ ↦ f(ξ − b)`. The frame grows to hold `b`; `b` must be known modulo
    /// `p^K`.
    pub fn translate(&self, b: &PAdicNumber) -> Result<Self> {
        if b.prime() != self.prime {
            return Err(Error::PrimeMismatch { left: self.prime, right: b.prime() });
        }
        let k = self.resolution_exponent;
        let m = match b.valuation() {
            Some(v) => self.support_exponent.max(-v),
            None => self.support_exponent,
        };
        if let Some(a) = b.abs_precision() {
            if a < k && !b.is_zero() {
                return Err(Error::InsufficientPrecision { needed: k, available: a });
            }
        }
        let shifted = b.truncate(k);
        let b_index = digits_index(self.prime, m, k, &shifted);
        let base = self.reframe(m, k)?;
        let modulus = pow_u64(self.prime, m + k) as u128;
        let mut out = Self::zero(self.prime, m, k)?;
        for (i, v) in base.table {
            out.table.insert(((i as u128 + b_index as u128) % modulus) as u64, v);
        }
        Ok(out)
    }

    /// `ξ ↦ f(p^e ξ)`: the table is unchanged, the frame becomes `(M + e, K − e)`.
    pub fn scale_arg(&self, e: i64) -> Self {
        LocallyConstantFn {
            prime: self.prime,
            support_exponent: self.support_exponent + e,
            resolution_exponent: self.resolution_exponent - e,
            table: self.table.clone(),
        }
    }

    /// Haar measure of the set where `f` is not negligible.
    pub fn support_measure(&self, tol: f64) -> BigRational {
        let n = self.table.values().filter(|v| !v.negligible(tol)).count();
        p_pow_rational(self.prime, -self.resolution_exponent) * BigInt::from(n)
    }

    /// `(∫f / vol) · Ω(|ξ| ≤ p^M)`: the projection onto constants on the ball.
    pub fn mean_component(&self) -> Self {
        let vol = p_pow_rational(self.prime, self.support_exponent);
        let c = self.integrate() * S::from_rational(&vol.recip());
        let mut out = Self::ball_indicator(self.prime, self.support_exponent).expect("valid frame");
        out = out.scale(&c);
        out.reframe(self.support_exponent, self.resolution_exponent).expect("same frame size")
    }

    /// Largest `|f − g|` over a common frame (0 or 1 for exact scalars: any
    /// exact difference reports its floating magnitude).
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.try_sub(other)?;
        Ok(d.table.values().map(|v| v.to_complex().norm()).fold(0.0, f64::max))
    }

    /// Pointwise equality, exact for exact scalars and within `tol` otherwise.
    pub fn pointwise_eq(&self, other: &Self, tol: f64) -> Result<bool> {
        let d = self.try_sub(other)?;
        Ok(d.table.values().all(|v| v.negligible(tol)))
    }

    /// Drops entries that are negligible at `tol` (only exact zeros for exact scalars).
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = self.clone();
        out.table.retain(|_, v| !v.negligible(tol));
        out
    }

    pub fn to_float(&self) -> LocallyConstantFn<Complex64> {
        LocallyConstantFn {
            prime: self.prime,
            support_exponent: self.support_exponent,
            resolution_exponent: self.resolution_exponent,
            table: self.table.iter().map(|(i, v)| (*i, v.to_complex())).filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LocallyConstantFn<T> {
        let mut out = LocallyConstantFn::<T>::zero(self.prime, self.support_exponent, self.resolution_exponent)
            .expect("valid frame");
        for (&i, v) in &self.table {
            out.add_at(i, f(v));
        }
        out
    }
}

/// Index of `b`'s digits at `p^(−m) … p^(k−1)`; `b` must lie in the ball.
fn digits_index(p: u64, m: i64, k: i64, b: &PAdicNumber) -> u64 {
    (-m..k).rev().fold(0, |idx, pos| idx * p + b.digit_at(pos))
}
