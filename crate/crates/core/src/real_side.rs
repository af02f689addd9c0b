//! Generalized Haar wavelets on `[0, 1]` and their relation to the Kozyrev
//! family through the Monna map.
//!
//! `Ψ_{L,t} = p^(L/2) Σ_ℓ e(ℓ/p) Ω_[(pt+ℓ)h, (pt+ℓ+1)h)` with `h = p^(−L−1)`,
//! `L ≥ 0`, `t ∈ [0, p^L)`. These are orthonormal; the
//! [`Convention::Scaled`] normalization is `√p` times larger (squared norm
//! `p`). In the `(n', m')` labels of the scaled family, `n' = L + 1` and
//! `m' = p·t`.
//!
//! Everything is integrated exactly: step functions against polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::kozyrev::{materialize, KozyrevIndex};
use crate::padic::{check_prime, p_pow_rational};
use crate::phase::RationalPhase;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    #[default]
    Orthonormal,
    /// `√p` times the orthonormal wavelet.
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HaarIndex {
    pub level: i64,
    pub translate: u64,
    pub convention: Convention,
}

impl HaarIndex {
    pub fn new(p: u64, level: i64, translate: u64, convention: Convention) -> Result<Self> {
        check_prime(p)?;
        if level < 0 {
            return Err(Error::invalid(format!("Haar level {level} < 0")));
        }
        if (translate as u128) >= (p as u128).pow(level as u32) {
            return Err(Error::invalid(format!("translate {translate} outside [0, {p}^{level})")));
        }
        Ok(HaarIndex { level, translate, convention })
    }

    /// `(n', m') = (L + 1, p t)`.
    pub fn scaled_labels(&self, p: u64) -> (i64, u64) {
        (self.level + 1, p * self.translate)
    }

    /// All indices with `level < max_level`, by level then translate.
    pub fn all(p: u64, max_level: i64, convention: Convention) -> Result<Vec<HaarIndex>> {
        let mut out = Vec::new();
        for level in 0..max_level {
            for t in 0..p.pow(level as u32) {
                out.push(HaarIndex::new(p, level, t, convention)?);
            }
        }
        Ok(out)
    }
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn pow(x: &BigRational, d: u32) -> BigRational {
    num_traits::pow(x.clone(), d as usize)
}

/// `∫_a^b x^d dx`.
fn monomial_integral(a: &BigRational, b: &BigRational, d: u32) -> BigRational {
    (pow(b, d + 1) - pow(a, d + 1)) / BigRational::from_integer(BigInt::from(d + 1))
}

/// Piecewise constant function on `[0, 1]`, right-open cells `[a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStepFn<S> {
    breakpoints: Vec<BigRational>,
    values: Vec<S>,
}

impl<S: Scalar> RealStepFn<S> {
    pub fn new(breakpoints: Vec<BigRational>, values: Vec<S>) -> Result<Self> {
        if breakpoints.first() != Some(&BigRational::zero()) || breakpoints.last() != Some(&BigRational::one()) {
            return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::invalid("need one value per subinterval"));
        }
        Ok(RealStepFn { breakpoints, values })
    }

    /// Builds from disjoint intervals `[a, b) ⊆ [0, 1]`; gaps are zero.
    pub fn from_intervals(mut pieces: Vec<(BigRational, BigRational, S)>) -> Result<Self> {
        pieces.sort_by(|x, y| x.0.cmp(&y.0));
        let mut bps = vec![BigRational::zero()];
        let mut vals = Vec::new();
        for (a, b, v) in pieces {
            let last = bps.last().unwrap().clone();
            if a < last || b <= a || b > BigRational::one() {
                return Err(Error::invalid("intervals overlap or leave [0, 1]"));
            }
            if a > last {
                vals.push(S::zero());
                bps.push(a);
            }
            vals.push(v);
            bps.push(b);
        }
        if bps.last() != Some(&BigRational::one()) {
            vals.push(S::zero());
            bps.push(BigRational::one());
        }
        RealStepFn::new(bps, vals)
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&BigRational, &BigRational, &S)> {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, v)| (&w[0], &w[1], v))
    }

    pub fn eval(&self, x: &BigRational) -> Result<S> {
        if x.is_negative() || *x >= BigRational::one() {
            return Err(Error::invalid(format!("x = {x} outside [0, 1)")));
        }
        let i = self.breakpoints.partition_point(|b| b <= x) - 1;
        Ok(self.values[i].clone())
    }

    /// `∫₀¹ f(x) x^d dx`.
    pub fn moment(&self, d: u32) -> S {
        self.pieces()
            .filter(|(_, _, v)| !v.is_zero())
            .fold(S::zero(), |acc, (a, b, v)| acc + v.clone() * S::from_rational(&monomial_integral(a, b, d)))
    }

    pub fn conj(&self) -> Self {
        RealStepFn { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// `∫₀¹ conj(f) g dx`.
    pub fn inner_product(&self, other: &Self) -> S {
        let mut bps: Vec<BigRational> = self.breakpoints.iter().chain(&other.breakpoints).cloned().collect();
        bps.sort();
        bps.dedup();
        bps.windows(2).fold(S::zero(), |acc, w| {
            let f = self.eval(&w[0]).expect("inside [0,1)");
            let g = other.eval(&w[0]).expect("inside [0,1)");
            acc + f.conj() * g * S::from_rational(&(&w[1] - &w[0]))
        })
    }

    /// Equality at every point of `[0, 1)`.
    pub fn pointwise_eq(&self, other: &Self, tol: f64) -> bool {
        let mut bps: Vec<BigRational> = self.breakpoints.iter().chain(&other.breakpoints).cloned().collect();
        bps.sort();
        bps.dedup();
        bps[..bps.len() - 1].iter().all(|x| self.eval(x).unwrap().near(&other.eval(x).unwrap(), tol))
    }
}

fn amplitude<S: Scalar>(p: u64, level: i64, convention: Convention) -> S {
    match convention {
        Convention::Orthonormal => S::sqrt_p_power(p, level),
        Convention::Scaled => S::sqrt_p_power(p, level + 1),
    }
}

/// `Ψ_{L,t}(x)`.
pub fn haar_evaluate<S: Scalar>(p: u64, idx: &HaarIndex, x: &BigRational) -> Result<S> {
    if x.is_negative() || *x >= BigRational::one() {
        return Err(Error::invalid(format!("x = {x} outside [0, 1)")));
    }
    // cell number of x at width p^(−L−1)
    let scaled = x * p_pow_rational(p, idx.level + 1);
    let cell = scaled.floor().to_integer().to_u64().expect("cell index fits in u64");
    let start = p * idx.translate;
    if cell < start || cell >= start + p {
        return Ok(S::zero());
    }
    let ell = cell - start;
    Ok(amplitude::<S>(p, idx.level, idx.convention).mul_phase(RationalPhase::new(ell as i128, p as u128)))
}

/// `Ψ_{L,t}` as a step function on `[0, 1]`.
pub fn haar_step_fn<S: Scalar>(p: u64, idx: &HaarIndex) -> Result<RealStepFn<S>> {
    let h = p_pow_rational(p, -idx.level - 1);
    let amp = amplitude::<S>(p, idx.level, idx.convention);
    let pieces = (0..p)
        .map(|ell| {
            let a = &h * BigInt::from(p * idx.translate + ell);
            let b = &a + &h;
            (a, b, amp.mul_phase(RationalPhase::new(ell as i128, p as u128)))
        })
        .collect();
    RealStepFn::from_intervals(pieces)
}

/// `∫₀¹ x^d conj(Ψ_{L,t}(x)) dx` by the closed form
/// `p^(−(n−½)n')/n · Σ_ℓ e(−ℓ/p) [(m'+ℓ+1)^n − (m'+ℓ)^n]` with `n = d + 1`,
/// divided by `√p` in the orthonormal convention.
pub fn monomial_coefficient<S: Scalar>(p: u64, degree: u32, idx: &HaarIndex) -> S {
    let (n_prime, m_prime) = idx.scaled_labels(p);
    closed_form(p, degree, n_prime, m_prime, idx.convention)
}

fn closed_form<S: Scalar>(p: u64, degree: u32, n_prime: i64, m_prime: u64, convention: Convention) -> S {
    let n = degree as i64 + 1;
    let mut sum = S::zero();
    for ell in 0..p {
        let a = BigInt::from(m_prime + ell);
        let b = &a + 1;
        let diff = num_traits::pow(b, n as usize) - num_traits::pow(a, n as usize);
        let term = S::from_rational(&BigRational::from_integer(diff));
        sum = sum + term.mul_phase(RationalPhase::new(-(ell as i128), p as u128));
    }
    let prefactor = S::sqrt_p_power(p, -(2 * n - 1) * n_prime) * S::from_rational(&rat(1, n));
    let norm = match convention {
        Convention::Orthonormal => S::sqrt_p_power(p, -1),
        Convention::Scaled => S::one(),
    };
    prefactor * norm * sum
}

/// The same coefficient by exact quadrature of the step function.
pub fn monomial_coefficient_quadrature<S: Scalar>(p: u64, degree: u32, idx: &HaarIndex) -> Result<S> {
    Ok(haar_step_fn::<S>(p, idx)?.conj().moment(degree))
}

/// `x^d ≈ 1/(d+1) + Σ c_{L,t} Ψ_{L,t}` over `L < max_level`. The constant is
/// the scaling-function term the mean-zero wavelets cannot carry. For `p > 2`
/// the family spans one of the `p − 1` mean-zero directions per cell, so the
/// sum is the orthogonal projection onto that span, not the cell average.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialExpansion<S> {
    pub degree: u32,
    pub constant: BigRational,
    pub coefficients: Vec<(HaarIndex, S)>,
}

pub fn expand_monomial<S: Scalar>(
    p: u64,
    degree: u32,
    max_level: i64,
    convention: Convention,
) -> Result<MonomialExpansion<S>> {
    let coefficients = HaarIndex::all(p, max_level, convention)?
        .into_iter()
        .map(|idx| {
            let c = monomial_coefficient::<S>(p, degree, &idx);
            (idx, c)
        })
        .collect();
    Ok(MonomialExpansion { degree, constant: rat(1, degree as i64 + 1), coefficients })
}

/// Jump-sum form of `∫ Ψ · x^(s+1) (x^d)' dx` minus the quadrature of
/// `d ∫ Ψ x^(d+s)`, with zero boundary terms. `s = −1, 0, +1` are the
/// lowering, diagonal and raising actions.
///
/// `x^(s+1)(x^d)' = (d/(d+s+1)) (x^(d+s+1))'`, and integrating by parts
/// against `Ψ = Σ v_ℓ Ω_[a_ℓ, b_ℓ)` turns the derivative into the jumps
/// `−Σ v_ℓ (a_ℓ^q − b_ℓ^q)`.
pub fn jump_identity_residual<S: Scalar>(p: u64, degree: u32, shift: i64, idx: &HaarIndex) -> Result<S> {
    if !(-1..=1).contains(&shift) {
        return Err(Error::invalid("shift must be −1, 0 or +1"));
    }
    let d = degree as i64;
    if d + shift < 0 {
        return Err(Error::invalid(format!("degree {degree} too small for shift {shift}")));
    }
    let psi = haar_step_fn::<S>(p, idx)?;
    let q = (d + shift + 1) as u32;
    let jumps = psi.pieces().fold(S::zero(), |acc, (a, b, v)| {
        acc + v.clone() * S::from_rational(&(pow(b, q) - pow(a, q)))
    });
    let lhs = jumps * S::from_rational(&rat(d, d + shift + 1));
    let rhs = psi.moment((d + shift) as u32) * S::from_i64(d);
    Ok(lhs - rhs)
}

/// `∫ Ψ (x^d)' = d ∫ Ψ x^(d−1)` via jumps; needs `degree ≥ 1`.
pub fn verify_lowering<S: Scalar>(p: u64, degree: u32, idx: &HaarIndex) -> Result<S> {
    if degree == 0 {
        return Err(Error::invalid("lowering needs degree ≥ 1"));
    }
    jump_identity_residual(p, degree, -1, idx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilatationReport {
    pub degree: u32,
    pub alpha: i64,
    /// `c(L, t) = p^(−(n−½)α) c(L−α, t)` instances checked / failed.
    pub coefficient_checks: usize,
    pub coefficient_failures: usize,
    /// `Ψ_{L,t}(p^(−α)x) = p^(α/2) Ψ_{L−α,t}(x)` sample checks / failures.
    pub wavelet_checks: usize,
    pub wavelet_failures: usize,
    /// `Σ c Ψ(p^(−α)x) = p^(α(1−n)) Σ c_{L−α} Ψ_{L−α}(x)` sample checks / failures.
    pub expansion_checks: usize,
    pub expansion_failures: usize,
}

impl DilatationReport {
    pub fn passed(&self) -> bool {
        self.coefficient_failures == 0 && self.wavelet_failures == 0 && self.expansion_failures == 0
    }
}

/// `Ψ_{L,t}(x)` for any integer level (orthonormal), `x` anywhere on `R`.
fn haar_anywhere(p: u64, level: i64, t: u64, x: &BigRational) -> Cyclotomic {
    if x.is_negative() {
        return Cyclotomic::zero();
    }
    let scaled = x * p_pow_rational(p, level + 1);
    let cell = scaled.floor().to_integer();
    let start = BigInt::from(p * t);
    if cell < start || cell >= &start + BigInt::from(p) {
        return Cyclotomic::zero();
    }
    let ell = (cell - start).to_i64().unwrap();
    Cyclotomic::sqrt_p_power(p, level).mul_phase(RationalPhase::new(ell as i128, p as u128))
}

/// The dilatation identity for `x^d` under `x ↦ p^(−α)x`, checked on every
/// coefficient with `α ≤ L < α + max_level` and on a grid of sample points.
pub fn verify_dilatation(p: u64, degree: u32, alpha: i64, max_level: i64) -> Result<DilatationReport> {
    check_prime(p)?;
    if alpha < 1 {
        return Err(Error::invalid("α must be a positive integer"));
    }
    let n = degree as i64 + 1;
    let mut r = DilatationReport {
        degree,
        alpha,
        coefficient_checks: 0,
        coefficient_failures: 0,
        wavelet_checks: 0,
        wavelet_failures: 0,
        expansion_checks: 0,
        expansion_failures: 0,
    };
    let coef = |level: i64, t: u64| -> Cyclotomic { closed_form(p, degree, level + 1, p * t, Convention::Orthonormal) };
    let factor_c = Cyclotomic::sqrt_p_power(p, -(2 * n - 1) * alpha);
    let factor_psi = Cyclotomic::sqrt_p_power(p, alpha);
    let eigen = Cyclotomic::sqrt_p_power(p, 2 * alpha * (1 - n));
    let grid = p.pow(max_level.max(1) as u32 + 1);
    let samples: Vec<BigRational> =
        (0..grid).map(|i| BigRational::new(BigInt::from(2 * i + 1), BigInt::from(2 * grid))).collect();
    let labels: Vec<(i64, u64)> =
        (alpha..alpha + max_level).flat_map(|l| (0..p.pow(l as u32)).map(move |t| (l, t))).collect();
    for &(l, t) in &labels {
        r.coefficient_checks += 1;
        if coef(l, t) != &factor_c * &coef(l - alpha, t) {
            r.coefficient_failures += 1;
        }
    }
    let dilate = p_pow_rational(p, -alpha);
    for x in &samples {
        let y = x * &dilate;
        for &(l, t) in labels.iter().filter(|(l, _)| *l == alpha) {
            r.wavelet_checks += 1;
            if haar_anywhere(p, l, t, &y) != &factor_psi * &haar_anywhere(p, l - alpha, t, x) {
                r.wavelet_failures += 1;
            }
        }
        let lhs = labels.iter().fold(Cyclotomic::zero(), |acc, &(l, t)| acc + coef(l, t) * haar_anywhere(p, l, t, &y));
        let rhs = labels.iter().fold(Cyclotomic::zero(), |acc, &(l, t)| {
            acc + coef(l - alpha, t) * haar_anywhere(p, l - alpha, t, x)
        });
        r.expansion_checks += 1;
        if lhs != &eigen * &rhs {
            r.expansion_failures += 1;
        }
    }
    Ok(r)
}

/// The Haar wavelet that `ψ_{−L,m,1}` pushes forward to, with the global
/// phase: `μ_*ψ_{−L,m,1} = χ(m/p) Ψ_{L,t}`, `t = Σ m_i p^(i−1)`.
pub fn kozyrev_to_haar(p: u64, idx: &KozyrevIndex) -> Result<(RationalPhase, HaarIndex)> {
    idx.validate(p)?;
    if idx.j != 1 {
        return Err(Error::UnsupportedCase("the Haar family carries the phases of j = 1 only".into()));
    }
    let level = -idx.n;
    if level < 0 || idx.depth() > level {
        return Err(Error::UnsupportedCase(format!("support of {idx} is not inside Z_p")));
    }
    let t = idx.m_digits.iter().enumerate().map(|(i, &d)| d * p.pow(i as u32)).sum();
    let m_over_p = RationalPhase::new(idx.m_int(p) as i128, (p as u128).pow(idx.depth() as u32 + 1));
    Ok((m_over_p, HaarIndex::new(p, level, t, Convention::Orthonormal)?))
}

/// Pushes `ψ_{n,m,j}` (support inside `Z_p`) forward along the Monna map:
/// cell `ξ + p^K Z_p` goes to `[μ(ξ), μ(ξ) + p^(−K))`.
pub fn monna_pushforward<S: Scalar>(p: u64, idx: &KozyrevIndex) -> Result<RealStepFn<S>> {
    let psi = materialize::<S>(p, idx, 0)?;
    if psi.support_exponent() > 0 {
        return Err(Error::UnsupportedCase(format!("support of {idx} is not inside Z_p")));
    }
    let k = psi.resolution_exponent();
    let f = psi.reframe(0, k)?;
    let width = p_pow_rational(p, -k);
    let pieces = f
        .entries()
        .map(|(i, v)| {
            let start = f.cell(i).representative().monna();
            let end = &start + &width;
            (start, end, v.clone())
        })
        .collect();
    RealStepFn::from_intervals(pieces)
}

/// `−log_p(max |ψ|²) − 1`, which is `n − 1`.
pub fn rho_exponent(p: u64, idx: &KozyrevIndex) -> Result<i64> {
    let psi = materialize::<Cyclotomic>(p, idx, 0)?;
    let max = psi
        .entries()
        .map(|(_, v)| v.norm_sqr_rational().ok_or_else(|| Error::Inexact("|ψ|² is not rational".into())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .ok_or_else(|| Error::invalid("wavelet has empty support"))?;
    Ok(-exact_log_p(&max, p)? - 1)
}

/// `e` with `q = p^e`.
fn exact_log_p(q: &BigRational, p: u64) -> Result<i64> {
    let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
    let pb = BigInt::from(p);
    let mut e = 0;
    while &num % &pb == BigInt::zero() && !num.is_zero() {
        num /= &pb;
        e += 1;
    }
    while &den % &pb == BigInt::zero() {
        den /= &pb;
        e -= 1;
    }
    if num.is_one() && den.is_one() {
        Ok(e)
    } else {
        Err(Error::Inexact(format!("{q} is not a power of {p}")))
    }
}
