//! Vladimirov operators, ladder operators and commutation-relation checks.
//!
//! On the wavelet basis every operator here is a label shift `n ↦ n ± 1`
//! or a multiplier depending only on `n`:
//!
//! | operator   | action on `ψ_{n,m,j}`       |
//! |------------|-----------------------------|
//! | `D^α`      | `p^(α(1−n)) ψ_{n,m,j}`      |
//! | `log_p D`  | `(1−n) ψ_{n,m,j}`           |
//! | `a_±`      | `ψ_{n±1,m,j}`               |
//! | `J_±`      | `(1−n) ψ_{n±1,m,j}`         |
//! | `ℓ_k`      | `(1−n) ψ_{n+k,m,j}`         |
//!
//! A [`BasisOperator`] is a word of such primitives; `[A, B]` as a word
//! means `A ∘ B`, so the rightmost letter acts first.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function_space::{CosetCell, LocallyConstantFn};
use crate::kozyrev::{WaveletExpansion, Window};
use crate::padic::PAdicNumber;
use crate::phase::RationalPhase;
use crate::scalar::{Exponent, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive<S> {
    /// `n ↦ n + s`.
    ScaleShift(i64),
    /// Multiplies by `p^(α(1−n))`.
    Diagonal(Exponent),
    /// Multiplies by `1 − n`.
    LogDiagonal,
    Scalar(S),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisOperator<S> {
    word: Vec<Primitive<S>>,
}

impl<S: Scalar> BasisOperator<S> {
    pub fn identity() -> Self {
        BasisOperator { word: vec![] }
    }

    pub fn from_word(word: Vec<Primitive<S>>) -> Self {
        BasisOperator { word }
    }

    pub fn word(&self) -> &[Primitive<S>] {
        &self.word
    }

    /// `a_s`, `s = ±1`.
    pub fn ladder(s: i64) -> Self {
        assert!(s == 1 || s == -1, "ladder step must be ±1");
        BasisOperator { word: vec![Primitive::ScaleShift(s)] }
    }

    /// `D^α` in spectral form.
    pub fn vladimirov(alpha: Exponent) -> Self {
        BasisOperator { word: vec![Primitive::Diagonal(alpha)] }
    }

    /// `log_p D`.
    pub fn log() -> Self {
        BasisOperator { word: vec![Primitive::LogDiagonal] }
    }

    pub fn scalar(c: S) -> Self {
        BasisOperator { word: vec![Primitive::Scalar(c)] }
    }

    /// `J_s = a_s ∘ log_p D`.
    pub fn j(s: i64) -> Self {
        Self::ladder(s).then(&Self::log())
    }

    /// `ℓ_k = (a_sign(k))^|k| ∘ log_p D`.
    pub fn ell(k: i64) -> Self {
        let mut word: Vec<Primitive<S>> = (0..k.abs()).map(|_| Primitive::ScaleShift(k.signum())).collect();
        word.push(Primitive::LogDiagonal);
        BasisOperator { word }
    }

    /// `self ∘ other`.
    pub fn then(&self, other: &Self) -> Self {
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        BasisOperator { word }
    }

    /// Net shift of `n`.
    pub fn displacement(&self) -> i64 {
        self.word.iter().map(|w| if let Primitive::ScaleShift(s) = w { *s } else { 0 }).sum()
    }

    /// Largest `|shift|` reached by any suffix of the word, i.e. how far
    /// from the window edge a basis vector must sit to stay inside.
    pub fn reach(&self) -> i64 {
        let mut pos = 0i64;
        let mut reach = 0i64;
        for w in self.word.iter().rev() {
            if let Primitive::ScaleShift(s) = w {
                pos += s;
                reach = reach.max(pos.abs());
            }
        }
        reach
    }

    pub fn apply(&self, e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
        let p = e.prime();
        let mut cur = e.clone();
        for w in self.word.iter().rev() {
            cur = match w {
                Primitive::ScaleShift(s) => cur.relabel(|idx| Ok((RationalPhase::ZERO, idx.with_n(idx.n + s))))?,
                Primitive::Diagonal(alpha) => {
                    let mut out = WaveletExpansion::new(p, cur.window())?;
                    for (idx, c) in cur.iter() {
                        out.insert(idx.clone(), c.clone() * eigenvalue::<S>(p, alpha, idx.n)?)?;
                    }
                    out
                }
                Primitive::LogDiagonal => cur.map_coefficients(|idx, c| c.clone() * S::from_i64(1 - idx.n)),
                Primitive::Scalar(c) => cur.scale(c),
            };
        }
        Ok(cur)
    }
}

/// `p^(α(1−n))`.
pub fn eigenvalue<S: Scalar>(p: u64, alpha: &Exponent, n: i64) -> Result<S> {
    S::p_power(p, &alpha.times(1 - n))
        .ok_or_else(|| Error::Inexact(format!("{p}^({alpha}·{}) in exact arithmetic", 1 - n)))
}

/// `p^e` for an exponent, with an [`Error::Inexact`] when the scalar type
/// cannot hold it.
pub fn p_power<S: Scalar>(p: u64, e: &Exponent) -> Result<S> {
    S::p_power(p, e).ok_or_else(|| Error::Inexact(format!("{p}^({e}) in exact arithmetic")))
}

pub fn vladimirov_spectral<S: Scalar>(alpha: &Exponent, e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
    BasisOperator::vladimirov(alpha.clone()).apply(e)
}

pub fn log_vladimirov<S: Scalar>(e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
    BasisOperator::log().apply(e)
}

pub fn ladder<S: Scalar>(s: i64, e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
    BasisOperator::ladder(s).apply(e)
}

pub fn j_op<S: Scalar>(s: i64, e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
    BasisOperator::j(s).apply(e)
}

pub fn ell<S: Scalar>(k: i64, e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
    BasisOperator::ell(k).apply(e)
}

/// `Σ c_i · A_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum<S> {
    pub terms: Vec<(S, BasisOperator<S>)>,
}

impl<S: Scalar> OperatorSum<S> {
    pub fn single(op: BasisOperator<S>) -> Self {
        OperatorSum { terms: vec![(S::one(), op)] }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(a: &BasisOperator<S>, b: &BasisOperator<S>) -> Self {
        OperatorSum { terms: vec![(S::one(), a.then(b)), (-S::one(), b.then(a))] }
    }

    pub fn plus(mut self, c: S, op: BasisOperator<S>) -> Self {
        self.terms.push((c, op));
        self
    }

    pub fn minus(mut self, other: OperatorSum<S>) -> Self {
        self.terms.extend(other.terms.into_iter().map(|(c, op)| (-c, op)));
        self
    }

    pub fn reach(&self) -> i64 {
        self.terms.iter().map(|(_, op)| op.reach()).max().unwrap_or(0)
    }

    pub fn apply(&self, e: &WaveletExpansion<S>) -> Result<WaveletExpansion<S>> {
        let mut acc = WaveletExpansion::new(e.prime(), e.window())?;
        for (c, op) in &self.terms {
            acc = acc.try_add(&op.apply(e)?.scale(c))?;
        }
        Ok(acc)
    }
}

/// A relation `combination = 0` to be checked on basis vectors.
#[derive(Debug, Clone)]
pub struct RelationInstance<S> {
    pub label: String,
    pub combination: OperatorSum<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceReport {
    pub label: String,
    /// Basis vectors tested (those at distance ≥ reach from the window edges).
    pub checked: usize,
    pub max_residual: f64,
    /// `"label at index"` of the first basis vector whose residual is not negligible.
    pub first_failure: Option<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Applies the relation to every interior basis vector of `window`.
pub fn check_on_basis<S: Scalar>(
    p: u64,
    window: Window,
    rel: &RelationInstance<S>,
    tol: f64,
) -> Result<InstanceReport> {
    let mut report =
        InstanceReport { label: rel.label.clone(), checked: 0, max_residual: 0.0, first_failure: None };
    let Some(inner) = window.interior(rel.combination.reach()) else {
        return Ok(report);
    };
    for idx in inner.indices(p)? {
        let e = WaveletExpansion::unit(p, window, idx.clone())?;
        let r = rel.combination.apply(&e)?;
        report.checked += 1;
        report.max_residual = report.max_residual.max(r.max_abs());
        if report.first_failure.is_none() && !r.vanishes(tol) {
            report.first_failure = Some(format!("{} at {}", rel.label, idx));
        }
    }
    Ok(report)
}

/// `[J₊, J₋] = 2 log_p D` and `[log_p D, J_±] = ∓J_±`.
pub fn sl2_relations<S: Scalar>() -> Vec<RelationInstance<S>> {
    let (jp, jm, l) = (BasisOperator::<S>::j(1), BasisOperator::<S>::j(-1), BasisOperator::<S>::log());
    vec![
        RelationInstance {
            label: "[J+, J-] - 2 log_p D".into(),
            combination: OperatorSum::commutator(&jp, &jm).plus(-S::from_i64(2), l.clone()),
        },
        RelationInstance {
            label: "[log_p D, J+] + J+".into(),
            combination: OperatorSum::commutator(&l, &jp).plus(S::one(), jp.clone()),
        },
        RelationInstance {
            label: "[log_p D, J-] - J-".into(),
            combination: OperatorSum::commutator(&l, &jm).plus(-S::one(), jm.clone()),
        },
    ]
}

/// `[ℓ_a, ℓ_b] = (a − b) ℓ_{a+b}` for `a, b ∈ [−range, range]`.
pub fn witt_relations<S: Scalar>(range: i64) -> Vec<RelationInstance<S>> {
    let mut out = Vec::new();
    for a in -range..=range {
        for b in -range..=range {
            out.push(RelationInstance {
                label: format!("[l_{a}, l_{b}] - ({})l_{}", a - b, a + b),
                combination: OperatorSum::commutator(&BasisOperator::ell(a), &BasisOperator::ell(b))
                    .plus(-S::from_i64(a - b), BasisOperator::ell(a + b)),
            });
        }
    }
    out
}

/// `p^(sα/2) D^α J_s − p^(−sα/2) J_s D^α` and
/// `[D^α, J_s] − (1 − p^(sα)) D^α J_s` for `s = ±1`.
pub fn deformed_relations<S: Scalar>(p: u64, alpha: &Exponent) -> Result<Vec<RelationInstance<S>>> {
    let d = BasisOperator::<S>::vladimirov(alpha.clone());
    let mut out = Vec::new();
    for s in [1i64, -1] {
        let js = BasisOperator::<S>::j(s);
        let q = p_power::<S>(p, &alpha.times_ratio(s, 2))?;
        let q_inv = p_power::<S>(p, &alpha.times_ratio(-s, 2))?;
        let sign = if s > 0 { "+" } else { "-" };
        out.push(RelationInstance {
            label: format!("p^({sign}a/2) D^a J{sign} - p^(-{sign}a/2) J{sign} D^a, a = {alpha}"),
            combination: OperatorSum { terms: vec![(q, d.then(&js)), (-q_inv, js.then(&d))] },
        });
        let c = S::one() - p_power::<S>(p, &alpha.times(s))?;
        out.push(RelationInstance {
            label: format!("[D^a, J{sign}] - (1 - p^({sign}a)) D^a J{sign}, a = {alpha}"),
            combination: OperatorSum::commutator(&d, &js).plus(-c, d.then(&js)),
        });
    }
    Ok(out)
}

/// `D^α₁ D^α₂ = D^(α₁+α₂)`.
pub fn semigroup_relation<S: Scalar>(a1: &Exponent, a2: &Exponent) -> RelationInstance<S> {
    let lhs = BasisOperator::vladimirov(a1.clone()).then(&BasisOperator::vladimirov(a2.clone()));
    RelationInstance {
        label: format!("D^({a1}) D^({a2}) - D^({})", a1.plus(a2)),
        combination: OperatorSum::single(lhs).plus(-S::one(), BasisOperator::vladimirov(a1.plus(a2))),
    }
}

/// `(D^α − 1)/(α ln p) − log_p D` applied to `e`, as a max-modulus residual.
pub fn log_limit_residual(alpha: f64, e: &WaveletExpansion<Complex64>) -> Result<f64> {
    let p = e.prime();
    let d = vladimirov_spectral(&Exponent::real(alpha), e)?;
    let scale = Complex64::new(1.0 / (alpha * (p as f64).ln()), 0.0);
    let quotient = d.try_sub(e)?.scale(&scale);
    Ok(quotient.try_sub(&log_vladimirov(e)?)?.max_abs())
}

/// Moves each coefficient along `ψ_{n,m,j}(· − b) = χ(−j p^(n−1) b) ψ_{n,m+p^n b,j}`.
pub fn translate_expansion<S: Scalar>(e: &WaveletExpansion<S>, b: &PAdicNumber) -> Result<WaveletExpansion<S>> {
    let p = e.prime();
    e.relabel(|idx| idx.translated(p, b))
}

/// `D^α(T_b e) − T_b(D^α e)` in spectral form.
pub fn check_translation_commutes<S: Scalar>(
    alpha: &Exponent,
    b: &PAdicNumber,
    e: &WaveletExpansion<S>,
) -> Result<WaveletExpansion<S>> {
    let lhs = vladimirov_spectral(alpha, &translate_expansion(e, b)?)?;
    let rhs = translate_expansion(&vladimirov_spectral(alpha, e)?, b)?;
    lhs.try_sub(&rhs)
}

fn check_kernel_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::UnsupportedDomain(format!(
            "kernel form needs real α > 0 (got {alpha}); use the spectral form"
        )));
    }
    Ok(())
}

/// `c_α = (1 − p^α)/(1 − p^(−1−α))`.
pub fn kernel_constant(p: u64, alpha: f64) -> f64 {
    let pf = p as f64;
    (1.0 - pf.powf(alpha)) / (1.0 - pf.powf(-1.0 - alpha))
}

/// `D^α f` on every cell of the frame `(m, k)`, which must contain the frame
/// of `f`. Cells beyond the ball add the closed-form tail
/// `−f(ξ)(1 − 1/p) p^(−(m+1)α)/(1 − p^(−α))`.
pub fn vladimirov_kernel_table<S: Scalar>(
    alpha: f64,
    f: &LocallyConstantFn<S>,
    m: i64,
    k: i64,
) -> Result<LocallyConstantFn<Complex64>> {
    check_kernel_alpha(alpha)?;
    let p = f.prime();
    let g = f.reframe(m, k)?.to_float();
    let pf = p as f64;
    let depth = m + k;
    // weight of a cell at distance p^(m−v)
    let w: Vec<f64> = (0..depth).map(|v| pf.powf(-((m - v) as f64) * (1.0 + alpha)) * pf.powf(-k as f64)).collect();
    // Σ over all other cells of the ball of their weights
    let ring_total: f64 =
        (0..depth).map(|v| (pf - 1.0) * pf.powi((depth - v - 1) as i32) * w[v as usize]).sum();
    let tail = (1.0 - 1.0 / pf) * pf.powf(-((m + 1) as f64) * alpha) / (1.0 - pf.powf(-alpha));
    let c = kernel_constant(p, alpha);
    let entries: Vec<(u64, Complex64)> = g.entries().map(|(i, v)| (i, *v)).collect();
    LocallyConstantFn::from_fn(p, m, k, |cell| {
        let i0 = cell.index;
        let f0 = g.value(i0);
        let mut acc = -f0 * (ring_total + tail);
        for (i, v) in &entries {
            if *i != i0 {
                acc += v * w[ord_diff(*i, i0, p) as usize];
            }
        }
        acc * c
    })
}

/// `D^α f` on one cell; the cell's frame may extend the frame of `f`.
pub fn vladimirov_kernel<S: Scalar>(alpha: f64, f: &LocallyConstantFn<S>, cell: &CosetCell) -> Result<Complex64> {
    check_kernel_alpha(alpha)?;
    if cell.prime != f.prime() {
        return Err(Error::PrimeMismatch { left: f.prime(), right: cell.prime });
    }
    let m = cell.support_exponent.max(f.support_exponent());
    let k = cell.cell_exponent.max(f.resolution_exponent());
    let table = vladimirov_kernel_table(alpha, f, m, k)?;
    let xi = cell.representative();
    table.eval(&xi)
}

/// `D^α(T_b f) − T_b(D^α f)` in kernel form, on the frame of `T_b f`.
pub fn check_translation_commutes_kernel<S: Scalar>(
    alpha: f64,
    b: &PAdicNumber,
    f: &LocallyConstantFn<S>,
) -> Result<LocallyConstantFn<Complex64>> {
    let moved = f.translate(b)?;
    let (m, k) = (moved.support_exponent(), moved.resolution_exponent());
    let lhs = vladimirov_kernel_table(alpha, &moved, m, k)?;
    let rhs = vladimirov_kernel_table(alpha, f, m, k)?.translate(b)?;
    lhs.try_sub(&rhs)
}

/// `ord_p(a − b)` for distinct cell indices.
fn ord_diff(a: u64, b: u64, p: u64) -> u32 {
    let mut d = a.abs_diff(b);
    let mut v = 0;
    while d % p == 0 {
        d /= p;
        v += 1;
    }
    v
}

/// Labels of `e` are unchanged in `(m, j)` by `op` (only `n` may move).
pub fn preserves_m_j<S: Scalar>(op: &BasisOperator<S>, e: &WaveletExpansion<S>) -> Result<bool> {
    let out = op.apply(e)?;
    let keys = |x: &WaveletExpansion<S>| -> Vec<(Vec<u64>, u64)> {
        let mut v: Vec<_> = x.iter().map(|(i, _)| (i.m_digits.clone(), i.j)).collect();
        v.sort();
        v.dedup();
        v
    };
    Ok(keys(&out).iter().all(|k| keys(e).contains(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use crate::kozyrev::{materialize, KozyrevIndex};

    type C = Cyclotomic;

    fn w() -> Window {
        Window::new(-4, 4, 1).unwrap()
    }

    #[test]
    fn ladder_actions() {
        let p = 3;
        let e = WaveletExpansion::<C>::unit(p, w(), KozyrevIndex::new(0, &[1], 2)).unwrap();
        let r = j_op(1, &e).unwrap();
        assert_eq!(r.coefficient(&KozyrevIndex::new(1, &[1], 2)), C::from_integer(1));
        let e = WaveletExpansion::<C>::unit(p, w(), KozyrevIndex::new(-1, &[], 1)).unwrap();
        let r = ell(2, &e).unwrap();
        assert_eq!(r.coefficient(&KozyrevIndex::new(1, &[], 1)), C::from_integer(2));
        assert_eq!(ell(0, &e).unwrap(), log_vladimirov(&e).unwrap());
        let top = WaveletExpansion::<C>::unit(p, w(), KozyrevIndex::new(4, &[], 1)).unwrap();
        assert!(matches!(ladder(1, &top), Err(Error::WindowClip { .. })));
    }

    #[test]
    fn log_annihilates_n_equal_one() {
        let e = WaveletExpansion::<C>::unit(2, w(), KozyrevIndex::new(1, &[], 1)).unwrap();
        assert!(log_vladimirov(&e).unwrap().is_empty());
    }

    #[test]
    fn reach_of_words() {
        assert_eq!(BasisOperator::<C>::ell(3).reach(), 3);
        let c = OperatorSum::commutator(&BasisOperator::<C>::ell(2), &BasisOperator::<C>::ell(-3));
        assert_eq!(c.reach(), 3);
    }

    #[test]
    fn kernel_on_mother_wavelet() {
        // p = 2, α = 1: eigenvalue p^(α(1−0)) = 2
        let f = materialize::<C>(2, &KozyrevIndex::mother(), 0).unwrap();
        let d = vladimirov_kernel_table(1.0, &f, 0, 1).unwrap();
        for (i, v) in d.entries() {
            let expect = f.value(i).to_complex() * 2.0;
            assert!((v - expect).norm() < 1e-12);
        }
        assert!(matches!(vladimirov_kernel(0.0, &f, &f.cell(0)), Err(Error::UnsupportedDomain(_))));
    }

    #[test]
    fn kernel_of_constant_is_tail_dominated() {
        let p = 3;
        let alpha = 1.0;
        let f = LocallyConstantFn::<C>::ball_indicator(p, 0).unwrap();
        let v = vladimirov_kernel(alpha, &f, &f.cell(0)).unwrap();
        let pf = p as f64;
        let tail: f64 = (1..200).map(|k| (1.0 - 1.0 / pf) * pf.powf(-(k as f64) * alpha)).sum();
        assert!((v.re - kernel_constant(p, alpha) * -tail).abs() < 1e-12);
    }

    #[test]
    fn exact_deformed_needs_half_integer_alpha() {
        assert!(deformed_relations::<C>(2, &Exponent::integer(1)).is_ok());
        assert!(matches!(deformed_relations::<C>(2, &Exponent::real(0.3)), Err(Error::Inexact(_))));
    }
}
