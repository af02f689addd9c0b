//! Fourier transform on table functions.
//!
//! For `f` in frame `(M, K)` and `ω` in cell `i'` of frame `(K, M)`, the
//! character `χ(−ωξ)` is constant on every cell of `f` and equals
//! `e(−i·i'/N)` with `N = p^(M+K)`, so the transform is exactly a length-`N`
//! DFT scaled by the cell measure. Outside `|ω|_p ≤ p^K` the transform
//! vanishes (`f` is invariant under `p^K Z_p`), so the output frame loses
//! nothing.

use super::{cell_count, LocallyConstantFn};
use crate::error::Result;
use crate::padic::p_pow_rational;
use crate::phase::RationalPhase;
use crate::scalar::Scalar;

/// `X[k] = Σ_n e(sign·n·k/N) x[n]` for `N = p^L`, radix-p decimation in time.
pub fn dft_p_power<S: Scalar>(x: &[S], p: u64, sign: i64) -> Vec<S> {
    let n = x.len();
    if n <= 1 {
        return x.to_vec();
    }
    let pu = p as usize;
    assert!(n % pu == 0, "length {n} is not a power of {p}");
    let sub = n / pu;
    let parts: Vec<Vec<S>> = (0..pu)
        .map(|r| {
            let slice: Vec<S> = x.iter().skip(r).step_by(pu).cloned().collect();
            dft_p_power(&slice, p, sign)
        })
        .collect();
    (0..n)
        .map(|k| {
            parts
                .iter()
                .enumerate()
                .fold(S::zero(), |acc, (r, part)| {
                    let v = &part[k % sub];
                    if v.is_zero() {
                        return acc;
                    }
                    let tw = RationalPhase::new(sign as i128 * (r * k) as i128, n as u128);
                    acc + v.mul_phase(tw)
                })
                .normalize()
        })
        .collect()
}

impl<S: Scalar> LocallyConstantFn<S> {
    fn dense(&self) -> Result<Vec<S>> {
        let n = cell_count(self.prime, self.support_exponent, self.resolution_exponent)?;
        let mut v = vec![S::zero(); n as usize];
        for (&i, x) in &self.table {
            v[i as usize] = x.clone();
        }
        Ok(v)
    }

    fn transform(&self, sign: i64) -> Result<Self> {
        let (m, k) = (self.support_exponent, self.resolution_exponent);
        let x = self.dense()?;
        let scale = S::from_rational(&p_pow_rational(self.prime, -k));
        let y = dft_p_power(&x, self.prime, sign);
        Self::from_table(self.prime, k, m, y.into_iter().enumerate().map(|(i, v)| (i as u64, v * scale.clone())))
    }

    /// `f̃(ω) = ∫ χ(−ωξ) f(ξ) dξ`, in frame `(K, M)`.
    pub fn fourier(&self) -> Result<Self> {
        self.transform(-1)
    }

    /// `f(ξ) = ∫ χ(ωξ) f̃(ω) dω`, in frame `(K, M)`.
    pub fn inverse_fourier(&self) -> Result<Self> {
        self.transform(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use num_complex::Complex64;

    fn naive(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n).fold(Complex64::new(0.0, 0.0), |acc, j| {
                    let t = sign * std::f64::consts::TAU * (j * k) as f64 / n as f64;
                    acc + x[j] * Complex64::new(t.cos(), t.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for (p, len) in [(2u64, 8usize), (3, 27), (5, 25)] {
            let x: Vec<Complex64> = (0..len).map(|i| Complex64::new(i as f64 * 0.5 - 1.0, (i * i % 7) as f64)).collect();
            let fast = dft_p_power(&x, p, -1);
            let slow = naive(&x, -1.0);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn indicator_of_unit_ball_is_self_dual() {
        for p in [2u64, 3, 5] {
            let f = LocallyConstantFn::<Cyclotomic>::ball_indicator(p, 0).unwrap();
            assert_eq!(f.fourier().unwrap(), f);
            // same statement at a finer frame
            let g = f.reframe(1, 1).unwrap();
            let gh = g.fourier().unwrap();
            assert!(gh.pointwise_eq(&f, 0.0).unwrap());
        }
    }

    #[test]
    fn zero_transforms_to_zero() {
        let f = LocallyConstantFn::<Cyclotomic>::zero(3, 1, 1).unwrap();
        assert!(f.fourier().unwrap().is_zero());
    }
}
