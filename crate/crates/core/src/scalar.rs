//! The amplitude type every function table, expansion and operator is generic
//! over: exact [`Cyclotomic`] values or floating `Complex<f32>` / `Complex<f64>`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

use crate::cyclotomic::Cyclotomic;
use crate::phase::RationalPhase;

/// Exponent of a power of `p`, e.g. the order `α` of `D^α`.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Rational(BigRational),
    Complex(Complex64),
}

impl Exponent {
    pub fn integer(k: i64) -> Self {
        Exponent::Rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(x: f64) -> Self {
        Exponent::Complex(Complex64::new(x, 0.0))
    }

    /// Parses `"1"`, `"-3/2"` as rationals and anything else float-like as a real.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().ok()?;
            let b: i64 = b.trim().parse().ok()?;
            if b == 0 {
                return None;
            }
            return Some(Exponent::ratio(a, b));
        }
        if let Ok(k) = s.parse::<i64>() {
            return Some(Exponent::integer(k));
        }
        s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Exponent::real)
    }

    pub fn times(&self, k: i64) -> Self {
        match self {
            Exponent::Rational(q) => Exponent::Rational(q * BigRational::from_integer(BigInt::from(k))),
            Exponent::Complex(c) => Exponent::Complex(c * k as f64),
        }
    }

    pub fn times_ratio(&self, num: i64, den: i64) -> Self {
        match self {
            Exponent::Rational(q) => {
                Exponent::Rational(q * BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            Exponent::Complex(c) => Exponent::Complex(c * (num as f64 / den as f64)),
        }
    }

    pub fn plus(&self, other: &Exponent) -> Self {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => Exponent::Rational(a + b),
            _ => Exponent::Complex(self.to_complex() + other.to_complex()),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Exponent::Rational(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            Exponent::Complex(c) => *c,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exponent::Rational(q) => q.is_zero(),
            Exponent::Complex(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    /// `2·self` as an integer, when it is one.
    pub fn doubled_integer(&self) -> Option<i64> {
        match self {
            Exponent::Rational(q) => {
                let d = q * BigRational::from_integer(BigInt::from(2));
                d.is_integer().then(|| d.to_integer().to_i64()).flatten()
            }
            Exponent::Complex(_) => None,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Rational(q) => write!(f, "{q}"),
            Exponent::Complex(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Exponent::Complex(c) => write!(f, "{c}"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether equality is exact (tolerances are ignored).
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    /// `exp(2πiφ)`.
    fn phase(phase: RationalPhase) -> Self;

    /// `p^(e/2)`.
    fn sqrt_p_power(p: u64, e: i64) -> Self;

    /// `p^exponent`, or `None` when this scalar type cannot hold it.
    fn p_power(p: u64, exponent: &Exponent) -> Option<Self>;

    fn from_cyclotomic(z: &Cyclotomic) -> Self;

    fn from_complex(z: Complex64) -> Option<Self>;

    fn as_cyclotomic(&self) -> Option<&Cyclotomic> {
        None
    }

    fn conj(&self) -> Self;

    fn to_complex(&self) -> Complex64;

    fn mul_phase(&self, phase: RationalPhase) -> Self {
        self.clone() * Self::phase(phase)
    }

    /// Same value in a compact representation; keeps long exact sums from
    /// accumulating cancelling terms.
    fn normalize(self) -> Self {
        self
    }

    /// Equality within `tol` in floating mode, exact equality otherwise.
    fn near(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_complex() - other.to_complex()).norm() <= tol
        }
    }

    /// Exact zero test, or `|z| <= tol` in floating mode.
    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_complex().norm() <= tol
        }
    }
}

impl Scalar for Cyclotomic {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        Cyclotomic::from_rational(q.clone())
    }

    fn phase(phase: RationalPhase) -> Self {
        Cyclotomic::root_of_unity(phase)
    }

    fn sqrt_p_power(p: u64, e: i64) -> Self {
        Cyclotomic::sqrt_p_power(p, e)
    }

    fn p_power(p: u64, exponent: &Exponent) -> Option<Self> {
        exponent.doubled_integer().map(|e| Cyclotomic::sqrt_p_power(p, e))
    }

    fn from_cyclotomic(z: &Cyclotomic) -> Self {
        z.clone()
    }

    fn from_complex(_: Complex64) -> Option<Self> {
        None
    }

    fn as_cyclotomic(&self) -> Option<&Cyclotomic> {
        Some(self)
    }

    fn conj(&self) -> Self {
        Cyclotomic::conj(self)
    }

    fn to_complex(&self) -> Complex64 {
        Cyclotomic::to_complex(self)
    }

    fn mul_phase(&self, phase: RationalPhase) -> Self {
        Cyclotomic::mul_phase(self, phase)
    }

    fn normalize(self) -> Self {
        if self.term_count() <= 1 {
            self
        } else {
            self.canonical()
        }
    }
}

fn cast<T: FromPrimitive>(x: f64) -> T {
    T::from_f64(x).expect("float conversion")
}

impl<T> Scalar for Complex<T>
where
    T: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static,
{
    const EXACT: bool = false;

    fn from_rational(q: &BigRational) -> Self {
        Complex::new(cast(q.to_f64().unwrap_or(f64::NAN)), T::zero())
    }

    fn phase(phase: RationalPhase) -> Self {
        let (c, s) = phase.cos_sin();
        Complex::new(cast(c), cast(s))
    }

    fn sqrt_p_power(p: u64, e: i64) -> Self {
        Complex::new(cast((p as f64).powf(e as f64 / 2.0)), T::zero())
    }

    fn p_power(p: u64, exponent: &Exponent) -> Option<Self> {
        let z = match exponent {
            Exponent::Rational(q) => {
                Complex64::new((p as f64).powf(q.to_f64().unwrap_or(f64::NAN)), 0.0)
            }
            Exponent::Complex(a) => (a * (p as f64).ln()).exp(),
        };
        Self::from_complex(z)
    }

    fn from_cyclotomic(z: &Cyclotomic) -> Self {
        let c = z.to_complex();
        Complex::new(cast(c.re), cast(c.im))
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        Some(Complex::new(cast(z.re), cast(z.im)))
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}
