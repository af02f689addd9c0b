//! Exact elements of Q/Z, read as the roots of unity `exp(2πi·num/den)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A reduced fraction `num/den` with `0 <= num < den`, standing for
/// `exp(2πi·num/den)`. Zero is `0/1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalPhase {
    num: u64,
    den: u64,
}

impl RationalPhase {
    pub const ZERO: RationalPhase = RationalPhase { num: 0, den: 1 };

    /// Reduces `num/den` modulo 1. Panics on a zero denominator.
    pub fn new(num: i128, den: u128) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let d = den as i128;
        let r = num.rem_euclid(d) as u128;
        let g = r.gcd(&den);
        let (num, den) = (r / g, den / g);
        RationalPhase {
            num: u64::try_from(num).expect("phase numerator overflows u64"),
            den: u64::try_from(den).expect("phase denominator overflows u64"),
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `k · self` in Q/Z.
    pub fn times(&self, k: i64) -> Self {
        RationalPhase::new(self.num as i128 * k as i128, self.den as u128)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `(cos 2πθ, sin 2πθ)`, with the quarter turns returned exactly.
    pub fn cos_sin(&self) -> (f64, f64) {
        match (self.num, self.den) {
            (0, _) => (1.0, 0.0),
            (1, 2) => (-1.0, 0.0),
            (1, 4) => (0.0, 1.0),
            (3, 4) => (0.0, -1.0),
            _ => {
                // reduce to (-1/2, 1/2] before scaling for accuracy
                let mut x = self.to_f64();
                if x > 0.5 {
                    x -= 1.0;
                }
                let t = std::f64::consts::TAU * x;
                (t.cos(), t.sin())
            }
        }
    }
}

impl Default for RationalPhase {
    fn default() -> Self {
        RationalPhase::ZERO
    }
}

impl Add for RationalPhase {
    type Output = RationalPhase;
    fn add(self, rhs: RationalPhase) -> RationalPhase {
        let l = (self.den as u128).lcm(&(rhs.den as u128));
        let a = self.num as i128 * (l / self.den as u128) as i128;
        let b = rhs.num as i128 * (l / rhs.den as u128) as i128;
        RationalPhase::new(a + b, l)
    }
}

impl Neg for RationalPhase {
    type Output = RationalPhase;
    fn neg(self) -> RationalPhase {
        RationalPhase::new(-(self.num as i128), self.den as u128)
    }
}

impl Sub for RationalPhase {
    type Output = RationalPhase;
    fn sub(self, rhs: RationalPhase) -> RationalPhase {
        self + (-rhs)
    }
}

impl fmt::Debug for RationalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e(2πi·{}/{})", self.num, self.den)
    }
}

impl fmt::Display for RationalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}
