pub mod cyclotomic;
pub mod error;
pub mod function_space;
pub mod io;
pub mod kozyrev;
pub mod padic;
pub mod phase;
pub mod real_side;
pub mod scalar;
pub mod spectral;

pub use cyclotomic::Cyclotomic;
pub use error::{Error, Result};
pub use function_space::{enumerate_cells, CosetCell, LocallyConstantFn};
pub use kozyrev::{analyze, evaluate, materialize, synthesize, KozyrevIndex, WaveletExpansion, Window};
pub use padic::{AffineElement, PAdicNumber};
pub use phase::RationalPhase;
pub use real_side::{Convention, HaarIndex, RealStepFn};
pub use scalar::{Exponent, Scalar};
pub use spectral::{BasisOperator, OperatorSum};

use num_complex::{Complex32, Complex64};

/// Exact functions over the cyclotomic field.
pub type ExactFn = LocallyConstantFn<Cyclotomic>;
pub type FloatFn = LocallyConstantFn<Complex64>;
pub type Float32Fn = LocallyConstantFn<Complex32>;
pub type ExactExpansion = WaveletExpansion<Cyclotomic>;
pub type FloatExpansion = WaveletExpansion<Complex64>;
