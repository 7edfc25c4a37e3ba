//! Numerical calculus on time scales.
//!
//! A time scale is a closed subset of the reals. This crate works with time
//! scales that have a finite description: a window made of dense intervals and
//! isolated points, continued above by a lazily generated tail (continuous,
//! uniformly spaced or geometric). On top of that it provides Hilger
//! complex-plane arithmetic, delta derivatives and integrals, the time-scale
//! exponential and generalized monomials, the Laplace transform, and a set of
//! numerical checks around null functions and Lerch-type uniqueness.

pub mod calculus;
pub mod error;
pub mod exponential;
pub mod fixtures;
pub mod hilger;
pub mod laplace;
pub mod lerch;
mod quadrature;
pub mod timescale;
pub mod verify;

pub use num_complex::Complex64;

pub use calculus::{
    cumulative, delta_derivative, delta_integral, improper_delta_integral,
    integration_by_parts_check, sigma_shift_residual, CumulativeTable, GridFunction,
    QuadratureConfig, TailBound, TransformResult,
};
pub use error::{Error, Result};
pub use exponential::{
    exp_const, exp_ominus, exp_ts, lambda_fn, lambda_series, monomial, scaled_exp_decay,
    taylor_lower_bound_check, ExpValue, ExponentArg, MonomialTable,
};
pub use hilger::{
    cdot, cminus, cneg, cplus, cylinder, hilger_im, hilger_re, in_region, is_pos_regressive,
    is_regressive, HilgerNumber, RegionSpec,
};
pub use laplace::{convergence_region, laplace, modulated_laplace, DecayEnvelope, TransformOptions};
pub use lerch::{
    char_approx, chi_shift_check, constant_graininess_reduce, lattice_sweep, lerch_verify,
    lerch_verify_pair, modulated_null_check, null_check, LatticeSpec, LerchVerdict, NullReport,
    NullVerdict,
};
pub use timescale::{Piece, Segment, Tail, TimePoint, TimeScale};
