//! Compressible Navier–Stokes–Fourier flow with a hybrid mono-atomic /
//! radiative equation of state, and the inviscid-limit machinery around it:
//! exact rarefaction waves, a planar finite-volume solver, relative and
//! ballistic energy functionals, a certified thermodynamic inequality, and
//! a convergence harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod eos;
pub mod rarefaction;
pub mod root;
pub mod solver;
pub mod energy;
pub mod harness;
pub mod inequality;
