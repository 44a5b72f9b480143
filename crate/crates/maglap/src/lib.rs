//! Eigenvalues of the planar magnetic Dirichlet Laplacian and shape
//! optimization of its spectrum.
//!
//! The operator is (-i grad + A)^2 on a bounded domain with Dirichlet
//! boundary conditions, where A = (B/2)(-y, x) generates a constant
//! magnetic field B > 0. The crate provides:
//!
//! * closed-form spectra on disks ([`diskspec`]),
//! * a method-of-fundamental-solutions eigensolver with the subspace
//!   angle technique on star-shaped Fourier domains ([`mfs`], [`geometry`]),
//! * Hadamard shape gradients and a gradient descent optimizer that
//!   minimizes the n-th eigenvalue among unit-area domains ([`shapegrad`],
//!   [`optimizer`]),
//! * optimization over disjoint unions of disks and a Wolf-Keller style
//!   combiner for disconnected minimizers ([`disksopt`]).

extern crate openblas_src;

pub mod cli;
pub mod diskspec;
pub mod disksopt;
pub mod error;
pub mod geometry;
pub mod mfs;
pub mod optimizer;
pub mod shapegrad;
pub mod specfun;

pub use error::{Error, Result};
