//! Hyperbolic surfaces of infinite type built from pants decompositions.
//!
//! Surfaces are described by a lazily generated pants graph plus
//! Fenchel–Nielsen lengths and twists. Closed curves are realized through an
//! explicit `SL(2,ℝ)` holonomy of a finite window of cells, which gives exact
//! geodesic lengths; the `metrics` module turns those into length-spectrum
//! distance estimates.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod curve;
pub mod error;
pub mod holonomy;
pub mod hyp;
pub mod metrics;
pub mod surface;

pub use error::{Error, Result};
