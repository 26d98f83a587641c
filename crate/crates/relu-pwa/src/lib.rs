//! Conversions between three equivalent views of a continuous piecewise-affine
//! function: a ReLU feedforward network, an explicit PWA function over a
//! polyhedral partition, and a multiparametric linear program whose optimizer
//! reproduces it.
//!
//! The crate is organized around that triangle:
//!
//! * [`relu_net`] — network representation, evaluation, activation patterns,
//!   and the exact local affine map at a point.
//! * [`region_analysis`] — the PWA function realized by a net on a bounding
//!   box, via exact layer-recursive enumeration or sample-based identification.
//! * [`bounds`] — closed-form region-count bounds for a given architecture.
//! * [`pwa_core`] — PWA functions, max-affine functions, and 1-D
//!   difference-of-convex decomposition.
//! * [`synthesis`] — exact ReLU architectures from max-affine or DC data.
//! * [`inverse_mplp`] — the mp-LP whose explicit solution reproduces a PWA
//!   function, verified pointwise.
//! * [`polyhedra`] and [`linalg_lp`] — halfspace polyhedra and the dense
//!   simplex solver underneath everything.
//!
//! See the crate examples for one runnable program per capability, and the
//! `relu-pwa` binary for the file-based pipeline.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod inverse_mplp;
pub mod io;
pub mod linalg_lp;
pub mod polyhedra;
pub mod pwa_core;
pub mod region_analysis;
pub mod relu_net;
pub mod synthesis;

pub use error::{Error, Result};
pub use polyhedra::{BoundingBox, Polyhedron};
pub use pwa_core::{DCPair, MaxAffine, PWA1D, PWAFunction};
pub use relu_net::{ActivationPattern, Layer, LocalAffine, ReLUNet};
