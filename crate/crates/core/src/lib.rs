//! Link-level Monte-Carlo simulation of an IRS-aided multi-user MIMO downlink.
//!
//! A base station with `N_b` antennas serves `K` single-antenna users, helped
//! by an intelligent reflecting surface (IRS) of `N` passive elements. The
//! crate draws channel realizations ([`channel`]), jointly designs the BS
//! beamformer and the IRS phase profile by alternating optimization
//! ([`reflect`]), evaluates the sum spectral efficiency of TDMA, FDMA and NOMA
//! with and without the surface ([`schemes`]), and aggregates many drops into
//! CDFs and percentile summaries ([`montecarlo`]).
//!
//! ```
//! use irsma::montecarlo::{run_campaign, SimConfig};
//!
//! let cfg = SimConfig { drops: 20, ..SimConfig::default() };
//! let result = run_campaign(&cfg).unwrap();
//! for summary in &result.schemes {
//!     println!("{:>10}  {:6.2}  {:6.2}", summary.scheme, summary.likely95, summary.likely50);
//! }
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub mod bundle;
pub mod channel;
pub mod config;
mod error;
pub mod montecarlo;
pub mod reflect;
pub mod schemes;

pub use error::{Error, Result};

/// Complex column vector.
pub type CVec = Array1<Complex64>;
/// Complex matrix, row-major `rows x cols`.
pub type CMat = Array2<Complex64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channel-model.md")]
    mod channel_model {}
    #[doc = include_str!("../../../book/src/reflection.md")]
    mod reflection {}
    #[doc = include_str!("../../../book/src/multiple-access.md")]
    mod multiple_access {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
