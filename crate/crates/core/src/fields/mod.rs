//! Periodic grid, spectral transforms, calculus, norms and z-parity handling.

mod calculus;
pub mod fft;
mod field;
mod grid;
mod norms;
pub mod snapshot;

pub use calculus::{dealias, dealias_in_place, dealiased_product, derive, derive_spectrum, weighted_laplacian, Axis};
pub use field::{fft_forward, fft_inverse, Field, Parity, Spectrum};
pub use grid::{signed_mode, SpectralGrid, Wavenumbers};
pub use norms::{norms, sobolev_sq, spectral_norms, NormReport};
