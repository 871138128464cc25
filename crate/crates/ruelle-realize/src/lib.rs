//! # ruelle-realize
//!
//! Computing with rational matrix-valued functions through state-space
//! realizations `R(z) = D + C(zI − A)⁻¹B`, aimed at wavelet filter banks
//! and their transfer (Ruelle) operators.
//!
//! The crate covers five connected layers:
//!
//! * **Realization algebra** ([`realization`]) — evaluation, similarity,
//!   cascade products in one variable, products with one variable per
//!   factor (block-upper-triangular state matrices), Kalman minimality
//!   reduction, and the observability Gramian solving the Stein equation
//!   `Γ − A*ΓA = C*C`.
//! * **Autocorrelation** ([`markov`]) — Markov parameters `h_k = CA^{k−1}B`
//!   and the Fourier coefficients `c_n` of `|m|²` on the circle, in closed
//!   Gramian form and by truncated convolution, with the Cayley–Hamilton
//!   recursion and geometric decay checks.
//! * **Transfer operator** ([`ruelle`]) — the slanted sparse matrix
//!   `r_{ℓ,k} = c_{Nℓ−k}/N`, its action on exponentially weighted sequence
//!   spaces, both trace formulas, and a continuity certificate.
//! * **Wavelet filters** ([`wavelet`]) — `N`-band filters
//!   `M(z) = Q·U(z^N)·Δ(z)·V` with `U` a Blaschke–Potapov product,
//!   normalized so `M(1) = I`, plus low-pass symbol extraction in both the
//!   `unit-dc` and `paper-polyphase` conventions.
//! * **Infinite products** ([`infinite_product`]) — block-Toeplitz symbol
//!   `A + zB(I−zD)⁻¹C` with finite sections, certified products along
//!   summable point sequences, the father-wavelet cascade
//!   `φ̂(w) = Π_k m(e^{2πiw/N^k})`, and L² certificates.
//!
//! Everything runs on a small self-contained dense complex kernel
//! ([`linalg`]); all values are immutable after construction and the
//! functions are pure, so the whole API is safe to drive from multiple
//! threads.
//!
//! ## Example
//!
//! ```
//! use ruelle_realize::prelude::*;
//!
//! // The Haar low-pass symbol m(z) = (1 + z⁻¹)/2 as (A,B,C,D) = (0,1,1/2,1/2).
//! let m = preset_haar();
//! assert_eq!(m.state_dim(), 1);
//!
//! // Gramian, Y and autocorrelation coefficients.
//! let gamma = observability_gramian(&m)?;
//! let c = autocorrelation_closed(&m, 4)?;
//! assert!((c.get_scalar(0)? .re - 0.5).abs() < 1e-14);
//! assert!((c.get_scalar(1)? .re - 0.25).abs() < 1e-14);
//!
//! // Both trace formulas of the Ruelle operator agree for wavelet symbols.
//! let ts = trace_spectral(&m, 2)?;
//! let tr = trace_realization(&m, 2)?;
//! assert!((ts - tr).abs() < 1e-12);
//!
//! // The cascade product evaluates the father-wavelet Fourier transform.
//! let hat = father_hat(&m, 2, 0.5, 1e-10)?;
//! assert!((hat.norm() - 2.0 / std::f64::consts::PI).abs() < 1e-8);
//! # let _ = gamma;
//! # Ok::<(), ruelle_realize::Error>(())
//! ```
//!
//! The `examples/` directory walks through each capability; the
//! `ruelle-realize` binary exposes the same operations as batch
//! subcommands over JSON/CSV files.

pub mod cli;
pub mod error;
pub mod infinite_product;
pub mod linalg;
pub mod markov;
pub mod realization;
pub mod ruelle;
pub mod wavelet;

pub use error::{Error, Result};

/// One-stop imports for the common surface.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::infinite_product::{
        father_hat, l2_norm_estimate, partial_product_l2, product_along_points, toeplitz_norm_estimate,
        toeplitz_section, toeplitz_symbol_eval, L2Report, ToeplitzSection,
    };
    pub use crate::linalg::{
        cx, mat_mul, solve, spectral_radius, two_norm_estimate, ComplexMatrix, SpectralRadius,
    };
    pub use crate::markov::{
        autocorrelation_closed, autocorrelation_convolution, ch_recursion, decay_check,
        default_kcut, markov_parameters, CoefficientSequence, DecayReport,
    };
    pub use crate::realization::{
        eval, eval_multivar, minimize, multivar_product, observability_gramian, product,
        similarity, y_vector, MultiVarRealization, Realization,
    };
    pub use crate::ruelle::{
        apply, apply_pointwise, continuity_certificate, slanted_matrix, trace_realization,
        trace_spectral, weighted_norm, NormOrder, SlantedOperator, WeightedSequence, Window,
    };
    pub use crate::wavelet::{
        assemble_inner, build_filter, delta_eval, dft_matrix, preset_daubechies4, preset_haar,
        unit_circle_grid, BlaschkeFactor, Convention, RationalInner, WaveletFilter,
    };
}
