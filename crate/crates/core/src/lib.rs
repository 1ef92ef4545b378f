//! Fractional Sobolev–Slobodeckij seminorms and Moser–Trudinger functionals
//! on the real line in the critical regime `s·p = 1`.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadrature`] – Gauss–Legendre and adaptive Gauss–Kronrod integration,
//!   deterministic reductions.
//! * [`constants`] – Γ, the Dirichlet lambda series, `γ_s` and `α*`.
//! * [`function_models`] – the Moser family `u_ε` and piecewise-linear grid
//!   functions, with `Lᵖ` and full-norm evaluation.
//! * [`seminorm`] – Gagliardo seminorms (cell-pair exact, radial), the
//!   four-part decomposition of `[u_ε]^p`, rate scans and inequality probes.
//! * [`rearrangement`] – discrete symmetric decreasing rearrangement.
//! * [`mt_functional`] – exponential functionals, sharpness scans, the
//!   truncation/rescaling construction on the whole line, extremal search.
//! * [`report`] – tabular scan output as CSV or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod constants;
pub mod error;
pub mod function_models;
pub mod linalg;
pub mod mt_functional;
pub mod quadrature;
pub mod rearrangement;
pub mod report;
pub mod seminorm;

pub use constants::{
    alpha_star, dirichlet_lambda, gamma_fn, gamma_s, ConstantsReport, GammaMethod, Params,
};
pub use error::{Error, Result};
pub use function_models::{
    full_norm_p, lp_norm_p, moser_eval, sample_to_grid, FunctionModel, GridFunction, MoserFunction,
};
pub use mt_functional::{
    concentration_fn_check, extremal_search, mt_integral, ruf_split, sharpness_scan, truncated_exp,
    BuiltinWeight, Domain, ExtremalOptions, ExtremalResult, MTConfig, Normalization, RufSplit,
    Variant, Weight,
};
pub use quadrature::{Estimate, QuadratureSpec};
pub use rearrangement::{equimeasurability_check, polya_szego_gap, rearrange, RearrangedPair};
pub use report::{Cell, OutputFormat, ScanReport};
pub use seminorm::{
    embedding_ratio, gagliardo_p_pl, gagliardo_p_radial, moser_decomposition, rate_check,
    tail_bound_check, DecompositionReport, RateMode,
};
