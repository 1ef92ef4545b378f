//! Gagliardo seminorms in the critical regime, `[u]^p = ∫∫ |u(x)−u(y)|^p |x−y|^{−2} dx dy`.

mod moser;
pub(crate) mod piecewise;
mod probes;
mod radial;

pub use moser::{moser_decomposition, DecompositionReport};
pub use piecewise::{gagliardo_p_pl, QuadraticSeminorm};
pub use probes::{embedding_ratio, rate_check, tail_bound_check, RateMode, TailBoundReport};
pub use radial::gagliardo_p_radial;

pub(crate) use probes::{validate_eps_grid, validate_even_nonincreasing};
