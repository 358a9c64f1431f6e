//! Norm-efficient cycles in group homology via Følner averaging.
//!
//! The library works in the simplicial (bar) complex of a finitely generated
//! group `Γ` with a distinguished amenable normal subgroup `N ⊴ Γ`. Chains are
//! finite rational combinations of canonical orbit representatives of
//! `(n+1)`-tuples; all arithmetic is exact. The main tools are
//!
//! * averaging maps `ψ^F` over finite subsets `F ⊆ N`, which are chain maps of
//!   operator norm ≤ 1 that preserve the homology class,
//! * the push-forward estimate `|ψ^F(c)|₁ ≤ |c̄|₁ + ε + K·|∂_S F|/|F|` with
//!   explicit constants extracted from a σ-decomposition of the chain,
//! * an exact-rational LP oracle for ℓ¹-minimal fillings and seminorm upper
//!   bounds over truncated supports,
//! * the recipe that turns a cycle, a filling of its push-forward and a Følner
//!   sequence into cycles of near-minimal ℓ¹-norm, with per-step certificates.
//!
//! Everything is deterministic: elements are ordered lexicographically on
//! coordinates and all reported data is reproducible byte for byte.

pub mod chain;
pub mod cocycle;
pub mod error;
pub mod estimate;
pub mod folner;
pub mod group;
pub mod pipeline;
pub mod rational;
pub mod seminorm;
pub mod simplex;
pub mod twisted;

pub use chain::{Chain, Tuple};
pub use cocycle::Cocycle;
pub use error::{Error, Result};
pub use estimate::{epsilon_split, estimate_bound, sigma_decompose, EstimateCertificate, SigmaDecomposition};
pub use folner::{average, s_boundary, transfer_finite, AveragingReport, FolnerKind, FolnerSequence, FolnerSet};
pub use group::{AmenableExtension, GroupDescriptor, GroupElement, NormalSpec};
pub use rational::Rat;
pub use seminorm::{fill_boundary, seminorm_upper_bound, SeminormBound, Truncation};
pub use twisted::{coinvariant_seminorm, twisted_average, twisted_pushforward, CoinvariantChain, NormedModule, TwistedChain};
