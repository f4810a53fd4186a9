//! Numerical laboratory for Thompson's group F acting on the interval.
//!
//! - [`exact`]: dyadic rationals, GA(Q₂) normal forms and piecewise linear elements of F.
//! - [`embed`]: the smooth re-embedding `θ_f` and condition (b) witnesses.
//! - [`holder`]: `C^{1,δ}` norms, `p_δ`, `r_δ` and the averaging operator `π_δ` over balls of F.
//! - [`special`]: the kernel `H`, the function `v₁` and the integrals `T_n`.
//! - [`partitions`]: the densities `u_n` on partitions and their samplers.
//! - [`wiener`]: Brownian paths, the maps `A` and `B`, and moment estimators under `ν`.
//! - [`schwarzian`]: Schwarzian derivatives and the concentration and ratio-product checks.
//! - [`stitch`]: the stitching map `Q_n` and the functionals `L_{δ,n}`.
//! - [`suite`]: every check as a named, seeded, serializable report.

pub mod embed;
pub mod exact;
pub mod holder;
pub mod partitions;
pub mod quad;
pub mod schwarzian;
pub mod special;
pub mod stitch;
pub mod suite;
pub mod wiener;
