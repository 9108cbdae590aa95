//! Littlewood-Paley numerics for Besov spaces with logarithmic smoothness
//! `B^{s,b}_{p,q}` on the periodic grid, together with the pointwise
//! multiplier criteria, paraproducts and test-function constructions used to
//! probe them.

pub mod criteria;
pub mod cubes;
pub mod error;
pub mod experiments;
pub mod gallery;
pub mod exponent;
pub mod grid;
pub mod io;
pub mod norms;
pub mod paraproduct;
pub mod par;
pub mod partition;

pub use cubes::{cube_mean_power, cubes_at_level, sup_over_cubes, CubeMeans, DyadicCube};
pub use error::{Error, Result};
pub use exponent::LpExponent;
pub use grid::{lp_norm, FrequencyField, GridSpec, SampledFunction};
pub use partition::{
    check_partition, partial_sum, peetre_maximal, project, PartitionCheck, DyadicPartition, PartitionKind, PeetreWindow, SpectralDecomposition,
};
