//! Closed-form predictions for normal matrix ensembles.
//!
//! * [`density`]: large-N spectral density, ring radii, hard-wall profiles.
//! * [`kernel`]: finite-N orthogonal-polynomial kernel and determinantal
//!   correlations, plus the large-N kernel.
//! * [`universal`]: the unfolded kernel, the two-point function of the
//!   unfolded separation and the nearest-neighbour spacing law.

pub mod density;
pub mod kernel;
pub mod universal;

pub use density::{bounded_density, density_r1, ring_radii, PointMass, RadialProfile, RingDensity, RingRadii};
pub use kernel::{finite_n_norms, kernel_finite_n, kernel_large_n, rn_correlation, FiniteNKernel};
pub use universal::{gap_probability, p0_cdf, p0_spacing, r2_universal, unfolded_correlation, unfolded_kernel, P0_DEFAULT_TERMS};
