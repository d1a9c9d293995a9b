//! Estimators over ensembles of spectra: radial density, local unfolding,
//! k-th neighbour spacing laws and the all-pairs two-point function.

mod compare;
mod density;
mod spacing;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{argument, Result};
use crate::rng;

pub use compare::{ks_distance, ks_two_sample, l1_relative_deviation, SpacingLaw};
pub use density::{radial_density, radial_density_in, DensitySource, EmpiricalDensity};
pub use spacing::{
    neighbor_curves, r2_estimate, r2_estimate_with, spacing_distribution, spacing_samples, unfold_spacing, BinSpec,
    CorrelationCurve, CurveKind, EdgeCorrection, SpacingSamples,
};

/// Where a spectrum came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    McSampled { seed: u64, chain: u64, sweep: u64 },
    QmapDiagonalized { model: String, member: u64 },
    Synthetic { label: String, seed: u64 },
}

/// One configuration of `N >= 2` complex eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub provenance: Provenance,
    pub params: Vec<(String, f64)>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<Complex64>, provenance: Provenance, params: Vec<(String, f64)>) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(argument(format!("a spectrum needs at least 2 eigenvalues, got {}", eigenvalues.len())));
        }
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(argument("spectrum contains non-finite eigenvalues"));
        }
        Ok(Self {
            eigenvalues,
            provenance,
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().map(|z| z.norm())
    }
}

/// `n` independent uniform points in the disk `|z| <= radius`: the
/// uncorrelated control with density `n / (π radius²)`.
pub fn poisson_spectrum(n: usize, radius: f64, seed: u64, member: u64) -> Result<Spectrum> {
    let mut rng = rng::stream(seed, member);
    let points = (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, 2.0 * std::f64::consts::PI * rng.random::<f64>())
        })
        .collect();
    Spectrum::new(
        points,
        Provenance::Synthetic {
            label: "poisson".into(),
            seed,
        },
        vec![("radius".into(), radius)],
    )
}
