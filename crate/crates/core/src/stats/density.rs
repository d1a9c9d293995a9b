use std::f64::consts::PI;

use crate::analytic::{RadialProfile, RingDensity};
use crate::error::{argument, Result};
use crate::par;
use crate::potentials::Potential;

use super::Spectrum;

/// Histogram of `|z|` on `[0, max |z|]` with annular-area normalization.
pub fn radial_density(spectra: &[Spectrum], n_bins: usize) -> Result<RadialProfile> {
    let r_max = spectra
        .iter()
        .flat_map(|s| s.radii())
        .fold(0.0_f64, f64::max);
    // widen slightly so the largest radius lands inside the last bin
    radial_density_in(spectra, n_bins, 0.0, r_max * (1.0 + 1e-9) + f64::MIN_POSITIVE)
}

/// Histogram of `|z|` on `[lo, hi]`; radii outside the range are dropped.
///
/// Bin value = count / (configurations · annulus area), so the profile
/// integrates to the mean number of eigenvalues in range.
pub fn radial_density_in(spectra: &[Spectrum], n_bins: usize, lo: f64, hi: f64) -> Result<RadialProfile> {
    if spectra.is_empty() {
        return Err(argument("radial density needs at least one spectrum"));
    }
    if n_bins == 0 || !(hi > lo) || lo < 0.0 {
        return Err(argument(format!("bad histogram range [{lo}, {hi}] with {n_bins} bins")));
    }
    let width = (hi - lo) / n_bins as f64;
    let partial = par::map_slice(spectra, |s| {
        let mut counts = vec![0u64; n_bins];
        for r in s.radii() {
            if r >= lo && r < hi {
                let b = (((r - lo) / width) as usize).min(n_bins - 1);
                counts[b] += 1;
            }
        }
        counts
    });
    let mut counts = vec![0u64; n_bins];
    for c in partial {
        for (acc, x) in counts.iter_mut().zip(c) {
            *acc += x;
        }
    }
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + width * i as f64).collect();
    let configs = spectra.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (configs * PI * (e[1] * e[1] - e[0] * e[0])))
        .collect();
    Ok(RadialProfile {
        radii: edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect(),
        density,
        edges,
        counts,
        point_masses: vec![],
        n: spectra[0].len(),
    })
}

/// Least-squares quadratic through `(x, y)`, evaluated at `x0`.
fn quadratic_fit_at(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    // normal equations in the centred variable u = x - x0
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x - x0;
        let mut p = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += p;
            if k < 3 {
                t[k] += p * y;
            }
            p *= u;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    if d.abs() < 1e-300 {
        return ys.iter().sum::<f64>() / ys.len() as f64;
    }
    // Cramer's rule for the constant coefficient
    let mut m0 = m;
    for (row, &tk) in m0.iter_mut().zip(&t) {
        row[0] = tk;
    }
    det3(&m0) / d
}

/// Radii where the smoothed density crosses half its median over occupied bins.
///
/// Returns `(lo, hi, inner_edge)`; a disk (dense first bin) has `lo = 0` and no inner edge.
fn half_density_support(p: &RadialProfile) -> (f64, f64, bool) {
    let mut occupied: Vec<f64> = p
        .density
        .iter()
        .zip(&p.counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&d, _)| d)
        .collect();
    if occupied.is_empty() {
        return (0.0, 0.0, false);
    }
    occupied.sort_unstable_by(f64::total_cmp);
    let half = 0.5 * occupied[occupied.len() / 2];
    let above: Vec<usize> = (0..p.density.len()).filter(|&i| p.density[i] >= half).collect();
    let (first, last) = (above[0], above[above.len() - 1]);
    // linear crossing between neighbouring bin centres
    let cross = |i: usize, j: usize| {
        let (di, dj) = (p.density[i], p.density[j]);
        let w = if dj != di { (half - di) / (dj - di) } else { 0.5 };
        p.radii[i] + w.clamp(0.0, 1.0) * (p.radii[j] - p.radii[i])
    };
    let hi = if last + 1 < p.density.len() { cross(last, last + 1) } else { p.edges[p.edges.len() - 1] };
    if first == 0 {
        (0.0, hi, false)
    } else {
        (cross(first - 1, first), hi, true)
    }
}

/// Smoothed empirical radial density, for spectra without an analytic `R₁`.
#[derive(Clone, Debug)]
pub struct EmpiricalDensity {
    profile: RadialProfile,
    lo: f64,
    hi: f64,
    inner_edge: bool,
}

impl EmpiricalDensity {
    /// Radial histogram smoothed by a local quadratic fit over 5 bins.
    pub fn from_spectra(spectra: &[Spectrum], n_bins: usize) -> Result<Self> {
        let raw = radial_density(spectra, n_bins)?;
        let nb = raw.density.len();
        let smoothed = (0..nb)
            .map(|i| {
                let from = i.saturating_sub(2);
                let to = (i + 3).min(nb);
                quadratic_fit_at(&raw.radii[from..to], &raw.density[from..to], raw.radii[i]).max(0.0)
            })
            .collect();
        let profile = RadialProfile {
            density: smoothed,
            ..raw
        };
        let (lo, hi, inner_edge) = half_density_support(&profile);
        Ok(Self {
            profile,
            lo,
            hi,
            inner_edge,
        })
    }

    /// Smoothed density with an explicitly known support.
    pub fn with_support(spectra: &[Spectrum], n_bins: usize, lo: f64, hi: f64) -> Result<Self> {
        let mut e = Self::from_spectra(spectra, n_bins)?;
        (e.lo, e.hi, e.inner_edge) = (lo, hi, lo > 0.0);
        Ok(e)
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn at(&self, r: f64) -> f64 {
        let p = &self.profile;
        if r < p.edges[0] || r > p.edges[p.edges.len() - 1] {
            return 0.0;
        }
        let first = p.radii[0];
        let last = p.radii[p.radii.len() - 1];
        p.interpolate(r.clamp(first, last))
    }
}

/// Density used to unfold spacings, with the support used for edge exclusion.
#[derive(Clone, Debug)]
pub enum DensitySource {
    Analytic {
        ring: RingDensity,
        lo: f64,
        hi: f64,
    },
    Empirical(EmpiricalDensity),
    /// Constant density on the annulus `lo <= r <= hi`.
    Constant { density: f64, lo: f64, hi: f64 },
}

impl DensitySource {
    /// Large-N density of `p`, clipped to its hard walls.
    pub fn analytic(p: &Potential, n: usize) -> Result<Self> {
        let ring = RingDensity::new(p, n)?;
        let radii = ring.radii();
        let lo = radii.inner.max(p.r_min());
        let hi = radii.outer.min(p.r_max());
        Ok(Self::Analytic { ring, lo, hi })
    }

    pub fn empirical(spectra: &[Spectrum], n_bins: usize) -> Result<Self> {
        EmpiricalDensity::from_spectra(spectra, n_bins).map(Self::Empirical)
    }

    /// `R₁(r)` restricted to the support; this is the density used for unfolding.
    pub fn at(&self, r: f64) -> f64 {
        let (lo, hi, _) = self.support();
        if r < lo || r > hi {
            0.0
        } else {
            self.intensity(r)
        }
    }

    /// `R₁(r)` including any empirical tail beyond the support.
    pub fn intensity(&self, r: f64) -> f64 {
        match self {
            Self::Analytic { ring, lo, hi } => {
                if r < *lo || r > *hi {
                    0.0
                } else {
                    ring.at(r)
                }
            }
            Self::Empirical(e) => e.at(r),
            Self::Constant { density, lo, hi } => {
                if r >= *lo && r <= *hi {
                    *density
                } else {
                    0.0
                }
            }
        }
    }

    /// Support `(lo, hi)` and whether `lo` is a genuine boundary (not a disk centre).
    pub fn support(&self) -> (f64, f64, bool) {
        match self {
            Self::Analytic { lo, hi, .. } | Self::Constant { lo, hi, .. } => (*lo, *hi, *lo > 0.0),
            Self::Empirical(e) => (e.lo, e.hi, e.inner_edge),
        }
    }

    /// Fraction of the circle of radius `d` centred at radius `r` that lies inside the support.
    pub fn circle_fraction(&self, r: f64, d: f64) -> f64 {
        let (lo, hi, _) = self.support();
        if d <= 0.0 {
            return if r >= lo && r <= hi { 1.0 } else { 0.0 };
        }
        if r <= 0.0 {
            return if d >= lo && d <= hi { 1.0 } else { 0.0 };
        }
        // |z|² = r² + d² + 2 r d cos φ along the circle
        let to_cos = |edge: f64| ((edge * edge - r * r - d * d) / (2.0 * r * d)).clamp(-1.0, 1.0);
        let (c_lo, c_hi) = (to_cos(lo), if hi.is_finite() { to_cos(hi) } else { 1.0 });
        ((c_lo.acos() - c_hi.acos()) / PI).max(0.0)
    }

    /// Whether an eigenvalue at radius `r` sits within two mean spacings of an edge.
    pub fn near_edge(&self, r: f64) -> bool {
        let rho = self.at(r);
        if !(rho > 0.0) {
            return true;
        }
        let margin = 2.0 / (PI * rho).sqrt();
        let (lo, hi, inner_edge) = self.support();
        (inner_edge && r - lo < margin) || hi - r < margin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{poisson_spectrum, Provenance};
    use num_complex::Complex64;

    #[test]
    fn single_radius_fills_one_bin() {
        let pts: Vec<Complex64> = (0..40).map(|k| Complex64::from_polar(0.55, k as f64 * 0.157)).collect();
        let s = Spectrum::new(pts, Provenance::Synthetic { label: "ring".into(), seed: 0 }, vec![]).unwrap();
        let prof = radial_density_in(&[s], 10, 0.0, 1.0).unwrap();
        assert_eq!(prof.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(prof.counts[5], 40);
        assert!((prof.total_mass() - 40.0).abs() < 1e-10);
    }

    #[test]
    fn uniform_disk_is_flat() {
        let spectra: Vec<Spectrum> = (0..50).map(|m| poisson_spectrum(2000, 1.0, 4, m).unwrap()).collect();
        let prof = radial_density_in(&spectra, 10, 0.0, 1.0).unwrap();
        let flat = 2000.0 / PI;
        // outer bins carry enough counts for a 5% check
        for d in &prof.density[3..] {
            assert!((d / flat - 1.0).abs() < 0.05, "{d}");
        }
        assert!((prof.total_mass() - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(radial_density(&[], 10).is_err());
    }

    #[test]
    fn quadratic_fit_is_exact_on_parabolas() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - x + 0.5 * x * x).collect();
        for x0 in [0.0, 2.0, 4.0] {
            assert!((quadratic_fit_at(&xs, &ys, x0) - (2.0 - x0 + 0.5 * x0 * x0)).abs() < 1e-12);
        }
        assert!((quadratic_fit_at(&xs[..3], &ys[..3], 0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_density_tracks_flat_disk() {
        let spectra: Vec<Spectrum> = (0..40).map(|m| poisson_spectrum(1000, 1.0, 8, m).unwrap()).collect();
        let src = DensitySource::empirical(&spectra, 40).unwrap();
        let flat = 1000.0 / PI;
        assert!((src.at(0.7) / flat - 1.0).abs() < 0.05);
        let (lo, hi, inner) = src.support();
        assert!(!inner && lo == 0.0, "a filled disk has no inner edge");
        assert!((hi - 1.0).abs() < 0.03, "{hi}");
        assert_eq!(src.at(1.5), 0.0);
    }

    #[test]
    fn empirical_support_of_annulus() {
        // uniform annulus 0.5 <= r <= 1 from rescaled disk samples
        let spectra: Vec<Spectrum> = (0..40)
            .map(|m| {
                let s = poisson_spectrum(1000, 1.0, 9, m).unwrap();
                let pts = s
                    .eigenvalues
                    .iter()
                    .map(|z| {
                        let r = (0.25 + 0.75 * z.norm_sqr()).sqrt();
                        Complex64::from_polar(r, z.arg())
                    })
                    .collect();
                Spectrum::new(pts, s.provenance.clone(), vec![]).unwrap()
            })
            .collect();
        let src = DensitySource::empirical(&spectra, 100).unwrap();
        let (lo, hi, inner) = src.support();
        assert!(inner);
        assert!((lo - 0.5).abs() < 0.02 && (hi - 1.0).abs() < 0.02, "{lo} {hi}");
        let fixed = EmpiricalDensity::with_support(&spectra, 100, 0.4, 1.1).unwrap();
        assert_eq!(DensitySource::Empirical(fixed).support(), (0.4, 1.1, true));
    }

    #[test]
    fn analytic_source_respects_walls() {
        let p = Potential::gaussian().with_walls(0.3, 0.6).unwrap();
        let src = DensitySource::analytic(&p, 1000).unwrap();
        assert_eq!(src.at(0.2), 0.0);
        assert!((src.at(0.45) - 1000.0 / PI).abs() < 1e-9);
        assert_eq!(src.support(), (0.3, 0.6, true));
        assert!(src.near_edge(0.31));
        assert_eq!(src.circle_fraction(0.45, 0.1), 1.0);
        // centred on the outer wall: half the circle is outside, minus curvature
        let f = src.circle_fraction(0.6, 0.01);
        assert!(f < 0.5 && f > 0.49, "{f}");
        assert_eq!(src.circle_fraction(0.45, 2.0), 0.0);
        assert!(!src.near_edge(0.45));
    }
}
