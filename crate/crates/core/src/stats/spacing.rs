use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{argument, Result};
use crate::par;

use super::{DensitySource, Spectrum};

/// Uniform bins on `[0, s_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinSpec {
    pub n_bins: usize,
    pub s_max: f64,
}

impl Default for BinSpec {
    fn default() -> Self {
        Self { n_bins: 100, s_max: 4.0 }
    }
}

impl BinSpec {
    pub fn new(n_bins: usize, s_max: f64) -> Result<Self> {
        let spec = Self { n_bins, s_max };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.n_bins == 0 {
            return Err(argument("need at least one bin"));
        }
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return Err(argument(format!("s_max must be positive, got {}", self.s_max)));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.s_max / self.n_bins as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n_bins).map(|i| self.width() * i as f64).collect()
    }

    fn index(&self, s: f64) -> Option<usize> {
        if s < self.s_max {
            Some(((s / self.width()) as usize).min(self.n_bins - 1))
        } else {
            None
        }
    }
}

/// Pair weighting for the all-pairs estimator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeCorrection {
    /// Every pair counts once.
    #[default]
    None,
    /// Each pair is weighted by the inverse fraction of the circle through the
    /// partner, centred on the reference, that lies inside the support.
    Isotropic,
    /// Each pair is weighted by `R₁(midpoint) / R₁(partner)`, so a depleted or
    /// empty neighbourhood does not bias the count; meant for empirical densities.
    Intensity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// Two-point function of all pairs.
    R2,
    /// Density of the k-th neighbour spacing (`Pk(0)` is the nearest neighbour).
    Pk(usize),
}

/// Histogram estimate of `ℛ₂(s)` or `P_k(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationCurve {
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    pub kind: CurveKind,
    /// Reference eigenvalues that survived edge exclusion.
    pub references: u64,
    /// Spacings beyond `s_max`, or missing neighbours.
    pub overflow: u64,
    /// Pairs whose midpoint density vanished.
    pub skipped_pairs: u64,
}

impl CorrelationCurve {
    fn from_counts(bins: BinSpec, counts: Vec<u64>, kind: CurveKind, references: u64, overflow: u64, skipped: u64) -> Self {
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Self::from_weights(bins, counts, &weights, kind, references, overflow, skipped)
    }

    fn from_weights(
        bins: BinSpec,
        counts: Vec<u64>,
        weights: &[f64],
        kind: CurveKind,
        references: u64,
        overflow: u64,
        skipped: u64,
    ) -> Self {
        let scale = match kind {
            CurveKind::R2 => 1.0 / (references as f64 * bins.width() * PI),
            CurveKind::Pk(_) => 1.0 / (references as f64 * bins.width()),
        };
        let values = weights
            .iter()
            .map(|&w| if references == 0 { 0.0 } else { w * scale })
            .collect();
        Self {
            edges: bins.edges(),
            values,
            counts,
            kind,
            references,
            overflow,
            skipped_pairs: skipped,
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// `Σ value · Δs`.
    pub fn area(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_width()
    }
}

/// Unfolded spacing `|z_j - z_k| √(π R₁(|mid|))`, or `None` when the midpoint density vanishes.
pub fn unfold_spacing(zj: Complex64, zk: Complex64, density: &DensitySource) -> Option<f64> {
    let rho = density.at((0.5 * (zj + zk)).norm());
    if rho > 0.0 && rho.is_finite() {
        Some((zj - zk).norm() * (PI * rho).sqrt())
    } else {
        None
    }
}

/// Unfolded distances from eigenvalue `j` to every other one, with the partner
/// indices alongside; returns the skipped-pair count.
fn distances_from(
    points: &[Complex64],
    j: usize,
    density: &DensitySource,
    out: &mut Vec<f64>,
    partners: &mut Vec<usize>,
) -> u64 {
    out.clear();
    partners.clear();
    let mut skipped = 0;
    let zj = points[j];
    for (k, &zk) in points.iter().enumerate() {
        if k == j {
            continue;
        }
        match unfold_spacing(zj, zk, density) {
            Some(s) => {
                out.push(s);
                partners.push(k);
            }
            None => skipped += 1,
        }
    }
    skipped
}

/// Reference indices of a spectrum that lie in the bulk.
fn bulk_references<'a>(s: &'a Spectrum, density: &'a DensitySource) -> impl Iterator<Item = usize> + 'a {
    s.eigenvalues
        .iter()
        .enumerate()
        .filter(move |(_, z)| !density.near_edge(z.norm()))
        .map(|(j, _)| j)
}

fn check_inputs(spectra: &[Spectrum], k_max: usize) -> Result<()> {
    let Some(n_min) = spectra.iter().map(Spectrum::len).min() else {
        return Err(argument("spacing statistics need at least one spectrum"));
    };
    if k_max + 1 >= n_min {
        return Err(argument(format!("neighbour order {k_max} needs more than {} eigenvalues", k_max + 1)));
    }
    Ok(())
}

#[derive(Default)]
struct Partial {
    r2: Vec<u64>,
    r2_weight: Vec<f64>,
    r2_overflow: u64,
    pk: Vec<Vec<u64>>,
    pk_overflow: Vec<u64>,
    references: u64,
    skipped: u64,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        let add = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.r2, &other.r2);
        self.r2_weight.iter_mut().zip(&other.r2_weight).for_each(|(x, y)| *x += y);
        self.r2_overflow += other.r2_overflow;
        for (a, b) in self.pk.iter_mut().zip(&other.pk) {
            add(a, b);
        }
        add(&mut self.pk_overflow, &other.pk_overflow);
        self.references += other.references;
        self.skipped += other.skipped;
    }
}

/// What a fold accumulates: neighbour orders `0..k_count`, and the all-pairs
/// histogram when `r2` is set.
#[derive(Clone, Copy)]
struct FoldPlan {
    k_count: usize,
    r2: Option<EdgeCorrection>,
}

impl FoldPlan {
    fn empty(&self, bins: BinSpec) -> Partial {
        let r2_bins = if self.r2.is_some() { bins.n_bins } else { 0 };
        Partial {
            r2: vec![0; r2_bins],
            r2_weight: vec![0.0; r2_bins],
            pk: vec![vec![0; bins.n_bins]; self.k_count],
            pk_overflow: vec![0; self.k_count],
            ..Partial::default()
        }
    }
}

/// Pairs whose circle lies almost entirely outside the support are dropped
/// rather than given an unbounded weight.
const MIN_CIRCLE_FRACTION: f64 = 1e-3;

/// Partners in the far tail of an empirical density are dropped below this
/// fraction of the midpoint density.
const MIN_INTENSITY_RATIO: f64 = 1e-2;

fn fold_spectrum(s: &Spectrum, density: &DensitySource, bins: BinSpec, plan: FoldPlan) -> Partial {
    let mut part = plan.empty(bins);
    let k_count = plan.k_count;
    let mut buf = Vec::with_capacity(s.len());
    let mut partners = Vec::with_capacity(s.len());
    for j in bulk_references(s, density) {
        part.references += 1;
        part.skipped += distances_from(&s.eigenvalues, j, density, &mut buf, &mut partners);
        if let Some(correction) = plan.r2 {
            let zj = s.eigenvalues[j];
            let rj = zj.norm();
            for (&d, &k) in buf.iter().zip(&partners) {
                let zk = s.eigenvalues[k];
                let Some(b) = bins.index(d) else {
                    part.r2_overflow += 1;
                    continue;
                };
                let weight = match correction {
                    EdgeCorrection::None => 1.0,
                    EdgeCorrection::Isotropic => {
                        let f = density.circle_fraction(rj, (zj - zk).norm());
                        if f < MIN_CIRCLE_FRACTION {
                            part.skipped += 1;
                            continue;
                        }
                        1.0 / f
                    }
                    EdgeCorrection::Intensity => {
                        let at_partner = density.intensity(zk.norm());
                        let at_mid = density.intensity((0.5 * (zj + zk)).norm());
                        if !(at_partner > MIN_INTENSITY_RATIO * at_mid) {
                            part.skipped += 1;
                            continue;
                        }
                        at_mid / at_partner
                    }
                };
                part.r2[b] += 1;
                part.r2_weight[b] += weight;
            }
        }
        if k_count == 0 {
            continue;
        }
        let have = k_count.min(buf.len());
        if have > 0 {
            buf.select_nth_unstable_by(have - 1, f64::total_cmp);
            buf[..have].sort_unstable_by(f64::total_cmp);
        }
        for k in 0..k_count {
            match buf.get(k).and_then(|&d| if k < have { bins.index(d) } else { None }) {
                Some(b) => part.pk[k][b] += 1,
                None => part.pk_overflow[k] += 1,
            }
        }
    }
    part
}

fn fold_all(spectra: &[Spectrum], density: &DensitySource, bins: BinSpec, plan: FoldPlan) -> Partial {
    let partials = par::map_slice(spectra, |s| fold_spectrum(s, density, bins, plan));
    let mut total = plan.empty(bins);
    for p in partials {
        total.merge(p);
    }
    total
}

/// Histogram of k-th neighbour unfolded spacings, normalized by the number of
/// bulk reference eigenvalues so the full distribution has unit area.
pub fn spacing_distribution(spectra: &[Spectrum], k: usize, density: &DensitySource, bins: BinSpec) -> Result<CorrelationCurve> {
    bins.validate()?;
    check_inputs(spectra, k)?;
    let mut total = fold_all(spectra, density, bins, FoldPlan { k_count: k + 1, r2: None });
    let counts = total.pk.swap_remove(k);
    Ok(CorrelationCurve::from_counts(
        bins,
        counts,
        CurveKind::Pk(k),
        total.references,
        total.pk_overflow[k],
        total.skipped,
    ))
}

/// All-pairs estimate of `ℛ₂(s)`: count / (references · Δs · π).
pub fn r2_estimate(spectra: &[Spectrum], density: &DensitySource, bins: BinSpec) -> Result<CorrelationCurve> {
    r2_estimate_with(spectra, density, bins, EdgeCorrection::None)
}

/// All-pairs estimate of `ℛ₂(s)` with the chosen pair weighting.
pub fn r2_estimate_with(
    spectra: &[Spectrum],
    density: &DensitySource,
    bins: BinSpec,
    correction: EdgeCorrection,
) -> Result<CorrelationCurve> {
    bins.validate()?;
    check_inputs(spectra, 0)?;
    let total = fold_all(spectra, density, bins, FoldPlan { k_count: 0, r2: Some(correction) });
    Ok(CorrelationCurve::from_weights(
        bins,
        total.r2,
        &total.r2_weight,
        CurveKind::R2,
        total.references,
        total.r2_overflow,
        total.skipped,
    ))
}

/// `ℛ₂` together with `P_0 .. P_{k_max}` from a single pass over the spectra.
pub fn neighbor_curves(
    spectra: &[Spectrum],
    k_max: usize,
    density: &DensitySource,
    bins: BinSpec,
) -> Result<(CorrelationCurve, Vec<CorrelationCurve>)> {
    bins.validate()?;
    check_inputs(spectra, k_max)?;
    let plan = FoldPlan { k_count: k_max + 1, r2: Some(EdgeCorrection::None) };
    let total = fold_all(spectra, density, bins, plan);
    let r2 = CorrelationCurve::from_counts(bins, total.r2, CurveKind::R2, total.references, total.r2_overflow, total.skipped);
    let pk = total
        .pk
        .into_iter()
        .zip(total.pk_overflow)
        .enumerate()
        .map(|(k, (counts, over))| {
            CorrelationCurve::from_counts(bins, counts, CurveKind::Pk(k), total.references, over, total.skipped)
        })
        .collect();
    Ok((r2, pk))
}

/// Raw k-th neighbour spacings, in spectrum order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpacingSamples {
    pub values: Vec<f64>,
    pub references: u64,
    pub skipped_pairs: u64,
}

pub fn spacing_samples(spectra: &[Spectrum], k: usize, density: &DensitySource) -> Result<SpacingSamples> {
    check_inputs(spectra, k)?;
    let parts = par::map_slice(spectra, |s| {
        let mut out = SpacingSamples::default();
        let (mut buf, mut partners) = (Vec::with_capacity(s.len()), Vec::with_capacity(s.len()));
        for j in bulk_references(s, density) {
            out.references += 1;
            out.skipped_pairs += distances_from(&s.eigenvalues, j, density, &mut buf, &mut partners);
            if buf.len() > k {
                let (_, kth, _) = buf.select_nth_unstable_by(k, f64::total_cmp);
                out.values.push(*kth);
            }
        }
        out
    });
    Ok(parts.into_iter().fold(SpacingSamples::default(), |mut acc, p| {
        acc.values.extend(p.values);
        acc.references += p.references;
        acc.skipped_pairs += p.skipped_pairs;
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Potential;
    use crate::stats::{poisson_spectrum, Provenance};
    use proptest::prelude::*;

    fn unit_density() -> DensitySource {
        DensitySource::Constant { density: 1.0 / PI, lo: 0.0, hi: f64::INFINITY }
    }

    fn synthetic(points: Vec<Complex64>) -> Spectrum {
        Spectrum::new(points, Provenance::Synthetic { label: "t".into(), seed: 0 }, vec![]).unwrap()
    }

    #[test]
    fn unfolding_examples() {
        let d = unit_density();
        let (a, b) = (Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.9));
        assert!((unfold_spacing(a, b, &d).unwrap() - (a - b).norm()).abs() < 1e-15);
        assert_eq!(unfold_spacing(a, a, &d), Some(0.0));

        let g = DensitySource::analytic(&Potential::gaussian(), 500).unwrap();
        let s = unfold_spacing(Complex64::new(0.2, 0.0), Complex64::new(0.25, 0.0), &g).unwrap();
        assert!((s - 0.05 * 500f64.sqrt()).abs() < 1e-12, "{s}");
        // outside the unit disk the density vanishes
        assert_eq!(unfold_spacing(Complex64::new(1.5, 0.0), Complex64::new(1.6, 0.0), &g), None);
    }

    #[test]
    fn skipped_pairs_are_tallied() {
        let g = DensitySource::analytic(&Potential::gaussian(), 100).unwrap();
        let mut pts: Vec<Complex64> = (0..10).map(|k| Complex64::new(0.05 * k as f64, 0.0)).collect();
        pts.push(Complex64::new(3.0, 0.0));
        let curve = r2_estimate(&[synthetic(pts)], &g, BinSpec::default()).unwrap();
        assert!(curve.skipped_pairs > 0);
    }

    #[test]
    fn argument_errors() {
        let s = poisson_spectrum(10, 1.0, 1, 0).unwrap();
        let d = unit_density();
        assert!(r2_estimate(&[], &d, BinSpec::default()).is_err());
        assert!(BinSpec::new(10, 0.0).is_err());
        assert!(BinSpec::new(10, -1.0).is_err());
        assert!(r2_estimate(std::slice::from_ref(&s), &d, BinSpec { n_bins: 10, s_max: 0.0 }).is_err());
        assert!(spacing_distribution(std::slice::from_ref(&s), 9, &d, BinSpec::default()).is_err());
        assert!(spacing_distribution(&[s], 8, &d, BinSpec::default()).is_ok());
    }

    #[test]
    fn poisson_r2_is_flat_in_area() {
        // uniform points: no repulsion, ℛ₂ ≈ 2s/π away from the disk edge
        let n = 2000;
        let spectra: Vec<Spectrum> = (0..30).map(|m| poisson_spectrum(n, 1.0, 11, m).unwrap()).collect();
        let d = DensitySource::Constant { density: n as f64 / PI, lo: 0.0, hi: 1.0 };
        let bins = BinSpec::new(10, 3.0).unwrap();
        let curve = r2_estimate_with(&spectra, &d, bins, EdgeCorrection::Isotropic).unwrap();
        for (s, v) in curve.centers().into_iter().zip(&curve.values).skip(2) {
            assert!((v / (2.0 * s / PI) - 1.0).abs() < 0.04, "s={s} v={v}");
        }
        // without weighting, partners lost beyond the edge depress large s
        let raw = r2_estimate(&spectra, &d, bins).unwrap();
        assert!(raw.values[9] < curve.values[9]);
    }

    #[test]
    fn nearest_neighbour_area_and_sum_rule() {
        let n = 400;
        let spectra: Vec<Spectrum> = (0..10).map(|m| poisson_spectrum(n, 1.0, 5, m).unwrap()).collect();
        let d = DensitySource::Constant { density: n as f64 / PI, lo: 0.0, hi: 1.0 };
        let bins = BinSpec::new(40, 3.0).unwrap();
        let (r2, pk) = neighbor_curves(&spectra, 4, &d, bins).unwrap();
        assert!((pk[0].area() - 1.0).abs() < 1e-3, "{}", pk[0].area());
        assert_eq!(pk[0], spacing_distribution(&spectra, 0, &d, bins).unwrap());
        assert_eq!(r2, r2_estimate(&spectra, &d, bins).unwrap());
        // every pair counted by ℛ₂ belongs to some neighbour order, so the partial sum is bounded
        for b in 0..bins.n_bins {
            let partial: f64 = pk.iter().map(|c| c.values[b]).sum();
            assert!(partial <= PI * r2.values[b] + 1e-12);
        }
        // Poisson nearest-neighbour spacing density is 2s e^{-s²} on the unfolded scale
        let samples = spacing_samples(&spectra, 0, &d).unwrap();
        assert_eq!(samples.values.len() as u64, samples.references);
        let mean = samples.values.iter().sum::<f64>() / samples.values.len() as f64;
        assert!((mean - PI.sqrt() / 2.0).abs() < 0.03, "{mean}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn unfolding_is_scale_consistent(
            re in -1.0f64..1.0, im in -1.0f64..1.0,
            dre in -0.2f64..0.2, dim in -0.2f64..0.2,
            c in 0.05f64..20.0, rho in 0.5f64..500.0,
        ) {
            let (a, b) = (Complex64::new(re, im), Complex64::new(re + dre, im + dim));
            let d1 = DensitySource::Constant { density: rho, lo: 0.0, hi: 10.0 };
            let d2 = DensitySource::Constant { density: rho / (c * c), lo: 0.0, hi: 10.0 * c };
            let s1 = unfold_spacing(a, b, &d1).unwrap();
            let s2 = unfold_spacing(a * c, b * c, &d2).unwrap();
            prop_assert!((s1 - s2).abs() <= 1e-12 * s1.max(1.0));
        }

        #[test]
        fn higher_neighbours_are_stochastically_larger(seed in 0u64..1000) {
            let spectra: Vec<Spectrum> = (0..2).map(|m| poisson_spectrum(60, 1.0, seed, m).unwrap()).collect();
            let d = DensitySource::Constant { density: 60.0 / PI, lo: 0.0, hi: 1.0 };
            let bins = BinSpec::new(50, 5.0).unwrap();
            let (_, pk) = neighbor_curves(&spectra, 1, &d, bins).unwrap();
            let (mut c0, mut c1) = (0u64, 0u64);
            for b in 0..bins.n_bins {
                c0 += pk[0].counts[b];
                c1 += pk[1].counts[b];
                prop_assert!(c1 <= c0);
            }
        }

        #[test]
        fn histograms_ignore_ordering(seed in 0u64..1000, rot in 0usize..37) {
            let spectra: Vec<Spectrum> = (0..3).map(|m| poisson_spectrum(37, 1.0, seed, m).unwrap()).collect();
            let mut shuffled: Vec<Spectrum> = spectra.iter().rev().cloned().collect();
            for s in &mut shuffled {
                s.eigenvalues.rotate_left(rot);
                s.eigenvalues.reverse();
            }
            let d = DensitySource::Constant { density: 37.0 / PI, lo: 0.0, hi: 1.0 };
            let bins = BinSpec::new(25, 4.0).unwrap();
            let a = neighbor_curves(&spectra, 2, &d, bins).unwrap();
            let b = neighbor_curves(&shuffled, 2, &d, bins).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
