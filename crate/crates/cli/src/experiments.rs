//! Pipelines behind each experiment kind.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ringlab::analytic::{
    bounded_density, density_r1, finite_n_norms, p0_cdf, p0_spacing, r2_universal, ring_radii, rn_correlation,
    RingDensity, P0_DEFAULT_TERMS,
};
use ringlab::io;
use ringlab::qmaps::{eigenvalues, kicked_rotor_ensemble, kicked_rotor_matrix, rmt_ensemble, KickedRotorParams};
use ringlab::quad::integrate;
use ringlab::sampler;
use ringlab::stats::{
    ks_distance, l1_relative_deviation, r2_estimate_with, radial_density, spacing_distribution, spacing_samples,
    CorrelationCurve, CurveKind, DensitySource,
};
use ringlab::{Complex64, Potential, PotentialKind, Spectrum};

use crate::config::{DensityChoice, ExperimentKind, RunConfig};
use crate::plot::{emit_plot, PlotData, PlotStyle, Series};
use crate::report::{ComparisonReport, Metric};
use crate::CliError;

/// Writes artifacts below one directory.
pub struct Artifacts {
    dir: PathBuf,
    plots: bool,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, plots: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            plots,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn write(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> ringlab::Result<()>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w).map_err(|e| match e {
            ringlab::Error::Io(io) => CliError::io(&path, io),
            other => CliError::numerical("writing artifact", other),
        })?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.write(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    fn plot(&mut self, name: &str, data: PlotData, style: PlotStyle) -> Result<(), CliError> {
        if !self.plots {
            return Ok(());
        }
        let svg = emit_plot(&data, &style)?;
        self.text(name, &svg)
    }
}

fn num(context: &'static str) -> impl Fn(ringlab::Error) -> CliError {
    move |e| CliError::numerical(context, e)
}

/// Runs the configured experiment, writing artifacts and returning the report.
pub fn execute(cfg: &RunConfig, art: &mut Artifacts) -> Result<ComparisonReport, CliError> {
    art.text("config.toml", &cfg.to_toml()?)?;
    let mut report = ComparisonReport::new(cfg.kind.name());
    match cfg.kind {
        ExperimentKind::Sample => {
            let spectra = sample(cfg, art, &mut report)?;
            scatter(art, &spectra)?;
        }
        ExperimentKind::Density => density(cfg, art, &mut report)?,
        ExperimentKind::Radii => radii(cfg, &mut report)?,
        ExperimentKind::Spacings => spacings(cfg, art, &mut report)?,
        ExperimentKind::R2 => r2(cfg, art, &mut report)?,
        ExperimentKind::Kernel => kernel(cfg, art, &mut report)?,
        ExperimentKind::QmapKr | ExperimentKind::QmapRmt => qmap(cfg, art, &mut report)?,
    }
    art.text("report.toml", &report.to_toml())?;
    Ok(report)
}

fn sample(cfg: &RunConfig, art: &mut Artifacts, report: &mut ComparisonReport) -> Result<Vec<Spectrum>, CliError> {
    let potential = cfg.potential.build()?;
    let scfg = cfg.sampler.build(potential.clone(), cfg.seed)?;
    let runs = sampler::run_chains(&scfg).map_err(num("sampling"))?;
    for run in &runs {
        report.push(Metric::info(format!("chain{}_acceptance", run.chain), run.acceptance));
    }
    let spectra: Vec<Spectrum> = runs.into_iter().flat_map(|r| r.spectra).collect();
    report.push(Metric::info("configurations", spectra.len() as f64));
    art.write("spectra.csv", |w| io::write_spectra_csv(w, &spectra))?;
    let mut meta = vec![
        ("seed".to_string(), cfg.seed.to_string()),
        ("potential".to_string(), potential.name().to_string()),
    ];
    meta.extend(potential.params().into_iter().map(|(k, v)| (k.to_string(), v.to_string())));
    meta.extend([
        ("n".to_string(), scfg.n.to_string()),
        ("burn_sweeps".to_string(), scfg.burn_sweeps.to_string()),
        ("sample_sweeps".to_string(), scfg.sample_sweeps.to_string()),
        ("thin".to_string(), scfg.thin.to_string()),
        ("chains".to_string(), scfg.chains.to_string()),
    ]);
    art.write("spectra.meta", |w| io::write_metadata(w, &meta))?;
    Ok(spectra)
}

fn scatter(art: &mut Artifacts, spectra: &[Spectrum]) -> Result<(), CliError> {
    let Some(first) = spectra.first() else {
        return Ok(());
    };
    let points = first.eigenvalues.iter().map(|z| (z.re, z.im)).collect();
    art.plot("eigenvalues.svg", PlotData::Scatter(points), PlotStyle::new("Eigenvalues", "Re z", "Im z"))
}

fn density_source(cfg: &RunConfig, potential: &Potential, spectra: &[Spectrum]) -> Result<DensitySource, CliError> {
    match cfg.stats.density {
        DensityChoice::Analytic => DensitySource::analytic(potential, cfg.sampler.n).map_err(num("analytic density")),
        DensityChoice::Empirical => {
            DensitySource::empirical(spectra, cfg.stats.density_bins).map_err(num("empirical density"))
        }
    }
}

fn density(cfg: &RunConfig, art: &mut Artifacts, report: &mut ComparisonReport) -> Result<(), CliError> {
    let spectra = sample(cfg, art, report)?;
    let potential = cfg.potential.build()?;
    let n = cfg.sampler.n;
    let smooth = potential.without_walls();
    let profile = radial_density(&spectra, cfg.stats.radial_bins).map_err(num("radial density"))?;
    art.write("profile.csv", |w| io::write_profile_csv(w, &profile))?;
    let (reference, lo, hi) = match potential.walls() {
        Some(walls) => {
            let bounded = bounded_density(&smooth, n, (walls.inner, walls.outer)).map_err(num("bounded density"))?;
            art.write("point_masses.csv", |w| io::write_point_masses_csv(w, &bounded))?;
            // three mean spacings
            let shell = 3.0 / (n as f64).sqrt();
            let configs = spectra.len() as f64;
            let count = |a: f64, b: f64| {
                spectra.iter().map(|s| s.radii().filter(|&r| r >= a && r <= b).count()).sum::<usize>() as f64 / configs
            };
            let smooth_mass = |a: f64, b: f64| {
                integrate(|r| 2.0 * PI * r * density_r1(&smooth, n, r).unwrap_or(f64::NAN), a, b, 1e-10, 1e-10)
                    .map_err(num("wall mass"))
            };
            for (i, m) in bounded.point_masses.iter().enumerate() {
                let (a, b) = if i == 0 { (m.radius, m.radius + shell) } else { (m.radius - shell, m.radius) };
                let empirical = count(a, b) - smooth_mass(a, b)?;
                let name = if i == 0 { "inner_wall_mass" } else { "outer_wall_mass" };
                report.push(Metric::check(name, empirical, m.mass, cfg.compare.wall_rel_tol * m.mass));
            }
            // the smooth part is compared away from the wall charges, one mean spacing in
            (bounded, walls.inner + shell / 3.0, walls.outer - shell / 3.0)
        }
        None => {
            let ring = RingDensity::new(&potential, n).map_err(num("ring density"))?;
            let radii = ring.radii();
            (ring.profile(400), radii.inner, radii.outer)
        }
    };
    art.write("reference_profile.csv", |w| io::write_profile_csv(w, &reference))?;
    let l1 = l1_relative_deviation(&profile, |r| density_r1(&smooth, n, r).unwrap_or(f64::NAN), lo, hi);
    report.push(Metric::check("l1_relative_deviation", l1, 0.0, cfg.compare.l1_tol));
    scatter(art, &spectra)?;
    let empirical: Vec<(f64, f64)> = profile.radii.iter().cloned().zip(profile.density.iter().cloned()).collect();
    let analytic: Vec<(f64, f64)> = reference.radii.iter().cloned().zip(reference.density.iter().cloned()).collect();
    art.plot(
        "density.svg",
        PlotData::Curves(vec![
            Series { label: "Monte Carlo".into(), points: empirical },
            Series { label: "large N".into(), points: analytic },
        ]),
        PlotStyle::new("Radial density", "|z|", "R1"),
    )
}

fn radii(cfg: &RunConfig, report: &mut ComparisonReport) -> Result<(), CliError> {
    let potential = cfg.potential.build()?;
    let r = ring_radii(&potential, cfg.sampler.n).map_err(num("ring radii"))?;
    report.push(Metric::info("inner_radius", r.inner));
    report.push(Metric::info("outer_radius", r.outer));
    println!("a = {:.6}\nb = {:.6}", r.inner, r.outer);
    Ok(())
}

fn curve_points(curve: &CorrelationCurve) -> Vec<(f64, f64)> {
    curve.centers().into_iter().zip(curve.values.iter().cloned()).collect()
}

fn reference_points(s_max: f64, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    (0..=400).map(|i| s_max * i as f64 / 400.0).map(|s| (s, f(s))).collect()
}

fn spacings(cfg: &RunConfig, art: &mut Artifacts, report: &mut ComparisonReport) -> Result<(), CliError> {
    let spectra = sample(cfg, art, report)?;
    let potential = cfg.potential.build()?;
    let density = density_source(cfg, &potential, &spectra)?;
    let k = cfg.stats.k;
    let curve = spacing_distribution(&spectra, k, &density, cfg.stats.bins()?).map_err(num("spacings"))?;
    art.write("curve.csv", |w| io::write_curve_csv(w, &curve))?;
    report.push(Metric::info("references", curve.references as f64));
    report.push(Metric::info("histogram_area", curve.area()));
    let mut series = vec![Series { label: format!("P{k} estimate"), points: curve_points(&curve) }];
    if k == 0 {
        let samples = spacing_samples(&spectra, 0, &density).map_err(num("spacings"))?;
        let ks = ks_distance(&samples.values, |s| p0_cdf(s, P0_DEFAULT_TERMS));
        report.push(Metric::check("ks_distance", ks, 0.0, cfg.compare.ks_tol));
        let reference = reference_points(cfg.stats.s_max, |s| p0_spacing(s, P0_DEFAULT_TERMS));
        art.write("reference_curve.csv", |w| io::write_series_csv(w, ("s", "value"), &reference))?;
        series.push(Series { label: "Ginibre P0".into(), points: reference });
    }
    scatter(art, &spectra)?;
    art.plot("spacings.svg", PlotData::Curves(series), PlotStyle::new("Spacing distribution", "s", "P(s)"))
}

/// Largest deviation from the bin-averaged universal `ℛ₂` over `[lo, hi]` and
/// the pooled small-s ratio against `(2/π)s³` on `[lo, lo + 0.3]`.
pub fn r2_deviation(curve: &CorrelationCurve, lo: f64, hi: f64) -> (f64, f64) {
    let antiderivative = |s: f64| (s * s + (-s * s).exp()) / PI;
    let (mut worst, mut num, mut den) = (0.0f64, 0.0, 0.0);
    for (i, v) in curve.values.iter().enumerate() {
        let (a, b) = (curve.edges[i], curve.edges[i + 1]);
        if a < lo - 1e-12 || b > hi + 1e-12 {
            continue;
        }
        worst = worst.max((v - (antiderivative(b) - antiderivative(a)) / (b - a)).abs());
        if b <= lo + 0.3 + 1e-12 {
            num += v * (b - a);
            den += (b.powi(4) - a.powi(4)) / (2.0 * PI);
        }
    }
    (worst, num / den)
}

fn r2(cfg: &RunConfig, art: &mut Artifacts, report: &mut ComparisonReport) -> Result<(), CliError> {
    let spectra = sample(cfg, art, report)?;
    let potential = cfg.potential.build()?;
    let density = density_source(cfg, &potential, &spectra)?;
    let curve = r2_estimate_with(&spectra, &density, cfg.stats.bins()?, cfg.stats.edge_correction.into())
        .map_err(num("r2 estimate"))?;
    debug_assert_eq!(curve.kind, CurveKind::R2);
    art.write("curve.csv", |w| io::write_curve_csv(w, &curve))?;
    let reference = reference_points(cfg.stats.s_max, r2_universal);
    art.write("reference_curve.csv", |w| io::write_series_csv(w, ("s", "value"), &reference))?;
    let (worst, ratio) = r2_deviation(&curve, cfg.compare.s_lo, cfg.compare.s_hi);
    report.push(Metric::info("references", curve.references as f64));
    report.push(Metric::check("max_abs_r2_deviation", worst, 0.0, cfg.compare.r2_tol));
    report.push(Metric::check("small_s_ratio_to_cubic", ratio, 1.0, 0.2));
    scatter(art, &spectra)?;
    art.plot(
        "r2.svg",
        PlotData::Curves(vec![
            Series { label: "R2 estimate".into(), points: curve_points(&curve) },
            Series { label: "universal R2".into(), points: reference },
        ]),
        PlotStyle::new("Two-point correlation", "s", "R2(s)"),
    )
}

fn kernel(cfg: &RunConfig, art: &mut Artifacts, report: &mut ComparisonReport) -> Result<(), CliError> {
    let potential = cfg.potential.build()?;
    let n = cfg.kernel.n;
    let k = finite_n_norms(&potential, n).map_err(num("normalization integrals"))?;
    let norms = k.norms();
    let rows: Vec<(f64, f64)> = norms.iter().enumerate().map(|(l, v)| (l as f64, *v)).collect();
    art.write("norms.csv", |w| io::write_series_csv(w, ("l", "N_l"), &rows))?;
    if matches!(potential.kind(), PotentialKind::Gaussian) {
        let mut factorial = 1.0;
        let mut worst: f64 = 0.0;
        for (l, got) in norms.iter().enumerate() {
            if l > 0 {
                factorial *= l as f64;
            }
            let expected = PI * factorial / (n as f64).powi(l as i32 + 1);
            worst = worst.max((got / expected - 1.0).abs());
        }
        report.push(Metric::check("gaussian_norm_rel_error", worst, 0.0, 1e-10));
    }
    let outer = ring_radii(&potential, n).map(|r| r.outer).unwrap_or(1.0);
    let hi = potential.r_max().min(outer + 3.0);
    let mass = integrate(
        |r| 2.0 * PI * r * k.density(Complex64::new(r, 0.0)).unwrap_or(f64::NAN),
        potential.r_min(),
        hi,
        1e-11,
        1e-12,
    )
    .map_err(num("kernel mass"))?;
    report.push(Metric::check("kernel_mass", mass, n as f64, cfg.compare.mass_tol));
    let points: Vec<Complex64> = cfg.kernel.points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    for (i, z) in points.iter().enumerate() {
        let r1 = k.density(*z).map_err(num("kernel density"))?;
        report.push(Metric::info(format!("r1_point{i}"), r1));
    }
    let rn = rn_correlation(&k, &points).map_err(num("correlation"))?;
    report.push(Metric::info(format!("r{}_correlation", points.len()), rn));
    Ok(())
}

fn qmap(cfg: &RunConfig, art: &mut Artifacts, report: &mut ComparisonReport) -> Result<(), CliError> {
    let q = &cfg.qmap;
    let dissipative = match cfg.kind {
        ExperimentKind::QmapKr => q.alpha > 0.0,
        _ => q.eta > 0.0,
    };
    let spectra = match cfg.kind {
        ExperimentKind::QmapKr => {
            let base = q.rotor()?;
            let unitary = kicked_rotor_matrix(&KickedRotorParams { alpha: 0.0, ..base }).map_err(num("kicked rotor"))?;
            report.push(Metric::check("unitarity_residual", unitary.unitarity_residual(), 0.0, cfg.compare.unitarity_tol));
            if !dissipative {
                let worst = eigenvalues(&unitary)
                    .map_err(num("eigenvalues"))?
                    .iter()
                    .fold(0.0f64, |m, z| m.max((z.norm() - 1.0).abs()));
                report.push(Metric::check("max_modulus_deviation", worst, 0.0, cfg.compare.circle_tol));
            }
            kicked_rotor_ensemble(&base, q.members, q.d_gamma, q.d_kappa).map_err(num("kicked rotor ensemble"))?
        }
        _ => {
            let spectra = rmt_ensemble(q.n, q.eta, cfg.seed, q.members).map_err(num("RMT ensemble"))?;
            if !dissipative {
                let worst = spectra
                    .iter()
                    .flat_map(|s| s.eigenvalues.iter())
                    .fold(0.0f64, |m, z| m.max((z.norm() - 1.0).abs()));
                report.push(Metric::check("max_modulus_deviation", worst, 0.0, cfg.compare.circle_tol));
            }
            spectra
        }
    };
    art.write("spectra.csv", |w| io::write_spectra_csv(w, &spectra))?;
    let mean_modulus = spectra.iter().flat_map(|s| s.radii()).sum::<f64>() / (spectra.len() * q.n) as f64;
    report.push(Metric::info("mean_modulus", mean_modulus));
    if dissipative {
        let density = DensitySource::empirical(&spectra, cfg.stats.density_bins).map_err(num("empirical density"))?;
        let samples = spacing_samples(&spectra, 0, &density).map_err(num("spacings"))?;
        report.push(Metric::info("spacing_samples", samples.values.len() as f64));
        let ks = ks_distance(&samples.values, |s| p0_cdf(s, P0_DEFAULT_TERMS));
        report.push(Metric::check("ks_distance", ks, 0.0, cfg.compare.qmap_ks_tol));
    }
    scatter(art, &spectra)
}
