//! Run configuration: a TOML document plus `key=value` overrides.

use std::f64::consts::PI;

use ringlab::qmaps::KickedRotorParams;
use ringlab::sampler::SamplerConfig;
use ringlab::stats::{BinSpec, EdgeCorrection};
use ringlab::Potential;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Sample,
    Density,
    Radii,
    Spacings,
    R2,
    Kernel,
    QmapKr,
    QmapRmt,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sample => "sample",
            Self::Density => "density",
            Self::Radii => "radii",
            Self::Spacings => "spacings",
            Self::R2 => "r2",
            Self::Kernel => "kernel",
            Self::QmapKr => "qmap-kr",
            Self::QmapRmt => "qmap-rmt",
        }
    }

    fn uses_potential(self) -> bool {
        !matches!(self, Self::QmapKr | Self::QmapRmt)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialName {
    #[default]
    Gaussian,
    Quartic,
    Log,
    TruncatedLog,
    Cosine,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Cosine frequency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Cosine support radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walls: Option<[f64; 2]>,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential, CliError> {
        let need = |v: Option<f64>, field: &str| {
            v.ok_or_else(|| CliError::Config(format!("potential.{field} is required for {:?} potentials", self.kind)))
        };
        let p = match self.kind {
            PotentialName::Gaussian => Potential::gaussian(),
            PotentialName::Quartic => Potential::quartic(need(self.alpha, "alpha")?),
            PotentialName::Log => Potential::log(need(self.alpha, "alpha")?),
            PotentialName::TruncatedLog => Potential::truncated_log(need(self.mu, "mu")?).map_err(config_error)?,
            PotentialName::Cosine => {
                let n = self
                    .n
                    .ok_or_else(|| CliError::Config("potential.n is required for cosine potentials".into()))?;
                Potential::cosine(n, need(self.cutoff, "cutoff")?).map_err(config_error)?
            }
        };
        match self.walls {
            Some([inner, outer]) => p.with_walls(inner, outer).map_err(config_error),
            None => Ok(p),
        }
    }
}

fn config_error(e: ringlab::Error) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSpec {
    pub n: usize,
    pub burn_sweeps: usize,
    pub sample_sweeps: usize,
    pub thin: usize,
    pub chains: usize,
    pub target_acceptance: f64,
    pub jump_probability: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            n: 500,
            burn_sweeps: 2000,
            sample_sweeps: 5000,
            thin: 50,
            chains: 1,
            target_acceptance: 0.3,
            jump_probability: 0.02,
        }
    }
}

impl SamplerSpec {
    pub fn build(&self, potential: Potential, seed: u64) -> Result<SamplerConfig, CliError> {
        let mut cfg = SamplerConfig::new(potential, self.n, seed);
        cfg.burn_sweeps = self.burn_sweeps;
        cfg.sample_sweeps = self.sample_sweeps;
        cfg.thin = self.thin;
        cfg.chains = self.chains;
        cfg.target_acceptance = self.target_acceptance;
        cfg.jump_probability = self.jump_probability;
        cfg.validate().map_err(config_error)?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityChoice {
    Analytic,
    #[default]
    Empirical,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionChoice {
    None,
    Isotropic,
    #[default]
    Intensity,
}

impl From<CorrectionChoice> for EdgeCorrection {
    fn from(c: CorrectionChoice) -> Self {
        match c {
            CorrectionChoice::None => EdgeCorrection::None,
            CorrectionChoice::Isotropic => EdgeCorrection::Isotropic,
            CorrectionChoice::Intensity => EdgeCorrection::Intensity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSpec {
    pub density: DensityChoice,
    /// Histogram bins behind the empirical unfolding density.
    pub density_bins: usize,
    /// Bins of the reported radial density.
    pub radial_bins: usize,
    pub s_bins: usize,
    pub s_max: f64,
    /// Neighbour order for `spacings`.
    pub k: usize,
    pub edge_correction: CorrectionChoice,
}

impl Default for StatsSpec {
    fn default() -> Self {
        Self {
            density: DensityChoice::Empirical,
            density_bins: 200,
            radial_bins: 100,
            s_bins: 40,
            s_max: 4.0,
            k: 0,
            edge_correction: CorrectionChoice::Intensity,
        }
    }
}

impl StatsSpec {
    pub fn bins(&self) -> Result<BinSpec, CliError> {
        BinSpec::new(self.s_bins, self.s_max).map_err(config_error)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QmapSpec {
    pub n: usize,
    pub kappa: f64,
    /// Defaults to `π / 2N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    pub gamma: f64,
    pub alpha: f64,
    pub eta: f64,
    pub members: usize,
    pub d_gamma: f64,
    pub d_kappa: f64,
}

impl Default for QmapSpec {
    fn default() -> Self {
        Self {
            n: 501,
            kappa: 10.0,
            theta0: None,
            gamma: 0.7,
            alpha: 0.0,
            eta: 0.05,
            members: 20,
            d_gamma: 0.0,
            d_kappa: 0.0,
        }
    }
}

impl QmapSpec {
    pub fn rotor(&self) -> Result<KickedRotorParams, CliError> {
        let prm = KickedRotorParams {
            n: self.n,
            kappa: self.kappa,
            theta0: self.theta0.unwrap_or(PI / (2.0 * self.n as f64)),
            gamma: self.gamma,
            alpha: self.alpha,
        };
        prm.validate().map_err(config_error)?;
        Ok(prm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSpec {
    pub n: usize,
    /// Points `[re, im]` at which the finite-N correlation is evaluated.
    pub points: Vec<[f64; 2]>,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            n: 2,
            points: vec![[0.0, 0.0], [0.5, 0.0]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSpec {
    pub l1_tol: f64,
    pub ks_tol: f64,
    pub qmap_ks_tol: f64,
    pub r2_tol: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub wall_rel_tol: f64,
    pub unitarity_tol: f64,
    pub circle_tol: f64,
    pub mass_tol: f64,
}

impl Default for CompareSpec {
    fn default() -> Self {
        Self {
            l1_tol: 0.05,
            ks_tol: 0.03,
            qmap_ks_tol: 0.05,
            r2_tol: 0.02,
            s_lo: 0.1,
            s_hi: 3.0,
            wall_rel_tol: 0.1,
            unitarity_tol: 1e-10,
            circle_tol: 1e-8,
            mass_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub stats: StatsSpec,
    #[serde(default)]
    pub qmap: QmapSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub compare: CompareSpec,
}

impl RunConfig {
    /// Parses a document, then applies `key=value` overrides and an optional seed.
    pub fn load(text: &str, overrides: &[String], seed: Option<u64>) -> Result<Self, CliError> {
        if overrides.is_empty() && seed.is_none() {
            return Self::parse(text);
        }
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        if let Some(seed) = seed {
            let seed = i64::try_from(seed).map_err(|_| CliError::Config(format!("seed {seed} exceeds {}", i64::MAX)))?;
            table.insert("seed".into(), toml::Value::Integer(seed));
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks that the fields the chosen kind reads are present and sane.
    pub fn validate(&self) -> Result<(), CliError> {
        if i64::try_from(self.seed).is_err() {
            return Err(CliError::Config(format!("seed {} exceeds {}", self.seed, i64::MAX)));
        }
        if self.kind.uses_potential() {
            self.potential.build()?;
        }
        match self.kind {
            ExperimentKind::Sample | ExperimentKind::Density | ExperimentKind::Spacings | ExperimentKind::R2 => {
                self.sampler.build(self.potential.build()?, self.seed)?;
                self.stats.bins()?;
                if self.sampler.sample_sweeps < self.sampler.thin {
                    return Err(CliError::Config("sampler.sample_sweeps must be at least sampler.thin".into()));
                }
            }
            ExperimentKind::Kernel => {
                if self.kernel.n == 0 || self.kernel.points.is_empty() {
                    return Err(CliError::Config("kernel.n and kernel.points must be nonempty".into()));
                }
            }
            ExperimentKind::QmapKr | ExperimentKind::QmapRmt => {
                self.qmap.rotor()?;
                if self.qmap.members == 0 || self.qmap.eta < 0.0 {
                    return Err(CliError::Config("qmap.members must be positive and qmap.eta nonnegative".into()));
                }
            }
            ExperimentKind::Radii => {}
        }
        Ok(())
    }
}

/// Sets a dotted key such as `sampler.n=1000`; the value is read as a TOML
/// literal and falls back to a bare string.
pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {item:?} is not of the form key=value")))?;
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key {key:?} is malformed")));
    }
    let (last, parents) = path.split_last().expect("split yields one part");
    let mut node = table;
    for part in parents {
        node = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override key {key:?}: {part} is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}
