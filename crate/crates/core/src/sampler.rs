//! Metropolis sampling of the eigenvalue joint density
//! `P(z₁..z_N) ∝ Π_{j<k} |z_j - z_k|^β exp(-N Σ V(|z_l|²))`, `β = 2`,
//! read as a two-dimensional log-gas with energy
//! `W = -Σ_{j<k} ln|z_j - z_k|² + N Σ_l V(|z_l|²)`.
//!
//! A sweep visits every particle once in index order. Each visit is either a
//! local move (isotropic Gaussian displacement) or, with a small probability,
//! a jump to a uniform point of a fixed annulus; the jump lets particles
//! cross the potential barriers between wells. Both proposals are symmetric,
//! so the acceptance ratio is `exp(-ΔW)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::analytic::ring_radii;
use crate::error::{argument, Result};
use crate::par;
use crate::potentials::Potential;
use crate::rng::{self, StreamRng};
use crate::stats::{Provenance, Spectrum};

/// Dyson index of the ensemble. Only the unitary-invariant class is sampled.
pub const BETA: f64 = 2.0;

const ADAPT_FACTOR: f64 = 1.05;

/// Where the chain starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitLayout {
    /// Uniformly over the predicted large-N ring.
    #[default]
    Ring,
    /// Uniformly over the whole support (needs a bounded support).
    Support,
}

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub n: usize,
    pub potential: Potential,
    pub burn_sweeps: usize,
    /// Sweeps run after burn-in, per chain.
    pub sample_sweeps: usize,
    /// A configuration is recorded every `thin` post-burn-in sweeps.
    pub thin: usize,
    pub target_acceptance: f64,
    pub seed: u64,
    /// Independent chains, merged in chain order.
    pub chains: usize,
    /// Per-visit probability of a uniform jump proposal.
    pub jump_probability: f64,
    pub init: InitLayout,
}

impl SamplerConfig {
    /// Defaults: 2000 burn-in sweeps, thinning 50, 30% target acceptance.
    pub fn new(potential: Potential, n: usize, seed: u64) -> Self {
        Self {
            n,
            potential,
            burn_sweeps: 2000,
            sample_sweeps: 5000,
            thin: 50,
            target_acceptance: 0.3,
            seed,
            chains: 1,
            jump_probability: 0.02,
            init: InitLayout::Ring,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(argument(format!("need N >= 2 eigenvalues, got {}", self.n)));
        }
        if self.thin == 0 || self.chains == 0 {
            return Err(argument("thinning interval and chain count must be positive"));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(argument(format!(
                "target acceptance must lie in (0, 1), got {}",
                self.target_acceptance
            )));
        }
        if !(0.0..1.0).contains(&self.jump_probability) {
            return Err(argument("jump probability must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Number of configurations each chain emits.
    pub fn samples_per_chain(&self) -> usize {
        self.sample_sweeps / self.thin
    }
}

/// Annulus `lo <= |z| <= hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Annulus {
    lo: f64,
    hi: f64,
}

impl Annulus {
    fn sample(&self, rng: &mut StreamRng) -> Complex64 {
        let u: f64 = rng.random();
        let r = (self.lo * self.lo + u * (self.hi * self.hi - self.lo * self.lo)).sqrt();
        Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
    }

    fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r >= self.lo && r <= self.hi
    }

    fn area(&self) -> f64 {
        PI * (self.hi * self.hi - self.lo * self.lo)
    }
}

/// Current configuration of one Markov chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    positions: Vec<Complex64>,
    log_weight: f64,
    step_scale: f64,
    accept_count: u64,
    propose_count: u64,
    jump_accept_count: u64,
    jump_propose_count: u64,
    jump_probability: f64,
    jump_region: Annulus,
    rng: StreamRng,
}

/// Initial annulus and jump annulus for a potential.
fn layout(p: &Potential, n: usize, init: InitLayout) -> Result<(Annulus, Annulus)> {
    let ring = ring_radii(p, n)?;
    let (r_min, r_max) = (p.r_min(), p.r_max());
    let ring_start = Annulus {
        lo: ring.inner.max(r_min),
        hi: ring.outer.min(r_max),
    };
    let ring_start = if ring_start.lo < ring_start.hi {
        ring_start
    } else {
        Annulus { lo: r_min, hi: r_max }
    };
    let jump = Annulus {
        lo: r_min,
        hi: if r_max.is_finite() { r_max } else { 1.5 * ring.outer },
    };
    let start = match init {
        InitLayout::Ring => ring_start,
        InitLayout::Support if r_max.is_finite() => jump,
        InitLayout::Support => return Err(argument("support layout needs a bounded support")),
    };
    Ok((start, jump))
}

impl ChainState {
    /// Draws an initial configuration for chain `chain` of `cfg`.
    pub fn init(cfg: &SamplerConfig, chain: u64) -> Result<Self> {
        cfg.validate()?;
        let p = &cfg.potential;
        let (start, jump_region) = layout(p, cfg.n, cfg.init)?;
        let mut rng = rng::stream(cfg.seed, chain);
        let mut positions = Vec::with_capacity(cfg.n);
        while positions.len() < cfg.n {
            let z = start.sample(&mut rng);
            // open supports exclude their boundary circle
            if p.contains(z.norm_sqr()) {
                positions.push(z);
            }
        }
        let mut state = Self {
            positions,
            log_weight: 0.0,
            step_scale: 0.5 * (start.area() / cfg.n as f64).sqrt(),
            accept_count: 0,
            propose_count: 0,
            jump_accept_count: 0,
            jump_propose_count: 0,
            jump_probability: cfg.jump_probability,
            jump_region,
            rng,
        };
        state.log_weight = state.recompute_log_weight(p);
        Ok(state)
    }

    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    /// Incrementally tracked `-W`.
    pub fn log_weight(&self) -> f64 {
        self.log_weight
    }

    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    pub fn set_step_scale(&mut self, s: f64) {
        self.step_scale = s;
    }

    /// (accepted, proposed) local moves.
    pub fn local_counts(&self) -> (u64, u64) {
        (self.accept_count, self.propose_count)
    }

    /// (accepted, proposed) jump moves.
    pub fn jump_counts(&self) -> (u64, u64) {
        (self.jump_accept_count, self.jump_propose_count)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.propose_count == 0 {
            return 0.0;
        }
        self.accept_count as f64 / self.propose_count as f64
    }

    /// `-W` evaluated from scratch in `O(N²)`.
    pub fn recompute_log_weight(&self, p: &Potential) -> f64 {
        let n = self.positions.len();
        let nf = n as f64;
        let mut pair = 0.0;
        for j in 0..n {
            for k in j + 1..n {
                pair += (self.positions[j] - self.positions[k]).norm_sqr().ln();
            }
        }
        let confine: f64 = self.positions.iter().map(|z| p.value_unchecked(z.norm_sqr())).sum();
        0.5 * BETA * pair - nf * confine
    }

    /// `Σ_{k≠j} ln(|z' - z_k|² / |z_j - z_k|²)`.
    fn interaction_delta(&self, j: usize, proposal: Complex64) -> f64 {
        let current = self.positions[j];
        let mut acc = 0.0;
        let (mut num, mut den) = (1.0_f64, 1.0_f64);
        let (head, tail) = self.positions.split_at(j);
        for &zk in head.iter().chain(&tail[1..]) {
            num *= (proposal - zk).norm_sqr();
            den *= (current - zk).norm_sqr();
            // keep both running products inside the normal range
            if !(1e-120..1e120).contains(&num) || !(1e-120..1e120).contains(&den) {
                acc += num.ln() - den.ln();
                num = 1.0;
                den = 1.0;
            }
        }
        acc + num.ln() - den.ln()
    }

    /// Metropolis test of moving particle `j` to `proposal`.
    fn try_move(&mut self, p: &Potential, j: usize, proposal: Complex64) -> bool {
        let t_new = proposal.norm_sqr();
        if !p.contains(t_new) {
            return false;
        }
        let nf = self.positions.len() as f64;
        let t_old = self.positions[j].norm_sqr();
        let delta = 0.5 * BETA * self.interaction_delta(j, proposal)
            - nf * (p.value_unchecked(t_new) - p.value_unchecked(t_old));
        if delta.is_nan() || delta == f64::NEG_INFINITY {
            return false;
        }
        let accept = delta >= 0.0 || self.rng.random::<f64>().ln() < delta;
        if accept {
            self.positions[j] = proposal;
            self.log_weight += delta;
        }
        accept
    }

    /// One visit of particle `j`: a local or a jump proposal.
    pub fn step_particle(&mut self, p: &Potential, j: usize) -> bool {
        if self.jump_probability > 0.0 && self.rng.random::<f64>() < self.jump_probability {
            self.jump_propose_count += 1;
            // the uniform proposal is symmetric only between points of the region
            if !self.jump_region.contains(self.positions[j]) {
                return false;
            }
            let proposal = self.jump_region.sample(&mut self.rng);
            let accepted = self.try_move(p, j, proposal);
            self.jump_accept_count += accepted as u64;
            return accepted;
        }
        let (re, im): (f64, f64) = (self.rng.sample(StandardNormal), self.rng.sample(StandardNormal));
        let proposal = self.positions[j] + Complex64::new(re, im) * (self.step_scale * std::f64::consts::FRAC_1_SQRT_2);
        self.propose_count += 1;
        let accepted = self.try_move(p, j, proposal);
        self.accept_count += accepted as u64;
        accepted
    }

    /// Visits every particle once; returns the local-move acceptance of the sweep.
    pub fn sweep(&mut self, p: &Potential) -> f64 {
        let (a0, p0) = (self.accept_count, self.propose_count);
        for j in 0..self.positions.len() {
            self.step_particle(p, j);
        }
        let proposed = self.propose_count - p0;
        if proposed == 0 {
            return 0.0;
        }
        (self.accept_count - a0) as f64 / proposed as f64
    }

    /// Sweep followed by a multiplicative step-size update toward `target`.
    pub fn adaptive_sweep(&mut self, p: &Potential, target: f64) -> f64 {
        let rate = self.sweep(p);
        if rate > target {
            self.step_scale *= ADAPT_FACTOR;
        } else {
            self.step_scale /= ADAPT_FACTOR;
        }
        rate
    }
}

/// Output of one chain.
#[derive(Clone, Debug)]
pub struct ChainRun {
    pub chain: u64,
    pub spectra: Vec<Spectrum>,
    pub acceptance: f64,
    pub step_scale: f64,
    pub jump_acceptance: f64,
}

/// Runs one chain: adaptive burn-in, then frozen-step sampling with thinning.
pub fn run_chain(cfg: &SamplerConfig, chain: u64) -> Result<ChainRun> {
    let mut state = ChainState::init(cfg, chain)?;
    let p = &cfg.potential;
    for _ in 0..cfg.burn_sweeps {
        state.adaptive_sweep(p, cfg.target_acceptance);
    }
    let (a0, p0) = state.local_counts();
    let (ja0, jp0) = state.jump_counts();
    let mut spectra = Vec::with_capacity(cfg.samples_per_chain());
    let params: Vec<(String, f64)> = p.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for sweep in 1..=cfg.sample_sweeps {
        state.sweep(p);
        if sweep % cfg.thin == 0 {
            spectra.push(Spectrum::new(
                state.positions.clone(),
                Provenance::McSampled {
                    seed: cfg.seed,
                    chain,
                    sweep: (cfg.burn_sweeps + sweep) as u64,
                },
                params.clone(),
            )?);
        }
    }
    let (a1, p1) = state.local_counts();
    let (ja1, jp1) = state.jump_counts();
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(ChainRun {
        chain,
        spectra,
        acceptance: ratio(a1 - a0, p1 - p0),
        step_scale: state.step_scale,
        jump_acceptance: ratio(ja1 - ja0, jp1 - jp0),
    })
}

/// Runs all chains of `cfg` (in parallel when enabled) in chain order.
pub fn run_chains(cfg: &SamplerConfig) -> Result<Vec<ChainRun>> {
    cfg.validate()?;
    par::map_indexed(cfg.chains, |c| run_chain(cfg, c as u64))
        .into_iter()
        .collect()
}

/// Runs the sampler and returns every recorded configuration.
pub fn run(cfg: &SamplerConfig) -> Result<Vec<Spectrum>> {
    Ok(run_chains(cfg)?.into_iter().flat_map(|c| c.spectra).collect())
}
