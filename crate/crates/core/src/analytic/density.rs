//! Large-N spectral density `R₁(r) = (N/π)[V'(r²) + r² V''(r²)]` and the
//! annulus `a <= r <= b` that carries it.
//!
//! The mass inside radius `r` is `N·m(r²)` with `m(t) = t V'(t)`, so the
//! outer radius solves `m(b²) - m(a²) = 1`.

use std::f64::consts::PI;

use crate::error::{argument, Error, Result};
use crate::potentials::Potential;
use crate::quad;

const SCAN_POINTS: usize = 20_000;
const RADIUS_TOL: f64 = 1e-10;

/// Inner and outer radius of the eigenvalue support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingRadii {
    pub inner: f64,
    pub outer: f64,
}

impl RingRadii {
    pub fn contains(&self, r: f64) -> bool {
        r >= self.inner && r <= self.outer
    }

    pub fn is_disk(&self) -> bool {
        self.inner == 0.0
    }
}

/// Eigenvalue mass concentrated on a circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMass {
    pub radius: f64,
    pub mass: f64,
}

/// A radial density curve or histogram, in eigenvalues per unit area.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RadialProfile {
    /// Grid points (analytic curves) or bin centres (histograms).
    pub radii: Vec<f64>,
    pub density: Vec<f64>,
    /// Bin edges, `radii.len() + 1` of them; empty for analytic curves.
    pub edges: Vec<f64>,
    /// Raw bin counts; empty for analytic curves.
    pub counts: Vec<u64>,
    pub point_masses: Vec<PointMass>,
    pub n: usize,
}

impl RadialProfile {
    /// Area integral of the smooth part plus the point masses.
    pub fn total_mass(&self) -> f64 {
        let smooth = if self.edges.is_empty() {
            // trapezoid on 2πrρ
            self.radii
                .windows(2)
                .zip(self.density.windows(2))
                .map(|(r, d)| PI * (r[1] - r[0]) * (r[0] * d[0] + r[1] * d[1]))
                .sum::<f64>()
        } else {
            self.edges
                .windows(2)
                .zip(&self.density)
                .map(|(e, d)| d * PI * (e[1] * e[1] - e[0] * e[0]))
                .sum()
        };
        smooth + self.point_masses.iter().map(|p| p.mass).sum::<f64>()
    }

    /// Linear interpolation of the smooth density; zero outside the grid.
    pub fn interpolate(&self, r: f64) -> f64 {
        let xs = &self.radii;
        if xs.is_empty() || r < xs[0] || r > xs[xs.len() - 1] || r.is_nan() {
            return 0.0;
        }
        let i = xs.partition_point(|&x| x <= r).saturating_sub(1).min(xs.len().saturating_sub(2));
        if xs.len() == 1 {
            return self.density[0];
        }
        let (x0, x1) = (xs[i], xs[i + 1]);
        let w = if x1 > x0 { (r - x0) / (x1 - x0) } else { 0.0 };
        self.density[i] * (1.0 - w) + self.density[i + 1] * w
    }
}

/// `m(t) = t V'(t)`, the normalized mass inside radius `√t`.
fn mass_fn(p: &Potential, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * p.eval_unchecked(t).first
}

/// Whether the support condition `V' >= 0`, `V'' >= 0` holds at `t`.
fn admissible(p: &Potential, t: f64) -> bool {
    let d = p.eval_unchecked(t);
    d.first >= 0.0 && d.second >= 0.0
}

/// Upper end of the radial scan.
fn scan_limit(p: &Potential) -> f64 {
    let t_max = p.natural_t_max();
    if t_max.is_finite() {
        // stay strictly inside an open support
        return t_max.sqrt() * (1.0 - 1e-12);
    }
    let mut r = 1.0_f64;
    while r < 1e12 {
        let t = r * r;
        if admissible(p, t) && mass_fn(p, t) > 2.0 + mass_fn(p, (0.5 * r).powi(2)).abs() {
            return r;
        }
        r *= 2.0;
    }
    r
}

/// Large-N support of a potential, ignoring any hard walls.
///
/// The inner radius is the largest start of an interval on which `V' >= 0`
/// and `V'` is nondecreasing and which holds the full spectrum; the outer
/// radius closes the mass balance by bisection.
pub fn ring_radii(p: &Potential, n: usize) -> Result<RingRadii> {
    let p = p.without_walls();
    let r_hi = scan_limit(&p);
    let grid: Vec<f64> = (1..SCAN_POINTS).map(|i| r_hi * i as f64 / (SCAN_POINTS - 1) as f64).collect();
    let ok: Vec<bool> = grid.iter().map(|&r| admissible(&p, r * r)).collect();

    // candidate starts: the origin, and each false -> true switch
    let mut starts = Vec::new();
    if ok[0] && p.contains(0.0) && admissible(&p, 0.0) {
        starts.push((0usize, 0.0));
    } else if ok[0] {
        starts.push((0usize, grid[0]));
    }
    for i in 1..grid.len() {
        if ok[i] && !ok[i - 1] {
            let a = quad::bisect(
                |r| if admissible(&p, r * r) { 1.0 } else { -1.0 },
                grid[i - 1],
                grid[i],
                1e-14,
            );
            starts.push((i, a));
        }
    }

    let mut best_mass = 0.0_f64;
    for &(first, a) in starts.iter().rev() {
        let m_a = mass_fn(&p, a * a);
        let mut prev = a;
        for i in first..grid.len() {
            let r = grid[i];
            if !ok[i] {
                break;
            }
            let m = mass_fn(&p, r * r) - m_a;
            best_mass = best_mass.max(m);
            if m >= 1.0 {
                let b = quad::bisect(|x| mass_fn(&p, x * x) - m_a - 1.0, prev, r, RADIUS_TOL);
                return Ok(RingRadii { inner: a, outer: b });
            }
            prev = r;
        }
    }
    Err(Error::InfeasibleRing {
        achieved: best_mass * n as f64,
        required: n as f64,
    })
}

/// Large-N density of a smooth potential, precomputed radii included.
#[derive(Clone, Debug)]
pub struct RingDensity {
    potential: Potential,
    n: usize,
    radii: RingRadii,
}

impl RingDensity {
    pub fn new(p: &Potential, n: usize) -> Result<Self> {
        let radii = ring_radii(p, n)?;
        Ok(Self {
            potential: p.without_walls(),
            n,
            radii,
        })
    }

    pub fn radii(&self) -> RingRadii {
        self.radii
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `R₁(r)`, zero outside the ring.
    pub fn at(&self, r: f64) -> f64 {
        if !self.radii.contains(r) {
            return 0.0;
        }
        let t = r * r;
        let d = self.potential.eval_unchecked(t);
        (self.n as f64 / PI) * (d.first + t * d.second)
    }

    /// Samples the density on `points` equally spaced radii across the ring.
    pub fn profile(&self, points: usize) -> RadialProfile {
        let RingRadii { inner, outer } = self.radii;
        let radii = linspace(inner, outer, points.max(2));
        RadialProfile {
            density: radii.iter().map(|&r| self.at(r)).collect(),
            radii,
            n: self.n,
            ..Default::default()
        }
    }
}

/// `R₁(r)` for a smooth potential; zero outside the ring.
pub fn density_r1(p: &Potential, n: usize, r: f64) -> Result<f64> {
    Ok(RingDensity::new(p, n)?.at(r))
}

/// Density with hard walls at `walls = (r1, r2)`.
///
/// Eigenvalues the smooth density would place inside `r1` pile up on the
/// inner wall and those beyond `r2` on the outer wall. In terms of the mass
/// function the wall charges are `N·m(r1²)` and `N·(1 - m(r2²))`, measured
/// from the inner ring edge; a wall outside the ring carries nothing.
pub fn bounded_density(p: &Potential, n: usize, walls: (f64, f64)) -> Result<RadialProfile> {
    let (r1, r2) = walls;
    if !(r1 >= 0.0 && r1 < r2) {
        return Err(argument(format!("walls need 0 <= r1 < r2, got ({r1}, {r2})")));
    }
    let smooth = p.without_walls();
    let ring = RingDensity::new(&smooth, n)?;
    let RingRadii { inner: a, outer: b } = ring.radii();
    let nf = n as f64;
    let m_a = mass_fn(&smooth, a * a);
    let lo = r1.max(a);
    let hi = r2.min(b);
    if lo >= hi {
        return Err(argument(format!(
            "walls ({r1}, {r2}) leave no overlap with the ring [{a}, {b}]"
        )));
    }
    let inner_mass = if r1 > a { nf * (mass_fn(&smooth, r1 * r1) - m_a) } else { 0.0 };
    let outer_mass = if r2 < b { nf * (1.0 - (mass_fn(&smooth, r2 * r2) - m_a)) } else { 0.0 };
    let mut profile = RadialProfile {
        radii: linspace(lo, hi, 201),
        n,
        ..Default::default()
    };
    profile.density = profile.radii.iter().map(|&r| ring.at(r)).collect();
    profile.point_masses = vec![
        PointMass { radius: r1, mass: inner_mass },
        PointMass { radius: r2, mass: outer_mass },
    ];
    Ok(profile)
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
