use crate::analytic::{p0_cdf, p0_spacing, RadialProfile, P0_DEFAULT_TERMS};

/// One-sample Kolmogorov–Smirnov distance `sup |F_emp - F|`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_unstable_by(f64::total_cmp);
    xb.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `Σ|ρ_emp - ρ| dA / Σ ρ dA` over histogram bins whose centres lie in `[lo, hi]`.
pub fn l1_relative_deviation(profile: &RadialProfile, reference: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut diff, mut norm) = (0.0, 0.0);
    for (i, &r) in profile.radii.iter().enumerate() {
        if r < lo || r > hi {
            continue;
        }
        let area = match profile.edges.get(i..i + 2) {
            Some(e) => e[1] * e[1] - e[0] * e[0],
            None => 2.0 * r,
        };
        let expected = reference(r);
        diff += (profile.density[i] - expected).abs() * area;
        norm += expected.abs() * area;
    }
    if norm > 0.0 {
        diff / norm
    } else {
        f64::INFINITY
    }
}

/// Tabulated nearest-neighbour spacing law for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct SpacingLaw {
    step: f64,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl SpacingLaw {
    pub fn new(s_max: f64, points: usize, terms: usize) -> Self {
        let points = points.max(2);
        let step = s_max / (points - 1) as f64;
        let grid = (0..points).map(|i| i as f64 * step);
        let (cdf, pdf) = grid.map(|s| (p0_cdf(s, terms), p0_spacing(s, terms))).unzip();
        Self { step, cdf, pdf }
    }

    fn lookup(table: &[f64], step: f64, s: f64, beyond: f64) -> f64 {
        if s <= 0.0 {
            return table[0];
        }
        let x = s / step;
        let i = x as usize;
        if i + 1 >= table.len() {
            return beyond;
        }
        let w = x - i as f64;
        table[i] * (1.0 - w) + table[i + 1] * w
    }

    pub fn cdf(&self, s: f64) -> f64 {
        Self::lookup(&self.cdf, self.step, s, 1.0)
    }

    pub fn pdf(&self, s: f64) -> f64 {
        Self::lookup(&self.pdf, self.step, s, 0.0)
    }
}

impl Default for SpacingLaw {
    fn default() -> Self {
        Self::new(6.0, 6001, P0_DEFAULT_TERMS)
    }
}
