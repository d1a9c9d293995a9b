//! Orthogonal-polynomial kernel of the finite-N ensemble.
//!
//! The monomials `z^l` are orthogonal under the radial weight
//! `e^{-N V(|z|²)}`; their norms `N_l = π ∫ t^l e^{-N V(t)} dt` are obtained
//! by adaptive quadrature and stored as logarithms, since they span hundreds
//! of decades once N reaches a few hundred.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{argument, Error, Result};
use crate::linalg;
use crate::potentials::Potential;
use crate::quad;

const NORM_REL_TOL: f64 = 1e-12;
// e^{-60} relative to the peak is far below the quadrature tolerance
const TAIL_DROP: f64 = 60.0;

/// Norm table for the finite-N kernel.
#[derive(Clone, Debug)]
pub struct FiniteNKernel {
    n: usize,
    potential: Potential,
    ln_norms: Vec<f64>,
}

impl FiniteNKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `ln N_l` for `l = 0..N`.
    pub fn ln_norms(&self) -> &[f64] {
        &self.ln_norms
    }

    /// `N_l` for `l = 0..N`; may underflow to zero for large N.
    pub fn norms(&self) -> Vec<f64> {
        self.ln_norms.iter().map(|l| l.exp()).collect()
    }

    /// `R₁(z) = K(z, z)`.
    pub fn density(&self, z: Complex64) -> Result<f64> {
        kernel_finite_n(self, z, z).map(|k| k.re)
    }
}

/// Radial range `[t_lo, t_hi]` of the weight, walls included.
fn weight_range(p: &Potential) -> (f64, f64) {
    let t_lo = p.r_min().powi(2);
    let t_hi = match p.walls() {
        Some(w) => w.outer * w.outer,
        None => p.natural_t_max(),
    };
    (t_lo, t_hi)
}

/// Computes `N_l`, `l = 0..N`, by quadrature of the radial integral.
pub fn finite_n_norms(p: &Potential, n: usize) -> Result<FiniteNKernel> {
    if n == 0 {
        return Err(argument("matrix dimension must be positive"));
    }
    let ln_norms = (0..n).map(|l| ln_norm(p, n, l)).collect::<Result<Vec<_>>>()?;
    Ok(FiniteNKernel {
        n,
        potential: p.clone(),
        ln_norms,
    })
}

fn ln_norm(p: &Potential, n: usize, l: usize) -> Result<f64> {
    let nf = n as f64;
    let lf = l as f64;
    let (t_lo, t_hi) = weight_range(p);
    // log of the integrand t^l e^{-N V(t)}
    let f = |t: f64| -> f64 {
        if t <= 0.0 {
            if l > 0 {
                return f64::NEG_INFINITY;
            }
            if !p.contains(0.0) {
                return f64::NEG_INFINITY;
            }
            return -nf * p.value_unchecked(0.0);
        }
        lf * t.ln() - nf * p.value_unchecked(t)
    };

    // local power law t^q near the origin: integrable iff q > -1
    if t_lo == 0.0 {
        let (t1, t2) = (1e-10_f64, 1e-20_f64);
        let q = (f(t1) - f(t2)) / (t1.ln() - t2.ln());
        if q.is_finite() && q <= -1.0 + 1e-9 {
            return Err(Error::Divergent { l });
        }
    }

    let upper = if t_hi.is_finite() {
        t_hi * (1.0 - 1e-15)
    } else {
        let mut t = 1.0_f64;
        let mut peak = f(t);
        loop {
            let next = f(2.0 * t);
            if !next.is_nan() {
                peak = peak.max(next);
            }
            if next < peak - TAIL_DROP && next < f(t) {
                break 2.0 * t;
            }
            t *= 2.0;
            if t > 1e15 {
                return Err(Error::Divergent { l });
            }
        }
    };

    // locate the peak on a grid, then integrate exp(f - f_peak)
    const GRID: usize = 4000;
    let (mut t_peak, mut f_peak) = (t_lo, f64::NEG_INFINITY);
    for i in 0..=GRID {
        let t = t_lo + (upper - t_lo) * i as f64 / GRID as f64;
        let v = f(t);
        if v > f_peak {
            f_peak = v;
            t_peak = t;
        }
    }
    if !f_peak.is_finite() {
        return Err(Error::Divergent { l });
    }
    let h = (upper - t_lo) / GRID as f64;
    let mut breaks = vec![t_lo];
    for b in [t_peak - 4.0 * h, t_peak, t_peak + 4.0 * h] {
        if b > *breaks.last().unwrap() && b < upper {
            breaks.push(b);
        }
    }
    breaks.push(upper);
    let integral = quad::integrate_pieces(|t| (f(t) - f_peak).exp(), &breaks, NORM_REL_TOL, 0.0)?;
    if !(integral > 0.0) || !integral.is_finite() {
        return Err(Error::Divergent { l });
    }
    Ok(PI.ln() + f_peak + integral.ln())
}

/// Compensated complex accumulator.
#[derive(Default)]
struct KahanSum {
    sum: Complex64,
    carry: Complex64,
}

impl KahanSum {
    fn add(&mut self, x: Complex64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `K_N(z₁, z₂) = e^{-N[V(|z₁|²)+V(|z₂|²)]/2} Σ_l (z₁ z₂*)^l / N_l`.
pub fn kernel_finite_n(k: &FiniteNKernel, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    let nf = k.n as f64;
    let v1 = k.potential.eval(z1.norm_sqr())?.value;
    let v2 = k.potential.eval(z2.norm_sqr())?.value;
    let prefactor = -0.5 * nf * (v1 + v2);
    let w = z1 * z2.conj();
    if w.norm_sqr() == 0.0 {
        return Ok(Complex64::new((prefactor - k.ln_norms[0]).exp(), 0.0));
    }
    let (ln_r, phase) = (w.norm().ln(), w.arg());
    let log_mags: Vec<f64> = k
        .ln_norms
        .iter()
        .enumerate()
        .map(|(l, ln_n)| l as f64 * ln_r - ln_n + prefactor)
        .collect();
    let top = log_mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = KahanSum::default();
    for (l, lm) in log_mags.iter().enumerate() {
        acc.add(Complex64::from_polar((lm - top).exp(), l as f64 * phase));
    }
    Ok(acc.sum * top.exp())
}

/// `R_n(z₁..z_n) = det[K_N(z_j, z_k)]`.
pub fn rn_correlation(k: &FiniteNKernel, points: &[Complex64]) -> Result<f64> {
    let m = points.len();
    if m == 0 || m > k.n {
        return Err(argument(format!("need 1 <= n <= N = {}, got n = {m}", k.n)));
    }
    let mut mat = Vec::with_capacity(m * m);
    for &zj in points {
        for &zk in points {
            mat.push(kernel_finite_n(k, zj, zk)?);
        }
    }
    Ok(linalg::det(mat, m).re.max(0.0))
}

/// Large-N kernel `(N/π) e^{-N[V(|z₁|²)+V(|z₂|²)]/2} [w V'(w)]' e^{N V(w)}`,
/// `w = z₁ z₂*`, with the prime taken in `w`.
pub fn kernel_large_n(p: &Potential, n: usize, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    if !p.is_complex_evaluable() {
        return Err(Error::Unsupported { kind: p.name().to_string() });
    }
    let nf = n as f64;
    let w = z1 * z2.conj();
    let [vw, dv, d2v] = p.derivs_complex(w)?;
    let v1 = p.eval(z1.norm_sqr())?.value;
    let v2 = p.eval(z2.norm_sqr())?.value;
    let exponent = nf * vw - 0.5 * nf * (v1 + v2);
    Ok((nf / PI) * (dv + w * d2v) * exponent.exp())
}
