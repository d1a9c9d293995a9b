//! Universal local statistics of unfolded spectra (density `1/π`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg;

/// Truncation order of the gap-probability product.
pub const P0_DEFAULT_TERMS: usize = 1000;

/// Two-point function of the unfolded separation, `(2/π) s (1 - e^{-s²})`.
pub fn r2_universal(s: f64) -> f64 {
    // -expm1 keeps the s³ behaviour at small s
    2.0 / PI * s * -(-s * s).exp_m1()
}

/// Unfolded kernel `(1/π) exp(-|ζ₁-ζ₂|²/2 + (ζ₁ζ₂* - ζ₁*ζ₂)/2)`.
pub fn unfolded_kernel(z1: Complex64, z2: Complex64) -> Complex64 {
    let cross = z1 * z2.conj();
    // (ζ₁ζ₂* - ζ₁*ζ₂)/2 = i Im(ζ₁ζ₂*)
    let exponent = Complex64::new(-0.5 * (z1 - z2).norm_sqr(), cross.im);
    exponent.exp() / PI
}

/// `ℛ_n(ζ₁..ζ_n)` as the determinant of the unfolded kernel.
pub fn unfolded_correlation(points: &[Complex64]) -> f64 {
    let n = points.len();
    let mat = points
        .iter()
        .flat_map(|&a| points.iter().map(move |&b| unfolded_kernel(a, b)))
        .collect();
    linalg::det(mat, n).re
}

/// Gap-product ingredients at `x = s²`: `ln F` and `Σ_n p_n / C_n`, where
/// `p_j = e^{-x} x^j / j!`, `C_n = Σ_{j<=n} p_j` and `F = Π_{n=1}^{terms} C_n`.
///
/// Lower cumulative sums are accumulated upward and upper tails downward so
/// that both stay accurate when the other is close to one.
fn gap_terms(x: f64, terms: usize) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let top = terms.max((x + 20.0 * x.sqrt() + 40.0).ceil() as usize) + 1;
    let ln_x = x.ln();
    let mut pmf = Vec::with_capacity(top + 1);
    let mut ln_fact = 0.0;
    for j in 0..=top {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        pmf.push((-x + j as f64 * ln_x - ln_fact).exp());
    }
    let mut upper = vec![0.0; top + 1];
    for j in (0..top).rev() {
        upper[j] = upper[j + 1] + pmf[j + 1];
    }
    let (mut ln_f, mut ratio_sum, mut lower) = (0.0, 0.0, pmf[0]);
    for n in 1..=terms {
        lower += pmf[n];
        ln_f += if lower < 0.5 { lower.ln() } else { (-upper[n]).ln_1p() };
        ratio_sum += pmf[n] / lower;
    }
    (ln_f, ratio_sum)
}

/// Probability that an unfolded disk of radius `s` around an eigenvalue holds
/// no other eigenvalue, `Π_n e_n(s²) e^{-s²}`.
pub fn gap_probability(s: f64, terms: usize) -> f64 {
    gap_terms(s * s, terms).0.exp()
}

/// Nearest-neighbour spacing density `P₀(s) = -dF/ds`, using
/// `d/ds ln(e_n(s²) e^{-s²}) = -2s (s^{2n}/n!) / e_n(s²)`.
pub fn p0_spacing(s: f64, terms: usize) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let (ln_f, ratio_sum) = gap_terms(s * s, terms);
    ln_f.exp() * 2.0 * s * ratio_sum
}

/// Cumulative distribution of the nearest-neighbour spacing, `1 - F(s)`.
pub fn p0_cdf(s: f64, terms: usize) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    -gap_terms(s * s, terms).0.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn r2_values() {
        assert_eq!(r2_universal(0.0), 0.0);
        assert!((r2_universal(1.0) - 0.402_420_446_270_304_7).abs() < 1e-15);
        for s in [1e-3, 1e-4] {
            let ratio = r2_universal(s) / s.powi(3);
            assert!((ratio - 2.0 / PI).abs() < 1e-5);
        }
        // ∫ ℛ₂(ζ₁,ζ₂) δ(s - |ζ₁-ζ₂|) d²ζ₂ = 2πs ℛ₂(ζ₁,ζ₂)
        let s: f64 = 0.8;
        let pair = unfolded_correlation(&[Complex64::new(0.0, 0.0), Complex64::new(s, 0.0)]);
        assert!((2.0 * PI * s * pair - r2_universal(s)).abs() < 1e-14);
    }

    #[test]
    fn p0_small_s_is_cubic() {
        assert_eq!(p0_spacing(0.0, P0_DEFAULT_TERMS), 0.0);
        for s in [1e-2, 1e-3] {
            let ratio = p0_spacing(s, P0_DEFAULT_TERMS) / s.powi(3);
            assert!((ratio - 2.0).abs() < 1e-3, "{ratio}");
        }
    }

    #[test]
    fn p0_is_normalized() {
        let total = quad::integrate(|s| p0_spacing(s, 1000), 0.0, 6.0, 1e-10, 0.0).unwrap();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
        assert!((p0_cdf(6.0, 1000) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p0_density_is_derivative_of_cdf() {
        for s in [0.3, 0.9, 1.4, 2.5] {
            let h = 1e-5;
            let fd = (p0_cdf(s + h, 1000) - p0_cdf(s - h, 1000)) / (2.0 * h);
            assert!((fd - p0_spacing(s, 1000)).abs() < 1e-7);
        }
    }

    #[test]
    fn gap_product_matches_naive_product() {
        // direct product of truncated exponentials, fine at moderate s
        let s: f64 = 1.3;
        let x = s * s;
        let mut prod = 1.0;
        let (mut e_n, mut term) = (1.0, 1.0);
        for n in 1..=200 {
            term *= x / n as f64;
            e_n += term;
            prod *= e_n * (-x).exp();
        }
        assert!((gap_probability(s, 200) - prod).abs() < 1e-13);
    }

    #[test]
    fn unfolded_kernel_examples() {
        let z = Complex64::new(0.7, -1.2);
        assert!((unfolded_kernel(z, z) - Complex64::new(1.0 / PI, 0.0)).norm() < 1e-15);
        let k = unfolded_kernel(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        assert!((k.norm() - (-1.0f64).exp() / PI).abs() < 1e-15);
        let phase = k * PI / (-1.0f64).exp();
        assert!((phase.norm() - 1.0).abs() < 1e-15);
        let r2 = unfolded_correlation(&[Complex64::new(0.0, 0.0), Complex64::new(0.6, 0.8)]);
        assert!((r2 - (1.0 - (-1.0f64).exp()) / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn phase_factors_cancel_in_determinants() {
        let pts = [
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.7, 0.4),
            Complex64::new(0.5, -0.9),
            Complex64::new(1.1, 0.3),
        ];
        let n = pts.len();
        let base = unfolded_correlation(&pts);
        let phases: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, 0.37 + 1.9 * j as f64)).collect();
        let mut mat = Vec::new();
        for j in 0..n {
            for k in 0..n {
                mat.push(phases[j] * unfolded_kernel(pts[j], pts[k]) * phases[k].conj());
            }
        }
        let rotated = linalg::det(mat, n);
        assert!((rotated.re - base).abs() < 1e-12 && rotated.im.abs() < 1e-12);
    }
}
