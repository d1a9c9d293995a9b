//! Dissipative quantum kicked rotor and its random-matrix surrogate.
//!
//! Both models produce dense non-hermitian matrices whose complex spectra are
//! fed to the same unfolding and spacing pipeline as the Monte Carlo ensembles.

use std::f64::consts::PI;
use std::io::{Read, Write};

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{argument, Error, Result};
use crate::par;
use crate::rng;
use crate::stats::{Provenance, Spectrum};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Magic bytes opening a binary matrix dump.
pub const DUMP_MAGIC: [u8; 8] = *b"RLMAT\0\0\x01";

impl ComplexMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(argument(format!("{} entries cannot form a {n}x{n} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(argument("matrix entries must be finite"));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self::from_faer(&(self.to_faer() * other.to_faer()))
    }

    /// `max |(A A†)_ij - δ_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let a = self.to_faer();
        let g = &a * a.adjoint();
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(delta, 0.0)).norm());
            }
        }
        worst
    }

    /// `max |A_ij - A_ji*|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub(crate) fn from_faer(m: &Mat<Complex64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    /// Little-endian dump: magic, `N` as u64, then row-major `re, im` pairs.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&DUMP_MAGIC)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for z in &self.data {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if header[..8] != DUMP_MAGIC {
            return Err(argument("not a matrix dump: bad magic"));
        }
        let n = u64::from_le_bytes(header[8..].try_into().expect("8 bytes")) as usize;
        let mut buf = vec![0u8; n * n * 16];
        r.read_exact(&mut buf)?;
        let data = buf
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        Self::from_rows(n, data)
    }
}

/// Parameters of the kicked-rotor Floquet operator (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickedRotorParams {
    /// Odd Hilbert-space dimension.
    pub n: usize,
    pub kappa: f64,
    pub theta0: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl KickedRotorParams {
    /// Defaults: κ = 10, θ₀ = π/2N, γ = 0.7, no dissipation.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            kappa: 10.0,
            theta0: PI / (2.0 * n as f64),
            gamma: 0.7,
            alpha: 0.0,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_multiple_of(2) {
            return Err(argument(format!("kicked rotor dimension must be odd, got {}", self.n)));
        }
        if !(self.alpha >= 0.0) {
            return Err(argument(format!("dissipation must be nonnegative, got {}", self.alpha)));
        }
        if ![self.kappa, self.theta0, self.gamma, self.alpha].iter().all(|x| x.is_finite()) {
            return Err(argument("kicked rotor parameters must be finite"));
        }
        Ok(())
    }

    fn half(&self) -> i64 {
        (self.n as i64 - 1) / 2
    }

    /// Kick phase `exp(-i κ cos(2πm/N + θ₀))` for `m = -N'..N'`.
    fn kicks(&self) -> Vec<Complex64> {
        let nf = self.n as f64;
        (-self.half()..=self.half())
            .map(|m| Complex64::from_polar(1.0, -self.kappa * (2.0 * PI * m as f64 / nf + self.theta0).cos()))
            .collect()
    }

    /// Free evolution with damping `exp(-i l²/2 - α l²/2 + i γ l)` for `l = -N'..N'`.
    fn momentum_phases(&self) -> Vec<Complex64> {
        (-self.half()..=self.half())
            .map(|l| {
                let l = l as f64;
                Complex64::from_polar((-0.5 * self.alpha * l * l).exp(), -0.5 * l * l + self.gamma * l)
            })
            .collect()
    }
}

/// Floquet matrix `F_mn = (1/N) B_m Σ_l d_l e^{-2πi l (m-n)/N}`, indices `-N'..N'`.
pub fn kicked_rotor_matrix(prm: &KickedRotorParams) -> Result<ComplexMatrix> {
    prm.validate()?;
    let n = prm.n;
    let nf = n as f64;
    let kicks = prm.kicks();
    let phases = prm.momentum_phases();
    let half = prm.half();
    // the l-sum only sees (m - n) mod N
    let circulant: Vec<Complex64> = (0..n)
        .map(|delta| {
            phases
                .iter()
                .zip(-half..=half)
                .map(|(d, l)| {
                    let turn = ((l * delta as i64).rem_euclid(n as i64)) as f64 / nf;
                    d * Complex64::from_polar(1.0, -2.0 * PI * turn)
                })
                .sum::<Complex64>()
                / nf
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        kicks[i] * circulant[(i + n - j) % n]
    }))
}

/// Hermitian GUE matrix with `E|M_ij|² = 1/N`, so its spectrum fills `[-2, 2]`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let sigma = (1.0 / n as f64).sqrt();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        data[i * n + i] = Complex64::new(sigma * d, 0.0);
        for j in 0..i {
            let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            let z = Complex64::new(re, im) * (sigma * std::f64::consts::FRAC_1_SQRT_2);
            data[i * n + j] = z;
            data[j * n + i] = z.conj();
        }
    }
    ComplexMatrix { n, data }
}

/// Haar unitary from the QR factorization of a complex Ginibre matrix, with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let z = Mat::from_fn(n, n, |_, _| {
        let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        Complex64::new(re, im)
    });
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<Complex64> = (0..n)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    ComplexMatrix::from_fn(n, |i, j| q[(i, j)] * phases[j])
}

/// `𝓕(η) = U e^{-η M²}` with `U` Haar and `M` from the GUE.
pub fn rmt_dissipative<R: Rng + ?Sized>(n: usize, eta: f64, rng: &mut R) -> Result<ComplexMatrix> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(argument(format!("dissipation must be nonnegative, got {eta}")));
    }
    let u = sample_haar_unitary(n, rng);
    let m = sample_gue(n, rng);
    if eta == 0.0 {
        return Ok(u);
    }
    let evd = m.to_faer().self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver {
        dim: n,
        detail: format!("{e:?} in hermitian decomposition"),
    })?;
    let v = evd.U();
    let s = evd.S();
    let damp: Vec<f64> = (0..n).map(|k| (-eta * s[k].re * s[k].re).exp()).collect();
    let scaled = Mat::from_fn(n, n, |i, k| v[(i, k)] * damp[k]);
    let contraction = &scaled * v.adjoint();
    Ok(ComplexMatrix::from_faer(&(u.to_faer() * contraction)))
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    a.to_faer().eigenvalues().map_err(|e| Error::Eigensolver {
        dim: a.dim(),
        detail: format!("{e:?} in the Schur iteration"),
    })
}

/// Diagonalizes `a` and wraps the eigenvalues as a spectrum.
pub fn diagonalize(a: &ComplexMatrix, model: &str, member: u64, params: Vec<(String, f64)>) -> Result<Spectrum> {
    let provenance = Provenance::QmapDiagonalized {
        model: model.to_string(),
        member,
    };
    Spectrum::new(eigenvalues(a)?, provenance, params)
}

fn kr_params(prm: &KickedRotorParams) -> Vec<(String, f64)> {
    vec![
        ("n".into(), prm.n as f64),
        ("kappa".into(), prm.kappa),
        ("theta0".into(), prm.theta0),
        ("gamma".into(), prm.gamma),
        ("alpha".into(), prm.alpha),
    ]
}

/// Spectra of kicked rotors with `γ_j = γ + j·dγ` and `κ_j = κ + j·dκ`, `j = 0..members`.
pub fn kicked_rotor_ensemble(base: &KickedRotorParams, members: usize, d_gamma: f64, d_kappa: f64) -> Result<Vec<Spectrum>> {
    base.validate()?;
    par::map_indexed(members, |j| {
        let prm = KickedRotorParams {
            gamma: base.gamma + j as f64 * d_gamma,
            kappa: base.kappa + j as f64 * d_kappa,
            ..*base
        };
        diagonalize(&kicked_rotor_matrix(&prm)?, "kicked-rotor", j as u64, kr_params(&prm))
    })
    .into_iter()
    .collect()
}

/// Spectra of independent `𝓕(η)` draws; member `j` uses stream `j` of `seed`.
pub fn rmt_ensemble(n: usize, eta: f64, seed: u64, members: usize) -> Result<Vec<Spectrum>> {
    par::map_indexed(members, |j| {
        let mut rng = rng::stream(seed, j as u64);
        let f = rmt_dissipative(n, eta, &mut rng)?;
        let params = vec![("n".into(), n as f64), ("eta".into(), eta), ("seed".into(), seed as f64)];
        diagonalize(&f, "rmt-dissipative", j as u64, params)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ks_distance;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.rows().iter().zip(b.rows()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Direct triple loop over the matrix-element formula.
    fn naive_kr(prm: &KickedRotorParams) -> ComplexMatrix {
        let half = prm.half();
        let nf = prm.n as f64;
        ComplexMatrix::from_fn(prm.n, |i, j| {
            let (m, n) = (i as i64 - half, j as i64 - half);
            let kick = Complex64::from_polar(1.0, -prm.kappa * (2.0 * PI * m as f64 / nf + prm.theta0).cos());
            let sum: Complex64 = (-half..=half)
                .map(|l| {
                    let l = l as f64;
                    let arg = c(0.5 * l * l, -0.5 * prm.alpha * l * l) - prm.gamma * l
                        + 2.0 * PI * l * (m - n) as f64 / nf;
                    (c(0.0, -1.0) * arg).exp()
                })
                .sum();
            kick * sum / nf
        })
    }

    /// `B W diag(d) W†` with `W_ml = e^{-2πi l m/N}/√N`.
    fn operator_product(prm: &KickedRotorParams) -> ComplexMatrix {
        let half = prm.half();
        let nf = prm.n as f64;
        let b = ComplexMatrix::diagonal(&prm.kicks());
        let d = ComplexMatrix::diagonal(&prm.momentum_phases());
        let w = ComplexMatrix::from_fn(prm.n, |i, k| {
            let (m, l) = ((i as i64 - half) as f64, (k as i64 - half) as f64);
            Complex64::from_polar(1.0 / nf.sqrt(), -2.0 * PI * l * m / nf)
        });
        b.matmul(&w).matmul(&d).matmul(&w.adjoint())
    }

    #[test]
    fn matrix_matches_naive_sum_and_operator_product() {
        for (n, alpha) in [(7, 0.0), (21, 0.3), (63, 0.01)] {
            let prm = KickedRotorParams { gamma: 0.45, ..KickedRotorParams::new(n) }.with_alpha(alpha);
            let fast = kicked_rotor_matrix(&prm).unwrap();
            assert!(max_diff(&fast, &naive_kr(&prm)) < 1e-12);
            assert!(max_diff(&fast, &operator_product(&prm)) < 1e-10);
        }
    }

    #[test]
    fn even_dimension_is_rejected() {
        assert!(kicked_rotor_matrix(&KickedRotorParams::new(10)).is_err());
        assert!(kicked_rotor_matrix(&KickedRotorParams::new(11).with_alpha(-0.1)).is_err());
    }

    #[test]
    fn undamped_rotor_is_unitary() {
        let prm = KickedRotorParams::new(501);
        let f = kicked_rotor_matrix(&prm).unwrap();
        assert!(f.unitarity_residual() < 1e-10);
        let ev = eigenvalues(&f).unwrap();
        assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
    }

    #[test]
    fn damping_pulls_the_spectrum_inside() {
        let base = KickedRotorParams::new(101);
        let mut last = f64::INFINITY;
        for alpha in [0.0, 1e-4, 5e-4, 2e-3, 1e-2, 0.5] {
            let ev = eigenvalues(&kicked_rotor_matrix(&base.with_alpha(alpha)).unwrap()).unwrap();
            let mean = ev.iter().map(|z| z.norm()).sum::<f64>() / ev.len() as f64;
            assert!(mean <= last + 1e-12, "alpha={alpha} mean={mean}");
            if alpha > 0.0 {
                assert!(ev.iter().all(|z| z.norm() < 1.0));
            }
            last = mean;
        }
    }

    #[test]
    fn gue_is_hermitian_and_semicircular() {
        let m = sample_gue(500, &mut rng::stream(3, 0));
        assert_eq!(m.hermiticity_residual(), 0.0);
        let ev = m.to_faer().self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert!(ev.iter().all(|x| x.abs() < 2.2));
        assert!(ev[ev.len() - 1] > 1.8);
        assert_eq!(sample_gue(20, &mut rng::stream(3, 1)), sample_gue(20, &mut rng::stream(3, 1)));
    }

    #[test]
    fn haar_unitary_properties() {
        let mut args = Vec::new();
        for member in 0..20 {
            let u = sample_haar_unitary(500, &mut rng::stream(9, member));
            if member == 0 {
                assert!(u.unitarity_residual() < 1e-12);
            }
            args.extend(eigenvalues(&u).unwrap().iter().map(|z| z.arg()));
        }
        let ks = ks_distance(&args, |x| ((x + PI) / (2.0 * PI)).clamp(0.0, 1.0));
        assert!(ks < 0.05, "{ks}");
        let u = sample_haar_unitary(40, &mut rng::stream(2, 0));
        let det: Complex64 = eigenvalues(&u).unwrap().iter().product();
        assert!((det.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn surrogate_is_a_contraction() {
        let f0 = rmt_dissipative(120, 0.0, &mut rng::stream(5, 0)).unwrap();
        assert!(eigenvalues(&f0).unwrap().iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
        let f = rmt_dissipative(120, 0.3, &mut rng::stream(5, 0)).unwrap();
        let ev = eigenvalues(&f).unwrap();
        assert!(ev.iter().all(|z| z.norm() <= 1.0 + 1e-8));
        assert!(ev.iter().any(|z| z.norm() < 0.95));
        assert!(rmt_dissipative(10, -1.0, &mut rng::stream(5, 0)).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let id = eigenvalues(&ComplexMatrix::identity(5)).unwrap();
        assert!(id.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
        let d = [c(0.5, 0.1), c(-2.0, 0.0), c(0.0, 3.0)];
        let mut ev = eigenvalues(&ComplexMatrix::diagonal(&d)).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(ev, vec![d[1], d[2], d[0]]);
        let rot = ComplexMatrix::from_rows(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let mut ev = eigenvalues(&rot).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14 && (ev[1] - c(0.0, 1.0)).norm() < 1e-14);
        let s = diagonalize(&rot, "toy", 4, vec![]).unwrap();
        assert_eq!(s.provenance, Provenance::QmapDiagonalized { model: "toy".into(), member: 4 });
    }

    #[test]
    fn binary_dump_round_trip() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64 - 0.5, j as f64 * 1e-300));
        let mut bytes = Vec::new();
        a.write_binary(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 + 9 * 16);
        assert_eq!(&bytes[8..16], &3u64.to_le_bytes());
        assert_eq!(ComplexMatrix::read_binary(bytes.as_slice()).unwrap(), a);
        bytes[0] = b'X';
        assert!(ComplexMatrix::read_binary(bytes.as_slice()).is_err());
    }

    #[test]
    fn ensembles_are_deterministic() {
        let base = KickedRotorParams::new(31).with_alpha(0.002);
        let a = kicked_rotor_ensemble(&base, 3, 0.01, 0.0).unwrap();
        assert_eq!(a, kicked_rotor_ensemble(&base, 3, 0.01, 0.0).unwrap());
        assert_eq!(a[2].params[3], ("gamma".to_string(), 0.72));
        let r = rmt_ensemble(30, 0.1, 4, 2).unwrap();
        assert_eq!(r, rmt_ensemble(30, 0.1, 4, 2).unwrap());
        assert_ne!(r[0], r[1]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn unitarity_holds_across_parameters(
            half in 2usize..30, kappa in 0.0f64..20.0, theta0 in -1.0f64..1.0, gamma in -2.0f64..2.0,
        ) {
            let prm = KickedRotorParams { n: 2 * half + 1, kappa, theta0, gamma, alpha: 0.0 };
            prop_assert!(kicked_rotor_matrix(&prm).unwrap().unitarity_residual() < 1e-10);
        }

        #[test]
        fn spectra_are_similarity_invariant(seed in 0u64..500) {
            let mut rng = rng::stream(seed, 0);
            let a = ComplexMatrix::from_fn(12, |_, _| {
                let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                c(re, im)
            });
            let u = sample_haar_unitary(12, &mut rng);
            let b = u.matmul(&a).matmul(&u.adjoint());
            let ea = eigenvalues(&a).unwrap();
            let eb = eigenvalues(&b).unwrap();
            // every eigenvalue of A has a partner in the conjugated spectrum
            for z in &ea {
                let nearest = eb.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(nearest < 1e-9, "{}", nearest);
            }
        }
    }
}
