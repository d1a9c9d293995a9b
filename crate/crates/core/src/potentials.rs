//! Radial confining potentials `V(t)`, `t = |z|²`.
//!
//! Every built-in supplies `V`, `V'` and `V''` with respect to `t` in closed
//! form. Hard walls restrict the support to an annulus
//! `r_in <= |z| <= r_out`; outside it the weight vanishes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{argument, Error, Result};

/// User supplied `t -> (V, V', V'')`.
pub type RadialFn = dyn Fn(f64) -> (f64, f64, f64) + Send + Sync;

/// Hard walls at radii `inner < outer`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Walls {
    pub inner: f64,
    pub outer: f64,
}

/// The shape of the potential together with its parameters.
#[derive(Clone)]
pub enum PotentialKind {
    /// `V = t`.
    Gaussian,
    /// `V = t² - α t`.
    Quartic { alpha: f64 },
    /// `V = t - α ln t`.
    Log { alpha: f64 },
    /// `V = -μ ln(1 - t)` on `t < 1`.
    TruncatedLog { mu: f64 },
    /// `V = cos(nπ|z|) - 1` on `|z| < cutoff`.
    Cosine { n: u32, cutoff: f64 },
    /// Arbitrary closure; `t_max` bounds the support (may be infinite).
    Custom {
        name: String,
        eval: Arc<RadialFn>,
        t_max: f64,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian => write!(f, "Gaussian"),
            Self::Quartic { alpha } => write!(f, "Quartic {{ alpha: {alpha} }}"),
            Self::Log { alpha } => write!(f, "Log {{ alpha: {alpha} }}"),
            Self::TruncatedLog { mu } => write!(f, "TruncatedLog {{ mu: {mu} }}"),
            Self::Cosine { n, cutoff } => write!(f, "Cosine {{ n: {n}, cutoff: {cutoff} }}"),
            Self::Custom { name, t_max, .. } => write!(f, "Custom {{ name: {name:?}, t_max: {t_max} }}"),
        }
    }
}

/// `V`, `dV/dt`, `d²V/dt²` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivs {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// A radial potential with optional hard walls.
#[derive(Clone, Debug)]
pub struct Potential {
    kind: PotentialKind,
    walls: Option<Walls>,
}

impl Potential {
    pub fn gaussian() -> Self {
        Self::from_kind(PotentialKind::Gaussian)
    }

    pub fn quartic(alpha: f64) -> Self {
        Self::from_kind(PotentialKind::Quartic { alpha })
    }

    pub fn log(alpha: f64) -> Self {
        Self::from_kind(PotentialKind::Log { alpha })
    }

    pub fn truncated_log(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(argument(format!("truncated-log strength must be positive, got {mu}")));
        }
        Ok(Self::from_kind(PotentialKind::TruncatedLog { mu }))
    }

    pub fn cosine(n: u32, cutoff: f64) -> Result<Self> {
        if n == 0 {
            return Err(argument("cosine frequency n must be at least 1"));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(argument(format!("cosine cutoff must be positive, got {cutoff}")));
        }
        Ok(Self::from_kind(PotentialKind::Cosine { n, cutoff }))
    }

    /// A potential from a closure returning `(V, V', V'')` in `t`.
    pub fn custom<F>(name: impl Into<String>, t_max: f64, eval: F) -> Self
    where
        F: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        Self::from_kind(PotentialKind::Custom {
            name: name.into(),
            eval: Arc::new(eval),
            t_max,
        })
    }

    fn from_kind(kind: PotentialKind) -> Self {
        Self { kind, walls: None }
    }

    /// Adds hard walls at radii `inner < outer`, both inside the natural support.
    pub fn with_walls(mut self, inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer && outer.is_finite()) {
            return Err(argument(format!("walls need 0 <= inner < outer, got ({inner}, {outer})")));
        }
        let r_max = self.natural_t_max().sqrt();
        if outer > r_max {
            return Err(argument(format!(
                "outer wall {outer} lies beyond the natural support |z| < {r_max}"
            )));
        }
        self.walls = Some(Walls { inner, outer });
        Ok(self)
    }

    /// The same potential with walls removed.
    pub fn without_walls(&self) -> Self {
        Self { kind: self.kind.clone(), walls: None }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn walls(&self) -> Option<Walls> {
        self.walls
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            PotentialKind::Gaussian => "gaussian",
            PotentialKind::Quartic { .. } => "quartic",
            PotentialKind::Log { .. } => "log",
            PotentialKind::TruncatedLog { .. } => "truncated_log",
            PotentialKind::Cosine { .. } => "cosine",
            PotentialKind::Custom { name, .. } => name,
        }
    }

    /// Named numeric parameters, walls included.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        let mut out = match &self.kind {
            PotentialKind::Gaussian => vec![],
            PotentialKind::Quartic { alpha } | PotentialKind::Log { alpha } => vec![("alpha", *alpha)],
            PotentialKind::TruncatedLog { mu } => vec![("mu", *mu)],
            PotentialKind::Cosine { n, cutoff } => vec![("n", *n as f64), ("cutoff", *cutoff)],
            PotentialKind::Custom { t_max, .. } => vec![("t_max", *t_max)],
        };
        if let Some(w) = self.walls {
            out.push(("wall_inner", w.inner));
            out.push(("wall_outer", w.outer));
        }
        out
    }

    /// Supremum of `t` over the natural support (walls ignored).
    pub fn natural_t_max(&self) -> f64 {
        match &self.kind {
            PotentialKind::TruncatedLog { .. } => 1.0,
            PotentialKind::Cosine { cutoff, .. } => cutoff * cutoff,
            PotentialKind::Custom { t_max, .. } => *t_max,
            _ => f64::INFINITY,
        }
    }

    /// Smallest admissible radius.
    pub fn r_min(&self) -> f64 {
        self.walls.map_or(0.0, |w| w.inner)
    }

    /// Largest admissible radius (infinite for unbounded potentials).
    pub fn r_max(&self) -> f64 {
        self.walls.map_or_else(|| self.natural_t_max().sqrt(), |w| w.outer)
    }

    /// Whether `V` has a closed-form continuation to complex argument.
    pub fn is_complex_evaluable(&self) -> bool {
        matches!(
            self.kind,
            PotentialKind::Gaussian
                | PotentialKind::Quartic { .. }
                | PotentialKind::Log { .. }
                | PotentialKind::TruncatedLog { .. }
        )
    }

    fn natural_contains(&self, t: f64) -> bool {
        if !(t >= 0.0) || !t.is_finite() || t >= self.natural_t_max() {
            return false;
        }
        !matches!(self.kind, PotentialKind::Log { alpha } if alpha != 0.0 && t == 0.0)
    }

    /// Whether `t = |z|²` lies in the support, walls included.
    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        if !self.natural_contains(t) {
            return false;
        }
        match self.walls {
            Some(w) => t >= w.inner * w.inner && t <= w.outer * w.outer,
            None => true,
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            return Ok(());
        }
        let bound = if !(t >= 0.0) || !t.is_finite() {
            "t >= 0 and finite".to_string()
        } else if t >= self.natural_t_max() {
            format!("t < {} ({} support)", self.natural_t_max(), self.name())
        } else if let Some(w) = self.walls.filter(|_| self.natural_contains(t)) {
            format!("walls {} <= |z| <= {}", w.inner, w.outer)
        } else {
            "t > 0 (logarithmic singularity)".to_string()
        };
        Err(Error::Domain { quantity: "t", value: t, bound })
    }

    /// `V`, `V'`, `V''` at `t = |z|²`.
    pub fn eval(&self, t: f64) -> Result<Derivs> {
        self.check(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// Closed forms without the support check; callers guarantee `t` is admissible.
    pub(crate) fn eval_unchecked(&self, t: f64) -> Derivs {
        let (value, first, second) = match &self.kind {
            PotentialKind::Gaussian => (t, 1.0, 0.0),
            PotentialKind::Quartic { alpha } => (t * t - alpha * t, 2.0 * t - alpha, 2.0),
            PotentialKind::Log { alpha } => {
                if *alpha == 0.0 {
                    (t, 1.0, 0.0)
                } else {
                    (t - alpha * t.ln(), 1.0 - alpha / t, alpha / (t * t))
                }
            }
            PotentialKind::TruncatedLog { mu } => {
                let g = 1.0 - t;
                (-mu * g.ln(), mu / g, mu / (g * g))
            }
            PotentialKind::Cosine { n, .. } => cosine_derivs(*n, t),
            PotentialKind::Custom { eval, .. } => eval(t),
        };
        Derivs { value, first, second }
    }

    /// `V(t)` only, for the sampler's inner loop.
    #[inline]
    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            PotentialKind::Gaussian => t,
            PotentialKind::Quartic { alpha } => t * t - alpha * t,
            PotentialKind::Log { alpha } if *alpha == 0.0 => t,
            PotentialKind::Log { alpha } => t - alpha * t.ln(),
            PotentialKind::TruncatedLog { mu } => -mu * (1.0 - t).ln(),
            PotentialKind::Cosine { n, .. } => (*n as f64 * PI * t.sqrt()).cos() - 1.0,
            PotentialKind::Custom { eval, .. } => eval(t).0,
        }
    }

    /// `V(w)` at complex `w` by the same closed form (principal logarithm).
    pub fn eval_complex(&self, w: Complex64) -> Result<Complex64> {
        self.derivs_complex(w).map(|d| d[0])
    }

    /// `[V(w), V'(w), V''(w)]` at complex `w`, derivatives in `w`.
    pub fn derivs_complex(&self, w: Complex64) -> Result<[Complex64; 3]> {
        let one = Complex64::new(1.0, 0.0);
        match &self.kind {
            PotentialKind::Gaussian => Ok([w, one, Complex64::new(0.0, 0.0)]),
            PotentialKind::Quartic { alpha } => Ok([w * w - alpha * w, 2.0 * w - alpha, Complex64::new(2.0, 0.0)]),
            PotentialKind::Log { alpha } => {
                if *alpha == 0.0 {
                    return Ok([w, one, Complex64::new(0.0, 0.0)]);
                }
                if w.im == 0.0 && w.re <= 0.0 {
                    return Err(Error::Domain {
                        quantity: "w",
                        value: w.re,
                        bound: "w off the branch cut (-inf, 0]".into(),
                    });
                }
                Ok([w - alpha * w.ln(), one - alpha / w, alpha / (w * w)])
            }
            PotentialKind::TruncatedLog { mu } => {
                let g = one - w;
                if g.im == 0.0 && g.re <= 0.0 {
                    return Err(Error::Domain {
                        quantity: "w",
                        value: w.re,
                        bound: "w off the branch cut [1, inf)".into(),
                    });
                }
                Ok([-mu * g.ln(), mu / g, mu / (g * g)])
            }
            _ => Err(Error::Unsupported { kind: self.name().to_string() }),
        }
    }
}

/// Derivatives of `cos(kr) - 1`, `k = nπ`, converted from `r` to `t = r²`:
/// `dV/dt = V_r / 2r` and `d²V/dt² = (r V_rr - V_r) / 4r³`.
fn cosine_derivs(n: u32, t: f64) -> (f64, f64, f64) {
    let k = n as f64 * PI;
    let r = t.sqrt();
    let x = k * r;
    let value = x.cos() - 1.0;
    let (sinc, g) = if x < 0.1 {
        // sin x / x and (sin x - x cos x) / x³ by their Taylor series
        let x2 = x * x;
        let sinc = 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
        let g = 1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0;
        (sinc, g)
    } else {
        (x.sin() / x, (x.sin() - x * x.cos()) / (x * x * x))
    };
    let k2 = k * k;
    (value, -0.5 * k2 * sinc, 0.25 * k2 * k2 * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn quartic_at_one() {
        let d = Potential::quartic(1.0).eval(1.0).unwrap();
        assert_eq!((d.value, d.first, d.second), (0.0, 1.0, 2.0));
    }

    #[test]
    fn gaussian_quarter() {
        let d = Potential::gaussian().eval(0.25).unwrap();
        assert_eq!((d.value, d.first, d.second), (0.25, 1.0, 0.0));
    }

    #[test]
    fn truncated_log_three_quarters() {
        let d = Potential::truncated_log(3.0).unwrap().eval(0.75).unwrap();
        assert!(close(d.value, 4.158_883_083_359_671_5, 1e-14));
        assert!(close(d.first, 12.0, 1e-14));
        assert!(close(d.second, 48.0, 1e-14));
    }

    #[test]
    fn out_of_support_names_the_bound() {
        let p = Potential::truncated_log(3.0).unwrap();
        let err = p.eval(1.0).unwrap_err().to_string();
        assert!(err.contains("t < 1"), "{err}");
        let c = Potential::cosine(2, 1.0).unwrap();
        assert!(c.eval(1.0).is_err());
        assert!(c.eval(0.99).is_ok());
        let w = Potential::gaussian().with_walls(0.3, 0.6).unwrap();
        let err = w.eval(0.01).unwrap_err().to_string();
        assert!(err.contains("walls"), "{err}");
        assert!(Potential::gaussian().eval(-0.1).is_err());
        assert!(Potential::log(1.0).eval(0.0).is_err());
    }

    #[test]
    fn walls_must_fit_support() {
        assert!(Potential::truncated_log(1.0).unwrap().with_walls(0.1, 1.5).is_err());
        assert!(Potential::gaussian().with_walls(0.6, 0.3).is_err());
    }

    #[test]
    fn complex_examples() {
        let v = Potential::gaussian().eval_complex(Complex64::new(1.0, 1.0)).unwrap();
        assert_eq!(v, Complex64::new(1.0, 1.0));
        let v = Potential::quartic(0.0).eval_complex(Complex64::new(0.0, 1.0)).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let v = Potential::log(1.0).eval_complex(Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re - 1.306_852_819_440_054_7).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn complex_unsupported_for_cosine_and_custom() {
        let c = Potential::cosine(2, 3.0).unwrap();
        assert!(matches!(c.eval_complex(Complex64::new(0.5, 0.0)), Err(Error::Unsupported { .. })));
        let u = Potential::custom("flat", f64::INFINITY, |t| (t, 1.0, 0.0));
        assert!(!u.is_complex_evaluable());
        assert!(u.eval_complex(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn cosine_series_matches_closed_form_near_switch() {
        // just below the switch the series must agree with the direct formulas
        let k = 2.0 * PI;
        for x in [0.05, 0.0999] {
            let (_, first, second) = cosine_derivs(2, (x / k).powi(2));
            let sinc = x.sin() / x;
            let g = (x.sin() - x * x.cos()) / (x * x * x);
            assert!(close(first, -0.5 * k * k * sinc, 1e-12));
            assert!(close(second, 0.25 * k.powi(4) * g, 1e-9));
        }
        let origin = cosine_derivs(2, 0.0);
        assert!(close(origin.1, -0.5 * k * k, 1e-15));
        assert!(close(origin.2, k.powi(4) / 12.0, 1e-15));
    }

    fn builtins() -> Vec<(Potential, f64, f64)> {
        // (potential, t_lo, t_hi) interior sampling ranges
        vec![
            (Potential::gaussian(), 0.0, 4.0),
            (Potential::quartic(2.0), 0.0, 4.0),
            (Potential::quartic(-1.0), 0.0, 4.0),
            (Potential::log(1.0), 0.1, 4.0),
            (Potential::truncated_log(3.0).unwrap(), 0.0, 0.9),
            (Potential::cosine(2, 3.0).unwrap(), 0.01, 8.5),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn finite_differences_match_closed_forms(u in 0.0f64..1.0) {
            for (p, lo, hi) in builtins() {
                let t = lo + (hi - lo) * u;
                let h = 1e-5 * t.max(0.05);
                let (lo_t, hi_t) = (t - h, t + h);
                prop_assume!(p.contains(lo_t));
                let d = p.eval(t).unwrap();
                let (dm, dp) = (p.eval(lo_t).unwrap(), p.eval(hi_t).unwrap());
                let fd1 = (dp.value - dm.value) / (2.0 * h);
                let fd2 = (dp.first - dm.first) / (2.0 * h);
                prop_assert!(close(fd1, d.first, 1e-6), "{} V' at t={t}: {fd1} vs {}", p.name(), d.first);
                prop_assert!(close(fd2, d.second, 1e-6), "{} V'' at t={t}: {fd2} vs {}", p.name(), d.second);
            }
        }

        #[test]
        fn complex_restriction_equals_real(t in 0.01f64..0.95) {
            for p in [Potential::gaussian(), Potential::quartic(2.0), Potential::log(1.0), Potential::truncated_log(3.0).unwrap()] {
                let real = p.eval(t).unwrap().value;
                let cplx = p.eval_complex(Complex64::new(t, 0.0)).unwrap();
                prop_assert!((cplx.re - real).abs() <= 1e-12 * real.abs().max(1.0));
                prop_assert!(cplx.im.abs() <= 1e-12);
            }
        }
    }
}
