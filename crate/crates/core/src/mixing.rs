//! Mixing laws on the nonnegative reals used inside mixed-Poisson
//! degree distributions.

use crate::error::{Error, Result};
use crate::numeric::{integrate, ln_factorial};

/// Absolute tolerance for all quadrature in this module. The fixed-point
/// solvers downstream need generating-function values accurate to about
/// 1e-10, so the integrals are resolved two orders tighter.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum MixingDistribution {
    /// Point mass at x >= 0. MPoi(Dirac(x)) is the plain Poisson(x) law.
    Dirac { x: f64 },
    /// Density alpha c^alpha t^{-alpha-1} on (c, inf). Shapes in (0,1]
    /// are permitted (they arise from size biasing) but have infinite mean.
    Pareto { alpha: f64, scale: f64 },
    /// log X ~ Normal(location, scale2).
    Lognormal { location: f64, scale2: f64 },
}

impl MixingDistribution {
    pub fn dirac(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dirac point must be a finite nonnegative number, got {x}"
            )));
        }
        Ok(Self::Dirac { x })
    }

    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pareto shape must be positive, got {alpha}"
            )));
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pareto scale must be positive, got {scale}"
            )));
        }
        Ok(Self::Pareto { alpha, scale })
    }

    pub fn lognormal(location: f64, scale2: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lognormal location must be finite, got {location}"
            )));
        }
        if !scale2.is_finite() || scale2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lognormal scale2 must be positive, got {scale2}"
            )));
        }
        Ok(Self::Lognormal { location, scale2 })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Dirac { x } => x,
            Self::Pareto { alpha, scale } => {
                if alpha > 1.0 {
                    scale / (1.0 - 1.0 / alpha)
                } else {
                    f64::INFINITY
                }
            }
            Self::Lognormal { location, scale2 } => (location + scale2 / 2.0).exp(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            Self::Dirac { x } => x * x,
            Self::Pareto { alpha, scale } => {
                if alpha > 2.0 {
                    alpha * scale * scale / (alpha - 2.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::Lognormal { location, scale2 } => (2.0 * location + 2.0 * scale2).exp(),
        }
    }

    /// Infimum of the support.
    pub fn support_lower_bound(&self) -> f64 {
        match *self {
            Self::Dirac { x } => x,
            Self::Pareto { scale, .. } => scale,
            Self::Lognormal { .. } => 0.0,
        }
    }

    /// Closed-form size biasing: Dirac is invariant, Pareto loses one unit
    /// of shape, lognormal shifts its location by scale2.
    pub fn size_biased(&self) -> Result<MixingDistribution> {
        match *self {
            Self::Dirac { x } => {
                if x <= 0.0 {
                    Err(Error::ZeroMean)
                } else {
                    Ok(Self::Dirac { x })
                }
            }
            Self::Pareto { alpha, scale } => {
                if alpha <= 1.0 {
                    // size biasing needs a finite mean
                    Err(Error::InfiniteMean)
                } else {
                    Ok(Self::Pareto {
                        alpha: alpha - 1.0,
                        scale,
                    })
                }
            }
            Self::Lognormal { location, scale2 } => Ok(Self::Lognormal {
                location: location + scale2,
                scale2,
            }),
        }
    }

    /// Scaling by a constant r > 0: law of r X.
    pub fn scaled(&self, r: f64) -> Result<MixingDistribution> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {r}"
            )));
        }
        Ok(match *self {
            Self::Dirac { x } => Self::Dirac { x: r * x },
            Self::Pareto { alpha, scale } => Self::Pareto {
                alpha,
                scale: r * scale,
            },
            Self::Lognormal { location, scale2 } => Self::Lognormal {
                location: location + r.ln(),
                scale2,
            },
        })
    }

    /// Laplace transform L(t) = E e^{-tX}, t >= 0.
    pub fn laplace(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        if t == 0.0 {
            return 1.0;
        }
        match *self {
            Self::Dirac { x } => (-t * x).exp(),
            Self::Pareto { alpha, scale } => {
                // substitution v = (c/x)^alpha maps (c, inf) to (0, 1):
                // L(t) = int_0^1 exp(-t c v^(-1/alpha)) dv
                let f = |v: f64| (-t * scale * v.powf(-1.0 / alpha)).exp();
                integrate(&f, 0.0, 1.0, QUAD_TOL)
            }
            Self::Lognormal { location, scale2 } => {
                let sigma = scale2.sqrt();
                let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
                let f = |z: f64| {
                    norm * (-0.5 * z * z - t * (location + sigma * z).exp()).exp()
                };
                integrate(&f, -15.0, 15.0, QUAD_TOL)
            }
        }
    }

    /// P(N = k) for N ~ MPoi(self): the Poisson kernel integrated against
    /// the mixing law.
    pub fn mixed_poisson_pmf(&self, k: u32) -> f64 {
        let kf = k as f64;
        let lnk = ln_factorial(k);
        match *self {
            Self::Dirac { x } => {
                if x == 0.0 {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (kf * x.ln() - x - lnk).exp()
                }
            }
            Self::Pareto { alpha, scale } => {
                // integrate in rate space; the kernel peaks near
                // lambda = k - alpha - 1 with width ~ sqrt(k)
                let hi = (scale + 40.0).max(kf + 20.0 * kf.sqrt() + 40.0);
                let ln_alpha_c = alpha.ln() + alpha * scale.ln();
                let f = |lam: f64| {
                    if lam <= 0.0 {
                        return 0.0;
                    }
                    (ln_alpha_c + (kf - alpha - 1.0) * lam.ln() - lam - lnk).exp()
                };
                integrate(&f, scale, hi, QUAD_TOL)
            }
            Self::Lognormal { location, scale2 } => {
                let sigma = scale2.sqrt();
                let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
                // center of the Poisson kernel in z-space
                let z_peak = ((kf + 1.0).ln() - location) / sigma;
                let lo = (-15.0f64).min(z_peak - 15.0);
                let hi = (15.0f64).max(z_peak + 15.0);
                let f = |z: f64| {
                    let ln_lam = location + sigma * z;
                    norm * (-0.5 * z * z + kf * ln_lam - ln_lam.exp() - lnk).exp()
                };
                integrate(&f, lo, hi, QUAD_TOL)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_moments() {
        let m = MixingDistribution::pareto(3.0, 1.0).unwrap();
        assert!((m.mean() - 1.5).abs() < 1e-14);
        assert!((m.second_moment() - 3.0).abs() < 1e-14);
        let heavy = MixingDistribution::pareto(1.5, 1.0).unwrap();
        assert!(heavy.second_moment().is_infinite());
        let very_heavy = MixingDistribution::pareto(0.5, 1.0).unwrap();
        assert!(very_heavy.mean().is_infinite());
    }

    #[test]
    fn size_bias_closed_forms() {
        let p = MixingDistribution::pareto(3.0, 1.0).unwrap();
        assert_eq!(
            p.size_biased().unwrap(),
            MixingDistribution::pareto(2.0, 1.0).unwrap()
        );
        let l = MixingDistribution::lognormal(0.0, 1.0).unwrap();
        assert_eq!(
            l.size_biased().unwrap(),
            MixingDistribution::lognormal(1.0, 1.0).unwrap()
        );
        let d = MixingDistribution::dirac(2.0).unwrap();
        assert_eq!(d.size_biased().unwrap(), d);
        assert!(MixingDistribution::pareto(1.0, 1.0)
            .unwrap()
            .size_biased()
            .is_err());
    }

    #[test]
    fn laplace_pareto_against_quadrature_in_rate_space() {
        // independent route: direct density integral on (c, hi)
        let m = MixingDistribution::pareto(2.5, 1.3).unwrap();
        for t in [0.1, 0.7, 2.0] {
            let direct = integrate(
                &|x: f64| 2.5 * 1.3f64.powf(2.5) * x.powf(-3.5) * (-t * x).exp(),
                1.3,
                1.3 + 200.0,
                1e-13,
            );
            assert!(
                (m.laplace(t) - direct).abs() < 1e-9,
                "t={t}: {} vs {direct}",
                m.laplace(t)
            );
        }
    }

    #[test]
    fn laplace_lognormal_mean_slope() {
        // -L'(0) = mean; finite-difference check
        let m = MixingDistribution::lognormal(0.2, 0.5).unwrap();
        let h = 1e-6;
        let slope = (1.0 - m.laplace(h)) / h;
        assert!((slope - m.mean()).abs() < 1e-4);
    }

    #[test]
    fn mixed_poisson_pmf_dirac_is_poisson() {
        let m = MixingDistribution::dirac(2.0).unwrap();
        assert!((m.mixed_poisson_pmf(0) - (-2.0f64).exp()).abs() < 1e-14);
        let total: f64 = (0..40).map(|k| m.mixed_poisson_pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_poisson_pmf_pareto_normalizes() {
        let m = MixingDistribution::pareto(2.5, 1.2).unwrap();
        let total: f64 = (0..400).map(|k| m.mixed_poisson_pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-6, "total mass {total}");
    }

    #[test]
    fn mixed_poisson_pmf_lognormal_normalizes() {
        let m = MixingDistribution::lognormal(0.1, 0.5).unwrap();
        let total: f64 = (0..120).map(|k| m.mixed_poisson_pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-9, "total mass {total}");
    }

    #[test]
    fn scaling_closed_forms() {
        let p = MixingDistribution::pareto(2.5, 2.0).unwrap();
        assert_eq!(
            p.scaled(0.5).unwrap(),
            MixingDistribution::pareto(2.5, 1.0).unwrap()
        );
        let d = MixingDistribution::dirac(4.0).unwrap();
        assert_eq!(
            d.scaled(0.25).unwrap(),
            MixingDistribution::dirac(1.0).unwrap()
        );
    }
}
