//! Degree distributions: representation, generating functions, moments,
//! size biasing, downshifted size biasing, r-thinning, and truncation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;
use crate::numeric::{ln_binomial, ln_factorial};
use crate::pmf::FinitePmf;

/// Hard cap on truncation support size.
pub const TRUNCATE_CAP: u32 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum DegreeDistribution {
    Finite(FinitePmf),
    Poisson { lambda: f64 },
    Binomial { n: u32, p: f64 },
    MixedPoisson(MixingDistribution),
    Thinned { base: Box<DegreeDistribution>, r: f64 },
}

impl From<FinitePmf> for DegreeDistribution {
    fn from(p: FinitePmf) -> Self {
        DegreeDistribution::Finite(p)
    }
}

impl DegreeDistribution {
    pub fn poisson(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "poisson rate must be positive, got {lambda}"
            )));
        }
        Ok(Self::Poisson { lambda })
    }

    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("binomial n must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "binomial success probability must lie in [0,1], got {p}"
            )));
        }
        Ok(Self::Binomial { n, p })
    }

    pub fn mixed_poisson(mixing: MixingDistribution) -> Self {
        Self::MixedPoisson(mixing)
    }

    /// P(X = k)
    pub fn pmf(&self, k: u32) -> f64 {
        match self {
            Self::Finite(p) => p.mass(k),
            Self::Poisson { lambda } => {
                (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
            }
            Self::Binomial { n, p } => {
                if k > *n {
                    0.0
                } else if *p == 0.0 {
                    if k == 0 { 1.0 } else { 0.0 }
                } else if *p == 1.0 {
                    if k == *n { 1.0 } else { 0.0 }
                } else {
                    (ln_binomial(*n, k)
                        + k as f64 * p.ln()
                        + (*n - k) as f64 * (1.0 - p).ln())
                    .exp()
                }
            }
            Self::MixedPoisson(mu) => mu.mixed_poisson_pmf(k),
            Self::Thinned { base, r } => {
                // binomial mixture over the (truncated) base law
                if *r == 0.0 {
                    return if k == 0 { 1.0 } else { 0.0 };
                }
                if *r == 1.0 {
                    return base.pmf(k);
                }
                let support = match base.truncate(1e-14) {
                    Ok(p) => p,
                    Err(_) => return f64::NAN,
                };
                let ln_r = r.ln();
                let ln_1mr = (1.0 - r).ln();
                support
                    .support()
                    .filter(|&(l, _)| l >= k)
                    .map(|(l, m)| {
                        m * (ln_binomial(l, k)
                            + k as f64 * ln_r
                            + (l - k) as f64 * ln_1mr)
                            .exp()
                    })
                    .sum()
            }
        }
    }

    /// Generating function G(s) = E s^X on [0, 1].
    pub fn gf(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "generating function argument must lie in [0,1], got {s}"
            )));
        }
        Ok(self.gf_unchecked(s))
    }

    fn gf_unchecked(&self, s: f64) -> f64 {
        match self {
            Self::Finite(p) => p.gf(s),
            Self::Poisson { lambda } => (lambda * (s - 1.0)).exp(),
            Self::Binomial { n, p } => (1.0 - p + p * s).powi(*n as i32),
            Self::MixedPoisson(mu) => mu.laplace(1.0 - s),
            Self::Thinned { base, r } => base.gf_unchecked(1.0 - r + r * s),
        }
    }

    /// G'(s) on [0, 1). For mixed-Poisson laws this is evaluated as
    /// m1(mu) * L_{mu*}(1-s) using the closed-form size-biased mixing,
    /// which avoids cancellation near s = 1.
    pub fn gf_derivative(&self, s: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "generating function derivative argument must lie in [0,1), got {s}"
            )));
        }
        self.gf_derivative_unchecked(s)
    }

    fn gf_derivative_unchecked(&self, s: f64) -> Result<f64> {
        Ok(match self {
            Self::Finite(p) => p.gf_derivative(s),
            Self::Poisson { lambda } => lambda * (lambda * (s - 1.0)).exp(),
            Self::Binomial { n, p } => {
                *n as f64 * p * (1.0 - p + p * s).powi(*n as i32 - 1)
            }
            Self::MixedPoisson(mu) => {
                let m1 = mu.mean();
                if !m1.is_finite() {
                    return Err(Error::InfiniteMean);
                }
                m1 * mu.size_biased()?.laplace(1.0 - s)
            }
            Self::Thinned { base, r } => r * base.gf_derivative_unchecked(1.0 - r + r * s)?,
        })
    }

    /// i-th moment, i in {1, 2}. Returns +inf when divergent.
    pub fn moment(&self, i: u32) -> Result<f64> {
        match i {
            1 => Ok(self.mean()),
            2 => Ok(self.second_moment()),
            _ => Err(Error::InvalidParameter(format!(
                "only moments 1 and 2 are supported, got {i}"
            ))),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Finite(p) => p.mean(),
            Self::Poisson { lambda } => *lambda,
            Self::Binomial { n, p } => *n as f64 * p,
            Self::MixedPoisson(mu) => mu.mean(),
            Self::Thinned { base, r } => r * base.mean(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Finite(p) => p.second_moment(),
            Self::Poisson { lambda } => lambda + lambda * lambda,
            Self::Binomial { n, p } => {
                let m1 = *n as f64 * p;
                m1 * (1.0 - p) + m1 * m1
            }
            // E N^2 = E Lambda^2 + E Lambda
            Self::MixedPoisson(mu) => mu.second_moment() + mu.mean(),
            // E X_r(X_r - 1) = r^2 E X(X - 1)
            Self::Thinned { base, r } => {
                let m1 = base.mean();
                r * r * (base.second_moment() - m1) + r * m1
            }
        }
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().powi(2)
    }

    /// Size biasing p*(k) = k p(k) / m1. Finite pmfs are reweighted in
    /// closed form; parametric families fall back to reweighting the
    /// truncated pmf (the shifted-up parametric law is not representable
    /// in this family; the downshifted form is — see
    /// [`Self::downshifted_size_biased`]).
    pub fn size_biased(&self) -> Result<DegreeDistribution> {
        match self {
            Self::Finite(p) => Ok(Self::Finite(p.size_biased()?)),
            _ => {
                let m1 = self.mean();
                if m1 == 0.0 {
                    return Err(Error::ZeroMean);
                }
                if !m1.is_finite() {
                    return Err(Error::InfiniteMean);
                }
                Ok(Self::Finite(self.truncate(1e-12)?.size_biased()?))
            }
        }
    }

    /// Downshifted size biasing p°(k) = (k+1) p(k+1) / m1, in closed form
    /// for every variant.
    pub fn downshifted_size_biased(&self) -> Result<DegreeDistribution> {
        let m1 = self.mean();
        if m1 == 0.0 {
            return Err(Error::ZeroMean);
        }
        if !m1.is_finite() {
            return Err(Error::InfiniteMean);
        }
        Ok(match self {
            Self::Finite(p) => Self::Finite(p.downshifted_size_biased()?),
            Self::Poisson { lambda } => Self::Poisson { lambda: *lambda },
            Self::Binomial { n, p } => {
                if *n == 1 {
                    Self::Finite(FinitePmf::dirac(0))
                } else {
                    Self::Binomial { n: *n - 1, p: *p }
                }
            }
            Self::MixedPoisson(mu) => Self::MixedPoisson(mu.size_biased()?),
            Self::Thinned { base, r } => Self::Thinned {
                base: Box::new(base.downshifted_size_biased()?),
                r: *r,
            },
        })
    }

    /// r-thinning, simplified in closed form where the family permits:
    /// a point mass thins to a binomial, binomial and Poisson rescale,
    /// and Pareto-mixed Poisson rescales its mixing scale. Other bases
    /// are wrapped lazily.
    pub fn thinned(&self, r: f64) -> Result<DegreeDistribution> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "thinning probability must lie in [0,1], got {r}"
            )));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        if r == 0.0 {
            return Ok(Self::Finite(FinitePmf::dirac(0)));
        }
        Ok(match self {
            Self::Finite(p) => {
                if p.len() == 1 {
                    let (n, _) = p.support().next().unwrap();
                    if n == 0 {
                        Self::Finite(FinitePmf::dirac(0))
                    } else {
                        Self::Binomial { n, p: r }
                    }
                } else {
                    Self::Finite(p.thinned(r)?)
                }
            }
            Self::Poisson { lambda } => Self::Poisson { lambda: lambda * r },
            Self::Binomial { n, p } => Self::Binomial { n: *n, p: p * r },
            Self::MixedPoisson(mu) => match mu {
                MixingDistribution::Dirac { x } => Self::Poisson { lambda: x * r },
                MixingDistribution::Pareto { alpha, scale } => Self::MixedPoisson(
                    MixingDistribution::pareto(*alpha, scale * r)?,
                ),
                MixingDistribution::Lognormal { .. } => Self::Thinned {
                    base: Box::new(self.clone()),
                    r,
                },
            },
            Self::Thinned { base, r: r0 } => Self::Thinned {
                base: base.clone(),
                r: r0 * r,
            },
        })
    }

    /// Smallest support prefix holding at least 1 - tail_tol of the mass,
    /// renormalized. Errors if more than [`TRUNCATE_CAP`] atoms would be
    /// needed.
    pub fn truncate(&self, tail_tol: f64) -> Result<FinitePmf> {
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must be positive, got {tail_tol}"
            )));
        }
        if let Self::Finite(p) = self {
            return Ok(p.clone());
        }
        if !self.mean().is_finite() {
            return Err(Error::InfiniteMean);
        }
        let target = 1.0 - tail_tol;
        let mut masses = BTreeMap::new();
        let mut cum = 0.0;
        for k in 0..=TRUNCATE_CAP {
            let m = self.pmf(k);
            if m > 0.0 {
                masses.insert(k, m);
            }
            cum += m;
            if cum >= target {
                return FinitePmf::normalized(masses);
            }
        }
        Err(Error::TruncationCap { cap: TRUNCATE_CAP })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_p() -> DegreeDistribution {
        DegreeDistribution::Finite(
            FinitePmf::from_pairs(&[(1, 0.125), (2, 0.75), (3, 0.125)]).unwrap(),
        )
    }

    #[test]
    fn pmf_examples() {
        let poi = DegreeDistribution::poisson(2.0).unwrap();
        assert!((poi.pmf(0) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((table1_p().pmf(2) - 0.75).abs() < 1e-15);
        let mp = DegreeDistribution::mixed_poisson(MixingDistribution::dirac(2.0).unwrap());
        assert!((mp.pmf(0) - (-2.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn gf_examples() {
        let d2 = DegreeDistribution::Finite(FinitePmf::dirac(2));
        for s in [0.0, 0.3, 1.0] {
            assert!((d2.gf(s).unwrap() - s * s).abs() < 1e-15);
        }
        // thinned point mass has a binomial generating function
        let t = DegreeDistribution::Finite(FinitePmf::dirac(4))
            .thinned(0.3)
            .unwrap();
        for s in [0.0, 0.5, 0.9] {
            assert!((t.gf(s).unwrap() - (1.0 - 0.3 + 0.3 * s).powi(4)).abs() < 1e-14);
        }
        assert!((DegreeDistribution::poisson(1.0).unwrap().gf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(DegreeDistribution::poisson(1.0).unwrap().gf(1.5).is_err());
    }

    #[test]
    fn gf_derivative_examples() {
        let d2 = DegreeDistribution::Finite(FinitePmf::dirac(2));
        assert!((d2.gf_derivative(0.5).unwrap() - 1.0).abs() < 1e-15);
        let poi = DegreeDistribution::poisson(1.7).unwrap();
        for s in [0.0f64, 0.4, 0.99] {
            let want = 1.7 * (1.7 * (s - 1.0)).exp();
            assert!((poi.gf_derivative(s).unwrap() - want).abs() < 1e-14);
        }
        // G'(0) = p(1)
        let mp = DegreeDistribution::mixed_poisson(
            MixingDistribution::pareto(2.5, 1.2).unwrap(),
        );
        assert!((mp.gf_derivative(0.0).unwrap() - mp.pmf(1)).abs() < 1e-9);
    }

    #[test]
    fn moments_table1_and_thinning() {
        let p = table1_p();
        assert!((p.mean() - 2.0).abs() < 1e-14);
        assert!((p.variance() - 0.25).abs() < 1e-14);
        let heavy = DegreeDistribution::mixed_poisson(
            MixingDistribution::pareto(1.5, 1.0).unwrap(),
        );
        assert!(heavy.second_moment().is_infinite());
        assert!(heavy.mean().is_finite());
        let t = p.thinned(0.4).unwrap();
        assert!((t.mean() - 0.4 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn downshift_closed_forms() {
        // counterexample p -> {0: 1/16, 1: 12/16, 2: 3/16}
        let c = table1_p().downshifted_size_biased().unwrap();
        let want =
            FinitePmf::from_pairs(&[(0, 1.0 / 16.0), (1, 12.0 / 16.0), (2, 3.0 / 16.0)]).unwrap();
        match c {
            DegreeDistribution::Finite(f) => assert!(f.approx_eq(&want, 1e-14)),
            _ => panic!("expected finite"),
        }
        let b = DegreeDistribution::binomial(5, 0.3).unwrap();
        assert_eq!(
            b.downshifted_size_biased().unwrap(),
            DegreeDistribution::binomial(4, 0.3).unwrap()
        );
        let poi = DegreeDistribution::poisson(2.0).unwrap();
        assert_eq!(poi.downshifted_size_biased().unwrap(), poi);
        let mp = DegreeDistribution::mixed_poisson(
            MixingDistribution::pareto(2.5, 1.0).unwrap(),
        );
        assert_eq!(
            mp.downshifted_size_biased().unwrap(),
            DegreeDistribution::mixed_poisson(MixingDistribution::pareto(1.5, 1.0).unwrap())
        );
    }

    #[test]
    fn downshift_rejects_degenerate() {
        let zero = DegreeDistribution::Finite(FinitePmf::dirac(0));
        assert!(matches!(
            zero.downshifted_size_biased(),
            Err(Error::ZeroMean)
        ));
    }

    #[test]
    fn thinning_closed_forms() {
        let poi = DegreeDistribution::poisson(2.0).unwrap();
        assert_eq!(
            poi.thinned(0.5).unwrap(),
            DegreeDistribution::poisson(1.0).unwrap()
        );
        let mp = DegreeDistribution::mixed_poisson(
            MixingDistribution::pareto(2.5, 2.0).unwrap(),
        );
        assert_eq!(
            mp.thinned(0.5).unwrap(),
            DegreeDistribution::mixed_poisson(MixingDistribution::pareto(2.5, 1.0).unwrap())
        );
        // thin(d, 1) = d pointwise
        let p = table1_p();
        assert_eq!(p.thinned(1.0).unwrap(), p);
    }

    #[test]
    fn truncate_contract() {
        let f = DegreeDistribution::Finite(FinitePmf::dirac(1));
        assert!(f.truncate(0.5).unwrap().approx_eq(&FinitePmf::dirac(1), 0.0));

        let poi = DegreeDistribution::poisson(1.0).unwrap();
        let t = poi.truncate(1e-12).unwrap();
        // cdf-scan oracle: smallest K with Poisson(1) cdf >= 1 - 1e-12
        let mut cum = 0.0;
        let mut k_oracle = 0;
        for k in 0..100 {
            cum += poi.pmf(k);
            if cum >= 1.0 - 1e-12 {
                k_oracle = k;
                break;
            }
        }
        assert_eq!(t.max_degree(), k_oracle);
        let total: f64 = t.support().map(|(_, m)| m).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thinned_wrapper_pmf_matches_mixture() {
        // lognormal-mixed base stays lazily wrapped
        let base = DegreeDistribution::mixed_poisson(
            MixingDistribution::lognormal(0.1, 0.5).unwrap(),
        );
        let t = base.thinned(0.6).unwrap();
        assert!(matches!(t, DegreeDistribution::Thinned { .. }));
        // G_T(s) = G_base(1 - r + r s)
        for s in [0.0, 0.5, 1.0] {
            let want = base.gf(1.0 - 0.6 + 0.6 * s).unwrap();
            assert!((t.gf(s).unwrap() - want).abs() < 1e-12);
        }
        let total: f64 = (0..200).map(|k| t.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-8);
    }
}
