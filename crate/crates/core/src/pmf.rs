//! Finite-support probability mass functions on the nonnegative integers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numeric::ln_binomial;

/// Tolerance for the "masses sum to one" construction check.
pub const NORM_TOL: f64 = 1e-12;

/// A probability distribution on the nonnegative integers with finite
/// support. Zero-mass entries are dropped on construction so that pmf
/// equality is well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmf {
    probs: BTreeMap<u32, f64>,
}

impl FinitePmf {
    pub fn new(masses: BTreeMap<u32, f64>) -> Result<Self> {
        let mut probs = BTreeMap::new();
        let mut sum = 0.0;
        for (&k, &m) in &masses {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "mass at {k} must be a finite nonnegative number, got {m}"
                )));
            }
            sum += m;
            if m > 0.0 {
                probs.insert(k, m);
            }
        }
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { probs })
    }

    pub fn from_pairs(pairs: &[(u32, f64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(k, m) in pairs {
            *map.entry(k).or_insert(0.0) += m;
        }
        Self::new(map)
    }

    /// Point mass at `k`.
    pub fn dirac(k: u32) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(k, 1.0);
        Self { probs }
    }

    /// Construct from already-normalized masses, renormalizing away the
    /// floating-point residue. Used for derived pmfs (truncation,
    /// reweighting) whose masses sum to one only up to rounding.
    pub(crate) fn normalized(masses: BTreeMap<u32, f64>) -> Result<Self> {
        let sum: f64 = masses.values().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero-mass collection".into(),
            ));
        }
        let probs = masses
            .into_iter()
            .filter(|&(_, m)| m > 0.0)
            .map(|(k, m)| (k, m / sum))
            .collect();
        Ok(Self { probs })
    }

    pub fn mass(&self, k: u32) -> f64 {
        self.probs.get(&k).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probs.iter().map(|(&k, &m)| (k, m))
    }

    pub fn max_degree(&self) -> u32 {
        self.probs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.support().map(|(k, m)| k as f64 * m).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.support().map(|(k, m)| (k as f64).powi(2) * m).sum()
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().powi(2)
    }

    /// P(X <= k)
    pub fn cdf(&self, k: u32) -> f64 {
        self.probs
            .range(..=k)
            .map(|(_, &m)| m)
            .sum()
    }

    pub fn gf(&self, s: f64) -> f64 {
        self.support().map(|(k, m)| m * s.powi(k as i32)).sum()
    }

    pub fn gf_derivative(&self, s: f64) -> f64 {
        self.support()
            .filter(|&(k, _)| k >= 1)
            .map(|(k, m)| k as f64 * m * s.powi(k as i32 - 1))
            .sum()
    }

    /// p*(k) = k p(k) / m1(p)
    pub fn size_biased(&self) -> Result<FinitePmf> {
        let m1 = self.mean();
        if m1 <= 0.0 {
            return Err(Error::ZeroMean);
        }
        let masses = self
            .support()
            .filter(|&(k, _)| k >= 1)
            .map(|(k, m)| (k, k as f64 * m / m1))
            .collect();
        Self::normalized(masses)
    }

    /// p°(k) = (k+1) p(k+1) / m1(p)
    pub fn downshifted_size_biased(&self) -> Result<FinitePmf> {
        let m1 = self.mean();
        if m1 <= 0.0 {
            return Err(Error::ZeroMean);
        }
        let masses = self
            .support()
            .filter(|&(k, _)| k >= 1)
            .map(|(k, m)| (k - 1, k as f64 * m / m1))
            .collect();
        Self::normalized(masses)
    }

    /// Eager r-thinning via the full binomial mixture sum.
    pub fn thinned(&self, r: f64) -> Result<FinitePmf> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "thinning probability must lie in [0,1], got {r}"
            )));
        }
        if r == 0.0 {
            return Ok(FinitePmf::dirac(0));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        let ln_r = r.ln();
        let ln_1mr = (1.0 - r).ln();
        let mut masses: BTreeMap<u32, f64> = BTreeMap::new();
        for (l, m) in self.support() {
            for k in 0..=l {
                let w = (ln_binomial(l, k) + k as f64 * ln_r + (l - k) as f64 * ln_1mr).exp();
                *masses.entry(k).or_insert(0.0) += m * w;
            }
        }
        Self::normalized(masses)
    }

    /// Pointwise pmf equality within an absolute tolerance.
    pub fn approx_eq(&self, other: &FinitePmf, tol: f64) -> bool {
        let hi = self.max_degree().max(other.max_degree());
        (0..=hi).all(|k| (self.mass(k) - other.mass(k)).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_masses() {
        assert!(FinitePmf::from_pairs(&[(0, 0.5), (1, 0.4)]).is_err());
        assert!(FinitePmf::from_pairs(&[(0, -0.1), (1, 1.1)]).is_err());
    }

    #[test]
    fn drops_zero_entries() {
        let p = FinitePmf::from_pairs(&[(0, 0.5), (1, 0.0), (2, 0.5)]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.mass(1), 0.0);
    }

    #[test]
    fn size_bias_reweights() {
        // {1: 1/2, 3: 1/2} -> {1: 1/4, 3: 3/4}
        let p = FinitePmf::from_pairs(&[(1, 0.5), (3, 0.5)]).unwrap();
        let b = p.size_biased().unwrap();
        assert!((b.mass(1) - 0.25).abs() < 1e-15);
        assert!((b.mass(3) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn downshift_binary_example() {
        // (1/2) d_1 + (1/2) d_n downshifts to (1/(n+1)) d_0 + (n/(n+1)) d_{n-1}
        for n in [3u32, 5, 10] {
            let p = FinitePmf::from_pairs(&[(1, 0.5), (n, 0.5)]).unwrap();
            let c = p.downshifted_size_biased().unwrap();
            let nf = n as f64;
            assert!((c.mass(0) - 1.0 / (nf + 1.0)).abs() < 1e-14);
            assert!((c.mass(n - 1) - nf / (nf + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn downshift_of_dirac() {
        let p = FinitePmf::dirac(4);
        let c = p.downshifted_size_biased().unwrap();
        assert!(c.approx_eq(&FinitePmf::dirac(3), 1e-15));
    }

    #[test]
    fn thinning_degenerate_rates() {
        let p = FinitePmf::from_pairs(&[(2, 0.25), (5, 0.75)]).unwrap();
        assert!(p.thinned(1.0).unwrap().approx_eq(&p, 0.0));
        assert!(p.thinned(0.0).unwrap().approx_eq(&FinitePmf::dirac(0), 0.0));
    }

    #[test]
    fn thinning_mean_scales() {
        let p = FinitePmf::from_pairs(&[(1, 0.2), (4, 0.5), (9, 0.3)]).unwrap();
        let t = p.thinned(0.3).unwrap();
        assert!((t.mean() - 0.3 * p.mean()).abs() < 1e-12);
    }

    #[test]
    fn cdf_and_gf() {
        let p = FinitePmf::from_pairs(&[(0, 0.5), (2, 0.5)]).unwrap();
        assert_eq!(p.cdf(0), 0.5);
        assert_eq!(p.cdf(1), 0.5);
        assert_eq!(p.cdf(2), 1.0);
        assert!((p.gf(0.5) - (0.5 + 0.5 * 0.25)).abs() < 1e-15);
        assert!((p.gf_derivative(0.5) - 0.5).abs() < 1e-15);
    }
}
