//! Extinction and survival probabilities, the configuration-model
//! branching functional, closed-form upper bounds, the critical mean
//! degree for Poisson thinning, and hypothesis-checked monotonicity
//! verdicts.

use serde::Serialize;

use crate::dist::DegreeDistribution;
use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;
use crate::orders::{self, OrderRelation};
use crate::pmf::FinitePmf;

pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_ITER: u64 = 1_000_000;
/// Slack for closed-threshold comparisons such as eta <= e^{-2/(l+1)}.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Outcome of the smallest-fixed-point solve for G(s) = s.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPointSolve {
    pub eta: f64,
    pub iterations: u64,
    pub residual: f64,
}

/// Smallest fixed point of the generating function on [0,1], i.e. the
/// extinction probability of a Galton-Watson process with offspring law
/// `d`.
///
/// Shortcuts: a law with p(1) = 1 has G(s) = s identically, so the
/// smallest fixed point is 0; any other law concentrated on {0,1}, and
/// any law with mean <= 1, is (sub)critical with eta = 1. Otherwise the
/// monotone iteration s <- G(s) from 0 converges upward to the smallest
/// fixed point; a bisection fallback on G(s) - s handles near-critical
/// stalls.
pub fn extinction_probability(d: &DegreeDistribution, tol: f64) -> Result<FixedPointSolve> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "solver tolerance must be positive, got {tol}"
        )));
    }
    let p1 = d.pmf(1);
    if p1 >= 1.0 - 1e-12 {
        return Ok(FixedPointSolve { eta: 0.0, iterations: 0, residual: 0.0 });
    }
    let p0 = d.pmf(0);
    if p0 + p1 >= 1.0 - 1e-12 {
        return Ok(FixedPointSolve { eta: 1.0, iterations: 0, residual: 0.0 });
    }
    let m1 = d.mean();
    // means are closed-form for every family; only the G evaluations are
    // quadrature-based, so the shortcut threshold needs no extra slack
    if m1.is_finite() && m1 <= 1.0 {
        return Ok(FixedPointSolve { eta: 1.0, iterations: 0, residual: 0.0 });
    }

    let mut s = 0.0;
    let mut iterations = 0u64;
    while iterations < MAX_ITER {
        let g = d.gf(s)?;
        let step = g - s;
        if step.abs() <= tol {
            let eta = g.clamp(0.0, 1.0);
            let residual = (d.gf(eta)? - eta).abs();
            return Ok(FixedPointSolve { eta, iterations, residual });
        }
        s = g.clamp(0.0, 1.0);
        iterations += 1;
    }
    bisection_fallback(d, s, tol, iterations)
}

/// Bisection on G(s) - s over [lo, 1): used when the monotone iteration
/// exhausts its budget near criticality. The iterate `lo` is always a
/// lower bound for the smallest fixed point.
fn bisection_fallback(
    d: &DegreeDistribution,
    lo: f64,
    tol: f64,
    iterations: u64,
) -> Result<FixedPointSolve> {
    let mut iterations = iterations;
    let mut hi = None;
    // probe geometrically toward 1 for a sign change
    for j in 1..=48 {
        let t = lo + (1.0 - lo) * (1.0 - 0.5f64.powi(j));
        iterations += 1;
        if d.gf(t)? - t < -tol {
            hi = Some(t);
            break;
        }
    }
    let Some(mut hi) = hi else {
        // no sign change detected: the fixed point is within tol-level
        // distance of 1 along G(s)-s; report the iterate
        let residual = (d.gf(lo)? - lo).abs();
        return Ok(FixedPointSolve { eta: lo, iterations, residual });
    };
    let mut lo = lo;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        if d.gf(mid)? - mid >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = 0.5 * (lo + hi);
    let residual = (d.gf(eta)? - eta).abs();
    Ok(FixedPointSolve { eta, iterations, residual })
}

/// Survival probability 1 - eta.
pub fn survival(d: &DegreeDistribution, tol: f64) -> Result<f64> {
    Ok(1.0 - extinction_probability(d, tol)?.eta)
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaReport {
    /// Limiting giant-component fraction.
    pub zeta_cm: f64,
    /// Extinction probability of the downshifted size-biased law.
    pub eta_circ: f64,
    /// G_p evaluated at eta_circ.
    pub eta_root_gf: f64,
    pub iterations: u64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Limiting giant-component fraction of the configuration model:
/// 1 - G_p(eta(p°)).
pub fn zeta_cm(d: &DegreeDistribution, tol: f64) -> Result<ZetaReport> {
    let circ = d.downshifted_size_biased()?;
    let solve = extinction_probability(&circ, tol)?;
    let eta_root_gf = d.gf(solve.eta)?;
    let warning = if (d.pmf(2) - 1.0).abs() <= 1e-12 {
        Some(
            "degree distribution concentrated on 2: the component-size limit \
             excludes this case; returned value is the formula evaluation"
                .to_string(),
        )
    } else {
        None
    };
    Ok(ZetaReport {
        zeta_cm: 1.0 - eta_root_gf,
        eta_circ: solve.eta,
        eta_root_gf,
        iterations: solve.iterations,
        residual: solve.residual,
        warning,
    })
}

fn require_finite_nonzero_mean(d: &DegreeDistribution) -> Result<f64> {
    let m1 = d.mean();
    if m1 == 0.0 {
        return Err(Error::ZeroMean);
    }
    if !m1.is_finite() {
        return Err(Error::InfiniteMean);
    }
    Ok(m1)
}

/// Mean-degree bound: zeta_cm <= m1 / 2 (uncapped).
pub fn bound_mean_half(d: &DegreeDistribution) -> Result<f64> {
    Ok(require_finite_nonzero_mean(d)? / 2.0)
}

/// zeta_cm <= 1 - p(0) - p(1)^2 / m1.
pub fn bound_crude2(d: &DegreeDistribution) -> Result<f64> {
    let m1 = require_finite_nonzero_mean(d)?;
    Ok(1.0 - d.pmf(0) - d.pmf(1).powi(2) / m1)
}

/// zeta_cm <= 1 - p(0) - p(1) a - p(2) a^2 with a = p(1) / (m1 - 2 p(2)),
/// when the denominator is positive; `None` otherwise.
pub fn bound_crude3(d: &DegreeDistribution) -> Result<Option<f64>> {
    let m1 = require_finite_nonzero_mean(d)?;
    let denom = m1 - 2.0 * d.pmf(2);
    if denom <= 0.0 {
        return Ok(None);
    }
    let a = d.pmf(1) / denom;
    Ok(Some(1.0 - d.pmf(0) - d.pmf(1) * a - d.pmf(2) * a * a))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    /// m1 / 2, clamped to 1.
    pub mean_half: f64,
    pub crude2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crude3: Option<f64>,
    pub zeta_cm: f64,
}

pub fn bounds_report(d: &DegreeDistribution, tol: f64) -> Result<BoundsReport> {
    Ok(BoundsReport {
        mean_half: bound_mean_half(d)?.min(1.0),
        crude2: bound_crude2(d)?,
        crude3: bound_crude3(d)?,
        zeta_cm: zeta_cm(d, tol)?.zeta_cm,
    })
}

/// Critical mean degree: the smallest lambda with
/// lambda * zeta(Poi(lambda)) = 2, located by bisection on [2, 10].
pub fn lambda_cr(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let eta_tol = 1e-12;
    let f = |lambda: f64| -> Result<f64> {
        let poi = DegreeDistribution::poisson(lambda)?;
        Ok(lambda * survival(&poi, eta_tol)? - 2.0)
    };
    let mut lo = 2.0;
    let mut hi = 10.0;
    // resolve the defining equation itself to 1e-7 even when the interval
    // tolerance is loose
    let width_floor = 1e-12;
    loop {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if (hi - lo <= tol && fm.abs() <= 1e-7) || hi - lo <= width_floor {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub hypothesis_icv: bool,
    /// p(i) = q(i) for i = 0..=ell, within 1e-12.
    pub hypothesis_prefix_match: bool,
    /// eta(q°) <= e^{-2/(ell+1)}.
    pub hypothesis_eta_small: bool,
    /// zeta_cm(p) <= zeta_cm(q) + 1e-9.
    pub conclusion_holds: bool,
    pub ell: u32,
}

impl TheoremCheck {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_icv && self.hypothesis_prefix_match && self.hypothesis_eta_small
    }
}

fn prefix_match(p: &FinitePmf, q: &FinitePmf, ell: u32) -> bool {
    (0..=ell).all(|i| (p.mass(i) - q.mass(i)).abs() <= 1e-12)
}

/// Evaluate the hypotheses and conclusion of the small-extinction
/// monotonicity theorem: if p <=icv q, the pmfs agree on {0,..,ell}, and
/// eta(q°) <= e^{-2/(ell+1)}, then zeta_cm(p) <= zeta_cm(q).
pub fn verify_ordering_theorem(p: &FinitePmf, q: &FinitePmf, ell: u32) -> Result<TheoremCheck> {
    let hypothesis_icv = orders::check_order(p, q, OrderRelation::Icv).holds;
    let hypothesis_prefix_match = prefix_match(p, q, ell);
    let q_dist = DegreeDistribution::Finite(q.clone());
    let q_circ = q_dist.downshifted_size_biased()?;
    let eta_q_circ = extinction_probability(&q_circ, DEFAULT_TOL)?.eta;
    let threshold = (-2.0 / (ell as f64 + 1.0)).exp();
    let hypothesis_eta_small = eta_q_circ <= threshold + THRESHOLD_SLACK;
    let p_dist = DegreeDistribution::Finite(p.clone());
    let zeta_p = zeta_cm(&p_dist, DEFAULT_TOL)?.zeta_cm;
    let zeta_q = zeta_cm(&q_dist, DEFAULT_TOL)?.zeta_cm;
    let conclusion_holds = zeta_p <= zeta_q + 1e-9;
    Ok(TheoremCheck {
        hypothesis_icv,
        hypothesis_prefix_match,
        hypothesis_eta_small,
        conclusion_holds,
        ell,
    })
}

/// Grid check of G_{p°} >= G_{q°} on [0, e^{-2/(ell+1)}] for an icv-ordered
/// pair with matching prefix. Hypothesis violations are reported as
/// errors, distinct from an ordering failure (`Ok(false)`).
pub fn gf_circ_ordering_region(
    p: &FinitePmf,
    q: &FinitePmf,
    ell: u32,
    grid: u32,
) -> Result<bool> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    if !orders::check_order(p, q, OrderRelation::Icv).holds {
        return Err(Error::Hypothesis("p is not icv-dominated by q".into()));
    }
    if !prefix_match(p, q, ell) {
        return Err(Error::Hypothesis(format!(
            "pmfs differ on the prefix {{0,..,{ell}}}"
        )));
    }
    let p_circ = p.downshifted_size_biased()?;
    let q_circ = q.downshifted_size_biased()?;
    let s_max = (-2.0 / (ell as f64 + 1.0)).exp();
    for i in 0..grid {
        let s = s_max * i as f64 / (grid - 1) as f64;
        if p_circ.gf(s) < q_circ.gf(s) - 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed-form icv comparison for the mixing laws that admit one.
fn mixing_icv_le(mu: &MixingDistribution, nu: &MixingDistribution) -> Result<bool> {
    use MixingDistribution::*;
    let le = |a: f64, b: f64| a <= b + 1e-12 * a.abs().max(b.abs()).max(1.0);
    match (mu, nu) {
        (Dirac { x }, Dirac { x: y }) => Ok(le(*x, *y)),
        (Pareto { alpha: a1, scale: c1 }, Pareto { alpha: a2, scale: c2 }) => {
            Ok(orders::pareto_order(*a1, *c1, *a2, *c2)?.icv)
        }
        // Par(alpha, c) <=icv Dirac(y) iff its mean is <= y
        (Pareto { .. }, Dirac { x: y }) => Ok(mu.mean().is_finite() && le(mu.mean(), *y)),
        // Dirac(x) <=icv Par(alpha, c) iff x <= c (the integrated-quantile
        // slope at 0 is c)
        (Dirac { x }, Pareto { scale: c, .. }) => Ok(le(*x, *c)),
        _ => Err(Error::Hypothesis(
            "no closed-form icv criterion for lognormal mixing".into(),
        )),
    }
}

/// Grid check of the mixed-Poisson ordering G_{p°} >= G_{q°} on
/// [0, 1 - 2/c] for icv-ordered mixings supported in [c, inf), c >= 2.
pub fn mpoi_icv_gf_ordering(
    mu: &MixingDistribution,
    nu: &MixingDistribution,
    grid: u32,
) -> Result<bool> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let c = mu.support_lower_bound().min(nu.support_lower_bound());
    if c < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "mixing supports must lie in [c, inf) with c >= 2, got lower bound {c}"
        )));
    }
    if !mixing_icv_le(mu, nu)? {
        return Err(Error::Hypothesis("mu is not icv-dominated by nu".into()));
    }
    let mu_star = mu.size_biased()?;
    let nu_star = nu.size_biased()?;
    let s_max = 1.0 - 2.0 / c;
    for i in 0..grid {
        let s = s_max * i as f64 / (grid - 1) as f64;
        // G_{MPoi(m)°}(s) = L_{m*}(1 - s)
        if mu_star.laplace(1.0 - s) < nu_star.laplace(1.0 - s) - 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}
