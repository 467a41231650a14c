//! Stochastic-order verdicts for finite integer distributions, the
//! one-dimensional Wasserstein distance, and closed-form Pareto ordering
//! criteria.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::FinitePmf;

/// Absolute slack for pointwise transform comparisons.
pub const CMP_TOL: f64 = 1e-10;
/// Relative tolerance for equality-constrained orders (cx mean equality,
/// Pareto mean ties).
pub const REL_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderRelation {
    St,
    Cx,
    Cv,
    Icx,
    Icv,
    Lt,
}

impl std::str::FromStr for OrderRelation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "st" => Self::St,
            "cx" => Self::Cx,
            "cv" => Self::Cv,
            "icx" => Self::Icx,
            "icv" => Self::Icv,
            "lt" => Self::Lt,
            other => {
                return Err(Error::Parse(format!(
                    "unknown order relation '{other}' (expected st/cx/cv/icx/icv/lt)"
                )))
            }
        })
    }
}

/// Point of first violation: `location` is the integer test point k (or
/// the grid value s for Lt; -1 flags a mean-equality mismatch), with the
/// two compared transform values.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub location: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderVerdict {
    pub relation: OrderRelation,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Lt is decided on a finite grid of [0,1]; a pass is a semi-decision.
    pub grid_semi_decision: bool,
}

impl OrderVerdict {
    fn pass(relation: OrderRelation) -> Self {
        Self {
            relation,
            holds: true,
            witness: None,
            grid_semi_decision: matches!(relation, OrderRelation::Lt),
        }
    }

    fn fail(relation: OrderRelation, witness: Witness) -> Self {
        Self {
            relation,
            holds: false,
            witness: Some(witness),
            grid_semi_decision: matches!(relation, OrderRelation::Lt),
        }
    }
}

/// E (X - k)_+
pub fn stop_loss(p: &FinitePmf, k: u32) -> f64 {
    p.support()
        .filter(|&(j, _)| j > k)
        .map(|(j, m)| (j - k) as f64 * m)
        .sum()
}

/// E min(X, k)
pub fn min_transform(p: &FinitePmf, k: u32) -> f64 {
    p.support().map(|(j, m)| j.min(k) as f64 * m).sum()
}

fn means_equal(p: &FinitePmf, q: &FinitePmf) -> bool {
    let (a, b) = (p.mean(), q.mean());
    (a - b).abs() <= REL_EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Decide whether `p <= q` in the given stochastic order.
///
/// Integer test points suffice for st/icx/icv on integer-supported
/// distributions (the transforms are piecewise linear between integers);
/// Lt is checked on a 1001-point grid of [0,1] and reported as a
/// semi-decision.
pub fn check_order(p: &FinitePmf, q: &FinitePmf, relation: OrderRelation) -> OrderVerdict {
    match relation {
        OrderRelation::St => {
            let hi = p.max_degree().max(q.max_degree());
            for k in 0..=hi {
                // tail form: P(X > k) <= P(Y > k)
                let lhs = 1.0 - p.cdf(k);
                let rhs = 1.0 - q.cdf(k);
                if lhs > rhs + CMP_TOL {
                    return OrderVerdict::fail(relation, Witness { location: k as f64, lhs, rhs });
                }
            }
            OrderVerdict::pass(relation)
        }
        OrderRelation::Icx => {
            let hi = p.max_degree().max(q.max_degree());
            for k in 0..=hi {
                let lhs = stop_loss(p, k);
                let rhs = stop_loss(q, k);
                if lhs > rhs + CMP_TOL {
                    return OrderVerdict::fail(relation, Witness { location: k as f64, lhs, rhs });
                }
            }
            OrderVerdict::pass(relation)
        }
        OrderRelation::Icv => {
            let hi = p.max_degree().max(q.max_degree());
            for k in 0..=hi {
                let lhs = min_transform(p, k);
                let rhs = min_transform(q, k);
                if lhs > rhs + CMP_TOL {
                    return OrderVerdict::fail(relation, Witness { location: k as f64, lhs, rhs });
                }
            }
            OrderVerdict::pass(relation)
        }
        OrderRelation::Cx => {
            if !means_equal(p, q) {
                return OrderVerdict::fail(
                    relation,
                    Witness { location: -1.0, lhs: p.mean(), rhs: q.mean() },
                );
            }
            let icx = check_order(p, q, OrderRelation::Icx);
            OrderVerdict { relation, holds: icx.holds, witness: icx.witness, grid_semi_decision: false }
        }
        // X <=cv Y iff Y <=cx X
        OrderRelation::Cv => {
            let cx = check_order(q, p, OrderRelation::Cx);
            OrderVerdict { relation, holds: cx.holds, witness: cx.witness, grid_semi_decision: false }
        }
        OrderRelation::Lt => {
            // p <=Lt q iff G_p >= G_q on [0,1]
            const GRID: u32 = 1000;
            for i in 0..=GRID {
                let s = i as f64 / GRID as f64;
                let lhs = p.gf(s);
                let rhs = q.gf(s);
                if lhs < rhs - CMP_TOL {
                    return OrderVerdict::fail(relation, Witness { location: s, lhs, rhs });
                }
            }
            OrderVerdict::pass(relation)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub st: OrderVerdict,
    pub cv: OrderVerdict,
    pub icv: OrderVerdict,
    pub lt: OrderVerdict,
    /// Any violated implication signals a checker bug.
    pub violations: Vec<String>,
}

/// Evaluate st/cv/icv/Lt for the pair and cross-check the implications
/// st => icv, cv => icv, icv => Lt.
pub fn implication_chain(p: &FinitePmf, q: &FinitePmf) -> ChainReport {
    let st = check_order(p, q, OrderRelation::St);
    let cv = check_order(p, q, OrderRelation::Cv);
    let icv = check_order(p, q, OrderRelation::Icv);
    let lt = check_order(p, q, OrderRelation::Lt);
    let mut violations = Vec::new();
    if st.holds && !icv.holds {
        violations.push("st holds but icv fails".to_string());
    }
    if cv.holds && !icv.holds {
        violations.push("cv holds but icv fails".to_string());
    }
    if icv.holds && !lt.holds {
        violations.push("icv holds but Lt fails".to_string());
    }
    ChainReport { st, cv, icv, lt, violations }
}

/// d_W(p, q) = sum_k |F_p(k) - F_q(k)| for integer distributions.
pub fn wasserstein_distance(p: &FinitePmf, q: &FinitePmf) -> f64 {
    let hi = p.max_degree().max(q.max_degree());
    let mut fp = 0.0;
    let mut fq = 0.0;
    let mut total = 0.0;
    for k in 0..hi {
        fp += p.mass(k);
        fq += q.mass(k);
        total += (fp - fq).abs();
    }
    total
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParetoOrderVerdicts {
    pub icx: bool,
    pub cx: bool,
    pub icv: bool,
}

fn le_rel(a: f64, b: f64) -> bool {
    a <= b + REL_EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

fn eq_rel(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Closed-form ordering criteria for Par(alpha1, c1) vs Par(alpha2, c2):
/// icx iff mean1 <= mean2 and alpha1 >= alpha2; cx additionally requires
/// equal means; icv iff mean1 <= mean2 and c1 <= c2.
pub fn pareto_order(alpha1: f64, c1: f64, alpha2: f64, c2: f64) -> Result<ParetoOrderVerdicts> {
    for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
        if !a.is_finite() || a <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must exceed 1 for a finite mean, got {a}"
            )));
        }
    }
    for (name, c) in [("c1", c1), ("c2", c2)] {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {c}"
            )));
        }
    }
    let mean1 = c1 / (1.0 - 1.0 / alpha1);
    let mean2 = c2 / (1.0 - 1.0 / alpha2);
    let icx = le_rel(mean1, mean2) && le_rel(alpha2, alpha1);
    let cx = eq_rel(mean1, mean2) && le_rel(alpha2, alpha1);
    let icv = le_rel(mean1, mean2) && le_rel(c1, c2);
    Ok(ParetoOrderVerdicts { icx, cx, icv })
}
