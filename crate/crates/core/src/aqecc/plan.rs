//! Parameter planning for the keyed construction and Singleton-type bounds.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// Block length at which planned rates are checked against the bound.
pub const PLAN_CHECK_LENGTH: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPlan {
    pub rate_target: f64,
    pub gamma: f64,
    /// Constant in front of `f(g) = c g^{3/5}`.
    pub f_constant: f64,
    /// `gamma'' = gamma / 4`.
    pub gamma2: f64,
    /// `R' = R / (1 - gamma'')`.
    pub private_rate: f64,
    /// Gap of the private code.
    pub gamma1: f64,
    pub f_value: f64,
    /// RSS rate `r = gamma''`.
    pub rss_rate: f64,
    pub log2_q: f64,
    pub log2_a: f64,
    /// Bits of secret capacity per share, `r log2 a`; must reach the one
    /// key bit per code symbol.
    pub rss_capacity_bits: f64,
    pub rate: f64,
    pub radius: f64,
    pub target_radius: f64,
    pub singleton: Option<SingletonReport>,
    pub note: Option<String>,
}

impl ParameterPlan {
    /// All feasibility checks pass.
    pub fn feasible(&self) -> bool {
        self.note.is_none()
            && self.rate + 1e-12 >= self.rate_target
            && self.radius + 1e-12 >= self.target_radius
            && self.rss_capacity_bits >= 1.0
            && self.singleton.as_ref().is_some_and(|s| s.ok && s.slack > 0.0)
    }
}

/// Plan private-code and sharing parameters for overall rate `rate` and gap `gamma`.
pub fn plan_parameters(rate: f64, gamma: f64, f_constant: f64) -> Result<ParameterPlan> {
    if !(rate > 0.0 && rate < 1.0) || !(gamma > 0.0) || !(f_constant > 0.0) {
        bail!(Domain, "need 0 < R < 1, gamma > 0 and a positive constant; got R={rate} gamma={gamma} c={f_constant}");
    }
    let g2 = gamma / 4.0;
    let rp = rate / (1.0 - g2);
    let f_value = f_constant * g2.powf(0.6);
    let g1 = if g2 < f_value { g2 } else { f_value };
    let r = g2;
    let log2_q = g1.powi(-5);
    let log2_a = g2.powi(-2);
    let mut plan = ParameterPlan {
        rate_target: rate,
        gamma,
        f_constant,
        gamma2: g2,
        private_rate: rp,
        gamma1: g1,
        f_value,
        rss_rate: r,
        log2_q,
        log2_a,
        rss_capacity_bits: r * log2_a,
        rate: rp * log2_q / (log2_q + log2_a),
        radius: 0.0,
        target_radius: ((1.0 - rate - gamma) / 2.0).max(0.0),
        singleton: None,
        note: None,
    };
    if rate > 1.0 - gamma || rp > 1.0 {
        plan.note = Some("rate exceeds 1 - gamma; the decoding radius is 0".into());
        plan.target_radius = 0.0;
        return Ok(plan);
    }
    plan.radius = 0.5 * (1.0 - rp - g1).min(1.0 - r - g2);
    let n = PLAN_CHECK_LENGTH;
    let k = (plan.rate * n as f64).floor() as usize;
    plan.singleton = Some(singleton_check(n, k, log2_q + log2_a, plan.radius, 0.0));
    Ok(plan)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingletonReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub bound: f64,
    pub slack: f64,
    pub ok: bool,
}

fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `n - 2(d-1) + 12 sqrt(eps) n + H2(min(4 sqrt(eps), 1/2)) / log2 q`.
pub fn robust_singleton_bound(n: usize, d: usize, log2_q: f64, eps: f64) -> f64 {
    let se = eps.max(0.0).sqrt();
    n as f64 - 2.0 * (d as f64 - 1.0) + 12.0 * se * n as f64 + h2((4.0 * se).min(0.5)) / log2_q
}

/// Evaluate the robust Singleton bound at distance `floor(delta n) + 1`.
pub fn singleton_check(n: usize, k: usize, log2_q: f64, delta: f64, eps: f64) -> SingletonReport {
    let d = (delta * n as f64 + 1e-9).floor() as usize + 1;
    let bound = robust_singleton_bound(n, d, log2_q, eps);
    let slack = bound - k as f64;
    SingletonReport { n, k, d, bound, slack, ok: slack >= 0.0 }
}
