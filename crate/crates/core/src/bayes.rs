//! Encompassing-prior Bayes factors for `M0: θ ≤ z` against the full
//! binomial model `M1`.
//!
//! With the constrained prior taken as the truncation of the full-model
//! prior to `[0, z]`, the Bayes factor is the full model's posterior mass on
//! `[0, z]` divided by its prior mass there. Both masses are incomplete beta
//! values, so no quadrature is involved.

use crate::data::{BinomialData, Boundary, PriorFamily};
use crate::error::Result;
use crate::special::{log_regularized_incomplete_beta, BetaParams, LogValue};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesResult {
    pub prior: PriorFamily,
    /// `ln B01`.
    pub log_b01: LogValue,
    /// Posterior probability of `M0` under equal prior model odds.
    pub w0: f64,
    /// `ln` of the full-model prior mass on `[0, z]`.
    pub log_prior_mass: LogValue,
    /// `ln` of the full-model posterior mass above `z`.
    pub log_posterior_tail: LogValue,
}

impl BayesResult {
    pub fn b01(&self) -> f64 {
        self.log_b01.exp()
    }

    /// Supremum of `B01` over all data: one over the prior mass.
    pub fn b01_bound(&self) -> f64 {
        (-self.log_prior_mass.ln()).exp()
    }

    /// Supremum of `w0` over all data, `1 / (1 + prior mass)`.
    pub fn max_weight(&self) -> f64 {
        1.0 / (1.0 + self.log_prior_mass.exp())
    }

    /// `B01 < 1 / prior mass` holds strictly exactly when the posterior puts
    /// positive mass above `z`. The tail is carried in log scale, so this
    /// stays decidable where `B01` itself has rounded onto the bound.
    pub fn satisfies_strict_bound(&self) -> bool {
        self.log_b01.ln() <= -self.log_prior_mass.ln()
            && self.log_posterior_tail.ln() > f64::NEG_INFINITY
    }

    /// `ln (max_weight − w0)`, computed from the posterior tail `t`:
    /// `max_weight − w0 = m t / ((1 + m)(1 + m − t))` with prior mass `m`.
    pub fn log_weight_gap(&self) -> f64 {
        let m = self.log_prior_mass.exp();
        let t = self.log_posterior_tail.exp();
        self.log_prior_mass.ln() + self.log_posterior_tail.ln()
            - m.ln_1p()
            - (1.0 + m - t).ln()
    }
}

/// Bayes factor under the given prior family.
pub fn bayes_factor(
    data: BinomialData,
    boundary: Boundary,
    prior: PriorFamily,
) -> Result<BayesResult> {
    let z = boundary.z();
    let (a0, b0) = prior.shapes();
    let posterior = BetaParams::new(data.y() as f64 + a0, data.failures() as f64 + b0)?;
    let tails = log_regularized_incomplete_beta(z, posterior)?;
    let log_prior_mass = match prior {
        PriorFamily::Uniform => LogValue::new(z.ln())?,
        PriorFamily::Jeffreys => {
            log_regularized_incomplete_beta(z, BetaParams::new(a0, b0)?)?.log_lower
        }
    };
    let log_b01 = tails.log_lower - log_prior_mass;
    Ok(BayesResult {
        prior,
        log_b01,
        w0: posterior_weight(log_b01.ln()),
        log_prior_mass,
        log_posterior_tail: tails.log_upper,
    })
}

/// `ln B01 = ln [I_z(y + 1, N − y + 1) / z]`.
pub fn bayes_factor_uniform(data: BinomialData, boundary: Boundary) -> Result<BayesResult> {
    bayes_factor(data, boundary, PriorFamily::Uniform)
}

/// `ln B01 = ln [I_z(y + ½, N − y + ½) / I_z(½, ½)]`.
pub fn bayes_factor_jeffreys(data: BinomialData, boundary: Boundary) -> Result<BayesResult> {
    bayes_factor(data, boundary, PriorFamily::Jeffreys)
}

/// `B01 / (1 + B01)` from `ln B01`, as a logistic in log space.
pub fn posterior_weight(log_b01: f64) -> f64 {
    if log_b01 >= 0.0 {
        1.0 / (1.0 + (-log_b01).exp())
    } else {
        let e = log_b01.exp();
        e / (1.0 + e)
    }
}

/// `1 / (1 + z)`, the limit of the uniform-prior weight for data that
/// satisfy the constraint.
pub fn max_constrained_weight(boundary: Boundary) -> f64 {
    1.0 / (1.0 + boundary.z())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn data(n: u64, y: u64) -> BinomialData {
        BinomialData::new(n, y).unwrap()
    }

    fn z(v: f64) -> Boundary {
        Boundary::new(v).unwrap()
    }

    #[test]
    fn uniform_single_failure() {
        // Posterior Beta(1, 2): mass below 0.5 is 0.75.
        let r = bayes_factor_uniform(data(1, 0), z(0.5)).unwrap();
        assert!((r.b01() - 1.5).abs() < 1e-14);
        assert!((r.w0 - 0.6).abs() < 1e-14);
    }

    #[test]
    fn uniform_all_failures_closed_form() {
        let r = bayes_factor_uniform(data(20, 0), z(0.5)).unwrap();
        let want = 2.0 * (1.0 - 0.5f64.powi(21));
        assert!((r.b01() - want).abs() < 1e-14);
    }

    #[test]
    fn uniform_prefers_full_model_inside_constraint() {
        let r = bayes_factor_uniform(data(25, 19), z(0.8)).unwrap();
        // Exact rational binomial sum: I_0.8(20, 7) / 0.8.
        assert!((r.b01() - 0.934_207_683_496_909_7).abs() < 1e-12);
        assert!(r.b01() < 1.0);
        assert!(r.w0 < 0.5);
    }

    #[test]
    fn jeffreys_single_failure() {
        let r = bayes_factor_jeffreys(data(1, 0), z(0.5)).unwrap();
        let want = (0.5 + 1.0 / PI) / 0.5;
        assert!((r.b01() - want).abs() < 1e-13);
    }

    #[test]
    fn jeffreys_symmetric_data_at_half() {
        for n in [2, 10, 50, 400] {
            let r = bayes_factor_jeffreys(data(n, n / 2), z(0.5)).unwrap();
            assert!(r.log_b01.ln().abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn jeffreys_against_quadrature() {
        // Independent adaptive quadrature of the Beta(19.5, 6.5) and
        // Beta(½, ½) densities on [0, 0.8].
        let r = bayes_factor_jeffreys(data(25, 19), z(0.8)).unwrap();
        assert!((r.b01() - 0.999_286_443_832_579_5).abs() < 1e-12);
    }

    #[test]
    fn posterior_weight_examples() {
        assert_eq!(posterior_weight(0.0), 0.5);
        assert!((posterior_weight(3f64.ln()) - 0.75).abs() < 1e-15);
        assert!((posterior_weight(1.5f64.ln()) - 0.6).abs() < 1e-15);
        assert!(posterior_weight(-800.0) >= 0.0);
        assert_eq!(posterior_weight(800.0), 1.0);
    }

    #[test]
    fn max_weight_examples() {
        assert!((max_constrained_weight(z(0.5)) - 2.0 / 3.0).abs() < 1e-15);
        assert!((max_constrained_weight(z(0.8)) - 5.0 / 9.0).abs() < 1e-15);
        assert!((max_constrained_weight(z(0.2)) - 5.0 / 6.0).abs() < 1e-15);
        let r = bayes_factor_uniform(data(3, 1), z(0.2)).unwrap();
        assert!((r.max_weight() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn weight_gap_matches_direct_difference() {
        let r = bayes_factor_uniform(data(10, 3), z(0.5)).unwrap();
        let direct = r.max_weight() - r.w0;
        assert!((r.log_weight_gap().exp() - direct).abs() < 1e-14);
    }

    #[test]
    fn strict_bound_survives_rounding() {
        // I_0.99(1, 201) rounds to 1, B01 to 1/z; the tail does not.
        let r = bayes_factor_uniform(data(200, 0), z(0.99)).unwrap();
        assert!(r.satisfies_strict_bound());
        assert!(r.log_posterior_tail.ln() < -900.0);
    }
}
