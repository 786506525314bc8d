//! Luckiness normalized maximum likelihood (LNML) and standard NML for the
//! full and order-constrained binomial models.
//!
//! The sample space of a binomial experiment is the `N + 1` possible
//! success counts, so the normalizer is an exact finite sum of maximized
//! weighted likelihoods. Every likelihood here includes the binomial
//! coefficient, in the numerator and in every normalizer term.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::data::{BinomialData, Boundary};
use crate::error::{Error, Result};
use crate::special::{log_binomial_coefficient, log_sum_exp, LogValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LuckinessSpec {
    /// `a(θ) = −ln θ^½ (1 − θ)^½`, matched to the uniform prior.
    MatchedUniform,
    /// `a(θ) = c`; LNML reduces to standard NML. The constant cancels
    /// between numerator and normalizer and is fixed at 0.
    Constant,
}

/// LNML of one model for one observed data set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnmlResult {
    pub log_numerator: LogValue,
    pub log_normalizer: LogValue,
    /// `log_numerator − log_normalizer`.
    pub log_lnml: LogValue,
    /// The model's own (clipped) estimate for the observed data.
    pub estimator: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnmlWeights {
    pub w0: f64,
    pub w1: f64,
}

fn check_open(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange(theta))
    }
}

/// `a(θ) = −½ ln θ − ½ ln(1 − θ)`; minimum `ln 2` at `θ = ½`.
pub fn luckiness(theta: f64) -> Result<f64> {
    check_open(theta)?;
    Ok(-0.5 * theta.ln() - 0.5 * (-theta).ln_1p())
}

/// Fisher information of one Bernoulli trial, `1 / (θ (1 − θ))`.
pub fn fisher_information(theta: f64) -> Result<f64> {
    check_open(theta)?;
    Ok(1.0 / (theta * (1.0 - theta)))
}

/// `ln p^L(y | θ) = ln p(y | θ) − a(θ)`.
///
/// Under `Constant` luckiness `θ` may sit on an endpoint, where `0^0 = 1`.
pub fn weighted_log_likelihood(
    data: BinomialData,
    theta: f64,
    luck: LuckinessSpec,
) -> Result<LogValue> {
    let successes = data.y() as f64;
    let failures = data.failures() as f64;
    let log_choose = log_binomial_coefficient(data.n(), data.y())?.ln();
    match luck {
        LuckinessSpec::MatchedUniform => {
            check_open(theta)?;
            LogValue::new(
                log_choose + (successes + 0.5) * theta.ln() + (failures + 0.5) * (-theta).ln_1p(),
            )
        }
        LuckinessSpec::Constant => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::ThetaOutOfRange(theta));
            }
            LogValue::new(
                log_choose + x_ln_y(successes, theta) + x_ln_y(failures, 1.0 - theta),
            )
        }
    }
}

/// `x ln y` with `0 ln 0 = 0`.
fn x_ln_y(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `(y + ½) / (N + 1)`, the maximizer of the matched-luckiness likelihood.
pub fn luckiness_estimator_full(data: BinomialData) -> f64 {
    (data.y() as f64 + 0.5) / (data.n() as f64 + 1.0)
}

/// Full-model luckiness estimate clipped to the constraint, inclusive at `z`.
pub fn luckiness_estimator_constrained(data: BinomialData, boundary: Boundary) -> f64 {
    clip(luckiness_estimator_full(data), Some(boundary))
}

/// `y / N`, clipped to `z` when a boundary is given.
pub fn ml_estimator(data: BinomialData, boundary: Option<Boundary>) -> f64 {
    clip(data.y() as f64 / data.n() as f64, boundary)
}

#[inline]
fn clip(theta: f64, boundary: Option<Boundary>) -> f64 {
    match boundary {
        Some(b) if theta > b.z() => b.z(),
        _ => theta,
    }
}

/// The estimator each model uses for `data`: luckiness ML under
/// `MatchedUniform`, plain ML under `Constant`, clipped when constrained.
pub fn estimator(data: BinomialData, boundary: Option<Boundary>, luck: LuckinessSpec) -> f64 {
    match luck {
        LuckinessSpec::MatchedUniform => clip(luckiness_estimator_full(data), boundary),
        LuckinessSpec::Constant => ml_estimator(data, boundary),
    }
}

/// Maximized weighted log-likelihood of `data` under the model.
fn maximized(data: BinomialData, boundary: Option<Boundary>, luck: LuckinessSpec) -> Result<(LogValue, f64)> {
    let theta = estimator(data, boundary, luck);
    Ok((weighted_log_likelihood(data, theta, luck)?, theta))
}

/// `ln Σ_{x=0}^{n} p^L(x | θ̂_x)` over the whole sample space.
pub fn lnml_normalizer(
    n: u64,
    boundary: Option<Boundary>,
    luck: LuckinessSpec,
) -> Result<LogValue> {
    let terms = BinomialData::sample_space(n)?
        .map(|x| maximized(x, boundary, luck).map(|(l, _)| l))
        .collect::<Result<Vec<_>>>()?;
    log_sum_exp(&terms)
}

fn evidence_with_normalizer(
    data: BinomialData,
    boundary: Option<Boundary>,
    luck: LuckinessSpec,
    log_normalizer: LogValue,
) -> Result<LnmlResult> {
    let (log_numerator, estimator) = maximized(data, boundary, luck)?;
    Ok(LnmlResult {
        log_numerator,
        log_normalizer,
        log_lnml: log_numerator - log_normalizer,
        estimator,
    })
}

fn weights_from(constrained: &LnmlResult, full: &LnmlResult) -> LnmlWeights {
    // Numerators are differenced first: when both models share the
    // estimate they cancel to exactly zero and the weight depends on the
    // normalizers alone.
    let log_odds = (constrained.log_numerator.ln() - full.log_numerator.ln())
        + (full.log_normalizer.ln() - constrained.log_normalizer.ln());
    LnmlWeights {
        w0: logistic(log_odds),
        w1: logistic(-log_odds),
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// LNML of the full model (`boundary = None`) or of `θ ≤ z`.
pub fn lnml_evidence(
    data: BinomialData,
    boundary: Option<Boundary>,
    luck: LuckinessSpec,
) -> Result<LnmlResult> {
    let norm = lnml_normalizer(data.n(), boundary, luck)?;
    evidence_with_normalizer(data, boundary, luck, norm)
}

/// `w_i = LNML_i / Σ_j LNML_j` for the constrained and full model.
pub fn lnml_weights(
    data: BinomialData,
    boundary: Boundary,
    luck: LuckinessSpec,
) -> Result<LnmlWeights> {
    let constrained = lnml_evidence(data, Some(boundary), luck)?;
    let full = lnml_evidence(data, None, luck)?;
    Ok(weights_from(&constrained, &full))
}

/// Standard NML, i.e. LNML under constant luckiness.
pub fn nml_evidence(data: BinomialData, boundary: Option<Boundary>) -> Result<LnmlResult> {
    lnml_evidence(data, boundary, LuckinessSpec::Constant)
}

pub fn nml_weights(data: BinomialData, boundary: Boundary) -> Result<LnmlWeights> {
    lnml_weights(data, boundary, LuckinessSpec::Constant)
}

type CacheKey = (u64, Option<u64>, LuckinessSpec);

/// Normalizers keyed by `(N, boundary, luckiness)`.
///
/// A sweep over `y` at fixed `N` needs only two normalizers; caching them
/// turns an `O(N²)` sweep into `O(N)`. Shareable across threads. Results
/// are identical to the uncached free functions.
#[derive(Debug, Default)]
pub struct NormalizerCache {
    entries: RwLock<HashMap<CacheKey, LogValue>>,
}

impl NormalizerCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn normalizer(
        &self,
        n: u64,
        boundary: Option<Boundary>,
        luck: LuckinessSpec,
    ) -> Result<LogValue> {
        let key = (n, boundary.map(|b| b.z().to_bits()), luck);
        if let Some(v) = self.entries.read().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(v);
        }
        let v = lnml_normalizer(n, boundary, luck)?;
        if let Ok(mut m) = self.entries.write() {
            m.insert(key, v);
        }
        Ok(v)
    }

    pub fn evidence(
        &self,
        data: BinomialData,
        boundary: Option<Boundary>,
        luck: LuckinessSpec,
    ) -> Result<LnmlResult> {
        let norm = self.normalizer(data.n(), boundary, luck)?;
        evidence_with_normalizer(data, boundary, luck, norm)
    }

    pub fn weights(
        &self,
        data: BinomialData,
        boundary: Boundary,
        luck: LuckinessSpec,
    ) -> Result<LnmlWeights> {
        let constrained = self.evidence(data, Some(boundary), luck)?;
        let full = self.evidence(data, None, luck)?;
        Ok(weights_from(&constrained, &full))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    const MU: LuckinessSpec = LuckinessSpec::MatchedUniform;
    const NML: LuckinessSpec = LuckinessSpec::Constant;

    fn data(n: u64, y: u64) -> BinomialData {
        BinomialData::new(n, y).unwrap()
    }

    fn z(v: f64) -> Boundary {
        Boundary::new(v).unwrap()
    }

    fn close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol * want.abs().max(1.0), "got {got}, want {want}");
    }

    #[test]
    fn luckiness_values() {
        close(luckiness(0.5).unwrap(), LN_2, 1e-15);
        close(luckiness(0.25).unwrap(), -0.5 * (0.25f64 * 0.75).ln(), 1e-15);
        close(luckiness(0.9).unwrap(), -0.5 * 0.09f64.ln(), 1e-14);
        assert_eq!(luckiness(0.0), Err(Error::ThetaOutOfRange(0.0)));
        assert!(luckiness(1.0).is_err());
    }

    #[test]
    fn fisher_information_values() {
        assert_eq!(fisher_information(0.5).unwrap(), 4.0);
        close(fisher_information(0.1).unwrap(), 1.0 / 0.09, 1e-14);
        close(fisher_information(0.9).unwrap(), 1.0 / 0.09, 1e-14);
        assert!(fisher_information(1.0).is_err());
    }

    #[test]
    fn weighted_likelihood_values() {
        let l = weighted_log_likelihood(data(1, 0), 0.5, MU).unwrap();
        close(l.ln(), 0.25f64.ln(), 1e-15);
        let l = weighted_log_likelihood(data(2, 1), 0.5, NML).unwrap();
        close(l.ln(), 0.5f64.ln(), 1e-15);
        // Direct product in 50-digit arithmetic.
        let l = weighted_log_likelihood(data(20, 10), 0.3, MU).unwrap();
        close(l.ln(), -4.260_010_042_176_563, 1e-13);
        assert!(weighted_log_likelihood(data(3, 1), 0.0, MU).is_err());
    }

    #[test]
    fn endpoint_likelihood_is_one() {
        let l = weighted_log_likelihood(data(7, 0), 0.0, NML).unwrap();
        assert_eq!(l.ln(), 0.0);
        let l = weighted_log_likelihood(data(7, 7), 1.0, NML).unwrap();
        assert_eq!(l.ln(), 0.0);
        let l = weighted_log_likelihood(data(7, 3), 0.0, NML).unwrap();
        assert_eq!(l, LogValue::ZERO);
    }

    #[test]
    fn estimators() {
        assert_eq!(luckiness_estimator_full(data(20, 10)), 0.5);
        assert_eq!(luckiness_estimator_full(data(1, 0)), 0.25);
        assert_eq!(luckiness_estimator_full(data(1000, 1000)), 1000.5 / 1001.0);
        assert_eq!(luckiness_estimator_constrained(data(20, 19), z(0.5)), 0.5);
        assert_eq!(luckiness_estimator_constrained(data(20, 3), z(0.5)), 3.5 / 21.0);
        assert_eq!(luckiness_estimator_constrained(data(1, 0), z(0.25)), 0.25);
        assert_eq!(ml_estimator(data(25, 19), None), 0.76);
        assert_eq!(ml_estimator(data(10, 0), None), 0.0);
        assert_eq!(ml_estimator(data(10, 9), Some(z(0.5))), 0.5);
    }

    #[test]
    fn normalizer_small_cases() {
        let want = (2.0 * 0.25f64.sqrt() * 0.75f64.powf(1.5)).ln();
        close(lnml_normalizer(1, None, MU).unwrap().ln(), want, 1e-15);
        close(lnml_normalizer(1, None, NML).unwrap().ln(), LN_2, 1e-15);
        // 21-term enumeration in 50-digit arithmetic.
        let v = lnml_normalizer(20, Some(z(0.5)), MU).unwrap().ln();
        close(v, 0.169_962_658_566_803_38, 1e-13);
        assert_eq!(lnml_normalizer(0, None, MU), Err(Error::ZeroTrials));
    }

    #[test]
    fn evidence_examples() {
        let r = lnml_evidence(data(1, 0), None, NML).unwrap();
        close(r.log_lnml.ln(), 0.5f64.ln(), 1e-15);
        let r = lnml_evidence(data(1, 1), None, NML).unwrap();
        close(r.log_lnml.ln(), 0.5f64.ln(), 1e-15);

        let r = lnml_evidence(data(25, 19), Some(z(0.8)), MU).unwrap();
        assert_eq!(r.estimator, 0.75);
        close(r.log_lnml.ln(), -3.144_762_379_155_914, 1e-13);
        assert_eq!(r.log_lnml, r.log_numerator - r.log_normalizer);
    }

    #[test]
    fn weights_examples() {
        let a = lnml_weights(data(20, 3), z(0.5), MU).unwrap();
        let b = lnml_weights(data(20, 7), z(0.5), MU).unwrap();
        assert_eq!(a, b);
        close(a.w0, 0.612_125_250_092_905_7, 1e-13);

        let w = lnml_weights(data(20, 20), z(0.5), MU).unwrap();
        assert!(w.w0 < 0.5);
        close(w.w0, 7.992_477_851_633_63e-6, 1e-10);

        // Normalizers 1.75 (constrained) and 2.5 (full); shared numerator.
        let w = lnml_weights(data(2, 1), z(0.5), NML).unwrap();
        close(w.w0, 10.0 / 17.0, 1e-14);
        assert!((w.w0 + w.w1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn luckiness_constant_cancels() {
        // Adding −c to every log term shifts numerator and normalizer alike.
        let d = data(12, 9);
        let b = Some(z(0.6));
        let base = nml_evidence(d, b).unwrap();
        for c in [-3.0, 0.7, 42.0] {
            let terms: Vec<_> = BinomialData::sample_space(12)
                .unwrap()
                .map(|x| {
                    let t = estimator(x, b, NML);
                    LogValue::new(weighted_log_likelihood(x, t, NML).unwrap().ln() - c).unwrap()
                })
                .collect();
            let norm = log_sum_exp(&terms).unwrap();
            let num = base.log_numerator.ln() - c;
            close(num - norm.ln(), base.log_lnml.ln(), 1e-13);
        }
    }

    #[test]
    fn cache_matches_uncached() {
        let cache = NormalizerCache::new();
        for y in 0..=30 {
            let d = data(30, y);
            assert_eq!(
                cache.weights(d, z(0.4), MU).unwrap(),
                lnml_weights(d, z(0.4), MU).unwrap()
            );
        }
        assert_eq!(cache.len(), 2);
    }
}
