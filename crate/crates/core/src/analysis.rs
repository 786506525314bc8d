//! Exhaustive studies over the sample space and over the sample size:
//! weight sweeps, convergence curves, divergence scans and the
//! posterior/prior mass decomposition of the Bayes factor.

use rayon::prelude::*;

use crate::bayes::{bayes_factor, posterior_weight};
use crate::data::{BinomialData, Boundary, PriorFamily};
use crate::error::{Error, Result};
use crate::lnml::{luckiness_estimator_full, LuckinessSpec, NormalizerCache};
use crate::special::{regularized_incomplete_beta, BetaParams};

/// All four model-weight variants for one data set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub y: u64,
    pub ml_estimate: f64,
    pub w0_bayes: f64,
    pub w0_lnml: f64,
    pub w0_nml: f64,
    pub w0_bayes_jeffreys: f64,
}

/// One row per `y` in `0..=n`, ascending.
pub fn sweep_weights(n: u64, boundary: Boundary) -> Result<Vec<SweepRow>> {
    let cache = NormalizerCache::new();
    BinomialData::sample_space(n)?
        .map(|d| {
            Ok(SweepRow {
                y: d.y(),
                ml_estimate: d.y() as f64 / n as f64,
                w0_bayes: bayes_factor(d, boundary, PriorFamily::Uniform)?.w0,
                w0_lnml: cache.weights(d, boundary, LuckinessSpec::MatchedUniform)?.w0,
                w0_nml: cache.weights(d, boundary, LuckinessSpec::Constant)?.w0,
                w0_bayes_jeffreys: bayes_factor(d, boundary, PriorFamily::Jeffreys)?.w0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Round half up.
    NearestInteger,
    Floor,
}

impl Rounding {
    fn apply(self, v: f64) -> f64 {
        match self {
            Rounding::NearestInteger => (v + 0.5).floor(),
            Rounding::Floor => v.floor(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub n: u64,
    pub y_used: u64,
    pub theta_target: f64,
    pub w0_bayes: f64,
    pub w0_lnml: f64,
    /// `ln (1/(1+z) − w0_bayes)`, from the posterior tail mass. Stays
    /// finite after `w0_bayes` has rounded onto its limit.
    pub log_bayes_gap: f64,
}

/// Weights along `n_grid` for data whose ML estimate tracks
/// `theta_fraction · z`.
pub fn convergence_curve(
    boundary: Boundary,
    theta_fraction: f64,
    n_grid: &[u64],
    rounding: Rounding,
) -> Result<Vec<ConvergencePoint>> {
    let z = boundary.z();
    let target = theta_fraction * z;
    if !(theta_fraction > 0.0 && target < 1.0) {
        return Err(Error::InvalidFraction {
            fraction: theta_fraction,
            z,
        });
    }
    if n_grid.is_empty() {
        return Err(Error::InvalidGrid("empty".into()));
    }
    if n_grid[0] == 0 {
        return Err(Error::ZeroTrials);
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("must be strictly increasing".into()));
    }

    let cache = NormalizerCache::new();
    n_grid
        .iter()
        .map(|&n| {
            let rounded = rounding.apply(target * n as f64);
            if rounded < 0.0 || rounded > n as f64 {
                return Err(Error::RoundedOutOfRange { n, y: rounded as i64 });
            }
            let d = BinomialData::new(n, rounded as u64)?;
            let bayes = bayes_factor(d, boundary, PriorFamily::Uniform)?;
            let lnml = cache.weights(d, boundary, LuckinessSpec::MatchedUniform)?;
            Ok(ConvergencePoint {
                n,
                y_used: d.y(),
                theta_target: target,
                w0_bayes: bayes.w0,
                w0_lnml: lnml.w0,
                log_bayes_gap: bayes.log_weight_gap(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Geometric,
    Linear,
}

/// `steps` sample sizes from `n_min` to `n_max`, rounded and deduplicated.
pub fn n_grid(n_min: u64, n_max: u64, steps: usize, spacing: Spacing) -> Result<Vec<u64>> {
    if n_min == 0 {
        return Err(Error::ZeroTrials);
    }
    if n_max < n_min {
        return Err(Error::InvalidGrid(format!("n_max {n_max} < n_min {n_min}")));
    }
    if steps == 0 {
        return Err(Error::InvalidGrid("need at least one step".into()));
    }
    if steps == 1 {
        return Ok(vec![n_min]);
    }
    let (lo, hi) = (n_min as f64, n_max as f64);
    let last = (steps - 1) as f64;
    let mut grid: Vec<u64> = (0..steps)
        .map(|i| {
            let t = i as f64 / last;
            let v = match spacing {
                Spacing::Geometric => lo * (hi / lo).powf(t),
                Spacing::Linear => lo + (hi - lo) * t,
            };
            (v.round() as u64).clamp(n_min, n_max)
        })
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Which evidence pair a divergence scan compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Uniform-prior Bayes factor against matched-luckiness LNML.
    #[default]
    UniformLnml,
    /// Jeffreys-prior Bayes factor against standard NML.
    JeffreysNml,
}

impl Pairing {
    fn parts(self) -> (PriorFamily, LuckinessSpec) {
        match self {
            Pairing::UniformLnml => (PriorFamily::Uniform, LuckinessSpec::MatchedUniform),
            Pairing::JeffreysNml => (PriorFamily::Jeffreys, LuckinessSpec::Constant),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Constrained,
    Full,
}

/// Strict preference relative to ½; exactly ½ is no preference.
pub fn preference(w0: f64) -> Option<Preference> {
    if w0 > 0.5 {
        Some(Preference::Constrained)
    } else if w0 < 0.5 {
        Some(Preference::Full)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCase {
    pub y: u64,
    pub w0_bayes: f64,
    pub w0_lnml: f64,
}

impl CriticalCase {
    /// LNML for the constraint, Bayes for the full model.
    pub fn lnml_prefers_constraint(&self) -> bool {
        preference(self.w0_lnml) == Some(Preference::Constrained)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub n: u64,
    pub z: f64,
    pub pairing: Pairing,
    /// Data sets where the two methods prefer different models, by `y`.
    pub critical: Vec<CriticalCase>,
}

impl DivergenceReport {
    pub fn critical_y(&self) -> Vec<u64> {
        self.critical.iter().map(|c| c.y).collect()
    }

    pub fn count(&self) -> usize {
        self.critical.len()
    }

    /// Size of the sample space, `n + 1`.
    pub fn total(&self) -> u64 {
        self.n + 1
    }

    pub fn proportion(&self) -> f64 {
        self.count() as f64 / self.total() as f64
    }

    pub fn max_w0_lnml_critical(&self) -> Option<f64> {
        self.critical.iter().map(|c| c.w0_lnml).reduce(f64::max)
    }

    pub fn min_w0_bayes_critical(&self) -> Option<f64> {
        self.critical.iter().map(|c| c.w0_bayes).reduce(f64::min)
    }

    /// Critical cases where Bayes favours the constraint and LNML does not.
    pub fn reversed(&self) -> impl Iterator<Item = &CriticalCase> {
        self.critical.iter().filter(|c| !c.lnml_prefers_constraint())
    }
}

/// Uniform-prior Bayes against matched LNML over every `y` in `0..=n`.
pub fn divergence_scan(n: u64, boundary: Boundary) -> Result<DivergenceReport> {
    divergence_scan_with(n, boundary, Pairing::UniformLnml)
}

pub fn divergence_scan_with(
    n: u64,
    boundary: Boundary,
    pairing: Pairing,
) -> Result<DivergenceReport> {
    scan_with_cache(n, boundary, pairing, &NormalizerCache::new())
}

fn scan_with_cache(
    n: u64,
    boundary: Boundary,
    pairing: Pairing,
    cache: &NormalizerCache,
) -> Result<DivergenceReport> {
    let (prior, luck) = pairing.parts();
    let mut critical = Vec::new();
    for d in BinomialData::sample_space(n)? {
        let w0_bayes = bayes_factor(d, boundary, prior)?.w0;
        let w0_lnml = cache.weights(d, boundary, luck)?.w0;
        match (preference(w0_bayes), preference(w0_lnml)) {
            (Some(a), Some(b)) if a != b => critical.push(CriticalCase {
                y: d.y(),
                w0_bayes,
                w0_lnml,
            }),
            _ => {}
        }
    }
    Ok(DivergenceReport {
        n,
        z: boundary.z(),
        pairing,
        critical,
    })
}

/// Envelope of the critical set at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionRow {
    pub n: u64,
    pub min_critical_y: Option<u64>,
    pub max_critical_y: Option<u64>,
    pub count: usize,
}

impl From<&DivergenceReport> for RegionRow {
    fn from(r: &DivergenceReport) -> Self {
        RegionRow {
            n: r.n,
            min_critical_y: r.critical.first().map(|c| c.y),
            max_critical_y: r.critical.last().map(|c| c.y),
            count: r.count(),
        }
    }
}

/// Divergence scans for every `n` in `n_min..=n_max`, in `n` order.
pub fn divergence_region(boundary: Boundary, n_min: u64, n_max: u64) -> Result<Vec<RegionRow>> {
    divergence_region_with(boundary, n_min, n_max, Pairing::UniformLnml)
}

pub fn divergence_region_with(
    boundary: Boundary,
    n_min: u64,
    n_max: u64,
    pairing: Pairing,
) -> Result<Vec<RegionRow>> {
    if n_min == 0 {
        return Err(Error::ZeroTrials);
    }
    if n_max < n_min {
        return Err(Error::InvalidGrid(format!("n_max {n_max} < n_min {n_min}")));
    }
    let cache = NormalizerCache::new();
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| scan_with_cache(n, boundary, pairing, &cache).map(|r| RegionRow::from(&r)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub n: u64,
    pub z: f64,
    /// All LNML weights in the satisfied region agree within 1e-14 relative.
    pub holds: bool,
    /// Satisfied region is `0..=region_max_y`; `None` when it is empty.
    pub region_max_y: Option<u64>,
    pub constant_w0: Option<f64>,
    pub max_relative_deviation: f64,
}

impl IndependenceReport {
    pub fn region_size(&self) -> u64 {
        self.region_max_y.map_or(0, |m| m + 1)
    }
}

pub const INDEPENDENCE_TOLERANCE: f64 = 1e-14;

/// Checks that the matched-luckiness LNML weight is constant over every `y`
/// with `(y + ½)/(n + 1) ≤ z`.
pub fn data_independence_check(n: u64, boundary: Boundary) -> Result<IndependenceReport> {
    let cache = NormalizerCache::new();
    let mut weights = Vec::new();
    for d in BinomialData::sample_space(n)? {
        if luckiness_estimator_full(d) > boundary.z() {
            break;
        }
        weights.push(cache.weights(d, boundary, LuckinessSpec::MatchedUniform)?.w0);
    }
    let constant_w0 = weights.first().copied();
    let max_relative_deviation = constant_w0.map_or(0.0, |w| {
        weights
            .iter()
            .map(|v| ((v - w) / w).abs())
            .fold(0.0, f64::max)
    });
    Ok(IndependenceReport {
        n,
        z: boundary.z(),
        holds: max_relative_deviation <= INDEPENDENCE_TOLERANCE,
        region_max_y: (!weights.is_empty()).then(|| weights.len() as u64 - 1),
        constant_w0,
        max_relative_deviation,
    })
}

/// Full-model prior and posterior mass on `[0, z]` under the uniform prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassDecomposition {
    pub prior_mass: f64,
    pub posterior_mass: f64,
    pub b01: f64,
}

impl MassDecomposition {
    pub fn w0(&self) -> f64 {
        posterior_weight(self.b01.ln())
    }
}

pub fn mass_decomposition(data: BinomialData, boundary: Boundary) -> Result<MassDecomposition> {
    let z = boundary.z();
    let posterior = BetaParams::new(data.y() as f64 + 1.0, data.failures() as f64 + 1.0)?;
    let posterior_mass = regularized_incomplete_beta(z, posterior)?;
    Ok(MassDecomposition {
        prior_mass: z,
        posterior_mass,
        b01: posterior_mass / z,
    })
}
