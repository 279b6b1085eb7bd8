//! Dirichlet density on the 9-simplex and the independence
//! Metropolis–Hastings chain over latent mating-type probabilities.
//!
//! The chain proposes from the Dirichlet prior itself, so prior and proposal
//! densities cancel in the acceptance ratio and only the observed-data
//! likelihood ratio remains.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genetics::{MatingTypeDistribution, N_MATING_TYPES};
use crate::likelihood::{FamilyCounts, LikelihoodError, LikelihoodEvaluator};
use crate::special::ln_gamma;
use crate::genetics::DiseaseModel;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("invalid dirichlet parameters: {0}")]
    InvalidAlpha(String),
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid simplex sample: {0}")]
    InvalidSample(String),
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
}

/// Positive concentration parameters of the latent Dirichlet distribution,
/// indexed by the 9 ordered parental pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams {
    alpha: [f64; N_MATING_TYPES],
}

impl DirichletParams {
    pub fn new(alpha: [f64; N_MATING_TYPES]) -> Result<Self, SamplerError> {
        if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(SamplerError::InvalidAlpha(format!(
                "all concentrations must be positive and finite, got {alpha:?}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn symmetric(a: f64) -> Result<Self, SamplerError> {
        Self::new([a; N_MATING_TYPES])
    }

    /// Initialization from control-trio counts: one plus the number of
    /// control trios whose parents fall in each pair.
    pub fn from_control_counts(counts: &FamilyCounts) -> Self {
        let mut alpha = [1.0; N_MATING_TYPES];
        for (i, &n) in counts.controls_by_pair().iter().enumerate() {
            alpha[i] += n as f64;
        }
        Self { alpha }
    }

    pub fn values(&self) -> &[f64; N_MATING_TYPES] {
        &self.alpha
    }

    pub fn sum(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Mean of the distribution; strictly interior.
    pub fn mean(&self) -> [f64; N_MATING_TYPES] {
        let s = self.sum();
        let mut m = self.alpha;
        m.iter_mut().for_each(|v| *v /= s);
        m
    }
}

/// Burn-in, thinning gap, and number of kept samples for one chain, plus the
/// master seed that all chain randomness derives from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub keep: usize,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { burn_in: 10_000, thin: 500, keep: 10_000, seed: 0 }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.thin == 0 || self.keep == 0 {
            return Err(SamplerError::InvalidConfig(
                "thin and keep must both be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Generator seeded from this configuration's seed.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn total_proposals(&self) -> usize {
        self.burn_in + self.keep * self.thin
    }
}

/// Strictly interior point on the 9-simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSample {
    z: [f64; N_MATING_TYPES],
}

impl SimplexSample {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(z: [f64; N_MATING_TYPES]) -> Result<Self, SamplerError> {
        if z.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(SamplerError::InvalidSample(
                "all coordinates must be strictly positive".into(),
            ));
        }
        let sum: f64 = z.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(SamplerError::InvalidSample(format!(
                "coordinates must sum to 1 within {}, got {sum}",
                Self::SUM_TOLERANCE
            )));
        }
        Ok(Self { z })
    }

    pub fn values(&self) -> &[f64; N_MATING_TYPES] {
        &self.z
    }

    pub fn to_distribution(&self) -> MatingTypeDistribution {
        MatingTypeDistribution::new(self.z).expect("interior simplex point is a distribution")
    }
}

/// Log density of the Dirichlet distribution at an interior point.
pub fn dirichlet_log_pdf(alpha: &DirichletParams, z: &SimplexSample) -> f64 {
    let mut ln_beta = -ln_gamma(alpha.sum());
    let mut acc = 0.0;
    for (a, v) in alpha.values().iter().zip(z.values()) {
        ln_beta += ln_gamma(*a);
        acc += (a - 1.0) * v.ln();
    }
    acc - ln_beta
}

fn build_gammas(alpha: &DirichletParams) -> Result<Vec<Gamma<f64>>, SamplerError> {
    alpha
        .values()
        .iter()
        .map(|&a| {
            Gamma::new(a, 1.0)
                .map_err(|e| SamplerError::InvalidAlpha(format!("gamma construction: {e}")))
        })
        .collect()
}

fn draw_simplex<R: Rng + ?Sized>(gammas: &[Gamma<f64>], rng: &mut R) -> [f64; N_MATING_TYPES] {
    loop {
        let mut g = [0.0; N_MATING_TYPES];
        let mut sum = 0.0;
        for (v, dist) in g.iter_mut().zip(gammas) {
            *v = dist.sample(rng);
            sum += *v;
        }
        if !(sum > 0.0 && sum.is_finite()) {
            continue;
        }
        let mut interior = true;
        for v in &mut g {
            *v /= sum;
            interior &= *v > 0.0;
        }
        if interior {
            return g;
        }
    }
}

/// One Dirichlet draw by normalizing independent gamma variates. Retries the
/// (measure-zero) event of a boundary draw, so the result is strictly
/// interior.
pub fn dirichlet_sample<R: Rng + ?Sized>(alpha: &DirichletParams, rng: &mut R) -> SimplexSample {
    let gammas = build_gammas(alpha).expect("valid concentrations");
    SimplexSample::new(draw_simplex(&gammas, rng)).expect("normalized draw is interior")
}

/// Metropolis–Hastings ratio between two latent points: the likelihood ratio
/// alone, since prior and proposal terms cancel.
pub fn mh_ratio(
    counts: &FamilyCounts,
    theta: &DiseaseModel,
    current: &SimplexSample,
    proposed: &SimplexSample,
) -> Result<f64, LikelihoodError> {
    let evaluator = LikelihoodEvaluator::new(counts, theta)?;
    let ll_current = evaluator.log_likelihood(current.values())?;
    let ll_proposed = evaluator.log_likelihood(proposed.values())?;
    Ok((ll_proposed - ll_current).exp())
}

/// Summary statistics of one chain run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub proposals: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
    /// Acceptance below 1% is flagged, not fatal.
    pub low_acceptance: bool,
    /// Largest absolute lag-1 autocorrelation across the 9 coordinates of
    /// the kept samples; 1.0 for a degenerate (never-moving) chain.
    pub lag1_autocorr: f64,
}

pub struct ChainOutput {
    pub samples: Vec<SimplexSample>,
    pub diagnostics: ChainDiagnostics,
}

/// Per-proposal decision record, for audit tests.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub log_ratio: f64,
    pub uniform: f64,
    pub accepted: bool,
}

fn chain_core<R, F, O>(
    target: F,
    alpha: &DirichletParams,
    cfg: &ChainConfig,
    rng: &mut R,
    mut observer: O,
) -> Result<ChainOutput, SamplerError>
where
    R: Rng + ?Sized,
    F: Fn(&[f64; N_MATING_TYPES]) -> f64,
    O: FnMut(&StepRecord),
{
    cfg.validate()?;
    let gammas = build_gammas(alpha)?;
    // Deterministic start at the proposal mean, which is always interior.
    let mut current = alpha.mean();
    let mut ll_current = target(&current);
    let total = cfg.total_proposals();
    let mut accepted = 0usize;
    let mut samples = Vec::with_capacity(cfg.keep);
    for step in 1..=total {
        let proposal = draw_simplex(&gammas, rng);
        let ll_proposal = target(&proposal);
        let log_ratio = ll_proposal - ll_current;
        let u: f64 = rng.random();
        // Accept when u < min{R, 1}; NaN ratios (both targets -inf) reject.
        let accept = !log_ratio.is_nan() && u.ln() < log_ratio.min(0.0);
        observer(&StepRecord { log_ratio, uniform: u, accepted: accept });
        if accept {
            current = proposal;
            ll_current = ll_proposal;
            accepted += 1;
        }
        if step > cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0 {
            samples.push(SimplexSample::new(current).expect("chain state is interior"));
        }
    }
    let acceptance_rate = accepted as f64 / total as f64;
    let diagnostics = ChainDiagnostics {
        proposals: total,
        accepted,
        acceptance_rate,
        low_acceptance: acceptance_rate < 0.01,
        lag1_autocorr: lag1_autocorrelation(&samples),
    };
    Ok(ChainOutput { samples, diagnostics })
}

fn lag1_autocorrelation(samples: &[SimplexSample]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    if samples.windows(2).all(|w| w[0] == w[1]) {
        return 1.0;
    }
    let n = samples.len();
    let mut worst: f64 = 0.0;
    for coord in 0..N_MATING_TYPES {
        let mean = samples.iter().map(|s| s.values()[coord]).sum::<f64>() / n as f64;
        let mut num = 0.0;
        let mut denom = 0.0;
        for i in 0..n {
            let d = samples[i].values()[coord] - mean;
            denom += d * d;
            if i + 1 < n {
                num += d * (samples[i + 1].values()[coord] - mean);
            }
        }
        let r = if denom > 0.0 { num / denom } else { 1.0 };
        if r.abs() > worst.abs() {
            worst = r;
        }
    }
    worst
}

/// Runs the chain against the posterior of the latent mating-type point
/// given the observed counts at fixed theta.
pub fn run_chain<R: Rng + ?Sized>(
    counts: &FamilyCounts,
    theta: &DiseaseModel,
    alpha: &DirichletParams,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<ChainOutput, SamplerError> {
    let evaluator = LikelihoodEvaluator::new(counts, theta)?;
    chain_core(
        |z| evaluator.log_likelihood(z).unwrap_or(f64::NEG_INFINITY),
        alpha,
        cfg,
        rng,
        |_| {},
    )
}

/// Runs the chain against an arbitrary log-target; the building block behind
/// `run_chain` and the flat-likelihood diagnostics.
pub fn run_chain_with_target<R, F>(
    target: F,
    alpha: &DirichletParams,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<ChainOutput, SamplerError>
where
    R: Rng + ?Sized,
    F: Fn(&[f64; N_MATING_TYPES]) -> f64,
{
    chain_core(target, alpha, cfg, rng, |_| {})
}

/// As `run_chain_with_target`, additionally recording every proposal
/// decision.
pub fn run_chain_with_target_traced<R, F>(
    target: F,
    alpha: &DirichletParams,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<(ChainOutput, Vec<StepRecord>), SamplerError>
where
    R: Rng + ?Sized,
    F: Fn(&[f64; N_MATING_TYPES]) -> f64,
{
    let mut trace = Vec::with_capacity(cfg.total_proposals());
    let out = chain_core(target, alpha, cfg, rng, |rec| trace.push(*rec))?;
    Ok((out, trace))
}
