//! The Monte Carlo EM loop.
//!
//! Each iteration draws latent mating-type samples from the current posterior
//! (E-step), then maximizes the two halves of the sampled expected
//! complete-data log likelihood separately: the data term over the penetrance
//! parameters with a constrained simplex search, the latent term over the
//! Dirichlet concentrations in closed Newton form (M-step). The loop stops
//! when the summed absolute parameter change over free coordinates drops
//! below the tolerance.

pub mod nelder_mead;

mod dirichlet_mle;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genetics::{DiseaseModel, GeneticsError, ThetaParam, validate_penetrance_bounds};
use crate::likelihood::{FamilyCounts, LikelihoodError, LikelihoodEvaluator};
use crate::sampler::{
    run_chain, ChainConfig, DirichletParams, SamplerError, SimplexSample,
};

use dirichlet_mle::SampleStats;
pub use nelder_mead::NmOptions;

#[derive(Debug, Error)]
pub enum McemError {
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Genetics(#[from] GeneticsError),
    #[error("E-step produced no samples")]
    EmptySamples,
    #[error("degenerate samples for the Dirichlet fit: {0}")]
    DegenerateSamples(String),
    #[error("Dirichlet fit stalled with gradient norm {grad_norm}")]
    AlphaFitFailed { grad_norm: f64 },
    #[error("objective not finite {context}")]
    NonFiniteObjective { context: String },
    #[error("theta optimizer failed ({message}); best point so far {best:?}")]
    OptimizerFailure { message: String, best: [f64; 6] },
    #[error("invalid parameter mask: {0}")]
    InvalidMask(String),
    #[error("at EM iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<McemError>,
    },
}

impl McemError {
    fn at(iteration: usize) -> impl FnOnce(McemError) -> McemError {
        move |source| McemError::AtIteration { iteration, source: Box::new(source) }
    }
}

/// Fixes a subset of penetrance-model coordinates at given values; the
/// optimizer and the convergence metric only see the free coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamMask {
    fixed: [Option<f64>; 6],
}

impl ParamMask {
    /// All six coordinates free.
    pub fn free() -> Self {
        Self::default()
    }

    pub fn with_fixed(mut self, param: ThetaParam, value: f64) -> Result<Self, McemError> {
        let valid = match param {
            ThetaParam::Delta => value > 0.0 && value < 1.0,
            _ => value > 0.0 && value.is_finite(),
        };
        if !valid {
            return Err(McemError::InvalidMask(format!(
                "cannot fix {} at {value}",
                param.name()
            )));
        }
        self.fixed[param.index()] = Some(value);
        Ok(self)
    }

    /// Null of the association test: all five relative risks at 1.
    pub fn association_null() -> Self {
        let mut fixed = [None; 6];
        for p in ThetaParam::RISKS {
            fixed[p.index()] = Some(1.0);
        }
        Self { fixed }
    }

    /// Null of the imprinting test: R_im at 1.
    pub fn imprinting_null() -> Self {
        Self { fixed: [None, None, None, Some(1.0), None, None] }
    }

    /// Null of the maternal-effect test: S1 and S2 at 1.
    pub fn maternal_null() -> Self {
        Self { fixed: [None, None, None, None, Some(1.0), Some(1.0)] }
    }

    pub fn fixed_value(&self, param: ThetaParam) -> Option<f64> {
        self.fixed[param.index()]
    }

    pub fn is_free(&self, param: ThetaParam) -> bool {
        self.fixed[param.index()].is_none()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..6).filter(|&i| self.fixed[i].is_none()).collect()
    }

    /// Replaces fixed coordinates of `theta` by their mask values.
    pub fn apply(&self, theta: &DiseaseModel) -> Result<DiseaseModel, McemError> {
        let mut values = theta.to_array();
        for (i, fixed) in self.fixed.iter().enumerate() {
            if let Some(v) = fixed {
                values[i] = *v;
            }
        }
        DiseaseModel::from_array(values).map_err(McemError::from)
    }
}

/// Precomputed batch view of the Monte Carlo data term: everything that does
/// not depend on theta is folded once, so M-step evaluations only touch the
/// two conditional denominators per sample.
pub struct QDataContext<'a> {
    counts: &'a FamilyCounts,
    samples: &'a [SimplexSample],
    count_log_mean: f64,
}

impl<'a> QDataContext<'a> {
    pub fn new(
        counts: &'a FamilyCounts,
        samples: &'a [SimplexSample],
    ) -> Result<Self, McemError> {
        if samples.is_empty() {
            return Err(McemError::EmptySamples);
        }
        let pair_counts = counts.trios_by_pair();
        let mut acc = 0.0;
        for z in samples {
            for (pair, &c) in pair_counts.iter().enumerate() {
                if c > 0 {
                    acc += c as f64 * z.values()[pair].ln();
                }
            }
        }
        Ok(Self { counts, samples, count_log_mean: acc / samples.len() as f64 })
    }

    /// Monte Carlo expectation of the observed-data log likelihood at theta.
    pub fn q(&self, theta: &DiseaseModel) -> Result<f64, McemError> {
        let evaluator = LikelihoodEvaluator::new(self.counts, theta)?;
        let (case_w, control_w) = evaluator.weights();
        let (n1, n0) = evaluator.totals();
        let mut acc = 0.0;
        for z in self.samples {
            let v = z.values();
            let mut d1 = 0.0;
            let mut d0 = 0.0;
            for k in 0..9 {
                d1 += case_w[k] * v[k];
                d0 += control_w[k] * v[k];
            }
            if n1 > 0.0 {
                acc += n1 * d1.ln();
            }
            if n0 > 0.0 {
                acc += n0 * d0.ln();
            }
        }
        let value =
            evaluator.constant_term() + self.count_log_mean - acc / self.samples.len() as f64;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(McemError::NonFiniteObjective {
                context: format!("for theta {:?}", theta.to_array()),
            })
        }
    }
}

/// Monte Carlo estimate of E[log f(Y | Z; theta) | Y]: the average of the
/// observed-data log likelihood over the kept samples.
pub fn q_data_term(
    counts: &FamilyCounts,
    theta: &DiseaseModel,
    samples: &[SimplexSample],
) -> Result<f64, McemError> {
    QDataContext::new(counts, samples)?.q(theta)
}

/// Monte Carlo estimate of E[log g(Z; alpha) | Y]: the Dirichlet log density
/// with log-z replaced by its sample means.
///
/// Requires a nonempty sample list.
pub fn q_latent_term(alpha: &DirichletParams, samples: &[SimplexSample]) -> f64 {
    assert!(!samples.is_empty(), "q_latent_term needs at least one sample");
    let stats = SampleStats::from_samples(samples);
    dirichlet_mle::latent_objective(alpha.values(), &stats.mean_log)
}

/// Dirichlet maximum likelihood over the kept samples.
pub fn maximize_alpha(samples: &[SimplexSample]) -> Result<DirichletParams, McemError> {
    if samples.is_empty() {
        return Err(McemError::EmptySamples);
    }
    dirichlet_mle::mle_from_stats(&SampleStats::from_samples(samples))
}

// Free coordinates are optimized on unconstrained scales: logit for the
// phenocopy rate, log for the risks.
fn encode(theta: &DiseaseModel, free: &[usize]) -> Vec<f64> {
    let values = theta.to_array();
    free.iter()
        .map(|&i| if i == 0 { (values[0] / (1.0 - values[0])).ln() } else { values[i].ln() })
        .collect()
}

fn decode(x: &[f64], free: &[usize], mask: &ParamMask, template: &DiseaseModel) -> Option<DiseaseModel> {
    let mut values = template.to_array();
    for (i, fixed) in ThetaParam::ALL.iter().enumerate() {
        if let Some(v) = mask.fixed_value(*fixed) {
            values[i] = v;
        }
    }
    for (&i, &xi) in free.iter().zip(x) {
        values[i] = if i == 0 { 1.0 / (1.0 + (-xi).exp()) } else { xi.exp() };
    }
    DiseaseModel::from_array(values).ok()
}

fn maximize_theta_with(
    ctx: &QDataContext<'_>,
    theta_init: &DiseaseModel,
    mask: &ParamMask,
    nm: &NmOptions,
) -> Result<(DiseaseModel, f64), McemError> {
    let start = mask.apply(theta_init)?;
    let q_start = ctx.q(&start).map_err(|e| McemError::OptimizerFailure {
        message: format!("objective not finite at the starting point: {e}"),
        best: start.to_array(),
    })?;
    let free = mask.free_indices();
    if free.is_empty() {
        return Ok((start, q_start));
    }
    let x0 = encode(&start, &free);
    let objective = |x: &[f64]| -> f64 {
        match decode(x, &free, mask, &start) {
            Some(theta) if validate_penetrance_bounds(&theta) => {
                ctx.q(&theta).unwrap_or(f64::NEG_INFINITY)
            }
            _ => f64::NEG_INFINITY,
        }
    };
    let outcome = nelder_mead::maximize(objective, &x0, nm);
    let best = decode(&outcome.x, &free, mask, &start).ok_or_else(|| {
        McemError::OptimizerFailure {
            message: "search returned an undecodable point".into(),
            best: start.to_array(),
        }
    })?;
    // The evaluated set includes the start, so the best value cannot be
    // below it; re-evaluate through the same path to return exact values.
    let q_best = ctx.q(&best)?;
    if q_best >= q_start {
        Ok((best, q_best))
    } else {
        Ok((start, q_start))
    }
}

/// Maximizes the Monte Carlo data term over the free coordinates of theta,
/// holding the kept samples fixed. Positivity is enforced by the coordinate
/// transforms and penetrance bounds by rejection inside the search.
pub fn maximize_theta(
    counts: &FamilyCounts,
    samples: &[SimplexSample],
    theta_init: &DiseaseModel,
    mask: &ParamMask,
) -> Result<DiseaseModel, McemError> {
    let ctx = QDataContext::new(counts, samples)?;
    maximize_theta_with(&ctx, theta_init, mask, &NmOptions::default()).map(|(t, _)| t)
}

/// Which coordinates enter the stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergenceRule {
    /// Sum of absolute changes over free theta coordinates and all alpha
    /// coordinates.
    Joint,
    /// Free theta coordinates only; alpha keeps updating but does not gate
    /// the stop. Useful because alpha scales with the data and its Monte
    /// Carlo jitter can exceed a fixed tolerance indefinitely.
    ThetaOnly,
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub mask: ParamMask,
    pub max_iterations: usize,
    pub tol: f64,
    pub rule: ConvergenceRule,
    /// Defaults to (0.0067, 1, 1, 1, 1, 1).
    pub theta_init: Option<DiseaseModel>,
    /// Defaults to one plus the per-pair control-trio counts.
    pub alpha_init: Option<DirichletParams>,
    pub nm: NmOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            mask: ParamMask::free(),
            max_iterations: 200,
            tol: 0.01,
            rule: ConvergenceRule::Joint,
            theta_init: None,
            alpha_init: None,
            nm: NmOptions::default(),
        }
    }
}

/// Default starting point of the EM iteration.
pub fn default_theta_init() -> DiseaseModel {
    DiseaseModel::new(0.0067, 1.0, 1.0, 1.0, 1.0, 1.0).expect("static initializer is valid")
}

/// Penetrance parameters and Dirichlet concentrations at one EM state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiState {
    pub theta: DiseaseModel,
    pub alpha: DirichletParams,
    pub iteration: usize,
}

/// Per-iteration audit record. The before/after pairs evaluate both M-step
/// objectives on the iteration's own sample set, so `after >= before` is the
/// generalized-ascent invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub acceptance_rate: f64,
    pub lag1_autocorr: f64,
    pub q_data_before: f64,
    pub q_data_after: f64,
    pub q_latent_before: f64,
    pub q_latent_after: f64,
    pub delta_psi: f64,
    pub theta: [f64; 6],
}

/// A converged (or iteration-capped) MCEM fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McemFit {
    pub psi: PsiState,
    /// Monte Carlo expected observed-data log likelihood at the final state;
    /// the quantity the likelihood-ratio tests compare.
    pub q_data_term: f64,
    pub q_latent_term: f64,
    pub converged: bool,
    pub iterations_used: usize,
    pub acceptance_rates: Vec<f64>,
    pub iteration_log: Vec<IterationRecord>,
    pub mask: ParamMask,
    pub data_fingerprint: u64,
}

/// Runs the MCEM loop on one dataset. All chain randomness is drawn from
/// `rng`, so a fixed seed reproduces the fit bit for bit.
pub fn fit<R: Rng + ?Sized>(
    counts: &FamilyCounts,
    cfg: &ChainConfig,
    opts: &FitOptions,
    rng: &mut R,
) -> Result<McemFit, McemError> {
    let mask = &opts.mask;
    let mut theta = mask.apply(&opts.theta_init.unwrap_or_else(default_theta_init))?;
    let mut alpha = opts
        .alpha_init
        .clone()
        .unwrap_or_else(|| DirichletParams::from_control_counts(counts));

    let mut acceptance_rates = Vec::new();
    let mut iteration_log = Vec::new();
    let mut converged = false;
    let mut q_data_final = f64::NAN;
    let mut q_latent_final = f64::NAN;
    let mut iterations_used = 0;

    for iteration in 1..=opts.max_iterations {
        let wrap = McemError::at(iteration);
        let chain = run_chain(counts, &theta, &alpha, cfg, rng).map_err(|e| {
            McemError::AtIteration { iteration, source: Box::new(e.into()) }
        })?;
        let samples = chain.samples;
        let ctx = QDataContext::new(counts, &samples).map_err(McemError::at(iteration))?;
        let stats = SampleStats::from_samples(&samples);

        let q_data_before = ctx.q(&theta).map_err(McemError::at(iteration))?;
        let q_latent_before = dirichlet_mle::latent_objective(alpha.values(), &stats.mean_log);

        let (theta_new, q_data_after) =
            maximize_theta_with(&ctx, &theta, mask, &opts.nm).map_err(wrap)?;

        let alpha_candidate =
            dirichlet_mle::mle_from_stats(&stats).map_err(McemError::at(iteration))?;
        let q_latent_candidate =
            dirichlet_mle::latent_objective(alpha_candidate.values(), &stats.mean_log);
        // The closed-form fit maximizes the latent term globally; keeping the
        // incumbent on a (numerically impossible) decrease preserves ascent.
        let (alpha_new, q_latent_after) = if q_latent_candidate >= q_latent_before {
            (alpha_candidate, q_latent_candidate)
        } else {
            (alpha.clone(), q_latent_before)
        };

        let mut delta = 0.0;
        let old_values = theta.to_array();
        let new_values = theta_new.to_array();
        for &i in &mask.free_indices() {
            delta += (new_values[i] - old_values[i]).abs();
        }
        if opts.rule == ConvergenceRule::Joint {
            for (a, b) in alpha.values().iter().zip(alpha_new.values()) {
                delta += (b - a).abs();
            }
        }

        iteration_log.push(IterationRecord {
            iteration,
            acceptance_rate: chain.diagnostics.acceptance_rate,
            lag1_autocorr: chain.diagnostics.lag1_autocorr,
            q_data_before,
            q_data_after,
            q_latent_before,
            q_latent_after,
            delta_psi: delta,
            theta: new_values,
        });
        acceptance_rates.push(chain.diagnostics.acceptance_rate);

        theta = theta_new;
        alpha = alpha_new;
        q_data_final = q_data_after;
        q_latent_final = q_latent_after;
        iterations_used = iteration;

        if delta < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(McemFit {
        psi: PsiState { theta, alpha, iteration: iterations_used },
        q_data_term: q_data_final,
        q_latent_term: q_latent_final,
        converged,
        iterations_used,
        acceptance_rates,
        iteration_log,
        mask: mask.clone(),
        data_fingerprint: counts.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihood::full_log_likelihood;
    use crate::sampler::dirichlet_sample;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_counts() -> FamilyCounts {
        let mut n1 = [0u32; 15];
        let mut n0 = [0u32; 15];
        n1[0] = 8;
        n1[2] = 5;
        n1[7] = 4;
        n1[12] = 2;
        n0[0] = 9;
        n0[1] = 6;
        n0[6] = 4;
        n0[14] = 1;
        FamilyCounts::new(n1, n0, [0; 15], [0; 15]).unwrap()
    }

    fn sibling_counts() -> FamilyCounts {
        let mut n1 = [0u32; 15];
        let mut n0 = [0u32; 15];
        let mut sn1 = [0u32; 15];
        let mut sn0 = [0u32; 15];
        n1[0] = 10;
        n0[0] = 10;
        sn1[0] = 7;
        sn1[2] = 4;
        sn0[0] = 23;
        sn0[6] = 6;
        FamilyCounts::new(n1, n0, sn1, sn0).unwrap()
    }

    fn samples_for(counts: &FamilyCounts, n: usize, seed: u64) -> Vec<SimplexSample> {
        let alpha = DirichletParams::from_control_counts(counts);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| dirichlet_sample(&alpha, &mut rng)).collect()
    }

    #[test]
    fn q_data_single_sample_equals_full_log_likelihood() {
        let counts = toy_counts();
        let theta = DiseaseModel::new(0.05, 2.0, 3.0, 1.0, 1.0, 1.0).unwrap();
        let samples = samples_for(&counts, 1, 1);
        let q = q_data_term(&counts, &theta, &samples).unwrap();
        let ll = full_log_likelihood(&counts, &theta, &samples[0].to_distribution())
            .unwrap()
            .value;
        assert!((q - ll).abs() < 1e-10 * ll.abs());
    }

    #[test]
    fn q_data_is_the_mean_of_per_sample_log_likelihoods() {
        let counts = sibling_counts();
        let theta = DiseaseModel::new(0.08, 1.4, 2.0, 0.8, 1.2, 1.5).unwrap();
        let samples = samples_for(&counts, 3, 2);
        let q = q_data_term(&counts, &theta, &samples).unwrap();
        let mean: f64 = samples
            .iter()
            .map(|z| {
                full_log_likelihood(&counts, &theta, &z.to_distribution())
                    .unwrap()
                    .value
            })
            .sum::<f64>()
            / 3.0;
        assert!((q - mean).abs() < 1e-10 * mean.abs(), "{q} vs {mean}");

        let repeated = vec![samples[0].clone(); 4];
        let q_rep = q_data_term(&counts, &theta, &repeated).unwrap();
        let single = full_log_likelihood(&counts, &theta, &samples[0].to_distribution())
            .unwrap()
            .value;
        assert!((q_rep - single).abs() < 1e-10 * single.abs());
    }

    #[test]
    fn q_latent_examples() {
        let counts = toy_counts();
        let samples = samples_for(&counts, 50, 3);
        // With unit concentrations the log-z coefficients vanish.
        let uniform = DirichletParams::symmetric(1.0).unwrap();
        assert!((q_latent_term(&uniform, &samples) - 10.60460290274525).abs() < 1e-10);

        let alpha = DirichletParams::new([2.0, 1.0, 3.0, 1.0, 4.0, 1.0, 2.0, 1.0, 1.5]).unwrap();
        let one = &samples[..1];
        let got = q_latent_term(&alpha, one);
        let want = crate::sampler::dirichlet_log_pdf(&alpha, &one[0]);
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn q_latent_is_concave_along_lines() {
        let counts = toy_counts();
        let samples = samples_for(&counts, 200, 4);
        let a = [2.0, 1.0, 3.0, 1.0, 4.0, 1.0, 2.0, 1.0, 1.5];
        let d = [1.0, 0.5, -0.5, 0.25, -1.0, 0.5, 1.0, -0.25, 0.5];
        let at = |t: f64| {
            let mut alpha = [0.0; 9];
            for k in 0..9 {
                alpha[k] = a[k] + t * d[k];
            }
            q_latent_term(&DirichletParams::new(alpha).unwrap(), &samples)
        };
        // Midpoint above the chord at three interleaved triples.
        for (lo, hi) in [(-0.5, 0.5), (0.0, 1.0), (-0.25, 0.75)] {
            let mid = (lo + hi) / 2.0;
            assert!(at(mid) >= (at(lo) + at(hi)) / 2.0 - 1e-12);
        }
    }

    #[test]
    fn null_mask_with_siblings_recovers_binomial_delta() {
        let counts = sibling_counts();
        let samples = samples_for(&counts, 400, 5);
        let mask = ParamMask::association_null();
        let start = DiseaseModel::null(0.0067).unwrap();
        let fitted = maximize_theta(&counts, &samples, &start, &mask).unwrap();
        let sn1: u32 = counts.sn1().iter().sum();
        let sn0: u32 = counts.sn0().iter().sum();
        let oracle = f64::from(sn1) / f64::from(sn1 + sn0);
        assert!(
            (fitted.delta() - oracle).abs() < 1e-4,
            "delta {} vs binomial {oracle}",
            fitted.delta()
        );
        for p in ThetaParam::RISKS {
            assert_eq!(fitted.get(p), 1.0);
        }
    }

    #[test]
    fn null_mask_without_siblings_leaves_delta_unchanged() {
        // Without sibling terms the association-null objective is flat in
        // delta, so the start is already optimal.
        let counts = toy_counts();
        let samples = samples_for(&counts, 100, 6);
        let mask = ParamMask::association_null();
        let start = DiseaseModel::null(0.0067).unwrap();
        let fitted = maximize_theta(&counts, &samples, &start, &mask).unwrap();
        assert!((fitted.delta() - 0.0067).abs() < 1e-9);
    }

    #[test]
    fn starting_at_the_optimum_is_a_fixed_point() {
        let counts = sibling_counts();
        let samples = samples_for(&counts, 300, 7);
        let mask = ParamMask::association_null();
        let ctx = QDataContext::new(&counts, &samples).unwrap();
        let start = DiseaseModel::null(0.0067).unwrap();
        let first = maximize_theta(&counts, &samples, &start, &mask).unwrap();
        let q_first = ctx.q(&first).unwrap();
        let again = maximize_theta(&counts, &samples, &first, &mask).unwrap();
        let q_again = ctx.q(&again).unwrap();
        assert!(q_again >= q_first);
        assert!((q_again - q_first).abs() < 1e-6);
    }

    #[test]
    fn one_free_risk_matches_golden_section_oracle() {
        let counts = toy_counts();
        let samples = samples_for(&counts, 300, 8);
        let ctx = QDataContext::new(&counts, &samples).unwrap();
        // Free R2 only.
        let mask = ParamMask::free()
            .with_fixed(ThetaParam::Delta, 0.05)
            .unwrap()
            .with_fixed(ThetaParam::R1, 1.0)
            .unwrap()
            .with_fixed(ThetaParam::Rim, 1.0)
            .unwrap()
            .with_fixed(ThetaParam::S1, 1.0)
            .unwrap()
            .with_fixed(ThetaParam::S2, 1.0)
            .unwrap();
        let q_of_r2 = |r2: f64| {
            let theta = DiseaseModel::new(0.05, 1.0, r2, 1.0, 1.0, 1.0).unwrap();
            ctx.q(&theta).unwrap()
        };
        let (mut a, mut b) = (0.05f64, 20.0f64);
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-9 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if q_of_r2(c) > q_of_r2(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let golden = (a + b) / 2.0;
        let start = DiseaseModel::new(0.05, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let fitted = maximize_theta(&counts, &samples, &start, &mask).unwrap();
        assert!(
            (fitted.r2() - golden).abs() < 1e-4 * golden.max(1.0),
            "r2 {} vs golden {golden}",
            fitted.r2()
        );
    }

    fn quick_cfg(seed: u64) -> ChainConfig {
        ChainConfig { burn_in: 200, thin: 5, keep: 400, seed }
    }

    #[test]
    fn infinite_tolerance_stops_after_one_iteration() {
        let counts = toy_counts();
        let cfg = quick_cfg(1);
        let opts = FitOptions { tol: f64::INFINITY, ..FitOptions::default() };
        let mut rng = cfg.rng();
        let fit = fit(&counts, &cfg, &opts, &mut rng).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.iterations_used, 1);
        assert_eq!(fit.acceptance_rates.len(), 1);
    }

    #[test]
    fn fits_are_bit_identical_for_a_fixed_seed() {
        let counts = toy_counts();
        let cfg = quick_cfg(33);
        let opts = FitOptions {
            max_iterations: 4,
            rule: ConvergenceRule::ThetaOnly,
            ..FitOptions::default()
        };
        let run = || {
            let mut rng = cfg.rng();
            fit(&counts, &cfg, &opts, &mut rng).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
    }

    #[test]
    fn ascent_holds_and_masked_coordinates_never_move() {
        let counts = sibling_counts();
        let cfg = quick_cfg(9);
        let opts = FitOptions {
            mask: ParamMask::imprinting_null(),
            max_iterations: 6,
            rule: ConvergenceRule::ThetaOnly,
            ..FitOptions::default()
        };
        let mut rng = cfg.rng();
        let fit = fit(&counts, &cfg, &opts, &mut rng).unwrap();
        for rec in &fit.iteration_log {
            assert!(
                rec.q_data_after >= rec.q_data_before,
                "data ascent violated at iteration {}",
                rec.iteration
            );
            assert!(
                rec.q_latent_after >= rec.q_latent_before,
                "latent ascent violated at iteration {}",
                rec.iteration
            );
            assert_eq!(rec.theta[ThetaParam::Rim.index()], 1.0);
            let theta = DiseaseModel::from_array(rec.theta).unwrap();
            assert!(validate_penetrance_bounds(&theta));
        }
        assert_eq!(fit.psi.theta.rim(), 1.0);
    }

    #[test]
    fn more_samples_do_not_move_the_estimates_much() {
        let counts = toy_counts();
        let opts = FitOptions {
            max_iterations: 8,
            rule: ConvergenceRule::ThetaOnly,
            ..FitOptions::default()
        };
        let run = |keep: usize, seed: u64| {
            let cfg = ChainConfig { burn_in: 300, thin: 5, keep, seed };
            let mut rng = cfg.rng();
            fit(&counts, &cfg, &opts, &mut rng).unwrap()
        };
        let small = run(500, 41);
        let large = run(1500, 42);
        for p in ThetaParam::RISKS {
            let a = small.psi.theta.get(p);
            let b = large.psi.theta.get(p);
            assert!(
                (a.ln() - b.ln()).abs() < 0.6,
                "{}: {a} vs {b}",
                p.name()
            );
        }
    }
}
