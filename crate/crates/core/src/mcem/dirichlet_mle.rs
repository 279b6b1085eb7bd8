//! Maximum likelihood fit of Dirichlet concentrations to simplex samples.
//!
//! The sufficient statistics are the per-coordinate means of log z. Starting
//! from a moment-matching point, Newton steps use the diagonal-plus-rank-one
//! structure of the Hessian; a damped fixed-point update through the inverse
//! digamma serves as fallback when a Newton step leaves the positive cone
//! without improving the objective.

use crate::genetics::N_MATING_TYPES;
use crate::sampler::{DirichletParams, SimplexSample};
use crate::special::{digamma, inv_digamma, ln_gamma, trigamma};

use super::McemError;

const GRAD_TOL: f64 = 1e-10;
const GRAD_REQUIRED: f64 = 1e-8;
const MAX_STEPS: usize = 500;

pub(crate) struct SampleStats {
    pub mean: [f64; N_MATING_TYPES],
    pub mean_sq: [f64; N_MATING_TYPES],
    pub mean_log: [f64; N_MATING_TYPES],
    pub n: usize,
    pub all_identical: bool,
}

impl SampleStats {
    pub fn from_samples(samples: &[SimplexSample]) -> Self {
        let n = samples.len();
        let mut mean = [0.0; N_MATING_TYPES];
        let mut mean_sq = [0.0; N_MATING_TYPES];
        let mut mean_log = [0.0; N_MATING_TYPES];
        for s in samples {
            for (k, &v) in s.values().iter().enumerate() {
                mean[k] += v;
                mean_sq[k] += v * v;
                mean_log[k] += v.ln();
            }
        }
        for k in 0..N_MATING_TYPES {
            mean[k] /= n as f64;
            mean_sq[k] /= n as f64;
            mean_log[k] /= n as f64;
        }
        let all_identical = samples.windows(2).all(|w| w[0] == w[1]);
        Self { mean, mean_sq, mean_log, n, all_identical }
    }
}

/// Mean Dirichlet log density over samples summarized by their log means:
/// -log B(alpha) + sum (alpha_k - 1) mean-log-z_k.
pub(crate) fn latent_objective(alpha: &[f64; N_MATING_TYPES], mean_log: &[f64; N_MATING_TYPES]) -> f64 {
    let sum: f64 = alpha.iter().sum();
    let mut acc = ln_gamma(sum);
    for (a, p) in alpha.iter().zip(mean_log) {
        acc += (a - 1.0) * p - ln_gamma(*a);
    }
    acc
}

fn gradient(alpha: &[f64; N_MATING_TYPES], mean_log: &[f64; N_MATING_TYPES]) -> [f64; N_MATING_TYPES] {
    let psi_sum = digamma(alpha.iter().sum());
    let mut g = [0.0; N_MATING_TYPES];
    for k in 0..N_MATING_TYPES {
        g[k] = psi_sum - digamma(alpha[k]) + mean_log[k];
    }
    g
}

fn grad_norm(g: &[f64; N_MATING_TYPES]) -> f64 {
    g.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn moment_match(stats: &SampleStats) -> [f64; N_MATING_TYPES] {
    // Each coordinate k with E[z], E[z^2] implies a concentration estimate
    // s = (m - q) / (q - m^2); pool them by median.
    let mut estimates: Vec<f64> = (0..N_MATING_TYPES)
        .filter_map(|k| {
            let m = stats.mean[k];
            let q = stats.mean_sq[k];
            let var = q - m * m;
            if var > 0.0 {
                let s = (m - q) / var;
                (s.is_finite() && s > 0.0).then_some(s)
            } else {
                None
            }
        })
        .collect();
    let s = if estimates.is_empty() {
        9.0
    } else {
        estimates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        estimates[estimates.len() / 2]
    };
    let mut alpha = [0.0; N_MATING_TYPES];
    for k in 0..N_MATING_TYPES {
        alpha[k] = (s * stats.mean[k]).max(1e-6);
    }
    alpha
}

pub(crate) fn mle_from_stats(stats: &SampleStats) -> Result<DirichletParams, McemError> {
    if stats.n < 2 || stats.all_identical {
        return Err(McemError::DegenerateSamples(format!(
            "need at least 2 distinct samples, got {} ({})",
            stats.n,
            if stats.all_identical { "all identical" } else { "too few" }
        )));
    }
    if stats.mean_log.iter().any(|p| !p.is_finite()) {
        return Err(McemError::DegenerateSamples(
            "a coordinate's mean log is not finite".into(),
        ));
    }
    let p = &stats.mean_log;
    let mut alpha = moment_match(stats);
    let mut value = latent_objective(&alpha, p);

    for _ in 0..MAX_STEPS {
        let g = gradient(&alpha, p);
        if grad_norm(&g) < GRAD_TOL {
            break;
        }
        let sum: f64 = alpha.iter().sum();
        let c = trigamma(sum);
        let q: Vec<f64> = alpha.iter().map(|&a| trigamma(a)).collect();
        let sum_g_over_q: f64 = g.iter().zip(&q).map(|(gi, qi)| gi / qi).sum();
        let sum_inv_q: f64 = q.iter().map(|qi| 1.0 / qi).sum();
        let b = c * sum_g_over_q / (1.0 - c * sum_inv_q);

        // Newton direction for the structured Hessian, with step halving.
        let mut improved = false;
        let mut t = 1.0;
        for _ in 0..40 {
            let mut candidate = alpha;
            let mut positive = true;
            for k in 0..N_MATING_TYPES {
                candidate[k] = alpha[k] + t * (g[k] + b) / q[k];
                positive &= candidate[k] > 0.0;
            }
            if positive {
                let cand_value = latent_objective(&candidate, p);
                if cand_value >= value {
                    alpha = candidate;
                    value = cand_value;
                    improved = true;
                    break;
                }
            }
            t /= 2.0;
        }
        if !improved {
            // Fixed-point update; monotone for this likelihood.
            let psi_sum = digamma(alpha.iter().sum());
            let mut candidate = alpha;
            for k in 0..N_MATING_TYPES {
                candidate[k] = inv_digamma(psi_sum + p[k]).max(1e-12);
            }
            let cand_value = latent_objective(&candidate, p);
            if cand_value <= value {
                break;
            }
            alpha = candidate;
            value = cand_value;
        }
    }

    let final_norm = grad_norm(&gradient(&alpha, p));
    if final_norm > GRAD_REQUIRED {
        return Err(McemError::AlphaFitFailed { grad_norm: final_norm });
    }
    DirichletParams::new(alpha).map_err(McemError::from)
}
