//! Observed-data log likelihood of family counts.
//!
//! Case and control trios enter through conditional probabilities
//! P(M,F,C | D), siblings through raw penetrance terms. Everything is
//! evaluated in the log domain; a zero count contributes exactly zero no
//! matter how small the associated probability is.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genetics::{
    penetrance, DiseaseModel, GeneticsError, MatingTypeDistribution, TrioType, N_MATING_TYPES,
    N_TRIO_TYPES,
};
use crate::seed::fnv1a64;

#[derive(Debug, Error, PartialEq)]
pub enum LikelihoodError {
    #[error(transparent)]
    Genetics(#[from] GeneticsError),
    #[error("conditional probabilities are undefined at prevalence {prevalence}")]
    DegeneratePrevalence { prevalence: f64 },
    #[error("log of zero probability for {kind} count {count} at trio type {trio}")]
    LogOfZero { trio: u8, kind: CountKind, count: u32 },
}

/// Which of the four count vectors a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountKind {
    CaseTrio,
    ControlTrio,
    AffectedSibling,
    UnaffectedSibling,
}

impl std::fmt::Display for CountKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CountKind::CaseTrio => "case-trio",
            CountKind::ControlTrio => "control-trio",
            CountKind::AffectedSibling => "affected-sibling",
            CountKind::UnaffectedSibling => "unaffected-sibling",
        };
        f.write_str(s)
    }
}

/// Counts of case trios, control trios, and affected/unaffected siblings
/// over the 15 canonical trio types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    n1: [u32; N_TRIO_TYPES],
    n0: [u32; N_TRIO_TYPES],
    sn1: [u32; N_TRIO_TYPES],
    sn0: [u32; N_TRIO_TYPES],
}

impl FamilyCounts {
    pub fn new(
        n1: [u32; N_TRIO_TYPES],
        n0: [u32; N_TRIO_TYPES],
        sn1: [u32; N_TRIO_TYPES],
        sn0: [u32; N_TRIO_TYPES],
    ) -> Result<Self, LikelihoodError> {
        let counts = Self { n1, n0, sn1, sn0 };
        if counts.case_total() + counts.control_total() == 0 {
            return Err(LikelihoodError::Genetics(GeneticsError::InvalidDistribution(
                "family counts need at least one case or control trio".into(),
            )));
        }
        Ok(counts)
    }

    pub fn n1(&self) -> &[u32; N_TRIO_TYPES] {
        &self.n1
    }
    pub fn n0(&self) -> &[u32; N_TRIO_TYPES] {
        &self.n0
    }
    pub fn sn1(&self) -> &[u32; N_TRIO_TYPES] {
        &self.sn1
    }
    pub fn sn0(&self) -> &[u32; N_TRIO_TYPES] {
        &self.sn0
    }

    pub fn case_total(&self) -> u64 {
        self.n1.iter().map(|&v| u64::from(v)).sum()
    }
    pub fn control_total(&self) -> u64 {
        self.n0.iter().map(|&v| u64::from(v)).sum()
    }
    pub fn sibling_total(&self) -> u64 {
        self.sn1.iter().chain(self.sn0.iter()).map(|&v| u64::from(v)).sum()
    }

    pub fn has_siblings(&self) -> bool {
        self.sibling_total() > 0
    }

    /// Case-plus-control trio counts aggregated by parental pair.
    pub fn trios_by_pair(&self) -> [u64; N_MATING_TYPES] {
        let mut out = [0u64; N_MATING_TYPES];
        for t in TrioType::ALL {
            let i = t.table_pos();
            out[t.mating_pair()] += u64::from(self.n1[i]) + u64::from(self.n0[i]);
        }
        out
    }

    /// Control trio counts aggregated by parental pair.
    pub fn controls_by_pair(&self) -> [u64; N_MATING_TYPES] {
        let mut out = [0u64; N_MATING_TYPES];
        for t in TrioType::ALL {
            out[t.mating_pair()] += u64::from(self.n0[t.table_pos()]);
        }
        out
    }

    /// Stable content hash; used to refuse cross-dataset comparisons.
    pub fn fingerprint(&self) -> u64 {
        let mut bytes = Vec::with_capacity(N_TRIO_TYPES * 16);
        for arr in [&self.n1, &self.n0, &self.sn1, &self.sn0] {
            for v in arr {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        fnv1a64(&bytes)
    }
}

/// Natural-log likelihood value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLikelihoodValue {
    pub value: f64,
}

// Per-theta lookup tables: penetrances, their logs, and per-pair
// transmission-weighted sums used by the conditional denominators.
pub(crate) struct ThetaTables {
    pub pen: [f64; N_TRIO_TYPES],
    pub ln_pen: [f64; N_TRIO_TYPES],
    pub ln_comp: [f64; N_TRIO_TYPES],
    pub case_weight: [f64; N_MATING_TYPES],
    pub control_weight: [f64; N_MATING_TYPES],
}

impl ThetaTables {
    pub fn new(theta: &DiseaseModel) -> Result<Self, GeneticsError> {
        let mut pen = [0.0; N_TRIO_TYPES];
        let mut ln_pen = [0.0; N_TRIO_TYPES];
        let mut ln_comp = [0.0; N_TRIO_TYPES];
        let mut case_weight = [0.0; N_MATING_TYPES];
        let mut control_weight = [0.0; N_MATING_TYPES];
        for t in TrioType::ALL {
            let i = t.table_pos();
            let p = penetrance(theta, t)?;
            let tau = t.transmission_factor_f64();
            pen[i] = p;
            ln_pen[i] = p.ln();
            ln_comp[i] = (1.0 - p).ln();
            case_weight[t.mating_pair()] += tau * p;
            control_weight[t.mating_pair()] += tau * (1.0 - p);
        }
        Ok(Self { pen, ln_pen, ln_comp, case_weight, control_weight })
    }
}

fn dot9(a: &[f64; 9], b: &[f64; 9]) -> f64 {
    let mut acc = 0.0;
    for i in 0..9 {
        acc += a[i] * b[i];
    }
    acc
}

/// Population probability of disease implied by (theta, mu): the sum of the
/// affected joint probabilities over the 15 trio types.
pub fn prevalence(
    theta: &DiseaseModel,
    mu: &MatingTypeDistribution,
) -> Result<f64, GeneticsError> {
    let tables = ThetaTables::new(theta)?;
    Ok(dot9(&tables.case_weight, mu.values()))
}

/// Conditional probability P(M,F,C | D) of one trio row.
pub fn conditional_trio_prob(
    theta: &DiseaseModel,
    mu: &MatingTypeDistribution,
    trio: TrioType,
    affected: bool,
) -> Result<f64, LikelihoodError> {
    let tables = ThetaTables::new(theta)?;
    let prev = dot9(&tables.case_weight, mu.values());
    if !(prev > 0.0 && prev < 1.0) {
        return Err(LikelihoodError::DegeneratePrevalence { prevalence: prev });
    }
    let i = trio.table_pos();
    let p = tables.pen[i];
    let base = mu.values()[trio.mating_pair()] * trio.transmission_factor_f64();
    Ok(if affected { base * p / prev } else { base * (1.0 - p) / (1.0 - prev) })
}

/// Log-likelihood evaluator for fixed counts and theta, cheap to apply at
/// many mating-type points. This is the hot path of the sampler and of the
/// M-step objective.
pub struct LikelihoodEvaluator<'a> {
    counts: &'a FamilyCounts,
    tables: ThetaTables,
    // Case-plus-control counts per parental pair, as f64.
    pair_counts: [f64; N_MATING_TYPES],
    n1_total: f64,
    n0_total: f64,
    // Sum of all z-independent per-type terms.
    constant: f64,
}

impl<'a> LikelihoodEvaluator<'a> {
    pub fn new(counts: &'a FamilyCounts, theta: &DiseaseModel) -> Result<Self, LikelihoodError> {
        let tables = ThetaTables::new(theta)?;
        let mut constant = 0.0;
        for t in TrioType::ALL {
            let i = t.table_pos();
            let ln_tau = t.transmission_factor_f64().ln();
            let groups = [
                (counts.n1[i], tables.ln_pen[i] + ln_tau, CountKind::CaseTrio),
                (counts.n0[i], tables.ln_comp[i] + ln_tau, CountKind::ControlTrio),
                (counts.sn1[i], tables.ln_pen[i], CountKind::AffectedSibling),
                (counts.sn0[i], tables.ln_comp[i], CountKind::UnaffectedSibling),
            ];
            for (count, term, kind) in groups {
                if count > 0 {
                    if !term.is_finite() {
                        return Err(LikelihoodError::LogOfZero {
                            trio: t.index(),
                            kind,
                            count,
                        });
                    }
                    constant += f64::from(count) * term;
                }
            }
        }
        let mut pair_counts = [0.0; N_MATING_TYPES];
        for (pair, &n) in counts.trios_by_pair().iter().enumerate() {
            pair_counts[pair] = n as f64;
        }
        Ok(Self {
            counts,
            tables,
            pair_counts,
            n1_total: counts.case_total() as f64,
            n0_total: counts.control_total() as f64,
            constant,
        })
    }

    /// Log likelihood at a mating-type point given as raw simplex values.
    pub fn log_likelihood(&self, z: &[f64; N_MATING_TYPES]) -> Result<f64, LikelihoodError> {
        let mut acc = self.constant;
        for pair in 0..N_MATING_TYPES {
            let c = self.pair_counts[pair];
            if c > 0.0 {
                acc += c * z[pair].ln();
            }
        }
        let d1 = dot9(&self.tables.case_weight, z);
        let d0 = dot9(&self.tables.control_weight, z);
        if self.n1_total > 0.0 {
            acc -= self.n1_total * d1.ln();
        }
        if self.n0_total > 0.0 {
            acc -= self.n0_total * d0.ln();
        }
        if acc.is_finite() {
            return Ok(acc);
        }
        Err(self.diagnose(z, d1, d0))
    }

    // Internal pieces for the EM machinery, which evaluates the same
    // likelihood against a fixed batch of latent samples.
    pub(crate) fn constant_term(&self) -> f64 {
        self.constant
    }

    pub(crate) fn pair_counts(&self) -> &[f64; N_MATING_TYPES] {
        &self.pair_counts
    }

    pub(crate) fn weights(&self) -> (&[f64; N_MATING_TYPES], &[f64; N_MATING_TYPES]) {
        (&self.tables.case_weight, &self.tables.control_weight)
    }

    pub(crate) fn totals(&self) -> (f64, f64) {
        (self.n1_total, self.n0_total)
    }

    // Slow path: name the term that collapsed.
    fn diagnose(&self, z: &[f64; N_MATING_TYPES], d1: f64, d0: f64) -> LikelihoodError {
        for t in TrioType::ALL {
            let i = t.table_pos();
            let pair = t.mating_pair();
            if z[pair] <= 0.0 {
                for (count, kind) in [
                    (self.counts.n1[i], CountKind::CaseTrio),
                    (self.counts.n0[i], CountKind::ControlTrio),
                ] {
                    if count > 0 {
                        return LikelihoodError::LogOfZero { trio: t.index(), kind, count };
                    }
                }
            }
        }
        if d1 <= 0.0 || d1 >= 1.0 || d0 <= 0.0 {
            return LikelihoodError::DegeneratePrevalence { prevalence: d1 };
        }
        LikelihoodError::DegeneratePrevalence { prevalence: f64::NAN }
    }
}

/// Full observed-data log likelihood at one mating-type point.
pub fn full_log_likelihood(
    counts: &FamilyCounts,
    theta: &DiseaseModel,
    mu: &MatingTypeDistribution,
) -> Result<LogLikelihoodValue, LikelihoodError> {
    let value = LikelihoodEvaluator::new(counts, theta)?.log_likelihood(mu.values())?;
    Ok(LogLikelihoodValue { value })
}
