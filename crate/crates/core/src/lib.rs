//! Joint estimation of genomic imprinting and maternal effects from
//! case-parent/control-parent trio counts.
//!
//! Mating-type probabilities are treated as latent variables with a Dirichlet
//! distribution, and the full-likelihood maximizer is found by Monte Carlo
//! EM: each E-step draws latent samples with an independence
//! Metropolis–Hastings chain, each M-step maximizes the sampled expected
//! complete-data log likelihood over the penetrance parameters and the
//! Dirichlet concentrations. Likelihood-ratio tests for association,
//! imprinting, and maternal effects compare masked and unmasked fits; a
//! simulator and a batch experiment harness generate trio datasets and
//! summarize type I error, power, wild-estimate proportions, and bias over
//! replicates.

pub mod cli;
pub mod experiment;
pub mod genetics;
pub mod inference;
pub mod likelihood;
pub mod mcem;
pub mod sampler;
pub mod seed;
pub mod simulator;
pub mod special;
