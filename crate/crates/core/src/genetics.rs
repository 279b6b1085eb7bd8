//! Trio genotype combinatorics and the penetrance model.
//!
//! A biallelic marker is described by the number of minor-allele copies
//! (0, 1, or 2) carried by mother, father, and child. Only 15 ordered
//! (mother, father, child) combinations are compatible with Mendelian
//! transmission; they are enumerated in a fixed canonical order together with
//! their exact transmission probabilities and parental-origin status.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const N_TRIO_TYPES: usize = 15;
pub const N_MATING_TYPES: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum GeneticsError {
    #[error("genotype copy count must be 0, 1, or 2, got {0}")]
    InvalidGenotype(u8),
    #[error("trio type index must be in 1..=15, got {0}")]
    InvalidTrioIndex(u8),
    #[error("invalid disease model: {0}")]
    InvalidModel(String),
    #[error("invalid mating-type distribution: {0}")]
    InvalidDistribution(String),
    #[error("penetrance exceeds 1 for trio type {trio} (value {value})")]
    PenetranceOverflow { trio: u8, value: f64 },
}

/// Number of minor-allele copies carried by one person.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenotypeCount(u8);

impl GenotypeCount {
    pub fn new(copies: u8) -> Result<Self, GeneticsError> {
        if copies > 2 {
            return Err(GeneticsError::InvalidGenotype(copies));
        }
        Ok(Self(copies))
    }

    pub fn copies(self) -> u8 {
        self.0
    }
}

/// Whether the single variant allele of a heterozygous child has a known
/// parental origin within a trio type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantOrigin {
    /// Child is not heterozygous, so no origin applies.
    None,
    /// The variant allele can only have come from the father.
    Paternal,
    /// The variant allele can only have come from the mother.
    Maternal,
    /// Both parents are heterozygous; either origin is possible.
    Ambiguous,
}

struct TrioRow {
    index: u8,
    m: u8,
    f: u8,
    c: u8,
    // Transmission probability P(C=c | M=m, F=f), exact.
    num: u32,
    den: u32,
    origin: VariantOrigin,
}

// Canonical table ordering. The heterozygous-child row of two heterozygous
// parents (type 8) carries the full conditional transmission probability 1/2;
// its penetrance is the parental-origin average, so the joint probability
// folds the two origin branches into one row.
static TRIO_TABLE: [TrioRow; 15] = [
    TrioRow { index: 1, m: 0, f: 0, c: 0, num: 1, den: 1, origin: VariantOrigin::None },
    TrioRow { index: 2, m: 0, f: 1, c: 0, num: 1, den: 2, origin: VariantOrigin::None },
    TrioRow { index: 3, m: 0, f: 1, c: 1, num: 1, den: 2, origin: VariantOrigin::Paternal },
    TrioRow { index: 4, m: 0, f: 2, c: 1, num: 1, den: 1, origin: VariantOrigin::Paternal },
    TrioRow { index: 5, m: 1, f: 0, c: 0, num: 1, den: 2, origin: VariantOrigin::None },
    TrioRow { index: 6, m: 1, f: 0, c: 1, num: 1, den: 2, origin: VariantOrigin::Maternal },
    TrioRow { index: 7, m: 1, f: 1, c: 0, num: 1, den: 4, origin: VariantOrigin::None },
    TrioRow { index: 8, m: 1, f: 1, c: 1, num: 1, den: 2, origin: VariantOrigin::Ambiguous },
    TrioRow { index: 9, m: 1, f: 1, c: 2, num: 1, den: 4, origin: VariantOrigin::None },
    TrioRow { index: 10, m: 1, f: 2, c: 1, num: 1, den: 2, origin: VariantOrigin::Paternal },
    TrioRow { index: 11, m: 1, f: 2, c: 2, num: 1, den: 2, origin: VariantOrigin::None },
    TrioRow { index: 12, m: 2, f: 0, c: 1, num: 1, den: 1, origin: VariantOrigin::Maternal },
    TrioRow { index: 13, m: 2, f: 1, c: 1, num: 1, den: 2, origin: VariantOrigin::Maternal },
    TrioRow { index: 14, m: 2, f: 1, c: 2, num: 1, den: 2, origin: VariantOrigin::None },
    TrioRow { index: 15, m: 2, f: 2, c: 2, num: 1, den: 1, origin: VariantOrigin::None },
];

/// One of the 15 Mendelian-compatible (mother, father, child) genotype rows.
///
/// Only valid rows are representable; the inner index is private.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct TrioType(u8);

impl TryFrom<u8> for TrioType {
    type Error = GeneticsError;
    fn try_from(index: u8) -> Result<Self, GeneticsError> {
        TrioType::from_index(index)
    }
}

impl From<TrioType> for u8 {
    fn from(t: TrioType) -> u8 {
        t.0
    }
}

impl TrioType {
    pub const ALL: [TrioType; N_TRIO_TYPES] = {
        let mut all = [TrioType(1); N_TRIO_TYPES];
        let mut i = 0;
        while i < N_TRIO_TYPES {
            all[i] = TrioType(i as u8 + 1);
            i += 1;
        }
        all
    };

    pub fn from_index(index: u8) -> Result<Self, GeneticsError> {
        if (1..=15).contains(&index) {
            Ok(Self(index))
        } else {
            Err(GeneticsError::InvalidTrioIndex(index))
        }
    }

    /// Looks up the row for an (m, f, c) combination; `None` if the
    /// combination is Mendelian-impossible.
    pub fn from_genotypes(m: GenotypeCount, f: GenotypeCount, c: GenotypeCount) -> Option<Self> {
        TRIO_TABLE
            .iter()
            .find(|r| r.m == m.copies() && r.f == f.copies() && r.c == c.copies())
            .map(|r| Self(r.index))
    }

    fn row(self) -> &'static TrioRow {
        &TRIO_TABLE[self.0 as usize - 1]
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based position in the canonical table.
    pub fn table_pos(self) -> usize {
        self.0 as usize - 1
    }

    pub fn mother(self) -> GenotypeCount {
        GenotypeCount(self.row().m)
    }

    pub fn father(self) -> GenotypeCount {
        GenotypeCount(self.row().f)
    }

    pub fn child(self) -> GenotypeCount {
        GenotypeCount(self.row().c)
    }

    /// Exact transmission probability P(C | M, F) of this row.
    pub fn transmission_factor(self) -> Ratio<u32> {
        Ratio::new(self.row().num, self.row().den)
    }

    pub fn transmission_factor_f64(self) -> f64 {
        self.row().num as f64 / self.row().den as f64
    }

    pub fn origin(self) -> VariantOrigin {
        self.row().origin
    }

    /// Index of this row's parental pair among the 9 ordered (m, f) pairs.
    pub fn mating_pair(self) -> usize {
        mating_index(self.row().m, self.row().f)
    }
}

/// Index of an ordered (mother, father) genotype pair in 0..9.
pub fn mating_index(m: u8, f: u8) -> usize {
    debug_assert!(m <= 2 && f <= 2);
    (3 * m + f) as usize
}

/// The 9 ordered (mother, father) copy-count pairs in index order.
pub const MATING_PAIRS: [(u8, u8); N_MATING_TYPES] = [
    (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2),
];

/// Mendelian transmission distribution for a parental pair, as exact
/// rationals keyed by child copy count (only reachable counts appear).
pub fn transmission(m: GenotypeCount, f: GenotypeCount) -> Vec<(GenotypeCount, Ratio<u32>)> {
    // Each parent passes a variant allele with probability copies/2.
    let pm = Ratio::new(u32::from(m.copies()), 2);
    let pf = Ratio::new(u32::from(f.copies()), 2);
    let one = Ratio::from_integer(1u32);
    let probs = [
        (one - pm) * (one - pf),
        pm * (one - pf) + (one - pm) * pf,
        pm * pf,
    ];
    probs
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p != Ratio::from_integer(0))
        .map(|(c, p)| (GenotypeCount(c as u8), p))
        .collect()
}

/// Phenocopy rate plus the five relative-risk parameters of the
/// multiplicative penetrance model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiseaseModel {
    delta: f64,
    r1: f64,
    r2: f64,
    rim: f64,
    s1: f64,
    s2: f64,
}

/// Identifies one coordinate of a `DiseaseModel` in canonical order
/// (delta, r1, r2, rim, s1, s2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaParam {
    Delta,
    R1,
    R2,
    Rim,
    S1,
    S2,
}

impl ThetaParam {
    pub const ALL: [ThetaParam; 6] = [
        ThetaParam::Delta,
        ThetaParam::R1,
        ThetaParam::R2,
        ThetaParam::Rim,
        ThetaParam::S1,
        ThetaParam::S2,
    ];

    /// The five relative-risk parameters, excluding delta.
    pub const RISKS: [ThetaParam; 5] = [
        ThetaParam::R1,
        ThetaParam::R2,
        ThetaParam::Rim,
        ThetaParam::S1,
        ThetaParam::S2,
    ];

    pub fn index(self) -> usize {
        match self {
            ThetaParam::Delta => 0,
            ThetaParam::R1 => 1,
            ThetaParam::R2 => 2,
            ThetaParam::Rim => 3,
            ThetaParam::S1 => 4,
            ThetaParam::S2 => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ThetaParam::Delta => "delta",
            ThetaParam::R1 => "r1",
            ThetaParam::R2 => "r2",
            ThetaParam::Rim => "rim",
            ThetaParam::S1 => "s1",
            ThetaParam::S2 => "s2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "delta" => Some(ThetaParam::Delta),
            "r1" => Some(ThetaParam::R1),
            "r2" => Some(ThetaParam::R2),
            "rim" | "r_im" => Some(ThetaParam::Rim),
            "s1" => Some(ThetaParam::S1),
            "s2" => Some(ThetaParam::S2),
            _ => None,
        }
    }
}

impl DiseaseModel {
    pub fn new(
        delta: f64,
        r1: f64,
        r2: f64,
        rim: f64,
        s1: f64,
        s2: f64,
    ) -> Result<Self, GeneticsError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(GeneticsError::InvalidModel(format!(
                "phenocopy rate must lie in (0,1), got {delta}"
            )));
        }
        for (name, v) in [("r1", r1), ("r2", r2), ("rim", rim), ("s1", s1), ("s2", s2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GeneticsError::InvalidModel(format!(
                    "risk parameter {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { delta, r1, r2, rim, s1, s2 })
    }

    /// Model with all relative risks at 1.
    pub fn null(delta: f64) -> Result<Self, GeneticsError> {
        Self::new(delta, 1.0, 1.0, 1.0, 1.0, 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn r1(&self) -> f64 {
        self.r1
    }
    pub fn r2(&self) -> f64 {
        self.r2
    }
    pub fn rim(&self) -> f64 {
        self.rim
    }
    pub fn s1(&self) -> f64 {
        self.s1
    }
    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// Coordinates in canonical order (delta, r1, r2, rim, s1, s2).
    pub fn to_array(&self) -> [f64; 6] {
        [self.delta, self.r1, self.r2, self.rim, self.s1, self.s2]
    }

    pub fn from_array(values: [f64; 6]) -> Result<Self, GeneticsError> {
        Self::new(values[0], values[1], values[2], values[3], values[4], values[5])
    }

    pub fn get(&self, p: ThetaParam) -> f64 {
        self.to_array()[p.index()]
    }

    // Risk multiplier (penetrance with delta = 1) for a table row, with the
    // ambiguous-origin row averaged over the two origins.
    fn risk_multiplier(&self, trio: TrioType) -> f64 {
        let row = trio.row();
        let mut mult = 1.0;
        if row.c == 1 {
            mult *= self.r1;
        } else if row.c == 2 {
            mult *= self.r2;
        }
        if row.m == 1 {
            mult *= self.s1;
        } else if row.m == 2 {
            mult *= self.s2;
        }
        match row.origin {
            VariantOrigin::Maternal => mult * self.rim,
            VariantOrigin::Ambiguous => mult * (1.0 + self.rim) / 2.0,
            VariantOrigin::None | VariantOrigin::Paternal => mult,
        }
    }
}

/// Disease probability for a trio type. The ambiguous-origin row returns the
/// origin-averaged value, so `mu * factor * penetrance` reproduces the joint
/// probability of the canonical table.
pub fn penetrance(theta: &DiseaseModel, trio: TrioType) -> Result<f64, GeneticsError> {
    let value = theta.delta * theta.risk_multiplier(trio);
    if value > 1.0 {
        return Err(GeneticsError::PenetranceOverflow { trio: trio.index(), value });
    }
    Ok(value)
}

/// Disease probability with the child's parental origin known; used by the
/// simulator, which tracks the true transmitted alleles.
pub(crate) fn penetrance_origin_resolved(
    theta: &DiseaseModel,
    m: u8,
    c: u8,
    from_mother: bool,
) -> f64 {
    let mut value = theta.delta;
    if c == 1 {
        value *= theta.r1;
        if from_mother {
            value *= theta.rim;
        }
    } else if c == 2 {
        value *= theta.r2;
    }
    if m == 1 {
        value *= theta.s1;
    } else if m == 2 {
        value *= theta.s2;
    }
    value
}

/// True iff every reachable penetrance is at most 1, checking both origin
/// branches of the ambiguous row separately.
pub fn validate_penetrance_bounds(theta: &DiseaseModel) -> bool {
    TRIO_TABLE.iter().all(|row| {
        let ok_row = match row.origin {
            VariantOrigin::Ambiguous => {
                let maternal = penetrance_origin_resolved(theta, row.m, row.c, true);
                let paternal = penetrance_origin_resolved(theta, row.m, row.c, false);
                maternal <= 1.0 && paternal <= 1.0
            }
            VariantOrigin::Maternal => {
                penetrance_origin_resolved(theta, row.m, row.c, true) <= 1.0
            }
            VariantOrigin::None | VariantOrigin::Paternal => {
                penetrance_origin_resolved(theta, row.m, row.c, false) <= 1.0
            }
        };
        ok_row
    })
}

/// Point on the 9-simplex of ordered parental-pair genotype probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatingTypeDistribution {
    mu: [f64; N_MATING_TYPES],
}

impl MatingTypeDistribution {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(mu: [f64; N_MATING_TYPES]) -> Result<Self, GeneticsError> {
        if mu.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GeneticsError::InvalidDistribution(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = mu.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(GeneticsError::InvalidDistribution(format!(
                "entries must sum to 1 within {}, got {sum}",
                Self::SUM_TOLERANCE
            )));
        }
        Ok(Self { mu })
    }

    pub fn uniform() -> Self {
        Self { mu: [1.0 / 9.0; N_MATING_TYPES] }
    }

    pub fn values(&self) -> &[f64; N_MATING_TYPES] {
        &self.mu
    }

    /// Probability of the ordered pair (mother = m, father = f).
    pub fn get(&self, m: u8, f: u8) -> f64 {
        self.mu[mating_index(m, f)]
    }
}

/// Joint probability of one trio row and the child's disease status:
/// mu * transmission factor * penetrance (or its complement).
pub fn joint_probability(
    theta: &DiseaseModel,
    mu: &MatingTypeDistribution,
    trio: TrioType,
    affected: bool,
) -> Result<f64, GeneticsError> {
    let pen = penetrance(theta, trio)?;
    let base = mu.values()[trio.mating_pair()] * trio.transmission_factor_f64();
    Ok(if affected { base * pen } else { base * (1.0 - pen) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(c: u8) -> GenotypeCount {
        GenotypeCount::new(c).unwrap()
    }

    #[test]
    fn table_matches_canonical_rows() {
        let expected: [(u8, u8, u8, u8); 15] = [
            (1, 0, 0, 0),
            (2, 0, 1, 0),
            (3, 0, 1, 1),
            (4, 0, 2, 1),
            (5, 1, 0, 0),
            (6, 1, 0, 1),
            (7, 1, 1, 0),
            (8, 1, 1, 1),
            (9, 1, 1, 2),
            (10, 1, 2, 1),
            (11, 1, 2, 2),
            (12, 2, 0, 1),
            (13, 2, 1, 1),
            (14, 2, 1, 2),
            (15, 2, 2, 2),
        ];
        for (idx, m, f, c) in expected {
            let t = TrioType::from_index(idx).unwrap();
            assert_eq!((t.mother().copies(), t.father().copies(), t.child().copies()), (m, f, c));
        }
    }

    #[test]
    fn transmission_examples() {
        let r = |n, d| Ratio::new(n, d);
        assert_eq!(transmission(g(0), g(0)), vec![(g(0), r(1, 1))]);
        assert_eq!(
            transmission(g(1), g(1)),
            vec![(g(0), r(1, 4)), (g(1), r(1, 2)), (g(2), r(1, 4))]
        );
        assert_eq!(transmission(g(2), g(1)), vec![(g(1), r(1, 2)), (g(2), r(1, 2))]);
    }

    #[test]
    fn transmission_sums_to_one_exactly_and_matches_table() {
        for (m, f) in MATING_PAIRS {
            let dist = transmission(g(m), g(f));
            let total: Ratio<u32> = dist.iter().map(|(_, p)| *p).sum();
            assert_eq!(total, Ratio::from_integer(1), "pair ({m},{f})");
            // Support and factors agree with the canonical rows.
            for (c, p) in &dist {
                let t = TrioType::from_genotypes(g(m), g(f), *c).expect("row must exist");
                assert_eq!(t.transmission_factor(), *p);
            }
            let n_rows = TrioType::ALL
                .iter()
                .filter(|t| t.mother().copies() == m && t.father().copies() == f)
                .count();
            assert_eq!(n_rows, dist.len());
        }
    }

    #[test]
    fn table_factors_sum_to_one_per_pair() {
        for (m, f) in MATING_PAIRS {
            let total: Ratio<u32> = TrioType::ALL
                .iter()
                .filter(|t| t.mother().copies() == m && t.father().copies() == f)
                .map(|t| t.transmission_factor())
                .sum();
            assert_eq!(total, Ratio::from_integer(1));
        }
    }

    #[test]
    fn null_model_penetrance_is_constant() {
        let theta = DiseaseModel::null(0.05).unwrap();
        for t in TrioType::ALL {
            assert_eq!(penetrance(&theta, t).unwrap(), 0.05);
        }
    }

    #[test]
    fn penetrance_table_forms() {
        let theta = DiseaseModel::new(0.01, 3.0, 4.0, 1.5, 2.0, 2.5).unwrap();
        let (d, r1, r2, rim, s1, s2) = (0.01, 3.0, 4.0, 1.5, 2.0, 2.5);
        let expected = [
            d,
            d,
            d * r1,
            d * r1,
            d * s1,
            d * s1 * r1 * rim,
            d * s1,
            d * s1 * r1 * (1.0 + rim) / 2.0,
            d * s1 * r2,
            d * s1 * r1,
            d * s1 * r2,
            d * s2 * r1 * rim,
            d * s2 * r1 * rim,
            d * s2 * r2,
            d * s2 * r2,
        ];
        for (t, e) in TrioType::ALL.iter().zip(expected) {
            let p = penetrance(&theta, *t).unwrap();
            assert!((p - e).abs() < 1e-15, "type {}: {p} vs {e}", t.index());
        }
    }

    #[test]
    fn penetrance_overflow_names_the_type() {
        // delta * s2 * r2 = 0.5 * 2 * 3 = 3 > 1 first fails at type 14.
        let theta = DiseaseModel::new(0.5, 3.0, 3.0, 1.0, 2.0, 2.0).unwrap();
        let t14 = TrioType::from_index(14).unwrap();
        match penetrance(&theta, t14) {
            Err(GeneticsError::PenetranceOverflow { trio: 14, value }) => {
                assert!((value - 3.0).abs() < 1e-12)
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn validate_bounds_examples() {
        assert!(validate_penetrance_bounds(&DiseaseModel::new(0.05, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap()));
        assert!(!validate_penetrance_bounds(&DiseaseModel::new(0.5, 3.0, 3.0, 1.0, 2.0, 2.0).unwrap()));
        assert!(validate_penetrance_bounds(
            &DiseaseModel::new(0.0067, 3.0, 3.0, 1.0 / 3.0, 2.0, 2.0).unwrap()
        ));
    }

    #[test]
    fn validate_bounds_checks_origin_branches() {
        // Averaged type-8 value stays below 1 while the maternal branch
        // exceeds it: delta*s1*r1*(1+rim)/2 = 0.55 but delta*s1*r1*rim = 1.05.
        let theta = DiseaseModel::new(0.1, 1.0, 1.0, 21.0, 0.5, 1.0).unwrap();
        let t8 = TrioType::from_index(8).unwrap();
        assert!(penetrance(&theta, t8).unwrap() <= 1.0);
        assert!(!validate_penetrance_bounds(&theta));
    }

    #[test]
    fn joint_probability_examples() {
        let theta = DiseaseModel::null(0.05).unwrap();
        let mu = MatingTypeDistribution::uniform();
        let t1 = TrioType::from_index(1).unwrap();
        let p = joint_probability(&theta, &mu, t1, true).unwrap();
        assert!((p - (1.0 / 9.0) * 0.05).abs() < 1e-15);

        // Aggregated unaffected form of the ambiguous row.
        let theta = DiseaseModel::new(0.05, 2.0, 3.0, 1.5, 1.2, 1.1).unwrap();
        let t8 = TrioType::from_index(8).unwrap();
        let expected = (1.0 / 9.0) * 0.25 * (2.0 - 0.05 * 1.2 * 2.0 * 2.5);
        let p = joint_probability(&theta, &mu, t8, false).unwrap();
        assert!((p - expected).abs() < 1e-15, "{p} vs {expected}");
    }

    #[test]
    fn joint_probability_totals_one() {
        let theta = DiseaseModel::new(0.02, 2.0, 3.0, 0.7, 1.4, 2.2).unwrap();
        let mut mu = [0.0; 9];
        for (i, v) in mu.iter_mut().enumerate() {
            *v = (i + 1) as f64;
        }
        let s: f64 = mu.iter().sum();
        mu.iter_mut().for_each(|v| *v /= s);
        let mu = MatingTypeDistribution::new(mu).unwrap();
        let total: f64 = TrioType::ALL
            .iter()
            .flat_map(|t| [true, false].map(|a| joint_probability(&theta, &mu, *t, a).unwrap()))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_r1_doubles_affected_joint_for_single_copy_children() {
        let mu = MatingTypeDistribution::uniform();
        let base = DiseaseModel::new(0.01, 1.5, 3.0, 1.2, 1.1, 1.3).unwrap();
        let doubled = DiseaseModel::new(0.01, 3.0, 3.0, 1.2, 1.1, 1.3).unwrap();
        for t in TrioType::ALL {
            if t.child().copies() == 1 {
                let a = joint_probability(&base, &mu, t, true).unwrap();
                let b = joint_probability(&doubled, &mu, t, true).unwrap();
                assert!((b - 2.0 * a).abs() < 1e-15, "type {}", t.index());
            }
        }
    }

    #[test]
    fn impossible_combinations_are_unrepresentable() {
        assert!(TrioType::from_genotypes(g(0), g(0), g(1)).is_none());
        assert!(TrioType::from_genotypes(g(2), g(2), g(0)).is_none());
        assert!(TrioType::from_index(0).is_err());
        assert!(TrioType::from_index(16).is_err());
    }

    #[test]
    fn mating_distribution_validation() {
        assert!(MatingTypeDistribution::new([1.0 / 9.0; 9]).is_ok());
        let mut bad = [1.0 / 9.0; 9];
        bad[0] += 1e-6;
        assert!(MatingTypeDistribution::new(bad).is_err());
        let mut neg = [0.125; 9];
        neg[0] = -0.0000001;
        neg[1] = 0.1250001;
        assert!(MatingTypeDistribution::new(neg).is_err());
        // A point mass is a valid distribution (entries may be zero).
        let mut point = [0.0; 9];
        point[mating_index(2, 2)] = 1.0;
        assert!(MatingTypeDistribution::new(point).is_ok());
    }
}
