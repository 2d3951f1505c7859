//! Personalized-privacy release through the Laplace and Exponential
//! mechanisms.
//!
//! Both mechanisms are calibrated to `b = max_j Δ_j/ε_j`. With `g` having
//! individual sensitivity `Δ_i`, a change in individual `i`'s data moves the
//! output density by at most a factor `exp(Δ_i/b) ≤ exp(ε_i)`.
//!
//! # Reproducibility
//!
//! Seeds are 64-bit integers fed to [`seeded_rng`] (ChaCha8 via
//! `SeedableRng::seed_from_u64`). Every uniform draw takes one `u64` from the
//! stream and maps its top 52 bits `k` to `(k + 0.5)/2⁵²`, a value strictly
//! inside `(0, 1)` (with 53 bits the top value would round to `1`). Laplace noise uses exactly one draw; an exponential
//! mechanism sample uses exactly one draw.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::database::{IndividualId, SensitivityBounds};
use crate::error::{Error, Result};

/// Privacy parameters `ε_i > 0`, with an optional default for unnamed ids.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonalEpsilons {
    per_individual: HashMap<IndividualId, f64>,
    default: Option<f64>,
}

impl PersonalEpsilons {
    pub fn new(per_individual: HashMap<IndividualId, f64>, default: Option<f64>) -> Result<Self> {
        for &e in per_individual.values().chain(default.iter()) {
            check_epsilon(e)?;
        }
        Ok(PersonalEpsilons {
            per_individual,
            default,
        })
    }

    pub fn uniform(epsilon: f64) -> Result<Self> {
        Self::new(HashMap::new(), Some(epsilon))
    }

    pub fn get(&self, id: &IndividualId) -> Option<f64> {
        self.per_individual.get(id).copied().or(self.default)
    }

    pub fn default_epsilon(&self) -> Option<f64> {
        self.default
    }
}

fn check_epsilon(e: f64) -> Result<()> {
    if e.is_finite() && e > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("ε must be finite and positive, got {e}")))
    }
}

/// Laplace scale / exponential-mechanism temperature `b = max_j Δ_j/ε_j`.
/// Zero only when every relevant `Δ_j` is zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoiseScale(f64);

impl NoiseScale {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `b` over every individual named in either `bounds` or `eps`, plus the
/// default pair when `eps` has a default.
pub fn noise_scale(bounds: &SensitivityBounds, eps: &PersonalEpsilons) -> Result<NoiseScale> {
    noise_scale_over(bounds, eps, std::iter::empty())
}

/// As [`noise_scale`], additionally covering every id in `population`.
pub fn noise_scale_over<'a>(
    bounds: &'a SensitivityBounds,
    eps: &'a PersonalEpsilons,
    population: impl IntoIterator<Item = &'a IndividualId>,
) -> Result<NoiseScale> {
    let mut best: Option<f64> = None;
    let mut visit = |delta: f64, epsilon: f64| {
        let r = delta / epsilon;
        best = Some(best.map_or(r, |b| b.max(r)));
    };
    if let Some(e) = eps.default {
        visit(bounds.default_delta(), e);
    }
    let ids = eps
        .per_individual
        .keys()
        .chain(bounds.per_individual().keys())
        .chain(population);
    for id in ids {
        let e = eps
            .get(id)
            .ok_or_else(|| Error::invalid(format!("no ε for individual `{id}`")))?;
        visit(bounds.get(id), e);
    }
    best.map(NoiseScale)
        .ok_or_else(|| Error::invalid("noise scale needs at least one (Δ, ε) pair"))
}

/// `(1/2b)·exp(−|x|/b)`.
pub fn laplace_pdf(x: f64, b: f64) -> Result<f64> {
    laplace_log_pdf(x, b).map(f64::exp)
}

pub fn laplace_log_pdf(x: f64, b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid(format!("Laplace scale must be positive, got {b}")));
    }
    Ok(-(2.0 * b).ln() - x.abs() / b)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One uniform draw strictly inside `(0, 1)`.
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((rng.next_u64() >> 12) as f64 + 0.5) * SCALE
}

/// `−b·sgn(u − ½)·ln(1 − 2|u − ½|)`.
pub fn laplace_inverse_cdf(u: f64, b: f64) -> f64 {
    let c = u - 0.5;
    -b * c.signum() * (1.0 - 2.0 * c.abs()).ln()
}

/// One `Lap(b)` draw; `b = 0` returns `0` without consuming randomness.
pub fn laplace_sample<R: RngCore + ?Sized>(b: f64, rng: &mut R) -> Result<f64> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::invalid(format!("Laplace scale must be ≥ 0, got {b}")));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    Ok(laplace_inverse_cdf(open_uniform(rng), b))
}

/// `g + Lap(max_j Δ_j/ε_j)`.
pub fn laplace_mechanism<R: RngCore + ?Sized>(
    g_value: f64,
    bounds: &SensitivityBounds,
    eps: &PersonalEpsilons,
    rng: &mut R,
) -> Result<f64> {
    let b = noise_scale(bounds, eps)?;
    Ok(g_value + laplace_sample(b.value(), rng)?)
}

/// Scores `q(D, r)` over a finite range, with the sensitivity of `q` in `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityScoreTable {
    outcomes: Vec<(String, f64)>,
    delta_q: SensitivityBounds,
}

impl QualityScoreTable {
    pub fn new(outcomes: Vec<(String, f64)>, delta_q: SensitivityBounds) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::invalid("exponential mechanism needs a nonempty range"));
        }
        if let Some((label, s)) = outcomes.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::invalid(format!("score for `{label}` is not finite: {s}")));
        }
        Ok(QualityScoreTable { outcomes, delta_q })
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn scores(&self) -> Vec<f64> {
        self.outcomes.iter().map(|&(_, s)| s).collect()
    }

    pub fn delta_q(&self) -> &SensitivityBounds {
        &self.delta_q
    }
}

/// `P(r) ∝ exp(q(r)/(2b))`, computed after subtracting the top score.
/// `b = 0` splits the mass evenly over the top-scoring outcomes.
pub fn exponential_probabilities(scores: &[f64], b: f64) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::invalid("empty score list"));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::invalid(format!("temperature must be ≥ 0, got {b}")));
    }
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = if b == 0.0 {
        scores.iter().map(|&s| if s == top { 1.0 } else { 0.0 }).collect()
    } else {
        scores.iter().map(|&s| ((s - top) / (2.0 * b)).exp()).collect()
    };
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

pub fn exponential_mechanism<'q, R: RngCore + ?Sized>(
    q: &'q QualityScoreTable,
    eps: &PersonalEpsilons,
    rng: &mut R,
) -> Result<&'q str> {
    let b = noise_scale(&q.delta_q, eps)?;
    let probs = exponential_probabilities(&q.scores(), b.value())?;
    let u = open_uniform(rng);
    let mut acc = 0.0;
    for ((label, _), p) in q.outcomes.iter().zip(&probs) {
        acc += p;
        if u < acc {
            return Ok(label);
        }
    }
    // Rounding left the cumulative sum just under u; take the last outcome
    // with positive mass.
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1);
    Ok(&q.outcomes[last].0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps_map(pairs: &[(&str, f64)]) -> HashMap<IndividualId, f64> {
        pairs.iter().map(|&(k, v)| (k.into(), v)).collect()
    }

    #[test]
    fn pdf_values() {
        assert_eq!(laplace_pdf(0.0, 1.0).unwrap(), 0.5);
        assert!((laplace_pdf(1.0, 1.0).unwrap() - 0.1839397205857212).abs() < 1e-15);
        assert_eq!(laplace_pdf(-2.5, 3.0).unwrap(), laplace_pdf(2.5, 3.0).unwrap());
        assert!(laplace_pdf(0.0, 0.0).is_err());
        assert!(laplace_pdf(0.0, -1.0).is_err());
    }

    #[test]
    fn scale_examples() {
        let bounds = SensitivityBounds::new(eps_map(&[("a", 1.0), ("b", 2.0)]), 0.0).unwrap();
        let eps = PersonalEpsilons::new(eps_map(&[("a", 0.5), ("b", 2.0)]), None).unwrap();
        assert_eq!(noise_scale(&bounds, &eps).unwrap().value(), 2.0);

        let u = noise_scale(
            &SensitivityBounds::uniform(3.0).unwrap(),
            &PersonalEpsilons::uniform(1.5).unwrap(),
        )
        .unwrap();
        assert_eq!(u.value(), 2.0);

        let same = SensitivityBounds::new(eps_map(&[("a", 0.3), ("b", 4.0)]), 0.0).unwrap();
        let eps = PersonalEpsilons::new(eps_map(&[("a", 0.3), ("b", 4.0)]), None).unwrap();
        assert_eq!(noise_scale(&same, &eps).unwrap().value(), 1.0);
    }

    #[test]
    fn scale_errors() {
        let bounds = SensitivityBounds::uniform(1.0).unwrap();
        let none = PersonalEpsilons::new(HashMap::new(), None).unwrap();
        assert!(noise_scale(&bounds, &none).is_err());
        assert!(PersonalEpsilons::uniform(0.0).is_err());
        assert!(PersonalEpsilons::uniform(-1.0).is_err());
        let partial = PersonalEpsilons::new(eps_map(&[("a", 1.0)]), None).unwrap();
        let missing: IndividualId = "z".into();
        assert!(noise_scale_over(&bounds, &partial, [&missing]).is_err());
    }

    #[test]
    fn zero_sensitivity_adds_nothing() {
        let bounds = SensitivityBounds::uniform(0.0).unwrap();
        let eps = PersonalEpsilons::uniform(1.0).unwrap();
        let out = laplace_mechanism(3.25, &bounds, &eps, &mut seeded_rng(1)).unwrap();
        assert_eq!(out, 3.25);
    }

    #[test]
    fn seed_determinism_and_first_draw() {
        let bounds = SensitivityBounds::uniform(2.0).unwrap();
        let eps = PersonalEpsilons::uniform(1.0).unwrap();
        let a = laplace_mechanism(1.0, &bounds, &eps, &mut seeded_rng(42)).unwrap();
        let b = laplace_mechanism(1.0, &bounds, &eps, &mut seeded_rng(42)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let u = open_uniform(&mut seeded_rng(42));
        assert_eq!(a, 1.0 + laplace_inverse_cdf(u, 2.0));
        assert_eq!(a, 1.0 + laplace_sample(2.0, &mut seeded_rng(42)).unwrap());
    }

    #[test]
    fn open_uniform_stays_inside() {
        struct Fixed(u64);
        impl RngCore for Fixed {
            fn next_u32(&mut self) -> u32 {
                self.0 as u32
            }
            fn next_u64(&mut self) -> u64 {
                self.0
            }
            fn fill_bytes(&mut self, _: &mut [u8]) {}
            fn try_fill_bytes(&mut self, _: &mut [u8]) -> std::result::Result<(), rand::Error> {
                Ok(())
            }
        }
        let lo = open_uniform(&mut Fixed(0));
        let hi = open_uniform(&mut Fixed(u64::MAX));
        assert!(lo > 0.0 && hi < 1.0);
        assert!(laplace_inverse_cdf(lo, 1.0).is_finite());
        assert!(laplace_inverse_cdf(hi, 1.0).is_finite());
    }

    #[test]
    fn exponential_probability_examples() {
        let p = exponential_probabilities(&[1.0, 1.0, 1.0, 1.0], 0.7).unwrap();
        assert!(p.iter().all(|&x| x == 0.25));
        let p = exponential_probabilities(&[0.0, 2.0], 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((p[1] - e / (1.0 + e)).abs() < 1e-15);
        assert!((p[1] - 0.7310585786300049).abs() < 1e-12);
        let big = exponential_probabilities(&[1e300, 0.0], 1e-3).unwrap();
        assert_eq!(big, vec![1.0, 0.0]);
        assert_eq!(
            exponential_probabilities(&[2.0, 5.0, 5.0], 0.0).unwrap(),
            vec![0.0, 0.5, 0.5]
        );
    }

    #[test]
    fn exponential_sampling_deterministic() {
        let q = QualityScoreTable::new(
            vec![("A".into(), 0.0), ("B".into(), 2.0)],
            SensitivityBounds::uniform(1.0).unwrap(),
        )
        .unwrap();
        let eps = PersonalEpsilons::uniform(1.0).unwrap();
        for seed in 0..20 {
            let a = exponential_mechanism(&q, &eps, &mut seeded_rng(seed)).unwrap();
            let b = exponential_mechanism(&q, &eps, &mut seeded_rng(seed)).unwrap();
            assert_eq!(a, b);
        }
        assert!(QualityScoreTable::new(vec![], SensitivityBounds::uniform(1.0).unwrap()).is_err());
    }
}
