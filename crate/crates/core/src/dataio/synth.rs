use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{
    FeatureMeta, FeatureValue, SensitiveMeta, SensitiveValue, SurvivalDataset, SurvivalRecord,
};
use crate::error::{domain, Result};

/// Parameters of the synthetic generator.
///
/// Event times are exponential with rate `BASE_RATE · exp(β·x) · hr^g`, where
/// `g = 1` marks the deprived group. Two further distortions make the groups
/// unequally served by a model fit to the pooled data: the first feature is
/// shifted up for the deprived group, so it partly proxies the sensitive
/// attribute, and every other feature carries only `DEPRIVED_SIGNAL` of its
/// effect for that group. With `hazard_ratio = 1` none of this applies and
/// group membership is independent of the outcome. The group label is also
/// exposed as a categorical feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    /// Share of records in the deprived group.
    pub group_fraction: f64,
    /// Hazard multiplier applied to the deprived group.
    pub hazard_ratio: f64,
    /// Target share of censored records; 0 disables censoring.
    pub censor_rate: f64,
    /// Informative numeric features.
    pub n_features: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 2000,
            group_fraction: 0.5,
            hazard_ratio: 2.0,
            censor_rate: 0.3,
            n_features: 5,
            seed: 0,
        }
    }
}

const BASE_RATE: f64 = 0.1;
const PROXY_SHIFT: f64 = 0.5;
const EFFECT_SCALE: f64 = 1.2;
const DEPRIVED_SIGNAL: f64 = 0.3;
pub(crate) const GROUP_COLUMN: &str = "group";
pub(crate) const DEPRIVED: &str = "deprived";
pub(crate) const FAVORED: &str = "favored";

fn coefficient(j: usize) -> f64 {
    let magnitude = EFFECT_SCALE / (1.0 + 0.5 * j as f64);
    if j.is_multiple_of(2) {
        magnitude
    } else {
        -magnitude
    }
}

/// Censoring rate `μ` at which the expected censored share
/// `mean(μ / (λ_i + μ))` equals `target`, by bisection on `log μ`.
fn censoring_rate(rates: &[f64], target: f64) -> f64 {
    let share = |mu: f64| rates.iter().map(|l| mu / (l + mu)).sum::<f64>() / rates.len() as f64;
    let (mut lo, mut hi) = (-30.0f64, 30.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if share(mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Seeded biased, right-censored dataset. Bit-reproducible for a fixed spec.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SurvivalDataset> {
    if spec.n == 0 {
        return Err(domain("synthetic n must be positive"));
    }
    if !(spec.group_fraction > 0.0 && spec.group_fraction < 1.0) {
        return Err(domain("group_fraction must lie in (0, 1)"));
    }
    if !(spec.hazard_ratio > 0.0 && spec.hazard_ratio.is_finite()) {
        return Err(domain("hazard_ratio must be positive and finite"));
    }
    if !(0.0..1.0).contains(&spec.censor_rate) {
        return Err(domain("censor_rate must lie in [0, 1)"));
    }
    if spec.n_features == 0 {
        return Err(domain("synthetic data needs at least one feature"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::with_capacity(spec.n);
    let biased = spec.hazard_ratio != 1.0;
    for _ in 0..spec.n {
        let deprived = rng.random_bool(spec.group_fraction);
        let mut x: Vec<f64> = (0..spec.n_features)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let distorted = deprived && biased;
        if distorted {
            x[0] += PROXY_SHIFT;
        }
        let eta: f64 = x
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let damp = if distorted && j > 0 { DEPRIVED_SIGNAL } else { 1.0 };
                coefficient(j) * damp * v
            })
            .sum();
        let rate = BASE_RATE * eta.exp() * if deprived { spec.hazard_ratio } else { 1.0 };
        let time = Exp::new(rate).map_err(|e| domain(e.to_string()))?.sample(&mut rng);
        rows.push((deprived, x, rate, time));
    }

    let censor = if spec.censor_rate > 0.0 {
        let rates: Vec<f64> = rows.iter().map(|r| r.2).collect();
        Some(Exp::new(censoring_rate(&rates, spec.censor_rate)).map_err(|e| domain(e.to_string()))?)
    } else {
        None
    };

    let records = rows
        .into_iter()
        .map(|(deprived, x, _, t_event)| {
            let t_censor = censor.map_or(f64::INFINITY, |c| c.sample(&mut rng));
            let label = if deprived { DEPRIVED } else { FAVORED };
            let mut features: Vec<FeatureValue> = x.into_iter().map(FeatureValue::Numeric).collect();
            // labels sort as ["deprived", "favored"]
            features.push(FeatureValue::Category(u32::from(!deprived)));
            SurvivalRecord::new(
                features,
                t_event.min(t_censor),
                t_event <= t_censor,
                SensitiveValue::Label(label.into()),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut meta: Vec<FeatureMeta> = (0..spec.n_features)
        .map(|j| FeatureMeta::numeric(format!("x{}", j + 1)))
        .collect();
    meta.push(FeatureMeta::categorical(
        GROUP_COLUMN,
        vec![DEPRIVED.into(), FAVORED.into()],
    ));
    let mut sensitive = SensitiveMeta::categorical(GROUP_COLUMN);
    sensitive.deprived_value = Some(DEPRIVED.into());
    SurvivalDataset::new(records, meta, sensitive)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let spec = SynthSpec {
            n: 300,
            seed: 11,
            ..Default::default()
        };
        assert_eq!(generate_synthetic(&spec).unwrap(), generate_synthetic(&spec).unwrap());
        let other = SynthSpec { seed: 12, ..spec.clone() };
        assert_ne!(generate_synthetic(&spec).unwrap(), generate_synthetic(&other).unwrap());
    }

    #[test]
    fn unbiased_groups_share_a_distribution() {
        let spec = SynthSpec {
            n: 4000,
            hazard_ratio: 1.0,
            censor_rate: 0.0,
            seed: 3,
            ..Default::default()
        };
        let d = generate_synthetic(&spec).unwrap();
        let mean = |label: &str| {
            let t: Vec<f64> = d
                .records
                .iter()
                .filter(|r| r.group_raw == SensitiveValue::Label(label.into()))
                .map(|r| r.time)
                .collect();
            t.iter().sum::<f64>() / t.len() as f64
        };
        let (a, b) = (mean(DEPRIVED), mean(FAVORED));
        assert!((a / b - 1.0).abs() < 0.15, "{a} vs {b}");
    }

    #[test]
    fn no_censoring_means_all_events() {
        let spec = SynthSpec {
            n: 200,
            censor_rate: 0.0,
            ..Default::default()
        };
        let d = generate_synthetic(&spec).unwrap();
        assert_eq!(d.event_count(), 200);
    }

    #[test]
    fn censoring_share_near_target() {
        let spec = SynthSpec {
            n: 2000,
            hazard_ratio: 2.0,
            censor_rate: 0.3,
            seed: 7,
            ..Default::default()
        };
        let d = generate_synthetic(&spec).unwrap();
        let share = 1.0 - d.event_count() as f64 / d.len() as f64;
        assert!((0.25..=0.35).contains(&share), "{share}");
    }

    #[test]
    fn bisection_hits_target() {
        let rates = [0.1, 0.2, 0.4, 1.0];
        let mu = censoring_rate(&rates, 0.3);
        let share: f64 = rates.iter().map(|l| mu / (l + mu)).sum::<f64>() / 4.0;
        assert!((share - 0.3).abs() < 1e-9);
    }

    #[test]
    fn invalid_specs() {
        for bad in [
            SynthSpec { n: 0, ..Default::default() },
            SynthSpec { group_fraction: 1.0, ..Default::default() },
            SynthSpec { hazard_ratio: 0.0, ..Default::default() },
            SynthSpec { censor_rate: 1.0, ..Default::default() },
        ] {
            assert!(generate_synthetic(&bad).is_err());
        }
    }
}
