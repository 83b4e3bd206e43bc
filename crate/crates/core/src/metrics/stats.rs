use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use super::{record_scores, MetricsError, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
    pub level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            seed: 42,
            level: 0.95,
        }
    }
}

/// Percentile bootstrap interval for the mean. Resampling uses ChaCha8
/// seeded from `cfg.seed`, so a given input always gives the same interval.
pub fn bootstrap_ci(samples: &[f64], cfg: &BootstrapConfig) -> Result<(f64, f64), MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    if cfg.resamples == 0 {
        return Err(MetricsError::InvalidParameter("resamples must be positive".into()));
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(MetricsError::InvalidParameter(format!(
            "level {} is outside (0, 1)",
            cfg.level
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = samples.len();
    let mut means: Vec<f64> = (0..cfg.resamples)
        .map(|_| (0..n).map(|_| samples[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - cfg.level) / 2.0;
    Ok((quantile(&means, tail), quantile(&means, 1.0 - tail)))
}

/// Linear interpolation between order statistics (the common "type 7" rule).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Exact two-sided McNemar test on the discordant counts: `b` pairs only A
/// got right, `c` pairs only B got right.
pub fn mcnemar(b: u64, c: u64) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let k = b.min(c);
    let binom = Binomial::new(0.5, n).expect("p = 0.5 is valid");
    (2.0 * binom.cdf(k)).min(1.0)
}

/// Pairs the two conditions' records by `(task_id, seed)` and counts
/// discordant pairs. A record is correct when both the tool set and every
/// parameter pair match. Returns `(only_a, only_b, pairs)`.
pub fn paired_discordance(t: &Transcript, a: &str, b: &str) -> Result<(u64, u64, usize), MetricsError> {
    let exact = |cond: &str| -> Result<HashMap<(String, u64), bool>, MetricsError> {
        let m: HashMap<_, _> = record_scores(t, cond)
            .map(|(r, s)| {
                (
                    (r.task_id.clone(), r.seed),
                    s.tool_correct && s.false_positives == 0 && s.false_negatives == 0,
                )
            })
            .collect();
        if m.is_empty() {
            return Err(MetricsError::UnknownCondition(cond.to_string()));
        }
        Ok(m)
    };
    let (ra, rb) = (exact(a)?, exact(b)?);
    let (mut only_a, mut only_b, mut pairs) = (0, 0, 0);
    for (key, &ok_a) in &ra {
        if let Some(&ok_b) = rb.get(key) {
            pairs += 1;
            match (ok_a, ok_b) {
                (true, false) => only_a += 1,
                (false, true) => only_b += 1,
                _ => {}
            }
        }
    }
    Ok((only_a, only_b, pairs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolmResult {
    pub adjusted: f64,
    pub significant: bool,
}

/// Holm's step-down adjustment, results in input order. Adjusted values
/// are made monotone in the sorted order and capped at 1; a hypothesis is
/// significant when its adjusted p is at most `alpha`.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Result<Vec<HolmResult>, MetricsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(MetricsError::InvalidParameter(format!(
            "alpha {alpha} is outside (0, 1)"
        )));
    }
    for (index, &value) in p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(MetricsError::OutOfRangeP { index, value });
        }
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]));
    let mut out = vec![
        HolmResult {
            adjusted: 1.0,
            significant: false
        };
        m
    ];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max(((m - rank) as f64 * p_values[i]).min(1.0));
        out[i] = HolmResult {
            adjusted: running,
            significant: running <= alpha,
        };
    }
    Ok(out)
}
