//! Sparse strategies from sampled tuples, and empirical checks of the two
//! concentration bounds they rely on.

use std::collections::BTreeMap;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Distribution, EffectOperators};
use crate::gap::BitString;
use crate::linalg::{min_eigen, trace_product, CMatrix, EigenResult};

/// Largest `|Σ^n|^N` a brute-force tuple search may enumerate.
pub const MAX_TUPLE_ENUMERATION: u64 = 1_000_000;

/// Comparisons of sampled statistics against thresholds treat values within
/// this distance of the threshold as on the threshold.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// An ordered tuple `(y₁, …, y_N)` of equal-length strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTuple {
    strings: Vec<BitString>,
}

impl StrategyTuple {
    pub fn new(strings: Vec<BitString>) -> Result<Self> {
        let Some(first) = strings.first() else {
            return Err(Error::input("strategy tuple is empty"));
        };
        if let Some(bad) = strings.iter().find(|s| s.len() != first.len()) {
            return Err(Error::input(format!(
                "tuple mixes {}-bit and {}-bit strings (`{bad}`)",
                first.len(),
                bad.len()
            )));
        }
        Ok(StrategyTuple { strings })
    }

    pub fn strings(&self) -> &[BitString] {
        &self.strings
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn width(&self) -> usize {
        self.strings[0].len()
    }

    /// The concatenation `y₁⋯y_N`.
    pub fn concatenated(&self) -> BitString {
        self.strings
            .iter()
            .fold(BitString::empty(), |acc, s| acc.concat(s))
    }
}

impl Serialize for StrategyTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.strings.iter().map(|y| {
            y.bits()
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        }))
    }
}

/// `q(y) = |{j : y_j = y}| / N`.
pub fn tuple_distribution(t: &StrategyTuple) -> Result<Distribution> {
    if t.is_empty() {
        return Err(Error::input("strategy tuple is empty"));
    }
    let mut counts: BTreeMap<BitString, usize> = BTreeMap::new();
    for y in &t.strings {
        *counts.entry(y.clone()).or_default() += 1;
    }
    let n = t.len() as f64;
    Distribution::new(counts.into_iter().map(|(y, c)| (y, c as f64 / n)).collect())
}

/// `N` independent draws from `p`, deterministic in `seed`.
pub fn sample_tuple(p: &Distribution, n: usize, seed: u64) -> Result<StrategyTuple> {
    sample_with(p, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn sample_with<R: Rng>(p: &Distribution, n: usize, rng: &mut R) -> Result<StrategyTuple> {
    if n == 0 {
        return Err(Error::input("sample count must be positive"));
    }
    let (ys, ws): (Vec<&BitString>, Vec<f64>) = p.iter().unzip();
    let dist = WeightedIndex::new(&ws).map_err(|e| Error::input(e.to_string()))?;
    StrategyTuple::new((0..n).map(|_| ys[dist.sample(rng)].clone()).collect())
}

/// The generator for trial `trial` of an experiment seeded with `seed`:
/// one ChaCha stream per trial, so results do not depend on trial order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn average(s: &EffectOperators, idx: &[usize]) -> CMatrix {
    let mut w = vec![0.0; s.len()];
    for &i in idx {
        w[i] += 1.0;
    }
    let n = idx.len() as f64;
    w.iter_mut().for_each(|x| *x /= n);
    s.weighted(&w)
}

/// `λ_min((S_{y₁} + ⋯ + S_{y_N}) / N)`.
pub fn sparsified_min_eig(s: &EffectOperators, t: &StrategyTuple) -> Result<EigenResult> {
    let idx = t
        .strings
        .iter()
        .map(|y| s.index_of(y))
        .collect::<Result<Vec<_>>>()?;
    min_eigen(&average(s, &idx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub trials: usize,
    /// Tuple length `N` (sparsification) or sequence length `n` (tail bound).
    pub samples: usize,
    pub epsilon: f64,
    /// Conditional-mean bound `γ` of a bounded process.
    pub gamma: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    fn check(&self) -> Result<()> {
        if self.trials == 0 || self.samples == 0 {
            return Err(Error::input("trials and samples must be positive"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::input("epsilon must be positive"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::input("gamma must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// `sqrt(p (1 − p) / trials)` with `p` clamped to `[0, 1]`.
pub fn binomial_std_error(p: f64, trials: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct SparsifyReport {
    pub config: ExperimentConfig,
    pub bob_qubits: usize,
    /// `λ_min(Σ_y p(y) S_y)`.
    pub eta: f64,
    pub failures: usize,
    pub failure_rate: f64,
    /// Tail bound `2^m exp(−2Nε²)`; `2^m exp(−N/72)` at `ε = 1/12`.
    pub analytic_bound: f64,
    /// Failure probability the sampling argument needs to beat.
    pub target: f64,
    pub std_error: f64,
    /// `N ≥ 72(m + 2)`.
    pub precondition_met: bool,
    /// `failure_rate < target + 3·std_error`.
    pub within_target: bool,
    /// `failure_rate ≤ analytic_bound + 3·(std error at the bound)`.
    pub within_analytic_bound: bool,
}

/// Smallest tuple length for which the sparsification bound is claimed.
pub fn required_samples(m: usize) -> usize {
    72 * (m + 2)
}

/// Samples `trials` tuples of length `N` from `p` and counts how often
/// `λ_min` of the tuple average falls below `λ_min(Σ p(y) S_y) − ε`.
pub fn check_aly_lemma(
    s: &EffectOperators,
    p: &Distribution,
    cfg: &ExperimentConfig,
) -> Result<SparsifyReport> {
    cfg.check()?;
    let weights = p.dense(s.width())?;
    let eta = min_eigen(&s.weighted(&weights))?.value;
    let (ys, ws): (Vec<usize>, Vec<f64>) = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(y, w)| (y, *w))
        .unzip();
    let dist = WeightedIndex::new(&ws).map_err(|e| Error::input(e.to_string()))?;
    let threshold = eta - cfg.epsilon;
    let mut failures = 0;
    let mut idx = vec![0usize; cfg.samples];
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        idx.iter_mut().for_each(|i| *i = ys[dist.sample(&mut rng)]);
        if min_eigen(&average(s, &idx))?.value < threshold - THRESHOLD_SLACK {
            failures += 1;
        }
    }
    let m = s.bob();
    let rate = failures as f64 / cfg.trials as f64;
    let bound = (1u64 << m) as f64 * (-2.0 * cfg.samples as f64 * cfg.epsilon * cfg.epsilon).exp();
    let target = 1.0 / 3.0;
    let std_error = binomial_std_error(target, cfg.trials);
    Ok(SparsifyReport {
        config: *cfg,
        bob_qubits: m,
        eta,
        failures,
        failure_rate: rate,
        analytic_bound: bound,
        target,
        std_error,
        precondition_met: cfg.samples >= required_samples(m),
        within_target: rate < target + 3.0 * std_error,
        within_analytic_bound: rate <= bound + 3.0 * binomial_std_error(bound, cfg.trials),
    })
}

/// The tuple of length `N` maximizing [`sparsified_min_eig`], searching
/// multisets in lexicographic order and keeping the first maximizer.
pub fn brute_force_best_tuple(
    s: &EffectOperators,
    n: usize,
) -> Result<(StrategyTuple, EigenResult)> {
    if n == 0 {
        return Err(Error::input("tuple length must be positive"));
    }
    let required = (s.len() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if required > MAX_TUPLE_ENUMERATION {
        return Err(Error::CapExceeded {
            what: "tuple enumeration",
            required,
            cap: MAX_TUPLE_ENUMERATION,
        });
    }
    let mut idx = vec![0usize; n];
    let mut best: Option<(Vec<usize>, EigenResult)> = None;
    loop {
        let e = min_eigen(&average(s, &idx))?;
        if best.as_ref().is_none_or(|(_, b)| e.value > b.value + THRESHOLD_SLACK) {
            best = Some((idx.clone(), e));
        }
        if !next_multiset(&mut idx, s.len()) {
            break;
        }
    }
    let (idx, e) = best.expect("at least one tuple");
    let width = s.width();
    let t = StrategyTuple::new(
        idx.iter()
            .map(|&y| BitString::from_u64(y as u64, width))
            .collect(),
    )?;
    Ok((t, e))
}

/// Advances a nondecreasing index vector over `0..k`.
fn next_multiset(idx: &mut [usize], k: usize) -> bool {
    let Some(pos) = idx.iter().rposition(|&i| i + 1 < k) else {
        return false;
    };
    let v = idx[pos] + 1;
    idx[pos..].iter_mut().for_each(|i| *i = v);
    true
}

/// A `[0, 1]`-valued process whose conditional mean given the past is at
/// most `gamma()`.
#[derive(Debug, Clone)]
pub enum BoundedProcess {
    /// Independent Bernoulli(γ) variables.
    Iid { gamma: f64 },
    /// After a 1, the next value is Bernoulli(γ); after anything else it is
    /// uniform on `[0, 2γ]` (or Bernoulli(γ) when `γ > 1/2`). Every
    /// conditional mean is exactly γ.
    Markov { gamma: f64 },
    /// `Z_j = Tr(S_{y_j} σ)` for a fixed Bob strategy `σ`, with `values[y]`
    /// holding `Tr(S_y σ)`. Alice draws `y_j` from `weights`, except that
    /// after a value below the mean she plays the best reply to `σ`. The
    /// bound is `max_y Tr(S_y σ)`.
    Referee { values: Vec<f64>, weights: Vec<f64> },
}

impl BoundedProcess {
    pub fn label(&self) -> &'static str {
        match self {
            BoundedProcess::Iid { .. } => "iid",
            BoundedProcess::Markov { .. } => "markov",
            BoundedProcess::Referee { .. } => "referee",
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            BoundedProcess::Iid { gamma } | BoundedProcess::Markov { gamma } => *gamma,
            BoundedProcess::Referee { values, .. } => {
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            BoundedProcess::Iid { gamma } | BoundedProcess::Markov { gamma } => {
                if !(0.0..=1.0).contains(gamma) {
                    return Err(Error::input("gamma must lie in [0, 1]"));
                }
            }
            BoundedProcess::Referee { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return Err(Error::dims("referee process needs one weight per value"));
                }
                if values.iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
                    return Err(Error::input("referee process values must lie in [0, 1]"));
                }
                if !(weights.iter().all(|w| *w >= 0.0) && weights.iter().sum::<f64>() > 0.0) {
                    return Err(Error::input("referee process weights are not a distribution"));
                }
            }
        }
        Ok(())
    }

    /// Mean of one sample path of length `n`.
    fn path_mean<R: Rng>(&self, n: usize, rng: &mut R, pick: Option<&WeightedIndex<f64>>) -> f64 {
        let mut sum = 0.0;
        match self {
            BoundedProcess::Iid { gamma } => {
                for _ in 0..n {
                    sum += (rng.gen::<f64>() < *gamma) as u8 as f64;
                }
            }
            BoundedProcess::Markov { gamma } => {
                let mut prev = 1.0;
                for _ in 0..n {
                    let x = if prev == 1.0 || *gamma > 0.5 {
                        (rng.gen::<f64>() < *gamma) as u8 as f64
                    } else {
                        rng.gen::<f64>() * 2.0 * gamma
                    };
                    sum += x;
                    prev = x;
                }
            }
            BoundedProcess::Referee { values, weights } => {
                let pick = pick.expect("referee process has a sampler");
                let best = values
                    .iter()
                    .enumerate()
                    .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
                let mean: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>()
                    / weights.iter().sum::<f64>();
                let mut low = false;
                for _ in 0..n {
                    let y = if low { best } else { pick.sample(rng) };
                    let x = values[y].clamp(0.0, 1.0);
                    sum += x;
                    low = x < mean;
                }
            }
        }
        sum / n as f64
    }
}

/// The referee-induced process for Alice's distribution `p` against Bob's
/// fixed strategy `sigma`.
pub fn referee_process(s: &EffectOperators, p: &Distribution, sigma: &CMatrix) -> Result<BoundedProcess> {
    let values = s.floats().iter().map(|sy| trace_product(sy, sigma)).collect();
    Ok(BoundedProcess::Referee {
        values,
        weights: p.dense(s.width())?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub process: &'static str,
    pub config: ExperimentConfig,
    /// The conditional-mean bound actually used.
    pub gamma: f64,
    pub hits: usize,
    /// Fraction of paths with mean at least `γ + ε`.
    pub empirical: f64,
    /// `exp(−2nε²)`.
    pub bound: f64,
    /// Standard error of a binomial proportion at the bound.
    pub std_error: f64,
    /// Exact tail for the i.i.d. Bernoulli process.
    pub exact_tail: Option<f64>,
    pub within_bound: bool,
}

/// Estimates `Pr[(X₁ + ⋯ + X_n)/n ≥ γ + ε]` over `cfg.trials` paths
/// (`n = cfg.samples`) and compares it with `exp(−2nε²)`.
pub fn check_dependent_hoeffding(
    process: &BoundedProcess,
    cfg: &ExperimentConfig,
) -> Result<TailReport> {
    cfg.check()?;
    process.check()?;
    let gamma = process.gamma();
    let pick = match process {
        BoundedProcess::Referee { weights, .. } => {
            Some(WeightedIndex::new(weights).map_err(|e| Error::input(e.to_string()))?)
        }
        _ => None,
    };
    let n = cfg.samples;
    let level = gamma + cfg.epsilon;
    let mut hits = 0;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        if process.path_mean(n, &mut rng, pick.as_ref()) >= level - THRESHOLD_SLACK {
            hits += 1;
        }
    }
    let empirical = hits as f64 / cfg.trials as f64;
    let bound = (-2.0 * n as f64 * cfg.epsilon * cfg.epsilon).exp();
    let std_error = binomial_std_error(bound, cfg.trials);
    let exact_tail = match process {
        BoundedProcess::Iid { gamma } => {
            let k = ((n as f64 * level) - 1e-9).ceil().max(0.0) as u64;
            Some(binomial_upper_tail(n as u64, *gamma, k))
        }
        _ => None,
    };
    Ok(TailReport {
        process: process.label(),
        config: *cfg,
        gamma,
        hits,
        empirical,
        bound,
        std_error,
        exact_tail,
        within_bound: empirical <= bound + 3.0 * std_error,
    })
}

/// `Pr[Bin(n, p) ≥ k]`, summed in log space.
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    (k..=n)
        .map(|j| {
            let (j, nn) = (j as usize, n as usize);
            (ln_fact[nn] - ln_fact[j] - ln_fact[nn - j]
                + j as f64 * p.ln()
                + (nn - j) as f64 * (1.0 - p).ln())
            .exp()
        })
        .sum::<f64>()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multisets_in_order() {
        let mut idx = vec![0, 0];
        let mut seen = vec![idx.clone()];
        while next_multiset(&mut idx, 3) {
            seen.push(idx.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]
        );
    }

    #[test]
    fn binomial_tail_small_cases() {
        assert!((binomial_upper_tail(2, 0.5, 1) - 0.75).abs() < 1e-15);
        assert!((binomial_upper_tail(3, 0.5, 3) - 0.125).abs() < 1e-15);
        assert_eq!(binomial_upper_tail(3, 0.5, 4), 0.0);
    }

    #[test]
    fn empty_tuple_rejected() {
        assert!(StrategyTuple::new(vec![]).is_err());
    }
}
