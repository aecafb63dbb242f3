//! Experiment harness: metrics, repeated seeded trials, lag sweeps, factor
//! ablation and hidden-layer sizing.
//!
//! Work is fanned out through an [`Executor`], so callers choose between
//! [`Sequential`] execution and a thread pool. Results are always assembled
//! in grid and seed order, whatever order the trials complete in.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use serde::{Deserialize, Serialize};

use crate::aggregate::{Scale, ScaleDataset};
use crate::features::{
    build_design_matrix, fit_normalizer, split, split_indices, FeatureSpec, NormParams, SplitSpec,
};
use crate::nn::{self, Topology, TrainConfig, TrainReport};
use crate::{Error, Result};

/// Guard against division by near-zero consumption, in kWh.
pub const ACCURACY_EPSILON: f64 = 1e-6;

/// Default number of seeded trials averaged per experiment cell.
pub const DEFAULT_REPEATS: usize = 10;

/// Runs independent jobs and returns their results in input order.
pub trait Executor {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send;
}

/// Runs every job on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        items.into_iter().map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub accuracy_pct: f64,
    pub mse_kwh2: f64,
    pub mse_norm: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy_pct: f64,
    pub mse_kwh2: f64,
    pub mse_norm: f64,
}

/// `accuracy_pct = 100 · mean(max(0, 1 − |ŷ−y| / max(|y|, ε)))`; both MSEs
/// are plain means of squared errors. The returned seed is 0.
pub fn compute_metrics(
    pred_kwh: &[f64],
    actual_kwh: &[f64],
    pred_norm: &[f64],
    actual_norm: &[f64],
) -> Result<TrialMetrics> {
    for len in [actual_kwh.len(), pred_norm.len(), actual_norm.len()] {
        if len != pred_kwh.len() {
            return Err(Error::LengthMismatch {
                left: pred_kwh.len(),
                right: len,
            });
        }
    }
    if pred_kwh.is_empty() {
        return Err(Error::EmptyInput("metrics of zero samples"));
    }
    let score: f64 = pred_kwh
        .iter()
        .zip(actual_kwh)
        .map(|(p, a)| (1.0 - (p - a).abs() / a.abs().max(ACCURACY_EPSILON)).max(0.0))
        .sum();
    Ok(TrialMetrics {
        accuracy_pct: 100.0 * score / pred_kwh.len() as f64,
        mse_kwh2: nn::mse_loss(pred_kwh, actual_kwh)?,
        mse_norm: nn::mse_loss(pred_norm, actual_norm)?,
        seed: 0,
    })
}

pub fn mean_metrics(trials: &[TrialMetrics]) -> Result<MeanMetrics> {
    if trials.is_empty() {
        return Err(Error::EmptyInput("mean of zero trials"));
    }
    let n = trials.len() as f64;
    Ok(MeanMetrics {
        accuracy_pct: trials.iter().map(|t| t.accuracy_pct).sum::<f64>() / n,
        mse_kwh2: trials.iter().map(|t| t.mse_kwh2).sum::<f64>() / n,
        mse_norm: trials.iter().map(|t| t.mse_norm).sum::<f64>() / n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub features: FeatureSpec,
    pub topology: Topology,
    /// `train.seed` is the first trial seed.
    pub train: TrainConfig,
    pub split: SplitSpec,
    pub repeat_count: usize,
}

impl ExperimentPlan {
    /// Plan whose input layer matches the feature width.
    pub fn new(
        features: FeatureSpec,
        n_hidden: usize,
        train: TrainConfig,
        split: SplitSpec,
    ) -> Result<Self> {
        let topology = Topology::new(features.width()?, n_hidden)?;
        Ok(Self {
            features,
            topology,
            train,
            split,
            repeat_count: DEFAULT_REPEATS,
        })
    }

    pub fn with_features(&self, features: FeatureSpec) -> Result<Self> {
        let topology = self.topology.with_inputs(features.width()?)?;
        Ok(Self {
            features,
            topology,
            ..self.clone()
        })
    }

    pub fn with_hidden(&self, n_hidden: usize) -> Result<Self> {
        Ok(Self {
            topology: self.topology.with_hidden(n_hidden)?,
            ..self.clone()
        })
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        let first = self.train.seed;
        (0..self.repeat_count as u64).map(move |k| first.wrapping_add(k))
    }

    fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.split.validate()?;
        if self.repeat_count == 0 {
            return Err(Error::InvalidConfig(
                "repeat_count must be at least 1".into(),
            ));
        }
        let width = self.features.width()?;
        if width != self.topology.n_in() {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: self.topology.n_in(),
            });
        }
        Ok(())
    }
}

/// A trained network together with everything needed to apply it to raw
/// rows, and its test-set metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub features: FeatureSpec,
    pub norm: NormParams,
    pub report: TrainReport,
    pub metrics: TrialMetrics,
}

/// Design matrix, split, normalization, training and test-set evaluation.
/// `seed` drives both the validation draw and the weight initialization.
pub fn fit_model(plan: &ExperimentPlan, dataset: &ScaleDataset, seed: u64) -> Result<FittedModel> {
    plan.validate()?;
    let matrix = build_design_matrix(dataset, &plan.features)?;
    let (train_set, val_set, test_set) = split(&matrix, &plan.split.with_seed(seed))?;

    let norm = fit_normalizer(&train_set.x, &train_set.y)?;
    let (train_x, train_y) = norm.apply(&train_set.x, &train_set.y)?;
    let (val_x, val_y) = norm.apply(&val_set.x, &val_set.y)?;
    let (test_x, test_y) = norm.apply(&test_set.x, &test_set.y)?;

    let config = TrainConfig { seed, ..plan.train };
    let report = nn::train(
        nn::Samples::new(&train_x, &train_y)?,
        nn::Samples::new(&val_x, &val_y)?,
        plan.topology,
        &config,
    )?;

    let pred_norm = nn::predict(&report.final_params, &test_x)?;
    let pred_kwh = norm.invert_target(&pred_norm);
    let metrics = compute_metrics(&pred_kwh, &test_set.y, &pred_norm, &test_y)?;
    Ok(FittedModel {
        features: plan.features.clone(),
        norm,
        report,
        metrics: TrialMetrics { seed, ..metrics },
    })
}

/// One complete trial; see [`fit_model`].
pub fn run_trial(plan: &ExperimentPlan, dataset: &ScaleDataset, seed: u64) -> Result<TrialMetrics> {
    fit_model(plan, dataset, seed).map(|m| m.metrics)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedResult {
    pub mean: MeanMetrics,
    pub trials: Vec<TrialMetrics>,
}

impl RepeatedResult {
    fn from_trials(trials: Vec<TrialMetrics>) -> Result<Self> {
        Ok(Self {
            mean: mean_metrics(&trials)?,
            trials,
        })
    }
}

/// Runs every `(plan, seed)` pair of every plan and groups results per plan.
fn run_plans<E: Executor>(
    plans: &[ExperimentPlan],
    dataset: &ScaleDataset,
    exec: &E,
) -> Result<Vec<RepeatedResult>> {
    for p in plans {
        p.validate()?;
    }
    let jobs: Vec<(usize, u64)> = plans
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.seeds().map(move |s| (i, s)))
        .collect();
    let outcomes = exec.map(jobs, |(i, seed)| run_trial(&plans[i], dataset, seed));

    let mut outcomes = outcomes.into_iter();
    plans
        .iter()
        .map(|p| {
            let trials = outcomes
                .by_ref()
                .take(p.repeat_count)
                .collect::<Result<Vec<_>>>()?;
            RepeatedResult::from_trials(trials)
        })
        .collect()
}

/// `repeat_count` trials with seeds `seed, seed+1, …`, averaged.
pub fn run_repeated<E: Executor>(
    plan: &ExperimentPlan,
    dataset: &ScaleDataset,
    exec: &E,
) -> Result<RepeatedResult> {
    Ok(run_plans(core::slice::from_ref(plan), dataset, exec)?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lag_count: usize,
    pub include_context: bool,
    pub result: RepeatedResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scale: Scale,
    /// Context-on cells over the full grid, then context-off cells over the
    /// grid without 0.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, lag_count: usize, include_context: bool) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.lag_count == lag_count && c.include_context == include_context)
    }
}

/// Lag/context grid of the sweep for `scale`.
pub fn sweep_grid(scale: Scale) -> Vec<(usize, bool)> {
    let grid = scale.lag_grid();
    grid.iter()
        .map(|&l| (l, true))
        .chain(grid.iter().filter(|&&l| l > 0).map(|&l| (l, false)))
        .collect()
}

/// Runs [`run_repeated`] over the scale's lag grid with and without context
/// factors. The input layer is resized for each cell.
pub fn lag_sweep<E: Executor>(
    dataset: &ScaleDataset,
    base_plan: &ExperimentPlan,
    exec: &E,
) -> Result<SweepResult> {
    let scale = dataset.scale();
    let grid = sweep_grid(scale);
    let plans = grid
        .iter()
        .map(|&(lag_count, include_context)| {
            base_plan.with_features(FeatureSpec {
                scale,
                lag_count,
                include_context,
                factor_mask: base_plan.features.factor_mask.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for &(lag_count, _) in &grid {
        if dataset.len() <= lag_count {
            return Err(Error::InsufficientHistory {
                rows: dataset.len(),
                lags: lag_count,
            });
        }
    }
    let results = run_plans(&plans, dataset, exec)?;
    let cells = grid
        .into_iter()
        .zip(results)
        .map(|((lag_count, include_context), result)| SweepCell {
            lag_count,
            include_context,
            result,
        })
        .collect();
    Ok(SweepResult { scale, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationEntry {
    pub dropped: String,
    pub result: RepeatedResult,
    /// Mean accuracy minus the baseline mean accuracy, in percentage points.
    pub accuracy_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationResult {
    pub scale: Scale,
    pub lag_count: usize,
    pub baseline: RepeatedResult,
    pub drops: Vec<AblationEntry>,
}

impl AblationResult {
    pub fn entry(&self, factor: &str) -> Option<&AblationEntry> {
        self.drops.iter().find(|e| e.dropped == factor)
    }
}

/// Full-context baseline plus one run per context column with that column
/// removed. All runs share the baseline's seed sequence.
pub fn factor_ablation<E: Executor>(
    dataset: &ScaleDataset,
    base_plan: &ExperimentPlan,
    exec: &E,
) -> Result<AblationResult> {
    if !base_plan.features.include_context {
        return Err(Error::InvalidConfig(
            "factor ablation needs context factors enabled".into(),
        ));
    }
    let scale = dataset.scale();
    let full = FeatureSpec {
        scale,
        factor_mask: None,
        ..base_plan.features.clone()
    };
    let mut plans = vec![base_plan.with_features(full.clone())?];
    for factor in scale.context_columns() {
        plans.push(base_plan.with_features(full.without(factor)?)?);
    }
    let mut results = run_plans(&plans, dataset, exec)?.into_iter();
    let baseline = results.next().unwrap();
    let drops = scale
        .context_columns()
        .iter()
        .zip(results)
        .map(|(factor, result)| AblationEntry {
            dropped: String::from(*factor),
            accuracy_delta: result.mean.accuracy_pct - baseline.mean.accuracy_pct,
            result,
        })
        .collect();
    Ok(AblationResult {
        scale,
        lag_count: full.lag_count,
        baseline,
        drops,
    })
}

/// Hidden-layer sizes suggested by the four empirical rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaCandidates {
    /// Smallest `m` with `Σ_{i=0..n_in} C(m, i) > k_samples`.
    pub binomial_min: usize,
    /// `round(√(n_in+n_out) + a)` for `a = 1` and `a = 10`.
    pub sqrt_range: (usize, usize),
    /// `round(log₂ n_in)`, clamped to at least 1.
    pub log2: usize,
    /// Set when `round(log₂ n_in)` was 0 before clamping.
    pub log2_degenerate: bool,
    /// `2·n_in + 1`.
    pub double_plus_one: usize,
}

fn round_half_up(x: f64) -> usize {
    libm::floor(x + 0.5) as usize
}

/// `Σ_{i=0..=n} C(m, i)`, saturating.
pub fn binomial_prefix_sum(m: usize, n: usize) -> u128 {
    let mut term: u128 = 1;
    let mut sum: u128 = 1;
    for i in 1..=n.min(m) {
        // C(m, i) = C(m, i-1) · (m-i+1) / i, exact at every step
        term = match term.checked_mul((m - i + 1) as u128) {
            Some(t) => t / i as u128,
            None => return u128::MAX,
        };
        sum = sum.saturating_add(term);
    }
    sum
}

pub fn hidden_formula_candidates(n_in: usize, n_out: usize, k_samples: usize) -> FormulaCandidates {
    let mut m = 1;
    while binomial_prefix_sum(m, n_in) <= k_samples as u128 {
        m += 1;
    }
    let root = libm::sqrt((n_in + n_out) as f64);
    let log2 = round_half_up(libm::log2(n_in.max(1) as f64));
    if log2 == 0 {
        log::warn!("log2 rule gives 0 hidden nodes for {n_in} input(s); using 1");
    }
    FormulaCandidates {
        binomial_min: m,
        sqrt_range: (round_half_up(root + 1.0), round_half_up(root + 10.0)),
        log2: log2.max(1),
        log2_degenerate: log2 == 0,
        double_plus_one: 2 * n_in + 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapacityViolation {
    /// Hidden nodes must be fewer than `n_train − 1`.
    TooManyHiddenNodes { n_hidden: usize, limit: usize },
    /// Training samples must outnumber the weights and biases.
    TooManyParameters { parameters: usize, n_train: usize },
}

pub fn check_capacity(topology: &Topology, n_train: usize) -> Vec<CapacityViolation> {
    let mut out = Vec::new();
    let limit = n_train.saturating_sub(1);
    if topology.n_hidden() >= limit {
        out.push(CapacityViolation::TooManyHiddenNodes {
            n_hidden: topology.n_hidden(),
            limit,
        });
    }
    let parameters = topology.parameter_count();
    if parameters >= n_train {
        out.push(CapacityViolation::TooManyParameters {
            parameters,
            n_train,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenTrial {
    pub n_hidden: usize,
    pub result: RepeatedResult,
    pub violations: Vec<CapacityViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenSearchResult {
    pub formula_candidates: FormulaCandidates,
    pub n_train: usize,
    pub tried: Vec<HiddenTrial>,
    pub best_by_mse: usize,
    /// Candidates that broke a capacity condition, with the conditions broken.
    pub capacity_violations: Vec<(usize, Vec<CapacityViolation>)>,
}

/// Candidate with the lowest mean kWh² MSE; ties go to fewer hidden nodes.
pub fn best_by_mse(tried: &[HiddenTrial]) -> Option<usize> {
    tried
        .iter()
        .min_by(|a, b| {
            a.result
                .mean
                .mse_kwh2
                .total_cmp(&b.result.mean.mse_kwh2)
                .then(a.n_hidden.cmp(&b.n_hidden))
        })
        .map(|t| t.n_hidden)
}

/// Trial-and-error search over hidden-layer sizes. Candidates breaking a
/// capacity condition are still run, with a warning.
pub fn hidden_layer_search<E: Executor>(
    plan: &ExperimentPlan,
    dataset: &ScaleDataset,
    candidates: &[usize],
    exec: &E,
) -> Result<HiddenSearchResult> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("hidden-layer candidates"));
    }
    let matrix_rows = build_design_matrix(dataset, &plan.features)?.len();
    let n_train = split_indices(matrix_rows, &plan.split)?.train.len();

    let plans = candidates
        .iter()
        .map(|&h| plan.with_hidden(h))
        .collect::<Result<Vec<_>>>()?;
    let results = run_plans(&plans, dataset, exec)?;

    let mut tried = Vec::with_capacity(plans.len());
    let mut capacity_violations = Vec::new();
    for (p, result) in plans.iter().zip(results) {
        let violations = check_capacity(&p.topology, n_train);
        if !violations.is_empty() {
            log::warn!(
                "topology {} breaks capacity conditions: {violations:?}",
                p.topology
            );
            capacity_violations.push((p.topology.n_hidden(), violations.clone()));
        }
        tried.push(HiddenTrial {
            n_hidden: p.topology.n_hidden(),
            result,
            violations,
        });
    }
    let best = best_by_mse(&tried).expect("candidates are nonempty");
    Ok(HiddenSearchResult {
        formula_candidates: hidden_formula_candidates(
            plan.topology.n_in(),
            plan.topology.n_out(),
            n_train,
        ),
        n_train,
        tried,
        best_by_mse: best,
        capacity_violations,
    })
}

/// Parses a candidate list such as `4,8,15..17`.
pub fn parse_candidates(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidConfig(format!("bad hidden-node candidates `{text}`"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n_hidden: usize, mse: f64) -> HiddenTrial {
        let m = TrialMetrics {
            accuracy_pct: 90.0,
            mse_kwh2: mse,
            mse_norm: mse,
            seed: 0,
        };
        HiddenTrial {
            n_hidden,
            result: RepeatedResult::from_trials(vec![m]).unwrap(),
            violations: vec![],
        }
    }

    #[test]
    fn metric_examples() {
        let m = compute_metrics(&[1.0, 2.0], &[1.0, 2.0], &[0.1, 0.2], &[0.1, 0.2]).unwrap();
        assert_eq!((m.accuracy_pct, m.mse_kwh2, m.mse_norm), (100.0, 0.0, 0.0));
        let m = compute_metrics(&[1.1], &[1.0], &[0.0], &[0.0]).unwrap();
        assert!((m.accuracy_pct - 90.0).abs() < 1e-9);
        assert!((m.mse_kwh2 - 0.01).abs() < 1e-12);
        let m = compute_metrics(&[3.0], &[1.0], &[0.0], &[0.0]).unwrap();
        assert_eq!(m.accuracy_pct, 0.0);
        assert!(compute_metrics(&[1.0], &[1.0, 2.0], &[0.0], &[0.0]).is_err());
        assert!(compute_metrics(&[], &[], &[], &[]).is_err());
    }

    #[test]
    fn zero_actual_uses_epsilon_guard() {
        let m = compute_metrics(&[0.0], &[0.0], &[0.0], &[0.0]).unwrap();
        assert_eq!(m.accuracy_pct, 100.0);
        let m = compute_metrics(&[0.5], &[0.0], &[0.0], &[0.0]).unwrap();
        assert_eq!(m.accuracy_pct, 0.0);
    }

    #[test]
    fn paper_formula_values() {
        let c = hidden_formula_candidates(15, 1, 730);
        assert_eq!(c.sqrt_range, (5, 14));
        assert_eq!(c.log2, 4);
        assert_eq!(c.double_plus_one, 31);
        assert_eq!(c.binomial_min, 10);
        assert!(!c.log2_degenerate);
    }

    #[test]
    fn degenerate_log2() {
        let c = hidden_formula_candidates(1, 1, 10);
        assert!(c.log2_degenerate);
        assert_eq!(c.log2, 1);
        // 1 + m > 10
        assert_eq!(c.binomial_min, 10);
    }

    #[test]
    fn binomial_sums() {
        assert_eq!(binomial_prefix_sum(10, 15), 1024);
        assert_eq!(binomial_prefix_sum(5, 2), 1 + 5 + 10);
        assert_eq!(binomial_prefix_sum(0, 3), 1);
    }

    #[test]
    fn capacity_examples() {
        let t = Topology::new(15, 15).unwrap();
        assert!(check_capacity(&t, 511).is_empty());
        let t = Topology::new(15, 600).unwrap();
        assert_eq!(check_capacity(&t, 511).len(), 2);
        let t = Topology::new(1, 9).unwrap();
        assert_eq!(
            check_capacity(&t, 10),
            vec![
                CapacityViolation::TooManyHiddenNodes {
                    n_hidden: 9,
                    limit: 9
                },
                CapacityViolation::TooManyParameters {
                    parameters: 28,
                    n_train: 10
                },
            ]
        );
    }

    #[test]
    fn best_prefers_fewer_nodes_on_ties() {
        assert_eq!(
            best_by_mse(&[trial(16, 1.0), trial(15, 1.0), trial(20, 2.0)]),
            Some(15)
        );
        assert_eq!(best_by_mse(&[trial(16, 0.5), trial(15, 1.0)]), Some(16));
        assert_eq!(best_by_mse(&[]), None);
    }

    #[test]
    fn sweep_grids() {
        assert_eq!(sweep_grid(Scale::Hourly).iter().filter(|c| c.1).count(), 7);
        assert_eq!(sweep_grid(Scale::Hourly).iter().filter(|c| !c.1).count(), 6);
        assert_eq!(Scale::Weekly.lag_grid(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(Scale::Daily.lag_grid(), &[0, 1, 3, 5, 7, 9, 11, 13]);
        assert_eq!(Scale::Monthly.lag_grid(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn candidate_parsing() {
        assert_eq!(
            parse_candidates("4, 8,15..17").unwrap(),
            vec![4, 8, 15, 16, 17]
        );
        assert_eq!(parse_candidates("3..=4").unwrap(), vec![3, 4]);
        assert!(parse_candidates("").is_err());
        assert!(parse_candidates("5..2").is_err());
        assert!(parse_candidates("0").is_err());
    }

    #[test]
    fn mean_of_trials() {
        let t = |a, m| TrialMetrics {
            accuracy_pct: a,
            mse_kwh2: m,
            mse_norm: m / 4.0,
            seed: 0,
        };
        let mean = mean_metrics(&[t(90.0, 2.0), t(80.0, 4.0)]).unwrap();
        assert_eq!(
            mean,
            MeanMetrics {
                accuracy_pct: 85.0,
                mse_kwh2: 3.0,
                mse_norm: 0.75
            }
        );
        assert!(mean_metrics(&[]).is_err());
    }
}
