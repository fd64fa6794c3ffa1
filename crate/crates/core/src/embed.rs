//! Embedding losses and their optimizer.
//!
//! Two losses measure how well `n` free points `Y` on a manifold represent a
//! target:
//!
//! - stress against a distance matrix `D`:
//!   `(1/n^2) sum_i sum_j (D_ij - rho(y_i, y_j))^2`
//! - KL against a row-stochastic similarity matrix `P`:
//!   `(1/n) sum_i sum_{j != i} P_ij log(P_ij / q_ij)` where `q_i.` is the
//!   softmax of `-rho(y_i, y_j)^2` over `j != i`.
//!
//! Both are minimized by mini-batch SGD with momentum. A batch is a set of rows
//! `i`; its loss keeps every `j` term of those rows and the full-data
//! normalization, so the batch gradients of one epoch add up to the full
//! gradient.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::graphs::{DistanceMatrix, SimilarityMatrix};
use crate::manifolds::ManifoldKind;
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Learning rates are drawn log-uniformly from this interval.
pub const LEARNING_RATE_RANGE: (f64, f64) = (5e-4, 5.0);
/// Candidate mini-batch sizes.
pub const BATCH_SIZES: [usize; 3] = [16, 32, 48];
pub const DEFAULT_MOMENTUM: f64 = 0.9;
pub const DEFAULT_MAX_EPOCHS: usize = 3000;
pub const DEFAULT_PATIENCE: usize = 100;
pub const DEFAULT_MIN_REL_IMPROVEMENT: f64 = 1e-4;
pub const DEFAULT_TRIALS: usize = 30;
/// Losses above this abort the run as diverged.
pub const DIVERGENCE_LOSS: f64 = 1e12;

/// What the embedding should reproduce.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Distance(DistanceMatrix),
    Similarity(SimilarityMatrix),
}

impl Target {
    pub fn n(&self) -> usize {
        match self {
            Target::Distance(d) => d.n(),
            Target::Similarity(p) => p.n(),
        }
    }
}

/// An `n x d` row-major matrix of free parameters, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Coordinates {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Coordinates {
    pub fn zeros(n: usize, d: usize) -> Self {
        Coordinates {
            n,
            d,
            data: vec![0.0; n * d],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(Error::ShapeMismatch("empty coordinate matrix".into()));
        }
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "ragged coordinates: {} vs {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Coordinates::from_flat(n, d, data)
    }

    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * d {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {n} x {d} coordinates",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Coordinates { n, d, data })
    }

    /// i.i.d. `N(0, scale^2)` entries.
    pub fn gaussian<R: Rng + ?Sized>(n: usize, d: usize, scale: f64, rng: &mut R) -> Self {
        let data = (0..n * d)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Coordinates { n, d, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Disjoint mutable rows `i != j` of a row-major buffer.
fn two_rows_mut(buf: &mut [f64], d: usize, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert_ne!(i, j);
    if i < j {
        let (a, b) = buf.split_at_mut(j * d);
        (&mut a[i * d..(i + 1) * d], &mut b[..d])
    } else {
        let (a, b) = buf.split_at_mut(i * d);
        (&mut b[..d], &mut a[j * d..(j + 1) * d])
    }
}

fn check_shapes(n: usize, y: &Coordinates) -> Result<()> {
    if y.n != n {
        return Err(Error::ShapeMismatch(format!(
            "target has {n} points, coordinates have {}",
            y.n
        )));
    }
    Ok(())
}

pub fn stress_loss(target: &DistanceMatrix, y: &Coordinates, kind: ManifoldKind) -> Result<f64> {
    check_shapes(target.n(), y)?;
    let n = y.n;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let r = target.get(i, j) - kind.distance(y.row(i), y.row(j));
                sum += r * r;
            }
        }
    }
    Ok(sum / (n * n) as f64)
}

/// `log q_ij` for `j != i` (entry `i` is left at `-inf`), and the distances.
fn log_q_row(y: &Coordinates, kind: ManifoldKind, i: usize, rho: &mut [f64], log_q: &mut [f64]) {
    let n = y.n;
    let mut max = f64::NEG_INFINITY;
    for j in 0..n {
        if j == i {
            rho[j] = 0.0;
            log_q[j] = f64::NEG_INFINITY;
            continue;
        }
        let r = kind.distance(y.row(i), y.row(j));
        rho[j] = r;
        log_q[j] = -r * r;
        max = max.max(log_q[j]);
    }
    let lse = max
        + log_q
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| (s - max).exp())
            .sum::<f64>()
            .ln();
    for (j, s) in log_q.iter_mut().enumerate() {
        if j != i {
            *s -= lse;
        }
    }
}

/// `log q` below this means `q` underflows to zero in double precision.
const LOG_MIN_POSITIVE: f64 = -708.0;

fn kl_row_loss(p: &SimilarityMatrix, i: usize, log_q: &[f64]) -> Result<f64> {
    let mut loss = 0.0;
    for (j, &lq) in log_q.iter().enumerate() {
        let pij = p.get(i, j);
        if j == i || pij == 0.0 {
            continue;
        }
        if lq.is_nan() || lq <= LOG_MIN_POSITIVE {
            return Err(Error::KlOverflow { i, j });
        }
        loss += pij * (pij.ln() - lq);
    }
    Ok(loss)
}

pub fn kl_loss(target: &SimilarityMatrix, y: &Coordinates, kind: ManifoldKind) -> Result<f64> {
    check_shapes(target.n(), y)?;
    let n = y.n;
    let mut rho = vec![0.0; n];
    let mut log_q = vec![0.0; n];
    let mut sum = 0.0;
    for i in 0..n {
        log_q_row(y, kind, i, &mut rho, &mut log_q);
        sum += kl_row_loss(target, i, &log_q)?;
    }
    Ok(sum / n as f64)
}

pub fn loss(target: &Target, y: &Coordinates, kind: ManifoldKind) -> Result<f64> {
    match target {
        Target::Distance(d) => stress_loss(d, y, kind),
        Target::Similarity(p) => kl_loss(p, y, kind),
    }
}

/// Loss restricted to the given rows and its gradient with respect to every
/// coordinate, accumulated into `grad` (length `n * d`).
pub fn batch_loss_grad(
    target: &Target,
    y: &Coordinates,
    kind: ManifoldKind,
    rows: &[usize],
    grad: &mut [f64],
) -> Result<f64> {
    check_shapes(target.n(), y)?;
    if grad.len() != y.data.len() {
        return Err(Error::ShapeMismatch("gradient buffer size".into()));
    }
    let (n, d) = (y.n, y.d);
    match target {
        Target::Distance(dm) => {
            let norm = 1.0 / (n * n) as f64;
            let mut sum = 0.0;
            for &i in rows {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let (gi, gj) = two_rows_mut(grad, d, i, j);
                    let rho = kind.distance(y.row(i), y.row(j));
                    let r = rho - dm.get(i, j);
                    sum += r * r;
                    kind.distance_grad_acc(y.row(i), y.row(j), 2.0 * r * norm, gi, gj);
                }
            }
            Ok(sum * norm)
        }
        Target::Similarity(p) => {
            let norm = 1.0 / n as f64;
            let mut rho = vec![0.0; n];
            let mut log_q = vec![0.0; n];
            let mut sum = 0.0;
            for &i in rows {
                log_q_row(y, kind, i, &mut rho, &mut log_q);
                sum += kl_row_loss(p, i, &log_q)?;
                let mass: f64 = p.matrix().row(i).iter().sum::<f64>() - p.get(i, i);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    // d loss_i / d rho_ij = (q_ij * mass_i - P_ij) * (-2 rho_ij)
                    let coef = (log_q[j].exp() * mass - p.get(i, j)) * (-2.0 * rho[j]) * norm;
                    if coef == 0.0 {
                        continue;
                    }
                    let (gi, gj) = two_rows_mut(grad, d, i, j);
                    kind.distance_grad_acc(y.row(i), y.row(j), coef, gi, gj);
                }
            }
            Ok(sum * norm)
        }
    }
}

/// Full loss and its gradient.
pub fn loss_and_gradient(
    target: &Target,
    y: &Coordinates,
    kind: ManifoldKind,
) -> Result<(f64, Vec<f64>)> {
    let rows: Vec<usize> = (0..y.n).collect();
    let mut grad = vec![0.0; y.data.len()];
    let l = batch_loss_grad(target, y, kind, &rows, &mut grad)?;
    Ok((l, grad))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingConfig {
    pub kind: ManifoldKind,
    pub d: usize,
    pub n: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub momentum: f64,
    pub max_epochs: usize,
    /// Stop when the best loss has not improved by a relative
    /// `min_rel_improvement` for this many epochs.
    pub patience_epochs: usize,
    pub min_rel_improvement: f64,
    /// Standard deviation of the Gaussian initialization.
    pub init_scale: f64,
    pub seed: u64,
}

impl EmbeddingConfig {
    pub fn new(kind: ManifoldKind, d: usize, n: usize) -> Self {
        EmbeddingConfig {
            kind,
            d,
            n,
            learning_rate: 0.01,
            batch_size: BATCH_SIZES[0].min(n.max(1)),
            momentum: DEFAULT_MOMENTUM,
            max_epochs: DEFAULT_MAX_EPOCHS,
            patience_epochs: DEFAULT_PATIENCE,
            min_rel_improvement: DEFAULT_MIN_REL_IMPROVEMENT,
            init_scale: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.d < 1 {
            return bad("dimension must be >= 1".into());
        }
        if self.n < 2 {
            return bad(format!("n = {}, need at least 2 points", self.n));
        }
        if self.batch_size < 1 || self.batch_size > self.n {
            return bad(format!(
                "batch size {} outside [1, {}]",
                self.batch_size, self.n
            ));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum {} outside [0, 1)", self.momentum));
        }
        // Zero is allowed so a run can be checked against its initialization.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {}", self.learning_rate));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return bad(format!("init scale {}", self.init_scale));
        }
        if self.max_epochs < 1 {
            return bad("max_epochs must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    /// Best iterate seen (by full-data loss).
    pub y: Coordinates,
    pub final_loss: f64,
    /// Full-data loss after every epoch.
    pub loss_trace: Vec<f64>,
    pub epochs_run: usize,
}

/// Runs mini-batch SGD with momentum from a Gaussian initialization and
/// returns the best iterate.
pub fn sgd_embed(config: &EmbeddingConfig, target: &Target) -> Result<EmbeddingResult> {
    config.validate()?;
    if config.n != target.n() {
        return Err(Error::ShapeMismatch(format!(
            "config has n = {}, target has {} points",
            config.n,
            target.n()
        )));
    }
    let (n, d, kind) = (config.n, config.d, config.kind);
    let lr = config.learning_rate;
    let mut rng = rng_from_seed(config.seed);
    let mut y = Coordinates::gaussian(n, d, config.init_scale, &mut rng);
    let mut velocity = vec![0.0; n * d];
    let mut grad = vec![0.0; n * d];
    let mut order: Vec<usize> = (0..n).collect();

    let mut trace = Vec::new();
    let mut best_loss = f64::INFINITY;
    let mut best_y = y.clone();
    let mut anchor = f64::INFINITY;
    let mut last_improvement = 0;

    let diverged = |epoch: usize, loss: f64| Error::Divergence { epoch, lr, loss };

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            batch_loss_grad(target, &y, kind, batch, &mut grad)
                .map_err(|_| diverged(epoch, f64::INFINITY))?;
            for ((yk, vk), gk) in y.data.iter_mut().zip(&mut velocity).zip(&grad) {
                *vk = config.momentum * *vk - lr * gk;
                *yk += *vk;
            }
        }
        let current = match loss(target, &y, kind) {
            Ok(l) => l,
            Err(Error::KlOverflow { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if !current.is_finite() || current > DIVERGENCE_LOSS {
            return Err(diverged(epoch, current));
        }
        trace.push(current);
        if current < best_loss {
            best_loss = current;
            best_y.data.copy_from_slice(&y.data);
        }
        if best_loss < anchor * (1.0 - config.min_rel_improvement) || anchor.is_infinite() {
            anchor = best_loss;
            last_improvement = epoch;
        } else if epoch - last_improvement >= config.patience_epochs {
            break;
        }
    }

    Ok(EmbeddingResult {
        y: best_y,
        final_loss: best_loss,
        epochs_run: trace.len(),
        loss_trace: trace,
    })
}

/// `exp(U(log 5e-4, log 5))`.
pub fn sample_learning_rate<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let (lo, hi) = LEARNING_RATE_RANGE;
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Uniform over [`BATCH_SIZES`], clipped to `n`.
pub fn sample_batch_size<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    BATCH_SIZES[rng.random_range(0..BATCH_SIZES.len())].min(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub learning_rate: f64,
    pub batch_size: usize,
    /// `None` when the run diverged.
    pub final_loss: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub config: EmbeddingConfig,
    pub result: EmbeddingResult,
    pub trials: Vec<TrialRecord>,
}

/// Random search over learning rate and batch size.
///
/// Trial `t` draws its hyperparameters from `derive_seed(seed, t)` and
/// initializes from a seed derived from that, so a search with more trials
/// replays the trials of a smaller one. All other settings come from
/// `template`. Diverged trials score `+inf`; the earliest lowest loss wins.
pub fn hyperparameter_search(
    template: &EmbeddingConfig,
    target: &Target,
    trials: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut best: Option<(EmbeddingConfig, EmbeddingResult)> = None;
    let mut records = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_seed = derive_seed(seed, t as u64);
        let mut rng = rng_from_seed(trial_seed);
        let mut config = template.clone();
        config.learning_rate = sample_learning_rate(&mut rng);
        config.batch_size = sample_batch_size(&mut rng, template.n);
        config.seed = derive_seed(trial_seed, 1);
        let outcome = match sgd_embed(&config, target) {
            Ok(r) => Some(r),
            Err(Error::Divergence { .. }) => None,
            Err(e) => return Err(e),
        };
        records.push(TrialRecord {
            learning_rate: config.learning_rate,
            batch_size: config.batch_size,
            final_loss: outcome.as_ref().map(|r| r.final_loss),
        });
        if let Some(result) = outcome {
            if best
                .as_ref()
                .is_none_or(|(_, b)| result.final_loss < b.final_loss)
            {
                best = Some((config, result));
            }
        }
    }
    let (config, result) = best.ok_or(Error::AllTrialsDiverged { trials })?;
    Ok(SearchOutcome {
        config,
        result,
        trials: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{all_pairs_shortest_paths, Graph, SquareMatrix};

    fn dist(rows: Vec<Vec<f64>>) -> DistanceMatrix {
        DistanceMatrix::new(SquareMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn sim(rows: Vec<Vec<f64>>) -> SimilarityMatrix {
        SimilarityMatrix::new(SquareMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn path4() -> Target {
        Target::Distance(all_pairs_shortest_paths(&Graph::path(4)).unwrap())
    }

    #[test]
    fn stress_examples() {
        let d = dist(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let y = Coordinates::from_rows(&[vec![0.3, 0.1], vec![0.3, 0.1]]).unwrap();
        assert_eq!(stress_loss(&d, &y, ManifoldKind::Euclidean).unwrap(), 0.5);

        let y = Coordinates::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let Target::Distance(p4) = path4() else { unreachable!() };
        assert_eq!(stress_loss(&p4, &y, ManifoldKind::Euclidean).unwrap(), 0.0);
        assert_eq!(stress_loss(&p4, &y, ManifoldKind::L1).unwrap(), 0.0);

        let short = Coordinates::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(stress_loss(&p4, &short, ManifoldKind::L1).is_err());
    }

    #[test]
    fn stress_is_permutation_invariant() {
        let d = dist(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ]);
        let rows = [vec![0.1, 0.2], vec![-0.5, 0.3], vec![0.9, -1.0]];
        let y = Coordinates::from_rows(&rows).unwrap();
        let perm = [2, 0, 1];
        let dp = dist(
            (0..3)
                .map(|i| (0..3).map(|j| d.get(perm[i], perm[j])).collect())
                .collect(),
        );
        let yp = Coordinates::from_rows(&perm.map(|i| rows[i].clone())).unwrap();
        for kind in ManifoldKind::ALL {
            let a = stress_loss(&d, &y, kind).unwrap();
            let b = stress_loss(&dp, &yp, kind).unwrap();
            assert!((a - b).abs() < 1e-14, "{kind}");
        }
    }

    #[test]
    fn kl_with_equal_distances() {
        let p = sim(vec![
            vec![0.0, 0.3, 0.7],
            vec![0.5, 0.0, 0.5],
            vec![0.9, 0.1, 0.0],
        ]);
        // Coincident points: q_ij = 1/2 for every kind. Hand evaluation of
        // (1/3) sum P log(2 P).
        let expected = 0.150_115_695_224_516_3;
        let y = Coordinates::from_rows(&[vec![0.4, -0.2], vec![0.4, -0.2], vec![0.4, -0.2]])
            .unwrap();
        for kind in ManifoldKind::ALL {
            assert!((kl_loss(&p, &y, kind).unwrap() - expected).abs() < 1e-15);
        }
        let uniform = sim(vec![
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ]);
        assert_eq!(kl_loss(&uniform, &y, ManifoldKind::Euclidean).unwrap(), 0.0);
    }

    #[test]
    fn kl_reports_underflow() {
        let p = sim(vec![
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ]);
        let y = Coordinates::from_rows(&[vec![0.0], vec![1.0], vec![100.0]]).unwrap();
        assert!(matches!(
            kl_loss(&p, &y, ManifoldKind::Euclidean),
            Err(Error::KlOverflow { i: 0, j: 2 })
        ));
    }

    #[test]
    fn batch_gradients_add_up_to_full_gradient() {
        let target = path4();
        let y = Coordinates::gaussian(4, 3, 1.0, &mut rng_from_seed(2));
        for kind in ManifoldKind::ALL {
            let (_, full) = loss_and_gradient(&target, &y, kind).unwrap();
            let mut acc = vec![0.0; 12];
            for batch in [[3, 1], [0, 2]] {
                batch_loss_grad(&target, &y, kind, &batch, &mut acc).unwrap();
            }
            for (a, b) in acc.iter().zip(&full) {
                assert!((a - b).abs() < 1e-10, "{kind}");
            }
        }
    }

    #[test]
    fn path_embeds_in_euclidean() {
        let mut cfg = EmbeddingConfig::new(ManifoldKind::Euclidean, 3, 4);
        cfg.learning_rate = 0.05;
        cfg.batch_size = 4;
        cfg.seed = 1;
        let r = sgd_embed(&cfg, &path4()).unwrap();
        assert!(r.final_loss <= 0.05, "stress {}", r.final_loss);
        assert_eq!(r.final_loss, r.loss_trace.iter().copied().fold(f64::INFINITY, f64::min));
        assert_eq!(r.epochs_run, r.loss_trace.len());
    }

    #[test]
    fn zero_learning_rate_keeps_initialization() {
        let mut cfg = EmbeddingConfig::new(ManifoldKind::HilbertSimplex, 2, 4);
        cfg.learning_rate = 0.0;
        cfg.max_epochs = 20;
        cfg.seed = 9;
        let r = sgd_embed(&cfg, &path4()).unwrap();
        let y0 = Coordinates::gaussian(4, 2, 1.0, &mut rng_from_seed(9));
        assert_eq!(r.y, y0);
        assert!(r.loss_trace.iter().all(|&l| l == r.loss_trace[0]));
    }

    #[test]
    fn runs_are_deterministic() {
        let mut cfg = EmbeddingConfig::new(ManifoldKind::FunkSimplex, 3, 4);
        cfg.learning_rate = 0.1;
        cfg.batch_size = 2;
        cfg.max_epochs = 200;
        cfg.seed = 5;
        let a = sgd_embed(&cfg, &path4()).unwrap();
        let b = sgd_embed(&cfg, &path4()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_reported() {
        let mut cfg = EmbeddingConfig::new(ManifoldKind::Euclidean, 2, 4);
        cfg.learning_rate = 1e9;
        cfg.seed = 3;
        match sgd_embed(&cfg, &path4()) {
            Err(Error::Divergence { epoch, lr, .. }) => {
                assert_eq!(lr, 1e9);
                assert!(epoch >= 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let base = EmbeddingConfig::new(ManifoldKind::L1, 2, 4);
        let mut c = base.clone();
        c.batch_size = 5;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.momentum = 1.0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.learning_rate = -1.0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.n = 5;
        assert!(matches!(sgd_embed(&c, &path4()), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn search_with_one_trial_is_that_trial() {
        let template = EmbeddingConfig::new(ManifoldKind::L1, 2, 4);
        let one = hyperparameter_search(&template, &path4(), 1, 77).unwrap();
        assert_eq!(one.trials.len(), 1);
        assert_eq!(one.config.learning_rate, one.trials[0].learning_rate);
        let replay = sgd_embed(&one.config, &path4()).unwrap();
        assert_eq!(replay, one.result);

        let five = hyperparameter_search(&template, &path4(), 5, 77).unwrap();
        assert_eq!(five.trials[0], one.trials[0]);
        assert!(five.result.final_loss <= one.result.final_loss);
        assert!(hyperparameter_search(&template, &path4(), 0, 77).is_err());
    }

    #[test]
    fn batch_sizes_are_clipped() {
        let mut rng = rng_from_seed(0);
        for _ in 0..100 {
            let b = sample_batch_size(&mut rng, 20);
            assert!(b == 16 || b == 20);
        }
    }
}
