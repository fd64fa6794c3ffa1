//! The experiment grid: datasets x manifolds x dimensions x replicates, each
//! cell solved by hyperparameter search, with resumable CSV persistence and
//! grouped summaries.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{self, EmbeddingConfig, Target};
use crate::graphs;
use crate::manifolds::ManifoldKind;
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Header of the results CSV.
pub const RESULTS_HEADER: &str = "dataset_id,seed,kind,d,lr,batch,loss,epochs,wall_ms";
/// Header of the summary CSV.
pub const SUMMARY_HEADER: &str = "kind,d,mean_loss,std_loss,count";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DatasetKind {
    /// `n` standard Gaussian points in `R^n`.
    RandomPoints { n: usize },
    ErdosRenyi { n: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
}

/// Which matrix is embedded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// Distance matrix, stress loss.
    Stress,
    /// Random-walk similarity after `steps` steps, KL loss.
    RandomWalk { steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub target: TargetKind,
    pub base_seed: u64,
}

impl DatasetSpec {
    /// Identifier shared by all replicates, e.g. `er-n50-p0.5-stress`.
    pub fn id(&self) -> String {
        let data = match self.kind {
            DatasetKind::RandomPoints { n } => format!("points-n{n}"),
            DatasetKind::ErdosRenyi { n, p } => format!("er-n{n}-p{p}"),
            DatasetKind::BarabasiAlbert { n, m } => format!("ba-n{n}-m{m}"),
        };
        match self.target {
            TargetKind::Stress => format!("{data}-stress"),
            TargetKind::RandomWalk { steps } => format!("{data}-rw{steps}"),
        }
    }

    /// Seed of replicate `r`.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        derive_seed(self.base_seed, r as u64)
    }

    pub fn generate(&self, seed: u64) -> Result<Target> {
        let graph = match self.kind {
            DatasetKind::RandomPoints { n } => {
                if self.target != TargetKind::Stress {
                    return Err(Error::InvalidParameter(
                        "random points only define a distance matrix".into(),
                    ));
                }
                return Ok(Target::Distance(graphs::random_points_distance_matrix(n, seed)?));
            }
            DatasetKind::ErdosRenyi { n, p } => graphs::gen_erdos_renyi(n, p, seed)?,
            DatasetKind::BarabasiAlbert { n, m } => graphs::gen_barabasi_albert(n, m, seed)?,
        };
        Ok(match self.target {
            TargetKind::Stress => Target::Distance(graphs::all_pairs_shortest_paths(&graph)?),
            TargetKind::RandomWalk { steps } => {
                Target::Similarity(graphs::random_walk_similarity(&graph, steps)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dataset: DatasetSpec,
    pub kinds: Vec<ManifoldKind>,
    pub dims: Vec<usize>,
    pub repetitions: usize,
    pub trials: usize,
    pub max_epochs: usize,
    pub patience_epochs: usize,
    pub min_rel_improvement: f64,
    pub init_scale: f64,
}

impl ExperimentSpec {
    pub fn new(dataset: DatasetSpec, kinds: Vec<ManifoldKind>, dims: Vec<usize>) -> Self {
        ExperimentSpec {
            dataset,
            kinds,
            dims,
            repetitions: 10,
            trials: embed::DEFAULT_TRIALS,
            max_epochs: embed::DEFAULT_MAX_EPOCHS,
            patience_epochs: embed::DEFAULT_PATIENCE,
            min_rel_improvement: embed::DEFAULT_MIN_REL_IMPROVEMENT,
            init_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.repetitions < 1 {
            return bad("repetitions must be >= 1");
        }
        if self.trials < 1 {
            return bad("trials must be >= 1");
        }
        if self.kinds.is_empty() {
            return bad("no manifold kinds");
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad("dimensions must be a nonempty list of values >= 1");
        }
        if self.max_epochs < 1 {
            return bad("max_epochs must be >= 1");
        }
        Ok(())
    }

    /// Parses the `key = value` spec format. Recognized keys:
    ///
    /// ```text
    /// dataset     = er | ba | points
    /// n, p, m     = dataset parameters (p for er, m for ba)
    /// target      = stress | rw
    /// steps       = random-walk length (default 5)
    /// seed        = base seed
    /// kinds       = comma-separated manifold kinds (default: all five)
    /// dims        = comma-separated list, or a range like 2..10 (inclusive)
    /// repetitions = 10, trials = 30, max_epochs = 3000,
    /// patience = 100, min_rel_improvement = 1e-4, init_scale = 1.0
    /// ```
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::parse(origin, idx + 1, "expected `key = value`"));
            };
            map.insert(k.trim().to_ascii_lowercase(), (idx + 1, v.trim().to_string()));
        }
        let known = [
            "dataset", "n", "p", "m", "target", "steps", "seed", "kinds", "dims",
            "repetitions", "trials", "max_epochs", "patience", "min_rel_improvement",
            "init_scale",
        ];
        if let Some((k, (line, _))) = map.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::parse(origin, *line, format!("unknown key {k:?}")));
        }

        fn get<T: std::str::FromStr>(
            map: &BTreeMap<String, (usize, String)>,
            origin: &Path,
            key: &str,
        ) -> Result<Option<T>> {
            match map.get(key) {
                None => Ok(None),
                Some((line, v)) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::parse(origin, *line, format!("bad value for {key}: {v:?}"))),
            }
        }
        let require = |key: &str| -> Result<usize> {
            get(&map, origin, key)?.ok_or_else(|| Error::parse(origin, 0, format!("missing key {key}")))
        };

        let dataset_name: String = get(&map, origin, "dataset")?
            .ok_or_else(|| Error::parse(origin, 0, "missing key dataset"))?;
        let kind = match dataset_name.as_str() {
            "points" => DatasetKind::RandomPoints { n: require("n")? },
            "er" => DatasetKind::ErdosRenyi {
                n: require("n")?,
                p: get(&map, origin, "p")?
                    .ok_or_else(|| Error::parse(origin, 0, "missing key p"))?,
            },
            "ba" => DatasetKind::BarabasiAlbert {
                n: require("n")?,
                m: require("m")?,
            },
            other => {
                let line = map["dataset"].0;
                return Err(Error::parse(origin, line, format!("unknown dataset {other:?}")));
            }
        };
        let steps = get(&map, origin, "steps")?.unwrap_or(5);
        let target = match get::<String>(&map, origin, "target")?.as_deref() {
            None | Some("stress") => TargetKind::Stress,
            Some("rw") => TargetKind::RandomWalk { steps },
            Some(other) => {
                let line = map["target"].0;
                return Err(Error::parse(origin, line, format!("unknown target {other:?}")));
            }
        };
        let dataset = DatasetSpec {
            kind,
            target,
            base_seed: get(&map, origin, "seed")?
                .ok_or_else(|| Error::parse(origin, 0, "missing key seed"))?,
        };

        let kinds = match map.get("kinds") {
            None => ManifoldKind::ALL.to_vec(),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.parse().map_err(|e: Error| Error::parse(origin, *line, e.to_string())))
                .collect::<Result<Vec<_>>>()?,
        };
        let dims = match map.get("dims") {
            None => return Err(Error::parse(origin, 0, "missing key dims")),
            Some((line, v)) => parse_dims(v).ok_or_else(|| {
                Error::parse(origin, *line, format!("bad dims {v:?}, expected a list or a..b"))
            })?,
        };

        let mut spec = ExperimentSpec::new(dataset, kinds, dims);
        if let Some(v) = get(&map, origin, "repetitions")? {
            spec.repetitions = v;
        }
        if let Some(v) = get(&map, origin, "trials")? {
            spec.trials = v;
        }
        if let Some(v) = get(&map, origin, "max_epochs")? {
            spec.max_epochs = v;
        }
        if let Some(v) = get(&map, origin, "patience")? {
            spec.patience_epochs = v;
        }
        if let Some(v) = get(&map, origin, "min_rel_improvement")? {
            spec.min_rel_improvement = v;
        }
        if let Some(v) = get(&map, origin, "init_scale")? {
            spec.init_scale = v;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentSpec::parse(&text, path)
    }

    /// Every cell of the grid, replicate-major.
    pub fn jobs(&self) -> Vec<Job> {
        let id = self.dataset.id();
        let mut jobs = Vec::new();
        for r in 0..self.repetitions {
            let seed = self.dataset.replicate_seed(r);
            for &kind in &self.kinds {
                for &d in &self.dims {
                    jobs.push(Job {
                        dataset_id: id.clone(),
                        seed,
                        kind,
                        d,
                    });
                }
            }
        }
        jobs
    }
}

fn parse_dims(v: &str) -> Option<Vec<usize>> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (a <= b).then(|| (a..=b).collect());
    }
    v.split(',').map(|s| s.trim().parse().ok()).collect()
}

/// One cell of the grid; also the idempotency key of a result row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Job {
    pub dataset_id: String,
    pub seed: u64,
    pub kind: ManifoldKind,
    pub d: usize,
}

impl Job {
    fn search_seed(&self) -> u64 {
        let k = ManifoldKind::ALL.iter().position(|&x| x == self.kind).unwrap() as u64;
        derive_seed(derive_seed(self.seed, k + 1), self.d as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset_id: String,
    pub seed: u64,
    pub kind: ManifoldKind,
    pub d: usize,
    pub lr: f64,
    pub batch: usize,
    pub loss: f64,
    pub epochs: usize,
    pub wall_ms: u64,
}

impl ResultRecord {
    pub fn job(&self) -> Job {
        Job {
            dataset_id: self.dataset_id.clone(),
            seed: self.seed,
            kind: self.kind,
            d: self.d,
        }
    }

    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &ResultRecord) -> bool {
        ResultRecord {
            wall_ms: 0,
            ..self.clone()
        } == ResultRecord {
            wall_ms: 0,
            ..other.clone()
        }
    }
}

/// Generates the job's dataset and runs the hyperparameter search on it.
pub fn run_job(spec: &ExperimentSpec, job: &Job) -> Result<ResultRecord> {
    let start = Instant::now();
    let target = spec.dataset.generate(job.seed)?;
    let mut template = EmbeddingConfig::new(job.kind, job.d, target.n());
    template.max_epochs = spec.max_epochs;
    template.patience_epochs = spec.patience_epochs;
    template.min_rel_improvement = spec.min_rel_improvement;
    template.init_scale = spec.init_scale;
    let outcome = embed::hyperparameter_search(&template, &target, spec.trials, job.search_seed())?;
    Ok(ResultRecord {
        dataset_id: job.dataset_id.clone(),
        seed: job.seed,
        kind: job.kind,
        d: job.d,
        lr: outcome.config.learning_rate,
        batch: outcome.config.batch_size,
        loss: outcome.result.final_loss,
        epochs: outcome.result.epochs_run,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub workers: usize,
    /// Results CSV to resume from and append to.
    pub results_csv: Option<PathBuf>,
    /// Print one line per finished record to stderr.
    pub log: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            workers: 1,
            results_csv: None,
            log: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JobFailure {
    pub job: Job,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    /// One record per successful job, in job order (resumed records included).
    pub records: Vec<ResultRecord>,
    pub failures: Vec<JobFailure>,
    /// Jobs skipped because the results file already held them.
    pub resumed: usize,
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Runs every job of `spec` on `options.workers` threads. Failed jobs are
/// reported, not fatal.
pub fn run_suite(spec: &ExperimentSpec, options: &SuiteOptions) -> Result<SuiteReport> {
    spec.validate()?;
    let jobs = spec.jobs();

    let mut done: Vec<ResultRecord> = Vec::new();
    let mut writer = None;
    if let Some(path) = &options.results_csv {
        let exists = path.exists() && fs::metadata(path).map_err(|e| Error::io(path, e))?.len() > 0;
        if exists {
            done = read_results_csv(path)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if !exists {
            w.write_record(RESULTS_HEADER.split(','))?;
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        writer = Some(Mutex::new(w));
    }
    let done_keys: HashSet<Job> = done.iter().map(ResultRecord::job).collect();
    let pending: Vec<&Job> = jobs.iter().filter(|j| !done_keys.contains(j)).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let outcomes: Vec<(Job, Result<ResultRecord>)> = pool.install(|| {
        pending
            .par_iter()
            .map(|job| {
                let outcome = run_job(spec, job);
                if let Ok(record) = &outcome {
                    if let Some(w) = &writer {
                        let mut w = w.lock().unwrap();
                        // A failed append loses resumability for this record only.
                        if let Err(e) = w.serialize(record).and_then(|_| Ok(w.flush()?)) {
                            eprintln!("warning: could not append result: {e}");
                        }
                    }
                }
                if options.log {
                    match &outcome {
                        Ok(r) => eprintln!(
                            "{} seed={} kind={} d={} loss={:.6} lr={:.4e} batch={} epochs={} {}ms",
                            r.dataset_id, r.seed, r.kind, r.d, r.loss, r.lr, r.batch, r.epochs,
                            r.wall_ms
                        ),
                        Err(e) => eprintln!(
                            "{} seed={} kind={} d={} failed: {e}",
                            job.dataset_id, job.seed, job.kind, job.d
                        ),
                    }
                }
                ((*job).clone(), outcome)
            })
            .collect()
    });

    let mut report = SuiteReport {
        resumed: jobs.len() - pending.len(),
        ..SuiteReport::default()
    };
    let mut by_job: BTreeMap<usize, ResultRecord> = BTreeMap::new();
    let index: std::collections::HashMap<&Job, usize> =
        jobs.iter().enumerate().map(|(i, j)| (j, i)).collect();
    for r in done {
        if let Some(&i) = index.get(&r.job()) {
            by_job.insert(i, r);
        }
    }
    for (job, outcome) in outcomes {
        match outcome {
            Ok(r) => {
                by_job.insert(index[&job], r);
            }
            Err(e) => report.failures.push(JobFailure {
                job,
                error: e.to_string(),
            }),
        }
    }
    report.records = by_job.into_values().collect();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub kind: ManifoldKind,
    pub d: usize,
    pub mean_loss: f64,
    /// Population standard deviation.
    pub std_loss: f64,
    pub count: usize,
}

/// Mean and standard deviation of the loss per `(kind, d)`.
pub fn summarize(records: &[ResultRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to summarize".into()));
    }
    let mut groups: BTreeMap<(ManifoldKind, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.kind, r.d)).or_default().push(r.loss);
    }
    Ok(groups
        .into_iter()
        .map(|((kind, d), losses)| {
            let count = losses.len();
            let mean = losses.iter().sum::<f64>() / count as f64;
            let var = losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / count as f64;
            SummaryRow {
                kind,
                d,
                mean_loss: mean,
                std_loss: var.sqrt(),
                count,
            }
        })
        .collect())
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_results_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
