//! Library behind the `spf` binary: configuration, the oracle registry used
//! by `--general`, and the run that produces a [`Report`].

pub mod input;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Parser;
use spf_core::audit::{error_bound, DEFAULT_EXACT_LIMIT};
use spf_core::geo2d::preprocess_2d_with;
use spf_core::mechanisms::{laplace_sample, noise_scale_over, seeded_rng, PersonalEpsilons};
use spf_core::stats::{
    mean_error_bound, preprocess_ordered, preprocess_variance, variance, variance_error_bound, OrderedStatKind,
    OrderedStatSpec, StatisticOracle,
};
use spf_core::{
    preprocess_with, Database, FnOracle, FunctionOracle, IndividualId, Point2, PreprocessOptions, Record,
    SensitivityBounds,
};

pub use input::{read_data, read_params, Data, ParamTable};
pub use report::{Report, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn input(path: &str, msg: impl Into<String>) -> Self {
        CliError::Input {
            path: path.to_owned(),
            msg: msg.into(),
        }
    }

    fn params(msg: impl Into<String>) -> Self {
        CliError::Params(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Params(_) => 3,
            CliError::SizeCap(_) => 4,
            CliError::Internal(_) => 1,
        }
    }

    fn from_core(e: spf_core::Error, input: &str) -> Self {
        match e {
            spf_core::Error::SizeLimit { .. } => CliError::SizeCap(e.to_string()),
            spf_core::Error::InvalidArgument(_) => CliError::Params(e.to_string()),
            spf_core::Error::DuplicateId(_) => CliError::input(input, e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Sensitivity-preprocess a statistic of a CSV data set and optionally
/// release it with personalized differential privacy.
#[derive(Debug, Clone, Parser)]
#[command(name = "spf", version, allow_negative_numbers = true)]
pub struct RunConfig {
    /// mean, trimmed-mean, median, min, max, variance, or centroid (2-D input)
    pub statistic: String,
    /// CSV with header `id,value` or `id,x1,x2`
    pub input: PathBuf,
    /// Sensitivity bound shared by every individual
    #[arg(long)]
    pub delta: Option<f64>,
    /// CSV `id,delta`; a `*` row sets the default
    #[arg(long, conflicts_with = "delta")]
    pub delta_file: Option<PathBuf>,
    /// Value at the empty database for the mean (alias of --empty-value)
    #[arg(long)]
    pub mu_hat: Option<f64>,
    /// Value of the statistic at the empty database [default: 0]
    #[arg(long)]
    pub empty_value: Option<f64>,
    /// Fraction trimmed from each end by trimmed-mean, in [0, 0.5)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// CSV `id,epsilon`; enables Laplace noise. A `*` row sets the default
    #[arg(long)]
    pub epsilon_file: Option<PathBuf>,
    /// Noise seed [default: random, reported]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit one JSON object instead of a table
    #[arg(long)]
    pub json: bool,
    /// Use the exact subset recursion (per-individual bounds, small n)
    #[arg(long)]
    pub general: bool,
    /// Largest n accepted by the subset recursion
    #[arg(long, default_value_t = 16)]
    pub max_n: usize,
}

/// Parameters handed to registered oracle factories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatParams {
    pub empty_value: f64,
    pub alpha: Option<f64>,
}

pub type Oracle = Box<dyn FunctionOracle<f64, Output = f64> + Send + Sync>;
pub type OracleFactory = Box<dyn Fn(&StatParams) -> Result<Oracle, CliError> + Send + Sync>;

/// Named 1-D statistics available to `--general`.
pub struct Registry {
    factories: BTreeMap<String, OracleFactory>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Registry::empty();
        for name in ["mean", "trimmed-mean", "median", "min", "max"] {
            r.register(name, move |p: &StatParams| {
                let spec = ordered_spec(name, p)?;
                Ok(Box::new(StatisticOracle(spec)) as Oracle)
            });
        }
        r.register("variance", |p: &StatParams| {
            reject_alpha("variance", p)?;
            let f = FnOracle::new(p.empty_value, |rs: &[&Record]| {
                variance(&rs.iter().map(|r| r.value).collect::<Vec<_>>())
            });
            Ok(Box::new(f) as Oracle)
        });
        r
    }

    pub fn register(
        &mut self,
        name: impl Into<String>,
        factory: impl Fn(&StatParams) -> Result<Oracle, CliError> + Send + Sync + 'static,
    ) {
        self.factories.insert(name.into(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, params: &StatParams) -> Result<Oracle, CliError> {
        let factory = self.factories.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.names().chain(["centroid"]).collect();
            CliError::params(format!(
                "unknown statistic `{name}`; expected one of {}",
                known.join(", ")
            ))
        })?;
        factory(params)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::with_builtins()
    }
}

fn reject_alpha(name: &str, p: &StatParams) -> Result<(), CliError> {
    match p.alpha {
        Some(_) => Err(CliError::params(format!("--alpha does not apply to {name}"))),
        None => Ok(()),
    }
}

fn ordered_spec(name: &str, p: &StatParams) -> Result<OrderedStatSpec, CliError> {
    if name != "trimmed-mean" {
        reject_alpha(name, p)?;
    }
    let kind = match name {
        "trimmed-mean" => {
            let alpha = p.alpha.ok_or_else(|| CliError::params("trimmed-mean needs --alpha"))?;
            OrderedStatKind::TrimmedMean(alpha)
        }
        "mean" => OrderedStatKind::Mean,
        "median" => OrderedStatKind::Median,
        "min" => OrderedStatKind::Minimum,
        "max" => OrderedStatKind::Maximum,
        _ => return Err(CliError::Internal(format!("`{name}` is not an ordered statistic"))),
    };
    OrderedStatSpec::new(kind, p.empty_value).map_err(|e| CliError::params(e.to_string()))
}

const FAST_STATISTICS: [&str; 6] = ["mean", "trimmed-mean", "median", "min", "max", "variance"];

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    run_with(config, &Registry::with_builtins())
}

pub fn run_with(config: &RunConfig, registry: &Registry) -> Result<Report, CliError> {
    let input = config.input.display().to_string();
    let core_err = |e: spf_core::Error| CliError::from_core(e, &input);

    let data = read_data(&config.input)?;
    let ids = data.ids();
    let bounds = load_bounds(config, &ids)?;
    let params = StatParams {
        empty_value: empty_value(config)?,
        alpha: config.alpha,
    };

    let (raw, g, bound) = match (&data, config.statistic.as_str()) {
        (Data::Planar(records), "centroid") => {
            if config.alpha.is_some() {
                return Err(CliError::params("--alpha does not apply to centroid"));
            }
            let db = Database::new(records.clone()).map_err(core_err)?;
            centroid(&db, &bounds, params.empty_value, config.max_n).map_err(core_err)?
        }
        (Data::Planar(_), name) => {
            return Err(CliError::params(format!(
                "`{name}` needs 1-D input with header `id,value`"
            )))
        }
        (Data::Scalar(_), "centroid") => {
            return Err(CliError::params("centroid needs 2-D input with header `id,x1,x2`"))
        }
        (Data::Scalar(records), name) => {
            let db = Database::new(records.clone()).map_err(core_err)?;
            if config.general {
                let oracle = registry.build(name, &params)?;
                general(&oracle, &db, &bounds, name, params.empty_value, config.max_n).map_err(core_err)?
            } else if FAST_STATISTICS.contains(&name) {
                fast(name, &db, &bounds, &params)?
            } else {
                registry.build(name, &params)?;
                return Err(CliError::params(format!("`{name}` is only available with --general")));
            }
        }
    };

    let (noise_scale, noised_value, seed) = match &config.epsilon_file {
        None => (None, None, config.seed),
        Some(path) => {
            let table = read_params(path, "epsilon")?;
            let eps = PersonalEpsilons::new(table.per_individual, table.default).map_err(core_err)?;
            let b = noise_scale_over(&bounds, &eps, &ids).map_err(core_err)?.value();
            let seed = config.seed.unwrap_or_else(rand::random);
            let mut rng = seeded_rng(seed);
            let mut noise = || laplace_sample(b, &mut rng).map_err(core_err);
            let noised = match g {
                Value::Scalar(x) => Value::Scalar(x + noise()?),
                Value::Point(p) => {
                    let d1 = noise()?;
                    Value::Point(Point2::new(p.x1 + d1, p.x2 + noise()?))
                }
            };
            (Some(b), Some(noised), Some(seed))
        }
    };

    Ok(Report {
        statistic: config.statistic.clone(),
        n: data.len(),
        raw_value: raw,
        g_value: g,
        error_bound: bound,
        noise_scale,
        noised_value,
        seed,
    })
}

fn empty_value(config: &RunConfig) -> Result<f64, CliError> {
    let v = match (config.empty_value, config.mu_hat) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::params(format!(
                "--empty-value {a} conflicts with --mu-hat {b}"
            )))
        }
        (a, b) => a.or(b).unwrap_or(0.0),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::params(format!("empty value must be finite, got {v}")))
    }
}

fn load_bounds(config: &RunConfig, ids: &[IndividualId]) -> Result<SensitivityBounds, CliError> {
    let invalid = |e: spf_core::Error| CliError::params(e.to_string());
    match (config.delta, &config.delta_file) {
        (Some(d), _) => SensitivityBounds::uniform(d).map_err(invalid),
        (None, Some(path)) => {
            let table = read_params(path, "delta")?;
            if table.default.is_none() {
                if let Some(missing) = ids.iter().find(|id| !table.per_individual.contains_key(*id)) {
                    return Err(CliError::params(format!(
                        "{}: no delta for `{missing}` and no `*` default row",
                        path.display()
                    )));
                }
            }
            SensitivityBounds::new(table.per_individual, table.default.unwrap_or(0.0)).map_err(invalid)
        }
        (None, None) => Err(CliError::params("one of --delta or --delta-file is required")),
    }
}

fn fast(
    name: &str,
    db: &Database,
    bounds: &SensitivityBounds,
    params: &StatParams,
) -> Result<(Value, Value, Option<f64>), CliError> {
    let mut deltas = db.ids().map(|id| bounds.get(id));
    let delta = deltas.next().unwrap_or(bounds.default_delta());
    if deltas.any(|d| d != delta) {
        return Err(CliError::params(format!(
            "`{name}` without --general needs one delta for every individual"
        )));
    }
    let x = db.values();
    let invalid = |e: spf_core::Error| CliError::params(e.to_string());

    if name == "variance" {
        reject_alpha(name, params)?;
        if params.empty_value != 0.0 {
            return Err(CliError::params(
                "variance without --general fixes the empty value at 0",
            ));
        }
        let g = preprocess_variance(delta, &x).map_err(invalid)?;
        let bound = if x.is_empty() {
            0.0
        } else {
            variance_error_bound(delta, &x).map_err(invalid)?
        };
        return Ok((Value::Scalar(variance(&x)), Value::Scalar(g), Some(bound)));
    }

    let spec = ordered_spec(name, params)?;
    let g = preprocess_ordered(&spec, delta, &x).map_err(invalid)?;
    let mut sorted = x.clone();
    sorted.sort_by(f64::total_cmp);
    let raw = if sorted.is_empty() {
        params.empty_value
    } else {
        spec.kind().evaluate_sorted(&sorted)
    };
    let bound = match (name, x.is_empty()) {
        (_, true) => Some(0.0),
        ("mean", false) => Some(mean_error_bound(params.empty_value, delta, &x).map_err(invalid)?),
        _ => None,
    };
    Ok((Value::Scalar(raw), Value::Scalar(g), bound))
}

fn full_eval<F: FunctionOracle<V>, V>(f: &F, db: &Database<V>) -> Result<F::Output, spf_core::Error> {
    if db.is_empty() {
        return Ok(f.empty_value());
    }
    let records: Vec<&Record<V>> = db.records().iter().collect();
    Ok(f.evaluate(&records)?)
}

fn general(
    oracle: &Oracle,
    db: &Database,
    bounds: &SensitivityBounds,
    name: &str,
    empty: f64,
    max_n: usize,
) -> Result<(Value, Value, Option<f64>), spf_core::Error> {
    let f = &**oracle;
    let out = preprocess_with(&f, bounds, db, PreprocessOptions { max_n })?;
    let raw = full_eval(&f, db)?;
    let x = db.values();
    let bound = if db.len() <= DEFAULT_EXACT_LIMIT {
        Some(error_bound(&f, bounds, db)?.value)
    } else if bounds.is_uniform() && name == "mean" {
        Some(mean_error_bound(empty, bounds.default_delta(), &x)?)
    } else if bounds.is_uniform() && name == "variance" && empty == 0.0 {
        Some(variance_error_bound(bounds.default_delta(), &x)?)
    } else {
        None
    };
    Ok((Value::Scalar(raw), Value::Scalar(out.value), bound))
}

fn centroid(
    db: &Database<Point2>,
    bounds: &SensitivityBounds,
    empty: f64,
    max_n: usize,
) -> Result<(Value, Value, Option<f64>), spf_core::Error> {
    let f = FnOracle::new(Point2::new(empty, empty), |rs: &[&Record<Point2>]| {
        let n = rs.len() as f64;
        let (s1, s2) = rs.iter().fold((0.0, 0.0), |(a, b), r| (a + r.value.x1, b + r.value.x2));
        Point2::new(s1 / n, s2 / n)
    });
    let out = preprocess_2d_with(&f, bounds, db, PreprocessOptions { max_n })?;
    let raw = full_eval(&f, db)?;
    let bound = if db.len() <= DEFAULT_EXACT_LIMIT {
        Some(error_bound(&f, bounds, db)?.value)
    } else {
        None
    };
    Ok((Value::Point(raw), Value::Point(out.value), bound))
}
