//! JSON configuration: parsing, `key=value` overrides and conversion to
//! library types.

use std::path::Path;

use alpha_bandits::{BanditInstance, ExperimentConfig, PolicySpec, PriorSpec, RewardModel};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub instance: Option<InstanceConfig>,
    pub horizon: Option<usize>,
    pub replicates: Option<usize>,
    #[serde(default = "one")]
    pub init_pulls: u64,
    #[serde(default)]
    pub policies: Vec<PolicyConfig>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub include_warm_start_regret: bool,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub concentration: Option<ConcentrationConfig>,
    pub divergence: Option<DivergenceConfig>,
    pub prior_mass: Option<PriorMassConfig>,
}

fn one() -> u64 {
    1
}

fn unit_var() -> f64 {
    1.0
}

/// Arms of one family; `params` holds one entry per arm.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceConfig {
    /// Success probability per arm.
    Bernoulli { params: Vec<f64> },
    /// Probability vector per arm; `support` defaults to `0..d`.
    Categorical {
        params: Vec<Vec<f64>>,
        support: Option<Vec<f64>>,
    },
    /// Mean per arm with a shared known variance.
    Gaussian {
        params: Vec<f64>,
        #[serde(default = "unit_var")]
        var: f64,
    },
    /// Rate per arm.
    Poisson { params: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Bernoulli {
        p: f64,
    },
    Categorical {
        probs: Vec<f64>,
        support: Option<Vec<f64>>,
    },
    Gaussian {
        mean: f64,
        #[serde(default = "unit_var")]
        var: f64,
    },
    Poisson {
        rate: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriorConfig {
    Beta {
        a: f64,
        b: f64,
    },
    Dirichlet {
        conc: Vec<f64>,
        support: Option<Vec<f64>>,
    },
    Gaussian {
        mean: f64,
        precision: f64,
        #[serde(default = "unit_var")]
        likelihood_var: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicyConfig {
    AlphaTs { alpha: f64, prior: Option<PriorConfig> },
    Ucb1,
    Ucbv {
        #[serde(default = "default_variance_coef")]
        variance_coef: f64,
        #[serde(default = "default_bias_coef")]
        bias_coef: f64,
    },
    Moss,
}

fn default_variance_coef() -> f64 {
    2.0
}

fn default_bias_coef() -> f64 {
    3.0
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub r0: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    /// α used by `bounds`.
    pub alpha: Option<f64>,
    /// Horizon used by `bounds`; defaults to the top-level horizon.
    pub horizon: Option<u64>,
    /// Suboptimal gaps; defaults to the instance gaps.
    pub gaps: Option<Vec<f64>>,
    /// Arm count; defaults to the instance size or `gaps + 1`.
    pub arms: Option<usize>,
    /// `simulate` also writes the thm3 bound curve per α-TS policy.
    #[serde(default)]
    pub bound_curve: bool,
}

impl AnalysisConfig {
    pub fn r0(&self) -> f64 {
        self.r0.unwrap_or(1.0)
    }

    pub fn d(&self) -> f64 {
        self.d.unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    pub prior: PriorConfig,
    pub true_model: ModelConfig,
    pub alphas: Vec<f64>,
    pub nablas: Vec<f64>,
    pub ns: Vec<u64>,
    #[serde(default = "default_outer")]
    pub outer: usize,
    #[serde(default = "default_inner")]
    pub inner: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_outer() -> usize {
    500
}

fn default_inner() -> usize {
    5000
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceConfig {
    pub a: ModelConfig,
    pub b: ModelConfig,
    pub alpha: f64,
    /// Also evaluate the quadrature oracle (Gaussian only).
    #[serde(default)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PriorMassConfig {
    pub prior: PriorConfig,
    pub theta0: ModelConfig,
    pub alpha: f64,
    pub eps: f64,
    pub n: u64,
    /// Accepted for completeness; it does not enter the check.
    #[serde(rename = "M")]
    pub m: Option<f64>,
}

/// A config as loaded: the post-override JSON and its typed form.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub value: Value,
    pub config: ConfigFile,
}

impl LoadedConfig {
    /// SHA-256 of the compact JSON of the post-override config (keys sorted).
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(canonical_json(&self.value).as_bytes()))
    }
}

pub fn canonical_json(value: &Value) -> String {
    serde_json::to_string(value).expect("JSON values always serialize")
}

/// Reads a config or a manifest written by `simulate`, then applies overrides.
pub fn load(path: &Path, overrides: &[String]) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    if let Some(inner) = manifest_config(&value) {
        value = inner;
    }
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let config = parse_value(&value)?;
    Ok(LoadedConfig { value, config })
}

fn manifest_config(value: &Value) -> Option<Value> {
    let obj = value.as_object()?;
    if obj.contains_key("config_sha256") {
        obj.get("config").cloned()
    } else {
        None
    }
}

pub fn parse_value(value: &Value) -> CliResult<ConfigFile> {
    serde_path_to_error::deserialize(value.clone())
        .map_err(|e| CliError::Config(format!("field `{}`: {}", e.path(), e.inner())))
}

/// `a.b.c=value`; the value is parsed as JSON when possible, otherwise kept
/// as a string. Array elements are addressed by index.
pub fn apply_override(root: &mut Value, spec: &str) -> CliResult<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{spec}` is not key=value")))?;
    if key.is_empty() {
        return Err(CliError::Usage(format!("override `{spec}` has an empty key")));
    }
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), parsed);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| CliError::Usage(format!("override `{key}`: `{part}` is not an array index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Usage(format!("override `{key}`: index {idx} out of range ({len})")))?;
                if last {
                    *slot = parsed;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "override `{key}`: `{part}` is inside a non-object value"
                )))
            }
        };
    }
    unreachable!("the loop returns on the last key part")
}

fn cfg_err(e: alpha_bandits::Error, what: &str) -> CliError {
    CliError::Config(format!("{what}: {e}"))
}

impl ModelConfig {
    pub fn build(&self) -> CliResult<RewardModel<f64>> {
        match self {
            Self::Bernoulli { p } => RewardModel::bernoulli(*p),
            Self::Categorical { probs, support: None } => RewardModel::categorical(probs.clone()),
            Self::Categorical {
                probs,
                support: Some(s),
            } => RewardModel::categorical_with_support(probs.clone(), s.clone()),
            Self::Gaussian { mean, var } => RewardModel::gaussian(*mean, *var),
            Self::Poisson { rate } => RewardModel::poisson(*rate),
        }
        .map_err(|e| cfg_err(e, "reward model"))
    }
}

impl PriorConfig {
    pub fn build(&self) -> CliResult<PriorSpec<f64>> {
        match self {
            Self::Beta { a, b } => PriorSpec::beta(*a, *b),
            Self::Dirichlet { conc, support: None } => PriorSpec::dirichlet(conc.clone()),
            Self::Dirichlet {
                conc,
                support: Some(s),
            } => PriorSpec::dirichlet_with_support(conc.clone(), s.clone()),
            Self::Gaussian {
                mean,
                precision,
                likelihood_var,
            } => PriorSpec::gaussian(*mean, *precision, *likelihood_var),
            Self::Gamma { shape, rate } => PriorSpec::gamma(*shape, *rate),
        }
        .map_err(|e| cfg_err(e, "prior"))
    }
}

impl InstanceConfig {
    pub fn build(&self) -> CliResult<BanditInstance<f64>> {
        let arms: Result<Vec<_>, _> = match self {
            Self::Bernoulli { params } => params.iter().map(|&p| RewardModel::bernoulli(p)).collect(),
            Self::Categorical { params, support } => params
                .iter()
                .map(|probs| match support {
                    Some(s) => RewardModel::categorical_with_support(probs.clone(), s.clone()),
                    None => RewardModel::categorical(probs.clone()),
                })
                .collect(),
            Self::Gaussian { params, var } => params.iter().map(|&m| RewardModel::gaussian(m, *var)).collect(),
            Self::Poisson { params } => params.iter().map(|&r| RewardModel::poisson(r)).collect(),
        };
        let arms = arms.map_err(|e| cfg_err(e, "instance.params"))?;
        BanditInstance::new(arms).map_err(|e| cfg_err(e, "instance"))
    }
}

impl PolicyConfig {
    pub fn build(&self) -> CliResult<PolicySpec<f64>> {
        Ok(match self {
            Self::AlphaTs { alpha, prior } => PolicySpec::AlphaTs {
                alpha: *alpha,
                prior: prior.as_ref().map(PriorConfig::build).transpose()?,
            },
            Self::Ucb1 => PolicySpec::Ucb1,
            Self::Ucbv {
                variance_coef,
                bias_coef,
            } => PolicySpec::UcbV {
                variance_coef: *variance_coef,
                bias_coef: *bias_coef,
            },
            Self::Moss => PolicySpec::Moss,
        })
    }
}

fn required<T: Clone>(v: &Option<T>, name: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing field `{name}`")))
}

impl ConfigFile {
    pub fn instance(&self) -> CliResult<BanditInstance<f64>> {
        self.instance
            .as_ref()
            .ok_or_else(|| CliError::Config("missing field `instance`".into()))?
            .build()
    }

    pub fn experiment(&self) -> CliResult<ExperimentConfig<f64>> {
        let instance = self.instance()?;
        if self.policies.is_empty() {
            return Err(CliError::Config("field `policies`: at least one policy is required".into()));
        }
        let policies = self.policies.iter().map(PolicyConfig::build).collect::<CliResult<Vec<_>>>()?;
        let mut config = ExperimentConfig::new(
            instance,
            required(&self.horizon, "horizon")?,
            required(&self.replicates, "replicates")?,
            policies,
        );
        config.init_pulls = self.init_pulls;
        config.base_seed = self.base_seed;
        config.include_warm_start_regret = self.include_warm_start_regret;
        config.validate().map_err(|e| cfg_err(e, "experiment"))?;
        Ok(config)
    }
}
