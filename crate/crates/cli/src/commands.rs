use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use dicomo_core::degmodel::{read_degree_file, sample_sequence, BiDegreeSequence, DistSpec, MarginalSpec};
use dicomo_core::graphalg::{diameter_exact, neighborhood_profile_graph, neighborhood_profile_lazy, thin_depth_scan};
use dicomo_core::graphgen::{
    binomial_digraph, d_out_model, pair_uniform, read_edge_list, sample_simple, write_edge_list, BinomialVariant,
};
use dicomo_core::gwsim::{
    estimate_survival, extinct_root_counts, martingale_mean, subcritical_decay, thin_event_probability,
};
use dicomo_core::harness::{run_experiment, ExperimentConfig, OmegaRule};
use dicomo_core::rng::{stream, StreamRng};
use dicomo_core::stats::total_variation;
use dicomo_core::theory::{conjugate, solve_survival, theory_constants};
use dicomo_core::{Digraph, Direction, JointDegreeDistribution, OffspringDistribution};

use crate::config::{self, json_arg, Configurable};

/// Writes to stdout; a closed pipe (`dicomo ... | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &impl Serialize) -> Result<ExitCode> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(k) => Ok(rayon::ThreadPoolBuilder::new().num_threads(k).build()?.install(f)),
        None => Ok(f()),
    }
}

macro_rules! configurable {
    ($($t:ty),*) => {$(
        impl Configurable for $t {
            fn config_path(&self) -> Option<&Path> {
                self.config.as_deref()
            }
        }
    )*};
}

configurable!(TheoryArgs, GenerateArgs, DiameterArgs, GwArgs, ExploreArgs);

fn dist_from(dist: &Option<Value>, degrees: &Option<PathBuf>) -> Result<JointDegreeDistribution> {
    match (dist, degrees) {
        (Some(v), None) => {
            let spec: DistSpec = serde_json::from_value(v.clone()).context("distribution spec")?;
            Ok(JointDegreeDistribution::from_spec(&spec)?)
        }
        (None, Some(p)) => Ok(JointDegreeDistribution::empirical(&read_degree_file(p)?)?),
        (Some(_), Some(_)) => bail!("give either --dist or --degrees, not both"),
        (None, None) => bail!("a distribution is required (--dist or --degrees)"),
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct TheoryArgs {
    /// Distribution spec, inline JSON or a file path.
    #[arg(long, value_parser = json_arg)]
    pub dist: Option<Value>,
    /// Degree file; its empirical law is used.
    #[arg(long)]
    pub degrees: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn theory(a: TheoryArgs) -> Result<ExitCode> {
    print_json(&theory_constants(&dist_from(&a.dist, &a.degrees)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    Dcm,
    DcmSimple,
    Dout,
    Binom,
    BinomOriented,
}

/// Flags describing one random digraph.
#[derive(Args, Debug, Clone, Serialize, Deserialize, Default)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Degree file (`in out` per line) for the configuration models.
    #[arg(long)]
    pub degrees: Option<PathBuf>,
    /// Distribution spec, inline JSON or a file path.
    #[arg(long, value_parser = json_arg)]
    pub dist: Option<Value>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Out-degree of the d-out model.
    #[arg(long)]
    pub d: Option<u32>,
    /// Edge probability of the binomial models.
    #[arg(long)]
    pub p: Option<f64>,
    /// Binomial models: edge probability `mean_degree / n`.
    #[arg(long)]
    pub mean_degree: Option<f64>,
    /// Rejection budget of `dcm-simple`.
    #[arg(long)]
    pub max_attempts: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ModelArgs {
    fn need_n(&self) -> Result<usize> {
        self.n.filter(|&n| n >= 1).ok_or_else(|| anyhow!("--n must be given and positive"))
    }

    fn sequence(&self, rng: &mut StreamRng) -> Result<BiDegreeSequence> {
        match (&self.degrees, &self.dist) {
            (Some(p), None) => Ok(read_degree_file(p)?),
            (None, Some(_)) => Ok(sample_sequence(&dist_from(&self.dist, &None)?, self.need_n()?, rng)?),
            (Some(_), Some(_)) => bail!("give either --dist or --degrees, not both"),
            (None, None) => bail!("a degree source is required (--dist with --n, or --degrees)"),
        }
    }

    fn edge_probability(&self, n: usize) -> Result<f64> {
        match (self.p, self.mean_degree) {
            (Some(p), None) => Ok(p),
            (None, Some(c)) => Ok((c / n as f64).min(1.0)),
            _ => bail!("binomial models need exactly one of --p and --mean-degree"),
        }
    }

    /// Draws the graph; the seed defaults to 0.
    fn build(&self) -> Result<(Digraph, u64)> {
        let seed = self.seed.unwrap_or(0);
        let mut rng = stream(seed);
        let g = match self.model.unwrap_or_default() {
            ModelKind::Dcm => pair_uniform(&self.sequence(&mut rng)?, &mut rng),
            ModelKind::DcmSimple => {
                let seq = self.sequence(&mut rng)?;
                sample_simple(&seq, &mut rng, self.max_attempts.unwrap_or(10_000))?.graph
            }
            ModelKind::Dout => {
                let d = self.d.ok_or_else(|| anyhow!("dout needs --d"))?;
                d_out_model(self.need_n()?, d, &mut rng)?
            }
            ModelKind::Binom | ModelKind::BinomOriented => {
                let n = self.need_n()?;
                let variant = if self.model == Some(ModelKind::Binom) {
                    BinomialVariant::Independent
                } else {
                    BinomialVariant::Oriented
                };
                binomial_digraph(n, self.edge_probability(n)?, variant, &mut rng)?
            }
        };
        Ok((g, seed))
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Edge-list destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let (g, seed) = a.model.build()?;
    let text = write_edge_list(&g, Some(seed));
    match &a.out {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote n={} m={} to {}", g.n(), g.m(), p.display());
        }
        None => emit(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct DiameterArgs {
    /// Edge list to read instead of generating.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn load_or_build(graph: &Option<PathBuf>, model: &ModelArgs) -> Result<Digraph> {
    match graph {
        Some(p) => Ok(read_edge_list(p)?.0),
        None => Ok(model.build()?.0),
    }
}

pub fn diameter(a: DiameterArgs) -> Result<ExitCode> {
    let g = load_or_build(&a.graph, &a.model)?;
    let clock = Instant::now();
    let r = with_threads(a.threads, || diameter_exact(&g))?;
    print_json(&json!({
        "diameter": r.diameter,
        "argmax": [r.argmax.0, r.argmax.1],
        "finite_pairs": r.finite_pairs,
        "n": g.n(),
        "m": g.m(),
        "wall_time_s": clock.elapsed().as_secs_f64(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GwOp {
    /// `P(X_horizon > 0)`.
    Survival,
    /// `P(0 < X_r < omega for r = 1..t)`.
    Thin,
    /// TV distance between the extinct-root law and the conjugate law.
    Duality,
    /// `P(X_t > 0)^{1/t}` of a subcritical law.
    Decay,
    /// Mean of `X_t / ν^t`.
    Martingale,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct GwArgs {
    /// Offspring law, e.g. `{"kind":"poisson","lambda":2}`,
    /// `{"kind":"point","k":2}` or `{"kind":"pmf","pmf":[0.25,0.5,0.25]}`.
    #[arg(long, value_parser = json_arg)]
    pub offspring: Option<Value>,
    #[arg(long, value_enum)]
    pub op: Option<GwOp>,
    #[arg(long, default_value_t = 100_000)]
    pub runs: u64,
    /// Generation for `thin`, `decay` and `martingale`.
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub omega: Option<u64>,
    /// Horizon standing in for "forever" in `survival` and `duality`.
    #[arg(long)]
    pub horizon: Option<u32>,
    /// `decay`: also require `X_1 + ... + X_t <= bound`.
    #[arg(long)]
    pub bound: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn gw(a: GwArgs) -> Result<ExitCode> {
    let spec: MarginalSpec = serde_json::from_value(a.offspring.clone().ok_or_else(|| anyhow!("--offspring is required"))?)
        .context("offspring spec")?;
    let xi = OffspringDistribution::from_marginal(&spec.build()?);
    let op = a.op.ok_or_else(|| anyhow!("--op is required"))?;
    if a.runs < 1 {
        bail!("--runs must be positive");
    }
    let mut params = Map::new();
    params.insert("op".into(), serde_json::to_value(op)?);
    params.insert("offspring".into(), serde_json::to_value(&spec)?);
    params.insert("seed".into(), a.seed.into());
    params.insert("mean".into(), xi.mean().into());
    let (estimate, stderr): (f64, Option<f64>) = with_threads(a.threads, || -> Result<_> {
        Ok(match op {
            GwOp::Survival => {
                let horizon = a.horizon.unwrap_or(50);
                let e = estimate_survival(&xi, horizon, a.runs, a.seed);
                params.insert("horizon".into(), horizon.into());
                params.insert("hits".into(), e.hits.into());
                params.insert("fixed_point".into(), solve_survival(&xi).survival.into());
                (e.estimate, Some(e.stderr))
            }
            GwOp::Thin => {
                let t = a.t.ok_or_else(|| anyhow!("thin needs --t"))?;
                let e = thin_event_probability(&xi, a.omega.unwrap_or(50), t, a.runs, a.seed)?;
                params.insert("t".into(), t.into());
                params.insert("omega".into(), e.omega.into());
                params.insert("hits".into(), e.hits.into());
                params.insert("burn_in".into(), serde_json::to_value(e.burn_in)?);
                (e.estimate, Some(e.stderr))
            }
            GwOp::Duality => {
                let horizon = a.horizon.unwrap_or(60);
                let (law, extinct) = extinct_root_counts(&xi, horizon, a.runs, a.seed)?;
                let target = conjugate(&xi, solve_survival(&xi).survival)?;
                params.insert("horizon".into(), horizon.into());
                params.insert("extinct".into(), extinct.into());
                params.insert("conjugate_mean".into(), target.mean().into());
                params.insert("empirical_pmf".into(), serde_json::to_value(law.pmf())?);
                (total_variation(law.pmf(), target.pmf()), None)
            }
            GwOp::Decay => {
                let t = a.t.unwrap_or(10);
                let e = subcritical_decay(&xi, t, a.runs, a.seed, a.bound)?;
                // delta method on the root of a proportion
                let se_frac = (e.fraction * (1.0 - e.fraction) / a.runs as f64).sqrt();
                let se = if e.fraction > 0.0 {
                    e.root_estimate / (f64::from(t) * e.fraction) * se_frac
                } else {
                    f64::NAN
                };
                params.insert("t".into(), t.into());
                params.insert("bound".into(), serde_json::to_value(a.bound)?);
                params.insert("survivors".into(), e.survivors.into());
                (e.root_estimate, se.is_finite().then_some(se))
            }
            GwOp::Martingale => {
                let t = a.t.unwrap_or(10);
                let (mean, se) = martingale_mean(&xi, t, a.runs, a.seed);
                params.insert("t".into(), t.into());
                (mean, Some(se))
            }
        })
    })??;
    print_json(&json!({
        "estimate": estimate,
        "stderr": stderr,
        "runs": a.runs,
        "params": params,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DirArg {
    #[default]
    Out,
    In,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct ExploreArgs {
    /// Edge list to explore instead of pairing lazily.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Start half-edge: a tail index for `out`, a head index for `in`.
    #[arg(long, default_value_t = 0)]
    pub start: u32,
    #[arg(long, value_enum, default_value_t = DirArg::Out)]
    pub direction: DirArg,
    /// Width threshold; the default rule `min(⌈ln⁶ n⌉, n/10)` when absent.
    #[arg(long)]
    pub omega: Option<u64>,
    #[arg(long, default_value_t = 1_000)]
    pub max_t: u32,
    /// Run a thin-depth scan over this many start half-edges instead.
    #[arg(long)]
    pub scan: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn explore(a: ExploreArgs) -> Result<ExitCode> {
    let dir = match a.direction {
        DirArg::Out => Direction::Out,
        DirArg::In => Direction::In,
    };
    if let Some(path) = &a.graph {
        if a.scan.is_some() {
            bail!("--scan explores lazily and needs a degree source, not --graph");
        }
        let g = read_edge_list(path)?.0;
        let omega = a.omega.unwrap_or_else(|| OmegaRule::Default.omega(g.n()));
        return print_json(&neighborhood_profile_graph(&g, a.start, dir, omega, a.max_t)?);
    }
    if !matches!(a.model.model.unwrap_or_default(), ModelKind::Dcm) {
        bail!("lazy exploration is defined for the configuration model only");
    }
    let mut rng = stream(a.model.seed.unwrap_or(0));
    let seq = a.model.sequence(&mut rng)?;
    let omega = a.omega.unwrap_or_else(|| OmegaRule::Default.omega(seq.n()));
    match a.scan {
        Some(budget) => print_json(&thin_depth_scan(&seq, dir, omega, &mut rng, budget)?),
        None => print_json(&neighborhood_profile_lazy(&seq, a.start, dir, omega, a.max_t, &mut rng, None)?),
    }
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Experiment config (an `ExperimentConfig` JSON object); its keys
    /// override the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// diameter_convergence, typical_distance, thin_depth or gw_suite.
    #[arg(long)]
    pub kind: Option<String>,
    /// Model spec, inline JSON or a file path.
    #[arg(long, value_parser = json_arg)]
    pub model: Option<Value>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub replicates: Option<u32>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub pairs: Option<u64>,
    #[arg(long)]
    pub probe_budget: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Explicit width threshold for thin-depth scans.
    #[arg(long)]
    pub omega: Option<u64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub timings: Option<PathBuf>,
    /// Exit with status 2 when the verdict or a property fails.
    #[arg(long)]
    pub strict: bool,
}

impl ExperimentArgs {
    /// The flags in `ExperimentConfig` shape, absent flags omitted.
    fn as_config_object(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.into(), v);
            }
        };
        put("kind", self.kind.clone().map(Value::from));
        put("model", self.model.clone());
        put("sizes", self.sizes.clone().map(|s| json!(s)));
        put("replicates", self.replicates.map(Value::from));
        put("master_seed", self.seed.map(Value::from));
        put("threads", self.threads.map(Value::from));
        put("pairs", self.pairs.map(Value::from));
        put("probe_budget", self.probe_budget.map(Value::from));
        put("tolerance", self.tolerance.map(Value::from));
        put("omega_rule", self.omega.map(|v| json!({"rule": "explicit", "value": v})));
        let mut outputs = Map::new();
        for (k, p) in [("csv", &self.csv), ("summary", &self.summary), ("timings", &self.timings)] {
            if let Some(p) = p {
                outputs.insert(k.into(), json!(p));
            }
        }
        if !outputs.is_empty() {
            m.insert("outputs".into(), Value::Object(outputs));
        }
        m
    }
}

pub fn experiment(a: ExperimentArgs) -> Result<ExitCode> {
    let mut merged = a.as_config_object();
    if let Some(path) = &a.config {
        for (key, value) in config::read_object(path)? {
            // output paths merge one level deep so `--csv` can add to a config's outputs
            match (merged.get_mut(&key), value) {
                (Some(Value::Object(base)), Value::Object(over)) if key == "outputs" => base.extend(over),
                (_, value) => {
                    merged.insert(key, value);
                }
            }
        }
    }
    let cfg = ExperimentConfig::from_json(&Value::Object(merged).to_string())?;
    let report = run_experiment(&cfg)?;
    emit(&(report.summary_json() + "\n"))?;
    let failed = report.summary.pass == Some(false) || report.summary.properties.iter().any(|p| !p.pass);
    Ok(if a.strict && failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}
