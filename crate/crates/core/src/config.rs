//! Run configuration, experiment dispatch and result bundles.
//!
//! A run reads one TOML (or JSON) document and writes into its output
//! directory:
//!
//! * `metrics.csv`: one row per recorded epoch or fixed-point iteration
//! * `equilibrium.json`: population, Q and policy tables with labels
//! * `config.toml`: the effective configuration, seed overrides applied
//! * `provenance.json`: crate version, timestamp and seed
//!
//! Modes that write extra output: `nplayer-sweep` writes `sweep.csv` and
//! `toy-check` writes `toy_check.txt`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, Environment, Horizon, TOY_LEFT, TOY_RIGHT, TOY_START};
use crate::exact::{exact_fpi, ExactOptions, FpiOptions, FpiResult};
use crate::graphon::{Graphon, LabelDiscretization, NeighborhoodWeights};
use crate::learner::{learn_finite, learn_infinite, Benchmark, LearnConfig, LearnResult};
use crate::metrics::{exploitability, metrics_csv, policy_distance, tv_table, w1_table, MetricsRow};
use crate::nplayer::{approx_equilibrium_sweep, sweep_csv, SweepOptions, SweepRow};
use crate::table::{PolicyTable, PopulationTable, QTable};

/// Overrides the root that relative output directories are resolved against.
pub const OUTPUT_ROOT_VAR: &str = "GMFG_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactFpi,
    LearnInfinite,
    LearnFinite,
    NplayerSweep,
    ToyCheck,
}

impl Mode {
    pub fn is_stochastic(self) -> bool {
        !matches!(self, Mode::ExactFpi)
    }
}

fn default_quadrature() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of label classes `D`.
    pub disc: usize,
    #[serde(default = "default_quadrature")]
    pub quadrature_points: usize,
    pub output_dir: PathBuf,
    /// Overrides `learner.record_every`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    /// Learner modes: also solve the game exactly and fill the benchmark
    /// columns of `metrics.csv`.
    #[serde(default)]
    pub benchmark: bool,
    pub env: EnvConfig,
    pub graphon: Graphon,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<LearnConfig>,
    #[serde(default)]
    pub exact: FpiOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepOptions>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        Ok(config)
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Defaults of the toy check: threshold graphon, 16 classes, 2000 epochs
    /// and softmax temperature 0.25. Below about 0.103 the symmetric
    /// equilibrium of the regularized 16-class game is unstable.
    pub fn toy_check(output_dir: impl Into<PathBuf>, seed: u64) -> Self {
        Self {
            mode: Mode::ToyCheck,
            seed: Some(seed),
            disc: 16,
            quadrature_points: 1,
            output_dir: output_dir.into(),
            record_every: None,
            benchmark: false,
            env: EnvConfig::named("toy"),
            graphon: Graphon::Threshold,
            learner: Some(LearnConfig {
                epochs: 2000,
                inner_steps: 1,
                eta: 0.25,
                record_every: 100,
                ..LearnConfig::default()
            }),
            exact: FpiOptions::default(),
            sweep: None,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.disc >= 1, "disc must be at least 1");
        ensure!(self.quadrature_points >= 1, "quadrature_points must be at least 1");
        if self.mode.is_stochastic() {
            ensure!(self.seed.is_some(), "mode {:?} needs a seed", self.mode);
        }
        match self.mode {
            Mode::LearnInfinite | Mode::LearnFinite => {
                ensure!(self.learner.is_some(), "mode {:?} needs a [learner] block", self.mode);
            }
            Mode::NplayerSweep => {
                ensure!(self.sweep.is_some(), "mode nplayer-sweep needs a [sweep] block");
            }
            Mode::ExactFpi | Mode::ToyCheck => {}
        }
        if let Some(l) = &self.learner {
            self.effective_learner(l).validate()?;
        }
        Ok(())
    }

    fn effective_learner(&self, l: &LearnConfig) -> LearnConfig {
        let mut l = l.clone();
        if let Some(seed) = self.seed {
            l.seed = seed;
        }
        if let Some(r) = self.record_every {
            l.record_every = r;
        }
        l
    }

    /// Output directory after applying the output-root override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_VAR) {
            Some(root) if self.output_dir.is_relative() => PathBuf::from(root).join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }
}

/// Tables of an equilibrium together with their labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDump {
    pub env: String,
    pub mode: Mode,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub classes: usize,
    pub class_midpoints: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_coords: Option<Vec<f64>>,
    pub population: PopulationTable,
    pub q: QTable,
    pub policy: PolicyTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploitability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub timestamp_unix: u64,
    pub seed: Option<u64>,
    pub mode: Mode,
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub equilibrium: EquilibriumDump,
    pub metrics: Vec<MetricsRow>,
    pub sweep: Option<Vec<SweepRow>>,
    pub toy_check: Option<ToyCheck>,
    pub provenance: Provenance,
}

/// Result of the toy-game equilibrium check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyCheck {
    pub tolerance: f64,
    /// Largest `|p - 1/2|` over class action probabilities and the mass on
    /// each side.
    pub max_deviation: f64,
    pub pass: bool,
}

impl ToyCheck {
    pub fn line(&self) -> String {
        format!(
            "toy-check: {} (max |p - 1/2| = {:.4}, tolerance {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.max_deviation,
            self.tolerance
        )
    }
}

struct Setup {
    env: Environment,
    disc: LabelDiscretization,
    weights: NeighborhoodWeights,
}

fn setup(config: &RunConfig) -> anyhow::Result<Setup> {
    let env = config.env.build().context("building environment")?;
    let disc = LabelDiscretization::new(config.disc)?;
    let weights = NeighborhoodWeights::precompute(&config.graphon, &disc, config.quadrature_points)
        .context("precomputing neighborhood weights")?;
    Ok(Setup { env, disc, weights })
}

fn solve_exact(s: &Setup, opts: &FpiOptions) -> anyhow::Result<FpiResult> {
    let slices = s.env.horizon().slices();
    let init = PopulationTable::uniform(slices, s.disc.classes(), s.env.num_states());
    exact_fpi(&s.env, &s.weights, &init, opts).context("exact fixed-point iteration")
}

fn fpi_metrics(res: &FpiResult, final_exploitability: f64) -> Vec<MetricsRow> {
    let last = res.history.len().saturating_sub(1);
    res.history
        .iter()
        .enumerate()
        .map(|(i, step)| MetricsRow {
            epoch: step.iteration,
            tv_gap_m: step.step_gap,
            l2_gap_q: step.q_gap,
            tv_to_benchmark: None,
            tv_policy_to_benchmark: None,
            w1_to_benchmark: None,
            exploitability: (i == last).then_some(final_exploitability),
        })
        .collect()
}

fn run_learner(s: &Setup, config: &RunConfig, learner: &LearnConfig) -> anyhow::Result<LearnResult> {
    let classes = s.disc.classes();
    let (xs, acts) = (s.env.num_states(), s.env.num_actions());
    let slices = s.env.horizon().slices();
    let benchmark = if config.benchmark {
        let opts = FpiOptions {
            solver: ExactOptions {
                eta: learner.eta,
                ..config.exact.solver
            },
            ..config.exact
        };
        let res = solve_exact(s, &opts)?;
        Some(Benchmark {
            population: res.population,
            policy: res.policy,
        })
    } else {
        None
    };
    let m0 = PopulationTable::uniform(slices, classes, xs);
    let q0 = QTable::zeros(slices, classes, xs, acts);
    let res = if s.env.horizon().is_finite() {
        learn_finite(&s.env, &s.weights, learner, &m0, &q0, benchmark.as_ref())
    } else {
        learn_infinite(&s.env, &s.weights, learner, &m0, &q0, benchmark.as_ref())
    };
    res.context("running the online learner")
}

fn toy_check(res: &LearnResult) -> ToyCheck {
    let tolerance = 0.05;
    let mut worst = 0.0f64;
    for d in 0..res.policy.classes() {
        for p in res.policy.probs(0, d, TOY_START) {
            worst = worst.max((p - 0.5).abs());
        }
        let row = res.population.row(1, d);
        for x in [TOY_LEFT, TOY_RIGHT] {
            worst = worst.max((row[x] - 0.5).abs());
        }
    }
    ToyCheck {
        tolerance,
        max_deviation: worst,
        pass: worst <= tolerance,
    }
}

/// Runs the configured mode and writes the result bundle.
pub fn run(config: &RunConfig) -> anyhow::Result<ResultBundle> {
    config.validate().context("invalid configuration")?;
    let s = setup(config)?;
    let mut sweep = None;
    let mut toy = None;
    let (population, q, policy, metrics, expl) = match config.mode {
        Mode::ExactFpi | Mode::NplayerSweep => {
            let res = solve_exact(&s, &config.exact)?;
            let opts = ExactOptions {
                eta: res.policy.temperature.unwrap_or(config.exact.solver.eta),
                ..config.exact.solver
            };
            let e = exploitability(&s.env, &s.weights, &res.population, &res.policy, &opts)?;
            let rows = fpi_metrics(&res, e);
            if config.mode == Mode::NplayerSweep {
                let mut opts = config.sweep.clone().unwrap_or_default();
                opts.seed = config.seed.unwrap_or(opts.seed);
                let rows = approx_equilibrium_sweep(&s.env, &config.graphon, &res.policy, &s.disc, &opts)
                    .context("n-player sweep")?;
                sweep = Some(rows);
            }
            (res.population, res.q, res.policy, rows, Some(e))
        }
        Mode::LearnInfinite | Mode::LearnFinite | Mode::ToyCheck => {
            let learner = config.effective_learner(config.learner.as_ref().unwrap_or(&LearnConfig::default()));
            match (config.mode, s.env.horizon()) {
                (Mode::LearnInfinite, Horizon::Finite { .. }) => {
                    bail!("mode learn-infinite needs an infinite-horizon environment (set env.horizon_override)")
                }
                (Mode::LearnFinite | Mode::ToyCheck, Horizon::Infinite { .. }) => {
                    bail!("mode {:?} needs a finite-horizon environment", config.mode)
                }
                _ => {}
            }
            let res = run_learner(&s, config, &learner)?;
            if config.mode == Mode::ToyCheck {
                ensure!(s.env.name() == "toy", "toy-check runs on the toy environment");
                toy = Some(toy_check(&res));
            }
            let e = res.history.last().and_then(|r| r.exploitability);
            (res.population, res.q, res.policy, res.history, e)
        }
    };

    let equilibrium = EquilibriumDump {
        env: s.env.name().to_string(),
        mode: config.mode,
        states: s.env.state_labels().to_vec(),
        actions: s.env.action_labels().to_vec(),
        classes: s.disc.classes(),
        class_midpoints: (0..s.disc.classes()).map(|d| s.disc.midpoint(d)).collect(),
        state_coords: s.env.state_coords().map(<[f64]>::to_vec),
        population,
        q,
        policy,
        exploitability: expl,
    };
    let provenance = Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        seed: config.seed,
        mode: config.mode,
    };
    let dir = config.resolved_output_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, text: String| -> anyhow::Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    write("metrics.csv", metrics_csv(&metrics))?;
    write("equilibrium.json", serde_json::to_string_pretty(&equilibrium)?)?;
    write("config.toml", config.to_toml()?)?;
    write("provenance.json", serde_json::to_string_pretty(&provenance)?)?;
    if let Some(rows) = &sweep {
        write("sweep.csv", sweep_csv(rows))?;
    }
    if let Some(t) = &toy {
        write("toy_check.txt", format!("{}\n", t.line()))?;
    }
    Ok(ResultBundle {
        dir,
        config: config.clone(),
        equilibrium,
        metrics,
        sweep,
        toy_check: toy,
        provenance,
    })
}

/// Distances between two equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub tv: f64,
    pub policy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w1: Option<f64>,
}

pub fn load_equilibrium(dir: &Path) -> anyhow::Result<EquilibriumDump> {
    let path = if dir.is_dir() { dir.join("equilibrium.json") } else { dir.to_path_buf() };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn compare(a: &EquilibriumDump, b: &EquilibriumDump) -> anyhow::Result<CompareReport> {
    ensure!(a.env == b.env, "environments differ: {} vs {}", a.env, b.env);
    ensure!(a.states == b.states, "state sets differ");
    ensure!(a.classes == b.classes, "class counts differ: {} vs {}", a.classes, b.classes);
    let tv = tv_table(&a.population, &b.population).context("comparing populations")?;
    let policy = policy_distance(&a.policy, &b.policy).context("comparing policies")?;
    let w1 = match &a.state_coords {
        Some(c) => Some(w1_table(&a.population, &b.population, c)?),
        None => None,
    };
    Ok(CompareReport { tv, policy, w1 })
}
