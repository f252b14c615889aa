//! Finite state/action game environments.
//!
//! Transition kernels and rewards take the raw neighborhood measure `m`,
//! a nonnegative vector over the states whose total mass depends on the
//! graphon. Rewards are maximized; cost-based games enter negated.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{ensure_len, Error, Result};

/// Time structure of a game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Horizon {
    /// `steps` decisions followed by a terminal reward.
    Finite {
        steps: usize,
        #[serde(default = "unit_discount")]
        discount: f64,
    },
    /// Discounted stationary game.
    Infinite { discount: f64 },
}

fn unit_discount() -> f64 {
    1.0
}

impl Horizon {
    pub fn discount(&self) -> f64 {
        match *self {
            Self::Finite { discount, .. } | Self::Infinite { discount } => discount,
        }
    }

    /// Number of table slices: `T + 1` for finite horizons, one otherwise.
    pub fn slices(&self) -> usize {
        match *self {
            Self::Finite { steps, .. } => steps + 1,
            Self::Infinite { .. } => 1,
        }
    }

    pub fn steps(&self) -> Option<usize> {
        match *self {
            Self::Finite { steps, .. } => Some(steps),
            Self::Infinite { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Finite { steps, discount } => {
                if steps == 0 {
                    return Err(Error::Parameter("finite horizon needs at least one step".into()));
                }
                if !(discount > 0.0 && discount <= 1.0) {
                    return Err(Error::Parameter(format!(
                        "finite-horizon discount {discount} outside (0, 1]"
                    )));
                }
            }
            Self::Infinite { discount } => {
                if !(discount > 0.0 && discount < 1.0) {
                    return Err(Error::Parameter(format!(
                        "infinite-horizon discount {discount} outside (0, 1)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Model of a game: kernel, running reward and optional terminal reward.
pub trait Dynamics: Send + Sync + fmt::Debug {
    /// Writes `P(. | x, m, a)` into `out`.
    fn transition(&self, x: usize, m: &[f64], a: usize, out: &mut [f64]);

    fn reward(&self, x: usize, m: &[f64], a: usize) -> f64;

    fn terminal_reward(&self, _x: usize, _m: &[f64]) -> Option<f64> {
        None
    }

    /// True when neither kernel nor rewards read `m`.
    fn measure_independent(&self) -> bool {
        false
    }
}

/// A game together with its state/action labels, horizon and initial law.
#[derive(Debug, Clone)]
pub struct Environment {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    horizon: Horizon,
    initial_law: Vec<f64>,
    coords: Option<Vec<f64>>,
    reward_bound: f64,
    terminal_bound: f64,
    dynamics: Arc<dyn Dynamics>,
}

impl Environment {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        actions: Vec<String>,
        horizon: Horizon,
        initial_law: Vec<f64>,
        coords: Option<Vec<f64>>,
        reward_bound: f64,
        terminal_bound: f64,
        dynamics: Arc<dyn Dynamics>,
    ) -> Result<Self> {
        if states.is_empty() || actions.is_empty() {
            return Err(Error::Construction("environment needs states and actions".into()));
        }
        ensure_len("initial law", states.len(), initial_law.len())?;
        let mass: f64 = initial_law.iter().sum();
        if initial_law.iter().any(|p| *p < 0.0) || (mass - 1.0).abs() > 1e-12 {
            return Err(Error::Construction("initial law is not a probability vector".into()));
        }
        if let Some(c) = &coords {
            ensure_len("state coordinates", states.len(), c.len())?;
        }
        horizon.validate()?;
        Ok(Self {
            name: name.into(),
            states,
            actions,
            horizon,
            initial_law,
            coords,
            reward_bound,
            terminal_bound,
            dynamics,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_labels(&self) -> &[String] {
        &self.states
    }

    pub fn action_labels(&self) -> &[String] {
        &self.actions
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn discount(&self) -> f64 {
        self.horizon.discount()
    }

    pub fn initial_law(&self) -> &[f64] {
        &self.initial_law
    }

    pub fn state_coords(&self) -> Option<&[f64]> {
        self.coords.as_deref()
    }

    /// Stored bound on `|f|`.
    pub fn reward_bound(&self) -> f64 {
        self.reward_bound
    }

    /// Stored bound on `|g|` (zero without a terminal reward).
    pub fn terminal_bound(&self) -> f64 {
        self.terminal_bound
    }

    pub fn measure_independent(&self) -> bool {
        self.dynamics.measure_independent()
    }

    pub fn dynamics(&self) -> &Arc<dyn Dynamics> {
        &self.dynamics
    }

    /// Same game under a different time structure.
    pub fn with_horizon(mut self, horizon: Horizon) -> Result<Self> {
        horizon.validate()?;
        self.horizon = horizon;
        Ok(self)
    }

    pub fn with_initial_law(mut self, law: Vec<f64>) -> Result<Self> {
        ensure_len("initial law", self.states.len(), law.len())?;
        let mass: f64 = law.iter().sum();
        if law.iter().any(|p| *p < 0.0) || (mass - 1.0).abs() > 1e-12 {
            return Err(Error::Construction("initial law is not a probability vector".into()));
        }
        self.initial_law = law;
        Ok(self)
    }

    /// Adds `offset` to every running reward.
    pub fn with_reward_offset(mut self, offset: f64) -> Self {
        self.dynamics = Arc::new(RewardOffset {
            inner: self.dynamics.clone(),
            offset,
        });
        self.reward_bound += offset.abs();
        self
    }

    fn check(&self, x: usize, m: &[f64], a: Option<usize>) -> Result<()> {
        if x >= self.num_states() {
            return Err(Error::Dimension {
                what: "state index",
                expected: self.num_states(),
                got: x,
            });
        }
        if let Some(a) = a {
            if a >= self.num_actions() {
                return Err(Error::Dimension {
                    what: "action index",
                    expected: self.num_actions(),
                    got: a,
                });
            }
        }
        ensure_len("neighborhood measure", self.num_states(), m.len())
    }

    pub fn transition(&self, x: usize, m: &[f64], a: usize) -> Result<Vec<f64>> {
        self.check(x, m, Some(a))?;
        let mut out = vec![0.0; self.num_states()];
        self.dynamics.transition(x, m, a, &mut out);
        Ok(out)
    }

    pub fn reward(&self, x: usize, m: &[f64], a: usize) -> Result<f64> {
        self.check(x, m, Some(a))?;
        Ok(self.dynamics.reward(x, m, a))
    }

    /// Terminal reward, zero when the game has none.
    pub fn terminal_reward(&self, x: usize, m: &[f64]) -> Result<f64> {
        self.check(x, m, None)?;
        Ok(self.dynamics.terminal_reward(x, m).unwrap_or(0.0))
    }

    pub(crate) fn transition_into(&self, x: usize, m: &[f64], a: usize, out: &mut [f64]) {
        self.dynamics.transition(x, m, a, out);
    }

    pub(crate) fn reward_unchecked(&self, x: usize, m: &[f64], a: usize) -> f64 {
        self.dynamics.reward(x, m, a)
    }

    pub(crate) fn terminal_unchecked(&self, x: usize, m: &[f64]) -> f64 {
        self.dynamics.terminal_reward(x, m).unwrap_or(0.0)
    }
}

/// Draws the next state by inverse CDF over the ordered states, consuming
/// exactly one uniform variate.
pub fn sample_transition<R: Rng + ?Sized>(
    env: &Environment,
    rng: &mut R,
    x: usize,
    m: &[f64],
    a: usize,
) -> Result<usize> {
    let probs = env.transition(x, m, a)?;
    Ok(inverse_cdf(&probs, rng.gen::<f64>()))
}

/// Smallest index whose cumulative probability exceeds `u`; zero-probability
/// entries are never returned.
pub(crate) fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

#[derive(Debug)]
struct RewardOffset {
    inner: Arc<dyn Dynamics>,
    offset: f64,
}

impl Dynamics for RewardOffset {
    fn transition(&self, x: usize, m: &[f64], a: usize, out: &mut [f64]) {
        self.inner.transition(x, m, a, out)
    }

    fn reward(&self, x: usize, m: &[f64], a: usize) -> f64 {
        self.inner.reward(x, m, a) + self.offset
    }

    fn terminal_reward(&self, x: usize, m: &[f64]) -> Option<f64> {
        self.inner.terminal_reward(x, m)
    }

    fn measure_independent(&self) -> bool {
        self.inner.measure_independent()
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// SIS

pub const SIS_SUSCEPTIBLE: usize = 0;
pub const SIS_INFECTED: usize = 1;
pub const SIS_UP: usize = 0;
pub const SIS_DOWN: usize = 1;

#[derive(Debug, Clone, Copy)]
struct Sis;

impl Dynamics for Sis {
    fn transition(&self, x: usize, m: &[f64], a: usize, out: &mut [f64]) {
        if x == SIS_INFECTED {
            out[SIS_SUSCEPTIBLE] = 0.5;
            out[SIS_INFECTED] = 0.5;
        } else {
            let p = if a == SIS_UP {
                (0.8 * m[SIS_INFECTED]).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out[SIS_INFECTED] = p;
            out[SIS_SUSCEPTIBLE] = 1.0 - p;
        }
    }

    fn reward(&self, x: usize, _m: &[f64], a: usize) -> f64 {
        let infected = if x == SIS_INFECTED { -2.0 } else { 0.0 };
        let quarantine = if a == SIS_DOWN { -0.5 } else { 0.0 };
        infected + quarantine
    }
}

/// Epidemic game on `{S, I}` with actions `{U (interact), D (quarantine)}`,
/// horizon 50 and a `(0.5, 0.5)` initial law.
pub fn make_sis() -> Environment {
    Environment::new(
        "sis",
        labels(&["S", "I"]),
        labels(&["U", "D"]),
        Horizon::Finite {
            steps: 50,
            discount: 1.0,
        },
        vec![0.5, 0.5],
        None,
        2.5,
        0.0,
        Arc::new(Sis),
    )
    .expect("sis environment is well formed")
}

// ---------------------------------------------------------------------------
// Invest

pub const INVEST_INVEST: usize = 0;
pub const INVEST_OUT: usize = 1;

#[derive(Debug, Clone, Copy)]
struct Invest;

impl Dynamics for Invest {
    fn transition(&self, x: usize, _m: &[f64], a: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if a == INVEST_INVEST && x < 9 {
            out[x + 1] = (9 - x) as f64 / 10.0;
            out[x] = (1 + x) as f64 / 10.0;
        } else {
            out[x] = 1.0;
        }
    }

    fn reward(&self, x: usize, m: &[f64], a: usize) -> f64 {
        let mean_quality: f64 = m.iter().enumerate().map(|(q, w)| q as f64 * w).sum();
        let profit = 0.3 * x as f64 / (1.0 + mean_quality);
        let cost = if a == INVEST_INVEST { 2.0 } else { 0.0 };
        profit - cost
    }
}

/// Product-quality investment game on `{0..9}` with actions `{I, O}`,
/// horizon 50, every firm starting at quality 0.
pub fn make_invest() -> Environment {
    let mut init = vec![0.0; 10];
    init[0] = 1.0;
    Environment::new(
        "invest",
        (0..10).map(|q| q.to_string()).collect(),
        labels(&["I", "O"]),
        Horizon::Finite {
            steps: 50,
            discount: 1.0,
        },
        init,
        Some((0..10).map(f64::from).collect()),
        2.7,
        0.0,
        Arc::new(Invest),
    )
    .expect("invest environment is well formed")
}

// ---------------------------------------------------------------------------
// Flocking

/// How the terminal centroid reads the neighborhood measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Centroid {
    /// `sum coord * m / sum m`, or `0.5` for a massless neighborhood.
    #[default]
    Normalized,
    /// `sum coord * m` as is.
    Raw,
}

/// Time and space discretization of the one-dimensional flocking game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlockingConfig {
    pub grid_size: usize,
    pub action_grid: usize,
    pub dt: f64,
    pub sigma: f64,
    pub c: f64,
    pub t_steps: usize,
    pub centroid: Centroid,
}

impl Default for FlockingConfig {
    fn default() -> Self {
        Self {
            grid_size: 21,
            action_grid: 11,
            dt: 0.1,
            sigma: 0.1,
            c: 1.0,
            t_steps: 10,
            centroid: Centroid::Normalized,
        }
    }
}

impl FlockingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::Parameter("flocking grid_size must be at least 2".into()));
        }
        if self.action_grid < 1 {
            return Err(Error::Parameter("flocking action_grid must be at least 1".into()));
        }
        if !(self.dt > 0.0) || self.t_steps == 0 {
            return Err(Error::Parameter("flocking needs dt > 0 and t_steps >= 1".into()));
        }
        if (self.dt * self.t_steps as f64 - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "flocking dt * t_steps = {} must equal 1",
                self.dt * self.t_steps as f64
            )));
        }
        if !(self.sigma >= 0.0) || !(self.c > 0.0) {
            return Err(Error::Parameter("flocking needs sigma >= 0 and c > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Flocking {
    coords: Vec<f64>,
    velocities: Vec<f64>,
    dt: f64,
    sigma: f64,
    c: f64,
    centroid: Centroid,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Folds a point into `[0, 1]` by repeated reflection at both ends.
fn reflect_unit(mut y: f64) -> f64 {
    y = y.rem_euclid(2.0);
    if y > 1.0 {
        2.0 - y
    } else {
        y
    }
}

impl Flocking {
    fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let n = self.coords.len();
        let h = 1.0 / (n - 1) as f64;
        let lo = if i == 0 { 0.0 } else { self.coords[i] - h / 2.0 };
        let hi = if i == n - 1 { 1.0 } else { self.coords[i] + h / 2.0 };
        (lo, hi)
    }

    fn nearest_cell(&self, y: f64) -> usize {
        let n = self.coords.len();
        ((y * (n - 1) as f64).round() as usize).min(n - 1)
    }

    fn centroid(&self, m: &[f64]) -> f64 {
        let weighted: f64 = self.coords.iter().zip(m).map(|(c, w)| c * w).sum();
        match self.centroid {
            Centroid::Raw => weighted,
            Centroid::Normalized => {
                let mass: f64 = m.iter().sum();
                if mass > 0.0 {
                    weighted / mass
                } else {
                    0.5
                }
            }
        }
    }
}

impl Dynamics for Flocking {
    fn transition(&self, x: usize, _m: &[f64], a: usize, out: &mut [f64]) {
        let mean = self.coords[x] + self.velocities[a] * self.dt;
        let sd = self.sigma * self.dt.sqrt();
        out.iter_mut().for_each(|v| *v = 0.0);
        if sd == 0.0 {
            out[self.nearest_cell(reflect_unit(mean))] = 1.0;
            return;
        }
        // Gaussian folded into [0,1]: images at 2k + y and 2k - y.
        let reach = (8.0 * sd).ceil() as i64 + 2;
        let mass = |lo: f64, hi: f64| normal_cdf((hi - mean) / sd) - normal_cdf((lo - mean) / sd);
        for (i, o) in out.iter_mut().enumerate() {
            let (lo, hi) = self.cell_bounds(i);
            let mut p = 0.0;
            for k in -reach..=reach {
                let shift = 2.0 * k as f64;
                p += mass(shift + lo, shift + hi) + mass(shift - hi, shift - lo);
            }
            *o = p.max(0.0);
        }
        let total: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= total);
    }

    fn reward(&self, _x: usize, _m: &[f64], a: usize) -> f64 {
        let v = self.velocities[a];
        -v * v * self.dt
    }

    fn terminal_reward(&self, x: usize, m: &[f64]) -> Option<f64> {
        let dev = self.coords[x] - self.centroid(m);
        Some(-self.c * dev * dev)
    }

    fn measure_independent(&self) -> bool {
        false
    }
}

/// Euler-Maruyama discretization of the flocking game on a uniform grid of
/// `[0,1]` with reflecting boundaries. Agents start uniformly over the grid.
pub fn make_flocking(cfg: &FlockingConfig) -> Result<Environment> {
    cfg.validate()?;
    let n = cfg.grid_size;
    let coords: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let velocities: Vec<f64> = if cfg.action_grid == 1 {
        vec![0.0]
    } else {
        (0..cfg.action_grid)
            .map(|j| j as f64 / (cfg.action_grid - 1) as f64)
            .collect()
    };
    let max_speed = velocities.iter().copied().fold(0.0, f64::max);
    // Raw centroids can leave [0,1] when the neighborhood mass exceeds one.
    let terminal_bound = match cfg.centroid {
        Centroid::Normalized => cfg.c,
        Centroid::Raw => f64::INFINITY,
    };
    Environment::new(
        "flocking",
        coords.iter().map(|c| format!("{c:.4}")).collect(),
        velocities.iter().map(|v| format!("{v:.4}")).collect(),
        Horizon::Finite {
            steps: cfg.t_steps,
            discount: 1.0,
        },
        vec![1.0 / n as f64; n],
        Some(coords.clone()),
        max_speed * max_speed * cfg.dt,
        terminal_bound,
        Arc::new(Flocking {
            coords,
            velocities,
            dt: cfg.dt,
            sigma: cfg.sigma,
            c: cfg.c,
            centroid: cfg.centroid,
        }),
    )
}

// ---------------------------------------------------------------------------
// One-shot left/right game

pub const TOY_START: usize = 0;
pub const TOY_LEFT: usize = 1;
pub const TOY_RIGHT: usize = 2;

#[derive(Debug, Clone, Copy)]
struct LeftRight;

impl Dynamics for LeftRight {
    fn transition(&self, x: usize, _m: &[f64], a: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if x == TOY_START {
            out[if a == 0 { TOY_LEFT } else { TOY_RIGHT }] = 1.0;
        } else {
            out[x] = 1.0;
        }
    }

    fn reward(&self, _x: usize, _m: &[f64], _a: usize) -> f64 {
        0.0
    }

    fn terminal_reward(&self, x: usize, m: &[f64]) -> Option<f64> {
        Some(if x == TOY_START { 0.0 } else { -m[x] })
    }
}

/// One-shot game: from a start state every player moves left (`-1`) or
/// right (`+1`) and is penalized by the neighborhood mass on its own side.
pub fn make_toy_leftright() -> Environment {
    Environment::new(
        "toy",
        labels(&["start", "-1", "+1"]),
        labels(&["left", "right"]),
        Horizon::Finite {
            steps: 1,
            discount: 1.0,
        },
        vec![1.0, 0.0, 0.0],
        None,
        0.0,
        1.0,
        Arc::new(LeftRight),
    )
    .expect("toy environment is well formed")
}

// ---------------------------------------------------------------------------
// Explicit tables

/// Measure-independent game given by explicit tables.
#[derive(Debug, Clone)]
pub struct TabularDynamics {
    /// `kernel[x][a][y]`
    pub kernel: Vec<Vec<Vec<f64>>>,
    /// `rewards[x][a]`
    pub rewards: Vec<Vec<f64>>,
    /// `terminal[x]`
    pub terminal: Option<Vec<f64>>,
}

impl Dynamics for TabularDynamics {
    fn transition(&self, x: usize, _m: &[f64], a: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.kernel[x][a]);
    }

    fn reward(&self, x: usize, _m: &[f64], a: usize) -> f64 {
        self.rewards[x][a]
    }

    fn terminal_reward(&self, x: usize, _m: &[f64]) -> Option<f64> {
        self.terminal.as_ref().map(|g| g[x])
    }

    fn measure_independent(&self) -> bool {
        true
    }
}

/// Wraps explicit tables as an [`Environment`], validating the kernel.
pub fn make_tabular(
    name: &str,
    dynamics: TabularDynamics,
    horizon: Horizon,
    initial_law: Vec<f64>,
) -> Result<Environment> {
    let states = dynamics.kernel.len();
    let actions = dynamics.kernel.first().map_or(0, Vec::len);
    ensure_len("reward rows", states, dynamics.rewards.len())?;
    for (x, row) in dynamics.kernel.iter().enumerate() {
        ensure_len("kernel actions", actions, row.len())?;
        ensure_len("reward actions", actions, dynamics.rewards[x].len())?;
        for probs in row {
            ensure_len("kernel states", states, probs.len())?;
            let s: f64 = probs.iter().sum();
            if probs.iter().any(|p| *p < 0.0) || (s - 1.0).abs() > 1e-12 {
                return Err(Error::Construction(format!(
                    "kernel row of state {x} is not a probability vector"
                )));
            }
        }
    }
    if let Some(g) = &dynamics.terminal {
        ensure_len("terminal rewards", states, g.len())?;
    }
    let bound = dynamics
        .rewards
        .iter()
        .flatten()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    let tbound = dynamics
        .terminal
        .as_ref()
        .map_or(0.0, |g| g.iter().fold(0.0f64, |acc, r| acc.max(r.abs())));
    Environment::new(
        name,
        (0..states).map(|x| format!("s{x}")).collect(),
        (0..actions).map(|a| format!("a{a}")).collect(),
        horizon,
        initial_law,
        None,
        bound,
        tbound,
        Arc::new(dynamics),
    )
}

// ---------------------------------------------------------------------------
// Config

/// Environment block of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub env: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flocking: Option<FlockingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_override: Option<Horizon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_law: Option<Vec<f64>>,
}

impl EnvConfig {
    pub fn named(env: &str) -> Self {
        Self {
            env: env.to_string(),
            flocking: None,
            horizon_override: None,
            initial_law: None,
        }
    }

    pub fn build(&self) -> Result<Environment> {
        let mut env = match self.env.as_str() {
            "sis" => make_sis(),
            "invest" => make_invest(),
            "toy" => make_toy_leftright(),
            "flocking" => make_flocking(&self.flocking.clone().unwrap_or_default())?,
            other => return Err(Error::Parameter(format!("unknown environment {other:?}"))),
        };
        if let Some(h) = self.horizon_override {
            env = env.with_horizon(h)?;
        }
        if let Some(law) = &self.initial_law {
            env = env.with_initial_law(law.clone())?;
        }
        Ok(env)
    }
}
