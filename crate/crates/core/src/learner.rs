//! Oracle-free online learner.
//!
//! Each label class follows one online trajectory per epoch. The same
//! samples drive a SARSA update of the class Q-table and a Monte-Carlo
//! update of the class population row, so neither a model of the dynamics
//! nor a best-response oracle is needed.
//!
//! Classes only read the population snapshot taken at the start of the
//! epoch and write disjoint tables, so they run concurrently and the result
//! does not depend on the order in which classes are processed.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{inverse_cdf, Environment, Horizon};
use crate::error::{ensure_len, Error, Result};
use crate::exact::{softmax_into, softmax_policy, ClassModel, ExactOptions};
use crate::graphon::NeighborhoodWeights;
use crate::metrics::{
    epoch_gaps, exploitability, policy_distance, tv_table, w1_table, MetricsRow,
};
use crate::rng::{derive, Stream};
use crate::table::{PolicyTable, PopulationTable, QTable};

/// How the inner step counter of the infinite-horizon learner is indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StepIndexing {
    /// `tau` restarts at zero every epoch.
    #[default]
    PerEpoch,
    /// `tau` keeps counting across epochs.
    Global,
}

/// `alpha_tau = alpha0 / (1 + tau)`, `beta_tau = beta0 / (1 + tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepSchedule {
    pub alpha0: f64,
    pub beta0: f64,
    pub indexing: StepIndexing,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            beta0: 1.0,
            indexing: StepIndexing::PerEpoch,
        }
    }
}

impl StepSchedule {
    pub fn alpha(&self, tau: u64) -> f64 {
        self.alpha0 / (1.0 + tau as f64)
    }

    pub fn beta(&self, tau: u64) -> f64 {
        self.beta0 / (1.0 + tau as f64)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha0", self.alpha0), ("beta0", self.beta0)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Parameter(format!("{name} = {v} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Visit-count step size `1 / (1 + n)` with `n` the number of earlier visits.
pub fn visit_rate(previous_visits: u64) -> f64 {
    1.0 / (1.0 + previous_visits as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    /// Outer epochs `K`.
    pub epochs: usize,
    /// Inner steps `H` per class and epoch (infinite horizon only).
    pub inner_steps: usize,
    /// Softmax temperature of the policy operator.
    pub eta: f64,
    pub seed: u64,
    pub schedule: StepSchedule,
    /// Record metrics every this many epochs (and at the last epoch).
    pub record_every: usize,
    /// Compute exploitability at recorded epochs.
    pub track_exploitability: bool,
    /// Finite horizon only: read the neighborhood measure of slice 0 at
    /// every time step instead of slice `t`.
    pub freeze_population: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            inner_steps: 20_000,
            eta: 0.1,
            seed: 0,
            schedule: StepSchedule::default(),
            record_every: 1,
            track_exploitability: true,
            freeze_population: false,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.inner_steps == 0 || self.record_every == 0 {
            return Err(Error::Parameter(
                "epochs, inner_steps and record_every must be at least 1".into(),
            ));
        }
        if !(self.eta > 0.0) {
            return Err(Error::Parameter(format!("eta = {} must be positive", self.eta)));
        }
        self.schedule.validate()
    }
}

/// Reference equilibrium the learner is compared against.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub population: PopulationTable,
    pub policy: PolicyTable,
}

/// Worst invariant readings seen during a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantLog {
    /// Largest simplex violation of any population row after any update.
    pub max_simplex_violation: f64,
    /// Largest `|Q|` written by any update.
    pub max_abs_q: f64,
    pub updates: u64,
}

impl InvariantLog {
    fn merge(&mut self, other: &Self) {
        self.max_simplex_violation = self.max_simplex_violation.max(other.max_simplex_violation);
        self.max_abs_q = self.max_abs_q.max(other.max_abs_q);
        self.updates += other.updates;
    }
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    pub population: PopulationTable,
    pub q: QTable,
    pub policy: PolicyTable,
    pub history: Vec<MetricsRow>,
    pub invariants: InvariantLog,
}

/// SARSA update of one cell:
/// `Q(x,a) <- (1 - alpha) Q(x,a) + alpha (r + gamma Q(x', a'))`.
///
/// `q` is a `|X| x |A|` block in row-major order.
#[allow(clippy::too_many_arguments)]
pub fn sarsa_step(
    q: &mut [f64],
    actions: usize,
    x: usize,
    a: usize,
    reward: f64,
    x_next: usize,
    a_next: usize,
    alpha: f64,
    gamma: f64,
) -> Result<()> {
    let cells = q.len();
    for (idx, what) in [(x * actions + a, "state-action cell"), (x_next * actions + a_next, "next state-action cell")] {
        if idx >= cells || a >= actions || a_next >= actions {
            return Err(Error::Dimension {
                what,
                expected: cells,
                got: idx,
            });
        }
    }
    let target = reward + gamma * q[x_next * actions + a_next];
    let cell = &mut q[x * actions + a];
    *cell = (1.0 - alpha) * *cell + alpha * target;
    Ok(())
}

/// Monte-Carlo population update `M <- (1 - beta) M + beta delta_{x'}`.
pub fn population_step(row: &mut [f64], x_next: usize, beta: f64) -> Result<()> {
    if x_next >= row.len() {
        return Err(Error::Dimension {
            what: "next state",
            expected: row.len(),
            got: x_next,
        });
    }
    row.iter_mut().for_each(|m| *m *= 1.0 - beta);
    row[x_next] += beta;
    Ok(())
}

fn row_violation(row: &[f64]) -> f64 {
    let neg = row.iter().fold(0.0f64, |acc, &v| acc.max(-v));
    neg.max((row.iter().sum::<f64>() - 1.0).abs())
}

fn sample_action<R: Rng + ?Sized>(q_row: &[f64], eta: f64, buf: &mut [f64], rng: &mut R) -> usize {
    softmax_into(q_row, eta, buf);
    inverse_cdf(buf, rng.gen::<f64>())
}

/// Per-class learner state, laid out `[t][x][a]` and `[t][x]`.
#[derive(Debug, Clone)]
struct ClassState {
    q: Vec<f64>,
    m: Vec<f64>,
    /// Finite horizon: earlier updates of each population slice.
    slice_visits: Vec<u64>,
    /// Finite horizon: earlier updates of each `(t, x, a)` cell.
    cell_visits: Vec<u64>,
    log: InvariantLog,
}

fn split_states(
    q: &QTable,
    m: &PopulationTable,
) -> Vec<ClassState> {
    let (times, xs, acts) = (q.times(), q.states(), q.actions());
    (0..q.classes())
        .map(|d| {
            let mut qv = Vec::with_capacity(times * xs * acts);
            let mut mv = Vec::with_capacity(times * xs);
            for t in 0..times {
                qv.extend_from_slice(q.class_slice(t, d));
                mv.extend_from_slice(m.row(t, d));
            }
            ClassState {
                q: qv,
                m: mv,
                slice_visits: vec![0; times],
                cell_visits: vec![0; times * xs * acts],
                log: InvariantLog::default(),
            }
        })
        .collect()
}

fn join_states(states: &[ClassState], times: usize, xs: usize, acts: usize) -> (QTable, PopulationTable) {
    let classes = states.len();
    let mut q = QTable::zeros(times, classes, xs, acts);
    let mut m = PopulationTable::uniform(times, classes, xs);
    for (d, s) in states.iter().enumerate() {
        for t in 0..times {
            q.class_slice_mut(t, d)
                .copy_from_slice(&s.q[t * xs * acts..(t + 1) * xs * acts]);
            m.set_row(t, d, &s.m[t * xs..(t + 1) * xs]);
        }
    }
    (q, m)
}

fn validate_inputs(
    env: &Environment,
    weights: &NeighborhoodWeights,
    config: &LearnConfig,
    m_init: &PopulationTable,
    q_init: &QTable,
) -> Result<()> {
    config.validate()?;
    crate::exact::check_inputs(env, weights, m_init)?;
    ensure_len("q slices", m_init.times(), q_init.times())?;
    ensure_len("q classes", m_init.classes(), q_init.classes())?;
    ensure_len("q states", env.num_states(), q_init.states())?;
    ensure_len("q actions", env.num_actions(), q_init.actions())
}

struct Recorder<'a> {
    env: &'a Environment,
    weights: &'a NeighborhoodWeights,
    config: &'a LearnConfig,
    benchmark: Option<&'a Benchmark>,
    rows: Vec<MetricsRow>,
}

impl Recorder<'_> {
    fn record(
        &mut self,
        epoch: usize,
        prev: &(QTable, PopulationTable),
        curr: &(QTable, PopulationTable),
    ) -> Result<()> {
        let (tv_gap_m, l2_gap_q) = epoch_gaps(&prev.1, &curr.1, &prev.0, &curr.0)?;
        let policy = softmax_policy(&curr.0, self.config.eta)?;
        let mut row = MetricsRow {
            epoch,
            tv_gap_m,
            l2_gap_q,
            tv_to_benchmark: None,
            tv_policy_to_benchmark: None,
            w1_to_benchmark: None,
            exploitability: None,
        };
        if let Some(b) = self.benchmark {
            row.tv_to_benchmark = Some(tv_table(&curr.1, &b.population)?);
            row.tv_policy_to_benchmark = Some(policy_distance(&policy, &b.policy)?);
            row.w1_to_benchmark = match self.env.state_coords() {
                Some(c) => Some(w1_table(&curr.1, &b.population, c)?),
                None => None,
            };
        }
        if self.config.track_exploitability {
            let opts = ExactOptions {
                eta: self.config.eta,
                ..ExactOptions::default()
            };
            row.exploitability = Some(exploitability(self.env, self.weights, &curr.1, &policy, &opts)?);
        }
        self.rows.push(row);
        Ok(())
    }
}

fn is_record_epoch(config: &LearnConfig, k: usize) -> bool {
    (k + 1).is_multiple_of(config.record_every) || k + 1 == config.epochs
}

/// Infinite-horizon learner: `K` epochs of `H` concurrent SARSA and
/// population updates per class, with rewards and transitions driven by the
/// neighborhood measure of the epoch-start population.
pub fn learn_infinite(
    env: &Environment,
    weights: &NeighborhoodWeights,
    config: &LearnConfig,
    m_init: &PopulationTable,
    q_init: &QTable,
    benchmark: Option<&Benchmark>,
) -> Result<LearnResult> {
    let order: Vec<usize> = (0..weights.classes()).collect();
    learn_infinite_ordered(env, weights, config, m_init, q_init, benchmark, &order, true)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn learn_infinite_ordered(
    env: &Environment,
    weights: &NeighborhoodWeights,
    config: &LearnConfig,
    m_init: &PopulationTable,
    q_init: &QTable,
    benchmark: Option<&Benchmark>,
    order: &[usize],
    parallel: bool,
) -> Result<LearnResult> {
    let Horizon::Infinite { discount } = env.horizon() else {
        return Err(Error::Horizon("learn_infinite needs an infinite-horizon game"));
    };
    validate_inputs(env, weights, config, m_init, q_init)?;
    let (xs, acts) = (env.num_states(), env.num_actions());
    let mut states = split_states(q_init, m_init);
    let mut recorder = Recorder {
        env,
        weights,
        config,
        benchmark,
        rows: Vec::new(),
    };
    let h = config.inner_steps as u64;
    for k in 0..config.epochs {
        let prev = join_states(&states, 1, xs, acts);
        let models: Vec<ClassModel> = weights
            .all_measures(&prev.1, 0)
            .iter()
            .map(|m| ClassModel::build(env, m))
            .collect();
        let run = |d: usize, s: &mut ClassState| {
            let model = &models[d];
            let mut rng = derive(config.seed, Stream::LearnInfinite, &[k as u64, d as u64]);
            let mut buf = vec![0.0; acts];
            let mut x = inverse_cdf(&s.m, rng.gen::<f64>());
            let mut a = sample_action(&s.q[x * acts..(x + 1) * acts], config.eta, &mut buf, &mut rng);
            let offset = match config.schedule.indexing {
                StepIndexing::PerEpoch => 0,
                StepIndexing::Global => k as u64 * h,
            };
            for tau in 0..h {
                let r = model.reward(x, a);
                let x_next = inverse_cdf(model.probs(x, a), rng.gen::<f64>());
                let a_next = sample_action(
                    &s.q[x_next * acts..(x_next + 1) * acts],
                    config.eta,
                    &mut buf,
                    &mut rng,
                );
                let alpha = config.schedule.alpha(offset + tau);
                let beta = config.schedule.beta(offset + tau);
                let target = r + discount * s.q[x_next * acts + a_next];
                let cell = &mut s.q[x * acts + a];
                *cell = (1.0 - alpha) * *cell + alpha * target;
                s.log.max_abs_q = s.log.max_abs_q.max(cell.abs());
                s.m.iter_mut().for_each(|v| *v *= 1.0 - beta);
                s.m[x_next] += beta;
                s.log.max_simplex_violation = s.log.max_simplex_violation.max(row_violation(&s.m));
                s.log.updates += 1;
                x = x_next;
                a = a_next;
            }
        };
        run_classes(&mut states, order, parallel, run);
        if is_record_epoch(config, k) {
            let curr = join_states(&states, 1, xs, acts);
            recorder.record(k + 1, &prev, &curr)?;
        }
    }
    finish(states, recorder, 1, xs, acts, config)
}

fn run_classes<F>(states: &mut [ClassState], order: &[usize], parallel: bool, run: F)
where
    F: Fn(usize, &mut ClassState) + Sync,
{
    if parallel {
        states.par_iter_mut().enumerate().for_each(|(d, s)| run(d, s));
    } else {
        let mut slots: Vec<Option<&mut ClassState>> = states.iter_mut().map(Some).collect();
        for &d in order {
            if let Some(s) = slots[d].take() {
                run(d, s);
            }
        }
    }
}

fn finish(
    states: Vec<ClassState>,
    recorder: Recorder<'_>,
    times: usize,
    xs: usize,
    acts: usize,
    config: &LearnConfig,
) -> Result<LearnResult> {
    let mut invariants = InvariantLog::default();
    for s in &states {
        invariants.merge(&s.log);
    }
    let (q, population) = join_states(&states, times, xs, acts);
    let policy = softmax_policy(&q, config.eta)?;
    Ok(LearnResult {
        population,
        q,
        policy,
        history: recorder.rows,
        invariants,
    })
}

/// Finite-horizon learner: one trajectory `t = 0..T-1` per class and epoch,
/// time-indexed tables, and visit-count step sizes
/// `beta = 1/(1 + #slice visits)`, `alpha = 1/(1 + #(t,x,a) visits)`.
///
/// The population slice `t + 1` is the running average of the states
/// observed at time `t + 1`; slice 0 stays at the initial law. The terminal
/// Q-slice is reset each epoch to `g` against the epoch-start population.
pub fn learn_finite(
    env: &Environment,
    weights: &NeighborhoodWeights,
    config: &LearnConfig,
    m_init: &PopulationTable,
    q_init: &QTable,
    benchmark: Option<&Benchmark>,
) -> Result<LearnResult> {
    let order: Vec<usize> = (0..weights.classes()).collect();
    learn_finite_ordered(env, weights, config, m_init, q_init, benchmark, &order, true)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn learn_finite_ordered(
    env: &Environment,
    weights: &NeighborhoodWeights,
    config: &LearnConfig,
    m_init: &PopulationTable,
    q_init: &QTable,
    benchmark: Option<&Benchmark>,
    order: &[usize],
    parallel: bool,
) -> Result<LearnResult> {
    let Horizon::Finite { steps, discount } = env.horizon() else {
        return Err(Error::Horizon("learn_finite needs a finite-horizon game"));
    };
    validate_inputs(env, weights, config, m_init, q_init)?;
    let (xs, acts) = (env.num_states(), env.num_actions());
    let times = steps + 1;
    let mut m_start = m_init.clone();
    for d in 0..m_start.classes() {
        m_start.set_row(0, d, env.initial_law());
    }
    let mut states = split_states(q_init, &m_start);
    let mut recorder = Recorder {
        env,
        weights,
        config,
        benchmark,
        rows: Vec::new(),
    };
    let block = xs * acts;
    for k in 0..config.epochs {
        let prev = join_states(&states, times, xs, acts);
        let measures: Vec<Vec<Vec<f64>>> = (0..times)
            .map(|t| {
                let src = if config.freeze_population { 0 } else { t };
                weights.all_measures(&prev.1, src)
            })
            .collect();
        let models: Vec<Vec<ClassModel>> = measures[..steps]
            .iter()
            .map(|per_class| per_class.iter().map(|m| ClassModel::build(env, m)).collect())
            .collect();
        let run = |d: usize, s: &mut ClassState| {
            let mut rng = derive(config.seed, Stream::LearnFinite, &[k as u64, d as u64]);
            let mut buf = vec![0.0; acts];
            for x in 0..xs {
                let g = env.terminal_unchecked(x, &measures[steps][d]);
                s.q[steps * block + x * acts..steps * block + (x + 1) * acts].fill(g);
            }
            let mut x = inverse_cdf(&s.m[..xs], rng.gen::<f64>());
            let mut a = sample_action(&s.q[x * acts..(x + 1) * acts], config.eta, &mut buf, &mut rng);
            for t in 0..steps {
                let model = &models[t][d];
                let r = model.reward(x, a);
                let x_next = inverse_cdf(model.probs(x, a), rng.gen::<f64>());
                let next_row = (t + 1) * block + x_next * acts;
                let a_next = sample_action(&s.q[next_row..next_row + acts], config.eta, &mut buf, &mut rng);

                let beta = visit_rate(s.slice_visits[t + 1]);
                s.slice_visits[t + 1] += 1;
                let row = &mut s.m[(t + 1) * xs..(t + 2) * xs];
                row.iter_mut().for_each(|v| *v *= 1.0 - beta);
                row[x_next] += beta;
                s.log.max_simplex_violation = s.log.max_simplex_violation.max(row_violation(row));

                let cell_idx = t * block + x * acts + a;
                let alpha = visit_rate(s.cell_visits[cell_idx]);
                s.cell_visits[cell_idx] += 1;
                let target = r + discount * s.q[next_row + a_next];
                let cell = &mut s.q[cell_idx];
                *cell = (1.0 - alpha) * *cell + alpha * target;
                s.log.max_abs_q = s.log.max_abs_q.max(cell.abs());
                s.log.updates += 1;

                x = x_next;
                a = a_next;
            }
        };
        run_classes(&mut states, order, parallel, run);
        if is_record_epoch(config, k) {
            let curr = join_states(&states, times, xs, acts);
            recorder.record(k + 1, &prev, &curr)?;
        }
    }
    finish(states, recorder, times, xs, acts, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_sis, make_tabular, TabularDynamics};
    use crate::graphon::{Graphon, LabelDiscretization};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn sarsa_examples() {
        let mut q = vec![0.0; 4];
        sarsa_step(&mut q, 2, 0, 1, 1.0, 1, 0, 1.0, 0.5).unwrap();
        assert_eq!(q[1], 1.0);
        let before = q.clone();
        sarsa_step(&mut q, 2, 1, 1, 5.0, 0, 1, 0.0, 0.5).unwrap();
        assert_eq!(q, before);
        let mut q = vec![2.0, 0.0, 0.0, 2.0];
        sarsa_step(&mut q, 2, 0, 0, 1.0, 1, 1, 0.5, 0.5).unwrap();
        assert_eq!(q[0], 2.0);
        assert_eq!(&q[1..], &[0.0, 0.0, 2.0]);
        assert!(sarsa_step(&mut q, 2, 2, 0, 1.0, 0, 0, 0.5, 0.5).is_err());
        assert!(sarsa_step(&mut q, 2, 0, 2, 1.0, 0, 0, 0.5, 0.5).is_err());
    }

    #[test]
    fn population_examples() {
        let mut m = vec![0.5, 0.5];
        population_step(&mut m, 1, 0.1).unwrap();
        assert_abs_diff_eq!(m[0], 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1], 0.55, epsilon = 1e-15);
        population_step(&mut m, 0, 1.0).unwrap();
        assert_eq!(m, vec![1.0, 0.0]);
        assert!(population_step(&mut m, 2, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn population_steps_stay_on_simplex(
            steps in proptest::collection::vec((0usize..4, 0.0f64..=1.0), 1000)
        ) {
            let mut m = vec![0.25; 4];
            for (x, beta) in steps {
                population_step(&mut m, x, beta).unwrap();
                prop_assert!(row_violation(&m) <= 1e-12);
            }
        }
    }

    #[test]
    fn schedules() {
        let s = StepSchedule::default();
        assert_eq!(s.alpha(0), 1.0);
        assert_eq!(s.beta(3), 0.25);
        assert_eq!(visit_rate(0), 1.0);
        assert_eq!(visit_rate(4), 0.2);
        let bad = StepSchedule {
            alpha0: 1.5,
            ..s
        };
        assert!(bad.validate().is_err());
    }

    fn sis_inf() -> Environment {
        make_sis().with_horizon(Horizon::Infinite { discount: 0.9 }).unwrap()
    }

    fn small_config() -> LearnConfig {
        LearnConfig {
            epochs: 4,
            inner_steps: 300,
            seed: 11,
            track_exploitability: false,
            ..LearnConfig::default()
        }
    }

    #[test]
    fn one_full_step_population_is_a_dirac() {
        let env = sis_inf();
        let disc = LabelDiscretization::new(3).unwrap();
        let w = NeighborhoodWeights::precompute(&Graphon::Threshold, &disc, 1).unwrap();
        let cfg = LearnConfig {
            epochs: 1,
            inner_steps: 1,
            ..small_config()
        };
        let res = learn_infinite(
            &env,
            &w,
            &cfg,
            &PopulationTable::uniform(1, 3, 2),
            &QTable::zeros(1, 3, 2, 2),
            None,
        )
        .unwrap();
        for d in 0..3 {
            let row = res.population.row(0, d);
            assert!(row == [1.0, 0.0] || row == [0.0, 1.0], "{row:?}");
        }
    }

    #[test]
    fn replay_and_class_order_are_deterministic() {
        let env = sis_inf();
        let disc = LabelDiscretization::new(4).unwrap();
        let w = NeighborhoodWeights::precompute(&Graphon::UniformAttachment, &disc, 1).unwrap();
        let m0 = PopulationTable::uniform(1, 4, 2);
        let q0 = QTable::zeros(1, 4, 2, 2);
        let cfg = small_config();
        let a = learn_infinite(&env, &w, &cfg, &m0, &q0, None).unwrap();
        let b = learn_infinite(&env, &w, &cfg, &m0, &q0, None).unwrap();
        let c = learn_infinite_ordered(&env, &w, &cfg, &m0, &q0, None, &[3, 1, 0, 2], false).unwrap();
        assert_eq!(a.q, b.q);
        assert_eq!(a.population, b.population);
        assert_eq!(a.q, c.q);
        assert_eq!(a.population, c.population);

        let fin = make_sis().with_horizon(Horizon::Finite { steps: 5, discount: 1.0 }).unwrap();
        let m0 = PopulationTable::uniform(6, 4, 2);
        let q0 = QTable::zeros(6, 4, 2, 2);
        let a = learn_finite(&fin, &w, &cfg, &m0, &q0, None).unwrap();
        let c = learn_finite_ordered(&fin, &w, &cfg, &m0, &q0, None, &[2, 0, 3, 1], false).unwrap();
        assert_eq!(a.q, c.q);
        assert_eq!(a.population, c.population);
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let disc = LabelDiscretization::new(2).unwrap();
        let w = NeighborhoodWeights::precompute(&Graphon::Threshold, &disc, 1).unwrap();
        let cfg = small_config();
        let fin = make_sis();
        assert!(matches!(
            learn_infinite(&fin, &w, &cfg, &PopulationTable::uniform(51, 2, 2), &QTable::zeros(51, 2, 2, 2), None),
            Err(Error::Horizon(_))
        ));
        assert!(matches!(
            learn_finite(&sis_inf(), &w, &cfg, &PopulationTable::uniform(1, 2, 2), &QTable::zeros(1, 2, 2, 2), None),
            Err(Error::Horizon(_))
        ));
    }

    #[test]
    fn single_step_deterministic_game_learns_reward_plus_terminal() {
        // two states, two actions; action a moves to state a with reward 1 + a
        let env = make_tabular(
            "det",
            TabularDynamics {
                kernel: vec![
                    vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                    vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                ],
                rewards: vec![vec![1.0, 2.0], vec![1.0, 2.0]],
                terminal: Some(vec![0.5, -3.0]),
            },
            Horizon::Finite { steps: 1, discount: 1.0 },
            vec![1.0, 0.0],
        )
        .unwrap();
        let disc = LabelDiscretization::new(1).unwrap();
        let w = NeighborhoodWeights::precompute(&Graphon::ErdosRenyi(1.0), &disc, 1).unwrap();
        let cfg = LearnConfig {
            epochs: 400,
            eta: 5.0,
            ..small_config()
        };
        let res = learn_finite(
            &env,
            &w,
            &cfg,
            &PopulationTable::uniform(2, 1, 2),
            &QTable::zeros(2, 1, 2, 2),
            None,
        )
        .unwrap();
        // every sampled target is exact, so the visit average is exact
        assert_abs_diff_eq!(res.q.get(0, 0, 0, 0), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(res.q.get(0, 0, 0, 1), -1.0, epsilon = 1e-12);
    }
}
