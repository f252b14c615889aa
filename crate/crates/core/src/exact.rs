//! Model-based oracle: Bellman solver, softmax policy operator, induced
//! population and exact fixed-point iteration.
//!
//! All operators work on `D` label classes at once. Given a population table
//! the neighborhood measure of every class is frozen, which turns the game
//! into `D` independent finite MDPs (one per class and time slice).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Environment, Horizon};
use crate::error::{ensure_len, Error, Result};
use crate::graphon::NeighborhoodWeights;
use crate::metrics::tv_table;
use crate::table::{PolicyTable, PopulationTable, QTable};

/// Tolerances and limits of the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactOptions {
    /// Softmax temperature of the policy operator.
    pub eta: f64,
    pub tol_bellman: f64,
    /// Defaults to `10 * ln(tol_bellman) / ln(gamma)` when absent.
    pub max_bellman_iters: Option<usize>,
    pub tol_stat: f64,
    /// Squaring rounds of the stationary power iteration.
    pub max_stat_iters: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            eta: 0.1,
            tol_bellman: 1e-10,
            max_bellman_iters: None,
            tol_stat: 1e-12,
            max_stat_iters: 200,
        }
    }
}

/// Kernel and rewards of one class at one time slice with the neighborhood
/// measure frozen.
#[derive(Debug, Clone)]
pub(crate) struct ClassModel {
    states: usize,
    actions: usize,
    /// `[(x * A + a) * X + y]`
    kernel: Vec<f64>,
    /// `[x * A + a]`
    reward: Vec<f64>,
}

impl ClassModel {
    pub(crate) fn build(env: &Environment, m: &[f64]) -> Self {
        let states = env.num_states();
        let actions = env.num_actions();
        let mut kernel = vec![0.0; states * actions * states];
        let mut reward = vec![0.0; states * actions];
        for x in 0..states {
            for a in 0..actions {
                let i = x * actions + a;
                env.transition_into(x, m, a, &mut kernel[i * states..(i + 1) * states]);
                reward[i] = env.reward_unchecked(x, m, a);
            }
        }
        Self {
            states,
            actions,
            kernel,
            reward,
        }
    }

    pub(crate) fn probs(&self, x: usize, a: usize) -> &[f64] {
        let i = x * self.actions + a;
        &self.kernel[i * self.states..(i + 1) * self.states]
    }

    pub(crate) fn reward(&self, x: usize, a: usize) -> f64 {
        self.reward[x * self.actions + a]
    }

    /// `out[x][a] = r(x,a) + gamma * sum_y P(y|x,a) next_value[y]`
    pub(crate) fn backup(&self, gamma: f64, next_value: &[f64], out: &mut [f64]) {
        for x in 0..self.states {
            for a in 0..self.actions {
                let ev: f64 = self
                    .probs(x, a)
                    .iter()
                    .zip(next_value)
                    .map(|(p, v)| p * v)
                    .sum();
                out[x * self.actions + a] = self.reward(x, a) + gamma * ev;
            }
        }
    }

    /// State-to-state kernel under `policy` (rows `[x * X + y]`).
    pub(crate) fn policy_kernel(&self, policy: &[f64]) -> Vec<f64> {
        let n = self.states;
        let mut k = vec![0.0; n * n];
        for x in 0..n {
            for a in 0..self.actions {
                let w = policy[x * self.actions + a];
                if w == 0.0 {
                    continue;
                }
                for (dst, p) in k[x * n..(x + 1) * n].iter_mut().zip(self.probs(x, a)) {
                    *dst += w * p;
                }
            }
        }
        k
    }

    pub(crate) fn policy_reward(&self, policy: &[f64]) -> Vec<f64> {
        (0..self.states)
            .map(|x| {
                (0..self.actions)
                    .map(|a| policy[x * self.actions + a] * self.reward(x, a))
                    .sum()
            })
            .collect()
    }
}

/// Class models for every `(t, d)`; slices follow the population table.
pub(crate) fn class_models(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
) -> Vec<Vec<ClassModel>> {
    (0..population.times())
        .map(|t| {
            weights
                .all_measures(population, t)
                .par_iter()
                .map(|m| ClassModel::build(env, m))
                .collect()
        })
        .collect()
}

pub(crate) fn check_inputs(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
) -> Result<()> {
    ensure_len("population classes", weights.classes(), population.classes())?;
    ensure_len("population states", env.num_states(), population.states())?;
    ensure_len("population slices", env.horizon().slices(), population.times())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

fn greedy_values(q: &[f64], actions: usize) -> Vec<f64> {
    q.chunks(actions)
        .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

/// One application of the Bellman optimality operator for every class.
pub fn bellman_apply(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    q: &QTable,
) -> Result<QTable> {
    let Horizon::Infinite { discount } = env.horizon() else {
        return Err(Error::Horizon(
            "bellman_apply needs an infinite-horizon game; use backward induction",
        ));
    };
    check_inputs(env, weights, population)?;
    let mut out = QTable::zeros(1, population.classes(), env.num_states(), env.num_actions());
    if q.same_shape(&out).is_err() {
        return Err(Error::Dimension {
            what: "q table size",
            expected: out.as_slice().len(),
            got: q.as_slice().len(),
        });
    }
    let models = class_models(env, weights, population);
    for (d, model) in models[0].iter().enumerate() {
        let v = greedy_values(q.class_slice(0, d), env.num_actions());
        model.backup(discount, &v, out.class_slice_mut(0, d));
    }
    Ok(out)
}

fn bellman_iteration_cap(gamma: f64, opts: &ExactOptions) -> usize {
    opts.max_bellman_iters.unwrap_or_else(|| {
        let n = 10.0 * opts.tol_bellman.ln() / gamma.ln();
        n.ceil().max(10.0) as usize
    })
}

/// Optimal Q-function of each class against the frozen population.
///
/// Infinite horizon: value iteration from zero until the sup-norm change is
/// at most `tol_bellman`. Finite horizon: backward induction from the
/// terminal slice, which holds `g(x, m_d^T)` for every action.
pub fn exact_best_response(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    opts: &ExactOptions,
) -> Result<QTable> {
    check_inputs(env, weights, population)?;
    let models = class_models(env, weights, population);
    best_response_from_models(env, weights, population, &models, opts)
}

pub(crate) fn best_response_from_models(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    models: &[Vec<ClassModel>],
    opts: &ExactOptions,
) -> Result<QTable> {
    let classes = population.classes();
    let (xs, acts) = (env.num_states(), env.num_actions());
    let gamma = env.discount();
    match env.horizon() {
        Horizon::Infinite { .. } => {
            let cap = bellman_iteration_cap(gamma, opts);
            let blocks: Vec<Result<Vec<f64>>> = models[0]
                .par_iter()
                .map(|model| {
                    let mut q = vec![0.0; xs * acts];
                    let mut next = vec![0.0; xs * acts];
                    let mut change = f64::INFINITY;
                    for _ in 0..cap {
                        let v = greedy_values(&q, acts);
                        model.backup(gamma, &v, &mut next);
                        change = max_abs_diff(&q, &next);
                        std::mem::swap(&mut q, &mut next);
                        if change <= opts.tol_bellman {
                            return Ok(q);
                        }
                    }
                    Err(Error::NonConvergence {
                        what: "value iteration",
                        iterations: cap,
                        last_change: change,
                    })
                })
                .collect();
            let mut out = QTable::zeros(1, classes, xs, acts);
            for (d, block) in blocks.into_iter().enumerate() {
                out.class_slice_mut(0, d).copy_from_slice(&block?);
            }
            Ok(out)
        }
        Horizon::Finite { steps, .. } => {
            let terminal = weights.all_measures(population, steps);
            let blocks: Vec<Vec<Vec<f64>>> = (0..classes)
                .into_par_iter()
                .map(|d| {
                    let mut slices = vec![vec![0.0; xs * acts]; steps + 1];
                    for x in 0..xs {
                        let g = env.terminal_unchecked(x, &terminal[d]);
                        slices[steps][x * acts..(x + 1) * acts].fill(g);
                    }
                    for t in (0..steps).rev() {
                        let v = greedy_values(&slices[t + 1], acts);
                        models[t][d].backup(gamma, &v, &mut slices[t]);
                    }
                    slices
                })
                .collect();
            let mut out = QTable::zeros(steps + 1, classes, xs, acts);
            for (d, slices) in blocks.into_iter().enumerate() {
                for (t, s) in slices.into_iter().enumerate() {
                    out.class_slice_mut(t, d).copy_from_slice(&s);
                }
            }
            Ok(out)
        }
    }
}

/// Softmax policy operator `exp(Q/eta) / sum exp(Q/eta)` over actions.
pub fn softmax_policy(q: &QTable, eta: f64) -> Result<PolicyTable> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Parameter(format!("softmax temperature {eta} must be positive")));
    }
    let mut data = vec![0.0; q.as_slice().len()];
    for (src, dst) in q
        .as_slice()
        .chunks(q.actions())
        .zip(data.chunks_mut(q.actions()))
    {
        softmax_into(src, eta, dst);
    }
    Ok(PolicyTable::from_parts(
        q.times(),
        q.classes(),
        q.states(),
        q.actions(),
        Some(eta),
        data,
    ))
}

pub(crate) fn softmax_into(values: &[f64], eta: f64, out: &mut [f64]) {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, v) in out.iter_mut().zip(values) {
        *o = ((v - top) / eta).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// Population induced by `policy` when the dynamics are driven by the
/// neighborhood measures of `population`.
///
/// Infinite horizon: the stationary law of each class chain. Finite
/// horizon: the forward flow from the initial law.
pub fn induced_population(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    policy: &PolicyTable,
    opts: &ExactOptions,
) -> Result<PopulationTable> {
    check_inputs(env, weights, population)?;
    check_policy(env, population, policy)?;
    let models = class_models(env, weights, population);
    induced_from_models(env, population, &models, policy, opts)
}

fn check_policy(env: &Environment, population: &PopulationTable, policy: &PolicyTable) -> Result<()> {
    ensure_len("policy slices", population.times(), policy.times())?;
    ensure_len("policy classes", population.classes(), policy.classes())?;
    ensure_len("policy states", env.num_states(), policy.states())?;
    ensure_len("policy actions", env.num_actions(), policy.actions())
}

fn policy_block(policy: &PolicyTable, t: usize, d: usize) -> &[f64] {
    let n = policy.states() * policy.actions();
    let start = (t * policy.classes() + d) * n;
    &policy.as_slice()[start..start + n]
}

pub(crate) fn induced_from_models(
    env: &Environment,
    population: &PopulationTable,
    models: &[Vec<ClassModel>],
    policy: &PolicyTable,
    opts: &ExactOptions,
) -> Result<PopulationTable> {
    let classes = population.classes();
    let xs = env.num_states();
    match env.horizon() {
        Horizon::Infinite { .. } => {
            let rows: Vec<Result<Vec<f64>>> = (0..classes)
                .into_par_iter()
                .map(|d| {
                    let k = models[0][d].policy_kernel(policy_block(policy, 0, d));
                    stationary_distribution(&k, xs, opts)
                })
                .collect();
            let mut out = PopulationTable::uniform(1, classes, xs);
            for (d, row) in rows.into_iter().enumerate() {
                out.set_row(0, d, &row?);
            }
            Ok(out)
        }
        Horizon::Finite { steps, .. } => {
            let flows: Vec<Vec<Vec<f64>>> = (0..classes)
                .into_par_iter()
                .map(|d| {
                    let mut flow = Vec::with_capacity(steps + 1);
                    flow.push(env.initial_law().to_vec());
                    for t in 0..steps {
                        let k = models[t][d].policy_kernel(policy_block(policy, t, d));
                        flow.push(push_forward(&flow[t], &k));
                    }
                    flow
                })
                .collect();
            let mut out = PopulationTable::uniform(steps + 1, classes, xs);
            for (d, flow) in flows.into_iter().enumerate() {
                for (t, row) in flow.iter().enumerate() {
                    out.set_row(t, d, row);
                }
            }
            Ok(out)
        }
    }
}

/// `row * K` for a row-stochastic `K` laid out `[x * X + y]`.
pub(crate) fn push_forward(row: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = row.len();
    let mut out = vec![0.0; n];
    for (x, &w) in row.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (o, k) in out.iter_mut().zip(&kernel[x * n..(x + 1) * n]) {
            *o += w * k;
        }
    }
    out
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Stationary law of `kernel` by power iteration from the uniform vector.
///
/// The iteration runs on the lazy chain `(I + K) / 2`, which has the same
/// stationary laws but no periodicity, and advances by repeated squaring so
/// that round `j` looks at the iterate after `2^j` steps. It stops once one
/// more lazy step moves the iterate by at most `tol_stat` in l1;
/// `max_stat_iters` bounds the number of squaring rounds.
pub fn stationary_distribution(kernel: &[f64], states: usize, opts: &ExactOptions) -> Result<Vec<f64>> {
    let n = states;
    ensure_len("kernel entries", n * n, kernel.len())?;
    let mut lazy: Vec<f64> = kernel.iter().map(|k| 0.5 * k).collect();
    for i in 0..n {
        lazy[i * n + i] += 0.5;
    }
    let start = vec![1.0 / n as f64; n];
    let mut power = lazy.clone();
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_stat_iters {
        let v = push_forward(&start, &power);
        let next = push_forward(&v, &lazy);
        change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum::<f64>();
        if change <= opts.tol_stat {
            let mass: f64 = v.iter().sum();
            return Ok(v.iter().map(|p| p.max(0.0) / mass).collect());
        }
        power = mat_mul(&power, &power, n);
    }
    Err(Error::NonConvergence {
        what: "stationary power iteration",
        iterations: opts.max_stat_iters,
        last_change: change,
    })
}

/// One record of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpiStep {
    pub iteration: usize,
    /// Largest per-class l1 distance `|Gamma(M_k) - M_k|`.
    pub residual: f64,
    /// Largest per-class l1 distance `|M_{k+1} - M_k|` (damped step).
    pub step_gap: f64,
    /// Euclidean distance between the best responses to `M_k` and `M_{k-1}`.
    pub q_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FpiOptions {
    pub iterations: usize,
    /// Mixing weight of the new population, in `(0, 1]`.
    pub damping: f64,
    pub tol_fpi: f64,
    pub solver: ExactOptions,
}

impl Default for FpiOptions {
    fn default() -> Self {
        Self {
            iterations: 500,
            damping: 1.0,
            tol_fpi: 1e-9,
            solver: ExactOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpiResult {
    pub population: PopulationTable,
    pub q: QTable,
    pub policy: PolicyTable,
    pub history: Vec<FpiStep>,
    pub converged: bool,
}

/// The map `M -> Gamma_IP(Gamma_pi(Gamma_BR(M)), M)` together with the
/// intermediate Q-table.
pub fn fpi_operator(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    opts: &ExactOptions,
) -> Result<(PopulationTable, QTable, PolicyTable)> {
    check_inputs(env, weights, population)?;
    let models = class_models(env, weights, population);
    let q = best_response_from_models(env, weights, population, &models, opts)?;
    let policy = softmax_policy(&q, opts.eta)?;
    let next = induced_from_models(env, population, &models, &policy, opts)?;
    Ok((next, q, policy))
}

/// Largest l1 distance between matching rows of two tables.
pub fn max_row_l1(a: &PopulationTable, b: &PopulationTable) -> f64 {
    a.as_slice()
        .chunks(a.states())
        .zip(b.as_slice().chunks(b.states()))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Damped fixed-point iteration `M <- (1 - lambda) M + lambda Gamma(M)`.
///
/// Stops as soon as the fixed-point residual drops to `tol_fpi`; the returned
/// population is then the iterate whose residual met the tolerance, and the
/// returned Q-table and policy are its best response and softmax policy.
pub fn exact_fpi(
    env: &Environment,
    weights: &NeighborhoodWeights,
    initial: &PopulationTable,
    opts: &FpiOptions,
) -> Result<FpiResult> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::Parameter(format!("damping {} outside (0, 1]", opts.damping)));
    }
    check_inputs(env, weights, initial)?;
    let mut current = initial.clone();
    if env.horizon().is_finite() {
        for d in 0..current.classes() {
            current.set_row(0, d, env.initial_law());
        }
    }
    let mut history = Vec::new();
    let mut converged = false;
    let (mut image, mut q, mut policy) = fpi_operator(env, weights, &current, &opts.solver)?;
    let mut q_gap = 0.0;
    for iteration in 0..opts.iterations {
        let residual = max_row_l1(&image, &current);
        if residual <= opts.tol_fpi {
            history.push(FpiStep {
                iteration,
                residual,
                step_gap: 0.0,
                q_gap,
            });
            converged = true;
            break;
        }
        let lambda = opts.damping;
        let mut next = current.clone();
        for (n, g) in next.as_mut_slice().iter_mut().zip(image.as_slice()) {
            *n = (1.0 - lambda) * *n + lambda * g;
        }
        history.push(FpiStep {
            iteration,
            residual,
            step_gap: max_row_l1(&next, &current),
            q_gap,
        });
        current = next;
        let prev_q = q;
        (image, q, policy) = fpi_operator(env, weights, &current, &opts.solver)?;
        q_gap = prev_q
            .as_slice()
            .iter()
            .zip(q.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
    }
    Ok(FpiResult {
        population: current,
        q,
        policy,
        history,
        converged,
    })
}

/// Draws a random population table with simplex rows; slice 0 of a
/// finite-horizon table is pinned to the initial law.
pub(crate) fn random_population<R: Rng + ?Sized>(
    env: &Environment,
    classes: usize,
    rng: &mut R,
) -> PopulationTable {
    let slices = env.horizon().slices();
    let xs = env.num_states();
    let mut table = PopulationTable::uniform(slices, classes, xs);
    for t in 0..slices {
        for d in 0..classes {
            let row = table.row_mut(t, d);
            if t == 0 && env.horizon().is_finite() {
                row.copy_from_slice(env.initial_law());
                continue;
            }
            let raw: Vec<f64> = (0..xs).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
            let s: f64 = raw.iter().sum();
            for (r, v) in row.iter_mut().zip(raw) {
                *r = v / s;
            }
        }
    }
    table
}

/// Empirical Lipschitz ratio `|Gamma(M1) - Gamma(M2)|_TV / |M1 - M2|_TV`
/// maximized over random pairs. Pairs at distance zero are skipped.
pub fn estimate_contraction<R: Rng + ?Sized>(
    env: &Environment,
    weights: &NeighborhoodWeights,
    opts: &ExactOptions,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Parameter("contraction estimate needs at least one trial".into()));
    }
    let classes = weights.classes();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = random_population(env, classes, rng);
        let b = random_population(env, classes, rng);
        let denom = tv_table(&a, &b)?;
        if denom == 0.0 {
            continue;
        }
        let (ga, _, _) = fpi_operator(env, weights, &a, opts)?;
        let (gb, _, _) = fpi_operator(env, weights, &b, opts)?;
        worst = worst.max(tv_table(&ga, &gb)? / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_invest, make_sis, make_tabular, TabularDynamics};
    use crate::graphon::{Graphon, LabelDiscretization};
    use crate::rng::{derive, Stream};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn weights(g: Graphon, classes: usize) -> NeighborhoodWeights {
        let disc = LabelDiscretization::new(classes).unwrap();
        NeighborhoodWeights::precompute(&g, &disc, 4).unwrap()
    }

    fn random_tabular<R: Rng>(rng: &mut R, steps: usize) -> Environment {
        let mut row = || {
            let p: f64 = rng.gen();
            vec![p, 1.0 - p]
        };
        let kernel = (0..2).map(|_| (0..2).map(|_| row()).collect()).collect();
        let rewards = (0..2).map(|_| (0..2).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()).collect();
        let terminal = Some((0..2).map(|_| rng.gen::<f64>()).collect());
        make_tabular(
            "random",
            TabularDynamics {
                kernel,
                rewards,
                terminal,
            },
            Horizon::Finite { steps, discount: 1.0 },
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    /// Value of a deterministic Markov plan by explicit recursion over paths.
    fn plan_value(env: &Environment, plan: &[[usize; 2]], t: usize, x: usize, steps: usize) -> f64 {
        if t == steps {
            return env.terminal_reward(x, &[0.5, 0.5]).unwrap();
        }
        let a = plan[t][x];
        let p = env.transition(x, &[0.5, 0.5], a).unwrap();
        env.reward(x, &[0.5, 0.5], a).unwrap()
            + (0..2).map(|y| p[y] * plan_value(env, plan, t + 1, y, steps)).sum::<f64>()
    }

    #[test]
    fn backward_induction_matches_enumeration() {
        let mut rng = derive(1, Stream::Misc, &[]);
        let w = weights(Graphon::UniformAttachment, 1);
        for steps in 1..=3 {
            for _ in 0..10 {
                let env = random_tabular(&mut rng, steps);
                let pop = PopulationTable::uniform(steps + 1, 1, 2);
                let q = exact_best_response(&env, &w, &pop, &ExactOptions::default()).unwrap();
                let mut best = [f64::NEG_INFINITY; 2];
                for code in 0..(1usize << (2 * steps)) {
                    let plan: Vec<[usize; 2]> = (0..steps)
                        .map(|t| [(code >> (2 * t)) & 1, (code >> (2 * t + 1)) & 1])
                        .collect();
                    for (x, b) in best.iter_mut().enumerate() {
                        *b = b.max(plan_value(&env, &plan, 0, x, steps));
                    }
                }
                for x in 0..2 {
                    assert_abs_diff_eq!(q.max_value(0, 0, x), best[x], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn value_iteration_fixed_point() {
        let env = make_sis().with_horizon(Horizon::Infinite { discount: 0.9 }).unwrap();
        let w = weights(Graphon::Threshold, 3);
        let pop = PopulationTable::uniform(1, 3, 2);
        let q = exact_best_response(&env, &w, &pop, &ExactOptions::default()).unwrap();
        let tq = bellman_apply(&env, &w, &pop, &q).unwrap();
        let gap = max_abs_diff(q.as_slice(), tq.as_slice());
        assert!(gap <= 1e-9, "{gap}");
        let capped = ExactOptions {
            max_bellman_iters: Some(2),
            ..ExactOptions::default()
        };
        assert!(matches!(
            exact_best_response(&env, &w, &pop, &capped),
            Err(Error::NonConvergence { .. })
        ));
        assert!(matches!(
            bellman_apply(&make_sis(), &w, &PopulationTable::uniform(51, 3, 2), &QTable::zeros(51, 3, 2, 2)),
            Err(Error::Horizon(_))
        ));
    }

    #[test]
    fn bellman_contracts() {
        let env = make_invest().with_horizon(Horizon::Infinite { discount: 0.8 }).unwrap();
        let w = weights(Graphon::RankedAttachment, 2);
        let pop = PopulationTable::uniform(1, 2, 10);
        let mut rng = derive(4, Stream::Contraction, &[]);
        for _ in 0..20 {
            let mut a = QTable::zeros(1, 2, 10, 2);
            let mut b = a.clone();
            for d in 0..2 {
                for x in 0..10 {
                    for u in 0..2 {
                        a.set(0, d, x, u, rng.gen::<f64>() * 10.0 - 5.0);
                        b.set(0, d, x, u, rng.gen::<f64>() * 10.0 - 5.0);
                    }
                }
            }
            let ta = bellman_apply(&env, &w, &pop, &a).unwrap();
            let tb = bellman_apply(&env, &w, &pop, &b).unwrap();
            let lhs = max_abs_diff(ta.as_slice(), tb.as_slice());
            let rhs = 0.8 * max_abs_diff(a.as_slice(), b.as_slice());
            assert!(lhs <= rhs + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn softmax_normalized_and_shift_invariant(
            vals in proptest::collection::vec(-50.0f64..50.0, 1..6),
            shift in -1e3f64..1e3,
            eta in 0.01f64..10.0,
        ) {
            let mut p = vec![0.0; vals.len()];
            let mut p2 = vec![0.0; vals.len()];
            softmax_into(&vals, eta, &mut p);
            let shifted: Vec<f64> = vals.iter().map(|v| v + shift).collect();
            softmax_into(&shifted, eta, &mut p2);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for (a, b) in p.iter().zip(&p2) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn softmax_examples() {
        let mut q = QTable::zeros(1, 1, 1, 2);
        q.set(0, 0, 0, 0, 1.0);
        let p = softmax_policy(&q, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(p.probs(0, 0, 0)[0], e / (e + 1.0), epsilon = 1e-15);
        let cold = softmax_policy(&q, 1e-3).unwrap();
        assert_eq!(cold.probs(0, 0, 0)[1], 0.0);
        assert!(softmax_policy(&q, 0.0).is_err());
        assert_eq!(p.temperature, Some(1.0));
    }

    #[test]
    fn stationary_laws() {
        let opts = ExactOptions::default();
        let (a, b) = (0.3, 0.1);
        let pi = stationary_distribution(&[1.0 - a, a, b, 1.0 - b], 2, &opts).unwrap();
        assert_abs_diff_eq!(pi[0], b / (a + b), epsilon = 1e-12);
        let flip = stationary_distribution(&[0.0, 1.0, 1.0, 0.0], 2, &opts).unwrap();
        assert_abs_diff_eq!(flip[0], 0.5, epsilon = 1e-12);
        let absorbing = stationary_distribution(&[0.999, 0.001, 0.0, 1.0], 2, &opts).unwrap();
        assert_abs_diff_eq!(absorbing[1], 1.0, epsilon = 1e-10);
        assert!(stationary_distribution(&[1.0], 2, &opts).is_err());
    }

    #[test]
    fn finite_flow_starts_at_initial_law() {
        let env = make_sis().with_horizon(Horizon::Finite { steps: 3, discount: 1.0 }).unwrap();
        let w = weights(Graphon::ErdosRenyi(1.0), 2);
        let pop = PopulationTable::uniform(4, 2, 2);
        let pi = PolicyTable::uniform(4, 2, 2, 2);
        let flow = induced_population(&env, &w, &pop, &pi, &ExactOptions::default()).unwrap();
        assert_eq!(flow.row(0, 1), env.initial_law());
        // uniform neighbors: m = (0.5, 0.5), infection chance 0.4 under U, 0 under D
        assert_abs_diff_eq!(flow.row(1, 0)[SIS_I], 0.5 * 0.2 + 0.5 * 0.5, epsilon = 1e-15);
        assert!(flow.simplex_violation() <= 1e-12);
    }

    const SIS_I: usize = crate::env::SIS_INFECTED;

    #[test]
    fn complete_graph_classes_agree() {
        let env = make_sis().with_horizon(Horizon::Infinite { discount: 0.95 }).unwrap();
        let w = weights(Graphon::ErdosRenyi(1.0), 4);
        let res = exact_fpi(&env, &w, &PopulationTable::uniform(1, 4, 2), &FpiOptions::default()).unwrap();
        assert!(res.converged);
        for d in 1..4 {
            let gap: f64 = res
                .population
                .row(0, d)
                .iter()
                .zip(res.population.row(0, 0))
                .map(|(a, b)| (a - b).abs())
                .sum();
            assert!(gap <= 1e-12);
        }
        let last = res.history.last().unwrap();
        assert!(last.residual <= 1e-9);
    }

    #[test]
    fn measure_free_game_is_solved_in_one_step() {
        let mut rng = derive(2, Stream::Misc, &[]);
        let env = random_tabular(&mut rng, 3);
        let w = weights(Graphon::UniformAttachment, 2);
        let res = exact_fpi(&env, &w, &PopulationTable::uniform(4, 2, 2), &FpiOptions::default()).unwrap();
        assert!(res.converged);
        assert!(res.history.len() <= 2);
        assert!(matches!(
            exact_fpi(
                &env,
                &w,
                &PopulationTable::uniform(4, 2, 2),
                &FpiOptions {
                    damping: 0.0,
                    ..FpiOptions::default()
                }
            ),
            Err(Error::Parameter(_))
        ));
        assert!(exact_fpi(&env, &w, &PopulationTable::uniform(3, 2, 2), &FpiOptions::default()).is_err());
    }

    #[test]
    fn contraction_estimate_is_finite() {
        let env = make_sis().with_horizon(Horizon::Finite { steps: 5, discount: 1.0 }).unwrap();
        let w = weights(Graphon::UniformAttachment, 2);
        let mut rng = derive(0, Stream::Contraction, &[]);
        let c = estimate_contraction(&env, &w, &ExactOptions::default(), 5, &mut rng).unwrap();
        assert!(c.is_finite() && c >= 0.0);
        assert!(estimate_contraction(&env, &w, &ExactOptions::default(), 0, &mut rng).is_err());
    }
}
