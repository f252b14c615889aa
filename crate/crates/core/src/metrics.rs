//! Distances, policy evaluation and exploitability.
//!
//! Total variation follows the l1 convention: `TV(p, q) = sum |p_i - q_i|`,
//! without the factor one half. Table distances average the per-row
//! distance over classes (and over time slices for flows), which is the TV
//! distance of the lifted measures on `[0,1] x X`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Environment, Horizon};
use crate::error::{ensure_len, Error, Result};
use crate::exact::{self, class_models, ExactOptions};
use crate::graphon::NeighborhoodWeights;
use crate::table::{PolicyTable, PopulationTable, QTable};

/// `sum_i |p_i - q_i|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    ensure_len("measure length", p.len(), q.len())?;
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// Mean row-wise TV distance over classes and time slices.
pub fn tv_table(a: &PopulationTable, b: &PopulationTable) -> Result<f64> {
    a.same_shape(b)?;
    let rows = (a.times() * a.classes()) as f64;
    let total: f64 = a
        .as_slice()
        .chunks(a.states())
        .zip(b.as_slice().chunks(b.states()))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .sum();
    Ok(total / rows)
}

/// One-dimensional Wasserstein-1 distance by CDF differences.
pub fn w1_distance(p: &[f64], q: &[f64], coords: &[f64]) -> Result<f64> {
    ensure_len("measure length", p.len(), q.len())?;
    ensure_len("coordinate count", p.len(), coords.len())?;
    if coords.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("w1 coordinates must be strictly increasing".into()));
    }
    let mut cdf_gap = 0.0;
    let mut total = 0.0;
    for i in 0..p.len().saturating_sub(1) {
        cdf_gap += p[i] - q[i];
        total += cdf_gap.abs() * (coords[i + 1] - coords[i]);
    }
    Ok(total)
}

/// Mean row-wise W1 distance over classes and time slices.
pub fn w1_table(a: &PopulationTable, b: &PopulationTable, coords: &[f64]) -> Result<f64> {
    a.same_shape(b)?;
    let rows = (a.times() * a.classes()) as f64;
    let mut total = 0.0;
    for (x, y) in a
        .as_slice()
        .chunks(a.states())
        .zip(b.as_slice().chunks(b.states()))
    {
        total += w1_distance(x, y, coords)?;
    }
    Ok(total / rows)
}

/// Mean TV distance between action distributions, uniform over time
/// slices, classes and states.
pub fn policy_distance(a: &PolicyTable, b: &PolicyTable) -> Result<f64> {
    a.same_shape(b)?;
    let rows = (a.times() * a.classes() * a.states()) as f64;
    let total: f64 = a
        .as_slice()
        .chunks(a.actions())
        .zip(b.as_slice().chunks(b.actions()))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .sum();
    Ok(total / rows)
}

/// `(TV of populations, Frobenius distance of Q-tables)` between epochs.
pub fn epoch_gaps(
    prev_population: &PopulationTable,
    curr_population: &PopulationTable,
    prev_q: &QTable,
    curr_q: &QTable,
) -> Result<(f64, f64)> {
    prev_q.same_shape(curr_q)?;
    let tv = tv_table(prev_population, curr_population)?;
    let l2 = prev_q
        .as_slice()
        .iter()
        .zip(curr_q.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok((tv, l2))
}

/// Values of a policy against a frozen population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyValue {
    /// `V[d][x]` at time 0.
    pub state_values: Vec<Vec<f64>>,
    /// Initial-law average of `V[d]`.
    pub class_values: Vec<f64>,
}

impl PolicyValue {
    pub fn mean(&self) -> f64 {
        self.class_values.iter().sum::<f64>() / self.class_values.len() as f64
    }
}

/// Law used to average state values into a class value: the game's initial
/// law for finite horizons, the class's own (stationary) row otherwise.
fn start_law<'a>(env: &'a Environment, population: &'a PopulationTable, d: usize) -> &'a [f64] {
    if env.horizon().is_finite() {
        env.initial_law()
    } else {
        population.row(0, d)
    }
}

/// Expected return `J` of `policy` for every class.
pub fn policy_value(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    policy: &PolicyTable,
) -> Result<PolicyValue> {
    exact::check_inputs(env, weights, population)?;
    ensure_len("policy slices", population.times(), policy.times())?;
    ensure_len("policy classes", population.classes(), policy.classes())?;
    ensure_len("policy states", env.num_states(), policy.states())?;
    ensure_len("policy actions", env.num_actions(), policy.actions())?;
    let models = class_models(env, weights, population);
    let classes = population.classes();
    let xs = env.num_states();
    let block = |t: usize, d: usize| {
        let n = xs * env.num_actions();
        let start = (t * classes + d) * n;
        &policy.as_slice()[start..start + n]
    };
    let gamma = env.discount();
    let values: Vec<Result<Vec<f64>>> = match env.horizon() {
        Horizon::Infinite { .. } => (0..classes)
            .into_par_iter()
            .map(|d| {
                let model = &models[0][d];
                let k = model.policy_kernel(block(0, d));
                let r = model.policy_reward(block(0, d));
                // (I - gamma K) V = r
                let mut a = vec![0.0; xs * xs];
                for x in 0..xs {
                    for y in 0..xs {
                        a[x * xs + y] = if x == y { 1.0 } else { 0.0 } - gamma * k[x * xs + y];
                    }
                }
                solve_dense(a, r, xs)
            })
            .collect(),
        Horizon::Finite { steps, .. } => {
            let terminal = weights.all_measures(population, steps);
            (0..classes)
                .into_par_iter()
                .map(|d| {
                    let mut v: Vec<f64> = (0..xs)
                        .map(|x| env.terminal_unchecked(x, &terminal[d]))
                        .collect();
                    for t in (0..steps).rev() {
                        let model = &models[t][d];
                        let k = model.policy_kernel(block(t, d));
                        let r = model.policy_reward(block(t, d));
                        v = (0..xs)
                            .map(|x| {
                                let ev: f64 =
                                    k[x * xs..(x + 1) * xs].iter().zip(&v).map(|(p, w)| p * w).sum();
                                r[x] + gamma * ev
                            })
                            .collect();
                    }
                    Ok(v)
                })
                .collect()
        }
    };
    let mut state_values = Vec::with_capacity(classes);
    for v in values {
        state_values.push(v?);
    }
    let class_values = state_values
        .iter()
        .enumerate()
        .map(|(d, v)| start_law(env, population, d).iter().zip(v).map(|(p, w)| p * w).sum())
        .collect();
    Ok(PolicyValue {
        state_values,
        class_values,
    })
}

/// Class values of the exact (hard-greedy) best response.
pub fn best_response_value(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    opts: &ExactOptions,
) -> Result<PolicyValue> {
    let q = exact::exact_best_response(env, weights, population, opts)?;
    let state_values: Vec<Vec<f64>> = (0..population.classes())
        .map(|d| (0..env.num_states()).map(|x| q.max_value(0, d, x)).collect())
        .collect();
    let class_values = state_values
        .iter()
        .enumerate()
        .map(|(d, v)| start_law(env, population, d).iter().zip(v).map(|(p, w)| p * w).sum())
        .collect();
    Ok(PolicyValue {
        state_values,
        class_values,
    })
}

/// Mean over classes of `J(best response) - J(policy)` against the frozen
/// population.
pub fn exploitability(
    env: &Environment,
    weights: &NeighborhoodWeights,
    population: &PopulationTable,
    policy: &PolicyTable,
    opts: &ExactOptions,
) -> Result<f64> {
    let best = best_response_value(env, weights, population, opts)?;
    let current = policy_value(env, weights, population, policy)?;
    let gaps: f64 = best
        .class_values
        .iter()
        .zip(&current.class_values)
        .map(|(b, c)| b - c)
        .sum();
    Ok(gaps / population.classes() as f64)
}

/// Gaussian elimination with partial pivoting on a dense `n x n` system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col].abs() < 1e-300 {
            return Err(Error::NonConvergence {
                what: "policy evaluation (singular system)",
                iterations: col,
                last_change: 0.0,
            });
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / diag;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(x)
}

/// One row of a learner metrics log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub epoch: usize,
    pub tv_gap_m: f64,
    pub l2_gap_q: f64,
    pub tv_to_benchmark: Option<f64>,
    pub tv_policy_to_benchmark: Option<f64>,
    pub w1_to_benchmark: Option<f64>,
    pub exploitability: Option<f64>,
}

pub const METRICS_HEADER: &str =
    "epoch,tv_gap_M,l2_gap_Q,tv_to_benchmark,tv_policy_to_benchmark,w1_to_benchmark,exploitability";

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

impl MetricsRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{:.12e},{:.12e},{},{},{},{}",
            self.epoch,
            self.tv_gap_m,
            self.l2_gap_q,
            cell(self.tv_to_benchmark),
            cell(self.tv_policy_to_benchmark),
            cell(self.w1_to_benchmark),
            cell(self.exploitability)
        )
    }
}

/// Renders a metrics log with header.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}
