//! Finite n-player network games and the empirical approximate-equilibrium
//! check.
//!
//! Player `i` carries a label `u_i`, interacts through the weighted empirical
//! neighborhood measure `M^i_t = (1/n) sum_j xi_ij delta_{X^j_t}` and plays the
//! class policy of `Pi_D(u_i)`.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{inverse_cdf, Environment, Horizon};
use crate::error::{ensure_len, ensure_unit, Error, Result};
use crate::graphon::{denseness_second_moment, Graphon, LabelDiscretization};
use crate::rng::{derive, Stream};
use crate::table::{argmax, PolicyTable};

/// Nonnegative `n x n` interaction weights with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    n: usize,
    xi: Vec<f64>,
}

impl InteractionMatrix {
    /// Row-major entries; the diagonal must be zero.
    pub fn new(n: usize, xi: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Construction("interaction matrix needs n >= 1".into()));
        }
        ensure_len("interaction entries", n * n, xi.len())?;
        for i in 0..n {
            for j in 0..n {
                let v = xi[i * n + j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Construction(format!("xi[{i}][{j}] = {v} is not a finite nonnegative weight")));
                }
                if i == j && v != 0.0 {
                    return Err(Error::Construction(format!("xi[{i}][{i}] = {v} on the diagonal")));
                }
            }
        }
        Ok(Self { n, xi })
    }

    /// `xi_ij = f(i, j)` off the diagonal, zero on it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut xi = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    xi[i * n + j] = f(i, j);
                }
            }
        }
        Self::new(n, xi)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.xi
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.xi[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.xi[i * self.n..(i + 1) * self.n]
    }
}

/// One label per cell of the `n`-bin partition of `[0, 1]`, uniform within
/// the cell.
pub fn sample_labels<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("need at least one player".into()));
    }
    let nf = n as f64;
    Ok((0..n)
        .map(|i| {
            let lo = i as f64 / nf;
            let u = (i as f64 + rng.gen::<f64>()) / nf;
            if u >= (i + 1) as f64 / nf {
                lo
            } else {
                u
            }
        })
        .collect())
}

/// `xi_ij = W(u_i, u_j)` for `i != j`.
pub fn build_interaction(graphon: &Graphon, labels: &[f64]) -> Result<InteractionMatrix> {
    for &u in labels {
        ensure_unit(u)?;
    }
    InteractionMatrix::from_fn(labels.len(), |i, j| graphon.eval_unchecked(labels[i], labels[j]))
}

/// One joint simulation of all players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NPlayerRollout {
    pub labels: Vec<f64>,
    /// `trajectories[i][t]`, `t = 0..=T`.
    pub trajectories: Vec<Vec<usize>>,
    /// `neighborhood_flow[i][t][x]`.
    pub neighborhood_flow: Vec<Vec<Vec<f64>>>,
    /// Realized discounted running rewards plus terminal reward.
    pub rewards: Vec<f64>,
}

/// `(1/n) sum_j xi_ij delta_{x_j}` for every player.
pub fn neighborhood_measures(xi: &InteractionMatrix, states: &[usize], num_states: usize) -> Vec<Vec<f64>> {
    let n = xi.n();
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            let mut m = vec![0.0; num_states];
            for (j, &w) in xi.row(i).iter().enumerate() {
                m[states[j]] += w * scale;
            }
            m
        })
        .collect()
}

/// Shared setup of a finite game: environment, weights, labels and classes.
struct Game<'a> {
    env: &'a Environment,
    xi: &'a InteractionMatrix,
    labels: &'a [f64],
    policy: &'a PolicyTable,
    classes: Vec<usize>,
    steps: usize,
    discount: f64,
}

impl<'a> Game<'a> {
    fn new(
        env: &'a Environment,
        xi: &'a InteractionMatrix,
        labels: &'a [f64],
        policy: &'a PolicyTable,
        disc: &LabelDiscretization,
    ) -> Result<Self> {
        let Horizon::Finite { steps, discount } = env.horizon() else {
            return Err(Error::Horizon("n-player games need a finite horizon"));
        };
        ensure_len("labels", xi.n(), labels.len())?;
        ensure_len("policy classes", disc.classes(), policy.classes())?;
        ensure_len("policy states", env.num_states(), policy.states())?;
        ensure_len("policy actions", env.num_actions(), policy.actions())?;
        if policy.times() != 1 && policy.times() < steps {
            return Err(Error::Dimension {
                what: "policy slices",
                expected: steps + 1,
                got: policy.times(),
            });
        }
        let classes = labels
            .iter()
            .map(|&u| disc.class_of(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            env,
            xi,
            labels,
            policy,
            classes,
            steps,
            discount,
        })
    }

    fn policy_probs(&self, t: usize, i: usize, x: usize) -> &[f64] {
        let t = if self.policy.times() == 1 { 0 } else { t };
        self.policy.probs(t, self.classes[i], x)
    }

    /// Joint rollout. Every player consumes one action uniform and one
    /// transition uniform per step in player order, so a deviating player
    /// leaves the random numbers of everyone else untouched.
    fn rollout<R: Rng + ?Sized>(&self, deviation: Option<(usize, &[Vec<usize>])>, rng: &mut R) -> NPlayerRollout {
        let n = self.xi.n();
        let xs = self.env.num_states();
        let init = self.env.initial_law();
        let mut states: Vec<usize> = (0..n).map(|_| inverse_cdf(init, rng.gen::<f64>())).collect();
        let mut trajectories = vec![Vec::with_capacity(self.steps + 1); n];
        let mut flows = vec![Vec::with_capacity(self.steps + 1); n];
        let mut rewards = vec![0.0; n];
        let mut probs = vec![0.0; xs];
        let mut disc = 1.0;
        for t in 0..=self.steps {
            let measures = neighborhood_measures(self.xi, &states, xs);
            for i in 0..n {
                trajectories[i].push(states[i]);
            }
            if t == self.steps {
                for i in 0..n {
                    rewards[i] += disc * self.env.terminal_unchecked(states[i], &measures[i]);
                }
                for (i, m) in measures.into_iter().enumerate() {
                    flows[i].push(m);
                }
                break;
            }
            let mut next = states.clone();
            for i in 0..n {
                let x = states[i];
                let u_action = rng.gen::<f64>();
                let u_move = rng.gen::<f64>();
                let a = match deviation {
                    Some((p, plan)) if p == i => plan[t][x],
                    _ => inverse_cdf(self.policy_probs(t, i, x), u_action),
                };
                rewards[i] += disc * self.env.reward_unchecked(x, &measures[i], a);
                self.env.transition_into(x, &measures[i], a, &mut probs);
                next[i] = inverse_cdf(&probs, u_move);
            }
            for (i, m) in measures.into_iter().enumerate() {
                flows[i].push(m);
            }
            states = next;
            disc *= self.discount;
        }
        NPlayerRollout {
            labels: self.labels.to_vec(),
            trajectories,
            neighborhood_flow: flows,
            rewards,
        }
    }

    fn rollouts(&self, seed: u64, stream: Stream, key: &[u64], replications: usize, deviation: Option<(usize, &[Vec<usize>])>) -> Vec<NPlayerRollout> {
        (0..replications)
            .into_par_iter()
            .map(|r| {
                let mut counters = key.to_vec();
                counters.push(r as u64);
                let mut rng = derive(seed, stream, &counters);
                self.rollout(deviation, &mut rng)
            })
            .collect()
    }

    /// Greedy backward induction against a frozen neighborhood flow.
    fn best_response(&self, flow: &[Vec<f64>]) -> (Vec<Vec<usize>>, Vec<f64>) {
        let xs = self.env.num_states();
        let acts = self.env.num_actions();
        let mut v: Vec<f64> = (0..xs)
            .map(|x| self.env.terminal_unchecked(x, &flow[self.steps]))
            .collect();
        let mut plan = vec![vec![0; xs]; self.steps];
        let mut probs = vec![0.0; xs];
        let mut q = vec![0.0; acts];
        for t in (0..self.steps).rev() {
            let mut nv = vec![0.0; xs];
            for x in 0..xs {
                for (a, qa) in q.iter_mut().enumerate() {
                    self.env.transition_into(x, &flow[t], a, &mut probs);
                    let ev: f64 = probs.iter().zip(&v).map(|(p, w)| p * w).sum();
                    *qa = self.env.reward_unchecked(x, &flow[t], a) + self.discount * ev;
                }
                let a = argmax(&q);
                plan[t][x] = a;
                nv[x] = q[a];
            }
            v = nv;
        }
        (plan, v)
    }
}

/// Simulates `replications` independent joint rollouts; replication `r`
/// draws from the stream `(seed, r)`.
pub fn simulate_nplayer(
    env: &Environment,
    xi: &InteractionMatrix,
    labels: &[f64],
    policy: &PolicyTable,
    disc: &LabelDiscretization,
    seed: u64,
    replications: usize,
) -> Result<Vec<NPlayerRollout>> {
    let game = Game::new(env, xi, labels, policy, disc)?;
    Ok(game.rollouts(seed, Stream::Misc, &[], replications, None))
}

/// Paired estimate of one player's deviation gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerExploitability {
    pub player: usize,
    /// Gain clipped below at zero.
    pub epsilon: f64,
    /// Unclipped mean paired gain.
    pub raw_gain: f64,
    /// Standard error of the mean paired gain.
    pub stderr: f64,
    pub baseline_value: f64,
    pub deviation_value: f64,
}

fn mean_flow(rollouts: &[NPlayerRollout], player: usize) -> Vec<Vec<f64>> {
    let mut acc = rollouts[0].neighborhood_flow[player].clone();
    for r in &rollouts[1..] {
        for (a, m) in acc.iter_mut().zip(&r.neighborhood_flow[player]) {
            a.iter_mut().zip(m).for_each(|(s, v)| *s += v);
        }
    }
    let scale = 1.0 / rollouts.len() as f64;
    acc.iter_mut().flatten().for_each(|v| *v *= scale);
    acc
}

fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn estimate_from(
    game: &Game<'_>,
    flow_runs: &[NPlayerRollout],
    baseline: &[NPlayerRollout],
    seed: u64,
    key: &[u64],
    player: usize,
) -> PlayerExploitability {
    let flow = mean_flow(flow_runs, player);
    let (plan, _) = game.best_response(&flow);
    let deviated = game.rollouts(seed, Stream::Deviation, key, baseline.len(), Some((player, &plan)));
    let diffs: Vec<f64> = deviated
        .iter()
        .zip(baseline)
        .map(|(d, b)| d.rewards[player] - b.rewards[player])
        .collect();
    let (raw_gain, stderr) = mean_and_stderr(&diffs);
    let base: Vec<f64> = baseline.iter().map(|b| b.rewards[player]).collect();
    let dev: Vec<f64> = deviated.iter().map(|d| d.rewards[player]).collect();
    PlayerExploitability {
        player,
        epsilon: raw_gain.max(0.0),
        raw_gain,
        stderr,
        baseline_value: mean_and_stderr(&base).0,
        deviation_value: mean_and_stderr(&dev).0,
    }
}

/// Surrogate for player `i`'s exploitability: best respond by backward
/// induction to the player's mean neighborhood flow under the profile, then
/// compare deviation and baseline on paired replications with common random
/// numbers. This is a lower estimate of the gain over all policies that read
/// every player's state.
#[allow(clippy::too_many_arguments)]
pub fn estimate_player_exploitability(
    env: &Environment,
    xi: &InteractionMatrix,
    labels: &[f64],
    policy: &PolicyTable,
    disc: &LabelDiscretization,
    seed: u64,
    replications: usize,
    player: usize,
) -> Result<PlayerExploitability> {
    if replications < 2 {
        return Err(Error::Parameter(format!("{replications} replications; need at least 2")));
    }
    if player >= xi.n() {
        return Err(Error::Dimension {
            what: "player index",
            expected: xi.n(),
            got: player,
        });
    }
    let game = Game::new(env, xi, labels, policy, disc)?;
    let flow_runs = game.rollouts(seed, Stream::FlowEstimate, &[], replications, None);
    let baseline = game.rollouts(seed, Stream::Deviation, &[], replications, None);
    Ok(estimate_from(&game, &flow_runs, &baseline, seed, &[], player))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub sizes: Vec<usize>,
    pub replications: usize,
    /// Players sampled per size (capped at `n`).
    pub players: usize,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            sizes: vec![5, 20, 80],
            replications: 200,
            players: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub mean_eps: f64,
    pub stderr_eps: f64,
    pub second_moment_diag: f64,
}

pub const SWEEP_HEADER: &str = "n,mean_eps,stderr_eps,second_moment_diag";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e}\n",
            r.n, r.mean_eps, r.stderr_eps, r.second_moment_diag
        ));
    }
    out
}

/// For each `n`: sample labels, build `xi`, and average the exploitability
/// estimate over a random subset of players.
pub fn approx_equilibrium_sweep(
    env: &Environment,
    graphon: &Graphon,
    policy: &PolicyTable,
    disc: &LabelDiscretization,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    if opts.replications < 2 {
        return Err(Error::Parameter(format!("{} replications; need at least 2", opts.replications)));
    }
    if opts.players == 0 {
        return Err(Error::Parameter("need at least one sampled player".into()));
    }
    let mut rows = Vec::with_capacity(opts.sizes.len());
    for &n in &opts.sizes {
        let key = [n as u64];
        let labels = sample_labels(n, &mut derive(opts.seed, Stream::Labels, &key))?;
        let xi = build_interaction(graphon, &labels)?;
        let game = Game::new(env, &xi, &labels, policy, disc)?;
        let chosen = sample(&mut derive(opts.seed, Stream::PlayerChoice, &key), n, opts.players.min(n)).into_vec();
        let flow_runs = game.rollouts(opts.seed, Stream::FlowEstimate, &key, opts.replications, None);
        let baseline = game.rollouts(opts.seed, Stream::Deviation, &key, opts.replications, None);
        let estimates: Vec<PlayerExploitability> = chosen
            .iter()
            .map(|&i| estimate_from(&game, &flow_runs, &baseline, opts.seed, &key, i))
            .collect();
        let k = estimates.len() as f64;
        let mean_eps = estimates.iter().map(|e| e.epsilon).sum::<f64>() / k;
        let stderr_eps = estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / k;
        rows.push(SweepRow {
            n,
            mean_eps,
            stderr_eps,
            second_moment_diag: denseness_second_moment(&xi),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_sis, make_tabular, TabularDynamics};
    use approx::assert_abs_diff_eq;

    #[test]
    fn labels_lie_in_their_cells() {
        let mut rng = derive(3, Stream::Misc, &[]);
        let labels = sample_labels(50, &mut rng).unwrap();
        for (i, u) in labels.iter().enumerate() {
            assert!(*u >= i as f64 / 50.0 && *u < (i + 1) as f64 / 50.0);
        }
        let one = sample_labels(1, &mut rng).unwrap();
        assert!((0.0..=1.0).contains(&one[0]));
        let again = sample_labels(50, &mut derive(3, Stream::Misc, &[])).unwrap();
        assert_eq!(labels, again);
        assert!(sample_labels(0, &mut rng).is_err());
    }

    #[test]
    fn interaction_examples() {
        let xi = build_interaction(&Graphon::ErdosRenyi(1.0), &[0.1, 0.5, 0.9]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(xi.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let xi = build_interaction(&Graphon::Threshold, &[0.2, 0.9]).unwrap();
        assert_eq!(xi.get(0, 1), 0.0);
        assert!(InteractionMatrix::new(2, vec![1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(InteractionMatrix::new(2, vec![0.0, -1.0, 0.0, 0.0]).is_err());
        assert!(build_interaction(&Graphon::Threshold, &[1.2]).is_err());
    }

    fn sis10() -> Environment {
        make_sis()
            .with_horizon(Horizon::Finite { steps: 10, discount: 1.0 })
            .unwrap()
    }

    #[test]
    fn flows_match_trajectories() {
        let env = sis10();
        let disc = LabelDiscretization::new(4).unwrap();
        let labels = sample_labels(6, &mut derive(1, Stream::Labels, &[])).unwrap();
        let xi = build_interaction(&Graphon::UniformAttachment, &labels).unwrap();
        let pi = PolicyTable::uniform(11, 4, 2, 2);
        let runs = simulate_nplayer(&env, &xi, &labels, &pi, &disc, 5, 3).unwrap();
        for run in &runs {
            for t in 0..=10 {
                let states: Vec<usize> = run.trajectories.iter().map(|tr| tr[t]).collect();
                let m = neighborhood_measures(&xi, &states, 2);
                for i in 0..6 {
                    assert_eq!(run.neighborhood_flow[i][t], m[i]);
                }
            }
        }
        assert_eq!(runs, simulate_nplayer(&env, &xi, &labels, &pi, &disc, 5, 3).unwrap());
    }

    #[test]
    fn small_games() {
        let env = sis10();
        let disc = LabelDiscretization::new(2).unwrap();
        let pi = PolicyTable::uniform(11, 2, 2, 2);
        let xi = InteractionMatrix::from_fn(1, |_, _| 1.0).unwrap();
        let runs = simulate_nplayer(&env, &xi, &[0.3], &pi, &disc, 0, 2).unwrap();
        assert!(runs[0].neighborhood_flow[0].iter().all(|m| m == &vec![0.0, 0.0]));

        let xi = InteractionMatrix::from_fn(2, |_, _| 1.0).unwrap();
        let runs = simulate_nplayer(&env, &xi, &[0.3, 0.7], &pi, &disc, 0, 2).unwrap();
        for t in 0..=10 {
            let x2 = runs[0].trajectories[1][t];
            let mut expect = vec![0.0; 2];
            expect[x2] = 0.5;
            assert_eq!(runs[0].neighborhood_flow[0][t], expect);
        }
    }

    #[test]
    fn exploitability_arguments_checked() {
        let env = sis10();
        let disc = LabelDiscretization::new(2).unwrap();
        let pi = PolicyTable::uniform(11, 2, 2, 2);
        let xi = InteractionMatrix::from_fn(2, |_, _| 1.0).unwrap();
        assert!(estimate_player_exploitability(&env, &xi, &[0.1, 0.6], &pi, &disc, 0, 1, 0).is_err());
        assert!(estimate_player_exploitability(&env, &xi, &[0.1, 0.6], &pi, &disc, 0, 4, 2).is_err());
        let inf = make_sis().with_horizon(Horizon::Infinite { discount: 0.9 }).unwrap();
        assert!(matches!(
            simulate_nplayer(&inf, &xi, &[0.1, 0.6], &pi, &disc, 0, 2),
            Err(Error::Horizon(_))
        ));
    }

    fn chain_env() -> Environment {
        // action 1 pays 1 now, action 0 pays 0; state is irrelevant
        make_tabular(
            "chain",
            TabularDynamics {
                kernel: vec![
                    vec![vec![0.5, 0.5], vec![0.5, 0.5]],
                    vec![vec![0.5, 0.5], vec![0.5, 0.5]],
                ],
                rewards: vec![vec![0.0, 1.0], vec![0.0, 1.0]],
                terminal: None,
            },
            Horizon::Finite { steps: 3, discount: 1.0 },
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn best_responders_have_no_gain() {
        let env = chain_env();
        let disc = LabelDiscretization::new(2).unwrap();
        let mut pi = PolicyTable::uniform(4, 2, 2, 2);
        for t in 0..4 {
            for d in 0..2 {
                for x in 0..2 {
                    pi.probs_mut(t, d, x).copy_from_slice(&[0.0, 1.0]);
                }
            }
        }
        let labels = [0.2, 0.5, 0.8];
        let xi = build_interaction(&Graphon::ErdosRenyi(0.5), &labels).unwrap();
        for i in 0..3 {
            let e = estimate_player_exploitability(&env, &xi, &labels, &pi, &disc, 9, 20, i).unwrap();
            assert_eq!(e.epsilon, 0.0);
            assert!(e.raw_gain.abs() <= 2.0 * e.stderr + 1e-12);
        }
        let rows = approx_equilibrium_sweep(
            &env,
            &Graphon::ErdosRenyi(0.5),
            &pi,
            &disc,
            &SweepOptions {
                sizes: vec![2, 4],
                replications: 10,
                players: 2,
                seed: 1,
            },
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.mean_eps == 0.0));
    }

    #[test]
    fn single_player_gain_matches_dp_gap() {
        // uniform play earns 1/2 per step in expectation, the optimum earns 1
        let env = chain_env();
        let disc = LabelDiscretization::new(1).unwrap();
        let pi = PolicyTable::uniform(4, 1, 2, 2);
        let xi = InteractionMatrix::from_fn(1, |_, _| 0.0).unwrap();
        let e = estimate_player_exploitability(&env, &xi, &[0.4], &pi, &disc, 2, 400, 0).unwrap();
        assert_abs_diff_eq!(e.deviation_value, 3.0, epsilon = 1e-12);
        assert!((e.epsilon - 1.5).abs() <= 4.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn second_moment_decreases_for_er() {
        let sizes = [5, 20, 80];
        let mut prev = f64::INFINITY;
        for n in sizes {
            let labels = sample_labels(n, &mut derive(0, Stream::Labels, &[n as u64])).unwrap();
            let xi = build_interaction(&Graphon::ErdosRenyi(0.5), &labels).unwrap();
            let s = denseness_second_moment(&xi);
            assert_abs_diff_eq!(s, 0.25 * (n - 1) as f64 / (n * n) as f64, epsilon = 1e-15);
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn sweep_csv_format() {
        let csv = sweep_csv(&[SweepRow {
            n: 5,
            mean_eps: 0.5,
            stderr_eps: 0.0,
            second_moment_diag: 0.25,
        }]);
        assert_eq!(csv.lines().next().unwrap(), SWEEP_HEADER);
        assert!(csv.lines().nth(1).unwrap().starts_with("5,5.000000000000e-1,"));
    }
}
