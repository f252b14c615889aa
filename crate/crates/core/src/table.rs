//! Dense class-indexed tables shared by the exact solver and the learner.
//!
//! Every table carries a leading time axis. Infinite-horizon objects use a
//! single slice; finite-horizon objects with horizon `T` use `T + 1` slices,
//! the last one being the terminal slice.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};

/// Population table `M`: for every time slice and label class, a probability
/// vector over the states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTable {
    times: usize,
    classes: usize,
    states: usize,
    data: Vec<f64>,
}

impl PopulationTable {
    /// Uniform rows everywhere.
    pub fn uniform(times: usize, classes: usize, states: usize) -> Self {
        let v = 1.0 / states as f64;
        Self {
            times,
            classes,
            states,
            data: vec![v; times * classes * states],
        }
    }

    /// Every row of every slice set to `row`.
    pub fn filled(times: usize, classes: usize, row: &[f64]) -> Self {
        let states = row.len();
        let mut data = Vec::with_capacity(times * classes * states);
        for _ in 0..times * classes {
            data.extend_from_slice(row);
        }
        Self {
            times,
            classes,
            states,
            data,
        }
    }

    /// Builds a table from explicit rows laid out as `rows[t][d][x]`.
    pub fn from_rows(rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let times = rows.len();
        if times == 0 || rows[0].is_empty() || rows[0][0].is_empty() {
            return Err(Error::Construction("empty population table".into()));
        }
        let classes = rows[0].len();
        let states = rows[0][0].len();
        let mut data = Vec::with_capacity(times * classes * states);
        for slice in &rows {
            ensure_len("population classes", classes, slice.len())?;
            for row in slice {
                ensure_len("population states", states, row.len())?;
                data.extend_from_slice(row);
            }
        }
        Ok(Self {
            times,
            classes,
            states,
            data,
        })
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// All classes of time slice `t`, flattened as `[d * states + x]`.
    pub fn slice(&self, t: usize) -> &[f64] {
        let n = self.classes * self.states;
        &self.data[t * n..(t + 1) * n]
    }

    pub fn row(&self, t: usize, d: usize) -> &[f64] {
        let start = (t * self.classes + d) * self.states;
        &self.data[start..start + self.states]
    }

    pub fn row_mut(&mut self, t: usize, d: usize) -> &mut [f64] {
        let start = (t * self.classes + d) * self.states;
        &mut self.data[start..start + self.states]
    }

    pub fn set_row(&mut self, t: usize, d: usize, row: &[f64]) {
        self.row_mut(t, d).copy_from_slice(row);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Rows as nested vectors `[t][d][x]`.
    pub fn to_rows(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.times)
            .map(|t| (0..self.classes).map(|d| self.row(t, d).to_vec()).collect())
            .collect()
    }

    /// Largest deviation of any row from the simplex: negative mass or
    /// departure of the row sum from one.
    pub fn simplex_violation(&self) -> f64 {
        self.data
            .chunks(self.states)
            .map(|row| {
                let neg = row.iter().fold(0.0f64, |acc, &v| acc.max(-v));
                let sum: f64 = row.iter().sum();
                neg.max((sum - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        ensure_len("population times", self.times, other.times)?;
        ensure_len("population classes", self.classes, other.classes)?;
        ensure_len("population states", self.states, other.states)
    }

    /// Lifts a `D`-class table to `factor * D` classes by duplicating each
    /// row into the finer bins it covers.
    pub fn refine(&self, factor: usize) -> Self {
        let classes = self.classes * factor;
        let mut out = Self::uniform(self.times, classes, self.states);
        for t in 0..self.times {
            for d in 0..classes {
                out.set_row(t, d, self.row(t, d / factor));
            }
        }
        out
    }
}

/// Action-value table `Q`, indexed `[t][d][x][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    times: usize,
    classes: usize,
    states: usize,
    actions: usize,
    data: Vec<f64>,
}

impl QTable {
    pub fn zeros(times: usize, classes: usize, states: usize, actions: usize) -> Self {
        Self {
            times,
            classes,
            states,
            actions,
            data: vec![0.0; times * classes * states * actions],
        }
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    fn offset(&self, t: usize, d: usize) -> usize {
        (t * self.classes + d) * self.states * self.actions
    }

    /// The `|X| x |A|` block of class `d` at time `t`, row-major in the state.
    pub fn class_slice(&self, t: usize, d: usize) -> &[f64] {
        let o = self.offset(t, d);
        &self.data[o..o + self.states * self.actions]
    }

    pub fn class_slice_mut(&mut self, t: usize, d: usize) -> &mut [f64] {
        let o = self.offset(t, d);
        let n = self.states * self.actions;
        &mut self.data[o..o + n]
    }

    pub fn values(&self, t: usize, d: usize, x: usize) -> &[f64] {
        let o = self.offset(t, d) + x * self.actions;
        &self.data[o..o + self.actions]
    }

    pub fn get(&self, t: usize, d: usize, x: usize, a: usize) -> f64 {
        self.data[self.offset(t, d) + x * self.actions + a]
    }

    pub fn set(&mut self, t: usize, d: usize, x: usize, a: usize, v: f64) {
        let o = self.offset(t, d) + x * self.actions + a;
        self.data[o] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Greedy value `max_a Q[t][d][x][a]`.
    pub fn max_value(&self, t: usize, d: usize, x: usize) -> f64 {
        self.values(t, d, x)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action, ties broken toward the lowest index.
    pub fn greedy_action(&self, t: usize, d: usize, x: usize) -> usize {
        argmax(self.values(t, d, x))
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        ensure_len("q times", self.times, other.times)?;
        ensure_len("q classes", self.classes, other.classes)?;
        ensure_len("q states", self.states, other.states)?;
        ensure_len("q actions", self.actions, other.actions)
    }

    /// Nested copy `[t][d][x][a]` for serialization.
    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.times)
            .map(|t| {
                (0..self.classes)
                    .map(|d| (0..self.states).map(|x| self.values(t, d, x).to_vec()).collect())
                    .collect()
            })
            .collect()
    }
}

/// Stochastic policy table, indexed `[t][d][x][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTable {
    times: usize,
    classes: usize,
    states: usize,
    actions: usize,
    /// Softmax temperature the table was produced with; `None` for policies
    /// built directly (greedy, uniform, hand-written).
    pub temperature: Option<f64>,
    data: Vec<f64>,
}

impl PolicyTable {
    pub fn uniform(times: usize, classes: usize, states: usize, actions: usize) -> Self {
        Self {
            times,
            classes,
            states,
            actions,
            temperature: None,
            data: vec![1.0 / actions as f64; times * classes * states * actions],
        }
    }

    /// Deterministic greedy policy from `q`, lowest-index tie breaking.
    pub fn greedy(q: &QTable) -> Self {
        let mut p = Self::uniform(q.times, q.classes, q.states, q.actions);
        for t in 0..q.times {
            for d in 0..q.classes {
                for x in 0..q.states {
                    let best = q.greedy_action(t, d, x);
                    let probs = p.probs_mut(t, d, x);
                    probs.iter_mut().for_each(|v| *v = 0.0);
                    probs[best] = 1.0;
                }
            }
        }
        p
    }

    pub(crate) fn from_parts(
        times: usize,
        classes: usize,
        states: usize,
        actions: usize,
        temperature: Option<f64>,
        data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), times * classes * states * actions);
        Self {
            times,
            classes,
            states,
            actions,
            temperature,
            data,
        }
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    fn offset(&self, t: usize, d: usize, x: usize) -> usize {
        ((t * self.classes + d) * self.states + x) * self.actions
    }

    pub fn probs(&self, t: usize, d: usize, x: usize) -> &[f64] {
        let o = self.offset(t, d, x);
        &self.data[o..o + self.actions]
    }

    pub fn probs_mut(&mut self, t: usize, d: usize, x: usize) -> &mut [f64] {
        let o = self.offset(t, d, x);
        &mut self.data[o..o + self.actions]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        ensure_len("policy times", self.times, other.times)?;
        ensure_len("policy classes", self.classes, other.classes)?;
        ensure_len("policy states", self.states, other.states)?;
        ensure_len("policy actions", self.actions, other.actions)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.times)
            .map(|t| {
                (0..self.classes)
                    .map(|d| (0..self.states).map(|x| self.probs(t, d, x).to_vec()).collect())
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
