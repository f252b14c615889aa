//! Graphons, uniform label quantization, and the discretized graphon operator.
//!
//! A graphon `W: [0,1]^2 -> [0, inf)` weighs how strongly a player with label
//! `u` is influenced by the state of a player with label `v`. Learning happens
//! on `D` label classes: `[0,1]` is cut into half-open bins
//! `[(d-1)/D, d/D)` (the last bin closed) and every label is represented by
//! its bin midpoint `(2d-1)/(2D)`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, ensure_unit, Error, Result};
use crate::nplayer::InteractionMatrix;
use crate::table::PopulationTable;

/// Built-in and matrix-backed graphons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphonSpec", into = "GraphonSpec")]
pub enum Graphon {
    /// `W(u,v) = 1 - max(u,v)`
    UniformAttachment,
    /// `W(u,v) = 1 - u v`
    RankedAttachment,
    /// `W(u,v) = p`
    ErdosRenyi(f64),
    /// `W(u,v) = 1{u + v < 1}`
    Threshold,
    /// Piecewise constant on the `n x n` bin grid.
    Step(Vec<Vec<f64>>),
    /// Values sampled at the nodes `i/(G-1)`; evaluation picks the nearest node.
    Tabulated(Vec<Vec<f64>>),
}

impl Graphon {
    pub fn erdos_renyi(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Construction(format!(
                "erdos-renyi probability {p} outside [0, 1]"
            )));
        }
        Ok(Self::ErdosRenyi(p))
    }

    /// Step graphon of an interaction matrix.
    pub fn step(matrix: Vec<Vec<f64>>) -> Result<Self> {
        validate_square("step matrix", &matrix)?;
        Ok(Self::Step(matrix))
    }

    pub fn tabulated(grid: Vec<Vec<f64>>) -> Result<Self> {
        validate_square("tabulated grid", &grid)?;
        if grid.len() < 2 {
            return Err(Error::Construction(
                "tabulated grid needs at least 2 x 2 nodes".into(),
            ));
        }
        Ok(Self::Tabulated(grid))
    }

    /// Evaluates `W(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        ensure_unit(u)?;
        ensure_unit(v)?;
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        match self {
            Self::UniformAttachment => 1.0 - u.max(v),
            Self::RankedAttachment => 1.0 - u * v,
            Self::ErdosRenyi(p) => *p,
            Self::Threshold => {
                if u + v < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Step(m) => {
                let n = m.len();
                m[bin_index(u, n)][bin_index(v, n)]
            }
            Self::Tabulated(g) => {
                let last = (g.len() - 1) as f64;
                let i = (u * last).round() as usize;
                let j = (v * last).round() as usize;
                g[i][j]
            }
        }
    }

    /// Largest value the graphon takes.
    pub fn sup(&self) -> f64 {
        match self {
            Self::UniformAttachment | Self::RankedAttachment | Self::Threshold => 1.0,
            Self::ErdosRenyi(p) => *p,
            Self::Step(m) | Self::Tabulated(m) => m
                .iter()
                .flat_map(|r| r.iter().copied())
                .fold(0.0, f64::max),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::UniformAttachment => "uniform",
            Self::RankedAttachment => "ranked",
            Self::ErdosRenyi(_) => "er",
            Self::Threshold => "threshold",
            Self::Step(_) => "step",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

fn validate_square(what: &str, m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Construction(format!("{what} is empty")));
    }
    for row in m {
        if row.len() != n {
            return Err(Error::Construction(format!("{what} is not square")));
        }
        if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Construction(format!(
                "{what} has a negative or non-finite entry {bad}"
            )));
        }
    }
    Ok(())
}

/// Index of the half-open bin of `[0,1]` (last bin closed) holding `u`.
pub(crate) fn bin_index(u: f64, bins: usize) -> usize {
    ((u * bins as f64).floor() as usize).min(bins - 1)
}

/// Config-file form of a graphon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphonSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<Vec<f64>>>,
}

impl TryFrom<GraphonSpec> for Graphon {
    type Error = Error;

    fn try_from(spec: GraphonSpec) -> Result<Self> {
        match spec.kind.as_str() {
            "uniform" => Ok(Self::UniformAttachment),
            "ranked" => Ok(Self::RankedAttachment),
            "threshold" => Ok(Self::Threshold),
            "er" => Self::erdos_renyi(spec.p.ok_or_else(|| {
                Error::Construction("graphon kind \"er\" requires p".into())
            })?),
            "step" => Self::step(spec.matrix.ok_or_else(|| {
                Error::Construction("graphon kind \"step\" requires matrix".into())
            })?),
            "tabulated" => Self::tabulated(spec.grid.ok_or_else(|| {
                Error::Construction("graphon kind \"tabulated\" requires grid".into())
            })?),
            other => Err(Error::Construction(format!("unknown graphon kind {other:?}"))),
        }
    }
}

impl From<Graphon> for GraphonSpec {
    fn from(g: Graphon) -> Self {
        let mut spec = GraphonSpec {
            kind: g.name().to_string(),
            p: None,
            matrix: None,
            grid: None,
        };
        match g {
            Graphon::ErdosRenyi(p) => spec.p = Some(p),
            Graphon::Step(m) => spec.matrix = Some(m),
            Graphon::Tabulated(m) => spec.grid = Some(m),
            _ => {}
        }
        spec
    }
}

/// Uniform quantization of the label space into `D` classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDiscretization {
    classes: usize,
}

impl LabelDiscretization {
    pub fn new(classes: usize) -> Result<Self> {
        if classes == 0 {
            return Err(Error::Construction("label class count must be positive".into()));
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Midpoint `(2d+1)/(2D)` of the zero-based class `d`.
    pub fn midpoint(&self, d: usize) -> f64 {
        (2 * d + 1) as f64 / (2 * self.classes) as f64
    }

    /// Zero-based `[lo, hi)` bounds of class `d`.
    pub fn bin(&self, d: usize) -> (f64, f64) {
        let n = self.classes as f64;
        (d as f64 / n, (d + 1) as f64 / n)
    }

    /// Zero-based class holding `u`.
    pub fn class_of(&self, u: f64) -> Result<usize> {
        ensure_unit(u)?;
        Ok(bin_index(u, self.classes))
    }

    /// Projects a label onto its class midpoint.
    pub fn project(&self, u: f64) -> Result<f64> {
        Ok(self.midpoint(self.class_of(u)?))
    }
}

/// `w[d][d'] ~ integral of W(u_d, v) over bin d'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodWeights {
    classes: usize,
    weights: Vec<f64>,
}

impl NeighborhoodWeights {
    /// Weights from `q`-point midpoint quadrature on each target bin; `q = 1`
    /// is the plain midpoint rule `W(u_d, u_d') / D`.
    pub fn precompute(
        graphon: &Graphon,
        disc: &LabelDiscretization,
        quadrature_points: usize,
    ) -> Result<Self> {
        if quadrature_points == 0 {
            return Err(Error::Parameter("quadrature_points must be at least 1".into()));
        }
        let n = disc.classes();
        let q = quadrature_points;
        let h = 1.0 / (n * q) as f64;
        let mut weights = vec![0.0; n * n];
        for d in 0..n {
            let u = disc.midpoint(d);
            for e in 0..n {
                let (lo, _) = disc.bin(e);
                let sum: f64 = (0..q)
                    .map(|j| graphon.eval_unchecked(u, lo + (j as f64 + 0.5) * h))
                    .sum();
                weights[d * n + e] = sum * h;
            }
        }
        Ok(Self {
            classes: n,
            weights,
        })
    }

    /// Weights supplied directly, row-major `D x D`.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_square("neighborhood weights", &rows)?;
        let classes = rows.len();
        Ok(Self {
            classes,
            weights: rows.into_iter().flatten().collect(),
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, d: usize, e: usize) -> f64 {
        self.weights[d * self.classes + e]
    }

    pub fn row(&self, d: usize) -> &[f64] {
        &self.weights[d * self.classes..(d + 1) * self.classes]
    }

    /// Neighborhood measure `m[x] = sum_e w[d][e] M_e[x]` seen by class `d`
    /// at time slice `t`. The result is a nonnegative measure, not
    /// necessarily of unit mass.
    pub fn neighborhood_measure(
        &self,
        population: &PopulationTable,
        t: usize,
        d: usize,
    ) -> Result<Vec<f64>> {
        ensure_len("population classes", self.classes, population.classes())?;
        if d >= self.classes {
            return Err(Error::Dimension {
                what: "class index",
                expected: self.classes,
                got: d,
            });
        }
        if t >= population.times() {
            return Err(Error::Dimension {
                what: "time slice",
                expected: population.times(),
                got: t,
            });
        }
        let mut out = vec![0.0; population.states()];
        self.measure_into(population.slice(t), d, &mut out);
        Ok(out)
    }

    /// Contracts a flattened `D x |X|` slice into `out`.
    pub(crate) fn measure_into(&self, slice: &[f64], d: usize, out: &mut [f64]) {
        let states = out.len();
        out.iter_mut().for_each(|v| *v = 0.0);
        for (e, &w) in self.row(d).iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let row = &slice[e * states..(e + 1) * states];
            for (o, &m) in out.iter_mut().zip(row) {
                *o += w * m;
            }
        }
    }

    /// Neighborhood measures of every class at slice `t`, `[d][x]`.
    pub(crate) fn all_measures(&self, population: &PopulationTable, t: usize) -> Vec<Vec<f64>> {
        let states = population.states();
        (0..self.classes)
            .map(|d| {
                let mut out = vec![0.0; states];
                self.measure_into(population.slice(t), d, &mut out);
                out
            })
            .collect()
    }
}

/// `(1/n^3) sum_ij xi_ij^2`, which must vanish along a graph sequence for the
/// graphon limit to describe the finite games.
pub fn denseness_second_moment(xi: &InteractionMatrix) -> f64 {
    let n = xi.n() as f64;
    let sum: f64 = xi.entries().iter().map(|v| v * v).sum();
    sum / (n * n * n)
}

/// Same diagnostic on a raw square matrix, diagonal included.
pub fn second_moment(rows: &[Vec<f64>]) -> Result<f64> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Construction("second moment needs a non-empty square matrix".into()));
    }
    let sum: f64 = rows.iter().flatten().map(|v| v * v).sum();
    Ok(sum / (n * n * n) as f64)
}
