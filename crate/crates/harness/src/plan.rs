use std::fmt;
use std::str::FromStr;

use randomness::WeightModel;
use serde::{Deserialize, Serialize};
use wedge::{WedgeFunction, DEFAULT_MAX_VERTICES};

use crate::HarnessError;

/// Confidence intervals are only reported from this many replicas on.
pub const MIN_CI_REPLICAS: usize = 30;

/// A quantity recorded per `(n, replica)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measurement {
    /// `T(0, P(n))` with the full weights.
    #[serde(rename = "T")]
    T,
    /// `T^B(0, P(n))`, the Bernoulli passage time.
    #[serde(rename = "T_B")]
    TB,
    /// Maximum number of disjoint closed dual separating paths.
    #[serde(rename = "Y_n")]
    Yn,
    /// Same, from one level `j` of the top boundary.
    #[serde(rename = "Y_n_j")]
    YnLevel(u32),
    /// `T^B(0, P(n_k)) - T^B(0, P(n_{k-1}))` between consecutive grid points.
    #[serde(rename = "dT_B")]
    Increment,
}

impl Measurement {
    pub fn label(&self) -> String {
        match self {
            Measurement::T => "T".into(),
            Measurement::TB => "T_B".into(),
            Measurement::Yn => "Y_n".into(),
            Measurement::YnLevel(j) => format!("Y_n_j={j}"),
            Measurement::Increment => "dT_B".into(),
        }
    }

    /// Whether the values live on the integers (for lattice-aware tests).
    pub fn is_integer_valued(&self, model: &WeightModel) -> bool {
        match self {
            Measurement::T => model.is_constant() && model.delta == 1.0,
            _ => true,
        }
    }
}

impl FromStr for Measurement {
    type Err = String;

    /// Parses the labels produced by [`Measurement::label`].
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "T" => Measurement::T,
            "T_B" => Measurement::TB,
            "Y_n" => Measurement::Yn,
            "dT_B" => Measurement::Increment,
            _ => match s.strip_prefix("Y_n_j=").map(str::parse) {
                Some(Ok(j)) => Measurement::YnLevel(j),
                _ => return Err(format!("unknown measurement {s:?}; expected T, T_B, Y_n, Y_n_j=<j> or dT_B")),
            },
        })
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub wedge: WedgeFunction,
    pub model: WeightModel,
    pub n_grid: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub measurements: Vec<Measurement>,
    /// Vertex cap for the wedge at the largest `n`.
    #[serde(default = "default_cap")]
    pub max_vertices: u64,
}

fn default_cap() -> u64 {
    DEFAULT_MAX_VERTICES
}

impl ExperimentPlan {
    pub fn new(wedge: WedgeFunction, model: WeightModel, n_grid: Vec<usize>, replicas: usize, seed: u64) -> Self {
        ExperimentPlan {
            wedge,
            model,
            n_grid,
            replicas,
            seed,
            measurements: vec![Measurement::T],
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }

    pub fn with_measurements(mut self, m: &[Measurement]) -> Self {
        self.measurements = m.to_vec();
        self
    }

    pub fn n_max(&self) -> usize {
        self.n_grid.last().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.wedge.validate()?;
        self.model.validate()?;
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(HarnessError::InvalidPlan("n_grid must be nonempty and positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::InvalidPlan(format!("n_grid must be strictly increasing, got {:?}", self.n_grid)));
        }
        if self.replicas == 0 {
            return Err(HarnessError::InvalidPlan("replicas must be positive".into()));
        }
        if self.measurements.is_empty() {
            return Err(HarnessError::InvalidPlan("no measurements requested".into()));
        }
        let mut seen = self.measurements.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.measurements.len() {
            return Err(HarnessError::InvalidPlan("duplicate measurements".into()));
        }
        Ok(())
    }

    pub fn has_ci(&self) -> bool {
        self.replicas >= MIN_CI_REPLICAS
    }
}
