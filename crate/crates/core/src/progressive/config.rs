use serde::{Deserialize, Serialize};

use super::SequenceWeighting;
use crate::guidetree::TreeMethod;
use crate::pairhmm::HmmConfig;
use crate::refine::Acceptance;
use crate::seqcore::GapModel;
use crate::stochastic::{GaParams, SaParams};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Exact three-sequence DP.
    Exact3,
    #[serde(alias = "progressive-muscle")]
    Muscle,
    Tcoffee,
    #[default]
    Probcons,
    Ga,
    Sa,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Exact3,
        Strategy::Muscle,
        Strategy::Tcoffee,
        Strategy::Probcons,
        Strategy::Ga,
        Strategy::Sa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exact3 => "exact3",
            Strategy::Muscle => "muscle",
            Strategy::Tcoffee => "tcoffee",
            Strategy::Probcons => "probcons",
            Strategy::Ga => "ga",
            Strategy::Sa => "sa",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "progressive-muscle" => Ok(Strategy::Muscle),
            _ => Self::ALL
                .into_iter()
                .find(|x| x.name() == s)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy `{s}`"))),
        }
    }

    /// Checks the number of input sequences this strategy accepts.
    pub fn check_count(self, n: usize) -> Result<()> {
        let ok = match self {
            Strategy::Exact3 => n == 3,
            Strategy::Sa => n == 2,
            _ => n >= 2,
        };
        if ok {
            Ok(())
        } else {
            let need = match self {
                Strategy::Exact3 => "exactly 3",
                Strategy::Sa => "exactly 2",
                _ => "at least 2",
            };
            Err(Error::InvalidParameter(format!(
                "strategy {} needs {need} sequences, got {n}",
                self.name()
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MuscleConfig {
    pub kmer: usize,
    pub tree: TreeMethod,
    pub stage2_iterations: usize,
    pub refine_iterations: usize,
}

impl Default for MuscleConfig {
    fn default() -> Self {
        Self {
            kmer: 4,
            tree: TreeMethod::Upgma,
            stage2_iterations: 2,
            refine_iterations: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TcoffeeConfig {
    /// Local hits kept per sequence pair.
    pub topk: usize,
    pub tree: TreeMethod,
}

impl Default for TcoffeeConfig {
    fn default() -> Self {
        Self {
            topk: crate::consistlib::DEFAULT_TOPK,
            tree: TreeMethod::Nj,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbconsConfig {
    pub hmm: HmmConfig,
    pub epsilon: f64,
    pub consistency_rounds: usize,
    pub refine_rounds: usize,
    pub acceptance: Acceptance,
}

impl Default for ProbconsConfig {
    fn default() -> Self {
        Self {
            hmm: HmmConfig::default(),
            epsilon: crate::pairhmm::DEFAULT_EPSILON,
            consistency_rounds: 1,
            refine_rounds: 100,
            acceptance: Acceptance::Always,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Exact3Config {
    /// Largest DP table, in cells.
    pub budget_cells: u64,
    /// Cost of a residue against a gap; three-way DP has linear gaps only.
    pub gap: f64,
}

impl Default for Exact3Config {
    fn default() -> Self {
        Self {
            budget_cells: 1 << 24,
            gap: -4.0,
        }
    }
}

/// Settings for every strategy; only the chosen strategy's section is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub strategy: Strategy,
    /// Built-in matrix name (`BLOSUM62`, `NUC`) or a table file.
    pub matrix: String,
    pub gap: GapModel,
    pub seed: u64,
    pub weighting: SequenceWeighting,
    /// Scale profile gap costs by the residue fraction of the gapped column.
    pub gap_scaling: bool,
    pub muscle: MuscleConfig,
    pub tcoffee: TcoffeeConfig,
    pub probcons: ProbconsConfig,
    pub exact3: Exact3Config,
    pub ga: GaParams,
    pub sa: SaParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::default(),
            matrix: "BLOSUM62".into(),
            gap: GapModel::default(),
            seed: 0,
            weighting: SequenceWeighting::Uniform,
            gap_scaling: true,
            muscle: MuscleConfig::default(),
            tcoffee: TcoffeeConfig::default(),
            probcons: ProbconsConfig::default(),
            exact3: Exact3Config::default(),
            ga: GaParams::default(),
            sa: SaParams::default(),
        }
    }
}

impl PipelineConfig {
    /// Range checks on the settings the chosen strategy reads.
    pub fn validate(&self) -> Result<()> {
        self.gap.validate()?;
        match self.strategy {
            Strategy::Muscle if self.muscle.kmer == 0 => {
                Err(Error::InvalidParameter("muscle.kmer must be positive".into()))
            }
            Strategy::Tcoffee if self.tcoffee.topk == 0 => {
                Err(Error::InvalidParameter("tcoffee.topk must be positive".into()))
            }
            Strategy::Probcons if !(0.0..1.0).contains(&self.probcons.epsilon) => {
                Err(Error::InvalidParameter("probcons.epsilon must be in [0, 1)".into()))
            }
            Strategy::Exact3 if !(self.exact3.gap <= 0.0) => {
                Err(Error::InvalidParameter("exact3.gap must be non-positive".into()))
            }
            Strategy::Ga => self.ga.validate(),
            Strategy::Sa => self.sa.validate(),
            _ => Ok(()),
        }
    }
}
