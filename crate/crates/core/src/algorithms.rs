//! Name-based dispatch over every online policy.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::auction::EngineError;
use crate::baselines::{run_batching_with, run_greedy, run_mdda, run_patient, run_reopt};
use crate::coins::SeededCoins;
use crate::dda::{run_dda, run_sdda_with, ConstrainedBipartiteInstance};
use crate::market::{DynamicInstance, InstanceError, RunResult};
use crate::pdda::{run_pdda_known_departures_with, run_pdda_unknown_departures_with, run_pdda_with, PddaError};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Needs role labels on the instance.
    Dda,
    Sdda,
    Pdda,
    PddaKnown,
    PddaUnknown,
    Greedy,
    Batching { k: u32, rescue: bool },
    Patient,
    Mdda,
    Reopt,
}

#[derive(Debug, Error)]
pub enum AlgorithmError {
    #[error("unknown algorithm {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Pdda(#[from] PddaError),
}

impl Algorithm {
    /// Samples deadlines from the instance with `seed` and runs.
    pub fn run<S: Scalar>(&self, instance: &DynamicInstance<S>, seed: u64) -> Result<RunResult<S>, AlgorithmError> {
        let deadlines = instance.deadlines_for_seed(seed);
        self.run_with_deadlines(instance, &deadlines, seed)
    }

    /// Runs on fixed deadlines; `seed` drives coins and bidding order only.
    pub fn run_with_deadlines<S: Scalar>(
        &self,
        instance: &DynamicInstance<S>,
        deadlines: &[u32],
        seed: u64,
    ) -> Result<RunResult<S>, AlgorithmError> {
        let mut coins = SeededCoins::new(seed);
        let mut result = match *self {
            Algorithm::Dda => run_dda(&ConstrainedBipartiteInstance::from_labelled(instance)?, deadlines)?,
            Algorithm::Sdda => run_sdda_with(instance, deadlines, &mut coins)?,
            Algorithm::Pdda => run_pdda_with(instance, deadlines, &mut coins)?,
            Algorithm::PddaKnown => run_pdda_known_departures_with(instance, deadlines, &mut coins)?,
            Algorithm::PddaUnknown => run_pdda_unknown_departures_with(instance, deadlines, &mut coins)?,
            Algorithm::Greedy => run_greedy(instance, deadlines),
            Algorithm::Batching { k, rescue } => run_batching_with(instance, deadlines, k, rescue),
            Algorithm::Patient => run_patient(instance, deadlines),
            Algorithm::Mdda => run_mdda(instance, deadlines, seed),
            Algorithm::Reopt => run_reopt(instance, deadlines),
        };
        result.seed = seed;
        Ok(result)
    }

    /// Whether the outcome depends on the seed beyond the deadlines.
    pub fn is_randomized(&self) -> bool {
        matches!(
            self,
            Algorithm::Sdda | Algorithm::Pdda | Algorithm::PddaKnown | Algorithm::PddaUnknown | Algorithm::Mdda
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Dda => f.write_str("dda"),
            Algorithm::Sdda => f.write_str("sdda"),
            Algorithm::Pdda => f.write_str("pdda"),
            Algorithm::PddaKnown => f.write_str("pdda-known"),
            Algorithm::PddaUnknown => f.write_str("pdda-unknown"),
            Algorithm::Greedy => f.write_str("greedy"),
            Algorithm::Batching { k, rescue: false } => write!(f, "batching:{k}"),
            Algorithm::Batching { k, rescue: true } => write!(f, "batching:{k}:rescue"),
            Algorithm::Patient => f.write_str("patient"),
            Algorithm::Mdda => f.write_str("mdda"),
            Algorithm::Reopt => f.write_str("reopt"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = AlgorithmError;
    fn from_str(s: &str) -> Result<Self, AlgorithmError> {
        let unknown = || AlgorithmError::Unknown(s.to_string());
        Ok(match s {
            "dda" => Algorithm::Dda,
            "sdda" => Algorithm::Sdda,
            "pdda" => Algorithm::Pdda,
            "pdda-known" => Algorithm::PddaKnown,
            "pdda-unknown" => Algorithm::PddaUnknown,
            "greedy" => Algorithm::Greedy,
            "patient" => Algorithm::Patient,
            "mdda" => Algorithm::Mdda,
            "reopt" => Algorithm::Reopt,
            _ => {
                let rest = s.strip_prefix("batching:").ok_or_else(unknown)?;
                let (k, rescue) = match rest.strip_suffix(":rescue") {
                    Some(k) => (k, true),
                    None => (rest, false),
                };
                let k: u32 = k.parse().map_err(|_| unknown())?;
                if k == 0 {
                    return Err(unknown());
                }
                Algorithm::Batching { k, rescue }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{DepartureModel, Role};

    #[test]
    fn names_round_trip() {
        for s in [
            "dda",
            "sdda",
            "pdda",
            "pdda-known",
            "pdda-unknown",
            "greedy",
            "batching:5",
            "batching:50:rescue",
            "patient",
            "mdda",
            "reopt",
        ] {
            assert_eq!(s.parse::<Algorithm>().unwrap().to_string(), s);
        }
        for s in ["", "batching", "batching:0", "batching:x", "opt"] {
            assert!(s.parse::<Algorithm>().is_err(), "{s}");
        }
    }

    #[test]
    fn dispatch_runs_everything() {
        let inst = DynamicInstance::new(
            4,
            [(1, 3, 0.99), (2, 3, 1.0), (2, 4, 1.0)],
            DepartureModel::constant(2),
        )
        .unwrap();
        let labelled = inst.clone().with_roles(&[Role::Seller, Role::Seller, Role::Buyer, Role::Buyer]);
        for name in [
            "dda", "sdda", "pdda", "pdda-known", "pdda-unknown", "greedy", "batching:2", "patient", "mdda", "reopt",
        ] {
            let algo: Algorithm = name.parse().unwrap();
            let run = algo.run(&labelled, 3).unwrap();
            assert_eq!(run.seed, 3);
            assert!(run.audits_pass(), "{name}: {:?}", run.failures().collect::<Vec<_>>());
        }
        assert!(matches!(Algorithm::Dda.run(&inst, 0), Err(AlgorithmError::Instance(_))));
        assert_eq!(Algorithm::Dda.run(&labelled, 0).unwrap().total_value, 1.0);
    }
}
