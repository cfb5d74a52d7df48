use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which parameterization to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusKind {
    /// Partial-fraction transfer function with `N` distinct poles and
    /// full-rank residues.
    TransferFunction,
    /// Same, with rank-one residues `γᵢβᵢᵀ`.
    TransferFunctionRank1,
    /// Raw `(A, B, C, D)` entries.
    StateSpace,
    /// Balanced parameters plus the state transformation.
    BalancedStateSpace,
}

impl FromStr for CensusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transfer_function" => Ok(Self::TransferFunction),
            "transfer_function_rank1" => Ok(Self::TransferFunctionRank1),
            "state_space" => Ok(Self::StateSpace),
            "balanced_state_space" => Ok(Self::BalancedStateSpace),
            other => Err(Error::invalid("kind", format!("unknown census kind `{other}`"))),
        }
    }
}

impl fmt::Display for CensusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TransferFunction => "transfer_function",
            Self::TransferFunctionRank1 => "transfer_function_rank1",
            Self::StateSpace => "state_space",
            Self::BalancedStateSpace => "balanced_state_space",
        })
    }
}

/// Parameter counts split by identifiability.
///
/// For raw state space, `D` is identifiable and every entry of `A`, `B`, `C`
/// is pooled as conditionally identifiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamCensus {
    pub identifiable: usize,
    pub structural: usize,
    pub conditionally_identifiable: usize,
    pub total: usize,
}

impl ParamCensus {
    fn new(identifiable: usize, structural: usize, conditionally_identifiable: usize) -> Self {
        Self {
            identifiable,
            structural,
            conditionally_identifiable,
            total: identifiable + structural + conditionally_identifiable,
        }
    }
}

/// Counts parameters of an order-`order` (or degree-`N`) model with `m`
/// inputs and `p` outputs.
pub fn param_census(kind: CensusKind, order: usize, m: usize, p: usize) -> Result<ParamCensus> {
    if order == 0 || m == 0 || p == 0 {
        return Err(Error::invalid("dimensions", "order, m and p must be positive"));
    }
    let n = order;
    Ok(match kind {
        CensusKind::TransferFunction => ParamCensus::new(n * p * m + n + p * m, 0, 0),
        CensusKind::TransferFunctionRank1 => ParamCensus::new(n * p + n * m + p * m, 0, 0),
        CensusKind::StateSpace => ParamCensus::new(p * m, 0, n * n + n * m + n * p),
        CensusKind::BalancedStateSpace => ParamCensus::new(n * m + n * p + p * m, n * n, 0),
    })
}
