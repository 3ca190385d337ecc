//! Deliberate defects used to show that the verification suite can fail.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// Build the characteristic operator with `+η*` on its diagonal.
    FlipThetaDiagonal,
    /// Build the Poisson kernel from the Cauchy kernel alone, without `Δ_*`.
    DropDefectInKernel,
}
