//! Report-producing commands over the `bisimp-core` engine.
//!
//! Every command returns a [`RunReport`] whose verdicts depend only on the
//! inputs; witnesses carry the certificates needed to re-check them.

pub mod commands;
pub mod report;
pub mod source;

pub use commands::{cmd_counterexample, cmd_identities, cmd_kan, cmd_theorem1, Construction};
pub use report::{Outcome, RunReport, SimplexRef, Verdict, Witness};
pub use source::{GroupSpec, Input, Source};
