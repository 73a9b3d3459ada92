//! Scenario-driven front end for the down-conversion simulator.

pub mod bundled;
pub mod error;
pub mod output;
pub mod scenario;
pub mod tasks;

pub use error::{CliError, CliResult};
pub use output::{Format, Report, Table, Value};
pub use scenario::{Scenario, Task};
pub use tasks::{run, RunOptions};
