//! Configuration-aware performance analysis of small configurable programs.

pub mod baselines;
pub mod compress;
pub mod corpus;
pub mod exec;
pub mod generate;
pub mod lang;
pub mod model;
pub mod options;
pub mod pipeline;
pub mod regions;
pub mod taint;
pub mod time;

pub use options::{opts, Configuration, OptionSet};
pub use taint::{InteractionSet, StatementInfluenceMap};
pub use time::Millis;
