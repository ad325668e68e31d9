//! Exact solvers for the recount/manipulation game on districted plurality
//! elections, plus the hardness-reduction instance generators and brute-force
//! graph oracles used to check them.

pub mod bench;
pub mod error;
pub mod format;
pub mod graph;
pub mod man;
pub mod manipulation;
pub mod model;
pub mod oracle;
pub mod rec;
mod recount;
pub mod reduction;
pub mod search;
pub mod verify;
pub mod voting;

pub use error::{Error, Result};
pub use man::{solve_man, DefenderTie, ManAnswer, ManProblem};
pub use model::{
    Candidate, District, DistrictId, ElectionInstance, ManipulationStrategy, RecountSet, Rule, ScoreVector,
    TieOrder, VoteProfile,
};
pub use rec::{solve_rec, RecAnswer, RecProblem};
pub use search::SearchOptions;
