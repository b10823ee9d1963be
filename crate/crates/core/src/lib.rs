//! Cylindrical algebraic decomposition and quantifier elimination over the
//! reals, with generators for the ladder-in-a-corridor (piano mover's)
//! formulations and heuristics for judging them.

pub mod basis;
pub mod cad;
pub mod cli;
pub mod error;
pub mod formula;
pub mod heuristics;
pub mod pianomovers;
pub mod poly;
pub mod projection;
pub mod realalg;
pub mod resultant;
pub mod upoly;

pub use error::{CadError, Result};
pub use formula::{Formula, Relop};
pub use poly::{Poly, Rat, VarOrder};
