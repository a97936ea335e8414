//! Exhaustively enumerable models of computation.

mod eca;
mod tm;

pub use eca::{eca_row_at, enumerate_eca, run_eca, step_eca, EcaRow, EcaRule, ECA_SPACE_SIZE};
pub use tm::{
    enumerate_tm, run_tm, tm_space_size, Move, Tape, TmAction, TmConfiguration, TmProgram, TmRun,
};
