//! Recompilation of the nearest-neighbour encoder into CZ skeletons.
//!
//! Each SWAP-containing block is replaced by a fixed CZ pattern dressed
//! with `Rz·Ry·Rz` slots. Slot angles are found by random-restart
//! Nelder–Mead on the squared Frobenius distance, then moved onto
//! rational multiples of π one at a time while the rest re-optimize.

mod optimize;
mod pipeline;
mod snap;
mod template;

pub use optimize::{nelder_mead, optimize, restart_rng, run_restart, OptimizeOutcome, OptimizerConfig, SimplexResult};
pub use pipeline::{
    compile_block, compile_encoder, merge_single_qubit_runs, phase_aligned_distance, synthesize_single, to_cz_basis,
    Block, BlockReport, CompileReport, EncoderSplit,
};
pub use snap::{grid_offset, progressive_snap, snap_and_verify, snap_angle, snap_angles};
pub use template::{best_phase, distance, with_best_phase, GateTemplate, TemplateOp};
