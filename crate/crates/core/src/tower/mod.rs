//! Event streams of the simplicial and cubical towers: construction, replay,
//! size audits and the face-survival experiment.

mod builder;
mod replay;
mod stats;
mod stream;
mod survival;

pub use builder::{
    build_cubical_tower, build_simplicial_tower, build_tower, relevant_scales, FaceRecord,
    ScaleLadder, Tower, TowerConfig,
};
pub use replay::{replay, replay_with, snapshots, validate, Replayer, Snapshot};
pub use stats::{
    active_face_bound, cubical_size_bound, stirling2, stream_stats, tower_size_bound, Audit,
    ScaleRow, Status, StreamStats,
};
pub use stream::{Event, EventStream, Mode, StreamHeader};
pub use survival::{survival_experiment, SurvivalReport, SURVIVAL_HORIZON};
