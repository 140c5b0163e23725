//! End-to-end hybrid estimator: segmentation, relocation of joint
//! outcomes to lags, offset correction and stitching of template chunks.

mod compare;
mod estimate;
mod plan;
mod relocate;

pub use compare::{compare_runs, ComparisonReport};
pub use estimate::{estimate_snr, Backend, HybridConfig, ShotAllocation};
pub use plan::{
    optimal_segment_length, plan_segments, segment_cost, stationary_segment_length, PlannedSegment,
    SegmentLength, SegmentPlan, TemplateChunk,
};
pub use relocate::{relocate, Relocated, RelocationRule};
