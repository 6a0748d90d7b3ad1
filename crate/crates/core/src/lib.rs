//! Huisken and Ecker monotone integrals on explicit ancient mean curvature flows.

// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod flows;
pub mod kernel;
pub mod limits;
pub mod mollifier;
pub mod quad;
pub mod quantities;
pub mod vector;

pub use entropy::{entropy_of_slice, entropy_schedule, EntropyResult, EntropySchedule, OptimizerConfig};
pub use error::{Error, Result};
pub use flows::{by_name, AncientFlow, FlowSpec, CATALOG_NAMES};
pub use kernel::{Center, HeatBall, KernelPoint};
pub use limits::{
    verify_corollary32, verify_integrated_huisken, verify_theorem1, verify_theorem1_at, Corollary32Report,
    Schedules, Theorem1Report, Verdict,
};
pub use mollifier::{MollifierFamily, SmoothedEcker};
pub use quad::{Direction, LimitEstimate, MonotoneSeries, QuadConfig, QuadResult};
pub use quantities::{DensityEstimate, QuantityReport};
pub use vector::AmbientVec;
