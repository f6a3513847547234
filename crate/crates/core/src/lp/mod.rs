//! LP relaxations of the extended rank-one formulation.

pub mod build;
pub mod cuts;
pub mod model;
pub mod separate;

pub use build::{build, build_clp, build_flp, build_slp, BuildMode, Relaxation};
pub use cuts::{CutDescriptor, CutFamily};
pub use model::{ColumnLayout, LpModel, RowKind, Sense};
pub use separate::separate;
