//! Semi-explicit DAE systems: variables, inputs, incidence and evaluation.

mod document;
mod incidence;
mod model;
mod restrict;
mod schedule;
mod space;

pub use document::{IncidenceDocument, ModelDocument, RowDocument, VariableDocument, MODEL_SCHEMA_VERSION};
pub use incidence::{Incidence, IncidenceBuilder, MixedPair};
pub use model::{DaeModel, Equations, ModelSource, SolveOptions};
pub use restrict::RestrictedModel;
pub use schedule::{InputChannel, InputSchedule, PiecewiseLinear, ResolvedSchedule, Signal};
pub use space::VariableSpace;
