//! Error types for geometry construction and tracking.

use crate::ids::{CellId, SurfaceId, UniverseId};
use crate::vec3::Position;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("position ({0:.6}, {1:.6}, {2:.6}) is outside the root universe")]
    OutsideWorld(f64, f64, f64),

    #[error("lost particle in {universe} at ({pos:?}): {context}")]
    LostParticle {
        universe: UniverseId,
        pos: Position,
        context: &'static str,
    },

    #[error("geometry inconsistency: no forward crossing from {universe} cell {cell}")]
    NoCrossing { universe: UniverseId, cell: CellId },

    #[error("cell {cell} of {universe} has an empty bounding box (contradictory senses)")]
    EmptyCellBox { universe: UniverseId, cell: CellId },

    #[error("universe {universe} is unbounded along an axis and no explicit extent was given")]
    UnboundedUniverse { universe: UniverseId },

    #[error("strategy {strategy} does not support universe {universe} ({kind})")]
    UnsupportedUniverse {
        strategy: &'static str,
        universe: UniverseId,
        kind: &'static str,
    },

    #[error("model is not a valid three-level reactor layout: {reason} (universe {universe})")]
    RtkShape { universe: UniverseId, reason: String },

    #[error("invalid geometry model: {0}")]
    InvalidModel(String),

    #[error("reflecting boundary on {universe} surface {surface} is not an axis-aligned plane")]
    BadReflectingSurface { universe: UniverseId, surface: SurfaceId },
}
