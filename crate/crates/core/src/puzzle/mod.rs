//! Yoccoz puzzles for the cosine family: the invariant graph built from an
//! internal ray, a dynamic ray and an equipotential; bounded pieces of depth 0
//! found by planar subdivision of the ellipse `E`; deeper pieces by lifting
//! boundaries through `f`; tableaux and renormalization detection.

mod graph;
mod pieces;
mod raster;
mod tableau;

pub use graph::{build_graph, find_graph, Curve, CurveTag, GraphSpec, PuzzleGraph};
pub use pieces::{
    bounded_modification, ellipse_curve, ellipse_semi_axes, pieces_at_depth0, refine, Arc, ModifiedPuzzle,
    PuzzlePiece,
};
pub(crate) use pieces::{ellipse_slack, rectangle_margin};
pub use raster::{Grid, Subdivision};
pub use tableau::{
    approx_impression, detect_renormalization, tableau, CriticalDepth, Impression, RenormTableauCandidate,
    Tableau, TableauCell, DEGREE_TARGETS, ORBIT_RETURNS,
};
