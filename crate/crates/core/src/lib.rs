//! Fast image segmentation from boundary-to-pixel direction fields.
//!
//! A direction field assigns each pixel the unit vector pointing from its
//! nearest region boundary to the pixel. Pixels on opposite sides of a
//! boundary carry roughly opposite vectors, which makes boundaries show up
//! as direction discontinuities even where image evidence is weak. The
//! pipeline in this crate turns such a field into a segmentation:
//!
//! 1. [`field`] — build fields from label maps (exact nearest-site distance
//!    transform), perturb them, and measure field discrepancy.
//! 2. [`forest`] — group pixels into stripe-like superpixels by following
//!    per-pixel direction agreement into a parent-pointer forest.
//! 3. [`segmenter`] — merge nearby tree roots, build a region adjacency
//!    graph scored by direction similarity along shared boundaries, and
//!    partition it with size-adaptive thresholds and repulsion constraints.
//! 4. [`metrics`] — segmentation covering, probabilistic Rand index, and
//!    variation of information for evaluating results.
//! 5. [`imaging`] — binary PGM/PPM and field file I/O plus visualizations.
//! 6. [`synth`] — seeded synthetic label maps for tests and benchmarks.
//!
//! Coordinate convention throughout: `(row, col)` with row increasing
//! downward; direction vectors are stored as `(d_row, d_col)`.

pub mod error;
pub mod field;
pub mod forest;
pub mod imaging;
pub mod metrics;
pub mod segmenter;
pub mod synth;

pub use error::{Error, Result};
pub use field::{
    boundary_sites, field_discrepancy, gt_field, nearest_site_transform, perturb,
    BoundarySiteSet, DirectionField, FieldDiscrepancy, LabelMap, NearestSites, Site,
};
pub use forest::{build_forest, flatten, next_pixel, ParentForest, PartitionConfig};
pub use metrics::{contingency, covering, evaluate, pri, vi, ContingencyTable, MetricReport};
pub use segmenter::{
    build_rag, edge_similarity, merge_nearby_roots, partition_graph, segment, PartitionResult,
    RegionEdge, RegionGraph, SegConfig,
};
