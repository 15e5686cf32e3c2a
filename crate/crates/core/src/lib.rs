//! Metric geometry of iterated function systems.
//!
//! * [`metric`]: affine contractions on boxes and the bounded sup-metric.
//! * [`ifs`]: n-map IFSs, the permutation-matched metric `D`, minimal
//!   ordering and the contractivity order.
//! * [`sequence`]: alignment, monotonicity, Cauchy/convergence indices and
//!   limit candidates for finite IFS sequences.
//! * [`attractor`] and [`pointset`]: Hutchinson iteration, chaos game,
//!   code-space points and Hausdorff distances on snapped point sets.
//! * [`collage`]: collage distance and bound, collage fitting and
//!   extrapolation of fitted sequences.
//! * [`io`] and [`cli`]: file formats and the command implementations behind
//!   the `ifsmetric` binary.

// `!(x < y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod attractor;
pub mod cli;
pub mod collage;
pub mod error;
pub mod ifs;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod pointset;
pub mod rational;
pub mod sequence;

pub use error::{Error, Result};
pub use ifs::{big_d, cost_matrix, is_minimally_ordered, is_mo_set, leq, minimal_order, optimal_matching, CostMatrix, Ifs, Permutation};
pub use metric::{dbar_inf, sup_distance, AffineMap, BoxDomain, MetricValue};
pub use pointset::{hausdorff, PointSet};
pub use sequence::IfsSequence;
