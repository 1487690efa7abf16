//! Exact, desk-scale computations in metric geometry: Hausdorff and
//! Gromov-Hausdorff distances between finite metric spaces, the
//! ultrametrization lower bound, subsets of finite metric trees, canonical
//! Hausdorff geodesics, and the Kuratowski segment complex `D_t(X)`.
//!
//! ```
//! use ghtree::{gh_exact, Budget, FiniteMetricSpace};
//!
//! let x = FiniteMetricSpace::on_line(&[0.0, 4.0], 1e-9).unwrap();
//! let r = gh_exact(&FiniteMetricSpace::one_point(), &x, Budget::default()).unwrap();
//! assert_eq!(r.value, 2.0);
//! ```

pub mod correspondence;
pub mod error;
pub mod geodesic;
pub mod intervals;
pub mod io;
pub mod kuratowski;
pub mod metric;
pub mod oracle;
pub mod tol;
pub mod tree;
pub mod ultra;
pub mod verify;

pub use correspondence::{distortion, gh_exact, gh_lower_diam, Budget, Correspondence, GHResult};
pub use error::{Error, Result};
pub use geodesic::{hausdorff_subsets, neighborhood, slice, verify_geodesic, GeodesicCheck};
pub use intervals::{Interval, IntervalUnionSubset};
pub use kuratowski::{build_dt, dt_check, kuratowski_embed, DtCheck, SampledComplex, SupNormPoint};
pub use metric::{hausdorff, oriented_hausdorff, FiniteMetricSpace, SubsetRef};
pub use tol::{Tol, DEFAULT_EPS};
pub use tree::{
    classify, hausdorff_to_tree, make_example, tree_report, Condition, ExampleKind, MetricTree, TreePoint,
    TreeReport, TreeSubsetX,
};
pub use ultra::{
    connectivity_defect, dotted_length, gh_lower_ultra, minimax_matrix, threshold_connected, ultrametrize,
    DottedLine, UltrametricResult,
};
