//! Classic and kernelized Taylor diagrams.
//!
//! A classic Taylor diagram places each population at radius = standard
//! deviation and angle = `acos(pearson correlation)` against a reference; the
//! distance to the reference point is then the centered RMSE. The kernelized
//! variant swaps in Gaussian-kernel mean embeddings: radius = `|mu_x|`,
//! angle = `acos(<mu_x, mu_ref> / (|mu_x| |mu_ref|))`, and the distance to the
//! reference is the maximum mean discrepancy.
//!
//! ```
//! use ktd_core::{build_diagram, datagen, DiagramMode, KernelConfig};
//!
//! let suite = datagen::generate_suite(&datagen::SyntheticSpec {
//!     n_samples: 200,
//!     ..datagen::SyntheticSpec::with_seed(1)
//! })
//! .unwrap();
//! let ktd = build_diagram(
//!     &suite.populations,
//!     &suite.reference,
//!     DiagramMode::KernelizedTaylor,
//!     &KernelConfig::median().into(),
//! )
//! .unwrap();
//! assert!(ktd.points.iter().all(|p| p.angle < std::f64::consts::FRAC_PI_2));
//! ```

pub mod classic_taylor;
pub mod datagen;
pub mod diagram;
pub mod error;
pub mod formats;
pub mod kernel_embedding;
pub mod kernels;
pub mod population;
pub mod render_svg;

pub use classic_taylor::{centered_rmse, classic_stats, pearson, ClassicStats};
pub use diagram::{
    build_diagram, ktd_point, taylor_point, DiagramMode, DiagramModel, DiagramOptions, DiagramPoint,
};
pub use error::{Error, Result};
pub use formats::{CoordinatesDocument, ModeSelection};
pub use kernel_embedding::{
    cross_inner, embedding_stats, info_potential, mmd_sq_u, mmd_sq_v, quadratic_entropy,
    sq_embedding_norm, EmbeddingStats,
};
pub use kernels::{
    gaussian_kernel, gram, resolve_bandwidth, BandwidthSpec, GramMatrix, Kernel, KernelConfig,
    KernelFamily,
};
pub use population::Population;
pub use render_svg::{render, RenderOptions, Viewport};
