//! Cubical persistent homology for 2D images.
//!
//! The crate computes 0- and 1-dimensional persistence diagrams of pixel
//! grids with a union-find engine (the dimension-1 diagram is obtained from
//! the dimension-0 diagram of an inverted, padded dual grid with
//! 8-connectivity), builds threshold, erosion and color multifiltrations,
//! slices bifiltrations into single-parameter filtrations, and vectorizes the
//! resulting diagrams. A slow boundary-matrix reduction in [`oracle`] serves
//! as ground truth for the engine.
//!
//! Module overview:
//!
//! * [`grid`]: value grids, binary masks, multi-channel images.
//! * [`filtration`]: staircase quantization, compact multifiltrations,
//!   erosion and color multifiltrations.
//! * [`persistence`]: edge enumeration, union-find pairing, batch
//!   computation and gradient scattering.
//! * [`multipers`]: slicing, Betti numbers, Hilbert functions, Betti tensors.
//! * [`vectorize`]: Betti curves, landscapes, silhouettes, the weighted tent
//!   vectorization and its multiparameter assembly.
//! * [`metrics`]: Wasserstein and bottleneck distances, slice-wise sums and
//!   the empirical stability harness.
//! * [`oracle`]: brute-force cubical chain complex and GF(2) reduction.
//! * [`io`] and [`cli`]: document formats, image loading and the command line.

pub mod cli;
pub mod error;
pub mod filtration;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod multipers;
pub mod oracle;
pub mod persistence;
pub mod vectorize;

pub use error::{Error, Result};
pub use grid::{BinaryGrid, MultiChannelImage, PixelCoord, ValueGrid};
pub use persistence::{compute_pd, PersistenceDiagram, PersistencePair};
