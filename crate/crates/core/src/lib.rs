//! Exact MAP segmentation of scalar-feature images under exponential
//! (absolute-difference) and Gaussian (squared-difference) Gibbs models.
//!
//! Both classifiers are reduced to minimum cuts:
//!
//! * the exponential model splits into `k` Boolean problems, one per label
//!   threshold, whose minimal cuts are nested and compose back into a label
//!   image ([`classify::classify_exp`]);
//! * the Gaussian model is expanded over `n * k` Boolean variables into a
//!   submodular quadratic polynomial that a single cut minimizes
//!   ([`classify::classify_gauss`]).
//!
//! Everything on the optimization path is exact integer arithmetic. The
//! [`oracle`] module enumerates small instances by brute force to confirm it.
//!
//! ```
//! use levelcut::model::{EdgeSet, FeatureField, Instance, LabelSet};
//! use levelcut::classify::classify_exp;
//!
//! let field = FeatureField::with_integer_weights(vec![0, 3], &[2, 1]).unwrap();
//! let labels = LabelSet::new(vec![0, 3], 3).unwrap();
//! let edges = EdgeSet::from_integer_arcs([(0, 1, 1), (1, 0, 1)]);
//! let inst = Instance::new(field, labels, edges).unwrap();
//!
//! let result = classify_exp(&inst).unwrap();
//! assert_eq!(result.labeling.values(), &[0, 0]);
//! assert_eq!(result.energy, 3.into());
//! ```

pub mod classify;
pub mod cli;
pub mod error;
pub mod imageio;
pub mod levelset;
pub mod maxflow;
pub mod model;
pub mod netbuild;
pub mod oracle;

pub use error::{Error, Result};
pub use model::Rational;
