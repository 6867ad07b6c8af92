//! Hyperbolic and product-hyperbolic geometry toolkit.
//!
//! The geometric layers (`linalg`, `hyperbolic`, `product`, `measure`,
//! `quadrature`, `simplex`) are generic over the scalar type through
//! [`scalar::Real`]. Group-level code (`group`, `natural_map`,
//! `rep_volume`, `fixtures`, `io`) works in `f64`.

pub mod error;
pub mod fixtures;
pub mod group;
pub mod hyperbolic;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod natural_map;
pub mod product;
pub mod quadrature;
pub mod rep_volume;
pub mod scalar;
pub mod simplex;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Mat = linalg::Mat<f64>;
pub type Point = hyperbolic::Point<f64>;
pub type TangentVector = hyperbolic::TangentVector<f64>;
pub type IdealPoint = hyperbolic::IdealPoint<f64>;
pub type Isometry = hyperbolic::Isometry<f64>;
