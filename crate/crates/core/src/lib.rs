//! Exact-arithmetic combinatorics and semilinear algebra for torsion Kisin
//! modules over an unramified base: rank-1 weight invariants, model
//! enumeration with its uniqueness conditions, triangular Frobenius shape
//! normalization, block extension classes with dimension certificates, and
//! the liftability condition gates, together with desk-scale verification
//! sweeps for all of it.

pub mod error;
pub mod ext;
pub mod fq;
pub mod matrix;
pub mod model;
pub mod params;
pub mod pls;
pub mod rank1;
pub mod serre;
pub mod series;
pub mod shape;
pub mod verify;

pub use error::{Error, Result};
pub use fq::{FieldCtx, FqElem};
pub use params::{GlobalParams, ParamsConfig};
pub use series::{LaurentVal, TruncSeries};
