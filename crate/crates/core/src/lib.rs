//! Exact computation with the path semigroup of a finite poset and the
//! operators of its left regular representation.

pub mod cuntz;
pub mod enumerate;
pub mod error;
pub mod expr;
pub mod homology;
pub mod laws;
pub mod net;
pub mod path;
pub mod operator;
pub mod poset;
pub mod rep;
pub mod snf;
pub mod suites;
pub mod window;
pub mod word;

pub use error::{Error, Result};
pub use path::{normalize, Direction, Path, Simplex1, Step};
pub use poset::{Elem, Poset};
