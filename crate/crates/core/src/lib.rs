//! Dynamic rays, Yoccoz puzzles and renormalization for the cosine family
//! `f(z) = a e^z + b e^-z`.

pub mod basins;
pub mod error;
pub mod export;
pub mod geometry;
pub mod map;
pub mod puzzle;
pub mod rays;
pub mod render;
pub mod renorm;
pub mod scan;
pub mod symbolic;

pub use error::{Error, Result};
pub use map::{normalize, CosineMap, Escaped, StripIndex};
pub use symbolic::Address;
