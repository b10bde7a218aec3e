//! Spectral networks of N-sheeted spectral curves over the punctured sphere,
//! and the quantized nonabelianization map from base braids to matrices over
//! the braid skein algebra of the cover.

pub mod braid;
pub mod curve;
pub mod error;
pub mod geom;
pub mod lift;
pub mod matskein;
pub mod network;
pub mod poly;
pub mod ring;
pub mod svg;

pub mod io;

pub use error::{Error, Result};
pub use geom::C;
