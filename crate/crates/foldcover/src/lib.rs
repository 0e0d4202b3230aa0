//! Finite covers of bounded surfaces with controlled boundary behaviour,
//! built from folded labelled graphs and certified by a permutation oracle.

pub mod completion;
pub mod cover_model;
pub mod pipeline;
pub mod slopes;
pub mod stallings;
pub mod words;

pub use stallings::{LabeledGraph, XPath};
pub use words::{Alphabet, Letter, SurfacePresentation, Word};
