//! Data ingestion: seeded synthetic Gaussian sources and loaders for the
//! idx (MNIST) and fvecs (GIST descriptor) container formats.

mod fvecs;
mod idx;
mod synthetic;

pub use fvecs::{load_fvecs, write_fvecs};
pub use idx::{load_idx_images, load_idx_labels};
pub use synthetic::{generate, Dataset, SourceKind, SyntheticSpec};
