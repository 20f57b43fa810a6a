//! Data pipeline: CSV ingestion, imputation and normalization, causal
//! alignment of the two modalities, chronological splitting, and a seeded
//! synthetic dataset generator.

pub mod align;
pub mod ingest;
pub mod preprocess;
pub mod synthetic;

pub use align::{
    align_modalities, aligned_windows, split_chronological, AlignedSample, SplitOutcome,
};
pub use ingest::{ingest_csv, write_csv, Modality, RawModalityTable};
pub use preprocess::{impute_missing, minmax_normalize, FeatureStats, PreprocessStats};
pub use synthetic::{generate_separable_toy, generate_synthetic, SyntheticSpec};
