//! Delimited-file ingestion driven by a small TOML schema, and a seeded
//! generator of biased, censored synthetic data.

mod csvio;
mod schema;
mod synth;

pub use csvio::{load_csv, read_csv, write_csv, write_csv_to};
pub use schema::{bundled_schema, DatasetSchema, FeatureKindName, FeatureSpec, BUNDLED_SCHEMAS};
pub use synth::{generate_synthetic, SynthSpec};
