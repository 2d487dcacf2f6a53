//! File formats, CSV ingestion and the batch pipelines behind the `tsq`
//! command line. The algorithms themselves live in `tsq-core`.

pub mod cli;
pub mod csvio;
pub mod formats;

pub use formats::{
    decode_any, decode_binary, decode_text, encode_binary, encode_text, Artifact, ArtifactKind, BandDescriptor,
    BandedArtifact, CoverageArtifact, FormatError, QuantileArtifact, FORMAT_VERSION,
};
