//! Compressed-artifact containers.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! "TSQC" | version u8 | kind u8 | body length u32 | body | CRC-32 u32
//! ```
//!
//! The CRC covers every byte before it. Bodies per kind:
//!
//! ```text
//! change-points  = original_length u32 | last_timestamp i64 | M u32 | M × (timestamp i64, value f64)
//! quantile_a     = n u32 | n × level f64 | change-points
//! banded_b       = band tag u8 | band | n_slices u32 | statistic u8
//!                  | n_slices × (present u8 [, m_j f64]) | exact_count u32 | change-points
//!   band tag 0   = lower f64 | upper f64
//!   band tag 1   = window u32 | lower_q f64 | upper_q f64 | epsilon f64
//! coverage_c     = delta f64 | dim u32 | K u32 | K × dim f64 | N u32 | N × timestamp i64
//!                  | N × code u32 (0xFFFF_FFFF = outlier) | outliers × dim f64
//! ```
//!
//! The text form is a JSON document with fixed key order whose `crc32` field
//! repeats the CRC footer of the binary encoding of the same artifact.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tsq_core::{Assignment, Codebook, CompressedSeries, Coverage, PointCloud, Statistic, Timestamp};

pub const MAGIC: [u8; 4] = *b"TSQC";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 10;
const CRC_LEN: usize = 4;
const OUTLIER_CODE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("truncated artifact: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u64),
    #[error("unknown artifact kind {0}")]
    UnknownKind(String),
    #[error("{trailing} unexpected bytes after the artifact body")]
    TrailingBytes { trailing: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid artifact: {0}")]
    Invalid(String),
}

impl From<tsq_core::Error> for FormatError {
    fn from(e: tsq_core::Error) -> Self {
        FormatError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    QuantileA,
    BandedB,
    CoverageC,
}

impl ArtifactKind {
    pub fn code(self) -> u8 {
        match self {
            ArtifactKind::QuantileA => 1,
            ArtifactKind::BandedB => 2,
            ArtifactKind::CoverageC => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, FormatError> {
        match code {
            1 => Ok(ArtifactKind::QuantileA),
            2 => Ok(ArtifactKind::BandedB),
            3 => Ok(ArtifactKind::CoverageC),
            other => Err(FormatError::UnknownKind(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ArtifactKind::QuantileA => "quantile_a",
            ArtifactKind::BandedB => "banded_b",
            ArtifactKind::CoverageC => "coverage_c",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, FormatError> {
        match name {
            "quantile_a" => Ok(ArtifactKind::QuantileA),
            "banded_b" => Ok(ArtifactKind::BandedB),
            "coverage_c" => Ok(ArtifactKind::CoverageC),
            other => Err(FormatError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileArtifact {
    pub codebook: Codebook,
    pub series: CompressedSeries,
}

/// How the threshold band was produced; per-timestamp bounds are not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BandDescriptor {
    Constant { lower: f64, upper: f64 },
    Rolling { window: u32, lower_q: f64, upper_q: f64, epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedArtifact {
    pub band: BandDescriptor,
    pub statistic: Statistic,
    /// One entry per slice; `None` for slices that received no samples.
    pub slice_stats: Vec<Option<f64>>,
    pub exact_count: u32,
    pub series: CompressedSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageArtifact {
    pub timestamps: Vec<Timestamp>,
    pub coverage: Coverage,
    /// Exact coordinates of the outliers, in point order.
    pub outlier_values: Vec<f64>,
}

impl CoverageArtifact {
    pub fn new(timestamps: Vec<Timestamp>, cloud: &PointCloud, coverage: Coverage) -> Result<Self, FormatError> {
        if timestamps.len() != cloud.len() || coverage.assignment().len() != cloud.len() {
            return Err(FormatError::Invalid("timestamps, cloud and coverage differ in length".into()));
        }
        let outlier_values = coverage.outliers().iter().flat_map(|&i| cloud.point(i).iter().copied()).collect();
        let artifact = CoverageArtifact { timestamps, coverage, outlier_values };
        artifact.validate()?;
        Ok(artifact)
    }

    fn validate(&self) -> Result<(), FormatError> {
        let n = self.coverage.assignment().len();
        if n == 0 {
            return Err(FormatError::Invalid("coverage artifact without points".into()));
        }
        if self.timestamps.len() != n {
            return Err(FormatError::Invalid("timestamp count differs from point count".into()));
        }
        if self.timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FormatError::Invalid("timestamps not strictly increasing".into()));
        }
        if self.outlier_values.len() != self.coverage.outliers().len() * self.coverage.dim() {
            return Err(FormatError::Invalid("outlier payload does not match outlier codes".into()));
        }
        if self.outlier_values.iter().any(|v| !v.is_finite()) {
            return Err(FormatError::Invalid("non-finite outlier coordinate".into()));
        }
        Ok(())
    }

    /// The encoded cloud: centroids for coded points, exact outliers.
    pub fn reconstruct(&self) -> Result<PointCloud, FormatError> {
        let dim = self.coverage.dim();
        let mut coords = Vec::with_capacity(self.timestamps.len() * dim);
        let mut outliers = self.outlier_values.chunks_exact(dim);
        for a in self.coverage.assignment() {
            match a {
                Assignment::Centroid(j) => coords.extend_from_slice(self.coverage.centroid(*j)),
                Assignment::Outlier => coords.extend_from_slice(outliers.next().expect("validated outlier count")),
            }
        }
        Ok(PointCloud::new(dim, coords)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    QuantileA(QuantileArtifact),
    BandedB(BandedArtifact),
    CoverageC(CoverageArtifact),
}

impl Artifact {
    pub fn kind(&self) -> ArtifactKind {
        match self {
            Artifact::QuantileA(_) => ArtifactKind::QuantileA,
            Artifact::BandedB(_) => ArtifactKind::BandedB,
            Artifact::CoverageC(_) => ArtifactKind::CoverageC,
        }
    }

    /// The change-point series of a 1-D artifact.
    pub fn compressed_series(&self) -> Option<&CompressedSeries> {
        match self {
            Artifact::QuantileA(a) => Some(&a.series),
            Artifact::BandedB(b) => Some(&b.series),
            Artifact::CoverageC(_) => None,
        }
    }
}

fn count(n: usize, what: &str) -> Result<u32, FormatError> {
    u32::try_from(n).map_err(|_| FormatError::Invalid(format!("{what} count {n} exceeds u32")))
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn series(&mut self, s: &CompressedSeries) -> Result<(), FormatError> {
        self.u32(count(s.original_length(), "sample")?);
        self.i64(s.original_last_timestamp());
        self.u32(count(s.len(), "change-point")?);
        for &(t, v) in s.points() {
            self.i64(t);
            self.f64(v);
        }
        Ok(())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    /// offset of `bytes[0]` in the whole artifact, for error messages
    base: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.bytes.len() - self.pos < n {
            return Err(FormatError::Truncated {
                needed: self.base + self.pos + n,
                available: self.base + self.bytes.len(),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn i64(&mut self) -> Result<i64, FormatError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, FormatError> {
        // bound the allocation by what is actually left
        let raw = self.take(n.checked_mul(8).ok_or_else(|| FormatError::Invalid("count overflow".into()))?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn series(&mut self) -> Result<CompressedSeries, FormatError> {
        let original_length = self.u32()? as usize;
        let last = self.i64()?;
        let m = self.u32()? as usize;
        let raw = self.take(m.checked_mul(16).ok_or_else(|| FormatError::Invalid("count overflow".into()))?)?;
        let points = raw
            .chunks_exact(16)
            .map(|c| (i64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
            .collect();
        Ok(CompressedSeries::new(points, original_length, last)?)
    }
}

fn statistic_code(s: Statistic) -> u8 {
    match s {
        Statistic::Median => 0,
        Statistic::Mean => 1,
    }
}

fn statistic_from_code(c: u8) -> Result<Statistic, FormatError> {
    match c {
        0 => Ok(Statistic::Median),
        1 => Ok(Statistic::Mean),
        other => Err(FormatError::Invalid(format!("unknown statistic code {other}"))),
    }
}

fn check_band(band: &BandDescriptor) -> Result<(), FormatError> {
    let ok = match *band {
        BandDescriptor::Constant { lower, upper } => lower.is_finite() && upper.is_finite() && lower < upper,
        BandDescriptor::Rolling { window, lower_q, upper_q, epsilon } => {
            window >= 2 && 0.0 <= lower_q && lower_q < upper_q && upper_q <= 1.0 && epsilon > 0.0 && epsilon.is_finite()
        }
    };
    if ok {
        Ok(())
    } else {
        Err(FormatError::Invalid("invalid band descriptor".into()))
    }
}

fn check_quantile(a: &QuantileArtifact) -> Result<(), FormatError> {
    if a.series.points().iter().all(|&(_, v)| a.codebook.contains(v)) {
        Ok(())
    } else {
        Err(FormatError::Invalid("change-point value outside the codebook".into()))
    }
}

fn check_banded(b: &BandedArtifact) -> Result<(), FormatError> {
    check_band(&b.band)?;
    if b.slice_stats.is_empty() {
        return Err(FormatError::Invalid("banded artifact needs at least one slice".into()));
    }
    if b.slice_stats.iter().flatten().any(|v| !v.is_finite()) {
        return Err(FormatError::Invalid("non-finite slice statistic".into()));
    }
    if b.exact_count as usize > b.series.original_length() {
        return Err(FormatError::Invalid("more exact samples than samples".into()));
    }
    Ok(())
}

fn encode_body(artifact: &Artifact, w: &mut Writer) -> Result<(), FormatError> {
    match artifact {
        Artifact::QuantileA(a) => {
            check_quantile(a)?;
            w.u32(count(a.codebook.len(), "level")?);
            a.codebook.levels().iter().for_each(|&l| w.f64(l));
            w.series(&a.series)?;
        }
        Artifact::BandedB(b) => {
            check_banded(b)?;
            match b.band {
                BandDescriptor::Constant { lower, upper } => {
                    w.u8(0);
                    w.f64(lower);
                    w.f64(upper);
                }
                BandDescriptor::Rolling { window, lower_q, upper_q, epsilon } => {
                    w.u8(1);
                    w.u32(window);
                    w.f64(lower_q);
                    w.f64(upper_q);
                    w.f64(epsilon);
                }
            }
            w.u32(count(b.slice_stats.len(), "slice")?);
            w.u8(statistic_code(b.statistic));
            for s in &b.slice_stats {
                match s {
                    Some(v) => {
                        w.u8(1);
                        w.f64(*v);
                    }
                    None => w.u8(0),
                }
            }
            w.u32(b.exact_count);
            w.series(&b.series)?;
        }
        Artifact::CoverageC(c) => {
            c.validate()?;
            let cov = &c.coverage;
            w.f64(cov.delta());
            w.u32(count(cov.dim(), "dimension")?);
            w.u32(count(cov.k(), "centroid")?);
            cov.centroids().iter().for_each(|&x| w.f64(x));
            w.u32(count(c.timestamps.len(), "point")?);
            c.timestamps.iter().for_each(|&t| w.i64(t));
            for a in cov.assignment() {
                w.u32(match a {
                    Assignment::Centroid(j) => count(*j, "centroid index")?,
                    Assignment::Outlier => OUTLIER_CODE,
                });
            }
            c.outlier_values.iter().for_each(|&x| w.f64(x));
        }
    }
    Ok(())
}

/// Serializes to the binary container.
pub fn encode_binary(artifact: &Artifact) -> Result<Vec<u8>, FormatError> {
    let mut body = Writer(Vec::new());
    encode_body(artifact, &mut body)?;
    let mut w = Writer(Vec::with_capacity(HEADER_LEN + body.0.len() + CRC_LEN));
    w.0.extend_from_slice(&MAGIC);
    w.u8(FORMAT_VERSION);
    w.u8(artifact.kind().code());
    w.u32(count(body.0.len(), "body byte")?);
    w.0.extend_from_slice(&body.0);
    let crc = crc32fast::hash(&w.0);
    w.u32(crc);
    Ok(w.0)
}

/// Parses the binary container. Magic and checksum are verified before any
/// payload parsing; a short stream reports [`FormatError::Truncated`].
pub fn decode_binary(bytes: &[u8]) -> Result<Artifact, FormatError> {
    if bytes.len() < MAGIC.len() {
        return Err(FormatError::Truncated { needed: HEADER_LEN + CRC_LEN, available: bytes.len() });
    }
    if bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < HEADER_LEN + CRC_LEN {
        return Err(FormatError::Truncated { needed: HEADER_LEN + CRC_LEN, available: bytes.len() });
    }
    let body_len = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let declared = HEADER_LEN + body_len + CRC_LEN;
    let split = bytes.len() - CRC_LEN;
    let stored = u32::from_le_bytes(bytes[split..].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..split]);
    if stored != computed {
        if bytes.len() < declared {
            return Err(FormatError::Truncated { needed: declared, available: bytes.len() });
        }
        return Err(FormatError::Checksum { stored, computed });
    }
    if bytes.len() != declared {
        return Err(FormatError::Invalid(format!("declared {declared} bytes, found {}", bytes.len())));
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(bytes[4] as u64));
    }
    let kind = ArtifactKind::from_code(bytes[5])?;
    let mut r = Reader { bytes: &bytes[HEADER_LEN..split], pos: 0, base: HEADER_LEN };
    let artifact = decode_body(kind, &mut r)?;
    if r.pos != r.bytes.len() {
        return Err(FormatError::TrailingBytes { trailing: r.bytes.len() - r.pos });
    }
    Ok(artifact)
}

fn decode_body(kind: ArtifactKind, r: &mut Reader<'_>) -> Result<Artifact, FormatError> {
    Ok(match kind {
        ArtifactKind::QuantileA => {
            let n = r.u32()? as usize;
            let codebook = Codebook::new(r.f64s(n)?)?;
            let series = r.series()?;
            let a = QuantileArtifact { codebook, series };
            check_quantile(&a)?;
            Artifact::QuantileA(a)
        }
        ArtifactKind::BandedB => {
            let band = match r.u8()? {
                0 => BandDescriptor::Constant { lower: r.f64()?, upper: r.f64()? },
                1 => BandDescriptor::Rolling {
                    window: r.u32()?,
                    lower_q: r.f64()?,
                    upper_q: r.f64()?,
                    epsilon: r.f64()?,
                },
                other => return Err(FormatError::Invalid(format!("unknown band tag {other}"))),
            };
            let n_slices = r.u32()? as usize;
            let statistic = statistic_from_code(r.u8()?)?;
            let mut slice_stats = Vec::with_capacity(n_slices.min(r.bytes.len()));
            for _ in 0..n_slices {
                slice_stats.push(match r.u8()? {
                    0 => None,
                    1 => Some(r.f64()?),
                    other => return Err(FormatError::Invalid(format!("bad slice flag {other}"))),
                });
            }
            let exact_count = r.u32()?;
            let series = r.series()?;
            let b = BandedArtifact { band, statistic, slice_stats, exact_count, series };
            check_banded(&b)?;
            Artifact::BandedB(b)
        }
        ArtifactKind::CoverageC => {
            let delta = r.f64()?;
            let dim = r.u32()? as usize;
            let k = r.u32()? as usize;
            let centroids = r.f64s(k.checked_mul(dim).ok_or_else(|| FormatError::Invalid("count overflow".into()))?)?;
            let n = r.u32()? as usize;
            let ts_raw = r.take(n.checked_mul(8).ok_or_else(|| FormatError::Invalid("count overflow".into()))?)?;
            let timestamps = ts_raw.chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().unwrap())).collect();
            let codes_raw = r.take(n * 4)?;
            let assignment: Vec<Assignment> = codes_raw
                .chunks_exact(4)
                .map(|c| match u32::from_le_bytes(c.try_into().unwrap()) {
                    OUTLIER_CODE => Assignment::Outlier,
                    j => Assignment::Centroid(j as usize),
                })
                .collect();
            let outliers = assignment.iter().filter(|a| **a == Assignment::Outlier).count();
            let outlier_values = r.f64s(outliers * dim)?;
            let coverage = Coverage::from_parts(dim, centroids, assignment, delta)?;
            let c = CoverageArtifact { timestamps, coverage, outlier_values };
            c.validate()?;
            Artifact::CoverageC(c)
        }
    })
}

// ---- text form ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDoc {
    original_length: u64,
    original_last_timestamp: i64,
    points: Vec<(i64, f64)>,
}

impl SeriesDoc {
    fn from_series(s: &CompressedSeries) -> Self {
        SeriesDoc {
            original_length: s.original_length() as u64,
            original_last_timestamp: s.original_last_timestamp(),
            points: s.points().to_vec(),
        }
    }

    fn into_series(self) -> Result<CompressedSeries, FormatError> {
        let n = usize::try_from(self.original_length).map_err(|_| FormatError::Invalid("length overflow".into()))?;
        Ok(CompressedSeries::new(self.points, n, self.original_last_timestamp)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantileDoc {
    codebook: Vec<f64>,
    series: SeriesDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandedDoc {
    band: BandDescriptor,
    statistic: Statistic,
    slice_stats: Vec<Option<f64>>,
    exact_count: u32,
    series: SeriesDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverageDoc {
    delta: f64,
    dim: u32,
    centroids: Vec<Vec<f64>>,
    timestamps: Vec<i64>,
    /// `null` marks an outlier
    codes: Vec<Option<u32>>,
    outliers: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document<P> {
    format: String,
    version: u64,
    kind: String,
    crc32: u32,
    payload: P,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u64,
    kind: String,
}

/// The footer CRC of the binary encoding. (Hashing the whole encoding,
/// footer included, would give the same residue for every artifact.)
fn binary_crc(artifact: &Artifact) -> Result<u32, FormatError> {
    let bytes = encode_binary(artifact)?;
    Ok(u32::from_le_bytes(bytes[bytes.len() - CRC_LEN..].try_into().unwrap()))
}

fn parse_error(e: serde_json::Error) -> FormatError {
    FormatError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Serializes to the canonical JSON document.
pub fn encode_text(artifact: &Artifact) -> Result<String, FormatError> {
    let crc32 = binary_crc(artifact)?;
    let doc = |payload| Document {
        format: "TSQC".to_string(),
        version: FORMAT_VERSION as u64,
        kind: artifact.kind().name().to_string(),
        crc32,
        payload,
    };
    let text = match artifact {
        Artifact::QuantileA(a) => serde_json::to_string_pretty(&doc(QuantileDoc {
            codebook: a.codebook.levels().to_vec(),
            series: SeriesDoc::from_series(&a.series),
        })),
        Artifact::BandedB(b) => serde_json::to_string_pretty(&Document {
            format: "TSQC".to_string(),
            version: FORMAT_VERSION as u64,
            kind: artifact.kind().name().to_string(),
            crc32,
            payload: BandedDoc {
                band: b.band,
                statistic: b.statistic,
                slice_stats: b.slice_stats.clone(),
                exact_count: b.exact_count,
                series: SeriesDoc::from_series(&b.series),
            },
        }),
        Artifact::CoverageC(c) => {
            let cov = &c.coverage;
            let dim = cov.dim();
            serde_json::to_string_pretty(&Document {
                format: "TSQC".to_string(),
                version: FORMAT_VERSION as u64,
                kind: artifact.kind().name().to_string(),
                crc32,
                payload: CoverageDoc {
                    delta: cov.delta(),
                    dim: count(dim, "dimension")?,
                    centroids: cov.centroids().chunks_exact(dim).map(<[f64]>::to_vec).collect(),
                    timestamps: c.timestamps.clone(),
                    codes: cov.assignment().iter().map(|a| a.centroid().map(|j| j as u32)).collect(),
                    outliers: c.outlier_values.chunks_exact(dim).map(<[f64]>::to_vec).collect(),
                },
            })
        }
    };
    let mut text = text.map_err(|e| FormatError::Invalid(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses the JSON document, rejecting unknown or duplicate keys and
/// verifying the embedded checksum.
pub fn decode_text(text: &str) -> Result<Artifact, FormatError> {
    let header: Header = serde_json::from_str(text).map_err(parse_error)?;
    if header.format != "TSQC" {
        return Err(FormatError::BadMagic);
    }
    if header.version != FORMAT_VERSION as u64 {
        return Err(FormatError::UnsupportedVersion(header.version));
    }
    let kind = ArtifactKind::from_name(&header.kind)?;
    let (crc32, artifact) = match kind {
        ArtifactKind::QuantileA => {
            let doc: Document<QuantileDoc> = serde_json::from_str(text).map_err(parse_error)?;
            let a = QuantileArtifact {
                codebook: Codebook::new(doc.payload.codebook)?,
                series: doc.payload.series.into_series()?,
            };
            check_quantile(&a)?;
            (doc.crc32, Artifact::QuantileA(a))
        }
        ArtifactKind::BandedB => {
            let doc: Document<BandedDoc> = serde_json::from_str(text).map_err(parse_error)?;
            let p = doc.payload;
            let b = BandedArtifact {
                band: p.band,
                statistic: p.statistic,
                slice_stats: p.slice_stats,
                exact_count: p.exact_count,
                series: p.series.into_series()?,
            };
            check_banded(&b)?;
            (doc.crc32, Artifact::BandedB(b))
        }
        ArtifactKind::CoverageC => {
            let doc: Document<CoverageDoc> = serde_json::from_str(text).map_err(parse_error)?;
            let p = doc.payload;
            let dim = p.dim as usize;
            if p.centroids.iter().chain(&p.outliers).any(|c| c.len() != dim) {
                return Err(FormatError::Invalid("vector of the wrong dimension".into()));
            }
            let assignment =
                p.codes.iter().map(|c| c.map_or(Assignment::Outlier, |j| Assignment::Centroid(j as usize))).collect();
            let coverage = Coverage::from_parts(dim, p.centroids.concat(), assignment, p.delta)?;
            let c = CoverageArtifact { timestamps: p.timestamps, coverage, outlier_values: p.outliers.concat() };
            c.validate()?;
            (doc.crc32, Artifact::CoverageC(c))
        }
    };
    let computed = binary_crc(&artifact)?;
    if computed != crc32 {
        return Err(FormatError::Checksum { stored: crc32, computed });
    }
    Ok(artifact)
}

/// Decodes either form, sniffing the binary magic.
pub fn decode_any(bytes: &[u8]) -> Result<Artifact, FormatError> {
    if bytes.starts_with(&MAGIC) {
        return decode_binary(bytes);
    }
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Parse {
        line: 1,
        column: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    decode_text(text)
}
