//! Image loading and the JSON documents written by the command line.
//!
//! Numbers are written as integers when they are integral and with 17
//! significant digits otherwise, so every document parses back to exactly
//! the values it was written from. Infinite deaths are the strings `"inf"`
//! and `"-inf"`.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{self, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{MultiChannelImage, PixelCoord, ValueGrid};
use crate::multipers::SlicedDiagrams;
use crate::persistence::{HomologyDim, PersistenceDiagram, PersistencePair};
use crate::vectorize::{Aggregator, MPVectorization};

pub const SCHEMA_VERSION: &str = "1";

/// Reads a PGM/PNM, PNG or CSV file by extension. Gray images have one
/// channel and color images three; alpha is dropped.
pub fn load_image(path: &Path) -> Result<MultiChannelImage> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "csv" | "txt" => Ok(MultiChannelImage::new(vec![load_csv(path)?])?),
        "pgm" | "pnm" | "ppm" | "png" => load_raster(path),
        other => Err(Error::Format(format!("unsupported file extension {other:?}"))),
    }
}

fn load_raster(path: &Path) -> Result<MultiChannelImage> {
    use image::DynamicImage;
    let img = image::ImageReader::open(path)?
        .with_guessed_format()?
        .decode()
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let plane = |values: Vec<f64>| ValueGrid::new(h, w, values);
    let split = |raw: &[u8], stride: usize, channels: usize| -> Result<Vec<ValueGrid>> {
        (0..channels)
            .map(|c| plane(raw.iter().skip(c).step_by(stride).map(|&v| f64::from(v)).collect()))
            .collect()
    };
    // the decoder rescales PNM samples to the full 8/16-bit range; undo that
    // so values keep the units of the file
    let maxval = pnm_maxval(path)?;
    let channels = match &img {
        DynamicImage::ImageLuma8(b) => split(b.as_raw(), 1, 1)?,
        DynamicImage::ImageLumaA8(b) => split(b.as_raw(), 2, 1)?,
        DynamicImage::ImageRgb8(b) => split(b.as_raw(), 3, 3)?,
        DynamicImage::ImageRgba8(b) => split(b.as_raw(), 4, 3)?,
        DynamicImage::ImageLuma16(b) => vec![plane(b.as_raw().iter().map(|&v| f64::from(v)).collect())?],
        other => {
            return Err(Error::Format(format!(
                "{}: unsupported pixel layout {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    let channels = match (maxval, img.color().bytes_per_pixel() / img.color().channel_count()) {
        (Some(m), bytes) if m != if bytes == 2 { 65535 } else { 255 } => {
            let full = if bytes == 2 { 65535.0 } else { 255.0 };
            channels
                .iter()
                .map(|c| c.map(|v| (v * f64::from(m) / full).round()))
                .collect::<Result<Vec<_>>>()?
        }
        _ => channels,
    };
    MultiChannelImage::new(channels)
}

/// Declared maximum sample value of a P2/P3/P5/P6 file, `None` for other
/// formats.
fn pnm_maxval(path: &Path) -> Result<Option<u32>> {
    use std::io::Read;
    let mut head = Vec::with_capacity(512);
    std::fs::File::open(path)?.take(512).read_to_end(&mut head)?;
    if head.len() < 2 || head[0] != b'P' || !matches!(head[1], b'2' | b'3' | b'5' | b'6') {
        return Ok(None);
    }
    let mut tokens = Vec::new();
    let mut i = 2;
    while tokens.len() < 3 && i < head.len() {
        match head[i] {
            b'#' => {
                while i < head.len() && head[i] != b'\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < head.len() && head[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(Error::Format(format!("{}: malformed header", path.display())));
                }
                tokens.push(std::str::from_utf8(&head[start..i]).expect("digits").parse::<u32>());
            }
        }
    }
    match tokens.get(2) {
        Some(Ok(m)) if *m > 0 => Ok(Some(*m)),
        _ => Err(Error::Format(format!("{}: malformed header", path.display()))),
    }
}

/// Comma-separated numbers, one image row per line, no header.
pub fn load_csv(path: &Path) -> Result<ValueGrid> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Format(format!("{}: not a number: {f:?}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    ValueGrid::from_rows(&rows).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Writes an 8-bit binary PGM (values are rounded and clamped to 0..=255).
pub fn write_pgm(path: &Path, grid: &ValueGrid) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    bytes.extend(grid.values().iter().map(|v| v.round().clamp(0.0, 255.0) as u8));
    std::fs::write(path, bytes)?;
    Ok(())
}

/// A real number in a document: finite, `inf` or `-inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

/// JSON text of a finite number: integer form when integral, otherwise 17
/// significant digits.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v == f64::INFINITY {
            return serializer.serialize_str("inf");
        }
        if v == f64::NEG_INFINITY {
            return serializer.serialize_str("-inf");
        }
        if v.is_nan() {
            return Err(ser::Error::custom("NaN in document"));
        }
        serde_json::value::RawValue::from_string(format_number(v))
            .map_err(ser::Error::custom)?
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    other => Err(E::custom(format!("unexpected string {other:?}"))),
                }
            }
        }
        deserializer.deserialize_any(NumVisitor)
    }
}

fn nums(values: &[f64]) -> Vec<Num> {
    values.iter().map(|&v| Num(v)).collect()
}

fn plain(values: &[Num]) -> Vec<f64> {
    values.iter().map(|n| n.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCoords {
    pub birth: [usize; 2],
    pub death: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceCoords {
    pub dim0: Vec<PairCoords>,
    pub dim1: Vec<PairCoords>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceDocument {
    pub slice_index: usize,
    pub dim0: Vec<[Num; 2]>,
    pub dim1: Vec<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<SliceCoords>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagramMetadata {
    /// Number of slices.
    #[serde(rename = "M")]
    pub m: usize,
    /// Number of filtration levels, when the diagrams come from a grid of levels.
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub thresholds: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub superlevel: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramDocument {
    pub schema_version: String,
    pub metadata: DiagramMetadata,
    pub slices: Vec<SliceDocument>,
}

fn pair_coords(p: &PersistencePair) -> PairCoords {
    PairCoords {
        birth: [p.birth_coord.row, p.birth_coord.col],
        death: p.death_coord.map(|c| [c.row, c.col]),
    }
}

impl DiagramDocument {
    pub fn from_diagrams(diagrams: &[PersistenceDiagram], metadata: DiagramMetadata, with_coords: bool) -> Self {
        let slices = diagrams
            .iter()
            .enumerate()
            .map(|(s, pd)| SliceDocument {
                slice_index: s,
                dim0: pd.pairs_dim0.iter().map(|p| [Num(p.birth), Num(p.death)]).collect(),
                dim1: pd.pairs_dim1.iter().map(|p| [Num(p.birth), Num(p.death)]).collect(),
                coords: with_coords.then(|| SliceCoords {
                    dim0: pd.pairs_dim0.iter().map(pair_coords).collect(),
                    dim1: pd.pairs_dim1.iter().map(pair_coords).collect(),
                }),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION.into(),
            metadata: DiagramMetadata {
                m: diagrams.len(),
                ..metadata
            },
            slices,
        }
    }

    pub fn from_sliced(sliced: &SlicedDiagrams, with_coords: bool) -> Self {
        Self::from_diagrams(
            &sliced.slices,
            DiagramMetadata {
                m: sliced.num_slices(),
                n: Some(sliced.levels.len()),
                thresholds: Some(nums(&sliced.levels)),
                superlevel: false,
            },
            with_coords,
        )
    }

    /// Diagrams of every slice. Coordinates default to the origin when absent.
    pub fn to_diagrams(&self) -> Vec<PersistenceDiagram> {
        self.slices
            .iter()
            .map(|s| {
                let convert = |dim: HomologyDim, bars: &[[Num; 2]], coords: Option<&Vec<PairCoords>>| {
                    bars.iter()
                        .enumerate()
                        .map(|(i, [b, d])| {
                            let c = coords.and_then(|c| c.get(i));
                            PersistencePair {
                                dim,
                                birth: b.0,
                                death: d.0,
                                birth_coord: c
                                    .map_or(PixelCoord::new(0, 0), |c| PixelCoord::new(c.birth[0], c.birth[1])),
                                death_coord: c.and_then(|c| c.death.map(|d| PixelCoord::new(d[0], d[1]))),
                                slice_index: s.slice_index,
                            }
                        })
                        .collect()
                };
                PersistenceDiagram {
                    pairs_dim0: convert(HomologyDim::Zero, &s.dim0, s.coords.as_ref().map(|c| &c.dim0)),
                    pairs_dim1: convert(HomologyDim::One, &s.dim1, s.coords.as_ref().map(|c| &c.dim1)),
                }
            })
            .collect()
    }

    pub fn to_sliced(&self) -> SlicedDiagrams {
        SlicedDiagrams {
            slices: self.to_diagrams(),
            levels: self.metadata.thresholds.as_deref().map(plain).unwrap_or_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_version(&self.schema_version)?;
        if self.metadata.m != self.slices.len() {
            return Err(Error::Format(format!(
                "metadata says {} slices, found {}",
                self.metadata.m,
                self.slices.len()
            )));
        }
        Ok(())
    }
}

fn check_version(v: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Format(format!("unsupported schema version {v:?}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateKind {
    Flatten,
    Mean,
}

impl From<Aggregator> for AggregateKind {
    fn from(a: Aggregator) -> Self {
        match a {
            Aggregator::Flatten => Self::Flatten,
            Aggregator::MeanOverSlices => Self::Mean,
        }
    }
}

impl From<AggregateKind> for Aggregator {
    fn from(a: AggregateKind) -> Self {
        match a {
            AggregateKind::Flatten => Self::Flatten,
            AggregateKind::Mean => Self::MeanOverSlices,
        }
    }
}

/// `M x 2 x q` vectorization with its sample times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorizationDocument {
    pub schema_version: String,
    pub kind: String,
    pub shape: [usize; 3],
    pub samples: Vec<Num>,
    pub values: Vec<Num>,
    pub aggregate_kind: AggregateKind,
    pub aggregate: Vec<Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub empty_thresholds: Vec<usize>,
}

impl VectorizationDocument {
    pub fn new(kind: &str, samples: &[f64], v: &MPVectorization) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            kind: kind.into(),
            shape: v.shape,
            samples: nums(samples),
            values: nums(&v.values),
            aggregate_kind: v.aggregator.into(),
            aggregate: nums(&v.aggregate),
            empty_thresholds: Vec::new(),
        }
    }

    pub fn to_vectorization(&self) -> Result<MPVectorization> {
        check_version(&self.schema_version)?;
        let [m, d, q] = self.shape;
        if self.values.len() != m * d * q {
            return Err(Error::Format(format!(
                "shape {:?} but {} values",
                self.shape,
                self.values.len()
            )));
        }
        Ok(MPVectorization {
            shape: self.shape,
            values: plain(&self.values),
            aggregator: self.aggregate_kind.into(),
            aggregate: plain(&self.aggregate),
        })
    }
}

/// Betti numbers over a three-parameter threshold grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiTensorDocument {
    pub schema_version: String,
    pub kind: String,
    pub shape: Vec<usize>,
    pub thresholds: Vec<Vec<Num>>,
    pub dim0: Vec<usize>,
    pub dim1: Vec<usize>,
}

impl BettiTensorDocument {
    pub fn new(shape: Vec<usize>, thresholds: &[Vec<f64>], dim0: Vec<usize>, dim1: Vec<usize>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            kind: "betti_tensor".into(),
            shape,
            thresholds: thresholds.iter().map(|t| nums(t)).collect(),
            dim0,
            dim1,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
