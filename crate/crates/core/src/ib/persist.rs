//! On-disk form of an [`IBCurve`]: a JSON curve file with metadata and
//! per-point records, and a JSON sidecar holding the encoder matrices that
//! points reference by id.
//!
//! Both files are written with a fixed field order and fixed number
//! formatting, so the same curve always produces the same bytes.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::anneal::{AnnealConfig, IBCurve};
use super::encoder::{Encoder, Prior};
use super::objective::IBPoint;
use crate::error::{Error, Result};
use crate::wcs::{de_matrix, ser_matrix};

pub const CURVE_FORMAT: &str = "ibcolor-curve";
pub const ENCODERS_FORMAT: &str = "ibcolor-encoders";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogUnits {
    /// Unit of every reported information quantity.
    pub information: String,
    /// Unit of the divergence inside the update exponent.
    pub update_exponent: String,
}

impl Default for LogUnits {
    fn default() -> Self {
        Self {
            information: "bits".into(),
            update_exponent: "nats".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub format: String,
    pub version: u32,
    pub code_version: String,
    pub log_units: LogUnits,
    pub sigma_sq: Option<f64>,
    pub meaning_digest: String,
    /// Digest of the run configuration that produced the curve.
    pub config_digest: String,
    pub seed: u64,
    pub anneal: AnnealConfig,
    /// File name of the encoder sidecar, relative to the curve file.
    pub encoders_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: usize,
    #[serde(flatten)]
    pub point: IBPoint,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub meta: CurveMeta,
    pub source: Vec<f64>,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderRecord {
    pub id: usize,
    /// Curve points that use this encoder.
    pub points: Vec<usize>,
    #[serde(serialize_with = "ser_matrix", deserialize_with = "de_matrix")]
    pub matrix: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderFile {
    pub format: String,
    pub version: u32,
    pub config_digest: String,
    pub encoders: Vec<EncoderRecord>,
}

impl CurveFile {
    pub fn from_curve(curve: &IBCurve, sigma_sq: Option<f64>, config_digest: &str, encoders_file: &str) -> Self {
        Self {
            meta: CurveMeta {
                format: CURVE_FORMAT.into(),
                version: FORMAT_VERSION,
                code_version: env!("CARGO_PKG_VERSION").into(),
                log_units: LogUnits::default(),
                sigma_sq,
                meaning_digest: curve.meaning_digest.clone(),
                config_digest: config_digest.into(),
                seed: curve.config.seed,
                anneal: curve.config.clone(),
                encoders_file: encoders_file.into(),
            },
            source: curve.source.probs().to_vec(),
            points: curve
                .points
                .iter()
                .zip(&curve.converged)
                .enumerate()
                .map(|(id, (p, &c))| PointRecord {
                    id,
                    point: p.clone(),
                    converged: c,
                })
                .collect(),
        }
    }
}

impl EncoderFile {
    pub fn from_curve(curve: &IBCurve, config_digest: &str) -> Self {
        let encoders = curve
            .encoders
            .iter()
            .enumerate()
            .map(|(id, e)| EncoderRecord {
                id,
                points: (0..curve.points.len())
                    .filter(|&p| curve.points[p].encoder_ref == Some(id))
                    .collect(),
                matrix: e.matrix().clone(),
            })
            .collect();
        Self {
            format: ENCODERS_FORMAT.into(),
            version: FORMAT_VERSION,
            config_digest: config_digest.into(),
            encoders,
        }
    }
}

/// Serialized (curve, sidecar) text pair.
pub fn curve_to_json(
    curve: &IBCurve,
    sigma_sq: Option<f64>,
    config_digest: &str,
    encoders_file: &str,
) -> Result<(String, String)> {
    let c = serde_json::to_string_pretty(&CurveFile::from_curve(curve, sigma_sq, config_digest, encoders_file))?;
    let e = serde_json::to_string_pretty(&EncoderFile::from_curve(curve, config_digest))?;
    Ok((c + "\n", e + "\n"))
}

pub fn curve_from_json(curve_text: &str, encoders_text: &str) -> Result<IBCurve> {
    let file: CurveFile = serde_json::from_str(curve_text)?;
    let enc: EncoderFile = serde_json::from_str(encoders_text)?;
    if file.meta.format != CURVE_FORMAT || enc.format != ENCODERS_FORMAT {
        return Err(Error::InvalidArgument("not an ibcolor curve".into()));
    }
    if file.meta.version != FORMAT_VERSION || enc.version != FORMAT_VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported curve format version {}",
            file.meta.version
        )));
    }
    let source = Prior::new(file.source)?;
    let mut encoders = Vec::with_capacity(enc.encoders.len());
    for (i, r) in enc.encoders.into_iter().enumerate() {
        if r.id != i || r.matrix.nrows() != source.len() {
            return Err(Error::InvalidArgument(format!("bad encoder record {}", r.id)));
        }
        encoders.push(Encoder::from_parts_unchecked(r.matrix, &source));
    }
    let mut points = Vec::with_capacity(file.points.len());
    let mut converged = Vec::with_capacity(file.points.len());
    for r in file.points {
        match r.point.encoder_ref {
            Some(e) if e < encoders.len() => {}
            _ => return Err(Error::InvalidArgument(format!("point {} has no stored encoder", r.id))),
        }
        points.push(r.point);
        converged.push(r.converged);
    }
    Ok(IBCurve {
        points,
        converged,
        encoders,
        source,
        meaning_digest: file.meta.meaning_digest,
        config: file.meta.anneal,
    })
}

/// Write `curve` to `path` and its encoders next to it. Returns the
/// sidecar path.
pub fn save_curve(
    curve: &IBCurve,
    path: &Path,
    sigma_sq: Option<f64>,
    config_digest: &str,
) -> Result<std::path::PathBuf> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    let side_name = format!("{stem}.encoders.json");
    let side = path.with_file_name(&side_name);
    let (c, e) = curve_to_json(curve, sigma_sq, config_digest, &side_name)?;
    std::fs::write(path, c)?;
    std::fs::write(&side, e)?;
    Ok(side)
}

pub fn load_curve(path: &Path) -> Result<IBCurve> {
    let text = std::fs::read_to_string(path)?;
    let file: CurveFile = serde_json::from_str(&text)?;
    let side = path.with_file_name(&file.meta.encoders_file);
    let enc = std::fs::read_to_string(side)?;
    curve_from_json(&text, &enc)
}

/// Metadata only, without reading the sidecar.
pub fn read_curve_meta(path: &Path) -> Result<CurveMeta> {
    let text = std::fs::read_to_string(path)?;
    let file: CurveFile = serde_json::from_str(&text)?;
    Ok(file.meta)
}
