//! On-disk formats: multi-population CSV and the versioned coordinates JSON.
//!
//! CSV: header `label,dim0[,dim1,...]`, one sample per row, populations keyed
//! by the label column in order of first appearance.
//!
//! JSON (version 1):
//! `{version, mode, sigma, taylor?: {reference, points, radial_max}, ktd?: {...}}`
//! where each point is `{label, radius, angle_rad, similarity, chord_to_ref, extra}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramMode, DiagramModel, DiagramPoint};
use crate::error::{Error, Result};
use crate::population::Population;

pub const JSON_VERSION: u32 = 1;

pub fn read_populations_csv<R: Read>(reader: R) -> Result<Vec<Population>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("line 1: {e}")))?
        .clone();
    let dim = header.len().saturating_sub(1);
    if header.get(0) != Some("label") || dim == 0 {
        return Err(Error::Parse(
            "line 1: header must be `label,dim0[,dim1,...]`".into(),
        ));
    }
    for (i, name) in header.iter().skip(1).enumerate() {
        if name != format!("dim{i}") {
            return Err(Error::Parse(format!(
                "line 1: column {} must be named `dim{i}`, found `{name}`",
                i + 1
            )));
        }
    }

    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim + 1 {
            return Err(Error::Parse(format!(
                "line {line}: expected {} fields, found {}",
                dim + 1,
                record.len()
            )));
        }
        let label = &record[0];
        if label.is_empty() {
            return Err(Error::Parse(format!("line {line}: empty label")));
        }
        let idx = match groups.iter().position(|(l, _)| l == label) {
            Some(i) => i,
            None => {
                groups.push((label.to_string(), Vec::new()));
                groups.len() - 1
            }
        };
        for (j, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "line {line}: dim{j} value `{field}` is not a number"
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "line {line}: dim{j} value `{field}` is not finite"
                )));
            }
            groups[idx].1.push(v);
        }
    }
    if groups.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    groups
        .into_iter()
        .map(|(label, data)| Population::new(label, dim, data))
        .collect()
}

pub fn write_populations_csv<'a, W: Write>(
    writer: W,
    populations: impl IntoIterator<Item = &'a Population>,
) -> Result<()> {
    let populations: Vec<&Population> = populations.into_iter().collect();
    let dim = populations.first().map_or(1, |p| p.dim());
    if let Some(p) = populations.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        });
    }
    let io = |e: csv::Error| Error::Parse(format!("csv write: {e}"));
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["label".to_string()];
    header.extend((0..dim).map(|i| format!("dim{i}")));
    w.write_record(&header).map_err(io)?;
    let mut row = Vec::with_capacity(dim + 1);
    for p in populations {
        for sample in p.samples() {
            row.clear();
            row.push(p.label().to_string());
            row.extend(sample.iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush()
        .map_err(|e| Error::Parse(format!("csv write: {e}")))?;
    Ok(())
}

/// Which diagrams a document carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Taylor,
    Ktd,
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> &'static [DiagramMode] {
        match self {
            ModeSelection::Taylor => &[DiagramMode::Taylor],
            ModeSelection::Ktd => &[DiagramMode::KernelizedTaylor],
            ModeSelection::Both => &[DiagramMode::Taylor, DiagramMode::KernelizedTaylor],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSection {
    pub reference: DiagramPoint,
    pub points: Vec<DiagramPoint>,
    pub radial_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinatesDocument {
    pub version: u32,
    pub mode: ModeSelection,
    /// Kernel bandwidth shared by every kernelized point; null without a kernel section.
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taylor: Option<DiagramSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ktd: Option<DiagramSection>,
}

impl CoordinatesDocument {
    /// Assembles a document from built models; at most one model per mode.
    pub fn from_models(models: &[DiagramModel]) -> Result<Self> {
        let mut doc = Self {
            version: JSON_VERSION,
            mode: ModeSelection::Both,
            sigma: None,
            taylor: None,
            ktd: None,
        };
        for m in models {
            let section = DiagramSection {
                reference: m.reference.clone(),
                points: m.points.clone(),
                radial_max: m.radial_max,
            };
            let slot = match m.mode {
                DiagramMode::Taylor => &mut doc.taylor,
                DiagramMode::KernelizedTaylor => {
                    doc.sigma = m.kernel_sigma;
                    &mut doc.ktd
                }
            };
            if slot.replace(section).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate `{}` diagram",
                    m.mode.as_str()
                )));
            }
        }
        doc.mode = match (&doc.taylor, &doc.ktd) {
            (Some(_), Some(_)) => ModeSelection::Both,
            (Some(_), None) => ModeSelection::Taylor,
            (None, Some(_)) => ModeSelection::Ktd,
            (None, None) => return Err(Error::InvalidParameter("no diagrams to serialize".into())),
        };
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Invariant(format!("json encoding: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    /// Parses and validates a document, reporting the JSON path of any problem.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut doc: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        for section in [&mut doc.taylor, &mut doc.ktd].into_iter().flatten() {
            section.reference.is_reference = true;
        }
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<()> {
        let schema = |path: &str, message: String| Error::Schema {
            path: path.to_string(),
            message,
        };
        if self.version != JSON_VERSION {
            return Err(schema(
                "version",
                format!("unsupported version {}", self.version),
            ));
        }
        for &mode in self.mode.modes() {
            if self.section(mode).is_none() {
                return Err(schema(
                    mode.as_str(),
                    format!(
                        "mode `{}` requires a `{}` section",
                        self.mode_name(),
                        mode.as_str()
                    ),
                ));
            }
        }
        if self.ktd.is_some() && !self.sigma.is_some_and(|s| s.is_finite() && s > 0.0) {
            return Err(schema(
                "sigma",
                "kernelized section requires a positive sigma".into(),
            ));
        }
        for mode in [DiagramMode::Taylor, DiagramMode::KernelizedTaylor] {
            if self.section(mode).is_some() {
                self.model(mode).map_err(|e| match e {
                    Error::Invariant(message) => schema(mode.as_str(), message),
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            ModeSelection::Taylor => "taylor",
            ModeSelection::Ktd => "ktd",
            ModeSelection::Both => "both",
        }
    }

    fn section(&self, mode: DiagramMode) -> Option<&DiagramSection> {
        match mode {
            DiagramMode::Taylor => self.taylor.as_ref(),
            DiagramMode::KernelizedTaylor => self.ktd.as_ref(),
        }
    }

    /// Rebuilds the diagram model for one mode.
    pub fn model(&self, mode: DiagramMode) -> Result<DiagramModel> {
        let section = self.section(mode).ok_or_else(|| Error::Schema {
            path: mode.as_str().to_string(),
            message: format!("document has no `{}` section", mode.as_str()),
        })?;
        let mut reference = section.reference.clone();
        reference.is_reference = true;
        let model = DiagramModel {
            mode,
            reference,
            points: section.points.clone(),
            radial_max: section.radial_max,
            kernel_sigma: match mode {
                DiagramMode::Taylor => None,
                DiagramMode::KernelizedTaylor => self.sigma,
            },
        };
        model.validate()?;
        Ok(model)
    }
}
