use crate::error::{Error, Result};

/// A labeled sample set. Samples are stored row-major, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    label: String,
    dim: usize,
    data: Vec<f64>,
}

impl Population {
    /// Builds a population from row-major data with `dim` values per sample.
    pub fn new(label: impl Into<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "population `{label}` must have dimension >= 1"
            )));
        }
        if data.is_empty() {
            return Err(Error::EmptyPopulation(label));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "population `{label}`: {} values do not split into rows of {dim}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{v} in population `{label}`")));
        }
        Ok(Self { label, dim, data })
    }

    /// One-dimensional population, one sample per value.
    pub fn from_scalars(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(label, 1, values)
    }

    pub fn from_rows(label: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let label = label.into();
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::EmptyPopulation(label.clone()))?;
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(label, dim, data)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false: construction rejects empty populations.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn samples(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major flattening used by the paired classic statistics.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Per-dimension affine map `(v - center) / scale` using the given statistics.
    pub(crate) fn standardized_by(&self, center: &[f64], scale: &[f64]) -> Self {
        let data = self
            .samples()
            .flat_map(|row| {
                row.iter()
                    .zip(center.iter().zip(scale))
                    .map(|(v, (c, s))| (v - c) / s)
            })
            .collect();
        Self {
            label: self.label.clone(),
            dim: self.dim,
            data,
        }
    }

    /// Per-dimension mean and population (divide-by-N) standard deviation.
    pub fn column_moments(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.len() as f64;
        let mut mean = vec![0.0; self.dim];
        for row in self.samples() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; self.dim];
        for row in self.samples() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        (mean, std)
    }
}

/// Standardizes every population with the reference's per-dimension mean and
/// standard deviation, preserving relative scale between populations.
pub fn standardize_to_reference(
    populations: &[Population],
    reference: &Population,
) -> Result<(Vec<Population>, Population)> {
    let (center, scale) = reference.column_moments();
    if scale.contains(&0.0) {
        return Err(Error::ZeroVariance(reference.label().to_string()));
    }
    for p in populations {
        if p.dim() != reference.dim() {
            return Err(Error::DimensionMismatch {
                expected: reference.dim(),
                found: p.dim(),
            });
        }
    }
    Ok((
        populations
            .iter()
            .map(|p| p.standardized_by(&center, &scale))
            .collect(),
        reference.standardized_by(&center, &scale),
    ))
}
