//! Positive-definite kernels, Gram matrices and bandwidth selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::Population;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[default]
    Gaussian,
}

/// How the kernel width is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BandwidthSpec {
    Fixed(f64),
    /// `2 sigma^2` equals the median squared pairwise distance of the pooled sample.
    #[default]
    MedianHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub bandwidth: BandwidthSpec,
}

impl KernelConfig {
    pub fn gaussian(bandwidth: BandwidthSpec) -> Self {
        Self {
            family: KernelFamily::Gaussian,
            bandwidth,
        }
    }

    pub fn fixed(sigma: f64) -> Self {
        Self::gaussian(BandwidthSpec::Fixed(sigma))
    }

    pub fn median() -> Self {
        Self::gaussian(BandwidthSpec::MedianHeuristic)
    }

    /// Resolves the bandwidth against the pooled samples of `pool`.
    pub fn resolve(&self, pool: &[&Population]) -> Result<Kernel> {
        let sigma = resolve_bandwidth_pooled(pool, self.bandwidth)?;
        Kernel::new(self.family, sigma)
    }
}

/// A kernel with a concrete bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    sigma: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { family, sigma })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, sigma)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Evaluates the kernel; callers guarantee equal lengths and finite input.
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.family {
            KernelFamily::Gaussian => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-d2 / (2.0 * self.sigma * self.sigma))
            }
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBandwidth(sigma))
    }
}

/// `exp(-||x - y||^2 / (2 sigma^2))`.
pub fn gaussian_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::InvalidParameter(
            "kernel inputs must have dimension >= 1".into(),
        ));
    }
    check_sigma(sigma)?;
    if let Some(v) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("kernel input component {v}")));
    }
    Ok(Kernel::gaussian(sigma)?.eval(x, y))
}

/// Dense kernel matrix between two populations.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }
}

pub(crate) fn check_compatible(x: &Population, y: &Population) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// Entry `(i, j)` is `k(x_i, y_j)`. A median-heuristic bandwidth is resolved
/// from the pooled `x ∪ y` sample.
pub fn gram(x: &Population, y: &Population, config: &KernelConfig) -> Result<GramMatrix> {
    check_compatible(x, y)?;
    let kernel = config.resolve(&[x, y])?;
    Ok(gram_with(x, y, &kernel))
}

pub fn gram_with(x: &Population, y: &Population, kernel: &Kernel) -> GramMatrix {
    let entries = x
        .samples()
        .flat_map(|xi| y.samples().map(move |yj| kernel.eval(xi, yj)))
        .collect();
    GramMatrix {
        rows: x.len(),
        cols: y.len(),
        entries,
    }
}

pub fn resolve_bandwidth(x: &Population, y: &Population, spec: BandwidthSpec) -> Result<f64> {
    check_compatible(x, y)?;
    resolve_bandwidth_pooled(&[x, y], spec)
}

/// Resolves a bandwidth from any number of populations treated as one pool.
pub fn resolve_bandwidth_pooled(pool: &[&Population], spec: BandwidthSpec) -> Result<f64> {
    match spec {
        BandwidthSpec::Fixed(v) => {
            check_sigma(v)?;
            Ok(v)
        }
        BandwidthSpec::MedianHeuristic => {
            let Some(first) = pool.first() else {
                return Err(Error::InvalidParameter(
                    "empty pool for median heuristic".into(),
                ));
            };
            for p in pool {
                if p.dim() != first.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: first.dim(),
                        found: p.dim(),
                    });
                }
            }
            let points: Vec<&[f64]> = pool.iter().flat_map(|p| p.samples()).collect();
            let median = median_sq_distance(&points)?;
            if median <= 0.0 {
                return Err(Error::DegenerateBandwidth);
            }
            Ok((median / 2.0).sqrt())
        }
    }
}

/// Median over unordered pairs `i < j`; even counts average the two middle values.
fn median_sq_distance(points: &[&[f64]]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientSamples(
            "median heuristic needs at least 2 pooled samples".into(),
        ));
    }
    let mut d2 = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            d2.push(
                points[i]
                    .iter()
                    .zip(points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>(),
            );
        }
    }
    let m = d2.len();
    let mid = m / 2;
    let (lower, upper, _) = d2.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if m % 2 == 1 {
        Ok(upper)
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(0.5 * (below + upper))
    }
}
