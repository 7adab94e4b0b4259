//! Empirical kernel mean embedding statistics.
//!
//! All quantities are V-statistics (diagonal terms included), which is what
//! makes `MMD^2 = |mu_x|^2 + |mu_y|^2 - 2 |mu_x| |mu_y| cos(angle)` an exact
//! triangle identity. [`mmd_sq_u`] is the diagonal-free companion and is only
//! reported, never drawn.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{check_compatible, Kernel, KernelConfig, KernelFamily};
use crate::population::Population;

/// Floating-point slack below zero that is silently clamped for MMD^2.
pub const MMD_CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingStats {
    pub label: String,
    pub sq_norm: f64,
    pub ref_sq_norm: f64,
    pub cross_inner: f64,
    pub mmd_sq: f64,
    pub cos_angle: f64,
    pub info_potential: f64,
    pub entropy: f64,
    pub sigma_used: f64,
}

/// Mean of `k(x_i, y_j)` over all pairs, summed row by row in a single accumulator.
fn kernel_mean(kernel: &Kernel, x: &Population, y: &Population) -> f64 {
    let mut acc = 0.0;
    for xi in x.samples() {
        for yj in y.samples() {
            acc += kernel.eval(xi, yj);
        }
    }
    acc / (x.len() as f64 * y.len() as f64)
}

/// Mean of `k(x_i, x_j)` over `i != j`.
fn kernel_mean_off_diagonal(kernel: &Kernel, x: &Population) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for (i, xi) in x.samples().enumerate() {
        for (j, xj) in x.samples().enumerate() {
            if i != j {
                acc += kernel.eval(xi, xj);
            }
        }
    }
    acc / (n as f64 * (n - 1) as f64)
}

fn data_order(x: &Population, y: &Population) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| {
        x.as_flat()
            .iter()
            .zip(y.as_flat())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Cross term summed in an order that does not depend on argument order,
/// so that MMD^2 is exactly symmetric.
fn symmetric_cross(kernel: &Kernel, x: &Population, y: &Population) -> f64 {
    match data_order(x, y) {
        Ordering::Greater => kernel_mean(kernel, y, x),
        _ => kernel_mean(kernel, x, y),
    }
}

fn combine_mmd(sq_x: f64, sq_y: f64, cross: f64) -> f64 {
    sq_x + sq_y - 2.0 * cross
}

fn clamp_mmd(raw: f64) -> Result<f64> {
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= -MMD_CLAMP_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::Invariant(format!(
            "V-statistic MMD^2 is negative: {raw:e}"
        )))
    }
}

fn non_empty(x: &Population) -> Result<()> {
    if x.is_empty() {
        Err(Error::EmptyPopulation(x.label().to_string()))
    } else {
        Ok(())
    }
}

/// `|mu_x|^2 = (1/N^2) sum_ij k(x_i, x_j)`.
pub fn sq_embedding_norm(x: &Population, config: &KernelConfig) -> Result<f64> {
    non_empty(x)?;
    let kernel = config.resolve(&[x])?;
    Ok(sq_embedding_norm_with(x, &kernel))
}

pub fn sq_embedding_norm_with(x: &Population, kernel: &Kernel) -> f64 {
    kernel_mean(kernel, x, x)
}

/// `<mu_x, mu_y> = (1/(N_x N_y)) sum_ij k(x_i, y_j)`.
pub fn cross_inner(x: &Population, y: &Population, config: &KernelConfig) -> Result<f64> {
    non_empty(x)?;
    non_empty(y)?;
    check_compatible(x, y)?;
    let kernel = config.resolve(&[x, y])?;
    Ok(cross_inner_with(x, y, &kernel))
}

pub fn cross_inner_with(x: &Population, y: &Population, kernel: &Kernel) -> f64 {
    kernel_mean(kernel, x, y)
}

/// Biased (V-statistic) MMD^2 between the empirical embeddings.
pub fn mmd_sq_v(x: &Population, y: &Population, config: &KernelConfig) -> Result<f64> {
    check_compatible(x, y)?;
    let kernel = config.resolve(&[x, y])?;
    mmd_sq_v_with(x, y, &kernel)
}

pub fn mmd_sq_v_with(x: &Population, y: &Population, kernel: &Kernel) -> Result<f64> {
    clamp_mmd(mmd_sq_v_unclamped(x, y, kernel)?)
}

/// V-statistic MMD^2 before the near-zero clamp.
pub fn mmd_sq_v_unclamped(x: &Population, y: &Population, kernel: &Kernel) -> Result<f64> {
    non_empty(x)?;
    non_empty(y)?;
    check_compatible(x, y)?;
    Ok(combine_mmd(
        kernel_mean(kernel, x, x),
        kernel_mean(kernel, y, y),
        symmetric_cross(kernel, x, y),
    ))
}

/// Unbiased (U-statistic) MMD^2. May be negative.
pub fn mmd_sq_u(x: &Population, y: &Population, config: &KernelConfig) -> Result<f64> {
    check_compatible(x, y)?;
    let kernel = config.resolve(&[x, y])?;
    mmd_sq_u_with(x, y, &kernel)
}

pub fn mmd_sq_u_with(x: &Population, y: &Population, kernel: &Kernel) -> Result<f64> {
    check_compatible(x, y)?;
    for p in [x, y] {
        if p.len() < 2 {
            return Err(Error::InsufficientSamples(format!(
                "unbiased MMD needs at least 2 samples, `{}` has {}",
                p.label(),
                p.len()
            )));
        }
    }
    Ok(combine_mmd(
        kernel_mean_off_diagonal(kernel, x),
        kernel_mean_off_diagonal(kernel, y),
        symmetric_cross(kernel, x, y),
    ))
}

/// Quadratic information potential `(1/N^2) sum_ij G_sigma(x_i, x_j)`.
pub fn info_potential(x: &Population, sigma: f64) -> Result<f64> {
    non_empty(x)?;
    info_potential_with(x, &Kernel::gaussian(sigma)?)
}

pub fn info_potential_with(x: &Population, kernel: &Kernel) -> Result<f64> {
    match kernel.family() {
        KernelFamily::Gaussian => Ok(kernel_mean(kernel, x, x)),
    }
}

/// Quadratic Renyi entropy `-log V`.
pub fn quadratic_entropy(info_potential: f64) -> Result<f64> {
    if !(info_potential > 0.0 && info_potential <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "information potential must lie in (0, 1], got {info_potential}"
        )));
    }
    Ok((-libm::log(info_potential)).max(0.0))
}

/// All embedding statistics of `pop` against `reference`; a heuristic
/// bandwidth is resolved once from the pooled pair.
pub fn embedding_stats(
    pop: &Population,
    reference: &Population,
    config: &KernelConfig,
) -> Result<EmbeddingStats> {
    check_compatible(pop, reference)?;
    non_empty(pop)?;
    non_empty(reference)?;
    let kernel = config.resolve(&[pop, reference])?;
    embedding_stats_with(pop, reference, &kernel)
}

pub fn embedding_stats_with(
    pop: &Population,
    reference: &Population,
    kernel: &Kernel,
) -> Result<EmbeddingStats> {
    let ref_sq_norm = sq_embedding_norm_with(reference, kernel);
    embedding_stats_with_ref_norm(pop, reference, ref_sq_norm, kernel)
}

/// As [`embedding_stats_with`], reusing an already computed `|mu_ref|^2`.
pub(crate) fn embedding_stats_with_ref_norm(
    pop: &Population,
    reference: &Population,
    ref_sq_norm: f64,
    kernel: &Kernel,
) -> Result<EmbeddingStats> {
    non_empty(pop)?;
    non_empty(reference)?;
    check_compatible(pop, reference)?;
    let sq_norm = sq_embedding_norm_with(pop, kernel);
    let cross = symmetric_cross(kernel, pop, reference);
    let mmd_sq = clamp_mmd(combine_mmd(sq_norm, ref_sq_norm, cross))?;
    let cos_angle = cross / (sq_norm * ref_sq_norm).sqrt();
    let info = info_potential_with(pop, kernel)?;
    Ok(EmbeddingStats {
        label: pop.label().to_string(),
        sq_norm,
        ref_sq_norm,
        cross_inner: cross,
        mmd_sq,
        cos_angle,
        info_potential: info,
        entropy: quadratic_entropy(info)?,
        sigma_used: kernel.sigma(),
    })
}
