//! Polar coordinates for classic and kernelized Taylor diagrams.
//!
//! Both variants place a population at `(radius, angle)` with
//! `angle = acos(similarity)`; the reference sits on the horizontal axis and
//! the chord between the two points is the centered RMSE (classic) or the
//! MMD (kernelized).

use serde::{Deserialize, Serialize};

use crate::classic_taylor::{classic_stats, ClassicStats};
use crate::error::{Error, Result};
use crate::kernel_embedding::{
    embedding_stats_with_ref_norm, info_potential_with, quadratic_entropy, sq_embedding_norm_with,
    EmbeddingStats,
};
use crate::kernels::KernelConfig;
use crate::population::{standardize_to_reference, Population};

/// Padding applied to the largest radius when sizing the frame.
pub const RADIAL_PADDING: f64 = 1.15;

/// Similarity excursions past +/-1 up to this size are treated as rounding.
pub const SIMILARITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagramMode {
    #[serde(rename = "taylor")]
    Taylor,
    #[serde(rename = "ktd")]
    KernelizedTaylor,
}

impl DiagramMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagramMode::Taylor => "taylor",
            DiagramMode::KernelizedTaylor => "ktd",
        }
    }
}

/// Auxiliary numbers carried alongside a point so every plotted value is auditable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointExtra {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_dev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centered_rmse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_inner: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mmd_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mmd_sq_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info_potential: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub label: String,
    pub radius: f64,
    #[serde(rename = "angle_rad")]
    pub angle: f64,
    pub similarity: f64,
    pub chord_to_ref: f64,
    #[serde(skip)]
    pub is_reference: bool,
    #[serde(default)]
    pub extra: PointExtra,
}

impl DiagramPoint {
    /// `(radius cos(angle), radius sin(angle))`, reference on the positive x axis.
    pub fn cartesian(&self) -> (f64, f64) {
        (
            self.radius * libm::cos(self.angle),
            self.radius * libm::sin(self.angle),
        )
    }

    /// Chord length recomputed from the polar coordinates by the law of cosines.
    pub fn law_of_cosines_chord(&self, ref_radius: f64) -> f64 {
        let c2 = self.radius * self.radius + ref_radius * ref_radius
            - 2.0 * self.radius * ref_radius * libm::cos(self.angle);
        c2.max(0.0).sqrt()
    }
}

/// `acos` of a similarity, clamping rounding-level excursions outside [-1, 1].
pub fn similarity_to_angle(similarity: f64) -> Result<f64> {
    if !similarity.is_finite() || similarity.abs() > 1.0 + SIMILARITY_SLACK {
        return Err(Error::Invariant(format!(
            "similarity {similarity} outside [-1, 1]"
        )));
    }
    Ok(libm::acos(similarity.clamp(-1.0, 1.0)))
}

fn check_chord(
    label: &str,
    radius: f64,
    ref_radius: f64,
    similarity: f64,
    chord: f64,
) -> Result<()> {
    let expected =
        radius * radius + ref_radius * ref_radius - 2.0 * radius * ref_radius * similarity;
    let scale = radius * radius + ref_radius * ref_radius;
    if (chord * chord - expected).abs() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Invariant(format!(
            "`{label}`: chord^2 {} disagrees with law of cosines {expected}",
            chord * chord
        )));
    }
    Ok(())
}

pub fn taylor_point(stats: &ClassicStats, ref_std: f64) -> Result<DiagramPoint> {
    if !(ref_std > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reference standard deviation must be positive, got {ref_std}"
        )));
    }
    let angle = similarity_to_angle(stats.corr_with_ref)?;
    check_chord(
        &stats.label,
        stats.std_dev,
        ref_std,
        stats.corr_with_ref,
        stats.centered_rmse_with_ref,
    )?;
    Ok(DiagramPoint {
        label: stats.label.clone(),
        radius: stats.std_dev,
        angle,
        similarity: stats.corr_with_ref,
        chord_to_ref: stats.centered_rmse_with_ref,
        is_reference: false,
        extra: PointExtra {
            mean: Some(stats.mean),
            std_dev: Some(stats.std_dev),
            corr: Some(stats.corr_with_ref),
            centered_rmse: Some(stats.centered_rmse_with_ref),
            ..PointExtra::default()
        },
    })
}

pub fn ktd_point(stats: &EmbeddingStats) -> Result<DiagramPoint> {
    let radius = stats.sq_norm.sqrt();
    let angle = similarity_to_angle(stats.cos_angle)?;
    let chord = stats.mmd_sq.sqrt();
    check_chord(
        &stats.label,
        radius,
        stats.ref_sq_norm.sqrt(),
        stats.cos_angle,
        chord,
    )?;
    Ok(DiagramPoint {
        label: stats.label.clone(),
        radius,
        angle,
        similarity: stats.cos_angle,
        chord_to_ref: chord,
        is_reference: false,
        extra: PointExtra {
            sq_norm: Some(stats.sq_norm),
            cross_inner: Some(stats.cross_inner),
            mmd_sq: Some(stats.mmd_sq),
            info_potential: Some(stats.info_potential),
            entropy: Some(stats.entropy),
            ..PointExtra::default()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramModel {
    pub mode: DiagramMode,
    pub reference: DiagramPoint,
    pub points: Vec<DiagramPoint>,
    pub radial_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_sigma: Option<f64>,
}

impl DiagramModel {
    /// Checks radii, angle ranges and chord geometry.
    pub fn validate(&self) -> Result<()> {
        if !(self.radial_max.is_finite() && self.radial_max > 0.0) {
            return Err(Error::Invariant(format!(
                "radial_max must be positive, got {}",
                self.radial_max
            )));
        }
        let ref_r = self.reference.radius;
        for p in std::iter::once(&self.reference).chain(&self.points) {
            if !(p.radius >= 0.0) || p.radius > self.radial_max {
                return Err(Error::Invariant(format!(
                    "`{}`: radius {} outside [0, radial_max = {}]",
                    p.label, p.radius, self.radial_max
                )));
            }
            if !(0.0..=std::f64::consts::PI).contains(&p.angle) {
                return Err(Error::Invariant(format!(
                    "`{}`: angle {} outside [0, pi]",
                    p.label, p.angle
                )));
            }
            if self.mode == DiagramMode::KernelizedTaylor && p.angle >= std::f64::consts::FRAC_PI_2
            {
                return Err(Error::Invariant(format!(
                    "`{}`: kernelized angle {} must be below pi/2",
                    p.label, p.angle
                )));
            }
            check_chord(
                &p.label,
                p.radius,
                ref_r,
                libm::cos(p.angle),
                p.chord_to_ref,
            )?;
        }
        Ok(())
    }

    /// True when every point lies in the first quadrant.
    pub fn is_quarter(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.angle <= std::f64::consts::FRAC_PI_2)
    }

    pub fn all_points(&self) -> impl Iterator<Item = &DiagramPoint> {
        std::iter::once(&self.reference).chain(&self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagramOptions {
    pub kernel: KernelConfig,
    /// Standardize kernel inputs by the reference's per-dimension moments.
    pub standardize: bool,
}

impl From<KernelConfig> for DiagramOptions {
    fn from(kernel: KernelConfig) -> Self {
        Self {
            kernel,
            standardize: false,
        }
    }
}

fn reference_point(label: &str, radius: f64, extra: PointExtra) -> DiagramPoint {
    DiagramPoint {
        label: label.to_string(),
        radius,
        angle: 0.0,
        similarity: 1.0,
        chord_to_ref: 0.0,
        is_reference: true,
        extra,
    }
}

fn radial_max(reference: &DiagramPoint, points: &[DiagramPoint]) -> f64 {
    let max = points
        .iter()
        .map(|p| p.radius)
        .fold(reference.radius, f64::max);
    if max > 0.0 {
        RADIAL_PADDING * max
    } else {
        1.0
    }
}

/// Builds one diagram. Kernelized mode resolves a single bandwidth from the
/// pool of every population plus the reference so all radii share one scale.
pub fn build_diagram(
    populations: &[Population],
    reference: &Population,
    mode: DiagramMode,
    options: &DiagramOptions,
) -> Result<DiagramModel> {
    if populations.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one non-reference population is required".into(),
        ));
    }
    match mode {
        DiagramMode::Taylor => build_taylor(populations, reference),
        DiagramMode::KernelizedTaylor => build_ktd(populations, reference, options),
    }
}

fn build_taylor(populations: &[Population], reference: &Population) -> Result<DiagramModel> {
    let ref_stats = classic_stats(reference, reference)?;
    let points = populations
        .iter()
        .map(|p| taylor_point(&classic_stats(p, reference)?, ref_stats.std_dev))
        .collect::<Result<Vec<_>>>()?;
    let reference = reference_point(
        reference.label(),
        ref_stats.std_dev,
        PointExtra {
            mean: Some(ref_stats.mean),
            std_dev: Some(ref_stats.std_dev),
            ..PointExtra::default()
        },
    );
    let model = DiagramModel {
        mode: DiagramMode::Taylor,
        radial_max: radial_max(&reference, &points),
        reference,
        points,
        kernel_sigma: None,
    };
    model.validate()?;
    Ok(model)
}

fn build_ktd(
    populations: &[Population],
    reference: &Population,
    options: &DiagramOptions,
) -> Result<DiagramModel> {
    let standardized;
    let (populations, reference) = if options.standardize {
        standardized = standardize_to_reference(populations, reference)?;
        (&standardized.0[..], &standardized.1)
    } else {
        (populations, reference)
    };
    let pool: Vec<&Population> = populations.iter().chain([reference]).collect();
    let kernel = options.kernel.resolve(&pool)?;
    let ref_sq_norm = sq_embedding_norm_with(reference, &kernel);
    let points = populations
        .iter()
        .map(|p| {
            ktd_point(&embedding_stats_with_ref_norm(
                p,
                reference,
                ref_sq_norm,
                &kernel,
            )?)
        })
        .collect::<Result<Vec<_>>>()?;
    let info = info_potential_with(reference, &kernel)?;
    let reference = reference_point(
        reference.label(),
        ref_sq_norm.sqrt(),
        PointExtra {
            sq_norm: Some(ref_sq_norm),
            info_potential: Some(info),
            entropy: Some(quadratic_entropy(info)?),
            ..PointExtra::default()
        },
    );
    let model = DiagramModel {
        mode: DiagramMode::KernelizedTaylor,
        radial_max: radial_max(&reference, &points),
        reference,
        points,
        kernel_sigma: Some(kernel.sigma()),
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn classic(std_dev: f64, ref_std: f64, corr: f64) -> ClassicStats {
        let e2 = std_dev * std_dev + ref_std * ref_std - 2.0 * std_dev * ref_std * corr;
        ClassicStats {
            label: "x".into(),
            mean: 0.0,
            std_dev,
            ref_std_dev: ref_std,
            corr_with_ref: corr,
            centered_rmse_with_ref: e2.max(0.0).sqrt(),
        }
    }

    #[test]
    fn taylor_point_cases() {
        let p = taylor_point(&classic(1.0, 1.0, 1.0), 1.0).unwrap();
        assert_eq!((p.angle, p.chord_to_ref), (0.0, 0.0));

        let p = taylor_point(&classic(0.7, 1.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(p.angle, FRAC_PI_2, epsilon = 1e-15);

        let p = taylor_point(&classic(1.5, 1.5, -1.0), 1.5).unwrap();
        assert_relative_eq!(p.angle, PI, epsilon = 1e-15);
        assert_relative_eq!(p.chord_to_ref, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn taylor_point_rejects_inconsistent_chord() {
        let mut s = classic(1.0, 1.0, 0.5);
        s.centered_rmse_with_ref *= 1.01;
        assert!(matches!(taylor_point(&s, 1.0), Err(Error::Invariant(_))));
    }

    fn embedding(sq_norm: f64, ref_sq_norm: f64, cross: f64) -> EmbeddingStats {
        EmbeddingStats {
            label: "x".into(),
            sq_norm,
            ref_sq_norm,
            cross_inner: cross,
            mmd_sq: sq_norm + ref_sq_norm - 2.0 * cross,
            cos_angle: cross / (sq_norm * ref_sq_norm).sqrt(),
            info_potential: sq_norm,
            entropy: -sq_norm.ln(),
            sigma_used: 1.0,
        }
    }

    #[test]
    fn ktd_point_cases() {
        let p = ktd_point(&embedding(0.4, 0.4, 0.4)).unwrap();
        assert_eq!(p.angle, 0.0);
        assert_relative_eq!(p.chord_to_ref, 0.0, epsilon = 1e-7);
        assert_relative_eq!(p.radius, 0.4f64.sqrt(), epsilon = 1e-15);

        let p = ktd_point(&embedding(1.0, 1.0, 0.5)).unwrap();
        assert_relative_eq!(p.angle, FRAC_PI_3, epsilon = 1e-15);

        let k = (-0.5f64).exp();
        let p = ktd_point(&embedding(1.0, 1.0, k)).unwrap();
        assert_eq!(p.radius, 1.0);
        assert_relative_eq!(
            p.chord_to_ref * p.chord_to_ref,
            2.0 - 2.0 * k,
            epsilon = 1e-15
        );
    }

    #[test]
    fn similarity_clamping() {
        assert_eq!(similarity_to_angle(1.0 + 1e-15).unwrap(), 0.0);
        assert!(similarity_to_angle(1.0 + 1e-6).is_err());
        assert!(similarity_to_angle(f64::NAN).is_err());
    }

    fn pops() -> (Vec<Population>, Population) {
        let r = Population::from_scalars("ref", vec![0.0, 1.0, -0.5, 2.0, 0.3]).unwrap();
        let a = Population::from_scalars("a", vec![0.1, 2.2, -0.9, 3.8, 0.5]).unwrap();
        let b = Population::from_scalars("b", vec![1.0, -1.0, 0.0, 0.2, 0.4]).unwrap();
        (vec![a, b], r)
    }

    #[test]
    fn build_preserves_order_and_pads_radius() {
        let (p, r) = pops();
        for mode in [DiagramMode::Taylor, DiagramMode::KernelizedTaylor] {
            let m = build_diagram(&p, &r, mode, &KernelConfig::median().into()).unwrap();
            let labels: Vec<_> = m.points.iter().map(|p| p.label.as_str()).collect();
            assert_eq!(labels, ["a", "b"]);
            let max_r = m.all_points().map(|p| p.radius).fold(0.0, f64::max);
            assert_relative_eq!(m.radial_max, 1.15 * max_r, epsilon = 1e-15);
            assert!(m.reference.is_reference);
        }
    }

    #[test]
    fn population_equal_to_reference_coincides() {
        let (_, r) = pops();
        let same = r.clone().with_label("same");
        for mode in [DiagramMode::Taylor, DiagramMode::KernelizedTaylor] {
            let m = build_diagram(
                std::slice::from_ref(&same),
                &r,
                mode,
                &KernelConfig::median().into(),
            )
            .unwrap();
            let p = &m.points[0];
            assert_relative_eq!(p.radius, m.reference.radius, epsilon = 1e-15);
            assert_eq!(p.chord_to_ref, 0.0);
            assert!(p.angle.abs() < 1e-7);
        }
    }

    #[test]
    fn build_errors() {
        let (_, r) = pops();
        assert!(build_diagram(&[], &r, DiagramMode::Taylor, &DiagramOptions::default()).is_err());
        let short = Population::from_scalars("short", vec![1.0, 2.0]).unwrap();
        match build_diagram(
            std::slice::from_ref(&short),
            &r,
            DiagramMode::Taylor,
            &DiagramOptions::default(),
        ) {
            Err(Error::LengthMismatch { label, .. }) => assert_eq!(label, "short"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_diagram(
            &[short],
            &r,
            DiagramMode::KernelizedTaylor,
            &DiagramOptions::default()
        )
        .is_ok());
    }

    #[test]
    fn standardization_changes_kernel_inputs_only() {
        let (p, r) = pops();
        let plain = build_diagram(
            &p,
            &r,
            DiagramMode::KernelizedTaylor,
            &KernelConfig::fixed(1.0).into(),
        )
        .unwrap();
        let opts = DiagramOptions {
            kernel: KernelConfig::fixed(1.0),
            standardize: true,
        };
        let std = build_diagram(&p, &r, DiagramMode::KernelizedTaylor, &opts).unwrap();
        assert_ne!(plain.points[0].radius, std.points[0].radius);
    }
}
