//! Classic Taylor-diagram statistics on paired vectors.
//!
//! Moments use the divide-by-D convention so that
//! `E'^2 = s_x^2 + s_r^2 - 2 s_x s_r rho` holds exactly up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::Population;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicStats {
    pub label: String,
    pub mean: f64,
    pub std_dev: f64,
    pub ref_std_dev: f64,
    pub corr_with_ref: f64,
    pub centered_rmse_with_ref: f64,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population standard deviation.
pub fn std_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

fn check_paired(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Pearson correlation with population moments.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_paired(x, y)?;
    if x.len() < 2 {
        return Err(Error::InsufficientSamples(
            "correlation needs at least 2 paired values".into(),
        ));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y".into()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Root-mean-square difference of the mean-centered vectors.
pub fn centered_rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    check_paired(x, y)?;
    if x.is_empty() {
        return Err(Error::InsufficientSamples(
            "centered RMSE of empty vectors".into(),
        ));
    }
    let (mx, my) = (mean(x), mean(y));
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - mx) - (b - my);
            d * d
        })
        .sum();
    Ok((ss / x.len() as f64).sqrt())
}

/// Classic statistics of `pop` against `reference`, both flattened row-major.
pub fn classic_stats(pop: &Population, reference: &Population) -> Result<ClassicStats> {
    let (x, r) = (pop.as_flat(), reference.as_flat());
    if pop.dim() != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            found: pop.dim(),
        });
    }
    if x.len() != r.len() {
        return Err(Error::LengthMismatch {
            label: pop.label().to_string(),
            expected: r.len(),
            found: x.len(),
        });
    }
    let corr = pearson(x, r).map_err(|e| match e {
        Error::ZeroVariance(which) if which == "x" => Error::ZeroVariance(pop.label().into()),
        Error::ZeroVariance(_) => Error::ZeroVariance(reference.label().into()),
        other => other,
    })?;
    Ok(ClassicStats {
        label: pop.label().to_string(),
        mean: mean(x),
        std_dev: std_dev(x),
        ref_std_dev: std_dev(r),
        corr_with_ref: corr,
        centered_rmse_with_ref: centered_rmse(x, r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn perfect_linear_relations() {
        assert_relative_eq!(
            pearson(&[1., 2., 3.], &[2., 4., 6.]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            pearson(&[1., 2., 3.], &[3., 2., 1.]).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn hand_expanded_correlation() {
        assert_relative_eq!(
            pearson(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap(),
            0.8,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1.0], &[2.0]),
            Err(Error::InsufficientSamples(_))
        ));
        assert!(matches!(
            pearson(&[1., 1.], &[1., 2.]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(matches!(
            pearson(&[1., 2.], &[3., 3.]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(pearson(&[1., 2.], &[1., 2., 3.]).is_err());
    }

    #[test]
    fn centered_rmse_examples() {
        assert_eq!(centered_rmse(&[4., -1., 7.], &[4., -1., 7.]).unwrap(), 0.0);
        assert_relative_eq!(
            centered_rmse(&[1., 2., 3.], &[3., 2., 1.]).unwrap(),
            (8.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            centered_rmse(&[0., 2.], &[5., 5.]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(centered_rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    fn p(label: &str, v: &[f64]) -> Population {
        Population::from_scalars(label, v.to_vec()).unwrap()
    }

    #[test]
    fn stats_against_self() {
        let r = p("ref", &[0.3, -1.0, 2.0, 0.7]);
        let s = classic_stats(&r, &r).unwrap();
        assert_relative_eq!(s.corr_with_ref, 1.0, epsilon = 1e-15);
        assert_eq!(s.centered_rmse_with_ref, 0.0);
        assert_eq!(s.std_dev, s.ref_std_dev);
    }

    #[test]
    fn stats_of_doubled_reference() {
        let r = p("ref", &[0.3, -1.0, 2.0, 0.7]);
        let x = p("x", &[0.6, -2.0, 4.0, 1.4]);
        let s = classic_stats(&x, &r).unwrap();
        assert_relative_eq!(s.corr_with_ref, 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.std_dev, 2.0 * s.ref_std_dev, max_relative = 1e-14);
        assert_relative_eq!(
            s.centered_rmse_with_ref,
            s.ref_std_dev,
            max_relative = 1e-14
        );
    }

    #[test]
    fn stats_hand_example_satisfies_cosine_identity() {
        let s = classic_stats(&p("x", &[1., 2., 3., 4.]), &p("r", &[1., 3., 2., 4.])).unwrap();
        assert_relative_eq!(s.corr_with_ref, 0.8, epsilon = 1e-15);
        // sigma^2 = 1.25 for both -> E'^2 = 2.5 - 2.5 * 0.8 = 0.5
        assert_relative_eq!(
            s.centered_rmse_with_ref,
            0.5f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn stats_errors_name_population() {
        let r = p("ref", &[1., 2., 3.]);
        match classic_stats(&p("short", &[1., 2.]), &r) {
            Err(Error::LengthMismatch { label, .. }) => assert_eq!(label, "short"),
            other => panic!("unexpected {other:?}"),
        }
        match classic_stats(&p("flat", &[2., 2., 2.]), &r) {
            Err(Error::ZeroVariance(label)) => assert_eq!(label, "flat"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
