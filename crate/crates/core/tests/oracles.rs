//! Brute-force oracles for the kernel statistics. These evaluate the Gaussian
//! kernel from its closed form and sum explicitly, without going through the
//! library's kernel or summation helpers.

use ktd_core::datagen::NormalStream;
use ktd_core::kernel_embedding::{mmd_sq_u, mmd_sq_v};
use ktd_core::{cross_inner, sq_embedding_norm, KernelConfig, Population};

fn k(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    let mut d2 = 0.0;
    for i in 0..x.len() {
        d2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    (-d2 / (2.0 * sigma * sigma)).exp()
}

fn rows(p: &Population) -> Vec<Vec<f64>> {
    p.samples().map(|s| s.to_vec()).collect()
}

fn oracle_mean_kernel(x: &[Vec<f64>], y: &[Vec<f64>], sigma: f64) -> f64 {
    let mut acc = 0.0;
    for a in x {
        for b in y {
            acc += k(a, b, sigma);
        }
    }
    acc / (x.len() * y.len()) as f64
}

/// `|| sum_a w_a phi(z_a) ||^2` over the concatenated sample with signed weights.
fn oracle_mmd_v(x: &[Vec<f64>], y: &[Vec<f64>], sigma: f64) -> f64 {
    let z: Vec<(&Vec<f64>, f64)> = x
        .iter()
        .map(|v| (v, 1.0 / x.len() as f64))
        .chain(y.iter().map(|v| (v, -1.0 / y.len() as f64)))
        .collect();
    let mut acc = 0.0;
    for (a, wa) in &z {
        for (b, wb) in &z {
            acc += wa * wb * k(a, b, sigma);
        }
    }
    acc
}

fn oracle_mmd_u(x: &[Vec<f64>], y: &[Vec<f64>], sigma: f64) -> f64 {
    let off = |s: &[Vec<f64>]| {
        let mut acc = 0.0;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if i != j {
                    acc += k(&s[i], &s[j], sigma);
                }
            }
        }
        acc / (s.len() * (s.len() - 1)) as f64
    };
    off(x) + off(y) - 2.0 * oracle_mean_kernel(x, y, sigma)
}

fn random_pop(label: &str, n: usize, dim: usize, stream: u64) -> Population {
    let mut s = NormalStream::new(2024, stream);
    Population::new(
        label,
        dim,
        (0..n * dim).map(|_| s.next_standard()).collect(),
    )
    .unwrap()
}

#[test]
fn squared_norm_matches_double_loop_on_five_samples() {
    let x = random_pop("x", 5, 2, 1);
    let got = sq_embedding_norm(&x, &KernelConfig::fixed(0.8)).unwrap();
    let want = oracle_mean_kernel(&rows(&x), &rows(&x), 0.8);
    assert!((got - want).abs() <= 1e-15, "{got} vs {want}");
}

#[test]
fn cross_inner_matches_double_loop_on_4_by_7() {
    let x = random_pop("x", 4, 3, 2);
    let y = random_pop("y", 7, 3, 3);
    let got = cross_inner(&x, &y, &KernelConfig::fixed(1.3)).unwrap();
    let want = oracle_mean_kernel(&rows(&x), &rows(&y), 1.3);
    assert!((got - want).abs() <= 1e-15, "{got} vs {want}");
    let back = cross_inner(&y, &x, &KernelConfig::fixed(1.3)).unwrap();
    assert!((got - back).abs() <= 1e-15);
}

#[test]
fn mmd_v_matches_signed_weight_expansion() {
    for (n, m, stream) in [(3, 9, 10), (12, 5, 20), (1, 1, 30)] {
        let x = random_pop("x", n, 2, stream);
        let y = random_pop("y", m, 2, stream + 1);
        let got = mmd_sq_v(&x, &y, &KernelConfig::fixed(0.9)).unwrap();
        let want = oracle_mmd_v(&rows(&x), &rows(&y), 0.9);
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
}

#[test]
fn mmd_u_matches_loop_on_6_vs_6() {
    let x = random_pop("x", 6, 1, 40);
    let y = random_pop("y", 6, 1, 41);
    let got = mmd_sq_u(&x, &y, &KernelConfig::fixed(1.0)).unwrap();
    let want = oracle_mmd_u(&rows(&x), &rows(&y), 1.0);
    assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
}

#[test]
fn median_heuristic_bandwidth_feeds_statistics() {
    // Pooled {0, 1, 3}: median squared distance 4 -> sigma = sqrt(2).
    let x = Population::from_scalars("x", vec![0.0, 1.0]).unwrap();
    let y = Population::from_scalars("y", vec![3.0]).unwrap();
    let got = mmd_sq_v(&x, &y, &KernelConfig::median()).unwrap();
    let want = oracle_mmd_v(&rows(&x), &rows(&y), 2f64.sqrt());
    assert!((got - want).abs() <= 1e-12);
}
