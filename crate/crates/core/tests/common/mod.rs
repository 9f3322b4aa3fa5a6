#![allow(dead_code)]

use contilab_core::SampleStats;

/// Asserts that the sample mean of `xs` is within `k` standard errors of `target`.
pub fn assert_mean_near(xs: &[f64], target: f64, k: f64, what: &str) {
    let s = SampleStats::from_samples(xs).unwrap();
    let tol = k * s.stderr() + 1e-12;
    assert!((s.mean - target).abs() <= tol, "{what}: mean {} vs {target} (tol {tol})", s.mean);
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of a sample variance estimated from `n` roughly Gaussian draws.
pub fn variance_stderr(var: f64, n: usize) -> f64 {
    var * (2.0 / (n as f64 - 1.0)).sqrt()
}

/// Standard normal CDF via the complementary error function series.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    // Numerical Recipes Chebyshev fit, relative error below 1.2e-7
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}
