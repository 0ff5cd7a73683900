//! Deterministic synthetic processes used as recovery oracles.
//!
//! Random numbers come from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64`, and normals from the ziggurat `StandardNormal` sampler of
//! `rand_distr`. Expected values in tests are pinned to this algorithm pair.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::ReturnSeries;

/// Name of the generator algorithm, recorded in exported metadata.
pub const RNG_ALGORITHM: &str = "chacha20";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    /// Fractional Gaussian noise with Hurst exponent `h`.
    Fgn {
        h: f64,
    },
    /// Gaussian AR(1) with coefficient `phi`.
    Ar1 {
        phi: f64,
    },
    WhiteNoise,
    /// Cumulated standard normals (the level, not the increments).
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub kind: SynthKind,
    pub t: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn fgn(h: f64, t: usize, seed: u64) -> Self {
        Self {
            kind: SynthKind::Fgn { h },
            t,
            seed,
        }
    }

    pub fn ar1(phi: f64, t: usize, seed: u64) -> Self {
        Self {
            kind: SynthKind::Ar1 { phi },
            t,
            seed,
        }
    }

    pub fn white_noise(t: usize, seed: u64) -> Self {
        Self {
            kind: SynthKind::WhiteNoise,
            t,
            seed,
        }
    }

    pub fn random_walk(t: usize, seed: u64) -> Self {
        Self {
            kind: SynthKind::RandomWalk,
            t,
            seed,
        }
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn normals(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Generates the series described by `spec`.
pub fn generate(spec: &SynthSpec) -> Result<ReturnSeries> {
    match spec.kind {
        SynthKind::Fgn { .. } => generate_fgn(spec),
        SynthKind::Ar1 { .. } => generate_ar1(spec),
        SynthKind::WhiteNoise => {
            check_len(spec.t)?;
            ReturnSeries::new("white_noise", normals(&mut rng(spec.seed), spec.t))
        }
        SynthKind::RandomWalk => {
            check_len(spec.t)?;
            let mut acc = 0.0;
            let walk = normals(&mut rng(spec.seed), spec.t)
                .into_iter()
                .map(|e| {
                    acc += e;
                    acc
                })
                .collect();
            ReturnSeries::new("random_walk", walk)
        }
    }
}

fn check_len(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::Parameter("length must be positive".into()));
    }
    Ok(())
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Eigenvalues of the minimal circulant embedding (size `2t`) of the fGn
/// covariance, computed by FFT.
pub fn circulant_eigenvalues(h: f64, t: usize) -> Vec<f64> {
    let m = 2 * t;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= t { j } else { m - j };
            Complex::new(fgn_autocovariance(h, lag), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut row);
    row.into_iter().map(|c| c.re).collect()
}

/// Exact fractional Gaussian noise by circulant embedding (Davies-Harte).
///
/// Rejects an embedding with a clearly negative eigenvalue and zeroes
/// rounding-level negatives.
fn checked_embedding(eig: Vec<f64>, h: f64, t: usize) -> Result<Vec<f64>> {
    let max = eig.iter().copied().fold(0.0, f64::max);
    if let Some((k, &v)) = eig.iter().enumerate().find(|(_, &v)| v < -1e-10 * max) {
        return Err(Error::Generation(format!(
            "circulant embedding not non-negative definite: eigenvalue {k} = {v:e} (H = {h}, t = {t})"
        )));
    }
    Ok(eig.into_iter().map(|v| v.max(0.0)).collect())
}

/// `t` must be a power of two, at least 256. Eigenvalues of the embedding
/// that are negative beyond rounding noise (`1e-10` of the largest) abort
/// generation; smaller negative values are treated as zero.
pub fn generate_fgn(spec: &SynthSpec) -> Result<ReturnSeries> {
    let SynthKind::Fgn { h } = spec.kind else {
        return Err(Error::Parameter("generate_fgn needs an fGn spec".into()));
    };
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Parameter(format!(
            "fGn Hurst exponent must lie in (0, 1), got {h}"
        )));
    }
    let t = spec.t;
    if t < 256 || !t.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "fGn length must be a power of two >= 256, got {t}"
        )));
    }

    let m = 2 * t;
    let eig = checked_embedding(circulant_eigenvalues(h, t), h, t)?;

    let mut rng = rng(spec.seed);
    let mf = m as f64;
    let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut w = vec![Complex::new(0.0, 0.0); m];
    w[0] = Complex::new((eig[0] / mf).sqrt() * z(), 0.0);
    w[t] = Complex::new((eig[t] / mf).sqrt() * z(), 0.0);
    for k in 1..t {
        let a = (eig[k] / (2.0 * mf)).sqrt();
        w[k] = Complex::new(a * z(), a * z());
        w[m - k] = w[k].conj();
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut w);
    ReturnSeries::new(format!("fgn_h{h}"), w[..t].iter().map(|c| c.re).collect())
}

/// Stationary Gaussian AR(1): `x_t = phi x_{t-1} + e_t`, `x_0 ~ N(0, 1/(1-phi^2))`.
pub fn generate_ar1(spec: &SynthSpec) -> Result<ReturnSeries> {
    let SynthKind::Ar1 { phi } = spec.kind else {
        return Err(Error::Parameter("generate_ar1 needs an AR(1) spec".into()));
    };
    if phi.is_nan() || phi.abs() >= 1.0 {
        return Err(Error::Parameter(format!(
            "AR(1) coefficient must satisfy |phi| < 1, got {phi}"
        )));
    }
    check_len(spec.t)?;
    let e = normals(&mut rng(spec.seed), spec.t);
    let mut out = Vec::with_capacity(spec.t);
    let mut prev = e[0] / (1.0 - phi * phi).sqrt();
    out.push(prev);
    for &eps in &e[1..] {
        prev = phi * prev + eps;
        out.push(prev);
    }
    ReturnSeries::new(format!("ar1_phi{phi}"), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acf(x: &[f64], lag: usize) -> f64 {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let c0: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
        let c: f64 = x.windows(lag + 1).map(|w| (w[0] - m) * (w[lag] - m)).sum();
        c / c0
    }

    #[test]
    fn fgn_half_is_white() {
        let t = 4096;
        let x = generate_fgn(&SynthSpec::fgn(0.5, t, 3)).unwrap();
        assert!(acf(x.values(), 1).abs() < 3.0 / (t as f64).sqrt());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_fgn(&SynthSpec::fgn(0.7, 512, 9)).unwrap();
        let b = generate_fgn(&SynthSpec::fgn(0.7, 512, 9)).unwrap();
        let c = generate_fgn(&SynthSpec::fgn(0.7, 512, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let a = generate_ar1(&SynthSpec::ar1(0.3, 100, 1)).unwrap();
        assert_eq!(a, generate_ar1(&SynthSpec::ar1(0.3, 100, 1)).unwrap());
    }

    // eigenvalues by direct cosine sums, independent of the FFT path
    fn eigen_direct(h: f64, t: usize) -> Vec<f64> {
        let m = 2 * t;
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|j| {
                        let lag = if j <= t { j } else { m - j };
                        fgn_autocovariance(h, lag) * (2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64).cos()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn embedding_check() {
        let e = checked_embedding(vec![4.0, 1.0, -1e-12, 0.5], 0.5, 2).unwrap();
        assert_eq!(e, [4.0, 1.0, 0.0, 0.5]);
        assert!(matches!(
            checked_embedding(vec![4.0, -0.1, 1.0], 0.9, 2),
            Err(Error::Generation(_))
        ));
        // exact fGn embeds for extreme H even at the smallest length
        let lambda = circulant_eigenvalues(0.99, 256);
        let max = lambda.iter().copied().fold(0.0, f64::max);
        assert!(lambda.iter().all(|&v| v > 1e-5 * max));
        assert!(generate_fgn(&SynthSpec::fgn(0.99, 256, 1)).is_ok());
    }

    #[test]
    fn eigenvalues_match_direct_sum() {
        for &h in &[0.2, 0.7, 0.99] {
            let fast = circulant_eigenvalues(h, 256);
            let slow = eigen_direct(h, 256);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "h={h}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fgn_parameter_errors() {
        assert!(matches!(
            generate_fgn(&SynthSpec::fgn(0.5, 1000, 0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_fgn(&SynthSpec::fgn(0.5, 128, 0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_fgn(&SynthSpec::fgn(1.0, 256, 0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_ar1(&SynthSpec::ar1(1.0, 256, 0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_ar1(&SynthSpec::ar1(-1.2, 256, 0)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn ar1_recovers_phi() {
        for &phi in &[0.5, -0.5] {
            let x = generate_ar1(&SynthSpec::ar1(phi, 10_000, 17)).unwrap();
            assert!((acf(x.values(), 1) - phi).abs() < 0.03);
        }
        let x = generate_ar1(&SynthSpec::ar1(0.0, 10_000, 17)).unwrap();
        assert!(acf(x.values(), 1).abs() < 0.03);
    }
}
