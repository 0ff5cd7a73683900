//! Fractal dimension of a univariate path, `D` in `[1, 2]`.
//!
//! Four estimators, all applied to the integrated path (the profile):
//!
//! * Hall-Wood: boxcount-type estimator from the mean absolute increment at
//!   lags 1 and 2, `A(l) = (l/T) * sum_i |X(i l) - X((i-1) l)|`, `D = 2 - slope`.
//! * Genton: robust variogram from the squared Qn scale of lag-1 and lag-2
//!   increments, `D = 2 - slope/2`.
//! * Periodogram: log-periodogram slope `beta` over the lowest `floor(T^(2/3))`
//!   Fourier frequencies, `D = (5 + beta) / 2`.
//! * Wavelet: log2 detail-variance slope `beta` of a periodic Daubechies-4
//!   pyramid, `H = (beta - 1) / 2`, `D = 2 - H`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::config::{PeriodogramConfig, WaveletConfig};
use crate::error::{Error, Result};
use crate::scaling::{fit_log_log, fit_power_law, snap_negligible, ScalingPoint};

/// Shortest path accepted by every fractal estimator.
pub const MIN_LEN: usize = 100;

/// Consistency constant of the Qn scale estimator at the Gaussian.
const QN_CONSTANT: f64 = 2.2219;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FractalMethod {
    Periodogram,
    Wavelet,
    Genton,
    HallWood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalEstimate {
    pub method: FractalMethod,
    pub d_raw: f64,
    /// `d_raw` clamped to `[1, 2]`.
    pub d_clamped: f64,
    pub points: Vec<ScalingPoint>,
}

impl FractalEstimate {
    fn new(method: FractalMethod, d_raw: f64, points: Vec<ScalingPoint>) -> Self {
        Self {
            method,
            d_raw,
            d_clamped: d_raw.clamp(1.0, 2.0),
            points,
        }
    }
}

fn check_path(path: &[f64], what: &'static str) -> Result<()> {
    if path.len() < MIN_LEN {
        return Err(Error::InsufficientData {
            what,
            needed: MIN_LEN,
            got: path.len(),
        });
    }
    if path.iter().all(|v| *v == path[0]) {
        return Err(Error::DegenerateInput(format!("{what}: constant path")));
    }
    Ok(())
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Hall-Wood estimator with lags {1, 2}.
pub fn fd_hall_wood(path: &[f64]) -> Result<FractalEstimate> {
    check_path(path, "Hall-Wood")?;
    let t = path.len();
    let points: Vec<ScalingPoint> = [1usize, 2]
        .iter()
        .map(|&l| {
            let sum: f64 = path
                .iter()
                .step_by(l)
                .collect::<Vec<_>>()
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .sum();
            ScalingPoint::new(l as f64, l as f64 / t as f64 * sum)
        })
        .collect();
    let slope = fit_log_log(&points)?.slope;
    Ok(FractalEstimate::new(FractalMethod::HallWood, 2.0 - slope, points))
}

/// Genton estimator with lags {1, 2}.
pub fn fd_genton(path: &[f64]) -> Result<FractalEstimate> {
    check_path(path, "Genton")?;
    let points = [1usize, 2]
        .iter()
        .map(|&l| {
            let incr: Vec<f64> = path.windows(l + 1).map(|w| w[l] - w[0]).collect();
            let q = qn_scale(&incr);
            ScalingPoint::new(l as f64, q * q)
        })
        .collect::<Vec<_>>();
    let slope = fit_log_log(&points)?.slope;
    Ok(FractalEstimate::new(FractalMethod::Genton, 2.0 - slope / 2.0, points))
}

/// Qn scale estimator: `2.2219 * {|x_i - x_j|; i < j}_(k)` with
/// `k = C(h, 2)`, `h = floor(n/2) + 1`. No small-sample correction.
pub fn qn_scale(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mut y = x.to_vec();
    y.sort_by(f64::total_cmp);
    let h = n / 2 + 1;
    let k = h * (h - 1) / 2;
    QN_CONSTANT * kth_pairwise_difference(&y, k)
}

/// The `k`-th smallest (1-based) of `y[j] - y[i]` over `i < j`, for sorted
/// `y`. Row-wise candidate ranges shrink around the weighted median of row
/// medians until few candidates remain.
pub(crate) fn kth_pairwise_difference(y: &[f64], k: usize) -> f64 {
    let n = y.len();
    debug_assert!(k >= 1 && k <= n * (n - 1) / 2);
    let d = |i: usize, j: usize| y[j] - y[i];
    // candidate columns for row i are left[i]..right[i] (exclusive end)
    let mut left: Vec<usize> = (0..n).map(|i| i + 1).collect();
    let mut right: Vec<usize> = vec![n; n];
    let mut below = vec![0usize; n];
    let mut not_above = vec![0usize; n];
    let mut medians: Vec<(f64, usize)> = Vec::with_capacity(n);

    loop {
        let remaining: usize = (0..n).map(|i| right[i] - left[i]).sum();
        if remaining <= n.max(16) {
            let passed: usize = (0..n).map(|i| left[i] - (i + 1)).sum();
            let mut cand: Vec<f64> = (0..n)
                .flat_map(|i| (left[i]..right[i]).map(move |j| (i, j)))
                .map(|(i, j)| d(i, j))
                .collect();
            cand.sort_by(f64::total_cmp);
            return cand[k - 1 - passed];
        }

        medians.clear();
        for i in 0..n {
            let w = right[i] - left[i];
            if w > 0 {
                medians.push((d(i, left[i] + w / 2), w));
            }
        }
        medians.sort_by(|a, b| a.0.total_cmp(&b.0));
        let half = remaining.div_ceil(2);
        let mut acc = 0;
        let pivot = medians
            .iter()
            .find(|(_, w)| {
                acc += w;
                acc >= half
            })
            .map(|(v, _)| *v)
            .expect("weights sum to remaining");

        // first column with d >= pivot, and first with d > pivot, per row
        let (mut p_lt, mut p_le) = (1usize, 1usize);
        let (mut n_lt, mut n_le) = (0usize, 0usize);
        for i in 0..n {
            p_lt = p_lt.max(i + 1);
            while p_lt < n && d(i, p_lt) < pivot {
                p_lt += 1;
            }
            p_le = p_le.max(p_lt);
            while p_le < n && d(i, p_le) <= pivot {
                p_le += 1;
            }
            below[i] = p_lt;
            not_above[i] = p_le;
            n_lt += p_lt - (i + 1);
            n_le += p_le - (i + 1);
        }

        if k <= n_lt {
            for i in 0..n {
                right[i] = right[i].min(below[i]).max(left[i]);
            }
        } else if k > n_le {
            for i in 0..n {
                left[i] = left[i].max(not_above[i]).min(right[i]);
            }
        } else {
            return pivot;
        }
    }
}

/// Number of Fourier frequencies used by the periodogram fit.
pub fn periodogram_cutoff(t: usize, cfg: &PeriodogramConfig) -> usize {
    ((t as f64).powf(cfg.exponent) + 1e-9).floor() as usize
}

/// Log-periodogram estimator over frequencies `2 pi j / T`, `j = 1..=m`.
pub fn fd_periodogram(path: &[f64], cfg: &PeriodogramConfig) -> Result<FractalEstimate> {
    check_path(path, "periodogram")?;
    let t = path.len();
    let m = periodogram_cutoff(t, cfg).min((t - 1) / 2);
    if m < 3 {
        return Err(Error::InsufficientData {
            what: "periodogram frequencies",
            needed: 3,
            got: m,
        });
    }
    let mean = path.iter().sum::<f64>() / t as f64;
    let mut buf: Vec<Complex<f64>> = path.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(t).process(&mut buf);
    let norm = 2.0 * std::f64::consts::PI * t as f64;
    let reference = buf[1..=m].iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
    let points: Vec<ScalingPoint> = (1..=m)
        .map(|j| {
            let omega = 2.0 * std::f64::consts::PI * j as f64 / t as f64;
            ScalingPoint::new(omega, snap_negligible(buf[j].norm_sqr(), reference) / norm)
        })
        .collect();
    let beta = fit_power_law(&points)?.slope;
    Ok(FractalEstimate::new(
        FractalMethod::Periodogram,
        (5.0 + beta) / 2.0,
        points,
    ))
}

/// Daubechies 4-tap scaling filter.
pub fn daubechies4() -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let d = 4.0 * 2f64.sqrt();
    [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
}

/// Periodic orthogonal DWT, returning detail coefficients for levels
/// `1..=levels`. Odd-length approximations drop their last sample.
pub fn dwt_details(path: &[f64], levels: usize) -> Vec<Vec<f64>> {
    let h = daubechies4();
    let g = [h[3], -h[2], h[1], -h[0]];
    let mut approx = path.to_vec();
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let n = approx.len() & !1;
        if n < 2 {
            break;
        }
        let half = n / 2;
        let mut a = Vec::with_capacity(half);
        let mut det = Vec::with_capacity(half);
        for i in 0..half {
            let (mut sa, mut sd) = (0.0, 0.0);
            for k in 0..4 {
                let v = approx[(2 * i + k) % n];
                sa += h[k] * v;
                sd += g[k] * v;
            }
            a.push(sa);
            det.push(sd);
        }
        out.push(det);
        approx = a;
    }
    out
}

/// Wavelet-variance estimator on dyadic levels `1..=floor(log2 T) - level_offset`.
pub fn fd_wavelet(path: &[f64], cfg: &WaveletConfig) -> Result<FractalEstimate> {
    check_path(path, "wavelet")?;
    let t = path.len();
    let levels = (t.ilog2() as usize).saturating_sub(cfg.level_offset);
    let reference = mean_square(path);
    let points: Vec<ScalingPoint> = dwt_details(path, levels)
        .iter()
        .enumerate()
        .filter(|(_, d)| d.len() >= cfg.min_coeffs)
        .map(|(j, d)| ScalingPoint::new((1u64 << (j + 1)) as f64, snap_negligible(mean_square(d), reference)))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            what: "wavelet levels",
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().all(|p| p.fluctuation == 0.0) {
        return Err(Error::DegenerateInput(
            "wavelet: zero detail variance at every level".into(),
        ));
    }
    // slope of ln(var) on ln(2^j) equals the slope of log2(var) on j
    let beta = fit_power_law(&points)?.slope;
    let h = (beta - 1.0) / 2.0;
    Ok(FractalEstimate::new(FractalMethod::Wavelet, 2.0 - h, points))
}
