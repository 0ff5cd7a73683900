//! Hurst exponent estimators: DFA, DMA and height-height correlation (HHCA).
//!
//! All three work on the profile of the return series and regress the
//! logarithm of a second-order fluctuation measure on the logarithm of scale;
//! `H` is half the slope. Every estimate keeps the scaling points it was fitted
//! from, and `h_raw` is always the plain mean of `sub_estimates`.

use serde::{Deserialize, Serialize};

use crate::config::{DfaConfig, DmaConfig, HhcaConfig};
use crate::error::{Error, Result};
use crate::scaling::{fit_power_law, snap_negligible, ScalingPoint};
use crate::series::{profile_of, ReturnSeries, MIN_RETURNS};

/// Shortest series accepted by DMA and HHCA.
pub const MIN_LEN_WINDOWED: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HurstMethod {
    Dfa,
    Dma,
    Hhca,
}

/// A labelled scaling curve (one estimator variant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCurve {
    pub label: String,
    pub points: Vec<ScalingPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub method: HurstMethod,
    pub h_raw: f64,
    /// `h_raw` clamped to `[0, 1]`.
    pub h_clamped: f64,
    pub curves: Vec<ScalingCurve>,
    pub sub_estimates: Vec<f64>,
}

impl HurstEstimate {
    fn from_parts(method: HurstMethod, curves: Vec<ScalingCurve>, sub_estimates: Vec<f64>) -> Self {
        let h_raw = sub_estimates.iter().sum::<f64>() / sub_estimates.len() as f64;
        Self {
            method,
            h_raw,
            h_clamped: h_raw.clamp(0.0, 1.0),
            curves,
            sub_estimates,
        }
    }

    /// Combines variants of one method: curves are concatenated and the
    /// result is the mean over all sub-estimates.
    fn merge(method: HurstMethod, parts: Vec<HurstEstimate>) -> Self {
        let mut curves = Vec::new();
        let mut subs = Vec::new();
        for p in parts {
            curves.extend(p.curves);
            subs.extend(p.sub_estimates);
        }
        Self::from_parts(method, curves, subs)
    }
}

/// Polynomial detrending order for DFA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DfaOrder {
    Linear = 1,
    Quadratic = 2,
}

impl DfaOrder {
    pub fn degree(self) -> usize {
        self as usize
    }
}

impl TryFrom<u32> for DfaOrder {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        match v {
            1 => Ok(DfaOrder::Linear),
            2 => Ok(DfaOrder::Quadratic),
            _ => Err(Error::Parameter(format!("DFA order must be 1 or 2, got {v}"))),
        }
    }
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

fn slope_half(points: &[ScalingPoint]) -> Result<f64> {
    Ok(fit_power_law(points)?.slope / 2.0)
}

/// Box sizes: `n_scales` log-spaced values between `s_min` and `floor(T / s_max_divisor)`,
/// rounded and deduplicated.
pub fn dfa_scales(t: usize, cfg: &DfaConfig) -> Vec<usize> {
    let s_max = t / cfg.s_max_divisor;
    if s_max < cfg.s_min {
        return Vec::new();
    }
    if s_max == cfg.s_min {
        return vec![s_max];
    }
    let (lo, hi) = ((cfg.s_min as f64).ln(), (s_max as f64).ln());
    let n = cfg.n_scales.max(2);
    let mut scales: Vec<usize> = (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp().round() as usize)
        .map(|s| s.clamp(cfg.s_min, s_max))
        .collect();
    scales.dedup();
    scales
}

/// Orthonormal polynomial basis of degrees `0..=degree` on `0..len`.
fn orthonormal_basis(len: usize, degree: usize) -> Vec<Vec<f64>> {
    let centre = (len as f64 - 1.0) / 2.0;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
    for d in 0..=degree {
        let mut v: Vec<f64> = (0..len).map(|i| (i as f64 - centre).powi(d as i32)).collect();
        // two Gram-Schmidt passes
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

fn detrended_rss(segment: &[f64], basis: &[Vec<f64>], resid: &mut [f64]) -> f64 {
    resid.copy_from_slice(segment);
    for b in basis {
        let c: f64 = segment.iter().zip(b).map(|(x, y)| x * y).sum();
        resid.iter_mut().zip(b).for_each(|(r, y)| *r -= c * y);
    }
    resid.iter().map(|r| r * r).sum()
}

/// `F^2(s)` for one box size: mean squared polynomial-fit residual over
/// `floor(T/s)` boxes from the front and as many from the back.
fn dfa_fluctuation(profile: &[f64], s: usize, degree: usize) -> f64 {
    let t = profile.len();
    let nb = t / s;
    let basis = orthonormal_basis(s, degree);
    let mut resid = vec![0.0; s];
    let mut total = 0.0;
    for k in 0..nb {
        total += detrended_rss(&profile[k * s..(k + 1) * s], &basis, &mut resid);
        let end = t - k * s;
        total += detrended_rss(&profile[end - s..end], &basis, &mut resid);
    }
    total / (2 * nb * s) as f64
}

fn dfa_on_profile(profile: &[f64], order: DfaOrder, cfg: &DfaConfig) -> Result<HurstEstimate> {
    let t = profile.len();
    let scales = dfa_scales(t, cfg);
    if scales.len() < 5 {
        return Err(Error::InsufficientData {
            what: "DFA (five distinct box sizes)",
            needed: cfg.s_max_divisor * (cfg.s_min + 4),
            got: t,
        });
    }
    let reference = mean_square(profile);
    let points: Vec<ScalingPoint> = scales
        .iter()
        .map(|&s| {
            let f2 = dfa_fluctuation(profile, s, order.degree());
            ScalingPoint::new(s as f64, snap_negligible(f2, reference))
        })
        .collect();
    let h = slope_half(&points)?;
    let label = match order {
        DfaOrder::Linear => "dfa_order1",
        DfaOrder::Quadratic => "dfa_order2",
    };
    Ok(HurstEstimate::from_parts(
        HurstMethod::Dfa,
        vec![ScalingCurve {
            label: label.into(),
            points,
        }],
        vec![h],
    ))
}

fn require(len: usize, needed: usize, what: &'static str) -> Result<()> {
    if len < needed {
        return Err(Error::InsufficientData { what, needed, got: len });
    }
    Ok(())
}

/// Detrended fluctuation analysis with polynomial detrending of the given order.
pub fn dfa(returns: &ReturnSeries, order: DfaOrder, cfg: &DfaConfig) -> Result<HurstEstimate> {
    require(returns.len(), MIN_RETURNS, "DFA")?;
    dfa_on_profile(&profile_of(returns.values())?, order, cfg)
}

/// Mean of linear and quadratic DFA.
pub fn dfa_combined(returns: &ReturnSeries, cfg: &DfaConfig) -> Result<HurstEstimate> {
    require(returns.len(), MIN_RETURNS, "DFA")?;
    let profile = profile_of(returns.values())?;
    let parts = [DfaOrder::Linear, DfaOrder::Quadratic]
        .into_iter()
        .map(|o| dfa_on_profile(&profile, o, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(HurstEstimate::merge(HurstMethod::Dfa, parts))
}

/// Odd window lengths of the DMA grid.
pub fn dma_windows(cfg: &DmaConfig) -> Vec<usize> {
    (cfg.lambda_min..=cfg.lambda_max)
        .step_by(cfg.lambda_step.max(1))
        .collect()
}

/// Detrending moving average with centred windows.
///
/// For each window `lambda`, `F^2` is the mean squared deviation of the
/// profile from its centred moving average over the points where the full
/// window fits.
pub fn dma(returns: &ReturnSeries, cfg: &DmaConfig) -> Result<HurstEstimate> {
    require(returns.len(), MIN_LEN_WINDOWED, "DMA")?;
    let y = profile_of(returns.values())?;
    let t = y.len();
    let mut prefix = Vec::with_capacity(t + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in &y {
        acc += v;
        prefix.push(acc);
    }
    let reference = mean_square(&y);
    let points: Vec<ScalingPoint> = dma_windows(cfg)
        .into_iter()
        .map(|lambda| {
            let k = (lambda - 1) / 2;
            let lf = lambda as f64;
            let n = t - 2 * k;
            let ss: f64 = (k..t - k)
                .map(|i| {
                    let ma = (prefix[i + k + 1] - prefix[i - k]) / lf;
                    (y[i] - ma).powi(2)
                })
                .sum();
            ScalingPoint::new(lf, snap_negligible(ss / n as f64, reference))
        })
        .collect();
    let h = slope_half(&points)?;
    Ok(HurstEstimate::from_parts(
        HurstMethod::Dma,
        vec![ScalingCurve {
            label: "dma".into(),
            points,
        }],
        vec![h],
    ))
}

/// How increments `X_{t+tau} - X_t` are sampled in the height correlation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HhcaSampling {
    /// Every start `t = 0, 1, ..., T - 1 - tau`.
    Dense,
    /// Starts stepping by `tau`, i.e. non-overlapping increments.
    Coarse,
}

/// Second-order height correlation `K2(tau)`, the mean squared `tau`-increment.
pub fn height_correlation(path: &[f64], tau: usize, sampling: HhcaSampling) -> f64 {
    let step = match sampling {
        HhcaSampling::Dense => 1,
        HhcaSampling::Coarse => tau,
    };
    let (sum, count) = (0..path.len() - tau).step_by(step).fold((0.0, 0usize), |(s, c), t| {
        (s + (path[t + tau] - path[t]).powi(2), c + 1)
    });
    sum / count as f64
}

/// HHCA on an arbitrary path with one sampling variant. One sub-estimate per
/// `tau_max` in the configured range, each fitted over `tau = 1..=tau_max`.
pub fn hhca_variant_on_path(path: &[f64], sampling: HhcaSampling, cfg: &HhcaConfig) -> Result<HurstEstimate> {
    require(path.len(), MIN_LEN_WINDOWED, "HHCA")?;
    let reference = mean_square(path);
    let points: Vec<ScalingPoint> = (1..=cfg.tau_max_hi)
        .map(|tau| {
            let k2 = height_correlation(path, tau, sampling);
            ScalingPoint::new(tau as f64, snap_negligible(k2, reference))
        })
        .collect();
    let subs = (cfg.tau_max_lo..=cfg.tau_max_hi)
        .map(|tau_max| slope_half(&points[..tau_max]))
        .collect::<Result<Vec<_>>>()?;
    let label = match sampling {
        HhcaSampling::Dense => "hhca_dense",
        HhcaSampling::Coarse => "hhca_coarse",
    };
    Ok(HurstEstimate::from_parts(
        HurstMethod::Hhca,
        vec![ScalingCurve {
            label: label.into(),
            points,
        }],
        subs,
    ))
}

/// Both sampling variants on an arbitrary path, averaged.
pub fn hhca_on_path(path: &[f64], cfg: &HhcaConfig) -> Result<HurstEstimate> {
    let parts = [HhcaSampling::Dense, HhcaSampling::Coarse]
        .into_iter()
        .map(|s| hhca_variant_on_path(path, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(HurstEstimate::merge(HurstMethod::Hhca, parts))
}

/// Height-height correlation analysis of the profile, both variants averaged.
pub fn hhca(returns: &ReturnSeries, cfg: &HhcaConfig) -> Result<HurstEstimate> {
    require(returns.len(), MIN_LEN_WINDOWED, "HHCA")?;
    hhca_on_path(&profile_of(returns.values())?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_fgn, SynthSpec};

    fn rs(v: Vec<f64>) -> ReturnSeries {
        ReturnSeries::new("T", v).unwrap()
    }

    // constant apart from the first value: the profile is an exact line
    fn linear_profile_returns(t: usize) -> ReturnSeries {
        let mut v = vec![0.01; t];
        v[0] = 0.5;
        rs(v)
    }

    #[test]
    fn scale_grid() {
        let s = dfa_scales(10_000, &DfaConfig::default());
        assert_eq!(s[0], 5);
        assert_eq!(*s.last().unwrap(), 2000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.len() >= 18);
        assert!(dfa_scales(44, &DfaConfig::default()).len() < 5);
        assert_eq!(dfa_scales(45, &DfaConfig::default()), vec![5, 6, 7, 8, 9]);
    }

    #[test]
    fn dfa_errors() {
        let short = rs([0.1, -0.2].repeat(12));
        assert!(matches!(
            dfa(&short, DfaOrder::Linear, &DfaConfig::default()),
            Err(Error::InsufficientData { .. })
        ));
        let few_scales = rs((0..40).map(|i| (i as f64).sin()).collect());
        assert!(matches!(
            dfa(&few_scales, DfaOrder::Linear, &DfaConfig::default()),
            Err(Error::InsufficientData { .. })
        ));
        let line = linear_profile_returns(500);
        for order in [DfaOrder::Linear, DfaOrder::Quadratic] {
            assert!(matches!(
                dfa(&line, order, &DfaConfig::default()),
                Err(Error::DegenerateFit(_))
            ));
        }
        assert!(DfaOrder::try_from(3).is_err());
    }

    // direct least squares per box via normal equations, independent of the
    // orthonormal-basis path
    #[allow(clippy::needless_range_loop)]
    fn dfa_f2_oracle(profile: &[f64], s: usize, degree: usize) -> f64 {
        let t = profile.len();
        let nb = t / s;
        let fit_rss = |seg: &[f64]| -> f64 {
            let p = degree + 1;
            let mut a = vec![vec![0.0; p + 1]; p];
            for (i, y) in seg.iter().enumerate() {
                let x = i as f64 / s as f64;
                for r in 0..p {
                    for c in 0..p {
                        a[r][c] += x.powi((r + c) as i32);
                    }
                    a[r][p] += x.powi(r as i32) * y;
                }
            }
            for col in 0..p {
                let piv = (col..p)
                    .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                    .unwrap();
                a.swap(col, piv);
                for r in 0..p {
                    if r != col {
                        let f = a[r][col] / a[col][col];
                        for c in col..=p {
                            a[r][c] -= f * a[col][c];
                        }
                    }
                }
            }
            let coef: Vec<f64> = (0..p).map(|r| a[r][p] / a[r][r]).collect();
            seg.iter()
                .enumerate()
                .map(|(i, y)| {
                    let x = i as f64 / s as f64;
                    let fit: f64 = coef.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum();
                    (y - fit).powi(2)
                })
                .sum()
        };
        let mut total = 0.0;
        for k in 0..nb {
            total += fit_rss(&profile[k * s..(k + 1) * s]);
            total += fit_rss(&profile[t - (k + 1) * s..t - k * s]);
        }
        total / (2 * nb * s) as f64
    }

    #[test]
    fn dfa_fluctuation_matches_normal_equations() {
        let x = generate_fgn(&SynthSpec::fgn(0.6, 1024, 5)).unwrap();
        let p = profile_of(x.values()).unwrap();
        for &s in &[5usize, 7, 33, 100] {
            for degree in [1, 2] {
                let a = dfa_fluctuation(&p, s, degree);
                let b = dfa_f2_oracle(&p, s, degree);
                assert!((a - b).abs() < 1e-9 * b, "s={s} q={degree}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dma_constant_profile_is_degenerate() {
        assert!(matches!(
            dma(&rs(vec![0.02; 300]), &DmaConfig::default()),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            dma(&rs(vec![0.02; 99]), &DmaConfig::default()),
            Err(Error::InsufficientData { .. })
        ));
        assert_eq!(
            dma_windows(&DmaConfig::default()),
            vec![3, 5, 7, 9, 11, 13, 15, 17, 19, 21]
        );
    }

    #[test]
    fn hhca_line_gives_one() {
        let path: Vec<f64> = (0..500).map(|t| 0.3 * t as f64).collect();
        let est = hhca_on_path(&path, &HhcaConfig::default()).unwrap();
        assert_eq!(est.sub_estimates.len(), 32);
        for h in &est.sub_estimates {
            assert!((h - 1.0).abs() < 1e-9);
        }
        assert_eq!(est.h_clamped, 1.0);
        // same through the return-series entry point
        let est = hhca(&linear_profile_returns(500), &HhcaConfig::default()).unwrap();
        assert!((est.h_raw - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hhca_constant_is_degenerate() {
        assert!(matches!(
            hhca(&rs(vec![1.0; 200]), &HhcaConfig::default()),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn height_correlation_counts() {
        let path: Vec<f64> = (0..10).map(|t| (t * t) as f64).collect();
        // dense tau = 3: t = 0..=6
        let dense: f64 = (0..7)
            .map(|t| ((t + 3) * (t + 3) - t * t) as f64)
            .map(|d| d * d)
            .sum::<f64>()
            / 7.0;
        assert_eq!(height_correlation(&path, 3, HhcaSampling::Dense), dense);
        // coarse tau = 3: t = 0, 3, 6
        let coarse: f64 = [0, 3, 6]
            .iter()
            .map(|&t| ((t + 3) * (t + 3) - t * t) as f64)
            .map(|d| d * d)
            .sum::<f64>()
            / 3.0;
        assert_eq!(height_correlation(&path, 3, HhcaSampling::Coarse), coarse);
    }

    fn recompute(est: &HurstEstimate, cfg: &HhcaConfig) -> f64 {
        let mut subs = Vec::new();
        for c in &est.curves {
            if c.label.starts_with("hhca") {
                for tm in cfg.tau_max_lo..=cfg.tau_max_hi {
                    subs.push(fit_power_law(&c.points[..tm]).unwrap().slope / 2.0);
                }
            } else {
                subs.push(fit_power_law(&c.points).unwrap().slope / 2.0);
            }
        }
        subs.iter().sum::<f64>() / subs.len() as f64
    }

    #[test]
    fn estimates_recompute_from_points() {
        let x = generate_fgn(&SynthSpec::fgn(0.65, 2048, 11)).unwrap();
        let hc = HhcaConfig::default();
        for est in [
            dfa(&x, DfaOrder::Linear, &DfaConfig::default()).unwrap(),
            dfa_combined(&x, &DfaConfig::default()).unwrap(),
            dma(&x, &DmaConfig::default()).unwrap(),
            hhca(&x, &hc).unwrap(),
        ] {
            assert_eq!(recompute(&est, &hc), est.h_raw, "{:?}", est.method);
            assert_eq!(est.h_clamped, est.h_raw.clamp(0.0, 1.0));
        }
    }

    #[test]
    fn scale_and_shift_invariance() {
        let x = generate_fgn(&SynthSpec::fgn(0.4, 2048, 2)).unwrap();
        let y = x.affine(7.3, 0.0).unwrap();
        let z = x.affine(1.0, 0.25).unwrap();
        let run = |s: &ReturnSeries| {
            [
                dfa(s, DfaOrder::Linear, &DfaConfig::default()).unwrap().h_raw,
                dfa(s, DfaOrder::Quadratic, &DfaConfig::default()).unwrap().h_raw,
                dma(s, &DmaConfig::default()).unwrap().h_raw,
                hhca(s, &HhcaConfig::default()).unwrap().h_raw,
            ]
        };
        let (a, b, c) = (run(&x), run(&y), run(&z));
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-9);
            assert!((a[i] - c[i]).abs() < 1e-9);
        }
    }
}
