//! Lag-one autocorrelation and the KPSS level-stationarity test.

use serde::{Deserialize, Serialize};

use crate::config::KpssConfig;
use crate::error::{Error, Result};
use crate::series::{mean, ReturnSeries};

/// Asymptotic KPSS critical value at 5%, level case.
pub const KPSS_CRITICAL_5PCT: f64 = 0.463;
/// Asymptotic KPSS critical value at 1%, level case.
pub const KPSS_CRITICAL_1PCT: f64 = 0.739;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Acf1Result {
    pub rho1: f64,
}

/// First-order sample autocorrelation.
pub fn acf1(returns: &ReturnSeries) -> Result<Acf1Result> {
    let x = returns.values();
    if x.len() < 3 {
        return Err(Error::InsufficientData {
            what: "autocorrelation",
            needed: 3,
            got: x.len(),
        });
    }
    let m = mean(x);
    let den: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    if den == 0.0 {
        return Err(Error::DegenerateInput("autocorrelation of a constant series".into()));
    }
    let num: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    Ok(Acf1Result {
        rho1: (num / den).clamp(-1.0, 1.0),
    })
}

/// Bucketed significance of a KPSS statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KpssVerdict {
    #[serde(rename = "p>0.05")]
    Stationary,
    #[serde(rename = "0.01<p<0.05")]
    Reject5,
    #[serde(rename = "p<0.01")]
    Reject1,
}

impl KpssVerdict {
    pub fn from_statistic(stat: f64) -> Self {
        if stat > KPSS_CRITICAL_1PCT {
            KpssVerdict::Reject1
        } else if stat > KPSS_CRITICAL_5PCT {
            KpssVerdict::Reject5
        } else {
            KpssVerdict::Stationary
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KpssVerdict::Stationary => "p>0.05",
            KpssVerdict::Reject5 => "0.01<p<0.05",
            KpssVerdict::Reject1 => "p<0.01",
        }
    }

    /// Stationarity rejected at the 5% level.
    pub fn rejects_at_5pct(self) -> bool {
        self != KpssVerdict::Stationary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpssResult {
    pub statistic: f64,
    pub bandwidth: usize,
    pub verdict: KpssVerdict,
}

/// `floor(4 (T/100)^(1/4))`, at least one lag.
pub fn kpss_default_bandwidth(t: usize) -> usize {
    ((4.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize).max(1)
}

/// KPSS test of level stationarity with a Bartlett-kernel long-run variance.
pub fn kpss(returns: &ReturnSeries, cfg: &KpssConfig) -> Result<KpssResult> {
    let x = returns.values();
    let t = x.len();
    if t < 50 {
        return Err(Error::InsufficientData {
            what: "KPSS",
            needed: 50,
            got: t,
        });
    }
    let bandwidth = cfg.bandwidth.unwrap_or_else(|| kpss_default_bandwidth(t)).min(t - 1);
    let m = mean(x);
    let e: Vec<f64> = x.iter().map(|v| v - m).collect();
    let tf = t as f64;
    let gamma = |j: usize| e[j..].iter().zip(&e).map(|(a, b)| a * b).sum::<f64>() / tf;
    let mut lrv = gamma(0);
    if lrv == 0.0 {
        return Err(Error::DegenerateInput("KPSS of a constant series".into()));
    }
    for j in 1..=bandwidth {
        lrv += 2.0 * (1.0 - j as f64 / (bandwidth as f64 + 1.0)) * gamma(j);
    }
    let mut s = 0.0;
    let ss: f64 = e
        .iter()
        .map(|v| {
            s += v;
            s * s
        })
        .sum();
    let statistic = ss / (tf * tf * lrv);
    Ok(KpssResult {
        statistic,
        bandwidth,
        verdict: KpssVerdict::from_statistic(statistic),
    })
}
