//! Stable JSON form of an [`EfficiencyReport`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::efficiency::{EfficiencyReport, MeasureName};
use crate::series::DescriptiveStats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub raw: f64,
    pub clamped: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpssJson {
    pub statistic: f64,
    pub bandwidth: usize,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub ticker: String,
    pub t: usize,
    pub ei: f64,
    /// `null` for a fully efficient series (`ei == 0`).
    pub local_share: Option<f64>,
    pub global_share: Option<f64>,
    pub mean_h: f64,
    pub mean_d: f64,
    /// Keyed by measure name (`H_DFA`, ..., `RHO1`).
    pub estimates: BTreeMap<String, EstimateJson>,
    /// Jackknife and variant members behind the averaged Hurst estimates.
    pub sub_estimates: BTreeMap<String, Vec<f64>>,
    /// Keyed by estimator curve (`dfa_order1`, `hhca_dense`, `wavelet`, ...),
    /// each a list of `[scale, fluctuation]`.
    pub scaling_points: BTreeMap<String, Vec<[f64; 2]>>,
    pub stats: DescriptiveStats,
    pub kpss: KpssJson,
}

impl From<&EfficiencyReport> for ReportJson {
    fn from(r: &EfficiencyReport) -> Self {
        let estimates = r
            .vector
            .entries()
            .iter()
            .map(|e| {
                (
                    e.name.as_str().to_string(),
                    EstimateJson {
                        raw: e.raw,
                        clamped: e.estimate,
                    },
                )
            })
            .collect();

        let c = &r.components;
        let sub_estimates = [
            (MeasureName::HDfa, &c.dfa),
            (MeasureName::HDma, &c.dma),
            (MeasureName::HHhca, &c.hhca),
        ]
        .iter()
        .map(|(n, est)| (n.as_str().to_string(), est.sub_estimates.clone()))
        .collect();

        let pairs =
            |pts: &[crate::scaling::ScalingPoint]| pts.iter().map(|p| [p.scale, p.fluctuation]).collect::<Vec<_>>();
        let mut scaling_points: BTreeMap<String, Vec<[f64; 2]>> = BTreeMap::new();
        for est in [&c.dfa, &c.dma, &c.hhca] {
            for curve in &est.curves {
                scaling_points.insert(curve.label.clone(), pairs(&curve.points));
            }
        }
        for (label, est) in [
            ("periodogram", &c.periodogram),
            ("wavelet", &c.wavelet),
            ("genton", &c.genton),
            ("hall_wood", &c.hall_wood),
        ] {
            scaling_points.insert(label.to_string(), pairs(&est.points));
        }

        ReportJson {
            ticker: r.ticker.clone(),
            t: r.t,
            ei: r.ei,
            local_share: r.shares.map(|s| s.local),
            global_share: r.shares.map(|s| s.global),
            mean_h: r.mean_h(),
            mean_d: r.mean_d(),
            estimates,
            sub_estimates,
            scaling_points,
            stats: r.stats,
            kpss: KpssJson {
                statistic: r.kpss.statistic,
                bandwidth: r.kpss.bandwidth,
                verdict: r.kpss.verdict.as_str().to_string(),
            },
        }
    }
}

impl ReportJson {
    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
