//! The efficiency index and its decomposition.
//!
//! Each of the eight measures is normalized by its range and centred on its
//! efficient-market value, so the measure vector lives in a unit cube whose
//! centre is the efficient market. The index is the Euclidean distance from
//! that centre: `0` for a perfectly efficient market, `sqrt(8)/2` at a corner.
//!
//! Fractal-dimension terms are *local* inefficiency; Hurst and autocorrelation
//! terms are *global*.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::fractal::{fd_genton, fd_hall_wood, fd_periodogram, fd_wavelet, FractalEstimate};
use crate::hurst::{dfa_combined, dma, hhca, HurstEstimate};
use crate::scaling::{ols, LineFit};
use crate::series::{descriptive_stats, profile, DescriptiveStats, ReturnSeries};
use crate::stats::{acf1, kpss, KpssResult};

/// Number of measures entering the index.
pub const N_MEASURES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureName {
    #[serde(rename = "H_DFA")]
    HDfa,
    #[serde(rename = "H_DMA")]
    HDma,
    #[serde(rename = "H_HHCA")]
    HHhca,
    #[serde(rename = "D_P")]
    DPeriodogram,
    #[serde(rename = "D_W")]
    DWavelet,
    #[serde(rename = "D_G")]
    DGenton,
    #[serde(rename = "D_HW")]
    DHallWood,
    #[serde(rename = "RHO1")]
    Rho1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Local,
    Global,
}

impl MeasureName {
    pub const ALL: [MeasureName; N_MEASURES] = [
        MeasureName::HDfa,
        MeasureName::HDma,
        MeasureName::HHhca,
        MeasureName::DPeriodogram,
        MeasureName::DWavelet,
        MeasureName::DGenton,
        MeasureName::DHallWood,
        MeasureName::Rho1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureName::HDfa => "H_DFA",
            MeasureName::HDma => "H_DMA",
            MeasureName::HHhca => "H_HHCA",
            MeasureName::DPeriodogram => "D_P",
            MeasureName::DWavelet => "D_W",
            MeasureName::DGenton => "D_G",
            MeasureName::DHallWood => "D_HW",
            MeasureName::Rho1 => "RHO1",
        }
    }

    /// Value of the measure for an efficient market.
    pub fn ideal(self) -> f64 {
        match self {
            MeasureName::HDfa | MeasureName::HDma | MeasureName::HHhca => 0.5,
            MeasureName::Rho1 => 0.0,
            _ => 1.5,
        }
    }

    /// Closed support of the measure.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            MeasureName::HDfa | MeasureName::HDma | MeasureName::HHhca => (0.0, 1.0),
            MeasureName::Rho1 => (-1.0, 1.0),
            _ => (1.0, 2.0),
        }
    }

    pub fn range(self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    pub fn kind(self) -> MeasureKind {
        match self {
            MeasureName::DPeriodogram | MeasureName::DWavelet | MeasureName::DGenton | MeasureName::DHallWood => {
                MeasureKind::Local
            }
            _ => MeasureKind::Global,
        }
    }

    pub fn is_hurst(self) -> bool {
        matches!(self, MeasureName::HDfa | MeasureName::HDma | MeasureName::HHhca)
    }

    pub fn is_fractal(self) -> bool {
        self.kind() == MeasureKind::Local
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub name: MeasureName,
    /// Clamped estimate, the value the index consumes.
    pub estimate: f64,
    /// Estimate before clamping.
    pub raw: f64,
    pub ideal: f64,
    pub range: f64,
    pub kind: MeasureKind,
}

impl MeasureEntry {
    /// `(estimate - ideal) / range`, at most 0.5 in magnitude.
    pub fn normalized_deviation(&self) -> f64 {
        (self.estimate - self.ideal) / self.range
    }
}

/// The eight measures in fixed order (`MeasureName::ALL`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    entries: [MeasureEntry; N_MEASURES],
}

impl MeasureVector {
    /// Builds the vector from raw estimates in `MeasureName::ALL` order;
    /// each is clamped to its support.
    pub fn from_raw(raw: [f64; N_MEASURES]) -> Self {
        let entries = std::array::from_fn(|i| {
            let name = MeasureName::ALL[i];
            let (lo, hi) = name.bounds();
            MeasureEntry {
                name,
                estimate: raw[i].clamp(lo, hi),
                raw: raw[i],
                ideal: name.ideal(),
                range: name.range(),
                kind: name.kind(),
            }
        });
        Self { entries }
    }

    pub fn entries(&self) -> &[MeasureEntry; N_MEASURES] {
        &self.entries
    }

    pub fn get(&self, name: MeasureName) -> &MeasureEntry {
        &self.entries[name as usize]
    }

    /// Mean of the three clamped Hurst estimates.
    pub fn mean_h(&self) -> f64 {
        self.mean_where(MeasureName::is_hurst)
    }

    /// Mean of the four clamped fractal-dimension estimates.
    pub fn mean_d(&self) -> f64 {
        self.mean_where(MeasureName::is_fractal)
    }

    fn mean_where(&self, pred: fn(MeasureName) -> bool) -> f64 {
        let sel: Vec<f64> = self
            .entries
            .iter()
            .filter(|e| pred(e.name))
            .map(|e| e.estimate)
            .collect();
        sel.iter().sum::<f64>() / sel.len() as f64
    }
}

/// `sqrt(sum_i ((M_i - M_i*) / R_i)^2)` over the clamped estimates.
pub fn efficiency_index(vector: &MeasureVector) -> f64 {
    squared_terms(vector).iter().sum::<f64>().sqrt()
}

fn squared_terms(vector: &MeasureVector) -> [f64; N_MEASURES] {
    vector.entries.map(|e| e.normalized_deviation().powi(2))
}

/// Shares of the squared index due to local (fractal) and global
/// (memory) inefficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shares {
    pub local: f64,
    pub global: f64,
}

/// Splits the squared index into local and global parts. `None` when the
/// index is zero (a fully efficient market has no inefficiency to split).
pub fn decompose(vector: &MeasureVector) -> Option<Shares> {
    let terms = squared_terms(vector);
    let total: f64 = terms.iter().sum();
    if total == 0.0 {
        return None;
    }
    let local: f64 = vector
        .entries
        .iter()
        .zip(terms)
        .filter(|(e, _)| e.kind == MeasureKind::Local)
        .map(|(_, t)| t)
        .sum();
    let local = local / total;
    Some(Shares {
        local,
        global: 1.0 - local,
    })
}

/// Every estimate behind a measure vector, kept for audit and export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub dfa: HurstEstimate,
    pub dma: HurstEstimate,
    pub hhca: HurstEstimate,
    pub periodogram: FractalEstimate,
    pub wavelet: FractalEstimate,
    pub genton: FractalEstimate,
    pub hall_wood: FractalEstimate,
    pub rho1: f64,
}

impl Components {
    pub fn measure_vector(&self) -> MeasureVector {
        MeasureVector::from_raw([
            self.dfa.h_raw,
            self.dma.h_raw,
            self.hhca.h_raw,
            self.periodogram.d_raw,
            self.wavelet.d_raw,
            self.genton.d_raw,
            self.hall_wood.d_raw,
            self.rho1,
        ])
    }
}

/// Runs all eight estimators. Failures are tagged with the failing measure.
pub fn components(returns: &ReturnSeries, cfg: &AnalysisConfig) -> Result<Components> {
    let tag = |m: MeasureName| move |e: Error| e.in_method(m.as_str());
    let path = profile(returns)?;
    if path.values().iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateInput("constant returns".into()));
    }
    let path = path.values();
    let dfa = dfa_combined(returns, &cfg.dfa).map_err(tag(MeasureName::HDfa))?;
    let dma = dma(returns, &cfg.dma).map_err(tag(MeasureName::HDma))?;
    let hhca = hhca(returns, &cfg.hhca).map_err(tag(MeasureName::HHhca))?;
    Ok(Components {
        dfa,
        dma,
        hhca,
        periodogram: fd_periodogram(path, &cfg.periodogram).map_err(tag(MeasureName::DPeriodogram))?,
        wavelet: fd_wavelet(path, &cfg.wavelet).map_err(tag(MeasureName::DWavelet))?,
        genton: fd_genton(path).map_err(tag(MeasureName::DGenton))?,
        hall_wood: fd_hall_wood(path).map_err(tag(MeasureName::DHallWood))?,
        rho1: acf1(returns).map_err(tag(MeasureName::Rho1))?.rho1,
    })
}

pub fn measure_vector(returns: &ReturnSeries, cfg: &AnalysisConfig) -> Result<MeasureVector> {
    Ok(components(returns, cfg)?.measure_vector())
}

/// Full per-ticker result.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub ticker: String,
    /// Number of returns.
    pub t: usize,
    pub ei: f64,
    /// `None` when `ei == 0`.
    pub shares: Option<Shares>,
    pub vector: MeasureVector,
    pub components: Components,
    pub stats: DescriptiveStats,
    pub kpss: KpssResult,
}

impl EfficiencyReport {
    pub fn mean_h(&self) -> f64 {
        self.vector.mean_h()
    }

    pub fn mean_d(&self) -> f64 {
        self.vector.mean_d()
    }
}

/// Computes every estimate, the index, its decomposition and the diagnostics.
pub fn analyze(returns: &ReturnSeries, cfg: &AnalysisConfig) -> Result<EfficiencyReport> {
    cfg.validate()?;
    let components = components(returns, cfg)?;
    let vector = components.measure_vector();
    Ok(EfficiencyReport {
        ticker: returns.ticker().to_string(),
        t: returns.len(),
        ei: efficiency_index(&vector),
        shares: decompose(&vector),
        stats: descriptive_stats(returns)?,
        kpss: kpss(returns, &cfg.kpss)?,
        vector,
        components,
    })
}

/// Most efficient first; equal indices ordered by ticker.
pub fn rank(reports: &[EfficiencyReport]) -> Vec<&EfficiencyReport> {
    let mut out: Vec<&EfficiencyReport> = reports.iter().collect();
    out.sort_by(|a, b| cmp_rank(a.ei, &a.ticker, b.ei, &b.ticker));
    out
}

pub(crate) fn cmp_rank(ei_a: f64, ticker_a: &str, ei_b: f64, ticker_b: &str) -> Ordering {
    ei_a.total_cmp(&ei_b).then_with(|| ticker_a.cmp(ticker_b))
}

/// Cross-sectional OLS of mean `D` on mean `H` over `(mean_h, mean_d)` pairs.
pub fn dh_fit(pairs: &[(f64, f64)]) -> Result<LineFit> {
    if pairs.len() < 3 {
        return Err(Error::RegressionUndefined(format!(
            "need at least 3 tickers, got {}",
            pairs.len()
        )));
    }
    let (h, d): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    ols(&h, &d)
}

/// Cross-sectional D-H relation across reports.
pub fn dh_regression(reports: &[EfficiencyReport]) -> Result<LineFit> {
    let pairs: Vec<(f64, f64)> = reports.iter().map(|r| (r.mean_h(), r.mean_d())).collect();
    dh_fit(&pairs)
}
