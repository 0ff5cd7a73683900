//! Estimator parameters. Defaults reproduce the published settings where
//! they are stated (DFA scale bounds, DMA window grid, HHCA jackknife range).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaConfig {
    /// Smallest box size.
    pub s_min: usize,
    /// Largest box size is `floor(T / s_max_divisor)`.
    pub s_max_divisor: usize,
    /// Number of log-spaced scales before integer rounding and dedup.
    pub n_scales: usize,
}

impl Default for DfaConfig {
    fn default() -> Self {
        Self {
            s_min: 5,
            s_max_divisor: 5,
            n_scales: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmaConfig {
    pub lambda_min: usize,
    pub lambda_max: usize,
    pub lambda_step: usize,
}

impl Default for DmaConfig {
    fn default() -> Self {
        Self {
            lambda_min: 3,
            lambda_max: 21,
            lambda_step: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhcaConfig {
    /// Jackknife range: one sub-estimate per `tau_max` in `tau_max_lo..=tau_max_hi`.
    pub tau_max_lo: usize,
    pub tau_max_hi: usize,
}

impl Default for HhcaConfig {
    fn default() -> Self {
        Self {
            tau_max_lo: 5,
            tau_max_hi: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodogramConfig {
    /// Frequencies `j = 1..=floor(T^exponent)` enter the fit.
    pub exponent: f64,
}

impl Default for PeriodogramConfig {
    fn default() -> Self {
        Self { exponent: 2.0 / 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletConfig {
    /// Levels `1..=floor(log2 T) - level_offset` are decomposed.
    pub level_offset: usize,
    /// Levels with fewer detail coefficients are left out of the fit.
    pub min_coeffs: usize,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self {
            level_offset: 3,
            min_coeffs: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KpssConfig {
    /// Bartlett lag count; `None` uses `floor(4 (T/100)^(1/4))`.
    pub bandwidth: Option<usize>,
}

/// Parameters for the full eight-measure analysis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub dfa: DfaConfig,
    pub dma: DmaConfig,
    pub hhca: HhcaConfig,
    pub periodogram: PeriodogramConfig,
    pub wavelet: WaveletConfig,
    pub kpss: KpssConfig,
}

impl AnalysisConfig {
    /// Checks every parameter against its legal range.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Parameter(msg.to_string()));
        if self.dfa.s_min < 3 {
            return bad("dfa s_min must be at least 3");
        }
        if self.dfa.s_max_divisor < 2 {
            return bad("dfa s_max_divisor must be at least 2");
        }
        if self.dfa.n_scales < 5 {
            return bad("dfa n_scales must be at least 5");
        }
        let dma = &self.dma;
        if dma.lambda_min < 3
            || dma.lambda_min.is_multiple_of(2)
            || dma.lambda_step == 0
            || !dma.lambda_step.is_multiple_of(2)
        {
            return bad("dma windows must be odd, at least 3, with an even step");
        }
        if (dma.lambda_max - dma.lambda_min.min(dma.lambda_max)) / dma.lambda_step < 2 {
            return bad("dma window grid needs at least 3 windows");
        }
        if self.hhca.tau_max_lo < 3 || self.hhca.tau_max_hi < self.hhca.tau_max_lo {
            return bad("hhca tau_max range must satisfy 3 <= lo <= hi");
        }
        if !(self.periodogram.exponent > 0.0 && self.periodogram.exponent < 1.0) {
            return bad("periodogram exponent must lie in (0, 1)");
        }
        if self.wavelet.min_coeffs < 2 {
            return bad("wavelet min_coeffs must be at least 2");
        }
        if self.kpss.bandwidth == Some(0) {
            return bad("kpss bandwidth must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AnalysisConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_even_dma_window() {
        let mut c = AnalysisConfig::default();
        c.dma.lambda_min = 4;
        assert!(c.validate().is_err());
    }
}
