//! Capital-market efficiency from long-range dependence, roughness and
//! short-range dependence.
//!
//! Eight bounded estimates (three Hurst exponents, four fractal dimensions,
//! the lag-one autocorrelation) are normalized into a unit cube and combined
//! into the efficiency index, the Euclidean distance from the efficient-market
//! centre point.
//!
//! ```
//! use effidx::{analyze, AnalysisConfig, synth::{generate_fgn, SynthSpec}};
//!
//! let returns = generate_fgn(&SynthSpec::fgn(0.5, 4096, 7)).unwrap();
//! let report = analyze(&returns, &AnalysisConfig::default()).unwrap();
//! assert!(report.ei < 0.2);
//! ```

pub mod cli;
pub mod config;
pub mod efficiency;
pub mod error;
pub mod fractal;
pub mod hurst;
pub mod report;
pub mod scaling;
pub mod series;
pub mod stats;
pub mod synth;

pub use config::AnalysisConfig;
pub use efficiency::{
    analyze, decompose, dh_regression, efficiency_index, measure_vector, rank, EfficiencyReport, MeasureName,
    MeasureVector,
};
pub use error::{Error, Result};
pub use series::{log_returns, PriceSeries, ReturnSeries};
