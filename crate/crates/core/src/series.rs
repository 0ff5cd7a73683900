//! Price ingestion, log returns, profiles and descriptive statistics.
//!
//! Closes are read from a two-column CSV (`date`, `close`), sorted by date and
//! validated. Returns are taken over consecutive available closes; calendar
//! gaps (weekends, holidays) are not filled.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard lower bound on the number of returns accepted for analysis.
pub const MIN_RETURNS: usize = 25;

/// Below this many returns the estimators run but results are unreliable.
pub const RECOMMENDED_RETURNS: usize = 100;

/// Dated closing prices for a single ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    ticker: String,
    observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    /// Validates and sorts the observations. Dates must be unique and closes
    /// finite and strictly positive.
    pub fn new(ticker: impl Into<String>, mut observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(Error::InsufficientData {
                what: "price series",
                needed: 2,
                got: observations.len(),
            });
        }
        for (date, close) in &observations {
            if !close.is_finite() || *close <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "close on {date} must be a positive finite number, got {close}"
                )));
            }
        }
        observations.sort_by_key(|(d, _)| *d);
        if let Some(w) = observations.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput(format!("duplicate date {}", w[0].0)));
        }
        Ok(Self {
            ticker: ticker.into(),
            observations,
        })
    }

    /// Reads the ingestion CSV format: a header row with `date` and `close`
    /// columns, ISO dates, rows in any order.
    pub fn from_csv_reader<R: Read>(ticker: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Csv {
            row: 1,
            message: e.to_string(),
        })?;
        let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
        let (Some(date_col), Some(close_col)) = (col("date"), col("close")) else {
            return Err(Error::Csv {
                row: 1,
                message: "header must contain `date` and `close` columns".into(),
            });
        };

        let mut observations = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            // header is line 1
            let row = i + 2;
            let record = record.map_err(|e| Error::Csv {
                row,
                message: e.to_string(),
            })?;
            let field = |c: usize| record.get(c).unwrap_or("");
            let date = NaiveDate::parse_from_str(field(date_col), "%Y-%m-%d").map_err(|e| Error::Csv {
                row,
                message: format!("bad date {:?}: {e}", field(date_col)),
            })?;
            let close: f64 = field(close_col).parse().map_err(|_| Error::Csv {
                row,
                message: format!("bad close {:?}", field(close_col)),
            })?;
            if !close.is_finite() || close <= 0.0 {
                return Err(Error::Csv {
                    row,
                    message: format!("close must be positive, got {close}"),
                });
            }
            observations.push((date, close));
        }
        Self::new(ticker, observations)
    }

    /// Loads a CSV file; the ticker is the file stem.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let ticker = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("unknown")
            .to_string();
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(ticker, std::io::BufReader::new(file))
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn closes(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|(_, c)| *c)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Logarithmic close/close returns of one ticker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    ticker: String,
    values: Vec<f64>,
}

impl ReturnSeries {
    /// Wraps an arbitrary real sequence. Every value must be finite.
    pub fn new(ticker: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            ticker: ticker.into(),
            values,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `x -> scale * x + shift` to every value.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(
            self.ticker.clone(),
            self.values.iter().map(|x| scale * x + shift).collect(),
        )
    }
}

/// `ln(close[t+1]) - ln(close[t])` for consecutive closes.
pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    let closes: Vec<f64> = prices.closes().collect();
    ReturnSeries::from_closes(prices.ticker(), &closes)
}

impl ReturnSeries {
    /// Log returns of an undated close sequence (already in time order).
    pub fn from_closes(ticker: impl Into<String>, closes: &[f64]) -> Result<Self> {
        if closes.len() < 2 {
            return Err(Error::InsufficientData {
                what: "log returns",
                needed: 2,
                got: closes.len(),
            });
        }
        let logs: Vec<f64> = closes
            .iter()
            .map(|&c| {
                if c > 0.0 && c.is_finite() {
                    Ok(c.ln())
                } else {
                    Err(Error::InvalidInput(format!("non-positive close {c}")))
                }
            })
            .collect::<Result<_>>()?;
        Self::new(ticker, logs.windows(2).map(|w| w[1] - w[0]).collect())
    }
}

/// Cumulative sum of the demeaned series (the integrated path).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for Profile {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub fn profile(returns: &ReturnSeries) -> Result<Profile> {
    profile_of(returns.values()).map(|values| Profile { values })
}

pub(crate) fn profile_of(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            what: "profile",
            needed: 2,
            got: x.len(),
        });
    }
    let mean = mean(x);
    let mut acc = 0.0;
    Ok(x.iter()
        .map(|v| {
            acc += v - mean;
            acc
        })
        .collect())
}

/// Mean accumulated around the first element, so a constant series has an
/// exactly representable mean.
pub(crate) fn mean(x: &[f64]) -> f64 {
    let pivot = x[0];
    pivot + x.iter().map(|v| v - pivot).sum::<f64>() / x.len() as f64
}

/// Sample moments of a return series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Standard deviation with denominator `T - 1`.
    pub sd: f64,
    /// `m3 / m2^1.5`; `None` for a constant series.
    pub skewness: Option<f64>,
    /// `m4 / m2^2 - 3`; `None` for a constant series.
    pub excess_kurtosis: Option<f64>,
}

pub fn descriptive_stats(returns: &ReturnSeries) -> Result<DescriptiveStats> {
    let x = returns.values();
    let n = x.len();
    if n < 4 {
        return Err(Error::InsufficientData {
            what: "descriptive statistics",
            needed: 4,
            got: n,
        });
    }
    let mean = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let nf = n as f64;
    let sd = (m2 / (nf - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    } else {
        (None, None)
    };
    Ok(DescriptiveStats {
        mean,
        min: x.iter().copied().fold(f64::INFINITY, f64::min),
        max: x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        sd,
        skewness,
        excess_kurtosis,
    })
}
