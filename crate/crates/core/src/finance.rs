//! Time-value-of-money primitives.
//!
//! All amounts are in millions of pounds; years are counted from the start of
//! construction (year 0).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{EconError, Result};

/// How a discount rate is compounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum DiscountMode {
    /// `periods_per_year` compounding steps per year (1 = annual, 4 = quarterly).
    Discrete {
        periods_per_year: u32,
    },
    Continuous,
}

impl Default for DiscountMode {
    fn default() -> Self {
        DiscountMode::Discrete {
            periods_per_year: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountSpec {
    pub mode: DiscountMode,
    /// Annual rate as a fraction.
    pub rate: f64,
}

impl DiscountSpec {
    /// Annual discrete compounding at `rate`.
    pub fn annual(rate: f64) -> Self {
        Self {
            mode: DiscountMode::default(),
            rate,
        }
    }

    pub fn discrete(rate: f64, periods_per_year: u32) -> Self {
        Self {
            mode: DiscountMode::Discrete { periods_per_year },
            rate,
        }
    }

    pub fn continuous(rate: f64) -> Self {
        Self {
            mode: DiscountMode::Continuous,
            rate,
        }
    }

    pub fn with_rate(self, rate: f64) -> Self {
        Self { rate, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rate.is_finite() || self.rate <= -1.0 {
            return Err(EconError::RateOutOfRange(self.rate));
        }
        if let DiscountMode::Discrete { periods_per_year } = self.mode {
            if periods_per_year == 0 {
                return Err(EconError::InvalidInput(
                    "periods_per_year must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Multiplier converting an amount `years` into the future to present value.
///
/// Fractional `years` are accepted.
pub fn discount_factor(spec: &DiscountSpec, years: f64) -> Result<f64> {
    spec.validate()?;
    if years.is_nan() || years < 0.0 {
        return Err(EconError::NegativeTime(years));
    }
    Ok(raw_factor(spec, years))
}

// Callers must have validated `spec` and `years`.
pub(crate) fn raw_factor(spec: &DiscountSpec, years: f64) -> f64 {
    match spec.mode {
        DiscountMode::Discrete { periods_per_year } => {
            let p = f64::from(periods_per_year);
            (1.0 + spec.rate / p).powf(-p * years)
        }
        DiscountMode::Continuous => (-spec.rate * years).exp(),
    }
}

/// Net flows per year over `[0, horizon]`. Years without an entry carry zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CashFlowSchedule {
    horizon: u32,
    flows: BTreeMap<u32, f64>,
}

impl CashFlowSchedule {
    pub fn new(horizon: u32) -> Self {
        Self {
            horizon,
            flows: BTreeMap::new(),
        }
    }

    /// Builds a schedule from `(year, amount)` pairs. Duplicate or
    /// out-of-horizon years are rejected.
    pub fn from_pairs<I>(horizon: u32, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, f64)>,
    {
        let mut schedule = Self::new(horizon);
        for (year, amount) in pairs {
            if schedule.flows.contains_key(&year) {
                return Err(EconError::InvalidInput(format!(
                    "duplicate cash flow for year {year}"
                )));
            }
            schedule.set(year, amount)?;
        }
        Ok(schedule)
    }

    /// One entry per year starting at year 0; horizon is `len - 1`.
    pub fn from_dense(flows: &[f64]) -> Result<Self> {
        if flows.is_empty() {
            return Ok(Self::new(0));
        }
        let horizon = u32::try_from(flows.len() - 1)
            .map_err(|_| EconError::InvalidInput("schedule too long".into()))?;
        Self::from_pairs(
            horizon,
            flows.iter().enumerate().map(|(i, &v)| (i as u32, v)),
        )
    }

    pub fn set(&mut self, year: u32, amount: f64) -> Result<()> {
        if year > self.horizon {
            return Err(EconError::InvalidInput(format!(
                "year {year} beyond horizon {}",
                self.horizon
            )));
        }
        if !amount.is_finite() {
            return Err(EconError::InvalidInput(format!(
                "non-finite cash flow in year {year}"
            )));
        }
        self.flows.insert(year, amount);
        Ok(())
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn flow(&self, year: u32) -> f64 {
        self.flows.get(&year).copied().unwrap_or(0.0)
    }

    /// Number of explicitly stored years.
    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    /// Every year in `[0, horizon]`, zero-filled.
    pub fn dense(&self) -> Vec<f64> {
        (0..=self.horizon).map(|y| self.flow(y)).collect()
    }

    /// Explicitly stored `(year, amount)` pairs in year order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.flows.iter().map(|(&y, &v)| (y, v))
    }

    /// Year-wise sum; the result spans the longer horizon.
    pub fn combine(&self, other: &Self) -> Self {
        let mut out = Self::new(self.horizon.max(other.horizon));
        for (y, v) in self.entries().chain(other.entries()) {
            *out.flows.entry(y).or_insert(0.0) += v;
        }
        out
    }

    pub fn undiscounted_sum(&self) -> f64 {
        self.flows.values().sum()
    }

    pub fn has_sign_change(&self) -> bool {
        let pos = self.flows.values().any(|&v| v > 0.0);
        let neg = self.flows.values().any(|&v| v < 0.0);
        pos && neg
    }
}

/// Sum of every flow multiplied by its discount factor.
pub fn present_value(schedule: &CashFlowSchedule, spec: &DiscountSpec) -> Result<f64> {
    spec.validate()?;
    Ok(schedule
        .entries()
        .map(|(year, amount)| amount * raw_factor(spec, f64::from(year)))
        .sum())
}

/// Discounted running total through each year `0..=horizon`.
pub fn cumulative_present_value(
    schedule: &CashFlowSchedule,
    spec: &DiscountSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut running = 0.0;
    Ok((0..=schedule.horizon())
        .map(|year| {
            running += schedule.flow(year) * raw_factor(spec, f64::from(year));
            running
        })
        .collect())
}
