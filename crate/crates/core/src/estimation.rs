//! Splitting published cost figures into fixed and per-turbine components.
//!
//! Two routes are provided: a line through two observations at different
//! array sizes, and a single observation combined with an assumed ratio of
//! fixed to turbine-dependent cost. Turbine counts may be fractional here
//! because they are usually derived as capacity divided by turbine rating.

use serde::{Deserialize, Serialize};

use crate::error::{EconError, Flagged, Result, Warning};

/// Recommended window for the fixed-to-turbine cost ratio, taken from
/// offshore wind farms 5–15 km from shore.
pub const RATIO_WINDOW: (f64, f64) = (2.3, 3.9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostBasis {
    Total,
    PerMw,
}

/// A published cost figure for an array of a given size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostObservation {
    pub turbines: f64,
    /// £m (CAPEX) or £m/yr (OPEX), in the source currency.
    pub cost: f64,
    pub basis: CostBasis,
    /// Array capacity in MW; required for [`CostBasis::PerMw`].
    pub capacity_mw: Option<f64>,
    /// Multiplier from the source currency to pounds.
    pub currency_rate: f64,
}

impl CostObservation {
    pub fn total(turbines: f64, cost: f64) -> Self {
        Self {
            turbines,
            cost,
            basis: CostBasis::Total,
            capacity_mw: None,
            currency_rate: 1.0,
        }
    }

    /// Per-MW figure for an array of `capacity_mw` built from `rating_mw` turbines.
    pub fn per_mw(capacity_mw: f64, rating_mw: f64, cost_per_mw: f64) -> Self {
        Self {
            turbines: capacity_mw / rating_mw,
            cost: cost_per_mw,
            basis: CostBasis::PerMw,
            capacity_mw: Some(capacity_mw),
            currency_rate: 1.0,
        }
    }

    pub fn with_rate(self, currency_rate: f64) -> Self {
        Self {
            currency_rate,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.turbines.is_finite() && self.turbines > 0.0) {
            return Err(EconError::InvalidInput(format!(
                "observation turbine count must be positive, got {}",
                self.turbines
            )));
        }
        if !(self.cost.is_finite() && self.cost >= 0.0) {
            return Err(EconError::InvalidInput(format!(
                "observation cost must be non-negative, got {}",
                self.cost
            )));
        }
        if !(self.currency_rate.is_finite() && self.currency_rate > 0.0) {
            return Err(EconError::InvalidInput(format!(
                "currency rate must be positive, got {}",
                self.currency_rate
            )));
        }
        Ok(())
    }
}

/// Fixed cost divided by per-turbine cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedToTurbineRatio(f64);

impl FixedToTurbineRatio {
    /// Values outside [`RATIO_WINDOW`] are accepted with a warning.
    pub fn new(ratio: f64) -> Result<Flagged<Self>> {
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(EconError::InvalidInput(format!(
                "fixed-to-turbine ratio must be non-negative, got {ratio}"
            )));
        }
        let mut out = Flagged::clean(Self(ratio));
        let (lo, hi) = RATIO_WINDOW;
        if ratio < lo || ratio > hi {
            out.warnings
                .push(Warning::RatioOutsideWindow { ratio, lo, hi });
        }
        Ok(out)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Fixed and per-turbine parts of one cost line (CAPEX or OPEX).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSplit {
    pub fixed: f64,
    pub per_turbine: f64,
}

impl CostSplit {
    pub fn total_at(&self, turbines: f64) -> f64 {
        self.fixed + self.per_turbine * turbines
    }
}

/// Total cost in pounds (millions) at the observation's turbine count.
pub fn normalize_observation(obs: &CostObservation) -> Result<f64> {
    obs.validate()?;
    let native = match obs.basis {
        CostBasis::Total => obs.cost,
        CostBasis::PerMw => {
            let capacity = obs.capacity_mw.ok_or_else(|| {
                EconError::InvalidInput("per-MW observation is missing its capacity".into())
            })?;
            if !(capacity.is_finite() && capacity > 0.0) {
                return Err(EconError::InvalidInput(format!(
                    "capacity must be positive, got {capacity}"
                )));
            }
            obs.cost * capacity
        }
    };
    Ok(native * obs.currency_rate)
}

/// Line through two observations: slope is the per-turbine cost, intercept the
/// fixed cost. A negative intercept is returned as-is with a warning.
pub fn split_two_points(a: &CostObservation, b: &CostObservation) -> Result<Flagged<CostSplit>> {
    let (ya, yb) = (normalize_observation(a)?, normalize_observation(b)?);
    if a.turbines == b.turbines {
        return Err(EconError::Degenerate(format!(
            "both observations are at {} turbines",
            a.turbines
        )));
    }
    let per_turbine = (yb - ya) / (b.turbines - a.turbines);
    let fixed = ya - per_turbine * a.turbines;
    let mut out = Flagged::clean(CostSplit { fixed, per_turbine });
    if fixed < 0.0 {
        out.warnings.push(Warning::NegativeFixedComponent { fixed });
    }
    Ok(out)
}

/// Splits one observation using a known fixed-to-turbine ratio.
pub fn split_from_ratio(obs: &CostObservation, ratio: FixedToTurbineRatio) -> Result<CostSplit> {
    let total = normalize_observation(obs)?;
    let denom = ratio.0 + obs.turbines;
    if denom == 0.0 {
        return Err(EconError::ZeroDenominator("ratio + turbine count"));
    }
    let per_turbine = total / denom;
    Ok(CostSplit {
        fixed: ratio.0 * per_turbine,
        per_turbine,
    })
}

/// Experience-curve adjustment: each doubling of installed capacity scales
/// cost by `1 - learning_rate`.
pub fn learning_rate_adjust(
    cost: f64,
    learning_rate: f64,
    installed_from_mw: f64,
    installed_to_mw: f64,
) -> Result<f64> {
    if !(installed_from_mw > 0.0 && installed_to_mw > 0.0)
        || !installed_from_mw.is_finite()
        || !installed_to_mw.is_finite()
    {
        return Err(EconError::InvalidInput(
            "installed capacities must be positive".into(),
        ));
    }
    if !(0.0..1.0).contains(&learning_rate) {
        return Err(EconError::InvalidInput(format!(
            "learning rate must lie in [0, 1), got {learning_rate}"
        )));
    }
    let doublings = (installed_to_mw / installed_from_mw).log2();
    Ok(cost * (1.0 - learning_rate).powf(doublings))
}

/// Least-squares line through `(turbines, total £m)` points; the ratio is
/// intercept over slope.
pub fn fit_higgins_ratio(points: &[(f64, f64)]) -> Result<FixedToTurbineRatio> {
    if points.len() < 2 {
        return Err(EconError::Degenerate(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(EconError::Degenerate(
            "all points share one turbine count".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    if slope <= 0.0 {
        return Err(EconError::Degenerate(format!("non-positive slope {slope}")));
    }
    let intercept = mean_y - slope * mean_x;
    if intercept < 0.0 {
        return Err(EconError::Degenerate(format!(
            "negative intercept {intercept}; no valid ratio"
        )));
    }
    Ok(FixedToTurbineRatio(intercept / slope))
}
