//! Physical-to-financial bridge: array size and output to expenditure,
//! energy, revenue and the project cash-flow schedule.
//!
//! CAPEX is incurred in full in year 0; generation, revenue and OPEX run over
//! years `1..=lifetime`. Decommissioning is not modelled.

use serde::{Deserialize, Serialize};

use crate::error::{EconError, Result};
use crate::finance::CashFlowSchedule;

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Pounds per million pounds.
pub const GBP_PER_MILLION: f64 = 1.0e6;

/// Affine cost model: fixed plus per-turbine components for CAPEX and OPEX.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParameters {
    /// Fixed CAPEX, £m.
    pub ca_f: f64,
    /// CAPEX per turbine, £m.
    pub ca_t: f64,
    /// Fixed OPEX, £m per year.
    pub o_f: f64,
    /// OPEX per turbine, £m per year.
    pub o_t: f64,
}

impl CostParameters {
    pub fn new(ca_f: f64, ca_t: f64, o_f: f64, o_t: f64) -> Result<Self> {
        let p = Self {
            ca_f,
            ca_t,
            o_f,
            o_t,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("CA_f", self.ca_f),
            ("CA_t", self.ca_t),
            ("O_f", self.o_f),
            ("O_t", self.o_t),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(EconError::InvalidInput(format!(
                    "{name} must be a non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Fraction of hours a turbine can generate, either flat or per operating year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Availability {
    Constant(f64),
    /// One entry per operating year, index 0 is year 1.
    PerYear(Vec<f64>),
}

impl Availability {
    fn at(&self, year: u32) -> f64 {
        match self {
            Availability::Constant(a) => *a,
            Availability::PerYear(v) => v[(year - 1) as usize],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayDesign {
    pub turbines: u32,
    /// Rated capacity per turbine, MW.
    pub rating_mw: f64,
    /// Average power of the whole array, MW.
    pub p_avg_mw: f64,
    pub availability: Availability,
    /// Net-to-gross electrical efficiency.
    pub electrical_efficiency: f64,
    pub lifetime_years: u32,
}

fn in_unit_interval(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(EconError::InvalidInput(format!(
            "{name} must lie in (0, 1], got {v}"
        )))
    }
}

impl ArrayDesign {
    /// Design with constant availability and lossless export.
    pub fn new(
        turbines: u32,
        rating_mw: f64,
        p_avg_mw: f64,
        availability: f64,
        lifetime_years: u32,
    ) -> Result<Self> {
        let d = Self {
            turbines,
            rating_mw,
            p_avg_mw,
            availability: Availability::Constant(availability),
            electrical_efficiency: 1.0,
            lifetime_years,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.turbines == 0 {
            return Err(EconError::InvalidInput(
                "turbine count must be positive".into(),
            ));
        }
        if !self.rating_mw.is_finite() || self.rating_mw <= 0.0 {
            return Err(EconError::InvalidInput(format!(
                "turbine rating must be positive, got {}",
                self.rating_mw
            )));
        }
        if !self.p_avg_mw.is_finite() || self.p_avg_mw < 0.0 {
            return Err(EconError::InvalidInput(format!(
                "average power must be non-negative, got {}",
                self.p_avg_mw
            )));
        }
        let rated = f64::from(self.turbines) * self.rating_mw;
        if self.p_avg_mw > rated * (1.0 + 1e-12) {
            return Err(EconError::InvalidInput(format!(
                "average power {} MW exceeds rated capacity {} MW",
                self.p_avg_mw, rated
            )));
        }
        if self.lifetime_years == 0 {
            return Err(EconError::InvalidInput(
                "lifetime must be at least 1 year".into(),
            ));
        }
        in_unit_interval("electrical efficiency", self.electrical_efficiency)?;
        match &self.availability {
            Availability::Constant(a) => in_unit_interval("availability", *a)?,
            Availability::PerYear(v) => {
                if v.len() != self.lifetime_years as usize {
                    return Err(EconError::InvalidInput(format!(
                        "availability sequence has {} entries, lifetime is {}",
                        v.len(),
                        self.lifetime_years
                    )));
                }
                for a in v {
                    in_unit_interval("availability", *a)?;
                }
            }
        }
        Ok(())
    }

    pub fn rated_capacity_mw(&self) -> f64 {
        f64::from(self.turbines) * self.rating_mw
    }

    fn check_year(&self, year: u32) -> Result<()> {
        if year == 0 || year > self.lifetime_years {
            Err(EconError::YearOutOfRange {
                year,
                lifetime: self.lifetime_years,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TariffScheme {
    /// Effective fixed tariff, £/MWh.
    pub gbp_per_mwh: f64,
}

impl TariffScheme {
    pub fn new(gbp_per_mwh: f64) -> Result<Self> {
        let t = Self { gbp_per_mwh };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gbp_per_mwh.is_finite() && self.gbp_per_mwh > 0.0 {
            Ok(())
        } else {
            Err(EconError::InvalidInput(format!(
                "tariff must be positive, got {}",
                self.gbp_per_mwh
            )))
        }
    }
}

/// Total CAPEX, £m.
pub fn capex(params: &CostParameters, turbines: u32) -> f64 {
    params.ca_f + params.ca_t * f64::from(turbines)
}

/// Annual OPEX, £m per year.
pub fn opex_year(params: &CostParameters, turbines: u32) -> f64 {
    params.o_f + params.o_t * f64::from(turbines)
}

/// CAPEX per MW of installed capacity, £m/MW.
pub fn capex_per_mw(params: &CostParameters, turbines: u32, rating_mw: f64) -> Result<f64> {
    if turbines == 0 || rating_mw <= 0.0 {
        return Err(EconError::ZeroDenominator("installed capacity"));
    }
    Ok(capex(params, turbines) / (f64::from(turbines) * rating_mw))
}

pub fn hours_generating(design: &ArrayDesign, year: u32) -> Result<f64> {
    design.check_year(year)?;
    Ok(HOURS_PER_YEAR * design.availability.at(year))
}

/// Net energy delivered in `year`, MWh.
pub fn energy_year(design: &ArrayDesign, year: u32) -> Result<f64> {
    Ok(design.p_avg_mw * hours_generating(design, year)? * design.electrical_efficiency)
}

/// Revenue in `year`, £m.
pub fn revenue_year(design: &ArrayDesign, tariff: &TariffScheme, year: u32) -> Result<f64> {
    Ok(energy_year(design, year)? * tariff.gbp_per_mwh / GBP_PER_MILLION)
}

/// Project cash flows with constant OPEX.
pub fn build_schedule(
    design: &ArrayDesign,
    params: &CostParameters,
    tariff: &TariffScheme,
) -> Result<CashFlowSchedule> {
    build_schedule_with_opex_profile(design, params, tariff, None)
}

/// Project cash flows; `opex_profile` scales each operating year's OPEX
/// (index 0 is year 1) to represent maintenance cycles.
pub fn build_schedule_with_opex_profile(
    design: &ArrayDesign,
    params: &CostParameters,
    tariff: &TariffScheme,
    opex_profile: Option<&[f64]>,
) -> Result<CashFlowSchedule> {
    design.validate()?;
    params.validate()?;
    tariff.validate()?;
    let opex = annual_opex(design, params, opex_profile)?;
    let mut schedule = CashFlowSchedule::new(design.lifetime_years);
    schedule.set(0, -capex(params, design.turbines))?;
    for (year, o) in (1..=design.lifetime_years).zip(opex) {
        schedule.set(year, revenue_year(design, tariff, year)? - o)?;
    }
    Ok(schedule)
}

/// OPEX for years `1..=lifetime`, after applying the optional profile.
pub(crate) fn annual_opex(
    design: &ArrayDesign,
    params: &CostParameters,
    opex_profile: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let base = opex_year(params, design.turbines);
    match opex_profile {
        None => Ok(vec![base; design.lifetime_years as usize]),
        Some(m) => {
            if m.len() != design.lifetime_years as usize {
                return Err(EconError::InvalidInput(format!(
                    "OPEX profile has {} entries, lifetime is {}",
                    m.len(),
                    design.lifetime_years
                )));
            }
            if m.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(EconError::InvalidInput(
                    "OPEX multipliers must be non-negative".into(),
                ));
            }
            Ok(m.iter().map(|x| base * x).collect())
        }
    }
}
