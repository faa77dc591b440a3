//! Project configuration file and cost estimation directives.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tidal_econ::estimation::{split_from_ratio, split_two_points};
use tidal_econ::{
    ArrayDesign, Availability, BreakEvenSpec, CostObservation, CostParameters, DiscountMode,
    DiscountSpec, FixedToTurbineRatio, TariffScheme,
};

use crate::error::{CliError, CliResult};
use crate::tables::read_observations;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub design: DesignBlock,
    pub costs: CostSource,
    pub finance: FinanceBlock,
    #[serde(default)]
    pub scenario: ScenarioBlock,
    #[serde(default)]
    pub break_even: Option<BreakEvenSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    pub turbines: u32,
    pub rating_mw: f64,
    pub p_avg_mw: f64,
    pub availability: Availability,
    #[serde(default = "unity")]
    pub electrical_efficiency: f64,
    pub lifetime_years: u32,
}

fn unity() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CostSource {
    Explicit(CostParameters),
    Estimate(EstimateDirective),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimateDirective {
    TwoPoints {
        capex: ObservationSource,
        opex: ObservationSource,
    },
    Ratio {
        ratio: f64,
        capex: ObservationSource,
        opex: ObservationSource,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ObservationSource {
    File { csv: PathBuf },
    Inline(Vec<ObservationRecord>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ObservationRecord {
    Total {
        n_t: f64,
        total_gbp_m: f64,
        #[serde(default = "unity")]
        rate_to_gbp: f64,
    },
    PerMw {
        capacity_mw: f64,
        per_mw_gbp_m: f64,
        #[serde(default = "unity")]
        rate_to_gbp: f64,
    },
}

impl ObservationRecord {
    pub fn to_observation(self, rating_mw: Option<f64>) -> CliResult<CostObservation> {
        match self {
            ObservationRecord::Total {
                n_t,
                total_gbp_m,
                rate_to_gbp,
            } => Ok(CostObservation::total(n_t, total_gbp_m).with_rate(rate_to_gbp)),
            ObservationRecord::PerMw {
                capacity_mw,
                per_mw_gbp_m,
                rate_to_gbp,
            } => {
                let rating = rating_mw
                    .ok_or_else(|| CliError::input("per-MW observations need a turbine rating"))?;
                Ok(CostObservation::per_mw(capacity_mw, rating, per_mw_gbp_m)
                    .with_rate(rate_to_gbp))
            }
        }
    }
}

impl ObservationSource {
    fn load(&self, base_dir: &Path, rating_mw: f64) -> CliResult<Vec<CostObservation>> {
        match self {
            ObservationSource::File { csv } => {
                read_observations(&base_dir.join(csv), Some(rating_mw))
            }
            ObservationSource::Inline(records) => records
                .iter()
                .map(|r| r.to_observation(Some(rating_mw)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinanceBlock {
    #[serde(default)]
    pub mode: ModeName,
    pub rate: f64,
    #[serde(default = "one_period")]
    pub periods_per_year: u32,
    pub tariff_gbp_per_mwh: f64,
}

fn one_period() -> u32 {
    1
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TwoPoints,
    Ratio,
}

/// Cost parameters recovered from observations, with the inputs echoed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub capex_observations: Vec<CostObservation>,
    pub opex_observations: Vec<CostObservation>,
    pub cost_parameters: CostParameters,
    pub warnings: Vec<String>,
}

fn expect_count(what: &str, obs: &[CostObservation], n: usize) -> CliResult<()> {
    if obs.len() != n {
        return Err(CliError::input(format!(
            "{what} needs exactly {n} observation(s), got {}",
            obs.len()
        )));
    }
    Ok(())
}

pub fn estimate_two_points(
    capex: Vec<CostObservation>,
    opex: Vec<CostObservation>,
) -> CliResult<Estimate> {
    expect_count("CAPEX two-point split", &capex, 2)?;
    expect_count("OPEX two-point split", &opex, 2)?;
    let c = split_two_points(&capex[0], &capex[1])?;
    let o = split_two_points(&opex[0], &opex[1])?;
    let mut warnings: Vec<String> = c.warnings.iter().map(|w| format!("CAPEX: {w}")).collect();
    warnings.extend(o.warnings.iter().map(|w| format!("OPEX: {w}")));
    Ok(Estimate {
        method: Method::TwoPoints,
        ratio: None,
        cost_parameters: CostParameters {
            ca_f: c.value.fixed,
            ca_t: c.value.per_turbine,
            o_f: o.value.fixed,
            o_t: o.value.per_turbine,
        },
        capex_observations: capex,
        opex_observations: opex,
        warnings,
    })
}

pub fn estimate_ratio(
    ratio: f64,
    capex: Vec<CostObservation>,
    opex: Vec<CostObservation>,
) -> CliResult<Estimate> {
    expect_count("CAPEX ratio split", &capex, 1)?;
    expect_count("OPEX ratio split", &opex, 1)?;
    let r = FixedToTurbineRatio::new(ratio)?;
    let c = split_from_ratio(&capex[0], r.value)?;
    let o = split_from_ratio(&opex[0], r.value)?;
    Ok(Estimate {
        method: Method::Ratio,
        ratio: Some(ratio),
        cost_parameters: CostParameters {
            ca_f: c.fixed,
            ca_t: c.per_turbine,
            o_f: o.fixed,
            o_t: o.per_turbine,
        },
        capex_observations: capex,
        opex_observations: opex,
        warnings: r.warnings.iter().map(ToString::to_string).collect(),
    })
}

/// A configuration with every file read and every block validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub design: ArrayDesign,
    pub costs: CostParameters,
    pub estimate: Option<Estimate>,
    pub spec: DiscountSpec,
    pub tariff: TariffScheme,
    pub overrides: BTreeMap<String, f64>,
    pub break_even: Option<BreakEvenSpec>,
}

impl Resolved {
    pub fn warnings(&self) -> Vec<String> {
        self.estimate
            .as_ref()
            .map(|e| e.warnings.clone())
            .unwrap_or_default()
    }
}

pub fn parse(text: &str) -> CliResult<ProjectConfig> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))
}

pub fn load(path: &Path) -> CliResult<Resolved> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve(cfg, base)
}

/// Validates `cfg`; relative CSV paths are taken from `base_dir`.
pub fn resolve(cfg: ProjectConfig, base_dir: &Path) -> CliResult<Resolved> {
    let d = cfg.design;
    let design = ArrayDesign {
        turbines: d.turbines,
        rating_mw: d.rating_mw,
        p_avg_mw: d.p_avg_mw,
        availability: d.availability,
        electrical_efficiency: d.electrical_efficiency,
        lifetime_years: d.lifetime_years,
    };
    design.validate()?;

    let (costs, estimate) = match cfg.costs {
        CostSource::Explicit(p) => (p, None),
        CostSource::Estimate(directive) => {
            let est = match directive {
                EstimateDirective::TwoPoints { capex, opex } => estimate_two_points(
                    capex.load(base_dir, design.rating_mw)?,
                    opex.load(base_dir, design.rating_mw)?,
                )?,
                EstimateDirective::Ratio { ratio, capex, opex } => estimate_ratio(
                    ratio,
                    capex.load(base_dir, design.rating_mw)?,
                    opex.load(base_dir, design.rating_mw)?,
                )?,
            };
            (est.cost_parameters, Some(est))
        }
    };
    costs.validate()?;

    let f = cfg.finance;
    let mode = match f.mode {
        ModeName::Discrete => DiscountMode::Discrete {
            periods_per_year: f.periods_per_year,
        },
        ModeName::Continuous => DiscountMode::Continuous,
    };
    let spec = DiscountSpec { mode, rate: f.rate };
    spec.validate()?;
    let tariff = TariffScheme::new(f.tariff_gbp_per_mwh)?;
    let break_even = match cfg.break_even {
        Some(b) => Some(BreakEvenSpec::new(b.p_be_mw, b.ev)?),
        None => None,
    };

    Ok(Resolved {
        design,
        costs,
        estimate,
        spec,
        tariff,
        overrides: cfg.scenario.overrides,
        break_even,
    })
}
