//! Built-in parameter ranges and scenario / sensitivity evaluation.
//!
//! The dataset holds the optimistic, typical and pessimistic values of the
//! cost components, discount rate and lifetime collated from published tidal
//! cost studies, extended with strike-price and availability ranges.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost_model::{ArrayDesign, Availability, CostParameters, TariffScheme};
use crate::error::{EconError, Result};
use crate::finance::{DiscountMode, DiscountSpec};
use crate::metrics::{evaluate_all, lcoe, MetricReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterRange {
    pub name: &'static str,
    pub optimistic: f64,
    pub typical: f64,
    pub pessimistic: f64,
    pub units: &'static str,
}

impl ParameterRange {
    pub fn value(&self, column: Column) -> f64 {
        match column {
            Column::Optimistic => self.optimistic,
            Column::Typical => self.typical,
            Column::Pessimistic => self.pessimistic,
        }
    }
}

const BUILTIN: [ParameterRange; 8] = [
    ParameterRange {
        name: "CA_f",
        optimistic: 5.6,
        typical: 9.2,
        pessimistic: 14.4,
        units: "£m",
    },
    ParameterRange {
        name: "CA_t",
        optimistic: 2.4,
        typical: 3.3,
        pessimistic: 4.4,
        units: "£m per turbine",
    },
    ParameterRange {
        name: "O_f",
        optimistic: 0.27,
        typical: 0.32,
        pessimistic: 0.87,
        units: "£m per year",
    },
    ParameterRange {
        name: "O_t",
        optimistic: 0.094,
        typical: 0.15,
        pessimistic: 0.26,
        units: "£m per year per turbine",
    },
    ParameterRange {
        name: "r",
        optimistic: 0.05,
        typical: 0.10,
        pessimistic: 0.15,
        units: "fraction per year",
    },
    ParameterRange {
        name: "L",
        optimistic: 30.0,
        typical: 25.0,
        pessimistic: 20.0,
        units: "years",
    },
    ParameterRange {
        name: "T_e",
        optimistic: 290.0,
        typical: 150.0,
        pessimistic: 40.0,
        units: "£/MWh",
    },
    ParameterRange {
        name: "availability",
        optimistic: 0.98,
        typical: 0.95,
        pessimistic: 0.90,
        units: "fraction",
    },
];

/// Design-level quantities that can be swept but have no built-in range.
const DESIGN_PARAMETERS: [&str; 3] = ["n_t", "P_avg", "C_E"];

pub fn builtin_parameters() -> Vec<ParameterRange> {
    BUILTIN.to_vec()
}

pub fn lookup(name: &str) -> Option<ParameterRange> {
    BUILTIN.iter().copied().find(|p| p.name == name)
}

fn valid_parameter_names() -> String {
    BUILTIN
        .iter()
        .map(|p| p.name)
        .chain(DESIGN_PARAMETERS)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Optimistic,
    Typical,
    Pessimistic,
}

impl Column {
    pub const ALL: [Column; 3] = [Column::Optimistic, Column::Typical, Column::Pessimistic];

    pub fn label(self) -> &'static str {
        match self {
            Column::Optimistic => "optimistic",
            Column::Typical => "typical",
            Column::Pessimistic => "pessimistic",
        }
    }
}

/// Every parameter a scenario binds, resolved to a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParameters {
    pub costs: CostParameters,
    pub rate: f64,
    pub lifetime_years: u32,
    pub tariff_gbp_per_mwh: f64,
    pub availability: f64,
}

impl ScenarioParameters {
    pub fn from_column(column: Column) -> Self {
        let v = |name: &str| lookup(name).expect("built-in parameter").value(column);
        Self {
            costs: CostParameters {
                ca_f: v("CA_f"),
                ca_t: v("CA_t"),
                o_f: v("O_f"),
                o_t: v("O_t"),
            },
            rate: v("r"),
            lifetime_years: v("L") as u32,
            tariff_gbp_per_mwh: v("T_e"),
            availability: v("availability"),
        }
    }

    /// Replaces one built-in parameter by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "CA_f" => self.costs.ca_f = value,
            "CA_t" => self.costs.ca_t = value,
            "O_f" => self.costs.o_f = value,
            "O_t" => self.costs.o_t = value,
            "r" => self.rate = value,
            "L" => self.lifetime_years = whole_years(value)?,
            "T_e" => self.tariff_gbp_per_mwh = value,
            "availability" => self.availability = value,
            _ => {
                return Err(EconError::UnknownParameter {
                    name: name.to_string(),
                    valid: valid_parameter_names(),
                })
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "CA_f" => self.costs.ca_f,
            "CA_t" => self.costs.ca_t,
            "O_f" => self.costs.o_f,
            "O_t" => self.costs.o_t,
            "r" => self.rate,
            "L" => f64::from(self.lifetime_years),
            "T_e" => self.tariff_gbp_per_mwh,
            "availability" => self.availability,
            _ => return None,
        })
    }

    /// `design` with this scenario's lifetime and availability applied.
    pub fn apply_to(&self, design: &ArrayDesign) -> ArrayDesign {
        ArrayDesign {
            lifetime_years: self.lifetime_years,
            availability: Availability::Constant(self.availability),
            ..design.clone()
        }
    }

    pub fn discount(&self, mode: DiscountMode) -> DiscountSpec {
        DiscountSpec {
            mode,
            rate: self.rate,
        }
    }
}

fn whole_years(value: f64) -> Result<u32> {
    let rounded = value.round();
    if (value - rounded).abs() > 1e-9 || rounded < 1.0 || rounded > f64::from(u32::MAX) {
        return Err(EconError::InvalidInput(format!(
            "lifetime must be a whole number of years >= 1, got {value}"
        )));
    }
    Ok(rounded as u32)
}

/// Metrics computed for one fully resolved scenario.
pub fn evaluate(
    design: &ArrayDesign,
    values: &ScenarioParameters,
    mode: DiscountMode,
) -> Result<MetricReport> {
    let design = values.apply_to(design);
    evaluate_all(
        &design,
        &values.costs,
        &TariffScheme::new(values.tariff_gbp_per_mwh)?,
        &values.discount(mode),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub column: Column,
    pub values: ScenarioParameters,
    /// Names of parameters taken from overrides rather than the dataset.
    pub overridden: Vec<String>,
    pub metrics: MetricReport,
}

/// Binds each column of the dataset wholesale, then applies `overrides`.
pub fn evaluate_scenarios(
    design: &ArrayDesign,
    overrides: &BTreeMap<String, f64>,
    mode: DiscountMode,
) -> Result<Vec<ScenarioResult>> {
    Column::ALL
        .iter()
        .map(|&column| {
            let mut values = ScenarioParameters::from_column(column);
            for (name, v) in overrides {
                values.set(name, *v)?;
            }
            Ok(ScenarioResult {
                column,
                values,
                overridden: overrides.keys().cloned().collect(),
                metrics: evaluate(design, &values, mode)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Npv,
    Lcoe,
    Payback,
    Irr,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Npv, Metric::Lcoe, Metric::Payback, Metric::Irr];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Npv => "npv",
            Metric::Lcoe => "lcoe",
            Metric::Payback => "payback",
            Metric::Irr => "irr",
        }
    }

    pub fn pick(self, report: &MetricReport) -> Result<f64> {
        match self {
            Metric::Npv => Ok(report.npv),
            Metric::Lcoe => report.lcoe.clone(),
            Metric::Payback => report.payback_years.clone(),
            Metric::Irr => report.irr.clone().map(|s| s.rate),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = EconError;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| EconError::UnknownMetric {
                name: s.to_string(),
                valid: Metric::ALL.map(Metric::name).join(", "),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub metric: Result<f64>,
}

/// Varies one parameter over `grid`, holding everything else at `base`.
pub fn sensitivity_sweep(
    design: &ArrayDesign,
    base: &ScenarioParameters,
    mode: DiscountMode,
    parameter: &str,
    grid: &[f64],
    metric: Metric,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(EconError::InvalidInput("sweep grid is empty".into()));
    }
    if base.get(parameter).is_none() && !DESIGN_PARAMETERS.contains(&parameter) {
        return Err(EconError::UnknownParameter {
            name: parameter.to_string(),
            valid: valid_parameter_names(),
        });
    }
    grid.iter()
        .map(|&value| {
            let mut values = *base;
            let mut d = design.clone();
            match parameter {
                "n_t" => {
                    let n = value.round();
                    if (value - n).abs() > 1e-9 || n < 1.0 {
                        return Err(EconError::InvalidInput(format!(
                            "turbine count must be a positive integer, got {value}"
                        )));
                    }
                    d.turbines = n as u32;
                }
                "P_avg" => d.p_avg_mw = value,
                "C_E" => d.electrical_efficiency = value,
                name => values.set(name, value)?,
            }
            let report = evaluate(&d, &values, mode)?;
            Ok(SweepPoint {
                value,
                metric: metric.pick(&report),
            })
        })
        .collect()
}

/// Evenly spaced grid from `from` to `to` inclusive; one step yields `[from]`.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(EconError::InvalidInput("steps must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let span = to - from;
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k + 1 == steps {
                to
            } else {
                from + span * k as f64 / last
            }
        })
        .collect())
}

/// Percent change in LCOE per percentage point of discount rate, relative to
/// the LCOE at the higher rate.
pub fn lcoe_rate_elasticity(
    design: &ArrayDesign,
    params: &CostParameters,
    mode: DiscountMode,
    r_low: f64,
    r_high: f64,
) -> Result<f64> {
    if r_low >= r_high || r_low.is_nan() || r_high.is_nan() {
        return Err(EconError::InvalidInput(format!(
            "r_low ({r_low}) must be below r_high ({r_high})"
        )));
    }
    let high = lcoe(design, params, &DiscountSpec { mode, rate: r_high })?;
    let low = lcoe(design, params, &DiscountSpec { mode, rate: r_low })?;
    let points = (r_high - r_low) * 100.0;
    Ok((high - low) / high / points * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::build_schedule;
    use crate::metrics::npv;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn design(n: u32, p_avg: f64) -> ArrayDesign {
        ArrayDesign::new(n, 1.5, p_avg, 0.95, 25).unwrap()
    }

    #[test]
    fn builtin_values() {
        let p = builtin_parameters();
        assert_eq!(p.len(), 8);
        let caf = lookup("CA_f").unwrap();
        assert_eq!(
            (caf.optimistic, caf.typical, caf.pessimistic),
            (5.6, 9.2, 14.4)
        );
        let r = lookup("r").unwrap();
        assert_eq!((r.optimistic, r.typical, r.pessimistic), (0.05, 0.10, 0.15));
        let l = lookup("L").unwrap();
        assert_eq!((l.optimistic, l.typical, l.pessimistic), (30.0, 25.0, 20.0));
        let cat = lookup("CA_t").unwrap();
        assert_eq!(
            (cat.optimistic, cat.typical, cat.pessimistic),
            (2.4, 3.3, 4.4)
        );
        let of = lookup("O_f").unwrap();
        assert_eq!(
            (of.optimistic, of.typical, of.pessimistic),
            (0.27, 0.32, 0.87)
        );
        let ot = lookup("O_t").unwrap();
        assert_eq!(
            (ot.optimistic, ot.typical, ot.pessimistic),
            (0.094, 0.15, 0.26)
        );
        let te = lookup("T_e").unwrap();
        assert_eq!(
            (te.optimistic, te.typical, te.pessimistic),
            (290.0, 150.0, 40.0)
        );
        let a = lookup("availability").unwrap();
        assert_eq!((a.optimistic, a.typical, a.pessimistic), (0.98, 0.95, 0.90));
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn cost_ranges_are_ordered() {
        for name in ["CA_f", "CA_t", "O_f", "O_t", "r"] {
            let p = lookup(name).unwrap();
            assert!(
                p.optimistic <= p.typical && p.typical <= p.pessimistic,
                "{name}"
            );
        }
        let l = lookup("L").unwrap();
        assert!(l.optimistic >= l.typical && l.typical >= l.pessimistic);
    }

    #[test]
    fn scenarios_ordered() {
        let res =
            evaluate_scenarios(&design(4, 3.2), &BTreeMap::new(), DiscountMode::default()).unwrap();
        assert_eq!(res.len(), 3);
        let lcoes: Vec<f64> = res
            .iter()
            .map(|r| r.metrics.lcoe.clone().unwrap())
            .collect();
        assert!(lcoes[0] < lcoes[1] && lcoes[1] < lcoes[2]);
        assert!(res[0].metrics.npv >= res[1].metrics.npv);
        assert!(res[1].metrics.npv >= res[2].metrics.npv);
        // pessimistic tariff never pays back
        assert!(res[2].metrics.irr.is_err() || res[2].metrics.irr.as_ref().unwrap().rate < 0.0);
    }

    #[test]
    fn typical_scenario_matches_direct_call() {
        let d = design(4, 3.2);
        let res = evaluate_scenarios(&d, &BTreeMap::new(), DiscountMode::default()).unwrap();
        let typical = &res[1];
        assert_eq!(typical.column, Column::Typical);
        let p = CostParameters::new(9.2, 3.3, 0.32, 0.15).unwrap();
        let spec = DiscountSpec::annual(0.10);
        let direct = evaluate_all(&d, &p, &TariffScheme::new(150.0).unwrap(), &spec).unwrap();
        assert_eq!(typical.metrics, direct);
        // spreadsheet oracle
        assert_relative_eq!(
            typical.metrics.lcoe.clone().unwrap(),
            127.214_191_940_656_85,
            max_relative = 1e-10
        );
    }

    #[test]
    fn overrides_apply_to_every_column() {
        let mut o = BTreeMap::new();
        o.insert("T_e".to_string(), 200.0);
        let res = evaluate_scenarios(&design(4, 3.2), &o, DiscountMode::default()).unwrap();
        assert!(res.iter().all(|r| r.values.tariff_gbp_per_mwh == 200.0));
        assert_eq!(res[0].overridden, vec!["T_e".to_string()]);
        // LCOE does not depend on the tariff
        let plain =
            evaluate_scenarios(&design(4, 3.2), &BTreeMap::new(), DiscountMode::default()).unwrap();
        for (a, b) in res.iter().zip(&plain) {
            assert_eq!(a.metrics.lcoe, b.metrics.lcoe);
        }
        o.insert("bogus".to_string(), 1.0);
        assert!(matches!(
            evaluate_scenarios(&design(4, 3.2), &o, DiscountMode::default()),
            Err(EconError::UnknownParameter { .. })
        ));
    }

    #[test]
    fn sweep_rate_raises_lcoe() {
        let base = ScenarioParameters::from_column(Column::Typical);
        let grid = linear_grid(0.05, 0.15, 11).unwrap();
        let pts = sensitivity_sweep(
            &design(4, 3.2),
            &base,
            DiscountMode::default(),
            "r",
            &grid,
            Metric::Lcoe,
        )
        .unwrap();
        assert_eq!(pts.len(), 11);
        for w in pts.windows(2) {
            assert!(w[1].metric.clone().unwrap() > w[0].metric.clone().unwrap());
        }
    }

    #[test]
    fn sweep_single_point_is_direct_evaluation() {
        let base = ScenarioParameters::from_column(Column::Typical);
        let d = design(4, 3.2);
        let pts = sensitivity_sweep(
            &d,
            &base,
            DiscountMode::default(),
            "CA_t",
            &[3.3],
            Metric::Npv,
        )
        .unwrap();
        let s = build_schedule(&d, &base.costs, &TariffScheme::new(150.0).unwrap()).unwrap();
        assert_eq!(
            pts[0].metric.clone().unwrap(),
            npv(&s, &DiscountSpec::annual(0.1)).unwrap()
        );
    }

    #[test]
    fn fixed_cost_dilutes_with_volume() {
        // d LCOE / d CA_f at the same per-turbine power (0.8 MW)
        let base = ScenarioParameters::from_column(Column::Typical);
        let slope = |n: u32| {
            let d = design(n, 0.8 * n as f64);
            let pts = sensitivity_sweep(
                &d,
                &base,
                DiscountMode::default(),
                "CA_f",
                &[5.6, 14.4],
                Metric::Lcoe,
            )
            .unwrap();
            (pts[1].metric.clone().unwrap() - pts[0].metric.clone().unwrap()) / 8.8
        };
        // oracle: 1e6 / (P_avg * 8322 * annuity(10%, 25)) per £m of CA_f
        let annuity: f64 = (1..=25).map(|i| 1.1f64.powi(-i)).sum();
        let want = |n: u32| 1e6 / (0.8 * n as f64 * 8322.0 * annuity);
        assert_relative_eq!(slope(4), want(4), max_relative = 1e-9);
        assert_relative_eq!(slope(100), want(100), max_relative = 1e-9);
        assert!(slope(100) < slope(4) / 20.0);
    }

    #[test]
    fn sweep_errors() {
        let base = ScenarioParameters::from_column(Column::Typical);
        let d = design(4, 3.2);
        let m = DiscountMode::default();
        assert!(matches!(
            sensitivity_sweep(&d, &base, m, "wacc", &[0.1], Metric::Lcoe),
            Err(EconError::UnknownParameter { .. })
        ));
        assert!(sensitivity_sweep(&d, &base, m, "r", &[], Metric::Lcoe).is_err());
        assert!(sensitivity_sweep(&d, &base, m, "L", &[20.5], Metric::Lcoe).is_err());
        assert!("tvm".parse::<Metric>().is_err());
        assert_eq!("LCOE".parse::<Metric>().unwrap(), Metric::Lcoe);
    }

    #[test]
    fn design_parameters_sweepable() {
        let base = ScenarioParameters::from_column(Column::Typical);
        let d = design(4, 3.2);
        let pts = sensitivity_sweep(
            &d,
            &base,
            DiscountMode::default(),
            "n_t",
            &[4.0, 5.0],
            Metric::Lcoe,
        )
        .unwrap();
        // same total power spread over more turbines costs more
        assert!(pts[1].metric.clone().unwrap() > pts[0].metric.clone().unwrap());
    }

    #[test]
    fn lifetime_sweep_is_weak() {
        let base = ScenarioParameters::from_column(Column::Typical);
        let grid = linear_grid(20.0, 30.0, 11).unwrap();
        let pts = sensitivity_sweep(
            &design(4, 3.2),
            &base,
            DiscountMode::default(),
            "L",
            &grid,
            Metric::Lcoe,
        )
        .unwrap();
        let first = pts[0].metric.clone().unwrap();
        let last = pts[10].metric.clone().unwrap();
        // oracle: 133.347 at 20 years, 123.775 at 30 years
        assert_relative_eq!(first, 133.347_437_323_698_76, max_relative = 1e-9);
        assert_relative_eq!(last, 123.774_902_399_475_82, max_relative = 1e-9);
        assert!((first - last) / first < 0.10);
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(linear_grid(3.0, 9.0, 1).unwrap(), vec![3.0]);
        assert_eq!(linear_grid(20.0, 30.0, 11).unwrap()[5], 25.0);
        assert!(linear_grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn elasticity_band() {
        let p = CostParameters::new(9.2, 3.3, 0.32, 0.15).unwrap();
        let e = lcoe_rate_elasticity(&design(4, 3.2), &p, DiscountMode::default(), 0.061, 0.071)
            .unwrap();
        // direct evaluation oracle: 5.9639643996877725
        assert_relative_eq!(e, 5.963_964_399_687_77, max_relative = 1e-9);
        assert!((3.0..=10.0).contains(&e));
        assert!(
            lcoe_rate_elasticity(&design(4, 3.2), &p, DiscountMode::default(), 0.1, 0.1).is_err()
        );
    }

    proptest! {
        #[test]
        fn scenario_ordering_holds(n in 1u32..80, frac in 0.05f64..0.6) {
            let d = ArrayDesign::new(n, 1.5, frac * 1.5 * n as f64, 0.95, 25).unwrap();
            let res = evaluate_scenarios(&d, &BTreeMap::new(), DiscountMode::default()).unwrap();
            let l: Vec<f64> = res.iter().map(|r| r.metrics.lcoe.clone().unwrap()).collect();
            prop_assert!(l[0] < l[1] && l[1] < l[2]);
            prop_assert!(res[0].metrics.npv >= res[1].metrics.npv);
            prop_assert!(res[1].metrics.npv >= res[2].metrics.npv);
        }

        #[test]
        fn elasticity_positive(n in 1u32..50, frac in 0.05f64..0.9, lo in 0.0f64..0.2, dr in 0.001f64..0.05) {
            let d = ArrayDesign::new(n, 1.5, frac * 1.5 * n as f64, 0.95, 25).unwrap();
            let p = CostParameters::new(9.2, 3.3, 0.32, 0.15).unwrap();
            prop_assert!(lcoe_rate_elasticity(&d, &p, DiscountMode::default(), lo, lo + dr).unwrap() > 0.0);
        }

        #[test]
        fn sweep_is_deterministic(lo in 0.01f64..0.1, steps in 1usize..20) {
            let base = ScenarioParameters::from_column(Column::Typical);
            let grid = linear_grid(lo, lo + 0.1, steps).unwrap();
            let d = design(4, 3.2);
            let a = sensitivity_sweep(&d, &base, DiscountMode::default(), "r", &grid, Metric::Npv).unwrap();
            let b = sensitivity_sweep(&d, &base, DiscountMode::default(), "r", &grid, Metric::Npv).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
