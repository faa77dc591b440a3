//! Economic metrics for an array: NPV, LCOE, payback period, IRR, and the
//! break-even-power functionals used as optimisation objectives.

use serde::{Deserialize, Serialize};

use crate::cost_model::{
    annual_opex, build_schedule, capex, energy_year, hours_generating, ArrayDesign, CostParameters,
    TariffScheme, GBP_PER_MILLION,
};
use crate::error::{EconError, Flagged, Result, Warning};
use crate::finance::{
    cumulative_present_value, present_value, raw_factor, CashFlowSchedule, DiscountSpec,
};

/// Search interval for the internal rate of return.
pub const IRR_BRACKET: (f64, f64) = (-0.99, 10.0);

/// Secant seeds, spanning the usual 5–15% discount-rate range.
pub const IRR_SEEDS: (f64, f64) = (0.05, 0.15);

// Grid used to locate sign changes of NPV(r) inside the bracket.
const IRR_SCAN_POINTS: usize = 4000;

/// Net present value, £m.
pub fn npv(schedule: &CashFlowSchedule, spec: &DiscountSpec) -> Result<f64> {
    present_value(schedule, spec)
}

/// Levelised cost of energy, £/MWh, with constant OPEX.
pub fn lcoe(design: &ArrayDesign, params: &CostParameters, spec: &DiscountSpec) -> Result<f64> {
    lcoe_with_opex_profile(design, params, spec, None)
}

/// Discounted cost over discounted net energy. CAPEX sits at year 0,
/// OPEX and energy at years `1..=lifetime`.
pub fn lcoe_with_opex_profile(
    design: &ArrayDesign,
    params: &CostParameters,
    spec: &DiscountSpec,
    opex_profile: Option<&[f64]>,
) -> Result<f64> {
    design.validate()?;
    params.validate()?;
    spec.validate()?;
    let opex = annual_opex(design, params, opex_profile)?;
    let mut cost = capex(params, design.turbines);
    let mut energy = 0.0;
    for (year, o) in (1..=design.lifetime_years).zip(opex) {
        let d = raw_factor(spec, f64::from(year));
        cost += o * d;
        energy += energy_year(design, year)? * d;
    }
    if energy <= 0.0 {
        return Err(EconError::ZeroDiscountedEnergy);
    }
    Ok(cost * GBP_PER_MILLION / energy)
}

/// Fractional year at which cumulative discounted cash flow first reaches zero.
///
/// Linear interpolation inside the crossing year; a cumulative value of exactly
/// zero on a year boundary returns that whole year.
pub fn payback_period(schedule: &CashFlowSchedule, spec: &DiscountSpec) -> Result<f64> {
    let cumulative = cumulative_present_value(schedule, spec)?;
    let crossing = cumulative
        .iter()
        .position(|&v| v >= 0.0)
        .ok_or(EconError::NoPayback)?;
    if crossing == 0 {
        return Ok(0.0);
    }
    let before = cumulative[crossing - 1];
    let after = cumulative[crossing];
    if after == 0.0 {
        return Ok(crossing as f64);
    }
    Ok((crossing - 1) as f64 + before / (before - after))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrrSolution {
    pub rate: f64,
    /// More than one root lies in the search bracket; `rate` is the smallest.
    pub ambiguous: bool,
}

fn npv_at(flows: &[f64], rate: f64) -> f64 {
    let base = 1.0 + rate;
    flows
        .iter()
        .enumerate()
        .map(|(i, v)| v * base.powi(-(i as i32)))
        .sum()
}

/// Internal rate of return under annual compounding.
///
/// Secant iteration from the standard seeds; bisection takes over when the
/// secant leaves the bracketing interval or fails to converge. When several
/// roots exist in [`IRR_BRACKET`], the smallest is returned and flagged.
pub fn irr(schedule: &CashFlowSchedule) -> Result<IrrSolution> {
    if !schedule.has_sign_change() {
        return Err(EconError::IrrUndefined);
    }
    let flows = schedule.dense();
    let f = |r: f64| npv_at(&flows, r);
    let (lo, hi) = IRR_BRACKET;

    // Sign changes on a grid uniform in ln(1 + r), which is dense near -1
    // where NPV varies fastest.
    let (ulo, uhi) = ((1.0 + lo).ln(), (1.0 + hi).ln());
    let grid: Vec<f64> = (0..=IRR_SCAN_POINTS)
        .map(|k| {
            let u = ulo + (uhi - ulo) * k as f64 / IRR_SCAN_POINTS as f64;
            (u.exp() - 1.0).clamp(lo, hi)
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| f(r)).collect();

    let mut brackets = Vec::new();
    for k in 0..grid.len() {
        if values[k] == 0.0 {
            brackets.push((grid[k], grid[k]));
        } else if k + 1 < grid.len()
            && values[k + 1] != 0.0
            && values[k].signum() != values[k + 1].signum()
        {
            brackets.push((grid[k], grid[k + 1]));
        }
    }
    let &(a, b) = brackets.first().ok_or(EconError::NoIrrInRange { lo, hi })?;
    let ambiguous = brackets.len() > 1;
    if a == b {
        return Ok(IrrSolution { rate: a, ambiguous });
    }

    let rate = match secant(&f, IRR_SEEDS.0, IRR_SEEDS.1) {
        Some(r) if r >= a && r <= b => r,
        _ => bisect(&f, a, b),
    };
    Ok(IrrSolution { rate, ambiguous })
}

fn secant(f: &impl Fn(f64) -> f64, x0: f64, x1: f64) -> Option<f64> {
    let (lo, hi) = IRR_BRACKET;
    let (mut prev, mut cur) = (x0, x1);
    let (mut f_prev, mut f_cur) = (f(prev), f(cur));
    for _ in 0..100 {
        if f_cur == 0.0 {
            return Some(cur);
        }
        let denom = f_cur - f_prev;
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        let next = cur - f_cur * (cur - prev) / denom;
        if !next.is_finite() || next < lo || next > hi {
            return None;
        }
        if (next - cur).abs() <= 1e-15 * next.abs().max(1.0) {
            return Some(next);
        }
        prev = cur;
        f_prev = f_cur;
        cur = next;
        f_cur = f(cur);
    }
    None
}

// `f(a)` and `f(b)` must have opposite signs.
fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa_positive = f(a) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == fa_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Headline metrics for one design. Failures of individual metrics are kept
/// per metric so that one undefined value does not hide the others.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub npv: f64,
    pub lcoe: Result<f64>,
    pub payback_years: Result<f64>,
    pub irr: Result<IrrSolution>,
}

pub fn evaluate_all(
    design: &ArrayDesign,
    params: &CostParameters,
    tariff: &TariffScheme,
    spec: &DiscountSpec,
) -> Result<MetricReport> {
    let schedule = build_schedule(design, params, tariff)?;
    Ok(MetricReport {
        npv: npv(&schedule, spec)?,
        lcoe: lcoe(design, params, spec),
        payback_years: payback_period(&schedule, spec),
        irr: irr(&schedule),
    })
}

/// Break-even power and its economies-of-volume coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakEvenSpec {
    /// MW per turbine.
    pub p_be_mw: f64,
    /// MW per turbine per additional turbine.
    #[serde(default)]
    pub ev: f64,
}

impl BreakEvenSpec {
    pub fn new(p_be_mw: f64, ev: f64) -> Result<Self> {
        if !p_be_mw.is_finite() || p_be_mw < 0.0 {
            return Err(EconError::InvalidInput(format!(
                "break-even power must be non-negative, got {p_be_mw}"
            )));
        }
        if !ev.is_finite() || ev < 0.0 {
            return Err(EconError::InvalidInput(format!(
                "EV coefficient must be non-negative, got {ev}"
            )));
        }
        Ok(Self { p_be_mw, ev })
    }
}

/// Average power per turbine needed to recover per-turbine expenditure.
///
/// `per_turbine_expenditure` (£m) and `hours` are indexed by year `0..=L`
/// and must have equal length.
pub fn break_even_power(
    per_turbine_expenditure: &[f64],
    hours: &[f64],
    tariff: &TariffScheme,
) -> Result<f64> {
    if per_turbine_expenditure.len() != hours.len() {
        return Err(EconError::InvalidInput(format!(
            "{} expenditure entries but {} hour entries",
            per_turbine_expenditure.len(),
            hours.len()
        )));
    }
    let spend: f64 = per_turbine_expenditure.iter().sum::<f64>() * GBP_PER_MILLION;
    let income_per_mw: f64 = hours.iter().map(|t| t * tariff.gbp_per_mwh).sum();
    if income_per_mw == 0.0 {
        return Err(EconError::ZeroDenominator("sum of hours times tariff"));
    }
    Ok(spend / income_per_mw)
}

/// Break-even power implied by an array's own cost model.
///
/// Total expenditure is shared evenly across turbines and generating hours
/// are taken net of electrical losses, so `P_avg = P_BE * n_t` is exactly
/// the undiscounted break-even point of the project.
pub fn break_even_power_for_design(
    design: &ArrayDesign,
    params: &CostParameters,
    tariff: &TariffScheme,
) -> Result<f64> {
    design.validate()?;
    params.validate()?;
    let n = f64::from(design.turbines);
    let mut spend = vec![capex(params, design.turbines) / n];
    spend.extend(
        annual_opex(design, params, None)?
            .into_iter()
            .map(|o| o / n),
    );
    let mut hours = vec![0.0];
    for year in 1..=design.lifetime_years {
        hours.push(hours_generating(design, year)? * design.electrical_efficiency);
    }
    break_even_power(&spend, &hours, tariff)
}

/// Break-even power from a rated capacity and a target capacity factor.
pub fn bep_from_capacity_factor(rating_mw: f64, capacity_factor: f64) -> Result<f64> {
    if !(capacity_factor > 0.0 && capacity_factor <= 1.0) {
        return Err(EconError::InvalidInput(format!(
            "capacity factor must lie in (0, 1], got {capacity_factor}"
        )));
    }
    Ok(rating_mw * capacity_factor)
}

/// `P_avg - P_BE * n_t`. The EV term of `bep` is ignored.
pub fn bep_functional(p_avg_mw: f64, bep: &BreakEvenSpec, turbines: u32) -> f64 {
    p_avg_mw - bep.p_be_mw * f64::from(turbines)
}

/// `P_avg - (P_BE - EV * n_t) * n_t`, warning when `EV * n_t >= P_BE`.
pub fn bep_ev_functional(p_avg_mw: f64, bep: &BreakEvenSpec, turbines: u32) -> Flagged<f64> {
    let n = f64::from(turbines);
    let ev_n = bep.ev * n;
    let value = p_avg_mw - (bep.p_be_mw - ev_n) * n;
    let mut out = Flagged::clean(value);
    if turbines > 0 && ev_n >= bep.p_be_mw && bep.ev > 0.0 {
        out.warnings.push(Warning::VolumeWindowExceeded {
            ev_times_n: ev_n,
            p_be: bep.p_be_mw,
        });
    }
    out
}

/// `(revenue - cost) / revenue`.
pub fn profit_margin(revenue: f64, cost: f64) -> Result<f64> {
    if revenue == 0.0 {
        return Err(EconError::ZeroDenominator("revenue"));
    }
    Ok((revenue - cost) / revenue)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub turbines: u32,
    pub p_avg_mw: f64,
    pub power_per_device_mw: f64,
    pub j_bep: f64,
    pub j_bep_ev: f64,
    pub npv: f64,
    pub lcoe: Result<f64>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSweep {
    pub rows: Vec<CurveRow>,
}

impl FunctionalSweep {
    fn argmax_by(&self, key: impl Fn(&CurveRow) -> f64) -> Option<u32> {
        let mut best: Option<&CurveRow> = None;
        for row in &self.rows {
            best = match best {
                Some(b) if key(row) < key(b) => Some(b),
                Some(b) if key(row) == key(b) && b.turbines <= row.turbines => Some(b),
                _ => Some(row),
            };
        }
        best.map(|r| r.turbines)
    }

    /// Turbine count with the largest total power; ties go to fewer turbines.
    pub fn argmax_power(&self) -> Option<u32> {
        self.argmax_by(|r| r.p_avg_mw)
    }

    pub fn argmax_j_bep(&self) -> Option<u32> {
        self.argmax_by(|r| r.j_bep)
    }

    pub fn argmax_j_bep_ev(&self) -> Option<u32> {
        self.argmax_by(|r| r.j_bep_ev)
    }
}

/// Evaluates every metric at each `(n_t, P_avg)` sample of a power curve.
///
/// `template` supplies rating, availability, efficiency and lifetime; its
/// turbine count and average power are replaced per sample.
pub fn functional_sweep(
    power_curve: &[(u32, f64)],
    template: &ArrayDesign,
    params: &CostParameters,
    tariff: &TariffScheme,
    spec: &DiscountSpec,
    bep: &BreakEvenSpec,
) -> Result<FunctionalSweep> {
    if power_curve.is_empty() {
        return Err(EconError::InvalidInput("power curve is empty".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (n, _) in power_curve {
        if !seen.insert(*n) {
            return Err(EconError::InvalidInput(format!(
                "duplicate turbine count {n} in power curve"
            )));
        }
    }
    let rows = power_curve
        .iter()
        .map(|&(turbines, p_avg_mw)| {
            let design = ArrayDesign {
                turbines,
                p_avg_mw,
                ..template.clone()
            };
            design.validate()?;
            let schedule = build_schedule(&design, params, tariff)?;
            let j_ev = bep_ev_functional(p_avg_mw, bep, turbines);
            Ok(CurveRow {
                turbines,
                p_avg_mw,
                power_per_device_mw: p_avg_mw / f64::from(turbines),
                j_bep: bep_functional(p_avg_mw, bep, turbines),
                j_bep_ev: j_ev.value,
                npv: npv(&schedule, spec)?,
                lcoe: lcoe(&design, params, spec),
                warnings: j_ev.warnings,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionalSweep { rows })
}
