use std::path::Path;

use serde::Serialize;
use tidal_econ::metrics::{break_even_power_for_design, functional_sweep};
use tidal_econ::scenarios::{evaluate_scenarios, linear_grid, sensitivity_sweep};
use tidal_econ::{
    Availability, BreakEvenSpec, CostObservation, CostParameters, EconError, IrrSolution, Metric,
    MetricReport, ScenarioParameters,
};

use crate::config::{self, estimate_ratio, estimate_two_points, Estimate, Resolved};
use crate::error::{CliError, CliResult};
use crate::format::{csv_string, full, sig3, Format, Table};
use crate::tables::read_observations;
use crate::{CurveArgs, ObsArgs, Output, SplitCommand, Style, SweepArgs};

#[derive(Debug, Serialize)]
struct Cell {
    value: Option<f64>,
    error: Option<String>,
}

impl From<&Result<f64, EconError>> for Cell {
    fn from(r: &Result<f64, EconError>) -> Self {
        match r {
            Ok(v) => Cell {
                value: Some(*v),
                error: None,
            },
            Err(e) => Cell {
                value: None,
                error: Some(e.to_string()),
            },
        }
    }
}

impl Cell {
    fn human(&self) -> (String, String) {
        match (&self.value, &self.error) {
            (Some(v), _) => (sig3(*v), String::new()),
            (None, e) => ("undefined".into(), e.clone().unwrap_or_default()),
        }
    }

    fn csv(&self) -> String {
        self.value.map(full).unwrap_or_default()
    }
}

#[derive(Debug, Serialize)]
struct IrrCell {
    value: Option<f64>,
    ambiguous: bool,
    error: Option<String>,
}

impl From<&Result<IrrSolution, EconError>> for IrrCell {
    fn from(r: &Result<IrrSolution, EconError>) -> Self {
        match r {
            Ok(s) => IrrCell {
                value: Some(s.rate),
                ambiguous: s.ambiguous,
                error: None,
            },
            Err(e) => IrrCell {
                value: None,
                ambiguous: false,
                error: Some(e.to_string()),
            },
        }
    }
}

impl IrrCell {
    fn cell(&self) -> Cell {
        Cell {
            value: self.value,
            error: match (&self.error, self.ambiguous) {
                (Some(e), _) => Some(e.clone()),
                (None, true) => Some("several rates solve NPV = 0; smallest shown".into()),
                (None, false) => None,
            },
        }
    }

    fn human(&self) -> (String, String) {
        let (v, _) = self.cell().human();
        (v, self.cell().error.unwrap_or_default())
    }
}

#[derive(Debug, Serialize)]
struct Headline {
    npv_gbp_m: f64,
    lcoe_gbp_per_mwh: Cell,
    payback_years: Cell,
    irr: IrrCell,
}

impl From<&MetricReport> for Headline {
    fn from(r: &MetricReport) -> Self {
        Headline {
            npv_gbp_m: r.npv,
            lcoe_gbp_per_mwh: (&r.lcoe).into(),
            payback_years: (&r.payback_years).into(),
            irr: (&r.irr).into(),
        }
    }
}

impl Headline {
    fn human_rows(&self) -> Vec<(&'static str, String, String)> {
        let (l, ln) = self.lcoe_gbp_per_mwh.human();
        let (p, pn) = self.payback_years.human();
        let (i, inote) = self.irr.human();
        vec![
            ("NPV (£m)", sig3(self.npv_gbp_m), String::new()),
            ("LCOE (£/MWh)", l, ln),
            ("payback (years)", p, pn),
            ("IRR", i, inote),
        ]
    }

    fn csv_cells(&self) -> Vec<String> {
        vec![
            full(self.npv_gbp_m),
            self.lcoe_gbp_per_mwh.csv(),
            self.payback_years.csv(),
            self.irr.cell().csv(),
        ]
    }
}

const METRIC_NAMES: [&str; 4] = ["npv_gbp_m", "lcoe_gbp_per_mwh", "payback_years", "irr"];

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn numeric(e: EconError) -> CliError {
    CliError::from(e)
}

#[derive(Debug, Serialize)]
struct MetricsOut {
    cost_parameters: CostParameters,
    #[serde(flatten)]
    headline: Headline,
    break_even_power_mw: Cell,
    power_per_turbine_mw: f64,
    j_bep_mw: Cell,
    warnings: Vec<String>,
}

pub fn metrics(path: &Path, style: Style) -> CliResult<Output> {
    let cfg = config::load(path)?;
    let report = tidal_econ::metrics::evaluate_all(&cfg.design, &cfg.costs, &cfg.tariff, &cfg.spec)
        .map_err(numeric)?;
    let bep = break_even_power_for_design(&cfg.design, &cfg.costs, &cfg.tariff);
    let n = f64::from(cfg.design.turbines);
    let j = bep.clone().map(|p| cfg.design.p_avg_mw - p * n);
    let out = MetricsOut {
        cost_parameters: cfg.costs,
        headline: (&report).into(),
        break_even_power_mw: (&bep).into(),
        power_per_turbine_mw: cfg.design.p_avg_mw / n,
        j_bep_mw: (&j).into(),
        warnings: cfg.warnings(),
    };
    let body = match style.format {
        Format::Json => json(&out),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = METRIC_NAMES
                .iter()
                .zip(out.headline.csv_cells())
                .map(|(m, v)| vec![m.to_string(), v])
                .collect();
            rows.push(vec![
                "break_even_power_mw".into(),
                out.break_even_power_mw.csv(),
            ]);
            rows.push(vec![
                "power_per_turbine_mw".into(),
                full(out.power_per_turbine_mw),
            ]);
            rows.push(vec!["j_bep_mw".into(), out.j_bep_mw.csv()]);
            csv_string(&["metric", "value"], &rows)
        }
        Format::Human => {
            let mut t = Table::new(["metric", "value", "note"]);
            for (name, v, note) in out.headline.human_rows() {
                t.row([name.to_string(), v, note]);
            }
            let (b, bn) = out.break_even_power_mw.human();
            t.row(["break-even power (MW/turbine)".to_string(), b, bn]);
            t.row([
                "average power (MW/turbine)".to_string(),
                sig3(out.power_per_turbine_mw),
                String::new(),
            ]);
            let (jv, jn) = out.j_bep_mw.human();
            t.row(["J_bep (MW)".to_string(), jv, jn]);
            t.render(style.color)
        }
    };
    Ok(Output {
        body,
        warnings: out.warnings,
    })
}

fn parse_pair(flag: &str, raw: &str) -> CliResult<(f64, f64)> {
    let bad = || {
        CliError::input(format!(
            "--{flag} expects A:B with two numbers, got '{raw}'"
        ))
    };
    let (a, b) = raw.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn gather(
    csv: &Option<std::path::PathBuf>,
    totals: &[String],
    per_mw: &[String],
    names: (&str, &str),
    args: &ObsArgs,
) -> CliResult<Vec<CostObservation>> {
    let mut obs = match csv {
        Some(p) => read_observations(p, args.rating_mw)?,
        None => Vec::new(),
    };
    for raw in totals {
        let (n, cost) = parse_pair(names.0, raw)?;
        obs.push(CostObservation::total(n, cost).with_rate(args.rate_to_gbp));
    }
    for raw in per_mw {
        let (cap, cost) = parse_pair(names.1, raw)?;
        let rating = args
            .rating_mw
            .ok_or_else(|| CliError::input(format!("--{} needs --rating-mw", names.1)))?;
        obs.push(CostObservation::per_mw(cap, rating, cost).with_rate(args.rate_to_gbp));
    }
    Ok(obs)
}

fn observations(args: &ObsArgs) -> CliResult<(Vec<CostObservation>, Vec<CostObservation>)> {
    if let Some(r) = args.rating_mw {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::input(format!(
                "--rating-mw must be positive, got {r}"
            )));
        }
    }
    let capex = gather(
        &args.capex_csv,
        &args.capex,
        &args.capex_per_mw,
        ("capex", "capex-per-mw"),
        args,
    )?;
    let opex = gather(
        &args.opex_csv,
        &args.opex,
        &args.opex_per_mw,
        ("opex", "opex-per-mw"),
        args,
    )?;
    Ok((capex, opex))
}

fn describe(o: &CostObservation) -> String {
    let scale = if o.currency_rate == 1.0 {
        String::new()
    } else {
        format!(" x {}", o.currency_rate)
    };
    match o.capacity_mw {
        Some(cap) => format!("{} per MW at {} MW{scale}", sig3(o.cost), sig3(cap)),
        None => format!("{} total{scale}", sig3(o.cost)),
    }
}

pub fn split(cmd: &SplitCommand, style: Style) -> CliResult<Output> {
    let est: Estimate = match cmd {
        SplitCommand::TwoPoints(args) => {
            let (capex, opex) = observations(args)?;
            estimate_two_points(capex, opex)?
        }
        SplitCommand::Ratio { ratio, obs } => {
            let (capex, opex) = observations(obs)?;
            estimate_ratio(*ratio, capex, opex)?
        }
    };
    let p = est.cost_parameters;
    let body = match style.format {
        Format::Json => json(&est),
        Format::Csv => csv_string(
            &["component", "value"],
            &[
                vec!["ca_f".into(), full(p.ca_f)],
                vec!["ca_t".into(), full(p.ca_t)],
                vec!["o_f".into(), full(p.o_f)],
                vec!["o_t".into(), full(p.o_t)],
            ],
        ),
        Format::Human => {
            let mut s = match est.ratio {
                Some(r) => format!("method: ratio {r}\n"),
                None => "method: two points\n".to_string(),
            };
            let mut inputs = Table::new(["input", "n_t", "cost (£m)"]);
            for (label, list) in [
                ("CAPEX", &est.capex_observations),
                ("OPEX", &est.opex_observations),
            ] {
                for o in list {
                    inputs.row([label.to_string(), sig3(o.turbines), describe(o)]);
                }
            }
            s.push_str(&inputs.render(style.color));
            s.push('\n');
            let mut t = Table::new(["component", "CAPEX (£m)", "OPEX (£m/yr)"]);
            t.row(["fixed".to_string(), sig3(p.ca_f), sig3(p.o_f)]);
            t.row(["per turbine".to_string(), sig3(p.ca_t), sig3(p.o_t)]);
            s.push_str(&t.render(style.color));
            s
        }
    };
    Ok(Output {
        body,
        warnings: est.warnings,
    })
}

#[derive(Debug, Serialize)]
struct ScenarioOut {
    scenario: &'static str,
    parameters: ScenarioParameters,
    overridden: Vec<String>,
    #[serde(flatten)]
    headline: Headline,
}

fn scenario_row_values(p: &ScenarioParameters) -> [(&'static str, f64); 8] {
    [
        ("CA_f (£m)", p.costs.ca_f),
        ("CA_t (£m)", p.costs.ca_t),
        ("O_f (£m/yr)", p.costs.o_f),
        ("O_t (£m/yr)", p.costs.o_t),
        ("r", p.rate),
        ("L (years)", f64::from(p.lifetime_years)),
        ("T_e (£/MWh)", p.tariff_gbp_per_mwh),
        ("availability", p.availability),
    ]
}

pub fn scenarios(path: &Path, style: Style) -> CliResult<Output> {
    let cfg = config::load(path)?;
    let results = evaluate_scenarios(&cfg.design, &cfg.overrides, cfg.spec.mode)?;
    let outs: Vec<ScenarioOut> = results
        .iter()
        .map(|r| ScenarioOut {
            scenario: r.column.label(),
            parameters: r.values,
            overridden: r.overridden.clone(),
            headline: (&r.metrics).into(),
        })
        .collect();
    let body = match style.format {
        Format::Json => json(&serde_json::json!({ "scenarios": outs })),
        Format::Csv => {
            let cells: Vec<Vec<String>> = outs.iter().map(|o| o.headline.csv_cells()).collect();
            let rows: Vec<Vec<String>> = METRIC_NAMES
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let mut row = vec![m.to_string()];
                    row.extend(cells.iter().map(|c| c[i].clone()));
                    row
                })
                .collect();
            csv_string(&["metric", "optimistic", "typical", "pessimistic"], &rows)
        }
        Format::Human => {
            let mut t = Table::new(["", "optimistic", "typical", "pessimistic"]);
            let params: Vec<_> = outs
                .iter()
                .map(|o| scenario_row_values(&o.parameters))
                .collect();
            for i in 0..8 {
                let mut row = vec![params[0][i].0.to_string()];
                if i == 5 {
                    row.extend(params.iter().map(|p| p[i].1.to_string()));
                } else {
                    row.extend(params.iter().map(|p| sig3(p[i].1)));
                }
                t.row(row);
            }
            let metric_rows: Vec<_> = outs.iter().map(|o| o.headline.human_rows()).collect();
            for i in 0..4 {
                let mut row = vec![metric_rows[0][i].0.to_string()];
                row.extend(metric_rows.iter().map(|m| m[i].1.clone()));
                t.row(row);
            }
            let mut s = t.render(style.color);
            if !cfg.overrides.is_empty() {
                let names: Vec<&str> = cfg.overrides.keys().map(String::as_str).collect();
                s.push_str(&format!("\noverridden: {}\n", names.join(", ")));
            }
            s
        }
    };
    Ok(Output {
        body,
        warnings: cfg.warnings(),
    })
}

/// Scenario-style parameter set taken from a resolved configuration.
pub fn base_parameters(cfg: &Resolved) -> CliResult<ScenarioParameters> {
    let availability = match &cfg.design.availability {
        Availability::Constant(a) => *a,
        Availability::PerYear(_) => return Err(CliError::input(
            "sweeps need a constant availability; per-year profiles are only supported by metrics",
        )),
    };
    Ok(ScenarioParameters {
        costs: cfg.costs,
        rate: cfg.spec.rate,
        lifetime_years: cfg.design.lifetime_years,
        tariff_gbp_per_mwh: cfg.tariff.gbp_per_mwh,
        availability,
    })
}

#[derive(Debug, Serialize)]
struct SweepRow {
    value: f64,
    result: Option<f64>,
    error: Option<String>,
}

pub fn sweep(args: &SweepArgs, style: Style) -> CliResult<Output> {
    let metric: Metric = args.metric.parse()?;
    if !(args.from.is_finite() && args.to.is_finite()) || args.from > args.to {
        return Err(CliError::input(format!(
            "--from ({}) must not exceed --to ({})",
            args.from, args.to
        )));
    }
    let cfg = config::load(&args.config)?;
    let base = base_parameters(&cfg)?;
    let grid = linear_grid(args.from, args.to, args.steps)?;
    let points = sensitivity_sweep(
        &cfg.design,
        &base,
        cfg.spec.mode,
        &args.param,
        &grid,
        metric,
    )?;
    let mut warnings = cfg.warnings();
    for p in &points {
        if let Err(e) = &p.metric {
            warnings.push(format!("{} = {}: {e}", args.param, p.value));
        }
    }
    let rows: Vec<SweepRow> = points
        .iter()
        .map(|p| {
            let cell = Cell::from(&p.metric);
            SweepRow {
                value: p.value,
                result: cell.value,
                error: cell.error,
            }
        })
        .collect();
    let body = match style.format {
        Format::Json => json(&serde_json::json!({
            "parameter": args.param,
            "metric": metric.name(),
            "rows": rows,
        })),
        Format::Csv => csv_string(
            &["value", metric.name()],
            &rows
                .iter()
                .map(|r| vec![full(r.value), r.result.map(full).unwrap_or_default()])
                .collect::<Vec<_>>(),
        ),
        Format::Human => {
            let mut t = Table::new([args.param.clone(), metric.name().to_string()]);
            for r in &rows {
                t.row([
                    sig3(r.value),
                    r.result.map(sig3).unwrap_or_else(|| "undefined".into()),
                ]);
            }
            t.render(style.color)
        }
    };
    Ok(Output { body, warnings })
}

#[derive(Debug, Serialize)]
struct CurveRowOut {
    n_t: u32,
    p_avg_mw: f64,
    power_per_device_mw: f64,
    j_bep_mw: f64,
    j_bep_ev_mw: f64,
    npv_gbp_m: f64,
    lcoe_gbp_per_mwh: Cell,
    max_power: bool,
    max_j_bep: bool,
    max_j_bep_ev: bool,
}

#[derive(Debug, Serialize)]
struct CurveOut {
    p_be_mw: f64,
    ev: f64,
    p_be_source: &'static str,
    argmax_power: Option<u32>,
    argmax_j_bep: Option<u32>,
    argmax_j_bep_ev: Option<u32>,
    rows: Vec<CurveRowOut>,
}

pub fn curve(args: &CurveArgs, style: Style) -> CliResult<Output> {
    let cfg = config::load(&args.config)?;
    let points = crate::tables::read_power_curve(&args.power_curve)?;
    let (p_be, source) = match (args.p_be, cfg.break_even) {
        (Some(p), _) => (p, "flag"),
        (None, Some(b)) => (b.p_be_mw, "config"),
        (None, None) => (
            break_even_power_for_design(&cfg.design, &cfg.costs, &cfg.tariff).map_err(numeric)?,
            "design",
        ),
    };
    let ev = args.ev.or(cfg.break_even.map(|b| b.ev)).unwrap_or(0.0);
    let bep = BreakEvenSpec::new(p_be, ev)?;
    let sweep = functional_sweep(
        &points,
        &cfg.design,
        &cfg.costs,
        &cfg.tariff,
        &cfg.spec,
        &bep,
    )?;
    let (ap, aj, ae) = (
        sweep.argmax_power(),
        sweep.argmax_j_bep(),
        sweep.argmax_j_bep_ev(),
    );
    let mut warnings = cfg.warnings();
    for r in &sweep.rows {
        warnings.extend(
            r.warnings
                .iter()
                .map(|w| format!("n_t = {}: {w}", r.turbines)),
        );
    }
    let out = CurveOut {
        p_be_mw: bep.p_be_mw,
        ev: bep.ev,
        p_be_source: source,
        argmax_power: ap,
        argmax_j_bep: aj,
        argmax_j_bep_ev: ae,
        rows: sweep
            .rows
            .iter()
            .map(|r| CurveRowOut {
                n_t: r.turbines,
                p_avg_mw: r.p_avg_mw,
                power_per_device_mw: r.power_per_device_mw,
                j_bep_mw: r.j_bep,
                j_bep_ev_mw: r.j_bep_ev,
                npv_gbp_m: r.npv,
                lcoe_gbp_per_mwh: (&r.lcoe).into(),
                max_power: Some(r.turbines) == ap,
                max_j_bep: Some(r.turbines) == aj,
                max_j_bep_ev: Some(r.turbines) == ae,
            })
            .collect(),
    };
    let body = match style.format {
        Format::Json => json(&out),
        Format::Csv => csv_string(
            &[
                "n_t",
                "p_avg_mw",
                "power_per_device_mw",
                "j_bep_mw",
                "j_bep_ev_mw",
                "npv_gbp_m",
                "lcoe_gbp_per_mwh",
                "max_power",
                "max_j_bep",
                "max_j_bep_ev",
            ],
            &out.rows
                .iter()
                .map(|r| {
                    vec![
                        r.n_t.to_string(),
                        full(r.p_avg_mw),
                        full(r.power_per_device_mw),
                        full(r.j_bep_mw),
                        full(r.j_bep_ev_mw),
                        full(r.npv_gbp_m),
                        r.lcoe_gbp_per_mwh.csv(),
                        r.max_power.to_string(),
                        r.max_j_bep.to_string(),
                        r.max_j_bep_ev.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Human => {
            let mut s = format!(
                "P_BE = {} MW/turbine ({}), EV = {}\n\n",
                sig3(out.p_be_mw),
                source,
                sig3(out.ev)
            );
            let mut t = Table::new([
                "n_t",
                "P_avg (MW)",
                "per device (MW)",
                "J_bep (MW)",
                "J_bep_ev (MW)",
                "NPV (£m)",
                "LCOE (£/MWh)",
                "max",
            ]);
            for r in &out.rows {
                let mut flags = Vec::new();
                if r.max_power {
                    flags.push("power");
                }
                if r.max_j_bep {
                    flags.push("J_bep");
                }
                if r.max_j_bep_ev {
                    flags.push("J_bep_ev");
                }
                t.row([
                    r.n_t.to_string(),
                    sig3(r.p_avg_mw),
                    sig3(r.power_per_device_mw),
                    sig3(r.j_bep_mw),
                    sig3(r.j_bep_ev_mw),
                    sig3(r.npv_gbp_m),
                    r.lcoe_gbp_per_mwh.human().0,
                    flags.join(","),
                ]);
            }
            s.push_str(&t.render(style.color));
            s
        }
    };
    Ok(Output { body, warnings })
}
