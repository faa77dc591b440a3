//! Economic assessment of tidal stream arrays: discounting, array cost
//! models, financial metrics, cost-component estimation and scenario analysis.

pub mod cost_model;
pub mod error;
pub mod estimation;
pub mod finance;
pub mod metrics;
pub mod scenarios;

pub use cost_model::{ArrayDesign, Availability, CostParameters, TariffScheme};
pub use error::{EconError, Flagged, Result, Warning};
pub use estimation::{CostObservation, CostSplit, FixedToTurbineRatio};
pub use finance::{CashFlowSchedule, DiscountMode, DiscountSpec};
pub use metrics::{BreakEvenSpec, IrrSolution, MetricReport};
pub use scenarios::{Column, Metric, ScenarioParameters};
