use thiserror::Error;

/// Errors raised by the economic model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EconError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("discount rate {0} must be greater than -1")]
    RateOutOfRange(f64),

    #[error("time offset {0} must be non-negative")]
    NegativeTime(f64),

    #[error("year {year} outside operating window 1..={lifetime}")]
    YearOutOfRange { year: u32, lifetime: u32 },

    #[error("discounted energy is zero; LCOE is undefined")]
    ZeroDiscountedEnergy,

    #[error("no payback within horizon")]
    NoPayback,

    #[error("IRR undefined: cash flows never change sign")]
    IrrUndefined,

    #[error("no IRR in range [{lo}, {hi}]")]
    NoIrrInRange { lo: f64, hi: f64 },

    #[error("division by zero: {0}")]
    ZeroDenominator(&'static str),

    #[error("degenerate observations: {0}")]
    Degenerate(String),

    #[error("unknown parameter '{name}' (valid: {valid})")]
    UnknownParameter { name: String, valid: String },

    #[error("unknown metric '{name}' (valid: {valid})")]
    UnknownMetric { name: String, valid: String },
}

pub type Result<T> = std::result::Result<T, EconError>;

/// Non-fatal conditions surfaced alongside a computed value.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Two-point split produced a negative fixed component.
    NegativeFixedComponent { fixed: f64 },
    /// Fixed-to-turbine ratio outside the recommended window.
    RatioOutsideWindow { ratio: f64, lo: f64, hi: f64 },
    /// Economies-of-volume term is not small relative to the break-even power.
    VolumeWindowExceeded { ev_times_n: f64, p_be: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NegativeFixedComponent { fixed } => write!(
                f,
                "fixed component is negative ({fixed}); observations look inconsistent"
            ),
            Warning::RatioOutsideWindow { ratio, lo, hi } => write!(
                f,
                "fixed-to-turbine ratio {ratio} outside recommended window [{lo}, {hi}]"
            ),
            Warning::VolumeWindowExceeded { ev_times_n, p_be } => write!(
                f,
                "EV x n_t = {ev_times_n} is not below P_BE = {p_be}; volume term outside its validity window"
            ),
        }
    }
}

/// A value carrying any warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}
