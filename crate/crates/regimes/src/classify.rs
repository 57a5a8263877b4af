use serde::{Deserialize, Serialize};

use crate::RegimeError;

/// `|a - xi| / xi` below this marks slow, near-critical asymptotics.
pub const NEAR_CRITICAL: f64 = 0.1;

/// Relative tolerance for exact equalities between user-supplied parameters.
const EXACT_TOL: f64 = 1e-12;

/// Point estimate of the correlation length with the half-width of its CI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiInput {
    pub value: f64,
    #[serde(default)]
    pub ci: f64,
}

impl XiInput {
    pub fn exact(value: f64) -> Self {
        XiInput { value, ci: 0.0 }
    }
}

/// Growth of `E T(0, P(n))` as `n` grows, with the parameters its rate needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthRegime {
    /// `p < 1/2`: linear growth.
    SubcriticalLinear,
    /// `p = 1/2`: `n / (a log n)`.
    CriticalLog { a: f64 },
    /// `a < xi`: `n^{1 - a/xi} / (log n)^{b/xi}`.
    PowerOverLog { a: f64, b: f64, xi: f64 },
    /// `b < a = xi`: `(log n)^{1 - b/xi}`.
    LogPower { b: f64, xi: f64 },
    /// `a = b = xi`: `log log n`.
    LogLog,
    /// Everything else: bounded.
    Bounded,
}

impl GrowthRegime {
    pub fn name(&self) -> &'static str {
        match self {
            GrowthRegime::SubcriticalLinear => "SubcriticalLinear",
            GrowthRegime::CriticalLog { .. } => "CriticalLog",
            GrowthRegime::PowerOverLog { .. } => "PowerOverLog",
            GrowthRegime::LogPower { .. } => "LogPower",
            GrowthRegime::LogLog => "LogLog",
            GrowthRegime::Bounded => "Bounded",
        }
    }

    /// Predicted growth `g(n)` up to constants. Needs `n >= 3`.
    pub fn rate(&self, n: f64) -> Result<f64, RegimeError> {
        if !(n >= 3.0) {
            return Err(RegimeError::Domain(format!("rates are defined for n >= 3, got {n}")));
        }
        let l = n.ln();
        Ok(match *self {
            GrowthRegime::SubcriticalLinear => n,
            GrowthRegime::CriticalLog { a } => n / (a * l),
            GrowthRegime::PowerOverLog { a, b, xi } => n.powf(1.0 - a / xi) / l.powf(b / xi),
            GrowthRegime::LogPower { b, xi } => l.powf(1.0 - b / xi),
            GrowthRegime::LogLog => l.ln(),
            GrowthRegime::Bounded => 1.0,
        })
    }

    /// Exponent of the pure power of `n` in the rate.
    pub fn power(&self) -> f64 {
        match *self {
            GrowthRegime::SubcriticalLinear | GrowthRegime::CriticalLog { .. } => 1.0,
            GrowthRegime::PowerOverLog { a, xi, .. } => 1.0 - a / xi,
            _ => 0.0,
        }
    }

    pub fn formula(&self) -> String {
        match *self {
            GrowthRegime::SubcriticalLinear => "n".into(),
            GrowthRegime::CriticalLog { a } => format!("n / ({a} log n)"),
            GrowthRegime::PowerOverLog { a, b, xi } => {
                format!("n^(1 - {a}/{xi}) / (log n)^({b}/{xi})")
            }
            GrowthRegime::LogPower { b, xi } => format!("(log n)^(1 - {b}/{xi})"),
            GrowthRegime::LogLog => "log log n".into(),
            GrowthRegime::Bounded => "1".into(),
        }
    }

    /// Lower and upper constant forms. Constants are existence-only.
    pub fn prefactor_band(&self) -> (String, String) {
        let g = self.formula();
        match self {
            GrowthRegime::PowerOverLog { .. } => (format!("c * {g}"), format!("C / (xi - a) * {g}")),
            GrowthRegime::Bounded => ("0".into(), "C".into()),
            _ => (format!("c * {g}"), format!("C * {g}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<XiInput>,
    pub regime: GrowthRegime,
    /// `a = xi` was declared because `|a - xi| < ci`.
    pub a_equals_xi: bool,
    /// `|a - xi| < 2 ci`: the verdict could flip within the uncertainty of xi.
    pub ambiguous: bool,
    /// `|a - xi| / xi < 0.1`.
    pub near_critical: bool,
    pub rate_formula: String,
    pub prefactor_band: (String, String),
}

/// Regime of `E T(0, P(n))` for `f = a log(1+u) + b log(1 + log(1+u))` at density `p`.
///
/// `xi` is the correlation length at `1 - p`; it is only read when `p > 1/2`,
/// and the regime is bounded if it is missing there.
pub fn classify(a: f64, b: f64, p: f64, xi: Option<XiInput>) -> Result<RegimeClassification, RegimeError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(RegimeError::InvalidParameter(format!("a must be positive, got {a}")));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(RegimeError::InvalidParameter(format!("b must be nonnegative, got {b}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(RegimeError::InvalidParameter(format!("p must lie in (0,1), got {p}")));
    }
    if let Some(x) = xi {
        if !(x.value.is_finite() && x.value > 0.0 && x.ci.is_finite() && x.ci >= 0.0) {
            return Err(RegimeError::InvalidParameter(format!("bad correlation length {x:?}")));
        }
    }
    let mut out = RegimeClassification {
        a,
        b,
        p,
        xi,
        regime: GrowthRegime::Bounded,
        a_equals_xi: false,
        ambiguous: false,
        near_critical: false,
        rate_formula: String::new(),
        prefactor_band: (String::new(), String::new()),
    };
    out.regime = if (p - 0.5).abs() <= EXACT_TOL {
        GrowthRegime::CriticalLog { a }
    } else if p < 0.5 {
        GrowthRegime::SubcriticalLinear
    } else if let Some(XiInput { value: x, ci }) = xi {
        let gap = (a - x).abs();
        out.a_equals_xi = gap < ci || gap <= EXACT_TOL * x;
        out.ambiguous = gap < 2.0 * ci;
        out.near_critical = gap / x < NEAR_CRITICAL;
        if out.a_equals_xi {
            // On the boundary a itself stands in for xi.
            if (b - a).abs() <= EXACT_TOL * a {
                GrowthRegime::LogLog
            } else if b < a {
                GrowthRegime::LogPower { b, xi: a }
            } else {
                GrowthRegime::Bounded
            }
        } else if a < x {
            GrowthRegime::PowerOverLog { a, b, xi: x }
        } else {
            GrowthRegime::Bounded
        }
    } else {
        GrowthRegime::Bounded
    };
    out.rate_formula = out.regime.formula();
    out.prefactor_band = out.regime.prefactor_band();
    Ok(out)
}
