use serde::{Deserialize, Serialize};

use crate::WedgeError;

/// Largest integer argument for which `u as f64` is exact.
const MAX_EXACT_ARG: u64 = 1 << 53;

/// Relative tolerance used to snap values that sit on an integer up to rounding.
const FLOOR_GUARD: f64 = 8.0 * f64::EPSILON;

/// Boundary function of a wedge. Every kind satisfies `f(0) = 0` and is nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WedgeFunction {
    /// `a log(1+u) + b log(1 + log(1+u))`.
    LogLogLog { a: f64, b: f64 },
    /// `u^a`, `0 < a < 1`.
    PowerLaw { a: f64 },
    /// `(log(1+u))^a`.
    LogPower { a: f64 },
    /// Values at `u = 0, 1, 2, ...`, linearly interpolated and held constant past the end.
    Custom { values: Vec<f64> },
}

/// `ell_j`, the first integer abscissa where the wedge reaches height `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelIndex {
    pub j: u64,
    pub ell: u64,
}

impl WedgeFunction {
    pub fn log_log_log(a: f64, b: f64) -> Result<Self, WedgeError> {
        let f = WedgeFunction::LogLogLog { a, b };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), WedgeError> {
        let bad = |msg: String| Err(WedgeError::InvalidParameter(msg));
        match self {
            WedgeFunction::LogLogLog { a, b } => {
                if !(a.is_finite() && *a > 0.0) {
                    return bad(format!("a must be positive, got {a}"));
                }
                if !(b.is_finite() && *b >= 0.0) {
                    return bad(format!("b must be nonnegative, got {b}"));
                }
            }
            WedgeFunction::PowerLaw { a } => {
                if !(*a > 0.0 && *a < 1.0) {
                    return bad(format!("power-law exponent must lie in (0,1), got {a}"));
                }
            }
            WedgeFunction::LogPower { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return bad(format!("log-power exponent must be positive, got {a}"));
                }
            }
            WedgeFunction::Custom { values } => {
                if values.is_empty() || values[0] != 0.0 {
                    return bad("tabulated f must start with f(0) = 0".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("tabulated f must be finite".into());
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return bad("tabulated f must be nondecreasing".into());
                }
            }
        }
        Ok(())
    }

    /// Evaluates `f(u)`.
    pub fn eval(&self, u: f64) -> Result<f64, WedgeError> {
        if !(u >= 0.0) {
            return Err(WedgeError::Domain(u));
        }
        Ok(self.eval_unchecked(u))
    }

    fn eval_unchecked(&self, u: f64) -> f64 {
        match self {
            WedgeFunction::LogLogLog { a, b } => {
                let l = u.ln_1p();
                if *b == 0.0 {
                    a * l
                } else {
                    a * l + b * l.ln_1p()
                }
            }
            WedgeFunction::PowerLaw { a } => u.powf(*a),
            WedgeFunction::LogPower { a } => u.ln_1p().powf(*a),
            WedgeFunction::Custom { values } => {
                let last = values.len() - 1;
                if u >= last as f64 {
                    return values[last];
                }
                let k = u.floor() as usize;
                let frac = u - k as f64;
                values[k] + frac * (values[k + 1] - values[k])
            }
        }
    }

    /// `floor(f(k))` at an integer, snapping values within rounding error of an integer.
    pub fn floor_at(&self, k: u64) -> u64 {
        let v = self.eval_unchecked(k as f64);
        let r = v.round();
        if (v - r).abs() <= FLOOR_GUARD * r.max(1.0) {
            r as u64
        } else {
            v.floor() as u64
        }
    }

    fn reaches(&self, d: u64, j: u64) -> bool {
        self.floor_at(d) >= j
    }

    /// Returns `ell_j = min{d >= 0 : f(d) >= j}` over the integers.
    pub fn level(&self, j: u64) -> Result<LevelIndex, WedgeError> {
        if j == 0 {
            return Ok(LevelIndex { j, ell: 0 });
        }
        let ell = match self {
            WedgeFunction::LogLogLog { a, b } if *b == 0.0 => {
                let guess = ((j as f64) / a).exp_m1().ceil();
                if !(guess < MAX_EXACT_ARG as f64) {
                    return Err(WedgeError::LevelOverflow { j });
                }
                let mut d = guess.max(0.0) as u64;
                while d > 0 && self.reaches(d - 1, j) {
                    d -= 1;
                }
                while !self.reaches(d, j) {
                    d += 1;
                    if d > MAX_EXACT_ARG {
                        return Err(WedgeError::LevelOverflow { j });
                    }
                }
                d
            }
            WedgeFunction::Custom { values } => {
                if !self.reaches(values.len() as u64 - 1, j) {
                    return Err(WedgeError::LevelUnreachable { j });
                }
                self.bisect(j, values.len() as u64 - 1)
            }
            _ => {
                let mut hi = 1u64;
                while !self.reaches(hi, j) {
                    if hi >= MAX_EXACT_ARG {
                        return Err(WedgeError::LevelOverflow { j });
                    }
                    hi = (hi * 2).min(MAX_EXACT_ARG);
                }
                self.bisect(j, hi)
            }
        };
        Ok(LevelIndex { j, ell })
    }

    /// Smallest `d` in `[0, hi]` reaching level `j`, given that `hi` does.
    fn bisect(&self, j: u64, hi: u64) -> u64 {
        let (mut lo, mut hi) = (0u64, hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.reaches(mid, j) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Real generalized inverse `inf{u >= 0 : f(u) >= j}`, by bisection in double precision.
    ///
    /// Unlike [`level`](Self::level) this has no integer range limit, so it is the
    /// reference for very high levels where `ell_j` exceeds `2^53`.
    pub fn inverse(&self, j: f64) -> Result<f64, WedgeError> {
        if j <= 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0f64;
        while self.eval_unchecked(hi) < j {
            hi *= 2.0;
            if !hi.is_finite() || matches!(self, WedgeFunction::Custom { values } if hi > 2.0 * values.len() as f64) {
                return Err(WedgeError::LevelUnreachable { j: j.ceil() as u64 });
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_unchecked(mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Leading-order predictions `(ell_j, ell_{j+1} - ell_j)` for the log-log-log family.
    pub fn level_gap_asymptote(&self, j: u64) -> Result<(f64, f64), WedgeError> {
        let WedgeFunction::LogLogLog { a, b } = self else {
            return Err(WedgeError::NotLogLogLog);
        };
        if j == 0 {
            return Err(WedgeError::InvalidParameter("asymptote needs j >= 1".into()));
        }
        let s = j as f64 / a;
        let ell = s.exp() / s.powf(b / a);
        Ok((ell, (1.0 / a).exp_m1() * ell))
    }

    /// Short label used in file names and reports.
    pub fn label(&self) -> String {
        match self {
            WedgeFunction::LogLogLog { a, b } => format!("loglog(a={a},b={b})"),
            WedgeFunction::PowerLaw { a } => format!("power(a={a})"),
            WedgeFunction::LogPower { a } => format!("logpower(a={a})"),
            WedgeFunction::Custom { values } => format!("custom(len={})", values.len()),
        }
    }
}
