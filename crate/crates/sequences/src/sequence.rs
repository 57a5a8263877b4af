use serde::{Deserialize, Serialize};
use wedge::{WedgeError, WedgeFunction};

use crate::SeqError;

/// How far past a candidate `j0` the level inequality must keep holding.
pub const J0_WINDOW: u64 = 20;

/// Relative distance from `xi` within which `a` counts as equal to it.
pub const AT_XI_TOLERANCE: f64 = 0.1;

/// Which block construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p = 1/2`: blocks of width about the local height.
    Critical,
    /// `p > 1/2`, `a < xi(1-p)`: blocks of width about `exp((j+1)/xi)`.
    SubXi,
    /// `p > 1/2`, `b <= a = xi(1-p)`: whole unions of level gaps.
    AtXi,
}

impl Regime {
    pub fn case_label(&self) -> &'static str {
        match self {
            Regime::Critical => "1",
            Regime::SubXi => "2a",
            Regime::AtXi => "2b",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "critical" => Ok(Regime::Critical),
            "2a" | "sub_xi" | "subxi" => Ok(Regime::SubXi),
            "2b" | "at_xi" | "atxi" => Ok(Regime::AtXi),
            other => Err(SeqError::InvalidParameter(format!("unknown case {other:?}, expected 1, 2a or 2b"))),
        }
    }
}

/// `r_0 = 0 < r_1 < ...` together with what was needed to build it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSequence {
    pub regime: Regime,
    pub f: WedgeFunction,
    pub p: f64,
    pub xi: Option<f64>,
    /// First level split into several blocks (cases 1 and 2a).
    pub j0: Option<u64>,
    pub r: Vec<u64>,
    /// Case 2b only: the level `j(i)` with `r_i = ell_{j(i)}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_of: Option<Vec<u64>>,
}

/// `ell_j` for increasing `j`, cached, `None` once the level can no longer be represented.
struct Levels<'a> {
    f: &'a WedgeFunction,
    ells: Vec<u64>,
    end: bool,
}

impl<'a> Levels<'a> {
    fn new(f: &'a WedgeFunction) -> Self {
        Levels { f, ells: Vec::new(), end: false }
    }

    fn get(&mut self, j: u64) -> Result<Option<u64>, SeqError> {
        while !self.end && self.ells.len() as u64 <= j {
            match self.f.level(self.ells.len() as u64) {
                Ok(l) => self.ells.push(l.ell),
                Err(WedgeError::LevelOverflow { .. } | WedgeError::LevelUnreachable { .. }) => self.end = true,
                Err(e) => return Err(e.into()),
            }
        }
        Ok(self.ells.get(j as usize).copied())
    }
}

/// `ceil(exp((j+1)/xi))`, or `None` past the exact integer range.
pub fn sub_xi_width(j: u64, xi: f64) -> Option<u64> {
    let d = ((j + 1) as f64 / xi).exp().ceil();
    (d < (1u64 << 53) as f64).then_some(d as u64)
}

/// Smallest `j >= 1` such that `ok(j', ell_{j'+1} - ell_{j'})` for every `j'` in
/// `[j, j + J0_WINDOW]` whose levels are representable.
fn detect_j0(levels: &mut Levels, ok: impl Fn(u64, u64) -> bool) -> Result<u64, SeqError> {
    let mut j = 1u64;
    loop {
        let (Some(lo), Some(hi)) = (levels.get(j)?, levels.get(j + 1)?) else {
            return Err(SeqError::InvalidParameter(
                "no representable level satisfies the block-width inequality".into(),
            ));
        };
        let mut good = ok(j, hi - lo);
        let mut k = j + 1;
        while good && k <= j + J0_WINDOW {
            match (levels.get(k)?, levels.get(k + 1)?) {
                (Some(a), Some(b)) => good = ok(k, b - a),
                _ => break,
            }
            k += 1;
        }
        if good {
            return Ok(j);
        }
        j += 1;
    }
}

fn check_regime(f: &WedgeFunction, p: f64, xi: Option<f64>, regime: Regime) -> Result<(), SeqError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SeqError::InvalidParameter(format!("p must lie in (0,1), got {p}")));
    }
    let mismatch = |m: String| Err(SeqError::RegimeMismatch(m));
    if regime == Regime::Critical {
        if (p - 0.5).abs() > 1e-12 {
            return mismatch(format!("case 1 needs p = 1/2, got {p}"));
        }
        return Ok(());
    }
    if p <= 0.5 {
        return mismatch(format!("case {} needs p > 1/2, got {p}", regime.case_label()));
    }
    let Some(xi) = xi.filter(|x| x.is_finite() && *x > 0.0) else {
        return Err(SeqError::InvalidParameter("a positive correlation length is required for p > 1/2".into()));
    };
    let WedgeFunction::LogLogLog { a, b } = *f else {
        return mismatch("cases 2a and 2b are defined for the log-log-log family".into());
    };
    match regime {
        Regime::SubXi if a >= xi => mismatch(format!("case 2a needs a < xi, got a = {a}, xi = {xi}")),
        Regime::AtXi if b > a => mismatch(format!("case 2b needs b <= a, got a = {a}, b = {b}")),
        Regime::AtXi if (a - xi).abs() > AT_XI_TOLERANCE * xi => {
            mismatch(format!("case 2b needs a = xi within {AT_XI_TOLERANCE} relative, got a = {a}, xi = {xi}"))
        }
        _ => Ok(()),
    }
}

/// Builds `r_0, ..., r_{i_max}` for the given regime.
///
/// `xi` is the correlation length at `1 - p` and is ignored in the critical case.
pub fn build_sequence(
    f: &WedgeFunction,
    p: f64,
    xi: Option<f64>,
    regime: Regime,
    i_max: usize,
) -> Result<BlockSequence, SeqError> {
    f.validate()?;
    check_regime(f, p, xi, regime)?;
    let xi = if regime == Regime::Critical { None } else { xi };
    let mut levels = Levels::new(f);
    let mut r: Vec<u64> = vec![0];
    let mut j0 = None;
    let mut level_of = None;

    match regime {
        Regime::Critical | Regime::SubXi => {
            let width = |j: u64| -> Option<u64> {
                match regime {
                    Regime::Critical => Some(j),
                    _ => sub_xi_width(j, xi.unwrap()),
                }
            };
            let start = match regime {
                Regime::Critical => detect_j0(&mut levels, |j, gap| gap >= j)?,
                _ => detect_j0(&mut levels, |j, gap| matches!(width(j), Some(d) if gap >= d && d >= 6 * j))?,
            };
            j0 = Some(start);
            let mut j = 0u64;
            while r.len() <= i_max {
                let (Some(lo), Some(hi)) = (levels.get(j)?, levels.get(j + 1)?) else { break };
                if hi > lo {
                    if j < start {
                        r.push(hi);
                    } else {
                        let d = width(j).ok_or(SeqError::Exhausted { needed: i_max, available: r.len() })?;
                        // Same widths as split_blocks, generated lazily: a level gap can
                        // hold far more blocks than will ever be requested.
                        let gap = hi - lo;
                        if d > gap {
                            return Err(SeqError::InvalidParameter(format!("level {j} gap {gap} below width {d}")));
                        }
                        let mut x = lo + d + gap % d;
                        r.push(x);
                        while x < hi && r.len() <= i_max {
                            x += d;
                            r.push(x);
                        }
                    }
                }
                j += 1;
            }
        }
        Regime::AtXi => {
            let WedgeFunction::LogLogLog { b, .. } = *f else { unreachable!() };
            let exponent = b / xi.unwrap();
            let mut js = vec![0u64];
            let mut j = 1u64;
            while r.len() <= i_max {
                let Some(ell) = levels.get(j)? else { break };
                // Several levels can share one abscissa; keep the first.
                if ell > *r.last().unwrap() {
                    r.push(ell);
                    js.push(j);
                }
                j += ((j as f64).powf(exponent).ceil() as u64).max(1);
            }
            js.truncate(i_max + 1);
            level_of = Some(js);
        }
    }
    if r.len() <= i_max {
        return Err(SeqError::Exhausted { needed: i_max, available: r.len() });
    }
    r.truncate(i_max + 1);
    Ok(BlockSequence { regime, f: f.clone(), p, xi, j0, r, level_of })
}

impl BlockSequence {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `r'_i = r_{2i}`.
    pub fn r_prime(&self, i: usize) -> Option<u64> {
        self.r.get(2 * i).copied()
    }

    /// Columns `[r_i, r_{i+1}]` of the block `R_i`.
    pub fn region(&self, i: usize) -> Option<(u64, u64)> {
        Some((*self.r.get(i)?, *self.r.get(i + 1)?))
    }

    /// Columns of `R'_i = R_{2i}`.
    pub fn region_prime(&self, i: usize) -> Option<(u64, u64)> {
        self.region(2 * i)
    }

    /// Number of even blocks `R'_i` fully described by the sequence.
    pub fn prime_len(&self) -> usize {
        self.r.len() / 2
    }

    /// `iota(n) = min{i : r_{2i} >= n}`.
    pub fn iota(&self, n: u64) -> Result<usize, SeqError> {
        (0..self.r.len().div_ceil(2))
            .find(|&i| self.r[2 * i] >= n)
            .ok_or(SeqError::Exhausted { needed: 2 * self.r.len(), available: self.r.len() })
    }

    /// Whether block `i` satisfies the width bounds and the level constancy of its
    /// regime. Always `None` for [`Regime::AtXi`], which has no width bound.
    pub fn block_bounds_hold(&self, i: usize) -> Option<bool> {
        let (s, t) = self.region(i)?;
        let level = self.f.floor_at(s);
        let width = t - s;
        let (lo, hi) = match self.regime {
            Regime::Critical => (level, (2 * level).saturating_sub(1)),
            Regime::SubXi => {
                let d = sub_xi_width(level, self.xi?)?;
                (d, 2 * d - 1)
            }
            Regime::AtXi => return None,
        };
        Some(lo <= width && width <= hi && self.f.floor_at(t - 1) == level)
    }

    /// First block index from which the regime's structural assumptions are
    /// expected to apply: the width bounds for cases 1 and 2a, and for case 2b
    /// blocks wider than their height.
    pub fn audit_index(&self) -> Option<usize> {
        match self.regime {
            Regime::AtXi => {
                let blocks = self.r.len().checked_sub(1)?;
                let wide = |i: usize| self.r[i + 1] - self.r[i] > self.f.floor_at(self.r[i]);
                let mut start = blocks;
                for i in (0..blocks).rev() {
                    if wide(i) {
                        start = i;
                    } else {
                        break;
                    }
                }
                (start < blocks).then_some(start)
            }
            _ => self.bounds_stable_from(),
        }
    }

    /// Smallest `i*` such that every block from `i*` on satisfies
    /// [`block_bounds_hold`](Self::block_bounds_hold).
    pub fn bounds_stable_from(&self) -> Option<usize> {
        let blocks = self.r.len().checked_sub(1)?;
        let mut start = blocks;
        for i in (0..blocks).rev() {
            if self.block_bounds_hold(i)? {
                start = i;
            } else {
                break;
            }
        }
        (start < blocks).then_some(start)
    }

    /// Index of the first block starting at or after level `j`.
    pub fn first_index_at_level(&self, j: u64) -> Option<usize> {
        self.r.iter().position(|&x| self.f.floor_at(x) >= j)
    }
}
