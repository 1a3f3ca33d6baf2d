//! The α-scan: a fixed grid over the order parameter plus golden-section
//! refinement of the best bracket.
//!
//! The second laws quantify over all `α ≥ 0` but give no search procedure;
//! the grid is `{0} ∪ 120 log-spaced points in [1e-3, 1e3] ∪ {1} ∪ {∞}`,
//! extrema are refined in `ln α` to a relative width of `1e-6`, and the
//! endpoint limits at `α ∈ {0, ∞}` are evaluated exactly rather than
//! approximated.

use crate::divergences::AlphaValue;

/// Log-spaced interior points of the default grid.
pub const DEFAULT_GRID_POINTS: usize = 120;
/// Golden-section termination: bracket width in `ln α` below this.
pub const REFINE_REL_TOL: f64 = 1e-6;

const LOG_LO: f64 = -3.0;
const LOG_HI: f64 = 3.0;

fn log_spaced(points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![10f64.powf(LOG_LO)];
    }
    (0..points)
        .map(|k| 10f64.powf(LOG_LO + (LOG_HI - LOG_LO) * k as f64 / (points - 1) as f64))
        .collect()
}

/// `{0} ∪ log-spaced interior ∪ {1} ∪ {∞}`, ascending, deduplicated.
pub fn alpha_grid(points: usize) -> Vec<AlphaValue> {
    let mut values = log_spaced(points);
    values.push(1.0);
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut grid = vec![AlphaValue::Zero];
    grid.extend(values.into_iter().map(AlphaValue::new));
    grid.push(AlphaValue::PosInfinity);
    grid
}

/// The signed grid: negative mirror of the positive interior, both
/// infinities included.
pub fn signed_alpha_grid(points: usize) -> Vec<AlphaValue> {
    let mut values = log_spaced(points);
    values.push(1.0);
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut grid = vec![AlphaValue::NegInfinity];
    grid.extend(values.iter().rev().map(|&v| AlphaValue::new(-v)));
    grid.push(AlphaValue::Zero);
    grid.extend(values.into_iter().map(AlphaValue::new));
    grid.push(AlphaValue::PosInfinity);
    grid
}

/// Extremum of a scan: value, location, and whether the location was an
/// exact endpoint limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub alpha: AlphaValue,
    pub value: f64,
}

/// Result of scanning a function of α over a grid.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub min: ScanPoint,
    pub max: ScanPoint,
}

/// Evaluates `f` on the grid and refines both extrema by golden section on
/// the surrounding bracket (in `ln α`; only across finite positive
/// neighbors — exact endpoint values are kept as-is).
pub fn scan_extrema(grid: &[AlphaValue], mut f: impl FnMut(AlphaValue) -> f64) -> ScanOutcome {
    assert!(!grid.is_empty());
    let values: Vec<f64> = grid.iter().map(|&a| f(a)).collect();
    let mut min_idx = 0;
    let mut max_idx = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[min_idx] {
            min_idx = k;
        }
        if v > values[max_idx] {
            max_idx = k;
        }
    }
    let min = refine(grid, &values, min_idx, false, &mut f);
    let max = refine(grid, &values, max_idx, true, &mut f);
    ScanOutcome { min, max }
}

fn refine(
    grid: &[AlphaValue],
    values: &[f64],
    best: usize,
    maximize: bool,
    f: &mut impl FnMut(AlphaValue) -> f64,
) -> ScanPoint {
    let start = ScanPoint {
        alpha: grid[best],
        value: values[best],
    };
    let step = (LOG_HI - LOG_LO) / (DEFAULT_GRID_POINTS - 1) as f64 * core::f64::consts::LN_10;
    // Bracket in ln α around the best grid point; exact endpoints win as-is.
    let lo = match best.checked_sub(1).map(|k| grid[k]) {
        Some(AlphaValue::Finite(v)) if v > 0.0 => v.ln(),
        Some(AlphaValue::One) => 0.0,
        Some(AlphaValue::Zero) => match grid[best] {
            AlphaValue::Finite(v) if v > 0.0 => v.ln() - step,
            _ => return start,
        },
        _ => return start,
    };
    let hi = match grid.get(best + 1) {
        Some(AlphaValue::Finite(v)) if *v > 0.0 => v.ln(),
        Some(AlphaValue::One) => 0.0,
        Some(AlphaValue::PosInfinity) => match grid[best] {
            AlphaValue::Finite(v) if v > 0.0 => v.ln() + step,
            _ => return start,
        },
        _ => return start,
    };
    if hi <= lo {
        return start;
    }
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |u: f64, f: &mut dyn FnMut(AlphaValue) -> f64| sign * f(AlphaValue::new(u.exp()));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = g(c, f);
    let mut fd = g(d, f);
    while b - a > REFINE_REL_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c, f);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d, f);
        }
    }
    let u = 0.5 * (a + b);
    let alpha = AlphaValue::new(u.exp());
    let value = f(alpha);
    let improved = if maximize {
        value > start.value
    } else {
        value < start.value
    };
    if improved {
        ScanPoint { alpha, value }
    } else {
        start
    }
}
