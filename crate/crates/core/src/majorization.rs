//! Majorization, fine-graining, thermo-majorization Lorenz curves, trumping
//! checks, and the LP oracle for d-majorization with explicit
//! stochastic-matrix witnesses.
//!
//! Two independent routes decide the non-catalytic second law: Lorenz-curve
//! dominance with the semi-Gibbs weights as reference measure, and direct
//! feasibility of a Gibbs-preserving stochastic map. They are cross-checked
//! against each other throughout the verification harness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergences::renyi_entropy;
use crate::lp::{self, LpOutcome};
use crate::scan;
use crate::spectra::{BlockSpectrum, EngineSpec};

/// Partial-sum slack for plain majorization.
pub const MAJORIZATION_TOL: f64 = 1e-10;
/// Lorenz-curve dominance slack.
pub const CURVE_TOL: f64 = 1e-10;
/// LP equality relaxation.
pub const LP_TOL: f64 = 1e-9;
/// Vectors longer than this are rejected by the LP route.
pub const LP_DIM_CAP: usize = 64;
/// Regularization for the ε-variant trumping check.
pub const TRAMP_EPSILON: f64 = 1e-9;

const LP_MAX_ITERS: usize = 200_000;

#[derive(Debug, Error)]
pub enum MajorizationError {
    #[error("dimension {0} exceeds LP cap {LP_DIM_CAP}")]
    LpDimCap(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("fine-graining multiplicity at index {0} must be a positive integer")]
    BadMultiplicity(usize),
    #[error("reference distribution must have full support (q[{0}] = {1})")]
    ReferenceNotFullSupport(usize, f64),
    #[error(
        "thermo-majorization requires a shared spec; got different arenas (clock-extend first)"
    )]
    SpecMismatch,
    #[error("state dimension {got} does not match spec dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Piecewise-linear thermo-majorization curve: `x` accumulates unnormalized
/// Gibbs weights `e^{-w}` (ending at `Z1·Z2`), `y` accumulates probability
/// (ending at 1), indices taken in order of descending `p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzCurve {
    points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn x_end(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }

    /// Value at `x` by linear interpolation; clamped to the endpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        if x <= pts[0].0 {
            return pts[0].1;
        }
        if x >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let k = pts.partition_point(|&(px, _)| px < x);
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        if x1 == x0 {
            return y0.max(y1);
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `self(x) ≥ other(x) - tol` at every breakpoint of either curve.
    pub fn dominates(&self, other: &LorenzCurve, tol: f64) -> bool {
        self.points
            .iter()
            .map(|&(x, _)| x)
            .chain(other.points.iter().map(|&(x, _)| x))
            .all(|x| self.eval(x) >= other.eval(x) - tol)
    }

    /// Largest violation of concavity (positive slope increase), for tests.
    pub fn concavity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut last_slope = f64::INFINITY;
        for w in self.points.windows(2) {
            let dx = w[1].0 - w[0].0;
            if dx <= 0.0 {
                continue;
            }
            let slope = (w[1].1 - w[0].1) / dx;
            worst = worst.max(slope - last_slope);
            last_slope = slope;
        }
        worst
    }
}

/// A probability vector expanded by integer multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct FineGrained {
    gamma: Vec<f64>,
    weights: Vec<usize>,
}

impl FineGrained {
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn total(&self) -> usize {
        self.weights.iter().sum()
    }
}

/// A column-stochastic matrix certifying a d-majorization, with the
/// residuals of the two image constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StochasticWitness {
    /// `matrix[m][i]` maps source index `i` to target index `m`.
    pub matrix: Vec<Vec<f64>>,
    /// `max |Λp - p'|`.
    pub residual_p: f64,
    /// `max |Λq - q'|`.
    pub residual_q: f64,
}

impl StochasticWitness {
    /// Applies the witness to a vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.matrix.len();
        let mut y = vec![0.0; n];
        for (m, row) in self.matrix.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                y[m] += v * x[i];
            }
        }
        y
    }

    /// Largest deviation of a column sum from one.
    pub fn column_sum_defect(&self) -> f64 {
        let n = self.matrix.len();
        let mut worst = 0.0f64;
        for i in 0..self.matrix[0].len() {
            let s: f64 = (0..n).map(|m| self.matrix[m][i]).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }
}

/// Verdict of the d-majorization LP.
#[derive(Debug, Clone)]
pub enum DMajorization {
    Feasible(StochasticWitness),
    Infeasible,
    /// Solver iteration cap; distinct from infeasible by construction.
    Undecided,
}

impl DMajorization {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DMajorization::Feasible(_))
    }
}

/// Trumping verdict. `YesEpsilon` certifies the ε-regularized variant used
/// when the target (or source) is not of full rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrampVerdict {
    Yes,
    YesEpsilon,
    No,
}

/// `p ⪰ p2`: every partial sum of descending-sorted `p` dominates the
/// corresponding partial sum of `p2` and the totals agree. Shorter vectors
/// are padded with zeros.
pub fn majorizes(p: &[f64], p2: &[f64]) -> bool {
    let len = p.len().max(p2.len());
    let sorted_desc = |v: &[f64]| {
        let mut s = v.to_vec();
        s.resize(len, 0.0);
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let a = sorted_desc(p);
    let b = sorted_desc(p2);
    let mut sa = 0.0;
    let mut sb = 0.0;
    for k in 0..len {
        sa += a[k];
        sb += b[k];
        if sa < sb - MAJORIZATION_TOL {
            return false;
        }
    }
    (sa - sb).abs() <= MAJORIZATION_TOL
}

/// Expands each `p_i` into `d_i` equal entries `p_i / d_i`.
pub fn fine_grain(p: &[f64], weights: &[usize]) -> Result<FineGrained, MajorizationError> {
    if p.len() != weights.len() {
        return Err(MajorizationError::LengthMismatch(p.len(), weights.len()));
    }
    if let Some(k) = weights.iter().position(|&d| d == 0) {
        return Err(MajorizationError::BadMultiplicity(k));
    }
    let mut gamma = Vec::with_capacity(weights.iter().sum());
    for (&pi, &di) in p.iter().zip(weights) {
        for _ in 0..di {
            gamma.push(pi / di as f64);
        }
    }
    Ok(FineGrained {
        gamma,
        weights: weights.to_vec(),
    })
}

/// Thermo-majorization Lorenz curve of a block spectrum against its spec's
/// semi-Gibbs weights. Indices are ordered by `p/q` descending with stable
/// index order on ties (ties give collinear points, so the curve is
/// unaffected).
pub fn thermo_lorenz_curve(
    s: &BlockSpectrum,
    spec: &EngineSpec,
) -> Result<LorenzCurve, MajorizationError> {
    if s.p().len() != spec.joint_dim() {
        return Err(MajorizationError::DimensionMismatch {
            expected: spec.joint_dim(),
            got: s.p().len(),
        });
    }
    let w = spec.weighted_spectrum();
    let gibbs: Vec<f64> = w.weights().iter().map(|&wi| (-wi).exp()).collect();
    Ok(lorenz_from_parts(s.p(), &gibbs))
}

fn lorenz_from_parts(p: &[f64], gibbs: &[f64]) -> LorenzCurve {
    let ratio = |k: usize| -> f64 {
        if p[k] <= 0.0 {
            0.0
        } else if gibbs[k] <= 0.0 {
            f64::INFINITY
        } else {
            p[k] / gibbs[k]
        }
    };
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
    let mut points = Vec::with_capacity(p.len() + 1);
    points.push((0.0, 0.0));
    let mut x = 0.0;
    let mut y = 0.0;
    for &k in &order {
        x += gibbs[k];
        y += p[k];
        points.push((x, y));
    }
    LorenzCurve { points }
}

/// Non-catalytic transformation check: the curve of `a` dominates the curve
/// of `b` everywhere on `[0, Z1 Z2]`. Both states must live in the same
/// arena; Hamiltonian changes must be clock-extended first.
pub fn thermo_majorizes(
    a: &BlockSpectrum,
    b: &BlockSpectrum,
    spec_a: &EngineSpec,
    spec_b: &EngineSpec,
) -> Result<bool, MajorizationError> {
    if spec_a != spec_b {
        return Err(MajorizationError::SpecMismatch);
    }
    let fa = thermo_lorenz_curve(a, spec_a)?;
    let fb = thermo_lorenz_curve(b, spec_b)?;
    Ok(fa.dominates(&fb, CURVE_TOL))
}

/// Decides whether a stochastic matrix `Λ` exists with `Λp = p2`, `Λq = q2`
/// (the d-majorization feasibility problem), returning it as a witness when
/// one exists. Equalities are relaxed to `|·| ≤ 1e-9` in floating point.
pub fn d_majorize_lp(
    p: &[f64],
    q: &[f64],
    p2: &[f64],
    q2: &[f64],
) -> Result<DMajorization, MajorizationError> {
    let n = p.len();
    if q.len() != n || p2.len() != n || q2.len() != n {
        return Err(MajorizationError::LengthMismatch(
            n,
            q.len().max(p2.len()).max(q2.len()),
        ));
    }
    if n > LP_DIM_CAP {
        return Err(MajorizationError::LpDimCap(n));
    }
    for (k, &qi) in q.iter().enumerate() {
        if qi <= 0.0 {
            return Err(MajorizationError::ReferenceNotFullSupport(k, qi));
        }
    }
    for (k, &qi) in q2.iter().enumerate() {
        if qi <= 0.0 {
            return Err(MajorizationError::ReferenceNotFullSupport(k, qi));
        }
    }

    // Variable (i → m) at index i*n + m; rows: n column sums, n p-images,
    // n q-images.
    let var = |i: usize, m: usize| i * n + m;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(3 * n);
    let mut rhs: Vec<f64> = Vec::with_capacity(3 * n);
    for i in 0..n {
        let mut row = vec![0.0; n * n];
        for m in 0..n {
            row[var(i, m)] = 1.0;
        }
        rows.push(row);
        rhs.push(1.0);
    }
    for m in 0..n {
        let mut row = vec![0.0; n * n];
        for i in 0..n {
            row[var(i, m)] = p[i];
        }
        rows.push(row);
        rhs.push(p2[m]);
    }
    for m in 0..n {
        let mut row = vec![0.0; n * n];
        for i in 0..n {
            row[var(i, m)] = q[i];
        }
        rows.push(row);
        rhs.push(q2[m]);
    }

    match lp::feasible_point(&rows, &rhs, LP_TOL, LP_MAX_ITERS) {
        LpOutcome::Feasible(x) => {
            let mut matrix = vec![vec![0.0; n]; n];
            for i in 0..n {
                for m in 0..n {
                    matrix[m][i] = x[var(i, m)].max(0.0);
                }
            }
            let witness = StochasticWitness {
                matrix,
                residual_p: 0.0,
                residual_q: 0.0,
            };
            let image_p = witness.apply(p);
            let image_q = witness.apply(q);
            let res = |img: &[f64], target: &[f64]| {
                img.iter()
                    .zip(target)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            };
            let witness = StochasticWitness {
                residual_p: res(&image_p, p2),
                residual_q: res(&image_q, q2),
                ..witness
            };
            Ok(DMajorization::Feasible(witness))
        }
        LpOutcome::Infeasible { .. } => Ok(DMajorization::Infeasible),
        LpOutcome::Undecided => Ok(DMajorization::Undecided),
    }
}

/// Catalytic majorization ("p tramps p2") via Rényi-entropy conditions.
///
/// Plain majorization short-circuits to `Yes` (a trivial catalyst works).
/// Full-rank pairs are decided on the signed α grid; otherwise the target
/// is regularized toward uniform with `ε = 1e-9` and the positive-α family
/// decides, yielding the `YesEpsilon` verdict of the ε-variant lemma.
pub fn tramps(p: &[f64], p2: &[f64]) -> TrampVerdict {
    let len = p.len().max(p2.len());
    let mut a = p.to_vec();
    let mut b = p2.to_vec();
    a.resize(len, 0.0);
    b.resize(len, 0.0);
    if majorizes(&a, &b) {
        return TrampVerdict::Yes;
    }
    let full_rank = |v: &[f64]| v.iter().all(|&x| x > 0.0);
    if full_rank(&a) && full_rank(&b) {
        let grid = scan::signed_alpha_grid(scan::DEFAULT_GRID_POINTS);
        let ok = grid
            .iter()
            .all(|&alpha| renyi_entropy(&a, alpha) <= renyi_entropy(&b, alpha) + 1e-12);
        return if ok {
            TrampVerdict::Yes
        } else {
            TrampVerdict::No
        };
    }
    let uniform = 1.0 / len as f64;
    let reg: Vec<f64> = b
        .iter()
        .map(|&x| (1.0 - TRAMP_EPSILON) * x + TRAMP_EPSILON * uniform)
        .collect();
    let grid = scan::alpha_grid(scan::DEFAULT_GRID_POINTS);
    let ok = grid
        .iter()
        .all(|&alpha| renyi_entropy(&a, alpha) <= renyi_entropy(&reg, alpha) + 1e-12);
    if ok {
        TrampVerdict::YesEpsilon
    } else {
        TrampVerdict::No
    }
}
