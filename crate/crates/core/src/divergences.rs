//! Rényi α-entropies and α-relative entropies over the full extended order
//! parameter, α-free-entropies against the semi-Gibbs reference, the quantum
//! Rényi divergence, and smoothed min/max relative entropies.
//!
//! Conventions: natural logarithms (everything in nats), `0/0 = 0`,
//! `x/0 = ∞`. Sums of powers are evaluated in the log domain so that
//! weighted energies up to `β·E ≈ 100` neither underflow nor overflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::spectra::{BlockSpectrum, DenseState, EngineSpec, SpectraError};

/// Below this distance from `α = 1` the closed-form Shannon limit is used;
/// the power-sum formula loses all precision there.
const ALPHA_ONE_GUARD: f64 = 1e-11;
/// Mass threshold for "support violation" checks on dense states.
const QUANTUM_SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DivergenceError {
    #[error("vectors have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("alpha must be nonnegative for this operation, got {0}")]
    NegativeAlpha(f64),
    #[error("smoothing parameter must lie in (0,1), got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// A point of the extended order parameter `α ∈ [-∞, ∞]`, with exact tags
/// for the four limit cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaValue {
    NegInfinity,
    Zero,
    One,
    PosInfinity,
    /// Finite, nonzero, not one.
    Finite(f64),
}

impl AlphaValue {
    /// Tags the limit points exactly; other values stay `Finite`.
    pub fn new(alpha: f64) -> AlphaValue {
        if alpha == 0.0 {
            AlphaValue::Zero
        } else if alpha == 1.0 {
            AlphaValue::One
        } else if alpha == f64::INFINITY {
            AlphaValue::PosInfinity
        } else if alpha == f64::NEG_INFINITY {
            AlphaValue::NegInfinity
        } else {
            AlphaValue::Finite(alpha)
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            AlphaValue::NegInfinity => f64::NEG_INFINITY,
            AlphaValue::Zero => 0.0,
            AlphaValue::One => 1.0,
            AlphaValue::PosInfinity => f64::INFINITY,
            AlphaValue::Finite(v) => *v,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            AlphaValue::NegInfinity => false,
            AlphaValue::Finite(v) => *v >= 0.0,
            _ => true,
        }
    }
}

impl Serialize for AlphaValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AlphaValue::PosInfinity => serializer.serialize_str("inf"),
            AlphaValue::NegInfinity => serializer.serialize_str("-inf"),
            other => serializer.serialize_f64(other.as_f64()),
        }
    }
}

impl<'de> Deserialize<'de> for AlphaValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(AlphaValue::new(v)),
            Repr::Text(s) => match s.as_str() {
                "inf" | "+inf" => Ok(AlphaValue::PosInfinity),
                "-inf" => Ok(AlphaValue::NegInfinity),
                other => other
                    .parse::<f64>()
                    .map(AlphaValue::new)
                    .map_err(serde::de::Error::custom),
            },
        }
    }
}

/// `log Σ e^{x_i}`, shifted by the maximum. Empty input gives `-∞`.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Rényi α-entropy `H_α(p) = sgn(α)/(1-α) · log Σ p_i^α`, with the limit
/// formulas at `α ∈ {-∞, 0, 1, ∞}`. For `α < 0` a vector with any zero
/// entry evaluates to `+∞` by convention (reported, not an error).
pub fn renyi_entropy(p: &[f64], a: AlphaValue) -> f64 {
    let support: Vec<f64> = p.iter().cloned().filter(|&x| x > 0.0).collect();
    let full_rank = support.len() == p.len();
    match a {
        AlphaValue::Zero => (support.len() as f64).ln(),
        AlphaValue::One => -support.iter().map(|&x| x * x.ln()).sum::<f64>(),
        AlphaValue::PosInfinity => -support
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            .ln(),
        AlphaValue::NegInfinity => {
            if !full_rank {
                f64::INFINITY
            } else {
                support.iter().cloned().fold(f64::INFINITY, f64::min).ln()
            }
        }
        AlphaValue::Finite(alpha) => {
            if (alpha - 1.0).abs() < ALPHA_ONE_GUARD {
                return renyi_entropy(p, AlphaValue::One);
            }
            if alpha > 0.0 {
                log_sum_exp(support.iter().map(|&x| alpha * x.ln())) / (1.0 - alpha)
            } else if !full_rank {
                f64::INFINITY
            } else {
                -log_sum_exp(support.iter().map(|&x| alpha * x.ln())) / (1.0 - alpha)
            }
        }
    }
}

/// Rényi α-relative entropy
/// `D_α(p‖q) = sgn(α)/(α-1) · log Σ p_i^α q_i^{1-α}` with the limit cases
///
/// * `D_∞ = log max p_i/q_i`,
/// * `D_{-∞} = D_∞(q‖p)`,
/// * `D_0 = -log Σ_{i: p_i≠0} q_i`,
/// * `D_1 = Σ p_i (log p_i - log q_i)`,
///
/// under the conventions `0/0 = 0` and `x/0 = ∞`. Support violations with
/// `α ≥ 1` give `+∞`, not an error.
pub fn renyi_relative_entropy(p: &[f64], q: &[f64], a: AlphaValue) -> f64 {
    assert_eq!(p.len(), q.len(), "p and q must have equal lengths");
    match a {
        AlphaValue::Zero => {
            let mass: f64 = p
                .iter()
                .zip(q)
                .filter(|(&pi, _)| pi > 0.0)
                .map(|(_, &qi)| qi)
                .sum();
            -mass.ln()
        }
        AlphaValue::One => {
            let mut d = 0.0;
            for (&pi, &qi) in p.iter().zip(q) {
                if pi > 0.0 {
                    if qi <= 0.0 {
                        return f64::INFINITY;
                    }
                    d += pi * (pi.ln() - qi.ln());
                }
            }
            d
        }
        AlphaValue::PosInfinity => {
            let mut worst = f64::NEG_INFINITY;
            for (&pi, &qi) in p.iter().zip(q) {
                if pi > 0.0 {
                    if qi <= 0.0 {
                        return f64::INFINITY;
                    }
                    worst = worst.max(pi.ln() - qi.ln());
                }
            }
            worst
        }
        AlphaValue::NegInfinity => renyi_relative_entropy(q, p, AlphaValue::PosInfinity),
        AlphaValue::Finite(alpha) => {
            if (alpha - 1.0).abs() < ALPHA_ONE_GUARD {
                return renyi_relative_entropy(p, q, AlphaValue::One);
            }
            let mut terms = Vec::with_capacity(p.len());
            for (&pi, &qi) in p.iter().zip(q) {
                if alpha > 0.0 {
                    if pi > 0.0 {
                        if qi <= 0.0 {
                            if alpha > 1.0 {
                                return f64::INFINITY;
                            }
                            continue; // q^{1-α} = 0 for α < 1
                        }
                        terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
                    }
                } else {
                    // α < 0: zeros of p blow up p^α unless q vanishes too.
                    if pi <= 0.0 {
                        if qi > 0.0 {
                            return f64::INFINITY;
                        }
                        continue; // 0/0 convention
                    }
                    if qi <= 0.0 {
                        continue; // q^{1-α} = 0^{>1} = 0
                    }
                    terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
                }
            }
            let lse = log_sum_exp(terms);
            if alpha >= 0.0 {
                lse / (alpha - 1.0)
            } else {
                lse / (1.0 - alpha)
            }
        }
    }
}

/// `α`-free-entropy against explicit weighted energies, in the Z-free form
/// `S_α = 1/(α-1) · log Σ p_i^α e^{-(1-α) w_i}` (for `α ≥ 0`).
///
/// This equals `D_α(p ‖ e^{-w}/Z) - log Z` identically, so it is invariant
/// under extending the arena with unpopulated sectors — the property the
/// clock construction relies on.
pub fn weighted_alpha_free_entropy(p: &[f64], w: &[f64], a: AlphaValue) -> f64 {
    assert_eq!(p.len(), w.len(), "p and w must have equal lengths");
    let support = || p.iter().zip(w).filter(|(&pi, _)| pi > 0.0);
    match a {
        AlphaValue::Zero => -log_sum_exp(support().map(|(_, &wi)| -wi)),
        AlphaValue::One => support().map(|(&pi, &wi)| pi * (pi.ln() + wi)).sum(),
        AlphaValue::PosInfinity => support()
            .map(|(&pi, &wi)| pi.ln() + wi)
            .fold(f64::NEG_INFINITY, f64::max),
        AlphaValue::Finite(alpha) if alpha > 0.0 => {
            if (alpha - 1.0).abs() < ALPHA_ONE_GUARD {
                return weighted_alpha_free_entropy(p, w, AlphaValue::One);
            }
            log_sum_exp(support().map(|(&pi, &wi)| alpha * pi.ln() - (1.0 - alpha) * wi))
                / (alpha - 1.0)
        }
        // Negative α: no Z-free form; go through D_α against the normalized
        // Gibbs vector of w.
        _ => {
            let log_z = log_sum_exp(w.iter().map(|&wi| -wi));
            let q: Vec<f64> = w.iter().map(|&wi| (-wi - log_z).exp()).collect();
            renyi_relative_entropy(p, &q, a) - log_z
        }
    }
}

/// `α`-free-entropy `S_α(p) = D_α(p ‖ γ1⊗γ2) - log Z1 Z2` of a block
/// spectrum in its arena. Defined for all `α`; the second laws quantify
/// over `α ≥ 0` (negative `α` feeds the signed-scan variant).
pub fn alpha_free_entropy(
    s: &BlockSpectrum,
    spec: &EngineSpec,
    a: AlphaValue,
) -> Result<f64, DivergenceError> {
    let w = spec.weighted_spectrum();
    if s.p().len() != w.dim() {
        return Err(DivergenceError::LengthMismatch(s.p().len(), w.dim()));
    }
    Ok(weighted_alpha_free_entropy(s.p(), w.weights(), a))
}

/// Helmholtz free-entropy `β1⟨E1⟩ + β2⟨E2⟩ - H_1(p)`, the `α → 1` limit of
/// the free-entropy family, computed from the marginal mean energies.
pub fn helmholtz_free_entropy(s: &BlockSpectrum, spec: &EngineSpec) -> f64 {
    let (e1, e2) = s.mean_energies(spec);
    spec.baths().beta1() * e1 + spec.baths().beta2() * e2 - renyi_entropy(s.p(), AlphaValue::One)
}

/// Quantum Rényi α-relative entropy: Petz branch
/// `(α-1)^{-1} log Tr[ρ^α σ^{1-α}]` for `α ∈ [0,1)`, sandwiched branch
/// `(α-1)^{-1} log Tr[(σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α]` for `α > 1`, and the
/// von Neumann relative entropy at `α = 1`. Requires `α ≥ 0`; a support
/// violation yields `+∞`.
pub fn quantum_renyi_divergence(
    rho: &DenseState,
    sigma: &DenseState,
    a: AlphaValue,
) -> Result<f64, DivergenceError> {
    if !a.is_nonnegative() {
        return Err(DivergenceError::NegativeAlpha(a.as_f64()));
    }
    if rho.dim() != sigma.dim() {
        return Err(DivergenceError::LengthMismatch(rho.dim(), sigma.dim()));
    }
    let clip = 1e-10;
    let (sig_eig, sig_vec) = linalg::hermitian_eigen(sigma.matrix());

    // Mass of ρ outside the support of σ.
    let mut kernel_mass = 0.0;
    for (k, &lambda) in sig_eig.iter().enumerate() {
        if lambda <= QUANTUM_SUPPORT_TOL {
            let v = sig_vec.column(k);
            kernel_mass += (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        }
    }
    let support_violated = kernel_mass > QUANTUM_SUPPORT_TOL;

    match a {
        AlphaValue::Zero => {
            // -log Tr[Π_ρ σ]
            let (rho_eig, rho_vec) = linalg::hermitian_eigen(rho.matrix());
            let mut mass = 0.0;
            for (k, &lambda) in rho_eig.iter().enumerate() {
                if lambda > QUANTUM_SUPPORT_TOL {
                    let v = rho_vec.column(k);
                    mass += (v.adjoint() * sigma.matrix() * v)[(0, 0)].re;
                }
            }
            Ok(-mass.ln())
        }
        AlphaValue::One => {
            if support_violated {
                return Ok(f64::INFINITY);
            }
            let entropy = linalg::von_neumann_entropy(rho.matrix(), QUANTUM_SUPPORT_TOL);
            let mut cross = 0.0;
            for (k, &lambda) in sig_eig.iter().enumerate() {
                if lambda > QUANTUM_SUPPORT_TOL {
                    let v = sig_vec.column(k);
                    cross += lambda.ln() * (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
                }
            }
            Ok(-entropy - cross)
        }
        AlphaValue::PosInfinity => {
            if support_violated {
                return Ok(f64::INFINITY);
            }
            // log λmax(σ^{-1/2} ρ σ^{-1/2}) on the support of σ.
            let inv_sqrt = linalg::hermitian_pow(sigma.matrix(), -0.5, clip);
            let m = &inv_sqrt * rho.matrix() * &inv_sqrt;
            let (eig, _) = linalg::hermitian_eigen(&m);
            Ok(eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ln())
        }
        AlphaValue::Finite(alpha) => {
            if (alpha - 1.0).abs() < ALPHA_ONE_GUARD {
                return quantum_renyi_divergence(rho, sigma, AlphaValue::One);
            }
            if alpha < 1.0 {
                // Petz branch; support mismatch drops mass silently only in
                // the σ^{1-α} factor, which is the correct α<1 convention.
                let rho_a = linalg::hermitian_pow(rho.matrix(), alpha, clip);
                let sig_b = linalg::hermitian_pow(sigma.matrix(), 1.0 - alpha, clip);
                let t = linalg::trace_product_re(&rho_a, &sig_b);
                Ok(t.ln() / (alpha - 1.0))
            } else {
                if support_violated {
                    return Ok(f64::INFINITY);
                }
                let x = (1.0 - alpha) / (2.0 * alpha);
                let sig_x = linalg::hermitian_pow(sigma.matrix(), x, clip);
                let m = &sig_x * rho.matrix() * &sig_x;
                let m_a = linalg::hermitian_pow(&m, alpha, clip);
                Ok(linalg::trace_re(&m_a).ln() / (alpha - 1.0))
            }
        }
        AlphaValue::NegInfinity => unreachable!("rejected above"),
    }
}

/// Smoothed min-relative entropy
/// `-log min{ q(S) : p(S) ≥ 1-ε }`, computed greedily by descending
/// `p_i/q_i` (stable on ties).
pub fn smoothed_dmin(p: &[f64], q: &[f64], eps: f64) -> Result<f64, DivergenceError> {
    if p.len() != q.len() {
        return Err(DivergenceError::LengthMismatch(p.len(), q.len()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DivergenceError::BadEpsilon(eps));
    }
    let order = ratio_order(p, q);
    let mut p_acc = 0.0;
    let mut q_acc = 0.0;
    for &k in &order {
        p_acc += p[k];
        q_acc += q[k];
        if p_acc >= 1.0 - eps {
            break;
        }
    }
    Ok(-q_acc.ln())
}

/// Smoothed max-relative entropy: the log of the smallest `λ` such that a
/// sub-normalized `p'` within total-variation `ε` of `p` satisfies
/// `p' ≤ λ q`. Computed by capping the largest ratios (water filling);
/// up to `ε` of mass is removed and no renormalization is applied.
pub fn smoothed_dmax(p: &[f64], q: &[f64], eps: f64) -> Result<f64, DivergenceError> {
    if p.len() != q.len() {
        return Err(DivergenceError::LengthMismatch(p.len(), q.len()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DivergenceError::BadEpsilon(eps));
    }
    // Mass sitting on q = 0 must be removed entirely.
    let mut budget = eps;
    let mut finite: Vec<(f64, f64, f64)> = Vec::new(); // (ratio, p, q)
    for (&pi, &qi) in p.iter().zip(q) {
        if qi <= 0.0 {
            if pi > 0.0 {
                budget -= pi;
            }
        } else if pi > 0.0 {
            finite.push((pi / qi, pi, qi));
        }
    }
    if budget < 0.0 {
        return Ok(f64::INFINITY);
    }
    finite.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut p_acc = 0.0;
    let mut q_acc = 0.0;
    for (k, &(_, pi, qi)) in finite.iter().enumerate() {
        p_acc += pi;
        q_acc += qi;
        let lambda = (p_acc - budget) / q_acc;
        let next_ratio = finite.get(k + 1).map_or(0.0, |t| t.0);
        if lambda >= next_ratio {
            return Ok(lambda.max(0.0).ln());
        }
    }
    Ok(f64::NEG_INFINITY)
}

fn ratio_order(p: &[f64], q: &[f64]) -> Vec<usize> {
    let ratio = |k: usize| -> f64 {
        if p[k] <= 0.0 {
            0.0 // covers 0/0 = 0
        } else if q[k] <= 0.0 {
            f64::INFINITY
        } else {
            p[k] / q[k]
        }
    };
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
    order
}
