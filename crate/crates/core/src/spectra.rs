//! Hamiltonians, bath parameters, semi-Gibbs states, weighted spectra, and
//! the reduction of dense states to block-diagonal spectra.
//!
//! The arena for every computation is an [`EngineSpec`]: two energy-level
//! lists and the two inverse temperatures. Its weighted spectrum
//! `w_ij = β1·E_i + β2·E_j` defines the degeneracy blocks in which arbitrary
//! states dephase; its semi-Gibbs vector `q_ij ∝ e^{-w_ij}` is the free
//! reference state for every divergence in the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// Absolute tolerance for grouping weighted energies into degenerate blocks.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Probability vectors must sum to one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Hermiticity / trace tolerance for dense states.
pub const DENSE_TOL: f64 = 1e-10;
/// A dense state counts as block-diagonal if it equals its own dephasing
/// entrywise within this tolerance.
pub const BLOCK_DIAGONAL_TOL: f64 = 1e-9;
/// Eigenvalues of dense states below this (after the `-1e-10` validity
/// check) are clipped to exactly zero when extracting a spectrum.
pub const EIGENVALUE_CLIP: f64 = 1e-12;
/// Default cap on the joint dimension `d1 * d2`.
pub const DEFAULT_DIM_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("energy level list is empty")]
    EmptyLevels,
    #[error("energy level {index} is not finite: {value}")]
    NonFiniteLevel { index: usize, value: f64 },
    #[error("inverse temperature must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("joint dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("probability vector sums to {sum}, not 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("probability entry {index} is negative: {value}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("matrix is not Hermitian: max asymmetry {0}")]
    NotHermitian(f64),
    #[error("matrix has trace {0}, not 1")]
    BadTrace(f64),
    #[error("matrix has negative eigenvalue {0}")]
    NegativeEigenvalue(f64),
    #[error("state is not block-diagonal in the weighted-energy eigenbasis: off-block mass {0}")]
    NotBlockDiagonal(f64),
}

/// Ordered energy levels of one subsystem Hamiltonian, shift-normalized so
/// the lowest level is exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevels {
    levels: Vec<f64>,
}

impl EnergyLevels {
    /// Builds a level list, shifting all energies so that `min = 0`.
    pub fn new(mut levels: Vec<f64>) -> Result<Self, SpectraError> {
        if levels.is_empty() {
            return Err(SpectraError::EmptyLevels);
        }
        for (index, &value) in levels.iter().enumerate() {
            if !value.is_finite() {
                return Err(SpectraError::NonFiniteLevel { index, value });
            }
        }
        let min = levels.iter().cloned().fold(f64::INFINITY, f64::min);
        for e in &mut levels {
            *e -= min;
        }
        Ok(Self { levels })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `log Z = log Σ_i e^{-β E_i}`, evaluated by log-sum-exp.
    pub fn log_partition(&self, beta: f64) -> f64 {
        crate::divergences::log_sum_exp(self.levels.iter().map(|&e| -beta * e))
    }

    /// Local Gibbs probabilities `e^{-β E_i} / Z`.
    pub fn gibbs(&self, beta: f64) -> Vec<f64> {
        let log_z = self.log_partition(beta);
        self.levels
            .iter()
            .map(|&e| (-beta * e - log_z).exp())
            .collect()
    }
}

/// The two inverse temperatures. `beta1 < beta2` (bath 1 hotter) is only
/// required by the engine module; everything else accepts any positive pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathPair {
    beta1: f64,
    beta2: f64,
}

impl BathPair {
    pub fn new(beta1: f64, beta2: f64) -> Result<Self, SpectraError> {
        if !beta1.is_finite() || beta1 <= 0.0 {
            return Err(SpectraError::NonPositiveBeta(beta1));
        }
        if !beta2.is_finite() || beta2 <= 0.0 {
            return Err(SpectraError::NonPositiveBeta(beta2));
        }
        Ok(Self { beta1, beta2 })
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    /// Bath 1 strictly hotter than bath 2.
    pub fn engine_oriented(&self) -> bool {
        self.beta1 < self.beta2
    }
}

/// The static arena: two subsystem Hamiltonians and the bath pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    h1: EnergyLevels,
    h2: EnergyLevels,
    baths: BathPair,
}

impl EngineSpec {
    pub fn new(h1: EnergyLevels, h2: EnergyLevels, baths: BathPair) -> Result<Self, SpectraError> {
        Self::with_dim_cap(h1, h2, baths, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(
        h1: EnergyLevels,
        h2: EnergyLevels,
        baths: BathPair,
        cap: usize,
    ) -> Result<Self, SpectraError> {
        let dim = h1.len() * h2.len();
        if dim > cap {
            return Err(SpectraError::DimensionCap { dim, cap });
        }
        Ok(Self { h1, h2, baths })
    }

    pub fn h1(&self) -> &EnergyLevels {
        &self.h1
    }

    pub fn h2(&self) -> &EnergyLevels {
        &self.h2
    }

    pub fn baths(&self) -> &BathPair {
        &self.baths
    }

    pub fn d1(&self) -> usize {
        self.h1.len()
    }

    pub fn d2(&self) -> usize {
        self.h2.len()
    }

    pub fn joint_dim(&self) -> usize {
        self.d1() * self.d2()
    }

    /// Flat product index of `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.d2() + j
    }

    /// Weighted energies `w_ij = β1 E_i + β2 E_j` with degenerate blocks
    /// grouped at absolute tolerance [`DEGENERACY_TOL`].
    pub fn weighted_spectrum(&self) -> WeightedSpectrum {
        let mut w = Vec::with_capacity(self.joint_dim());
        for &e1 in self.h1.levels() {
            for &e2 in self.h2.levels() {
                w.push(self.baths.beta1 * e1 + self.baths.beta2 * e2);
            }
        }
        let mut spectrum = WeightedSpectrum::from_weights(w, DEGENERACY_TOL);
        spectrum.d1 = self.d1();
        spectrum.d2 = self.d2();
        spectrum
    }

    /// Semi-Gibbs state `q_ij = e^{-β1 E_i} e^{-β2 E_j} / (Z1 Z2)`, the outer
    /// product of the two local Gibbs vectors.
    pub fn semi_gibbs(&self) -> SemiGibbs {
        let log_z1 = self.h1.log_partition(self.baths.beta1);
        let log_z2 = self.h2.log_partition(self.baths.beta2);
        let mut q = Vec::with_capacity(self.joint_dim());
        let mut log_q = Vec::with_capacity(self.joint_dim());
        for &e1 in self.h1.levels() {
            for &e2 in self.h2.levels() {
                let lq = -self.baths.beta1 * e1 - log_z1 - self.baths.beta2 * e2 - log_z2;
                log_q.push(lq);
                q.push(lq.exp());
            }
        }
        SemiGibbs {
            q,
            log_q,
            log_z1,
            log_z2,
        }
    }

    /// The spec with subsystems exchanged: `(H2, H1)`, same baths.
    pub fn swapped(&self) -> EngineSpec {
        EngineSpec {
            h1: self.h2.clone(),
            h2: self.h1.clone(),
            baths: self.baths,
        }
    }
}

/// Weighted energies over product indices, with their degeneracy blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSpectrum {
    w: Vec<f64>,
    /// Partition of `0..w.len()` into groups of equal `w` (within tolerance),
    /// each group sorted ascending.
    blocks: Vec<Vec<usize>>,
    /// `block_of[k]` is the block index containing `k`.
    block_of: Vec<usize>,
    d1: usize,
    d2: usize,
}

impl WeightedSpectrum {
    /// Groups raw weights into degeneracy blocks. The product factorization
    /// defaults to `(1, n)`; [`EngineSpec::weighted_spectrum`] attaches the
    /// real `(d1, d2)`.
    pub fn from_weights(w: Vec<f64>, tol: f64) -> Self {
        let mut order: Vec<usize> = (0..w.len()).collect();
        order.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &k in &order {
            match blocks.last_mut() {
                Some(block) if (w[k] - w[*block.last().unwrap()]).abs() <= tol => block.push(k),
                _ => blocks.push(vec![k]),
            }
        }
        for block in &mut blocks {
            block.sort_unstable();
        }
        let mut block_of = vec![0; w.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &k in block {
                block_of[k] = b;
            }
        }
        let dim = w.len();
        Self {
            w,
            blocks,
            block_of,
            d1: 1,
            d2: dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, index: usize) -> usize {
        self.block_of[index]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }
}

/// Semi-Gibbs probability vector with its natural logs and both
/// log-partition functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiGibbs {
    q: Vec<f64>,
    log_q: Vec<f64>,
    log_z1: f64,
    log_z2: f64,
}

impl SemiGibbs {
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn log_q(&self) -> &[f64] {
        &self.log_q
    }

    pub fn log_z1(&self) -> f64 {
        self.log_z1
    }

    pub fn log_z2(&self) -> f64 {
        self.log_z2
    }

    pub fn log_z_product(&self) -> f64 {
        self.log_z1 + self.log_z2
    }
}

/// Probability vector over product energy eigenstates `(i, j)`; the
/// canonical state representation for every second-law check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpectrum {
    p: Vec<f64>,
    d1: usize,
    d2: usize,
}

impl BlockSpectrum {
    /// Validates nonnegativity and normalization (within
    /// [`NORMALIZATION_TOL`]); tiny negatives above `-1e-12` are clipped.
    pub fn new(p: Vec<f64>, d1: usize, d2: usize) -> Result<Self, SpectraError> {
        if p.len() != d1 * d2 {
            return Err(SpectraError::DimensionMismatch {
                expected: d1 * d2,
                got: p.len(),
            });
        }
        let mut p = p;
        for (index, value) in p.iter_mut().enumerate() {
            if *value < 0.0 {
                if *value < -NORMALIZATION_TOL {
                    return Err(SpectraError::NegativeProbability {
                        index,
                        value: *value,
                    });
                }
                *value = 0.0;
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(SpectraError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        Ok(Self { p, d1, d2 })
    }

    /// The semi-Gibbs state of a spec as a `BlockSpectrum`.
    pub fn semi_gibbs_of(spec: &EngineSpec) -> BlockSpectrum {
        BlockSpectrum {
            p: spec.semi_gibbs().q,
            d1: spec.d1(),
            d2: spec.d2(),
        }
    }

    /// Point mass on the product index `(i, j)`.
    pub fn pure(spec: &EngineSpec, i: usize, j: usize) -> BlockSpectrum {
        let mut p = vec![0.0; spec.joint_dim()];
        p[spec.index(i, j)] = 1.0;
        BlockSpectrum {
            p,
            d1: spec.d1(),
            d2: spec.d2(),
        }
    }

    /// Joint spectrum `p_ij = a_i b_j` from two local distributions.
    pub fn product(a: &[f64], b: &[f64]) -> Result<BlockSpectrum, SpectraError> {
        let mut p = Vec::with_capacity(a.len() * b.len());
        for &x in a {
            for &y in b {
                p.push(x * y);
            }
        }
        BlockSpectrum::new(p, a.len(), b.len())
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.d2 + j]
    }

    /// Marginal over the second subsystem.
    pub fn marginal1(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d1];
        for i in 0..self.d1 {
            for j in 0..self.d2 {
                m[i] += self.value(i, j);
            }
        }
        m
    }

    /// Marginal over the first subsystem.
    pub fn marginal2(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d2];
        for i in 0..self.d1 {
            for j in 0..self.d2 {
                m[j] += self.value(i, j);
            }
        }
        m
    }

    /// Exact index permutation `p'_{ji} = p_{ij}` (subsystem exchange).
    pub fn swapped(&self) -> BlockSpectrum {
        let mut p = vec![0.0; self.p.len()];
        for i in 0..self.d1 {
            for j in 0..self.d2 {
                p[j * self.d1 + i] = self.value(i, j);
            }
        }
        BlockSpectrum {
            p,
            d1: self.d2,
            d2: self.d1,
        }
    }

    /// Mean subsystem energies `(⟨E1⟩, ⟨E2⟩)` under a spec's level lists.
    pub fn mean_energies(&self, spec: &EngineSpec) -> (f64, f64) {
        let m1 = self.marginal1();
        let m2 = self.marginal2();
        let e1 = m1.iter().zip(spec.h1.levels()).map(|(p, e)| p * e).sum();
        let e2 = m2.iter().zip(spec.h2.levels()).map(|(p, e)| p * e).sum();
        (e1, e2)
    }

    /// Max-norm distance from the outer product of own marginals.
    pub fn product_defect(&self) -> f64 {
        let m1 = self.marginal1();
        let m2 = self.marginal2();
        let mut worst = 0.0f64;
        for i in 0..self.d1 {
            for j in 0..self.d2 {
                worst = worst.max((self.value(i, j) - m1[i] * m2[j]).abs());
            }
        }
        worst
    }

    pub(crate) fn from_parts_normalized(mut p: Vec<f64>, d1: usize, d2: usize) -> BlockSpectrum {
        for value in p.iter_mut() {
            if *value < EIGENVALUE_CLIP {
                *value = 0.0;
            }
        }
        let sum: f64 = p.iter().sum();
        for value in p.iter_mut() {
            *value /= sum;
        }
        BlockSpectrum { p, d1, d2 }
    }
}

/// Hermitian, positive, trace-one matrix in the product energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    m: DMatrix<Complex64>,
}

impl DenseState {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, SpectraError> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(SpectraError::DimensionMismatch {
                expected: n,
                got: m.ncols(),
            });
        }
        let mut asym = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                asym = asym.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        if asym > DENSE_TOL {
            return Err(SpectraError::NotHermitian(asym));
        }
        let trace: Complex64 = (0..n).map(|k| m[(k, k)]).sum();
        if (trace.re - 1.0).abs() > DENSE_TOL || trace.im.abs() > DENSE_TOL {
            return Err(SpectraError::BadTrace(trace.re));
        }
        let (eigenvalues, _) = linalg::hermitian_eigen(&m);
        if let Some(&min) = eigenvalues
            .iter()
            .min_by(|a, b| a.total_cmp(b))
            .filter(|&&min| min < -DENSE_TOL)
        {
            return Err(SpectraError::NegativeEigenvalue(min));
        }
        Ok(Self { m })
    }

    /// Diagonal density matrix from a block spectrum.
    pub fn from_block_spectrum(s: &BlockSpectrum) -> DenseState {
        let n = s.p().len();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Complex64::new(s.p()[k], 0.0);
        }
        DenseState { m }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }
}

/// Pinches a state to the weighted-energy blocks: `Σ_b P_b ρ P_b`. Entries
/// connecting different blocks are zeroed; diagonal entries and coherences
/// inside a degenerate block are untouched.
pub fn block_dephase(rho: &DenseState, w: &WeightedSpectrum) -> Result<DenseState, SpectraError> {
    if rho.dim() != w.dim() {
        return Err(SpectraError::DimensionMismatch {
            expected: w.dim(),
            got: rho.dim(),
        });
    }
    let mut m = rho.m.clone();
    for r in 0..w.dim() {
        for c in 0..w.dim() {
            if !w.same_block(r, c) {
                m[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(DenseState { m })
}

/// Largest |entry| of `ρ - dephase(ρ)`, i.e. the off-block coherence mass.
pub fn off_block_mass(rho: &DenseState, w: &WeightedSpectrum) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..w.dim() {
        for c in 0..w.dim() {
            if !w.same_block(r, c) {
                worst = worst.max(rho.m[(r, c)].norm());
            }
        }
    }
    worst
}

/// Extracts a block spectrum from a block-diagonal dense state by
/// eigendecomposing each degenerate weighted-energy block. Block unitaries
/// commute with the weighted Hamiltonian, so the eigenvalues inherit the
/// block's weighted energy; singleton blocks contribute their diagonal
/// entry directly.
///
/// Callers must dephase first: inputs farther than [`BLOCK_DIAGONAL_TOL`]
/// from their own dephasing are rejected, since the result would only cover
/// the block-diagonal part of the state.
pub fn block_spectrum(
    rho: &DenseState,
    w: &WeightedSpectrum,
) -> Result<BlockSpectrum, SpectraError> {
    if rho.dim() != w.dim() {
        return Err(SpectraError::DimensionMismatch {
            expected: w.dim(),
            got: rho.dim(),
        });
    }
    let mass = off_block_mass(rho, w);
    if mass > BLOCK_DIAGONAL_TOL {
        return Err(SpectraError::NotBlockDiagonal(mass));
    }
    let mut p = vec![0.0; w.dim()];
    for block in w.blocks() {
        if block.len() == 1 {
            p[block[0]] = rho.m[(block[0], block[0])].re;
        } else {
            let mut sub = DMatrix::zeros(block.len(), block.len());
            for (r, &gr) in block.iter().enumerate() {
                for (c, &gc) in block.iter().enumerate() {
                    sub[(r, c)] = rho.m[(gr, gc)];
                }
            }
            let (eigenvalues, _) = linalg::hermitian_eigen(&sub);
            // Any labeling within the block is valid: the weighted energies
            // agree to DEGENERACY_TOL. Sort descending for determinism.
            let mut eig = eigenvalues;
            eig.sort_by(|a, b| b.total_cmp(a));
            for (&k, &lambda) in block.iter().zip(eig.iter()) {
                p[k] = lambda;
            }
        }
    }
    Ok(BlockSpectrum::from_parts_normalized(p, w.d1, w.d2))
}

/// As [`block_spectrum`] using the spec's own weighted spectrum.
pub fn block_spectrum_for(
    rho: &DenseState,
    spec: &EngineSpec,
) -> Result<BlockSpectrum, SpectraError> {
    block_spectrum(rho, &spec.weighted_spectrum())
}
