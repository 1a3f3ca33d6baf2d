//! Feasibility verdicts for state transformations, clock extension for
//! Hamiltonian changes, free-entropy distance, one-shot work quantities, and
//! irreversibility reports.
//!
//! A transformation is catalytically feasible iff `S_α` does not increase
//! for every `α ≥ 0`; the guaranteed extraction budget is
//! `S_d = inf_α ΔS_α = β1·W1 + β2·W2` and the reverse-direction cost is
//! `sup_α ΔS_α`. The budget line never fixes the individual `(W1, W2)`
//! split, so a [`SplitRule`] makes that convention explicit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergences::{renyi_relative_entropy, weighted_alpha_free_entropy, AlphaValue};
use crate::majorization::{self, MajorizationError};
use crate::scan::{self, ScanOutcome};
use crate::spectra::{BathPair, BlockSpectrum, EnergyLevels, EngineSpec, SpectraError};

/// Feasibility slack in nats: verdicts within this of zero are `marginal`.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("initial and final specs must share the same bath pair")]
    BathMismatch,
    #[error("state dimension {got} does not match spec dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Majorization(#[from] MajorizationError),
}

/// A state transformation `(ρ, H) → (σ', H')` between two arenas that share
/// the bath pair. Dimensions may differ (Hamiltonian change).
#[derive(Debug, Clone, PartialEq)]
pub struct Transformation {
    initial_state: BlockSpectrum,
    initial_spec: EngineSpec,
    final_state: BlockSpectrum,
    final_spec: EngineSpec,
}

impl Transformation {
    pub fn new(
        initial_state: BlockSpectrum,
        initial_spec: EngineSpec,
        final_state: BlockSpectrum,
        final_spec: EngineSpec,
    ) -> Result<Self, TransformError> {
        if initial_spec.baths() != final_spec.baths() {
            return Err(TransformError::BathMismatch);
        }
        if initial_state.p().len() != initial_spec.joint_dim() {
            return Err(TransformError::DimensionMismatch {
                expected: initial_spec.joint_dim(),
                got: initial_state.p().len(),
            });
        }
        if final_state.p().len() != final_spec.joint_dim() {
            return Err(TransformError::DimensionMismatch {
                expected: final_spec.joint_dim(),
                got: final_state.p().len(),
            });
        }
        Ok(Self {
            initial_state,
            initial_spec,
            final_state,
            final_spec,
        })
    }

    pub fn identity(state: BlockSpectrum, spec: EngineSpec) -> Result<Self, TransformError> {
        Transformation::new(state.clone(), spec.clone(), state, spec)
    }

    pub fn initial_state(&self) -> &BlockSpectrum {
        &self.initial_state
    }

    pub fn initial_spec(&self) -> &EngineSpec {
        &self.initial_spec
    }

    pub fn final_state(&self) -> &BlockSpectrum {
        &self.final_state
    }

    pub fn final_spec(&self) -> &EngineSpec {
        &self.final_spec
    }

    /// Both endpoints live in the same arena (no Hamiltonian change).
    pub fn same_arena(&self) -> bool {
        self.initial_spec == self.final_spec
    }

    pub fn reversed(&self) -> Transformation {
        Transformation {
            initial_state: self.final_state.clone(),
            initial_spec: self.final_spec.clone(),
            final_state: self.initial_state.clone(),
            final_spec: self.initial_spec.clone(),
        }
    }

    pub fn baths(&self) -> &BathPair {
        self.initial_spec.baths()
    }
}

/// Both endpoints of a transformation embedded in one arena `S ⊗ X`, where
/// a two-level clock label per subsystem selects the branch Hamiltonian.
/// The initial state occupies clock sector `(0,0)`, the final `(1,1)`; the
/// marginal over the clock reproduces the original spectra exactly.
#[derive(Debug, Clone)]
pub struct ClockExtension {
    pub initial: BlockSpectrum,
    pub final_state: BlockSpectrum,
    pub spec: EngineSpec,
}

/// Embeds a Hamiltonian change into a fixed joint Hamiltonian by adjoining
/// the clock levels: subsystem `x` gets the stacked levels `[H_x ; H'_x]`.
pub fn clock_extend(t: &Transformation) -> Result<ClockExtension, TransformError> {
    let stack = |a: &EnergyLevels, b: &EnergyLevels| -> Result<EnergyLevels, SpectraError> {
        let mut levels = a.levels().to_vec();
        levels.extend_from_slice(b.levels());
        EnergyLevels::new(levels)
    };
    let h1 = stack(t.initial_spec.h1(), t.final_spec.h1())?;
    let h2 = stack(t.initial_spec.h2(), t.final_spec.h2())?;
    // The extension is internal bookkeeping; its dimension is whatever the
    // two capped arenas force, so it is not re-capped.
    let cap = h1.len() * h2.len();
    let spec = EngineSpec::with_dim_cap(h1, h2, *t.initial_spec.baths(), cap)?;
    let (d1i, d2i) = (t.initial_spec.d1(), t.initial_spec.d2());
    let (d1f, d2f) = (t.final_spec.d1(), t.final_spec.d2());
    let embed = |state: &BlockSpectrum, off1: usize, off2: usize| -> BlockSpectrum {
        let mut p = vec![0.0; spec.joint_dim()];
        for i in 0..state.d1() {
            for j in 0..state.d2() {
                p[spec.index(off1 + i, off2 + j)] = state.value(i, j);
            }
        }
        BlockSpectrum::new(p, spec.d1(), spec.d2()).expect("embedding preserves normalization")
    };
    let initial = embed(&t.initial_state, 0, 0);
    let final_state = embed(&t.final_state, d1i, d2i);
    debug_assert_eq!(spec.d1(), d1i + d1f);
    debug_assert_eq!(spec.d2(), d2i + d2f);
    Ok(ClockExtension {
        initial,
        final_state,
        spec,
    })
}

/// Scan controls: interior grid size and the feasibility slack.
#[derive(Debug, Clone, Copy)]
pub struct ScanSettings {
    pub grid_points: usize,
    pub slack: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            grid_points: scan::DEFAULT_GRID_POINTS,
            slack: FEASIBILITY_SLACK,
        }
    }
}

/// A feasibility verdict with its margin (the extremal `ΔS_α` in nats) and
/// the α that attains it. Verdicts within the slack of zero are flagged
/// `marginal` rather than silently rounded.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Verdict {
    pub feasible: bool,
    pub marginal: bool,
    /// `inf_α ΔS_α` over the scanned family.
    pub margin: f64,
    /// Where the margin is attained (the most violating α when infeasible).
    pub witness_alpha: AlphaValue,
}

fn shared_arena(t: &Transformation) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), TransformError> {
    if t.same_arena() {
        let w = t.initial_spec.weighted_spectrum();
        Ok((
            t.initial_state.p().to_vec(),
            t.final_state.p().to_vec(),
            w.weights().to_vec(),
        ))
    } else {
        let ext = clock_extend(t)?;
        let w = ext.spec.weighted_spectrum();
        Ok((
            ext.initial.p().to_vec(),
            ext.final_state.p().to_vec(),
            w.weights().to_vec(),
        ))
    }
}

fn delta_scan(t: &Transformation, grid: &[AlphaValue]) -> Result<ScanOutcome, TransformError> {
    let (p_init, p_fin, w) = shared_arena(t)?;
    Ok(scan::scan_extrema(grid, |a| {
        weighted_alpha_free_entropy(&p_init, &w, a) - weighted_alpha_free_entropy(&p_fin, &w, a)
    }))
}

/// Second law under catalytic operations: feasible iff
/// `S_α(initial) ≥ S_α(final) - slack` for every `α ≥ 0` on the refined
/// grid. Hamiltonian changes are handled via [`clock_extend`].
pub fn cslto_feasible(
    t: &Transformation,
    settings: &ScanSettings,
) -> Result<Verdict, TransformError> {
    let grid = scan::alpha_grid(settings.grid_points);
    let outcome = delta_scan(t, &grid)?;
    Ok(verdict_from_min(
        outcome.min.value,
        outcome.min.alpha,
        settings.slack,
    ))
}

/// The signed-α variant of the second law for full-support states in a
/// shared arena. When either side lacks full support (or the Hamiltonian
/// changes, which forces empty clock sectors), the check defers to the
/// `α ≥ 0` variant, which the catalytic framework makes equivalent there.
pub fn cslto_feasible_signed(
    t: &Transformation,
    settings: &ScanSettings,
) -> Result<Verdict, TransformError> {
    let full_support = |p: &[f64]| p.iter().all(|&x| x > 0.0);
    if !t.same_arena() || !full_support(t.initial_state.p()) || !full_support(t.final_state.p()) {
        return cslto_feasible(t, settings);
    }
    let grid = scan::signed_alpha_grid(settings.grid_points);
    let outcome = delta_scan(t, &grid)?;
    Ok(verdict_from_min(
        outcome.min.value,
        outcome.min.alpha,
        settings.slack,
    ))
}

fn verdict_from_min(margin: f64, alpha: AlphaValue, slack: f64) -> Verdict {
    Verdict {
        feasible: margin >= -slack,
        marginal: margin.abs() <= slack,
        margin,
        witness_alpha: alpha,
    }
}

/// Non-catalytic second law: thermo-majorization on the (clock-extended)
/// pair.
pub fn slto_feasible(t: &Transformation) -> Result<bool, TransformError> {
    if t.same_arena() {
        Ok(majorization::thermo_majorizes(
            &t.initial_state,
            &t.final_state,
            &t.initial_spec,
            &t.final_spec,
        )?)
    } else {
        let ext = clock_extend(t)?;
        Ok(majorization::thermo_majorizes(
            &ext.initial,
            &ext.final_state,
            &ext.spec,
            &ext.spec,
        )?)
    }
}

/// Free-entropy distance `S_d = inf_{α≥0} ΔS_α` (the guaranteed one-shot
/// budget) and the reverse-direction cost `sup_{α≥0} ΔS_α`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FreeEntropyDistance {
    pub s_distance: f64,
    pub minimizing_alpha: AlphaValue,
    pub s_cost: f64,
    pub maximizing_alpha: AlphaValue,
}

pub fn free_entropy_distance(
    t: &Transformation,
    settings: &ScanSettings,
) -> Result<FreeEntropyDistance, TransformError> {
    let grid = scan::alpha_grid(settings.grid_points);
    let outcome = delta_scan(t, &grid)?;
    Ok(FreeEntropyDistance {
        s_distance: outcome.min.value,
        minimizing_alpha: outcome.min.alpha,
        s_cost: outcome.max.value,
        maximizing_alpha: outcome.max.alpha,
    })
}

/// How the scalar free-entropy budget is converted into the two battery
/// works. The budget line `β1·W1 + β2·W2 = S_d` never fixes the split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    Bath1Only,
    Bath2Only,
    User(f64),
}

/// A work assignment on the budget line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkSplit {
    pub w1: f64,
    pub w2: f64,
    pub w_ext: f64,
    pub split_rule: SplitRule,
    /// Set when a user split contradicts engine sign semantics
    /// (`W1 ≥ 0 ≥ W2`); informational, never fatal.
    pub sign_flag: Option<String>,
}

/// Extraction split (from `S_d`) and cost split (from `sup_α`), same rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkReport {
    pub extraction: WorkSplit,
    pub cost: WorkSplit,
}

fn split_budget(budget: f64, baths: &BathPair, rule: SplitRule) -> WorkSplit {
    let (w1, w2) = match rule {
        SplitRule::Bath1Only => (budget / baths.beta1(), 0.0),
        SplitRule::Bath2Only => (0.0, budget / baths.beta2()),
        SplitRule::User(w1) => (w1, (budget - baths.beta1() * w1) / baths.beta2()),
    };
    let sign_flag = match rule {
        SplitRule::User(_) if w1 < 0.0 || w2 > FEASIBILITY_SLACK => Some(format!(
            "split (w1 = {w1:.6}, w2 = {w2:.6}) violates engine sign semantics w1 >= 0 >= w2"
        )),
        _ => None,
    };
    WorkSplit {
        w1,
        w2,
        w_ext: w1 + w2,
        split_rule: rule,
        sign_flag,
    }
}

/// Converts the free-entropy budget into energy under a split rule, for
/// both the extraction direction (`S_d`) and the reverse cost (`sup_α`).
pub fn work_quantities(fed: &FreeEntropyDistance, baths: &BathPair, rule: SplitRule) -> WorkReport {
    WorkReport {
        extraction: split_budget(fed.s_distance, baths, rule),
        cost: split_budget(fed.s_cost, baths, rule),
    }
}

/// Distillable free-entropy `D_0(p‖q)` and free-entropy of formation
/// `D_∞(p‖q)` against the spec's semi-Gibbs state.
pub fn distillable_and_formation(
    s: &BlockSpectrum,
    spec: &EngineSpec,
) -> Result<(f64, f64), TransformError> {
    if s.p().len() != spec.joint_dim() {
        return Err(TransformError::DimensionMismatch {
            expected: spec.joint_dim(),
            got: s.p().len(),
        });
    }
    let g = spec.semi_gibbs();
    let distillable = renyi_relative_entropy(s.p(), g.q(), AlphaValue::Zero);
    let formation = renyi_relative_entropy(s.p(), g.q(), AlphaValue::PosInfinity);
    Ok((distillable, formation))
}

/// Everything the `check` surface reports about one transformation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformReport {
    pub feasible_cslto: bool,
    pub marginal: bool,
    pub cslto_margin: f64,
    pub violating_alpha: Option<AlphaValue>,
    pub feasible_slto: bool,
    pub s_distance: f64,
    pub minimizing_alpha: AlphaValue,
    pub s_cost: f64,
    pub maximizing_alpha: AlphaValue,
    pub distillable: f64,
    pub formation: f64,
    pub work: WorkReport,
}

pub fn transform_report(
    t: &Transformation,
    rule: SplitRule,
    settings: &ScanSettings,
) -> Result<TransformReport, TransformError> {
    let fed = free_entropy_distance(t, settings)?;
    let verdict = verdict_from_min(fed.s_distance, fed.minimizing_alpha, settings.slack);
    let slto = slto_feasible(t)?;
    let (distillable, formation) = distillable_and_formation(&t.initial_state, &t.initial_spec)?;
    Ok(TransformReport {
        feasible_cslto: verdict.feasible,
        marginal: verdict.marginal,
        cslto_margin: verdict.margin,
        violating_alpha: (!verdict.feasible).then_some(verdict.witness_alpha),
        feasible_slto: slto,
        s_distance: fed.s_distance,
        minimizing_alpha: fed.minimizing_alpha,
        s_cost: fed.s_cost,
        maximizing_alpha: fed.maximizing_alpha,
        distillable,
        formation,
        work: work_quantities(&fed, t.baths(), rule),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::alpha_free_entropy;
    use approx::assert_abs_diff_eq;

    fn spec_01_01() -> EngineSpec {
        EngineSpec::new(
            EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
            EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
            BathPair::new(0.5, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn settings() -> ScanSettings {
        ScanSettings::default()
    }

    #[test]
    fn identity_transformation_is_feasible_with_zero_distance() {
        let spec = spec_01_01();
        let s = BlockSpectrum::new(vec![0.4, 0.3, 0.2, 0.1], 2, 2).unwrap();
        let t = Transformation::identity(s, spec).unwrap();
        let v = cslto_feasible(&t, &settings()).unwrap();
        assert!(v.feasible);
        assert!(v.marginal);
        assert_abs_diff_eq!(v.margin, 0.0, epsilon = 1e-12);
        let fed = free_entropy_distance(&t, &settings()).unwrap();
        assert_abs_diff_eq!(fed.s_distance, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fed.s_cost, 0.0, epsilon = 1e-12);
        assert!(slto_feasible(&t).unwrap());
    }

    #[test]
    fn ground_state_to_semi_gibbs_constant_budget() {
        // Oracle: ΔS_α = log Z1 Z2 = log((1+e^{-1/2})(1+e^{-1})) for all α.
        let spec = spec_01_01();
        let g = spec.semi_gibbs();
        let t = Transformation::new(
            BlockSpectrum::pure(&spec, 0, 0),
            spec.clone(),
            BlockSpectrum::semi_gibbs_of(&spec),
            spec.clone(),
        )
        .unwrap();
        let expected = g.log_z_product();
        assert_abs_diff_eq!(expected, 0.7873386716983295, epsilon = 1e-12);
        let v = cslto_feasible(&t, &settings()).unwrap();
        assert!(v.feasible && !v.marginal);
        let fed = free_entropy_distance(&t, &settings()).unwrap();
        assert_abs_diff_eq!(fed.s_distance, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(fed.s_cost, expected, epsilon = 1e-9);
        // Reverse direction needs that much free entropy.
        let back = cslto_feasible(&t.reversed(), &settings()).unwrap();
        assert!(!back.feasible);
    }

    #[test]
    fn semi_gibbs_fixed_point_feasible_both_scans() {
        let spec = spec_01_01();
        let g = BlockSpectrum::semi_gibbs_of(&spec);
        let t = Transformation::identity(g, spec).unwrap();
        assert!(cslto_feasible(&t, &settings()).unwrap().feasible);
        assert!(cslto_feasible_signed(&t, &settings()).unwrap().feasible);
        assert!(slto_feasible(&t).unwrap());
    }

    #[test]
    fn semi_gibbs_to_semi_gibbs_has_constant_delta() {
        // Both sides have D_α = 0, so ΔS_α is the log Z-product shift at
        // every α; the verdict is its sign.
        let spec_a = spec_01_01();
        let spec_b = EngineSpec::new(
            EnergyLevels::new(vec![0.0, 0.2, 0.4]).unwrap(),
            EnergyLevels::new(vec![0.0, 0.1]).unwrap(),
            BathPair::new(0.5, 1.0).unwrap(),
        )
        .unwrap();
        let t = Transformation::new(
            BlockSpectrum::semi_gibbs_of(&spec_a),
            spec_a.clone(),
            BlockSpectrum::semi_gibbs_of(&spec_b),
            spec_b.clone(),
        )
        .unwrap();
        let fed = free_entropy_distance(&t, &settings()).unwrap();
        let shift = spec_b.semi_gibbs().log_z_product() - spec_a.semi_gibbs().log_z_product();
        assert_abs_diff_eq!(fed.s_distance, shift, epsilon = 1e-9);
        assert_abs_diff_eq!(fed.s_cost, shift, epsilon = 1e-9);
        let v = cslto_feasible(&t, &settings()).unwrap();
        assert_eq!(v.feasible, shift >= -1e-9);
    }

    #[test]
    fn clock_extension_bookkeeping_for_swapped_hamiltonians() {
        let h1 = EnergyLevels::new(vec![0.0, 1.0]).unwrap();
        let h2 = EnergyLevels::new(vec![0.0, 0.4]).unwrap();
        let baths = BathPair::new(0.5, 1.0).unwrap();
        let spec = EngineSpec::new(h1.clone(), h2.clone(), baths).unwrap();
        let swapped = spec.swapped();
        let s = BlockSpectrum::new(vec![0.4, 0.3, 0.2, 0.1], 2, 2).unwrap();
        let t = Transformation::new(s.clone(), spec, s.swapped(), swapped).unwrap();
        let ext = clock_extend(&t).unwrap();
        assert_eq!(ext.spec.joint_dim(), 16);
        // Clock marginals reproduce the originals exactly.
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(ext.initial.value(i, j), s.value(i, j));
                assert_eq!(ext.final_state.value(2 + i, 2 + j), s.swapped().value(i, j));
            }
        }
        let total: f64 = ext.initial.p().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn clock_extension_preserves_alpha_free_entropies() {
        // ΔS_α on the extension equals S_α(ρ, γ) - S_α(σ', γ') where each
        // side is evaluated in its own arena.
        let spec = EngineSpec::new(
            EnergyLevels::new(vec![0.0, 1.0, 2.3]).unwrap(),
            EnergyLevels::new(vec![0.0, 0.7]).unwrap(),
            BathPair::new(0.4, 1.1).unwrap(),
        )
        .unwrap();
        let spec2 = EngineSpec::new(
            EnergyLevels::new(vec![0.0, 0.9]).unwrap(),
            EnergyLevels::new(vec![0.0, 1.5, 1.9]).unwrap(),
            BathPair::new(0.4, 1.1).unwrap(),
        )
        .unwrap();
        let a = BlockSpectrum::new(vec![0.25, 0.2, 0.15, 0.15, 0.15, 0.1], 3, 2).unwrap();
        let b = BlockSpectrum::new(vec![0.3, 0.2, 0.15, 0.15, 0.1, 0.1], 2, 3).unwrap();
        let t = Transformation::new(a.clone(), spec.clone(), b.clone(), spec2.clone()).unwrap();
        let ext = clock_extend(&t).unwrap();
        for alpha in [0.0, 0.3, 1.0, 2.0, 17.0, f64::INFINITY] {
            let av = AlphaValue::new(alpha);
            let direct = alpha_free_entropy(&a, &spec, av).unwrap()
                - alpha_free_entropy(&b, &spec2, av).unwrap();
            let extended = alpha_free_entropy(&ext.initial, &ext.spec, av).unwrap()
                - alpha_free_entropy(&ext.final_state, &ext.spec, av).unwrap();
            assert_abs_diff_eq!(direct, extended, epsilon = 1e-10);
        }
    }

    #[test]
    fn clock_extension_semi_gibbs_sectors_reproduce_local_gibbs() {
        let spec = spec_01_01();
        let spec2 = EngineSpec::new(
            EnergyLevels::new(vec![0.0, 2.0]).unwrap(),
            EnergyLevels::new(vec![0.0, 0.3]).unwrap(),
            BathPair::new(0.5, 1.0).unwrap(),
        )
        .unwrap();
        let s = BlockSpectrum::new(vec![0.25; 4], 2, 2).unwrap();
        let t = Transformation::new(s.clone(), spec.clone(), s, spec2.clone()).unwrap();
        let ext = clock_extend(&t).unwrap();
        let g = ext.spec.semi_gibbs();
        // Sector (0,0) of the extended semi-Gibbs, renormalized, equals the
        // initial spec's semi-Gibbs.
        let g0 = spec.semi_gibbs();
        let mut sector = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                sector.push(g.q()[ext.spec.index(i, j)]);
            }
        }
        let mass: f64 = sector.iter().sum();
        for (a, b) in sector.iter().zip(g0.q()) {
            assert_abs_diff_eq!(a / mass, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn clock_invariance_for_equal_hamiltonians() {
        // Forcing the clock route on an H = H' transformation must not move
        // the verdict or the distance.
        let spec = spec_01_01();
        let a = BlockSpectrum::new(vec![0.5, 0.2, 0.2, 0.1], 2, 2).unwrap();
        let b = BlockSpectrum::new(vec![0.35, 0.3, 0.2, 0.15], 2, 2).unwrap();
        let t = Transformation::new(a, spec.clone(), b, spec).unwrap();
        let direct = free_entropy_distance(&t, &settings()).unwrap();
        let ext = clock_extend(&t).unwrap();
        let t_ext =
            Transformation::new(ext.initial, ext.spec.clone(), ext.final_state, ext.spec).unwrap();
        let extended = free_entropy_distance(&t_ext, &settings()).unwrap();
        assert_abs_diff_eq!(direct.s_distance, extended.s_distance, epsilon = 1e-9);
        assert_abs_diff_eq!(direct.s_cost, extended.s_cost, epsilon = 1e-9);
        assert_eq!(slto_feasible(&t).unwrap(), slto_feasible(&t_ext).unwrap());
    }

    #[test]
    fn signed_scan_defers_without_full_support() {
        let spec = spec_01_01();
        let t = Transformation::new(
            BlockSpectrum::pure(&spec, 0, 0),
            spec.clone(),
            BlockSpectrum::semi_gibbs_of(&spec),
            spec.clone(),
        )
        .unwrap();
        let signed = cslto_feasible_signed(&t, &settings()).unwrap();
        let plain = cslto_feasible(&t, &settings()).unwrap();
        assert_eq!(signed.feasible, plain.feasible);
    }

    #[test]
    fn work_split_rules_sit_on_the_budget_line() {
        let fed = FreeEntropyDistance {
            s_distance: 0.7873386716983295,
            minimizing_alpha: AlphaValue::Zero,
            s_cost: 0.7873386716983295,
            maximizing_alpha: AlphaValue::One,
        };
        let baths = BathPair::new(0.5, 1.0).unwrap();
        let report = work_quantities(&fed, &baths, SplitRule::Bath1Only);
        assert_abs_diff_eq!(report.extraction.w_ext, 1.574677343396659, epsilon = 1e-12);
        assert_abs_diff_eq!(report.extraction.w2, 0.0, epsilon = 1e-15);
        for rule in [
            SplitRule::Bath1Only,
            SplitRule::Bath2Only,
            SplitRule::User(0.3),
        ] {
            let r = work_quantities(&fed, &baths, rule);
            assert_abs_diff_eq!(
                0.5 * r.extraction.w1 + 1.0 * r.extraction.w2,
                fed.s_distance,
                epsilon = 1e-9
            );
            assert!(r.extraction.w_ext <= r.cost.w_ext + 1e-9);
        }
        // Zero budget: every split returns zero extractable work.
        let zero = FreeEntropyDistance {
            s_distance: 0.0,
            s_cost: 0.0,
            ..fed
        };
        let r = work_quantities(&zero, &baths, SplitRule::Bath2Only);
        assert_abs_diff_eq!(r.extraction.w_ext, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn user_split_sign_contradiction_is_flagged() {
        let fed = FreeEntropyDistance {
            s_distance: 0.2,
            minimizing_alpha: AlphaValue::Zero,
            s_cost: 0.3,
            maximizing_alpha: AlphaValue::One,
        };
        let baths = BathPair::new(0.5, 1.0).unwrap();
        // w1 too small: w2 = (0.2 - 0.5*0.1)/1 = 0.15 > 0.
        let r = work_quantities(&fed, &baths, SplitRule::User(0.1));
        assert!(r.extraction.sign_flag.is_some());
        let ok = work_quantities(&fed, &baths, SplitRule::User(1.0));
        assert!(ok.extraction.sign_flag.is_none());
    }

    #[test]
    fn distillable_and_formation_examples() {
        let spec = spec_01_01();
        let g = BlockSpectrum::semi_gibbs_of(&spec);
        let (d, f) = distillable_and_formation(&g, &spec).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f, 0.0, epsilon = 1e-12);

        let ground = BlockSpectrum::pure(&spec, 0, 0);
        let (d, f) = distillable_and_formation(&ground, &spec).unwrap();
        assert_abs_diff_eq!(d, 0.7873386716983295, epsilon = 1e-12);
        assert_abs_diff_eq!(f, 0.7873386716983295, epsilon = 1e-12);

        let mixed = BlockSpectrum::new(vec![0.4, 0.25, 0.2, 0.15], 2, 2).unwrap();
        let (d, f) = distillable_and_formation(&mixed, &spec).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        assert!(f > 0.0);
    }

    #[test]
    fn forward_distance_bounded_by_reverse_cost() {
        let spec = spec_01_01();
        let a = BlockSpectrum::new(vec![0.55, 0.2, 0.15, 0.1], 2, 2).unwrap();
        let b = BlockSpectrum::new(vec![0.3, 0.3, 0.25, 0.15], 2, 2).unwrap();
        let t = Transformation::new(a, spec.clone(), b, spec).unwrap();
        let fwd = free_entropy_distance(&t, &settings()).unwrap();
        let rev = free_entropy_distance(&t.reversed(), &settings()).unwrap();
        assert!(fwd.s_distance <= -rev.s_distance + 1e-9);
        assert_abs_diff_eq!(fwd.s_cost, -rev.s_distance, epsilon = 1e-7);
    }

    #[test]
    fn report_is_internally_consistent() {
        let spec = spec_01_01();
        let t = Transformation::new(
            BlockSpectrum::pure(&spec, 0, 0),
            spec.clone(),
            BlockSpectrum::semi_gibbs_of(&spec),
            spec.clone(),
        )
        .unwrap();
        let report = transform_report(&t, SplitRule::Bath1Only, &settings()).unwrap();
        assert!(report.feasible_cslto);
        assert!(report.feasible_slto);
        assert!(report.s_distance <= report.s_cost + 1e-9);
        assert!(report.violating_alpha.is_none());
        assert_abs_diff_eq!(report.distillable, report.s_distance, epsilon = 1e-7);
    }
}
