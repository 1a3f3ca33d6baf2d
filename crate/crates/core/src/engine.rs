//! The one-step engine cycle: a SWAP of the bipartite working state with
//! exchanged subsystem Hamiltonians replaces all four Carnot strokes.
//!
//! Spontaneity is the catalytic second law applied to the cycle's
//! transformation. For product working states the cycle splits into two
//! simultaneous sub-transformations, one per bath, and every `α` carries
//! its own Clausius / Kelvin-Planck / Carnot statement through the α-works
//! `β_x W_x^{(α)} = S_α(·, γ_x) - S_α(·, γ_x')`. The same table yields the
//! one-shot works attainable with purely local thermal operations — the
//! guaranteed (worst-case over α) value for each sub-step — which the
//! one-step cycle beats.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergences::{weighted_alpha_free_entropy, AlphaValue};
use crate::scan;
use crate::spectra::{
    block_dephase, block_spectrum, BlockSpectrum, DenseState, EnergyLevels, EngineSpec,
    SpectraError,
};
use crate::transforms::{
    cslto_feasible, free_entropy_distance, ScanSettings, TransformError, Transformation, Verdict,
};

/// Product-state tolerance for the α-works table.
pub const PRODUCT_TOL: f64 = 1e-10;
/// Marginals of a correlation-engine final state must match the working
/// state's marginals within this.
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("engine orientation requires beta1 < beta2, got ({0}, {1})")]
    NotEngineOriented(f64, f64),
    #[error("state dimension {got} does not match spec dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("alpha-works need an exact product state; defect {0}")]
    NonProductState(f64),
    #[error("cycle is not spontaneous (margin {0}); no valid split")]
    NotSpontaneous(f64),
    #[error("correlation engine requires identical subsystem Hamiltonians")]
    HamiltonianMismatch,
    #[error("final state marginals are not stationary (defect {0}); local energies would change")]
    NonStationaryMarginals(f64),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// A working state attached to an engine-oriented spec (`β1 < β2`). The
/// cycle's final data are derived: `σ' = SWAP(ρ)`, `H1' = H2`, `H2' = H1`.
#[derive(Debug, Clone)]
pub struct EngineCycle {
    state: BlockSpectrum,
    spec: EngineSpec,
}

impl EngineCycle {
    pub fn new(state: BlockSpectrum, spec: EngineSpec) -> Result<Self, EngineError> {
        if !spec.baths().engine_oriented() {
            return Err(EngineError::NotEngineOriented(
                spec.baths().beta1(),
                spec.baths().beta2(),
            ));
        }
        if state.p().len() != spec.joint_dim() {
            return Err(EngineError::DimensionMismatch {
                expected: spec.joint_dim(),
                got: state.p().len(),
            });
        }
        Ok(Self { state, spec })
    }

    /// Dephases a dense working state to the weighted-energy blocks first.
    pub fn from_dense(rho: &DenseState, spec: EngineSpec) -> Result<Self, EngineError> {
        let w = spec.weighted_spectrum();
        let dephased = block_dephase(rho, &w)?;
        let state = block_spectrum(&dephased, &w)?;
        EngineCycle::new(state, spec)
    }

    pub fn state(&self) -> &BlockSpectrum {
        &self.state
    }

    pub fn spec(&self) -> &EngineSpec {
        &self.spec
    }

    /// The cycle as a transformation (clock-extended downstream whenever
    /// `H1 ≠ H2`).
    pub fn transformation(&self) -> Transformation {
        Transformation::new(
            self.state.clone(),
            self.spec.clone(),
            self.state.swapped(),
            self.spec.swapped(),
        )
        .expect("swap preserves dimensions and baths")
    }

    fn is_product(&self) -> bool {
        self.state.product_defect() <= PRODUCT_TOL
    }
}

/// Builds the one-step cycle transformation
/// `(ρ, H1⊗I + I⊗H2) → (SWAP ρ, H2⊗I + I⊗H1)`.
pub fn one_step_cycle(
    state: BlockSpectrum,
    spec: EngineSpec,
) -> Result<Transformation, EngineError> {
    Ok(EngineCycle::new(state, spec)?.transformation())
}

/// Spontaneity: the catalytic second law on the cycle's transformation.
pub fn engine_spontaneous(
    cycle: &EngineCycle,
    settings: &ScanSettings,
) -> Result<Verdict, EngineError> {
    Ok(cslto_feasible(&cycle.transformation(), settings)?)
}

/// Non-catalytic spontaneity: thermo-majorization on the (clock-extended)
/// cycle. Strictly stronger than the catalytic verdict.
pub fn engine_spontaneous_slto(cycle: &EngineCycle) -> Result<bool, EngineError> {
    Ok(crate::transforms::slto_feasible(&cycle.transformation())?)
}

/// One row of the α-works table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlphaWorkRow {
    pub alpha: AlphaValue,
    pub w1: f64,
    pub w2: f64,
    pub w_ext: f64,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
}

/// The α-works of a product-state cycle, row per grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaWorksTable {
    pub rows: Vec<AlphaWorkRow>,
}

impl AlphaWorksTable {
    pub fn row_at_one(&self) -> Option<&AlphaWorkRow> {
        self.rows.iter().find(|r| r.alpha == AlphaValue::One)
    }
}

/// The two sub-transformation works at one α for a product cycle `ρ ⊗ σ`:
/// `β1 W1 = S_α(ρ, γ1) - S_α(σ, γ1')` (hot bath, `γ1' = Gibbs(β1, H2)`) and
/// `β2 W2 = S_α(σ, γ2) - S_α(ρ, γ2')` (cold bath, `γ2' = Gibbs(β2, H1)`).
fn works_at(cycle: &EngineCycle, a: AlphaValue) -> (f64, f64) {
    let spec = &cycle.spec;
    let (beta1, beta2) = (spec.baths().beta1(), spec.baths().beta2());
    let rho = cycle.state.marginal1();
    let sigma = cycle.state.marginal2();
    let weights = |levels: &EnergyLevels, beta: f64| -> Vec<f64> {
        levels.levels().iter().map(|&e| beta * e).collect()
    };
    let w1_h1 = weights(spec.h1(), beta1);
    let w1_h2 = weights(spec.h2(), beta1);
    let w2_h2 = weights(spec.h2(), beta2);
    let w2_h1 = weights(spec.h1(), beta2);
    let w1 = (weighted_alpha_free_entropy(&rho, &w1_h1, a)
        - weighted_alpha_free_entropy(&sigma, &w1_h2, a))
        / beta1;
    let w2 = (weighted_alpha_free_entropy(&sigma, &w2_h2, a)
        - weighted_alpha_free_entropy(&rho, &w2_h1, a))
        / beta2;
    (w1, w2)
}

/// Tabulates `(α, W1, W2, W_ext, η1, η2)` over the grid for an exact
/// product working state.
pub fn alpha_works(
    cycle: &EngineCycle,
    settings: &ScanSettings,
) -> Result<AlphaWorksTable, EngineError> {
    let defect = cycle.state.product_defect();
    if defect > PRODUCT_TOL {
        return Err(EngineError::NonProductState(defect));
    }
    let grid = scan::alpha_grid(settings.grid_points);
    let rows = grid
        .into_iter()
        .map(|a| {
            let (w1, w2) = works_at(cycle, a);
            let w_ext = w1 + w2;
            AlphaWorkRow {
                alpha: a,
                w1,
                w2,
                w_ext,
                eta1: (w1 > 0.0).then(|| w_ext / w1),
                eta2: (w2 < 0.0).then(|| w_ext / w2.abs()),
            }
        })
        .collect();
    Ok(AlphaWorksTable { rows })
}

/// Works and efficiencies attainable by running the two sub-transformations
/// separately under local thermal operations, with the matched one-step
/// values for comparison.
///
/// Each local step only guarantees its worst case over α: the hot-bath step
/// extracts `W̄1 = inf_α W1^{(α)}` and the cold-bath step costs
/// `-W̄2 = -inf_α W2^{(α)}` (the battery must cover the supremum of the
/// required work). The matched one-step split fixes `W1 = W̄1` and takes
/// `W2` from the combined budget line, which can only do better.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalComparison {
    pub w1_bar: f64,
    pub w1_bar_alpha: AlphaValue,
    pub w2_bar: f64,
    pub w2_bar_alpha: AlphaValue,
    pub w_ext_bar: f64,
    pub eta1_bar: Option<f64>,
    pub eta2_bar: Option<f64>,
    /// One-step works on the matched family (`W1 = W̄1`, budget-saturated).
    pub w2_matched: f64,
    pub w_ext_matched: f64,
    pub eta1_matched: Option<f64>,
    pub eta2_matched: Option<f64>,
}

pub fn local_to_comparison(
    cycle: &EngineCycle,
    settings: &ScanSettings,
) -> Result<LocalComparison, EngineError> {
    let defect = cycle.state.product_defect();
    if defect > PRODUCT_TOL {
        return Err(EngineError::NonProductState(defect));
    }
    let grid = scan::alpha_grid(settings.grid_points);
    let scan1 = scan::scan_extrema(&grid, |a| works_at(cycle, a).0);
    let scan2 = scan::scan_extrema(&grid, |a| works_at(cycle, a).1);
    let (w1_bar, w1_bar_alpha) = (scan1.min.value, scan1.min.alpha);
    let (w2_bar, w2_bar_alpha) = (scan2.min.value, scan2.min.alpha);
    let w_ext_bar = w1_bar + w2_bar;

    let budget = free_entropy_distance(&cycle.transformation(), settings)?.s_distance;
    let (beta1, beta2) = (cycle.spec.baths().beta1(), cycle.spec.baths().beta2());
    let w2_matched = (budget - beta1 * w1_bar) / beta2;
    let w_ext_matched = w1_bar + w2_matched;
    Ok(LocalComparison {
        w1_bar,
        w1_bar_alpha,
        w2_bar,
        w2_bar_alpha,
        w_ext_bar,
        eta1_bar: (w1_bar > 0.0).then(|| w_ext_bar / w1_bar),
        eta2_bar: (w2_bar < 0.0).then(|| w_ext_bar / w2_bar.abs()),
        w2_matched,
        w_ext_matched,
        eta1_matched: (w1_bar > 0.0).then(|| w_ext_matched / w1_bar),
        eta2_matched: (w2_matched < 0.0).then(|| w_ext_matched / w2_matched.abs()),
    })
}

/// Split conventions for engine statements. All of them saturate the
/// budget line `β1 W1 + β2 W2 = S_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineSplit {
    /// `W1 = W1^{(1)}` for product inputs (the mean-work split); correlated
    /// inputs fall back to `W1 = 2·S_d/β1` so that `W2 < 0` is achievable.
    Alpha1,
    Bath1Only,
    Bath2Only,
    W1(f64),
}

/// One evaluated second-law statement: the boolean and its margin in the
/// statement's own units (work for Clausius/Kelvin-Planck, efficiency gap
/// for Carnot).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StatementCheck {
    pub holds: bool,
    pub margin: f64,
}

/// Clausius, Kelvin-Planck and Carnot statements at a chosen split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Statements {
    pub split: EngineSplit,
    pub w1: f64,
    pub w2: f64,
    pub w_ext: f64,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    /// `W1 + W2 > 0`.
    pub clausius: StatementCheck,
    /// `W_ext < W1`, i.e. `W2 < 0`.
    pub kelvin_planck: StatementCheck,
    /// `η1 ≥ 1 - β1/β2`.
    pub carnot_hot: Option<StatementCheck>,
    /// `η2 ≤ β2/β1 - 1`.
    pub carnot_cold: Option<StatementCheck>,
}

fn resolve_w1(cycle: &EngineCycle, split: EngineSplit, budget: f64, slack: f64) -> f64 {
    let beta1 = cycle.spec.baths().beta1();
    match split {
        EngineSplit::W1(v) => v,
        EngineSplit::Bath1Only => budget / beta1,
        EngineSplit::Bath2Only => 0.0,
        EngineSplit::Alpha1 => {
            if cycle.is_product() {
                let (w1, _) = works_at(cycle, AlphaValue::One);
                if w1 > slack {
                    return w1;
                }
            }
            if budget > slack {
                2.0 * budget / beta1
            } else {
                // Reversible point: any positive W1 sits on the Carnot line.
                1.0 / beta1
            }
        }
    }
}

/// Evaluates the one-shot statements on a spontaneous cycle at a split.
pub fn statements_report(
    cycle: &EngineCycle,
    split: EngineSplit,
    settings: &ScanSettings,
) -> Result<Statements, EngineError> {
    let fed = free_entropy_distance(&cycle.transformation(), settings)?;
    statements_from_budget(cycle, split, fed.s_distance, settings)
}

fn statements_from_budget(
    cycle: &EngineCycle,
    split: EngineSplit,
    budget: f64,
    settings: &ScanSettings,
) -> Result<Statements, EngineError> {
    if budget < -settings.slack {
        return Err(EngineError::NotSpontaneous(budget));
    }
    let (beta1, beta2) = (cycle.spec.baths().beta1(), cycle.spec.baths().beta2());
    let w1 = resolve_w1(cycle, split, budget, settings.slack);
    let w2 = (budget - beta1 * w1) / beta2;
    let w_ext = w1 + w2;
    let eta1 = (w1 > 0.0).then(|| w_ext / w1);
    let eta2 = (w2 < 0.0).then(|| w_ext / w2.abs());
    let carnot_floor = 1.0 - beta1 / beta2;
    let carnot_ceil = beta2 / beta1 - 1.0;
    Ok(Statements {
        split,
        w1,
        w2,
        w_ext,
        eta1,
        eta2,
        clausius: StatementCheck {
            holds: w1 + w2 > 0.0,
            margin: w1 + w2,
        },
        kelvin_planck: StatementCheck {
            holds: w_ext < w1,
            margin: w1 - w_ext,
        },
        carnot_hot: eta1.map(|e| StatementCheck {
            holds: e >= carnot_floor - settings.slack,
            margin: e - carnot_floor,
        }),
        carnot_cold: eta2.map(|e| StatementCheck {
            holds: e <= carnot_ceil + settings.slack,
            margin: carnot_ceil - e,
        }),
    })
}

/// Minimum free-entropy and work to run the cycle backwards (refrigeration):
/// `S_ref = -sup_α ΔS_α ≤ 0`, split mirroring the forward one
/// (`W1^r = -W1`), and `W_cost = |W1^r| - W2^r`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RefrigerationReport {
    pub s_ref: f64,
    pub w1_r: f64,
    pub w2_r: f64,
    pub w_cost: f64,
}

pub fn refrigeration_cost(
    cycle: &EngineCycle,
    split: EngineSplit,
    settings: &ScanSettings,
) -> Result<RefrigerationReport, EngineError> {
    let fed = free_entropy_distance(&cycle.transformation(), settings)?;
    if fed.s_distance < -settings.slack {
        return Err(EngineError::NotSpontaneous(fed.s_distance));
    }
    let forward = statements_from_budget(cycle, split, fed.s_distance, settings)?;
    let (beta1, beta2) = (cycle.spec.baths().beta1(), cycle.spec.baths().beta2());
    let s_ref = -fed.s_cost;
    let w1_r = -forward.w1;
    let w2_r = (s_ref - beta1 * w1_r) / beta2;
    Ok(RefrigerationReport {
        s_ref,
        w1_r,
        w2_r,
        w_cost: w1_r.abs() - w2_r,
    })
}

/// Heats `Q_x = ΔE_x - W_x` from the marginal energy changes of the cycle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HeatReport {
    pub de1: f64,
    pub de2: f64,
    pub q1: f64,
    pub q2: f64,
    /// `β1 Q1 + β2 Q2`; nonpositive for spontaneous cycles.
    pub weighted_heat: f64,
    /// Traditional Carnot form `W_ext / Q1` when `Q1 > 0`.
    pub eta_traditional: Option<f64>,
}

pub fn heat_report(cycle: &EngineCycle, statements: &Statements) -> HeatReport {
    let spec = &cycle.spec;
    let m1 = cycle.state.marginal1();
    let m2 = cycle.state.marginal2();
    let energy = |p: &[f64], levels: &EnergyLevels| -> f64 {
        p.iter().zip(levels.levels()).map(|(pi, e)| pi * e).sum()
    };
    // After the SWAP, subsystem 1 holds σ under H1' = H2.
    let de1 = energy(&m2, spec.h2()) - energy(&m1, spec.h1());
    let de2 = -de1;
    let q1 = de1 - statements.w1;
    let q2 = de2 - statements.w2;
    HeatReport {
        de1,
        de2,
        q1,
        q2,
        weighted_heat: spec.baths().beta1() * q1 + spec.baths().beta2() * q2,
        eta_traditional: (q1 > 0.0).then(|| statements.w_ext / q1),
    }
}

/// Which second law decides `spontaneous` in an engine report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpontaneityRoute {
    /// Catalytic (the default): `inf_α ΔS_α ≥ -slack`.
    Catalytic,
    /// Non-catalytic: thermo-majorization on the clock-extended cycle.
    ThermoMajorization,
}

/// Full engine report: verdict, budget, statements, α-works (product
/// inputs), local-TO comparison, refrigeration cost, heat bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineReport {
    pub spontaneous: bool,
    pub route: SpontaneityRoute,
    pub marginal: bool,
    pub budget: f64,
    pub statements: Option<Statements>,
    pub alpha_works: Option<AlphaWorksTable>,
    pub local_to: Option<LocalComparison>,
    pub refrigeration: Option<RefrigerationReport>,
    pub heat: Option<HeatReport>,
    pub notes: Vec<String>,
}

pub fn engine_report(
    cycle: &EngineCycle,
    split: EngineSplit,
    settings: &ScanSettings,
) -> Result<EngineReport, EngineError> {
    engine_report_via(cycle, split, SpontaneityRoute::Catalytic, settings)
}

pub fn engine_report_via(
    cycle: &EngineCycle,
    split: EngineSplit,
    route: SpontaneityRoute,
    settings: &ScanSettings,
) -> Result<EngineReport, EngineError> {
    let transformation = cycle.transformation();
    let fed = free_entropy_distance(&transformation, settings)?;
    let budget = fed.s_distance;
    let spontaneous = match route {
        SpontaneityRoute::Catalytic => budget >= -settings.slack,
        SpontaneityRoute::ThermoMajorization => engine_spontaneous_slto(cycle)?,
    };
    let mut notes = Vec::new();

    let (alpha_table, local) = if cycle.is_product() {
        (
            Some(alpha_works(cycle, settings)?),
            Some(local_to_comparison(cycle, settings)?),
        )
    } else {
        notes.push(
            "correlated working state: no per-bath alpha-work decomposition; budget only"
                .to_string(),
        );
        (None, None)
    };

    let statements = if spontaneous {
        Some(statements_from_budget(cycle, split, budget, settings)?)
    } else {
        notes.push("cycle is not spontaneous; statements skipped".to_string());
        None
    };
    let refrigeration = spontaneous
        .then(|| refrigeration_cost(cycle, split, settings))
        .transpose()?;
    let heat = statements.as_ref().map(|s| heat_report(cycle, s));

    Ok(EngineReport {
        spontaneous,
        route,
        marginal: budget.abs() <= settings.slack,
        budget,
        statements,
        alpha_works: alpha_table,
        local_to: local,
        refrigeration,
        heat,
        notes,
    })
}

/// The correlation-driven engine: with `H1 = H2` the cycle
/// `τ_AB → τ_A ⊗ τ_B` burns only the correlations; at `α = 1` the
/// free-entropy drop is exactly the mutual information.
///
/// The final state is fixed to the product of the working state's own
/// marginals, so local energies are stationary across the cycle. A caller
///-supplied final state is validated against that product.
pub fn correlation_engine(
    tau: &BlockSpectrum,
    spec: &EngineSpec,
    explicit_final: Option<&BlockSpectrum>,
    settings: &ScanSettings,
) -> Result<EngineReport, EngineError> {
    if spec.h1() != spec.h2() {
        return Err(EngineError::HamiltonianMismatch);
    }
    if !spec.baths().engine_oriented() {
        return Err(EngineError::NotEngineOriented(
            spec.baths().beta1(),
            spec.baths().beta2(),
        ));
    }
    if tau.p().len() != spec.joint_dim() {
        return Err(EngineError::DimensionMismatch {
            expected: spec.joint_dim(),
            got: tau.p().len(),
        });
    }
    let product = BlockSpectrum::product(&tau.marginal1(), &tau.marginal2())?;
    if let Some(final_state) = explicit_final {
        let defect = final_state
            .p()
            .iter()
            .zip(product.p())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if defect > MARGINAL_TOL {
            return Err(EngineError::NonStationaryMarginals(defect));
        }
    }
    let t = Transformation::new(tau.clone(), spec.clone(), product, spec.clone())?;
    let fed = free_entropy_distance(&t, settings)?;
    let budget = fed.s_distance;
    let spontaneous = budget >= -settings.slack;
    let cycle = EngineCycle {
        state: tau.clone(),
        spec: spec.clone(),
    };
    let statements = if spontaneous {
        Some(statements_from_budget(
            &cycle,
            EngineSplit::Alpha1,
            budget,
            settings,
        )?)
    } else {
        None
    };
    let mut notes =
        vec!["correlation engine: transformation to the product of marginals".to_string()];
    if tau.product_defect() <= PRODUCT_TOL {
        notes.push("working state carries no correlations; budget is zero".to_string());
    }
    Ok(EngineReport {
        spontaneous,
        route: SpontaneityRoute::Catalytic,
        marginal: budget.abs() <= settings.slack,
        budget,
        statements,
        alpha_works: None,
        local_to: None,
        refrigeration: None,
        heat: None,
        notes,
    })
}
