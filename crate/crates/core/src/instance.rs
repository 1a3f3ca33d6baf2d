//! The on-disk instance schema: one JSON document describing an arena, a
//! working state, and optionally a final state and final Hamiltonians.
//!
//! The verification harness dumps failing trials in this same schema, so
//! every counterexample reloads through the command-line front end.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectra::{
    block_dephase, block_spectrum, off_block_mass, BathPair, BlockSpectrum, DenseState,
    EnergyLevels, EngineSpec, SpectraError, BLOCK_DIAGONAL_TOL,
};
use crate::transforms::{TransformError, Transformation};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl InstanceError {
    pub fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        InstanceError::Field {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn spectra_err(path: &str, e: SpectraError) -> InstanceError {
    InstanceError::field(path, e.to_string())
}

/// A state in the instance file: diagonal probabilities in the product
/// basis, or a dense Hermitian matrix split into real and imaginary parts
/// (JSON has no complex type).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    Diagonal {
        p: Vec<f64>,
    },
    Dense {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
}

/// The instance document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub beta: [f64; 2],
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub state: StateSpec,
    #[serde(rename = "final", skip_serializing_if = "Option::is_none", default)]
    pub final_state: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h1_final: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h2_final: Option<Vec<f64>>,
}

/// A loaded state together with the warning produced if a dense input had
/// to be dephased (its coherences carry no one-shot free entropy, so the
/// verdicts cover only the block-diagonal part).
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub spectrum: BlockSpectrum,
    pub dense: Option<DenseState>,
    pub dephasing_warning: Option<String>,
}

impl InstanceFile {
    /// A purely diagonal instance over one arena.
    pub fn diagonal(spec: &EngineSpec, p: &[f64]) -> InstanceFile {
        InstanceFile {
            beta: [spec.baths().beta1(), spec.baths().beta2()],
            h1: spec.h1().levels().to_vec(),
            h2: spec.h2().levels().to_vec(),
            state: StateSpec::Diagonal { p: p.to_vec() },
            final_state: None,
            h1_final: None,
            h2_final: None,
        }
    }

    /// A diagonal transformation instance (final Hamiltonians included only
    /// when they differ).
    pub fn transformation(t: &Transformation) -> InstanceFile {
        let mut doc = Self::diagonal(t.initial_spec(), t.initial_state().p());
        doc.final_state = Some(StateSpec::Diagonal {
            p: t.final_state().p().to_vec(),
        });
        if !t.same_arena() {
            doc.h1_final = Some(t.final_spec().h1().levels().to_vec());
            doc.h2_final = Some(t.final_spec().h2().levels().to_vec());
        }
        doc
    }

    pub fn baths(&self) -> Result<BathPair, InstanceError> {
        BathPair::new(self.beta[0], self.beta[1]).map_err(|e| spectra_err("beta", e))
    }

    pub fn initial_spec(&self) -> Result<EngineSpec, InstanceError> {
        let h1 = EnergyLevels::new(self.h1.clone()).map_err(|e| spectra_err("h1", e))?;
        let h2 = EnergyLevels::new(self.h2.clone()).map_err(|e| spectra_err("h2", e))?;
        EngineSpec::new(h1, h2, self.baths()?).map_err(|e| spectra_err("h1/h2", e))
    }

    /// The final arena: `h1_final`/`h2_final` where given, else the initial
    /// Hamiltonians.
    pub fn final_spec(&self) -> Result<EngineSpec, InstanceError> {
        let h1 = match &self.h1_final {
            Some(levels) => {
                EnergyLevels::new(levels.clone()).map_err(|e| spectra_err("h1_final", e))?
            }
            None => EnergyLevels::new(self.h1.clone()).map_err(|e| spectra_err("h1", e))?,
        };
        let h2 = match &self.h2_final {
            Some(levels) => {
                EnergyLevels::new(levels.clone()).map_err(|e| spectra_err("h2_final", e))?
            }
            None => EnergyLevels::new(self.h2.clone()).map_err(|e| spectra_err("h2", e))?,
        };
        EngineSpec::new(h1, h2, self.baths()?).map_err(|e| spectra_err("h1_final/h2_final", e))
    }

    pub fn load_initial(&self) -> Result<LoadedState, InstanceError> {
        load_state(&self.state, &self.initial_spec()?, "state")
    }

    pub fn load_final(&self) -> Result<Option<LoadedState>, InstanceError> {
        match &self.final_state {
            None => Ok(None),
            Some(spec) => Ok(Some(load_state(spec, &self.final_spec()?, "final")?)),
        }
    }

    /// The transformation this instance describes; requires `final`.
    pub fn to_transformation(&self) -> Result<(Transformation, Vec<String>), InstanceError> {
        let initial = self.load_initial()?;
        let final_loaded = self
            .load_final()?
            .ok_or_else(|| InstanceError::field("final", "missing final state"))?;
        let mut warnings = Vec::new();
        warnings.extend(initial.dephasing_warning.clone());
        warnings.extend(final_loaded.dephasing_warning.clone());
        let t = Transformation::new(
            initial.spectrum,
            self.initial_spec()?,
            final_loaded.spectrum,
            self.final_spec()?,
        )?;
        Ok((t, warnings))
    }
}

fn load_state(
    state: &StateSpec,
    spec: &EngineSpec,
    path: &str,
) -> Result<LoadedState, InstanceError> {
    match state {
        StateSpec::Diagonal { p } => {
            let spectrum = BlockSpectrum::new(p.clone(), spec.d1(), spec.d2())
                .map_err(|e| spectra_err(&format!("{path}.p"), e))?;
            Ok(LoadedState {
                spectrum,
                dense: None,
                dephasing_warning: None,
            })
        }
        StateSpec::Dense { re, im } => {
            let n = spec.joint_dim();
            let check_shape = |name: &str, rows: &[Vec<f64>]| -> Result<(), InstanceError> {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(InstanceError::field(
                        format!("{path}.{name}"),
                        format!("expected a {n}x{n} matrix for d1*d2 = {n}"),
                    ));
                }
                Ok(())
            };
            check_shape("re", re)?;
            check_shape("im", im)?;
            let mut m = DMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    m[(r, c)] = Complex64::new(re[r][c], im[r][c]);
                }
            }
            let dense = DenseState::new(m).map_err(|e| spectra_err(path, e))?;
            let w = spec.weighted_spectrum();
            let mass = off_block_mass(&dense, &w);
            let dephasing_warning = (mass > BLOCK_DIAGONAL_TOL).then(|| {
                format!(
                    "{path}: weighted-energy coherences (off-block mass {mass:.3e}) were dephased; \
                     verdicts cover the block-diagonal part only"
                )
            });
            let dephased = block_dephase(&dense, &w).map_err(|e| spectra_err(path, e))?;
            let spectrum = block_spectrum(&dephased, &w).map_err(|e| spectra_err(path, e))?;
            Ok(LoadedState {
                spectrum,
                dense: Some(dense),
                dephasing_warning,
            })
        }
    }
}
