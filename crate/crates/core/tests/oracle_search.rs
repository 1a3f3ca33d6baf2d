//! Seeded randomized searches for the structural counterexamples the
//! feasibility hierarchy promises: instances separating the signed-α scan
//! from the positive-α scan, and the catalytic verdict from the
//! non-catalytic one. Both searches bias toward the simplex boundary
//! (power-transformed uniforms), where the separations live.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thermoforge_core::divergences::{alpha_free_entropy, AlphaValue};
use thermoforge_core::spectra::{BathPair, BlockSpectrum, EnergyLevels, EngineSpec};
use thermoforge_core::transforms::{
    cslto_feasible, cslto_feasible_signed, slto_feasible, ScanSettings, Transformation,
};
use thermoforge_core::veribench::rng_for;

fn random_spec(rng: &mut ChaCha8Rng) -> EngineSpec {
    let levels =
        |rng: &mut ChaCha8Rng| EnergyLevels::new(vec![0.0, rng.gen_range(0.2..3.0)]).unwrap();
    let h1 = levels(rng);
    let h2 = levels(rng);
    let b1 = rng.gen_range(0.1..3.0);
    let b2 = rng.gen_range(0.1..3.0);
    EngineSpec::new(h1, h2, BathPair::new(b1, b2).unwrap()).unwrap()
}

fn spiky_simplex(rng: &mut ChaCha8Rng, dim: usize, power: i32) -> Vec<f64> {
    let mut p: Vec<f64> = (0..dim)
        .map(|_| rng.gen::<f64>().powi(power).max(1e-15))
        .collect();
    let sum: f64 = p.iter().sum();
    for x in &mut p {
        *x /= sum;
    }
    p
}

fn candidate(seed: u64, trial: u64) -> Transformation {
    let mut rng = rng_for(seed, trial);
    let spec = random_spec(&mut rng);
    let kp = [1, 2, 4][rng.gen_range(0..3)];
    let kq = [1, 2, 4, 8][rng.gen_range(0..4)];
    let p = spiky_simplex(&mut rng, 4, kp);
    let p2 = spiky_simplex(&mut rng, 4, kq);
    Transformation::new(
        BlockSpectrum::new(p, 2, 2).unwrap(),
        spec.clone(),
        BlockSpectrum::new(p2, 2, 2).unwrap(),
        spec,
    )
    .unwrap()
}

/// Full-support pair feasible for all α ≥ 0 yet violated at α = -1: the
/// signed verdict must reject what the positive-α verdict accepts.
#[test]
fn signed_scan_separates_from_positive_scan() {
    let settings = ScanSettings::default();
    let mut found = None;
    for trial in 0..6000u64 {
        let t = candidate(9001, trial);
        // Full-support same-arena pairs always have ΔS_0 = 0, so feasible
        // verdicts here are marginal by construction.
        let positive = cslto_feasible(&t, &settings).unwrap();
        if !positive.feasible {
            continue;
        }
        // Oracle for the violation: the α = -1 free-entropy difference.
        let minus_one = AlphaValue::Finite(-1.0);
        let delta = alpha_free_entropy(t.initial_state(), t.initial_spec(), minus_one).unwrap()
            - alpha_free_entropy(t.final_state(), t.final_spec(), minus_one).unwrap();
        if delta < -1e-6 {
            found = Some((t, delta));
            break;
        }
    }
    let (t, delta) = found.expect("the randomized search must hit a separating instance");
    let signed = cslto_feasible_signed(&t, &settings).unwrap();
    assert!(
        !signed.feasible,
        "alpha = -1 is violated by {delta} but the signed scan accepted"
    );
    assert!(cslto_feasible(&t, &settings).unwrap().feasible);
}

/// Catalysis strictly enlarges the feasible set: an instance whose Lorenz
/// curves cross while every `S_α` (α ≥ 0) is ordered.
#[test]
fn catalytic_verdict_separates_from_thermo_majorization() {
    let settings = ScanSettings::default();
    let mut found = None;
    for trial in 0..6000u64 {
        let t = candidate(7002, trial);
        let cat = cslto_feasible(&t, &settings).unwrap();
        if !cat.feasible {
            continue;
        }
        if !slto_feasible(&t).unwrap() {
            found = Some(t);
            break;
        }
    }
    let t = found.expect("the randomized search must hit a catalysis gap");
    assert!(cslto_feasible(&t, &settings).unwrap().feasible);
    assert!(!slto_feasible(&t).unwrap());
}
