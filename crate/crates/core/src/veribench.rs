//! Seeded cross-oracle verification suites.
//!
//! Every suite draws its instances deterministically — trial `k` derives
//! its generator from `(seed, k)` only — compares two independent routes to
//! the same verdict, and embeds any failing instance as a replayable
//! document in the report. Identical configs produce byte-identical
//! reports.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::divergences::{renyi_relative_entropy, smoothed_dmax, smoothed_dmin, AlphaValue};
use crate::instance::InstanceFile;
use crate::majorization::{self, DMajorization};
use crate::spectra::{BathPair, BlockSpectrum, EnergyLevels, EngineSpec};
use crate::transforms::{free_entropy_distance, ScanSettings, Transformation};

/// Trial budget and sampling ranges for the random suites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: u64,
    /// Inclusive subsystem dimension ranges.
    pub d1_range: (usize, usize),
    pub d2_range: (usize, usize),
    /// Energies are uniform in `[0, energy_max]`.
    pub energy_max: f64,
    /// Inverse temperatures are uniform in this range.
    pub beta_range: (f64, f64),
    /// Agreement slack for verdict comparisons, in nats.
    pub tolerance: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 1000,
            d1_range: (2, 3),
            d2_range: (2, 3),
            energy_max: 3.0,
            beta_range: (0.1, 3.0),
            tolerance: 1e-9,
        }
    }
}

impl TrialConfig {
    pub fn with_seed_and_trials(seed: u64, trials: u64) -> Self {
        Self {
            seed,
            trials,
            ..Self::default()
        }
    }
}

/// Per-trial generator: a fixed-key stream cipher keyed by the seed, with
/// the trial index as the stream. Replays are exact.
pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Flat-simplex sample by exponential normalization.
pub fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = p.iter().sum();
    for x in &mut p {
        *x /= sum;
    }
    p
}

pub fn random_levels(rng: &mut ChaCha8Rng, dim: usize, energy_max: f64) -> EnergyLevels {
    let dist = Uniform::new_inclusive(0.0, energy_max);
    EnergyLevels::new((0..dim).map(|_| dist.sample(rng)).collect())
        .expect("sampled levels are finite and non-empty")
}

fn sample_dim(rng: &mut ChaCha8Rng, range: (usize, usize)) -> usize {
    rng.gen_range(range.0..=range.1)
}

fn sample_betas(rng: &mut ChaCha8Rng, cfg: &TrialConfig, engine_oriented: bool) -> BathPair {
    let dist = Uniform::new_inclusive(cfg.beta_range.0, cfg.beta_range.1);
    let mut b1 = dist.sample(rng);
    let mut b2 = dist.sample(rng);
    if engine_oriented && b1 >= b2 {
        core::mem::swap(&mut b1, &mut b2);
        if b1 == b2 {
            b2 += 1e-3;
        }
    }
    BathPair::new(b1, b2).expect("sampled betas are positive")
}

/// A random arena, optionally engine-oriented, optionally capped in joint
/// dimension.
pub fn random_spec(
    rng: &mut ChaCha8Rng,
    cfg: &TrialConfig,
    engine_oriented: bool,
    joint_cap: Option<usize>,
) -> EngineSpec {
    let mut d1 = sample_dim(rng, cfg.d1_range);
    let mut d2 = sample_dim(rng, cfg.d2_range);
    if let Some(cap) = joint_cap {
        while d1 * d2 > cap {
            if d1 >= d2 && d1 > 1 {
                d1 -= 1;
            } else if d2 > 1 {
                d2 -= 1;
            } else {
                break;
            }
        }
    }
    let h1 = random_levels(rng, d1, cfg.energy_max);
    let h2 = random_levels(rng, d2, cfg.energy_max);
    EngineSpec::new(h1, h2, sample_betas(rng, cfg, engine_oriented))
        .expect("sampled spec respects the dimension cap")
}

/// The instance kinds the harness knows how to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    State,
    ProductState,
    Spec,
    Transformation,
}

/// A sampled instance.
#[derive(Debug, Clone)]
pub enum Instance {
    State {
        spec: EngineSpec,
        state: BlockSpectrum,
    },
    ProductState {
        spec: EngineSpec,
        state: BlockSpectrum,
    },
    Spec(EngineSpec),
    Transformation(Transformation),
}

/// Draws the instance for trial `k`; byte-for-byte reproducible.
pub fn random_instance(cfg: &TrialConfig, trial: u64, kind: InstanceKind) -> Instance {
    let mut rng = rng_for(cfg.seed, trial);
    match kind {
        InstanceKind::Spec => Instance::Spec(random_spec(&mut rng, cfg, false, None)),
        InstanceKind::State => {
            let spec = random_spec(&mut rng, cfg, false, None);
            let p = random_simplex(&mut rng, spec.joint_dim());
            let state = BlockSpectrum::new(p, spec.d1(), spec.d2()).expect("simplex sample");
            Instance::State { spec, state }
        }
        InstanceKind::ProductState => {
            let spec = random_spec(&mut rng, cfg, true, None);
            let a = random_simplex(&mut rng, spec.d1());
            let b = random_simplex(&mut rng, spec.d2());
            let state = BlockSpectrum::product(&a, &b).expect("product of simplex samples");
            Instance::ProductState { spec, state }
        }
        InstanceKind::Transformation => {
            let spec = random_spec(&mut rng, cfg, false, None);
            let p = random_simplex(&mut rng, spec.joint_dim());
            let p2 = random_simplex(&mut rng, spec.joint_dim());
            let a = BlockSpectrum::new(p, spec.d1(), spec.d2()).expect("simplex sample");
            let b = BlockSpectrum::new(p2, spec.d1(), spec.d2()).expect("simplex sample");
            Instance::Transformation(
                Transformation::new(a, spec.clone(), b, spec).expect("shared arena"),
            )
        }
    }
}

/// A failing trial, replayable through the instance schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u64,
    pub message: String,
    pub instance: InstanceFile,
}

/// Per-suite outcome: counts, worst-case margins, counterexample dumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub suite: String,
    pub config: TrialConfig,
    pub trials: u64,
    pub passes: u64,
    pub failures: u64,
    pub undecided: u64,
    /// Suite-specific worst margin (smallest slack observed), in nats.
    pub worst_margin: Option<f64>,
    pub details: Vec<String>,
    pub counterexamples: Vec<Counterexample>,
}

impl BenchReport {
    fn new(suite: &str, config: &TrialConfig) -> Self {
        Self {
            suite: suite.to_string(),
            config: config.clone(),
            trials: 0,
            passes: 0,
            failures: 0,
            undecided: 0,
            worst_margin: None,
            details: Vec::new(),
            counterexamples: Vec::new(),
        }
    }

    /// Undecided LP verdicts are tolerated up to 0.1% of trials; any
    /// outright failure sinks the suite.
    pub fn passed(&self) -> bool {
        self.failures == 0 && (self.undecided as f64) <= 0.001 * self.trials as f64
    }

    fn fail(&mut self, trial: u64, message: String, instance: InstanceFile) {
        self.failures += 1;
        if self.counterexamples.len() < 16 {
            self.counterexamples.push(Counterexample {
                trial,
                message,
                instance,
            });
        }
    }
}

/// Thermo-majorization (Lorenz dominance) against the d-majorization LP on
/// random shared-arena instances with joint dimension ≤ 6.
pub fn suite_thermo_vs_lp(cfg: &TrialConfig) -> BenchReport {
    let mut report = BenchReport::new("thermo_vs_lp", cfg);
    for trial in 0..cfg.trials {
        let mut rng = rng_for(cfg.seed, trial);
        let mut spec = random_spec(&mut rng, cfg, false, Some(6));
        // Every eighth trial pins β1 = β2 to also exercise the single-bath
        // reduction subset.
        if trial % 8 == 0 {
            let beta = spec.baths().beta1();
            spec = EngineSpec::new(
                spec.h1().clone(),
                spec.h2().clone(),
                BathPair::new(beta, beta).expect("positive beta"),
            )
            .expect("same dims");
        }
        let p = random_simplex(&mut rng, spec.joint_dim());
        let p2 = random_simplex(&mut rng, spec.joint_dim());
        let a = BlockSpectrum::new(p.clone(), spec.d1(), spec.d2()).expect("simplex");
        let b = BlockSpectrum::new(p2.clone(), spec.d1(), spec.d2()).expect("simplex");
        report.trials += 1;

        let curve = majorization::thermo_majorizes(&a, &b, &spec, &spec)
            .expect("shared arena by construction");
        let q = spec.semi_gibbs().q().to_vec();
        let dump = || {
            let mut doc = InstanceFile::diagonal(&spec, &p);
            doc.final_state = Some(crate::instance::StateSpec::Diagonal { p: p2.clone() });
            doc
        };
        match majorization::d_majorize_lp(&p, &q, &p2, &q) {
            Ok(DMajorization::Feasible(witness)) => {
                let residual = witness.residual_p.max(witness.residual_q);
                let margin = cfg.tolerance - residual;
                report.worst_margin =
                    Some(report.worst_margin.map_or(margin, |m: f64| m.min(margin)));
                if curve {
                    report.passes += 1;
                } else {
                    report.fail(
                        trial,
                        "LP feasible but Lorenz dominance fails".to_string(),
                        dump(),
                    );
                }
            }
            Ok(DMajorization::Infeasible) => {
                if curve {
                    report.fail(
                        trial,
                        "Lorenz dominance holds but LP is infeasible".to_string(),
                        dump(),
                    );
                } else {
                    report.passes += 1;
                }
            }
            Ok(DMajorization::Undecided) => report.undecided += 1,
            Err(e) => report.fail(trial, format!("LP error: {e}"), dump()),
        }
    }
    report
        .details
        .push(format!("agreement {}/{}", report.passes, report.trials));
    report
}

/// Rational-weight instances: thermo-majorization must coincide with plain
/// majorization of the fine-grained vectors (denominators ≤ 64).
pub fn suite_fine_grain(cfg: &TrialConfig) -> BenchReport {
    let mut report = BenchReport::new("fine_grain", cfg);
    for trial in 0..cfg.trials {
        let mut rng = rng_for(cfg.seed, trial);
        // Integer local weights a_i, b_j in [1, 4]; every tenth trial is
        // the all-ones (infinite temperature) case where thermo- and plain
        // majorization coincide by definition.
        let sample = |rng: &mut ChaCha8Rng| -> Vec<u32> {
            (0..2).map(|_| rng.gen_range(1..=4u32)).collect()
        };
        let (a_w, b_w) = if trial % 10 == 0 {
            (vec![1u32, 1], vec![1u32, 1])
        } else {
            (sample(&mut rng), sample(&mut rng))
        };
        let beta1 = Uniform::new_inclusive(cfg.beta_range.0, cfg.beta_range.1).sample(&mut rng);
        let beta2 = Uniform::new_inclusive(cfg.beta_range.0, cfg.beta_range.1).sample(&mut rng);
        // Levels chosen so that e^{-β E_i} is proportional to the integers:
        // E_i = (ln max_a - ln a_i)/β ≥ 0.
        let levels = |weights: &[u32], beta: f64| -> EnergyLevels {
            let top = *weights.iter().max().unwrap() as f64;
            EnergyLevels::new(
                weights
                    .iter()
                    .map(|&a| (top.ln() - (a as f64).ln()) / beta)
                    .collect(),
            )
            .expect("finite levels")
        };
        let spec = EngineSpec::new(
            levels(&a_w, beta1),
            levels(&b_w, beta2),
            BathPair::new(beta1, beta2).expect("positive"),
        )
        .expect("small dims");

        let p = random_simplex(&mut rng, 4);
        let p2 = random_simplex(&mut rng, 4);
        let a = BlockSpectrum::new(p.clone(), 2, 2).expect("simplex");
        let b = BlockSpectrum::new(p2.clone(), 2, 2).expect("simplex");
        report.trials += 1;

        let thermo = majorization::thermo_majorizes(&a, &b, &spec, &spec).expect("shared arena");
        let mut d = Vec::with_capacity(4);
        for &ai in &a_w {
            for &bj in &b_w {
                d.push((ai * bj) as usize);
            }
        }
        let fine_p = majorization::fine_grain(&p, &d).expect("positive multiplicities");
        let fine_p2 = majorization::fine_grain(&p2, &d).expect("positive multiplicities");
        let plain = majorization::majorizes(fine_p.gamma(), fine_p2.gamma());
        if thermo == plain {
            report.passes += 1;
        } else {
            let mut doc = InstanceFile::diagonal(&spec, &p);
            doc.final_state = Some(crate::instance::StateSpec::Diagonal { p: p2.clone() });
            report.fail(
                trial,
                format!("thermo-majorization {thermo} vs fine-grained majorization {plain}"),
                doc,
            );
        }
    }
    report
        .details
        .push(format!("equivalence {}/{}", report.passes, report.trials));
    report
}

/// Smoothed min/max relative entropies on i.i.d. products of
/// `p = (0.7, 0.3)` against `q = (0.5, 0.5)`: per-copy values approach
/// `D_1` while the unsmoothed ones are exactly constant (additivity).
pub fn suite_asymptotics(cfg: &TrialConfig) -> BenchReport {
    let mut report = BenchReport::new("asymptotics", cfg);
    let p1 = [0.7, 0.3];
    let q1 = [0.5, 0.5];
    let eps = 0.05;
    let max_n: u32 = 14;
    let d1 = renyi_relative_entropy(&p1, &q1, AlphaValue::One);

    let mut dmin_per = Vec::new();
    let mut dmax_per = Vec::new();
    for n in 1..=max_n {
        let dim = 1usize << n;
        let mut p = vec![1.0; dim];
        for (idx, value) in p.iter_mut().enumerate() {
            for bit in 0..n {
                *value *= p1[(idx >> bit) & 1];
            }
        }
        let q = vec![0.5f64.powi(n as i32); dim];
        let dmin = smoothed_dmin(&p, &q, eps).expect("valid epsilon");
        let dmax = smoothed_dmax(&p, &q, eps).expect("valid epsilon");
        dmin_per.push(dmin / n as f64);
        dmax_per.push(dmax / n as f64);

        // Unsmoothed per-copy values are exactly additive.
        let d0 = renyi_relative_entropy(&p, &q, AlphaValue::Zero) / n as f64;
        let dinf = renyi_relative_entropy(&p, &q, AlphaValue::PosInfinity) / n as f64;
        let d0_single = renyi_relative_entropy(&p1, &q1, AlphaValue::Zero);
        let dinf_single = renyi_relative_entropy(&p1, &q1, AlphaValue::PosInfinity);
        report.trials += 2;
        if (d0 - d0_single).abs() <= 1e-12 && (dinf - dinf_single).abs() <= 1e-12 {
            report.passes += 2;
        } else {
            report.fail(
                n as u64,
                format!(
                    "additivity broken at N = {n}: D0/N = {d0}, Dmax/N = {dinf} vs {d0_single}, {dinf_single}"
                ),
                InstanceFile::diagonal(
                    &EngineSpec::new(
                        EnergyLevels::new(vec![0.0]).expect("levels"),
                        EnergyLevels::new(vec![0.0]).expect("levels"),
                        BathPair::new(1.0, 1.0).expect("betas"),
                    )
                    .expect("spec"),
                    &[1.0],
                ),
            );
        }
    }

    let bound = 3.0 / (max_n as f64).sqrt();
    let last = (max_n - 1) as usize;
    let at_two = 1usize;
    let checks = [
        (
            "dmin within 3/sqrt(N) at N=14",
            (dmin_per[last] - d1).abs() <= bound,
        ),
        (
            "dmax within 3/sqrt(N) at N=14",
            (dmax_per[last] - d1).abs() <= bound,
        ),
        (
            "dmin strictly closer at N=14 than at N=2",
            (dmin_per[last] - d1).abs() < (dmin_per[at_two] - d1).abs(),
        ),
        (
            "dmax strictly closer at N=14 than at N=2",
            (dmax_per[last] - d1).abs() < (dmax_per[at_two] - d1).abs(),
        ),
        (
            "dmin brackets D1 from below-or-near",
            dmin_per[last] <= d1 + bound,
        ),
        (
            "dmax brackets D1 from above-or-near",
            dmax_per[last] >= d1 - bound,
        ),
    ];
    for (name, ok) in checks {
        report.trials += 1;
        if ok {
            report.passes += 1;
        } else {
            report.fail(
                0,
                format!("{name} failed"),
                InstanceFile::diagonal(
                    &EngineSpec::new(
                        EnergyLevels::new(vec![0.0]).expect("levels"),
                        EnergyLevels::new(vec![0.0]).expect("levels"),
                        BathPair::new(1.0, 1.0).expect("betas"),
                    )
                    .expect("spec"),
                    &[1.0],
                ),
            );
        }
    }
    report.worst_margin =
        Some(bound - (dmin_per[last] - d1).abs().max((dmax_per[last] - d1).abs()));
    report.details.push(format!(
        "per-copy at N=14: dmin {:.6}, dmax {:.6}, D1 {:.6}",
        dmin_per[last], dmax_per[last], d1
    ));
    report
}

/// On random transformations the forward distance never exceeds the
/// negated reverse distance, and extraction never beats the reverse cost
/// under a fixed split rule.
pub fn suite_irreversibility(cfg: &TrialConfig) -> BenchReport {
    let mut report = BenchReport::new("irreversibility", cfg);
    let settings = ScanSettings {
        slack: cfg.tolerance,
        ..ScanSettings::default()
    };
    let mut worst_gap = f64::INFINITY;
    let mut mean_gap = 0.0;
    for trial in 0..cfg.trials {
        let t = match random_instance(cfg, trial, InstanceKind::Transformation) {
            Instance::Transformation(t) => t,
            _ => unreachable!("requested kind"),
        };
        report.trials += 1;
        let fwd = free_entropy_distance(&t, &settings).expect("valid transformation");
        let rev = free_entropy_distance(&t.reversed(), &settings).expect("valid transformation");
        let gap = -rev.s_distance - fwd.s_distance;
        worst_gap = worst_gap.min(gap);
        mean_gap += gap;
        // Extraction budget S_d vs cost sup under bath1-only units:
        // W_ext = S_d/β1 ≤ W_cost = sup/β1.
        let cost_ok = fwd.s_distance <= fwd.s_cost + cfg.tolerance;
        if gap >= -cfg.tolerance && cost_ok {
            report.passes += 1;
        } else {
            report.fail(
                trial,
                format!(
                    "irreversibility violated: gap {gap}, s_d {}",
                    fwd.s_distance
                ),
                InstanceFile::transformation(&t),
            );
        }
    }
    if report.trials > 0 {
        mean_gap /= report.trials as f64;
    }
    report.worst_margin = Some(worst_gap);
    report.details.push(format!(
        "gap distribution: worst {worst_gap:.3e}, mean {mean_gap:.3e}"
    ));
    report
}

/// The four suites back to back.
pub fn run_all(cfg: &TrialConfig) -> Vec<BenchReport> {
    vec![
        suite_thermo_vs_lp(cfg),
        suite_fine_grain(cfg),
        suite_asymptotics(cfg),
        suite_irreversibility(cfg),
    ]
}
