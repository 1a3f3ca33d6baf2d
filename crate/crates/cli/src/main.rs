//! `thermoforge`: feasibility verdicts and one-shot thermodynamic reports
//! for bipartite systems coupled to two heat baths.
//!
//! Subcommands: `check` (transformation feasibility), `engine` (one-step
//! cycle report), `curve` (Lorenz-curve CSV), `asym` (asymmetry table),
//! `bench` (seeded verification suites).
//!
//! Exit codes: 0 feasible/pass, 1 infeasible/fail, 2 input error,
//! 3 undecided.

mod jsonfmt;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use thermoforge_core::asymmetry;
use thermoforge_core::engine::{self, EngineCycle, EngineSplit, SpontaneityRoute};
use thermoforge_core::instance::InstanceFile;
use thermoforge_core::majorization::{self, DMajorization};
use thermoforge_core::spectra::DenseState;
use thermoforge_core::transforms::{self, clock_extend, ScanSettings, SplitRule, Transformation};
use thermoforge_core::veribench::{self, TrialConfig};

#[derive(Parser)]
#[command(
    name = "thermoforge",
    version,
    about = "One-shot second laws for two-bath heat engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ScanArgs {
    /// Interior grid points of the α-scan.
    #[arg(long = "alpha-grid", default_value_t = 120)]
    alpha_grid: usize,
    /// Feasibility slack in nats (overrides THERMOFORGE_TOL).
    #[arg(long)]
    tol: Option<f64>,
}

impl ScanArgs {
    fn settings(&self) -> Result<ScanSettings, String> {
        let mut settings = ScanSettings {
            grid_points: self.alpha_grid.max(2),
            ..ScanSettings::default()
        };
        if let Ok(text) = std::env::var("THERMOFORGE_TOL") {
            settings.slack = text
                .parse::<f64>()
                .map_err(|e| format!("THERMOFORGE_TOL: {e}"))?;
        }
        if let Some(tol) = self.tol {
            settings.slack = tol;
        }
        Ok(settings)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the instance's transformation is feasible.
    Check {
        file: PathBuf,
        /// Catalytic verdict (the default; kept for symmetry).
        #[arg(long, conflicts_with = "no_catalytic")]
        catalytic: bool,
        /// Non-catalytic verdict via thermo-majorization.
        #[arg(long)]
        no_catalytic: bool,
        /// Scan the signed α family (full-support states, fixed arena).
        #[arg(long)]
        signed_alpha: bool,
        /// Also run the d-majorization LP; exits 3 if it is undecided.
        #[arg(long)]
        lp: bool,
        /// Work split rule: bath1 | bath2 | w1=<val>.
        #[arg(long, default_value = "bath1")]
        split: String,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// One-step engine cycle report for the instance's working state.
    Engine {
        file: PathBuf,
        /// Split rule: alpha1 | bath1 | bath2 | w1=<val>.
        #[arg(long, default_value = "alpha1")]
        split: String,
        /// Emit the α-works table as CSV instead of the JSON report.
        #[arg(long)]
        table: bool,
        /// Run the correlation engine (final = product of marginals).
        #[arg(long)]
        correlation: bool,
        /// Decide spontaneity non-catalytically (thermo-majorization).
        #[arg(long)]
        no_catalytic: bool,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Export the state's thermo-majorization Lorenz curve as CSV.
    Curve { file: PathBuf },
    /// Asymmetry table of the instance's (dense) state.
    Asym {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the seeded verification suites.
    Bench {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// thermo_vs_lp | fine_grain | asymptotics | irreversibility | all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<InstanceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_split(
    text: &str,
    engine: bool,
) -> Result<(Option<SplitRule>, Option<EngineSplit>), String> {
    let rule = match text {
        "bath1" => (Some(SplitRule::Bath1Only), Some(EngineSplit::Bath1Only)),
        "bath2" => (Some(SplitRule::Bath2Only), Some(EngineSplit::Bath2Only)),
        "alpha1" if engine => (None, Some(EngineSplit::Alpha1)),
        other => {
            if let Some(value) = other.strip_prefix("w1=") {
                let w1: f64 = value
                    .parse()
                    .map_err(|e| format!("--split w1=<val>: {e}"))?;
                (Some(SplitRule::User(w1)), Some(EngineSplit::W1(w1)))
            } else {
                return Err(format!(
                    "--split must be bath1, bath2{} or w1=<val>, got {other}",
                    if engine { ", alpha1" } else { "" }
                ));
            }
        }
    };
    Ok(rule)
}

fn print_report(value: serde_json::Value, format: Format) {
    match format {
        Format::Json => println!("{}", jsonfmt::to_json_string(&value)),
        Format::Csv => print!("{}", jsonfmt::to_flat_csv(&value)),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check {
            file,
            no_catalytic,
            signed_alpha,
            lp,
            split,
            scan,
            format,
            ..
        } => {
            let settings = scan.settings()?;
            let doc = load_instance(&file)?;
            let (t, warnings) = doc.to_transformation().map_err(|e| e.to_string())?;
            let (rule, _) = parse_split(&split, false)?;
            let rule = rule.expect("non-engine splits always map");
            let report =
                transforms::transform_report(&t, rule, &settings).map_err(|e| e.to_string())?;

            let mut lp_verdict: Option<&str> = None;
            let mut undecided = false;
            if lp {
                let outcome = run_lp(&t)?;
                lp_verdict = Some(match outcome {
                    DMajorization::Feasible(_) => "feasible",
                    DMajorization::Infeasible => "infeasible",
                    DMajorization::Undecided => {
                        undecided = true;
                        "undecided"
                    }
                });
            }

            let feasible = if no_catalytic {
                report.feasible_slto
            } else if signed_alpha {
                transforms::cslto_feasible_signed(&t, &settings)
                    .map_err(|e| e.to_string())?
                    .feasible
            } else {
                report.feasible_cslto
            };

            let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
            let object = value.as_object_mut().expect("report is an object");
            object.insert(
                "verdict".into(),
                json!(if undecided {
                    "undecided"
                } else if feasible {
                    "feasible"
                } else {
                    "infeasible"
                }),
            );
            object.insert(
                "route".into(),
                json!(if no_catalytic {
                    "slto"
                } else if signed_alpha {
                    "cslto-signed"
                } else {
                    "cslto"
                }),
            );
            if let Some(v) = lp_verdict {
                object.insert("lp_verdict".into(), json!(v));
            }
            if !warnings.is_empty() {
                object.insert("warnings".into(), json!(warnings));
            }
            print_report(value, format);
            Ok(ExitCode::from(if undecided {
                3
            } else if feasible {
                0
            } else {
                1
            }))
        }
        Command::Engine {
            file,
            split,
            table,
            correlation,
            no_catalytic,
            scan,
            format,
        } => {
            let settings = scan.settings()?;
            let doc = load_instance(&file)?;
            let spec = doc.initial_spec().map_err(|e| e.to_string())?;
            let state = doc.load_initial().map_err(|e| e.to_string())?;
            let (_, engine_split) = parse_split(&split, true)?;
            let engine_split = engine_split.expect("engine splits always map");

            let report = if correlation {
                let final_state = doc.load_final().map_err(|e| e.to_string())?;
                engine::correlation_engine(
                    &state.spectrum,
                    &spec,
                    final_state.as_ref().map(|s| &s.spectrum),
                    &settings,
                )
                .map_err(|e| e.to_string())?
            } else {
                let cycle =
                    EngineCycle::new(state.spectrum.clone(), spec).map_err(|e| e.to_string())?;
                let route = if no_catalytic {
                    SpontaneityRoute::ThermoMajorization
                } else {
                    SpontaneityRoute::Catalytic
                };
                engine::engine_report_via(&cycle, engine_split, route, &settings)
                    .map_err(|e| e.to_string())?
            };

            if table {
                let rows = report
                    .alpha_works
                    .as_ref()
                    .ok_or("no alpha-works table (correlated working state)")?;
                let mut out = String::from("alpha,w1,w2,w_ext,eta1,eta2\n");
                for row in &rows.rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        jsonfmt::fmt_num(row.alpha.as_f64()),
                        jsonfmt::fmt_num(row.w1),
                        jsonfmt::fmt_num(row.w2),
                        jsonfmt::fmt_num(row.w_ext),
                        row.eta1.map(jsonfmt::fmt_num).unwrap_or_default(),
                        row.eta2.map(jsonfmt::fmt_num).unwrap_or_default(),
                    ));
                }
                print!("{out}");
            } else {
                let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
                if let Some(object) = value.as_object_mut() {
                    if let Some(warning) = &state.dephasing_warning {
                        object.insert("warnings".into(), json!([warning]));
                    }
                }
                print_report(value, format);
            }
            Ok(ExitCode::from(if report.spontaneous { 0 } else { 1 }))
        }
        Command::Curve { file } => {
            let doc = load_instance(&file)?;
            let spec = doc.initial_spec().map_err(|e| e.to_string())?;
            let state = doc.load_initial().map_err(|e| e.to_string())?;
            let curve = majorization::thermo_lorenz_curve(&state.spectrum, &spec)
                .map_err(|e| e.to_string())?;
            let mut out = String::from("x,y\n");
            for &(x, y) in curve.points() {
                out.push_str(&format!(
                    "{},{}\n",
                    jsonfmt::fmt_num(x),
                    jsonfmt::fmt_num(y)
                ));
            }
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Asym { file, format } => {
            let doc = load_instance(&file)?;
            let spec = doc.initial_spec().map_err(|e| e.to_string())?;
            let state = doc.load_initial().map_err(|e| e.to_string())?;
            let dense = state
                .dense
                .unwrap_or_else(|| DenseState::from_block_spectrum(&state.spectrum));
            let report = asymmetry::asymmetry_table(&dense, &spec).map_err(|e| e.to_string())?;
            match format {
                Format::Csv => {
                    let mut out = String::from("alpha,value,informational\n");
                    for row in &report.values {
                        out.push_str(&format!(
                            "{},{},{}\n",
                            jsonfmt::fmt_num(row.alpha.as_f64()),
                            jsonfmt::fmt_num(row.value),
                            row.informational
                        ));
                    }
                    print!("{out}");
                }
                Format::Json => {
                    let value = serde_json::to_value(&report.values).map_err(|e| e.to_string())?;
                    print_report(json!({ "values": value }), Format::Json);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            seed,
            trials,
            suite,
            format,
        } => {
            let cfg = TrialConfig::with_seed_and_trials(seed, trials);
            let reports = match suite.as_str() {
                "thermo_vs_lp" => vec![veribench::suite_thermo_vs_lp(&cfg)],
                "fine_grain" => vec![veribench::suite_fine_grain(&cfg)],
                "asymptotics" => vec![veribench::suite_asymptotics(&cfg)],
                "irreversibility" => vec![veribench::suite_irreversibility(&cfg)],
                "all" => veribench::run_all(&cfg),
                other => return Err(format!("unknown suite: {other}")),
            };
            let all_passed = reports.iter().all(|r| r.passed());
            let summary: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("serializable report");
                    v.as_object_mut()
                        .expect("object")
                        .insert("passed".into(), json!(r.passed()));
                    v
                })
                .collect();
            print_report(json!({ "suites": summary, "passed": all_passed }), format);
            Ok(ExitCode::from(if all_passed { 0 } else { 1 }))
        }
    }
}

/// LP cross-check of the non-catalytic verdict (clock-extended as needed).
fn run_lp(t: &Transformation) -> Result<DMajorization, String> {
    let (p, p2, spec) = if t.same_arena() {
        (
            t.initial_state().p().to_vec(),
            t.final_state().p().to_vec(),
            t.initial_spec().clone(),
        )
    } else {
        let ext = clock_extend(t).map_err(|e| e.to_string())?;
        (
            ext.initial.p().to_vec(),
            ext.final_state.p().to_vec(),
            ext.spec,
        )
    };
    let q = spec.semi_gibbs().q().to_vec();
    majorization::d_majorize_lp(&p, &q, &p2, &q).map_err(|e| e.to_string())
}
