//! `rbg`: simulate, reduce and evaluate hybrid reduced models from the shell.

mod plot;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rbg_core::dae::{DaeModel, InputSchedule, ModelDocument, PiecewiseLinear, MODEL_SCHEMA_VERSION};
use rbg_core::hybrid::{reduce_model, HybridArtifact, HybridModel, IntegrationDefaults, ReduceOptions, StabModes, Validation};
use rbg_core::layer::Activation;
use rbg_core::metrics::{benchmark_speedup, error_report, Channel};
use rbg_core::mor::TruncationRule;
use rbg_core::sim::{
    filter_constraints, integrate, read_campaign, run_campaign, sample_doe, write_campaign, CampaignIndex, DoePlan,
    ParamSpace, StepSettings, Trajectory, CAMPAIGN_INDEX,
};
use rbg_core::thermal::{model_from_document, ILLUSTRATIVE_KIND, MULTIZONE_KIND, STANDARD_PRESSURE};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "rbg", version, about = "Hybrid reduced models of lumped thermal networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the full model and write a trajectory CSV
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        step: StepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Latin-hypercube plan over the cabin parameter space, humidity-filtered
    Doe {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parameter space JSON (defaults to the cabin cooling bounds)
        #[arg(long)]
        space: Option<PathBuf>,
        /// Total pressure for the humidity constraint, Pa
        #[arg(long, default_value_t = STANDARD_PRESSURE)]
        pressure: f64,
        #[arg(long)]
        no_filter: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate every point of a plan into a campaign directory
    Campaign {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        step: StepArgs,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Snapshots, SVD, DEIM, classification and layer calibration into an artifact
    Reduce {
        #[command(flatten)]
        model: ModelArgs,
        /// Training campaign directory
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long, conflicts_with = "eps_tol")]
        n_modes: Option<usize>,
        #[arg(long)]
        eps_tol: Option<f64>,
        /// `all`, `sweep` or a mode count
        #[arg(long, default_value = "all")]
        n_stab: String,
        /// Held-out campaign directory for `--n-stab sweep`
        #[arg(long)]
        validation: Option<PathBuf>,
        /// Schedule the campaign points were layered over
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, default_value = "identity", value_parser = parse_activation)]
        activation: Activation,
        /// Recorded in the artifact provenance
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        substeps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a hybrid artifact
    RunReduced {
        #[arg(long)]
        artifact: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        step: StepArgs,
        /// Run every point of a plan; `--out` is then a campaign directory
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Fill tertiary variables through the reconstruction layer
        #[arg(long)]
        reconstruct: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error report between two trajectory sets (CSV files or campaign directories)
    Evaluate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        approx: PathBuf,
        /// Comma-separated variable names (default: all differential variables)
        #[arg(long, value_delimiter = ',')]
        variables: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write an SVG plot of reference and approximation
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Variables to plot (default: the worst one)
        #[arg(long, value_delimiter = ',')]
        plot_variables: Vec<String>,
        /// Parameter point to plot (default: the worst one)
        #[arg(long)]
        plot_point: Option<usize>,
    },
    /// Wall-clock comparison of full and hybrid integration
    Bench {
        #[arg(long)]
        artifact: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        step: StepArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// `illustrative`, `multizone` or a model document JSON
    #[arg(long, default_value = "illustrative")]
    model: String,
    /// Parameter JSON for a built-in model; missing fields take defaults
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    /// Constant input, NAME=VALUE
    #[arg(long = "input", value_name = "NAME=VALUE")]
    inputs: Vec<String>,
    /// Piecewise-linear input from a two-column CSV, NAME=FILE
    #[arg(long = "series", value_name = "NAME=FILE")]
    series: Vec<String>,
}

#[derive(Args, Debug)]
struct StepArgs {
    #[arg(long, default_value_t = 3600.0)]
    t_final: f64,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    substeps: Option<usize>,
}

fn parse_activation(s: &str) -> std::result::Result<Activation, String> {
    s.parse().map_err(|e: rbg_core::Error| e.to_string())
}

impl ModelArgs {
    fn load(&self) -> Result<DaeModel> {
        let params = match &self.params {
            Some(p) => Some(read_json::<serde_json::Value>(p)?),
            None => None,
        };
        let kind = match self.model.as_str() {
            "illustrative" => ILLUSTRATIVE_KIND,
            "multizone" => MULTIZONE_KIND,
            path => {
                if params.is_some() {
                    bail!("--params only applies to built-in models");
                }
                let doc: ModelDocument = read_json(Path::new(path))?;
                return Ok(model_from_document(&doc)?);
            }
        };
        let doc = ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            kind: kind.into(),
            name: String::new(),
            parameters: params.unwrap_or_else(|| serde_json::json!({})),
            differential: None,
            algebraic: None,
            inputs: None,
            incidence: None,
        };
        Ok(model_from_document(&doc)?)
    }
}

fn split_pair(s: &str) -> Result<(&str, &str)> {
    s.split_once('=').ok_or_else(|| anyhow!("expected NAME=VALUE, got `{s}`"))
}

impl ScheduleArgs {
    fn build(&self) -> Result<InputSchedule> {
        let mut sched = InputSchedule::new();
        for s in &self.inputs {
            let (name, value) = split_pair(s)?;
            let v: f64 = value.parse().with_context(|| format!("input `{name}`"))?;
            sched = sched.with_constant(name, v);
        }
        for s in &self.series {
            let (name, file) = split_pair(s)?;
            let f = File::open(file).with_context(|| format!("opening {file}"))?;
            sched = sched.with_series(name, PiecewiseLinear::from_csv(BufReader::new(f))?);
        }
        Ok(sched)
    }
}

impl StepArgs {
    fn settings(&self, defaults: IntegrationDefaults) -> StepSettings {
        StepSettings::new(self.t_final, self.dt.unwrap_or(defaults.dt), self.substeps.unwrap_or(defaults.substeps))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            // buffered so a closed stdout surfaces as a plain io error
            let mut buf = Vec::new();
            write(&mut buf)?;
            let mut w = io::stdout().lock();
            w.write_all(&buf)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn emit_csv(out: Option<&Path>, traj: &Trajectory, model: &DaeModel) -> Result<()> {
    emit(out, |w| Ok(traj.write_csv(w, model.space())?))
}

/// A single CSV or a campaign directory.
fn read_set(path: &Path, model: &DaeModel) -> Result<Vec<Trajectory>> {
    if path.is_dir() {
        Ok(read_campaign(path, model).with_context(|| format!("reading campaign {}", path.display()))?)
    } else {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Ok(vec![Trajectory::read_csv(BufReader::new(f), model.space())?])
    }
}

fn load_hybrid(path: &Path) -> Result<HybridModel> {
    let text = fs::read_to_string(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(HybridModel::from_artifact(HybridArtifact::from_json(&text)?)?)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { model, schedule, step, out } => {
            let m = model.load()?;
            let traj = integrate(&m, &schedule.build()?, step.settings(IntegrationDefaults::default()))?;
            emit_csv(out.as_deref(), &traj, &m)
        }
        Command::Doe { n, seed, space, pressure, no_filter, out } => {
            let space = match space {
                Some(p) => read_json::<ParamSpace>(&p)?,
                None => ParamSpace::cabin_cooling(),
            };
            let mut plan = sample_doe(&space, n, seed)?;
            if !no_filter {
                plan = filter_constraints(&plan, pressure)?;
            }
            emit_json(out.as_deref(), &plan)
        }
        Command::Campaign { model, plan, schedule, step, sequential, out } => {
            let m = model.load()?;
            let plan: DoePlan = read_json(&plan)?;
            let settings = step.settings(IntegrationDefaults::default());
            let trajs = run_campaign(&m, &schedule.build()?, &plan, settings, !sequential)?;
            let index = write_campaign(&out, &m, settings, &trajs)?;
            emit_json(None, &index)
        }
        Command::Reduce {
            model,
            campaign,
            n_modes,
            eps_tol,
            n_stab,
            validation,
            schedule,
            activation,
            seed,
            dt,
            substeps,
            out,
        } => {
            let m = model.load()?;
            let index: CampaignIndex = read_json(&campaign.join(CAMPAIGN_INDEX))?;
            let training = read_campaign(&campaign, &m)?;
            let rule = match (n_modes, eps_tol) {
                (_, Some(eps)) => TruncationRule::Epsilon(eps),
                (Some(n), None) => TruncationRule::Modes(n),
                (None, None) => TruncationRule::Modes(4),
            };
            let n_stab = match n_stab.as_str() {
                "all" => StabModes::All,
                "sweep" => StabModes::Sweep,
                k => StabModes::Fixed(k.parse().map_err(|_| anyhow!("--n-stab must be `all`, `sweep` or a count"))?),
            };
            let opts = ReduceOptions {
                rule,
                n_stab,
                activation,
                defaults: IntegrationDefaults {
                    dt: dt.unwrap_or(index.settings.dt),
                    substeps: substeps.unwrap_or(index.settings.substeps),
                },
                seed,
            };
            let base = schedule.build()?;
            let held_out = match &validation {
                Some(dir) => read_campaign(dir, &m)?,
                None => Vec::new(),
            };
            let v = validation.as_ref().map(|_| Validation {
                trajectories: &held_out,
                base: &base,
            });
            let mut artifact = reduce_model(&m, &training, &opts, v)?;
            artifact.provenance.trajectories = index.files;
            emit(out.as_deref(), |w| {
                writeln!(w, "{}", artifact.to_json()?)?;
                Ok(())
            })
        }
        Command::RunReduced { artifact, schedule, step, plan, reconstruct, out } => {
            let hm = load_hybrid(&artifact)?;
            let settings = step.settings(hm.artifact().defaults);
            let base = schedule.build()?;
            let finish = |t: Trajectory| if reconstruct { hm.reconstruct_tertiary(&t) } else { Ok(t) };
            match plan {
                Some(plan) => {
                    let plan: DoePlan = read_json(&plan)?;
                    let dir = out.ok_or_else(|| anyhow!("--out DIR is required with --plan"))?;
                    let trajs = plan
                        .points
                        .iter()
                        .map(|p| hm.integrate_point(&base, p, settings).and_then(finish))
                        .collect::<rbg_core::Result<Vec<_>>>()?;
                    let index = write_campaign(&dir, hm.model(), settings, &trajs)?;
                    emit_json(None, &index)
                }
                None => {
                    let traj = finish(hm.integrate(&base, settings)?)?;
                    emit_csv(out.as_deref(), &traj, hm.model())
                }
            }
        }
        Command::Evaluate {
            model,
            reference,
            approx,
            variables,
            out,
            plot,
            plot_variables,
            plot_point,
        } => {
            let m = model.load()?;
            let space = m.space();
            let r = read_set(&reference, &m)?;
            let a = read_set(&approx, &m)?;
            let channels = if variables.is_empty() {
                (0..m.n_theta()).map(Channel::Theta).collect()
            } else {
                variables.iter().map(|v| Channel::by_name(space, v)).collect::<rbg_core::Result<Vec<_>>>()?
            };
            let report = error_report(&r, &a, space, &channels)?;
            if let Some(path) = plot {
                let names = if plot_variables.is_empty() {
                    vec![report.worst_variable.clone()]
                } else {
                    plot_variables
                };
                let chans = names.iter().map(|v| Channel::by_name(space, v)).collect::<rbg_core::Result<Vec<_>>>()?;
                let p = plot_point.unwrap_or(report.worst.point);
                if p >= r.len() {
                    bail!("--plot-point {p} out of range ({} points)", r.len());
                }
                let svg = plot::render(&r[p], &a[p], space, &chans);
                fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
            }
            emit_json(out.as_deref(), &report)
        }
        Command::Bench { artifact, schedule, step, repeats, out } => {
            let hm = load_hybrid(&artifact)?;
            let settings = step.settings(hm.artifact().defaults);
            let report = benchmark_speedup(hm.model(), &hm, &schedule.build()?, settings, repeats)?;
            emit_json(out.as_deref(), &report)
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    causes: Vec<String>,
}

fn fail(kind: &str, message: String, causes: Vec<String>, code: u8) -> ExitCode {
    let body = ErrorBody {
        error: kind,
        message,
        causes,
    };
    eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| format!("{{\"error\":\"{kind}\"}}")));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim_end().to_string(), Vec::new(), 2),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            let causes = e.chain().skip(1).map(|c| c.to_string()).collect();
            fail("failed", e.to_string(), causes, 1)
        }
    }
}
