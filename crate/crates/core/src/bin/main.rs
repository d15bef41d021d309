use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use formation_koopman::harness::report::{fmt_f64, records_csv, summary_json, trajectories_csv};
use formation_koopman::harness::{
    build_scene, compare_dictionaries, practical_modes, run_scenario, sensing_range, Preset,
    ScenarioConfig,
};
use formation_koopman::observables::DictionaryChoice;
use formation_koopman::Error;

#[derive(Parser)]
#[command(name = "formation-koopman", version, about = "Leader-follower formation estimation on curved surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its per-step CSV and summary JSON.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the dictionary choice (a–g).
        #[arg(long)]
        dictionary: Option<String>,
        /// Per-step CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Summary JSON output path; printed to stdout when omitted.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// RMSE for each dictionary choice.
    Dictionaries {
        #[command(flatten)]
        scenarios: ScenarioSet,
        /// Comma-separated choices.
        #[arg(long, default_value = "a,b,c,d,e,f,g")]
        choices: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Averaged sensing range with and without estimation.
    SensingRange {
        #[command(flatten)]
        scenarios: ScenarioSet,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// RMSE of the practical velocity modes.
    Practical {
        #[command(flatten)]
        scenarios: ScenarioSet,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leader, ideal and estimated curves for plotting.
    Trajectories {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in preset: type1, type2 or type3.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig, Error> {
        match (&self.preset, &self.config) {
            (_, Some(path)) => ScenarioConfig::from_path(path),
            (Some(p), None) => Ok(p.parse::<Preset>()?.config()),
            (None, None) => Ok(Preset::Type1.config()),
        }
    }
}

#[derive(Args)]
struct ScenarioSet {
    /// Built-in presets (repeatable); all three when neither this nor
    /// --config is given.
    #[arg(long = "preset", conflicts_with = "config")]
    presets: Vec<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioSet {
    fn load(&self) -> Result<Vec<(String, ScenarioConfig)>, Error> {
        if let Some(path) = &self.config {
            return Ok(vec![(path.display().to_string(), ScenarioConfig::from_path(path)?)]);
        }
        if self.presets.is_empty() {
            return Ok(Preset::ALL.iter().map(|p| (p.to_string(), p.config())).collect());
        }
        self.presets
            .iter()
            .map(|s| {
                let p: Preset = s.parse()?;
                Ok((p.to_string(), p.config()))
            })
            .collect()
    }
}

enum Failure {
    Sim(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Sim(e)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            dictionary,
            csv,
            json,
        } => {
            let mut cfg = scenario.load()?;
            if let Some(d) = dictionary {
                cfg.dictionary = d.parse()?;
                cfg.validate()?;
            }
            let report = run_scenario(&cfg)?;
            if let Some(path) = &csv {
                emit(Some(path), &records_csv(&report))?;
            }
            emit(json.as_deref(), &summary_json(&report))?;
        }
        Command::Dictionaries {
            scenarios,
            choices,
            out,
        } => {
            let choices = choices
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<DictionaryChoice>, _>>()?;
            let mut text = String::from("scenario,choice,rmse\n");
            for (name, cfg) in scenarios.load()? {
                for (choice, rmse) in compare_dictionaries(&cfg, &choices)? {
                    text += &format!("{name},{choice},{}\n", fmt_f64(rmse));
                }
            }
            emit(out.as_deref(), &text)?;
        }
        Command::SensingRange { scenarios, out } => {
            let mut text = String::from("scenario,with_estimation,without_estimation\n");
            for (name, cfg) in scenarios.load()? {
                let with = sensing_range(&cfg, true)?;
                let without = sensing_range(&cfg, false)?;
                text += &format!("{name},{},{}\n", fmt_f64(with), fmt_f64(without));
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Practical { scenarios, out } => {
            let mut text = String::from("scenario,mode,rmse\n");
            for (name, cfg) in scenarios.load()? {
                for (mode, rmse) in practical_modes(&cfg)? {
                    text += &format!("{name},{mode},{}\n", fmt_f64(rmse));
                }
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Trajectories { scenario, out } => {
            let cfg = scenario.load()?;
            let scene = build_scene(&cfg)?;
            let report = run_scenario(&cfg)?;
            emit(out.as_deref(), &trajectories_csv(&scene, &report))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Sim(e)) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(1)
        }
    }
}
