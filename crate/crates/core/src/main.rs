use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mediatrix::scene::{
    builtin, builtin_names, run_scene, run_suite, CheckName, ExportFormat, RunOptions, SceneOutput, SceneSpec, SUITES,
};
use mediatrix::topology::Verdict;
use mediatrix::Error;

#[derive(Parser)]
#[command(name = "mediatrix", version, about = "Equidistant sets on polyhedral surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scene file or a builtin scene.
    Run {
        /// Path to a scene JSON file, or the name of a builtin scene.
        spec: String,
        #[command(flatten)]
        common: Common,
        /// Comma-separated checks to run instead of the scene defaults.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Comma-separated exports: svg, obj, csv.
        #[arg(long, value_delimiter = ',')]
        export: Vec<String>,
        /// Stop before computing fields if the surface fails the curvature check.
        #[arg(long)]
        require_cbb: bool,
    },
    /// Run a theorem suite.
    Suite {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// List builtin scenes and suites.
    Scenes,
    /// Print the JSON of a builtin scene.
    Show { name: String },
}

#[derive(Args)]
struct Common {
    /// Target edge length.
    #[arg(long)]
    resolution: Option<f64>,
    /// Seed for generated scenes.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and exports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print timings to stderr.
    #[arg(long)]
    timings: bool,
}

fn load_spec(arg: &str) -> Result<SceneSpec, Error> {
    let path = Path::new(arg);
    if path.exists() {
        SceneSpec::from_json(&fs::read_to_string(path)?)
    } else {
        builtin(arg)
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn print_verdicts(checks: &[Verdict]) {
    for v in checks {
        let tag = if v.inconclusive {
            "INCONCLUSIVE"
        } else if v.pass {
            "PASS"
        } else {
            "FAIL"
        };
        eprintln!("{tag:<12} {:<24} {}", v.scene, v.check);
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Scenes => {
            println!("scenes:");
            for n in builtin_names() {
                let s = builtin(n)?;
                println!("  {n:<22} {}", s.description);
            }
            println!("suites:");
            for s in SUITES {
                println!("  {s}");
            }
            Ok(true)
        }
        Command::Show { name } => {
            println!("{}", serde_json::to_string_pretty(&builtin(&name)?)?);
            Ok(true)
        }
        Command::Run {
            spec,
            common,
            checks,
            export,
            require_cbb,
        } => {
            let spec = load_spec(&spec)?;
            let checks = checks
                .map(|c| c.iter().map(|s| CheckName::parse(s.trim())).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let formats = export
                .iter()
                .map(|s| ExportFormat::parse(s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let opts = RunOptions {
                resolution: common.resolution,
                checks,
                seed: common.seed,
                require_cbb,
            };
            let out: SceneOutput = run_scene(&spec, &opts)?;
            let json = out.report.to_json();
            println!("{json}");
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
            if common.out.is_some() {
                write(&dir, "report.json", &json)?;
            }
            for f in formats {
                write(&dir, f.file_name(), &f.render(&out))?;
            }
            if common.timings {
                for (stage, t) in &out.timings {
                    eprintln!("{stage:<20} {t:.3} s");
                }
            }
            if let Some(e) = &out.report.error {
                eprintln!("error: {e}");
            }
            print_verdicts(&out.report.checks);
            Ok(out.report.pass)
        }
        Command::Suite { name, common } => {
            let opts = RunOptions {
                resolution: common.resolution,
                checks: None,
                seed: common.seed,
                require_cbb: false,
            };
            let start = std::time::Instant::now();
            let report = run_suite(&name, &opts)?;
            let json = report.to_json();
            println!("{json}");
            if let Some(dir) = &common.out {
                write(dir, "report.json", &json)?;
            }
            if common.timings {
                eprintln!("suite {name}: {:.2} s", start.elapsed().as_secs_f64());
            }
            for r in &report.scenes {
                print_verdicts(&r.checks);
            }
            print_verdicts(&report.aggregate);
            eprintln!("{}: {}/{} passed", report.suite, report.passed, report.total);
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
