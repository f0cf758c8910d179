use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kenframe::workbench::{run, Command, Options, PotentialArg, Task};
use kenframe::Mode;

/// Curvature, Kenmotsu and η-Ricci soliton checks on 3-manifolds given by frames.
#[derive(Parser)]
#[command(name = "kenframe", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Geometry identities plus almost-contact and Kenmotsu checks.
    Check(Target),
    /// Fit the η-Ricci soliton constants λ and μ.
    Soliton(Target),
    /// Codazzi, cyclic-parallel, φ-Ricci, R·R = Q(S,R) and space-form detection.
    Classify(Target),
    /// Everything, with per-point tables.
    Report(Target),
    /// Fuzz the universal identities on random frames.
    RandomAudit {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Target {
    /// Spec file path or built-in name (kenmotsu-s7, flat3, hyperbolic3, sphere3, kenmotsu-warped).
    target: String,
    #[command(flatten)]
    common: Common,
    /// Number of sample points when the spec file lists none.
    #[arg(long, default_value_t = 5)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Soliton potential: `xi` or comma-separated frame components.
    #[arg(long, default_value = "xi")]
    potential: String,
    /// Fit a plain Ricci soliton (μ = 0).
    #[arg(long)]
    mu_zero: bool,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "1e-8")]
    tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    /// Jet degree.
    #[arg(long, default_value_t = 4)]
    degree: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

fn options(common: &Common) -> Options {
    Options {
        tol: common.tol,
        mode: match common.mode {
            ModeArg::Float => Mode::Float,
            ModeArg::Rational => Mode::Rational,
        },
        degree: common.degree,
        ..Options::default()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, t) = match cli.command {
        Sub::RandomAudit { count, seed, common } => return finish(&Command::RandomAudit { count, seed }, &options(&common), common.json),
        Sub::Check(t) => (Task::Check, t),
        Sub::Soliton(t) => (Task::Soliton, t),
        Sub::Classify(t) => (Task::Classify, t),
        Sub::Report(t) => (Task::Report, t),
    };
    let potential = if t.potential.trim() == "xi" {
        PotentialArg::Xi
    } else {
        PotentialArg::Components(t.potential.split(',').map(|s| s.trim().to_string()).collect())
    };
    let opts = Options { points: t.points, seed: t.seed, potential, mu_zero: t.mu_zero, ..options(&t.common) };
    finish(&Command::Analyze { task, target: t.target }, &opts, t.common.json)
}

fn finish(command: &Command, opts: &Options, json: bool) -> ExitCode {
    match run(command, opts) {
        Ok(report) => {
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
