use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use synchro::recipes::{recipe, RECIPE_NAMES};
use synchro::run::{self, Outcome, Overrides, REPRODUCE_IDS};
use synchro::{Error, ExperimentSpec};

#[derive(Parser)]
#[command(name = "synchro", version, about = "Set-based verification of phase synchronization in coupled oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Follow the tube of the spec's initial balls and write traces and orbit plots.
    Simulate(Common),
    /// Run the spec's verification (listed balls, a covering or a period chain).
    Verify(Common),
    /// Write the lattice coverings of both sections.
    Cover(Common),
    /// Sample the one-sided Lipschitz constant along the first center's orbit.
    LambdaMap(Common),
    /// Print the resolved experiment as TOML.
    Show(Common),
    /// Rerun a canonical experiment and compare it with the reference values.
    Reproduce {
        /// One of fig2, fig3, fig4, fig5, table1, table2, single-ball.
        id: String,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment file.
    #[arg(long, conflicts_with = "recipe")]
    spec: Option<PathBuf>,
    /// Built-in experiment instead of a file.
    #[arg(long)]
    recipe: Option<String>,
    /// Output directory (default: the spec's `output`, else `out/<name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct Tuning {
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Steps between λ recomputations.
    #[arg(long)]
    lambda_stride: Option<u64>,
    /// Steps between recorded trace samples.
    #[arg(long)]
    record_stride: Option<u64>,
}

impl Tuning {
    fn overrides(&self) -> Overrides {
        Overrides {
            workers: self.workers,
            seed: self.seed,
            lambda_stride: self.lambda_stride,
            record_stride: self.record_stride,
        }
    }
}

fn load(c: &Common) -> Result<(ExperimentSpec, PathBuf), Error> {
    let mut spec = match (&c.spec, &c.recipe) {
        (Some(p), _) => ExperimentSpec::load(p)?,
        (None, Some(r)) => recipe(r)?,
        (None, None) => {
            return Err(Error::Usage(format!("give --spec FILE or --recipe NAME ({})", RECIPE_NAMES.join(", "))))
        }
    };
    c.tuning.overrides().apply(&mut spec);
    spec.validate()?;
    let out = c.out.clone().or_else(|| spec.output.clone()).unwrap_or_else(|| PathBuf::from("out").join(&spec.name));
    Ok((spec, out))
}

fn execute(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Simulate(c) => load(&c).and_then(|(s, o)| run::simulate(&s, &o)),
        Command::Verify(c) => load(&c).and_then(|(s, o)| run::verify(&s, &o)),
        Command::Cover(c) => load(&c).and_then(|(s, o)| run::cover(&s, &o)),
        Command::LambdaMap(c) => load(&c).and_then(|(s, o)| run::lambda_map(&s, &o)),
        Command::Show(c) => load(&c).map(|(s, _)| {
            print!("{}", s.to_toml());
            Outcome { passed: true, files: Vec::new(), summary: serde_json::Value::Null, checks: Vec::new() }
        }),
        Command::Reproduce { id, tuning, out } => {
            if !REPRODUCE_IDS.contains(&id.as_str()) {
                return Err(Error::Usage(format!("unknown id `{id}` (expected one of {})", REPRODUCE_IDS.join(", "))));
            }
            run::reproduce(&id, &out.join(&id), &tuning.overrides())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            let failed: Vec<_> = outcome.checks.iter().filter(|c| !c.pass).collect();
            for c in &failed {
                println!("FAIL {}: expected {} got {} ({})", c.name, c.expected, c.actual, c.tolerance);
            }
            if !outcome.checks.is_empty() {
                println!("{} of {} checks passed", outcome.checks.len() - failed.len(), outcome.checks.len());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                println!("verification did not succeed");
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
