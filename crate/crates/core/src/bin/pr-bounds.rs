use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pr_bounds::report::{
    load_config, reproduce_table, run_scenario, self_test, table_csv, table_text, write_atomic,
    ExitStatus, RunOptions, SelfTestOptions, ToleranceProfile,
};
use pr_bounds::Error;

#[derive(Parser)]
#[command(
    name = "pr-bounds",
    version,
    about = "Sum rules and time-domain bounds for passive dielectric models"
)]
struct Cli {
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Strict,
    Default,
}

impl From<Profile> for ToleranceProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Strict => ToleranceProfile::Strict,
            Profile::Default => ToleranceProfile::Default,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a config file.
    Run { config: PathBuf },
    /// Reproduce the equivalent plasma-frequency table from a metal database.
    Table { db: PathBuf },
    /// Run the invariant checks of every module.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Metal database to check instead of the bundled one.
        #[arg(long)]
        db: Option<PathBuf>,
    },
}

fn fail(e: &Error) -> ExitStatus {
    eprintln!("error [{}]: {e}", e.module());
    ExitStatus::for_error(e)
}

fn run(config: PathBuf, opts: RunOptions) -> ExitStatus {
    let scenarios = match load_config(&config) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let mut status = ExitStatus::Ok;
    for cfg in &scenarios {
        let out = match run_scenario(cfg, &opts) {
            Ok(out) => out,
            Err(e) => {
                eprintln!("scenario {}:", cfg.name);
                return fail(&e);
            }
        };
        let r = &out.report;
        println!(
            "{} {:<24} {:>7.2}s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            cfg.name,
            out.timing.total_seconds,
            r.files.join(" ")
        );
        if let Some(tc) = r.corner_time {
            println!("     corner time {tc:e} s");
        }
        for w in &r.warnings {
            println!("     warning: {w}");
        }
        for f in &r.failures {
            println!("     failure: {f}");
        }
        if !r.passed {
            status = ExitStatus::VerificationFailure;
        }
    }
    status
}

fn table(db: PathBuf, out: PathBuf) -> ExitStatus {
    let t = match reproduce_table(&db) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    print!("{}", table_text(&t));
    if let Err(e) = write_atomic(&out.join("table.csv"), table_csv(&t).as_bytes()) {
        return fail(&e);
    }
    if t.mismatches() > 0 {
        ExitStatus::VerificationFailure
    } else {
        ExitStatus::Ok
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let profile = cli.tolerance_profile.into();
    let status = match cli.command {
        Command::Run { config } => run(
            config,
            RunOptions {
                out_dir: Some(cli.out),
                profile,
            },
        ),
        Command::Table { db } => table(db, cli.out),
        Command::Selftest { seed, db } => {
            let report = self_test(&SelfTestOptions {
                seed,
                profile,
                metals_db: db,
                ..Default::default()
            });
            print!("{}", report.summary());
            if report.passed() {
                ExitStatus::Ok
            } else {
                ExitStatus::VerificationFailure
            }
        }
    };
    ExitCode::from(status.code())
}
