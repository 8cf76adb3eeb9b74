//! Command-line driver: `verify <suite>`, `report`, `list-suites`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a suite
//! aborts, 2 on usage or configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::oracle::Space;
use crate::report::{emit_all, SuiteReport};
use crate::suites::{find_suite, run_suite, SuiteConfig, SUITES};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker-thread count.
pub const THREADS_VAR: &str = "HEATLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "heatlab", version, about = "Heat-kernel bound verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (`key = value` lines under `[section]` headers).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub space: Option<Space>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Derivative order.
    #[arg(long = "i", global = true)]
    pub order: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one suite.
    Verify { suite: String },
    /// Run every registered suite.
    Report,
    /// Print the suite registry.
    ListSuites,
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Config { .. } | Error::UnknownSuite(_) | Error::Io { .. })
}

impl Cli {
    fn load(&self) -> Result<ConfigFile> {
        match &self.config {
            Some(p) => ConfigFile::load(p),
            None => Ok(ConfigFile::default()),
        }
    }

    pub fn suite_config(&self, suite: &str, file: &ConfigFile) -> Result<SuiteConfig> {
        find_suite(suite)?;
        let mut c = SuiteConfig::from_config(suite, file)?;
        if self.space.is_some() {
            c.space = self.space;
        }
        if self.epsilon.is_some() {
            c.epsilon = self.epsilon;
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if self.order.is_some() {
            c.order = self.order;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn print_report<W: Write>(w: &mut W, rep: &SuiteReport) -> std::io::Result<()> {
    let verdict = if rep.passed() { "PASS" } else { "FAIL" };
    writeln!(
        w,
        "{}: {verdict} ({} rows, {:.2} s)",
        rep.suite,
        rep.rows.len(),
        rep.wall_time.as_secs_f64()
    )?;
    for r in rep.failures() {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "  fail {} [{}] oracle={:e} bound={:e}", r.check, params.join(" "), r.oracle, r.bound)?;
    }
    Ok(())
}

fn write_out(path: Option<&Path>, reports: &[&SuiteReport]) -> Result<()> {
    match path {
        Some(p) => emit_all(reports, p),
        None => Ok(()),
    }
}

fn verify(cli: &Cli, suite: &str) -> Result<bool> {
    let file = cli.load()?;
    let cfg = cli.suite_config(suite, &file)?;
    let rep = run_suite(&cfg)?;
    print_report(&mut std::io::stdout(), &rep).ok();
    write_out(cfg.out.as_deref(), &[&rep])?;
    Ok(rep.passed())
}

fn report(cli: &Cli) -> Result<bool> {
    let file = cli.load()?;
    let configs = SUITES
        .iter()
        .map(|s| cli.suite_config(s.name, &file))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::new();
    let mut all_pass = true;
    for cfg in &configs {
        match run_suite(cfg) {
            Ok(rep) => {
                print_report(&mut std::io::stdout(), &rep).ok();
                all_pass &= rep.passed();
                reports.push(rep);
            }
            Err(e) => {
                println!("{}: FAIL ({e})", cfg.suite);
                all_pass = false;
            }
        }
    }
    let refs: Vec<&SuiteReport> = reports.iter().collect();
    write_out(cli.out.as_deref(), &refs)?;
    Ok(all_pass)
}

fn list_suites() {
    for s in &SUITES {
        let c = s.criterion.map_or("-".to_string(), |c| c.to_string());
        println!("{:<12} {:>2}  {}", s.name, c, s.summary);
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got `{v}`"))?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> i32 {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let outcome = match &cli.command {
        Command::Verify { suite } => verify(cli, suite),
        Command::Report => report(cli),
        Command::ListSuites => {
            list_suites();
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            e.print().ok();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_usage_error() {
        assert_eq!(main_with_args(["heatlab", "verify", "nope"]), EXIT_USAGE);
        assert_eq!(main_with_args(["heatlab", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["heatlab", "verify", "stnorm", "--epsilon", "2"]), EXIT_USAGE);
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from(["heatlab", "verify", "theorem1", "--space", "h2", "--i", "3", "--epsilon", "0.2"])
            .unwrap();
        let file = ConfigFile::parse("[suite]\nepsilon = 0.05\n").unwrap();
        let c = cli.suite_config("theorem1", &file).unwrap();
        assert_eq!(c.space, Some(Space::H2));
        assert_eq!(c.order, Some(3));
        assert_eq!(c.epsilon, Some(0.2));
        assert!(c.grid().r.min > 0.0);
    }

    #[test]
    fn usage_classification() {
        assert!(is_usage(&Error::UnknownSuite("x".into())));
        assert!(!is_usage(&Error::TailDiverges("x".into())));
    }
}
