//! Runs a verification suite from configuration text and prints its CSV.

use heatlab::config::ConfigFile;
use heatlab::report::write_csv;
use heatlab::suites::{run_suite, SuiteConfig};

fn main() -> heatlab::Result<()> {
    let cfg = ConfigFile::parse(
        "[suite]\nspace = h3\n\n[theorem1]\nepsilon = 0.2\nt_min = 0.1\nt_max = 10\nt_count = 20\nr_count = 20\n",
    )?;
    let suite = SuiteConfig::from_config("theorem1", &cfg)?;
    let rep = run_suite(&suite)?;
    write_csv(&[&rep], std::io::stdout()).expect("stdout is writable");
    println!("passed: {}", rep.passed());
    Ok(())
}
