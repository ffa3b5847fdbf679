//! Runs every registered convergence experiment with its default settings and
//! prints the verdicts. `--json` prints the full reports instead.

use weylsym::diag::{run_sweep, SweepConfig, EXPERIMENTS};

pub fn run(json: bool, only: Option<&str>) -> weylsym::Result<bool> {
    let mut all = true;
    for name in EXPERIMENTS.iter().filter(|e| only.is_none_or(|o| o == **e)) {
        let report = run_sweep(&SweepConfig::new(name)?)?;
        all &= report.passed();
        if json {
            println!("{}", report.to_json()?);
            continue;
        }
        println!("{name} ({} rows)", report.rows.len());
        for v in &report.verdicts {
            println!("  [{}] {}: {}", if v.passed { "pass" } else { "FAIL" }, v.name, v.detail);
        }
    }
    Ok(all)
}

fn main() -> weylsym::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let json = args.iter().any(|a| a == "--json");
    let only = args.iter().find(|a| !a.starts_with("--")).map(String::as_str);
    if !run(json, only)? {
        std::process::exit(1);
    }
    Ok(())
}
