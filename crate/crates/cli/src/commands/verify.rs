//! `verify`: property suites with a pass/fail table. JSON goes to the output
//! when `--format json` is given or every suite runs; the table then goes to
//! stderr.

use crate::args::{FaultArg, Format, SuiteArg, VerifyArgs};
use crate::config::RunConfig;
use crate::table::open_output;
use crate::VerificationFailed;
use rashba::verify::{run as run_suites, Fault, Suite, Summary, VerifyOptions};
use std::io::Write;

fn suites(arg: SuiteArg) -> Vec<Suite> {
    match arg {
        SuiteArg::Specfun => vec![Suite::Specfun],
        SuiteArg::Kernel => vec![Suite::Kernel],
        SuiteArg::Evolve => vec![Suite::Evolve],
        SuiteArg::Green => vec![Suite::Green],
        SuiteArg::Perturb => vec![Suite::Perturb],
        SuiteArg::All => Suite::ALL.to_vec(),
    }
}

pub fn render_table(summary: &Summary) -> String {
    let mut out = format!("seed {}\n", summary.seed);
    if let Some(f) = summary.fault {
        out.push_str(&format!("injected fault: {f:?}\n"));
    }
    for s in &summary.suites {
        for c in &s.checks {
            out.push_str(&format!(
                "{:<8} {:<44} {:>12.3e}  {:<14} {}\n",
                s.suite.name(),
                c.name,
                c.value,
                c.bound,
                if c.passed { "PASS" } else { "FAIL" }
            ));
            if let Some(e) = &c.error {
                out.push_str(&format!("         error: {e}\n"));
            }
        }
    }
    let failed: usize = summary.suites.iter().flat_map(|s| &s.checks).filter(|c| !c.passed).count();
    let total: usize = summary.suites.iter().map(|s| s.checks.len()).sum();
    out.push_str(&format!("{} of {total} checks passed\n", total - failed));
    out
}

pub fn run(cfg: &RunConfig, args: &VerifyArgs) -> anyhow::Result<()> {
    let opts = VerifyOptions {
        seed: args.seed,
        exec: cfg.exec,
        fault: args.inject_fault.map(|f| match f {
            FaultArg::GreenSignFlip => Fault::GreenSignFlip,
        }),
    };
    let summary = run_suites(&suites(args.suite), &opts);
    let table = render_table(&summary);
    let json = cfg.output.format == Some(Format::Json) || args.suite == SuiteArg::All;
    let mut w = open_output(cfg)?;
    if json {
        eprint!("{table}");
        serde_json::to_writer_pretty(&mut w, &summary)?;
        writeln!(w)?;
    } else {
        write!(w, "{table}")?;
    }
    w.flush()?;
    let failed = summary.suites.iter().flat_map(|s| &s.checks).filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(VerificationFailed(failed).into());
    }
    Ok(())
}
