//! `report`: perturbation diagnostics per spin channel.

use crate::args::{Format, ReportArgs};
use crate::config::RunConfig;
use crate::table::{num, open_output, write_meta};
use anyhow::{bail, Context};
use rashba::par::map_slice;
use rashba::perturb::{perturb_report, PerturbReport};
use rashba::spinalg::SpinChannel;
use std::io::Write;

pub const HEADER: &str = "S,s,alpha,beta,n_const,h4_norm,h3_divergent,log_slope,gamma,lambda_roots,lambda_minus_one";

fn channels(spec: &str) -> anyhow::Result<Vec<SpinChannel>> {
    if spec == "all" {
        return Ok(SpinChannel::ALL.to_vec());
    }
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [t, p] = parts[..] else { bail!("sigma {spec:?} is not S,s or all") };
    let t: i32 = t.parse().with_context(|| format!("sigma {spec:?}"))?;
    let p: i32 = p.parse().with_context(|| format!("sigma {spec:?}"))?;
    Ok(vec![SpinChannel::new(t, p)?])
}

pub fn run(cfg: &RunConfig, args: &ReportArgs) -> anyhow::Result<()> {
    let sigmas = channels(&args.sigma)?;
    let interval = (args.lambda_min, args.lambda_max);
    let c = cfg.coupling;
    let reports = map_slice(cfg.exec, &sigmas, |s| perturb_report(*s, &c, args.gamma, interval))
        .into_iter()
        .collect::<Result<Vec<PerturbReport>, _>>()?;
    let mut w = open_output(cfg)?;
    match cfg.format_or(Format::Json) {
        Format::Json => {
            if let [one] = &reports[..] {
                serde_json::to_writer_pretty(&mut w, one)?;
            } else {
                serde_json::to_writer_pretty(&mut w, &reports)?;
            }
            writeln!(w)?;
        }
        Format::Csv => {
            write_meta(&mut w, &[("lambda_interval", format!("[{}, {}]", interval.0, interval.1))])?;
            writeln!(w, "{HEADER}")?;
            for r in &reports {
                let roots: Vec<String> = r.lambda_roots.iter().map(|v| num(*v)).collect();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.sigma.total,
                    r.sigma.proj,
                    num(r.alpha),
                    num(r.beta),
                    num(r.n_const),
                    num(r.h4_norm),
                    r.h3_divergent,
                    num(r.log_slope),
                    num(r.gamma),
                    roots.join(";"),
                    r.lambda_minus_one
                )?;
            }
        }
        Format::Bin => bail!("reports are written as json or csv"),
    }
    w.flush()?;
    Ok(())
}
