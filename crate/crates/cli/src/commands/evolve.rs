//! `evolve`: repeated application of e^{−th} to a grid spinor.

use crate::args::{EvolveArgs, Format, Method};
use crate::config::RunConfig;
use crate::table::open_output;
use anyhow::{anyhow, Context};
use rashba::evolve::io::{read_bin, read_csv, write_bin, write_csv};
use rashba::evolve::{grid_norm, propagate_convolution, propagate_symbol, SpinorGrid};
use rashba::C64;
use serde::Serialize;
use std::fs::File;
use std::io::{BufReader, Write};

fn parse_spin(s: &str) -> anyhow::Result<[C64; 2]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("spin {s:?} is not re,im,re,im"))?;
    match v[..] {
        [a, b, c, d] => Ok([C64::new(a, b), C64::new(c, d)]),
        _ => Err(anyhow!("spin {s:?} needs four numbers")),
    }
}

fn initial(cfg: &RunConfig, args: &EvolveArgs) -> anyhow::Result<SpinorGrid> {
    if let Some(path) = &args.input {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let g = if path.extension().is_some_and(|e| e == "bin") {
            read_bin(BufReader::new(f))
        } else {
            read_csv(BufReader::new(f))
        };
        return g.with_context(|| format!("reading {}", path.display()));
    }
    if args.width.is_nan() || args.width <= 0.0 {
        return Err(anyhow!("width must be positive"));
    }
    let spin = parse_spin(&args.spin)?;
    let w2 = args.width * args.width;
    Ok(SpinorGrid::from_fn(cfg.grid_n, cfg.box_length, |x| {
        let g = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (4.0 * w2)).exp();
        [spin[0] * g, spin[1] * g]
    })?)
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    box_length: f64,
    alpha: f64,
    beta: f64,
    t: [f64; 2],
    steps: usize,
    method: &'static str,
    /// grid norm before the first step and after each step
    norms: Vec<f64>,
}

pub fn run(cfg: &RunConfig, args: &EvolveArgs) -> anyhow::Result<()> {
    let mut f = initial(cfg, args)?;
    let mut norms = vec![grid_norm(&f)];
    for _ in 0..args.steps {
        f = match args.method {
            Method::Symbol => propagate_symbol(&f, &cfg.coupling, cfg.time, cfg.exec)?,
            Method::Convolution => propagate_convolution(&f, &cfg.coupling, cfg.time, cfg.exec)?,
        };
        norms.push(grid_norm(&f));
    }
    let mut w = open_output(cfg)?;
    match cfg.format_or(Format::Bin) {
        Format::Bin => write_bin(&f, &mut w)?,
        Format::Csv => write_csv(&f, &mut w)?,
        Format::Json => {
            let s = Summary {
                n: f.n(),
                box_length: f.box_length(),
                alpha: cfg.coupling.alpha,
                beta: cfg.coupling.beta,
                t: [cfg.time.re, cfg.time.im],
                steps: args.steps,
                method: match args.method {
                    Method::Symbol => "symbol",
                    Method::Convolution => "convolution",
                },
                norms,
            };
            serde_json::to_writer_pretty(&mut w, &s)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
