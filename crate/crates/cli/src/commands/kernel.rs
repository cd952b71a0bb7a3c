//! `kernel`: G_t(x) at a list of points.

use crate::args::{Format, KernelArgs};
use crate::config::RunConfig;
use crate::table::{num, open_output, write_meta, CsvSource};
use anyhow::{anyhow, bail, Context};
use rashba::evolve::{FFT_CONVENTION, SPIN_ORDER};
use rashba::kernel::propagator_kernel_with;
use rashba::par::map_slice;
use rashba::spinalg::{CgcConvention, SpinMatrix};
use rashba::C64;
use serde::Serialize;
use std::io::{BufRead, Write};

pub const HEADER: &str = "x1,x2,x3,re_uu,im_uu,re_ud,im_ud,re_du,im_du,re_dd,im_dd";

fn parse_point(s: &str) -> anyhow::Result<[f64; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("point {s:?} is not x1,x2,x3"))?;
    v.try_into().map_err(|_| anyhow!("point {s:?} needs exactly three coordinates"))
}

fn points(args: &KernelArgs) -> anyhow::Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    if let Some(path) = &args.points {
        let src = CsvSource::open(path)?;
        for rec in src.reader().deserialize::<(f64, f64, f64)>() {
            let (a, b, c) = rec.map_err(|e| src.error(e))?;
            out.push([a, b, c]);
        }
    }
    for p in &args.point {
        out.push(parse_point(p)?);
    }
    if out.is_empty() {
        bail!("no points given; use --point x1,x2,x3 or --points FILE");
    }
    Ok(out)
}

pub fn metadata(cfg: &RunConfig) -> Vec<(&'static str, String)> {
    vec![
        ("alpha", num(cfg.coupling.alpha)),
        ("beta", num(cfg.coupling.beta)),
        ("t_re", num(cfg.time.re)),
        ("t_im", num(cfg.time.im)),
        ("spin_order", SPIN_ORDER.to_string()),
        ("fft_convention", FFT_CONVENTION.to_string()),
        ("cgc_convention", CgcConvention::default().name().to_string()),
    ]
}

#[derive(Serialize)]
struct JsonRow {
    x: [f64; 3],
    /// [re, im] of G^{++}, G^{+−}, G^{−+}, G^{−−}
    g: [[f64; 2]; 4],
}

fn entries(m: &SpinMatrix) -> [C64; 4] {
    [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]]
}

pub fn run(cfg: &RunConfig, args: &KernelArgs) -> anyhow::Result<()> {
    let format = cfg.format_or(Format::Csv);
    if format == Format::Bin {
        bail!("kernel tables are written as csv or json");
    }
    let pts = points(args)?;
    let (c, t, series) = (cfg.coupling, cfg.time, cfg.series);
    let values = map_slice(cfg.exec, &pts, |x| propagator_kernel_with(&c, t, *x, &series));
    let values = values.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut w = open_output(cfg)?;
    match format {
        Format::Csv => {
            write_meta(&mut w, &metadata(cfg))?;
            writeln!(w, "{HEADER}")?;
            for (x, g) in pts.iter().zip(&values) {
                write!(w, "{},{},{}", num(x[0]), num(x[1]), num(x[2]))?;
                for v in entries(g) {
                    write!(w, ",{},{}", num(v.re), num(v.im))?;
                }
                writeln!(w)?;
            }
        }
        _ => {
            let rows: Vec<JsonRow> = pts
                .iter()
                .zip(&values)
                .map(|(x, g)| JsonRow { x: *x, g: entries(g).map(|v| [v.re, v.im]) })
                .collect();
            let meta: serde_json::Map<String, serde_json::Value> =
                metadata(cfg).into_iter().map(|(k, v)| (k.to_string(), v.into())).collect();
            serde_json::to_writer_pretty(&mut w, &serde_json::json!({ "meta": meta, "rows": rows }))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`run`] in CSV form.
pub fn read_table<R: BufRead>(r: R) -> anyhow::Result<Vec<([f64; 3], SpinMatrix)>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != HEADER {
        bail!("unexpected kernel table header {header:?}");
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize::<[f64; 11]>() {
        let v = rec?;
        let c = |i: usize| C64::new(v[3 + 2 * i], v[4 + 2 * i]);
        out.push(([v[0], v[1], v[2]], SpinMatrix([[c(0), c(1)], [c(2), c(3)]])));
    }
    Ok(out)
}
