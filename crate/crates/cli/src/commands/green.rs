//! `green`: batch evaluation of R_{σ′σ}(z)(x, X).

use crate::args::{Format, GreenArgs};
use crate::config::RunConfig;
use crate::table::{num, open_output, write_meta, CsvSource};
use anyhow::bail;
use rashba::green::{green2, green2_oracle, GreenQuery, ProfileModel};
use rashba::par::map_slice;
use rashba::spinalg::{CgcConvention, ComPoint, SpinChannel};
use rashba::C64;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const INPUT_HEADER: &str = "re_z,im_z,x1,x2,x3,X1,X2,X3,S_out,s_out,S_in,s_in";

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub struct QueryRow {
    pub re_z: f64,
    pub im_z: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    #[serde(rename = "X1")]
    pub cm1: f64,
    #[serde(rename = "X2")]
    pub cm2: f64,
    #[serde(rename = "X3")]
    pub cm3: f64,
    #[serde(rename = "S_out")]
    pub total_out: i32,
    pub s_out: i32,
    #[serde(rename = "S_in")]
    pub total_in: i32,
    pub s_in: i32,
}

impl QueryRow {
    pub fn query(&self) -> rashba::Result<GreenQuery> {
        Ok(GreenQuery::new(
            C64::new(self.re_z, self.im_z),
            ComPoint::new([self.x1, self.x2, self.x3], [self.cm1, self.cm2, self.cm3]),
            SpinChannel::new(self.total_out, self.s_out)?,
            SpinChannel::new(self.total_in, self.s_in)?,
        ))
    }
}

#[derive(Debug, Clone, Serialize)]
struct Evaluated {
    #[serde(flatten)]
    row: QueryRow,
    re_g: f64,
    im_g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_residual: Option<f64>,
}

/// Rows with the file line each came from.
pub fn read_queries(path: &std::path::Path) -> anyhow::Result<Vec<(usize, QueryRow)>> {
    let src = CsvSource::open(path)?;
    let mut rdr = src.reader();
    let headers = rdr.headers().map_err(|e| src.error(e))?.clone();
    let joined = headers.iter().collect::<Vec<_>>().join(",");
    if joined != INPUT_HEADER {
        bail!("{}: header must be {INPUT_HEADER}, got {joined}", path.display());
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| src.error(e))?;
        let byte = rec.position().map_or(0, |p| p.byte());
        let row: QueryRow = rec.deserialize(Some(&headers)).map_err(|e| src.error(e))?;
        row.query().map_err(|e| src.at_line(byte, e))?;
        out.push((src.line_at(byte), row));
    }
    Ok(out)
}

fn evaluate(cfg: &RunConfig, with_oracle: bool, row: &QueryRow) -> rashba::Result<Evaluated> {
    let c = cfg.coupling;
    let q = row.query()?;
    let g = green2(&c, &q)?;
    let oracle = if with_oracle {
        let coeffs = green2_oracle(c.beta, ProfileModel::SmallAlpha, &q, CgcConvention::default(), &cfg.quadrature)?;
        Some(coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, v| acc * c.alpha + v.value))
    } else {
        None
    };
    Ok(Evaluated {
        row: *row,
        re_g: g.re,
        im_g: g.im,
        re_oracle: oracle.map(|o| o.re),
        im_oracle: oracle.map(|o| o.im),
        oracle_residual: oracle.map(|o| (o - g).norm()),
    })
}

pub fn run(cfg: &RunConfig, args: &GreenArgs) -> anyhow::Result<()> {
    let format = cfg.format_or(Format::Csv);
    if format == Format::Bin {
        bail!("green tables are written as csv or json");
    }
    let rows = read_queries(&args.queries)?;
    let c = cfg.coupling;
    let results = map_slice(cfg.exec, &rows, |(line, row)| evaluate(cfg, args.oracle, row).map_err(|e| (*line, e)));
    let mut evaluated = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => evaluated.push(v),
            Err((line, e)) => return Err(anyhow::Error::new(e).context(format!("{}: line {line}", args.queries.display()))),
        }
    }

    let mut w = open_output(cfg)?;
    let mut meta = vec![
        ("alpha", num(c.alpha)),
        ("beta", num(c.beta)),
        ("model", "small-alpha closed forms through alpha^3".to_string()),
        ("cgc_convention", CgcConvention::default().name().to_string()),
    ];
    if args.oracle {
        meta.push(("oracle_eps", format!("{:?}", cfg.quadrature.eps_sequence)));
    }
    match format {
        Format::Csv => {
            write_meta(&mut w, &meta)?;
            let mut header = format!("{INPUT_HEADER},re_g,im_g");
            if args.oracle {
                header.push_str(",re_oracle,im_oracle,oracle_residual");
            }
            writeln!(w, "{header}")?;
            for e in &evaluated {
                let r = &e.row;
                let reals = [r.re_z, r.im_z, r.x1, r.x2, r.x3, r.cm1, r.cm2, r.cm3];
                write!(w, "{},", reals.map(num).join(","))?;
                write!(w, "{},{},{},{},{},{}", r.total_out, r.s_out, r.total_in, r.s_in, num(e.re_g), num(e.im_g))?;
                if let (Some(a), Some(b), Some(d)) = (e.re_oracle, e.im_oracle, e.oracle_residual) {
                    write!(w, ",{},{},{}", num(a), num(b), num(d))?;
                }
                writeln!(w)?;
            }
        }
        _ => {
            let meta: serde_json::Map<String, serde_json::Value> =
                meta.into_iter().map(|(k, v)| (k.to_string(), v.into())).collect();
            serde_json::to_writer_pretty(&mut w, &serde_json::json!({ "meta": meta, "rows": evaluated }))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
