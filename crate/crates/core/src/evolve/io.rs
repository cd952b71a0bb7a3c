//! Grid snapshots.
//!
//! Binary layout (little endian): magic `RSPG`, u32 version, u64 n,
//! f64 box length, two i8 spin labels (2s, in storage order) and 6 padding
//! bytes, then n³·2 complex amplitudes as (re, im) f64 pairs.
//!
//! CSV: `#` metadata lines, a header row, one row per site.

use super::{SpinorGrid, FFT_CONVENTION, SPIN_ORDER};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::io::{BufRead, Read, Write};

const MAGIC: &[u8; 4] = b"RSPG";
const VERSION: u32 = 1;
pub const CSV_MAX_N: usize = 64;
pub const CSV_HEADER: &str = "i,j,k,x1,x2,x3,re_up,im_up,re_down,im_down";

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_bin<W: Write>(g: &SpinorGrid, mut w: W) -> Result<()> {
    let mut head = Vec::with_capacity(32);
    head.extend_from_slice(MAGIC);
    head.extend_from_slice(&VERSION.to_le_bytes());
    head.extend_from_slice(&(g.n() as u64).to_le_bytes());
    head.extend_from_slice(&g.box_length().to_le_bytes());
    head.extend_from_slice(&[1u8, (-1i8) as u8, 0, 0, 0, 0, 0, 0]);
    w.write_all(&head).map_err(io_err)?;
    let mut body = Vec::with_capacity(g.data().len() * 16);
    for v in g.data() {
        body.extend_from_slice(&v.re.to_le_bytes());
        body.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&body).map_err(io_err)
}

pub fn read_bin<R: Read>(mut r: R) -> Result<SpinorGrid> {
    let mut head = [0u8; 32];
    r.read_exact(&mut head).map_err(io_err)?;
    if &head[0..4] != MAGIC {
        return Err(Error::Format("not a spinor grid snapshot (bad magic)".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let n = u64::from_le_bytes(head[8..16].try_into().expect("8 bytes")) as usize;
    let box_length = f64::from_le_bytes(head[16..24].try_into().expect("8 bytes"));
    if head[24] as i8 != 1 || head[25] as i8 != -1 {
        return Err(Error::Format("unsupported spin order".into()));
    }
    if n > 4096 {
        return Err(Error::Format(format!("implausible grid size {n}")));
    }
    let count = 2 * n * n * n;
    let mut body = vec![0u8; count * 16];
    r.read_exact(&mut body).map_err(io_err)?;
    let data = body
        .chunks_exact(16)
        .map(|b| {
            C64::new(
                f64::from_le_bytes(b[0..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(b[8..16].try_into().expect("8 bytes")),
            )
        })
        .collect();
    SpinorGrid::from_data(n, box_length, data)
}

pub fn write_csv<W: Write>(g: &SpinorGrid, mut w: W) -> Result<()> {
    let n = g.n();
    if n > CSV_MAX_N {
        return Err(Error::InvalidParameter(format!("CSV snapshots are limited to n <= {CSV_MAX_N}")));
    }
    let mut out = String::new();
    out.push_str(&format!("# n={n}\n# box_length={}\n# spin_order={SPIN_ORDER}\n# fft_convention={FFT_CONVENTION}\n", g.box_length()));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s = g.site(i, j, k);
                let x = g.position(s);
                let (u, d) = (g.get(s, 0), g.get(s, 1));
                out.push_str(&format!("{i},{j},{k},{},{},{},{},{},{},{}\n", x[0], x[1], x[2], u.re, u.im, d.re, d.im));
            }
        }
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

pub fn read_csv<R: BufRead>(r: R) -> Result<SpinorGrid> {
    let mut n = None;
    let mut box_length = None;
    let mut grid: Option<SpinorGrid> = None;
    let mut seen_header = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let at = |msg: String| Error::Format(format!("line {}: {msg}", lineno + 1));
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.trim().split_once('=') {
                match k {
                    "n" => n = Some(v.parse::<usize>().map_err(|e| at(e.to_string()))?),
                    "box_length" => box_length = Some(v.parse::<f64>().map_err(|e| at(e.to_string()))?),
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            if line.trim() != CSV_HEADER {
                return Err(at(format!("expected header `{CSV_HEADER}`")));
            }
            seen_header = true;
            let (n, l) = n.zip(box_length).ok_or_else(|| at("missing n/box_length metadata".into()))?;
            grid = Some(SpinorGrid::zeros(n, l)?);
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let g = grid.as_mut().expect("header seen");
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 10 {
            return Err(at(format!("expected 10 columns, found {}", cols.len())));
        }
        let idx: Vec<usize> = cols[0..3].iter().map(|c| c.trim().parse::<usize>()).collect::<std::result::Result<_, _>>().map_err(|e| at(e.to_string()))?;
        let vals: Vec<f64> = cols[6..10].iter().map(|c| c.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| at(e.to_string()))?;
        if idx.iter().any(|&i| i >= g.n()) {
            return Err(at("site index out of range".into()));
        }
        let s = g.site(idx[0], idx[1], idx[2]);
        g.set(s, 0, C64::new(vals[0], vals[1]));
        g.set(s, 1, C64::new(vals[2], vals[3]));
    }
    grid.ok_or_else(|| Error::Format("empty snapshot".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpinorGrid {
        SpinorGrid::from_fn(8, 3.7, |x| [C64::new(x[0].sin() / 3.0, x[1]), C64::new(1e-300, -x[2] * 0.1)]).unwrap()
    }

    #[test]
    fn binary_roundtrip_is_exact() {
        let g = sample();
        let mut buf = Vec::new();
        write_bin(&g, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 16 * 2 * 512);
        assert_eq!(read_bin(&buf[..]).unwrap(), g);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let g = sample();
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), g);
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_bin(&b"XXXX"[..]).is_err());
        let bad = "# n=8\n# box_length=1\ni,j,k,x1,x2,x3,re_up,im_up,re_down,im_down\n0,0,0,0,0,0,1,2,3\n";
        let err = read_csv(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 4"));
    }
}
