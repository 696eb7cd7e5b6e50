//! Coefficient dumps: a CSV for inspection and the `FMD1` binary for round trips.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;

use super::model::FourierModel;
use super::space::FourierSpace;
use crate::{KamError, Result};

const MAGIC: &[u8; 4] = b"FMD1";

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn write_csv(model: &FourierModel, mut w: impl Write) -> Result<()> {
    let s = model.space();
    writeln!(
        w,
        "# d={} shape={}x{} cutoffs={} grid={}",
        s.dim(),
        model.rows(),
        model.cols(),
        join(s.cutoffs()),
        join(s.grid())
    )?;
    let ks: Vec<String> = (1..=s.dim()).map(|l| format!("k{l}")).collect();
    writeln!(w, "{},row,col,re,im", ks.join(","))?;
    for m in 0..s.n_modes() {
        let k = s.mode(m);
        let kstr: Vec<String> = k.iter().map(|v| v.to_string()).collect();
        for i in 0..model.rows() {
            for j in 0..model.cols() {
                let c = model.coefficients()[model.offset(m, i, j)];
                writeln!(w, "{},{i},{j},{:e},{:e}", kstr.join(","), c.re, c.im)?;
            }
        }
    }
    Ok(())
}

fn header_field<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| KamError::Io(format!("csv header lacks {key}")))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|t| t.parse().map_err(|_| KamError::Io(format!("bad integer {t:?}")))).collect()
}

pub fn read_csv(r: impl BufRead) -> Result<FourierModel> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| KamError::Io("empty csv".into()))??;
    let d: usize = header_field(&header, "d")?.parse().map_err(|_| KamError::Io("bad d".into()))?;
    let shape = header_field(&header, "shape")?;
    let (rs, cs) = shape.split_once('x').ok_or_else(|| KamError::Io("bad shape".into()))?;
    let rows: usize = rs.parse().map_err(|_| KamError::Io("bad rows".into()))?;
    let cols: usize = cs.parse().map_err(|_| KamError::Io("bad cols".into()))?;
    let space = FourierSpace::new(parse_list(header_field(&header, "cutoffs")?)?, parse_list(header_field(&header, "grid")?)?)?;
    if space.dim() != d {
        return Err(KamError::Io("header dimension disagrees with cutoffs".into()));
    }
    lines.next().ok_or_else(|| KamError::Io("csv lacks column names".into()))??;
    let mut out = FourierModel::zeros(&space, rows, cols);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != d + 4 {
            return Err(KamError::Io(format!("row {line:?} has {} fields", f.len())));
        }
        let k: Vec<i64> = f[..d].iter().map(|t| t.parse().map_err(|_| KamError::Io(format!("bad mode {t:?}")))).collect::<Result<_>>()?;
        let num = |t: &str| t.parse::<f64>().map_err(|_| KamError::Io(format!("bad number {t:?}")));
        let (i, j): (usize, usize) = (num(f[d])? as usize, num(f[d + 1])? as usize);
        let m = space.index(&k).ok_or_else(|| KamError::Io(format!("mode {k:?} outside the box")))?;
        if i >= rows || j >= cols {
            return Err(KamError::Io(format!("entry ({i},{j}) outside the shape")));
        }
        let o = out.offset(m, i, j);
        out.coefficients_mut()[o] = Complex64::new(num(f[d + 2])?, num(f[d + 3])?);
    }
    out.symmetrize();
    Ok(out)
}

pub fn write_binary(model: &FourierModel, mut w: impl Write) -> Result<()> {
    let s = model.space();
    w.write_all(MAGIC)?;
    let mut put = |v: usize| w.write_all(&(v as u32).to_le_bytes());
    put(s.dim())?;
    put(model.rows())?;
    put(model.cols())?;
    for &m in s.cutoffs() {
        put(m)?;
    }
    for &n in s.grid() {
        put(n)?;
    }
    for c in model.coefficients() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<FourierModel> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(KamError::Io("not an FMD1 stream".into()));
    }
    let mut get = || -> Result<usize> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b) as usize)
    };
    let d = get()?;
    let rows = get()?;
    let cols = get()?;
    if d == 0 || d > 8 {
        return Err(KamError::Io(format!("implausible torus dimension {d}")));
    }
    let cutoffs = (0..d).map(|_| get()).collect::<Result<Vec<_>>>()?;
    let grid = (0..d).map(|_| get()).collect::<Result<Vec<_>>>()?;
    let space = FourierSpace::new(cutoffs, grid)?;
    let n = space.n_modes() * rows * cols;
    let mut coeffs = Vec::with_capacity(n);
    let mut b = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b);
        r.read_exact(&mut b)?;
        coeffs.push(Complex64::new(re, f64::from_le_bytes(b)));
    }
    FourierModel::from_coefficients(&space, rows, cols, coeffs)
}
