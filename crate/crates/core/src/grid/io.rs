//! Plain-text and binary serialization of [`Field2D`].
//!
//! CSV: header `i,j,re,im`, one row per sample in storage order.
//! Binary: magic `PCF2`, `n1, n2` as little-endian `u64`, `l1, l2` as `f64`,
//! then `(re, im)` pairs as `f64`.

use std::io::{BufRead, Read, Write};

use num_complex::Complex;

use super::{Field2D, TorusGrid};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const MAGIC: &[u8; 4] = b"PCF2";

pub fn write_csv<T: Real, W: Write>(f: &Field2D<T>, mut w: W) -> Result<()> {
    writeln!(w, "i,j,re,im")?;
    let g = f.grid();
    for i in 0..g.n1() {
        for j in 0..g.n2() {
            let z = f.get(i, j);
            writeln!(w, "{i},{j},{:e},{:e}", z.re.to_f64_lossy(), z.im.to_f64_lossy())?;
        }
    }
    Ok(())
}

pub fn read_csv<T: Real, R: BufRead>(grid: TorusGrid<T>, r: R) -> Result<Field2D<T>> {
    let mut data = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    let mut seen = vec![false; grid.len()];
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        if ln == 0 {
            if line.trim() != "i,j,re,im" {
                return Err(Error::Parse(format!("unexpected header `{line}`")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 columns", ln + 1)));
        }
        let bad = |c: &str| Error::Parse(format!("line {}: bad value `{c}`", ln + 1));
        let i: usize = cols[0].parse().map_err(|_| bad(cols[0]))?;
        let j: usize = cols[1].parse().map_err(|_| bad(cols[1]))?;
        let re: f64 = cols[2].parse().map_err(|_| bad(cols[2]))?;
        let im: f64 = cols[3].parse().map_err(|_| bad(cols[3]))?;
        if i >= grid.n1() || j >= grid.n2() {
            return Err(Error::GridMismatch(format!("index ({i}, {j}) out of range")));
        }
        let k = grid.index(i, j);
        data[k] = Complex::new(lit(re), lit(im));
        seen[k] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::GridMismatch("missing samples".into()));
    }
    Field2D::from_vec(grid, data)
}

pub fn write_binary<T: Real, W: Write>(f: &Field2D<T>, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.n1() as u64).to_le_bytes())?;
    w.write_all(&(g.n2() as u64).to_le_bytes())?;
    w.write_all(&g.l1().to_f64_lossy().to_le_bytes())?;
    w.write_all(&g.l2().to_f64_lossy().to_le_bytes())?;
    for z in f.data() {
        w.write_all(&z.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&z.im.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<T: Real, R: Read>(mut r: R) -> Result<Field2D<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("bad magic".into()));
    }
    let mut b8 = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut b8)?;
        Ok(b8)
    };
    let n1 = u64::from_le_bytes(next(&mut r)?) as usize;
    let n2 = u64::from_le_bytes(next(&mut r)?) as usize;
    let l1 = f64::from_le_bytes(next(&mut r)?);
    let l2 = f64::from_le_bytes(next(&mut r)?);
    let grid = TorusGrid::new(lit(l1), lit(l2), n1, n2)?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        data.push(Complex::new(lit(re), lit(im)));
    }
    Field2D::from_vec(grid, data)
}
