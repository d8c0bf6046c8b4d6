//! Plain-text file formats. Indices are 1-based on disk; floats are written
//! with 17 significant digits so every value survives a round trip.
//!
//! | content      | header    | body                                      |
//! |--------------|-----------|-------------------------------------------|
//! | dense tensor | `k d`     | `d^k` floats, row-major, last index fastest |
//! | observations | `k d n`   | `n` lines `i1 … ik value`                 |
//! | matrix       | `d1 d2`   | `d1·d2` floats, row-major                 |
//! | components   | `r d`     | `r` rows of `d` floats                    |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use tensorfill_core::{DMatrix, DVector, PartialTensor, Tensor};

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Whitespace-separated tokens with their line numbers.
struct Tokens {
    items: Vec<(usize, String)>,
    pos: usize,
}

impl Tokens {
    fn read(reader: impl BufRead) -> std::io::Result<Self> {
        let mut items = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            for tok in line?.split_whitespace() {
                items.push((i + 1, tok.to_owned()));
            }
        }
        Ok(Tokens { items, pos: 0 })
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or_else(|| self.items.last())
            .map_or(1, |(l, _)| *l)
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let Some((line, tok)) = self.items.get(self.pos) else {
            return Err(Error::Parse {
                line: self.line(),
                message: format!("unexpected end of input, expected {what}"),
            });
        };
        self.pos += 1;
        tok.parse().map_err(|_| Error::Parse {
            line: *line,
            message: format!("expected {what}, found `{tok}`"),
        })
    }

    fn finish(&self) -> Result<()> {
        match self.items.get(self.pos) {
            None => Ok(()),
            Some((line, tok)) => Err(Error::Parse {
                line: *line,
                message: format!("trailing token `{tok}`"),
            }),
        }
    }
}

fn positive(tokens: &mut Tokens, what: &str) -> Result<usize> {
    let line = tokens.line();
    let v: usize = tokens.next(what)?;
    if v == 0 {
        return Err(Error::Parse {
            line,
            message: format!("{what} must be positive"),
        });
    }
    Ok(v)
}

fn checked_len(k: usize, d: usize) -> Result<usize> {
    u32::try_from(k)
        .ok()
        .and_then(|k| d.checked_pow(k))
        .ok_or_else(|| Error::Infeasible(format!("d^k overflows for k={k}, d={d}")))
}

pub fn read_tensor(reader: impl BufRead) -> Result<Tensor> {
    let mut t = Tokens::read(reader).map_err(|e| Error::io("<input>", e))?;
    let k = positive(&mut t, "order k")?;
    let d = positive(&mut t, "dimension d")?;
    let len = checked_len(k, d)?;
    let values = (0..len).map(|_| t.next::<f64>("a tensor entry")).collect::<Result<Vec<_>>>()?;
    t.finish()?;
    Ok(Tensor::from_values(k, d, values)?)
}

pub fn write_tensor(mut w: impl Write, t: &Tensor) -> std::io::Result<()> {
    writeln!(w, "{} {}", t.order(), t.dim())?;
    for row in t.values().chunks(t.dim()) {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_observations(reader: impl BufRead) -> Result<PartialTensor> {
    let mut t = Tokens::read(reader).map_err(|e| Error::io("<input>", e))?;
    let k = positive(&mut t, "order k")?;
    let d = positive(&mut t, "dimension d")?;
    let n: usize = t.next("observation count n")?;
    let capacity = checked_len(k, d)?;
    if n > capacity {
        return Err(Error::Infeasible(format!("{n} observations exceed the {capacity} entries of the tensor")));
    }
    let mut obs = Vec::with_capacity(n);
    for _ in 0..n {
        let line = t.line();
        let mut index = Vec::with_capacity(k);
        for _ in 0..k {
            let i: usize = t.next("a 1-based index")?;
            if i == 0 || i > d {
                return Err(Error::Parse {
                    line,
                    message: format!("index {i} outside 1..={d}"),
                });
            }
            index.push(i - 1);
        }
        obs.push((index, t.next::<f64>("an observed value")?));
    }
    t.finish()?;
    Ok(PartialTensor::from_observations(k, d, obs)?)
}

pub fn write_observations(mut w: impl Write, y: &PartialTensor) -> std::io::Result<()> {
    writeln!(w, "{} {} {}", y.order(), y.dim(), y.mask().len())?;
    for (index, v) in y.observations() {
        for i in index {
            write!(w, "{} ", i + 1)?;
        }
        writeln!(w, "{}", fmt_f64(v))?;
    }
    Ok(())
}

pub fn read_matrix(reader: impl BufRead) -> Result<DMatrix<f64>> {
    let mut t = Tokens::read(reader).map_err(|e| Error::io("<input>", e))?;
    let rows = positive(&mut t, "row count d1")?;
    let cols = positive(&mut t, "column count d2")?;
    let values = (0..rows * cols)
        .map(|_| t.next::<f64>("a matrix entry"))
        .collect::<Result<Vec<_>>>()?;
    t.finish()?;
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn write_matrix(mut w: impl Write, m: &DMatrix<f64>) -> std::io::Result<()> {
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_components(reader: impl BufRead) -> Result<Vec<DVector<f64>>> {
    let mut t = Tokens::read(reader).map_err(|e| Error::io("<input>", e))?;
    let r = positive(&mut t, "component count r")?;
    let d = positive(&mut t, "dimension d")?;
    let comps = (0..r)
        .map(|_| {
            let v = (0..d).map(|_| t.next::<f64>("a component entry")).collect::<Result<Vec<_>>>()?;
            Ok(DVector::from_vec(v))
        })
        .collect::<Result<Vec<_>>>()?;
    t.finish()?;
    Ok(comps)
}

pub fn write_components(mut w: impl Write, comps: &[DVector<f64>]) -> std::io::Result<()> {
    let d = comps.first().map_or(0, |c| c.len());
    writeln!(w, "{} {}", comps.len(), d)?;
    for c in comps {
        let line: Vec<String> = c.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn load_tensor(path: &Path) -> Result<Tensor> {
    read_tensor(open(path)?)
}

pub fn load_observations(path: &Path) -> Result<PartialTensor> {
    read_observations(open(path)?)
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    read_matrix(open(path)?)
}

pub fn load_components(path: &Path) -> Result<Vec<DVector<f64>>> {
    read_components(open(path)?)
}
