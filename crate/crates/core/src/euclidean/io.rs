//! CSV forms. Grid functions: a `n,m,L` header line, its values, then the samples
//! row-major with one grid row per line. Fields: two `#` lines carrying the grid,
//! weight exponent and levels, then `x_index,level,value,weight` rows.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use crate::error::{Error, Result};

use super::field::HalfSpaceField;
use super::grid::{GridFunction, GridSpec};

const SOURCE: &str = "<csv>";

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: PathBuf::from(SOURCE),
        line,
        reason: reason.into(),
    }
}

fn number<T: std::str::FromStr>(token: &str, line: usize) -> Result<T> {
    token
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse `{}`", token.trim())))
}

pub fn write_grid_csv(f: &GridFunction, mut out: impl Write) -> Result<()> {
    let g = f.grid();
    writeln!(out, "n,m,L")?;
    writeln!(out, "{},{},{}", g.dim, g.m, g.half_width)?;
    let row = if g.dim == 1 { 1 } else { g.m };
    for chunk in f.values().chunks(row) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_grid_csv(input: impl BufRead) -> Result<GridFunction> {
    let mut lines = input.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l?)),
            None => Err(parse_err(0, format!("missing {what}"))),
        }
    };
    let (ln, header) = next("header")?;
    if header.trim().replace(' ', "") != "n,m,L" {
        return Err(parse_err(ln, format!("expected header `n,m,L`, found `{header}`")));
    }
    let (ln, meta) = next("grid line")?;
    let parts: Vec<&str> = meta.split(',').collect();
    if parts.len() != 3 {
        return Err(parse_err(ln, "grid line needs three fields"));
    }
    let grid = GridSpec::new(number(parts[0], ln)?, number(parts[1], ln)?, number(parts[2], ln)?)?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for token in line.split(',') {
            values.push(number::<f64>(token, i + 1)?);
        }
    }
    GridFunction::new(grid, values)
}

pub fn write_field_csv(field: &HalfSpaceField, mut out: impl Write) -> Result<()> {
    let g = field.grid();
    writeln!(out, "# n={} m={} L={} s={}", g.dim, g.m, g.half_width, field.s())?;
    let levels: Vec<String> = field.t_levels().iter().map(|t| t.to_string()).collect();
    writeln!(out, "# t={}", levels.join(" "))?;
    writeln!(out, "x_index,level,value,weight")?;
    let n = g.len();
    for (i, v) in field.values().iter().enumerate() {
        let j = i / n;
        writeln!(out, "{},{},{},{}", i % n, j, v, field.level_weight(j))?;
    }
    Ok(())
}

pub fn read_field_csv(input: impl BufRead) -> Result<HalfSpaceField> {
    let mut meta = None;
    let mut levels = None;
    let mut values = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let ln = i + 1;
        let line = line?;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# t=") {
            levels = Some(
                rest.split_whitespace()
                    .map(|t| number::<f64>(t, ln))
                    .collect::<Result<Vec<_>>>()?,
            );
        } else if let Some(rest) = line.strip_prefix('#') {
            let mut kv = [None; 4];
            for item in rest.split_whitespace() {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| parse_err(ln, format!("expected key=value, found `{item}`")))?;
                let slot = match k {
                    "n" => 0,
                    "m" => 1,
                    "L" => 2,
                    "s" => 3,
                    _ => return Err(parse_err(ln, format!("unknown key `{k}`"))),
                };
                kv[slot] = Some(number::<f64>(v, ln)?);
            }
            match kv {
                [Some(n), Some(m), Some(l), Some(s)] => meta = Some((n as usize, m as usize, l, s)),
                _ => return Err(parse_err(ln, "grid line needs n, m, L and s")),
            }
        } else if line.is_empty() || line.starts_with("x_index") {
            continue;
        } else {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 4 {
                return Err(parse_err(ln, "expected four fields"));
            }
            let idx: usize = number(parts[0], ln)?;
            let level: usize = number(parts[1], ln)?;
            values.push((level, idx, number::<f64>(parts[2], ln)?));
        }
    }
    let (n, m, l, s) = meta.ok_or_else(|| parse_err(0, "missing grid line"))?;
    let levels = levels.ok_or_else(|| parse_err(0, "missing level line"))?;
    let grid = GridSpec::new(n, m, l)?;
    let total = grid.len() * levels.len();
    if values.len() != total {
        return Err(Error::LengthMismatch {
            what: "field rows",
            expected: total,
            actual: values.len(),
        });
    }
    let mut dense = vec![f64::NAN; total];
    for (level, idx, v) in values {
        if level >= levels.len() || idx >= grid.len() {
            return Err(parse_err(0, format!("row ({idx}, {level}) is out of range")));
        }
        dense[level * grid.len() + idx] = v;
    }
    HalfSpaceField::new(grid, levels, s, dense)
}
