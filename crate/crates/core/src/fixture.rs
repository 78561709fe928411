//! Line-oriented text fixtures for distributions and lattice tables.
//!
//! A distribution file:
//!
//! ```text
//! # rao-dist v1
//! group 4x3
//! 0,0 0.25
//! 0,1 0.125
//! ...
//! ```
//!
//! One line per element, coordinates separated by commas, then the mass.
//! Omitted elements carry mass zero.
//!
//! A table file on a lattice window:
//!
//! ```text
//! # rao-table v1
//! base 2,3,5
//! depth 2
//! radius 60
//! -2 0.5 -0.25
//! -59/30 0.5 -0.24
//! ...
//! ```
//!
//! One line per window point in increasing order: the point as `p/q` (or an
//! integer), then the real and imaginary parts. Blank lines and lines starting
//! with `#` after the header are ignored. Floats use the shortest
//! representation that reads back to the same value, so round trips are exact.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::funceq::table::{FunctionTable, Window};
use crate::group::{Element, Group};
use crate::solenoid::{make_lattice, RationalLattice};

pub const DIST_HEADER: &str = "# rao-dist v1";
pub const TABLE_HEADER: &str = "# rao-table v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Numbered content lines, skipping blanks and comments after the header.
fn content_lines(text: &str, header: &str) -> Result<Vec<(usize, String)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((n, h)) => {
            return Err(parse_err(
                n,
                format!("expected header {header:?}, found {h:?}"),
            ))
        }
        None => return Err(parse_err(1, "empty document")),
    }
    Ok(lines
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(n, l)| (n, l.to_string()))
        .collect())
}

fn keyed<'a>(line: Option<&'a (usize, String)>, key: &str) -> Result<(usize, &'a str)> {
    let (n, l) = line.ok_or_else(|| parse_err(0, format!("missing `{key}` line")))?;
    l.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .map(|rest| (*n, rest.trim()))
        .ok_or_else(|| parse_err(*n, format!("expected `{key} ...`")))
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| parse_err(line, format!("bad number {s:?}: {e}")))
}

pub fn write_dist(mu: &Distribution) -> String {
    let g = mu.group();
    let mut out = format!("{DIST_HEADER}\ngroup {}\n", g.label());
    for (i, m) in mu.masses().iter().enumerate() {
        let x = g.element_at(i);
        let coords: Vec<String> = x.coords().iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{} {m:?}", coords.join(","));
    }
    out
}

pub fn read_dist(text: &str) -> Result<Distribution> {
    let lines = content_lines(text, DIST_HEADER)?;
    let mut it = lines.iter();
    let (gl, label) = keyed(it.next(), "group")?;
    let g: Group = label
        .parse()
        .map_err(|e: Error| parse_err(gl, e.to_string()))?;
    let mut masses = vec![0.0; g.size()];
    let mut seen = vec![false; g.size()];
    for (n, l) in it {
        let (coords, mass) = l
            .split_once(char::is_whitespace)
            .ok_or_else(|| parse_err(*n, "expected `coords mass`"))?;
        let coords = coords
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|e| parse_err(*n, format!("bad coordinate {c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let x: Element = g
            .element(&coords)
            .map_err(|e| parse_err(*n, e.to_string()))?;
        let i = g.index_of(&x);
        if seen[i] {
            return Err(parse_err(*n, format!("element {x} listed twice")));
        }
        seen[i] = true;
        masses[i] = parse_f64(mass.trim(), *n)?;
    }
    Distribution::new(&g, masses)
}

pub fn show_rational(q: Rational64) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = |e: std::num::ParseIntError| parse_err(1, format!("bad rational {s:?}: {e}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = p.trim().parse::<i64>().map_err(bad)?;
            let q = q.trim().parse::<i64>().map_err(bad)?;
            if q == 0 {
                return Err(parse_err(1, format!("zero denominator in {s:?}")));
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(
            s.trim().parse::<i64>().map_err(bad)?,
        )),
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => parse_err(line, msg),
        other => other,
    }
}

pub fn write_table(lat: &RationalLattice, f: &FunctionTable<Window>) -> Result<String> {
    if f.domain() != lat.window() {
        return Err(Error::Domain(format!(
            "table lives on {}, not on {}",
            f.domain(),
            lat.window()
        )));
    }
    let base: Vec<String> = lat.base().iter().map(u64::to_string).collect();
    let mut out = format!(
        "{TABLE_HEADER}\nbase {}\ndepth {}\nradius {}\n",
        base.join(","),
        lat.depth(),
        lat.radius()
    );
    for (y, v) in f.iter() {
        let _ = writeln!(out, "{} {:?} {:?}", show_rational(y), v.re, v.im);
    }
    Ok(out)
}

pub fn read_table(text: &str) -> Result<(RationalLattice, FunctionTable<Window>)> {
    let lines = content_lines(text, TABLE_HEADER)?;
    let mut it = lines.iter();
    let (bl, base) = keyed(it.next(), "base")?;
    let base = base
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<u64>()
                .map_err(|e| parse_err(bl, format!("bad base entry {a:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (dl, depth) = keyed(it.next(), "depth")?;
    let depth = depth
        .parse::<usize>()
        .map_err(|e| parse_err(dl, format!("bad depth: {e}")))?;
    let (rl, radius) = keyed(it.next(), "radius")?;
    let radius = radius
        .parse::<i64>()
        .map_err(|e| parse_err(rl, format!("bad radius: {e}")))?;
    let lat = make_lattice(&base, depth, radius)?;
    let points = lat.points();
    let rows: Vec<&(usize, String)> = it.collect();
    if rows.len() != points.len() {
        return Err(parse_err(
            rows.last().map_or(rl, |r| r.0),
            format!(
                "{} rows for a window of {} points",
                rows.len(),
                points.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(points.len());
    for ((n, l), want) in rows.into_iter().zip(points) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(*n, "expected `point re im`"));
        }
        let y = parse_rational(fields[0]).map_err(|e| relocate(e, *n))?;
        if y != want {
            return Err(parse_err(
                *n,
                format!(
                    "point {} out of order, expected {}",
                    fields[0],
                    show_rational(want)
                ),
            ));
        }
        values.push(Complex64::new(
            parse_f64(fields[1], *n)?,
            parse_f64(fields[2], *n)?,
        ));
    }
    let table = FunctionTable::new(lat.window().clone(), values)?;
    Ok((lat, table))
}
