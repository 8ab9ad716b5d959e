//! Plain-text field dumps.
//!
//! ```text
//! # grushin-field nx=<nx> ny=<ny> k=<k> domain=<json>
//! i j x y value inside
//! ...
//! ```
//!
//! One line per grid node in row-major order (`j` outer, `i` inner). Reals
//! are printed with 17 significant digits so values round-trip exactly.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::discretization::grid::{Grid, ScalarField};
use crate::domain::{Domain, DomainKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &str = "# grushin-field";

/// A field read back from disk together with the metadata of its header.
#[derive(Debug, Clone)]
pub struct FieldFile<T> {
    pub k: T,
    pub field: ScalarField<T>,
}

fn domain_to_f64<T: Real>(d: &Domain<T>) -> Domain<f64> {
    let kind = match *d.kind() {
        DomainKind::Rectangle {
            xmin,
            xmax,
            ymin,
            ymax,
        } => DomainKind::Rectangle {
            xmin: xmin.as_f64(),
            xmax: xmax.as_f64(),
            ymin: ymin.as_f64(),
            ymax: ymax.as_f64(),
        },
        DomainKind::Ellipse { cx, cy, a, b } => DomainKind::Ellipse {
            cx: cx.as_f64(),
            cy: cy.as_f64(),
            a: a.as_f64(),
            b: b.as_f64(),
        },
    };
    Domain::new(kind).expect("valid domain stays valid")
}

fn domain_from_f64<T: Real>(d: &Domain<f64>) -> Result<Domain<T>> {
    let kind = match *d.kind() {
        DomainKind::Rectangle {
            xmin,
            xmax,
            ymin,
            ymax,
        } => DomainKind::Rectangle {
            xmin: T::lit(xmin),
            xmax: T::lit(xmax),
            ymin: T::lit(ymin),
            ymax: T::lit(ymax),
        },
        DomainKind::Ellipse { cx, cy, a, b } => DomainKind::Ellipse {
            cx: T::lit(cx),
            cy: T::lit(cy),
            a: T::lit(a),
            b: T::lit(b),
        },
    };
    Domain::new(kind)
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_field<T: Real, W: Write>(field: &ScalarField<T>, k: T, mut out: W) -> Result<()> {
    let g = field.grid();
    let dom =
        serde_json::to_string(&domain_to_f64(g.domain())).map_err(|e| Error::FieldFormat(e.to_string()))?;
    writeln!(
        out,
        "{MAGIC} nx={} ny={} k={} domain={dom}",
        g.nx(),
        g.ny(),
        k.as_f64()
    )?;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let inside = g.unknown_at(i, j).is_some();
            writeln!(
                out,
                "{i} {j} {} {} {} {}",
                fmt17(g.xs()[i].as_f64()),
                fmt17(g.ys()[j].as_f64()),
                fmt17(field.node_value(i, j).as_f64()),
                u8::from(inside)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn header_value<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    let tag = format!("{key}=");
    let start = header
        .find(&tag)
        .ok_or_else(|| Error::FieldFormat(format!("header lacks `{key}`")))?
        + tag.len();
    let rest = &header[start..];
    // The domain is last and may contain spaces.
    if key == "domain" {
        return Ok(rest.trim());
    }
    Ok(rest.split_whitespace().next().unwrap_or(""))
}

fn parse<F: std::str::FromStr>(s: &str, what: &str) -> Result<F> {
    s.parse()
        .map_err(|_| Error::FieldFormat(format!("cannot parse {what} from `{s}`")))
}

/// Reads a field dump, rebuilding its grid and checking every node line
/// against it.
pub fn read_field<T: Real, R: BufRead>(input: R) -> Result<FieldFile<T>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::FieldFormat("empty file".into()))??;
    if !header.starts_with(MAGIC) {
        return Err(Error::FieldFormat("missing `# grushin-field` header".into()));
    }
    let nx: usize = parse(header_value(&header, "nx")?, "nx")?;
    let ny: usize = parse(header_value(&header, "ny")?, "ny")?;
    let k: f64 = parse(header_value(&header, "k")?, "k")?;
    let dom: Domain<f64> = serde_json::from_str(header_value(&header, "domain")?)
        .map_err(|e| Error::FieldFormat(format!("domain: {e}")))?;
    let grid: Arc<Grid<T>> = Arc::new(Grid::new(&domain_from_f64(&dom)?, nx, ny)?);

    let mut values = vec![T::zero(); grid.len()];
    let mut count = 0usize;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 6 {
            return Err(Error::FieldFormat(format!("bad node line `{line}`")));
        }
        let i: usize = parse(cols[0], "i")?;
        let j: usize = parse(cols[1], "j")?;
        if i >= nx || j >= ny || j * nx + i != count {
            return Err(Error::FieldFormat(format!(
                "node ({i}, {j}) out of row-major order"
            )));
        }
        let x: f64 = parse(cols[2], "x")?;
        let y: f64 = parse(cols[3], "y")?;
        let v: f64 = parse(cols[4], "value")?;
        let inside = match cols[5] {
            "0" => false,
            "1" => true,
            other => return Err(Error::FieldFormat(format!("bad inside flag `{other}`"))),
        };
        if x != grid.xs()[i].as_f64() || y != grid.ys()[j].as_f64() {
            return Err(Error::FieldFormat(format!(
                "node ({i}, {j}) coordinates disagree"
            )));
        }
        match (grid.unknown_at(i, j), inside) {
            (Some(u), true) => values[u] = T::lit(v),
            (None, false) => {
                if v != 0.0 {
                    return Err(Error::FieldFormat(format!(
                        "non-zero value on boundary node ({i}, {j})"
                    )));
                }
            }
            _ => {
                return Err(Error::FieldFormat(format!(
                    "inside flag of node ({i}, {j}) disagrees with the domain"
                )))
            }
        }
        count += 1;
    }
    if count != nx * ny {
        return Err(Error::FieldFormat(format!(
            "expected {} node lines, found {count}",
            nx * ny
        )));
    }
    Ok(FieldFile {
        k: T::lit(k),
        field: ScalarField::new(grid, values)?,
    })
}
