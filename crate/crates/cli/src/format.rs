//! Text formats: cdd-style polyhedron files, group files, face lists and
//! perturbation specs. Every file written starts with [`FORMAT_HEADER`].
use std::fmt::Write as _;

use num_traits::{One, Zero};
use symcone::exactlin::{Rational, RationalMatrix};
use symcone::permgrp::{PermGroup, Permutation};
use symcone::pivotsym::PerturbationSpec;
use symcone::FaceSet;
use thiserror::Error;

pub const FORMAT_HEADER: &str = "# symcone-format 1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header `{found}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: zero row")]
    ZeroRow { line: usize },
    #[error("line {line}: `{token}` is not a {format} number")]
    BadToken {
        line: usize,
        token: String,
        format: &'static str,
    },
    #[error("line {line}: homogenization marker must be 0 or 1, found `{found}`")]
    BadMarker { line: usize, found: String },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("line {line}: {message}")]
    Group { line: usize, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    V,
    H,
}

impl Representation {
    pub fn header(self) -> &'static str {
        match self {
            Representation::V => "V-representation",
            Representation::H => "H-representation",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Representation::V => Representation::H,
            Representation::H => Representation::V,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberFormat {
    Rational,
    Integer,
}

impl NumberFormat {
    fn name(self) -> &'static str {
        match self {
            NumberFormat::Rational => "rational",
            NumberFormat::Integer => "integer",
        }
    }

    /// The narrowest format able to hold every entry.
    pub fn fitting(rows: &[Vec<Rational>]) -> Self {
        if rows.iter().flatten().all(|x| x.is_integer()) {
            NumberFormat::Integer
        } else {
            NumberFormat::Rational
        }
    }
}

/// A polyhedron file: cdd rows with the homogenization marker first, plus
/// optional `group` and `options` sections after `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDocument {
    pub kind: Representation,
    pub format: NumberFormat,
    pub rows: Vec<Vec<Rational>>,
    pub group: Option<Vec<Permutation>>,
    pub options: Vec<(String, String)>,
}

/// The content of a polyhedron file without its marker column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Polyhedron {
    Generators {
        points: RationalMatrix,
        rays: RationalMatrix,
    },
    Inequalities(RationalMatrix),
}

fn is_comment(line: &str) -> bool {
    line.is_empty() || line.starts_with('#') || line.starts_with('*')
}

fn parse_number(token: &str, format: NumberFormat, line: usize) -> Result<Rational, ParseError> {
    let bad = || ParseError::BadToken {
        line,
        token: token.to_string(),
        format: format.name(),
    };
    let x: Rational = token
        .strip_prefix('+')
        .unwrap_or(token)
        .parse()
        .map_err(|_| bad())?;
    if format == NumberFormat::Integer && !x.is_integer() {
        return Err(bad());
    }
    Ok(x)
}

impl InputDocument {
    pub fn new(kind: Representation, rows: Vec<Vec<Rational>>) -> Self {
        Self {
            kind,
            format: NumberFormat::fitting(&rows),
            rows,
            group: None,
            options: Vec::new(),
        }
    }

    /// Number of columns including the marker.
    pub fn cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn option(&self, key: &str) -> Option<&str> {
        self.options
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut kind = None;
        let mut name: Option<(usize, &str)> = None;
        let kind = loop {
            let (n, line) = lines.next().ok_or(ParseError::Missing("begin"))?;
            if is_comment(line) {
                continue;
            }
            let bad = |(line, found): (usize, &str)| ParseError::BadHeader {
                line,
                found: found.to_string(),
            };
            match line {
                "V-representation" => kind = Some(Representation::V),
                "H-representation" => kind = Some(Representation::H),
                "begin" => break kind.ok_or_else(|| bad(name.unwrap_or((n, line))))?,
                _ if kind.is_none() && name.is_none() => name = Some((n, line)),
                _ => return Err(bad((n, line))),
            }
        };

        let (n, size) = lines
            .by_ref()
            .find(|(_, l)| !is_comment(l))
            .ok_or(ParseError::Missing("size line"))?;
        let bad_size = || ParseError::BadHeader {
            line: n,
            found: size.to_string(),
        };
        let parts: Vec<&str> = size.split_whitespace().collect();
        let [count, cols, format] = parts[..] else {
            return Err(bad_size());
        };
        let count: usize = count.parse().map_err(|_| bad_size())?;
        let cols: usize = cols.parse().map_err(|_| bad_size())?;
        let format = match format {
            "rational" => NumberFormat::Rational,
            "integer" => NumberFormat::Integer,
            _ => return Err(bad_size()),
        };
        if cols < 2 {
            return Err(bad_size());
        }

        let mut rows = Vec::with_capacity(count);
        loop {
            let (n, line) = lines.next().ok_or(ParseError::Missing("end"))?;
            if is_comment(line) {
                continue;
            }
            if line == "end" {
                break;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != cols {
                return Err(ParseError::Ragged {
                    line: n,
                    expected: cols,
                    found: tokens.len(),
                });
            }
            let row = tokens
                .iter()
                .map(|t| parse_number(t, format, n))
                .collect::<Result<Vec<_>, _>>()?;
            if row.iter().all(Zero::is_zero) {
                return Err(ParseError::ZeroRow { line: n });
            }
            if kind == Representation::V && !row[0].is_zero() && !row[0].is_one() {
                return Err(ParseError::BadMarker {
                    line: n,
                    found: tokens[0].to_string(),
                });
            }
            rows.push(row);
        }
        if rows.len() != count {
            return Err(ParseError::RowCount {
                expected: count,
                found: rows.len(),
            });
        }

        let mut doc = InputDocument {
            kind,
            format,
            rows,
            group: None,
            options: Vec::new(),
        };
        while let Some((n, line)) = lines.next() {
            if is_comment(line) {
                continue;
            }
            match line {
                "group" => {
                    let mut gens = Vec::new();
                    let mut closed = false;
                    for (m, l) in lines.by_ref() {
                        if is_comment(l) {
                            continue;
                        }
                        if l == "end" {
                            closed = true;
                            break;
                        }
                        let g = Permutation::parse(l, count).map_err(|e| ParseError::Group {
                            line: m,
                            message: e.to_string(),
                        })?;
                        gens.push(g);
                    }
                    if !closed {
                        return Err(ParseError::Missing("end of group section"));
                    }
                    doc.group = Some(gens);
                }
                "options" => {
                    let mut closed = false;
                    for (m, l) in lines.by_ref() {
                        if is_comment(l) {
                            continue;
                        }
                        if l == "end" {
                            closed = true;
                            break;
                        }
                        let (k, v) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
                        if k.is_empty() {
                            return Err(ParseError::Malformed {
                                line: m,
                                message: "empty option".into(),
                            });
                        }
                        doc.options.push((k.to_string(), v.trim().to_string()));
                    }
                    if !closed {
                        return Err(ParseError::Missing("end of options section"));
                    }
                }
                _ => {
                    return Err(ParseError::Malformed {
                        line: n,
                        message: format!("unexpected `{line}` after end"),
                    })
                }
            }
        }
        Ok(doc)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER}");
        let _ = writeln!(out, "{}", self.kind.header());
        let _ = writeln!(out, "begin");
        let _ = writeln!(
            out,
            "{} {} {}",
            self.rows.len(),
            self.cols(),
            self.format.name()
        );
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        let _ = writeln!(out, "end");
        if let Some(gens) = &self.group {
            let _ = writeln!(out, "group");
            for g in gens {
                let _ = writeln!(out, "{g}");
            }
            let _ = writeln!(out, "end");
        }
        if !self.options.is_empty() {
            let _ = writeln!(out, "options");
            for (k, v) in &self.options {
                let _ = writeln!(out, "{} {}", k, v);
            }
            let _ = writeln!(out, "end");
        }
        out
    }

    /// Rows split by marker, with the marker column removed.
    pub fn polyhedron(&self) -> Polyhedron {
        let d = self.cols().saturating_sub(1);
        match self.kind {
            Representation::V => {
                let (points, rays): (Vec<_>, Vec<_>) =
                    self.rows.iter().partition(|r| !r[0].is_zero());
                let strip = |rows: Vec<&Vec<Rational>>| {
                    RationalMatrix::from_rows(
                        d,
                        rows.into_iter().map(|r| r[1..].to_vec()).collect(),
                    )
                };
                Polyhedron::Generators {
                    points: strip(points),
                    rays: strip(rays),
                }
            }
            Representation::H => {
                Polyhedron::Inequalities(RationalMatrix::from_rows(d + 1, self.rows.clone()))
            }
        }
    }
}

pub fn parse_polyhedron_file(text: &str) -> Result<Polyhedron, ParseError> {
    Ok(InputDocument::parse(text)?.polyhedron())
}

/// One permutation per line in 1-based cycle notation; blank and `#`
/// lines are ignored, so an empty file is the trivial group.
pub fn parse_group_file(text: &str, n: usize) -> Result<PermGroup, ParseError> {
    let mut gens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if is_comment(line) {
            continue;
        }
        let g = Permutation::parse(line, n).map_err(|e| ParseError::Group {
            line: i + 1,
            message: e.to_string(),
        })?;
        gens.push(g);
    }
    PermGroup::new(n, gens).map_err(|e| ParseError::Group {
        line: 0,
        message: e.to_string(),
    })
}

pub fn render_group_file(g: &PermGroup) -> String {
    let mut out = format!(
        "{FORMAT_HEADER}\n# degree {} order {}\n",
        g.degree(),
        g.order()
    );
    for p in g.generators() {
        let _ = writeln!(out, "{p}");
    }
    out
}

/// One face per line as 1-based indices, optionally in braces; `{}` is the
/// empty face.
pub fn parse_face_list(text: &str, n: usize) -> Result<Vec<FaceSet>, ParseError> {
    let mut faces = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if is_comment(line) {
            continue;
        }
        let body = line
            .strip_prefix('{')
            .and_then(|l| l.strip_suffix('}'))
            .unwrap_or(line);
        let mut idx = Vec::new();
        for t in body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            match t.parse::<usize>() {
                Ok(k) if (1..=n).contains(&k) => idx.push(k - 1),
                _ => {
                    return Err(ParseError::Malformed {
                        line: i + 1,
                        message: format!("`{t}` is not an index in 1..{n}"),
                    })
                }
            }
        }
        faces.push(FaceSet::new(idx));
    }
    Ok(faces)
}

pub fn render_face_list(faces: &[FaceSet]) -> String {
    let mut out = format!("{FORMAT_HEADER}\n");
    for f in faces {
        let _ = writeln!(out, "{{{}}}", f.to_one_based_string());
    }
    out
}

/// Subgroup generators (lines starting with `(` or `[`), an optional
/// `signs` line of `+`/`push` or `-`/`pull` per orbit, and an optional
/// 1-based `order` line. Orbits are numbered by smallest member.
pub fn parse_perturbation_file(text: &str, n: usize) -> Result<PerturbationSpec, ParseError> {
    let mut gens = Vec::new();
    let mut signs = None;
    let mut order = None;
    let mut last = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let n_line = i + 1;
        last = n_line;
        if is_comment(line) {
            continue;
        }
        let malformed = |message: String| ParseError::Malformed {
            line: n_line,
            message,
        };
        if line.starts_with('(') || line.starts_with('[') {
            gens.push(Permutation::parse(line, n).map_err(|e| ParseError::Group {
                line: n_line,
                message: e.to_string(),
            })?);
        } else if let Some(rest) = line.strip_prefix("signs") {
            let s = rest
                .split_whitespace()
                .map(|t| match t {
                    "+" | "push" => Ok(1i8),
                    "-" | "pull" => Ok(-1),
                    _ => Err(malformed(format!("`{t}` is not a sign"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            signs = Some(s);
        } else if let Some(rest) = line.strip_prefix("order") {
            let o = rest
                .split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(malformed(format!("`{t}` is not an orbit number"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            order = Some(o);
        } else {
            return Err(malformed(format!("unexpected `{line}`")));
        }
    }
    let group = PermGroup::new(n, gens).map_err(|e| ParseError::Group {
        line: 0,
        message: e.to_string(),
    })?;
    let k = group.point_orbits().len();
    let signs = signs.unwrap_or_else(|| vec![-1; k]);
    let order = order.unwrap_or_else(|| (0..k).collect());
    PerturbationSpec::new(group, order, signs).map_err(|e| ParseError::Malformed {
        line: last,
        message: e.to_string(),
    })
}
