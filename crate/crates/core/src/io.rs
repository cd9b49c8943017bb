//! Text formats: `.ltri` triangulations and `.flipseq` sequences.
//!
//! ```text
//! ltri 1
//! setting convex
//! vertices 4
//! 0 0
//! 1 1
//! 2 4
//! 3 9
//! edges 5
//! 0 0 1
//! ...
//! faces 2
//! +0 +1 -4
//! ...
//! ```
//!
//! Edge lines are `label va vb`. A face lists its three edge labels in
//! counter-clockwise order, each signed `+` when the face walks it from `va`
//! to `vb`. Combinatorial files omit the coordinate lines (`vertices v` only).
//! Serialization is canonical: edges ascending by label with `va < vb`, each
//! face rotated to start at its smallest label, faces sorted.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::FlipSequence;
use crate::tri::{EdgeLabel, LabeledTriangulation, Setting, TriError, VertexId};
use crate::Triangulation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid triangulation: {0}")]
    Invalid(#[from] TriError),
}

fn perr(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, message: message.into() }
}

/// Non-blank, non-comment lines with 1-based line numbers.
struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let inner = Box::new(
            text.lines()
                .enumerate()
                .map(|(k, l)| (k + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { inner, last: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), IoError> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(perr(self.last + 1, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), IoError> {
        let (n, line) = self.next(key)?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(perr(n, format!("expected `{key}`")));
        }
        Ok((n, parts.collect()))
    }

    fn finish(&mut self) -> Result<(), IoError> {
        match self.inner.next() {
            Some((n, _)) => Err(perr(n, "trailing content")),
            None => Ok(()),
        }
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, IoError> {
    s.parse().map_err(|_| perr(line, format!("invalid {what} `{s}`")))
}

fn count(line: usize, args: &[&str], key: &str) -> Result<usize, IoError> {
    match args {
        [c] => num(line, c, "count"),
        _ => Err(perr(line, format!("expected `{key} <count>`"))),
    }
}

/// Parses and validates an `.ltri` document.
pub fn parse_ltri(text: &str) -> Result<Triangulation, IoError> {
    let mut lines = Lines::new(text);
    let (n, args) = lines.keyword("ltri")?;
    if args != ["1"] {
        return Err(perr(n, "unsupported ltri version"));
    }
    let (n, args) = lines.keyword("setting")?;
    let setting: Setting = match args.as_slice() {
        [s] => s.parse().map_err(|e: String| perr(n, e))?,
        _ => return Err(perr(n, "expected `setting <name>`")),
    };
    let (n, args) = lines.keyword("vertices")?;
    let v: u32 = count(n, &args, "vertices")? as u32;
    let coords = if setting.needs_coordinates() {
        let mut pts = Vec::with_capacity(v as usize);
        for _ in 0..v {
            let (n, line) = lines.next("a coordinate line")?;
            match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                [x, y] => pts.push([num::<i64>(n, x, "coordinate")?, num::<i64>(n, y, "coordinate")?]),
                _ => return Err(perr(n, "expected `x y`")),
            }
        }
        Some(pts)
    } else {
        None
    };
    let (n, args) = lines.keyword("edges")?;
    let e = count(n, &args, "edges")?;
    let mut edges = Vec::with_capacity(e);
    for _ in 0..e {
        let (n, line) = lines.next("an edge line")?;
        match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            [l, a, b] => edges.push((
                EdgeLabel(num(n, l, "label")?),
                num::<VertexId>(n, a, "vertex")?,
                num::<VertexId>(n, b, "vertex")?,
            )),
            _ => return Err(perr(n, "expected `label va vb`")),
        }
    }
    let (n, args) = lines.keyword("faces")?;
    let f = count(n, &args, "faces")?;
    let mut faces = Vec::with_capacity(f);
    for _ in 0..f {
        let (n, line) = lines.next("a face line")?;
        let parts: Vec<_> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(perr(n, "expected three signed labels"));
        }
        let mut face = [(EdgeLabel(0), true); 3];
        for (slot, p) in face.iter_mut().zip(parts) {
            let (forward, rest) = match p.as_bytes().first() {
                Some(b'+') => (true, &p[1..]),
                Some(b'-') => (false, &p[1..]),
                _ => return Err(perr(n, format!("face entry `{p}` needs an explicit sign"))),
            };
            *slot = (EdgeLabel(num(n, rest, "label")?), forward);
        }
        faces.push(face);
    }
    lines.finish()?;
    Ok(LabeledTriangulation::from_parts(setting, v, coords, &edges, &faces)?)
}

/// Canonical `.ltri` text.
pub fn write_ltri(t: &Triangulation) -> String {
    let mut out = String::new();
    writeln!(out, "ltri 1").unwrap();
    writeln!(out, "setting {}", t.setting()).unwrap();
    writeln!(out, "vertices {}", t.vertex_count()).unwrap();
    if t.setting().needs_coordinates() {
        for p in t.coords().expect("setting carries coordinates") {
            writeln!(out, "{} {}", p[0], p[1]).unwrap();
        }
    }
    writeln!(out, "edges {}", t.edge_count()).unwrap();
    for l in t.labels() {
        let [a, b] = t.sorted_endpoints(l).expect("present");
        writeln!(out, "{l} {a} {b}").unwrap();
    }
    let mut faces: Vec<[(EdgeLabel, bool); 3]> = t
        .face_ids()
        .map(|fid| {
            let entries = t.face_entries(fid);
            let signed = entries.map(|(l, forward)| {
                let ends = t.endpoints(l).expect("present");
                let start = if forward { ends[0] } else { ends[1] };
                (l, start == ends[0].min(ends[1]))
            });
            let k = (0..3).min_by_key(|&k| signed[k].0).expect("three entries");
            [signed[k], signed[(k + 1) % 3], signed[(k + 2) % 3]]
        })
        .collect();
    faces.sort_unstable();
    writeln!(out, "faces {}", faces.len()).unwrap();
    for face in faces {
        let parts: Vec<String> = face.iter().map(|(l, fw)| format!("{}{}", if *fw { '+' } else { '-' }, l)).collect();
        writeln!(out, "{}", parts.join(" ")).unwrap();
    }
    out
}

pub fn parse_flipseq(text: &str) -> Result<FlipSequence, IoError> {
    let mut header = None;
    let mut labels = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let n = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header.is_none() {
            match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["flipseq", "1", c] => header = Some((n, num::<usize>(n, c, "count")?)),
                ["flipseq", v, _] => return Err(perr(n, format!("unsupported flipseq version `{v}`"))),
                _ => return Err(perr(n, "expected `flipseq 1 <count>`")),
            }
            continue;
        }
        for tok in line.split_whitespace() {
            labels.push(EdgeLabel(num(n, tok, "label")?));
        }
    }
    let Some((n, c)) = header else {
        return Err(perr(1, "missing `flipseq` header"));
    };
    if c != labels.len() {
        return Err(perr(n, format!("header announces {c} labels, found {}", labels.len())));
    }
    Ok(FlipSequence::from(labels))
}

pub fn write_flipseq(seq: &FlipSequence) -> String {
    let mut out = format!("flipseq 1 {}\n", seq.len());
    if !seq.is_empty() {
        let parts: Vec<String> = seq.iter().map(|l| l.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

/// Converts a triangle-only OFF mesh; `x y` are read as integers and `z` is
/// ignored. Edges are labeled in sorted vertex-pair order.
pub fn triangulation_from_off(text: &str, setting: Setting) -> Result<Triangulation, IoError> {
    let mut lines = Lines::new(text);
    let (n, line) = lines.next("OFF header")?;
    let mut head: Vec<&str> = line.split_whitespace().collect();
    if head.first() != Some(&"OFF") {
        return Err(perr(n, "expected `OFF`"));
    }
    head.remove(0);
    let (n, counts) = if head.is_empty() {
        let (n, l) = lines.next("counts")?;
        (n, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (n, head)
    };
    if counts.len() < 2 {
        return Err(perr(n, "expected `vertices faces [edges]`"));
    }
    let v: u32 = num(n, counts[0], "vertex count")?;
    let f: usize = num(n, counts[1], "face count")?;
    let mut pts = Vec::with_capacity(v as usize);
    for _ in 0..v {
        let (n, l) = lines.next("a vertex line")?;
        let parts: Vec<_> = l.split_whitespace().collect();
        if parts.len() < 2 {
            return Err(perr(n, "expected coordinates"));
        }
        let coord = |s: &str| -> Result<i64, IoError> {
            let x: f64 = num(n, s, "coordinate")?;
            if x.fract() != 0.0 || x.abs() > (1u64 << 53) as f64 {
                return Err(perr(n, format!("coordinate `{s}` is not an integer")));
            }
            Ok(x as i64)
        };
        pts.push([coord(parts[0])?, coord(parts[1])?]);
    }
    let mut tris = Vec::with_capacity(f);
    for _ in 0..f {
        let (n, l) = lines.next("a face line")?;
        let parts: Vec<_> = l.split_whitespace().collect();
        if parts.first() != Some(&"3") || parts.len() < 4 {
            return Err(perr(n, "only triangular faces are supported"));
        }
        tris.push([num(n, parts[1], "vertex")?, num(n, parts[2], "vertex")?, num(n, parts[3], "vertex")?]);
    }
    let coords = setting.needs_coordinates().then_some(pts);
    Ok(LabeledTriangulation::from_triangles(setting, v, coords, &tris)?)
}
