//! ASCII OBJ and OFF reading and writing.
//!
//! Parsing is total: every input yields either a validated [`TriMesh`] or a
//! [`MeshError`] that carries the 1-based source line. Polygons with more
//! than three corners are fan-triangulated from their first corner.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::{MeshError, SourceLines, TriMesh};
use crate::numcore::{fmt_real, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self, MeshError> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
        ext.parse()
    }
}

impl FromStr for MeshFormat {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "off" => Ok(Self::Off),
            other => Err(MeshError::UnknownFormat(other.to_string())),
        }
    }
}

/// Reads a mesh, inferring the format from the file extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let bytes = fs::read(path)?;
    parse_mesh(&bytes, format)
}

pub fn parse_mesh(bytes: &[u8], format: MeshFormat) -> Result<TriMesh, MeshError> {
    let lines = split_lines(bytes)?;
    match format {
        MeshFormat::Obj => parse_obj(&lines),
        MeshFormat::Off => parse_off(&lines),
    }
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let mut file = fs::File::create(path)?;
    write_mesh(mesh, format, &mut file)
}

pub fn write_mesh<W: Write>(mesh: &TriMesh, format: MeshFormat, out: &mut W) -> Result<(), MeshError> {
    out.write_all(mesh_to_string(mesh, format).as_bytes())?;
    Ok(())
}

pub fn mesh_to_string(mesh: &TriMesh, format: MeshFormat) -> String {
    let mut s = String::new();
    let coords = |p: &Vec3| format!("{} {} {}", fmt_real(p.x), fmt_real(p.y), fmt_real(p.z));
    match format {
        MeshFormat::Obj => {
            for p in mesh.positions() {
                s.push_str(&format!("v {}\n", coords(p)));
            }
            for [a, b, c] in mesh.faces() {
                s.push_str(&format!("f {} {} {}\n", a + 1, b + 1, c + 1));
            }
        }
        MeshFormat::Off => {
            s.push_str(&format!("OFF\n{} {} 0\n", mesh.vertex_count(), mesh.face_count()));
            for p in mesh.positions() {
                s.push_str(&format!("{}\n", coords(p)));
            }
            for [a, b, c] in mesh.faces() {
                s.push_str(&format!("3 {a} {b} {c}\n"));
            }
        }
    }
    s
}

/// Lines with their 1-based numbers, comments stripped.
fn split_lines(bytes: &[u8]) -> Result<Vec<(usize, &str)>, MeshError> {
    let mut lines = Vec::new();
    let mut rest = bytes;
    let mut number = 0;
    while !rest.is_empty() {
        number += 1;
        let (line, tail) = match rest.iter().position(|&b| b == b'\n') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => (rest, &rest[rest.len()..]),
        };
        rest = tail;
        let text = std::str::from_utf8(line)
            .map_err(|_| MeshError::Parse { line: number, message: "invalid UTF-8".into() })?;
        let text = text.split('#').next().unwrap_or_default().trim();
        lines.push((number, text));
    }
    Ok(lines)
}

fn parse_error(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { line, message: message.into() }
}

fn parse_real(token: &str, line: usize) -> Result<f64, MeshError> {
    let x: f64 = token.parse().map_err(|_| parse_error(line, format!("expected a number, found {token:?}")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(parse_error(line, format!("non-finite coordinate {token:?}")))
    }
}

fn parse_point(tokens: &[&str], line: usize) -> Result<Vec3, MeshError> {
    if tokens.len() < 3 {
        return Err(parse_error(line, format!("expected 3 coordinates, found {}", tokens.len())));
    }
    for extra in &tokens[3..] {
        extra.parse::<f64>().map_err(|_| parse_error(line, format!("unexpected token {extra:?}")))?;
    }
    Ok(Vec3::new(parse_real(tokens[0], line)?, parse_real(tokens[1], line)?, parse_real(tokens[2], line)?))
}

fn fan(polygon: &[usize], line: usize, faces: &mut Vec<[usize; 3]>, lines: &mut SourceLines) {
    for k in 1..polygon.len() - 1 {
        faces.push([polygon[0], polygon[k], polygon[k + 1]]);
        lines.faces.push(line);
    }
}

const OBJ_IGNORED: &[&str] = &[
    "vt",
    "vn",
    "vp",
    "g",
    "o",
    "s",
    "usemtl",
    "mtllib",
    "l",
    "p",
    "cstype",
    "deg",
    "bmat",
    "step",
    "curv",
    "curv2",
    "surf",
    "parm",
    "trim",
    "hole",
    "scrv",
    "sp",
    "end",
    "con",
    "mg",
    "bevel",
    "c_interp",
    "d_interp",
    "lod",
    "shadow_obj",
    "trace_obj",
    "ctech",
    "stech",
    "maplib",
    "usemap",
];

fn parse_obj(source: &[(usize, &str)]) -> Result<TriMesh, MeshError> {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    let mut lines = SourceLines::default();
    for &(line, text) in source {
        let mut tokens = text.split_whitespace();
        let Some(keyword) = tokens.next() else { continue };
        let args: Vec<&str> = tokens.collect();
        match keyword {
            "v" => {
                if args.len() > 4 && args.len() != 6 && args.len() != 7 {
                    return Err(parse_error(line, format!("vertex record with {} values", args.len())));
                }
                positions.push(parse_point(&args, line)?);
                lines.vertices.push(line);
            }
            "f" => {
                if args.len() < 3 {
                    return Err(parse_error(line, format!("face needs at least 3 vertices, found {}", args.len())));
                }
                let polygon = args
                    .iter()
                    .map(|r| obj_index(r, positions.len(), faces.len(), line))
                    .collect::<Result<Vec<_>, _>>()?;
                fan(&polygon, line, &mut faces, &mut lines);
            }
            k if OBJ_IGNORED.contains(&k) => {}
            other => return Err(parse_error(line, format!("unknown record {other:?}"))),
        }
    }
    TriMesh::build(positions, faces, false, Some(&lines))
}

/// Resolves `i`, `i/t`, `i//n` or `i/t/n` to a 0-based index. Negative
/// indices count back from the vertices read so far. Positive indices are
/// range-checked during validation.
fn obj_index(reference: &str, seen: usize, face: usize, line: usize) -> Result<usize, MeshError> {
    let head = reference.split('/').next().unwrap_or_default();
    let index: i64 = head.parse().map_err(|_| parse_error(line, format!("bad vertex reference {reference:?}")))?;
    match index {
        0 => Err(parse_error(line, "vertex index 0 is invalid (indices are 1-based)")),
        i if i > 0 => Ok(i as usize - 1),
        i => {
            let resolved = seen as i64 + i;
            if resolved < 0 {
                Err(MeshError::IndexOutOfRange { face, index: i, count: seen, line: Some(line) })
            } else {
                Ok(resolved as usize)
            }
        }
    }
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<usize, MeshError> {
    token.parse().map_err(|_| parse_error(line, format!("expected {what} count, found {token:?}")))
}

fn parse_off(source: &[(usize, &str)]) -> Result<TriMesh, MeshError> {
    let mut rows = source.iter().copied().filter(|(_, t)| !t.is_empty());
    let end_line = source.len() + 1;
    let eof = |what: &str| parse_error(end_line, format!("unexpected end of file, expected {what}"));

    let (line, header) = rows.next().ok_or_else(|| eof("OFF header"))?;
    let mut tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"OFF") {
        return Err(parse_error(line, format!("expected OFF header, found {header:?}")));
    }
    tokens.remove(0);
    let (count_line, counts) = if tokens.is_empty() {
        let (l, t) = rows.next().ok_or_else(|| eof("vertex and face counts"))?;
        (l, t.split_whitespace().collect())
    } else {
        (line, tokens)
    };
    if counts.len() < 2 || counts.len() > 3 {
        return Err(parse_error(count_line, format!("expected 'V F [E]' counts, found {} values", counts.len())));
    }
    let nv = parse_count(counts[0], count_line, "vertex")?;
    let nf = parse_count(counts[1], count_line, "face")?;
    if let Some(e) = counts.get(2) {
        parse_count(e, count_line, "edge")?;
    }

    let mut positions = Vec::with_capacity(nv);
    let mut lines = SourceLines::default();
    for _ in 0..nv {
        let (line, text) = rows.next().ok_or_else(|| eof("vertex coordinates"))?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        positions.push(parse_point(&tokens, line)?);
        lines.vertices.push(line);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, text) = rows.next().ok_or_else(|| eof("face record"))?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let k = parse_count(tokens[0], line, "polygon corner")?;
        if k < 3 {
            return Err(parse_error(line, format!("polygon needs at least 3 corners, found {k}")));
        }
        if tokens.len() < k + 1 {
            return Err(parse_error(line, format!("polygon declares {k} corners but lists {}", tokens.len() - 1)));
        }
        let polygon = tokens[1..=k]
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| parse_error(line, format!("bad vertex index {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        fan(&polygon, line, &mut faces, &mut lines);
    }
    if let Some((line, text)) = rows.next() {
        return Err(parse_error(line, format!("unexpected trailing data {text:?}")));
    }
    TriMesh::build(positions, faces, false, Some(&lines))
}
