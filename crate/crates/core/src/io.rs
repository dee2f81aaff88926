//! Point cloud loading and result export.
//!
//! Input formats: whitespace-separated XYZ text, OBJ vertex sections, and
//! PLY vertex elements (ASCII and binary, either endianness). Only
//! positions are read; normals, colors, and faces are skipped. Point order
//! always follows the file.
//!
//! Exports are an OBJ file per component, an optional persistence diagram
//! CSV, and a JSON run report. Floats are printed with 17 significant
//! digits so mesh and CSV output round-trips exactly and identical runs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::PointCloud;
use crate::mesh::SurfaceMesh;
use crate::pipeline::{PipelineConfig, ReconstructionResult, StageTimings};
use crate::scalar::Real;
use crate::vec3::V3;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("parse error at byte offset {offset}: {msg}")]
    BinaryParse { offset: usize, msg: String },
    #[error("file contains no points")]
    EmptyFile,
    #[error("unsupported format feature: {0}")]
    Unsupported(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

fn parse_coord(tok: &str, line: usize) -> Result<f64, IoError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("malformed number {:?}", tok)))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite coordinate {:?}", tok)));
    }
    Ok(v)
}

/// Loads a point cloud, dispatching on the PLY magic bytes, the `.obj`
/// extension, and otherwise treating the file as XYZ text.
pub fn load_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud<f64>, IoError> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let points = if first_line_is_ply(&bytes) {
        parse_ply(&bytes)?
    } else if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("obj"))
    {
        parse_obj_points(&text_of(&bytes)?)?
    } else {
        parse_xyz(&text_of(&bytes)?)?
    };
    if points.is_empty() {
        return Err(IoError::EmptyFile);
    }
    Ok(PointCloud::new(points).expect("coordinates validated during parse"))
}

fn text_of(bytes: &[u8]) -> Result<String, IoError> {
    String::from_utf8(bytes.to_vec())
        .map_err(|e| parse_err(0, format!("not valid utf-8: {}", e)))
}

fn first_line_is_ply(bytes: &[u8]) -> bool {
    let end = bytes.iter().position(|&b| b == b'\n').unwrap_or(bytes.len());
    let line = &bytes[..end];
    let line = line.strip_suffix(b"\r").unwrap_or(line);
    line == b"ply"
}

fn parse_xyz(text: &str) -> Result<Vec<[f64; 3]>, IoError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let mut p = [0.0; 3];
        for c in &mut p {
            let tok = toks
                .next()
                .ok_or_else(|| parse_err(line_no, "expected three coordinates"))?;
            *c = parse_coord(tok, line_no)?;
        }
        points.push(p);
    }
    Ok(points)
}

fn parse_obj_points(text: &str) -> Result<Vec<[f64; 3]>, IoError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut toks = raw.split_whitespace();
        if toks.next() != Some("v") {
            continue;
        }
        let mut p = [0.0; 3];
        for c in &mut p {
            let tok = toks
                .next()
                .ok_or_else(|| parse_err(line_no, "vertex needs three coordinates"))?;
            *c = parse_coord(tok, line_no)?;
        }
        points.push(p);
    }
    Ok(points)
}

/// Loads an OBJ triangle mesh, the format `export_outputs` writes.
pub fn load_obj_mesh(path: impl AsRef<Path>) -> Result<SurfaceMesh<f64>, IoError> {
    let text = text_of(&fs::read(path.as_ref())?)?;
    let mut vertices: Vec<V3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in &mut p {
                    let tok = toks
                        .next()
                        .ok_or_else(|| parse_err(line_no, "vertex needs three coordinates"))?;
                    *c = parse_coord(tok, line_no)?;
                }
                vertices.push(p);
            }
            Some("f") => {
                let mut ids = [0u32; 3];
                for slot in &mut ids {
                    let tok = toks
                        .next()
                        .ok_or_else(|| parse_err(line_no, "face needs three vertices"))?;
                    // Index forms a, a/t, a//n, a/t/n all start with the
                    // vertex index.
                    let first = tok.split('/').next().unwrap_or("");
                    let id: i64 = first
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad face index {:?}", tok)))?;
                    if id < 1 || id as usize > vertices.len() {
                        return Err(parse_err(line_no, format!("face index {} out of range", id)));
                    }
                    *slot = (id - 1) as u32;
                }
                if toks.next().is_some() {
                    return Err(IoError::Unsupported(format!(
                        "non-triangular face at line {}",
                        line_no
                    )));
                }
                faces.push(ids);
            }
            _ => {}
        }
    }
    if vertices.is_empty() {
        return Err(IoError::EmptyFile);
    }
    Ok(SurfaceMesh::new(vertices, faces))
}

#[derive(Clone, Copy, PartialEq)]
enum PlyFormat {
    Ascii,
    BinaryLe,
    BinaryBe,
}

#[derive(Clone, Copy)]
enum PlyScalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PlyScalar {
    fn from_name(name: &str) -> Option<PlyScalar> {
        Some(match name {
            "char" | "int8" => PlyScalar::I8,
            "uchar" | "uint8" => PlyScalar::U8,
            "short" | "int16" => PlyScalar::I16,
            "ushort" | "uint16" => PlyScalar::U16,
            "int" | "int32" => PlyScalar::I32,
            "uint" | "uint32" => PlyScalar::U32,
            "float" | "float32" => PlyScalar::F32,
            "double" | "float64" => PlyScalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            PlyScalar::I8 | PlyScalar::U8 => 1,
            PlyScalar::I16 | PlyScalar::U16 => 2,
            PlyScalar::I32 | PlyScalar::U32 | PlyScalar::F32 => 4,
            PlyScalar::F64 => 8,
        }
    }

    fn read(self, bytes: &[u8], big_endian: bool) -> f64 {
        macro_rules! decode {
            ($ty:ty) => {{
                let arr: [u8; std::mem::size_of::<$ty>()] =
                    bytes[..std::mem::size_of::<$ty>()].try_into().unwrap();
                if big_endian {
                    <$ty>::from_be_bytes(arr) as f64
                } else {
                    <$ty>::from_le_bytes(arr) as f64
                }
            }};
        }
        match self {
            PlyScalar::I8 => decode!(i8),
            PlyScalar::U8 => decode!(u8),
            PlyScalar::I16 => decode!(i16),
            PlyScalar::U16 => decode!(u16),
            PlyScalar::I32 => decode!(i32),
            PlyScalar::U32 => decode!(u32),
            PlyScalar::F32 => decode!(f32),
            PlyScalar::F64 => decode!(f64),
        }
    }
}

struct PlyElement {
    name: String,
    count: usize,
    // Scalar properties in declaration order; None marks a list property.
    properties: Vec<Option<PlyScalar>>,
    // Token or byte positions of x, y, z once resolved.
    xyz: [Option<usize>; 3],
}

fn header_line(
    bytes: &[u8],
    cursor: &mut usize,
    line_no: &mut usize,
) -> Result<String, IoError> {
    if *cursor >= bytes.len() {
        return Err(parse_err(*line_no + 1, "header ended before end_header"));
    }
    let end = bytes[*cursor..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|p| *cursor + p)
        .unwrap_or(bytes.len());
    let line = &bytes[*cursor..end];
    let line = line.strip_suffix(b"\r").unwrap_or(line);
    *cursor = (end + 1).min(bytes.len());
    *line_no += 1;
    String::from_utf8(line.to_vec()).map_err(|_| parse_err(*line_no, "header is not valid utf-8"))
}

fn parse_ply(bytes: &[u8]) -> Result<Vec<[f64; 3]>, IoError> {
    let mut cursor = 0usize;
    let mut line_no = 0usize;

    let magic = header_line(bytes, &mut cursor, &mut line_no)?;
    debug_assert_eq!(magic, "ply");
    let mut format = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    loop {
        let line = header_line(bytes, &mut cursor, &mut line_no)?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first().copied() {
            None | Some("comment") | Some("obj_info") => {}
            Some("format") => {
                format = Some(match toks.get(1).copied() {
                    Some("ascii") => PlyFormat::Ascii,
                    Some("binary_little_endian") => PlyFormat::BinaryLe,
                    Some("binary_big_endian") => PlyFormat::BinaryBe,
                    other => {
                        return Err(IoError::Unsupported(format!(
                            "ply format {:?}",
                            other.unwrap_or("")
                        )))
                    }
                });
            }
            Some("element") => {
                let name = toks
                    .get(1)
                    .ok_or_else(|| parse_err(line_no, "element needs a name"))?
                    .to_string();
                let count: usize = toks
                    .get(2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "element needs a count"))?;
                elements.push(PlyElement { name, count, properties: Vec::new(), xyz: [None; 3] });
            }
            Some("property") => {
                let elem = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(line_no, "property before any element"))?;
                if toks.get(1) == Some(&"list") {
                    elem.properties.push(None);
                } else {
                    let ty_name = toks
                        .get(1)
                        .ok_or_else(|| parse_err(line_no, "property needs a type"))?;
                    let ty = PlyScalar::from_name(ty_name).ok_or_else(|| {
                        IoError::Unsupported(format!("ply scalar type {:?}", ty_name))
                    })?;
                    let name = toks
                        .get(2)
                        .ok_or_else(|| parse_err(line_no, "property needs a name"))?;
                    let slot = match *name {
                        "x" => Some(0),
                        "y" => Some(1),
                        "z" => Some(2),
                        _ => None,
                    };
                    if let Some(s) = slot {
                        elem.xyz[s] = Some(elem.properties.len());
                    }
                    elem.properties.push(Some(ty));
                }
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(parse_err(line_no, format!("unknown header keyword {:?}", other)))
            }
        }
    }
    let format = format.ok_or_else(|| parse_err(line_no, "header lacks a format line"))?;
    let vertex_at = elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| parse_err(line_no, "header lacks a vertex element"))?;
    if elements[vertex_at].xyz.iter().any(|s| s.is_none()) {
        return Err(parse_err(line_no, "vertex element lacks x, y, z properties"));
    }
    if elements[vertex_at].properties.iter().any(|p| p.is_none()) {
        return Err(IoError::Unsupported(
            "list property inside the vertex element".to_string(),
        ));
    }

    match format {
        PlyFormat::Ascii => {
            let text = std::str::from_utf8(&bytes[cursor..])
                .map_err(|_| parse_err(line_no + 1, "body is not valid utf-8"))?;
            parse_ply_ascii(text, &elements, vertex_at, line_no)
        }
        PlyFormat::BinaryLe | PlyFormat::BinaryBe => parse_ply_binary(
            bytes,
            cursor,
            &elements,
            vertex_at,
            format == PlyFormat::BinaryBe,
        ),
    }
}

fn parse_ply_ascii(
    text: &str,
    elements: &[PlyElement],
    vertex_at: usize,
    header_lines: usize,
) -> Result<Vec<[f64; 3]>, IoError> {
    let mut lines = text.lines();
    let mut line_no = header_lines;
    let mut points = Vec::new();
    for (at, elem) in elements.iter().enumerate() {
        for _ in 0..elem.count {
            let raw = loop {
                line_no += 1;
                match lines.next() {
                    Some(l) if l.trim().is_empty() => continue,
                    Some(l) => break l,
                    None => {
                        return Err(parse_err(
                            line_no,
                            format!("file ended inside element {:?}", elem.name),
                        ))
                    }
                }
            };
            if at != vertex_at {
                continue;
            }
            let toks: Vec<&str> = raw.split_whitespace().collect();
            let mut p = [0.0; 3];
            for (axis, slot) in elem.xyz.iter().enumerate() {
                let pos = slot.expect("resolved before dispatch");
                let tok = toks.get(pos).ok_or_else(|| {
                    parse_err(line_no, format!("vertex row has only {} values", toks.len()))
                })?;
                p[axis] = parse_coord(tok, line_no)?;
            }
            points.push(p);
        }
        if at == vertex_at {
            break;
        }
    }
    Ok(points)
}

fn parse_ply_binary(
    bytes: &[u8],
    mut cursor: usize,
    elements: &[PlyElement],
    vertex_at: usize,
    big_endian: bool,
) -> Result<Vec<[f64; 3]>, IoError> {
    let mut points = Vec::new();
    for (at, elem) in elements.iter().enumerate() {
        if elem.properties.iter().any(|p| p.is_none()) {
            // Only reachable before the vertex element; a list has no fixed
            // stride so the vertex data cannot be located.
            return Err(IoError::Unsupported(format!(
                "list property in element {:?} ahead of the vertices",
                elem.name
            )));
        }
        let offsets: Vec<usize> = elem
            .properties
            .iter()
            .scan(0usize, |acc, p| {
                let here = *acc;
                *acc += p.expect("lists rejected above").size();
                Some(here)
            })
            .collect();
        let stride: usize = elem
            .properties
            .iter()
            .map(|p| p.expect("lists rejected above").size())
            .sum();
        if at != vertex_at {
            let need = elem.count * stride;
            if bytes.len() - cursor < need {
                return Err(IoError::BinaryParse {
                    offset: bytes.len(),
                    msg: format!("file ended inside element {:?}", elem.name),
                });
            }
            cursor += need;
            continue;
        }
        for _ in 0..elem.count {
            if bytes.len() - cursor < stride {
                return Err(IoError::BinaryParse {
                    offset: bytes.len(),
                    msg: "file ended inside the vertex element".to_string(),
                });
            }
            let mut p = [0.0; 3];
            for (axis, slot) in elem.xyz.iter().enumerate() {
                let prop = slot.expect("resolved before dispatch");
                let ty = elem.properties[prop].expect("lists rejected above");
                let v = ty.read(&bytes[cursor + offsets[prop]..], big_endian);
                if !v.is_finite() {
                    return Err(IoError::BinaryParse {
                        offset: cursor + offsets[prop],
                        msg: "non-finite coordinate".to_string(),
                    });
                }
                p[axis] = v;
            }
            points.push(p);
            cursor += stride;
        }
        break;
    }
    Ok(points)
}

/// 17 significant digits, enough to round-trip any f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

fn obj_of<S: Real>(mesh: &SurfaceMesh<S>) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(
            out,
            "v {} {} {}",
            fmt_f64(v[0].to_f64_exact()),
            fmt_f64(v[1].to_f64_exact()),
            fmt_f64(v[2].to_f64_exact())
        );
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

fn diagram_csv<S: Real>(result: &ReconstructionResult<S>) -> String {
    let mut out = String::from("dim,birth,death,pos_simplex,neg_simplex,significant\n");
    for (i, pair) in result.diagram.pairs.iter().enumerate() {
        let death = match pair.death {
            Some(d) => fmt_f64(d.to_f64_exact()),
            None => "inf".to_string(),
        };
        let neg = match pair.death_simplex {
            Some(s) => s.to_string(),
            None => String::new(),
        };
        let significant = result
            .significance
            .as_ref()
            .is_some_and(|split| split.significant.contains(&(i as u32)));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            pair.dim,
            fmt_f64(pair.birth.to_f64_exact()),
            death,
            pair.birth_simplex,
            neg,
            significant
        );
    }
    out
}

#[derive(Serialize)]
struct ComponentReport<'a> {
    file: String,
    pair_index: u32,
    neighbor_count: usize,
    iterations: usize,
    converged: bool,
    rms_history: &'a [f64],
}

#[derive(Serialize)]
struct RunReport<'a> {
    config: &'a PipelineConfig,
    components: Vec<ComponentReport<'a>>,
    timings: StageTimings,
    warnings: &'a [String],
}

/// Writes one OBJ per component, `diagram.csv` when `cfg.export_pd` is
/// set, and `report.json`, all into `cfg.output_dir`. Returns the written
/// paths. Mesh and CSV bytes depend only on the result, so identical runs
/// export identical files; the JSON carries wall-clock timings and does
/// not.
pub fn export_outputs<S: Real>(
    result: &ReconstructionResult<S>,
    cfg: &PipelineConfig,
) -> Result<Vec<PathBuf>, IoError> {
    fs::create_dir_all(&cfg.output_dir)?;
    let mut written = Vec::new();
    let mut reports = Vec::new();
    for (i, comp) in result.components.iter().enumerate() {
        let name = format!("component_{}.obj", i + 1);
        let path = cfg.output_dir.join(&name);
        fs::write(&path, obj_of(&comp.surface))?;
        reports.push(ComponentReport {
            file: name,
            pair_index: comp.pair_index,
            neighbor_count: comp.neighbor_count,
            iterations: comp.fit.iterations,
            converged: comp.fit.converged,
            rms_history: &comp.fit.rms_history,
        });
        written.push(path);
    }
    if cfg.export_pd {
        let path = cfg.output_dir.join("diagram.csv");
        fs::write(&path, diagram_csv(result))?;
        written.push(path);
    }
    let report = RunReport {
        config: cfg,
        components: reports,
        timings: result.timings,
        warnings: &result.warnings,
    };
    let path = cfg.output_dir.join("report.json");
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> PathBuf {
        let path = dir.path().join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(bytes).unwrap();
        path
    }

    #[test]
    fn xyz_text_loads_in_file_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_temp(&dir, "pts.xyz", b"0 0 0\n1 0 0\n");
        let cloud = load_point_cloud(&p).unwrap();
        assert_eq!(cloud.points(), &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);

        let q = write_temp(&dir, "pts2.xyz", b"0 0 0\n1 0 0\n\n\n");
        assert_eq!(load_point_cloud(&q).unwrap(), cloud);

        let extras = write_temp(&dir, "pts3.txt", b"# comment\n0 0 0 255 0 0\n1\t0  0\n");
        assert_eq!(load_point_cloud(&extras).unwrap(), cloud);
    }

    #[test]
    fn malformed_token_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_temp(&dir, "bad.xyz", b"0 0 0\n1 oops 0\n");
        match load_point_cloud(&p) {
            Err(IoError::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("oops"));
            }
            other => panic!("expected parse error, got {:?}", other),
        }
        let short = write_temp(&dir, "short.xyz", b"0 0 0\n1 2\n");
        assert!(matches!(
            load_point_cloud(&short),
            Err(IoError::Parse { line: 2, .. })
        ));
        let nan = write_temp(&dir, "nan.xyz", b"0 0 nan\n");
        assert!(matches!(load_point_cloud(&nan), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        for bytes in [&b""[..], &b"\n\n"[..], &b"# only a comment\n"[..]] {
            let p = write_temp(&dir, "empty.xyz", bytes);
            assert!(matches!(load_point_cloud(&p), Err(IoError::EmptyFile)));
        }
    }

    #[test]
    fn obj_vertices_load_positions_only() {
        let dir = tempfile::tempdir().unwrap();
        let body = b"# tri\nv 0 0 0\nvn 0 0 1\nv 1 0 0 0.5 0.5 0.5\nvt 0 1\nv 0 1 0\nf 1/1/1 2/2/1 3/3/1\n";
        let p = write_temp(&dir, "tri.obj", body);
        let cloud = load_point_cloud(&p).unwrap();
        assert_eq!(
            cloud.points(),
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
        );
    }

    fn ascii_ply(points: &[[f32; 3]]) -> Vec<u8> {
        let mut s = String::from("ply\nformat ascii 1.0\ncomment synthetic\n");
        let _ = writeln!(s, "element vertex {}", points.len());
        s.push_str(
            "property float x\nproperty float y\nproperty float z\nproperty uchar red\n",
        );
        s.push_str("element face 1\nproperty list uchar int vertex_indices\nend_header\n");
        for p in points {
            let _ = writeln!(s, "{} {} {} 7", p[0], p[1], p[2]);
        }
        s.push_str("3 0 1 2\n");
        s.into_bytes()
    }

    fn binary_ply(points: &[[f32; 3]], big_endian: bool) -> Vec<u8> {
        let fmt = if big_endian { "binary_big_endian" } else { "binary_little_endian" };
        let mut out = format!(
            "ply\nformat {} 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n",
            fmt,
            points.len()
        )
        .into_bytes();
        for p in points {
            for c in p {
                if big_endian {
                    out.extend_from_slice(&c.to_be_bytes());
                } else {
                    out.extend_from_slice(&c.to_le_bytes());
                }
            }
            out.push(7);
        }
        // Trailing face element; the loader must stop before it.
        out.extend_from_slice(&[3, 0, 0, 0, 0]);
        out
    }

    #[test]
    fn ply_ascii_and_binary_agree() {
        let pts = [[0.0f32, 0.0, 0.0], [1.0, 0.25, -2.0], [0.0, 1.0, 0.5]];
        let dir = tempfile::tempdir().unwrap();
        let a = write_temp(&dir, "a.ply", &ascii_ply(&pts));
        let le = write_temp(&dir, "le.ply", &binary_ply(&pts, false));
        let be = write_temp(&dir, "be.ply", &binary_ply(&pts, true));
        let ca = load_point_cloud(&a).unwrap();
        let cle = load_point_cloud(&le).unwrap();
        let cbe = load_point_cloud(&be).unwrap();
        assert_eq!(ca, cle);
        assert_eq!(ca, cbe);
        assert_eq!(ca.len(), 3);
        assert_eq!(ca.point(1), [1.0, 0.25, -2.0]);
    }

    #[test]
    fn truncated_binary_ply_reports_byte_offset() {
        let pts = [[0.0f32, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let mut bytes = binary_ply(&pts, false);
        bytes.truncate(bytes.len() - 20);
        let dir = tempfile::tempdir().unwrap();
        let p = write_temp(&dir, "cut.ply", &bytes);
        assert!(matches!(
            load_point_cloud(&p),
            Err(IoError::BinaryParse { .. })
        ));
    }

    #[test]
    fn vertex_list_property_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let body = b"ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nproperty list uchar float weights\nend_header\n0 0 0 0\n";
        let p = write_temp(&dir, "list.ply", body);
        assert!(matches!(
            load_point_cloud(&p),
            Err(IoError::Unsupported(_))
        ));
    }

    #[test]
    fn exported_obj_round_trips_counts_and_coordinates() {
        let mesh = SurfaceMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.1234567890123456, 0.0, 1.0],
            ],
            vec![[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]],
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("shell.obj");
        fs::write(&path, obj_of(&mesh)).unwrap();
        let back = load_obj_mesh(&path).unwrap();
        assert_eq!(back.vertices.len(), mesh.vertices.len());
        assert_eq!(back.faces, mesh.faces);
        assert_eq!(back.vertices, mesh.vertices);
        assert!(back.manifold && back.closed);
    }
}
