//! Legacy ASCII VTK (`DATASET UNSTRUCTURED_GRID` / `POLYDATA`).

use super::tokens::Tokens;
use super::LoadError;
use crate::geometry::Point;
use crate::mesh::{CellKind, Mesh, ReferenceSurface};

const VTK_TRIANGLE: u32 = 5;
const VTK_POLYGON: u32 = 7;
const VTK_QUAD: u32 = 9;
const VTK_HEXAHEDRON: u32 = 12;

struct VtkData {
    dataset: String,
    points: Vec<Point>,
    /// Connectivity records and the line each started on.
    cells: Vec<(Vec<usize>, usize)>,
    types: Option<Vec<u32>>,
}

fn cell_type_name(t: u32) -> &'static str {
    match t {
        1 => "vertex",
        3 => "line",
        5 => "triangle",
        7 => "polygon",
        8 => "pixel",
        9 => "quad",
        10 => "tetra",
        11 => "voxel",
        12 => "hexahedron",
        13 => "wedge",
        14 => "pyramid",
        _ => "non-linear or unknown",
    }
}

fn read(text: &str) -> Result<VtkData, LoadError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if !header.trim_start().starts_with("# vtk DataFile") {
        return Err(LoadError::parse(1, "missing `# vtk DataFile` header"));
    }
    let _title = lines.next();
    match lines.next().map(str::trim) {
        Some(enc) if enc.eq_ignore_ascii_case("ASCII") => {}
        Some(enc) if enc.eq_ignore_ascii_case("BINARY") => {
            return Err(LoadError::parse(3, "binary VTK is not supported"));
        }
        _ => return Err(LoadError::parse(3, "expected `ASCII`")),
    }

    let mut tokens = Tokens::new(text, 3, None);
    let mut data = VtkData {
        dataset: String::new(),
        points: Vec::new(),
        cells: Vec::new(),
        types: None,
    };
    while let Some((keyword, line)) = tokens.next() {
        match keyword.to_ascii_uppercase().as_str() {
            "DATASET" => {
                let (kind, line) = tokens.expect("dataset type")?;
                let kind = kind.to_ascii_uppercase();
                if kind != "UNSTRUCTURED_GRID" && kind != "POLYDATA" {
                    return Err(LoadError::parse(line, format!("unsupported dataset `{kind}`")));
                }
                data.dataset = kind;
            }
            "POINTS" => {
                let n = tokens.usize("point count")?;
                tokens.expect("point data type")?;
                data.points.reserve(n);
                for _ in 0..n {
                    let x = tokens.f64("x coordinate")?;
                    let y = tokens.f64("y coordinate")?;
                    let z = tokens.f64("z coordinate")?;
                    data.points.push(Point::new(x, y, z));
                }
            }
            "CELLS" | "POLYGONS" => data.cells.extend(read_cells(&mut tokens)?),
            "VERTICES" | "LINES" | "TRIANGLE_STRIPS" => {
                // Not part of a hex/quad mesh or a facet surface.
                read_cells(&mut tokens)?;
            }
            "CELL_TYPES" => {
                let n = tokens.usize("cell type count")?;
                let mut types = Vec::with_capacity(n);
                for _ in 0..n {
                    let t = tokens.usize("cell type")?;
                    types.push(t as u32);
                }
                data.types = Some(types);
            }
            // Attribute sections are not needed.
            "POINT_DATA" | "CELL_DATA" | "FIELD" | "METADATA" => break,
            other => return Err(LoadError::parse(line, format!("unknown keyword `{other}`"))),
        }
    }
    if data.dataset.is_empty() {
        return Err(LoadError::parse(tokens.line(), "missing DATASET"));
    }
    Ok(data)
}

/// Reads a `CELLS`/`POLYGONS` block in either the classic layout
/// (`n size` then `count ids...` records) or the 5.1 OFFSETS/CONNECTIVITY
/// layout.
fn read_cells(tokens: &mut Tokens<'_>) -> Result<Vec<(Vec<usize>, usize)>, LoadError> {
    let n = tokens.usize("cell count")?;
    let size = tokens.usize("cell list size")?;
    if tokens.peek().is_some_and(|t| t.eq_ignore_ascii_case("OFFSETS")) {
        tokens.next();
        tokens.expect("offset data type")?;
        let line = tokens.line();
        let offsets = (0..n).map(|_| tokens.usize("offset")).collect::<Result<Vec<_>, _>>()?;
        let (kw, kw_line) = tokens.expect("CONNECTIVITY")?;
        if !kw.eq_ignore_ascii_case("CONNECTIVITY") {
            return Err(LoadError::parse(kw_line, format!("expected CONNECTIVITY, found `{kw}`")));
        }
        tokens.expect("connectivity data type")?;
        let conn = (0..size).map(|_| tokens.usize("vertex index")).collect::<Result<Vec<_>, _>>()?;
        let mut cells = Vec::with_capacity(n.saturating_sub(1));
        for w in offsets.windows(2) {
            if w[0] > w[1] || w[1] > conn.len() {
                return Err(LoadError::parse(line, "offsets are not monotone within the connectivity array"));
            }
            cells.push((conn[w[0]..w[1]].to_vec(), line));
        }
        return Ok(cells);
    }
    let mut cells = Vec::with_capacity(n);
    let mut consumed = 0;
    for _ in 0..n {
        let line = tokens.line();
        let count = tokens.usize("vertex count")?;
        let ids = (0..count).map(|_| tokens.usize("vertex index")).collect::<Result<Vec<_>, _>>()?;
        consumed += count + 1;
        cells.push((ids, line));
    }
    if consumed != size {
        return Err(LoadError::parse(
            tokens.line(),
            format!("cell list size {size} does not match the {consumed} values read"),
        ));
    }
    Ok(cells)
}

pub(super) fn parse_mesh(text: &str, name: &str) -> Result<Mesh, LoadError> {
    let data = read(text)?;
    if data.dataset != "UNSTRUCTURED_GRID" {
        return Err(LoadError::parse(4, "volume and quad meshes must be UNSTRUCTURED_GRID"));
    }
    let types = data
        .types
        .ok_or_else(|| LoadError::parse(text.lines().count(), "missing CELL_TYPES"))?;
    if types.len() != data.cells.len() {
        return Err(LoadError::parse(
            text.lines().count(),
            format!("{} cell types for {} cells", types.len(), data.cells.len()),
        ));
    }
    let mut kind: Option<CellKind> = None;
    let mut connectivity = Vec::new();
    for ((ids, line), &t) in data.cells.iter().zip(&types) {
        let this = match t {
            VTK_HEXAHEDRON => CellKind::Hex,
            VTK_QUAD => CellKind::Quad,
            other => {
                return Err(LoadError::UnsupportedCellType(format!(
                    "VTK type {other} ({}) on line {line}",
                    cell_type_name(other)
                )))
            }
        };
        match kind {
            None => kind = Some(this),
            Some(k) if k != this => {
                return Err(LoadError::MixedArity(format!(
                    "{k:?} and {this:?} cells in one file (line {line})"
                )))
            }
            _ => {}
        }
        if ids.len() != this.arity() {
            return Err(LoadError::parse(
                *line,
                format!("{this:?} cell lists {} vertices, expected {}", ids.len(), this.arity()),
            ));
        }
        connectivity.extend_from_slice(ids);
    }
    let kind = kind.ok_or_else(|| LoadError::NoCells(name.to_string()))?;
    Ok(Mesh::new(name, kind, data.points, connectivity)?)
}

pub(super) fn parse_surface(text: &str) -> Result<ReferenceSurface, LoadError> {
    let data = read(text)?;
    let count = data.points.len();
    let mut triangles = Vec::new();
    for (i, (ids, line)) in data.cells.iter().enumerate() {
        if let Some(types) = &data.types {
            let t = types.get(i).copied().unwrap_or(0);
            if !matches!(t, VTK_TRIANGLE | VTK_QUAD | VTK_POLYGON) {
                return Err(LoadError::UnsupportedCellType(format!(
                    "VTK type {t} ({}) on line {line} in a reference surface",
                    cell_type_name(t)
                )));
            }
        }
        if ids.len() < 3 {
            return Err(LoadError::parse(*line, "facet with fewer than 3 vertices"));
        }
        if let Some(&bad) = ids.iter().find(|&&v| v >= count) {
            return Err(LoadError::DanglingFacetIndex {
                index: bad as i64,
                count,
            });
        }
        for k in 1..ids.len() - 1 {
            triangles.push([ids[0], ids[k], ids[k + 1]]);
        }
    }
    if triangles.is_empty() {
        return Err(LoadError::NoCells("reference surface".into()));
    }
    Ok(ReferenceSurface::new(data.points, triangles, None)?)
}
