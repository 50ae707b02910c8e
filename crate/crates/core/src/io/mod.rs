//! Mesh readers (VTK legacy ASCII, MEDIT `.mesh`), the OBJ/VTK reference
//! surface reader, and a VTK writer for debugging.

mod medit;
mod obj;
mod tokens;
mod vtk;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::mesh::{Mesh, MeshError, ReferenceSurface};

pub use medit::MEDIT_HEX_TO_VTK;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported cell type: {0}")]
    UnsupportedCellType(String),
    #[error("mixed-arity cells: {0}")]
    MixedArity(String),
    #[error("dangling facet index {index} (surface has {count} vertices)")]
    DanglingFacetIndex { index: i64, count: usize },
    #[error("cannot infer the format of {0}; pass it explicitly")]
    UnknownFormat(PathBuf),
    #[error("{0} holds no cells")]
    NoCells(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl LoadError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        LoadError::Parse {
            line,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    VtkLegacy,
    Medit,
    Auto,
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vtk" | "vtk-legacy" | "vtk-legacy-ascii" => Ok(MeshFormat::VtkLegacy),
            "medit" | "mesh" | "medit-mesh" => Ok(MeshFormat::Medit),
            "auto" => Ok(MeshFormat::Auto),
            other => Err(format!("unknown mesh format `{other}` (expected vtk, medit or auto)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceFormat {
    Obj,
    VtkLegacy,
    Auto,
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// File stem used as the mesh label.
pub fn mesh_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("mesh")
        .to_string()
}

pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<Mesh, LoadError> {
    let path = path.as_ref();
    let format = match format {
        MeshFormat::Auto => match extension(path).as_str() {
            "vtk" => MeshFormat::VtkLegacy,
            "mesh" => MeshFormat::Medit,
            _ => return Err(LoadError::UnknownFormat(path.to_path_buf())),
        },
        f => f,
    };
    let text = read(path)?;
    parse_mesh(&text, &mesh_name(path), format)
}

/// Parses mesh text in an explicit format (`Auto` sniffs the header).
pub fn parse_mesh(text: &str, name: &str, format: MeshFormat) -> Result<Mesh, LoadError> {
    match format {
        MeshFormat::VtkLegacy => vtk::parse_mesh(text, name),
        MeshFormat::Medit => medit::parse_mesh(text, name),
        MeshFormat::Auto => {
            if text.trim_start().starts_with("# vtk") {
                vtk::parse_mesh(text, name)
            } else {
                medit::parse_mesh(text, name)
            }
        }
    }
}

pub fn load_reference_surface(path: impl AsRef<Path>, format: SurfaceFormat) -> Result<ReferenceSurface, LoadError> {
    let path = path.as_ref();
    let format = match format {
        SurfaceFormat::Auto => match extension(path).as_str() {
            "obj" => SurfaceFormat::Obj,
            "vtk" => SurfaceFormat::VtkLegacy,
            _ => return Err(LoadError::UnknownFormat(path.to_path_buf())),
        },
        f => f,
    };
    let text = read(path)?;
    parse_reference_surface(&text, format)
}

pub fn parse_reference_surface(text: &str, format: SurfaceFormat) -> Result<ReferenceSurface, LoadError> {
    match format {
        SurfaceFormat::Obj => obj::parse(text),
        SurfaceFormat::VtkLegacy => vtk::parse_surface(text),
        SurfaceFormat::Auto => {
            if text.trim_start().starts_with("# vtk") {
                vtk::parse_surface(text)
            } else {
                obj::parse(text)
            }
        }
    }
}

/// Serializes a mesh as legacy ASCII VTK. Coordinates use the shortest
/// representation that parses back to the same `f64`.
pub fn write_vtk(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "{}", mesh.name());
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", mesh.vertex_count());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?} {:?}", p.x, p.y, p.z);
    }
    let arity = mesh.arity();
    let _ = writeln!(out, "CELLS {} {}", mesh.cell_count(), mesh.cell_count() * (arity + 1));
    for cell in mesh.cells() {
        let _ = write!(out, "{arity}");
        for v in cell {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    let ty = match mesh.kind() {
        crate::mesh::CellKind::Hex => 12,
        crate::mesh::CellKind::Quad => 9,
    };
    let _ = writeln!(out, "CELL_TYPES {}", mesh.cell_count());
    for _ in 0..mesh.cell_count() {
        let _ = writeln!(out, "{ty}");
    }
    out
}
