//! INRIA MEDIT `.mesh` (ASCII).
//!
//! MEDIT numbers hexahedron corners bottom face first (1-2-3-4) then the top
//! face (5-6-7-8), with corner `k + 4` above corner `k`. That is the VTK
//! layout, so the permutation into the internal order is the identity. If
//! a dataset produces uniformly negative scaled Jacobians, its generator
//! used the opposite bottom-face winding; that is a property of the file and
//! is reported rather than silently flipped.

use super::tokens::Tokens;
use super::LoadError;
use crate::geometry::Point;
use crate::mesh::{CellKind, Mesh};

/// `vtk_corner[k] = medit_corner[MEDIT_HEX_TO_VTK[k]]`.
pub const MEDIT_HEX_TO_VTK: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

/// Number of integers per record (vertex ids plus the trailing reference).
fn element_record(keyword: &str) -> Option<usize> {
    Some(match keyword {
        "Edges" => 3,
        "Triangles" => 4,
        "Quadrilaterals" => 5,
        "Tetrahedra" => 5,
        "Prisms" => 7,
        "Pyramids" => 6,
        "Hexahedra" => 9,
        "Corners" | "RequiredVertices" | "Ridges" | "RequiredEdges" => 1,
        "NormalAtVertices" | "TangentAtVertices" => 2,
        _ => return None,
    })
}

fn to_zero_based(v: usize, count: usize, line: usize) -> Result<usize, LoadError> {
    if v == 0 || v > count {
        return Err(LoadError::parse(
            line,
            format!("vertex index {v} out of range 1..={count}"),
        ));
    }
    Ok(v - 1)
}

pub(super) fn parse_mesh(text: &str, name: &str) -> Result<Mesh, LoadError> {
    let mut tokens = Tokens::new(text, 0, Some('#'));
    let mut dimension: Option<usize> = None;
    let mut vertices: Vec<Point> = Vec::new();
    let mut hexes: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut quads: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut ended = false;

    while let Some((keyword, line)) = tokens.next() {
        match keyword {
            "MeshVersionFormatted" => {
                tokens.expect("version")?;
            }
            "Dimension" => {
                let d = tokens.usize("dimension")?;
                if d != 2 && d != 3 {
                    return Err(LoadError::parse(line, format!("dimension {d} is not 2 or 3")));
                }
                dimension = Some(d);
            }
            "Vertices" => {
                let d = dimension.ok_or_else(|| LoadError::parse(line, "Vertices before Dimension"))?;
                let n = tokens.usize("vertex count")?;
                vertices.reserve(n);
                for _ in 0..n {
                    let x = tokens.f64("x coordinate")?;
                    let y = tokens.f64("y coordinate")?;
                    let z = if d == 3 { tokens.f64("z coordinate")? } else { 0.0 };
                    tokens.i64("vertex reference")?;
                    vertices.push(Point::new(x, y, z));
                }
            }
            "Hexahedra" | "Quadrilaterals" => {
                let n = tokens.usize("element count")?;
                let arity = if keyword == "Hexahedra" { 8 } else { 4 };
                for _ in 0..n {
                    let line = tokens.line();
                    let mut ids = Vec::with_capacity(arity);
                    for _ in 0..arity {
                        ids.push(tokens.usize("vertex index")?);
                    }
                    tokens.i64("element reference")?;
                    if keyword == "Hexahedra" {
                        hexes.push((ids, line));
                    } else {
                        quads.push((ids, line));
                    }
                }
            }
            "Tetrahedra" | "Triangles" | "Prisms" | "Pyramids" => {
                let n = tokens.usize("element count")?;
                if n > 0 {
                    return Err(LoadError::UnsupportedCellType(format!("MEDIT {keyword} on line {line}")));
                }
            }
            "Normals" | "Tangents" => {
                let n = tokens.usize("record count")?;
                let d = dimension.unwrap_or(3);
                tokens.skip(n * d)?;
            }
            "End" => {
                ended = true;
                break;
            }
            other => match element_record(other) {
                Some(per) => {
                    let n = tokens.usize("record count")?;
                    tokens.skip(n * per)?;
                }
                None => return Err(LoadError::parse(line, format!("unknown keyword `{other}`"))),
            },
        }
    }
    if !ended {
        return Err(LoadError::parse(tokens.line(), "missing End"));
    }

    let count = vertices.len();
    // Hex files often carry their boundary quads as annotations.
    let (kind, records) = if !hexes.is_empty() {
        (CellKind::Hex, hexes)
    } else if !quads.is_empty() {
        (CellKind::Quad, quads)
    } else {
        return Err(LoadError::NoCells(name.to_string()));
    };
    let mut connectivity = Vec::with_capacity(records.len() * kind.arity());
    for (ids, line) in records {
        let zero: Vec<usize> = ids
            .iter()
            .map(|&v| to_zero_based(v, count, line))
            .collect::<Result<_, _>>()?;
        if kind == CellKind::Hex {
            connectivity.extend(MEDIT_HEX_TO_VTK.iter().map(|&k| zero[k]));
        } else {
            connectivity.extend(zero);
        }
    }
    Ok(Mesh::new(name, kind, vertices, connectivity)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_quads_one_based() {
        let text = "MeshVersionFormatted 2
Dimension 2
Vertices
6
0 0 0
1 0 0
2 0 0
0 1 0
1 1 0
2 1 0
# comment line
Quadrilaterals 2
1 2 5 4 0
2 3 6 5 0
End
";
        let m = parse_mesh(text, "q").unwrap();
        assert_eq!(m.dimension(), 2);
        assert_eq!(m.cell_count(), 2);
        assert_eq!(m.cell(0), &[0, 1, 4, 3]);
    }

    #[test]
    fn hex_with_boundary_annotations() {
        let text = "MeshVersionFormatted 1
Dimension
3
Vertices
8
0 0 0 1
1 0 0 1
1 1 0 1
0 1 0 1
0 0 1 1
1 0 1 1
1 1 1 1
0 1 1 1
Corners 1 1
Quadrilaterals 1
1 2 3 4 7
Hexahedra 1
1 2 3 4 5 6 7 8 0
End
";
        let m = parse_mesh(text, "h").unwrap();
        assert_eq!(m.kind(), CellKind::Hex);
        assert_eq!(m.cell(0), &[0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn tetrahedra_unsupported() {
        let text = "MeshVersionFormatted 1
Dimension 3
Vertices 4
0 0 0 0
1 0 0 0
0 1 0 0
0 0 1 0
Tetrahedra 1
1 2 3 4 0
End
";
        let err = parse_mesh(text, "t").unwrap_err();
        assert!(err.to_string().contains("unsupported cell type"));
    }

    #[test]
    fn zero_index_rejected() {
        let text = "MeshVersionFormatted 1
Dimension 2
Vertices 4
0 0 0
1 0 0
1 1 0
0 1 0
Quadrilaterals 1
0 1 2 3 0
End
";
        assert!(matches!(parse_mesh(text, "z").unwrap_err(), LoadError::Parse { line: 9, .. }));
    }
}
