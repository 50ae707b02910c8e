//! Wavefront OBJ surfaces: `v`, `vt` and `f` records. Polygonal faces are
//! fan-triangulated; UVs are kept per triangle corner.

use super::LoadError;
use crate::geometry::Point;
use crate::mesh::ReferenceSurface;

struct Corner {
    vertex: i64,
    uv: Option<i64>,
}

fn parse_corner(token: &str, line: usize) -> Result<Corner, LoadError> {
    let mut parts = token.split('/');
    let bad = || LoadError::parse(line, format!("malformed face corner `{token}`"));
    let vertex = parts.next().ok_or_else(bad)?.parse::<i64>().map_err(|_| bad())?;
    let uv = match parts.next() {
        Some("") | None => None,
        Some(t) => Some(t.parse::<i64>().map_err(|_| bad())?),
    };
    Ok(Corner { vertex, uv })
}

/// Resolves a 1-based (or negative, relative) OBJ index against `count`
/// records defined so far.
fn resolve(index: i64, count: usize) -> Option<usize> {
    if index > 0 {
        Some(index as usize - 1)
    } else if index < 0 && (-index) as usize <= count {
        Some((count as i64 + index) as usize)
    } else {
        None
    }
}

pub(super) fn parse(text: &str) -> Result<ReferenceSurface, LoadError> {
    let mut positions: Vec<Point> = Vec::new();
    let mut uvs: Vec<[f64; 2]> = Vec::new();
    // (vertex, uv) per triangle corner, as raw OBJ indices.
    let mut triangles: Vec<[(i64, Option<i64>); 3]> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut fields = body.split_whitespace();
        let Some(tag) = fields.next() else { continue };
        let number = |t: Option<&str>, what: &str| -> Result<f64, LoadError> {
            t.ok_or_else(|| LoadError::parse(line, format!("missing {what}")))?
                .parse::<f64>()
                .map_err(|_| LoadError::parse(line, format!("bad {what}")))
        };
        match tag {
            "v" => {
                let x = number(fields.next(), "x")?;
                let y = number(fields.next(), "y")?;
                let z = number(fields.next(), "z")?;
                positions.push(Point::new(x, y, z));
            }
            "vt" => {
                let u = number(fields.next(), "u")?;
                let v = fields.next().map_or(Ok(0.0), |t| number(Some(t), "v"))?;
                uvs.push([u, v]);
            }
            "f" => {
                let corners = fields.map(|t| parse_corner(t, line)).collect::<Result<Vec<_>, _>>()?;
                if corners.len() < 3 {
                    return Err(LoadError::parse(line, "face with fewer than 3 corners"));
                }
                // Relative indices refer to records defined before this line.
                let fix = |c: &Corner| -> Result<(i64, Option<i64>), LoadError> {
                    let v = resolve(c.vertex, positions.len()).map(|v| v as i64 + 1).unwrap_or(c.vertex);
                    let t = c.uv.map(|t| resolve(t, uvs.len()).map(|t| t as i64 + 1).unwrap_or(t));
                    Ok((v, t))
                };
                let fixed = corners.iter().map(fix).collect::<Result<Vec<_>, _>>()?;
                for k in 1..fixed.len() - 1 {
                    triangles.push([fixed[0], fixed[k], fixed[k + 1]]);
                }
            }
            // Groups, materials, normals and smoothing are irrelevant here.
            "vn" | "vp" | "g" | "o" | "s" | "usemtl" | "mtllib" | "l" | "p" => {}
            other => return Err(LoadError::parse(line, format!("unknown record `{other}`"))),
        }
    }

    let count = positions.len();
    let mut tris = Vec::with_capacity(triangles.len());
    for t in &triangles {
        let mut idx = [0usize; 3];
        for k in 0..3 {
            let raw = t[k].0;
            idx[k] = match resolve(raw, count) {
                Some(v) if v < count => v,
                _ => return Err(LoadError::DanglingFacetIndex { index: raw, count }),
            };
        }
        tris.push(idx);
    }
    let all_uv = !triangles.is_empty() && triangles.iter().all(|t| t.iter().all(|c| c.1.is_some()));
    let uv = if all_uv {
        let mut out = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let mut corner = [[0.0; 2]; 3];
            for k in 0..3 {
                let raw = t[k].1.unwrap_or(0);
                corner[k] = match resolve(raw, uvs.len()) {
                    Some(i) if i < uvs.len() => uvs[i],
                    _ => {
                        return Err(LoadError::DanglingFacetIndex {
                            index: raw,
                            count: uvs.len(),
                        })
                    }
                };
            }
            out.push(corner);
        }
        Some(out)
    } else {
        None
    };
    if tris.is_empty() {
        return Err(LoadError::NoCells("OBJ surface".into()));
    }
    Ok(ReferenceSurface::new(positions, tris, uv)?)
}
