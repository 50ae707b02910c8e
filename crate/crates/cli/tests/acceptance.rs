//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hqview_core::analysis::{analyze, analyze_boundary, AnalysisOptions, BoundaryReference};
use hqview_core::boundary::{extract_boundary_2d, SignMode};
use hqview_core::features::filter_feature_edges;
use hqview_core::geometry::{Point, Vector};
use hqview_core::glyph::{build_glyphs, cluster_glyphs, default_params, Glyph, UnionFind};
use hqview_core::io::write_vtk;
use hqview_core::mesh::{HEX_EDGES, HEX_FACES, QUAD_EDGES};
use hqview_core::overlap::{
    detect_overlaps, is_overlapping_cell, place_arrows, point_in_hex, ArrowSource, ArrowTarget,
    DEFAULT_EPSILON_REL,
};
use hqview_core::quality::{compute_quality_field, corner_scaled_jacobian};
use hqview_core::scene::{CompareDocument, SceneDocument};
use hqview_core::synthetic::{degrade, hex_grid, holed_quad_grid, quad_grid};
use hqview_core::{Adjacency, CellKind, Mesh};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn unit_cube(transform: impl Fn(Point) -> Point) -> Mesh {
    hex_grid(1, 1, 1, 1.0).map_vertices(|p| transform(*p)).unwrap()
}

fn all_corners(mesh: &Mesh) -> Vec<f64> {
    (0..mesh.cell_count())
        .flat_map(|c| (0..mesh.arity()).map(move |k| corner_scaled_jacobian(mesh, c, k).unwrap()))
        .collect()
}

fn metric_correctness() -> Outcome {
    let start = Instant::now();
    let cube = unit_cube(|p| p);
    let corners = all_corners(&cube);
    ensure!(corners.len() == 8, "expected 8 corners, got {}", corners.len());
    ensure!(corners.iter().all(|&j| within(j, 1.0, 1e-12)), "unit cube corners {corners:?}");
    let field = compute_quality_field(&cube, &Adjacency::build(&cube));
    ensure!(field.vertex_quality().iter().all(|&j| within(j, 1.0, 1e-12)), "unit cube J_m");

    let mirrored = unit_cube(|p| Point::new(-p.x, p.y, p.z));
    let corners = all_corners(&mirrored);
    ensure!(corners.iter().all(|&j| within(j, -1.0, 1e-12)), "mirrored corners {corners:?}");

    // Top face sheared by +1 in x: corner 0 sees edges (1,0,0), (0,1,0), (1,0,1).
    let sheared = unit_cube(|p| Point::new(p.x + p.z, p.y, p.z));
    let e1 = Vector::new(1.0, 0.0, 0.0);
    let e2 = Vector::new(0.0, 1.0, 0.0);
    let e3 = Vector::new(1.0, 0.0, 1.0) / 2f64.sqrt();
    let oracle = e1.x * (e2.y * e3.z - e2.z * e3.y) - e1.y * (e2.x * e3.z - e2.z * e3.x)
        + e1.z * (e2.x * e3.y - e2.y * e3.x);
    let j = corner_scaled_jacobian(&sheared, 0, 0).unwrap();
    ensure!(within(j, oracle, 1e-12), "sheared corner {j} vs {oracle}");
    ensure!(within(j, 1.0 / 2f64.sqrt(), 1e-12), "sheared corner {j} vs 1/sqrt(2)");

    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("cube 1.0, mirrored -1.0, sheared {j} in {elapsed:?}"))
}

fn oracle_average_edge(mesh: &Mesh) -> f64 {
    let table: &[[usize; 2]] = match mesh.kind() {
        CellKind::Hex => &HEX_EDGES,
        CellKind::Quad => &QUAD_EDGES,
    };
    let mut edges = BTreeSet::new();
    for cell in mesh.cells() {
        for [a, b] in table {
            let (u, v) = (cell[*a], cell[*b]);
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let total: f64 = edges.iter().map(|&(u, v)| (mesh.vertex(u) - mesh.vertex(v)).norm()).sum();
    total / edges.len() as f64
}

fn glyph_formula() -> Outcome {
    let expected = [(-1.0, 1.0), (-0.5, 0.75), (0.0, 0.5), (0.5, 0.25), (1.0, 0.0)];
    for (q, r) in expected {
        let g = Glyph::new(0, Point::origin(), q, 0.5);
        ensure!(g.radius == r, "J_m {q}: radius {} expected {r}", g.radius);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10 {
        let spacing = rng.gen_range(0.1..10.0);
        let mesh = if trial % 2 == 0 {
            hex_grid(rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(1..5), spacing)
        } else {
            quad_grid(rng.gen_range(1..8), rng.gen_range(1..8), spacing)
        };
        let (mesh, _) = degrade(&mesh, 0.5, 0.3 * spacing, rng.gen());
        let params = default_params(&Adjacency::build(&mesh)).map_err(|e| e.to_string())?;
        let r_max = 0.5 * oracle_average_edge(&mesh);
        ensure!(within(params.r_max, r_max, 1e-12), "trial {trial}: r_max {} vs {r_max}", params.r_max);
        ensure!(
            within(params.r_dmin, 0.1 * r_max, 1e-12),
            "trial {trial}: r_dmin {} vs {}",
            params.r_dmin,
            0.1 * r_max
        );
    }
    Ok("radii {1, 0.75, 0.5, 0.25, 0} exact; defaults match on 10 meshes".into())
}

fn partition(groups: impl IntoIterator<Item = Vec<usize>>) -> BTreeSet<Vec<usize>> {
    groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect()
}

fn brute_force(glyphs: &[Glyph]) -> BTreeSet<Vec<usize>> {
    let mut uf = UnionFind::new(glyphs.len());
    for i in 0..glyphs.len() {
        for j in i + 1..glyphs.len() {
            if glyphs[i].radius + glyphs[j].radius > (glyphs[i].center - glyphs[j].center).norm() {
                uf.union(i, j);
            }
        }
    }
    partition(uf.groups().into_iter().map(|g| g.into_iter().map(|i| glyphs[i].vertex).collect()))
}

fn clustering_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut merged = 0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=500);
        let side = rng.gen_range(2.0..20.0);
        let samples: Vec<(Point, f64)> = (0..n)
            .map(|_| {
                (
                    Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side), rng.gen_range(0.0..side)),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let r_max = rng.gen_range(0.05..1.0);
        let make = |r: f64| -> Vec<Glyph> {
            samples
                .iter()
                .enumerate()
                .map(|(v, (p, q))| Glyph::new(v, *p, *q, r))
                .collect()
        };
        let glyphs = make(r_max);
        let fast = cluster_glyphs(&glyphs);
        let fast_partition = partition(fast.iter().map(|c| c.members.clone()));
        ensure!(fast_partition == brute_force(&glyphs), "trial {trial}: partition differs");
        merged += n - fast.len();

        let grown = cluster_glyphs(&make(r_max * rng.gen_range(1.0..2.0)));
        for c in &fast {
            let owner = grown
                .iter()
                .find(|g| g.members.binary_search(&c.members[0]).is_ok())
                .ok_or(format!("trial {trial}: member lost"))?;
            ensure!(
                c.members.iter().all(|m| owner.members.binary_search(m).is_ok()),
                "trial {trial}: cluster split when r_max grew"
            );
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("100 sets identical to brute force, monotone ({merged} merges) in {elapsed:?}"))
}

fn performance() -> Outcome {
    let grid = hex_grid(50, 50, 10, 1.0);
    let (mesh, moved) = degrade(&grid, 0.05, 0.45, 2024);
    let cells = mesh.cell_count();
    ensure!(cells == 25_000, "grid has {cells} cells");
    let start = Instant::now();
    let adj = Adjacency::build(&mesh);
    let field = compute_quality_field(&mesh, &adj);
    let params = default_params(&adj).map_err(|e| e.to_string())?;
    let glyphs = build_glyphs(&field, &mesh, params);
    let clusters = cluster_glyphs(&glyphs.displayed());
    let elapsed = start.elapsed();
    ensure!(elapsed <= Duration::from_secs(180), "aggregated glyphs took {elapsed:?}");
    let target = if elapsed <= Duration::from_secs(5) { "within" } else { "over" };
    Ok(format!(
        "{cells} hexes, {} degraded vertices, {} displayed glyphs, {} clusters in {elapsed:?} ({target} the 5 s target)",
        moved.len(),
        glyphs.displayed_ids().len(),
        clusters.len()
    ))
}

fn feature_edges() -> Outcome {
    let (mesh, _) = degrade(&hex_grid(6, 6, 4, 1.0), 0.3, 0.45, 77);
    let adj = Adjacency::build(&mesh);
    let field = compute_quality_field(&mesh, &adj);
    let mut previous: Option<BTreeSet<usize>> = None;
    for k in 0..20 {
        let t = -1.0 + 2.2 * k as f64 / 19.0;
        let set: BTreeSet<usize> = filter_feature_edges(&adj, &field, t).emphasized.into_iter().collect();
        if let Some(p) = &previous {
            ensure!(p.is_subset(&set), "threshold {t}: emphasized set is not a superset");
        }
        previous = Some(set);
    }
    let mut defaults = Vec::new();
    for (fraction, amplitude) in [(0.3, 0.45), (1.0, 0.6)] {
        let (mesh, _) = degrade(&hex_grid(6, 6, 4, 1.0), fraction, amplitude, 78);
        let adj = Adjacency::build(&mesh);
        let mut q = compute_quality_field(&mesh, &adj).vertex_quality().to_vec();
        q.sort_by(f64::total_cmp);
        let n = q.len();
        let q_m = if n % 2 == 1 { q[n / 2] } else { 0.5 * (q[n / 2 - 1] + q[n / 2]) };
        let a = analyze(mesh, &AnalysisOptions::default()).map_err(|e| e.to_string())?;
        let expected = (0.2 + q_m).min(1.0);
        ensure!(a.params.e_qmax == expected, "default e_qmax {} vs {expected}", a.params.e_qmax);
        defaults.push(expected);
    }
    ensure!(defaults.iter().any(|&d| d < 1.0), "no fixture exercises the unclamped default");
    Ok(format!("20 nested thresholds; defaults {defaults:?} equal min(0.2 + q_m, 1)"))
}

/// Hex from a corner and three edge vectors.
fn parallelepiped(p: Point, u: Vector, v: Vector, w: Vector) -> [Point; 8] {
    [p, p + u, p + u + v, p + v, p + w, p + u + w, p + u + v + w, p + v + w]
}

fn overlap_fixture() -> Mesh {
    let cube = |o: Vector| parallelepiped(Point::origin() + o, Vector::x(), Vector::y(), Vector::z());
    let a = cube(Vector::zeros());
    // Thin hex whose first corner sits at the centroid of `a`.
    let needle = parallelepiped(
        Point::new(0.5, 0.5, 0.5),
        Vector::new(3.0, 0.0, 0.0),
        Vector::new(3.0, 0.3, 0.0),
        Vector::new(3.0, 0.0, 0.3),
    );
    let b = cube(Vector::new(20.0, 0.0, 0.0));
    // Touches `b` at a single corner through a distinct vertex.
    let c = cube(Vector::new(21.0, 1.0, 1.0));
    let vertices: Vec<Point> = [a, needle, b, c].concat();
    let cells: Vec<usize> = (0..32).collect();
    Mesh::new("overlap", CellKind::Hex, vertices, cells).unwrap()
}

fn overlap_detection() -> Outcome {
    let mesh = overlap_fixture();
    let adj = Adjacency::build(&mesh);
    let report = detect_overlaps(&mesh, &adj, DEFAULT_EPSILON_REL);
    let pairs: Vec<(usize, usize)> = report.vertex_pairs.iter().map(|p| (p.a, p.b)).collect();
    let containments: Vec<(usize, usize)> = report.containments.iter().map(|c| (c.vertex, c.cell)).collect();
    ensure!(pairs == vec![(22, 24)], "vertex pairs {pairs:?}");
    ensure!(containments == vec![(8, 0)], "containments {containments:?}");

    let eps = DEFAULT_EPSILON_REL * adj.diagonal();
    let mut brute_pairs = Vec::new();
    let mut brute_cells = Vec::new();
    for v in 0..mesh.vertex_count() {
        for u in v + 1..mesh.vertex_count() {
            if (mesh.vertex(u) - mesh.vertex(v)).norm() < eps {
                brute_pairs.push((v, u));
            }
        }
        for c in 0..mesh.cell_count() {
            if is_overlapping_cell(&mesh, v, c, eps) {
                brute_cells.push((v, c));
            }
        }
    }
    ensure!(brute_pairs == pairs, "brute-force pairs {brute_pairs:?}");
    ensure!(brute_cells == containments, "brute-force containments {brute_cells:?}");
    ensure!(report.arrows.len() == 3, "{} arrows", report.arrows.len());

    for n in 1..=8usize {
        let targets: Vec<ArrowTarget> = (0..n)
            .map(|k| ArrowTarget {
                vertex: 0,
                source: ArrowSource::Containment { cell: k },
            })
            .collect();
        let arrows = place_arrows(&targets, &Default::default());
        for (k, a) in arrows.iter().enumerate() {
            let expected = k as f64 * 360.0 / n as f64;
            ensure!(a.angle_degrees == expected, "n={n} k={k}: {} vs {expected}", a.angle_degrees);
            let (s, c) = expected.to_radians().sin_cos();
            ensure!(
                within(a.direction[0], c, 1e-15) && within(a.direction[1], s, 1e-15) && a.direction[2] == 0.0,
                "n={n} k={k}: direction {:?}",
                a.direction
            );
        }
    }
    Ok("1 coincident pair + 1 centroid containment, matches brute force; arrow angles k*360/n for n=1..8".into())
}

/// Unit cube under a random projective map that stays positive on the
/// cube, so the image is a convex hex with planar faces.
fn random_convex_hex(rng: &mut ChaCha8Rng) -> [Point; 8] {
    loop {
        let mut col = |axis: Vector| axis + Vector::from_fn(|_, _| rng.gen_range(-0.6..0.6));
        let m = [col(Vector::x()), col(Vector::y()), col(Vector::z())];
        if m[0].dot(&m[1].cross(&m[2])).abs() < 0.1 {
            continue;
        }
        let t = Vector::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let c = Vector::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
        let cube = parallelepiped(Point::origin(), Vector::x(), Vector::y(), Vector::z());
        if cube.iter().any(|p| 1.0 + c.dot(&p.coords) < 0.2) {
            continue;
        }
        return cube.map(|p| Point::from((m[0] * p.x + m[1] * p.y + m[2] * p.z + t) / (1.0 + c.dot(&p.coords))));
    }
}

/// Inside test against the six face planes, plus the distance to the
/// nearest plane.
fn facet_oracle(hex: &[Point; 8], p: &Point) -> (bool, f64) {
    let centroid = Point::from(hex.iter().fold(Vector::zeros(), |a, q| a + q.coords) / 8.0);
    let mut inside = true;
    let mut nearest = f64::INFINITY;
    for f in HEX_FACES {
        let q = f.map(|i| hex[i]);
        let n = (q[2] - q[0]).cross(&(q[3] - q[1])).normalize();
        let fc = Point::from((q[0].coords + q[1].coords + q[2].coords + q[3].coords) / 4.0);
        let side = (centroid - fc).dot(&n).signum();
        let d = (p - fc).dot(&n) * side;
        inside &= d > 0.0;
        nearest = nearest.min(d.abs());
    }
    (inside, nearest)
}

fn point_in_hex_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut total, mut inside_count) = (0usize, 0usize, 0usize);
    while total < 10_000 {
        let hex = random_convex_hex(&mut rng);
        let mesh = Mesh::new("h", CellKind::Hex, hex.to_vec(), (0..8).collect()).map_err(|e| e.to_string())?;
        let b = mesh.bounds();
        let (lo, ext) = (b.min - b.extent() * 0.1, b.extent() * 1.2);
        let p = Point::new(
            lo.x + rng.gen::<f64>() * ext.x,
            lo.y + rng.gen::<f64>() * ext.y,
            lo.z + rng.gen::<f64>() * ext.z,
        );
        let (inside, distance) = facet_oracle(&hex, &p);
        if distance < 1e-6 {
            continue;
        }
        total += 1;
        inside_count += usize::from(inside);
        agree += usize::from(point_in_hex(&p, &mesh, 0) == inside);
    }
    let rate = agree as f64 / total as f64;
    ensure!(rate >= 0.999, "agreement {rate} over {total} pairs");
    Ok(format!("{agree}/{total} agree ({inside_count} inside)"))
}

fn boundary(mesh: &Mesh, reference: &Mesh, mode: SignMode) -> Result<hqview_core::analysis::BoundaryAnalysis, String> {
    analyze_boundary(mesh, &Adjacency::build(mesh), &BoundaryReference::Mesh(reference.clone()), mode)
        .map_err(|e| e.to_string())
}

fn moved(mesh: &Mesh, v: usize, to: Point) -> Mesh {
    let from = *mesh.vertex(v);
    mesh.map_vertices(|p| if *p == from { to } else { *p }).unwrap()
}

fn error_at(b: &hqview_core::analysis::BoundaryAnalysis, v: usize) -> Result<f64, String> {
    b.records
        .iter()
        .find(|r| r.vertex == v)
        .map(|r| r.error)
        .ok_or(format!("no record for vertex {v}"))
}

fn boundary_error() -> Outcome {
    for reference in [quad_grid(3, 2, 1.0), hex_grid(2, 2, 2, 1.0)] {
        let b = boundary(&reference, &reference, SignMode::Signed)?;
        ensure!(b.records.iter().all(|r| r.error.abs() <= 1e-12), "identity case is not zero");
    }

    let square = quad_grid(2, 2, 0.5);
    let v = 5;
    ensure!(*square.vertex(v) == Point::new(1.0, 0.5, 0.0), "fixture vertex");
    let expected = 0.1 / 2f64.sqrt();
    for (x, sign) in [(1.1, 1.0), (0.9, -1.0)] {
        let e = error_at(&boundary(&moved(&square, v, Point::new(x, 0.5, 0.0)), &square, SignMode::Signed)?, v)?;
        ensure!(within(e, sign * expected, 1e-12), "square x={x}: {e}");
    }

    let cube = hex_grid(2, 2, 2, 0.5);
    let top = 22;
    ensure!(*cube.vertex(top) == Point::new(0.5, 0.5, 1.0), "fixture vertex");
    for (z, expected) in [(1.2, 0.2 / 3f64.sqrt()), (0.5, -0.5 / 3f64.sqrt())] {
        let e = error_at(&boundary(&moved(&cube, top, Point::new(0.5, 0.5, z)), &cube, SignMode::Signed)?, top)?;
        ensure!(within(e, expected, 1e-9), "cube z={z}: {e} vs {expected}");
    }

    for mesh in [quad_grid(3, 3, 1.0), hex_grid(2, 2, 2, 1.0)] {
        let c = mesh.bounds().center();
        for (s, outside) in [(0.9, true), (1.1, false)] {
            let reference = mesh.map_vertices(|p| c + (p - c) * s).unwrap();
            let b = boundary(&mesh, &reference, SignMode::Signed)?;
            ensure!(
                b.records.iter().all(|r| if outside { r.error > 0.0 } else { r.error < 0.0 }),
                "reference scale {s}: signs are not uniform"
            );
        }
    }

    let (noisy, _) = degrade(&hex_grid(3, 3, 3, 1.0), 0.4, 0.2, 3);
    let reference = hex_grid(3, 3, 3, 1.0);
    let base = boundary(&noisy, &reference, SignMode::Signed)?;
    for s in [0.001, 7.5, 1000.0] {
        let scaled = boundary(
            &noisy.map_vertices(|p| p * s).unwrap(),
            &reference.map_vertices(|p| p * s).unwrap(),
            SignMode::Signed,
        )?;
        for (a, b) in base.records.iter().zip(&scaled.records) {
            ensure!(within(a.error, b.error, 1e-9), "scale {s}: vertex {} {} vs {}", a.vertex, a.error, b.error);
        }
    }

    let holed = holed_quad_grid(3, 3, 1.0, &[], &[(0, 0), (2, 2)]);
    let loops = extract_boundary_2d(&holed, &Adjacency::build(&holed)).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = loops.iter().map(|l| l.vertices.len()).collect();
    ensure!(sizes == vec![12, 4, 4], "loop sizes {sizes:?}");
    Ok("identity 0, square ±0.1/√2, cube +0.2/√3 and -0.5/√3, sign flips at 0.9/1.1, scale invariant, loops {12, 4, 4}".into())
}

fn hqview(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_hqview"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn run_ok(args: &[&str]) -> Result<(), String> {
    let out = hqview(args)?;
    ensure!(
        out.status.success(),
        "`hqview {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn cli_scene() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (mesh, _) = degrade(&hex_grid(4, 3, 3, 1.0), 0.3, 0.4, 9);
    let mesh_path = dir.path().join("model.vtk");
    fs::write(&mesh_path, write_vtk(&mesh)).map_err(|e| e.to_string())?;
    let (s1, s2) = (dir.path().join("s1.json"), dir.path().join("s2.json"));
    run_ok(&["analyze", "--mesh", path(&mesh_path), "--out", path(&s1)])?;
    run_ok(&["analyze", "--mesh", path(&mesh_path), "--out", path(&s2)])?;
    let first = fs::read_to_string(&s1).map_err(|e| e.to_string())?;
    let second = fs::read_to_string(&s2).map_err(|e| e.to_string())?;
    ensure!(first == second, "two runs differ");
    let doc = SceneDocument::from_json(&first).map_err(|e| e.to_string())?;
    ensure!(doc.to_json() == first, "scene round trip is not byte-identical");

    let (c1, c2) = (dir.path().join("c1.json"), dir.path().join("c2.json"));
    let shared = ["--rmax", "1", "--rdmin", "0.5", "--eqmax", "0.85"];
    let mut args = vec!["compare", "--mesh-a", path(&mesh_path), "--mesh-b", path(&mesh_path), "-o", path(&c1)];
    args.extend(shared);
    run_ok(&args)?;
    let text = fs::read_to_string(&c1).map_err(|e| e.to_string())?;
    let cmp = CompareDocument::from_json(&text).map_err(|e| e.to_string())?;
    ensure!(cmp.to_json() == text, "compare round trip is not byte-identical");
    for s in &cmp.scenes {
        let p = s.body.provenance.parameters;
        ensure!((p.r_max, p.r_dmin, p.e_qmax) == (1.0, 0.5, 0.85), "provenance {p:?}");
    }
    ensure!(cmp.scenes[0].body == cmp.scenes[1].body, "same file twice gives different payloads");

    run_ok(&["compare", "--mesh-a", path(&mesh_path), "--mesh-b", path(&mesh_path), "--eqmax", "0.9", "-o", path(&c2)])?;
    let cmp = CompareDocument::from_json(&fs::read_to_string(&c2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(
        cmp.scenes.iter().all(|s| s.body.provenance.parameters.e_qmax == 0.9),
        "e_qmax 0.9 not recorded for both meshes"
    );
    Ok("round trip byte-identical, deterministic, compare provenance r_max=1 r_dmin=0.5 e_qmax=0.85 and e_qmax=0.9".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("metric correctness", metric_correctness),
        ("glyph formula and defaults", glyph_formula),
        ("clustering oracle", clustering_oracle),
        ("performance", performance),
        ("feature edges", feature_edges),
        ("overlap detection", overlap_detection),
        ("point in hex", point_in_hex_agreement),
        ("boundary error", boundary_error),
        ("cli and scene", cli_scene),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(detail)) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
