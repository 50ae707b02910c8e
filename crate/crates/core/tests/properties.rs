use std::collections::BTreeSet;

use nalgebra::{Rotation3, Vector3};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use hqview_core::analysis::{analyze_boundary, BoundaryReference};
use hqview_core::boundary::{extract_boundary_2d, SignMode};
use hqview_core::features::filter_feature_edges;
use hqview_core::geometry::Point;
use hqview_core::glyph::{cluster_glyphs, Glyph, UnionFind};
use hqview_core::overlap::{detect_overlapping_cells, is_overlapping_cell, DEFAULT_EPSILON_REL};
use hqview_core::quality::{compute_quality_field, corner_scaled_jacobian, HEX_CORNER_NEIGHBORS};
use hqview_core::synthetic::{degrade, hex_grid, holed_quad_grid, quad_grid};
use hqview_core::{Adjacency, CellKind, Mesh};

fn all_corner_values(mesh: &Mesh) -> Vec<f64> {
    (0..mesh.cell_count())
        .flat_map(|c| (0..mesh.arity()).map(move |k| corner_scaled_jacobian(mesh, c, k).unwrap()))
        .collect()
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// `J` at a hex corner from exact rational determinant and norms; only the
/// final square root is rounded.
fn exact_corner(mesh: &Mesh, cell: usize, corner: usize) -> f64 {
    let ids = mesh.cell(cell);
    let p = mesh.vertex(ids[corner]);
    let e: Vec<[BigRational; 3]> = HEX_CORNER_NEIGHBORS[corner]
        .iter()
        .map(|&n| {
            let q = mesh.vertex(ids[n]);
            [exact(q.x) - exact(p.x), exact(q.y) - exact(p.y), exact(q.z) - exact(p.z)]
        })
        .collect();
    let det = e[0][0].clone() * (e[1][1].clone() * e[2][2].clone() - e[1][2].clone() * e[2][1].clone())
        - e[0][1].clone() * (e[1][0].clone() * e[2][2].clone() - e[1][2].clone() * e[2][0].clone())
        + e[0][2].clone() * (e[1][0].clone() * e[2][1].clone() - e[1][1].clone() * e[2][0].clone());
    let norm2 = |v: &[BigRational; 3]| v.iter().fold(BigRational::zero(), |acc, x| acc + x.clone() * x.clone());
    let denom = norm2(&e[0]) * norm2(&e[1]) * norm2(&e[2]);
    if denom.is_zero() {
        return -1.0;
    }
    let j2 = (det.clone() * det.clone() / denom).to_f64().unwrap();
    let mag = j2.sqrt().min(1.0);
    if det.is_negative() {
        -mag
    } else if det == BigRational::from_integer(BigInt::from(0)) {
        0.0
    } else {
        mag
    }
}

fn partition(groups: Vec<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect()
}

fn brute_force_clusters(glyphs: &[Glyph]) -> BTreeSet<Vec<usize>> {
    let mut uf = UnionFind::new(glyphs.len());
    for i in 0..glyphs.len() {
        for j in i + 1..glyphs.len() {
            if glyphs[i].radius + glyphs[j].radius > (glyphs[i].center - glyphs[j].center).norm() {
                uf.union(i, j);
            }
        }
    }
    partition(
        uf.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| glyphs[i].vertex).collect())
            .collect(),
    )
}

fn glyph_set(points: &[(f64, f64, f64, f64)], r_max: f64) -> Vec<Glyph> {
    points
        .iter()
        .enumerate()
        .map(|(v, &(x, y, z, q))| Glyph::new(v, Point::new(x, y, z), q, r_max))
        .collect()
}

fn glyph_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((0.0..10.0f64, 0.0..10.0f64, 0.0..10.0f64, -1.0..1.0f64), 1..120)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobian_is_invariant_under_rigid_motion_and_scale(
        seed in 0u64..1000,
        axis in (-1.0..1.0f64, -1.0..1.0f64, 0.1..1.0f64),
        angle in 0.0..std::f64::consts::TAU,
        shift in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        scale in 0.01..100.0f64,
    ) {
        let (mesh, _) = degrade(&hex_grid(2, 2, 2, 1.0), 0.5, 0.3, seed);
        let rot = Rotation3::new(Vector3::new(axis.0, axis.1, axis.2).normalize() * angle);
        let moved = mesh
            .map_vertices(|p| rot * (p * scale) + Vector3::new(shift.0, shift.1, shift.2))
            .unwrap();
        for (a, b) in all_corner_values(&mesh).iter().zip(all_corner_values(&moved)) {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn reflection_negates_every_corner(seed in 0u64..1000) {
        let (mesh, _) = degrade(&hex_grid(2, 1, 2, 1.0), 0.5, 0.3, seed);
        let mirrored = mesh.map_vertices(|p| Point::new(-p.x, p.y, p.z)).unwrap();
        for (a, b) in all_corner_values(&mesh).iter().zip(all_corner_values(&mirrored)) {
            prop_assert!((a + b).abs() < 1e-12);
        }
        let (quad, _) = degrade(&quad_grid(3, 2, 1.0), 0.5, 0.3, seed);
        let mirrored = quad.map_vertices(|p| Point::new(p.x, -p.y, 0.0)).unwrap();
        for (a, b) in all_corner_values(&quad).iter().zip(all_corner_values(&mirrored)) {
            prop_assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_exact_arithmetic(seed in 0u64..10_000, amplitude in 0.0..0.8f64) {
        let (mesh, _) = degrade(&hex_grid(1, 1, 1, 1.0), 1.0, amplitude, seed);
        for k in 0..8 {
            let expected = exact_corner(&mesh, 0, k);
            let got = corner_scaled_jacobian(&mesh, 0, k).unwrap();
            prop_assert!((got - expected).abs() < 1e-12, "corner {k}: {got} vs {expected}");
        }
    }

    #[test]
    fn vertex_quality_is_the_minimum_corner(seed in 0u64..1000) {
        let (mesh, _) = degrade(&hex_grid(3, 2, 2, 1.0), 0.4, 0.4, seed);
        let adj = Adjacency::build(&mesh);
        let field = compute_quality_field(&mesh, &adj);
        for v in 0..mesh.vertex_count() {
            let corners = field.corners(v);
            prop_assert_eq!(corners.len(), adj.vertex_cells(v).len());
            let min = corners.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(field.quality(v), min);
        }
    }

    #[test]
    fn moving_one_vertex_only_changes_its_one_ring(seed in 0u64..1000, v in 0usize..27) {
        let mesh = hex_grid(2, 2, 2, 1.0);
        let adj = Adjacency::build(&mesh);
        let before = compute_quality_field(&mesh, &adj);
        let (noisy, _) = degrade(&mesh, 1.0, 0.3, seed);
        let target = *noisy.vertex(v);
        let moved = mesh.map_vertices(|p| if p == mesh.vertex(v) { target } else { *p }).unwrap();
        let after = compute_quality_field(&moved, &adj);
        let ring: BTreeSet<usize> = adj.vertex_cells(v).iter().flat_map(|&c| mesh.cell(c).iter().copied()).collect();
        for u in 0..mesh.vertex_count() {
            if !ring.contains(&u) {
                prop_assert_eq!(before.quality(u), after.quality(u));
            }
        }
    }

    #[test]
    fn clustering_matches_brute_force(points in glyph_strategy(), r_max in 0.05..3.0f64) {
        let glyphs = glyph_set(&points, r_max);
        let fast = partition(cluster_glyphs(&glyphs).into_iter().map(|c| c.members).collect());
        prop_assert_eq!(fast, brute_force_clusters(&glyphs));
    }

    #[test]
    fn clusters_only_merge_as_r_max_grows(points in glyph_strategy(), r_max in 0.05..2.0f64, growth in 1.0..3.0f64) {
        let small = cluster_glyphs(&glyph_set(&points, r_max));
        let large = cluster_glyphs(&glyph_set(&points, r_max * growth));
        for c in &small {
            let owner = large.iter().find(|l| l.members.contains(&c.members[0])).unwrap();
            prop_assert!(c.members.iter().all(|m| owner.members.contains(m)));
        }
        prop_assert!(large.len() <= small.len());
    }

    #[test]
    fn glyph_radius_ignores_element_size(q in -1.0..1.0f64, r_max in 0.01..5.0f64, scale in 0.001..1000.0f64) {
        let a = Glyph::new(0, Point::origin(), q, r_max);
        let b = Glyph::new(0, Point::new(scale, scale, scale), q, r_max);
        prop_assert_eq!(a.radius, b.radius);
        prop_assert_eq!(a.radius, (1.0 - q) * r_max);
    }

    #[test]
    fn emphasized_edges_are_nested(seed in 0u64..1000, mut t in prop::collection::vec(-1.0..1.2f64, 2..8)) {
        let (mesh, _) = degrade(&hex_grid(3, 3, 2, 1.0), 0.5, 0.45, seed);
        let adj = Adjacency::build(&mesh);
        let field = compute_quality_field(&mesh, &adj);
        t.sort_by(f64::total_cmp);
        let sets: Vec<BTreeSet<usize>> = t
            .iter()
            .map(|&x| filter_feature_edges(&adj, &field, x).emphasized.into_iter().collect())
            .collect();
        for w in sets.windows(2) {
            prop_assert!(w[0].is_subset(&w[1]));
        }
    }

    #[test]
    fn accelerated_containment_matches_exhaustive(seed in 0u64..1000, amplitude in 0.2..0.9f64) {
        let (mesh, _) = degrade(&hex_grid(3, 2, 2, 1.0), 0.6, amplitude, seed);
        let adj = Adjacency::build(&mesh);
        let eps = DEFAULT_EPSILON_REL * adj.diagonal();
        let mut brute = Vec::new();
        for v in 0..mesh.vertex_count() {
            for c in 0..mesh.cell_count() {
                if is_overlapping_cell(&mesh, v, c, eps) {
                    brute.push((v, c));
                }
            }
        }
        let fast: Vec<(usize, usize)> = detect_overlapping_cells(&mesh, &adj, DEFAULT_EPSILON_REL)
            .into_iter()
            .map(|x| (x.vertex, x.cell))
            .collect();
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn boundary_sign_flips_with_reference_scale(nx in 1usize..5, ny in 1usize..5, scale_up in prop::bool::ANY) {
        let mesh = quad_grid(nx, ny, 1.0);
        let adj = Adjacency::build(&mesh);
        let c = mesh.bounds().center();
        let s = if scale_up { 1.1 } else { 0.9 };
        let reference = mesh.map_vertices(|p| c + (p - c) * s).unwrap();
        let b = analyze_boundary(&mesh, &adj, &BoundaryReference::Mesh(reference), SignMode::Auto).unwrap();
        for r in &b.records {
            let ok = if scale_up { r.error < 0.0 } else { r.error > 0.0 };
            prop_assert!(ok, "vertex {} error {}", r.vertex, r.error);
        }
    }

    #[test]
    fn boundary_sign_flips_with_reference_scale_3d(n in 1usize..4, scale_up in prop::bool::ANY) {
        let mesh = hex_grid(n, n, n, 1.0);
        let adj = Adjacency::build(&mesh);
        let c = mesh.bounds().center();
        let s = if scale_up { 1.1 } else { 0.9 };
        let reference = mesh.map_vertices(|p| c + (p - c) * s).unwrap();
        let b = analyze_boundary(&mesh, &adj, &BoundaryReference::Mesh(reference), SignMode::Signed).unwrap();
        for r in &b.records {
            let ok = if scale_up { r.error < 0.0 } else { r.error > 0.0 };
            prop_assert!(ok, "vertex {} error {}", r.vertex, r.error);
        }
    }

    #[test]
    fn boundary_error_is_scale_invariant(seed in 0u64..1000, scale in 0.01..100.0f64) {
        let (mesh, _) = degrade(&quad_grid(4, 3, 1.0), 0.5, 0.2, seed);
        let reference = quad_grid(4, 3, 1.0);
        let run = |m: &Mesh, r: &Mesh| {
            analyze_boundary(m, &Adjacency::build(m), &BoundaryReference::Mesh(r.clone()), SignMode::Auto).unwrap()
        };
        let base = run(&mesh, &reference);
        let scaled = run(
            &mesh.map_vertices(|p| p * scale).unwrap(),
            &reference.map_vertices(|p| p * scale).unwrap(),
        );
        for (a, b) in base.records.iter().zip(&scaled.records) {
            prop_assert_eq!(a.vertex, b.vertex);
            prop_assert!((a.error - b.error).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_error_is_bounded_by_displacement(seed in 0u64..1000, amplitude in 0.0..0.3f64) {
        let reference = hex_grid(2, 2, 2, 1.0);
        let (mesh, _) = degrade(&reference, 0.5, amplitude, seed);
        let adj = Adjacency::build(&mesh);
        let b = analyze_boundary(&mesh, &adj, &BoundaryReference::Mesh(reference.clone()), SignMode::Signed).unwrap();
        for r in &b.records {
            let moved = (mesh.vertex(r.vertex) - reference.vertex(r.vertex)).norm();
            prop_assert!(r.error.abs() * b.diag_reference <= moved + 1e-12);
        }
    }

    #[test]
    fn loops_partition_the_boundary(nx in 3usize..7, ny in 3usize..7, holes in prop::collection::btree_set((1usize..6, 1usize..6), 0..4)) {
        // Interior, pairwise non-adjacent cells only, so every boundary stays manifold.
        let holes: Vec<(usize, usize)> = holes
            .into_iter()
            .filter(|&(i, j)| i + 1 < nx && j + 1 < ny && i % 2 == 1 && j % 2 == 1)
            .collect();
        let mesh = holed_quad_grid(nx, ny, 1.0, &holes, &[]);
        let adj = Adjacency::build(&mesh);
        let loops = extract_boundary_2d(&mesh, &adj).unwrap();
        prop_assert_eq!(loops.len(), 1 + holes.len());
        let mut seen = BTreeSet::new();
        for l in &loops {
            for &v in &l.vertices {
                prop_assert!(seen.insert(v));
            }
        }
        let boundary: BTreeSet<usize> = adj
            .edges()
            .iter()
            .filter(|e| e.cells.len() == 1)
            .flat_map(|e| e.vertices)
            .collect();
        prop_assert_eq!(seen, boundary);
        prop_assert!(loops[0].signed_area > 0.0);
        prop_assert!(loops[1..].iter().all(|l| l.signed_area < 0.0));
    }
}

#[test]
fn quad_grid_is_planar() {
    assert_eq!(quad_grid(2, 2, 1.0).kind(), CellKind::Quad);
}
