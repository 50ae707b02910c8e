//! Small geometric kernels shared by the analyses: axis-aligned boxes, a
//! bounding-volume tree, closest-point queries and containment predicates.

use nalgebra::{Matrix3, Point3, Vector3};

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    /// An inverted box that any `grow` call replaces.
    pub fn empty() -> Self {
        Self {
            min: Point::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    pub fn grow(&mut self, p: &Point) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn merge(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn center(&self) -> Point {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn extent(&self) -> Vector {
        self.max - self.min
    }

    /// Euclidean length of `max - min`, zero for an empty box.
    pub fn diagonal(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.extent().norm()
        }
    }

    pub fn contains(&self, p: &Point, tolerance: f64) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - tolerance && p[i] <= self.max[i] + tolerance)
    }

    /// Squared distance from `p` to the box (zero inside).
    pub fn distance_squared(&self, p: &Point) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let v = if p[i] < self.min[i] {
                self.min[i] - p[i]
            } else if p[i] > self.max[i] {
                p[i] - self.max[i]
            } else {
                0.0
            };
            d += v * v;
        }
        d
    }
}

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    // Leaves hold a range into `order`; interior nodes hold two children.
    kind: NodeKind,
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf { start: usize, end: usize },
    Inner { left: usize, right: usize },
}

const LEAF_SIZE: usize = 4;

/// Static bounding-volume hierarchy over a list of boxes, split at the median
/// of the longest axis.
#[derive(Clone, Debug)]
pub struct AabbTree {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl AabbTree {
    pub fn build(boxes: &[Aabb]) -> Self {
        let mut tree = Self {
            nodes: Vec::new(),
            order: (0..boxes.len()).collect(),
        };
        if !boxes.is_empty() {
            let n = boxes.len();
            tree.build_node(boxes, 0, n);
        }
        tree
    }

    fn build_node(&mut self, boxes: &[Aabb], start: usize, end: usize) -> usize {
        let bounds = self.order[start..end]
            .iter()
            .fold(Aabb::empty(), |acc, &i| acc.merge(&boxes[i]));
        let index = self.nodes.len();
        self.nodes.push(Node {
            bounds,
            kind: NodeKind::Leaf { start, end },
        });
        if end - start <= LEAF_SIZE {
            return index;
        }
        let centers = Aabb::from_points(
            self.order[start..end]
                .iter()
                .map(|&i| boxes[i].center())
                .collect::<Vec<_>>()
                .iter(),
        );
        let ext = centers.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            boxes[a].center()[axis]
                .total_cmp(&boxes[b].center()[axis])
                .then(a.cmp(&b))
        });
        let left = self.build_node(boxes, start, mid);
        let right = self.build_node(boxes, mid, end);
        self.nodes[index].kind = NodeKind::Inner { left, right };
        index
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Calls `visit` for every primitive whose box contains `p` (inflated by
    /// `tolerance`).
    pub fn for_each_containing(&self, p: &Point, tolerance: f64, mut visit: impl FnMut(usize)) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.bounds.contains(p, tolerance) {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, end } => self.order[start..end].iter().for_each(|&i| visit(i)),
                NodeKind::Inner { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
    }

    /// Branch-and-bound nearest primitive search. `distance_squared` returns
    /// the exact squared distance from `p` to primitive `i`; the primitive
    /// with the smallest value wins, ties going to the lowest index.
    pub fn nearest(&self, p: &Point, mut distance_squared: impl FnMut(usize) -> f64) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        let mut stack = vec![(0usize, self.nodes[0].bounds.distance_squared(p))];
        while let Some((n, bound)) = stack.pop() {
            if let Some((_, d)) = best {
                if bound > d {
                    continue;
                }
            }
            match self.nodes[n].kind {
                NodeKind::Leaf { start, end } => {
                    for &i in &self.order[start..end] {
                        let d = distance_squared(i);
                        let better = match best {
                            None => true,
                            Some((bi, bd)) => d < bd || (d == bd && i < bi),
                        };
                        if better {
                            best = Some((i, d));
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    let dl = self.nodes[left].bounds.distance_squared(p);
                    let dr = self.nodes[right].bounds.distance_squared(p);
                    // Visit the closer child first.
                    if dl <= dr {
                        stack.push((right, dr));
                        stack.push((left, dl));
                    } else {
                        stack.push((left, dl));
                        stack.push((right, dr));
                    }
                }
            }
        }
        best
    }
}

/// Closest point on segment `[a, b]` to `p`.
pub fn closest_point_on_segment(p: &Point, a: &Point, b: &Point) -> Point {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Which part of a triangle a closest point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleFeature {
    Vertex(usize),
    /// Edge between local corners `(i, (i + 1) % 3)`.
    Edge(usize),
    Face,
}

#[derive(Clone, Copy, Debug)]
pub struct TriangleClosest {
    pub point: Point,
    pub barycentric: [f64; 3],
    pub feature: TriangleFeature,
}

/// Closest point on triangle `abc` to `p` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Point, a: &Point, b: &Point, c: &Point) -> TriangleClosest {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return TriangleClosest {
            point: *a,
            barycentric: [1.0, 0.0, 0.0],
            feature: TriangleFeature::Vertex(0),
        };
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return TriangleClosest {
            point: *b,
            barycentric: [0.0, 1.0, 0.0],
            feature: TriangleFeature::Vertex(1),
        };
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return TriangleClosest {
            point: a + ab * v,
            barycentric: [1.0 - v, v, 0.0],
            feature: TriangleFeature::Edge(0),
        };
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return TriangleClosest {
            point: *c,
            barycentric: [0.0, 0.0, 1.0],
            feature: TriangleFeature::Vertex(2),
        };
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return TriangleClosest {
            point: a + ac * w,
            barycentric: [1.0 - w, 0.0, w],
            feature: TriangleFeature::Edge(2),
        };
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return TriangleClosest {
            point: b + (c - b) * w,
            barycentric: [0.0, 1.0 - w, w],
            feature: TriangleFeature::Edge(1),
        };
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    TriangleClosest {
        point: a + ab * v + ac * w,
        barycentric: [1.0 - v - w, v, w],
        feature: TriangleFeature::Face,
    }
}

/// Barycentric coordinates of `p` in tetrahedron `t`, or `None` when the
/// tetrahedron has no volume.
pub fn tet_barycentric(p: &Point, t: [&Point; 4]) -> Option<[f64; 4]> {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let e3 = t[3] - t[0];
    let m = Matrix3::from_columns(&[e1, e2, e3]);
    let det = m.determinant();
    let scale = e1.norm().max(e2.norm()).max(e3.norm());
    if det.abs() <= f64::EPSILON * scale * scale * scale || !det.is_finite() {
        return None;
    }
    let rhs = p - t[0];
    // Cramer's rule keeps the coordinates orientation independent.
    let l1 = Matrix3::from_columns(&[rhs, e2, e3]).determinant() / det;
    let l2 = Matrix3::from_columns(&[e1, rhs, e3]).determinant() / det;
    let l3 = Matrix3::from_columns(&[e1, e2, rhs]).determinant() / det;
    Some([1.0 - l1 - l2 - l3, l1, l2, l3])
}

/// Barycentric coordinates of `p` in the planar triangle `t` (xy only).
pub fn triangle_barycentric_2d(p: [f64; 2], t: [[f64; 2]; 3]) -> Option<[f64; 3]> {
    let (ax, ay) = (t[1][0] - t[0][0], t[1][1] - t[0][1]);
    let (bx, by) = (t[2][0] - t[0][0], t[2][1] - t[0][1]);
    let det = ax * by - ay * bx;
    let scale = (ax * ax + ay * ay).max(bx * bx + by * by);
    if det.abs() <= f64::EPSILON * scale || !det.is_finite() {
        return None;
    }
    let (px, py) = (p[0] - t[0][0], p[1] - t[0][1]);
    let l1 = (px * by - py * bx) / det;
    let l2 = (ax * py - ay * px) / det;
    Some([1.0 - l1 - l2, l1, l2])
}

/// Even-odd crossing test against a set of closed polygons taken jointly, so
/// a point inside a hole counts as outside.
pub fn point_in_polygons_even_odd(p: [f64; 2], polygons: &[Vec<[f64; 2]>]) -> bool {
    let mut inside = false;
    for poly in polygons {
        let n = poly.len();
        if n < 3 {
            continue;
        }
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = (poly[i][0], poly[i][1]);
            let (xj, yj) = (poly[j][0], poly[j][1]);
            if (yi > p[1]) != (yj > p[1]) && p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
    }
    inside
}

/// Signed area of a closed polygon in the xy plane (positive when
/// counter-clockwise).
pub fn signed_area_2d(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * twice
}
