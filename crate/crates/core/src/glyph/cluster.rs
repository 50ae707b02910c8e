use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Glyph;
use crate::geometry::{Point, Vector};

/// Categorical palette cycled by cluster rank.
pub const PALETTE: [&str; 12] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999", "#66c2a5", "#fc8d62",
    "#8da0cb", "#e5c494",
];

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Groups of element indices, each ascending, ordered by their smallest
    /// element.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            let s = *slot.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[s].push(i);
        }
        out
    }
}

fn grid_key(p: &Point, cell: f64) -> [i64; 3] {
    [
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    ]
}

/// Index pairs `(i, j)`, `i < j`, of glyphs whose radii sum exceeds the
/// distance between their centers. Candidates come from a uniform hash grid
/// with cell size twice the largest radius, so any overlapping pair lies in
/// the same or adjacent cells.
pub fn overlap_pairs(glyphs: &[Glyph]) -> Vec<(usize, usize)> {
    let max_radius = glyphs.iter().map(|g| g.radius).fold(0.0, f64::max);
    if !(max_radius > 0.0) {
        return Vec::new();
    }
    let cell = 2.0 * max_radius;
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, g) in glyphs.iter().enumerate() {
        grid.entry(grid_key(&g.center, cell)).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for (i, g) in glyphs.iter().enumerate() {
        let k = grid_key(&g.center, cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else {
                        continue;
                    };
                    for &j in bucket {
                        if j > i && g.radius + glyphs[j].radius > (g.center - glyphs[j].center).norm() {
                            pairs.push((i, j));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub id: usize,
    /// Member vertex ids, ascending.
    pub members: Vec<usize>,
    /// Member nearest the centroid of member positions.
    pub representative: usize,
    /// Largest member radius.
    pub radius: f64,
    /// Smallest member quality.
    pub worst_quality: f64,
    pub member_count: usize,
    /// Index into [`PALETTE`].
    pub color_index: usize,
}

/// Connected components of the glyph overlap graph. Cluster ids follow the
/// smallest member vertex id; color indices follow the rank by worst quality.
pub fn cluster_glyphs(glyphs: &[Glyph]) -> Vec<ClusterSummary> {
    let mut order: Vec<usize> = (0..glyphs.len()).collect();
    order.sort_by_key(|&i| glyphs[i].vertex);
    let sorted: Vec<Glyph> = order.iter().map(|&i| glyphs[i]).collect();

    let mut sets = UnionFind::new(sorted.len());
    for (i, j) in overlap_pairs(&sorted) {
        sets.union(i, j);
    }
    let mut clusters: Vec<ClusterSummary> = sets
        .groups()
        .into_iter()
        .enumerate()
        .map(|(id, group)| summarize(id, &group, &sorted))
        .collect();

    let mut rank: Vec<usize> = (0..clusters.len()).collect();
    rank.sort_by(|&a, &b| {
        clusters[a]
            .worst_quality
            .total_cmp(&clusters[b].worst_quality)
            .then(a.cmp(&b))
    });
    for (r, &c) in rank.iter().enumerate() {
        clusters[c].color_index = r % PALETTE.len();
    }
    clusters
}

fn summarize(id: usize, group: &[usize], glyphs: &[Glyph]) -> ClusterSummary {
    let n = group.len() as f64;
    let centroid = Point::from(
        group
            .iter()
            .fold(Vector::zeros(), |acc, &i| acc + glyphs[i].center.coords)
            / n,
    );
    // Groups are ascending, so the first minimum is the lowest vertex id.
    let mut representative = glyphs[group[0]].vertex;
    let mut best = f64::INFINITY;
    for &i in group {
        let d = (glyphs[i].center - centroid).norm_squared();
        if d < best {
            best = d;
            representative = glyphs[i].vertex;
        }
    }
    ClusterSummary {
        id,
        members: group.iter().map(|&i| glyphs[i].vertex).collect(),
        representative,
        radius: group.iter().map(|&i| glyphs[i].radius).fold(f64::NEG_INFINITY, f64::max),
        worst_quality: group.iter().map(|&i| glyphs[i].quality).fold(f64::INFINITY, f64::min),
        member_count: group.len(),
        color_index: 0,
    }
}
