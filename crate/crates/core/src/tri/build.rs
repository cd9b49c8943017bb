use std::collections::HashMap;

use super::{EdgeLabel, LabeledTriangulation, Setting, TriError, VertexId};
use crate::scalar::{Coordinate, Point};

/// Integer points `(k, k²)`: strictly convex and counter-clockwise in index order.
pub fn parabola_coords(n: u32) -> Vec<Point<i64>> {
    (0..n as i64).map(|k| [k, k * k]).collect()
}

/// Coordinates used for convex polygons built by this crate.
pub fn fan_vertex_coords(n: u32) -> Vec<Point<i64>> {
    parabola_coords(n)
}

/// Fan triangulation of a convex `n`-gon with every diagonal at `apex`.
///
/// Boundary edge `(k, k+1 mod n)` is labeled `k`; the diagonals `apex–v` are
/// labeled `n, n+1, …` in increasing order of `v`.
pub fn make_fan(n: u32, apex: VertexId) -> Result<LabeledTriangulation<i64>, TriError> {
    if n < 3 {
        return Err(TriError::InvalidSize(format!("a polygon needs at least 3 vertices, got {n}")));
    }
    if apex >= n {
        return Err(TriError::InvalidSize(format!("apex {apex} out of range for {n} vertices")));
    }
    let tris: Vec<[VertexId; 3]> = (1..n - 1).map(|k| [apex, (apex + k) % n, (apex + k + 1) % n]).collect();
    let mut diagonal_rank = HashMap::new();
    let targets = (0..n).filter(|&v| v != apex && v != (apex + 1) % n && (v + 1) % n != apex);
    for (rank, v) in targets.enumerate() {
        diagonal_rank.insert(v, n + rank as u32);
    }
    LabeledTriangulation::from_triangles_labeled(Setting::ConvexNGon, n, Some(parabola_coords(n)), &tris, |a, b| {
        if (a + 1) % n == b {
            EdgeLabel(a)
        } else if (b + 1) % n == a {
            EdgeLabel(b)
        } else {
            let other = if a == apex { b } else { a };
            EdgeLabel(diagonal_rank[&other])
        }
    })
}

impl<C: Coordinate> LabeledTriangulation<C> {
    /// Builds a triangulation without parallel edges from counter-clockwise
    /// vertex triples. Labels follow the order of sorted endpoint pairs.
    pub fn from_triangles(
        setting: Setting,
        vertex_count: u32,
        coords: Option<Vec<Point<C>>>,
        triangles: &[[VertexId; 3]],
    ) -> Result<Self, TriError> {
        let mut pairs: Vec<[VertexId; 2]> = triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]])
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let index: HashMap<[VertexId; 2], u32> = pairs.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        Self::from_triangles_labeled(setting, vertex_count, coords, triangles, |a, b| {
            EdgeLabel(index[&[a.min(b), a.max(b)]])
        })
    }

    /// Like [`from_triangles`](Self::from_triangles) with caller-chosen labels;
    /// `label(a, b)` receives the endpoints with `a < b`.
    pub fn from_triangles_labeled(
        setting: Setting,
        vertex_count: u32,
        coords: Option<Vec<Point<C>>>,
        triangles: &[[VertexId; 3]],
        mut label: impl FnMut(VertexId, VertexId) -> EdgeLabel,
    ) -> Result<Self, TriError> {
        let mut seen: HashMap<[VertexId; 2], EdgeLabel> = HashMap::new();
        let mut edges = Vec::new();
        let mut faces = Vec::with_capacity(triangles.len());
        for t in triangles {
            let mut face = [(EdgeLabel(0), true); 3];
            for k in 0..3 {
                let (s, e) = (t[k], t[(k + 1) % 3]);
                let key = [s.min(e), s.max(e)];
                let l = *seen.entry(key).or_insert_with(|| {
                    let l = label(key[0], key[1]);
                    edges.push((l, key[0], key[1]));
                    l
                });
                face[k] = (l, s == key[0]);
            }
            faces.push(face);
        }
        Self::from_parts(setting, vertex_count, coords, &edges, &faces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_sizes_follow_euler() {
        for n in 3..12 {
            let t = make_fan(n, 0).unwrap();
            assert_eq!(t.interior_labels().count() as u32, n - 3);
            assert_eq!(t.face_count() as u32, n - 2);
            assert_eq!(t.edge_count() as u32, 2 * n - 3);
        }
    }

    #[test]
    fn triangle_has_no_diagonals() {
        let t = make_fan(3, 0).unwrap();
        assert_eq!(t.interior_labels().count(), 0);
        assert_eq!(t.face_count(), 1);
    }

    #[test]
    fn fan_diagonals_labeled_by_target() {
        let t = make_fan(7, 3).unwrap();
        let got: Vec<_> = t.interior_labels().map(|l| (l.0, t.sorted_endpoints(l).unwrap())).collect();
        assert_eq!(got, vec![(7, [0, 3]), (8, [1, 3]), (9, [3, 5]), (10, [3, 6])]);
        for l in t.interior_labels() {
            assert!(t.endpoints(l).unwrap().contains(&3));
        }
    }

    #[test]
    fn fan_rejects_bad_sizes() {
        assert!(matches!(make_fan(2, 0), Err(TriError::InvalidSize(_))));
        assert!(matches!(make_fan(5, 5), Err(TriError::InvalidSize(_))));
    }
}
