//! Canonical forms behind the strong and weak equality tests.

use std::collections::VecDeque;

use super::{FaceId, LabeledTriangulation, VertexId, NO_FACE};
use crate::scalar::Coordinate;

/// Rotates a vertex triple so its smallest vertex comes first, keeping orientation.
pub(crate) fn rotate_min(t: [VertexId; 3]) -> [VertexId; 3] {
    let k = (0..3).min_by_key(|&k| t[k]).expect("three entries");
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

/// Faces as label cycles (with the start vertex of each entry), rotated to
/// start at the smallest label and sorted.
pub(crate) fn strong_faces<C: Coordinate>(t: &LabeledTriangulation<C>) -> Vec<[u32; 6]> {
    let mut out: Vec<[u32; 6]> = t
        .face_records()
        .iter()
        .map(|f| {
            let k = (0..3).min_by_key(|&k| f.edges[k]).expect("three entries");
            let r = |d: usize| (k + d) % 3;
            [f.edges[r(0)].0, f.edges[r(1)].0, f.edges[r(2)].0, t.corner(f, r(0)), t.corner(f, r(1)), t.corner(f, r(2))]
        })
        .collect();
    out.sort_unstable();
    out
}

/// Multiset of endpoint pairs and set of oriented vertex triples. Determines a
/// triangulation up to edge labels when no two edges join the same vertices.
pub(crate) fn planar_key<C: Coordinate>(t: &LabeledTriangulation<C>) -> (Vec<[VertexId; 2]>, Vec<[VertexId; 3]>) {
    let mut edges: Vec<_> = t.labels().map(|l| t.sorted_endpoints(l).expect("present")).collect();
    edges.sort_unstable();
    let mut faces: Vec<_> = t.face_ids().map(|f| rotate_min(t.face_vertices(f))).collect();
    faces.sort_unstable();
    (edges, faces)
}

const BOUNDARY: u32 = u32::MAX;
const SEEN: u32 = u32::MAX - 1;
const FRESH: u32 = u32::MAX - 2;

/// Label-free encoding of the face gluing, valid with parallel edges.
///
/// Each connected component is traversed breadth-first from a face with the
/// smallest oriented vertex triple; when several faces tie, the smallest
/// resulting encoding wins. Vertex ids are emitted as-is, so two
/// triangulations have equal encodings exactly when they coincide after
/// erasing edge labels.
pub(crate) fn rotation_encoding<C: Coordinate>(t: &LabeledTriangulation<C>) -> Vec<Vec<u32>> {
    let nf = t.face_count();
    let mut done = vec![false; nf];
    let mut components = Vec::new();
    let keys: Vec<([VertexId; 3], usize)> = t
        .face_ids()
        .map(|f| {
            let v = t.face_vertices(f);
            let k = (0..3).min_by_key(|&k| v[k]).expect("three entries");
            (rotate_min(v), k)
        })
        .collect();
    while let Some(min_key) = keys.iter().enumerate().filter(|(f, _)| !done[*f]).map(|(_, k)| k.0).min() {
        let mut best: Option<(Vec<u32>, Vec<FaceId>)> = None;
        for (f, key) in keys.iter().enumerate() {
            if done[f] || key.0 != min_key {
                continue;
            }
            let (code, visited) = encode_from(t, f as FaceId, key.1);
            if best.as_ref().is_none_or(|b| code < b.0) {
                best = Some((code, visited));
            }
        }
        let (code, visited) = best.expect("an unvisited face exists");
        for f in visited {
            done[f as usize] = true;
        }
        components.push(code);
    }
    components.sort_unstable();
    components
}

fn encode_from<C: Coordinate>(t: &LabeledTriangulation<C>, start: FaceId, rot: usize) -> (Vec<u32>, Vec<FaceId>) {
    let nf = t.face_count();
    let mut order: Vec<Option<(u32, usize)>> = vec![None; nf];
    let mut visited = vec![start];
    let mut queue = VecDeque::new();
    order[start as usize] = Some((0, rot));
    queue.push_back(start);
    let mut code = Vec::with_capacity(nf * 8);
    while let Some(fid) = queue.pop_front() {
        let (_, rot) = order[fid as usize].expect("queued faces are numbered");
        let face = t.face(fid);
        for k in 0..3 {
            let corner = (rot + k) % 3;
            code.push(t.corner(face, corner));
            let label = face.edges[corner];
            let rec = t.record(label).expect("face edge present");
            let other = rec.faces.iter().copied().find(|&g| g != fid && g != NO_FACE);
            match other {
                None => code.push(BOUNDARY),
                Some(g) => {
                    let gf = t.face(g);
                    let pos = gf.edges.iter().position(|&e| e == label).expect("incident face");
                    match order[g as usize] {
                        Some((idx, grot)) => {
                            code.push(SEEN);
                            code.push(idx);
                            code.push(((pos + 3 - grot) % 3) as u32);
                        }
                        None => {
                            order[g as usize] = Some((visited.len() as u32, pos));
                            visited.push(g);
                            queue.push_back(g);
                            code.push(FRESH);
                        }
                    }
                }
            }
        }
    }
    (code, visited)
}
