//! Triangulations whose edges carry persistent labels.
//!
//! Edges are stored in a table indexed by label and faces as oriented cycles of
//! three `(label, direction)` entries. A flip rewrites the two faces of the
//! flipped edge in place and moves the label onto the new diagonal, so a single
//! flip and its undo (flipping again) are constant time.

mod build;
mod canon;
mod validate;

use std::fmt;

use thiserror::Error;

use crate::scalar::{Coordinate, Point};

pub use build::{fan_vertex_coords, make_fan, parabola_coords};

/// Vertex identifier. Vertices are fixed; only edges move.
pub type VertexId = u32;

/// Internal face slot. Face slots are reused by flips and carry no meaning.
pub type FaceId = u32;

pub(crate) const NO_FACE: FaceId = FaceId::MAX;

/// Labels above this bound are rejected so the label table stays dense.
pub const MAX_LABEL: u32 = 1 << 24;

/// Persistent identity of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel(pub u32);

impl EdgeLabel {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for EdgeLabel {
    fn from(v: u32) -> Self {
        EdgeLabel(v)
    }
}

/// Class of triangulations and the flip rule that goes with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    /// Triangulations of a convex polygon; every interior edge is flippable.
    ConvexNGon,
    /// Straight-edge planar triangulations; a flip needs a strictly convex quadrilateral.
    GeometricPlanar,
    /// Purely topological; a flip only needs the new edge to join distinct vertices.
    Combinatorial,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::ConvexNGon => "convex",
            Setting::GeometricPlanar => "geometric",
            Setting::Combinatorial => "combinatorial",
        }
    }

    pub fn needs_coordinates(self) -> bool {
        !matches!(self, Setting::Combinatorial)
    }

    pub const ALL: [Setting; 3] = [Setting::ConvexNGon, Setting::GeometricPlanar, Setting::Combinatorial];
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "convex" => Ok(Setting::ConvexNGon),
            "geometric" => Ok(Setting::GeometricPlanar),
            "combinatorial" => Ok(Setting::Combinatorial),
            other => Err(format!("unknown setting `{other}`")),
        }
    }
}

/// Why an edge cannot be flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipViolation {
    /// Boundary edges have a single face.
    Boundary,
    /// Both sides of the edge are the same face.
    SameFace,
    /// The new edge would join a vertex to itself.
    DegenerateDiagonal,
    /// The support quadrilateral is not strictly convex.
    NonConvex,
}

impl fmt::Display for FlipViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipViolation::Boundary => "boundary edge",
            FlipViolation::SameFace => "edge has the same face on both sides",
            FlipViolation::DegenerateDiagonal => "opposite vertices coincide",
            FlipViolation::NonConvex => "support quadrilateral is not strictly convex",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriError {
    #[error("no edge labeled {0}")]
    MissingEdge(EdgeLabel),
    #[error("edge {label} cannot be flipped: {violation}")]
    NotFlippable { label: EdgeLabel, violation: FlipViolation },
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid triangulation: {0}")]
    Invalid(String),
}

/// Endpoints and incident faces of one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct EdgeRecord {
    pub ends: [VertexId; 2],
    pub faces: [FaceId; 2],
}

impl EdgeRecord {
    fn face_count(&self) -> usize {
        self.faces.iter().filter(|&&f| f != NO_FACE).count()
    }

    fn replace_face(&mut self, from: FaceId, to: FaceId) {
        for f in &mut self.faces {
            if *f == from {
                *f = to;
                return;
            }
        }
        debug_assert!(false, "face {from} not incident to edge");
    }
}

/// An oriented triangle: three edges, each traversed forward (from `ends[0]` to
/// `ends[1]`) or backward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct FaceRecord {
    pub edges: [EdgeLabel; 3],
    pub forward: [bool; 3],
}

/// The faces incident to an edge and, for each, the vertex not on the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub faces: Vec<FaceId>,
    pub triangles: Vec<[VertexId; 3]>,
    pub opposite: Vec<VertexId>,
}

/// Local picture around an interior edge `u -> v`, with `x` opposite in the
/// face traversing `u -> v` and `y` opposite in the other one. The support
/// quadrilateral is `u, y, v, x` in counter-clockwise order.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Diamond {
    pub u: VertexId,
    pub v: VertexId,
    pub x: VertexId,
    pub y: VertexId,
    pub f1: FaceId,
    pub f2: FaceId,
    /// In `f1` after `i`: `v -> x` then `x -> u`.
    pub e1: (EdgeLabel, bool),
    pub e2: (EdgeLabel, bool),
    /// In `f2` after `i`: `u -> y` then `y -> v`.
    pub e3: (EdgeLabel, bool),
    pub e4: (EdgeLabel, bool),
}

/// A triangulation with uniquely labeled edges.
#[derive(Clone, Debug)]
pub struct LabeledTriangulation<C = i64> {
    setting: Setting,
    vertex_count: u32,
    coords: Option<Vec<Point<C>>>,
    edges: Vec<Option<EdgeRecord>>,
    edge_count: usize,
    faces: Vec<FaceRecord>,
}

impl<C: Coordinate> LabeledTriangulation<C> {
    /// Builds and fully validates a triangulation from explicit edge and face lists.
    ///
    /// `faces` lists each triangle as three `(label, forward)` entries in
    /// counter-clockwise order.
    pub fn from_parts(
        setting: Setting,
        vertex_count: u32,
        coords: Option<Vec<Point<C>>>,
        edges: &[(EdgeLabel, VertexId, VertexId)],
        faces: &[[(EdgeLabel, bool); 3]],
    ) -> Result<Self, TriError> {
        let t = Self::assemble(setting, vertex_count, coords, edges, faces)?;
        t.validate()?;
        Ok(t)
    }

    fn assemble(
        setting: Setting,
        vertex_count: u32,
        coords: Option<Vec<Point<C>>>,
        edges: &[(EdgeLabel, VertexId, VertexId)],
        faces: &[[(EdgeLabel, bool); 3]],
    ) -> Result<Self, TriError> {
        if vertex_count < 3 {
            return Err(TriError::InvalidSize(format!("{vertex_count} vertices, need at least 3")));
        }
        let bound = edges.iter().map(|e| e.0 .0).max().map_or(0, |m| m as usize + 1);
        if bound > MAX_LABEL as usize {
            return Err(TriError::Invalid(format!("label exceeds {MAX_LABEL}")));
        }
        let mut table: Vec<Option<EdgeRecord>> = vec![None; bound];
        for &(label, a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(TriError::Invalid(format!("edge {label} references a missing vertex")));
            }
            if a == b {
                return Err(TriError::Invalid(format!("edge {label} joins vertex {a} to itself")));
            }
            let slot = &mut table[label.index()];
            if slot.is_some() {
                return Err(TriError::Invalid(format!("label {label} used twice")));
            }
            *slot = Some(EdgeRecord { ends: [a, b], faces: [NO_FACE; 2] });
        }
        let mut face_records = Vec::with_capacity(faces.len());
        for (fid, face) in faces.iter().enumerate() {
            let fid = fid as FaceId;
            for &(label, _) in face {
                let rec = table
                    .get_mut(label.index())
                    .and_then(|r| r.as_mut())
                    .ok_or_else(|| TriError::Invalid(format!("face {fid} references missing edge {label}")))?;
                if rec.faces[0] == NO_FACE {
                    rec.faces[0] = fid;
                } else if rec.faces[1] == NO_FACE {
                    rec.faces[1] = fid;
                } else {
                    return Err(TriError::Invalid(format!("edge {label} has more than two faces")));
                }
            }
            face_records.push(FaceRecord {
                edges: [face[0].0, face[1].0, face[2].0],
                forward: [face[0].1, face[1].1, face[2].1],
            });
        }
        Ok(LabeledTriangulation {
            setting,
            vertex_count,
            coords,
            edges: table,
            edge_count: edges.len(),
            faces: face_records,
        })
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn coords(&self) -> Option<&[Point<C>]> {
        self.coords.as_deref()
    }

    /// One past the largest label in use.
    pub fn label_bound(&self) -> usize {
        self.edges.len()
    }

    /// All labels in ascending order.
    pub fn labels(&self) -> impl Iterator<Item = EdgeLabel> + '_ {
        self.edges.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(i, _)| EdgeLabel(i as u32))
    }

    /// Labels of edges with two incident faces.
    pub fn interior_labels(&self) -> impl Iterator<Item = EdgeLabel> + '_ {
        self.labels().filter(move |&l| !self.is_boundary(l).unwrap_or(true))
    }

    pub fn contains(&self, label: EdgeLabel) -> bool {
        self.edges.get(label.index()).is_some_and(|r| r.is_some())
    }

    pub(crate) fn record(&self, label: EdgeLabel) -> Result<&EdgeRecord, TriError> {
        self.edges.get(label.index()).and_then(|r| r.as_ref()).ok_or(TriError::MissingEdge(label))
    }

    fn record_mut(&mut self, label: EdgeLabel) -> &mut EdgeRecord {
        self.edges[label.index()].as_mut().expect("edge present")
    }

    pub(crate) fn face(&self, fid: FaceId) -> &FaceRecord {
        &self.faces[fid as usize]
    }

    pub(crate) fn face_records(&self) -> &[FaceRecord] {
        &self.faces
    }

    /// Endpoints as stored; their order carries the traversal convention.
    pub fn endpoints(&self, label: EdgeLabel) -> Result<[VertexId; 2], TriError> {
        Ok(self.record(label)?.ends)
    }

    /// Endpoints with the smaller vertex id first.
    pub fn sorted_endpoints(&self, label: EdgeLabel) -> Result<[VertexId; 2], TriError> {
        let [a, b] = self.endpoints(label)?;
        Ok([a.min(b), a.max(b)])
    }

    pub fn is_boundary(&self, label: EdgeLabel) -> Result<bool, TriError> {
        Ok(self.record(label)?.face_count() < 2)
    }

    /// Start vertex of the `k`-th entry of a face.
    #[inline]
    pub(crate) fn corner(&self, face: &FaceRecord, k: usize) -> VertexId {
        let rec = self.edges[face.edges[k].index()].as_ref().expect("face edge present");
        if face.forward[k] {
            rec.ends[0]
        } else {
            rec.ends[1]
        }
    }

    /// Counter-clockwise vertex triple of a face.
    pub fn face_vertices(&self, fid: FaceId) -> [VertexId; 3] {
        let f = self.face(fid);
        [self.corner(f, 0), self.corner(f, 1), self.corner(f, 2)]
    }

    /// Face ids currently in use.
    pub fn face_ids(&self) -> impl Iterator<Item = FaceId> {
        0..self.faces.len() as FaceId
    }

    /// The `(label, forward)` entries of a face in counter-clockwise order.
    pub fn face_entries(&self, fid: FaceId) -> [(EdgeLabel, bool); 3] {
        let f = self.face(fid);
        [(f.edges[0], f.forward[0]), (f.edges[1], f.forward[1]), (f.edges[2], f.forward[2])]
    }

    pub(crate) fn diamond(&self, label: EdgeLabel) -> Result<Result<Diamond, FlipViolation>, TriError> {
        let rec = self.record(label)?;
        if rec.face_count() < 2 {
            return Ok(Err(FlipViolation::Boundary));
        }
        if rec.faces[0] == rec.faces[1] {
            return Ok(Err(FlipViolation::SameFace));
        }
        let (mut f1, mut f2) = (rec.faces[0], rec.faces[1]);
        let pos = |f: &FaceRecord| f.edges.iter().position(|&e| e == label).expect("incident face");
        let mut k1 = pos(self.face(f1));
        if !self.face(f1).forward[k1] {
            std::mem::swap(&mut f1, &mut f2);
            k1 = pos(self.face(f1));
        }
        let k2 = pos(self.face(f2));
        let a = self.face(f1);
        let b = self.face(f2);
        debug_assert!(a.forward[k1] && !b.forward[k2]);
        let entry = |f: &FaceRecord, k: usize| (f.edges[k % 3], f.forward[k % 3]);
        Ok(Ok(Diamond {
            u: rec.ends[0],
            v: rec.ends[1],
            x: self.corner(a, (k1 + 2) % 3),
            y: self.corner(b, (k2 + 2) % 3),
            f1,
            f2,
            e1: entry(a, k1 + 1),
            e2: entry(a, k1 + 2),
            e3: entry(b, k2 + 1),
            e4: entry(b, k2 + 2),
        }))
    }

    /// Checks the flip rule of this triangulation's setting for `label`.
    pub fn check_flip(&self, label: EdgeLabel) -> Result<Result<(), FlipViolation>, TriError> {
        let d = match self.diamond(label)? {
            Ok(d) => d,
            Err(v) => return Ok(Err(v)),
        };
        Ok(self.check_diamond(&d))
    }

    fn check_diamond(&self, d: &Diamond) -> Result<(), FlipViolation> {
        match self.setting {
            Setting::ConvexNGon => Ok(()),
            Setting::Combinatorial => {
                if d.x == d.y {
                    Err(FlipViolation::DegenerateDiagonal)
                } else {
                    Ok(())
                }
            }
            Setting::GeometricPlanar => {
                if d.x == d.y {
                    return Err(FlipViolation::DegenerateDiagonal);
                }
                let p = self.coords.as_ref().expect("geometric setting has coordinates");
                let (u, v, x, y) = (&p[d.u as usize], &p[d.v as usize], &p[d.x as usize], &p[d.y as usize]);
                use std::cmp::Ordering::*;
                let xy_u = C::orient(x, y, u);
                let xy_v = C::orient(x, y, v);
                let uv_x = C::orient(u, v, x);
                let uv_y = C::orient(u, v, y);
                let strict = |s: std::cmp::Ordering, t: std::cmp::Ordering| {
                    (s == Greater && t == Less) || (s == Less && t == Greater)
                };
                if strict(xy_u, xy_v) && strict(uv_x, uv_y) {
                    Ok(())
                } else {
                    Err(FlipViolation::NonConvex)
                }
            }
        }
    }

    /// Whether `label` can be flipped under this triangulation's setting.
    pub fn flippable(&self, label: EdgeLabel) -> Result<bool, TriError> {
        Ok(self.check_flip(label)?.is_ok())
    }

    /// Flips `label` in place. Flipping the same label again undoes it.
    pub fn flip_in_place(&mut self, label: EdgeLabel) -> Result<(), TriError> {
        let d = self.diamond(label)?.map_err(|violation| TriError::NotFlippable { label, violation })?;
        self.check_diamond(&d).map_err(|violation| TriError::NotFlippable { label, violation })?;
        self.rewire(label, &d);
        Ok(())
    }

    /// Flip without the setting's flip rule; the caller has already checked it.
    pub(crate) fn flip_unchecked(&mut self, label: EdgeLabel) {
        let d = self.diamond(label).expect("edge present").expect("interior edge");
        self.rewire(label, &d);
    }

    fn rewire(&mut self, label: EdgeLabel, d: &Diamond) {
        // new faces: (x, u, y) = [e2, e3, i: y->x] and (y, v, x) = [e4, e1, i: x->y]
        self.faces[d.f1 as usize] = FaceRecord { edges: [d.e2.0, d.e3.0, label], forward: [d.e2.1, d.e3.1, false] };
        self.faces[d.f2 as usize] = FaceRecord { edges: [d.e4.0, d.e1.0, label], forward: [d.e4.1, d.e1.1, true] };
        self.record_mut(label).ends = [d.x, d.y];
        self.record_mut(d.e3.0).replace_face(d.f2, d.f1);
        self.record_mut(d.e1.0).replace_face(d.f1, d.f2);
    }

    /// Returns the triangulation obtained by flipping `label`.
    pub fn flip(&self, label: EdgeLabel) -> Result<Self, TriError> {
        let mut t = self.clone();
        t.flip_in_place(label)?;
        Ok(t)
    }

    pub fn support(&self, label: EdgeLabel) -> Result<Support, TriError> {
        let rec = self.record(label)?;
        let mut s = Support { faces: Vec::new(), triangles: Vec::new(), opposite: Vec::new() };
        for &fid in rec.faces.iter().filter(|&&f| f != NO_FACE) {
            let f = self.face(fid);
            let k = f.edges.iter().position(|&e| e == label).expect("incident face");
            s.faces.push(fid);
            s.triangles.push(self.face_vertices(fid));
            s.opposite.push(self.corner(f, (k + 2) % 3));
        }
        Ok(s)
    }

    /// Number of faces shared by the supports of `i` and `j`.
    ///
    /// By convention an edge shares all of its faces with itself.
    pub fn support_overlap(&self, i: EdgeLabel, j: EdgeLabel) -> Result<usize, TriError> {
        let a = self.record(i)?.faces;
        let b = self.record(j)?.faces;
        if i == j {
            return Ok(self.record(i)?.face_count());
        }
        Ok(a.iter().filter(|&&f| f != NO_FACE && b.contains(&f)).count())
    }

    /// The labels sharing a face with `label`, excluding `label` itself.
    pub fn neighbors(&self, label: EdgeLabel) -> Result<Vec<EdgeLabel>, TriError> {
        let rec = self.record(label)?;
        let mut out = Vec::with_capacity(4);
        for &fid in rec.faces.iter().filter(|&&f| f != NO_FACE) {
            for &e in &self.face(fid).edges {
                if e != label && !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        Ok(out)
    }

    /// Exchanges the labels `i` and `j` in place; connectivity is unchanged.
    pub fn transpose_labels_in_place(&mut self, i: EdgeLabel, j: EdgeLabel) -> Result<(), TriError> {
        self.record(i)?;
        self.record(j)?;
        if i == j {
            return Ok(());
        }
        let mut touched: Vec<FaceId> = Vec::with_capacity(4);
        for l in [i, j] {
            for &f in &self.record(l)?.faces {
                if f != NO_FACE && !touched.contains(&f) {
                    touched.push(f);
                }
            }
        }
        for f in touched {
            for e in &mut self.faces[f as usize].edges {
                if *e == i {
                    *e = j;
                } else if *e == j {
                    *e = i;
                }
            }
        }
        self.edges.swap(i.index(), j.index());
        Ok(())
    }

    pub fn transpose_labels(&self, i: EdgeLabel, j: EdgeLabel) -> Result<Self, TriError> {
        let mut t = self.clone();
        t.transpose_labels_in_place(i, j)?;
        Ok(t)
    }

    /// Applies a label permutation given as a map old label -> new label.
    ///
    /// The map must be a bijection on the labels in use.
    pub fn relabel(&self, map: impl Fn(EdgeLabel) -> EdgeLabel) -> Result<Self, TriError> {
        let mut edges = Vec::with_capacity(self.edge_count);
        for l in self.labels() {
            let [a, b] = self.endpoints(l)?;
            edges.push((map(l), a, b));
        }
        let faces: Vec<_> = self.face_ids().map(|fid| self.face_entries(fid).map(|(l, fw)| (map(l), fw))).collect();
        Self::from_parts(self.setting, self.vertex_count, self.coords.clone(), &edges, &faces)
    }

    /// Identical labeled triangulations: same label -> endpoint map and same
    /// faces as label cycles.
    pub fn strong_eq(&self, other: &Self) -> bool {
        if self.setting != other.setting || self.vertex_count != other.vertex_count {
            return false;
        }
        if self.edge_count != other.edge_count || self.faces.len() != other.faces.len() {
            return false;
        }
        for l in self.labels() {
            match other.sorted_endpoints(l) {
                Ok(e) if e == self.sorted_endpoints(l).expect("present") => {}
                _ => return false,
            }
        }
        canon::strong_faces(self) == canon::strong_faces(other)
    }

    /// Identical once edge labels are erased.
    pub fn weak_eq(&self, other: &Self) -> bool {
        if self.setting != other.setting || self.vertex_count != other.vertex_count {
            return false;
        }
        if self.edge_count != other.edge_count || self.faces.len() != other.faces.len() {
            return false;
        }
        match self.setting {
            Setting::Combinatorial => canon::rotation_encoding(self) == canon::rotation_encoding(other),
            _ => canon::planar_key(self) == canon::planar_key(other),
        }
    }
}
