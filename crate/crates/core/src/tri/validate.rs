use std::cmp::Ordering;

use super::{LabeledTriangulation, Setting, TriError, NO_FACE};
use crate::scalar::{segments_conflict, Coordinate};

fn invalid(msg: impl Into<String>) -> TriError {
    TriError::Invalid(msg.into())
}

impl<C: Coordinate> LabeledTriangulation<C> {
    /// Checks every structural invariant plus the geometric ones of the setting.
    ///
    /// The geometric crossing test is quadratic in the number of edges.
    pub fn validate(&self) -> Result<(), TriError> {
        self.validate_topology()?;
        match self.setting {
            Setting::Combinatorial => Ok(()),
            Setting::ConvexNGon => {
                self.validate_coords()?;
                self.validate_convex_polygon()?;
                self.validate_ccw_faces()?;
                self.validate_convex_chords()
            }
            Setting::GeometricPlanar => {
                self.validate_coords()?;
                self.validate_ccw_faces()?;
                self.validate_no_crossings()
            }
        }
    }

    fn validate_topology(&self) -> Result<(), TriError> {
        if self.faces.is_empty() {
            return Err(invalid("no faces"));
        }
        for (fid, f) in self.faces.iter().enumerate() {
            let [a, b, c] = f.edges;
            if a == b || b == c || a == c {
                return Err(invalid(format!("face {fid} repeats an edge")));
            }
            for k in 0..3 {
                let rec = self.record(f.edges[k])?;
                let end = if f.forward[k] { rec.ends[1] } else { rec.ends[0] };
                let next = self.corner(f, (k + 1) % 3);
                if end != next {
                    return Err(invalid(format!("face {fid} edges do not form a cycle")));
                }
                if !rec.faces.contains(&(fid as u32)) {
                    return Err(invalid(format!("face {fid} and edge {} disagree on incidence", f.edges[k])));
                }
            }
        }
        for label in self.labels() {
            let rec = self.record(label)?;
            match rec.face_count() {
                0 => return Err(invalid(format!("edge {label} has no face"))),
                1 => {}
                _ => {
                    let dir = |fid: u32| {
                        let f = &self.faces[fid as usize];
                        let k = f.edges.iter().position(|&e| e == label).expect("incidence checked");
                        f.forward[k]
                    };
                    if rec.faces[0] == rec.faces[1] {
                        return Err(invalid(format!("edge {label} appears twice in one face")));
                    }
                    if dir(rec.faces[0]) == dir(rec.faces[1]) {
                        return Err(invalid(format!(
                            "edge {label} is traversed the same way by both faces (inconsistent orientation)"
                        )));
                    }
                }
            }
            debug_assert!(rec.faces[0] != NO_FACE);
        }
        Ok(())
    }

    fn validate_coords(&self) -> Result<(), TriError> {
        let p = self.coords.as_ref().ok_or_else(|| invalid(format!("{} setting needs coordinates", self.setting)))?;
        if p.len() != self.vertex_count as usize {
            return Err(invalid(format!("{} coordinates for {} vertices", p.len(), self.vertex_count)));
        }
        if p.iter().any(|q| !q[0].is_admissible() || !q[1].is_admissible()) {
            return Err(invalid("non-finite coordinate"));
        }
        Ok(())
    }

    fn validate_ccw_faces(&self) -> Result<(), TriError> {
        let p = self.coords.as_ref().expect("coordinates checked");
        for fid in self.face_ids() {
            let [a, b, c] = self.face_vertices(fid);
            if C::orient(&p[a as usize], &p[b as usize], &p[c as usize]) != Ordering::Greater {
                return Err(invalid(format!("face {fid} ({a},{b},{c}) is not counter-clockwise")));
            }
        }
        Ok(())
    }

    /// Vertices `0..n` must be in strictly convex counter-clockwise position and
    /// the boundary must be exactly the polygon sides.
    fn validate_convex_polygon(&self) -> Result<(), TriError> {
        let p = self.coords.as_ref().expect("coordinates checked");
        let n = p.len();
        for k in 0..n {
            if C::orient(&p[k], &p[(k + 1) % n], &p[(k + 2) % n]) != Ordering::Greater {
                return Err(invalid(format!("vertices {k}.. are not in strictly convex position")));
            }
        }
        for k in 1..n - 1 {
            if C::orient(&p[0], &p[k], &p[k + 1]) != Ordering::Greater {
                return Err(invalid("polygon winds more than once"));
            }
        }
        let mut boundary = 0;
        for label in self.labels() {
            if self.is_boundary(label)? {
                boundary += 1;
                let [a, b] = self.endpoints(label)?;
                let n = n as u32;
                if (a + 1) % n != b && (b + 1) % n != a {
                    return Err(invalid(format!("boundary edge {label} is not a polygon side")));
                }
            }
        }
        if boundary != n {
            return Err(invalid(format!("{boundary} boundary edges on a {n}-gon")));
        }
        Ok(())
    }

    /// Chords of a convex polygon cross exactly when their endpoints interleave.
    fn validate_convex_chords(&self) -> Result<(), TriError> {
        let mut chords: Vec<(u32, u32)> = self
            .labels()
            .map(|l| {
                let [a, b] = self.sorted_endpoints(l).expect("present");
                (a, b)
            })
            .collect();
        chords.sort_unstable_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        if chords.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("parallel edges"));
        }
        let mut stack: Vec<u32> = Vec::new();
        for (a, b) in chords {
            while stack.last().is_some_and(|&end| end <= a) {
                stack.pop();
            }
            if stack.last().is_some_and(|&end| b > end) {
                return Err(invalid(format!("chord ({a},{b}) crosses another edge")));
            }
            stack.push(b);
        }
        Ok(())
    }

    fn validate_no_crossings(&self) -> Result<(), TriError> {
        let p = self.coords.as_ref().expect("coordinates checked");
        let segs: Vec<_> = self
            .labels()
            .map(|l| {
                let [a, b] = self.endpoints(l).expect("present");
                (l, &p[a as usize], &p[b as usize])
            })
            .collect();
        for (k, &(la, a0, a1)) in segs.iter().enumerate() {
            for &(lb, b0, b1) in &segs[k + 1..] {
                if segments_conflict(a0, a1, b0, b1) {
                    return Err(invalid(format!("edges {la} and {lb} intersect")));
                }
            }
        }
        Ok(())
    }
}
