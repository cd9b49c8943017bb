//! Seeded generators for instances and flip sequences.
//!
//! All randomness comes from a ChaCha8 stream seeded by [`GenSpec::seed`] and
//! only integer ranges are drawn, so outputs are identical across platforms.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{invert, FlipSequence};
use crate::ngon::{fan_pivot_sequence, NgonError};
use crate::scalar::{in_circle_perturbed, Coordinate, Point};
use crate::tri::{make_fan, EdgeLabel, LabeledTriangulation, Setting, TriError, VertexId};
use crate::Triangulation;

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub setting: Setting,
    /// Total number of edges, boundary included.
    pub edge_count: usize,
    pub target_length: usize,
    /// Sequence length divided by the number of distinct labels.
    pub redundancy: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(setting: Setting, edge_count: usize, target_length: usize, redundancy: f64, seed: u64) -> Self {
        GenSpec { setting, edge_count, target_length, redundancy, seed }
    }

    /// Number of distinct labels a sequence for this spec uses.
    pub fn distinct_labels(&self) -> usize {
        ((self.target_length as f64 / self.redundancy).round() as usize).clamp(1, self.target_length.max(1))
    }

    fn check(&self) -> Result<(), GenError> {
        if !self.redundancy.is_finite() || self.redundancy < 1.0 {
            return Err(GenError::InvalidSpec(format!("redundancy {} must be at least 1", self.redundancy)));
        }
        if self.target_length == 0 {
            return Err(GenError::InvalidSpec("target length must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("cannot generate: {0}")]
    Unreachable(String),
    #[error("degenerate point set: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Tri(#[from] TriError),
    #[error(transparent)]
    Ngon(#[from] NgonError),
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn pick(rng: &mut ChaCha8Rng, len: usize) -> usize {
    rng.gen_range(0..len as u64) as usize
}

/// Vertex count giving `edge_count` edges (or the nearest feasible count).
pub fn vertex_count_for(setting: Setting, edge_count: usize) -> u32 {
    let n = edge_count as u32;
    match setting {
        Setting::ConvexNGon => ((n + 3) / 2).max(3),
        Setting::GeometricPlanar => ((n + 3) / 3 + 4).max(3),
        Setting::Combinatorial => (n / 3 + 2).max(5),
    }
}

/// Random instance of the requested setting and size.
pub fn random_instance(spec: &GenSpec) -> Result<Triangulation, GenError> {
    let v = vertex_count_for(spec.setting, spec.edge_count);
    let mut rng = rng_for(spec.seed, 1);
    let mut t = match spec.setting {
        Setting::ConvexNGon => make_fan(v, 0)?,
        Setting::GeometricPlanar => {
            let pts = random_points(v as usize, &mut rng)?;
            return delaunay_of_points(pts);
        }
        Setting::Combinatorial => sphere_bipyramid(v - 2),
    };
    let interior: Vec<EdgeLabel> = t.interior_labels().collect();
    if interior.is_empty() {
        return Ok(t);
    }
    for _ in 0..10 * v as usize {
        let l = interior[pick(&mut rng, interior.len())];
        if t.flippable(l)? {
            t.flip_unchecked(l);
        }
    }
    Ok(t)
}

/// Closed sphere-like surface: an `m`-cycle with two apexes, `3m` edges.
pub fn sphere_bipyramid(m: u32) -> Triangulation {
    assert!(m >= 3, "bipyramid needs an equator of at least 3 vertices");
    let (north, south) = (m, m + 1);
    let mut tris = Vec::with_capacity(2 * m as usize);
    for k in 0..m {
        let next = (k + 1) % m;
        tris.push([k, next, north]);
        tris.push([next, k, south]);
    }
    LabeledTriangulation::from_triangles(Setting::Combinatorial, m + 2, None, &tris).expect("bipyramid is valid")
}

/// Random integer points with pairwise distinct positions and no three collinear.
pub fn random_points(count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Point<i64>>, GenError> {
    const SIDE: i64 = 1 << 20;
    let draw = |rng: &mut ChaCha8Rng| [rng.gen_range(0..SIDE), rng.gen_range(0..SIDE)];
    let mut pts: Vec<Point<i64>> = (0..count).map(|_| draw(rng)).collect();
    for _ in 0..100 {
        match find_collinear(&pts) {
            None => return Ok(pts),
            Some(k) => pts[k] = draw(rng),
        }
    }
    Err(GenError::Degenerate(format!("could not place {count} points in general position")))
}

/// Index of a point lying on a line through two others (or coinciding with one).
fn find_collinear(pts: &[Point<i64>]) -> Option<usize> {
    for (i, p) in pts.iter().enumerate() {
        let mut dirs: HashSet<(i64, i64)> = HashSet::with_capacity(pts.len());
        for (j, q) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            if dx == 0 && dy == 0 {
                return Some(j);
            }
            let g = dx.gcd(&dy);
            let (mut dx, mut dy) = (dx / g, dy / g);
            if dx < 0 || (dx == 0 && dy < 0) {
                dx = -dx;
                dy = -dy;
            }
            if !dirs.insert((dx, dy)) {
                return Some(j);
            }
        }
    }
    None
}

/// Sweep triangulation of points in general position, vertices renumbered in
/// lexicographic order.
pub fn sweep_triangulation(mut pts: Vec<Point<i64>>) -> Result<Triangulation, GenError> {
    if pts.len() < 3 {
        return Err(GenError::Degenerate("fewer than 3 points".into()));
    }
    pts.sort_unstable();
    let mut hull: Vec<usize> =
        if i64::orient(&pts[0], &pts[1], &pts[2]) == Ordering::Greater { vec![0, 1, 2] } else { vec![0, 2, 1] };
    let mut tris = vec![[hull[0] as VertexId, hull[1] as VertexId, hull[2] as VertexId]];
    for k in 3..pts.len() {
        let m = hull.len();
        let visible: Vec<bool> =
            (0..m).map(|e| i64::orient(&pts[hull[e]], &pts[hull[(e + 1) % m]], &pts[k]) == Ordering::Less).collect();
        let start = (0..m)
            .find(|&e| visible[e] && !visible[(e + m - 1) % m])
            .ok_or_else(|| GenError::Degenerate("point not outside the hull".into()))?;
        let mut end = start;
        while visible[(end + 1) % m] {
            end = (end + 1) % m;
        }
        let mut e = start;
        loop {
            tris.push([hull[(e + 1) % m] as VertexId, hull[e] as VertexId, k as VertexId]);
            if e == end {
                break;
            }
            e = (e + 1) % m;
        }
        let mut next = Vec::with_capacity(m + 1);
        let mut v = (end + 1) % m;
        loop {
            next.push(hull[v]);
            if v == start {
                break;
            }
            v = (v + 1) % m;
        }
        next.push(k);
        hull = next;
    }
    let n = pts.len() as u32;
    Ok(LabeledTriangulation::from_triangles(Setting::GeometricPlanar, n, Some(pts), &tris)?)
}

/// Delaunay triangulation (with symbolic tie-breaking) of points in general position.
pub fn delaunay_of_points(pts: Vec<Point<i64>>) -> Result<Triangulation, GenError> {
    let mut t = sweep_triangulation(pts)?;
    let seq = lawson_sequence(&t)?;
    for &l in seq.iter() {
        t.flip_unchecked(l);
    }
    Ok(t)
}

fn locally_delaunay<C: Coordinate>(t: &LabeledTriangulation<C>, label: EdgeLabel) -> Result<bool, TriError> {
    let s = t.support(label)?;
    if s.faces.len() < 2 {
        return Ok(true);
    }
    let p = t.coords().expect("geometric triangulations carry coordinates");
    let [a, b, c] = s.triangles[0];
    let d = s.opposite[1];
    let at = |v: VertexId| (&p[v as usize], v);
    Ok(in_circle_perturbed([at(a), at(b), at(c), at(d)]) != Ordering::Greater)
}

/// Flips taking `t` to its Delaunay triangulation, in the order Lawson's
/// algorithm performs them.
pub fn lawson_sequence<C: Coordinate>(t: &LabeledTriangulation<C>) -> Result<FlipSequence, GenError> {
    if t.setting() != Setting::GeometricPlanar {
        return Err(GenError::InvalidSpec(format!("Lawson flips need the geometric setting, got {}", t.setting())));
    }
    let mut s = t.clone();
    let mut stack: Vec<EdgeLabel> = s.interior_labels().collect();
    let mut queued = vec![false; s.label_bound()];
    for l in &stack {
        queued[l.index()] = true;
    }
    let mut out = FlipSequence::new();
    while let Some(l) = stack.pop() {
        queued[l.index()] = false;
        if locally_delaunay(&s, l)? || !s.flippable(l)? {
            continue;
        }
        s.flip_unchecked(l);
        out.push(l);
        for n in s.neighbors(l)? {
            if !queued[n.index()] && !s.is_boundary(n)? {
                queued[n.index()] = true;
                stack.push(n);
            }
        }
    }
    Ok(out)
}

/// Maps labels of `from` to the labels of `to` carried by the same vertex pair.
fn label_map_by_endpoints<C: Coordinate>(
    from: &LabeledTriangulation<C>,
    to: &LabeledTriangulation<C>,
) -> Result<HashMap<EdgeLabel, EdgeLabel>, GenError> {
    let mut by_pair = HashMap::new();
    for l in to.labels() {
        by_pair.insert(to.sorted_endpoints(l)?, l);
    }
    let mut map = HashMap::new();
    for l in from.labels() {
        let e = from.sorted_endpoints(l)?;
        let target =
            by_pair.get(&e).ok_or_else(|| GenError::Unreachable(format!("edge {e:?} missing from the target")))?;
        map.insert(l, *target);
    }
    Ok(map)
}

/// Pivot both triangulations to a common intermediate `m1`/`m2` and join the
/// first pivot with the reversed second one, translating its labels.
fn join_through<C: Coordinate>(
    t1: &LabeledTriangulation<C>,
    mu1: &FlipSequence,
    t2: &LabeledTriangulation<C>,
    mu2: &FlipSequence,
) -> Result<FlipSequence, GenError> {
    let mid1 = crate::algebra::apply(mu1, t1).map_err(|e| GenError::Unreachable(e.to_string()))?;
    let mid2 = crate::algebra::apply(mu2, t2).map_err(|e| GenError::Unreachable(e.to_string()))?;
    let map = label_map_by_endpoints(&mid2, &mid1)?;
    let mut out = mu1.clone();
    for l in invert(mu2).iter() {
        out.push(map[l]);
    }
    Ok(out)
}

/// Flips from `t1` to the connectivity of `t2` through the fan at `apex`.
pub fn sequence_between_ngon<C: Coordinate>(
    t1: &LabeledTriangulation<C>,
    t2: &LabeledTriangulation<C>,
    apex: VertexId,
) -> Result<FlipSequence, GenError> {
    if t1.vertex_count() != t2.vertex_count() {
        return Err(GenError::InvalidSpec(format!(
            "size mismatch: {} vs {} vertices",
            t1.vertex_count(),
            t2.vertex_count()
        )));
    }
    let mu1 = fan_pivot_sequence(t1, apex)?;
    let mu2 = fan_pivot_sequence(t2, apex)?;
    join_through(t1, &mu1, t2, &mu2)
}

/// Flips from `t1` to the connectivity of `t2` on the same point set, through
/// their common Delaunay triangulation.
pub fn sequence_between_geometric<C: Coordinate>(
    t1: &LabeledTriangulation<C>,
    t2: &LabeledTriangulation<C>,
) -> Result<FlipSequence, GenError> {
    if t1.coords() != t2.coords() {
        return Err(GenError::InvalidSpec("the triangulations use different point sets".into()));
    }
    let mu1 = lawson_sequence(t1)?;
    let mu2 = lawson_sequence(t2)?;
    join_through(t1, &mu1, t2, &mu2)
}

/// Dense set with O(1) insert, remove and uniform pick.
struct Pool {
    items: Vec<EdgeLabel>,
    slot: Vec<usize>,
}

impl Pool {
    const ABSENT: usize = usize::MAX;

    fn new(bound: usize) -> Self {
        Pool { items: Vec::new(), slot: vec![Self::ABSENT; bound] }
    }

    fn contains(&self, l: EdgeLabel) -> bool {
        self.slot[l.index()] != Self::ABSENT
    }

    fn insert(&mut self, l: EdgeLabel) {
        if !self.contains(l) {
            self.slot[l.index()] = self.items.len();
            self.items.push(l);
        }
    }

    fn remove(&mut self, l: EdgeLabel) {
        let k = self.slot[l.index()];
        if k == Self::ABSENT {
            return;
        }
        let last = self.items.pop().expect("non-empty");
        if last != l {
            self.items[k] = last;
            self.slot[last.index()] = k;
        }
        self.slot[l.index()] = Self::ABSENT;
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

const PICK_TRIES: usize = 48;
const RECENT: usize = 8;
const FRESH: usize = 32;

/// Random valid flip sequence of `spec.target_length` flips using exactly
/// `spec.distinct_labels()` labels. Two flips of the same label are always
/// separated by a flip of an edge sharing a face with it.
pub fn random_sequence<C: Coordinate>(t: &LabeledTriangulation<C>, spec: &GenSpec) -> Result<FlipSequence, GenError> {
    spec.check()?;
    let d = spec.distinct_labels();
    let interior = t.interior_labels().count();
    if d > interior {
        return Err(GenError::Unreachable(format!(
            "{d} distinct labels requested but only {interior} interior edges exist"
        )));
    }
    let mut last = None;
    for attempt in 0..16u64 {
        let mut rng = rng_for(spec.seed, 2 + attempt);
        match try_random_sequence(t, spec.target_length, d, &mut rng)? {
            Some(seq) => return Ok(seq),
            None => last = Some(attempt),
        }
    }
    Err(GenError::Unreachable(format!("no valid sequence found after {} attempts", last.map_or(0, |a| a + 1))))
}

fn try_random_sequence<C: Coordinate>(
    t: &LabeledTriangulation<C>,
    f: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<FlipSequence>, GenError> {
    let bound = t.label_bound();
    let mut s = t.clone();
    let mut unused = Pool::new(bound);
    for l in t.interior_labels() {
        unused.insert(l);
    }
    let mut ready = Pool::new(bound);
    let mut readied: Vec<EdgeLabel> = Vec::new();
    let mut last_used = vec![usize::MAX; bound];
    let mut recent: Vec<EdgeLabel> = Vec::with_capacity(RECENT);
    let mut out = FlipSequence::new();
    let mut distinct = 0;
    while out.len() < f {
        let remaining = f - out.len();
        let need_new = d - distinct;
        let want_new =
            need_new > 0 && (need_new == remaining || (rng.gen_range(0..remaining as u64) as usize) < need_new);
        let mut choice = None;
        if want_new {
            choice = pick_near(&s, &unused, &recent, &[], &|_| true, rng)?;
        }
        if choice.is_none() && need_new < remaining {
            while readied.last().is_some_and(|&l| !ready.contains(l)) {
                readied.pop();
            }
            let now = out.len();
            let fresh = |l: EdgeLabel| last_used[l.index()] + FRESH >= now;
            choice = pick_near(&s, &ready, &recent, &readied, &fresh, rng)?;
            if choice.is_none() {
                choice = pick_near(&s, &ready, &recent, &readied, &|_| true, rng)?;
            }
        }
        if choice.is_none() && need_new > 0 && !want_new {
            choice = pick_near(&s, &unused, &recent, &[], &|_| true, rng)?;
        }
        let Some(l) = choice else {
            return Ok(None);
        };
        s.flip_unchecked(l);
        out.push(l);
        if last_used[l.index()] == usize::MAX {
            distinct += 1;
            unused.remove(l);
        }
        last_used[l.index()] = out.len();
        ready.remove(l);
        for n in s.neighbors(l)? {
            if last_used[n.index()] != usize::MAX {
                ready.insert(n);
                readied.push(n);
            }
        }
        if recent.len() == RECENT {
            recent.remove(0);
        }
        recent.push(l);
    }
    Ok(Some(out))
}

/// Flippable member of `pool`, preferring edges that share a face with the
/// most recent flips, then the latest entries of `latest`. Only labels
/// passing `accept` are considered.
fn pick_near<C: Coordinate>(
    s: &LabeledTriangulation<C>,
    pool: &Pool,
    recent: &[EdgeLabel],
    latest: &[EdgeLabel],
    accept: &dyn Fn(EdgeLabel) -> bool,
    rng: &mut ChaCha8Rng,
) -> Result<Option<EdgeLabel>, TriError> {
    if pool.len() == 0 {
        return Ok(None);
    }
    let member = |l: EdgeLabel| pool.contains(l) && accept(l);
    let mut near = Vec::new();
    for &r in recent.iter().rev() {
        for n in s.neighbors(r)? {
            if member(n) && !near.contains(&n) && s.flippable(n)? {
                near.push(n);
            }
        }
        if !near.is_empty() {
            return Ok(Some(near[pick(rng, near.len())]));
        }
    }
    for &l in latest.iter().rev().take(PICK_TRIES) {
        if member(l) && s.flippable(l)? {
            return Ok(Some(l));
        }
    }
    for _ in 0..PICK_TRIES {
        let l = pool.items[pick(rng, pool.len())];
        if accept(l) && s.flippable(l)? {
            return Ok(Some(l));
        }
    }
    let flippable: Vec<EdgeLabel> =
        pool.items.iter().copied().filter(|&l| accept(l) && s.flippable(l).unwrap_or(false)).collect();
    Ok(if flippable.is_empty() { None } else { Some(flippable[pick(rng, flippable.len())]) })
}
