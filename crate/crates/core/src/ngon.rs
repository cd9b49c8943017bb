//! Convex polygons: fan pivots, canonical certificates and brute-force flip
//! graph oracles.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{apply, invert, strongly_equiv_by_commutativity, FlipSequence, SeqError};
use crate::reducer::{reduce, ReduceError};
use crate::scalar::Coordinate;
use crate::tri::{make_fan, EdgeLabel, LabeledTriangulation, Setting, VertexId};

/// Largest polygon the brute-force oracles accept unless overridden.
pub const DEFAULT_ORACLE_CAP: u32 = 12;

/// Oracle size cap, read from `FLIPRED_ORACLE_CAP` when set.
pub fn oracle_cap() -> u32 {
    std::env::var("FLIPRED_ORACLE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ORACLE_CAP)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NgonError {
    #[error("expected a convex polygon triangulation, got setting {0}")]
    WrongSetting(Setting),
    #[error("polygon size {n} exceeds the oracle cap {cap}")]
    CapExceeded { n: u32, cap: u32 },
    #[error("size mismatch: {0} vs {1} vertices")]
    SizeMismatch(u32, u32),
    #[error("invalid polygon triangulation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("equivalence tests disagree: {0}")]
    Finding(String),
}

fn require_convex<C: Coordinate>(t: &LabeledTriangulation<C>) -> Result<(), NgonError> {
    match t.setting() {
        Setting::ConvexNGon => Ok(()),
        s => Err(NgonError::WrongSetting(s)),
    }
}

fn require_cap(n: u32) -> Result<(), NgonError> {
    let cap = oracle_cap();
    if n > cap || n > 64 {
        return Err(NgonError::CapExceeded { n, cap: cap.min(64) });
    }
    Ok(())
}

/// Triangulation of a convex `n`-gon as its sorted list of diagonals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnlabeledNgon {
    n: u32,
    chords: Vec<[VertexId; 2]>,
}

impl UnlabeledNgon {
    pub fn new(n: u32, mut chords: Vec<[VertexId; 2]>) -> Result<Self, NgonError> {
        if n < 3 {
            return Err(NgonError::Invalid(format!("{n}-gon")));
        }
        for c in &mut chords {
            if c[0] > c[1] {
                c.swap(0, 1);
            }
            let [a, b] = *c;
            if b >= n || b - a < 2 || (a == 0 && b == n - 1) {
                return Err(NgonError::Invalid(format!("({a},{b}) is not a diagonal")));
            }
        }
        chords.sort_unstable();
        chords.dedup();
        if chords.len() != (n - 3) as usize {
            return Err(NgonError::Invalid(format!("{} distinct diagonals, expected {}", chords.len(), n - 3)));
        }
        for (k, &[a, b]) in chords.iter().enumerate() {
            for &[c, d] in &chords[k + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return Err(NgonError::Invalid(format!("({a},{b}) crosses ({c},{d})")));
                }
            }
        }
        Ok(UnlabeledNgon { n, chords })
    }

    /// Connectivity of a labeled convex polygon triangulation.
    pub fn from_labeled<C: Coordinate>(t: &LabeledTriangulation<C>) -> Result<Self, NgonError> {
        require_convex(t)?;
        let chords = t.interior_labels().map(|l| t.sorted_endpoints(l).expect("present")).collect();
        UnlabeledNgon::new(t.vertex_count(), chords)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn chords(&self) -> &[[VertexId; 2]] {
        &self.chords
    }

    fn adjacency(&self) -> Vec<u64> {
        let n = self.n as usize;
        let mut adj = vec![0u64; n];
        for v in 0..n {
            let w = (v + 1) % n;
            adj[v] |= 1 << w;
            adj[w] |= 1 << v;
        }
        for &[a, b] in &self.chords {
            adj[a as usize] |= 1 << b;
            adj[b as usize] |= 1 << a;
        }
        adj
    }

    /// Every triangulation one flip away.
    pub fn neighbors(&self) -> Vec<UnlabeledNgon> {
        let adj = self.adjacency();
        let n = self.n;
        let inside = |a: u32, b: u32| -> u64 {
            let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let below_b = (1u64 << b) - 1;
            let upto_a = (1u64 << (a + 1)) - 1;
            (below_b & !upto_a) & all
        };
        let mut out = Vec::with_capacity(self.chords.len());
        for (k, &[a, b]) in self.chords.iter().enumerate() {
            let common = adj[a as usize] & adj[b as usize];
            let inner = common & inside(a, b);
            let outer = common & !inside(a, b) & !(1 << a) & !(1 << b);
            debug_assert_eq!(inner.count_ones(), 1);
            debug_assert_eq!(outer.count_ones(), 1);
            let (c, d) = (inner.trailing_zeros(), outer.trailing_zeros());
            let mut chords = self.chords.clone();
            chords[k] = [c.min(d), c.max(d)];
            chords.sort_unstable();
            out.push(UnlabeledNgon { n, chords });
        }
        out
    }

    /// All triangulations of the convex `n`-gon.
    pub fn enumerate(n: u32) -> Vec<UnlabeledNgon> {
        fn sub(i: u32, j: u32, memo: &mut HashMap<(u32, u32), Vec<Vec<[u32; 2]>>>) -> Vec<Vec<[u32; 2]>> {
            if j - i < 2 {
                return vec![Vec::new()];
            }
            if let Some(v) = memo.get(&(i, j)) {
                return v.clone();
            }
            let mut out = Vec::new();
            for k in i + 1..j {
                let left = sub(i, k, memo);
                let right = sub(k, j, memo);
                for l in &left {
                    for r in &right {
                        let mut c = l.clone();
                        c.extend_from_slice(r);
                        if k > i + 1 {
                            c.push([i, k]);
                        }
                        if j > k + 1 {
                            c.push([k, j]);
                        }
                        out.push(c);
                    }
                }
            }
            memo.insert((i, j), out.clone());
            out
        }
        let mut memo = HashMap::new();
        let mut out: Vec<UnlabeledNgon> = sub(0, n - 1, &mut memo)
            .into_iter()
            .map(|mut chords| {
                chords.sort_unstable();
                UnlabeledNgon { n, chords }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Catalan number `C_k`.
pub fn catalan(k: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

pub struct FlipGraph {
    pub n: u32,
    pub nodes: Vec<UnlabeledNgon>,
    pub adjacency: Vec<Vec<u32>>,
    index: HashMap<UnlabeledNgon, u32>,
}

impl FlipGraph {
    pub fn index_of(&self, t: &UnlabeledNgon) -> Option<u32> {
        self.index.get(t).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Distances from node `src` to every node.
    pub fn distances_from(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.nodes.len()];
        let mut queue = VecDeque::from([src]);
        dist[src as usize] = 0;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.distances_from(0).iter().all(|&d| d != u32::MAX)
    }
}

/// Every triangulation of the convex `n`-gon with single-flip adjacency.
pub fn build_flip_graph(n: u32) -> Result<FlipGraph, NgonError> {
    require_cap(n)?;
    if n < 3 {
        return Err(NgonError::Invalid(format!("{n}-gon")));
    }
    let nodes = UnlabeledNgon::enumerate(n);
    let index: HashMap<UnlabeledNgon, u32> = nodes.iter().enumerate().map(|(k, t)| (t.clone(), k as u32)).collect();
    let adjacency = nodes
        .iter()
        .map(|t| {
            let mut adj: Vec<u32> = t.neighbors().iter().map(|s| index[s]).collect();
            adj.sort_unstable();
            adj
        })
        .collect();
    Ok(FlipGraph { n, nodes, adjacency, index })
}

/// Exact flip distance by breadth-first search.
pub fn flip_distance_bfs(a: &UnlabeledNgon, b: &UnlabeledNgon) -> Result<usize, NgonError> {
    if a.n != b.n {
        return Err(NgonError::SizeMismatch(a.n, b.n));
    }
    require_cap(a.n)?;
    if a == b {
        return Ok(0);
    }
    let mut dist: HashMap<UnlabeledNgon, usize> = HashMap::from([(a.clone(), 0)]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for w in u.neighbors() {
            if &w == b {
                return Ok(d + 1);
            }
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    Err(NgonError::Invalid("flip graph is disconnected".into()))
}

/// Flips turning `t` into the fan at `apex`: repeatedly flip the smallest
/// label whose support has `apex` as an opposite vertex.
pub fn fan_pivot_sequence<C: Coordinate>(
    t: &LabeledTriangulation<C>,
    apex: VertexId,
) -> Result<FlipSequence, NgonError> {
    require_convex(t)?;
    if apex >= t.vertex_count() {
        return Err(NgonError::Invalid(format!("apex {apex} out of range")));
    }
    let mut s = t.clone();
    let mut out = FlipSequence::new();
    loop {
        let mut next = None;
        for l in s.interior_labels() {
            let [a, b] = s.endpoints(l).expect("present");
            if a == apex || b == apex {
                continue;
            }
            if s.support(l).expect("present").opposite.contains(&apex) {
                next = Some(l);
                break;
            }
        }
        let Some(l) = next else { break };
        s.flip_in_place(l).map_err(|e| NgonError::Invalid(e.to_string()))?;
        out.push(l);
    }
    Ok(out)
}

fn fan_side<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    apex: VertexId,
) -> Result<(FlipSequence, LabeledTriangulation<C>), NgonError> {
    apply(seq, t)?;
    let mu = fan_pivot_sequence(t, apex)?;
    let fan = apply(&mu, t)?;
    let mut psi = invert(&mu);
    psi.extend_from(seq);
    let (reduced, _) = reduce(&psi, &fan)?;
    Ok((reduced, fan))
}

/// Sorted labels of the reduction of `invert(μ)` followed by `seq`, acting on
/// the fan `μ(t)` at `apex`. Invariant under weak equivalence of `seq`.
pub fn canonical_certificate<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    apex: VertexId,
) -> Result<Vec<EdgeLabel>, NgonError> {
    Ok(fan_side(seq, t, apex)?.0.sorted_labels())
}

/// Weak equivalence decided by comparing end states, cross-checked against
/// certificates and a commutativity reordering of the fan-side reductions.
pub fn weak_equiv_ngon<C: Coordinate>(
    a: &FlipSequence,
    b: &FlipSequence,
    t: &LabeledTriangulation<C>,
    apex: VertexId,
) -> Result<bool, NgonError> {
    require_convex(t)?;
    let direct = apply(a, t)?.weak_eq(&apply(b, t)?);
    let (ra, fan) = fan_side(a, t, apex)?;
    let (rb, _) = fan_side(b, t, apex)?;
    let certified = ra.sorted_labels() == rb.sorted_labels() && strongly_equiv_by_commutativity(&ra, &rb, &fan)?;
    if certified != direct {
        return Err(NgonError::Finding(format!(
            "direct comparison says {direct}, certificates {} and {} say {certified}",
            ra, rb
        )));
    }
    Ok(direct)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MinimalityReport {
    pub n: u32,
    pub samples: usize,
    pub violations: usize,
    pub max_length: usize,
    /// First few violating cases, human readable.
    pub examples: Vec<String>,
}

impl MinimalityReport {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < 5 {
                self.examples.push(describe());
            }
        }
    }
}

impl fmt::Display for MinimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} samples={} violations={} max_length={}", self.n, self.samples, self.violations, self.max_length)
    }
}

/// Random labeled triangulation of the `n`-gon, reached by random flips from a fan.
pub fn random_ngon(n: u32, rng: &mut ChaCha8Rng) -> LabeledTriangulation<i64> {
    let mut t = make_fan(n, 0).expect("n >= 3");
    let interior: Vec<EdgeLabel> = t.interior_labels().collect();
    if !interior.is_empty() {
        for _ in 0..4 * n {
            let l = interior[rng.gen_range(0..interior.len() as u64) as usize];
            t.flip_unchecked(l);
        }
    }
    t
}

/// Duplicate-free sequences on random `n`-gon triangulations have length
/// equal to the flip distance between their endpoints.
pub fn check_duplicate_free_minimal(samples: usize, n: u32, seed: u64) -> Result<MinimalityReport, NgonError> {
    require_cap(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MinimalityReport { n, ..Default::default() };
    for _ in 0..samples {
        let t = random_ngon(n, &mut rng);
        let mut unused: Vec<EdgeLabel> = t.interior_labels().collect();
        let len = rng.gen_range(0..=unused.len() as u64) as usize;
        let mut s = t.clone();
        let mut seq = FlipSequence::new();
        for _ in 0..len {
            let k = rng.gen_range(0..unused.len() as u64) as usize;
            let l = unused.swap_remove(k);
            s.flip_unchecked(l);
            seq.push(l);
        }
        let d = flip_distance_bfs(&UnlabeledNgon::from_labeled(&t)?, &UnlabeledNgon::from_labeled(&s)?)?;
        report.max_length = report.max_length.max(seq.len());
        report.record(d == seq.len(), || format!("sequence {seq} has length {} but distance {d}", seq.len()));
    }
    Ok(report)
}

/// Reduced sequences from the fan are minimal.
pub fn check_fan_reductions_minimal(samples: usize, n: u32, seed: u64) -> Result<MinimalityReport, NgonError> {
    require_cap(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MinimalityReport { n, ..Default::default() };
    let fan = make_fan(n, 0).expect("n >= 3");
    let start = UnlabeledNgon::from_labeled(&fan)?;
    let interior: Vec<EdgeLabel> = fan.interior_labels().collect();
    for _ in 0..samples {
        let len = if interior.is_empty() { 0 } else { rng.gen_range(0..=3 * n as u64) as usize };
        let mut s = fan.clone();
        let mut seq = FlipSequence::new();
        for _ in 0..len {
            let l = interior[rng.gen_range(0..interior.len() as u64) as usize];
            s.flip_unchecked(l);
            seq.push(l);
        }
        let (reduced, _) = reduce(&seq, &fan)?;
        let d = flip_distance_bfs(&start, &UnlabeledNgon::from_labeled(&s)?)?;
        report.max_length = report.max_length.max(seq.len());
        report.record(reduced.len() == d, || {
            format!("{seq} reduces to {reduced} of length {} but distance is {d}", reduced.len())
        });
    }
    Ok(report)
}
