//! Greedy reduction of flip sequences by occurrence displacement.
//!
//! For each position the flip there is paired with the next flip of the same
//! label. The first occurrence is pushed toward the second across commuting
//! flips, then the second is pulled back toward the first. If they end up
//! adjacent they cancel; if exactly one flip separates them and the three
//! form a transposition pattern, one flip is removed and the remaining suffix
//! swaps the two labels. After every removal the scan restarts from the front.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::{commutes_on, swap_label, transposable_on, Cursor, FlipSequence, SeqError};
use crate::scalar::Coordinate;
use crate::tri::{EdgeLabel, LabeledTriangulation, Setting};

/// Outcome of one elimination attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elimination {
    Cancelled2,
    Reduced1,
    NotReducible,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReduceError {
    #[error(transparent)]
    Invalid(#[from] SeqError),
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, Default)]
pub struct ReduceOptions {
    /// Replays the sequence after every attempt and compares with the cursor.
    pub verify_cursor: bool,
    /// Carried into the report only.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionReport {
    pub initial_length: usize,
    pub final_length: usize,
    pub removed_by_cancellation: usize,
    pub removed_by_transposition: usize,
    pub attempts: u64,
    pub restarts: u64,
    pub elapsed: Duration,
    pub setting: Setting,
    pub seed: Option<u64>,
}

impl ReductionReport {
    pub fn gain(&self) -> usize {
        self.initial_length - self.final_length
    }

    pub fn gain_percent(&self) -> f64 {
        if self.initial_length == 0 {
            0.0
        } else {
            100.0 * self.gain() as f64 / self.initial_length as f64
        }
    }

    /// Checks `final = initial - 2 * cancellations - transpositions`.
    pub fn is_consistent(&self) -> bool {
        self.final_length + 2 * self.removed_by_cancellation + self.removed_by_transposition == self.initial_length
    }
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "setting={}", self.setting)?;
        writeln!(f, "initial_length={}", self.initial_length)?;
        writeln!(f, "final_length={}", self.final_length)?;
        writeln!(f, "gain={}", self.gain())?;
        writeln!(f, "gain_percent={:.2}", self.gain_percent())?;
        writeln!(f, "removed_by_cancellation={}", self.removed_by_cancellation)?;
        writeln!(f, "removed_by_transposition={}", self.removed_by_transposition)?;
        writeln!(f, "attempts={}", self.attempts)?;
        writeln!(f, "restarts={}", self.restarts)?;
        writeln!(f, "elapsed_ms={:.3}", self.elapsed.as_secs_f64() * 1e3)?;
        match self.seed {
            Some(s) => writeln!(f, "seed={s}"),
            None => writeln!(f, "seed=none"),
        }
    }
}

/// Per-label occurrence lists, kept in sync with swaps.
struct Occurrences {
    lists: Vec<Vec<usize>>,
    rank: Vec<usize>,
}

impl Occurrences {
    fn build(seq: &[EdgeLabel], label_bound: usize) -> Self {
        let mut lists = vec![Vec::new(); label_bound];
        let mut rank = Vec::with_capacity(seq.len());
        for (k, l) in seq.iter().enumerate() {
            let list = &mut lists[l.index()];
            rank.push(list.len());
            list.push(k);
        }
        Occurrences { lists, rank }
    }

    fn next(&self, seq: &[EdgeLabel], k: usize) -> Option<usize> {
        self.lists[seq[k].index()].get(self.rank[k] + 1).copied()
    }

    /// Records the exchange of positions `k` and `k + 1`; call after swapping `seq`.
    fn swapped(&mut self, seq: &[EdgeLabel], k: usize) {
        self.rank.swap(k, k + 1);
        self.lists[seq[k].index()][self.rank[k]] = k;
        self.lists[seq[k + 1].index()][self.rank[k + 1]] = k + 1;
    }
}

/// Verdict of an earlier NotReducible attempt: the clock value when it ended,
/// the item that stopped the first occurrence, the number of positions from
/// the first occurrence to that item, the item that stopped the second
/// occurrence, and the second occurrence itself.
#[derive(Clone, Copy)]
struct Verdict {
    time: u64,
    blocker: u32,
    span: usize,
    stop: u32,
    end: u32,
}

/// Sequence under reduction plus the state after its first `cursor.len()` flips.
///
/// Items keep stable ids across swaps and removals. An item is stamped with
/// the clock whenever it moves or its neighborhood is rewritten. A NotReducible
/// attempt at `p` depends on the state before `p`, the items from `p` to the
/// first blocker, the state before the second blocker, and the second
/// blocker and occurrence. An unstamped prefix keeps its state up to a
/// consistent relabeling, and so does an unstamped stretch between the
/// blockers: a cancelled pair leaves the states after it intact, a
/// transposition relabels state and suffix together, and a commuting swap
/// leaves the state after the pair intact. An attempt that finds nothing
/// leaves the sequence at a fixed point, so it can be skipped while those
/// items are alive, unstamped and in place.
struct Evolving<C> {
    seq: Vec<EdgeLabel>,
    cursor: Cursor<C>,
    occ: Occurrences,
    label_bound: usize,
    flips: u64,
    ids: Vec<u32>,
    pos_of: Vec<usize>,
    stamp: Vec<u64>,
    verdict: Vec<Option<Verdict>>,
    clock: u64,
    memo: bool,
}

impl<C: Coordinate> Evolving<C> {
    fn new(seq: &[EdgeLabel], t: &LabeledTriangulation<C>, memo: bool) -> Self {
        let label_bound = t.label_bound();
        let f = seq.len();
        Evolving {
            seq: seq.to_vec(),
            cursor: Cursor::new(t),
            occ: Occurrences::build(seq, label_bound),
            label_bound,
            flips: 0,
            ids: (0..f as u32).collect(),
            pos_of: (0..f).collect(),
            stamp: vec![0; f],
            verdict: vec![None; f],
            clock: 0,
            memo,
        }
    }

    fn forward(&mut self, k: usize) -> Result<(), ReduceError> {
        debug_assert_eq!(self.cursor.len(), k);
        self.flips += 1;
        self.cursor.forward(self.seq[k]).map_err(|e| ReduceError::Internal(format!("cursor desync at {k}: {e}")))
    }

    fn back(&mut self) {
        self.flips += 1;
        self.cursor.back();
    }

    fn back_to(&mut self, k: usize) {
        self.flips += (self.cursor.len() - k) as u64;
        self.cursor.back_to(k);
    }

    fn swap(&mut self, k: usize) {
        self.seq.swap(k, k + 1);
        self.occ.swapped(&self.seq, k);
        self.ids.swap(k, k + 1);
        self.pos_of[self.ids[k] as usize] = k;
        self.pos_of[self.ids[k + 1] as usize] = k + 1;
    }

    fn touch(&mut self, k: usize) {
        self.stamp[self.ids[k] as usize] = self.clock;
    }

    fn commutes(&mut self, k: usize) -> Result<bool, ReduceError> {
        let (a, b) = (self.seq[k], self.seq[k + 1]);
        commutes_on(&mut self.cursor.state, a, b).map_err(|e| ReduceError::Internal(e.to_string()))
    }

    /// Whether the attempt at `p` is known to find nothing.
    fn known_irreducible(&self, p: usize, b: usize) -> bool {
        let Some(v) = self.verdict[self.ids[p] as usize] else {
            return false;
        };
        let fresh = |id: u32| self.stamp[id as usize] <= v.time;
        let stop = self.pos_of[v.stop as usize];
        self.pos_of[v.end as usize] == b
            && stop.wrapping_add(1) == b
            && self.pos_of[v.blocker as usize] == p + v.span
            && p + v.span <= stop
            && fresh(v.stop)
            && fresh(v.end)
            && self.ids[p..=p + v.span].iter().all(|&id| fresh(id))
    }

    /// Removes the items at `range`, stamping everything in `touched` (given
    /// in positions after the removal).
    fn remove(&mut self, range: std::ops::Range<usize>, touched: std::ops::Range<usize>) {
        self.seq.drain(range.clone());
        for id in self.ids.drain(range) {
            self.pos_of[id as usize] = usize::MAX;
        }
        for (k, &id) in self.ids.iter().enumerate() {
            self.pos_of[id as usize] = k;
        }
        for k in touched.start..touched.end.min(self.seq.len()) {
            self.touch(k);
        }
        self.occ = Occurrences::build(&self.seq, self.label_bound);
    }

    /// Attempts to remove the flip at `p`; the cursor must sit at prefix `p`
    /// and is left there.
    fn try_eliminate(&mut self, p: usize) -> Result<Elimination, ReduceError> {
        let Some(mut b) = self.occ.next(&self.seq, p) else {
            return Ok(Elimination::NotReducible);
        };
        if self.memo && self.known_irreducible(p, b) {
            return Ok(Elimination::NotReducible);
        }
        self.clock += 1;
        let mut a = p;
        while a + 1 < b && self.commutes(a)? {
            self.swap(a);
            self.forward(a)?;
            a += 1;
        }
        if a + 1 < b {
            for k in a..b - 1 {
                self.forward(k)?;
            }
            while b > a + 1 && self.commutes(b - 1)? {
                self.swap(b - 1);
                self.touch(b - 1);
                self.touch(b);
                b -= 1;
                if b > a + 1 {
                    self.back();
                }
            }
            self.back_to(a);
        }
        let lo = p.saturating_sub(1);
        if b == a + 1 {
            self.remove(a..a + 2, lo..a + 1);
            self.back_to(p);
            return Ok(Elimination::Cancelled2);
        }
        if b == a + 2 {
            let (i, j) = (self.seq[a], self.seq[a + 1]);
            let ok = transposable_on(&mut self.cursor.state, i, j).map_err(|e| ReduceError::Internal(e.to_string()))?;
            if ok {
                self.seq.swap(a, a + 1);
                self.ids.swap(a, a + 1);
                for l in &mut self.seq[a + 3..] {
                    *l = swap_label(*l, i, j);
                }
                self.remove(a + 2..a + 3, lo..a + 3);
                self.back_to(p);
                return Ok(Elimination::Reduced1);
            }
        }
        self.back_to(p);
        for k in (p..a).rev() {
            self.swap(k);
        }
        let v = Verdict {
            time: self.clock,
            blocker: self.ids[a + 1],
            span: a + 1 - p,
            stop: self.ids[b - 1],
            end: self.ids[b],
        };
        self.verdict[self.ids[p] as usize] = Some(v);
        Ok(Elimination::NotReducible)
    }
}

/// Reduces `seq` on `t` with default options.
pub fn reduce<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
) -> Result<(FlipSequence, ReductionReport), ReduceError> {
    reduce_with(seq, t, &ReduceOptions::default())
}

pub fn reduce_with<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    opts: &ReduceOptions,
) -> Result<(FlipSequence, ReductionReport), ReduceError> {
    reduce_impl(seq, t, opts, true)
}

fn reduce_impl<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    opts: &ReduceOptions,
    memo: bool,
) -> Result<(FlipSequence, ReductionReport), ReduceError> {
    let start = Instant::now();
    let f = seq.len();
    let mut report = ReductionReport {
        initial_length: f,
        final_length: f,
        removed_by_cancellation: 0,
        removed_by_transposition: 0,
        attempts: 0,
        restarts: 0,
        elapsed: Duration::ZERO,
        setting: t.setting(),
        seed: opts.seed,
    };
    crate::algebra::apply(seq, t)?;
    if !seq.has_duplicates() {
        report.elapsed = start.elapsed();
        return Ok((seq.clone(), report));
    }
    let mut ev = Evolving::new(seq, t, memo);
    let budget = 16 * (f as u128 + 1).pow(3);
    let mut p = 0;
    while p < ev.seq.len() {
        report.attempts += 1;
        let outcome = ev.try_eliminate(p)?;
        match outcome {
            Elimination::Cancelled2 => report.removed_by_cancellation += 1,
            Elimination::Reduced1 => report.removed_by_transposition += 1,
            Elimination::NotReducible => {}
        }
        if outcome == Elimination::NotReducible {
            ev.forward(p)?;
            p += 1;
        } else {
            ev.back_to(0);
            p = 0;
            report.restarts += 1;
        }
        if opts.verify_cursor {
            let mut s = t.clone();
            for &l in &ev.seq[..p] {
                s.flip_in_place(l).map_err(|e| ReduceError::Internal(e.to_string()))?;
            }
            if !s.strong_eq(&ev.cursor.state) {
                return Err(ReduceError::Internal(format!("cursor differs from replay at prefix {p}")));
            }
        }
        if ev.flips as u128 + report.attempts as u128 > budget {
            return Err(ReduceError::Internal(format!("operation count exceeded {budget} for f = {f}")));
        }
    }
    report.final_length = ev.seq.len();
    report.elapsed = start.elapsed();
    debug_assert!(report.is_consistent());
    Ok((FlipSequence::from(ev.seq), report))
}

/// Reduction without skipping repeated attempts; the reference the
/// memoized loop must agree with exactly.
#[doc(hidden)]
pub fn reduce_unmemoized<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
) -> Result<(FlipSequence, ReductionReport), ReduceError> {
    reduce_impl(seq, t, &ReduceOptions::default(), false)
}

/// Single elimination attempt at `p` on a copy of `seq`.
pub fn try_eliminate<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
) -> Result<(Elimination, FlipSequence), ReduceError> {
    if p >= seq.len() {
        return Err(SeqError::OutOfRange { position: p, len: seq.len() }.into());
    }
    crate::algebra::apply(seq, t)?;
    let mut ev = Evolving::new(seq, t, false);
    for k in 0..p {
        ev.forward(k)?;
    }
    let outcome = ev.try_eliminate(p)?;
    Ok((outcome, FlipSequence::from(ev.seq)))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("sequence of length {len} exceeds the oracle budget {budget}")]
    TooLong { len: usize, budget: usize },
    #[error("commutativity closure exceeds {0} sequences")]
    TooManyNodes(usize),
    #[error(transparent)]
    Invalid(#[from] SeqError),
}

const ORACLE_NODE_LIMIT: usize = 2_000_000;

/// Exhaustive reducedness test: explores every sequence reachable from `seq`
/// by swapping commuting neighbors and looks for a cancelling pair or a
/// reducible transposition pattern in any of them.
pub fn is_reduced_oracle<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    budget: usize,
) -> Result<bool, OracleError> {
    if seq.len() > budget {
        return Err(OracleError::TooLong { len: seq.len(), budget });
    }
    crate::algebra::apply(seq, t)?;
    let mut seen: HashSet<Vec<EdgeLabel>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seq.to_vec());
    queue.push_back(seq.to_vec());
    while let Some(cur) = queue.pop_front() {
        let mut s = t.clone();
        for k in 0..cur.len() {
            if k + 1 < cur.len() {
                if cur[k] == cur[k + 1] {
                    return Ok(false);
                }
                if k + 2 < cur.len()
                    && cur[k + 2] == cur[k]
                    && transposable_on(&mut s, cur[k], cur[k + 1]).map_err(|e| seq_err(k, cur[k], e))?
                {
                    return Ok(false);
                }
                if commutes_on(&mut s, cur[k], cur[k + 1]).map_err(|e| seq_err(k, cur[k], e))? {
                    let mut next = cur.clone();
                    next.swap(k, k + 1);
                    if !seen.contains(&next) {
                        if seen.len() >= ORACLE_NODE_LIMIT {
                            return Err(OracleError::TooManyNodes(ORACLE_NODE_LIMIT));
                        }
                        seen.insert(next.clone());
                        queue.push_back(next);
                    }
                }
            }
            s.flip_in_place(cur[k]).map_err(|e| seq_err(k, cur[k], e))?;
        }
    }
    Ok(true)
}

fn seq_err(index: usize, label: EdgeLabel, source: crate::tri::TriError) -> SeqError {
    SeqError::InvalidAt { index, label, source }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::apply;
    use crate::tri::make_fan;

    fn seq<const N: usize>(v: [u32; N]) -> FlipSequence {
        FlipSequence::from(v)
    }

    #[test]
    fn adjacent_pair_cancels() {
        let t = make_fan(6, 0).unwrap();
        let (out, r) = reduce(&seq([7, 7]), &t).unwrap();
        assert!(out.is_empty());
        assert_eq!(r.removed_by_cancellation, 1);
        assert_eq!(r.gain(), 2);
    }

    #[test]
    fn two_pairs_cancel() {
        let t = make_fan(6, 0).unwrap();
        let (out, r) = reduce(&seq([7, 7, 8, 8]), &t).unwrap();
        assert!(out.is_empty());
        assert_eq!(r.removed_by_cancellation, 2);
        assert!(r.is_consistent());
    }

    #[test]
    fn pentagon_triple_reduces_to_pair() {
        let t = make_fan(5, 0).unwrap();
        let (outcome, out) = try_eliminate(&seq([5, 6, 5]), &t, 0).unwrap();
        assert_eq!(outcome, Elimination::Reduced1);
        assert_eq!(out, seq([6, 5]));
        let (out, r) = reduce(&seq([5, 6, 5]), &t).unwrap();
        assert_eq!(out, seq([6, 5]));
        assert_eq!(r.removed_by_transposition, 1);
        assert!(apply(&out, &t).unwrap().weak_eq(&apply(&seq([5, 6, 5]), &t).unwrap()));
    }

    #[test]
    fn separated_pair_cancels_through_commuting_flip() {
        let t = make_fan(7, 0).unwrap();
        // 7 = (0,2) and 10 = (0,5) have disjoint supports
        let (out, _) = reduce(&seq([7, 10, 7]), &t).unwrap();
        assert_eq!(out, seq([10]));
    }

    #[test]
    fn duplicate_free_is_untouched() {
        let t = make_fan(7, 0).unwrap();
        let s = seq([7, 8, 9]);
        let (out, r) = reduce(&s, &t).unwrap();
        assert_eq!(out, s);
        assert_eq!(r.attempts, 0);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let t = make_fan(5, 0).unwrap();
        assert!(matches!(reduce(&seq([0]), &t), Err(ReduceError::Invalid(_))));
    }

    #[test]
    fn report_lines() {
        let t = make_fan(5, 0).unwrap();
        let (_, r) = reduce_with(&seq([5, 5]), &t, &ReduceOptions { verify_cursor: true, seed: Some(9) }).unwrap();
        let text = r.to_string();
        assert!(text.contains("gain=2\n"));
        assert!(text.contains("seed=9\n"));
        assert!(text.contains("setting=convex\n"));
    }

    #[test]
    fn oracle_basics() {
        let t = make_fan(6, 0).unwrap();
        assert!(is_reduced_oracle(&FlipSequence::new(), &t, 20).unwrap());
        assert!(!is_reduced_oracle(&seq([7, 7]), &t, 20).unwrap());
        assert!(is_reduced_oracle(&seq([6, 7]), &t, 20).unwrap());
        let t7 = make_fan(7, 0).unwrap();
        assert!(!is_reduced_oracle(&seq([7, 10, 7]), &t7, 20).unwrap());
        assert!(matches!(is_reduced_oracle(&seq([7, 7]), &t, 1), Err(OracleError::TooLong { .. })));
    }
}
