//! Flip sequences and the equivalence-preserving rewrites on them.
//!
//! A [`FlipSequence`] stores labels in application order: item `0` is flipped
//! first. Written as a composition of flip operators the same sequence reads
//! right to left, so "moving a flip to the left" in operator notation means
//! moving it toward a higher index here. All positions are 0-based.

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

use crate::scalar::Coordinate;
use crate::tri::{EdgeLabel, LabeledTriangulation, TriError};

/// Ordered list of edge labels, first element applied first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FlipSequence(Vec<EdgeLabel>);

impl FlipSequence {
    pub fn new() -> Self {
        FlipSequence(Vec::new())
    }

    pub fn from_labels(labels: Vec<EdgeLabel>) -> Self {
        FlipSequence(labels)
    }

    pub fn as_slice(&self) -> &[EdgeLabel] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<EdgeLabel> {
        self.0
    }

    pub fn push(&mut self, label: EdgeLabel) {
        self.0.push(label);
    }

    pub fn extend_from(&mut self, other: &FlipSequence) {
        self.0.extend_from_slice(&other.0);
    }

    /// Number of distinct labels flipped.
    pub fn distinct_count(&self) -> usize {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Length divided by the number of distinct labels; 1 for duplicate-free
    /// sequences and 0 for the empty one.
    pub fn redundancy(&self) -> f64 {
        match self.distinct_count() {
            0 => 0.0,
            d => self.len() as f64 / d as f64,
        }
    }

    pub fn has_duplicates(&self) -> bool {
        self.distinct_count() != self.len()
    }

    /// Labels sorted ascending, duplicates kept.
    pub fn sorted_labels(&self) -> Vec<EdgeLabel> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }

    pub fn apply<C: Coordinate>(&self, t: &LabeledTriangulation<C>) -> Result<LabeledTriangulation<C>, SeqError> {
        apply(self, t)
    }
}

impl Deref for FlipSequence {
    type Target = [EdgeLabel];

    fn deref(&self) -> &[EdgeLabel] {
        &self.0
    }
}

impl From<Vec<EdgeLabel>> for FlipSequence {
    fn from(v: Vec<EdgeLabel>) -> Self {
        FlipSequence(v)
    }
}

impl From<Vec<u32>> for FlipSequence {
    fn from(v: Vec<u32>) -> Self {
        FlipSequence(v.into_iter().map(EdgeLabel).collect())
    }
}

impl<const N: usize> From<[u32; N]> for FlipSequence {
    fn from(v: [u32; N]) -> Self {
        FlipSequence(v.into_iter().map(EdgeLabel).collect())
    }
}

impl FromIterator<EdgeLabel> for FlipSequence {
    fn from_iter<I: IntoIterator<Item = EdgeLabel>>(iter: I) -> Self {
        FlipSequence(iter.into_iter().collect())
    }
}

impl fmt::Display for FlipSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("flip at index {index} (edge {label}) is invalid: {source}")]
    InvalidAt { index: usize, label: EdgeLabel, source: TriError },
    #[error("position {position} out of range for a sequence of length {len}")]
    OutOfRange { position: usize, len: usize },
    #[error("precondition violated at position {position}: {reason}")]
    Precondition { position: usize, reason: String },
}

fn precondition(position: usize, reason: impl Into<String>) -> SeqError {
    SeqError::Precondition { position, reason: reason.into() }
}

/// Applies `seq[range]` in place, reporting the first failing index.
fn apply_range<C: Coordinate>(
    seq: &[EdgeLabel],
    offset: usize,
    t: &mut LabeledTriangulation<C>,
) -> Result<(), SeqError> {
    for (k, &label) in seq.iter().enumerate() {
        t.flip_in_place(label).map_err(|source| SeqError::InvalidAt { index: offset + k, label, source })?;
    }
    Ok(())
}

/// The triangulation reached by flipping `seq` in order starting from `t`.
pub fn apply<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
) -> Result<LabeledTriangulation<C>, SeqError> {
    let mut s = t.clone();
    apply_range(seq, 0, &mut s)?;
    Ok(s)
}

/// State after the first `p` flips.
pub fn prefix_state<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
) -> Result<LabeledTriangulation<C>, SeqError> {
    if p > seq.len() {
        return Err(SeqError::OutOfRange { position: p, len: seq.len() });
    }
    let mut s = t.clone();
    apply_range(&seq[..p], 0, &mut s)?;
    Ok(s)
}

/// The reversed sequence; it undoes `seq` because every flip is an involution.
pub fn invert(seq: &FlipSequence) -> FlipSequence {
    seq.iter().rev().copied().collect()
}

/// Whether flipping `first` then `second` on `s` can be swapped: the supports
/// share no face, `second` is flippable on `s` and `first` is flippable after
/// `second`. `s` is restored before returning.
pub(crate) fn commutes_on<C: Coordinate>(
    s: &mut LabeledTriangulation<C>,
    first: EdgeLabel,
    second: EdgeLabel,
) -> Result<bool, TriError> {
    if first == second || s.support_overlap(first, second)? != 0 || !s.flippable(second)? {
        return Ok(false);
    }
    s.flip_unchecked(second);
    let ok = s.flippable(first);
    s.flip_unchecked(second);
    ok
}

/// Whether `[x, y, x]` from `s` can be rewritten as `[y, x]` followed by the
/// transposition of `x` and `y`: one shared face, `y` flippable on `s` and `x`
/// flippable after `y`. `s` is restored before returning.
pub(crate) fn transposable_on<C: Coordinate>(
    s: &mut LabeledTriangulation<C>,
    x: EdgeLabel,
    y: EdgeLabel,
) -> Result<bool, TriError> {
    if x == y || s.support_overlap(x, y)? != 1 || !s.flippable(y)? {
        return Ok(false);
    }
    s.flip_unchecked(y);
    let ok = s.flippable(x);
    s.flip_unchecked(y);
    ok
}

fn check_pair_position(seq: &FlipSequence, p: usize) -> Result<(), SeqError> {
    if p + 1 >= seq.len() {
        return Err(SeqError::OutOfRange { position: p, len: seq.len() });
    }
    Ok(())
}

/// Whether items `p` and `p + 1` commute on the triangulation reached after
/// the first `p` flips.
pub fn commutes_at<C: Coordinate>(seq: &FlipSequence, t: &LabeledTriangulation<C>, p: usize) -> Result<bool, SeqError> {
    check_pair_position(seq, p)?;
    let mut s = prefix_state(seq, t, p)?;
    commutes_on(&mut s, seq[p], seq[p + 1]).map_err(|source| SeqError::InvalidAt { index: p, label: seq[p], source })
}

/// Move 1: exchange the commuting items `p` and `p + 1`.
pub fn swap_adjacent<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
) -> Result<FlipSequence, SeqError> {
    if !commutes_at(seq, t, p)? {
        return Err(precondition(p, format!("{} and {} do not commute", seq[p], seq[p + 1])));
    }
    let mut out = seq.clone();
    out.0.swap(p, p + 1);
    Ok(out)
}

/// Move 2, reducing: remove the adjacent pair `[i, i]` at `p`.
pub fn cancel_pair<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
) -> Result<FlipSequence, SeqError> {
    check_pair_position(seq, p)?;
    if seq[p] != seq[p + 1] {
        return Err(precondition(p, format!("{} and {} differ", seq[p], seq[p + 1])));
    }
    let s = prefix_state(seq, t, p)?;
    if !s.flippable(seq[p]).map_err(|source| SeqError::InvalidAt { index: p, label: seq[p], source })? {
        return Err(precondition(p, format!("{} is not flippable", seq[p])));
    }
    let mut out = seq.0.clone();
    out.drain(p..p + 2);
    Ok(FlipSequence(out))
}

/// Move 2, expanding: insert `[i, i]` before item `p` (or at the end when
/// `p == len`); `i` must be flippable after the first `p` flips.
pub fn insert_pair<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
    i: EdgeLabel,
) -> Result<FlipSequence, SeqError> {
    let s = prefix_state(seq, t, p)?;
    match s.flippable(i) {
        Ok(true) => {}
        Ok(false) => return Err(precondition(p, format!("{i} is not flippable there"))),
        Err(e) => return Err(precondition(p, e.to_string())),
    }
    let mut out = seq.0.clone();
    out.splice(p..p, [i, i]);
    Ok(FlipSequence(out))
}

/// Swaps every occurrence of `i` and `j`.
pub fn relabel_sequence(seq: &FlipSequence, i: EdgeLabel, j: EdgeLabel) -> FlipSequence {
    seq.iter().map(|&k| swap_label(k, i, j)).collect()
}

#[inline]
pub(crate) fn swap_label(k: EdgeLabel, i: EdgeLabel, j: EdgeLabel) -> EdgeLabel {
    if k == i {
        j
    } else if k == j {
        i
    } else {
        k
    }
}

/// Move 3, reducing: `[x, y, x]` at `p` becomes `[y, x]` and the rest of the
/// sequence swaps `x` and `y`. The result reaches the same triangulation up to
/// that one transposition.
pub fn transposition_reduce<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
) -> Result<FlipSequence, SeqError> {
    if p + 2 >= seq.len() {
        return Err(SeqError::OutOfRange { position: p, len: seq.len() });
    }
    let (x, y) = (seq[p], seq[p + 1]);
    if seq[p + 2] != x || x == y {
        return Err(precondition(p, "expected a pattern [x, y, x] with x != y"));
    }
    let mut s = prefix_state(seq, t, p)?;
    let mut probe = s.clone();
    apply_range(&seq[p..p + 3], p, &mut probe)?;
    let ok = transposable_on(&mut s, x, y).map_err(|source| SeqError::InvalidAt { index: p, label: x, source })?;
    if !ok {
        return Err(precondition(p, format!("supports of {x} and {y} do not form a flippable pentagon")));
    }
    let mut out = seq.0[..p].to_vec();
    out.extend([y, x]);
    out.extend(seq.0[p + 3..].iter().map(|&k| swap_label(k, x, y)));
    Ok(FlipSequence(out))
}

/// Move 3, expanding: `[y, x]` at `p` becomes `[x, y, x]` and the rest of the
/// sequence swaps `x` and `y`.
pub fn transposition_expand<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    p: usize,
    x: EdgeLabel,
    y: EdgeLabel,
) -> Result<FlipSequence, SeqError> {
    check_pair_position(seq, p)?;
    if seq[p] != y || seq[p + 1] != x || x == y {
        return Err(precondition(p, format!("expected [{y}, {x}] with distinct labels")));
    }
    let mut s = prefix_state(seq, t, p)?;
    let mut probe = s.clone();
    apply_range(&seq[p..p + 2], p, &mut probe)?;
    let ok = transposable_on(&mut s, x, y).map_err(|source| SeqError::InvalidAt { index: p, label: y, source })?;
    if !ok {
        return Err(precondition(p, format!("supports of {x} and {y} do not form a flippable pentagon")));
    }
    let mut triple = s;
    for (k, l) in [x, y, x].into_iter().enumerate() {
        triple.flip_in_place(l).map_err(|e| precondition(p + k, format!("expanded triple is invalid: {e}")))?;
    }
    let mut out = seq.0[..p].to_vec();
    out.extend([x, y, x]);
    out.extend(seq.0[p + 2..].iter().map(|&k| swap_label(k, x, y)));
    Ok(FlipSequence(out))
}

/// One rewrite, recorded so a chain can be replayed or undone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStep {
    Commute { position: usize },
    CancelPair { position: usize, label: EdgeLabel },
    InsertPair { position: usize, label: EdgeLabel },
    TranspositionReduce { position: usize, x: EdgeLabel, y: EdgeLabel },
    TranspositionExpand { position: usize, x: EdgeLabel, y: EdgeLabel },
}

impl RewriteStep {
    pub fn apply<C: Coordinate>(
        &self,
        seq: &FlipSequence,
        t: &LabeledTriangulation<C>,
    ) -> Result<FlipSequence, SeqError> {
        match *self {
            RewriteStep::Commute { position } => swap_adjacent(seq, t, position),
            RewriteStep::CancelPair { position, label } => {
                if seq.get(position) != Some(&label) {
                    return Err(precondition(position, format!("expected {label}")));
                }
                cancel_pair(seq, t, position)
            }
            RewriteStep::InsertPair { position, label } => insert_pair(seq, t, position, label),
            RewriteStep::TranspositionReduce { position, x, y } => {
                if seq.get(position) != Some(&x) || seq.get(position + 1) != Some(&y) {
                    return Err(precondition(position, format!("expected [{x}, {y}, {x}]")));
                }
                transposition_reduce(seq, t, position)
            }
            RewriteStep::TranspositionExpand { position, x, y } => transposition_expand(seq, t, position, x, y),
        }
    }

    /// The step that undoes this one on its output.
    pub fn inverse(&self) -> RewriteStep {
        match *self {
            RewriteStep::Commute { position } => RewriteStep::Commute { position },
            RewriteStep::CancelPair { position, label } => RewriteStep::InsertPair { position, label },
            RewriteStep::InsertPair { position, label } => RewriteStep::CancelPair { position, label },
            RewriteStep::TranspositionReduce { position, x, y } => RewriteStep::TranspositionExpand { position, x, y },
            RewriteStep::TranspositionExpand { position, x, y } => RewriteStep::TranspositionReduce { position, x, y },
        }
    }

    pub fn length_delta(&self) -> isize {
        match self {
            RewriteStep::Commute { .. } => 0,
            RewriteStep::CancelPair { .. } => -2,
            RewriteStep::InsertPair { .. } => 2,
            RewriteStep::TranspositionReduce { .. } => -1,
            RewriteStep::TranspositionExpand { .. } => 1,
        }
    }

    /// Whether the output reaches exactly the same labeled triangulation.
    pub fn preserves_labels(&self) -> bool {
        !matches!(self, RewriteStep::TranspositionReduce { .. } | RewriteStep::TranspositionExpand { .. })
    }
}

/// Replays a chain of rewrites, returning every intermediate sequence.
pub fn replay<C: Coordinate>(
    seq: &FlipSequence,
    t: &LabeledTriangulation<C>,
    steps: &[RewriteStep],
) -> Result<Vec<FlipSequence>, SeqError> {
    let mut out = vec![seq.clone()];
    for step in steps {
        let next = step.apply(out.last().expect("non-empty"), t)?;
        out.push(next);
    }
    Ok(out)
}

/// Triangulation state after a prefix of a sequence, stepped one flip at a time.
pub(crate) struct Cursor<C> {
    pub state: LabeledTriangulation<C>,
    applied: Vec<EdgeLabel>,
}

impl<C: Coordinate> Cursor<C> {
    pub fn new(base: &LabeledTriangulation<C>) -> Self {
        Cursor { state: base.clone(), applied: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.applied.len()
    }

    pub fn forward(&mut self, label: EdgeLabel) -> Result<(), TriError> {
        self.state.flip_in_place(label)?;
        self.applied.push(label);
        Ok(())
    }

    pub fn back(&mut self) {
        let label = self.applied.pop().expect("cursor above base");
        self.state.flip_unchecked(label);
    }

    pub fn back_to(&mut self, k: usize) {
        while self.applied.len() > k {
            self.back();
        }
    }
}

/// Decides whether `b` can be reordered into `a` by swapping commuting
/// neighbors: each item of `a`, in turn, is bubbled from its earliest
/// remaining occurrence in `b` down to its target position.
///
/// Complete for duplicate-free minimal sequences on convex polygons; elsewhere
/// a `false` answer may be a missed reordering.
pub fn strongly_equiv_by_commutativity<C: Coordinate>(
    a: &FlipSequence,
    b: &FlipSequence,
    t: &LabeledTriangulation<C>,
) -> Result<bool, SeqError> {
    apply(a, t)?;
    apply(b, t)?;
    if a.len() != b.len() || a.sorted_labels() != b.sorted_labels() {
        return Ok(false);
    }
    let mut work = b.0.clone();
    let mut cursor = Cursor::new(t);
    for p in 0..a.len() {
        let Some(mut q) = (p..work.len()).find(|&q| work[q] == a[p]) else {
            return Ok(false);
        };
        if q > p {
            for (k, &label) in work.iter().enumerate().take(q - 1).skip(p) {
                cursor.forward(label).map_err(|source| SeqError::InvalidAt { index: k, label, source })?;
            }
            while q > p {
                let ok = commutes_on(&mut cursor.state, work[q - 1], work[q])
                    .map_err(|source| SeqError::InvalidAt { index: q, label: work[q], source })?;
                if !ok {
                    return Ok(false);
                }
                work.swap(q - 1, q);
                q -= 1;
                if q > p {
                    cursor.back();
                }
            }
        }
        debug_assert_eq!(cursor.len(), p);
        cursor.forward(work[p]).map_err(|source| SeqError::InvalidAt { index: p, label: work[p], source })?;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tri::make_fan;

    fn l(v: u32) -> EdgeLabel {
        EdgeLabel(v)
    }

    fn seq<const N: usize>(v: [u32; N]) -> FlipSequence {
        FlipSequence::from(v)
    }

    #[test]
    fn empty_sequence_is_identity() {
        let t = make_fan(6, 0).unwrap();
        assert!(apply(&FlipSequence::new(), &t).unwrap().strong_eq(&t));
    }

    #[test]
    fn double_flip_is_identity() {
        let t = make_fan(6, 0).unwrap();
        assert!(apply(&seq([7, 7]), &t).unwrap().strong_eq(&t));
    }

    #[test]
    fn apply_reports_first_bad_index() {
        let t = make_fan(5, 0).unwrap();
        let err = apply(&seq([5, 6, 2, 5]), &t).unwrap_err();
        assert!(matches!(err, SeqError::InvalidAt { index: 2, label: EdgeLabel(2), .. }));
    }

    #[test]
    fn pentagon_five_flips_transpose() {
        let t = make_fan(5, 0).unwrap();
        let p = t.transpose_labels(l(5), l(6)).unwrap();
        assert!(apply(&seq([5, 6, 5, 6, 5]), &t).unwrap().strong_eq(&p));
        assert!(apply(&seq([6, 5, 6, 5, 6]), &t).unwrap().strong_eq(&p));
    }

    #[test]
    fn invert_reverses() {
        assert_eq!(invert(&seq([1, 2, 3])), seq([3, 2, 1]));
        assert_eq!(invert(&FlipSequence::new()), FlipSequence::new());
    }

    #[test]
    fn commutes_on_disjoint_supports_only() {
        let t7 = make_fan(7, 0).unwrap();
        // apex-2 is label 7, apex-5 is label 10
        assert!(commutes_at(&seq([7, 10]), &t7, 0).unwrap());
        let t5 = make_fan(5, 0).unwrap();
        assert!(!commutes_at(&seq([5, 6]), &t5, 0).unwrap());
        assert!(matches!(commutes_at(&seq([5]), &t5, 0), Err(SeqError::OutOfRange { .. })));
    }

    #[test]
    fn swap_preserves_result() {
        let t7 = make_fan(7, 0).unwrap();
        let s = seq([7, 10]);
        let w = swap_adjacent(&s, &t7, 0).unwrap();
        assert_eq!(w, seq([10, 7]));
        assert!(apply(&s, &t7).unwrap().strong_eq(&apply(&w, &t7).unwrap()));
        assert_eq!(swap_adjacent(&w, &t7, 0).unwrap(), s);
        let t5 = make_fan(5, 0).unwrap();
        assert!(matches!(swap_adjacent(&seq([5, 6]), &t5, 0), Err(SeqError::Precondition { .. })));
    }

    #[test]
    fn cancel_and_insert() {
        let t = make_fan(6, 0).unwrap();
        assert_eq!(cancel_pair(&seq([7, 7]), &t, 0).unwrap(), FlipSequence::new());
        let s = seq([6, 8]);
        let ins = insert_pair(&s, &t, 1, l(7)).unwrap();
        assert_eq!(ins, seq([6, 7, 7, 8]));
        assert_eq!(cancel_pair(&ins, &t, 1).unwrap(), s);
        assert!(insert_pair(&s, &t, 1, l(0)).is_err());
        assert!(cancel_pair(&seq([6, 7]), &t, 0).is_err());
    }

    #[test]
    fn relabel_swaps_both_ways() {
        assert_eq!(relabel_sequence(&seq([1, 3, 2, 1]), l(1), l(2)), seq([2, 3, 1, 2]));
        let s = seq([4, 1, 2, 9]);
        assert_eq!(relabel_sequence(&relabel_sequence(&s, l(1), l(9)), l(1), l(9)), s);
    }

    #[test]
    fn transposition_reduce_on_pentagon() {
        let t = make_fan(5, 0).unwrap();
        let s = seq([5, 6, 5]);
        let r = transposition_reduce(&s, &t, 0).unwrap();
        assert_eq!(r, seq([6, 5]));
        let lhs = apply(&s, &t).unwrap();
        let rhs = apply(&r, &t).unwrap().transpose_labels(l(5), l(6)).unwrap();
        assert!(lhs.strong_eq(&rhs));
    }

    #[test]
    fn transposition_reduce_relabels_suffix() {
        let t = make_fan(6, 0).unwrap();
        // 6 = (0,2), 7 = (0,3), 8 = (0,4)
        let s = seq([6, 7, 6, 6, 8]);
        let r = transposition_reduce(&s, &t, 0).unwrap();
        assert_eq!(r, seq([7, 6, 7, 8]));
        assert!(apply(&s, &t).unwrap().weak_eq(&apply(&r, &t).unwrap()));
    }

    #[test]
    fn transposition_expand_inverts_reduce() {
        let t = make_fan(5, 0).unwrap();
        let e = transposition_expand(&seq([6, 5]), &t, 0, l(5), l(6)).unwrap();
        assert_eq!(e, seq([5, 6, 5]));
        assert!(apply(&e, &t).unwrap().weak_eq(&apply(&seq([6, 5]), &t).unwrap()));
        assert_eq!(transposition_reduce(&e, &t, 0).unwrap(), seq([6, 5]));
    }

    #[test]
    fn rewrite_steps_invert() {
        let t = make_fan(6, 0).unwrap();
        let s = seq([6, 8, 7]);
        let steps = [
            RewriteStep::InsertPair { position: 1, label: l(7) },
            RewriteStep::CancelPair { position: 1, label: l(7) },
        ];
        let chain = replay(&s, &t, &steps).unwrap();
        assert_eq!(chain.last().unwrap(), &s);
        for step in &steps {
            assert_eq!(step.inverse().inverse(), *step);
            assert_eq!(step.length_delta(), -step.inverse().length_delta());
        }
    }

    #[test]
    fn commutativity_equivalence() {
        let t7 = make_fan(7, 0).unwrap();
        let s = seq([7, 10, 8]);
        assert!(strongly_equiv_by_commutativity(&s, &s, &t7).unwrap());
        assert!(strongly_equiv_by_commutativity(&seq([7, 10]), &seq([10, 7]), &t7).unwrap());
        let t5 = make_fan(5, 0).unwrap();
        assert!(!strongly_equiv_by_commutativity(&seq([5, 6]), &seq([6, 5]), &t5).unwrap());
    }
}
