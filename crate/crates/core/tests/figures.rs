//! Small hand-checkable instances: the heptagon rewrite chain, the sphere
//! counter-example with an interior vertex, and a blocked elimination.

use std::collections::{HashSet, VecDeque};

use flipred::algebra::{apply, swap_adjacent, transposition_expand, transposition_reduce};
use flipred::io::{parse_ltri, write_ltri};
use flipred::ngon::{flip_distance_bfs, weak_equiv_ngon, UnlabeledNgon};
use flipred::reducer::{is_reduced_oracle, reduce, try_eliminate, Elimination};
use flipred::{make_fan, EdgeLabel, FlipSequence, LabeledTriangulation, Point, Setting, Triangulation};

fn seq<const N: usize>(v: [u32; N]) -> FlipSequence {
    FlipSequence::from(v)
}

/// Every labeled state reachable from `start`, one per distinct serialization.
fn closure(start: &Triangulation, depth: usize) -> Vec<Triangulation> {
    let mut seen = HashSet::new();
    seen.insert(write_ltri(start));
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([(start.clone(), 0)]);
    while let Some((t, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for l in t.interior_labels().collect::<Vec<_>>() {
            if t.flippable(l).unwrap() {
                let s = t.flip(l).unwrap();
                if seen.insert(write_ltri(&s)) {
                    out.push(s.clone());
                    queue.push_back((s, d + 1));
                }
            }
        }
    }
    out
}

// Heptagon: the fan at 0 with diagonal (0,5) flipped to (4,6). Writing the
// chain's labels 1..4 as 10, 9, 8, 7 gives the six- and five-flip sequences.
fn heptagon() -> Triangulation {
    apply(&seq([10]), &make_fan(7, 0).unwrap()).unwrap()
}

const SIX: [u32; 6] = [7, 8, 9, 10, 8, 7];
const FIVE: [u32; 5] = [10, 9, 8, 7, 10];

#[test]
fn heptagon_six_flip_sequence_is_reduced() {
    let t = heptagon();
    let six = seq(SIX);
    let (out, report) = reduce(&six, &t).unwrap();
    assert_eq!(out, six);
    assert_eq!(report.gain(), 0);
    assert!(is_reduced_oracle(&six, &t, 12).unwrap());
}

#[test]
fn heptagon_reduced_sequence_is_not_minimal() {
    let t = heptagon();
    assert!(weak_equiv_ngon(&seq(SIX), &seq(FIVE), &t, 0).unwrap());
    let a = UnlabeledNgon::from_labeled(&t).unwrap();
    let b = UnlabeledNgon::from_labeled(&apply(&seq(SIX), &t).unwrap()).unwrap();
    assert_eq!(flip_distance_bfs(&a, &b).unwrap(), 5);
}

#[test]
fn heptagon_rewrite_chain() {
    let t = heptagon();
    let l = EdgeLabel;
    let s = transposition_expand(&seq(SIX), &t, 2, l(10), l(9)).unwrap();
    assert_eq!(s, seq([7, 8, 10, 9, 10, 8, 7]));
    let s = swap_adjacent(&s, &t, 1).unwrap();
    let s = swap_adjacent(&s, &t, 4).unwrap();
    assert_eq!(s, seq([7, 10, 8, 9, 8, 10, 7]));
    let s = transposition_reduce(&s, &t, 2).unwrap();
    assert_eq!(s, seq([7, 10, 9, 8, 10, 7]));
    let s = swap_adjacent(&s, &t, 0).unwrap();
    let s = swap_adjacent(&s, &t, 1).unwrap();
    let s = swap_adjacent(&s, &t, 4).unwrap();
    assert_eq!(s, seq([10, 9, 7, 8, 7, 10]));
    let s = transposition_reduce(&s, &t, 2).unwrap();
    assert_eq!(s, seq(FIVE));
    assert!(apply(&s, &t).unwrap().weak_eq(&apply(&seq(SIX), &t).unwrap()));
}

/// Searches labeled heptagons for instances of the chain's shape:
/// `[d, c, b, a, c, d]` reduced, and weakly equal to `[a, b, c, d, a]`.
#[test]
fn heptagon_instance_is_found_by_search() {
    let mut found = Vec::new();
    for t in closure(&make_fan(7, 0).unwrap(), 4) {
        let inner: Vec<EdgeLabel> = t.interior_labels().collect();
        for &a in &inner {
            for &b in &inner {
                for &c in &inner {
                    for &d in &inner {
                        if HashSet::from([a, b, c, d]).len() < 4 {
                            continue;
                        }
                        let six = FlipSequence::from_labels(vec![d, c, b, a, c, d]);
                        let five = FlipSequence::from_labels(vec![a, b, c, d, a]);
                        if apply(&six, &t).is_err() || apply(&five, &t).is_err() {
                            continue;
                        }
                        if reduce(&six, &t).unwrap().0 == six
                            && is_reduced_oracle(&six, &t, 12).unwrap()
                            && weak_equiv_ngon(&six, &five, &t, 0).unwrap()
                        {
                            found.push((write_ltri(&t), [a.0, b.0, c.0, d.0]));
                        }
                    }
                }
            }
        }
    }
    assert!(found.contains(&(write_ltri(&heptagon()), [10, 9, 8, 7])));
}

// A square 0-1-2-3 closed into a sphere, with its diagonal (0,2) doubled and
// vertex 4 inside triangle 0-1-2.
const SPHERE: &str = "ltri 1
setting combinatorial
vertices 5
edges 9
0 0 1
1 2 4
2 1 4
3 0 4
4 1 2
5 0 2
6 2 3
7 0 3
8 0 2
faces 6
-0 +3 -2
+0 +4 -5
-1 -4 +2
+1 -3 +8
+5 +6 -7
-6 -8 +7
";

#[test]
fn interior_vertex_duplicate_free_identity() {
    let t = parse_ltri(SPHERE).unwrap();
    let s = seq([0, 1, 3, 4]);
    assert!(!s.has_duplicates());
    let end = apply(&s, &t).unwrap();
    assert!(end.weak_eq(&t));
    assert!(!end.strong_eq(&t));
    let (out, _) = reduce(&s, &t).unwrap();
    assert_eq!(out, s);
}

/// With simple planar triangulations and fixed vertices the first flip adds
/// an edge that no later flip removes, so no such cycle exists; the square
/// with one interior point has none, whatever the point.
#[test]
fn planar_square_has_no_duplicate_free_cycle() {
    for p in [[1i64, 2], [3, 1], [2, 3]] {
        let pts: Vec<Point<i64>> = vec![[0, 0], [4, 0], [4, 4], [0, 4], p];
        let start = LabeledTriangulation::from_triangles(
            Setting::GeometricPlanar,
            5,
            Some(pts),
            &[[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
        )
        .unwrap();
        for t in closure(&start, 6) {
            let inner: Vec<EdgeLabel> = t.interior_labels().collect();
            for perm in permutations(&inner, 4) {
                if let Ok(end) = apply(&FlipSequence::from_labels(perm), &t) {
                    assert!(!end.weak_eq(&t));
                }
            }
        }
    }
}

fn permutations(items: &[EdgeLabel], k: usize) -> Vec<Vec<EdgeLabel>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let rest: Vec<EdgeLabel> = items.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y).collect();
        for mut tail in permutations(&rest, k - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

#[test]
fn inner_pair_blocks_outer_occurrence() {
    // 6 = (0,2) and 7 = (0,3) share the face (0,2,3)
    let t = make_fan(6, 0).unwrap();
    let s = seq([6, 7, 7, 6]);
    let (outcome, after) = try_eliminate(&s, &t, 0).unwrap();
    assert_eq!(outcome, Elimination::NotReducible);
    assert_eq!(after, s);
    let (outcome, after) = try_eliminate(&s, &t, 1).unwrap();
    assert_eq!(outcome, Elimination::Cancelled2);
    assert_eq!(after, seq([6, 6]));
    assert!(reduce(&s, &t).unwrap().0.is_empty());
}

#[test]
fn every_valid_triple_on_small_polygons_reduces() {
    for n in 5..=7 {
        let fan = make_fan(n, 0).unwrap();
        for t in closure(&fan, 3) {
            let inner: Vec<EdgeLabel> = t.interior_labels().collect();
            for &i in &inner {
                for &k in &inner {
                    let s = FlipSequence::from_labels(vec![i, k, i]);
                    if i == k || apply(&s, &t).is_err() {
                        continue;
                    }
                    let (outcome, _) = try_eliminate(&s, &t, 0).unwrap();
                    assert_ne!(outcome, Elimination::NotReducible, "{s} on {}", write_ltri(&t));
                }
            }
        }
    }
}
