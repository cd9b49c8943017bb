//! Coordinate scalars and exact geometric predicates.
//!
//! Every predicate returns an exact sign. Integer coordinates take an `i128`
//! fast path and fall back to arbitrary precision when an intermediate product
//! would overflow; floating-point coordinates are converted losslessly to
//! rationals before evaluation.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};

/// A planar point.
pub type Point<C> = [C; 2];

/// Scalar type usable as a vertex coordinate.
///
/// `orient` is `Greater` when `a, b, c` turn counter-clockwise, `Less` when
/// they turn clockwise and `Equal` when collinear. `in_circle` is `Greater`
/// when `d` lies strictly inside the circle through the counter-clockwise
/// triangle `a, b, c`.
pub trait Coordinate: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn orient(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>) -> Ordering;

    fn in_circle(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>, d: &Point<Self>) -> Ordering;

    /// Whether the value can take part in exact predicates (finite floats only).
    fn is_admissible(&self) -> bool {
        true
    }

    /// Whether the two points coincide.
    fn same_point(a: &Point<Self>, b: &Point<Self>) -> bool {
        a == b
    }

    /// Strict lexicographic order on points, used to test collinear overlap.
    fn lex_cmp(a: &Point<Self>, b: &Point<Self>) -> Ordering;
}

fn sign<R: Signed>(v: &R) -> Ordering {
    if v.is_positive() {
        Ordering::Greater
    } else if v.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Orientation determinant evaluated in an exact ring.
pub fn orient_in<R>(a: &Point<R>, b: &Point<R>, c: &Point<R>) -> Ordering
where
    R: Num + Signed + Clone,
{
    let acx = a[0].clone() - c[0].clone();
    let bcx = b[0].clone() - c[0].clone();
    let acy = a[1].clone() - c[1].clone();
    let bcy = b[1].clone() - c[1].clone();
    sign(&(acx * bcy - acy * bcx))
}

/// In-circle determinant evaluated in an exact ring.
pub fn in_circle_in<R>(a: &Point<R>, b: &Point<R>, c: &Point<R>, d: &Point<R>) -> Ordering
where
    R: Num + Signed + Clone,
{
    let adx = a[0].clone() - d[0].clone();
    let ady = a[1].clone() - d[1].clone();
    let bdx = b[0].clone() - d[0].clone();
    let bdy = b[1].clone() - d[1].clone();
    let cdx = c[0].clone() - d[0].clone();
    let cdy = c[1].clone() - d[1].clone();
    let alift = adx.clone() * adx.clone() + ady.clone() * ady.clone();
    let blift = bdx.clone() * bdx.clone() + bdy.clone() * bdy.clone();
    let clift = cdx.clone() * cdx.clone() + cdy.clone() * cdy.clone();
    let det = alift * (bdx.clone() * cdy.clone() - bdy.clone() * cdx.clone())
        + blift * (cdx * ady.clone() - cdy * adx.clone())
        + clift * (adx * bdy - ady * bdx);
    sign(&det)
}

fn big(p: &Point<i64>) -> Point<BigInt> {
    [BigInt::from(p[0]), BigInt::from(p[1])]
}

fn orient_i128(a: &Point<i64>, b: &Point<i64>, c: &Point<i64>) -> Option<Ordering> {
    let acx = a[0] as i128 - c[0] as i128;
    let bcx = b[0] as i128 - c[0] as i128;
    let acy = a[1] as i128 - c[1] as i128;
    let bcy = b[1] as i128 - c[1] as i128;
    let det = acx.checked_mul(bcy)?.checked_sub(acy.checked_mul(bcx)?)?;
    Some(det.cmp(&0))
}

fn in_circle_i128(a: &Point<i64>, b: &Point<i64>, c: &Point<i64>, d: &Point<i64>) -> Option<Ordering> {
    let adx = a[0] as i128 - d[0] as i128;
    let ady = a[1] as i128 - d[1] as i128;
    let bdx = b[0] as i128 - d[0] as i128;
    let bdy = b[1] as i128 - d[1] as i128;
    let cdx = c[0] as i128 - d[0] as i128;
    let cdy = c[1] as i128 - d[1] as i128;
    let lift = |x: i128, y: i128| x.checked_mul(x)?.checked_add(y.checked_mul(y)?);
    let cross = |p: i128, q: i128, r: i128, s: i128| p.checked_mul(q)?.checked_sub(r.checked_mul(s)?);
    let t1 = lift(adx, ady)?.checked_mul(cross(bdx, cdy, bdy, cdx)?)?;
    let t2 = lift(bdx, bdy)?.checked_mul(cross(cdx, ady, cdy, adx)?)?;
    let t3 = lift(cdx, cdy)?.checked_mul(cross(adx, bdy, ady, bdx)?)?;
    Some(t1.checked_add(t2)?.checked_add(t3)?.cmp(&0))
}

impl Coordinate for i64 {
    fn orient(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>) -> Ordering {
        orient_i128(a, b, c).unwrap_or_else(|| orient_in(&big(a), &big(b), &big(c)))
    }

    fn in_circle(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>, d: &Point<Self>) -> Ordering {
        in_circle_i128(a, b, c, d).unwrap_or_else(|| in_circle_in(&big(a), &big(b), &big(c), &big(d)))
    }

    fn lex_cmp(a: &Point<Self>, b: &Point<Self>) -> Ordering {
        a.cmp(b)
    }
}

impl Coordinate for i32 {
    fn orient(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>) -> Ordering {
        let w = |p: &Point<i32>| [p[0] as i64, p[1] as i64];
        i64::orient(&w(a), &w(b), &w(c))
    }

    fn in_circle(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>, d: &Point<Self>) -> Ordering {
        let w = |p: &Point<i32>| [p[0] as i64, p[1] as i64];
        i64::in_circle(&w(a), &w(b), &w(c), &w(d))
    }

    fn lex_cmp(a: &Point<Self>, b: &Point<Self>) -> Ordering {
        a.cmp(b)
    }
}

macro_rules! impl_exact_ring {
    ($t:ty) => {
        impl Coordinate for $t {
            fn orient(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>) -> Ordering {
                orient_in(a, b, c)
            }

            fn in_circle(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>, d: &Point<Self>) -> Ordering {
                in_circle_in(a, b, c, d)
            }

            fn lex_cmp(a: &Point<Self>, b: &Point<Self>) -> Ordering {
                a.cmp(b)
            }
        }
    };
}

impl_exact_ring!(BigInt);
impl_exact_ring!(BigRational);

macro_rules! impl_float {
    ($t:ty) => {
        impl Coordinate for $t {
            fn orient(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>) -> Ordering {
                orient_in(&rational(a), &rational(b), &rational(c))
            }

            fn in_circle(a: &Point<Self>, b: &Point<Self>, c: &Point<Self>, d: &Point<Self>) -> Ordering {
                in_circle_in(&rational(a), &rational(b), &rational(c), &rational(d))
            }

            fn is_admissible(&self) -> bool {
                self.is_finite()
            }

            fn lex_cmp(a: &Point<Self>, b: &Point<Self>) -> Ordering {
                a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
            }
        }
    };
}

impl_float!(f32);
impl_float!(f64);

fn rational<F: Into<f64> + Copy>(p: &Point<F>) -> Point<BigRational> {
    let conv = |v: F| BigRational::from_float(v.into()).unwrap_or_else(BigRational::zero);
    [conv(p[0]), conv(p[1])]
}

/// In-circle test under a symbolic perturbation of the lifted heights.
///
/// Each point's lift `x² + y²` is raised by an infinitesimal that shrinks
/// with the point's index, so lower indices dominate ties. For points with no
/// three collinear the result is never `Equal`, and the induced Delaunay
/// triangulation is unique.
pub fn in_circle_perturbed<C: Coordinate>(pts: [(&Point<C>, u32); 4]) -> Ordering {
    let exact = C::in_circle(pts[0].0, pts[1].0, pts[2].0, pts[3].0);
    if exact != Ordering::Equal {
        return exact;
    }
    let mut rows = [0usize, 1, 2, 3];
    rows.sort_by_key(|&r| pts[r].1);
    for &row in &rows {
        let others: Vec<usize> = (0..4).filter(|&r| r != row).collect();
        let minor = C::orient(pts[others[0]].0, pts[others[1]].0, pts[others[2]].0);
        if minor == Ordering::Equal {
            continue;
        }
        // cofactor sign of (row, lift column) in the 4x4 lifted determinant
        return if row % 2 == 0 { minor } else { minor.reverse() };
    }
    Ordering::Equal
}

/// Whether the two closed segments share any point other than a common endpoint,
/// or an endpoint of one lies in the relative interior of the other.
pub fn segments_conflict<C: Coordinate>(p: &Point<C>, q: &Point<C>, r: &Point<C>, s: &Point<C>) -> bool {
    let shared = [(p, r), (p, s), (q, r), (q, s)].iter().filter(|(a, b)| C::same_point(a, b)).count();
    if shared == 2 {
        return true;
    }
    let o1 = C::orient(p, q, r);
    let o2 = C::orient(p, q, s);
    let o3 = C::orient(r, s, p);
    let o4 = C::orient(r, s, q);
    if o1 != Ordering::Equal && o2 != Ordering::Equal && o3 != Ordering::Equal && o4 != Ordering::Equal {
        return o1 != o2 && o3 != o4 && shared == 0;
    }
    let strictly_inside = |a: &Point<C>, b: &Point<C>, x: &Point<C>| {
        C::orient(a, b, x) == Ordering::Equal
            && !C::same_point(a, x)
            && !C::same_point(b, x)
            && C::lex_cmp(a, x) == C::lex_cmp(x, b)
    };
    strictly_inside(p, q, r) || strictly_inside(p, q, s) || strictly_inside(r, s, p) || strictly_inside(r, s, q)
}
