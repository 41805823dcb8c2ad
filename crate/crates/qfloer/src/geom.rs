//! Exact planar primitives used by the cell-by-cell curve realizer.
//!
//! Everything is done over the rationals. There is no epsilon anywhere:
//! degenerate configurations are reported to the caller, which perturbs the
//! polygon model (never the combinatorial data) and retries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qr(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    pub fn new(x: Q, y: Q) -> Self {
        Pt { x, y }
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Pt) -> Pt {
        Pt::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, s: &Q) -> Pt {
        Pt::new(&self.x * s, &self.y * s)
    }
}

/// 2d cross product of vectors `a` and `b`.
pub fn cross(a: &Pt, b: &Pt) -> Q {
    &a.x * &b.y - &a.y * &b.x
}

/// Orientation of the triple `(o, a, b)`: positive iff counterclockwise.
pub fn orient(o: &Pt, a: &Pt, b: &Pt) -> Q {
    cross(&a.sub(o), &b.sub(o))
}

pub fn lerp(a: &Pt, b: &Pt, t: &Q) -> Pt {
    a.add(&b.sub(a).scale(t))
}

/// Rational point on the unit circle at tan-half-angle parameter `t`.
///
/// As `t` runs over the rationals in increasing order the point moves
/// counterclockwise from just above the angle `-pi` around to just below it,
/// so sorting parameters gives convex position for free.
pub fn circle_point(t: &Q) -> Pt {
    let t2 = t * t;
    let den = &t2 + Q::one();
    Pt::new((Q::one() - &t2) / &den, (t + t) / den)
}

/// Relation between two closed segments, assuming the caller only cares about
/// transverse interior crossings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegRel {
    Disjoint,
    /// One transverse crossing of the two interiors. `t` and `s` are the
    /// affine parameters of the crossing on the first and second segment.
    Proper { p: Pt, t: Q, s: Q },
    /// Endpoint touching, tangency or collinear overlap. The overlay treats
    /// this as a failure of general position and retries with a different
    /// polygon model.
    Degenerate,
}

pub fn seg_intersect(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> SegRel {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);

    let s12 = (d1.is_positive() && d2.is_negative()) || (d1.is_negative() && d2.is_positive());
    let s34 = (d3.is_positive() && d4.is_negative()) || (d3.is_negative() && d4.is_positive());

    if s12 && s34 {
        // t = d1 / (d1 - d2) parameterizes the crossing along (a, b).
        let t = &d1 / (&d1 - &d2);
        let s = &d3 / (&d3 - &d4);
        let p = lerp(a, b, &t);
        return SegRel::Proper { p, t, s };
    }

    if d1.is_zero() || d2.is_zero() || d3.is_zero() || d4.is_zero() {
        // Any touching configuration, including full collinearity. Check
        // whether the segments actually meet; separated collinear segments
        // are honestly disjoint.
        if touches(a, b, c, d) {
            return SegRel::Degenerate;
        }
    }
    SegRel::Disjoint
}

fn touches(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> bool {
    on_segment(c, d, a) || on_segment(c, d, b) || on_segment(a, b, c) || on_segment(a, b, d)
}

/// True iff `p` lies on the closed segment `(a, b)`.
pub fn on_segment(a: &Pt, b: &Pt, p: &Pt) -> bool {
    if !orient(a, b, p).is_zero() {
        return false;
    }
    let lo_x = if a.x <= b.x { &a.x } else { &b.x };
    let hi_x = if a.x <= b.x { &b.x } else { &a.x };
    let lo_y = if a.y <= b.y { &a.y } else { &b.y };
    let hi_y = if a.y <= b.y { &b.y } else { &a.y };
    lo_x <= &p.x && &p.x <= hi_x && lo_y <= &p.y && &p.y <= hi_y
}

/// Angular comparison of direction vectors over `[0, 2pi)` measured from the
/// positive x axis. Used to sort half-edges around an arrangement vertex.
pub fn dir_cmp(a: &Pt, b: &Pt) -> Ordering {
    let ha = half(a);
    let hb = half(b);
    if ha != hb {
        return ha.cmp(&hb);
    }
    let c = cross(a, b);
    if c.is_positive() {
        Ordering::Less
    } else if c.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

fn half(v: &Pt) -> u8 {
    if v.y.is_positive() || (v.y.is_zero() && v.x.is_positive()) {
        0
    } else {
        1
    }
}

/// Twice the signed area of a closed polygonal cycle.
pub fn signed_area2(cycle: &[Pt]) -> Q {
    let mut acc = Q::zero();
    for i in 0..cycle.len() {
        let a = &cycle[i];
        let b = &cycle[(i + 1) % cycle.len()];
        acc += cross(a, b);
    }
    acc
}

/// Even-odd point location against a polygonal cycle. `None` means the point
/// lies exactly on the boundary.
pub fn point_in_cycle(p: &Pt, cycle: &[Pt]) -> Option<bool> {
    let mut inside = false;
    for i in 0..cycle.len() {
        let a = &cycle[i];
        let b = &cycle[(i + 1) % cycle.len()];
        if on_segment(a, b, p) {
            return None;
        }
        // Horizontal ray to +infinity, half-open edge rule.
        let straddles = (a.y > p.y) != (b.y > p.y);
        if straddles {
            // x coordinate of the edge at height p.y
            let t = (&p.y - &a.y) / (&b.y - &a.y);
            let x = &a.x + &t * (&b.x - &a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    Some(inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_are_on_the_unit_circle_and_ccw() {
        let params: Vec<Q> = vec![qi(-3), qi(-1), qr(-1, 2), Q::zero(), qr(1, 2), qi(1), qi(4)];
        let pts: Vec<Pt> = params.iter().map(circle_point).collect();
        for p in &pts {
            assert_eq!(&p.x * &p.x + &p.y * &p.y, qi(1));
        }
        // strict convex position in ccw order
        let n = pts.len();
        for i in 0..n {
            let o = orient(&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]);
            assert!(o.is_positive(), "not ccw at {}", i);
        }
    }

    #[test]
    fn proper_crossing_has_correct_point_and_parameters() {
        let a = Pt::new(qi(0), qi(0));
        let b = Pt::new(qi(2), qi(2));
        let c = Pt::new(qi(0), qi(2));
        let d = Pt::new(qi(2), qi(0));
        match seg_intersect(&a, &b, &c, &d) {
            SegRel::Proper { p, t, s } => {
                assert_eq!(p, Pt::new(qi(1), qi(1)));
                assert_eq!(t, qr(1, 2));
                assert_eq!(s, qr(1, 2));
            }
            other => panic!("expected proper crossing, got {:?}", other),
        }
    }

    #[test]
    fn endpoint_touch_is_degenerate_not_proper() {
        let a = Pt::new(qi(0), qi(0));
        let b = Pt::new(qi(2), qi(0));
        let c = Pt::new(qi(1), qi(0));
        let d = Pt::new(qi(1), qi(3));
        assert_eq!(seg_intersect(&a, &b, &c, &d), SegRel::Degenerate);
        // T-touch from the other side counts too
        assert_eq!(seg_intersect(&c, &d, &a, &b), SegRel::Degenerate);
    }

    #[test]
    fn separated_collinear_segments_are_disjoint() {
        let a = Pt::new(qi(0), qi(0));
        let b = Pt::new(qi(1), qi(0));
        let c = Pt::new(qi(2), qi(0));
        let d = Pt::new(qi(3), qi(0));
        assert_eq!(seg_intersect(&a, &b, &c, &d), SegRel::Disjoint);
    }

    #[test]
    fn dir_cmp_sorts_counterclockwise_from_positive_x() {
        let dirs = vec![
            Pt::new(qi(1), qi(0)),
            Pt::new(qi(1), qi(1)),
            Pt::new(qi(0), qi(1)),
            Pt::new(qi(-1), qi(1)),
            Pt::new(qi(-1), qi(0)),
            Pt::new(qi(-1), qi(-1)),
            Pt::new(qi(0), qi(-1)),
            Pt::new(qi(1), qi(-1)),
        ];
        for i in 0..dirs.len() {
            for j in 0..dirs.len() {
                let expect = i.cmp(&j);
                assert_eq!(dir_cmp(&dirs[i], &dirs[j]), expect, "{} vs {}", i, j);
            }
        }
    }

    #[test]
    fn point_location_even_odd_in_a_nonconvex_cycle() {
        // an L shape
        let cycle = vec![
            Pt::new(qi(0), qi(0)),
            Pt::new(qi(3), qi(0)),
            Pt::new(qi(3), qi(1)),
            Pt::new(qi(1), qi(1)),
            Pt::new(qi(1), qi(3)),
            Pt::new(qi(0), qi(3)),
        ];
        assert_eq!(point_in_cycle(&Pt::new(qr(1, 2), qi(2)), &cycle), Some(true));
        assert_eq!(point_in_cycle(&Pt::new(qi(2), qi(2)), &cycle), Some(false));
        assert_eq!(point_in_cycle(&Pt::new(qi(1), qi(2)), &cycle), None);
        assert_eq!(point_in_cycle(&Pt::new(qr(5, 2), qr(1, 2)), &cycle), Some(true));
    }

    #[test]
    fn signed_area_sign_tracks_orientation() {
        let ccw = vec![
            Pt::new(qi(0), qi(0)),
            Pt::new(qi(1), qi(0)),
            Pt::new(qi(0), qi(1)),
        ];
        let cw: Vec<Pt> = ccw.iter().rev().cloned().collect();
        assert!(signed_area2(&ccw).is_positive());
        assert!(signed_area2(&cw).is_negative());
    }
}
