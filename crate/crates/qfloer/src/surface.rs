//! Surfaces bundled with their named curve families.
//!
//! A `CombinatorialSurface` owns a cell scaffold together with every named
//! curve and arc that later stages may twist along or intersect against.
//! Construction verifies the whole package at once: the scaffold is a
//! connected oriented surface of the requested genus and puncture count, and
//! the curve family is embedded and in general position (the overlay builds).
//!
//! Twisting and winding never edit the scaffold; they only produce new
//! curves, so the surface itself is immutable once built and `apply_twist`
//! hands back an unregistered curve the caller may then register or measure.

use crate::curve::{nth_prime, standard, Curve};
use crate::error::{QfError, Result};
use crate::moves::{self, Reduced};
use crate::overlay::{build_overlay, MarkedPoint, Overlay};
use crate::scaffold::{self, AnnulusIds, ClosedIds, RingIds, Scaffold, SeamIds};

/// Twists to apply in order: each entry names a registered closed curve and
/// gives the (possibly negative) power to twist along it.
pub type TwistWord = Vec<(String, i64)>;

/// Curves are embedded by construction or rejected at registration, so the
/// public name reflects that.
pub type EmbeddedCurve = Curve;

/// One fibre side of a joined surface: a ring for positive genus, a bare
/// annulus for genus zero.
#[derive(Clone, Debug)]
pub enum FibreSide {
    Ring(RingIds),
    Annulus(AnnulusIds),
}

/// A closed surface assembled from two fibre sides and the two tubes around
/// the connecting flowlines. The `p` tube joins the vertex circles and the
/// `q` tube the inner circles.
#[derive(Clone, Debug)]
pub struct JoinedIds {
    pub min_side: FibreSide,
    pub max_side: RingIds,
    pub tube_p: SeamIds,
    pub tube_q: SeamIds,
}

/// The stock layout a surface was built on, kept so later stages can locate
/// distinguished sides again (radial cuts, handle sides, inner circles).
#[derive(Clone, Debug)]
pub enum Layout {
    Sphere,
    Closed(ClosedIds),
    Annulus(AnnulusIds),
    Ring(RingIds),
    Joined(Box<JoinedIds>),
}

#[derive(Clone, Debug)]
pub struct CombinatorialSurface {
    pub scaffold: Scaffold,
    pub genus: usize,
    pub punctures: usize,
    pub layout: Layout,
    /// Registered named curves and arcs, standard families first.
    pub curves: Vec<Curve>,
    pub marks: Vec<MarkedPoint>,
}

/// Build the stock genus `g` surface with `p` punctures and its standard
/// curve family.
///
/// Closed surfaces and one-puncture surfaces use the one-polygon model and
/// carry the genus basis `a1, b1, ..., ag, bg` with `ai` meeting `bi` once.
/// Two or more punctures use the hexagon ring model (an annulus when `g` is
/// zero); it carries the boundary-to-boundary arcs `xi1..xi2g` and
/// `eta1..eta2g` alongside the same closed genus basis, which is what the
/// fibration stage needs. Extra punctures beyond the model's own boundary
/// are slit into the first cell.
pub fn build_standard_surface(genus: usize, punctures: usize) -> Result<CombinatorialSurface> {
    let (sc, layout, curves) = match (genus, punctures) {
        (0, p) if p <= 1 => {
            let (mut sc, north, _) = scaffold::sphere();
            if p == 1 {
                scaffold::add_tether_hole(&mut sc, north, 0);
            }
            (sc, Layout::Sphere, vec![])
        }
        (0, p) => {
            let (mut sc, ids) = scaffold::annulus();
            for extra in 2..p {
                scaffold::add_tether_hole(&mut sc, ids.cell, extra);
            }
            (sc, Layout::Annulus(ids), vec![])
        }
        (g, p) if p <= 1 => {
            let (mut sc, ids) = scaffold::closed_polygon(g);
            if p == 1 {
                scaffold::add_tether_hole(&mut sc, ids.cell, 0);
            }
            let curves = polygon_basis(&ids, g);
            (sc, Layout::Closed(ids), curves)
        }
        (g, p) => {
            let (mut sc, ids) = scaffold::ring(g);
            for extra in 2..p {
                scaffold::add_tether_hole(&mut sc, ids.cells[0], extra);
            }
            let curves = ring_family(&ids, g);
            (sc, Layout::Ring(ids), curves)
        }
    };
    CombinatorialSurface::from_parts(sc, genus, punctures, layout, curves)
}

fn polygon_basis(ids: &ClosedIds, g: usize) -> Vec<Curve> {
    let mut curves = Vec::with_capacity(2 * g);
    for i in 0..g {
        curves.push(standard::polygon_a(ids, i, nth_prime(2 + i)));
        curves.push(standard::polygon_b(ids, i, nth_prime(2 + g + i)));
    }
    curves
}

fn ring_family(ids: &RingIds, g: usize) -> Vec<Curve> {
    let mut curves = Vec::with_capacity(6 * g);
    for p in 0..2 * g {
        curves.push(standard::ring_xi_arc(ids, p, nth_prime(2 + p)));
        curves.push(standard::ring_eta_arc(ids, p, nth_prime(2 + 2 * g + p)));
    }
    // the two ring duals of one handle pair meet exactly once, so they are
    // the genus basis here, under the same names as on the closed polygon
    for b in 0..g {
        let mut a = standard::ring_dual(ids, 2 * b, nth_prime(2 + 4 * g + 2 * b));
        a.name = format!("a{}", b + 1);
        let mut bb = standard::ring_dual(ids, 2 * b + 1, nth_prime(2 + 4 * g + 2 * b + 1));
        bb.name = format!("b{}", b + 1);
        curves.push(a);
        curves.push(bb);
    }
    curves
}

impl CombinatorialSurface {
    pub(crate) fn from_parts(
        scaffold: Scaffold,
        genus: usize,
        punctures: usize,
        layout: Layout,
        curves: Vec<Curve>,
    ) -> Result<Self> {
        let (g, b) = scaffold.topology()?;
        if (g, b) != (genus, punctures) {
            return Err(QfError::internal(format!(
                "layout for genus {} with {} punctures came out as genus {} with {} boundaries",
                genus, punctures, g, b
            )));
        }
        let surface =
            CombinatorialSurface { scaffold, genus, punctures, layout, curves, marks: vec![] };
        surface.overlay_with(&[])?;
        Ok(surface)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.scaffold.euler_characteristic()
    }

    pub fn curve_index(&self, name: &str) -> Result<usize> {
        self.curves
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| QfError::surface(format!("no curve named {}", name)))
    }

    pub fn curve(&self, name: &str) -> Result<&Curve> {
        Ok(&self.curves[self.curve_index(name)?])
    }

    /// Register a curve. It must carry a fresh name and sit in general
    /// position with everything already registered; on failure the family is
    /// left unchanged.
    pub fn add_curve(&mut self, curve: Curve) -> Result<()> {
        if self.curves.iter().any(|c| c.name == curve.name) {
            return Err(QfError::surface(format!("curve name {} is already taken", curve.name)));
        }
        self.curves.push(curve);
        match self.overlay_with(&[]) {
            Ok(_) => Ok(()),
            Err(e) => {
                self.curves.pop();
                Err(e)
            }
        }
    }

    pub fn add_mark(&mut self, mark: MarkedPoint) -> Result<()> {
        self.marks.push(mark);
        match self.overlay_with(&[]) {
            Ok(_) => Ok(()),
            Err(e) => {
                self.marks.pop();
                Err(e)
            }
        }
    }

    /// Overlay of the registered family plus `extra` curves; extras get the
    /// indices after `self.curves.len()`. Note a curve twisted out of a
    /// registered base still carries the base's original tokens, so it can
    /// be overlaid against other curves but not against its own base.
    pub fn overlay_with(&self, extra: &[Curve]) -> Result<Overlay> {
        let mut all = self.curves.clone();
        all.extend(extra.iter().cloned());
        build_overlay(&self.scaffold, &all, &self.marks)
    }

    /// Signed intersection pairing of two curves on this surface. Neither
    /// needs to be registered, but they must be in general position.
    pub fn pairing(&self, a: &Curve, b: &Curve) -> Result<i64> {
        let ov = build_overlay(&self.scaffold, &[a.clone(), b.clone()], &[])?;
        Ok(ov.algebraic_intersection(0, 1))
    }

    /// Twist the registered curve `base` along `word`, left to right. Each
    /// guide must be a registered closed curve; twisting along an arc is
    /// refused. The base itself may be an arc. The result keeps the base's
    /// name and is handed back unregistered.
    pub fn apply_twist(&self, base: &str, word: &[(String, i64)]) -> Result<Curve> {
        let ti = self.curve_index(base)?;
        let mut ctx = self.curves.clone();
        for (guide, power) in word {
            let gi = self.curve_index(guide)?;
            if !ctx[gi].closed {
                return Err(QfError::TwistAlongArc(guide.clone()));
            }
            ctx[ti] = moves::twist(&self.scaffold, &ctx, ti, gi, *power)?;
        }
        Ok(ctx.swap_remove(ti))
    }

    /// Remove bigons between `a` and `b` until none remain, innermost first.
    pub fn bigon_reduce(&self, a: &Curve, b: &Curve) -> Result<Reduced> {
        moves::bigon_reduce(&self.scaffold, a, b)
    }

    /// Crossings left after full bigon reduction.
    pub fn geometric_intersection_number(&self, a: &Curve, b: &Curve) -> Result<usize> {
        moves::geometric_intersection_number(&self.scaffold, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_layouts_have_the_advertised_topology() {
        for (g, p) in [(0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (1, 4), (2, 0), (2, 2), (3, 2)] {
            let s = build_standard_surface(g, p).unwrap();
            assert_eq!((s.genus, s.punctures), (g, p), "requested topology");
            assert_eq!(s.euler_characteristic(), 2 - 2 * g as i64 - p as i64);
            let family = if g == 0 {
                0
            } else if p <= 1 {
                2 * g
            } else {
                6 * g
            };
            assert_eq!(s.curves.len(), family, "family size at genus {} punctures {}", g, p);
        }
    }

    #[test]
    fn twist_words_compose_like_repeated_single_twists() {
        let s = build_standard_surface(1, 0).unwrap();
        let ids = match &s.layout {
            Layout::Closed(ids) => ids.clone(),
            _ => panic!("torus should use the polygon layout"),
        };
        let probe = standard::polygon_b(&ids, 0, 11);
        let two_steps =
            s.apply_twist("b1", &[("a1".into(), 1), ("a1".into(), 1)]).unwrap();
        let one_step = s.apply_twist("b1", &[("a1".into(), 2)]).unwrap();
        for tw in [&two_steps, &one_step] {
            assert_eq!(s.geometric_intersection_number(tw, &probe).unwrap(), 2);
            assert_eq!(s.geometric_intersection_number(tw, s.curve("a1").unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn arcs_are_refused_as_twist_guides() {
        let s = build_standard_surface(1, 2).unwrap();
        let err = s.apply_twist("a1", &[("xi1".into(), 1)]).unwrap_err();
        assert!(matches!(err, QfError::TwistAlongArc(name) if name == "xi1"));
    }

    #[test]
    fn registration_rejects_name_clashes_and_position_clashes() {
        let mut s = build_standard_surface(1, 0).unwrap();
        let dup = s.curve("a1").unwrap().clone();
        assert!(s.add_curve(dup).is_err());

        let mut ghost = s.curve("a1").unwrap().clone();
        ghost.name = "ghost".into();
        let err = s.add_curve(ghost).unwrap_err();
        assert!(matches!(err, QfError::Degenerate(_)));
        assert_eq!(s.curves.len(), 2, "failed registration must not change the family");
    }

    #[test]
    fn arcs_can_be_twisted_along_closed_curves() {
        let s = build_standard_surface(1, 2).unwrap();
        let xi = s.curve("xi1").unwrap().clone();
        let tw = s.apply_twist("xi1", &[("b1".into(), 1)]).unwrap();
        assert!(!tw.closed);
        assert_eq!(tw.endpoints(), xi.endpoints(), "twisting fixes endpoints");
    }
}
