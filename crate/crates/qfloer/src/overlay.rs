//! Exact overlay arrangement of a curve family on a scaffold.
//!
//! Every cell is realized as a convex polygon (translated so distinct cells
//! occupy disjoint parts of the plane), each curve visit becomes a chord, and
//! the complement regions are recovered by tracing the planar subdivision
//! cell by cell and then gluing faces across the scaffold 1-cells. The glued
//! face complex is itself a `Scaffold`, so region Euler characteristics come
//! from the same vertex-orbit machinery as the base surface.
//!
//! Degenerate configurations (tangencies, concurrent chords) are never
//! resolved by epsilon: the polygon model is perturbed and the whole overlay
//! is recomputed. Curve positions are part of the input and are never moved.

use crate::curve::{check_positions, one_cell_key, Curve, SlotPoint, Visit};
use crate::error::{QfError, Result};
use crate::geom::{
    circle_point, cross, dir_cmp, lerp, point_in_cycle, qi, qr, seg_intersect, signed_area2, Pt,
    Q, SegRel,
};
use crate::scaffold::{CellId, DartId, Scaffold};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// A basepoint, anchored combinatorially at a polygon corner of a cell: the
/// actual point is taken inside the unique complement region whose closure
/// contains that corner sector.
#[derive(Clone, Debug)]
pub struct MarkedPoint {
    pub name: String,
    pub cell: CellId,
    pub corner: usize,
}

/// Where a crossing sits along one of the two strands through it.
#[derive(Clone, Debug)]
pub struct StrandAt {
    pub curve: usize,
    pub visit: usize,
    pub seg: usize,
    pub t: Q,
}

/// One of the four directions leaving a crossing.
#[derive(Clone, Debug)]
pub struct OutDir {
    pub curve: usize,
    pub visit: usize,
    pub forward: bool,
    pub dir: Pt,
}

#[derive(Clone, Debug)]
pub struct Crossing {
    pub cell: CellId,
    pub point: Pt,
    pub strands: [StrandAt; 2],
    /// The four outgoing directions in counterclockwise order.
    pub out: [OutDir; 4],
    /// `quads[k]` is the region filling the sector between `out[k]` and
    /// `out[k + 1]`.
    pub quads: [usize; 4],
}

impl Crossing {
    pub fn involves(&self, curve: usize) -> bool {
        self.strands.iter().any(|s| s.curve == curve)
    }

    pub fn other_strand(&self, curve: usize) -> &StrandAt {
        if self.strands[0].curve == curve {
            &self.strands[1]
        } else {
            &self.strands[0]
        }
    }

    pub fn strand_of(&self, curve: usize) -> &StrandAt {
        if self.strands[0].curve == curve {
            &self.strands[0]
        } else {
            &self.strands[1]
        }
    }
}

/// A complement region of the curve family.
#[derive(Clone, Debug)]
pub struct Region {
    /// Euler characteristic of the abstract compactification (the region cut
    /// along every curve arc, so self-touches along curves stay separate).
    pub chi: i64,
    /// Number of quadrant corners: every crossing quadrant filled by this
    /// region is a quarter corner of the compactification, and each arc
    /// endpoint contributes one corner on each side of the arc.
    pub corners: usize,
    /// Euler measure `chi - corners/4`.
    pub e: Q,
    /// Base scaffold cells the region meets.
    pub cells: BTreeSet<CellId>,
    /// Curves appearing on the region boundary.
    pub bounding_curves: BTreeSet<usize>,
    pub touches_surface_boundary: bool,
}

#[derive(Debug)]
pub struct Overlay {
    pub curves: Vec<Curve>,
    pub regions: Vec<Region>,
    pub crossings: Vec<Crossing>,
    /// Region containing each marked point, parallel to the input marks.
    pub mark_region: Vec<usize>,
    pub mark_names: Vec<String>,
    pub cell_polygons: Vec<Vec<Pt>>,
    /// `[curve][visit]` -> chord polyline (2 points, or 3 for a u-turn).
    pub chord_polylines: Vec<Vec<Vec<Pt>>>,
    /// `[curve][visit]` -> crossing ids in order of traversal.
    pub visit_crossings: Vec<Vec<Vec<usize>>>,
    /// `[curve]` -> fragments in order of traversal.
    pub curve_edges: Vec<Vec<CurveEdge>>,
}

impl Overlay {
    pub fn crossings_between(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.crossings.len())
            .filter(|&i| {
                let s = &self.crossings[i].strands;
                (s[0].curve == a && s[1].curve == b) || (s[0].curve == b && s[1].curve == a)
            })
            .collect()
    }

    pub fn curve_index(&self, name: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.name == name)
    }

    /// Signed count of crossings: each contributes the orientation sign of
    /// (direction of `a`, direction of `b`) at the crossing point.
    pub fn algebraic_intersection(&self, a: usize, b: usize) -> i64 {
        let mut total = 0;
        for idx in self.crossings_between(a, b) {
            let c = &self.crossings[idx];
            let da = c.out.iter().find(|o| o.curve == a && o.forward).expect("forward out");
            let db = c.out.iter().find(|o| o.curve == b && o.forward).expect("forward out");
            let s = cross(&da.dir, &db.dir);
            total += if s.is_positive() { 1 } else { -1 };
        }
        total
    }
}

pub fn build_overlay(sc: &Scaffold, curves: &[Curve], marks: &[MarkedPoint]) -> Result<Overlay> {
    for c in curves {
        c.validate(sc)?;
    }
    let refs: Vec<&Curve> = curves.iter().collect();
    check_positions(sc, &refs)?;
    let mut last = String::new();
    for retry in 0..8 {
        match attempt(sc, curves, marks, retry) {
            Ok(o) => return Ok(o),
            Err(Attempt::Retry(msg)) => last = msg,
            Err(Attempt::Fatal(e)) => return Err(e),
        }
    }
    Err(QfError::Degenerate(format!(
        "no general position model found after 8 perturbations: {}",
        last
    )))
}

enum Attempt {
    /// Degeneracy that a different polygon model can remove.
    Retry(String),
    Fatal(QfError),
}

fn retry(msg: impl Into<String>) -> Attempt {
    Attempt::Retry(msg.into())
}

/// Convex polygon model of a cell: points on a unit circle at perturbed
/// rational parameters, translated per cell so cells never overlap.
fn cell_polygon(cell: CellId, sides: usize, retry: usize) -> Vec<Pt> {
    let m = sides as i64;
    let offset = Pt::new(qi(3 * cell as i64), Q::zero());
    (0..sides)
        .map(|i| {
            let jitter = ((i as i64 + 1) * (retry as i64) * 7919) % 499 - 249;
            let t = qi(i as i64) - qr(m - 1, 2) + qr(jitter, 2000);
            circle_point(&t).add(&offset)
        })
        .collect()
}

fn side_point(poly: &[Pt], slot: usize, pos: &Q) -> Pt {
    let a = &poly[slot];
    let b = &poly[(slot + 1) % poly.len()];
    lerp(a, b, pos)
}

/// Direction of a polygon side, in the ccw boundary orientation.
pub(crate) fn side_dir(poly: &[Pt], slot: usize) -> Pt {
    poly[(slot + 1) % poly.len()].sub(&poly[slot])
}

fn centroid(poly: &[Pt]) -> Pt {
    let n = qi(poly.len() as i64);
    let mut acc = Pt::new(Q::zero(), Q::zero());
    for p in poly {
        acc = acc.add(p);
    }
    acc.scale(&(Q::one() / n))
}

struct Seg {
    curve: usize,
    visit: usize,
    seg: usize,
    cell: CellId,
    a: Pt,
    b: Pt,
}

/// A u-turn visit: entry and exit through the same side of a cell.
struct Turn {
    ci: usize,
    vi: usize,
    cell: CellId,
    dart: DartId,
    lo: Q,
    hi: Q,
    pa: Pt,
    pb: Pt,
}

/// Realize every u-turn as a taut rectangle hugging its side.
///
/// A straight chord must cross a turn exactly when one of its endpoints lies
/// strictly inside the turn's side interval, and then exactly once; chords
/// with both or neither endpoint inside must be missed entirely. The depth of
/// each rectangle is bisected until every non-legitimate chord and every
/// other polygon side is cleared (a legitimate chord crosses the rectangle
/// boundary once at any depth, by convexity). Turns sharing a side then get
/// distinct depths below the common clearance, ordered so that nested
/// intervals nest geometrically (0 crossings), interleaved intervals cross
/// once, and disjoint intervals stay disjoint: their connecting walls are
/// parallel, so only the interval pattern decides.
fn realize_turns(
    sc: &Scaffold,
    curves: &[Curve],
    polys: &[Vec<Pt>],
    all_visits: &[Vec<Visit>],
    turns: &[Turn],
    chord_polylines: &mut [Vec<Vec<Pt>>],
) -> std::result::Result<(), Attempt> {
    if turns.is_empty() {
        return Ok(());
    }

    // straight chords per cell, with their slot points for the legality test
    let mut straight: BTreeMap<CellId, Vec<(Pt, Pt, SlotPoint, SlotPoint)>> = BTreeMap::new();
    for visits in all_visits {
        for visit in visits {
            if visit.entry.dart == visit.exit.dart {
                continue;
            }
            let poly = &polys[visit.cell];
            let pa = side_point(poly, sc.darts[visit.entry.dart].slot, &visit.entry.pos);
            let pb = side_point(poly, sc.darts[visit.exit.dart].slot, &visit.exit.pos);
            straight
                .entry(visit.cell)
                .or_default()
                .push((pa, pb, visit.entry.clone(), visit.exit.clone()));
        }
    }

    let inward = |t: &Turn| {
        let d = side_dir(&polys[t.cell], sc.darts[t.dart].slot);
        Pt::new(-d.y.clone(), d.x.clone())
    };
    let polyline = |t: &Turn, depth: &Q| {
        let n = inward(t);
        let off = n.scale(depth);
        vec![t.pa.clone(), t.pa.add(&off), t.pb.add(&off), t.pb.clone()]
    };
    let crosses = |pts: &[Pt], a: &Pt, b: &Pt| {
        (0..pts.len() - 1)
            .any(|s| !matches!(seg_intersect(&pts[s], &pts[s + 1], a, b), SegRel::Disjoint))
    };
    let inside =
        |t: &Turn, p: &SlotPoint| p.dart == t.dart && t.lo < p.pos && p.pos < t.hi;
    let clear = |t: &Turn, depth: &Q| {
        let pts = polyline(t, depth);
        if let Some(chords) = straight.get(&t.cell) {
            for (a, b, ea, eb) in chords {
                if inside(t, ea) != inside(t, eb) {
                    continue; // must cross, and does so once at any depth
                }
                if crosses(&pts, a, b) {
                    return false;
                }
            }
        }
        let poly = &polys[t.cell];
        let own = sc.darts[t.dart].slot;
        for k in 0..poly.len() {
            if k == own {
                continue;
            }
            if crosses(&pts, &poly[k], &poly[(k + 1) % poly.len()]) {
                return false;
            }
        }
        true
    };

    // per-side clearance depth, found by bisection from a fixed start
    let mut side_depth: BTreeMap<(CellId, DartId), Q> = BTreeMap::new();
    let mut members: BTreeMap<(CellId, DartId), Vec<usize>> = BTreeMap::new();
    for (k, t) in turns.iter().enumerate() {
        members.entry((t.cell, t.dart)).or_default().push(k);
        let mut d = qr(1, 4);
        let mut steps = 0;
        while !clear(t, &d) {
            d = d / qi(2);
            steps += 1;
            if steps > 128 {
                return Err(retry(format!(
                    "no clearance for a turn of {} in {}",
                    curves[t.ci].name, sc.cells[t.cell].label
                )));
            }
        }
        let e = side_depth.entry((t.cell, t.dart)).or_insert_with(|| d.clone());
        if d < *e {
            *e = d;
        }
    }

    // distinct fractions of the side depth, widest interval deepest
    let assign = |side_depth: &BTreeMap<(CellId, DartId), Q>| {
        let mut placed: Vec<Vec<Pt>> = vec![Vec::new(); turns.len()];
        for (key, group) in &members {
            let base = &side_depth[key];
            let mut order: Vec<usize> = group.clone();
            order.sort_by(|&x, &y| {
                let wx = &turns[x].hi - &turns[x].lo;
                let wy = &turns[y].hi - &turns[y].lo;
                wx.cmp(&wy)
                    .then_with(|| turns[x].lo.cmp(&turns[y].lo))
                    .then_with(|| turns[x].ci.cmp(&turns[y].ci))
            });
            let m = order.len() as i64;
            for (rank, &k) in order.iter().enumerate() {
                let d = base.clone() * qr(rank as i64 + 1, m + 1);
                placed[k] = polyline(&turns[k], &d);
            }
        }
        placed
    };

    // turns on different sides of one cell must never meet; halve both
    // sides until the rectangles separate
    let mut depths = side_depth;
    for _ in 0..64 {
        let placed = assign(&depths);
        let mut conflict: Option<((CellId, DartId), (CellId, DartId))> = None;
        'scan: for i in 0..turns.len() {
            for j in i + 1..turns.len() {
                if turns[i].cell != turns[j].cell || turns[i].dart == turns[j].dart {
                    continue;
                }
                let (pi, pj) = (&placed[i], &placed[j]);
                let hit = (0..pi.len() - 1).any(|s| crosses(pj, &pi[s], &pi[s + 1]));
                if hit {
                    conflict = Some((
                        (turns[i].cell, turns[i].dart),
                        (turns[j].cell, turns[j].dart),
                    ));
                    break 'scan;
                }
            }
        }
        match conflict {
            Some((ka, kb)) => {
                for k in [ka, kb] {
                    let d = depths.get_mut(&k).expect("conflicting side has a depth");
                    *d = d.clone() / qi(2);
                }
            }
            None => {
                for (k, t) in turns.iter().enumerate() {
                    chord_polylines[t.ci][t.vi] = placed[k].clone();
                }
                return Ok(());
            }
        }
    }
    Err(retry("turns on different sides would not separate".to_string()))
}

struct RawCrossing {
    cell: CellId,
    point: Pt,
    strands: [StrandAt; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ETag {
    Side { dart: DartId, lo: Q, hi: Q },
    Strand { curve: usize, visit: usize, seg: usize, lo: Q, hi: Q },
}

/// One piece of a curve between consecutive arrangement events, with the
/// regions on either side of the direction of travel.
#[derive(Clone, Debug)]
pub struct CurveEdge {
    pub visit: usize,
    pub seg: usize,
    pub lo: Q,
    pub hi: Q,
    pub left: usize,
    pub right: usize,
}

struct Edge {
    u: usize,
    v: usize,
    cell: CellId,
    tag: ETag,
}

fn attempt(
    sc: &Scaffold,
    curves: &[Curve],
    marks: &[MarkedPoint],
    retry_idx: usize,
) -> std::result::Result<Overlay, Attempt> {
    let ncells = sc.cells.len();
    let polys: Vec<Vec<Pt>> =
        (0..ncells).map(|c| cell_polygon(c, sc.sides(c), retry_idx)).collect();

    // --- chords -----------------------------------------------------------
    // straight chords are fixed immediately; u-turn visits (entry and exit
    // through the same side) need clearance against everything else in the
    // cell, so they are realized in a second pass
    let all_visits: Vec<Vec<Visit>> = curves.iter().map(|c| c.visits(sc)).collect();
    let mut chord_polylines: Vec<Vec<Vec<Pt>>> =
        all_visits.iter().map(|vs| vec![Vec::new(); vs.len()]).collect();
    let mut turns: Vec<Turn> = Vec::new();
    for (ci, visits) in all_visits.iter().enumerate() {
        for (vi, visit) in visits.iter().enumerate() {
            let poly = &polys[visit.cell];
            let pa = side_point(poly, sc.darts[visit.entry.dart].slot, &visit.entry.pos);
            let pb = side_point(poly, sc.darts[visit.exit.dart].slot, &visit.exit.pos);
            if visit.entry.dart == visit.exit.dart {
                let (lo, hi) = if visit.entry.pos < visit.exit.pos {
                    (visit.entry.pos.clone(), visit.exit.pos.clone())
                } else {
                    (visit.exit.pos.clone(), visit.entry.pos.clone())
                };
                turns.push(Turn { ci, vi, cell: visit.cell, dart: visit.entry.dart, lo, hi, pa, pb });
            } else {
                chord_polylines[ci][vi] = vec![pa, pb];
            }
        }
    }
    realize_turns(sc, curves, &polys, &all_visits, &turns, &mut chord_polylines)?;

    let mut segs: Vec<Seg> = Vec::new();
    for (ci, visits) in all_visits.iter().enumerate() {
        for (vi, visit) in visits.iter().enumerate() {
            let poly = &polys[visit.cell];
            let pts = &chord_polylines[ci][vi];
            // side-parallel chord pieces make "which side of the strand"
            // questions ambiguous for the surgery code downstream
            let din = side_dir(poly, sc.darts[visit.entry.dart].slot);
            let dout = side_dir(poly, sc.darts[visit.exit.dart].slot);
            let f = pts[1].sub(&pts[0]);
            let g = pts[pts.len() - 1].sub(&pts[pts.len() - 2]);
            if cross(&f, &din).is_zero() || cross(&g, &dout).is_zero() {
                return Err(retry(format!(
                    "chord of {} parallel to a side of {}",
                    curves[ci].name, sc.cells[visit.cell].label
                )));
            }
            for s in 0..pts.len() - 1 {
                segs.push(Seg {
                    curve: ci,
                    visit: vi,
                    seg: s,
                    cell: visit.cell,
                    a: pts[s].clone(),
                    b: pts[s + 1].clone(),
                });
            }
        }
    }

    // --- pairwise strand crossings ----------------------------------------
    let mut raw: Vec<RawCrossing> = Vec::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (si, sj) = (&segs[i], &segs[j]);
            if si.cell != sj.cell {
                continue;
            }
            if si.curve == sj.curve && si.visit == sj.visit {
                continue; // consecutive u-turn halves share the waypoint
            }
            match seg_intersect(&si.a, &si.b, &sj.a, &sj.b) {
                SegRel::Disjoint => {}
                SegRel::Degenerate => {
                    return Err(retry(format!(
                        "tangency between {} and {} in {}",
                        curves[si.curve].name, curves[sj.curve].name, sc.cells[si.cell].label
                    )));
                }
                SegRel::Proper { p, t, s } => {
                    if si.curve == sj.curve {
                        return Err(Attempt::Fatal(QfError::NotEmbedded {
                            name: curves[si.curve].name.clone(),
                            msg: format!(
                                "self-crossing in cell {}",
                                sc.cells[si.cell].label
                            ),
                        }));
                    }
                    raw.push(RawCrossing {
                        cell: si.cell,
                        point: p,
                        strands: [
                            StrandAt { curve: si.curve, visit: si.visit, seg: si.seg, t },
                            StrandAt { curve: sj.curve, visit: sj.visit, seg: sj.seg, t: s },
                        ],
                    });
                }
            }
        }
    }

    // --- vertex table -------------------------------------------------------
    // every arrangement point must be distinct; a collision is a degeneracy
    // the perturbation removes
    let mut vkey: BTreeMap<(Q, Q), usize> = BTreeMap::new();
    let mut verts: Vec<Pt> = Vec::new();
    let mut add_vert = |p: &Pt, verts: &mut Vec<Pt>| -> std::result::Result<usize, Attempt> {
        let key = (p.x.clone(), p.y.clone());
        if vkey.contains_key(&key) {
            return Err(retry(format!("coincident arrangement points at {:?}", p)));
        }
        vkey.insert(key, verts.len());
        verts.push(p.clone());
        Ok(verts.len() - 1)
    };

    let mut corner_ids: Vec<Vec<usize>> = Vec::with_capacity(ncells);
    for poly in &polys {
        let mut ids = Vec::with_capacity(poly.len());
        for p in poly {
            ids.push(add_vert(p, &mut verts)?);
        }
        corner_ids.push(ids);
    }
    let mut chord_pt_ids: Vec<Vec<Vec<usize>>> = Vec::with_capacity(curves.len());
    for lines in &chord_polylines {
        let mut per_curve = Vec::with_capacity(lines.len());
        for pts in lines {
            let mut ids = Vec::with_capacity(pts.len());
            for p in pts {
                ids.push(add_vert(p, &mut verts)?);
            }
            per_curve.push(ids);
        }
        chord_pt_ids.push(per_curve);
    }
    let mut crossing_vert: Vec<usize> = Vec::with_capacity(raw.len());
    for rc in &raw {
        crossing_vert.push(add_vert(&rc.point, &mut verts)?);
    }

    // --- subdivide sides -----------------------------------------------------
    // events on each dart: (position along the dart, vertex)
    let mut side_events: BTreeMap<DartId, Vec<(Q, usize)>> = BTreeMap::new();
    for (ci, curve) in curves.iter().enumerate() {
        for (vi, visit) in curve.visits(sc).iter().enumerate() {
            let pts = &chord_pt_ids[ci][vi];
            side_events
                .entry(visit.entry.dart)
                .or_default()
                .push((visit.entry.pos.clone(), pts[0]));
            side_events
                .entry(visit.exit.dart)
                .or_default()
                .push((visit.exit.pos.clone(), *pts.last().unwrap()));
        }
    }

    let mut edges: Vec<Edge> = Vec::new();
    for (cell_id, poly) in polys.iter().enumerate() {
        for slot in 0..poly.len() {
            let dart = sc.dart_at(cell_id, slot);
            let mut evs = side_events.remove(&dart).unwrap_or_default();
            evs.sort_by(|a, b| a.0.cmp(&b.0));
            for w in evs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(retry("duplicate side event"));
                }
            }
            let mut prev = (Q::zero(), corner_ids[cell_id][slot]);
            for (pos, vid) in evs.into_iter().chain(std::iter::once((
                Q::one(),
                corner_ids[cell_id][(slot + 1) % poly.len()],
            ))) {
                edges.push(Edge {
                    u: prev.1,
                    v: vid,
                    cell: cell_id,
                    tag: ETag::Side { dart, lo: prev.0.clone(), hi: pos.clone() },
                });
                prev = (pos, vid);
            }
        }
    }

    // --- subdivide strands ---------------------------------------------------
    // events per (curve, visit, seg): crossings, sorted by parameter
    let mut seg_events: BTreeMap<(usize, usize, usize), Vec<(Q, usize)>> = BTreeMap::new();
    for (idx, rc) in raw.iter().enumerate() {
        for s in &rc.strands {
            seg_events
                .entry((s.curve, s.visit, s.seg))
                .or_default()
                .push((s.t.clone(), crossing_vert[idx]));
        }
    }
    let mut visit_crossings: Vec<Vec<Vec<usize>>> = curves
        .iter()
        .map(|c| {
            let n = if c.closed { c.tokens.len() } else { c.tokens.len() - 1 };
            vec![Vec::new(); n]
        })
        .collect();
    // order crossings along each visit while we subdivide
    let mut order_key: BTreeMap<usize, Vec<((usize, usize, usize, Q), usize)>> = BTreeMap::new();
    for (idx, rc) in raw.iter().enumerate() {
        for s in &rc.strands {
            order_key
                .entry(s.curve)
                .or_default()
                .push(((s.curve, s.visit, s.seg, s.t.clone()), idx));
        }
    }
    for (ci, mut keyed) in order_key {
        keyed.sort_by(|a, b| {
            (a.0 .1, a.0 .2).cmp(&(b.0 .1, b.0 .2)).then(a.0 .3.cmp(&b.0 .3))
        });
        for ((_, vi, _, _), idx) in keyed {
            visit_crossings[ci][vi].push(idx);
        }
    }

    for (ci, curve) in curves.iter().enumerate() {
        let nvisit = if curve.closed { curve.tokens.len() } else { curve.tokens.len() - 1 };
        for vi in 0..nvisit {
            let pts = &chord_pt_ids[ci][vi];
            let cell = chord_cell(sc, curve, vi);
            for s in 0..pts.len() - 1 {
                let mut evs = seg_events.remove(&(ci, vi, s)).unwrap_or_default();
                evs.sort_by(|a, b| a.0.cmp(&b.0));
                for w in evs.windows(2) {
                    if w[0].0 == w[1].0 {
                        return Err(retry("concurrent chords"));
                    }
                }
                let mut prev = pts[s];
                let mut prev_t = Q::zero();
                for (t, vid) in evs.into_iter().chain(std::iter::once((Q::one(), pts[s + 1]))) {
                    edges.push(Edge {
                        u: prev,
                        v: vid,
                        cell,
                        tag: ETag::Strand {
                            curve: ci,
                            visit: vi,
                            seg: s,
                            lo: prev_t,
                            hi: t.clone(),
                        },
                    });
                    prev = vid;
                    prev_t = t;
                }
            }
        }
    }

    // --- planar face tracing -------------------------------------------------
    // half-edge 2e is u->v, 2e+1 is v->u
    let nh = edges.len() * 2;
    let he_from = |h: usize| if h % 2 == 0 { edges[h / 2].u } else { edges[h / 2].v };
    let he_to = |h: usize| if h % 2 == 0 { edges[h / 2].v } else { edges[h / 2].u };
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for h in 0..nh {
        outgoing[he_from(h)].push(h);
    }
    for (v, list) in outgoing.iter_mut().enumerate() {
        let vp = verts[v].clone();
        let mut keyed: Vec<(Pt, usize)> = list
            .iter()
            .map(|&h| (verts[he_to(h)].sub(&vp), h))
            .collect();
        keyed.sort_by(|a, b| dir_cmp(&a.0, &b.0));
        for pair in keyed.windows(2) {
            if dir_cmp(&pair[0].0, &pair[1].0) == Ordering::Equal {
                return Err(retry("two edges leave a vertex in the same direction"));
            }
        }
        *list = keyed.into_iter().map(|(_, h)| h).collect();
    }
    // next half-edge around the face on the left
    let mut face_of: Vec<Option<usize>> = vec![None; nh];
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for start in 0..nh {
        if face_of[start].is_some() {
            continue;
        }
        let fid = faces.len();
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            face_of[h] = Some(fid);
            cycle.push(h);
            let twin = h ^ 1;
            let v = he_to(h);
            let list = &outgoing[v];
            let idx = list.iter().position(|&x| x == twin).expect("twin is outgoing");
            h = list[(idx + list.len() - 1) % list.len()];
            if h == start {
                break;
            }
        }
        faces.push(cycle);
    }
    let face_of: Vec<usize> = face_of.into_iter().map(|f| f.unwrap()).collect();

    // interior faces have positive area; exactly one negative cycle per cell
    let mut face_area: Vec<Q> = Vec::with_capacity(faces.len());
    let mut face_cell: Vec<CellId> = Vec::with_capacity(faces.len());
    for cycle in &faces {
        let pts: Vec<Pt> = cycle.iter().map(|&h| verts[he_from(h)].clone()).collect();
        face_area.push(signed_area2(&pts));
        face_cell.push(edges[cycle[0] / 2].cell);
    }
    let mut outer_per_cell = vec![0usize; ncells];
    for f in 0..faces.len() {
        if face_area[f].is_negative() {
            outer_per_cell[face_cell[f]] += 1;
        } else if face_area[f].is_zero() {
            return Err(retry("zero-area face"));
        }
    }
    if outer_per_cell.iter().any(|&n| n != 1) {
        return Err(Attempt::Fatal(QfError::internal(
            "face tracing did not find exactly one outer face per cell",
        )));
    }

    // --- glue faces into regions ---------------------------------------------
    let mut rsc = Scaffold::new();
    // region-scaffold cell per interior face
    let mut rcell_of_face: Vec<Option<CellId>> = vec![None; faces.len()];
    let mut rdart_of_he: Vec<Option<DartId>> = vec![None; nh];
    let mut face_ids: Vec<usize> = Vec::new();
    for (f, cycle) in faces.iter().enumerate() {
        if face_area[f].is_negative() {
            continue;
        }
        let labels: Vec<String> = (0..cycle.len()).map(|k| format!("s{}", k)).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let rc = rsc.add_cell(&format!("f{}", f), &refs);
        rcell_of_face[f] = Some(rc);
        for (k, &h) in cycle.iter().enumerate() {
            rdart_of_he[h] = Some(rsc.dart_at(rc, k));
        }
        face_ids.push(f);
    }
    // pair up side fragments across the base gluing
    let mut frag_map: BTreeMap<(DartId, Q, Q), Vec<usize>> = BTreeMap::new();
    for h in 0..nh {
        if rdart_of_he[h].is_none() {
            continue;
        }
        if let ETag::Side { dart, lo, hi } = &edges[h / 2].tag {
            let key_dart = one_cell_key(sc, *dart);
            let (klo, khi) = if key_dart == *dart {
                (lo.clone(), hi.clone())
            } else {
                (Q::one() - hi, Q::one() - lo)
            };
            frag_map.entry((key_dart, klo, khi)).or_default().push(h);
        }
    }
    for ((dart, _, _), hs) in frag_map {
        match hs.len() {
            1 => {
                if !sc.is_boundary(dart) {
                    return Err(Attempt::Fatal(QfError::internal(
                        "interior side fragment with a single face",
                    )));
                }
            }
            2 => {
                let a = rdart_of_he[hs[0]].unwrap();
                let b = rdart_of_he[hs[1]].unwrap();
                rsc.glue(a, b).map_err(Attempt::Fatal)?;
            }
            _ => {
                return Err(Attempt::Fatal(QfError::internal(
                    "side fragment shared by more than two faces",
                )))
            }
        }
    }

    // connected components of the region scaffold
    let nrc = rsc.cells.len();
    let mut comp: Vec<usize> = (0..nrc).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for d in 0..rsc.darts.len() {
        if let Some(r) = rsc.rev(d) {
            let (a, b) = (rsc.darts[d].cell, rsc.darts[r].cell);
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            comp[ra] = rb;
        }
    }
    let mut region_index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut region_cells: Vec<Vec<usize>> = Vec::new();
    for rc in 0..nrc {
        let root = find(&mut comp, rc);
        let next = region_index.len();
        let idx = *region_index.entry(root).or_insert(next);
        if idx == region_cells.len() {
            region_cells.push(Vec::new());
        }
        region_cells[idx].push(rc);
    }
    let region_of_rcell: Vec<usize> = (0..nrc)
        .map(|rc| {
            let root = find(&mut comp, rc);
            region_index[&root]
        })
        .collect();

    // per-region Euler characteristic: vertex orbits restricted per component
    let orbits = rsc.vertex_orbits();
    let mut vcount = vec![0i64; region_cells.len()];
    for orbit in &orbits {
        let reg = region_of_rcell[rsc.darts[orbit[0]].cell];
        debug_assert!(orbit.iter().all(|&d| region_of_rcell[rsc.darts[d].cell] == reg));
        vcount[reg] += 1;
    }
    let mut ecount = vec![0i64; region_cells.len()];
    for d in 0..rsc.darts.len() {
        let reg = region_of_rcell[rsc.darts[d].cell];
        match rsc.rev(d) {
            Some(_) => ecount[reg] += 1, // counted twice, halved below
            None => ecount[reg] += 2,
        }
    }
    let chi: Vec<i64> = (0..region_cells.len())
        .map(|r| vcount[r] - ecount[r] / 2 + region_cells[r].len() as i64)
        .collect();

    let region_of_face = |f: usize| -> usize {
        region_of_rcell[rcell_of_face[f].expect("interior face")]
    };

    // --- crossings with quadrant data -----------------------------------------
    let mut crossings: Vec<Crossing> = Vec::with_capacity(raw.len());
    for (idx, rc) in raw.iter().enumerate() {
        let v = crossing_vert[idx];
        let list = &outgoing[v];
        if list.len() != 4 {
            return Err(Attempt::Fatal(QfError::internal(
                "crossing vertex without exactly four outgoing edges",
            )));
        }
        let mut out = Vec::with_capacity(4);
        let mut quads = [0usize; 4];
        for (k, &h) in list.iter().enumerate() {
            let ETag::Strand { curve, visit, .. } = edges[h / 2].tag.clone() else {
                return Err(Attempt::Fatal(QfError::internal(
                    "side edge incident to a crossing",
                )));
            };
            // forward means the half-edge continues toward larger parameter:
            // its far endpoint is later along the chord than the crossing
            let strand = rc
                .strands
                .iter()
                .find(|s| s.curve == curve && s.visit == visit)
                .expect("crossing strand");
            let forward = half_edge_is_forward(
                h,
                he_from,
                he_to,
                &verts,
                &chord_pt_ids[curve][visit],
                strand,
            );
            let dir = verts[he_to(h)].sub(&verts[he_from(h)]);
            out.push(OutDir { curve, visit, forward, dir });
            quads[k] = region_of_face(face_of[h]);
        }
        crossings.push(Crossing {
            cell: rc.cell,
            point: rc.point.clone(),
            strands: rc.strands.clone(),
            out: out.try_into().map_err(|_| Attempt::Fatal(QfError::internal("out size")))?,
            quads,
        });
    }

    // --- region metadata --------------------------------------------------------
    let mut regions: Vec<Region> = (0..region_cells.len())
        .map(|r| Region {
            chi: chi[r],
            corners: 0,
            e: Q::zero(),
            cells: BTreeSet::new(),
            bounding_curves: BTreeSet::new(),
            touches_surface_boundary: false,
        })
        .collect();
    for f in 0..faces.len() {
        if face_area[f].is_negative() {
            continue;
        }
        regions[region_of_face(f)].cells.insert(face_cell[f]);
    }
    for h in 0..nh {
        if rdart_of_he[h].is_none() {
            continue;
        }
        let reg = region_of_face(face_of[h]);
        match &edges[h / 2].tag {
            ETag::Strand { curve, .. } => {
                regions[reg].bounding_curves.insert(*curve);
            }
            ETag::Side { dart, .. } => {
                if sc.is_boundary(*dart) {
                    regions[reg].touches_surface_boundary = true;
                }
            }
        }
    }
    for c in &crossings {
        for &q in &c.quads {
            regions[q].corners += 1;
        }
    }
    // an arc endpoint on the surface boundary contributes a corner to the
    // region on each side of the strand; with this the Euler measures of the
    // regions always sum to the Euler characteristic of the surface
    for ci in 0..curves.len() {
        if curves[ci].closed {
            continue;
        }
        let mut strand_edges = (0..edges.len())
            .filter(|&e| matches!(&edges[e].tag, ETag::Strand { curve, .. } if *curve == ci));
        let first = strand_edges.next().expect("arc with no strand edges");
        let last = strand_edges.last().unwrap_or(first);
        for e in [first, last] {
            regions[region_of_face(face_of[2 * e])].corners += 1;
            regions[region_of_face(face_of[2 * e + 1])].corners += 1;
        }
    }
    for r in regions.iter_mut() {
        r.e = qi(r.chi) - qr(r.corners as i64, 4);
    }

    // --- curve fragments with their two sides -----------------------------------
    // edges were pushed in traversal order (visit, then segment, then
    // parameter), so each per-curve list reads along the curve
    let mut curve_edges: Vec<Vec<CurveEdge>> = vec![Vec::new(); curves.len()];
    for (e, edge) in edges.iter().enumerate() {
        if let ETag::Strand { curve, visit, seg, lo, hi } = &edge.tag {
            curve_edges[*curve].push(CurveEdge {
                visit: *visit,
                seg: *seg,
                lo: lo.clone(),
                hi: hi.clone(),
                left: region_of_face(face_of[2 * e]),
                right: region_of_face(face_of[2 * e + 1]),
            });
        }
    }

    // --- marked points -----------------------------------------------------------
    let mut mark_region = Vec::with_capacity(marks.len());
    for mark in marks {
        let poly = &polys[mark.cell];
        let corner = &poly[mark.corner];
        let center = centroid(poly);
        let mut found = None;
        let mut frac = qr(9, 10);
        for _ in 0..12 {
            let pt = lerp(&center, corner, &frac);
            let mut hits = Vec::new();
            for (f, cycle) in faces.iter().enumerate() {
                if face_area[f].is_negative() || face_cell[f] != mark.cell {
                    continue;
                }
                let pts: Vec<Pt> = cycle.iter().map(|&h| verts[he_from(h)].clone()).collect();
                match point_in_cycle(&pt, &pts) {
                    Some(true) => hits.push(f),
                    Some(false) => {}
                    None => {
                        hits.clear();
                        break; // on an edge: move closer to the corner
                    }
                }
            }
            if hits.len() == 1 {
                found = Some(region_of_face(hits[0]));
                break;
            }
            frac = (frac + Q::one()) / qi(2); // halve the distance to the corner
        }
        match found {
            Some(r) => mark_region.push(r),
            None => {
                return Err(retry(format!(
                    "could not isolate marked point {} at a corner of {}",
                    mark.name, sc.cells[mark.cell].label
                )))
            }
        }
    }

    Ok(Overlay {
        curves: curves.to_vec(),
        regions,
        crossings,
        mark_region,
        mark_names: marks.iter().map(|m| m.name.clone()).collect(),
        cell_polygons: polys,
        chord_polylines,
        visit_crossings,
        curve_edges,
    })
}

fn chord_cell(sc: &Scaffold, curve: &Curve, vi: usize) -> CellId {
    sc.darts[curve.tokens[vi].dart].cell
}

/// Does half-edge `h`, leaving a crossing on `strand`, point in the direction
/// of travel? Decided by comparing the far endpoint against the chord's
/// polyline order: the far endpoint is either deeper into the same segment or
/// a later polyline joint.
fn half_edge_is_forward(
    h: usize,
    he_from: impl Fn(usize) -> usize,
    he_to: impl Fn(usize) -> usize,
    verts: &[Pt],
    polyline_pts: &[usize],
    strand: &StrandAt,
) -> bool {
    let from = he_from(h);
    let to = he_to(h);
    let a = polyline_pts[strand.seg];
    let b = polyline_pts[strand.seg + 1];
    // parameter of a point on the segment a..b: cheap since collinear
    let pa = &verts[a];
    let pb = &verts[b];
    let param = |v: usize| -> Q {
        let p = &verts[v];
        let dx = &pb.x - &pa.x;
        if !dx.is_zero() {
            (&p.x - &pa.x) / dx
        } else {
            (&p.y - &pa.y) / (&pb.y - &pa.y)
        }
    };
    if to == b || (to != a && param(to) > param(from)) {
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::standard::*;
    use crate::curve::{nth_prime, Token};
    use crate::geom::qr;
    use crate::scaffold::{annulus, closed_polygon, ring};

    #[test]
    fn torus_two_curves_one_crossing_one_square_region() {
        let (sc, ids) = closed_polygon(1);
        let a = polygon_a(&ids, 0, 3);
        let b = polygon_b(&ids, 0, 5);
        let ov = build_overlay(&sc, &[a, b], &[]).unwrap();
        assert_eq!(ov.crossings.len(), 1);
        assert_eq!(ov.regions.len(), 1);
        let r = &ov.regions[0];
        // complement of two dual circles on the torus: one square
        assert_eq!(r.chi, 1);
        assert_eq!(r.corners, 4);
        assert_eq!(r.e, qi(0));
        // all four quadrants of the crossing are that square
        assert_eq!(ov.crossings[0].quads, [0, 0, 0, 0]);
    }

    #[test]
    fn torus_single_curve_complement_is_an_annulus() {
        let (sc, ids) = closed_polygon(1);
        let a = polygon_a(&ids, 0, 3);
        let ov = build_overlay(&sc, &[a], &[]).unwrap();
        assert_eq!(ov.regions.len(), 1);
        assert_eq!(ov.regions[0].chi, 0);
        assert_eq!(ov.regions[0].e, qi(0));
        assert_eq!(ov.crossings.len(), 0);
    }

    #[test]
    fn empty_overlay_region_is_the_whole_surface() {
        let (sc, _) = closed_polygon(2);
        let ov = build_overlay(&sc, &[], &[]).unwrap();
        assert_eq!(ov.regions.len(), 1);
        assert_eq!(ov.regions[0].chi, -2);
        assert_eq!(ov.regions[0].e, qi(-2));
    }

    #[test]
    fn annulus_core_circle_cuts_into_two_annuli() {
        let (sc, ids) = annulus();
        let core = Curve::closed("core", vec![Token::new(ids.r_up, qr(1, 2))]);
        let ov = build_overlay(&sc, &[core], &[]).unwrap();
        assert_eq!(ov.regions.len(), 2);
        for r in &ov.regions {
            assert_eq!(r.chi, 0);
            assert!(r.touches_surface_boundary);
        }
    }

    #[test]
    fn ring_arcs_meet_once_per_pair() {
        let (sc, ids) = ring(1);
        let mut curves = Vec::new();
        for p in 0..2 {
            curves.push(ring_xi_arc(&ids, p, nth_prime(p + 2)));
            curves.push(ring_eta_arc(&ids, p, nth_prime(p + 4)));
        }
        let ov = build_overlay(&sc, &curves, &[]).unwrap();
        // xi_p meets eta_p once, nothing else meets
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                let n = ov.crossings_between(i, j).len();
                let ni = &ov.curves[i].name;
                let nj = &ov.curves[j].name;
                let expect = if (ni == "xi1" && nj == "eta1")
                    || (ni == "eta1" && nj == "xi1")
                    || (ni == "xi2" && nj == "eta2")
                    || (ni == "eta2" && nj == "xi2")
                {
                    1
                } else {
                    0
                };
                assert_eq!(n, expect, "{} vs {}", ni, nj);
            }
        }
    }

    #[test]
    fn ring_duals_meet_their_own_arc_and_their_partner_once() {
        let (sc, ids) = ring(1);
        let mut curves = Vec::new();
        for p in 0..2 {
            curves.push(ring_xi_arc(&ids, p, nth_prime(p + 2)));
            curves.push(ring_eta_arc(&ids, p, nth_prime(p + 4)));
            curves.push(ring_dual(&ids, p, nth_prime(p + 6)));
        }
        let ov = build_overlay(&sc, &curves, &[]).unwrap();
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                let (ni, nj) = (ov.curves[i].name.clone(), ov.curves[j].name.clone());
                let n = ov.crossings_between(i, j).len();
                let pair = |a: &str, b: &str| (ni == a && nj == b) || (ni == b && nj == a);
                // forced crossings: the two duals of a four-cell group are a
                // genus handle pair, and each dual's band transit separates
                // the partner's E mouth from the inner circle, so the
                // partner's eta arc must cross it
                let expect = if pair("xi1", "eta1")
                    || pair("xi2", "eta2")
                    || pair("dual1", "xi1")
                    || pair("dual2", "xi2")
                    || pair("dual1", "dual2")
                    || pair("dual1", "eta2")
                    || pair("dual2", "eta1")
                {
                    1
                } else {
                    0
                };
                assert_eq!(n, expect, "{} vs {}: got {}", ni, nj, n);
            }
        }
    }

    #[test]
    fn marked_point_lands_in_the_corner_region() {
        let (sc, ids) = ring(1);
        let curves = vec![ring_xi_arc(&ids, 0, 5), ring_eta_arc(&ids, 0, 7)];
        // corner between the R1v side (slot 4) and the I0 side (slot 5) of K0
        let marks = vec![MarkedPoint { name: "z".into(), cell: ids.cells[0], corner: 5 }];
        let ov = build_overlay(&sc, &curves, &marks).unwrap();
        assert_eq!(ov.mark_region.len(), 1);
        let reg = &ov.regions[ov.mark_region[0]];
        assert!(reg.cells.contains(&ids.cells[0]));
    }

    #[test]
    fn self_crossing_curves_are_rejected() {
        let (sc, ids) = closed_polygon(1);
        // two visits through the square that must cross each other
        let bad = Curve::closed(
            "kink",
            vec![
                Token::new(ids.a[0], qr(1, 3)),
                Token::new(ids.b[0], qr(1, 3)),
                Token::new(ids.a[0], qr(2, 3)),
                Token::new(ids.b[0], qr(2, 3)),
            ],
        );
        let err = build_overlay(&sc, &[bad], &[]).unwrap_err();
        match err {
            QfError::NotEmbedded { name, .. } => assert_eq!(name, "kink"),
            other => panic!("expected embeddedness failure, got {:?}", other),
        }
    }

    #[test]
    fn uturn_chord_splits_region_without_corners() {
        let (sc, ids) = annulus();
        // enter and leave through the same radial side: a u-turn
        let u = Curve::closed(
            "u",
            vec![Token::new(ids.r_up, qr(1, 3)), Token::new(ids.r_down, qr(1, 3))],
        );
        u.validate(&sc).unwrap();
        let ov = build_overlay(&sc, &[u], &[]).unwrap();
        assert_eq!(ov.crossings.len(), 0);
        // a trivial loop bounds a disk on one side, annulus-with-hole on the other
        let mut chis: Vec<i64> = ov.regions.iter().map(|r| r.chi).collect();
        chis.sort();
        assert_eq!(chis, vec![-1, 1]);
    }
}
