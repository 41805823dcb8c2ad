//! Cell scaffolds: oriented surfaces presented as polygonal cells with side
//! identifications.
//!
//! A dart is one side of one cell; `rev` pairs the two sides of an interior
//! 1-cell and is absent on surface boundary. Every cell walk is
//! counterclockwise in its own chart, and a point at parameter `p` along a
//! dart is the same surface point as `1 - p` along its reverse; that
//! convention is what makes the glued surface oriented.

use crate::error::{QfError, Result};

pub type DartId = usize;
pub type CellId = usize;

#[derive(Clone, Debug)]
pub struct Dart {
    pub cell: CellId,
    pub slot: usize,
    pub rev: Option<DartId>,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub walk: Vec<DartId>,
    pub label: String,
}

#[derive(Clone, Debug, Default)]
pub struct Scaffold {
    pub cells: Vec<Cell>,
    pub darts: Vec<Dart>,
}

impl Scaffold {
    pub fn new() -> Self {
        Scaffold::default()
    }

    pub fn add_cell(&mut self, label: &str, side_labels: &[&str]) -> CellId {
        let cell = self.cells.len();
        let mut walk = Vec::with_capacity(side_labels.len());
        for (slot, side) in side_labels.iter().enumerate() {
            let id = self.darts.len();
            self.darts.push(Dart {
                cell,
                slot,
                rev: None,
                label: format!("{}@{}", side, label),
            });
            walk.push(id);
        }
        self.cells.push(Cell { walk, label: label.to_string() });
        cell
    }

    /// Identify two cell sides as the two coorientations of one 1-cell.
    pub fn glue(&mut self, a: DartId, b: DartId) -> Result<()> {
        if a == b {
            return Err(QfError::surface(format!(
                "cannot glue side {} to itself",
                self.darts[a].label
            )));
        }
        for d in [a, b] {
            if self.darts[d].rev.is_some() {
                return Err(QfError::surface(format!(
                    "side {} is already glued",
                    self.darts[d].label
                )));
            }
        }
        self.darts[a].rev = Some(b);
        self.darts[b].rev = Some(a);
        Ok(())
    }

    /// Insert extra sides into an existing cell walk at position `at`,
    /// before any curves exist. Dart ids are stable; slots are renumbered.
    pub fn insert_sides(&mut self, cell: CellId, at: usize, side_labels: &[&str]) -> Vec<DartId> {
        let mut new_ids = Vec::with_capacity(side_labels.len());
        for side in side_labels {
            let id = self.darts.len();
            self.darts.push(Dart {
                cell,
                slot: 0,
                rev: None,
                label: format!("{}@{}", side, self.cells[cell].label),
            });
            new_ids.push(id);
        }
        let walk = &mut self.cells[cell].walk;
        for (k, &id) in new_ids.iter().enumerate() {
            walk.insert(at + k, id);
        }
        let walk = self.cells[cell].walk.clone();
        for (slot, &d) in walk.iter().enumerate() {
            self.darts[d].slot = slot;
        }
        new_ids
    }

    pub fn sides(&self, cell: CellId) -> usize {
        self.cells[cell].walk.len()
    }

    pub fn dart_at(&self, cell: CellId, slot: usize) -> DartId {
        self.cells[cell].walk[slot]
    }

    /// Next dart counterclockwise in the same cell.
    pub fn next_in_cell(&self, d: DartId) -> DartId {
        let dart = &self.darts[d];
        let walk = &self.cells[dart.cell].walk;
        walk[(dart.slot + 1) % walk.len()]
    }

    pub fn prev_in_cell(&self, d: DartId) -> DartId {
        let dart = &self.darts[d];
        let walk = &self.cells[dart.cell].walk;
        walk[(dart.slot + walk.len() - 1) % walk.len()]
    }

    pub fn rev(&self, d: DartId) -> Option<DartId> {
        self.darts[d].rev
    }

    pub fn is_boundary(&self, d: DartId) -> bool {
        self.darts[d].rev.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, dart) in self.darts.iter().enumerate() {
            let cell = self
                .cells
                .get(dart.cell)
                .ok_or_else(|| QfError::surface(format!("dart {} has no cell", dart.label)))?;
            if cell.walk.get(dart.slot) != Some(&i) {
                return Err(QfError::surface(format!(
                    "dart {} disagrees with its cell walk about slot {}",
                    dart.label, dart.slot
                )));
            }
            if let Some(r) = dart.rev {
                if r == i || self.darts[r].rev != Some(i) {
                    return Err(QfError::surface(format!(
                        "side pairing through {} is not an involution",
                        dart.label
                    )));
                }
            }
        }
        let mut seen = vec![false; self.darts.len()];
        for cell in &self.cells {
            for &d in &cell.walk {
                if seen[d] {
                    return Err(QfError::surface(format!(
                        "dart {} appears in two walks",
                        self.darts[d].label
                    )));
                }
                seen[d] = true;
            }
        }
        Ok(())
    }

    /// Group darts by the vertex at their tail corner. Two corners meet at
    /// one surface vertex exactly when the gluing relation
    /// `head(d) ~ tail(rev d)` chains them together.
    pub fn vertex_orbits(&self) -> Vec<Vec<DartId>> {
        let n = self.darts.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut Vec<usize>, x: usize) -> usize {
            if uf[x] != x {
                let r = find(uf, uf[x]);
                uf[x] = r;
            }
            uf[x]
        }
        for d in 0..n {
            if let Some(r) = self.darts[d].rev {
                let head = self.next_in_cell(d);
                let (a, b) = (find(&mut uf, head), find(&mut uf, r));
                uf[a] = b;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<DartId>> = Default::default();
        for d in 0..n {
            let r = find(&mut uf, d);
            groups.entry(r).or_default().push(d);
        }
        groups.into_values().collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_orbits().len()
    }

    pub fn edge_count(&self) -> usize {
        let glued = self.darts.iter().filter(|d| d.rev.is_some()).count();
        let boundary = self.darts.len() - glued;
        glued / 2 + boundary
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.cells.len() as i64
    }

    pub fn boundary_darts(&self) -> Vec<DartId> {
        (0..self.darts.len()).filter(|&d| self.is_boundary(d)).collect()
    }

    /// The boundary dart that continues the surface boundary after `b`:
    /// rotate around the head of `b` through the interior until the boundary
    /// is hit again.
    pub fn next_boundary(&self, b: DartId) -> DartId {
        assert!(self.is_boundary(b));
        let mut x = self.next_in_cell(b);
        loop {
            match self.darts[x].rev {
                None => return x,
                Some(r) => x = self.next_in_cell(r),
            }
        }
    }

    pub fn boundary_circles(&self) -> Vec<Vec<DartId>> {
        let mut remaining: std::collections::BTreeSet<DartId> =
            self.boundary_darts().into_iter().collect();
        let mut circles = Vec::new();
        while let Some(&start) = remaining.iter().next() {
            let mut circle = vec![start];
            remaining.remove(&start);
            let mut d = self.next_boundary(start);
            while d != start {
                remaining.remove(&d);
                circle.push(d);
                d = self.next_boundary(d);
            }
            circles.push(circle);
        }
        circles
    }

    pub fn is_connected(&self) -> bool {
        if self.cells.is_empty() {
            return true;
        }
        let n = self.cells.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for &d in &self.cells[c].walk {
                if let Some(r) = self.darts[d].rev {
                    let other = self.darts[r].cell;
                    if !seen[other] {
                        seen[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `(genus, boundary circles)` from the Euler characteristic; the
    /// scaffold must be connected.
    pub fn topology(&self) -> Result<(usize, usize)> {
        if !self.is_connected() {
            return Err(QfError::surface("scaffold is not connected"));
        }
        let b = self.boundary_circles().len() as i64;
        let chi = self.euler_characteristic();
        let twog = 2 - chi - b;
        if twog < 0 || twog % 2 != 0 {
            return Err(QfError::surface(format!(
                "euler characteristic {} with {} boundary circles is not an oriented surface",
                chi, b
            )));
        }
        Ok(((twog / 2) as usize, b as usize))
    }
}

/// Side ids of the one-polygon model of a closed genus `g >= 1` surface,
/// identification word `a1 b1 a1' b1' ... ag bg ag' bg'`.
#[derive(Clone, Debug)]
pub struct ClosedIds {
    pub cell: CellId,
    pub a: Vec<DartId>,
    pub b: Vec<DartId>,
    pub a_bar: Vec<DartId>,
    pub b_bar: Vec<DartId>,
}

pub fn closed_polygon(g: usize) -> (Scaffold, ClosedIds) {
    assert!(g >= 1);
    let mut sc = Scaffold::new();
    let mut labels = Vec::new();
    for i in 0..g {
        labels.push(format!("a{}", i));
        labels.push(format!("b{}", i));
        labels.push(format!("a{}'", i));
        labels.push(format!("b{}'", i));
    }
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let cell = sc.add_cell("P", &refs);
    let mut ids = ClosedIds { cell, a: vec![], b: vec![], a_bar: vec![], b_bar: vec![] };
    for i in 0..g {
        let a = sc.dart_at(cell, 4 * i);
        let b = sc.dart_at(cell, 4 * i + 1);
        let abar = sc.dart_at(cell, 4 * i + 2);
        let bbar = sc.dart_at(cell, 4 * i + 3);
        sc.glue(a, abar).unwrap();
        sc.glue(b, bbar).unwrap();
        ids.a.push(a);
        ids.b.push(b);
        ids.a_bar.push(abar);
        ids.b_bar.push(bbar);
    }
    (sc, ids)
}

/// Two triangles glued along matching sides in opposite walk order.
pub fn sphere() -> (Scaffold, CellId, CellId) {
    let mut sc = Scaffold::new();
    let t1 = sc.add_cell("N", &["e0", "e1", "e2"]);
    let t2 = sc.add_cell("S", &["f0", "f1", "f2"]);
    for i in 0..3 {
        let a = sc.dart_at(t1, i);
        let b = sc.dart_at(t2, 2 - i);
        sc.glue(a, b).unwrap();
    }
    (sc, t1, t2)
}

/// One 4-gon annulus: two free sides, one radial cut glued to itself.
#[derive(Clone, Debug)]
pub struct AnnulusIds {
    pub cell: CellId,
    pub outer: DartId,
    pub inner: DartId,
    pub r_up: DartId,
    pub r_down: DartId,
}

pub fn annulus() -> (Scaffold, AnnulusIds) {
    let mut sc = Scaffold::new();
    let ids = annulus_into(&mut sc, "");
    (sc, ids)
}

/// Same annulus added to an existing scaffold, its labels tagged by `prefix`
/// so several can coexist.
pub fn annulus_into(sc: &mut Scaffold, prefix: &str) -> AnnulusIds {
    let labels = [
        format!("{}out", prefix),
        format!("{}r", prefix),
        format!("{}in", prefix),
        format!("{}r'", prefix),
    ];
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let cell = sc.add_cell(&format!("{}A", prefix), &refs);
    let r = sc.dart_at(cell, 1);
    let rp = sc.dart_at(cell, 3);
    let outer = sc.dart_at(cell, 0);
    let inner = sc.dart_at(cell, 2);
    sc.glue(r, rp).unwrap();
    AnnulusIds { cell, outer, inner, r_up: r, r_down: rp }
}

/// Annular ring of `4m` hexagonal cells modelling a genus `m` surface with
/// two boundary circles (the inner circle and the vertex circle).
///
/// Cell `j` has walk `[R_j^, c_j^+, E_j, c_{j+1}^-, R_{j+1}v, I_j]`; radial
/// sides of neighbouring cells are glued cyclically, and `E` sides are glued
/// in pairs `0<->2`, `1<->3` inside each group of four cells, which is where
/// the genus comes from.
#[derive(Clone, Debug)]
pub struct RingIds {
    pub m: usize,
    pub cells: Vec<CellId>,
    pub r_up: Vec<DartId>,
    pub r_down: Vec<DartId>,
    pub c_plus: Vec<DartId>,
    pub c_minus: Vec<DartId>,
    pub e: Vec<DartId>,
    pub inner: Vec<DartId>,
}

pub fn e_partner(j: usize) -> usize {
    let group = j / 4 * 4;
    group + (j % 4 + 2) % 4
}

pub fn ring(m: usize) -> (Scaffold, RingIds) {
    let mut sc = Scaffold::new();
    let ids = ring_into(&mut sc, m, "");
    (sc, ids)
}

/// Same ring added to an existing scaffold, its labels tagged by `prefix`.
pub fn ring_into(sc: &mut Scaffold, m: usize, prefix: &str) -> RingIds {
    assert!(m >= 1);
    let n = 4 * m;
    let mut ids = RingIds {
        m,
        cells: vec![],
        r_up: vec![],
        r_down: vec![],
        c_plus: vec![],
        c_minus: vec![],
        e: vec![],
        inner: vec![],
    };
    for j in 0..n {
        let labels = [
            format!("{}R{}^", prefix, j),
            format!("{}c{}+", prefix, j),
            format!("{}E{}", prefix, j),
            format!("{}c{}-", prefix, (j + 1) % n),
            format!("{}R{}v", prefix, (j + 1) % n),
            format!("{}I{}", prefix, j),
        ];
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let cell = sc.add_cell(&format!("{}K{}", prefix, j), &refs);
        ids.cells.push(cell);
        ids.r_up.push(sc.dart_at(cell, 0));
        ids.c_plus.push(sc.dart_at(cell, 1));
        ids.e.push(sc.dart_at(cell, 2));
        ids.c_minus.push(sc.dart_at(cell, 3));
        ids.r_down.push(sc.dart_at(cell, 4));
        ids.inner.push(sc.dart_at(cell, 5));
    }
    for j in 0..n {
        // R_{j+1} as seen from cell j (slot 4) and from cell j+1 (slot 0)
        sc.glue(ids.r_down[j], ids.r_up[(j + 1) % n]).unwrap();
    }
    for j in 0..n {
        let p = e_partner(j);
        if j < p {
            sc.glue(ids.e[j], ids.e[p]).unwrap();
        }
    }
    ids
}

/// A seam cell: one annular 2-cell whose two waists close up two existing
/// boundary circles into an interior tube. The walk is
/// `[o_0 .. o_{M-1}, s, i_0 .. i_{N-1}, s']` with the radial cut `s` glued to
/// `s'`, the `o` sides glued along the left circle and the `i` sides along
/// the right one.
#[derive(Clone, Debug)]
pub struct SeamIds {
    pub cell: CellId,
    pub outer: Vec<DartId>,
    pub inner: Vec<DartId>,
    pub s_up: DartId,
    pub s_down: DartId,
}

/// The full boundary circle through `start`, in `next_boundary` order.
fn boundary_circle_at(sc: &Scaffold, start: DartId) -> Result<Vec<DartId>> {
    if !sc.is_boundary(start) {
        return Err(QfError::internal(format!(
            "seam anchor {} is already glued",
            sc.darts[start].label
        )));
    }
    let mut circle = vec![start];
    let mut d = sc.next_boundary(start);
    while d != start {
        circle.push(d);
        d = sc.next_boundary(d);
    }
    Ok(circle)
}

/// Join the two boundary circles through `left` and `right` with a seam cell
/// named `name`. Walking the seam's `o` sides forward pairs with walking the
/// left circle backward, and likewise for `i` against the right circle; that
/// reversal is the one alignment that merges the corner orbits into a tube
/// instead of pinching them. `o_0` is glued to `left` and `i_0` to `right`.
pub fn add_seam(sc: &mut Scaffold, left: DartId, right: DartId, name: &str) -> Result<SeamIds> {
    let lcirc = boundary_circle_at(sc, left)?;
    let rcirc = boundary_circle_at(sc, right)?;
    if lcirc.contains(&right) {
        return Err(QfError::internal(format!(
            "seam {} would glue a boundary circle to itself",
            name
        )));
    }
    let m = lcirc.len();
    let n = rcirc.len();
    let mut labels: Vec<String> = (0..m).map(|j| format!("{}.o{}", name, j)).collect();
    labels.push(format!("{}.s", name));
    labels.extend((0..n).map(|j| format!("{}.i{}", name, j)));
    labels.push(format!("{}.s'", name));
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let cell = sc.add_cell(name, &refs);
    let outer: Vec<DartId> = (0..m).map(|j| sc.dart_at(cell, j)).collect();
    let s_up = sc.dart_at(cell, m);
    let inner: Vec<DartId> = (0..n).map(|j| sc.dart_at(cell, m + 1 + j)).collect();
    let s_down = sc.dart_at(cell, m + 1 + n);
    sc.glue(s_up, s_down)?;
    for (j, &o) in outer.iter().enumerate() {
        sc.glue(o, lcirc[(m - j) % m])?;
    }
    for (j, &i) in inner.iter().enumerate() {
        sc.glue(i, rcirc[(n - j) % n])?;
    }
    Ok(SeamIds { cell, outer, inner, s_up, s_down })
}

/// Attach an extra boundary circle to `cell` by a tether: inserts the walk
/// fragment `x B x'` with `x` glued to `x'`, leaving `B` free. Returns the
/// dart of the new hole.
pub fn add_tether_hole(sc: &mut Scaffold, cell: CellId, tag: usize) -> DartId {
    let at = sc.cells[cell].walk.len();
    let labels = [format!("x{}", tag), format!("B{}", tag), format!("x{}'", tag)];
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let new = sc.insert_sides(cell, at, &refs);
    sc.glue(new[0], new[2]).unwrap();
    new[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels_of(sc: &Scaffold, darts: &[DartId]) -> Vec<String> {
        darts.iter().map(|&d| sc.darts[d].label.clone()).collect()
    }

    #[test]
    fn closed_polygon_has_one_vertex_and_right_genus() {
        for g in 1..=3 {
            let (sc, _) = closed_polygon(g);
            sc.validate().unwrap();
            assert_eq!(sc.vertex_count(), 1);
            assert_eq!(sc.edge_count(), 2 * g);
            assert_eq!(sc.euler_characteristic(), 2 - 2 * g as i64);
            assert_eq!(sc.topology().unwrap(), (g, 0));
        }
    }

    #[test]
    fn sphere_from_two_triangles() {
        let (sc, _, _) = sphere();
        sc.validate().unwrap();
        assert_eq!(sc.euler_characteristic(), 2);
        assert_eq!(sc.topology().unwrap(), (0, 0));
    }

    #[test]
    fn seams_close_two_fibre_sides_into_one_closed_surface() {
        // two annuli joined along both circles make a torus
        let mut sc = Scaffold::new();
        let a = annulus_into(&mut sc, "u.");
        let b = annulus_into(&mut sc, "v.");
        add_seam(&mut sc, a.outer, b.outer, "P").unwrap();
        add_seam(&mut sc, a.inner, b.inner, "Q").unwrap();
        sc.validate().unwrap();
        assert_eq!(sc.topology().unwrap(), (1, 0));

        // a genus k side and a genus g side give genus g+k+1, the extra
        // handle coming from the pair of tubes
        for (g, k) in [(1, 1), (2, 1), (2, 2), (3, 3), (1, 0)] {
            let mut sc = Scaffold::new();
            let hi = ring_into(&mut sc, g, "f.");
            let (out_anchor, in_anchor) = if k >= 1 {
                let lo = ring_into(&mut sc, k, "m.");
                (lo.c_plus[0], lo.inner[0])
            } else {
                let lo = annulus_into(&mut sc, "m.");
                (lo.outer, lo.inner)
            };
            add_seam(&mut sc, out_anchor, hi.c_plus[0], "P").unwrap();
            add_seam(&mut sc, in_anchor, hi.inner[0], "Q").unwrap();
            sc.validate().unwrap();
            assert_eq!(sc.topology().unwrap(), (g + k + 1, 0), "genus for g={} k={}", g, k);
        }
    }

    #[test]
    fn annulus_has_two_circles_and_zero_euler_characteristic() {
        let (sc, ids) = annulus();
        sc.validate().unwrap();
        assert_eq!(sc.euler_characteristic(), 0);
        assert_eq!(sc.topology().unwrap(), (0, 2));
        let circles = sc.boundary_circles();
        assert_eq!(circles.len(), 2);
        assert!(circles.iter().all(|c| c.len() == 1));
        assert!(circles.iter().any(|c| c[0] == ids.outer));
        assert!(circles.iter().any(|c| c[0] == ids.inner));
    }

    #[test]
    fn ring_counts_match_the_cell_model() {
        for m in 1..=3 {
            let (sc, _) = ring(m);
            sc.validate().unwrap();
            assert!(sc.is_connected());
            assert_eq!(sc.cells.len(), 4 * m);
            assert_eq!(sc.vertex_count(), 12 * m);
            assert_eq!(sc.edge_count(), 18 * m);
            assert_eq!(sc.euler_characteristic(), -2 * m as i64);
            assert_eq!(sc.topology().unwrap(), (m, 2));
        }
    }

    #[test]
    fn ring_inner_circle_runs_backwards_through_all_cells() {
        let (sc, ids) = ring(1);
        let mut circle = vec![ids.inner[0]];
        loop {
            let next = sc.next_boundary(*circle.last().unwrap());
            if next == circle[0] {
                break;
            }
            circle.push(next);
        }
        assert_eq!(labels_of(&sc, &circle), vec!["I0@K0", "I3@K3", "I2@K2", "I1@K1"]);
    }

    #[test]
    fn ring_vertex_circle_interleaves_corner_sides() {
        let (sc, ids) = ring(1);
        let mut circle = vec![ids.c_plus[0]];
        loop {
            let next = sc.next_boundary(*circle.last().unwrap());
            if next == circle[0] {
                break;
            }
            circle.push(next);
        }
        assert_eq!(
            labels_of(&sc, &circle),
            vec!["c0+@K0", "c3-@K2", "c3+@K3", "c2-@K1", "c2+@K2", "c1-@K0", "c1+@K1", "c0-@K3"]
        );
    }

    #[test]
    fn ring_vertex_circle_has_8m_darts_in_one_circle() {
        for m in 1..=3 {
            let (sc, _) = ring(m);
            let mut lens: Vec<usize> = sc.boundary_circles().iter().map(|c| c.len()).collect();
            lens.sort();
            assert_eq!(lens, vec![4 * m, 8 * m]);
        }
    }

    #[test]
    fn tether_holes_add_separate_boundary_circles() {
        let (mut sc, ids) = closed_polygon(2);
        let b1 = add_tether_hole(&mut sc, ids.cell, 1);
        let b2 = add_tether_hole(&mut sc, ids.cell, 2);
        sc.validate().unwrap();
        assert_eq!(sc.topology().unwrap(), (2, 2));
        let circles = sc.boundary_circles();
        assert_eq!(circles.len(), 2);
        assert!(circles.iter().any(|c| c == &vec![b1]));
        assert!(circles.iter().any(|c| c == &vec![b2]));

        let (mut sc, ids) = ring(1);
        add_tether_hole(&mut sc, ids.cells[0], 1);
        sc.validate().unwrap();
        assert_eq!(sc.topology().unwrap(), (1, 3));
    }

    #[test]
    fn gluing_errors_are_reported() {
        let mut sc = Scaffold::new();
        let c = sc.add_cell("C", &["s0", "s1", "s2"]);
        let d0 = sc.dart_at(c, 0);
        let d1 = sc.dart_at(c, 1);
        let d2 = sc.dart_at(c, 2);
        assert!(sc.glue(d0, d0).is_err());
        sc.glue(d0, d1).unwrap();
        assert!(sc.glue(d0, d2).is_err());
    }
}
