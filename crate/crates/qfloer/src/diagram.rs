//! Heegaard diagrams of broken fibrations over the circle.
//!
//! A broken fibration whose fibre genus drops from a maximal value `g` to a
//! minimal value `k` is described by its `g - k` vanishing cycles on each
//! half of the base circle and, when `g = k`, a monodromy word. From that
//! data we assemble a genus `g + k + 1` Heegaard surface: one copy of each
//! extreme fibre with two discs removed, closed up by a tube through each
//! half of the circle. The curve families come in three kinds:
//!
//! * the tube waists `alpha0` and `beta0`,
//! * the vanishing cycles, drawn in the maximal fibre,
//! * for each standard arc of the minimal fibre, a closed curve made of
//!   that arc and its image in the maximal fibre, joined through a tube.
//!
//! The minimal side is kept in standard position for every input: each
//! transported pair meets there exactly once, and the `z` basepoint sits in
//! the region touching both tube feet. Everything interesting about the
//! input (vanishing cycle words, monodromy) is pushed to the maximal side.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::curve::{nth_prime, standard, Curve, Token};
use crate::error::{QfError, Result};
use crate::geom::qr;
use crate::moves;
use crate::overlay::{build_overlay, MarkedPoint, Overlay};
use crate::scaffold::{self, Scaffold};
use crate::snf;
use crate::surface::{
    build_standard_surface, CombinatorialSurface, FibreSide, JoinedIds, Layout, TwistWord,
};

/// A vanishing cycle: a twist word applied to one of the standard handle
/// curves `a1..ag`, `b1..bg` of the maximal fibre.
#[derive(Clone, Debug)]
pub struct CycleSpec {
    pub name: String,
    pub base: String,
    pub word: TwistWord,
}

/// A broken fibration over the circle in normal form. The fibre genus is
/// `g` over the east pole and `k` over the west pole; each half circle
/// carries `g - k` critical points whose vanishing cycles are listed in
/// crossing order. `monodromy` is only meaningful in the fibred case
/// `g = k`, where there are no critical points at all.
#[derive(Clone, Debug)]
pub struct BrokenFibrationData {
    pub g: usize,
    pub k: usize,
    pub alpha_cycles: Vec<CycleSpec>,
    pub beta_cycles: Vec<CycleSpec>,
    pub monodromy: TwistWord,
}

/// A pointed Heegaard diagram produced from fibration data. `alpha` and
/// `beta` index into `surface.curves`; `z` and `w` index into
/// `surface.marks`. The two region sets partition the regions of the
/// diagram's overlay into the maximal-fibre side `F` (containing `w`) and
/// the minimal-fibre side `Fbar` (containing `z`), the two pieces cut out
/// by the tube waists.
#[derive(Clone, Debug)]
pub struct HeegaardDiagram {
    pub surface: CombinatorialSurface,
    pub g: usize,
    pub k: usize,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub z: usize,
    pub w: usize,
    pub f_regions: BTreeSet<usize>,
    pub fbar_regions: BTreeSet<usize>,
}

impl HeegaardDiagram {
    pub fn overlay(&self) -> Result<Overlay> {
        self.surface.overlay_with(&[])
    }

    pub fn alpha_names(&self) -> Vec<&str> {
        self.alpha.iter().map(|&i| self.surface.curves[i].name.as_str()).collect()
    }

    pub fn beta_names(&self) -> Vec<&str> {
        self.beta.iter().map(|&i| self.surface.curves[i].name.as_str()).collect()
    }
}

/// Where the standard arc pair `pbar` of the minimal fibre lands in the
/// maximal fibre. The two fibre copies sit in the Heegaard surface with
/// opposite orientations, so the gluing reads the handle word backwards:
/// block order reverses and the two arcs within a block trade places.
pub fn image_pair(g: usize, k: usize, pbar: usize) -> usize {
    debug_assert!(k <= g && pbar < 2 * k);
    let block = pbar / 2;
    let eps = pbar % 2;
    2 * (g - 1 - block) + (1 - eps)
}

/// Pair index of a standard handle curve name (`a3` -> pair 4 of the
/// family, `b3` -> pair 5).
fn handle_pair_index(g: usize, name: &str) -> Result<usize> {
    let err = || {
        QfError::Fibration(format!(
            "cycle base {:?} is not one of the handle curves a1..a{}, b1..b{}",
            name, g, g
        ))
    };
    let (kind, digits) = name.split_at(1);
    let i: usize = digits.parse().map_err(|_| err())?;
    if i < 1 || i > g {
        return Err(err());
    }
    match kind {
        "a" => Ok(2 * (i - 1)),
        "b" => Ok(2 * (i - 1) + 1),
        _ => Err(err()),
    }
}

fn shifted(c: &Curve, offset: usize) -> Curve {
    let tokens = c
        .tokens
        .iter()
        .map(|t| Token::new(t.dart + offset, t.pos.clone()))
        .collect();
    let mut out = c.clone();
    out.tokens = tokens;
    out
}

/// Close a minimal-side arc and its maximal-side image into one curve.
/// After each arc's last token the curve dives into the adjacent tube and
/// re-emerges at the other arc's first token; the tube gluing pins the
/// crossing positions, so each transit contributes exactly one token.
fn close_through_tubes(sc: &Scaffold, name: &str, min_arc: &Curve, max_arc: &Curve) -> Result<Curve> {
    let mut tokens = Vec::new();
    for arc in [min_arc, max_arc] {
        let last = arc
            .tokens
            .last()
            .ok_or_else(|| QfError::internal("transported arc without tokens"))?;
        let exit = sc
            .rev(last.dart)
            .ok_or_else(|| QfError::internal("transported arc ends on an unglued dart"))?;
        tokens.extend(arc.tokens[..arc.tokens.len() - 1].iter().cloned());
        tokens.push(Token::new(exit, qr(1, 1) - last.pos.clone()));
    }
    Ok(Curve::closed(name, tokens))
}

/// Twist a family of arcs coherently: every successive image is produced
/// in a context that already holds the previous ones, so parallel strands
/// along a shared guide stack into separate gaps instead of colliding.
fn twist_family(scratch: &CombinatorialSurface, names: &[String], word: &TwistWord) -> Result<Vec<Curve>> {
    let mut ctx = scratch.curves.clone();
    let mut targets = Vec::with_capacity(names.len());
    for n in names {
        targets.push(scratch.curve_index(n)?);
    }
    for (guide, power) in word {
        let gi = scratch.curve_index(guide)?;
        if !ctx[gi].closed {
            return Err(QfError::TwistAlongArc(guide.clone()));
        }
        for &ti in &targets {
            ctx[ti] = moves::twist(&scratch.scaffold, &ctx, ti, gi, *power)?;
        }
    }
    Ok(targets.into_iter().map(|ti| ctx[ti].clone()).collect())
}

fn pair_curve_index(scratch: &CombinatorialSurface, pair: usize) -> Result<usize> {
    let block = pair / 2;
    let name = if pair % 2 == 0 {
        format!("a{}", block + 1)
    } else {
        format!("b{}", block + 1)
    };
    scratch.curve_index(&name)
}

fn rank_of_pairings(ov: &Overlay, rows: &[usize], cols: &[usize]) -> usize {
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|&r| {
            cols.iter()
                .map(|&c| BigInt::from(ov.algebraic_intersection(r, c)))
                .collect()
        })
        .collect();
    snf::rank(&m, cols.len())
}

pub fn build_heegaard_diagram(data: &BrokenFibrationData) -> Result<HeegaardDiagram> {
    let (g, k) = (data.g, data.k);
    if g == 0 {
        return Err(QfError::Fibration(
            "the maximal fibre is a sphere; spherical fibres are not supported".into(),
        ));
    }
    if k > g {
        return Err(QfError::Fibration(format!(
            "minimal fibre genus {} exceeds maximal fibre genus {}",
            k, g
        )));
    }
    let n_user = g - k;
    if data.alpha_cycles.len() != n_user || data.beta_cycles.len() != n_user {
        return Err(QfError::Fibration(format!(
            "need exactly {} alpha and {} beta vanishing cycles for genus {} -> {}, got {} and {}",
            n_user,
            n_user,
            g,
            k,
            data.alpha_cycles.len(),
            data.beta_cycles.len()
        )));
    }
    if !data.monodromy.is_empty() && g != k {
        return Err(QfError::Fibration(
            "a monodromy word only makes sense in the fibred case g = k".into(),
        ));
    }

    // Scratch copy of the maximal fibre. Vanishing cycles and monodromy
    // images are realized here first, where the standard families live,
    // then re-based onto the joined surface.
    let scratch = build_standard_surface(g, 2)?;
    let scratch_ids = match &scratch.layout {
        Layout::Ring(ids) => ids.clone(),
        _ => return Err(QfError::internal("scratch fibre is not a ring")),
    };

    let mut alpha_user = Vec::with_capacity(n_user);
    for spec in &data.alpha_cycles {
        let base_idx = pair_curve_index(&scratch, handle_pair_index(g, &spec.base)?)?;
        let mut cur = scratch.apply_twist(&scratch.curves[base_idx].name.clone(), &spec.word)?;
        cur.name = spec.name.clone();
        alpha_user.push(cur);
    }
    // Beta cycles start from parallel push-offs of their bases so that an
    // alpha and a beta cycle over the same handle stay transverse instead
    // of landing on top of each other.
    let mut beta_user = Vec::with_capacity(n_user);
    for spec in &data.beta_cycles {
        let pair = handle_pair_index(g, &spec.base)?;
        let den = nth_prime(2 + 6 * g + pair);
        let mut ctx = scratch.curves.clone();
        let ti = ctx.len();
        ctx.push(standard::ring_dual(&scratch_ids, pair, den));
        for (guide, power) in &spec.word {
            let gi = scratch.curve_index(guide)?;
            if !ctx[gi].closed {
                return Err(QfError::TwistAlongArc(guide.clone()));
            }
            ctx[ti] = moves::twist(&scratch.scaffold, &ctx, ti, gi, *power)?;
        }
        let mut cur = ctx.swap_remove(ti);
        cur.name = spec.name.clone();
        beta_user.push(cur);
    }

    // Maximal-side images of the minimal fibre's standard arcs, with the
    // monodromy applied to the vertex-side family.
    let xi_names: Vec<String> = (0..2 * k)
        .map(|pbar| format!("xi{}", image_pair(g, k, pbar) + 1))
        .collect();
    let max_xi: Vec<Curve> = if data.monodromy.is_empty() {
        xi_names
            .iter()
            .map(|n| scratch.curve(n).cloned())
            .collect::<Result<_>>()?
    } else {
        twist_family(&scratch, &xi_names, &data.monodromy)?
    };
    let max_eta: Vec<Curve> = (0..2 * k)
        .map(|pbar| {
            scratch
                .curve(&format!("eta{}", image_pair(g, k, pbar) + 1))
                .cloned()
        })
        .collect::<Result<_>>()?;

    check_on_scratch(&scratch, &scratch_ids, g, k, &alpha_user, &beta_user, &max_xi, &max_eta)?;

    // Assemble the Heegaard surface: minimal side, maximal side, then a
    // tube through each half of the base circle. The vertex-circle tube
    // carries beta0, the inner-circle tube carries alpha0.
    let mut sc = Scaffold::new();
    let (min_side, min_ring, min_out_anchor, min_in_anchor) = if k >= 1 {
        let ids = scaffold::ring_into(&mut sc, k, "min.");
        let (o, i) = (ids.c_plus[0], ids.inner[0]);
        (FibreSide::Ring(ids.clone()), Some(ids), o, i)
    } else {
        let ids = scaffold::annulus_into(&mut sc, "min.");
        let (o, i) = (ids.outer, ids.inner);
        (FibreSide::Annulus(ids), None, o, i)
    };
    let min_darts = sc.darts.len();
    let max_ids = scaffold::ring_into(&mut sc, g, "max.");
    let tube_p = scaffold::add_seam(&mut sc, min_out_anchor, max_ids.c_plus[0], "P")?;
    let tube_q = scaffold::add_seam(&mut sc, min_in_anchor, max_ids.inner[0], "Q")?;

    let mut curves = Vec::new();
    curves.push(Curve::closed("alpha0", vec![Token::new(tube_q.s_up, qr(1, 2))]));
    for c in &alpha_user {
        curves.push(shifted(c, min_darts));
    }
    for pbar in 0..2 * k {
        let ids = min_ring.as_ref().expect("k >= 1 here");
        let min_arc = standard::ring_xi_arc(ids, pbar, nth_prime(2 + pbar));
        let max_arc = shifted(&max_xi[pbar], min_darts);
        curves.push(close_through_tubes(
            &sc,
            &format!("alpha{}", n_user + 1 + pbar),
            &min_arc,
            &max_arc,
        )?);
    }
    let alpha: Vec<usize> = (0..curves.len()).collect();

    let beta_start = curves.len();
    curves.push(Curve::closed("beta0", vec![Token::new(tube_p.s_up, qr(1, 2))]));
    for c in &beta_user {
        curves.push(shifted(c, min_darts));
    }
    for pbar in 0..2 * k {
        let ids = min_ring.as_ref().expect("k >= 1 here");
        let min_arc = standard::ring_eta_arc(ids, pbar, nth_prime(2 + 2 * k + pbar));
        let max_arc = shifted(&max_eta[pbar], min_darts);
        curves.push(close_through_tubes(
            &sc,
            &format!("beta{}", n_user + 1 + pbar),
            &min_arc,
            &max_arc,
        )?);
    }
    let beta: Vec<usize> = (beta_start..curves.len()).collect();

    let mut names = BTreeSet::new();
    for c in &curves {
        if !names.insert(c.name.clone()) {
            return Err(QfError::Fibration(format!(
                "cycle name {:?} collides with another curve of the diagram",
                c.name
            )));
        }
    }

    let layout = JoinedIds {
        min_side,
        max_side: max_ids.clone(),
        tube_p: tube_p.clone(),
        tube_q: tube_q.clone(),
    };
    let mut surface = CombinatorialSurface::from_parts(
        sc,
        g + k + 1,
        0,
        Layout::Joined(Box::new(layout)),
        curves,
    )
    .map_err(|e| match e {
        QfError::Degenerate(msg) => QfError::CyclesNotDisjoint(format!(
            "curve families could not be put in general position: {}",
            msg
        )),
        other => other,
    })?;

    let (z_cell, z_corner) = match &surface.layout {
        Layout::Joined(j) => match &j.min_side {
            FibreSide::Ring(ids) => (ids.cells[0], 5),
            FibreSide::Annulus(ids) => (ids.cell, 0),
        },
        _ => unreachable!(),
    };
    surface.marks.push(MarkedPoint {
        name: "z".into(),
        cell: z_cell,
        corner: z_corner,
    });
    surface.marks.push(MarkedPoint {
        name: "w".into(),
        cell: max_ids.cells[0],
        corner: 0,
    });
    let z = surface.marks.len() - 2;
    let w = surface.marks.len() - 1;

    let (f_regions, fbar_regions) = verify_diagram(&surface, g, k, &alpha, &beta, n_user, z, w)?;

    Ok(HeegaardDiagram {
        surface,
        g,
        k,
        alpha,
        beta,
        z,
        w,
        f_regions,
        fbar_regions,
    })
}

/// Pre-flight checks on the scratch fibre: the resolved cycles must stay
/// away from the handles reserved for the minimal fibre, be pairwise
/// disjoint within each family, and span independent homology classes.
#[allow(clippy::too_many_arguments)]
fn check_on_scratch(
    scratch: &CombinatorialSurface,
    ids: &scaffold::RingIds,
    g: usize,
    k: usize,
    alpha_user: &[Curve],
    beta_user: &[Curve],
    max_xi: &[Curve],
    max_eta: &[Curve],
) -> Result<()> {
    let n_user = alpha_user.len();
    let mut check: Vec<Curve> = Vec::new();
    check.extend(alpha_user.iter().cloned());
    check.extend(beta_user.iter().cloned());
    let arc_start = check.len();
    check.extend(max_xi.iter().cloned());
    check.extend(max_eta.iter().cloned());
    let probe_start = check.len();
    for p in 0..2 * g {
        check.push(standard::ring_dual(ids, p, nth_prime(2 + 8 * g + p)));
    }

    let ov = build_overlay(&scratch.scaffold, &check, &[]).map_err(|e| match e {
        QfError::Degenerate(msg) => QfError::CyclesNotDisjoint(format!(
            "vanishing cycles could not be separated (are two specifications the same curve?): {}",
            msg
        )),
        other => other,
    })?;

    for (fam, lo) in [("alpha", 0), ("beta", n_user)] {
        for i in 0..n_user {
            for j in i + 1..n_user {
                if !ov.crossings_between(lo + i, lo + j).is_empty() {
                    return Err(QfError::CyclesNotDisjoint(format!(
                        "{} cycles {:?} and {:?} intersect on the fibre",
                        fam,
                        check[lo + i].name,
                        check[lo + j].name
                    )));
                }
            }
        }
    }
    for u in 0..2 * n_user {
        for a in arc_start..probe_start {
            if !ov.crossings_between(u, a).is_empty() {
                return Err(QfError::Fibration(format!(
                    "vanishing cycle {:?} runs through handles {}..{} of the maximal fibre, \
                     which are reserved for the minimal fibre; rewrite the fibration in normal form",
                    check[u].name,
                    g - k + 1,
                    g
                )));
            }
        }
    }

    let probes: Vec<usize> = (probe_start..check.len()).collect();
    for (fam, lo) in [("alpha", 0), ("beta", n_user)] {
        let rows: Vec<usize> = (lo..lo + n_user).collect();
        let rank = rank_of_pairings(&ov, &rows, &probes);
        if rank != n_user {
            return Err(QfError::CyclesDependent(format!(
                "the {} vanishing cycles span only rank {} in fibre homology, expected {}",
                fam, rank, n_user
            )));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify_diagram(
    surface: &CombinatorialSurface,
    g: usize,
    k: usize,
    alpha: &[usize],
    beta: &[usize],
    n_user: usize,
    z: usize,
    w: usize,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    let ov = surface.overlay_with(&[])?;

    // Families must be pairwise disjoint. Scratch checks already rejected
    // bad user input, so a violation here is a construction bug.
    for fam in [alpha, beta] {
        for (ii, &i) in fam.iter().enumerate() {
            for &j in &fam[ii + 1..] {
                if !ov.crossings_between(i, j).is_empty() {
                    let user = |x: usize| {
                        let off = if x >= beta[0] { beta[0] } else { 0 };
                        x - off >= 1 && x - off <= n_user
                    };
                    let (a, b) = (&surface.curves[i].name, &surface.curves[j].name);
                    if user(i) || user(j) {
                        return Err(QfError::CyclesNotDisjoint(format!(
                            "{:?} and {:?} intersect on the Heegaard surface",
                            a, b
                        )));
                    }
                    return Err(QfError::internal(format!(
                        "transported curves {:?} and {:?} intersect",
                        a, b
                    )));
                }
            }
        }
    }

    // Homology: each family must span a rank g+k+1 subgroup, measured
    // against a probe basis of handle duals plus one curve through both
    // tubes.
    let probes = probe_family(surface, g, k)?;
    let ovp = surface.overlay_with(&probes)?;
    let cols: Vec<usize> = (surface.curves.len()..surface.curves.len() + probes.len()).collect();
    for (fam, rows) in [("alpha", alpha), ("beta", beta)] {
        let rank = rank_of_pairings(&ovp, rows, &cols);
        if rank != g + k + 1 {
            return Err(QfError::internal(format!(
                "{} family spans rank {} in surface homology, expected {}",
                fam,
                rank,
                g + k + 1
            )));
        }
    }

    // The waists cut the surface in two. Regions merge across every curve
    // except alpha0 and beta0; exactly the fibre sides must survive.
    let mut uf: Vec<usize> = (0..ov.regions.len()).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut c = x;
        while uf[c] != r {
            let n = uf[c];
            uf[c] = r;
            c = n;
        }
        r
    }
    for ci in 0..surface.curves.len() {
        if ci == alpha[0] || ci == beta[0] {
            continue;
        }
        for e in &ov.curve_edges[ci] {
            let (a, b) = (find(&mut uf, e.left), find(&mut uf, e.right));
            uf[a] = b;
        }
    }
    let mut components = BTreeSet::new();
    for r in 0..ov.regions.len() {
        components.insert(find(&mut uf, r));
    }
    if components.len() != 2 {
        return Err(QfError::internal(format!(
            "waist curves cut the diagram into {} pieces, expected 2",
            components.len()
        )));
    }
    let zr = ov.mark_region[z];
    let wr = ov.mark_region[w];
    if find(&mut uf, zr) == find(&mut uf, wr) {
        return Err(QfError::internal(
            "basepoints z and w ended up on the same side of the waists",
        ));
    }
    for (mark, r) in [("z", zr), ("w", wr)] {
        let bc = &ov.regions[r].bounding_curves;
        if !bc.contains(&alpha[0]) || !bc.contains(&beta[0]) {
            return Err(QfError::internal(format!(
                "the {} region must touch both tube waists, borders {:?}",
                mark, bc
            )));
        }
    }
    let zroot = find(&mut uf, zr);
    let mut f_regions = BTreeSet::new();
    let mut fbar_regions = BTreeSet::new();
    for r in 0..ov.regions.len() {
        if find(&mut uf, r) == zroot {
            fbar_regions.insert(r);
        } else {
            f_regions.insert(r);
        }
    }
    Ok((f_regions, fbar_regions))
}

/// Closed curves that detect the homology of the joined surface: duals to
/// every handle on both sides plus one curve threading both tubes.
fn probe_family(surface: &CombinatorialSurface, g: usize, k: usize) -> Result<Vec<Curve>> {
    let j = match &surface.layout {
        Layout::Joined(j) => j,
        _ => return Err(QfError::internal("probe family needs a joined surface")),
    };
    let fresh = |i: usize| nth_prime(2 + 10 * g + 2 * k + i);
    let mut probes = Vec::new();
    let mut pi = 0;
    if let FibreSide::Ring(ids) = &j.min_side {
        for p in 0..2 * k {
            let mut c = standard::ring_dual(ids, p, fresh(pi));
            c.name = format!("probe_min{}", p + 1);
            probes.push(c);
            pi += 1;
        }
    }
    for p in 0..2 * g {
        let mut c = standard::ring_dual(&j.max_side, p, fresh(pi));
        c.name = format!("probe_max{}", p + 1);
        probes.push(c);
        pi += 1;
    }
    let (min_out, min_in) = match &j.min_side {
        FibreSide::Ring(ids) => (ids.c_plus[0], ids.inner[0]),
        FibreSide::Annulus(ids) => (ids.outer, ids.inner),
    };
    let sc = &surface.scaffold;
    let den = fresh(pi);
    let pos = qr(1, den);
    let rev = |d| {
        sc.rev(d)
            .ok_or_else(|| QfError::internal("tube anchor dart is unglued"))
    };
    let mu = Curve::closed(
        "probe_mu",
        vec![
            Token::new(min_out, pos.clone()),
            Token::new(rev(min_in)?, pos.clone()),
            Token::new(j.max_side.inner[0], pos.clone()),
            Token::new(rev(j.max_side.c_plus[0])?, pos),
        ],
    );
    probes.push(mu);
    Ok(probes)
}

/// One component of the cut-open minimal fibre of a sutured broken
/// fibration: its genus and its number of boundary circles.
pub type SuturedPiece = (usize, usize);

/// A broken fibration over an interval, i.e. sutured data: the cut-open
/// minimal fibre pieces, whether the sutures balance, and the vanishing
/// cycle words (over handles of the glued-up maximal fibre).
#[derive(Clone, Debug)]
pub struct SuturedData {
    pub pieces: Vec<SuturedPiece>,
    pub balanced: bool,
    pub alpha_cycles: Vec<CycleSpec>,
    pub beta_cycles: Vec<CycleSpec>,
}

/// Close up sutured data by gluing an auxiliary genus `n >= 1` piece along
/// the sutures. The closed-up fibration has maximal fibre genus equal to
/// the total piece genus plus `n` and drops by one for each vanishing
/// cycle; the auxiliary handles must stay clear of every cycle, which is
/// only possible when the pieces carry at least as many handles as there
/// are cycles. The monodromy of the closure is trivial; callers wanting a
/// twisted regluing can edit the returned data.
pub fn sutured_closure(data: &SuturedData, n: usize) -> Result<BrokenFibrationData> {
    if !data.balanced {
        return Err(QfError::Unbalanced(
            "sutured data is marked unbalanced; closure needs balanced data".into(),
        ));
    }
    if data.pieces.is_empty() {
        return Err(QfError::Unbalanced("sutured data has no pieces".into()));
    }
    if let Some((i, &(_, b))) = data
        .pieces
        .iter()
        .enumerate()
        .find(|(_, &(_, b))| b != 1)
    {
        return Err(QfError::Unbalanced(format!(
            "piece {} has {} boundary circles; balanced pieces have exactly one",
            i + 1,
            b
        )));
    }
    if n == 0 {
        return Err(QfError::Fibration(
            "the auxiliary gluing surface needs positive genus".into(),
        ));
    }
    if data.alpha_cycles.len() != data.beta_cycles.len() {
        return Err(QfError::Fibration(format!(
            "sutured data lists {} alpha cycles but {} beta cycles",
            data.alpha_cycles.len(),
            data.beta_cycles.len()
        )));
    }
    let handles: usize = data.pieces.iter().map(|&(gi, _)| gi).sum();
    let vc = data.alpha_cycles.len();
    if vc > handles {
        return Err(QfError::Fibration(format!(
            "{} vanishing cycles cannot avoid the auxiliary surface: the pieces only carry {} handles",
            vc, handles
        )));
    }
    let g = handles + n;
    Ok(BrokenFibrationData {
        g,
        k: g - vc,
        alpha_cycles: data.alpha_cycles.clone(),
        beta_cycles: data.beta_cycles.clone(),
        monodromy: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_pair_reverses_blocks_and_swaps_arcs_within_a_block() {
        assert_eq!(image_pair(1, 1, 0), 1);
        assert_eq!(image_pair(1, 1, 1), 0);
        assert_eq!(image_pair(2, 1, 0), 3);
        assert_eq!(image_pair(2, 1, 1), 2);
        let g = 3;
        let seen: BTreeSet<usize> = (0..2 * g).map(|p| image_pair(g, g, p)).collect();
        assert_eq!(seen.len(), 2 * g, "the image assignment is a bijection");
        for p in 0..2 * g {
            assert_eq!(image_pair(g, g, image_pair(g, g, p)), p);
        }
    }

    #[test]
    fn handle_names_parse_to_pair_indices() {
        assert_eq!(handle_pair_index(2, "a1").unwrap(), 0);
        assert_eq!(handle_pair_index(2, "b1").unwrap(), 1);
        assert_eq!(handle_pair_index(2, "a2").unwrap(), 2);
        assert_eq!(handle_pair_index(2, "b2").unwrap(), 3);
        assert!(handle_pair_index(2, "a3").is_err());
        assert!(handle_pair_index(2, "c1").is_err());
        assert!(handle_pair_index(2, "a0").is_err());
        assert!(handle_pair_index(2, "xi1").is_err());
    }

    #[test]
    fn sutured_closure_arithmetic_matches_the_piece_data() {
        let disk = SuturedData {
            pieces: vec![(0, 1)],
            balanced: true,
            alpha_cycles: vec![],
            beta_cycles: vec![],
        };
        let closed = sutured_closure(&disk, 1).unwrap();
        assert_eq!((closed.g, closed.k), (1, 1));
        assert!(closed.monodromy.is_empty());

        let cut = SuturedData {
            pieces: vec![(2, 1), (1, 1)],
            balanced: true,
            alpha_cycles: vec![CycleSpec {
                name: "c1".into(),
                base: "a1".into(),
                word: vec![],
            }],
            beta_cycles: vec![CycleSpec {
                name: "d1".into(),
                base: "a1".into(),
                word: vec![],
            }],
        };
        let closed = sutured_closure(&cut, 2).unwrap();
        assert_eq!((closed.g, closed.k), (5, 4));
    }

    #[test]
    fn sutured_closure_rejects_unbalanced_or_overfull_data() {
        let two_boundaries = SuturedData {
            pieces: vec![(1, 2)],
            balanced: true,
            alpha_cycles: vec![],
            beta_cycles: vec![],
        };
        assert!(matches!(
            sutured_closure(&two_boundaries, 1),
            Err(QfError::Unbalanced(_))
        ));

        let flagged = SuturedData {
            pieces: vec![(1, 1)],
            balanced: false,
            alpha_cycles: vec![],
            beta_cycles: vec![],
        };
        assert!(matches!(
            sutured_closure(&flagged, 1),
            Err(QfError::Unbalanced(_))
        ));

        let overfull = SuturedData {
            pieces: vec![(0, 1)],
            balanced: true,
            alpha_cycles: vec![CycleSpec {
                name: "c1".into(),
                base: "a1".into(),
                word: vec![],
            }],
            beta_cycles: vec![CycleSpec {
                name: "d1".into(),
                base: "b1".into(),
                word: vec![],
            }],
        };
        assert!(matches!(
            sutured_closure(&overfull, 1),
            Err(QfError::Fibration(_))
        ));
    }
}
