//! Homology of class-graded complexes over the truncated series ring.
//!
//! Strategy per class: cancel all unit differential entries first, then
//! diagonalise the remaining differential matrix over the polynomial model.
//! With d^2 = 0 the image sits inside the kernel as a direct summand, so the
//! ranks read off the pivot list directly:
//!
//!   free      = #gens - 2 * #pivots
//!   torsion   = positive pivot t-valuations, each one summand Lambda/t^v
//!
//! A pivot whose lowest coefficient is not a unit (integral torsion) or whose
//! valuation reaches the truncation order is refused, never guessed.

use crate::complex::{add_into, reduce_units, Chain, Complex, GenLabel};
use crate::poly::{t_snf, PolyMat, PolyRing};
use crate::NovError;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub class_id: usize,
    pub free_rank: usize,
    /// t-power torsion orders, ascending; an entry v means a summand
    /// killed exactly by t^v.
    pub torsion: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologySummary {
    pub truncation: usize,
    pub mod2: bool,
    pub classes: Vec<ClassSummary>,
}

impl HomologySummary {
    pub fn total_free(&self) -> usize {
        self.classes.iter().map(|c| c.free_rank).sum()
    }

    pub fn total_torsion(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .classes
            .iter()
            .flat_map(|c| c.torsion.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn class(&self, id: usize) -> Option<&ClassSummary> {
        self.classes.iter().find(|c| c.class_id == id)
    }

    /// Rank data agrees, ignoring the truncation stamp. Used for stability
    /// checks that recompute at a doubled order.
    pub fn same_ranks(&self, other: &HomologySummary) -> bool {
        self.classes == other.classes
    }
}

pub fn homology(c: &Complex) -> Result<HomologySummary, NovError> {
    c.check_d_squared()?;
    c.check_class_grading()?;
    let mut classes = Vec::new();
    for id in c.classes() {
        let (sub, _) = c.restrict_to_class(id);
        let (free_rank, torsion) = module_homology(&sub)?;
        classes.push(ClassSummary {
            class_id: id,
            free_rank,
            torsion,
        });
    }
    Ok(HomologySummary {
        truncation: c.tr.order,
        mod2: c.tr.mod2,
        classes,
    })
}

/// Ungraded homology of a single complex (d^2 already verified).
fn module_homology(c: &Complex) -> Result<(usize, Vec<usize>), NovError> {
    let red = reduce_units(c).reduced;
    let n = red.len();
    let pr = PolyRing::for_truncation(&red.tr);
    let mut m = PolyMat::zero(n, n);
    for f in 0..n {
        for (&t, v) in red.row(f) {
            m.set(t, f, pr.from_nov(v));
        }
    }
    let snf = t_snf(&pr, &m, red.tr.order.max(1))?;
    let r = snf.pivots.len();
    if n < 2 * r {
        return Err(NovError::Other(
            "pivot count exceeds generator count; d^2 = 0 must have failed".into(),
        ));
    }
    // a valuation-0 pivot (a unit combination like 2 and 3 in one column that
    // single-entry reduction could not see) is a plain cancellation
    let mut torsion: Vec<usize> = snf.pivots.iter().copied().filter(|&v| v > 0).collect();
    torsion.sort_unstable();
    Ok((n - 2 * r, torsion))
}

/// Subcomplex of the generators selected by `keep`, with the map from new
/// indices back to the original ones. Fails if the selection is not closed
/// under the differential.
pub fn subcomplex_where(
    c: &Complex,
    keep: &dyn Fn(&GenLabel) -> bool,
) -> Result<(Complex, Vec<usize>), NovError> {
    let sel: Vec<usize> = (0..c.len()).filter(|&i| keep(&c.gens[i])).collect();
    let mut newidx = vec![usize::MAX; c.len()];
    for (n, &o) in sel.iter().enumerate() {
        newidx[o] = n;
    }
    let mut out = Complex::new(c.tr);
    for &o in &sel {
        let g = &c.gens[o];
        out.add_gen(g.name.clone(), g.class_id, g.u_index);
    }
    for &o in &sel {
        for (&t, v) in c.row(o) {
            if newidx[t] == usize::MAX {
                if !v.is_zero() {
                    return Err(NovError::Other(format!(
                        "selection is not a subcomplex: d({}) leaves it through {}",
                        c.gens[o].name, c.gens[t].name
                    )));
                }
            } else {
                out.set_diff(newidx[o], newidx[t], v.clone());
            }
        }
    }
    Ok((out, sel))
}

/// Verify f(d x) = d f(x) on every generator of the source.
pub fn check_chain_map(src: &Complex, dst: &Complex, map: &[Chain]) -> Result<(), NovError> {
    if map.len() != src.len() {
        return Err(NovError::Other("chain map has wrong source size".into()));
    }
    let tr = src.tr;
    for x in 0..src.len() {
        let mut lhs: Chain = BTreeMap::new();
        for (&j, c) in src.row(x) {
            for (&k, v) in &map[j] {
                let val = tr.mul(c, v);
                add_into(&tr, &mut lhs, k, &val);
            }
        }
        let rhs = dst.apply_diff(&map[x]);
        if lhs != rhs {
            return Err(NovError::Other(format!(
                "not a chain map at generator {}",
                src.gens[x].name
            )));
        }
    }
    Ok(())
}

/// The shift on a tower of u-indexed generators: level i maps to level i-1 of
/// the same name, level 0 maps to zero. Generator names must be unique per
/// level for the matching to make sense.
pub fn u_shift(c: &Complex) -> Result<Vec<Chain>, NovError> {
    let mut index: BTreeMap<(&str, u32), usize> = BTreeMap::new();
    for (i, g) in c.gens.iter().enumerate() {
        let level = g
            .u_index
            .ok_or_else(|| NovError::Other(format!("generator {} has no tower level", g.name)))?;
        if index.insert((g.name.as_str(), level), i).is_some() {
            return Err(NovError::Other(format!(
                "duplicate tower generator {} at level {}",
                g.name, level
            )));
        }
    }
    let mut map = Vec::with_capacity(c.len());
    for g in &c.gens {
        let level = g.u_index.unwrap();
        if level == 0 {
            map.push(BTreeMap::new());
            continue;
        }
        match index.get(&(g.name.as_str(), level - 1)) {
            Some(&j) => map.push(BTreeMap::from([(j, c.tr.one())])),
            None => {
                return Err(NovError::Other(format!(
                    "tower has {} at level {} but not at level {}",
                    g.name,
                    level,
                    level - 1
                )))
            }
        }
    }
    Ok(map)
}

/// Rank of the image of H(level <= lo) -> H(level <= hi) under inclusion of
/// tower truncations. Both truncated pieces must reduce to zero differential;
/// leftover torsion in a tower is refused rather than misreported.
pub fn inclusion_image_rank(big: &Complex, lo: u32, hi: u32) -> Result<usize, NovError> {
    assert!(lo <= hi);
    let level_le = |cap: u32| {
        move |g: &GenLabel| match g.u_index {
            Some(i) => i <= cap,
            None => false,
        }
    };
    let (sub_lo, lo_old) = subcomplex_where(big, &level_le(lo))?;
    let (sub_hi, hi_old) = subcomplex_where(big, &level_le(hi))?;
    let red_lo = reduce_units(&sub_lo);
    let red_hi = reduce_units(&sub_hi);
    for red in [&red_lo.reduced, &red_hi.reduced] {
        for i in 0..red.len() {
            if !red.row(i).is_empty() {
                return Err(NovError::Other(
                    "tower truncation has non-unit differential after reduction; \
                     its stable rank is not classifiable at this truncation"
                        .into(),
                ));
            }
        }
    }
    // hi-subcomplex position of each original generator
    let mut hi_pos = vec![usize::MAX; big.len()];
    for (n, &o) in hi_old.iter().enumerate() {
        hi_pos[o] = n;
    }
    let tr = big.tr;
    let pr = PolyRing::for_truncation(&tr);
    let mut m = PolyMat::zero(red_hi.reduced.len(), red_lo.reduced.len());
    for (col, iota) in red_lo.iota.iter().enumerate() {
        let mut img: Chain = BTreeMap::new();
        for (&g_lo, v) in iota {
            let o = lo_old[g_lo];
            debug_assert!(hi_pos[o] != usize::MAX, "lo level not inside hi level");
            for (&r, pv) in &red_hi.pi[hi_pos[o]] {
                let val = tr.mul(v, pv);
                add_into(&tr, &mut img, r, &val);
            }
        }
        for (&r, v) in &img {
            m.set(r, col, pr.from_nov(v));
        }
    }
    let snf = t_snf(&pr, &m, tr.order.max(1))?;
    Ok(snf.pivots.len())
}
