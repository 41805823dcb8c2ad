//! Product formula check: homology of a tensor product against the
//! prediction from the factors.
//!
//! Over this ring every classifiable module is free plus t-power torsion, and
//! both kinds have projective dimension at most one, so the product homology
//! per combined class is
//!
//!   free:     sum of f_a * f_b over contributing class pairs
//!   torsion:  f_a copies of each torsion order of b, f_b copies of each of
//!             a, and per torsion pair (v, w) two summands of order min(v, w)
//!             (one from the tensor part, one from the derived part).
//!
//! The check computes both sides independently and reports disagreement
//! rather than papering over it.

use crate::complex::Complex;
use crate::homology::{homology, ClassSummary, HomologySummary};
use crate::NovError;
use std::collections::BTreeMap;

#[derive(Debug)]
pub struct KunnethReport {
    pub left: HomologySummary,
    pub right: HomologySummary,
    pub tensor: HomologySummary,
    pub predicted: Vec<ClassSummary>,
    pub matches: bool,
}

pub fn kunneth_check(
    a: &Complex,
    b: &Complex,
    combine: &dyn Fn(usize, usize) -> usize,
) -> Result<KunnethReport, NovError> {
    let left = homology(a)?;
    let right = homology(b)?;
    let prod = a.tensor(b, combine)?;
    let tensor = homology(&prod)?;

    let mut by_class: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    for ca in &left.classes {
        for cb in &right.classes {
            let id = combine(ca.class_id, cb.class_id);
            let slot = by_class.entry(id).or_default();
            slot.0 += ca.free_rank * cb.free_rank;
            for &w in &cb.torsion {
                for _ in 0..ca.free_rank {
                    slot.1.push(w);
                }
            }
            for &v in &ca.torsion {
                for _ in 0..cb.free_rank {
                    slot.1.push(v);
                }
            }
            for &v in &ca.torsion {
                for &w in &cb.torsion {
                    let m = v.min(w);
                    slot.1.push(m);
                    slot.1.push(m);
                }
            }
        }
    }
    let predicted: Vec<ClassSummary> = by_class
        .into_iter()
        .map(|(class_id, (free_rank, mut torsion))| {
            torsion.sort_unstable();
            ClassSummary {
                class_id,
                free_rank,
                torsion,
            }
        })
        .collect();
    let matches = predicted == tensor.classes;
    Ok(KunnethReport {
        left,
        right,
        tensor,
        predicted,
        matches,
    })
}
