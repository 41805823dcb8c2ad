//! Finitely generated chain complexes over the truncated series ring.
//!
//! Generators carry a display label, a grading class id, and an optional
//! tower index (position in a polynomial tower of copies of a base complex).
//! The differential is stored sparsely, row per source generator.

use crate::ring::{Nov, Truncation};
use crate::NovError;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenLabel {
    pub name: String,
    pub class_id: usize,
    pub u_index: Option<u32>,
}

#[derive(Clone)]
pub struct Complex {
    pub tr: Truncation,
    pub gens: Vec<GenLabel>,
    rows: Vec<BTreeMap<usize, Nov>>,
}

pub type Chain = BTreeMap<usize, Nov>;

impl Complex {
    pub fn new(tr: Truncation) -> Self {
        Complex {
            tr,
            gens: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn add_gen(
        &mut self,
        name: impl Into<String>,
        class_id: usize,
        u_index: Option<u32>,
    ) -> usize {
        self.gens.push(GenLabel {
            name: name.into(),
            class_id,
            u_index,
        });
        self.rows.push(BTreeMap::new());
        self.gens.len() - 1
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn set_diff(&mut self, from: usize, to: usize, coeff: Nov) {
        if coeff.is_zero() {
            self.rows[from].remove(&to);
        } else {
            self.rows[from].insert(to, coeff);
        }
    }

    pub fn add_diff(&mut self, from: usize, to: usize, coeff: &Nov) {
        let cur = self.diff(from, to);
        let new = self.tr.add(&cur, coeff);
        self.set_diff(from, to, new);
    }

    pub fn diff(&self, from: usize, to: usize) -> Nov {
        self.rows[from]
            .get(&to)
            .cloned()
            .unwrap_or_else(|| self.tr.zero())
    }

    pub fn row(&self, from: usize) -> &Chain {
        &self.rows[from]
    }

    /// Differential applied to a chain.
    pub fn apply_diff(&self, chain: &Chain) -> Chain {
        let mut out: Chain = BTreeMap::new();
        for (&g, coef) in chain {
            for (&k, v) in &self.rows[g] {
                let val = self.tr.mul(coef, v);
                add_into(&self.tr, &mut out, k, &val);
            }
        }
        out
    }

    pub fn classes(&self) -> BTreeSet<usize> {
        self.gens.iter().map(|g| g.class_id).collect()
    }

    /// d^2 = 0, reported with the offending pair of generators otherwise.
    pub fn check_d_squared(&self) -> Result<(), NovError> {
        for i in 0..self.len() {
            let mut acc: Chain = BTreeMap::new();
            for (&j, c1) in &self.rows[i] {
                for (&k, c2) in &self.rows[j] {
                    let prod = self.tr.mul(c1, c2);
                    add_into(&self.tr, &mut acc, k, &prod);
                }
            }
            if let Some((k, v)) = acc.iter().next() {
                return Err(NovError::DSquared {
                    from: self.gens[i].name.clone(),
                    to: self.gens[*k].name.clone(),
                    entry: format!("{}", v),
                });
            }
        }
        Ok(())
    }

    /// The differential must stay within a single class.
    pub fn check_class_grading(&self) -> Result<(), NovError> {
        for i in 0..self.len() {
            for (&j, c) in &self.rows[i] {
                if !c.is_zero() && self.gens[i].class_id != self.gens[j].class_id {
                    return Err(NovError::ClassGrading {
                        from: self.gens[i].name.clone(),
                        fc: self.gens[i].class_id,
                        to: self.gens[j].name.clone(),
                        tc: self.gens[j].class_id,
                    });
                }
            }
        }
        Ok(())
    }

    /// Restriction to one class; second value maps new indices to old.
    pub fn restrict_to_class(&self, class_id: usize) -> (Complex, Vec<usize>) {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.gens[i].class_id == class_id)
            .collect();
        let mut back = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            back[old] = new;
        }
        let mut out = Complex::new(self.tr);
        for &old in &keep {
            let g = &self.gens[old];
            out.add_gen(g.name.clone(), g.class_id, g.u_index);
        }
        for &old in &keep {
            for (&to, c) in &self.rows[old] {
                if back[to] != usize::MAX {
                    out.set_diff(back[old], back[to], c.clone());
                }
            }
        }
        (out, keep)
    }

    /// Two-colouring of generators so the differential is odd. Needed for
    /// tensor product signs; fails on an odd cycle in the differential graph.
    pub fn parity_coloring(&self) -> Result<Vec<u8>, NovError> {
        let n = self.len();
        let mut color = vec![u8::MAX; n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for (&j, c) in &self.rows[i] {
                if !c.is_zero() {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v].clone() {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        queue.push_back(w);
                    } else if color[w] == color[v] {
                        return Err(NovError::OddCycle(self.gens[v].name.clone()));
                    }
                }
            }
        }
        Ok(color)
    }

    /// Tensor product with Koszul signs. `combine` merges the two class ids.
    pub fn tensor(
        &self,
        other: &Complex,
        combine: &dyn Fn(usize, usize) -> usize,
    ) -> Result<Complex, NovError> {
        if self.tr.order != other.tr.order || self.tr.mod2 != other.tr.mod2 {
            return Err(NovError::TruncationMismatch(self.tr.order, other.tr.order));
        }
        let par = self.parity_coloring()?;
        let mut out = Complex::new(self.tr);
        let idx = |i: usize, j: usize| i * other.len() + j;
        for i in 0..self.len() {
            for j in 0..other.len() {
                let name = format!("{}*{}", self.gens[i].name, other.gens[j].name);
                let class = combine(self.gens[i].class_id, other.gens[j].class_id);
                out.add_gen(name, class, None);
            }
        }
        for i in 0..self.len() {
            for j in 0..other.len() {
                for (&i2, c) in &self.rows[i] {
                    out.add_diff(idx(i, j), idx(i2, j), c);
                }
                let sign = if par[i] == 0 { 1 } else { -1 };
                for (&j2, c) in &other.rows[j] {
                    let signed = self.tr.scale(sign, c);
                    out.add_diff(idx(i, j), idx(i, j2), &signed);
                }
            }
        }
        Ok(out)
    }
}

pub fn add_into(tr: &Truncation, chain: &mut Chain, key: usize, val: &Nov) {
    if val.is_zero() {
        return;
    }
    let cur = chain.get(&key).cloned().unwrap_or_else(|| tr.zero());
    let new = tr.add(&cur, val);
    if new.is_zero() {
        chain.remove(&key);
    } else {
        chain.insert(key, new);
    }
}

/// Result of cancelling all unit-coefficient differential entries.
///
/// `iota` includes the reduced complex into the original one and `pi`
/// projects back; both are chain maps, `pi . iota = id`, so homology is
/// unchanged while the reduced differential has no unit entries left.
pub struct Reduction {
    pub reduced: Complex,
    /// original indices of the surviving generators
    pub kept: Vec<usize>,
    /// iota[r] = chain in the original complex representing reduced gen r
    pub iota: Vec<Chain>,
    /// pi[o] = chain in the reduced complex that original gen o maps to
    pub pi: Vec<Chain>,
}

pub fn reduce_units(c: &Complex) -> Reduction {
    let tr = c.tr;
    let n = c.len();
    let mut rows: Vec<Chain> = (0..n).map(|i| c.rows[i].clone()).collect();
    let mut alive = vec![true; n];
    // iota[i]: chain in ORIGINAL coordinates; pi[z]: chain on ALIVE indices
    let mut iota: Vec<Chain> = (0..n).map(|i| BTreeMap::from([(i, tr.one())])).collect();
    let mut pi: Vec<Chain> = (0..n).map(|i| BTreeMap::from([(i, tr.one())])).collect();

    loop {
        let mut pair: Option<(usize, usize, Nov)> = None;
        'outer: for i in 0..n {
            if !alive[i] {
                continue;
            }
            for (&j, u) in &rows[i] {
                // a unit self-loop (possible in a non-bipartite basis) is not
                // a cancelling pair
                if j != i && alive[j] && tr.is_unit(u) {
                    pair = Some((i, j, u.clone()));
                    break 'outer;
                }
            }
        }
        let (x, y, u) = match pair {
            Some(p) => p,
            None => break,
        };
        let uinv = tr.inverse(&u).expect("unit coefficient");
        // d(x) restricted to the generators that survive this step
        let dx_rest: Vec<(usize, Nov)> = rows[x]
            .iter()
            .filter(|(k, _)| alive[**k] && **k != y && **k != x)
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        // the y column of the current differential
        let ycol: Vec<(usize, Nov)> = (0..n)
            .filter(|&a| alive[a] && a != x)
            .filter_map(|a| rows[a].get(&y).map(|v| (a, v.clone())))
            .collect();
        let iota_x = iota[x].clone();

        // iota update: iota'(r) = iota(r) - <d_cur r, y> u^{-1} iota(x)
        for &(r, ref cry) in &ycol {
            let factor = tr.mul(cry, &uinv);
            let corr: Vec<(usize, Nov)> = iota_x
                .iter()
                .map(|(&g, v)| (g, tr.mul(&factor, v)))
                .collect();
            for (g, v) in corr {
                let negv = tr.neg(&v);
                add_into(&tr, &mut iota[r], g, &negv);
            }
        }

        // pi update: pi'(z) drops x and y coordinates and re-routes the y
        // coordinate through -u^{-1} d(x)|rest
        for z in 0..n {
            let ay = pi[z].remove(&y);
            pi[z].remove(&x);
            if let Some(ay) = ay {
                let factor = tr.mul(&ay, &uinv);
                for (k, v) in &dx_rest {
                    let val = tr.neg(&tr.mul(&factor, v));
                    add_into(&tr, &mut pi[z], *k, &val);
                }
            }
        }

        // differential update on the remaining rows
        for &(a, ref cay) in &ycol {
            let factor = tr.mul(cay, &uinv);
            for (k, v) in &dx_rest {
                let delta = tr.neg(&tr.mul(&factor, v));
                let cur = rows[a].get(k).cloned().unwrap_or_else(|| tr.zero());
                let new = tr.add(&cur, &delta);
                if new.is_zero() {
                    rows[a].remove(k);
                } else {
                    rows[a].insert(*k, new);
                }
            }
            rows[a].remove(&y);
        }
        alive[x] = false;
        alive[y] = false;
        rows[x].clear();
        rows[y].clear();
        for a in 0..n {
            if alive[a] {
                rows[a].remove(&x);
                rows[a].remove(&y);
            }
        }
    }

    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut newidx = vec![usize::MAX; n];
    for (r, &o) in kept.iter().enumerate() {
        newidx[o] = r;
    }
    let mut reduced = Complex::new(tr);
    for &o in &kept {
        let g = &c.gens[o];
        reduced.add_gen(g.name.clone(), g.class_id, g.u_index);
    }
    for &o in &kept {
        for (&j, v) in &rows[o] {
            debug_assert!(newidx[j] != usize::MAX);
            reduced.set_diff(newidx[o], newidx[j], v.clone());
        }
    }
    let iota_out: Vec<Chain> = kept.iter().map(|&o| iota[o].clone()).collect();
    let pi_out: Vec<Chain> = (0..n)
        .map(|z| {
            pi[z]
                .iter()
                .map(|(&r, v)| (newidx[r], v.clone()))
                .collect()
        })
        .collect();
    Reduction {
        reduced,
        kept,
        iota: iota_out,
        pi: pi_out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tr() -> Truncation {
        Truncation::integer(8)
    }

    fn two_step(tr: Truncation) -> Complex {
        // a -> b with unit, x -> y with t
        let mut c = Complex::new(tr);
        let a = c.add_gen("a", 0, None);
        let b = c.add_gen("b", 0, None);
        let x = c.add_gen("x", 0, None);
        let y = c.add_gen("y", 0, None);
        c.set_diff(a, b, tr.one());
        c.set_diff(x, y, tr.monomial(1, 1));
        c
    }

    #[test]
    fn d_squared_check_catches_a_bad_complex() {
        let tr = tr();
        let mut c = Complex::new(tr);
        let a = c.add_gen("a", 0, None);
        let b = c.add_gen("b", 0, None);
        let d = c.add_gen("c", 0, None);
        c.set_diff(a, b, tr.one());
        c.set_diff(b, d, tr.one());
        let err = c.check_d_squared().unwrap_err();
        assert!(matches!(err, NovError::DSquared { .. }));
    }

    #[test]
    fn class_grading_violations_are_reported() {
        let tr = tr();
        let mut c = Complex::new(tr);
        let a = c.add_gen("a", 0, None);
        let b = c.add_gen("b", 1, None);
        c.set_diff(a, b, tr.one());
        assert!(matches!(
            c.check_class_grading(),
            Err(NovError::ClassGrading { .. })
        ));
    }

    #[test]
    fn unit_reduction_cancels_unit_pairs_only() {
        let c = two_step(tr());
        let red = reduce_units(&c);
        assert_eq!(red.reduced.len(), 2);
        let names: Vec<&str> = red.reduced.gens.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, vec!["x", "y"]);
        assert_eq!(red.reduced.diff(0, 1), c.tr.monomial(1, 1));
    }

    fn check_reduction_maps(c: &Complex, red: &Reduction) {
        let tr = c.tr;
        // pi . iota = id
        for r in 0..red.reduced.len() {
            let mut img: Chain = BTreeMap::new();
            for (&g, coef) in &red.iota[r] {
                for (&r2, v) in &red.pi[g] {
                    let val = tr.mul(coef, v);
                    add_into(&tr, &mut img, r2, &val);
                }
            }
            assert_eq!(img.len(), 1);
            assert_eq!(img.get(&r).unwrap(), &tr.one());
        }
        // d_C . iota = iota . d_red
        for r in 0..red.reduced.len() {
            let lhs = c.apply_diff(&red.iota[r]);
            let mut rhs: Chain = BTreeMap::new();
            for (&r2, v) in red.reduced.row(r) {
                for (&g, coef) in &red.iota[r2] {
                    let val = tr.mul(v, coef);
                    add_into(&tr, &mut rhs, g, &val);
                }
            }
            assert_eq!(lhs, rhs, "iota fails to commute with d");
        }
        // pi . d_C = d_red . pi
        for z in 0..c.len() {
            let mut lhs: Chain = BTreeMap::new();
            for (&k, v) in c.row(z) {
                for (&r, pv) in &red.pi[k] {
                    let val = tr.mul(v, pv);
                    add_into(&tr, &mut lhs, r, &val);
                }
            }
            let rhs = red.reduced.apply_diff(&red.pi[z]);
            assert_eq!(lhs, rhs, "pi fails to commute with d");
        }
    }

    #[test]
    fn reduction_maps_are_chain_maps_with_pi_iota_identity() {
        let tr = tr();
        let mut c = Complex::new(tr);
        let a = c.add_gen("a", 0, None);
        let b = c.add_gen("b", 0, None);
        let cc = c.add_gen("c", 0, None);
        let d = c.add_gen("d", 0, None);
        c.set_diff(a, b, tr.one());
        c.set_diff(a, cc, tr.monomial(1, 1));
        c.set_diff(d, b, tr.one());
        c.check_d_squared().unwrap();
        let red = reduce_units(&c);
        assert_eq!(red.reduced.len(), 2);
        for i in 0..red.reduced.len() {
            for (_, v) in red.reduced.row(i) {
                assert!(!tr.is_unit(v));
            }
        }
        check_reduction_maps(&c, &red);
    }

    #[test]
    fn reduction_maps_survive_randomised_bipartite_complexes() {
        let tr = tr();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let ne = rng.gen_range(1..5usize);
            let no = rng.gen_range(1..5usize);
            let mut c = Complex::new(tr);
            for i in 0..ne {
                c.add_gen(format!("e{}", i), 0, None);
            }
            for j in 0..no {
                c.add_gen(format!("o{}", j), 0, None);
            }
            // differential only from evens to odds keeps d^2 = 0 trivially
            for i in 0..ne {
                for j in 0..no {
                    let c0 = rng.gen_range(-1i64..2);
                    let c1 = rng.gen_range(-1i64..2);
                    let v = tr.elem(&[c0, c1]);
                    if !v.is_zero() {
                        c.set_diff(i, ne + j, v);
                    }
                }
            }
            c.check_d_squared().unwrap();
            let red = reduce_units(&c);
            red.reduced.check_d_squared().unwrap();
            for i in 0..red.reduced.len() {
                for (_, v) in red.reduced.row(i) {
                    assert!(!tr.is_unit(v));
                }
            }
            check_reduction_maps(&c, &red);
        }
    }

    #[test]
    fn unit_self_loops_are_not_cancelling_pairs() {
        // d(a) = a + b, d(b) = -a - b squares to zero; the diagonal units must
        // not be cancelled, and the rank-1 differential leaves free rank 1
        let tr = tr();
        let mut c = Complex::new(tr);
        let a = c.add_gen("a", 0, None);
        let b = c.add_gen("b", 0, None);
        c.add_gen("c", 0, None);
        c.set_diff(a, a, tr.one());
        c.set_diff(a, b, tr.one());
        c.set_diff(b, a, tr.int(-1));
        c.set_diff(b, b, tr.int(-1));
        c.check_d_squared().unwrap();
        let red = reduce_units(&c);
        assert_eq!(red.reduced.len() % 2, 1, "cancellations remove pairs");
        check_reduction_maps(&c, &red);
        let h = crate::homology::homology(&c).unwrap();
        assert_eq!(h.classes[0].free_rank, 1);
        assert!(h.classes[0].torsion.is_empty());
    }

    #[test]
    fn tensor_differential_squares_to_zero() {
        let tr = tr();
        let c1 = two_step(tr);
        let c2 = two_step(tr);
        let t = c1.tensor(&c2, &|a, _| a).unwrap();
        assert_eq!(t.len(), 16);
        t.check_d_squared().unwrap();
    }

    #[test]
    fn parity_coloring_rejects_odd_cycles() {
        let tr = tr();
        let mut c = Complex::new(tr);
        let a = c.add_gen("a", 0, None);
        let b = c.add_gen("b", 0, None);
        let d = c.add_gen("c", 0, None);
        c.set_diff(a, b, tr.monomial(1, 1));
        c.set_diff(a, d, tr.monomial(1, 1));
        c.set_diff(b, d, tr.monomial(1, 1));
        assert!(matches!(c.parity_coloring(), Err(NovError::OddCycle(_))));
    }
}
