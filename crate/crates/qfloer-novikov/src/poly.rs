//! Exact-coefficient polynomial arithmetic in the quotient ring Z[t]/t^(N+1)
//! (or mod 2), used by the homology classifier.
//!
//! Matching the cap to the ring's truncation order makes every entry that is
//! zero at the recorded precision literally zero, so elimination cannot chase
//! phantom content above the precision. Every pivot is the minimal live
//! valuation when it is chosen, which keeps all later entries true at full
//! precision; a pivot valuation reaching the truncation order is still
//! reported as unstable instead of trusted.

use crate::ring::{Nov, Truncation};
use crate::NovError;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer polynomial in t, lowest degree first, coefficients above the
/// ring's cap discarded.
pub type Poly = Vec<BigInt>;

#[derive(Clone, Copy)]
pub struct PolyRing {
    pub mod2: bool,
    /// Largest retained power of t during elimination.
    pub cap: usize,
}

impl PolyRing {
    pub fn for_truncation(tr: &Truncation) -> Self {
        PolyRing {
            mod2: tr.mod2,
            cap: tr.order,
        }
    }

    fn norm_coeff(&self, x: BigInt) -> BigInt {
        if self.mod2 {
            ((x % 2) + 2) % 2
        } else {
            x
        }
    }

    fn norm(&self, mut p: Poly) -> Poly {
        p.truncate(self.cap + 1);
        for c in &mut p {
            *c = self.norm_coeff(std::mem::take(c));
        }
        trim(&mut p);
        p
    }

    pub fn from_nov(&self, a: &Nov) -> Poly {
        self.norm(a.coeffs().to_vec())
    }

    pub fn zero(&self) -> Poly {
        Vec::new()
    }

    pub fn is_zero(&self, p: &Poly) -> bool {
        p.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = vec![BigInt::zero(); a.len().max(b.len())];
        for (i, c) in a.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in b.iter().enumerate() {
            out[i] += c;
        }
        self.norm(out)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        self.norm(a.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        let mut out = vec![BigInt::zero(); (a.len() + b.len() - 1).min(self.cap + 1)];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() || i > self.cap {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if i + j > self.cap {
                    break;
                }
                out[i + j] += x * y;
            }
        }
        self.norm(out)
    }

    /// Valuation (index of lowest nonzero coefficient).
    pub fn val(&self, p: &Poly) -> Option<usize> {
        p.iter().position(|c| !c.is_zero())
    }

    /// True when p = t^v * u with u a series unit (lowest coefficient +-1).
    pub fn lowest_is_unit(&self, p: &Poly) -> bool {
        match self.val(p) {
            Some(v) => p[v].abs().is_one(),
            None => false,
        }
    }

    /// Series division a / p for p = t^v * unit with val(a) >= v, truncated at
    /// the working cap. Exact in the truncated ring.
    pub fn div(&self, a: &Poly, p: &Poly) -> Poly {
        let v = self.val(p).expect("division by zero polynomial");
        debug_assert!(p[v].abs().is_one());
        let av = match self.val(a) {
            Some(x) => x,
            None => return self.zero(),
        };
        assert!(av >= v, "division would need negative powers of t");
        let u0 = p[v].clone(); // +-1, self inverse
        let unit: Poly = p[v..].to_vec();
        let mut rem: Poly = a[v..].to_vec();
        rem.resize(self.cap + 1, BigInt::zero());
        let mut q = vec![BigInt::zero(); self.cap + 1];
        for k in 0..=self.cap {
            let qk = self.norm_coeff(&rem[k] * &u0);
            if !qk.is_zero() {
                for (j, y) in unit.iter().enumerate() {
                    if k + j > self.cap {
                        break;
                    }
                    let sub = &qk * y;
                    rem[k + j] = self.norm_coeff(std::mem::take(&mut rem[k + j]) - sub);
                }
            }
            q[k] = qk;
        }
        self.norm(q)
    }
}

fn trim(p: &mut Poly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// A matrix over the polynomial ring, row major.
#[derive(Clone)]
pub struct PolyMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Poly>,
}

impl PolyMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMat {
            rows,
            cols,
            data: vec![Vec::new(); rows * cols],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Poly {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        self.data[r * self.cols + c] = p;
    }
}

/// Outcome of the t-power diagonalisation.
pub struct TSnf {
    /// t-valuations of the nonzero diagonal entries.
    pub pivots: Vec<usize>,
    /// Column basis of the kernel in the original column coordinates.
    pub kernel: Vec<Vec<Poly>>,
}

struct Elim {
    m: PolyMat,
    colops: PolyMat,
    used_rows: Vec<bool>,
    used_cols: Vec<bool>,
}

impl Elim {
    /// row_dst += q * row_src as an integer multiple (valid at any valuation)
    fn row_add(&mut self, ring: &PolyRing, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let scale: Poly = vec![q.clone()];
        for c in 0..self.m.cols {
            if self.used_cols[c] {
                continue;
            }
            let delta = ring.mul(&scale, self.m.at(src, c));
            let new = ring.add(self.m.at(dst, c), &delta);
            self.m.set(dst, c, new);
        }
    }

    /// col_dst += q * col_src, mirrored on the column-op tracker
    fn col_add(&mut self, ring: &PolyRing, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let scale: Poly = vec![q.clone()];
        for r in 0..self.m.rows {
            let delta = ring.mul(&scale, self.m.at(r, src));
            let new = ring.add(self.m.at(r, dst), &delta);
            self.m.set(r, dst, new);
        }
        for r in 0..self.m.cols {
            let delta = ring.mul(&scale, self.colops.at(r, src));
            let new = ring.add(self.colops.at(r, dst), &delta);
            self.colops.set(r, dst, new);
        }
    }

    fn live_entries_at_val(&self, ring: &PolyRing, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.m.rows {
            if self.used_rows[r] {
                continue;
            }
            for c in 0..self.m.cols {
                if self.used_cols[c] {
                    continue;
                }
                if ring.val(self.m.at(r, c)) == Some(v) {
                    out.push((r, c));
                }
            }
        }
        out
    }
}

/// Integer Euclid on the lowest-valuation coefficient layer. Every live entry
/// has valuation >= v, so integer row/column operations act on the layer the
/// way they would on a plain integer matrix; this concentrates the layer gcd
/// into one entry, producing a series-unit pivot whenever the gcd is 1.
fn concentrate_layer_gcd(ring: &PolyRing, e: &mut Elim, v: usize) {
    let layer = |e: &Elim, r: usize, c: usize| -> BigInt {
        let p = e.m.at(r, c);
        match ring.val(p) {
            Some(w) if w == v => p[v].clone(),
            _ => BigInt::zero(),
        }
    };
    for _round in 0..10_000 {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for (r, c) in e.live_entries_at_val(ring, v) {
            let a = layer(e, r, c).abs();
            if best.as_ref().map_or(true, |(_, _, b)| a < *b) {
                best = Some((r, c, a));
            }
        }
        let (pr, pc, a) = match best {
            Some(b) => b,
            None => return,
        };
        if a.is_one() {
            return;
        }
        let pval = layer(e, pr, pc);
        let mut changed = false;
        for r in 0..e.m.rows {
            if r == pr || e.used_rows[r] {
                continue;
            }
            let x = layer(e, r, pc);
            let q = &x / &pval;
            if !q.is_zero() {
                e.row_add(ring, r, pr, &(-q));
                changed = true;
            }
        }
        for c in 0..e.m.cols {
            if c == pc || e.used_cols[c] {
                continue;
            }
            let x = layer(e, pr, c);
            let q = &x / &pval;
            if !q.is_zero() {
                e.col_add(ring, c, pc, &(-q));
                changed = true;
            }
        }
        if changed {
            continue;
        }
        // pivot row and column are clear at this layer; pull in any entry the
        // pivot does not divide so Euclid can keep shrinking it
        let mut transported = false;
        for (r, c) in e.live_entries_at_val(ring, v) {
            if r == pr || c == pc {
                continue;
            }
            if !(layer(e, r, c) % &pval).is_zero() {
                e.row_add(ring, pr, r, &BigInt::one());
                transported = true;
                break;
            }
        }
        if !transported {
            return;
        }
    }
}

/// Diagonalise using only pivots of the form t^v * unit. Succeeds exactly on
/// matrices whose cokernel is free plus t-power torsion; an integer-torsion
/// pivot (for example a bare 2) is refused with a descriptive error.
/// `stable_below` bounds the pivot valuations that are trusted: a pivot at or
/// above it means the truncation order was too small for this input.
pub fn t_snf(ring: &PolyRing, mat: &PolyMat, stable_below: usize) -> Result<TSnf, NovError> {
    let rows = mat.rows;
    let cols = mat.cols;
    let mut colops = PolyMat::zero(cols, cols);
    for i in 0..cols {
        colops.set(i, i, vec![BigInt::one()]);
    }
    let mut e = Elim {
        m: mat.clone(),
        colops,
        used_rows: vec![false; rows],
        used_cols: vec![false; cols],
    };
    let mut pivots = Vec::new();

    loop {
        // lowest valuation entry among unused rows/cols, preferring unit
        // lowest coefficients among equal valuations
        let mut best: Option<(usize, usize, usize)> = None;
        for r in 0..rows {
            if e.used_rows[r] {
                continue;
            }
            for c in 0..cols {
                if e.used_cols[c] {
                    continue;
                }
                if let Some(v) = ring.val(e.m.at(r, c)) {
                    let replace = match best {
                        None => true,
                        Some((br, bc, bv)) => {
                            v < bv
                                || (v == bv
                                    && !ring.lowest_is_unit(e.m.at(br, bc))
                                    && ring.lowest_is_unit(e.m.at(r, c)))
                        }
                    };
                    if replace {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let (mut pr, mut pc, pv) = match best {
            Some(b) => b,
            None => break,
        };
        if !ring.lowest_is_unit(e.m.at(pr, pc)) {
            concentrate_layer_gcd(ring, &mut e, pv);
            let retry = e
                .live_entries_at_val(ring, pv)
                .into_iter()
                .find(|&(r, c)| ring.lowest_is_unit(e.m.at(r, c)));
            match retry {
                Some((r, c)) => {
                    pr = r;
                    pc = c;
                }
                None => {
                    // gcd of the layer is a genuine non-unit integer
                    let stuck = e
                        .live_entries_at_val(ring, pv)
                        .into_iter()
                        .min_by_key(|&(r, c)| e.m.at(r, c)[pv].abs())
                        .expect("layer cannot empty without a unit appearing");
                    let p = e.m.at(stuck.0, stuck.1);
                    return Err(NovError::Unclassifiable(format!("{}", p[pv]), pv));
                }
            }
        }
        let pivot = e.m.at(pr, pc).clone();
        if pv >= stable_below {
            return Err(NovError::Unstable(format!(
                "pivot valuation {} reaches the truncation order; raise it",
                pv
            )));
        }
        // clear the pivot column (row operations; kernel unaffected)
        for r in 0..rows {
            if r == pr || e.used_rows[r] {
                continue;
            }
            let entry = e.m.at(r, pc).clone();
            if ring.is_zero(&entry) {
                continue;
            }
            let q = ring.div(&entry, &pivot);
            for c in 0..cols {
                if e.used_cols[c] {
                    continue;
                }
                let delta = ring.mul(&q, e.m.at(pr, c));
                let new = ring.sub(e.m.at(r, c), &delta);
                e.m.set(r, c, new);
            }
        }
        // clear the pivot row (column operations; mirrored on colops)
        for c in 0..cols {
            if c == pc || e.used_cols[c] {
                continue;
            }
            let entry = e.m.at(pr, c).clone();
            if ring.is_zero(&entry) {
                continue;
            }
            let q = ring.div(&entry, &pivot);
            for r in 0..rows {
                let delta = ring.mul(&q, e.m.at(r, pc));
                let new = ring.sub(e.m.at(r, c), &delta);
                e.m.set(r, c, new);
            }
            for r in 0..cols {
                let delta = ring.mul(&q, e.colops.at(r, pc));
                let new = ring.sub(e.colops.at(r, c), &delta);
                e.colops.set(r, c, new);
            }
        }
        e.used_rows[pr] = true;
        e.used_cols[pc] = true;
        pivots.push(pv);
    }

    let kernel: Vec<Vec<Poly>> = (0..cols)
        .filter(|c| !e.used_cols[*c])
        .map(|c| (0..cols).map(|r| e.colops.at(r, c).clone()).collect())
        .collect();
    Ok(TSnf { pivots, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> PolyRing {
        PolyRing { mod2: false, cap: 40 }
    }

    fn p(cs: &[i64]) -> Poly {
        let mut out: Poly = cs.iter().map(|&x| BigInt::from(x)).collect();
        while out.last().map_or(false, |c| c.is_zero()) {
            out.pop();
        }
        out
    }

    #[test]
    fn division_by_unit_times_t_power() {
        let r = ring();
        let q = r.div(&p(&[0, 0, 1, 1]), &p(&[0, 1, 1]));
        assert_eq!(q, p(&[0, 1]));
        let q = r.div(&p(&[0, 2, -2]), &p(&[-1, 1]));
        assert_eq!(q, p(&[0, -2]));
    }

    #[test]
    fn division_can_produce_a_full_series() {
        let r = ring();
        // t / (1 + t) = t - t^2 + t^3 - ...
        let q = r.div(&p(&[0, 1]), &p(&[1, 1]));
        assert_eq!(q[1], BigInt::from(1));
        assert_eq!(q[2], BigInt::from(-1));
        assert_eq!(q[3], BigInt::from(1));
        // check q * (1 + t) = t in the truncated ring
        let back = r.mul(&q, &p(&[1, 1]));
        assert_eq!(r.val(&back), Some(1));
        assert!(back[1..].iter().skip(1).take(r.cap - 2).all(|c| c.is_zero()));
    }

    #[test]
    fn snf_of_single_t_entry() {
        let r = ring();
        let mut m = PolyMat::zero(1, 1);
        m.set(0, 0, p(&[0, 1]));
        let out = t_snf(&r, &m, 16).unwrap();
        assert_eq!(out.pivots, vec![1]);
        assert!(out.kernel.is_empty());
    }

    #[test]
    fn snf_finds_kernel_columns() {
        let r = ring();
        let mut m = PolyMat::zero(1, 2);
        m.set(0, 0, p(&[1]));
        m.set(0, 1, p(&[0, 1]));
        let out = t_snf(&r, &m, 16).unwrap();
        assert_eq!(out.pivots, vec![0]);
        assert_eq!(out.kernel.len(), 1);
        let k = &out.kernel[0];
        let combo = r.add(&r.mul(m.at(0, 0), &k[0]), &r.mul(m.at(0, 1), &k[1]));
        assert!(r.is_zero(&combo));
    }

    #[test]
    fn unimodular_integer_layer_is_classified() {
        // t * [[2,3],[3,4]] has no unit entry but the layer gcd is 1, so the
        // Euclid pass must find pivots t, t
        let r = ring();
        let mut m = PolyMat::zero(2, 2);
        m.set(0, 0, p(&[0, 2]));
        m.set(0, 1, p(&[0, 3]));
        m.set(1, 0, p(&[0, 3]));
        m.set(1, 1, p(&[0, 4]));
        let out = t_snf(&r, &m, 16).unwrap();
        assert_eq!(out.pivots, vec![1, 1]);
        assert!(out.kernel.is_empty());
    }

    #[test]
    fn integer_torsion_is_refused() {
        let r = ring();
        let mut m = PolyMat::zero(1, 1);
        m.set(0, 0, p(&[2]));
        assert!(matches!(
            t_snf(&r, &m, 16),
            Err(NovError::Unclassifiable(_, 0))
        ));
    }

    #[test]
    fn mixed_matrix_diagonalises() {
        let r = ring();
        let mut m = PolyMat::zero(2, 2);
        m.set(0, 0, p(&[1]));
        m.set(0, 1, p(&[0, 1]));
        m.set(1, 0, p(&[0, 1]));
        m.set(1, 1, p(&[0, 0, 1, 1]));
        let mut out = t_snf(&r, &m, 16).unwrap();
        out.pivots.sort();
        assert_eq!(out.pivots, vec![0, 3]);
    }

    #[test]
    fn unstable_pivot_is_reported() {
        let r = ring();
        let mut m = PolyMat::zero(1, 1);
        m.set(0, 0, p(&[0, 0, 0, 1]));
        assert!(matches!(t_snf(&r, &m, 3), Err(NovError::Unstable(_))));
    }
}
