//! Construction of complexes with homology known by design, plus a
//! deterministic scrambler that entangles the differential through basis
//! changes without altering the homology. Used to exercise the classifier
//! and the product formula against an independent prediction.

use crate::complex::Complex;
use crate::ring::{Nov, Truncation};

#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub class_id: usize,
    /// number of free homology generators
    pub free: usize,
    /// torsion orders, one summand killed by t^v per entry
    pub torsion: Vec<usize>,
    /// extra unit-cancelling pairs that contribute nothing
    pub unit_pairs: usize,
}

/// Direct sum of elementary pieces realising the spec exactly.
pub fn elementary(tr: Truncation, specs: &[SampleSpec]) -> Complex {
    let mut c = Complex::new(tr);
    for s in specs {
        for i in 0..s.free {
            c.add_gen(format!("f{}c{}", i, s.class_id), s.class_id, None);
        }
        for (i, &v) in s.torsion.iter().enumerate() {
            let a = c.add_gen(format!("ta{}c{}", i, s.class_id), s.class_id, None);
            let b = c.add_gen(format!("tb{}c{}", i, s.class_id), s.class_id, None);
            c.set_diff(a, b, tr.monomial(v, 1));
        }
        for i in 0..s.unit_pairs {
            let a = c.add_gen(format!("ua{}c{}", i, s.class_id), s.class_id, None);
            let b = c.add_gen(format!("ub{}c{}", i, s.class_id), s.class_id, None);
            c.set_diff(a, b, tr.one());
        }
    }
    c
}

/// splitmix64; a fixed tiny generator keeps sample complexes identical
/// across crates and runs without threading a generator through the API.
struct Mix(u64);

impl Mix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Entangle the differential by repeated basis changes x <- x + q y within a
/// class. Each step conjugates the differential, so homology is unchanged.
pub fn scramble(c: &mut Complex, seed: u64, steps: usize) {
    let n = c.len();
    if n < 2 {
        return;
    }
    let mut rng = Mix(seed ^ 0xd1b54a32d192ed03);
    for _ in 0..steps {
        let x = rng.below(n as u64) as usize;
        let y = rng.below(n as u64) as usize;
        if x == y || c.gens[x].class_id != c.gens[y].class_id {
            continue;
        }
        let coeffs: Vec<i64> = (0..2)
            .map(|_| rng.below(5) as i64 - 2)
            .collect();
        let q = c.tr.elem(&coeffs);
        if q.is_zero() {
            continue;
        }
        basis_add(c, x, y, &q);
    }
}

/// Basis change x <- x + q y: row_x += q row_y and col_y -= q col_x.
fn basis_add(c: &mut Complex, x: usize, y: usize, q: &Nov) {
    let tr = c.tr;
    let ry: Vec<(usize, Nov)> = c.row(y).iter().map(|(&k, v)| (k, v.clone())).collect();
    for (k, v) in ry {
        let delta = tr.mul(q, &v);
        c.add_diff(x, k, &delta);
    }
    for i in 0..c.len() {
        let v = c.diff(i, x);
        if !v.is_zero() {
            let delta = tr.neg(&tr.mul(q, &v));
            c.add_diff(i, y, &delta);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology;

    #[test]
    fn elementary_complexes_have_their_declared_homology() {
        let tr = Truncation::integer(8);
        let spec = vec![
            SampleSpec {
                class_id: 0,
                free: 2,
                torsion: vec![1, 3],
                unit_pairs: 1,
            },
            SampleSpec {
                class_id: 4,
                free: 0,
                torsion: vec![2],
                unit_pairs: 0,
            },
        ];
        let c = elementary(tr, &spec);
        c.check_d_squared().unwrap();
        let h = homology(&c).unwrap();
        assert_eq!(h.class(0).unwrap().free_rank, 2);
        assert_eq!(h.class(0).unwrap().torsion, vec![1, 3]);
        assert_eq!(h.class(4).unwrap().free_rank, 0);
        assert_eq!(h.class(4).unwrap().torsion, vec![2]);
    }

    #[test]
    fn scrambling_preserves_homology_across_many_seeds() {
        let tr = Truncation::integer(10);
        for seed in 0..40u64 {
            let spec = vec![SampleSpec {
                class_id: 0,
                free: (seed % 3) as usize,
                torsion: match seed % 4 {
                    0 => vec![],
                    1 => vec![1],
                    2 => vec![2, 2],
                    _ => vec![1, 4],
                },
                unit_pairs: (seed % 2) as usize + 1,
            }];
            let mut c = elementary(tr, &spec);
            scramble(&mut c, seed, 60);
            c.check_d_squared().unwrap();
            let h = homology(&c).unwrap();
            assert_eq!(
                h.class(0).unwrap().free_rank,
                spec[0].free,
                "seed {}",
                seed
            );
            assert_eq!(h.class(0).unwrap().torsion, {
                let mut t = spec[0].torsion.clone();
                t.sort_unstable();
                t
            });
        }
    }

    #[test]
    fn scrambling_keeps_the_class_grading() {
        let tr = Truncation::integer(8);
        let spec = vec![
            SampleSpec {
                class_id: 0,
                free: 1,
                torsion: vec![2],
                unit_pairs: 1,
            },
            SampleSpec {
                class_id: 1,
                free: 1,
                torsion: vec![1],
                unit_pairs: 0,
            },
        ];
        let mut c = elementary(tr, &spec);
        scramble(&mut c, 99, 80);
        c.check_class_grading().unwrap();
    }
}

